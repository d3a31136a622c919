#!/usr/bin/env python3
"""rsmaic - RSMA 干擾通道多代理人實驗命令列工具"""

import argparse
import logging
import sys

from engine import harness
from engine.config import (
    PRESETS,
    ConfigError,
    apply_preset,
    config_from_sections,
    config_hash,
    read_sections,
    worker_count,
)
from engine.mlp import CheckpointError

logger = logging.getLogger("rsmaic")

# Telegram 通知模組（選用）
try:
    import telegram_notifier

    TELEGRAM_AVAILABLE = True
except ImportError as e:
    TELEGRAM_AVAILABLE = False
    logger.debug(f"Telegram 通知模組未載入: {e}")

VERBS = ("sweep", "converge", "region", "train", "eval", "selftest")

# (命令列參數, 區段, 鍵)
OVERRIDES = (
    ("seed", "experiment", "seed"),
    ("schemes", "experiment", "schemes"),
    ("snr", "experiment", "snr_db"),
    ("beta", "experiment", "beta"),
    ("betas", "experiment", "beta_list"),
    ("order_source", "experiment", "order_source"),
    ("fixed_order", "experiment", "fixed_order"),
    ("csit", "experiment", "csit_mode"),
    ("bound_convention", "experiment", "bound_convention"),
    ("n_seeds", "experiment", "n_seeds"),
    ("m1", "antennas", "m1"),
    ("m2", "antennas", "m2"),
    ("n1", "antennas", "n1"),
    ("n2", "antennas", "n2"),
    ("episodes", "training", "episodes"),
    ("gamma", "training", "gamma"),
    ("episode_length", "training", "episode_length"),
    ("runs", "evaluation", "runs"),
    ("steps", "evaluation", "steps"),
    ("outdir", "output", "directory"),
)


def setup_logging(verbose=False):
    """輸出到標準輸出（systemd 會捕獲）"""
    handler = logging.StreamHandler(sys.stdout)
    handler.setFormatter(logging.Formatter("[RSMAIC %(levelname)s] %(message)s"))
    root = logging.getLogger()
    root.handlers[:] = [handler]
    root.setLevel(logging.DEBUG if verbose else logging.INFO)


def build_parser():
    parser = argparse.ArgumentParser(prog="rsmaic", description=__doc__)
    parser.add_argument("--verbose", action="store_true", help="顯示 DEBUG 訊息")
    sub = parser.add_subparsers(dest="verb", required=True)

    for verb in VERBS:
        p = sub.add_parser(verb)
        if verb == "selftest":
            p.add_argument("--seed", type=int, default=0)
            p.add_argument("--draws", type=int, default=200, help="每項檢查的通道數")
            continue
        p.add_argument("--config", help="INI 配置檔")
        p.add_argument("--preset", choices=PRESETS, help="desk / sweep / long / full")
        p.add_argument("--seed", type=int, required=(verb == "train"))
        p.add_argument("--schemes", help="逗號分隔，例如 maddpg_rs,mrt,upper_bound")
        p.add_argument("--snr", help="逗號分隔的 SNR (dB)")
        p.add_argument("--beta", type=float)
        p.add_argument("--betas", help="rate region 的 β 清單")
        p.add_argument("--order-source", dest="order_source", choices=("exhaustive", "learned", "fixed"))
        p.add_argument("--fixed-order", dest="fixed_order", help="例如 1,0")
        p.add_argument("--csit", choices=("none", "fixed", "snr_scaled"))
        p.add_argument("--bound-convention", dest="bound_convention", choices=("full_power", "isotropic"))
        p.add_argument("--n-seeds", dest="n_seeds", type=int)
        for name in ("m1", "m2", "n1", "n2"):
            p.add_argument(f"--{name}", type=int)
        p.add_argument("--episodes", type=int)
        p.add_argument("--gamma", type=float)
        p.add_argument("--episode-length", dest="episode_length", type=int)
        p.add_argument("--runs", type=int)
        p.add_argument("--steps", type=int)
        p.add_argument("--outdir")
        if verb == "sweep":
            p.add_argument("--workers", type=int, help="平行工作數（預設讀取 RSMAIC_WORKERS）")
            p.add_argument("--reuse-checkpoints", dest="reuse_checkpoints", action="store_true")
        if verb in ("train", "eval"):
            p.add_argument("--scheme", default="maddpg_rs", choices=("maddpg_rs", "maddpg_nors"))
    return parser


def build_config(args):
    """配置檔加上命令列覆寫"""
    sections, lines = read_sections(args.config) if args.config else ({}, {})
    for attr, section, key in OVERRIDES:
        value = getattr(args, attr, None)
        if value is not None:
            sections.setdefault(section, {})[key] = str(value)
    config = config_from_sections(sections, lines)
    if args.preset:
        config = apply_preset(config, args.preset)
    return config


def _notify_sweep(config, frame, violations, worst):
    if not TELEGRAM_AVAILABLE:
        return
    if violations:
        telegram_notifier.notify_dominance_violation(violations, worst)
    rows = list(zip(frame["scheme"], frame["snr_db"], frame["mean_sum_rate"]))
    telegram_notifier.notify_run_finished("sweep", config_hash(config), rows)


def run(args):
    if args.verb == "selftest":
        results = harness.run_selftest(seed=args.seed, n_draws=args.draws)
        failed = [name for name, ok, _ in results if not ok]
        if failed:
            logger.error(f"自我檢查失敗: {', '.join(failed)}")
            return 1
        logger.info(f"自我檢查全部通過（{len(results)} 項）")
        return 0

    config = build_config(args)
    if args.verb == "sweep":
        workers = args.workers if args.workers else worker_count()
        frame, violations, worst = harness.run_sweep(config, workers, args.reuse_checkpoints)
        if violations:
            logger.warning(f"共 {violations} 次超過外界，最大超出 {worst:.3e}")
        _notify_sweep(config, frame, violations, worst)
    elif args.verb == "converge":
        harness.run_convergence(config)
    elif args.verb == "region":
        harness.run_rate_region(config)
    elif args.verb == "train":
        harness.run_train(config, args.scheme)
    elif args.verb == "eval":
        summaries = harness.run_eval(config, args.scheme)
        for snr_db, summary in zip(config.snr_db, summaries):
            logger.info(
                f"{args.scheme} @ {snr_db:g} dB: {summary.mean:.4f} ± {summary.std:.4f} bits"
            )
    return 0


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    setup_logging(args.verbose)
    try:
        return run(args)
    except (ConfigError, CheckpointError, OSError) as e:
        logger.error(str(e))
        return 2


if __name__ == "__main__":
    sys.exit(main())
