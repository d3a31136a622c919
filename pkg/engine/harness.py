#!/usr/bin/env python3
"""Experiment orchestration: sweeps, convergence traces, rate regions and self-tests.

Every scheme in a sweep cell is evaluated on the same channel draws, so the
outer bound can be checked draw by draw.
"""

import logging
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace

import numpy as np
import pandas as pd
from scipy.optimize import linprog

from engine import maddpg, mlp
from engine.bounds import (
    INEQUALITY_WEIGHTS,
    check_dominance,
    mimo_outer_bound,
    no_interference_rates,
)
from engine.channel import AntennaConfig, EstimatedChannels, make_streams, sample_channel
from engine.config import BENCHMARK_SCHEMES, config_hash
from engine.precoders import (
    benchmark_precoders,
    leakage_ratio,
    mrt,
    normalize_no_rs,
    normalize_rsma,
    slnr_direction,
    slnr_value,
    zf,
    zf_with_status,
)
from engine.rates import (
    ALL_ORDERS,
    PrecoderSet,
    classify_regime,
    no_rs_rates,
    rate_report,
)
from engine.storage import init_db, ledger_path, now_taiwan, save_evaluation, save_trace

logger = logging.getLogger(__name__)

SWEEP_COLUMNS = [
    "snr_db",
    "scheme",
    "mean_sum_rate",
    "std",
    "n_runs",
    "n_steps",
    "order_source",
    "csit_mode",
    "seed",
    "config_hash",
    "mean_r1",
    "mean_r2",
    "train_mean",
    "exhaustive_mean",
    "perfect_csit_mean",
]
TRACE_COLUMNS = [
    "episode",
    "mean_reward",
    "critic_loss_1",
    "critic_loss_2",
    "actor_grad_norm_1",
    "actor_grad_norm_2",
    "mean_r1",
    "mean_r2",
]
REGIME_COLUMNS = ["snr_db", "regime", "count", "mean_common_fraction"]
SELFTEST_SNRS = (0.0, 10.0, 20.0)
SELFTEST_TOL = 1e-10


@dataclass
class CellResult:
    rows: list
    regimes: list
    traces: dict
    violations: int = 0
    worst_excess: float = 0.0


def _write_csv(frame, path):
    directory = os.path.dirname(path)
    if directory:
        os.makedirs(directory, exist_ok=True)
    frame.to_csv(path, index=False)
    logger.info(f"已寫入 {path}")


def perfect_view(true):
    """完美 CSIT：發射端看到真實通道"""
    return EstimatedChannels(true.h1, true.h2, true.g1, true.g2)


def _row(config, snr_db, scheme, summary, digest, **extra):
    row = {
        "snr_db": float(snr_db),
        "scheme": scheme,
        "mean_sum_rate": summary.mean,
        "std": summary.std,
        "n_runs": config.eval_runs,
        "n_steps": config.eval_steps,
        "order_source": config.order_source if scheme == "maddpg_rs" else "none",
        "csit_mode": config.csit_mode,
        "seed": config.seed,
        "config_hash": digest,
        "mean_r1": summary.mean_r1,
        "mean_r2": summary.mean_r2,
        "train_mean": float("nan"),
        "exhaustive_mean": float("nan"),
        "perfect_csit_mean": float("nan"),
    }
    row.update(extra)
    return row


def benchmark_rewards(scheme, draws, beta, powers, use_truth=False):
    """基準預編碼在每次通道上的 (加權速率, R1, R2)"""
    rewards, r1, r2 = [], [], []
    for run in draws:
        run_rewards = []
        for true, est in run:
            view = perfect_view(true) if use_truth else est
            w1, w2, _ = benchmark_precoders(scheme, view, true.noise_power, powers)
            report = no_rs_rates(true, w1, w2, beta)
            run_rewards.append(report.r_beta)
            r1.append(report.r1)
            r2.append(report.r2)
        rewards.append(run_rewards)
    return rewards, r1, r2


def bound_values(draws, config):
    """每次通道的外界（與方案配對）"""
    p1, p2 = config.powers
    return [
        [mimo_outer_bound(true, p1, p2, config.beta, config.bound_convention) for true, _ in run]
        for run in draws
    ]


def no_interference_rewards(draws, beta, powers):
    """真實通道上 MRT 預編碼、干擾設為零的速率"""
    rewards, r1, r2 = [], [], []
    for run in draws:
        run_rewards = []
        for true, _ in run:
            w1 = normalize_no_rs(mrt(true.h1), powers[0])
            w2 = normalize_no_rs(mrt(true.h2), powers[1])
            a, b = no_interference_rates(true, w1, w2)
            run_rewards.append(beta * a + (1.0 - beta) * b)
            r1.append(a)
            r2.append(b)
        rewards.append(run_rewards)
    return rewards, r1, r2


def _agent_rewards(agents, draws, config, order_source):
    """逐次通道的策略獎勵、速率與共同功率比例"""
    rewards, r1, r2, fractions = [], [], [], []
    for run in draws:
        run_rewards = []
        for true, est in run:
            report, precoders = maddpg.policy_report(
                agents, true, est, config.beta, order_source, config.fixed_order, config.powers
            )
            run_rewards.append(report.r_beta)
            r1.append(report.r1)
            r2.append(report.r2)
            fractions.append(0.5 * (precoders.common_fraction(1) + precoders.common_fraction(2)))
        rewards.append(run_rewards)
    return rewards, r1, r2, fractions


def _dominance(rewards, bounds):
    """回傳 (違反次數, 最大超出量)"""
    violations = 0
    worst = 0.0
    for run_rewards, run_bounds in zip(rewards, bounds):
        for value, report in zip(run_rewards, run_bounds):
            if not check_dominance(value, report):
                violations += 1
                worst = max(worst, value - report.weighted_max)
    return violations, worst


def train_or_load(config, snr_db, scheme, reuse_checkpoints=False):
    """訓練學習型方案並存檔；reuse_checkpoints 時優先讀取已有檢查點

    Returns:
        (agents, TrainResult 或 None)
    """
    rate_splitting = scheme == "maddpg_rs"
    learned = rate_splitting and config.order_source == "learned"
    directory = maddpg.checkpoint_dir(config.outdir, scheme, snr_db, config.seed)
    if reuse_checkpoints and os.path.exists(os.path.join(directory, "agent1_precoder.ckpt")):
        logger.info(f"讀取檢查點 {directory}")
        agents = maddpg.load_agents(directory, config.antennas, config.hyper, rate_splitting, learned)
        return agents, None
    result = maddpg.train(config, snr_db, rate_splitting)
    maddpg.save_agents(result.agents, directory)
    _write_csv(pd.DataFrame(result.trace, columns=TRACE_COLUMNS), os.path.join(directory, "trace.csv"))
    return result.agents, result


def _sweep_cell(config, snr_db, reuse_checkpoints=False):
    """一個 SNR 點上的所有方案（獨立的亂數世界）"""
    digest = config_hash(config)
    logger.info(f"SNR {snr_db:g} dB: 評估 {', '.join(config.schemes)}")
    draws = maddpg.evaluation_draws(
        config.antennas, snr_db, config.csit_mode, config.seed, config.eval_runs, config.eval_steps
    )
    bounds = bound_values(draws, config)
    cell = CellResult(rows=[], regimes=[], traces={})
    rs_fractions = None

    for scheme in config.schemes:
        extra = {}
        fractions = None
        if scheme in ("maddpg_rs", "maddpg_nors"):
            agents, result = train_or_load(config, snr_db, scheme, reuse_checkpoints)
            order_source = config.order_source if scheme == "maddpg_rs" else "exhaustive"
            rewards, r1, r2, fractions = _agent_rewards(agents, draws, config, order_source)
            if result is not None:
                extra["train_mean"] = result.train_mean
                cell.traces[scheme] = result.trace
            if scheme == "maddpg_rs":
                rs_fractions = fractions
                if order_source == "learned":
                    exhaustive = _agent_rewards(agents, draws, config, "exhaustive")[0]
                    extra["exhaustive_mean"] = float(np.mean(exhaustive))
        elif scheme in BENCHMARK_SCHEMES:
            rewards, r1, r2 = benchmark_rewards(scheme, draws, config.beta, config.powers)
            if config.csit_mode != "none":
                perfect = benchmark_rewards(scheme, draws, config.beta, config.powers, use_truth=True)[0]
                extra["perfect_csit_mean"] = float(np.mean(perfect))
        elif scheme == "upper_bound":
            rewards = [[b.weighted_max for b in run] for run in bounds]
            r1 = [b.vertex[0] for run in bounds for b in run]
            r2 = [b.vertex[1] for run in bounds for b in run]
        else:
            rewards, r1, r2 = no_interference_rewards(draws, config.beta, config.powers)

        if scheme not in ("upper_bound", "no_interference"):
            violations, worst = _dominance(rewards, bounds)
            if violations:
                logger.warning(f"{scheme} @ {snr_db:g} dB: {violations} 次超過外界，最大 {worst:.3e}")
            cell.violations += violations
            cell.worst_excess = max(cell.worst_excess, worst)

        summary = maddpg.summarize(rewards, r1, r2, fractions)
        cell.rows.append(_row(config, snr_db, scheme, summary, digest, **extra))

    if config.antennas.is_siso:
        cell.regimes = regime_table(draws, snr_db, rs_fractions)
    return cell


def regime_table(draws, snr_db, fractions=None):
    """SISO 干擾強度分類統計；fractions 為 RS 策略每次通道的共同功率比例"""
    flat = [true for run in draws for true, _ in run]
    labels = [classify_regime(true) for true in flat]
    rows = []
    for regime in ("weak", "mixed", "strong"):
        idx = [k for k, label in enumerate(labels) if label == regime]
        mean_fraction = float("nan")
        if fractions is not None and idx:
            mean_fraction = float(np.mean([fractions[k] for k in idx]))
        rows.append(
            {
                "snr_db": float(snr_db),
                "regime": regime,
                "count": len(idx),
                "mean_common_fraction": mean_fraction,
            }
        )
    return rows


def _record(config, cells):
    """寫入帳本"""
    digest = config_hash(config)
    database = ledger_path(config.outdir)
    init_db(database)
    created_at = now_taiwan().isoformat()
    for snr_db, cell in cells:
        for row in cell.rows:
            save_evaluation(
                database,
                created_at,
                config_hash=digest,
                seed=config.seed,
                scheme=row["scheme"],
                snr_db=row["snr_db"],
                beta=config.beta,
                mean=row["mean_sum_rate"],
                std=row["std"],
                n_runs=row["n_runs"],
                n_steps=row["n_steps"],
                order_source=row["order_source"],
                csit_mode=row["csit_mode"],
                train_mean=_or_none(row["train_mean"]),
                exhaustive_mean=_or_none(row["exhaustive_mean"]),
                perfect_csit_mean=_or_none(row["perfect_csit_mean"]),
            )
        for scheme, trace in cell.traces.items():
            save_trace(database, created_at, digest, config.seed, scheme, snr_db, trace)


def _or_none(value):
    return None if value is None or np.isnan(value) else float(value)


def run_sweep(config, workers=1, reuse_checkpoints=False, record=True):
    """對每個 (方案, SNR) 訓練或讀取、評估並輸出 sweep.csv

    Returns:
        (結果 DataFrame, 外界違反次數, 最大超出量)
    """
    snrs = list(config.snr_db)
    if workers > 1 and len(snrs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as executor:
            cells = list(
                executor.map(
                    _sweep_cell, [config] * len(snrs), snrs, [reuse_checkpoints] * len(snrs)
                )
            )
    else:
        cells = [_sweep_cell(config, snr, reuse_checkpoints) for snr in snrs]

    frame = pd.DataFrame([row for cell in cells for row in cell.rows], columns=SWEEP_COLUMNS)
    _write_csv(frame, os.path.join(config.outdir, "sweep.csv"))
    regimes = [row for cell in cells for row in cell.regimes]
    if regimes:
        _write_csv(pd.DataFrame(regimes, columns=REGIME_COLUMNS), os.path.join(config.outdir, "regimes.csv"))

    violations = sum(cell.violations for cell in cells)
    worst = max((cell.worst_excess for cell in cells), default=0.0)
    if record:
        _record(config, list(zip(snrs, cells)))
    return frame, violations, worst


def _mean_bound(config, snr_db, field_name="weighted_max"):
    draws = maddpg.evaluation_draws(
        config.antennas, snr_db, config.csit_mode, config.seed, config.eval_runs, config.eval_steps
    )
    reports = [b for run in bound_values(draws, config) for b in run]
    return reports, float(np.mean([getattr(b, field_name) for b in reports]))


def run_convergence(config, record=True):
    """每回合平均獎勵；n_seeds > 1 時輸出跨種子的平均 ± 標準差"""
    schemes = [s for s in config.schemes if s in ("maddpg_rs", "maddpg_nors")] or ["maddpg_rs"]
    digest = config_hash(config)
    rows = []
    for snr_db in config.snr_db:
        _, bound = _mean_bound(config, snr_db)
        for scheme in schemes:
            traces = []
            for k in range(config.n_seeds):
                seed = config.seed + k
                result = maddpg.train(config, snr_db, scheme == "maddpg_rs", seed=seed)
                traces.append(pd.DataFrame(result.trace, columns=TRACE_COLUMNS))
                if record and k == 0:
                    database = ledger_path(config.outdir)
                    init_db(database)
                    save_trace(database, now_taiwan().isoformat(), digest, seed, scheme, snr_db, result.trace)
            stacked = np.stack([t["mean_reward"].to_numpy() for t in traces])
            mean = stacked.mean(axis=0)
            std = stacked.std(axis=0)
            averaged = sum(t[TRACE_COLUMNS[2:]] for t in traces) / len(traces)
            for e in range(len(mean)):
                row = {
                    "snr_db": float(snr_db),
                    "scheme": scheme,
                    "episode": e + 1,
                    "mean_reward": float(mean[e]),
                    "std_reward": float(std[e]),
                    "band_low": float(mean[e] - std[e]),
                    "band_high": float(mean[e] + std[e]),
                    "upper_bound": bound,
                    "n_seeds": config.n_seeds,
                    "seed": config.seed,
                    "config_hash": digest,
                }
                row.update({c: float(averaged[c].iloc[e]) for c in TRACE_COLUMNS[2:]})
                rows.append(row)
    frame = pd.DataFrame(rows)
    _write_csv(frame, os.path.join(config.outdir, "convergence.csv"))
    return frame


def region_points(trace, delay, every):
    """延遲 delay 回合後，每 every 回合平均一次 (R1, R2)"""
    points = []
    for end in range(delay + every, len(trace) + 1, every):
        window = trace[end - every:end]
        points.append(
            (
                end,
                float(np.mean([r["mean_r1"] for r in window])),
                float(np.mean([r["mean_r2"] for r in window])),
            )
        )
    return points


def run_rate_region(config):
    """每個 β 的 (R1, R2) 軌跡與外界最佳頂點"""
    digest = config_hash(config)
    rows = []
    for snr_db in config.snr_db:
        for beta in config.beta_list:
            cfg = replace(config, beta=beta)
            reports, _ = _mean_bound(cfg, snr_db)
            vertex_r1 = float(np.mean([b.vertex[0] for b in reports]))
            vertex_r2 = float(np.mean([b.vertex[1] for b in reports]))
            box_r1 = float(np.mean([b.r1_max for b in reports]))
            box_r2 = float(np.mean([b.r2_max for b in reports]))
            result = maddpg.train(cfg, snr_db, True)
            for episode, r1, r2 in region_points(result.trace, config.region_delay, config.region_every):
                rows.append(
                    {
                        "snr_db": float(snr_db),
                        "beta": beta,
                        "episode": episode,
                        "r1": r1,
                        "r2": r2,
                        "bound_r1": vertex_r1,
                        "bound_r2": vertex_r2,
                        "box_r1": box_r1,
                        "box_r2": box_r2,
                        "seed": config.seed,
                        "config_hash": digest,
                    }
                )
            logger.info(f"β={beta:g} @ {snr_db:g} dB: 最佳頂點 ({vertex_r1:.3f}, {vertex_r2:.3f})")
    frame = pd.DataFrame(rows)
    _write_csv(frame, os.path.join(config.outdir, "region.csv"))
    return frame


def run_train(config, scheme="maddpg_rs"):
    """在每個 SNR 點訓練並寫入檢查點與訓練曲線"""
    if scheme not in ("maddpg_rs", "maddpg_nors"):
        raise ValueError(f"只有學習型方案可以訓練，收到 {scheme}")
    return [train_or_load(config, snr_db, scheme)[1] for snr_db in config.snr_db]


def run_eval(config, scheme="maddpg_rs"):
    """讀取檢查點並在評估通道上計算平均速率，輸出 eval.csv

    Returns:
        每個 SNR 點的 EvalSummary
    """
    rate_splitting = scheme == "maddpg_rs"
    learned = rate_splitting and config.order_source == "learned"
    order_source = config.order_source if rate_splitting else "exhaustive"
    digest = config_hash(config)
    summaries, rows = [], []
    for snr_db in config.snr_db:
        directory = maddpg.checkpoint_dir(config.outdir, scheme, snr_db, config.seed)
        agents = maddpg.load_agents(directory, config.antennas, config.hyper, rate_splitting, learned)
        draws = maddpg.evaluation_draws(
            config.antennas, snr_db, config.csit_mode, config.seed, config.eval_runs, config.eval_steps
        )
        summary = maddpg.evaluate(agents, draws, config.beta, order_source, config.fixed_order, config.powers)
        summaries.append(summary)
        rows.append(_row(config, snr_db, scheme, summary, digest))
    _write_csv(pd.DataFrame(rows, columns=SWEEP_COLUMNS), os.path.join(config.outdir, "eval.csv"))
    return summaries


# ---------------------------------------------------------------------------
# 自我檢查
# ---------------------------------------------------------------------------


def scalar_chain_rates(ch, precoders, order):
    """SISO 純量 SINR 串接（與矩陣形式互相獨立）"""
    n0 = ch.noise_power
    out = {}
    for i, eta in ((1, order.eta1), (2, order.eta2)):
        j = 2 if i == 1 else 1
        h = complex(ch.direct(i)[0, 0])
        g = complex(ch.cross(j)[0, 0])
        p = {
            "jc": abs(g * complex(precoders.common(j)[0, 0])) ** 2,
            "ic": abs(h * complex(precoders.common(i)[0, 0])) ** 2,
            "ip": abs(h * complex(precoders.private(i)[0, 0])) ** 2,
            "jp": abs(g * complex(precoders.private(j)[0, 0])) ** 2,
        }
        sequence = ("jc", "ic", "ip") if eta == 1 else ("ic", "jc", "ip")
        for k, stream in enumerate(sequence):
            interference = n0 + p["jp"] + sum(p[s] for s in sequence[k + 1:])
            out[(i, stream)] = np.log2(1.0 + p[stream] / interference)
    r1c = min(out[(1, "ic")], out[(2, "jc")])
    r2c = min(out[(2, "ic")], out[(1, "jc")])
    return r1c + out[(1, "ip")], r2c + out[(2, "ip")]


def random_precoders(antennas, rng, powers=(1.0, 1.0)):
    """隨機方向與分配比例的 RSMA 預編碼"""
    raw = []
    for i in (1, 2):
        shape = (antennas.tx(i), antennas.streams(i))
        uc = rng.standard_normal(shape) + 1j * rng.standard_normal(shape)
        up = rng.standard_normal(shape) + 1j * rng.standard_normal(shape)
        raw.append((uc, up, rng.uniform(0.0, 1.0, size=shape[1])))
    return normalize_rsma(raw, powers)


def lp_reference(inequalities, beta):
    """scipy linprog 求解加權線性規劃（交叉驗證用）"""
    result = linprog(
        c=[-beta, -(1.0 - beta)],
        A_ub=np.array(INEQUALITY_WEIGHTS, dtype=float),
        b_ub=np.array(inequalities),
        bounds=[(0, None), (0, None)],
        method="highs",
    )
    return -result.fun


def _check(results, name, ok, detail):
    results.append((name, bool(ok), detail))
    level = logging.INFO if ok else logging.ERROR
    logger.log(level, f"{'通過' if ok else '失敗'} {name}: {detail}")


def run_selftest(seed=0, n_draws=200):
    """數值不變量檢查；回傳 [(名稱, 是否通過, 說明)]"""
    rng = make_streams(seed, 0)["channel"]
    results = []
    siso = AntennaConfig()
    mimo = AntennaConfig(3, 3, 3, 3)
    miso = AntennaConfig(m1=3, m2=3)

    worst = 0.0
    for _ in range(n_draws):
        ch = sample_channel(siso, rng.uniform(0, 20), rng)
        pre = random_precoders(siso, rng)
        for order in ALL_ORDERS:
            report = rate_report(ch, pre, order, 0.5)
            ref = scalar_chain_rates(ch, pre, order)
            worst = max(worst, abs(report.r1 - ref[0]), abs(report.r2 - ref[1]))
    _check(results, "SISO 純量串接", worst <= 1e-12, f"最大誤差 {worst:.2e}")

    worst = 0.0
    for _ in range(n_draws):
        ch = sample_channel(mimo, rng.uniform(0, 20), rng)
        w1 = normalize_no_rs(rng.standard_normal((3, 3)) + 1j * rng.standard_normal((3, 3)), 1.0)
        w2 = normalize_no_rs(rng.standard_normal((3, 3)) + 1j * rng.standard_normal((3, 3)), 1.0)
        pre = PrecoderSet.private_only(w1, w2)
        a = rate_report(ch, pre, ALL_ORDERS[0], 0.5)
        b = no_rs_rates(ch, w1, w2, 0.5)
        worst = max(worst, abs(a.r1 - b.r1), abs(a.r2 - b.r2))
    _check(results, "零共同功率化約", worst <= SELFTEST_TOL, f"最大誤差 {worst:.2e}")

    worst = 0.0
    for _ in range(n_draws):
        ch = sample_channel(miso, 10.0, rng)
        for i in (1, 2):
            w, _ = zf_with_status(ch.direct(i), ch.cross(i))
            worst = max(worst, leakage_ratio(ch.cross(i), normalize_no_rs(w, 1.0)))
    _check(results, "ZF 洩漏", worst <= 1e-8, f"最大洩漏 {worst:.2e}")

    failures = 0
    for _ in range(n_draws):
        ch = sample_channel(miso, 10.0, rng)
        h, g = ch.h1, ch.g1
        best = slnr_value(h[0], g, ch.noise_power, slnr_direction(h[0], g, ch.noise_power))
        for w in (mrt(h)[:, 0], zf(h, g)[:, 0]):
            if best < slnr_value(h[0], g, ch.noise_power, w) - 1e-9:
                failures += 1
    _check(results, "SLNR 最大化", failures == 0, f"{failures} 次劣於 MRT/ZF")

    _check(results, "梯度檢查", *_gradient_check(rng))

    violations = 0
    lp_gap = 0.0
    for snr_db in SELFTEST_SNRS:
        for antennas in (siso, miso, mimo):
            for _ in range(max(1, n_draws // 10)):
                ch = sample_channel(antennas, snr_db, rng)
                beta = float(rng.uniform(0, 1))
                bound = mimo_outer_bound(ch, 1.0, 1.0, beta)
                lp_gap = max(lp_gap, abs(bound.weighted_max - lp_reference(bound.inequalities, beta)))
                est = perfect_view(ch)
                values = [rate_report(ch, random_precoders(antennas, rng), o, beta).r_beta for o in ALL_ORDERS]
                for scheme in BENCHMARK_SCHEMES:
                    w1, w2, _ = benchmark_precoders(scheme, est, ch.noise_power)
                    values.append(no_rs_rates(ch, w1, w2, beta).r_beta)
                violations += sum(not check_dominance(v, bound) for v in values)
    _check(results, "外界支配", violations == 0, f"{violations} 次違反")
    _check(results, "頂點列舉與 linprog 一致", lp_gap <= 1e-6, f"最大差 {lp_gap:.2e}")
    return results


def _gradient_check(rng, n_checks=20, step=1e-5):
    """小網路上 critic∘actor 的鏈式梯度與中央差分比較"""
    actor = mlp.init_mlp([3, 4, 2], rng, output_activation="tanh")
    critic = mlp.init_mlp([5, 4, 1], rng)
    worst = 0.0
    for _ in range(n_checks):
        obs = rng.standard_normal(3)
        ctx = rng.standard_normal(3)

        def objective(params):
            a, _ = mlp.forward(params, obs)
            return float(mlp.forward(critic, np.concatenate([ctx, a]))[0][0])

        a, actor_cache = mlp.forward(actor, obs)
        _, critic_cache = mlp.forward(critic, np.concatenate([ctx, a]))
        _, grad_in = mlp.backward(critic, critic_cache, np.ones(1))
        grads, _ = mlp.backward(actor, actor_cache, grad_in[3:])

        k = int(rng.integers(len(actor.weights)))
        idx = tuple(int(rng.integers(n)) for n in actor.weights[k].shape)
        plus, minus = actor.copy(), actor.copy()
        plus.weights[k][idx] += step
        minus.weights[k][idx] -= step
        numeric = (objective(plus) - objective(minus)) / (2 * step)
        analytic = grads.weights[k][idx]
        scale = max(abs(numeric), abs(analytic), 1e-4)
        worst = max(worst, abs(numeric - analytic) / scale)
    return worst <= 1e-4, f"最大相對誤差 {worst:.2e}"
