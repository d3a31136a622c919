#!/usr/bin/env python3
"""Experiment configuration: INI files merged over defaults, presets and hashing."""

import configparser
import hashlib
import os
import re
from copy import deepcopy
from dataclasses import dataclass, field, replace

from dotenv import load_dotenv

from engine.bounds import BOUND_CONVENTIONS
from engine.channel import ERROR_MODES, AntennaConfig
from engine.maddpg import ORDER_SOURCES, Hyperparameters

LEARNING_SCHEMES = ("maddpg_rs", "maddpg_nors")
BENCHMARK_SCHEMES = ("mrt", "zf", "slnr")
REFERENCE_SCHEMES = ("upper_bound", "no_interference")
ALL_SCHEMES = LEARNING_SCHEMES + BENCHMARK_SCHEMES + REFERENCE_SCHEMES
PRESETS = ("desk", "sweep", "long", "full")

# 預設配置（超參數為預設訓練設定）
DEFAULT_CONFIG = {
    "experiment": {
        "seed": None,
        "schemes": "maddpg_rs,maddpg_nors,mrt,zf,slnr,upper_bound,no_interference",
        "snr_db": "0,5,10,15,20",
        "beta": "0.5",
        "beta_list": "0.5",
        "order_source": "exhaustive",
        "fixed_order": "0,0",
        "csit_mode": "none",
        "bound_convention": "full_power",
        "powers": "1.0,1.0",
        "n_seeds": "1",
    },
    "antennas": {"m1": "1", "m2": "1", "n1": "1", "n2": "1"},
    "training": {
        "episodes": "",
        "gamma": "0.99",
        "batch_size": "128",
        "buffer_capacity": "15000",
        "hidden_size": "64",
        "n_layers": "5",
        "learning_rate": "5e-5",
        "tau": "0.01",
        "noise_variance": "0.1",
        "episode_length": "200",
        "log_every": "100",
        "region_delay": "500",
        "region_every": "100",
    },
    "evaluation": {"runs": "25", "steps": "200"},
    "output": {"directory": "results"},
}


class ConfigError(ValueError):
    """配置檔錯誤，附帶區段、鍵與行號"""

    def __init__(self, message, section=None, key=None, line=None):
        self.section = section
        self.key = key
        self.line = line
        where = []
        if section:
            where.append(f"[{section}]")
        if key:
            where.append(key)
        if line:
            where.append(f"第 {line} 行")
        prefix = " ".join(where)
        super().__init__(f"{prefix}: {message}" if prefix else message)


@dataclass(frozen=True)
class ExperimentConfig:
    seed: int = None
    antennas: AntennaConfig = field(default_factory=AntennaConfig)
    snr_db: tuple = (0.0, 5.0, 10.0, 15.0, 20.0)
    beta: float = 0.5
    beta_list: tuple = (0.5,)
    schemes: tuple = ALL_SCHEMES
    order_source: str = "exhaustive"
    fixed_order: tuple = (0, 0)
    csit_mode: str = "none"
    bound_convention: str = "full_power"
    powers: tuple = (1.0, 1.0)
    n_seeds: int = 1
    episodes: int = None
    eval_runs: int = 25
    eval_steps: int = 200
    hyper: Hyperparameters = field(default_factory=Hyperparameters)
    log_every: int = 100
    region_delay: int = 500
    region_every: int = 100
    outdir: str = "results"
    preset: str = "full"

    def __post_init__(self):
        if self.seed is None:
            raise ConfigError("必須明確指定 seed", "experiment", "seed")
        if not self.schemes:
            raise ConfigError("schemes 不可為空", "experiment", "schemes")
        unknown = [s for s in self.schemes if s not in ALL_SCHEMES]
        if unknown:
            raise ConfigError(f"未知的方案 {unknown}（可用: {', '.join(ALL_SCHEMES)}）", "experiment", "schemes")
        if self.order_source not in ORDER_SOURCES:
            raise ConfigError(f"未知的解碼順序來源 {self.order_source}", "experiment", "order_source")
        if self.csit_mode not in ERROR_MODES:
            raise ConfigError(f"未知的 CSIT 模式 {self.csit_mode}", "experiment", "csit_mode")
        if self.bound_convention not in BOUND_CONVENTIONS:
            raise ConfigError(f"未知的上界慣例 {self.bound_convention}", "experiment", "bound_convention")
        for b in (self.beta,) + tuple(self.beta_list):
            if not 0.0 <= b <= 1.0:
                raise ConfigError(f"beta 必須在 [0, 1]，收到 {b}", "experiment", "beta")
        if any(e not in (0, 1) for e in self.fixed_order) or len(self.fixed_order) != 2:
            raise ConfigError(f"fixed_order 必須是兩個 0/1，收到 {self.fixed_order}", "experiment", "fixed_order")
        if self.episodes is not None and self.episodes < 1:
            raise ConfigError(f"episodes 必須為正，收到 {self.episodes}", "training", "episodes")
        if self.eval_runs < 1 or self.eval_steps < 1:
            raise ConfigError("評估次數與步數必須為正", "evaluation")
        if self.n_seeds < 1:
            raise ConfigError(f"n_seeds 必須為正，收到 {self.n_seeds}", "experiment", "n_seeds")
        if self.log_every < 1 or self.region_every < 1 or self.region_delay < 0:
            raise ConfigError("log_every/region_every 必須為正，region_delay 不可為負", "training")
        if self.episodes is None:
            object.__setattr__(self, "episodes", default_episodes(self.antennas))


def default_episodes(antennas):
    """SISO 2400、MISO 4000、MIMO 12000 回合"""
    return {"siso": 2400, "miso": 4000, "mimo": 12000}[antennas.label]


def _merge_with_default_config(sections):
    """合併預設配置，確保欄位完整"""
    merged = deepcopy(DEFAULT_CONFIG)
    for section, values in sections.items():
        merged.setdefault(section, {}).update(values)
    return merged


def _key_lines(text):
    """(section, key) → 行號"""
    lines = {}
    section = None
    for number, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        header = re.match(r"^\[(.+)\]$", line)
        if header:
            section = header.group(1).strip()
            lines[(section, None)] = number
            continue
        pair = re.match(r"^([^=:#;]+?)\s*[=:]", line)
        if section and pair:
            lines[(section, pair.group(1).strip().lower())] = number
    return lines


def _floats(text):
    return tuple(float(x) for x in str(text).split(",") if x.strip())


def _ints(text):
    return tuple(int(x) for x in str(text).split(",") if x.strip())


def _names(text):
    return tuple(x.strip() for x in str(text).split(",") if x.strip())


# (section, key) → (ExperimentConfig 欄位或 hyper.<欄位>, 轉換函數)
_FIELDS = {
    ("experiment", "seed"): ("seed", int),
    ("experiment", "schemes"): ("schemes", _names),
    ("experiment", "snr_db"): ("snr_db", _floats),
    ("experiment", "beta"): ("beta", float),
    ("experiment", "beta_list"): ("beta_list", _floats),
    ("experiment", "order_source"): ("order_source", str),
    ("experiment", "fixed_order"): ("fixed_order", _ints),
    ("experiment", "csit_mode"): ("csit_mode", str),
    ("experiment", "bound_convention"): ("bound_convention", str),
    ("experiment", "powers"): ("powers", _floats),
    ("experiment", "n_seeds"): ("n_seeds", int),
    ("antennas", "m1"): ("m1", int),
    ("antennas", "m2"): ("m2", int),
    ("antennas", "n1"): ("n1", int),
    ("antennas", "n2"): ("n2", int),
    ("training", "episodes"): ("episodes", int),
    ("training", "gamma"): ("hyper.gamma", float),
    ("training", "batch_size"): ("hyper.batch_size", int),
    ("training", "buffer_capacity"): ("hyper.buffer_capacity", int),
    ("training", "hidden_size"): ("hyper.hidden_size", int),
    ("training", "n_layers"): ("hyper.n_layers", int),
    ("training", "learning_rate"): ("hyper.learning_rate", float),
    ("training", "tau"): ("hyper.tau", float),
    ("training", "noise_variance"): ("hyper.noise_variance", float),
    ("training", "episode_length"): ("hyper.episode_length", int),
    ("training", "log_every"): ("log_every", int),
    ("training", "region_delay"): ("region_delay", int),
    ("training", "region_every"): ("region_every", int),
    ("evaluation", "runs"): ("eval_runs", int),
    ("evaluation", "steps"): ("eval_steps", int),
    ("output", "directory"): ("outdir", str),
}


def config_from_sections(sections, lines=None):
    """由 {section: {key: 字串}} 建立 ExperimentConfig"""
    lines = lines or {}
    merged = _merge_with_default_config(sections)
    values = {}
    hyper = {}
    antennas = {}

    for section, entries in merged.items():
        if section not in DEFAULT_CONFIG:
            raise ConfigError("未知的區段", section, line=lines.get((section, None)))
        for key, raw in entries.items():
            line = lines.get((section, key))
            if (section, key) not in _FIELDS:
                raise ConfigError("未知的鍵", section, key, line)
            if raw is None or str(raw).strip() == "":
                continue
            name, convert = _FIELDS[(section, key)]
            try:
                value = convert(raw)
            except ValueError as e:
                raise ConfigError(f"無法解析 {raw!r}: {e}", section, key, line) from e
            if name.startswith("hyper."):
                hyper[name[len("hyper."):]] = value
            elif section == "antennas":
                antennas[name] = value
            else:
                values[name] = value

    try:
        values["antennas"] = AntennaConfig(**antennas)
        values["hyper"] = Hyperparameters(**hyper)
        return ExperimentConfig(**values)
    except ConfigError:
        raise
    except (TypeError, ValueError) as e:
        raise ConfigError(str(e)) from e


def read_sections(path):
    """讀取 INI 檔為 ({section: {key: 字串}}, 行號表)"""
    try:
        with open(path, "r", encoding="utf-8") as f:
            text = f.read()
    except OSError as e:
        raise ConfigError(f"無法讀取配置檔 {path}: {e}") from e

    parser = configparser.ConfigParser(interpolation=None)
    try:
        parser.read_string(text, source=str(path))
    except configparser.Error as e:
        raise ConfigError(f"配置檔格式錯誤: {e}", line=getattr(e, "lineno", None)) from e

    sections = {name: dict(parser[name]) for name in parser.sections()}
    return sections, _key_lines(text)


def load_config(path):
    """讀取 INI 配置檔，缺少的鍵使用預設值"""
    return config_from_sections(*read_sections(path))


def _num(value):
    """浮點數以最短可還原字串表示"""
    return repr(float(value)) if isinstance(value, float) else str(value)


def _join(values):
    return ",".join(_num(v) for v in values)


def config_sections(config):
    """ExperimentConfig → {section: {key: 字串}}（固定順序）"""
    hyper = config.hyper
    return {
        "experiment": {
            "seed": str(config.seed),
            "schemes": ",".join(config.schemes),
            "snr_db": _join(config.snr_db),
            "beta": _num(config.beta),
            "beta_list": _join(config.beta_list),
            "order_source": config.order_source,
            "fixed_order": _join(config.fixed_order),
            "csit_mode": config.csit_mode,
            "bound_convention": config.bound_convention,
            "powers": _join(config.powers),
            "n_seeds": str(config.n_seeds),
        },
        "antennas": {
            "m1": str(config.antennas.m1),
            "m2": str(config.antennas.m2),
            "n1": str(config.antennas.n1),
            "n2": str(config.antennas.n2),
        },
        "training": {
            "episodes": str(config.episodes),
            "gamma": _num(hyper.gamma),
            "batch_size": str(hyper.batch_size),
            "buffer_capacity": str(hyper.buffer_capacity),
            "hidden_size": str(hyper.hidden_size),
            "n_layers": str(hyper.n_layers),
            "learning_rate": _num(hyper.learning_rate),
            "tau": _num(hyper.tau),
            "noise_variance": _num(hyper.noise_variance),
            "episode_length": str(hyper.episode_length),
            "log_every": str(config.log_every),
            "region_delay": str(config.region_delay),
            "region_every": str(config.region_every),
        },
        "evaluation": {"runs": str(config.eval_runs), "steps": str(config.eval_steps)},
        "output": {"directory": config.outdir},
    }


def serialize_config(config):
    lines = []
    for section, entries in config_sections(config).items():
        lines.append(f"[{section}]")
        lines.extend(f"{key} = {value}" for key, value in entries.items())
        lines.append("")
    return "\n".join(lines)


def save_config(config, path):
    """寫回 INI 格式（可再次讀取）"""
    with open(path, "w", encoding="utf-8") as f:
        f.write(serialize_config(config))


def config_hash(config):
    """正規化配置的 sha256 前 12 碼（不含輸出目錄）"""
    sections = config_sections(config)
    sections.pop("output")
    canonical = "\n".join(
        f"{section}.{key}={value}"
        for section, entries in sections.items()
        for key, value in entries.items()
    )
    return hashlib.sha256(canonical.encode("utf-8")).hexdigest()[:12]


def apply_preset(config, name):
    """desk：回合 ÷ 4、評估 10 次；sweep：25×200；long：50×1000；full：不變"""
    if name == "full":
        return replace(config, preset=name)
    if name == "desk":
        return replace(config, episodes=max(1, config.episodes // 4), eval_runs=10, preset=name)
    if name == "sweep":
        return replace(config, eval_runs=25, eval_steps=200, preset=name)
    if name == "long":
        return replace(config, eval_runs=50, eval_steps=1000, preset=name)
    raise ConfigError(f"未知的預設組合 {name}（可用: {', '.join(PRESETS)}）")


def worker_count():
    """平行工作數，來自 RSMAIC_WORKERS（可寫在 .env）"""
    load_dotenv()
    raw = os.environ.get("RSMAIC_WORKERS", "1")
    try:
        return max(1, int(raw))
    except ValueError:
        raise ConfigError(f"RSMAIC_WORKERS 必須為整數，收到 {raw!r}")
