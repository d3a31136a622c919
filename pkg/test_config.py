#!/usr/bin/env python3
"""測試 INI 配置讀取、預設組合與雜湊"""

from dataclasses import replace

import pytest

from engine.channel import AntennaConfig
from engine.config import (
    ConfigError,
    ExperimentConfig,
    apply_preset,
    config_from_sections,
    config_hash,
    default_episodes,
    load_config,
    save_config,
    worker_count,
)


def _write(tmp_path, text):
    path = tmp_path / "experiment.ini"
    path.write_text(text, encoding="utf-8")
    return str(path)


def test_minimal_file_uses_defaults(tmp_path):
    config = load_config(_write(tmp_path, "[experiment]\nseed = 7\n"))
    assert config.seed == 7
    assert config.snr_db == (0.0, 5.0, 10.0, 15.0, 20.0)
    assert config.beta == 0.5
    assert config.hyper.gamma == 0.99
    assert config.hyper.batch_size == 128
    assert config.hyper.buffer_capacity == 15000
    assert config.hyper.learning_rate == 5e-5
    assert config.hyper.tau == 0.01
    assert config.episodes == 2400
    assert (config.eval_runs, config.eval_steps) == (25, 200)
    assert config.bound_convention == "full_power"


def test_seed_is_required(tmp_path):
    with pytest.raises(ConfigError) as excinfo:
        load_config(_write(tmp_path, "[experiment]\nbeta = 0.3\n"))
    assert excinfo.value.key == "seed"


def test_unknown_key_reports_line(tmp_path):
    text = "[experiment]\nseed = 1\n\n[training]\ngamma = 0.9\nwarmup = 10\n"
    with pytest.raises(ConfigError) as excinfo:
        load_config(_write(tmp_path, text))
    assert excinfo.value.key == "warmup"
    assert excinfo.value.line == 6


def test_unknown_section(tmp_path):
    with pytest.raises(ConfigError):
        load_config(_write(tmp_path, "[experiment]\nseed = 1\n[plots]\ndpi = 300\n"))


def test_unparsable_value(tmp_path):
    with pytest.raises(ConfigError) as excinfo:
        load_config(_write(tmp_path, "[experiment]\nseed = 1\n[antennas]\nm1 = three\n"))
    assert excinfo.value.section == "antennas"
    assert excinfo.value.line == 4


@pytest.mark.parametrize(
    "section,key,value",
    [
        ("experiment", "beta", "1.5"),
        ("experiment", "schemes", "mrt,mmse"),
        ("experiment", "order_source", "random"),
        ("experiment", "csit_mode", "gaussian"),
        ("experiment", "fixed_order", "2,0"),
        ("training", "gamma", "1.2"),
        ("training", "episodes", "0"),
        ("evaluation", "runs", "0"),
    ],
)
def test_invalid_values(section, key, value):
    sections = {"experiment": {"seed": "1"}}
    sections.setdefault(section, {})[key] = value
    with pytest.raises(ConfigError):
        config_from_sections(sections)


def test_missing_file():
    with pytest.raises(ConfigError):
        load_config("/nonexistent/experiment.ini")


def test_round_trip(tmp_path):
    config = config_from_sections(
        {
            "experiment": {"seed": "11", "snr_db": "0,12.5", "beta": "0.1", "fixed_order": "1,0"},
            "antennas": {"m1": "3", "m2": "3"},
            "training": {"learning_rate": "0.0001", "episodes": "50"},
        }
    )
    path = str(tmp_path / "saved.ini")
    save_config(config, path)
    assert load_config(path) == config


@pytest.mark.parametrize(
    "antennas,expected",
    [(AntennaConfig(), 2400), (AntennaConfig(m1=3, m2=3), 4000), (AntennaConfig(3, 3, 3, 3), 12000)],
)
def test_default_episodes(antennas, expected):
    assert default_episodes(antennas) == expected
    assert ExperimentConfig(seed=0, antennas=antennas).episodes == expected


def test_presets():
    config = ExperimentConfig(seed=0)
    desk = apply_preset(config, "desk")
    assert desk.episodes == 600
    assert desk.eval_runs == 10
    long = apply_preset(config, "long")
    assert (long.eval_runs, long.eval_steps) == (50, 1000)
    assert apply_preset(config, "full").episodes == config.episodes
    with pytest.raises(ConfigError):
        apply_preset(config, "huge")


def test_hash_is_stable_and_ignores_outdir():
    config = ExperimentConfig(seed=1)
    digest = config_hash(config)
    assert len(digest) == 12
    assert config_hash(ExperimentConfig(seed=1)) == digest
    assert config_hash(replace(config, outdir="elsewhere")) == digest
    assert config_hash(replace(config, seed=2)) != digest
    assert config_hash(replace(config, beta=0.25)) != digest


def test_worker_count_from_environment(monkeypatch):
    monkeypatch.setenv("RSMAIC_WORKERS", "4")
    assert worker_count() == 4
    monkeypatch.setenv("RSMAIC_WORKERS", "0")
    assert worker_count() == 1
    monkeypatch.setenv("RSMAIC_WORKERS", "many")
    with pytest.raises(ConfigError):
        worker_count()
