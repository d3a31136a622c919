#!/usr/bin/env python3
"""測試通道取樣、SNR 慣例與估測誤差"""

import numpy as np
import pytest

from engine.channel import (
    AntennaConfig,
    ChannelRealization,
    apply_estimation_error,
    estimation_error_scale,
    make_streams,
    sample_channel,
    snr_key,
    snr_to_noise_power,
)


def test_antenna_streams_and_labels():
    antennas = AntennaConfig(m1=3, m2=2, n1=1, n2=2)
    assert (antennas.q1, antennas.q2) == (1, 2)
    assert AntennaConfig().label == "siso"
    assert AntennaConfig(m1=3, m2=3).label == "miso"
    assert AntennaConfig(3, 3, 3, 3).label == "mimo"


@pytest.mark.parametrize("bad", [0, -1, 1.5])
def test_antenna_rejects_non_positive(bad):
    with pytest.raises(ValueError):
        AntennaConfig(m1=bad)


def test_sample_shapes(rng):
    ch = sample_channel(AntennaConfig(m1=3, m2=2, n1=1, n2=2), 10.0, rng)
    assert ch.h1.shape == (1, 3)
    assert ch.h2.shape == (2, 2)
    assert ch.g1.shape == (2, 3)
    assert ch.g2.shape == (1, 2)
    assert ch.noise_power == pytest.approx(0.1)


def test_realization_checks_cross_shapes():
    with pytest.raises(ValueError):
        ChannelRealization(np.ones((1, 2)), np.ones((1, 1)), np.ones((1, 1)), np.ones((1, 1)), 1.0)


def test_realization_requires_positive_noise():
    with pytest.raises(ValueError):
        ChannelRealization(np.ones((1, 1)), np.ones((1, 1)), np.ones((1, 1)), np.ones((1, 1)), 0.0)


@pytest.mark.parametrize("snr_db,expected", [(0.0, 1.0), (10.0, 0.1), (20.0, 0.01)])
def test_snr_to_noise_power(snr_db, expected):
    assert snr_to_noise_power(snr_db) == pytest.approx(expected)


def test_snr_to_noise_power_rejects_infinite():
    with pytest.raises(ValueError):
        snr_to_noise_power(np.inf)


def test_error_scales():
    assert estimation_error_scale("none", 0.1) == 0.0
    assert estimation_error_scale("fixed", 0.1) == pytest.approx(10 ** -0.6 / 5)
    assert estimation_error_scale("snr_scaled", 1.0) == pytest.approx(0.2)
    assert estimation_error_scale("snr_scaled", 0.01) == pytest.approx(100 ** -0.6 / 5)
    with pytest.raises(ValueError):
        estimation_error_scale("gaussian", 1.0)


def test_perfect_csit_is_exact_copy(rng):
    ch = sample_channel(AntennaConfig(2, 2, 2, 2), 10.0, rng)
    est = apply_estimation_error(ch, "none", rng)
    for name in ("h1", "h2", "g1", "g2"):
        assert np.array_equal(getattr(est, name), getattr(ch, name))


def test_error_variance_matches_scale():
    """大矩陣上 |e|² 的平均接近 scale²"""
    big = np.zeros((200, 200), dtype=complex)
    ch = ChannelRealization(big, big, big, big, 1.0)
    est = apply_estimation_error(ch, "fixed", np.random.default_rng(7))
    scale = estimation_error_scale("fixed", 1.0)
    for name in ("h1", "h2", "g1", "g2"):
        power = np.mean(np.abs(getattr(est, name)) ** 2)
        assert power == pytest.approx(scale**2, rel=0.05)


def test_streams_are_reproducible():
    a = make_streams(42, 1, snr_key(10.0))
    b = make_streams(42, 1, snr_key(10.0))
    for name in a:
        assert a[name].standard_normal() == b[name].standard_normal()


def test_streams_are_distinct():
    streams = make_streams(42, 1)
    first = [streams[name].standard_normal() for name in streams]
    assert len(set(first)) == len(first)
    assert make_streams(42, 2)["channel"].standard_normal() != make_streams(42, 1)["channel"].standard_normal()


def test_snr_key_distinguishes_points():
    keys = {snr_key(s) for s in (-5.0, 0.0, 0.5, 10.0, 20.0)}
    assert len(keys) == 5
    assert all(k >= 0 for k in keys)
