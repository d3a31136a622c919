#!/usr/bin/env python3
"""測試基準預編碼與功率正規化"""

import numpy as np
import pytest

from engine.channel import AntennaConfig, sample_channel
from engine.harness import perfect_view
from engine.precoders import (
    ZeroChannel,
    ZeroDirection,
    benchmark_precoders,
    leakage_ratio,
    mrt,
    normalize_no_rs,
    normalize_rsma,
    normalize_user,
    slnr,
    slnr_direction,
    slnr_value,
    zf,
    zf_with_status,
)


def total_power(w):
    return float(np.linalg.norm(w) ** 2)


def test_mrt_is_conjugate_transpose():
    w = mrt(np.array([[1j, 0.0]]))
    assert np.allclose(w, [[-1j], [0.0]])


def test_mrt_keeps_q_columns(rng):
    h = rng.standard_normal((3, 2)) + 1j * rng.standard_normal((3, 2))
    assert mrt(h).shape == (2, 2)


def test_mrt_zero_channel():
    with pytest.raises(ZeroChannel):
        mrt(np.zeros((1, 2)))


def test_zf_scalar():
    """h = 2, g = 1：正規化後 w = 1"""
    w = zf(np.array([[2.0]]), np.array([[1.0]]))
    assert np.allclose(normalize_no_rs(w, 1.0), [[1.0]])


def test_zf_scaled_identity_cross():
    h = np.array([[1.0, 2.0], [3.0, 4.0]])
    w = zf(h, 2.0 * np.eye(2))
    assert np.allclose(w, h.conj().T / 4.0)


def test_zf_nulls_leakage_when_rank_deficient(rng):
    """M_i > N_j 時 ZF 走正則化路徑並消除洩漏"""
    antennas = AntennaConfig(m1=3, m2=3)
    for _ in range(1000):
        ch = sample_channel(antennas, 10.0, rng)
        w, regularized = zf_with_status(ch.h1, ch.g1)
        assert regularized
        assert leakage_ratio(ch.g1, normalize_no_rs(w, 1.0)) <= 1e-8


def test_zf_full_column_rank_is_plain_solve(rng):
    """M_i <= N_j 時 G 無零空間，ZF 即 (G^H G)^{-1} H^H 而不消除洩漏"""
    antennas = AntennaConfig(m1=3, m2=3, n1=3, n2=3)
    for _ in range(50):
        ch = sample_channel(antennas, 10.0, rng)
        w, regularized = zf_with_status(ch.h1, ch.g1)
        assert not regularized
        g = ch.g1
        expected = np.linalg.solve(g.conj().T @ g, ch.h1.conj().T)
        assert np.allclose(w, expected, rtol=1e-9, atol=1e-12)
        assert leakage_ratio(g, normalize_no_rs(w, 1.0)) > 1e-3


def test_slnr_without_leakage_is_mrt(rng):
    h = rng.standard_normal((1, 3)) + 1j * rng.standard_normal((1, 3))
    v = slnr_direction(h[0], np.zeros((1, 3)), 1.0)
    expected = mrt(h)[:, 0] / np.linalg.norm(h)
    assert abs(np.vdot(expected, v)) == pytest.approx(1.0, abs=1e-9)


def test_slnr_beats_mrt_and_zf(rng):
    antennas = AntennaConfig(m1=3, m2=3)
    for _ in range(100):
        ch = sample_channel(antennas, 10.0, rng)
        h, g, n0 = ch.h1, ch.g1, ch.noise_power
        best = slnr_value(h[0], g, n0, slnr_direction(h[0], g, n0))
        for w in (mrt(h)[:, 0], zf(h, g)[:, 0]):
            assert best >= slnr_value(h[0], g, n0, w) - 1e-9


def test_slnr_one_column_per_stream(rng):
    h = rng.standard_normal((2, 3)) + 1j * rng.standard_normal((2, 3))
    g = rng.standard_normal((2, 3)) + 1j * rng.standard_normal((2, 3))
    w = slnr(h, g, 0.1)
    assert w.shape == (3, 2)
    assert np.allclose(np.linalg.norm(w, axis=0), 1.0)


def test_normalize_no_rs_per_stream_budget(rng):
    w = normalize_no_rs(rng.standard_normal((3, 2)) + 0j, 2.0)
    assert np.allclose(np.linalg.norm(w, axis=0) ** 2, 1.0)
    assert total_power(w) == pytest.approx(2.0)


def test_normalize_no_rs_scale_invariant(rng):
    u = rng.standard_normal((2, 2)) + 1j * rng.standard_normal((2, 2))
    assert np.allclose(normalize_no_rs(u, 1.0), normalize_no_rs(7.5 * u, 1.0))


def test_normalize_no_rs_zero_column():
    with pytest.raises(ZeroDirection):
        normalize_no_rs(np.array([[1.0, 0.0], [1.0, 0.0]]), 1.0)


def test_split_zero_gives_zero_common(rng):
    u = rng.standard_normal((2, 1)) + 0j
    wc, wp = normalize_user(u, u, [0.0], 1.0)
    assert np.all(wc == 0)
    assert total_power(wp) == pytest.approx(1.0)


def test_split_half_is_equal(rng):
    uc = rng.standard_normal((2, 1)) + 0j
    up = rng.standard_normal((2, 1)) + 0j
    wc, wp = normalize_user(uc, up, [0.5], 1.0)
    assert total_power(wc) == pytest.approx(0.5)
    assert total_power(wp) == pytest.approx(0.5)


def test_split_one_ignores_zero_private():
    wc, wp = normalize_user(np.ones((1, 1)), np.zeros((1, 1)), [1.0], 1.0)
    assert total_power(wc) == pytest.approx(1.0)
    assert np.all(wp == 0)


def test_zero_direction_with_power():
    with pytest.raises(ZeroDirection):
        normalize_user(np.zeros((1, 1)), np.ones((1, 1)), [0.3], 1.0)


def test_split_out_of_range():
    with pytest.raises(ValueError):
        normalize_user(np.ones((1, 1)), np.ones((1, 1)), [1.2], 1.0)


def test_normalize_rsma_stream_power_exact(rng):
    raw = []
    for _ in range(2):
        uc = rng.standard_normal((3, 2)) + 1j * rng.standard_normal((3, 2))
        up = rng.standard_normal((3, 2)) + 1j * rng.standard_normal((3, 2))
        raw.append((uc, up, rng.uniform(0, 1, size=2)))
    pre = normalize_rsma(raw, (1.0, 2.0))
    assert np.allclose(pre.stream_powers(1), 0.5, atol=1e-12)
    assert np.allclose(pre.stream_powers(2), 1.0, atol=1e-12)


def test_normalize_rsma_idempotent(rng):
    uc = rng.standard_normal((2, 1)) + 1j * rng.standard_normal((2, 1))
    up = rng.standard_normal((2, 1)) + 1j * rng.standard_normal((2, 1))
    first = normalize_rsma(((uc, up, [0.3]), (up, uc, [0.7])))
    again = normalize_rsma(((first.w1c, first.w1p, [0.3]), (first.w2c, first.w2p, [0.7])))
    for name in ("w1c", "w1p", "w2c", "w2p"):
        assert np.allclose(getattr(first, name), getattr(again, name))


@pytest.mark.parametrize("scheme", ["mrt", "zf", "slnr"])
def test_benchmark_precoders_meet_budget(rng, scheme):
    antennas = AntennaConfig(2, 2, 2, 2)
    ch = sample_channel(antennas, 10.0, rng)
    w1, w2, _ = benchmark_precoders(scheme, perfect_view(ch), ch.noise_power, (1.0, 1.0))
    for w in (w1, w2):
        assert np.allclose(np.linalg.norm(w, axis=0) ** 2, 0.5)


def test_benchmark_unknown_scheme(rng):
    ch = sample_channel(AntennaConfig(), 10.0, rng)
    with pytest.raises(ValueError):
        benchmark_precoders("mmse", perfect_view(ch), ch.noise_power)
