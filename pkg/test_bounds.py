#!/usr/bin/env python3
"""測試外界不等式與加權線性規劃"""

import numpy as np
import pytest

from engine.bounds import (
    INEQUALITY_WEIGHTS,
    bound_gains,
    check_dominance,
    mimo_outer_bound,
    no_interference_rates,
    outer_bound_inequalities,
    polytope_vertices,
)
from engine.channel import AntennaConfig, ChannelRealization, sample_channel
from engine.harness import lp_reference, perfect_view, random_precoders
from engine.precoders import benchmark_precoders
from engine.rates import ALL_ORDERS, no_rs_rates, rate_report


def _grid_optimum(inequalities, beta, step=1e-3):
    """固定 R1 網格，R2 取可行的最大值"""
    weights = np.array(INEQUALITY_WEIGHTS, dtype=float)
    caps = np.array(inequalities)
    r1_limit = min(c / a1 for (a1, a2), c in zip(INEQUALITY_WEIGHTS, inequalities) if a2 == 0)
    best = -np.inf
    for r1 in np.arange(0.0, r1_limit + step, step):
        coupled = weights[:, 1] > 0
        r2 = np.min((caps[coupled] - weights[coupled, 0] * r1) / weights[coupled, 1])
        if r2 < 0 or r1 > r1_limit:
            continue
        best = max(best, beta * r1 + (1 - beta) * r2)
    return best


def test_siso_without_interference(scalar_channel):
    """h = 1、g = 0、P = N0 = 1：每人 1 bit"""
    report = mimo_outer_bound(scalar_channel(), 1.0, 1.0, 0.5)
    assert report.r1_max == pytest.approx(1.0)
    assert report.r2_max == pytest.approx(1.0)
    assert report.sum_max == pytest.approx(2.0)
    assert report.weighted_max == pytest.approx(1.0)


def test_zero_cross_sum_bound_is_sum_of_singles(rng):
    antennas = AntennaConfig(2, 2, 2, 2)
    ch = sample_channel(antennas, 10.0, rng).with_cross_zeroed()
    c = outer_bound_inequalities(ch)
    assert c[2] == pytest.approx(c[0] + c[1], abs=1e-10)


def test_equal_weights_halve_sum(rng):
    ch = sample_channel(AntennaConfig(2, 2, 1, 1), 10.0, rng)
    report = mimo_outer_bound(ch, beta=0.5)
    assert report.weighted_max == pytest.approx(report.sum_max / 2, abs=1e-12)


def test_extreme_beta_reaches_single_user_max(rng):
    ch = sample_channel(AntennaConfig(), 10.0, rng)
    report = mimo_outer_bound(ch, beta=1.0)
    assert report.vertex[0] == pytest.approx(report.r1_max)
    assert report.weighted_max == pytest.approx(report.r1_max)


@pytest.mark.parametrize("convention", ["full_power", "isotropic"])
def test_scale_consistency(rng, convention):
    """通道乘 c、雜訊乘 c² 時不等式不變"""
    ch = sample_channel(AntennaConfig(2, 3, 2, 1), 10.0, rng)
    c = 3.7
    scaled = ChannelRealization(c * ch.h1, c * ch.h2, c * ch.g1, c * ch.g2, c * c * ch.noise_power)
    assert outer_bound_inequalities(scaled, convention=convention) == pytest.approx(
        outer_bound_inequalities(ch, convention=convention), abs=1e-9
    )


def test_conventions_agree_for_siso(rng):
    ch = sample_channel(AntennaConfig(), 5.0, rng)
    assert outer_bound_inequalities(ch, convention="isotropic") == pytest.approx(
        outer_bound_inequalities(ch, convention="full_power")
    )


def test_isotropic_gain_divides_by_antennas(rng):
    ch = sample_channel(AntennaConfig(m1=4, m2=2), 10.0, rng)
    s1, s2 = bound_gains(ch, convention="isotropic")
    assert s1 == pytest.approx(10.0 / 4)
    assert s2 == pytest.approx(10.0 / 2)


def test_unknown_convention(scalar_channel):
    with pytest.raises(ValueError):
        bound_gains(scalar_channel(), convention="waterfilling")


def test_more_noise_lowers_bound(rng):
    ch = sample_channel(AntennaConfig(2, 2, 2, 2), 10.0, rng)
    noisier = ChannelRealization(ch.h1, ch.h2, ch.g1, ch.g2, 2 * ch.noise_power)
    assert mimo_outer_bound(noisier).weighted_max < mimo_outer_bound(ch).weighted_max


def test_vertices_match_grid_search(scalar_channel):
    ch = scalar_channel(h1=1.0, h2=0.8, g1=0.6, g2=1.3, noise_power=0.1)
    c = outer_bound_inequalities(ch)
    for beta in (0.2, 0.5, 0.9):
        report = mimo_outer_bound(ch, beta=beta)
        assert report.weighted_max == pytest.approx(_grid_optimum(c, beta), abs=2e-3)


def test_vertices_match_linprog(rng):
    for antennas in (AntennaConfig(), AntennaConfig(m1=3, m2=3), AntennaConfig(3, 3, 3, 3)):
        for _ in range(10):
            ch = sample_channel(antennas, rng.uniform(0, 20), rng)
            beta = float(rng.uniform(0, 1))
            report = mimo_outer_bound(ch, beta=beta)
            assert report.weighted_max == pytest.approx(lp_reference(report.inequalities, beta), abs=1e-6)


def test_vertices_are_feasible(rng):
    ch = sample_channel(AntennaConfig(2, 2, 2, 2), 15.0, rng)
    c = outer_bound_inequalities(ch)
    for r1, r2 in polytope_vertices(c):
        assert r1 >= 0 and r2 >= 0
        for (a1, a2), cap in zip(INEQUALITY_WEIGHTS, c):
            assert a1 * r1 + a2 * r2 <= cap + 1e-9


@pytest.mark.parametrize("snr_db", [0.0, 10.0, 20.0])
@pytest.mark.parametrize(
    "antennas", [AntennaConfig(), AntennaConfig(m1=3, m2=3), AntennaConfig(3, 3, 3, 3)]
)
def test_bound_dominates_achievable_rates(rng, snr_db, antennas):
    for _ in range(20):
        ch = sample_channel(antennas, snr_db, rng)
        beta = float(rng.uniform(0, 1))
        report = mimo_outer_bound(ch, beta=beta)
        pre = random_precoders(antennas, rng)
        for order in ALL_ORDERS:
            assert check_dominance(rate_report(ch, pre, order, beta).r_beta, report)
        for scheme in ("mrt", "zf", "slnr"):
            w1, w2, _ = benchmark_precoders(scheme, perfect_view(ch), ch.noise_power)
            assert check_dominance(no_rs_rates(ch, w1, w2, beta).r_beta, report)


def test_no_interference_siso(scalar_channel):
    r1, r2 = no_interference_rates(scalar_channel(), np.array([[1.0]]), np.array([[1.0]]))
    assert r1 == pytest.approx(1.0)
    assert r2 == pytest.approx(1.0)


def test_no_interference_matches_zeroed_cross(rng):
    antennas = AntennaConfig(2, 2, 2, 2)
    ch = sample_channel(antennas, 10.0, rng)
    w1 = (rng.standard_normal((2, 2)) + 1j * rng.standard_normal((2, 2))) / 2
    w2 = (rng.standard_normal((2, 2)) + 1j * rng.standard_normal((2, 2))) / 2
    r1, r2 = no_interference_rates(ch, w1, w2)
    report = no_rs_rates(ch.with_cross_zeroed(), w1, w2, 0.5)
    assert r1 == pytest.approx(report.r1, abs=1e-10)
    assert r2 == pytest.approx(report.r2, abs=1e-10)


def test_check_dominance_flags_excess(scalar_channel):
    report = mimo_outer_bound(scalar_channel(), beta=0.5)
    assert check_dominance(report.weighted_max, report)
    assert not check_dominance(report.weighted_max + 1e-3, report)
