#!/usr/bin/env python3
"""Capacity outer bound and the interference-free reference rates.

The seven inequalities bound R1, R2, R1+R2, 2R1+R2 and R1+2R2. The weighted
optimum over the polytope they define is found by enumerating its vertices.
"""

import logging
from dataclasses import dataclass
from itertools import combinations

import numpy as np

from engine.linalg import as_cmatrix, hermitian, logdet_hpd, solve

logger = logging.getLogger(__name__)

LN2 = np.log(2.0)
BOUND_CONVENTIONS = ("full_power", "isotropic")
DOMINANCE_TOL = 1e-6
VERTEX_TOL = 1e-12

# 係數 (a1, a2)：a1·R1 + a2·R2 ≤ C_k
INEQUALITY_WEIGHTS = ((1, 0), (0, 1), (1, 1), (1, 1), (1, 1), (2, 1), (1, 2))


@dataclass(frozen=True)
class BoundReport:
    r1_max: float
    r2_max: float
    sum_max: float
    weighted_max: float
    beta: float
    vertex: tuple
    inequalities: tuple
    convention: str = "full_power"


def bound_gains(ch, p1=1.0, p2=1.0, convention="full_power"):
    """發射端 i 的等效增益 s_i，使 ρ·X·X^H = s_i·X·X^H

    full_power：Q_i 放寬為 P_i·I，s_i = P_i/N0
    isotropic：Q_i = (P_i/M_i)·I，s_i = P_i/(M_i·N0)
    """
    n0 = ch.noise_power
    if convention == "full_power":
        return p1 / n0, p2 / n0
    if convention == "isotropic":
        antennas = ch.antennas
        return p1 / (antennas.m1 * n0), p2 / (antennas.m2 * n0)
    raise ValueError(f"未知的上界慣例: {convention}（可用: {', '.join(BOUND_CONVENTIONS)}）")


def _logdet_bits(a):
    return logdet_hpd(a) / LN2


def _plus_identity(*terms):
    size = terms[0].shape[0]
    total = np.eye(size, dtype=complex)
    for term in terms:
        total = total + term
    return total


def _weighted_gram(scale, x, middle=None):
    x = as_cmatrix(x)
    if middle is None:
        return scale * (x @ hermitian(x))
    return scale * (x @ middle @ hermitian(x))


def _residual_gram_inverse(s, g):
    """K_i = (I + s_i·G_i^H G_i)^{-1}"""
    g = as_cmatrix(g)
    size = g.shape[1]
    return solve(np.eye(size) + s * (hermitian(g) @ g), np.eye(size, dtype=complex))


def outer_bound_inequalities(ch, p1=1.0, p2=1.0, convention="full_power"):
    """七個不等式右側（bits），順序對應 INEQUALITY_WEIGHTS"""
    s1, s2 = bound_gains(ch, p1, p2, convention)
    h1, h2, g1, g2 = (as_cmatrix(m) for m in (ch.h1, ch.h2, ch.g1, ch.g2))
    k1 = _residual_gram_inverse(s1, g1)
    k2 = _residual_gram_inverse(s2, g2)

    own1 = _weighted_gram(s1, h1)
    own2 = _weighted_gram(s2, h2)
    leak1 = _weighted_gram(s1, g1)  # 在 UE2
    leak2 = _weighted_gram(s2, g2)  # 在 UE1
    residual1 = _weighted_gram(s1, h1, k1)
    residual2 = _weighted_gram(s2, h2, k2)

    at_ue1_full = _logdet_bits(_plus_identity(leak2, own1))
    at_ue2_full = _logdet_bits(_plus_identity(leak1, own2))
    at_ue1_residual = _logdet_bits(_plus_identity(leak2, residual1))
    at_ue2_residual = _logdet_bits(_plus_identity(leak1, residual2))
    only_residual1 = _logdet_bits(_plus_identity(residual1))
    only_residual2 = _logdet_bits(_plus_identity(residual2))

    return (
        _logdet_bits(_plus_identity(own1)),
        _logdet_bits(_plus_identity(own2)),
        at_ue2_full + only_residual1,
        at_ue1_full + only_residual2,
        at_ue1_residual + at_ue2_residual,
        at_ue1_full + only_residual1 + at_ue2_residual,
        at_ue2_full + only_residual2 + at_ue1_residual,
    )


def polytope_vertices(inequalities):
    """列舉 {R ≥ 0, a_k·R ≤ C_k} 的所有頂點"""
    lines = [(np.array(w, dtype=float), float(c)) for w, c in zip(INEQUALITY_WEIGHTS, inequalities)]
    lines.append((np.array([-1.0, 0.0]), 0.0))
    lines.append((np.array([0.0, -1.0]), 0.0))

    vertices = []
    for (a, b), (c, d) in combinations(lines, 2):
        matrix = np.vstack([a, c])
        if abs(np.linalg.det(matrix)) < VERTEX_TOL:
            continue
        point = np.linalg.solve(matrix, np.array([b, d]))
        feasible = all(
            float(normal @ point) <= rhs + 1e-9 * max(1.0, abs(rhs)) for normal, rhs in lines
        )
        if feasible:
            vertices.append((max(float(point[0]), 0.0), max(float(point[1]), 0.0)))
    return sorted(set(vertices))


def maximize_weighted(vertices, beta):
    """頂點上的 β·R1 + (1−β)·R2 最大值與對應頂點"""
    best_value = -np.inf
    best_vertex = (0.0, 0.0)
    for r1, r2 in vertices:
        value = beta * r1 + (1.0 - beta) * r2
        if value > best_value:
            best_value = value
            best_vertex = (r1, r2)
    return best_value, best_vertex


def mimo_outer_bound(ch, p1=1.0, p2=1.0, beta=0.5, convention="full_power"):
    """計算外界不等式並以頂點列舉求解加權線性規劃"""
    if not 0.0 <= beta <= 1.0:
        raise ValueError(f"beta 必須在 [0, 1]，收到 {beta}")
    inequalities = outer_bound_inequalities(ch, p1, p2, convention)
    vertices = polytope_vertices(inequalities)
    r1_max = max(v[0] for v in vertices)
    r2_max = max(v[1] for v in vertices)
    sum_max = max(v[0] + v[1] for v in vertices)
    weighted_max, vertex = maximize_weighted(vertices, beta)
    return BoundReport(
        r1_max=r1_max,
        r2_max=r2_max,
        sum_max=sum_max,
        weighted_max=weighted_max,
        beta=beta,
        vertex=vertex,
        inequalities=tuple(inequalities),
        convention=convention,
    )


def no_interference_rates(ch, w1, w2):
    """干擾項設為零時的使用者速率（bits）"""
    rates = []
    for i, w in ((1, w1), (2, w2)):
        h = as_cmatrix(ch.direct(i))
        effective = h @ as_cmatrix(w)
        rates.append(_logdet_bits(_plus_identity(effective @ hermitian(effective) / ch.noise_power)))
    return rates[0], rates[1]


def check_dominance(value, report, tol=DOMINANCE_TOL):
    """達成的加權速率是否不超過外界"""
    ok = value <= report.weighted_max + tol
    if not ok:
        logger.warning(
            f"外界被超越: 加權速率 {value:.6f} > 上界 {report.weighted_max:.6f} (β={report.beta})"
        )
    return ok
