#!/usr/bin/env python3
"""Complex dense matrix helpers shared by the rate calculus, precoders and bounds."""

import numpy as np
from scipy import linalg as sla

HERMITIAN_TOL = 1e-10
CONDITION_LIMIT = 1e12
EIG_TOL = 1e-10
EIG_ACCEPT_TOL = 1e-6
EIG_MAX_ITER = 10_000


class LinalgError(ArithmeticError):
    """矩陣運算錯誤的共同基底"""


class NotHPD(LinalgError):
    """矩陣不是 Hermitian 正定"""


class Singular(LinalgError):
    """矩陣奇異或條件數過大"""


class NoConvergence(LinalgError):
    """冪迭代未收斂"""


def as_cmatrix(a):
    """轉成二維複數矩陣並檢查數值有限"""
    m = np.asarray(a, dtype=complex)
    if m.ndim == 1:
        m = m.reshape(-1, 1)
    if m.ndim != 2:
        raise ValueError(f"需要二維矩陣，收到 {m.ndim} 維")
    if not np.all(np.isfinite(m)):
        raise ValueError("矩陣含有 NaN 或 Inf")
    return m


def hermitian(a):
    """共軛轉置"""
    return as_cmatrix(a).conj().T


def logdet_hpd(a):
    """Hermitian 正定矩陣的自然對數行列式（Cholesky 分解）"""
    m = as_cmatrix(a)
    if m.shape[0] != m.shape[1]:
        raise NotHPD(f"需要方陣，收到 {m.shape}")
    scale = max(np.linalg.norm(m), np.finfo(float).tiny)
    if np.linalg.norm(m - m.conj().T) > HERMITIAN_TOL * scale:
        raise NotHPD("矩陣不是 Hermitian")
    sym = 0.5 * (m + m.conj().T)
    try:
        factor = sla.cholesky(sym, lower=True, check_finite=False)
    except sla.LinAlgError as e:
        raise NotHPD(f"Cholesky 分解失敗: {e}") from e
    pivots = np.real(np.diag(factor))
    if np.any(pivots <= 0):
        raise NotHPD("Cholesky 主元不為正")
    return float(2.0 * np.sum(np.log(pivots)))


def solve(a, b):
    """解 A·X = B，條件數超過 1e12 視為奇異"""
    m = as_cmatrix(a)
    if m.shape[0] != m.shape[1]:
        raise Singular(f"需要方陣，收到 {m.shape}")
    rhs = np.asarray(b, dtype=complex)
    vector_rhs = rhs.ndim == 1
    rhs = as_cmatrix(rhs)
    if rhs.shape[0] != m.shape[0]:
        raise ValueError(f"右側維度 {rhs.shape} 與 {m.shape} 不符")
    cond = np.linalg.cond(m)
    if not np.isfinite(cond) or cond > CONDITION_LIMIT:
        raise Singular(f"條件數 {cond:.3e} 超過 {CONDITION_LIMIT:.0e}")
    x = sla.solve(m, rhs, check_finite=False)
    return x.ravel() if vector_rhs else x


def normalize_phase(v):
    """旋轉相位，使絕對值最大的分量為正實數"""
    v = np.asarray(v, dtype=complex)
    k = int(np.argmax(np.abs(v)))
    if np.abs(v[k]) == 0:
        return v
    return v * (np.abs(v[k]) / v[k])


def rayleigh_quotient(a, bmat, v):
    """(v^H A v) / (v^H B v)"""
    v = np.asarray(v, dtype=complex).ravel()
    num = np.real(np.vdot(v, as_cmatrix(a) @ v))
    den = np.real(np.vdot(v, as_cmatrix(bmat) @ v))
    return float(num / den)


def dominant_gen_eigvec(a, bmat, max_iter=EIG_MAX_ITER, tol=EIG_TOL, seed=0):
    """廣義特徵值問題 A v = λ B v 的主特徵向量（冪迭代於 B^{-1} A）

    Args:
        a: Hermitian 半正定矩陣
        bmat: Hermitian 正定矩陣
        seed: 起始向量的亂數種子

    Returns:
        單位長度、相位已正規化的複數向量
    """
    a = as_cmatrix(a)
    bmat = as_cmatrix(bmat)
    n = a.shape[0]
    if a.shape != (n, n) or bmat.shape != (n, n):
        raise ValueError(f"維度不符: A {a.shape}, B {bmat.shape}")

    rng = np.random.default_rng(seed)
    v = rng.standard_normal(n) + 1j * rng.standard_normal(n)
    v /= np.linalg.norm(v)
    lam = rayleigh_quotient(a, bmat, v)
    change = np.inf

    for _ in range(max_iter):
        y = solve(bmat, a @ v)
        y_norm = np.linalg.norm(y)
        if y_norm == 0:
            # A 為零矩陣，任何方向的商都相同
            return normalize_phase(v)
        v = y / y_norm
        lam_new = rayleigh_quotient(a, bmat, v)
        change = abs(lam_new - lam) / max(abs(lam_new), np.finfo(float).tiny)
        lam = lam_new
        if change < tol:
            return normalize_phase(v)

    if change > EIG_ACCEPT_TOL:
        raise NoConvergence(f"{max_iter} 次迭代後相對變化仍為 {change:.3e}")
    return normalize_phase(v)
