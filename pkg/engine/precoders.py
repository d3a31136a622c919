#!/usr/bin/env python3
"""Benchmark precoders (MRT, ZF, SLNR) and power normalization."""

import logging

import numpy as np
from scipy import linalg as sla

from engine.linalg import Singular, as_cmatrix, dominant_gen_eigvec, hermitian, solve
from engine.rates import PrecoderSet

logger = logging.getLogger(__name__)

BENCHMARK_SCHEMES = ("mrt", "zf", "slnr")
ZF_REGULARIZATION = 1e-12


class ZeroChannel(ValueError):
    """直接通道為零矩陣"""


class ZeroDirection(ValueError):
    """有分配功率的方向向量長度為零"""


def _check_channel(h):
    h = as_cmatrix(h)
    if np.linalg.norm(h) == 0:
        raise ZeroChannel("直接通道為零，無法計算預編碼")
    return h


def _stream_count(h):
    return min(h.shape)


def mrt(h):
    """MRT：W = H^H，保留前 Q 行"""
    h = _check_channel(h)
    return hermitian(h)[:, : _stream_count(h)]


def zf_with_status(h, g):
    """ZF：W = (G^H G)^{-1} H^H

    Gram 矩陣奇異時改用 G^H G + 1e-12·I。

    Returns:
        (W, 是否使用正則化)
    """
    h = _check_channel(h)
    g = as_cmatrix(g)
    gram_matrix = hermitian(g) @ g
    rhs = hermitian(h)
    try:
        w = solve(gram_matrix, rhs)
        regularized = False
    except Singular:
        # 以特徵分解求 (G^H G + εI)^{-1}，零空間方向與 G 保持正交
        eigvals, eigvecs = sla.eigh(0.5 * (gram_matrix + hermitian(gram_matrix)))
        eigvals = np.clip(eigvals, 0.0, None)
        w = eigvecs @ ((hermitian(eigvecs) @ rhs) / (eigvals + ZF_REGULARIZATION)[:, None])
        regularized = True
    return w[:, : _stream_count(h)], regularized


def zf(h, g):
    w, regularized = zf_with_status(h, g)
    if regularized:
        logger.debug("ZF Gram 矩陣奇異，使用正則化解")
    return w


def slnr_direction(h_row, g, noise_power, seed=0):
    """單一資料流的 SLNR 方向：(h^H h, N0·I + G^H G) 的主廣義特徵向量"""
    h_row = as_cmatrix(h_row).reshape(1, -1)
    g = as_cmatrix(g)
    size = h_row.shape[1]
    signal = hermitian(h_row) @ h_row
    leakage = noise_power * np.eye(size) + hermitian(g) @ g
    return dominant_gen_eigvec(signal, leakage, seed=seed)


def slnr_value(h_row, g, noise_power, w):
    """|h w|² / (N0 |w|² + |G w|²)"""
    w = np.asarray(w, dtype=complex).ravel()
    h_row = as_cmatrix(h_row).reshape(1, -1)
    g = as_cmatrix(g)
    signal = float(np.abs(h_row @ w)[0] ** 2)
    leak = noise_power * float(np.real(np.vdot(w, w))) + float(np.linalg.norm(g @ w) ** 2)
    return signal / leak


def slnr(h, g, noise_power):
    """SLNR：第 k 個資料流使用 H 的第 k 列（接收天線 k）"""
    h = _check_channel(h)
    g = as_cmatrix(g)
    columns = [
        slnr_direction(h[k], g, noise_power, seed=k) for k in range(_stream_count(h))
    ]
    return np.column_stack(columns)


def _column_norms(w):
    return np.linalg.norm(w, axis=0)


def normalize_no_rs(w, power):
    """每一行縮放到 |w_k|² = P/Q"""
    w = as_cmatrix(w)
    norms = _column_norms(w)
    if np.any(norms == 0):
        raise ZeroDirection("預編碼含有零向量行")
    per_stream = power / w.shape[1]
    return w * (np.sqrt(per_stream) / norms)


def normalize_user(uc, up, split, power):
    """單一發射端的 RSMA 正規化

    Args:
        uc, up: 未正規化的共同／私有方向（M×Q）
        split: 每個資料流的共同功率比例 p_kc ∈ [0, 1]
        power: 發射端總功率 P_i，逐流預算為 P_i/Q_i

    Returns:
        (W_c, W_p)
    """
    uc = as_cmatrix(uc)
    up = as_cmatrix(up)
    if uc.shape != up.shape:
        raise ValueError(f"共同與私有方向維度不符: {uc.shape} vs {up.shape}")
    streams = uc.shape[1]
    split = np.broadcast_to(np.asarray(split, dtype=float), (streams,))
    if np.any(split < 0) or np.any(split > 1) or not np.all(np.isfinite(split)):
        raise ValueError(f"功率分配比例必須在 [0, 1]，收到 {split}")
    budget = power / streams

    wc = np.zeros_like(uc)
    wp = np.zeros_like(up)
    for k in range(streams):
        for u, w, share in ((uc, wc, split[k]), (up, wp, 1.0 - split[k])):
            if share == 0:
                continue
            norm = np.linalg.norm(u[:, k])
            if norm == 0:
                raise ZeroDirection(f"資料流 {k} 有分配功率 {share:.3f} 但方向為零")
            w[:, k] = np.sqrt(budget * share) * u[:, k] / norm
    return wc, wp


def normalize_rsma(raw, powers=(1.0, 1.0)):
    """兩個發射端的 RSMA 正規化

    Args:
        raw: ((u1c, u1p, split1), (u2c, u2p, split2))
    """
    (u1c, u1p, s1), (u2c, u2p, s2) = raw
    w1c, w1p = normalize_user(u1c, u1p, s1, powers[0])
    w2c, w2p = normalize_user(u2c, u2p, s2, powers[1])
    return PrecoderSet(w1c, w1p, w2c, w2p)


def benchmark_precoders(scheme, channels, noise_power, powers=(1.0, 1.0)):
    """依估測通道計算兩個發射端正規化後的基準預編碼

    Returns:
        (W1, W2, regularized)：regularized 表示 ZF 是否使用了正則化
    """
    regularized = False
    result = []
    for i in (1, 2):
        h = channels.direct(i)
        g = channels.cross(i)
        if scheme == "mrt":
            raw = mrt(h)
        elif scheme == "zf":
            raw, used = zf_with_status(h, g)
            regularized = regularized or used
        elif scheme == "slnr":
            raw = slnr(h, g, noise_power)
        else:
            raise ValueError(f"未知的預編碼方案: {scheme}（可用: {', '.join(BENCHMARK_SCHEMES)}）")
        result.append(normalize_no_rs(raw, powers[i - 1]))
    if regularized:
        logger.debug("ZF 使用正則化解（Gram 矩陣秩不足）")
    return result[0], result[1], regularized


def leakage_ratio(g, w):
    """‖G W‖_F / ‖W‖_F"""
    w = as_cmatrix(w)
    return float(np.linalg.norm(as_cmatrix(g) @ w) / np.linalg.norm(w))
