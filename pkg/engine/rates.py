#!/usr/bin/env python3
"""RSMA rate calculus for the two-user MIMO interference channel.

Every stream rate is a difference of two log-determinants: the covariance seen
while decoding the stream minus the same covariance without it.
"""

from dataclasses import dataclass, field
from itertools import product

import numpy as np

from engine.linalg import as_cmatrix, logdet_hpd

LN2 = np.log(2.0)
POWER_TOL = 1e-9


class NotSiso(ValueError):
    """只適用於單天線設定"""


@dataclass(frozen=True)
class PrecoderSet:
    """兩個發射端的共同／私有預編碼矩陣（M_i×Q_i）"""

    w1c: np.ndarray
    w1p: np.ndarray
    w2c: np.ndarray
    w2p: np.ndarray

    def common(self, i):
        return self.w1c if i == 1 else self.w2c

    def private(self, i):
        return self.w1p if i == 1 else self.w2p

    def stream_powers(self, i):
        """每個資料流的 |w_ikc|² + |w_ikp|²"""
        wc, wp = self.common(i), self.private(i)
        return np.sum(np.abs(wc) ** 2, axis=0) + np.sum(np.abs(wp) ** 2, axis=0)

    def common_fraction(self, i):
        """共同訊息佔總功率的比例"""
        total = float(np.sum(self.stream_powers(i)))
        if total == 0:
            return 0.0
        return float(np.sum(np.abs(self.common(i)) ** 2)) / total

    def satisfies_power(self, budgets, total_powers):
        """檢查逐流與總功率限制"""
        for i in (1, 2):
            per_stream = self.stream_powers(i)
            if np.any(per_stream > np.asarray(budgets[i - 1]) + POWER_TOL):
                return False
            if np.sum(per_stream) > total_powers[i - 1] + POWER_TOL:
                return False
        return True

    @classmethod
    def private_only(cls, w1, w2):
        """無速率分割：共同預編碼為零矩陣"""
        w1 = as_cmatrix(w1)
        w2 = as_cmatrix(w2)
        return cls(np.zeros_like(w1), w1, np.zeros_like(w2), w2)


@dataclass(frozen=True, order=True)
class DecodingOrderPair:
    """η_i = 1：先解對方共同訊息 (a)；η_i = 0：先解自己的共同訊息 (b)"""

    eta1: int = 0
    eta2: int = 0

    def __post_init__(self):
        if self.eta1 not in (0, 1) or self.eta2 not in (0, 1):
            raise ValueError(f"解碼順序只能是 0 或 1，收到 ({self.eta1}, {self.eta2})")

    def eta(self, receiver):
        return self.eta1 if receiver == 1 else self.eta2

    def as_tuple(self):
        return (self.eta1, self.eta2)


ALL_ORDERS = tuple(DecodingOrderPair(e1, e2) for e1, e2 in product((0, 1), repeat=2))


@dataclass(frozen=True)
class RateReport:
    """所有資料流速率（bits/channel use）、使用者速率與加權獎勵"""

    r1c: float
    r2c: float
    r1p: float
    r2p: float
    r1: float
    r2: float
    r_beta: float
    beta: float
    order: DecodingOrderPair = None
    # ((R_1c^1, R_1c^2), (R_2c^1, R_2c^2))：取最小值前的共同速率
    per_receiver_common: tuple = field(default=((0.0, 0.0), (0.0, 0.0)))

    @property
    def sum_rate(self):
        return self.r1 + self.r2


def _check_beta(beta):
    if not 0.0 <= beta <= 1.0:
        raise ValueError(f"beta 必須在 [0, 1]，收到 {beta}")


def _covariance(noise_power, size, products):
    cov = noise_power * np.eye(size, dtype=complex)
    for prod in products:
        cov = cov + prod @ prod.conj().T
    return cov


def _stream_rate(noise_power, size, interference, signal):
    """log2 det(雜訊+干擾+訊號) − log2 det(雜訊+干擾)"""
    if size == 1:
        # 單接收天線：行列式即純量功率
        base = noise_power + sum(float(np.sum(np.abs(prod) ** 2)) for prod in interference)
        rate = np.log2((base + float(np.sum(np.abs(signal) ** 2))) / base)
        return max(float(rate), 0.0)
    base = _covariance(noise_power, size, interference)
    full = base + signal @ signal.conj().T
    rate = (logdet_hpd(full) - logdet_hpd(base)) / LN2
    return max(rate, 0.0)


def sic_rates_at_receiver(ch, precoders, receiver, eta):
    """接收端 i 依 η_i 順序進行 SIC

    Returns:
        (b_jc 速率, b_ic 速率, b_ip 速率)；b_jp 一律視為雜訊
    """
    if eta not in (0, 1):
        raise ValueError(f"解碼順序只能是 0 或 1，收到 {eta}")
    i = receiver
    j = 2 if i == 1 else 1
    h = as_cmatrix(ch.direct(i))
    g = as_cmatrix(ch.cross(j))
    size = h.shape[0]
    effective = {
        "jc": g @ as_cmatrix(precoders.common(j)),
        "ic": h @ as_cmatrix(precoders.common(i)),
        "ip": h @ as_cmatrix(precoders.private(i)),
        "jp": g @ as_cmatrix(precoders.private(j)),
    }
    sequence = ("jc", "ic", "ip") if eta == 1 else ("ic", "jc", "ip")

    rates = {}
    for position, stream in enumerate(sequence):
        remaining = [effective[s] for s in sequence[position + 1:]] + [effective["jp"]]
        rates[stream] = _stream_rate(ch.noise_power, size, remaining, effective[stream])
    return rates["jc"], rates["ic"], rates["ip"]


def _assemble_report(order, beta, at1, at2):
    r2c_at1, r1c_at1, r1p = at1
    r1c_at2, r2c_at2, r2p = at2
    r1c = min(r1c_at1, r1c_at2)
    r2c = min(r2c_at1, r2c_at2)
    r1 = r1c + r1p
    r2 = r2c + r2p
    return RateReport(
        r1c=r1c,
        r2c=r2c,
        r1p=r1p,
        r2p=r2p,
        r1=r1,
        r2=r2,
        r_beta=beta * r1 + (1.0 - beta) * r2,
        beta=beta,
        order=order,
        per_receiver_common=((r1c_at1, r1c_at2), (r2c_at1, r2c_at2)),
    )


def rate_report(ch, precoders, order, beta):
    """兩端 SIC 後的速率報告；共同速率取兩接收端最小值"""
    _check_beta(beta)
    at1 = sic_rates_at_receiver(ch, precoders, 1, order.eta1)
    at2 = sic_rates_at_receiver(ch, precoders, 2, order.eta2)
    return _assemble_report(order, beta, at1, at2)


def best_order_report(ch, precoders, beta):
    """窮舉四種解碼順序，回傳加權獎勵最大者（同分取字典序最小）"""
    _check_beta(beta)
    # 每個接收端只有兩種 SIC 結果，四種順序共用
    at = {
        (receiver, eta): sic_rates_at_receiver(ch, precoders, receiver, eta)
        for receiver in (1, 2)
        for eta in (0, 1)
    }
    best = None
    for order in ALL_ORDERS:
        report = _assemble_report(order, beta, at[(1, order.eta1)], at[(2, order.eta2)])
        if best is None or report.r_beta > best[1].r_beta:
            best = (order, report)
    return best


def no_rs_rates(ch, w1, w2, beta):
    """無速率分割：干擾視為雜訊的使用者速率"""
    _check_beta(beta)
    w = {1: as_cmatrix(w1), 2: as_cmatrix(w2)}
    rates = {}
    for i in (1, 2):
        j = 2 if i == 1 else 1
        h = as_cmatrix(ch.direct(i))
        g = as_cmatrix(ch.cross(j))
        rates[i] = _stream_rate(ch.noise_power, h.shape[0], [g @ w[j]], h @ w[i])
    return RateReport(
        r1c=0.0,
        r2c=0.0,
        r1p=rates[1],
        r2p=rates[2],
        r1=rates[1],
        r2=rates[2],
        r_beta=beta * rates[1] + (1.0 - beta) * rates[2],
        beta=beta,
    )


def classify_regime(ch, p1=1.0, p2=1.0):
    """SISO 干擾強度分類：weak / mixed / strong"""
    if not ch.antennas.is_siso:
        raise NotSiso(f"干擾分類只適用於 SISO，收到 {ch.antennas}")
    n0 = ch.noise_power
    snr1 = abs(complex(ch.h1[0, 0])) ** 2 * p1 / n0
    snr2 = abs(complex(ch.h2[0, 0])) ** 2 * p2 / n0
    inr1 = abs(complex(ch.g2[0, 0])) ** 2 * p2 / n0
    inr2 = abs(complex(ch.g1[0, 0])) ** 2 * p1 / n0
    if inr1 < snr2 and inr2 < snr1:
        return "weak"
    if inr1 > snr2 and inr2 > snr1:
        return "strong"
    return "mixed"
