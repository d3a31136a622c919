#!/usr/bin/env python3
"""Channel sampling, SNR convention and imperfect-CSIT error models."""

from dataclasses import dataclass

import numpy as np

ERROR_MODES = ("none", "fixed", "snr_scaled")
STREAM_NAMES = ("channel", "estimation", "exploration", "replay", "init")


@dataclass(frozen=True)
class AntennaConfig:
    """兩對收發機的天線數；Q_i = min(M_i, N_i)"""

    m1: int = 1
    m2: int = 1
    n1: int = 1
    n2: int = 1

    def __post_init__(self):
        for name in ("m1", "m2", "n1", "n2"):
            value = getattr(self, name)
            if int(value) != value or value < 1:
                raise ValueError(f"{name} 必須為正整數，收到 {value}")

    @property
    def q1(self):
        return min(self.m1, self.n1)

    @property
    def q2(self):
        return min(self.m2, self.n2)

    def tx(self, i):
        return self.m1 if i == 1 else self.m2

    def rx(self, i):
        return self.n1 if i == 1 else self.n2

    def streams(self, i):
        return self.q1 if i == 1 else self.q2

    @property
    def is_siso(self):
        return self.m1 == self.m2 == self.n1 == self.n2 == 1

    @property
    def label(self):
        if self.is_siso:
            return "siso"
        if self.n1 == self.n2 == 1:
            return "miso"
        return "mimo"


@dataclass(frozen=True)
class ChannelRealization:
    """一次衰落的四個通道矩陣

    h1: BS1→UE1 (N1×M1), h2: BS2→UE2 (N2×M2),
    g1: BS1→UE2 (N2×M1), g2: BS2→UE1 (N1×M2)
    """

    h1: np.ndarray
    h2: np.ndarray
    g1: np.ndarray
    g2: np.ndarray
    noise_power: float

    def __post_init__(self):
        if not self.noise_power > 0:
            raise ValueError(f"雜訊功率必須為正，收到 {self.noise_power}")
        n1, m1 = np.shape(self.h1)
        n2, m2 = np.shape(self.h2)
        if np.shape(self.g1) != (n2, m1) or np.shape(self.g2) != (n1, m2):
            raise ValueError(
                f"交叉通道維度不符: g1 {np.shape(self.g1)}, g2 {np.shape(self.g2)}"
            )

    @property
    def antennas(self):
        n1, m1 = np.shape(self.h1)
        n2, m2 = np.shape(self.h2)
        return AntennaConfig(m1=m1, m2=m2, n1=n1, n2=n2)

    def direct(self, i):
        return self.h1 if i == 1 else self.h2

    def cross(self, i):
        """發射端 i 到另一個接收端的干擾通道"""
        return self.g1 if i == 1 else self.g2

    def with_cross_zeroed(self):
        return ChannelRealization(
            h1=self.h1,
            h2=self.h2,
            g1=np.zeros_like(self.g1),
            g2=np.zeros_like(self.g2),
            noise_power=self.noise_power,
        )


@dataclass(frozen=True)
class EstimatedChannels:
    """發射端看到的估測通道，形狀與真實通道一致"""

    h1: np.ndarray
    h2: np.ndarray
    g1: np.ndarray
    g2: np.ndarray

    def direct(self, i):
        return self.h1 if i == 1 else self.h2

    def cross(self, i):
        return self.g1 if i == 1 else self.g2

    def as_realization(self, noise_power):
        return ChannelRealization(self.h1, self.h2, self.g1, self.g2, noise_power)


def make_streams(seed, *salt):
    """依實驗種子建立具名、互相獨立的亂數子串流

    salt 為非負整數，用來區分訓練／評估與不同 SNR 點。
    """
    root = np.random.SeedSequence([int(seed), *(int(s) for s in salt)])
    children = root.spawn(len(STREAM_NAMES))
    return {name: np.random.default_rng(child) for name, child in zip(STREAM_NAMES, children)}


def snr_key(snr_db):
    """SNR 轉成非負整數鍵（0.01 dB 解析度）"""
    return int(round(float(snr_db) * 100)) + 100_000


def snr_to_noise_power(snr_db):
    """P_i = 1 時 SNR = 1/N0"""
    if not np.isfinite(snr_db):
        raise ValueError(f"SNR 必須為有限值，收到 {snr_db}")
    return float(10.0 ** (-snr_db / 10.0))


def complex_normal(rng, shape):
    """CN(0, 1) 取樣"""
    return (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) / np.sqrt(2.0)


def sample_channel(config, snr_db, rng):
    """取樣一次 i.i.d. 瑞利衰落通道"""
    noise_power = snr_to_noise_power(snr_db)
    return ChannelRealization(
        h1=complex_normal(rng, (config.n1, config.m1)),
        h2=complex_normal(rng, (config.n2, config.m2)),
        g1=complex_normal(rng, (config.n2, config.m1)),
        g2=complex_normal(rng, (config.n1, config.m2)),
        noise_power=noise_power,
    )


def estimation_error_scale(mode, noise_power):
    """誤差倍率：fixed 為 10^-0.6/5，snr_scaled 為 SNR^-0.6/5"""
    if mode == "none":
        return 0.0
    if mode == "fixed":
        return 10.0 ** (-0.6) / 5.0
    if mode == "snr_scaled":
        snr = 1.0 / noise_power
        return snr ** (-0.6) / 5.0
    raise ValueError(f"未知的估測誤差模式: {mode}（可用: {', '.join(ERROR_MODES)}）")


def apply_estimation_error(ch, mode, rng):
    """在真實通道上加入估測誤差，回傳發射端可見的通道"""
    scale = estimation_error_scale(mode, ch.noise_power)
    if mode == "none":
        return EstimatedChannels(ch.h1.copy(), ch.h2.copy(), ch.g1.copy(), ch.g2.copy())
    return EstimatedChannels(
        h1=ch.h1 + scale * complex_normal(rng, ch.h1.shape),
        h2=ch.h2 + scale * complex_normal(rng, ch.h2.shape),
        g1=ch.g1 + scale * complex_normal(rng, ch.g1.shape),
        g2=ch.g2 + scale * complex_normal(rng, ch.g2.shape),
    )
