"""共用測試夾具"""

import numpy as np
import pytest

from engine.channel import ChannelRealization
from engine.config import ExperimentConfig
from engine.maddpg import Hyperparameters


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


@pytest.fixture
def scalar_channel():
    """建立 SISO 通道：scalar_channel(h1, h2, g1, g2, noise_power)"""

    def build(h1=1.0, h2=1.0, g1=0.0, g2=0.0, noise_power=1.0):
        return ChannelRealization(
            h1=np.array([[h1]], dtype=complex),
            h2=np.array([[h2]], dtype=complex),
            g1=np.array([[g1]], dtype=complex),
            g2=np.array([[g2]], dtype=complex),
            noise_power=noise_power,
        )

    return build


@pytest.fixture
def tiny_config(tmp_path):
    """小型網路與短回合，足以走完整個訓練／評估流程"""

    def build(**overrides):
        values = {
            "seed": 3,
            "snr_db": (10.0,),
            "episodes": 2,
            "hyper": Hyperparameters(
                batch_size=8,
                buffer_capacity=64,
                hidden_size=8,
                n_layers=2,
                episode_length=10,
                learning_rate=1e-3,
            ),
            "eval_runs": 2,
            "eval_steps": 5,
            "log_every": 1,
            "outdir": str(tmp_path / "results"),
        }
        values.update(overrides)
        return ExperimentConfig(**values)

    return build
