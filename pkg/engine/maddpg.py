#!/usr/bin/env python3
"""Multi-agent DDPG for weighted sum-rate maximization with rate splitting.

Each transmitter is an agent with a precoder head and a power-split head. The
critics are centralized: they see the full state and both actions. An optional
order head, trained through agent 1, picks the SIC decoding order.
"""

import logging
import os
from dataclasses import dataclass, field

import numpy as np

from engine import mlp
from engine.channel import apply_estimation_error, make_streams, sample_channel, snr_key
from engine.precoders import normalize_no_rs, normalize_rsma
from engine.rates import DecodingOrderPair, PrecoderSet, best_order_report, no_rs_rates, rate_report

logger = logging.getLogger(__name__)

ORDER_SOURCES = ("exhaustive", "learned", "fixed")
TRAIN_SALT = 1
EVAL_SALT = 2
ORDER_THRESHOLD = 0.5
FINAL_WINDOW = 200


class BufferTooSmall(RuntimeError):
    """回放緩衝區樣本數少於批次大小"""


@dataclass(frozen=True)
class Hyperparameters:
    gamma: float = 0.99
    batch_size: int = 128
    buffer_capacity: int = 15000
    hidden_size: int = 64
    n_layers: int = 5
    learning_rate: float = 5e-5
    tau: float = 0.01
    noise_variance: float = 0.1
    episode_length: int = 200

    def __post_init__(self):
        if not 0.0 <= self.gamma <= 1.0:
            raise ValueError(f"gamma 必須在 [0, 1]，收到 {self.gamma}")
        if not 0.0 <= self.tau <= 1.0:
            raise ValueError(f"tau 必須在 [0, 1]，收到 {self.tau}")
        if self.noise_variance < 0:
            raise ValueError(f"探索雜訊變異數不可為負，收到 {self.noise_variance}")
        if self.learning_rate <= 0:
            raise ValueError(f"學習率必須為正，收到 {self.learning_rate}")
        for name in ("batch_size", "buffer_capacity", "hidden_size", "n_layers", "episode_length"):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} 必須為正整數，收到 {getattr(self, name)}")
        if self.buffer_capacity < self.batch_size:
            raise ValueError(
                f"緩衝區容量 {self.buffer_capacity} 小於批次大小 {self.batch_size}"
            )


# ---------------------------------------------------------------------------
# 觀測與動作
# ---------------------------------------------------------------------------


def observation(channels, i):
    """O_i = [Re H_i, Im H_i, Re G_i, Im G_i]"""
    h = np.asarray(channels.direct(i))
    g = np.asarray(channels.cross(i))
    return np.concatenate([h.real.ravel(), h.imag.ravel(), g.real.ravel(), g.imag.ravel()])


def full_state(channels):
    return np.concatenate([observation(channels, 1), observation(channels, 2)])


def observation_size(antennas, i):
    j = 2 if i == 1 else 1
    return 2 * antennas.rx(i) * antennas.tx(i) + 2 * antennas.rx(j) * antennas.tx(i)


@dataclass(frozen=True)
class ActionLayout:
    """a_i = [共同功率比例 (Q)，方向座標，解碼順序鬆弛值 (2)]"""

    tx: int
    streams: int
    rate_splitting: bool = True
    with_order: bool = False

    @property
    def split_size(self):
        return self.streams if self.rate_splitting else 0

    @property
    def direction_size(self):
        return (4 if self.rate_splitting else 2) * self.tx * self.streams

    @property
    def order_size(self):
        return 2 if self.with_order else 0

    @property
    def size(self):
        return self.split_size + self.direction_size + self.order_size

    def parts(self, action):
        """切出 (split, directions, order)；支援單筆或批次"""
        a = np.asarray(action, dtype=float)
        s = self.split_size
        d = s + self.direction_size
        return a[..., :s], a[..., s:d], a[..., d:d + self.order_size]

    def _complex(self, coords, block):
        size = self.tx * self.streams
        re = coords[2 * block * size:(2 * block + 1) * size]
        im = coords[(2 * block + 1) * size:(2 * block + 2) * size]
        return (re + 1j * im).reshape(self.tx, self.streams)

    def raw_directions(self, action):
        """RS：((u_c, u_p, split)；無 RS：W 原始方向"""
        split, coords, _ = self.parts(action)
        if self.rate_splitting:
            return self._complex(coords, 0), self._complex(coords, 1), split
        return self._complex(coords, 0)


def layouts_for(antennas, rate_splitting=True, learned_order=False):
    return (
        ActionLayout(antennas.m1, antennas.q1, rate_splitting, learned_order and rate_splitting),
        ActionLayout(antennas.m2, antennas.q2, rate_splitting, False),
    )


def decode_precoders(a1, a2, layouts, powers=(1.0, 1.0)):
    """動作向量轉為滿足功率限制的預編碼"""
    if layouts[0].rate_splitting:
        raw = (layouts[0].raw_directions(a1), layouts[1].raw_directions(a2))
        return normalize_rsma(raw, powers)
    w1 = normalize_no_rs(layouts[0].raw_directions(a1), powers[0])
    w2 = normalize_no_rs(layouts[1].raw_directions(a2), powers[1])
    return PrecoderSet.private_only(w1, w2)


def order_from_values(values):
    """鬆弛值以 0.5 為門檻（等於 0.5 取 1）"""
    v = np.asarray(values, dtype=float).ravel()
    return DecodingOrderPair(int(v[0] >= ORDER_THRESHOLD), int(v[1] >= ORDER_THRESHOLD))


def env_step(ch_true, a1, a2, layouts, beta, order_source="exhaustive", order=None, powers=(1.0, 1.0)):
    """以真實通道計算動作的獎勵

    動作已由估測通道產生；order 為 learned/fixed 時使用的 η 組合。

    Returns:
        (r_beta, RateReport)
    """
    precoders = decode_precoders(a1, a2, layouts, powers)
    if not layouts[0].rate_splitting:
        report = no_rs_rates(ch_true, precoders.w1p, precoders.w2p, beta)
        return report.r_beta, report
    if order_source == "exhaustive":
        _, report = best_order_report(ch_true, precoders, beta)
    elif order_source in ("learned", "fixed"):
        if order is None:
            raise ValueError(f"order_source={order_source} 需要指定解碼順序")
        report = rate_report(ch_true, precoders, order, beta)
    else:
        raise ValueError(f"未知的解碼順序來源: {order_source}（可用: {', '.join(ORDER_SOURCES)}）")
    return report.r_beta, report


# ---------------------------------------------------------------------------
# 網路與代理人
# ---------------------------------------------------------------------------


@dataclass
class TrainableNet:
    """線上網路、目標網路與 Adam 狀態"""

    online: mlp.MlpParameters
    target: mlp.MlpParameters
    opt: mlp.AdamState

    @classmethod
    def create(cls, dims, rng, output_activation, learning_rate):
        params = mlp.init_mlp(dims, rng, output_activation=output_activation)
        return cls.from_params(params, learning_rate)

    @classmethod
    def from_params(cls, params, learning_rate):
        return cls(params, params.copy(), mlp.adam_init(params, learning_rate=learning_rate))

    def apply(self, grads):
        self.online, self.opt = mlp.adam_step(self.online, grads, self.opt)

    def blend(self, tau):
        self.target = mlp.soft_update(self.target, self.online, tau)


@dataclass
class AgentBundle:
    """代理人 i 的演員頭、評論家與（代理人 1 的）解碼順序頭"""

    index: int
    layout: ActionLayout
    precoder: TrainableNet
    critic: TrainableNet
    power: TrainableNet = None
    order: TrainableNet = None

    def heads(self):
        return {
            name: net
            for name, net in (
                ("precoder", self.precoder),
                ("power", self.power),
                ("critic", self.critic),
                ("order", self.order),
            )
            if net is not None
        }


def build_agents(antennas, hyper, rng, rate_splitting=True, learned_order=False):
    """依天線設定建立兩個代理人（權重由 init 串流初始化）"""
    layouts = layouts_for(antennas, rate_splitting, learned_order)
    state_size = observation_size(antennas, 1) + observation_size(antennas, 2)
    critic_in = state_size + layouts[0].size + layouts[1].size
    lr = hyper.learning_rate

    def dims(n_in, n_out):
        return mlp.network_dims(n_in, n_out, hyper.hidden_size, hyper.n_layers)

    agents = []
    for i, layout in zip((1, 2), layouts):
        obs_size = observation_size(antennas, i)
        agent = AgentBundle(
            index=i,
            layout=layout,
            precoder=TrainableNet.create(dims(obs_size, layout.direction_size), rng, "tanh", lr),
            critic=TrainableNet.create(dims(critic_in, 1), rng, "linear", lr),
        )
        if rate_splitting:
            agent.power = TrainableNet.create(dims(obs_size, layout.split_size), rng, "sigmoid", lr)
        if layout.with_order:
            agent.order = TrainableNet.create(dims(state_size, 2), rng, "sigmoid", lr)
        agents.append(agent)
    return agents


def _head_output(params, x, explore, rng, noise_variance):
    """演員輸出；探索雜訊加在壓縮函數之前"""
    y, cache = mlp.forward(params, x)
    if not explore:
        return y
    z = cache.pre_activations[-1]
    z = z.reshape(y.shape) + rng.normal(0.0, np.sqrt(noise_variance), size=y.shape)
    return mlp.activate(params.output_activation, z)


def decode_order_action(order_params, state, explore=False, rng=None, noise_variance=0.1):
    """解碼順序頭：回傳 (DecodingOrderPair, 兩個 sigmoid 鬆弛值)"""
    values = _head_output(order_params, state, explore, rng, noise_variance)
    return order_from_values(values), values


def select_action(agent, obs, state=None, explore=False, rng=None, noise_variance=0.1):
    """a_i = μ_φ(O_i)，探索時加入 N(0, σ²) 雜訊"""
    parts = []
    if agent.power is not None:
        parts.append(_head_output(agent.power.online, obs, explore, rng, noise_variance))
    parts.append(_head_output(agent.precoder.online, obs, explore, rng, noise_variance))
    if agent.order is not None:
        if state is None:
            raise ValueError("解碼順序頭需要完整狀態")
        _, values = decode_order_action(agent.order.online, state, explore, rng, noise_variance)
        parts.append(values)
    return np.concatenate(parts, axis=-1)


def target_action(agent, obs_batch, state_batch):
    """目標演員在批次觀測上的動作"""
    parts = []
    if agent.power is not None:
        parts.append(mlp.forward(agent.power.target, obs_batch)[0])
    parts.append(mlp.forward(agent.precoder.target, obs_batch)[0])
    if agent.order is not None:
        parts.append(mlp.forward(agent.order.target, state_batch)[0])
    return np.concatenate(parts, axis=-1)


# ---------------------------------------------------------------------------
# 回放緩衝區
# ---------------------------------------------------------------------------


@dataclass
class Transition:
    state: np.ndarray
    a1: np.ndarray
    a2: np.ndarray
    reward: float
    next_state: np.ndarray
    true_channel: object = None
    order: DecodingOrderPair = None


class ReplayBuffer:
    """固定容量的環形緩衝區，滿了覆寫最舊的樣本"""

    def __init__(self, capacity, state_size, a1_size, a2_size):
        self.capacity = int(capacity)
        self.states = np.zeros((self.capacity, state_size))
        self.a1 = np.zeros((self.capacity, a1_size))
        self.a2 = np.zeros((self.capacity, a2_size))
        self.rewards = np.zeros(self.capacity)
        self.next_states = np.zeros((self.capacity, state_size))
        self.channels = [None] * self.capacity
        self.orders = [None] * self.capacity
        self.position = 0
        self.size = 0

    def __len__(self):
        return self.size

    def add(self, t):
        if not np.isfinite(t.reward) or t.reward < 0:
            raise ValueError(f"獎勵必須為有限非負值，收到 {t.reward}")
        k = self.position
        self.states[k] = t.state
        self.a1[k] = t.a1
        self.a2[k] = t.a2
        self.rewards[k] = t.reward
        self.next_states[k] = t.next_state
        self.channels[k] = t.true_channel
        self.orders[k] = t.order
        self.position = (k + 1) % self.capacity
        self.size = min(self.size + 1, self.capacity)

    def get(self, k):
        return Transition(
            self.states[k].copy(),
            self.a1[k].copy(),
            self.a2[k].copy(),
            float(self.rewards[k]),
            self.next_states[k].copy(),
            self.channels[k],
            self.orders[k],
        )

    def sample(self, batch_size, rng):
        """批次內不重複的均勻抽樣"""
        if self.size < batch_size:
            raise BufferTooSmall(f"緩衝區只有 {self.size} 筆，少於批次 {batch_size}")
        idx = rng.choice(self.size, size=batch_size, replace=False)
        return {
            "states": self.states[idx],
            "a1": self.a1[idx],
            "a2": self.a2[idx],
            "rewards": self.rewards[idx],
            "next_states": self.next_states[idx],
        }


# ---------------------------------------------------------------------------
# 更新步驟
# ---------------------------------------------------------------------------


def _split_state(states, obs_sizes):
    return states[:, : obs_sizes[0]], states[:, obs_sizes[0]: obs_sizes[0] + obs_sizes[1]]


def td_target(rewards, gamma, q_next):
    """y = r + γ·Q⁻"""
    return np.asarray(rewards, dtype=float) + gamma * np.asarray(q_next, dtype=float)


def critic_update(agents, batch, gamma, obs_sizes):
    """TD 目標 y = r + γ·Q⁻(s', μ⁻_1(O'_1), μ⁻_2(O'_2))，各評論家一步 Adam

    Returns:
        每個代理人的 MSE 損失
    """
    next_states = batch["next_states"]
    next_obs = _split_state(next_states, obs_sizes)
    next_actions = [target_action(a, o, next_states) for a, o in zip(agents, next_obs)]
    critic_in = np.hstack([batch["states"], batch["a1"], batch["a2"]])
    next_in = np.hstack([next_states] + next_actions)

    losses = []
    for agent in agents:
        q_next = mlp.forward(agent.critic.target, next_in)[0].ravel()
        targets = td_target(batch["rewards"], gamma, q_next)
        pred, cache = mlp.forward(agent.critic.online, critic_in)
        loss, grad = mlp.mse_loss_and_grad(pred.ravel(), targets)
        grads, _ = mlp.backward(agent.critic.online, cache, grad.reshape(-1, 1))
        agent.critic.apply(grads)
        losses.append(loss)
    return losses


def actor_update(agents, batch, obs_sizes):
    """確定性策略梯度：重算自己的動作，另一方動作取自批次

    Returns:
        每個代理人演員梯度的範數
    """
    states = batch["states"]
    obs = _split_state(states, obs_sizes)
    batch_size = states.shape[0]
    state_size = states.shape[1]
    norms = []

    for agent in agents:
        head_outputs = []
        if agent.power is not None:
            head_outputs.append(("power", agent.power, *mlp.forward(agent.power.online, obs[agent.index - 1])))
        head_outputs.append(
            ("precoder", agent.precoder, *mlp.forward(agent.precoder.online, obs[agent.index - 1]))
        )
        if agent.order is not None:
            head_outputs.append(("order", agent.order, *mlp.forward(agent.order.online, states)))
        own_action = np.hstack([out for _, _, out, _ in head_outputs])

        if agent.index == 1:
            critic_in = np.hstack([states, own_action, batch["a2"]])
            offset = state_size
        else:
            critic_in = np.hstack([states, batch["a1"], own_action])
            offset = state_size + batch["a1"].shape[1]

        _, cache = mlp.forward(agent.critic.online, critic_in)
        # 最大化 Q 的平均值
        grad_q = np.full((batch_size, 1), -1.0 / batch_size)
        _, grad_in = mlp.backward(agent.critic.online, cache, grad_q)
        grad_action = grad_in[:, offset: offset + own_action.shape[1]]

        squared = 0.0
        start = 0
        for _, net, out, head_cache in head_outputs:
            width = out.shape[1]
            grads, _ = mlp.backward(net.online, head_cache, grad_action[:, start: start + width])
            start += width
            squared += mlp.grad_norm(grads) ** 2
            net.apply(grads)
        norms.append(float(np.sqrt(squared)))
    return norms


# ---------------------------------------------------------------------------
# 環境與訓練
# ---------------------------------------------------------------------------


class InterferenceEnv:
    """每一步都是新的 i.i.d. 通道；演員看估測通道，獎勵用真實通道"""

    def __init__(self, antennas, snr_db, csit_mode, streams, zero_cross=False):
        self.antennas = antennas
        self.snr_db = snr_db
        self.csit_mode = csit_mode
        self.streams = streams
        self.zero_cross = zero_cross
        self.current = None

    def draw(self):
        true = sample_channel(self.antennas, self.snr_db, self.streams["channel"])
        if self.zero_cross:
            true = true.with_cross_zeroed()
        est = apply_estimation_error(true, self.csit_mode, self.streams["estimation"])
        return true, est

    def reset(self):
        self.current = self.draw()
        return self.current

    def advance(self):
        self.current = self.draw()
        return self.current


@dataclass
class TrainResult:
    agents: list
    trace: list = field(default_factory=list)
    rate_splitting: bool = True
    order_source: str = "exhaustive"
    buffer: ReplayBuffer = None

    @property
    def train_mean(self):
        """最後 200 回合的平均獎勵"""
        if not self.trace:
            return float("nan")
        window = self.trace[-FINAL_WINDOW:]
        return float(np.mean([row["mean_reward"] for row in window]))


def _nanmean(values):
    return float(np.mean(values)) if values else float("nan")


def _fixed_order(config):
    return DecodingOrderPair(*config.fixed_order)


def train(config, snr_db, rate_splitting=True, seed=None, episodes=None, zero_cross=False, callback=None):
    """多代理人訓練迴圈

    Args:
        config: ExperimentConfig（天線、beta、CSIT、解碼順序、超參數）
        callback: 每回合結束後以 (episode, row) 呼叫，可選

    Returns:
        TrainResult
    """
    hyper = config.hyper
    seed = config.seed if seed is None else seed
    episodes = config.episodes if episodes is None else episodes
    antennas = config.antennas
    order_source = config.order_source if rate_splitting else "exhaustive"
    learned = rate_splitting and order_source == "learned"

    streams = make_streams(seed, TRAIN_SALT, snr_key(snr_db), int(rate_splitting))
    agents = build_agents(antennas, hyper, streams["init"], rate_splitting, learned)
    layouts = (agents[0].layout, agents[1].layout)
    obs_sizes = (observation_size(antennas, 1), observation_size(antennas, 2))
    buffer = ReplayBuffer(hyper.buffer_capacity, sum(obs_sizes), layouts[0].size, layouts[1].size)
    env = InterferenceEnv(antennas, snr_db, config.csit_mode, streams, zero_cross)
    label = "RS" if rate_splitting else "noRS"

    result = TrainResult(agents, rate_splitting=rate_splitting, order_source=order_source, buffer=buffer)
    true, est = env.reset()
    for episode in range(1, episodes + 1):
        rewards, r1s, r2s = [], [], []
        losses = ([], [])
        norms = ([], [])
        for _ in range(hyper.episode_length):
            state = full_state(est)
            a = [
                select_action(
                    agent,
                    observation(est, agent.index),
                    state,
                    explore=True,
                    rng=streams["exploration"],
                    noise_variance=hyper.noise_variance,
                )
                for agent in agents
            ]
            order = None
            if learned:
                order = order_from_values(layouts[0].parts(a[0])[2])
            elif order_source == "fixed":
                order = _fixed_order(config)
            reward, report = env_step(true, a[0], a[1], layouts, config.beta, order_source, order, config.powers)

            next_true, next_est = env.advance()
            buffer.add(Transition(state, a[0], a[1], reward, full_state(next_est), true, order))
            true, est = next_true, next_est
            rewards.append(reward)
            r1s.append(report.r1)
            r2s.append(report.r2)

            if len(buffer) < hyper.batch_size:
                continue
            batch = buffer.sample(hyper.batch_size, streams["replay"])
            for k, loss in enumerate(critic_update(agents, batch, hyper.gamma, obs_sizes)):
                losses[k].append(loss)
            for k, norm in enumerate(actor_update(agents, batch, obs_sizes)):
                norms[k].append(norm)
            for agent in agents:
                for net in agent.heads().values():
                    net.blend(hyper.tau)

        row = {
            "episode": episode,
            "mean_reward": float(np.mean(rewards)),
            "critic_loss_1": _nanmean(losses[0]),
            "critic_loss_2": _nanmean(losses[1]),
            "actor_grad_norm_1": _nanmean(norms[0]),
            "actor_grad_norm_2": _nanmean(norms[1]),
            "mean_r1": float(np.mean(r1s)),
            "mean_r2": float(np.mean(r2s)),
        }
        result.trace.append(row)
        if callback is not None:
            callback(episode, row)
        if episode % config.log_every == 0 or episode == episodes:
            logger.info(
                f"[{label} {snr_db:g} dB] 回合 {episode}/{episodes} 平均獎勵 {row['mean_reward']:.4f}"
            )
    return result


def train_no_rs(config, snr_db, seed=None, episodes=None, zero_cross=False, callback=None):
    """無速率分割：動作只有私有方向"""
    return train(config, snr_db, False, seed, episodes, zero_cross, callback)


def replay_reward(transition, layouts, beta, order_source="exhaustive", powers=(1.0, 1.0)):
    """以儲存的真實通道與動作重算獎勵"""
    reward, _ = env_step(
        transition.true_channel,
        transition.a1,
        transition.a2,
        layouts,
        beta,
        order_source,
        transition.order,
        powers,
    )
    return reward


# ---------------------------------------------------------------------------
# 評估
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class EvalSummary:
    mean: float
    std: float
    band: tuple
    run_means: tuple
    mean_r1: float
    mean_r2: float
    common_fraction: float = 0.0


def summarize(rewards, r1=None, r2=None, common_fraction=None):
    """rewards 為 (n_runs, n_steps)；std 取各 run 平均值的標準差"""
    rewards = np.asarray(rewards, dtype=float)
    run_means = rewards.mean(axis=1)
    mean = float(rewards.mean())
    std = float(run_means.std())
    return EvalSummary(
        mean=mean,
        std=std,
        band=(mean - std, mean + std),
        run_means=tuple(float(x) for x in run_means),
        mean_r1=float(np.mean(r1)) if r1 is not None else float("nan"),
        mean_r2=float(np.mean(r2)) if r2 is not None else float("nan"),
        common_fraction=float(np.mean(common_fraction)) if common_fraction is not None else 0.0,
    )


def policy_precoders(agents, est, powers=(1.0, 1.0)):
    """關閉探索的策略輸出，回傳 (PrecoderSet, 學到的解碼順序或 None)"""
    state = full_state(est)
    a = [select_action(agent, observation(est, agent.index), state) for agent in agents]
    layouts = (agents[0].layout, agents[1].layout)
    learned = None
    if layouts[0].with_order:
        learned = order_from_values(layouts[0].parts(a[0])[2])
    return decode_precoders(a[0], a[1], layouts, powers), learned


def policy_report(agents, true, est, beta, order_source="exhaustive", fixed_order=(0, 0), powers=(1.0, 1.0)):
    """策略在一次通道上的速率報告與預編碼"""
    precoders, learned = policy_precoders(agents, est, powers)
    if not agents[0].layout.rate_splitting:
        return no_rs_rates(true, precoders.w1p, precoders.w2p, beta), precoders
    if order_source == "exhaustive":
        return best_order_report(true, precoders, beta)[1], precoders
    if order_source == "learned":
        if learned is None:
            raise ValueError("代理人沒有解碼順序頭，無法使用 learned")
        return rate_report(true, precoders, learned, beta), precoders
    if order_source == "fixed":
        return rate_report(true, precoders, DecodingOrderPair(*fixed_order), beta), precoders
    raise ValueError(f"未知的解碼順序來源: {order_source}")


def evaluation_draws(antennas, snr_db, csit_mode, seed, n_runs, n_steps, zero_cross=False):
    """評估用通道：同一 (seed, SNR) 下所有方案共用"""
    streams = make_streams(seed, EVAL_SALT, snr_key(snr_db))
    env = InterferenceEnv(antennas, snr_db, csit_mode, streams, zero_cross)
    return [[env.draw() for _ in range(n_steps)] for _ in range(n_runs)]


def evaluate(agents, draws, beta, order_source="exhaustive", fixed_order=(0, 0), powers=(1.0, 1.0)):
    """關閉探索，在給定通道上評估訓練後的代理人"""
    rewards, r1, r2, fractions = [], [], [], []
    for run in draws:
        run_rewards = []
        for true, est in run:
            report, precoders = policy_report(agents, true, est, beta, order_source, fixed_order, powers)
            run_rewards.append(report.r_beta)
            r1.append(report.r1)
            r2.append(report.r2)
            fractions.append(0.5 * (precoders.common_fraction(1) + precoders.common_fraction(2)))
        rewards.append(run_rewards)
    return summarize(rewards, r1, r2, fractions)


# ---------------------------------------------------------------------------
# 檢查點
# ---------------------------------------------------------------------------


def checkpoint_dir(outdir, scheme, snr_db, seed):
    return os.path.join(outdir, scheme, f"{snr_db:g}", str(seed))


def save_agents(agents, directory):
    """每個網路頭寫成 agent<i>_<head>.ckpt"""
    for agent in agents:
        for head, net in agent.heads().items():
            mlp.save_checkpoint(net.online, os.path.join(directory, f"agent{agent.index}_{head}.ckpt"))
    logger.debug(f"已儲存檢查點到 {directory}")


def load_agents(directory, antennas, hyper, rate_splitting=True, learned_order=False):
    """從檢查點重建代理人；目標網路與線上網路相同"""
    layouts = layouts_for(antennas, rate_splitting, learned_order)
    state_size = observation_size(antennas, 1) + observation_size(antennas, 2)
    critic_in = state_size + layouts[0].size + layouts[1].size

    def dims(n_in, n_out):
        return mlp.network_dims(n_in, n_out, hyper.hidden_size, hyper.n_layers)

    def load(i, head, expected):
        path = os.path.join(directory, f"agent{i}_{head}.ckpt")
        return TrainableNet.from_params(mlp.load_checkpoint(path, expected), hyper.learning_rate)

    agents = []
    for i, layout in zip((1, 2), layouts):
        obs_size = observation_size(antennas, i)
        agent = AgentBundle(
            index=i,
            layout=layout,
            precoder=load(i, "precoder", dims(obs_size, layout.direction_size)),
            critic=load(i, "critic", dims(critic_in, 1)),
        )
        if rate_splitting:
            agent.power = load(i, "power", dims(obs_size, layout.split_size))
        if layout.with_order:
            agent.order = load(i, "order", dims(state_size, 2))
        agents.append(agent)
    return agents
