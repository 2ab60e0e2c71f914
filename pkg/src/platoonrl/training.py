"""Multi-agent actor-critic training on the platoon environment.

Four algorithms share one loop:

  "global_local"   per-agent actors and local critics plus a *shared* pair of
                   twin global critics trained on the team reward with
                   min-target bootstrapping, smoothed target actions and
                   delayed actor/local updates.
  "task_split"     same, but each agent's local critic is split into two
                   task critics (CAM transmission, AoI minimization) whose
                   rewards sum to the holistic one; the actor follows the sum
                   of their action gradients.
  "decentralized"  per-agent actors and local critics only; no team signal.
  "ddpg"           one centralized actor-critic over the joint observation
                   and action.

A "random" selector provides the uniform-action oracle used as a learning
baseline.  The global twins update every episode; actors and local critics
update only on episodes divisible by the policy delay, following the
per-episode cadence of the training procedure (not per-gradient-step TD3).

Policy gradients substitute the actor's raw output into the critic's action
slice; stored transitions hold the executed action in its critic encoding
(subchannel one-hot, mode bit, power fraction).
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field, replace

import numpy as np

from .buffer import Minibatch, ReplayBuffer, Transition
from .env import ActionCommand, EnvConfig, PlatoonEnv, decode_action
from .nets import Adam, DenseNet, load_net, save_net, soft_update
from .rewards import RewardWeights, bundle_for, global_reward

ALGORITHMS = ("task_split", "global_local", "decentralized", "ddpg")
BASELINES = ("decentralized", "ddpg")
RANDOM_POLICY = "random"


@dataclass(frozen=True)
class TrainConfig:
    algorithm: str = "task_split"
    episodes: int = 500
    minibatch_size: int = 64
    discount: float = 0.99
    tau: float = 5e-4
    policy_delay: int = 2
    noise_std: float = 0.2  # exploration start and target smoothing
    noise_clip: float = 0.5
    exploration_std_final: float = 0.05
    replay_capacity: int = 50000
    updates_per_block: int = 1  # gradient steps per update block, fresh minibatch each
    actor_lr: float = 1e-4
    critic_lr: float = 1e-3
    # L2 pull on raw action scores toward 0; keeps the bounded heads near
    # their decision boundaries so mode/subchannel choices stay reversible.
    # 0 disables it (the plain deterministic policy gradient).
    actor_score_reg: float = 0.0
    actor_hidden: tuple[int, ...] = (1024, 512)
    local_critic_hidden: tuple[int, ...] = (512, 256)
    global_critic_hidden: tuple[int, ...] = (1024, 512, 256)

    def __post_init__(self):
        if self.algorithm not in ALGORITHMS + (RANDOM_POLICY,):
            raise ValueError(f"unknown algorithm {self.algorithm!r}")
        if self.episodes < 0:
            raise ValueError("episodes must be >= 0")
        if self.policy_delay < 1:
            raise ValueError("policy_delay must be >= 1")
        if self.updates_per_block < 1:
            raise ValueError("updates_per_block must be >= 1")
        if not 0.0 < self.discount < 1.0:
            raise ValueError("discount must lie in (0, 1)")
        if self.minibatch_size < 1:
            raise ValueError("minibatch_size must be >= 1")
        if self.replay_capacity < self.minibatch_size:
            raise ValueError("replay_capacity must be >= minibatch_size")


@dataclass
class EpisodeRecord:
    """One row of the training log (wall clock stays out of metrics files)."""

    episode: int
    local_rewards: np.ndarray  # (P,) slot-mean holistic reward per agent
    task_cam_rewards: np.ndarray  # (P,)
    task_aoi_rewards: np.ndarray  # (P,)
    team_reward: float
    mean_aoi_s: float
    cam_delivered: bool  # every platoon finished its CAM
    cam_delivered_frac: float
    mean_power_w: float
    wall_clock_s: float


@dataclass
class TrainLog:
    algorithm: str
    seed: int
    env_config: EnvConfig
    train_config: TrainConfig
    records: list[EpisodeRecord] = field(default_factory=list)
    td3_bound_violations: int = 0

    def tail(self, window: int) -> list[EpisodeRecord]:
        if window < 1 or window > len(self.records):
            raise ValueError(f"tail window {window} outside 1..{len(self.records)}")
        return self.records[-window:]


# -- action encoding ---------------------------------------------------------


def encode_command(cmd: ActionCommand, config: EnvConfig) -> np.ndarray:
    """Critic encoding of one executed action, on the raw-action manifold.

    Every entry lives in [-1, 1], exactly where the tanh actor heads put raw
    scores: the chosen subchannel is +1 and the others -1 (a winner-take-all
    pattern a saturated actor reproduces verbatim), the mode bit maps to +-1,
    and the power fraction to 2*p/p_max - 1 (the inverse of the decoder's
    squash).  Critics therefore see stored actions, smoothed target actions
    and live actor outputs on one shared scale, which keeps their bootstrap
    values and action gradients anchored by real data.
    """
    vec = np.full(config.action_dim, -1.0)
    vec[cmd.subchannel] = 1.0
    vec[config.num_subchannels] = 2.0 * cmd.intra_mode - 1.0
    vec[config.num_subchannels + 1] = 2.0 * cmd.power_w / config.max_power_w - 1.0
    return vec


def encode_commands(cmds: list[ActionCommand], config: EnvConfig) -> np.ndarray:
    return np.stack([encode_command(c, config) for c in cmds])


def clamp_raw_actions(raw: np.ndarray) -> np.ndarray:
    """Re-clamp noisy raw actions to the bounded heads' range [-1, 1]."""
    return np.clip(raw, -1.0, 1.0)


def sample_clipped_noise(rng: np.random.Generator, std: float, clip: float, size) -> np.ndarray:
    return np.clip(rng.normal(0.0, std, size=size), -clip, clip)


def smoothed_target_actions(
    target_actors: list[DenseNet],
    next_obs: np.ndarray,
    noise_std: float,
    noise_clip: float,
    rng: np.random.Generator,
) -> np.ndarray:
    """Joint target-policy actions with clipped Gaussian smoothing noise.

    next_obs is (S, P, obs_dim); the result is (S, P, act_dim) raw actions,
    re-clamped to the bounded heads' [-1, 1] range.
    """
    batch, num_agents = next_obs.shape[0], next_obs.shape[1]
    act_dim = target_actors[0].layer_sizes[-1]
    actions = np.zeros((batch, num_agents, act_dim))
    for j, actor in enumerate(target_actors):
        actions[:, j] = actor.predict(next_obs[:, j])
    if noise_std > 0.0:
        actions = actions + sample_clipped_noise(rng, noise_std, noise_clip, actions.shape)
    return clamp_raw_actions(actions)


# -- gradient helpers ---------------------------------------------------------


def mse_and_grad(pred: np.ndarray, target: np.ndarray) -> tuple[float, np.ndarray]:
    """Mean-squared-error loss and its gradient w.r.t. the predictions."""
    diff = pred - target
    loss = float(np.mean(diff**2))
    return loss, 2.0 * diff / diff.shape[0]


def critic_regression_step(critic: DenseNet, opt: Adam, x: np.ndarray, y: np.ndarray) -> float:
    q = critic.forward(x)
    loss, dq = mse_and_grad(q, y)
    grads, _ = critic.backward(dq)
    opt.step(grads)
    return loss


def td3_global_target(
    batch: Minibatch,
    twin_targets: tuple[DenseNet, DenseNet],
    target_actions: np.ndarray,
    gamma: float,
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Pessimistic bootstrap target y = r_team + gamma * min(Q'_1, Q'_2).

    Also returns both twins' bootstrap values so callers can verify the
    min-bound row by row.
    """
    s_next = batch.next_obs.reshape(batch.size, -1)
    x_next = np.concatenate([s_next, target_actions.reshape(batch.size, -1)], axis=1)
    q1 = twin_targets[0].predict(x_next)
    q2 = twin_targets[1].predict(x_next)
    y = batch.team_reward[:, None] + gamma * np.minimum(q1, q2)
    return y, q1, q2


def actor_update(
    actor: DenseNet,
    opt: Adam,
    obs_agent: np.ndarray,
    local_critics: list[DenseNet],
    global_critic: DenseNet | None,
    joint_obs: np.ndarray | None,
    joint_actions: np.ndarray | None,
    agent_index: int,
    obs_dim: int,
    act_dim: int,
    score_reg: float = 0.0,
) -> bool:
    """Deterministic policy-gradient ascent step for one agent.

    The ascent direction chains the actor Jacobian with the critics' action
    gradients: the shared global critic is evaluated on the joint input with
    this agent's stored action replaced by the live actor output, and each
    local critic on (own observation, live actor output).  Contributions add
    up; local critics are summed first.  ``score_reg`` optionally subtracts
    reg * mean ||raw||^2 from the ascent objective.
    """
    batch = obs_agent.shape[0]
    raw = actor.forward(obs_agent)
    upstream = np.zeros((batch, act_dim))
    ones = np.full((batch, 1), 1.0 / batch)

    if global_critic is not None:
        acts = joint_actions.copy()
        acts[:, agent_index] = raw
        x = np.concatenate([joint_obs, acts.reshape(batch, -1)], axis=1)
        global_critic.forward(x)
        _, gin = global_critic.backward(ones)
        offset = joint_obs.shape[1] + agent_index * act_dim
        upstream += gin[:, offset : offset + act_dim]

    local_sum = np.zeros((batch, act_dim))
    for critic in local_critics:
        x = np.concatenate([obs_agent, raw], axis=1)
        critic.forward(x)
        _, gin = critic.backward(ones)
        local_sum = local_sum + gin[:, obs_dim:]
    upstream = upstream + local_sum
    if score_reg > 0.0:
        upstream = upstream - (2.0 * score_reg / batch) * raw

    grads, _ = actor.backward(upstream)
    return opt.step([(-gw, -gb) for gw, gb in grads])


# -- network bundles -----------------------------------------------------------


class AgentNets:
    """Actor, local critic(s) and their targets for one platoon leader."""

    def __init__(self, obs_dim: int, act_dim: int, num_task_critics: int, tc: TrainConfig, rng):
        # every raw action head is tanh-bounded so policy outputs stay on the
        # [-1, 1] manifold the critics are trained on; unbounded score heads
        # drift far off it and the critics' action gradients become
        # extrapolation noise
        self.actor = DenseNet(
            (obs_dim, *tc.actor_hidden, act_dim), bounded_units=tuple(range(act_dim)), rng=rng
        )
        self.actor_target = self.actor.copy()
        critic_sizes = (obs_dim + act_dim, *tc.local_critic_hidden, 1)
        self.local_critics = [DenseNet(critic_sizes, rng=rng) for _ in range(num_task_critics)]
        self.local_targets = [c.copy() for c in self.local_critics]
        self.actor_opt = Adam(self.actor, tc.actor_lr)
        self.critic_opts = [Adam(c, tc.critic_lr) for c in self.local_critics]


class GlobalCritics:
    """Twin centralized critics over the joint observation and action."""

    def __init__(self, joint_dim: int, tc: TrainConfig, rng):
        sizes = (joint_dim, *tc.global_critic_hidden, 1)
        self.q1 = DenseNet(sizes, rng=rng)
        self.q2 = DenseNet(sizes, rng=rng)
        self.q1_target = self.q1.copy()
        self.q2_target = self.q2.copy()
        self.opt1 = Adam(self.q1, tc.critic_lr)
        self.opt2 = Adam(self.q2, tc.critic_lr)


class Trainer:
    """One seeded training run; episode() advances the outer loop once."""

    def __init__(self, env_config: EnvConfig, train_config: TrainConfig, weights: RewardWeights, seed: int):
        self.env_config = env_config
        self.tc = train_config
        self.weights = weights
        self.seed = seed
        ss = np.random.SeedSequence(seed)
        env_seed, train_seed = ss.spawn(2)
        self.env = PlatoonEnv(env_config, np.random.default_rng(env_seed))
        self.rng = np.random.default_rng(train_seed)

        p = env_config.num_platoons
        self.obs_dim = env_config.obs_dim
        self.act_dim = env_config.action_dim
        alg = train_config.algorithm
        self.agents: list[AgentNets] = []
        self.globals: GlobalCritics | None = None
        self.ddpg_actor = None

        if alg in ("task_split", "global_local", "decentralized"):
            n_task = 2 if alg == "task_split" else 1
            self.agents = [
                AgentNets(self.obs_dim, self.act_dim, n_task, train_config, self.rng)
                for _ in range(p)
            ]
            if alg != "decentralized":
                self.globals = GlobalCritics(p * (self.obs_dim + self.act_dim), train_config, self.rng)
        elif alg == "ddpg":
            self.ddpg_actor = DenseNet(
                (p * self.obs_dim, *train_config.actor_hidden, p * self.act_dim),
                bounded_units=tuple(range(p * self.act_dim)),
                rng=self.rng,
            )
            self.ddpg_actor_target = self.ddpg_actor.copy()
            self.ddpg_critic = DenseNet(
                (p * (self.obs_dim + self.act_dim), *train_config.global_critic_hidden, 1),
                rng=self.rng,
            )
            self.ddpg_critic_target = self.ddpg_critic.copy()
            self.ddpg_actor_opt = Adam(self.ddpg_actor, train_config.actor_lr)
            self.ddpg_critic_opt = Adam(self.ddpg_critic, train_config.critic_lr)

        self.buffer = ReplayBuffer(train_config.replay_capacity, p, self.obs_dim, self.act_dim)
        self.log = TrainLog(algorithm=alg, seed=seed, env_config=env_config, train_config=train_config)
        self.episode_index = 0

    # -- acting ------------------------------------------------------------------

    def _exploration_std(self) -> float:
        tc = self.tc
        if tc.episodes <= 1:
            return tc.noise_std
        frac = self.episode_index / (tc.episodes - 1)
        return tc.noise_std + (tc.exploration_std_final - tc.noise_std) * min(frac, 1.0)

    def _behavior_actions(self, obs: np.ndarray) -> np.ndarray:
        p = self.env_config.num_platoons
        alg = self.tc.algorithm
        if alg == RANDOM_POLICY:
            return self.rng.uniform(-1.0, 1.0, size=(p, self.act_dim))
        if alg == "ddpg":
            raw = self.ddpg_actor.predict(obs.reshape(-1)).reshape(p, self.act_dim)
        else:
            raw = np.stack([self.agents[j].actor.predict(obs[j]) for j in range(p)])
        std = self._exploration_std()
        noisy = raw + sample_clipped_noise(self.rng, std, self.tc.noise_clip, raw.shape)
        return clamp_raw_actions(noisy)

    # -- updates -------------------------------------------------------------------

    def _update_global_twins(self, batch: Minibatch):
        tc = self.tc
        target_actions = smoothed_target_actions(
            [a.actor_target for a in self.agents],
            batch.next_obs,
            tc.noise_std,
            tc.noise_clip,
            self.rng,
        )
        y, q1b, q2b = td3_global_target(
            batch, (self.globals.q1_target, self.globals.q2_target), target_actions, tc.discount
        )
        r = batch.team_reward[:, None]
        bad = (y > r + tc.discount * q1b) | (y > r + tc.discount * q2b)
        self.log.td3_bound_violations += int(np.count_nonzero(bad))

        x = np.concatenate(
            [batch.obs.reshape(batch.size, -1), batch.actions.reshape(batch.size, -1)], axis=1
        )
        critic_regression_step(self.globals.q1, self.globals.opt1, x, y)
        critic_regression_step(self.globals.q2, self.globals.opt2, x, y)
        soft_update(self.globals.q1_target, self.globals.q1, tc.tau)
        soft_update(self.globals.q2_target, self.globals.q2, tc.tau)

    def _update_agent(self, j: int, batch: Minibatch):
        tc = self.tc
        nets = self.agents[j]
        obs_j = batch.obs[:, j]
        act_j = batch.actions[:, j]
        next_j = batch.next_obs[:, j]
        next_act = nets.actor_target.predict(next_j)  # no smoothing on local targets
        x_next = np.concatenate([next_j, next_act], axis=1)
        x = np.concatenate([obs_j, act_j], axis=1)

        if tc.algorithm == "task_split":
            rewards = [batch.task_rewards[:, j, 0], batch.task_rewards[:, j, 1]]
        else:
            rewards = [batch.local_rewards[:, j]]
        for critic, target, opt, r in zip(nets.local_critics, nets.local_targets, nets.critic_opts, rewards):
            y = r[:, None] + tc.discount * target.predict(x_next)
            critic_regression_step(critic, opt, x, y)

        use_global = self.globals is not None
        actor_update(
            nets.actor,
            nets.actor_opt,
            obs_j,
            nets.local_critics,
            self.globals.q1 if use_global else None,
            batch.obs.reshape(batch.size, -1) if use_global else None,
            batch.actions if use_global else None,
            j,
            self.obs_dim,
            self.act_dim,
            score_reg=tc.actor_score_reg,
        )
        soft_update(nets.actor_target, nets.actor, tc.tau)
        for critic, target in zip(nets.local_critics, nets.local_targets):
            soft_update(target, critic, tc.tau)

    def _update_ddpg(self, batch: Minibatch):
        tc = self.tc
        s = batch.obs.reshape(batch.size, -1)
        a = batch.actions.reshape(batch.size, -1)
        s_next = batch.next_obs.reshape(batch.size, -1)
        # centralized system reward: average local reward plus the team term
        r = batch.local_rewards.mean(axis=1, keepdims=True) + batch.team_reward[:, None]
        a_next = self.ddpg_actor_target.predict(s_next)
        y = r + tc.discount * self.ddpg_critic_target.predict(
            np.concatenate([s_next, a_next], axis=1)
        )
        critic_regression_step(self.ddpg_critic, self.ddpg_critic_opt, np.concatenate([s, a], axis=1), y)

        raw = self.ddpg_actor.forward(s)
        self.ddpg_critic.forward(np.concatenate([s, raw], axis=1))
        _, gin = self.ddpg_critic.backward(np.full((batch.size, 1), 1.0 / batch.size))
        upstream = gin[:, s.shape[1] :]
        if tc.actor_score_reg > 0.0:
            upstream = upstream - (2.0 * tc.actor_score_reg / batch.size) * raw
        grads, _ = self.ddpg_actor.backward(upstream)
        self.ddpg_actor_opt.step([(-gw, -gb) for gw, gb in grads])
        soft_update(self.ddpg_critic_target, self.ddpg_critic, tc.tau)
        soft_update(self.ddpg_actor_target, self.ddpg_actor, tc.tau)

    # -- outer loop --------------------------------------------------------------

    def episode(self) -> EpisodeRecord:
        t0 = time.perf_counter()
        cfg = self.env_config
        p = cfg.num_platoons
        obs = self.env.reset()
        slots = cfg.episode_slots

        local_sum = np.zeros(p)
        cam_sum = np.zeros(p)
        aoi_task_sum = np.zeros(p)
        team_sum = 0.0
        aoi_sum = 0.0
        power_sum = 0.0

        for _ in range(slots):
            raw = self._behavior_actions(obs)
            commands = [decode_action(raw[j], cfg) for j in range(p)]
            next_obs, outcome, states = self.env.step(raw)

            team = global_reward(outcome.interference_w, cfg.noise_w, self.weights)
            bundles = [
                bundle_for(states[j], float(outcome.v2i_rate[j]), commands[j], team, cfg, self.weights)
                for j in range(p)
            ]
            self.buffer.push(
                Transition(
                    obs=obs,
                    actions=encode_commands(commands, cfg),
                    local_rewards=np.array([b.local for b in bundles]),
                    task_rewards=np.array([[b.task_cam, b.task_aoi] for b in bundles]),
                    team_reward=team,
                    next_obs=next_obs,
                )
            )
            local_sum += [b.local for b in bundles]
            cam_sum += [b.task_cam for b in bundles]
            aoi_task_sum += [b.task_aoi for b in bundles]
            team_sum += team
            aoi_sum += self.env.aoi_s.mean()
            power_sum += np.mean([c.power_w for c in commands])
            obs = next_obs

        self._train_updates()

        delivered = self.env.cam_delivered
        record = EpisodeRecord(
            episode=self.episode_index,
            local_rewards=local_sum / slots,
            task_cam_rewards=cam_sum / slots,
            task_aoi_rewards=aoi_task_sum / slots,
            team_reward=team_sum / slots,
            mean_aoi_s=aoi_sum / slots,
            cam_delivered=bool(delivered.all()),
            cam_delivered_frac=float(delivered.mean()),
            mean_power_w=power_sum / slots,
            wall_clock_s=time.perf_counter() - t0,
        )
        self.log.records.append(record)
        self.episode_index += 1
        return record

    def _train_updates(self):
        tc = self.tc
        if tc.algorithm == RANDOM_POLICY or self.buffer.size < tc.minibatch_size:
            return
        if tc.algorithm == "ddpg":
            for _ in range(tc.updates_per_block):
                self._update_ddpg(self.buffer.sample(tc.minibatch_size, self.rng))
            return
        if self.globals is not None:
            for _ in range(tc.updates_per_block):
                self._update_global_twins(self.buffer.sample(tc.minibatch_size, self.rng))
        if self.episode_index % tc.policy_delay == 0:
            for _ in range(tc.updates_per_block):
                batch = self.buffer.sample(tc.minibatch_size, self.rng)
                for j in range(self.env_config.num_platoons):
                    self._update_agent(j, batch)

    def run(self) -> TrainLog:
        for _ in range(self.tc.episodes):
            self.episode()
        return self.log

    # -- checkpointing ------------------------------------------------------------

    def save_checkpoint(self, directory):
        """One .npz per network under the given directory."""
        import os

        os.makedirs(directory, exist_ok=True)
        for name, net in self._named_nets():
            save_net(os.path.join(directory, f"{name}.npz"), net)

    def load_checkpoint(self, directory):
        import os

        for name, _ in self._named_nets():
            loaded = load_net(os.path.join(directory, f"{name}.npz"))
            self._replace_net(name, loaded)

    def _named_nets(self):
        named = []
        for j, nets in enumerate(self.agents):
            named.append((f"agent{j}_actor", nets.actor))
            named.append((f"agent{j}_actor_target", nets.actor_target))
            for i, (c, t) in enumerate(zip(nets.local_critics, nets.local_targets)):
                named.append((f"agent{j}_critic{i}", c))
                named.append((f"agent{j}_critic{i}_target", t))
        if self.globals is not None:
            named += [
                ("global_q1", self.globals.q1),
                ("global_q2", self.globals.q2),
                ("global_q1_target", self.globals.q1_target),
                ("global_q2_target", self.globals.q2_target),
            ]
        if self.ddpg_actor is not None:
            named += [
                ("ddpg_actor", self.ddpg_actor),
                ("ddpg_actor_target", self.ddpg_actor_target),
                ("ddpg_critic", self.ddpg_critic),
                ("ddpg_critic_target", self.ddpg_critic_target),
            ]
        return named

    def _replace_net(self, name: str, net: DenseNet):
        for existing_name, existing in self._named_nets():
            if existing_name == name:
                existing.weights = [w.copy() for w in net.weights]
                existing.biases = [b.copy() for b in net.biases]
                return
        raise KeyError(name)


def run_training(
    env_config: EnvConfig,
    train_config: TrainConfig,
    weights: RewardWeights | None = None,
    seed: int = 0,
) -> TrainLog:
    """Execute one full seeded training run and return its episode log."""
    weights = weights if weights is not None else RewardWeights()
    return Trainer(env_config, train_config, weights, seed).run()


def run_baseline(
    selector: str,
    env_config: EnvConfig,
    train_config: TrainConfig,
    weights: RewardWeights | None = None,
    seed: int = 0,
) -> TrainLog:
    """Train one of the reference baselines ("decentralized" or "ddpg")."""
    if selector not in BASELINES:
        raise ValueError(f"baseline must be one of {BASELINES}, got {selector!r}")
    return run_training(env_config, replace(train_config, algorithm=selector), weights, seed)


def run_random_policy(
    env_config: EnvConfig,
    train_config: TrainConfig,
    weights: RewardWeights | None = None,
    seed: int = 0,
) -> TrainLog:
    """Uniform-random actions with the identical environment stream; the
    no-learning oracle that trained runs are gated against."""
    return run_training(env_config, replace(train_config, algorithm=RANDOM_POLICY), weights, seed)
