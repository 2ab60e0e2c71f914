"""Ring replay buffer over joint transitions.

Stores, per slot: the joint observation, the joint executed action in its
critic encoding, each agent's holistic and task rewards, the team reward and
the next joint observation.  Oldest entries are evicted first; minibatches
are drawn uniformly without replacement.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass
class Transition:
    obs: np.ndarray  # (P, obs_dim)
    actions: np.ndarray  # (P, act_dim) critic encoding of the executed action
    local_rewards: np.ndarray  # (P,)
    task_rewards: np.ndarray  # (P, 2): CAM task, AoI task
    team_reward: float
    next_obs: np.ndarray  # (P, obs_dim)

    def __post_init__(self):
        if not (
            np.all(np.isfinite(self.obs))
            and np.all(np.isfinite(self.actions))
            and np.all(np.isfinite(self.local_rewards))
            and np.all(np.isfinite(self.task_rewards))
            and np.isfinite(self.team_reward)
            and np.all(np.isfinite(self.next_obs))
        ):
            raise ValueError("transition contains non-finite entries")


@dataclass
class Minibatch:
    obs: np.ndarray  # (S, P, obs_dim)
    actions: np.ndarray  # (S, P, act_dim)
    local_rewards: np.ndarray  # (S, P)
    task_rewards: np.ndarray  # (S, P, 2)
    team_reward: np.ndarray  # (S,)
    next_obs: np.ndarray  # (S, P, obs_dim)

    @property
    def size(self) -> int:
        return self.obs.shape[0]


class ReplayBuffer:
    def __init__(self, capacity: int, num_agents: int, obs_dim: int, act_dim: int):
        if capacity < 1:
            raise ValueError("capacity must be >= 1")
        self.capacity = capacity
        self.size = 0
        self._next = 0
        self._obs = np.zeros((capacity, num_agents, obs_dim))
        self._actions = np.zeros((capacity, num_agents, act_dim))
        self._local = np.zeros((capacity, num_agents))
        self._tasks = np.zeros((capacity, num_agents, 2))
        self._team = np.zeros(capacity)
        self._next_obs = np.zeros((capacity, num_agents, obs_dim))

    def push(self, t: Transition):
        i = self._next
        self._obs[i] = t.obs
        self._actions[i] = t.actions
        self._local[i] = t.local_rewards
        self._tasks[i] = t.task_rewards
        self._team[i] = t.team_reward
        self._next_obs[i] = t.next_obs
        self._next = (i + 1) % self.capacity
        self.size = min(self.size + 1, self.capacity)

    def sample(self, batch_size: int, rng: np.random.Generator) -> Minibatch:
        if batch_size > self.size:
            raise ValueError(f"cannot sample {batch_size} from buffer of size {self.size}")
        idx = rng.choice(self.size, size=batch_size, replace=False)
        return Minibatch(
            obs=self._obs[idx],
            actions=self._actions[idx],
            local_rewards=self._local[idx],
            task_rewards=self._tasks[idx],
            team_reward=self._team[idx],
            next_obs=self._next_obs[idx],
        )
