"""Per-slot reward shaping: holistic local reward, its two task components,
and the interference-based team reward.

The local reward penalizes remaining CAM backlog, information age and power
spend, and pays a fixed bonus whenever the RSU link clears its minimum rate.
It is *built* as the sum of the two task rewards (CAM transmission and AoI
minimization), so the decomposition identity holds bit-exactly instead of up
to rounding.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .env import ActionCommand, EnvConfig, PlatoonState


@dataclass(frozen=True)
class RewardWeights:
    """Balancing factors.

    Defaults are calibrated so that, with once-per-slot accounting, each
    phase of the task is immediately profitable: clearing CAM backlog beats
    the forgone uplink bonus while payload remains, and the bonus plus the
    growing age penalty pull back to uplink mode once it is delivered.
    """

    cam_backlog: float = 30.0  # weight on remaining payload fraction
    aoi: float = 100.0  # weight per second of information age
    rate_bonus: float = 1.0  # weight on the RSU-rate step bonus
    power: float = 0.02  # weight on normalized transmit power
    success_revenue: float = 1.0  # plateau of the step bonus
    # affine map applied to the raw interference score so the team reward
    # lands in roughly [-1, 1] under the default 3-subchannel scenario
    global_offset: float = 30.0
    global_scale: float = 1.0 / 15.0

    def __post_init__(self):
        for name in ("cam_backlog", "aoi", "rate_bonus", "power"):
            v = getattr(self, name)
            if not np.isfinite(v) or v < 0.0:
                raise ValueError(f"{name} must be finite and >= 0")
        if not self.success_revenue > 0.0:
            raise ValueError("success_revenue must be > 0")


@dataclass(frozen=True)
class RewardBundle:
    """All reward signals of one platoon for one completed slot.

    ``local == task_cam + task_aoi`` exactly, by construction.
    """

    local: float
    task_cam: float
    task_aoi: float
    team: float


def step_bonus(margin: float, revenue: float) -> float:
    """Step function: full revenue for a nonnegative rate margin, else 0."""
    if not np.isfinite(margin):
        raise ValueError("step_bonus: margin must be finite")
    return revenue if margin >= 0.0 else 0.0


def power_penalty(power_w: float, max_power_w: float) -> float:
    """Normalize spent power onto [0, 1]."""
    if not 0.0 <= power_w <= max_power_w:
        raise ValueError(f"power {power_w} W outside [0, {max_power_w}] W")
    return power_w / max_power_w


def task_rewards(
    cam_remaining_frac: float,
    aoi_s: float,
    v2i_rate: float,
    min_v2i_rate: float,
    intra_mode: int,
    power_w: float,
    max_power_w: float,
    weights: RewardWeights,
) -> tuple[float, float]:
    """(CAM-transmission reward, AoI-minimization reward).

    The power penalty is charged to whichever task the slot's mode served:
    the CAM task when broadcasting, the AoI task when talking to the RSU.
    """
    f_p = weights.power * power_penalty(power_w, max_power_w)
    r_cam = -weights.cam_backlog * cam_remaining_frac - intra_mode * f_p
    r_aoi = (
        -weights.aoi * aoi_s
        + weights.rate_bonus * step_bonus(v2i_rate - min_v2i_rate, weights.success_revenue)
        - (1 - intra_mode) * f_p
    )
    return r_cam, r_aoi


def local_reward(
    cam_remaining_frac: float,
    aoi_s: float,
    v2i_rate: float,
    min_v2i_rate: float,
    intra_mode: int,
    power_w: float,
    max_power_w: float,
    weights: RewardWeights,
) -> float:
    """Holistic per-slot reward; equals the sum of the two task rewards."""
    r_cam, r_aoi = task_rewards(
        cam_remaining_frac, aoi_s, v2i_rate, min_v2i_rate, intra_mode, power_w, max_power_w, weights
    )
    return r_cam + r_aoi


def interference_score(interference_w: np.ndarray, noise_w: float) -> float:
    """Raw team objective: -(1/P) * sum_jk log10(I[j,k] + noise).

    The noise floor keeps the log finite on interference-free subchannels;
    zero interference everywhere gives the maximum -K*log10(noise).
    """
    interference = np.asarray(interference_w, dtype=float)
    if np.any(interference < 0.0):
        raise ValueError("interference powers must be >= 0 W")
    p = interference.shape[0]
    return float(-np.sum(np.log10(interference + noise_w)) / p)


def global_reward(interference_w: np.ndarray, noise_w: float, weights: RewardWeights) -> float:
    """Team reward: interference score affinely scaled near the local range."""
    score = interference_score(interference_w, noise_w)
    return (score - weights.global_offset) * weights.global_scale


def bundle_for(
    state: PlatoonState,
    v2i_rate: float,
    command: ActionCommand,
    team: float,
    config: EnvConfig,
    weights: RewardWeights,
) -> RewardBundle:
    """Assemble one platoon's rewards from its post-slot state and outcome."""
    cam_frac = state.cam_remaining_bits / config.cam_payload_bits
    r_cam, r_aoi = task_rewards(
        cam_frac,
        state.aoi_s,
        v2i_rate,
        config.min_v2i_rate,
        command.intra_mode,
        command.power_w,
        config.max_power_w,
        weights,
    )
    return RewardBundle(local=r_cam + r_aoi, task_cam=r_cam, task_aoi=r_aoi, team=team)
