"""Episodic multi-platoon C-V2X environment.

One RSU sits at the center of an urban crossroad; each platoon leader (the
agent) picks, per 1 ms slot, a subchannel, a communication mode (V2I uplink
vs intra-platoon CAM broadcast) and a transmit power.  The environment owns

  * mobility on the crossroad lanes (straight by default, optional turns),
  * the slot clock and the large-scale fading epoch (frozen per episode,
    fast fading redrawn every slot),
  * Shannon spectral efficiencies of the V2I link and of the weakest
    follower link, with co-channel interference between platoons,
  * age-of-information and CAM payload accounting,
  * fixed-size observation vectors (3K + 3 per agent).

Everything is driven by an explicit numpy Generator, so equal seeds give
bit-identical trajectories.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .channel import (
    FadingSample,
    LargeScaleState,
    compose_gain,
    dbm_to_watts,
    sample_rayleigh_power,
    sample_shadowing,
    v2i_pathloss_db,
    v2v_pathloss_db,
)


class ConfigError(ValueError):
    """Raised when an environment configuration is inconsistent."""


class ActionDecodeError(ValueError):
    """Raised when a raw action vector cannot be decoded."""


MIN_LINK_DISTANCE_M = 1.0


@dataclass
class EnvConfig:
    """Scenario constants; defaults follow the reference urban setup."""

    num_platoons: int = 5
    platoon_size: int = 4  # leader + (N-1) followers
    num_subchannels: int = 3
    subchannel_bandwidth_hz: float = 180e3
    slot_s: float = 1e-3
    episode_slots: int = 100
    cam_payload_bits: float = 32000.0  # 4000 bytes
    min_v2i_rate: float = 3.0  # bits/s/Hz
    max_power_dbm: float = 30.0
    noise_power_dbm: float = -114.0
    carrier_ghz: float = 2.0

    intra_platoon_gap_m: float = 25.0
    vehicle_length_m: float = 4.0
    speed_min_mps: float = 10.0  # 36 km/h
    speed_max_mps: float = 15.0  # 54 km/h
    grid_extent_m: float = 350.0
    lane_offset_m: float = 2.0
    turn_probability: float = 0.0  # chance per episode of a 90-degree turn

    rsu_height_m: float = 25.0
    vehicle_height_m: float = 1.5
    rsu_antenna_gain_dbi: float = 8.0
    vehicle_antenna_gain_dbi: float = 3.0
    rsu_noise_figure_db: float = 5.0
    vehicle_noise_figure_db: float = 9.0

    v2i_shadow_sigma_db: float = 8.0
    v2v_shadow_sigma_db: float = 3.0
    v2i_decorrelation_m: float = 50.0
    v2v_decorrelation_m: float = 10.0
    # path loss and shadowing refresh cadence; one epoch is one episode (the
    # only supported value), fast fading redraws every slot
    large_scale_epoch_slots: int = 0  # 0 means episode_slots
    aoi_reset_on_episode: bool = True

    # observation scaling: dB values are mapped through (x - center) / span
    obs_gain_center_db: float = -80.0
    obs_gain_span_db: float = 40.0
    obs_interference_center_db: float = -110.0
    obs_interference_span_db: float = 40.0

    def __post_init__(self):
        if self.num_platoons < 1:
            raise ConfigError("num_platoons must be >= 1")
        if self.platoon_size < 2:
            raise ConfigError("platoon_size must be >= 2 (leader plus followers)")
        if self.num_subchannels < 1:
            raise ConfigError("num_subchannels must be >= 1")
        for name in (
            "subchannel_bandwidth_hz",
            "slot_s",
            "cam_payload_bits",
            "min_v2i_rate",
            "intra_platoon_gap_m",
            "vehicle_length_m",
            "grid_extent_m",
            "carrier_ghz",
        ):
            if getattr(self, name) <= 0.0:
                raise ConfigError(f"{name} must be > 0")
        if self.episode_slots < 1:
            raise ConfigError("episode_slots must be >= 1")
        if not 0.0 < self.speed_min_mps <= self.speed_max_mps:
            raise ConfigError("speed range must satisfy 0 < min <= max")
        if not 0.0 <= self.turn_probability <= 1.0:
            raise ConfigError("turn_probability must lie in [0, 1]")
        if not np.isfinite(self.max_power_dbm) or not np.isfinite(self.noise_power_dbm):
            raise ConfigError("power levels must be finite")
        if self.large_scale_epoch_slots not in (0, self.episode_slots):
            raise ConfigError(
                "large_scale_epoch_slots must equal episode_slots (or 0 for that "
                "default); mid-episode large-scale refresh is not modeled"
            )
        span = self.platoon_span_m
        if span > 1.8 * self.grid_extent_m:
            raise ConfigError(
                f"platoon span {span:.1f} m does not fit a lane of the "
                f"{2 * self.grid_extent_m:.0f} m grid"
            )

    # -- derived quantities -------------------------------------------------

    @property
    def num_followers(self) -> int:
        return self.platoon_size - 1

    @property
    def platoon_span_m(self) -> float:
        return self.num_followers * (self.intra_platoon_gap_m + self.vehicle_length_m)

    @property
    def cam_budget_s(self) -> float:
        """CAM delivery deadline: one episode of slots."""
        return self.episode_slots * self.slot_s

    @property
    def noise_w(self) -> float:
        return dbm_to_watts(self.noise_power_dbm)

    @property
    def max_power_w(self) -> float:
        return dbm_to_watts(self.max_power_dbm)

    @property
    def v2i_gain_offset_db(self) -> float:
        """Antenna gains minus RSU noise figure, folded into the link gain."""
        return self.vehicle_antenna_gain_dbi + self.rsu_antenna_gain_dbi - self.rsu_noise_figure_db

    @property
    def v2v_gain_offset_db(self) -> float:
        return 2.0 * self.vehicle_antenna_gain_dbi - self.vehicle_noise_figure_db

    @property
    def obs_dim(self) -> int:
        return 3 * self.num_subchannels + 3

    @property
    def action_dim(self) -> int:
        """Raw actor output: K subchannel scores, one mode score, one power score."""
        return self.num_subchannels + 2


@dataclass
class ActionCommand:
    """Decoded per-slot decision of one platoon leader."""

    subchannel: int
    intra_mode: int  # 1 = broadcast CAM to followers, 0 = V2I uplink
    power_w: float


@dataclass
class PlatoonState:
    leader_position: np.ndarray
    follower_positions: np.ndarray
    aoi_s: float
    cam_remaining_bits: float
    time_budget_s: float
    cam_delivered: bool


@dataclass
class ChannelSnapshot:
    """Composed linear gains of the current slot.

    v2i_gain[j, k]        : leader j -> RSU (own signal and, for j' != j,
                            the interference it causes at the RSU)
    v2v_gain[t, j, i, k]  : leader t -> follower i of platoon j; the
                            diagonal t == j is the intended broadcast link.
    """

    v2i_gain: np.ndarray
    v2v_gain: np.ndarray


@dataclass
class StepOutcome:
    """Per-slot result for every platoon."""

    v2i_rate: np.ndarray  # bits/s/Hz on the chosen subchannel
    v2v_min_rate: np.ndarray  # weakest follower, bits/s/Hz
    interference_w: np.ndarray  # (P, K) co-channel power seen at the RSU
    v2i_success: np.ndarray  # bool, mode 0 and rate >= min_v2i_rate


def unit_squash(y: float) -> float:
    """Monotone map of a raw power score onto [0, 1]: clip((y + 1)/2).

    Affine over the bounded head's native (-1, 1) range, so every raw score
    moves the executed power and the map inverts exactly (no dead zones that
    would trap a policy at zero power).
    """
    return float(np.clip((y + 1.0) / 2.0, 0.0, 1.0))


def decode_action(raw, config: EnvConfig) -> ActionCommand:
    """Map one raw actor vector (K + 2 reals) to a feasible command.

    Subchannel = argmax of the first K scores (ties to the lowest index),
    mode = 1 iff the mode score is >= 0, power = p_max * unit_squash(score).
    The decoder structurally enforces the one-subchannel and power-cap
    constraints.
    """
    vec = np.asarray(raw, dtype=float)
    k = config.num_subchannels
    if vec.shape != (k + 2,):
        raise ActionDecodeError(f"raw action must have shape ({k + 2},), got {vec.shape}")
    if np.any(np.isnan(vec)):
        raise ActionDecodeError("raw action contains NaN")
    subchannel = int(np.argmax(vec[:k]))
    intra_mode = 1 if vec[k] >= 0.0 else 0
    power_w = config.max_power_w * unit_squash(vec[k + 1])
    return ActionCommand(subchannel=subchannel, intra_mode=intra_mode, power_w=power_w)


class PlatoonEnv:
    """Single-writer simulation state; step() is the only mutator.

    Run several environments in parallel by giving each its own Generator;
    never share one instance between threads.  ``v2v_pathloss_fn`` swaps the
    follower-link path-loss law; it receives (distance_m, carrier_ghz) and
    returns dB (broadcasting over arrays), defaulting to the LOS
    street-canyon model.
    """

    def __init__(self, config: EnvConfig, rng: np.random.Generator, v2v_pathloss_fn=None):
        self.config = config
        self.rng = rng
        self.v2v_pathloss_fn = v2v_pathloss_fn if v2v_pathloss_fn is not None else v2v_pathloss_db
        p, f = config.num_platoons, config.num_followers

        self._place_platoons()
        self.aoi_s = np.full(p, config.slot_s)
        self.cam_remaining_bits = np.full(p, config.cam_payload_bits)
        self.slots_done = 0
        self.cam_delivered = np.zeros(p, dtype=bool)
        self.episode_index = -1

        # large-scale states carry array fields, one entry per link
        self.v2i_large = LargeScaleState(
            pathloss_db=np.zeros(p),
            shadowing_db=np.zeros(p),
            antenna_gain_db=config.vehicle_antenna_gain_dbi + config.rsu_antenna_gain_dbi,
            noise_figure_db=config.rsu_noise_figure_db,
            last_position=self.leader_pos.copy(),
        )
        self.v2v_large = LargeScaleState(
            pathloss_db=np.zeros((p, p, f)),
            shadowing_db=np.zeros((p, p, f)),
            antenna_gain_db=2.0 * config.vehicle_antenna_gain_dbi,
            noise_figure_db=config.vehicle_noise_figure_db,
            last_position=self.leader_pos.copy(),
        )
        self._shadowing_initialized = False
        self._fading = FadingSample(power_gain=np.ones((p, config.num_subchannels)))
        self._fading_v2v = np.ones((p, p, f, config.num_subchannels))
        self.prev_interference_w = np.zeros((p, config.num_subchannels))

    # -- geometry -----------------------------------------------------------

    def _place_platoons(self):
        """Put each platoon on one of the four crossroad approaches."""
        cfg = self.config
        p = cfg.num_platoons
        headings = np.array([[1.0, 0.0], [-1.0, 0.0], [0.0, 1.0], [0.0, -1.0]])
        self.direction = np.zeros((p, 2))
        self.leader_pos = np.zeros((p, 2))
        self.speed_mps = self.rng.uniform(cfg.speed_min_mps, cfg.speed_max_mps, size=p)
        for j in range(p):
            d = headings[j % 4]
            self.direction[j] = d
            along = self.rng.uniform(-0.8, 0.8) * cfg.grid_extent_m
            # right-hand traffic: lane offset to the right of the heading
            lateral = np.array([d[1], -d[0]]) * cfg.lane_offset_m
            self.leader_pos[j] = d * along + lateral

    def follower_positions(self, j: int) -> np.ndarray:
        """Follower i trails the leader by i*(gap + vehicle length)."""
        cfg = self.config
        spacing = cfg.intra_platoon_gap_m + cfg.vehicle_length_m
        idx = np.arange(1, cfg.platoon_size)[:, None]
        return self.leader_pos[j] - idx * spacing * self.direction[j]

    def _advance_positions(self):
        cfg = self.config
        self.leader_pos += self.direction * self.speed_mps[:, None] * cfg.slot_s
        # wrap onto the 2*extent torus so platoons stay on the map
        extent = cfg.grid_extent_m
        self.leader_pos = (self.leader_pos + extent) % (2.0 * extent) - extent

    def _maybe_turn(self):
        """Episode-boundary 90-degree turns of the whole formation."""
        cfg = self.config
        draws = self.rng.uniform(size=cfg.num_platoons)
        if cfg.turn_probability <= 0.0:
            return
        for j in range(cfg.num_platoons):
            if draws[j] < cfg.turn_probability:
                dx, dy = self.direction[j]
                self.direction[j] = np.array([-dy, dx])

    # -- large-scale epoch ----------------------------------------------------

    def _refresh_large_scale(self):
        """Recompute path loss and advance shadowing; called once per episode."""
        cfg = self.config
        p, f = cfg.num_platoons, cfg.num_followers

        dh = cfg.rsu_height_m - cfg.vehicle_height_m
        d2_v2i = np.sum(self.leader_pos**2, axis=1) + dh**2
        dist_v2i = np.maximum(np.sqrt(d2_v2i), MIN_LINK_DISTANCE_M)
        self.v2i_large.pathloss_db = v2i_pathloss_db(dist_v2i)

        followers = np.stack([self.follower_positions(j) for j in range(p)])  # (P, F, 2)
        diff = self.leader_pos[:, None, None, :] - followers[None, :, :, :]  # (tx, rx_pl, i, 2)
        dist_v2v = np.maximum(np.linalg.norm(diff, axis=-1), MIN_LINK_DISTANCE_M)
        self.v2v_large.pathloss_db = self.v2v_pathloss_fn(dist_v2v, cfg.carrier_ghz)

        moved = np.linalg.norm(self.leader_pos - self.v2i_large.last_position, axis=1)
        if not self._shadowing_initialized:
            self.v2i_large.shadowing_db = self.rng.normal(0.0, cfg.v2i_shadow_sigma_db, size=p)
            self.v2v_large.shadowing_db = self.rng.normal(
                0.0, cfg.v2v_shadow_sigma_db, size=(p, p, f)
            )
            self._shadowing_initialized = True
        else:
            self.v2i_large.shadowing_db = sample_shadowing(
                self.v2i_large.shadowing_db,
                moved,
                cfg.v2i_decorrelation_m,
                cfg.v2i_shadow_sigma_db,
                self.rng,
            )
            # every V2V link decorrelates with its transmitter's displacement
            self.v2v_large.shadowing_db = sample_shadowing(
                self.v2v_large.shadowing_db,
                np.broadcast_to(moved[:, None, None], (p, p, f)),
                cfg.v2v_decorrelation_m,
                cfg.v2v_shadow_sigma_db,
                self.rng,
            )
        self.v2i_large.last_position = self.leader_pos.copy()
        self.v2v_large.last_position = self.leader_pos.copy()

    def _redraw_fast_fading(self):
        cfg = self.config
        p, f, k = cfg.num_platoons, cfg.num_followers, cfg.num_subchannels
        self._fading = FadingSample(power_gain=sample_rayleigh_power(self.rng, size=(p, k)))
        self._fading_v2v = sample_rayleigh_power(self.rng, size=(p, p, f, k))

    def channel_snapshot(self) -> ChannelSnapshot:
        """Gains of the current slot (large-scale epoch times current fading)."""
        cfg = self.config
        v2i = compose_gain(
            LargeScaleState(
                pathloss_db=self.v2i_large.pathloss_db[:, None],
                shadowing_db=self.v2i_large.shadowing_db[:, None],
                antenna_gain_db=self.v2i_large.antenna_gain_db,
                noise_figure_db=self.v2i_large.noise_figure_db,
            ),
            self._fading,
        )
        v2v = compose_gain(
            LargeScaleState(
                pathloss_db=self.v2v_large.pathloss_db[..., None],
                shadowing_db=self.v2v_large.shadowing_db[..., None],
                antenna_gain_db=self.v2v_large.antenna_gain_db,
                noise_figure_db=self.v2v_large.noise_figure_db,
            ),
            FadingSample(power_gain=self._fading_v2v),
        )
        return ChannelSnapshot(v2i_gain=v2i, v2v_gain=v2v)

    # -- episode lifecycle ----------------------------------------------------

    def reset(self) -> np.ndarray:
        """Start a new episode: refresh the large-scale epoch, reset the CAM.

        AoI resets to one slot when ``aoi_reset_on_episode`` is set (the
        default); otherwise it carries over so a run can track staleness
        across CAM periods.
        """
        cfg = self.config
        self.episode_index += 1
        self._maybe_turn()
        self._refresh_large_scale()
        if cfg.aoi_reset_on_episode:
            self.aoi_s = np.full(cfg.num_platoons, cfg.slot_s)
        self.cam_remaining_bits = np.full(cfg.num_platoons, cfg.cam_payload_bits)
        self.slots_done = 0
        self.cam_delivered = np.zeros(cfg.num_platoons, dtype=bool)
        self.prev_interference_w = np.zeros((cfg.num_platoons, cfg.num_subchannels))
        self._redraw_fast_fading()
        return self.observations()

    @property
    def time_budget_s(self) -> np.ndarray:
        remaining = self.config.cam_budget_s - self.slots_done * self.config.slot_s
        return np.full(self.config.num_platoons, max(0.0, remaining))

    @property
    def platoon_states(self) -> list[PlatoonState]:
        budget = self.time_budget_s
        return [
            PlatoonState(
                leader_position=self.leader_pos[j].copy(),
                follower_positions=self.follower_positions(j),
                aoi_s=float(self.aoi_s[j]),
                cam_remaining_bits=float(self.cam_remaining_bits[j]),
                time_budget_s=float(budget[j]),
                cam_delivered=bool(self.cam_delivered[j]),
            )
            for j in range(self.config.num_platoons)
        ]

    # -- per-slot physics -------------------------------------------------------

    def compute_rates(self, commands: list[ActionCommand], snapshot: ChannelSnapshot) -> StepOutcome:
        """Spectral efficiencies and RSU-side interference for one slot.

        V2I:  log2(1 + (1-mode) p h / (I + sigma^2)) on the chosen subchannel,
        where I sums every other platoon transmitting on that subchannel.
        V2V:  the same form per follower, gated by mode, reported as the
        minimum over followers (the link that limits CAM delivery).
        """
        cfg = self.config
        p, f, k = cfg.num_platoons, cfg.num_followers, cfg.num_subchannels
        noise = cfg.noise_w
        beta = np.array([c.subchannel for c in commands])
        mode = np.array([c.intra_mode for c in commands])
        power = np.array([c.power_w for c in commands])

        occupancy = np.zeros((p, k))
        occupancy[np.arange(p), beta] = 1.0
        contrib = occupancy * power[:, None] * snapshot.v2i_gain  # (P, K) at the RSU
        # sum over the *other* platoons only; subtracting the own term from a
        # grand total would cancel catastrophically when it dominates
        exclude_own = 1.0 - np.eye(p)
        interference = exclude_own @ contrib

        own_gain = snapshot.v2i_gain[np.arange(p), beta]
        own_interf = interference[np.arange(p), beta]
        v2i_rate = np.log2(1.0 + (1 - mode) * power * own_gain / (own_interf + noise))

        v2v_min = np.zeros(p)
        for j in range(p):
            gains_k = snapshot.v2v_gain[:, j, :, beta[j]]  # (tx, follower)
            tx_power = power * occupancy[:, beta[j]]
            received = tx_power[:, None] * gains_k
            others = received.copy()
            others[j] = 0.0
            interf = others.sum(axis=0)
            per_follower = np.log2(1.0 + mode[j] * received[j] / (interf + noise))
            v2v_min[j] = per_follower.min() if f > 0 else 0.0

        success = (mode == 0) & (v2i_rate >= cfg.min_v2i_rate)
        return StepOutcome(
            v2i_rate=v2i_rate,
            v2v_min_rate=v2v_min,
            interference_w=interference,
            v2i_success=success,
        )

    def _update_aoi(self, outcome: StepOutcome):
        dt = self.config.slot_s
        self.aoi_s = np.where(outcome.v2i_success, dt, self.aoi_s + dt)

    def _update_cam(self, commands: list[ActionCommand], outcome: StepOutcome):
        cfg = self.config
        mode = np.array([c.intra_mode for c in commands], dtype=float)
        delivered_bits = mode * outcome.v2v_min_rate * cfg.subchannel_bandwidth_hz * cfg.slot_s
        self.cam_remaining_bits = np.maximum(0.0, self.cam_remaining_bits - delivered_bits)
        self.cam_delivered = self.cam_delivered | (self.cam_remaining_bits == 0.0)

    # -- observations -------------------------------------------------------------

    def observations(self) -> np.ndarray:
        """(P, 3K+3) array: own V2I gains, weakest-follower V2V gains, the
        previous slot's interference (all dB, affinely scaled), then AoI,
        CAM backlog and time budget as fractions."""
        cfg = self.config
        p = cfg.num_platoons
        snapshot = self.channel_snapshot()

        v2v_own = snapshot.v2v_gain[np.arange(p), np.arange(p)]  # (P, F, K)
        v2v_min = v2v_own.min(axis=1)

        def norm_gain(g):
            g_db = 10.0 * np.log10(np.maximum(g, 1e-30))
            return (g_db - cfg.obs_gain_center_db) / cfg.obs_gain_span_db

        interf_db = 10.0 * np.log10(self.prev_interference_w + cfg.noise_w)
        interf_n = (interf_db - cfg.obs_interference_center_db) / cfg.obs_interference_span_db

        budget_frac = self.time_budget_s / cfg.cam_budget_s
        scalars = np.stack(
            [
                self.aoi_s / cfg.cam_budget_s,
                self.cam_remaining_bits / cfg.cam_payload_bits,
                budget_frac,
            ],
            axis=1,
        )
        return np.concatenate([norm_gain(snapshot.v2i_gain), norm_gain(v2v_min), interf_n, scalars], axis=1)

    # -- main transition ------------------------------------------------------------

    def step(self, raw_actions) -> tuple[np.ndarray, StepOutcome, list[PlatoonState]]:
        """Advance one slot given raw actor outputs, one (K+2)-vector per platoon.

        Decodes the actions, evaluates this slot's rates with the fading the
        agents observed, applies AoI/CAM accounting, moves the platoons, and
        redraws fast fading for the next slot.  Large-scale state is frozen
        until the next reset().
        """
        raw = np.asarray(raw_actions, dtype=float)
        cfg = self.config
        if raw.shape != (cfg.num_platoons, cfg.action_dim):
            raise ActionDecodeError(
                f"expected raw actions of shape ({cfg.num_platoons}, {cfg.action_dim}), got {raw.shape}"
            )
        commands = [decode_action(raw[j], cfg) for j in range(cfg.num_platoons)]

        outcome = self.compute_rates(commands, self.channel_snapshot())
        self._update_aoi(outcome)
        self._update_cam(commands, outcome)
        self.slots_done += 1
        self.prev_interference_w = outcome.interference_w
        self._advance_positions()
        self._redraw_fast_fading()
        return self.observations(), outcome, self.platoon_states
