"""Link-level channel model: path loss, correlated shadowing, Rayleigh fading.

Per-link power gain is composed as  h[k] = A * g[k]  where A collects the
large-scale terms (path loss, log-normal shadowing, antenna gains, receiver
noise figure, all in dB) and g[k] is an exponential(1) small-scale power
sample, independent across subchannels.

All functions are pure and take an explicit numpy Generator where they need
randomness, so parallel callers just own separate streams.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np


class LinkKind(Enum):
    V2I = "v2i"
    V2V = "v2v"


@dataclass
class LinkGeometry:
    """Endpoints of one radio link on the 2-D grid (positions in meters)."""

    tx_position: np.ndarray
    rx_position: np.ndarray
    link_kind: LinkKind
    antenna_height_tx_m: float = 1.5
    antenna_height_rx_m: float = 1.5

    def distance_m(self, floor_m: float = 1.0) -> float:
        """3-D separation including the antenna height difference.

        A 1 m floor avoids the log singularity for (nearly) co-located nodes.
        """
        dxy = np.asarray(self.tx_position, float) - np.asarray(self.rx_position, float)
        dh = self.antenna_height_tx_m - self.antenna_height_rx_m
        return max(float(np.sqrt(dxy[0] ** 2 + dxy[1] ** 2 + dh**2)), floor_m)


@dataclass
class LargeScaleState:
    """Frozen large-scale terms of one link (or an array of links).

    Fields may be scalars or broadcastable numpy arrays; ``last_position``
    tracks the transmitter location at the most recent large-scale update so
    the next shadowing sample can be decorrelated by displacement.
    """

    pathloss_db: np.ndarray
    shadowing_db: np.ndarray
    antenna_gain_db: float
    noise_figure_db: float
    last_position: np.ndarray | None = None


@dataclass
class FadingSample:
    """Small-scale power gains, one nonnegative entry per subchannel."""

    power_gain: np.ndarray


def v2i_pathloss_db(distance_m):
    """Path loss of the leader-to-RSU link: 128.1 + 37.6*log10(d_km).

    ``distance_m`` may be a scalar or array; must be strictly positive.
    """
    d = np.asarray(distance_m, dtype=float)
    if np.any(d <= 0.0):
        raise ValueError("v2i_pathloss_db: distance must be > 0 m")
    return 128.1 + 37.6 * np.log10(d / 1000.0)


def v2v_pathloss_db(distance_m, carrier_ghz: float = 2.0):
    """LOS street-canyon path loss below the breakpoint distance.

    22.7*log10(d_m) + 41.0 + 20*log10(fc_GHz / 5.0).  Intra-platoon
    separations (a few tens of meters at 2 GHz) sit well below the
    breakpoint, so only the sub-breakpoint law is modeled.  Swap in a
    different law via PlatoonEnv's ``v2v_pathloss_fn`` hook if needed.
    """
    d = np.asarray(distance_m, dtype=float)
    if np.any(d <= 0.0):
        raise ValueError("v2v_pathloss_db: distance must be > 0 m")
    if carrier_ghz <= 0.0:
        raise ValueError("v2v_pathloss_db: carrier frequency must be > 0 GHz")
    return 22.7 * np.log10(d) + 41.0 + 20.0 * np.log10(carrier_ghz / 5.0)


def sample_shadowing(prev_db, moved_m, decorr_m: float, sigma_db: float, rng: np.random.Generator):
    """Advance a log-normal shadowing process by ``moved_m`` meters.

    new = rho * prev + sqrt(1 - rho^2) * N(0, sigma^2),  rho = exp(-moved/decorr).

    The marginal stays N(0, sigma^2) for any displacement, and the lag-d
    autocorrelation decays as exp(-d/decorr).  ``prev_db``/``moved_m`` may be
    arrays of matching shape.
    """
    if decorr_m <= 0.0:
        raise ValueError("sample_shadowing: decorrelation distance must be > 0 m")
    if sigma_db <= 0.0:
        raise ValueError("sample_shadowing: sigma must be > 0 dB")
    moved = np.asarray(moved_m, dtype=float)
    if np.any(moved < 0.0):
        raise ValueError("sample_shadowing: displacement must be >= 0 m")
    prev = np.asarray(prev_db, dtype=float)
    rho = np.exp(-moved / decorr_m)
    innovation = rng.normal(0.0, sigma_db, size=prev.shape if prev.shape else None)
    out = rho * prev + np.sqrt(1.0 - rho**2) * innovation
    return out if prev.shape else float(out)


def sample_rayleigh_power(rng: np.random.Generator, size=None):
    """|x|^2 of a unit-power complex Gaussian, i.e. exponential with mean 1."""
    re = rng.normal(0.0, np.sqrt(0.5), size=size)
    im = rng.normal(0.0, np.sqrt(0.5), size=size)
    return re**2 + im**2


def compose_gain(large: LargeScaleState, fading: FadingSample):
    """Total linear power gain per subchannel.

    h[k] = 10^((-PL - X + G_ant - NF)/10) * g[k], with PL path loss,
    X shadowing, G_ant the summed antenna gains and NF the receiver noise
    figure, all in dB.  Broadcasts over array-shaped fields.
    """
    g = np.asarray(fading.power_gain, dtype=float)
    if np.any(g < 0.0):
        raise ValueError("compose_gain: fading power gain must be >= 0")
    exponent_db = (
        -np.asarray(large.pathloss_db, dtype=float)
        - np.asarray(large.shadowing_db, dtype=float)
        + large.antenna_gain_db
        - large.noise_figure_db
    )
    return 10.0 ** (exponent_db / 10.0) * g


def dbm_to_watts(dbm: float) -> float:
    return 10.0 ** ((dbm - 30.0) / 10.0)


def watts_to_dbm(watts: float) -> float:
    if watts <= 0.0:
        raise ValueError("watts_to_dbm: power must be > 0 W")
    return 10.0 * np.log10(watts) + 30.0
