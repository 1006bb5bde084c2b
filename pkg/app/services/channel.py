"""
RA user placement, multipath channels and uplink synthesis
"""
import math
import logging
from dataclasses import dataclass, replace
from typing import List, Optional, Sequence

import numpy as np

from .sysparams import SystemParams
from .preamble import PreambleFrame

logger = logging.getLogger(__name__)


@dataclass
class UserRealization:
    """One RA-attempting UE"""
    preamble_idx: int
    tau: int
    cir: np.ndarray  # M x L, row per antenna
    distance_km: float = 0.0
    ue_id: Optional[int] = None


@dataclass
class RxUplink:
    """Received PRACH frame y_m[t], M x (N_ZC + 2G)"""
    samples: np.ndarray

    @property
    def num_antennas(self) -> int:
        return self.samples.shape[0]


def delay_from_round_trip(round_trip_us: float, params: SystemParams) -> int:
    """Quantize a round-trip time to channel uses (floor), clamped to [0, G-L]"""
    tau = int(math.floor(round_trip_us * params.prach_bandwidth_mhz))
    return min(max(tau, 0), params.max_round_trip)


def delay_samples(distance_km: float, params: SystemParams) -> int:
    return delay_from_round_trip(distance_km * params.round_trip_us_per_km, params)


def pathloss_amplitude(distance_km: float, params: SystemParams) -> float:
    """Amplitude gain relative to the cell edge; 1 when pathloss is disabled"""
    if not params.pathloss_enabled:
        return 1.0
    d = max(distance_km, params.min_distance_km)
    return (d / params.cell_radius_km) ** (-params.pathloss_exponent / 2.0)


def draw_cir(
    params: SystemParams,
    rng: np.random.Generator,
    distance_km: float = 0.0
) -> np.ndarray:
    """M x L circularly-symmetric Gaussian taps with per-tap variance pdp[l]"""
    shape = (params.num_antennas, params.delay_spread)
    scale = np.sqrt(params.pdp_array / 2.0)[None, :]
    taps = scale * (rng.standard_normal(shape) + 1j * rng.standard_normal(shape))
    return taps * pathloss_amplitude(distance_km, params)


def draw_distance(params: SystemParams, rng: np.random.Generator, size=None):
    """Uniform over the disc area: R * sqrt(U)"""
    return params.cell_radius_km * np.sqrt(rng.random(size))


def draw_users(
    params: SystemParams,
    mean_requests: float,
    rng: np.random.Generator
) -> List[UserRealization]:
    """
    Poisson number of RA requests placed uniformly in the cell, each with a
    uniformly chosen preamble and an independent Rayleigh multipath channel.
    """
    if mean_requests <= 0:
        raise ValueError("mean_requests must be positive")
    count = int(rng.poisson(mean_requests))
    distances = draw_distance(params, rng, count)
    preambles = rng.integers(1, params.num_preambles + 1, size=count)
    users = []
    for idx in range(count):
        d = float(distances[idx])
        users.append(UserRealization(
            preamble_idx=int(preambles[idx]),
            tau=delay_samples(d, params),
            cir=draw_cir(params, rng, d),
            distance_km=d,
            ue_id=idx
        ))
    return users


def redraw_attempt(
    user: UserRealization,
    params: SystemParams,
    rng: np.random.Generator
) -> UserRealization:
    """Next RA attempt of the same UE: fresh preamble and channel, same position"""
    return replace(
        user,
        preamble_idx=int(rng.integers(1, params.num_preambles + 1)),
        cir=draw_cir(params, rng, user.distance_km)
    )


def synthesize_uplink(
    users: Sequence[UserRealization],
    frames: Sequence[PreambleFrame],
    params: SystemParams,
    rng: Optional[np.random.Generator]
) -> RxUplink:
    """
    Received signal at all antennas:
    y_m[t] = sqrt(p_u) * sum_q sum_l h_mq[l] x_q[t - l - tau_q] + n_m[t].

    Args:
        users: Active UEs
        frames: Transmitted frame of each user (same order)
        params: System parameters
        rng: Noise source; may be None when params.noiseless

    Raises:
        ValueError: If a frame does not match its user's preamble shift
    """
    if len(users) != len(frames):
        raise ValueError("one frame per user required")
    M = params.num_antennas
    length = params.n_zc + 2 * params.guard
    y = np.zeros((M, length), dtype=complex)
    amplitude = math.sqrt(params.pu)

    for user, frame in zip(users, frames):
        if frame.shift != params.shift(user.preamble_idx):
            raise ValueError(
                f"frame shift {frame.shift} does not match preamble {user.preamble_idx}"
            )
        if user.cir.shape != (M, params.delay_spread):
            raise ValueError(f"CIR shape {user.cir.shape} != ({M}, {params.delay_spread})")
        x = frame.samples
        for l in range(params.delay_spread):
            d = user.tau + l
            if d >= length:
                continue
            y[:, d:] += amplitude * user.cir[:, l:l + 1] * x[None, :length - d]

    if params.sigma2 > 0:
        if rng is None:
            raise ValueError("a random source is required when noise is enabled")
        std = math.sqrt(params.sigma2 / 2.0)
        y += std * (rng.standard_normal(y.shape) + 1j * rng.standard_normal(y.shape))

    return RxUplink(samples=y)
