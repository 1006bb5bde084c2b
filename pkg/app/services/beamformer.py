"""
Group-common channel estimation and MRT beamforming of the RAR
"""
import math
import logging
from dataclasses import dataclass, field
from typing import List, Optional, Sequence

import numpy as np

from .sysparams import SystemParams
from .channel import UserRealization, pathloss_amplitude
from .detector import CorrelationBank, DetectedGroup

logger = logging.getLogger(__name__)

UPSILON_MODES = ("analytic", "empirical")


@dataclass
class GroupChannelEstimate:
    """LS estimate of a group's common CIR and its N_RS-point frequency response"""
    group: DetectedGroup
    cir_hat: np.ndarray  # M x L
    fd_gain: np.ndarray  # M x N_RS
    upsilon: float


@dataclass
class DownlinkRx:
    """Y_i[n] for each receiving UE (rows) on the RAR resource elements (columns)"""
    y: np.ndarray
    ue_ids: List[Optional[int]] = field(default_factory=list)


@dataclass
class SinrComponents:
    """
    Split of the received RAR symbol into the hardened desired signal and the
    effective noise (hardening deviation, multi-user interference, estimation
    noise, AWGN). Arrays are users x resource elements.
    """
    ds: np.ndarray
    hardening: np.ndarray
    mui: np.ndarray
    estimation_noise: np.ndarray
    awgn: np.ndarray
    conditional_sinr: Optional[np.ndarray] = None

    @property
    def en(self) -> np.ndarray:
        return self.hardening + self.mui + self.estimation_noise + self.awgn

    @property
    def y(self) -> np.ndarray:
        return self.ds + self.en


def cir_to_frequency(cir: np.ndarray, n_rs: int) -> np.ndarray:
    """H[n] = (1/sqrt(N_RS)) * sum_l h[l] exp(-j 2 pi n l / N_RS), along the last axis"""
    return np.fft.fft(cir, n=n_rs, axis=-1) / math.sqrt(n_rs)


def contributing_energy(ta_hat: int, user: UserRealization, params: SystemParams) -> float:
    """
    alpha contribution of one user to a group window starting at ta_hat:
    (1/N_RS) * sum of the user's PDP taps that fall inside [ta_hat, ta_hat + L - 1].
    """
    L = params.delay_spread
    gain = pathloss_amplitude(user.distance_km, params) ** 2
    pdp = params.pdp_array * gain
    taps = [ta_hat + l - user.tau for l in range(L)]
    total = sum(pdp[idx] for idx in taps if 0 <= idx < L)
    return float(total) / params.n_rs


def group_signal_energy(
    group: DetectedGroup,
    users: Optional[Sequence[UserRealization]],
    params: SystemParams
) -> float:
    """
    Sum of alpha contributions of the ground-truth users on the group's
    preamble. Without ground truth a single fully aligned user is assumed.
    """
    if users is None:
        return params.alpha
    return sum(
        contributing_energy(group.ta_hat, u, params)
        for u in users if u.preamble_idx == group.preamble_idx
    )


def upsilon(params: SystemParams, alpha_total: float) -> float:
    """M * (p_u * sum(alpha) + L * sigma^2 / (N_ZC * N_RS))"""
    noise = params.delay_spread * params.sigma2 / (params.n_zc * params.n_rs)
    return params.num_antennas * (params.pu * alpha_total + noise)


def estimate_group_cir(
    bank: CorrelationBank,
    group: DetectedGroup,
    params: SystemParams,
    users: Optional[Sequence[UserRealization]] = None,
    upsilon_mode: str = "analytic"
) -> GroupChannelEstimate:
    """
    Take the first L correlation samples of the group window as the CIR estimate.

    Args:
        bank: Correlation bank of the slot
        group: Detected group (preamble, ta_hat)
        params: System parameters
        users: Ground-truth users, used only for the analytic normalizer
        upsilon_mode: 'analytic' (expected beam energy) or 'empirical'
                      (mean of ||H~[n]||^2 over the N_RS subcarriers)
    """
    L, G = params.delay_spread, params.guard
    if not 0 <= group.ta_hat <= G - L:
        raise ValueError(f"ta_hat={group.ta_hat} outside 0..{G - L}")
    if upsilon_mode not in UPSILON_MODES:
        raise ValueError(f"Unknown upsilon mode: {upsilon_mode}")
    start = params.shift(group.preamble_idx) + group.ta_hat
    cir_hat = bank.z[:, start:start + L] / math.sqrt(params.n_zc)
    fd_gain = cir_to_frequency(cir_hat, params.n_rs)

    if upsilon_mode == "empirical":
        ups = float(np.mean(np.sum(np.abs(fd_gain) ** 2, axis=0)))
    else:
        ups = upsilon(params, group_signal_energy(group, users, params))
    return GroupChannelEstimate(group=group, cir_hat=cir_hat, fd_gain=fd_gain, upsilon=ups)


def precode(
    estimates: Sequence[GroupChannelEstimate],
    symbols: Sequence[np.ndarray],
    params: SystemParams,
    k_t: int,
    subcarriers: Optional[Sequence[int]] = None
) -> np.ndarray:
    """
    X_m[n] = sqrt(P_d) * sum_g conj(H~_{m,g}[n]) * u_g[n] / sqrt(upsilon_g).

    Args:
        estimates: Group estimates sharing one RE set
        symbols: Unit-energy symbols per group, one per resource element
        params: System parameters
        k_t: Total number of groups served in the slot (power split)
        subcarriers: Subcarrier index of each resource element (default 0..N_SC-1)

    Returns:
        M x (number of resource elements) precoded matrix
    """
    if len(estimates) != len(symbols):
        raise ValueError("one symbol vector per group required")
    if k_t < len(estimates):
        raise ValueError(f"K_t={k_t} is smaller than the {len(estimates)} groups precoded here")
    sc = np.arange(params.n_sc) if subcarriers is None else np.asarray(subcarriers, dtype=int)
    X = np.zeros((params.num_antennas, sc.size), dtype=complex)
    for est, u in zip(estimates, symbols):
        u = np.asarray(u)
        if u.shape != sc.shape:
            raise ValueError(f"symbol vector has shape {u.shape}, expected {sc.shape}")
        if est.upsilon <= 0:
            logger.warning(
                f"⚠️ Skipping group (k={est.group.preamble_idx}, ta_hat={est.group.ta_hat}): zero beam normalizer"
            )
            continue
        X += np.conj(est.fd_gain[:, sc]) * u[None, :] / math.sqrt(est.upsilon)
    return math.sqrt(params.downlink_power(k_t)) * X


def receive_downlink(
    X: np.ndarray,
    users: Sequence[UserRealization],
    params: SystemParams,
    rng: Optional[np.random.Generator],
    subcarriers: Optional[Sequence[int]] = None
) -> DownlinkRx:
    """Y_i[n] = sqrt(N_RS) * sum_m H_im[n] X_m[n] + E_i[n] with the true channel"""
    sc = np.arange(X.shape[1]) if subcarriers is None else np.asarray(subcarriers, dtype=int)
    y = np.empty((len(users), sc.size), dtype=complex)
    for row, user in enumerate(users):
        H = cir_to_frequency(user.cir, params.n_rs)[:, sc]
        y[row] = math.sqrt(params.n_rs) * np.sum(H * X, axis=0)
    if params.sigma2 > 0:
        if rng is None:
            raise ValueError("a random source is required when noise is enabled")
        std = math.sqrt(params.sigma2 / 2.0)
        y += std * (rng.standard_normal(y.shape) + 1j * rng.standard_normal(y.shape))
    return DownlinkRx(y=y, ue_ids=[u.ue_id for u in users])


def decompose_worst_case(
    estimate: GroupChannelEstimate,
    users: Sequence[UserRealization],
    symbols: np.ndarray,
    params: SystemParams,
    k_t: int = 1,
    rng: Optional[np.random.Generator] = None,
    subcarriers: Optional[Sequence[int]] = None
) -> SinrComponents:
    """
    Received symbol of every user in a single group whose members share the
    group TA exactly, split into DS and the four effective-noise terms.

    The estimation noise W is what remains of H~ after removing
    sqrt(p_u) * sum_q H_q, so DS + EN reproduces the received symbol exactly.
    """
    sc = np.arange(params.n_sc) if subcarriers is None else np.asarray(subcarriers, dtype=int)
    u = np.asarray(symbols)
    if estimate.upsilon <= 0:
        raise ValueError("zero beam normalizer")
    M = params.num_antennas
    coeff = math.sqrt(params.n_rs * params.downlink_power(k_t) / estimate.upsilon)
    sqrt_pu = math.sqrt(params.pu)

    H = np.stack([cir_to_frequency(user.cir, params.n_rs)[:, sc] for user in users])  # K x M x n
    H_sum = H.sum(axis=0)
    W = estimate.fd_gain[:, sc] - sqrt_pu * H_sum
    noise_var_w = params.delay_spread * params.sigma2 / (params.n_zc * params.n_rs)

    shape = (len(users), sc.size)
    ds = np.empty(shape, dtype=complex)
    hardening = np.empty(shape, dtype=complex)
    mui = np.empty(shape, dtype=complex)
    est_noise = np.empty(shape, dtype=complex)
    conditional = np.empty(shape)
    for i, user in enumerate(users):
        alpha_i = params.alpha * pathloss_amplitude(user.distance_km, params) ** 2
        norm_i = np.sum(np.abs(H[i]) ** 2, axis=0)
        cross = np.sum(H[i] * np.conj(H_sum - H[i]), axis=0)
        ds[i] = coeff * sqrt_pu * M * alpha_i * u
        hardening[i] = coeff * sqrt_pu * (norm_i - M * alpha_i) * u
        mui[i] = coeff * sqrt_pu * cross * u
        est_noise[i] = coeff * np.sum(H[i] * np.conj(W), axis=0) * u
        signal = np.abs(coeff * sqrt_pu * norm_i) ** 2
        disturbance = (
            np.abs(coeff * sqrt_pu * cross) ** 2
            + coeff ** 2 * norm_i * noise_var_w
            + params.sigma2
        )
        with np.errstate(divide="ignore", invalid="ignore"):
            conditional[i] = signal / disturbance

    if params.sigma2 > 0:
        if rng is None:
            raise ValueError("a random source is required when noise is enabled")
        std = math.sqrt(params.sigma2 / 2.0)
        awgn = std * (rng.standard_normal(shape) + 1j * rng.standard_normal(shape))
    else:
        awgn = np.zeros(shape, dtype=complex)

    return SinrComponents(
        ds=ds,
        hardening=hardening,
        mui=mui,
        estimation_noise=est_noise,
        awgn=awgn,
        conditional_sinr=conditional
    )


def measure_instantaneous_sinr(components: SinrComponents) -> np.ndarray:
    """|DS|^2 / |EN|^2 per user and resource element"""
    en_power = np.abs(components.en) ** 2
    with np.errstate(divide="ignore", invalid="ignore"):
        return np.abs(components.ds) ** 2 / en_power


def long_term_sinr(components: Sequence[SinrComponents], user: int = 0) -> float:
    """Ratio of sample means sum|DS|^2 / sum|EN|^2 over draws for one user row"""
    ds_power = sum(float(np.sum(np.abs(c.ds[user]) ** 2)) for c in components)
    en_power = sum(float(np.sum(np.abs(c.en[user]) ** 2)) for c in components)
    return ds_power / en_power if en_power > 0 else float("inf")
