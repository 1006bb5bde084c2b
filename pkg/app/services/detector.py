"""
PRACH receiver: correlation, spatial averaging, thresholding and UE grouping
"""
import math
import logging
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from .sysparams import SystemParams
from .preamble import RootSequence, root_zc, build_frame
from .channel import RxUplink, UserRealization, draw_cir, draw_distance, delay_samples, synthesize_uplink
from .analytic import kappa_for_target_pf

logger = logging.getLogger(__name__)

THRESHOLD_MODES = ("bound", "gaussian", "empirical")


class CalibrationError(ValueError):
    """Empirical threshold calibration could not resolve the target"""

    def __init__(self, message: str, achieved_pf: float):
        super().__init__(message)
        self.achieved_pf = achieved_pf


@dataclass
class CorrelationBank:
    """z_m[t] for every antenna m and lag t, M x N_ZC"""
    z: np.ndarray


@dataclass
class CorrelationProfile:
    """Spatially averaged correlation V_k[t] and thresholded P_k[t] over one window"""
    preamble_idx: int
    v: np.ndarray
    p: np.ndarray
    theta0: float


@dataclass(frozen=True)
class DetectedGroup:
    """UE group found on one preamble, identified by its group-common TA"""
    preamble_idx: int
    ta_hat: int
    # last lag of the above-threshold run the group absorbed
    run_end: Optional[int] = field(default=None, compare=False)


@dataclass
class PfPdResult:
    """False-alarm / detection rates from Monte-Carlo trials"""
    pf: float
    pd: float
    pd_exact_ta: float
    trials: int
    false_alarm_windows: int = 0
    detections: int = 0
    exact_ta: int = 0

    @property
    def pe(self) -> float:
        """TA estimation error probability (missed or wrong TA)"""
        return 1.0 - self.pd_exact_ta


def _window(rx: RxUplink, n_zc: int, guard: Optional[int]) -> np.ndarray:
    length = rx.samples.shape[1]
    if guard is None:
        guard = (length - n_zc) // 2
    if length < n_zc + guard:
        raise ValueError(f"received frame has {length} samples, need at least {n_zc + guard}")
    return rx.samples[:, guard:guard + n_zc]


def correlate(rx: RxUplink, root: RootSequence, guard: Optional[int] = None) -> CorrelationBank:
    """
    Drop the CP, then circularly correlate every antenna with the root:
    z_m[t] = (1/sqrt(N)) * sum_t' r_m[t'] * conj(s[(t' - t) mod N]).
    """
    n = root.n_zc
    r = _window(rx, n, guard)
    spectrum = np.fft.fft(r, axis=1) * np.conj(np.fft.fft(root.samples))[None, :]
    return CorrelationBank(z=np.fft.ifft(spectrum, axis=1) / math.sqrt(n))


def correlate_direct(rx: RxUplink, root: RootSequence, guard: Optional[int] = None) -> CorrelationBank:
    """Time-domain evaluation of the circular correlation (reference path)"""
    n = root.n_zc
    r = _window(rx, n, guard)
    z = np.empty(r.shape, dtype=complex)
    for t in range(n):
        z[:, t] = r @ np.conj(np.roll(root.samples, t))
    return CorrelationBank(z=z / math.sqrt(n))


def profile(
    bank: CorrelationBank,
    k: int,
    theta0: float,
    sigma2: float,
    guard: int
) -> CorrelationProfile:
    """
    V_k[t] = mean_m |z_m[t + xi_k]|^2 - sigma^2 over t in [0, G-1];
    P_k[t] keeps V_k[t] where it exceeds theta0.
    """
    if k < 1:
        raise ValueError(f"preamble index must be >= 1, got {k}")
    start = (k - 1) * guard
    if start + guard > bank.z.shape[1]:
        raise ValueError(f"preamble {k} window exceeds the correlation length")
    window = bank.z[:, start:start + guard]
    v = np.mean(np.abs(window) ** 2, axis=0) - sigma2
    p = np.where(v > theta0, v, 0.0)
    return CorrelationProfile(preamble_idx=k, v=v, p=p, theta0=theta0)


def group(prof: CorrelationProfile, L: int) -> List[DetectedGroup]:
    """
    Scan P_k[t]: the first nonzero sample opens a group at ta_hat = t, the scan
    jumps L samples and then skips the rest of the contiguous run. Both loops
    stop at t = G - L.
    """
    p = prof.p
    G = p.size
    last = G - L
    groups = []
    t = 0
    while t <= last:
        if p[t] == 0:
            t += 1
            continue
        start = t
        t += L
        while t <= last and p[t] > 0:
            t += 1
        end = start + int(np.max(np.nonzero(p[start:t])[0]))
        groups.append(DetectedGroup(preamble_idx=prof.preamble_idx, ta_hat=start, run_end=end))
    return groups


def detect_all(
    bank: CorrelationBank,
    params: SystemParams,
    theta0: Optional[float] = None
) -> Tuple[Dict[int, CorrelationProfile], List[DetectedGroup]]:
    """Profiles for every preamble and all detected groups, ordered by (k, ta_hat)"""
    theta = params.theta0 if theta0 is None else theta0
    profiles = {}
    groups = []
    for k in range(1, params.num_preambles + 1):
        prof = profile(bank, k, theta, params.sigma2, params.guard)
        profiles[k] = prof
        groups.extend(group(prof, params.delay_spread))
    return profiles, groups


def noise_only_bank(
    params: SystemParams,
    rng: np.random.Generator,
    root: Optional[RootSequence] = None
) -> CorrelationBank:
    root = root or root_zc(params.n_zc, params.zc_root)
    rx = synthesize_uplink([], [], params, rng)
    return correlate(rx, root, params.guard)


def window_maxima(bank: CorrelationBank, params: SystemParams) -> np.ndarray:
    """max_t V_k[t] for each preamble window k"""
    Q, G = params.num_preambles, params.guard
    power = np.mean(np.abs(bank.z[:, :Q * G]) ** 2, axis=0) - params.sigma2
    return power.reshape(Q, G).max(axis=1)


def calibrate_threshold(
    params: SystemParams,
    target_pf: float,
    mode: str = "gaussian",
    rng: Optional[np.random.Generator] = None,
    trials: int = 2000
) -> float:
    """
    Threshold theta_0 for a target per-window false-alarm probability.

    Args:
        params: System parameters (M, G, sigma^2 used)
        target_pf: Target in (0, 1]
        mode: 'bound', 'gaussian' or 'empirical'
        rng: Random source, required for 'empirical'
        trials: Noise-only frames for 'empirical' (each gives Q windows)

    Returns:
        theta0 (0 when target_pf == 1)

    Raises:
        CalibrationError: If the empirical budget cannot resolve target_pf
    """
    if mode not in THRESHOLD_MODES:
        raise ValueError(f"Unknown threshold mode: {mode}")
    if not 0 < target_pf <= 1:
        raise ValueError(f"target_pf must be in (0, 1], got {target_pf}")
    if target_pf >= 1:
        return 0.0
    scale = params.sigma2 / math.sqrt(params.num_antennas)
    if mode != "empirical":
        return kappa_for_target_pf(target_pf, params.guard, mode) * scale

    if rng is None:
        raise ValueError("empirical calibration needs a random source")
    root = root_zc(params.n_zc, params.zc_root)
    maxima = np.concatenate([window_maxima(noise_only_bank(params, rng, root), params) for _ in range(trials)])
    n = maxima.size
    allowed = int(math.floor(target_pf * n))
    if allowed < 1:
        raise CalibrationError(
            f"{n} noise-only windows cannot resolve P_F={target_pf}; "
            f"smallest measurable non-zero rate is {1.0 / n:.3g}",
            achieved_pf=1.0 / n
        )
    ordered = np.sort(maxima)[::-1]
    theta0 = float(max(ordered[allowed], 0.0))
    achieved = float(np.mean(maxima > theta0))
    logger.info(f"📏 Empirical theta0={theta0:.4g} (kappa={theta0 / scale:.3f}), measured P_F={achieved:.3g}")
    return theta0


def single_user_trial(
    params: SystemParams,
    rng: np.random.Generator,
    root: RootSequence,
    theta0: float
) -> Tuple[bool, bool]:
    """One contention-free attempt: (detected, ta_hat == tau)"""
    distance = float(draw_distance(params, rng))
    k = int(rng.integers(1, params.num_preambles + 1))
    user = UserRealization(
        preamble_idx=k,
        tau=delay_samples(distance, params),
        cir=draw_cir(params, rng, distance),
        distance_km=distance
    )
    frame = build_frame(root, params.shift(k), params.guard)
    bank = correlate(synthesize_uplink([user], [frame], params, rng), root, params.guard)
    groups = group(profile(bank, k, theta0, params.sigma2, params.guard), params.delay_spread)
    return bool(groups), any(g.ta_hat == user.tau for g in groups)


def measure_pf_pd(
    params: SystemParams,
    trials: int,
    rng: np.random.Generator,
    theta0: Optional[float] = None
) -> PfPdResult:
    """
    P_F over noise-only trials (per idle preamble window) and P_D over
    single-user trials, reported both as detection and as exact-TA recovery.
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    theta = params.theta0 if theta0 is None else theta0
    root = root_zc(params.n_zc, params.zc_root)

    false_alarms = 0
    for _ in range(trials):
        if params.sigma2 > 0:
            maxima = window_maxima(noise_only_bank(params, rng, root), params)
            false_alarms += int(np.count_nonzero(maxima > theta))

    detections = exact = 0
    for _ in range(trials):
        detected, hit = single_user_trial(params, rng, root, theta)
        detections += detected
        exact += hit

    windows = trials * params.num_preambles
    result = PfPdResult(
        pf=false_alarms / windows,
        pd=detections / trials,
        pd_exact_ta=exact / trials,
        trials=trials,
        false_alarm_windows=false_alarms,
        detections=detections,
        exact_ta=exact
    )
    logger.debug(f"P_F={result.pf:.4g}, P_D={result.pd:.4g}, exact TA={result.pd_exact_ta:.4g}")
    return result
