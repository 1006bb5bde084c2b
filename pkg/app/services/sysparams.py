"""
Static system parameters

``derive`` turns a validated profile (or a raw parameter map) into an immutable
SystemParams holding every protocol constant plus the derived quantities
(number of preambles, permissible shifts, RAR OFDM symbols, threshold scale).
"""
import math
import logging
import dataclasses
from dataclasses import dataclass
from typing import Any, Dict, Mapping, Tuple, Union

import numpy as np

from ..schemas.models import ConfigError, SimulationProfile
from ..schemas.loader import build_profile
from .analytic import kappa_for_target_pf

logger = logging.getLogger(__name__)

PDP_TOLERANCE = 1e-12


@dataclass(frozen=True)
class SystemParams:
    """Every static parameter of the system; shared read-only across trials"""
    n_zc: int
    zc_root: int
    guard: int
    delay_spread: int
    num_preambles: int
    permissible_shifts: Tuple[int, ...]
    num_antennas: int
    pu_over_sigma2: float
    pt_over_sigma2: float
    noise_power: float
    n_rs: int
    n_sc: int
    n_slot: int
    prach_bandwidth_mhz: float
    cell_radius_km: float
    pdp: Tuple[float, ...]
    kappa: float
    max_repeats: int
    round_trip_us_per_km: float = 6.7
    num_ofdm_symbols: int = 14
    rar_bits: int = 24
    num_resource_blocks: int = 15
    pathloss_enabled: bool = False
    pathloss_exponent: float = 3.7
    min_distance_km: float = 0.035
    target_pf: float = 1e-3
    threshold_mode: str = "gaussian"
    noiseless: bool = False

    @property
    def sigma2(self) -> float:
        """Noise variance actually injected (0 when noiseless)"""
        return 0.0 if self.noiseless else self.noise_power

    @property
    def theta0(self) -> float:
        """Detection threshold kappa*sigma^2/sqrt(M)"""
        return self.kappa * self.sigma2 / math.sqrt(self.num_antennas)

    @property
    def pu(self) -> float:
        return self.pu_over_sigma2 * self.noise_power

    @property
    def pt(self) -> float:
        return self.pt_over_sigma2 * self.noise_power

    @property
    def max_round_trip(self) -> int:
        return self.guard - self.delay_spread

    @property
    def pdp_array(self) -> np.ndarray:
        return np.asarray(self.pdp, dtype=float)

    @property
    def alpha(self) -> float:
        """(1/N_RS) * total PDP energy of one user"""
        return float(np.sum(self.pdp)) / self.n_rs

    def shift(self, k: int) -> int:
        """Cyclic shift xi_k of the 1-based preamble index k"""
        if not 1 <= k <= self.num_preambles:
            raise ValueError(f"preamble index {k} outside 1..{self.num_preambles}")
        return self.permissible_shifts[k - 1]

    def downlink_power(self, k_t: int) -> float:
        """P_d = P_T * N_RS / (N_SC * K_t)"""
        return self.pt * self.n_rs / (self.n_sc * max(k_t, 1))

    def evolve(self, **changes: Any) -> "SystemParams":
        """Copy with changed antenna count or powers (derived fields don't depend on them)"""
        allowed = {"num_antennas", "pu_over_sigma2", "pt_over_sigma2", "kappa", "noise_power", "noiseless"}
        unknown = set(changes) - allowed
        if unknown:
            raise ConfigError(f"Cannot evolve derived/static fields: {sorted(unknown)}")
        for name, value in changes.items():
            if name == "noiseless":
                continue
            if name == "kappa":
                if value < 0:
                    raise ConfigError("kappa must be nonnegative")
            elif value <= 0:
                raise ConfigError(f"{name} must be positive")
        return dataclasses.replace(self, **changes)


def build_pdp(profile: SimulationProfile) -> Tuple[float, ...]:
    """Power delay profile with exactly L taps"""
    L = profile.prach.delay_spread
    channel = profile.channel
    if channel.pdp is not None:
        pdp = np.asarray(channel.pdp, dtype=float)
        if pdp.size != L:
            raise ConfigError(f"channel.pdp has {pdp.size} entries, delay_spread L={L}")
    elif channel.pdp_profile == "exponential":
        pdp = np.exp(-np.arange(L) / channel.pdp_decay)
    else:
        pdp = np.ones(L)

    if np.any(pdp < 0) or not np.all(np.isfinite(pdp)) or pdp.sum() <= 0:
        raise ConfigError("channel.pdp must be finite, nonnegative and not all zero")
    if channel.normalize_pdp:
        pdp = pdp / pdp.sum()
        if abs(pdp.sum() - 1.0) > PDP_TOLERANCE:
            raise ConfigError("channel.pdp could not be normalized to unit energy")
    return tuple(float(v) for v in pdp)


def derive(raw_config: Union[Mapping[str, Any], SimulationProfile, None]) -> SystemParams:
    """
    Validate a parameter map and compute the derived quantities.

    Args:
        raw_config: Raw nested parameter map or an already validated profile

    Returns:
        SystemParams

    Raises:
        ConfigError: On any invalid or inconsistent parameter
    """
    if isinstance(raw_config, SimulationProfile):
        profile = raw_config
    else:
        profile = build_profile(dict(raw_config or {}))

    prach, downlink = profile.prach, profile.downlink
    n_zc, u, G, L = prach.n_zc, prach.zc_root, prach.guard, prach.delay_spread

    errors = []
    if math.gcd(u, n_zc) != 1:
        errors.append(f"zc_root u={u} is not coprime with n_zc={n_zc}")
    if L >= G:
        errors.append(f"delay_spread L={L} must be smaller than guard G={G}")
    if G > n_zc:
        errors.append(f"guard G={G} exceeds n_zc={n_zc}")
    if downlink.n_sc < downlink.rar_bits:
        errors.append(
            f"n_sc={downlink.n_sc} cannot carry a {downlink.rar_bits}-bit RAR (one bit per subcarrier)"
        )
    if downlink.n_sc > downlink.n_rs:
        errors.append(f"n_sc={downlink.n_sc} exceeds n_rs={downlink.n_rs}")
    if errors:
        raise ConfigError("; ".join(errors))

    Q = n_zc // G
    shifts = tuple(k * G for k in range(Q))
    n_slot = -(-downlink.n_sc * Q // downlink.n_rs)
    if 2 * n_slot > downlink.num_ofdm_symbols:
        raise ConfigError(
            f"RAR grid overflow: two hop copies need {2 * n_slot} OFDM symbols, "
            f"only {downlink.num_ofdm_symbols} available"
        )

    pdp = build_pdp(profile)

    detection = profile.detection
    if detection.kappa is not None:
        kappa = float(detection.kappa)
    else:
        kappa = kappa_for_target_pf(detection.target_pf, G, detection.threshold_mode)
        logger.debug(
            f"kappa={kappa:.4f} from {detection.threshold_mode} calibration at P_F={detection.target_pf}"
        )

    return SystemParams(
        n_zc=n_zc,
        zc_root=u,
        guard=G,
        delay_spread=L,
        num_preambles=Q,
        permissible_shifts=shifts,
        num_antennas=profile.array.num_antennas,
        pu_over_sigma2=profile.power.linear_pu(),
        pt_over_sigma2=profile.power.linear_pt(),
        noise_power=profile.power.noise_power,
        n_rs=downlink.n_rs,
        n_sc=downlink.n_sc,
        n_slot=n_slot,
        prach_bandwidth_mhz=prach.prach_bandwidth_mhz,
        cell_radius_km=prach.cell_radius_km,
        pdp=pdp,
        kappa=kappa,
        max_repeats=profile.procedure.max_repeats,
        round_trip_us_per_km=prach.round_trip_us_per_km,
        num_ofdm_symbols=downlink.num_ofdm_symbols,
        rar_bits=downlink.rar_bits,
        num_resource_blocks=profile.procedure.num_resource_blocks,
        pathloss_enabled=profile.channel.pathloss_enabled,
        pathloss_exponent=profile.channel.pathloss_exponent,
        min_distance_km=profile.channel.min_distance_km,
        target_pf=detection.target_pf,
        threshold_mode=detection.threshold_mode,
        noiseless=profile.power.noiseless,
    )


def describe(params: SystemParams) -> Dict[str, Any]:
    """Flat dict of params plus derived quantities, for JSON output"""
    data = dataclasses.asdict(params)
    data["permissible_shifts"] = list(params.permissible_shifts)
    data["pdp"] = list(params.pdp)
    data["theta0"] = params.theta0
    data["max_round_trip"] = params.max_round_trip
    data["alpha"] = params.alpha
    return data
