"""
Closed-form performance expressions

Long-term average SINR of the group-common MRT downlink, its asymptote under
1/sqrt(M) power scaling, the false-alarm bound of the spatially averaged
detector, and the two dimensioning inverses (downlink power, antenna count).
All expressions are evaluated term by term in double precision so that a
mismatch against the Monte-Carlo harness points at the simulator.
"""
import math
import logging
from dataclasses import dataclass, field
from typing import List, Optional, Sequence

import numpy as np
from scipy import stats

logger = logging.getLogger(__name__)


@dataclass
class Feasibility:
    """Result of a dimensioning query that may have no solution"""
    feasible: bool
    value: Optional[float] = None
    reason: Optional[str] = None
    extras: dict = field(default_factory=dict)


@dataclass(frozen=True)
class SinrParams:
    """
    Inputs of the worst-case long-term SINR.

    gamma is p_u/sigma^2, gamma_d is (N_RS/N_SC)*P_T/sigma^2 and alphas holds
    alpha_gq = (1/N_RS) * sum_l sigma^2_h[l] for each of the K_g users.
    ``i`` is the 1-based index of the user of interest.
    """
    M: float
    gamma: float
    gamma_d: float
    alphas: Sequence[float]
    i: int = 1
    n_rs: int = 72
    n_sc: int = 24
    n_zc: int = 864
    L: int = 6

    @property
    def K_g(self) -> int:
        return len(self.alphas)

    def validate(self) -> None:
        if self.M <= 0 or self.gamma <= 0 or self.gamma_d <= 0:
            raise ValueError("M, gamma and gamma_d must be positive")
        if not self.alphas or any(a <= 0 for a in self.alphas):
            raise ValueError("alphas must be a non-empty list of positive values")
        if not 1 <= self.i <= len(self.alphas):
            raise ValueError(f"user index i={self.i} outside 1..{len(self.alphas)}")
        if min(self.n_rs, self.n_sc, self.n_zc, self.L) <= 0:
            raise ValueError("N_RS, N_SC, N_ZC and L must be positive")


@dataclass(frozen=True)
class ScaledPowerParams:
    """Powers scaled as p_u = sigma^2*E_u/sqrt(M) and P_T = sigma^2*E_T/sqrt(M)"""
    e_u: float
    e_t: float
    epsilon: float = 10 ** (-0.3)

    def gamma(self, M: float) -> float:
        return self.e_u / math.sqrt(M)

    def pt_over_sigma2(self, M: float) -> float:
        return self.e_t / math.sqrt(M)


def db_to_linear(value_db: float) -> float:
    return 10.0 ** (value_db / 10.0)


def linear_to_db(value: float) -> float:
    if value <= 0:
        return float("-inf")
    return 10.0 * math.log10(value)


def uniform_alpha(n_rs: int) -> float:
    """alpha for a unit-energy PDP: (1/N_RS) * 1"""
    return 1.0 / n_rs


def sinr_closed_form(p: SinrParams) -> float:
    """
    Long-term average SINR E|DS|^2 / E|EN|^2 of user i in a single
    worst-case group (common delay, perfect group TA).

    Args:
        p: SinrParams

    Returns:
        Linear SINR
    """
    p.validate()
    alpha_i = p.alphas[p.i - 1]
    ratio_sum = sum(a / alpha_i for a in p.alphas)

    interference = (1.0 / p.M) * (1.0 + 1.0 / (p.n_rs * alpha_i * p.gamma_d)) * ratio_sum
    uplink_noise = p.L / (p.M * p.gamma * p.n_rs * p.n_zc * alpha_i)
    cross_noise = p.L / (p.M * p.gamma * p.gamma_d * p.n_rs ** 2 * p.n_zc * alpha_i ** 2)

    return 1.0 / (interference + uplink_noise + cross_noise)


def sinr_scaled(
    scaled: ScaledPowerParams,
    M: float,
    alphas: Sequence[float],
    i: int = 1,
    n_rs: int = 72,
    n_sc: int = 24,
    n_zc: int = 864,
    L: int = 6
) -> float:
    """SINR with both powers scaled down as 1/sqrt(M)"""
    gamma = scaled.gamma(M)
    gamma_d = (n_rs / n_sc) * scaled.pt_over_sigma2(M)
    return sinr_closed_form(SinrParams(
        M=M, gamma=gamma, gamma_d=gamma_d, alphas=list(alphas), i=i,
        n_rs=n_rs, n_sc=n_sc, n_zc=n_zc, L=L
    ))


def gamma_u(
    scaled: ScaledPowerParams,
    alpha_gi: float,
    n_rs: int = 72,
    n_zc: int = 864,
    L: int = 6,
    n_sc: int = 24
) -> float:
    """
    Large-M limit of the scaled SINR. It does not depend on the group size.
    """
    if alpha_gi <= 0 or scaled.e_u <= 0 or scaled.e_t <= 0:
        raise ValueError("E_u, E_T and alpha must be positive")
    return n_rs ** 3 * n_zc * scaled.e_u * scaled.e_t * alpha_gi ** 2 / (L * n_sc)


def pf_bound(kappa: float, G: int) -> float:
    """
    Chebyshev-type upper bound on the per-window false-alarm probability
    for threshold theta_0 = kappa*sigma^2/sqrt(M).

    Raises:
        ValueError: If kappa <= 1 (the bound is vacuous)
    """
    if kappa <= 1:
        raise ValueError(f"pf_bound needs kappa > 1, got {kappa}")
    if G < 1:
        raise ValueError("G must be >= 1")
    return 1.0 - (1.0 - 1.0 / kappa ** 2) ** G


def pf_gaussian(kappa: float, G: int) -> float:
    """False-alarm probability when V/(sigma^2/sqrt(M)) is taken as standard normal"""
    return float(-np.expm1(G * np.log1p(-stats.norm.sf(kappa))))


def per_sample_tail(target_pf: float, G: int) -> float:
    """Per-sample exceedance probability giving ``target_pf`` over G samples"""
    return float(-np.expm1(np.log1p(-target_pf) / G))


def kappa_for_target_pf(target_pf: float, G: int, mode: str = "gaussian") -> float:
    """
    Invert the window false-alarm law for kappa.

    Args:
        target_pf: Target probability in (0, 1]
        G: Window length
        mode: 'bound' (Chebyshev) or 'gaussian' (normal tail)

    Returns:
        kappa; 0 when target_pf == 1 (every sample passes)
    """
    if not 0 < target_pf <= 1:
        raise ValueError(f"target_pf must be in (0, 1], got {target_pf}")
    if target_pf >= 1:
        return 0.0
    q = per_sample_tail(target_pf, G)
    if mode == "bound":
        return 1.0 / math.sqrt(q)
    if mode == "gaussian":
        return float(max(stats.norm.isf(q), 0.0))
    raise ValueError(f"Unknown closed-form threshold mode: {mode}")


def required_pt(epsilon: float, p: SinrParams) -> Feasibility:
    """
    Downlink power gamma_d needed for user i to reach ``epsilon``.

    ``p.gamma_d`` is ignored. The returned Feasibility carries gamma_d as
    ``value`` and P_T/sigma^2 in ``extras['pt_over_sigma2']``.
    """
    if epsilon <= 0:
        raise ValueError("target SINR must be positive")
    SinrParams(**{**p.__dict__, "gamma_d": 1.0}).validate()
    alpha_i = p.alphas[p.i - 1]
    ratio_sum = sum(a / alpha_i for a in p.alphas)

    denominator = (
        1.0 / epsilon
        - ratio_sum / p.M
        - p.L / (p.M * p.gamma * p.n_rs * p.n_zc * alpha_i)
    )
    numerator = (
        ratio_sum / (p.M * p.n_rs * alpha_i)
        + p.L / (p.M * p.gamma * p.n_rs ** 2 * p.n_zc * alpha_i ** 2)
    )
    if denominator <= 0:
        return Feasibility(
            feasible=False,
            reason=(
                f"target SINR {linear_to_db(epsilon):.2f} dB is above the "
                f"infinite-downlink-power ceiling {linear_to_db(1.0 / (1.0 / epsilon - denominator)):.2f} dB"
            )
        )
    gamma_d = numerator / denominator
    return Feasibility(
        feasible=True,
        value=gamma_d,
        extras={"pt_over_sigma2": gamma_d * p.n_sc / p.n_rs}
    )


@dataclass
class MinAntennas:
    """Minimum antenna count: real root and the integer to deploy"""
    feasible: bool
    m_star: Optional[float] = None
    m_ceil: Optional[int] = None
    coefficients: dict = field(default_factory=dict)
    reason: Optional[str] = None


def min_antennas(
    scaled: ScaledPowerParams,
    alphas: Sequence[float],
    i: int = 1,
    n_rs: int = 72,
    n_sc: int = 24,
    n_zc: int = 864,
    L: int = 6
) -> MinAntennas:
    """
    Smallest M for which the 1/sqrt(M)-scaled SINR reaches ``scaled.epsilon``.

    With x = sqrt(M) the scaled inverse SINR is a1/x^2 + (a2 + a3)/x + 1/gamma_u,
    so M* is the square of the positive root of the resulting quadratic.
    """
    if not alphas:
        raise ValueError("alphas must not be empty")
    alpha_i = alphas[i - 1]
    ratio_sum = sum(a / alpha_i for a in alphas)
    a1 = ratio_sum
    a2 = (n_sc / (scaled.e_t * alpha_i * n_rs ** 2)) * ratio_sum
    a3 = L / (n_zc * n_rs * alpha_i * scaled.e_u)
    limit = gamma_u(scaled, alpha_i, n_rs=n_rs, n_zc=n_zc, L=L, n_sc=n_sc)
    coefficients = {"a1": a1, "a2": a2, "a3": a3, "gamma_u": limit}

    slack = 1.0 / scaled.epsilon - 1.0 / limit
    if slack <= 0:
        return MinAntennas(
            feasible=False,
            coefficients=coefficients,
            reason=(
                f"target {linear_to_db(scaled.epsilon):.2f} dB is not below the "
                f"asymptotic SINR {linear_to_db(limit):.2f} dB"
            )
        )
    b = a2 + a3
    root = (b + math.sqrt(b * b + 4.0 * a1 * slack)) / (2.0 * slack)
    m_star = root * root
    logger.debug(f"M* = {m_star:.4f} (K_g={len(alphas)}, coefficients={coefficients})")
    return MinAntennas(
        feasible=True,
        m_star=m_star,
        m_ceil=int(math.ceil(m_star - 1e-12)),
        coefficients=coefficients
    )


def closed_form_table(
    scaled: ScaledPowerParams,
    antennas: Sequence[float],
    group_sizes: Sequence[int],
    alpha: float,
    n_rs: int = 72,
    n_sc: int = 24,
    n_zc: int = 864,
    L: int = 6
) -> List[dict]:
    """Scaled SINR (dB) over a grid of M and K_g with equal alphas"""
    rows = []
    for K_g in group_sizes:
        for M in antennas:
            sinr = sinr_scaled(scaled, M, [alpha] * K_g, 1, n_rs, n_sc, n_zc, L)
            rows.append({"m": M, "k_g": K_g, "sinr": sinr, "sinr_db": linear_to_db(sinr)})
    return rows
