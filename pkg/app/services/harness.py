"""
Monte-Carlo campaigns over the full random-access procedure

One RA slot runs preamble transmission, detection and grouping, group channel
estimation, RAR beamforming and UE-side decoding. Campaigns chain slots into
frames with a backlog of retrying UEs; every campaign is split into fixed
replications whose random sources derive from (master_seed, replication, frame),
so results do not depend on the number of worker processes.
"""
import math
import logging
from collections import Counter
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np
from scipy import stats

from .sysparams import SystemParams
from .preamble import RootSequence, PreambleFrame, root_zc, build_frame, frame_bank
from .channel import UserRealization, draw_cir, draw_users, redraw_attempt, synthesize_uplink
from .detector import DetectedGroup, PfPdResult, correlate, detect_all, profile, group, measure_pf_pd, single_user_trial
from .beamformer import (
    GroupChannelEstimate,
    cir_to_frequency,
    contributing_energy,
    decompose_worst_case,
    estimate_group_cir,
    measure_instantaneous_sinr,
    precode,
    receive_downlink,
)
from .rarlink import TA_MAX, DecodeStatus, RarPayload, bpsk, decode, encode, map_to_grid
from .analytic import SinrParams, kappa_for_target_pf, linear_to_db, db_to_linear, pf_bound, sinr_closed_form
from .runner import WorkerPoolManager, chunk_sizes, resolve_seed, trial_rng

logger = logging.getLogger(__name__)

CONFIDENCE = 0.95
OVERLAP_DELAYS = (12, 15, 20, 27, 40)
POWER_LAWS = ("constant", "inv_sqrt_m", "inv_m")


def _z_value(confidence: float = CONFIDENCE) -> float:
    return float(stats.norm.ppf(0.5 + confidence / 2.0))


@dataclass
class UeOutcome:
    """One UE's attempt in one slot"""
    ue_id: Optional[int]
    preamble_idx: int
    tau: int
    ta_hat: Optional[int] = None
    ta_error: Optional[int] = None
    status: DecodeStatus = DecodeStatus.NO_RAR
    sinr: Optional[float] = None
    # whether any of the UE's taps fall inside its group's estimation window
    contributes: Optional[bool] = None

    @property
    def success(self) -> bool:
        return self.status == DecodeStatus.SUCCESS


@dataclass
class SlotOutcome:
    """Per-UE records of one RA slot plus detector bookkeeping"""
    ues: List[UeOutcome] = field(default_factory=list)
    groups: List[DetectedGroup] = field(default_factory=list)
    idle_preambles: int = 0
    false_alarm_preambles: int = 0

    @property
    def k_t(self) -> int:
        return len(self.groups)

    @property
    def granted(self) -> List[Optional[int]]:
        return [ue.ue_id for ue in self.ues if ue.success]


@dataclass
class CampaignTally:
    """Additive counters of one replication; aggregation is order independent"""
    repeats: List[int] = field(default_factory=list)
    failures: int = 0
    censored: int = 0
    attempts: int = 0
    detected_attempts: int = 0
    exact_ta_attempts: int = 0
    idle_windows: int = 0
    false_alarm_windows: int = 0
    ta_errors: Counter = field(default_factory=Counter)
    sinr_samples: List[float] = field(default_factory=list)
    k_t_counts: Counter = field(default_factory=Counter)
    noncontributing_attempts: int = 0

    def merge(self, other: "CampaignTally") -> "CampaignTally":
        self.repeats.extend(other.repeats)
        self.failures += other.failures
        self.censored += other.censored
        self.attempts += other.attempts
        self.detected_attempts += other.detected_attempts
        self.exact_ta_attempts += other.exact_ta_attempts
        self.idle_windows += other.idle_windows
        self.false_alarm_windows += other.false_alarm_windows
        self.ta_errors.update(other.ta_errors)
        self.sinr_samples.extend(other.sinr_samples)
        self.k_t_counts.update(other.k_t_counts)
        self.noncontributing_attempts += other.noncontributing_attempts
        return self


@dataclass
class CampaignMetrics:
    """Aggregated campaign results with 95% normal-approximation half-widths"""
    avg_repeat_attempts: float
    ra_failure_prob: float
    pf: float
    pd: float
    pd_exact_ta: float
    finished_ues: int
    failed_ues: int
    censored_ues: int
    ci_halfwidth: float
    fail_ci_halfwidth: float
    ta_error_histogram: Dict[int, int] = field(default_factory=dict)
    sinr_samples: List[float] = field(default_factory=list)
    mean_k_t: float = 0.0
    k_t_histogram: Dict[int, int] = field(default_factory=dict)
    noncontributing_fraction: float = 0.0

    @classmethod
    def from_tally(cls, tally: CampaignTally, max_repeats: int) -> "CampaignMetrics":
        z = _z_value()
        # failed UEs count as max_repeats + 1 repeats, a lower bound on their true count
        counted = np.array(tally.repeats + [max_repeats + 1] * tally.failures, dtype=float)
        finished = counted.size
        if finished:
            avg = float(counted.mean())
            spread = float(counted.std(ddof=1)) if finished > 1 else 0.0
            fail = tally.failures / finished
            ci = z * spread / math.sqrt(finished)
            fail_ci = z * math.sqrt(fail * (1.0 - fail) / finished)
        else:
            avg = fail = ci = fail_ci = 0.0
        slots = sum(tally.k_t_counts.values())
        mean_k_t = sum(k * n for k, n in tally.k_t_counts.items()) / slots if slots else 0.0
        return cls(
            avg_repeat_attempts=avg,
            ra_failure_prob=fail,
            pf=tally.false_alarm_windows / tally.idle_windows if tally.idle_windows else 0.0,
            pd=tally.detected_attempts / tally.attempts if tally.attempts else 0.0,
            pd_exact_ta=tally.exact_ta_attempts / tally.attempts if tally.attempts else 0.0,
            finished_ues=finished,
            failed_ues=tally.failures,
            censored_ues=tally.censored,
            ci_halfwidth=ci,
            fail_ci_halfwidth=fail_ci,
            ta_error_histogram=dict(sorted(tally.ta_errors.items())),
            sinr_samples=list(tally.sinr_samples),
            mean_k_t=mean_k_t,
            k_t_histogram=dict(sorted(tally.k_t_counts.items())),
            noncontributing_fraction=(
                tally.noncontributing_attempts / tally.detected_attempts if tally.detected_attempts else 0.0
            ),
        )


class SlotContext:
    """Root sequence and frames shared by every slot of a campaign"""

    def __init__(self, params: SystemParams):
        self.params = params
        self.root: RootSequence = root_zc(params.n_zc, params.zc_root)
        by_shift = frame_bank(self.root, params.permissible_shifts, params.guard)
        self.frames: Dict[int, PreambleFrame] = {
            k: by_shift[params.shift(k)] for k in range(1, params.num_preambles + 1)
        }
        self.placements = {k: map_to_grid(k, params) for k in range(1, params.num_preambles + 1)}


def _matched_group(user: UserRealization, groups: Sequence[DetectedGroup], L: int) -> Optional[DetectedGroup]:
    """
    Group whose above-threshold run overlaps the user's taps [tau, tau + L - 1].
    The group holding tau wins; otherwise the nearest later one (faded first tap).
    A group without a recorded run spans its estimation window.
    """
    def last_lag(g: DetectedGroup) -> int:
        return g.run_end if g.run_end is not None else g.ta_hat + L - 1

    candidates = [g for g in groups if g.ta_hat <= user.tau + L - 1 and last_lag(g) >= user.tau]
    if not candidates:
        return None
    return min(candidates, key=lambda g: (g.ta_hat > user.tau, abs(g.ta_hat - user.tau)))


def _measured_sinr(y: np.ndarray, symbols: np.ndarray) -> Optional[float]:
    """|mean(Y u*)|^2 / var(Y u*) over the UE's resource elements"""
    z = y * np.conj(symbols)
    spread = float(np.var(z))
    if spread <= 0:
        return None
    return float(np.abs(np.mean(z)) ** 2 / spread)


def simulate_slot(
    params: SystemParams,
    active_ues: Sequence[UserRealization],
    rng: np.random.Generator,
    context: Optional[SlotContext] = None,
    upsilon_mode: str = "analytic"
) -> SlotOutcome:
    """
    Run one RA slot end to end. A UE's attempt succeeds iff it decodes a
    CRC-valid RAR on its own preamble's resource elements.
    """
    ctx = context or SlotContext(params)
    L = params.delay_spread
    users = list(active_ues)
    ta_limit = min(params.guard - L, TA_MAX)

    rx = synthesize_uplink(users, [ctx.frames[u.preamble_idx] for u in users], params, rng)
    bank = correlate(rx, ctx.root, params.guard)
    _, groups = detect_all(bank, params)
    k_t = len(groups)

    users_by_k: Dict[int, List[UserRealization]] = {}
    for u in users:
        users_by_k.setdefault(u.preamble_idx, []).append(u)
    groups_by_k: Dict[int, List[DetectedGroup]] = {}
    for g in groups:
        groups_by_k.setdefault(g.preamble_idx, []).append(g)

    outcome = SlotOutcome(groups=list(groups))
    idle = [k for k in range(1, params.num_preambles + 1) if k not in users_by_k]
    outcome.idle_preambles = len(idle)
    outcome.false_alarm_preambles = sum(1 for k in idle if k in groups_by_k)

    rar_index = 0
    for k in sorted(set(users_by_k) | set(groups_by_k)):
        k_users = users_by_k.get(k, [])
        k_groups = groups_by_k.get(k, [])
        subcarriers = ctx.placements[k].subcarriers
        estimates: List[GroupChannelEstimate] = []
        symbol_sets = []
        for g in k_groups:
            ta = g.ta_hat
            if ta > ta_limit:
                logger.warning(f"⚠️ ta_hat={ta} exceeds the TA range, clamped to {ta_limit}")
                ta = ta_limit
            payload = RarPayload(ta=ta, rb_start=rar_index % params.num_resource_blocks, num_rb=1)
            rar_index += 1
            estimates.append(estimate_group_cir(bank, g, params, k_users, upsilon_mode))
            symbol_sets.append(np.tile(bpsk(encode(payload).bits), 2))

        if not k_users:
            continue
        if estimates:
            X = precode(estimates, symbol_sets, params, k_t, subcarriers)
        else:
            X = np.zeros((params.num_antennas, subcarriers.size), dtype=complex)
        received = receive_downlink(X, k_users, params, rng, subcarriers)

        for row, u in enumerate(k_users):
            matched = _matched_group(u, k_groups, L)
            result = decode(received.y[row])
            sinr = None
            if matched is not None:
                own = symbol_sets[k_groups.index(matched)]
                sinr = _measured_sinr(received.y[row], own)
            outcome.ues.append(UeOutcome(
                ue_id=u.ue_id,
                preamble_idx=k,
                tau=u.tau,
                ta_hat=matched.ta_hat if matched else None,
                ta_error=(matched.ta_hat - u.tau) if matched else None,
                status=result.status,
                sinr=sinr,
                contributes=(contributing_energy(matched.ta_hat, u, params) > 0) if matched else None,
            ))
    return outcome


SlotSimulator = Callable[..., SlotOutcome]


def run_replication(
    params: SystemParams,
    mean_requests: float,
    num_frames: int,
    master_seed: int,
    replication: int,
    upsilon_mode: str = "analytic",
    slot_simulator: Optional[SlotSimulator] = None
) -> CampaignTally:
    """Frames of one replication with a persistent backlog of retrying UEs"""
    simulate = slot_simulator or simulate_slot
    ctx = SlotContext(params)
    tally = CampaignTally()
    backlog: List[Tuple[UserRealization, int]] = []
    next_id = 0

    for frame in range(num_frames):
        rng = trial_rng(master_seed, replication, frame)
        retrying = [(redraw_attempt(u, params, rng), fails) for u, fails in backlog]
        arrivals = draw_users(params, mean_requests, rng)
        for u in arrivals:
            u.ue_id = next_id
            next_id += 1
        active = retrying + [(u, 0) for u in arrivals]
        failures_by_id = {u.ue_id: fails for u, fails in active}
        users = [u for u, _ in active]

        outcome = simulate(params, users, rng, context=ctx, upsilon_mode=upsilon_mode)
        tally.idle_windows += outcome.idle_preambles
        tally.false_alarm_windows += outcome.false_alarm_preambles
        tally.k_t_counts[outcome.k_t] += 1

        by_id = {o.ue_id: o for o in outcome.ues}
        backlog = []
        for u in users:
            result = by_id.get(u.ue_id)
            tally.attempts += 1
            if result is not None and result.ta_hat is not None:
                tally.detected_attempts += 1
                tally.ta_errors[result.ta_error] += 1
                if result.ta_error == 0:
                    tally.exact_ta_attempts += 1
                if result.contributes is False:
                    tally.noncontributing_attempts += 1
            if result is not None and result.sinr is not None:
                tally.sinr_samples.append(result.sinr)
            fails = failures_by_id[u.ue_id]
            if result is not None and result.success:
                tally.repeats.append(fails)
            elif fails + 1 > params.max_repeats:
                tally.failures += 1
            else:
                backlog.append((u, fails + 1))
        logger.debug(f"rep {replication} frame {frame}: {len(users)} active, {len(outcome.granted)} granted")

    tally.censored = len(backlog)
    return tally


def _replication_unit(task) -> CampaignTally:
    params, mean_requests, num_frames, seed, rep, upsilon_mode = task
    return run_replication(params, mean_requests, num_frames, seed, rep, upsilon_mode)


def run_campaign(
    params: SystemParams,
    mean_requests: float,
    num_frames: int,
    rng=None,
    replications: int = 1,
    workers: Optional[int] = None,
    upsilon_mode: str = "analytic",
    slot_simulator: Optional[SlotSimulator] = None
) -> CampaignMetrics:
    """
    Repeat-attempt and failure statistics over ``replications`` x ``num_frames`` frames.

    Args:
        params: System parameters
        mean_requests: Mean new RA requests per frame
        num_frames: Frames per replication
        rng: Master seed (int), Generator, or None for settings.MASTER_SEED
        replications: Independent replications (fixed work units)
        workers: Worker processes
        upsilon_mode: Beam normalizer source
        slot_simulator: Replacement slot function (runs inline)
    """
    if num_frames < 1:
        raise ValueError("num_frames must be >= 1")
    seed = resolve_seed(rng)
    logger.info(
        f"📊 Campaign: M={params.num_antennas}, load={mean_requests}, "
        f"p_u/s2={linear_to_db(params.pu_over_sigma2):.2f} dB, "
        f"P_T/s2={linear_to_db(params.pt_over_sigma2):.2f} dB, "
        f"{replications}x{num_frames} frames, seed={seed}"
    )
    if slot_simulator is not None:
        tallies = [
            run_replication(params, mean_requests, num_frames, seed, rep, upsilon_mode, slot_simulator)
            for rep in range(replications)
        ]
    else:
        tasks = [(params, mean_requests, num_frames, seed, rep, upsilon_mode) for rep in range(replications)]
        with WorkerPoolManager(workers) as pool:
            tallies = pool.map(_replication_unit, tasks)

    total = CampaignTally()
    for tally in tallies:
        total.merge(tally)
    metrics = CampaignMetrics.from_tally(total, params.max_repeats)
    logger.info(
        f"✅ Campaign done: avg repeats={metrics.avg_repeat_attempts:.3f} "
        f"(+/-{metrics.ci_halfwidth:.3f}), failure={metrics.ra_failure_prob:.4f}"
    )
    return metrics


@dataclass
class MinPowerResult:
    """Outcome of the minimum uplink power search"""
    feasible: bool
    pu_db: Optional[float]
    pe: Optional[float]
    kappa: float
    evaluations: List[Tuple[float, float]] = field(default_factory=list)
    reason: Optional[str] = None


def _pe_unit(task) -> int:
    params, theta0, seed, chunk, size = task
    rng = trial_rng(seed, chunk)
    root = root_zc(params.n_zc, params.zc_root)
    errors = 0
    for _ in range(size):
        _, exact = single_user_trial(params, rng, root, theta0)
        errors += not exact
    return errors


def measure_pe(
    params: SystemParams,
    trials: int,
    seed: int,
    pool: WorkerPoolManager,
    chunk: int = 500
) -> float:
    """TA estimation error rate; chunk seeds are fixed so every power level sees the same random numbers"""
    sizes = chunk_sizes(trials, chunk)
    tasks = [(params, params.theta0, seed, idx, size) for idx, size in enumerate(sizes)]
    return sum(pool.map(_pe_unit, tasks)) / trials


def find_min_power(
    params: SystemParams,
    target_pe: float = 1e-2,
    target_pf: float = 1e-3,
    rng=None,
    trials: int = 10000,
    low_db: float = -40.0,
    high_db: float = 10.0,
    resolution_db: float = 0.1,
    workers: Optional[int] = None
) -> MinPowerResult:
    """
    Bisection in dB for the smallest p_u/sigma^2 whose contention-free TA
    error rate is at most ``target_pe``, with the threshold set for ``target_pf``.
    """
    if not 0 < target_pe < 1:
        raise ValueError("target_pe must be in (0, 1)")
    seed = resolve_seed(rng)
    kappa = kappa_for_target_pf(target_pf, params.guard, "gaussian")
    base = params.evolve(kappa=kappa)
    evaluations: List[Tuple[float, float]] = []

    with WorkerPoolManager(workers) as pool:
        def measure_at(db: float) -> float:
            pe = measure_pe(base.evolve(pu_over_sigma2=db_to_linear(db)), trials, seed, pool)
            evaluations.append((round(db, 6), pe))
            logger.info(f"🔎 M={params.num_antennas}: p_u/s2={db:.2f} dB -> P_e={pe:.4g}")
            return pe

        pe_high = measure_at(high_db)
        if pe_high > target_pe:
            return MinPowerResult(
                feasible=False, pu_db=None, pe=pe_high, kappa=kappa, evaluations=evaluations,
                reason=f"P_e={pe_high:.3g} at the top of the search range ({high_db} dB)"
            )
        pe_low = measure_at(low_db)
        if pe_low <= target_pe:
            return MinPowerResult(
                feasible=False, pu_db=low_db, pe=pe_low, kappa=kappa, evaluations=evaluations,
                reason=f"target already met at the bottom of the search range ({low_db} dB)"
            )
        lo, hi, pe_at_hi = low_db, high_db, pe_high
        while hi - lo > resolution_db:
            mid = 0.5 * (lo + hi)
            pe_mid = measure_at(mid)
            if pe_mid <= target_pe:
                hi, pe_at_hi = mid, pe_mid
            else:
                lo = mid
    return MinPowerResult(feasible=True, pu_db=hi, pe=pe_at_hi, kappa=kappa, evaluations=evaluations)


@dataclass
class SinrExperimentResult:
    """Monte-Carlo SINR next to the closed form"""
    empirical_mean: float
    analytic: float
    samples: np.ndarray
    instantaneous: np.ndarray
    draws: int

    @property
    def relative_error(self) -> float:
        return abs(self.empirical_mean - self.analytic) / self.analytic


def _worst_case_unit(task):
    params, k_g, seed, chunk, size, user, exact_csi = task
    rng = trial_rng(seed, chunk)
    root = root_zc(params.n_zc, params.zc_root)
    frame = build_frame(root, params.shift(1), params.guard)
    sc = np.arange(params.n_sc)
    ds_power = en_power = 0.0
    samples, instantaneous = [], []
    for _ in range(size):
        tau = int(rng.integers(0, params.max_round_trip + 1))
        users = [
            UserRealization(preamble_idx=1, tau=tau, cir=draw_cir(params, rng), ue_id=q)
            for q in range(k_g)
        ]
        bank = correlate(synthesize_uplink(users, [frame] * k_g, params, rng), root, params.guard)
        est = estimate_group_cir(bank, DetectedGroup(preamble_idx=1, ta_hat=tau), params, users)
        if exact_csi:
            truth = math.sqrt(params.pu) * sum(u.cir for u in users)
            est = GroupChannelEstimate(
                group=est.group, cir_hat=truth,
                fd_gain=cir_to_frequency(truth, params.n_rs),
                upsilon=params.num_antennas * params.pu * k_g * params.alpha
            )
        symbols = bpsk(rng.integers(0, 2, size=sc.size))
        comp = decompose_worst_case(est, users, symbols, params, k_t=1, rng=rng, subcarriers=sc)
        ds_power += float(np.sum(np.abs(comp.ds[user]) ** 2))
        en_power += float(np.sum(np.abs(comp.en[user]) ** 2))
        samples.append(float(comp.conditional_sinr[user, 0]))
        instantaneous.append(float(measure_instantaneous_sinr(comp)[user, 0]))
    return ds_power, en_power, samples, instantaneous


def worst_case_sinr_experiment(
    params: SystemParams,
    k_g: int,
    num_draws: int,
    rng=None,
    exact_csi: bool = False,
    user: int = 0,
    workers: Optional[int] = None,
    chunk: int = 1000
) -> SinrExperimentResult:
    """
    Single group of K_g UEs with one common delay and a perfect group TA.

    The empirical mean is sum|DS|^2 / sum|EN|^2 over all draws and RAR
    subcarriers. ``samples`` holds one channel-conditioned SINR per draw
    (desired power with the realized ||H||^2 over MUI plus the expected
    estimation and receiver noise), the quantity whose spread shows hardening.
    """
    if k_g < 1:
        raise ValueError("K_g must be >= 1")
    if not 0 <= user < k_g:
        raise ValueError("user index outside the group")
    seed = resolve_seed(rng)
    sizes = chunk_sizes(num_draws, chunk)
    tasks = [(params, k_g, seed, idx, size, user, exact_csi) for idx, size in enumerate(sizes)]
    with WorkerPoolManager(workers) as pool:
        parts = pool.map(_worst_case_unit, tasks)

    ds_power = sum(p[0] for p in parts)
    en_power = sum(p[1] for p in parts)
    samples = np.array([s for p in parts for s in p[2]])
    inst = np.array([s for p in parts for s in p[3]])
    analytic = sinr_closed_form(SinrParams(
        M=params.num_antennas,
        gamma=params.pu_over_sigma2,
        gamma_d=(params.n_rs / params.n_sc) * params.pt_over_sigma2,
        alphas=[params.alpha] * k_g,
        i=user + 1,
        n_rs=params.n_rs, n_sc=params.n_sc, n_zc=params.n_zc, L=params.delay_spread
    ))
    empirical = ds_power / en_power if en_power > 0 else float("inf")
    logger.info(
        f"📈 Worst-case SINR M={params.num_antennas}, K_g={k_g}: "
        f"empirical {linear_to_db(empirical):.3f} dB vs closed form {linear_to_db(analytic):.3f} dB"
    )
    return SinrExperimentResult(
        empirical_mean=empirical, analytic=analytic,
        samples=samples, instantaneous=inst, draws=num_draws
    )


def overlap_scenario(
    params: SystemParams,
    rng: np.random.Generator,
    delays: Sequence[int] = OVERLAP_DELAYS,
    preamble_idx: int = 1
) -> List[UserRealization]:
    """Five UEs on one preamble forming three overlapping-window groups"""
    return [
        UserRealization(preamble_idx=preamble_idx, tau=int(tau), cir=draw_cir(params, rng), ue_id=idx)
        for idx, tau in enumerate(delays)
    ]


def partial_overlap_sinr_experiment(
    params: SystemParams,
    num_draws: int,
    rng=None,
    delays: Sequence[int] = (12, 15, 20),
    ta_hat: Optional[int] = None
) -> List[float]:
    """
    Measured SINR of each UE in one group whose members only partly overlap
    the estimation window.

    For every subcarrier the statistic is |E[Y u*]|^2 / Var[Y u*] over draws;
    the returned value per UE is its mean across subcarriers. A TA offset turns
    into a phase ramp over subcarriers, so the moments are never pooled across them.
    """
    if num_draws < 2:
        raise ValueError("num_draws must be >= 2")
    seed = resolve_seed(rng)
    group_ta = min(delays) if ta_hat is None else ta_hat
    root = root_zc(params.n_zc, params.zc_root)
    frame = build_frame(root, params.shift(1), params.guard)
    sc = np.arange(params.n_sc)
    collected = np.empty((len(delays), num_draws, sc.size), dtype=complex)
    for draw in range(num_draws):
        rng_d = trial_rng(seed, draw)
        users = overlap_scenario(params, rng_d, delays)
        bank = correlate(synthesize_uplink(users, [frame] * len(users), params, rng_d), root, params.guard)
        est = estimate_group_cir(bank, DetectedGroup(preamble_idx=1, ta_hat=group_ta), params, users)
        symbols = bpsk(rng_d.integers(0, 2, size=sc.size))
        X = precode([est], [symbols], params, k_t=1, subcarriers=sc)
        rx = receive_downlink(X, users, params, rng_d, sc)
        collected[:, draw, :] = rx.y * np.conj(symbols)[None, :]
    signal = np.abs(collected.mean(axis=1)) ** 2
    spread = collected.var(axis=1)
    with np.errstate(divide="ignore", invalid="ignore"):
        per_subcarrier = signal / spread
    return [float(v) for v in per_subcarrier.mean(axis=1)]


def overlap_detection_rate(params: SystemParams, trials: int, rng=None) -> float:
    """Fraction of trials recovering exactly the three group TAs (12, 27, 40)"""
    seed = resolve_seed(rng)
    root = root_zc(params.n_zc, params.zc_root)
    frame = build_frame(root, params.shift(1), params.guard)
    hits = 0
    for trial in range(trials):
        rng_t = trial_rng(seed, trial)
        users = overlap_scenario(params, rng_t)
        bank = correlate(synthesize_uplink(users, [frame] * len(users), params, rng_t), root, params.guard)
        found = group(profile(bank, 1, params.theta0, params.sigma2, params.guard), params.delay_spread)
        hits += [g.ta_hat for g in found] == [12, 27, 40]
    return hits / trials


def scaled_power(reference: float, M: int, law: str, m_ref: int = 20) -> float:
    """Power at M following ``law`` from its value at m_ref"""
    if law == "constant":
        return reference
    if law == "inv_sqrt_m":
        return reference * math.sqrt(m_ref / M)
    if law == "inv_m":
        return reference * m_ref / M
    raise ValueError(f"Unknown power law: {law}")


@dataclass
class SweepPoint:
    m: int
    load: float
    pu_db: float
    pt_db: float
    metrics: CampaignMetrics


def sweep(
    params: SystemParams,
    antennas: Sequence[int],
    loads: Sequence[float],
    num_frames: int,
    rng=None,
    replications: int = 1,
    pu_law: str = "constant",
    pt_law: str = "constant",
    m_ref: int = 20,
    workers: Optional[int] = None,
    upsilon_mode: str = "analytic"
) -> List[SweepPoint]:
    """Campaign grid over M and load; powers follow their laws from the values in params at m_ref"""
    seed = resolve_seed(rng)
    points = []
    for M in antennas:
        pu = scaled_power(params.pu_over_sigma2, M, pu_law, m_ref)
        pt = scaled_power(params.pt_over_sigma2, M, pt_law, m_ref)
        point_params = params.evolve(num_antennas=M, pu_over_sigma2=pu, pt_over_sigma2=pt)
        for load in loads:
            metrics = run_campaign(
                point_params, load, num_frames, seed,
                replications=replications, workers=workers, upsilon_mode=upsilon_mode
            )
            points.append(SweepPoint(m=M, load=load, pu_db=linear_to_db(pu), pt_db=linear_to_db(pt), metrics=metrics))
    return points


def _pf_pd_unit(task) -> PfPdResult:
    params, seed, key, size = task
    return measure_pf_pd(params, size, trial_rng(seed, *key))


def pf_pd_curve(
    params: SystemParams,
    antennas: Sequence[int],
    kappas: Sequence[float],
    trials: int,
    rng=None,
    e_pu: Optional[float] = None,
    workers: Optional[int] = None,
    chunk: int = 500
) -> List[dict]:
    """
    P_F and P_D over a grid of M and kappa. With ``e_pu`` set the uplink
    power follows p_u/sigma^2 = e_pu/sqrt(M); otherwise params' value is kept.
    """
    seed = resolve_seed(rng)
    rows = []
    with WorkerPoolManager(workers) as pool:
        for M in antennas:
            for kappa in kappas:
                changes = {"num_antennas": M, "kappa": kappa}
                if e_pu is not None:
                    changes["pu_over_sigma2"] = e_pu / math.sqrt(M)
                point = params.evolve(**changes)
                sizes = chunk_sizes(trials, chunk)
                tasks = [(point, seed, (M, idx), size) for idx, size in enumerate(sizes)]
                parts = pool.map(_pf_pd_unit, tasks)
                windows = trials * point.num_preambles
                pf = sum(p.false_alarm_windows for p in parts) / windows
                pd = sum(p.detections for p in parts) / trials
                exact = sum(p.exact_ta for p in parts) / trials
                rows.append({
                    "m": M,
                    "kappa": kappa,
                    "pu_db": linear_to_db(point.pu_over_sigma2),
                    "pf": pf,
                    "pf_bound": pf_bound(kappa, point.guard) if kappa > 1 else 1.0,
                    "pd": pd,
                    "pd_exact_ta": exact,
                    "trials": trials,
                })
                logger.info(f"📉 M={M}, kappa={kappa}: P_F={pf:.4g}, P_D={pd:.4g}")
    return rows
