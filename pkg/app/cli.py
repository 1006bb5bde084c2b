"""
Command-line entry point

Examples:
  python -m app simulate --load 11 --frames 2000 --replications 4 --out results/m20.csv
  python -m app sweep --m 20 40 80 160 --load 11 --pu-law inv_sqrt_m --power-law inv_m
  python -m app find-min-power --m 20 80 --trials 10000
  python -m app codec encode --ta 27 --rb-start 3 --num-rb 1
  python -m app analytic-table --m 20 80 320 --k-g 2 10
  python -m app profiles
"""
import argparse
import json
import logging
import sys
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence

import numpy as np

from . import __version__
from .config import settings
from .schemas import ConfigError, ParamsConfigLoader, SimulationProfile, apply_overrides, build_profile
from .services import analytic, export, rarlink
from .services.channel import draw_users, synthesize_uplink
from .services.detector import CalibrationError, correlate, detect_all
from .services.harness import (
    POWER_LAWS,
    SlotContext,
    find_min_power,
    partial_overlap_sinr_experiment,
    pf_pd_curve,
    run_campaign,
    sweep,
    worst_case_sinr_experiment,
)
from .services.preamble import build_frame, root_zc
from .services.runner import trial_rng
from .services.sysparams import SystemParams, derive

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_INVALID = 2
EXIT_INFEASIBLE = 3


class RunContext:
    """Resolved profile, parameters, seed and worker count of one invocation"""

    def __init__(self, args: argparse.Namespace):
        loader = ParamsConfigLoader(settings.CONFIG_DIR)
        raw = loader.load_raw(args.config or args.profile)
        overrides = list(args.set or [])
        if args.pu_db is not None:
            overrides.append(f"power.pu_db={args.pu_db}")
        if args.pt_db is not None:
            overrides.append(f"power.pt_db={args.pt_db}")
        self.profile: SimulationProfile = build_profile(apply_overrides(raw, overrides))
        self.params: SystemParams = derive(self.profile)
        campaign = self.profile.campaign
        if args.seed is not None:
            self.seed = args.seed
        elif campaign.master_seed is not None:
            self.seed = campaign.master_seed
        else:
            self.seed = settings.MASTER_SEED
        self.workers = args.workers or campaign.workers or settings.WORKERS
        self.out = Path(args.out) if args.out else None

    @property
    def config(self) -> Dict[str, Any]:
        return self.profile.model_dump(mode="json")

    def output(self, default_name: str) -> Path:
        return self.out or Path(settings.OUTPUT_DIR) / default_name

    def write(self, rows: Sequence[Dict[str, Any]], default_name: str, columns=None, **extra) -> Path:
        path = export.write_csv(rows, self.output(default_name), columns)
        export.write_sidecar(path, self.config, self.seed, **extra)
        return path


def _sibling(path: Path, suffix: str) -> Path:
    return path.with_name(f"{path.stem}_{suffix}{path.suffix or '.csv'}")


def cmd_simulate(args, ctx: RunContext) -> int:
    campaign = ctx.profile.campaign
    load = args.load if args.load is not None else campaign.mean_requests
    frames = args.frames or campaign.num_frames
    replications = args.replications or campaign.replications
    metrics = run_campaign(
        ctx.params, load, frames, ctx.seed,
        replications=replications,
        workers=ctx.workers,
        upsilon_mode=args.upsilon_mode or campaign.upsilon_mode
    )
    path = ctx.write(
        [export.campaign_row(ctx.params, load, metrics)], "simulate.csv", export.CAMPAIGN_COLUMNS,
        replications=replications,
        num_frames=frames,
        finished_ues=metrics.finished_ues,
        failed_ues=metrics.failed_ues,
        censored_ues=metrics.censored_ues,
        pd_exact_ta=metrics.pd_exact_ta,
        ta_error_histogram={str(k): v for k, v in metrics.ta_error_histogram.items()}
    )
    print(f"Wrote {path}")
    return EXIT_OK


def cmd_sweep(args, ctx: RunContext) -> int:
    campaign = ctx.profile.campaign
    frames = args.frames or campaign.num_frames
    replications = args.replications or campaign.replications
    points = sweep(
        ctx.params,
        antennas=args.m,
        loads=args.load or [campaign.mean_requests],
        num_frames=frames,
        rng=ctx.seed,
        replications=replications,
        pu_law=args.pu_law,
        pt_law=args.power_law,
        m_ref=args.m_ref,
        workers=ctx.workers,
        upsilon_mode=campaign.upsilon_mode
    )
    rows = []
    for point in points:
        params = ctx.params.evolve(
            num_antennas=point.m,
            pu_over_sigma2=analytic.db_to_linear(point.pu_db),
            pt_over_sigma2=analytic.db_to_linear(point.pt_db)
        )
        rows.append(export.campaign_row(params, point.load, point.metrics))
    path = ctx.write(
        rows, "sweep.csv", export.CAMPAIGN_COLUMNS,
        replications=replications, num_frames=frames,
        pu_law=args.pu_law, pt_law=args.power_law, m_ref=args.m_ref
    )
    print(f"Wrote {path}")
    return EXIT_OK


def cmd_find_min_power(args, ctx: RunContext) -> int:
    rows = []
    status = EXIT_OK
    for M in args.m:
        result = find_min_power(
            ctx.params.evolve(num_antennas=M),
            target_pe=args.target_pe,
            target_pf=args.target_pf,
            rng=ctx.seed,
            trials=args.trials,
            low_db=args.low_db,
            high_db=args.high_db,
            resolution_db=args.resolution,
            workers=ctx.workers
        )
        if not result.feasible:
            logger.warning(f"⚠️ M={M}: {result.reason}")
            status = EXIT_INFEASIBLE
        rows.append({
            "m": M,
            "pu_db": result.pu_db,
            "pe": result.pe,
            "kappa": result.kappa,
            "feasible": result.feasible,
            "evaluations": len(result.evaluations),
            "reason": result.reason or "",
        })
    path = ctx.write(
        rows, "min_power.csv",
        ["m", "pu_db", "pe", "kappa", "feasible", "evaluations", "reason"],
        target_pe=args.target_pe, target_pf=args.target_pf, trials=args.trials
    )
    print(f"Wrote {path}")
    return status


def cmd_pf_pd(args, ctx: RunContext) -> int:
    kappas = args.kappa or [ctx.params.kappa]
    rows = pf_pd_curve(
        ctx.params,
        antennas=args.m or [ctx.params.num_antennas],
        kappas=kappas,
        trials=args.trials,
        rng=ctx.seed,
        e_pu=args.e_pu,
        workers=ctx.workers
    )
    path = ctx.write(
        rows, "pf_pd.csv",
        ["m", "kappa", "pu_db", "pf", "pf_bound", "pd", "pd_exact_ta", "trials"],
        e_pu=args.e_pu
    )
    print(f"Wrote {path}")
    return EXIT_OK


def cmd_analytic(args, ctx: RunContext) -> int:
    p = ctx.params
    alpha = args.alpha if args.alpha is not None else p.alpha
    epsilon = analytic.db_to_linear(args.epsilon_db)
    scaled = analytic.ScaledPowerParams(e_u=args.e_u, e_t=args.e_t, epsilon=epsilon)
    consts = dict(n_rs=p.n_rs, n_sc=p.n_sc, n_zc=p.n_zc, L=p.delay_spread)
    alphas = [alpha] * args.k_g
    M = args.m if args.m is not None else p.num_antennas

    antennas = analytic.min_antennas(scaled, alphas, 1, **consts)
    power = analytic.required_pt(epsilon, analytic.SinrParams(
        M=M, gamma=scaled.gamma(M), gamma_d=1.0, alphas=alphas, **consts
    ))
    row = {
        "m": M,
        "k_g": args.k_g,
        "alpha": alpha,
        "sinr_db": analytic.linear_to_db(analytic.sinr_scaled(scaled, M, alphas, 1, **consts)),
        "gamma_u_db": analytic.linear_to_db(analytic.gamma_u(
            scaled, alpha, n_rs=p.n_rs, n_zc=p.n_zc, L=p.delay_spread, n_sc=p.n_sc
        )),
        "m_star": antennas.m_star,
        "m_ceil": antennas.m_ceil,
        "required_pt_db": analytic.linear_to_db(power.extras["pt_over_sigma2"]) if power.feasible else None,
        "pf_bound": analytic.pf_bound(p.kappa, p.guard) if p.kappa > 1 else 1.0,
    }
    path = ctx.write([row], "analytic.csv", list(row))
    print(f"Wrote {path}")
    if not antennas.feasible:
        print(f"Infeasible: {antennas.reason}", file=sys.stderr)
        return EXIT_INFEASIBLE
    if not power.feasible:
        print(f"Infeasible: {power.reason}", file=sys.stderr)
        return EXIT_INFEASIBLE
    return EXIT_OK


def cmd_analytic_table(args, ctx: RunContext) -> int:
    p = ctx.params
    alpha = args.alpha if args.alpha is not None else p.alpha
    scaled = analytic.ScaledPowerParams(e_u=args.e_u, e_t=args.e_t)
    rows = analytic.closed_form_table(
        scaled, args.m, args.k_g, alpha,
        n_rs=p.n_rs, n_sc=p.n_sc, n_zc=p.n_zc, L=p.delay_spread
    )
    path = ctx.write(rows, "analytic_table.csv", ["m", "k_g", "sinr", "sinr_db"], e_u=args.e_u, e_t=args.e_t)
    print(f"Wrote {path}")
    return EXIT_OK


def cmd_profiles(args, ctx: Optional[RunContext]) -> int:
    for name in ParamsConfigLoader(settings.CONFIG_DIR).list_profiles():
        print(name)
    return EXIT_OK


def cmd_codec(args, ctx: Optional[RunContext]) -> int:
    if args.codec_command == "encode":
        frame = rarlink.encode(rarlink.RarPayload(ta=args.ta, rb_start=args.rb_start, num_rb=args.num_rb))
        print(rarlink.to_hex(frame.bits))
        return EXIT_OK
    bits = rarlink.from_hex(args.frame_hex)
    result = rarlink.decode(np.vstack([rarlink.bpsk(bits), rarlink.bpsk(bits)]))
    payload = result.payload
    print(json.dumps({
        "status": result.status.value,
        "ta": payload.ta if payload else None,
        "rb_start": payload.rb_start if payload else None,
        "num_rb": payload.num_rb if payload else None,
    }, sort_keys=True))
    return EXIT_OK


def cmd_detect(args, ctx: RunContext) -> int:
    rx = export.read_uplink_csv(args.uplink)
    if rx.num_antennas != ctx.params.num_antennas:
        logger.warning(
            f"⚠️ Uplink has {rx.num_antennas} antennas, profile says {ctx.params.num_antennas}; using the file"
        )
    params = ctx.params.evolve(num_antennas=rx.num_antennas)
    bank = correlate(rx, root_zc(params.n_zc, params.zc_root), params.guard)
    profiles, groups = detect_all(bank, params)
    path = ctx.write(export.profiles_rows(profiles), "profiles.csv", ["k", "t", "v", "p"], theta0=params.theta0)
    groups_path = export.write_csv(export.groups_rows(groups), _sibling(path, "groups"), ["k", "group", "ta_hat"])
    print(f"Wrote {path}")
    print(f"Wrote {groups_path}")
    return EXIT_OK


def cmd_dump_preamble(args, ctx: RunContext) -> int:
    p = ctx.params
    root = root_zc(p.n_zc, p.zc_root)
    if args.index == 0:
        samples = root.samples
    else:
        samples = build_frame(root, p.shift(args.index), p.guard).samples
    path = export.write_preamble_csv(samples, ctx.output("preamble.csv"))
    print(f"Wrote {path}")
    return EXIT_OK


def cmd_dump_uplink(args, ctx: RunContext) -> int:
    p = ctx.params
    rng = trial_rng(ctx.seed, 0)
    load = args.load if args.load is not None else ctx.profile.campaign.mean_requests
    frames = SlotContext(p).frames
    users = draw_users(p, load, rng)
    rx = synthesize_uplink(users, [frames[u.preamble_idx] for u in users], p, rng)
    path = export.write_uplink_csv(rx, ctx.output("uplink.csv"))
    export.write_sidecar(path, ctx.config, ctx.seed, mean_requests=load, num_users=len(users))
    users_path = _sibling(path, "users")
    users_path.parent.mkdir(parents=True, exist_ok=True)
    export.users_frame(users).to_csv(users_path, index=False, float_format=export.FLOAT_FORMAT, lineterminator="\n")
    print(f"Wrote {path}")
    print(f"Wrote {users_path}")
    return EXIT_OK


def cmd_sinr(args, ctx: RunContext) -> int:
    if args.mode == "partial-overlap":
        sinrs = partial_overlap_sinr_experiment(ctx.params, args.draws, ctx.seed)
        rows = [
            {"ue": i + 1, "tau": tau, "sinr_db": analytic.linear_to_db(s)}
            for i, (tau, s) in enumerate(zip((12, 15, 20), sinrs))
        ]
        path = ctx.write(rows, "sinr_partial.csv", ["ue", "tau", "sinr_db"], draws=args.draws)
        print(f"Wrote {path}")
        return EXIT_OK

    result = worst_case_sinr_experiment(
        ctx.params, args.k_g, args.draws, ctx.seed,
        exact_csi=args.exact_csi, workers=ctx.workers
    )
    rows = [
        {"draw": i, "sinr": float(s), "instantaneous": float(v)}
        for i, (s, v) in enumerate(zip(result.samples, result.instantaneous))
    ]
    path = ctx.write(
        rows, "sinr_worst_case.csv", ["draw", "sinr", "instantaneous"],
        k_g=args.k_g, draws=args.draws, exact_csi=args.exact_csi,
        empirical_mean_db=analytic.linear_to_db(result.empirical_mean),
        analytic_db=analytic.linear_to_db(result.analytic),
        relative_error=result.relative_error
    )
    print(f"Wrote {path}")
    return EXIT_OK


def cmd_serve(args, ctx: Optional[RunContext]) -> int:
    import uvicorn

    uvicorn.run(
        "app.main:app",
        host=settings.HOST,
        port=settings.PORT,
        log_level=settings.LOG_LEVEL.lower()
    )
    return EXIT_OK


def _common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", default=None, help="Path to a YAML profile")
    parser.add_argument("--profile", default=settings.PROFILE_NAME, help="Profile name in CONFIG_DIR")
    parser.add_argument("--set", action="append", metavar="SECTION.KEY=VALUE", help="Profile override (repeatable)")
    parser.add_argument("--seed", type=int, default=None, help="Master seed")
    parser.add_argument("--workers", type=int, default=None, help="Worker processes")
    parser.add_argument("--out", default=None, help="Output CSV path")
    parser.add_argument("--pu-db", type=float, default=None, help="p_u/sigma^2 in dB")
    parser.add_argument("--pt-db", type=float, default=None, help="P_T/sigma^2 in dB")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="python -m app", description="Massive-MIMO random access simulator")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("--log-level", default=settings.LOG_LEVEL, help="Logging level")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="Run one campaign")
    _common(p)
    p.add_argument("--load", type=float, default=None, help="Mean RA requests per frame")
    p.add_argument("--frames", type=int, default=None, help="Frames per replication")
    p.add_argument("--replications", type=int, default=None)
    p.add_argument("--upsilon-mode", choices=["analytic", "empirical"], default=None)
    p.set_defaults(handler=cmd_simulate)

    p = sub.add_parser("sweep", help="Campaign grid over M and load")
    _common(p)
    p.add_argument("--m", type=int, nargs="+", required=True)
    p.add_argument("--load", type=float, nargs="+", default=None)
    p.add_argument("--power-law", choices=POWER_LAWS, default="constant", help="P_T scaling with M")
    p.add_argument("--pu-law", choices=POWER_LAWS, default="constant", help="p_u scaling with M")
    p.add_argument("--m-ref", type=int, default=20, help="M at which the profile powers apply")
    p.add_argument("--frames", type=int, default=None)
    p.add_argument("--replications", type=int, default=None)
    p.set_defaults(handler=cmd_sweep)

    p = sub.add_parser("find-min-power", help="Minimum p_u/sigma^2 for a TA error target")
    _common(p)
    p.add_argument("--m", type=int, nargs="+", required=True)
    p.add_argument("--target-pe", type=float, default=1e-2)
    p.add_argument("--target-pf", type=float, default=1e-3)
    p.add_argument("--trials", type=int, default=10000)
    p.add_argument("--low-db", type=float, default=-40.0)
    p.add_argument("--high-db", type=float, default=10.0)
    p.add_argument("--resolution", type=float, default=0.1)
    p.set_defaults(handler=cmd_find_min_power)

    p = sub.add_parser("pf-pd", help="False-alarm and detection probabilities")
    _common(p)
    p.add_argument("--m", type=int, nargs="+", default=None)
    p.add_argument("--kappa", type=float, nargs="+", default=None)
    p.add_argument("--trials", type=int, default=1000)
    p.add_argument("--e-pu", type=float, default=None, help="Scale p_u/sigma^2 as E/sqrt(M)")
    p.set_defaults(handler=cmd_pf_pd)

    p = sub.add_parser("analytic", help="Closed-form SINR and antenna count")
    _common(p)
    p.add_argument("--m", type=float, default=None)
    p.add_argument("--k-g", type=int, default=2)
    p.add_argument("--e-u", type=float, default=0.0913)
    p.add_argument("--e-t", type=float, default=0.0913)
    p.add_argument("--epsilon-db", type=float, default=-3.0)
    p.add_argument("--alpha", type=float, default=None)
    p.set_defaults(handler=cmd_analytic)

    p = sub.add_parser("analytic-table", help="Scaled closed-form SINR over a grid of M and K_g")
    _common(p)
    p.add_argument("--m", type=float, nargs="+", required=True)
    p.add_argument("--k-g", type=int, nargs="+", default=[2])
    p.add_argument("--e-u", type=float, default=0.0913)
    p.add_argument("--e-t", type=float, default=0.0913)
    p.add_argument("--alpha", type=float, default=None)
    p.set_defaults(handler=cmd_analytic_table)

    p = sub.add_parser("profiles", help="List the bundled simulation profiles")
    p.set_defaults(handler=cmd_profiles, needs_profile=False)

    p = sub.add_parser("codec", help="RAR encoder / decoder")
    codec = p.add_subparsers(dest="codec_command", required=True)
    enc = codec.add_parser("encode")
    enc.add_argument("--ta", type=int, required=True)
    enc.add_argument("--rb-start", type=int, default=0)
    enc.add_argument("--num-rb", type=int, default=1)
    dec = codec.add_parser("decode")
    dec.add_argument("frame_hex")
    p.set_defaults(handler=cmd_codec, needs_profile=False)

    p = sub.add_parser("detect", help="Run the detector on an uplink CSV")
    _common(p)
    p.add_argument("--uplink", required=True, help="CSV with antenna,t,re,im")
    p.set_defaults(handler=cmd_detect)

    p = sub.add_parser("dump-preamble", help="Write the root sequence or a shifted frame")
    _common(p)
    p.add_argument("--index", type=int, default=0, help="Preamble index; 0 dumps the root")
    p.set_defaults(handler=cmd_dump_preamble)

    p = sub.add_parser("dump-uplink", help="Draw one slot and write its uplink")
    _common(p)
    p.add_argument("--load", type=float, default=None)
    p.set_defaults(handler=cmd_dump_uplink)

    p = sub.add_parser("sinr", help="SINR samples for pdf plots")
    _common(p)
    p.add_argument("--mode", choices=["worst-case", "partial-overlap"], default="worst-case")
    p.add_argument("--k-g", type=int, default=2)
    p.add_argument("--draws", type=int, default=10000)
    p.add_argument("--exact-csi", action="store_true")
    p.set_defaults(handler=cmd_sinr)

    p = sub.add_parser("serve", help="Run the HTTP API")
    p.set_defaults(handler=cmd_serve, needs_profile=False)

    return parser


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)

    logging.basicConfig(
        level=getattr(logging, str(args.log_level).upper(), logging.INFO),
        format='%(asctime)s - %(name)s - %(levelname)s - %(message)s'
    )
    try:
        ctx = RunContext(args) if getattr(args, "needs_profile", True) else None
        return args.handler(args, ctx)
    except (ConfigError, CalibrationError, FileNotFoundError, ValueError) as e:
        logger.error(f"❌ {e}")
        print(f"Error: {e}", file=sys.stderr)
        return EXIT_INVALID
