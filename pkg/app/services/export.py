"""
CSV / JSON output and uplink dump codecs
"""
import json
import logging
from pathlib import Path
from typing import Any, Dict, Iterable, List, Optional, Sequence, Union

import numpy as np
import pandas as pd

from .. import __version__
from .sysparams import SystemParams
from .channel import RxUplink, UserRealization
from .detector import CorrelationProfile, DetectedGroup
from .harness import CampaignMetrics
from .analytic import linear_to_db

logger = logging.getLogger(__name__)

FLOAT_FORMAT = "%.10g"
CAMPAIGN_COLUMNS = [
    "m", "load", "pu_db", "pt_db", "avg_repeats", "fail_prob",
    "pf", "pd", "ci_halfwidth", "fail_ci_halfwidth", "mean_k_t", "noncontrib_frac",
]


def campaign_row(params: SystemParams, load: float, metrics: CampaignMetrics) -> Dict[str, Any]:
    return {
        "m": params.num_antennas,
        "load": load,
        "pu_db": linear_to_db(params.pu_over_sigma2),
        "pt_db": linear_to_db(params.pt_over_sigma2),
        "avg_repeats": metrics.avg_repeat_attempts,
        "fail_prob": metrics.ra_failure_prob,
        "pf": metrics.pf,
        "pd": metrics.pd,
        "ci_halfwidth": metrics.ci_halfwidth,
        "fail_ci_halfwidth": metrics.fail_ci_halfwidth,
        "mean_k_t": metrics.mean_k_t,
        "noncontrib_frac": metrics.noncontributing_fraction,
    }


def to_csv_text(rows: Iterable[Dict[str, Any]], columns: Optional[Sequence[str]] = None) -> str:
    frame = pd.DataFrame(list(rows), columns=list(columns) if columns else None)
    return frame.to_csv(index=False, float_format=FLOAT_FORMAT, lineterminator="\n")


def write_csv(
    rows: Iterable[Dict[str, Any]],
    path: Union[str, Path],
    columns: Optional[Sequence[str]] = None
) -> Path:
    """Write rows with a fixed column order and float format (byte-stable output)"""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(to_csv_text(rows, columns), encoding="utf-8")
    logger.info(f"💾 Wrote {path}")
    return path


def write_sidecar(
    csv_path: Union[str, Path],
    config: Dict[str, Any],
    seed: int,
    **extra: Any
) -> Path:
    """JSON sidecar next to a CSV: resolved config, seed, package version"""
    sidecar = Path(csv_path).with_suffix(".json")
    payload = {"config": config, "seed": seed, "version": __version__, **extra}
    sidecar.write_text(json.dumps(payload, indent=2, sort_keys=True, default=str) + "\n", encoding="utf-8")
    return sidecar


def complex_rows(samples: np.ndarray) -> pd.DataFrame:
    return pd.DataFrame({"t": np.arange(samples.size), "re": samples.real, "im": samples.imag})


def write_preamble_csv(samples: np.ndarray, path: Union[str, Path]) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    complex_rows(np.asarray(samples)).to_csv(path, index=False, float_format="%.17g", lineterminator="\n")
    return path


def uplink_frame(rx: RxUplink) -> pd.DataFrame:
    M, T = rx.samples.shape
    return pd.DataFrame({
        "antenna": np.repeat(np.arange(M), T),
        "t": np.tile(np.arange(T), M),
        "re": rx.samples.real.ravel(),
        "im": rx.samples.imag.ravel(),
    })


def write_uplink_csv(rx: RxUplink, path: Union[str, Path]) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    uplink_frame(rx).to_csv(path, index=False, float_format="%.17g", lineterminator="\n")
    return path


def read_uplink_csv(path: Union[str, Path]) -> RxUplink:
    """Inverse of write_uplink_csv; rows may come in any order"""
    frame = pd.read_csv(path)
    missing = {"antenna", "t", "re", "im"} - set(frame.columns)
    if missing:
        raise ValueError(f"uplink CSV is missing columns: {sorted(missing)}")
    M = int(frame["antenna"].max()) + 1
    T = int(frame["t"].max()) + 1
    samples = np.zeros((M, T), dtype=complex)
    samples[frame["antenna"].to_numpy(), frame["t"].to_numpy()] = frame["re"].to_numpy() + 1j * frame["im"].to_numpy()
    return RxUplink(samples=samples)


def users_frame(users: Sequence[UserRealization]) -> pd.DataFrame:
    return pd.DataFrame([
        {"ue_id": u.ue_id, "preamble_idx": u.preamble_idx, "tau": u.tau, "distance_km": u.distance_km}
        for u in users
    ], columns=["ue_id", "preamble_idx", "tau", "distance_km"])


def profiles_rows(profiles: Dict[int, CorrelationProfile]) -> List[Dict[str, Any]]:
    rows = []
    for k in sorted(profiles):
        prof = profiles[k]
        for t, (v, p) in enumerate(zip(prof.v, prof.p)):
            rows.append({"k": k, "t": t, "v": float(v), "p": float(p)})
    return rows


def groups_rows(groups: Sequence[DetectedGroup]) -> List[Dict[str, Any]]:
    rows = []
    counters: Dict[int, int] = {}
    for g in groups:
        counters[g.preamble_idx] = counters.get(g.preamble_idx, 0) + 1
        rows.append({"k": g.preamble_idx, "group": counters[g.preamble_idx], "ta_hat": g.ta_hat})
    return rows
