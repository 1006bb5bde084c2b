"""
Simulation service used by the HTTP API

Wraps profile loading, closed-form evaluation, the RAR codec and small
Monte-Carlo runs behind async methods returning plain dicts.
"""
import asyncio
import logging
import time
from typing import Any, Dict, List, Optional

import numpy as np

from ..config import settings
from ..schemas import ConfigError, ParamsConfigLoader, apply_overrides, build_profile
from . import analytic, rarlink
from .detector import measure_pf_pd
from .export import campaign_row
from .harness import run_campaign
from .runner import trial_rng
from .sysparams import SystemParams, derive, describe

logger = logging.getLogger(__name__)


class SimulationService:
    """Facade over the simulator for request/response callers"""

    def __init__(self):
        self.loader = ParamsConfigLoader(settings.CONFIG_DIR)
        self.raw_profile: Dict[str, Any] = {}
        self.params: Optional[SystemParams] = None
        self.initialized = False

    async def initialize(self):
        """Load and validate the default profile"""
        try:
            logger.info(f"📖 Loading profile '{settings.PROFILE_NAME}' from {settings.CONFIG_DIR}")
            self.raw_profile = self.loader.load_raw(settings.PROFILE_NAME)
            self.params = derive(self.raw_profile)
            self.initialized = True
            logger.info(
                f"✅ Simulator ready: Q={self.params.num_preambles} preambles, "
                f"M={self.params.num_antennas}, kappa={self.params.kappa:.3f}"
            )
        except Exception as e:
            logger.error(f"❌ Failed to initialize simulator: {e}")
            raise

    def _resolve(self, overrides: Optional[List[str]]) -> SystemParams:
        if not overrides:
            return self.params
        return derive(build_profile(apply_overrides(self.raw_profile, overrides)))

    async def get_params(self, overrides: Optional[List[str]] = None) -> Dict[str, Any]:
        if not self.initialized:
            return {"success": False, "error": "Simulator not initialized"}
        try:
            params = self._resolve(overrides)
            return {"success": True, "profile": self.raw_profile.get("name", settings.PROFILE_NAME), "params": describe(params)}
        except ConfigError as e:
            return {"success": False, "error": str(e), "invalid_input": True}

    async def evaluate_analytic(
        self,
        m: float,
        k_g: int,
        e_u: float,
        e_t: float,
        epsilon_db: float,
        alpha: Optional[float] = None
    ) -> Dict[str, Any]:
        """Closed-form SINR, asymptote, min antennas and required downlink power"""
        if not self.initialized:
            return {"success": False, "error": "Simulator not initialized"}
        try:
            p = self.params
            alpha = alpha if alpha is not None else p.alpha
            epsilon = analytic.db_to_linear(epsilon_db)
            scaled = analytic.ScaledPowerParams(e_u=e_u, e_t=e_t, epsilon=epsilon)
            consts = dict(n_rs=p.n_rs, n_sc=p.n_sc, n_zc=p.n_zc, L=p.delay_spread)
            alphas = [alpha] * k_g
            sinr = analytic.sinr_scaled(scaled, m, alphas, 1, **consts)
            limit = analytic.gamma_u(scaled, alpha, n_rs=p.n_rs, n_zc=p.n_zc, L=p.delay_spread, n_sc=p.n_sc)
            antennas = analytic.min_antennas(scaled, alphas, 1, **consts)
            power = analytic.required_pt(epsilon, analytic.SinrParams(
                M=m, gamma=scaled.gamma(m), gamma_d=1.0, alphas=alphas, **consts
            ))
            return {
                "success": True,
                "sinr_db": analytic.linear_to_db(sinr),
                "gamma_u_db": analytic.linear_to_db(limit),
                "min_antennas": antennas.m_star,
                "min_antennas_ceil": antennas.m_ceil,
                "required_pt_db": analytic.linear_to_db(power.extras["pt_over_sigma2"]) if power.feasible else None,
                "pf_bound": analytic.pf_bound(p.kappa, p.guard) if p.kappa > 1 else None,
                "notes": [r for r in (antennas.reason, power.reason) if r],
            }
        except ValueError as e:
            return {"success": False, "error": str(e), "invalid_input": True}

    async def encode_rar(self, ta: int, rb_start: int, num_rb: int) -> Dict[str, Any]:
        try:
            frame = rarlink.encode(rarlink.RarPayload(ta=ta, rb_start=rb_start, num_rb=num_rb))
            return {
                "success": True,
                "hex": rarlink.to_hex(frame.bits),
                "bits": "".join(str(int(b)) for b in frame.bits),
            }
        except ValueError as e:
            return {"success": False, "error": str(e), "invalid_input": True}

    async def decode_rar(self, frame_hex: str) -> Dict[str, Any]:
        try:
            bits = rarlink.from_hex(frame_hex)
        except ValueError as e:
            return {"success": False, "error": str(e), "invalid_input": True}
        result = rarlink.decode(np.vstack([rarlink.bpsk(bits), rarlink.bpsk(bits)]))
        payload = result.payload
        return {
            "success": True,
            "status": result.status.value,
            "ta": payload.ta if payload else None,
            "rb_start": payload.rb_start if payload else None,
            "num_rb": payload.num_rb if payload else None,
        }

    async def simulate(
        self,
        num_frames: int,
        mean_requests: Optional[float] = None,
        seed: Optional[int] = None,
        overrides: Optional[List[str]] = None
    ) -> Dict[str, Any]:
        """Small campaign run in a worker thread"""
        if not self.initialized:
            return {"success": False, "error": "Simulator not initialized"}
        if num_frames > settings.MAX_API_FRAMES:
            return {
                "success": False,
                "error": f"num_frames={num_frames} exceeds MAX_API_FRAMES={settings.MAX_API_FRAMES}",
                "invalid_input": True,
            }
        try:
            params = self._resolve(overrides)
        except ConfigError as e:
            return {"success": False, "error": str(e), "invalid_input": True}
        load = mean_requests if mean_requests is not None else self.raw_profile.get("campaign", {}).get("mean_requests", 11.0)
        seed = settings.MASTER_SEED if seed is None else seed

        start = time.time()
        metrics = await asyncio.to_thread(run_campaign, params, load, num_frames, seed, 1, 1)
        return {
            "success": True,
            "row": campaign_row(params, load, metrics),
            "finished_ues": metrics.finished_ues,
            "censored_ues": metrics.censored_ues,
            "ta_error_histogram": {str(k): v for k, v in metrics.ta_error_histogram.items()},
            "seed": seed,
            "execution_time": time.time() - start,
        }

    async def pf_pd(
        self,
        trials: int,
        m: Optional[int] = None,
        kappa: Optional[float] = None,
        seed: Optional[int] = None
    ) -> Dict[str, Any]:
        if not self.initialized:
            return {"success": False, "error": "Simulator not initialized"}
        if trials > settings.MAX_API_TRIALS:
            return {
                "success": False,
                "error": f"trials={trials} exceeds MAX_API_TRIALS={settings.MAX_API_TRIALS}",
                "invalid_input": True,
            }
        changes = {}
        if m is not None:
            changes["num_antennas"] = m
        if kappa is not None:
            changes["kappa"] = kappa
        try:
            params = self.params.evolve(**changes)
        except ConfigError as e:
            return {"success": False, "error": str(e), "invalid_input": True}
        seed = settings.MASTER_SEED if seed is None else seed
        result = await asyncio.to_thread(measure_pf_pd, params, trials, trial_rng(seed, 0))
        return {
            "success": True,
            "m": params.num_antennas,
            "kappa": params.kappa,
            "pf": result.pf,
            "pd": result.pd,
            "pd_exact_ta": result.pd_exact_ta,
            "trials": trials,
        }


# Global simulation service instance
simulation_service = SimulationService()
