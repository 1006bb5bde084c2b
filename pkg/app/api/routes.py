"""
FastAPI routes for the random-access simulator
"""
import logging
from datetime import datetime
from typing import Any, Dict
from fastapi import APIRouter, HTTPException, status

from ..models import (
    AnalyticRequest,
    AnalyticResponse,
    RarEncodeRequest,
    RarEncodeResponse,
    RarDecodeRequest,
    RarDecodeResponse,
    SimulateRequest,
    SimulateResponse,
    PfPdRequest,
    PfPdResponse,
    ParamsResponse,
    HealthResponse
)
from ..services import simulation_service
from ..config import settings

logger = logging.getLogger(__name__)

router = APIRouter()


def _reject_invalid(result: Dict[str, Any]) -> Dict[str, Any]:
    """Map service-level input errors onto HTTP 400"""
    if not result["success"] and result.get("invalid_input"):
        raise HTTPException(status_code=status.HTTP_400_BAD_REQUEST, detail=result.get("error"))
    result.pop("invalid_input", None)
    return result


@router.get("/health", response_model=HealthResponse)
async def health_check():
    """Health check endpoint"""
    return HealthResponse(
        status="healthy" if simulation_service.initialized else "degraded",
        service=settings.SERVICE_NAME,
        version=settings.SERVICE_VERSION,
        timestamp=datetime.now(),
        simulator_initialized=simulation_service.initialized,
        profile=settings.PROFILE_NAME
    )


@router.get("/api/params", response_model=ParamsResponse)
async def get_params():
    """Derived system parameters of the loaded profile"""
    result = await simulation_service.get_params()
    return ParamsResponse(**_reject_invalid(result))


@router.post("/api/analytic", response_model=AnalyticResponse)
async def evaluate_analytic(request: AnalyticRequest):
    """
    Closed-form SINR and antenna requirement under 1/sqrt(M) power scaling

    - **m**: Number of BS antennas
    - **k_g**: UEs sharing the worst-case group
    - **e_u** / **e_t**: Uplink / downlink scaling constants
    - **epsilon_db**: Target SINR
    """
    try:
        result = await simulation_service.evaluate_analytic(
            m=request.m,
            k_g=request.k_g,
            e_u=request.e_u,
            e_t=request.e_t,
            epsilon_db=request.epsilon_db,
            alpha=request.alpha
        )
        return AnalyticResponse(**_reject_invalid(result))
    except HTTPException:
        raise
    except Exception as e:
        logger.error(f"Error in analytic endpoint: {e}")
        raise HTTPException(
            status_code=status.HTTP_500_INTERNAL_SERVER_ERROR,
            detail=str(e)
        )


@router.post("/api/codec/encode", response_model=RarEncodeResponse)
async def encode_rar(request: RarEncodeRequest):
    """Encode a RAR payload into its 24-bit frame"""
    result = await simulation_service.encode_rar(
        ta=request.ta,
        rb_start=request.rb_start,
        num_rb=request.num_rb
    )
    return RarEncodeResponse(**_reject_invalid(result))


@router.post("/api/codec/decode", response_model=RarDecodeResponse)
async def decode_rar(request: RarDecodeRequest):
    """Decode a noiseless 24-bit frame given as hex"""
    result = await simulation_service.decode_rar(request.frame_hex)
    return RarDecodeResponse(**_reject_invalid(result))


@router.post("/api/simulate", response_model=SimulateResponse)
async def simulate(request: SimulateRequest):
    """
    Run a small RA campaign on the loaded profile

    - **num_frames**: Frames to simulate (capped by MAX_API_FRAMES)
    - **mean_requests**: Poisson mean of new requests per frame
    - **overrides**: section.key=value profile overrides
    """
    try:
        result = await simulation_service.simulate(
            num_frames=request.num_frames,
            mean_requests=request.mean_requests,
            seed=request.seed,
            overrides=request.overrides
        )
        return SimulateResponse(**_reject_invalid(result))
    except HTTPException:
        raise
    except Exception as e:
        logger.error(f"Error in simulate endpoint: {e}")
        raise HTTPException(
            status_code=status.HTTP_500_INTERNAL_SERVER_ERROR,
            detail=str(e)
        )


@router.post("/api/pf-pd", response_model=PfPdResponse)
async def pf_pd(request: PfPdRequest):
    """Monte-Carlo false-alarm and detection probabilities"""
    try:
        result = await simulation_service.pf_pd(
            trials=request.trials,
            m=request.m,
            kappa=request.kappa,
            seed=request.seed
        )
        return PfPdResponse(**_reject_invalid(result))
    except HTTPException:
        raise
    except Exception as e:
        logger.error(f"Error in pf-pd endpoint: {e}")
        raise HTTPException(
            status_code=status.HTTP_500_INTERNAL_SERVER_ERROR,
            detail=str(e)
        )
