"""
Pydantic models for API requests and responses
"""
from pydantic import BaseModel, Field
from typing import Optional, List, Dict, Any
from datetime import datetime


class AnalyticRequest(BaseModel):
    """Request model for closed-form evaluation under 1/sqrt(M) power scaling"""
    m: float = Field(20, gt=0, description="Number of BS antennas M")
    k_g: int = Field(2, ge=1, description="UEs in the worst-case group K_g")
    e_u: float = Field(0.0913, gt=0, description="Uplink scaling constant E_u (p_u = sigma^2 E_u / sqrt(M))")
    e_t: float = Field(0.0913, gt=0, description="Downlink scaling constant E_T (P_T = sigma^2 E_T / sqrt(M))")
    epsilon_db: float = Field(-3.0, description="Target SINR in dB")
    alpha: Optional[float] = Field(None, gt=0, description="alpha_gq; defaults to the profile PDP energy / N_RS")


class AnalyticResponse(BaseModel):
    """Response model for closed-form evaluation"""
    success: bool
    sinr_db: Optional[float] = Field(None, description="Long-term average SINR at M")
    gamma_u_db: Optional[float] = Field(None, description="Asymptotic SINR as M grows")
    min_antennas: Optional[float] = Field(None, description="Real-valued minimum antenna count M*")
    min_antennas_ceil: Optional[int] = Field(None, description="Smallest integer M meeting the target")
    required_pt_db: Optional[float] = Field(None, description="P_T/sigma^2 needed at M for the target SINR")
    pf_bound: Optional[float] = Field(None, description="False-alarm bound at the profile kappa")
    notes: List[str] = Field(default_factory=list, description="Infeasibility explanations")
    error: Optional[str] = None


class RarEncodeRequest(BaseModel):
    """Request model for RAR encoding"""
    ta: int = Field(..., ge=0, le=44, description="Timing advance, 0..44 (6 bits)")
    rb_start: int = Field(0, ge=0, le=14, description="First resource block, 0..14 (4 bits)")
    num_rb: int = Field(1, ge=1, le=4, description="Number of resource blocks")


class RarEncodeResponse(BaseModel):
    success: bool
    hex: Optional[str] = Field(None, description="24-bit frame as 6 hex digits")
    bits: Optional[str] = Field(None, description="24-bit frame as a 0/1 string")
    error: Optional[str] = None


class RarDecodeRequest(BaseModel):
    frame_hex: str = Field(..., description="24-bit frame as 6 hex digits")


class RarDecodeResponse(BaseModel):
    success: bool
    status: Optional[str] = Field(None, description="no_rar, crc_fail or success")
    ta: Optional[int] = None
    rb_start: Optional[int] = None
    num_rb: Optional[int] = None
    error: Optional[str] = None


class SimulateRequest(BaseModel):
    """Request model for a small campaign"""
    num_frames: int = Field(50, ge=1, description="Frames to simulate")
    mean_requests: Optional[float] = Field(None, gt=0, description="Mean RA requests per frame")
    seed: Optional[int] = Field(None, ge=0, description="Master seed")
    overrides: List[str] = Field(default_factory=list, description="section.key=value overrides")


class SimulateResponse(BaseModel):
    success: bool
    row: Optional[Dict[str, Any]] = Field(None, description="Campaign CSV row")
    finished_ues: Optional[int] = None
    censored_ues: Optional[int] = None
    ta_error_histogram: Optional[Dict[str, int]] = None
    seed: Optional[int] = None
    execution_time: Optional[float] = None
    error: Optional[str] = None


class PfPdRequest(BaseModel):
    trials: int = Field(200, ge=1, description="Noise-only and single-user trials")
    m: Optional[int] = Field(None, ge=1, description="Number of BS antennas")
    kappa: Optional[float] = Field(None, ge=0, description="Threshold scale")
    seed: Optional[int] = Field(None, ge=0, description="Master seed")


class PfPdResponse(BaseModel):
    success: bool
    m: Optional[int] = None
    kappa: Optional[float] = None
    pf: Optional[float] = None
    pd: Optional[float] = None
    pd_exact_ta: Optional[float] = None
    trials: Optional[int] = None
    error: Optional[str] = None


class ParamsResponse(BaseModel):
    success: bool
    profile: Optional[str] = None
    params: Optional[Dict[str, Any]] = None
    error: Optional[str] = None


class HealthResponse(BaseModel):
    """Health check response"""
    status: str
    service: str
    version: str
    timestamp: datetime
    simulator_initialized: bool
    profile: str
