"""Models package"""
from .schemas import (
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

__all__ = [
    "AnalyticRequest",
    "AnalyticResponse",
    "RarEncodeRequest",
    "RarEncodeResponse",
    "RarDecodeRequest",
    "RarDecodeResponse",
    "SimulateRequest",
    "SimulateResponse",
    "PfPdRequest",
    "PfPdResponse",
    "ParamsResponse",
    "HealthResponse"
]
