"""
Simulation profile configuration module
"""
from .models import (
    ConfigError,
    PrachConfig,
    ArrayConfig,
    PowerConfig,
    DownlinkConfig,
    ChannelConfig,
    DetectionConfig,
    ProcedureConfig,
    CampaignConfig,
    SimulationProfile
)
from .loader import ParamsConfigLoader, apply_overrides, build_profile

__all__ = [
    "ConfigError",
    "PrachConfig",
    "ArrayConfig",
    "PowerConfig",
    "DownlinkConfig",
    "ChannelConfig",
    "DetectionConfig",
    "ProcedureConfig",
    "CampaignConfig",
    "SimulationProfile",
    "ParamsConfigLoader",
    "apply_overrides",
    "build_profile"
]
