"""
Pydantic models for YAML simulation profiles
"""
from pydantic import BaseModel, Field, model_validator
from typing import List, Optional, Literal


class ConfigError(ValueError):
    """Invalid or inconsistent simulation parameters"""


class PrachConfig(BaseModel):
    """Uplink random-access channel layout"""
    n_zc: int = Field(864, gt=0, description="Zadoff-Chu sequence length N_ZC (channel uses)")
    zc_root: int = Field(25, gt=0, description="Zadoff-Chu root index u")
    guard: int = Field(50, gt=0, description="Cyclic-shift spacing G = max round trip + delay spread")
    delay_spread: int = Field(6, gt=0, description="Channel delay spread L (channel uses)")
    prach_bandwidth_mhz: float = Field(1.08, gt=0, description="Sampling rate used for delay quantization")
    cell_radius_km: float = Field(6.0, gt=0, description="Cell radius")
    round_trip_us_per_km: float = Field(6.7, gt=0, description="Round-trip time per km of distance")
    
    class Config:
        extra = "forbid"


class ArrayConfig(BaseModel):
    """Base-station antenna array"""
    num_antennas: int = Field(20, gt=0, description="Number of BS antennas M")
    
    class Config:
        extra = "forbid"


class PowerConfig(BaseModel):
    """Uplink / downlink powers, either linear or in dB (one of each pair)"""
    pu_over_sigma2: Optional[float] = Field(None, gt=0, description="Uplink preamble SNR p_u/sigma^2 (linear)")
    pu_db: Optional[float] = Field(None, description="Uplink preamble SNR in dB")
    pt_over_sigma2: Optional[float] = Field(None, gt=0, description="Total RAR power P_T/sigma^2 (linear)")
    pt_db: Optional[float] = Field(None, description="Total RAR power over noise in dB")
    noise_power: float = Field(1.0, gt=0, description="Noise variance sigma^2")
    noiseless: bool = Field(False, description="Disable every noise source (analysis runs)")
    
    class Config:
        extra = "forbid"
    
    @model_validator(mode="after")
    def _one_of_each(self):
        for linear, db in (("pu_over_sigma2", "pu_db"), ("pt_over_sigma2", "pt_db")):
            if getattr(self, linear) is not None and getattr(self, db) is not None:
                raise ValueError(f"give either power.{linear} or power.{db}, not both")
            if getattr(self, linear) is None and getattr(self, db) is None:
                raise ValueError(f"power.{linear} or power.{db} is required")
        return self
    
    def linear_pu(self) -> float:
        if self.pu_over_sigma2 is not None:
            return float(self.pu_over_sigma2)
        return float(10.0 ** (self.pu_db / 10.0))
    
    def linear_pt(self) -> float:
        if self.pt_over_sigma2 is not None:
            return float(self.pt_over_sigma2)
        return float(10.0 ** (self.pt_db / 10.0))


class DownlinkConfig(BaseModel):
    """Shared-channel resource grid carrying the RAR"""
    n_rs: int = Field(72, gt=0, description="Shared-channel subcarriers N_RS")
    n_sc: int = Field(24, gt=0, description="RAR subcarriers per preamble N_SC")
    num_ofdm_symbols: int = Field(14, gt=0, description="OFDM symbols in the RAR subframe")
    rar_bits: Literal[24] = Field(24, description="RAR length in bits (one bit per subcarrier)")
    
    class Config:
        extra = "forbid"


class ChannelConfig(BaseModel):
    """Multipath profile and optional distance pathloss"""
    pdp: Optional[List[float]] = Field(None, description="Explicit power delay profile, L entries")
    pdp_profile: Literal["uniform", "exponential"] = Field("uniform", description="Generated profile when pdp is absent")
    pdp_decay: float = Field(2.0, gt=0, description="Decay constant (taps) of the exponential profile")
    normalize_pdp: bool = Field(True, description="Scale the profile to unit total energy")
    pathloss_enabled: bool = Field(False, description="Fold log-distance pathloss into the CIR")
    pathloss_exponent: float = Field(3.7, gt=0, description="Pathloss exponent eta")
    min_distance_km: float = Field(0.035, gt=0, description="Distance floor for the pathloss model")
    
    class Config:
        extra = "forbid"


class DetectionConfig(BaseModel):
    """Preamble detection threshold"""
    kappa: Optional[float] = Field(None, ge=0, description="Threshold scale; calibrated from target_pf when absent")
    threshold_mode: Literal["bound", "gaussian"] = Field("gaussian", description="Closed-form calibration used when kappa is absent")
    target_pf: float = Field(1e-3, gt=0, le=1, description="Target false-alarm probability per preamble window")
    
    class Config:
        extra = "forbid"


class ProcedureConfig(BaseModel):
    """Random-access procedure rules"""
    max_repeats: int = Field(5, ge=0, description="Repeat attempts before RA failure")
    num_resource_blocks: int = Field(15, gt=0, le=15, description="Resource blocks cycled through by rb_start")
    
    class Config:
        extra = "forbid"


class CampaignConfig(BaseModel):
    """Monte-Carlo campaign sizing"""
    mean_requests: float = Field(11.0, gt=0, description="Mean new RA requests per frame")
    num_frames: int = Field(2000, ge=1, description="Frames per replication")
    replications: int = Field(4, ge=1, description="Independent replications (fixed work units)")
    master_seed: Optional[int] = Field(None, ge=0, description="Master seed; falls back to settings.MASTER_SEED")
    workers: Optional[int] = Field(None, ge=1, description="Worker processes; falls back to settings.WORKERS")
    upsilon_mode: Literal["analytic", "empirical"] = Field("analytic", description="Beam normalizer source")
    
    class Config:
        extra = "forbid"


class SimulationProfile(BaseModel):
    """Root model of a simulation profile YAML"""
    name: str = Field("default", description="Profile name")
    description: Optional[str] = Field(None, description="Free-text description")
    prach: PrachConfig = Field(default_factory=PrachConfig)
    array: ArrayConfig = Field(default_factory=ArrayConfig)
    power: PowerConfig = Field(default_factory=lambda: PowerConfig(pu_db=-16.9, pt_db=-16.9))
    downlink: DownlinkConfig = Field(default_factory=DownlinkConfig)
    channel: ChannelConfig = Field(default_factory=ChannelConfig)
    detection: DetectionConfig = Field(default_factory=DetectionConfig)
    procedure: ProcedureConfig = Field(default_factory=ProcedureConfig)
    campaign: CampaignConfig = Field(default_factory=CampaignConfig)
    
    class Config:
        extra = "forbid"  # Unknown sections are configuration errors
