"""
Configuration settings for the massive-MIMO random-access simulator
"""
from pydantic_settings import BaseSettings
from pathlib import Path


class Settings(BaseSettings):
    """Application settings"""
    
    # Service Configuration
    SERVICE_NAME: str = "mimo-ra-sim"
    SERVICE_VERSION: str = "1.0.0"
    HOST: str = "0.0.0.0"
    PORT: int = 8010
    
    # Parameter profiles (YAML)
    CONFIG_DIR: Path = Path(__file__).resolve().parent.parent / "schemas"
    PROFILE_NAME: str = "default"  # Profile loaded when none is given
    
    # Monte-Carlo execution
    WORKERS: int = 1  # Worker processes; 1 runs inline
    MASTER_SEED: int = 20190101
    OUTPUT_DIR: Path = Path("results")
    
    # Security
    CORS_ORIGINS: str = "*"
    MAX_API_FRAMES: int = 200  # Upper bound on frames per /api/simulate request
    MAX_API_TRIALS: int = 20000  # Upper bound on trials per /api/pf-pd request
    
    # Tests
    RUN_SLOW_TESTS: bool = False
    
    # Logging
    LOG_LEVEL: str = "INFO"
    
    class Config:
        env_file = ".env"
        case_sensitive = True
        extra = "ignore"  # Ignore extra fields from .env file


# Global settings instance
settings = Settings()
