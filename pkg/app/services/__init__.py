"""Services package"""
from .simulation_service import simulation_service, SimulationService
from .sysparams import SystemParams, derive, describe

__all__ = ["simulation_service", "SimulationService", "SystemParams", "derive", "describe"]
