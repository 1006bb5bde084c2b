"""
Massive-MIMO random access simulator

Link-level Monte-Carlo simulation of a grant-based random-access procedure
with group-common timing advance and beamformed RARs, plus the closed-form SINR and
antenna-count toolkit that goes with it.
"""

__version__ = "1.0.0"

from .client import RaSimClient, RarFrameResult

__all__ = [
    "RaSimClient",
    "RarFrameResult"
]
