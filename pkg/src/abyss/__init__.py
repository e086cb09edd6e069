"""Deterministic simulator and mission-control service for AUV pollution surveys."""

__version__ = "0.1.0"

from . import comms, core, engine, mission, offload, sensing
from .engine import RngStream, SimEngine, SimEvent, derive_stream

__all__ = [
    "RngStream",
    "SimEngine",
    "SimEvent",
    "__version__",
    "comms",
    "core",
    "derive_stream",
    "engine",
    "mission",
    "offload",
    "sensing",
]
