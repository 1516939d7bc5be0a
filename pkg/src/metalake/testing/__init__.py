"""Local protocol simulators for tests, demos, and frontend development."""

from .simulators import GetSimulator, OaiSimulator, S3Simulator, SimRecord

__all__ = ["GetSimulator", "OaiSimulator", "S3Simulator", "SimRecord"]
