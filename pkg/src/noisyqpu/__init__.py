"""Calibration-driven noisy circuit simulation and benchmark harness."""

__version__ = "0.1.0"
