"""Calibration snapshots, Kraus channels and the noise-insertion pass."""

from noisyqpu.noise.channels import (
    LITERAL, PHENOMENOLOGICAL, KrausChannel, amplitude_damping_channel, average_gate_fidelity,
    decoherence_channel, dephasing_channel, depolarizing_channel, depolarizing_probability,
    init_error_state, measurement_error_confusion, pure_dephasing_rate,
)
from noisyqpu.noise.model import NoiseModel, NoiseToggles, NoisyProgram, Operation, apply_noise_pass
from noisyqpu.noise.snapshot import (
    DeviceSnapshot, GateParams, QubitParams, median_snapshot, scale_fidelity, synthetic_snapshot,
)

__all__ = [
    "LITERAL", "PHENOMENOLOGICAL", "KrausChannel", "amplitude_damping_channel", "average_gate_fidelity",
    "decoherence_channel", "dephasing_channel", "depolarizing_channel", "depolarizing_probability",
    "init_error_state", "measurement_error_confusion", "pure_dephasing_rate", "NoiseModel",
    "NoiseToggles", "NoisyProgram", "Operation", "apply_noise_pass", "DeviceSnapshot", "GateParams",
    "QubitParams", "median_snapshot", "scale_fidelity", "synthetic_snapshot",
]
