"""Quantum and classical Fisher information for bosonic phase estimation.

Truncated-Fock-space and covariance-matrix engines, probe-state families
(coherent, squeezed, Fock, ON, vacuum/coherent superpositions), lossy and
thermal channels, closed-form benchmark expressions, and the two-Rabi-gate
qubit-oscillator estimation protocol.
"""

__version__ = "0.1.0"

from . import analysis, channels, closedform, fisher, fock, gaussian, probes, protocol
from .channels import NoiseSpec
from .fock import DensityMatrix, FockDim, OperatorMatrix, OscillatorState
from .probes import ProbeSpec

__all__ = [
    "analysis", "channels", "closedform", "fisher", "fock", "gaussian",
    "probes", "protocol", "NoiseSpec", "DensityMatrix", "FockDim",
    "OperatorMatrix", "OscillatorState", "ProbeSpec", "__version__",
]
