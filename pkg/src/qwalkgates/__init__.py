"""Quantum-walk gate synthesis and verification.

Submodules
----------
linalg     Hermitian eigendecomposition and spectral exponentials
graphs     walk graphs, register graph generators, fan/square reductions
engine     walk evolution and return classification
solvers    closed-form return-walk amplitude families
synthesis  pulse sequences for Z, swap-phase, Hadamard, CZ, CCZ
verify     gate reports, closure, fidelity, timing
register   dot-cavity chain spectra and transition-frequency structure
cli        command-line entry point
"""

__version__ = "0.1.0"

from .engine import ReturnKind, classify_return, evolve, integer_spectrum_report
from .graphs import Edge, Symmetry, WalkGraph, adjacency, build_register_graph, connected_components
from .synthesis import GateSpec, Pulse, PulseSequence
from .verify import GateReport, gate_unitary

__all__ = [
    "Edge", "GateReport", "GateSpec", "Pulse", "PulseSequence", "ReturnKind", "Symmetry",
    "WalkGraph", "adjacency", "build_register_graph", "classify_return",
    "connected_components", "evolve", "gate_unitary", "integer_spectrum_report",
]
