"""Continuous-time walks in effective time and return classification.

A pulse of effective time ``tau`` drives ``U = exp(-i*pi*Xi)``; stopping
after a fraction ``f`` of it gives ``exp(-i*pi*f*Xi)``. A walk *returns*
when all amplitude is back on the start node at ``f = 1``.
"""

from __future__ import annotations

import csv
import enum
import io
from dataclasses import dataclass

import numpy as np

from .graphs import WalkGraph, adjacency, format_label, parse_label
from .linalg import eig_hermitian, expm_unitary

DEFAULT_TOL = 1e-9
SUPPORT_TOL = 1e-10


class ReturnKind(enum.Enum):
    R0 = "R0"
    RPI = "Rpi"
    NOT_RETURN = "NotReturn"


class Parity(enum.Enum):
    ALL_EVEN = "AllEven"
    ALL_ODD = "AllOdd"
    MIXED = "Mixed"
    NON_INTEGER = "NonInteger"


@dataclass(frozen=True)
class WalkState:
    nodes: tuple
    amplitudes: np.ndarray
    fraction: float

    @property
    def probabilities(self) -> np.ndarray:
        return np.abs(self.amplitudes) ** 2

    def amplitude(self, label) -> complex:
        return complex(self.amplitudes[self.nodes.index(parse_label(label))])


@dataclass(frozen=True)
class ReturnClass:
    kind: ReturnKind
    phase: complex
    leak: float

    def to_dict(self) -> dict:
        return {
            "kind": self.kind.value,
            "phase": {"re": self.phase.real, "im": self.phase.imag},
            "leak": self.leak,
        }


@dataclass(frozen=True)
class SpectrumReport:
    is_integer: bool
    parity: Parity
    eigenvalues: np.ndarray

    def to_dict(self) -> dict:
        return {
            "is_integer": self.is_integer,
            "parity": self.parity.value,
            "eigenvalues": [float(x) for x in self.eigenvalues],
        }


def walk_operator(g: WalkGraph, fraction: float = 1.0) -> np.ndarray:
    """``exp(-i*pi*fraction*Xi)`` in the graph's node order."""
    return expm_unitary(adjacency(g), np.pi * fraction)


def evolve(g: WalkGraph, start, fraction: float = 1.0) -> WalkState:
    """Amplitudes after a fraction of the pulse, starting on one node."""
    if not 0.0 <= fraction <= 1.0:
        raise ValueError("fraction must lie in [0, 1]")
    i = g.index(start)
    u = walk_operator(g, fraction)
    return WalkState(g.nodes, u[:, i].copy(), float(fraction))


def classify_amplitude(amp: complex, tol: float = DEFAULT_TOL) -> ReturnClass:
    leak = max(0.0, 1.0 - abs(amp) ** 2)
    if leak <= tol:
        if abs(amp - 1) <= tol:
            return ReturnClass(ReturnKind.R0, amp, leak)
        if abs(amp + 1) <= tol:
            return ReturnClass(ReturnKind.RPI, amp, leak)
    return ReturnClass(ReturnKind.NOT_RETURN, amp, leak)


def classify_return(g: WalkGraph, start, tol: float = DEFAULT_TOL) -> ReturnClass:
    """Classify the full-pulse walk from ``start`` as R0, Rpi or NotReturn."""
    state = evolve(g, start, 1.0)
    return classify_amplitude(state.amplitude(start), tol)


def classify_all(g: WalkGraph, tol: float = DEFAULT_TOL) -> dict:
    """Return classes for every node, computed from one operator."""
    u = walk_operator(g)
    return {n: classify_amplitude(complex(u[i, i]), tol) for i, n in enumerate(g.nodes)}


def integer_spectrum_report(g: WalkGraph, tol: float = DEFAULT_TOL, start=None) -> SpectrumReport:
    """Test whether the eigenvalues of ``Xi`` are integers of one parity.

    Zero eigenvalues count as even, so a graph with a zero mode can be
    ``ALL_EVEN`` or ``MIXED`` but never ``ALL_ODD``.

    With ``start`` given, only eigenvalues whose eigenvectors overlap the
    start node are tested. That local spectrum decides the return class
    from ``start``: ``ALL_EVEN`` <=> R0, ``ALL_ODD`` <=> Rpi.
    """
    dec = eig_hermitian(adjacency(g))
    lam = dec.eigenvalues
    if start is not None:
        weight = np.abs(dec.eigenvectors[g.index(start)]) ** 2
        lam = lam[weight > SUPPORT_TOL]
    nearest = np.rint(lam)
    if np.any(np.abs(lam - nearest) > tol):
        return SpectrumReport(False, Parity.NON_INTEGER, lam)
    odd = np.mod(nearest.astype(np.int64), 2) == 1
    if odd.all():
        parity = Parity.ALL_ODD
    elif not odd.any():
        parity = Parity.ALL_EVEN
    else:
        parity = Parity.MIXED
    return SpectrumReport(True, parity, lam)


def trajectory(g: WalkGraph, start, samples: int = 64) -> tuple:
    """Sample the walk at ``samples`` evenly spaced fractions in [0, 1].

    Returns
    -------
    fractions : ndarray, shape (samples,)
    amplitudes : ndarray, shape (samples, nodes)
    """
    if samples < 2:
        raise ValueError("need at least two samples")
    i = g.index(start)
    dec = eig_hermitian(adjacency(g))
    fr = np.linspace(0.0, 1.0, samples)
    # project the start vector once, then rotate phases per sample
    coeff = dec.eigenvectors.conj()[i]
    phases = np.exp(-1j * np.pi * np.outer(fr, dec.eigenvalues))
    amps = (phases * coeff) @ dec.eigenvectors.T
    return fr, amps


def trajectory_csv(g: WalkGraph, start, samples: int = 64) -> str:
    """CSV with fraction, norm, and per-node probability and phase columns."""
    fr, amps = trajectory(g, start, samples)
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    names = [format_label(n) for n in g.nodes]
    w.writerow(["fraction", "norm"] + [f"p_{n}" for n in names] + [f"phase_{n}" for n in names])
    for f, row in zip(fr, amps):
        prob = np.abs(row) ** 2
        w.writerow(
            [f"{f:.10g}", f"{np.sqrt(prob.sum()):.15f}"]
            + [f"{p:.15g}" for p in prob]
            + [f"{a:.15g}" for a in np.angle(row)]
        )
    return buf.getvalue()
