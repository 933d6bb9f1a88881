"""Gate reports: compose pulses, project onto qubits, measure the result."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

from .graphs import WalkGraph, adjacency, format_label
from .linalg import expm_unitary
from .synthesis import GateSpec, PulseSequence, Synthesis

SCHEMA_VERSION = 1
DEFAULT_TOL = 1e-9


def fidelity_up_to_global_phase(u, target) -> float:
    """``|tr(target^dagger u)| / dim``; equals 1 iff ``u = exp(i theta) target``."""
    u, t = np.asarray(u), np.asarray(target)
    if u.shape != t.shape:
        raise ValueError(f"shape mismatch {u.shape} vs {t.shape}")
    return float(abs(np.trace(t.conj().T @ u)) / u.shape[0])


def gate_time_estimate(sequence: PulseSequence, amplitude_cap: float = 1.0) -> float:
    """Gate duration in units of two pi-pulse times.

    Each pulse is stretched until its largest amplitude equals the cap, so
    it costs ``peak / cap`` (a pi-pulse, peak 1/2, costs 1/2).
    """
    if amplitude_cap <= 0:
        raise ValueError("amplitude cap must be positive")
    return float(sum(p.peak * p.fraction for p in sequence.pulses) / amplitude_cap)


def sequence_unitary(graph: WalkGraph, sequence: PulseSequence) -> np.ndarray:
    """Time-ordered product ``U_last ... U_first`` over the full graph."""
    u = np.eye(graph.size, dtype=complex)
    for p in sequence.pulses:
        xi = adjacency(graph.with_amplitudes(p.activations))
        u = expm_unitary(xi, np.pi * p.fraction) @ u
    return u


def phase_polynomial(signs) -> list:
    """Algebraic normal form of a +-1 pattern over computational states.

    ``signs[x] = (-1)^p(x)`` with ``p`` a polynomial over GF(2); the return
    value lists the monomials of ``p`` as sorted qubit tuples (qubit 0 is
    the leftmost bit). ``()`` is a global sign, ``(q,)`` a Z on qubit q,
    ``(p, q)`` a CZ, and so on.
    """
    s = np.asarray(signs)
    dim = s.shape[0]
    nq = dim.bit_length() - 1
    if 1 << nq != dim:
        raise ValueError("length must be a power of two")
    f = (np.real(s) < 0).astype(np.uint8)
    for i in range(nq):
        bit = 1 << i
        for x in range(dim):
            if x & bit:
                f[x] ^= f[x ^ bit]
    terms = []
    for x in range(dim):
        if f[x]:
            terms.append(tuple(q for q in range(nq) if x >> (nq - 1 - q) & 1))
    return sorted(terms, key=lambda t: (len(t), t))


def _sign_pattern(d, tol):
    # unit-modulus diagonal -> (global phase, +-1 array) or None
    ref = d[0] / abs(d[0])
    r = d / ref
    if np.any(np.abs(np.abs(r.imag)) > tol) or np.any(np.abs(np.abs(r.real) - 1) > tol):
        return None
    return ref, np.sign(r.real)


def z_dressing(u, target, tol: float = 1e-9):
    """Z factors turning a diagonal ``u`` into ``target`` up to global phase.

    Returns
    -------
    (qubits, global_phase) or None
        ``None`` when either matrix is not a signed diagonal or the two
        differ by more than single-qubit Z gates.
    """
    u, t = np.asarray(u), np.asarray(target)
    if np.abs(u - np.diag(np.diag(u))).max() > tol or np.abs(t - np.diag(np.diag(t))).max() > tol:
        return None
    pu = _sign_pattern(np.diag(u), tol)
    pt = _sign_pattern(np.diag(t), tol)
    if pu is None or pt is None:
        return None
    terms = phase_polynomial(pu[1] * pt[1])
    if any(len(x) > 1 for x in terms):
        return None
    qubits = [x[0] for x in terms if len(x) == 1]
    glob = pu[0] / pt[0] * (-1 if () in terms else 1)
    return qubits, complex(glob)


def z_operator(qubits, num_qubits) -> np.ndarray:
    d = np.ones(2 ** num_qubits)
    for x in range(2 ** num_qubits):
        for q in qubits:
            if x >> (num_qubits - 1 - q) & 1:
                d[x] *= -1
    return np.diag(d).astype(complex)


@dataclass
class GateReport:
    """Outcome of running a pulse sequence on a walk graph.

    ``fidelity`` compares the raw subspace matrix with the target;
    ``dressed_fidelity`` applies the detected Z factors first (equal to
    ``fidelity`` when no dressing is needed or possible).
    """

    labels: list
    subspace_matrix: np.ndarray
    leakage: float
    fidelity: float
    per_state_phase: dict
    time_units: float
    dressing: list | None = None
    dressed_fidelity: float | None = None
    phase_terms: list | None = None
    target: GateSpec | None = None
    tolerance: float = DEFAULT_TOL
    provenance: dict = field(default_factory=dict)

    @property
    def closed(self) -> bool:
        return self.leakage <= self.tolerance

    def to_dict(self) -> dict:
        def cm(m):
            return [[{"re": float(z.real), "im": float(z.imag)} for z in row] for row in m]

        return {
            "schema_version": SCHEMA_VERSION,
            "kind": "gate_report",
            "labels": list(self.labels),
            "subspace_matrix": cm(self.subspace_matrix),
            "leakage": self.leakage,
            "fidelity": None if math.isnan(self.fidelity) else self.fidelity,
            "dressed_fidelity": self.dressed_fidelity,
            "dressing": None if self.dressing is None else [f"Z{q}" for q in self.dressing],
            "phase_terms": None if self.phase_terms is None else [list(t) for t in self.phase_terms],
            "per_state_phase": {
                k: {"re": v.real, "im": v.imag} for k, v in self.per_state_phase.items()
            },
            "time_units": self.time_units,
            "target": None if self.target is None else self.target.to_dict(),
            "tolerance": self.tolerance,
            "provenance": self.provenance,
        }

    @classmethod
    def from_dict(cls, d) -> "GateReport":
        m = np.array([[complex(z["re"], z["im"]) for z in row] for row in d["subspace_matrix"]])
        dressing = d.get("dressing")
        terms = d.get("phase_terms")
        return cls(
            list(d["labels"]), m, float(d["leakage"]),
            float("nan") if d["fidelity"] is None else float(d["fidelity"]),
            {k: complex(v["re"], v["im"]) for k, v in d["per_state_phase"].items()},
            float(d["time_units"]),
            None if dressing is None else [int(z[1:]) for z in dressing],
            d.get("dressed_fidelity"),
            None if terms is None else [tuple(t) for t in terms],
            None if d.get("target") is None else GateSpec.from_dict(d["target"]),
            float(d.get("tolerance", DEFAULT_TOL)),
            dict(d.get("provenance", {})),
        )

    def to_json(self, **kw) -> str:
        return json.dumps(self.to_dict(), **kw)


def gate_unitary(graph, sequence: PulseSequence | None = None, target: GateSpec | None = None,
                 tol: float = DEFAULT_TOL) -> GateReport:
    """Compose a pulse sequence and report the qubit-subspace gate.

    ``graph`` may also be a :class:`Synthesis`, in which case its sequence
    and target are used unless given explicitly.
    """
    if isinstance(graph, Synthesis):
        sequence = sequence or graph.sequence
        target = target or graph.spec
        graph = graph.graph
    if sequence is None:
        raise ValueError("no pulse sequence given")
    u = sequence_unitary(graph, sequence)
    boolean = graph.boolean_nodes
    idx = [graph.index(b) for b in boolean]
    sub = u[np.ix_(idx, idx)]
    leakage = float(max(0.0, (1.0 - np.sum(np.abs(sub) ** 2, axis=0)).max()))
    labels = [format_label(b) for b in boolean]
    phases = {lab: complex(sub[i, i]) for i, lab in enumerate(labels)}
    report = GateReport(
        labels, sub, leakage, float("nan"), phases, gate_time_estimate(sequence),
        tolerance=tol, provenance=dict(sequence.provenance),
    )
    diag = np.abs(sub - np.diag(np.diag(sub))).max() <= tol
    if diag:
        pat = _sign_pattern(np.diag(sub), tol)
        if pat is not None:
            report.phase_terms = phase_polynomial(pat[1])
    if target is not None:
        t = target.matrix()
        if t.shape != sub.shape:
            raise ValueError(
                f"target acts on {t.shape[0]} states, graph has {sub.shape[0]} boolean nodes"
            )
        report.target = target
        report.fidelity = fidelity_up_to_global_phase(sub, t)
        report.dressed_fidelity = report.fidelity
        found = z_dressing(sub, t, tol) if diag else None
        if found is not None:
            report.dressing = found[0]
            dressed = z_operator(found[0], target.num_qubits) @ sub
            report.dressed_fidelity = fidelity_up_to_global_phase(dressed, t)
    return report


@dataclass(frozen=True)
class Closure:
    passed: bool
    leakage: float


def check_closure(report: GateReport, tol: float = DEFAULT_TOL) -> Closure:
    """Pass when no boolean start state leaves population on auxiliary nodes."""
    return Closure(report.leakage <= tol, report.leakage)
