"""Pulse sequences realizing Z, swap-phase, Hadamard, CZ and CCZ gates.

Each ``synth_*`` function returns a :class:`Synthesis`: the walk graph
(one graph holding every disconnected component walk), the pulse
sequence, and the gate it is meant to implement. Pulses name edge classes
by alias (``"a2'"``, ``"bII"``) or by raw tag; the graph resolves them.
"""

from __future__ import annotations

import enum
import json
import math
from dataclasses import dataclass, field

import numpy as np

from .engine import ReturnKind
from .graphs import (
    Symmetry,
    WalkGraph,
    build_register_graph,
    connected_components,
)
from .solvers import (
    InfeasibleError,
    IntegerSpectrumParams,
    chain4_amplitudes,
    chain5_solve,
    square_b_from_targets,
    square_solve,
)

SCHEMA_VERSION = 1


# ----------------------------------------------------------------------
# data types


@dataclass(frozen=True)
class Pulse:
    """One multicolor pulse.

    ``activations`` maps class names to dimensionless amplitudes; every
    class not mentioned is off. ``fraction`` < 1 stops the pulse early.
    """

    activations: dict
    label: str = ""
    fraction: float = 1.0

    def __post_init__(self):
        object.__setattr__(
            self, "activations", {str(k): complex(v) for k, v in self.activations.items()}
        )
        if not 0.0 <= self.fraction <= 1.0:
            raise ValueError("pulse fraction must lie in [0, 1]")

    @property
    def peak(self) -> float:
        return max((abs(v) for v in self.activations.values()), default=0.0)

    def to_dict(self) -> dict:
        d = {
            "label": self.label,
            "activations": {k: {"re": v.real, "im": v.imag} for k, v in self.activations.items()},
        }
        if self.fraction != 1.0:
            d["fraction"] = self.fraction
        return d

    @classmethod
    def from_dict(cls, d) -> "Pulse":
        acts = {k: complex(v["re"], v.get("im", 0.0)) for k, v in d["activations"].items()}
        return cls(acts, d.get("label", ""), float(d.get("fraction", 1.0)))


@dataclass(frozen=True)
class PulseSequence:
    """Pulses in time order (first applied first)."""

    pulses: tuple
    phase_locked: bool = False
    provenance: dict = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "pulses", tuple(self.pulses))
        if not self.pulses:
            raise ValueError("a pulse sequence needs at least one pulse")

    def to_dict(self) -> dict:
        return {
            "schema_version": SCHEMA_VERSION,
            "phase_locked": self.phase_locked,
            "provenance": self.provenance,
            "pulses": [p.to_dict() for p in self.pulses],
        }

    @classmethod
    def from_dict(cls, d) -> "PulseSequence":
        return cls(
            tuple(Pulse.from_dict(p) for p in d["pulses"]),
            bool(d.get("phase_locked", False)),
            dict(d.get("provenance", {})),
        )


class GateName(enum.Enum):
    Z = "Z"
    SWAP_PHASE = "SwapPhase"
    HADAMARD = "Hadamard"
    CZ = "CZ"
    CCZ = "CCZ"


@dataclass(frozen=True)
class GateSpec:
    """Target gate.

    Diagonal gates (Z, CZ, CCZ) are described by the basis states carrying
    -1; ``minus_states`` defaults to the all-ones state.
    """

    num_qubits: int
    name: GateName
    minus_states: tuple = ()
    phi: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "name", GateName(self.name))
        if not 1 <= self.num_qubits <= 3:
            raise ValueError("num_qubits must be 1, 2 or 3")
        allowed = {GateName.CZ: (2, 3), GateName.CCZ: (3,)}.get(self.name, (1,))
        if self.num_qubits not in allowed:
            raise ValueError(f"{self.name.value} does not act on {self.num_qubits} qubits")
        states = tuple(self.minus_states) or (("1" * self.num_qubits,) if self.is_diagonal else ())
        for s in states:
            if len(s) != self.num_qubits or set(s) - {"0", "1"}:
                raise ValueError(f"invalid basis state {s!r}")
        object.__setattr__(self, "minus_states", states)

    @property
    def is_diagonal(self) -> bool:
        return self.name in (GateName.Z, GateName.CZ, GateName.CCZ)

    def matrix(self) -> np.ndarray:
        if self.name is GateName.SWAP_PHASE:
            return np.array([[0, np.exp(1j * self.phi)], [np.exp(-1j * self.phi), 0]])
        if self.name is GateName.HADAMARD:
            return np.array([[1, 1], [1, -1]], dtype=complex) / math.sqrt(2)
        d = np.ones(2 ** self.num_qubits, dtype=complex)
        for s in self.minus_states:
            d[int(s, 2)] = -1
        return np.diag(d)

    def to_dict(self) -> dict:
        return {
            "num_qubits": self.num_qubits,
            "name": self.name.value,
            "minus_states": list(self.minus_states),
            "phi": self.phi,
        }

    @classmethod
    def from_dict(cls, d) -> "GateSpec":
        return cls(int(d["num_qubits"]), d["name"], tuple(d.get("minus_states", ())),
                   float(d.get("phi", 0.0)))


@dataclass
class Synthesis:
    """A synthesized gate: graph, pulses, target and parameter echo."""

    graph: WalkGraph
    sequence: PulseSequence
    spec: GateSpec
    parameters: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "schema_version": SCHEMA_VERSION,
            "kind": "synthesis",
            "gate": self.spec.to_dict(),
            "parameters": self.parameters,
            "graph": self.graph.to_dict(),
            "sequence": self.sequence.to_dict(),
        }

    def to_json(self, **kw) -> str:
        return json.dumps(self.to_dict(), **kw)

    @classmethod
    def from_dict(cls, d) -> "Synthesis":
        return cls(
            WalkGraph.from_dict(d["graph"]),
            PulseSequence.from_dict(d["sequence"]),
            GateSpec.from_dict(d["gate"]),
            dict(d.get("parameters", {})),
        )


def needs_phase_lock(graph: WalkGraph, sequence: PulseSequence) -> bool:
    """True when any pulse drives a component containing a loop.

    On trees the relative phases of the pulse colors can be gauged away,
    so only looped components need phase-locked harmonics.
    """
    for p in sequence.pulses:
        for comp in connected_components(graph.with_amplitudes(p.activations)):
            if len(comp.edges) >= comp.size:
                return True
    return False


def _finish(graph, pulses, spec, provenance, parameters) -> Synthesis:
    seq = PulseSequence(tuple(pulses), False, provenance)
    seq = PulseSequence(seq.pulses, needs_phase_lock(graph, seq), provenance)
    return Synthesis(graph, seq, spec, parameters)


# ----------------------------------------------------------------------
# single qubit


def _qubit_graph():
    # levels 0, 1 (qubit) and 2 (auxiliary)
    return build_register_graph(1, 3, [(0, (0, 2)), (0, (1, 2))], Symmetry.NON_INTERACTING)


def synth_single_qubit(spec: GateSpec) -> Synthesis:
    """Z, SwapPhase(phi) or Hadamard on one qubit through the auxiliary level 2.

    Z uses a single odd return walk on ``0 - 2``. The other two use the
    three-node chain ``0 - 2 - 1`` with ``|x0|^2 + |x1|^2 = 1``, for which
    the walk operator is ``I - 2 Xi^2``.
    """
    if spec.num_qubits != 1:
        raise ValueError("synth_single_qubit needs a one-qubit spec")
    g = _qubit_graph()
    if spec.name is GateName.Z:
        acts = {"s0:0-2": 1.0}
    elif spec.name is GateName.SWAP_PHASE:
        # U[0,1] = -2 x0 conj(x1) = -exp(i phi)
        acts = {"s0:0-2": np.exp(1j * spec.phi) / math.sqrt(2), "s0:1-2": 1 / math.sqrt(2)}
    elif spec.name is GateName.HADAMARD:
        # |x1| / |x0| = 1 / (sqrt(2) - 1), opposite signs
        x0 = math.sin(math.pi / 8)
        acts = {"s0:0-2": x0, "s0:1-2": -x0 / (math.sqrt(2) - 1)}
    else:
        raise ValueError(f"unsupported single-qubit gate {spec.name.value}")
    return _finish(g, [Pulse(acts, spec.name.value)], spec,
                   {"construction": "single-qubit", "gate": spec.name.value},
                   {"phi": spec.phi})


# ----------------------------------------------------------------------
# two qubits


class CZVariant(enum.Enum):
    SQUARE = "square"
    CHAIN = "chain"


def pair_graph() -> WalkGraph:
    """Two sites, 1-2 transitions, nearest-neighbor resonance classes."""
    return build_register_graph(
        2, 4, [(0, (1, 2)), (1, (1, 2))], Symmetry.INTERMEDIATE_RESONANCE_BASE4
    )


def synth_cz_adjacent(variant="square", *, n1=2, n2=2, m=1, n=3, phi_i=0.0, phi_ii=0.0) -> Synthesis:
    """Single-pulse CZ on neighboring qubits.

    Parameters
    ----------
    variant : {"square", "chain"}
        ``square``: ``|11>`` walks a square and returns with -1, the
        single-excitation walks ``|01>``, ``|10>`` have even amplitudes
        ``n2``, ``n1``. ``chain``: ``n2 = 0`` and odd ``n1`` put -1 on
        ``|10>``; ``|11>`` walks a four-chain with even ``n, m``.
    n1, n2 : int
        Amplitudes on the ``a1`` and ``a2`` classes.
    m, n : int
        Integer spectrum ``+-n, +-m`` of the ``|11>`` walk.
    phi_i, phi_ii : float
        Free phases of the square solution.
    """
    variant = CZVariant(variant)
    g = pair_graph()
    params = {"variant": variant.value, "n1": n1, "n2": n2, "m": m, "n": n,
              "phi_i": phi_i, "phi_ii": phi_ii}
    if variant is CZVariant.SQUARE:
        if n1 == 0 and n2 == 0:
            raise ValueError("n1 = n2 = 0: no coupling")
        for name, v in (("n1", n1), ("n2", n2)):
            if int(v) != v or v <= 0 or int(v) % 2:
                raise ValueError(f"{name} must be a positive even integer, got {v}")
        if int(m) % 2 == 0 or int(n) % 2 == 0 or not 0 < m < n:
            raise ValueError(f"need odd 0 < m < n, got m={m}, n={n}")
        fam = square_solve(ReturnKind.RPI, n1, n2, n, m)
        a1, a2, b1, b2 = fam.evaluate(phi_i=phi_i, phi_ii=phi_ii)
        acts = {"a1": a1, "a2": a2, "b1": b1, "b2": b2}
        minus = "11"
    else:
        if int(n1) != n1 or int(n1) % 2 == 0 or n1 <= 0:
            raise ValueError(f"n1 must be a positive odd integer, got {n1}")
        if int(m) % 2 or int(n) % 2:
            raise ValueError(f"m and n must be even, got m={m}, n={n}")
        if not 0 < m < n1 < n:
            raise ValueError(f"need m < n1 < n, got m={m}, n1={n1}, n={n}")
        a, b, c = chain4_amplitudes(n, m, float(n1))
        acts = {"a1": a, "a2": 0.0, "b1": b, "b2": c}
        minus = "10"
        params["n2"] = 0
    spec = GateSpec(2, GateName.CZ)
    return _finish(g, [Pulse(acts, f"cz-{variant.value}")], spec,
                   {"construction": f"adjacent CZ, {variant.value} walk", "minus_state": minus},
                   params)


def synth_cz_pi_pulses() -> Synthesis:
    """CZ (up to a Z on the first qubit) from four sequential pi-pulses.

    ``|1x> -> |2x>``, a 2-pi rotation on ``|21> <-> |22>``, then back.
    """
    g = pair_graph()
    pulses = [
        Pulse({"a1": 0.5}, "pi a1"),
        Pulse({"b1": 0.5}, "pi b1"),
        Pulse({"b1": 0.5}, "pi b1"),
        Pulse({"a1": 0.5}, "pi a1"),
    ]
    return _finish(g, pulses, GateSpec(2, GateName.CZ),
                   {"construction": "four pi-pulses"}, {})


# ----------------------------------------------------------------------
# three qubits


def cube_graph() -> WalkGraph:
    """Three sites with 0-2 and 1-3 transitions on each."""
    trans = [(s, p) for s in range(3) for p in ((0, 2), (1, 3))]
    return build_register_graph(3, 4, trans, Symmetry.INTERMEDIATE_RESONANCE_BASE4)


def star_register_graph() -> WalkGraph:
    """Three sites sharing one cavity, 1-2 transitions, aux-count classes."""
    return build_register_graph(3, 4, [(s, (1, 2)) for s in range(3)], Symmetry.FULLY_CONNECTED)


def next_nearest_amplitudes(m=1, n=3, k=2) -> tuple:
    """``(|a2|, |b3|, |c1|)`` for the next-nearest CZ.

    ``|c1|^2 + |b3|^2 = k^2`` (three-chain) together with the four-chain
    conditions ``|c1|^2 + |b3|^2 + |a2|^2 = n^2 + m^2``, ``|c1||a2| = nm``.
    """
    for name, v in (("m", m), ("n", n)):
        if int(v) != v or int(v) % 2 == 0:
            raise ValueError(f"{name} must be odd, got {v}")
    if int(k) != k or int(k) % 2 or k <= 0:
        raise ValueError(f"k must be a positive even integer, got {k}")
    if not 0 < m < n:
        raise ValueError(f"need 0 < m < n, got m={m}, n={n}")
    a2sq = n * n + m * m - k * k
    if a2sq <= 0:
        raise InfeasibleError(f"|a2|^2 = n^2+m^2-k^2 = {a2sq} <= 0", "|a2|^2")
    c1sq = (n * m) ** 2 / a2sq
    b3sq = k * k - c1sq
    if b3sq < 0:
        raise InfeasibleError(f"k^2 = {k * k} < forced |c1|^2 = {c1sq:g}", "|b3|^2")
    a2, c1 = math.sqrt(a2sq), math.sqrt(c1sq)
    if not m < c1 < n:
        raise InfeasibleError(f"|c1| = {c1:g} violates m < |c1| < n", "|c1|")
    if not m < a2 < n:
        raise InfeasibleError(f"|a2| = {a2:g} violates m < |a2| < n", "|a2|")
    return a2, math.sqrt(b3sq), c1


def synth_cz_next_nearest(m=1, n=3, k=2) -> Synthesis:
    """CZ between the outer qubits of three, in one multicolor pulse.

    The composed gate carries -1 on ``|0x0>``, i.e. a CZ between qubits 0
    and 2 up to Z dressing and a global sign.
    """
    a2, b3, c1 = next_nearest_amplitudes(m, n, k)
    acts = {"c1": c1, "b3": b3, "a2": a2, "a2'": a2, "b~3'": b3}
    spec = GateSpec(3, GateName.CZ, ("000", "010"))
    return _finish(cube_graph(), [Pulse(acts, "cz-next-nearest")], spec,
                   {"construction": "next-nearest CZ"}, {"m": m, "n": n, "k": k})


def ccz_single_pulse_amplitudes(n=1, m=2, m_prime=2, k=4, k_prime=2,
                                phases=(0.0, 0.0), free_phases=(0.0, math.pi)) -> dict:
    """Class amplitudes of the single-pulse CCZ.

    ``|100>`` takes an odd chain ``aI = n``; ``|101>`` and ``|110>`` take
    three-chains of length ``m``, ``m'``; ``|111>`` walks a five-chain with
    spectrum ``0, +-k, +-k'`` after the square reduction. ``free_phases``
    are the two phases left open by that reduction; the default
    ``(0, pi)`` picks the all-real solution with ``bIII > 0 > cIII``.
    """
    n = int(n)
    if n % 2 == 0 or n <= 0:
        raise ValueError(f"n must be a positive odd integer, got {n}")
    for name, v in (("m", m), ("m'", m_prime)):
        if int(v) != v or int(v) % 2:
            raise ValueError(f"{name} must be even, got {v}")
        if v <= n:
            raise InfeasibleError(f"{name} = {v} must exceed n = {n}", name)
    IntegerSpectrumParams.chain5(k, k_prime)
    b_ii = math.sqrt(m * m - n * n) * np.exp(1j * phases[0])
    c_ii = math.sqrt(m_prime * m_prime - n * n) * np.exp(1j * phases[1])
    b = math.sqrt(abs(b_ii) ** 2 + abs(c_ii) ** 2)
    c, d = chain5_solve(k, k_prime, n, b)
    u = b * c * np.exp(1j * free_phases[0])
    v = b * d * np.exp(1j * free_phases[1])
    c_iii, b_iii = square_b_from_targets(b_ii, c_ii, u, v)
    return {"aI": complex(n), "bII": b_ii, "cII": c_ii, "bIII": b_iii, "cIII": c_iii,
            "chain": (float(n), b, c, d)}


def synth_ccz_single_pulse(n=1, m=2, m_prime=2, k=4, k_prime=2,
                           phases=(0.0, 0.0), free_phases=(0.0, math.pi)) -> Synthesis:
    """CCZ-type gate (-1 on ``|100>``) from one pulse on a shared cavity."""
    amps = ccz_single_pulse_amplitudes(n, m, m_prime, k, k_prime, phases, free_phases)
    acts = {k_: v for k_, v in amps.items() if k_ != "chain"}
    spec = GateSpec(3, GateName.CCZ, ("100",))
    params = {"n": n, "m": m, "m_prime": m_prime, "k": k, "k_prime": k_prime,
              "phases": list(phases), "free_phases": list(free_phases)}
    return _finish(star_register_graph(), [Pulse(acts, "ccz-single")], spec,
                   {"construction": "single-pulse CCZ"}, params)


# middle-pulse classes per target state: (a-type at sqrt(3), b-type at 1)
THREE_PULSE_ROWS = {
    "000": ("a~2'", "b3"),
    "001": ("a~2'", "b3'"),
    "010": ("a~2", "b~3'"),
    "011": ("a~2", "b~3"),
    "100": ("a2", "b3"),
    "101": ("a2", "b3'"),
    "110": ("a2'", "b~3'"),
    "111": ("a2'", "b~3"),
}


def synth_ccz_three_pulse(target_state="111") -> Synthesis:
    """CCZ with the sign on ``target_state`` from three two-color pulses.

    The outer pulses are concurrent pi-pulses on the third qubit's two
    auxiliary transitions. The middle pulse closes a two-chain (-1) only
    from the target's waypoint and three-chains (+1) elsewhere, so the
    composite is ``-1`` everywhere except ``+1`` on the target.
    """
    target_state = str(target_state)
    if target_state not in THREE_PULSE_ROWS:
        raise ValueError(f"target state must be a 3-bit string, got {target_state!r}")
    a_cls, b_cls = THREE_PULSE_ROWS[target_state]
    outer = {"c1": 0.5, "c~1": 0.5}
    pulses = [
        Pulse(outer, "pi c"),
        Pulse({a_cls: math.sqrt(3), b_cls: 1.0}, "walk"),
        Pulse(outer, "pi c"),
    ]
    spec = GateSpec(3, GateName.CCZ, (target_state,))
    return _finish(cube_graph(), pulses, spec,
                   {"construction": "three-pulse CCZ", "row": target_state},
                   {"target_state": target_state})
