"""Walk graphs: labeled nodes, oriented complex edges, symmetry classes.

A :class:`WalkGraph` stores edges with an orientation: ``Edge(u, v, xi)``
means ``<u|Xi|v> = xi`` and ``<v|Xi|u> = conj(xi)``, where ``Xi`` is the
dimensionless adjacency (Rabi frequency times effective time over pi).
Register graphs orient every edge from the lower to the upper state of the
driven transition, so two edges sharing a class tag carry literally the
same number.
"""

from __future__ import annotations

import enum
import itertools
import json
from collections import deque
from dataclasses import dataclass, field, replace
from typing import Callable, Iterable, Mapping, Sequence

import numpy as np

SCHEMA_VERSION = 1

Label = tuple  # tuple of int site states, site 0 first


def parse_label(text) -> Label:
    """Parse ``"0123"`` (or ``"10.2.3"`` when any digit exceeds 9) into a tuple."""
    if isinstance(text, tuple):
        return tuple(int(x) for x in text)
    text = str(text).strip()
    if not text:
        raise ValueError("empty node label")
    parts = text.split(".") if "." in text else list(text)
    try:
        return tuple(int(p) for p in parts)
    except ValueError:
        raise ValueError(f"malformed node label {text!r}") from None


def format_label(label: Label) -> str:
    if any(d > 9 for d in label):
        return ".".join(str(d) for d in label)
    return "".join(str(d) for d in label)


def is_boolean(label: Label) -> bool:
    return all(d in (0, 1) for d in label)


def node_order_key(label: Label):
    """Boolean nodes first, then lexicographic by digits."""
    return (not is_boolean(label), len(label), label)


@dataclass(frozen=True)
class Edge:
    """Oriented edge carrying ``<u|Xi|v>``."""

    u: Label
    v: Label
    amplitude: complex = 0j
    tag: str | None = None

    def __post_init__(self):
        object.__setattr__(self, "u", parse_label(self.u))
        object.__setattr__(self, "v", parse_label(self.v))
        object.__setattr__(self, "amplitude", complex(self.amplitude))
        if self.u == self.v:
            raise ValueError(f"self-loop on node {format_label(self.u)}")

    @property
    def key(self) -> frozenset:
        return frozenset((self.u, self.v))

    def amplitude_from(self, node: Label) -> complex:
        """``<node|Xi|other>`` for either endpoint."""
        return self.amplitude if node == self.u else self.amplitude.conjugate()

    def other(self, node: Label) -> Label:
        return self.v if node == self.u else self.u


@dataclass(frozen=True)
class WalkGraph:
    """Immutable walk graph.

    Parameters
    ----------
    nodes : sequence of labels
        Reordered on construction: boolean nodes first, then lexicographic.
    edges : sequence of Edge
    aliases : mapping, optional
        Human names for class tags (for example ``"a2'"``), name -> tag.
    inferred : frozenset, optional
        Tags whose placement was read off a figure rather than pinned by a
        worked example; serialized with a ``figure_inferred`` flag.
    """

    nodes: tuple
    edges: tuple = ()
    aliases: Mapping[str, str] = field(default_factory=dict)
    inferred: frozenset = frozenset()

    def __post_init__(self):
        nodes = sorted({parse_label(n) for n in self.nodes}, key=node_order_key)
        if len(nodes) != len(self.nodes):
            raise ValueError("duplicate node labels")
        object.__setattr__(self, "nodes", tuple(nodes))
        object.__setattr__(self, "edges", tuple(self.edges))
        object.__setattr__(self, "aliases", dict(self.aliases))
        object.__setattr__(self, "inferred", frozenset(self.inferred))
        known = set(nodes)
        seen = set()
        by_tag = {}
        for e in self.edges:
            for end in (e.u, e.v):
                if end not in known:
                    raise ValueError(f"edge endpoint {format_label(end)} is not a node")
            if e.key in seen:
                raise ValueError(
                    f"duplicate edge {format_label(e.u)}-{format_label(e.v)}"
                )
            seen.add(e.key)
            if e.tag is not None:
                prev = by_tag.setdefault(e.tag, e.amplitude)
                if abs(prev - e.amplitude) > 1e-14 * max(1.0, abs(prev)):
                    raise ValueError(f"class {e.tag!r} carries unequal amplitudes")
        object.__setattr__(self, "_index", {n: i for i, n in enumerate(nodes)})

    # ------------------------------------------------------------------
    @property
    def size(self) -> int:
        return len(self.nodes)

    def index(self, label) -> int:
        lab = parse_label(label)
        try:
            return self._index[lab]
        except KeyError:
            raise KeyError(f"unknown node {format_label(lab)}") from None

    def __contains__(self, label) -> bool:
        try:
            return parse_label(label) in self._index
        except ValueError:
            return False

    @property
    def boolean_nodes(self) -> list:
        return [n for n in self.nodes if is_boolean(n)]

    @property
    def classes(self) -> list:
        """Distinct class tags in first-appearance order."""
        return list(dict.fromkeys(e.tag for e in self.edges if e.tag is not None))

    def class_amplitudes(self) -> dict:
        out = {}
        for e in self.edges:
            if e.tag is not None:
                out.setdefault(e.tag, e.amplitude)
        return out

    def resolve(self, name: str) -> str:
        """Map an alias or a raw tag to the raw tag."""
        if name in self.aliases:
            return self.aliases[name]
        if name in set(self.classes):
            return name
        raise KeyError(f"unresolved class name {name!r}")

    def edge_between(self, a, b) -> Edge | None:
        key = frozenset((parse_label(a), parse_label(b)))
        for e in self.edges:
            if e.key == key:
                return e
        return None

    def with_amplitudes(self, activations: Mapping[str, complex]) -> "WalkGraph":
        """Return a copy with class amplitudes set; unmentioned classes are zero.

        Keys may be raw tags or aliases. Untagged edges keep their amplitude.
        """
        values = {}
        for name, val in activations.items():
            values[self.resolve(name)] = complex(val)
        edges = tuple(
            replace(e, amplitude=values.get(e.tag, 0j)) if e.tag is not None else e
            for e in self.edges
        )
        return replace(self, edges=edges)

    def conjugate(self) -> "WalkGraph":
        edges = tuple(replace(e, amplitude=e.amplitude.conjugate()) for e in self.edges)
        return replace(self, edges=edges)

    def subgraph(self, nodes: Iterable) -> "WalkGraph":
        keep = {parse_label(n) for n in nodes}
        edges = tuple(e for e in self.edges if e.u in keep and e.v in keep)
        return replace(self, nodes=tuple(keep), edges=edges)

    def neighbors(self, label, tol: float = 0.0) -> list:
        lab = parse_label(label)
        return [
            e.other(lab)
            for e in self.edges
            if lab in (e.u, e.v) and abs(e.amplitude) > tol
        ]

    # ------------------------------------------------------------------
    def to_dict(self) -> dict:
        labels = {v: k for k, v in self.aliases.items()}
        edges = []
        for e in self.edges:
            rec = {
                "from": format_label(e.u),
                "to": format_label(e.v),
                "re": e.amplitude.real,
                "im": e.amplitude.imag,
                "class": e.tag,
            }
            if e.tag in labels:
                rec["name"] = labels[e.tag]
            if e.tag in self.inferred:
                rec["figure_inferred"] = True
            edges.append(rec)
        return {
            "schema_version": SCHEMA_VERSION,
            "nodes": [format_label(n) for n in self.nodes],
            "edges": edges,
            "aliases": dict(self.aliases),
        }

    @classmethod
    def from_dict(cls, doc: Mapping) -> "WalkGraph":
        try:
            nodes = [parse_label(n) for n in doc["nodes"]]
            edges = []
            inferred = set()
            for rec in doc.get("edges", []):
                edges.append(
                    Edge(
                        rec["from"],
                        rec["to"],
                        complex(float(rec.get("re", 0.0)), float(rec.get("im", 0.0))),
                        rec.get("class"),
                    )
                )
                if rec.get("figure_inferred"):
                    inferred.add(rec.get("class"))
        except (KeyError, TypeError) as exc:
            raise ValueError(f"malformed graph document: {exc}") from None
        return cls(tuple(nodes), tuple(edges), doc.get("aliases", {}), frozenset(inferred))

    def to_json(self, **kw) -> str:
        return json.dumps(self.to_dict(), **kw)

    @classmethod
    def from_json(cls, text: str) -> "WalkGraph":
        return cls.from_dict(json.loads(text))


def adjacency(g: WalkGraph) -> np.ndarray:
    """Dimensionless adjacency ``Xi`` in the graph's node order."""
    m = np.zeros((g.size, g.size), dtype=complex)
    for e in g.edges:
        i, j = g.index(e.u), g.index(e.v)
        m[i, j] = e.amplitude
        m[j, i] = e.amplitude.conjugate()
    return m


def chain_graph(amplitudes: Sequence[complex], tags: Sequence[str] | None = None) -> WalkGraph:
    """Linear chain ``(0,)-(1,)-...`` with consecutive edge amplitudes."""
    n = len(amplitudes) + 1
    nodes = tuple((i,) for i in range(n))
    edges = tuple(
        Edge((i,), (i + 1,), amp, None if tags is None else tags[i])
        for i, amp in enumerate(amplitudes)
    )
    return WalkGraph(nodes, edges)


def connected_components(g: WalkGraph, tol: float = 0.0) -> list:
    """Split ``g`` over edges with ``|amplitude| > tol``.

    Components are returned in order of their first node, each carrying the
    (possibly zero-amplitude) edges internal to it.
    """
    adj = {n: [] for n in g.nodes}
    for e in g.edges:
        if abs(e.amplitude) > tol:
            adj[e.u].append(e.v)
            adj[e.v].append(e.u)
    seen = set()
    out = []
    for start in g.nodes:
        if start in seen:
            continue
        comp = []
        queue = deque([start])
        seen.add(start)
        while queue:
            x = queue.popleft()
            comp.append(x)
            for y in adj[x]:
                if y not in seen:
                    seen.add(y)
                    queue.append(y)
        sub = g.subgraph(comp)
        edges = tuple(e for e in sub.edges if abs(e.amplitude) > tol)
        out.append(replace(sub, edges=edges))
    return out


# ----------------------------------------------------------------------
# register graph generators


class Symmetry(enum.Enum):
    NON_INTERACTING = "NonInteracting"
    INTERMEDIATE_RESONANCE_BASE4 = "IntermediateResonanceBase4"
    INTERMEDIATE_RESONANCE_BASE3 = "IntermediateResonanceBase3"
    FULLY_CONNECTED = "FullyConnected"
    CUSTOM = "Custom"


# Neighbor states that shift a site's transition in each nearest-neighbor
# variant. In the base-3 ladder only the level coupled through the shared
# cavity (2) does; level 3 behaves like a spectator.
_SHIFTING = {
    Symmetry.INTERMEDIATE_RESONANCE_BASE4: (2, 3),
    Symmetry.INTERMEDIATE_RESONANCE_BASE3: (2,),
}


def _tag(symmetry, site, lo, hi, node):
    base = f"s{site}:{lo}-{hi}"
    if symmetry is Symmetry.NON_INTERACTING:
        return base
    if symmetry is Symmetry.FULLY_CONNECTED:
        aux = sum(1 for k, d in enumerate(node) if k != site and d >= 2)
        return f"{base}|aux{aux}"
    shifting = _SHIFTING[symmetry]
    parts = [base]
    for nb in (site - 1, site + 1):
        if 0 <= nb < len(node) and node[nb] in shifting:
            parts.append(f"s{nb}={node[nb]}")
    return "|".join(parts)


# Named class layouts for the standard graph sets. Sites 0, 1, 2 carry the
# letters a, b, c. A tilde marks the 1-3 transition, a prime the swapped
# neighbor state.
CUBE_ALIASES = {
    "c1": "s2:0-2",
    "c~1": "s2:1-3",
    "b3": "s1:0-2|s2=2",
    "b3'": "s1:0-2|s2=3",
    "b~3": "s1:1-3|s2=3",
    "b~3'": "s1:1-3|s2=2",
    "a2": "s0:0-2|s1=2",
    "a2'": "s0:0-2|s1=3",
    "a~2": "s0:1-3|s1=3",
    "a~2'": "s0:1-3|s1=2",
}

PAIR_ALIASES = {
    "a1": "s0:1-2",
    "a2": "s1:1-2",
    "b1": "s1:1-2|s0=2",
    "b2": "s0:1-2|s1=2",
}

STAR_ALIASES = {
    "aI": "s0:1-2|aux0",
    "bII": "s2:1-2|aux1",
    "cII": "s1:1-2|aux1",
    "bIII": "s2:1-2|aux2",
    "cIII": "s1:1-2|aux2",
}


def _known_layout(num_sites, transitions, symmetry):
    trans = set(transitions)
    if symmetry is Symmetry.INTERMEDIATE_RESONANCE_BASE4:
        if num_sites == 3 and trans == {(s, p) for s in range(3) for p in ((0, 2), (1, 3))}:
            return CUBE_ALIASES
        if num_sites == 2 and trans == {(0, (1, 2)), (1, (1, 2))}:
            return PAIR_ALIASES
    if symmetry is Symmetry.FULLY_CONNECTED:
        if num_sites == 3 and trans == {(s, (1, 2)) for s in range(3)}:
            return STAR_ALIASES
    return {}


def build_register_graph(
    num_sites: int,
    site_alphabet=4,
    active_transitions: Iterable = (),
    symmetry: Symmetry | str = Symmetry.NON_INTERACTING,
    custom_tag: Callable | None = None,
) -> WalkGraph:
    """Build the transition network of a register with all amplitudes zero.

    Parameters
    ----------
    num_sites : int
        Number of qubits (at most 4).
    site_alphabet : int or sequence of int
        States per site.
    active_transitions : iterable of (site, (lo, hi))
        Driven transitions. Nodes are everything reachable from the boolean
        nodes through them.
    symmetry : Symmetry
        Rule that assigns class tags. ``CUSTOM`` calls
        ``custom_tag(site, lo, hi, lower_node)``.

    Returns
    -------
    WalkGraph
        Edges oriented lower -> upper state, amplitude zero. Use
        :meth:`WalkGraph.with_amplitudes` to drive classes.
    """
    symmetry = Symmetry(symmetry)
    if not 1 <= num_sites <= 4:
        raise ValueError("num_sites must be between 1 and 4")
    if isinstance(site_alphabet, int):
        alphabet = (site_alphabet,) * num_sites
    else:
        alphabet = tuple(int(a) for a in site_alphabet)
    if len(alphabet) != num_sites or min(alphabet) < 2:
        raise ValueError("site_alphabet must give at least 2 states for every site")
    trans = []
    for site, pair in active_transitions:
        lo, hi = sorted(int(x) for x in pair)
        if not 0 <= site < num_sites:
            raise ValueError(f"transition on nonexistent site {site}")
        if lo == hi or hi >= alphabet[site]:
            raise ValueError(f"transition {lo}-{hi} invalid for site {site} alphabet")
        trans.append((int(site), (lo, hi)))
    if symmetry in _SHIFTING and set(alphabet) != {4}:
        raise ValueError(f"{symmetry.value} requires a 4-state alphabet on every site")
    if symmetry is Symmetry.INTERMEDIATE_RESONANCE_BASE3:
        bad = [t for t in trans if t[1][1] - t[1][0] != 1]
        if bad:
            raise ValueError(
                f"{symmetry.value} supports only adjacent-level transitions, got {bad}"
            )
    if symmetry is Symmetry.CUSTOM and custom_tag is None:
        raise ValueError("custom symmetry needs a custom_tag callable")

    start = [b for b in itertools.product((0, 1), repeat=num_sites)]
    seen = set(start)
    queue = deque(start)
    edges = {}
    while queue:
        x = queue.popleft()
        for site, (lo, hi) in trans:
            if x[site] not in (lo, hi):
                continue
            y = x[:site] + ((hi if x[site] == lo else lo),) + x[site + 1:]
            lower, upper = (x, y) if x[site] == lo else (y, x)
            key = frozenset((lower, upper))
            if key not in edges:
                if symmetry is Symmetry.CUSTOM:
                    tag = custom_tag(site, lo, hi, lower)
                else:
                    tag = _tag(symmetry, site, lo, hi, lower)
                edges[key] = Edge(lower, upper, 0j, tag)
            if y not in seen:
                seen.add(y)
                queue.append(y)
    aliases = _known_layout(num_sites, trans, symmetry)
    tags = {e.tag for e in edges.values()}
    inferred = frozenset(tags - set(aliases.values())) if aliases else frozenset()
    return WalkGraph(tuple(seen), tuple(edges.values()), aliases, inferred)


# ----------------------------------------------------------------------
# reductions


@dataclass(frozen=True)
class FanReduction:
    """Star graph collapsed onto hub and the normalized spoke state."""

    graph: WalkGraph
    amplitude: float
    weights: dict  # spoke label -> coefficient of that spoke in |s>


def reduce_fan(g: WalkGraph, hub) -> FanReduction:
    """Collapse a star centered on ``hub`` to a two-node chain.

    The effective amplitude is ``sqrt(sum |a_j|^2)`` with ``a_j = <hub|Xi|j>``;
    the collapsed state is ``|s> = sum_j conj(a_j) |j> / |a|``.
    """
    hub = parse_label(hub)
    g.index(hub)
    amps = {}
    for e in g.edges:
        if hub not in (e.u, e.v):
            if abs(e.amplitude) > 0:
                raise ValueError("graph is not a star around the given hub")
            continue
        amps[e.other(hub)] = e.amplitude_from(hub)
    norm = float(np.sqrt(sum(abs(a) ** 2 for a in amps.values())))
    weights = {j: a.conjugate() / norm for j, a in amps.items()} if norm > 0 else {}
    return FanReduction(chain_graph([norm]), norm, weights)


@dataclass(frozen=True)
class SquareReduction:
    """Square graph rewritten as a chain ``alpha - s - beta [- a]``.

    ``basis`` holds the chain states as columns, in the original graph's node
    order, with columns ordered (alpha, s, beta, a). The fourth state is kept
    even when it decouples, so :meth:`lift` always returns a full 4x4
    operator.
    """

    original: WalkGraph
    chain: WalkGraph
    basis: np.ndarray
    symmetric: bool
    partitioned: bool
    corners: tuple  # (alpha, 1, 2, beta)
    s: float
    s_prime: complex
    a: complex

    def lift(self, chain_operator: np.ndarray) -> np.ndarray:
        u = np.eye(4, dtype=complex)
        k = chain_operator.shape[0]
        u[:k, :k] = chain_operator
        return self.basis @ u @ self.basis.conj().T


def reduce_square(g: WalkGraph, alpha=None, tol: float = 1e-12) -> SquareReduction:
    """Reduce a 4-cycle with corners alpha, 1, 2, beta to a chain.

    Parameters
    ----------
    g : WalkGraph
        Exactly four nodes on a cycle. Edge amplitudes are read as
        ``a1 = <alpha|Xi|1>``, ``a2 = <alpha|Xi|2>``, ``b1 = <1|Xi|beta>``,
        ``b2 = <2|Xi|beta>``.
    alpha : label, optional
        Starting corner; defaults to the first node in graph order. Corners
        1 and 2 are its neighbors in graph order.

    Returns
    -------
    SquareReduction
        Three-node chain ``(s, s')`` when ``b1 conj(a2) == b2 conj(a1)``,
        otherwise four-node chain ``(s, s', a)``.
    """
    if g.size != 4 or len(g.edges) != 4:
        raise ValueError("square reduction needs exactly four nodes and four edges")
    alpha = g.nodes[0] if alpha is None else parse_label(alpha)
    nbrs = sorted(
        (e.other(alpha) for e in g.edges if alpha in (e.u, e.v)), key=node_order_key
    )
    if len(nbrs) != 2:
        raise ValueError("input is not a 4-cycle")
    (beta,) = [n for n in g.nodes if n != alpha and n not in nbrs] or [None]
    n1, n2 = nbrs
    e = {k: g.edge_between(*k) for k in ((alpha, n1), (alpha, n2), (n1, beta), (n2, beta))}
    if any(v is None for v in e.values()):
        raise ValueError("input is not a 4-cycle")
    a1 = e[(alpha, n1)].amplitude_from(alpha)
    a2 = e[(alpha, n2)].amplitude_from(alpha)
    b1 = e[(n1, beta)].amplitude_from(n1)
    b2 = e[(n2, beta)].amplitude_from(n2)
    s = float(np.sqrt(abs(a1) ** 2 + abs(a2) ** 2))
    if s == 0.0:
        raise ValueError("degenerate square: both alpha amplitudes are zero")
    s_prime = (a1 * b1 + a2 * b2) / s
    a = (a2 * b1.conjugate() - a1 * b2.conjugate()) / s
    scale = max(1.0, abs(a1), abs(a2), abs(b1), abs(b2)) ** 2
    symmetric = abs(b1 * a2.conjugate() - b2 * a1.conjugate()) <= tol * scale
    partitioned = abs(s_prime) <= tol * max(1.0, s)

    basis = np.zeros((4, 4), dtype=complex)
    ia, i1, i2, ib = (g.index(x) for x in (alpha, n1, n2, beta))
    basis[ia, 0] = 1.0
    basis[i1, 1] = a1.conjugate() / s
    basis[i2, 1] = a2.conjugate() / s
    basis[ib, 2] = 1.0
    basis[i1, 3] = a2 / s
    basis[i2, 3] = -a1 / s
    amps = [s, s_prime] if symmetric else [s, s_prime, a]
    chain = chain_graph(amps)
    return SquareReduction(
        g, chain, basis, bool(symmetric), bool(partitioned),
        (alpha, n1, n2, beta), s, complex(s_prime), complex(0 if symmetric else a),
    )
