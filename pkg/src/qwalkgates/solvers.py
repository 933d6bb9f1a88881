"""Closed-form return-walk solutions for chains, fans and squares.

Every solver returns either concrete amplitudes or an
:class:`AmplitudeFamily`, a parameterized set whose members all satisfy the
solver's defining equations. Amplitudes are dimensionless (``xi``).

Spectra behind the solutions:

* chain of 2: ``+-|a|``
* chain of 3: ``0, +-sqrt(|a|^2 + |b|^2)``
* chain of 4: ``+-n, +-m`` when ``|a|^2+|b|^2+|c|^2 = n^2+m^2`` and ``|a||c| = nm``
* chain of 5: ``0, +-n, +-m`` when the sum and the product-sum constraints hold
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .engine import ReturnKind
from .graphs import Edge, WalkGraph, chain_graph

TWO_PI = 2.0 * math.pi


class InfeasibleError(ValueError):
    """No amplitudes satisfy the request; ``quantity`` names the violated bound."""

    def __init__(self, message: str, quantity: str = ""):
        super().__init__(message)
        self.quantity = quantity


def _parity_kind(k) -> ReturnKind:
    return ReturnKind.R0 if int(k) % 2 == 0 else ReturnKind.RPI


def _require_int(name, value, minimum=None):
    if isinstance(value, bool) or int(value) != value:
        raise ValueError(f"{name} must be an integer, got {value!r}")
    value = int(value)
    if minimum is not None and value < minimum:
        raise ValueError(f"{name} must be >= {minimum}, got {value}")
    return value


@dataclass(frozen=True)
class IntegerSpectrumParams:
    """Integer spectrum targets shared by the chain and square solvers.

    Use the named constructors; each enforces its own parity and ordering
    rule.
    """

    n: int
    m: int = 0
    kind: ReturnKind = ReturnKind.R0

    @classmethod
    def chain4(cls, n, m):
        n, m = _require_int("n", n, 1), _require_int("m", m, 1)
        if n <= m:
            raise ValueError(f"need n > m, got n={n}, m={m}")
        if (n - m) % 2:
            raise ValueError(f"n and m must share parity, got n={n}, m={m}")
        return cls(n, m, _parity_kind(n))

    @classmethod
    def chain5(cls, n, m):
        n, m = _require_int("n", n, 1), _require_int("m", m, 1)
        if n % 2 or m % 2:
            raise ValueError(f"n and m must both be even, got n={n}, m={m}")
        if n <= m:
            raise ValueError(f"need n > m, got n={n}, m={m}")
        return cls(n, m, ReturnKind.R0)


@dataclass
class AmplitudeFamily:
    """A parameterized set of return-walk amplitudes.

    Attributes
    ----------
    solver : str
        Name of the generating solver.
    params : dict
        Integer parameters fixing the family.
    free_parameters : dict
        Name -> (low, high) interval for each free real parameter.
    predicted : ReturnKind
        Classification every member must produce.
    """

    solver: str
    params: dict
    free_parameters: dict
    predicted: ReturnKind
    _evaluate: Callable = field(repr=False)
    _residual: Callable = field(repr=False)
    _graph: Callable = field(repr=False, default=chain_graph)

    def _values(self, values):
        out = {}
        for name, (lo, hi) in self.free_parameters.items():
            if name not in values:
                raise KeyError(f"missing free parameter {name!r}")
            x = float(values[name])
            if not lo - 1e-12 <= x <= hi + 1e-12:
                raise InfeasibleError(f"{name}={x} outside [{lo}, {hi}]", name)
            out[name] = x
        return out

    def evaluate(self, **values) -> np.ndarray:
        """Edge amplitudes for one member of the family."""
        return np.asarray(self._evaluate(**self._values(values)), dtype=complex)

    def residual(self, **values) -> float:
        """Largest violation of the defining equations (should be ~1e-15)."""
        return float(self._residual(self.evaluate(**values)))

    def graph(self, **values) -> WalkGraph:
        return self._graph(self.evaluate(**values))

    def sample(self, rng: np.random.Generator) -> dict:
        return {k: float(rng.uniform(lo, hi)) for k, (lo, hi) in self.free_parameters.items()}

    def record(self, **values) -> dict:
        amps = self.evaluate(**values)
        return {
            "solver": self.solver,
            "params": dict(self.params),
            "free": {k: float(v) for k, v in values.items()},
            "amplitudes": [{"re": a.real, "im": a.imag} for a in amps],
            "predicted": self.predicted.value,
        }


# ----------------------------------------------------------------------
# two nodes


def chain2_classify(a: float, tol: float = 1e-9) -> ReturnKind:
    """Even ``|a|`` returns trivially, odd ``|a|`` with a sign flip."""
    a = abs(a)
    k = round(a)
    if abs(a - k) > tol:
        return ReturnKind.NOT_RETURN
    return _parity_kind(k)


def chain2_family(k: int) -> AmplitudeFamily:
    k = _require_int("k", k, 0)
    return AmplitudeFamily(
        "chain2", {"k": k}, {"phi": (0.0, TWO_PI)}, _parity_kind(k),
        lambda phi: [k * np.exp(1j * phi)],
        lambda amps: abs(abs(amps[0]) - k),
    )


# ----------------------------------------------------------------------
# three nodes


def chain3_solve(n: int) -> AmplitudeFamily:
    """Amplitudes with ``|a|^2 + |b|^2 = (2n)^2``, parameterized by angle."""
    n = _require_int("n", n, 1)
    r = 2 * n
    return AmplitudeFamily(
        "chain3", {"n": n},
        {"theta": (0.0, math.pi / 2), "phi_a": (0.0, TWO_PI), "phi_b": (0.0, TWO_PI)},
        ReturnKind.R0,
        lambda theta, phi_a, phi_b: [
            r * math.cos(theta) * np.exp(1j * phi_a),
            r * math.sin(theta) * np.exp(1j * phi_b),
        ],
        lambda amps: abs(np.sum(np.abs(amps) ** 2) - r * r) / max(1, r * r),
    )


def chain3_integer_solutions(n: int) -> list:
    """All integer pairs ``(|a|, |b|)`` with ``|a|^2 + |b|^2 = (2n)^2``."""
    n = _require_int("n", n, 1)
    r2 = (2 * n) ** 2
    out = []
    for a in range(2 * n + 1):
        b = math.isqrt(r2 - a * a)
        if b * b == r2 - a * a:
            out.append((a, b))
    return out


def euclid_triples(max_hypotenuse: int) -> list:
    """Triples ``(i^2-j^2, 2ij, i^2+j^2)`` for ``i > j >= 1`` up to a hypotenuse."""
    out = []
    i = 2
    while i * i + 1 <= max_hypotenuse:
        for j in range(1, i):
            c = i * i + j * j
            if c <= max_hypotenuse:
                out.append((i * i - j * j, 2 * i * j, c))
        i += 1
    return sorted(out, key=lambda t: (t[2], t[0]))


def chain3_unitary(omega_a: complex, omega_b: complex, tau: float) -> np.ndarray:
    """Closed-form ``exp(-i tau Lambda)`` for the three-node chain.

    ``Lambda`` has ``omega_a`` at (0, 1) and ``omega_b`` at (1, 2). With
    ``R = sqrt(|omega_a|^2 + |omega_b|^2)``,
    ``U = I + (cos(tau R) - 1) Lambda^2 / R^2 - i sin(tau R) Lambda / R``.
    """
    a, b = complex(omega_a), complex(omega_b)
    r = math.hypot(abs(a), abs(b))
    if r == 0.0:
        return np.eye(3, dtype=complex)
    c = (math.cos(tau * r) - 1.0) / (r * r)
    s = -1j * math.sin(tau * r) / r
    aa, bb = abs(a) ** 2, abs(b) ** 2
    return np.array(
        [
            [1 + c * aa, s * a, c * a * b],
            [s * a.conjugate(), 1 + c * (aa + bb), s * b],
            [c * (a * b).conjugate(), s * b.conjugate(), 1 + c * bb],
        ]
    )


# ----------------------------------------------------------------------
# four nodes


def _chain4_residual(n, m):
    def res(amps):
        a, b, c = np.abs(amps)
        return max(
            abs(a * a + b * b + c * c - n * n - m * m) / (n * n + m * m),
            abs(a * c - n * m) / (n * m),
        )

    return res


def chain4_amplitudes(n: int, m: int, a: float) -> tuple:
    """``(|a|, |b|, |c|)`` for a chosen ``|a|`` in ``[m, n]``."""
    p = IntegerSpectrumParams.chain4(n, m)
    if not p.m - 1e-12 <= a <= p.n + 1e-12:
        raise InfeasibleError(f"|a|={a} outside [{p.m}, {p.n}]", "|a|")
    c = p.n * p.m / a
    b2 = (p.n + p.m) ** 2 - (c + a) ** 2
    b = math.sqrt(max(b2, 0.0))
    return (float(a), b, c)


def chain4_solve(n: int, m: int) -> AmplitudeFamily:
    """Family over ``|a|`` in ``[m, n]`` with ``|c| = nm/|a|``."""
    p = IntegerSpectrumParams.chain4(n, m)

    def ev(a, phi_a, phi_b, phi_c):
        amps = chain4_amplitudes(p.n, p.m, a)
        return [x * np.exp(1j * ph) for x, ph in zip(amps, (phi_a, phi_b, phi_c))]

    return AmplitudeFamily(
        "chain4", {"n": p.n, "m": p.m},
        {"a": (float(p.m), float(p.n)), "phi_a": (0.0, TWO_PI),
         "phi_b": (0.0, TWO_PI), "phi_c": (0.0, TWO_PI)},
        p.kind, ev, _chain4_residual(p.n, p.m),
    )


def chain4_integer(a: int) -> tuple:
    """Integer chain ``(a, a^2 - 1, a)`` with spectrum ``+-1, +-a^2``.

    Only odd ``a`` gives a return walk: for even ``a`` the spectrum mixes
    parities.
    """
    a = _require_int("|a|", a, 2)
    if a % 2 == 0:
        raise InfeasibleError(
            f"|a|={a} is even: (n, m) = ({a * a}, 1) have mixed parity", "parity"
        )
    return (a, a * a - 1, a)


# ----------------------------------------------------------------------
# five nodes


def _chain5_residual(n, m):
    def res(amps):
        a, b, c, d = np.abs(amps) ** 2
        return max(
            abs(a + b + c + d - n * n - m * m) / (n * n + m * m),
            abs(a * c + b * d + a * d - (n * m) ** 2) / (n * m) ** 2,
        )

    return res


def chain5_solve(n: int, m: int, a: float, b: float) -> tuple:
    """Solve for ``(|c|, |d|)`` given ``|a|, |b|``.

    The constraints are linear in ``(|c|^2, |d|^2)``:
    ``|c|^2 + |d|^2 = n^2 + m^2 - |a|^2 - |b|^2`` and
    ``|a|^2 |c|^2 + (|a|^2 + |b|^2) |d|^2 = n^2 m^2``.

    Raises
    ------
    InfeasibleError
        When a square comes out negative or ``|b| = 0`` decouples the chain.
    """
    p = IntegerSpectrumParams.chain5(n, m)
    a2, b2 = float(a) ** 2, float(b) ** 2
    total = p.n ** 2 + p.m ** 2 - a2 - b2
    if total < 0:
        raise InfeasibleError(
            f"|a|^2+|b|^2 = {a2 + b2:g} exceeds n^2+m^2 = {p.n ** 2 + p.m ** 2}",
            "|c|^2+|d|^2",
        )
    if b2 == 0:
        raise InfeasibleError("|b| = 0 splits the chain", "|b|")
    d2 = ((p.n * p.m) ** 2 - a2 * total) / b2
    c2 = total - d2
    tiny = 1e-12 * (p.n ** 2 + p.m ** 2)
    if d2 < -tiny:
        raise InfeasibleError(f"|d|^2 = {d2:g} < 0", "|d|^2")
    if c2 < -tiny:
        raise InfeasibleError(f"|c|^2 = {c2:g} < 0", "|c|^2")
    return (math.sqrt(max(c2, 0.0)), math.sqrt(max(d2, 0.0)))


def chain5_family(n: int, m: int) -> AmplitudeFamily:
    """Family over ``(|a|, |b|)``; infeasible corners raise on evaluation."""
    p = IntegerSpectrumParams.chain5(n, m)
    top = math.sqrt(p.n ** 2 + p.m ** 2)

    def ev(a, b, phi_a, phi_b, phi_c, phi_d):
        c, d = chain5_solve(p.n, p.m, a, b)
        return [x * np.exp(1j * ph) for x, ph in zip((a, b, c, d), (phi_a, phi_b, phi_c, phi_d))]

    free = {"a": (0.0, top), "b": (0.0, top)}
    free.update({f"phi_{x}": (0.0, TWO_PI) for x in "abcd"})
    return AmplitudeFamily("chain5", {"n": p.n, "m": p.m}, free, p.kind, ev,
                           _chain5_residual(p.n, p.m))


def chain5_integer_symmetric(n: int, m: int) -> tuple:
    """Symmetric chain ``(m, q, q, m)`` with ``q = sqrt((n^2 - m^2)/2)``."""
    p = IntegerSpectrumParams.chain5(n, m)
    q = math.sqrt((p.n ** 2 - p.m ** 2) / 2)
    return (float(p.m), q, q, float(p.m))


# ----------------------------------------------------------------------
# fans


def star_graph(amplitudes) -> WalkGraph:
    """Hub ``(0,)`` joined to spokes ``(1,), (2,), ...``."""
    n = len(amplitudes)
    nodes = tuple((i,) for i in range(n + 1))
    edges = tuple(Edge((0,), (j + 1,), amp) for j, amp in enumerate(amplitudes))
    return WalkGraph(nodes, edges)


def fan_classify(amplitudes, tol: float = 1e-9) -> ReturnKind:
    """Classify a fan through its effective two-node amplitude."""
    return chain2_classify(float(np.sqrt(np.sum(np.abs(np.asarray(amplitudes, complex)) ** 2))), tol)


def fan_family(k: int, spokes: int) -> AmplitudeFamily:
    """Fans whose spoke amplitudes have norm ``k``."""
    k = _require_int("k", k, 1)
    spokes = _require_int("spokes", spokes, 1)
    free = {f"w{j}": (0.1, 1.0) for j in range(spokes)}
    free.update({f"phi{j}": (0.0, TWO_PI) for j in range(spokes)})

    def ev(**v):
        w = np.array([v[f"w{j}"] for j in range(spokes)])
        ph = np.array([v[f"phi{j}"] for j in range(spokes)])
        return k * w / np.linalg.norm(w) * np.exp(1j * ph)

    return AmplitudeFamily(
        "fan", {"k": k, "spokes": spokes}, free, _parity_kind(k), ev,
        lambda amps: abs(np.linalg.norm(amps) - k) / k, star_graph,
    )


# ----------------------------------------------------------------------
# squares


def square_graph(a1, a2, b1, b2) -> WalkGraph:
    """Square with corners alpha=(0,), 1=(1,), 2=(2,), beta=(3,)."""
    nodes = ((0,), (1,), (2,), (3,))
    edges = (
        Edge((0,), (1,), a1),
        Edge((0,), (2,), a2),
        Edge((1,), (3,), b1),
        Edge((2,), (3,), b2),
    )
    return WalkGraph(nodes, edges)


def square_b_from_targets(a1, a2, u, v_conj) -> tuple:
    """Invert ``u = a1 b1 + a2 b2`` and ``v* = conj(a2) b1 - conj(a1) b2``.

    The map (b1, b2) -> (u, v*) has determinant ``-(|a1|^2 + |a2|^2)``, so
    every target pair has exactly one preimage.
    """
    a1, a2 = complex(a1), complex(a2)
    s2 = abs(a1) ** 2 + abs(a2) ** 2
    if s2 == 0:
        raise InfeasibleError("a1 = a2 = 0 leaves the square disconnected", "|s|")
    b1 = (a1.conjugate() * u + a2 * v_conj) / s2
    b2 = (a2.conjugate() * u - a1 * v_conj) / s2
    return b1, b2


def square_solve(target, a1, a2, n: int, m: int | None = None) -> AmplitudeFamily:
    """Top amplitudes ``(b1, b2)`` making the square a return walk.

    Parameters
    ----------
    target : ReturnKind or str
        ``Rpi`` uses the non-symmetric branch with odd ``n > m``. ``R0``
        uses the non-symmetric branch with even ``n > m`` when ``m`` is
        given, and the symmetric branch (``sqrt(s^2 + |s'|^2) = 2n``) when
        ``m`` is None.
    a1, a2 : complex
        Fixed bottom amplitudes from corner alpha.

    Returns
    -------
    AmplitudeFamily
        Amplitudes ``(a1, a2, b1, b2)`` over the free phases ``phi_i``
        (and ``phi_ii`` on the non-symmetric branch).
    """
    target = ReturnKind(target)
    if target is ReturnKind.NOT_RETURN:
        raise ValueError("target must be R0 or Rpi")
    a1, a2 = complex(a1), complex(a2)
    s = math.sqrt(abs(a1) ** 2 + abs(a2) ** 2)
    if s == 0:
        raise InfeasibleError("a1 = a2 = 0 leaves the square disconnected", "|s|")

    if m is None:
        if target is ReturnKind.RPI:
            raise InfeasibleError(
                "the symmetric branch has a zero mode, so a sign-flip return is not achievable",
                "branch",
            )
        n = _require_int("n", n, 1)
        if s > 2 * n + 1e-12:
            raise InfeasibleError(f"|s| = {s:g} exceeds 2n = {2 * n}", "|s|")
        u_abs = s * math.sqrt(max(4 * n * n - s * s, 0.0))
        v_abs = 0.0
        params = {"n": n, "branch": "symmetric"}
        free = {"phi_i": (0.0, TWO_PI)}

        def residual(amps):
            a1_, a2_, b1_, b2_ = amps
            sp = abs(a1_ * b1_ + a2_ * b2_) / s
            return max(abs(s * s + sp * sp - 4 * n * n) / (4 * n * n),
                       abs(b1_ * a2_.conjugate() - b2_ * a1_.conjugate()))
    else:
        p = IntegerSpectrumParams.chain4(n, m)
        if p.kind is not target:
            raise ValueError(
                f"(n, m) = ({p.n}, {p.m}) give {p.kind.value}, not {target.value}"
            )
        if not p.m - 1e-12 <= s <= p.n + 1e-12:
            raise InfeasibleError(
                f"sqrt(|a1|^2+|a2|^2) = {s:g} violates m <= s <= n with m={p.m}, n={p.n}",
                "m <= |s| <= n",
            )
        _, sp, _ = chain4_amplitudes(p.n, p.m, min(max(s, p.m), p.n))
        u_abs, v_abs = s * sp, float(p.n * p.m)
        params = {"n": p.n, "m": p.m, "branch": "nonsymmetric"}
        free = {"phi_i": (0.0, TWO_PI), "phi_ii": (0.0, TWO_PI)}
        res4 = _chain4_residual(p.n, p.m)

        def residual(amps):
            a1_, a2_, b1_, b2_ = amps
            sp_ = (a1_ * b1_ + a2_ * b2_) / s
            a_ = (a2_ * b1_.conjugate() - a1_ * b2_.conjugate()) / s
            return res4(np.array([s, sp_, a_]))

    params.update({"target": target.value, "a1": [a1.real, a1.imag], "a2": [a2.real, a2.imag]})

    def ev(phi_i, phi_ii=0.0):
        b1, b2 = square_b_from_targets(
            a1, a2, u_abs * np.exp(1j * phi_i), v_abs * np.exp(1j * phi_ii)
        )
        return [a1, a2, b1, b2]

    return AmplitudeFamily(
        "square", params, free, target, ev, residual, lambda amps: square_graph(*amps)
    )
