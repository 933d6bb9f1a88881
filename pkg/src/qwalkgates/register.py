"""Quantum-dot chain coupled through cavity modes: spectra and transitions.

Each dot has four levels: spin up (0), spin down (1) and two trions (2, 3)
with optical transitions 0-2 and 1-3. Cavity mode ``k`` sits between dots
``k`` and ``k+1`` and couples to both transitions of both dots with the
full ``(a + a^dagger)`` form. All energies are in units of ``g``.

The Hamiltonian is real symmetric and splits into blocks that conserve
each dot's spin (level mod 2) and the parity of trion plus photon number.
We diagonalize block by block; each block is small (512 states at four
dots) even when the full space is 16384.
"""

from __future__ import annotations

import csv
import io
import itertools
import json
import math
import os
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field, replace
from functools import partial

import numpy as np
import scipy.sparse as sp
from scipy.sparse.csgraph import connected_components as _sparse_components

from .linalg import eig_hermitian, max_overlap_assignment

SCHEMA_VERSION = 1
DIM_CAP_ENV = "QWALKGATES_DIM_CAP"
DEFAULT_DIM_CAP = 20000


class DimensionCapError(ValueError):
    pass


def dimension_cap() -> int:
    raw = os.environ.get(DIM_CAP_ENV)
    if raw is None:
        return DEFAULT_DIM_CAP
    try:
        return int(raw)
    except ValueError:
        raise ValueError(f"{DIM_CAP_ENV} must be an integer, got {raw!r}") from None


@dataclass(frozen=True)
class RegisterModel:
    """Parameters of a dot-cavity chain (energies in units of g).

    Parameters
    ----------
    num_dots : int
        2 to 4 dots; there are ``num_dots - 1`` cavity modes.
    g : float
        Dot-cavity coupling.
    detuning : float
        Offset between neighboring dots' optical frequencies.
    omega0 : float
        Optical (0-2) frequency of even-indexed dots.
    omega_e, omega_t : float
        Electron and trion Zeeman splittings.
    truncation : int
        Photon states kept per mode.
    cavity_frequencies : tuple, optional
        Per-mode frequencies. By default blue modes sit at
        ``omega0 + 2*detuning`` (a detuning above the highest 1-3 line) and
        red modes at ``omega0 - detuning``.
    blue_on_even : bool
        Whether even-indexed modes (counting from 0) are the blue ones.
    restricted : bool
        Blue modes couple only to 1-3 and red modes only to 0-2.
    """

    num_dots: int = 2
    g: float = 1.0
    detuning: float = 10.0
    omega0: float = 1e4
    omega_e: float = 1.0
    omega_t: float = 1.0 / 3.0
    truncation: int = 4
    cavity_frequencies: tuple | None = None
    blue_on_even: bool = True
    restricted: bool = False

    def __post_init__(self):
        if not 2 <= self.num_dots <= 4:
            raise ValueError("num_dots must be 2, 3 or 4")
        if self.truncation < 2:
            raise ValueError("truncation must keep at least 2 photon states")
        if self.cavity_frequencies is not None:
            freqs = tuple(float(x) for x in self.cavity_frequencies)
            if len(freqs) != self.num_modes:
                raise ValueError(
                    f"{self.num_dots} dots need {self.num_modes} cavity frequencies, got {len(freqs)}"
                )
            object.__setattr__(self, "cavity_frequencies", freqs)
        if not (self.omega0 >= 10 * self.detuning and self.detuning >= 3 * abs(self.g)):
            warnings.warn("model is outside the omega0 >> detuning >> g regime", stacklevel=2)

    @property
    def num_modes(self) -> int:
        return self.num_dots - 1

    @property
    def dim(self) -> int:
        return 4 ** self.num_dots * self.truncation ** self.num_modes

    def is_blue(self, mode: int) -> bool:
        return (mode % 2 == 0) == self.blue_on_even

    def cavities(self) -> np.ndarray:
        if self.cavity_frequencies is not None:
            return np.array(self.cavity_frequencies)
        return np.array([
            self.omega0 + 2 * self.detuning if self.is_blue(k) else self.omega0 - self.detuning
            for k in range(self.num_modes)
        ])

    def dot_levels(self, k: int) -> np.ndarray:
        """Energies of levels 0..3 of dot ``k``.

        The trion pair is centered on the dot's optical frequency.
        """
        w = self.omega0 + (k % 2) * self.detuning
        half = 0.5 * self.omega_t
        return np.array([0.0, -self.omega_e, w + half, w - half])

    def to_dict(self) -> dict:
        d = asdict(self)
        d["cavity_frequencies"] = [float(x) for x in self.cavities()]
        return d


# ----------------------------------------------------------------------
# basis and labels


def basis_states(model: RegisterModel) -> list:
    """Product states ``(dots, photons)`` in matrix order."""
    dots = itertools.product(range(4), repeat=model.num_dots)
    return [
        (d, p)
        for d in dots
        for p in itertools.product(range(model.truncation), repeat=model.num_modes)
    ]


def parse_state(text, num_modes: int | None = None) -> tuple:
    """Parse ``"1010"`` or ``"1010;100"`` (dots; photons per mode)."""
    if isinstance(text, tuple) and len(text) == 2 and isinstance(text[0], tuple):
        return text
    s = str(text)
    dots, _, photons = s.partition(";")
    d = tuple(int(c) for c in dots)
    if photons:
        p = tuple(int(c) for c in photons)
    else:
        p = (0,) * (len(d) - 1 if num_modes is None else num_modes)
    return d, p


def format_state(state) -> str:
    d, p = state
    out = "".join(map(str, d))
    if any(p):
        out += ";" + "".join(map(str, p))
    return out


def state_index(model: RegisterModel, state) -> int:
    d, p = parse_state(state, model.num_modes)
    if len(d) != model.num_dots or len(p) != model.num_modes:
        raise ValueError(f"state {state!r} does not fit a {model.num_dots}-dot model")
    if any(x >= model.truncation for x in p) or any(x > 3 for x in d):
        raise ValueError(f"state {state!r} outside the truncated basis")
    i = 0
    for x in d:
        i = i * 4 + x
    for x in p:
        i = i * model.truncation + x
    return i


# ----------------------------------------------------------------------
# Hamiltonian


def _embed(ops, dims):
    out = sp.identity(1, format="csr")
    for op, n in zip(ops, dims):
        out = sp.kron(out, sp.identity(n, format="csr") if op is None else op, format="csr")
    return out


def build_hamiltonian(model: RegisterModel, cap: int | None = None) -> sp.csr_matrix:
    """Sparse real symmetric Hamiltonian in the product basis.

    Raises
    ------
    DimensionCapError
        When the basis is larger than the cap (default 20000, overridable
        through the ``QWALKGATES_DIM_CAP`` environment variable).
    """
    cap = dimension_cap() if cap is None else cap
    if model.dim > cap:
        raise DimensionCapError(
            f"Hilbert space dimension {model.dim} = 4^{model.num_dots} x "
            f"{model.truncation}^{model.num_modes} exceeds the cap {cap}"
        )
    nd, nm, t = model.num_dots, model.num_modes, model.truncation
    dims = [4] * nd + [t] * nm
    h = sp.csr_matrix((model.dim, model.dim))
    for k in range(nd):
        ops = [None] * (nd + nm)
        ops[k] = sp.diags(model.dot_levels(k))
        h = h + _embed(ops, dims)
    number = sp.diags(np.arange(t, dtype=float))
    quad = sp.diags(np.sqrt(np.arange(1, t)), 1) + sp.diags(np.sqrt(np.arange(1, t)), -1)
    wc = model.cavities()
    for j in range(nm):
        ops = [None] * (nd + nm)
        ops[nd + j] = wc[j] * number
        h = h + _embed(ops, dims)
        pairs = [(0, 2), (1, 3)]
        if model.restricted:
            pairs = [(1, 3)] if model.is_blue(j) else [(0, 2)]
        sigma = sp.lil_matrix((4, 4))
        for lo, hi in pairs:
            sigma[lo, hi] = sigma[hi, lo] = 1.0
        for k in (j, j + 1):
            ops = [None] * (nd + nm)
            ops[k] = sigma.tocsr()
            ops[nd + j] = model.g * quad
            h = h + _embed(ops, dims)
    return h.tocsr()


def blocks(h: sp.spmatrix) -> list:
    """Index arrays of the decoupled blocks of a sparse Hermitian matrix."""
    off = h.copy().tolil()
    off.setdiag(0)
    n, lab = _sparse_components(abs(off.tocsr()) > 0, directed=False)
    order = np.argsort(lab, kind="stable")
    splits = np.cumsum(np.bincount(lab, minlength=n))[:-1]
    return [np.sort(ix) for ix in np.split(order, splits)]


# ----------------------------------------------------------------------
# spectrum


@dataclass
class SpectrumTable:
    """Eigenpairs labeled by their largest-overlap product state.

    ``energies`` ascend; ``labels[i]`` is the ``(dots, photons)`` product
    state assigned to eigenvalue ``i`` and ``overlaps[i]`` the modulus of
    that overlap. When only some blocks were diagonalized, the table
    covers just those states.
    """

    energies: np.ndarray
    labels: list
    overlaps: np.ndarray
    ambiguous: list = field(default_factory=list)
    model: RegisterModel | None = None

    def __post_init__(self):
        self._where = {lab: i for i, lab in enumerate(self.labels)}

    def index(self, label) -> int:
        nm = None if self.model is None else self.model.num_modes
        key = parse_state(label, nm)
        try:
            return self._where[key]
        except KeyError:
            raise KeyError(f"state {format_state(key)} not in this spectrum") from None

    def energy(self, label) -> float:
        return float(self.energies[self.index(label)])

    def overlap(self, label) -> float:
        return float(self.overlaps[self.index(label)])

    def to_dict(self) -> dict:
        return {
            "schema_version": SCHEMA_VERSION,
            "kind": "spectrum",
            "model": None if self.model is None else self.model.to_dict(),
            "energies": [float(e) for e in self.energies],
            "labels": [format_state(lab) for lab in self.labels],
            "overlaps": [float(o) for o in self.overlaps],
            "ambiguous": [format_state(lab) for lab in self.ambiguous],
        }


def spectrum(model: RegisterModel, states=None, cap: int | None = None) -> SpectrumTable:
    """Diagonalize and label eigenstates by maximum product-state overlap.

    Parameters
    ----------
    states : iterable of labels, optional
        Restrict the work to the blocks containing these product states.
    """
    h = build_hamiltonian(model, cap)
    basis = basis_states(model)
    parts = blocks(h)
    if states is not None:
        want = {state_index(model, s) for s in states}
        parts = [ix for ix in parts if want.intersection(ix.tolist())]
    energies, labels, overlaps, ambiguous = [], [], [], []
    for ix in parts:
        sub = h[ix][:, ix].toarray()
        dec = eig_hermitian(sub)
        assign = max_overlap_assignment(np.eye(len(ix)), dec.eigenvectors)
        col_to_ref = {c: r for r, c in assign.mapping.items()}
        for c, e in enumerate(dec.eigenvalues):
            r = col_to_ref[c]
            energies.append(e)
            labels.append(basis[ix[r]])
            overlaps.append(assign.overlaps[r])
            if r in assign.ambiguous:
                ambiguous.append(basis[ix[r]])
    order = np.argsort(energies, kind="stable")
    return SpectrumTable(
        np.asarray(energies)[order],
        [labels[i] for i in order],
        np.asarray(overlaps)[order],
        ambiguous,
        model,
    )


def transition_frequency(table: SpectrumTable, a, b) -> float:
    """``omega_{a,b} = E(a) - E(b)`` for labeled eigenstates."""
    return table.energy(a) - table.energy(b)


def level_spacings(table: SpectrumTable) -> np.ndarray:
    """Gaps between neighboring levels of an ascending spectrum."""
    return np.diff(np.asarray(table.energies))


# ----------------------------------------------------------------------
# two-dot transition groups

# (a, b, c, d) stands for omega_{a,b} - omega_{c,d}
TWO_DOT_GROUPS = {
    "i": [("20", "00", "21", "01"), ("30", "00", "31", "01"), ("20", "10", "21", "11")],
    "ii": [
        ("20", "00", "22", "02"), ("21", "01", "23", "03"), ("30", "10", "32", "12"),
        ("31", "11", "33", "13"), ("21", "11", "23", "13"), ("20", "10", "22", "12"),
    ],
    "iii": [("22", "02", "23", "03"), ("33", "13", "32", "12"), ("22", "12", "23", "13")],
}


def _swap(label: str) -> str:
    return label[::-1]


def difference_name(quad) -> str:
    a, b, c, d = quad
    return f"w{a},{b}-w{c},{d}"


def parse_difference(text: str) -> tuple:
    """``"200,000-202,002"`` -> ``("200", "000", "202", "002")``."""
    try:
        left, right = text.replace("w", "").split("-")
        a, b = left.split(",")
        c, d = right.split(",")
    except ValueError:
        raise ValueError(f"malformed transition difference {text!r}") from None
    return a.strip(), b.strip(), c.strip(), d.strip()


def frequency_difference(table: SpectrumTable, quad) -> float:
    a, b, c, d = quad
    return transition_frequency(table, a, b) - transition_frequency(table, c, d)


def transition_groups_two_dot(model: RegisterModel, omega_c: float | None = None) -> dict:
    """The three groups of two-dot transition-frequency differences.

    Each listed difference is accompanied by its partner with the two
    dots' labels swapped, giving 6, 12 and 6 values.

    Returns
    -------
    dict
        Group name -> list of ``(name, value)``.
    """
    if model.num_dots != 2:
        raise ValueError("transition groups are defined for two dots")
    if omega_c is not None:
        model = replace(model, cavity_frequencies=(float(omega_c),))
    table = spectrum(model)
    out = {}
    for name, quads in TWO_DOT_GROUPS.items():
        vals = []
        for q in quads:
            for qq in (q, tuple(_swap(x) for x in q)):
                vals.append((difference_name(qq), frequency_difference(table, qq)))
        out[name] = vals
    return out


def group_summary(groups: dict) -> dict:
    return {
        "group_i_max": max(abs(v) for _, v in groups["i"]),
        "group_ii_min": min(abs(v) for _, v in groups["ii"]),
        "group_iii_min": min(abs(v) for _, v in groups["iii"]),
    }


# ----------------------------------------------------------------------
# four-dot translation splitting


def translation_splitting(model: RegisterModel) -> float:
    """Gap between eigenstates tracking ``|1010, a1+>`` and ``|1010, a3+>``.

    The two states are degenerate by translation symmetry of the
    alternating chain; they split only through virtual processes that
    carry the excitation across the middle cavity.
    """
    if model.num_dots != 4:
        raise ValueError("translation splitting needs four dots")
    a, b = ((1, 0, 1, 0), (1, 0, 0)), ((1, 0, 1, 0), (0, 0, 1))
    table = spectrum(model, states=[a, b])
    return abs(table.energy(a) - table.energy(b))


# ----------------------------------------------------------------------
# sweeps


def locked_partner(model: RegisterModel, omega_c1: float) -> float:
    """Second-cavity frequency at the locked ratio of the default detunings."""
    return omega_c1 * (model.omega0 - model.detuning) / (model.omega0 + 2 * model.detuning)


@dataclass
class SweepResult:
    columns: list
    rows: list
    manifest: dict

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.DictWriter(buf, fieldnames=self.columns, lineterminator="\n")
        w.writeheader()
        for r in self.rows:
            w.writerow({k: (repr(v) if isinstance(v, float) else v) for k, v in r.items()})
        return buf.getvalue()

    def manifest_json(self, **kw) -> str:
        return json.dumps(self.manifest, **kw)


_GROUP_NAMES = ("group_i_max", "group_ii_min", "group_iii_min")


def _sweep_row(model, quantities, locked, mid, w1):
    if model.num_dots == 2:
        freqs = (w1,)
    else:
        w2 = locked_partner(model, w1) if locked else float(model.cavities()[1])
        freqs = (w1, w2)
    table = spectrum(replace(model, cavity_frequencies=freqs))
    row = {"omega_c1": w1}
    if model.num_dots == 3:
        row["omega_c2"] = freqs[1]
    summary = None
    for q in quantities:
        if q in _GROUP_NAMES:
            if summary is None:
                groups = {
                    name: [(difference_name(qq), frequency_difference(table, qq))
                           for qd in quads for qq in (qd, tuple(_swap(x) for x in qd))]
                    for name, quads in TWO_DOT_GROUPS.items()
                }
                summary = group_summary(groups)
            row[q] = summary[q]
        else:
            row[q] = frequency_difference(table, parse_difference(q))
    row["min_overlap"] = float(table.overlaps.min())
    row["ambiguous"] = len(table.ambiguous)
    row["midpoint"] = bool(math.isclose(w1, mid, rel_tol=0, abs_tol=1e-9 * mid))
    return row


def cavity_sweep(model: RegisterModel, omega_c1_values, quantities=None,
                 locked: bool = True, workers: int | None = None) -> SweepResult:
    """Evaluate transition-frequency differences over cavity frequencies.

    Parameters
    ----------
    model : RegisterModel
        Two or three dots.
    omega_c1_values : sequence of float
        Frequencies of the first cavity mode.
    quantities : list of str, optional
        Differences like ``"200,000-202,002"``. For two dots the names
        ``group_i_max``, ``group_ii_min``, ``group_iii_min`` are also
        accepted. Defaults: the group summary (two dots) or
        ``200,000-202,002`` (three dots).
    locked : bool
        Three dots: tie the second mode to the first at the fixed ratio
        ``(omega0 - detuning) / (omega0 + 2 detuning)``; otherwise keep
        the model's second frequency.
    workers : int, optional
        Evaluate points on a thread pool of this size; the dense
        eigensolver releases the GIL. Row order follows the input.
    """
    if model.num_dots not in (2, 3):
        raise ValueError("cavity sweeps support two or three dots")
    if quantities is None:
        quantities = (["group_i_max", "group_ii_min", "group_iii_min"]
                      if model.num_dots == 2 else ["200,000-202,002"])
    for q in quantities:
        if q in _GROUP_NAMES:
            if model.num_dots != 2:
                raise ValueError(f"{q} is defined for two dots only")
        else:
            parse_difference(q)
    mid = model.omega0 + 2 * model.detuning
    columns = ["omega_c1"] + (["omega_c2"] if model.num_dots == 3 else [])
    columns += list(quantities) + ["min_overlap", "ambiguous", "midpoint"]
    values = [float(w) for w in omega_c1_values]
    point = partial(_sweep_row, model, quantities, locked, mid)
    if workers and workers > 1 and len(values) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(point, values))
    else:
        rows = [point(w) for w in values]
    manifest = {
        "schema_version": SCHEMA_VERSION,
        "kind": "cavity_sweep",
        "model": model.to_dict(),
        "locked_ratio": (model.omega0 - model.detuning) / (model.omega0 + 2 * model.detuning)
        if model.num_dots == 3 and locked else None,
        "columns": [
            {"name": c, "unit": "g" if c not in ("ambiguous", "midpoint", "min_overlap") else "-"}
            for c in columns
        ],
    }
    return SweepResult(columns, rows, manifest)
