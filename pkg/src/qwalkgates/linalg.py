"""Dense Hermitian eigendecomposition and spectral matrix exponentials.

Everything else in the package funnels through :func:`eig_hermitian`, so
the phase convention fixed here makes every downstream report
reproducible run to run.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

HERMITIAN_TOL = 1e-12
AMBIGUOUS_OVERLAP = 0.5


class NotHermitianError(ValueError):
    """Raised when a matrix fails the Hermiticity check.

    Attributes
    ----------
    index : tuple of int
        The (row, column) pair with the largest symmetry violation.
    deviation : float
        ``|m[i, j] - conj(m[j, i])|`` at that pair.
    """

    def __init__(self, index, deviation):
        self.index = tuple(int(i) for i in index)
        self.deviation = float(deviation)
        super().__init__(
            f"matrix is not Hermitian: entry {self.index} deviates from the "
            f"conjugate transpose by {self.deviation:.3e}"
        )


@dataclass(frozen=True)
class SpectralDecomposition:
    """Eigenvalues (ascending) and eigenvector columns of a Hermitian matrix."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    @property
    def dim(self) -> int:
        return self.eigenvalues.shape[0]

    def reconstruct(self) -> np.ndarray:
        v = self.eigenvectors
        return (v * self.eigenvalues) @ v.conj().T

    def function(self, fn) -> np.ndarray:
        """Apply a scalar function spectrally, ``V f(diag(lam)) V^dagger``."""
        v = self.eigenvectors
        return (v * fn(self.eigenvalues)) @ v.conj().T


def as_hermitian(m, tol: float = HERMITIAN_TOL) -> np.ndarray:
    """Return ``m`` as a square complex array after checking Hermiticity.

    The tolerance is absolute for matrices with entries of order one and
    scales with the largest entry otherwise, so a register Hamiltonian with
    optical frequencies of 1e4 is held to the same relative standard.
    """
    a = np.asarray(m)
    if a.ndim != 2 or a.shape[0] != a.shape[1] or a.shape[0] < 1:
        raise ValueError(f"expected a non-empty square matrix, got shape {a.shape}")
    diff = np.abs(a - a.conj().T)
    scale = max(1.0, float(np.abs(a).max()))
    worst = np.unravel_index(np.argmax(diff), diff.shape)
    if diff[worst] > tol * scale:
        raise NotHermitianError(worst, diff[worst])
    return a


def _fix_phases(vecs: np.ndarray) -> np.ndarray:
    # largest-magnitude component of every column made real positive
    rows = np.argmax(np.abs(vecs), axis=0)
    pivots = vecs[rows, np.arange(vecs.shape[1])]
    return vecs * (np.abs(pivots) / pivots)


def eig_hermitian(m, tol: float = HERMITIAN_TOL) -> SpectralDecomposition:
    """Diagonalize a Hermitian matrix.

    Parameters
    ----------
    m : array_like
        Square Hermitian matrix (real symmetric input stays real).
    tol : float
        Hermiticity tolerance, see :func:`as_hermitian`.

    Returns
    -------
    SpectralDecomposition
        Eigenvalues ascending; each eigenvector column carries its
        largest-magnitude component real and positive.
    """
    a = as_hermitian(m, tol)
    w, v = np.linalg.eigh(a)
    return SpectralDecomposition(w, _fix_phases(v))


def expm_unitary(m, scale: float = 1.0) -> np.ndarray:
    """Compute ``exp(-i * scale * m)`` for Hermitian ``m`` spectrally."""
    if not np.isfinite(scale):
        raise ValueError("scale must be finite")
    dec = eig_hermitian(m)
    return dec.function(lambda lam: np.exp(-1j * scale * lam))


@dataclass
class Assignment:
    """Result of :func:`max_overlap_assignment`.

    ``mapping[r]`` is the basis column assigned to reference ``r`` and
    ``overlaps[r]`` the modulus ``|<ref|col>|`` achieved. References whose
    overlap fell below the ambiguity threshold are listed in ``ambiguous``.
    """

    mapping: dict = field(default_factory=dict)
    overlaps: dict = field(default_factory=dict)
    ambiguous: list = field(default_factory=list)


def max_overlap_assignment(references, basis, threshold: float = AMBIGUOUS_OVERLAP) -> Assignment:
    """Greedily match reference vectors to basis columns by overlap.

    References are visited in descending order of their best overlap; each
    takes the still-unassigned column that maximizes ``|<ref|col>|``.

    Parameters
    ----------
    references : array_like, shape (k, d)
        Orthonormal reference vectors as rows.
    basis : array_like, shape (d, n)
        Orthonormal columns, ``n >= k``.
    threshold : float
        Overlaps below this are flagged as ambiguous (not an error).
    """
    refs = np.atleast_2d(np.asarray(references))
    cols = np.asarray(basis)
    if refs.shape[1] != cols.shape[0]:
        raise ValueError(
            f"reference dimension {refs.shape[1]} does not match basis dimension {cols.shape[0]}"
        )
    if refs.shape[0] > cols.shape[1]:
        raise ValueError("more references than basis columns")
    ov = np.abs(refs.conj() @ cols)
    order = np.argsort(-ov.max(axis=1), kind="stable")
    free = np.ones(cols.shape[1], dtype=bool)
    out = Assignment()
    for r in order:
        row = np.where(free, ov[r], -1.0)
        c = int(np.argmax(row))
        free[c] = False
        out.mapping[int(r)] = c
        out.overlaps[int(r)] = float(ov[r, c])
        if ov[r, c] < threshold:
            out.ambiguous.append(int(r))
    out.ambiguous.sort()
    return out
