"""Field-generic dense linear algebra and subspace calculus.

Matrices are plain numpy arrays; the scalar field is picked by a
:class:`ScalarBackend`: exact rationals (``fractions.Fraction`` entries in an
object array, no rounding anywhere) or float64 with a relative rank
tolerance.  Every rank-like answer is relative to one backend.

Subspaces are column bases.  The calculus here (kernel, image, sum,
intersection, preimage, quotient dimension) is what the spectral engine
drives; it is deliberately dense and small-scale.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .errors import (
    BackendError,
    ContainmentError,
    DimensionMismatchError,
    InconsistentSystemError,
)

RATIONAL = "rational"
FLOAT = "float"


@dataclass(frozen=True)
class ScalarBackend:
    """Arithmetic context: exact rationals or float64 with a rank tolerance.

    ``rank_tolerance`` is relative: a singular value counts toward the rank
    when it is >= rank_tolerance * (largest singular value) * max(rows, cols).
    It is ignored by the exact backend.
    """

    kind: str = RATIONAL
    rank_tolerance: float = 1e-8

    def __post_init__(self):
        if self.kind not in (RATIONAL, FLOAT):
            raise BackendError(f"unknown scalar backend kind {self.kind!r}")
        if not (self.rank_tolerance >= 0.0):
            raise BackendError("rank_tolerance must be nonnegative")

    @property
    def exact(self) -> bool:
        return self.kind == RATIONAL

    def scalar(self, value):
        """Convert a number or string ('3/2', '-1', '2.19722457') to a scalar."""
        if self.exact:
            if isinstance(value, Fraction):
                return value
            if isinstance(value, str):
                return Fraction(value)
            if isinstance(value, (int, np.integer)):
                return Fraction(int(value))
            if isinstance(value, float):
                return Fraction(value)
            raise BackendError(f"cannot coerce {value!r} to a rational scalar")
        out = float(Fraction(value)) if isinstance(value, str) else float(value)
        if not np.isfinite(out):
            raise BackendError(f"non-finite scalar {value!r}")
        return out

    def matrix(self, rows) -> np.ndarray:
        """Build a matrix from a nested sequence of entries."""
        data = [[self.scalar(x) for x in row] for row in rows]
        nrows = len(data)
        ncols = len(data[0]) if nrows else 0
        if any(len(row) != ncols for row in data):
            raise DimensionMismatchError("ragged rows in matrix data")
        m = self.zeros(nrows, ncols)
        for i, row in enumerate(data):
            for j, x in enumerate(row):
                m[i, j] = x
        return m

    def zeros(self, nrows: int, ncols: int) -> np.ndarray:
        if self.exact:
            return np.full((nrows, ncols), Fraction(0), dtype=object)
        return np.zeros((nrows, ncols), dtype=float)

    def eye(self, n: int) -> np.ndarray:
        m = self.zeros(n, n)
        for i in range(n):
            m[i, i] = self.scalar(1)
        return m


@dataclass(frozen=True, eq=False)
class Subspace:
    """A subspace of R^ambient_dim given by linearly independent basis columns."""

    ambient_dim: int
    basis: np.ndarray  # shape (ambient_dim, dim)

    def __post_init__(self):
        if self.basis.shape[0] != self.ambient_dim:
            raise DimensionMismatchError(
                f"basis has {self.basis.shape[0]} rows for ambient {self.ambient_dim}"
            )

    @property
    def dim(self) -> int:
        return self.basis.shape[1]


def full_space(n: int, backend: ScalarBackend) -> Subspace:
    return Subspace(n, backend.eye(n))


def zero_space(n: int, backend: ScalarBackend) -> Subspace:
    return Subspace(n, backend.zeros(n, 0))


def coordinate_subspace(n: int, indices, backend: ScalarBackend) -> Subspace:
    """Span of the given coordinate axes of R^n."""
    idx = sorted(indices)
    m = backend.zeros(n, len(idx))
    for col, i in enumerate(idx):
        m[i, col] = backend.scalar(1)
    return Subspace(n, m)


# ---------------------------------------------------------------------------
# exact elimination


def _rref(m: np.ndarray):
    """Reduced row echelon form over Fractions; returns (rref, pivot columns)."""
    a = m.copy()
    nrows, ncols = a.shape
    pivots = []
    pr = 0
    for pc in range(ncols):
        pivot_row = None
        for i in range(pr, nrows):
            if a[i, pc] != 0:
                pivot_row = i
                break
        if pivot_row is None:
            continue
        if pivot_row != pr:
            a[[pr, pivot_row], :] = a[[pivot_row, pr], :]
        pv = a[pr, pc]
        if pv != 1:
            a[pr, pc:] = a[pr, pc:] / pv
        for i in range(nrows):
            if i != pr and a[i, pc] != 0:
                a[i, pc:] = a[i, pc:] - a[i, pc] * a[pr, pc:]
        pivots.append(pc)
        pr += 1
        if pr == nrows:
            break
    return a, pivots


def exact_determinant(m: np.ndarray) -> Fraction:
    """Determinant by fraction elimination; exact, square matrices only."""
    nrows, ncols = m.shape
    if nrows != ncols:
        raise DimensionMismatchError("determinant of a non-square matrix")
    a = np.full((nrows, ncols), Fraction(0), dtype=object)
    for i in range(nrows):
        for j in range(ncols):
            a[i, j] = Fraction(m[i, j])
    det = Fraction(1)
    for c in range(ncols):
        pivot_row = None
        for i in range(c, nrows):
            if a[i, c] != 0:
                pivot_row = i
                break
        if pivot_row is None:
            return Fraction(0)
        if pivot_row != c:
            a[[c, pivot_row], :] = a[[pivot_row, c], :]
            det = -det
        det *= a[c, c]
        for i in range(c + 1, nrows):
            if a[i, c] != 0:
                a[i, c:] = a[i, c:] - (a[i, c] / a[c, c]) * a[c, c:]
    return det


# ---------------------------------------------------------------------------
# rank / kernel / image


def _svd_rank(m: np.ndarray, backend: ScalarBackend):
    u, s, vh = np.linalg.svd(m.astype(float), full_matrices=True)
    if s.size == 0 or s[0] == 0.0:
        return 0, u, s, vh
    thr = backend.rank_tolerance * s[0] * max(m.shape)
    return int(np.sum(s >= thr)), u, s, vh


def rank(m: np.ndarray, backend: ScalarBackend) -> int:
    """Dimension of the column space, per the backend's rank rule."""
    if m.size == 0:
        return 0
    if backend.exact:
        return len(_rref(m)[1])
    return _svd_rank(m, backend)[0]


def kernel_basis(m: np.ndarray, backend: ScalarBackend) -> Subspace:
    """Subspace {v : m v = 0} of the domain; dim = cols - rank."""
    nrows, ncols = m.shape
    if ncols == 0:
        return zero_space(0, backend)
    if nrows == 0:
        return full_space(ncols, backend)
    if backend.exact:
        r, pivots = _rref(m)
        pivot_set = set(pivots)
        free = [j for j in range(ncols) if j not in pivot_set]
        basis = backend.zeros(ncols, len(free))
        for col, j in enumerate(free):
            basis[j, col] = Fraction(1)
            for i, pc in enumerate(pivots):
                basis[pc, col] = -r[i, j]
        return Subspace(ncols, basis)
    rk, _, _, vh = _svd_rank(m, backend)
    return Subspace(ncols, np.ascontiguousarray(vh[rk:].T))


def image_basis(m: np.ndarray, backend: ScalarBackend) -> Subspace:
    """Column space of m; dim = rank."""
    nrows, ncols = m.shape
    if nrows == 0:
        return zero_space(0, backend)
    if ncols == 0:
        return zero_space(nrows, backend)
    if backend.exact:
        pivots = _rref(m)[1]
        return Subspace(nrows, m[:, pivots].copy())
    rk, u, _, _ = _svd_rank(m, backend)
    return Subspace(nrows, np.ascontiguousarray(u[:, :rk]))


def subspace_sum(a: Subspace, b: Subspace, backend: ScalarBackend) -> Subspace:
    if a.ambient_dim != b.ambient_dim:
        raise DimensionMismatchError(
            f"sum of subspaces of R^{a.ambient_dim} and R^{b.ambient_dim}"
        )
    return image_basis(np.hstack([a.basis, b.basis]), backend)


def subspace_intersection(a: Subspace, b: Subspace, backend: ScalarBackend) -> Subspace:
    if a.ambient_dim != b.ambient_dim:
        raise DimensionMismatchError(
            f"intersection of subspaces of R^{a.ambient_dim} and R^{b.ambient_dim}"
        )
    if a.dim == 0 or b.dim == 0:
        return zero_space(a.ambient_dim, backend)
    # a x = b y  <=>  (x, y) in ker [a | -b]; the a-part parametrizes a ∩ b
    stacked = np.hstack([a.basis, -b.basis])
    coeffs = kernel_basis(stacked, backend)
    vectors = a.basis.dot(coeffs.basis[: a.dim, :])
    return image_basis(vectors, backend)


def preimage_subspace(m: np.ndarray, w: Subspace, backend: ScalarBackend) -> Subspace:
    """{x : m x in w}, as a subspace of the domain of m."""
    nrows, ncols = m.shape
    if w.ambient_dim != nrows:
        raise DimensionMismatchError(
            f"preimage target lives in R^{w.ambient_dim}, map has {nrows} rows"
        )
    if ncols == 0:
        return zero_space(0, backend)
    # m x = w y  <=>  (x, y) in ker [m | -w]
    stacked = np.hstack([m, -w.basis])
    coeffs = kernel_basis(stacked, backend)
    return image_basis(coeffs.basis[:ncols, :], backend)


def contains(v: Subspace, w: Subspace, backend: ScalarBackend) -> bool:
    """Whether w is a subspace of v (rank test on the joined basis)."""
    if v.ambient_dim != w.ambient_dim:
        raise DimensionMismatchError("containment across different ambients")
    if w.dim == 0:
        return True
    joined = np.hstack([v.basis, w.basis])
    return rank(joined, backend) == rank(v.basis, backend)


def quotient_dim(v: Subspace, w: Subspace, backend: ScalarBackend) -> int:
    """dim(v/w) for w ⊆ v; containment is verified, not assumed."""
    if not contains(v, w, backend):
        raise ContainmentError(
            f"quotient of non-nested subspaces (dim v={v.dim}, dim w={w.dim}, "
            f"ambient={v.ambient_dim}); engine bug or tolerance misconfiguration"
        )
    return v.dim - w.dim


def solve_columns(a: np.ndarray, b: np.ndarray, backend: ScalarBackend) -> np.ndarray:
    """Some x with a x = b, columnwise; raises InconsistentSystemError if none.

    On the float backend the least-squares solution is accepted only when its
    residual is below the declared tolerance.
    """
    nrows, ncols = a.shape
    if b.shape[0] != nrows:
        raise DimensionMismatchError("solve with mismatched row counts")
    if nrows == 0 or ncols == 0:
        x = backend.zeros(ncols, b.shape[1])
        if ncols == 0 and nrows > 0:
            residual = max((abs(e) for e in np.ravel(b)), default=0)
            if residual != 0 and (backend.exact or float(residual) > backend.rank_tolerance):
                raise InconsistentSystemError("empty system with nonzero right-hand side")
        return x
    if backend.exact:
        aug = np.hstack([a, b])
        r, pivots = _rref(aug)
        if pivots and pivots[-1] >= ncols:
            raise InconsistentSystemError("exact linear system has no solution")
        x = backend.zeros(ncols, b.shape[1])
        for i, pc in enumerate(pivots):
            x[pc, :] = r[i, ncols:]
        return x
    x, *_ = np.linalg.lstsq(a.astype(float), b.astype(float), rcond=None)
    resid = a.dot(x) - b
    scale = max(1.0, float(np.max(np.abs(b))) if b.size else 0.0)
    if resid.size and float(np.max(np.abs(resid))) > backend.rank_tolerance * scale * max(a.shape):
        raise InconsistentSystemError(
            "least-squares residual above tolerance: system inconsistent "
            "or rank tolerance misconfigured"
        )
    return x


def symmetric_eigenvalues(m: np.ndarray, backend: ScalarBackend) -> np.ndarray:
    """All eigenvalues of a symmetric matrix, ascending. Float backend only."""
    if backend.exact:
        raise BackendError("symmetric_eigenvalues requires the float backend")
    nrows, ncols = m.shape
    if nrows != ncols:
        raise DimensionMismatchError("eigenvalues of a non-square matrix")
    a = m.astype(float)
    if nrows == 0:
        return np.zeros(0)
    scale = max(1.0, float(np.max(np.abs(a))))
    asym = float(np.max(np.abs(a - a.T)))
    if asym > backend.rank_tolerance * scale * nrows:
        raise DimensionMismatchError(
            f"matrix is not symmetric within tolerance (max asymmetry {asym:g})"
        )
    return np.linalg.eigvalsh((a + a.T) / 2.0)
