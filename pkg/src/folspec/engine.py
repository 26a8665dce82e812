"""Spectral-sequence pages of a bigraded complex, two independent ways.

``page_dims_direct`` evaluates the closed filtration formula
E_k = Z_k / (Z_{k-1}^{u+1,v-1} + B_{k-1}) cell by cell;
``page_dims_iterated`` starts from the cells (page 0) and repeatedly takes
homology of the induced differential, carrying cycle/boundary representatives
and computing the induced map by lift-apply-project.  The two must agree on
every page of every valid complex, which the test-suite leans on heavily.

Pages are constant from k* = p + q + 2 on (the filtration has length q;
nothing can move past it), so k* serves as E_infinity everywhere.
"""

from __future__ import annotations

import weakref
from dataclasses import dataclass

import numpy as np

from .complexes import BigradedComplex, Cell
from .errors import BackendError, ModelBuildError
from .linalg import (
    Subspace,
    coordinate_subspace,
    image_basis,
    kernel_basis,
    preimage_subspace,
    quotient_dim,
    rank,
    solve_columns,
    subspace_intersection,
    subspace_sum,
    zero_space,
)


@dataclass(frozen=True, eq=False)
class PageTable:
    """Dimensions of one page over the full bidegree rectangle."""

    page: int
    q: int
    p: int
    dims: dict[Cell, int]
    stabilized: bool

    def cell(self, u: int, v: int) -> int:
        return self.dims.get((u, v), 0)

    def row(self, v: int) -> tuple[int, ...]:
        return tuple(self.cell(u, v) for u in range(self.q + 1))

    def degree_sums(self) -> tuple[int, ...]:
        return tuple(
            sum(self.cell(u, r - u) for u in range(self.q + 1)) for r in range(self.p + self.q + 1)
        )

    def euler_characteristic(self) -> int:
        return sum((-1) ** (u + v) * d for (u, v), d in self.dims.items())

    def total_dim(self) -> int:
        return sum(self.dims.values())

    def to_json_dict(self) -> dict:
        return {
            "page": self.page,
            "q": self.q,
            "p": self.p,
            "dims": [[u, v, self.dims[(u, v)]] for (u, v) in sorted(self.dims)],
            "stabilized": self.stabilized,
        }

    @classmethod
    def from_json_dict(cls, data) -> "PageTable":
        q, p = int(data["q"]), int(data["p"])
        dims = {(u, v): 0 for u in range(q + 1) for v in range(p + 1)}
        for u, v, d in data["dims"]:
            dims[(int(u), int(v))] = int(d)
        return cls(
            page=int(data["page"]),
            q=q,
            p=p,
            dims=dims,
            stabilized=bool(data.get("stabilized", False)),
        )


@dataclass(frozen=True, eq=False)
class Subquotient:
    """Cycle/boundary representatives inside one total-degree cell block."""

    cycles: Subspace
    boundaries: Subspace

    @property
    def class_dim(self) -> int:
        return self.cycles.dim - self.boundaries.dim


def stabilization_page(c: BigradedComplex) -> int:
    """A page index at which every tower is constant: p + q + 2."""
    return c.p + c.q + 2


_KNOWN_VALID: "weakref.WeakSet[BigradedComplex]" = weakref.WeakSet()


def _ensure_valid(c: BigradedComplex):
    """Page computations only make sense when d^2 = 0; checked once per complex."""
    if c in _KNOWN_VALID:
        return
    report = c.validate()
    if not report.ok:
        cells = sorted(report.failing_cells())
        raise ModelBuildError(
            f"complex fails d^2 = 0 on cells {cells}; page dimensions undefined", report
        )
    _KNOWN_VALID.add(c)


# ---------------------------------------------------------------------------
# direct filtration formula


def zk(c: BigradedComplex, u: int, v: int, k: int) -> Subspace:
    """Z_k^{u,v} = F_u ∩ d^{-1}(F_{u+k}) inside the degree-(u+v) space."""
    _ensure_valid(c)
    return _zk_space(c, u, u + v, k, {})


def bk(c: BigradedComplex, u: int, v: int, k: int) -> Subspace:
    """B_k^{u,v} = F_u ∩ d(F_{u-k}) inside the degree-(u+v) space."""
    _ensure_valid(c)
    return _bk_space(c, u, u + v, k, {})


def _total_diff(c, r, cache):
    key = ("d", r)
    if key not in cache:
        cache[key] = c.total_differential(r)
    return cache[key]


def _filtration(c, level, r, cache):
    key = ("f", level, r)
    if key not in cache:
        cache[key] = c.filtration_subspace(level, r)
    return cache[key]


def _zk_space(c, u, r, k, cache):
    key = ("z", u, r, k)
    if key not in cache:
        d = _total_diff(c, r, cache)
        target = _filtration(c, u + k, r + 1, cache)
        pre = preimage_subspace(d, target, c.backend)
        cache[key] = subspace_intersection(_filtration(c, u, r, cache), pre, c.backend)
    return cache[key]


def _bk_space(c, u, r, k, cache):
    key = ("b", u, r, k)
    if key not in cache:
        n = c.total_dim(r)
        if r == 0:
            cache[key] = zero_space(n, c.backend)
        else:
            d_prev = _total_diff(c, r - 1, cache)
            src = c.filtration_indices(u - k, r - 1)
            img = image_basis(d_prev[:, src], c.backend)
            cache[key] = subspace_intersection(_filtration(c, u, r, cache), img, c.backend)
    return cache[key]


def _cells_dims(c: BigradedComplex) -> dict[Cell, int]:
    return {(u, v): c.cell_dim(u, v) for u in range(c.q + 1) for v in range(c.p + 1)}


def _dims_direct(c: BigradedComplex, k: int, cache) -> dict[Cell, int]:
    if k == 0:
        return _cells_dims(c)
    dims = {}
    for u in range(c.q + 1):
        for v in range(c.p + 1):
            r = u + v
            numerator = _zk_space(c, u, r, k, cache)
            # both summands already lie inside the level-u block (Z^{u+1} by
            # filtration nesting, B by its own definition), so no further
            # intersection is needed before quotienting
            denominator = subspace_sum(
                _zk_space(c, u + 1, r, k - 1, cache),
                _bk_space(c, u, r, k - 1, cache),
                c.backend,
            )
            dims[(u, v)] = quotient_dim(numerator, denominator, c.backend)
    return dims


def direct_dims(c: BigradedComplex, k: int, cache: dict | None = None) -> dict[Cell, int]:
    """Dimension map of page k by the closed formula; page 0 is the cells.

    Pass one ``cache`` dict across calls on the same complex to share the
    filtration/differential work between pages.
    """
    if k < 0:
        raise ValueError("page index must be >= 0")
    _ensure_valid(c)
    return _dims_direct(c, k, {} if cache is None else cache)


def page_dims_direct(c: BigradedComplex, k: int) -> PageTable:
    """Page k (k >= 1) by the closed Z/B formula, with the stabilization flag.

    The flag needs pages k-1 and k+1 as well: the induced differential d_k
    vanishes exactly when pages k and k+1 have equal total dimension.
    """
    if k < 1:
        raise ValueError("the closed page formula applies for k >= 1")
    _ensure_valid(c)
    cache: dict = {}
    dims = _dims_direct(c, k, cache)
    prev = _dims_direct(c, k - 1, cache)
    nxt = _dims_direct(c, k + 1, cache)
    stabilized = dims == prev and sum(nxt.values()) == sum(dims.values())
    return PageTable(page=k, q=c.q, p=c.p, dims=dims, stabilized=stabilized)


def euler_per_page(c: BigradedComplex, k: int) -> int:
    """Alternating (u+v)-sum of page-k dimensions; independent of k."""
    _ensure_valid(c)
    dims = _dims_direct(c, k, {}) if k >= 1 else _cells_dims(c)
    return sum((-1) ** (u + v) * d for (u, v), d in dims.items())


# ---------------------------------------------------------------------------
# iterated homology


def _initial_carriers(c: BigradedComplex) -> dict[Cell, Subquotient]:
    carriers = {}
    for u in range(c.q + 1):
        for v in range(c.p + 1):
            n = c.total_dim(u + v)
            block = coordinate_subspace(n, c.cell_indices(u, v), c.backend)
            carriers[(u, v)] = Subquotient(block, zero_space(n, c.backend))
    return carriers


def _page_step(c: BigradedComplex, carriers, k: int, cache):
    """One homology step: carriers at page k -> carriers at page k+1.

    Returns (new carriers, induced ranks per source cell).  The induced map
    out of (u, v) is computed by lifting each cycle representative x to
    x + t with t supported on filtration level u+1 such that d(x+t) lands in
    filtration level u+k, then projecting d(x+t) onto the target cell.
    """
    backend = c.backend
    outgoing = {}
    out_image = {}
    for (u, v), sq in carriers.items():
        r = u + v
        n_next = c.total_dim(r + 1)
        ncyc = sq.cycles.dim
        if ncyc == 0:
            y = backend.zeros(n_next, 0)
        else:
            d = _total_diff(c, r, cache)
            z = sq.cycles.basis
            fidx = c.filtration_indices(u + 1, r)
            low = [
                i
                for cu, cv in c.cells_of_degree(r + 1)
                if cu < u + k
                for i in c.cell_indices(cu, cv)
            ]
            x = z.copy()
            if low:
                a = d[low, :][:, fidx] if fidx else backend.zeros(len(low), 0)
                rhs = -d[low, :].dot(z)
                s = solve_columns(a, rhs, backend)
                if fidx:
                    x[fidx, :] += s
            dx = d.dot(x)
            y = backend.zeros(n_next, ncyc)
            target = (u + k, v - k + 1)
            if c.cell_dim(*target) > 0:
                tidx = list(c.cell_indices(*target))
                y[tidx, :] = dx[tidx, :]
        outgoing[(u, v)] = y
        out_image[(u, v)] = image_basis(y, backend)

    new_carriers = {}
    induced_ranks = {}
    for (u, v), sq in carriers.items():
        r = u + v
        n_next = c.total_dim(r + 1)
        target = (u + k, v - k + 1)
        target_boundaries = (
            carriers[target].boundaries if target in carriers else zero_space(n_next, backend)
        )
        y = outgoing[(u, v)]
        induced_ranks[(u, v)] = (
            subspace_sum(out_image[(u, v)], target_boundaries, backend).dim
            - target_boundaries.dim
        )
        if sq.cycles.dim == 0:
            new_cycles = sq.cycles
        else:
            stacked = np.hstack([y, -target_boundaries.basis])
            coeffs = kernel_basis(stacked, backend)
            new_cycles = image_basis(sq.cycles.basis.dot(coeffs.basis[: sq.cycles.dim, :]), backend)
        source = (u - k, v + k - 1)
        if source in out_image and out_image[source].dim > 0:
            new_boundaries = subspace_sum(sq.boundaries, out_image[source], backend)
        else:
            new_boundaries = sq.boundaries
        new_carriers[(u, v)] = Subquotient(new_cycles, new_boundaries)
    return new_carriers, induced_ranks


def cross_validate(c: BigradedComplex, k_max: int) -> bool:
    """Whether the iterated and closed-formula page dimensions agree on 0..k_max."""
    cache: dict = {}
    return all(
        t.dims == _dims_direct(c, t.page, cache) for t in page_dims_iterated(c, k_max)
    )


def page_dims_iterated(c: BigradedComplex, k_max: int) -> list[PageTable]:
    """Pages 0..k_max via E_{k+1} = H(E_k, d_k) on subquotient carriers."""
    if k_max < 0:
        raise ValueError("k_max must be >= 0")
    _ensure_valid(c)
    cache: dict = {}
    carriers = _initial_carriers(c)
    tables = []
    prev_dims = None
    for k in range(k_max + 1):
        dims = {
            cell: quotient_dim(sq.cycles, sq.boundaries, c.backend)
            for cell, sq in carriers.items()
        }
        carriers, ranks = _page_step(c, carriers, k, cache)
        stabilized = (prev_dims is None or dims == prev_dims) and all(
            rk == 0 for rk in ranks.values()
        )
        tables.append(PageTable(page=k, q=c.q, p=c.p, dims=dims, stabilized=stabilized))
        prev_dims = dims
    return tables


# ---------------------------------------------------------------------------
# convergence and adiabatic diagnostics


@dataclass(frozen=True, eq=False)
class EInfinityReport:
    """Degree sums of the limit page against total cohomology dimensions."""

    page: int
    einf_degree_sums: tuple[int, ...]
    betti: tuple[int, ...]
    ok: bool


def total_cohomology(c: BigradedComplex) -> tuple[int, ...]:
    """b_r = dim ker d_r - rank d_{r-1} of the assembled total complex."""
    ranks = [
        rank(c.total_differential(r), c.backend) for r in range(-1, c.p + c.q + 1)
    ]
    out = []
    for r in range(c.p + c.q + 1):
        out.append(c.total_dim(r) - ranks[r + 1] - ranks[r])
    return tuple(out)


def e_infinity_check(c: BigradedComplex) -> EInfinityReport:
    _ensure_valid(c)
    kstar = stabilization_page(c)
    dims = _dims_direct(c, kstar, {})
    sums = tuple(
        sum(d for (u, v), d in dims.items() if u + v == r) for r in range(c.p + c.q + 1)
    )
    betti = total_cohomology(c)
    return EInfinityReport(kstar, sums, betti, sums == betti)


def adiabatic_spectrum(c: BigradedComplex, h: float, r: int) -> np.ndarray:
    """Spectrum of the rescaled Hodge Laplacian on total degree r, ascending.

    d_h weights the components (1, h, h^2); codifferentials are transposes
    because the declared bases are orthonormal.  Float backend only.
    """
    if c.backend.exact:
        raise BackendError("adiabatic spectra require the float backend")
    if not h > 0:
        raise ValueError("h must be positive")
    if not 0 <= r <= c.p + c.q:
        raise ValueError(f"total degree {r} outside 0..{c.p + c.q}")
    weights = (1.0, float(h), float(h) ** 2)
    d_r = c.total_differential(r, weights).astype(float)
    d_prev = c.total_differential(r - 1, weights).astype(float)
    lap = d_prev.dot(d_prev.T) + d_r.T.dot(d_r)
    return np.linalg.eigvalsh((lap + lap.T) / 2.0)


@dataclass(frozen=True, eq=False)
class AdiabaticEntry:
    h: float
    eigenvalues: tuple[float, ...]
    small_count: int


@dataclass(frozen=True, eq=False)
class AdiabaticReport:
    """Monitored small-eigenvalue diagnostic for one total degree.

    ``small_count`` counts eigenvalues <= gap * h^2 where ``gap`` is the
    smallest nonzero eigenvalue at h = 1; the counts are reported next to the
    degree sum of the second page for manual comparison, never asserted.
    """

    degree: int
    kernel_dim: int
    gap: float | None
    e2_degree_sum: int
    entries: tuple[AdiabaticEntry, ...]


def adiabatic_report(c: BigradedComplex, h_values, r: int) -> AdiabaticReport:
    base = adiabatic_spectrum(c, 1.0, r)
    zero_cut = c.backend.rank_tolerance * max(1.0, float(base[-1]) if base.size else 1.0)
    kernel_dim = int(np.sum(base < zero_cut))
    nonzero = base[base >= zero_cut]
    gap = float(nonzero[0]) if nonzero.size else None
    e2 = _dims_direct(c, 2, {})
    e2_sum = sum(d for (u, v), d in e2.items() if u + v == r)
    entries = []
    for h in h_values:
        eigs = adiabatic_spectrum(c, float(h), r)
        if gap is None:
            small = int(eigs.size)
        else:
            small = int(np.sum(eigs <= gap * float(h) ** 2))
        entries.append(AdiabaticEntry(float(h), tuple(float(x) for x in eigs), small))
    return AdiabaticReport(r, kernel_dim, gap, e2_sum, tuple(entries))
