"""Finite bigraded cochain complexes with a three-component differential.

A complex lives on the rectangle 0 <= u <= q (transverse degree),
0 <= v <= p (leafwise degree).  The differential splits into components
d01: (u,v) -> (u,v+1), d10: (u,v) -> (u+1,v) and d2m1: (u,v) -> (u+2,v-1);
d^2 = 0 is equivalent to five bidegree relations, one per target shift
(0,2), (1,1), (2,0), (3,-1), (4,-2).

The declared basis of every cell is orthonormal, so codifferential
components are plain transposes of the d components.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatchError
from .linalg import ScalarBackend, Subspace, coordinate_subspace, zero_space

Cell = tuple[int, int]

# relation name -> (target shift, summands as [(outer component, inner component)])
D_SQUARED_RELATIONS = (
    ("i", (0, 2), (("d01", "d01"),)),
    ("ii", (1, 1), (("d01", "d10"), ("d10", "d01"))),
    ("iii", (2, 0), (("d10", "d10"), ("d01", "d2m1"), ("d2m1", "d01"))),
    ("iv", (3, -1), (("d10", "d2m1"), ("d2m1", "d10"))),
    ("v", (4, -2), (("d2m1", "d2m1"),)),
)

COMPONENT_SHIFTS = {"d01": (0, 1), "d10": (1, 0), "d2m1": (2, -1)}


@dataclass(frozen=True, eq=False)
class RelationFailure:
    relation: str
    cell: Cell
    shift: tuple[int, int]
    residual: float


@dataclass(frozen=True, eq=False)
class ValidationReport:
    ok: bool
    failures: tuple[RelationFailure, ...]
    max_residual: float

    def failing_cells(self) -> set[Cell]:
        return {f.cell for f in self.failures}


@dataclass(frozen=True, eq=False)
class BigradedComplex:
    """Bigraded vector space with labeled bases and differential components.

    Cells absent from ``cell_dims`` are zero-dimensional; component matrices
    touching them are implicitly zero.  Component matrices are keyed by their
    source cell and must have shape (target cell dim, source cell dim).
    """

    q: int
    p: int
    cell_dims: dict[Cell, int]
    basis_labels: dict[Cell, tuple[str, ...]]
    d01: dict[Cell, np.ndarray]
    d10: dict[Cell, np.ndarray]
    d2m1: dict[Cell, np.ndarray]
    backend: ScalarBackend

    def __post_init__(self):
        if self.q < 0 or self.p < 0:
            raise DimensionMismatchError("negative bidegree bounds")
        for (u, v), dim in self.cell_dims.items():
            if not (0 <= u <= self.q and 0 <= v <= self.p):
                raise DimensionMismatchError(f"cell {(u, v)} outside the bidegree rectangle")
            if dim < 0:
                raise DimensionMismatchError(f"negative dimension at cell {(u, v)}")
        for (u, v), labels in self.basis_labels.items():
            if len(labels) != self.cell_dim(u, v):
                raise DimensionMismatchError(f"label count mismatch at cell {(u, v)}")
        for name in ("d01", "d10", "d2m1"):
            du, dv = COMPONENT_SHIFTS[name]
            for (u, v), m in getattr(self, name).items():
                want = (self.cell_dim(u + du, v + dv), self.cell_dim(u, v))
                if m.shape != want:
                    raise DimensionMismatchError(
                        f"{name} at cell {(u, v)} has shape {m.shape}, expected {want}"
                    )

    # -- layout ------------------------------------------------------------

    def cell_dim(self, u: int, v: int) -> int:
        if not (0 <= u <= self.q and 0 <= v <= self.p):
            return 0
        return self.cell_dims.get((u, v), 0)

    def cells_of_degree(self, r: int) -> list[Cell]:
        """Cells with u+v = r, ascending u (the block order of total spaces)."""
        return [(u, r - u) for u in range(max(0, r - self.p), min(self.q, r) + 1)]

    def total_dim(self, r: int) -> int:
        return sum(self.cell_dim(u, v) for u, v in self.cells_of_degree(r))

    def cell_offset(self, u: int, v: int) -> int:
        off = 0
        for cu, cv in self.cells_of_degree(u + v):
            if (cu, cv) == (u, v):
                return off
            off += self.cell_dim(cu, cv)
        raise DimensionMismatchError(f"cell {(u, v)} outside the bidegree rectangle")

    def cell_indices(self, u: int, v: int) -> range:
        off = self.cell_offset(u, v)
        return range(off, off + self.cell_dim(u, v))

    def component(self, name: str, u: int, v: int) -> np.ndarray:
        du, dv = COMPONENT_SHIFTS[name]
        m = getattr(self, name).get((u, v))
        if m is None:
            return self.backend.zeros(self.cell_dim(u + du, v + dv), self.cell_dim(u, v))
        return m

    # -- assembled operators -------------------------------------------------

    def total_differential(self, r: int, weights: tuple = (1, 1, 1)) -> np.ndarray:
        """Block matrix of d on the degree-r total space, target degree r+1.

        ``weights`` scales (d01, d10, d2m1); (1, h, h^2) gives the rescaled d_h.
        """
        out = self.backend.zeros(self.total_dim(r + 1), self.total_dim(r))
        w = dict(zip(("d01", "d10", "d2m1"), weights))
        for u, v in self.cells_of_degree(r):
            if self.cell_dim(u, v) == 0:
                continue
            cols = self.cell_indices(u, v)
            for name, (du, dv) in COMPONENT_SHIFTS.items():
                tu, tv = u + du, v + dv
                if self.cell_dim(tu, tv) == 0:
                    continue
                block = getattr(self, name).get((u, v))
                if block is None:
                    continue
                rows = self.cell_indices(tu, tv)
                scale = self.backend.scalar(w[name])
                out[rows.start : rows.stop, cols.start : cols.stop] += scale * block
        return out

    def filtration_subspace(self, k: int, r: int) -> Subspace:
        """Coordinate subspace of the degree-r space spanned by cells with u >= k.

        k <= 0 gives the full space, k > q the zero subspace.
        """
        n = self.total_dim(r)
        idx = []
        for u, v in self.cells_of_degree(r):
            if u >= k:
                idx.extend(self.cell_indices(u, v))
        if not idx:
            return zero_space(n, self.backend)
        return coordinate_subspace(n, idx, self.backend)

    def filtration_indices(self, k: int, r: int) -> list[int]:
        idx = []
        for u, v in self.cells_of_degree(r):
            if u >= k:
                idx.extend(self.cell_indices(u, v))
        return idx

    # -- validation ----------------------------------------------------------

    def validate(self) -> ValidationReport:
        """Check the five d^2 = 0 component relations on every cell."""
        failures = []
        max_residual = 0.0
        if self.backend.exact:
            threshold = 0.0
        else:
            scale = 1.0
            for comp in (self.d01, self.d10, self.d2m1):
                for m in comp.values():
                    if m.size:
                        scale = max(scale, float(np.max(np.abs(m.astype(float)))))
            threshold = self.backend.rank_tolerance * scale * scale
        for u in range(self.q + 1):
            for v in range(self.p + 1):
                if self.cell_dim(u, v) == 0:
                    continue
                for name, shift, summands in D_SQUARED_RELATIONS:
                    tu, tv = u + shift[0], v + shift[1]
                    if self.cell_dim(tu, tv) == 0:
                        continue
                    acc = self.backend.zeros(self.cell_dim(tu, tv), self.cell_dim(u, v))
                    for outer, inner in summands:
                        iu, iv = COMPONENT_SHIFTS[inner]
                        mid = (u + iu, v + iv)
                        if self.cell_dim(*mid) == 0:
                            continue
                        acc += self.component(outer, *mid).dot(self.component(inner, u, v))
                    if acc.size == 0:
                        continue
                    residual = float(np.max(np.abs(acc.astype(float))))
                    max_residual = max(max_residual, residual)
                    if self.backend.exact:
                        bad = any(x != 0 for x in np.ravel(acc))
                    else:
                        bad = residual > threshold
                    if bad:
                        failures.append(RelationFailure(name, (u, v), shift, residual))
        return ValidationReport(not failures, tuple(failures), max_residual)
