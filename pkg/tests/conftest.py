"""Shared fixtures: backends, builtin models, random valid complexes, oracles."""

from __future__ import annotations

import random
from fractions import Fraction

import numpy as np
import pytest

from folspec.complexes import BigradedComplex, COMPONENT_SHIFTS
from folspec.linalg import FLOAT, RATIONAL, ScalarBackend
from folspec.models import (
    DifferentialTerm,
    GeneratorSpec,
    ModelSpec,
    build_from_presentation,
    build_kodaira_model,
    build_suspension_model,
)


@pytest.fixture(scope="session")
def exact():
    return ScalarBackend(RATIONAL)


@pytest.fixture(scope="session")
def approx():
    return ScalarBackend(FLOAT, 1e-8)


@pytest.fixture(scope="session")
def kodaira():
    return build_kodaira_model()


@pytest.fixture(scope="session")
def suspension1():
    return build_suspension_model(1, 2)


# mixes of transverse/leafwise generator counts keeping every cell dim <= 4
GENERATOR_PROFILES = [(3, 1), (2, 2), (3, 0), (1, 2), (2, 1), (1, 1), (2, 0), (0, 2)]

COEFF_POOL = ["1", "-1", "2", "-2", "3", "1/2", "-3/2", "5/3"]


def random_model_spec(rng: random.Random) -> ModelSpec:
    """A random two-step-nilpotent presentation; d^2 = 0 holds by construction
    (non-closed generators differentiate into wedges of closed ones only)."""
    g10, g01 = rng.choice(GENERATOR_PROFILES)
    gens = [GeneratorSpec(f"t{i}", (1, 0)) for i in range(1, g10 + 1)]
    gens += [GeneratorSpec(f"l{j}", (0, 1)) for j in range(1, g01 + 1)]
    n = len(gens)
    closed = sorted(rng.sample(range(n), rng.randint(max(1, n - 2), n)))
    differentials = {}
    for gi in range(n):
        if gi in closed or rng.random() < 0.25:
            continue
        gu, gv = gens[gi].bidegree
        pairs = []
        for ai in range(len(closed)):
            for bi in range(ai + 1, len(closed)):
                a, b = closed[ai], closed[bi]
                tu = gens[a].bidegree[0] + gens[b].bidegree[0]
                tv = gens[a].bidegree[1] + gens[b].bidegree[1]
                if (tu - gu, tv - gv) in COMPONENT_SHIFTS.values():
                    pairs.append((a, b))
        if not pairs:
            continue
        rng.shuffle(pairs)
        terms = tuple(
            DifferentialTerm(rng.choice(COEFF_POOL), (gens[a].name, gens[b].name))
            for a, b in pairs[: rng.randint(1, min(2, len(pairs)))]
        )
        differentials[gens[gi].name] = terms
    return ModelSpec(
        scalar=RATIONAL,
        p=g01,
        q=g10,
        generators=tuple(gens),
        differentials=differentials,
    )


def random_complex(rng: random.Random) -> BigradedComplex:
    return build_from_presentation(random_model_spec(rng))


def mutate_entry(c: BigradedComplex, component: str, cell, row: int, col: int, value):
    """Copy of the complex with one component entry overwritten (skips validation)."""
    comps = {name: dict(getattr(c, name)) for name in ("d01", "d10", "d2m1")}
    du, dv = COMPONENT_SHIFTS[component]
    target_dim = c.cell_dim(cell[0] + du, cell[1] + dv)
    source_dim = c.cell_dim(*cell)
    m = comps[component].get(cell)
    m = c.backend.zeros(target_dim, source_dim) if m is None else m.copy()
    m[row, col] = c.backend.scalar(value)
    comps[component][cell] = m
    return BigradedComplex(
        q=c.q,
        p=c.p,
        cell_dims=dict(c.cell_dims),
        basis_labels=dict(c.basis_labels),
        d01=comps["d01"],
        d10=comps["d10"],
        d2m1=comps["d2m1"],
        backend=c.backend,
    )


def d_squared_oracle(c: BigradedComplex) -> set:
    """Nonzero blocks of the assembled d∘d, as {(source cell, shift)} pairs.

    Independent of the five-relation validator: works on the total block
    matrices degree by degree.
    """
    if c.backend.exact:
        threshold = 0.0
    else:
        scale = 1.0
        for name in ("d01", "d10", "d2m1"):
            for m in getattr(c, name).values():
                if m.size:
                    scale = max(scale, float(np.max(np.abs(m.astype(float)))))
        threshold = c.backend.rank_tolerance * scale * scale
    bad = set()
    for r in range(c.p + c.q + 1):
        square = c.total_differential(r + 1).dot(c.total_differential(r))
        if square.size == 0:
            continue
        for (u, v) in c.cells_of_degree(r):
            if c.cell_dim(u, v) == 0:
                continue
            cols = c.cell_indices(u, v)
            for (tu, tv) in c.cells_of_degree(r + 2):
                if c.cell_dim(tu, tv) == 0:
                    continue
                rows = c.cell_indices(tu, tv)
                block = square[rows.start : rows.stop, cols.start : cols.stop]
                residual = float(np.max(np.abs(block.astype(float)))) if block.size else 0.0
                if residual > threshold:
                    bad.add(((u, v), (tu - u, tv - v)))
    return bad


def fraction_matrix(rows):
    """Plain nested-list Fraction matrix for test-side oracles."""
    return [[Fraction(x) for x in row] for row in rows]


def oracle_row_reduction_rank(rows) -> int:
    """Independent Gaussian elimination over Fractions (row echelon, no rref)."""
    m = fraction_matrix(rows)
    if not m:
        return 0
    nrows, ncols = len(m), len(m[0])
    rank_count = 0
    row = 0
    for col in range(ncols):
        pivot = None
        for i in range(row, nrows):
            if m[i][col] != 0:
                pivot = i
                break
        if pivot is None:
            continue
        m[row], m[pivot] = m[pivot], m[row]
        for i in range(row + 1, nrows):
            if m[i][col] != 0:
                factor = m[i][col] / m[row][col]
                for j in range(col, ncols):
                    m[i][j] -= factor * m[row][j]
        rank_count += 1
        row += 1
        if row == nrows:
            break
    return rank_count
