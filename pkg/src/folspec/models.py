"""Builders turning declarative model descriptions into bigraded complexes.

A model is presented by odd-degree generators with bidegrees, a differential
on generators (extended as a derivation with Koszul signs over the wedge
monomial basis), and an optional truncated Fourier layer in the circle
coordinate carried by the distinguished transverse generator ``alpha0``.

Also here: the arrowhead integer matrix driving the torus-suspension family,
its exact spectral analysis, and the Diophantine scan used to probe rational
independence of eigenvector coordinates.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, replace
from fractions import Fraction

import numpy as np

from .complexes import COMPONENT_SHIFTS, BigradedComplex, Cell
from .errors import ModelBuildError, ModelSpecError
from .fourier import FourierLayer
from .linalg import FLOAT, RATIONAL, ScalarBackend, exact_determinant

ALLOWED_SHIFTS = tuple(COMPONENT_SHIFTS.values())
SHIFT_TO_COMPONENT = {shift: name for name, shift in COMPONENT_SHIFTS.items()}
CIRCLE_GENERATOR = "alpha0"


@dataclass(frozen=True)
class GeneratorSpec:
    name: str
    bidegree: tuple[int, int]


@dataclass(frozen=True)
class DifferentialTerm:
    coeff: str
    monomial: tuple[str, ...]


@dataclass(frozen=True, eq=False)
class ModelSpec:
    """Declarative description from which a BigradedComplex is built."""

    scalar: str
    p: int
    q: int
    generators: tuple[GeneratorSpec, ...]
    differentials: dict[str, tuple[DifferentialTerm, ...]]
    fourier_modes: int | None = None

    def validate(self):
        if self.scalar not in (RATIONAL, FLOAT):
            raise ModelSpecError(f"unknown scalar kind {self.scalar!r}")
        if self.p < 0 or self.q < 0:
            raise ModelSpecError("negative bidegree bounds")
        names = [g.name for g in self.generators]
        if len(set(names)) != len(names):
            raise ModelSpecError("generator names are not unique")
        if any(not n for n in names):
            raise ModelSpecError("empty generator name")
        index = {n: i for i, n in enumerate(names)}
        for g in self.generators:
            u, v = g.bidegree
            if not (0 <= u <= self.q and 0 <= v <= self.p):
                raise ModelSpecError(f"generator {g.name} bidegree {g.bidegree} outside rectangle")
            if (u + v) % 2 != 1:
                raise ModelSpecError(
                    f"generator {g.name} has even total degree; wedge-monomial "
                    "bases require odd generators"
                )
        for on, terms in self.differentials.items():
            if on not in index:
                raise ModelSpecError(f"differential on unknown generator {on!r}")
            gu, gv = self.generators[index[on]].bidegree
            for term in terms:
                try:
                    parse_coefficient(term.coeff)
                except (ValueError, ZeroDivisionError) as exc:
                    raise ModelSpecError(f"unparseable coefficient {term.coeff!r} on {on}") from exc
                idxs = []
                tu = tv = 0
                for name in term.monomial:
                    if name not in index:
                        raise ModelSpecError(f"unknown generator {name!r} in a monomial on {on}")
                    idxs.append(index[name])
                    mu, mv = self.generators[index[name]].bidegree
                    tu += mu
                    tv += mv
                if any(a >= b for a, b in zip(idxs, idxs[1:])) or not idxs:
                    raise ModelSpecError(f"monomial on {on} is not strictly ascending")
                shift = (tu - gu, tv - gv)
                if shift not in ALLOWED_SHIFTS:
                    raise ModelSpecError(
                        f"differential term on {on} has bidegree shift {shift}, "
                        f"allowed shifts are {ALLOWED_SHIFTS}"
                    )
        if self.fourier_modes is not None:
            if self.fourier_modes < 1:
                raise ModelSpecError("fourier_modes must be >= 1 when present")
            if self.scalar != FLOAT:
                raise ModelSpecError("a Fourier layer requires the float backend")
            if CIRCLE_GENERATOR not in index:
                raise ModelSpecError(f"a Fourier layer requires a generator named {CIRCLE_GENERATOR!r}")
            if self.generators[index[CIRCLE_GENERATOR]].bidegree != (1, 0):
                raise ModelSpecError(f"{CIRCLE_GENERATOR!r} must have bidegree (1, 0)")

    def to_json_dict(self) -> dict:
        order = {g.name: i for i, g in enumerate(self.generators)}
        out = {
            "scalar": self.scalar,
            "p": self.p,
            "q": self.q,
            "generators": [
                {"name": g.name, "bidegree": [g.bidegree[0], g.bidegree[1]]}
                for g in self.generators
            ],
            "differentials": [
                {
                    "on": on,
                    "value": [
                        {"coeff": t.coeff, "monomial": list(t.monomial)} for t in self.differentials[on]
                    ],
                }
                for on in sorted(self.differentials, key=lambda n: order.get(n, len(order)))
            ],
        }
        if self.fourier_modes is not None:
            out["fourier_modes"] = self.fourier_modes
        return out

    @classmethod
    def from_json_dict(cls, data) -> "ModelSpec":
        if not isinstance(data, dict):
            raise ModelSpecError("model description must be a JSON object")
        try:
            generators = tuple(
                GeneratorSpec(str(g["name"]), (int(g["bidegree"][0]), int(g["bidegree"][1])))
                for g in data.get("generators", [])
            )
            differentials = {}
            for entry in data.get("differentials", []):
                terms = tuple(
                    DifferentialTerm(str(t["coeff"]), tuple(str(x) for x in t["monomial"]))
                    for t in entry.get("value", [])
                )
                differentials[str(entry["on"])] = terms
            modes = data.get("fourier_modes")
            spec = cls(
                scalar=str(data["scalar"]),
                p=int(data["p"]),
                q=int(data["q"]),
                generators=generators,
                differentials=differentials,
                fourier_modes=None if modes is None else int(modes),
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise ModelSpecError(f"malformed model description: {exc}") from exc
        spec.validate()
        return spec


def parse_coefficient(text: str) -> Fraction:
    """Parse a '-1' / '3/2' / '2.19722457' coefficient string exactly."""
    return Fraction(str(text).replace("−", "-").strip())


# ---------------------------------------------------------------------------
# wedge monomial machinery


def _straighten(word: tuple[int, ...]):
    """Sort a generator word; returns (sign, sorted word) or None on a repeat."""
    lst = list(word)
    sign = 1
    for i in range(1, len(lst)):
        j = i
        while j > 0 and lst[j - 1] > lst[j]:
            lst[j - 1], lst[j] = lst[j], lst[j - 1]
            sign = -sign
            j -= 1
    for a, b in zip(lst, lst[1:]):
        if a == b:
            return None
    return sign, tuple(lst)


def _monomial_differential(combo, gen_diff, backend):
    """d(monomial) as {target monomial: coefficient}; derivation, Koszul signs."""
    out = {}
    for pos, g in enumerate(combo):
        terms = gen_diff.get(g)
        if not terms:
            continue
        lead = -1 if pos % 2 else 1
        for coeff, tgens in terms:
            word = combo[:pos] + tgens + combo[pos + 1 :]
            st = _straighten(word)
            if st is None:
                continue
            sign, target = st
            prev = out.get(target, backend.scalar(0))
            out[target] = prev + coeff * backend.scalar(lead * sign)
    return out


def build_from_presentation(
    spec: ModelSpec, tolerance: float = 1e-8, validated: bool = True
) -> BigradedComplex:
    """Realize a ModelSpec as a bigraded complex over its wedge-monomial basis.

    With ``validated`` the five d^2 = 0 relations are checked and a failure
    raises ModelBuildError carrying the per-cell report.
    """
    spec.validate()
    backend = ScalarBackend(spec.scalar, tolerance)
    gens = spec.generators
    index = {g.name: i for i, g in enumerate(gens)}
    gen_diff = {}
    for on, terms in spec.differentials.items():
        parsed = []
        for t in terms:
            coeff = backend.scalar(parse_coefficient(t.coeff))
            parsed.append((coeff, tuple(index[n] for n in t.monomial)))
        if parsed:
            gen_diff[index[on]] = tuple(parsed)

    monomials: dict[Cell, list[tuple[int, ...]]] = {}
    for size in range(len(gens) + 1):
        for combo in itertools.combinations(range(len(gens)), size):
            u = sum(gens[i].bidegree[0] for i in combo)
            v = sum(gens[i].bidegree[1] for i in combo)
            if not (0 <= u <= spec.q and 0 <= v <= spec.p):
                raise ModelSpecError(
                    f"monomial {tuple(gens[i].name for i in combo)} has bidegree "
                    f"{(u, v)} outside the (q={spec.q}, p={spec.p}) rectangle"
                )
            monomials.setdefault((u, v), []).append(combo)
    for combos in monomials.values():
        combos.sort()
    positions = {
        cell: {combo: i for i, combo in enumerate(combos)} for cell, combos in monomials.items()
    }

    layer = FourierLayer(spec.fourier_modes) if spec.fourier_modes else None
    modes = layer.dim if layer else 1
    deriv = layer.derivative_matrix() if layer else None
    a0 = index.get(CIRCLE_GENERATOR)

    def monomial_label(combo):
        return "^".join(gens[i].name for i in combo) if combo else "1"

    cell_dims = {cell: len(combos) * modes for cell, combos in monomials.items()}
    basis_labels = {}
    for cell, combos in monomials.items():
        labels = []
        for combo in combos:
            mlabel = monomial_label(combo)
            if layer is None:
                labels.append(mlabel)
            else:
                for flabel in layer.labels:
                    if flabel == "1":
                        labels.append(mlabel)
                    elif mlabel == "1":
                        labels.append(flabel)
                    else:
                        labels.append(f"{flabel}*{mlabel}")
        basis_labels[cell] = tuple(labels)

    components = {"d01": {}, "d10": {}, "d2m1": {}}

    def component_matrix(name, cell):
        du, dv = COMPONENT_SHIFTS[name]
        target = (cell[0] + du, cell[1] + dv)
        if target not in monomials:
            return None
        comp = components[name]
        if cell not in comp:
            comp[cell] = backend.zeros(cell_dims[target], cell_dims[cell])
        return comp[cell]

    for cell, combos in monomials.items():
        for src_pos, combo in enumerate(combos):
            dmono = _monomial_differential(combo, gen_diff, backend)
            for target, coeff in dmono.items():
                if coeff == 0:
                    continue
                tu = sum(gens[i].bidegree[0] for i in target)
                tv = sum(gens[i].bidegree[1] for i in target)
                name = SHIFT_TO_COMPONENT[(tu - cell[0], tv - cell[1])]
                m = component_matrix(name, cell)
                tgt_pos = positions[(tu, tv)][target]
                for mode in range(modes):
                    m[tgt_pos * modes + mode, src_pos * modes + mode] += coeff
            if layer is not None and a0 not in combo:
                st = _straighten((a0,) + combo)
                if st is not None:
                    sign, target = st
                    name = SHIFT_TO_COMPONENT[(1, 0)]
                    m = component_matrix(name, cell)
                    tgt_pos = positions[(cell[0] + 1, cell[1])][target]
                    for mode in range(modes):
                        for mode2 in range(modes):
                            w = deriv[mode2, mode]
                            if w != 0.0:
                                m[tgt_pos * modes + mode2, src_pos * modes + mode] += sign * w
    complex_ = BigradedComplex(
        q=spec.q,
        p=spec.p,
        cell_dims=cell_dims,
        basis_labels=basis_labels,
        d01=components["d01"],
        d10=components["d10"],
        d2m1=components["d2m1"],
        backend=backend,
    )
    if validated:
        report = complex_.validate()
        if not report.ok:
            cells = sorted(report.failing_cells())
            raise ModelBuildError(
                f"extended differential does not square to zero on cells {cells}", report
            )
    return complex_


# ---------------------------------------------------------------------------
# builtin models


def kodaira_model_spec(scalar: str = RATIONAL) -> ModelSpec:
    """Rank-4 exterior model with a single curvature-shift relation de3 = -e1^e2.

    Exact-rational by default; the float variant exists for spectral use.
    """
    return ModelSpec(
        scalar=scalar,
        p=2,
        q=2,
        generators=(
            GeneratorSpec("e1", (1, 0)),
            GeneratorSpec("e2", (1, 0)),
            GeneratorSpec("e3", (0, 1)),
            GeneratorSpec("e4", (0, 1)),
        ),
        differentials={"e3": (DifferentialTerm("-1", ("e1", "e2")),)},
    )


def build_kodaira_model() -> BigradedComplex:
    return build_from_presentation(kodaira_model_spec())


# ---------------------------------------------------------------------------
# torus suspension: arrowhead matrix, spectrum, model


@dataclass(frozen=True, eq=False)
class SuspensionData:
    """Integer and spectral data of the (2n+1)-arrowhead matrix family."""

    n: int
    diagonal: tuple[int, ...]
    matrix: tuple[tuple[int, ...], ...]
    det: int
    eigenvalues: tuple[float, ...] | None = None
    eigenvectors: np.ndarray | None = None  # unit columns, ascending eigenvalue
    log_eigenvalues: tuple[float, ...] | None = None
    leafwise_product: float | None = None  # product of the two largest eigenvalues

    @property
    def size(self) -> int:
        return 2 * self.n + 1


def sylvester_diagonal(n: int) -> tuple[int, ...]:
    """d_1 = 1 and d_k = 1 + d_1 d_2 ... d_{k-1} for 2 <= k <= 2n+1."""
    d = [1]
    for _ in range(2, 2 * n + 2):
        d.append(1 + math.prod(d))
    return tuple(d)


def build_matrix_A(n: int) -> SuspensionData:
    """Arrowhead matrix with Sylvester diagonal, unit first row/column, det 1."""
    if n < 1:
        raise ModelSpecError("suspension family needs n >= 1")
    diag = sylvester_diagonal(n)
    m = 2 * n + 1
    rows = [tuple([1] * m)]
    for i in range(1, m):
        row = [0] * m
        row[0] = 1
        row[i] = diag[i]
        rows.append(tuple(row))
    a = np.array(rows, dtype=object)
    det = exact_determinant(a)
    if det != 1:
        raise ModelSpecError(f"arrowhead determinant is {det}, expected 1")
    return SuspensionData(n=n, diagonal=diag, matrix=tuple(rows), det=int(det))


def _secular_sign(diag, lam: Fraction) -> Fraction:
    """(d_1 - lam) - sum 1/(d_k - lam); exact, defined away from the poles."""
    total = Fraction(diag[0]) - lam
    for d in diag[1:]:
        total -= Fraction(1) / (Fraction(d) - lam)
    return total


def _bisect_root(diag, lo: Fraction, hi: Fraction) -> Fraction:
    """Root of the secular function in (lo, hi); relative width 2^-56."""
    flo = _secular_sign(diag, lo)
    fhi = _secular_sign(diag, hi)
    if not (flo > 0 > fhi):
        raise ModelSpecError("secular bracket lost; arrowhead structure violated")
    for _ in range(500):
        mid = (lo + hi) / 2
        val = _secular_sign(diag, mid)
        if val > 0:
            lo = mid
        elif val < 0:
            hi = mid
        else:
            return mid
        if lo > 0 and (hi - lo) * (1 << 56) <= lo:
            break
    else:
        raise ModelSpecError("secular bisection failed to converge")
    return (lo + hi) / 2


def eigen_analysis(data: SuspensionData, tolerance: float = 1e-8) -> SuspensionData:
    """Exact-bisection spectrum of the arrowhead matrix, one root per interval.

    The strictly interlacing brackets are (-inf, d_2), (d_2, d_3), ...,
    (d_{2n+1}, +inf); the secular function is evaluated in exact rational
    arithmetic so even the smallest eigenvalue (~ 1/(d_2...d_{2n+1})) keeps
    full relative precision.
    """
    diag = data.diagonal
    m = data.size
    brackets = []
    lo = Fraction(1 - 2 * data.n - 1)
    for k in range(1, m):
        pole = Fraction(diag[k])
        eps = Fraction(1, 2)
        while _secular_sign(diag, pole - eps) >= 0:
            eps /= 2
        brackets.append((lo, pole - eps))
        eps = Fraction(1, 2)
        while _secular_sign(diag, pole + eps) <= 0:
            eps /= 2
        lo = pole + eps
    brackets.append((lo, Fraction(diag[-1] + m)))
    roots = [_bisect_root(diag, a, b) for a, b in brackets]

    eigenvalues = tuple(float(r) for r in roots)
    for a, b in zip(eigenvalues, eigenvalues[1:]):
        if b - a <= tolerance * max(1.0, abs(b)):
            raise ModelSpecError("eigenvalue multiplicity collision within tolerance")
    vectors = np.zeros((m, m))
    for j, root in enumerate(roots):
        comps = [1.0] + [float(Fraction(1) / (root - d)) for d in diag[1:]]
        vec = np.array(comps)
        vectors[:, j] = vec / np.linalg.norm(vec)
    leafwise = eigenvalues[-2] * eigenvalues[-1]
    if abs(leafwise - 1.0) <= tolerance:
        raise ModelSpecError("leafwise eigenvalue product is 1; model rejected")
    return replace(
        data,
        eigenvalues=eigenvalues,
        eigenvectors=vectors,
        log_eigenvalues=tuple(math.log(x) for x in eigenvalues),
        leafwise_product=leafwise,
    )


@dataclass(frozen=True, eq=False)
class DiophantineProbe:
    """Empirical minima of |<m, v>| * ||m||^delta over a box of lattice points."""

    height: int
    minima: dict[int, float]
    witnesses: dict[int, tuple[int, ...]]


def diophantine_probe(vector, height: int, max_points: int = 20_000_000) -> DiophantineProbe:
    """Scan all integer m with 0 < ||m||_inf <= height; purely diagnostic."""
    v = np.asarray(vector, dtype=float).ravel()
    if height < 1:
        raise ValueError("height must be >= 1")
    side = 2 * height + 1
    if side ** v.size > max_points:
        raise ValueError(f"exhaustive scan of {side ** v.size} points exceeds the cap")
    if v.size > 1:
        axes = [np.arange(-height, height + 1)] * (v.size - 1)
        rest = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, v.size - 1)
    else:
        rest = np.zeros((1, 0), dtype=int)
    minima = {1: math.inf, 2: math.inf}
    witnesses = {1: None, 2: None}
    for first in range(-height, height + 1):
        m = np.hstack([np.full((rest.shape[0], 1), first, dtype=int), rest])
        norm_sq = np.einsum("ij,ij->i", m, m)
        keep = norm_sq > 0
        if not np.any(keep):
            continue
        m = m[keep]
        dots = np.abs(m.dot(v))
        norms = np.sqrt(norm_sq[keep].astype(float))
        for delta in (1, 2):
            vals = dots * norms**delta
            i = int(np.argmin(vals))
            if vals[i] < minima[delta]:
                minima[delta] = float(vals[i])
                witnesses[delta] = tuple(int(x) for x in m[i])
    return DiophantineProbe(height=height, minima=minima, witnesses=witnesses)


def suspension_model_spec(n: int, modes: int, tolerance: float = 1e-8) -> ModelSpec:
    """Declarative form of the torus-suspension model (for emission and building).

    Generators: alpha0 (the dt direction) and alpha1..alpha_{2n-1} transverse
    of bidegree (1,0); alpha_{2n}, alpha_{2n+1} leafwise of bidegree (0,1).
    d alpha_i = mu_i alpha0 ^ alpha_i with mu_i = log lambda_i; coefficients
    live in the truncated Fourier layer over the circle coordinate.
    """
    if modes < 1:
        raise ModelSpecError("suspension model needs modes >= 1")
    data = eigen_analysis(build_matrix_A(n), tolerance)
    gens = [GeneratorSpec(CIRCLE_GENERATOR, (1, 0))]
    for i in range(1, 2 * n + 2):
        bidegree = (1, 0) if i <= 2 * n - 1 else (0, 1)
        gens.append(GeneratorSpec(f"alpha{i}", bidegree))
    differentials = {}
    for i in range(1, 2 * n + 2):
        mu = data.log_eigenvalues[i - 1]
        differentials[f"alpha{i}"] = (
            DifferentialTerm(repr(mu), (CIRCLE_GENERATOR, f"alpha{i}")),
        )
    return ModelSpec(
        scalar=FLOAT,
        p=2,
        q=2 * n,
        generators=tuple(gens),
        differentials=differentials,
        fourier_modes=modes,
    )


def build_suspension_model(n: int, modes: int, tolerance: float = 1e-8) -> BigradedComplex:
    return build_from_presentation(suspension_model_spec(n, modes, tolerance), tolerance=tolerance)
