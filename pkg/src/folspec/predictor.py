"""Dimension predictions and the non-Vaisman obstruction over Betti data.

On a closed Vaisman manifold of real dimension 2n+2 the second page of the
canonical-foliation spectral sequence is pinned by the basic Betti numbers
e_u: rows v = 0 and v = 2 equal e_u, and row v = 1 is bounded below by 2 e_u,
with equality when the foliation is quasi-regular.  The basic numbers are in
turn a universal expression in the ordinary Betti numbers.  Failing either
vanishing clause (e_{2n} = 0, or dim E_2^{0,1} < 2) rules the foliated
structure out as Vaisman; the check is one-directional.
"""

from __future__ import annotations

from dataclasses import dataclass

from .engine import PageTable
from .errors import NotVaismanCompatible

LOWER_BOUND = "lower_bound"
EQUALITY = "quasi_regular_equality"

CLAUSE_TOP_BASIC = "top_basic_cohomology_vanishes"
CLAUSE_LEAFWISE = "leafwise_term_below_two"
CLAUSE_LOWER_BOUND = "lower_bound_violated"


@dataclass(frozen=True)
class BettiVector:
    """Betti numbers b_0..b_{2n+2} of a closed manifold of dimension 2n+2."""

    n: int
    b: tuple[int, ...]

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("need n >= 1 (real dimension 2n+2 >= 4)")
        if len(self.b) != 2 * self.n + 3:
            raise ValueError(
                f"expected {2 * self.n + 3} Betti numbers b_0..b_{2 * self.n + 2}, "
                f"got {len(self.b)}"
            )
        if any(x < 0 for x in self.b):
            raise ValueError("negative Betti number")

    def warnings(self) -> tuple[str, ...]:
        out = []
        if self.b[0] != 1:
            out.append(f"b_0 = {self.b[0]} != 1: not connected")
        top = 2 * self.n + 2
        if any(self.b[r] != self.b[top - r] for r in range(top + 1)):
            out.append("Poincare duality b_r = b_{2n+2-r} fails")
        if self.b[1] < 1:
            out.append("b_1 = 0: not a Vaisman candidate (b_1 >= 1 is necessary)")
        return tuple(out)

    def euler_characteristic(self) -> int:
        return sum((-1) ** r * x for r, x in enumerate(self.b))


@dataclass(frozen=True)
class BasicBettiVector:
    """Basic Betti numbers e_0..e_{2n} of the canonical foliation."""

    e: tuple[int, ...]

    def __post_init__(self):
        if len(self.e) < 1 or len(self.e) % 2 == 0:
            raise ValueError("expected e_0..e_{2n}, an odd-length vector")
        if any(x < 0 for x in self.e):
            raise NotVaismanCompatible("negative basic Betti number")
        if self.e[0] != 1:
            raise NotVaismanCompatible(f"e_0 = {self.e[0]} != 1")

    @property
    def n(self) -> int:
        return (len(self.e) - 1) // 2

    def warnings(self) -> tuple[str, ...]:
        top = 2 * self.n
        if any(self.e[u] != self.e[top - u] for u in range(top + 1)):
            return ("Poincare duality e_u = e_{2n-u} fails",)
        return ()


def basic_betti_from_betti(bv: BettiVector) -> BasicBettiVector:
    """e_u for u <= n by the alternating-weight formula, then duality.

    e_u = (-1)^u sum_{i=0}^{[u/2]} ([u/2]-i+1) (b_{2i} - b_{2i-(-1)^u});
    out-of-range b indices read as zero (u even, i=0 hits b_{-1}).
    Rejects input whenever some e_u comes out negative or e_0 != 1.
    """
    n = bv.n

    def b(j: int) -> int:
        return bv.b[j] if 0 <= j < len(bv.b) else 0

    half = [0] * (2 * n + 1)
    for u in range(n + 1):
        m = u // 2
        sign = -1 if u % 2 else 1
        total = 0
        for i in range(m + 1):
            total += (m - i + 1) * (b(2 * i) - b(2 * i - sign))
        e_u = sign * total
        if e_u < 0:
            raise NotVaismanCompatible(f"formula gives e_{u} = {e_u} < 0")
        half[u] = e_u
        half[2 * n - u] = e_u
    return BasicBettiVector(tuple(half))


@dataclass(frozen=True, eq=False)
class E2Prediction:
    """Predicted second-page dimensions: rows v=0,2 equal e, row v=1 is 2e."""

    e: BasicBettiVector
    mode: str

    @property
    def n(self) -> int:
        return self.e.n

    def row(self, v: int) -> tuple[int, ...]:
        if v in (0, 2):
            return self.e.e
        if v == 1:
            return tuple(2 * x for x in self.e.e)
        raise ValueError("rows exist for v in {0, 1, 2}")

    def to_page_table(self) -> PageTable:
        dims = {}
        for v in range(3):
            for u, d in enumerate(self.row(v)):
                dims[(u, v)] = d
        return PageTable(page=2, q=2 * self.n, p=2, dims=dims, stabilized=False)

    def to_json_dict(self) -> dict:
        return {
            "n": self.n,
            "e": list(self.e.e),
            "mode": self.mode,
            "rows": {str(v): list(self.row(v)) for v in range(3)},
        }


def predict_e2(e: BasicBettiVector, quasi_regular: bool) -> E2Prediction:
    """Second-page prediction from basic Betti numbers.

    Row v=1 is exact under quasi-regularity and a lower bound otherwise;
    rows v=0 and v=2 are equal by the Poincare duality of the minimal
    foliation.  In particular dim E_2^{0,1} >= 2 for every valid input.
    """
    return E2Prediction(e=e, mode=EQUALITY if quasi_regular else LOWER_BOUND)


@dataclass(frozen=True)
class ObstructionClause:
    name: str
    cell: tuple[int, int]
    detail: str


@dataclass(frozen=True)
class ObstructionVerdict:
    verdict: str  # "NotVaisman" | "Inconclusive"
    clauses: tuple[ObstructionClause, ...]

    @property
    def not_vaisman(self) -> bool:
        return self.verdict == "NotVaisman"

    def to_json_dict(self) -> dict:
        return {
            "verdict": self.verdict,
            "clauses": [
                {"name": cl.name, "cell": list(cl.cell), "detail": cl.detail}
                for cl in self.clauses
            ],
        }


def vaisman_obstruction(table: PageTable, q: int) -> ObstructionVerdict:
    """Apply the obstruction clauses to a computed (or asserted) second page.

    NotVaisman when e_{2n} = dim E_2^{2n,0} = 0, or dim E_2^{0,1} < 2, or the
    lower bound dim E_2^{u,1} >= 2 dim E_2^{u,0} fails at some u (using the
    v=0 row as the source of e_u).  Otherwise Inconclusive: the test is
    one-directional and never certifies a Vaisman structure.
    """
    if q < 2 or q % 2 != 0:
        raise ValueError(f"transverse dimension q = {q} is not an even number >= 2")
    if table.q < q or table.p < 1:
        raise ValueError(
            f"table covers u <= {table.q}, v <= {table.p}; "
            f"cells ({q},0) and (0,1) are required"
        )
    clauses = []
    top = table.cell(q, 0)
    if top == 0:
        clauses.append(
            ObstructionClause(
                CLAUSE_TOP_BASIC, (q, 0), f"e_{q} = dim E_2^{{{q},0}} = 0"
            )
        )
    leafwise = table.cell(0, 1)
    if leafwise < 2:
        clauses.append(
            ObstructionClause(
                CLAUSE_LEAFWISE, (0, 1), f"dim E_2^{{0,1}} = {leafwise} < 2"
            )
        )
    for u in range(q + 1):
        if table.cell(u, 1) < 2 * table.cell(u, 0):
            clauses.append(
                ObstructionClause(
                    CLAUSE_LOWER_BOUND,
                    (u, 1),
                    f"dim E_2^{{{u},1}} = {table.cell(u, 1)} < "
                    f"2 dim E_2^{{{u},0}} = {2 * table.cell(u, 0)}",
                )
            )
    verdict = "NotVaisman" if clauses else "Inconclusive"
    return ObstructionVerdict(verdict, tuple(clauses))
