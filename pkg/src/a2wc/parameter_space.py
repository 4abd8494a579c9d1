"""Local exponents nu, the strata N > N0 > N00, the period map chi on the
root lattice and the generator action on nu.

Rows are indexed 0, 1, inf (stored as 0, 1, 2).  Each exceptional class of
Pic carries one exponent::

    E1, E2, E3 -> nu[1][0], nu[1][1], nu[1][2]
    E4, E5, E9 -> nu[0][0], nu[0][1], nu[0][2]
    E6, E7, E8 -> nu[inf][0], nu[inf][1], nu[inf][2]
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from itertools import product
from typing import Iterable, Sequence

from . import picard_lattice as pl
from .errors import ParameterError, ParseError, RootLatticeError
from .exact_algebra import UniqueSolver, is_integer, parse_rat, rref

INF = 2
ROW_NAMES = ("0", "1", "inf")
ROW_SUMS = (Fraction(0), Fraction(0), Fraction(2))
THIRD = Fraction(1, 3)

# exceptional index -> (row, column)
SLOT: dict[int, tuple[int, int]] = {
    1: (1, 0), 2: (1, 1), 3: (1, 2),
    4: (0, 0), 5: (0, 1), 9: (0, 2),
    6: (2, 0), 7: (2, 1), 8: (2, 2),
}
INDEX_OF_SLOT = {v: k for k, v in SLOT.items()}

# sign of chi on difference roots relative to nu(a) - nu(b); fixed by
# calibrate_sign(), which rejects the other choice
CALIBRATED_SIGN = -1


@dataclass(frozen=True)
class ParamVector:
    rows: tuple[tuple[Fraction, Fraction, Fraction], ...]

    def __post_init__(self) -> None:
        if len(self.rows) != 3 or any(len(r) != 3 for r in self.rows):
            raise ParameterError("nu must be a 3x3 array")
        object.__setattr__(
            self, "rows", tuple(tuple(Fraction(x) for x in r) for r in self.rows)
        )

    @classmethod
    def of(cls, rows: Sequence[Sequence]) -> "ParamVector":
        return cls(tuple(tuple(r) for r in rows))

    @classmethod
    def from_free(cls, n00, n01, n10, n11, ni0, ni1) -> "ParamVector":
        """Fill in the last column from the row-sum constraint."""
        return cls.of(
            [(n00, n01, -n00 - n01), (n10, n11, -n10 - n11), (ni0, ni1, 2 - ni0 - ni1)]
        )

    @classmethod
    def parse(cls, items: Sequence[str]) -> "ParamVector":
        """Nine rational strings in row order (0, 1, inf)."""
        if len(items) != 9:
            raise ParseError(f"nu needs 9 entries, got {len(items)}", field="nu")
        vals = [parse_rat(s, field=f"nu[{ROW_NAMES[k // 3]},{k % 3}]") for k, s in enumerate(items)]
        return cls.of([vals[0:3], vals[3:6], vals[6:9]])

    def __getitem__(self, i: int) -> tuple[Fraction, Fraction, Fraction]:
        return self.rows[i]

    def at(self, index: int) -> Fraction:
        """Exponent attached to the exceptional class E_index."""
        i, j = SLOT[index]
        return self.rows[i][j]

    def flat(self) -> list[Fraction]:
        return [x for r in self.rows for x in r]

    @property
    def gamma(self) -> Fraction:
        return self.rows[0][0] + self.rows[1][0] + self.rows[2][0] - 1

    def row_sums_ok(self) -> bool:
        return all(sum(r) == s for r, s in zip(self.rows, ROW_SUMS))

    def distinct_rows(self) -> bool:
        return all(len(set(r)) == 3 for r in self.rows)

    def to_json(self) -> list[list[str]]:
        return [[str(x) for x in r] for r in self.rows]

    def replace(self, i: int, j: int, value) -> "ParamVector":
        rows = [list(r) for r in self.rows]
        rows[i][j] = Fraction(value)
        return ParamVector.of(rows)


NU_STAR = ParamVector.of(
    [
        (Fraction(1, 5), Fraction(2, 5), Fraction(-3, 5)),
        (Fraction(1, 7), Fraction(2, 7), Fraction(-3, 7)),
        (Fraction(1, 2), Fraction(5, 6), Fraction(2, 3)),
    ]
)

# same as NU_STAR except row 0, chosen so that all N00 conditions hold
NU_GEN = NU_STAR.replace(0, 1, Fraction(3, 10)).replace(0, 2, Fraction(-1, 2))


def triple_sums(nu: ParamVector) -> list[Fraction]:
    return [nu[0][a] + nu[1][b] + nu[2][c] for a, b, c in product(range(3), repeat=3)]


def membership(nu: ParamVector) -> str:
    """Strongest of "N00", "N0", "N" containing nu, or "none"."""
    if not (nu.row_sums_ok() and nu.distinct_rows()):
        return "none"
    if any(is_integer(s) for s in triple_sums(nu)):
        return "N"
    for r in nu.rows:
        for a in range(3):
            for b in range(a + 1, 3):
                if is_integer(r[a] - r[b]):
                    return "N0"
    return "N00"


STRATA = {"none": 0, "N": 1, "N0": 2, "N00": 3}


def require(nu: ParamVector, stratum: str) -> None:
    got = membership(nu)
    if STRATA[got] < STRATA[stratum]:
        raise ParameterError(f"nu must lie in {stratum}, it lies in {got}", required=stratum, stratum=got)


def act_nu(gen: str, nu: ParamVector) -> ParamVector:
    """Generator action on exponents, from the explicit table."""
    g = gen.lower()
    rows = [list(r) for r in nu.rows]
    if g == "w3":
        gam = nu.gamma
        return ParamVector.of(
            [[r[0] - 2 * THIRD * gam, r[1] + THIRD * gam, r[2] + THIRD * gam] for r in rows]
        )
    if g == "s1":
        return ParamVector.of([rows[1], rows[0], rows[2]])
    if g == "s2":
        two = 2 * THIRD
        return ParamVector.of([[x - two for x in rows[2]], rows[1], [x + two for x in rows[0]]])
    if g.startswith("w") and int(g[1:]) in pl.DIFFERENCE_ROOTS:
        a, b = pl.DIFFERENCE_ROOTS[int(g[1:])]
        (ia, ja), (ib, jb) = SLOT[a], SLOT[b]
        rows[ia][ja], rows[ib][jb] = rows[ib][jb], rows[ia][ja]
        return ParamVector.of(rows)
    raise ValueError(f"unknown generator {gen!r}")


def act_word(tokens: Iterable[str], nu: ParamVector) -> ParamVector:
    for t in tokens:
        nu = act_nu(t, nu)
    return nu


# ---------------------------------------------------------------------------
# chi


def _simple_value_coeffs(node: int, sign: int) -> tuple[dict[int, int], Fraction]:
    """chi(alpha_node) as (coefficients on exceptional exponents, constant)."""
    if node == 3:
        return {1: 1, 4: 1, 6: 1}, Fraction(-1)
    a, b = pl.DIFFERENCE_ROOTS[node]
    return {a: sign, b: -sign}, Fraction(0)


def simple_chi(node: int, nu: ParamVector, sign: int = CALIBRATED_SIGN) -> Fraction:
    coeffs, const = _simple_value_coeffs(node, sign)
    return const + sum(c * nu.at(k) for k, c in coeffs.items())


def root_coordinates(root: Sequence[int]) -> dict[int, int]:
    """Integer coordinates of a class in the basis alpha_0..alpha_6."""
    return dict(_root_coordinates(tuple(root)))


@lru_cache(maxsize=None)
def _root_coordinates(root: tuple[int, ...]) -> tuple[tuple[int, int], ...]:
    cols = [pl.ROOTS[n] for n in pl.NODES]
    mat = [[cols[c][r] for c in range(len(cols))] for r in range(pl.DIM)]
    aug = [row + [root[r]] for r, row in enumerate(mat)]
    red, pivots = rref(aug)
    if len(cols) in pivots:
        raise RootLatticeError("class is not in the span of the simple roots", root=list(root))
    coords = {n: Fraction(0) for n in pl.NODES}
    for i, p in enumerate(pivots):
        coords[pl.NODES[p]] = red[i][len(cols)]
    if not all(is_integer(c) for c in coords.values()):
        raise RootLatticeError("class has non-integral root coordinates", root=list(root))
    return tuple((n, int(c)) for n, c in coords.items())


def chi(root: Sequence[int], nu: ParamVector, sign_convention: int = CALIBRATED_SIGN) -> Fraction:
    """Linear extension of the simple-root values."""
    coords = root_coordinates(root)
    return sum((c * simple_chi(n, nu, sign_convention) for n, c in coords.items()), Fraction(0))


def equivariance_defects(nu: ParamVector, sign: int) -> list[str]:
    """Pairs (generator, node) where chi(w alpha, nu) != chi(alpha, w nu)."""
    bad = []
    for gen in pl.GENERATORS:
        m = pl.generator_map(gen)
        moved = act_nu(gen, nu)
        for n in pl.NODES:
            lhs = chi(pl.apply_map(m, pl.ROOTS[n]), nu, sign)
            rhs = simple_chi(n, moved, sign)
            if lhs != rhs:
                bad.append(f"{gen}:alpha{n}")
    return bad


def calibrate_sign(samples: Sequence[ParamVector]) -> int:
    """The unique relative sign making chi equivariant on all samples."""
    passing = [s for s in (1, -1) if not any(equivariance_defects(nu, s) for nu in samples)]
    if len(passing) != 1:
        from .errors import CalibrationFailed

        raise CalibrationFailed("chi sign calibration is not unique", candidates=passing)
    return passing[0]


@lru_cache(maxsize=None)
def _chi_system(sign: int) -> UniqueSolver:
    """Left-hand side of the chi system: simple-root values and row sums."""
    col = {INDEX_OF_SLOT[(i, j)]: 3 * i + j for i in range(3) for j in range(3)}
    rows = []
    for n in pl.NODES:
        coeffs, _ = _simple_value_coeffs(n, sign)
        row = [Fraction(0)] * 9
        for k, c in coeffs.items():
            row[col[k]] += c
        rows.append(row)
    for i in range(3):
        rows.append([Fraction(int(c // 3 == i)) for c in range(9)])
    return UniqueSolver(rows)


def derive_action_from_chi(gen: str, nu: ParamVector, sign: int = CALIBRATED_SIGN) -> ParamVector:
    """Solve chi_{nu'}(alpha_i) = chi_nu(w alpha_i) together with the row sums."""
    m = pl.generator_map(gen)
    rhs = [chi(pl.apply_map(m, pl.ROOTS[n]), nu, sign) - _simple_value_coeffs(n, sign)[1] for n in pl.NODES]
    sol = _chi_system(sign)(rhs + list(ROW_SUMS))
    return ParamVector.of([sol[0:3], sol[3:6], sol[6:9]])
