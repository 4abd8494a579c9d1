"""Rank-3 logarithmic connections d + A(z) dz/(z(z-1)) on P^1 with poles at
0, 1, inf, their normal forms in the charts U0 (variable z) and Uinf
(variable w = 1/z), and the moduli coordinates (q, p).

A connection on O + O(-1) + O(-1) (degree -2) is written in a frame adapted
to the splitting, so near infinity the frame is rescaled by z^(0,-1,-1).
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .errors import ChartUnavailable, NoGauge, ShapeMismatch, SingularSystem
from .exact_algebra import (
    Mat3,
    Poly,
    char_poly_matches,
    gauge_transform,
    interpolate_quadratic,
    invert_coordinate,
    residue_of_form,
    solve_unique,
)
from .parameter_space import INF, THIRD, ParamVector, act_nu
from .surface_geometry import MPoint

CHARTS = ("U0", "Uinf")
Z = Poly.z()


def twist_for_degree(degree: int) -> tuple[int, int, int]:
    """Frame exponents at infinity for the split bundle O(k) + O(k-1) + O(k-1)."""
    if (degree + 2) % 3:
        raise ValueError(f"degree {degree} is not of the form 3k - 2")
    k = (degree + 2) // 3
    return (k, k - 1, k - 1)


@dataclass(frozen=True)
class ConnectionForm:
    A: Mat3
    chart: str = "U0"
    degree: int = -2

    def __post_init__(self) -> None:
        if self.chart not in CHARTS:
            raise ValueError(f"unknown chart {self.chart!r}")

    @property
    def twist(self) -> tuple[int, int, int]:
        return twist_for_degree(self.degree)

    def residue(self, at) -> tuple[tuple[Fraction, ...], ...]:
        """Residue at the chart point 0, 1 or "inf" of the chart variable."""
        return residue_of_form(self.A, at, self.twist)

    def residues(self) -> dict[str, tuple[tuple[Fraction, ...], ...]]:
        """Residues labelled by the pole on P^1 (z = 0, 1, inf)."""
        if self.chart == "U0":
            return {"0": self.residue(0), "1": self.residue(1), "inf": self.residue("inf")}
        return {"inf": self.residue(0), "1": self.residue(1), "0": self.residue("inf")}

    def exponents_match(self, nu: ParamVector) -> dict[str, bool]:
        res = self.residues()
        return {name: char_poly_matches(res[name], nu[i]) for i, name in enumerate(("0", "1", "inf"))}

    def with_degree(self, degree: int) -> "ConnectionForm":
        return ConnectionForm(self.A, self.chart, degree)

    def to_json(self) -> dict:
        return {"chart": self.chart, "degree": self.degree, "A": self.A.to_json()}

    @classmethod
    def from_json(cls, data: dict) -> "ConnectionForm":
        return cls(Mat3.from_json(data["A"]), data["chart"], int(data["degree"]))


def _e2(r: Sequence[Fraction]) -> Fraction:
    return r[0] * r[1] + r[1] * r[2] + r[2] * r[0]


def _prod(xs) -> Fraction:
    out = Fraction(1)
    for x in xs:
        out *= x
    return out


def normal_form_u0(q, p, nu: ParamVector) -> ConnectionForm:
    q, p = Fraction(q), Fraction(p)
    if q in (0, 1):
        raise ChartUnavailable(f"q = {q} is a pole; the point is not in chart U0", q=str(q))
    a12 = interpolate_quadratic(-p * p - _e2(nu[0]), -p * p - _e2(nu[1]), 1 - _e2(nu[INF]))
    a13 = interpolate_quadratic(
        _prod(p + v for v in nu[0]) / q,
        _prod(p - v for v in nu[1]) / (q - 1),
        _prod(1 - v for v in nu[INF]),
    )
    A = Mat3([[0, a12, a13], [1, -p, 0], [0, Z - q, p]])
    return ConnectionForm(A, "U0", -2)


def normal_form_uinf(q2, p2, nu: ParamVector) -> ConnectionForm:
    """Normal form in w = 1/z; the leading z^2 term of b13 is -nu00 nu01 nu02."""
    q2, p2 = Fraction(q2), Fraction(p2)
    if q2 in (0, 1):
        raise ChartUnavailable(f"q' = {q2} is a pole; the point is not in chart Uinf", q2=str(q2))
    b12 = interpolate_quadratic(1 - p2 * p2 - _e2(nu[INF]), -p2 * p2 - _e2(nu[1]), -_e2(nu[0]))
    b13 = interpolate_quadratic(
        _prod(p2 - 1 + v for v in nu[INF]) / q2,
        _prod(p2 - v for v in nu[1]) / (q2 - 1),
        -_prod(nu[0]),
    )
    A = Mat3([[0, b12, b13], [1, Z - 1 - p2, 0], [0, Z - q2, Z - 1 + p2]])
    return ConnectionForm(A, "Uinf", -2)


def build_normal_form(point: MPoint, nu: ParamVector, chart: str = "U0") -> ConnectionForm:
    if chart == "U0":
        return normal_form_u0(*point.qp, nu)
    if chart == "Uinf":
        return normal_form_uinf(*point.qp2, nu)
    raise ValueError(f"unknown chart {chart!r}")


def build_both_charts(point: MPoint, nu: ParamVector) -> dict[str, ConnectionForm]:
    return {c: build_normal_form(point, nu, c) for c in CHARTS}


def _check(cond: bool, entry: str, found) -> None:
    if not cond:
        raise ShapeMismatch(f"entry {entry} violates the normal shape", entry=entry, found=repr(found))


def apparent_pair(conn: ConnectionForm) -> tuple[Fraction, Fraction]:
    """Apparent singularity and dual parameter of a normal-shape matrix."""
    A = conn.A
    shift = Poly() if conn.chart == "U0" else Z - 1
    _check(A[0, 0].is_zero(), "(1,1)", A[0, 0])
    _check(A[1, 0] == Poly.const(1), "(2,1)", A[1, 0])
    _check(A[2, 0].is_zero(), "(3,1)", A[2, 0])
    _check(A[1, 2].is_zero(), "(2,3)", A[1, 2])
    _check(A[2, 1].degree == 1 and A[2, 1].lead == 1, "(3,2)", A[2, 1])
    d22 = A[2, 2] - shift
    d11 = A[1, 1] - shift
    _check(d22.is_constant(), "(3,3)", A[2, 2])
    _check(d11 == -d22, "(2,2)", A[1, 1])
    _check(A[0, 1].degree <= 2 and A[0, 2].degree <= 2, "(1,2)/(1,3)", (A[0, 1], A[0, 2]))
    return A[2, 1].root_of_linear(), d22.coeff(0)


# ---------------------------------------------------------------------------
# Normalization of split frames


def _affine_solve(build, n_unknowns: int, residual) -> list[Fraction]:
    """Solve residual(build(u)) = 0 where the residual coefficients are affine in u."""
    base = residual(build([Fraction(0)] * n_unknowns))
    cols = []
    for k in range(n_unknowns):
        u = [Fraction(0)] * n_unknowns
        u[k] = Fraction(1)
        r = residual(build(u))
        cols.append([a - b for a, b in zip(r, base)])
    rows = [[cols[k][i] for k in range(n_unknowns)] for i in range(len(base))]
    return solve_unique(rows, [-b for b in base])


def _coeffs_from(poly: Poly, start: int, length: int) -> list[Fraction]:
    return [poly.coeff(k) for k in range(start, start + length)]


def normalize_split_frame(conn: ConnectionForm) -> tuple[Mat3, ConnectionForm]:
    """Find an admissible gauge taking the matrix to normal shape.

    Admissible gauges are [[u, phi1, phi2], [0, C]] with phi linear and C a
    constant invertible 2x2 block.  The search is two linear steps: first
    move column 1 to (0, 1, 0), then clear the (3,3) slope and the (2,3)
    entry with a unipotent correction.
    """
    A = conn.A
    a00, a10, a20 = A[0, 0], A[1, 0], A[2, 0]
    try:
        for entry, deg in ((a00, 1), (a10, 0), (a20, 0)):
            if entry.degree > deg:
                raise NoGauge("first column is not split-adapted", column=[repr(a00), repr(a10), repr(a20)])
        c10, c20 = a10.coeff(0), a20.coeff(0)
        if c10 == 0 and c20 == 0:
            raise NoGauge("first column has vanishing constant block (reducible input)")
        v = (0, 0, 1) if c10 != 0 else (0, 1, 0)
        h = Mat3([[1, a00, v[0]], [0, a10, v[1]], [0, a20, v[2]]])
        Ah = gauge_transform(A, h)
        lam_poly = Ah[2, 1]
        if lam_poly.degree != 1:
            raise NoGauge("entry (3,2) is not linear after the first step", entry=repr(lam_poly))
        lam = lam_poly.lead

        def k_of(a0, a1, b) -> Mat3:
            return Mat3([[1, 0, Poly((a0, a1))], [0, 1, b], [0, 0, lam]])

        width = Ah.max_degree() + 3
        (b,) = _affine_solve(
            lambda u: gauge_transform(Ah, k_of(0, 0, u[0])),
            1,
            lambda M: _coeffs_from(M[2, 2], 1, width),
        )
        a0, a1 = _affine_solve(
            lambda u: gauge_transform(Ah, k_of(u[0], u[1], b)),
            2,
            lambda M: _coeffs_from(M[1, 2], 0, width),
        )
        k = k_of(a0, a1, b)
    except SingularSystem as exc:
        raise NoGauge("gauge conditions are not uniquely solvable", cause=str(exc)) from exc
    g = h * k
    out = ConnectionForm(gauge_transform(A, g), "U0", conn.degree)
    apparent_pair(out)
    return g, out


def random_admissible_gauge(rng, bound: int = 5) -> Mat3:
    """A gauge [[u, phi1, phi2], [0, C]] with invertible constant C."""

    def r(nonzero: bool = False) -> Fraction:
        while True:
            x = Fraction(rng.randint(-bound, bound), rng.randint(1, bound))
            if x or not nonzero:
                return x

    while True:
        c = [[r(), r()], [r(), r()]]
        if c[0][0] * c[1][1] - c[0][1] * c[1][0] != 0:
            break
    return Mat3([[r(True), Poly((r(), r())), Poly((r(), r()))], [0, c[0][0], c[0][1]], [0, c[1][0], c[1][1]]])


# ---------------------------------------------------------------------------
# Diagram automorphisms at the connection level


def realize_sigma(which: str, conn: ConnectionForm) -> ConnectionForm:
    """Pull back by z -> 1 - z (s1) or z -> 1/z twisted by -(2/3) dz/z (s2)."""
    w = which.lower()
    if conn.chart != "U0":
        raise ChartUnavailable("realize_sigma works on the U0 chart")
    if w == "s1":
        flip = Poly((1, -1))
        B = -conn.A.map(lambda e: e.compose(flip))
        d = Mat3.diag(-1, 1, 1)
        return normalize_split_frame(ConnectionForm(d * B * d, "U0", conn.degree))[1]
    if w == "s2":
        B = invert_coordinate(conn.A, twist_for_degree(conn.degree))
        B = B - Mat3.identity() * Poly((-2 * THIRD, 2 * THIRD))
        return normalize_split_frame(ConnectionForm(B, "U0", conn.degree))[1]
    raise ValueError(f"unknown diagram automorphism {which!r}")


def realize_sigma_pair(which: str, q, p, nu: ParamVector) -> tuple[tuple[Fraction, Fraction], ParamVector]:
    out = realize_sigma(which, normal_form_u0(q, p, nu))
    return apparent_pair(out), act_nu(which, nu)


def chart_transfer(conn: ConnectionForm) -> ConnectionForm:
    """Rewrite a Uinf-chart form in the variable z and normalize it."""
    if conn.chart != "Uinf":
        raise ChartUnavailable("chart_transfer expects a Uinf form")
    B = invert_coordinate(conn.A, twist_for_degree(conn.degree))
    return normalize_split_frame(ConnectionForm(B, "U0", conn.degree))[1]


def fuchs_sum(nu: ParamVector, degree: int) -> Fraction:
    return sum(nu.flat(), Fraction(0)) + degree


def shift_infinity(nu: ParamVector, k: int) -> ParamVector:
    """Exponents after tensoring with (O(k), d): the inf row moves by -k."""
    rows = [list(r) for r in nu.rows]
    rows[INF] = [x - k for x in rows[INF]]
    return ParamVector.of(rows)
