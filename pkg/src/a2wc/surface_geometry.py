"""Nine-point configurations on the triangle x0 (x0 - x2) x2 = 0 and the
birational maps of the plane realizing each generator."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations_with_replacement
from typing import Callable, Sequence

from .errors import ChartUnavailable, ContractedToBoundary, IndeterminatePoint, SingularSystem
from .exact_algebra import PPoint, nullspace, rank, solve_unique
from .parameter_space import INF, THIRD, ParamVector, act_nu

POINT_INDICES = (1, 2, 3, 4, 5, 6, 7, 8, 9)
# point index -> (line, position) with line 1: x0 = x2, 0: x0 = 0, 2: x2 = 0
_LINE_OF = {1: (1, 0), 2: (1, 1), 3: (1, 2), 4: (0, 0), 5: (0, 1), 9: (0, 2), 6: (2, 0), 7: (2, 1), 8: (2, 2)}


def on_triangle(x: PPoint) -> bool:
    x0, _, x2 = x
    return x0 * (x0 - x2) * x2 == 0


def nine_points(nu: ParamVector) -> dict[int, PPoint]:
    pts = {}
    for k in (1, 2, 3):
        pts[k] = PPoint(1, nu[1][k - 1], 1)
    for k, j in ((4, 0), (5, 1), (9, 2)):
        pts[k] = PPoint(0, -nu[0][j], 1)
    for k, j in ((6, 0), (7, 1), (8, 2)):
        pts[k] = PPoint(1, 1 - nu[INF][j], 0)
    return pts


def configuration(nu: ParamVector) -> dict[int, Fraction]:
    """The a_i of the nine points written as (1:-a:1), (0:a:1), (1:a:0)."""
    a = {}
    for k in (1, 2, 3):
        a[k] = -nu[1][k - 1]
    for k, j in ((4, 0), (5, 1), (9, 2)):
        a[k] = -nu[0][j]
    for k, j in ((6, 0), (7, 1), (8, 2)):
        a[k] = 1 - nu[INF][j]
    return a


def points_from_configuration(a: dict[int, Fraction]) -> dict[int, PPoint]:
    pts = {}
    for k, (line, _) in _LINE_OF.items():
        if line == 1:
            pts[k] = PPoint(1, -a[k], 1)
        elif line == 0:
            pts[k] = PPoint(0, a[k], 1)
        else:
            pts[k] = PPoint(1, a[k], 0)
    return pts


CUBIC_MONOMIALS = tuple(
    tuple(sum(1 for v in combo if v == i) for i in range(3))
    for combo in combinations_with_replacement(range(3), 3)
)

TRIANGLE_CUBIC = {(2, 0, 1): Fraction(1), (1, 0, 2): Fraction(-1)}


def _monomial(x: Sequence[Fraction], e: tuple[int, int, int]) -> Fraction:
    return x[0] ** e[0] * x[1] ** e[1] * x[2] ** e[2]


@dataclass(frozen=True)
class CubicResult:
    kernel_dim: int
    coefficients: dict[tuple[int, int, int], Fraction] | None

    @property
    def is_triangle(self) -> bool:
        if self.coefficients is None:
            return False
        nz = {m: c for m, c in self.coefficients.items() if c != 0}
        if set(nz) != set(TRIANGLE_CUBIC):
            return False
        ratio = nz[(2, 0, 1)] / TRIANGLE_CUBIC[(2, 0, 1)]
        return all(c == ratio * TRIANGLE_CUBIC[m] for m, c in nz.items())


def cubic_kernel(points: Sequence[PPoint]) -> list[list[Fraction]]:
    rows = [[_monomial(tuple(p), m) for m in CUBIC_MONOMIALS] for p in points]
    return nullspace(rows)


def unique_anticanonical_cubic(points: dict[int, PPoint] | Sequence[PPoint]) -> CubicResult:
    """Cubics through the nine points; the generator when the space is a line."""
    pts = list(points.values()) if isinstance(points, dict) else list(points)
    ker = cubic_kernel(pts)
    if len(ker) != 1:
        return CubicResult(len(ker), None)
    return CubicResult(1, dict(zip(CUBIC_MONOMIALS, ker[0])))


@dataclass(frozen=True)
class Shear:
    mu: Fraction
    scale: Fraction
    eta: Fraction
    normalized: dict[int, Fraction]


def normalize_configuration(a: dict[int, Fraction]) -> Shear:
    """The shear x1 -> mu x0 + scale x1 + eta x2 giving sums (0, 0, 1).

    Under the shear a_i -> scale a_i - (mu + eta) on x0 = x2, a_i -> scale a_i
    + eta on x0 = 0 and a_i -> mu + scale a_i on x2 = 0.
    """
    a = {k: Fraction(v) for k, v in a.items()}
    total = sum(a.values())
    if total == 0:
        raise SingularSystem("configuration with sum a_i = 0 has no normalizing shear")
    s0 = a[4] + a[5] + a[9]
    s2 = a[6] + a[7] + a[8]
    scale = 1 / total
    eta = -scale * s0 / 3
    mu = (1 - scale * s2) / 3
    return Shear(mu, scale, eta, apply_shear(a, mu, scale, eta))


def apply_shear(a: dict[int, Fraction], mu, scale, eta) -> dict[int, Fraction]:
    """Configuration of the images of the points under the shear."""
    mu, scale, eta = Fraction(mu), Fraction(scale), Fraction(eta)
    out = {}
    for k, (line, _) in _LINE_OF.items():
        if line == 1:
            out[k] = scale * a[k] - (mu + eta)
        elif line == 0:
            out[k] = scale * a[k] + eta
        else:
            out[k] = mu + scale * a[k]
    return out


# ---------------------------------------------------------------------------
# Moduli points


@dataclass(frozen=True)
class MPoint:
    point: PPoint

    def __post_init__(self) -> None:
        if on_triangle(self.point):
            raise ChartUnavailable("point lies on the anticanonical triangle", point=self.point.to_json())

    @classmethod
    def from_qp(cls, q, p) -> "MPoint":
        return cls(PPoint(q, p, 1))

    @classmethod
    def from_chart2(cls, q2, p2) -> "MPoint":
        return cls(PPoint(1, p2, q2))

    @property
    def qp(self) -> tuple[Fraction, Fraction]:
        x0, x1, x2 = self.point
        return x0 / x2, x1 / x2

    @property
    def qp2(self) -> tuple[Fraction, Fraction]:
        x0, x1, x2 = self.point
        return x2 / x0, x1 / x0

    def to_json(self) -> dict:
        q, p = self.qp
        return {"point": self.point.to_json(), "q": str(q), "p": str(p)}


# ---------------------------------------------------------------------------
# Generator maps


@dataclass(frozen=True)
class QuadMapData:
    gamma: Fraction
    a: Fraction
    b: Fraction
    c: Fraction
    nu: ParamVector

    @classmethod
    def of(cls, nu: ParamVector) -> "QuadMapData":
        g = nu.gamma
        two = 2 * THIRD * g
        return cls(g, nu[1][0] - two, nu[INF][0] - 1 - two, nu[0][0] - two, nu)

    def f14(self, x) -> Fraction:
        nu = self.nu
        return nu[1][0] * x[0] + nu[0][0] * (x[0] - x[2]) - x[1]

    def f16(self, x) -> Fraction:
        nu = self.nu
        return nu[1][0] * x[2] + (nu[INF][0] - 1) * (x[2] - x[0]) - x[1]

    def f46(self, x) -> Fraction:
        nu = self.nu
        return nu[0][0] * x[2] + (nu[INF][0] - 1) * x[0] + x[1]

    def image(self, x) -> tuple[Fraction, Fraction, Fraction]:
        f14, f16, f46 = self.f14(x), self.f16(x), self.f46(x)
        g = self.gamma
        return (
            g * x[0] * f16,
            self.a * f14 * f16 - self.b * f16 * f46 - self.c * f14 * f46,
            g * x[2] * f14,
        )


# contracted line -> exceptional point of the target configuration
CONTRACTIONS = {"f46": 1, "f16": 4, "f14": 6}
BASE_POINTS = (1, 4, 6)


@dataclass(frozen=True)
class BirationalMap:
    generator: str
    nu: ParamVector
    kind: str  # "identity", "linear" or "quadratic"
    matrix: tuple[tuple[Fraction, ...], ...] | None = None
    quad: QuadMapData | None = None

    @property
    def target_nu(self) -> ParamVector:
        return act_nu(self.generator, self.nu)

    def raw(self, x: Sequence[Fraction]) -> tuple[Fraction, Fraction, Fraction]:
        if self.kind == "identity":
            return tuple(Fraction(v) for v in x)
        if self.kind == "linear":
            return tuple(sum(m * v for m, v in zip(row, x)) for row in self.matrix)
        return self.quad.image(x)

    def __call__(self, x: PPoint) -> PPoint:
        return eval_map(self, x)


SIGMA1_MATRIX = ((Fraction(-1), Fraction(0), Fraction(1)), (Fraction(0), Fraction(-1), Fraction(0)), (Fraction(0), Fraction(0), Fraction(1)))


def sigma2_matrix(s, t) -> tuple[tuple[Fraction, ...], ...]:
    return ((Fraction(0), Fraction(0), Fraction(1)), (Fraction(s), Fraction(1), Fraction(t)), (Fraction(1), Fraction(0), Fraction(0)))


def calibrate_sigma2_shear(nu: ParamVector) -> tuple[Fraction, Fraction]:
    """Solve for (s, t) from p4 -> p6 and p6 -> p4 under the sigma2 action.

    (0 : -nu00 : 1) goes to (1 : -nu00 + t : 0), which must equal
    (1 : 1 - nu'inf0 : 0); (1 : 1 - nuinf0 : 0) goes to (0 : s + 1 - nuinf0 : 1),
    which must equal (0 : -nu'00 : 1).
    """
    tgt = act_nu("s2", nu)
    rows = [[Fraction(0), Fraction(1)], [Fraction(1), Fraction(0)]]
    rhs = [1 - tgt[INF][0] + nu[0][0], -tgt[0][0] - 1 + nu[INF][0]]
    s, t = solve_unique(rows, rhs)
    return s, t


SIGMA2_SHEAR = (-THIRD, THIRD)


def phi_generator(gen: str, nu: ParamVector) -> BirationalMap:
    g = gen.lower()
    if g == "s1":
        return BirationalMap(g, nu, "linear", matrix=SIGMA1_MATRIX)
    if g == "s2":
        return BirationalMap(g, nu, "linear", matrix=sigma2_matrix(*SIGMA2_SHEAR))
    if g == "w3":
        if nu.gamma == 0:
            raise SingularSystem("gamma = 0: the quadratic map degenerates")
        return BirationalMap(g, nu, "quadratic", quad=QuadMapData.of(nu))
    if g in ("w0", "w1", "w2", "w4", "w5", "w6"):
        return BirationalMap(g, nu, "identity")
    raise ValueError(f"unknown generator {gen!r}")


def eval_map(fmap: BirationalMap, x: PPoint) -> PPoint:
    """Evaluate at a point, reporting base points and contracted lines."""
    out = fmap.raw(tuple(x))
    if all(v == 0 for v in out):
        base = None
        if fmap.quad is not None:
            pts = nine_points(fmap.nu)
            base = next((f"p{k}" for k in BASE_POINTS if pts[k] == x), None)
        raise IndeterminatePoint(
            f"{fmap.generator} is not defined at {x!r}", point=x.to_json(), base_point=base
        )
    image = PPoint(*out)
    if fmap.quad is not None and not on_triangle(x) and on_triangle(image):
        q = fmap.quad
        line = next(name for name in ("f46", "f16", "f14") if getattr(q, name)(tuple(x)) == 0)
        target = CONTRACTIONS[line]
        raise ContractedToBoundary(
            f"{x!r} lies on the line {line} = 0, contracted to p{target} of the target surface",
            line=line,
            target=f"p{target}",
            point=image.to_json(),
        )
    return image


def chart_coordinates(x: PPoint) -> tuple[Fraction, Fraction]:
    return MPoint(x).qp


def maps_equal_on(f: Callable[[PPoint], PPoint], g: Callable[[PPoint], PPoint], pts: Sequence[PPoint]) -> bool:
    return all(f(x) == g(x) for x in pts)


def points_in_general_position(pts: Sequence[PPoint]) -> bool:
    return rank([list(p) for p in pts]) == 3
