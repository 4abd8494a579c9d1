"""Exact rational arithmetic: polynomials in one variable, 3x3 polynomial
matrices, projective points and small dense linear algebra over Q.

Rationals are ``fractions.Fraction`` (always reduced, positive denominator).
"""

from __future__ import annotations

import re
from fractions import Fraction
from typing import Iterable, Sequence, Union

from .errors import ParseError, SingularSystem

Rat = Fraction
Scalar = Union[int, Fraction]

_RAT_RE = re.compile(r"^[+-]?\d+(/\d+)?$")


def parse_rat(text: str, field: str = "value") -> Fraction:
    """Parse the strict rational text format ``[+-]digits[/digits]``."""
    s = str(text).strip()
    if not _RAT_RE.match(s):
        raise ParseError(f"{field}: malformed rational {text!r}", field=field)
    if "/" in s:
        num, den = s.split("/")
        if int(den) == 0:
            raise ParseError(f"{field}: zero denominator in {text!r}", field=field)
        return Fraction(int(num), int(den))
    return Fraction(int(s))


def format_rat(x: Scalar) -> str:
    return str(Fraction(x))


def is_integer(x: Fraction) -> bool:
    return Fraction(x).denominator == 1


# ---------------------------------------------------------------------------
# Univariate polynomials


class Poly:
    """Dense polynomial with rational coefficients, lowest degree first.

    The zero polynomial has no coefficients; otherwise the last coefficient
    is nonzero.
    """

    __slots__ = ("coeffs",)

    def __init__(self, coeffs: Iterable[Scalar] = ()) -> None:
        cs = [Fraction(c) for c in coeffs]
        while cs and cs[-1] == 0:
            cs.pop()
        object.__setattr__(self, "coeffs", tuple(cs))

    def __setattr__(self, name, value):
        raise AttributeError("Poly is immutable")

    @classmethod
    def const(cls, c: Scalar) -> "Poly":
        return cls((c,))

    @classmethod
    def z(cls) -> "Poly":
        return cls((0, 1))

    @classmethod
    def coerce(cls, x: "Poly | Scalar") -> "Poly":
        return x if isinstance(x, Poly) else cls((x,))

    @property
    def degree(self) -> int:
        """Degree; -1 for the zero polynomial."""
        return len(self.coeffs) - 1

    def coeff(self, k: int) -> Fraction:
        return self.coeffs[k] if 0 <= k < len(self.coeffs) else Fraction(0)

    @property
    def lead(self) -> Fraction:
        return self.coeffs[-1] if self.coeffs else Fraction(0)

    def is_zero(self) -> bool:
        return not self.coeffs

    def is_constant(self) -> bool:
        return len(self.coeffs) <= 1

    def constant_value(self) -> Fraction:
        if not self.is_constant():
            raise ValueError(f"polynomial {self} is not constant")
        return self.coeff(0)

    def __call__(self, x: Scalar) -> Fraction:
        acc = Fraction(0)
        for c in reversed(self.coeffs):
            acc = acc * x + c
        return acc

    def __eq__(self, other: object) -> bool:
        if isinstance(other, (int, Fraction)):
            other = Poly.const(other)
        if not isinstance(other, Poly):
            return NotImplemented
        return self.coeffs == other.coeffs

    def __hash__(self) -> int:
        return hash(self.coeffs)

    def __add__(self, other: "Poly | Scalar") -> "Poly":
        o = Poly.coerce(other).coeffs
        n = max(len(self.coeffs), len(o))
        return Poly(self.coeff(k) + (o[k] if k < len(o) else 0) for k in range(n))

    __radd__ = __add__

    def __neg__(self) -> "Poly":
        return Poly(-c for c in self.coeffs)

    def __sub__(self, other: "Poly | Scalar") -> "Poly":
        return self + (-Poly.coerce(other))

    def __rsub__(self, other: Scalar) -> "Poly":
        return Poly.coerce(other) - self

    def __mul__(self, other: "Poly | Scalar") -> "Poly":
        if not isinstance(other, Poly):
            c = Fraction(other)
            return Poly(a * c for a in self.coeffs)
        if self.is_zero() or other.is_zero():
            return Poly()
        out = [Fraction(0)] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            if a:
                for j, b in enumerate(other.coeffs):
                    out[i + j] += a * b
        return Poly(out)

    __rmul__ = __mul__

    def __truediv__(self, c: Scalar) -> "Poly":
        c = Fraction(c)
        return Poly(a / c for a in self.coeffs)

    def __pow__(self, n: int) -> "Poly":
        out = Poly.const(1)
        for _ in range(n):
            out = out * self
        return out

    def deriv(self) -> "Poly":
        return Poly(k * c for k, c in enumerate(self.coeffs) if k > 0)

    def compose(self, inner: "Poly") -> "Poly":
        acc = Poly()
        for c in reversed(self.coeffs):
            acc = acc * inner + c
        return acc

    def reversed_to(self, n: int) -> "Poly":
        """Return z^n * P(1/z); requires deg P <= n."""
        if self.degree > n:
            raise ValueError(f"degree {self.degree} exceeds reversal order {n}")
        return Poly(self.coeff(n - k) for k in range(n + 1))

    def root_of_linear(self) -> Fraction:
        if self.degree != 1:
            raise ValueError("not a linear polynomial")
        return -self.coeffs[0] / self.coeffs[1]

    def to_json(self) -> list[str]:
        return [format_rat(c) for c in self.coeffs]

    def __repr__(self) -> str:
        if not self.coeffs:
            return "0"
        terms = []
        for k, c in enumerate(self.coeffs):
            if c == 0:
                continue
            mono = "" if k == 0 else ("z" if k == 1 else f"z^{k}")
            if mono and c == 1:
                terms.append(mono)
            elif mono and c == -1:
                terms.append("-" + mono)
            else:
                terms.append(f"{c}{'*' + mono if mono else ''}")
        return " + ".join(reversed(terms)).replace("+ -", "- ")


def interpolate_quadratic(v0: Scalar, v1: Scalar, vlead: Scalar) -> Poly:
    """The polynomial of degree <= 2 with P(0)=v0, P(1)=v1 and z^2-coefficient vlead."""
    v0, v1, vlead = Fraction(v0), Fraction(v1), Fraction(vlead)
    return Poly((v0, v1 - v0 - vlead, vlead))


def char_poly(m: Sequence[Sequence[Scalar]]) -> Poly:
    """det(t I - M) for a constant 3x3 matrix, as a polynomial in t."""
    (a, b, c), (d, e, f), (g, h, i) = [[Fraction(x) for x in row] for row in m]
    tr = a + e + i
    minors = (a * e - b * d) + (a * i - c * g) + (e * i - f * h)
    det = a * (e * i - f * h) - b * (d * i - f * g) + c * (d * h - e * g)
    return Poly((-det, minors, -tr, 1))


def poly_from_roots(roots: Iterable[Scalar]) -> Poly:
    out = Poly.const(1)
    for r in roots:
        out = out * Poly((-Fraction(r), 1))
    return out


def char_poly_matches(m: Sequence[Sequence[Scalar]], eigs: Iterable[Scalar]) -> bool:
    """True iff the characteristic polynomial of ``m`` is prod (t - lambda)."""
    return char_poly(m) == poly_from_roots(eigs)


# ---------------------------------------------------------------------------
# 3x3 polynomial matrices


class Mat3:
    """Immutable 3x3 matrix of polynomials in z."""

    __slots__ = ("rows",)

    def __init__(self, rows: Sequence[Sequence["Poly | Scalar"]]) -> None:
        if len(rows) != 3 or any(len(r) != 3 for r in rows):
            raise ValueError("Mat3 needs a 3x3 shape")
        object.__setattr__(
            self, "rows", tuple(tuple(Poly.coerce(x) for x in r) for r in rows)
        )

    def __setattr__(self, name, value):
        raise AttributeError("Mat3 is immutable")

    @classmethod
    def identity(cls) -> "Mat3":
        return cls.diag(1, 1, 1)

    @classmethod
    def diag(cls, a, b, c) -> "Mat3":
        return cls([[a, 0, 0], [0, b, 0], [0, 0, c]])

    def __getitem__(self, ij: tuple[int, int]) -> Poly:
        i, j = ij
        return self.rows[i][j]

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Mat3):
            return NotImplemented
        return self.rows == other.rows

    def __hash__(self) -> int:
        return hash(self.rows)

    def __add__(self, other: "Mat3") -> "Mat3":
        return Mat3([[self[i, j] + other[i, j] for j in range(3)] for i in range(3)])

    def __sub__(self, other: "Mat3") -> "Mat3":
        return Mat3([[self[i, j] - other[i, j] for j in range(3)] for i in range(3)])

    def __neg__(self) -> "Mat3":
        return Mat3([[-x for x in r] for r in self.rows])

    def __mul__(self, other: "Mat3 | Poly | Scalar") -> "Mat3":
        if isinstance(other, Mat3):
            return Mat3(
                [
                    [sum((self[i, k] * other[k, j] for k in range(3)), Poly()) for j in range(3)]
                    for i in range(3)
                ]
            )
        return Mat3([[x * other for x in r] for r in self.rows])

    def __rmul__(self, other: "Poly | Scalar") -> "Mat3":
        return Mat3([[x * other for x in r] for r in self.rows])

    def __truediv__(self, c: Scalar) -> "Mat3":
        return Mat3([[x / c for x in r] for r in self.rows])

    def map(self, fn) -> "Mat3":
        return Mat3([[fn(x) for x in r] for r in self.rows])

    def deriv(self) -> "Mat3":
        return self.map(Poly.deriv)

    def at(self, z: Scalar) -> tuple[tuple[Fraction, ...], ...]:
        return tuple(tuple(x(z) for x in r) for r in self.rows)

    def transpose(self) -> "Mat3":
        return Mat3([[self[j, i] for j in range(3)] for i in range(3)])

    def det(self) -> Poly:
        m = self
        return (
            m[0, 0] * (m[1, 1] * m[2, 2] - m[1, 2] * m[2, 1])
            - m[0, 1] * (m[1, 0] * m[2, 2] - m[1, 2] * m[2, 0])
            + m[0, 2] * (m[1, 0] * m[2, 1] - m[1, 1] * m[2, 0])
        )

    def adjugate(self) -> "Mat3":
        m = self

        def minor(i: int, j: int) -> Poly:
            r = [k for k in range(3) if k != i]
            c = [k for k in range(3) if k != j]
            return m[r[0], c[0]] * m[r[1], c[1]] - m[r[0], c[1]] * m[r[1], c[0]]

        return Mat3([[minor(j, i) * (-1 if (i + j) % 2 else 1) for j in range(3)] for i in range(3)])

    def inverse(self) -> "Mat3":
        """Inverse of a matrix whose determinant is a nonzero constant."""
        d = self.det()
        if d.is_zero() or not d.is_constant():
            raise SingularSystem("matrix is not invertible over Q[z]", det=repr(d))
        return self.adjugate() / d.constant_value()

    def max_degree(self) -> int:
        return max(x.degree for r in self.rows for x in r)

    def to_json(self) -> list[list[list[str]]]:
        return [[x.to_json() for x in r] for r in self.rows]

    @classmethod
    def from_json(cls, data) -> "Mat3":
        return cls([[Poly(parse_rat(c) for c in entry) for entry in row] for row in data])

    def __repr__(self) -> str:
        return "Mat3(" + "; ".join(", ".join(repr(x) for x in r) for r in self.rows) + ")"


def constant_matrix(m: Sequence[Sequence[Scalar]]) -> Mat3:
    return Mat3([[Fraction(x) for x in r] for r in m])


def residue_of_form(a: Mat3, at, twist: Sequence[int] = (0, 0, 0)) -> tuple[tuple[Fraction, ...], ...]:
    """Residue of d + A(z) dz/(z(z-1)) at z = 0, 1 or "inf".

    At infinity the frame is rescaled by z^twist[k] in slot k (the frame of a
    split bundle O(twist[0]) + O(twist[1]) + O(twist[2]) near infinity).
    """
    if at == 0:
        return tuple(tuple(-x for x in r) for r in a.at(0))
    if at == 1:
        return a.at(1)
    if at in ("inf", "∞"):
        inv = invert_coordinate(a, twist)
        return tuple(tuple(-x for x in r) for r in inv.at(0))
    raise ValueError(f"unknown point {at!r}")


def invert_coordinate(a: Mat3, twist: Sequence[int]) -> Mat3:
    """Rewrite d + A(z) dz/(z(z-1)) in w = 1/z and the frame z^twist.

    Entry (i, j) becomes w^(1+s_i-s_j) A_ij(1/w) and the diagonal picks up
    -s_i (w - 1); the result is again of the form B(w) dw/(w(w-1)).
    Raises ValueError when the connection is not logarithmic at infinity.
    """
    s = list(twist)
    rows = []
    for i in range(3):
        row = []
        for j in range(3):
            n = 1 + s[i] - s[j]
            entry = a[i, j]
            if entry.is_zero():
                b = Poly()
            elif n < 0:
                raise ValueError(f"entry ({i},{j}) has a pole of excess order at infinity")
            else:
                b = entry.reversed_to(n)
            if i == j:
                b = b - Poly((-s[i], s[i]))
            row.append(b)
        rows.append(row)
    return Mat3(rows)


def gauge_transform(a: Mat3, g: Mat3) -> Mat3:
    """g^-1 A g + z(z-1) g^-1 g' for a frame change by g (constant determinant)."""
    ginv = g.inverse()
    zz = Poly((0, -1, 1))
    return ginv * a * g + (ginv * g.deriv()) * zz


# ---------------------------------------------------------------------------
# Projective points


class PPoint:
    """Point of P^2 with rational homogeneous coordinates, stored canonically
    (first nonzero coordinate equal to 1)."""

    __slots__ = ("coords",)

    def __init__(self, x0: Scalar, x1: Scalar, x2: Scalar) -> None:
        xs = [Fraction(x0), Fraction(x1), Fraction(x2)]
        lead = next((x for x in xs if x != 0), None)
        if lead is None:
            raise ValueError("(0:0:0) is not a projective point")
        object.__setattr__(self, "coords", tuple(x / lead for x in xs))

    def __setattr__(self, name, value):
        raise AttributeError("PPoint is immutable")

    @classmethod
    def from_seq(cls, xs: Sequence[Scalar]) -> "PPoint":
        return cls(*xs)

    def __iter__(self):
        return iter(self.coords)

    def __getitem__(self, k: int) -> Fraction:
        return self.coords[k]

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, PPoint):
            return NotImplemented
        return self.coords == other.coords

    def __hash__(self) -> int:
        return hash(self.coords)

    def to_json(self) -> list[str]:
        return [format_rat(x) for x in self.coords]

    def __repr__(self) -> str:
        return "(" + ":".join(format_rat(x) for x in self.coords) + ")"


# ---------------------------------------------------------------------------
# Dense linear algebra over Q


def rref(rows: Sequence[Sequence[Scalar]]) -> tuple[list[list[Fraction]], list[int]]:
    """Reduced row echelon form and pivot columns."""
    m = [[Fraction(x) for x in r] for r in rows]
    pivots: list[int] = []
    if not m:
        return m, pivots
    ncols = len(m[0])
    r = 0
    for c in range(ncols):
        piv = next((i for i in range(r, len(m)) if m[i][c] != 0), None)
        if piv is None:
            continue
        m[r], m[piv] = m[piv], m[r]
        inv = 1 / m[r][c]
        m[r] = [x * inv for x in m[r]]
        for i in range(len(m)):
            if i != r and m[i][c] != 0:
                f = m[i][c]
                m[i] = [a - f * b if b else a for a, b in zip(m[i], m[r])]
        pivots.append(c)
        r += 1
        if r == len(m):
            break
    return m, pivots


def rank(rows: Sequence[Sequence[Scalar]]) -> int:
    return len(rref(rows)[1])


def nullspace(rows: Sequence[Sequence[Scalar]]) -> list[list[Fraction]]:
    """Basis of {x : M x = 0}."""
    if not rows:
        return []
    ncols = len(rows[0])
    m, pivots = rref(rows)
    free = [c for c in range(ncols) if c not in pivots]
    basis = []
    for f in free:
        v = [Fraction(0)] * ncols
        v[f] = Fraction(1)
        for i, p in enumerate(pivots):
            v[p] = -m[i][f]
        basis.append(v)
    return basis


def solve_unique(rows: Sequence[Sequence[Scalar]], rhs: Sequence[Scalar]) -> list[Fraction]:
    """Solve M x = b, requiring a consistent system with a unique solution."""
    ncols = len(rows[0])
    aug = [list(r) + [b] for r, b in zip(rows, rhs)]
    m, pivots = rref(aug)
    if ncols in pivots:
        raise SingularSystem("inconsistent linear system")
    if len(pivots) != ncols:
        raise SingularSystem("linear system has no unique solution", rank=len(pivots))
    x = [Fraction(0)] * ncols
    for i, p in enumerate(pivots):
        x[p] = m[i][ncols]
    return x


class UniqueSolver:
    """Reusable solver for M x = b with a fixed M and varying b.

    Row-reduces [M | I] once; each solve is then a matrix-vector product.
    """

    def __init__(self, rows: Sequence[Sequence[Scalar]]) -> None:
        nrows, ncols = len(rows), len(rows[0])
        aug = [list(r) + [int(i == k) for k in range(nrows)] for i, r in enumerate(rows)]
        m, pivots = rref(aug)
        self.pivots = [p for p in pivots if p < ncols]
        if len(self.pivots) != ncols:
            raise SingularSystem("linear system has no unique solution", rank=len(self.pivots))
        self.ncols = ncols
        self.transform = [row[ncols:] for row in m]

    def __call__(self, rhs: Sequence[Scalar]) -> list[Fraction]:
        y = [sum((t * Fraction(b) for t, b in zip(row, rhs) if t), Fraction(0)) for row in self.transform]
        if any(y[len(self.pivots):]):
            raise SingularSystem("inconsistent linear system")
        x = [Fraction(0)] * self.ncols
        for i, p in enumerate(self.pivots):
            x[p] = y[i]
        return x


def hermite_normal_form(rows: Sequence[Sequence[int]]) -> list[list[int]]:
    """Row-style Hermite normal form of an integer matrix (zero rows dropped)."""
    m = [list(map(int, r)) for r in rows]
    if not m:
        return []
    ncols = len(m[0])
    out_row = 0
    for c in range(ncols):
        # Euclid on column c among rows >= out_row
        while True:
            nz = [i for i in range(out_row, len(m)) if m[i][c] != 0]
            if not nz:
                break
            piv = min(nz, key=lambda i: abs(m[i][c]))
            m[out_row], m[piv] = m[piv], m[out_row]
            done = True
            for i in range(out_row + 1, len(m)):
                if m[i][c]:
                    f = m[i][c] // m[out_row][c]
                    m[i] = [a - f * b for a, b in zip(m[i], m[out_row])]
                    if m[i][c]:
                        done = False
            if done:
                break
        if out_row < len(m) and m[out_row][c] != 0:
            if m[out_row][c] < 0:
                m[out_row] = [-a for a in m[out_row]]
            for i in range(out_row):
                f = m[i][c] // m[out_row][c]
                m[i] = [a - f * b for a, b in zip(m[i], m[out_row])]
            out_row += 1
            if out_row == len(m):
                break
    return [r for r in m if any(r)]
