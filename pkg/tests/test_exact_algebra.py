import random
from fractions import Fraction as F

import pytest
import sympy
from hypothesis import given, settings
from hypothesis import strategies as st

from a2wc.errors import ParseError, SingularSystem
from a2wc.exact_algebra import (
    Mat3,
    Poly,
    PPoint,
    char_poly,
    char_poly_matches,
    constant_matrix,
    format_rat,
    gauge_transform,
    hermite_normal_form,
    interpolate_quadratic,
    invert_coordinate,
    nullspace,
    parse_rat,
    rank,
    residue_of_form,
    rref,
    solve_unique,
)
from conftest import sympy_matrix, to_fraction

rats = st.fractions(min_value=-20, max_value=20, max_denominator=12)
polys = st.lists(rats, max_size=4).map(Poly)
zsym = sympy.Symbol("z")


def as_sympy(p: Poly):
    return sympy.Integer(0) + sum(sympy.Rational(c.numerator, c.denominator) * zsym**k for k, c in enumerate(p.coeffs))


def test_parse_rat_accepts_strict_forms():
    assert parse_rat("3") == 3
    assert parse_rat("-3/6") == F(-1, 2)
    assert parse_rat("+7/1") == 7


@pytest.mark.parametrize("bad", ["", "1.5", "1/0", "a", "1/-2", "1 /2", "0x10", "1e3"])
def test_parse_rat_rejects(bad):
    with pytest.raises(ParseError) as info:
        parse_rat(bad, field="nu[0,1]")
    assert info.value.detail["field"] == "nu[0,1]"


def test_format_rat_round_trip():
    for x in (F(0), F(-7, 3), F(5)):
        assert parse_rat(format_rat(x)) == x


def test_exact_arithmetic_ten_thousand_pairs():
    rng = random.Random(7)
    for _ in range(10_000):
        a = F(rng.randint(-10**6, 10**6), rng.randint(1, 10**6))
        b = F(rng.randint(-10**6, 10**6), rng.randint(1, 10**6))
        assert (a + b) - b == a
        if b:
            assert (a * b) / b == a


def test_interpolate_quadratic_examples():
    assert interpolate_quadratic(1, 2, 3) == Poly((1, -2, 3))
    assert interpolate_quadratic(0, 0, 0) == Poly()
    p = interpolate_quadratic(F(1, 2), F(-3, 4), F(5, 7))
    assert (p(0), p(1), p.coeff(2)) == (F(1, 2), F(-3, 4), F(5, 7))


@given(rats, rats, rats)
def test_interpolate_quadratic_property(v0, v1, lead):
    p = interpolate_quadratic(v0, v1, lead)
    assert p.degree <= 2 and p(0) == v0 and p(1) == v1 and p.coeff(2) == lead


@settings(max_examples=60, deadline=None)
@given(polys, polys, rats)
def test_poly_ops_match_sympy(a, b, x):
    assert sympy.expand(as_sympy(a * b) - as_sympy(a) * as_sympy(b)) == 0
    assert sympy.expand(as_sympy(a + b) - as_sympy(a) - as_sympy(b)) == 0
    assert sympy.expand(as_sympy(a.compose(b)) - as_sympy(a).subs(zsym, as_sympy(b))) == 0
    assert sympy.expand(as_sympy(a.deriv()) - sympy.diff(as_sympy(a), zsym)) == 0
    assert a(x) == to_fraction(as_sympy(a).subs(zsym, sympy.Rational(x.numerator, x.denominator)))


def test_poly_degree_and_lead():
    assert Poly().degree == -1
    assert Poly((1, 2, 0)).degree == 1
    assert Poly((1, 2)).lead == 2
    assert Poly((0, 3)).root_of_linear() == 0


matrices = st.lists(st.lists(rats, min_size=3, max_size=3), min_size=3, max_size=3)


@settings(max_examples=60, deadline=None)
@given(matrices)
def test_char_poly_matches_sympy(m):
    ours = char_poly(m)
    t = sympy.Symbol("t")
    theirs = sympy.Poly(sympy_matrix(m).charpoly(t).as_expr(), t).all_coeffs()[::-1]
    assert [to_fraction(c) for c in theirs] == list(ours.coeffs)


def test_char_poly_matches_multiset():
    assert char_poly_matches([[1, 0, 0], [0, 2, 0], [0, 0, 2]], [2, 1, 2])
    assert not char_poly_matches([[1, 0, 0], [0, 2, 0], [0, 0, 2]], [1, 1, 2])
    # a Jordan block still has a repeated exponent
    assert char_poly_matches([[3, 1, 0], [0, 3, 0], [0, 0, 0]], [3, 3, 0])


@settings(max_examples=40, deadline=None)
@given(matrices)
def test_mat3_det_inverse_match_sympy(m):
    M = constant_matrix(m)
    d = sympy_matrix(m).det()
    assert M.det() == Poly.const(to_fraction(d))
    if d == 0:
        with pytest.raises(SingularSystem):
            M.inverse()
    else:
        assert M * M.inverse() == Mat3.identity()


def test_inverse_needs_constant_determinant():
    z = Poly.z()
    with pytest.raises(SingularSystem):
        Mat3.diag(z, 1, 1).inverse()
    # unipotent polynomial matrices are invertible
    U = Mat3([[1, z, z * z], [0, 1, z], [0, 0, 1]])
    assert U * U.inverse() == Mat3.identity()


def test_residues_of_diagonal_form():
    z = Poly.z()
    # A/(z(z-1)) with A = diag(a + b z) has residue -a at 0 and a + b at 1
    A = Mat3.diag(Poly((2, 3)), Poly((-1, 1)), Poly((F(1, 2), 0)))
    assert residue_of_form(A, 0) == ((-2, 0, 0), (0, 1, 0), (0, 0, F(-1, 2)))
    assert residue_of_form(A, 1) == ((5, 0, 0), (0, 0, 0), (0, 0, F(1, 2)))
    # residue at infinity is minus the top coefficient
    assert residue_of_form(A, "inf") == ((-3, 0, 0), (0, -1, 0), (0, 0, 0))
    # and residues sum to zero
    tot = [[sum(residue_of_form(A, at)[i][j] for at in (0, 1, "inf")) for j in range(3)] for i in range(3)]
    assert tot == [[0] * 3] * 3
    assert z.degree == 1


def test_invert_coordinate_is_involution():
    rng = random.Random(3)
    for twist in ((0, 0, 0), (0, -1, -1), (1, 0, 0)):
        for _ in range(5):
            rows = [[Poly((F(rng.randint(-4, 4)), F(rng.randint(-4, 4)))) for _ in range(3)] for _ in range(3)]
            # keep off-diagonal entries compatible with the twist
            for i in range(3):
                for j in range(3):
                    if i != j and 1 + twist[i] - twist[j] < 1:
                        rows[i][j] = Poly()
            A = Mat3(rows)
            assert invert_coordinate(invert_coordinate(A, twist), twist) == A


def test_gauge_transform_composes():
    z = Poly.z()
    A = Mat3([[0, z, 1], [1, -z, 0], [0, z - 2, 3]])
    g = Mat3([[1, z, 0], [0, 2, 1], [0, 1, 1]])
    h = Mat3([[2, 0, z], [0, 1, 0], [0, 3, 1]])
    assert gauge_transform(gauge_transform(A, g), h) == gauge_transform(A, g * h)
    assert gauge_transform(A, Mat3.identity()) == A


def test_mat3_json_round_trip():
    z = Poly.z()
    A = Mat3([[F(1, 3), z, 1], [1, -z, 0], [0, z - 2, 3]])
    assert Mat3.from_json(A.to_json()) == A


@given(rats, rats, rats, rats.filter(lambda x: x != 0))
def test_ppoint_scale_invariance(a, b, c, s):
    if a == b == c == 0:
        with pytest.raises(ValueError):
            PPoint(a, b, c)
        return
    assert PPoint(a, b, c) == PPoint(s * a, s * b, s * c)
    assert PPoint.from_seq(tuple(PPoint(a, b, c))) == PPoint(a, b, c)


def test_linear_algebra_against_sympy():
    rng = random.Random(11)
    for _ in range(30):
        rows = [[F(rng.randint(-3, 3)) for _ in range(5)] for _ in range(4)]
        S = sympy_matrix(rows)
        red, piv = rref(rows)
        sred, spiv = S.rref()
        assert piv == list(spiv)
        assert [[to_fraction(x) for x in S_row] for S_row in sred.tolist()] == red
        assert rank(rows) == S.rank()
        ns = nullspace(rows)
        assert len(ns) == 5 - S.rank()
        for v in ns:
            assert all(sum(r * x for r, x in zip(row, v)) == 0 for row in rows)


def test_solve_unique():
    assert solve_unique([[1, 1], [1, -1]], [3, 1]) == [2, 1]
    with pytest.raises(SingularSystem):
        solve_unique([[1, 1], [2, 2]], [1, 2])
    with pytest.raises(SingularSystem):
        solve_unique([[1, 1], [2, 2]], [1, 3])


def test_hermite_normal_form_against_sympy():
    from sympy.matrices.normalforms import hermite_normal_form as hnf

    rows = [[2, 4, 4], [-6, 6, 12], [10, -4, -16]]
    ours = hermite_normal_form(rows)
    # same lattice: equal absolute determinant and each row in the other's span
    assert abs(sympy.Matrix(ours).det()) == abs(sympy.Matrix(rows).det())
    assert abs(hnf(sympy.Matrix(rows).T).det()) == abs(sympy.Matrix(ours).det())


def test_unique_solver_matches_solve_unique():
    from a2wc.exact_algebra import UniqueSolver

    rows = [[1, 2, 0], [0, 1, 1], [1, 0, 1], [2, 2, 2]]
    solver = UniqueSolver(rows)
    x = [F(1, 2), F(-3), F(7, 5)]
    b = [sum(r * v for r, v in zip(row, x)) for row in rows]
    assert solver(b) == x == solve_unique(rows, b)
    with pytest.raises(SingularSystem):
        solver([1, 0, 0, 0])
    with pytest.raises(SingularSystem):
        UniqueSolver([[1, 1], [2, 2]])
