import random

import pytest
import sympy

from a2wc import picard_lattice as pl
from a2wc.picard_lattice import D0, D1, D2, DELTA, E, ROOTS, combo, intersect, reflect


def test_intersection_form_examples():
    assert intersect(E(0), E(0)) == 1
    assert intersect(E(3), E(3)) == -1
    assert intersect(E(0), E(5)) == 0
    assert intersect(ROOTS[3], E(1)) == 1


def test_roots_and_marks():
    for n, r in ROOTS.items():
        assert intersect(r, r) == -2, n
    assert pl.add(*(pl.scale(pl.MARKS[n], ROOTS[n]) for n in pl.NODES)) == DELTA
    assert DELTA == pl.add(D0, D1, D2)
    assert intersect(DELTA, DELTA) == 0


def test_dynkin_diagram_is_affine_e6():
    edges = {(i, j) for (i, j), v in pl.adjacency().items() if v == 1}
    assert edges == {(1, 2), (2, 3), (3, 4), (4, 5), (3, 6), (0, 6)}


def test_reflection_examples():
    assert reflect(ROOTS[1], E(2)) == E(3)
    assert reflect(ROOTS[3], E(0)) == combo((2, 0), (-1, 1), (-1, 4), (-1, 6))
    assert reflect(ROOTS[3], E(1)) == combo((1, 0), (-1, 4), (-1, 6))
    with pytest.raises(ValueError):
        reflect(E(1), E(2))


def test_diagram_automorphisms_permute_points():
    s1, s2 = pl.generator_map("s1"), pl.generator_map("s2")
    assert pl.apply_map(s1, E(1)) == E(4)
    assert pl.apply_map(s1, E(9)) == E(3)
    assert pl.apply_map(s2, E(8)) == E(9)
    assert pl.apply_map(s1, D1) == D0
    assert pl.apply_map(s2, D2) == D0


def test_induced_node_permutations():
    assert pl.induced_node_permutation("s1") == {0: 1, 1: 0, 2: 6, 3: 3, 4: 4, 5: 5, 6: 2}
    assert pl.induced_node_permutation("s2") == {0: 5, 1: 1, 2: 2, 3: 3, 4: 6, 5: 0, 6: 4}


def test_coxeter_presentation():
    rep = pl.verify_coxeter()
    assert rep.ok, rep.failures
    assert len(rep.checks) > 50
    assert rep.to_json()["ok"]


def test_w3_table_agreement_on_exceptional_classes():
    assert all(pl.w3_table_agreement().values())
    # E0 maps to 2E0 - E1 - E4 - E6, not to E0
    assert pl.apply_map(pl.generator_map("w3"), E(0)) != E(0)


def test_random_classes_keep_their_intersections():
    rng = random.Random(5)
    for _ in range(100):
        a = tuple(rng.randint(-5, 5) for _ in range(10))
        b = tuple(rng.randint(-5, 5) for _ in range(10))
        for g in pl.GENERATORS:
            m = pl.generator_map(g)
            assert intersect(pl.apply_map(m, a), pl.apply_map(m, b)) == intersect(a, b)


def test_determinant_against_sympy():
    for g in pl.GENERATORS:
        m = pl.generator_map(g)
        assert pl.determinant(m) == sympy.Matrix(m).det()
    assert pl.determinant(pl.IDENTITY) == 1


def test_point_permutation():
    assert pl.point_permutation("w3") is None
    assert pl.point_permutation("w1")[2] == 3
    assert pl.point_permutation("s2")[4] == 6
    assert pl.point_permutation("w2")[9] == 9


def test_sublattice_report():
    rep = pl.sublattice_report()
    assert (rep["rank_e6"], rep["rank_a2"], rep["rank_sum"], rep["rank_intersection"]) == (7, 3, 9, 1)
    assert rep["delta_in_both"] and rep["delta_primitive"] and rep["all_orthogonal_to_delta"]
    assert rep["sum_spans_pic"] is False
    assert rep["index_in_delta_perp"] == 3


def test_sublattice_index_by_smith_form():
    from sympy.matrices.normalforms import smith_normal_form

    gens = sympy.Matrix(pl.root_lattice_basis() + pl.triangle_lattice_basis())
    snf = smith_normal_form(gens, domain=sympy.ZZ)
    invariants = sorted(abs(snf[i, i]) for i in range(min(snf.shape)) if snf[i, i] != 0)
    assert invariants == [1] * 8 + [3]
    perp = sympy.Matrix(pl.delta_perp_basis())
    assert perp.rank() == 9
    assert all(intersect(tuple(perp.row(i)), DELTA) == 0 for i in range(9))
