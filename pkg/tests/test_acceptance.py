"""Acceptance criteria 1-10.

Each criterion records one PASS/FAIL line; the lines are printed as they are
produced and again in the pytest terminal summary.  Run this file directly
(``python tests/test_acceptance.py``) for the lines alone.
"""

import os
import subprocess
import sys
import time
from itertools import combinations

import pytest
import sympy

from a2wc import picard_lattice as pl
from a2wc.cli import run
from a2wc.connection_forms import (
    apparent_pair,
    build_normal_form,
    chart_transfer,
    fuchs_sum,
    normal_form_u0,
    normalize_split_frame,
    random_admissible_gauge,
    realize_sigma,
    realize_sigma_pair,
)
from a2wc.exact_algebra import char_poly, gauge_transform, poly_from_roots
from a2wc.connection_forms import ConnectionForm
from a2wc.middle_convolution import mc_pair, predict_for_nu
from a2wc.parameter_space import act_nu, derive_action_from_chi
from a2wc.sampling import sample_nu, sample_point, stream
from a2wc.surface_geometry import CUBIC_MONOMIALS, MPoint, eval_map, nine_points, phi_generator
from a2wc.weyl_engine import _inverse_admissible, contraction_defects, nu_relation_defects, point_correspondence_defects

SEED = 20261016
RESULTS: list[str] = []


def record(n: int, ok: bool, detail: str, seconds: float) -> None:
    line = f"{'PASS' if ok else 'FAIL'} criterion {n:2d}: {detail} ({seconds:.2f}s)"
    RESULTS.append(line)
    print(line)


def check(n: int, detail: str, limit: float | None, body) -> None:
    start = time.perf_counter()
    try:
        failures = body()
    except Exception as exc:  # recorded, then re-raised for pytest
        record(n, False, f"{detail}; raised {type(exc).__name__}: {exc}", time.perf_counter() - start)
        raise
    elapsed = time.perf_counter() - start
    slow = limit is not None and elapsed >= limit
    ok = not failures and not slow
    note = detail if ok else f"{detail}; failures={failures[:3]}{' too slow' if slow else ''}"
    record(n, ok, note, elapsed)
    assert not failures, failures
    assert not slow, f"took {elapsed:.2f}s, limit {limit}s"


def generic_samples(n: int, suite: str):
    """(nu, q, p) with nu generic in N00 and (q, p) admissible for w3 and its inverse."""
    out, t = [], 0
    while len(out) < n:
        rng = stream(SEED, suite, t)
        t += 1
        nu = sample_nu(rng, "N00", generic=True)
        q, p = MPoint(sample_point(rng, nu)).qp
        if _inverse_admissible(q, p, nu):
            out.append((nu, q, p))
    return out


# ---------------------------------------------------------------------------


def _sympy_reflection(root):
    J = sympy.diag(1, *([-1] * 9))
    a = sympy.Matrix(root)
    # s(x) = x + (x . a) a, as a matrix acting on column vectors
    return sympy.eye(10) + a * (J * a).T


def lattice_failures():
    bad = []
    rep = pl.verify_coxeter()
    bad += rep.failures
    J = sympy.diag(1, *([-1] * 9))
    W = {n: _sympy_reflection(pl.ROOTS[n]) for n in pl.NODES}
    S = {k: sympy.Matrix(pl.generator_map(k)) for k in ("s1", "s2")}
    I = sympy.eye(10)
    for n in pl.NODES:
        # column j of the package matrix is the image of E_j
        if sympy.Matrix(pl.generator_map(f"w{n}")) != W[n]:
            bad.append(f"w{n} differs from sympy reflection")
        if W[n] ** 2 != I:
            bad.append(f"w{n}^2")
    for i, j in combinations(pl.NODES, 2):
        m = {0: 2, 1: 3}[pl.intersect(pl.ROOTS[i], pl.ROOTS[j])]
        if (W[i] * W[j]) ** m != I:
            bad.append(f"(w{i} w{j})^{m}")
    for k, s in S.items():
        st = s
        if st * st != I:
            bad.append(f"{k}^2")
        for n in pl.NODES:
            if not any(st * W[n] * st == W[m] for m in pl.NODES):
                bad.append(f"{k} w{n} {k}")
    for name, M in [(f"w{n}", W[n]) for n in pl.NODES] + list(S.items()):
        if M.T * J * M != J:
            bad.append(f"{name} form")
        if M * sympy.Matrix(pl.DELTA) != sympy.Matrix(pl.DELTA):
            bad.append(f"{name} delta")
    return bad


def test_criterion_01_lattice():
    check(1, "Coxeter, sigma and form/delta identities as 10x10 integer matrices", 1.0, lattice_failures)


def parameter_failures():
    bad = []
    for t in range(100):
        nu = sample_nu(stream(SEED, "acc-params", t), "N")
        bad += [f"trial {t}: {d}" for d in nu_relation_defects(nu)]
        for g in pl.GENERATORS:
            out = act_nu(g, nu)
            if not out.row_sums_ok():
                bad.append(f"trial {t}: {g} row sums")
            if derive_action_from_chi(g, nu) != out:
                bad.append(f"trial {t}: {g} chi derivation")
    return bad


def test_criterion_02_parameters():
    check(2, "act_nu presentation, chi derivation and row sums at 100 nu", 5.0, parameter_failures)


def point_failures():
    bad = []
    for t in range(20):
        rng = stream(SEED, "acc-points", t)
        nu = sample_nu(rng, "N0")
        bad += [f"trial {t}: {d}" for d in point_correspondence_defects(nu)]
        bad += [f"trial {t}: {d}" for d in contraction_defects(nu, rng)]
    return bad


def test_criterion_03_points():
    check(3, "point correspondence and w3 contractions at 20 nu in N0", 10.0, point_failures)


def cubic_failures():
    bad = []
    x0, x1, x2 = sympy.symbols("x0 x1 x2")
    triangle = sympy.expand(x0 * (x0 - x2) * x2)
    for t in range(50):
        nu = sample_nu(stream(SEED, "acc-cubic", t), "N")
        pts = list(nine_points(nu).values())
        M = sympy.Matrix([[sympy.Rational(p[0]) ** e[0] * sympy.Rational(p[1]) ** e[1] * sympy.Rational(p[2]) ** e[2]
                           for e in CUBIC_MONOMIALS] for p in pts])
        ker = M.nullspace()
        if len(ker) != 1:
            bad.append(f"trial {t}: kernel dim {len(ker)}")
            continue
        cubic = sum(c * x0 ** e[0] * x1 ** e[1] * x2 ** e[2] for c, e in zip(ker[0], CUBIC_MONOMIALS))
        if sympy.simplify(sympy.expand(cubic) / triangle).free_symbols:
            bad.append(f"trial {t}: kernel is not the triangle")
    return bad


def test_criterion_04_cubic():
    check(4, "unique cubic through nine points is the triangle at 50 nu", 5.0, cubic_failures)


def normal_form_failures():
    bad = []
    for t in range(100):
        rng = stream(SEED, "acc-normal", t)
        nu = sample_nu(rng, "N")
        m = MPoint(sample_point(rng, nu, avoid_lines=False))
        q, p = m.qp
        u0 = build_normal_form(m, nu, "U0")
        ui = build_normal_form(m, nu, "Uinf")
        if apparent_pair(u0) != (q, p):
            bad.append(f"trial {t}: U0 round trip")
        if apparent_pair(ui) != (1 / q, p / q) or m.qp2 != (1 / q, p / q):
            bad.append(f"trial {t}: Uinf round trip")
        for conn in (u0, ui):
            res = conn.residues()
            for i, name in enumerate(("0", "1", "inf")):
                if char_poly(res[name]) != poly_from_roots(nu[i]):
                    bad.append(f"trial {t}: {conn.chart} residue at {name}")
            if fuchs_sum(nu, conn.degree) != 0:
                bad.append(f"trial {t}: Fuchs")
        if chart_transfer(ui).A != u0.A:
            bad.append(f"trial {t}: chart transfer")
    return bad


def test_criterion_05_normal_forms():
    check(5, "normal forms: round trip, residues, Fuchs, chart transfer at 100 samples", 10.0, normal_form_failures)


def main_theorem_failures():
    bad = []
    for t, (nu, q, p) in enumerate(generic_samples(100, "acc-main")):
        res = mc_pair(q, p, nu)
        surf = MPoint(eval_map(phi_generator("w3", nu), MPoint.from_qp(q, p).point)).qp
        if (res.qbar, res.pbar) != surf:
            bad.append(f"trial {t}: mc {res.qbar, res.pbar} vs surface {surf}")
        back = mc_pair(res.qbar, res.pbar, res.nu_out)
        if (back.qbar, back.pbar, back.nu_out) != (q, p, nu):
            bad.append(f"trial {t}: involution")
    return bad


def test_criterion_06_main_theorem():
    check(6, "mc_pair equals the surface map w3 and is an involution at 100 samples", 30.0, main_theorem_failures)


def matrix_failures():
    bad = []
    for t, (nu, q, p) in enumerate(generic_samples(50, "acc-matrix")):
        res = mc_pair(q, p, nu)
        want = build_normal_form(MPoint.from_qp(res.qbar, res.pbar), act_nu("w3", nu), "U0")
        if res.xi.normal.A != want.A:
            bad.append(f"trial {t}: matrices differ")
        if not res.gm.slot_is_alpha_inf:
            bad.append(f"trial {t}: slot")
    return bad


def test_criterion_07_matrix_equality():
    check(7, "xi-frame matrix equals the normal form at w3(nu) entrywise at 50 samples", 30.0, matrix_failures)


def exponent_failures():
    bad = []
    for t, (nu, q, p) in enumerate(generic_samples(50, "acc-exponents")):
        pred = predict_for_nu(nu)
        res = mc_pair(q, p, nu)
        gm_res = res.gm.form.residues()
        out_res = res.xi.normal.residues()
        g = nu.gamma
        for i, name in enumerate(("0", "1", "inf")):
            if char_poly(gm_res[name]) != poly_from_roots(pred.divisors[i]):
                bad.append(f"trial {t}: Gauss-Manin residue at {name}")
            shift = 1 if name == "inf" else 0
            table = [nu[i][0] - 2 * g / 3, nu[i][1] + g / 3, nu[i][2] + g / 3]
            if sorted(x + shift for x in pred.divisors[i]) != sorted(table):
                bad.append(f"trial {t}: prediction vs table at {name}")
            if char_poly(out_res[name]) != poly_from_roots(table):
                bad.append(f"trial {t}: output residue at {name}")
    return bad


def test_criterion_08_exponents():
    check(8, "predicted exponents equal the residues of the convolved connection at 50 samples", None, exponent_failures)


def sigma_failures():
    bad = []
    for t in range(50):
        rng = stream(SEED, "acc-sigma", t)
        nu = sample_nu(rng, "N")
        m = MPoint(sample_point(rng, nu, avoid_lines=False))
        q, p = m.qp
        (q1, p1), _ = realize_sigma_pair("s1", q, p, nu)
        if (q1, p1) != (1 - q, -p):
            bad.append(f"trial {t}: s1 gives {(q1, p1)}")
        img = eval_map(phi_generator("s2", nu), m.point)
        if img[0] * img[2] * (img[0] - img[2]) != 0:
            pair = apparent_pair(realize_sigma("s2", normal_form_u0(q, p, nu)))
            if pair != MPoint(img).qp:
                bad.append(f"trial {t}: s2")
        conn = normal_form_u0(q, p, nu)
        moved = ConnectionForm(gauge_transform(conn.A, random_admissible_gauge(rng)))
        if normalize_split_frame(moved)[1].A != conn.A:
            bad.append(f"trial {t}: gauge round trip")
    return bad


def test_criterion_09_sigma_and_gauge():
    check(9, "sigma realizations and gauge round trip at 50 samples", None, sigma_failures)


def _cli(argv, hashseed):
    env = dict(os.environ, PYTHONHASHSEED=str(hashseed))
    env.pop("A2WC_SEED", None)
    return subprocess.run([sys.executable, "-m", "a2wc", *argv], capture_output=True, env=env).stdout


def determinism_failures():
    bad = []
    runs = [
        ["check", "--trials", "3", "--seed", "11"],
        ["orbit", "--word", "w3 s1 w2 s2", "--steps", "6", "--seed", "11"],
        ["orbit", "--word", "w3 s2", "--steps", "4", "--format", "csv"],
    ]
    for argv in runs:
        a, b = _cli(argv, 1), _cli(argv, 2)
        if a != b or not a:
            bad.append(" ".join(argv))
        if run(argv, env={})[0].encode() != a:
            bad.append("in-process vs subprocess: " + " ".join(argv))
    return bad


def test_criterion_10_determinism():
    check(10, "check and orbit outputs are byte identical across runs", None, determinism_failures)


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-q", "-p", "no:cacheprovider"]))
