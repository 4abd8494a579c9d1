"""Words in the generators acting on (nu, moduli point), orbits, and the
cross-realization verification report."""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable

from . import picard_lattice as pl
from .connection_forms import (
    ConnectionForm,
    apparent_pair,
    build_normal_form,
    chart_transfer,
    fuchs_sum,
    normal_form_u0,
    normalize_split_frame,
    random_admissible_gauge,
    realize_sigma_pair,
)
from .errors import A2WCError, ParameterError, ParseError
from .exact_algebra import PPoint, gauge_transform
from .middle_convolution import image_spans, alpha_closed_forms, mc_pair, predict_for_nu
from .parameter_space import (
    CALIBRATED_SIGN,
    NU_GEN,
    NU_STAR,
    ParamVector,
    act_nu,
    act_word,
    calibrate_sign,
    derive_action_from_chi,
    equivariance_defects,
    membership,
)
from .sampling import random_nu, rand_rat, sample_nu, sample_point, stream
from .surface_geometry import (
    CONTRACTIONS,
    MPoint,
    QuadMapData,
    calibrate_sigma2_shear,
    SIGMA2_SHEAR,
    configuration,
    eval_map,
    nine_points,
    normalize_configuration,
    on_triangle,
    phi_generator,
    unique_anticanonical_cubic,
)
from .errors import ContractedToBoundary, IndeterminatePoint

TOKEN_RE = re.compile(r"^(w[0-6]|s[12])$", re.IGNORECASE)
VIAS = ("surface", "mc")


def parse_word(text: str) -> tuple[str, ...]:
    tokens = [t for t in re.split(r"[\s,]+", text.strip()) if t]
    for k, t in enumerate(tokens):
        if not TOKEN_RE.match(t):
            raise ParseError(f"bad token {t!r} at position {k}", field="word", position=k)
    return tuple(t.lower() for t in tokens)


@dataclass(frozen=True)
class ModuliState:
    nu: ParamVector
    point: MPoint

    def __post_init__(self) -> None:
        if membership(self.nu) not in ("N0", "N00"):
            raise ParameterError("state parameters must lie in N0", stratum=membership(self.nu))

    @classmethod
    def of(cls, nu: ParamVector, x: PPoint) -> "ModuliState":
        return cls(nu, MPoint(x))

    def to_json(self) -> dict:
        return {"nu": self.nu.to_json(), "stratum": membership(self.nu), **self.point.to_json()}


def apply_generator(gen: str, state: ModuliState, via: str = "surface") -> ModuliState:
    nu, x = state.nu, state.point.point
    if gen == "w3" and via == "mc":
        q, p = state.point.qp
        res = mc_pair(q, p, nu)
        new_x = PPoint(res.qbar, res.pbar, 1)
    else:
        new_x = eval_map(phi_generator(gen, nu), x)
    return ModuliState(act_nu(gen, nu), MPoint(new_x))


def apply(word, state: ModuliState, via: str = "surface") -> ModuliState:
    """Apply the tokens left to right; errors carry the failing position."""
    if via not in VIAS:
        raise ParseError(f"unknown realization {via!r}", field="via")
    tokens = parse_word(word) if isinstance(word, str) else tuple(word)
    for k, t in enumerate(tokens):
        try:
            state = apply_generator(t, state, via)
        except A2WCError as exc:
            exc.position = k
            exc.detail.setdefault("token", t)
            raise
    return state


@dataclass
class OrbitResult:
    states: list[ModuliState]
    error: dict | None = None

    def to_json(self) -> dict:
        return {"states": [s.to_json() for s in self.states], "error": self.error}


def orbit(word, state: ModuliState, steps: int, via: str = "surface") -> OrbitResult:
    tokens = parse_word(word) if isinstance(word, str) else tuple(word)
    if not tokens:
        raise ParseError("orbit needs a nonempty word", field="word")
    out = OrbitResult([state])
    for step in range(1, steps + 1):
        try:
            state = apply(tokens, state, via)
        except A2WCError as exc:
            rec = exc.to_record()
            rec["step"] = step
            out.error = rec
            break
        out.states.append(state)
    return out


# ---------------------------------------------------------------------------
# Verification report


RESOLVED_DEVIATIONS = [
    "sigma2 surface map uses the shear (s, t) = (-1/3, 1/3) solved from point correspondence",
    "Gauss-Manin slot calibrated from the residue at infinity; equals alpha_inf",
    "alpha_inf = -(nu_inf1 - 1)(nu_inf2 - 1), i.e. lambda = 1, from the image span at infinity",
    "beta residues use mu_i0 = nu_i0 - delta_(i,inf)",
    "chi on difference roots carries sign -1 relative to nu(a) - nu(b); chi(delta) = -1",
    "Uinf normal form uses leading coefficient -nu00 nu01 nu02 for b13",
    "reflections attached to roots, not tabulated labels (labels 4<->5, 6<->0 are swapped in the table)",
]

MAX_COUNTEREXAMPLES = 3


class Suite:
    def __init__(self, name: str, trials: int) -> None:
        self.name = name
        self.trials = trials
        self.checks = 0
        self.failures: list[dict] = []
        self.skipped = 0

    def check(self, ok: bool, **context) -> None:
        self.checks += 1
        if not ok:
            self.failures.append({k: _jsonable(v) for k, v in sorted(context.items())})

    def to_json(self) -> dict:
        return {
            "trials": self.trials,
            "checks": self.checks,
            "failed": len(self.failures),
            "skipped": self.skipped,
            "counterexamples": self.failures[:MAX_COUNTEREXAMPLES],
            "ok": not self.failures,
        }


def _jsonable(v):
    if isinstance(v, Fraction):
        return str(v)
    if isinstance(v, (ParamVector, PPoint)):
        return v.to_json()
    if isinstance(v, (list, tuple)):
        return [_jsonable(x) for x in v]
    return v


def _pairs():
    from itertools import combinations

    return list(combinations(pl.NODES, 2))


def suite_coxeter(trials: int, seed: int) -> Suite:
    s = Suite("coxeter", 0)
    rep = pl.verify_coxeter()
    for name, ok in sorted(rep.checks.items()):
        s.check(ok, relation=name)
    for j, ok in pl.w3_table_agreement().items():
        s.check(ok, relation=f"w3 table E{j}")
    sub = pl.sublattice_report()
    s.check(sub["rank_sum"] == 9 and sub["rank_intersection"] == 1 and sub["delta_in_both"], relation="sublattices")
    rng = stream(seed, "coxeter", 0)
    for gen in pl.GENERATORS:
        m = pl.generator_map(gen)
        for _ in range(5):
            a = tuple(rng.randint(-5, 5) for _ in range(pl.DIM))
            b = tuple(rng.randint(-5, 5) for _ in range(pl.DIM))
            s.check(pl.intersect(pl.apply_map(m, a), pl.apply_map(m, b)) == pl.intersect(a, b), gen=gen)
    return s


def nu_relation_defects(nu: ParamVector) -> list[str]:
    bad = []
    for n in pl.NODES:
        if act_word([f"w{n}", f"w{n}"], nu) != nu:
            bad.append(f"w{n}^2")
    for i, j in _pairs():
        wi, wj = f"w{i}", f"w{j}"
        if pl.joined(i, j):
            ok = act_word([wi, wj, wi], nu) == act_word([wj, wi, wj], nu)
        else:
            ok = act_word([wi, wj], nu) == act_word([wj, wi], nu)
        if not ok:
            bad.append(f"{wi},{wj}")
    for k in ("s1", "s2"):
        if act_word([k, k], nu) != nu:
            bad.append(f"{k}^2")
        perm = pl.induced_node_permutation(k)
        for n in pl.NODES:
            if act_word([k, f"w{n}", k], nu) != act_nu(f"w{perm[n]}", nu):
                bad.append(f"{k} w{n} {k}")
    return bad


def suite_parameters(trials: int, seed: int) -> Suite:
    s = Suite("parameters", trials)
    for t in range(trials):
        rng = stream(seed, "parameters", t)
        nu = random_nu(rng)
        s.check(not nu_relation_defects(nu), nu=nu, defects=nu_relation_defects(nu))
        for gen in pl.GENERATORS:
            out = act_nu(gen, nu)
            s.check(out.row_sums_ok(), gen=gen, nu=nu, what="row sums")
            s.check(derive_action_from_chi(gen, nu) == out, gen=gen, nu=nu, what="chi oracle")
    return s


def suite_chi(trials: int, seed: int) -> Suite:
    s = Suite("chi_equivariance", trials)
    s.check(calibrate_sign([NU_STAR, NU_GEN]) == CALIBRATED_SIGN, what="sign calibration")
    for t in range(trials):
        nu = random_nu(stream(seed, "chi", t))
        d = equivariance_defects(nu, CALIBRATED_SIGN)
        s.check(not d, nu=nu, defects=d)
    return s


def point_correspondence_defects(nu: ParamVector) -> list[str]:
    bad = []
    for gen in pl.GENERATORS:
        f = phi_generator(gen, nu)
        src, tgt = nine_points(nu), nine_points(act_nu(gen, nu))
        perm = pl.point_permutation(gen) or {i: i for i in range(1, 10)}
        for i in range(1, 10):
            if gen == "w3" and i in (1, 4, 6):
                try:
                    eval_map(f, src[i])
                    bad.append(f"w3 defined at p{i}")
                except IndeterminatePoint:
                    pass
                continue
            if eval_map(f, src[i]) != tgt[perm[i]]:
                bad.append(f"{gen} p{i}")
    return bad


def contraction_defects(nu: ParamVector, rng) -> list[str]:
    """Points on each w3 line map to the predicted exceptional point."""
    q = QuadMapData.of(nu)
    f = phi_generator("w3", nu)
    tgt = nine_points(act_nu("w3", nu))
    bad = []
    for line, target in CONTRACTIONS.items():
        x = _point_on_line(q, line, rng)
        if x is None:
            continue
        try:
            eval_map(f, x)
            bad.append(f"{line} not contracted")
        except ContractedToBoundary as exc:
            if exc.detail["target"] != f"p{target}" or PPoint(*map(Fraction, exc.detail["point"])) != tgt[target]:
                bad.append(f"{line} -> {exc.detail['target']}")
    return bad


def _point_on_line(q: QuadMapData, line: str, rng) -> PPoint | None:
    """A point of the line off the triangle (lines are solved for x1)."""
    for _ in range(100):
        x0, x2 = rand_rat(rng), rand_rat(rng)
        # every f-line is affine in x1 with coefficient +-1
        base = getattr(q, line)((x0, Fraction(0), x2))
        slope = getattr(q, line)((x0, Fraction(1), x2)) - base
        x1 = -base / slope
        try:
            x = PPoint(x0, x1, x2)
        except ValueError:
            continue
        if not on_triangle(x):
            return x
    return None


def suite_points(trials: int, seed: int) -> Suite:
    s = Suite("point_correspondence", trials)
    for t in range(trials):
        rng = stream(seed, "points", t)
        nu = sample_nu(rng, "N0")
        s.check(not point_correspondence_defects(nu), nu=nu, defects=point_correspondence_defects(nu))
        d = contraction_defects(nu, rng)
        s.check(not d, nu=nu, defects=d)
        s.check(calibrate_sigma2_shear(nu) == SIGMA2_SHEAR, nu=nu, what="sigma2 shear")
    return s


def suite_cubic(trials: int, seed: int) -> Suite:
    s = Suite("cubic", trials)
    for t in range(trials):
        rng = stream(seed, "cubic", t)
        nu = sample_nu(rng, "N")
        res = unique_anticanonical_cubic(nine_points(nu))
        s.check(res.kernel_dim == 1 and res.is_triangle, nu=nu, kernel_dim=res.kernel_dim)
        shear = normalize_configuration(configuration(nu))
        s.check(shear.mu == 0 and shear.eta == 0 and shear.scale == 1, nu=nu, what="normalized already")
    return s


def normal_form_defects(q, p, nu: ParamVector) -> list[str]:
    bad = []
    m = MPoint.from_qp(q, p)
    c0 = build_normal_form(m, nu, "U0")
    ci = build_normal_form(m, nu, "Uinf")
    if apparent_pair(c0) != (Fraction(q), Fraction(p)):
        bad.append("round trip U0")
    if apparent_pair(ci) != m.qp2:
        bad.append("round trip Uinf")
    for name, conn in (("U0", c0), ("Uinf", ci)):
        for pole, ok in conn.exponents_match(nu).items():
            if not ok:
                bad.append(f"{name} residue at {pole}")
    if chart_transfer(ci).A != c0.A:
        bad.append("chart transfer")
    if fuchs_sum(nu, -2) != 0:
        bad.append("fuchs")
    return bad


def suite_normal_forms(trials: int, seed: int) -> Suite:
    s = Suite("normal_forms", trials)
    for t in range(trials):
        rng = stream(seed, "normal_forms", t)
        nu = sample_nu(rng, "N0")
        q, p = MPoint(sample_point(rng, None)).qp
        d = normal_form_defects(q, p, nu)
        s.check(not d, nu=nu, q=q, p=p, defects=d)
    return s


def sigma_defects(q, p, nu: ParamVector, rng) -> list[str]:
    bad = []
    (q1, p1), _ = realize_sigma_pair("s1", q, p, nu)
    if (q1, p1) != (1 - q, -p):
        bad.append("s1 pair")
    x = PPoint(q, p, 1)
    for which in ("s1", "s2"):
        pair, nu2 = realize_sigma_pair(which, q, p, nu)
        if MPoint(eval_map(phi_generator(which, nu), x)).qp != pair:
            bad.append(f"{which} vs surface")
        conn = normalize_split_frame(
            ConnectionForm(gauge_transform(normal_form_u0(*pair, nu2).A, random_admissible_gauge(rng)))
        )[1]
        if not all(conn.exponents_match(nu2).values()):
            bad.append(f"{which} exponents")
    c = normal_form_u0(q, p, nu)
    g = random_admissible_gauge(rng)
    if normalize_split_frame(ConnectionForm(gauge_transform(c.A, g)))[1].A != c.A:
        bad.append("gauge round trip")
    return bad


def suite_sigma(trials: int, seed: int) -> Suite:
    s = Suite("sigma_realizations", trials)
    for t in range(trials):
        rng = stream(seed, "sigma", t)
        nu = sample_nu(rng, "N0")
        q, p = MPoint(sample_point(rng, None)).qp
        d = sigma_defects(q, p, nu, rng)
        s.check(not d, nu=nu, q=q, p=p, defects=d)
    return s


def main_theorem_defects(q, p, nu: ParamVector) -> list[str]:
    bad = []
    res = mc_pair(q, p, nu)
    surf = MPoint(eval_map(phi_generator("w3", nu), PPoint(q, p, 1))).qp
    if (res.qbar, res.pbar) != surf:
        bad.append("mc vs surface")
    if (res.qbar, res.pbar) != (res.xi.qbar_closed, res.xi.pbar_closed):
        bad.append("closed forms")
    if res.xi.normal.A != normal_form_u0(res.qbar, res.pbar, res.nu_out).A:
        bad.append("matrix equality")
    if not res.gm.slot_is_alpha_inf:
        bad.append("slot")
    if not res.exponents_ok:
        bad.append("exponents")
    pred = predict_for_nu(nu)
    shifted = [list(d) for d in pred.divisors]
    shifted[2] = sorted(x + 1 for x in shifted[2])
    if pred.rank != 3 or shifted != [sorted(r) for r in res.nu_out.rows]:
        bad.append("prediction")
    spans = image_spans(q, p, nu)
    a0, a1, ainf = alpha_closed_forms(q, p, nu)
    if spans != {"0": (nu[0][0], a0), "1": (-nu[1][0], a1), "inf": (nu[2][0], ainf)}:
        bad.append("image spans")
    back = mc_pair(res.qbar, res.pbar, res.nu_out)
    if (back.qbar, back.pbar, back.nu_out) != (Fraction(q), Fraction(p), nu):
        bad.append("involution")
    return bad


def suite_main_theorem(trials: int, seed: int) -> Suite:
    s = Suite("main_theorem", trials)
    for t in range(trials):
        rng = stream(seed, "main", t)
        nu = sample_nu(rng, "N00", generic=True)
        x = sample_point(rng, nu)
        q, p = MPoint(x).qp
        # the image must also avoid the lines of the inverse map
        qb_ok = _inverse_admissible(q, p, nu)
        if not qb_ok:
            s.skipped += 1
            continue
        d = main_theorem_defects(q, p, nu)
        s.check(not d, nu=nu, q=q, p=p, defects=d)
    return s


def _inverse_admissible(q, p, nu) -> bool:
    try:
        img = eval_map(phi_generator("w3", nu), PPoint(q, p, 1))
    except A2WCError:
        return False
    nu2 = act_nu("w3", nu)
    if membership(nu2) != "N00":
        return False
    qd = QuadMapData.of(nu2)
    return 0 not in (qd.f14(tuple(img)), qd.f16(tuple(img)), qd.f46(tuple(img)))


def suite_involutions(trials: int, seed: int) -> Suite:
    s = Suite("involutions", trials)
    for t in range(trials):
        rng = stream(seed, "involutions", t)
        nu = sample_nu(rng, "N0")
        x = sample_point(rng, nu)
        for gen in ("s1", "s2", "w3"):
            try:
                y = eval_map(phi_generator(gen, nu), x)
                back = eval_map(phi_generator(gen, act_nu(gen, nu)), y)
            except A2WCError:
                s.skipped += 1
                continue
            s.check(back == x, gen=gen, nu=nu, point=x)
    return s


WORD_RELATIONS = [
    ("w3 w2 w3", "w2 w3 w2"),
    ("w3 w4 w3", "w4 w3 w4"),
    ("w3 w6 w3", "w6 w3 w6"),
    ("w3 w1", "w1 w3"),
    ("w3 w5", "w5 w3"),
    ("w3 w0", "w0 w3"),
    ("s1 w3 s1", "w3"),
    ("s2 w3 s2", "w3"),
    ("s1 w1 s1", "w0"),
    ("s2 w4 s2", "w6"),
    ("w3 w3", ""),
    ("s1 s1", ""),
    ("s2 s2", ""),
]


def suite_words(trials: int, seed: int) -> Suite:
    s = Suite("word_relations", trials)
    for t in range(trials):
        rng = stream(seed, "words", t)
        nu = sample_nu(rng, "N00", generic=True)
        state = ModuliState.of(nu, sample_point(rng, nu))
        for lhs, rhs in WORD_RELATIONS:
            for via in VIAS:
                try:
                    a = apply(lhs, state, via)
                    b = apply(rhs, state, via)
                except A2WCError:
                    s.skipped += 1
                    continue
                s.check(a == b, lhs=lhs, rhs=rhs, via=via, nu=nu, point=state.point.point)
        try:
            s.check(apply("w3", state, "surface") == apply("w3", state, "mc"), what="via agreement", nu=nu)
        except A2WCError:
            s.skipped += 1
    return s


SUITES: dict[str, Callable[[int, int], Suite]] = {
    "coxeter": suite_coxeter,
    "parameters": suite_parameters,
    "chi": suite_chi,
    "points": suite_points,
    "cubic": suite_cubic,
    "normal_forms": suite_normal_forms,
    "sigma": suite_sigma,
    "main_theorem": suite_main_theorem,
    "involutions": suite_involutions,
    "words": suite_words,
}


def verify_all(trials: int = 20, seed: int = 0, suites=None) -> dict:
    names = list(SUITES) if suites in (None, "all") else list(suites)
    for n in names:
        if n not in SUITES:
            raise ParseError(f"unknown suite {n!r}", field="suite")
    results = {n: SUITES[n](trials, seed).to_json() for n in names}
    return {
        "seed": seed,
        "trials": trials,
        "suites": results,
        "ok": all(r["ok"] for r in results.values()),
        "resolved_deviations": RESOLVED_DEVIATIONS,
        "node_permutations": pl.verify_coxeter().node_permutations,
        "sigma2_shear": [str(x) for x in SIGMA2_SHEAR],
    }
