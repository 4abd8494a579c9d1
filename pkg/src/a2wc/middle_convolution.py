"""Middle convolution realizing the central reflection w3.

Pipeline: E --(tensor O(1))--> G --(mc_beta)--> G' --(tensor O(-1))--> E'.
The Gauss-Manin matrix of G' is taken in the basis [eta7], [eta4], [eta2]
and moved to normal shape through the xi-basis.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from .connection_forms import ConnectionForm, apparent_pair, normal_form_u0, normalize_split_frame, shift_infinity
from .errors import BoundaryImage, CalibrationFailed, HypothesisViolated, OnContractedLine, ParameterError
from .exact_algebra import Mat3, Poly, char_poly, gauge_transform, is_integer, rref, residue_of_form
from .parameter_space import INF, THIRD, ParamVector, act_nu, membership
from .surface_geometry import QuadMapData

Z = Poly.z()


@dataclass(frozen=True)
class BetaForm:
    """Residues of the twisting form along H_i, V_i, U_i and T."""

    H: tuple[Fraction, ...]
    V: tuple[Fraction, ...]
    U: tuple[Fraction, ...]
    T: Fraction

    @classmethod
    def from_hvt(cls, H: Sequence, V: Sequence, T) -> "BetaForm":
        T = Fraction(T)
        H = tuple(Fraction(h) for h in H)
        V = tuple(Fraction(v) for v in V)
        return cls(H, V, tuple(h + v + T for h, v in zip(H, V)), T)

    def relation_defects(self) -> dict[str, Fraction]:
        return {
            "T+sum(H)": self.T + sum(self.H),
            "T+sum(V)": self.T + sum(self.V),
            "U-(H+V+T)": max(
                (abs(u - (h + v + self.T)) for u, h, v in zip(self.U, self.H, self.V)), default=Fraction(0)
            ),
        }

    def relations_hold(self) -> bool:
        return all(v == 0 for v in self.relation_defects().values())

    def to_json(self) -> dict:
        return {
            "H": [str(x) for x in self.H],
            "V": [str(x) for x in self.V],
            "U": [str(x) for x in self.U],
            "T": str(self.T),
        }


def g_exponents(nu: ParamVector) -> list[list[Fraction]]:
    """Exponents of G = E tensor O(1): the inf row drops by 1."""
    return [list(r) for r in shift_infinity(nu, 1).rows]


def build_beta(nu: ParamVector) -> BetaForm:
    gam = nu.gamma
    mu0 = [nu[i][0] - (1 if i == INF else 0) for i in range(3)]
    H = [-m for m in mu0]
    V = [m - 2 * THIRD * gam for m in mu0]
    return BetaForm.from_hvt(H, V, gam)


@dataclass
class ExponentPrediction:
    rank: int
    divisors: list[list[Fraction]]
    delta: int
    multiplicities: list[int]
    violations: list[str] = field(default_factory=list)

    def to_json(self) -> dict:
        return {
            "rank": self.rank,
            "delta": self.delta,
            "divisors": [[str(x) for x in d] for d in self.divisors],
            "multiplicities": self.multiplicities,
            "violations": self.violations,
        }


def hypothesis_violations(beta: BetaForm, mu: Sequence[Sequence[Fraction]]) -> list[str]:
    out = []
    if is_integer(beta.T):
        out.append("beta_T is an integer")
    for i, row in enumerate(mu):
        for a in range(len(row)):
            for b in range(a + 1, len(row)):
                d = row[a] - row[b]
                if d != 0 and is_integer(d):
                    out.append(f"point {i}: exponents {a},{b} differ by a nonzero integer")
        for j, m in enumerate(row):
            if is_integer(m + beta.H[i] + beta.T):
                out.append(f"point {i}: mu[{j}] + beta_H + beta_T is an integer")
            s = m + beta.H[i]
            if s != 0 and is_integer(s):
                out.append(f"point {i}: mu[{j}] + beta_H is a nonzero integer")
    return out


def predict_exponents(
    beta: BetaForm, mu: Sequence[Sequence], r: int, n: int, strict: bool = True
) -> ExponentPrediction:
    """Rank and local exponents of mc_beta for exponent data mu at n points."""
    mu = [[Fraction(x) for x in row] for row in mu]
    if len(mu) != n or any(len(row) != r for row in mu) or len(beta.H) != n:
        raise ValueError("exponent data does not have shape n x r")
    violations = hypothesis_violations(beta, mu)
    if strict and violations:
        raise HypothesisViolated(violations[0], violations=violations)
    counts = [Counter(row) for row in mu]
    mult = [counts[i][-beta.H[i]] for i in range(n)]
    delta = (n - 2) * r - sum(mult)
    divisors = []
    for i in range(n):
        div = [beta.V[i]] * (mult[i] + delta)
        for m in mu[i]:
            if m + beta.H[i] != 0:
                div.append(m + beta.U[i])
        divisors.append(sorted(div))
    return ExponentPrediction(r + delta, divisors, delta, mult, violations)


def predict_for_nu(nu: ParamVector, strict: bool = True) -> ExponentPrediction:
    return predict_exponents(build_beta(nu), g_exponents(nu), 3, 3, strict=strict)


# ---------------------------------------------------------------------------
# Gauss-Manin matrix


def image_span(res: Sequence[Sequence[Fraction]], shift: Fraction) -> tuple[Fraction, Fraction]:
    """Image of res + shift as span of (x, 1, 0), (y, 0, 1); returns (x, y)."""
    cols = [[res[i][j] + (shift if i == j else 0) for i in range(3)] for j in range(3)]
    reordered = [[c[1], c[2], c[0]] for c in cols]
    red, pivots = rref(reordered)
    if pivots != [0, 1]:
        raise CalibrationFailed("image is not a graph over (g1, g2)", pivots=pivots)
    return red[0][2], red[1][2]


def alpha_closed_forms(q, p, nu: ParamVector) -> tuple[Fraction, Fraction, Fraction]:
    q, p = Fraction(q), Fraction(p)
    a0 = (p + nu[0][1]) * (p + nu[0][2]) / q
    a1 = (p - nu[1][1]) * (p - nu[1][2]) / (q - 1)
    ainf = -(nu[INF][1] - 1) * (nu[INF][2] - 1)
    return a0, a1, ainf


def image_spans(q, p, nu: ParamVector) -> dict[str, tuple[Fraction, Fraction]]:
    """Image spans of res_i(G) + beta_H_i at the three poles."""
    G = normal_form_u0(q, p, nu).with_degree(1)
    beta = build_beta(nu)
    return {
        "0": image_span(G.residue(0), beta.H[0]),
        "1": image_span(G.residue(1), beta.H[1]),
        "inf": image_span(G.residue("inf"), beta.H[INF]),
    }


def gm_template(q, p, nu: ParamVector, alphas, slot) -> Mat3:
    q, p = Fraction(q), Fraction(p)
    bT = nu.gamma
    n00, n10 = nu[0][0], nu[1][0]
    a0, a1, ainf = alphas
    A00 = Poly((-p + n00 - THIRD * bT, 2 * THIRD * bT - n00 - n10))
    return Mat3(
        [
            [A00, -bT * Z * (ainf * (Z - 1) + a1), -bT * (Poly((a0, slot))) * (Z - 1)],
            [(q - 1) / bT, Poly((-n00 + 2 * THIRD * bT, -THIRD * bT + p + n00)), (p - n10) * (Z - 1)],
            [-q / bT, -(p + n00) * Z, Poly((-THIRD * bT + p, -THIRD * bT - p + n10))],
        ]
    )


@dataclass
class GMData:
    q: Fraction
    p: Fraction
    nu: ParamVector
    beta: BetaForm
    alpha0: Fraction
    alpha1: Fraction
    alpha_inf: Fraction
    calibrated_slot: Fraction
    A: Mat3
    prediction: ExponentPrediction

    @property
    def slot_is_alpha_inf(self) -> bool:
        return self.calibrated_slot == self.alpha_inf

    @property
    def form(self) -> ConnectionForm:
        """G' = O(1) + O + O with the Gauss-Manin connection."""
        return ConnectionForm(self.A, "U0", 1)

    def to_json(self) -> dict:
        return {
            "alpha0": str(self.alpha0),
            "alpha1": str(self.alpha1),
            "alpha_inf": str(self.alpha_inf),
            "calibrated_slot": str(self.calibrated_slot),
            "slot_is_alpha_inf": self.slot_is_alpha_inf,
            "A": self.A.to_json(),
            "beta": self.beta.to_json(),
            "prediction": self.prediction.to_json(),
        }


def _require_gamma(nu: ParamVector) -> None:
    if membership(nu) not in ("N0", "N00"):
        raise ParameterError("nu must lie in N0 for the middle convolution", stratum=membership(nu))


def calibrate_slot(q, p, nu: ParamVector, alphas, predicted_inf: Sequence[Fraction]) -> Fraction:
    """Solve for the undetermined slot from the residue at infinity.

    The characteristic polynomial of the residue is affine in the slot, so
    two evaluations determine it.
    """
    target = Poly.coerce(1)
    for e in predicted_inf:
        target = target * Poly((-e, 1))
    twist = (1, 0, 0)
    d = []
    for s in (0, 1):
        res = residue_of_form(gm_template(q, p, nu, alphas, s), "inf", twist)
        d.append(char_poly(res) - target)
    base, slope = d[0], d[1] - d[0]
    sol = None
    for k in range(4):
        b, m = base.coeff(k), slope.coeff(k)
        if m == 0:
            if b != 0:
                raise CalibrationFailed("no slot value matches the exponents at infinity", coefficient=k)
            continue
        x = -b / m
        if sol is not None and sol != x:
            raise CalibrationFailed("slot constraints are inconsistent", values=[str(sol), str(x)])
        sol = x
    if sol is None:
        raise CalibrationFailed("residue at infinity does not constrain the slot")
    return sol


def gm_matrix(q, p, nu: ParamVector) -> GMData:
    q, p = Fraction(q), Fraction(p)
    _require_gamma(nu)
    if q in (0, 1):
        raise ParameterError("q must avoid the poles 0 and 1", q=str(q))
    beta = build_beta(nu)
    pred = predict_for_nu(nu, strict=False)
    a0, a1, _ = alpha_closed_forms(q, p, nu)
    alphas = (a0, a1, image_spans(q, p, nu)["inf"][1])
    slot = calibrate_slot(q, p, nu, alphas, pred.divisors[INF])
    A = gm_template(q, p, nu, alphas, slot)
    form = ConnectionForm(A, "U0", 1)
    res = form.residues()
    for i, name in enumerate(("0", "1", "inf")):
        if char_poly(res[name]) != _poly_of(pred.divisors[i]):
            raise CalibrationFailed(f"residue at {name} does not have the predicted exponents", point=name)
    return GMData(q, p, nu, beta, alphas[0], alphas[1], alphas[2], slot, A, pred)


def _poly_of(roots) -> Poly:
    out = Poly.coerce(1)
    for e in roots:
        out = out * Poly((-e, 1))
    return out


# ---------------------------------------------------------------------------
# xi-basis and the output pair


@dataclass
class XiFrame:
    raw: ConnectionForm
    gauge: Mat3
    normal: ConnectionForm
    qbar: Fraction
    pbar: Fraction
    qbar_closed: Fraction
    pbar_closed: Fraction

    def to_json(self) -> dict:
        return {
            "raw": self.raw.to_json(),
            "normal": self.normal.to_json(),
            "qbar": str(self.qbar),
            "pbar": str(self.pbar),
        }


def closed_form_pair(q, p, nu: ParamVector) -> tuple[Fraction, Fraction]:
    """q f16/f14 and (a f14 f16 - b f16 f46 - c f14 f46)/(gamma f14) at (q:p:1)."""
    qd = QuadMapData.of(nu)
    x = (Fraction(q), Fraction(p), Fraction(1))
    f14, f16, f46 = qd.f14(x), qd.f16(x), qd.f46(x)
    if f14 == 0:
        raise OnContractedLine("(q, p) lies on f14 = 0; the image is on an exceptional curve", line="f14")
    qbar = x[0] * f16 / f14
    pbar = (qd.a * f14 * f16 - qd.b * f16 * f46 - qd.c * f14 * f46) / (qd.gamma * f14)
    return qbar, pbar


def c_of_z(q, p, nu: ParamVector) -> Poly:
    """The (3,3) entry of the xi-frame before normalization."""
    q, p = Fraction(q), Fraction(p)
    g = nu.gamma
    f14 = QuadMapData.of(nu).f14((q, p, Fraction(1)))
    return Poly(((3 * p - g) * f14 - 3 * q * p * g + 3 * q * g * nu[1][0], -g * f14)) / (3 * f14)


def xi_frame(gm: GMData) -> XiFrame:
    q, p, nu = gm.q, gm.p, gm.nu
    bT = gm.beta.T
    qbar_c, pbar_c = closed_form_pair(q, p, nu)
    if qbar_c == 0:
        raise BoundaryImage("image has qbar = 0 (input on f16 = 0)", line="f16", qbar="0")
    if qbar_c == 1:
        raise BoundaryImage("image has qbar = 1 (input on f46 = 0)", line="f46", qbar="1")
    g = Mat3(
        [
            [1, gm.A[0, 0], 0],
            [0, (q - 1) / bT, -(p - nu[1][0]) / bT],
            [0, -q / bT, (p + nu[0][0]) / bT],
        ]
    )
    raw = ConnectionForm(gauge_transform(gm.A, g), "U0", -2)
    k, normal = normalize_split_frame(raw)
    qbar, pbar = apparent_pair(normal)
    return XiFrame(raw, g * k, normal, qbar, pbar, qbar_c, pbar_c)


@dataclass
class MCResult:
    q: Fraction
    p: Fraction
    nu: ParamVector
    qbar: Fraction
    pbar: Fraction
    nu_out: ParamVector
    in_n00: bool
    gm: GMData
    xi: XiFrame

    @property
    def exponents_ok(self) -> bool:
        return all(self.xi.normal.exponents_match(self.nu_out).values())

    def to_json(self) -> dict:
        return {
            "input": {"q": str(self.q), "p": str(self.p), "nu": self.nu.to_json()},
            "in_n00": self.in_n00,
            "qbar": str(self.qbar),
            "pbar": str(self.pbar),
            "nu_out": self.nu_out.to_json(),
            "exponents_ok": self.exponents_ok,
            "gm": self.gm.to_json(),
            "xi": self.xi.to_json(),
        }


def tensor(conn: ConnectionForm, k: int) -> ConnectionForm:
    """Tensor with (O(k), d): the U0 matrix is unchanged, degree moves by 3k."""
    return conn.with_degree(conn.degree + 3 * k)


def mc_pair(q, p, nu: ParamVector) -> MCResult:
    gm = gm_matrix(q, p, nu)
    xi = xi_frame(gm)
    return MCResult(
        Fraction(q), Fraction(p), nu, xi.qbar, xi.pbar, act_nu("w3", nu), membership(nu) == "N00", gm, xi
    )
