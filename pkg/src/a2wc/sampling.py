"""Seeded random rationals, parameters and moduli points.

Every stream comes from ``random.Random`` seeded with a string built from
(seed, suite, trial), so trials are independent and reproducible.
"""

from __future__ import annotations

import random
from fractions import Fraction

from .errors import ParameterError
from .parameter_space import STRATA, ParamVector, membership
from .surface_geometry import QuadMapData, on_triangle
from .exact_algebra import PPoint

MAX_TRIES = 1000
DENOMINATORS = (1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 12, 13, 17)


def stream(seed: int, suite: str, trial: int) -> random.Random:
    return random.Random(f"{seed}:{suite}:{trial}")


def rand_rat(rng: random.Random, bound: int = 9) -> Fraction:
    return Fraction(rng.randint(-bound, bound), rng.choice(DENOMINATORS))


def random_nu(rng: random.Random) -> ParamVector:
    return ParamVector.from_free(*(rand_rat(rng) for _ in range(6)))


def sample_nu(rng: random.Random, stratum: str = "N00", generic: bool = False) -> ParamVector:
    """Rejection-sample nu in the stratum (optionally generic for middle convolution)."""
    from .middle_convolution import build_beta, g_exponents, hypothesis_violations

    for _ in range(MAX_TRIES):
        nu = random_nu(rng)
        if STRATA[membership(nu)] < STRATA[stratum]:
            continue
        if generic and hypothesis_violations(build_beta(nu), g_exponents(nu)):
            continue
        return nu
    raise ParameterError(f"no sample in {stratum} after {MAX_TRIES} draws")


def sample_point(rng: random.Random, nu: ParamVector | None = None, avoid_lines: bool = True) -> PPoint:
    """A point (q : p : 1) off the triangle and, for nu given, off the w3 lines."""
    quad = QuadMapData.of(nu) if (nu is not None and avoid_lines and nu.gamma != 0) else None
    for _ in range(MAX_TRIES):
        x = PPoint(rand_rat(rng), rand_rat(rng), 1)
        if on_triangle(x):
            continue
        if quad is not None and 0 in (quad.f14(tuple(x)), quad.f16(tuple(x)), quad.f46(tuple(x))):
            continue
        return x
    raise ParameterError(f"no admissible point after {MAX_TRIES} draws")
