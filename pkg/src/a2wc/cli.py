"""Command line: check, act, orbit, mc, exponents.

Words are applied left to right.  All randomness comes from --seed (default
0, or $A2WC_SEED when the flag is absent).  Exit codes: 0 success, 1 suite
failure or an error terminal state, 2 malformed input.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
from typing import Sequence

from .errors import ERROR_CODES, A2WCError, ParseError
from .exact_algebra import PPoint, parse_rat
from .middle_convolution import mc_pair, predict_for_nu
from .parameter_space import NU_STAR, ParamVector, membership
from .weyl_engine import SUITES, VIAS, ModuliState, apply, orbit, parse_word, verify_all

DEFAULT_POINT = "2,3,1"


def _split(text: str) -> list[str]:
    return [t for t in text.replace(";", ",").replace(" ", ",").split(",") if t]


def _parse_nu(text: str | None) -> ParamVector:
    if text is None:
        return NU_STAR
    return ParamVector.parse(_split(text))


def _parse_point(text: str) -> PPoint:
    items = _split(text)
    if len(items) != 3:
        raise ParseError(f"point needs 3 coordinates, got {len(items)}", field="point")
    vals = [parse_rat(s, field=f"point[{k}]") for k, s in enumerate(items)]
    try:
        return PPoint(*vals)
    except ValueError as exc:
        raise ParseError(str(exc), field="point") from exc


def _state(args) -> ModuliState:
    return ModuliState.of(_parse_nu(args.nu), _parse_point(args.point))


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="a2wc",
        description="Extended affine Weyl group E6^(1) on A2^(1)*-surfaces and rank-3 connections, in exact arithmetic.",
        epilog="Words are read left to right: 'w3 s1' applies w3 first. Error codes: " + ", ".join(ERROR_CODES),
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, nu=True):
        if nu:
            p.add_argument("--nu", help="nine rationals, rows (0, 1, inf), comma separated")
        p.add_argument("--seed", type=int, default=None, help="RNG seed (default 0 or $A2WC_SEED)")
        p.add_argument("--out", help="write output here instead of stdout")
        p.add_argument("--format", choices=("json", "csv"), default="json")

    p = sub.add_parser("check", help="run verification suites")
    p.add_argument("--suite", default="all", help="all, or comma separated: " + ",".join(SUITES))
    p.add_argument("--trials", type=int, default=20)
    common(p, nu=False)

    p = sub.add_parser("act", help="apply a word to (nu, point)")
    p.add_argument("--word", required=True)
    p.add_argument("--point", default=DEFAULT_POINT)
    p.add_argument("--via", choices=VIAS, default="surface")
    common(p)

    p = sub.add_parser("orbit", help="iterate a word")
    p.add_argument("--word", required=True)
    p.add_argument("--point", default=DEFAULT_POINT)
    p.add_argument("--steps", type=int, default=1)
    p.add_argument("--via", choices=VIAS, default="surface")
    common(p)

    p = sub.add_parser("mc", help="middle convolution at (q, p)")
    p.add_argument("--q", default="2")
    p.add_argument("--p", default="3")
    common(p)

    p = sub.add_parser("exponents", help="predicted exponents of the convolved connection")
    common(p)
    return parser


def resolve_seed(flag: int | None, env=os.environ) -> int:
    if flag is not None:
        return flag
    raw = env.get("A2WC_SEED")
    if raw is None:
        return 0
    try:
        return int(raw)
    except ValueError:
        raise ParseError(f"A2WC_SEED must be an integer, got {raw!r}", field="A2WC_SEED") from None


def cmd_check(args) -> tuple[dict, int]:
    suites = "all" if args.suite == "all" else _split(args.suite)
    if args.trials < 0:
        raise ParseError("trials must be nonnegative", field="trials")
    report = verify_all(args.trials, args.seed, suites)
    return report, 0 if report["ok"] else 1


def cmd_act(args) -> tuple[dict, int]:
    word = parse_word(args.word)
    state = _state(args)
    out = {"input": {"word": list(word), "via": args.via, **state.to_json()}}
    try:
        out["output"] = apply(word, state, args.via).to_json()
        return out, 0
    except A2WCError as exc:
        out["error"] = exc.to_record()
        return out, 1


def cmd_orbit(args) -> tuple[dict, int]:
    word = parse_word(args.word)
    if args.steps < 0:
        raise ParseError("steps must be nonnegative", field="steps")
    state = _state(args)
    res = orbit(word, state, args.steps, args.via)
    out = {"input": {"word": list(word), "via": args.via, "steps": args.steps}, **res.to_json()}
    return out, 0 if res.error is None else 1


ORBIT_COLUMNS = ["step", "x0", "x1", "x2", "q", "p"] + [
    f"nu_{r}_{j}" for r in ("0", "1", "inf") for j in range(3)
]


def orbit_csv(report: dict) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(ORBIT_COLUMNS)
    for step, st in enumerate(report["states"]):
        nu = [x for r in st["nu"] for x in r]
        w.writerow([step, *st["point"], st["q"], st["p"], *nu])
    return buf.getvalue()


def cmd_mc(args) -> tuple[dict, int]:
    nu = _parse_nu(args.nu)
    q, p = parse_rat(args.q, "q"), parse_rat(args.p, "p")
    out = {"input": {"q": str(q), "p": str(p), "nu": nu.to_json(), "stratum": membership(nu)}}
    try:
        out["output"] = mc_pair(q, p, nu).to_json()
        return out, 0
    except A2WCError as exc:
        out["error"] = exc.to_record()
        return out, 1


def cmd_exponents(args) -> tuple[dict, int]:
    nu = _parse_nu(args.nu)
    out = {"input": {"nu": nu.to_json(), "stratum": membership(nu)}}
    pred = predict_for_nu(nu, strict=False)
    out["prediction"] = pred.to_json()
    out["hypotheses_hold"] = not pred.violations
    return out, 0


COMMANDS = {"check": cmd_check, "act": cmd_act, "orbit": cmd_orbit, "mc": cmd_mc, "exponents": cmd_exponents}


def render(report: dict, fmt: str, command: str) -> str:
    if fmt == "csv":
        if command != "orbit":
            raise ParseError("csv output is only available for orbit", field="format")
        return orbit_csv(report)
    return json.dumps(report, sort_keys=True, indent=2) + "\n"


def execute(args, env=os.environ) -> tuple[str, int]:
    """Execute parsed arguments and render; returns (text, exit code)."""
    try:
        args.seed = resolve_seed(args.seed, env)
        report, code = COMMANDS[args.command](args)
        text = render(report, args.format, args.command)
    except A2WCError as exc:
        return json.dumps({"error": exc.to_record()}, sort_keys=True, indent=2) + "\n", 2
    return text, code


def run(argv: Sequence[str] | None = None, env=os.environ) -> tuple[str, int]:
    return execute(build_parser().parse_args(argv), env)


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    text, code = execute(args)
    if args.out and code != 2:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        (sys.stderr if code == 2 else sys.stdout).write(text)
    return code


if __name__ == "__main__":
    raise SystemExit(main())
