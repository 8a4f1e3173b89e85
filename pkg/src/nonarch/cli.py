"""Command-line front end: ``nonarch <command> [options]``.

Commands
  axioms          validate the omega-group laws of a family (or a plugin)
  counterexample  build the empty-intersection ball chain and refute candidates
  eval            parse a Hahn series and print its canonical JSON and valuation
  project         project a closed ball to the K-line and check lifts
  solve-chain     solve a nested ball chain by the recursive procedure

Exit codes: 0 success, 1 a property violation was found, 2 usage or parse error.
JSON output is deterministic: the same arguments give byte-identical reports.
"""

from __future__ import annotations

import argparse
import importlib
import json
import os
import random
import sys

from .completeness import (COUNTEREXAMPLE_SPACE, counterexample_chain, line_target,
                           make_view, project_ball, lift_point, random_ball, random_candidate,
                           random_chain, refute_candidate, solve_chain)
from .errors import NonarchError, ParseError, ValidationFailed
from .hahn import parse_series
from .rootgroups import FAMILIES, involutory, make_family
from .scalars import FIELDS, INF, format_level, level_to_json
from .ultrametric import (Ball, OmegaGroup, ball_contains, check_nested, validate_omega_group)

RNG_NAME = "python-random-mt19937"
VIEW_FAMILIES = ("triangle", "involutory", "quadratic", "pseudo-quadratic", "hexagon", "octagon")
LIFT_CHECKS = 20


class UsageError(Exception):
    pass


def _default_samples():
    raw = os.environ.get("NONARCH_DEFAULT_SAMPLES")
    if raw is None:
        return 500
    try:
        n = int(raw)
    except ValueError:
        raise UsageError(f"NONARCH_DEFAULT_SAMPLES must be an integer, got {raw!r}") from None
    if n < 1:
        raise UsageError("NONARCH_DEFAULT_SAMPLES must be at least 1")
    return n


def _positive(text):
    try:
        n = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if n < 1:
        raise argparse.ArgumentTypeError("must be at least 1")
    return n


def _seed(text):
    try:
        n = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if not -(2 ** 63) <= n < 2 ** 64:
        raise argparse.ArgumentTypeError("seed must fit in 64 bits")
    return n


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--samples", type=_positive, default=None,
                        help="sample budget (default: $NONARCH_DEFAULT_SAMPLES or 500)")
    common.add_argument("--seed", type=_seed, default=0)
    common.add_argument("--format", choices=("json", "text"), default="json")
    common.add_argument("--out", help="write the report here instead of stdout")

    parser = argparse.ArgumentParser(prog="nonarch", description=__doc__.split("\n\n")[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("axioms", parents=[common], help="validate omega-group laws")
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--family", choices=sorted(FAMILIES))
    src.add_argument("--plugin", metavar="MODULE:ATTR",
                     help="an OmegaGroup instance, or a callable returning one")
    p.add_argument("--dim", type=_positive, help="dimension for quadratic/pseudo-quadratic")
    p.add_argument("--field", choices=sorted(FIELDS), help="coefficient field for triangle")

    p = sub.add_parser("counterexample", parents=[common], help="empty-intersection chain")
    p.add_argument("--depth", type=_positive, default=12)
    p.add_argument("--candidate", help="JSON file with a finite-support vector to refute")

    p = sub.add_parser("eval", parents=[common], help="evaluate a Hahn series expression")
    p.add_argument("--field", choices=sorted(FIELDS), default="Q")
    p.add_argument("expression")

    p = sub.add_parser("project", parents=[common], help="project a ball and check lifts")
    p.add_argument("--family", choices=VIEW_FAMILIES, required=True)
    p.add_argument("--ball", help="ball JSON file (default: a seeded random ball)")

    p = sub.add_parser("solve-chain", parents=[common], help="solve a nested ball chain")
    p.add_argument("--family", choices=VIEW_FAMILIES, required=True)
    p.add_argument("--chain", help="JSON file with a list of balls (default: seeded random)")
    p.add_argument("--length", type=_positive, default=5)
    return parser


# ---------------------------------------------------------------------------
# helpers


def _group_for(family, args=None):
    params = {}
    if args is not None:
        if getattr(args, "dim", None) is not None:
            if family not in ("quadratic", "pseudo-quadratic"):
                raise UsageError(f"--dim does not apply to {family}")
            params["dim"] = args.dim
        if getattr(args, "field", None) is not None:
            if family != "triangle":
                raise UsageError(f"--field does not apply to {family}")
            params["field"] = args.field
    if family == "exceptional":
        raise UsageError("exceptional families need plug-in data; use --plugin")
    return make_family(family, **params)


def _view_group(family):
    # the involutory view is K over its fixed field K_0
    return involutory(restricted=False) if family == "involutory" else make_family(family)


def _load_plugin(spec):
    mod_name, _, attr = spec.partition(":")
    if not mod_name or not attr:
        raise UsageError("--plugin expects MODULE:ATTR")
    try:
        obj = getattr(importlib.import_module(mod_name), attr)
    except (ImportError, AttributeError) as exc:
        raise UsageError(f"cannot load plugin {spec!r}: {exc}") from None
    if not isinstance(obj, OmegaGroup) and callable(obj):
        obj = obj()
    if not isinstance(obj, OmegaGroup):
        raise UsageError(f"plugin {spec!r} is not an OmegaGroup")
    return obj


def _read_json(path):
    try:
        with open(path) as fh:
            return json.load(fh)
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc}") from None
    except json.JSONDecodeError as exc:
        raise ParseError(f"malformed JSON in {path}: {exc.msg}", exc.pos) from None


def _header(args, **extra):
    out = {"command": args.command, "seed": args.seed, "rng": RNG_NAME}
    out.update(extra)
    return out


# ---------------------------------------------------------------------------
# commands; each returns (exit code, report dict, text summary)


def cmd_axioms(args):
    group = _load_plugin(args.plugin) if args.plugin else None
    if group is None:
        try:
            group = _group_for(args.family, args)
        except ValidationFailed as exc:
            report = exc.report
            return 1, {**_header(args), "report": report.to_json()}, \
                f"{report.family}: rejected on construction: {exc}"
    report = validate_omega_group(group, args.samples, args.seed)
    lines = [f"{report.family}: {'ok' if report.ok else 'VIOLATIONS'} "
             f"({args.samples} samples, seed {args.seed}, modulus "
             f"{format_level(group.modulus) if group.modulus is not None else '-'})"]
    for name, r in report.laws.items():
        lines.append(f"  {name:28s} {r.passed}/{r.checked}")
    return (0 if report.ok else 1), {**_header(args), "report": report.to_json()}, "\n".join(lines)


def _parse_candidate(data):
    g = COUNTEREXAMPLE_SPACE
    if isinstance(data, dict):
        return g.from_json(data)
    return g.element_from_json(data)


def cmd_counterexample(args):
    g = COUNTEREXAMPLE_SPACE
    chain = counterexample_chain(args.depth)
    try:
        check_nested(g, chain)
        nested = True
    except NonarchError:
        nested = False
    if args.candidate:
        candidates = [_parse_candidate(_read_json(args.candidate))]
    else:
        rng = random.Random(args.seed)
        candidates = [random_candidate(rng) for _ in range(100)]
    refutations = [refute_candidate(c) for c in candidates]
    all_refuted = all(r.refuted for r in refutations)
    report = {
        **_header(args, depth=args.depth),
        "chain": [{"index": i, "center": g.to_json(b.center), "level": level_to_json(b.level)}
                  for i, b in enumerate(chain)],
        "nested": nested,
        "refutations": [r.to_json(c) for r, c in zip(refutations, candidates)],
        "all_refuted": all_refuted,
    }
    lines = [f"chain of {args.depth} balls, nested: {nested}"]
    lines += [f"  B_{i}: level {format_level(b.level)}" for i, b in enumerate(chain[:4])]
    lines.append(f"{sum(r.refuted for r in refutations)}/{len(refutations)} candidates refuted")
    return (0 if nested and all_refuted else 1), report, "\n".join(lines)


def cmd_eval(args):
    s = parse_series(args.expression, FIELDS[args.field])
    v = s.valuation()
    report = {"command": "eval", "series": s.to_json(), "valuation": level_to_json(v)}
    return 0, report, f"{s}\nvaluation: {'inf' if v is INF else format_level(v)}"


def cmd_project(args):
    group = _view_group(args.family)
    view = make_view(group)
    rng = random.Random(args.seed)
    if args.ball:
        ball = Ball.from_json(group, _read_json(args.ball))
        if ball.kind != "closed":
            raise UsageError("project needs a closed ball")
    else:
        ball = random_ball(group, rng)
    image = project_ball(view, ball)
    checks = []
    for k in range(LIFT_CHECKS):
        target = line_target(view, image, rng, boundary=(k == 0))
        z = lift_point(view, target, ball)
        checks.append({"target": target.to_json(), "lift": group.to_json(z),
                       "rho_round_trip": view.rho(z) == target,
                       "in_ball": ball_contains(group, ball, z)})
    ok = all(c["rho_round_trip"] and c["in_ball"] for c in checks)
    report = {**_header(args, family=args.family), "ball": ball.to_json(group),
              "independent_x": group.to_json(view.independent_x),
              "omega_x": level_to_json(group.omega(view.independent_x)),
              "modulus": view.modulus.to_json(),
              "projected": image.to_json(view.line), "lifts": checks, "ok": ok}
    text = (f"{args.family}: level {format_level(ball.level)} -> {format_level(image.level)}; "
            f"{sum(c['rho_round_trip'] and c['in_ball'] for c in checks)}/{len(checks)} lifts ok")
    return (0 if ok else 1), report, text


def cmd_solve_chain(args):
    group = _view_group(args.family)
    view = make_view(group)
    if args.chain:
        data = _read_json(args.chain)
        if not isinstance(data, list):
            raise ParseError("chain JSON must be a list of balls")
        chain = [Ball.from_json(group, b) for b in data]
    else:
        chain = random_chain(group, random.Random(args.seed), args.length)
    try:
        solution = solve_chain(view, chain)
    except NonarchError as exc:
        raise UsageError(str(exc)) from None
    member = [ball_contains(group, b, solution.point) for b in chain]
    oracle = [ball_contains(group, b, solution.oracle) for b in chain]
    ok = all(member) and member == oracle
    report = {**_header(args, family=args.family),
              "chain": [b.to_json(group) for b in chain],
              "solution": solution.to_json(group), "membership": member,
              "oracle_membership": oracle, "ok": ok}
    text = (f"{args.family}: {len(chain)} balls, recursion depth {solution.depth}, "
            f"solution in all balls: {all(member)}")
    return (0 if ok else 1), report, text


COMMANDS = {
    "axioms": cmd_axioms,
    "counterexample": cmd_counterexample,
    "eval": cmd_eval,
    "project": cmd_project,
    "solve-chain": cmd_solve_chain,
}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        if args.samples is None:
            args.samples = _default_samples()
        code, report, text = COMMANDS[args.command](args)
    except (UsageError, ParseError, NonarchError, ValueError) as exc:
        print(f"nonarch: error: {exc}", file=sys.stderr)
        return 2
    out = json.dumps(report, indent=2, sort_keys=True) + "\n" if args.format == "json" else text + "\n"
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(out)
    else:
        sys.stdout.write(out)
    return code


if __name__ == "__main__":
    sys.exit(main())
