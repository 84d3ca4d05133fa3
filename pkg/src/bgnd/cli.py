"""Command-line interface.

Exit codes: 0 success, 1 I/O error, 2 parse/validation error, 3 the
guaranteed BCR bound was violated (a bug).
"""

from __future__ import annotations

import argparse
import json
import logging
import sys

from .dynamics import DynamicsConfig, run
from .evaluate import DEFAULT_CAP_ACTIONS, DEFAULT_CAP_PROFILES, TooLargeError, bcr_report, expected_opt
from .gametheory import game_constants
from .io import (
    ParseError,
    atomic_write,
    build_report,
    dumps,
    generate_instance,
    load_instance,
    load_json,
    parse_strategies,
    save_instance,
    serialize_report,
)
from .model import ValidationError
from .oracle import KINDS, Oracle, OracleError

EXIT_OK, EXIT_IO, EXIT_INVALID, EXIT_BOUND = 0, 1, 2, 3


def _floats(text: str) -> tuple:
    return tuple(float(x) for x in text.split(","))


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="bgnd", description="Bayesian generalized network design solver")
    parser.add_argument("--cap-profiles", type=int, default=DEFAULT_CAP_PROFILES, help="max type profiles to enumerate")
    parser.add_argument("--cap-actions", type=int, default=DEFAULT_CAP_ACTIONS, help="max action profiles per type profile")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("solve", help="compute strategy tables with Bayes-ABRD")
    p.add_argument("instance")
    p.add_argument("--oracle", choices=KINDS, default="auto")
    p.add_argument("--rounds", type=int, default=None, help="override the round budget R")
    p.add_argument("--diagnostics", action="store_true", help="record exact potential and cost per round")
    p.add_argument("--with-bcr", action="store_true", help="also evaluate the result exactly")
    p.add_argument("-o", "--output", required=True)

    p = sub.add_parser("eval", help="exact cost of a report's strategies vs the guaranteed bound")
    p.add_argument("instance")
    p.add_argument("report")
    p.add_argument("--oracle", choices=KINDS, default=None, help="defaults to the report's oracle")

    p = sub.add_parser("bound", help="print the game constants")
    p.add_argument("instance")
    p.add_argument("--oracle", choices=KINDS, default="auto")

    p = sub.add_parser("opt", help="brute-force expected optimum with per-profile breakdown")
    p.add_argument("instance")

    p = sub.add_parser("gen", help="generate a random instance")
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--n", type=int, default=3, help="number of agents")
    p.add_argument("--nodes", type=int, default=6)
    p.add_argument("--edge-density", type=float, default=0.3)
    p.add_argument("--max-edges", type=int, default=12)
    p.add_argument("--types", type=int, default=2, help="types per agent")
    p.add_argument("--alphas", type=_floats, default=(2.0,), help="comma-separated exponents")
    p.add_argument("--xi-range", type=_floats, default=(0.5, 2.0), help="lo,hi")
    p.add_argument("--kind", choices=("routing", "set_connectivity", "explicit"), default="routing")
    p.add_argument("--directed", action="store_true")
    p.add_argument("--resources", type=int, default=6, help="resource count for explicit instances")
    p.add_argument("-o", "--output", required=True)
    return parser


def _constants(instance, oracle):
    return game_constants(instance, oracle.descriptor(instance).rho)


def cmd_solve(args) -> int:
    instance = load_instance(args.instance)
    oracle = Oracle(args.oracle)
    constants = _constants(instance, oracle)
    trace = run(instance, oracle, DynamicsConfig(rounds=args.rounds, diagnostics=args.diagnostics), constants)
    bcr = None
    if args.with_bcr:
        bcr = bcr_report(instance, trace.final, constants, args.cap_profiles, args.cap_actions)
    report = build_report(oracle.descriptor(instance), constants, trace, bcr)
    atomic_write(args.output, serialize_report(report))
    return EXIT_OK


def cmd_eval(args) -> int:
    instance = load_instance(args.instance)
    doc = load_json(args.report)
    s = parse_strategies(doc, instance)
    kind = args.oracle or doc.get("oracle", {}).get("kind", "auto")
    oracle = Oracle(kind if kind in KINDS else "auto")
    constants = _constants(instance, oracle)
    rep = bcr_report(instance, s, constants, args.cap_profiles, args.cap_actions)
    print(dumps(rep.as_dict()), end="")
    return EXIT_OK if rep.holds else EXIT_BOUND


def cmd_bound(args) -> int:
    instance = load_instance(args.instance)
    print(dumps(_constants(instance, Oracle(args.oracle)).as_dict()), end="")
    return EXIT_OK


def cmd_opt(args) -> int:
    instance = load_instance(args.instance)
    value, rows = expected_opt(instance, args.cap_profiles, args.cap_actions, breakdown=True)
    doc = {
        "expected_opt": value,
        "profiles": [{"types": list(t), "probability": p, "opt": opt} for t, p, opt in rows],
    }
    print(dumps(doc), end="")
    return EXIT_OK


def cmd_gen(args) -> int:
    if len(args.xi_range) != 2:
        raise ValueError("--xi-range needs exactly two numbers")
    instance = generate_instance(
        args.seed,
        n_agents=args.n,
        nodes=args.nodes,
        edge_density=args.edge_density,
        types_per_agent=args.types,
        alphas=args.alphas,
        xi_range=args.xi_range,
        request_kind=args.kind,
        directed=args.directed,
        max_edges=args.max_edges,
        n_resources=args.resources,
    )
    save_instance(instance, args.output)
    return EXIT_OK


COMMANDS = {"solve": cmd_solve, "eval": cmd_eval, "bound": cmd_bound, "opt": cmd_opt, "gen": cmd_gen}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        return COMMANDS[args.command](args)
    except (ParseError, ValidationError, OracleError, TooLargeError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except (OSError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
