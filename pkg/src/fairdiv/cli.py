"""Command-line driver: generate instances, solve, verify, reproduce.

Exit codes: 0 success, 1 verification/reproduction failure, 2 usage or
input error, 3 desk-cap exceeded.  All numeric output is rendered as
reduced fractions; ``--decimal`` adds float approximations for reading
convenience but never feeds back into any computation.
"""
from __future__ import annotations

import argparse
import json
import sys
import time
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path
from typing import Any

from .allocator import (
    DEFAULT_NAIVE_CAP,
    MINIMAL,
    PHASE,
    ZERO_ESTIMATE,
    Allocation,
    EstimateVector,
    allocate_from_estimates,
    allocate_naive,
    fair_divide,
    verify_allocation,
)
from .errors import (
    ConfigError,
    DeskCapError,
    FairdivError,
    InputError,
    NoEligibleAgentError,
    ParseError,
)
from .instances import (
    RANDOM_FAMILIES,
    footnote_instance,
    parse_allocation,
    parse_instance,
    random_instance,
    serialize_allocation,
    serialize_instance,
    table1_instance,
)
from .mms import DEFAULT_MMS_CAP, mms_bounds, mms_exact
from .rationals import format_rational, parse_rational

EXIT_OK = 0
EXIT_FAILED_CHECK = 1
EXIT_USAGE = 2
EXIT_DESK_CAP = 3

DEFAULT_ALPHA = "11/30"
DEFAULT_DELTA = "1/16"
DEFAULT_EPSILON = "1/10000000"
UPPER_BOUND_RATIO = Fraction(40, 107)


@dataclass(frozen=True)
class RunConfig:
    """Exact-rational run parameters, validated once at the edge."""

    alpha: Fraction = Fraction(11, 30)
    delta: Fraction = Fraction(1, 16)
    epsilon: Fraction = Fraction(1, 10**7)
    seed: int = 0
    naive_cap: int = DEFAULT_NAIVE_CAP
    mms_cap: int = DEFAULT_MMS_CAP

    def __post_init__(self) -> None:
        if not 0 < self.delta < 1:
            raise ConfigError(f"delta must lie in (0, 1), got {self.delta}")
        if self.alpha <= 0:
            raise ConfigError(f"alpha must be positive, got {self.alpha}")


def _rational_arg(text: str) -> Fraction:
    try:
        return parse_rational(text)
    except ParseError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from exc


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="fairdiv",
        description="Approximate maximin-share fair division over hereditary set systems.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("gen", help="generate an instance document")
    gen_sub = gen.add_subparsers(dest="kind", required=True)
    gen_table1 = gen_sub.add_parser("table1", help="the adversarial capacity instance")
    gen_table1.add_argument("--n", type=int, default=330, help="agents; multiple of 330")
    gen_footnote = gen_sub.add_parser("footnote", help="the three-item non-submodular example")
    gen_random = gen_sub.add_parser("random", help="seeded random instance")
    gen_random.add_argument("--seed", type=int, required=True)
    gen_random.add_argument("--m", type=int, required=True, help="item count")
    gen_random.add_argument("--n", type=int, required=True, help="agent count")
    gen_random.add_argument("--family", choices=RANDOM_FAMILIES, default="capacity")
    gen_random.add_argument("--max-num", type=int, default=8, help="value numerator bound")
    gen_random.add_argument("--max-den", type=int, default=4, help="value denominator bound")
    for gen_kind in (gen_table1, gen_footnote, gen_random):
        gen_kind.add_argument("-o", "--output", default="-", help="output file (default stdout)")

    solve = sub.add_parser("solve", help="allocate an instance file")
    solve.add_argument("instance", help="instance document path")
    solve.add_argument("--alpha", type=_rational_arg, default=parse_rational(DEFAULT_ALPHA))
    solve.add_argument("--delta", type=_rational_arg, default=parse_rational(DEFAULT_DELTA))
    solve.add_argument("--naive", action="store_true", help="run the reference search path")
    solve.add_argument("--naive-cap", type=int, default=DEFAULT_NAIVE_CAP)
    solve.add_argument("--trace", help="write trace records to this path")
    solve.add_argument("-o", "--output", default="-")
    solve.add_argument("--decimal", action="store_true")

    mms = sub.add_parser("mms", help="maximin share of one agent")
    mms.add_argument("instance")
    mms.add_argument("--agent", type=int, default=0, help="agent index")
    mms.add_argument("--agents", type=int, default=None, help="partition size (default: instance n)")
    mms.add_argument("--cap", type=int, default=DEFAULT_MMS_CAP, help="exact-search item cap")
    mms.add_argument("--decimal", action="store_true")

    verify = sub.add_parser("verify", help="check an allocation document")
    verify.add_argument("allocation")
    verify.add_argument("instance")
    verify.add_argument("--floor-mode", choices=("mu", "exact-mms"), default="mu")
    verify.add_argument("--alpha", type=_rational_arg, default=parse_rational(DEFAULT_ALPHA))
    verify.add_argument("--delta", type=_rational_arg, default=parse_rational(DEFAULT_DELTA))
    verify.add_argument("--cap", type=int, default=DEFAULT_MMS_CAP)

    repro = sub.add_parser(
        "repro-upper-bound",
        help="replay the adversarial run that strands one agent in 330",
    )
    repro.add_argument("--n", type=int, default=330, help="agents; multiple of 330")
    repro.add_argument("--epsilon", type=_rational_arg, default=parse_rational(DEFAULT_EPSILON))
    repro.add_argument("--trace", help="write trace records to this path")
    repro.add_argument("--decimal", action="store_true")

    return parser


def _write_output(text: str, target: str) -> None:
    if target == "-":
        sys.stdout.write(text)
    else:
        Path(target).write_text(text, encoding="utf-8")


def _read_instance(path: str):
    return parse_instance(Path(path).read_text(encoding="utf-8"))


def _write_trace(allocation: Allocation, path: str | None) -> None:
    if path:
        Path(path).write_text(
            "".join(line + "\n" for line in allocation.trace_records()),
            encoding="utf-8",
        )


def _cmd_gen(args: argparse.Namespace) -> int:
    if args.kind == "table1":
        instance = table1_instance(args.n)
    elif args.kind == "footnote":
        instance = footnote_instance()
    else:
        config = RunConfig(seed=args.seed)
        instance = random_instance(
            config.seed, args.m, args.n, args.family, (args.max_num, args.max_den)
        )
    _write_output(serialize_instance(instance), args.output)
    return EXIT_OK


def _cmd_solve(args: argparse.Namespace) -> int:
    config = RunConfig(alpha=args.alpha, delta=args.delta, naive_cap=args.naive_cap)
    instance = _read_instance(args.instance)
    if args.naive:
        allocation = allocate_naive(instance, config.alpha, max_items=config.naive_cap)
    else:
        allocation, _mu = fair_divide(instance, config.alpha, config.delta)
    _write_output(serialize_allocation(allocation, alpha=config.alpha), args.output)
    _write_trace(allocation, args.trace)
    return EXIT_OK


def _cmd_mms(args: argparse.Namespace) -> int:
    config = RunConfig(mms_cap=args.cap)
    instance = _read_instance(args.instance)
    if not 0 <= args.agent < instance.n:
        raise InputError(f"agent {args.agent} outside [0, {instance.n})")
    parts = args.agents if args.agents is not None else instance.n
    valuation = instance.valuations[args.agent]
    doc: dict[str, Any] = {"agent": args.agent, "parts": parts}
    try:
        result = mms_exact(instance.spec, valuation, parts, max_items=config.mms_cap)
        doc["mode"] = "exact"
        doc["value"] = format_rational(result.value)
        doc["witness"] = [sorted(part) for part in result.witness.parts]
        if args.decimal:
            doc["value_decimal"] = float(result.value)
    except DeskCapError:
        result = mms_bounds(valuation, parts, instance.num_items)
        doc["mode"] = "bounds"
        doc["lower"] = format_rational(result.lower)
        doc["upper"] = format_rational(result.upper)
        if args.decimal:
            doc["lower_decimal"] = float(result.lower)
            doc["upper_decimal"] = float(result.upper)
    sys.stdout.write(json.dumps(doc, indent=2) + "\n")
    return EXIT_OK


def _cmd_verify(args: argparse.Namespace) -> int:
    config = RunConfig(alpha=args.alpha, delta=args.delta, mms_cap=args.cap)
    allocation = parse_allocation(Path(args.allocation).read_text(encoding="utf-8"))
    instance = _read_instance(args.instance)
    floors: dict[int, Fraction] = {}
    if args.floor_mode == "mu":
        # Event thresholds are alpha * mu at allocation time; estimates of
        # allocated agents never shrink afterwards, so these are final.
        for event in allocation.trace:
            floors[event.agent] = event.threshold
    else:
        scale = (1 - config.delta) * config.alpha
        for agent in sorted(allocation.bundles):
            result = mms_exact(
                instance.spec, instance.valuations[agent], instance.n, max_items=config.mms_cap
            )
            floors[agent] = scale * result.value
    report = verify_allocation(instance, allocation, floors)
    doc = {
        "floor_mode": args.floor_mode,
        "ok": report.ok,
        "violations": [
            {"kind": v.kind, "agent": v.agent, "message": v.message}
            for v in report.violations
        ],
    }
    sys.stdout.write(json.dumps(doc, indent=2) + "\n")
    return EXIT_OK if report.ok else EXIT_FAILED_CHECK


def _cmd_repro(args: argparse.Namespace) -> int:
    config = RunConfig(epsilon=args.epsilon)
    instance = table1_instance(args.n)
    alpha = UPPER_BOUND_RATIO + config.epsilon
    started = time.monotonic()
    allocation = allocate_from_estimates(
        instance, EstimateVector((Fraction(1),) * instance.n), alpha
    )
    elapsed = time.monotonic() - started
    phase_hist: dict[str, int] = {}
    minimal_hist: dict[str, int] = {}
    zero_grants = 0
    for event in allocation.trace:
        if event.kind == PHASE:
            key = str(event.phase)
            phase_hist[key] = phase_hist.get(key, 0) + 1
        elif event.kind == MINIMAL:
            key = str(event.phase)
            minimal_hist[key] = minimal_hist.get(key, 0) + 1
        elif event.kind == ZERO_ESTIMATE:
            zero_grants += 1
    expected = args.n // 330
    unallocated = len(allocation.unallocated_agents)
    doc: dict[str, Any] = {
        "n": args.n,
        "alpha": format_rational(alpha),
        "histogram": {
            "phase": dict(sorted(phase_hist.items(), key=lambda kv: int(kv[0]))),
            "minimal": dict(sorted(minimal_hist.items(), key=lambda kv: int(kv[0]))),
            "zero-estimate": zero_grants,
        },
        "allocated": len(allocation.bundles),
        "unallocated": unallocated,
        "expected_unallocated": expected,
    }
    if args.decimal:
        doc["alpha_decimal"] = float(alpha)
    sys.stdout.write(json.dumps(doc, indent=2) + "\n")
    sys.stderr.write(f"completed in {elapsed:.2f}s\n")
    _write_trace(allocation, args.trace)
    return EXIT_OK if unallocated == expected else EXIT_FAILED_CHECK


_HANDLERS = {
    "gen": _cmd_gen,
    "solve": _cmd_solve,
    "mms": _cmd_mms,
    "verify": _cmd_verify,
    "repro-upper-bound": _cmd_repro,
}


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else EXIT_USAGE
    try:
        return _HANDLERS[args.command](args)
    except DeskCapError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_DESK_CAP
    except (InputError, ConfigError, ParseError, NoEligibleAgentError) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_USAGE
    except FileNotFoundError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_USAGE
    except FairdivError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
