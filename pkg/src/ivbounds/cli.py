"""Command-line surface: derive, check, bound, oracle, scenario.

Exit codes: 0 success, 1 usage or input error, 2 model check failed,
3 empty bound interval, 4 oracle disagreement. JSON output is built from
insertion-ordered dicts only, so identical invocations are byte-identical.
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction
from typing import Sequence

from .bounds import (
    BoundSet,
    classify_observable,
    derive,
    evaluate_bounds,
    instrumental_inequality,
    model_check,
    scenario_hull,
    TargetUnconstrained,
)
from .data import BUNDLED_DATASETS, ObservedTables, derive_marginals, load
from .forms import MissingCoordinate, format_decimal, format_rational
from .oracle import MismatchError, cross_check
from .scenarios import SCENARIOS, get_scenario, scenario_vertex_set

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_CHECK_FAILED = 2
EXIT_EMPTY = 3
EXIT_MISMATCH = 4


class UsageError(Exception):
    """Bad arguments or unusable input; maps to exit code 1."""


class _Parser(argparse.ArgumentParser):
    # argparse exits with status 2 on bad usage; the documented contract
    # is exit 1, so route everything through UsageError instead.
    def error(self, message):
        raise UsageError(message)


def _fmt(q: Fraction) -> str:
    return f"{format_rational(q)} ({format_decimal(q)})"


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(
        prog="ivbounds",
        description=(
            "Sharp bounds on causal effects in binary instrumental-variable "
            "models, by exact polytope computation."
        ),
    )
    sub = parser.add_subparsers(dest="verb", metavar="verb", required=True)

    def add_common(p, data: bool, tolerance: bool = False, target: bool = True):
        p.add_argument(
            "--scenario",
            required=True,
            choices=tuple(SCENARIOS),
            help="which observable scheme to use",
        )
        if data:
            p.add_argument(
                "--data",
                required=True,
                help=f"JSON/CSV table file or a bundled name {BUNDLED_DATASETS}",
            )
        if tolerance:
            p.add_argument(
                "--tolerance",
                default=None,
                help="slack tolerance as a rational such as 1/2000 or 0.0005 "
                "(default: 1/2000 for decimal input, 0 for exact input)",
            )
        if target:
            p.add_argument(
                "--target",
                choices=("alpha", "beta"),
                default=None,
                help="causal target; must match the scenario's own target",
            )
        p.add_argument(
            "--format",
            choices=("text", "json"),
            default="text",
            help="output format (default text)",
        )

    p = sub.add_parser("derive", help="derive hull equalities, model tests and bound forms")
    add_common(p, data=False)
    p.set_defaults(func=_cmd_derive)

    p = sub.add_parser("check", help="evaluate model-falsification constraints on data")
    add_common(p, data=True, tolerance=True)
    p.set_defaults(func=_cmd_check)

    p = sub.add_parser("bound", help="evaluate the bound interval on data")
    add_common(p, data=True)
    p.set_defaults(func=_cmd_bound)

    p = sub.add_parser("oracle", help="cross-check derived bounds against an exact LP")
    add_common(p, data=True)
    p.set_defaults(func=_cmd_oracle)

    p = sub.add_parser("scenario", help="inspect the scenario registry")
    p.add_argument("action", choices=("list",))
    p.add_argument("--format", choices=("text", "json"), default="text")
    p.set_defaults(func=_cmd_scenario)

    return parser


def _resolve_scenario(args):
    s = get_scenario(args.scenario)
    wanted = getattr(args, "target", None)
    if wanted is not None and s.causal_target != wanted:
        have = s.causal_target or "no target"
        raise UsageError(f"scenario {s.name!r} has {have}, not {wanted!r}")
    return s


def _load_data(source: str) -> ObservedTables:
    tables = load(source)
    if tables.zeta is not None:
        tables = derive_marginals(tables)
    return tables


def _emit(args, payload: dict, text_lines: list[str]) -> None:
    if args.format == "json":
        print(json.dumps(payload, indent=2))
    else:
        for line in text_lines:
            print(line)


def _cmd_derive(args) -> int:
    s = _resolve_scenario(args)
    if s.causal_target is None:
        h = scenario_hull(s.name)
        nontrivial, trivial = classify_observable(h)
        equalities = h.equalities
        lower: tuple = ()
        upper: tuple = ()
        dim = h.affine_dimension
        labels = s.observable_labels
    else:
        bs = derive(s.name)
        h = scenario_hull(s.name)
        nontrivial, trivial = bs.observable_tests, bs.trivial_tests
        equalities = bs.hull_equalities
        lower, upper = bs.lower_forms, bs.upper_forms
        dim = h.affine_dimension
        labels = bs.space.labels

    payload = {
        "scenario": s.name,
        "target": s.causal_target,
        "dim": dim,
        "labels": list(labels),
        "counts": {
            "observable": len(nontrivial),
            "lower": len(lower),
            "upper": len(upper),
            "trivial": len(trivial),
            "equalities": len(equalities),
        },
        "equalities": [c.render() for c in equalities],
        "observable_tests": [c.render() for c in nontrivial],
        "trivial_tests": [c.render() for c in trivial],
        "lower": [f.render() for f in lower],
        "upper": [f.render() for f in upper],
    }

    lines = [
        f"scenario {s.name}: target {s.causal_target or 'none'}, affine dimension {dim}",
        f"equalities ({len(equalities)}):",
        *(f"  {c.render()}" for c in equalities),
        f"observable tests ({len(nontrivial)}):",
        *(f"  {c.render()}" for c in nontrivial),
        f"trivial tests ({len(trivial)}):",
        *(f"  {c.render()}" for c in trivial),
    ]
    if s.causal_target is not None:
        lines += [
            f"lower bounds ({len(lower)}):",
            *(f"  {s.causal_target} >= {f.render()}" for f in lower),
            f"upper bounds ({len(upper)}):",
            *(f"  {s.causal_target} <= {f.render()}" for f in upper),
        ]
    _emit(args, payload, lines)
    return EXIT_OK


def _check_subject(s):
    """BoundSet when the scenario has a target, raw hull otherwise."""
    if s.causal_target is None:
        return scenario_hull(s.name)
    return derive(s.name)


def _cmd_check(args) -> int:
    s = _resolve_scenario(args)
    tables = _load_data(args.data)
    tol = None if args.tolerance is None else args.tolerance
    report = model_check(_check_subject(s), tables, tol)

    sections: dict[str, list] = {"observable": [], "equality": [], "trivial": []}
    for e in report.entries:
        sections[e.section].append(e)

    instrumental = None
    if s.name == "trivariate":
        instrumental = instrumental_inequality(tables, tol)

    passed = report.passed and (instrumental is None or instrumental.passed)
    status = "PASS" if passed else "FAIL"

    payload = {
        "scenario": s.name,
        "data": args.data,
        "tolerance": format_rational(report.tolerance),
        "status": status,
        "model_check": {
            "passed": report.passed,
            "sections": {
                name: [
                    {
                        "constraint": e.constraint.render(),
                        "slack": format_rational(e.slack),
                        "slack_decimal": format_decimal(e.slack),
                        "passed": e.passed,
                    }
                    for e in entries
                ]
                for name, entries in sections.items()
            },
        },
        "instrumental": None
        if instrumental is None
        else {
            "b_sums": [format_rational(v) for v in instrumental.b_sums],
            "maximum": format_rational(instrumental.maximum),
            "passed": instrumental.passed,
        },
    }

    lines = [
        f"model check: {s.name} on {args.data} (tolerance {format_rational(report.tolerance)})"
    ]
    for name in ("observable", "equality", "trivial"):
        entries = sections[name]
        ok = sum(1 for e in entries if e.passed)
        lines.append(f"{name} constraints: {ok}/{len(entries)} passed")
        for e in entries:
            flag = "PASS" if e.passed else "FAIL"
            lines.append(f"  [{e.index}] {flag} slack {_fmt(e.slack)}  {e.constraint.render()}")
    if instrumental is not None:
        flag = "PASS" if instrumental.passed else "FAIL"
        sums = ", ".join(_fmt(v) for v in instrumental.b_sums)
        lines.append(f"instrumental inequality: {flag} (per-b sums {sums})")
    lines.append(status)
    _emit(args, payload, lines)
    return EXIT_OK if passed else EXIT_CHECK_FAILED


def _cmd_bound(args) -> int:
    s = _resolve_scenario(args)
    if s.causal_target is None:
        raise UsageError(f"scenario {s.name!r} has no causal target to bound")
    tables = _load_data(args.data)
    bs = derive(s.name)
    interval = evaluate_bounds(bs, tables)

    payload = {
        "scenario": s.name,
        "target": bs.target,
        "data": args.data,
        "empty": interval.empty,
        "lower": {
            "value": format_rational(interval.lower),
            "decimal": format_decimal(interval.lower),
            "witness": interval.lower_witness,
            "form": bs.lower_forms[interval.lower_witness].render(),
        },
        "upper": {
            "value": format_rational(interval.upper),
            "decimal": format_decimal(interval.upper),
            "witness": interval.upper_witness,
            "form": bs.upper_forms[interval.upper_witness].render(),
        },
    }

    lines = [
        f"{format_decimal(interval.lower)} ≤ {bs.target} ≤ {format_decimal(interval.upper)}",
        f"exact: [{format_rational(interval.lower)}, {format_rational(interval.upper)}]",
        f"lower witness [{interval.lower_witness}]: "
        f"{bs.target} >= {bs.lower_forms[interval.lower_witness].render()}",
        f"upper witness [{interval.upper_witness}]: "
        f"{bs.target} <= {bs.upper_forms[interval.upper_witness].render()}",
    ]
    if interval.empty:
        lines.insert(0, "EMPTY interval: data is inconsistent with the model")
    _emit(args, payload, lines)
    return EXIT_EMPTY if interval.empty else EXIT_OK


def _cmd_oracle(args) -> int:
    s = _resolve_scenario(args)
    if s.causal_target is None:
        raise UsageError(f"scenario {s.name!r} has no causal target to optimize")
    tables = _load_data(args.data)
    report = cross_check(s, tables)

    def endpoint(v):
        return None if v is None else {"value": format_rational(v), "decimal": format_decimal(v)}

    payload = {
        "scenario": report.scenario,
        "target": report.target,
        "data": args.data,
        "member": report.member,
        "feasible": report.feasible,
        "forms": {"lower": endpoint(report.form_lower), "upper": endpoint(report.form_upper)},
        "lp": {"lower": endpoint(report.lp_lower), "upper": endpoint(report.lp_upper)},
        "consistent": report.consistent,
    }

    def span(lo, hi):
        if lo is None:
            return "infeasible"
        return f"[{_fmt(lo)}, {_fmt(hi)}]"

    lines = [
        f"oracle cross-check: {s.name} on {args.data}",
        f"membership: forms={'yes' if report.member else 'no'} lp={'yes' if report.feasible else 'no'}",
        f"forms interval: {span(report.form_lower, report.form_upper)}",
        f"lp interval:    {span(report.lp_lower, report.lp_upper)}",
        "consistent: yes",
    ]
    _emit(args, payload, lines)
    return EXIT_OK


def _cmd_scenario(args) -> int:
    rows = []
    for name, s in SCENARIOS.items():
        images = scenario_vertex_set(s, include_target=True)
        rows.append(
            {
                "name": name,
                "target": s.causal_target,
                "uses_psi": s.uses_psi,
                "labels": list(s.space.labels),
                "parameter_vertices": 32 if s.uses_psi else 16,
                "distinct_images": len(images),
            }
        )
    payload = {"scenarios": rows}
    lines = []
    for r in rows:
        lines.append(
            f"{r['name']}: target={r['target'] or 'none'} psi={'yes' if r['uses_psi'] else 'no'} "
            f"vertices={r['parameter_vertices']} images={r['distinct_images']}"
        )
        lines.append(f"  coordinates: {', '.join(r['labels'])}")
    _emit(args, payload, lines)
    return EXIT_OK


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    return args.func(args)


def entry(argv: Sequence[str] | None = None) -> int:
    try:
        return main(argv)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except MismatchError as exc:
        print(f"oracle mismatch: {exc}", file=sys.stderr)
        return EXIT_MISMATCH
    except (ValueError, MissingCoordinate) as exc:
        # ParseError, ValidationError, MissingArmWeights, TargetUnconstrained
        # and UnsupportedCoordinateError all descend from ValueError.
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    raise SystemExit(entry())
