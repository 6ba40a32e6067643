"""Command-line front end: instance files in, plans / traces / JSON out.

Instance file format (whitespace-separated, '#' comment lines allowed
anywhere, numbers are integers or fractions like 5/2):

    m n
    <m rows of n costs>
    <m supplies>
    <n demands>

Exit codes: 0 success (for check-monge: condition holds), 1 check-monge
violation, 2 input error (unreadable file, parse error, invalid data),
3 method precondition failure (e.g. the weighted Hungarian method on
non-integer marginals, or an oracle size guard).

All human-facing indices are 1-based.
"""

from __future__ import annotations

import argparse
import json
import re
import sys
from fractions import Fraction
from typing import Callable, Iterable, Sequence

from .core import (
    CyclicBasisError,
    DualCertificate,
    OptimalityReport,
    TransportInstance,
    TransportPlan,
    compute_duals_from_plan,
    new_instance,
    plan_cost,
    verify_optimal,
)
from .hungarian import SolveTrace, solve_weighted_hungarian
from .nwcorner import (
    check_monge,
    convex_diff_cost,
    factored_cost,
    north_west_corner,
    problem_p_instance,
    ProblemPSpec,
    sum_cost,
)
from .oracle import enumerate_optimum

__all__ = [
    "ParseError",
    "format_rational",
    "main",
    "parse_instance",
    "serialize_instance",
]

EXIT_OK = 0
EXIT_VIOLATED = 1
EXIT_INPUT_ERROR = 2
EXIT_PRECONDITION = 3

_TOKEN = re.compile(r"\S+")

COST_SHAPES: dict[str, Callable[[Fraction], Fraction]] = {
    "square": lambda t: t * t,
    "abs": lambda t: abs(t),
    "relu": lambda t: max(Fraction(0), t),
}


class ParseError(ValueError):
    """Malformed instance text; carries the 1-based line and column."""

    def __init__(self, line: int, column: int, reason: str) -> None:
        super().__init__(f"line {line}, column {column}: {reason}")
        self.line = line
        self.column = column
        self.reason = reason


class CommandError(Exception):
    """Abort the current command with a message and exit status."""

    def __init__(self, code: int, message: str) -> None:
        super().__init__(message)
        self.code = code


def format_rational(value: Fraction) -> str:
    """Render exactly: integers without denominator, otherwise p/q."""
    if value.denominator == 1:
        return str(value.numerator)
    return f"{value.numerator}/{value.denominator}"


def _data_lines(text: str) -> list[tuple[int, list[tuple[int, str]]]]:
    """Non-comment, non-blank lines as (lineno, [(column, token), ...])."""
    out = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        stripped = raw.strip()
        if not stripped or stripped.startswith("#"):
            continue
        out.append(
            (lineno, [(match.start() + 1, match.group()) for match in _TOKEN.finditer(raw)])
        )
    return out


def _parse_rational(lineno: int, column: int, token: str) -> Fraction:
    try:
        return Fraction(token)
    except (ValueError, ZeroDivisionError):
        raise ParseError(lineno, column, f"malformed number {token!r}") from None


def _parse_row(
    line: tuple[int, list[tuple[int, str]]], expected: int, label: str
) -> list[Fraction]:
    lineno, tokens = line
    if len(tokens) != expected:
        column = tokens[expected][0] if len(tokens) > expected else (
            tokens[-1][0] + len(tokens[-1][1]) if tokens else 1
        )
        raise ParseError(
            lineno, column, f"{label} has {len(tokens)} fields, expected {expected}"
        )
    return [_parse_rational(lineno, column, token) for column, token in tokens]


def parse_instance(text: str) -> TransportInstance:
    """Parse instance text; raises ParseError naming line and column, or a
    ValueError (e.g. imbalance with both totals) from validation."""
    lines = _data_lines(text)
    if not lines:
        raise ParseError(1, 1, "empty instance: expected an 'm n' header line")
    header = _parse_row(lines[0], 2, "header line")
    lineno, tokens = lines[0]
    for value, (column, token) in zip(header, tokens):
        if value.denominator != 1 or value < 1:
            raise ParseError(
                lineno, column, f"dimension must be a positive integer, got {token!r}"
            )
    m, n = int(header[0]), int(header[1])
    expected_lines = 1 + m + 2
    if len(lines) < expected_lines:
        last_lineno, last_tokens = lines[-1]
        raise ParseError(
            last_lineno,
            1,
            f"incomplete instance: expected {m} cost rows, a supply line and a "
            f"demand line after the header",
        )
    if len(lines) > expected_lines:
        extra_lineno, _ = lines[expected_lines]
        raise ParseError(extra_lineno, 1, "unexpected extra data after the demand line")
    cost = [_parse_row(lines[1 + k], n, f"cost row {k + 1}") for k in range(m)]
    supply = _parse_row(lines[1 + m], m, "supply line")
    demand = _parse_row(lines[2 + m], n, "demand line")
    return new_instance(cost, supply, demand)


def serialize_instance(instance: TransportInstance) -> str:
    """Canonical instance text: single spaces, no comments, trailing newline."""
    lines = [f"{instance.m} {instance.n}"]
    for row in instance.cost:
        lines.append(" ".join(format_rational(v) for v in row))
    lines.append(" ".join(format_rational(v) for v in instance.supply))
    lines.append(" ".join(format_rational(v) for v in instance.demand))
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------- output


def _matrix_lines(matrix: Sequence[Sequence[Fraction]], indent: str) -> list[str]:
    cells = [[format_rational(v) for v in row] for row in matrix]
    width = max(len(s) for row in cells for s in row)
    return [indent + " ".join(s.rjust(width) for s in row) for row in cells]


def _cover_text(cover) -> str:
    rows = "{" + ", ".join(str(i + 1) for i in sorted(cover.rows)) + "}"
    cols = "{" + ", ".join(str(j + 1) for j in sorted(cover.cols)) + "}"
    return f"rows {rows} cols {cols} weight {format_rational(cover.weight)}"


def _trace_lines(trace: SolveTrace) -> list[str]:
    lines = ["trace:"]
    if trace.scale != 1:
        lines.append(f"  scale: {trace.scale}")
    for k, it in enumerate(trace.iterations, start=1):
        lines.append(f"  iteration {k}:")
        lines.append("    reduced matrix:")
        lines.extend(_matrix_lines(it.matrix, "      "))
        lines.append(f"    cover: {_cover_text(it.cover)}")
        delta = "none" if it.delta is None else format_rational(it.delta)
        lines.append(f"    delta: {delta}")
    return lines


def _plan_lines(instance: TransportInstance, plan: TransportPlan) -> list[str]:
    lines = ["plan:"]
    if not len(plan):
        lines.append("  (empty)")
    for i, j in plan.cells():
        lines.append(f"  ({i + 1}, {j + 1}) = {format_rational(plan.quantity(i, j))}")
    lines.append(f"total cost = {format_rational(plan_cost(instance, plan))}")
    return lines


def _violation_text(violation) -> str:
    kind, i, j, lhs, cij = violation
    relation = ">" if kind == "dual" else "!="
    return (
        f"{kind} at ({i + 1}, {j + 1}): alpha + beta = {format_rational(lhs)} "
        f"{relation} cost = {format_rational(cij)}"
    )


def _certificate_lines(
    cert: DualCertificate | None,
    report: OptimalityReport | None,
    hints: list[tuple[int, int]],
    unavailable_reason: str | None,
) -> list[str]:
    if cert is None:
        return [f"certificate: unavailable ({unavailable_reason})"]
    lines = ["certificate:"]
    lines.append("  alpha: " + " ".join(format_rational(a) for a in cert.alpha))
    lines.append("  beta: " + " ".join(format_rational(b) for b in cert.beta))
    if hints:
        lines.append(
            "  basis hints: " + " ".join(f"({i + 1}, {j + 1})" for i, j in hints)
        )
    lines.append(f"  verified optimal: {'yes' if report.optimal else 'no'}")
    if not report.optimal:
        lines.append(f"  first violation: {_violation_text(report.violation)}")
        lines.append("  note: plan is not certified optimal")
    return lines


def _instance_json(instance: TransportInstance) -> dict:
    return {
        "m": instance.m,
        "n": instance.n,
        "total": format_rational(instance.total),
        "cost": [[format_rational(v) for v in row] for row in instance.cost],
        "supply": [format_rational(v) for v in instance.supply],
        "demand": [format_rational(v) for v in instance.demand],
    }


def _plan_json(plan: TransportPlan) -> list[dict]:
    return [
        {"row": i + 1, "col": j + 1, "quantity": format_rational(plan.quantity(i, j))}
        for i, j in plan.cells()
    ]


def _trace_json(trace: SolveTrace) -> list[dict]:
    return [
        {
            "matrix": [[format_rational(v) for v in row] for row in it.matrix],
            "cover": {
                "rows": [i + 1 for i in sorted(it.cover.rows)],
                "cols": [j + 1 for j in sorted(it.cover.cols)],
                "weight": format_rational(it.cover.weight),
            },
            "flow": format_rational(it.flow_value),
            "delta": None if it.delta is None else format_rational(it.delta),
        }
        for it in trace.iterations
    ]


def _certificate_json(
    cert: DualCertificate | None,
    report: OptimalityReport | None,
    hints: list[tuple[int, int]],
    unavailable_reason: str | None,
) -> dict | None:
    if cert is None:
        return {"available": False, "reason": unavailable_reason}
    doc = {
        "available": True,
        "alpha": [format_rational(a) for a in cert.alpha],
        "beta": [format_rational(b) for b in cert.beta],
        "verified_optimal": report.optimal,
    }
    if hints:
        doc["basis_hints"] = [[i + 1, j + 1] for i, j in hints]
    if not report.optimal:
        kind, i, j, lhs, cij = report.violation
        doc["first_violation"] = {
            "kind": kind,
            "row": i + 1,
            "col": j + 1,
            "alpha_plus_beta": format_rational(lhs),
            "cost": format_rational(cij),
        }
    return doc


# ---------------------------------------------------------------- commands


def _read_text(path: str) -> str:
    try:
        with open(path, "r", encoding="utf-8") as handle:
            return handle.read()
    except OSError as exc:
        raise CommandError(EXIT_INPUT_ERROR, f"cannot read {path}: {exc.strerror}") from exc


def _load_instance(path: str) -> TransportInstance:
    text = _read_text(path)
    try:
        return parse_instance(text)
    except ValueError as exc:  # ParseError, BalanceError, validation errors
        raise CommandError(EXIT_INPUT_ERROR, f"{path}: {exc}") from exc


def _spanning_hints(
    instance: TransportInstance, plan: TransportPlan
) -> list[tuple[int, int]]:
    """Lexicographically first cells that connect the support graph into a
    spanning tree (zero-flow basic cells for a degenerate plan)."""
    m, n = instance.m, instance.n
    parent = list(range(m + n))

    def find(x: int) -> int:
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    def union(a: int, b: int) -> bool:
        ra, rb = find(a), find(b)
        if ra == rb:
            return False
        parent[ra] = rb
        return True

    for i, j in plan.cells():
        union(i, m + j)
    hints = []
    for i in range(m):
        for j in range(n):
            if union(i, m + j):
                if (i, j) not in plan.entries:
                    hints.append((i, j))
    return hints


def _certificate_for_plan(instance: TransportInstance, plan: TransportPlan):
    """Best-effort certificate for a plan that came without one."""
    hints = _spanning_hints(instance, plan)
    try:
        cert = compute_duals_from_plan(instance, plan, basis_hint=hints)
    except CyclicBasisError:
        return None, None, [], "plan support contains a cycle; not a basic solution"
    report = verify_optimal(instance, plan, cert)
    return cert, report, hints, None


def _cmd_solve(args: argparse.Namespace) -> int:
    instance = _load_instance(args.file)
    trace: SolveTrace | None = None
    cert: DualCertificate | None = None
    report: OptimalityReport | None = None
    hints: list[tuple[int, int]] = []
    unavailable: str | None = None

    if args.method == "hungarian":
        if any(v.denominator != 1 for v in instance.supply + instance.demand):
            raise CommandError(
                EXIT_PRECONDITION,
                "method hungarian requires integer supplies and demands",
            )
        plan, cert, trace = solve_weighted_hungarian(instance)
        report = verify_optimal(instance, plan, cert)
    elif args.method == "nw":
        plan = north_west_corner(instance)
        if args.certificate:
            cert, report, hints, unavailable = _certificate_for_plan(instance, plan)
    else:  # oracle
        try:
            plan = enumerate_optimum(instance).plan
        except ValueError as exc:
            raise CommandError(EXIT_PRECONDITION, f"method oracle: {exc}") from exc
        if args.certificate:
            cert, report, hints, unavailable = _certificate_for_plan(instance, plan)

    if args.json:
        doc = {
            "method": args.method,
            "instance": _instance_json(instance),
            "plan": _plan_json(plan),
            "cost": format_rational(plan_cost(instance, plan)),
        }
        if args.trace and trace is not None:
            doc["trace"] = _trace_json(trace)
            doc["scale"] = trace.scale
        if args.certificate:
            doc["certificate"] = _certificate_json(cert, report, hints, unavailable)
        print(json.dumps(doc, indent=2, sort_keys=True))
        return EXIT_OK

    lines: list[str] = [f"method: {args.method}"]
    if args.trace and trace is not None:
        lines.extend(_trace_lines(trace))
    lines.extend(_plan_lines(instance, plan))
    if args.certificate:
        lines.extend(_certificate_lines(cert, report, hints, unavailable))
    print("\n".join(lines))
    return EXIT_OK


def _cmd_check_monge(args: argparse.Namespace) -> int:
    instance = _load_instance(args.file)
    result = check_monge(instance.cost, mode=args.mode)
    if result.holds:
        print("MONGE: HOLDS")
        return EXIT_OK
    i, j, r, s = result.witness
    print(
        f"MONGE: VIOLATED at ({i + 1}, {j + 1}, {r + 1}, {s + 1}): "
        f"cost[{i + 1}][{j + 1}] + cost[{r + 1}][{s + 1}] = "
        f"{format_rational(result.direct_sum)} > "
        f"{format_rational(result.cross_sum)} = "
        f"cost[{r + 1}][{j + 1}] + cost[{i + 1}][{s + 1}]"
    )
    return EXIT_VIOLATED


def _rationals(values: Iterable[str], label: str) -> list[Fraction]:
    out = []
    for token in values:
        try:
            out.append(Fraction(token))
        except (ValueError, ZeroDivisionError):
            raise CommandError(
                EXIT_INPUT_ERROR, f"malformed number {token!r} in {label}"
            ) from None
    return out


def _require(condition: bool, message: str) -> None:
    if not condition:
        raise CommandError(EXIT_INPUT_ERROR, message)


def _cmd_generate(args: argparse.Namespace) -> int:
    kind = args.kind
    x = _rationals(args.x or [], "--x")
    y = _rationals(args.y or [], "--y")
    supply = _rationals(args.supply or [], "--supply")
    demand = _rationals(args.demand or [], "--demand")

    try:
        if kind == "survey":
            _require(len(args.params) == 2, "survey takes exactly two sizes: m n")
            m, n = (int(p) for p in args.params)
            _require(m >= 1 and n >= 1, "survey sizes must be positive")
            cost = [[abs(i - j) for j in range(n)] for i in range(m)]
            supply = supply or [Fraction(1)] * m
            demand = demand or [Fraction(1)] * n
            instance = new_instance(cost, supply, demand)
        elif kind in ("factored", "sum", "convexdiff"):
            _require(not args.params, f"{kind} takes no positional parameters")
            _require(bool(x) and bool(y), f"{kind} requires --x and --y")
            _require(
                bool(supply) and bool(demand), f"{kind} requires --supply and --demand"
            )
            if kind == "factored":
                cost = factored_cost(x, y)
            elif kind == "sum":
                cost = sum_cost(x, y)
            else:
                cost = convex_diff_cost(x, y, COST_SHAPES[args.f])
            instance = new_instance(cost, supply, demand)
        else:  # problemp
            _require(not args.params, "problemp takes no positional parameters")
            _require(bool(x) and bool(y), "problemp requires --x and --y")
            p_row = _rationals(args.p_row or [], "--p-row")
            p_col = _rationals(args.p_col or [], "--p-col")
            _require(
                bool(p_row) and bool(p_col), "problemp requires --p-row and --p-col"
            )
            spec = ProblemPSpec(tuple(x), tuple(y), tuple(p_row), tuple(p_col), COST_SHAPES[args.f])
            instance = problem_p_instance(spec)
    except ValueError as exc:
        raise CommandError(EXIT_INPUT_ERROR, str(exc)) from exc

    sys.stdout.write(serialize_instance(instance))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="transopt",
        description="Exact solver for balanced transportation and assignment problems.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    solve = sub.add_parser("solve", help="solve an instance file")
    solve.add_argument("file", help="instance file path")
    solve.add_argument(
        "--method",
        required=True,
        choices=("nw", "hungarian", "oracle"),
        help="nw: North West corner rule; hungarian: weighted Hungarian method; "
        "oracle: brute-force enumeration (tiny instances only)",
    )
    solve.add_argument("--trace", action="store_true", help="show each iteration")
    solve.add_argument("--json", action="store_true", help="machine-readable output")
    solve.add_argument(
        "--certificate", action="store_true", help="show duals and verification verdict"
    )
    solve.set_defaults(handler=_cmd_solve)

    monge = sub.add_parser("check-monge", help="test the Monge condition of a cost matrix")
    monge.add_argument("file", help="instance file path")
    monge.add_argument(
        "--mode", choices=("adjacent", "exhaustive"), default="exhaustive"
    )
    monge.set_defaults(handler=_cmd_check_monge)

    generate = sub.add_parser("generate", help="emit a structured instance file")
    generate.add_argument(
        "kind", choices=("survey", "factored", "sum", "convexdiff", "problemp")
    )
    generate.add_argument("params", nargs="*", help="survey: m n")
    generate.add_argument("--x", nargs="+", metavar="V")
    generate.add_argument("--y", nargs="+", metavar="V")
    generate.add_argument("--supply", nargs="+", metavar="V")
    generate.add_argument("--demand", nargs="+", metavar="V")
    generate.add_argument("--p-row", dest="p_row", nargs="+", metavar="P")
    generate.add_argument("--p-col", dest="p_col", nargs="+", metavar="P")
    generate.add_argument("--f", choices=sorted(COST_SHAPES), default="square")
    generate.set_defaults(handler=_cmd_generate)

    return parser


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.handler(args)
    except CommandError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.code


if __name__ == "__main__":
    sys.exit(main())
