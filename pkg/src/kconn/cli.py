"""Command-line front end: solve instances, verify reports, generate inputs.

Exit codes are part of the contract so sweeps can be scripted:
0 success, 2 infeasible instance, 3 parse error, 4 internal assertion
(a proven invariant failed), 5 requested oracle out of its size domain,
1 verification found a broken guarantee, 64 bad usage.
"""

from __future__ import annotations

import argparse
import json
import math
import random
import sys
from fractions import Fraction
from pathlib import Path

from .multigraph import (
    GraphError,
    MultiGraph,
    edge_connectivity,
    format_instance,
    min_cut_weights,
    parse_instance,
)
from .simplex import LpInfeasible
from .solver import (
    InstanceInfeasible,
    RunReport,
    SolverInternalError,
    solve,
    solve_ecsm,
    solve_three_halves,
)
from .verify import OracleDomainError, full_cut_lp

EXIT_OK = 0
EXIT_CHECK_FAILED = 1
EXIT_INFEASIBLE = 2
EXIT_PARSE = 3
EXIT_INTERNAL = 4
EXIT_ORACLE_DOMAIN = 5
EXIT_USAGE = 64

_ALGORITHMS = {
    "bicriteria": solve,
    "three-halves": solve_three_halves,
    "ecsm": solve_ecsm,
}


class _Parser(argparse.ArgumentParser):
    # argparse's default usage-error exit code (2) would collide with the
    # "infeasible instance" code in the contract
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


def generate_instance(
    n: int,
    m: int,
    k: int,
    cost_lo: int = 1,
    cost_hi: int = 10,
    seed: int = 0,
    max_tries: int = 200,
) -> MultiGraph:
    """Random k-edge-connected multigraph, deterministic per seed.

    Seeds the edge set with floor(k/2) random closed tours (each tour
    contributes 2 to every cut) when they fit in the edge budget, pads with
    uniform random pairs, and retries until connectivity certifies.
    """
    if n < 2 or k < 2:
        raise ValueError("need n >= 2 and k >= 2")
    if cost_lo < 0 or cost_lo > cost_hi:
        raise ValueError(f"bad cost range [{cost_lo}, {cost_hi}]")
    if m < math.ceil(n * k / 2):
        raise ValueError(f"m={m} cannot reach min degree {k} on {n} nodes")
    rng = random.Random(seed)
    for _ in range(max_tries):
        pairs: list[tuple[int, int]] = []
        while len(pairs) + n <= m and len(pairs) < (k // 2) * n:
            tour = list(range(n))
            rng.shuffle(tour)
            pairs.extend((tour[i], tour[(i + 1) % n]) for i in range(n))
        while len(pairs) < m:
            u = rng.randrange(n)
            v = rng.randrange(n)
            if u != v:
                pairs.append((u, v))
        specs = []
        for u, v in pairs:
            den = rng.choice((1, 2, 3, 4))
            num = rng.randint(cost_lo * den, cost_hi * den)
            specs.append((u, v, Fraction(num, den)))
        g = MultiGraph(n, specs)
        if edge_connectivity(g, g.edge_ids()) >= k:
            return g
    raise ValueError(
        f"could not generate a {k}-edge-connected instance with n={n}, m={m} "
        f"after {max_tries} attempts"
    )


def _write_text(path: str, text: str) -> None:
    if path == "-":
        sys.stdout.write(text)
    else:
        Path(path).write_text(text)


def _load_instance(path: str) -> tuple[MultiGraph, int]:
    return parse_instance(Path(path).read_text())


def cmd_solve(args) -> int:
    g, header_k = _load_instance(args.instance)
    k = args.k if args.k is not None else header_k
    report = _ALGORITHMS[args.algorithm](
        g, k, seed=args.seed, oracle_checks=args.oracle_checks
    )
    _write_text(args.out, report.dumps())
    return EXIT_OK


def _multiset_connectivity(g: MultiGraph, counts: dict[int, int]) -> int:
    weight = [[Fraction(0)] * g.n for _ in range(g.n)]
    for eid, c in counts.items():
        e = g.edge(eid)
        weight[e.u][e.v] += c
        weight[e.v][e.u] += c
    _, value = min_cut_weights(g.n, weight)
    return int(value)


def cmd_verify(args) -> int:
    g, _ = _load_instance(args.instance)
    report = RunReport.loads(Path(args.report).read_text())
    failures: list[str] = []

    k = report.k
    if report.algorithm == "ecsm":
        p = 2 if k % 2 == 0 else 3
        run_graph = g.scaled(k + p)
        expected_k_eff = k + p
        expected_factor = 1 + Fraction(p, k)
        expected_bound = k + p - 2
    elif k % 2 == 0 or report.algorithm == "three-halves":
        run_graph = g
        if report.algorithm == "three-halves":
            expected_k_eff = k
            expected_factor = Fraction(3, 2)
            expected_bound = k - 1
        else:
            expected_k_eff = k
            expected_factor = Fraction(1)
            expected_bound = max(0, k - 2)
    else:
        run_graph = g
        expected_k_eff = k - 1
        expected_factor = Fraction(k - 1, k)
        expected_bound = max(0, k - 3)

    if report.k_effective != expected_k_eff:
        failures.append(f"k_effective {report.k_effective} != {expected_k_eff}")
    if report.cost_factor_bound != expected_factor:
        failures.append(f"declared factor {report.cost_factor_bound} != {expected_factor}")
    if report.connectivity_bound != expected_bound:
        failures.append(f"declared bound {report.connectivity_bound} != {expected_bound}")

    counts = report.chosen_counts()
    cost = Fraction(0)
    for entry in report.edges:
        try:
            rec = run_graph.edge(entry["id"])
        except KeyError:
            failures.append(f"unknown edge id {entry['id']}")
            continue
        if (rec.u, rec.v) != (entry["u"], entry["v"]) or rec.cost != entry["cost"]:
            failures.append(f"edge {entry['id']} does not match the instance")
        if not 0 < entry["count"] <= rec.mult:
            failures.append(f"edge {entry['id']} count {entry['count']} out of range")
        cost += rec.cost * entry["count"]
    if cost != report.cost:
        failures.append(f"recomputed cost {cost} != reported {report.cost}")

    connectivity = _multiset_connectivity(run_graph, counts) if counts else 0
    if connectivity != report.connectivity:
        failures.append(
            f"recomputed connectivity {connectivity} != reported {report.connectivity}"
        )
    if connectivity < expected_bound:
        failures.append(f"connectivity {connectivity} below guarantee {expected_bound}")

    # oracle side: re-derive every LP yardstick from scratch
    tau_run = full_cut_lp(run_graph, expected_k_eff, bounded=True).value
    if tau_run != report.tau:
        failures.append(f"cut-LP value {tau_run} != reported tau {report.tau}")
    if report.algorithm == "ecsm":
        yardstick = full_cut_lp(g, k, bounded=False).value
    else:
        yardstick = full_cut_lp(g, k, bounded=True).value
    if cost > expected_factor * yardstick:
        failures.append(
            f"cost {cost} exceeds {expected_factor} * cut-LP optimum {yardstick}"
        )

    if failures:
        for f in failures:
            print(f"FAIL: {f}")
        return EXIT_CHECK_FAILED
    print(
        f"OK: cost {cost} <= {expected_factor} * {yardstick}, "
        f"connectivity {connectivity} >= {expected_bound}"
    )
    return EXIT_OK


def cmd_gen(args) -> int:
    try:
        lo, hi = (int(part) for part in args.cost_range.split(":"))
    except ValueError as exc:
        raise GraphError(f"bad cost range {args.cost_range!r}: expected LO:HI") from exc
    try:
        g = generate_instance(args.n, args.m, args.k, lo, hi, args.seed)
    except ValueError as exc:
        print(f"generation failed: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE
    _write_text(args.out, format_instance(g, args.k, comment=f"seed {args.seed}"))
    return EXIT_OK


def cmd_lp_value(args) -> int:
    g, header_k = _load_instance(args.instance)
    k = args.k if args.k is not None else header_k
    result = full_cut_lp(g, k, bounded=not args.unbounded)
    v = result.value
    print(f"{v.numerator}/{v.denominator} (= {float(v)})")
    return EXIT_OK


def _build_parser() -> _Parser:
    parser = _Parser(prog="kconn", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p_solve = sub.add_parser("solve", help="run a solver and write a JSON report")
    p_solve.add_argument("instance")
    p_solve.add_argument("--k", type=int, default=None, help="override the header k")
    p_solve.add_argument(
        "--algorithm", choices=sorted(_ALGORITHMS), default="bicriteria"
    )
    p_solve.add_argument("--seed", type=int, default=0)
    p_solve.add_argument(
        "--oracle-checks",
        action="store_true",
        help="re-derive LP yardsticks with the brute-force oracle",
    )
    p_solve.add_argument("--out", default="-")
    p_solve.set_defaults(handler=cmd_solve)

    p_verify = sub.add_parser("verify", help="re-check a report against its instance")
    p_verify.add_argument("instance")
    p_verify.add_argument("report")
    p_verify.set_defaults(handler=cmd_verify)

    p_gen = sub.add_parser("gen", help="generate a random k-edge-connected instance")
    p_gen.add_argument("--n", type=int, required=True)
    p_gen.add_argument("--m", type=int, required=True)
    p_gen.add_argument("--k", type=int, required=True)
    p_gen.add_argument("--cost-range", default="1:10", metavar="LO:HI")
    p_gen.add_argument("--seed", type=int, default=0)
    p_gen.add_argument("--out", default="-")
    p_gen.set_defaults(handler=cmd_gen)

    p_lp = sub.add_parser("lp-value", help="exact cut-LP optimum of an instance")
    p_lp.add_argument("instance")
    p_lp.add_argument("--k", type=int, default=None)
    p_lp.add_argument(
        "--unbounded", action="store_true", help="multi-subgraph LP (no upper bounds)"
    )
    p_lp.set_defaults(handler=cmd_lp_value)
    return parser


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if exc.code is not None else EXIT_USAGE
    try:
        return args.handler(args)
    except (GraphError, OSError, json.JSONDecodeError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except InstanceInfeasible as exc:
        print(f"infeasible instance: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE
    except LpInfeasible as exc:
        print(f"infeasible instance: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE
    except OracleDomainError as exc:
        print(f"uncertified: {exc}", file=sys.stderr)
        return EXIT_ORACLE_DOMAIN
    except (SolverInternalError, AssertionError) as exc:
        print(f"internal assertion failed: {exc}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
