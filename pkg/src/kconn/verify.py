"""Independent ground-truth oracles for the acceptance and guarantee checks.

`full_cut_lp` computes the exact cut-LP optimum with every one of the
2^(n-1)-1 cut rows enforced; the returned value carries a self-contained
certificate (the witness point is re-checked against all cuts, and the final
basis is certified optimal through exact duals), so the answer does not rely
on the path that produced it.  `exact_optimum` is a brute-force branch and
bound over edge subsets or copy counts.  Both refuse instances outside their
stated size domain instead of degrading.
"""

from __future__ import annotations

import dataclasses
from fractions import Fraction
from typing import Mapping

from .cutlp import LpRow
from .multigraph import CutSet, GraphError, MultiGraph, all_proper_cuts, edge_connectivity, min_cut_weights
from .simplex import solve_extreme, verify_optimal, verify_vertex

FULL_LP_MAX_N = 16
SUBSET_MAX_EDGES = 24
MULTI_MAX_N = 6

_ROWS_PER_PASS = 64


class OracleDomainError(Exception):
    """Instance is too large for the requested brute-force oracle."""


@dataclasses.dataclass(frozen=True)
class OracleResult:
    value: Fraction
    witness: object
    method: str


@dataclasses.dataclass
class _OracleLp:
    """LP over one aggregate variable per edge record (copies summed)."""

    graph: MultiGraph
    variables: tuple[int, ...]
    costs: dict[int, Fraction]
    rows: list[LpRow]
    bounds: dict[int, Fraction]

    def upper(self, eid: int) -> Fraction:
        return self.bounds[eid]


def full_cut_lp(g: MultiGraph, k: int, bounded: bool = True) -> OracleResult:
    """Exact optimum of the cut LP with all proper-cut rows at demand k.

    bounded=True caps each record at its multiplicity (the spanning-subgraph
    LP); bounded=False is the multi-subgraph LP, solved with the harmless
    cap of k copies per unit of multiplicity (an optimal solution never
    buys more than k copies of any edge).
    """
    if k < 1:
        raise GraphError(f"k must be positive, got {k}")
    if g.n > FULL_LP_MAX_N:
        raise OracleDomainError(f"full cut LP limited to n <= {FULL_LP_MAX_N}, got {g.n}")
    variables = tuple(e.id for e in g.edges)
    bounds = {
        e.id: Fraction(e.mult) if bounded else Fraction(k * e.mult) for e in g.edges
    }
    lp = _OracleLp(
        graph=g,
        variables=variables,
        costs={e.id: Fraction(e.cost) for e in g.edges},
        rows=[],
        bounds=bounds,
    )
    for v in range(g.n):
        lp.rows.append(LpRow(CutSet(g.n, 1 << v), k))
    present = {row.cut.canonical_mask for row in lp.rows}
    endpoints = [(e.id, e.u, e.v) for e in g.edges]

    while True:
        pt = solve_extreme(lp)
        violated = []
        for cut in all_proper_cuts(g.n):
            if cut.canonical_mask in present:
                continue
            mass = Fraction(0)
            for eid, u, v in endpoints:
                if cut.crosses(u, v):
                    mass += pt.values[eid]
            if mass < k:
                violated.append((k - mass, cut))
        if not violated:
            break
        violated.sort(key=lambda t: (-t[0], t[1].canonical_mask))
        for _, cut in violated[:_ROWS_PER_PASS]:
            lp.rows.append(LpRow(cut, k))
            present.add(cut.canonical_mask)

    if not (verify_vertex(lp, pt) and verify_optimal(lp, pt)):
        raise AssertionError("cut LP optimum failed its own certificate")
    witness = {eid: pt.values[eid] for eid in variables}
    return OracleResult(pt.objective_value, witness, "full-lp")


def certify_connectivity(g: MultiGraph, part, k: int) -> tuple[bool, CutSet | None]:
    """True iff the chosen edges are k-edge-connected; else a deficient cut."""
    weight = [[Fraction(0)] * g.n for _ in range(g.n)]
    if isinstance(part, Mapping):
        items = part.items()
    else:
        items = ((eid, g.edge(eid).mult) for eid in part)
    for eid, copies in items:
        e = g.edge(eid)
        weight[e.u][e.v] += copies
        weight[e.v][e.u] += copies
    mask, value = min_cut_weights(g.n, weight)
    if value >= k:
        return True, None
    return False, CutSet(g.n, mask)


def exact_optimum(g: MultiGraph, k: int, multi: bool = False) -> OracleResult:
    """Brute-force exact optimum of the k-connectivity problem.

    multi=False: min-cost edge subset (per copy) that is k-edge-connected;
    domain |E| <= 24 counting multiplicity.  multi=True: min-cost copy
    multiset (any edge repeatable); domain n <= 6.
    """
    if multi:
        return _exact_multi(g, k)
    return _exact_subset(g, k)


def _exact_subset(g: MultiGraph, k: int) -> OracleResult:
    exp, parents = g.expanded()
    if exp.m > SUBSET_MAX_EDGES:
        raise OracleDomainError(
            f"subset enumeration limited to {SUBSET_MAX_EDGES} edge copies, got {exp.m}"
        )
    all_ids = list(range(exp.m))
    if edge_connectivity(exp, all_ids) < k:
        raise GraphError(f"instance has no {k}-edge-connected spanning subgraph")

    # greedy incumbent: cheapest prefix that reaches connectivity k
    asc = sorted(all_ids, key=lambda e: (exp.edge(e).cost, e))
    chosen: list[int] = []
    for eid in asc:
        chosen.append(eid)
        if edge_connectivity(exp, chosen) >= k:
            break
    best_cost = sum((exp.edge(e).cost for e in chosen), Fraction(0))
    best_set = set(chosen)

    order = sorted(all_ids, key=lambda e: (-exp.edge(e).cost, e))
    excluded: set[int] = set()
    included: set[int] = set()

    def recurse(idx: int, inc_cost: Fraction) -> None:
        nonlocal best_cost, best_set
        if inc_cost >= best_cost:
            return
        if idx == len(order):
            best_cost = inc_cost
            best_set = set(included)
            return
        eid = order[idx]
        excluded.add(eid)
        if edge_connectivity(exp, [e for e in all_ids if e not in excluded]) >= k:
            recurse(idx + 1, inc_cost)
        excluded.discard(eid)
        included.add(eid)
        recurse(idx + 1, inc_cost + exp.edge(eid).cost)
        included.discard(eid)

    recurse(0, Fraction(0))
    witness: dict[int, int] = {}
    for eid in best_set:
        rec = parents[eid]
        witness[rec] = witness.get(rec, 0) + 1
    return OracleResult(best_cost, witness, "subset-enum")


def _exact_multi(g: MultiGraph, k: int) -> OracleResult:
    if g.n > MULTI_MAX_N:
        raise OracleDomainError(f"multiset search limited to n <= {MULTI_MAX_N}, got {g.n}")
    if edge_connectivity(g, [e.id for e in g.edges]) < 1:
        raise GraphError("instance is disconnected; no k-edge-connected multiset exists")

    cuts = list(all_proper_cuts(g.n))
    crossing = []  # per record: indices of cuts it crosses
    for e in g.edges:
        crossing.append(tuple(ci for ci, c in enumerate(cuts) if c.crosses(e.u, e.v)))
    records = sorted(range(g.m), key=lambda r: (g.edges[r].cost, r))

    # incumbent: k copies of every edge of a minimum spanning tree
    parent = list(range(g.n))

    def find(x: int) -> int:
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    tree_cost = Fraction(0)
    incumbent: dict[int, int] = {}
    for r in records:
        e = g.edges[r]
        if find(e.u) != find(e.v):
            parent[find(e.u)] = find(e.v)
            tree_cost += e.cost
            incumbent[e.id] = k
    best_cost = k * tree_cost
    best_counts = dict(incumbent)

    per_cut_records: list[list[int]] = [[] for _ in cuts]
    for pos, r in enumerate(records):
        for ci in crossing[r]:
            per_cut_records[ci].append(pos)

    needs = [k] * len(cuts)
    counts = [0] * g.m

    def fill_lower_bound(pos: int) -> Fraction:
        # cheapest conceivable completion: fill the most demanding cut with
        # its cheapest undecided records, k copies each
        worst = Fraction(0)
        for ci, need in enumerate(needs):
            if need <= 0:
                continue
            remaining = need
            acc = Fraction(0)
            for p in per_cut_records[ci]:
                if p < pos:
                    continue
                take = min(k, remaining)
                acc += take * g.edges[records[p]].cost
                remaining -= take
                if remaining == 0:
                    break
            if remaining > 0:
                return Fraction(-1)  # infeasible from here
            if acc > worst:
                worst = acc
        return worst

    def recurse(pos: int, cost_so_far: Fraction) -> None:
        nonlocal best_cost, best_counts
        if cost_so_far >= best_cost:
            return
        if all(n <= 0 for n in needs):
            best_cost = cost_so_far
            best_counts = {
                g.edges[records[p]].id: counts[p] for p in range(g.m) if counts[p] > 0
            }
            return
        if pos == g.m:
            return
        lb = fill_lower_bound(pos)
        if lb < 0 or cost_so_far + lb >= best_cost:
            return
        r = records[pos]
        cap = 0
        for ci in crossing[r]:
            if needs[ci] > cap:
                cap = needs[ci]
        cap = min(cap, k)
        for take in range(cap, -1, -1):
            if take:
                for ci in crossing[r]:
                    needs[ci] -= take
            counts[pos] = take
            recurse(pos + 1, cost_so_far + take * g.edges[r].cost)
            counts[pos] = 0
            if take:
                for ci in crossing[r]:
                    needs[ci] += take
    recurse(0, Fraction(0))
    return OracleResult(best_cost, best_counts, "multiset-enum")
