"""Separation: find a cut whose demand row is violated by a candidate point.

The search follows a two-phase scheme.  A global minimum cut over mixed
capacities (integral edges at full multiplicity, fractional edges at their
x-value) either witnesses a violation outright, or bounds the range in which
violated cuts can still hide, in which case every cut with capacity below
the demand threshold is listed and filtered exactly.  Listing is exhaustive
up to 16 nodes and falls back to repeated random contraction above that,
with the per-cut miss probability driven below 2^-40.
"""

from __future__ import annotations

import dataclasses
import math
import random
from fractions import Fraction
from typing import Iterable, Mapping

from .cutlp import RelaxMode, residual_demand
from .multigraph import CutSet, GraphError, MultiGraph, all_proper_cuts, min_cut_weights

_EXHAUSTIVE_MAX_N = 16
_MISS_EXPONENT = 40  # contraction repeats until per-cut miss prob <= 2^-40
_RATIO_SLACK = Fraction(5, 2)


@dataclasses.dataclass(frozen=True)
class CapacitatedInstance:
    """A graph with nonnegative rational edge capacities (per copy)."""

    graph: MultiGraph
    capacities: Mapping[int, Fraction]

    def __post_init__(self) -> None:
        for eid, cap in self.capacities.items():
            if eid not in self.graph.edge_ids():
                raise GraphError(f"capacity for unknown edge id {eid}")
            if cap < 0:
                raise GraphError(f"negative capacity {cap} on edge {eid}")

    def weight_matrix(self) -> list[list[Fraction]]:
        n = self.graph.n
        w = [[Fraction(0)] * n for _ in range(n)]
        for eid, cap in self.capacities.items():
            e = self.graph.edge(eid)
            total = Fraction(cap) * e.mult
            w[e.u][e.v] += total
            w[e.v][e.u] += total
        return w

    def cut_capacity(self, s: CutSet) -> Fraction:
        total = Fraction(0)
        for eid, cap in self.capacities.items():
            e = self.graph.edge(eid)
            if s.crosses(e.u, e.v):
                total += Fraction(cap) * e.mult
        return total


@dataclasses.dataclass(frozen=True)
class ViolatedCut:
    """A cut whose LP row is strictly violated: fractional mass < demand."""

    cut: CutSet
    lhs: Fraction
    demand: int

    def __post_init__(self) -> None:
        if self.lhs >= self.demand:
            raise GraphError(f"not a violation: {self.lhs} >= {self.demand}")

    @property
    def violation(self) -> Fraction:
        return self.demand - self.lhs


def global_min_cut(inst: CapacitatedInstance) -> tuple[CutSet, Fraction]:
    """Deterministic global minimum cut (Stoer-Wagner over exact rationals)."""
    mask, value = min_cut_weights(inst.graph.n, inst.weight_matrix())
    return CutSet(inst.graph.n, mask), value


def enumerate_cuts_below(
    inst: CapacitatedInstance,
    bound: Fraction,
    rng: random.Random | None = None,
) -> list[tuple[CutSet, Fraction]]:
    """Every proper cut with capacity strictly below `bound`, once per complement.

    Callers must keep bound / mincut at most 2 plus slack (violated-cut
    search never needs more); a larger ratio is rejected as a caller bug.
    Results are sorted by (capacity, canonical mask) and exact.
    """
    bound = Fraction(bound)
    n = inst.graph.n
    _, mincut = global_min_cut(inst)
    if mincut > 0 and bound > _RATIO_SLACK * mincut:
        raise ValueError(
            f"enumeration bound {bound} exceeds {_RATIO_SLACK} * mincut {mincut}"
        )
    if n <= _EXHAUSTIVE_MAX_N:
        found = []
        for cut in all_proper_cuts(n):
            value = inst.cut_capacity(cut)
            if value < bound:
                found.append((cut, value))
        found.sort(key=lambda cv: (cv[1], cv[0].canonical_mask))
        return found
    if mincut <= 0:
        raise ValueError("randomized enumeration requires a connected capacity graph")
    return _contraction_enumerate(inst, bound, mincut, rng or random.Random(0))


def _contraction_enumerate(
    inst: CapacitatedInstance,
    bound: Fraction,
    mincut: Fraction,
    rng: random.Random,
) -> list[tuple[CutSet, Fraction]]:
    n = inst.graph.n
    alpha = bound / mincut
    target = max(2, math.floor(2 * alpha) + 1)
    # survival probability of one fixed near-minimum cut through a single
    # contraction down to `target` supernodes
    survive = Fraction(1)
    for j in range(target + 1, n + 1):
        survive *= 1 - 2 * alpha / j
    if survive <= 0:
        raise AssertionError("contraction target too small for the ratio")
    trials = math.ceil(_MISS_EXPONENT * math.log(2) / -math.log1p(-float(survive))) + 1

    base_edges = [
        (e.u, e.v, float(cap) * e.mult)
        for eid, cap in inst.capacities.items()
        if cap > 0
        for e in [inst.graph.edge(eid)]
    ]
    found: dict[int, tuple[CutSet, Fraction]] = {}
    for _ in range(trials):
        groups = _contract_once(n, base_edges, target, rng)
        if len(groups) < 2:
            continue
        for split in range(1, 1 << (len(groups) - 1)):
            mask = 0
            for gi in range(len(groups)):
                if split >> gi & 1:
                    mask |= groups[gi]
            cut = CutSet(n, mask)
            if cut.canonical_mask in found:
                continue
            value = inst.cut_capacity(cut)
            if value < bound:
                found[cut.canonical_mask] = (cut, value)
    out = sorted(found.values(), key=lambda cv: (cv[1], cv[0].canonical_mask))
    return out


def _contract_once(
    n: int,
    edges: list[tuple[int, int, float]],
    target: int,
    rng: random.Random,
) -> list[int]:
    parent = list(range(n))

    def find(x: int) -> int:
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    alive = n
    work = list(edges)
    while alive > target and work:
        total = sum(w for _, _, w in work)
        if total <= 0:
            break
        pick = rng.random() * total
        acc = 0.0
        chosen = work[-1]
        for item in work:
            acc += item[2]
            if pick <= acc:
                chosen = item
                break
        ru, rv = find(chosen[0]), find(chosen[1])
        if ru != rv:
            parent[ru] = rv
            alive -= 1
        work = [(u, v, w) for (u, v, w) in work if find(u) != find(v)]
    masks: dict[int, int] = {}
    for v in range(n):
        masks.setdefault(find(v), 0)
        masks[find(v)] |= 1 << v
    return list(masks.values())


def _component_masks(n: int, pairs: Iterable[tuple[int, int]]) -> list[int]:
    parent = list(range(n))

    def find(x: int) -> int:
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for u, v in pairs:
        ru, rv = find(u), find(v)
        if ru != rv:
            parent[ru] = rv
    masks: dict[int, int] = {}
    for v in range(n):
        masks.setdefault(find(v), 0)
        masks[find(v)] |= 1 << v
    return list(masks.values())


def find_violated_cuts(
    graph: MultiGraph,
    x: Mapping[int, Fraction],
    integral: Iterable[int],
    k: int,
    mode: RelaxMode,
    rng: random.Random | None = None,
) -> list[ViolatedCut]:
    """All violated cut rows found in one separation pass, most violated first.

    Returns an empty list iff the point is feasible for every cut of the
    current demand function.  Every candidate from the search phases is
    re-derived through residual_demand before being reported, so cuts whose
    (possibly relaxed) demand is already met are skipped.
    """
    if mode is RelaxMode.EVEN:
        d_max = k - 3
    elif mode is RelaxMode.HALF:
        d_max = k - 2
    else:
        raise GraphError("separation needs a relaxing demand mode")
    integral = frozenset(integral)
    frac = {e: Fraction(v) for e, v in x.items()}

    if d_max < 0:
        return []

    candidates: list[CutSet] = []
    n = graph.n
    if d_max == 0:
        # only cuts with no integral edge can be violated: contract the
        # components of the integral subgraph and min-cut the rest
        groups = _component_masks(
            n, [(graph.edge(e).u, graph.edge(e).v) for e in integral]
        )
        if len(groups) >= 2:
            w = [[Fraction(0)] * len(groups) for _ in range(len(groups))]
            gidx = {}
            for gi, gm in enumerate(groups):
                for v in range(n):
                    if gm >> v & 1:
                        gidx[v] = gi
            for e, val in frac.items():
                edge = graph.edge(e)
                gu, gv = gidx[edge.u], gidx[edge.v]
                if gu != gv:
                    w[gu][gv] += Fraction(val) * edge.mult
                    w[gv][gu] += Fraction(val) * edge.mult
            mask, value = min_cut_weights(n, w, groups)
            if value < k:
                candidates.append(CutSet(n, mask))
    else:
        mixed = CapacitatedInstance(
            graph,
            {e: Fraction(1) for e in integral} | frac,
        )
        lam_cut, lam = global_min_cut(mixed)
        if lam >= k:
            return []
        threshold = d_max + 1
        if lam == 0:
            comp = [
                m
                for m in _component_masks(
                    n,
                    [
                        (graph.edge(e).u, graph.edge(e).v)
                        for e, cap in mixed.capacities.items()
                        if cap > 0
                    ],
                )
            ]
            seen = set()
            for m in comp:
                cut = CutSet(n, m)
                if cut.canonical_mask not in seen:
                    seen.add(cut.canonical_mask)
                    candidates.append(cut)
        elif lam < threshold:
            bound = min(Fraction(k), 2 * lam)
            candidates = [c for c, _ in enumerate_cuts_below(mixed, bound, rng)]
        else:
            candidates = [c for c, _ in enumerate_cuts_below(mixed, Fraction(k), rng)]

    violated = []
    seen_masks = set()
    for cut in candidates:
        if cut.canonical_mask in seen_masks:
            continue
        seen_masks.add(cut.canonical_mask)
        demand = residual_demand(graph, cut, integral, k, mode)
        if demand <= 0:
            continue
        lhs = Fraction(0)
        for e, val in frac.items():
            edge = graph.edge(e)
            if cut.crosses(edge.u, edge.v):
                lhs += Fraction(val) * edge.mult
        if lhs < demand:
            violated.append(ViolatedCut(cut, lhs, demand))
    violated.sort(key=lambda vc: (-vc.violation, vc.cut.canonical_mask))
    return violated


def find_violated_cut(
    graph: MultiGraph,
    x: Mapping[int, Fraction],
    integral: Iterable[int],
    k: int,
    mode: RelaxMode,
    rng: random.Random | None = None,
) -> ViolatedCut | None:
    """Most violated cut row, or None when x satisfies every cut constraint."""
    found = find_violated_cuts(graph, x, integral, k, mode, rng)
    return found[0] if found else None
