"""Multigraph data model with the cut and degree primitives shared by all solvers.

Nodes are dense integer indices 0..n-1.  Edges carry a stable integer id, a
nonnegative rational cost, and an explicit multiplicity (parallel copies of
the same record), so that multi-subgraph reductions scale multiplicities
instead of duplicating records.  Cut sets are bitmasks over the node indices,
which keeps brute-force enumeration over all proper cuts cheap at small n.
"""

from __future__ import annotations

import dataclasses
from fractions import Fraction
from typing import Iterable, Iterator, Mapping, Sequence


class GraphError(ValueError):
    """Malformed graph, cut set, or instance file."""


@dataclasses.dataclass(frozen=True)
class Edge:
    """One edge record: `mult` parallel copies between u and v, each at `cost`."""

    id: int
    u: int
    v: int
    cost: Fraction
    mult: int = 1


class MultiGraph:
    """Immutable undirected multigraph with costed, multiplicity-weighted edges.

    Edge ids are assigned sequentially at construction and never change;
    subsets of edges are represented externally as sets of ids.  Self-loops
    are rejected because they never cross a cut.
    """

    __slots__ = ("n", "edges", "_by_id")

    def __init__(self, n: int, edges: Iterable[Sequence]) -> None:
        if n < 2:
            raise GraphError(f"need at least 2 nodes, got {n}")
        self.n = n
        records = []
        for spec in edges:
            if isinstance(spec, Edge):
                u, v, cost, mult = spec.u, spec.v, spec.cost, spec.mult
            elif len(spec) == 3:
                u, v, cost = spec
                mult = 1
            else:
                u, v, cost, mult = spec
            cost = Fraction(cost)
            if not (0 <= u < n and 0 <= v < n):
                raise GraphError(f"endpoint out of range: ({u}, {v}) with n={n}")
            if u == v:
                raise GraphError(f"self-loop at node {u} rejected")
            if cost < 0:
                raise GraphError(f"negative cost {cost} on edge ({u}, {v})")
            if int(mult) < 1:
                raise GraphError(f"multiplicity must be positive, got {mult}")
            records.append(Edge(len(records), u, v, cost, int(mult)))
        self.edges = tuple(records)
        self._by_id = {e.id: e for e in self.edges}

    @property
    def m(self) -> int:
        """Number of edge records (not counting multiplicity)."""
        return len(self.edges)

    def edge(self, eid: int) -> Edge:
        return self._by_id[eid]

    def edge_ids(self) -> frozenset[int]:
        return frozenset(self._by_id)

    def total_cost(self, chosen: Mapping[int, int]) -> Fraction:
        """Cost of a multiset of edges given as id -> copy count."""
        return sum((self.edge(e).cost * c for e, c in chosen.items()), Fraction(0))

    def scaled(self, factor: int) -> "MultiGraph":
        """Same graph with every multiplicity multiplied by `factor` (ids kept)."""
        if factor < 1:
            raise GraphError(f"scale factor must be positive, got {factor}")
        return MultiGraph(self.n, [(e.u, e.v, e.cost, e.mult * factor) for e in self.edges])

    def expanded(self) -> tuple["MultiGraph", tuple[int, ...]]:
        """Per-copy view: every record becomes `mult` unit records.

        Returns the expanded graph (all multiplicities 1) and a map from the
        new ids back to the originating record ids.
        """
        specs = []
        parents = []
        for e in self.edges:
            for _ in range(e.mult):
                specs.append((e.u, e.v, e.cost, 1))
                parents.append(e.id)
        return MultiGraph(self.n, specs), tuple(parents)

    def __repr__(self) -> str:
        return f"MultiGraph(n={self.n}, m={self.m})"


@dataclasses.dataclass(frozen=True)
class CutSet:
    """A proper nonempty node subset, stored as a bitmask over 0..n-1."""

    n: int
    mask: int

    def __post_init__(self) -> None:
        full = (1 << self.n) - 1
        if self.mask == 0 or self.mask == full:
            raise GraphError("cut set must be a proper nonempty node subset")
        if self.mask < 0 or self.mask > full:
            raise GraphError(f"mask {self.mask:#x} out of range for n={self.n}")

    @classmethod
    def from_nodes(cls, n: int, nodes: Iterable[int]) -> "CutSet":
        mask = 0
        for v in nodes:
            if not 0 <= v < n:
                raise GraphError(f"node {v} out of range for n={n}")
            mask |= 1 << v
        return cls(n, mask)

    def __contains__(self, v: int) -> bool:
        return bool(self.mask >> v & 1)

    def crosses(self, u: int, v: int) -> bool:
        return (self.mask >> u & 1) != (self.mask >> v & 1)

    def complement(self) -> "CutSet":
        return CutSet(self.n, self.mask ^ ((1 << self.n) - 1))

    def members(self) -> tuple[int, ...]:
        return tuple(v for v in range(self.n) if self.mask >> v & 1)

    @property
    def size(self) -> int:
        return self.mask.bit_count()

    @property
    def canonical_mask(self) -> int:
        """Identifies the cut up to complement (smaller of the two masks)."""
        return min(self.mask, self.mask ^ ((1 << self.n) - 1))


def all_proper_cuts(n: int) -> Iterator[CutSet]:
    """Every proper cut of an n-node graph, once per complement pair.

    Yields the side that excludes node n-1, so there are 2^(n-1) - 1 cuts.
    """
    if n < 2:
        raise GraphError(f"need at least 2 nodes, got {n}")
    for mask in range(1, 1 << (n - 1)):
        yield CutSet(n, mask)


def cut_edges(g: MultiGraph, part: Iterable[int], s: CutSet) -> frozenset[int]:
    """Ids of the `part` edges with exactly one endpoint in s.

    The result is complement-symmetric: delta(s) == delta(complement of s).
    """
    if s.n != g.n:
        raise GraphError(f"cut over {s.n} nodes applied to graph with n={g.n}")
    out = []
    for eid in part:
        e = g.edge(eid)
        if s.crosses(e.u, e.v):
            out.append(eid)
    return frozenset(out)


def cut_value(g: MultiGraph, w: Mapping[int, Fraction], s: CutSet) -> Fraction:
    """Weighted mass across the cut: sum of w[e] * mult(e) over crossing edges.

    The weighting's domain selects which edges participate; weights are per
    copy, so records with multiplicity contribute mult-fold.
    """
    if s.n != g.n:
        raise GraphError(f"cut over {s.n} nodes applied to graph with n={g.n}")
    total = Fraction(0)
    for eid, weight in w.items():
        e = g.edge(eid)
        if s.crosses(e.u, e.v):
            total += Fraction(weight) * e.mult
    return total


def edge_connectivity(g: MultiGraph, part: Iterable[int]) -> int:
    """Minimum number of `part` edge copies crossing any proper cut (0 if disconnected)."""
    weight = [[Fraction(0)] * g.n for _ in range(g.n)]
    for eid in part:
        e = g.edge(eid)
        weight[e.u][e.v] += e.mult
        weight[e.v][e.u] += e.mult
    _, value = min_cut_weights(g.n, weight)
    assert value.denominator == 1
    return int(value)


def min_cut_weights(
    n: int,
    weight: list[list[Fraction]],
    groups: Sequence[int] | None = None,
) -> tuple[int, Fraction]:
    """Deterministic Stoer-Wagner global minimum cut on a symmetric weight matrix.

    `groups`, when given, pre-contracts the graph: entry i is the bitmask of
    original nodes represented by supernode i, and `weight` is indexed by
    supernode.  Returns (bitmask of one side in original node indices, value).
    Ties are broken toward the first cut found with lowest-index selection,
    so the result is deterministic for a fixed input.
    """
    if groups is None:
        groups = [1 << v for v in range(n)]
    super_n = len(groups)
    if super_n < 2:
        raise GraphError("minimum cut needs at least 2 supernodes")
    w = [row[:] for row in weight]
    masks = list(groups)
    active = list(range(super_n))
    best_mask = None
    best_value = None
    while len(active) > 1:
        # One minimum-cut phase: repeatedly absorb the most tightly
        # connected remaining vertex; the last vertex added defines the
        # cut of the phase.
        start = active[0]
        in_a = {start}
        conn = {v: w[start][v] for v in active if v != start}
        order = [start]
        while conn:
            nxt = max(sorted(conn), key=lambda v: conn[v])
            order.append(nxt)
            in_a.add(nxt)
            del conn[nxt]
            for v in conn:
                conn[v] += w[nxt][v]
        t = order[-1]
        s = order[-2]
        phase_value = sum(w[t][v] for v in active if v != t)
        if best_value is None or phase_value < best_value:
            best_value = phase_value
            best_mask = masks[t]
        # merge t into s
        for v in active:
            if v not in (s, t):
                w[s][v] += w[t][v]
                w[v][s] += w[v][t]
        masks[s] |= masks[t]
        active.remove(t)
    return best_mask, best_value


# ---------------------------------------------------------------------------
# Instance file format
#
#   c <comment>
#   p kecss <n> <m> <k>
#   e <u> <v> <cost> [mult]
#
# Costs are rationals ("3/2") or decimals ("1.5"), parsed exactly.


def parse_instance(text: str) -> tuple[MultiGraph, int]:
    """Parse an instance file, returning the graph and the header's k."""
    n = m = k = None
    specs = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("c"):
            continue
        fields = line.split()
        if fields[0] == "p":
            if n is not None:
                raise GraphError(f"line {lineno}: duplicate problem line")
            if len(fields) != 5 or fields[1] != "kecss":
                raise GraphError(f"line {lineno}: expected 'p kecss <n> <m> <k>'")
            try:
                n, m, k = int(fields[2]), int(fields[3]), int(fields[4])
            except ValueError as exc:
                raise GraphError(f"line {lineno}: {exc}") from exc
        elif fields[0] == "e":
            if n is None:
                raise GraphError(f"line {lineno}: edge before problem line")
            if len(fields) not in (4, 5):
                raise GraphError(f"line {lineno}: expected 'e <u> <v> <cost> [mult]'")
            try:
                u, v = int(fields[1]), int(fields[2])
                cost = Fraction(fields[3])
                mult = int(fields[4]) if len(fields) == 5 else 1
            except (ValueError, ZeroDivisionError) as exc:
                raise GraphError(f"line {lineno}: {exc}") from exc
            specs.append((u, v, cost, mult))
        else:
            raise GraphError(f"line {lineno}: unknown directive {fields[0]!r}")
    if n is None:
        raise GraphError("missing problem line")
    if len(specs) != m:
        raise GraphError(f"header promises {m} edges, found {len(specs)}")
    if k < 2:
        raise GraphError(f"k must be at least 2, got {k}")
    try:
        g = MultiGraph(n, specs)
    except GraphError as exc:
        raise GraphError(f"bad edge: {exc}") from exc
    return g, k


def format_instance(g: MultiGraph, k: int, comment: str | None = None) -> str:
    lines = []
    if comment:
        for part in comment.splitlines():
            lines.append(f"c {part}")
    lines.append(f"p kecss {g.n} {g.m} {k}")
    for e in g.edges:
        if e.mult == 1:
            lines.append(f"e {e.u} {e.v} {e.cost}")
        else:
            lines.append(f"e {e.u} {e.v} {e.cost} {e.mult}")
    return "\n".join(lines) + "\n"
