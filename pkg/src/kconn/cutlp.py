"""Residual cut demands and the working LP maintained by the solvers.

A cut's demand starts at k minus the integral edges already crossing it and
is relaxed (by 2 in EVEN mode once k-2 integral edges cross, by 1 in HALF
mode once k-1 do).  Demands that reach 0 drop the constraint entirely, which
is what makes the iteration terminate.  Rows are kept across iterations and
refreshed in place because tight cuts tend to recur.
"""

from __future__ import annotations

import dataclasses
import enum
from fractions import Fraction
from typing import Iterable, Mapping

from .multigraph import CutSet, GraphError, MultiGraph, all_proper_cuts, cut_value


class RelaxMode(enum.Enum):
    PLAIN = "plain"  # unrelaxed residual k - d_I
    EVEN = "even-relax"  # drop 2 once d_I >= k - 2 (even k only)
    HALF = "half-relax"  # drop 1 once d_I >= k - 1 (any k)


def _integral_degree(g: MultiGraph, s: CutSet, integral: Iterable[int]) -> int:
    d = cut_value(g, {eid: Fraction(1) for eid in integral}, s)
    assert d.denominator == 1
    return int(d)


def is_relaxed(g: MultiGraph, s: CutSet, integral: Iterable[int], k: int, mode: RelaxMode) -> bool:
    """Whether the cut has accumulated enough integral edges to be relaxed."""
    if mode is RelaxMode.PLAIN:
        raise GraphError("plain mode has no relaxation threshold")
    d = _integral_degree(g, s, integral)
    threshold = k - 2 if mode is RelaxMode.EVEN else k - 1
    return d >= threshold


def residual_demand(
    g: MultiGraph, s: CutSet, integral: Iterable[int], k: int, mode: RelaxMode
) -> int:
    """Remaining requirement on the cut; values <= 0 mean the row is dropped."""
    d = _integral_degree(g, s, integral)
    demand = k - d
    if mode is RelaxMode.EVEN and d >= k - 2:
        demand -= 2
    elif mode is RelaxMode.HALF and d >= k - 1:
        demand -= 1
    return demand


@dataclasses.dataclass(frozen=True)
class LpRow:
    cut: CutSet
    rhs: int


@dataclasses.dataclass
class WorkingLp:
    """Cut rows over the fractional variables, with [0, 1] bounds per copy.

    `variables` are the current fractional edge ids (of an expanded,
    multiplicity-1 graph); every stored row's rhs equals the residual demand
    of its cut for the integral set it was last refreshed against, and rows
    with nonpositive rhs are never stored.
    """

    graph: MultiGraph
    k: int
    mode: RelaxMode
    variables: tuple[int, ...]
    costs: dict[int, Fraction]
    rows: list[LpRow]

    def upper(self, eid: int) -> Fraction:
        return Fraction(1)

    def row_cut_masks(self) -> set[int]:
        return {row.cut.canonical_mask for row in self.rows}

    @classmethod
    def initial(
        cls,
        graph: MultiGraph,
        k: int,
        mode: RelaxMode,
        fractional: Iterable[int],
        costs: Mapping[int, Fraction],
        integral: Iterable[int] = (),
    ) -> "WorkingLp":
        """Fresh LP seeded with the singleton (node degree) cuts."""
        variables = tuple(sorted(fractional))
        lp = cls(
            graph=graph,
            k=k,
            mode=mode,
            variables=variables,
            costs={e: Fraction(costs[e]) for e in variables},
            rows=[],
        )
        integral = set(integral)
        seen = set()
        for v in range(graph.n):
            cut = CutSet(graph.n, 1 << v)
            if cut.canonical_mask in seen:
                continue
            seen.add(cut.canonical_mask)
            rhs = residual_demand(graph, cut, integral, k, mode)
            if rhs > 0:
                lp.rows.append(LpRow(cut, rhs))
        return lp

    def add_cuts(self, cuts: Iterable[CutSet], integral: Iterable[int]) -> int:
        """Add rows for new cuts at their current residual demand; returns count added."""
        integral = set(integral)
        present = self.row_cut_masks()
        added = 0
        for cut in cuts:
            if cut.canonical_mask in present:
                continue
            rhs = residual_demand(self.graph, cut, integral, self.k, self.mode)
            if rhs <= 0:
                continue
            self.rows.append(LpRow(cut, rhs))
            present.add(cut.canonical_mask)
            added += 1
        return added


def refresh_rows(lp: WorkingLp, integral: Iterable[int], fractional: Iterable[int]) -> WorkingLp:
    """Rebuild the LP for new integral/fractional sets.

    Every surviving row's rhs is recomputed from scratch against the current
    integral set; rows whose demand dropped to 0 are deleted, as are
    variables that left the fractional set.
    """
    integral = set(integral)
    variables = tuple(sorted(fractional))
    var_set = set(variables)
    rows = []
    seen = set()
    for row in lp.rows:
        if row.cut.canonical_mask in seen:
            continue
        seen.add(row.cut.canonical_mask)
        rhs = residual_demand(lp.graph, row.cut, integral, lp.k, lp.mode)
        if rhs <= 0:
            continue
        rows.append(LpRow(row.cut, rhs))
    return WorkingLp(
        graph=lp.graph,
        k=lp.k,
        mode=lp.mode,
        variables=variables,
        costs={e: c for e, c in lp.costs.items() if e in var_set},
        rows=rows,
    )
