"""Exact extreme-point solving for the cut-demand LPs.

The LP class handled here is: minimize a nonnegative cost vector over
variables with box bounds [0, u_e], subject to covering rows "sum of chosen
variables >= rhs" whose coefficients are all 1.  Every row is satisfiable at
the all-upper point or the LP is infeasible, so no artificial phase is ever
needed and infeasibility always comes with a witness row.

Solving is a two-stage pipeline.  A floating-point bounded-variable simplex
(Bland's rule, lowest-index tie-breaking) proposes an optimal basis; the
basis is then re-solved and certified in exact rational arithmetic:
feasibility of every row, unique solvability of the active system (which is
what makes the point a vertex), and dual sign conditions for optimality.  If
any certificate fails, the same simplex runs again entirely over Fractions,
which is slow but unconditional.  Callers only ever see exact rationals.
"""

from __future__ import annotations

import dataclasses
from fractions import Fraction
from typing import Mapping, Sequence

import numpy as np

_AT_LOWER, _AT_UPPER, _BASIC = 0, 1, 2

_FLOAT_TOL = 1e-9
_PIVOT_TOL = 1e-8


class LpInfeasible(Exception):
    """The LP has no feasible point; carries the witness row.

    For cut LPs this means some cut cannot meet its demand even with every
    remaining edge bought fully, i.e. the instance is not sufficiently
    edge-connected.
    """

    def __init__(self, cut, demand, capacity) -> None:
        super().__init__(f"cut demand {demand} exceeds available capacity {capacity}")
        self.cut = cut
        self.demand = demand
        self.capacity = capacity


class _Stall(Exception):
    """Float pivoting hit an iteration cap or an unusable pivot."""


BasisEntry = tuple[str, int]  # ("row", row_index) | ("lo"|"hi", edge_id)


@dataclasses.dataclass(frozen=True)
class ExtremePoint:
    """A certified vertex of the working LP.

    `basis` lists exactly |variables| active constraints (tight rows and
    variable bounds) whose incidence vectors are linearly independent; the
    point is the unique solution of that system.
    """

    values: Mapping[int, Fraction]
    basis: tuple[BasisEntry, ...]
    objective_value: Fraction

    def serializable(self) -> dict:
        return {
            "values": {str(e): str(v) for e, v in sorted(self.values.items())},
            "basis": [list(entry) for entry in self.basis],
            "objective": str(self.objective_value),
        }


def _solve_linear(mat: list[list[Fraction]], vec: list[Fraction]) -> list[Fraction] | None:
    """Solve a square rational system by Gaussian elimination; None if singular."""
    n = len(mat)
    a = [row[:] + [vec[i]] for i, row in enumerate(mat)]
    for col in range(n):
        piv = None
        for r in range(col, n):
            if a[r][col] != 0:
                piv = r
                break
        if piv is None:
            return None
        a[col], a[piv] = a[piv], a[col]
        inv = a[col][col]
        a[col] = [x / inv for x in a[col]]
        for r in range(n):
            if r != col and a[r][col] != 0:
                f = a[r][col]
                a[r] = [x - f * y for x, y in zip(a[r], a[col])]
    return [a[i][n] for i in range(n)]


def _rational_rank(rows: list[list[Fraction]]) -> int:
    work = [row[:] for row in rows]
    cols = len(work[0]) if work else 0
    rank = 0
    for col in range(cols):
        piv = None
        for r in range(rank, len(work)):
            if work[r][col] != 0:
                piv = r
                break
        if piv is None:
            continue
        work[rank], work[piv] = work[piv], work[rank]
        inv = work[rank][col]
        work[rank] = [x / inv for x in work[rank]]
        for r in range(len(work)):
            if r != rank and work[r][col] != 0:
                f = work[r][col]
                work[r] = [x - f * y for x, y in zip(work[r], work[rank])]
        rank += 1
        if rank == len(work):
            break
    return rank


def _simplex_pass(
    rowvars: Sequence[tuple[int, ...]],
    rhs: Sequence[Fraction],
    costs: Sequence[Fraction],
    ubs: Sequence[Fraction],
    exact: bool,
) -> tuple[list[int], list[int]]:
    """Bounded-variable primal simplex from the all-at-upper point.

    Returns (status per variable, basis variable per row).  Variables
    0..N-1 are structural, N..N+m-1 are the surplus of each row (upper
    bound infinite).  Bland's rule everywhere: lowest eligible index
    enters, lowest blocking variable index leaves.
    """
    m, N = len(rowvars), len(costs)
    NT = N + m
    if exact:
        span: list[Fraction | float | None] = [Fraction(u) for u in ubs] + [None] * m
    else:
        span = [float(u) for u in ubs] + [None] * m

    if exact:
        zero = Fraction(0)
        T = [[zero] * NT for _ in range(m)]
        for i, vs in enumerate(rowvars):
            for j in vs:
                T[i][j] = Fraction(-1)
            T[i][N + i] = Fraction(1)
        beta = [sum((ubs[j] for j in rowvars[i]), zero) - rhs[i] for i in range(m)]
        z = [Fraction(c) for c in costs] + [zero] * m
        tol = zero
    else:
        T = np.zeros((m, NT))
        for i, vs in enumerate(rowvars):
            for j in vs:
                T[i, j] = -1.0
            T[i, N + i] = 1.0
        beta = np.array(
            [float(sum((ubs[j] for j in rowvars[i]), Fraction(0)) - rhs[i]) for i in range(m)]
        )
        z = np.concatenate([np.array([float(c) for c in costs]), np.zeros(m)])
        tol = _FLOAT_TOL

    status = [_AT_UPPER] * N + [_BASIC] * m
    basis = [N + i for i in range(m)]

    cap = 400 + 60 * (m + N) if not exact else 20000 + 400 * (m + N)
    for _ in range(cap):
        entering = -1
        for j in range(NT):
            st = status[j]
            if st == _BASIC:
                continue
            if st == _AT_LOWER and z[j] < -tol:
                entering = j
                break
            if st == _AT_UPPER and z[j] > tol:
                entering = j
                break
        if entering < 0:
            return status, basis

        d = 1 if status[entering] == _AT_LOWER else -1
        col = [T[i][entering] for i in range(m)] if exact else T[:, entering].copy()

        # ratio test: how far the entering variable can move
        candidates: list[tuple[Fraction | float, int, int]] = []
        if span[entering] is not None:
            candidates.append((span[entering], entering, -1))
        for i in range(m):
            w = col[i]
            if exact:
                if w == 0:
                    continue
            elif -_PIVOT_TOL < w < _PIVOT_TOL:
                continue
            delta = -d * w  # change in the basic variable per unit step
            bvar = basis[i]
            if delta < 0:
                theta = beta[i] / (-delta)
            elif span[bvar] is not None:
                theta = (span[bvar] - beta[i]) / delta
            else:
                continue
            if theta < 0:
                theta = type(theta)(0)  # degenerate basic value at its bound
            candidates.append((theta, bvar, i))
        if not candidates:
            raise AssertionError("unbounded direction in a box-bounded LP")

        theta = min(c[0] for c in candidates)
        slack = tol if not exact else 0
        blocking = min(c[1] for c in candidates if c[0] <= theta + slack)
        row = next(c[2] for c in candidates if c[1] == blocking and c[0] <= theta + slack)

        if row < 0:
            # entering variable runs to its opposite bound; basis unchanged
            status[entering] = _AT_UPPER if status[entering] == _AT_LOWER else _AT_LOWER
            if exact:
                for i in range(m):
                    beta[i] -= d * col[i] * theta
            else:
                beta -= (d * theta) * col
            continue

        start_val = span[entering] if status[entering] == _AT_UPPER else type(theta)(0)
        if not exact:
            start_val = float(start_val)
        leaving = basis[row]
        delta_r = -d * col[row]
        status[leaving] = _AT_LOWER if delta_r < 0 else _AT_UPPER
        if exact:
            for i in range(m):
                beta[i] -= d * col[i] * theta
        else:
            beta -= (d * theta) * col
        beta[row] = start_val + d * theta
        status[entering] = _BASIC
        basis[row] = entering

        piv = col[row]
        if not exact and abs(piv) < _PIVOT_TOL:
            raise _Stall("pivot element too small")
        if exact:
            inv = piv
            T[row] = [x / inv for x in T[row]]
            for i in range(m):
                if i != row and T[i][entering] != 0:
                    f = T[i][entering]
                    T[i] = [x - f * y for x, y in zip(T[i], T[row])]
            if z[entering] != 0:
                f = z[entering]
                z = [x - f * y for x, y in zip(z, T[row])]
        else:
            T[row] /= piv
            factors = T[:, entering].copy()
            factors[row] = 0.0
            T -= np.outer(factors, T[row])
            if z[entering] != 0.0:
                z = z - z[entering] * T[row]
    raise _Stall("iteration cap exceeded")


def _recover_and_certify(
    rowvars: Sequence[tuple[int, ...]],
    rowsets: Sequence[frozenset[int]],
    rhs: Sequence[Fraction],
    costs: Sequence[Fraction],
    ubs: Sequence[Fraction],
    status: Sequence[int],
) -> tuple[list[Fraction], list[int]] | None:
    """Exact values from a basis partition, or None if any certificate fails.

    Certifies: the active system (nonbasic bounds plus tight rows) pins the
    point uniquely, all rows hold, and the basis duals prove optimality.
    """
    m, N = len(rowvars), len(costs)
    vals: list[Fraction | None] = [None] * N
    for j in range(N):
        if status[j] == _AT_LOWER:
            vals[j] = Fraction(0)
        elif status[j] == _AT_UPPER:
            vals[j] = Fraction(ubs[j])
    tight = [i for i in range(m) if status[N + i] != _BASIC]
    unknown = [j for j in range(N) if status[j] == _BASIC]
    if len(tight) != len(unknown):
        return None
    if unknown:
        unknown_pos = {j: p for p, j in enumerate(unknown)}
        mat = []
        vec = []
        for i in tight:
            row = [Fraction(0)] * len(unknown)
            acc = Fraction(rhs[i])
            for j in rowvars[i]:
                if j in unknown_pos:
                    row[unknown_pos[j]] = Fraction(1)
                else:
                    acc -= vals[j]
            mat.append(row)
            vec.append(acc)
        sol = _solve_linear(mat, vec)
        if sol is None:
            return None
        for j, x in zip(unknown, sol):
            vals[j] = x
    for j in range(N):
        if not 0 <= vals[j] <= ubs[j]:
            return None
    tight_set = set(tight)
    for i in range(m):
        lhs = sum((vals[j] for j in rowvars[i]), Fraction(0))
        if i in tight_set:
            if lhs != rhs[i]:
                return None
        elif lhs < rhs[i]:
            return None

    # dual certificate: y on tight rows from the basic structurals' columns
    if unknown:
        matT = [[mat[r][c] for r in range(len(tight))] for c in range(len(unknown))]
        ys = _solve_linear(matT, [costs[j] for j in unknown])
        if ys is None:
            return None
    else:
        ys = []
    y_of_row = dict(zip(tight, ys))
    if any(y < 0 for y in ys):
        return None
    for j in range(N):
        if status[j] == _BASIC:
            continue
        reduced = costs[j] - sum(
            (y_of_row[i] for i in tight if j in rowsets[i]), Fraction(0)
        )
        if status[j] == _AT_LOWER and reduced < 0:
            return None
        if status[j] == _AT_UPPER and reduced > 0:
            return None
    return [Fraction(v) for v in vals], tight


def _lp_arrays(lp):
    variables = lp.variables
    index = {e: j for j, e in enumerate(variables)}
    costs = [Fraction(lp.costs[e]) for e in variables]
    ubs = [Fraction(lp.upper(e)) for e in variables]
    rowvars = []
    rhs = []
    for row in lp.rows:
        vs = []
        for e in variables:
            edge = lp.graph.edge(e)
            if row.cut.crosses(edge.u, edge.v):
                vs.append(index[e])
        rowvars.append(tuple(vs))
        rhs.append(Fraction(row.rhs))
    return variables, costs, ubs, rowvars, rhs


def solve_extreme(lp) -> ExtremePoint:
    """Optimal vertex of the working LP in exact rationals.

    Raises LpInfeasible (with the witness cut) when some row cannot be met
    even at the all-upper point, which for cut LPs means the instance lacks
    the required connectivity.
    """
    variables, costs, ubs, rowvars, rhs = _lp_arrays(lp)
    N, m = len(variables), len(rowvars)

    for i, vs in enumerate(rowvars):
        capacity = sum((ubs[j] for j in vs), Fraction(0))
        if capacity < rhs[i]:
            raise LpInfeasible(lp.rows[i].cut, lp.rows[i].rhs, capacity)

    if N == 0:
        return ExtremePoint({}, (), Fraction(0))
    rowsets = [frozenset(vs) for vs in rowvars]
    if m == 0:
        values = {e: Fraction(0) for e in variables}
        basis = tuple(("lo", e) for e in variables)
        return ExtremePoint(values, basis, Fraction(0))

    recovered = None
    try:
        status, _ = _simplex_pass(rowvars, rhs, costs, ubs, exact=False)
        recovered = _recover_and_certify(rowvars, rowsets, rhs, costs, ubs, status)
    except _Stall:
        recovered = None
    if recovered is None:
        status, _ = _simplex_pass(rowvars, rhs, costs, ubs, exact=True)
        recovered = _recover_and_certify(rowvars, rowsets, rhs, costs, ubs, status)
        if recovered is None:
            raise AssertionError("exact simplex ended on an uncertifiable basis")

    vals, tight = recovered
    values = {e: vals[j] for j, e in enumerate(variables)}
    entries: list[BasisEntry] = [("row", i) for i in sorted(tight)]
    for j, e in enumerate(variables):
        if status[j] == _AT_LOWER:
            entries.append(("lo", e))
        elif status[j] == _AT_UPPER:
            entries.append(("hi", e))
    entries[len(tight):] = sorted(entries[len(tight):], key=lambda t: t[1])
    objective = sum((costs[j] * vals[j] for j in range(N)), Fraction(0))
    return ExtremePoint(values, tuple(entries), objective)


def verify_vertex(lp, pt: ExtremePoint) -> bool:
    """Independent vertex check: feasibility, active equalities, and full rank.

    Everything is recomputed from scratch in rational arithmetic; returns
    False on any violation rather than raising.
    """
    variables, costs, ubs, rowvars, rhs = _lp_arrays(lp)
    index = {e: j for j, e in enumerate(variables)}
    if set(pt.values) != set(variables):
        return False
    vals = [Fraction(pt.values[e]) for e in variables]
    for j in range(len(variables)):
        if not 0 <= vals[j] <= ubs[j]:
            return False
    for i, vs in enumerate(rowvars):
        if sum((vals[j] for j in vs), Fraction(0)) < rhs[i]:
            return False
    if len(pt.basis) != len(variables):
        return False
    active_rows = []
    for kind, ref in pt.basis:
        if kind == "row":
            if not 0 <= ref < len(rowvars):
                return False
            if sum((vals[j] for j in rowvars[ref]), Fraction(0)) != rhs[ref]:
                return False
            vec = [Fraction(0)] * len(variables)
            for j in rowvars[ref]:
                vec[j] = Fraction(1)
            active_rows.append(vec)
        elif kind in ("lo", "hi"):
            if ref not in index:
                return False
            j = index[ref]
            target = Fraction(0) if kind == "lo" else ubs[j]
            if vals[j] != target:
                return False
            vec = [Fraction(0)] * len(variables)
            vec[j] = Fraction(1)
            active_rows.append(vec)
        else:
            return False
    return _rational_rank(active_rows) == len(variables)


def verify_optimal(lp, pt: ExtremePoint) -> bool:
    """Exact dual certificate for optimality of a claimed vertex.

    Solves for multipliers on the basis' tight rows and checks sign
    conditions on them and on every reduced cost; complementary slackness
    holds by construction because only tight rows get multipliers.
    """
    variables, costs, ubs, rowvars, rhs = _lp_arrays(lp)
    index = {e: j for j, e in enumerate(variables)}
    if set(pt.values) != set(variables):
        return False
    vals = [Fraction(pt.values[e]) for e in variables]
    tight = sorted(ref for kind, ref in pt.basis if kind == "row")
    bounded = {index[ref]: kind for kind, ref in pt.basis if kind != "row"}
    basic = [j for j in range(len(variables)) if j not in bounded]
    if len(tight) != len(basic):
        return False
    for i in tight:
        if sum((vals[j] for j in rowvars[i]), Fraction(0)) != rhs[i]:
            return False
    rowsets = [frozenset(vs) for vs in rowvars]
    if basic:
        mat = [[Fraction(1) if j in rowsets[i] else Fraction(0) for i in tight] for j in basic]
        ys = _solve_linear(mat, [costs[j] for j in basic])
        if ys is None:
            return False
    else:
        ys = []
    if any(y < 0 for y in ys):
        return False
    y_of_row = dict(zip(tight, ys))
    for j, kind in bounded.items():
        reduced = costs[j] - sum((y_of_row[i] for i in tight if j in rowsets[i]), Fraction(0))
        if kind == "lo" and reduced < 0:
            return False
        if kind == "hi" and reduced > 0:
            return False
    return True
