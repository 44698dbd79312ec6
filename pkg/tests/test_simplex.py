import random
from fractions import Fraction

import pytest

from kconn.cutlp import LpRow, RelaxMode, WorkingLp, residual_demand
from kconn.multigraph import CutSet, MultiGraph, all_proper_cuts
from kconn.simplex import (
    ExtremePoint,
    LpInfeasible,
    _rational_rank,
    solve_extreme,
    verify_optimal,
    verify_vertex,
)


def lp_for(graph, rows, k=2, mode=RelaxMode.PLAIN, variables=None):
    variables = tuple(sorted(variables if variables is not None else graph.edge_ids()))
    return WorkingLp(
        graph=graph,
        k=k,
        mode=mode,
        variables=variables,
        costs={e: graph.edge(e).cost for e in variables},
        rows=list(rows),
    )


def full_cut_rows(graph, k):
    return [LpRow(cut, k) for cut in all_proper_cuts(graph.n)]


def complete_graph(n, cost=1):
    return MultiGraph(n, [(u, v, cost) for u in range(n) for v in range(u + 1, n)])


def test_single_variable_no_rows():
    g = MultiGraph(2, [(0, 1, 1)])
    pt = solve_extreme(lp_for(g, []))
    assert pt.values == {0: 0}
    assert pt.objective_value == 0
    assert pt.basis == (("lo", 0),)


def test_degree_row_forces_both_edges():
    # 4-cycle, one degree-2 node must be covered fully: its two edges go to 1
    g = MultiGraph(4, [(0, 1, 1), (1, 2, 1), (2, 3, 1), (3, 0, 1)])
    row = LpRow(CutSet.from_nodes(4, [0]), 2)
    pt = solve_extreme(lp_for(g, [row]))
    assert pt.values[0] == 1 and pt.values[3] == 1
    assert pt.values[1] == 0 and pt.values[2] == 0
    assert pt.objective_value == 2


def test_k4_full_cut_lp_value():
    # k=2 on K4: summing the four degree rows gives x(E) >= 4, and the
    # uniform 2/3 point (every cut carries at least 2) attains cost 4
    g = complete_graph(4)
    pt = solve_extreme(lp_for(g, full_cut_rows(g, 2)))
    assert pt.objective_value == 4


def test_infeasible_row_reports_witness():
    g = MultiGraph(3, [(0, 1, 1), (1, 2, 1), (0, 2, 1)])
    bad = LpRow(CutSet.from_nodes(3, [0]), 3)  # only 2 edges cross
    with pytest.raises(LpInfeasible) as exc:
        solve_extreme(lp_for(g, [bad]))
    assert exc.value.cut.mask == 0b001
    assert exc.value.capacity == 2


def test_determinism():
    g = complete_graph(5, cost=Fraction(7, 3))
    lp = lp_for(g, full_cut_rows(g, 3))
    a = solve_extreme(lp)
    b = solve_extreme(lp_for(g, full_cut_rows(g, 3)))
    assert a == b


def test_objective_matches_dot_product():
    rng = random.Random(2)
    for _ in range(10):
        n = rng.randint(3, 6)
        g = MultiGraph(
            n,
            [
                (u, v, Fraction(rng.randint(1, 12), rng.randint(1, 4)))
                for u in range(n)
                for v in range(u + 1, n)
            ],
        )
        lp = lp_for(g, full_cut_rows(g, 2))
        pt = solve_extreme(lp)
        assert pt.objective_value == sum(
            (lp.costs[e] * pt.values[e] for e in lp.variables), Fraction(0)
        )


def random_instance(rng, n):
    specs = [(i, (i + 1) % n, Fraction(rng.randint(1, 10), rng.randint(1, 3))) for i in range(n)]
    for u in range(n):
        for v in range(u + 1, n):
            if rng.random() < 0.5:
                specs.append((u, v, Fraction(rng.randint(1, 10), rng.randint(1, 3))))
    return MultiGraph(n, specs)


def test_solver_output_verifies_on_random_instances():
    rng = random.Random(11)
    checked = 0
    for _ in range(100):
        n = rng.randint(3, 8)
        g = random_instance(rng, n)
        k = rng.randint(2, 4)
        rows = []
        for cut in all_proper_cuts(n):
            rhs = min(k, len([e for e in g.edges if cut.crosses(e.u, e.v)]))
            if rhs > 0:
                rows.append(LpRow(cut, rhs))
        lp = lp_for(g, rows)
        pt = solve_extreme(lp)
        assert verify_vertex(lp, pt)
        assert verify_optimal(lp, pt)
        checked += 1
    assert checked == 100


def test_midpoint_of_two_vertices_is_not_a_vertex():
    # two parallel unit edges, demand 1: the optima are (1,0) and (0,1)
    g = MultiGraph(2, [(0, 1, 1), (0, 1, 1)])
    lp = lp_for(g, [LpRow(CutSet.from_nodes(2, [0]), 1)])
    pt = solve_extreme(lp)
    assert sorted(pt.values.values()) == [0, 1]
    midpoint = ExtremePoint(
        values={0: Fraction(1, 2), 1: Fraction(1, 2)},
        basis=pt.basis,
        objective_value=Fraction(1),
    )
    assert not verify_vertex(lp, midpoint)


def test_tiny_constraint_violation_fails_verification():
    g = complete_graph(4)
    lp = lp_for(g, full_cut_rows(g, 2))
    pt = solve_extreme(lp)
    eid = next(e for e in lp.variables if pt.values[e] > 0)
    bad_values = dict(pt.values)
    bad_values[eid] -= Fraction(1, 10**6)
    assert not verify_vertex(lp, ExtremePoint(bad_values, pt.basis, pt.objective_value))


def test_suboptimal_vertex_fails_dual_certificate():
    g = complete_graph(4)
    lp = lp_for(g, full_cut_rows(g, 2))
    all_ones = ExtremePoint(
        values={e: Fraction(1) for e in lp.variables},
        basis=tuple(("hi", e) for e in lp.variables),
        objective_value=Fraction(6),
    )
    assert verify_vertex(lp, all_ones)
    assert not verify_optimal(lp, all_ones)


def test_basis_size_and_rank():
    rng = random.Random(21)
    for _ in range(20):
        g = random_instance(rng, rng.randint(3, 7))
        lp = lp_for(g, full_cut_rows(g, 2))
        pt = solve_extreme(lp)
        assert len(pt.basis) == len(lp.variables)
        assert verify_vertex(lp, pt)


def test_relaxation_vertex_is_vertex_of_full_polytope():
    # a point solved over a partial row set that happens to satisfy every
    # cut row is a vertex of the fully enumerated polytope as well: its
    # active constraints there still have full rank
    rng = random.Random(31)
    for _ in range(15):
        n = rng.randint(4, 7)
        g = random_instance(rng, n)
        k = 2
        full = [r for r in full_cut_rows(g, k)]
        partial = [r for r in full if r.cut.size == 1]
        lp_partial = lp_for(g, partial)
        pt = solve_extreme(lp_partial)
        feasible_for_all = all(
            sum((pt.values[e.id] for e in g.edges if r.cut.crosses(e.u, e.v)), Fraction(0))
            >= r.rhs
            for r in full
        )
        if not feasible_for_all:
            continue
        # collect every active constraint of the full polytope and rank it
        vectors = []
        for r in full:
            mass = sum(
                (pt.values[e.id] for e in g.edges if r.cut.crosses(e.u, e.v)), Fraction(0)
            )
            if mass == r.rhs:
                vec = [
                    Fraction(1) if r.cut.crosses(g.edge(e).u, g.edge(e).v) else Fraction(0)
                    for e in lp_partial.variables
                ]
                vectors.append(vec)
        for j, e in enumerate(lp_partial.variables):
            if pt.values[e] in (0, 1):
                vec = [Fraction(0)] * len(lp_partial.variables)
                vec[j] = Fraction(1)
                vectors.append(vec)
        assert _rational_rank(vectors) == len(lp_partial.variables)


def test_oracle_style_upper_bounds():
    # aggregate variables with non-unit upper bounds (multi-subgraph LP)
    g = MultiGraph(2, [(0, 1, 1)])

    class BoxLp:
        graph = g
        k = 4
        mode = RelaxMode.PLAIN
        variables = (0,)
        costs = {0: Fraction(1)}
        rows = [LpRow(CutSet.from_nodes(2, [0]), 4)]

        @staticmethod
        def upper(eid):
            return Fraction(4)

    pt = solve_extreme(BoxLp())
    assert pt.values[0] == 4
    assert pt.objective_value == 4
