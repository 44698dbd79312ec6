import random
from fractions import Fraction

import pytest

from kconn.cutlp import LpRow, RelaxMode, WorkingLp, is_relaxed, refresh_rows, residual_demand
from kconn.multigraph import CutSet, GraphError, MultiGraph, all_proper_cuts


def complete_graph(n):
    return MultiGraph(n, [(u, v, 1) for u in range(n) for v in range(u + 1, n)])


def state_with_integral_degree(d, extra_fractional=6):
    """n=2 gadget whose single cut has exactly d integral copies across it."""
    specs = [(0, 1, 1)] * (d + extra_fractional)
    g = MultiGraph(2, specs)
    integral = set(range(d))
    return g, integral, CutSet.from_nodes(2, [0])


def test_is_relaxed_at_even_threshold():
    k = 6
    g, integral, s = state_with_integral_degree(k - 2)
    assert is_relaxed(g, s, integral, k, RelaxMode.EVEN)
    assert not is_relaxed(g, s, integral, k, RelaxMode.HALF)


def test_is_relaxed_empty_integral():
    g, integral, s = state_with_integral_degree(0)
    for k in (3, 4, 5, 6):
        assert not is_relaxed(g, s, integral, k, RelaxMode.EVEN)
        assert not is_relaxed(g, s, integral, k, RelaxMode.HALF)


def test_is_relaxed_rejects_plain():
    g, integral, s = state_with_integral_degree(2)
    with pytest.raises(GraphError):
        is_relaxed(g, s, integral, 4, RelaxMode.PLAIN)


def test_residual_demand_values():
    g, integral, s = state_with_integral_degree(4)
    assert residual_demand(g, s, integral, 6, RelaxMode.EVEN) == 0  # relaxed away
    assert residual_demand(g, s, integral, 5, RelaxMode.HALF) == 0
    assert residual_demand(g, s, integral, 6, RelaxMode.PLAIN) == 2
    g3, integral3, s3 = state_with_integral_degree(3)
    assert residual_demand(g3, s3, integral3, 6, RelaxMode.EVEN) == 3  # not in the relaxed family


def test_residual_demand_counts_multiplicity():
    g = MultiGraph(2, [(0, 1, 1, 3), (0, 1, 1)])
    s = CutSet.from_nodes(2, [0])
    assert residual_demand(g, s, {0}, 5, RelaxMode.EVEN) == 0  # d = 3 >= 5 - 2
    assert residual_demand(g, s, {0}, 6, RelaxMode.EVEN) == 3


def random_state(rng, n):
    g = complete_graph(n)
    ids = list(g.edge_ids())
    rng.shuffle(ids)
    cutoff = rng.randint(0, len(ids))
    return g, set(ids[:cutoff])


def test_residual_demand_cut_symmetric():
    rng = random.Random(3)
    for _ in range(20):
        g, integral = random_state(rng, rng.randint(3, 7))
        k = rng.randint(2, 7)
        mode = rng.choice([RelaxMode.EVEN, RelaxMode.HALF, RelaxMode.PLAIN])
        for s in all_proper_cuts(g.n):
            assert residual_demand(g, s, integral, k, mode) == residual_demand(
                g, s.complement(), integral, k, mode
            )


def test_even_demand_parity_structure():
    rng = random.Random(4)
    for _ in range(20):
        g, integral = random_state(rng, rng.randint(3, 7))
        k = rng.choice([4, 6, 8])
        for s in all_proper_cuts(g.n):
            d = residual_demand(g, s, integral, k, RelaxMode.PLAIN)
            relaxed = residual_demand(g, s, integral, k, RelaxMode.EVEN)
            assert relaxed in (d, d - 2)


def test_demand_monotone_as_integral_grows():
    rng = random.Random(5)
    for _ in range(10):
        g, _ = random_state(rng, 6)
        ids = sorted(g.edge_ids())
        rng.shuffle(ids)
        k = rng.choice([4, 5, 6])
        mode = rng.choice([RelaxMode.EVEN, RelaxMode.HALF])
        cuts = list(all_proper_cuts(g.n))
        prev = {s.mask: residual_demand(g, s, set(), k, mode) for s in cuts}
        integral = set()
        for eid in ids:
            integral.add(eid)
            for s in cuts:
                now = residual_demand(g, s, integral, k, mode)
                assert now <= prev[s.mask]
                prev[s.mask] = now


def test_positive_demand_implies_not_relaxed():
    rng = random.Random(6)
    for _ in range(15):
        g, integral = random_state(rng, 6)
        k = rng.choice([4, 5, 6])
        for mode in (RelaxMode.EVEN, RelaxMode.HALF):
            for s in all_proper_cuts(g.n):
                if residual_demand(g, s, integral, k, mode) >= 1:
                    assert not is_relaxed(g, s, integral, k, mode)


def test_initial_lp_has_degree_rows():
    g = complete_graph(4)
    costs = {e.id: e.cost for e in g.edges}
    lp = WorkingLp.initial(g, 4, RelaxMode.EVEN, g.edge_ids(), costs)
    assert len(lp.rows) == 4
    assert all(row.rhs == 4 and row.cut.size == 1 for row in lp.rows)


def test_initial_lp_even_k2_is_empty():
    # with k=2 every cut is already relaxed, so no rows survive
    g = complete_graph(4)
    costs = {e.id: e.cost for e in g.edges}
    lp = WorkingLp.initial(g, 2, RelaxMode.EVEN, g.edge_ids(), costs)
    assert lp.rows == []


def test_add_cuts_dedups_and_clamps():
    g = complete_graph(4)
    costs = {e.id: e.cost for e in g.edges}
    lp = WorkingLp.initial(g, 4, RelaxMode.EVEN, g.edge_ids(), costs)
    s = CutSet.from_nodes(4, [0, 1])
    assert lp.add_cuts([s], set()) == 1
    assert lp.add_cuts([s.complement()], set()) == 0  # same cut up to complement
    assert lp.add_cuts([CutSet.from_nodes(4, [0])], set()) == 0  # already a degree row


def test_refresh_matches_scratch_recompute():
    rng = random.Random(8)
    g = complete_graph(8)
    costs = {e.id: e.cost for e in g.edges}
    ids = sorted(g.edge_ids())
    k, mode = 6, RelaxMode.EVEN
    lp = WorkingLp.initial(g, k, mode, ids, costs)
    lp.add_cuts(
        [CutSet(8, rng.randint(1, 2**7 - 1)) for _ in range(12)], set()
    )
    integral: set[int] = set()
    fractional = set(ids)
    for _ in range(6):
        moved = {e for e in fractional if rng.random() < 0.25}
        integral |= moved
        fractional -= moved
        dropped = {e for e in fractional if rng.random() < 0.1}
        fractional -= dropped
        lp = refresh_rows(lp, integral, fractional)
        assert set(lp.variables) == fractional
        assert set(lp.costs) == fractional
        for row in lp.rows:
            fresh = residual_demand(g, row.cut, integral, k, mode)
            assert row.rhs == fresh
            assert fresh > 0


def test_refresh_deletes_satisfied_rows():
    g = MultiGraph(2, [(0, 1, 1)] * 5)
    costs = {e.id: e.cost for e in g.edges}
    lp = WorkingLp.initial(g, 4, RelaxMode.EVEN, g.edge_ids(), costs)
    assert len(lp.rows) == 1  # the two singleton cuts are complements
    # moving 2 integral copies across the only cut relaxes it to demand 0
    lp2 = refresh_rows(lp, {0, 1}, {2, 3, 4})
    assert lp2.rows == []


def test_refresh_empty_fractional_clears_everything():
    g = complete_graph(4)
    costs = {e.id: e.cost for e in g.edges}
    lp = WorkingLp.initial(g, 4, RelaxMode.EVEN, g.edge_ids(), costs)
    lp2 = refresh_rows(lp, set(g.edge_ids()), set())
    assert lp2.variables == ()
    assert lp2.rows == []
