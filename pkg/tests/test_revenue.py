import math

import numpy as np
import pytest

from conftest import random_market, regrouped_total, user
from edgeauction.allocation import Allocation, allocate_balanced
from edgeauction.auction import equilibrium_bid_numeric
from edgeauction.errors import ContractViolation
from edgeauction.population import Population, PopulationConfig, generate_population
from edgeauction.revenue import (
    DECLINED,
    IDLE,
    SERVED,
    EconomicParams,
    SetOutcome,
    run_set_auction,
    simulate_once,
    simulate_revenue,
    total_revenue,
)

PARAMS = EconomicParams(fixed_cost=10.0)


def two_users():
    return [user(0, 10, 10, 128), user(1, 5, 10, 128)]


def test_two_user_auction():
    out = run_set_auction(two_users(), PARAMS)
    assert out.bids == pytest.approx((5.0, 1.25))
    assert out.winner_id == 0
    assert out.status == SERVED
    assert out.revenue == pytest.approx(-10.75)


def test_two_user_bids_match_quadrature():
    out = run_set_auction(two_users(), PARAMS)
    numeric = [equilibrium_bid_numeric(u.valuation, u.ability, 2) for u in two_users()]
    np.testing.assert_allclose(out.bids, numeric, rtol=1e-9)


def test_idle_and_declined():
    idle = run_set_auction([], PARAMS, server_id=3)
    assert (idle.status, idle.revenue, idle.bids, idle.winner_id) == (IDLE, -10.0, (), None)
    declined = run_set_auction([user(0, 0, 10, 100)], PARAMS)
    assert (declined.status, declined.revenue, declined.bids) == (DECLINED, -10.0, ())


def test_served_singleton():
    out = run_set_auction([user(4, 40, 50, 128)], PARAMS, "midpoint")
    assert out.status == SERVED and out.winner_id == 4
    assert out.bids == (18.5,)
    assert out.revenue == pytest.approx(18.5 - 10 - 7)


def test_tie_goes_to_lowest_id():
    users = [user(7, 10, 10, 200), user(2, 10, 10, 300), user(5, 10, 10, 400)]
    out = run_set_auction(users, PARAMS)
    assert out.winner_id == 2
    # each bid is (2/3) * 10
    assert out.revenue == pytest.approx(20 - 10 - math.log2(300))


def test_duplicate_ids_rejected():
    with pytest.raises(ContractViolation):
        run_set_auction([user(1, 5, 10, 100), user(1, 6, 10, 100)], PARAMS)


def test_total_revenue():
    mk = lambda r: SetOutcome(0, 0, (), (), None, r, IDLE)
    assert total_revenue([mk(5), mk(-10), mk(3)]) == -2
    assert total_revenue([]) == 0
    assert total_revenue([run_set_auction([], PARAMS, server_id=j) for j in range(7)]) == -70


def test_simulate_once_small_cases():
    pop = Population.from_users([user(0, 1, 10, 100)])
    _, w = simulate_once(pop, Allocation.from_sets([[0]]), PARAMS)
    assert w == -10
    pop = Population.from_users(two_users())
    outcomes, w = simulate_once(pop, Allocation.from_sets([[0, 1]]), PARAMS)
    assert w == pytest.approx(-10.75)
    assert len(outcomes) == 1


def test_simulate_once_mismatch():
    pop = Population.from_users(two_users())
    with pytest.raises(ContractViolation):
        simulate_once(pop, Allocation.from_sets([[0, 1, 2]]), PARAMS)
    with pytest.raises(ContractViolation):
        simulate_revenue(pop, Allocation.from_sets([[0]]), PARAMS)


def test_vectorised_path_matches_set_by_set():
    rng = np.random.default_rng(123)
    for _ in range(300):
        pop, alloc, B, policy = random_market(rng)
        params = EconomicParams(B)
        _, w = simulate_once(pop, alloc, params, policy)
        assert simulate_revenue(pop, alloc, params, policy) == pytest.approx(w, rel=0, abs=1e-9 * alloc.n_servers)


def test_accounting_identity_and_all_pay():
    rng = np.random.default_rng(7)
    statuses = set()
    for _ in range(200):
        pop, alloc, B, policy = random_market(rng)
        outcomes, w = simulate_once(pop, alloc, EconomicParams(B), policy)
        assert len(outcomes) == alloc.n_servers
        assert abs(w - regrouped_total(outcomes, pop, B)) <= 1e-9 * alloc.n_servers
        for j, o in enumerate(outcomes):
            statuses.add(o.status)
            assert o.user_ids == tuple(int(u) for u in alloc.members(j))
            if o.status == SERVED and o.set_size >= 2:
                # every member pays, and only members pay
                assert len(o.bids) == o.set_size
                assert max(o.bids) == o.bids[o.user_ids.index(o.winner_id)]
            else:
                assert o.status == SERVED or (o.revenue == -B and o.bids == ())
    assert statuses == {SERVED, DECLINED, IDLE}


def test_winner_invariant_under_scaling():
    pop = generate_population(PopulationConfig(n_users=60), 4)
    alloc = allocate_balanced(60, 9, 4)
    scaled = Population(pop.q, pop.f_t, pop.ability * 4.0, pop.valuation * 4.0)
    a, _ = simulate_once(pop, alloc, PARAMS)
    b, _ = simulate_once(scaled, alloc, PARAMS)
    assert [o.winner_id for o in a] == [o.winner_id for o in b]


def test_fixed_cost_slope():
    # no singleton sets, so every server pays B exactly once regardless of B
    pop = generate_population(PopulationConfig(n_users=90), 2)
    alloc = allocate_balanced(90, 20, 2)
    ws = [simulate_revenue(pop, alloc, EconomicParams(B)) for B in (0.0, 5.0, 10.0, 20.0)]
    assert all(x > y for x, y in zip(ws, ws[1:]))
    np.testing.assert_allclose(np.diff(ws), [-100.0, -100.0, -200.0], atol=1e-9)
