"""Exit criteria for the simulator, one test per criterion.

Each test records a PASS/FAIL line shown in the pytest summary.
"""

import time

import numpy as np
import pytest

from conftest import random_market, record, regrouped_total
from edgeauction.auction import equilibrium_bid, equilibrium_bid_numeric
from edgeauction.cli import main
from edgeauction.population import PopulationConfig
from edgeauction.revenue import EconomicParams, simulate_once
from edgeauction.sweep import (
    MarketSettings,
    fit_polynomial,
    optimal_server_count,
    ratio_grid,
    run_experiment,
    sweep_servers,
)

SEEDS = (0, 1, 2, 3, 4)
GRID_100 = list(range(5, 100, 5))


def test_criterion_1_inverted_u():
    start = time.perf_counter()
    settings = MarketSettings(population=PopulationConfig(n_users=100))
    res = run_experiment(settings, GRID_100, 50, master_seed=0, degree=3)
    opt = res.optimum
    by_m = {p.n_servers: p for p in res.points}
    peak = by_m.get(opt.n_servers) or sweep_servers(settings, [opt.n_servers], 50, 0).points[0]
    margins = []
    for m in (5, 95):
        pooled = np.hypot(peak.stderr, by_m[m].stderr)
        margins.append((peak.mean - by_m[m].mean) / pooled)
    elapsed = time.perf_counter() - start
    ok = not opt.at_endpoint and min(margins) >= 3 and elapsed < 30
    record(1, ok, f"M*={opt.n_servers} interior={not opt.at_endpoint} "
                  f"margins={margins[0]:.1f},{margins[1]:.1f} SE (need >= 3) time={elapsed:.1f}s")
    assert not opt.at_endpoint
    assert min(margins) >= 3
    assert elapsed < 30


def test_criterion_2_optimal_ratio_band():
    start = time.perf_counter()
    ratios = {}
    for n in (100, 500, 1000):
        settings = MarketSettings(population=PopulationConfig(n_users=n))
        ratios[n] = [run_experiment(settings, ratio_grid(n), 50, s, degree=3).optimum.ratio for s in SEEDS]
    elapsed = time.perf_counter() - start
    hits = {n: sum(0.15 <= r <= 0.35 for r in rs) for n, rs in ratios.items()}
    ok = all(h >= 4 for h in hits.values()) and elapsed < 300
    detail = "; ".join(f"N={n}: {hits[n]}/5 in [0.15, 0.35], ratios={[round(r, 3) for r in rs]}"
                       for n, rs in ratios.items())
    record(2, ok, f"{detail}; time={elapsed:.1f}s")
    assert all(h >= 4 for h in hits.values()), detail
    assert elapsed < 300


def test_criterion_3_negative_revenue_with_idle_servers():
    settings = MarketSettings(population=PopulationConfig(n_users=100), allocation_strategy="random")
    means = [sweep_servers(settings, [95], 50, s).points[0].mean for s in SEEDS]
    ok = all(w < 0 for w in means)
    record(3, ok, f"mean W at M=95 (random allocation) = {[round(w, 1) for w in means]}")
    assert ok


def test_criterion_4_closed_form_vs_quadrature():
    start = time.perf_counter()
    worst = 0.0
    for A in (10, 20, 30):
        for v in (0, A / 4, A / 2, 3 * A / 4, A):
            for n in range(2, 11):
                closed = equilibrium_bid(v, A, n)
                numeric = equilibrium_bid_numeric(v, A, n, 10_000)
                worst = max(worst, abs(closed - numeric) / max(closed, 1e-12))
    elapsed = time.perf_counter() - start
    ok = worst <= 1e-8 and elapsed < 1
    record(4, ok, f"max relative error {worst:.2e} (need <= 1e-8) time={elapsed:.3f}s")
    assert worst <= 1e-8
    assert elapsed < 1


def test_criterion_5_accounting_identity():
    rng = np.random.default_rng(2024)
    worst = 0.0
    for _ in range(1000):
        pop, alloc, B, policy = random_market(rng)
        outcomes, w = simulate_once(pop, alloc, EconomicParams(B), policy)
        worst = max(worst, abs(w - regrouped_total(outcomes, pop, B)) / (1e-9 * alloc.n_servers))
    ok = worst <= 1
    record(5, ok, f"worst |W - regrouped| = {worst:.3g} x (1e-9 * M) over 1000 markets")
    assert ok


def test_criterion_6_sweep_determinism(tmp_path, capsys):
    path = tmp_path / "sweep.json"
    blobs = []
    for _ in range(2):
        assert main(["sweep", "--seed", "12345", "--output", str(path)]) == 0
        blobs.append(path.read_bytes())
        path.unlink()
    capsys.readouterr()
    ok = blobs[0] == blobs[1]
    record(6, ok, f"two sweep runs byte-identical ({len(blobs[0])} bytes)")
    assert ok


def test_criterion_7_fit_recovers_noisy_vertex():
    errors = []
    for rep in range(20):
        rng = np.random.default_rng(1000 + rep)
        y = -(np.array(GRID_100, dtype=float) - 25) ** 2 + 170 + rng.normal(0, 1, len(GRID_100))
        opt = optimal_server_count(fit_polynomial(GRID_100, y, 2), (5, 95), 100)
        errors.append(abs(opt.m_continuous - 25))
    ok = max(errors) <= 1
    record(7, ok, f"max vertex error {max(errors):.2e} over 20 repetitions (need <= 1)")
    assert ok
