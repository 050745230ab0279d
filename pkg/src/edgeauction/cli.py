"""Command-line interface: ``simulate``, ``sweep`` and ``report``.

Exit codes: 0 success, 1 invalid config or result file, 2 I/O error,
3 numerical failure (e.g. a singular fit).
"""

import argparse
import csv
import logging
import sys

import numpy as np

from . import results
from .allocation import allocate
from .config import SimConfig, apply_overrides, config_to_dict, load_config
from .errors import EdgeAuctionError, NumericalConditioningError
from .population import generate_population
from .revenue import simulate_once
from .rng import derive_seed
from .sweep import run_experiment

log = logging.getLogger("edgeauction")

EXIT_OK, EXIT_INVALID, EXIT_IO, EXIT_NUMERIC = 0, 1, 2, 3
CURVE_SAMPLES = 200


def _resolve(args) -> SimConfig:
    cfg = load_config(args.config) if args.config else SimConfig()
    return apply_overrides(cfg, seed=args.seed, trials=args.trials, users=args.users,
                           servers=args.servers, output=args.output, fmt=args.format,
                           fit_degree=args.fit_degree)


def cmd_simulate(args) -> int:
    cfg = _resolve(args)
    n_users, m = cfg.population.n_users, cfg.n_servers
    # same seeds as trial 0 of a sweep at this server count
    population = generate_population(cfg.population, derive_seed(cfg.master_seed, "population", m, 0))
    allocation = allocate(cfg.allocation_strategy, n_users, m,
                          derive_seed(cfg.master_seed, "allocation", m, 0))
    outcomes, total = simulate_once(population, allocation, cfg.economics, cfg.singleton_policy)
    payload = results.simulate_payload(outcomes, total, n_users, m, config_to_dict(cfg))
    path = cfg.output_path("simulate")
    results.write_result(path, payload, cfg.output.format)
    print(f"total_revenue={total!r}")
    log.info("wrote %s", path)
    return EXIT_OK


def cmd_sweep(args) -> int:
    cfg = _resolve(args)
    result = run_experiment(cfg.market(), cfg.m_grid(), cfg.sweep.trials, cfg.master_seed,
                            cfg.sweep.fit_degree)
    payload = results.sweep_payload(result, config_to_dict(cfg))
    path = cfg.output_path("sweep")
    results.write_result(path, payload, cfg.output.format)
    opt = result.optimum
    print(f"optimal_servers={opt.n_servers} ratio={opt.ratio!r} fitted_revenue={opt.revenue!r}")
    if opt.at_endpoint:
        print("warning: fitted maximum lies on the grid boundary", file=sys.stderr)
    log.info("wrote %s", path)
    return EXIT_OK


def cmd_report(args) -> int:
    payload = results.read_result(args.result)
    if payload.get("kind") != "sweep":
        raise results.ResultFormatError("report needs a sweep result")
    sweep = results.sweep_from_payload(payload)
    if not sweep.points:
        raise results.ResultFormatError("sweep result has no points")
    if sweep.fit is None:
        raise results.ResultFormatError("sweep result has no fit")
    out = csv.writer(sys.stdout, lineterminator="\n")
    out.writerow(["series", "m", "revenue"])
    for p in sweep.points:
        out.writerow(["data", p.n_servers, repr(p.mean)])
    ms = [p.n_servers for p in sweep.points]
    grid = np.linspace(min(ms), max(ms), CURVE_SAMPLES)
    for m, w in zip(grid, sweep.fit(grid)):
        out.writerow(["fit", repr(float(m)), repr(float(w))])
    return EXIT_OK


def build_parser():
    parser = argparse.ArgumentParser(prog="edgeauction",
                                     description="All-pay auction edge server placement simulator.")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    for name, func, help_ in (("simulate", cmd_simulate, "run one market at a fixed server count"),
                              ("sweep", cmd_sweep, "sweep server counts, fit, and report the optimum")):
        p = sub.add_parser(name, help=help_)
        p.add_argument("--config", help="JSON config file (defaults apply when omitted)")
        p.add_argument("--seed", type=int, help="master seed (u64)")
        p.add_argument("--trials", type=int)
        p.add_argument("--users", type=int, help="number of end users N")
        p.add_argument("--servers", type=int, help="server count M for simulate")
        p.add_argument("--output", help="result file path")
        p.add_argument("--format", choices=["csv", "json"])
        p.add_argument("--fit-degree", type=int)
        p.set_defaults(func=func)

    p = sub.add_parser("report", help="print plot-ready CSV for a sweep result")
    p.add_argument("result")
    p.set_defaults(func=cmd_report)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s: %(message)s")
    try:
        return args.func(args)
    except NumericalConditioningError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except (EdgeAuctionError, results.ResultFormatError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
