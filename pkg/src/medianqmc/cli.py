"""Command-line entry point: ``points``, ``estimate``, ``experiment``, ``bound``, ``verify``."""

from __future__ import annotations

import argparse
import csv
import sys
import time
from pathlib import Path
from typing import Sequence

from . import netgen, theory
from .estimator import EstimatorConfig, median_and_mean
from .experiment import (
    CSV_HEADER,
    DEFAULT_BUDGET,
    SCHEME_ORDER,
    ExperimentGrid,
    emit_csv,
    emit_replicates,
    emit_svg,
    fit_slope,
    run_experiment,
)
from .rng import ReplicateStreams
from .testfns import ProductTestFunction
from .verify import TIERS, run_suite

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

_CONFIG_KEYS = {
    "seed", "schemes", "s", "gamma", "alpha", "m_min", "m_max", "r",
    "out_csv", "out_svg", "full", "threads", "budget",
}


def _int_list(text: str) -> list[int]:
    return [int(t) for t in text.split(",") if t.strip()]


def _float_list(text: str) -> list[float]:
    return [float(t) for t in text.split(",") if t.strip()]


def _str_list(text: str) -> list[str]:
    return [t.strip() for t in text.split(",") if t.strip()]


def load_config(path: str | Path) -> dict:
    """Flat ``key = value`` file in TOML syntax; unknown keys are rejected."""
    with open(path, "rb") as fh:
        data = tomllib.load(fh)
    unknown = set(data) - _CONFIG_KEYS
    if unknown:
        raise ValueError(f"{path}: unknown keys {sorted(unknown)}")
    return data


def _experiment_settings(args: argparse.Namespace) -> dict:
    cfg = load_config(args.config) if args.config else {}
    flags = {
        "seed": args.seed,
        "schemes": args.schemes,
        "s": args.s,
        "gamma": args.gamma,
        "alpha": args.alpha,
        "m_min": args.m_min,
        "m_max": args.m_max,
        "r": args.r,
        "out_csv": args.out_csv,
        "out_svg": args.out_svg,
        "threads": args.threads,
        "budget": args.budget,
    }
    cfg.update({k: v for k, v in flags.items() if v is not None})
    if args.full:
        cfg["full"] = True
    return cfg


def grid_from_settings(cfg: dict) -> ExperimentGrid:
    defaults = ExperimentGrid()
    m_min = int(cfg.get("m_min", defaults.m_range[0]))
    m_max = int(cfg.get("m_max", defaults.m_range[-1]))
    return ExperimentGrid(
        s_list=tuple(int(x) for x in cfg.get("s", defaults.s_list)),
        gamma_list=tuple(float(x) for x in cfg.get("gamma", defaults.gamma_list)),
        alpha_list=tuple(int(x) for x in cfg.get("alpha", defaults.alpha_list)),
        m_range=tuple(range(m_min, m_max + 1)),
        r=int(cfg.get("r", defaults.r)),
        schemes=tuple(cfg.get("schemes", defaults.schemes)),
        master_seed=int(cfg.get("seed", defaults.master_seed)),
        full=bool(cfg.get("full", False)),
        budget=int(cfg.get("budget", DEFAULT_BUDGET)),
    )


def cmd_experiment(args: argparse.Namespace) -> int:
    cfg = _experiment_settings(args)
    grid = grid_from_settings(cfg)
    t0 = time.perf_counter()
    rows = run_experiment(grid, workers=int(cfg.get("threads", 1)))
    elapsed = time.perf_counter() - t0
    out_csv = cfg.get("out_csv")
    if out_csv:
        emit_csv(rows, out_csv)
    else:
        w = csv.writer(sys.stdout, lineterminator="\n")
        w.writerow(CSV_HEADER)
        for r in rows:
            w.writerow([r.scheme, r.s, f"{r.gamma:.17g}", r.alpha, r.m, r.r, r.seed, f"{r.estimate:.17g}", f"{r.abs_error:.17g}"])
    if cfg.get("out_svg"):
        emit_svg(rows, cfg["out_svg"])
    if args.replicates:
        emit_replicates(rows, args.replicates)
    curves: dict[tuple, list] = {}
    for r in rows:
        curves.setdefault((r.scheme, r.s, r.gamma, r.alpha), []).append(r)
    for key, curve in curves.items():
        try:
            slope = fit_slope(curve, curve[0].m, curve[-1].m)
        except ValueError:
            continue
        print(f"slope {key[0]} s={key[1]} gamma={key[2]:g} alpha={key[3]}: {slope:.3f}", file=sys.stderr)
    print(f"{len(rows)} rows in {elapsed:.1f}s", file=sys.stderr)
    return 0


def cmd_points(args: argparse.Namespace) -> int:
    scheme = netgen.RandomizationScheme(args.scheme)
    net = netgen.randomize(scheme, args.s, args.m, ReplicateStreams.derive(args.seed, args.replicate), zero_shift=args.no_shift)
    block = netgen.generate_points(net)
    if args.out:
        with open(args.out, "w", newline="") as fh:
            netgen.export_points_csv(block, fh)
    else:
        netgen.export_points_csv(block, sys.stdout)
    return 0


def cmd_estimate(args: argparse.Namespace) -> int:
    f = ProductTestFunction(args.s, args.gamma, args.alpha)
    cfg = EstimatorConfig(
        m=args.m, r=args.r, scheme=netgen.RandomizationScheme(args.scheme), s=args.s,
        master_seed=args.seed, workers=args.threads,
    )
    med, mean = median_and_mean(f, cfg)
    print(f"median ({med.scheme}): {med.value:.17g}  abs_error {abs(med.value - 1):.3e}")
    print(f"mean   (STD): {mean.value:.17g}  abs_error {abs(mean.value - 1):.3e}")
    print(f"evaluations: {med.n_evals}")
    return 0


def cmd_bound(args: argparse.Namespace) -> int:
    params = theory.SmoothnessParams(args.alpha, args.lam, args.theta, args.theta_prime, args.d)
    t_tilde = None
    if args.t_source == "niederreiter":
        # t_u + |u| - 1 <= sum_{j in u} (t-bound_j + 1)
        t_tilde = tuple(theory.niederreiter_t_bound([j]) + 1.0 for j in range(1, args.s + 1))
    weights = theory.ProductWeights(tuple(j ** -args.gamma for j in range(1, args.s + 1)), t_tilde)
    w = csv.writer(sys.stdout, lineterminator="\n")
    w.writerow(["theorem", "m", "r", "threshold", "failure_prob"])
    for m in range(args.m_min, args.m_max + 1):
        cert = theory.certificate(args.theorem, m, args.r, params, weights, args.f_norm)
        w.writerow([cert.theorem, m, args.r, f"{cert.threshold:.17g}", f"{cert.failure_prob:.17g}"])
    if params.small_d and t_tilde is not None:
        rep = theory.tractability_check(weights.gamma, t_tilde, params)
        print(
            f"tractability: phi={rep.phi:.4f} partial_sum={rep.partial_sums[-1]:.6g} "
            f"tail_exponent={rep.tail_exponent:.3f} verdict={rep.verdict}",
            file=sys.stderr,
        )
    return 0


def cmd_verify(args: argparse.Namespace) -> int:
    results = run_suite(args.tier)
    for r in results:
        print(f"{'PASS' if r.passed else 'FAIL'}  {r.name}: {r.detail} ({r.seconds:.2f}s)")
    ok = all(r.passed for r in results)
    print(f"{sum(r.passed for r in results)}/{len(results)} checks passed")
    return 0 if ok else 1


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="medianqmc", description=__doc__)
    sub = p.add_subparsers(dest="command", required=True)

    e = sub.add_parser("experiment", help="run the convergence grid and write CSV/SVG")
    e.add_argument("--config", metavar="PATH", help="TOML key = value file; flags override it")
    e.add_argument("--seed", type=int, help="master seed (unsigned 64-bit)")
    e.add_argument("--schemes", type=_str_list, help=f"comma list from {','.join(SCHEME_ORDER)}")
    e.add_argument("--s", type=_int_list, help="comma list of dimensions")
    e.add_argument("--gamma", type=_float_list, help="comma list of decay exponents")
    e.add_argument("--alpha", type=_int_list, help="comma list from 0,1")
    e.add_argument("--m-min", type=int)
    e.add_argument("--m-max", type=int)
    e.add_argument("--r", type=int, help="replicate parameter; 2r-1 nets per cell")
    e.add_argument("--out-csv", metavar="PATH")
    e.add_argument("--out-svg", metavar="DIR")
    e.add_argument("--full", action="store_true", help="include s=1000 and m>=13 cells")
    e.add_argument("--threads", type=int)
    e.add_argument("--budget", type=int, help=f"max coordinate evaluations (default {DEFAULT_BUDGET:.0e})")
    e.add_argument("--replicates", metavar="PATH", help="debug: dump per-cell replicate values")
    e.set_defaults(func=cmd_experiment)

    pts = sub.add_parser("points", help="export one randomized net as CSV")
    pts.add_argument("--scheme", default="RLS", choices=netgen.RandomizationScheme.TAGS)
    pts.add_argument("--s", type=int, default=2)
    pts.add_argument("--m", type=int, default=3)
    pts.add_argument("--seed", type=int, default=0)
    pts.add_argument("--replicate", type=int, default=0)
    pts.add_argument("--no-shift", action="store_true", help="skip the digital shift")
    pts.add_argument("--out", metavar="PATH")
    pts.set_defaults(func=cmd_points)

    est = sub.add_parser("estimate", help="median and mean estimates for one test integrand")
    est.add_argument("--scheme", default="RLS", choices=("RLS", "CRD"))
    est.add_argument("--s", type=int, default=10)
    est.add_argument("--gamma", type=float, default=3.0)
    est.add_argument("--alpha", type=int, default=0, choices=(0, 1))
    est.add_argument("--m", type=int, default=10)
    est.add_argument("--r", type=int, default=10)
    est.add_argument("--seed", type=int, default=0)
    est.add_argument("--threads", type=int, default=1)
    est.set_defaults(func=cmd_estimate)

    b = sub.add_parser("bound", help="error-bound certificates for product weights j**-gamma")
    b.add_argument("--theorem", default="T1_CRD", choices=theory.THEOREMS)
    b.add_argument("--s", type=int, default=10)
    b.add_argument("--gamma", type=float, default=3.0)
    b.add_argument("--alpha", type=int, default=0)
    b.add_argument("--lam", type=float, default=1.0)
    b.add_argument("--theta", type=float, default=0.5)
    b.add_argument("--theta-prime", type=float, default=0.5)
    b.add_argument("--d", type=int, default=1)
    b.add_argument("--r", type=int, default=10)
    b.add_argument("--m-min", type=int, default=1)
    b.add_argument("--m-max", type=int, default=16)
    b.add_argument("--f-norm", type=float, default=1.0)
    b.add_argument("--t-source", choices=("none", "niederreiter"), default="none",
                   help="per-coordinate t-values for T2/T3 (none means zero)")
    b.set_defaults(func=cmd_bound)

    v = sub.add_parser("verify", help="run the built-in invariant suites")
    v.add_argument("--tier", choices=TIERS, default="small")
    v.set_defaults(func=cmd_verify)
    return p


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
