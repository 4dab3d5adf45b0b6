"""Compare the CRD squared-error certificate with observed squared errors of the median estimator.

For each m the script prints the certificate, the empirical quantiles of the squared error over
seeded trials, and the fraction of trials the certificate covers.
"""

import argparse

import numpy as np

from medianqmc import theory
from medianqmc.estimator import EstimatorConfig, median_estimate
from medianqmc.netgen import RandomizationScheme
from medianqmc.rng import cell_seed
from medianqmc.testfns import ProductTestFunction


def main():
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--s", type=int, default=10)
    p.add_argument("--gamma", type=float, default=3.0)
    p.add_argument("--alpha", type=int, default=0, choices=(0, 1))
    p.add_argument("--r", type=int, default=10)
    p.add_argument("--m", type=int, nargs="+", default=[4, 6, 8, 10])
    p.add_argument("--trials", type=int, default=200)
    p.add_argument("--theta", type=float, default=0.5)
    p.add_argument("--best-theta", action="store_true", help="search theta on a grid for each m")
    args = p.parse_args()

    f = ProductTestFunction(args.s, args.gamma, args.alpha)
    weights = theory.ProductWeights(tuple(f.weights))
    # the test integrands have Hoelder exponent 1 in the derivative of order alpha
    params = theory.SmoothnessParams(alpha=args.alpha, lam=1.0, theta=args.theta)
    print("m,theta,threshold,err2_median,err2_q99,err2_max,covered")
    for m in args.m:
        if args.best_theta:
            theta, cert = theory.best_theta("T1_CRD", m, args.r, params, weights)
        else:
            theta, cert = args.theta, theory.certificate("T1_CRD", m, args.r, params, weights, scheme="CRD")
        err2 = np.array([
            (median_estimate(f, EstimatorConfig(m, args.r, RandomizationScheme.crd(), args.s, cell_seed(8, t, m))).value - 1.0) ** 2
            for t in range(args.trials)
        ])
        covered = float(np.mean(err2 <= cert.threshold))
        print(
            f"{m},{theta:g},{cert.threshold:.4e},{np.median(err2):.4e},{np.quantile(err2, 0.99):.4e},"
            f"{err2.max():.4e},{covered:.3f}"
        )


if __name__ == "__main__":
    main()
