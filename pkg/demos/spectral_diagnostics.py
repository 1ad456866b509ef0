#!/usr/bin/env python3
"""
Two diagnostics behind the convergence analysis.

First: the eigenprojection perturbation bound
||Phat_j - P_j|| <= 4 ||Mhat - M|| / delta_j, checked replication by
replication. Second: the effective-dimension sum sum_j lambda_j/(lambda_j+eps)
for lambda_j = j^(-alpha), whose log-log slope in eps approaches -1/alpha.
"""

import numpy as np

from gsir.experiments import derive_seed
from gsir.rates import fit_loglog_slope
from gsir.seqsim import (build_model, error_report, estimate_regression_ops,
                         lemma_alpha_sum, power_spectrum, simulate_sample)

SEED = 7


def projection_bound_table():
    model = build_model(80, 2, alpha=2.0, beta=1.0, s_kind="identity")
    print("eigenprojection bound at n=2000, eps=n^(-2/7), 8 replications")
    print(f"{'rep':>4} {'|Mhat-M|':>10} {'proj err 1':>11} {'bound 1':>9} "
          f"{'proj err 2':>11} {'bound 2':>9} {'ok':>4}")
    print("-" * 64)
    eps = 2000.0 ** (-2.0 / 7.0)
    for rep in range(8):
        sample = simulate_sample(model, 2000, derive_seed(SEED, 2000, rep))
        rec = error_report(model, estimate_regression_ops(sample, eps))
        bounds = [4.0 * rec.err_m / g if g > 0 else np.inf for g in rec.gap]
        ok = all(rec.bound_ok[j] for j in range(rec.d) if rec.bound_applicable[j])
        print(f"{rep:>4} {rec.err_m:>10.5f} {rec.proj_err[0]:>11.5f} "
              f"{bounds[0]:>9.4f} {rec.proj_err[1]:>11.5f} {bounds[1]:>9.4f} "
              f"{str(ok):>4}")


def lemma_slope_table():
    eps_grid = [1e-2, 1e-3, 1e-4, 1e-5]
    print("\neffective dimension sum, J = 100000")
    print(f"{'alpha':>6} " + " ".join(f"{e:>9.0e}" for e in eps_grid)
          + f" {'slope':>8} {'-1/alpha':>9}")
    print("-" * 64)
    for alpha in (1.5, 2.0, 3.0):
        lam = power_spectrum(alpha, 10 ** 5)
        sums = [lemma_alpha_sum(lam, eps) for eps in eps_grid]
        slope = fit_loglog_slope(eps_grid, sums).slope
        print(f"{alpha:>6.1f} " + " ".join(f"{s:>9.1f}" for s in sums)
              + f" {slope:>8.4f} {-1.0 / alpha:>9.4f}")


def main():
    print("=" * 64)
    projection_bound_table()
    lemma_slope_table()


if __name__ == "__main__":
    main()
