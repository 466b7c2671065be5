#!/usr/bin/env python3
"""Train and score the reference Lorenz model, printing the key diagnostics.

Usage: python3 scripts/reference_run.py [--seed N] [--k K] [--beta B]
"""

import argparse

import numpy as np

import ngrc
from ngrc import dynamics, forecast, metrics
from ngrc.config import NgrcConfig


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--seed", type=int, default=1)
    parser.add_argument("--k", type=int, default=1)
    parser.add_argument("--tau", type=int, default=1)
    parser.add_argument("--beta", type=float, default=0.0)
    parser.add_argument("--n-train", type=int, default=500)
    parser.add_argument("--n-test", type=int, default=10000)
    args = parser.parse_args()

    config = NgrcConfig(
        k=args.k, tau=args.tau, p=2, beta=args.beta,
        n_train=args.n_train, n_test=args.n_test,
        solvers=["all"], seed=args.seed,
    )
    traj = dynamics.normalize(
        dynamics.generate(
            config.system, config.integrator, config.seed, config.h, config.n_samples() - 1
        )
    )
    report = ngrc.train(traj, config)
    print(f"kappa(psi)      = {report.kappa:.6g}")
    print(f"kappa(psi_hat)  = {report.kappa_hat:.6g}")
    if report.kappa_beta is not None:
        print(f"kappa_beta      = {report.kappa_beta:.6g}")
    for solver, angles in report.theta.items():
        shown = ["-" if a is None else f"{a:.5e}" for a in angles]
        print(f"theta[{solver.value:8s}] = {shown}")
    print(f"delta           = {report.delta if report.delta is not None else '-'}")

    result = forecast.rollout(
        report.readouts[ngrc.SolverId.SVD], traj, config, config.n_test,
        bounded_margin=config.bounded_margin,
    )
    truth = traj.states[config.n_train : config.n_train + config.n_test]
    scored = metrics.compute_metrics(
        truth[: len(result.states)], result, traj.h,
        metrics.LYAPUNOV_EXPONENT[config.system],
    )
    print(f"bounded         = {scored.bounded}")
    print(f"vpt             = {scored.vpt:.4g} Lyapunov times")
    print(f"d_maxima        = {scored.d_maxima}")
    print(f"e_psd           = {scored.e_psd}")


if __name__ == "__main__":
    main()
