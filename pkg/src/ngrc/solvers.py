"""Regularized least-squares solvers with conditioning and fit diagnostics."""

from __future__ import annotations

import csv
import json
import math
import warnings
from dataclasses import dataclass
from enum import Enum
from pathlib import Path

import numpy as np
import scipy.linalg

from .dynamics import DegenerateDataError, Trajectory
from .features import DesignSet, MonomialBasis, EmbeddingConfig, build_design, monomial_exponents

EPS_MACHINE = 2.220446049250313e-16  # binary64
KAPPA_SENTINEL = 1.0 / EPS_MACHINE


class SolverId(str, Enum):
    CHOLESKY = "cholesky"
    SVD = "svd"
    LU = "lu"


ALL_SOLVERS = (SolverId.CHOLESKY, SolverId.SVD, SolverId.LU)


class SolverFailure(RuntimeError):
    """A factorization could not produce a solution."""

    def __init__(self, solver: SolverId, reason: str):
        self.solver = solver
        self.reason = reason
        super().__init__(f"{solver.value}: {reason}")


def _normal_matrix(psi: np.ndarray, beta: float) -> np.ndarray:
    a = psi.T @ psi
    if beta:
        a = a + beta * np.eye(a.shape[0])
    return a


def cholesky_solution(psi: np.ndarray, y: np.ndarray, beta: float) -> np.ndarray:
    """Solve the regularized normal equation by a positive-definite factorization."""
    if beta < 0:
        raise ValueError("beta must be nonnegative")
    a = _normal_matrix(psi, beta)
    b = psi.T @ y
    try:
        with warnings.catch_warnings():
            # Accuracy warnings on near-singular systems are expected here;
            # the closeness-of-fit diagnostic reports the damage.
            warnings.simplefilter("ignore", scipy.linalg.LinAlgWarning)
            return scipy.linalg.solve(a, b, assume_a="pos")
    except np.linalg.LinAlgError as exc:
        raise SolverFailure(SolverId.CHOLESKY, f"matrix not positive definite ({exc})") from exc


def svd_filter_factors(singular_values: np.ndarray, beta: float) -> np.ndarray:
    if beta > 0:
        return singular_values / (singular_values**2 + beta)
    # Minimum-norm convention at beta = 0: exactly-zero singular values
    # contribute nothing.
    return np.divide(
        1.0,
        singular_values,
        out=np.zeros_like(singular_values),
        where=singular_values > 0,
    )


def svd_solution(psi: np.ndarray, y: np.ndarray, beta: float) -> np.ndarray:
    """Regularized pseudo-inverse solution through the SVD of psi."""
    if beta < 0:
        raise ValueError("beta must be nonnegative")
    try:
        u, s, vt = scipy.linalg.svd(psi, full_matrices=False)
    except np.linalg.LinAlgError as exc:  # pragma: no cover - not seen at these sizes
        raise SolverFailure(SolverId.SVD, f"SVD did not converge ({exc})") from exc
    factors = svd_filter_factors(s, beta)
    return vt.T @ (factors * (u.T @ y))


def lu_solution(psi: np.ndarray, y: np.ndarray, beta: float) -> np.ndarray:
    """Literal normal-equation path: explicitly invert (psi^T psi + beta I)."""
    if beta < 0:
        raise ValueError("beta must be nonnegative")
    a = _normal_matrix(psi, beta)
    try:
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", scipy.linalg.LinAlgWarning)
            a_inv = scipy.linalg.inv(a)
    except np.linalg.LinAlgError as exc:
        raise SolverFailure(SolverId.LU, f"exactly singular pivot ({exc})") from exc
    return a_inv @ (psi.T @ y)


_ARRAY_SOLVERS = {
    SolverId.CHOLESKY: cholesky_solution,
    SolverId.SVD: svd_solution,
    SolverId.LU: lu_solution,
}


def solve_cholesky(design: DesignSet, coordinate: int, beta: float) -> np.ndarray:
    return cholesky_solution(design.psi, design.target(coordinate), beta)


def solve_svd(design: DesignSet, coordinate: int, beta: float) -> np.ndarray:
    return svd_solution(design.psi, design.target(coordinate), beta)


def solve_lu(design: DesignSet, coordinate: int, beta: float) -> np.ndarray:
    return lu_solution(design.psi, design.target(coordinate), beta)


def condition_number(psi: np.ndarray) -> float:
    """sigma_max / sigma_min; an exactly-zero sigma_min maps to 1/eps_machine."""
    psi = np.asarray(psi, dtype=float)
    if psi.size == 0:
        raise ValueError("matrix is empty")
    s = scipy.linalg.svdvals(psi)
    if s[0] == 0.0 or s[-1] == 0.0:
        return KAPPA_SENTINEL
    kappa = s[0] / s[-1]
    if not math.isfinite(kappa):
        return KAPPA_SENTINEL
    return float(kappa)


def regularized_condition_number(psi: np.ndarray, beta: float) -> float:
    """sigma_1 / sqrt(beta), the effective conditioning under ridge regularization."""
    if beta <= 0:
        raise ValueError("beta must be positive")
    s = scipy.linalg.svdvals(psi)
    return float(s[0] / math.sqrt(beta))


def relative_error_bound(
    kappa: float, theta: float | None, eps: float = EPS_MACHINE
) -> float | None:
    """First-order perturbation bound on the relative least-squares error,
    eps * (2 kappa / cos(theta) + tan(theta) kappa^2).

    A diagnostic, not a guarantee: it assumes perturbations of relative size
    eps and is only valid while eps * kappa < 1 and sin(theta) != 1; outside
    that region (or for an undefined fit angle) it returns None.
    """
    if theta is None:
        return None
    if eps * kappa >= 1.0 or math.sin(theta) >= 1.0:
        return None
    return eps * (2.0 * kappa / math.cos(theta) + math.tan(theta) * kappa**2)


def closeness_of_fit(design: DesignSet, coordinate: int, w: np.ndarray) -> float | None:
    """arcsin of the relative residual norm, or None when the ratio exceeds 1.

    A ratio above 1 can arise from garbage solutions; it is reported as
    undefined rather than clamped.
    """
    y = design.target(coordinate)
    return residual_angle(design.psi, y, w)


def residual_angle(psi: np.ndarray, y: np.ndarray, w: np.ndarray) -> float | None:
    norm_y = np.linalg.norm(y)
    if norm_y == 0.0:
        raise DegenerateDataError("target vector has zero norm")
    ratio = np.linalg.norm(y - psi @ w) / norm_y
    if ratio > 1.0:
        return None
    return float(math.asin(ratio))


@dataclass
class ReadoutMatrix:
    """Trained readout: one row per coordinate; failed rows are identically zero."""

    W: np.ndarray
    beta: float
    solver: SolverId
    per_coordinate_failed: np.ndarray

    @property
    def d(self) -> int:
        return self.W.shape[0]

    @property
    def m(self) -> int:
        return self.W.shape[1]

    @property
    def any_failed(self) -> bool:
        return bool(self.per_coordinate_failed.any())


def pairwise_diff(readouts) -> float | None:
    """Largest pairwise distance between solver solutions, per coordinate.

    Only coordinates where at least two solvers succeeded contribute; returns
    None when no coordinate qualifies.
    """
    readouts = list(readouts)
    if len(readouts) < 2:
        return None
    d = readouts[0].d
    best = None
    for i in range(d):
        rows = [r.W[i] for r in readouts if not r.per_coordinate_failed[i]]
        if len(rows) < 2:
            continue
        for a in range(len(rows)):
            for b in range(a + 1, len(rows)):
                dist = float(np.linalg.norm(rows[a] - rows[b]))
                if best is None or dist > best:
                    best = dist
    return best


@dataclass
class TrainReport:
    """Readouts for each requested solver plus conditioning and fit diagnostics."""

    readouts: dict
    kappa: float
    kappa_hat: float
    kappa_beta: float | None
    sigma: np.ndarray
    theta: dict
    theta_max: dict
    delta: float | None
    beta: float
    n_train: int
    k: int
    tau: int
    p: int

    def readout(self, solver: SolverId) -> ReadoutMatrix:
        return self.readouts[solver]


def _train_solver(
    solver: SolverId,
    design: DesignSet,
    beta: float,
    svd_factors=None,
) -> ReadoutMatrix:
    d = design.d
    m = design.basis.m
    W = np.zeros((d, m))
    failed = np.zeros(d, dtype=bool)
    if solver is SolverId.SVD and svd_factors is not None:
        u, s, vt = svd_factors
        factors = svd_filter_factors(s, beta)
        for i in range(d):
            W[i] = vt.T @ (factors * (u.T @ design.target(i)))
        return ReadoutMatrix(W=W, beta=beta, solver=solver, per_coordinate_failed=failed)
    solve = _ARRAY_SOLVERS[solver]
    for i in range(d):
        try:
            W[i] = solve(design.psi, design.target(i), beta)
        except SolverFailure:
            failed[i] = True
    return ReadoutMatrix(W=W, beta=beta, solver=solver, per_coordinate_failed=failed)


def train(traj: Trajectory, config, solvers=None) -> TrainReport:
    """Build the design once, run every requested solver on all coordinates,
    and assemble the full diagnostic report.

    Per-coordinate solver failures are recorded as flags (with zero readout
    rows), never raised.
    """
    solvers = list(solvers if solvers is not None else config.solvers)
    cfg = EmbeddingConfig(k=config.k, tau=config.tau, d=traj.dim)
    basis = monomial_exponents(config.k, traj.dim, config.p)
    design = build_design(traj, cfg, basis, config.n_train)
    return train_design(design, config.beta, solvers)


def train_design(design: DesignSet, beta: float, solvers) -> TrainReport:
    solvers = list(solvers)
    u, s, vt = scipy.linalg.svd(design.psi, full_matrices=False)
    kappa = KAPPA_SENTINEL if s[-1] == 0.0 or s[0] == 0.0 else float(s[0] / s[-1])
    if not math.isfinite(kappa):
        kappa = KAPPA_SENTINEL
    kappa_hat = condition_number(design.psi_hat)
    kappa_beta = float(s[0] / math.sqrt(beta)) if beta > 0 else None
    readouts = {}
    theta = {}
    theta_max = {}
    for solver in solvers:
        readout = _train_solver(solver, design, beta, svd_factors=(u, s, vt))
        angles = []
        for i in range(design.d):
            if readout.per_coordinate_failed[i]:
                angles.append(None)
            else:
                angles.append(closeness_of_fit(design, i, readout.W[i]))
        defined = [a for a in angles if a is not None]
        readouts[solver] = readout
        theta[solver] = angles
        theta_max[solver] = max(defined) if defined else None
    delta = pairwise_diff(readouts.values()) if len(solvers) >= 2 else None
    return TrainReport(
        readouts=readouts,
        kappa=kappa,
        kappa_hat=kappa_hat,
        kappa_beta=kappa_beta,
        sigma=s,
        theta=theta,
        theta_max=theta_max,
        delta=delta,
        beta=beta,
        n_train=design.n_train,
        k=design.config.k,
        tau=design.config.tau,
        p=design.basis.p,
    )


# ---------------------------------------------------------------------------
# Serialization


def report_to_dict(report: TrainReport) -> dict:
    return {
        "kappa": report.kappa,
        "kappa_hat": report.kappa_hat,
        "kappa_beta": report.kappa_beta,
        "sigma": [float(v) for v in report.sigma],
        "delta": report.delta,
        "beta": report.beta,
        "n_train": report.n_train,
        "k": report.k,
        "tau": report.tau,
        "p": report.p,
        "solvers": {
            solver.value: {
                "theta": report.theta[solver],
                "theta_max": report.theta_max[solver],
                "failed": report.readouts[solver].per_coordinate_failed.tolist(),
            }
            for solver in report.readouts
        },
    }


def report_to_json(report: TrainReport, indent: int = 2) -> str:
    return json.dumps(report_to_dict(report), indent=indent, sort_keys=True)


def write_readout_csv(readout: ReadoutMatrix, basis: MonomialBasis, path: str | Path) -> None:
    """m rows by d columns, one row per monomial, with exponent and name headers."""
    d = readout.d
    with Path(path).open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["exponents", "monomial"] + [f"w_x{i + 1}" for i in range(d)])
        names = basis.names()
        for j in range(readout.m):
            exps = ".".join(str(int(e)) for e in basis.exponents[j])
            writer.writerow([exps, names[j]] + [repr(float(v)) for v in readout.W[:, j]])


def read_readout_csv(path: str | Path) -> np.ndarray:
    """Recover the (d, m) readout matrix written by write_readout_csv."""
    with Path(path).open(newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        if len(header) < 3 or header[0] != "exponents":
            raise ValueError(f"{path}: not a readout CSV")
        cols = len(header) - 2
        rows = [[float(v) for v in row[2:]] for row in reader]
    W = np.asarray(rows).T
    if W.shape[0] != cols:
        raise ValueError(f"{path}: inconsistent readout shape")
    return W
