"""Delay embedding, multivariate monomial bases, and design-matrix assembly."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from itertools import combinations_with_replacement
from pathlib import Path

import numpy as np

from .dynamics import Trajectory

MAX_BASIS_SIZE = 2_000_000


@dataclass(frozen=True)
class EmbeddingConfig:
    """Delay-embedding geometry: k delayed copies of a d-dimensional state, lag tau."""

    k: int
    tau: int
    d: int

    def __post_init__(self):
        if self.k < 1 or self.tau < 1 or self.d < 1:
            raise ValueError("k, tau and d must all be at least 1")

    @property
    def warmup(self) -> int:
        return (self.k - 1) * self.tau

    @property
    def dim(self) -> int:
        return self.k * self.d


@dataclass(frozen=True)
class MonomialBasis:
    """All monomials of total degree <= p in k*d variables, graded-lex ordered.

    exponents has shape (m, k*d); the constant monomial (all zeros) comes
    first, and m = C(k*d + p, p).
    """

    k: int
    d: int
    p: int
    exponents: np.ndarray

    def __post_init__(self):
        self.exponents.setflags(write=False)

    @property
    def m(self) -> int:
        return self.exponents.shape[0]

    @property
    def n_vars(self) -> int:
        return self.k * self.d

    def __len__(self) -> int:
        return self.m

    def names(self) -> list[str]:
        """Human-readable monomial names; variable i of delay block j is x{i+1}_d{j}."""
        out = []
        for exps in self.exponents:
            parts = []
            for q, e in enumerate(exps):
                if e == 0:
                    continue
                j, i = divmod(q, self.d)
                var = f"x{i + 1}" if j == 0 else f"x{i + 1}_d{j}"
                parts.append(var if e == 1 else f"{var}^{e}")
            out.append("*".join(parts) if parts else "1")
        return out


def monomial_exponents(k: int, d: int, p: int) -> MonomialBasis:
    """Enumerate every multi-index with total degree <= p over k*d variables.

    Ordering is graded lexicographic: ascending total degree, and within a
    degree the power rests on earlier variables first.
    """
    if k < 1 or d < 1:
        raise ValueError("k and d must be at least 1")
    if p < 0:
        raise ValueError("p must be nonnegative")
    n_vars = k * d
    m = math.comb(n_vars + p, p)
    if m > MAX_BASIS_SIZE:
        raise ValueError(f"basis size {m} exceeds the supported maximum {MAX_BASIS_SIZE}")
    rows = np.zeros((m, n_vars), dtype=np.int64)
    r = 0
    for degree in range(p + 1):
        for combo in combinations_with_replacement(range(n_vars), degree):
            for q in combo:
                rows[r, q] += 1
            r += 1
    assert r == m
    return MonomialBasis(k=k, d=d, p=p, exponents=rows)


def embed(traj: Trajectory, cfg: EmbeddingConfig, n: int) -> np.ndarray:
    """vec(x_n, x_{n+tau}, ..., x_{n+(k-1)tau}) for the given start index."""
    if n < 0 or n + cfg.warmup >= len(traj):
        raise ValueError(
            f"embedding at index {n} needs {n + cfg.warmup + 1} points, "
            f"trajectory has {len(traj)}"
        )
    return np.concatenate([traj.states[n + j * cfg.tau] for j in range(cfg.k)])


def embedded_matrix(states: np.ndarray, cfg: EmbeddingConfig, n_rows: int) -> np.ndarray:
    """Rows r = 0..n_rows-1 of the embedded coordinates, shape (n_rows, k*d)."""
    if n_rows + cfg.warmup > states.shape[0]:
        raise ValueError(
            f"need {n_rows + cfg.warmup} points for {n_rows} embedded rows, "
            f"have {states.shape[0]}"
        )
    return np.hstack([states[j * cfg.tau : j * cfg.tau + n_rows] for j in range(cfg.k)])


def feature_vector(X, basis: MonomialBasis) -> np.ndarray:
    """Evaluate every basis monomial at the embedded point X."""
    X = np.asarray(X, dtype=float)
    return np.prod(np.power(X, basis.exponents), axis=1)


def feature_rows(embedded: np.ndarray, basis: MonomialBasis) -> np.ndarray:
    """Monomial evaluations for each embedded row; shape (n_rows, m).

    Uses per-variable power tables so each entry costs one multiply per
    variable instead of a float pow.
    """
    n_rows, n_vars = embedded.shape
    if n_vars != basis.n_vars:
        raise ValueError(f"embedded dimension {n_vars} does not match basis {basis.n_vars}")
    out = np.ones((n_rows, basis.m))
    max_p = basis.p
    for q in range(n_vars):
        table = np.empty((n_rows, max_p + 1))
        table[:, 0] = 1.0
        col = embedded[:, q]
        for e in range(1, max_p + 1):
            table[:, e] = table[:, e - 1] * col
        out *= table[:, basis.exponents[:, q]]
    return out


@dataclass
class DesignSet:
    """Feature matrix (scaled by 1/sqrt(n_train)), its column-weighted variant,
    and the per-coordinate one-step difference targets."""

    psi: np.ndarray
    psi_hat: np.ndarray
    targets: np.ndarray  # (n_train, d)
    column_norms: np.ndarray
    zero_columns: np.ndarray
    config: EmbeddingConfig
    basis: MonomialBasis
    n_train: int

    def target(self, coordinate: int) -> np.ndarray:
        return self.targets[:, coordinate]

    @property
    def d(self) -> int:
        return self.targets.shape[1]


def column_weight(psi: np.ndarray):
    """Scale every nonzero column to unit Euclidean norm.

    Returns (psi_hat, norms, zero_columns); zero columns are flagged and left
    untouched rather than divided.
    """
    psi = np.asarray(psi, dtype=float)
    if psi.size == 0:
        raise ValueError("matrix is empty")
    norms = np.linalg.norm(psi, axis=0)
    zero = norms == 0.0
    psi_hat = psi / np.where(zero, 1.0, norms)
    return psi_hat, norms, zero


def build_design(
    traj: Trajectory,
    cfg: EmbeddingConfig,
    basis: MonomialBasis,
    n_train: int,
) -> DesignSet:
    """Assemble the training design: features of rows 0..n_train-1 and the
    matching one-step coordinate differences."""
    if cfg.d != traj.dim:
        raise ValueError(f"embedding dimension {cfg.d} does not match trajectory {traj.dim}")
    w = cfg.warmup
    needed = n_train + w + 1
    if len(traj) < needed:
        raise ValueError(
            f"trajectory has {len(traj)} points but the design needs at least {needed} "
            f"(n_train={n_train}, warmup={w})"
        )
    if n_train < 1:
        raise ValueError("n_train must be at least 1")
    embedded = embedded_matrix(traj.states, cfg, n_train)
    psi = feature_rows(embedded, basis) / math.sqrt(n_train)
    targets = traj.states[w + 1 : w + n_train + 1] - traj.states[w : w + n_train]
    psi_hat, norms, zero = column_weight(psi)
    return DesignSet(
        psi=psi,
        psi_hat=psi_hat,
        targets=targets,
        column_norms=norms,
        zero_columns=zero,
        config=cfg,
        basis=basis,
        n_train=n_train,
    )


@dataclass
class XSubmatrix:
    """Column-weighted three-column design {1, x_n, x_{n+tau}} on a centered
    scalar series."""

    psi_hat: np.ndarray
    column_norms: np.ndarray
    zero_columns: np.ndarray

    @property
    def degenerate(self) -> bool:
        return bool(self.zero_columns.any())


def x_submatrix(traj: Trajectory, tau: int, n_train: int, coordinate: int = 0) -> XSubmatrix:
    """Build the lag-correlation probe matrix from one coordinate.

    The series is centered over the window it uses, so for a zero-mean series
    the Gram matrix reduces to a 3x3 form whose condition number depends only
    on the lag-tau autocorrelation.
    """
    if tau < 1:
        raise ValueError("tau must be at least 1")
    needed = n_train + tau
    series = traj.states[:, coordinate]
    if series.shape[0] < needed:
        raise ValueError(f"series has {series.shape[0]} points, need {needed}")
    window = series[:needed]
    centered = window - window.mean()
    # A constant series centers to pure round-off; snap it to an exact zero
    # column so the degeneracy is flagged instead of hidden by 1e-17 noise.
    if np.abs(centered).max() <= 1e-13 * max(1.0, np.abs(window).max()):
        centered = np.zeros_like(centered)
    root_n = math.sqrt(n_train)
    cols = np.column_stack(
        [
            np.full(n_train, 1.0 / root_n),
            centered[:n_train] / root_n,
            centered[tau : tau + n_train] / root_n,
        ]
    )
    psi_hat, norms, zero = column_weight(cols)
    return XSubmatrix(psi_hat=psi_hat, column_norms=norms, zero_columns=zero)


def basis_to_json(basis: MonomialBasis) -> str:
    return json.dumps(basis.exponents.tolist())


def design_to_csv(design: DesignSet, path: str | Path) -> None:
    header = ",".join(design.basis.names())
    np.savetxt(path, design.psi, delimiter=",", header=header, comments="")
