"""Autonomous rollout of a trained model and boundedness checks."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .dynamics import Trajectory
from .features import monomial_exponents
from .solvers import ReadoutMatrix

ESCAPE_THRESHOLD = 10.0


@dataclass
class ForecastResult:
    """Autonomous trajectory prefix plus boundedness flags.

    states holds the computed prefix (the full n_test rows unless the rollout
    was halted by a numerical blow-up). The first (k-1)*tau + 1 rows are the
    warm-up copied from the training tail.
    """

    states: np.ndarray
    bounded: bool
    escape_index: int | None
    warmup_used: np.ndarray
    n_requested: int

    def __len__(self) -> int:
        return self.states.shape[0]


def is_bounded(states: np.ndarray, box_half_width: float = 1.0):
    """True when every component stays inside [-w, w]; also returns the index
    of the first violation (None when bounded)."""
    states = np.atleast_2d(np.asarray(states, dtype=float))
    with np.errstate(invalid="ignore"):
        outside = ~(np.abs(states) <= box_half_width).all(axis=1)
    if outside.any():
        return False, int(np.argmax(outside))
    return True, None


def rollout(
    readout,
    traj: Trajectory,
    config,
    n_test: int,
    escape_threshold: float = ESCAPE_THRESHOLD,
    bounded_margin: float = 1.0,
) -> ForecastResult:
    """Iterate the learned one-step map from the training tail.

    The warm-up block (states n_train .. n_train + (k-1)*tau of the training
    trajectory) is copied, never re-simulated. Iteration halts early when any
    component leaves [-escape_threshold, escape_threshold] or turns non-finite;
    the prefix computed so far is returned with bounded=False.
    """
    W = readout.W if isinstance(readout, ReadoutMatrix) else np.asarray(readout, dtype=float)
    k, tau, p, n_train = config.k, config.tau, config.p, config.n_train
    d = W.shape[0]
    if traj.dim != d:
        raise ValueError(f"readout is {d}-dimensional but trajectory has {traj.dim}")
    basis = monomial_exponents(k, d, p)
    if W.shape[1] != basis.m:
        raise ValueError(
            f"readout has {W.shape[1]} columns but the (k={k}, d={d}, p={p}) basis has {basis.m}"
        )
    w = (k - 1) * tau
    if len(traj) < n_train + w + 1:
        raise ValueError(
            f"trajectory has {len(traj)} points; warm-up needs {n_train + w + 1}"
        )
    if n_test < 1:
        raise ValueError("n_test must be at least 1")
    warmup = traj.states[n_train : n_train + w + 1].copy()

    states = np.empty((n_test, d))
    fill = min(w + 1, n_test)
    states[:fill] = warmup[:fill]
    filled = fill
    halted = False
    scale = 1.0 / math.sqrt(n_train)
    exps = basis.exponents
    for n in range(w, n_test - 1):
        X = states[n - w : n + 1 : tau].reshape(-1)
        phi = np.prod(np.power(X, exps), axis=1)
        new = states[n] + scale * (W @ phi)
        if not np.isfinite(new).all() or np.abs(new).max() > escape_threshold:
            if np.isfinite(new).all():
                states[n + 1] = new
                filled = n + 2
            halted = True
            break
        states[n + 1] = new
        filled = n + 1 + 1
    states = states[:filled]
    inside, escape_index = is_bounded(states, bounded_margin)
    if inside and halted:
        # Only the unstored non-finite state broke the box; point past the
        # computed prefix.
        escape_index = filled
    bounded = inside and not halted
    return ForecastResult(
        states=states,
        bounded=bounded,
        escape_index=None if bounded else escape_index,
        warmup_used=warmup,
        n_requested=n_test,
    )
