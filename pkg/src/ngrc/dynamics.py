"""Benchmark chaotic systems, fixed-step integrators, and trajectory plumbing."""

from __future__ import annotations

import csv
import hashlib
import math
from dataclasses import dataclass, replace
from enum import Enum
from pathlib import Path

import numpy as np

SINH_GUARD = 700.0

# Lorenz-63 parameters (sigma, rho, b) and the double-scroll circuit constants.
LORENZ_SIGMA = 10.0
LORENZ_RHO = 28.0
LORENZ_B = 8.0 / 3.0

DS_R1 = 1.2
DS_R2 = 3.44
DS_R4 = 0.193
DS_ALPHA = 11.6
DS_IR = 2.25e-5

# Initial-condition sampling boxes, chosen to bracket each attractor. The long
# transient discard makes the exact distribution immaterial.
LORENZ_IC_LOW = (-15.0, -15.0, 10.0)
LORENZ_IC_HIGH = (15.0, 15.0, 40.0)
DS_IC_HALF_WIDTH = 0.5


class SystemId(str, Enum):
    LORENZ63 = "lorenz63"
    DOUBLE_SCROLL = "doublescroll"

    @property
    def dim(self) -> int:
        return 3


class IntegratorId(str, Enum):
    EULER = "euler"
    RK4 = "rk4"


class DivergenceError(RuntimeError):
    """Trajectory left the finite domain; carries the offending step index."""

    def __init__(self, step: int, message: str | None = None):
        self.step = step
        super().__init__(message or f"trajectory diverged at step {step}")


class OverflowGuardError(ValueError):
    """sinh argument outside the guarded domain."""


class DegenerateDataError(ValueError):
    """Data cannot support the requested operation (for example a zero scale)."""


@dataclass
class Trajectory:
    """Uniformly sampled multivariate time series with provenance.

    states has shape (n_points, d); h is the sampling step in time units.
    Once constructed the state array is marked read-only so trajectories can
    be shared across threads.
    """

    states: np.ndarray
    h: float
    system: SystemId | None = None
    seed: int | None = None
    normalized: bool = False
    scale: np.ndarray | None = None

    def __post_init__(self):
        self.states = np.asarray(self.states, dtype=float)
        if self.states.ndim == 1:
            self.states = self.states[:, None]
        if self.states.shape[0] < 1:
            raise ValueError("trajectory must contain at least one state")
        self.h = float(self.h)
        if self.h <= 0:
            raise ValueError("time step h must be positive")
        if not np.isfinite(self.states).all():
            raise ValueError("trajectory states must be finite")
        if self.scale is not None:
            self.scale = np.asarray(self.scale, dtype=float)
        self.states.setflags(write=False)

    def __len__(self) -> int:
        return self.states.shape[0]

    @property
    def dim(self) -> int:
        return self.states.shape[1]

    @property
    def times(self) -> np.ndarray:
        return np.arange(len(self)) * self.h


def _lorenz_scalar(x: float, y: float, z: float):
    return (
        LORENZ_SIGMA * (y - x),
        x * (LORENZ_RHO - z) - y,
        x * y - LORENZ_B * z,
    )


def _double_scroll_scalar(v1: float, v2: float, i: float):
    dv = v1 - v2
    arg = DS_ALPHA * dv
    if abs(arg) > SINH_GUARD:
        raise OverflowGuardError(f"sinh argument {arg!r} exceeds guard {SINH_GUARD}")
    leak = 2.0 * DS_IR * math.sinh(arg)
    return (
        v1 / DS_R1 - dv / DS_R2 - leak,
        dv / DS_R2 + leak - i,
        v2 - DS_R4 * i,
    )


_SCALAR_RHS = {
    SystemId.LORENZ63: _lorenz_scalar,
    SystemId.DOUBLE_SCROLL: _double_scroll_scalar,
}


def lorenz_rhs(state) -> np.ndarray:
    """Right-hand side of the Lorenz-63 vector field."""
    x, y, z = (float(v) for v in state)
    return np.array(_lorenz_scalar(x, y, z))


def double_scroll_rhs(state) -> np.ndarray:
    """Right-hand side of the dimensionless double-scroll circuit.

    Raises OverflowGuardError when the sinh argument magnitude exceeds 700.
    """
    v1, v2, i = (float(v) for v in state)
    return np.array(_double_scroll_scalar(v1, v2, i))


def system_rhs(system: SystemId):
    return lorenz_rhs if system is SystemId.LORENZ63 else double_scroll_rhs


def integrate(
    system: SystemId,
    integrator: IntegratorId,
    ic,
    h: float,
    n_steps: int,
    seed: int | None = None,
) -> Trajectory:
    """Integrate ``n_steps`` fixed steps from ``ic``; returns n_steps + 1 states.

    Forward Euler advances by x + h * F(x); RK4 is the classical four-stage
    scheme. A non-finite state raises DivergenceError with the step index.
    """
    if h <= 0:
        raise ValueError("h must be positive")
    if n_steps < 1:
        raise ValueError("n_steps must be at least 1")
    f = _SCALAR_RHS[system]
    out = np.empty((n_steps + 1, 3))
    x, y, z = (float(v) for v in ic)
    out[0, 0] = x
    out[0, 1] = y
    out[0, 2] = z
    isfinite = math.isfinite
    try:
        if integrator is IntegratorId.EULER:
            for n in range(n_steps):
                dx, dy, dz = f(x, y, z)
                x += h * dx
                y += h * dy
                z += h * dz
                if not (isfinite(x) and isfinite(y) and isfinite(z)):
                    raise DivergenceError(n + 1)
                out[n + 1, 0] = x
                out[n + 1, 1] = y
                out[n + 1, 2] = z
        else:
            half = 0.5 * h
            sixth = h / 6.0
            for n in range(n_steps):
                ax, ay, az = f(x, y, z)
                bx, by, bz = f(x + half * ax, y + half * ay, z + half * az)
                cx, cy, cz = f(x + half * bx, y + half * by, z + half * bz)
                dx, dy, dz = f(x + h * cx, y + h * cy, z + h * cz)
                x += sixth * (ax + 2.0 * (bx + cx) + dx)
                y += sixth * (ay + 2.0 * (by + cy) + dy)
                z += sixth * (az + 2.0 * (bz + cz) + dz)
                if not (isfinite(x) and isfinite(y) and isfinite(z)):
                    raise DivergenceError(n + 1)
                out[n + 1, 0] = x
                out[n + 1, 1] = y
                out[n + 1, 2] = z
    except OverflowGuardError as exc:
        raise DivergenceError(n + 1, f"step {n + 1}: {exc}") from exc
    return Trajectory(out, h, system=system, seed=seed)


def discard_transient(traj: Trajectory, n_discard: int) -> Trajectory:
    if n_discard < 0:
        raise ValueError("n_discard must be nonnegative")
    if n_discard >= len(traj):
        raise ValueError(
            f"cannot discard {n_discard} points from a trajectory of length {len(traj)}"
        )
    if n_discard == 0:
        return traj
    return replace(traj, states=traj.states[n_discard:])


def subsample(traj: Trajectory, stride: int) -> Trajectory:
    if stride < 1:
        raise ValueError("stride must be at least 1")
    if stride == 1:
        return traj
    return replace(traj, states=traj.states[::stride], h=traj.h * stride)


def normalize(traj: Trajectory, n_scale: int | None = None) -> Trajectory:
    """Divide each coordinate by the maximum of its absolute value.

    The scale is computed over the first ``n_scale`` points (all points by
    default) and recorded on the result, so it can be undone or reused.
    """
    segment = traj.states if n_scale is None else traj.states[:n_scale]
    if segment.shape[0] < 1:
        raise ValueError("normalization segment is empty")
    scale = np.abs(segment).max(axis=0)
    if np.any(scale == 0.0):
        dead = np.flatnonzero(scale == 0.0).tolist()
        raise DegenerateDataError(f"coordinates {dead} are identically zero")
    return replace(traj, states=traj.states / scale, normalized=True, scale=scale)


def denormalize(traj: Trajectory) -> Trajectory:
    if traj.scale is None:
        raise ValueError("trajectory carries no scale vector")
    return replace(traj, states=traj.states * traj.scale, normalized=False, scale=None)


def observe(traj: Trajectory, coordinates) -> Trajectory:
    """Restrict the trajectory to a subset of coordinates (partial measurement)."""
    idx = list(coordinates)
    states = traj.states[:, idx]
    scale = traj.scale[idx] if traj.scale is not None else None
    return replace(traj, states=states, scale=scale)


def sample_initial_condition(seed: int, system: SystemId) -> np.ndarray:
    """Deterministic point in a per-system box bracketing the attractor."""
    rng = np.random.default_rng(seed)
    if system is SystemId.LORENZ63:
        return rng.uniform(LORENZ_IC_LOW, LORENZ_IC_HIGH)
    return rng.uniform(-DS_IC_HALF_WIDTH, DS_IC_HALF_WIDTH, size=3)


def _base_step(system_h: float, integrator: IntegratorId) -> tuple[float, int]:
    """Base integration step and subsampling stride for a target step h.

    RK4 always integrates at the fine step 0.001 and subsamples; Euler
    integrates at 0.01 (or directly at h when h <= 0.01) and subsamples.
    """
    if integrator is IntegratorId.RK4:
        base = 1e-3
    else:
        base = system_h if system_h <= 0.01 else 0.01
    stride = int(round(system_h / base))
    if stride < 1 or abs(stride * base - system_h) > 1e-9:
        raise ValueError(f"target step {system_h} is not an integer multiple of {base}")
    return base, stride


def generate(
    system: SystemId,
    integrator: IntegratorId,
    seed: int,
    h: float,
    n_samples: int,
    n_transient: int = 10000,
    cache_dir: str | Path | None = None,
) -> Trajectory:
    """Simulate, discard the transient, and subsample to the target step.

    Returns an unnormalized trajectory of ``n_samples + 1`` points at step h.
    The transient is ``n_transient`` steps of the base integrator.
    """
    if cache_dir is not None:
        cached = cache_load(cache_dir, system, integrator, seed, h, n_samples, n_transient)
        if cached is not None:
            return cached
    base, stride = _base_step(h, integrator)
    ic = sample_initial_condition(seed, system)
    total = n_transient + n_samples * stride
    fine = integrate(system, integrator, ic, base, total, seed=seed)
    traj = subsample(discard_transient(fine, n_transient), stride)
    if cache_dir is not None:
        cache_store(cache_dir, traj, integrator, n_transient)
    return traj


# ---------------------------------------------------------------------------
# Serialization: CSV with header t, x1..xd, and a binary cache keyed by the
# generation parameters.


def to_csv(traj: Trajectory, path: str | Path) -> None:
    path = Path(path)
    d = traj.dim
    with path.open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["t"] + [f"x{i + 1}" for i in range(d)])
        for n, row in enumerate(traj.states):
            writer.writerow([repr(n * traj.h)] + [repr(float(v)) for v in row])


def from_csv(path: str | Path, system: SystemId | None = None, seed: int | None = None) -> Trajectory:
    path = Path(path)
    with path.open(newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        if not header or header[0] != "t":
            raise ValueError(f"{path}: expected trajectory header starting with 't'")
        rows = [[float(v) for v in row] for row in reader]
    if len(rows) < 2:
        raise ValueError(f"{path}: need at least two rows to infer the time step")
    data = np.asarray(rows)
    h = data[1, 0] - data[0, 0]
    return Trajectory(data[:, 1:], h, system=system, seed=seed)


def cache_key(
    system: SystemId,
    integrator: IntegratorId,
    seed: int,
    h: float,
    n_steps: int,
    n_discard: int,
) -> str:
    raw = f"{system.value}|{integrator.value}|{seed}|{h!r}|{n_steps}|{n_discard}"
    return hashlib.sha1(raw.encode()).hexdigest()[:16]


def cache_store(
    cache_dir: str | Path,
    traj: Trajectory,
    integrator: IntegratorId,
    n_discard: int,
) -> Path:
    if traj.system is None or traj.seed is None:
        raise ValueError("only trajectories with full provenance can be cached")
    cache_dir = Path(cache_dir)
    cache_dir.mkdir(parents=True, exist_ok=True)
    key = cache_key(traj.system, integrator, traj.seed, traj.h, len(traj) - 1, n_discard)
    path = cache_dir / f"{key}.npz"
    np.savez_compressed(
        path,
        states=traj.states,
        h=traj.h,
        system=traj.system.value,
        seed=traj.seed,
        integrator=integrator.value,
        n_discard=n_discard,
    )
    return path


def cache_load(
    cache_dir: str | Path,
    system: SystemId,
    integrator: IntegratorId,
    seed: int,
    h: float,
    n_steps: int,
    n_discard: int,
) -> Trajectory | None:
    path = Path(cache_dir) / f"{cache_key(system, integrator, seed, h, n_steps, n_discard)}.npz"
    if not path.exists():
        return None
    with np.load(path) as data:
        return Trajectory(
            data["states"],
            float(data["h"]),
            system=SystemId(str(data["system"])),
            seed=int(data["seed"]),
        )
