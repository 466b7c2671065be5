"""Declarative sweep harness: rerun the figure experiments over seeds and
hyperparameter grids, emitting CSV records and summary statistics."""

from __future__ import annotations

import csv
import itertools
import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from importlib import resources
from pathlib import Path

import numpy as np
import yaml

from . import dynamics, forecast, metrics, solvers
from .config import NgrcConfig
from .dynamics import IntegratorId, SystemId, Trajectory
from .solvers import SolverId

RECORD_COLUMNS = [
    "figure_id",
    "seed",
    "k",
    "tau",
    "p",
    "beta",
    "h",
    "n_train",
    "solver",
    "kappa",
    "kappa_hat",
    "kappa_beta",
    "theta_x",
    "theta_y",
    "theta_z",
    "theta_max",
    "delta",
    "vpt",
    "d_maxima",
    "e_psd",
    "bounded",
    "status",
]

SUMMARY_COLUMNS = [
    "figure_id",
    "k",
    "tau",
    "p",
    "beta",
    "h",
    "n_train",
    "solver",
    "metric",
    "median",
    "q25",
    "q75",
    "bounded_fraction",
]

GRID_KEYS = ("h", "n_train", "k", "tau", "p", "beta")

FIGURE_IDS = [
    "F1_attractor",
    "F2_stats",
    "F3_beta_tradeoff",
    "F4_beta_testing",
    "F5_degree_growth",
    "F6_delay_interplay",
    "F7_ntrain",
    "F8_sparse",
    "F9_partial",
    "S1_doublescroll",
    "S2_doublescroll",
    "S3_doublescroll",
    "S4_doublescroll",
]


@dataclass
class GridBlock:
    """One cartesian block of hyperparameter lists."""

    h: list
    n_train: list
    k: list
    tau: list
    p: list
    beta: list
    integrator: IntegratorId | None = None  # overrides the spec-level integrator

    def points(self):
        return itertools.product(self.h, self.n_train, self.k, self.tau, self.p, self.beta)


@dataclass
class SweepSpec:
    """Everything needed to rerun one figure: grids, seeds, and lengths."""

    figure_id: str
    system: SystemId
    integrator: IntegratorId
    blocks: list
    seeds: list
    n_test: int
    solvers: list
    test_phase: bool = True
    observe: list | None = None
    n_transient: int = 10000
    bounded_margin: float = 1.05
    eta: float = 0.9
    aux: list = field(default_factory=list)
    mi_max_lag: int = 25
    mi_samples: int = 12000
    x_submatrix_taus: list = field(default_factory=list)
    notes: str = ""

    @property
    def d(self) -> int:
        return len(self.observe) if self.observe else self.system.dim


@dataclass
class ExperimentRecord:
    """One sweep row: hyperparameters, seed, diagnostics and test metrics."""

    figure_id: str
    seed: int
    k: int
    tau: int
    p: int
    beta: float
    h: float
    n_train: int
    solver: str
    kappa: float | None = None
    kappa_hat: float | None = None
    kappa_beta: float | None = None
    theta_x: float | None = None
    theta_y: float | None = None
    theta_z: float | None = None
    theta_max: float | None = None
    delta: float | None = None
    vpt: float | None = None
    d_maxima: float | None = None
    e_psd: float | None = None
    bounded: bool | None = None
    status: str = "ok"


def _as_list(value):
    if isinstance(value, (list, tuple)):
        return list(value)
    return [value]


def load_sweep_spec(source) -> SweepSpec:
    """Parse a sweep spec from a YAML path or an already-loaded mapping."""
    if isinstance(source, (str, Path)):
        with Path(source).open() as fh:
            data = yaml.safe_load(fh)
    else:
        data = dict(source)
    grid_source = data.get("grid")
    if grid_source is None:
        raise ValueError("sweep spec is missing its grid")
    blocks = []
    for raw in grid_source if isinstance(grid_source, list) else [grid_source]:
        blocks.append(
            GridBlock(
                h=[float(v) for v in _as_list(raw.get("h", 0.01))],
                n_train=[int(v) for v in _as_list(raw.get("n_train", 500))],
                k=[int(v) for v in _as_list(raw.get("k", 1))],
                tau=[int(v) for v in _as_list(raw.get("tau", 1))],
                p=[int(v) for v in _as_list(raw.get("p", 2))],
                beta=[float(v) for v in _as_list(raw.get("beta", 0.0))],
                integrator=IntegratorId(raw["integrator"]) if "integrator" in raw else None,
            )
        )
    seeds = data.get("seeds", 10)
    if isinstance(seeds, int):
        seeds = list(range(seeds))
    solver_list = []
    for v in _as_list(data.get("solvers", ["svd"])):
        if v == "all":
            solver_list.extend(solvers.ALL_SOLVERS)
        else:
            solver_list.append(SolverId(v))
    return SweepSpec(
        figure_id=data["figure_id"],
        system=SystemId(data.get("system", "lorenz63")),
        integrator=IntegratorId(data.get("integrator", "euler")),
        blocks=blocks,
        seeds=[int(s) for s in seeds],
        n_test=int(data.get("n_test", 0)),
        solvers=solver_list,
        test_phase=bool(data.get("test_phase", True)),
        observe=data.get("observe"),
        n_transient=int(data.get("n_transient", 10000)),
        bounded_margin=float(data.get("bounded_margin", 1.05)),
        eta=float(data.get("eta", 0.9)),
        aux=list(data.get("aux", [])),
        mi_max_lag=int(data.get("mi_max_lag", 25)),
        mi_samples=int(data.get("mi_samples", 12000)),
        x_submatrix_taus=[int(t) for t in data.get("x_submatrix_taus", [])],
        notes=str(data.get("notes", "")),
    )


def packaged_spec_path(figure_id: str) -> Path:
    path = resources.files("ngrc") / "specs" / f"{figure_id}.yaml"
    if not path.is_file():
        known = ", ".join(FIGURE_IDS)
        raise KeyError(f"unknown figure id {figure_id!r}; valid ids: {known}")
    return Path(str(path))


def apply_scale(spec: SweepSpec, scale: float) -> SweepSpec:
    """Shrink seeds and the test length by the desk-scale divisor."""
    if scale <= 1:
        return spec
    n_seeds = max(1, int(len(spec.seeds) // scale))
    n_test = max(64, int(spec.n_test // scale)) if spec.n_test else 0
    mi_samples = max(1000, int(spec.mi_samples // scale))
    return replace(
        spec,
        seeds=spec.seeds[:n_seeds],
        n_test=n_test,
        mi_samples=mi_samples,
    )


class _TrajectoryPool:
    """Per-sweep memo of raw generated trajectories, keyed by everything that
    determines them. Each run normalizes its own prefix, so records do not
    depend on unrelated grid points.

    ``requirements`` maps (integrator, h) to the longest sample count any grid
    point will ask for, so each trajectory is generated once at full length.
    """

    def __init__(self, spec: SweepSpec, requirements: dict | None = None):
        self.spec = spec
        self.requirements = requirements or {}
        self._store: dict = {}

    def raw(self, integrator: IntegratorId, seed: int, h: float, n_samples: int) -> Trajectory:
        key = (integrator, seed, h)
        have = self._store.get(key)
        if have is None or len(have) < n_samples + 1:
            target = max(n_samples, self.requirements.get((integrator, h), 0))
            have = dynamics.generate(
                self.spec.system,
                integrator,
                seed,
                h,
                target,
                n_transient=self.spec.n_transient,
            )
            self._store[key] = have
        return have

    def prepared(self, integrator: IntegratorId, seed: int, h: float, n_points: int) -> Trajectory:
        raw = self.raw(integrator, seed, h, n_points - 1)
        traj = replace(raw, states=raw.states[:n_points])
        if self.spec.observe:
            traj = dynamics.observe(traj, self.spec.observe)
        return dynamics.normalize(traj)


def _needed_points(spec: SweepSpec, k: int, tau: int, n_train: int) -> int:
    w = (k - 1) * tau
    n_test = spec.n_test if spec.test_phase else 0
    return w + n_train + 1 + n_test


def run_point(spec: SweepSpec, pool: _TrajectoryPool, point, integrator: IntegratorId, seed: int):
    """Simulate, train, roll out and score one grid point for one seed."""
    h, n_train, k, tau, p, beta = point
    base = dict(
        figure_id=spec.figure_id,
        seed=seed,
        k=k,
        tau=tau,
        p=p,
        beta=beta,
        h=h,
        n_train=n_train,
    )
    m = math.comb(k * spec.d + p, p)
    if n_train <= m:
        return [
            ExperimentRecord(solver=s.value, status=f"skipped(n_train<=m={m})", **base)
            for s in spec.solvers
        ]
    try:
        traj = pool.prepared(integrator, seed, h, _needed_points(spec, k, tau, n_train))
    except (dynamics.DivergenceError, dynamics.DegenerateDataError, ValueError) as exc:
        return [
            ExperimentRecord(solver=s.value, status=f"skipped({type(exc).__name__})", **base)
            for s in spec.solvers
        ]
    config = NgrcConfig(
        system=spec.system,
        integrator=integrator,
        h=h,
        k=k,
        tau=tau,
        p=p,
        beta=beta,
        n_train=n_train,
        n_test=spec.n_test,
        solvers=spec.solvers,
        seed=seed,
        coordinates=spec.observe,
        bounded_margin=spec.bounded_margin,
        eta=spec.eta,
    )
    report = solvers.train(traj, config)
    records = []
    theta_keys = ("theta_x", "theta_y", "theta_z")
    for solver in spec.solvers:
        rec = ExperimentRecord(
            solver=solver.value,
            kappa=report.kappa,
            kappa_hat=report.kappa_hat,
            kappa_beta=report.kappa_beta,
            theta_max=report.theta_max[solver],
            delta=report.delta,
            **base,
        )
        for i, angle in enumerate(report.theta[solver][:3]):
            setattr(rec, theta_keys[i], angle)
        if spec.test_phase and spec.n_test > 0:
            result = forecast.rollout(
                report.readouts[solver],
                traj,
                config,
                spec.n_test,
                escape_threshold=config.escape_threshold,
                bounded_margin=spec.bounded_margin,
            )
            truth = traj.states[n_train : n_train + spec.n_test]
            scored = metrics.compute_metrics(
                truth,
                result,
                h,
                metrics.LYAPUNOV_EXPONENT[spec.system],
                eta=spec.eta,
            )
            rec.vpt = scored.vpt
            rec.d_maxima = scored.d_maxima
            rec.e_psd = scored.e_psd
            rec.bounded = scored.bounded
        records.append(rec)
    return records


def run_sweep(spec: SweepSpec, workers: int = 1) -> list:
    """Run every (grid point, seed) task; output order is the deterministic
    (block, grid index, seed, solver) order regardless of worker count."""
    tasks = []
    requirements: dict = {}
    for block in spec.blocks:
        integrator = block.integrator or spec.integrator
        for point in block.points():
            h, n_train, k, tau, p, beta = point
            need = _needed_points(spec, k, tau, n_train) - 1
            key = (integrator, h)
            requirements[key] = max(requirements.get(key, 0), need)
            for seed in spec.seeds:
                tasks.append((point, integrator, seed))
    pool = _TrajectoryPool(spec, requirements)
    if workers <= 1:
        results = [run_point(spec, pool, point, integ, seed) for point, integ, seed in tasks]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool_exec:
            futures = [
                pool_exec.submit(run_point, spec, pool, point, integ, seed)
                for point, integ, seed in tasks
            ]
            results = [f.result() for f in futures]
    records = []
    for chunk in results:
        records.extend(chunk)
    return records


# ---------------------------------------------------------------------------
# Summaries and fits


def _quantiles(values):
    arr = np.asarray(values, dtype=float)
    return (
        float(np.median(arr)),
        float(np.quantile(arr, 0.25)),
        float(np.quantile(arr, 0.75)),
    )


SUMMARY_METRICS = [
    "kappa",
    "kappa_hat",
    "kappa_beta",
    "theta_max",
    "delta",
    "vpt",
    "d_maxima",
    "e_psd",
]

TEST_METRICS = {"vpt", "d_maxima", "e_psd"}


def summarize(records) -> list:
    """Per grid point and solver: median and quartiles over seeds.

    Test metrics aggregate only over bounded models; the bounded fraction is
    reported alongside.
    """
    if not records:
        raise ValueError("no records to summarize")
    groups: dict = {}
    for rec in records:
        key = (rec.figure_id, rec.k, rec.tau, rec.p, rec.beta, rec.h, rec.n_train, rec.solver)
        groups.setdefault(key, []).append(rec)
    rows = []
    for key in groups:
        group = [r for r in groups[key] if r.status == "ok"]
        flags = [r.bounded for r in group if r.bounded is not None]
        fraction = float(np.mean(flags)) if flags else None
        for metric in SUMMARY_METRICS:
            pool = group
            if metric in TEST_METRICS:
                pool = [r for r in group if r.bounded]
            values = [getattr(r, metric) for r in pool]
            values = [v for v in values if v is not None]
            if values:
                med, q25, q75 = _quantiles(values)
            else:
                med = q25 = q75 = None
            rows.append(
                dict(
                    zip(
                        SUMMARY_COLUMNS,
                        list(key) + [metric, med, q25, q75, fraction],
                    )
                )
            )
    return rows


def fit_exponential_rate(xs, ys) -> tuple[float, float]:
    """Least-squares line through (x, ln y); returns (rate, intercept)."""
    xs = np.asarray(xs, dtype=float)
    ys = np.asarray(ys, dtype=float)
    if xs.shape[0] < 3:
        raise ValueError("need at least 3 points")
    if np.any(ys <= 0):
        raise ValueError("ys must be positive")
    if np.ptp(xs) == 0:
        raise ValueError("xs are degenerate")
    rate, intercept = np.polyfit(xs, np.log(ys), 1)
    return float(rate), float(intercept)


@dataclass
class CorrelationDecayFit:
    K: float
    gamma: float
    residual_rms: float


def _decay_curve(K: float, gamma: float, taus: np.ndarray) -> np.ndarray | None:
    core = K * np.exp(-gamma * taus)
    if np.any(core >= 1.0):
        return None
    return np.sqrt((1.0 + core) / (1.0 - core))


def fit_correlation_decay(taus, kappas) -> CorrelationDecayFit | None:
    """Fit sqrt((1 + K e^{-g tau}) / (1 - K e^{-g tau})) to a condition-number
    decay curve by a log-linear initialization plus grid refinement.

    Returns None when no feasible (K, gamma) exists for the data.
    """
    taus = np.asarray(taus, dtype=float)
    kappas = np.asarray(kappas, dtype=float)
    if taus.shape != kappas.shape or taus.shape[0] < 2:
        raise ValueError("need matching tau/kappa arrays with at least 2 points")
    if np.any(kappas < 1.0):
        raise ValueError("condition numbers below 1 are not valid")
    # Implied correlation values: kappa = sqrt((1+c)/(1-c)) inverts to
    # c = (kappa^2 - 1) / (kappa^2 + 1).
    c = (kappas**2 - 1.0) / (kappas**2 + 1.0)
    positive = c > 1e-12
    if positive.sum() >= 2 and np.ptp(taus[positive]) > 0:
        slope, intercept = np.polyfit(taus[positive], np.log(c[positive]), 1)
        k0 = float(np.exp(intercept))
        g0 = float(max(-slope, 1e-6))
    else:
        k0, g0 = 1e-6, 0.1

    def rms(K, gamma):
        curve = _decay_curve(K, gamma, taus)
        if curve is None:
            return np.inf
        return float(np.sqrt(np.mean((curve - kappas) ** 2)))

    best = (k0, g0, rms(k0, g0))
    zero_rms = float(np.sqrt(np.mean((1.0 - kappas) ** 2)))
    if zero_rms < best[2]:
        best = (0.0, g0, zero_rms)
    for spread, steps in ((4.0, 17), (1.5, 13), (1.1, 9)):
        k_center = best[0] if best[0] > 0 else k0
        g_center = best[1]
        k_grid = np.concatenate([[0.0], k_center * np.geomspace(1 / spread, spread, steps)])
        g_grid = g_center * np.geomspace(1 / spread, spread, steps)
        for K in k_grid:
            for gamma in g_grid:
                value = rms(K, gamma)
                if value < best[2]:
                    best = (float(K), float(gamma), value)
    if not math.isfinite(best[2]):
        return None
    return CorrelationDecayFit(K=best[0], gamma=best[1], residual_rms=best[2])


# ---------------------------------------------------------------------------
# CSV output


def _format_cell(value) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, (np.bool_,)):
        return "true" if bool(value) else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    return str(value)


def records_to_csv(records, path: str | Path) -> None:
    with Path(path).open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(RECORD_COLUMNS)
        for rec in records:
            writer.writerow([_format_cell(getattr(rec, col)) for col in RECORD_COLUMNS])


def summary_to_csv(rows, path: str | Path) -> None:
    with Path(path).open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(SUMMARY_COLUMNS)
        for row in rows:
            writer.writerow([_format_cell(row[col]) for col in SUMMARY_COLUMNS])


# ---------------------------------------------------------------------------
# Figure reproduction: records + summary + per-figure auxiliary files


def _first_ok_point(spec: SweepSpec):
    block = spec.blocks[0]
    integrator = block.integrator or spec.integrator
    for point in block.points():
        h, n_train, k, tau, p, beta = point
        if n_train > math.comb(k * spec.d + p, p):
            return point, integrator
    raise ValueError("no feasible grid point for auxiliary outputs")


def _aux_reference_run(spec: SweepSpec, pool: _TrajectoryPool):
    """Truth and prediction trajectories for the first feasible grid point and
    first seed, using the first requested solver."""
    point, integrator = _first_ok_point(spec)
    h, n_train, k, tau, p, beta = point
    seed = spec.seeds[0]
    n_test = spec.n_test if spec.n_test > 0 else 1000
    w = (k - 1) * tau
    traj = pool.prepared(integrator, seed, h, w + n_train + 1 + n_test)
    config = NgrcConfig(
        system=spec.system,
        integrator=integrator,
        h=h,
        k=k,
        tau=tau,
        p=p,
        beta=beta,
        n_train=n_train,
        n_test=n_test,
        solvers=spec.solvers,
        seed=seed,
        coordinates=spec.observe,
        bounded_margin=spec.bounded_margin,
    )
    report = solvers.train(traj, config, solvers=[spec.solvers[0]])
    result = forecast.rollout(
        report.readouts[spec.solvers[0]],
        traj,
        config,
        n_test,
        bounded_margin=spec.bounded_margin,
    )
    truth = Trajectory(traj.states[n_train : n_train + len(result.states)], h)
    pred = Trajectory(result.states, h)
    return truth, pred


def write_outputs(
    spec: SweepSpec,
    records,
    out_dir: str | Path,
    scale: float = 1.0,
    extra_manifest: dict | None = None,
) -> dict:
    """Write records.csv, summary.csv, manifest.json and any auxiliary files
    the spec asks for. Returns the manifest mapping."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    records_to_csv(records, out_dir / "records.csv")
    summary_to_csv(summarize(records), out_dir / "summary.csv")
    files = ["records.csv", "summary.csv"]
    manifest: dict = {
        "figure_id": spec.figure_id,
        "scale": scale,
        "seeds": spec.seeds,
        "n_test": spec.n_test,
        "system": spec.system.value,
        "integrator": spec.integrator.value,
        "solvers": [s.value for s in spec.solvers],
        "observe": spec.observe,
        "bounded_margin": spec.bounded_margin,
        "notes": spec.notes,
    }
    pool = _TrajectoryPool(spec)
    if "trajectories" in spec.aux or "psd" in spec.aux or "maxima" in spec.aux:
        truth, pred = _aux_reference_run(spec, pool)
        if "trajectories" in spec.aux:
            dynamics.to_csv(truth, out_dir / "truth.csv")
            dynamics.to_csv(pred, out_dir / "pred.csv")
            files += ["truth.csv", "pred.csv"]
        if "psd" in spec.aux:
            try:
                est_truth = metrics.welch_psd(truth.states, truth.h)
                est_pred = metrics.welch_psd(pred.states, pred.h)
            except ValueError:
                est_truth = est_pred = None
            if est_truth is not None:
                for i in range(truth.dim):
                    for tag, est in (("truth", est_truth), ("pred", est_pred)):
                        name = f"psd_{tag}_x{i + 1}.csv"
                        np.savetxt(
                            out_dir / name,
                            np.column_stack([est.frequencies, est.power[:, i]]),
                            delimiter=",",
                            header="frequency,power",
                            comments="",
                        )
                        files.append(name)
        if "maxima" in spec.aux:
            for tag, states in (("truth", truth.states), ("pred", pred.states)):
                seq = metrics.successive_maxima(states[:, -1])
                pairs = np.column_stack([seq[:-1], seq[1:]]) if seq.shape[0] >= 2 else np.empty((0, 2))
                name = f"maxima_{tag}.csv"
                np.savetxt(out_dir / name, pairs, delimiter=",", header="s_n,s_next", comments="")
                files.append(name)
    if "x_submatrix" in spec.aux and spec.x_submatrix_taus:
        from .features import x_submatrix

        block = spec.blocks[-1]
        h = block.h[0]
        n_train = block.n_train[0]
        rows = []
        for tau in spec.x_submatrix_taus:
            for seed in spec.seeds:
                traj = pool.prepared(spec.integrator, seed, h, n_train + tau + 1)
                sub = x_submatrix(traj, tau, n_train)
                rows.append((tau, seed, solvers.condition_number(sub.psi_hat)))
        with (out_dir / "x_submatrix.csv").open("w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["tau", "seed", "kappa_x"])
            for tau, seed, value in rows:
                writer.writerow([tau, seed, repr(value)])
        files.append("x_submatrix.csv")
        taus = sorted(set(spec.x_submatrix_taus))
        medians = [
            float(np.median([v for t, _, v in rows if t == tau])) for tau in taus
        ]
        fit = fit_correlation_decay(taus, medians)
        if fit is not None:
            manifest["x_submatrix_fit"] = {
                "K": fit.K,
                "gamma": fit.gamma,
                "residual_rms": fit.residual_rms,
            }
    if "mutual_information" in spec.aux:
        block = spec.blocks[0]
        integrator = block.integrator or spec.integrator
        h = block.h[0]
        traj = pool.prepared(integrator, spec.seeds[0], h, spec.mi_samples)
        series = traj.states[:, 0]
        curve = [
            (lag, metrics.mutual_information(series, lag))
            for lag in range(1, spec.mi_max_lag + 1)
        ]
        with (out_dir / "mi.csv").open("w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["lag", "mi"])
            for lag, value in curve:
                writer.writerow([lag, repr(value)])
        files.append("mi.csv")
        manifest["mi_first_minimum"] = metrics.mutual_information_first_min(
            series, spec.mi_max_lag
        )
    if extra_manifest:
        manifest.update(extra_manifest)
    manifest["files"] = files
    with (out_dir / "manifest.json").open("w") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return manifest


def reproduce(figure_id_or_spec, out_dir: str | Path, scale: float = 1.0, workers: int = 1) -> dict:
    """Run a checked-in (or explicit) sweep spec at the requested scale and
    write all outputs."""
    if isinstance(figure_id_or_spec, SweepSpec):
        spec = figure_id_or_spec
    elif isinstance(figure_id_or_spec, str) and figure_id_or_spec in FIGURE_IDS:
        spec = load_sweep_spec(packaged_spec_path(figure_id_or_spec))
    else:
        spec = load_sweep_spec(figure_id_or_spec)
    spec = apply_scale(spec, scale)
    records = run_sweep(spec, workers=workers)
    return write_outputs(spec, records, out_dir, scale=scale)


def records_from_csv(path: str | Path) -> list:
    """Read a records CSV back into ExperimentRecord objects (used by tests)."""

    def parse(col, raw):
        if raw == "":
            return None
        if col in ("seed", "k", "tau", "p", "n_train"):
            return int(raw)
        if col in ("figure_id", "solver", "status"):
            return raw
        if col == "bounded":
            return raw == "true"
        return float(raw)

    out = []
    with Path(path).open(newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        if header != RECORD_COLUMNS:
            raise ValueError(f"{path}: unexpected header {header}")
        for row in reader:
            data = {col: parse(col, raw) for col, raw in zip(header, row)}
            out.append(ExperimentRecord(**data))
    return out
