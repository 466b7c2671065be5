"""Forecast-quality metrics: valid prediction time, successive-maxima map
distance, Welch power spectra with KL divergence, and mutual-information lag
selection."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import scipy.signal
from scipy.interpolate import CubicSpline

from .dynamics import SystemId
from .forecast import ForecastResult

VPT_THRESHOLD = 0.9
METRIC_SENTINEL = -1.0
PSD_FLOOR = 1e-300
MAP_GRID_POINTS = 1000

# Maximum Lyapunov exponents used to express horizons in Lyapunov times. The
# double-scroll value is the reciprocal of its 7.81 time-unit Lyapunov time.
LYAPUNOV_EXPONENT = {
    SystemId.LORENZ63: 0.9056,
    SystemId.DOUBLE_SCROLL: 1.0 / 7.81,
}


class InsufficientDataError(ValueError):
    """Not enough structure in the data to evaluate a metric."""


@dataclass
class MetricsReport:
    """One forecast scored against the truth segment.

    When the forecast is unbounded every metric is the sentinel -1.
    """

    vpt: float
    d_maxima: float | None
    e_psd: float | None
    bounded: bool
    sentinel_applied: bool


@dataclass
class PsdEstimate:
    """One-sided Welch estimate: Hann window, segment length L = floor(5 / h),
    half-segment overlap, mean of periodograms."""

    frequencies: np.ndarray
    power: np.ndarray  # (n_bins, d)
    segment_length: int
    window: str = "hann"

    @property
    def overlap(self) -> int:
        return self.segment_length // 2


def _as_states(series) -> np.ndarray:
    arr = np.asarray(series, dtype=float)
    if arr.ndim == 1:
        arr = arr[:, None]
    return arr


def valid_prediction_time(
    truth,
    pred,
    h: float,
    lyapunov_exponent: float,
    eta: float = VPT_THRESHOLD,
) -> float:
    """First threshold crossing of the normalized trajectory error, in
    Lyapunov times. Never crossing maps to the full segment length."""
    truth = _as_states(truth)
    pred = _as_states(pred)
    if truth.shape[0] == 0 or pred.shape[0] == 0:
        raise ValueError("empty input")
    if truth.shape != pred.shape:
        raise ValueError(f"shape mismatch: truth {truth.shape} vs prediction {pred.shape}")
    if lyapunov_exponent <= 0:
        raise ValueError("lyapunov_exponent must be positive")
    rms = math.sqrt(float(np.mean(np.sum(truth**2, axis=1))))
    if rms == 0.0:
        raise ValueError("truth segment has zero RMS")
    errors = np.linalg.norm(truth - pred, axis=1) / rms
    over = errors > eta
    n_vpt = int(np.argmax(over)) if over.any() else truth.shape[0]
    return n_vpt * h * lyapunov_exponent


def successive_maxima(series) -> np.ndarray:
    """Values of strict interior local maxima, in order of occurrence."""
    x = np.asarray(series, dtype=float)
    if x.ndim != 1:
        raise ValueError("successive_maxima expects a scalar series")
    if x.shape[0] < 3:
        raise ValueError("need at least 3 points")
    interior = (x[1:-1] > x[:-2]) & (x[1:-1] > x[2:])
    return x[1:-1][interior]


def _map_points(maxima: np.ndarray):
    """(s_n, s_{n+1}) pairs sorted by abscissa with duplicate abscissas averaged."""
    xs = maxima[:-1]
    ys = maxima[1:]
    order = np.argsort(xs, kind="stable")
    xs, ys = xs[order], ys[order]
    ux, inverse = np.unique(xs, return_inverse=True)
    uy = np.zeros_like(ux)
    counts = np.zeros_like(ux)
    np.add.at(uy, inverse, ys)
    np.add.at(counts, inverse, 1.0)
    return ux, uy / counts


def maxima_map_distance(truth_maxima, pred_maxima) -> float | None:
    """Mean absolute difference between cubic interpolants of the two
    successive-maxima maps over their overlapping domain.

    Returns None when the domains do not overlap.
    """
    truth_maxima = np.asarray(truth_maxima, dtype=float)
    pred_maxima = np.asarray(pred_maxima, dtype=float)
    for name, seq in (("truth", truth_maxima), ("prediction", pred_maxima)):
        if seq.shape[0] < 4:
            raise InsufficientDataError(
                f"{name} has {seq.shape[0]} maxima; the cubic map fit needs at least 4"
            )
    tx, ty = _map_points(truth_maxima)
    px, py = _map_points(pred_maxima)
    if tx.shape[0] < 4 or px.shape[0] < 4:
        raise InsufficientDataError("fewer than 4 distinct map points")
    s_truth = CubicSpline(tx, ty, bc_type="natural")
    s_pred = CubicSpline(px, py, bc_type="natural")
    lo = max(tx[0], px[0])
    hi = min(tx[-1], px[-1])
    if not lo < hi:
        return None
    grid = np.linspace(lo, hi, MAP_GRID_POINTS)
    return float(np.mean(np.abs(s_truth(grid) - s_pred(grid))))


def welch_segment_length(h: float) -> int:
    return int(math.floor(5.0 / h))


def welch_psd(series, h: float) -> PsdEstimate:
    """Welch power spectral density of each coordinate."""
    states = _as_states(series)
    L = welch_segment_length(h)
    if L < 2:
        raise ValueError(f"step {h} makes the segment length {L}; need at least 2")
    if states.shape[0] < L:
        raise ValueError(f"series length {states.shape[0]} is below the segment length {L}")
    freqs, power = scipy.signal.welch(
        states,
        fs=1.0 / h,
        window="hann",
        nperseg=L,
        noverlap=L // 2,
        average="mean",
        axis=0,
    )
    return PsdEstimate(frequencies=freqs, power=power, segment_length=L)


def psd_divergence(truth, pred, h: float) -> float:
    """Sum over coordinates of the KL divergence (log base 10) between the
    unit-normalized Welch spectra of truth and prediction."""
    truth = _as_states(truth)
    pred = _as_states(pred)
    if truth.shape != pred.shape:
        raise ValueError(f"shape mismatch: truth {truth.shape} vs prediction {pred.shape}")
    est_truth = welch_psd(truth, h)
    est_pred = welch_psd(pred, h)
    total = 0.0
    for i in range(truth.shape[1]):
        p = est_truth.power[:, i]
        q = est_pred.power[:, i]
        if p.sum() == 0.0 or q.sum() == 0.0:
            raise ValueError(f"coordinate {i} has an all-zero spectrum")
        p = p / p.sum()
        q = q / q.sum()
        ratio = np.maximum(p, PSD_FLOOR) / np.maximum(q, PSD_FLOOR)
        total += float(np.sum(np.where(p > 0, p * np.log10(ratio), 0.0)))
    return total


def mutual_information(series, lag: int, bins: int = 64) -> float:
    """Histogram estimate of the mutual information between x_t and x_{t+lag}."""
    x = np.asarray(series, dtype=float)
    if lag < 1 or lag >= x.shape[0]:
        raise ValueError("lag out of range")
    joint, _, _ = np.histogram2d(x[:-lag], x[lag:], bins=bins)
    total = joint.sum()
    pxy = joint / total
    px = pxy.sum(axis=1, keepdims=True)
    py = pxy.sum(axis=0, keepdims=True)
    mask = pxy > 0
    return float(np.sum(pxy[mask] * np.log(pxy[mask] / (px @ py)[mask])))


def mutual_information_first_min(series, max_lag: int, bins: int = 64) -> int | None:
    """Lag of the first strict local minimum of the mutual information curve,
    or None when no interior minimum exists up to max_lag."""
    x = np.asarray(series, dtype=float)
    if bins < 8:
        raise ValueError("bins must be at least 8")
    if max_lag < 3:
        raise ValueError("max_lag must be at least 3")
    if x.shape[0] <= max_lag + 1:
        raise ValueError("series too short for the requested max_lag")
    mi = np.array([mutual_information(x, lag, bins) for lag in range(1, max_lag + 1)])
    for j in range(1, max_lag - 1):
        if mi[j] < mi[j - 1] and mi[j] < mi[j + 1]:
            return j + 1
    return None


def compute_metrics(
    truth,
    forecast: ForecastResult,
    h: float,
    lyapunov_exponent: float,
    eta: float = VPT_THRESHOLD,
    maxima_coordinate: int = -1,
) -> MetricsReport:
    """Score a forecast against the matching truth segment, applying the
    sentinel rule (-1 everywhere) to unbounded forecasts."""
    if not forecast.bounded:
        return MetricsReport(
            vpt=METRIC_SENTINEL,
            d_maxima=METRIC_SENTINEL,
            e_psd=METRIC_SENTINEL,
            bounded=False,
            sentinel_applied=True,
        )
    truth = _as_states(truth)
    pred = forecast.states
    n = min(truth.shape[0], pred.shape[0])
    truth = truth[:n]
    pred = pred[:n]
    vpt = valid_prediction_time(truth, pred, h, lyapunov_exponent, eta)
    try:
        d_value = maxima_map_distance(
            successive_maxima(truth[:, maxima_coordinate]),
            successive_maxima(pred[:, maxima_coordinate]),
        )
    except (InsufficientDataError, ValueError):
        d_value = None
    try:
        e_value = psd_divergence(truth, pred, h)
    except ValueError:
        e_value = None
    return MetricsReport(
        vpt=vpt,
        d_maxima=d_value,
        e_psd=e_value,
        bounded=True,
        sentinel_applied=False,
    )
