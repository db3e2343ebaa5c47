"""Burst detection on error-count time series.

Pipeline: remove DC, correlate with a time-reversed exponential template
(sum-normalized so the output stays in error-count units), threshold the
filtered series, take one local maximum per above-threshold segment, and
fit the raw counts around each peak with the step-exponential template.
"""

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import least_squares

from .errors import InsufficientDataError, InvalidParameterError
from .sampler import CountSeries

DEFAULT_FILTER_TAU = 20e-3  # s
DEFAULT_THRESHOLD = 2.0  # errors
KERNEL_TRUNCATION = 5.0  # in units of filter_tau
FIT_WINDOW_PRE = 20e-3  # s
FIT_WINDOW_POST = 100e-3  # s
TAU_BOUNDS = (1e-3, 200e-3)  # s
# Extra starting points for the decay constant; the landscape has shallow
# local minima for peaks near the noise floor, so the fit keeps the best
# of several starts (the nominal 20 ms start included).
TAU_STARTS = (5e-3, 10e-3, 20e-3, 40e-3, 80e-3)
MIN_FIT_SAMPLES = 10


@dataclass(frozen=True)
class Template:
    """Step-exponential event shape: c for t < t0, c + a*exp(-(t-t0)/tau) after."""

    a: float
    c: float
    t0: float
    tau_decay: float

    def __post_init__(self):
        if self.tau_decay <= 0:
            raise InvalidParameterError("tau_decay must be positive")

    def __call__(self, t: np.ndarray) -> np.ndarray:
        t = np.asarray(t, dtype=float)
        out = np.full(t.shape, self.c)
        m = t >= self.t0
        out[m] = self.c + self.a * np.exp(-(t[m] - self.t0) / self.tau_decay)
        return out

    @property
    def height(self) -> float:
        return self.a + self.c


@dataclass(frozen=True)
class PeakFit:
    """Fitted event parameters from the raw-count template fit."""

    t0: float
    tau_decay: float
    height: float
    baseline_c: float
    residual_rms: float
    converged: bool

    @property
    def amplitude(self) -> float:
        return self.height - self.baseline_c


def matched_filter(series: CountSeries, filter_tau: float = DEFAULT_FILTER_TAU) -> CountSeries:
    """Correlate the DC-removed counts with a normalized exponential kernel.

    Kernel weights w_k = exp(-k*dt/tau) / sum_j exp(-j*dt/tau), truncated
    at 5*tau; output value i is sum_k w_k * (x[i+k] - mean), with samples
    beyond the end contributing zero (edge output is attenuated rather
    than renormalized).
    """
    if filter_tau <= 0:
        raise InvalidParameterError("filter_tau must be positive")
    dt = series.dt
    n_kernel = int(math.ceil(KERNEL_TRUNCATION * filter_tau / dt)) + 1
    if len(series.counts) < n_kernel:
        raise InsufficientDataError(
            f"series length {len(series.counts)} is shorter than the kernel ({n_kernel})"
        )
    w = np.exp(-np.arange(n_kernel) * dt / filter_tau)
    w /= w.sum()
    x = series.counts.astype(float) - series.counts.mean()
    padded = np.concatenate([x, np.zeros(n_kernel - 1)])
    filtered = np.correlate(padded, w, mode="valid")
    return CountSeries(times=series.times, counts=filtered, slot=series.slot)


def find_peaks(filtered: CountSeries, threshold: float = DEFAULT_THRESHOLD) -> np.ndarray:
    """One peak time per contiguous above-threshold segment of the filtered series.

    The peak is the segment's maximum; ties go to the earliest sample.
    Returns an empty array when nothing crosses the threshold.
    """
    vals = np.asarray(filtered.counts, dtype=float)
    above = vals > threshold
    if not above.any():
        return np.asarray([], dtype=float)
    trans = np.diff(above.astype(np.int8))
    starts = np.flatnonzero(trans == 1) + 1
    ends = np.flatnonzero(trans == -1) + 1
    if above[0]:
        starts = np.insert(starts, 0, 0)
    if above[-1]:
        ends = np.append(ends, len(above))
    peaks = [
        filtered.times[s + int(np.argmax(vals[s:e]))] for s, e in zip(starts, ends)
    ]
    return np.asarray(peaks, dtype=float)


def fit_event(
    raw_counts: CountSeries,
    t_peak: float,
    n_qubits: int,
    window: tuple[float, float] = (FIT_WINDOW_PRE, FIT_WINDOW_POST),
    neighbor_peaks: np.ndarray | None = None,
) -> PeakFit:
    """Least-squares template fit to the raw counts around a located peak.

    The window is clipped to the series bounds and truncated 20 ms before
    any later neighboring peak.  Initial guesses: c from the pre-peak
    mean, a from the window maximum, t0 at the peak, tau at 20 ms; tau is
    bounded to [1, 200] ms and a to [0, 2*n_qubits].  A failed optimizer
    is reported via converged=False rather than raised.
    """
    pre, post = window
    lo, hi = t_peak - pre, t_peak + post
    if neighbor_peaks is not None:
        for p in np.asarray(neighbor_peaks, dtype=float):
            if p > t_peak:
                hi = min(hi, p - FIT_WINDOW_PRE)
    sel = (raw_counts.times >= lo) & (raw_counts.times <= hi)
    if sel.sum() < MIN_FIT_SAMPLES:
        raise InsufficientDataError(f"fit window holds {int(sel.sum())} samples (< {MIN_FIT_SAMPLES})")
    t = raw_counts.times[sel] - t_peak  # local time for conditioning
    y = raw_counts.counts[sel].astype(float)
    pre_mask = t < 0
    c0 = float(y[pre_mask].mean()) if pre_mask.any() else float(y.min())
    a0 = max(float(y.max()) - c0, 0.1)

    def residuals(params):
        a, c, t0, tau = params
        model = np.full(t.shape, c)
        m = t >= t0
        model[m] = c + a * np.exp(-(t[m] - t0) / tau)
        return model - y

    lower = [0.0, -np.inf, float(t[0]), TAU_BOUNDS[0]]
    upper = [2.0 * n_qubits, np.inf, float(t[-1]), TAU_BOUNDS[1]]
    best = None
    for tau0 in TAU_STARTS:
        try:
            res = least_squares(
                residuals,
                [a0, c0, 0.0, tau0],
                bounds=(lower, upper),
                x_scale=[max(a0, 1.0), 1.0, 0.01, 0.01],
            )
        except Exception:
            continue
        if best is None or res.cost < best.cost:
            best = res
    if best is None:
        return PeakFit(t_peak, DEFAULT_FILTER_TAU, a0 + c0, c0, float("nan"), False)
    a, c, t0, tau = best.x
    rms = float(np.sqrt(np.mean(best.fun**2)))
    return PeakFit(float(t0 + t_peak), float(tau), float(a + c), float(c), rms, bool(best.success))


def detect_events(
    raw_counts: CountSeries,
    n_qubits: int,
    filter_tau: float = DEFAULT_FILTER_TAU,
    threshold: float = DEFAULT_THRESHOLD,
) -> list[PeakFit]:
    """Filter, threshold, and fit every located peak of one count series."""
    filtered = matched_filter(raw_counts, filter_tau)
    peak_times = find_peaks(filtered, threshold)
    fits = []
    for tp in peak_times:
        try:
            fits.append(fit_event(raw_counts, tp, n_qubits, neighbor_peaks=peak_times))
        except InsufficientDataError:
            continue
    return fits


def inter_event_intervals(peaks_per_dataset: list[np.ndarray]) -> np.ndarray:
    """Consecutive peak-time differences within each dataset, never across."""
    gaps = []
    for peaks in peaks_per_dataset:
        peaks = np.asarray(peaks, dtype=float)
        if len(peaks) >= 2:
            gaps.append(np.diff(peaks))
    if not gaps:
        return np.asarray([], dtype=float)
    return np.concatenate(gaps)
