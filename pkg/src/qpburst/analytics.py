"""Statistical analyses: background count model, arrival statistics,
T-RReCS T1 extraction, and spatial error-rate maps."""

from dataclasses import dataclass

import numpy as np
from scipy.optimize import least_squares

from .device import DeviceConfig, decay_error_probability, observed_error_probability
from .errors import InsufficientDataError, InvalidParameterError
from .sampler import Dataset, SamplingPlan

KS_CALIBRATION_RESAMPLES = 10_000
KS_CALIBRATION_SEED = 0x5EED
T1_FIT_BOUNDS = (1e-8, 1e-3)  # s
T1_STARTS = (0.5e-6, 1e-6, 2e-6, 5e-6, 10e-6)


@dataclass(frozen=True)
class CountDistribution:
    """Exact distribution of the simultaneous error count, 0..n_qubits."""

    pmf: np.ndarray

    @property
    def support_max(self) -> int:
        return len(self.pmf) - 1

    def mean(self) -> float:
        return float(np.dot(np.arange(len(self.pmf)), self.pmf))

    def variance(self) -> float:
        k = np.arange(len(self.pmf))
        return float(np.dot(k**2, self.pmf) - self.mean() ** 2)

    def percentile(self, q: float) -> int:
        """Smallest count whose CDF reaches q."""
        return int(np.searchsorted(np.cumsum(self.pmf), q))


def poisson_binomial_pmf(ps: np.ndarray) -> np.ndarray:
    """PMF of a sum of independent Bernoulli(p_i) by direct convolution."""
    ps = np.asarray(ps, dtype=float)
    if np.any((ps < 0) | (ps > 1)):
        raise InvalidParameterError("probabilities must lie in [0, 1]")
    pmf = np.ones(1)
    for p in ps:
        pmf = np.convolve(pmf, [1 - p, p])
    return pmf


def independent_count_pmf(device: DeviceConfig, plan: SamplingPlan) -> CountDistribution:
    """Background count distribution under independent T1 + readout errors.

    Per-qubit probabilities come from baseline T1 decay over each sampling
    time plus readout misclassification; for multi-slot plans the result
    is the equal-weight mixture over slots (matching counts pooled across
    all records).
    """
    nq = device.n_qubits
    mix = np.zeros(nq + 1)
    for t_samp in plan.sampling_times:
        ps = [
            observed_error_probability(
                decay_error_probability(q.t1_baseline, t_samp, plan.extra_window),
                q,
                plan.prep_state,
            )
            for q in device.qubits
        ]
        mix += poisson_binomial_pmf(np.asarray(ps))
    mix /= plan.n_slots
    return CountDistribution(pmf=mix)


@dataclass(frozen=True)
class HistogramComparison:
    total_variation: float
    chi_square: float
    excess_tail_mass: float


def histogram_comparison(counts: np.ndarray, model: CountDistribution) -> HistogramComparison:
    """Empirical count histogram vs the independent-error model.

    excess_tail_mass is the observed-minus-model probability of counts
    beyond the model's 99.99th percentile, floored at zero.
    """
    counts = np.asarray(counts, dtype=np.int64)
    if counts.size == 0:
        raise InsufficientDataError("empty count series")
    n = len(model.pmf) - 1
    hist = np.bincount(np.clip(counts, 0, n), minlength=n + 1).astype(float)
    emp = hist / hist.sum()
    tv = 0.5 * float(np.abs(emp - model.pmf).sum())
    expected = model.pmf * counts.size
    nz = expected > 0
    chi2 = float(((hist[nz] - expected[nz]) ** 2 / expected[nz]).sum())
    q = model.percentile(0.9999)
    tail_obs = float(emp[q + 1 :].sum())
    tail_model = float(model.pmf[q + 1 :].sum())
    return HistogramComparison(tv, chi2, max(tail_obs - tail_model, 0.0))


@dataclass(frozen=True)
class PoissonRateFit:
    lambda_mle: float
    ks_statistic: float
    ks_pvalue: float
    n_intervals: int


def _ks_stat_exponential(x: np.ndarray) -> float:
    """One-sample KS statistic against Exp(1/mean(x))."""
    x = np.sort(x)
    n = len(x)
    cdf = -np.expm1(-x / x.mean())
    grid = np.arange(1, n + 1) / n
    return float(np.max(np.maximum(grid - cdf, cdf - (grid - 1 / n))))


def poisson_rate_fit(
    intervals: np.ndarray,
    n_calibration: int = KS_CALIBRATION_RESAMPLES,
    calibration_seed: int = KS_CALIBRATION_SEED,
) -> PoissonRateFit:
    """MLE of the event rate plus a KS test against exponential inter-arrivals.

    The KS p-value is Monte Carlo calibrated (Lilliefors style) because the
    rate is estimated from the same sample; the plug-in KS distribution
    would be anti-conservative.
    """
    intervals = np.asarray(intervals, dtype=float)
    if len(intervals) < 2:
        raise InsufficientDataError("need at least 2 intervals")
    if np.any(intervals <= 0):
        raise InvalidParameterError("intervals must be positive")
    lam = 1.0 / intervals.mean()
    stat = _ks_stat_exponential(intervals)
    rng = np.random.default_rng(calibration_seed)
    n = len(intervals)
    exceed = 0
    for _ in range(n_calibration):
        sim = rng.exponential(1.0, n)
        if _ks_stat_exponential(sim) >= stat:
            exceed += 1
    return PoissonRateFit(lam, stat, exceed / n_calibration, n)


@dataclass(frozen=True)
class T1Extraction:
    t1_avg: float
    amplitude_a: float
    per_slot_heights: np.ndarray
    zero_param_residual: float
    converged: bool


def t1_from_peak_heights(
    heights: np.ndarray,
    sampling_times: np.ndarray,
    n_qubits: int,
    extra_window: float = 500e-9,
) -> T1Extraction:
    """Fit h = a*(1 - exp(-(t + extra_window)/T1)) to per-slot peak heights.

    Also evaluates the zero-parameter prediction
    h = n_qubits*(1 - exp(-(t + extra_window)/T1)) at the fitted T1 and
    reports its RMS residual.  Degenerate inputs are reported as
    converged=False rather than raised.
    """
    heights = np.asarray(heights, dtype=float)
    t_eff = np.asarray(sampling_times, dtype=float) + extra_window
    if len(heights) < 3 or len(heights) != len(t_eff):
        raise InsufficientDataError("need at least 3 (height, time) pairs")
    if np.any(heights <= 0):
        raise InvalidParameterError("heights must be positive")

    def residuals(params):
        a, t1 = params
        return a * -np.expm1(-t_eff / t1) - heights

    best = None
    for t1_0 in T1_STARTS:
        try:
            res = least_squares(
                residuals,
                [float(n_qubits), t1_0],
                bounds=([0.0, T1_FIT_BOUNDS[0]], [2.0 * n_qubits, T1_FIT_BOUNDS[1]]),
                x_scale=[float(n_qubits), 1e-6],
            )
        except Exception:
            continue
        if best is None or res.cost < best.cost:
            best = res
    if best is None or not best.success:
        return T1Extraction(float("nan"), float("nan"), heights, float("nan"), False)
    a, t1 = best.x
    zero_param = n_qubits * -np.expm1(-t_eff / t1)
    rms = float(np.sqrt(np.mean((zero_param - heights) ** 2)))
    return T1Extraction(float(t1), float(a), heights, rms, True)


def correct_heights_for_readout(
    heights: np.ndarray, device: DeviceConfig
) -> np.ndarray:
    """Undo readout misclassification in summed-count heights.

    Inverts h = N*(p*(1-eps10) + (1-p)*eps01) per slot using the device's
    mean readout errors, returning N*p (decay-only heights).  This is
    the same use of separately known readout fidelities as the
    independent-error background model.
    """
    heights = np.asarray(heights, dtype=float)
    nq = device.n_qubits
    eps01 = float(np.mean([q.eps_read0_given1 for q in device.qubits]))
    eps10 = float(np.mean([q.eps_read1_given0 for q in device.qubits]))
    p = (heights / nq - eps01) / (1.0 - eps10 - eps01)
    return nq * p


HEIGHT_FIT_SPAN = 25e-3  # s of tail used per slot-height fit
HEIGHT_FIT_PRE = 20e-3  # s of pre-peak baseline for the fixed offset
HEIGHT_TAU_STARTS = (10e-3, 20e-3, 50e-3)


def slot_peak_height(
    times: np.ndarray, counts: np.ndarray, t_peak: float,
    span: float = HEIGHT_FIT_SPAN, pre: float = HEIGHT_FIT_PRE,
) -> float:
    """Peak count level for one slot: short truncated-exponential fit.

    The offset is pinned to the pre-peak mean and only (amplitude, tau)
    are fit over the first `span` of tail, which keeps the height anchored
    to the peak even when the response saturates into a plateau.
    """
    tl = np.asarray(times, dtype=float) - t_peak
    y = np.asarray(counts, dtype=float)
    pre_mask = (tl >= -pre) & (tl < -1e-3)
    post_mask = (tl >= 0) & (tl <= span)
    if pre_mask.sum() < 5 or post_mask.sum() < 10:
        raise InsufficientDataError("slot window too small for a height fit")
    c = float(y[pre_mask].mean())
    t2, y2 = tl[post_mask], y[post_mask]
    a0 = max(float(y2.max()) - c, 0.1)
    best = None
    for tau0 in HEIGHT_TAU_STARTS:
        res = least_squares(
            lambda p: p[0] * np.exp(-t2 / p[1]) + c - y2,
            [a0, tau0],
            bounds=([0.0, 1e-3], [1e3, 0.2]),
            x_scale=[max(a0, 1.0), 0.01],
        )
        if best is None or res.cost < best.cost:
            best = res
    return float(best.x[0]) + c


def trrecs_extract_t1(
    dataset: Dataset,
    filter_tau: float = 20e-3,
    threshold: float = 2.0,
    readout_correction: bool = True,
) -> tuple[T1Extraction, np.ndarray]:
    """Full T-RReCS analysis: locate events, extract per-slot peak heights,
    and fit the average T1 implied by their sampling-time dependence.

    Events are located on the most decay-sensitive slot (longest sampling
    time); every slot is then fit at those shared event times.  Heights
    are averaged over events and corrected for the device's known readout
    misclassification before the exponential fit.  Returns the extraction
    and the located event times.
    """
    from .detector import find_peaks, matched_filter
    from .sampler import error_counts

    plan = dataset.plan
    if plan.n_slots < 3:
        raise InsufficientDataError("T-RReCS extraction needs at least 3 sampling times")
    series = error_counts(dataset)
    ref = int(np.argmax(plan.sampling_times))
    filtered = matched_filter(series[ref], filter_tau)
    peak_times = find_peaks(filtered, threshold)
    heights = []
    for tp in peak_times:
        try:
            heights.append(
                [slot_peak_height(s.times, s.counts, tp) for s in series]
            )
        except InsufficientDataError:
            continue
    if not heights:
        raise InsufficientDataError("no usable events located in the dataset")
    hbar = np.asarray(heights).mean(axis=0)
    if readout_correction:
        hbar = correct_heights_for_readout(hbar, dataset.device)
    extraction = t1_from_peak_heights(
        hbar, np.asarray(plan.sampling_times), dataset.device.n_qubits, plan.extra_window
    )
    return extraction, peak_times


def heatmap(dataset: Dataset, window_center: float, window_width: float = 300e-6) -> np.ndarray:
    """Per-qubit error rate over a time window, arranged by grid position.

    Returns a (rows, cols) array of error fractions in [0, 1]; grid cells
    without a qubit hold NaN.
    """
    lo = window_center - window_width / 2
    hi = window_center + window_width / 2
    sel = (dataset.wall_times >= lo) & (dataset.wall_times < hi)
    if not sel.any():
        raise InsufficientDataError("window contains no records")
    rates = dataset.bits[sel].mean(axis=0)
    rows = max(q.grid_pos[0] for q in dataset.device.qubits) + 1
    cols = max(q.grid_pos[1] for q in dataset.device.qubits) + 1
    grid = np.full((rows, cols), np.nan)
    for q, r in zip(dataset.device.qubits, rates):
        grid[q.grid_pos[0], q.grid_pos[1]] = r
    return grid
