"""Synthetic RReCS / T-RReCS measurement datasets.

Each cycle prepares every qubit, idles for one or more sampling times,
and measures; error bits are Bernoulli draws from the per-qubit error
probability implied by the instantaneous T1 trajectory.  Generation is
chunked over cycles so long datasets stay memory-bounded, and is
bit-reproducible for a fixed seed.
"""

from dataclasses import dataclass, field
from typing import Iterator

import numpy as np

from .cascade import MaterialParams, aluminum
from .device import DeviceConfig, PrepState
from .errors import ConfigError, InvalidInputError, InvalidParameterError
from .impact import EventProfileParams, ImpactEvent, relaxation_rates

DEFAULT_CYCLE_INTERVAL = 100e-6  # s
DEFAULT_EXTRA_WINDOW = 500e-9  # s
_CHUNK_CYCLES = 1 << 16


@dataclass(frozen=True)
class SamplingPlan:
    """Cycle layout: preparation state, per-cycle sampling times, and timing.

    A single sampling time gives a plain RReCS run; several give a
    time-multiplexed (T-RReCS) run whose measurements are spread evenly
    across the cycle interval.
    """

    prep_state: PrepState = PrepState.ONE
    sampling_times: tuple[float, ...] = (1e-6,)
    cycle_interval: float = DEFAULT_CYCLE_INTERVAL
    n_cycles: int = 1
    extra_window: float = DEFAULT_EXTRA_WINDOW

    def __post_init__(self):
        object.__setattr__(self, "sampling_times", tuple(self.sampling_times))
        if len(self.sampling_times) < 1:
            raise ConfigError("plan needs at least one sampling time")
        if any(t < 0 for t in self.sampling_times):
            raise ConfigError("sampling times must be nonnegative")
        if self.cycle_interval <= max(self.sampling_times):
            raise ConfigError("cycle_interval must exceed the longest sampling time")
        if self.n_cycles < 1:
            raise ConfigError("n_cycles must be at least 1")
        if self.extra_window < 0:
            raise ConfigError("extra_window must be nonnegative")

    @property
    def n_slots(self) -> int:
        return len(self.sampling_times)

    def slot_offsets(self) -> np.ndarray:
        """Intra-cycle start offsets, evenly spaced across the interval."""
        return np.arange(self.n_slots) * self.cycle_interval / self.n_slots

    @property
    def duration(self) -> float:
        return self.n_cycles * self.cycle_interval


@dataclass(frozen=True)
class MeasurementRecord:
    cycle_index: int
    wall_time: float
    sampling_time_index: int
    error_bits: np.ndarray


@dataclass
class Dataset:
    """One simulated run: plan, device snapshot, and per-record error bits.

    Bits are stored as a (n_records, n_qubits) uint8 array ordered by
    (cycle_index, sampling_time_index); `records()` yields the row view.
    """

    device: DeviceConfig
    plan: SamplingPlan
    cycle_indices: np.ndarray
    slot_indices: np.ndarray
    wall_times: np.ndarray
    bits: np.ndarray
    ground_truth_events: list[ImpactEvent] = field(default_factory=list)
    seed: int | None = None

    @property
    def n_records(self) -> int:
        return self.bits.shape[0]

    def records(self) -> Iterator[MeasurementRecord]:
        for i in range(self.n_records):
            yield MeasurementRecord(
                int(self.cycle_indices[i]),
                float(self.wall_times[i]),
                int(self.slot_indices[i]),
                self.bits[i],
            )


@dataclass(frozen=True)
class CountSeries:
    """Uniformly spaced simultaneous-error-count time series for one slot."""

    times: np.ndarray
    counts: np.ndarray
    slot: int = 0

    @property
    def dt(self) -> float:
        if len(self.times) < 2:
            raise InvalidParameterError("series too short to define a spacing")
        steps = np.diff(self.times)
        dt = steps[0]
        if not np.allclose(steps, dt, rtol=1e-9, atol=1e-12):
            raise InvalidInputError("count series is not uniformly spaced")
        return float(dt)


def _per_slot_probabilities(
    device: DeviceConfig,
    events: list[ImpactEvent],
    profile: EventProfileParams,
    material: MaterialParams,
    plan: SamplingPlan,
    cycle_lo: int,
    cycle_hi: int,
) -> np.ndarray:
    """Observed error probabilities, shape (n_cycles_chunk, n_slots, n_q)."""
    cycles = np.arange(cycle_lo, cycle_hi)
    offsets = plan.slot_offsets()
    walls = cycles[:, None] * plan.cycle_interval + offsets[None, :]
    nq = device.n_qubits
    p = np.empty((len(cycles), plan.n_slots, nq))
    eps01 = np.asarray([q.eps_read0_given1 for q in device.qubits])
    eps10 = np.asarray([q.eps_read1_given0 for q in device.qubits])
    if plan.prep_state is PrepState.ZERO:
        p[:] = eps10[None, None, :]
        return p
    for j in range(plan.n_slots):
        gamma = relaxation_rates(device, events, profile, material, walls[:, j])
        p_decay = -np.expm1(-(plan.sampling_times[j] + plan.extra_window) * gamma)
        p[:, j, :] = p_decay * (1 - eps10)[None, :] + (1 - p_decay) * eps01[None, :]
    return p


def run_rrecs(
    device: DeviceConfig,
    events: list[ImpactEvent],
    profile: EventProfileParams,
    plan: SamplingPlan,
    rng_seed: int,
    material: MaterialParams | None = None,
) -> Dataset:
    """Simulate one dataset: Bernoulli error bits for every cycle and slot.

    The random stream is consumed in fixed chunk order, so identical
    inputs and seed give bit-identical datasets.
    """
    material = material if material is not None else aluminum()
    rng = np.random.default_rng(rng_seed)
    n = plan.n_cycles
    nq = device.n_qubits
    bits = np.empty((n * plan.n_slots, nq), dtype=np.uint8)
    for lo in range(0, n, _CHUNK_CYCLES):
        hi = min(lo + _CHUNK_CYCLES, n)
        p = _per_slot_probabilities(device, events, profile, material, plan, lo, hi)
        draws = rng.random(p.shape)
        bits[lo * plan.n_slots : hi * plan.n_slots] = (draws < p).reshape(-1, nq)
    cycles = np.repeat(np.arange(n, dtype=np.int64), plan.n_slots)
    slots = np.tile(np.arange(plan.n_slots, dtype=np.int16), n)
    walls = cycles * plan.cycle_interval + plan.slot_offsets()[slots]
    return Dataset(
        device=device,
        plan=plan,
        cycle_indices=cycles,
        slot_indices=slots,
        wall_times=walls,
        bits=bits,
        ground_truth_events=list(events),
        seed=rng_seed,
    )


def error_counts(dataset: Dataset) -> list[CountSeries]:
    """Simultaneous error counts summed over qubits, one series per slot."""
    if dataset.n_records == 0:
        raise InvalidParameterError("dataset has no records")
    totals = dataset.bits.sum(axis=1)
    out = []
    for j in range(dataset.plan.n_slots):
        sel = dataset.slot_indices == j
        out.append(
            CountSeries(
                times=dataset.wall_times[sel],
                counts=totals[sel].astype(np.int64),
                slot=j,
            )
        )
    return out
