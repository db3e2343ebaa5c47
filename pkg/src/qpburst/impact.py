"""Impact events and their spatiotemporal quasiparticle footprint.

An impact deposits energy at a point on the chip; the resulting
quasiparticle density is modeled as a separable profile: a fast local
rise, a Gaussian spatial footprint whose width grows from the initial
hotspot toward chip scale, and a global exponential recovery.  The
Gaussian is renormalized over the chip area so the energy it represents
stays on chip until the recovery term removes it.
"""

import enum
import math
from dataclasses import dataclass

import numpy as np
from scipy.special import erf

from .cascade import MaterialParams, qubit_relaxation_rate
from .device import DEFAULT_CHIP_EXTENT, DeviceConfig
from .errors import ConfigError, InvalidParameterError

# Events contribute to relaxation rates only within this many decay
# constants of their impact time; beyond it the contribution is < 1e-15
# of peak and is dropped for speed.
EVENT_WINDOW_DECAY_CONSTANTS = 35.0

_SQRT_HALF_PI = math.sqrt(math.pi / 2)


class EventKind(enum.Enum):
    GAMMA = "GAMMA"
    MUON = "MUON"


@dataclass(frozen=True)
class ImpactEvent:
    """A single energy deposition: time (s), chip location (mm), energy (eV)."""

    t_impact: float
    location: tuple[float, float]
    deposited_energy: float
    kind: EventKind = EventKind.GAMMA

    def __post_init__(self):
        if self.deposited_energy <= 0:
            raise InvalidParameterError("deposited_energy must be positive")


@dataclass(frozen=True)
class EventProfileParams:
    """Calibration of the density profile.

    sigma0: initial hotspot Gaussian width (mm).
    tau_rise: local onset time constant (s).
    tau_spread: hotspot expansion time constant (s).
    tau_decay: global recovery time constant (s).
    x_qp_peak_scale: overall dimensionless scale on the density.
    phonon_fraction: fraction of deposited energy reaching the film.
    sigma_chip: asymptotic Gaussian width (mm); None means half the
        chip diagonal of whatever chip the profile is evaluated on.
    """

    sigma0: float = 1.8
    tau_rise: float = 5e-6
    tau_spread: float = 180e-6
    tau_decay: float = 25e-3
    x_qp_peak_scale: float = 1.0
    phonon_fraction: float = 0.8
    sigma_chip: float | None = None

    def __post_init__(self):
        if self.sigma0 <= 0:
            raise InvalidParameterError("sigma0 must be positive")
        if not 0 < self.tau_rise < self.tau_spread < self.tau_decay:
            raise InvalidParameterError("need 0 < tau_rise < tau_spread < tau_decay")
        if self.x_qp_peak_scale <= 0:
            raise InvalidParameterError("x_qp_peak_scale must be positive")
        if not 0 <= self.phonon_fraction <= 1:
            raise InvalidParameterError("phonon_fraction must be in [0, 1]")
        if self.sigma_chip is not None and self.sigma_chip <= self.sigma0:
            raise InvalidParameterError("sigma_chip must exceed sigma0")


@dataclass(frozen=True)
class EnergyDistribution:
    """Deposited-energy distribution for sampled events.

    kind "log_uniform": energies log-uniform on [min_ev, max_ev]; events
    above muon_split_ev are labeled MUON.  kind "gamma_muon": two-point
    mixture at gamma_energy_ev / muon_energy_ev weighted by the two rates.
    """

    kind: str = "log_uniform"
    min_ev: float = 20e3
    max_ev: float = 1e6
    muon_split_ev: float = 500e3
    gamma_energy_ev: float = 100e3
    muon_energy_ev: float = 1e6
    gamma_weight: float = 1 / 7.7
    muon_weight: float = 1 / 38.5

    def __post_init__(self):
        if self.kind not in ("log_uniform", "gamma_muon"):
            raise ConfigError(f"unknown energy distribution kind {self.kind!r}")
        if self.kind == "log_uniform" and not 0 < self.min_ev < self.max_ev:
            raise ConfigError("log_uniform requires 0 < min_ev < max_ev")
        if self.kind == "gamma_muon":
            if self.gamma_energy_ev <= 0 or self.muon_energy_ev <= 0:
                raise ConfigError("gamma_muon energies must be positive")
            if self.gamma_weight < 0 or self.muon_weight < 0 or self.gamma_weight + self.muon_weight == 0:
                raise ConfigError("gamma_muon weights must be nonnegative and not both zero")


def sample_events(
    duration: float,
    rate_lambda: float,
    energy_dist: EnergyDistribution | None,
    rng_seed: int,
    chip_extent: tuple[float, float] = DEFAULT_CHIP_EXTENT,
) -> list[ImpactEvent]:
    """Draw impact events from a homogeneous Poisson process.

    Times are Poisson with the given rate, locations uniform over the
    chip, energies from energy_dist.  Deterministic for a fixed seed.
    """
    if duration <= 0:
        raise InvalidParameterError("duration must be positive")
    if rate_lambda < 0:
        raise InvalidParameterError("rate_lambda must be nonnegative")
    dist = energy_dist if energy_dist is not None else EnergyDistribution()
    rng = np.random.default_rng(rng_seed)
    n = rng.poisson(rate_lambda * duration)
    times = np.sort(rng.uniform(0.0, duration, n))
    xs = rng.uniform(0.0, chip_extent[0], n)
    ys = rng.uniform(0.0, chip_extent[1], n)
    events = []
    for i in range(n):
        if dist.kind == "log_uniform":
            e = math.exp(rng.uniform(math.log(dist.min_ev), math.log(dist.max_ev)))
            kind = EventKind.MUON if e >= dist.muon_split_ev else EventKind.GAMMA
        else:
            p_muon = dist.muon_weight / (dist.gamma_weight + dist.muon_weight)
            if rng.random() < p_muon:
                e, kind = dist.muon_energy_ev, EventKind.MUON
            else:
                e, kind = dist.gamma_energy_ev, EventKind.GAMMA
        events.append(ImpactEvent(float(times[i]), (float(xs[i]), float(ys[i])), e, kind))
    return events


def _sigma_chip(profile: EventProfileParams, chip_extent: tuple[float, float]) -> float:
    if profile.sigma_chip is not None:
        return profile.sigma_chip
    return math.hypot(*chip_extent) / 2


def _chip_gaussian_integral(x0: float, y0: float, sigma, chip_extent) -> np.ndarray:
    """Integral of exp(-r^2 / (2 sigma^2)) over the chip rectangle, in mm^2."""
    w, h = chip_extent
    s2 = sigma * math.sqrt(2)
    ix = sigma * _SQRT_HALF_PI * (erf((w - x0) / s2) - erf((0 - x0) / s2))
    iy = sigma * _SQRT_HALF_PI * (erf((h - y0) / s2) - erf((0 - y0) / s2))
    return ix * iy


def _event_density_grid(
    event: ImpactEvent,
    profile: EventProfileParams,
    xy_mm: np.ndarray,
    times: np.ndarray,
    material: MaterialParams,
    chip_extent: tuple[float, float],
) -> np.ndarray:
    """x_qp for one event at positions xy_mm (n_pos, 2) and times (n_t,).

    Returns an (n_t, n_pos) array; zero before the impact and beyond the
    event's influence window.
    """
    out = np.zeros((len(times), len(xy_mm)))
    rel = times - event.t_impact
    mask = (rel > 0) & (rel < EVENT_WINDOW_DECAY_CONSTANTS * profile.tau_decay)
    if not mask.any():
        return out
    t = rel[mask]
    rise = -np.expm1(-t / profile.tau_rise)
    decay = np.exp(-t / profile.tau_decay)
    sig_inf = _sigma_chip(profile, chip_extent)
    s2 = profile.sigma0**2 + (sig_inf**2 - profile.sigma0**2) * (-np.expm1(-t / profile.tau_spread))
    sigma = np.sqrt(s2)
    x0, y0 = event.location
    footprint_um2 = _chip_gaussian_integral(x0, y0, sigma, chip_extent) * 1e6  # mm^2 -> um^2
    # energy-areal-density scale: x_qp = 1 corresponds to this many eV/um^2
    e_areal = material.thickness * 1e6 * material.gap_delta * material.n_cp
    e_film = profile.phonon_fraction * event.deposited_energy
    peak = profile.x_qp_peak_scale * e_film * rise * decay / (e_areal * footprint_um2)
    r2 = (xy_mm[:, 0] - x0) ** 2 + (xy_mm[:, 1] - y0) ** 2
    out[mask] = peak[:, None] * np.exp(-r2[None, :] / (2 * s2[:, None]))
    return out


def qp_density_at(
    event: ImpactEvent,
    profile: EventProfileParams,
    pos: tuple[float, float],
    t: float,
    material: MaterialParams,
    chip_extent: tuple[float, float] = DEFAULT_CHIP_EXTENT,
) -> float:
    """Normalized quasiparticle density from one event at one point and time.

    The spatial integral of the density (times the film's pair energy
    density) equals phonon_fraction * deposited_energy * rise * decay,
    i.e. the Gaussian footprint is renormalized over the chip.
    """
    grid = _event_density_grid(
        event, profile, np.asarray([pos], dtype=float), np.asarray([t], dtype=float),
        material, chip_extent,
    )
    return float(grid[0, 0])


def relaxation_rates(
    device: DeviceConfig,
    events: list[ImpactEvent],
    profile: EventProfileParams,
    material: MaterialParams,
    times: np.ndarray,
) -> np.ndarray:
    """Total per-qubit relaxation rate Gamma(q, t), shape (n_t, n_q)."""
    times = np.asarray(times, dtype=float)
    xy = np.asarray([q.xy for q in device.qubits])
    gamma = np.tile(
        np.asarray([1.0 / q.t1_baseline for q in device.qubits]), (len(times), 1)
    )
    coupling = qubit_relaxation_rate(1.0, device.omega_q, material)
    for ev in events:
        x = _event_density_grid(ev, profile, xy, times, material, device.chip_extent)
        gamma += coupling * x
    return gamma


def t1_trajectory(
    device: DeviceConfig,
    events: list[ImpactEvent],
    profile: EventProfileParams,
    material: MaterialParams,
    times: np.ndarray,
) -> np.ndarray:
    """Per-qubit T1(t), shape (n_t, n_q); events superpose additively in rate."""
    times = np.asarray(times, dtype=float)
    if len(times) > 1 and np.any(np.diff(times) < 0):
        raise InvalidParameterError("times must be sorted ascending")
    return 1.0 / relaxation_rates(device, events, profile, material, times)


def energy_for_uniform_t1_floor(
    t1_floor: float,
    device: DeviceConfig,
    profile: EventProfileParams,
    material: MaterialParams,
) -> float:
    """Deposited energy whose fully spread uniform density drags every
    qubit down to t1_floor at the event peak (assumes homogeneous
    baseline T1 and a spatially uniform profile, i.e. huge sigma0)."""
    if t1_floor <= 0:
        raise InvalidParameterError("t1_floor must be positive")
    base = 1.0 / device.qubits[0].t1_baseline
    gamma_event = 1.0 / t1_floor - base
    if gamma_event <= 0:
        raise InvalidParameterError("t1_floor must be below the baseline T1")
    coupling = qubit_relaxation_rate(1.0, device.omega_q, material)
    x_needed = gamma_event / coupling
    w, h = device.chip_extent
    chip_um2 = w * h * 1e6
    e_areal = material.thickness * 1e6 * material.gap_delta * material.n_cp
    return x_needed * chip_um2 * e_areal / (profile.phonon_fraction * profile.x_qp_peak_scale)
