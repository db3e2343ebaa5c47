"""Run configuration: JSON schema, validation, and construction.

Config files are JSON with a fixed key schema; unknown keys are rejected
outright so typos fail fast instead of silently using defaults.  Omitted
keys fall back to the documented defaults.
"""

import json
import math
from dataclasses import dataclass
from pathlib import Path

from .device import DeviceConfig, PrepState, QubitSpec, default_device
from .errors import ConfigError
from .impact import EnergyDistribution, EventProfileParams
from .sampler import SamplingPlan

_DEVICE_KEYS = {"chip", "omega_q_ghz", "qubit_pitch_mm", "qubits"}
_CHIP_KEYS = {"width_mm", "height_mm"}
_QUBIT_KEYS = {"id", "row", "col", "t1_us", "eps10", "eps01"}
_PROFILE_KEYS = {
    "sigma0_mm", "tau_rise_us", "tau_spread_us", "tau_decay_ms",
    "x_qp_peak_scale", "phonon_fraction", "sigma_chip_mm",
}
_PLAN_KEYS = {"prep_state", "sampling_times_us", "cycle_interval_us", "n_cycles", "extra_window_ns"}
_ENERGY_KEYS = {
    "type", "min_ev", "max_ev", "muon_split_ev",
    "gamma_energy_ev", "muon_energy_ev", "gamma_rate", "muon_rate",
}
_TOP_KEYS = {
    "device", "profile", "plan", "energy_dist",
    "event_rate_per_s", "n_datasets", "dataset_duration_s", "seed", "output_dir",
}


@dataclass(frozen=True)
class RunConfig:
    """Everything one simulation run needs."""

    device: DeviceConfig
    profile: EventProfileParams
    plan: SamplingPlan
    energy_dist: EnergyDistribution
    event_rate: float = 0.1
    n_datasets: int = 100
    dataset_duration: float = 60.0
    seed: int = 0
    output_dir: str = "out"

    def __post_init__(self):
        if self.n_datasets < 1:
            raise ConfigError("n_datasets must be >= 1")
        if self.dataset_duration <= 0:
            raise ConfigError("dataset_duration must be positive")
        if self.event_rate < 0:
            raise ConfigError("event_rate must be nonnegative")


def _check_keys(obj: dict, allowed: set, where: str) -> None:
    unknown = set(obj) - allowed
    if unknown:
        raise ConfigError(f"unknown key(s) in {where}: {', '.join(sorted(unknown))}")


def device_from_dict(cfg: dict) -> DeviceConfig:
    _check_keys(cfg, _DEVICE_KEYS, "device")
    chip = cfg.get("chip", {})
    _check_keys(chip, _CHIP_KEYS, "device.chip")
    extent = (chip.get("width_mm", 10.0), chip.get("height_mm", 10.0))
    omega = 2 * math.pi * cfg.get("omega_q_ghz", 6.0) * 1e9
    pitch = cfg.get("qubit_pitch_mm", 1.0)
    if "qubits" not in cfg:
        base = default_device()
        return DeviceConfig(base.qubits, extent, pitch, omega)
    rows_cols = []
    for i, q in enumerate(cfg["qubits"]):
        _check_keys(q, _QUBIT_KEYS, f"device.qubits[{i}]")
        try:
            rows_cols.append((int(q["row"]), int(q["col"])))
        except KeyError as e:
            raise ConfigError(f"device.qubits[{i}] missing key {e}")
    # grid centered on the chip at the configured pitch
    x0 = (extent[0] - max(c for _, c in rows_cols) * pitch) / 2
    y0 = (extent[1] - max(r for r, _ in rows_cols) * pitch) / 2
    qubits = []
    for i, q in enumerate(cfg["qubits"]):
        row, col = rows_cols[i]
        qubits.append(
            QubitSpec(
                id=int(q.get("id", i)),
                grid_pos=(row, col),
                xy=(x0 + col * pitch, y0 + row * pitch),
                t1_baseline=q.get("t1_us", 15.0) * 1e-6,
                eps_read0_given1=q.get("eps10", 0.02),
                eps_read1_given0=q.get("eps01", 0.005),
            )
        )
    return DeviceConfig(tuple(qubits), extent, pitch, omega)


def profile_from_dict(cfg: dict) -> EventProfileParams:
    _check_keys(cfg, _PROFILE_KEYS, "profile")
    sigma_chip = cfg.get("sigma_chip_mm")
    return EventProfileParams(
        sigma0=cfg.get("sigma0_mm", 1.8),
        tau_rise=cfg.get("tau_rise_us", 5.0) * 1e-6,
        tau_spread=cfg.get("tau_spread_us", 180.0) * 1e-6,
        tau_decay=cfg.get("tau_decay_ms", 25.0) * 1e-3,
        x_qp_peak_scale=cfg.get("x_qp_peak_scale", 1.0),
        phonon_fraction=cfg.get("phonon_fraction", 0.8),
        sigma_chip=None if sigma_chip is None else float(sigma_chip),
    )


def plan_from_dict(cfg: dict, n_cycles: int | None = None) -> SamplingPlan:
    _check_keys(cfg, _PLAN_KEYS, "plan")
    prep = cfg.get("prep_state", "ONE")
    try:
        prep_state = PrepState(prep)
    except ValueError:
        raise ConfigError(f"plan.prep_state must be ONE or ZERO, got {prep!r}")
    return SamplingPlan(
        prep_state=prep_state,
        sampling_times=tuple(t * 1e-6 for t in cfg.get("sampling_times_us", [1.0])),
        cycle_interval=cfg.get("cycle_interval_us", 100.0) * 1e-6,
        n_cycles=n_cycles if n_cycles is not None else cfg.get("n_cycles", 1),
        extra_window=cfg.get("extra_window_ns", 500.0) * 1e-9,
    )


def energy_dist_from_dict(cfg: dict) -> EnergyDistribution:
    _check_keys(cfg, _ENERGY_KEYS, "energy_dist")
    kind = cfg.get("type", "log_uniform")
    if kind == "log_uniform":
        return EnergyDistribution(
            kind=kind,
            min_ev=cfg.get("min_ev", 20e3),
            max_ev=cfg.get("max_ev", 1e6),
            muon_split_ev=cfg.get("muon_split_ev", 500e3),
        )
    return EnergyDistribution(
        kind=kind,
        gamma_energy_ev=cfg.get("gamma_energy_ev", 100e3),
        muon_energy_ev=cfg.get("muon_energy_ev", 1e6),
        gamma_weight=cfg.get("gamma_rate", 1 / 7.7),
        muon_weight=cfg.get("muon_rate", 1 / 38.5),
    )


def run_config_from_dict(cfg: dict) -> RunConfig:
    _check_keys(cfg, _TOP_KEYS, "config")
    duration = cfg.get("dataset_duration_s", 60.0)
    plan_cfg = dict(cfg.get("plan", {}))
    interval_us = plan_cfg.get("cycle_interval_us", 100.0)
    n_cycles = plan_cfg.pop("n_cycles", None)
    if n_cycles is None:
        n_cycles = int(round(duration / (interval_us * 1e-6)))
    return RunConfig(
        device=device_from_dict(cfg.get("device", {})),
        profile=profile_from_dict(cfg.get("profile", {})),
        plan=plan_from_dict(plan_cfg, n_cycles=n_cycles),
        energy_dist=energy_dist_from_dict(cfg.get("energy_dist", {})),
        event_rate=cfg.get("event_rate_per_s", 0.1),
        n_datasets=cfg.get("n_datasets", 100),
        dataset_duration=duration,
        seed=cfg.get("seed", 0),
        output_dir=cfg.get("output_dir", "out"),
    )


def load_run_config(path: Path) -> RunConfig:
    try:
        raw = json.loads(Path(path).read_text())
    except json.JSONDecodeError as e:
        raise ConfigError(f"{path}: invalid JSON at line {e.lineno}, column {e.colno}: {e.msg}")
    except OSError as e:
        raise ConfigError(f"{path}: {e}")
    if not isinstance(raw, dict):
        raise ConfigError(f"{path}: top level must be a JSON object")
    return run_config_from_dict(raw)
