"""Dataset, sidecar, and result file formats.

Dataset format (version 1): a `# qpburst-dataset v1` header line, one
`# {...}` JSON metadata line, a CSV header, then one row per record:
`cycle,slot,time_s,b0,...,b{N-1}`.  Ground-truth events live in a sidecar
named `<base>.events.csv`.  All writes go through a temp-file rename so
readers never observe partial files.
"""

import hashlib
import json
import os
from pathlib import Path

import numpy as np

from .device import DeviceConfig, PrepState
from .errors import DatasetParseError
from .impact import EventKind, ImpactEvent
from .sampler import Dataset, SamplingPlan

DATASET_HEADER = "# qpburst-dataset v1"
EVENTS_SIDECAR_SUFFIX = ".events.csv"
TIME_FORMAT = "%.9e"  # >= 9 significant digits for all serialized times


def atomic_write_text(path: Path, text: str) -> None:
    tmp = path.with_name(path.name + ".tmp")
    tmp.write_text(text)
    os.replace(tmp, path)


def write_dataset(path: Path, dataset: Dataset) -> None:
    path = Path(path)
    plan = dataset.plan
    meta = {
        "n_qubits": dataset.device.n_qubits,
        "cycle_interval_us": plan.cycle_interval * 1e6,
        "sampling_times_us": [t * 1e6 for t in plan.sampling_times],
        "prep_state": plan.prep_state.value,
        "seed": dataset.seed,
        "extra_window_us": plan.extra_window * 1e6,
    }
    lines = [DATASET_HEADER, "# " + json.dumps(meta)]
    nq = dataset.device.n_qubits
    lines.append("cycle,slot,time_s," + ",".join(f"b{i}" for i in range(nq)))
    # bit columns rendered in bulk: ",b0,b1,..." per record as raw ASCII
    block = np.empty((dataset.n_records, 2 * nq), dtype=np.uint8)
    block[:, 0::2] = ord(",")
    block[:, 1::2] = dataset.bits + ord("0")
    bit_rows = block.reshape(-1).tobytes().decode("ascii")
    width = 2 * nq
    for i in range(dataset.n_records):
        lines.append(
            f"{dataset.cycle_indices[i]},{dataset.slot_indices[i]},"
            + (TIME_FORMAT % dataset.wall_times[i])
            + bit_rows[i * width : (i + 1) * width]
        )
    atomic_write_text(path, "\n".join(lines) + "\n")


def read_dataset(path: Path, device: DeviceConfig | None = None) -> Dataset:
    """Parse a dataset file; a matching events sidecar is loaded if present.

    A device config may be supplied to attach the full device snapshot;
    otherwise a homogeneous default-geometry device of the recorded qubit
    count is assumed.
    """
    from .device import default_device

    path = Path(path)
    text = path.read_text().splitlines()
    if not text or text[0].strip() != DATASET_HEADER:
        raise DatasetParseError(f"{path}: missing dataset header", line=1)
    if len(text) < 3 or not text[1].startswith("# "):
        raise DatasetParseError(f"{path}: missing metadata line", line=2)
    try:
        meta = json.loads(text[1][2:])
    except json.JSONDecodeError as e:
        raise DatasetParseError(f"{path}: bad metadata JSON: {e.msg}", line=2, column=e.colno)
    nq = int(meta["n_qubits"])
    plan = SamplingPlan(
        prep_state=PrepState(meta["prep_state"]),
        sampling_times=tuple(t * 1e-6 for t in meta["sampling_times_us"]),
        cycle_interval=meta["cycle_interval_us"] * 1e-6,
        n_cycles=max((len(text) - 3) // max(len(meta["sampling_times_us"]), 1), 1),
        extra_window=meta.get("extra_window_us", 0.5) * 1e-6,
    )
    if device is None:
        device = default_device()
        if device.n_qubits != nq:
            raise DatasetParseError(
                f"{path}: {nq} qubits but no matching device config supplied", line=2
            )
    n_rows = len(text) - 3
    cycles = np.empty(n_rows, dtype=np.int64)
    slots = np.empty(n_rows, dtype=np.int16)
    times = np.empty(n_rows, dtype=float)
    width = 2 * nq  # trailing ",b" pairs per record
    for i, line in enumerate(text[3:]):
        head = line[:-width].split(",") if len(line) > width else []
        if len(head) != 3:
            raise DatasetParseError(f"{path}: expected cycle,slot,time_s + {nq} bits", line=i + 4)
        try:
            cycles[i] = int(head[0])
            slots[i] = int(head[1])
            times[i] = float(head[2])
        except ValueError as e:
            raise DatasetParseError(f"{path}: {e}", line=i + 4)
    blob = "".join(line[-width:] for line in text[3:]).encode("ascii")
    block = np.frombuffer(blob, dtype=np.uint8).reshape(n_rows, width)
    if not (block[:, 0::2] == ord(",")).all():
        bad = int(np.argmax((block[:, 0::2] != ord(",")).any(axis=1)))
        raise DatasetParseError(f"{path}: malformed bit columns", line=bad + 4)
    bits = block[:, 1::2] - ord("0")
    if bits.max(initial=0) > 1:
        bad = int(np.argmax((bits > 1).any(axis=1)))
        raise DatasetParseError(f"{path}: bit values must be 0/1", line=bad + 4)
    bits = bits.astype(np.uint8)
    events_path = path.with_name(path.stem + EVENTS_SIDECAR_SUFFIX)
    events = read_events(events_path) if events_path.exists() else []
    return Dataset(
        device=device,
        plan=plan,
        cycle_indices=cycles,
        slot_indices=slots,
        wall_times=times,
        bits=bits,
        ground_truth_events=events,
        seed=meta.get("seed"),
    )


def events_sidecar_path(dataset_path: Path) -> Path:
    dataset_path = Path(dataset_path)
    return dataset_path.with_name(dataset_path.stem + EVENTS_SIDECAR_SUFFIX)


def write_events(path: Path, events: list[ImpactEvent]) -> None:
    lines = ["t_s,x_mm,y_mm,energy_ev,kind"]
    for ev in events:
        lines.append(
            (TIME_FORMAT % ev.t_impact)
            + f",{ev.location[0]:.6f},{ev.location[1]:.6f},{ev.deposited_energy:.6e},{ev.kind.value}"
        )
    atomic_write_text(Path(path), "\n".join(lines) + "\n")


def read_events(path: Path) -> list[ImpactEvent]:
    lines = Path(path).read_text().splitlines()
    if not lines or lines[0] != "t_s,x_mm,y_mm,energy_ev,kind":
        raise DatasetParseError(f"{path}: bad events header", line=1)
    events = []
    for i, line in enumerate(lines[1:]):
        if not line.strip():
            continue
        parts = line.split(",")
        if len(parts) != 5:
            raise DatasetParseError(f"{path}: expected 5 columns", line=i + 2)
        try:
            events.append(
                ImpactEvent(
                    float(parts[0]),
                    (float(parts[1]), float(parts[2])),
                    float(parts[3]),
                    EventKind(parts[4]),
                )
            )
        except ValueError as e:
            raise DatasetParseError(f"{path}: {e}", line=i + 2)
    return events


def write_peaks_csv(path: Path, rows: list[dict]) -> None:
    """Peak-fit table: one row per fitted event."""
    lines = ["dataset_id,t0_s,tau_ms,height,baseline,residual_rms,converged"]
    for r in rows:
        lines.append(
            f"{r['dataset_id']},"
            + (TIME_FORMAT % r["t0_s"])
            + f",{r['tau_ms']:.6f},{r['height']:.6f},{r['baseline']:.6f},"
            f"{r['residual_rms']:.6f},{int(r['converged'])}"
        )
    atomic_write_text(Path(path), "\n".join(lines) + "\n")


def write_intervals_csv(path: Path, intervals: np.ndarray) -> None:
    lines = ["interval_s"] + [(TIME_FORMAT % v) for v in intervals]
    atomic_write_text(Path(path), "\n".join(lines) + "\n")


def sha256_file(path: Path) -> str:
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


def write_manifest(path: Path, entries: list[tuple[str, str]]) -> None:
    """Manifest of run outputs: name and sha256 per file, JSON encoded."""
    payload = {"files": [{"name": n, "sha256": h} for n, h in entries]}
    atomic_write_text(Path(path), json.dumps(payload, indent=2) + "\n")
