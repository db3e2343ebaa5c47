"""Simulated qubit array and its per-cycle error-probability model.

The device is a fixed set of transmon-like qubits on a chip; each qubit
carries a baseline T1 and state-conditional readout misclassification
probabilities.  Decay during the idle window plus readout errors map a
T1 value to the probability of recording an error in one sampling cycle.
"""

import enum
import math
from dataclasses import dataclass, field

from .errors import InvalidParameterError

DEFAULT_CHIP_EXTENT = (10.0, 10.0)  # mm
DEFAULT_QUBIT_PITCH = 1.0  # mm
DEFAULT_T1 = 15e-6  # s
DEFAULT_EPS_READ0_GIVEN1 = 0.02
DEFAULT_EPS_READ1_GIVEN0 = 0.005
DEFAULT_OMEGA_Q = 2 * math.pi * 6e9  # rad/s


class PrepState(enum.Enum):
    """Initial qubit state for a sampling cycle.

    ONE flags decayed |0> outcomes as errors; ZERO flags excited |1>
    outcomes (which only readout can produce in this model).
    """

    ONE = "ONE"
    ZERO = "ZERO"


@dataclass(frozen=True)
class QubitSpec:
    """One qubit: grid index, physical position (mm), baseline T1 and
    readout misclassification probabilities."""

    id: int
    grid_pos: tuple[int, int]
    xy: tuple[float, float]
    t1_baseline: float = DEFAULT_T1
    eps_read0_given1: float = DEFAULT_EPS_READ0_GIVEN1
    eps_read1_given0: float = DEFAULT_EPS_READ1_GIVEN0

    def __post_init__(self):
        if self.t1_baseline <= 0:
            raise InvalidParameterError(f"qubit {self.id}: t1_baseline must be positive")
        if not 0 <= self.eps_read0_given1 < 0.5:
            raise InvalidParameterError(f"qubit {self.id}: eps_read0_given1 must be in [0, 0.5)")
        if not 0 <= self.eps_read1_given0 < 0.5:
            raise InvalidParameterError(f"qubit {self.id}: eps_read1_given0 must be in [0, 0.5)")


@dataclass(frozen=True)
class DeviceConfig:
    """Immutable snapshot of the simulated device."""

    qubits: tuple[QubitSpec, ...]
    chip_extent: tuple[float, float] = DEFAULT_CHIP_EXTENT
    qubit_pitch: float = DEFAULT_QUBIT_PITCH
    omega_q: float = DEFAULT_OMEGA_Q

    def __post_init__(self):
        object.__setattr__(self, "qubits", tuple(self.qubits))
        if len(self.qubits) < 1:
            raise InvalidParameterError("device needs at least one qubit")
        ids = [q.id for q in self.qubits]
        if len(set(ids)) != len(ids):
            raise InvalidParameterError("qubit ids must be unique")
        if self.omega_q <= 0:
            raise InvalidParameterError("omega_q must be positive")
        w, h = self.chip_extent
        if w <= 0 or h <= 0:
            raise InvalidParameterError("chip extent must be positive")
        for q in self.qubits:
            x, y = q.xy
            if not (0 <= x <= w and 0 <= y <= h):
                raise InvalidParameterError(f"qubit {q.id} at {q.xy} lies outside the chip")

    @property
    def n_qubits(self) -> int:
        return len(self.qubits)


def default_device(
    t1: float = DEFAULT_T1,
    eps_read0_given1: float = DEFAULT_EPS_READ0_GIVEN1,
    eps_read1_given0: float = DEFAULT_EPS_READ1_GIVEN0,
) -> DeviceConfig:
    """26-qubit patch: a 6x5 grid with the corners dropped, 1 mm pitch,
    centered on the default 10 mm x 10 mm chip."""
    skip = {(0, 0), (0, 4), (5, 0), (5, 4)}
    qubits = []
    qid = 0
    for row in range(6):
        for col in range(5):
            if (row, col) in skip:
                continue
            qubits.append(
                QubitSpec(
                    id=qid,
                    grid_pos=(row, col),
                    xy=(3.0 + col * DEFAULT_QUBIT_PITCH, 2.5 + row * DEFAULT_QUBIT_PITCH),
                    t1_baseline=t1,
                    eps_read0_given1=eps_read0_given1,
                    eps_read1_given0=eps_read1_given0,
                )
            )
            qid += 1
    return DeviceConfig(qubits=tuple(qubits))


def decay_error_probability(t1: float, t_sampling: float, extra_window: float) -> float:
    """Probability that |1> decays during t_sampling + extra_window.

    Returns 1 - exp(-(t_sampling + extra_window) / t1).
    """
    if t1 <= 0:
        raise InvalidParameterError("t1 must be positive")
    if t_sampling < 0 or extra_window < 0:
        raise InvalidParameterError("sampling times must be nonnegative")
    return -math.expm1(-(t_sampling + extra_window) / t1)


def observed_error_probability(p_decay: float, qubit: QubitSpec, prep_state: PrepState) -> float:
    """Per-cycle error probability after folding in readout misclassification.

    For prep ONE an error is a measured |0>: either the state decayed and
    was read correctly, or it survived and was misread.  For prep ZERO
    only readout can flag an error; quasiparticles cannot excite the qubit.
    """
    if not 0 <= p_decay <= 1:
        raise InvalidParameterError("p_decay must be in [0, 1]")
    if prep_state is PrepState.ZERO:
        return qubit.eps_read1_given0
    return p_decay * (1 - qubit.eps_read1_given0) + (1 - p_decay) * qubit.eps_read0_given1
