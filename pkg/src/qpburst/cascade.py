"""Closed-form energy-cascade calculator for impact events.

Covers the chain from energetic phonons in the substrate down to
quasiparticles in the superconducting films: anharmonic phonon
downconversion, pair breaking, hotspot quasiparticle densities,
recombination, and the quasiparticle limit on qubit energy relaxation.

Unit conventions: energies in eV, times in seconds, lengths in meters
unless a parameter says otherwise (Cooper-pair densities are per um^3,
which keeps the numbers near unity).  hbar is fixed in eV*s so preset
values reproduce published figures bit-for-bit.
"""

import math
from dataclasses import dataclass, replace

from .errors import BelowGapError, InvalidParameterError

HBAR_EVS = 6.582e-16  # eV*s

# Phonon lifetime in indium right at its pair-breaking threshold (2*Delta_In).
# The bulk characteristic lifetime in the indium preset applies at higher
# energies; absorption-length estimates near the gap should use this value.
INDIUM_TAU0PH_NEAR_GAP = 170e-12  # s


@dataclass(frozen=True)
class MaterialParams:
    """Superconductor constants for cascade calculations.

    gap_delta: superconducting gap Delta in eV.
    n_cp: Cooper-pair density in um^-3.
    tau0_ph: characteristic phonon lifetime in s.
    tau0_qp: characteristic quasiparticle time in s.
    sound_speed: phonon speed in m/s.
    thickness: film thickness in m (bump height for indium).
    """

    gap_delta: float
    n_cp: float
    tau0_ph: float
    tau0_qp: float
    sound_speed: float
    thickness: float

    def __post_init__(self):
        for name in ("gap_delta", "n_cp", "tau0_ph", "tau0_qp", "sound_speed", "thickness"):
            if getattr(self, name) <= 0:
                raise InvalidParameterError(f"MaterialParams.{name} must be positive")


@dataclass(frozen=True)
class SubstrateParams:
    """Insulating-substrate constants: Debye energy (eV), anharmonicity,
    electron-hole pair creation energy (eV), and the fraction of deposited
    energy that ends up in the superconducting hotspot."""

    debye_energy: float
    anharmonicity_g: float
    pair_creation_energy: float
    phonon_fraction: float

    def __post_init__(self):
        if self.debye_energy <= 0:
            raise InvalidParameterError("debye_energy must be positive")
        if not 0 < self.anharmonicity_g < 1:
            raise InvalidParameterError("anharmonicity_g must be in (0, 1)")
        if self.pair_creation_energy <= 0:
            raise InvalidParameterError("pair_creation_energy must be positive")
        if not 0 <= self.phonon_fraction <= 1:
            raise InvalidParameterError("phonon_fraction must be in [0, 1]")


def aluminum() -> MaterialParams:
    """100 nm aluminum film (ground plane / qubit layer)."""
    return MaterialParams(
        gap_delta=1.8e-4,
        n_cp=4e6,
        tau0_ph=0.24e-9,
        tau0_qp=440e-9,
        sound_speed=6400.0,
        thickness=100e-9,
    )


def indium() -> MaterialParams:
    """Indium bump-bond material; thickness is the 5 um bump height."""
    return MaterialParams(
        gap_delta=5.2e-4,
        n_cp=13e6,
        tau0_ph=0.799e-9,
        tau0_qp=0.799e-9,
        sound_speed=1200.0,
        thickness=5e-6,
    )


def indium_near_gap() -> MaterialParams:
    """Indium with the near-gap phonon lifetime, for absorption lengths
    at phonon energies just above 2*Delta_In."""
    return replace(indium(), tau0_ph=INDIUM_TAU0PH_NEAR_GAP)


def silicon() -> SubstrateParams:
    """Silicon substrate defaults."""
    return SubstrateParams(
        debye_energy=0.056,
        anharmonicity_g=0.01,
        pair_creation_energy=3.75,
        phonon_fraction=0.8,
    )


MATERIAL_PRESETS = {"al": aluminum, "aluminum": aluminum, "in": indium, "indium": indium}


def phonon_downconversion_rate(e_ph: float, substrate: SubstrateParams) -> float:
    """Anharmonic phonon decay rate g*(E/hbar)*(E/E_Debye)^4, in 1/s."""
    if e_ph <= 0:
        raise InvalidParameterError("phonon energy must be positive")
    return substrate.anharmonicity_g * (e_ph / HBAR_EVS) * (e_ph / substrate.debye_energy) ** 4


def pair_breaking_time(e_ph: float, m: MaterialParams) -> float:
    """Mean time for a phonon of energy e_ph to break a Cooper pair.

    Piecewise join of the near-threshold constant tau0_ph and the
    high-energy form pi*tau0_ph*Delta/E; the min of the two reproduces
    the published aluminum values at 5 meV, 1 meV and 2*Delta.
    Raises BelowGapError for e_ph < 2*Delta.
    """
    if e_ph < 2 * m.gap_delta:
        raise BelowGapError(
            f"phonon energy {e_ph:.3g} eV is below 2*Delta = {2 * m.gap_delta:.3g} eV"
        )
    return min(m.tau0_ph, math.pi * m.tau0_ph * m.gap_delta / e_ph)


def phonon_absorption_length(e_ph: float, m: MaterialParams) -> float:
    """Pair-breaking absorption length c * tau_b, in meters."""
    return m.sound_speed * pair_breaking_time(e_ph, m)


def hotspot_qp_density(e_hotspot: float, area: float, m: MaterialParams) -> float:
    """Normalized quasiparticle density x_qp = E / (A * d * Delta * n_cp).

    e_hotspot in eV, area in m^2; the film thickness comes from m.
    """
    if e_hotspot < 0:
        raise InvalidParameterError("hotspot energy must be nonnegative")
    if area <= 0:
        raise InvalidParameterError("area must be positive")
    volume_um3 = area * m.thickness * 1e18  # m^3 -> um^3
    return e_hotspot / (volume_um3 * m.gap_delta * m.n_cp)


def recombination_time(x_qp: float, m: MaterialParams) -> float:
    """Quasiparticle recombination time tau0_qp / (21.8 * x_qp), in s."""
    if x_qp <= 0:
        raise InvalidParameterError("x_qp must be positive")
    return m.tau0_qp / (21.8 * x_qp)


def effective_indium_recombination(tau_r: float, bump_height: float, absorption_length: float) -> float:
    """Effective bump relaxation time tau_r * z / l.

    Only recombination phonons generated within one absorption length of
    the surface escape, so the bulk time is stretched by z/l.
    """
    if tau_r <= 0 or bump_height <= 0:
        raise InvalidParameterError("tau_r and bump_height must be positive")
    if absorption_length <= 0:
        raise InvalidParameterError("absorption_length must be positive")
    return tau_r * bump_height / absorption_length


def qubit_relaxation_rate(x_qp: float, omega_q: float, m: MaterialParams) -> float:
    """Quasiparticle-induced qubit decay rate, in 1/s.

    Gamma_1 = omega_q * sqrt(2*Delta / (pi^2 * hbar * omega_q)) * x_qp.
    """
    if x_qp < 0:
        raise InvalidParameterError("x_qp must be nonnegative")
    if omega_q <= 0:
        raise InvalidParameterError("omega_q must be positive")
    return omega_q * math.sqrt(2 * m.gap_delta / (math.pi**2 * HBAR_EVS * omega_q)) * x_qp


def x_qp_from_t1(t1: float, omega_q: float, m: MaterialParams) -> float:
    """Quasiparticle density that limits the qubit to the given T1.

    Exact algebraic inverse of qubit_relaxation_rate.
    """
    if t1 <= 0:
        raise InvalidParameterError("t1 must be positive")
    if omega_q <= 0:
        raise InvalidParameterError("omega_q must be positive")
    return 1.0 / (t1 * omega_q * math.sqrt(2 * m.gap_delta / (math.pi**2 * HBAR_EVS * omega_q)))


def energy_for_uniform_density(n_qp: float, volume: float, m: MaterialParams) -> float:
    """Energy in eV needed to sustain n_qp (um^-3) over volume (um^3)."""
    if n_qp < 0 or volume < 0:
        raise InvalidParameterError("n_qp and volume must be nonnegative")
    return n_qp * volume * m.gap_delta


def event_rates_for_area(
    area: float, reference_area: float, ref_gamma_rate: float, ref_muon_rate: float
) -> tuple[float, float]:
    """Scale reference gamma/muon impact rates linearly to a new chip area."""
    if area <= 0 or reference_area <= 0:
        raise InvalidParameterError("areas must be positive")
    if ref_gamma_rate <= 0 or ref_muon_rate <= 0:
        raise InvalidParameterError("reference rates must be positive")
    factor = area / reference_area
    return ref_gamma_rate * factor, ref_muon_rate * factor
