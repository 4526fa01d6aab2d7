"""Physical constants, atomic species data, and thermal-ensemble quantities.

Unit conventions used throughout the package
--------------------------------------------
* All rates, Rabi frequencies, detunings, and linewidths are *ordinary*
  frequencies in Hz (no 2*pi).  Consistently with that choice the
  wavenumber of a field is stored as ``k = 1/lambda`` so that the Doppler
  shift ``k*v`` is again an ordinary frequency in Hz.
* Lengths are meters, temperatures Kelvin, number densities m^-3, dipole
  moments C*m.  Configuration files use laboratory-friendly units (MHz,
  nm, K, cm^-3, cm) and are converted on parse.
"""

from __future__ import annotations

import configparser
import math
from dataclasses import dataclass

from scipy import constants as _codata

from .errors import ConfigError

__all__ = [
    "PhysicalConstants",
    "CONSTANTS",
    "AtomSpecies",
    "EnsembleConfig",
    "rb87",
    "species_from_file",
    "most_probable_speed",
    "doppler_half_width",
]


@dataclass(frozen=True)
class PhysicalConstants:
    """Fixed CODATA constants (not configurable)."""

    boltzmann_k: float = _codata.k          # J/K
    hbar: float = _codata.hbar              # J*s
    epsilon0: float = _codata.epsilon_0     # F/m
    amu: float = _codata.atomic_mass        # kg


CONSTANTS = PhysicalConstants()


@dataclass(frozen=True)
class AtomSpecies:
    """Level-scheme data of one atomic species.

    The five-level scheme has two ground states |1>, |2>, two
    intermediate excited states |3>, |4> and one upper state |5>.  The
    probe and first coupling field share a wavelength (lambda_p =
    lambda_c1) and so do the assistant and second coupling field
    (lambda_a = lambda_c2) for the default rubidium configuration, but
    the four values are kept independent.
    """

    name: str
    mass: float                 # kg
    gamma_31: float             # Hz, decay |3> -> |1>
    gamma_32: float
    gamma_41: float
    gamma_42: float
    gamma_53: float
    gamma_54: float
    lambda_p: float             # m
    lambda_a: float
    lambda_c1: float
    lambda_c2: float
    dipole_13: float            # C*m, probe transition dipole moment

    def __post_init__(self):
        for field in ("gamma_31", "gamma_32", "gamma_41", "gamma_42",
                      "gamma_53", "gamma_54"):
            if getattr(self, field) < 0:
                raise ConfigError(f"decay rate {field} must be >= 0")
        for field in ("lambda_p", "lambda_a", "lambda_c1", "lambda_c2"):
            if getattr(self, field) <= 0:
                raise ConfigError(f"wavelength {field} must be > 0")
        if self.mass <= 0:
            raise ConfigError("mass must be > 0")

    # --- branching fractions and effective upper-state decay ------------
    @property
    def eta_53(self) -> float:
        """Population fraction parked in |3> per unit rho_55."""
        return self.gamma_53 / (self.gamma_31 + self.gamma_32)

    @property
    def eta_54(self) -> float:
        """Population fraction parked in |4> per unit rho_55."""
        return self.gamma_54 / (self.gamma_41 + self.gamma_42)

    @property
    def gamma_51(self) -> float:
        """Effective decay rate |5> -> |1> through the intermediate states."""
        return self.gamma_31 * self.eta_53 + self.gamma_41 * self.eta_54

    @property
    def gamma_52(self) -> float:
        """Effective decay rate |5> -> |2> through the intermediate states."""
        return self.gamma_32 * self.eta_53 + self.gamma_42 * self.eta_54

    @property
    def gamma_eff(self) -> float:
        """Effective upper-state decay rate (equals gamma_51 = gamma_52
        when the branching ratios coincide, as they do for the preset)."""
        return 0.5 * (self.gamma_51 + self.gamma_52)

    # --- wavenumbers (ordinary-frequency convention, k = 1/lambda) ------
    @property
    def k_p(self) -> float:
        return 1.0 / self.lambda_p

    @property
    def k_a(self) -> float:
        return 1.0 / self.lambda_a

    @property
    def k_c1(self) -> float:
        return 1.0 / self.lambda_c1

    @property
    def k_c2(self) -> float:
        return 1.0 / self.lambda_c2


def rb87() -> AtomSpecies:
    """Default species: the 87Rb five-level configuration.

    Decay rates 5.75 MHz for both intermediate states into both ground
    states, 0.19 MHz for the upper state into both intermediate states;
    795.0 nm probe/first-coupling and 728.7 nm assistant/second-coupling
    wavelengths; probe dipole moment 2.537e-29 C*m.
    """
    MHz = 1e6
    return AtomSpecies(
        name="Rb87",
        mass=86.909 * CONSTANTS.amu,
        gamma_31=5.75 * MHz,
        gamma_32=5.75 * MHz,
        gamma_41=5.75 * MHz,
        gamma_42=5.75 * MHz,
        gamma_53=0.19 * MHz,
        gamma_54=0.19 * MHz,
        lambda_p=795.0e-9,
        lambda_a=728.7e-9,
        lambda_c1=795.0e-9,
        lambda_c2=728.7e-9,
        dipole_13=2.537e-29,
    )


_SPECIES_FIELDS = {
    # key -> (attribute, multiplier applied to the parsed float)
    "mass_u": ("mass", CONSTANTS.amu),
    "gamma_31_mhz": ("gamma_31", 1e6),
    "gamma_32_mhz": ("gamma_32", 1e6),
    "gamma_41_mhz": ("gamma_41", 1e6),
    "gamma_42_mhz": ("gamma_42", 1e6),
    "gamma_53_mhz": ("gamma_53", 1e6),
    "gamma_54_mhz": ("gamma_54", 1e6),
    "lambda_p_nm": ("lambda_p", 1e-9),
    "lambda_a_nm": ("lambda_a", 1e-9),
    "lambda_c1_nm": ("lambda_c1", 1e-9),
    "lambda_c2_nm": ("lambda_c2", 1e-9),
    "dipole_13_cm": ("dipole_13", 1.0),
}


def species_from_file(path: str) -> AtomSpecies:
    """Load an :class:`AtomSpecies` from an INI file with a [species]
    section whose keys carry explicit unit suffixes (see
    ``_SPECIES_FIELDS``).  Missing keys fall back to the 87Rb preset.
    """
    parser = configparser.ConfigParser(inline_comment_prefixes=("#", ";"))
    read = parser.read(path)
    if not read:
        raise ConfigError(f"cannot read species file {path!r}")
    if not parser.has_section("species"):
        raise ConfigError(f"species file {path!r} lacks a [species] section")
    base = rb87()
    values = {f: getattr(base, f) for f in (
        "mass", "gamma_31", "gamma_32", "gamma_41", "gamma_42",
        "gamma_53", "gamma_54", "lambda_p", "lambda_a", "lambda_c1",
        "lambda_c2", "dipole_13")}
    name = parser.get("species", "name", fallback="custom")
    for key, raw in parser.items("species"):
        if key == "name":
            continue
        if key not in _SPECIES_FIELDS:
            raise ConfigError(f"unknown species key {key!r} (unit suffix required)")
        attr, scale = _SPECIES_FIELDS[key]
        try:
            values[attr] = float(raw) * scale
        except ValueError as exc:
            raise ConfigError(f"species key {key!r}: {exc}") from exc
    return AtomSpecies(name=name, **values)


@dataclass(frozen=True)
class EnsembleConfig:
    """Thermal-vapor cell parameters."""

    temperature: float      # K
    number_density: float   # m^-3
    length: float           # m

    def __post_init__(self):
        if self.temperature <= 0:
            raise ConfigError("temperature must be > 0")
        if self.number_density <= 0:
            raise ConfigError("number density must be > 0")
        if self.length <= 0:
            raise ConfigError("cell length must be > 0")


def most_probable_speed(species: AtomSpecies, temperature: float) -> float:
    """Most probable speed v_p = sqrt(2 k_B T / M) of the 1D Maxwell
    velocity distribution, in m/s."""
    if temperature <= 0:
        raise ConfigError("temperature must be > 0")
    return math.sqrt(2.0 * CONSTANTS.boltzmann_k * temperature / species.mass)


def doppler_half_width(wavelength: float, v_p: float) -> float:
    """Doppler half width sqrt(ln 2) * v_p / lambda in Hz (ordinary
    frequency).  ``wavelength`` may also be an effective two-photon
    wavelength 1/|1/lambda_1 - 1/lambda_2|."""
    if wavelength <= 0:
        raise ConfigError("wavelength must be > 0")
    return math.sqrt(math.log(2.0)) * v_p / wavelength
