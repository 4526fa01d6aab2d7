"""Run configuration: INI parsing with explicit units, sweeps, presets.

Configuration files are INI-style with one section per concern:

    [species]    optional; keys as in atomdata.species_from_file
    [drive]      omega_* / delta_* / gamma_laser / gamma_21
    [ensemble]   temperature, density, length
    [geometry]   theta
    [quadrature] scheme, nodes, span, tol
    [sweep]      variable, start, stop, points
    [validate]   window, points        (full-model comparison runs)
    [optimize]   vary, *_min, *_max, il_max, coarse, resolution

Every physical quantity must carry a unit suffix (``omega_a = 50 MHz``);
bare numbers are rejected for physical keys.  Detunings in [drive] may
instead be an affine expression in another variable, e.g.
``delta_a = -delta_p`` or ``delta_c2 = -delta_c1 - 2.5 MHz``; when the
referenced variable is the sweep variable the link is re-evaluated at
every sweep point.
"""

from __future__ import annotations

import configparser
import hashlib
import re
from dataclasses import dataclass, field
from importlib import resources

from .atomdata import AtomSpecies, EnsembleConfig, rb87, species_from_file
from .doppler import QuadratureSpec
from .errors import ConfigError
from .reduced import DriveConfig

__all__ = ["RunConfig", "SweepSpec", "Link", "parse_quantity",
           "load_config", "load_preset", "preset_path", "available_presets"]

_UNIT_SCALES = {
    "frequency": {"Hz": 1.0, "kHz": 1e3, "MHz": 1e6, "GHz": 1e9},
    "temperature": {"K": 1.0, "mK": 1e-3, "uK": 1e-6},
    "length": {"m": 1.0, "cm": 1e-2, "mm": 1e-3},
    "density": {"m^-3": 1.0, "cm^-3": 1e6},
    "angle": {"deg": 1.0},
}

_QUANTITY_RE = re.compile(r"^\s*([+-]?[0-9][0-9.eE+-]*)\s+(\S+)\s*$")

_DRIVE_KEYS = ("omega_p", "omega_a", "omega_c1", "omega_c2",
               "delta_p", "delta_a", "delta_c1", "delta_c2",
               "gamma_laser", "gamma_21")

_SWEEP_KINDS = {"delta_p": "frequency", "omega_a": "frequency",
                "theta": "angle", "temperature": "temperature"}


def parse_quantity(raw: str, kind: str, key: str = "") -> float:
    """Parse '50 MHz' style values into SI; unit suffix is mandatory."""
    match = _QUANTITY_RE.match(raw)
    scales = _UNIT_SCALES[kind]
    where = f" for {key!r}" if key else ""
    if not match:
        raise ConfigError(
            f"value {raw!r}{where} must be '<number> <unit>' with unit in "
            f"{sorted(scales)}")
    number, unit = match.groups()
    if unit not in scales:
        raise ConfigError(
            f"unit {unit!r}{where} not accepted; expected one of "
            f"{sorted(scales)}")
    try:
        return float(number) * scales[unit]
    except ValueError as exc:
        raise ConfigError(f"bad number in {raw!r}{where}: {exc}") from exc


@dataclass(frozen=True)
class Link:
    """Affine relation target = sign * source + offset (SI units)."""

    source: str
    sign: float
    offset: float

    def evaluate(self, source_value: float) -> float:
        return self.sign * source_value + self.offset


_LINK_RE = re.compile(
    r"^\s*([+-]?)\s*(delta_p|delta_a|delta_c1|delta_c2)\s*"
    r"(?:([+-])\s*(.+?))?\s*$")


def _parse_drive_value(key: str, raw: str):
    """A drive entry is either a quantity or an affine link."""
    match = _LINK_RE.match(raw)
    if match and match.group(2) != key:
        sign = -1.0 if match.group(1) == "-" else 1.0
        offset = 0.0
        if match.group(3):
            offset = parse_quantity(match.group(4), "frequency", key)
            if match.group(3) == "-":
                offset = -offset
        return Link(match.group(2), sign, offset)
    return parse_quantity(raw, "frequency", key)


@dataclass(frozen=True)
class SweepSpec:
    variable: str
    start: float
    stop: float
    points: int

    def values(self):
        import numpy as np
        if self.points < 1:
            raise ConfigError("sweep needs at least one point")
        if self.points > 1 and self.stop <= self.start:
            raise ConfigError("sweep range is empty (stop <= start)")
        return np.linspace(self.start, self.stop, self.points)


@dataclass
class RunConfig:
    species: AtomSpecies
    drive_values: dict
    drive_links: dict
    ensemble: EnsembleConfig
    theta_deg: float
    quad: QuadratureSpec
    sweep: SweepSpec | None
    validate_window: float = 200e6      # Hz, half-width around -delta_a
    validate_points: int = 801
    optimize: dict = field(default_factory=dict)
    config_hash: str = ""
    name: str = ""

    # ------------------------------------------------------------------
    def resolved_drive(self, sweep_value: float | None = None) -> DriveConfig:
        """DriveConfig at one sweep point: apply the sweep variable, then
        the affine links."""
        values = dict(self.drive_values)
        if (self.sweep is not None and sweep_value is not None
                and self.sweep.variable in ("delta_p", "omega_a")):
            values[self.sweep.variable] = sweep_value
        for key, link in self.drive_links.items():
            if link.source not in values:
                raise ConfigError(f"link for {key!r} references unknown "
                                  f"variable {link.source!r}")
            values[key] = link.evaluate(values[link.source])
        return DriveConfig(**values)

    def configure(self, sweep_value: float):
        """(drive, ensemble, theta) for one sweep point; used by the
        sweep engine."""
        var = self.sweep.variable if self.sweep else None
        ens = self.ensemble
        theta = self.theta_deg
        if var == "temperature":
            ens = EnsembleConfig(sweep_value, ens.number_density, ens.length)
            drive = self.resolved_drive()
        elif var == "theta":
            theta = sweep_value
            drive = self.resolved_drive()
        else:
            drive = self.resolved_drive(sweep_value)
        return drive, ens, theta


def _hash_parser(parser: configparser.ConfigParser) -> str:
    lines = []
    for section in sorted(parser.sections()):
        for key, value in sorted(parser.items(section)):
            lines.append(f"{section}.{key}={value.strip()}")
    digest = hashlib.sha256("\n".join(lines).encode()).hexdigest()
    return digest[:16]


def load_config(path: str, name: str = "") -> RunConfig:
    parser = configparser.ConfigParser(inline_comment_prefixes=("#", ";"))
    read = parser.read(path)
    if not read:
        raise ConfigError(f"cannot read config file {path!r}")

    species = (species_from_file(path) if parser.has_section("species")
               else rb87())

    if not parser.has_section("drive"):
        raise ConfigError("config needs a [drive] section")
    drive_values, drive_links = {}, {}
    for key, raw in parser.items("drive"):
        if key not in _DRIVE_KEYS:
            raise ConfigError(f"unknown [drive] key {key!r}")
        parsed = _parse_drive_value(key, raw)
        if isinstance(parsed, Link):
            drive_links[key] = parsed
        else:
            drive_values[key] = parsed
    missing = [k for k in _DRIVE_KEYS[:8]
               if k not in drive_values and k not in drive_links]
    if missing:
        raise ConfigError(f"[drive] is missing keys: {missing}")
    drive_values.setdefault("gamma_laser", 0.0)
    drive_values.setdefault("gamma_21", 0.0)
    for key in drive_links:
        # Linked values need a numeric placeholder for non-sweep resolution.
        drive_values.setdefault(key, 0.0)

    if not parser.has_section("ensemble"):
        raise ConfigError("config needs an [ensemble] section")
    ens = EnsembleConfig(
        temperature=parse_quantity(parser.get("ensemble", "temperature"),
                                   "temperature", "temperature"),
        number_density=parse_quantity(parser.get("ensemble", "density"),
                                      "density", "density"),
        length=parse_quantity(parser.get("ensemble", "length"),
                              "length", "length"),
    )

    theta = 180.0
    if parser.has_section("geometry"):
        theta = parse_quantity(parser.get("geometry", "theta", fallback="180 deg"),
                               "angle", "theta")

    quad_kwargs = {}
    if parser.has_section("quadrature"):
        section = parser["quadrature"]
        if "scheme" in section:
            quad_kwargs["scheme"] = section["scheme"].strip()
        if "nodes" in section:
            quad_kwargs["nodes"] = _parse_int(section["nodes"], "nodes")
        if "span" in section:
            quad_kwargs["span"] = _parse_float(section["span"], "span")
        if "tol" in section:
            quad_kwargs["rel_tol"] = _parse_float(section["tol"], "tol")
    quad = QuadratureSpec(**quad_kwargs)

    sweep = None
    if parser.has_section("sweep"):
        section = parser["sweep"]
        variable = section.get("variable", "").strip()
        if variable not in _SWEEP_KINDS:
            raise ConfigError(f"sweep variable must be one of "
                              f"{sorted(_SWEEP_KINDS)}, got {variable!r}")
        kind = _SWEEP_KINDS[variable]
        sweep = SweepSpec(
            variable=variable,
            start=parse_quantity(section.get("start", ""), kind, "start"),
            stop=parse_quantity(section.get("stop", ""), kind, "stop"),
            points=_parse_int(section.get("points", "2001"), "points"),
        )
        if variable == "delta_p":
            drive_values.setdefault("delta_p", sweep.start)

    validate_window, validate_points = 200e6, 801
    if parser.has_section("validate"):
        section = parser["validate"]
        if "window" in section:
            validate_window = parse_quantity(section["window"], "frequency",
                                             "window")
        if "points" in section:
            validate_points = _parse_int(section["points"], "points")

    optimize = {}
    if parser.has_section("optimize"):
        section = parser["optimize"]
        vary = [v.strip() for v in section.get("vary", "").split(",") if v.strip()]
        bounds = {}
        for var in vary:
            if var not in _SWEEP_KINDS:
                raise ConfigError(f"optimize variable {var!r} not supported")
            kind = _SWEEP_KINDS[var]
            try:
                lo = parse_quantity(section[f"{var}_min"], kind, f"{var}_min")
                hi = parse_quantity(section[f"{var}_max"], kind, f"{var}_max")
            except KeyError as exc:
                raise ConfigError(f"optimize bounds missing for {var!r}") from exc
            bounds[var] = (lo, hi)
        optimize = {
            "bounds": bounds,
            "il_max": _parse_float(section.get("il_max", "1.0"), "il_max"),
            "coarse": _parse_int(section.get("coarse", "9"), "coarse"),
            "resolution": _parse_float(section.get("resolution", "1e-3"),
                                       "resolution"),
        }

    return RunConfig(
        species=species,
        drive_values=drive_values,
        drive_links=drive_links,
        ensemble=ens,
        theta_deg=theta,
        quad=quad,
        sweep=sweep,
        validate_window=validate_window,
        validate_points=validate_points,
        optimize=optimize,
        config_hash=_hash_parser(parser),
        name=name or str(path),
    )


def _parse_int(raw: str, key: str) -> int:
    try:
        return int(raw.strip())
    except ValueError as exc:
        raise ConfigError(f"{key!r} must be an integer: {exc}") from exc


def _parse_float(raw: str, key: str) -> float:
    try:
        return float(raw.strip())
    except ValueError as exc:
        raise ConfigError(f"{key!r} must be a number: {exc}") from exc


def preset_path(name: str):
    """Filesystem path of a shipped preset configuration."""
    base = resources.files("thermiso") / "presets" / f"{name}.ini"
    if not base.is_file():
        raise ConfigError(
            f"unknown preset {name!r}; available: {available_presets()}")
    return base


def available_presets() -> list[str]:
    folder = resources.files("thermiso") / "presets"
    return sorted(p.name[:-4] for p in folder.iterdir()
                  if p.name.endswith(".ini"))


def load_preset(name: str) -> RunConfig:
    return load_config(str(preset_path(name)), name=name)
