"""Isolation figures of merit and the sweep/optimization engines.

Converts Maxwell-averaged upper-state populations into absorption
coefficients (Beer-Lambert), transmissivities, isolation ratio (IR) and
insertion loss (IL); extracts the bandwidth over which IR/IL criteria
hold; and searches operating points trading IR against IL.

IR is always computed in log space directly from the absorption
difference, IR = (alpha_bwd - alpha_fwd) * L * 10/ln10, because the
backward transmissivity underflows double precision (IR > 140 dB means
T_bwd < 1e-14 T_fwd) long before the physics stops being meaningful.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .atomdata import AtomSpecies, EnsembleConfig
from .doppler import BACKWARD, FORWARD, Geometry, QuadratureSpec, rho55_avg
from .errors import ConfigError, InfeasibleError, SingularityError
from .reduced import DriveConfig

__all__ = [
    "Spectrum",
    "BandwidthResult",
    "absorption",
    "transmissivity",
    "isolation_ratio",
    "insertion_loss",
    "ir_il_from_alpha",
    "evaluate_point",
    "compute_table",
    "compute_spectrum",
    "bandwidth",
    "tradeoff_search",
]

_DB = 10.0 / math.log(10.0)


def absorption(rho_55: float, omega_p: float, species: AtomSpecies,
               number_density: float) -> float:
    """Probe absorption coefficient (1/m) from the averaged population:

        alpha = N d13^2/(hbar eps0) * (pi Gamma / lambda_p) * rho55 / Omega_p^2

    with Gamma the effective upper-state decay of the reduced model.
    """
    if omega_p == 0.0:
        raise SingularityError("absorption requires a non-zero probe "
                               "Rabi frequency")
    from .atomdata import CONSTANTS
    return (number_density * species.dipole_13 ** 2
            / (CONSTANTS.hbar * CONSTANTS.epsilon0)
            * (math.pi * species.gamma_eff / species.lambda_p)
            * rho_55 / omega_p ** 2)


def transmissivity(alpha: float, length: float) -> float:
    """Beer-Lambert transmissivity exp(-alpha * L)."""
    if length <= 0:
        raise ConfigError("cell length must be > 0")
    return math.exp(-alpha * length)


def isolation_ratio(t_fwd: float, t_bwd: float) -> float:
    """IR = 10 log10(T+ / T-) in dB."""
    if t_fwd <= 0 or t_bwd <= 0:
        raise ConfigError("transmissivities must be positive")
    return 10.0 * math.log10(t_fwd / t_bwd)


def insertion_loss(t_fwd: float) -> float:
    """IL = -10 log10(T+) in dB."""
    if t_fwd <= 0:
        raise ConfigError("transmissivity must be positive")
    return -10.0 * math.log10(t_fwd)


def ir_il_from_alpha(alpha_fwd, alpha_bwd, length):
    """(IR, IL) in dB computed in log space from the absorption
    coefficients; immune to T- underflow."""
    ir = (np.asarray(alpha_bwd) - np.asarray(alpha_fwd)) * length * _DB
    il = np.asarray(alpha_fwd) * length * _DB
    return ir, il


def evaluate_point(drive: DriveConfig, species: AtomSpecies,
                   ens: EnsembleConfig, theta_deg: float,
                   quad: QuadratureSpec, regularize: bool = True):
    """(alpha_fwd, alpha_bwd) in 1/m for one parameter point."""
    rho_f = rho55_avg(Geometry(FORWARD, theta_deg), drive, species, ens,
                      quad, regularize)
    rho_b = rho55_avg(Geometry(BACKWARD, theta_deg), drive, species, ens,
                      quad, regularize)
    a_f = absorption(rho_f, drive.omega_p, species, ens.number_density)
    a_b = absorption(rho_b, drive.omega_p, species, ens.number_density)
    return a_f, a_b


@dataclass
class Spectrum:
    """Per-point records of a sweep, plus run metadata.

    ``sweep_values`` holds the swept variable (Hz for detunings and Rabi
    frequencies, degrees for theta, K for temperature); the absorption
    arrays are in 1/m.
    """

    sweep_name: str
    sweep_values: np.ndarray
    alpha_fwd: np.ndarray
    alpha_bwd: np.ndarray
    length: float
    metadata: dict = field(default_factory=dict)

    @property
    def t_fwd(self) -> np.ndarray:
        return np.exp(-self.alpha_fwd * self.length)

    @property
    def t_bwd(self) -> np.ndarray:
        return np.exp(-self.alpha_bwd * self.length)

    @property
    def ir_db(self) -> np.ndarray:
        return ir_il_from_alpha(self.alpha_fwd, self.alpha_bwd, self.length)[0]

    @property
    def il_db(self) -> np.ndarray:
        return ir_il_from_alpha(self.alpha_fwd, self.alpha_bwd, self.length)[1]


def compute_table(values, configure, species: AtomSpecies,
                  quad: QuadratureSpec, threads: int = 1,
                  regularize: bool = True):
    """Evaluate the pipeline over ``values`` and return (alpha_fwd,
    alpha_bwd) arrays.

    ``configure(x)`` must return ``(drive, ens, theta_deg)`` for one
    value of the swept variable.  Points are independent; they are
    mapped over a thread pool and reassembled in index order, so the
    result is identical for any thread count.
    """
    values = np.asarray(values, dtype=float)

    def one(x):
        drive, ens, theta = configure(float(x))
        return evaluate_point(drive, species, ens, theta, quad, regularize)

    if threads <= 1:
        pairs = [one(x) for x in values]
    else:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            pairs = list(pool.map(one, values))
    alpha_f = np.array([p[0] for p in pairs])
    alpha_b = np.array([p[1] for p in pairs])
    return alpha_f, alpha_b


def compute_spectrum(sweep_name, values, configure, species, ens_length,
                     quad, threads=1, regularize=True, metadata=None) -> Spectrum:
    """Run :func:`compute_table` and wrap the result as a Spectrum."""
    values = np.asarray(values, dtype=float)
    if values.size == 0:
        raise ConfigError("sweep range is empty")
    if values.size > 1 and not np.all(np.diff(values) > 0):
        raise ConfigError("sweep values must be strictly increasing")
    alpha_f, alpha_b = compute_table(values, configure, species, quad,
                                     threads, regularize)
    return Spectrum(sweep_name, values, alpha_f, alpha_b, ens_length,
                    metadata or {})


@dataclass
class BandwidthResult:
    """Contiguous sweep intervals satisfying IR > ir_min and IL < il_max."""

    intervals: list        # [(lo, hi), ...] in the sweep variable's unit
    total_width: float
    ir_min: float
    il_max: float


def bandwidth(spectrum: Spectrum, ir_min: float = 20.0,
              il_max: float = 1.0) -> BandwidthResult:
    """Extract the qualifying intervals with linear-interpolated edges.

    The joint criterion margin m = min(IR - ir_min, il_max - IL) is
    positive exactly where both criteria hold; edges are placed at the
    linear zero crossings of m between adjacent samples.
    """
    x = spectrum.sweep_values
    if x.size == 0:
        raise ConfigError("empty spectrum")
    margin = np.minimum(spectrum.ir_db - ir_min, il_max - spectrum.il_db)

    intervals = []
    start = None
    if margin[0] > 0:
        start = x[0]
    for i in range(len(x) - 1):
        m0, m1 = margin[i], margin[i + 1]
        if m0 <= 0 < m1:
            start = x[i] + (x[i + 1] - x[i]) * (0.0 - m0) / (m1 - m0)
        elif m0 > 0 >= m1:
            end = x[i] + (x[i + 1] - x[i]) * (0.0 - m0) / (m1 - m0)
            intervals.append((float(start), float(end)))
            start = None
    if start is not None:
        intervals.append((float(start), float(x[-1])))

    total = sum(hi - lo for lo, hi in intervals)
    return BandwidthResult(intervals, float(total), ir_min, il_max)


_GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0


def _golden_max(fun, lo, hi, abs_tol):
    """Golden-section maximization of a unimodal-ish scalar function."""
    c = hi - _GOLDEN * (hi - lo)
    d = lo + _GOLDEN * (hi - lo)
    fc, fd = fun(c), fun(d)
    while (hi - lo) > abs_tol:
        if fc >= fd:
            hi, d, fd = d, c, fc
            c = hi - _GOLDEN * (hi - lo)
            fc = fun(c)
        else:
            lo, c, fc = c, d, fd
            d = lo + _GOLDEN * (hi - lo)
            fd = fun(d)
    xm = 0.5 * (lo + hi)
    return xm, fun(xm)


def tradeoff_search(bounds: dict, configure, species: AtomSpecies,
                    quad: QuadratureSpec, il_max: float = 1.0,
                    coarse: int = 9, threads: int = 1,
                    resolution: float = 1e-3,
                    regularize: bool = True) -> dict:
    """Maximize IR subject to IL <= il_max over a box of parameters.

    ``bounds`` maps parameter names to (lo, hi); ``configure(params)``
    maps a dict of parameter values to ``(drive, ens, theta_deg)``.
    Strategy: full coarse grid scan, then cyclic per-coordinate
    golden-section refinement of a penalized objective until every
    coordinate step is below ``resolution`` times its range.  Entirely
    deterministic (no randomness, fixed evaluation order).
    """
    if not bounds:
        raise ConfigError("optimization bounds must be non-empty")
    if il_max <= 0:
        raise ConfigError("il_max must be > 0")
    names = sorted(bounds)
    for name in names:
        lo, hi = bounds[name]
        if not lo <= hi:
            raise ConfigError(f"bound for {name!r} is reversed")

    cache: dict[tuple, tuple] = {}

    def measure(params: dict):
        key = tuple(params[n] for n in names)
        if key not in cache:
            drive, ens, theta = configure(params)
            a_f, a_b = evaluate_point(drive, species, ens, theta, quad,
                                      regularize)
            ir, il = ir_il_from_alpha(a_f, a_b, ens.length)
            cache[key] = (float(ir), float(il))
        return cache[key]

    # Objective: IR, with a steep penalty beyond the IL budget so the
    # refinement is pulled back into (or toward) the feasible region.
    def score(params: dict) -> float:
        ir, il = measure(params)
        return ir - 1e4 * max(0.0, il - il_max)

    axes = [np.linspace(bounds[n][0], bounds[n][1], coarse) for n in names]
    grids = np.meshgrid(*axes, indexing="ij")
    coords = np.stack([g.ravel() for g in grids], axis=1)

    best = None
    for row in coords:
        params = dict(zip(names, (float(v) for v in row)))
        s = score(params)
        if best is None or s > best[0]:
            best = (s, params)
    point = dict(best[1])

    # Cyclic golden-section refinement, one coordinate at a time.
    for _ in range(12):
        moved = 0.0
        for name in names:
            lo, hi = bounds[name]
            if hi == lo:
                continue
            width = (hi - lo) / max(coarse - 1, 1)
            a = max(lo, point[name] - width)
            b = min(hi, point[name] + width)

            def along(x, _name=name):
                trial = dict(point)
                trial[_name] = float(x)
                return score(trial)

            xm, sm = _golden_max(along, a, b, resolution * (hi - lo))
            if sm > score(point):
                moved = max(moved, abs(xm - point[name]) / (hi - lo))
                point[name] = float(xm)
        if moved < resolution:
            break

    ir, il = measure(point)
    if il > il_max:
        # Nothing feasible anywhere in the box: report the gentlest point.
        best_il_key = min(cache, key=lambda k: cache[k][1])
        best_il = dict(zip(names, best_il_key))
        best_il.update(ir_db=cache[best_il_key][0], il_db=cache[best_il_key][1])
        if cache[best_il_key][1] > il_max:
            raise InfeasibleError(
                f"no point satisfies IL <= {il_max} dB", best_point=best_il)
        # Feasible points exist but refinement drifted; fall back to the
        # best feasible cached point.
        feasible = [(v[0], k) for k, v in cache.items() if v[1] <= il_max]
        feasible.sort(key=lambda t: (-t[0], t[1]))
        point = dict(zip(names, feasible[0][1]))
        ir, il = measure(point)

    result = dict(point)
    result.update(ir_db=ir, il_db=il, evaluations=len(cache))
    return result
