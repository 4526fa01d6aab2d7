"""Velocity shifts and Maxwell averaging of the upper-state population.

Geometry: the probe and assistant fields counter-propagate, and so do
the two coupling fields; the two counter-propagating pairs share one
misalignment angle 180 - theta.  The longitudinal Doppler shift of the
assistant and second-coupling fields is therefore scaled by
cos(180 deg - theta) (effective wavevector), while the probe and first
coupling field always run along the cell axis.

Sign pattern of the additive detuning shifts for an atom with velocity v
(k_i = 1/lambda_i, ordinary-frequency convention):

    forward  probe:  (+k_p v, -k_a^eff v, +k_c1 v, -k_c2^eff v)
    backward probe:  (-k_p v, +k_a^eff v, +k_c1 v, -k_c2^eff v)

For the forward probe the four-photon detuning is Doppler-free for
matched wavelengths (lambda_p = lambda_c1, lambda_a = lambda_c2); for
the backward probe it retains a residual 2(k_a - k_p)v that destroys the
two-photon transparency window in a hot vapor.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .atomdata import AtomSpecies, EnsembleConfig, most_probable_speed
from .errors import ConfigError, QuadratureError, SingularityError
from .reduced import DriveConfig, reduce, rho55_closed_form

__all__ = [
    "Geometry",
    "VelocityShifts",
    "QuadratureSpec",
    "effective_wavevector",
    "shifts_for",
    "rho55_avg",
]

FORWARD = "forward"
BACKWARD = "backward"

#: Hard cap on adaptive bisection depth (interval length shrinks by 2^-depth).
_MAX_DEPTH = 48


@dataclass(frozen=True)
class Geometry:
    """Probe direction and pair-misalignment angle."""

    probe_direction: str
    theta_deg: float = 180.0

    def __post_init__(self):
        if self.probe_direction not in (FORWARD, BACKWARD):
            raise ConfigError(
                f"probe_direction must be {FORWARD!r} or {BACKWARD!r}, "
                f"got {self.probe_direction!r}")
        if not 90.0 < self.theta_deg <= 180.0:
            raise ConfigError("theta must lie in (90, 180] degrees")


@dataclass(frozen=True)
class VelocityShifts:
    """Additive shifts of the four single-photon detunings (Hz)."""

    shift_p: float
    shift_a: float
    shift_c1: float
    shift_c2: float


@dataclass(frozen=True)
class QuadratureSpec:
    """How to integrate over the Maxwell velocity distribution.

    ``dense-trapezoid`` evaluates the integrand on a fixed odd uniform
    grid.  ``adaptive`` starts from the same grid and bisects intervals
    until each one's local Richardson error estimate drops below its
    share of ``rel_tol`` times the integral; use this when results must
    be converged beyond the base resolution (the backward integrand has
    resonances only ~1 m/s wide).
    """

    scheme: str = "dense-trapezoid"
    span: float = 5.0       # integration half-width in units of v_p
    nodes: int = 20001      # base grid size (odd so v = 0 is a node)
    rel_tol: float = 1e-6   # adaptive scheme target, relative to the integral

    def __post_init__(self):
        if self.scheme not in ("dense-trapezoid", "adaptive"):
            raise ConfigError(f"unknown quadrature scheme {self.scheme!r}")
        if self.span < 4.0:
            raise ConfigError("quadrature span must be >= 4 v_p")
        if self.nodes < 3 or self.nodes % 2 == 0:
            raise ConfigError("quadrature node count must be odd and >= 3")
        if self.rel_tol <= 0:
            raise ConfigError("quadrature tolerance must be > 0")


def effective_wavevector(k: float, theta_deg: float) -> float:
    """Projection k * cos(180 deg - theta) of a misaligned wavevector
    onto the cell axis."""
    if not 90.0 < theta_deg <= 180.0:
        raise ConfigError("theta must lie in (90, 180] degrees")
    return k * math.cos(math.radians(180.0 - theta_deg))


def _shift_arrays(geom: Geometry, species: AtomSpecies, v):
    """Velocity shift arrays (or scalars) for the four fields."""
    k_a_eff = effective_wavevector(species.k_a, geom.theta_deg)
    k_c2_eff = effective_wavevector(species.k_c2, geom.theta_deg)
    sign_p = 1.0 if geom.probe_direction == FORWARD else -1.0
    return (sign_p * species.k_p * v,
            -sign_p * k_a_eff * v,
            species.k_c1 * v,
            -k_c2_eff * v)


def shifts_for(geom: Geometry, species: AtomSpecies, v: float) -> VelocityShifts:
    """Detuning shifts seen by one velocity class."""
    sp, sa, sc1, sc2 = _shift_arrays(geom, species, v)
    return VelocityShifts(sp, sa, sc1, sc2)


def _integrand_factory(geom, drive, species, v_p, regularize):
    """Return g(v) = f(v) * rho55(v) with f the normalized 1D Maxwell
    velocity distribution.  Vectorized over v."""
    norm = 1.0 / (v_p * math.sqrt(math.pi))

    def g(v):
        shifts = VelocityShifts(*_shift_arrays(geom, species, v))
        if not regularize:
            for name in ("shift_p", "shift_a", "shift_c1", "shift_c2"):
                delta0 = getattr(drive, "delta" + name[5:])
                total = delta0 + getattr(shifts, name)
                if np.any(total == 0.0):
                    idx = np.argmin(np.abs(np.asarray(total)))
                    vbad = np.asarray(v).ravel()[idx] if np.ndim(v) else v
                    raise SingularityError(
                        f"velocity class v = {vbad:.6g} m/s is resonant "
                        f"with the single-photon transition of field "
                        f"{name[6:]!r}")
        pt = reduce(drive, species, shifts, regularize=regularize)
        weight = norm * np.exp(-(v / v_p) ** 2)
        return weight * rho55_closed_form(pt)

    return g


def _dense_trapezoid(g, lo, hi, nodes):
    v = np.linspace(lo, hi, nodes)
    return float(np.trapezoid(g(v), v))


def _adaptive(g, lo, hi, nodes, rel_tol):
    """Globally adaptive trapezoid refinement with Richardson correction.

    Intervals are refined level-synchronously (one vectorized integrand
    call per depth) and their contributions are accumulated in ascending
    position order with exact summation, so the result is deterministic
    and independent of any execution interleaving.
    """
    v = np.linspace(lo, hi, nodes)
    gv = g(v)
    a, b = v[:-1], v[1:]
    ga, gb = gv[:-1], gv[1:]
    t = 0.5 * (b - a) * (ga + gb)
    total = abs(float(np.sum(t)))

    # Per-interval absolute budget, proportional to interval length.
    scale = max(total, 1e-300)
    budget = rel_tol * scale / (hi - lo)

    done_pos: list[np.ndarray] = []
    done_val: list[np.ndarray] = []
    tau = budget * (b - a)

    for _depth in range(_MAX_DEPTH):
        if a.size == 0:
            break
        m = 0.5 * (a + b)
        gm = g(m)
        t2 = 0.25 * (b - a) * (ga + 2.0 * gm + gb)
        err = np.abs(t2 - t) / 3.0
        ok = err <= tau
        if np.any(ok):
            done_pos.append(a[ok])
            done_val.append(t2[ok] + (t2[ok] - t[ok]) / 3.0)
        split = ~ok
        if not np.any(split):
            a = np.empty(0)
            break
        a_s, b_s, m_s = a[split], b[split], m[split]
        ga_s, gb_s, gm_s = ga[split], gb[split], gm[split]
        a = np.concatenate([a_s, m_s])
        b = np.concatenate([m_s, b_s])
        ga = np.concatenate([ga_s, gm_s])
        gb = np.concatenate([gm_s, gb_s])
        t = 0.5 * (b - a) * (ga + gb)
        tau = budget * (b - a)

    if a.size:
        # Depth exhausted: keep the last estimates but report the gap.
        done_pos.append(a)
        done_val.append(t)
        achieved = float(np.sum(np.abs(t)) / scale)
        if achieved > rel_tol * 10.0:
            raise QuadratureError(
                "adaptive velocity quadrature did not converge",
                achieved=achieved)

    pos = np.concatenate(done_pos)
    val = np.concatenate(done_val)
    order = np.argsort(pos, kind="stable")
    return float(math.fsum(val[order]))


def rho55_avg(geom: Geometry, drive: DriveConfig, species: AtomSpecies,
              ens: EnsembleConfig, quad: QuadratureSpec,
              regularize: bool = True) -> float:
    """Maxwell-averaged weak-probe population of |5>.

    Integrates the closed-form rho55 against
    f(v) = exp(-v^2/v_p^2) / (v_p sqrt(pi)) over [-span*v_p, span*v_p].
    """
    v_p = most_probable_speed(species, ens.temperature)
    g = _integrand_factory(geom, drive, species, v_p, regularize)
    lo, hi = -quad.span * v_p, quad.span * v_p
    if quad.scheme == "dense-trapezoid":
        return _dense_trapezoid(g, lo, hi, quad.nodes)
    return _adaptive(g, lo, hi, quad.nodes, quad.rel_tol)
