"""Effective three-level Lambda model obtained by adiabatic elimination.

Eliminating the two far-detuned intermediate states of the five-level
scheme leaves a three-level Lambda system {|1>, |2>, |5>} driven by an
effective probe (two-photon |1><->|5>) and an effective coupling
(two-photon |2><->|5>) field, with dynamic Stark shifts on |2> and |5>.
This module computes those effective quantities, the closed-form
weak-probe upper-state population, and -- as an independent cross-check
-- the full steady state of the reduced density-matrix equations.

Notes on two deliberate modeling choices
----------------------------------------
* The Lorentzian width of the two-photon line in the closed form is the
  total optical decoherence rate ``gamma = Gamma + gamma_l`` (upper-state
  effective decay plus laser linewidth).  This is what the steady state
  of the reduced density-matrix equations actually yields, and the
  numeric solver in this module certifies it; see
  :func:`rho55_closed_form`.
* The intermediate-state denominators 1/Delta acquired in the
  elimination are optionally regularized to Delta/(Delta^2 + kappa^2)
  with kappa the half linewidth of the corresponding optical coherence.
  This is the real part of the finite-lifetime propagator
  1/(Delta + i*kappa); it leaves far-detuned physics untouched (relative
  change kappa^2/Delta^2 ~ 3e-5 at 1 GHz detuning) while keeping the
  velocity integrand finite and integrable at the single-photon-resonant
  velocity classes that a thermal average inevitably crosses.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Union

import numpy as np

from .atomdata import AtomSpecies
from .errors import ConfigError, NumericalError, SingularityError

__all__ = [
    "DriveConfig",
    "ReducedPoint",
    "DensityMatrix3",
    "reduce",
    "rho55_closed_form",
    "reduced_steady_state_numeric",
]

ArrayLike = Union[float, np.ndarray]

#: Denominator guard for the closed form (absolute, SI units of Hz^4).
_DEN_FLOOR = 1e-30


@dataclass(frozen=True)
class DriveConfig:
    """Rabi frequencies and detunings of the four driving fields.

    All Rabi frequencies are real and non-negative; sign information of
    the effective two-photon quantities lives in the derived
    :class:`ReducedPoint`.  Rates in Hz (ordinary frequencies).
    """

    omega_p: float
    omega_a: float
    omega_c1: float
    omega_c2: float
    delta_p: float
    delta_a: float
    delta_c1: float
    delta_c2: float
    gamma_laser: float = 0.0    # common laser linewidth gamma_l
    gamma_21: float = 0.0       # ground-state decoherence

    def __post_init__(self):
        for field in ("omega_p", "omega_a", "omega_c1", "omega_c2"):
            if getattr(self, field) < 0:
                raise ConfigError(f"Rabi frequency {field} must be >= 0")
        if self.gamma_laser < 0 or self.gamma_21 < 0:
            raise ConfigError("decoherence rates must be >= 0")

    def far_detuned(self, ratio: float = 10.0) -> bool:
        """True if every single-photon detuning exceeds the associated
        Rabi frequency by at least ``ratio`` (validity condition of the
        adiabatic elimination at v = 0)."""
        pairs = ((self.delta_p, self.omega_p), (self.delta_a, self.omega_a),
                 (self.delta_c1, self.omega_c1), (self.delta_c2, self.omega_c2))
        return all(abs(d) >= ratio * o for d, o in pairs)

    def replace(self, **kwargs) -> "DriveConfig":
        from dataclasses import replace as _replace
        return _replace(self, **kwargs)


@dataclass(frozen=True)
class ReducedPoint:
    """All effective three-level quantities at one atomic velocity.

    Fields may be floats or equal-shaped numpy arrays (one entry per
    velocity node), so the whole velocity grid reduces in one call.
    """

    omega_pe: ArrayLike     # effective probe Rabi frequency (signed)
    omega_ce: ArrayLike     # effective coupling Rabi frequency (signed)
    stark_2: ArrayLike      # dynamic Stark shift of |2>
    stark_5: ArrayLike      # dynamic Stark shift of |5>
    delta_12: ArrayLike     # four-photon detuning
    delta_15: ArrayLike     # two-photon detuning
    delta_12e: ArrayLike    # delta_12 + stark_2
    delta_15e: ArrayLike    # delta_15 + stark_5
    gamma_big: float        # effective upper-state decay Gamma
    gamma_opt: float        # optical decoherence gamma = Gamma + gamma_l
    eta_53: float
    eta_54: float
    gamma_51: float
    gamma_52: float


class DensityMatrix3:
    """Steady-state density matrix of the reduced system, states (1, 2, 5)."""

    STATES = (1, 2, 5)

    def __init__(self, matrix: np.ndarray, eta_53: float, eta_54: float):
        matrix = np.asarray(matrix, dtype=complex)
        if matrix.shape != (3, 3):
            raise ConfigError("DensityMatrix3 requires a 3x3 matrix")
        self.matrix = matrix
        self.eta_53 = eta_53
        self.eta_54 = eta_54

    def __getitem__(self, key):
        i, j = key
        return self.matrix[self.STATES.index(i), self.STATES.index(j)]

    @property
    def rho_11(self) -> float:
        return self.matrix[0, 0].real

    @property
    def rho_22(self) -> float:
        return self.matrix[1, 1].real

    @property
    def rho_55(self) -> float:
        return self.matrix[2, 2].real

    def hermiticity_defect(self) -> float:
        """Max |rho - rho^dagger| relative to the largest element."""
        scale = max(np.abs(self.matrix).max(), 1e-300)
        return float(np.abs(self.matrix - self.matrix.conj().T).max() / scale)

    def constraint_defect(self) -> float:
        """|rho11 + rho22 + (1 + eta53 + eta54) rho55 - 1|."""
        total = (self.matrix[0, 0] + self.matrix[1, 1]
                 + (1.0 + self.eta_53 + self.eta_54) * self.matrix[2, 2])
        return float(abs(total - 1.0))


def _inv(x: ArrayLike, kappa: float, regularize: bool) -> ArrayLike:
    """1/x, or its finite-lifetime regularization x/(x^2 + kappa^2)."""
    if regularize:
        return x / (x * x + kappa * kappa)
    if np.any(x == 0.0):
        raise SingularityError(
            "velocity-shifted single-photon detuning is exactly zero; "
            "the adiabatic elimination diverges here (enable "
            "regularization or exclude this velocity class)")
    return 1.0 / x


def reduce(drive: DriveConfig, species: AtomSpecies, shifts=None,
           regularize: bool = True) -> ReducedPoint:
    """Build the effective three-level quantities for one velocity class.

    ``shifts`` is any object with attributes ``shift_p``, ``shift_a``,
    ``shift_c1``, ``shift_c2`` (Hz, scalars or arrays); ``None`` means an
    atom at rest.  With ``regularize=False`` a vanishing shifted detuning
    raises :class:`SingularityError`.
    """
    if shifts is None:
        sp = sa = sc1 = sc2 = 0.0
    else:
        sp, sa = shifts.shift_p, shifts.shift_a
        sc1, sc2 = shifts.shift_c1, shifts.shift_c2

    d_p = drive.delta_p + sp
    d_a = drive.delta_a + sa
    d_c1 = drive.delta_c1 + sc1
    d_c2 = drive.delta_c2 + sc2

    # Half linewidths of the optical coherences whose propagators the
    # eliminated denominators stand for: |1>-|3> and |2>-|4> for the
    # ground-intermediate legs, |3>-|5> and |4>-|5> for the upper legs.
    kappa_13 = 0.5 * (species.gamma_31 + species.gamma_32)
    kappa_24 = 0.5 * (species.gamma_41 + species.gamma_42)
    kappa_35 = kappa_13 + 0.5 * (species.gamma_53 + species.gamma_54)
    kappa_45 = kappa_24 + 0.5 * (species.gamma_53 + species.gamma_54)

    omega_pe = -drive.omega_p * drive.omega_a * _inv(d_p, kappa_13, regularize)
    omega_ce = -drive.omega_c1 * drive.omega_c2 * _inv(d_c2, kappa_45, regularize)
    stark_2 = -drive.omega_c1 ** 2 * _inv(d_c1, kappa_24, regularize)
    stark_5 = (drive.omega_a ** 2 * _inv(d_a, kappa_35, regularize)
               + drive.omega_c2 ** 2 * _inv(d_c2, kappa_45, regularize))

    delta_15 = d_p + d_a
    delta_12 = delta_15 - d_c1 - d_c2

    gamma_51 = species.gamma_51
    gamma_52 = species.gamma_52
    gamma_big = 0.5 * (gamma_51 + gamma_52)

    return ReducedPoint(
        omega_pe=omega_pe,
        omega_ce=omega_ce,
        stark_2=stark_2,
        stark_5=stark_5,
        delta_12=delta_12,
        delta_15=delta_15,
        delta_12e=delta_12 + stark_2,
        delta_15e=delta_15 + stark_5,
        gamma_big=gamma_big,
        gamma_opt=gamma_big + drive.gamma_laser,
        eta_53=species.eta_53,
        eta_54=species.eta_54,
        gamma_51=gamma_51,
        gamma_52=gamma_52,
    )


def rho55_closed_form(pt: ReducedPoint) -> ArrayLike:
    """Weak-probe steady-state population of |5>.

    rho55 = 2*gamma*Omega_pe^2*Delta_12e^2
            / ( Gamma * [ (Omega_ce^2 - Delta_12e*Delta_15e)^2
                          + gamma^2 * Delta_12e^2 ] )

    with gamma = Gamma + gamma_l.  The gamma^2 line width follows from
    solving the reduced density-matrix equations to leading order in the
    effective probe (neglecting the small ground-state decoherence); the
    independent numeric solver :func:`reduced_steady_state_numeric`
    certifies this expression to better than 1e-3 relative in the
    weak-probe regime.
    """
    gamma = pt.gamma_opt
    if pt.gamma_big <= 0.0:
        raise SingularityError("the weak-probe population formula requires "
                               "a non-zero upper-state decay rate")
    num = 2.0 * gamma * pt.omega_pe ** 2 * pt.delta_12e ** 2 / pt.gamma_big
    den = ((pt.omega_ce ** 2 - pt.delta_12e * pt.delta_15e) ** 2
           + gamma ** 2 * pt.delta_12e ** 2)
    num = np.asarray(num, dtype=float)
    den = np.asarray(den, dtype=float)
    bad = den < _DEN_FLOOR
    if np.any(bad & (num > 0.0)):
        raise SingularityError(
            "closed-form denominator vanished with non-zero numerator "
            "(Omega_ce = 0 together with Delta_12e = 0)")
    out = np.divide(num, den, out=np.zeros_like(num), where=~bad)
    return float(out) if out.ndim == 0 else out


def reduced_steady_state_numeric(pt: ReducedPoint, gamma_21: float) -> DensityMatrix3:
    """Full steady state of the reduced density-matrix equations.

    Solves the 9-unknown complex linear system built from the five
    dynamic equations (populations rho_22, rho_11 and coherences rho_52,
    rho_51, rho_21), the conjugates of the coherence equations, and the
    population constraint rho11 + rho22 + (1+eta53+eta54) rho55 = 1.  No
    weak-probe approximation is made, so this is an independent oracle
    for :func:`rho55_closed_form`.
    """
    if pt.gamma_51 + pt.gamma_52 <= 0:
        raise ConfigError("effective decay Gamma_51 + Gamma_52 must be > 0")

    ope = complex(pt.omega_pe)
    oce = complex(pt.omega_ce)
    g52 = (pt.gamma_52 + pt.gamma_opt - pt.gamma_big) + 1j * (
        pt.delta_15 - pt.delta_12 + pt.stark_5 - pt.stark_2)
    g51 = (pt.gamma_51 + pt.gamma_opt - pt.gamma_big) - 1j * (
        pt.delta_15 + pt.stark_5)
    g21 = gamma_21 - 1j * (pt.delta_12 + pt.stark_2)

    # unknowns: [r11, r22, r55, r52, r25, r51, r15, r21, r12]
    A = np.zeros((9, 9), dtype=complex)
    b = np.zeros(9, dtype=complex)

    # d rho22 / dt = 0
    A[0, 2] = pt.gamma_52
    A[0, 3] = 1j * np.conj(oce)
    A[0, 4] = -1j * oce
    # d rho11 / dt = 0
    A[1, 2] = pt.gamma_51
    A[1, 5] = 1j * np.conj(ope)
    A[1, 6] = -1j * ope
    # d rho52 / dt = 0
    A[2, 3] = -g52
    A[2, 8] = 1j * ope
    A[2, 1] = 1j * oce
    A[2, 2] = -1j * oce
    # conjugate: d rho25 / dt = 0
    A[3, 4] = -np.conj(g52)
    A[3, 7] = -1j * np.conj(ope)
    A[3, 1] = -1j * np.conj(oce)
    A[3, 2] = 1j * np.conj(oce)
    # d rho51 / dt = 0
    A[4, 5] = -g51
    A[4, 7] = 1j * oce
    A[4, 0] = 1j * ope
    A[4, 2] = -1j * ope
    # conjugate: d rho15 / dt = 0
    A[5, 6] = -np.conj(g51)
    A[5, 8] = -1j * np.conj(oce)
    A[5, 0] = -1j * np.conj(ope)
    A[5, 2] = 1j * np.conj(ope)
    # d rho21 / dt = 0
    A[6, 7] = -g21
    A[6, 5] = 1j * np.conj(oce)
    A[6, 4] = -1j * ope
    # conjugate: d rho12 / dt = 0
    A[7, 8] = -np.conj(g21)
    A[7, 6] = -1j * oce
    A[7, 3] = 1j * np.conj(ope)
    # population constraint
    A[8, 0] = 1.0
    A[8, 1] = 1.0
    A[8, 2] = 1.0 + pt.eta_53 + pt.eta_54
    b[8] = 1.0

    try:
        x = np.linalg.solve(A, b)
    except np.linalg.LinAlgError as exc:
        raise NumericalError(f"reduced steady-state system is singular: {exc}",
                             condition_estimate=float(np.linalg.cond(A))) from exc
    cond = float(np.linalg.cond(A))
    if not np.isfinite(cond) or cond > 1e14:
        raise NumericalError("reduced steady-state system is ill-conditioned",
                             condition_estimate=cond)

    rho = np.array([
        [x[0], x[8], x[6]],
        [x[7], x[1], x[4]],
        [x[5], x[3], x[2]],
    ], dtype=complex)
    return DensityMatrix3(rho, pt.eta_53, pt.eta_54)
