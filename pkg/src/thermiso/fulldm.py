"""Steady state of the full five-level optical Bloch equations.

The five-level interaction Hamiltonian (rotating frame, ordinary
frequencies, states ordered |1>..|5>) is

    H = -[[0,     0,     Omega_p, 0,        0       ],
          [0,     D12,   0,       Omega_c1, 0       ],
          [Om_p,  0,     D13,     0,        Omega_a ],
          [0,     Om_c1, 0,       D14,      Omega_c2],
          [0,     0,     Om_a,    Om_c2,    D15     ]]

with D13 = Delta_p, D15 = Delta_p + Delta_a, D14 = D15 - Delta_c2 and
D12 = D15 - Delta_c1 - Delta_c2 (all velocity-shifted by the caller).
Dissipation is the standard Lindblad form with the six spontaneous
channels 3->1, 3->2, 4->1, 4->2, 5->3, 5->4, plus a laser-linewidth
dephasing on every field-driven coherence and a separate ground-state
dephasing on rho_21.  This module provides the independent check of the
adiabatic elimination: its Im rho_31 yields an absorption coefficient
that the reduced model must track when the intermediate detunings
dominate the Rabi frequencies.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .atomdata import AtomSpecies
from .errors import (ConfigError, DegenerateSteadyStateError, NumericalError,
                     SingularityError)

__all__ = [
    "FiveLevelProblem",
    "DensityMatrix5",
    "five_level_steady_state",
    "alpha_tilde",
]

_N = 5


@dataclass(frozen=True)
class FiveLevelProblem:
    """One velocity class of the full five-level system (all in Hz)."""

    omega_p: float
    omega_a: float
    omega_c1: float
    omega_c2: float
    delta_12: float
    delta_13: float
    delta_14: float
    delta_15: float
    gamma_31: float
    gamma_32: float
    gamma_41: float
    gamma_42: float
    gamma_53: float
    gamma_54: float
    gamma_laser: float = 0.0
    gamma_21: float = 0.0

    @classmethod
    def from_detunings(cls, omega_p, omega_a, omega_c1, omega_c2,
                       delta_p, delta_a, delta_c1, delta_c2,
                       species: AtomSpecies, gamma_laser=0.0, gamma_21=0.0):
        """Build the problem from the four field detunings (already
        velocity-shifted) using the composition rules of the rotating
        frame."""
        d15 = delta_p + delta_a
        return cls(
            omega_p=omega_p, omega_a=omega_a,
            omega_c1=omega_c1, omega_c2=omega_c2,
            delta_12=d15 - delta_c1 - delta_c2,
            delta_13=delta_p,
            delta_14=d15 - delta_c2,
            delta_15=d15,
            gamma_31=species.gamma_31, gamma_32=species.gamma_32,
            gamma_41=species.gamma_41, gamma_42=species.gamma_42,
            gamma_53=species.gamma_53, gamma_54=species.gamma_54,
            gamma_laser=gamma_laser, gamma_21=gamma_21,
        )

    def decay_channels(self):
        """(upper, lower, rate) triples with 1-based state labels."""
        return ((3, 1, self.gamma_31), (3, 2, self.gamma_32),
                (4, 1, self.gamma_41), (4, 2, self.gamma_42),
                (5, 3, self.gamma_53), (5, 4, self.gamma_54))

    def hamiltonian(self) -> np.ndarray:
        op, oa = self.omega_p, self.omega_a
        oc1, oc2 = self.omega_c1, self.omega_c2
        return -np.array([
            [0.0, 0.0, op, 0.0, 0.0],
            [0.0, self.delta_12, 0.0, oc1, 0.0],
            [op, 0.0, self.delta_13, 0.0, oa],
            [0.0, oc1, 0.0, self.delta_14, oc2],
            [0.0, 0.0, oa, oc2, self.delta_15],
        ], dtype=complex)


class DensityMatrix5:
    """Steady-state density matrix of the full system, states 1..5."""

    def __init__(self, matrix: np.ndarray):
        matrix = np.asarray(matrix, dtype=complex)
        if matrix.shape != (_N, _N):
            raise ConfigError("DensityMatrix5 requires a 5x5 matrix")
        self.matrix = matrix

    def __getitem__(self, key):
        i, j = key
        return self.matrix[i - 1, j - 1]

    def hermiticity_defect(self) -> float:
        scale = max(np.abs(self.matrix).max(), 1e-300)
        return float(np.abs(self.matrix - self.matrix.conj().T).max() / scale)

    def trace_defect(self) -> float:
        return float(abs(np.trace(self.matrix) - 1.0))


def _liouvillian(prob: FiveLevelProblem) -> np.ndarray:
    """Matrix L acting on vec(rho) (row-major) such that
    d vec(rho)/dt = L vec(rho)."""
    eye = np.eye(_N)
    ham = prob.hamiltonian()
    lv = -1j * (np.kron(ham, eye) - np.kron(eye, ham.T))

    for upper, lower, rate in prob.decay_channels():
        if rate == 0.0:
            continue
        c = np.zeros((_N, _N))
        c[lower - 1, upper - 1] = 1.0
        cdc = c.T @ c
        lv += rate * (np.kron(c, c)
                      - 0.5 * (np.kron(cdc, eye) + np.kron(eye, cdc.T)))

    # Extra dephasing: laser linewidth on every coherence except the
    # ground pair (1,2), which carries its own collisional rate.
    for i in range(_N):
        for j in range(_N):
            if i == j:
                continue
            extra = prob.gamma_21 if {i, j} == {0, 1} else prob.gamma_laser
            lv[i * _N + j, i * _N + j] -= extra
    return lv


def five_level_steady_state(prob: FiveLevelProblem) -> DensityMatrix5:
    """Unique steady state of the master equation, normalized to unit
    trace.  Raises :class:`DegenerateSteadyStateError` when the steady
    state is not unique (e.g. all fields off: any ground-state mixture
    is stationary)."""
    if all(r == 0.0 for _, _, r in prob.decay_channels()):
        raise ConfigError("no decay path connects the excited manifold "
                          "to the ground states")
    lv = _liouvillian(prob)

    # Null-space dimension of the Liouvillian decides uniqueness.
    svals = np.linalg.svd(lv, compute_uv=False)
    tol = max(svals[0], 1.0) * 1e-10
    nullspace_dim = int(np.sum(svals < tol))
    if nullspace_dim > 1:
        raise DegenerateSteadyStateError(
            "steady state is not unique (disconnected ground states "
            "with no driving field)", nullspace_dim=nullspace_dim)

    a = lv.copy()
    a[0, :] = 0.0
    for i in range(_N):
        a[0, i * _N + i] = 1.0
    b = np.zeros(_N * _N, dtype=complex)
    b[0] = 1.0
    try:
        x = np.linalg.solve(a, b)
    except np.linalg.LinAlgError as exc:
        raise NumericalError(f"five-level steady-state solve failed: {exc}",
                             condition_estimate=float(np.linalg.cond(a))) from exc
    cond = float(np.linalg.cond(a))
    if not np.isfinite(cond) or cond > 1e14:
        raise NumericalError("five-level steady-state system is "
                             "ill-conditioned", condition_estimate=cond)
    return DensityMatrix5(x.reshape(_N, _N))


def steady_state_residual(prob: FiveLevelProblem, rho: DensityMatrix5) -> float:
    """Max |L vec(rho)| relative to the Liouvillian scale times the
    largest matrix element; a self-consistency diagnostic."""
    lv = _liouvillian(prob)
    resid = np.abs(lv @ rho.matrix.reshape(-1)).max()
    scale = max(np.abs(lv).max() * np.abs(rho.matrix).max(), 1e-300)
    return float(resid / scale)


def alpha_tilde(rho_31: complex, omega_p: float, species: AtomSpecies,
                number_density: float) -> float:
    """Probe absorption coefficient from the full-model coherence:

        alpha~ = N d13^2/(hbar eps0) * (2 pi / lambda_p) * Im(rho_31)/Omega_p
    """
    if omega_p == 0.0:
        raise SingularityError("alpha_tilde requires a non-zero probe "
                               "Rabi frequency")
    from .atomdata import CONSTANTS
    return (number_density * species.dipole_13 ** 2
            / (CONSTANTS.hbar * CONSTANTS.epsilon0)
            * (2.0 * np.pi / species.lambda_p)
            * float(np.imag(rho_31)) / omega_p)
