import numpy as np
import pytest

from thermiso import (DriveConfig, reduce, reduced_steady_state_numeric,
                      rho55_closed_form)
from thermiso.doppler import VelocityShifts
from thermiso.errors import SingularityError
from thermiso.reduced import ReducedPoint

MHz = 1e6


def test_effective_quantities_at_rest(base_drive, species):
    pt = reduce(base_drive, species, regularize=False)
    # Omega_pe = -0.1 * 50 / (-1000) MHz = +5 kHz
    assert pt.omega_pe == pytest.approx(5e3, rel=1e-12)
    # Omega_ce = -50*50/(-1002.5) MHz ~ +2.4938 MHz
    assert pt.omega_ce == pytest.approx(2500 * MHz * MHz / (1002.5 * MHz), rel=1e-12)
    # Stark shift of |2>: -2.5 MHz, placing the four-photon resonance
    # exactly at delta_p = -1000 MHz for delta_c2 = -1002.5 MHz
    assert pt.stark_2 == pytest.approx(-2.5 * MHz, rel=1e-12)
    assert pt.delta_12e == pytest.approx(0.0, abs=1.0)
    assert pt.delta_12e == pt.delta_12 + pt.stark_2
    assert pt.delta_15e == pt.delta_15 + pt.stark_5
    assert pt.gamma_big == pytest.approx(0.19 * MHz, rel=1e-12)
    assert pt.gamma_opt == pytest.approx(0.24 * MHz, rel=1e-12)


def test_regularization_negligible_far_from_resonance(base_drive, species):
    strict = reduce(base_drive, species, regularize=False)
    soft = reduce(base_drive, species, regularize=True)
    assert soft.omega_pe == pytest.approx(strict.omega_pe, rel=1e-4)
    # the two light-shift terms nearly cancel, amplifying the relative
    # effect of the pole softening by ~400x; still sub-permille
    assert soft.stark_5 == pytest.approx(strict.stark_5, rel=1e-3)


def test_zero_probe_gives_zero_coupling(base_drive, species):
    pt = reduce(base_drive.replace(omega_p=0.0), species)
    assert pt.omega_pe == 0.0
    assert rho55_closed_form(pt) == 0.0


def test_singularity_on_resonant_velocity_class(base_drive, species):
    shifts = VelocityShifts(1000 * MHz, 0.0, 0.0, 0.0)  # cancels delta_p
    with pytest.raises(SingularityError):
        reduce(base_drive, species, shifts, regularize=False)
    # regularized evaluation stays finite
    pt = reduce(base_drive, species, shifts, regularize=True)
    assert np.isfinite(pt.omega_pe)


def test_far_detuned_flag(base_drive):
    assert base_drive.far_detuned(ratio=10.0)
    assert not base_drive.replace(delta_a=100 * MHz).far_detuned(ratio=10.0)


def _point(omega_pe, omega_ce, delta_12e, delta_15e,
           gamma_big=0.19 * MHz, gamma_l=0.05 * MHz):
    return ReducedPoint(
        omega_pe=omega_pe, omega_ce=omega_ce, stark_2=0.0, stark_5=0.0,
        delta_12=delta_12e, delta_15=delta_15e,
        delta_12e=delta_12e, delta_15e=delta_15e,
        gamma_big=gamma_big, gamma_opt=gamma_big + gamma_l,
        eta_53=0.19 / 11.5, eta_54=0.19 / 11.5,
        gamma_51=gamma_big, gamma_52=gamma_big)


def test_perfect_dip_at_four_photon_resonance():
    pt = _point(5e3, 2.5 * MHz, 0.0, 1 * MHz)
    assert rho55_closed_form(pt) == 0.0


def test_weak_probe_quadratic_scaling():
    pt1 = _point(5e3, 2.5 * MHz, 0.3 * MHz, 1 * MHz)
    pt2 = _point(10e3, 2.5 * MHz, 0.3 * MHz, 1 * MHz)
    assert rho55_closed_form(pt2) / rho55_closed_form(pt1) == pytest.approx(
        4.0, rel=1e-12)


def test_lorentzian_limit_without_coupling():
    # with Omega_ce = 0 the line collapses to a Lorentzian of half width
    # gamma = Gamma + gamma_l in the two-photon detuning
    gamma_big, gamma_l = 0.19 * MHz, 0.05 * MHz
    gamma = gamma_big + gamma_l
    for d15 in (0.0, 0.1 * MHz, -3 * MHz):
        pt = _point(5e3, 0.0, 0.7 * MHz, d15, gamma_big, gamma_l)
        expect = (2 * gamma * pt.omega_pe ** 2
                  / (gamma_big * (gamma ** 2 + d15 ** 2)))
        assert rho55_closed_form(pt) == pytest.approx(expect, rel=1e-12)


def test_singular_denominator_raises():
    # zero upper-state decay is rejected outright
    pt = _point(5e3, 0.0, 0.3 * MHz, 0.0, gamma_big=0.0, gamma_l=0.05 * MHz)
    with pytest.raises(SingularityError):
        rho55_closed_form(pt)
    # vanishing denominator with a non-zero numerator (near-exact dip
    # without the coupling that would close the interference channel)
    pt = _point(5e3, 0.0, 1e-22, 0.0)
    with pytest.raises(SingularityError):
        rho55_closed_form(pt)


def test_numeric_unpumped_ground_state():
    pt = _point(0.0, 2.5 * MHz, 0.4 * MHz, 1 * MHz)
    dm = reduced_steady_state_numeric(pt, gamma_21=2e3)
    assert dm.rho_11 == pytest.approx(1.0, abs=1e-12)
    assert dm.rho_55 == pytest.approx(0.0, abs=1e-12)
    assert dm.rho_22 == pytest.approx(0.0, abs=1e-12)


def test_numeric_invariants(base_drive, species):
    pt = reduce(base_drive.replace(delta_p=-950 * MHz), species)
    dm = reduced_steady_state_numeric(pt, gamma_21=2e3)
    assert dm.hermiticity_defect() < 1e-10
    assert dm.constraint_defect() < 1e-10
    assert 0.0 <= dm.rho_11 <= 1.0
    assert 0.0 <= dm.rho_55 <= 1.0


def test_closed_form_matches_numeric_at_reference_point(base_drive, species):
    # generic off-dip point of the reference spectrum
    pt = reduce(base_drive.replace(delta_p=-950 * MHz), species)
    dm = reduced_steady_state_numeric(pt, gamma_21=0.0)
    assert rho55_closed_form(pt) == pytest.approx(dm.rho_55, rel=1e-3)


def test_ground_decoherence_effect_is_measurable(base_drive, species):
    # the closed form drops gamma_21; the numeric solver quantifies the
    # resulting approximation error (sub-percent at the doublet peaks)
    pt = reduce(base_drive.replace(delta_p=-997.5 * MHz), species)
    with_g21 = reduced_steady_state_numeric(pt, gamma_21=2e3).rho_55
    without = reduced_steady_state_numeric(pt, gamma_21=0.0).rho_55
    assert with_g21 != pytest.approx(without, rel=1e-6)
    assert with_g21 == pytest.approx(without, rel=0.2)


def test_vectorized_reduce_matches_scalar(base_drive, species):
    v = np.array([-50.0, 0.0, 120.0])
    shifts = VelocityShifts(species.k_p * v, -species.k_a * v,
                            species.k_c1 * v, -species.k_c2 * v)
    pts = reduce(base_drive, species, shifts)
    rho = rho55_closed_form(pts)
    for i, vi in enumerate(v):
        one = VelocityShifts(species.k_p * vi, -species.k_a * vi,
                             species.k_c1 * vi, -species.k_c2 * vi)
        assert rho[i] == pytest.approx(
            rho55_closed_form(reduce(base_drive, species, one)), rel=1e-12)
