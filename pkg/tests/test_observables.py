import math

import numpy as np
import pytest

from thermiso import (EnsembleConfig, QuadratureSpec, Spectrum, bandwidth,
                      compute_spectrum, evaluate_point, insertion_loss,
                      ir_il_from_alpha, isolation_ratio, tradeoff_search,
                      transmissivity)
from thermiso.errors import ConfigError, InfeasibleError

MHz = 1e6


def _spectrum(x, alpha_f, alpha_b, length=0.01):
    return Spectrum("delta_p", np.asarray(x, float),
                    np.asarray(alpha_f, float), np.asarray(alpha_b, float),
                    length)


def test_transmissivity_analytic():
    assert transmissivity(0.0, 0.01) == 1.0
    assert transmissivity(100.0, 0.01) == pytest.approx(math.exp(-1.0))
    with pytest.raises(ConfigError):
        transmissivity(1.0, 0.0)


def test_ir_il_identities():
    # the log-space formula must agree with the transmissivity ratio
    # wherever the latter does not underflow
    for a_f, a_b in ((10.0, 500.0), (0.0, 100.0), (3.0, 3.0)):
        t_f = transmissivity(a_f, 0.01)
        t_b = transmissivity(a_b, 0.01)
        ir, il = ir_il_from_alpha(a_f, a_b, 0.01)
        assert ir == pytest.approx(isolation_ratio(t_f, t_b), abs=1e-9)
        assert il == pytest.approx(insertion_loss(t_f), abs=1e-9)


def test_ir_survives_transmissivity_underflow():
    # alpha_bwd * L = 40 -> T_bwd ~ 4e-18, but IR stays finite in log space
    ir, il = ir_il_from_alpha(0.0, 4000.0, 0.01)
    assert ir == pytest.approx(4000.0 * 0.01 * 10.0 / math.log(10.0))
    assert il == 0.0


def test_il_monotone_in_forward_absorption():
    alphas = [0.0, 1.0, 10.0, 100.0]
    ils = [ir_il_from_alpha(a, 0.0, 0.01)[1] for a in alphas]
    assert all(b > a for a, b in zip(ils, ils[1:]))


def test_bandwidth_simple_interval():
    x = np.linspace(0.0, 10.0, 11)
    # IR crosses 20 dB at x = 2.5 and x = 7.5; IL stays at 0
    ir = np.where((x > 2) & (x < 8), 30.0, 10.0)
    alpha_b = ir / (0.01 * 10.0 / math.log(10.0))
    spec = _spectrum(x, np.zeros_like(x), alpha_b)
    # generous IL budget so the joint margin is governed by IR alone
    res = bandwidth(spec, ir_min=20.0, il_max=1000.0)
    assert len(res.intervals) == 1
    lo, hi = res.intervals[0]
    assert lo == pytest.approx(2.5)
    assert hi == pytest.approx(7.5)
    assert res.total_width == pytest.approx(5.0)


def test_bandwidth_il_criterion_cuts_interval():
    x = np.linspace(0.0, 10.0, 101)
    db = 0.01 * 10.0 / math.log(10.0)
    alpha_b = np.full_like(x, 30.0 / db)     # IR = 30 dB everywhere
    alpha_f = np.where(x < 5.0, 0.0, 2.0 / db)  # IL jumps to 2 dB at x = 5
    spec = _spectrum(x, alpha_f, alpha_b + alpha_f)
    res = bandwidth(spec, ir_min=20.0, il_max=1.0)
    assert len(res.intervals) == 1
    assert res.intervals[0][0] == pytest.approx(0.0)
    assert res.intervals[0][1] == pytest.approx(4.95, abs=0.06)


def test_bandwidth_empty_and_open_edges():
    x = np.linspace(0.0, 1.0, 5)
    spec = _spectrum(x, np.zeros_like(x), np.zeros_like(x))
    res = bandwidth(spec, ir_min=20.0, il_max=1.0)
    assert res.intervals == []
    assert res.total_width == 0.0
    # criterion satisfied at both endpoints: interval clips to the window
    db = 0.01 * 10.0 / math.log(10.0)
    spec = _spectrum(x, np.zeros_like(x), np.full_like(x, 30.0 / db))
    res = bandwidth(spec, ir_min=20.0, il_max=1.0)
    assert res.intervals == [(0.0, 1.0)]


def test_bandwidth_resampling_invariance():
    # a piecewise-linear margin measured on two different grids must give
    # the same interpolated edges
    def alpha_b(x):
        db = 0.01 * 10.0 / math.log(10.0)
        return np.interp(x, [0, 3, 7, 10], [0, 40, 40, 0]) / db

    x1 = np.linspace(0.0, 10.0, 11)
    x2 = np.linspace(0.0, 10.0, 101)
    r1 = bandwidth(_spectrum(x1, np.zeros_like(x1), alpha_b(x1)), il_max=1e3)
    r2 = bandwidth(_spectrum(x2, np.zeros_like(x2), alpha_b(x2)), il_max=1e3)
    assert r1.total_width == pytest.approx(r2.total_width, rel=1e-9)
    assert r2.intervals[0] == (pytest.approx(1.5), pytest.approx(8.5))


def test_compute_spectrum_validation(species, quad_default):
    configure = lambda x: (None, None, None)
    with pytest.raises(ConfigError):
        compute_spectrum("delta_p", [], configure, species, 0.01, quad_default)
    with pytest.raises(ConfigError):
        compute_spectrum("delta_p", [1.0, 0.5], configure, species, 0.01,
                         quad_default)


def test_compute_spectrum_thread_invariance(base_drive, species, ens300):
    quad = QuadratureSpec("dense-trapezoid", 5.0, 2001)
    values = np.linspace(-1005 * MHz, -995 * MHz, 5)

    def configure(x):
        return base_drive.replace(delta_p=x), ens300, 180.0

    s1 = compute_spectrum("delta_p", values, configure, species,
                          ens300.length, quad, threads=1)
    s4 = compute_spectrum("delta_p", values, configure, species,
                          ens300.length, quad, threads=4)
    assert np.array_equal(s1.alpha_fwd, s4.alpha_fwd)
    assert np.array_equal(s1.alpha_bwd, s4.alpha_bwd)


def test_absorption_independent_of_probe_power(base_drive, species, ens300):
    # in the weak-probe model alpha is exactly Omega_p-independent
    quad = QuadratureSpec("dense-trapezoid", 5.0, 2001)
    ref = None
    for omega_p in (0.05 * MHz, 0.1 * MHz, 0.2 * MHz):
        drive = base_drive.replace(omega_p=omega_p)
        a_f, a_b = evaluate_point(drive, species, ens300, 180.0, quad)
        if ref is None:
            ref = (a_f, a_b)
        else:
            assert a_f == pytest.approx(ref[0], rel=1e-6)
            assert a_b == pytest.approx(ref[1], rel=1e-6)


def test_tradeoff_search_quadratic_model():
    # synthetic single-parameter landscape with a known constrained optimum:
    # IR = 100 - (x - 7)^2 but IL = x/5 caps the feasible region at x = 5
    ens = EnsembleConfig(temperature=300.0, number_density=2e18, length=0.01)
    db = ens.length * 10.0 / math.log(10.0)

    import thermiso.observables as obs

    def fake_evaluate(drive, species, e, theta, quad, regularize=True):
        x = drive
        il = x / 5.0
        ir = 100.0 - (x - 7.0) ** 2
        return il / db, (ir + il) / db

    original = obs.evaluate_point
    obs.evaluate_point = fake_evaluate
    try:
        result = tradeoff_search(
            {"x": (0.0, 10.0)},
            lambda p: (p["x"], ens, 180.0),
            species=None, quad=None, il_max=1.0, coarse=11,
            resolution=1e-4)
    finally:
        obs.evaluate_point = original
    assert result["x"] == pytest.approx(5.0, abs=1e-2)
    assert result["il_db"] <= 1.0 + 1e-9
    assert result["ir_db"] == pytest.approx(96.0, abs=0.1)


def test_tradeoff_search_infeasible():
    ens = EnsembleConfig(temperature=300.0, number_density=2e18, length=0.01)
    db = ens.length * 10.0 / math.log(10.0)
    import thermiso.observables as obs

    def fake_evaluate(drive, species, e, theta, quad, regularize=True):
        x = drive
        return (5.0 + x) / db, (50.0 + 5.0 + x) / db  # IL >= 5 dB always

    original = obs.evaluate_point
    obs.evaluate_point = fake_evaluate
    try:
        with pytest.raises(InfeasibleError) as info:
            tradeoff_search({"x": (0.0, 10.0)},
                            lambda p: (p["x"], ens, 180.0),
                            species=None, quad=None, il_max=1.0)
    finally:
        obs.evaluate_point = original
    assert info.value.best_point["il_db"] == pytest.approx(5.0, abs=1e-9)
    assert info.value.exit_code == 4


def test_tradeoff_bounds_validation():
    with pytest.raises(ConfigError):
        tradeoff_search({}, lambda p: None, None, None)
    with pytest.raises(ConfigError):
        tradeoff_search({"x": (2.0, 1.0)}, lambda p: None, None, None)
