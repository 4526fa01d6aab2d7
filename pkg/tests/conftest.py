"""Shared fixtures and the acceptance-criterion reporter."""

import os

import numpy as np
import pytest

from thermiso import DriveConfig, EnsembleConfig, QuadratureSpec, rb87

MHz = 1e6

_criterion_lines: list[tuple[int, str]] = []


def record_criterion(num: int, passed: bool, detail: str) -> None:
    """Collect one PASS/FAIL line per acceptance criterion; the lines are
    echoed in the terminal summary so the verdicts are visible even for
    passing tests."""
    line = f"{'PASS' if passed else 'FAIL'} criterion {num:2d}: {detail}"
    _criterion_lines.append((num, line))
    print(line)


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if _criterion_lines:
        terminalreporter.section("acceptance criteria")
        for _, line in sorted(_criterion_lines):
            terminalreporter.write_line(line)


@pytest.fixture(scope="session")
def record():
    return record_criterion


@pytest.fixture(scope="session")
def species():
    return rb87()


@pytest.fixture(scope="session")
def base_drive():
    """Reference drive: weak 0.1 MHz probe, 50 MHz assistant/couplings,
    1 GHz single-photon detunings, four-photon resonance at -1000 MHz."""
    return DriveConfig(
        omega_p=0.1 * MHz, omega_a=50 * MHz,
        omega_c1=50 * MHz, omega_c2=50 * MHz,
        delta_p=-1000 * MHz, delta_a=1000 * MHz,
        delta_c1=1000 * MHz, delta_c2=-1002.5 * MHz,
        gamma_laser=0.05 * MHz, gamma_21=2e3)


@pytest.fixture(scope="session")
def ens300():
    return EnsembleConfig(temperature=300.0, number_density=2e18, length=0.01)


@pytest.fixture(scope="session")
def quad_default():
    return QuadratureSpec("dense-trapezoid", 5.0, 20001)


@pytest.fixture(scope="session")
def threads():
    return min(os.cpu_count() or 1, 8)


@pytest.fixture(scope="session")
def rng():
    return np.random.default_rng(20260823)
