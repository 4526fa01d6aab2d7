"""Direction-dependent probe absorption and optical isolation in
thermal multi-level atomic vapors.

The package models a five-level Lambda scheme whose far-detuned
intermediate states are adiabatically eliminated into an effective
three-level system driven by two-photon fields.  Maxwell-averaging the
weak-probe response over atomic velocities yields direction-dependent
absorption, from which isolation ratio and insertion loss follow.
"""

from .atomdata import (AtomSpecies, EnsembleConfig, doppler_half_width,
                       most_probable_speed, rb87)
from .doppler import Geometry, QuadratureSpec, effective_wavevector, rho55_avg
from .errors import (ConfigError, DegenerateSteadyStateError, InfeasibleError,
                     NumericalError, QuadratureError, SimulationError,
                     SingularityError)
from .fulldm import FiveLevelProblem, alpha_tilde, five_level_steady_state
from .observables import (BandwidthResult, Spectrum, absorption, bandwidth,
                          compute_spectrum, compute_table, evaluate_point,
                          insertion_loss, ir_il_from_alpha, isolation_ratio,
                          tradeoff_search, transmissivity)
from .reduced import (DriveConfig, ReducedPoint, reduce,
                      reduced_steady_state_numeric, rho55_closed_form)

__version__ = "0.1.0"
