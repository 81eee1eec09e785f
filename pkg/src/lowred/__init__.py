"""Stable phase retrieval of complex polynomials from 6d-3 magnitude measurements."""

from .bounds import (BoundReport, admissible_noise, beta, error_bound, radius,
                     truncation_floor)
from .errors import (DegenerateNullSpaceError, InadmissibleNoiseError,
                     InterpolationError, LowredError, NumericalError, ValidationError)
from .harness import (SweepConfig, SweepRow, maxmin_objective, random_unit_poly, run_sweep,
                      search_worst, sweep_csv, worst_case_fixture)
from .interpolation import TrigPolynomial, dirichlet, interpolate, magnitude_families
from .measurement import (MeasurementVector, NoiseVector, add_noise, frame_vector, measure,
                          measure_basis, sample_noise)
from .polyspace import Polynomial, UnitPoint, evaluate, inner, kernel_poly, norm, rho
from .recovery import RecoveryResult, kernel_recover, phase_propagate, recover, select_z0

__version__ = "0.1.0"
