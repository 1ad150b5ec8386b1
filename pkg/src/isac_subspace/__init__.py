"""Waveform covariance design for integrated sensing and communications.

Steering vectors and Fisher information for a MIMO radar echo, the
sensing/communication subspace structure of the CRB-optimal waveform,
closed-form rank-1 optimum under a rate constraint for one target and a
single-antenna user, and the subspace correlation coefficient G.
"""

from .array_model import SteeringSet, beampattern, build_steering, build_steering_set
from .channel_model import (CommChannel, RateConstraint, achievable_rate, draw_rayleigh_channel,
                            gamma_of_Gamma, snr_threshold)
from .config import Scenario, SweepSpec, load_config
from .errors import ConfigError, InfeasibleError, IsacError, UnidentifiableError
from .fim import (Fim, NoiseModel, angle_crb_closed, angle_crb_schur, crb_trace, fim_det_closed,
                  fim_fd_oracle, fim_multi, fim_single)
from .sdp import export_sdp, parse_sdpa
from .solver import (ClosedFormSolution, ReducedProblem, VerificationReport, benchmark_solutions,
                     oracle_solve, solve_closed_form, verify_candidate)
from .subspace import (CorrelationReport, IsacSubspace, OrthoBasis, corr_coeff, isac_basis,
                       normalize_reports, nu1_sq_closed, ortho_basis)

__version__ = "0.1.0"
