"""Steady-state entanglement of a four-mode optomechanical system."""
from .errors import (DomainError, InvalidParameterError, NumericalError, OptoentError,
                     ResourceError, UnstableSystemError)
from .model import (BASIS_LABELS, DEFAULT_BASIS, EPR_BASIS, QuadratureBasis, StateSpaceModel,
                    SystemParams, bogoliubov_transform, build_diffusion, build_drift,
                    build_model, change_basis, embed_transform, epr_model, epr_transform,
                    thermal_occupancy)
from .steady_state import (CovarianceMatrix, StabilityReport, analytic_threshold,
                           check_stability, integrate_covariance, lyapunov_residual,
                           residual_bound, solve_lyapunov, symplectic_eigenvalues)
from .entanglement import (EntanglementReport, TwoModeCovariance, analyze_pair, duan_sums,
                           epr_covariance, extract_pair, log_negativity, transform_covariance)
from .sweep import SweepRow, SweepSpec, figure_preset, run_sweep

__version__ = "0.1.0"
