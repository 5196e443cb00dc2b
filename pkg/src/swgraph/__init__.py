"""Graph-based well-balanced, invariant-domain-preserving shallow water solver."""

from .state import Fields, PhysConstants, dry_clamp, entropy_flat, entropy_flux_flat, \
    grad_entropy_flat, physical_flux, regularized_velocity
from .meshgraph import MeshGraph, build_interval_mesh, build_quad_mesh
from .riemann import bar_state, exact_riemann_max_speed, max_wave_speed
from .low_order import CFLViolation, SourceConfig, low_order_update
from .limiting import LimiterBounds, compute_bounds, final_update, limit_depth, limit_velocity
from .timestepping import ErkScheme, ErkStepper, SolverOptions, builtin_scheme, \
    compute_time_step, erk_step, scheme_names
from .boundary import BoundaryCondition, BoundaryData, apply_dirichlet, \
    apply_nonreflecting, apply_reflecting, flow_regime
from .scenarios import Scenario, error_norm, get_scenario, scenario_names

__version__ = "0.1.0"
