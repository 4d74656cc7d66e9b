"""Volume-preserving curvature flow of radial tubes over geodesic balls.

The package splits into pure layers: symspace (ambient-space kernels and the
preset catalog), grid (profiles and stencils), quadrature (integration and
root finding), tubegeom (curvatures, volumes, static bounds), diagnostics
(pointwise extras, the base-ball operator, residual audits), flow (the time
stepper, monitors, markers, steady-shape search), and harness (the CLI, the
only module with I/O).
"""

from .diagnostics import (
    AUDIT_IDS,
    AuditContext,
    PointDiagnostics,
    ResidualReport,
    lambda_fn,
    laplace_beltrami_radial,
    lb_cell_measures,
    phi_kappa_phi,
    principal_curvatures_diag,
    residual_audit,
    u_hat,
    v_hat,
)
from .flow import (
    FlowConfig,
    FlowError,
    FlowOutcome,
    FlowState,
    Marker,
    MonitorInputs,
    RunResult,
    build_audit_context,
    cfl_dt,
    cmc_search,
    cmc_self_check,
    constant_cmc_radius,
    make_state,
    marker_step,
    run,
    step,
)
from .grid import (
    GridError,
    RadialProfile,
    constant_profile,
    cosine_profile,
    cubic_interp,
    derivative_arrays,
    derivatives,
    profile_from_values,
)
from .harness import ConfigError, RunConfig, main, parse_config
from .quadrature import QuadratureError
from .symspace import (
    CatalogEntry,
    SpaceError,
    SpaceParams,
    catalog_entries,
    catalog_lookup,
    ct,
    focal_radius,
    sc,
    ss,
    tt,
)
from .tubegeom import (
    BoundsReport,
    PointData,
    TubeGeomError,
    avg_h,
    bounds_report,
    delta1,
    delta2,
    delta_inv,
    f_density,
    f_density_log_deriv,
    laplacian_radial,
    mean_curvature,
    mean_curvature_values,
    psi,
    psi0_values,
    psi_bar,
    rho,
    rho_values,
    unit_sphere_volume,
    vhat_values,
    vol_b,
    vol_d,
    vol_m,
)

__version__ = "0.1.0"

__all__ = [
    "AUDIT_IDS",
    "AuditContext",
    "BoundsReport",
    "CatalogEntry",
    "ConfigError",
    "FlowConfig",
    "FlowError",
    "FlowOutcome",
    "FlowState",
    "GridError",
    "Marker",
    "MonitorInputs",
    "PointData",
    "PointDiagnostics",
    "QuadratureError",
    "RadialProfile",
    "ResidualReport",
    "RunConfig",
    "RunResult",
    "SpaceError",
    "SpaceParams",
    "TubeGeomError",
    "avg_h",
    "bounds_report",
    "build_audit_context",
    "catalog_entries",
    "catalog_lookup",
    "cfl_dt",
    "cmc_search",
    "cmc_self_check",
    "constant_cmc_radius",
    "constant_profile",
    "cosine_profile",
    "ct",
    "cubic_interp",
    "delta1",
    "delta2",
    "delta_inv",
    "derivative_arrays",
    "derivatives",
    "f_density",
    "f_density_log_deriv",
    "focal_radius",
    "lambda_fn",
    "laplace_beltrami_radial",
    "laplacian_radial",
    "lb_cell_measures",
    "main",
    "make_state",
    "marker_step",
    "mean_curvature",
    "mean_curvature_values",
    "parse_config",
    "phi_kappa_phi",
    "principal_curvatures_diag",
    "profile_from_values",
    "psi",
    "psi0_values",
    "psi_bar",
    "residual_audit",
    "rho",
    "rho_values",
    "run",
    "sc",
    "ss",
    "step",
    "tt",
    "u_hat",
    "unit_sphere_volume",
    "v_hat",
    "vhat_values",
    "vol_b",
    "vol_d",
    "vol_m",
]
