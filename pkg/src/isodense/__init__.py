"""Numerical toolkit for the isoperimetric problem in R^n with radial
power density: curve shooting, geometric measures, and spherical
symmetrization."""

from .geometry import (
    CanonicalCircle,
    RadialDensity,
    canonical_circle,
    h0,
    h1_value,
    hf,
    lambda_from_state,
    sphere_area,
    theta,
)
from .circles import (
    AdmissibilityResult,
    OsculatingCircle,
    TildeSample,
    admissible_left,
    admissible_right,
    curvature_comparison_check,
    h1_compare,
    h1_tilde_second_at_top,
    tilde_quantities,
    x_star,
)
from .shooting import (
    Classification,
    FeatureReport,
    ShotConfig,
    ShotCurve,
    ShotOutcome,
    ShotTolerances,
    classify,
    curvature_rhs,
    curve_to_csv,
    extract_features,
    find_closing_kappa0,
    hf_residual,
    init_shot,
    integrate,
    read_curve_csv,
    summary_record,
)
from .measures import (
    IsoperimetricComparison,
    MeasurePair,
    centered_sphere_measures,
    isoperimetric_compare,
    origin_sphere_measures,
    revolve_measures,
)
from .symmetrization import (
    PolarRaster,
    cap_angle,
    cap_fraction,
    raster_measures,
    rasterize,
    read_raster,
    symmetrize,
    write_raster,
)
from .verify import (
    CheckReport,
    check_case_features,
    check_constant_gmc_on_circle,
    check_rp_uniqueness,
    check_tangent_restriction,
    run_suite,
)

__version__ = "0.1.0"
