"""Ergodic-capacity evaluation for THz point-to-point links under
deterministic path loss, molecular absorption, misalignment fading, and
alpha-mu multipath fading.

Three mutually cross-validating evaluation paths: a Fox H-function closed
form, direct quadrature of the capacity integral, and Monte-Carlo
simulation.
"""

from .absorption import ConstantAbsorption, TableAbsorption, bundled_table_path, kappa_lookup
from .capacity import (
    CapacityResult,
    TheoremConstants,
    build_constants,
    capacity_closed_form,
    capacity_monte_carlo,
    capacity_quadrature,
    snr_instant,
)
from .channel import (
    SPEED_OF_LIGHT,
    AlphaMuParams,
    Environment,
    LinkParams,
    MisalignmentGeometry,
    absorption_gain,
    alpha_mu_pdf,
    composite_pdf,
    composite_pdf_numeric,
    derive_misalignment,
    deterministic_gain,
    free_space_gain,
    hp_of_r,
    hp_pdf,
    sample_alpha_mu,
    sample_radial,
)
from .config import ScenarioConfig, build_scenario, parse_config_file
from .errors import (
    AccuracyError,
    ConfigError,
    TableFormatError,
    UnsupportedParametersError,
)
from .specfun import (
    ContourPlan,
    FoxHSpec,
    fox_h,
    gauss_2f1_log1p,
    log_gamma_complex,
    lower_incomplete_gamma,
    meijer_g,
    plan_contour,
    upper_incomplete_gamma,
)
from .sweep import (
    AxisSpec,
    SweepSpec,
    parse_axis,
    report_percent_change,
    run_point,
    run_sweep,
)

__version__ = "0.1.0"
