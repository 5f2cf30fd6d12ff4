"""Two-color ghost interference simulator.

Three independent views of the same experiment: an exact complex-Gaussian
engine (`engine`), an FFT grid oracle (`oracle`), and fringe measurement on
sampled patterns (`analysis`).  `cli` wires them into the ``ghostsim``
command.
"""

from .analysis import (
    BucketCurve,
    FringeReport,
    PatternComparison,
    compare_patterns,
    extract_fringes,
    fringe_visibility,
    visibility_vs_bucket,
)
from .engine import (
    FringeWidths,
    JointDensity,
    RegimeReport,
    Scenario,
    SlitResult,
    Uncertainties,
    apply_double_slit,
    bucket_average,
    build_source_state,
    coincidence_slice,
    fringe_width,
    joint_density,
    marginal_particle1,
    slit_modes,
    uncertainties,
)
from .errors import (
    AnalysisError,
    ConfigError,
    GhostsimError,
    PhysicsPreconditionError,
    ResourceBoundError,
)
from .gaussian import (
    BiGaussianState,
    CorrelatedGaussian,
    GaussianTerm,
    OpticalDistance,
    ProductTerm,
    evolve_correlated,
    evolve_correlated_exact,
    evolve_free,
    lens_transform,
    normalized_packet,
    overlap,
    project_mode,
)
from .oracle import (
    GridSpec,
    GridState,
    auto_grid,
    density,
    discretize,
    fit_packet,
    grid_slice,
    lens_apply,
    norm_drift,
    propagate,
    run_pipeline,
    slit_project,
)
from .pattern import (
    Pattern,
    read_density_binary,
    read_pattern_csv,
    write_density_binary,
    write_pattern_csv,
)

__version__ = "0.1.0"

__all__ = [
    "AnalysisError",
    "BiGaussianState",
    "BucketCurve",
    "ConfigError",
    "CorrelatedGaussian",
    "FringeReport",
    "FringeWidths",
    "GaussianTerm",
    "GhostsimError",
    "GridSpec",
    "GridState",
    "JointDensity",
    "OpticalDistance",
    "Pattern",
    "PatternComparison",
    "PhysicsPreconditionError",
    "ProductTerm",
    "RegimeReport",
    "ResourceBoundError",
    "Scenario",
    "SlitResult",
    "Uncertainties",
    "apply_double_slit",
    "auto_grid",
    "bucket_average",
    "build_source_state",
    "coincidence_slice",
    "compare_patterns",
    "density",
    "discretize",
    "evolve_correlated",
    "evolve_correlated_exact",
    "evolve_free",
    "extract_fringes",
    "fit_packet",
    "fringe_visibility",
    "fringe_width",
    "grid_slice",
    "joint_density",
    "lens_apply",
    "lens_transform",
    "marginal_particle1",
    "norm_drift",
    "normalized_packet",
    "overlap",
    "project_mode",
    "propagate",
    "read_density_binary",
    "read_pattern_csv",
    "run_pipeline",
    "slit_modes",
    "slit_project",
    "uncertainties",
    "visibility_vs_bucket",
    "write_density_binary",
    "write_pattern_csv",
]
