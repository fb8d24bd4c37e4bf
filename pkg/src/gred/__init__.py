"""Generalized RED queue dynamics toolkit.

Models the averaged queue length of a RED-controlled router buffer as a
one-dimensional discrete-time map, with a beta-law drop probability
adding two shape knobs to the classic linear ramp.  Provides fixed-point
and global-stability certification, Li-Yorke chaos certificates,
Lyapunov exponents, and bifurcation/robustness parameter sweeps.
"""

from .chaos import (
    LYAPUNOV_SAMPLES,
    LiYorkeCertificate,
    OrbitConfig,
    iterate,
    li_yorke_certificate,
    lyapunov,
)
from .classic import (
    ClassicControls,
    SystemParams,
    avg_queue_empty,
    avg_queue_full,
    avg_queue_step,
    controls_feasible,
    drop_prob_empty,
    drop_prob_full,
    drop_probability,
    ewma_update,
    next_queue,
    throughput,
)
from .errors import ConfigError, ConstraintError, DomainError, GredError
from .model import (
    ControlParams,
    FixedPoint,
    NormalizedModel,
    dimensionless_constants,
    make_model,
    normalize,
)
from .special import (
    BetaShape,
    beta_density,
    density_cdf_ratio,
    inc_beta,
    inc_beta_inv,
    log_density_slope,
)
from .stability import (
    Certificate,
    ShapeClass,
    ShapeKind,
    StabilityVerdict,
    classify_shape,
    convexity_pointwise,
    convexity_sufficient,
    core_invariant,
    endpoints_not_2cycle,
    verdict,
)
from .sweep import (
    BifRow,
    GridCell,
    ModelSpec,
    SweepAxis,
    WBifScan,
    alpha_beta_grid,
    bifurcation_sweep,
    w_bif,
    w_bif_status,
    write_bif_csv,
    write_grid_csv,
)

__version__ = "0.1.0"

__all__ = [
    "BetaShape",
    "BifRow",
    "Certificate",
    "ClassicControls",
    "ConfigError",
    "ConstraintError",
    "ControlParams",
    "DomainError",
    "FixedPoint",
    "GredError",
    "GridCell",
    "LYAPUNOV_SAMPLES",
    "LiYorkeCertificate",
    "ModelSpec",
    "NormalizedModel",
    "OrbitConfig",
    "ShapeClass",
    "ShapeKind",
    "StabilityVerdict",
    "SweepAxis",
    "SystemParams",
    "WBifScan",
    "alpha_beta_grid",
    "avg_queue_empty",
    "avg_queue_full",
    "avg_queue_step",
    "beta_density",
    "bifurcation_sweep",
    "classify_shape",
    "controls_feasible",
    "convexity_pointwise",
    "convexity_sufficient",
    "core_invariant",
    "density_cdf_ratio",
    "dimensionless_constants",
    "drop_prob_empty",
    "drop_prob_full",
    "drop_probability",
    "endpoints_not_2cycle",
    "ewma_update",
    "inc_beta",
    "inc_beta_inv",
    "iterate",
    "li_yorke_certificate",
    "log_density_slope",
    "lyapunov",
    "make_model",
    "next_queue",
    "normalize",
    "throughput",
    "verdict",
    "w_bif",
    "w_bif_status",
    "write_bif_csv",
    "write_grid_csv",
]
