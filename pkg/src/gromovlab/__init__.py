"""Finite-sample experiments on Gromov hyperbolicity of metric transforms.

Brute-force δ and ultrametric defects of finite metric spaces, a catalog of
transforms φ, concave-function tools and a classifier for the
approximate-dilation / logarithm-like dichotomy.
"""
from ._backend import BACKEND, BACKENDS
from .classify import ClassificationReport, Thresholds, Verdict, classify_transform
from .concave_lab import (
    cap_construction,
    envelope_gap,
    hyp_condition_defect,
    lambda_estimate,
    least_concave_majorant,
    midconcavity_defect,
    omega,
    omega_hat,
    one_sided_derivative,
)
from .errors import (
    BoundedTransform,
    BracketFailure,
    CannotPerturb,
    GromovLabError,
    InvalidRange,
    MetricSpaceError,
    TransformNotMetricOnThisSpace,
    TransformSpecError,
)
from .experiments import (
    delta_sweep,
    embed_halfline_check,
    perturbed_similarity,
    random_metric_space,
    rough_isometry_defect,
    rough_midpoint_defect,
    sample_halfline,
    transformed_halfline_space,
)
from .metric_core import (
    FiniteMetricSpace,
    HyperbolicityReport,
    Method,
    UltrametricReport,
    hyperbolicity_delta,
    triangle_defect,
    ultrametric_defect,
)
from .transforms import (
    AffineSine,
    Dilation,
    GridSpec,
    LinearPlusCap,
    LogOnePlus,
    Scaled,
    Snowflake,
    Tabulated,
    apply_transform,
    parse_grid,
    parse_transform,
)

__version__ = "0.1.0"
