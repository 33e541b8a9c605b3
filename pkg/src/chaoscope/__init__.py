"""Numerical detection of Li-Yorke, mean Li-Yorke and distributional chaos for
linear operators on sequence spaces and integer endomorphisms of tori."""

__version__ = "0.1.0"

from ._backend import backend_name
from .classify import ClassifierConfig, PointVerdict, classify_pair, classify_point
from .criteria import (
    ProbeSet,
    absolutely_cesaro_bounded,
    check_DC_criterion,
    check_LY_criterion,
    check_mean_LY_criterion,
    construct_irregular_manifold,
    distributional_sensitivity_probe,
    equicontinuity_dichotomy,
    search_irregular,
)
from .density import NatSubset, density_profile, extract_density_one_subset
from .operators import apply, orbit_oracle, parse_operator
from .orbit import OrbitTrace, pair_trace, trace
from .spaces import (
    LazyVector,
    MetricSpec,
    TorusPoint,
    evaluate_metric,
    parse_metric,
    parse_vector,
    torus_reduce,
)
from .verdict import Status, Verdict

__all__ = [
    "ClassifierConfig",
    "LazyVector",
    "MetricSpec",
    "NatSubset",
    "OrbitTrace",
    "PointVerdict",
    "ProbeSet",
    "Status",
    "TorusPoint",
    "Verdict",
    "absolutely_cesaro_bounded",
    "apply",
    "backend_name",
    "check_DC_criterion",
    "check_LY_criterion",
    "check_mean_LY_criterion",
    "classify_pair",
    "classify_point",
    "construct_irregular_manifold",
    "density_profile",
    "distributional_sensitivity_probe",
    "equicontinuity_dichotomy",
    "evaluate_metric",
    "extract_density_one_subset",
    "orbit_oracle",
    "pair_trace",
    "parse_metric",
    "parse_operator",
    "parse_vector",
    "search_irregular",
    "torus_reduce",
    "trace",
]
