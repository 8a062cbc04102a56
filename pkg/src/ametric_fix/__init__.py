"""Arity-t metric spaces, branch-contraction certificates, and certified
fixed-point solving by Picard iteration."""

from .core import (
    AMetricSpace,
    Box,
    CheckReport,
    FiniteCarrier,
    Violation,
    check_axioms,
    check_symmetry,
    check_triangle_inequality,
    evaluate,
    points_equal,
    rep_distance,
)
from .errors import AMetricError, CarrierDomainError, ConstructionError, UsageError
from .sampling import SampleSet, axiom_samples, pair_samples, start_samples, triple_samples
from .solver import (
    PicardTrace,
    StopRule,
    brute_force_fixed_points,
    picard_run,
    tail_bound,
    uniqueness_probe,
    verify_cauchy,
    verify_decay,
)
from .spaces import (
    MapSpec,
    SelfMap,
    default_catalog,
    make_absdiff_space,
    make_lifted_space,
    make_map,
    table_space,
)
from .zamfirescu import (
    BranchConstants,
    ZamfirescuCertificate,
    branch_constants,
    classify,
    compute_delta,
    verify_contraction_inequalities,
)

__version__ = "0.1.0"

__all__ = [
    "AMetricError",
    "AMetricSpace",
    "Box",
    "BranchConstants",
    "CarrierDomainError",
    "CheckReport",
    "ConstructionError",
    "FiniteCarrier",
    "MapSpec",
    "PicardTrace",
    "SampleSet",
    "SelfMap",
    "StopRule",
    "UsageError",
    "Violation",
    "ZamfirescuCertificate",
    "axiom_samples",
    "branch_constants",
    "brute_force_fixed_points",
    "check_axioms",
    "check_symmetry",
    "check_triangle_inequality",
    "classify",
    "compute_delta",
    "default_catalog",
    "evaluate",
    "make_absdiff_space",
    "make_lifted_space",
    "make_map",
    "pair_samples",
    "picard_run",
    "points_equal",
    "rep_distance",
    "start_samples",
    "table_space",
    "tail_bound",
    "triple_samples",
    "uniqueness_probe",
    "verify_cauchy",
    "verify_contraction_inequalities",
    "verify_decay",
]
