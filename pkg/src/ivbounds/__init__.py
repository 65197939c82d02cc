"""Exact symbolic bounds on causal effects in binary instrumental-variable models.

The pipeline: enumerate the 0/1 vertices of the latent parameter space,
push them through a scenario's observable transform, enumerate the facets
of the convex hull of the images, then split the facets into model tests
and sharp lower/upper bounds on the causal target. An independent
exact-rational linear-programming oracle cross-checks every derived bound.
"""

from .forms import (
    AffineForm,
    CoordinateSpace,
    IdenticallyFalse,
    LinearConstraint,
    MissingCoordinate,
    Rational,
    Relation,
    canonicalize,
    format_decimal,
    format_rational,
    parse_constraint,
    rational,
)
from .polytope import (
    AffineHull,
    DimensionOverflow,
    HRepresentation,
    MembershipReport,
    VertexSet,
    affine_hull,
    facet_enumeration,
    reduce_mod_equalities,
)
from .scenarios import (
    SCENARIOS,
    ParameterPoint,
    Scenario,
    UnsupportedCoordinateError,
    coordinate_function,
    enumerate_parameter_vertices,
    get_scenario,
    make_scenario,
    random_parameter_point,
    scenario_vertex_set,
    xi_transform,
)
from .data import (
    MissingArmWeights,
    ObservedTables,
    build_tables,
    ParseError,
    ValidationError,
    derive_marginals,
    load,
    observable_point,
    renormalize,
    save,
    serialize,
)
from .bounds import (
    BoundSet,
    ConstraintReport,
    InstrumentalReport,
    Interval,
    TargetUnconstrained,
    beta_bounds,
    derive,
    evaluate_bounds,
    instrumental_inequality,
    model_check,
    partition,
    scenario_hull,
)
from .oracle import (
    CrossCheckReport,
    LPResult,
    MismatchError,
    MixtureLP,
    cross_check,
    oracle_interval,
    solve,
)

__version__ = "0.1.0"

__all__ = [
    "AffineForm",
    "AffineHull",
    "BoundSet",
    "ConstraintReport",
    "CoordinateSpace",
    "CrossCheckReport",
    "DimensionOverflow",
    "HRepresentation",
    "IdenticallyFalse",
    "InstrumentalReport",
    "Interval",
    "LPResult",
    "LinearConstraint",
    "MembershipReport",
    "MismatchError",
    "MissingArmWeights",
    "MissingCoordinate",
    "MixtureLP",
    "ObservedTables",
    "ParameterPoint",
    "ParseError",
    "Rational",
    "Relation",
    "SCENARIOS",
    "Scenario",
    "TargetUnconstrained",
    "UnsupportedCoordinateError",
    "ValidationError",
    "VertexSet",
    "affine_hull",
    "beta_bounds",
    "build_tables",
    "canonicalize",
    "coordinate_function",
    "cross_check",
    "derive",
    "derive_marginals",
    "enumerate_parameter_vertices",
    "evaluate_bounds",
    "facet_enumeration",
    "format_decimal",
    "format_rational",
    "get_scenario",
    "instrumental_inequality",
    "load",
    "make_scenario",
    "model_check",
    "observable_point",
    "oracle_interval",
    "parse_constraint",
    "partition",
    "random_parameter_point",
    "rational",
    "reduce_mod_equalities",
    "renormalize",
    "save",
    "scenario_hull",
    "scenario_vertex_set",
    "serialize",
    "solve",
    "xi_transform",
]
