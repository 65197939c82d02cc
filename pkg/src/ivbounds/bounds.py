"""Partition facet systems into model tests and causal-effect bounds, and evaluate them.

A facet of the hull of transformed parameter vertices either constrains
the observables alone (a falsification test of the model) or involves the
causal target, in which case solving for the target turns it into a sharp
lower or upper bound. Trivial observable facets (equivalent, modulo the
hull equalities, to a single coordinate being nonnegative) are kept apart
from the informative ones so reports mirror the usual presentation.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Mapping, Sequence

from .data import ObservedTables, ValidationError, observable_point
from .forms import (
    AffineForm,
    CoordinateSpace,
    LinearConstraint,
    RationalLike,
    Relation,
    canonicalize,
    rational,
)
from .polytope import HRepresentation, facet_enumeration, reduce_mod_equalities
from .scenarios import Scenario, get_scenario, scenario_vertex_set

_ZERO = Fraction(0)
_ONE = Fraction(1)

DECIMAL_TOLERANCE = Fraction(1, 2000)


class TargetUnconstrained(ValueError):
    """No facet or equality involves the requested target coordinate."""


@dataclass(frozen=True)
class BoundSet:
    """Bounds on one target plus the observable constraints beside them.

    lower_forms and upper_forms are affine functions of the observables:
    target >= each lower form and target <= each upper form. All forms and
    constraints are reduced modulo the hull equalities, so two expressions
    that agree on every model-consistent table compare equal.
    """

    scenario: str
    target: str
    space: CoordinateSpace
    lower_forms: tuple[AffineForm, ...]
    upper_forms: tuple[AffineForm, ...]
    observable_tests: tuple[LinearConstraint, ...]
    trivial_tests: tuple[LinearConstraint, ...]
    hull_equalities: tuple[LinearConstraint, ...]

    def to_json_dict(self) -> dict:
        def form_dict(f: AffineForm) -> dict:
            from .forms import format_rational

            return {
                "coeffs": {lab: format_rational(c) for lab, c in f.as_dict().items()},
                "const": format_rational(f.constant),
            }

        def con_list(cons: Sequence[LinearConstraint]) -> list[dict]:
            return [dict(form_dict(c.form), relation=c.relation.value) for c in cons]

        return {
            "scenario": self.scenario,
            "target": self.target,
            "labels": list(self.space.labels),
            "lower": [form_dict(f) for f in self.lower_forms],
            "upper": [form_dict(f) for f in self.upper_forms],
            "observable_tests": con_list(self.observable_tests),
            "trivial_tests": con_list(self.trivial_tests),
            "hull_equalities": con_list(self.hull_equalities),
        }


def classify_observable(
    h: HRepresentation,
) -> tuple[tuple[LinearConstraint, ...], tuple[LinearConstraint, ...]]:
    """Split facets with no target involvement into (nontrivial, trivial).

    A facet is trivial when, modulo the hull equalities, it says nothing
    more than "some coordinate is nonnegative".
    """
    trivial_keys = set()
    for label in h.space.labels:
        nonneg = AffineForm.coordinate(h.space, label)
        reduced = reduce_mod_equalities(nonneg, h.equalities)
        key = canonicalize(LinearConstraint(reduced, Relation.GEQ)).form.key()
        trivial_keys.add(key)
    nontrivial: list[LinearConstraint] = []
    trivial: list[LinearConstraint] = []
    for facet in h.facets:
        reduced = reduce_mod_equalities(facet.form, h.equalities)
        con = canonicalize(LinearConstraint(reduced, Relation.GEQ))
        if con.form.key() in trivial_keys:
            trivial.append(con)
        else:
            nontrivial.append(con)
    return tuple(nontrivial), tuple(trivial)


def _drop_coordinate(form: AffineForm, space: CoordinateSpace, drop: str) -> AffineForm:
    di = form.space.index(drop)
    assert form.coefficients[di] == 0
    coeffs = tuple(c for i, c in enumerate(form.coefficients) if i != di)
    return AffineForm(space, coeffs, form.constant)


def partition(h: HRepresentation, target: str) -> BoundSet:
    """Split an H-representation into observable tests and target bounds.

    Facets with positive target coefficient become lower bounds on the
    target, negative ones upper bounds; target-free facets become model
    tests. A hull equality involving the target is solved for it and
    contributes one matched lower/upper pair. If nothing mentions the
    target at all, effect-difference targets (alpha, beta) fall back to
    their trivial range [-1, 1]; any other target raises
    TargetUnconstrained.
    """
    ti = h.space.index(target)
    obs_labels = tuple(l for l in h.space.labels if l != target)
    obs_space = CoordinateSpace(f"{h.space.name}-observables", obs_labels)

    lower: list[AffineForm] = []
    upper: list[AffineForm] = []
    observable_facets: list[LinearConstraint] = []
    hull_eqs: list[LinearConstraint] = []

    def to_obs(form: AffineForm) -> AffineForm:
        return _drop_coordinate(form, obs_space, target)

    obs_only = []
    for facet in h.facets:
        reduced = reduce_mod_equalities(facet.form, h.equalities)
        c = reduced.coefficients[ti]
        if c == 0:
            obs_only.append(canonicalize(LinearConstraint(reduced, Relation.GEQ)))
        elif c > 0:
            rest = reduced - AffineForm.coordinate(h.space, target).scaled(c)
            lower.append(to_obs(rest.scaled(-_ONE / c)))
        else:
            rest = reduced - AffineForm.coordinate(h.space, target).scaled(c)
            upper.append(to_obs(rest.scaled(-_ONE / c)))

    for eq in h.equalities:
        c = eq.form.coefficients[ti]
        if c == 0:
            hull_eqs.append(
                canonicalize(LinearConstraint(to_obs(eq.form), Relation.EQ))
            )
        else:
            rest = eq.form - AffineForm.coordinate(h.space, target).scaled(c)
            solved = to_obs(rest.scaled(-_ONE / c))
            lower.append(solved)
            upper.append(solved)

    sub_h = HRepresentation(h.space, h.equalities, tuple(obs_only), h.affine_dimension)
    nontrivial, trivial = classify_observable(sub_h)
    nontrivial = tuple(
        canonicalize(LinearConstraint(to_obs(c.form), Relation.GEQ)) for c in nontrivial
    )
    trivial = tuple(
        canonicalize(LinearConstraint(to_obs(c.form), Relation.GEQ)) for c in trivial
    )

    if not lower and not upper:
        if target in ("alpha", "beta"):
            lower.append(AffineForm.const(obs_space, -1))
            upper.append(AffineForm.const(obs_space, 1))
        else:
            raise TargetUnconstrained(f"no facet or equality involves {target!r}")

    return BoundSet(
        scenario=h.space.name,
        target=target,
        space=obs_space,
        lower_forms=tuple(lower),
        upper_forms=tuple(upper),
        observable_tests=nontrivial,
        trivial_tests=trivial,
        hull_equalities=tuple(hull_eqs),
    )


@lru_cache(maxsize=None)
def scenario_hull(name: str, include_target: bool = True) -> HRepresentation:
    """Facet system of a named scenario's vertex images (cached)."""
    scenario = get_scenario(name)
    return facet_enumeration(scenario_vertex_set(scenario, include_target=include_target))


@lru_cache(maxsize=None)
def derive(name: str) -> BoundSet:
    """Full pipeline for a named scenario: vertices, hull, partition (cached)."""
    scenario = get_scenario(name)
    if scenario.causal_target is None:
        raise TargetUnconstrained(
            f"scenario {name!r} has no causal target; use scenario_hull for its geometry"
        )
    return partition(scenario_hull(name), scenario.causal_target)


@dataclass(frozen=True)
class Interval:
    """The bound interval at one data point, with binding-form witnesses."""

    lower: Fraction
    upper: Fraction
    lower_witness: int
    upper_witness: int
    empty: bool


def _as_point(
    space: CoordinateSpace, data: ObservedTables | Mapping[str, RationalLike]
) -> dict[str, Fraction]:
    if isinstance(data, ObservedTables):
        return observable_point(space.labels, data)
    return {k: rational(v) for k, v in data.items()}


def evaluate_bounds(
    bs: BoundSet, data: ObservedTables | Mapping[str, RationalLike]
) -> Interval:
    """Evaluate all bound forms at a data point and take max/min.

    Ties keep the earliest form in the deterministic derivation order.
    An inverted interval is flagged empty, not raised: emptiness is a
    statement about the data, not a usage error.
    """
    point = _as_point(bs.space, data)
    lows = [f.evaluate(point) for f in bs.lower_forms]
    highs = [f.evaluate(point) for f in bs.upper_forms]
    lo = max(lows)
    hi = min(highs)
    return Interval(
        lower=lo,
        upper=hi,
        lower_witness=lows.index(lo),
        upper_witness=highs.index(hi),
        empty=lo > hi,
    )


@dataclass(frozen=True)
class CheckEntry:
    section: str
    index: int
    constraint: LinearConstraint
    slack: Fraction
    passed: bool


@dataclass(frozen=True)
class ConstraintReport:
    scenario: str
    tolerance: Fraction
    entries: tuple[CheckEntry, ...]
    passed: bool

    def failures(self) -> tuple[CheckEntry, ...]:
        return tuple(e for e in self.entries if not e.passed)


def default_tolerance(data: ObservedTables | Mapping) -> Fraction:
    """Zero for exact input; a half-unit in the fourth decimal for rounded tables."""
    if isinstance(data, ObservedTables) and data.decimal_input:
        return DECIMAL_TOLERANCE
    return _ZERO


def model_check(
    bs: BoundSet | HRepresentation,
    data: ObservedTables | Mapping[str, RationalLike],
    tolerance: RationalLike | None = None,
) -> ConstraintReport:
    """Exact falsification check of the observable constraints.

    Every observable test, hull equality and trivial constraint is
    evaluated at the data point; inequalities pass with slack >= -tol,
    equalities with |slack| <= tol. A bare HRepresentation (a scenario
    with no causal target, so no BoundSet) is accepted too.
    """
    tol = default_tolerance(data) if tolerance is None else rational(tolerance)
    if isinstance(bs, HRepresentation):
        nontrivial, trivial = classify_observable(bs)
        scenario = bs.space.name
        space = bs.space
        sections = (
            ("observable", nontrivial),
            ("equality", bs.equalities),
            ("trivial", trivial),
        )
    else:
        scenario = bs.scenario
        space = bs.space
        sections = (
            ("observable", bs.observable_tests),
            ("equality", bs.hull_equalities),
            ("trivial", bs.trivial_tests),
        )
    point = _as_point(space, data)
    entries: list[CheckEntry] = []
    for section, cons in sections:
        for i, con in enumerate(cons):
            s = con.slack(point)
            ok = abs(s) <= tol if con.relation is Relation.EQ else s >= -tol
            entries.append(CheckEntry(section, i, con, s, ok))
    return ConstraintReport(
        scenario=scenario,
        tolerance=tol,
        entries=tuple(entries),
        passed=all(e.passed for e in entries),
    )


@dataclass(frozen=True)
class InstrumentalReport:
    """Per-treatment-arm sums of the instrumental inequality."""

    b_sums: tuple[Fraction, Fraction]
    maximum: Fraction
    tolerance: Fraction
    passed: bool


def instrumental_inequality(
    data: ObservedTables, tolerance: RationalLike | None = None
) -> InstrumentalReport:
    """max_b sum_c max_a P(C=c, B=b | A=a) <= 1, the classic necessary test."""
    if data.zeta is None:
        raise ValidationError("the instrumental inequality needs a zeta table")
    tol = default_tolerance(data) if tolerance is None else rational(tolerance)
    sums = []
    for b in (0, 1):
        total = _ZERO
        for c in (0, 1):
            total += max(data.zeta[(c, b, 1)], data.zeta[(c, b, 2)])
        sums.append(total)
    maximum = max(sums)
    return InstrumentalReport(
        b_sums=(sums[0], sums[1]),
        maximum=maximum,
        tolerance=tol,
        passed=maximum <= 1 + tol,
    )


def beta_bounds(data: ObservedTables | Mapping[str, RationalLike]) -> Interval:
    """Closed-form sharp bounds on the assignment effect from theta alone.

    max(-t01 - t02, -t11 - t12) <= beta <= min(t01 + t02, t11 + t12).
    """
    space = get_scenario("beta").observable_space
    point = _as_point(space, data)
    t01, t11 = point["t01"], point["t11"]
    t02, t12 = point["t02"], point["t12"]
    lows = [-t01 - t02, -t11 - t12]
    highs = [t01 + t02, t11 + t12]
    lo, hi = max(lows), min(highs)
    return Interval(
        lower=lo,
        upper=hi,
        lower_witness=lows.index(lo),
        upper_witness=highs.index(hi),
        empty=lo > hi,
    )
