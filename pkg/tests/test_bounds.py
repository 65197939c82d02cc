"""Partition of facet systems into tests and bounds, and their evaluation.

The fixture lists below are the published bound expressions for the
bivariate and trivariate observable schemes (the trivariate ones agree
with Balke and Pearl 1997). Derived and fixture forms are compared as
sets after reduction modulo the hull equalities, which makes the
comparison independent of which representative of each bound the
derivation happens to print.
"""

from fractions import Fraction

import pytest

from ivbounds.bounds import (
    BoundSet,
    TargetUnconstrained,
    beta_bounds,
    classify_observable,
    derive,
    evaluate_bounds,
    instrumental_inequality,
    model_check,
    partition,
    scenario_hull,
)
from ivbounds.data import build_tables, load, observable_point
from ivbounds.forms import (
    AffineForm,
    CoordinateSpace,
    LinearConstraint,
    Relation,
    canonicalize,
)
from ivbounds.polytope import HRepresentation, reduce_mod_equalities

BIVARIATE_LOWER = [
    "2*g01 - g02 + 2*t01 - 3",
    "g01 + t01 - 2",
    "g02 + t02 - 2",
    "-g01 + 2*g02 + 2*t02 - 3",
    "-g01 + g02 - t01 + t02 - 1",
    "-g01 - t01",
    "-g02 - t02",
    "g01 - 2*g02 - 2*t02",
    "-2*g01 + g02 - 2*t01",
    "g01 - g02 + t01 - t02 - 1",
]
BIVARIATE_UPPER = [
    "-2*g01 + g02 + 2*t01 + 1",
    "g01 - 2*g02 + 2*t02 + 1",
    "2*g01 - g02 - 2*t01 + 2",
    "-g01 + 2*g02 - 2*t02 + 2",
    "g01 - g02 - t01 + t02 + 1",
    "-g02 + t02 + 1",
    "g01 - t01 + 1",
    "g02 - t02 + 1",
    "-g01 + t01 + 1",
    "-g01 + g02 + t01 - t02 + 1",
]
BIVARIATE_TESTS = [
    "t01 + t02 - g01 + g02",
    "t01 + t02 + g01 - g02",
    "t11 + t12 - g01 + g02",
    "t11 + t12 + g01 - g02",
]

TRIVARIATE_LOWER = [
    "z00.1 + z11.2 - 1",
    "z11.1 + z00.2 - 1",
    "-z01.1 - z10.1 + z11.1 - z10.2 - z11.2",
    "-z10.1 - z11.1 - z01.2 - z10.2 + z11.2",
    "-z01.1 - z10.1",
    "-z01.2 - z10.2",
    "-z00.1 - z01.1 + z00.2 - z01.2 - z10.2",
    "z00.1 - z01.1 - z10.1 - z00.2 - z01.2",
]
TRIVARIATE_UPPER = [
    "1 - z10.1 - z01.2",
    "1 - z01.1 - z10.2",
    "z00.1 - z01.1 + z11.1 + z00.2 + z01.2",
    "z00.1 + z01.1 - z01.2 + z00.2 + z11.2",
    "z00.1 + z11.1",
    "z00.2 + z11.2",
    "z10.1 + z11.1 + z00.2 + z11.2 - z10.2",
    "z00.1 - z10.1 + z11.1 + z10.2 + z11.2",
]
TRIVARIATE_TESTS = [
    "1 - z00.1 - z10.2",
    "1 - z10.1 - z00.2",
    "1 - z11.1 - z01.2",
    "1 - z01.1 - z11.2",
]


def reduced_form_keys(bs: BoundSet, forms):
    out = set()
    for f in forms:
        red = reduce_mod_equalities(f, bs.hull_equalities)
        out.add(canonicalize(LinearConstraint(red, Relation.GEQ)).form.key())
    return out


def reduced_string_keys(bs: BoundSet, strings):
    return reduced_form_keys(bs, [AffineForm.parse(bs.space, s) for s in strings])


def reduced_constraint_keys(bs: BoundSet, cons):
    return reduced_form_keys(bs, [c.form for c in cons])


class TestDerivedCounts:
    @pytest.mark.parametrize(
        "name,lower,upper,observable,trivial,eqs",
        [
            ("bivariate", 10, 10, 4, 8, 4),
            ("trivariate", 8, 8, 4, 8, 2),
            ("pairwise3", 37, 37, 56, 12, 5),
            ("beta", 2, 2, 0, 4, 2),
        ],
    )
    def test_partition_counts(self, name, lower, upper, observable, trivial, eqs):
        bs = derive(name)
        assert len(bs.lower_forms) == lower
        assert len(bs.upper_forms) == upper
        assert len(bs.observable_tests) == observable
        assert len(bs.trivial_tests) == trivial
        assert len(bs.hull_equalities) == eqs

    def test_hull_dimensions(self):
        assert scenario_hull("fig3").affine_dimension == 7
        assert scenario_hull("bivariate").affine_dimension == 5
        assert scenario_hull("bivariate", False).affine_dimension == 4
        assert scenario_hull("trivariate").affine_dimension == 7
        assert scenario_hull("pairwise3").affine_dimension == 8
        assert scenario_hull("beta").affine_dimension == 3

    def test_fig3_hull_is_a_simplex(self):
        h = scenario_hull("fig3")
        assert len(h.equalities) == 1
        assert len(h.facets) == 8
        nontrivial, trivial = classify_observable(h)
        assert not nontrivial
        assert len(trivial) == 8

    def test_target_solved_out_everywhere(self):
        for name in ("bivariate", "trivariate", "pairwise3", "beta"):
            bs = derive(name)
            assert bs.target not in bs.space
            for f in bs.lower_forms + bs.upper_forms:
                assert f.space is bs.space
            for c in bs.observable_tests + bs.trivial_tests + bs.hull_equalities:
                assert c.form.space.labels == bs.space.labels

    def test_derive_fig3_raises(self):
        with pytest.raises(TargetUnconstrained):
            derive("fig3")


class TestPublishedForms:
    def test_bivariate_bound_lists(self):
        bs = derive("bivariate")
        assert reduced_form_keys(bs, bs.lower_forms) == reduced_string_keys(bs, BIVARIATE_LOWER)
        assert reduced_form_keys(bs, bs.upper_forms) == reduced_string_keys(bs, BIVARIATE_UPPER)

    def test_bivariate_observable_tests(self):
        bs = derive("bivariate")
        assert reduced_constraint_keys(bs, bs.observable_tests) == reduced_string_keys(
            bs, BIVARIATE_TESTS
        )

    def test_trivariate_bound_lists(self):
        bs = derive("trivariate")
        assert reduced_form_keys(bs, bs.lower_forms) == reduced_string_keys(bs, TRIVARIATE_LOWER)
        assert reduced_form_keys(bs, bs.upper_forms) == reduced_string_keys(bs, TRIVARIATE_UPPER)

    def test_trivariate_observable_tests(self):
        bs = derive("trivariate")
        assert reduced_constraint_keys(bs, bs.observable_tests) == reduced_string_keys(
            bs, TRIVARIATE_TESTS
        )

    def test_absolute_value_formulation_is_equivalent(self):
        """|g01 - g02| <= t01 + t02 <= 2 - |g01 - g02| as four constraints.

        Same accept/reject behavior as the derived observable tests on any
        point of the equality surface, including violating ones.
        """
        import random

        bs = derive("bivariate")
        rng = random.Random(11)
        for _ in range(200):
            g01 = Fraction(rng.randint(0, 20), 20)
            g02 = Fraction(rng.randint(0, 20), 20)
            t01 = Fraction(rng.randint(0, 20), 20)
            t02 = Fraction(rng.randint(0, 20), 20)
            point = {
                "g01": g01, "g11": 1 - g01, "g02": g02, "g12": 1 - g02,
                "t01": t01, "t11": 1 - t01, "t02": t02, "t12": 1 - t02,
            }
            derived_ok = all(c.slack(point) >= 0 for c in bs.observable_tests)
            gap = abs(g01 - g02)
            published_ok = gap <= t01 + t02 <= 2 - gap
            assert derived_ok == published_ok


class TestEvaluate:
    @pytest.mark.parametrize(
        "dataset,scenario,lo,hi",
        [
            ("lipid", "trivariate", Fraction(49, 125), Fraction(39, 50)),
            ("lipid", "bivariate", Fraction(48, 125), Fraction(853, 1000)),
            ("lipid", "pairwise3", Fraction(97, 250), Fraction(851, 1000)),
            ("vitamin-a", "trivariate", Fraction(-973, 5000), Fraction(27, 5000)),
            ("vitamin-a", "bivariate", Fraction(-987, 5000), Fraction(4, 625)),
            ("vitamin-a", "pairwise3", Fraction(-987, 5000), Fraction(59, 10000)),
        ],
    )
    def test_bundled_intervals_exact(self, dataset, scenario, lo, hi):
        iv = evaluate_bounds(derive(scenario), load(dataset))
        assert iv.lower == lo
        assert iv.upper == hi
        assert not iv.empty

    def test_witnesses_actually_bind(self):
        bs = derive("trivariate")
        t = load("lipid")
        iv = evaluate_bounds(bs, t)
        point = observable_point(bs.space.labels, t)
        assert bs.lower_forms[iv.lower_witness].evaluate(point) == iv.lower
        assert bs.upper_forms[iv.upper_witness].evaluate(point) == iv.upper

    def test_tie_breaks_to_lowest_index(self):
        space = CoordinateSpace("toy", ("u", "v"))
        bs = BoundSet(
            scenario="toy",
            target="v",
            space=CoordinateSpace("toy-observables", ("u",)),
            lower_forms=(
                AffineForm.parse(CoordinateSpace("toy-observables", ("u",)), "u"),
                AffineForm.parse(CoordinateSpace("toy-observables", ("u",)), "2*u"),
            ),
            upper_forms=(AffineForm.const(CoordinateSpace("toy-observables", ("u",)), 1),),
            observable_tests=(),
            trivial_tests=(),
            hull_equalities=(),
        )
        iv = evaluate_bounds(bs, {"u": 0})
        assert iv.lower_witness == 0

    def test_degenerate_bivariate_data(self):
        # C identically 0 and B identically 0 in both arms: the effect of
        # treatment on the untreated is pinned at 0 but nothing is learned
        # about the treated response.
        point = {"g01": 1, "g11": 0, "g02": 1, "g12": 0,
                 "t01": 1, "t11": 0, "t02": 1, "t12": 0}
        iv = evaluate_bounds(derive("bivariate"), point)
        assert (iv.lower, iv.upper) == (0, 1)

    def test_empty_interval_flagged_not_raised(self):
        bad = build_tables(zeta={"a1": ["1", "0", "0", "0"], "a2": ["0", "0", "1", "0"]})
        iv = evaluate_bounds(derive("trivariate"), bad)
        assert iv.empty
        assert iv.lower > iv.upper


class TestModelCheck:
    def test_bundled_data_passes_all_scenarios(self):
        for dataset in ("lipid", "vitamin-a"):
            t = load(dataset)
            for name in ("bivariate", "trivariate", "pairwise3", "beta"):
                report = model_check(derive(name), t)
                assert report.passed, (dataset, name, report.failures())

    def test_default_tolerance_follows_input_kind(self):
        t = load("lipid")
        assert model_check(derive("trivariate"), t).tolerance == Fraction(1, 2000)
        exact = build_tables(zeta={
            "a1": ["1/2", "0", "1/2", "0"], "a2": ["1/4", "1/4", "1/4", "1/4"],
        })
        assert model_check(derive("trivariate"), exact).tolerance == 0

    def test_explicit_tolerance_wins(self):
        report = model_check(derive("trivariate"), load("lipid"), "1/10")
        assert report.tolerance == Fraction(1, 10)

    def test_sections_are_separated(self):
        report = model_check(derive("trivariate"), load("lipid"))
        sections = {e.section for e in report.entries}
        assert sections == {"observable", "equality", "trivial"}
        observable = [e for e in report.entries if e.section == "observable"]
        assert len(observable) == 4

    def test_fabricated_bivariate_failure(self):
        # everyone recovers under arm 1, nobody under arm 2, nobody treated:
        # the instrument changes the outcome without touching treatment
        point = {"g01": 1, "g11": 0, "g02": 0, "g12": 1,
                 "t01": 1, "t11": 0, "t02": 1, "t12": 0}
        report = model_check(derive("bivariate"), point, 0)
        assert not report.passed
        failing = report.failures()
        assert failing
        assert all(e.section == "observable" for e in failing)

    def test_near_miss_passes_within_tolerance(self):
        point = {"g01": 1, "g11": 0, "g02": "0.9996", "g12": "0.0004",
                 "t01": 1, "t11": 0, "t02": 1, "t12": 0}
        assert not model_check(derive("bivariate"), point, 0).passed
        assert model_check(derive("bivariate"), point, "1/2000").passed

    def test_accepts_raw_hull(self):
        report = model_check(scenario_hull("fig3"), load("lipid"))
        assert report.passed
        assert report.scenario == "fig3"
        assert {e.section for e in report.entries} == {"equality", "trivial"}

    def test_equality_slack_uses_absolute_value(self):
        point = {"g01": "0.6", "g11": "0.5", "g02": "0.5", "g12": "0.5",
                 "t01": "0.5", "t11": "0.5", "t02": "0.5", "t12": "0.5"}
        report = model_check(derive("bivariate"), point, "1/100")
        eq_failures = [e for e in report.failures() if e.section == "equality"]
        assert eq_failures
        assert eq_failures[0].slack == Fraction(1, 10)


class TestInstrumental:
    def test_lipid_values(self):
        rep = instrumental_inequality(load("lipid"))
        assert rep.b_sums == (1, Fraction(153, 250))
        assert rep.maximum == 1
        assert rep.passed

    def test_vitamin_a_values(self):
        rep = instrumental_inequality(load("vitamin-a"))
        assert rep.b_sums == (1, Fraction(4, 5))
        assert rep.passed

    def test_deterministic_contradiction_fails(self):
        # arm 1 shows everyone untreated with C=0, arm 2 everyone untreated
        # with C=1; both cannot come from one confounder distribution
        bad = build_tables(zeta={"a1": ["1", "0", "0", "0"], "a2": ["0", "0", "1", "0"]})
        rep = instrumental_inequality(bad)
        assert rep.b_sums == (2, 0)
        assert not rep.passed

    def test_needs_zeta(self):
        from ivbounds.data import ValidationError

        with pytest.raises(ValidationError, match="zeta"):
            instrumental_inequality(build_tables(theta={"a1": ["1", "0"], "a2": ["0", "1"]}))


class TestBeta:
    def test_closed_form_examples(self):
        lipid = beta_bounds({"t01": 1, "t11": 0, "t02": "0.388", "t12": "0.612"})
        assert (lipid.lower, lipid.upper) == (Fraction(-153, 250), Fraction(153, 250))
        vita = beta_bounds({"t01": 1, "t11": 0, "t02": "0.2", "t12": "0.8"})
        assert (vita.lower, vita.upper) == (Fraction(-4, 5), Fraction(4, 5))
        flat = beta_bounds({"t01": "1/2", "t11": "1/2", "t02": "1/2", "t12": "1/2"})
        assert (flat.lower, flat.upper) == (-1, 1)

    def test_closed_form_equals_polytope_derivation(self):
        import random

        bs = derive("beta")
        rng = random.Random(3)
        for _ in range(100):
            t01 = Fraction(rng.randint(0, 12), 12)
            t02 = Fraction(rng.randint(0, 12), 12)
            point = {"t01": t01, "t11": 1 - t01, "t02": t02, "t12": 1 - t02}
            closed = beta_bounds(point)
            derived = evaluate_bounds(bs, point)
            assert (closed.lower, closed.upper) == (derived.lower, derived.upper)

    def test_accepts_tables(self):
        bb = beta_bounds(load("lipid"))
        assert bb.upper == Fraction(153, 250)


class TestPartitionFallback:
    def test_unconstrained_effect_target_gets_trivial_range(self):
        space = CoordinateSpace("loose", ("t01", "alpha"))
        facets = (
            canonicalize(LinearConstraint(AffineForm.parse(space, "t01"), Relation.GEQ)),
            canonicalize(LinearConstraint(AffineForm.parse(space, "1 - t01"), Relation.GEQ)),
        )
        h = HRepresentation(space, (), facets, 2)
        bs = partition(h, "alpha")
        assert [f.render() for f in bs.lower_forms] == ["-1"]
        assert [f.render() for f in bs.upper_forms] == ["1"]

    def test_other_targets_raise(self):
        space = CoordinateSpace("loose", ("t01", "g01"))
        facets = (
            canonicalize(LinearConstraint(AffineForm.parse(space, "t01"), Relation.GEQ)),
        )
        h = HRepresentation(space, (), facets, 2)
        with pytest.raises(TargetUnconstrained):
            partition(h, "g01")

    def test_equality_involving_target_becomes_matched_pair(self):
        space = CoordinateSpace("tied", ("t01", "alpha"))
        eq = canonicalize(
            LinearConstraint(AffineForm.parse(space, "alpha - t01"), Relation.EQ)
        )
        facets = (
            canonicalize(LinearConstraint(AffineForm.parse(space, "t01"), Relation.GEQ)),
            canonicalize(LinearConstraint(AffineForm.parse(space, "1 - t01"), Relation.GEQ)),
        )
        h = HRepresentation(space, (eq,), facets, 1)
        bs = partition(h, "alpha")
        assert len(bs.lower_forms) == 1 and len(bs.upper_forms) == 1
        assert bs.lower_forms[0] == bs.upper_forms[0]
        iv = evaluate_bounds(bs, {"t01": "1/3"})
        assert iv.lower == iv.upper == Fraction(1, 3)
