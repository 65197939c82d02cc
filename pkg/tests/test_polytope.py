"""Facet enumeration on known polytopes, exactness and determinism."""

import itertools
import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ivbounds.forms import AffineForm, CoordinateSpace, LinearConstraint, Relation, canonicalize
from ivbounds.polytope import (
    DimensionOverflow,
    VertexSet,
    affine_hull,
    facet_enumeration,
    reduce_mod_equalities,
)


def space(dim, prefix="x"):
    return CoordinateSpace(f"{prefix}{dim}", tuple(f"{prefix}{i}" for i in range(dim)))


def cube_vertices(dim):
    return list(itertools.product((0, 1), repeat=dim))


def simplex_vertices(dim):
    pts = [tuple(0 for _ in range(dim))]
    for i in range(dim):
        pts.append(tuple(1 if j == i else 0 for j in range(dim)))
    return pts


def cross_vertices(dim):
    pts = []
    for i in range(dim):
        for s in (1, -1):
            pts.append(tuple(s if j == i else 0 for j in range(dim)))
    return pts


@pytest.mark.parametrize("dim", [2, 3, 4, 5])
def test_hypercube(dim):
    h = facet_enumeration(VertexSet.from_points(space(dim), cube_vertices(dim)))
    assert h.affine_dimension == dim
    assert not h.equalities
    assert len(h.facets) == 2 * dim


@pytest.mark.parametrize("dim", [2, 3, 4, 5])
def test_simplex(dim):
    h = facet_enumeration(VertexSet.from_points(space(dim), simplex_vertices(dim)))
    assert h.affine_dimension == dim
    assert len(h.facets) == dim + 1


@pytest.mark.parametrize("dim", [2, 3, 4])
def test_cross_polytope(dim):
    h = facet_enumeration(VertexSet.from_points(space(dim), cross_vertices(dim)))
    assert h.affine_dimension == dim
    assert len(h.facets) == 2**dim


def test_single_point_is_dimension_zero():
    h = facet_enumeration(VertexSet.from_points(space(3), [(1, 2, 3)]))
    assert h.affine_dimension == 0
    assert len(h.equalities) == 3
    assert not h.facets
    assert h.contains((1, 2, 3)).member
    assert not h.contains((1, 2, 4)).member


def test_segment_in_three_dimensions():
    """A 1-dimensional hull: two equalities, two endpoint facets."""
    h = facet_enumeration(VertexSet.from_points(space(3), [(0, 0, 0), (1, 2, 2)]))
    assert h.affine_dimension == 1
    assert len(h.equalities) == 2
    assert len(h.facets) == 2
    assert h.contains(("1/2", 1, 1)).member
    assert not h.contains(("1/2", 1, "3/2")).member
    assert not h.contains((2, 4, 4)).member


def test_duplicate_vertices_are_merged():
    vs = VertexSet.from_points(space(2), [(0, 0), (1, 0), (0, 0), ("0.0", 0)])
    assert len(vs) == 2


def test_empty_vertex_set_rejected():
    with pytest.raises(ValueError):
        VertexSet.from_points(space(2), [])


def test_dimension_overflow():
    sp = space(17)
    with pytest.raises(DimensionOverflow):
        facet_enumeration(VertexSet.from_points(sp, [tuple(range(17))]))


def test_affine_hull_equalities_are_triangular():
    """Each equality owns a distinct trailing coordinate."""
    sp = space(4)
    vs = VertexSet.from_points(
        sp, [(0, 0, 1, 1), (1, 0, 0, 1), (0, 1, 1, 0)]
    )
    hull = affine_hull(vs)
    assert hull.dimension == 2
    trailing = []
    for eq in hull.equalities:
        nz = [i for i, c in enumerate(eq.form.coefficients) if c]
        trailing.append(max(nz))
    assert len(set(trailing)) == len(trailing)


def test_reduce_mod_equalities_gives_unique_representative():
    sp = space(3)
    eq = canonicalize(
        LinearConstraint(AffineForm.parse(sp, "x0 + x1 + x2 - 1"), Relation.EQ)
    )
    a = AffineForm.parse(sp, "x0 + x2")
    b = AffineForm.parse(sp, "1 - x1")  # equal modulo the equality
    ra = reduce_mod_equalities(a, (eq,))
    rb = reduce_mod_equalities(b, (eq,))
    assert ra == rb
    assert ra.coefficients[2] == 0  # trailing coordinate eliminated


def test_reduce_with_no_equalities_is_identity():
    sp = space(2)
    f = AffineForm.parse(sp, "x0 - x1 + 3")
    assert reduce_mod_equalities(f, ()) is f


def shuffle_invariance_case(points, dim, seed):
    sp = space(dim)
    base = facet_enumeration(VertexSet.from_points(sp, points))
    rng = random.Random(seed)
    shuffled = list(points)
    rng.shuffle(shuffled)
    again = facet_enumeration(VertexSet.from_points(sp, shuffled))
    assert again.facets == base.facets
    assert again.equalities == base.equalities


def test_facets_do_not_depend_on_vertex_order():
    shuffle_invariance_case(cube_vertices(4), 4, seed=7)
    shuffle_invariance_case(cross_vertices(3), 3, seed=8)
    shuffle_invariance_case(simplex_vertices(5), 5, seed=9)


point_strategy = st.tuples(
    *(st.integers(min_value=-3, max_value=3) for _ in range(3))
)


@settings(max_examples=60, deadline=None)
@given(st.lists(point_strategy, min_size=1, max_size=10))
def test_facet_enumeration_soundness_and_tightness(points):
    """Every input point satisfies the output system; facets are supported.

    Soundness: vertices violate no equality or facet. Tightness: each facet
    is met with equality by at least affine_dimension of the vertices, which
    is what makes it a facet rather than merely a valid inequality.
    """
    sp = space(3)
    vs = VertexSet.from_points(sp, points)
    h = facet_enumeration(vs)
    for v in vs.vertices:
        assert h.contains(v).member
    for facet in h.facets:
        on = sum(1 for v in vs.vertices if facet.form.evaluate_vector(v) == 0)
        assert on >= max(h.affine_dimension, 1)


@settings(max_examples=30, deadline=None)
@given(st.lists(point_strategy, min_size=2, max_size=8))
def test_centroid_is_inside(points):
    sp = space(3)
    vs = VertexSet.from_points(sp, points)
    h = facet_enumeration(vs)
    n = len(vs.vertices)
    centroid = tuple(sum(v[i] for v in vs.vertices) / Fraction(n) for i in range(3))
    assert h.contains(centroid).member


def test_facet_minimality_on_square_with_interior_points():
    """Interior and edge points must not add facets."""
    sp = space(2)
    pts = cube_vertices(2) + [("1/2", "1/2"), ("1/2", 0), (0, "1/2")]
    h = facet_enumeration(VertexSet.from_points(sp, pts))
    assert len(h.facets) == 4
    assert h.affine_dimension == 2


def test_membership_report_slack_details():
    sp = space(2)
    h = facet_enumeration(VertexSet.from_points(sp, cube_vertices(2)))
    rep = h.contains((2, "1/2"))
    assert not rep.member
    kinds = {v[0] for v in rep.violations}
    assert kinds == {"facet"}
    worst = min(v[2] for v in rep.violations)
    assert worst == -1


def test_json_dict_is_integral():
    sp = space(2)
    h = facet_enumeration(VertexSet.from_points(sp, [(0, 0), ("1/2", 0), (0, "1/3")]))
    d = h.to_json_dict()
    assert d["dim"] == 2
    for row in d["facets"] + d["equalities"]:
        assert all(isinstance(v, int) for v in row)
