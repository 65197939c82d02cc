"""
Exact polytope machinery on toy inputs
======================================

Everything downstream (scenario hulls, bound derivation) runs through
VertexSet -> facet_enumeration -> HRepresentation. This script shows the
pipeline on shapes small enough to check by eye.
"""

from fractions import Fraction

from ivbounds import CoordinateSpace, VertexSet, facet_enumeration

# A unit square living inside 3-space on the plane z = 1. The affine hull
# machinery should find the plane as an equality and leave 4 facets.
space = CoordinateSpace("toy", ("x", "y", "z"))
square = VertexSet.from_points(
    space,
    [
        (0, 0, 1),
        (1, 0, 1),
        (0, 1, 1),
        (1, 1, 1),
        ("1/2", "1/2", 1),  # interior point, must not change anything
        (1, 1, 1),          # duplicate, dropped on construction
    ],
)
print(f"square: {len(square)} distinct vertices after dedup")

h = facet_enumeration(square)
print(f"affine dimension {h.affine_dimension}")
print("equalities:")
for c in h.equalities:
    print("  ", c.render())
print("facets:")
for c in h.facets:
    print("  ", c.render())

# Membership reports carry exact slacks, no rounding anywhere.
inside = h.contains({"x": "1/3", "y": "2/3", "z": 1})
outside = h.contains({"x": 2, "y": 0, "z": 1})
off_plane = h.contains({"x": "1/2", "y": "1/2", "z": "3/4"})
print(f"(1/3, 2/3, 1) member: {inside.member}")
print(f"(2, 0, 1) member: {outside.member}, violations: {outside.violations}")
print(f"(1/2, 1/2, 3/4) member: {off_plane.member}, violations: {off_plane.violations}")

# The same machinery in dimension 4: the cross-polytope has 2^4 facets
# but only 8 vertices, a cheap stress test for the double description step.
space4 = CoordinateSpace("cross", ("a", "b", "c", "d"))
points = []
for i in range(4):
    for sign in (1, -1):
        p = [0, 0, 0, 0]
        p[i] = sign
        points.append(tuple(p))
cross = VertexSet.from_points(space4, points)
h4 = facet_enumeration(cross)
print(f"cross-polytope: {len(cross)} vertices, {len(h4.facets)} facets, "
      f"dimension {h4.affine_dimension}")

# Every facet of a polytope touches at least dim many vertices.
for c in h4.facets[:3]:
    touching = sum(1 for v in cross.vertices if c.form.evaluate_vector(v) == 0)
    print(f"  {c.render()}  touches {touching} vertices")

# Fractions all the way down: slacks of a rational point are exact.
report = h4.contains({"a": "1/7", "b": "2/7", "c": "-3/7", "d": "1/7"})
print(f"rational point member: {report.member}, "
      f"tightest slack {min(report.facet_slacks)}")
assert min(report.facet_slacks) == Fraction(0)
