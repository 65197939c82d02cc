"""Exact conversion between vertex and facet descriptions of bounded rational polytopes.

The instances this package cares about are tiny (at most a few dozen
generating points in at most 13 coordinates) but highly degenerate: the
points never span the ambient space. facet_enumeration therefore works
affine-hull-first. It computes the hull equalities, projects the points
onto an independent coordinate chart where they are full-dimensional, runs
an incremental double description pass there, and lifts the resulting
facets back. All arithmetic is exact.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import gcd, lcm
from typing import Iterable, Mapping, Sequence

from .forms import (
    AffineForm,
    CoordinateSpace,
    IdenticallyFalse,
    LinearConstraint,
    Relation,
    constraint_sort_key,
    canonicalize,
    rational,
)

_ZERO = Fraction(0)
_ONE = Fraction(1)


class DimensionOverflow(ValueError):
    """The vertex set lives in more coordinates than the configured cap."""


def _primitive(vec: Sequence[Fraction]) -> tuple[int, ...]:
    """Scale a rational vector to coprime integers, preserving direction."""
    scale = 1
    for q in vec:
        scale = lcm(scale, q.denominator)
    ints = [int(q * scale) for q in vec]
    g = 0
    for v in ints:
        g = gcd(g, v)
    if g > 1:
        ints = [v // g for v in ints]
    return tuple(ints)


def _rref(rows: list[list[Fraction]], width: int) -> tuple[list[list[Fraction]], list[int]]:
    """Reduced row echelon form; returns the nonzero rows and pivot columns."""
    rows = [list(r) for r in rows]
    pivots: list[int] = []
    rank = 0
    for col in range(width):
        pivot_row = None
        for i in range(rank, len(rows)):
            if rows[i][col]:
                pivot_row = i
                break
        if pivot_row is None:
            continue
        rows[rank], rows[pivot_row] = rows[pivot_row], rows[rank]
        inv = _ONE / rows[rank][col]
        rows[rank] = [v * inv for v in rows[rank]]
        for i in range(len(rows)):
            if i != rank and rows[i][col]:
                f = rows[i][col]
                rows[i] = [a - f * b for a, b in zip(rows[i], rows[rank])]
        pivots.append(col)
        rank += 1
    return rows[:rank], pivots


@dataclass(frozen=True)
class VertexSet:
    """Deduplicated generating points of a polytope, in a fixed label order."""

    space: CoordinateSpace
    vertices: tuple[tuple[Fraction, ...], ...]

    @classmethod
    def from_points(
        cls,
        space: CoordinateSpace,
        points: Iterable[Mapping | Sequence],
    ) -> "VertexSet":
        seen: set[tuple[Fraction, ...]] = set()
        rows: list[tuple[Fraction, ...]] = []
        for p in points:
            vec = space.vector(p)
            if vec not in seen:
                seen.add(vec)
                rows.append(vec)
        if not rows:
            raise ValueError("a vertex set needs at least one point")
        return cls(space, tuple(rows))

    def __len__(self) -> int:
        return len(self.vertices)

    def point(self, i: int) -> dict[str, Fraction]:
        return dict(zip(self.space.labels, self.vertices[i]))

    def restrict(self, labels: Sequence[str], name: str | None = None) -> "VertexSet":
        """Project onto a subset of coordinates (duplicates re-merged)."""
        sub = CoordinateSpace(name or f"{self.space.name}:restricted", tuple(labels))
        cols = [self.space.index(lab) for lab in sub.labels]
        return VertexSet.from_points(sub, [tuple(v[c] for c in cols) for v in self.vertices])


@dataclass(frozen=True)
class AffineHull:
    """Affine hull of a vertex set: equalities, dimension and a coordinate chart.

    The equalities are canonical and triangular: each one has a distinct
    trailing nonzero coordinate that appears in no other equality. pivots
    lists the chart columns; projection onto them is injective on the hull.
    """

    space: CoordinateSpace
    equalities: tuple[LinearConstraint, ...]
    dimension: int
    pivots: tuple[int, ...]


def affine_hull(vs: VertexSet) -> AffineHull:
    """Compute the affine hull of a vertex set exactly."""
    base = vs.vertices[0]
    m = vs.space.dimension
    diffs = [[v[j] - base[j] for j in range(m)] for v in vs.vertices[1:]]
    rref, pivots = _rref(diffs, m)
    pivot_set = set(pivots)
    equalities: list[LinearConstraint] = []
    for free in (j for j in range(m) if j not in pivot_set):
        coeffs = [_ZERO] * m
        coeffs[free] = _ONE
        for row, piv in zip(rref, pivots):
            if row[free]:
                coeffs[piv] = -row[free]
        const = _ZERO
        for c, b in zip(coeffs, base):
            if c:
                const -= c * b
        form = AffineForm(vs.space, tuple(coeffs), const)
        equalities.append(canonicalize(LinearConstraint(form, Relation.EQ)))
    return AffineHull(vs.space, tuple(equalities), len(pivots), tuple(pivots))


def reduce_mod_equalities(
    form: AffineForm,
    equalities: Sequence[LinearConstraint],
) -> AffineForm:
    """Canonical representative of an affine function modulo equalities.

    The equalities are brought to a triangular system in which each has a
    distinct trailing nonzero coordinate; those coordinates are then
    substituted away. The result is the unique representative of ``form``
    (modulo the span of the equalities) supported off the eliminated
    coordinates, so equal functions on the solution set reduce to equal
    forms.
    """
    if not equalities:
        return form
    m = form.space.dimension
    rows = []
    for eq in equalities:
        if eq.relation is not Relation.EQ:
            raise ValueError("reduce_mod_equalities expects EQ constraints")
        rows.append(list(eq.form.coefficients) + [eq.form.constant])
    # Triangularize with column preference from the right (constant excluded).
    flipped = [list(reversed(r[:m])) + [r[m]] for r in rows]
    rref, _ = _rref(flipped, m)
    table: list[tuple[int, list[Fraction], Fraction]] = []
    for row in rref:
        coeffs = list(reversed(row[:m]))
        const = row[m]
        if not any(coeffs):
            if const:
                raise IdenticallyFalse("equalities are mutually inconsistent")
            continue
        trailing = max(j for j in range(m) if coeffs[j])
        inv = _ONE / coeffs[trailing]
        table.append((trailing, [c * inv for c in coeffs], const * inv))
    out_coeffs = list(form.coefficients)
    out_const = form.constant
    for trailing, coeffs, const in table:
        factor = out_coeffs[trailing]
        if factor:
            out_coeffs = [a - factor * b for a, b in zip(out_coeffs, coeffs)]
            out_const -= factor * const
    return AffineForm(form.space, tuple(out_coeffs), out_const)


@dataclass(frozen=True)
class MembershipReport:
    """Exact slacks of one point against an H-representation."""

    member: bool
    equality_slacks: tuple[Fraction, ...]
    facet_slacks: tuple[Fraction, ...]
    violations: tuple[tuple[str, int, Fraction], ...]


@dataclass(frozen=True)
class HRepresentation:
    """Facet description of a bounded polytope inside its affine hull."""

    space: CoordinateSpace
    equalities: tuple[LinearConstraint, ...]
    facets: tuple[LinearConstraint, ...]
    affine_dimension: int

    def contains(self, point: Mapping | Sequence) -> MembershipReport:
        vec = self.space.vector(point)
        eq_slacks = tuple(c.form.evaluate_vector(vec) for c in self.equalities)
        facet_slacks = tuple(c.form.evaluate_vector(vec) for c in self.facets)
        violations: list[tuple[str, int, Fraction]] = []
        for i, s in enumerate(eq_slacks):
            if s != 0:
                violations.append(("equality", i, s))
        for i, s in enumerate(facet_slacks):
            if s < 0:
                violations.append(("facet", i, s))
        return MembershipReport(
            member=not violations,
            equality_slacks=eq_slacks,
            facet_slacks=facet_slacks,
            violations=tuple(violations),
        )

    def to_json_dict(self) -> dict:
        def rows(constraints: Sequence[LinearConstraint]) -> list[list[int]]:
            out = []
            for c in constraints:
                entries = list(c.form.coefficients) + [c.form.constant]
                assert all(e.denominator == 1 for e in entries)
                out.append([int(e) for e in entries])
            return out

        return {
            "space": self.space.name,
            "labels": list(self.space.labels),
            "equalities": rows(self.equalities),
            "facets": rows(self.facets),
            "dim": self.affine_dimension,
        }


def _independent_rows(vectors: list[tuple[Fraction, ...]], need: int) -> list[int]:
    """Indices of the first ``need`` linearly independent vectors."""
    basis: list[list[Fraction]] = []
    chosen: list[int] = []
    for i, vec in enumerate(vectors):
        work = list(vec)
        for row in basis:
            lead = next(j for j in range(len(row)) if row[j])
            if work[lead]:
                f = work[lead] / row[lead]
                work = [a - f * b for a, b in zip(work, row)]
        if any(work):
            basis.append(work)
            chosen.append(i)
            if len(chosen) == need:
                return chosen
    raise ValueError("vectors do not span the required rank")


def _inverse_columns(rows: list[tuple[Fraction, ...]]) -> list[list[Fraction]]:
    """Columns of the inverse of the square matrix with the given rows."""
    n = len(rows)
    aug = [list(r) + [_ONE if i == j else _ZERO for j in range(n)] for i, r in enumerate(rows)]
    for col in range(n):
        pivot = next(i for i in range(col, n) if aug[i][col])
        aug[col], aug[pivot] = aug[pivot], aug[col]
        inv = _ONE / aug[col][col]
        aug[col] = [v * inv for v in aug[col]]
        for i in range(n):
            if i != col and aug[i][col]:
                f = aug[i][col]
                aug[i] = [a - f * b for a, b in zip(aug[i], aug[col])]
    return [[aug[i][n + j] for i in range(n)] for j in range(n)]


def _polar_extreme_rays(points: list[tuple[Fraction, ...]], dim: int) -> list[tuple[int, ...]]:
    """Extreme rays (b, a) of the cone {(b, a) : b + a.y >= 0 for all points y}.

    These are exactly the facets a.y + b >= 0 of conv(points) when the
    points span dim-dimensional space. Incremental double description:
    start from dim + 1 points whose homogenisations are linearly
    independent (their polar cone is simplicial), then add the remaining
    point constraints one at a time, keeping nonnegative rays and combining
    adjacent positive/negative pairs on each new hyperplane.
    """
    cons = [(_ONE,) + pt for pt in points]
    width = dim + 1
    init = _independent_rows(cons, width)
    columns = _inverse_columns([cons[i] for i in init])
    rays: list[tuple[int, ...]] = [_primitive(col) for col in columns]
    masks: list[int] = []
    for j in range(width):
        mask = 0
        for i, con_index in enumerate(init):
            if i != j:
                mask |= 1 << con_index
        masks.append(mask)
    processed = set(init)
    for k, con in enumerate(cons):
        if k in processed:
            continue
        vals = [sum(c * Fraction(r) for c, r in zip(con, ray)) for ray in rays]
        neg = [i for i, v in enumerate(vals) if v < 0]
        if not neg:
            masks = [m | (1 << k) if vals[i] == 0 else m for i, m in enumerate(masks)]
            processed.add(k)
            continue
        pos = [i for i, v in enumerate(vals) if v > 0]
        zero = [i for i, v in enumerate(vals) if v == 0]
        new_rays: list[tuple[int, ...]] = []
        new_masks: list[int] = []
        for ip in pos:
            for im in neg:
                shared = masks[ip] & masks[im]
                if shared.bit_count() < dim - 1:
                    continue
                adjacent = True
                for io in range(len(rays)):
                    if io in (ip, im):
                        continue
                    if shared & masks[io] == shared:
                        adjacent = False
                        break
                if not adjacent:
                    continue
                combo = [
                    vals[ip] * rays[im][t] - vals[im] * rays[ip][t]
                    for t in range(width)
                ]
                new_rays.append(_primitive(combo))
                new_masks.append(shared | (1 << k))
        rays = (
            [rays[i] for i in pos]
            + [rays[i] for i in zero]
            + new_rays
        )
        masks = (
            [masks[i] for i in pos]
            + [masks[i] | (1 << k) for i in zero]
            + new_masks
        )
        processed.add(k)
    return rays


def facet_enumeration(vs: VertexSet, *, max_coordinates: int = 16) -> HRepresentation:
    """Exact minimal H-representation of the convex hull of a vertex set.

    Raises DimensionOverflow when the ambient space exceeds
    ``max_coordinates``; the algorithm is meant for small exact instances,
    not general-purpose hull computation.
    """
    if vs.space.dimension > max_coordinates:
        raise DimensionOverflow(
            f"{vs.space.dimension} coordinates exceeds the cap of {max_coordinates}"
        )
    hull = affine_hull(vs)
    if hull.dimension == 0:
        return HRepresentation(vs.space, hull.equalities, (), 0)
    chart = [tuple(v[p] for p in hull.pivots) for v in vs.vertices]
    rays = _polar_extreme_rays(chart, hull.dimension)
    m = vs.space.dimension
    facets = []
    for ray in rays:
        coeffs = [_ZERO] * m
        for j, p in enumerate(hull.pivots):
            coeffs[p] = Fraction(ray[1 + j])
        assert any(coeffs), "polar ray with no linear part cannot be a facet"
        form = AffineForm(vs.space, tuple(coeffs), Fraction(ray[0]))
        facets.append(canonicalize(LinearConstraint(form, Relation.GEQ)))
    facets.sort(key=constraint_sort_key)
    return HRepresentation(vs.space, hull.equalities, tuple(facets), hull.dimension)
