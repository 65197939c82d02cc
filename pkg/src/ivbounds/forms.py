"""Exact rational affine forms and linear constraints over named coordinate spaces.

Everything downstream (vertex transforms, facet enumeration, bound
evaluation) is built on these types. All arithmetic runs on
``fractions.Fraction``; floats are rejected at the boundary so rounding can
never enter a derivation. Floating point appears only when rendering report
text.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from math import gcd, lcm
from typing import Iterable, Mapping, Sequence, Union

Rational = Fraction

RationalLike = Union[int, str, Fraction]

_ZERO = Fraction(0)
_ONE = Fraction(1)


class MissingCoordinate(KeyError):
    """A point lacks a coordinate that a form or space needs."""

    def __init__(self, label: str):
        super().__init__(label)
        self.label = label

    def __str__(self) -> str:
        return f"missing coordinate {self.label!r}"


class IdenticallyFalse(ValueError):
    """A constraint is unsatisfiable no matter the point (e.g. 0 = 1)."""


def rational(value: RationalLike) -> Fraction:
    """Coerce ``value`` to an exact rational.

    Accepts ints, Fractions and strings in either "p/q" or decimal form;
    "0.919" parses to exactly 919/1000. Floats are refused because they
    have already lost exactness.
    """
    if isinstance(value, bool):
        raise TypeError("expected a rational value, got a bool")
    if isinstance(value, (int, Fraction)):
        return Fraction(value)
    if isinstance(value, str):
        try:
            return Fraction(value.strip())
        except (ValueError, ZeroDivisionError) as exc:
            raise ValueError(f"cannot parse {value!r} as a rational") from exc
    if isinstance(value, float):
        raise TypeError(f"refusing inexact float {value!r}; pass a string such as '0.919'")
    raise TypeError(f"cannot interpret {type(value).__name__} as a rational")


def format_rational(q: Fraction) -> str:
    if q.denominator == 1:
        return str(q.numerator)
    return f"{q.numerator}/{q.denominator}"


def format_decimal(q: Fraction, digits: int = 6) -> str:
    """Decimal rendering with at most ``digits`` significant digits.

    Report text only; nothing ever parses this back.
    """
    return f"{float(q):.{digits}g}"


@dataclass(frozen=True)
class CoordinateSpace:
    """An ordered, named tuple of coordinate labels fixing vector layout."""

    name: str
    labels: tuple[str, ...]

    def __post_init__(self):
        object.__setattr__(self, "labels", tuple(self.labels))
        if len(set(self.labels)) != len(self.labels):
            raise ValueError(f"duplicate coordinate labels in space {self.name!r}")
        object.__setattr__(self, "_pos", {lab: i for i, lab in enumerate(self.labels)})

    @property
    def dimension(self) -> int:
        return len(self.labels)

    def __contains__(self, label: str) -> bool:
        return label in self._pos

    def index(self, label: str) -> int:
        try:
            return self._pos[label]
        except KeyError:
            raise MissingCoordinate(label) from None

    def vector(self, point: Mapping[str, RationalLike] | Sequence[RationalLike]) -> tuple[Fraction, ...]:
        """Lay a point out as a coordinate tuple in label order."""
        if isinstance(point, Mapping):
            out = []
            for lab in self.labels:
                if lab not in point:
                    raise MissingCoordinate(lab)
                out.append(rational(point[lab]))
            return tuple(out)
        vec = tuple(rational(v) for v in point)
        if len(vec) != len(self.labels):
            raise ValueError(
                f"space {self.name!r} has {len(self.labels)} coordinates, got {len(vec)} values"
            )
        return vec


@dataclass(frozen=True)
class AffineForm:
    """The affine function constant + sum_i coefficients[i] * x[i]."""

    space: CoordinateSpace
    coefficients: tuple[Fraction, ...]
    constant: Fraction = _ZERO

    def __post_init__(self):
        coeffs = tuple(Fraction(c) for c in self.coefficients)
        if len(coeffs) != self.space.dimension:
            raise ValueError(
                f"expected {self.space.dimension} coefficients for space "
                f"{self.space.name!r}, got {len(coeffs)}"
            )
        object.__setattr__(self, "coefficients", coeffs)
        object.__setattr__(self, "constant", Fraction(self.constant))

    @classmethod
    def zero(cls, space: CoordinateSpace) -> "AffineForm":
        return cls(space, (_ZERO,) * space.dimension, _ZERO)

    @classmethod
    def const(cls, space: CoordinateSpace, value: RationalLike) -> "AffineForm":
        return cls(space, (_ZERO,) * space.dimension, rational(value))

    @classmethod
    def coordinate(cls, space: CoordinateSpace, label: str) -> "AffineForm":
        coeffs = [_ZERO] * space.dimension
        coeffs[space.index(label)] = _ONE
        return cls(space, tuple(coeffs), _ZERO)

    @classmethod
    def from_dict(
        cls,
        space: CoordinateSpace,
        coefficients: Mapping[str, RationalLike],
        constant: RationalLike = 0,
    ) -> "AffineForm":
        coeffs = [_ZERO] * space.dimension
        for lab, val in coefficients.items():
            coeffs[space.index(lab)] = rational(val)
        return cls(space, tuple(coeffs), rational(constant))

    @classmethod
    def parse(cls, space: CoordinateSpace, text: str) -> "AffineForm":
        """Parse a linear expression such as "2*g01 - g02 + 2*t01 - 3"."""
        cleaned = text.replace(" ", "")
        if not cleaned:
            raise ValueError("empty expression")
        chunks = re.findall(r"[+-]?[^+-]+", cleaned)
        if "".join(chunks) != cleaned:
            raise ValueError(f"cannot parse expression {text!r}")
        coeffs: dict[str, Fraction] = {}
        constant = _ZERO
        term_re = re.compile(
            r"^(?P<sign>[+-]?)(?:(?P<num>\d+(?:/\d+|\.\d+)?)\*?)?(?P<label>[A-Za-z][A-Za-z0-9_.]*)?$"
        )
        for chunk in chunks:
            m = term_re.match(chunk)
            if not m or (m.group("num") is None and m.group("label") is None):
                raise ValueError(f"cannot parse term {chunk!r} in expression {text!r}")
            value = rational(m.group("num")) if m.group("num") else _ONE
            if m.group("sign") == "-":
                value = -value
            label = m.group("label")
            if label is None:
                constant += value
            else:
                if label not in space:
                    raise MissingCoordinate(label)
                coeffs[label] = coeffs.get(label, _ZERO) + value
        return cls.from_dict(space, coeffs, constant)

    def coefficient(self, label: str) -> Fraction:
        return self.coefficients[self.space.index(label)]

    def as_dict(self) -> dict[str, Fraction]:
        """Nonzero coefficients keyed by label."""
        return {
            lab: c for lab, c in zip(self.space.labels, self.coefficients) if c
        }

    def is_zero(self) -> bool:
        return self.constant == 0 and not any(self.coefficients)

    def evaluate(self, point: Mapping[str, RationalLike]) -> Fraction:
        """Evaluate at a point given as a label mapping.

        Labels with zero coefficient may be absent; a missing label with a
        nonzero coefficient raises MissingCoordinate.
        """
        total = self.constant
        for lab, c in zip(self.space.labels, self.coefficients):
            if not c:
                continue
            if lab not in point:
                raise MissingCoordinate(lab)
            total += c * rational(point[lab])
        return total

    def evaluate_vector(self, vec: Sequence[Fraction]) -> Fraction:
        total = self.constant
        for c, v in zip(self.coefficients, vec):
            if c:
                total += c * v
        return total

    def on_space(self, space: CoordinateSpace) -> "AffineForm":
        """Re-express the form on another space carrying the same labels.

        Any nonzero coefficient whose label the new space lacks is an error.
        """
        coeffs = [_ZERO] * space.dimension
        for lab, c in zip(self.space.labels, self.coefficients):
            if not c:
                continue
            coeffs[space.index(lab)] = c
        return AffineForm(space, tuple(coeffs), self.constant)

    def __add__(self, other: "AffineForm") -> "AffineForm":
        self._check_space(other)
        return AffineForm(
            self.space,
            tuple(a + b for a, b in zip(self.coefficients, other.coefficients)),
            self.constant + other.constant,
        )

    def __sub__(self, other: "AffineForm") -> "AffineForm":
        self._check_space(other)
        return AffineForm(
            self.space,
            tuple(a - b for a, b in zip(self.coefficients, other.coefficients)),
            self.constant - other.constant,
        )

    def __neg__(self) -> "AffineForm":
        return AffineForm(self.space, tuple(-c for c in self.coefficients), -self.constant)

    def scaled(self, factor: RationalLike) -> "AffineForm":
        f = rational(factor)
        return AffineForm(self.space, tuple(f * c for c in self.coefficients), f * self.constant)

    def key(self) -> tuple:
        """Hashable identity of the affine function (space layout implied)."""
        return (self.coefficients, self.constant)

    def render(self) -> str:
        """Human form, terms in coordinate order, e.g. "2*g01 - g02 - 3"."""
        parts: list[str] = []
        for lab, c in zip(self.space.labels, self.coefficients):
            if not c:
                continue
            mag = abs(c)
            term = lab if mag == 1 else f"{format_rational(mag)}*{lab}"
            if not parts:
                parts.append(term if c > 0 else f"-{term}")
            else:
                parts.append(f"+ {term}" if c > 0 else f"- {term}")
        if self.constant or not parts:
            mag = format_rational(abs(self.constant))
            if not parts:
                parts.append(mag if self.constant >= 0 else f"-{mag}")
            else:
                parts.append(f"+ {mag}" if self.constant > 0 else f"- {mag}")
        return " ".join(parts)

    def _check_space(self, other: "AffineForm") -> None:
        if self.space.labels != other.space.labels:
            raise ValueError(
                f"mixing forms over different spaces: {self.space.name!r} and {other.space.name!r}"
            )


class Relation(Enum):
    EQ = "="
    GEQ = ">="


@dataclass(frozen=True)
class LinearConstraint:
    """form = 0 (EQ) or form >= 0 (GEQ)."""

    form: AffineForm
    relation: Relation

    def slack(self, point: Mapping[str, RationalLike]) -> Fraction:
        return self.form.evaluate(point)

    def satisfied(self, point: Mapping[str, RationalLike], tolerance: RationalLike = 0) -> bool:
        tol = rational(tolerance)
        s = self.slack(point)
        if self.relation is Relation.EQ:
            return abs(s) <= tol
        return s >= -tol

    def canonical(self) -> "LinearConstraint":
        return canonicalize(self)

    def key(self) -> tuple:
        return (self.relation.value, self.form.coefficients, self.form.constant)

    def render(self) -> str:
        if self.relation is Relation.EQ:
            lhs = AffineForm(self.form.space, self.form.coefficients, _ZERO)
            rhs = -self.form.constant
            if lhs.is_zero():
                return f"0 = {format_rational(rhs)}"
            return f"{lhs.render()} = {format_rational(rhs)}"
        return f"{self.form.render()} >= 0"


def canonicalize(constraint: LinearConstraint) -> LinearConstraint:
    """Scale to coprime integer coefficients and fix the sign convention.

    Equalities get a positive leading (first nonzero) coefficient; the
    direction of an inequality is meaningful, so only positive scaling is
    applied to GEQ constraints. Constraints that reduce to an unsatisfiable
    statement raise IdenticallyFalse.
    """
    form = constraint.form
    entries = list(form.coefficients) + [form.constant]
    scale = 1
    for q in entries:
        scale = lcm(scale, q.denominator)
    ints = [int(q * scale) for q in entries]
    g = 0
    for v in ints:
        g = gcd(g, v)
    if g > 1:
        ints = [v // g for v in ints]
    coeffs, const = ints[:-1], ints[-1]
    if not any(coeffs):
        if constraint.relation is Relation.EQ:
            if const != 0:
                raise IdenticallyFalse(f"equality reduces to {const} = 0")
        else:
            if const < 0:
                raise IdenticallyFalse(f"inequality reduces to {const} >= 0")
        return LinearConstraint(
            AffineForm(form.space, (_ZERO,) * form.space.dimension, Fraction(const)),
            constraint.relation,
        )
    if constraint.relation is Relation.EQ:
        lead = next(c for c in coeffs if c)
        if lead < 0:
            coeffs = [-c for c in coeffs]
            const = -const
    return LinearConstraint(
        AffineForm(form.space, tuple(Fraction(c) for c in coeffs), Fraction(const)),
        constraint.relation,
    )


def constraint_sort_key(constraint: LinearConstraint) -> tuple:
    """Deterministic ordering key: coefficient tuple then constant."""
    return (
        tuple(constraint.form.coefficients),
        constraint.form.constant,
        constraint.relation.value,
    )


def parse_constraint(space: CoordinateSpace, text: str) -> LinearConstraint:
    """Parse "expr >= expr" or "expr = expr" into a canonical constraint."""
    for token, rel in ((">=", Relation.GEQ), ("=", Relation.EQ)):
        if token in text:
            left, right = text.split(token, 1)
            form = AffineForm.parse(space, left) - AffineForm.parse(space, right)
            return canonicalize(LinearConstraint(form, rel))
    raise ValueError(f"no relation ('>=' or '=') in constraint {text!r}")


def unique_constraints(constraints: Iterable[LinearConstraint]) -> tuple[LinearConstraint, ...]:
    """Drop duplicate canonical constraints, preserving first-seen order."""
    seen: set[tuple] = set()
    out: list[LinearConstraint] = []
    for c in constraints:
        k = c.key()
        if k not in seen:
            seen.add(k)
            out.append(c)
    return tuple(out)
