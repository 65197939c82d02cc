"""Built-in binary instrumental-variable scenarios and their observable transforms.

The model has a binary instrument A (arms 1 and 2), binary treatment B,
binary outcome C and an arbitrary confounder U acting on B and C but not
on A. Conditional on U the model is parameterised by five probabilities
(see ParameterPoint). Each scenario names the observable coordinates that
a study reports, plus optionally a causal target coordinate; the scenario
transform maps a parameter point to that coordinate vector. Observed
distributions are mixtures over U of transformed parameter points, which
is what makes the convex-polytope analysis downstream exact.

Scenarios are data: a label list, a target and a psi flag. Every label is
interpreted by coordinate_function, so adding a scenario means listing
labels, not writing new branching code.
"""

from __future__ import annotations

import itertools
import random
import re
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Callable, Sequence

from .forms import CoordinateSpace, RationalLike, rational
from .polytope import VertexSet

_ZERO = Fraction(0)
_ONE = Fraction(1)


class UnsupportedCoordinateError(ValueError):
    """A coordinate label that no scenario may use."""


@dataclass(frozen=True)
class ParameterPoint:
    """One value of the latent-conditional model parameters, all in [0, 1].

    eta0 and eta1 are the outcome probabilities P(C=1 | B=b, U) for b = 0
    and b = 1; the exclusion restriction makes them the same under either
    instrument arm. delta1 and delta2 are the uptake probabilities
    P(B=1 | A=a, U) for arms a = 1 and a = 2. psi is P(A=2 | U), used only
    by scenarios that model the instrument distribution itself; it
    defaults to 0 and is ignored elsewhere.
    """

    eta0: Fraction
    eta1: Fraction
    delta1: Fraction
    delta2: Fraction
    psi: Fraction = _ZERO

    def __post_init__(self):
        for name in ("eta0", "eta1", "delta1", "delta2", "psi"):
            value = rational(getattr(self, name))
            if not 0 <= value <= 1:
                raise ValueError(f"{name} = {value} is outside [0, 1]")
            object.__setattr__(self, name, value)


def _delta(p: ParameterPoint, a: int) -> Fraction:
    return p.delta1 if a == 1 else p.delta2


def _eta(p: ParameterPoint, b: int) -> Fraction:
    return p.eta1 if b == 1 else p.eta0


def _gamma_star(p: ParameterPoint, c: int, a: int) -> Fraction:
    d = _delta(p, a)
    hit = p.eta0 * (1 - d) + p.eta1 * d
    return hit if c == 1 else 1 - hit


def _theta_star(p: ParameterPoint, b: int, a: int) -> Fraction:
    d = _delta(p, a)
    return d if b == 1 else 1 - d


def _zeta_star(p: ParameterPoint, c: int, b: int, a: int) -> Fraction:
    e = _eta(p, b)
    return _theta_star(p, b, a) * (e if c == 1 else 1 - e)


def _phi_star(p: ParameterPoint, c: int, b: int) -> Fraction:
    return _zeta_star(p, c, b, 1) * (1 - p.psi) + _zeta_star(p, c, b, 2) * p.psi


def _xi_star(p: ParameterPoint, c: int, b: int, a: int) -> Fraction:
    return _zeta_star(p, c, b, a) * (p.psi if a == 2 else 1 - p.psi)


def _alpha_star(p: ParameterPoint) -> Fraction:
    return p.eta1 - p.eta0


def _beta_star(p: ParameterPoint) -> Fraction:
    return _gamma_star(p, 1, 2) - _gamma_star(p, 1, 1)


@lru_cache(maxsize=None)
def coordinate_function(label: str) -> Callable[[ParameterPoint], Fraction]:
    """Map a coordinate label to its transform on parameter points.

    Label scheme: g{c}{a} is P(C=c | A=a), t{b}{a} is P(B=b | A=a),
    z{c}{b}.{a} is P(C=c, B=b | A=a), p{c}{b} is P(C=c, B=b),
    x{c}{b}{a} is P(C=c, B=b, A=a), and alpha / beta are the treatment and
    assignment effect differences. Labels of shape q{c}{b}, meaning
    P(C=c | B=b), are recognised and rejected: conditioning on the
    confounded treatment does not commute with averaging over U, so an
    observed P(C | B) table is not a convex mixture of its latent
    counterparts and none of the polytope machinery applies to it.
    """
    if label == "alpha":
        return _alpha_star
    if label == "beta":
        return _beta_star
    m = re.fullmatch(r"g([01])([12])", label)
    if m:
        c, a = int(m.group(1)), int(m.group(2))
        return lambda p, c=c, a=a: _gamma_star(p, c, a)
    m = re.fullmatch(r"t([01])([12])", label)
    if m:
        b, a = int(m.group(1)), int(m.group(2))
        return lambda p, b=b, a=a: _theta_star(p, b, a)
    m = re.fullmatch(r"z([01])([01])\.([12])", label)
    if m:
        c, b, a = int(m.group(1)), int(m.group(2)), int(m.group(3))
        return lambda p, c=c, b=b, a=a: _zeta_star(p, c, b, a)
    m = re.fullmatch(r"p([01])([01])", label)
    if m:
        c, b = int(m.group(1)), int(m.group(2))
        return lambda p, c=c, b=b: _phi_star(p, c, b)
    m = re.fullmatch(r"x([01])([01])([12])", label)
    if m:
        c, b, a = int(m.group(1)), int(m.group(2)), int(m.group(3))
        return lambda p, c=c, b=b, a=a: _xi_star(p, c, b, a)
    if re.fullmatch(r"q([01])([01])", label):
        raise UnsupportedCoordinateError(
            f"coordinate {label!r} would be P(C|B); outcome-given-treatment tables "
            "are not mixtures over the confounder of their latent counterparts, so "
            "no convex (polytope) analysis applies to them"
        )
    raise UnsupportedCoordinateError(f"unknown coordinate label {label!r}")


@dataclass(frozen=True)
class Scenario:
    """A named observable coordinate system with an optional causal target."""

    name: str
    space: CoordinateSpace
    causal_target: str | None
    uses_psi: bool

    @property
    def observable_labels(self) -> tuple[str, ...]:
        return tuple(l for l in self.space.labels if l != self.causal_target)

    @property
    def observable_space(self) -> CoordinateSpace:
        return CoordinateSpace(f"{self.name}-observables", self.observable_labels)


def make_scenario(
    name: str,
    labels: Sequence[str],
    causal_target: str | None = None,
    uses_psi: bool = False,
) -> Scenario:
    for label in labels:
        coordinate_function(label)
    if causal_target is not None and causal_target not in labels:
        raise ValueError(f"target {causal_target!r} is not among the labels")
    return Scenario(name, CoordinateSpace(name, tuple(labels)), causal_target, uses_psi)


SCENARIOS: dict[str, Scenario] = {
    s.name: s
    for s in (
        make_scenario(
            "fig3",
            ["x001", "x011", "x101", "x111", "x002", "x012", "x102", "x112"],
            causal_target=None,
            uses_psi=True,
        ),
        make_scenario(
            "bivariate",
            ["g01", "g11", "g02", "g12", "t01", "t11", "t02", "t12", "alpha"],
            causal_target="alpha",
        ),
        make_scenario(
            "trivariate",
            ["z00.1", "z01.1", "z10.1", "z11.1", "z00.2", "z01.2", "z10.2", "z11.2", "alpha"],
            causal_target="alpha",
        ),
        make_scenario(
            "pairwise3",
            [
                "g01", "g11", "g02", "g12",
                "t01", "t11", "t02", "t12",
                "p00", "p01", "p10", "p11",
                "alpha",
            ],
            causal_target="alpha",
            uses_psi=True,
        ),
        make_scenario(
            "beta",
            ["t01", "t11", "t02", "t12", "beta"],
            causal_target="beta",
        ),
    )
}


def get_scenario(name: str | Scenario) -> Scenario:
    if isinstance(name, Scenario):
        return name
    try:
        return SCENARIOS[name]
    except KeyError:
        known = ", ".join(SCENARIOS)
        raise KeyError(f"unknown scenario {name!r}; known scenarios: {known}") from None


def xi_transform(scenario: str | Scenario, p: ParameterPoint) -> dict[str, Fraction]:
    """Image of one parameter point in the scenario's coordinate space."""
    s = get_scenario(scenario)
    return {label: coordinate_function(label)(p) for label in s.space.labels}


def enumerate_parameter_vertices(scenario: str | Scenario) -> tuple[ParameterPoint, ...]:
    """All 0/1 assignments of the scenario's free parameters."""
    s = get_scenario(scenario)
    count = 5 if s.uses_psi else 4
    points = []
    for bits in itertools.product((_ZERO, _ONE), repeat=count):
        eta0, eta1, delta1, delta2 = bits[:4]
        psi = bits[4] if s.uses_psi else _ZERO
        points.append(ParameterPoint(eta0, eta1, delta1, delta2, psi))
    return tuple(points)


def scenario_vertex_set(scenario: str | Scenario, include_target: bool = True) -> VertexSet:
    """Distinct images of the parameter vertices under the scenario transform."""
    s = get_scenario(scenario)
    points = [xi_transform(s, p) for p in enumerate_parameter_vertices(s)]
    vs = VertexSet.from_points(s.space, points)
    if include_target or s.causal_target is None:
        return vs
    return vs.restrict(s.observable_labels, name=s.observable_space.name)


def random_parameter_point(
    rng: random.Random,
    uses_psi: bool = True,
    denominator: int = 1000,
) -> ParameterPoint:
    """A uniformly sampled rational parameter point, exact by construction."""

    def draw() -> Fraction:
        return Fraction(rng.randint(0, denominator), denominator)

    return ParameterPoint(
        eta0=draw(),
        eta1=draw(),
        delta1=draw(),
        delta2=draw(),
        psi=draw() if uses_psi else _ZERO,
    )
