"""Observed distribution tables: parsing, validation, derived marginals, bundled studies.

Tables hold exact rationals. Decimal text such as "0.919" parses to
919/1000; bare JSON numbers are intercepted before float conversion so the
literal digits are kept. Two named datasets ship with the package: "lipid"
(a cholesterol-lowering trial with partial compliance) and "vitamin-a"
(a supplementation trial with one-sided compliance).
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass, field
from fractions import Fraction
from importlib import resources
from pathlib import Path
from typing import Mapping, Sequence

from .forms import RationalLike, format_rational, rational

_ZERO = Fraction(0)
_ONE = Fraction(1)

_CB_PAIRS = ((0, 0), (0, 1), (1, 0), (1, 1))
_ARMS = (1, 2)

BUNDLED_DATASETS = ("lipid", "vitamin-a")

DEFAULT_SUM_DEVIATION = Fraction(1, 100)


class ParseError(ValueError):
    """Input text or structure cannot be read as tables."""


class ValidationError(ValueError):
    """Tables parsed but violate a range or sum invariant."""


class MissingArmWeights(ValueError):
    """A joint-over-arms table was requested but no arm weights are present."""


@dataclass(frozen=True)
class ObservedTables:
    """Any subset of the observable tables of one study.

    zeta maps (c, b, a) to P(C=c, B=b | A=a); gamma maps (c, a) to
    P(C=c | A=a); theta maps (b, a) to P(B=b | A=a); phi maps (c, b) to
    P(C=c, B=b); arm_weights is (P(A=1), P(A=2)). decimal_input records
    whether any entry arrived as a rounded decimal literal, which controls
    the default model-check tolerance downstream; it is not part of the
    table identity.
    """

    zeta: dict[tuple[int, int, int], Fraction] | None = None
    gamma: dict[tuple[int, int], Fraction] | None = None
    theta: dict[tuple[int, int], Fraction] | None = None
    phi: dict[tuple[int, int], Fraction] | None = None
    arm_weights: tuple[Fraction, Fraction] | None = None
    decimal_input: bool = field(default=False, compare=False)

    def blocks(self) -> list[tuple[str, list[Fraction]]]:
        """The per-condition probability blocks that must each sum to 1."""
        out: list[tuple[str, list[Fraction]]] = []
        if self.zeta is not None:
            for a in _ARMS:
                out.append((f"zeta[a={a}]", [self.zeta[(c, b, a)] for c, b in _CB_PAIRS]))
        if self.gamma is not None:
            for a in _ARMS:
                out.append((f"gamma[a={a}]", [self.gamma[(c, a)] for c in (0, 1)]))
        if self.theta is not None:
            for a in _ARMS:
                out.append((f"theta[a={a}]", [self.theta[(b, a)] for b in (0, 1)]))
        if self.phi is not None:
            out.append(("phi", [self.phi[cb] for cb in _CB_PAIRS]))
        if self.arm_weights is not None:
            out.append(("arm_weights", list(self.arm_weights)))
        return out


def _validate(t: ObservedTables, max_deviation: Fraction) -> ObservedTables:
    for name, values in t.blocks():
        for v in values:
            if not 0 <= v <= 1:
                raise ValidationError(f"{name} entry {format_rational(v)} is outside [0, 1]")
        slack = sum(values) - 1
        if abs(slack) > max_deviation:
            raise ValidationError(
                f"{name} sums to {format_rational(sum(values))}, slack {format_rational(slack)}"
            )
    return t


def build_tables(
    zeta: Mapping[str, Sequence[RationalLike]] | None = None,
    gamma: Mapping[str, Sequence[RationalLike]] | None = None,
    theta: Mapping[str, Sequence[RationalLike]] | None = None,
    phi: Sequence[RationalLike] | None = None,
    arm_weights: Sequence[RationalLike] | None = None,
    *,
    decimal_input: bool = False,
    max_deviation: RationalLike = DEFAULT_SUM_DEVIATION,
) -> ObservedTables:
    """Construct validated tables from the JSON-shaped nested values."""
    max_deviation = rational(max_deviation)

    def arm_block(table: Mapping[str, Sequence[RationalLike]], width: int, what: str):
        if set(table.keys()) != {"a1", "a2"}:
            raise ParseError(f"{what} table needs exactly the keys 'a1' and 'a2'")
        rows = {}
        for a in _ARMS:
            row = [rational(v) for v in table[f"a{a}"]]
            if len(row) != width:
                raise ParseError(f"{what} row a{a} needs {width} entries, got {len(row)}")
            rows[a] = row
        return rows

    zeta_map = None
    if zeta is not None:
        rows = arm_block(zeta, 4, "zeta")
        zeta_map = {(c, b, a): rows[a][i] for a in _ARMS for i, (c, b) in enumerate(_CB_PAIRS)}
    gamma_map = None
    if gamma is not None:
        rows = arm_block(gamma, 2, "gamma")
        gamma_map = {(c, a): rows[a][c] for a in _ARMS for c in (0, 1)}
    theta_map = None
    if theta is not None:
        rows = arm_block(theta, 2, "theta")
        theta_map = {(b, a): rows[a][b] for a in _ARMS for b in (0, 1)}
    phi_map = None
    if phi is not None:
        row = [rational(v) for v in phi]
        if len(row) != 4:
            raise ParseError(f"phi needs 4 entries, got {len(row)}")
        phi_map = {cb: row[i] for i, cb in enumerate(_CB_PAIRS)}
    weights = None
    if arm_weights is not None:
        row = [rational(v) for v in arm_weights]
        if len(row) != 2:
            raise ParseError(f"arm_weights needs 2 entries, got {len(row)}")
        weights = (row[0], row[1])
    t = ObservedTables(zeta_map, gamma_map, theta_map, phi_map, weights, decimal_input)
    return _validate(t, max_deviation)


def _contains_decimal(value) -> bool:
    if isinstance(value, str):
        return "." in value or "e" in value.lower()
    if isinstance(value, Mapping):
        return any(_contains_decimal(v) for v in value.values())
    if isinstance(value, (list, tuple)):
        return any(_contains_decimal(v) for v in value)
    return False


_TABLE_KEYS = ("zeta", "gamma", "theta", "phi", "arm_weights")


def _load_json_text(text: str, max_deviation: Fraction) -> ObservedTables:
    try:
        # Keeping float literals as their source text preserves exactness.
        raw = json.loads(text, parse_float=str)
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid JSON: {exc}") from exc
    if not isinstance(raw, dict):
        raise ParseError("top-level JSON value must be an object")
    unknown = set(raw) - set(_TABLE_KEYS)
    if unknown:
        raise ParseError(f"unknown table keys: {sorted(unknown)}")
    try:
        return build_tables(
            zeta=raw.get("zeta"),
            gamma=raw.get("gamma"),
            theta=raw.get("theta"),
            phi=raw.get("phi"),
            arm_weights=raw.get("arm_weights"),
            decimal_input=_contains_decimal(raw),
            max_deviation=max_deviation,
        )
    except (TypeError, ValueError) as exc:
        if isinstance(exc, (ParseError, ValidationError)):
            raise
        raise ParseError(str(exc)) from exc


def _load_csv_text(text: str, max_deviation: Fraction) -> ObservedTables:
    reader = csv.DictReader(text.splitlines())
    if reader.fieldnames is None or [f.strip() for f in reader.fieldnames] != ["c", "b", "a", "value"]:
        raise ParseError("CSV zeta tables need the header row 'c,b,a,value'")
    entries: dict[tuple[int, int, int], str] = {}
    for row in reader:
        try:
            key = (int(row["c"]), int(row["b"]), int(row["a"]))
        except (TypeError, ValueError) as exc:
            raise ParseError(f"bad CSV row {row}: {exc}") from exc
        if key in entries:
            raise ParseError(f"duplicate CSV row for (c,b,a) = {key}")
        entries[key] = row["value"]
    expected = {(c, b, a) for c, b in _CB_PAIRS for a in _ARMS}
    if set(entries) != expected:
        missing = sorted(expected - set(entries))
        extra = sorted(set(entries) - expected)
        raise ParseError(f"CSV zeta table incomplete; missing {missing}, unexpected {extra}")
    zeta = {
        f"a{a}": [entries[(c, b, a)] for c, b in _CB_PAIRS]
        for a in _ARMS
    }
    return build_tables(
        zeta=zeta,
        decimal_input=_contains_decimal(zeta),
        max_deviation=max_deviation,
    )


def load(
    source: str | Path,
    *,
    max_deviation: RationalLike = DEFAULT_SUM_DEVIATION,
) -> ObservedTables:
    """Load tables from a bundled dataset name or a JSON/CSV file path."""
    max_deviation = rational(max_deviation)
    if isinstance(source, str) and source in BUNDLED_DATASETS:
        text = (
            resources.files("ivbounds")
            .joinpath("datasets", f"{source}.json")
            .read_text(encoding="utf-8")
        )
        return _load_json_text(text, max_deviation)
    path = Path(source)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ParseError(f"cannot read {path}: {exc}") from exc
    if path.suffix.lower() == ".csv":
        return _load_csv_text(text, max_deviation)
    return _load_json_text(text, max_deviation)


def serialize(t: ObservedTables) -> dict:
    """JSON-ready dict with exact 'p/q' strings; load(serialize(t)) == t."""
    out: dict = {}
    if t.zeta is not None:
        out["zeta"] = {
            f"a{a}": [format_rational(t.zeta[(c, b, a)]) for c, b in _CB_PAIRS] for a in _ARMS
        }
    if t.gamma is not None:
        out["gamma"] = {f"a{a}": [format_rational(t.gamma[(c, a)]) for c in (0, 1)] for a in _ARMS}
    if t.theta is not None:
        out["theta"] = {f"a{a}": [format_rational(t.theta[(b, a)]) for b in (0, 1)] for a in _ARMS}
    if t.phi is not None:
        out["phi"] = [format_rational(t.phi[cb]) for cb in _CB_PAIRS]
    if t.arm_weights is not None:
        out["arm_weights"] = [format_rational(w) for w in t.arm_weights]
    return out


def save(t: ObservedTables, path: str | Path) -> None:
    Path(path).write_text(json.dumps(serialize(t), indent=2) + "\n", encoding="utf-8")


def derive_marginals(t: ObservedTables, *, require_phi: bool = False) -> ObservedTables:
    """Fill missing gamma/theta (and phi when arm weights allow) from zeta.

    Explicitly provided tables are never overwritten, so the operation is
    idempotent. With require_phi, absent arm weights raise
    MissingArmWeights instead of silently skipping phi.
    """
    if t.zeta is None:
        raise ValidationError("cannot derive marginals without a zeta table")
    gamma = t.gamma
    if gamma is None:
        gamma = {
            (c, a): t.zeta[(c, 0, a)] + t.zeta[(c, 1, a)] for c in (0, 1) for a in _ARMS
        }
    theta = t.theta
    if theta is None:
        theta = {
            (b, a): t.zeta[(0, b, a)] + t.zeta[(1, b, a)] for b in (0, 1) for a in _ARMS
        }
    phi = t.phi
    if phi is None:
        if t.arm_weights is not None:
            w1, w2 = t.arm_weights
            phi = {
                (c, b): t.zeta[(c, b, 1)] * w1 + t.zeta[(c, b, 2)] * w2 for c, b in _CB_PAIRS
            }
        elif require_phi:
            raise MissingArmWeights(
                "phi requires arm weights; no equal-weight default is assumed"
            )
    return ObservedTables(t.zeta, gamma, theta, phi, t.arm_weights, t.decimal_input)


def renormalize(
    t: ObservedTables,
    *,
    max_deviation: RationalLike = DEFAULT_SUM_DEVIATION,
) -> ObservedTables:
    """Rescale each probability block to sum exactly to 1.

    Blocks whose sum deviates from 1 by more than max_deviation raise
    ValidationError; renormalization is meant to absorb rounding, not to
    repair structurally bad tables.
    """
    max_deviation = rational(max_deviation)
    for name, values in t.blocks():
        slack = sum(values) - 1
        if abs(slack) > max_deviation:
            raise ValidationError(
                f"{name} sums to {format_rational(sum(values))}, "
                f"slack {format_rational(slack)} exceeds {format_rational(max_deviation)}"
            )

    def scale_map(table, keys_sum):
        scaled = {}
        for key_group in keys_sum:
            total = sum(table[k] for k in key_group)
            for k in key_group:
                scaled[k] = table[k] / total
        return scaled

    zeta = None
    if t.zeta is not None:
        zeta = scale_map(t.zeta, [[(c, b, a) for c, b in _CB_PAIRS] for a in _ARMS])
    gamma = None
    if t.gamma is not None:
        gamma = scale_map(t.gamma, [[(c, a) for c in (0, 1)] for a in _ARMS])
    theta = None
    if t.theta is not None:
        theta = scale_map(t.theta, [[(b, a) for b in (0, 1)] for a in _ARMS])
    phi = None
    if t.phi is not None:
        total = sum(t.phi.values())
        phi = {k: v / total for k, v in t.phi.items()}
    weights = None
    if t.arm_weights is not None:
        total = sum(t.arm_weights)
        weights = (t.arm_weights[0] / total, t.arm_weights[1] / total)
    return ObservedTables(zeta, gamma, theta, phi, weights, t.decimal_input)


def observable_point(labels: Sequence[str], t: ObservedTables) -> dict[str, Fraction]:
    """Assemble the coordinate values a scenario needs from the tables.

    Labels follow the scenario coordinate scheme. x-coordinates (joint with
    the instrument) are built from zeta and arm weights. A label whose
    table is absent raises ValidationError; x-labels without arm weights
    raise MissingArmWeights.
    """
    import re as _re

    point: dict[str, Fraction] = {}
    for label in labels:
        m = _re.fullmatch(r"g([01])([12])", label)
        if m:
            if t.gamma is None:
                raise ValidationError(f"coordinate {label} needs a gamma table")
            point[label] = t.gamma[(int(m.group(1)), int(m.group(2)))]
            continue
        m = _re.fullmatch(r"t([01])([12])", label)
        if m:
            if t.theta is None:
                raise ValidationError(f"coordinate {label} needs a theta table")
            point[label] = t.theta[(int(m.group(1)), int(m.group(2)))]
            continue
        m = _re.fullmatch(r"z([01])([01])\.([12])", label)
        if m:
            if t.zeta is None:
                raise ValidationError(f"coordinate {label} needs a zeta table")
            point[label] = t.zeta[(int(m.group(1)), int(m.group(2)), int(m.group(3)))]
            continue
        m = _re.fullmatch(r"p([01])([01])", label)
        if m:
            if t.phi is None:
                raise ValidationError(f"coordinate {label} needs a phi table")
            point[label] = t.phi[(int(m.group(1)), int(m.group(2)))]
            continue
        m = _re.fullmatch(r"x([01])([01])([12])", label)
        if m:
            if t.zeta is None:
                raise ValidationError(f"coordinate {label} needs a zeta table")
            if t.arm_weights is None:
                raise MissingArmWeights(f"coordinate {label} needs arm weights")
            c, b, a = int(m.group(1)), int(m.group(2)), int(m.group(3))
            point[label] = t.zeta[(c, b, a)] * t.arm_weights[a - 1]
            continue
        raise ValidationError(f"no table rule for coordinate label {label!r}")
    return point
