"""Certified lower bounds from collar and systole inequalities.

Every evaluator returns either a :class:`Bound` carrying the premises it
relied on, or a falsy :class:`NoBound` naming the premise that failed.
Premise checks are done in double precision with a fixed slack: a premise
only certifies when it holds with a margin larger than ``SLACK``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Mapping, Sequence, Union

SLACK = 1e-9

QUANTITIES = (
    "internal_systole",
    "half_collar_width",
    "injectivity_radius",
    "boundary_length",
    "crossing_length",
    "genus",
)


@dataclass(frozen=True)
class Premise:
    name: str
    statement: str
    lhs: float
    rhs: float
    holds: bool

    @property
    def margin(self) -> float:
        return self.rhs - self.lhs

    def to_json(self) -> dict:
        return {
            "name": self.name,
            "statement": self.statement,
            "lhs": _num(self.lhs),
            "rhs": _num(self.rhs),
            "holds": self.holds,
        }


@dataclass(frozen=True)
class Bound:
    quantity: str
    value: float
    premises: tuple[Union[Premise, "Bound"], ...] = ()
    strict: bool = True
    rule: str = "given"
    direction: str = "lower"

    def __post_init__(self) -> None:
        if self.quantity not in QUANTITIES:
            raise ValueError(f"unknown quantity {self.quantity!r}")
        if not (self.value >= 0) or math.isinf(self.value):
            raise ValueError(f"bound value must be finite and nonnegative, got {self.value}")

    def __bool__(self) -> bool:
        return True

    def exceeds(self, k: float) -> bool:
        """Does the bound certify ``quantity > k`` (with slack)?"""
        return self.value - k > SLACK or (self.strict and self.value - k >= -SLACK and self.value >= k)

    def to_json(self) -> dict:
        return {
            "format": "cert/1",
            "quantity": self.quantity,
            "value": self.value,
            "strict": self.strict,
            "rule": self.rule,
            "premises": [p.to_json() for p in self.premises],
        }

    def derivation(self, indent: int = 0) -> list[str]:
        rel = ">" if self.strict else ">="
        pad = "  " * indent
        lines = [f"{pad}{self.quantity} {rel} {self.value:.6g}  [{self.rule}]"]
        for p in self.premises:
            if isinstance(p, Bound):
                lines += p.derivation(indent + 1)
            else:
                mark = "ok" if p.holds else "FAILS"
                lines.append(f"{pad}  premise {p.name}: {p.statement} ({mark})")
        return lines


@dataclass(frozen=True)
class NoBound:
    reason: str
    failed: tuple[str, ...] = ()
    premise: Premise | None = None

    def __bool__(self) -> bool:
        return False


def given(quantity: str, value: float, source: str = "given", strict: bool = True) -> Bound:
    return Bound(quantity, float(value), (), strict, source)


def bound_from_json(d: Mapping) -> Bound:
    prem: list = []
    for p in d.get("premises", []):
        if "quantity" in p:
            prem.append(bound_from_json(p))
        else:
            prem.append(Premise(p["name"], p["statement"], _unnum(p["lhs"]), _unnum(p["rhs"]), p["holds"]))
    return Bound(d["quantity"], float(d["value"]), tuple(prem), d.get("strict", True), d.get("rule", "given"))


def _num(x: float):
    return x if math.isfinite(x) else ("inf" if x > 0 else "-inf")


def _unnum(x) -> float:
    return float(x)


def _as_value(x: Union[Bound, float]) -> float:
    return x.value if isinstance(x, Bound) else float(x)


def _wrap(quantity: str, x: Union[Bound, float]) -> Bound:
    return x if isinstance(x, Bound) else given(quantity, x)


def _leq(name: str, statement: str, lhs: float, rhs: float) -> Premise:
    return Premise(name, statement, lhs, rhs, rhs - lhs > SLACK)


def safe_cosh(x: float) -> float:
    try:
        return math.cosh(x)
    except OverflowError:
        return math.inf


# --------------------------------------------------------------------------


def half_collar_bound(
    sigma: Union[Bound, float], l_alpha: Union[Bound, float], pants: bool = False
) -> Bound | NoBound:
    """Half-collar width of a boundary curve from the internal systole.

    For a compact surface that is not a pair of pants, with internal
    systole ``sigma`` and a boundary geodesic of length ``l_alpha``, the
    half-collar width exceeds ``(sigma - l_alpha) / 2``.
    """
    s, la = _as_value(sigma), _as_value(l_alpha)
    if pants:
        return NoBound("surface is a pair of pants", ("not-pants",))
    if la < 0:
        return NoBound("boundary length must be nonnegative", ("l_alpha>=0",))
    p = _leq("systole-exceeds-boundary", f"l_alpha={la:.6g} < sigma={s:.6g}", la, s)
    if not p.holds:
        return NoBound("sigma <= l_alpha, no bound derivable", (p.name,), p)
    prem = (
        _wrap("internal_systole", sigma),
        _wrap("boundary_length", l_alpha),
        Premise("not-pants", "surface is not a pair of pants", 0.0, 1.0, True),
        p,
    )
    return Bound("half_collar_width", (s - la) / 2, prem, True, "half-collar lemma")


def inj_radius_bound(
    sys: Union[Bound, float], K0: Union[Bound, float], sigma: Union[Bound, float]
) -> Bound | NoBound:
    """Injectivity radius far from the boundary.

    Needs ``K0 <= sys * cosh(K0 / 2)``; the bound ``min(sigma, K0 / 2)``
    then holds at points at distance at least ``K0`` from the boundary.
    """
    sy, k0, sg = _as_value(sys), _as_value(K0), _as_value(sigma)
    if min(sy, k0, sg) <= 0:
        return NoBound("all arguments must be positive", ("positive",))
    rhs = sy * safe_cosh(k0 / 2)
    p = _leq("collar-vs-systole", f"K0={k0:.6g} <= sys*cosh(K0/2)={rhs:.12g}", k0, rhs)
    if not p.holds:
        return NoBound("premise K0 <= sys*cosh(K0/2) fails", (p.name,), p)
    prem = (
        _wrap("internal_systole", sigma),
        _wrap("half_collar_width", K0),
        _wrap("internal_systole", sys),
        p,
    )
    return Bound("injectivity_radius", min(sg, k0 / 2), prem, False, "injectivity-radius lemma")


def crossing_bound(K0: Union[Bound, float]) -> Bound:
    """Closed geodesics crossing a collared boundary curve are longer than ``K0``."""
    k0 = _as_value(K0)
    if not k0 > 0:
        raise ValueError("K0 must be positive")
    return Bound("crossing_length", k0, (_wrap("half_collar_width", K0),), True, "crossing-collar lemma")


@dataclass(frozen=True)
class GluePart:
    """One piece of a decomposition along boundary curves.

    ``interior_circles`` lists the boundary curves of the piece lying in
    the interior of the glued surface; each needs a collar witness and a
    length witness.
    """

    name: str
    internal_systole: Bound | float | None
    interior_circles: tuple[str, ...] = ()
    collars: Mapping[str, Bound | float] = field(default_factory=dict)
    boundary_lengths: Mapping[str, Bound | float] = field(default_factory=dict)


def glue_systole(
    parts: Sequence[GluePart], K: float, meet_along_boundary: bool = True
) -> Bound | NoBound:
    """Internal systole of a union of pieces.

    The bound ``K`` holds when for every part the internal systole, the
    half-collar widths and the lengths of its interior boundary curves all
    exceed ``K``.  The first failing part and clause are reported.
    """
    if not parts:
        raise ValueError("empty decomposition")
    if not meet_along_boundary:
        return NoBound("pieces must meet only along boundary curves", ("decomposition",))
    prem: list = []
    for part in parts:
        s = part.internal_systole
        if s is None or not _wrap("internal_systole", s).exceeds(K):
            return NoBound(f"part {part.name}: internal systole not > {K}", (part.name, "clause 1"))
        prem.append(_wrap("internal_systole", s))
        for c in part.interior_circles:
            w = part.collars.get(c)
            if w is None or not _wrap("half_collar_width", w).exceeds(K):
                return NoBound(f"part {part.name}: collar of {c} not > {K}", (part.name, "clause 2", c))
            prem.append(_wrap("half_collar_width", w))
        for c in part.interior_circles:
            w = part.boundary_lengths.get(c)
            if w is None or not _wrap("boundary_length", w).exceeds(K):
                return NoBound(f"part {part.name}: length of {c} not > {K}", (part.name, "clause 3", c))
            prem.append(_wrap("boundary_length", w))
    return Bound("internal_systole", float(K), tuple(prem), True, "systole gluing lemma")


def tube_genus_raw(K: float) -> float:
    if not K > 0:
        raise ValueError("K must be positive")
    return (safe_cosh(K) - 1) / 2


def tube_area_bound(K: float) -> float:
    """Area of a hyperbolic disk of radius ``K``: ``2 pi (cosh K - 1)``."""
    return 2 * math.pi * (tube_genus_raw(K) * 2)


def tube_genus_bound(K: float) -> int:
    """Smallest integer at least ``(cosh K - 1) / 2``.

    A surface containing an embedded disk of radius ``K`` has area at
    least ``2 pi (cosh K - 1)``; by Gauss-Bonnet its genus is then at least
    this many.  The ceiling is taken after removing the slack so that a
    value that is an integer up to rounding is not pushed one higher.
    """
    return max(0, math.ceil(tube_genus_raw(K) - SLACK))
