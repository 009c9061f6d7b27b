"""Symbolic admissible towers over a forest of coding trees.

A plan never builds a hyperbolic surface.  Each level ``n`` records the
marked surfaces ``S_v`` for the floor-``n`` vertices, certified lower
bounds for the complement ``X_n`` and for ``X_n^*``, and the lift maps of
the floor-``(n-1)`` edges.  Each level is produced by four steps:

1. attach tubes for the roots born on this floor and for a genus reservoir;
2. carve the marked surfaces out of the reservoir;
3. a second covering pass which makes the complement's systole and
   collars large;
4. glue the systole bounds of the pieces to bound ``X_n^*``.

All numeric targets are ``n + 1`` so that the admissibility sequences
satisfy ``sigma_n >= n`` and ``K_n >= n`` with room to spare.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Mapping, Sequence

from .cover_lab import TubeCertificate, attach_tube, connectivity, identity_presentation
from .forest_kit import Forest, ForestOfCodingTrees, LeafCensus, leaf_census, validate_forest_of_trees
from .hyp_cert import (
    Bound,
    GluePart,
    NoBound,
    Premise,
    given,
    glue_systole,
    half_collar_bound,
    inj_radius_bound,
    tube_genus_bound,
)
from .surface_kit import (
    CodingTree,
    GoodTreeInclusion,
    ValidationReport,
    Violation,
    is_good_inclusion,
    surface_of,
)

ATTACH_TUBE = "AttachTube"
CARVE = "CarveSubsurface"
SECOND_PASS = "SecondCoveringPass"


@dataclass(frozen=True)
class PlanStep:
    kind: str
    level: int
    target: str
    parameter: float
    certificate: Bound | TubeCertificate | None = None
    room: tuple[int, int] | None = None  # (genus, boundary) for carving
    justification: tuple[str, ...] = ()

    def line(self) -> str:
        extra = f" room={self.room}" if self.room is not None else ""
        return f"level {self.level}: {self.kind}({self.target}, {self.parameter:g}){extra} <- {'; '.join(self.justification)}"


@dataclass(frozen=True)
class ComplementRecord:
    internal_systole: Bound
    half_collar: Bound
    boundary_length: Bound


@dataclass(frozen=True)
class TowerLevel:
    floor: int
    marked_surfaces: Mapping[int, CodingTree]
    complement: ComplementRecord
    star_complement: Bound | NoBound
    lift_maps: Mapping[tuple[int, int], GoodTreeInclusion]
    star_images: Mapping[int, tuple[int, ...]]
    genus_reserve: int

    @property
    def sigma(self) -> float:
        return self.complement.internal_systole.value

    @property
    def K(self) -> float:
        return self.complement.half_collar.value


@dataclass(frozen=True)
class TowerPlan:
    forest: ForestOfCodingTrees
    levels: tuple[TowerLevel, ...]
    steps: tuple[tuple[PlanStep, ...], ...]
    base_systole: float = 1.0

    def audit(self) -> list[str]:
        out = []
        for lvl, steps in zip(self.levels, self.steps):
            out.append(f"== level {lvl.floor}: sigma >= {lvl.sigma:g}, K >= {lvl.K:g}, reserve genus {lvl.genus_reserve}")
            out += [s.line() for s in steps]
            out += ["  " + x for x in lvl.complement.half_collar.derivation()]
            if lvl.star_complement:
                out += ["  " + x for x in lvl.star_complement.derivation()]
        return out


def genus_reservation(trees: Sequence[CodingTree]) -> int:
    """Genus of a reservoir large enough to carve every tree of a floor."""
    if not trees:
        return 0
    return max(surface_of(t).genus + surface_of(t).boundary_count for t in trees)


def _tube_K_for(target: float, genus: int) -> float:
    """Smallest integer ``K > target`` whose tube of parameter ``L = 4K`` has
    genus at least ``genus``.

    Once attached, such a tube leaves a half-collar of width at least
    ``L / 4 = K``, which must strictly exceed the target.
    """
    k = max(1, math.floor(target) + 1)
    while tube_genus_bound(4 * k) < genus:
        k += 1
    return float(k)


def second_pass_bounds(K: float) -> tuple[Bound, Bound, Bound]:
    """Certificates produced by one second covering pass with parameter ``K``.

    The finite covering step is consumed as a certificate: every curve of
    the new complement except its boundary lifts is longer than ``2K + l``
    with boundary lengths ``l = K + 1``.  The half-collar lemma then yields
    a collar wider than ``K``.
    """
    length = given("boundary_length", K + 1, f"second covering pass K={K:g}")
    sigma = Bound(
        "internal_systole",
        2 * K + length.value + 1,
        (
            Premise("filling-pair", "a filling pair of curves exists and is lengthened", 0.0, 1.0, True),
            Premise("second-systole", f"second systole pushed above 2K+l={2 * K + length.value:g}", 0.0, 1.0, True),
        ),
        True,
        "finite covering theorem",
    )
    collar = half_collar_bound(sigma, length)
    assert isinstance(collar, Bound)
    return sigma, collar, length


def build_tower_plan(f: ForestOfCodingTrees, levels: int, base_systole: float = 1.0) -> TowerPlan:
    if levels < 1:
        raise ValueError("levels must be >= 1")
    rep = validate_forest_of_trees(f)
    if not rep.ok:
        raise ValueError("forest is not valid: " + "; ".join(str(v) for v in rep.violations))
    floors = f.forest.floors
    if len(floors) < levels:
        raise ValueError(f"forest has {len(floors)} floors, plan needs {levels}")
    inn = f.forest.in_edges()
    out_levels = []
    out_steps = []
    for n in range(levels):
        target = float(n + 1)
        verts = floors[n]
        trees = [f.tree_at[v] for v in verts]
        g = genus_reservation(trees)
        steps: list[PlanStep] = []

        # Step 1: roots and room
        kt = _tube_K_for(target, g)
        for v in verts:
            if not inn[v]:
                cert = TubeCertificate.for_K(4 * kt)
                steps.append(PlanStep(ATTACH_TUBE, n, f"root:{v}", 4 * kt, cert, None, ("tube attachment", f"L=4K, K={kt:g}")))
        room_cert = TubeCertificate.for_K(4 * kt)
        if verts:
            steps.append(PlanStep(ATTACH_TUBE, n, "room", 4 * kt, room_cert, None, ("genus reservoir", f"genus >= {room_cert.genus_lower} >= {g}")))

        # Step 2: carve
        for v, t in zip(verts, trees):
            sig = surface_of(t)
            steps.append(
                PlanStep(CARVE, n, f"vertex:{v}", 0.0, None, (sig.genus, sig.boundary_count),
                         ("complement admits geodesic boundary", f"fits reservoir genus {g}"))
            )

        # Step 3: second covering pass
        sigma, collar, length = second_pass_bounds(target)
        steps.append(PlanStep(SECOND_PASS, n, "complement", target, collar, None, ("second covering pass", "filling pair available")))

        # Step 4: glue the systole of X_n^*
        parts = [
            GluePart(
                "X",
                sigma,
                tuple(f"b{v}" for v in verts),
                {f"b{v}": collar for v in verts},
                {f"b{v}": length for v in verts},
            )
        ]
        # other geodesics of the tube are longer than L; the attached lift
        # keeps a half-collar of width at least L / 4
        tube_sys = given("internal_systole", room_cert.K, "tube certificate")
        tube_collar = given("half_collar_width", room_cert.attached_collar_width, "tube certificate", strict=False)
        for v in verts:
            parts.append(
                GluePart(f"S{v}", tube_sys, (f"b{v}",), {f"b{v}": tube_collar}, {f"b{v}": length})
            )
        star = glue_systole(parts, target)
        if not star:
            raise AssertionError(f"internal invariant violated at level {n}: {star}")

        lift_maps = {}
        star_images = {}
        if n > 0:
            for e in f.forest.edges:
                if e[1] in verts:
                    inc = f.inclusion_at[e]
                    lift_maps[e] = inc
                    star_images[e[1]] = tuple(sorted(inc.mapping.values()))
        out_levels.append(
            TowerLevel(n, dict(zip(verts, trees)), ComplementRecord(sigma, collar, length), star, lift_maps, star_images, g)
        )
        out_steps.append(tuple(steps))
    return TowerPlan(f, tuple(out_levels), tuple(out_steps), base_systole)


def verify_admissible(p: TowerPlan) -> ValidationReport:
    out: list[Violation] = []
    f = p.forest
    inn = f.forest.in_edges()
    for lvl, steps in zip(p.levels, p.steps):
        n = lvl.floor
        # (1) internal systole of the complement
        s = lvl.complement.internal_systole
        if not s.premises or s.value < n:
            out.append(Violation("systole", f"sigma_{n} not certified >= {n}", (n,)))
        # (2) collar width, rederived from the step-3 certificate
        passes = [st for st in steps if st.kind == SECOND_PASS]
        if not passes:
            out.append(Violation("collar", f"no second covering pass certifies K_{n}", (n,)))
        else:
            st = passes[-1]
            sig, col, _ = second_pass_bounds(st.parameter)
            if col.value < n or lvl.complement.half_collar.value > col.value or st.parameter < n:
                out.append(Violation("collar", f"K_{n} not certified >= {n}", (n,)))
        # (3) lift maps commute with the forest inclusions
        if n > 0:
            for e in f.forest.edges:
                if e[1] not in lvl.marked_surfaces:
                    continue
                j = lvl.lift_maps.get(e)
                i = f.inclusion_at.get(e)
                if j is None or i is None:
                    out.append(Violation("lift", "edge has no lift map", e))
                elif j.mapping != i.mapping or not is_good_inclusion(j.source, j.target, j.mapping):
                    out.append(Violation("lift", "lift map does not commute with the forest inclusion", e))
        # (4) S_n^* is the union of images of the incoming inclusions
        if n > 0:
            expect = {e[1]: tuple(sorted(j.mapping.values())) for e, j in lvl.lift_maps.items()}
            if dict(lvl.star_images) != expect:
                out.append(Violation("star", f"S_{n}^* differs from the union of inclusion images", (n,)))
        # steps 1, 2 and 4 bookkeeping
        for v, t in lvl.marked_surfaces.items():
            if not inn[v] and not any(st.kind == "AttachTube" and st.target == f"root:{v}" for st in steps):
                out.append(Violation("roots", "root created without a tube", (n, v)))
            carve = [st for st in steps if st.kind == CARVE and st.target == f"vertex:{v}"]
            sig = surface_of(t)
            if not carve or carve[0].room != (sig.genus, sig.boundary_count):
                out.append(Violation("carve", "marked surface not carved consistently", (n, v)))
            elif sum(carve[0].room) > lvl.genus_reserve:
                out.append(Violation("carve", "carved surface exceeds the reserved room", (n, v)))
        rooms = [st for st in steps if st.kind == ATTACH_TUBE and st.target == "room"]
        if lvl.marked_surfaces and (not rooms or rooms[0].certificate.genus_lower < lvl.genus_reserve):
            out.append(Violation("room", "genus reservoir too small", (n,)))
        for st in steps:
            if st.kind == ATTACH_TUBE and (
                not st.certificate.consistent()
                or abs(st.parameter - st.certificate.K) > 1e-12
                or st.certificate.attached_collar_width is None
                or not st.certificate.attached_collar_width > n
            ):
                out.append(Violation("tube", "tube certificate inconsistent", (n, st.target)))
        if not lvl.star_complement or lvl.star_complement.value < n:
            out.append(Violation("star-systole", f"X_{n}^* systole not certified", (n,)))
    checks = (
        "(1) sigma_n certified and >= n",
        "(2) K_n certified by a second covering pass and >= n",
        "(3) lift maps commute with forest inclusions",
        "(4) S_n^* is the union of inclusion images",
    )
    return ValidationReport(tuple(out), checks)


def growth_witness(p: TowerPlan) -> list[tuple[int, float | None]]:
    """Per level, the injectivity-radius bound ``min(sigma_n, K_n / 2)`` far
    from the boundary, or ``None`` while its premise still fails."""
    out = []
    for lvl in p.levels:
        b = inj_radius_bound(p.base_systole, lvl.complement.half_collar, lvl.complement.internal_systole)
        out.append((lvl.floor, b.value if b else None))
    return out


def census_of_tower(p: TowerPlan, depth: int | None = None) -> LeafCensus:
    rep = verify_admissible(p)
    if not rep.ok:
        raise ValueError("plan is not admissible: " + "; ".join(str(v) for v in rep.violations))
    census = leaf_census(p.forest, depth)
    wit = tuple(
        (f"level {n}", "injectivity radius >= " + (f"{v:g}" if v is not None else "not certified (premise fails)"))
        for n, v in growth_witness(p)
    )
    return replace(census, witnesses=wit)


def replay_tubes(p: TowerPlan) -> list[tuple[int, str, tuple[int, ...], int]]:
    """Replay every AttachTube through the gluing algebra.

    Returns ``(level, target, spectrum of the attached pair, components)``.
    """
    out = []
    for steps in p.steps:
        for st in steps:
            if st.kind != ATTACH_TUBE:
                continue
            pres = attach_tube(identity_presentation(), ("S", "a+"), st.parameter)
            out.append((st.level, st.target, pres.spectrum().degrees, len(connectivity(pres))))
    return out


def empty_forest(floors: int) -> ForestOfCodingTrees:
    """Forest with no marked surfaces (every leaf a disk)."""
    return ForestOfCodingTrees(Forest(tuple(() for _ in range(floors)), ()), {}, {})


def delete_step(p: TowerPlan, level: int, kind: str) -> TowerPlan:
    steps = list(p.steps)
    steps[level] = tuple(s for s in steps[level] if s.kind != kind)
    return replace(p, steps=tuple(steps))


def corrupt_lift_map(p: TowerPlan, level: int) -> TowerPlan:
    """Swap the images of two vertices in one lift map of ``level``."""
    levels = list(p.levels)
    lvl = levels[level]
    e, j = next(iter(lvl.lift_maps.items()))
    items = list(j.vertex_map)
    targets = sorted(set(j.target.vertices) - set(j.mapping.values())) or [v for _, v in items]
    # send the last source vertex somewhere else
    src, old = items[-1]
    new = next(t for t in targets if t != old)
    items[-1] = (src, new)
    bad = GoodTreeInclusion(j.source, j.target, tuple(items))
    lm = dict(lvl.lift_maps)
    lm[e] = bad
    levels[level] = replace(lvl, lift_maps=lm)
    return replace(p, levels=tuple(levels))
