"""Finite covers given by permutations or by gluing data.

Permutations act on ``{1, ..., d}``.  A word is evaluated with its first
letter acting first, so ``evaluate_word(c, "a b")`` is the composite
``sigma(b) o sigma(a)``; products of cycles are composed right to left,
which makes ``(1 3 5) == (1 3)(3 5)``.
"""

from __future__ import annotations

import itertools
import math
import random
import re
from collections import Counter
from dataclasses import dataclass, replace
from functools import lru_cache
from typing import Iterable, Mapping, Sequence

from .hyp_cert import Premise, SLACK, tube_genus_bound

# ---------------------------------------------------------------------------
# permutations


@dataclass(frozen=True)
class Perm:
    """Permutation of ``{1..d}`` stored 0-based: ``images[i] = sigma(i+1) - 1``."""

    images: tuple[int, ...]

    @classmethod
    def identity(cls, d: int) -> "Perm":
        return cls(tuple(range(d)))

    @classmethod
    def from_cycles(cls, d: int, cycles: Iterable[Sequence[int]]) -> "Perm":
        img = list(range(d))
        seen: set[int] = set()
        for cyc in cycles:
            for x in cyc:
                if not 1 <= x <= d or x in seen:
                    raise ValueError(f"bad cycle {tuple(cyc)} for degree {d}")
                seen.add(x)
            for x, y in zip(cyc, list(cyc[1:]) + [cyc[0]]):
                img[x - 1] = y - 1
        return cls(tuple(img))

    @classmethod
    def parse(cls, d: int, text: str) -> "Perm":
        """Parse cycle notation such as ``"(1)(2 3 4 5)"``; ``"()"`` is the identity."""
        cycles = []
        for body in re.findall(r"\(([^()]*)\)", text):
            nums = [int(x) for x in re.split(r"[\s,]+", body.strip()) if x]
            if nums:
                cycles.append(nums)
        if re.sub(r"\([^()]*\)|\s", "", text):
            raise ValueError(f"malformed cycle notation {text!r}")
        return cls.from_cycles(d, cycles)

    @property
    def degree(self) -> int:
        return len(self.images)

    def __call__(self, x: int) -> int:
        return self.images[x - 1] + 1

    def then(self, other: "Perm") -> "Perm":
        """Apply ``self`` first, then ``other``."""
        o = other.images
        return Perm(tuple(o[i] for i in self.images))

    def __mul__(self, other: "Perm") -> "Perm":
        # right-to-left: (self * other)(x) = self(other(x))
        return other.then(self)

    def inverse(self) -> "Perm":
        inv = [0] * len(self.images)
        for i, j in enumerate(self.images):
            inv[j] = i
        return Perm(tuple(inv))

    def cycles(self, include_fixed: bool = True) -> list[tuple[int, ...]]:
        seen = [False] * len(self.images)
        out = []
        for start in range(len(self.images)):
            if seen[start]:
                continue
            cyc = []
            x = start
            while not seen[x]:
                seen[x] = True
                cyc.append(x + 1)
                x = self.images[x]
            if include_fixed or len(cyc) > 1:
                out.append(tuple(cyc))
        return out

    def cycle_type(self) -> tuple[int, ...]:
        return tuple(sorted(len(c) for c in self.cycles()))

    def fixed_points(self) -> list[int]:
        return [i + 1 for i, j in enumerate(self.images) if i == j]

    def __str__(self) -> str:
        return "".join("(" + " ".join(map(str, c)) + ")" for c in self.cycles()) or "()"


def commutator(x: Perm, y: Perm) -> Perm:
    """Image of the word ``x y x^-1 y^-1`` (first letter acting first)."""
    return x.then(y).then(x.inverse()).then(y.inverse())


# ---------------------------------------------------------------------------
# words


@dataclass(frozen=True)
class Word:
    letters: tuple[tuple[str, int], ...] = ()

    @classmethod
    def parse(cls, text: str) -> "Word":
        """Parse ``"a b a^-1 b^-1"``, ``"a b A B"`` or the compact ``"aba^-1b^-1"``.

        Upper-case letters and the suffixes ``^-1``, ``⁻¹`` and ``'`` denote
        inverses.  Without spaces every letter is a separate generator.
        """
        text = text.strip().replace("⁻¹", "^-1")
        tokens = text.split() if " " in text else re.findall(r"[A-Za-z](?:\^-1|')?", text)
        if not " " in text and "".join(tokens) != text:
            raise ValueError(f"cannot parse word {text!r}")
        letters = []
        for tok in tokens:
            m = re.fullmatch(r"([A-Za-z][A-Za-z0-9_]*)(\^-1|\^1|')?", tok)
            if not m:
                raise ValueError(f"cannot parse letter {tok!r}")
            name, suffix = m.groups()
            exp = -1 if suffix in ("^-1", "'") else 1
            if len(name) == 1 and name.isupper():
                name, exp = name.lower(), -exp
            letters.append((name, exp))
        return cls(tuple(letters))

    def inverse(self) -> "Word":
        return Word(tuple((g, -e) for g, e in reversed(self.letters)))

    def __add__(self, other: "Word") -> "Word":
        return Word(self.letters + other.letters)

    def generators(self) -> set[str]:
        return {g for g, _ in self.letters}

    def __str__(self) -> str:
        return " ".join(g if e == 1 else f"{g}^-1" for g, e in self.letters) or "1"


def homology_mod2(w: Word, alphabet: Sequence[str]) -> tuple[int, ...]:
    """Class of ``w`` in the mod-2 abelianization of the free group."""
    counts = Counter(g for g, _ in w.letters)
    return tuple(counts[g] % 2 for g in alphabet)


def is_nonseparating_word(w: Word, alphabet: Sequence[str]) -> bool | None:
    """``True`` if the mod-2 class is nonzero (which forces non-separating);
    ``None`` when the class vanishes and the test is inconclusive."""
    return True if any(homology_mod2(w, alphabet)) else None


# ---------------------------------------------------------------------------
# permutation covers


@dataclass(frozen=True)
class PermCover:
    degree: int
    alphabet: tuple[str, ...]
    monodromy: tuple[Perm, ...]

    @classmethod
    def build(cls, degree: int, monodromy: Mapping[str, Perm | str]) -> "PermCover":
        alphabet = tuple(sorted(monodromy))
        perms = []
        for g in alphabet:
            p = monodromy[g]
            if isinstance(p, str):
                p = Perm.parse(degree, p)
            if p.degree != degree:
                raise ValueError(f"generator {g} acts on {p.degree} points, expected {degree}")
            perms.append(p)
        return cls(degree, alphabet, tuple(perms))

    def sigma(self, g: str) -> Perm:
        try:
            return self.monodromy[self.alphabet.index(g)]
        except ValueError:
            raise KeyError(f"unknown generator {g!r}") from None

    @property
    def transitive(self) -> bool:
        return len(self.orbits()) == 1

    def orbits(self) -> list[list[int]]:
        parent = list(range(self.degree))

        def find(x: int) -> int:
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        for p in self.monodromy:
            for i, j in enumerate(p.images):
                a, b = find(i), find(j)
                if a != b:
                    parent[max(a, b)] = min(a, b)
        groups: dict[int, list[int]] = {}
        for i in range(self.degree):
            groups.setdefault(find(i), []).append(i + 1)
        return list(groups.values())

    def extend(self, alphabet: Iterable[str]) -> "PermCover":
        """Same cover over a larger alphabet, new generators acting trivially."""
        mono = {g: self.sigma(g) for g in self.alphabet}
        for g in alphabet:
            mono.setdefault(g, Perm.identity(self.degree))
        return PermCover.build(self.degree, mono)


def evaluate_word(c: PermCover, w: Word | str) -> Perm:
    if isinstance(w, str):
        w = Word.parse(w)
    result = Perm.identity(c.degree)
    for g, e in w.letters:
        p = c.sigma(g)
        result = result.then(p if e == 1 else p.inverse())
    return result


@dataclass(frozen=True)
class LiftSpectrum:
    degrees: tuple[int, ...]

    @property
    def has_degree_one(self) -> bool:
        return 1 in self.degrees

    def count(self, k: int) -> int:
        return self.degrees.count(k)

    def __str__(self) -> str:
        return "{" + ",".join(map(str, self.degrees)) + "}"


def lift_spectrum(c: PermCover, w: Word | str) -> LiftSpectrum:
    return LiftSpectrum(evaluate_word(c, w).cycle_type())


# ---------------------------------------------------------------------------
# the four constructions


class SearchFailure(RuntimeError):
    pass


def alpha_perm(N: int) -> Perm:
    """One fixed point and the N-cycle ``(2 3 ... N+1)``."""
    return Perm.from_cycles(N + 1, [list(range(2, N + 2))])


@lru_cache(maxsize=None)
def conjugating_witness(source: Perm, target: Perm, seed: int | None = None) -> Perm:
    """Least ``b`` (in lexicographic order of images) with ``b^-1 source b`` equal to
    ``target``, where ``b^-1 source b`` means: apply ``b``, then ``source``, then ``b^-1``.

    Backtracking over partial images with forward propagation along the
    relation ``b(target(x)) = source(b(x))``; branches are explored in
    increasing order so the first solution is the least one.  A ``seed``
    shuffles the branch order instead (the search stays exhaustive).
    """
    d = source.degree
    order = list(range(d))
    if seed is not None:
        random.Random(seed).shuffle(order)
    s, t = source.images, target.images
    img = [-1] * d
    used = [False] * d
    nodes = 0

    def assign(x: int, y: int, trail: list[int]) -> bool:
        # set b(x)=y and propagate along the target cycle through x
        while True:
            if img[x] == -1:
                if used[y]:
                    return False
                img[x] = y
                used[y] = True
                trail.append(x)
            elif img[x] != y:
                return False
            else:
                return True
            x, y = t[x], s[y]

    def undo(trail: list[int]) -> None:
        for x in trail:
            used[img[x]] = False
            img[x] = -1

    def solve(x: int) -> bool:
        nonlocal nodes
        while x < d and img[x] != -1:
            x += 1
        if x == d:
            return True
        for y in order:
            if used[y]:
                continue
            nodes += 1
            trail: list[int] = []
            if assign(x, y, trail) and solve(x + 1):
                return True
            undo(trail)
        return False

    if not solve(0):
        raise SearchFailure(f"no conjugating permutation found after {nodes} nodes (space {math.factorial(d)})")
    return Perm(tuple(img))


@lru_cache(maxsize=None)
def commutator_witness(target: Perm, support: int, seed: int | None = None) -> tuple[Perm, Perm]:
    """Least pair ``(x, y)`` of permutations moving only ``1..support`` whose
    commutator (word ``x y x^-1 y^-1``) equals ``target``."""
    d = target.degree
    if support > d:
        raise SearchFailure(f"support {support} exceeds degree {d}")
    pool = [
        Perm(tuple(p) + tuple(range(support, d)))
        for p in itertools.permutations(range(support))
    ]
    if seed is not None:
        random.Random(seed).shuffle(pool)
    for x in pool:
        for y in pool:
            if commutator(x, y) == target:
                return x, y
    raise SearchFailure(f"no commutator pair among {len(pool) ** 2} candidates")


ALPHA_WORD = Word.parse("a")
BETA_WORDS = {
    1: Word.parse("b"),
    2: Word.parse("b"),
    3: Word.parse("a b a^-1 b^-1"),
    4: Word.parse("a b c b^-1 c^-1"),
}
MIN_N = {1: 1, 2: 1, 3: 2, 4: 4}


@dataclass(frozen=True)
class CaseReport:
    alpha_spectrum: LiftSpectrum
    beta_spectrum: LiftSpectrum
    alpha_ok: bool
    beta_ok: bool
    alpha_class: tuple[int, ...]
    beta_class: tuple[int, ...]
    notes: tuple[str, ...] = ()

    @property
    def ok(self) -> bool:
        return self.alpha_ok and self.beta_ok

    def line(self) -> str:
        a = "{" + ",".join(map(str, sorted(set(self.alpha_spectrum.degrees)))) + "}"
        b = "no (1:1) lift" if not self.beta_spectrum.has_degree_one else "HAS a (1:1) lift"
        return f"alpha: {a}; beta: {b}"


@dataclass(frozen=True)
class CaseConstruction:
    case_id: int
    N: int
    cover: PermCover
    alpha_word: Word
    beta_word: Word
    report: CaseReport


def build_case(case_id: int, N: int, seed: int | None = None) -> CaseConstruction:
    """Cover of degree ``N + 1`` in which ``a`` has lifts of degrees 1 and N
    and the second curve has no degree-one lift."""
    if case_id not in MIN_N:
        raise ValueError(f"case must be 1, 2, 3 or 4, got {case_id}")
    if N < MIN_N[case_id]:
        raise ValueError(f"case {case_id} needs N >= {MIN_N[case_id]}, got {N}")
    d = N + 1
    a = alpha_perm(N)
    notes = []
    if case_id in (1, 2):
        mono = {"a": a, "b": Perm.from_cycles(d, [list(range(1, d + 1))])}
    elif case_id == 3:
        target = Perm.from_cycles(d, [list(range(1, N + 1))])
        # want sigma(b a^-1 b^-1) = target, i.e. b^-1 a^-1 b = target
        b = conjugating_witness(a.inverse(), target, seed)
        mono = {"a": a, "b": b}
        notes.append(f"sigma(b a^-1 b^-1) = {evaluate_word(PermCover.build(d, mono), 'b a^-1 b^-1')}")
    else:
        target = Perm.from_cycles(d, [[1, 3, 5]])
        b, c = commutator_witness(target, 5, seed)
        mono = {"a": a, "b": b, "c": c}
        notes.append(f"[sigma(b), sigma(c)] = {commutator(b, c)}")
    cover = PermCover.build(d, mono)
    beta = BETA_WORDS[case_id]
    sa, sb = lift_spectrum(cover, ALPHA_WORD), lift_spectrum(cover, beta)
    report = CaseReport(
        alpha_spectrum=sa,
        beta_spectrum=sb,
        alpha_ok=sorted(sa.degrees) == sorted([1, N]),
        beta_ok=not sb.has_degree_one,
        alpha_class=homology_mod2(ALPHA_WORD, cover.alphabet),
        beta_class=homology_mod2(beta, cover.alphabet),
        notes=tuple(notes),
    )
    return CaseConstruction(case_id, N, cover, ALPHA_WORD, beta, report)


# ---------------------------------------------------------------------------
# products


@dataclass(frozen=True)
class ProductCover:
    product: PermCover
    factors: tuple[PermCover, ...]
    points: tuple[tuple[int, ...], ...]  # point i+1 of the product is points[i]
    components: tuple[tuple[int, ...], ...]

    def index_of(self, point: Sequence[int]) -> int:
        return self.points.index(tuple(point)) + 1

    @property
    def basepoint(self) -> tuple[int, ...]:
        return tuple(1 for _ in self.factors)

    def component_of(self, point: Sequence[int]) -> tuple[int, ...]:
        i = self.index_of(point)
        return next(c for c in self.components if i in c)

    def spectrum_on(self, w: Word | str, component: Sequence[int] | None = None) -> LiftSpectrum:
        perm = evaluate_word(self.product, w)
        keep = set(component) if component is not None else None
        lens = [len(c) for c in perm.cycles() if keep is None or c[0] in keep]
        return LiftSpectrum(tuple(sorted(lens)))


def product_cover(covers: Sequence[PermCover]) -> ProductCover:
    if not covers:
        raise ValueError("need at least one cover")
    alphabet = covers[0].alphabet
    for c in covers:
        if c.alphabet != alphabet:
            raise ValueError(f"alphabet mismatch: {c.alphabet} vs {alphabet}")
    points = tuple(itertools.product(*[range(1, c.degree + 1) for c in covers]))
    index = {p: i for i, p in enumerate(points)}
    mono = {}
    for gi, g in enumerate(alphabet):
        perms = [c.monodromy[gi] for c in covers]
        mono[g] = Perm(tuple(index[tuple(p(x) for p, x in zip(perms, pt))] for pt in points))
    prod = PermCover.build(len(points), mono)
    comps = tuple(tuple(o) for o in sorted(prod.orbits()))
    return ProductCover(prod, tuple(covers), points, comps)


@dataclass(frozen=True)
class DriverReport:
    N: int
    cases: tuple[int, ...]
    component_size: int
    components: int
    alpha_degree_one_on_base: int
    beta_degree_one: tuple[int, ...]
    threshold: Premise | None
    ok: bool

    def lines(self) -> list[str]:
        out = [
            f"N={self.N} cases={list(self.cases)} product components={self.components}"
            f" basepoint component size={self.component_size}",
            f"alpha degree-1 lifts on basepoint component: {self.alpha_degree_one_on_base}",
        ]
        for case, k in zip(self.cases, self.beta_degree_one):
            out.append(f"beta (case {case}) degree-1 lifts: {k}")
        if self.threshold is not None:
            t = self.threshold
            out.append(f"threshold {t.statement}: {'holds' if t.holds else 'FAILS'}")
        out.append("verified" if self.ok else "FAILED")
        return out


def second_systole_driver(
    betas: Sequence[tuple[int, Word | str | None]],
    N: int,
    l1: float | None = None,
    l2: float | None = None,
) -> DriverReport:
    """Build one case cover per second curve and check the product.

    ``betas`` pairs each case id with its word (``None`` uses the standard
    word for that case).  The product is formed over the union of the
    alphabets, generators missing from a factor acting trivially there.
    """
    constructions = []
    words = []
    for case_id, w in betas:
        cc = build_case(case_id, N)
        word = cc.beta_word if w is None else (Word.parse(w) if isinstance(w, str) else w)
        if lift_spectrum(cc.cover, word).has_degree_one or not cc.report.alpha_ok:
            raise SearchFailure(f"beta word {word} fails its case {case_id} verification")
        constructions.append(cc)
        words.append(word)
    alphabet = sorted({g for cc in constructions for g in cc.cover.alphabet})
    pc = product_cover([cc.cover.extend(alphabet) for cc in constructions])
    base = pc.component_of(pc.basepoint)
    a_spec = pc.spectrum_on(ALPHA_WORD, base)
    beta_counts = tuple(pc.spectrum_on(w).count(1) for w in words)
    threshold = None
    if l1 is not None and l2 is not None:
        threshold = Premise("threshold", f"N*l1={N * l1:.6g} > l2={l2:.6g}", l2, N * l1, N * l1 - l2 > SLACK)
    ok = a_spec.count(1) == 1 and not any(beta_counts) and (threshold is None or threshold.holds)
    return DriverReport(
        N, tuple(c for c, _ in betas), len(base), len(pc.components),
        a_spec.count(1), beta_counts, threshold, ok,
    )


# ---------------------------------------------------------------------------
# gluing presentations


@dataclass(frozen=True)
class Circle:
    name: str
    side: str  # "+" or "-"
    degree: int = 1


@dataclass(frozen=True)
class TubeCertificate:
    """Facts a tube of parameter ``K`` supplies downstream.

    ``collar_width`` is the collar of the short lift inside the tube;
    ``attached_collar_width`` is the half-collar each distinguished lift
    keeps once the tube has been attached by surgery.
    """

    K: float
    collar_width: float
    genus_lower: int
    unique_short_lift: bool = True
    attached_collar_width: float | None = None

    @classmethod
    def for_K(cls, K: float) -> "TubeCertificate":
        if not K > 0:
            raise ValueError("tube certificate requires K > 0")
        return cls(float(K), K / 2, tube_genus_bound(K), True, K / 4)

    def consistent(self) -> bool:
        return (
            self.K > 0
            and self.unique_short_lift
            and self.collar_width >= self.K / 2 - SLACK
            and self.genus_lower >= tube_genus_bound(self.K)
            and (self.attached_collar_width is None or self.attached_collar_width <= self.collar_width)
        )


@dataclass(frozen=True)
class Piece:
    """A cut piece of the cover.

    ``connected`` says the piece itself is connected;
    ``stays_connected_when_cut`` says its positive and negative sides stay
    connected to each other once its circles are opened.
    """

    name: str
    circles: tuple[Circle, ...]
    connected: bool = True
    stays_connected_when_cut: bool = True
    certificate: TubeCertificate | None = None


CircleRef = tuple[str, str]  # (piece name, circle name)


@dataclass(frozen=True)
class GluingPresentation:
    pieces: tuple[Piece, ...]
    gluing: tuple[tuple[CircleRef, CircleRef], ...]  # (+ circle, - circle)

    def __post_init__(self) -> None:
        problems = self.problems()
        if problems:
            raise ValueError("; ".join(problems))

    def problems(self) -> list[str]:
        circ = self.circles()
        out = []
        names = [p.name for p in self.pieces]
        if len(set(names)) != len(names):
            out.append("duplicate piece names")
        matched: Counter = Counter()
        for plus, minus in self.gluing:
            for ref in (plus, minus):
                if ref not in circ:
                    out.append(f"unknown circle {ref}")
                matched[ref] += 1
            if plus in circ and minus in circ:
                if circ[plus].side != "+" or circ[minus].side != "-":
                    out.append(f"gluing {plus}->{minus} does not go from + to -")
                if circ[plus].degree != circ[minus].degree:
                    out.append(f"gluing {plus}->{minus} changes degree")
        for ref in circ:
            if matched[ref] != 1:
                out.append(f"circle {ref} matched {matched[ref]} times")
        return out

    def circles(self) -> dict[CircleRef, Circle]:
        return {(p.name, c.name): c for p in self.pieces for c in p.circles}

    def piece(self, name: str) -> Piece:
        return next(p for p in self.pieces if p.name == name)

    @property
    def degree(self) -> int:
        circ = self.circles()
        return sum(circ[plus].degree for plus, _ in self.gluing)

    def spectrum(self) -> LiftSpectrum:
        circ = self.circles()
        return LiftSpectrum(tuple(sorted(circ[plus].degree for plus, _ in self.gluing)))

    def pair_of(self, ref: CircleRef) -> tuple[CircleRef, CircleRef]:
        for pair in self.gluing:
            if ref in pair:
                return pair
        raise KeyError(ref)


def identity_presentation(name: str = "S", separating: bool = False) -> GluingPresentation:
    """The trivial cover: the surface cut once along the curve, glued back."""
    piece = Piece(name, (Circle("a+", "+"), Circle("a-", "-")), True, not separating)
    return GluingPresentation((piece,), (((name, "a+"), (name, "a-")),))


def _rename(p: GluingPresentation, taken: set[str]) -> tuple[GluingPresentation, dict[str, str]]:
    mapping = {}
    for pc in p.pieces:
        new = pc.name
        while new in taken:
            new += "'"
        taken.add(new)
        mapping[pc.name] = new
    pieces = tuple(replace(pc, name=mapping[pc.name]) for pc in p.pieces)
    gluing = tuple(((mapping[a[0]], a[1]), (mapping[b[0]], b[1])) for a, b in p.gluing)
    return GluingPresentation(pieces, gluing), mapping


def surgery(
    p1: GluingPresentation, e1: CircleRef, p2: GluingPresentation, e2: CircleRef
) -> GluingPresentation:
    """Cut both presentations at a degree-one glued pair and cross-glue.

    ``e1`` and ``e2`` name any circle of the chosen pairs.  Pieces of ``p2``
    whose names clash with ``p1`` are primed.
    """
    c1, c2 = p1.circles(), p2.circles()
    for ref, circ in ((e1, c1), (e2, c2)):
        if ref not in circ:
            raise KeyError(f"unknown circle {ref}")
        if circ[ref].degree != 1:
            raise ValueError(f"circle {ref} has degree {circ[ref].degree}, surgery needs degree 1")
    plus1, minus1 = p1.pair_of(e1)
    q2, mapping = _rename(p2, {p.name for p in p1.pieces})
    plus2, minus2 = p2.pair_of(e2)
    plus2 = (mapping[plus2[0]], plus2[1])
    minus2 = (mapping[minus2[0]], minus2[1])
    gluing = [g for g in p1.gluing if g != (plus1, minus1)]
    gluing += [g for g in q2.gluing if g != (plus2, minus2)]
    gluing += [(plus1, minus2), (plus2, minus1)]
    return GluingPresentation(p1.pieces + q2.pieces, tuple(gluing))


def tube_presentation(K: float, name: str = "T") -> GluingPresentation:
    cert = TubeCertificate.for_K(K)
    piece = Piece(name, (Circle("a+", "+"), Circle("a-", "-")), True, True, cert)
    return GluingPresentation((piece,), (((name, "a+"), (name, "a-")),))


def attach_tube(p: GluingPresentation, e: CircleRef, K: float) -> GluingPresentation:
    """Surgery with an opaque certified tube piece."""
    return surgery(p, e, tube_presentation(K), ("T", "a+"))


def connectivity(p: GluingPresentation) -> list[list[str]]:
    """Components, as sorted lists of piece names.

    A piece that does not stay connected when cut contributes two nodes,
    one for its positive and one for its negative circles; a disconnected
    piece contributes one node per circle.
    """
    parent: dict[tuple, tuple] = {}

    def find(x):
        parent.setdefault(x, x)
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    def union(x, y):
        a, b = find(x), find(y)
        if a != b:
            parent[max(a, b)] = min(a, b)

    def node(ref: CircleRef):
        pc = p.piece(ref[0])
        c = next(c for c in pc.circles if c.name == ref[1])
        if not pc.connected:
            return (pc.name, "c", c.name)
        if not pc.stays_connected_when_cut:
            return (pc.name, c.side)
        return (pc.name,)

    for pc in p.pieces:
        find((pc.name,)) if pc.connected and pc.stays_connected_when_cut else None
        for c in pc.circles:
            find(node((pc.name, c.name)))
    for a, b in p.gluing:
        union(node(a), node(b))
    comps: dict[tuple, set[str]] = {}
    for x in list(parent):
        comps.setdefault(find(x), set()).add(x[0])
    return sorted(sorted(s) for s in comps.values())


def random_presentation(rng: random.Random, max_pieces: int = 4, max_degree: int = 3) -> GluingPresentation:
    """A random connected presentation with at least one degree-one pair.

    Used by tests and experiment scripts.
    """
    n = rng.randint(1, max_pieces)
    names = [f"P{i}" for i in range(n)]
    flags = {nm: rng.random() < 0.6 for nm in names}
    circles: dict[str, list[Circle]] = {nm: [] for nm in names}
    gluing = []
    # a spanning chain (plus the forced degree-one pair) keeps it connected
    order = names[:]
    rng.shuffle(order)
    pairs = [(order[i], order[i + 1]) for i in range(n - 1)]
    pairs.append((rng.choice(names), rng.choice(names)))
    pairs += [(rng.choice(names), rng.choice(names)) for _ in range(rng.randint(0, 2))]
    for k, (x, y) in enumerate(pairs):
        deg = 1 if k == n - 1 else rng.randint(1, max_degree)
        circles[x].append(Circle(f"c{k}+", "+", deg))
        circles[y].append(Circle(f"c{k}-", "-", deg))
        gluing.append(((x, f"c{k}+"), (y, f"c{k}-")))
    pieces = tuple(Piece(nm, tuple(circles[nm]), True, flags[nm]) for nm in names)
    pres = GluingPresentation(pieces, tuple(gluing))
    # pieces that split when cut may disconnect the chain; retry until connected
    if len(connectivity(pres)) != 1:
        return random_presentation(rng, max_pieces, max_degree)
    return pres
