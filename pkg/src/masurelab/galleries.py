"""Galleries of local chambers at a point, centrifugal folding and lifting counts.

At a point p of the positive sheet the tangent chambers of a fixed sign form
a line indexed by the integers (see :mod:`masurelab.rootgeom`).  A gallery is
a start chamber plus steps; each step names the hyperplane of the panel it
uses and whether it crosses or folds (stammers).

Counts are monomials q^n (q-1)^n' in an indeterminate q:

* thin step: 1
* thick step leaving the side of the centre: q
* thick step returning toward the centre: 1
* thick centrifugal fold: q - 1

>>> g = Gallery(sign=-1, start=0, steps=(Step(0, False, True), Step(-1, False, True)))
>>> str(count_liftings_poly(g, LocalChamber.at(Point(0, 0), 1, -1)))
'q'
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

from .rootgeom import (
    LocalChamber,
    Point,
    SignMismatch,
    WeylElt,
    hyperplane_is_thick,
    separating_hyperplanes,
)

__all__ = [
    "CountPoly",
    "Step",
    "Gallery",
    "GalleryType",
    "NotCentrifugal",
    "TooLarge",
    "ProblematicCase",
    "minimal_gallery_type",
    "is_centrifugal",
    "count_liftings_poly",
    "brute_force_liftings",
    "m_doubleprime",
    "find_centrifugal_gallery",
    "segment_count",
    "letter_of",
    "random_centrifugal_gallery",
]


class NotCentrifugal(ValueError):
    pass


class TooLarge(ValueError):
    pass


class ProblematicCase(ValueError):
    """Counting is not covered when eps = +1 and the path starts at the origin."""


def letter_of(h: int) -> int:
    """Type of the hyperplane x = h*y: 1 (r1) when h is even, 0 (r0) when odd."""
    return 1 if h % 2 == 0 else 0


@dataclass(frozen=True)
class CountPoly:
    """q^n * (q-1)^nprime."""

    n: int = 0
    nprime: int = 0

    def __post_init__(self):
        if self.n < 0 or self.nprime < 0:
            raise ValueError("exponents must be non-negative")

    def eval(self, q: int) -> int:
        return q**self.n * (q - 1) ** self.nprime

    def __mul__(self, other: "CountPoly") -> "CountPoly":
        return CountPoly(self.n + other.n, self.nprime + other.nprime)

    def __str__(self) -> str:
        parts = []
        if self.n:
            parts.append("q" if self.n == 1 else f"q^{self.n}")
        if self.nprime:
            parts.append("(q-1)" if self.nprime == 1 else f"(q-1)^{self.nprime}")
        return "*".join(parts) or "1"

    def to_json(self) -> dict:
        return {"n": self.n, "nprime": self.nprime}


@dataclass(frozen=True)
class Step:
    wall: int
    fold: bool
    thick: bool


@dataclass(frozen=True)
class GalleryType:
    hyperplanes: tuple
    base: Point | None = None

    @property
    def letters(self) -> tuple:
        return tuple(letter_of(h) for h in self.hyperplanes)

    @property
    def word(self) -> str:
        return "".join(f"r{i}" for i in self.letters)

    def __len__(self) -> int:
        return len(self.hyperplanes)

    def is_reduced(self) -> bool:
        return WeylElt.from_letters(self.letters).length == len(self.letters)


@dataclass(frozen=True)
class Gallery:
    sign: int
    start: int
    steps: tuple = ()
    base: Point | None = None

    def __post_init__(self):
        c = self.start
        thick_of: dict = {}
        for i, st in enumerate(self.steps):
            if thick_of.setdefault(st.wall, st.thick) != st.thick:
                raise ValueError(f"step {i}: hyperplane {st.wall} is flagged both thick and thin")
            if st.wall not in (c, c + 1):
                raise ValueError(f"step {i}: hyperplane {st.wall} is not a panel of chamber {c}")
            if st.fold and not st.thick:
                pass  # allowed as data; is_centrifugal rejects it
            if not st.fold:
                c = c - 1 if st.wall == c else c + 1

    @classmethod
    def at_point(cls, p: Point, sign: int, start: int, moves: Sequence[tuple[int, bool]]) -> "Gallery":
        steps = tuple(Step(h, fold, hyperplane_is_thick(p, h)) for h, fold in moves)
        return cls(sign, start, steps, p)

    @property
    def chambers(self) -> list[int]:
        out = [self.start]
        c = self.start
        for st in self.steps:
            if not st.fold:
                c = c - 1 if st.wall == c else c + 1
            out.append(c)
        return out

    @property
    def end(self) -> int:
        return self.chambers[-1]

    @property
    def letters(self) -> tuple:
        return tuple(letter_of(st.wall) for st in self.steps)

    def local_chambers(self) -> list[LocalChamber]:
        base = self.base if self.base is not None else Point(0, 0)
        return [LocalChamber.at(base, self.sign, c) for c in self.chambers]

    def to_json(self) -> dict:
        return {
            "sign": self.sign,
            "chambers": [{"index": c, "weyl": WeylElt.from_chamber(c).word} for c in self.chambers],
            "steps": [{"wall": s.wall, "stammer": s.fold, "thick": s.thick} for s in self.steps],
        }


def _side(sign: int, c: int, h: int) -> int:
    # sign of x - h*y on the chamber of index c and the given sign
    return sign if 2 * c + 1 > 2 * h else -sign


def minimal_gallery_type(c_from: LocalChamber, c_to: LocalChamber) -> GalleryType:
    """Separating hyperplanes in the order a minimal gallery crosses them."""
    if c_from.sign != c_to.sign:
        raise SignMismatch("minimal galleries join chambers of the same sign")
    return GalleryType(tuple(separating_hyperplanes(c_from.index, c_to.index)), c_from.base)


def is_centrifugal(g: Gallery, center: LocalChamber) -> bool:
    c = g.start
    for st in g.steps:
        if st.fold:
            if not st.thick:
                return False
            if _side(g.sign, c, st.wall) == center.side(st.wall):
                return False
        else:
            c = c - 1 if st.wall == c else c + 1
    return True


def count_liftings_poly(g: Gallery, center: LocalChamber) -> CountPoly:
    if not is_centrifugal(g, center):
        raise NotCentrifugal("gallery has a fold on a thin wall or toward the centre")
    n = nprime = 0
    c = g.start
    for st in g.steps:
        if not st.thick:
            pass
        elif st.fold:
            nprime += 1
        elif _side(g.sign, c, st.wall) == center.side(st.wall):
            n += 1
        if not st.fold:
            c = c - 1 if st.wall == c else c + 1
    return CountPoly(n, nprime)


def brute_force_liftings(g: Gallery, center: LocalChamber, q: int) -> int:
    """Count non-stammering lifts by explicit enumeration of panel residues.

    A thick panel holds q+1 abstract chambers: "proj" retracts onto the
    apartment chamber on the centre side, every "a<i>" onto the other one.
    A thin panel holds just the two apartment chambers.
    """
    if not 2 <= q <= 7:
        raise TooLarge(f"q={q} outside 2..7")
    if len(g.steps) > 12:
        raise TooLarge(f"gallery of length {len(g.steps)} exceeds 12")
    images = g.chambers
    sign = g.sign

    def labels(thick: bool) -> list[str]:
        return ["proj"] + [f"a{i}" for i in range(1, q + 1)] if thick else ["near", "far"]

    def image_side(label: str) -> bool:
        # True when the label retracts to the centre side
        return label in ("proj", "near")

    def dfs(i: int, prev_wall, label) -> int:
        if i == len(g.steps):
            return 1
        st = g.steps[i]
        c = images[i]
        on_center = _side(sign, c, st.wall) == center.side(st.wall)
        if st.wall != prev_wall:
            # entering a new panel: the current chamber's label is fixed by its image
            if st.thick:
                label = "proj" if on_center else "a1"
            else:
                label = "near" if on_center else "far"
        target_on_center = (_side(sign, images[i + 1], st.wall) == center.side(st.wall))
        total = 0
        for nxt in labels(st.thick):
            if nxt == label:
                continue
            if image_side(nxt) != target_on_center:
                continue
            total += dfs(i + 1, st.wall, nxt)
        return total

    return dfs(0, None, None)


def m_doubleprime(p: Point, c_inf: LocalChamber, c_plus: LocalChamber, germ_dir) -> int:
    """Thick walls separating c_inf from c_plus that do not contain germ_dir."""
    n = 0
    for h in separating_hyperplanes(c_inf.index, c_plus.index):
        if not hyperplane_is_thick(p, h):
            continue
        if germ_dir[0] - h * germ_dir[1] == 0:
            continue
        n += 1
    return n


def find_centrifugal_gallery(
    p: Point,
    sign: int,
    start: int,
    letters: Sequence[int],
    end: int,
    center: LocalChamber,
) -> Gallery | None:
    """First gallery of the given type from ``start`` to ``end`` folding only
    centrifugally (crossing tried before folding)."""
    letters = tuple(letters)

    def panel(c: int, t: int) -> int:
        return c if letter_of(c) == t else c + 1

    def dfs(i: int, c: int, acc: list) -> list | None:
        if i == len(letters):
            return acc if c == end else None
        if abs(c - end) > len(letters) - i:
            return None
        h = panel(c, letters[i])
        thick = hyperplane_is_thick(p, h)
        nc = c - 1 if h == c else c + 1
        r = dfs(i + 1, nc, acc + [Step(h, False, thick)])
        if r is not None:
            return r
        if thick and _side(sign, c, h) != center.side(h):
            return dfs(i + 1, c, acc + [Step(h, True, True)])
        return None

    steps = dfs(0, start, [])
    return None if steps is None else Gallery(sign, start, tuple(steps), p)


def segment_count(sd) -> CountPoly:
    """q^{m''_0} times the lifting counts of the galleries at interior folding points.

    ``sd`` is a superdecoration (see :mod:`masurelab.heckepath`).
    """
    path = sd.path
    if path.eps == 1 and path.origin[0] == 0 and path.origin[1] == 0:
        raise ProblematicCase("eps = +1 with the path starting at the origin")
    total = CountPoly(sd.m0_doubleprime, 0)
    for item in sd.items:
        if item.gallery is None:
            raise NotCentrifugal(f"no centrifugal gallery at t={item.t}")
        total = total * count_liftings_poly(item.gallery, item.c_minus)
    return total


def random_centrifugal_gallery(rng, max_len: int = 8) -> tuple[Gallery, LocalChamber]:
    """A random gallery with random thick flags per wall, folding only centrifugally.

    Returns the gallery and the centre chamber it is centrifugal for.

    >>> import random
    >>> g, c = random_centrifugal_gallery(random.Random(1))
    >>> is_centrifugal(g, c)
    True
    """
    sign = rng.choice((1, -1))
    origin = Point(0, 0)
    center = LocalChamber.at(origin, sign, rng.randint(-4, 4))
    start = rng.randint(-4, 4)
    c = start
    steps = []
    thick_of: dict = {}
    for _ in range(rng.randint(0, max_len)):
        h = rng.choice((c, c + 1))
        thick = thick_of.setdefault(h, rng.random() < 0.7)
        may_fold = thick and _side(sign, c, h) != center.side(h)
        if may_fold and rng.random() < 0.35:
            steps.append(Step(h, True, True))
        else:
            steps.append(Step(h, False, thick))
            c = c - 1 if h == c else c + 1
    return Gallery(sign, start, tuple(steps), origin), center
