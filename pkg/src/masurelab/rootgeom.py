"""Affine roots, the three sheets of the twin apartment, W^v and local chambers.

Coordinates follow the usual picture for affine SL2 after quotienting the
centre: a point is (x, y) with x the value of aleph and y the value of delta.
The fundamental vectorial chamber is C_f = {0 < x < y}.

Vectorial chambers of sign +1 are indexed by the integer c with
c < x/y < c+1; those of sign -1 are their negatives and keep the same index.
The hyperplane x = h*y separates chambers h-1 and h; it is of type r1 when h
is even and r0 when h is odd.

>>> p = Point(Fraction(0), Fraction(-5, 6))
>>> reflect(AffineRoot(1, 3, 2), p)
Point(x=Fraction(1, 1), y=Fraction(-5, 6), sheet=<Sheet.PLUS: 'plus'>)
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator

__all__ = [
    "Sheet",
    "Point",
    "Vec",
    "AffineRoot",
    "WeylElt",
    "LocalChamber",
    "NotDefined",
    "AmbiguousGerm",
    "SignMismatch",
    "eval_root",
    "reflect",
    "weyl_mul",
    "weyl_len",
    "bruhat_leq",
    "thick_roots_at",
    "c_infinity_chamber",
    "project_chamber",
    "weyl_distance",
    "codistance",
    "chamber_index",
    "germ_chamber",
    "hyperplane_is_thick",
    "separating_hyperplanes",
    "C_F_SAMPLE",
]

Vec = tuple  # (Fraction, Fraction)
C_F_SAMPLE: Vec = (Fraction(1), Fraction(2))


class NotDefined(ValueError):
    """C-infinity (or a projection) is not defined at the requested point."""


class AmbiguousGerm(ValueError):
    pass


class SignMismatch(ValueError):
    pass


class Sheet(enum.Enum):
    PLUS = "plus"
    MINUS = "minus"
    VECT = "vect"

    @property
    def xi(self) -> int:
        return {"plus": 1, "minus": -1, "vect": 0}[self.value]

    @property
    def symbol(self) -> str:
        return {"plus": "⊕", "minus": "⊖", "vect": "v"}[self.value]


def _q(v) -> Fraction:
    return v if isinstance(v, Fraction) else Fraction(v)


def _sgn(v) -> int:
    return (v > 0) - (v < 0)


@dataclass(frozen=True)
class Point:
    x: Fraction
    y: Fraction
    sheet: Sheet = Sheet.PLUS

    def __post_init__(self):
        object.__setattr__(self, "x", _q(self.x))
        object.__setattr__(self, "y", _q(self.y))

    @property
    def vec(self) -> Vec:
        return (self.x, self.y)

    def shifted(self, v: Vec, t=1) -> "Point":
        return Point(self.x + t * v[0], self.y + t * v[1], self.sheet)

    def to_json(self) -> dict:
        return {"x": str(self.x), "y": str(self.y), "sheet": self.sheet.value}

    @classmethod
    def from_json(cls, d: dict) -> "Point":
        return cls(Fraction(d["x"]), Fraction(d["y"]), Sheet(d.get("sheet", "plus")))

    def __str__(self) -> str:
        return f"({self.x}, {self.y})"


@dataclass(frozen=True, order=True)
class AffineRoot:
    """eps*aleph + k*delta + m*xi."""

    eps: int
    k: int
    m: int = 0

    def __post_init__(self):
        if self.eps not in (1, -1):
            raise ValueError("eps must be +1 or -1")

    def __neg__(self) -> "AffineRoot":
        return AffineRoot(-self.eps, -self.k, -self.m)

    def vec(self, v: Vec) -> Fraction:
        """Value of the vectorial part on a vector."""
        return self.eps * v[0] + self.k * v[1]

    def __call__(self, p: Point) -> Fraction:
        return self.vec(p.vec) + self.m * p.sheet.xi

    @property
    def vectorial_positive(self) -> bool:
        # positive real roots of A1^(1): aleph + k*delta (k >= 0), -aleph + k*delta (k >= 1)
        return self.k >= 0 if self.eps == 1 else self.k >= 1

    def classify(self) -> str:
        """One of 'Phi+_a+', 'Phi+_a-', 'Phi-_a+', 'Phi-_a-'."""
        if self.vectorial_positive:
            return "Phi+_a+" if self.m >= 0 else "Phi+_a-"
        return "Phi-_a+" if self.m > 0 else "Phi-_a-"

    @property
    def in_aplus(self) -> bool:
        return self.m > 0 or (self.m == 0 and self.vectorial_positive)

    @property
    def in_aminus(self) -> bool:
        return not self.in_aplus

    def aminus_rep(self) -> "AffineRoot":
        return self if self.in_aminus else -self

    def reflect(self, p: Point) -> Point:
        t = 2 * self.eps * self(p)
        return Point(p.x - t, p.y, p.sheet)

    def reflect_vec(self, v: Vec) -> Vec:
        return (v[0] - 2 * self.eps * self.vec(v), v[1])

    def to_json(self) -> dict:
        return {"eps": self.eps, "k": self.k, "m": self.m}

    def __str__(self) -> str:
        a = "ℵ" if self.eps == 1 else "-ℵ"
        s = a
        if self.k:
            s += f"{'+' if self.k > 0 else '-'}{abs(self.k)}δ"
        if self.m:
            s += f"{'+' if self.m > 0 else '-'}{abs(self.m)}ξ"
        return s


def eval_root(r: AffineRoot, p: Point) -> Fraction:
    """eps*x + k*y + m*xi(sheet).

    >>> eval_root(AffineRoot(1, 6, 5), Point(0, Fraction(-5, 6)))
    Fraction(0, 1)
    """
    return r(p)


def reflect(r: AffineRoot, p: Point) -> Point:
    return r.reflect(p)


# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class WeylElt:
    """Element of the infinite dihedral group W^v, acting on vectors by [[s, 2j], [0, 1]].

    >>> WeylElt.parse("r0r1r0").length
    3
    >>> WeylElt.parse("r0") * WeylElt.parse("r0") == WeylElt.identity()
    True
    """

    s: int = 1
    j: int = 0

    @classmethod
    def identity(cls) -> "WeylElt":
        return cls(1, 0)

    @classmethod
    def gen(cls, i: int) -> "WeylElt":
        return cls(-1, 1) if i == 0 else cls(-1, 0)

    @classmethod
    def parse(cls, word: str) -> "WeylElt":
        word = word.strip()
        if word in ("", "e", "id", "1"):
            return cls.identity()
        out = cls.identity()
        i = 0
        while i < len(word):
            if word[i] != "r" or i + 1 >= len(word) or word[i + 1] not in "01":
                raise ValueError(f"bad Weyl word {word!r}")
            out = out * cls.gen(int(word[i + 1]))
            i += 2
        return out

    @classmethod
    def from_letters(cls, letters) -> "WeylElt":
        out = cls.identity()
        for i in letters:
            out = out * cls.gen(i)
        return out

    def __mul__(self, other: "WeylElt") -> "WeylElt":
        return WeylElt(self.s * other.s, self.s * other.j + self.j)

    def inverse(self) -> "WeylElt":
        return WeylElt(self.s, -self.s * self.j)

    def act(self, v: Vec) -> Vec:
        return (self.s * v[0] + 2 * self.j * v[1], v[1])

    @property
    def letters(self) -> tuple:
        s, j = self.s, self.j
        if s == 1:
            return (0, 1) * j if j > 0 else (1, 0) * (-j)
        if j >= 1:
            return (0,) + (1, 0) * (j - 1)
        return (1,) + (0, 1) * (-j)

    @property
    def word(self) -> str:
        return "".join(f"r{i}" for i in self.letters) or "e"

    @property
    def length(self) -> int:
        return abs(self.chamber)

    @property
    def chamber(self) -> int:
        """Index of w*C_f."""
        return 2 * self.j if self.s == 1 else 2 * self.j - 1

    @classmethod
    def from_chamber(cls, c: int) -> "WeylElt":
        return cls(1, c // 2) if c % 2 == 0 else cls(-1, (c + 1) // 2)

    def __str__(self) -> str:
        return self.word


def weyl_mul(a: WeylElt, b: WeylElt) -> WeylElt:
    return a * b


def weyl_len(w: WeylElt) -> int:
    return w.length


def bruhat_leq(u: WeylElt, w: WeylElt) -> bool:
    """u <= w in Bruhat order, via the subword property of a reduced word of w.

    The set of products of subwords is built letter by letter.

    >>> bruhat_leq(WeylElt.parse("r1r0"), WeylElt.parse("r0r1r0"))
    True
    """
    reach = {WeylElt.identity()}
    for i in w.letters:
        g = WeylElt.gen(i)
        reach |= {x * g for x in reach}
    return u in reach


# ---------------------------------------------------------------------------

def chamber_index(v: Vec) -> int:
    """Index of the open vectorial chamber containing v (v_y != 0, x/y not an integer)."""
    if v[1] == 0:
        raise NotDefined(f"{v} lies outside the open Tits cone")
    r = Fraction(v[0]) / v[1]
    if r.denominator == 1:
        raise AmbiguousGerm(f"{v} lies on the hyperplane of ratio {r}")
    return math.floor(r)


def germ_chamber(v: Vec, dv: Vec) -> tuple[int, int]:
    """(sign, index) of the chamber containing v + eta*dv for small eta > 0."""
    if v[0] == 0 and v[1] == 0:
        return germ_chamber(dv, (Fraction(0), Fraction(0))) if dv != (0, 0) else _raise_zero()
    if v[1] == 0:
        if dv[1] == 0:
            raise NotDefined(f"germ {v}+eta*{dv} stays outside the Tits cone")
        raise NotDefined(f"{v} lies on the boundary of the Tits cone")
    sign = _sgn(v[1])
    r = Fraction(v[0]) / v[1]
    if r.denominator != 1:
        return sign, math.floor(r)
    h = r.numerator
    d = _sgn(v[1] * (dv[0] - h * dv[1]))
    if d == 0:
        raise AmbiguousGerm(f"germ {v}+eta*{dv} stays on the hyperplane of ratio {h}")
    return sign, (h if d > 0 else h - 1)


def _raise_zero():
    raise AmbiguousGerm("zero direction")


def hyperplane_is_thick(p: Point, h: int) -> bool:
    """Is the hyperplane through p of direction x = h*y an actual wall?"""
    val = p.x - h * p.y
    xi = p.sheet.xi
    if xi == 0:
        return val == 0
    return val.denominator == 1


def separating_hyperplanes(c1: int, c2: int) -> list[int]:
    """Hyperplane ratios between chambers c1 and c2, in crossing order from c1."""
    if c1 <= c2:
        return list(range(c1 + 1, c2 + 1))
    return list(range(c1, c2, -1))


@dataclass(frozen=True)
class LocalChamber:
    """The germ at ``base`` of base + w*(sign*C_f)."""

    base: Point
    sign: int
    w: WeylElt

    @classmethod
    def at(cls, base: Point, sign: int, index: int) -> "LocalChamber":
        return cls(base, sign, WeylElt.from_chamber(index))

    @property
    def index(self) -> int:
        return self.w.chamber

    def sample_direction(self) -> Vec:
        c = self.index
        return (self.sign * (Fraction(c) + Fraction(1, 2)), Fraction(self.sign))

    def contains_in_closure(self, v: Vec) -> bool:
        if v[1] == 0 or _sgn(v[1]) != self.sign:
            return False
        r = Fraction(v[0]) / v[1]
        return self.index <= r <= self.index + 1

    def opposite(self) -> "LocalChamber":
        return LocalChamber(self.base, -self.sign, self.w)

    def side(self, h: int) -> int:
        """Sign of x - h*y on this chamber (relative to its base)."""
        v = self.sample_direction()
        return _sgn(v[0] - h * v[1])

    def to_json(self) -> dict:
        return {"base": self.base.to_json(), "sign": self.sign, "weyl": self.w.word, "index": self.index}

    def __str__(self) -> str:
        return f"C[{'+' if self.sign > 0 else '-'}{self.index}]@{self.base}"


def thick_roots_at(p: Point, k_bound: int = 64) -> list[tuple[AffineRoot, bool]]:
    """All (eps, k, m) with |k| <= k_bound vanishing at p, with an a-minus flag.

    >>> roots = thick_roots_at(Point(0, Fraction(-2, 3)), 9)
    >>> sorted({r.k for r, _ in roots})
    [-9, -6, -3, 0, 3, 6, 9]
    """
    out = []
    xi = p.sheet.xi
    for k in range(-k_bound, k_bound + 1):
        for eps in (1, -1):
            a = eps * p.x + k * p.y
            if xi == 0:
                if a != 0:
                    continue
                m = 0
            else:
                mm = -a / xi
                if mm.denominator != 1:
                    continue
                m = mm.numerator
            r = AffineRoot(eps, k, m)
            out.append((r, r.in_aminus))
    return out


def c_infinity_chamber(p: Point, sign: int | None = None) -> LocalChamber:
    """The local chamber C-infinity_p at a point of the positive sheet.

    Its direction is the germ of p - eta*c for c in C_f: away from the origin,
    pushed to the -C_f side of every hyperplane through p that contains p.

    >>> c_infinity_chamber(Point(0, Fraction(-2, 3))).index
    0
    """
    if p.sheet is not Sheet.PLUS:
        raise NotDefined("C-infinity projections are taken on the positive sheet")
    if p.x == 0 and p.y == 0:
        if sign == 1:
            raise NotDefined("at the origin C-infinity has sign -1; sign +1 is the excluded case")
        return LocalChamber(p, -1, WeylElt.identity())
    if p.y == 0:
        raise NotDefined(f"{p} is outside the Tits cone and its opposite")
    natural = _sgn(p.y)
    if sign is not None and sign != natural:
        raise NotDefined(f"C-infinity at {p} has sign {natural}, not {sign}")
    s, c = germ_chamber(p.vec, (-C_F_SAMPLE[0], -C_F_SAMPLE[1]))
    return LocalChamber.at(p, s, c)


def _side_of(reference: LocalChamber, p: Point, h: int) -> int:
    off = (reference.base.x - p.x) - h * (reference.base.y - p.y)
    if off != 0:
        return _sgn(off)
    return reference.side(h)


def project_chamber(p: Point, germ_dir: Vec, reference: LocalChamber) -> LocalChamber:
    """The chamber at p containing the germ p + [0,1)*germ_dir, closest to ``reference``."""
    gx, gy = Fraction(germ_dir[0]), Fraction(germ_dir[1])
    if gx == 0 and gy == 0:
        raise AmbiguousGerm("zero germ direction")
    if gy == 0:
        raise NotDefined(f"germ direction {germ_dir} is outside the Tits cone")
    sign = _sgn(gy)
    r = gx / gy
    if r.denominator != 1:
        return LocalChamber.at(p, sign, math.floor(r))
    h = r.numerator
    want = _side_of(reference, p, h)
    # the chamber of index h has x - h*y of sign `sign`, index h-1 the opposite
    return LocalChamber.at(p, sign, h if want == sign else h - 1)


def weyl_distance(c1: LocalChamber, c2: LocalChamber) -> WeylElt:
    if c1.sign != c2.sign:
        raise SignMismatch("Weyl distance needs chambers of the same sign")
    return c1.w.inverse() * c2.w


def codistance(c1: LocalChamber, c2: LocalChamber) -> WeylElt:
    if c1.sign == c2.sign:
        raise SignMismatch("codistance needs chambers of opposite signs")
    return c1.w.inverse() * c2.w


def all_weyl_up_to(n: int) -> Iterator[WeylElt]:
    for c in range(-n, n + 1):
        yield WeylElt.from_chamber(c)
