"""Lambda-paths, crossing events, chains of reflections and the Hecke verifier.

A path is stored exactly: rational breakpoints, one vectorial Weyl element
per piece, and the shape lambda.  The derivative on a piece is ``w.act(lam)``.

>>> lam = (Fraction(0), Fraction(-1))
>>> path = build_path(lam, [(1, WeylElt.identity())])
>>> path.point_at(Fraction(1, 2))
Point(x=Fraction(0, 1), y=Fraction(-1, 2), sheet=<Sheet.PLUS: 'plus'>)
>>> verify_hecke(path).ok
True
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from .galleries import (
    Gallery,
    GalleryType,
    find_centrifugal_gallery,
    is_centrifugal,
    m_doubleprime,
    minimal_gallery_type,
)
from .rootgeom import (
    AffineRoot,
    LocalChamber,
    NotDefined,
    Point,
    Vec,
    WeylElt,
    bruhat_leq,
    c_infinity_chamber,
    chamber_index,
    hyperplane_is_thick,
    project_chamber,
    separating_hyperplanes,
    weyl_distance,
)

__all__ = [
    "Piece",
    "PiecewisePath",
    "NotLambdaPath",
    "BoundExceeded",
    "DecorationMismatch",
    "NotHecke",
    "Event",
    "Chain",
    "FoldCheck",
    "HeckeReport",
    "DecorationPoint",
    "Decoration",
    "SuperItem",
    "Superdecoration",
    "CheckReport",
    "build_path",
    "crossing_events",
    "crossing_bound",
    "chain_search",
    "iter_chains",
    "verify_hecke",
    "decorate",
    "decoration_from_chambers",
    "superdecorate",
    "validate_superdecoration",
    "folding_measure",
]

SCHEMA = "masure-lab/1"


class NotLambdaPath(ValueError):
    def __init__(self, index: int, reason: str):
        super().__init__(f"segment {index}: {reason}")
        self.index = index


class BoundExceeded(ValueError):
    def __init__(self, needed: int, given: int):
        super().__init__(f"root window |k| <= {given} is too small; {needed} is sufficient")
        self.needed = needed
        self.given = given


class DecorationMismatch(ValueError):
    pass


class NotHecke(ValueError):
    pass


def _q(v) -> Fraction:
    return v if isinstance(v, Fraction) else Fraction(v)


def _vec(v) -> Vec:
    return (_q(v[0]), _q(v[1]))


def _sgn(v) -> int:
    return (v > 0) - (v < 0)


def _neg(v: Vec) -> Vec:
    return (-v[0], -v[1])


# ---------------------------------------------------------------------------
# paths

@dataclass(frozen=True)
class Piece:
    t0: Fraction
    t1: Fraction
    w: WeylElt
    label: str = ""


@dataclass(frozen=True)
class PiecewisePath:
    """pi(t) = origin + integral of the piecewise constant derivative w_i.lam."""

    shape: Vec
    eps: int
    origin: Vec
    pieces: tuple

    def __post_init__(self):
        object.__setattr__(self, "shape", _vec(self.shape))
        object.__setattr__(self, "origin", _vec(self.origin))
        object.__setattr__(self, "pieces", tuple(self.pieces))
        self._validate()

    def _validate(self) -> None:
        lx, ly = self.shape
        if self.eps not in (1, -1):
            raise NotLambdaPath(0, "eps must be +1 or -1")
        ex, ey = self.eps * lx, self.eps * ly
        if not (ey > 0 and 0 <= ex <= ey):
            raise NotLambdaPath(0, f"shape {self.shape} is not in eps*(closed C_f) with nonzero delta")
        if not self.pieces:
            raise NotLambdaPath(0, "no pieces")
        if self.pieces[0].t0 != 0 or self.pieces[-1].t1 != 1:
            raise NotLambdaPath(0, "breakpoints must run from 0 to 1")
        for i, pc in enumerate(self.pieces):
            if not pc.t0 < pc.t1:
                raise NotLambdaPath(i, "non-increasing breakpoints")
            if i and pc.t0 != self.pieces[i - 1].t1:
                raise NotLambdaPath(i, "pieces are not contiguous")
        ox, oy = self.origin
        if not (self.eps * oy > 0 or (ox == 0 and oy == 0)):
            raise NotLambdaPath(0, f"origin {self.origin} is not in eps*T")
        for i, v in enumerate(self.vertices[1:]):
            if not self.eps * v.y > 0:
                raise NotLambdaPath(i, f"vertex {v} leaves the open cone eps*T")

    # geometry ----------------------------------------------------------------
    def derivative(self, i: int) -> Vec:
        return self.pieces[i].w.act(self.shape)

    @property
    def breakpoints(self) -> list[Fraction]:
        return [pc.t0 for pc in self.pieces] + [Fraction(1)]

    @property
    def vertices(self) -> list[Point]:
        out = [Point(*self.origin)]
        x, y = self.origin
        for i, pc in enumerate(self.pieces):
            dx, dy = self.derivative(i)
            dt = pc.t1 - pc.t0
            x, y = x + dt * dx, y + dt * dy
            out.append(Point(x, y))
        return out

    def _piece_index(self, t: Fraction, right: bool) -> int:
        for i, pc in enumerate(self.pieces):
            if (pc.t0 <= t < pc.t1) if right else (pc.t0 < t <= pc.t1):
                return i
        raise ValueError(f"t={t} outside the path")

    def point_at(self, t) -> Point:
        t = _q(t)
        i = self._piece_index(t, right=True) if t < 1 else len(self.pieces) - 1
        v = self.vertices[i]
        d = self.derivative(i)
        s = t - self.pieces[i].t0
        return Point(v.x + s * d[0], v.y + s * d[1])

    def deriv_plus(self, t) -> Vec:
        return self.derivative(self._piece_index(_q(t), right=True))

    def deriv_minus(self, t) -> Vec:
        return self.derivative(self._piece_index(_q(t), right=False))

    def fold_times(self) -> list[Fraction]:
        """Interior breakpoints where the one-sided derivatives differ."""
        out = []
        for i in range(1, len(self.pieces)):
            if self.derivative(i) != self.derivative(i - 1):
                out.append(self.pieces[i].t0)
        return out

    def merged(self) -> "PiecewisePath":
        """Same path with consecutive pieces of equal derivative joined."""
        out: list[Piece] = []
        for i, pc in enumerate(self.pieces):
            if out and out[-1].w.act(self.shape) == self.derivative(i):
                prev = out[-1]
                out[-1] = Piece(prev.t0, pc.t1, prev.w, prev.label)
            else:
                out.append(pc)
        return PiecewisePath(self.shape, self.eps, self.origin, tuple(out))

    # serialisation -------------------------------------------------------------
    def to_json(self) -> dict:
        return {
            "schema": SCHEMA,
            "shape": [str(c) for c in self.shape],
            "eps": self.eps,
            "origin": [str(c) for c in self.origin],
            "pieces": [
                {"t0": str(p.t0), "t1": str(p.t1), "weyl": p.w.word, **({"label": p.label} if p.label else {})}
                for p in self.pieces
            ],
            "vertices": [[str(v.x), str(v.y)] for v in self.vertices],
        }

    @classmethod
    def from_json(cls, d: dict) -> "PiecewisePath":
        pieces = tuple(
            Piece(Fraction(p["t0"]), Fraction(p["t1"]), WeylElt.parse(p.get("weyl", "")), p.get("label", ""))
            for p in d["pieces"]
        )
        shape = _vec([Fraction(c) for c in d["shape"]])
        eps = int(d.get("eps", _sgn(shape[1])))
        return cls(shape, eps, _vec([Fraction(c) for c in d.get("origin", [0, 0])]), pieces)


def build_path(shape, segments: Sequence, origin=(0, 0)) -> PiecewisePath:
    """Path from ``(duration, w)`` pairs; ``w`` may be a WeylElt, a word or a vector.

    A vector must lie in the W^v-orbit of the shape.

    >>> build_path((0, -1), [(1, (1, -1))])
    Traceback (most recent call last):
    ...
    masurelab.heckepath.NotLambdaPath: segment 0: derivative (1, -1) is not in W.lambda
    """
    shape = _vec(shape)
    eps = _sgn(shape[1])
    pieces = []
    t = Fraction(0)
    total = sum(_q(d) for d, _ in segments)
    if total != 1:
        raise NotLambdaPath(len(segments) - 1, f"durations sum to {total}, not 1")
    for i, (dur, w) in enumerate(segments):
        dur = _q(dur)
        if dur <= 0:
            raise NotLambdaPath(i, "non-positive duration")
        if isinstance(w, str):
            w = WeylElt.parse(w)
        elif not isinstance(w, WeylElt):
            w = _orbit_element(shape, _vec(w), i)
        pieces.append(Piece(t, t + dur, w))
        t += dur
    return PiecewisePath(shape, eps, _vec(origin), tuple(pieces))


def _orbit_element(shape: Vec, v: Vec, index: int) -> WeylElt:
    # W^v preserves delta and moves aleph by -x + 2j*delta or x + 2j*delta
    if v[1] == shape[1]:
        for s in (1, -1):
            j2 = v[0] - s * shape[0]
            if shape[1] and (j2 / shape[1]) % 2 == 0:
                return WeylElt(s, int((j2 / shape[1]) // 2))
    raise NotLambdaPath(index, f"derivative ({v[0]}, {v[1]}) is not in W.lambda")


# ---------------------------------------------------------------------------
# crossing events

@dataclass(frozen=True)
class Event:
    t: Fraction
    point: Point
    wall: AffineRoot  # representative in Phi_{a-}

    def to_json(self) -> dict:
        return {"t": str(self.t), "point": self.point.to_json(), "wall": str(self.wall)}


def crossing_bound(path: PiecewisePath) -> int:
    """Sufficient |k| window for :func:`crossing_events`.

    At an event, the a-minus representative (e, k, m) has m <= 0 and negative
    slope along the path, which forces |k| <= max(|v_x/v_y|, |x/y|) over the
    piece (x/y is monotone on a segment, so endpoints suffice).
    """
    best = Fraction(0)
    verts = path.vertices
    for i in range(len(path.pieces)):
        vx, vy = path.derivative(i)
        best = max(best, abs(vx / vy))
        for p in (verts[i], verts[i + 1]):
            if p.y != 0:
                best = max(best, abs(p.x / p.y))
    return math.floor(best)


def crossing_events(path: PiecewisePath, k_bound: int = 64) -> list[Event]:
    """Pairs (wall, t), 0 < t < 1, where the path leaves a thick wall away from C-infinity."""
    need = crossing_bound(path)
    if k_bound < need:
        raise BoundExceeded(need, k_bound)
    out = []
    verts = path.vertices
    for i, pc in enumerate(path.pieces):
        v = path.derivative(i)
        p0 = verts[i]
        for k in range(-need, need + 1):
            f0 = p0.x + k * p0.y
            f1 = v[0] + k * v[1]
            if f1 == 0:
                continue
            fend = f0 + (pc.t1 - pc.t0) * f1
            if f1 > 0:
                ns = range(math.ceil(f0), math.ceil(fend))
            else:
                ns = range(math.floor(f0), math.floor(fend), -1)
            for n in ns:
                t = pc.t0 + (n - f0) / f1
                if not (0 < t < 1) or not (pc.t0 <= t < pc.t1):
                    continue
                wall = AffineRoot(1, k, -n).aminus_rep()
                if wall.vec(v) < 0:
                    pt = Point(p0.x + (t - pc.t0) * v[0], p0.y + (t - pc.t0) * v[1])
                    out.append(Event(t, pt, wall))
    out.sort(key=lambda e: (e.t, e.wall))
    return out


# ---------------------------------------------------------------------------
# chains

@dataclass(frozen=True)
class Chain:
    vectors: tuple
    roots: tuple  # vectorial AffineRoots (m = 0)

    def __post_init__(self):
        if len(self.vectors) != len(self.roots) + 1:
            raise ValueError("a chain has one more vector than roots")
        for i, b in enumerate(self.roots):
            if b.reflect_vec(self.vectors[i]) != self.vectors[i + 1]:
                raise ValueError(f"step {i + 1} does not reflect xi_{i} onto xi_{i + 1}")

    def __len__(self) -> int:
        return len(self.roots)

    def replay(self, start: Vec) -> Vec:
        v = _vec(start)
        for b in self.roots:
            v = b.reflect_vec(v)
        return v

    def to_json(self) -> dict:
        return {
            "vectors": [[str(a), str(b)] for a, b in self.vectors],
            "roots": [str(r) for r in self.roots],
        }


def iter_chains(p: Point, xi_plus, xi_minus, k_bound: int = 64):
    """Every chain from xi_plus to xi_minus, shortest first.

    Each step uses a root negative on the current vector and positive on
    C-infinity at p, through a thick wall at p.  Candidate hyperplanes
    separate the current vector from the C-infinity direction and every step
    strictly decreases their number, so the search is finite.  Within a
    length, roots are tried by ascending |k| and then eps = +1 first.
    """
    xi_plus, xi_minus = _vec(xi_plus), _vec(xi_minus)
    if xi_plus == xi_minus:
        yield Chain((xi_plus,), ())
        return
    if xi_plus[1] == 0:
        return
    c_inf = c_infinity_chamber(p)
    d_inf = c_inf.sample_direction()
    r_inf = d_inf[0] / d_inf[1]

    def candidates(xi: Vec) -> list[AffineRoot]:
        if xi[1] == 0 or _sgn(xi[1]) != _sgn(d_inf[1]):
            return []
        r = xi[0] / xi[1]
        lo, hi = sorted((r, r_inf))
        out = []
        for h in range(math.ceil(lo), math.floor(hi) + 1):
            if h == r or abs(h) > k_bound or not hyperplane_is_thick(p, h):
                continue
            b = AffineRoot(1, -h, 0)
            if b.vec(d_inf) < 0:
                b = -b
            if b.vec(xi) < 0:
                out.append(b)
        out.sort(key=lambda b: (abs(b.k), -b.eps))
        return out

    def dfs(xi: Vec, vecs: list, roots: list, left: int):
        if left == 0:
            if xi == xi_minus:
                yield Chain(tuple(vecs), tuple(roots))
            return
        for b in candidates(xi):
            nxt = b.reflect_vec(xi)
            yield from dfs(nxt, vecs + [nxt], roots + [b], left - 1)

    r0 = xi_plus[0] / xi_plus[1]
    depth = abs(math.floor(r0) - c_inf.index) + 1
    for n in range(1, depth + 1):
        yield from dfs(xi_plus, [xi_plus], [], n)


def chain_search(p: Point, xi_plus, xi_minus, k_bound: int = 64) -> Chain | None:
    """The first chain of :func:`iter_chains`, or None.

    >>> ch = chain_search(Point(0, Fraction(-2, 3)), (6, -1), (0, -1))
    >>> [str(r) for r in ch.roots]
    ['-ℵ-3δ']
    """
    return next(iter_chains(p, xi_plus, xi_minus, k_bound), None)


# ---------------------------------------------------------------------------
# verifier

@dataclass(frozen=True)
class FoldCheck:
    t: Fraction
    point: Point
    xi_plus: Vec
    xi_minus: Vec
    chain: Chain | None


@dataclass
class HeckeReport:
    ok: bool
    events: list
    folds: list
    problems: list = field(default_factory=list)
    k_bound: int = 0

    def lines(self) -> list[str]:
        out = [f"verify-hecke: {'PASS' if self.ok else 'FAIL'}"]
        for p in self.problems:
            out.append(f"  problem: {p}")
        for f in self.folds:
            if f.chain is None:
                out.append(f"  fold t={f.t} at {f.point}: no chain")
            else:
                roots = ", ".join(str(r) for r in f.chain.roots) or "(empty)"
                out.append(f"  fold t={f.t} at {f.point}: chain [{roots}]")
        return out

    def to_json(self) -> dict:
        return {
            "schema": SCHEMA,
            "ok": self.ok,
            "k_bound": self.k_bound,
            "problems": list(self.problems),
            "events": [e.to_json() for e in self.events],
            "folds": [
                {
                    "t": str(f.t),
                    "point": f.point.to_json(),
                    "xi_plus": [str(c) for c in f.xi_plus],
                    "xi_minus": [str(c) for c in f.xi_minus],
                    "chain": None if f.chain is None else f.chain.to_json(),
                }
                for f in self.folds
            ],
        }


def verify_hecke(path: PiecewisePath, k_bound: int | None = None) -> HeckeReport:
    """Check every fold for a chain of thick reflections; ``k_bound=None`` picks a sufficient window."""
    if k_bound is None:
        k_bound = crossing_bound(path)
    events = crossing_events(path, k_bound)
    problems = []
    ox, oy = path.origin
    if not (path.eps * oy > 0 or (ox == 0 and oy == 0)):
        problems.append("origin is not in eps*T")
    folds = []
    for t in path.fold_times():
        p = path.point_at(t)
        xp, xm = path.deriv_plus(t), path.deriv_minus(t)
        ch = chain_search(p, xp, xm, k_bound)
        if ch is not None and ch.replay(xp) != xm:
            problems.append(f"chain at t={t} does not replay")
        folds.append(FoldCheck(t, p, xp, xm, ch))
    ok = not problems and all(f.chain is not None for f in folds)
    return HeckeReport(ok, events, folds, problems, crossing_bound(path))


# ---------------------------------------------------------------------------
# decorations

@dataclass(frozen=True)
class DecorationPoint:
    t: Fraction
    point: Point
    c_plus: LocalChamber | None
    c_minus: LocalChamber | None
    c_pp: LocalChamber | None  # C^(+): projection of C^- onto the continued incoming germ

    def to_json(self) -> dict:
        return {
            "t": str(self.t),
            "point": self.point.to_json(),
            "c_plus": None if self.c_plus is None else self.c_plus.to_json(),
            "c_minus": None if self.c_minus is None else self.c_minus.to_json(),
            "c_pp": None if self.c_pp is None else self.c_pp.to_json(),
        }


@dataclass(frozen=True)
class Decoration:
    path: PiecewisePath
    points: tuple

    @property
    def times(self) -> list[Fraction]:
        return [dp.t for dp in self.points]

    def to_json(self) -> dict:
        return {"schema": SCHEMA, "path": self.path.to_json(), "points": [p.to_json() for p in self.points]}


def _decoration_times(path: PiecewisePath, k_bound: int) -> list[Fraction]:
    ts = {Fraction(0), Fraction(1)}
    ts.update(e.t for e in crossing_events(path, k_bound))
    ts.update(path.fold_times())
    return sorted(ts)


def _apply_linear(w: WeylElt, c: LocalChamber, base: Point) -> LocalChamber:
    s, idx = c.sign, chamber_index(w.act(c.sample_direction()))
    return LocalChamber.at(base, s, idx)


def decorate(path: PiecewisePath, k_bound: int | None = None) -> Decoration:
    """The decoration built from C-infinity projections and the chains at folds.

    Raises :class:`NotHecke` when some fold has no chain.
    """
    if k_bound is None:
        k_bound = crossing_bound(path)
    times = _decoration_times(path, k_bound)
    pts = []
    prev_plus = None
    for t in times:
        p = path.point_at(t)
        c_minus = c_pp = c_plus = None
        if t > 0:
            dm = path.deriv_minus(t)
            c_minus = project_chamber(p, _neg(dm), prev_plus)
            c_pp = project_chamber(p, dm, c_minus)
        if t == 0:
            c_plus = project_chamber(p, path.deriv_plus(t), c_infinity_chamber(p))
        elif t < 1:
            dp, dm = path.deriv_plus(t), path.deriv_minus(t)
            if dp == dm:
                c_plus = c_pp
            else:
                c_plus = _fold_chamber(p, dp, dm, c_pp, c_minus, k_bound)
        pts.append(DecorationPoint(t, p, c_plus, c_minus, c_pp))
        prev_plus = c_plus
    return Decoration(path, tuple(pts))


def _fold_chamber(p: Point, dp: Vec, dm: Vec, c_pp: LocalChamber, c_minus: LocalChamber, k_bound: int) -> LocalChamber:
    # C+ = r_1 ... r_s (C(+)) for a chain; keep the first one admitting a gallery
    cinf = c_infinity_chamber(p)
    first = None
    for ch in iter_chains(p, dp, dm, k_bound):
        c = c_pp
        for b in reversed(ch.roots):
            c = LocalChamber.at(p, c.sign, chamber_index(b.reflect_vec(c.sample_direction())))
        if first is None:
            first = c
        typ = minimal_gallery_type(cinf, c)
        if find_centrifugal_gallery(p, cinf.sign, cinf.index, typ.letters, c_pp.index, c_minus) is not None:
            return c
    if first is None:
        raise NotHecke(f"no chain at {p}")
    return first


def decoration_from_chambers(path: PiecewisePath, entries: Sequence[tuple]) -> Decoration:
    """Decoration from ``(t, c_plus, c_minus)`` triples; C^(+) is derived."""
    pts = []
    for t, cp, cm in entries:
        t = _q(t)
        p = path.point_at(t)
        cpp = None if cm is None else project_chamber(p, path.deriv_minus(t), cm)
        pts.append(DecorationPoint(t, p, cp, cm, cpp))
    return Decoration(path, tuple(pts))


# ---------------------------------------------------------------------------
# superdecorations

@dataclass(frozen=True)
class SuperItem:
    t: Fraction
    point: Point
    type: GalleryType
    m: int
    m1: int  # m'
    m2: int  # m''
    gallery: Gallery | None
    c_minus: LocalChamber

    def to_json(self) -> dict:
        return {
            "t": str(self.t),
            "point": self.point.to_json(),
            "type": self.type.word,
            "hyperplanes": list(self.type.hyperplanes),
            "m": self.m,
            "m_prime": self.m1,
            "m_doubleprime": self.m2,
            "gallery": None if self.gallery is None else self.gallery.to_json(),
            "center": self.c_minus.to_json(),
        }


@dataclass(frozen=True)
class Superdecoration:
    decoration: Decoration
    m0_doubleprime: int
    items: tuple

    @property
    def path(self) -> PiecewisePath:
        return self.decoration.path

    def to_json(self) -> dict:
        d = self.decoration.to_json()
        d["m0_doubleprime"] = self.m0_doubleprime
        d["items"] = [it.to_json() for it in self.items]
        return d

    @classmethod
    def from_json(cls, d: dict) -> "Superdecoration":
        path = PiecewisePath.from_json(d["path"])

        def ch(x):
            if x is None:
                return None
            return LocalChamber.at(Point.from_json(x["base"]), int(x["sign"]), int(x["index"]))

        pts = tuple(
            DecorationPoint(Fraction(p["t"]), Point.from_json(p["point"]), ch(p["c_plus"]), ch(p["c_minus"]), ch(p["c_pp"]))
            for p in d["points"]
        )
        items = []
        for it in d.get("items", []):
            pt = Point.from_json(it["point"])
            g = it.get("gallery")
            gal = None
            if g is not None:
                from .galleries import Step

                steps = tuple(Step(int(s["wall"]), bool(s["stammer"]), bool(s["thick"])) for s in g["steps"])
                gal = Gallery(int(g["sign"]), int(g["chambers"][0]["index"]), steps, pt)
            items.append(
                SuperItem(
                    Fraction(it["t"]),
                    pt,
                    GalleryType(tuple(int(h) for h in it["hyperplanes"]), pt),
                    int(it["m"]),
                    int(it["m_prime"]),
                    int(it["m_doubleprime"]),
                    gal,
                    ch(it["center"]),
                )
            )
        return cls(Decoration(path, pts), int(d.get("m0_doubleprime", 0)), tuple(items))


def _m_prime(c_inf: LocalChamber, germ: Vec) -> int:
    r = germ[0] / germ[1]
    if r.denominator != 1:
        return abs(math.floor(r) - c_inf.index)
    h = r.numerator
    return min(abs(h - c_inf.index), abs(h - 1 - c_inf.index))


def superdecorate(decoration: Decoration) -> Superdecoration:
    """Attach gallery data at every interior point of the decoration."""
    path = decoration.path
    first = decoration.points[0]
    cinf0 = c_infinity_chamber(first.point)
    m0 = m_doubleprime(first.point, cinf0, first.c_plus, path.deriv_plus(first.t)) if cinf0.sign == first.c_plus.sign else 0
    items = []
    for dp in decoration.points[1:-1]:
        p = dp.point
        cinf = c_infinity_chamber(p)
        germ = path.deriv_plus(dp.t)
        typ = minimal_gallery_type(cinf, dp.c_plus)
        gal = find_centrifugal_gallery(p, cinf.sign, cinf.index, typ.letters, dp.c_pp.index, dp.c_minus)
        items.append(
            SuperItem(
                dp.t, p, typ, len(typ), _m_prime(cinf, germ), m_doubleprime(p, cinf, dp.c_plus, germ), gal, dp.c_minus
            )
        )
    return Superdecoration(decoration, m0, tuple(items))


@dataclass
class CheckReport:
    """Itemised pass/fail lines."""

    items: list = field(default_factory=list)

    def add(self, name: str, ok: bool, detail: str = "") -> None:
        self.items.append((name, bool(ok), detail))

    @property
    def ok(self) -> bool:
        return all(ok for _, ok, _ in self.items)

    @property
    def failures(self) -> list:
        return [(n, d) for n, ok, d in self.items if not ok]

    def lines(self) -> list[str]:
        return [f"{'PASS' if ok else 'FAIL'} {n}" + (f": {d}" if d else "") for n, ok, d in self.items]

    def to_json(self) -> dict:
        return {"ok": self.ok, "items": [{"name": n, "ok": ok, "detail": d} for n, ok, d in self.items]}


def validate_superdecoration(sd: Superdecoration) -> CheckReport:
    rep = CheckReport()
    path = sd.path
    pts = sd.decoration.points
    eps = path.eps
    if not pts or pts[0].t != 0 or pts[-1].t != 1:
        rep.add("decoration times", False, "must start at 0 and end at 1")
        return rep
    for i, dp in enumerate(pts):
        tag = f"t={dp.t}"
        if dp.point != path.point_at(dp.t):
            rep.add(f"{tag} point", False, f"{dp.point} is not on the path")
            continue
        if dp.t < 1:
            c = dp.c_plus
            germ = path.deriv_plus(dp.t)
            ok = c is not None and c.sign == eps and c.contains_in_closure(germ) and c.base == dp.point
            rep.add(f"{tag} C+ sign and germ", ok)
        if dp.t > 0:
            c = dp.c_minus
            germ = _neg(path.deriv_minus(dp.t))
            ok = c is not None and c.sign == -eps and c.contains_in_closure(germ) and c.base == dp.point
            rep.add(f"{tag} C- sign and germ", ok)
            if ok and i > 0 and pts[i - 1].c_plus is not None:
                want = project_chamber(dp.point, germ, pts[i - 1].c_plus)
                rep.add(f"{tag} C- is the projection of the previous C+", want == c)
            if ok:
                want = project_chamber(dp.point, path.deriv_minus(dp.t), c)
                rep.add(f"{tag} C(+) is the projection of C-", dp.c_pp == want)
    p0 = pts[0]
    try:
        want0 = project_chamber(p0.point, path.deriv_plus(0), c_infinity_chamber(p0.point))
        rep.add("C+_0 is the projection of C-infinity", p0.c_plus == want0)
    except NotDefined as exc:
        rep.add("C+_0 is the projection of C-infinity", False, str(exc))
    interior = {dp.t: dp for dp in pts[1:-1]}
    if {it.t for it in sd.items} != set(interior):
        rep.add("gallery data at every interior point", False)
    for it in sd.items:
        dp = interior.get(it.t)
        if dp is None:
            continue
        tag = f"t={it.t}"
        cinf = c_infinity_chamber(dp.point)
        typ = minimal_gallery_type(cinf, dp.c_plus)
        rep.add(f"{tag} type is minimal C-inf to C+", typ.hyperplanes == it.type.hyperplanes)
        rep.add(f"{tag} m equals type length", it.m == len(typ))
        rep.add(f"{tag} m'' count", it.m2 == m_doubleprime(dp.point, cinf, dp.c_plus, path.deriv_plus(it.t)))
        rep.add(f"{tag} centre is C-", it.c_minus == dp.c_minus)
        g = it.gallery
        if g is None:
            rep.add(f"{tag} gallery", False, "missing")
            continue
        thick_ok = all(s.thick == hyperplane_is_thick(dp.point, s.wall) for s in g.steps)
        rep.add(f"{tag} gallery thickness flags", thick_ok)
        rep.add(f"{tag} gallery type", g.letters == typ.letters)
        rep.add(f"{tag} gallery starts at C-inf", g.start == cinf.index and g.sign == cinf.sign)
        rep.add(f"{tag} gallery ends at C(+)", dp.c_pp is not None and g.end == dp.c_pp.index)
        rep.add(f"{tag} centrifugally folded", is_centrifugal(g, dp.c_minus))
    return rep


# ---------------------------------------------------------------------------
# folding measure

@dataclass
class FoldingMeasure:
    entries: list  # (t, w_plus or None, w_minus or None)
    report: CheckReport

    @property
    def ok(self) -> bool:
        return self.report.ok


def folding_measure(path: PiecewisePath, decoration: Decoration) -> FoldingMeasure:
    """w_i^+ = d(C-inf, C+) and w_i^- = d(C-inf, C(+)) at the decoration points, with Bruhat checks."""
    if decoration.path.vertices != path.vertices:
        raise DecorationMismatch("decoration belongs to another path")
    pts = decoration.points
    for dp in pts:
        if dp.point != path.point_at(dp.t):
            raise DecorationMismatch(f"decoration point t={dp.t} is off the path")
        if (dp.t < 1 and dp.c_plus is None) or (dp.t > 0 and dp.c_pp is None):
            raise DecorationMismatch(f"decoration point t={dp.t} lacks chambers")
    n = len(pts) - 1
    wp: dict = {}
    wm: dict = {}
    for i, dp in enumerate(pts):
        if i == 0:
            continue
        cinf = c_infinity_chamber(dp.point)
        if i < n:
            wp[i] = weyl_distance(cinf, dp.c_plus)
        wm[i] = weyl_distance(cinf, dp.c_pp)
    rep = CheckReport()
    for i in range(1, n + 1):
        prev = pts[i - 1].c_plus
        rep.add(f"t={pts[i].t} direction of C(+) equals previous C+", prev is not None and prev.w == pts[i].c_pp.w and prev.sign == pts[i].c_pp.sign)
    for i in range(2, n + 1):
        rep.add(f"w+[{i - 1}] >= w-[{i}]", bruhat_leq(wm[i], wp[i - 1]), f"{wp[i - 1].word or 'e'} vs {wm[i].word or 'e'}")
    for i in range(1, n):
        rep.add(f"w-[{i}] <= w+[{i}]", bruhat_leq(wm[i], wp[i]), f"{wm[i].word or 'e'} vs {wp[i].word or 'e'}")
    entries = [(pts[i].t, wp.get(i), wm.get(i)) for i in range(n + 1)]
    return FoldingMeasure(entries, rep)
