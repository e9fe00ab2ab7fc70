"""The group SL2(k(w)[u, u^-1]) x| k(w)^*, its memberships and segment retractions.

Elements are pairs (M, z) with det M = 1 and the product

    (M, z) . (M1, z1) = (M . M1(w, z*u), z*z1).

>>> F = Field()
>>> w, u = RationalU.w(F), RationalU.u(F)
>>> g = lower(w / u) * upper(u**-1 / w)
>>> g.entries[1][1]
u^-2+1
"""

from __future__ import annotations

import enum
import math
import re
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterable, Sequence

from .exactalg import (
    INF,
    QQ,
    Field,
    ParseError,
    RationalFunc,
    RationalU,
    expand_series,
    format_ru,
    parse_rf,
    parse_ru,
)
from .heckepath import (
    Decoration,
    PiecewisePath,
    Piece,
    Superdecoration,
    crossing_bound,
    crossing_events,
    decoration_from_chambers,
    superdecorate,
)
from .rootgeom import (
    AffineRoot,
    LocalChamber,
    Point,
    Sheet,
    WeylElt,
    c_infinity_chamber,
    chamber_index,
    project_chamber,
)

__all__ = [
    "GroupElement",
    "RootGenerator",
    "AffineMap",
    "HalfApartment",
    "MembershipTag",
    "MembershipCertificate",
    "StepCertificate",
    "RetractionResult",
    "ZeroEntry",
    "SingularPivot",
    "NotInN",
    "StrategyInapplicable",
    "upper",
    "lower",
    "diag",
    "antidiag",
    "mul",
    "fixed_halfspace",
    "identity_rewrite_1",
    "identity_rewrite_2",
    "membership",
    "delta_level",
    "n_action",
    "reflection_map",
    "retract_segment",
    "named_word",
    "named_element",
    "g_word",
    "gprime_word",
    "counterexample_report",
    "valuation",
]


class ZeroEntry(ValueError):
    pass


class SingularPivot(ZeroDivisionError):
    pass


class NotInN(ValueError):
    pass


class StrategyInapplicable(ValueError):
    pass


def valuation(f: RationalFunc, sheet: Sheet) -> int | float:
    """omega_plus, omega_minus, or 0 on the vectorial sheet."""
    if sheet is Sheet.PLUS:
        return f.val_plus()
    if sheet is Sheet.MINUS:
        return f.val_minus()
    return 0 if f else INF


# ---------------------------------------------------------------------------
# group elements

@dataclass(frozen=True)
class GroupElement:
    """(M, sd) with M a 2x2 matrix over k(w)(u) of determinant 1."""

    entries: tuple  # ((a, b), (c, d)) of RationalU
    sd: RationalFunc

    def __post_init__(self):
        (a, b), (c, d) = self.entries
        if not self.sd:
            raise ZeroEntry("the semidirect scalar must be nonzero")
        det = a * d - b * c
        if not det.is_one():
            raise ValueError(f"determinant {det} is not 1")

    @property
    def field(self) -> Field:
        return self.sd.field

    @classmethod
    def identity(cls, field: Field = QQ) -> "GroupElement":
        one, zero = RationalU.const(1, field), RationalU.zero(field)
        return cls(((one, zero), (zero, one)), RationalFunc.one(field))

    @classmethod
    def scalar(cls, z: RationalFunc) -> "GroupElement":
        g = cls.identity(z.field)
        return cls(g.entries, z)

    @classmethod
    def from_rows(cls, rows, sd=None, field: Field | None = None) -> "GroupElement":
        if field is None:
            found = [x.field for row in rows for x in row if isinstance(x, (RationalU, RationalFunc))]
            field = found[0] if found else QQ

        def cv(x):
            if isinstance(x, RationalU):
                return x
            if isinstance(x, RationalFunc):
                return RationalU.const(x, x.field)
            return RationalU.const(x, field)

        ent = tuple(tuple(cv(x) for x in row) for row in rows)
        f = ent[0][0].field
        if sd is None:
            sd = RationalFunc.one(f)
        elif not isinstance(sd, RationalFunc):
            sd = RationalFunc.const(sd, f)
        return cls(ent, sd)

    def __mul__(self, other: "GroupElement") -> "GroupElement":
        return mul(self, other)

    def inverse(self) -> "GroupElement":
        (a, b), (c, d) = self.entries
        zi = self.sd.inverse()
        m = ((d.scale_u(zi), (-b).scale_u(zi)), ((-c).scale_u(zi), a.scale_u(zi)))
        return GroupElement(m, zi)

    def is_loop(self) -> bool:
        return self.sd.is_one()

    def __eq__(self, other):
        if not isinstance(other, GroupElement):
            return NotImplemented
        return self.entries == other.entries and self.sd == other.sd

    def __hash__(self):
        return hash((self.entries, self.sd))

    def format(self) -> str:
        (a, b), (c, d) = self.entries
        return f"[[{format_ru(a)},{format_ru(b)}],[{format_ru(c)},{format_ru(d)}]];sd={self.sd}"

    __str__ = format

    @classmethod
    def parse(cls, text: str, field: Field = QQ) -> "GroupElement":
        """Inverse of :meth:`format`; the ``;sd=`` part is optional."""
        text = text.strip()
        sd_text = "1"
        if ";" in text:
            text, rest = text.split(";", 1)
            rest = rest.strip()
            if not rest.startswith("sd="):
                raise ParseError(f"expected 'sd=' after ';', got {rest!r}")
            sd_text = rest[3:]
        m = re.fullmatch(r"\s*\[\s*\[(.*)\]\s*,\s*\[(.*)\]\s*\]\s*", text)
        if not m:
            raise ParseError("expected [[a,b],[c,d]]")
        rows = []
        for row in m.groups():
            parts = row.split(",")
            if len(parts) != 2:
                raise ParseError(f"row {row!r} must have two entries")
            rows.append(tuple(parse_ru(p, field) for p in parts))
        return cls(tuple(rows), parse_rf(sd_text, field))

    def to_json(self) -> dict:
        return {"element": self.format()}


def mul(a: GroupElement, b: GroupElement) -> GroupElement:
    """Semidirect product: substitute u -> z*u in b before multiplying matrices."""
    (a11, a12), (a21, a22) = a.entries
    bm = b.entries
    if not a.sd.is_one():
        bm = tuple(tuple(x.scale_u(a.sd) for x in row) for row in bm)
    (b11, b12), (b21, b22) = bm
    m = ((a11 * b11 + a12 * b21, a11 * b12 + a12 * b22), (a21 * b11 + a22 * b21, a21 * b12 + a22 * b22))
    return GroupElement(m, a.sd * b.sd)


def _ru(x, field: Field) -> RationalU:
    if isinstance(x, RationalU):
        return x
    if isinstance(x, RationalFunc):
        return RationalU.const(x, x.field)
    return RationalU.const(x, field)


def upper(x, field: Field = QQ) -> GroupElement:
    x = _ru(x, field)
    f = x.field
    one, zero = RationalU.const(1, f), RationalU.zero(f)
    return GroupElement(((one, x), (zero, one)), RationalFunc.one(f))


def lower(x, field: Field = QQ) -> GroupElement:
    x = _ru(x, field)
    f = x.field
    one, zero = RationalU.const(1, f), RationalU.zero(f)
    return GroupElement(((one, zero), (x, one)), RationalFunc.one(f))


def diag(x, field: Field = QQ) -> GroupElement:
    x = _ru(x, field)
    if not x:
        raise ZeroEntry("diag(0)")
    f = x.field
    zero = RationalU.zero(f)
    return GroupElement(((x, zero), (zero, x.inverse())), RationalFunc.one(f))


def antidiag(x, field: Field = QQ) -> GroupElement:
    """[[0, x], [-1/x, 0]]."""
    x = _ru(x, field)
    if not x:
        raise ZeroEntry("antidiag(0)")
    f = x.field
    zero = RationalU.zero(f)
    return GroupElement(((zero, x), (-x.inverse(), zero)), RationalFunc.one(f))


@dataclass(frozen=True)
class RootGenerator:
    """x_{eps*aleph + k*delta}(y): unitriangular with entry u^k * y."""

    eps: int
    k: int
    y: RationalFunc

    def __post_init__(self):
        if self.eps not in (1, -1):
            raise ValueError("eps must be +1 or -1")

    @property
    def entry(self) -> RationalU:
        return RationalU.monomial(self.y, self.k, self.y.field)

    def element(self) -> GroupElement:
        return upper(self.entry) if self.eps == 1 else lower(self.entry)

    def __str__(self) -> str:
        a = "ℵ" if self.eps == 1 else "-ℵ"
        k = f"{'+' if self.k >= 0 else '-'}{abs(self.k)}δ" if self.k else ""
        return f"x_{{{a}{k}}}({self.y})"


@dataclass(frozen=True)
class HalfApartment:
    root: AffineRoot
    sheet: Sheet

    def contains(self, p: Point) -> bool:
        return self.root(Point(p.x, p.y, self.sheet)) >= 0

    def __str__(self) -> str:
        return f"{{{self.root} >= 0}} on {self.sheet.symbol}"


def fixed_halfspace(g: RootGenerator, sheet: Sheet = Sheet.PLUS) -> HalfApartment:
    """The half-apartment fixed by x_{eps*aleph+k*delta}(y) on a sheet.

    >>> F = Field()
    >>> str(fixed_halfspace(RootGenerator(1, 3, RationalFunc.monomial(1, 2, F))).root)
    'ℵ+3δ+2ξ'
    """
    if not g.y:
        raise ZeroEntry("x_alpha(0) fixes everything; no wall")
    if sheet is Sheet.PLUS:
        m = g.y.val_plus()
    elif sheet is Sheet.MINUS:
        m = -g.y.val_minus()
    else:
        m = 0
    return HalfApartment(AffineRoot(g.eps, g.k, m), sheet)


def identity_rewrite_1(a: RationalU) -> tuple[GroupElement, GroupElement, GroupElement]:
    """[[1,a],[0,1]] = L(1/a) . antidiag(a) . L(1/a)."""
    if not a:
        raise ZeroEntry("identity 1 needs a != 0")
    ai = a.inverse()
    return lower(ai), antidiag(a), lower(ai)


def identity_rewrite_2(a: RationalU, b: RationalU) -> tuple[GroupElement, GroupElement, GroupElement]:
    """[[1,a],[0,1]] [[1,0],[b,1]] = L(b/P) . diag(P) . U(a/P) with P = 1 + ab."""
    P = 1 + a * b
    if not P:
        raise SingularPivot("1 + a*b = 0")
    Pi = P.inverse()
    return lower(b * Pi), diag(P), upper(a * Pi)


def delta_level(g: GroupElement, sheet: Sheet = Sheet.PLUS) -> int:
    """Uniform shift of the delta coordinate under g: omega_sheet(g.sd)."""
    v = valuation(g.sd, sheet)
    return 0 if v == INF else int(v)


# ---------------------------------------------------------------------------
# affine maps of the apartment

@dataclass(frozen=True)
class AffineMap:
    """(x, y) -> (s*x + 2*j*y + tx, y + ty)."""

    s: int = 1
    j: int = 0
    tx: Fraction = Fraction(0)
    ty: Fraction = Fraction(0)
    label: str = field(default="", compare=False)

    @property
    def w(self) -> WeylElt:
        return WeylElt(self.s, self.j)

    def __call__(self, p: Point) -> Point:
        return Point(self.s * p.x + 2 * self.j * p.y + self.tx, p.y + self.ty, p.sheet)

    def linear(self, v) -> tuple:
        return self.w.act(v)

    def __mul__(self, other: "AffineMap") -> "AffineMap":
        """self after other."""
        return AffineMap(
            self.s * other.s,
            self.s * other.j + self.j,
            self.s * other.tx + 2 * self.j * other.ty + self.tx,
            self.ty + other.ty,
            self.label + other.label,
        )

    def is_identity(self) -> bool:
        return self.s == 1 and self.j == 0 and self.tx == 0 and self.ty == 0

    def __str__(self) -> str:
        return self.label or ("id" if self.is_identity() else f"x->{self.s}x+{2 * self.j}y+{self.tx}, y->y+{self.ty}")


def reflection_map(k: int, m, label: str | None = None) -> AffineMap:
    """Reflection in the wall x + k*y + m = 0."""
    m = Fraction(m)
    if label is None:
        label = f"R{m}" if m == k - 1 else f"r[ℵ{k:+d}δ{'+' if m >= 0 else '-'}{abs(m)}ξ]"
    return AffineMap(-1, -k, -2 * m, Fraction(0), label)


def _u_monomial_parts(x: RationalU) -> tuple[RationalFunc, int]:
    if not x.is_monomial():
        raise NotInN(f"{x} is not a monomial in u")
    return x.N[0], x.e


def n_action(n: GroupElement, sheet: Sheet = Sheet.PLUS) -> AffineMap:
    """The affine map induced on the sheet's apartment by an element of N.

    >>> F = Field()
    >>> w = RationalU.w(F)
    >>> m = n_action(diag(w))
    >>> (m.s, m.j, m.tx, m.ty)
    (1, 0, Fraction(-2, 1), Fraction(0, 1))
    """
    (a, b), (c, d) = n.entries
    sdv = valuation(n.sd, sheet)
    shift = AffineMap(1, 0, Fraction(0), Fraction(0 if sdv == INF else sdv))
    if not b and not c:
        f, k = _u_monomial_parts(a)
        wv = valuation(f, sheet)
        # diag(a) = antidiag(a) . antidiag(-1)
        r = reflection_map(k, wv) * reflection_map(0, 0)
        return AffineMap(r.s, r.j, r.tx, r.ty, f"diag") * shift
    if not a and not d:
        f, k = _u_monomial_parts(b)
        wv = valuation(f, sheet)
        return reflection_map(k, wv) * shift
    raise NotInN("element is neither diagonal nor antidiagonal")


# ---------------------------------------------------------------------------
# memberships

class MembershipTag(enum.Enum):
    K = "K"
    K_BAR_LOOP = "K_bar_loop"
    I_INF_BAR_LOOP = "I_inf_bar_loop"
    U_MA_MINUS = "U_ma_minus"
    G_TWIN = "G_twin"
    G_LOOP_POL = "G_loop_pol"
    SL2_OPLUS_LAURENT = "SL2_Oplus_laurent"
    I_INF_FACTORS = "I_inf_by_factors"


@dataclass
class MembershipCertificate:
    tag: MembershipTag
    verdict: str  # "yes" | "no" | "unknown"
    witness: dict = field(default_factory=dict)
    depth: int | None = None

    @property
    def yes(self) -> bool:
        return self.verdict == "yes"

    def to_json(self) -> dict:
        return {"tag": self.tag.value, "verdict": self.verdict, "witness": self.witness, "depth": self.depth}


# coefficient conditions ---------------------------------------------------------

def _in_kwinv(c: RationalFunc) -> bool:
    """c in k[w^-1]."""
    return c.is_laurent_poly() and (not c or (len(c.num) - 1) <= (len(c.den) - 1))


def _in_winv_kwinv(c: RationalFunc) -> bool:
    """c in w^-1 k[w^-1]."""
    return c.is_laurent_poly() and (not c or (len(c.num) - 1) < (len(c.den) - 1))


def _in_oplus(c: RationalFunc) -> bool:
    return c.val_plus() >= 0


def _in_ominus(c: RationalFunc) -> bool:
    return c.val_minus() >= 0


def _is_zero(c: RationalFunc) -> bool:
    return not c


def _in_O(c: RationalFunc) -> bool:
    return c.is_laurent_poly()


@dataclass(frozen=True)
class _EntryRule:
    """Coefficient condition by exponent, monotone (weaker for lower exponents)."""

    name: str
    cond: Callable[[int, RationalFunc], bool]
    offset: int = 0  # check f - offset instead of f (used for 1 + ...)


def _rule_threshold(name: str, hi: Callable, lo: Callable, cut: int) -> _EntryRule:
    return _EntryRule(name, lambda e, c: hi(c) if e >= cut else lo(c))


_IINF_DIAG = _rule_threshold("w^-1 k[w^-1] (u>0), k[w^-1] (u<=0)", _in_winv_kwinv, _in_kwinv, 1)
_IINF_12 = _rule_threshold("w^-1 k[w^-1] (u>=0), k[w^-1] (u<0)", _in_winv_kwinv, _in_kwinv, 0)
_UMA_UNIT = _EntryRule("1 + u^-1 O-[[u^-1]]", lambda e, c: (not c) if e >= 0 else _in_ominus(c), 1)
_UMA_OFF12 = _EntryRule("u^-1 O-[[u^-1]]", lambda e, c: (not c) if e >= 0 else _in_ominus(c))
_UMA_OFF21 = _EntryRule("O-[[u^-1]]", lambda e, c: (not c) if e > 0 else _in_ominus(c))
_KBAR = _EntryRule("O+((u^-1))", lambda e, c: _in_oplus(c))

_SERIES_TAGS = {
    MembershipTag.I_INF_BAR_LOOP: ((_IINF_DIAG, _IINF_12), (_IINF_DIAG, _IINF_DIAG), _in_kwinv),
    MembershipTag.U_MA_MINUS: ((_UMA_UNIT, _UMA_OFF12), (_UMA_OFF21, _UMA_UNIT), _in_ominus),
    MembershipTag.K_BAR_LOOP: ((_KBAR, _KBAR), (_KBAR, _KBAR), _in_oplus),
}


def _series_entry(f: RationalU, rule: _EntryRule, ring: Callable, depth: int) -> tuple[str, dict]:
    if rule.offset:
        f = f - rule.offset
    if not f:
        return "yes", {"entry": "0"}
    s, A, B = f.u_inv_form()
    # sufficient: B in ring[v] with B(0) = 1 and each A_i meets the rule at u^(s-i)
    if all(ring(b) for b in B) and all(rule.cond(s - i, a) for i, a in enumerate(A) if a):
        return "yes", {"shift": s, "numerator_v": [str(a) for a in A], "denominator_v": [str(b) for b in B]}
    ser = expand_series(f, depth)
    for e, c in sorted(ser.terms().items(), reverse=True):
        if not rule.cond(e, c):
            return "no", {"exponent": e, "coefficient": str(c), "condition": rule.name}
    return "unknown", {"checked_down_to": -depth}


def _laurent_entry(f: RationalU, cond: Callable, cname: str) -> tuple[str, dict]:
    if not f.is_laurent():
        return "no", {"reason": "not a Laurent polynomial in u", "entry": format_ru(f)}
    for e, c in sorted(f.terms().items()):
        if not cond(c):
            return "no", {"exponent": e, "coefficient": str(c), "condition": cname,
                          "val_plus": _fmt_val(c.val_plus())}
    return "yes", {}


def _fmt_val(v) -> str:
    return "inf" if v == INF else str(v)


def _span(terms: dict) -> int:
    return max(terms) - min(terms) if terms else -1


def _twin_reduce(g: GroupElement, max_steps: int = 10_000) -> tuple[str, dict]:
    """Column reduction over O[u, u^-1] using generators with unit pivots."""
    F = g.field
    (a, b), (c, d) = g.entries
    for x in (a, b, c, d):
        if not x.is_laurent() or not all(_in_O(co) for co in x.terms().values()):
            return "no", {"reason": "entry outside O[u,u^-1]", "entry": format_ru(x)}
    sd = g.sd
    if not sd.is_monomial():
        return "no", {"reason": "semidirect scalar is not in k^* w^Z", "sd": str(sd)}
    # work with columns (a, c) and (b, d); right multiplication by U(x) adds x*col1 to col2
    c1 = [a.terms(), c.terms()]
    c2 = [b.terms(), d.terms()]
    ops = []

    def axpy(dst, src, coef, sh):
        for row in (0, 1):
            for e, v in src[row].items():
                k = e + sh
                nv = dst[row].get(k, RationalFunc.zero(F)) + coef * v
                if nv:
                    dst[row][k] = nv
                else:
                    dst[row].pop(k, None)

    for _ in range(max_steps):
        if not c2[0]:
            # upper-left is a unit monomial; clear the lower-left with L-type moves
            if len(c1[0]) != 1:
                return "unknown", {"reason": "diagonal entry is not a monomial"}
            ops.append("L")
            return "yes", {"moves": len(ops)}
        if not c1[0]:
            c1, c2 = c2, [{e: -v for e, v in c1[0].items()}, {e: -v for e, v in c1[1].items()}]
            ops.append("S")
            continue
        p, q = c1[0], c2[0]
        if _span(q) < _span(p):
            c1, c2 = c2, [{e: -v for e, v in c1[0].items()}, {e: -v for e, v in c1[1].items()}]
            ops.append("S")
            continue
        hp, lp = max(p), min(p)
        hq, lq = max(q), min(q)
        if p[hp].is_monomial():
            coef = -(q[hq] / p[hp])
            axpy(c2, c1, coef, hq - hp)
            ops.append("U")
        elif p[lp].is_monomial():
            coef = -(q[lq] / p[lp])
            axpy(c2, c1, coef, lq - lp)
            ops.append("U")
        else:
            return "unknown", {"reason": "no unit pivot", "moves": len(ops)}
    return "unknown", {"reason": "step budget exhausted"}


def membership(g: GroupElement, tag: MembershipTag, depth: int = 32) -> MembershipCertificate:
    """Entry-level membership test with a yes / no / unknown verdict.

    >>> F = Field()
    >>> w, u = RationalU.w(F), RationalU.u(F)
    >>> membership(lower(w / u) * upper(1 / (w * u)), MembershipTag.SL2_OPLUS_LAURENT).verdict
    'no'
    """
    if isinstance(tag, str):
        tag = MembershipTag(tag)
    ent = g.entries
    if tag in _SERIES_TAGS:
        if not g.is_loop():
            return MembershipCertificate(tag, "no", {"reason": "semidirect scalar is not 1"}, depth)
        rules, ring = _SERIES_TAGS[tag][:2], _SERIES_TAGS[tag][2]
        verdicts, wit = [], {}
        for i in range(2):
            for j in range(2):
                v, w_ = _series_entry(ent[i][j], rules[i][j], ring, depth)
                verdicts.append(v)
                wit[f"{i + 1}{j + 1}"] = {"verdict": v, **w_}
                if v == "no":
                    return MembershipCertificate(tag, "no", {"entry": f"{i + 1}{j + 1}", **w_}, depth)
        verdict = "yes" if all(v == "yes" for v in verdicts) else "unknown"
        return MembershipCertificate(tag, verdict, wit, depth)
    if tag in (MembershipTag.SL2_OPLUS_LAURENT, MembershipTag.K, MembershipTag.G_LOOP_POL):
        cond, cname = (_in_O, "O") if tag is MembershipTag.G_LOOP_POL else (_in_oplus, "O+")
        for i in range(2):
            for j in range(2):
                v, w_ = _laurent_entry(ent[i][j], cond, cname)
                if v == "no":
                    return MembershipCertificate(tag, "no", {"entry": f"{i + 1}{j + 1}", **w_})
        if tag is MembershipTag.K:
            if g.sd.val_plus() != 0:
                return MembershipCertificate(tag, "no", {"reason": "omega_plus(sd) != 0", "sd": str(g.sd)})
        elif not g.is_loop():
            return MembershipCertificate(tag, "no", {"reason": "semidirect scalar is not 1", "sd": str(g.sd)})
        return MembershipCertificate(tag, "yes", {})
    if tag is MembershipTag.G_TWIN:
        v, w_ = _twin_reduce(g)
        return MembershipCertificate(tag, v, w_)
    if tag is MembershipTag.I_INF_FACTORS:
        raise ValueError("I_inf_by_factors certificates come from retract_segment")
    raise ValueError(f"unknown tag {tag}")


# ---------------------------------------------------------------------------
# C-infinity fixator criteria for explicit factors

def _v_form_ok(kind: str, s: int, A: Sequence[RationalFunc], B: Sequence[RationalFunc]) -> bool:
    """Does u^s A(v)/B(v) (v = 1/u, B(0) = 1) give a factor fixing C-infinity?

    upper entry: u^e needs omega_minus >= 1 for e >= 0 and >= 0 for e < 0;
    lower entry: u^e needs omega_minus >= 1 for e >= 1 and >= 0 for e <= 0;
    diagonal entry: a unit of O-[[v]] (s = 0, unit constant term).
    """
    if not B or not B[0].is_one() or not all(b.val_minus() >= 0 for b in B):
        return False
    if kind == "diag":
        return s == 0 and bool(A) and A[0].val_minus() == 0 and all(a.val_minus() >= 0 for a in A)
    cut = 0 if kind == "upper" else 1
    for i, a in enumerate(A):
        if not a:
            continue
        need = 1 if s - i >= cut else 0
        if a.val_minus() < need:
            return False
    return True


@dataclass(frozen=True)
class FactorCheck:
    kind: str  # upper | lower | diag
    shift: int
    numerator_v: tuple
    denominator_v: tuple
    ok: bool

    def to_json(self) -> dict:
        return {
            "kind": self.kind,
            "shift": self.shift,
            "numerator_v": [str(a) for a in self.numerator_v],
            "denominator_v": [str(b) for b in self.denominator_v],
            "ok": self.ok,
        }


@dataclass
class StepCertificate:
    """Why a peeled left factor lies in I-infinity.

    Every factor fixes C-infinity by the threshold criterion, and the
    remaining word has entries in O[u,u^-1] with monomial reflections, so the
    peeled factor is also in the twin group.
    """

    term_exponent: int
    reflection: str
    factors: list
    rest_in_twin: bool
    certificate: MembershipCertificate

    def to_json(self) -> dict:
        return {
            "term_exponent": self.term_exponent,
            "reflection": self.reflection,
            "factors": [f.to_json() for f in self.factors],
            "rest_in_twin": self.rest_in_twin,
            "certificate": self.certificate.to_json(),
        }


# ---------------------------------------------------------------------------
# Laurent polynomials as {exponent: RationalFunc}

def _lp_add(a: dict, b: dict, sign: int = 1) -> dict:
    out = dict(a)
    for e, c in b.items():
        v = out[e] + c if sign > 0 and e in out else (out[e] - c if e in out else (c if sign > 0 else -c))
        if v:
            out[e] = v
        else:
            out.pop(e, None)
    return out


def _lp_mul(a: dict, b: dict) -> dict:
    out: dict = {}
    for e1, c1 in a.items():
        for e2, c2 in b.items():
            k = e1 + e2
            v = out[k] + c1 * c2 if k in out else c1 * c2
            if v:
                out[k] = v
            else:
                out.pop(k)
    return out


def _lp_key(a: dict) -> tuple:
    return tuple(sorted(a.items()))


def _v_coeffs(a: dict, top: int) -> list:
    """Coefficients of v^i (v = 1/u) of u^-top * a, lowest first."""
    F = next(iter(a.values())).field
    lo = min(a)
    return [a.get(top - i, RationalFunc.zero(F)) for i in range(top - lo + 1)]


def _split_quotient(c: dict, P: dict) -> tuple[dict, dict]:
    """c/P = poly + Nr/P with poly the strictly positive u-part; P = 1 + O(u^-1)."""
    F = next(iter(P.values())).field
    top = max(c)
    poly: dict = {}
    if top > 0:
        C = _v_coeffs(c, top)
        Pv = _v_coeffs(P, 0)
        q = []
        for i in range(top):
            acc = C[i] if i < len(C) else RationalFunc.zero(F)
            for j in range(1, min(i, len(Pv) - 1) + 1):
                if Pv[j] and q[i - j]:
                    acc = acc - Pv[j] * q[i - j]
            q.append(acc)
        poly = {top - i: x for i, x in enumerate(q) if x}
    Nr = _lp_add(c, _lp_mul(poly, P), -1)
    return poly, Nr


# ---------------------------------------------------------------------------
# retraction of a vertical segment

@dataclass(frozen=True)
class _Step:
    T: tuple  # (exponent, coefficient)
    poly: dict
    cert: StepCertificate


@dataclass
class RetractionResult:
    path: PiecewisePath
    superdecoration: Superdecoration | None
    certificates: list
    maps: list  # AffineMap per piece, aligned with path.pieces
    lo: Fraction
    hi: Fraction

    def t_of(self, s: Fraction) -> Fraction:
        """Segment parameter t for a path time s."""
        return self.lo + s * (self.hi - self.lo)

    @property
    def fold_points(self) -> list[Point]:
        return [self.path.point_at(s) for s in self.path.fold_times()]

    @property
    def fold_times_t(self) -> list[Fraction]:
        return [self.t_of(s) for s in self.path.fold_times()]

    def to_json(self) -> dict:
        d = self.path.to_json()
        d["segment"] = [str(self.lo), str(self.hi)]
        d["maps"] = [str(m) for m in self.maps]
        d["folding_points"] = [[str(p.x), str(p.y)] for p in self.fold_points]
        d["folding_times"] = [str(t) for t in self.fold_times_t]
        d["certificates"] = [c.to_json() for c in self.certificates]
        return d


def g_word(N: int, field: Field = QQ) -> list[RootGenerator]:
    """Factors w^-1 (w u)^(3k), k = 1..N."""
    return [RootGenerator(1, 3 * k, RationalFunc.monomial(1, 3 * k - 1, field)) for k in range(1, N + 1)]


def gprime_word(N: int, field: Field = QQ) -> list[RootGenerator]:
    """Factors w^-1 (w u)^(3*2^k), k = 0..N."""
    return [RootGenerator(1, 3 * 2**k, RationalFunc.monomial(1, 3 * 2**k - 1, field)) for k in range(N + 1)]


def _word_sum(word: Sequence[RootGenerator], field: Field) -> dict:
    S: dict = {}
    last = None
    for g in word:
        if g.eps != 1:
            raise StrategyInapplicable("only upper unitriangular factors are supported")
        if not g.y:
            continue
        if not g.y.is_monomial():
            raise StrategyInapplicable(f"coefficient {g.y} is not a monomial in w")
        if last is not None and g.k <= last:
            raise StrategyInapplicable("exponents of u must be strictly increasing")
        if g.y.field != field:
            raise StrategyInapplicable("mixed fields")
        last = g.k
        S = _lp_add(S, {g.k: g.y})
    return S


class _Retractor:
    def __init__(self, field: Field, max_depth: int = 256):
        self.field = field
        self.max_depth = max_depth
        self.cache: dict = {}
        self.certs: list = []

    def step(self, S: dict, k: int) -> _Step:
        key = (_lp_key(S), k)
        hit = self.cache.get(key)
        if hit is not None:
            return hit
        F = self.field
        coef = S[k]
        if not coef.is_monomial():
            raise StrategyInapplicable(f"term {coef}*u^{k} is not a unit of O times u^{k}")
        rest = {e: c for e, c in S.items() if e != k}
        binv = {-k: coef.inverse()}
        factors = []
        if not rest:
            fc = FactorCheck("lower", -k, (coef.inverse(),), (RationalFunc.one(F),), False)
            fc = FactorCheck(fc.kind, fc.shift, fc.numerator_v, fc.denominator_v,
                             _v_form_ok("lower", -k, fc.numerator_v, fc.denominator_v))
            factors.append(fc)
            poly: dict = {}
        else:
            if max(rest) >= k:
                raise StrategyInapplicable("the reflected term must carry the top exponent")
            P = _lp_add({0: RationalFunc.one(F)}, _lp_mul(rest, binv))
            if not P:
                raise StrategyInapplicable("singular pivot")
            Pv = tuple(_v_coeffs(P, 0))
            fl = FactorCheck("lower", -k, (coef.inverse(),), Pv, _v_form_ok("lower", -k, (coef.inverse(),), Pv))
            fd = FactorCheck("diag", 0, Pv, (RationalFunc.one(F),), _v_form_ok("diag", 0, Pv, (RationalFunc.one(F),)))
            poly, Nr = _split_quotient(rest, P)
            if Nr:
                top = max(Nr)
                A = tuple(_v_coeffs(Nr, top))
                fu = FactorCheck("upper", top, A, Pv, _v_form_ok("upper", top, A, Pv))
            else:
                fu = FactorCheck("upper", 0, (), Pv, True)
            factors += [fl, fd, fu]
        twin = all(c.is_laurent_poly() for c in poly.values()) and coef.is_monomial()
        ok = twin and all(f.ok for f in factors)
        mc = MembershipCertificate(
            MembershipTag.I_INF_FACTORS,
            "yes" if ok else "unknown",
            {"factors": [f.kind for f in factors], "all_fix_c_infinity": all(f.ok for f in factors), "rest_in_twin": twin},
        )
        wall = reflection_map(k, coef.val_plus())
        cert = StepCertificate(k, wall.label, factors, twin, mc)
        if not ok:
            raise StrategyInapplicable(f"could not certify the peeled factor for u^{k}: {mc.witness}")
        st = _Step((k, coef), poly, cert)
        self.cache[key] = st
        self.certs.append(cert)
        return st

    def run(self, S: dict, F: AffineMap, a: Fraction, b: Fraction, depth: int = 0) -> list:
        """Pieces (a', b', map) covering [a, b] for rho(U(S) . F(phi(t)))."""
        if depth > self.max_depth:
            raise StrategyInapplicable("rewriting did not terminate")
        if not S:
            return [(a, b, F)]

        def value(e: int, c: RationalFunc, t: Fraction) -> Fraction:
            p = F(Point(0, -t))
            return p.x + e * p.y + c.val_plus()

        cuts = {a, b}
        for e, c in S.items():
            v0, v1 = value(e, c, Fraction(0)), value(e, c, Fraction(1))
            slope = v1 - v0
            if slope:
                t = -v0 / slope
                if a < t < b:
                    cuts.add(t)
        cuts = sorted(cuts)
        out = []
        for lo, hi in zip(cuts, cuts[1:]):
            mid = (lo + hi) / 2
            nonfix = {e: c for e, c in S.items() if value(e, c, mid) < 0}
            if not nonfix:
                out.append((lo, hi, F))
                continue
            k = max(nonfix)
            st = self.step(nonfix, k)
            R = reflection_map(k, st.T[1].val_plus())
            out += self.run(st.poly, R * F, lo, hi, depth + 1)
        return out


def _merge(pieces: list) -> list:
    out = []
    for a, b, F in pieces:
        if out and out[-1][2] == F:
            out[-1] = (out[-1][0], b, out[-1][2])
        else:
            out.append((a, b, F))
    return out


def retract_segment(
    word: Sequence[RootGenerator],
    lo=0,
    hi=1,
    field: Field | None = None,
    decorate: bool = True,
    k_bound: int | None = None,
) -> RetractionResult:
    """Retract word . phi([lo, hi]) onto the standard apartment, phi(t) = (0, -t).

    Only products of upper unitriangular generators with monomial
    coefficients and increasing u-exponents are supported; every peeled
    factor is certified and anything else raises StrategyInapplicable.
    """
    lo, hi = Fraction(lo), Fraction(hi)
    if not (0 <= lo < hi <= 1):
        raise ValueError("need 0 <= lo < hi <= 1")
    if field is None:
        field = word[0].y.field if word else QQ
    S = _word_sum(word, field)
    R = _Retractor(field)
    raw = _merge(R.run(S, AffineMap(), lo, hi))
    L = hi - lo
    shape = (Fraction(0), -L)
    pieces = []
    maps = []
    for a, b, F in raw:
        pieces.append(Piece((a - lo) / L, (b - lo) / L, F.w, str(F)))
        maps.append(F)
    origin = maps[0](Point(0, -lo))
    path = PiecewisePath(shape, -1, (origin.x, origin.y), tuple(pieces))
    sd = None
    if decorate:
        sd = superdecorate(_retraction_decoration(path, maps, lo, hi, k_bound))
    return RetractionResult(path, sd, R.certs, maps, lo, hi)


def _retraction_decoration(path: PiecewisePath, maps: list, lo: Fraction, hi: Fraction, k_bound: int | None) -> Decoration:
    """Chambers of the retracted segment: images of the segment's own chambers."""
    L = hi - lo
    F0 = maps[0]
    start = path.point_at(0)
    cinf0 = c_infinity_chamber(start)
    # pull C-infinity at the image of phi(lo) back through the first map
    inv_dir = F0.w.inverse().act(cinf0.sample_direction())
    ref = LocalChamber.at(Point(0, -lo), cinf0.sign, chamber_index(inv_dir))
    down, up = (Fraction(0), Fraction(-1)), (Fraction(0), Fraction(1))
    times = {Fraction(0), Fraction(1)}
    times.update(e.t for e in crossing_events(path, crossing_bound(path) if k_bound is None else k_bound))
    times.update(path.fold_times())
    bounds = path.breakpoints

    def map_at(s: Fraction, right: bool) -> AffineMap:
        for i, pc in enumerate(path.pieces):
            if (pc.t0 <= s < pc.t1) if right else (pc.t0 < s <= pc.t1):
                return maps[i]
        raise ValueError(s)

    def push(Fm: AffineMap, c: LocalChamber, base: Point) -> LocalChamber:
        return LocalChamber.at(base, c.sign, chamber_index(Fm.w.act(c.sample_direction())))

    entries = []
    for s in sorted(times):
        t = lo + s * L
        q = Point(0, -t)
        p = path.point_at(s)
        cp = cm = None
        if s < 1:
            cp = push(map_at(s, True), project_chamber(q, down, ref), p)
        if s > 0:
            cm = push(map_at(s, False), project_chamber(q, up, ref), p)
        entries.append((s, cp, cm))
    return decoration_from_chambers(path, entries)


# ---------------------------------------------------------------------------
# named elements

def named_word(spec: str, field: Field = QQ) -> list[RootGenerator]:
    """'gN:<N>', 'gprimeN:<N>' or '' (empty word)."""
    spec = spec.strip()
    if spec in ("", "empty", "e"):
        return []
    m = re.fullmatch(r"(gN|gprimeN):(\d+)", spec)
    if not m:
        raise ValueError(f"unknown word {spec!r}")
    n = int(m.group(2))
    return g_word(n, field) if m.group(1) == "gN" else gprime_word(n, field)


def _product(gens: Iterable[GroupElement], field: Field) -> GroupElement:
    out = GroupElement.identity(field)
    for g in gens:
        out = out * g
    return out


def named_element(spec: str, field: Field = QQ) -> GroupElement:
    """gN:<N>, gprimeN:<N>, g-counterexample, g1inf, g1N:<N>."""
    F = field
    w, u = RationalU.w(F), RationalU.u(F)
    if spec == "g-counterexample":
        return lower(w / u) * upper(1 / (w * u))
    if spec == "g1inf":
        return lower(-w) * upper(w**2 * u**3)
    m = re.fullmatch(r"g1N:(\d+)", spec)
    if m:
        N = int(m.group(1))
        wu3 = (w * u) ** 3
        top = sum((wu3**k for k in range(N + 1)), RationalU.zero(F))
        return GroupElement.from_rows([[top, wu3 ** (N + 1) / w], [-w, 1 - wu3]])
    return _product((g.element() for g in named_word(spec, F)), F)


# ---------------------------------------------------------------------------
# counter-example checks

@dataclass
class ReportLine:
    name: str
    verdict: str  # PASS | FAIL | UNKNOWN
    detail: str = ""
    data: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        return {"name": self.name, "verdict": self.verdict, "detail": self.detail, "data": self.data}


@dataclass
class CounterexampleReport:
    lines: list

    @property
    def ok(self) -> bool:
        return all(l.verdict == "PASS" for l in self.lines)

    @property
    def has_unknown(self) -> bool:
        return any(l.verdict == "UNKNOWN" for l in self.lines)

    def text(self) -> list[str]:
        return [f"{l.verdict} {l.name}" + (f": {l.detail}" if l.detail else "") for l in self.lines]

    def to_json(self) -> dict:
        return {"schema": "masure-lab/1", "ok": self.ok, "checks": [l.to_json() for l in self.lines]}


def _verdict(ok: bool, unknown: bool = False) -> str:
    return "UNKNOWN" if unknown else ("PASS" if ok else "FAIL")


def _u_power_series(f: RationalU, n: int) -> dict:
    """Coefficients of u^j, j <= n, of f expanded in nonnegative powers of u."""
    if f.e < 0:
        raise ValueError("pole at u = 0")
    F = f.field
    D0i = f.D[0].inverse()
    c = []
    for i in range(n + 1 - f.e):
        acc = f.N[i] if i < len(f.N) else RationalFunc.zero(F)
        for j in range(1, min(i, len(f.D) - 1) + 1):
            if f.D[j] and c[i - j]:
                acc = acc - f.D[j] * c[i - j]
        c.append(acc * D0i)
    return {f.e + i: x for i, x in enumerate(c) if x}


def counterexample_report(field: Field = QQ, depth: int = 32, ns: Sequence[int] = (1, 2, 3, 4)) -> CounterexampleReport:
    F = field
    w, u = RationalU.w(F), RationalU.u(F)
    one = RationalU.const(1, F)
    lines = []

    # (a) g = i_bar . k_bar
    g = named_element("g-counterexample", F)
    den = 1 + u**-2
    i_bar = GroupElement.from_rows([[1 / den, 1 / (w * u)], [0, den]])
    k_bar = lower(w / u / den)
    prod_ok = i_bar * k_bar == g
    ci = membership(i_bar, MembershipTag.I_INF_BAR_LOOP, depth)
    ck = membership(k_bar, MembershipTag.K_BAR_LOOP, depth)
    unk = ci.verdict == "unknown" or ck.verdict == "unknown"
    lines.append(ReportLine(
        "(a) g = i_bar . k_bar with i_bar in I_inf_bar_loop and k_bar in K_bar_loop",
        _verdict(prod_ok and ci.yes and ck.yes, unk),
        f"product {'exact' if prod_ok else 'MISMATCH'}; i_bar: {ci.verdict}; k_bar: {ck.verdict}",
        {"g": g.format(), "i_bar": i_bar.format(), "k_bar": k_bar.format(),
         "i_bar_cert": ci.to_json(), "k_bar_cert": ck.to_json()},
    ))

    # (b) g not in SL2(O+[u,u^-1])
    cb = membership(g, MembershipTag.SL2_OPLUS_LAURENT)
    lines.append(ReportLine(
        "(b) g is not in SL2(O+[u,u^-1]), so g does not fix 0+",
        _verdict(cb.verdict == "no"),
        f"witness {cb.witness}",
        {"cert": cb.to_json()},
    ))

    # (c) delta level
    dl = delta_level(g, Sheet.PLUS)
    lines.append(ReportLine("(c) delta_level(g, plus) = 0", _verdict(dl == 0), f"delta shift {dl}", {"delta": dl}))

    # (d) g1_inf chain and its factorizations
    checks = []
    g1inf = named_element("g1inf", F)
    lw = lambda x: lower(x, F)
    up = lambda x: upper(x, F)
    ad = lambda x: antidiag(x, F)
    a3 = w**2 * u**3
    a6 = w**5 * u**6
    form1 = _product([lw(1 / a3), lw(-w), ad(a3), lw(1 / a3)], F)
    form2 = _product([lw(1 / a3), up(-1 / w), ad(a3), ad(a6), lw(1 / a6), lw(1 / a3)], F)
    checks.append(("g1_inf = L(w^-2 u^-3) L(-w) S(w^2 u^3) L(w^-2 u^-3)", form1 == g1inf))
    checks.append(("g1_inf = L(w^-2 u^-3) U(-w^-1) S(w^2 u^3) S(w^5 u^6) L(w^-5 u^-6) L(w^-2 u^-3)", form2 == g1inf))
    tw = membership(g1inf, MembershipTag.G_TWIN)
    checks.append(("g1_inf in G_twin", tw.yes))
    wu3 = (w * u) ** 3
    for N in ns:
        gN = named_element(f"gN:{N}", F)
        g1N = named_element(f"g1N:{N}", F)
        checks.append((f"g_{N} . g1_{N} = g1_inf", gN * g1N == g1inf))
        checks.append((f"g1_{N} in G_loop_pol", membership(g1N, MembershipTag.G_LOOP_POL).yes))
        c = 1 - wu3
        a = wu3 ** (N + 1) / w / c
        b = -w / c + w
        fact = _product([up(a), diag(1 / c, F), lw(b), lw(-w)], F)
        checks.append((f"g1_{N} = U(a) diag(1/c, c) L(b) L(-w)", fact == g1N))
        t = Fraction(3 * N + 2, 3 * N + 3)
        ok_a = all(co.val_plus() >= e * t for e, co in _u_power_series(a, depth).items())
        ok_b = all(co.val_plus() >= e for e, co in _u_power_series(b, depth).items())
        ok_c = all(co.val_plus() >= e for e, co in _u_power_series(1 / c, depth).items()) and all(
            co.val_plus() >= e for e, co in _u_power_series(c, depth).items())
        ok_l = w.N[0].val_plus() >= 0
        checks.append((f"N={N}: omega_plus(a_j) >= j*t_(3N+3) for j <= {depth}", ok_a))
        checks.append((f"N={N}: omega_plus(b_j) >= j and torus coefficients for j <= {depth}", ok_b and ok_c and ok_l))
    ok = all(v for _, v in checks)
    lines.append(ReportLine(
        "(d) g1_inf factorization chain and valuation inequalities of the factors",
        _verdict(ok, tw.verdict == "unknown"),
        "; ".join(f"{n}: {'ok' if v else 'FAIL'}" for n, v in checks if not v) or f"{len(checks)} checks exact",
        {"checks": [{"name": n, "ok": v} for n, v in checks], "depth": depth},
    ))
    return CounterexampleReport(lines)
