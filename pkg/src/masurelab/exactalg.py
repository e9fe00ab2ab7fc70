"""Exact arithmetic for the base field, the function field k(w) and Laurent objects in u.

Three layers live here:

* :class:`Field` picks the ground field k, either the rationals or F_p.
* :class:`RationalFunc` is an element of k(w) kept in lowest terms, with the
  two valuations ``val_plus`` (order at w = 0) and ``val_minus`` (order at w = oo).
* :class:`RationalU` is a rational function of u with coefficients in k(w);
  :class:`USeries` holds truncated expansions in powers of u^-1.

Nothing here touches floating point.

>>> F = Field()
>>> f = parse_rf("(1+w^2)/(w*(1-w))", F)
>>> val_plus(f), val_minus(f)
(-1, 0)
>>> parse_rf(str(f), F) == f
True
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence, Union

__all__ = [
    "INF",
    "Field",
    "QQ",
    "Coeff",
    "RationalFunc",
    "RationalU",
    "USeries",
    "NotExpandable",
    "ParseError",
    "FieldMismatch",
    "ExponentOverflow",
    "val_plus",
    "val_minus",
    "expand_series",
    "parse_rf",
    "parse_ru",
]

INF = math.inf
_EXP_MAX = 2**63 - 1

Coeff = Union[Fraction, int]


class NotExpandable(ValueError):
    """The u^-1 expansion needs a larger monomial shift than the caller allowed."""

    def __init__(self, required_shift: int, max_shift: int):
        super().__init__(f"expansion needs shift u^{required_shift}, allowed at most u^{max_shift}")
        self.required_shift = required_shift
        self.max_shift = max_shift


class ParseError(ValueError):
    pass


class FieldMismatch(ValueError):
    pass


class ExponentOverflow(OverflowError):
    pass


def _check_exp(e: int) -> int:
    if not -_EXP_MAX - 1 <= e <= _EXP_MAX:
        raise ExponentOverflow(f"exponent {e} does not fit in 64 bits")
    return e


def _is_prime(n: int) -> bool:
    if n < 2:
        return False
    small = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)
    for q in small:
        if n % q == 0:
            return n == q
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    # deterministic for n < 3.3e24
    for a in small:
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


@dataclass(frozen=True)
class Field:
    """The ground field k: ``p == 0`` means Q, otherwise F_p with p prime, p <= 2^61."""

    p: int = 0

    def __post_init__(self):
        if self.p != 0:
            if self.p > 2**61 or not _is_prime(self.p):
                raise ValueError(f"fp:{self.p} is not a supported prime field")

    @classmethod
    def parse(cls, text: str) -> "Field":
        """``"rational"`` or ``"fp:<p>"``.

        >>> Field.parse("fp:5")
        Field(p=5)
        """
        text = text.strip()
        if text in ("rational", "Q", "QQ"):
            return cls(0)
        m = re.fullmatch(r"fp:(\d+)", text)
        if not m:
            raise ValueError(f"unknown field {text!r}; expected 'rational' or 'fp:<p>'")
        return cls(int(m.group(1)))

    @property
    def is_rational(self) -> bool:
        return self.p == 0

    def __str__(self) -> str:
        return "rational" if self.p == 0 else f"fp:{self.p}"

    def __call__(self, x) -> Coeff:
        if self.p:
            if isinstance(x, Fraction):
                return x.numerator * pow(x.denominator, -1, self.p) % self.p
            return int(x) % self.p
        return Fraction(x)

    @property
    def zero(self) -> Coeff:
        return Fraction(0) if self.p == 0 else 0

    @property
    def one(self) -> Coeff:
        return Fraction(1) if self.p == 0 else 1

    def inv(self, a: Coeff) -> Coeff:
        if not a:
            raise ZeroDivisionError("inverse of zero in the base field")
        return pow(a, -1, self.p) if self.p else 1 / a

    def fmt(self, a: Coeff) -> str:
        return str(a)


QQ = Field(0)


# ---------------------------------------------------------------------------
# dense polynomials in w over k: tuples of coefficients, lowest degree first

def _trim(a: list) -> tuple:
    n = len(a)
    while n and not a[n - 1]:
        n -= 1
    return tuple(a[:n])


def _padd(a: tuple, b: tuple, p: int) -> tuple:
    if len(a) < len(b):
        a, b = b, a
    out = list(a)
    for i, c in enumerate(b):
        out[i] += c
    if p:
        out = [c % p for c in out]
    return _trim(out)


def _pneg(a: tuple, p: int) -> tuple:
    return tuple((-c) % p for c in a) if p else tuple(-c for c in a)


def _psub(a: tuple, b: tuple, p: int) -> tuple:
    return _padd(a, _pneg(b, p), p)


def _pscale(a: tuple, c: Coeff, p: int) -> tuple:
    if not c:
        return ()
    return tuple(x * c % p for x in a) if p else tuple(x * c for x in a)


def _pmul(a: tuple, b: tuple, p: int) -> tuple:
    if not a or not b:
        return ()
    if len(a) == 1:
        return _pscale(b, a[0], p)
    if len(b) == 1:
        return _pscale(a, b[0], p)
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if not x:
            continue
        for j, y in enumerate(b):
            out[i + j] += x * y
    if p:
        out = [c % p for c in out]
    else:
        out = [Fraction(c) for c in out]
    return _trim(out)


def _inv(c: Coeff, p: int) -> Coeff:
    return pow(c, -1, p) if p else 1 / c


def _pdivmod(a: tuple, b: tuple, p: int) -> tuple[tuple, tuple]:
    if not b:
        raise ZeroDivisionError("polynomial division by zero")
    if len(a) < len(b):
        return (), a
    r = list(a)
    lc = _inv(b[-1], p)
    db = len(b) - 1
    q = [0] * (len(a) - db)
    for i in range(len(a) - 1, db - 1, -1):
        c = r[i]
        if p:
            c %= p
        if not c:
            continue
        f = c * lc
        if p:
            f %= p
        q[i - db] = f
        for j, y in enumerate(b):
            r[i - db + j] -= f * y
    if p:
        r = [c % p for c in r]
        q = [c % p for c in q]
    return _trim(q), _trim(r[:db])


def _pmonic(a: tuple, p: int) -> tuple:
    if not a:
        return a
    return _pscale(a, _inv(a[-1], p), p)


def _pgcd(a: tuple, b: tuple, p: int) -> tuple:
    while b:
        a, b = b, _pmonic(_pdivmod(a, b, p)[1], p)
    return _pmonic(a, p)


def _ord0(a: tuple) -> int:
    for i, c in enumerate(a):
        if c:
            return i
    return 0


def _is_monomial(a: tuple) -> bool:
    return sum(1 for c in a if c) == 1


# ---------------------------------------------------------------------------

class RationalFunc:
    """An element of k(w) in lowest terms with monic denominator.

    >>> F = Field()
    >>> w = RationalFunc.w(F)
    >>> (1 + w) / w
    (1+w)/w
    >>> val_minus((1 + w) / w)
    0
    """

    __slots__ = ("num", "den", "field", "_hash")

    def __init__(self, num: Sequence[Coeff], den: Sequence[Coeff] = None, field: Field = QQ, _reduced=False):
        self.field = field
        p = field.p
        num = _trim([field(c) for c in num]) if not _reduced else tuple(num)
        den = (field.one,) if den is None else (_trim([field(c) for c in den]) if not _reduced else tuple(den))
        if not den:
            raise ZeroDivisionError("zero denominator")
        if not _reduced:
            num, den = _reduce(num, den, p)
        self.num = num
        self.den = den
        self._hash = None

    # constructors -----------------------------------------------------------
    @classmethod
    def _raw(cls, num: tuple, den: tuple, field: Field) -> "RationalFunc":
        return cls(num, den, field, _reduced=True)

    @classmethod
    def _make(cls, num: tuple, den: tuple, field: Field) -> "RationalFunc":
        n, d = _reduce(num, den, field.p)
        return cls._raw(n, d, field)

    @classmethod
    def const(cls, c, field: Field = QQ) -> "RationalFunc":
        c = field(c)
        return cls._raw((c,) if c else (), (field.one,), field)

    @classmethod
    def zero(cls, field: Field = QQ) -> "RationalFunc":
        return cls._raw((), (field.one,), field)

    @classmethod
    def one(cls, field: Field = QQ) -> "RationalFunc":
        return cls.const(1, field)

    @classmethod
    def w(cls, field: Field = QQ) -> "RationalFunc":
        return cls.monomial(1, 1, field)

    @classmethod
    def monomial(cls, c, e: int, field: Field = QQ) -> "RationalFunc":
        """c * w^e for any integer e."""
        _check_exp(e)
        c = field(c)
        if not c:
            return cls.zero(field)
        z = field.zero
        if e >= 0:
            return cls._raw((z,) * e + (c,), (field.one,), field)
        return cls._raw((c,), (z,) * (-e) + (field.one,), field)

    # predicates ---------------------------------------------------------------
    def __bool__(self) -> bool:
        return bool(self.num)

    def is_zero(self) -> bool:
        return not self.num

    def is_one(self) -> bool:
        return self.den == (self.field.one,) and self.num == (self.field.one,)

    def is_const(self) -> bool:
        return len(self.num) <= 1 and len(self.den) == 1

    def is_monomial(self) -> bool:
        """True for c*w^e with c != 0."""
        return bool(self.num) and _is_monomial(self.num) and _is_monomial(self.den)

    def is_laurent_poly(self) -> bool:
        """Membership in k[w, w^-1]."""
        return _is_monomial(self.den)

    def const_value(self) -> Coeff:
        if not self.is_const():
            raise ValueError(f"{self} is not a constant")
        return self.num[0] if self.num else self.field.zero

    def monomial_parts(self) -> tuple[Coeff, int]:
        """(c, e) with self == c*w^e."""
        if not self.is_monomial():
            raise ValueError(f"{self} is not a monomial")
        return self.num[-1], (len(self.num) - 1) - (len(self.den) - 1)

    # arithmetic ---------------------------------------------------------------
    def _coerce(self, other) -> "RationalFunc":
        if isinstance(other, RationalFunc):
            if other.field != self.field:
                raise FieldMismatch(f"{self.field} vs {other.field}")
            return other
        if isinstance(other, (int, Fraction)):
            return RationalFunc.const(other, self.field)
        return NotImplemented

    def __add__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        p = self.field.p
        if not o.num:
            return self
        if not self.num:
            return o
        if self.den == o.den:
            return RationalFunc._make(_padd(self.num, o.num, p), self.den, self.field)
        num = _padd(_pmul(self.num, o.den, p), _pmul(o.num, self.den, p), p)
        return RationalFunc._make(num, _pmul(self.den, o.den, p), self.field)

    __radd__ = __add__

    def __neg__(self):
        return RationalFunc._raw(_pneg(self.num, self.field.p), self.den, self.field)

    def __sub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return self + (-o)

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return o + (-self)

    def __mul__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        p = self.field.p
        if not self.num or not o.num:
            return RationalFunc.zero(self.field)
        if o.den == (self.field.one,) and len(o.num) == 1 and o.num[0] == self.field.one:
            return self
        return RationalFunc._make(_pmul(self.num, o.num, p), _pmul(self.den, o.den, p), self.field)

    __rmul__ = __mul__

    def inverse(self) -> "RationalFunc":
        if not self.num:
            raise ZeroDivisionError("inverse of zero in k(w)")
        p = self.field.p
        lc = _inv(self.num[-1], p)
        return RationalFunc._raw(_pscale(self.den, lc, p), _pscale(self.num, lc, p), self.field)

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return self * o.inverse()

    def __rtruediv__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return o * self.inverse()

    def __pow__(self, n: int):
        _check_exp(n)
        if n < 0:
            return self.inverse() ** (-n)
        if self.is_monomial():
            c, e = self.monomial_parts()
            cc = pow(c, n, self.field.p) if self.field.p else c**n
            return RationalFunc.monomial(cc, _check_exp(e * n), self.field)
        out = RationalFunc.one(self.field)
        base = self
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            other = RationalFunc.const(other, self.field)
        if not isinstance(other, RationalFunc):
            return NotImplemented
        return self.field == other.field and self.num == other.num and self.den == other.den

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.num, self.den, self.field.p))
        return self._hash

    # valuations -----------------------------------------------------------------
    def val_plus(self):
        if not self.num:
            return INF
        return _ord0(self.num) - _ord0(self.den)

    def val_minus(self):
        if not self.num:
            return INF
        return (len(self.den) - 1) - (len(self.num) - 1)

    # text ------------------------------------------------------------------------
    def __str__(self) -> str:
        return format_rf(self)

    def __repr__(self) -> str:
        return format_rf(self)


def _reduce(num: tuple, den: tuple, p: int) -> tuple[tuple, tuple]:
    if not num:
        return (), ((Fraction(1),) if p == 0 else (1,))
    c = min(_ord0(num), _ord0(den))
    if c:
        num, den = num[c:], den[c:]
    if len(den) > 1 and not (_is_monomial(num) or _is_monomial(den)):
        g = _pgcd(num, den, p)
        if len(g) > 1:
            num = _pdivmod(num, g, p)[0]
            den = _pdivmod(den, g, p)[0]
    lc = den[-1]
    one = 1 if p else Fraction(1)
    if lc != one:
        inv = _inv(lc, p)
        num, den = _pscale(num, inv, p), _pscale(den, inv, p)
    return num, den


def val_plus(f: RationalFunc):
    """Order of vanishing at w = 0 (infinity for 0).

    >>> F = Field()
    >>> val_plus(RationalFunc.monomial(1, 2, F)), val_plus(RationalFunc.zero(F))
    (2, inf)
    """
    return f.val_plus()


def val_minus(f: RationalFunc):
    """Order at w = oo: deg(den) - deg(num).

    >>> val_minus(RationalFunc.w())
    -1
    """
    return f.val_minus()


# ---------------------------------------------------------------------------
# polynomials in u over k(w): tuples of RationalFunc, lowest degree first

def _utrim(a: list) -> tuple:
    n = len(a)
    while n and not a[n - 1]:
        n -= 1
    return tuple(a[:n])


def _uadd(a: tuple, b: tuple) -> tuple:
    if len(a) < len(b):
        a, b = b, a
    out = list(a)
    for i, c in enumerate(b):
        out[i] = out[i] + c
    return _utrim(out)


def _uneg(a: tuple) -> tuple:
    return tuple(-c for c in a)


def _umul(a: tuple, b: tuple, field: Field) -> tuple:
    if not a or not b:
        return ()
    if len(a) == 1 and a[0].is_one():
        return b
    if len(b) == 1 and b[0].is_one():
        return a
    out = [None] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if not x:
            continue
        for j, y in enumerate(b):
            if not y:
                continue
            t = x * y
            out[i + j] = t if out[i + j] is None else out[i + j] + t
    zero = RationalFunc.zero(field)
    return _utrim([zero if c is None else c for c in out])


def _uscale(a: tuple, c: RationalFunc) -> tuple:
    if not c:
        return ()
    if c.is_one():
        return a
    return _utrim([x * c for x in a])


def _udivmod(a: tuple, b: tuple, field: Field) -> tuple[tuple, tuple]:
    if not b:
        raise ZeroDivisionError("division by the zero polynomial in u")
    if len(a) < len(b):
        return (), a
    r = list(a)
    db = len(b) - 1
    lc_inv = b[-1].inverse()
    zero = RationalFunc.zero(field)
    q = [zero] * (len(a) - db)
    for i in range(len(a) - 1, db - 1, -1):
        c = r[i]
        if not c:
            continue
        f = c * lc_inv
        q[i - db] = f
        for j, y in enumerate(b):
            if y:
                r[i - db + j] = r[i - db + j] - f * y
    return _utrim(q), _utrim(r[:db])


def _umonic(a: tuple) -> tuple:
    if not a or a[-1].is_one():
        return a
    return _uscale(a, a[-1].inverse())


def _eval_w(f: RationalFunc, w0, p: int):
    """f(w0) in the base field, or None at a pole."""
    def ev(poly):
        acc = 0 if p else Fraction(0)
        for c in reversed(poly):
            acc = acc * w0 + c
            if p:
                acc %= p
        return acc

    d = ev(f.den)
    if not d:
        return None
    n = ev(f.num)
    return (n * pow(d, -1, p)) % p if p else n / d


def _base_gcd_degree(a: list, b: list, p: int) -> int:
    a, b = _trim(a), _trim(b)
    while b:
        a, b = b, _pdivmod(a, b, p)[1]
    return len(a) - 1


def _coprime_by_evaluation(a: tuple, b: tuple, field: Field) -> bool:
    """Sufficient test for gcd(a, b) = 1 over k(w): specialise w to a constant.

    If both leading coefficients survive the specialisation, the degree of
    the gcd can only grow, so a constant image gcd proves coprimality.
    """
    p = field.p
    points = range(1, min(p, 8)) if p else (Fraction(2), Fraction(-3), Fraction(5, 7))
    for w0 in points:
        ia = [_eval_w(c, w0, p) for c in a]
        ib = [_eval_w(c, w0, p) for c in b]
        if None in ia or None in ib or not ia[-1] or not ib[-1]:
            continue
        if _base_gcd_degree(ia, ib, p) == 0:
            return True
    return False


def _to_kw(a: tuple, p: int) -> list:
    """Clear w-denominators: coefficients become polynomials in w."""
    L = (1,) if p else (Fraction(1),)
    for c in a:
        if len(c.den) > 1:
            L = _pmul(L, _pdivmod(c.den, _pgcd(L, c.den, p), p)[0], p)
    return [_pdivmod(_pmul(c.num, L, p), c.den, p)[0] if c else () for c in a]


def _primitive(a: list, p: int) -> list:
    g = ()
    for c in a:
        if c:
            g = _pgcd(g, c, p) if g else _pmonic(c, p)
            if len(g) == 1:
                return a
    return [_pdivmod(c, g, p)[0] if c else () for c in a]


def _prem(a: list, b: list, p: int) -> list:
    """Pseudo-remainder of a by b in k[w][u]."""
    r = list(a)
    lb = b[-1]
    db = len(b) - 1
    while len(r) - 1 >= db and r:
        lr = r[-1]
        shift = len(r) - 1 - db
        r = [_pmul(c, lb, p) for c in r]
        for j, y in enumerate(b):
            if y:
                r[shift + j] = _psub(r[shift + j], _pmul(lr, y, p), p)
        while r and not r[-1]:
            r.pop()
    return r


def _ugcd(a: tuple, b: tuple, field: Field) -> tuple:
    if a and b and _coprime_by_evaluation(a, b, field):
        return (RationalFunc.one(field),)
    if not b:
        return _umonic(a)
    if not a:
        return _umonic(b)
    # primitive remainder sequence in k[w][u] keeps coefficient growth in check
    p = field.p
    x, y = _primitive(_to_kw(a, p), p), _primitive(_to_kw(b, p), p)
    if len(x) < len(y):
        x, y = y, x
    while y:
        x, y = y, _primitive(_prem(x, y, p), p) if len(y) > 1 else []
        if not y:
            break
    g = tuple(RationalFunc._make(c, (1,) if p else (Fraction(1),), field) if c else RationalFunc.zero(field) for c in x)
    return _umonic(_utrim(list(g)))


def _uord0(a: tuple) -> int:
    for i, c in enumerate(a):
        if c:
            return i
    return 0


def _u_is_monomial(a: tuple) -> bool:
    return sum(1 for c in a if c) == 1


class RationalU:
    """A rational function of u over k(w), stored as u^e * N(u) / D(u).

    N and D have nonzero constant terms, D is monic and gcd(N, D) = 1, so the
    triple (e, N, D) is canonical.  Laurent polynomials are those with D = 1.

    >>> F = Field()
    >>> u = RationalU.u(F)
    >>> f = 1 / (1 + u**-2)
    >>> f
    (u^2)/(1+u^2)
    >>> expand_series(f, 4).terms()
    {0: 1, -2: -1, -4: 1}
    """

    __slots__ = ("e", "N", "D", "field", "_hash")

    def __init__(self, e: int, N: tuple, D: tuple, field: Field):
        # callers pass canonical data; use RationalU.make otherwise
        self.e = e
        self.N = N
        self.D = D
        self.field = field
        self._hash = None

    @classmethod
    def make(cls, e: int, N: Sequence[RationalFunc], D: Sequence[RationalFunc], field: Field) -> "RationalU":
        N = _utrim(list(N))
        D = _utrim(list(D))
        if not D:
            raise ZeroDivisionError("zero denominator in u")
        if not N:
            return cls.zero(field)
        vn, vd = _uord0(N), _uord0(D)
        if vn:
            N = N[vn:]
        if vd:
            D = D[vd:]
        e = _check_exp(e + vn - vd)
        if len(D) == 1:
            c = D[0]
            if not c.is_one():
                N = _uscale(N, c.inverse())
            return cls(e, N, (RationalFunc.one(field),), field)
        if not _u_is_monomial(N):
            g = _ugcd(N, D, field)
            if len(g) > 1:
                N = _udivmod(N, g, field)[0]
                D = _udivmod(D, g, field)[0]
        lc = D[-1]
        if not lc.is_one():
            inv = lc.inverse()
            N, D = _uscale(N, inv), _uscale(D, inv)
        return cls(e, N, D, field)

    @classmethod
    def zero(cls, field: Field = QQ) -> "RationalU":
        return cls(0, (), (RationalFunc.one(field),), field)

    @classmethod
    def const(cls, c, field: Field = QQ) -> "RationalU":
        if not isinstance(c, RationalFunc):
            c = RationalFunc.const(c, field)
        if not c:
            return cls.zero(field)
        return cls(0, (c,), (RationalFunc.one(field),), field)

    @classmethod
    def monomial(cls, c, k: int, field: Field = QQ) -> "RationalU":
        """c * u^k with c in k(w)."""
        if not isinstance(c, RationalFunc):
            c = RationalFunc.const(c, field)
        if not c:
            return cls.zero(field)
        return cls(_check_exp(k), (c,), (RationalFunc.one(field),), field)

    @classmethod
    def u(cls, field: Field = QQ) -> "RationalU":
        return cls.monomial(1, 1, field)

    @classmethod
    def w(cls, field: Field = QQ) -> "RationalU":
        return cls.const(RationalFunc.w(field), field)

    @classmethod
    def from_terms(cls, terms: dict, field: Field = QQ) -> "RationalU":
        """Laurent polynomial from {exponent: coefficient}."""
        terms = {k: (v if isinstance(v, RationalFunc) else RationalFunc.const(v, field)) for k, v in terms.items()}
        terms = {k: v for k, v in terms.items() if v}
        if not terms:
            return cls.zero(field)
        lo, hi = min(terms), max(terms)
        zero = RationalFunc.zero(field)
        N = tuple(terms.get(lo + i, zero) for i in range(hi - lo + 1))
        return cls(_check_exp(lo), N, (RationalFunc.one(field),), field)

    # predicates ----------------------------------------------------------------
    def __bool__(self) -> bool:
        return bool(self.N)

    def is_zero(self) -> bool:
        return not self.N

    def is_laurent(self) -> bool:
        return len(self.D) == 1

    def is_monomial(self) -> bool:
        return self.is_laurent() and len(self.N) == 1

    def is_one(self) -> bool:
        return self.e == 0 and self.is_monomial() and self.N[0].is_one()

    def terms(self) -> dict:
        """{exponent: coefficient} of a Laurent polynomial."""
        if not self.is_laurent():
            raise ValueError("not a Laurent polynomial in u")
        return {self.e + i: c for i, c in enumerate(self.N) if c}

    def u_inv_form(self) -> tuple[int, tuple, tuple]:
        """(s, A, B) with self = u^s * A(v)/B(v), v = u^-1, B(0) = 1.

        Both A and B are coefficient tuples in v, lowest degree first.
        """
        if not self.N:
            return 0, (), (RationalFunc.one(self.field),)
        s = self.e + (len(self.N) - 1) - (len(self.D) - 1)
        return s, tuple(reversed(self.N)), tuple(reversed(self.D))

    # arithmetic -------------------------------------------------------------------
    def _coerce(self, other) -> "RationalU":
        if isinstance(other, RationalU):
            if other.field != self.field:
                raise FieldMismatch(f"{self.field} vs {other.field}")
            return other
        if isinstance(other, RationalFunc):
            if other.field != self.field:
                raise FieldMismatch(f"{self.field} vs {other.field}")
            return RationalU.const(other, self.field)
        if isinstance(other, (int, Fraction)):
            return RationalU.const(other, self.field)
        return NotImplemented

    def __add__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        if not o.N:
            return self
        if not self.N:
            return o
        e = min(self.e, o.e)
        zero = RationalFunc.zero(self.field)
        a = (zero,) * (self.e - e) + self.N
        b = (zero,) * (o.e - e) + o.N
        if self.D == o.D:
            return RationalU.make(e, _uadd(a, b), self.D, self.field)
        num = _uadd(_umul(a, o.D, self.field), _umul(b, self.D, self.field))
        return RationalU.make(e, num, _umul(self.D, o.D, self.field), self.field)

    __radd__ = __add__

    def __neg__(self):
        return RationalU(self.e, _uneg(self.N), self.D, self.field)

    def __sub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return self + (-o)

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return o + (-self)

    def __mul__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        F = self.field
        if not self.N or not o.N:
            return RationalU.zero(F)
        if self.is_laurent() and o.is_laurent():
            return RationalU.make(self.e + o.e, _umul(self.N, o.N, F), (RationalFunc.one(F),), F)
        n1, d1, n2, d2 = self.N, self.D, o.N, o.D
        if len(d2) > 1 and len(n1) > 1:
            g = _ugcd(n1, d2, F)
            if len(g) > 1:
                n1, d2 = _udivmod(n1, g, F)[0], _udivmod(d2, g, F)[0]
        if len(d1) > 1 and len(n2) > 1:
            g = _ugcd(n2, d1, F)
            if len(g) > 1:
                n2, d1 = _udivmod(n2, g, F)[0], _udivmod(d1, g, F)[0]
        num = _umul(n1, n2, F)
        den = _umul(d1, d2, F)
        lc = den[-1]
        if not lc.is_one():
            inv = lc.inverse()
            num, den = _uscale(num, inv), _uscale(den, inv)
        return RationalU(_check_exp(self.e + o.e), num, den, F)

    __rmul__ = __mul__

    def inverse(self) -> "RationalU":
        if not self.N:
            raise ZeroDivisionError("inverse of zero in k(w)(u)")
        lc = self.N[-1].inverse()
        return RationalU(-self.e, _uscale(self.D, lc), _uscale(self.N, lc), self.field)

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return self * o.inverse()

    def __rtruediv__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return o * self.inverse()

    def __pow__(self, n: int):
        _check_exp(n)
        if n < 0:
            return self.inverse() ** (-n)
        if self.is_monomial():
            return RationalU.monomial(self.N[0] ** n, _check_exp(self.e * n), self.field)
        out = RationalU.const(1, self.field)
        base = self
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out

    def scale_u(self, z: RationalFunc) -> "RationalU":
        """Substitute u -> z*u."""
        if z.is_one() or not self.N:
            return self
        if not z:
            raise ZeroDivisionError("u -> 0*u is not invertible")
        zp = [RationalFunc.one(self.field)]
        for _ in range(max(len(self.N), len(self.D))):
            zp.append(zp[-1] * z)
        N = tuple(c * zp[i] for i, c in enumerate(self.N))
        D = tuple(c * zp[i] for i, c in enumerate(self.D))
        N = _uscale(N, z ** self.e)
        lc = D[-1].inverse()
        return RationalU(self.e, _uscale(N, lc), _uscale(D, lc), self.field)

    def map_coeffs(self, fn) -> "RationalU":
        """Apply a ring map on k(w) coefficient-wise (used for w -> w^-1 style tests)."""
        return RationalU.make(self.e, tuple(fn(c) for c in self.N), tuple(fn(c) for c in self.D), self.field)

    def __eq__(self, other):
        if isinstance(other, (int, Fraction, RationalFunc)):
            other = self._coerce(other)
        if not isinstance(other, RationalU):
            return NotImplemented
        return self.field == other.field and self.e == other.e and self.N == other.N and self.D == other.D

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.e, self.N, self.D, self.field.p))
        return self._hash

    def __str__(self) -> str:
        return format_ru(self)

    __repr__ = __str__


# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class USeries:
    """u^shift * (c_0 + c_1 u^-1 + c_2 u^-2 + ...) with the tail unknown.

    ``coeffs[i]`` is the coefficient of u^(shift - i).  ``precision`` is the
    absolute order N: every coefficient of u^e with e >= -N is known.
    """

    shift: int
    coeffs: tuple
    field: Field = QQ

    @property
    def precision(self) -> int:
        return len(self.coeffs) - 1 - self.shift

    def coefficient(self, exponent: int) -> RationalFunc:
        i = self.shift - exponent
        if i < 0:
            return RationalFunc.zero(self.field)
        if i >= len(self.coeffs):
            raise IndexError(f"u^{exponent} lies beyond the known precision")
        return self.coeffs[i]

    def lowest_known(self) -> int:
        return -self.precision

    def terms(self) -> dict:
        return {self.shift - i: c for i, c in enumerate(self.coeffs) if c}

    def truncate(self, n: int) -> "USeries":
        return USeries(self.shift, self.coeffs[: max(self.shift + n + 1, 0)], self.field)

    def __mul__(self, other: "USeries") -> "USeries":
        n = min(len(self.coeffs), len(other.coeffs)) - 1
        zero = RationalFunc.zero(self.field)
        out = []
        for k in range(n + 1):
            acc = zero
            for i in range(k + 1):
                a, b = self.coeffs[i], other.coeffs[k - i]
                if a and b:
                    acc = acc + a * b
            out.append(acc)
        return USeries(self.shift + other.shift, tuple(out), self.field)

    def __add__(self, other: "USeries") -> "USeries":
        s = max(self.shift, other.shift)
        low = max(self.lowest_known(), other.lowest_known())
        return USeries(s, tuple(self.coefficient(e) + other.coefficient(e) for e in range(s, low - 1, -1)), self.field)

    def __neg__(self) -> "USeries":
        return USeries(self.shift, tuple(-c for c in self.coeffs), self.field)

    def __sub__(self, other: "USeries") -> "USeries":
        return self + (-other)

    def same_terms(self, other: "USeries") -> bool:
        """Agreement on every exponent known to both."""
        low = max(self.lowest_known(), other.lowest_known())
        high = max(self.shift, other.shift)
        return all(self.coefficient(e) == other.coefficient(e) for e in range(high, low - 1, -1))


def expand_series(f: RationalU, n: int, max_shift: int | None = None) -> USeries:
    """The u^-1 expansion of f down to u^-n (coefficients of u^-n .. u^shift).

    With ``max_shift`` set, expansions whose leading power exceeds u^max_shift
    raise :class:`NotExpandable` carrying the shift that would be needed.

    >>> F = Field()
    >>> w, u = RationalU.w(F), RationalU.u(F)
    >>> expand_series(u**-1 / (1 - w * u**-1), 3).terms()
    {-1: 1, -2: w, -3: w^2}
    """
    F = f.field
    if not f.N:
        return USeries(0, (RationalFunc.zero(F),) * max(n + 1, 0), F)
    s, A, B = f.u_inv_form()
    if max_shift is not None and s > max_shift:
        raise NotExpandable(s, max_shift)
    zero = RationalFunc.zero(F)
    c = []
    for i in range(max(s + n + 1, 0)):
        acc = A[i] if i < len(A) else zero
        for j in range(1, min(i, len(B) - 1) + 1):
            if B[j] and c[i - j]:
                acc = acc - B[j] * c[i - j]
        c.append(acc)
    return USeries(s, tuple(c), F)


# ---------------------------------------------------------------------------
# text syntax

def _fmt_coeff(c: Coeff) -> str:
    return str(c)


def _format_wpoly(a: tuple, field: Field) -> list[str]:
    out = []
    for i, c in enumerate(a):
        if not c:
            continue
        mono = "" if i == 0 else ("w" if i == 1 else f"w^{i}")
        if not mono:
            out.append(_fmt_coeff(c))
        elif c == 1:
            out.append(mono)
        elif field.p == 0 and c == -1:
            out.append("-" + mono)
        else:
            out.append(f"{_fmt_coeff(c)}*{mono}")
    return out


def _join(terms: list[str]) -> str:
    if not terms:
        return "0"
    s = terms[0]
    for t in terms[1:]:
        s += t if t.startswith("-") else "+" + t
    return s


def format_rf(f: RationalFunc) -> str:
    num = _format_wpoly(f.num, f.field)
    if not num:
        return "0"
    if f.den == (f.field.one,):
        return _join(num)
    den = _format_wpoly(f.den, f.field)
    ns = _join(num)
    if len(num) > 1:
        ns = f"({ns})"
    ds = _join(den)
    if len(den) > 1 or "*" in ds:
        ds = f"({ds})"
    return f"{ns}/{ds}"


def _format_upoly(terms: list[tuple[int, RationalFunc]]) -> str:
    out = []
    for k, c in terms:
        cs = format_rf(c)
        atom = len(_format_wpoly(c.num, c.field)) == 1 and c.den == (c.field.one,)
        mono = "" if k == 0 else ("u" if k == 1 else f"u^{k}")
        if not mono:
            out.append(cs if atom else f"({cs})")
        elif cs == "1":
            out.append(mono)
        elif cs == "-1":
            out.append("-" + mono)
        else:
            out.append(f"{cs if atom else '(' + cs + ')'}*{mono}")
    return _join(out)


def format_ru(f: RationalU) -> str:
    if not f.N:
        return "0"
    num = _format_upoly([(f.e + i, c) for i, c in enumerate(f.N) if c])
    if f.is_laurent():
        return num
    den = _format_upoly([(i, c) for i, c in enumerate(f.D) if c])
    return f"({num})/({den})"


_TOKEN = re.compile(r"\s*(?:(\d+)|([wu])|(.))")


def _tokenize(text: str) -> list:
    toks = []
    pos = 0
    text = text.strip()
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            break
        num, var, op = m.groups()
        if num is not None:
            toks.append(("num", int(num)))
        elif var is not None:
            toks.append(("var", var))
        elif op is not None:
            if op not in "+-*/^()":
                raise ParseError(f"unexpected character {op!r} in {text!r}")
            toks.append(("op", op))
        pos = m.end()
    return toks


class _Parser:
    def __init__(self, text: str, field: Field):
        self.text = text
        self.toks = _tokenize(text)
        self.i = 0
        self.F = field

    def peek(self):
        return self.toks[self.i] if self.i < len(self.toks) else (None, None)

    def take(self, kind=None, val=None):
        t = self.peek()
        if t[0] is None or (kind and t[0] != kind) or (val and t[1] != val):
            raise ParseError(f"unexpected token {t[1]!r} in {self.text!r}")
        self.i += 1
        return t

    def parse(self) -> RationalU:
        if not self.toks:
            raise ParseError("empty expression")
        v = self.expr()
        if self.i != len(self.toks):
            raise ParseError(f"trailing input in {self.text!r}")
        return v

    def expr(self):
        v = self.term()
        while self.peek() in (("op", "+"), ("op", "-")):
            op = self.take()[1]
            r = self.term()
            v = v + r if op == "+" else v - r
        return v

    def term(self):
        v = self.unary()
        while self.peek() in (("op", "*"), ("op", "/")):
            op = self.take()[1]
            r = self.unary()
            if op == "*":
                v = v * r
            else:
                if not r:
                    raise ParseError(f"division by zero in {self.text!r}")
                v = v / r
        return v

    def unary(self):
        if self.peek() == ("op", "-"):
            self.take()
            return -self.unary()
        if self.peek() == ("op", "+"):
            self.take()
            return self.unary()
        return self.power()

    def exponent(self) -> int:
        sign = 1
        if self.peek() == ("op", "("):
            self.take()
            e = self.exponent()
            self.take("op", ")")
            return e
        while self.peek() in (("op", "-"), ("op", "+")):
            if self.take()[1] == "-":
                sign = -sign
        e = sign * self.take("num")[1]
        try:
            return _check_exp(e)
        except ExponentOverflow as exc:
            raise ParseError(str(exc)) from None

    def power(self):
        base = self.atom()
        if self.peek() == ("op", "^"):
            self.take()
            e = self.exponent()
            if not base and e < 0:
                raise ParseError("negative power of zero")
            base = base ** e
        return base

    def atom(self):
        kind, val = self.peek()
        if kind == "num":
            self.take()
            return RationalU.const(val, self.F)
        if kind == "var":
            self.take()
            return RationalU.w(self.F) if val == "w" else RationalU.u(self.F)
        if (kind, val) == ("op", "("):
            self.take()
            v = self.expr()
            self.take("op", ")")
            return v
        raise ParseError(f"unexpected token {val!r} in {self.text!r}")


def parse_ru(text: str, field: Field = QQ) -> RationalU:
    """Parse an expression in w and u.

    >>> parse_ru("w^-1*u^-1/(1+u^-2)")
    ((1/w)*u)/(1+u^2)
    """
    return _Parser(text, field).parse()


def parse_rf(text: str, field: Field = QQ) -> RationalFunc:
    """Parse an expression in w only."""
    v = parse_ru(text, field)
    if not v.N:
        return RationalFunc.zero(field)
    if not (v.is_monomial() and v.e == 0):
        raise ParseError(f"{text!r} depends on u")
    return v.N[0]
