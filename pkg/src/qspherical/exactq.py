"""Exact arithmetic in Q(q).

``LaurentPoly`` models the ring Z[q, q^-1] as a sparse exponent -> coefficient
map.  ``RatFun`` is a reduced fraction of integer polynomials in q; polynomial
arithmetic and gcds are delegated to FLINT's ``fmpz_poly``.

Canonical form of a ``RatFun``: ``gcd(num, den) == 1`` over Z[q] (content
included) and the leading coefficient of ``den`` is positive.  Equality and
hashing go through this form.
"""
from __future__ import annotations

import re

from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Mapping

from flint import fmpz_poly

__all__ = [
    "LaurentPoly",
    "RatFun",
    "q",
    "ZERO",
    "ONE",
    "qpow",
    "bar",
    "quantum_int",
    "quantum_factorial",
    "quantum_binomial",
    "is_regular_at_infinity",
    "is_strictly_small_at_infinity",
    "eval_at_infinity",
    "is_laurent_integral",
    "NotRegularAtInfinity",
]


class NotRegularAtInfinity(ValueError):
    """Raised when a value at q = infinity is requested for a function with a pole there."""


class LaurentPoly:
    """Integer Laurent polynomial in q, stored sparsely without zero coefficients."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs: Mapping[int, int] | None = None):
        self.coeffs: dict[int, int] = {}
        if coeffs:
            for e, c in coeffs.items():
                c = int(c)
                if c:
                    self.coeffs[int(e)] = c

    @classmethod
    def monomial(cls, exp: int, coeff: int = 1) -> "LaurentPoly":
        return cls({exp: coeff})

    def is_zero(self) -> bool:
        return not self.coeffs

    def min_exp(self) -> int:
        return min(self.coeffs)

    def max_exp(self) -> int:
        return max(self.coeffs)

    def __add__(self, other: "LaurentPoly") -> "LaurentPoly":
        out = dict(self.coeffs)
        for e, c in other.coeffs.items():
            out[e] = out.get(e, 0) + c
        return LaurentPoly(out)

    def __neg__(self) -> "LaurentPoly":
        return LaurentPoly({e: -c for e, c in self.coeffs.items()})

    def __sub__(self, other: "LaurentPoly") -> "LaurentPoly":
        return self + (-other)

    def __mul__(self, other: "LaurentPoly | int") -> "LaurentPoly":
        if isinstance(other, int):
            return LaurentPoly({e: c * other for e, c in self.coeffs.items()})
        out: dict[int, int] = {}
        for e1, c1 in self.coeffs.items():
            for e2, c2 in other.coeffs.items():
                out[e1 + e2] = out.get(e1 + e2, 0) + c1 * c2
        return LaurentPoly(out)

    __rmul__ = __mul__

    def bar(self) -> "LaurentPoly":
        return LaurentPoly({-e: c for e, c in self.coeffs.items()})

    def __eq__(self, other: object) -> bool:
        if isinstance(other, int):
            return self.coeffs == ({0: other} if other else {})
        if isinstance(other, LaurentPoly):
            return self.coeffs == other.coeffs
        return NotImplemented

    def __hash__(self) -> int:
        return hash(tuple(sorted(self.coeffs.items())))

    def to_ratfun(self) -> "RatFun":
        if not self.coeffs:
            return ZERO
        lo = self.min_exp()
        hi = self.max_exp()
        dense = [0] * (hi - lo + 1)
        for e, c in self.coeffs.items():
            dense[e - lo] = c
        num = fmpz_poly(dense)
        if lo >= 0:
            return RatFun._raw(num.left_shift(lo), fmpz_poly([1]))
        return RatFun(num, fmpz_poly([0] * (-lo) + [1]))

    def __str__(self) -> str:
        if not self.coeffs:
            return "0"
        out = []
        for e, c in sorted(self.coeffs.items(), reverse=True):
            mag = abs(c)
            if e == 0:
                body = str(mag)
            else:
                mono = "q" if e == 1 else f"q^{e}"
                body = mono if mag == 1 else f"{mag}{mono}"
            if not out:
                out.append(body if c > 0 else f"-{body}")
            else:
                out.append(f"+ {body}" if c > 0 else f"- {body}")
        return " ".join(out)

    def __repr__(self) -> str:
        return f"LaurentPoly({self})"

    @classmethod
    def parse(cls, text: str) -> "LaurentPoly":
        """Inverse of ``str``; also accepts ``c*q^e`` terms."""
        text = text.replace(" ", "").replace("*", "")
        if text in ("", "0"):
            return cls()
        out: dict[int, int] = {}
        for m in _TERM.finditer(text):
            sign, coef, var, exp = m.groups()
            if not (coef or var):
                continue
            c = int(coef) if coef else 1
            if sign == "-":
                c = -c
            e = (int(exp) if exp else 1) if var else 0
            out[e] = out.get(e, 0) + c
        return cls(out)


_TERM = re.compile(r"([+-]?)(\d*)(q)?(?:\^(-?\d+))?")


def _rev(p: fmpz_poly) -> fmpz_poly:
    return fmpz_poly(p.coeffs()[::-1])


class RatFun:
    """Element of Q(q) as a reduced fraction ``num / den`` of integer polynomials."""

    __slots__ = ("num", "den", "_hash")

    def __init__(self, num, den=None):
        if isinstance(num, RatFun):
            self.num, self.den, self._hash = num.num, num.den, None
            return
        if isinstance(num, LaurentPoly):
            r = num.to_ratfun()
            self.num, self.den, self._hash = r.num, r.den, None
            return
        if isinstance(num, Fraction):
            num, den = fmpz_poly([num.numerator]), fmpz_poly([num.denominator]) * (den or 1)
        n = num if isinstance(num, fmpz_poly) else fmpz_poly([num] if isinstance(num, int) else num)
        d = fmpz_poly([1]) if den is None else (den if isinstance(den, fmpz_poly) else fmpz_poly([den] if isinstance(den, int) else den))
        if d.is_zero():
            raise ZeroDivisionError("zero denominator")
        if n.is_zero():
            d = fmpz_poly([1])
        else:
            g = n.gcd(d)
            if not g.is_one():
                n = n // g
                d = d // g
        if d.leading_coefficient() < 0:
            n, d = -n, -d
        self.num, self.den, self._hash = n, d, None

    @classmethod
    def _raw(cls, num: fmpz_poly, den: fmpz_poly) -> "RatFun":
        obj = cls.__new__(cls)
        obj.num, obj.den, obj._hash = num, den, None
        return obj

    # -- arithmetic -------------------------------------------------------
    @staticmethod
    def _coerce(x) -> "RatFun":
        if isinstance(x, RatFun):
            return x
        if isinstance(x, int):
            return RatFun._raw(fmpz_poly([x]) if x else fmpz_poly(), fmpz_poly([1]))
        if isinstance(x, (LaurentPoly, Fraction)):
            return RatFun(x)
        return NotImplemented

    def __add__(self, other) -> "RatFun":
        o = RatFun._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        if o.num.is_zero():
            return self
        if self.num.is_zero():
            return o
        if self.den == o.den:
            n = self.num + o.num
            if n.is_zero():
                return ZERO
            if self.den.is_one():
                return RatFun._raw(n, self.den)
            return RatFun(n, self.den)
        if self.den.is_one():
            return RatFun._raw(self.num * o.den + o.num, o.den)
        if o.den.is_one():
            return RatFun._raw(self.num + o.num * self.den, self.den)
        return RatFun(self.num * o.den + o.num * self.den, self.den * o.den)

    __radd__ = __add__

    def __neg__(self) -> "RatFun":
        return RatFun._raw(-self.num, self.den)

    def __sub__(self, other) -> "RatFun":
        o = RatFun._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other) -> "RatFun":
        return RatFun._coerce(other) - self

    def __mul__(self, other) -> "RatFun":
        o = RatFun._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        if self.num.is_zero() or o.num.is_zero():
            return ZERO
        if o.den.is_one() and self.den.is_one():
            return RatFun._raw(self.num * o.num, self.den)
        g1 = self.num.gcd(o.den)
        g2 = o.num.gcd(self.den)
        n1, d2 = (self.num, o.den) if g1.is_one() else (self.num // g1, o.den // g1)
        n2, d1 = (o.num, self.den) if g2.is_one() else (o.num // g2, self.den // g2)
        n, d = n1 * n2, d1 * d2
        if d.leading_coefficient() < 0:
            n, d = -n, -d
        return RatFun._raw(n, d)

    __rmul__ = __mul__

    def inverse(self) -> "RatFun":
        if self.num.is_zero():
            raise ZeroDivisionError("inverse of zero")
        n, d = self.den, self.num
        if d.leading_coefficient() < 0:
            n, d = -n, -d
        return RatFun._raw(n, d)

    def __truediv__(self, other) -> "RatFun":
        o = RatFun._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        return self * o.inverse()

    def __rtruediv__(self, other) -> "RatFun":
        return RatFun._coerce(other) * self.inverse()

    def __pow__(self, k: int) -> "RatFun":
        if k < 0:
            return self.inverse() ** (-k)
        n, d = self.num ** k, self.den ** k
        return RatFun._raw(n, d)

    # -- comparison -------------------------------------------------------
    def __eq__(self, other) -> bool:
        o = RatFun._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        return self.num == o.num and self.den == o.den

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash((tuple(int(c) for c in self.num.coeffs()), tuple(int(c) for c in self.den.coeffs())))
        return self._hash

    def __bool__(self) -> bool:
        return not self.num.is_zero()

    def is_zero(self) -> bool:
        return self.num.is_zero()

    # -- structure --------------------------------------------------------
    def degree(self) -> int:
        """Order of growth at q = infinity: deg num - deg den (``-inf`` style sentinel for zero)."""
        if self.num.is_zero():
            return -(10**9)
        return self.num.degree() - self.den.degree()

    def bar(self) -> "RatFun":
        if self.num.is_zero():
            return self
        dn, dd = self.num.degree(), self.den.degree()
        n, d = _rev(self.num), _rev(self.den)
        if dd > dn:
            n = n.left_shift(dd - dn)
        elif dn > dd:
            d = d.left_shift(dn - dd)
        return RatFun(n, d)

    def laurent(self) -> LaurentPoly | None:
        dc = self.den.coeffs()
        if any(dc[:-1]) or dc[-1] != 1:
            return None
        shift = len(dc) - 1
        return LaurentPoly({k - shift: int(c) for k, c in enumerate(self.num.coeffs()) if c})

    def __str__(self) -> str:
        lp = self.laurent()
        if lp is not None:
            return str(lp)
        return f"{_paren(_poly_str(self.num))}/{_paren(_poly_str(self.den))}"

    def __repr__(self) -> str:
        return f"RatFun({self})"

    @classmethod
    def parse(cls, text: str) -> "RatFun":
        text = text.strip()
        depth = 0
        for k, ch in enumerate(text):
            depth += (ch == "(") - (ch == ")")
            if ch == "/" and depth == 0:
                a, b = text[:k], text[k + 1:]
                return cls.parse(a) / cls.parse(b)
        if text.startswith("(") and text.endswith(")"):
            text = text[1:-1]
        return RatFun(LaurentPoly.parse(text))


def _paren(s: str) -> str:
    return f"({s})" if (" " in s) else s


def _poly_str(p: fmpz_poly) -> str:
    return str(LaurentPoly({k: int(c) for k, c in enumerate(p.coeffs()) if c}))


ZERO = RatFun._raw(fmpz_poly(), fmpz_poly([1]))
ONE = RatFun._raw(fmpz_poly([1]), fmpz_poly([1]))
q = RatFun._raw(fmpz_poly([0, 1]), fmpz_poly([1]))


@lru_cache(maxsize=4096)
def qpow(k: int) -> RatFun:
    """q**k for any integer k."""
    if k >= 0:
        return RatFun._raw(fmpz_poly([1]).left_shift(k), fmpz_poly([1]))
    return RatFun._raw(fmpz_poly([1]), fmpz_poly([1]).left_shift(-k))


def bar(f: RatFun) -> RatFun:
    """The Q-linear automorphism q -> q^-1."""
    return RatFun._coerce(f).bar()


@lru_cache(maxsize=4096)
def quantum_int(n: int, d: int = 1) -> RatFun:
    """Balanced quantum integer (q^{dn} - q^{-dn}) / (q^d - q^{-d})."""
    if d < 1:
        raise ValueError("d must be positive")
    if n < 0:
        return -quantum_int(-n, d)
    return RatFun(LaurentPoly({d * (n - 1 - 2 * k): 1 for k in range(n)}))


@lru_cache(maxsize=4096)
def quantum_factorial(n: int, d: int = 1) -> RatFun:
    if n < 0:
        raise ValueError("factorial of a negative integer")
    out = ONE
    for k in range(2, n + 1):
        out = out * quantum_int(k, d)
    return out


@lru_cache(maxsize=4096)
def quantum_binomial(n: int, k: int, d: int = 1) -> RatFun:
    if n < 0 or not 0 <= k <= n:
        raise ValueError("need 0 <= k <= n")
    return quantum_factorial(n, d) / (quantum_factorial(k, d) * quantum_factorial(n - k, d))


def is_regular_at_infinity(f: RatFun) -> bool:
    """Membership in A_inf: no pole at q = infinity."""
    f = RatFun._coerce(f)
    return f.is_zero() or f.num.degree() <= f.den.degree()


def is_strictly_small_at_infinity(f: RatFun) -> bool:
    """Membership in q^-1 A_inf: vanishes at q = infinity."""
    f = RatFun._coerce(f)
    return f.is_zero() or f.num.degree() < f.den.degree()


def eval_at_infinity(f: RatFun) -> Fraction:
    f = RatFun._coerce(f)
    if not is_regular_at_infinity(f):
        raise NotRegularAtInfinity(f"{f} is not in A-infinity")
    if f.is_zero() or f.num.degree() < f.den.degree():
        return Fraction(0)
    return Fraction(int(f.num.leading_coefficient()), int(f.den.leading_coefficient()))


def is_laurent_integral(f: RatFun) -> LaurentPoly | None:
    """The integer Laurent polynomial equal to ``f``, or None when f is not in Z[q, q^-1]."""
    return RatFun._coerce(f).laurent()


def is_unit(f: RatFun) -> bool:
    """True for +-q^k, the units of Z[q, q^-1]."""
    lp = RatFun._coerce(f).laurent()
    return lp is not None and len(lp.coeffs) == 1 and abs(next(iter(lp.coeffs.values()))) == 1


def as_ratfun(x) -> RatFun:
    r = RatFun._coerce(x)
    if r is NotImplemented:
        raise TypeError(f"cannot convert {x!r} to RatFun")
    return r


def ratfuns(values: Iterable) -> list[RatFun]:
    return [as_ratfun(v) for v in values]
