"""Exact Gaussian-rational scalars.

A :class:`GQ` is ``re + im*i`` with ``re`` and ``im`` arbitrary precision
rationals (``gmpy2.mpq``, always reduced with positive denominator).  The
floating twin is the builtin :class:`complex`; any operation mixing the two
yields a :class:`complex`.
"""
from __future__ import annotations

import re as _re
from numbers import Rational

import gmpy2
from gmpy2 import mpq, mpz

from ..errors import ParseError

_ZERO = mpq(0)
_ONE = mpq(1)


def _q(x):
    if isinstance(x, type(_ZERO)):
        return x
    if isinstance(x, (int, Rational)) or type(x) is type(mpz(0)):
        return mpq(x)
    if isinstance(x, str):
        return mpq(x)
    raise TypeError(f"cannot convert {x!r} to an exact rational")


class GQ:
    """Immutable Gaussian rational ``re + im*i``."""

    __slots__ = ("re", "im")

    def __init__(self, re=0, im=0):
        object.__setattr__(self, "re", _q(re))
        object.__setattr__(self, "im", _q(im))

    @classmethod
    def _raw(cls, re, im):
        z = object.__new__(cls)
        object.__setattr__(z, "re", re)
        object.__setattr__(z, "im", im)
        return z

    def __setattr__(self, name, value):
        raise AttributeError("GQ is immutable")

    def __reduce__(self):
        return (GQ, (str(self.re), str(self.im)))

    # -- coercion ---------------------------------------------------------
    @staticmethod
    def coerce(x):
        """Return ``x`` as a GQ, or a complex if ``x`` is floating."""
        if isinstance(x, GQ):
            return x
        if isinstance(x, (float, complex)):
            return complex(x)
        return GQ._raw(_q(x), _ZERO)

    @property
    def exact(self):
        return True

    # -- arithmetic -------------------------------------------------------
    def __add__(self, other):
        if isinstance(other, GQ):
            return GQ._raw(self.re + other.re, self.im + other.im)
        if isinstance(other, (float, complex)):
            return complex(self) + other
        o = _q(other)
        return GQ._raw(self.re + o, self.im)

    __radd__ = __add__

    def __sub__(self, other):
        if isinstance(other, GQ):
            return GQ._raw(self.re - other.re, self.im - other.im)
        if isinstance(other, (float, complex)):
            return complex(self) - other
        return GQ._raw(self.re - _q(other), self.im)

    def __rsub__(self, other):
        if isinstance(other, (float, complex)):
            return other - complex(self)
        return GQ._raw(_q(other) - self.re, -self.im)

    def __mul__(self, other):
        if isinstance(other, GQ):
            a, b, c, d = self.re, self.im, other.re, other.im
            if not b and not d:
                return GQ._raw(a * c, _ZERO)
            return GQ._raw(a * c - b * d, a * d + b * c)
        if isinstance(other, (float, complex)):
            return complex(self) * other
        o = _q(other)
        return GQ._raw(self.re * o, self.im * o)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, (float, complex)):
            return complex(self) / other
        return self * GQ.coerce(other).inverse()

    def __rtruediv__(self, other):
        if isinstance(other, (float, complex)):
            return other / complex(self)
        return GQ.coerce(other) * self.inverse()

    def __neg__(self):
        return GQ._raw(-self.re, -self.im)

    def __pos__(self):
        return self

    def __pow__(self, n):
        if not isinstance(n, int):
            return NotImplemented
        if n < 0:
            return self.inverse() ** (-n)
        result, base = ONE, self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def inverse(self):
        n = self.re * self.re + self.im * self.im
        if not n:
            raise ZeroDivisionError("inverse of zero Gaussian rational")
        return GQ._raw(self.re / n, -self.im / n)

    def conjugate(self):
        return GQ._raw(self.re, -self.im)

    def abs2(self):
        """Squared modulus, an exact rational."""
        return self.re * self.re + self.im * self.im

    def __abs__(self):
        return abs(complex(self))

    # -- comparison / conversion -------------------------------------------
    def __bool__(self):
        return bool(self.re) or bool(self.im)

    def __eq__(self, other):
        if isinstance(other, GQ):
            return self.re == other.re and self.im == other.im
        if isinstance(other, (int, Rational)) or type(other) is type(_ZERO):
            return self.im == 0 and self.re == other
        if isinstance(other, (float, complex)):
            return complex(self) == other
        return NotImplemented

    def __hash__(self):
        if not self.im:
            return hash(self.re)
        return hash((self.re, self.im))

    def __complex__(self):
        return complex(float(self.re), float(self.im))

    def is_real(self):
        return not self.im

    def __repr__(self):
        return f"GQ({format_scalar(self)!r})"

    def __str__(self):
        return format_scalar(self)


ZERO = GQ._raw(_ZERO, _ZERO)
ONE = GQ._raw(_ONE, _ZERO)
I = GQ._raw(_ZERO, _ONE)


def gq(x) -> GQ:
    """Build an exact scalar from an int, rational, GQ or scalar string."""
    if isinstance(x, GQ):
        return x
    if isinstance(x, str):
        return parse_scalar(x)
    if isinstance(x, (float, complex)):
        raise TypeError("use complex values for the floating variant")
    return GQ._raw(_q(x), _ZERO)


def is_exact(x) -> bool:
    return isinstance(x, GQ)


def to_complex(x) -> complex:
    return complex(x)


def sqrt_exact(z):
    """Principal square root of ``z`` if it lies in Q(i), else ``None``.

    Principal branch: real part > 0, or real part 0 and imaginary part >= 0.
    """
    z = gq(z)
    if not z:
        return ZERO
    a, b = z.re, z.im
    m2 = a * a + b * b
    m = _sqrt_q(m2)
    if m is None:
        return None
    c2 = (a + m) / 2
    d2 = (m - a) / 2
    c = _sqrt_q(c2)
    d = _sqrt_q(d2)
    if c is None or d is None:
        return None
    if b < 0:
        d = -d
    w = GQ._raw(c, d)
    return w if w * w == z else None


def _sqrt_q(x):
    if x < 0:
        return None
    n, d = x.numerator, x.denominator
    if gmpy2.is_square(n) and gmpy2.is_square(d):
        return mpq(gmpy2.isqrt(n), gmpy2.isqrt(d))
    return None


def principal_sqrt_complex(z: complex) -> complex:
    """Floating principal square root with the same branch rule as sqrt_exact."""
    import cmath

    z = complex(z)
    if z.imag == 0 and z.real < 0:
        return complex(0.0, (-z.real) ** 0.5)
    return cmath.sqrt(z)


# -- text form -------------------------------------------------------------

def _fmt_q(x) -> str:
    return str(x)


def format_scalar(z) -> str:
    """Canonical spelling: ``p/q``, ``r/si`` or ``p/q+r/si`` (``i`` for unit).

    Floating values are written with ``repr`` of their components.
    """
    if isinstance(z, complex) or isinstance(z, float):
        z = complex(z)
        re_s, im_s = repr(z.real), repr(abs(z.imag))
        sign = "-" if (z.imag < 0 or (z.imag == 0 and str(z.imag).startswith("-"))) else "+"
        return f"{re_s}{sign}{im_s}i"
    z = gq(z)
    if not z.im:
        return _fmt_q(z.re)
    im_abs = abs(z.im)
    im_s = "" if im_abs == 1 else _fmt_q(im_abs)
    if not z.re:
        return f"{'-' if z.im < 0 else ''}{im_s}i"
    return f"{_fmt_q(z.re)}{'-' if z.im < 0 else '+'}{im_s}i"


_RAT = r"\d+(?:/\d+)?"
_EXACT_RE = _re.compile(
    rf"^\s*(?P<re>[+-]?{_RAT})?\s*(?:(?P<isign>[+-])?\s*(?P<im>{_RAT})?\s*(?P<i>i))?\s*$"
)
_FLOAT = r"(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?|inf|nan"
_FLOAT_RE = _re.compile(
    rf"^\s*(?P<re>[+-]?(?:{_FLOAT}))?\s*(?:(?P<isign>[+-])?\s*(?P<im>{_FLOAT})?\s*(?P<i>[ij]))?\s*$"
)


def parse_scalar(text: str):
    """Parse an exact Gaussian rational (``"1/2-3/4i"``, ``"i"``, ``"-2"``).

    Strings with a decimal point or exponent parse as floating complex.
    """
    if not isinstance(text, str):
        raise ParseError(f"scalar must be a string, got {type(text).__name__}")
    m = _EXACT_RE.match(text)
    if m and (m.group("re") or m.group("i")):
        re_part = m.group("re")
        if m.group("i"):
            if re_part is not None and m.group("isign") is None:
                # "2i", "-1/2i": a lone coefficient in front of i
                if m.group("im") is not None:
                    raise ParseError(f"malformed scalar {text!r}")
                im = _parse_q(re_part, text)
                return GQ._raw(_ZERO, im)
            im = _parse_q(m.group("im") or "1", text)
            if m.group("isign") == "-":
                im = -im
            re_v = _parse_q(re_part, text) if re_part is not None else _ZERO
            return GQ._raw(re_v, im)
        return GQ._raw(_parse_q(re_part, text), _ZERO)
    f = _FLOAT_RE.match(text)
    if f and (f.group("re") or f.group("i")):
        try:
            if f.group("i"):
                re_part = f.group("re")
                if re_part is not None and f.group("isign") is None:
                    if f.group("im") is not None:
                        raise ParseError(f"malformed scalar {text!r}")
                    return complex(0.0, float(re_part))
                im = float(f.group("im") or "1")
                if f.group("isign") == "-":
                    im = -im
                return complex(float(re_part) if re_part else 0.0, im)
            return complex(float(f.group("re")), 0.0)
        except ValueError as exc:
            raise ParseError(f"malformed scalar {text!r}") from exc
    raise ParseError(f"malformed scalar {text!r}")


def _parse_q(s: str, text: str):
    try:
        v = mpq(s.replace(" ", ""))
    except (ValueError, ZeroDivisionError) as exc:
        raise ParseError(f"malformed rational in {text!r}") from exc
    return v


__all__ = [
    "GQ", "ZERO", "ONE", "I", "gq", "is_exact", "to_complex", "sqrt_exact",
    "principal_sqrt_complex", "format_scalar", "parse_scalar",
]
