"""Exact scalars: rationals and elements of a real quadratic field Q(sqrt d).

Rationals are plain :class:`fractions.Fraction` values.  Irrational elements
are :class:`QuadraticSurd` instances ``a + b*sqrt(d)`` with ``b != 0`` and
``d`` square-free; any operation whose result has ``b == 0`` hands back a
``Fraction``.  Both kinds interoperate with ``int`` and with each other
through the usual operators, so downstream code is written once against
"an ordered field element" and stays bit-exact.

Floats appear only in ``__float__`` (rendering); no comparison or sign test
ever goes through floating point.
"""

from __future__ import annotations

import math
import re
from decimal import Decimal
from fractions import Fraction
from typing import Union

from .errors import ExactDivisionByZero, MixedFieldsError, ScalarParseError

__all__ = [
    "QuadraticSurd",
    "ExactScalar",
    "as_scalar",
    "surd",
    "sqrt",
    "sign",
    "arith",
    "to_decimal",
    "to_decimal_value",
    "parse_scalar",
    "format_scalar",
    "field_of",
    "common_field",
]


def _squarefree_split(n: int) -> tuple[int, int]:
    """Return ``(k, m)`` with ``n == k*k*m`` and ``m`` square-free."""
    if n <= 0:
        raise ValueError("radicand must be positive")
    k, m = 1, 1
    rest = n
    p = 2
    while p * p <= rest:
        e = 0
        while rest % p == 0:
            rest //= p
            e += 1
        k *= p ** (e // 2)
        if e % 2:
            m *= p
        p += 1 if p == 2 else 2
    return k, m * rest


def _frac(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x)
    raise TypeError(f"cannot use {type(x).__name__} as an exact rational")


class QuadraticSurd:
    """``a + b*sqrt(d)`` with rational ``a, b``, ``b != 0``, square-free ``d > 1``.

    Build instances with :func:`surd` or :func:`sqrt`; those normalise and
    may return a ``Fraction`` instead.
    """

    __slots__ = ("a", "b", "d")

    def __init__(self, a: Fraction, b: Fraction, d: int):
        # trusted constructor: callers guarantee normal form
        self.a = a
        self.b = b
        self.d = d

    # -- normal form -------------------------------------------------------
    @staticmethod
    def _make(a: Fraction, b: Fraction, d: int) -> "ExactScalar":
        if b == 0 or d == 1:
            return a + b if d == 1 else a
        return QuadraticSurd(a, b, d)

    def _coerce(self, other):
        """Return ``(a, b)`` of ``other`` in this field, or ``None``."""
        if isinstance(other, QuadraticSurd):
            if other.d != self.d:
                raise MixedFieldsError(
                    f"cannot combine Q(sqrt {self.d}) with Q(sqrt {other.d})"
                )
            return other.a, other.b
        if isinstance(other, (int, Fraction)):
            return Fraction(other), Fraction(0)
        return None

    # -- arithmetic --------------------------------------------------------
    def __add__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return QuadraticSurd._make(self.a + o[0], self.b + o[1], self.d)

    __radd__ = __add__

    def __sub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return QuadraticSurd._make(self.a - o[0], self.b - o[1], self.d)

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return QuadraticSurd._make(o[0] - self.a, o[1] - self.b, self.d)

    def __mul__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        a, b = o
        return QuadraticSurd._make(
            self.a * a + self.b * b * self.d, self.a * b + self.b * a, self.d
        )

    __rmul__ = __mul__

    def norm(self) -> Fraction:
        """Field norm ``a^2 - b^2 d``; nonzero for every nonzero element."""
        return self.a * self.a - self.b * self.b * self.d

    def conjugate(self) -> "QuadraticSurd":
        return QuadraticSurd(self.a, -self.b, self.d)

    def _inverse(self):
        n = self.norm()
        return QuadraticSurd(self.a / n, -self.b / n, self.d)

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        a, b = o
        if b == 0:
            if a == 0:
                raise ExactDivisionByZero("division by zero")
            return QuadraticSurd._make(self.a / a, self.b / a, self.d)
        return self * QuadraticSurd(a, b, self.d)._inverse()

    def __rtruediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return QuadraticSurd._make(o[0], o[1], self.d) * self._inverse()

    def __neg__(self):
        return QuadraticSurd(-self.a, -self.b, self.d)

    def __pos__(self):
        return self

    def __abs__(self):
        return -self if self._sign() < 0 else self

    def __pow__(self, n):
        if not isinstance(n, int):
            return NotImplemented
        if n < 0:
            return (1 / self) ** (-n)
        result: ExactScalar = Fraction(1)
        base: ExactScalar = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    # -- order -------------------------------------------------------------
    def _sign(self) -> int:
        sa = (self.a > 0) - (self.a < 0)
        sb = (self.b > 0) - (self.b < 0)
        if sa == sb or sa == 0:
            return sb
        if sb == 0:
            return sa
        # opposite signs: compare a^2 with b^2 d
        diff = self.a * self.a - self.b * self.b * self.d
        return sa if diff > 0 else sb

    def _cmp(self, other):
        o = self._coerce(other)
        if o is None:
            return None
        return QuadraticSurd._sign_of(self.a - o[0], self.b - o[1], self.d)

    @staticmethod
    def _sign_of(a, b, d):
        if b == 0:
            return (a > 0) - (a < 0)
        return QuadraticSurd(a, b, d)._sign()

    def __eq__(self, other):
        if isinstance(other, QuadraticSurd):
            return (self.a, self.b, self.d) == (other.a, other.b, other.d)
        if isinstance(other, (int, Fraction)):
            return False
        return NotImplemented

    def __hash__(self):
        return hash((self.a, self.b, self.d))

    def __lt__(self, other):
        c = self._cmp(other)
        return NotImplemented if c is None else c < 0

    def __le__(self, other):
        c = self._cmp(other)
        return NotImplemented if c is None else c <= 0

    def __gt__(self, other):
        c = self._cmp(other)
        return NotImplemented if c is None else c > 0

    def __ge__(self, other):
        c = self._cmp(other)
        return NotImplemented if c is None else c >= 0

    def __bool__(self):
        return True

    # -- rounding ----------------------------------------------------------
    def __floor__(self) -> int:
        # integer sqrt estimate, then exact correction
        r = self.b * self.b * self.d
        scale = 1 << 64
        root = math.isqrt(r.numerator * scale * scale // r.denominator)
        approx = self.a + (root if self.b > 0 else -root) * Fraction(1, scale)
        g = math.floor(approx)
        while g > self:
            g -= 1
        while g + 1 <= self:
            g += 1
        return g

    def __ceil__(self) -> int:
        return -math.floor(-self)

    def __float__(self):
        return float(self.a) + float(self.b) * math.sqrt(self.d)

    def __repr__(self):
        return f"QuadraticSurd({self.a!s}, {self.b!s}, {self.d})"

    def __str__(self):
        return format_scalar(self)


ExactScalar = Union[Fraction, QuadraticSurd]


def surd(a, b, d: int) -> ExactScalar:
    """Normalised ``a + b*sqrt(d)``; square factors of ``d`` are pulled out."""
    a, b = _frac(a), _frac(b)
    if d <= 0:
        raise ValueError("only real quadratic fields are supported")
    k, m = _squarefree_split(d)
    return QuadraticSurd._make(a, b * k, m)


def sqrt(n) -> ExactScalar:
    """Exact square root of a nonnegative rational."""
    n = _frac(n)
    if n < 0:
        raise ValueError("square root of a negative number")
    if n == 0:
        return Fraction(0)
    # sqrt(p/q) = sqrt(p*q)/q
    return surd(0, Fraction(1, n.denominator), n.numerator * n.denominator)


def as_scalar(x) -> ExactScalar:
    """Coerce ``int``/``Fraction``/``QuadraticSurd``/grammar string."""
    if isinstance(x, (Fraction, QuadraticSurd)):
        return x
    if isinstance(x, bool):
        raise TypeError("bool is not a scalar")
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str):
        return parse_scalar(x)
    raise TypeError(f"not an exact scalar: {x!r}")


def field_of(x) -> int:
    """Radicand of the field containing ``x`` (1 for rationals)."""
    return x.d if isinstance(x, QuadraticSurd) else 1


def common_field(values) -> int:
    """Radicand shared by ``values``; raises on two different radicals."""
    d = 1
    for v in values:
        e = field_of(v)
        if e != 1:
            if d not in (1, e):
                raise MixedFieldsError(f"values from Q(sqrt {d}) and Q(sqrt {e})")
            d = e
    return d


def sign(x) -> int:
    if isinstance(x, QuadraticSurd):
        return x._sign()
    return (x > 0) - (x < 0)


_OPS = {
    "add": lambda x, y: x + y,
    "sub": lambda x, y: x - y,
    "mul": lambda x, y: x * y,
    "div": lambda x, y: x / y,
    "neg": lambda x, y: -x,
    "cmp": lambda x, y: sign(x - y),
}


def arith(op: str, x, y=None):
    """Dispatch form of the field operations; ``cmp`` returns -1, 0 or 1."""
    try:
        fn = _OPS[op]
    except KeyError:
        raise ValueError(f"unknown operation {op!r}") from None
    x = as_scalar(x)
    y = x if y is None else as_scalar(y)
    if op == "div" and y == 0:
        raise ExactDivisionByZero("division by zero")
    return fn(x, y)


def to_decimal(x, digits: int) -> str:
    """Round ``x`` to ``digits`` places after the point (ties away from -inf).

    The digits come from one exact ``floor`` so the string is within half a
    unit in the last place of the true value.
    """
    if digits < 1:
        raise ValueError("digits must be >= 1")
    x = as_scalar(x)
    scaled = math.floor(x * 10**digits + Fraction(1, 2))
    neg = scaled < 0
    s = str(abs(scaled)).rjust(digits + 1, "0")
    out = f"{s[:-digits]}.{s[-digits:]}"
    return "-" + out if neg else out


def to_decimal_value(x, digits: int) -> Decimal:
    return Decimal(to_decimal(x, digits))


_INT = r"[+-]?\d+"
_RAT = rf"{_INT}(?:/\d+)?"
_SCALAR_RE = re.compile(
    rf"^(?P<a>{_RAT})(?:(?P<op>[+-])(?P<b>\d+(?:/\d+)?|{_RAT})\*sqrt\((?P<d>\d+)\))?$"
)
_PURE_SURD_RE = re.compile(rf"^(?P<b>{_RAT})\*sqrt\((?P<d>\d+)\)$")


def parse_scalar(text: str) -> ExactScalar:
    """Parse ``INT``, ``INT/POSINT`` or ``RAT+RAT*sqrt(POSINT)``.

    ``RAT-RAT*sqrt(..)`` and ``RAT*sqrt(..)`` are accepted as conveniences.
    """
    t = text.strip()
    m = _SCALAR_RE.match(t)
    if m is None:
        m2 = _PURE_SURD_RE.match(t)
        if m2 is None:
            raise ScalarParseError(f"not an exact scalar: {text!r}")
        return surd(0, _parse_rat(m2["b"]), int(m2["d"]))
    a = _parse_rat(m["a"])
    if m["op"] is None:
        return a
    b = _parse_rat(m["b"])
    if m["op"] == "-":
        b = -b
    d = int(m["d"])
    if d == 0:
        raise ScalarParseError("sqrt(0) is not a field generator")
    return surd(a, b, d)


def _parse_rat(s: str) -> Fraction:
    if "/" in s:
        p, q = s.split("/")
        if int(q) == 0:
            raise ScalarParseError("zero denominator")
    return Fraction(s)


def format_scalar(x) -> str:
    """Inverse of :func:`parse_scalar` (``a+b*sqrt(d)``; ``b`` may be negative)."""
    x = as_scalar(x)
    if isinstance(x, QuadraticSurd):
        return f"{x.a}+{x.b}*sqrt({x.d})"
    return str(x)
