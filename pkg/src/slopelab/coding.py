"""Itineraries on the Cantor set of ``F_lambda`` and the parameter sweep.

The two components of ``[0, 1] & F^{-1}([0, 1])`` are
``L = [1/lam, 2/lam]`` (symbol 0, law ``lam*x - 1``) and
``R = [1 - 1/lam, 1]`` (symbol 1, law ``lam*(1 - x)``).  Each is mapped onto
``[0, 1]``, so a word of length ``d`` pins down an interval of width
``lam^-d``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Union

from .errors import BelowThreshold, NoSignChange
from .lifts import make_F_lambda, meets_threshold
from .numeric import ExactScalar, as_scalar, format_scalar, sqrt, to_decimal

# -- itineraries ----------------------------------------------------------------


def _primitive_root(word: str) -> str:
    n = len(word)
    for k in range(1, n + 1):
        if n % k == 0 and word[:k] * (n // k) == word:
            return word[:k]
    return word


def _check_word(word: str):
    if any(ch not in "01" for ch in word):
        raise ValueError(f"itinerary symbols must be 0 or 1, got {word!r}")


@dataclass(frozen=True)
class ExplicitFinite:
    word: str

    def __post_init__(self):
        _check_word(self.word)

    def prefix(self, d: int) -> str:
        if d > len(self.word):
            raise IndexError(f"finite itinerary has only {len(self.word)} symbols")
        return self.word[:d]

    def shift(self) -> "ExplicitFinite":
        return ExplicitFinite(self.word[1:])

    def __str__(self):
        return self.word


@dataclass(frozen=True)
class EventuallyPeriodic:
    """``preperiod`` followed by ``period`` repeated forever.

    The period is reduced to its primitive root and the preperiod is made
    as short as possible, so equal sequences compare equal.
    """

    preperiod: str
    period: str

    def __post_init__(self):
        _check_word(self.preperiod + self.period)
        if not self.period:
            raise ValueError("period word must be nonempty")
        pre, per = self.preperiod, _primitive_root(self.period)
        while pre and pre[-1] == per[-1]:
            pre, per = pre[:-1], per[-1] + per[:-1]
        object.__setattr__(self, "preperiod", pre)
        object.__setattr__(self, "period", per)

    def prefix(self, d: int) -> str:
        out = self.preperiod[:d]
        while len(out) < d:
            out += self.period
        return out[:d]

    def shift(self) -> "EventuallyPeriodic":
        if self.preperiod:
            return EventuallyPeriodic(self.preperiod[1:], self.period)
        return EventuallyPeriodic("", self.period[1:] + self.period[0])

    def __str__(self):
        return f"{self.preperiod}({self.period})^inf"


@dataclass(frozen=True)
class BlockFamily:
    """Alternating blocks ``0...0 1...1 0...0 ...``; block ``n`` (from 1) has
    length ``n + choices[n-1]``, and the last choice repeats forever."""

    choices: tuple = (0,)

    def __post_init__(self):
        if not self.choices or any(c not in (0, 1) for c in self.choices):
            raise ValueError("choices are 0 (length n) or 1 (length n+1)")
        object.__setattr__(self, "choices", tuple(self.choices))

    def choice(self, n: int) -> int:
        return self.choices[min(n, len(self.choices)) - 1]

    def block_lengths(self, d: int) -> list[int]:
        out, total, n = [], 0, 1
        while total < d:
            ln = n + self.choice(n)
            out.append(ln)
            total += ln
            n += 1
        return out

    def prefix(self, d: int) -> str:
        parts = [str((n - 1) % 2) * ln for n, ln in enumerate(self.block_lengths(d), 1)]
        return "".join(parts)[:d]

    def __str__(self):
        return "blocks:" + ",".join("n+1" if c else "n" for c in self.choices)


Itinerary = Union[ExplicitFinite, EventuallyPeriodic, BlockFamily]


def expand_block_family(choices, length: int) -> ExplicitFinite:
    fam = choices if isinstance(choices, BlockFamily) else BlockFamily(tuple(choices))
    return ExplicitFinite(fam.prefix(length))


def parse_itinerary(text: str) -> Itinerary:
    """``0^inf``, ``01^inf`` (last symbol repeats), ``w(p)^inf``,
    ``blocks:n,n+1`` or a plain finite word."""
    text = text.strip()
    if text.startswith("blocks:"):
        picks = text[len("blocks:"):].split(",")
        table = {"n": 0, "n+1": 1}
        try:
            return BlockFamily(tuple(table[p] for p in picks))
        except KeyError as exc:
            raise ValueError(f"bad block selector {exc.args[0]!r}") from None
    if text.endswith("^inf"):
        body = text[:-4]
        if body.endswith(")") and "(" in body:
            pre, per = body[:-1].split("(", 1)
            return EventuallyPeriodic(pre, per)
        if not body:
            raise ValueError("empty periodic itinerary")
        return EventuallyPeriodic(body[:-1], body[-1])
    return ExplicitFinite(text)


# -- the coding core ---------------------------------------------------------------


@dataclass(frozen=True)
class CodingCore:
    lam: ExactScalar
    L: tuple
    R: tuple

    def forward(self, x):
        """The interval map on ``L`` and ``R``; ``None`` off ``L | R``."""
        if self.L[0] <= x <= self.L[1]:
            return self.lam * x - 1
        if self.R[0] <= x <= self.R[1]:
            return self.lam * (1 - x)
        return None

    def symbol_of(self, x) -> Optional[str]:
        if self.L[0] <= x <= self.L[1]:
            return "0"
        if self.R[0] <= x <= self.R[1]:
            return "1"
        return None

    def inverse(self, symbol: str, y):
        if symbol == "0":
            return (y + 1) / self.lam
        return 1 - y / self.lam

    def inverse_word(self, word: str, y):
        for s in reversed(word):
            y = self.inverse(s, y)
        return y

    def fixed_points(self) -> tuple:
        return 1 / (self.lam - 1), self.lam / (self.lam + 1)

    def itinerary_of(self, x, depth: int) -> str:
        out = []
        for _ in range(depth):
            s = self.symbol_of(x)
            if s is None:
                break
            out.append(s)
            x = self.forward(x)
        return "".join(out)


def coding_core(lam) -> CodingCore:
    lam = as_scalar(lam)
    if not meets_threshold(lam):
        raise BelowThreshold(f"lambda = {format_scalar(lam)} is below 2+sqrt(5)")
    return CodingCore(lam, (1 / lam, 2 / lam), (1 - 1 / lam, 1))


def point_from_itinerary(core: CodingCore, it, depth: int) -> tuple:
    """Closed interval of points whose first ``depth`` symbols follow ``it``."""
    if depth < 1:
        raise ValueError("depth must be >= 1")
    word = it.prefix(depth) if not isinstance(it, str) else it[:depth]
    lo, hi = as_scalar(0), as_scalar(1)
    for s in reversed(word):
        a, b = core.inverse(s, lo), core.inverse(s, hi)
        lo, hi = (a, b) if a < b else (b, a)
    return lo, hi


# -- parameter sweep ---------------------------------------------------------------


@dataclass(frozen=True)
class LambdaEnclosure:
    n: int
    itinerary: str
    lo: ExactScalar
    hi: ExactScalar
    widths: tuple
    exact: Optional[ExactScalar] = None

    @property
    def width(self):
        return self.hi - self.lo

    def contains(self, x) -> bool:
        return self.lo <= x <= self.hi

    def to_dict(self, digits: int = 12) -> dict:
        d = {"n": self.n, "itinerary": self.itinerary,
             "lower": to_decimal(self.lo, digits), "upper": to_decimal(self.hi, digits),
             "bisection_steps": len(self.widths) - 1}
        if self.exact is not None:
            d["lambda"] = format_scalar(self.exact)
        return d


def critical_value(lam, n: int):
    """``F(b) - n = (lam - 1)/2 - n``, the top of the branch shifted by ``n``."""
    return (as_scalar(lam) - 1) / 2 - n


def _sign_at(lam, n, it, max_depth) -> Optional[int]:
    core = CodingCore(lam, (1 / lam, 2 / lam), (1 - 1 / lam, 1))
    cv = critical_value(lam, n)
    depth = 1
    while depth <= max_depth:
        lo, hi = point_from_itinerary(core, it, depth)
        if cv < lo:
            return -1
        if cv > hi:
            return 1
        depth = depth * 2 if depth < 8 else depth + 8
    return None


def find_lambda_for_itinerary(n: int, it, width=Fraction(1, 10**12), max_depth: int = 400,
                              identify: bool = True) -> LambdaEnclosure:
    """Bisect ``[2n+1, 2n+3]`` for a parameter whose critical value ``(lam-1)/2 - n``
    is the point with itinerary ``it``.

    Signs are decided exactly by comparing the critical value against
    itinerary enclosures, deepened until the comparison is strict.  For
    eventually periodic itineraries the parameter is also identified in
    closed form when it is quadratic.
    """
    if n < 2:
        raise ValueError("n must be >= 2")
    width = as_scalar(width)
    a, b = Fraction(2 * n + 1), Fraction(2 * n + 3)
    sa, sb = _sign_at(a, n, it, max_depth), _sign_at(b, n, it, max_depth)
    if sa != -1 or sb != 1:
        raise NoSignChange(f"critical value minus target has signs {sa}, {sb} at the range ends")
    widths = [b - a]
    while b - a > width:
        third = (b - a) / 3
        for m in (a + (b - a) / 2, a + third, b - third):
            s = _sign_at(m, n, it, max_depth)
            if s is not None:
                break
        else:
            raise NoSignChange(f"sign undecided near {float(a)} at depth {max_depth}")
        if s < 0:
            a = m
        elif s > 0:
            b = m
        widths.append(b - a)
    exact = None
    if identify and isinstance(it, EventuallyPeriodic):
        exact = identify_parameter(n, it, a, b)
    return LambdaEnclosure(n, str(it), a, b, tuple(widths), exact)


def identify_parameter(n: int, it: EventuallyPeriodic, lo, hi):
    """Closed form of the parameter inside ``[lo, hi]``, if it is quadratic.

    The point with an eventually periodic itinerary is a rational function
    of ``lam``; clearing denominators gives a polynomial whose factors are
    searched for a root of degree at most two in the enclosure.
    """
    import sympy

    t = sympy.Symbol("lam", positive=True)
    y = sympy.Symbol("y")

    def inv(sym, v):
        return (v + 1) / t if sym == "0" else 1 - v / t

    expr = y
    for s in reversed(it.period):
        expr = inv(s, expr)
    fixed = sympy.solve(sympy.Eq(expr, y), y)[0]
    for s in reversed(it.preperiod):
        fixed = inv(s, fixed)
    num, _den = sympy.fraction(sympy.together((t - 1) / 2 - n - fixed))
    _, factors = sympy.factor_list(sympy.expand(num), t)
    for fac, _mult in factors:
        coeffs = [Fraction(int(c.p), int(c.q)) for c in sympy.Poly(fac, t).all_coeffs()]
        roots = []
        if len(coeffs) == 2:
            roots = [-coeffs[1] / coeffs[0]]
        elif len(coeffs) == 3:
            p, q, r = coeffs
            disc = q * q - 4 * p * r
            if disc >= 0:
                s = sqrt(disc)
                roots = [(-q + s) / (2 * p), (-q - s) / (2 * p)]
        for root in roots:
            if lo <= root <= hi and _orbit_follows(root, n, it):
                return root
    return None


def coded_point(lam, it: EventuallyPeriodic):
    """Exact point whose itinerary is ``it``.

    The period word acts by an affine contraction ``y -> alpha*y + beta``
    whose fixed point is then pulled back through the preperiod.
    """
    core = CodingCore(lam, (1 / lam, 2 / lam), (1 - 1 / lam, 1))
    beta = core.inverse_word(it.period, 0)
    alpha = core.inverse_word(it.period, 1) - beta
    return core.inverse_word(it.preperiod, beta / (1 - alpha))


def _orbit_follows(lam, n, it: EventuallyPeriodic) -> bool:
    return critical_value(lam, n) == coded_point(lam, it)


# -- Markov classification ---------------------------------------------------


@dataclass(frozen=True)
class MarkovCertificate:
    lam: ExactScalar
    orbit: tuple
    preperiod: int
    period: int
    verdict: str = "markov"

    def to_dict(self):
        return {"lambda": format_scalar(self.lam), "verdict": self.verdict,
                "orbit": [format_scalar(x) for x in self.orbit],
                "preperiod": self.preperiod, "period": self.period}


@dataclass(frozen=True)
class NonMarkovEvidence:
    """Heuristic only: a finite orbit cannot certify a non-Markov parameter."""

    lam: ExactScalar
    orbit: tuple
    itinerary: str
    block_lengths: tuple
    factor_counts: dict = field(default_factory=dict)
    verdict: str = "non_markov_evidence"

    def to_dict(self):
        return {"lambda": format_scalar(self.lam), "verdict": self.verdict,
                "heuristic": True, "itinerary": self.itinerary,
                "block_lengths": list(self.block_lengths),
                "factor_counts": {str(k): v for k, v in self.factor_counts.items()},
                "orbit_length": len(self.orbit)}


@dataclass(frozen=True)
class Unknown:
    lam: ExactScalar
    orbit: tuple
    verdict: str = "unknown"

    def to_dict(self):
        return {"lambda": format_scalar(self.lam), "verdict": self.verdict,
                "orbit": [format_scalar(x) for x in self.orbit]}


def critical_orbit(lam, depth: int) -> list:
    """Circle orbit of the local maximum ``b``: ``depth + 1`` exact points."""
    fam = make_F_lambda(lam)
    f = fam.lift.as_kind("circle")
    orbit = [fam.b]
    for _ in range(depth):
        orbit.append(f.evaluate(orbit[-1]))
    return orbit


def _block_lengths(word: str) -> list[int]:
    out = []
    for i, ch in enumerate(word):
        if i and ch == word[i - 1]:
            out[-1] += 1
        else:
            out.append(1)
    return out


def classify_markov(lam, depth: int = 64, evidence: bool = False):
    """Certify countable closure of the turning orbit by an exact repeat.

    Without a repeat the answer is :class:`Unknown`; with ``evidence`` set,
    an itinerary of the critical value whose blocks grow like the family of
    alternating ``n``/``n+1`` blocks is reported as
    :class:`NonMarkovEvidence` (a heuristic label).
    """
    lam = as_scalar(lam)
    orbit = critical_orbit(lam, depth)
    first = {}
    for i, x in enumerate(orbit):
        if x in first:
            j = first[x]
            return MarkovCertificate(lam, tuple(orbit[: i + 1]), j, i - j)
        first[x] = i
    if evidence:
        core = coding_core(lam)
        n = math.floor((lam - 1) / 2)
        word = core.itinerary_of(critical_value(lam, n), depth)
        blocks = _block_lengths(word)
        growing = len(blocks) >= 3 and word.startswith("0") and all(
            k + 1 <= ln <= k + 2 for k, ln in enumerate(blocks[:-1]))
        if growing:
            counts = {k: len({word[i:i + k] for i in range(len(word) - k + 1)})
                      for k in (1, 2, 4, 8) if k <= len(word)}
            return NonMarkovEvidence(lam, tuple(orbit), word, tuple(blocks), counts)
    return Unknown(lam, tuple(orbit))
