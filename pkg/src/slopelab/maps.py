"""Countably piecewise-affine maps, stored one fundamental period at a time.

A :class:`PiecewiseAffineMap` is one of

``interval``
    a map of ``[0, 1]``; breakpoints ``0 = p_0 < ... < p_n = 1`` and one
    affine law per basic interval ``(p_j, p_{j+1})``.
``lift``
    a degree-one lift ``F(x + 1) = F(x) + 1``; breakpoints
    ``0 = p_0 < ... < p_{n-1} < 1`` describe one period, branch ``j`` lives
    on ``(p_j, p_{j+1})`` with ``p_n = 1``, and the integer translates are
    implicit.
``circle``
    the projection of a lift to ``R/Z``; same data as the lift, values are
    reduced mod 1.

Laws are global: on ``(k + p_j, k + p_{j+1})`` a lift equals
``slope_j * (x - k) + intercept_j + k``.

Maps without the ``continuous`` flag are undefined on their breakpoints.
Breakpoints whose neighbouring laws agree are kept; admissible sets are not
required to be minimal.
"""

from __future__ import annotations

import bisect
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, NamedTuple, Optional, Sequence

from .errors import AtBreakpoint, DomainMismatch, OutOfDomain
from .numeric import ExactScalar, as_scalar, format_scalar, parse_scalar

KINDS = ("interval", "lift", "circle")

ZERO = Fraction(0)
ONE = Fraction(1)


class Cell(NamedTuple):
    """An open basic interval with the affine law ``slope*x + intercept``."""

    lo: ExactScalar
    hi: ExactScalar
    slope: ExactScalar
    intercept: ExactScalar

    def at(self, x):
        return self.slope * x + self.intercept

    def image(self):
        a, b = self.at(self.lo), self.at(self.hi)
        return (a, b) if a < b else (b, a)

    def preimage(self, y):
        return (y - self.intercept) / self.slope


@dataclass(frozen=True)
class PiecewiseAffineMap:
    kind: str
    breakpoints: tuple
    slopes: tuple
    intercepts: tuple
    continuous: bool = False

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown map kind {self.kind!r}")
        bp = tuple(as_scalar(p) for p in self.breakpoints)
        sl = tuple(as_scalar(s) for s in self.slopes)
        ic = tuple(as_scalar(t) for t in self.intercepts)
        object.__setattr__(self, "breakpoints", bp)
        object.__setattr__(self, "slopes", sl)
        object.__setattr__(self, "intercepts", ic)
        n = len(sl)
        if n == 0 or len(ic) != n:
            raise ValueError("need one slope and one intercept per branch")
        if bp[0] != 0:
            raise ValueError("the partition must start at 0")
        if self.kind == "interval":
            if len(bp) != n + 1 or bp[-1] != 1:
                raise ValueError("interval partition must be 0 = p_0 < ... < p_n = 1")
        elif len(bp) != n or bp[-1] >= 1:
            raise ValueError("lift partition must be 0 = p_0 < ... < p_{n-1} < 1")
        if any(a >= b for a, b in zip(bp, bp[1:])):
            raise ValueError("breakpoints must be strictly increasing")
        if any(s == 0 for s in sl):
            raise ValueError("branches must be strictly monotone (nonzero slope)")
        if self.kind == "interval":
            for c in self.cells():
                lo, hi = c.image()
                if lo < 0 or hi > 1:
                    raise OutOfDomain(f"branch on ({c.lo}, {c.hi}) leaves [0, 1]")
        if self.continuous and not self._limits_agree():
            raise ValueError("continuous flag set but one-sided limits disagree")

    # -- structure ---------------------------------------------------------
    @property
    def n_branches(self) -> int:
        return len(self.slopes)

    @property
    def is_lift_like(self) -> bool:
        return self.kind != "interval"

    def _hi(self, j):
        if j + 1 < len(self.breakpoints):
            return self.breakpoints[j + 1]
        return ONE

    def cells(self) -> list[Cell]:
        """Basic intervals of the fundamental domain with their laws."""
        return [
            Cell(self.breakpoints[j], self._hi(j), self.slopes[j], self.intercepts[j])
            for j in range(self.n_branches)
        ]

    def cell_at(self, j: int, k: int = 0) -> Cell:
        """Branch ``j`` translated by the integer ``k`` (lifts only)."""
        s, t = self.slopes[j], self.intercepts[j]
        lo, hi = self.breakpoints[j], self._hi(j)
        if k == 0:
            return Cell(lo, hi, s, t)
        return Cell(lo + k, hi + k, s, t + k - s * k)

    def cells_between(self, lo, hi) -> list[Cell]:
        """Cells meeting ``(lo, hi)``, clipped to it."""
        lo, hi = as_scalar(lo), as_scalar(hi)
        out = []
        if self.kind == "interval":
            for c in self.cells():
                a, b = max(c.lo, lo), min(c.hi, hi)
                if a < b:
                    out.append(Cell(a, b, c.slope, c.intercept))
            return out
        for k in range(math.floor(lo), math.ceil(hi)):
            for j in range(self.n_branches):
                c = self.cell_at(j, k)
                a, b = max(c.lo, lo), min(c.hi, hi)
                if a < b:
                    out.append(Cell(a, b, c.slope, c.intercept))
        return out

    def _locate(self, x):
        """``(j, k, on_breakpoint)`` for ``x``: branch index, period shift."""
        x = as_scalar(x)
        if self.kind == "interval":
            if x < 0 or x > 1:
                raise OutOfDomain(f"{x} is outside [0, 1]")
            k, t = 0, x
        else:
            k = math.floor(x)
            t = x - k
        i = bisect.bisect_right(self.breakpoints, t) - 1
        on_bp = self.breakpoints[i] == t or (self.kind == "interval" and t == 1)
        if self.kind == "interval" and t == 1:
            i = self.n_branches - 1
        return i, k, on_bp

    def law_at(self, x) -> Cell:
        """The (translated) cell whose open interior contains ``x``."""
        j, k, on_bp = self._locate(x)
        if on_bp:
            raise AtBreakpoint(f"{x} is a partition point")
        return self.cell_at(j, k)

    def left_limit(self, x):
        x = as_scalar(x)
        j, k, on_bp = self._locate(x)
        if on_bp and not (self.kind == "interval" and x == 1):
            if self.kind == "interval":
                if j == 0:
                    raise OutOfDomain("no left limit at 0")
                j -= 1
            else:
                j -= 1
                if j < 0:
                    j, k = self.n_branches - 1, k - 1
        return self.cell_at(j, k).at(x)

    def right_limit(self, x):
        x = as_scalar(x)
        if self.kind == "interval" and x == 1:
            raise OutOfDomain("no right limit at 1")
        j, k, _ = self._locate(x)
        return self.cell_at(j, k).at(x)

    def _limits_agree(self) -> bool:
        pts = self.breakpoints[1:-1] if self.kind == "interval" else self.breakpoints
        return all(self.left_limit(p) == self.right_limit(p) for p in pts)

    # -- evaluation --------------------------------------------------------
    def evaluate(self, x):
        """Exact value; at breakpoints only for continuous maps."""
        x = as_scalar(x)
        j, k, on_bp = self._locate(x)
        if on_bp:
            if not self.continuous:
                raise AtBreakpoint(f"{x} is a partition point of a class-C map")
            y = self.left_limit(x) if (self.kind == "interval" and x == 1) else self.right_limit(x)
        else:
            y = self.cell_at(j, k).at(x)
        if self.kind == "circle":
            y = y - math.floor(y)
        return y

    __call__ = evaluate

    def lift_value(self, x):
        """Value of the underlying lift (circle maps are not reduced)."""
        if self.kind == "circle":
            return self.as_kind("lift").evaluate(x)
        return self.evaluate(x)

    def as_kind(self, kind: str) -> "PiecewiseAffineMap":
        if kind == self.kind:
            return self
        if "interval" in (kind, self.kind):
            raise DomainMismatch("cannot convert between interval maps and lifts")
        return PiecewiseAffineMap(
            kind, self.breakpoints, self.slopes, self.intercepts, self.continuous
        )

    def displacement_bound(self):
        """``max |F(x) - x|`` over the closure of the fundamental domain."""
        best = ZERO
        for c in self.cells():
            for x in (c.lo, c.hi):
                best = max(best, abs(c.at(x) - x))
        return best

    def __repr__(self):
        bp = ", ".join(format_scalar(p) for p in self.breakpoints)
        return f"PiecewiseAffineMap({self.kind}, [{bp}], {self.n_branches} branches)"


# -- construction -------------------------------------------------------------


def from_dots(kind: str, breakpoints: Sequence, values: Sequence) -> PiecewiseAffineMap:
    """Connect-the-dots continuous map through ``(p_i, values_i)``.

    For lifts the closing dot ``(1, values_0 + 1)`` is implied.
    """
    bp = [as_scalar(p) for p in breakpoints]
    vs = [as_scalar(v) for v in values]
    if len(bp) != len(vs):
        raise ValueError("need one value per breakpoint")
    if kind != "interval":
        bp = bp + [ONE]
        vs = vs + [vs[0] + 1]
    slopes, intercepts = [], []
    for (x0, y0), (x1, y1) in zip(zip(bp, vs), zip(bp[1:], vs[1:])):
        s = (y1 - y0) / (x1 - x0)
        slopes.append(s)
        intercepts.append(y0 - s * x0)
    if kind != "interval":
        bp = bp[:-1]
    return PiecewiseAffineMap(kind, tuple(bp), tuple(slopes), tuple(intercepts), True)


def from_limits(kind: str, breakpoints: Sequence, pairs: Sequence, continuous=False):
    """Map given by per-branch endpoint values ``[(left end, right end), ...]``."""
    bp = [as_scalar(p) for p in breakpoints]
    ends = bp[1:] + ([] if kind == "interval" else [ONE])
    if len(pairs) != len(ends):
        raise ValueError("need one (left, right) pair per branch")
    slopes, intercepts = [], []
    for x0, x1, (y0, y1) in zip(bp, ends, pairs):
        y0, y1 = as_scalar(y0), as_scalar(y1)
        s = (y1 - y0) / (x1 - x0)
        slopes.append(s)
        intercepts.append(y0 - s * x0)
    return PiecewiseAffineMap(kind, tuple(bp), tuple(slopes), tuple(intercepts), continuous)


def identity(kind: str = "interval") -> PiecewiseAffineMap:
    bp = (ZERO, ONE) if kind == "interval" else (ZERO,)
    return PiecewiseAffineMap(kind, bp, (ONE,), (ZERO,), True)


def refine(f: PiecewiseAffineMap, points: Iterable) -> PiecewiseAffineMap:
    """Same map with extra (removable) breakpoints inserted."""
    extra = set()
    for p in points:
        p = as_scalar(p)
        if f.kind != "interval":
            p = p - math.floor(p)
        elif not 0 <= p <= 1:
            raise OutOfDomain(f"{p} is outside [0, 1]")
        extra.add(p)
    bp = sorted(set(f.breakpoints) | extra)
    slopes, intercepts = [], []
    n = len(bp) - 1 if f.kind == "interval" else len(bp)
    for j in range(n):
        lo = bp[j]
        hi = bp[j + 1] if j + 1 < len(bp) else ONE
        c = f.law_at((lo + hi) / 2)
        slopes.append(c.slope)
        intercepts.append(c.intercept)
    return PiecewiseAffineMap(f.kind, tuple(bp), tuple(slopes), tuple(intercepts), f.continuous)


# -- algebra ------------------------------------------------------------------


def _grid_points_in(g: PiecewiseAffineMap, lo, hi) -> list:
    """Partition points of ``g`` (with translates for lifts) strictly inside ``(lo, hi)``."""
    if g.kind == "interval":
        return [q for q in g.breakpoints if lo < q < hi]
    pts = []
    for q in g.breakpoints:
        k0 = math.floor(lo - q) + 1
        k1 = math.ceil(hi - q) - 1
        pts.extend(q + k for k in range(k0, k1 + 1))
    pts.sort()
    return pts


def compose(f: PiecewiseAffineMap, g: PiecewiseAffineMap) -> PiecewiseAffineMap:
    """``g o f`` (apply ``f`` first) on the partition ``P u f^{-1}(Q)``."""
    if (f.kind == "interval") != (g.kind == "interval"):
        raise DomainMismatch(f"cannot compose a {f.kind} map with a {g.kind} map")
    glift = g.as_kind("lift") if g.kind == "circle" else g
    bps, slopes, intercepts = [], [], []
    for c in f.cells():
        ylo, yhi = c.image()
        cuts = [c.preimage(q) for q in _grid_points_in(glift, ylo, yhi)]
        cuts.sort()
        edges = [c.lo] + cuts + [c.hi]
        for a, b in zip(edges, edges[1:]):
            inner = glift.law_at(c.at((a + b) / 2))
            bps.append(a)
            slopes.append(inner.slope * c.slope)
            intercepts.append(inner.slope * c.intercept + inner.intercept)
    if f.kind == "interval":
        bps.append(ONE)
    return PiecewiseAffineMap(
        f.kind, tuple(bps), tuple(slopes), tuple(intercepts), f.continuous and g.continuous
    )


def iterate(f: PiecewiseAffineMap, n: int) -> PiecewiseAffineMap:
    """``f^n`` with partition ``P u f^{-1}(P) u ... u f^{-(n-1)}(P)``."""
    if n < 1:
        raise ValueError("n must be >= 1")
    out = f
    for _ in range(n - 1):
        out = compose(out, f)
    return out


def is_constant_slope(f: PiecewiseAffineMap) -> Optional[ExactScalar]:
    """The common ``|slope|`` of all branches, or ``None``."""
    lam = abs(f.slopes[0])
    if all(abs(s) == lam for s in f.slopes):
        return lam
    return None


# -- JSON ---------------------------------------------------------------------


def map_to_json(f: PiecewiseAffineMap) -> dict:
    """Serialise with the ``breakpoints``/``values`` schema.

    Continuous maps store one dot ordinate per breakpoint (plus the closing
    dot at 1 for interval maps).  Class-C maps store a
    ``[left end, right end]`` pair per branch.
    """
    bp = list(f.breakpoints)
    if f.continuous:
        if f.kind == "interval":
            vals = [f.right_limit(p) for p in bp[:-1]] + [f.left_limit(ONE)]
        else:
            vals = [f.cell_at(j).at(bp[j]) for j in range(f.n_branches)]
        values = [format_scalar(v) for v in vals]
    else:
        values = [[format_scalar(c.at(c.lo)), format_scalar(c.at(c.hi))] for c in f.cells()]
    return {
        "kind": f.kind,
        "breakpoints": [format_scalar(p) for p in bp],
        "values": values,
        "continuous": f.continuous,
    }


def map_from_json(data: dict) -> PiecewiseAffineMap:
    kind = data["kind"]
    bp = [parse_scalar(str(p)) for p in data["breakpoints"]]
    if data.get("continuous", True):
        return from_dots(kind, bp, [parse_scalar(str(v)) for v in data["values"]])
    pairs = [(parse_scalar(str(a)), parse_scalar(str(b))) for a, b in data["values"]]
    if kind == "interval":
        bp = bp if bp[-1] == 1 else bp + [ONE]
    return from_limits(kind, bp, pairs, continuous=False)


# -- the conjugated interval map ----------------------------------------------


@dataclass(frozen=True, order=False)
class LogisticPoint:
    """The point ``h^{-1}(p) = e^p / (1 + e^p)`` of ``(0, 1)``, kept as ``p``.

    ``p = -inf`` / ``+inf`` stand for the adjoined fixed points 0 and 1.
    Ordering and equality are those of ``p`` since ``h^{-1}`` is increasing.
    """

    p: object

    def __lt__(self, other):
        return _ext_lt(self.p, other.p)

    def __le__(self, other):
        return self == other or self < other

    def __float__(self):
        if self.p == math.inf:
            return 1.0
        if self.p == -math.inf:
            return 0.0
        return _logistic(float(self.p))

    def __str__(self):
        if self.p in (math.inf, -math.inf):
            return "1" if self.p > 0 else "0"
        return f"hinv({format_scalar(self.p)})"


def _ext_lt(a, b):
    if a == b:
        return False
    if a == -math.inf or b == math.inf:
        return True
    if a == math.inf or b == -math.inf:
        return False
    return a < b


def _logistic(t: float) -> float:
    if t >= 0:
        return 1.0 / (1.0 + math.exp(-t))
    e = math.exp(t)
    return e / (1.0 + e)


def _logit(y: float) -> float:
    return math.log(y / (1.0 - y))


@dataclass(frozen=True)
class LazyConjugatedMap:
    """``g = h^{-1} o F o h`` on ``[0, 1]`` with ``h(y) = ln(y / (1 - y))``.

    ``g`` has countably many breakpoints accumulating at 0 and 1, so it is
    never materialised.  Every exact query is answered upstairs through
    :class:`LogisticPoint`; the float helpers exist for plotting only.
    """

    upstairs: PiecewiseAffineMap

    def __post_init__(self):
        if self.upstairs.kind != "lift":
            raise DomainMismatch("the conjugated map needs a degree-one lift")

    def evaluate(self, pt: LogisticPoint) -> LogisticPoint:
        if pt.p in (math.inf, -math.inf):
            return pt
        return LogisticPoint(self.upstairs.evaluate(pt.p))

    def admissible_points(self, k_min: int, k_max: int) -> list[LogisticPoint]:
        """``h^{-1}(P_F)`` for periods ``k_min..k_max``, plus 0 and 1."""
        pts = [LogisticPoint(-math.inf)]
        for k in range(k_min, k_max + 1):
            pts.extend(LogisticPoint(p + k) for p in self.upstairs.breakpoints)
        pts.append(LogisticPoint(math.inf))
        return pts

    def basic_interval(self, j: int, k: int = 0) -> tuple[LogisticPoint, LogisticPoint]:
        c = self.upstairs.cell_at(j, k)
        return LogisticPoint(c.lo), LogisticPoint(c.hi)

    def basic_interval_measures(self) -> set:
        """Values of ``(h^{-1})_* m`` on ``P_g``-basic intervals (finitely many)."""
        return {c.hi - c.lo for c in self.upstairs.cells()}

    def evaluate_float(self, y: float) -> float:
        if y <= 0.0 or y >= 1.0:
            return min(max(y, 0.0), 1.0)
        return _logistic(float(self.upstairs.evaluate(Fraction(_logit(y)))))
