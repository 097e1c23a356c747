"""Step-density measures and the induced operator T_f.

Every measure here is absolutely continuous with a density that is constant
on the cells of a finite partition:

``window``
    supported on ``[x_0, x_m]``; zero outside.
``periodic``
    one period ``[0, 1)`` repeated over the whole line (infinite total mass
    unless zero).
``circle``
    a finite measure on ``R/Z`` stored over ``[0, 1)``.

``apply_T`` pulls a measure back branch by branch:
``(T_f mu)(A) = sum_I mu(f(I & A))``; on a branch of slope ``s`` the new
density at ``x`` is ``density(f(x)) * |s|``.  The class is closed under this
operation for piecewise-affine ``f``, so every result is exact.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

from .errors import DomainMismatch, InfinitePerPeriod, NonSigmaFinite
from .maps import ONE, ZERO, Cell, PiecewiseAffineMap
from .numeric import ExactScalar, as_scalar, format_scalar, parse_scalar

EXTENTS = ("window", "periodic", "circle")
INFINITE = math.inf


@dataclass(frozen=True)
class StepDensityMeasure:
    breakpoints: tuple
    densities: tuple
    extent: str = "window"

    def __post_init__(self):
        if self.extent not in EXTENTS:
            raise ValueError(f"unknown extent {self.extent!r}")
        bp = tuple(as_scalar(p) for p in self.breakpoints)
        ds = tuple(as_scalar(d) for d in self.densities)
        object.__setattr__(self, "breakpoints", bp)
        object.__setattr__(self, "densities", ds)
        if any(a >= b for a, b in zip(bp, bp[1:])):
            raise ValueError("breakpoints must be strictly increasing")
        if any(d < 0 for d in ds):
            raise ValueError("densities must be nonnegative")
        if self.extent == "window":
            if len(bp) != len(ds) + 1:
                raise ValueError("window measure needs len(breakpoints) == len(densities) + 1")
        else:
            if not ds or len(bp) != len(ds) or bp[0] != 0 or bp[-1] >= 1:
                raise ValueError("periodic/circle measure needs breakpoints 0 = p_0 < ... < 1")

    # -- cells -------------------------------------------------------------
    def cells(self) -> list[tuple]:
        """``(lo, hi, density)`` over the window or the fundamental period."""
        bp = self.breakpoints
        if self.extent == "window":
            return [(bp[i], bp[i + 1], self.densities[i]) for i in range(len(self.densities))]
        ends = bp[1:] + (ONE,)
        return list(zip(bp, ends, self.densities))

    @property
    def support_range(self):
        if self.extent == "window":
            return self.breakpoints[0], self.breakpoints[-1]
        return -INFINITE, INFINITE

    def density_at(self, x) -> ExactScalar:
        """Density on the cell to the right of ``x``."""
        if self.extent != "window":
            x = x - math.floor(x)
        elif x < self.breakpoints[0] or x >= self.breakpoints[-1]:
            return ZERO
        lo, hi = 0, len(self.densities) - 1
        bp = self.breakpoints
        while lo < hi:
            mid = (lo + hi + 1) // 2
            if bp[mid] <= x:
                lo = mid
            else:
                hi = mid - 1
        return self.densities[lo]

    def grid_points_in(self, lo, hi) -> list:
        """Breakpoints (with integer translates if periodic) strictly inside ``(lo, hi)``."""
        if self.extent == "window":
            return [p for p in self.breakpoints if lo < p < hi]
        pts = []
        for q in self.breakpoints:
            for k in range(math.floor(lo - q) + 1, math.ceil(hi - q)):
                pts.append(q + k)
        pts.sort()
        return pts

    def period_mass(self) -> ExactScalar:
        return sum((hi - lo) * d for lo, hi, d in self.cells())

    def total_mass(self):
        m = self.period_mass()
        if self.extent == "periodic" and m != 0:
            return INFINITE
        return m

    def is_zero(self) -> bool:
        return all(d == 0 for d in self.densities)

    def cumulative(self, x) -> ExactScalar:
        """``mu([0, x))`` for periodic/circle extents (signed for x < 0),
        ``mu((-inf, x))`` for windows."""
        acc = ZERO
        if self.extent == "window":
            for lo, hi, d in self.cells():
                if x <= lo:
                    break
                acc += (min(x, hi) - lo) * d
            return acc
        k = math.floor(x)
        t = x - k
        for lo, hi, d in self.cells():
            if t <= lo:
                break
            acc += (min(t, hi) - lo) * d
        return k * self.period_mass() + acc

    # -- algebra -----------------------------------------------------------
    def scale(self, alpha) -> "StepDensityMeasure":
        alpha = as_scalar(alpha)
        if alpha < 0:
            raise ValueError("measures only scale by nonnegative numbers")
        return StepDensityMeasure(
            self.breakpoints, tuple(alpha * d for d in self.densities), self.extent
        )

    def __rmul__(self, alpha):
        return self.scale(alpha)

    def __add__(self, other: "StepDensityMeasure") -> "StepDensityMeasure":
        if not isinstance(other, StepDensityMeasure):
            return NotImplemented
        pieces = [(lo, hi, d1 + d2) for lo, hi, d1, d2 in common_refinement(self, other)]
        return _assemble(pieces, self.extent)

    def clip(self, lo, hi) -> "StepDensityMeasure":
        """Restriction to the window ``[lo, hi]`` (periodic measures are
        materialised there)."""
        lo, hi = as_scalar(lo), as_scalar(hi)
        pieces = []
        for a, b, d in _cells_over(self, lo, hi):
            pieces.append((a, b, d))
        return _window_from_pieces(pieces, lo, hi)

    def simplified(self) -> "StepDensityMeasure":
        """Merge neighbouring cells with equal density."""
        cells = self.cells()
        merged = [list(cells[0])]
        for lo, hi, d in cells[1:]:
            if d == merged[-1][2]:
                merged[-1][1] = hi
            else:
                merged.append([lo, hi, d])
        return _assemble([tuple(c) for c in merged], self.extent)

    def __repr__(self):
        return f"StepDensityMeasure({self.extent}, {len(self.densities)} cells)"


# -- constructors -------------------------------------------------------------


def lebesgue(extent: str = "window", lo=0, hi=1) -> StepDensityMeasure:
    if extent == "window":
        return StepDensityMeasure((as_scalar(lo), as_scalar(hi)), (ONE,), "window")
    return StepDensityMeasure((ZERO,), (ONE,), extent)


def uniform_probability(lo, hi) -> StepDensityMeasure:
    lo, hi = as_scalar(lo), as_scalar(hi)
    return StepDensityMeasure((lo, hi), (1 / (hi - lo),), "window")


def zero_measure(extent: str = "window", lo=0, hi=1) -> StepDensityMeasure:
    return lebesgue(extent, lo, hi).scale(0)


# -- internals ----------------------------------------------------------------


def _cells_over(mu: StepDensityMeasure, lo, hi) -> list[tuple]:
    """Cells of ``mu`` clipped to ``[lo, hi]``; zero density outside a window."""
    if mu.extent == "window":
        out = []
        a0, b0 = mu.support_range
        if lo < a0:
            out.append((lo, min(a0, hi), ZERO))
        for a, b, d in mu.cells():
            a, b = max(a, lo), min(b, hi)
            if a < b:
                out.append((a, b, d))
        if b0 < hi:
            out.append((max(b0, lo), hi, ZERO))
        return [c for c in out if c[0] < c[1]]
    out = []
    for k in range(math.floor(lo), math.ceil(hi)):
        for a, b, d in mu.cells():
            a, b = max(a + k, lo), min(b + k, hi)
            if a < b:
                out.append((a, b, d))
    return out


def _window_from_pieces(pieces, lo=None, hi=None) -> StepDensityMeasure:
    pieces = sorted(pieces, key=lambda c: c[0])
    if not pieces:
        lo = ZERO if lo is None else lo
        hi = lo + 1 if hi is None or hi <= lo else hi
        return StepDensityMeasure((lo, hi), (ZERO,), "window")
    bp = [pieces[0][0]]
    ds = []
    for a, b, d in pieces:
        if a != bp[-1]:
            if a < bp[-1]:
                raise ValueError("overlapping pieces")
            ds.append(ZERO)
            bp.append(a)
        ds.append(d)
        bp.append(b)
    return StepDensityMeasure(tuple(bp), tuple(ds), "window")


def _assemble(pieces, extent) -> StepDensityMeasure:
    if extent == "window":
        return _window_from_pieces(pieces)
    pieces = sorted(pieces, key=lambda c: c[0])
    return StepDensityMeasure(tuple(p[0] for p in pieces), tuple(p[2] for p in pieces), extent)


def common_refinement(mu: StepDensityMeasure, nu: StepDensityMeasure) -> list[tuple]:
    """``(lo, hi, d_mu, d_nu)`` over the union window or one period."""
    if mu.extent != nu.extent:
        raise DomainMismatch(f"cannot compare {mu.extent} and {nu.extent} measures")
    if mu.extent == "window":
        lo = min(mu.breakpoints[0], nu.breakpoints[0])
        hi = max(mu.breakpoints[-1], nu.breakpoints[-1])
    else:
        lo, hi = ZERO, ONE
    pts = sorted(set(mu.grid_points_in(lo, hi)) | set(nu.grid_points_in(lo, hi)) | {lo, hi})
    return [(a, b, mu.density_at(a), nu.density_at(a)) for a, b in zip(pts, pts[1:])]


def _sweep(pieces) -> list[tuple]:
    """Sum overlapping ``(lo, hi, density)`` pieces into disjoint cells."""
    pts = sorted({p for a, b, _ in pieces for p in (a, b)})
    index = {p: i for i, p in enumerate(pts)}
    delta = [ZERO] * len(pts)
    for a, b, d in pieces:
        delta[index[a]] += d
        delta[index[b]] -= d
    out, acc = [], ZERO
    for i in range(len(pts) - 1):
        acc += delta[i]
        out.append((pts[i], pts[i + 1], acc))
    return out


# -- operations ---------------------------------------------------------------


def measure_of(mu: StepDensityMeasure, interval) -> ExactScalar:
    """Exact ``mu((a, b))``; ``math.inf`` for unbounded periodic queries.

    Endpoints may be ``-math.inf``/``math.inf``.  For circle measures the
    interval is an arc of the line projected to ``R/Z``.
    """
    a, b = interval
    if a > b:
        raise ValueError("interval endpoints out of order")
    if mu.extent == "window":
        lo, hi = mu.support_range
        a = lo if a == -INFINITE else max(as_scalar(a), lo)
        b = hi if b == INFINITE else min(as_scalar(b), hi)
        if a >= b:
            return ZERO
        return mu.cumulative(b) - mu.cumulative(a)
    if a == -INFINITE or b == INFINITE:
        if mu.extent == "circle":
            return mu.period_mass()
        return ZERO if mu.is_zero() else INFINITE
    a, b = as_scalar(a), as_scalar(b)
    if mu.extent == "circle" and b - a >= 1:
        return mu.period_mass()
    return mu.cumulative(b) - mu.cumulative(a)


def _domain_cells(f: PiecewiseAffineMap, mu: StepDensityMeasure) -> tuple[list[Cell], str]:
    if f.kind == "interval":
        if mu.extent != "window":
            raise DomainMismatch("interval maps act on window measures")
        return f.cells(), "window"
    if mu.extent == "window":
        if f.kind != "lift":
            raise DomainMismatch("window measures on the line need a lift")
        a, b = mu.support_range
        m = f.displacement_bound() + 1
        return f.cells_between(math.floor(a - m), math.ceil(b + m)), "window"
    if (f.kind, mu.extent) not in (("lift", "periodic"), ("circle", "circle")):
        raise DomainMismatch(f"a {f.kind} map does not act on {mu.extent} measures")
    return f.cells(), mu.extent


def pullback_pieces(cells, mu: StepDensityMeasure) -> list[tuple]:
    """Cells of ``T_f mu`` over the given domain cells."""
    pieces = []
    for c in cells:
        ylo, yhi = c.image()
        if ylo in (-INFINITE,) or yhi in (INFINITE,):
            raise NonSigmaFinite("unbounded branch image")
        cuts = sorted(c.preimage(q) for q in mu.grid_points_in(ylo, yhi))
        edges = [c.lo] + cuts + [c.hi]
        s = abs(c.slope)
        for a, b in zip(edges, edges[1:]):
            y = c.at((a + b) / 2)
            pieces.append((a, b, mu.density_at(y) * s))
    return pieces


def apply_T(f: PiecewiseAffineMap, mu: StepDensityMeasure) -> StepDensityMeasure:
    """The induced operator ``T_f``; partition is ``P`` refined by ``f^{-1}`` of
    the measure's partition."""
    cells, extent = _domain_cells(f, mu)
    pieces = pullback_pieces(cells, mu)
    if extent == "window" and f.kind == "lift":
        # trim the zero margins added around the support
        while pieces and pieces[0][2] == 0:
            pieces.pop(0)
        while pieces and pieces[-1][2] == 0:
            pieces.pop()
        if not pieces:
            return zero_measure("window", *mu.support_range)
    return _assemble(pieces, extent)


def residual(mu: StepDensityMeasure, nu: StepDensityMeasure) -> ExactScalar:
    """L1 distance of the densities (one period for periodic/circle)."""
    return sum(((b - a) * abs(d1 - d2) for a, b, d1, d2 in common_refinement(mu, nu)), ZERO)


def eigen_residual(f: PiecewiseAffineMap, mu: StepDensityMeasure, lam) -> ExactScalar:
    """``|| T_f mu - lam * mu ||_1``; zero iff ``T_f mu = lam mu`` on the window."""
    lam = as_scalar(lam)
    if lam <= 0:
        raise ValueError("eigenvalue must be positive")
    return residual(apply_T(f, mu), mu.scale(lam))


def power_step(f: PiecewiseAffineMap, nu: StepDensityMeasure, lam, window=None):
    """``(lam^{-1} T_f nu`` clipped to ``window``, its mass``)``.

    ``window`` defaults to the support of ``nu`` (or ``[0, 1]`` for
    interval maps).
    """
    lam = as_scalar(lam)
    if window is None:
        window = nu.support_range if nu.extent == "window" else (ZERO, ONE)
    out = apply_T(f, nu).scale(1 / lam)
    if out.extent == "window":
        out = out.clip(*window)
    mass = out.period_mass() if out.extent != "periodic" else out.total_mass()
    return out, mass


def push_forward(f: PiecewiseAffineMap, rho: StepDensityMeasure) -> StepDensityMeasure:
    """Image measure ``f_* rho`` of a window measure (transfer operator).

    On a branch of slope ``s`` mass is carried with density divided by
    ``|s|``; overlapping images are summed.
    """
    if rho.extent != "window":
        raise DomainMismatch("push_forward takes a window measure")
    a, b = rho.support_range
    pieces = []
    for c in f.cells_between(a, b):
        for lo, hi, d in _cells_over(rho, c.lo, c.hi):
            if d == 0:
                continue
            y0, y1 = c.at(lo), c.at(hi)
            if y0 > y1:
                y0, y1 = y1, y0
            pieces.append((y0, y1, d / abs(c.slope)))
    if not pieces:
        return zero_measure("window", a, b)
    return _window_from_pieces(_sweep(pieces))


def push_to_circle(rho: StepDensityMeasure) -> StepDensityMeasure:
    """``pi_* rho``: circle density ``sum_k density(x + k)``."""
    if rho.extent == "circle":
        return rho
    if rho.extent == "periodic":
        if rho.is_zero():
            return StepDensityMeasure((ZERO,), (ZERO,), "circle")
        raise InfinitePerPeriod("a nonzero periodic measure has infinite mass per circle cell")
    pieces = []
    for a, b, d in rho.cells():
        for k in range(math.floor(a), math.ceil(b)):
            lo, hi = max(a, k), min(b, k + 1)
            if lo < hi:
                pieces.append((lo - k, hi - k, d))
    pieces.append((ZERO, ONE, ZERO))
    cells = _sweep(pieces)
    return StepDensityMeasure(tuple(c[0] for c in cells), tuple(c[2] for c in cells), "circle")


def circle_section(mu: StepDensityMeasure) -> StepDensityMeasure:
    """Place a circle measure on the fundamental domain ``[0, 1)`` of the line."""
    if mu.extent != "circle":
        raise DomainMismatch("circle_section takes a circle measure")
    return StepDensityMeasure(mu.breakpoints + (ONE,), mu.densities, "window")


# -- JSON ---------------------------------------------------------------------


def measure_to_json(mu: StepDensityMeasure) -> dict:
    return {
        "breakpoints": [format_scalar(p) for p in mu.breakpoints],
        "densities": [format_scalar(d) for d in mu.densities],
        "extent": mu.extent,
    }


def measure_from_json(data: dict) -> StepDensityMeasure:
    return StepDensityMeasure(
        tuple(parse_scalar(str(p)) for p in data["breakpoints"]),
        tuple(parse_scalar(str(d)) for d in data["densities"]),
        data.get("extent", "window"),
    )


def cells_to_rows(mu: StepDensityMeasure) -> list[tuple]:
    return [(format_scalar(a), format_scalar(b), format_scalar(d)) for a, b, d in mu.cells()]


def lift_window_for(f: PiecewiseAffineMap, steps: int, radius=None) -> Optional[int]:
    """Half-width ``K`` so that ``steps`` iterates from ``[-radius, radius]``
    stay inside ``[-K, K]``."""
    m = f.displacement_bound()
    r = ONE if radius is None else as_scalar(radius)
    return math.ceil(r + steps * m)
