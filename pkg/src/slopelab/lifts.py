"""Degree-one lifts: the ``F_lambda`` family, diagonal-crossing transitivity,
union-of-images coverage and measure transport between line, circle and
interval coordinates.

``F_lambda`` connects the dots ``(k, k - 1)`` and ``(k + b, k + c)`` with
``b = (lam + 1) / (2 lam)`` and ``c = (lam - 1) / 2``.  On ``[0, b]`` it is
``lam * x - 1`` and on ``[b, 1]`` it is ``lam * (1 - x)``.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from typing import Optional, Union

from .errors import BelowThreshold, DomainMismatch, NotConstantSlope, NotDegreeOne
from .maps import ONE, ZERO, LazyConjugatedMap, LogisticPoint, PiecewiseAffineMap, \
    from_dots, is_constant_slope
from .measures import StepDensityMeasure, circle_section, measure_of, push_to_circle
from .numeric import ExactScalar, as_scalar, format_scalar, surd

THRESHOLD = surd(2, 1, 5)


def meets_threshold(lam) -> bool:
    """``lam >= 2 + sqrt 5`` decided inside the field of ``lam``.

    Rewritten as ``lam - 2 >= 0`` and ``(lam - 2)^2 >= 5`` so that a
    parameter in any quadratic field can be compared.
    """
    x = as_scalar(lam) - 2
    return x >= 0 and x * x >= 5


@dataclass(frozen=True)
class LambdaFamilyMap:
    lam: ExactScalar
    b: ExactScalar
    c: ExactScalar
    lift: PiecewiseAffineMap
    relaxed: bool = False

    def gap(self) -> ExactScalar:
        """``F(b) - b - 1``; nonnegative exactly at or above the threshold."""
        return self.c - self.b - 1

    def __call__(self, x):
        return self.lift.evaluate(x)

    def invariants(self) -> dict:
        lam = self.lam
        return {
            "slopes": [format_scalar(s) for s in self.lift.slopes],
            "constant_slope": is_constant_slope(self.lift) == lam,
            "integer_dots": self.lift.evaluate(0) == -1,
            "gap": format_scalar(self.gap()),
            "gap_formula_holds": self.gap() == (lam * lam - 4 * lam - 1) / (2 * lam),
            "gap_nonnegative": self.gap() >= 0,
        }


def make_F_lambda(lam, relaxed: bool = False) -> LambdaFamilyMap:
    lam = as_scalar(lam)
    if not meets_threshold(lam):
        if not relaxed:
            raise BelowThreshold(f"lambda = {format_scalar(lam)} is below 2+sqrt(5)")
        warnings.warn(f"building F_lambda below the threshold (lambda = {format_scalar(lam)})",
                      stacklevel=2)
    if lam <= 1:
        raise BelowThreshold("lambda must exceed 1 for the dots to be ordered")
    b = (lam + 1) / (2 * lam)
    c = (lam - 1) / 2
    F = from_dots("lift", [ZERO, b], [-ONE, c])
    fam = LambdaFamilyMap(lam, b, c, F, relaxed)
    inv = fam.invariants()
    if not (inv["constant_slope"] and inv["integer_dots"] and inv["gap_formula_holds"]):
        raise AssertionError(f"family invariants fail: {inv}")
    if not relaxed and not inv["gap_nonnegative"]:
        raise AssertionError("gap is negative above the threshold")
    return fam


# -- diagonal-crossing criterion ----------------------------------------------


@dataclass(frozen=True)
class Lap:
    """A maximal monotone piece ``[lo, hi]`` of one period."""

    lo: ExactScalar
    hi: ExactScalar
    increasing: bool
    cells: tuple

    def displacement_range(self):
        vals = [c.at(x) - x for c in self.cells for x in (c.lo, c.hi)]
        return min(vals), max(vals)

    def solve(self, shift) -> Optional[ExactScalar]:
        """The point of the lap closure with ``F(x) = x + shift``, if any."""
        for c in self.cells:
            if c.slope == 1:
                continue
            x = (shift - c.intercept) / (c.slope - 1)
            if c.lo <= x <= c.hi:
                return x
        return None


@dataclass(frozen=True)
class LapWitness:
    lo: ExactScalar
    hi: ExactScalar
    increasing: bool
    x_L: ExactScalar  # F(x_L) = x_L - 1
    x_R: ExactScalar  # F(x_R) = x_R + 1

    def to_dict(self):
        return {"lap": [format_scalar(self.lo), format_scalar(self.hi)],
                "increasing": self.increasing,
                "x_L": format_scalar(self.x_L), "x_R": format_scalar(self.x_R)}


@dataclass(frozen=True)
class Certified:
    slope: ExactScalar
    witnesses: tuple
    pair: tuple  # (x_L, x_R) with 0 < x_R - x_L < 1
    verdict: str = "certified"

    def to_dict(self):
        return {"verdict": self.verdict, "slope": format_scalar(self.slope),
                "witnesses": [w.to_dict() for w in self.witnesses],
                "pair": [format_scalar(x) for x in self.pair]}


@dataclass(frozen=True)
class HypothesisFails:
    lap: int
    reason: str
    displacement: tuple  # (min, max) of F(x) - x on the lap
    verdict: str = "hypothesis_fails"

    def to_dict(self):
        return {"verdict": self.verdict, "lap": self.lap, "reason": self.reason,
                "displacement": [format_scalar(x) for x in self.displacement]}


def monotone_laps(F: PiecewiseAffineMap) -> list[Lap]:
    """Maximal monotone laps of one period, merging cells across continuous joins."""
    cells = F.cells()
    n = len(cells)

    def joins(i):
        # does cell i continue monotonically into cell i+1 (cyclically)?
        a = cells[i]
        b = F.cell_at((i + 1) % n, 1 if i + 1 == n else 0)
        same = (a.slope > 0) == (b.slope > 0)
        return same and a.at(a.hi) == b.at(b.lo)

    breaks = [i for i in range(n) if not joins(i)]
    if not breaks:
        return [Lap(ZERO, ONE, cells[0].slope > 0, tuple(cells))]
    start = (breaks[-1] + 1) % n
    laps, cur = [], []
    for step in range(n):
        i = (start + step) % n
        k = 1 if start + step >= n else 0
        cur.append(F.cell_at(i, k))
        if i in breaks:
            laps.append(Lap(cur[0].lo, cur[-1].hi, cur[0].slope > 0, tuple(cur)))
            cur = []
    return laps


def transitivity_check(F: PiecewiseAffineMap) -> Union[Certified, HypothesisFails]:
    """Diagonal-crossing criterion for transitivity of a constant-slope lift.

    Every lap must meet both diagonals ``y = x - 1`` and ``y = x + 1``.
    A failure says nothing about transitivity itself.
    """
    if F.kind != "lift":
        raise NotDegreeOne(f"expected a degree-one lift, got a {F.kind} map")
    lam = is_constant_slope(F)
    if lam is None:
        raise NotConstantSlope("the criterion needs a constant-slope lift")
    witnesses = []
    for idx, lap in enumerate(monotone_laps(F)):
        xl, xr = lap.solve(-1), lap.solve(1)
        if xl is None or xr is None:
            missing = "y = x - 1" if xl is None else "y = x + 1"
            return HypothesisFails(idx, f"lap does not cross {missing}", lap.displacement_range())
        witnesses.append(LapWitness(lap.lo, lap.hi, lap.increasing, xl, xr))
    if not lam > 2:
        raise AssertionError("a certified lift must have slope > 2")
    pair = _witness_pair(F, witnesses)
    return Certified(lam, tuple(witnesses), pair)


def _witness_pair(F, witnesses):
    """Closest ``x_L < x_R`` among all witnesses and their integer translates."""
    best = None
    for wl in witnesses:
        for wr in witnesses:
            k = math.floor(wr.x_R - wl.x_L)
            xl = wl.x_L + k if wl.x_L + k < wr.x_R else wl.x_L + k - 1
            if best is None or wr.x_R - xl < best[1] - best[0]:
                best = (xl, wr.x_R)
    xl, xr = best
    if not (0 < xr - xl < 1 and F.evaluate(xr) - F.evaluate(xl) > 2):
        raise AssertionError("witness pair violates x_R - x_L < 1 < F(x_R) - F(x_L) - 1")
    return best


def project_to_circle(F: PiecewiseAffineMap) -> PiecewiseAffineMap:
    if F.kind != "lift":
        raise NotDegreeOne("only degree-one lifts project to the circle")
    return F.as_kind("circle")


# -- union of images ----------------------------------------------------------


@dataclass(frozen=True)
class CoversLine:
    step: int
    component: tuple
    lengths: tuple  # total length of the union per step
    verdict: str = "covers_line"


@dataclass(frozen=True)
class Inconclusive:
    steps: int
    reason: str
    lengths: tuple = ()
    verdict: str = "inconclusive"


def image_of_open_interval(F: PiecewiseAffineMap, a, b) -> list[tuple]:
    """Open intervals whose union lies inside ``F((a, b))``.

    For continuous lifts the image is one interval; its open interior is
    returned.  Otherwise each open cell piece contributes its own image.
    """
    cells = F.cells_between(a, b)
    if F.continuous:
        vals = [c.at(x) for c in cells for x in (c.lo, c.hi)]
        return [(min(vals), max(vals))]
    return [c.image() for c in cells]


def merge_open(intervals) -> list[tuple]:
    """Union of open intervals; touching ends are kept apart (conservative)."""
    out = []
    for a, b in sorted(intervals):
        if out and a < out[-1][1]:
            if b > out[-1][1]:
                out[-1] = (out[-1][0], b)
        else:
            out.append((a, b))
    return out


def _contains_pair(component, pair) -> bool:
    lo, hi = component
    xl, xr = pair
    k = math.ceil(lo - xl)
    if xl + k == lo:
        k += 1
    return xr + k < hi


def images_cover(F: PiecewiseAffineMap, U, max_steps: int, cap: int = 256):
    """Iterate ``F^n(U)`` until a component holds a translate of the witness
    pair ``[x_L, x_R]``; from then on the images cover the line."""
    lo, hi = (as_scalar(u) for u in U)
    if not lo < hi:
        raise ValueError("U must be a nonempty open interval")
    cert = transitivity_check(F)
    if not isinstance(cert, Certified):
        return Inconclusive(0, "no diagonal witnesses")
    comps = [(lo, hi)]
    lengths = []
    for step in range(max_steps + 1):
        lengths.append(sum(b - a for a, b in comps))
        for comp in comps:
            if _contains_pair(comp, cert.pair):
                return CoversLine(step, comp, tuple(lengths))
        if step == max_steps:
            break
        images = [iv for a, b in comps for iv in image_of_open_interval(F, a, b)]
        comps = merge_open(images)
        if len(comps) > cap:
            return Inconclusive(step + 1, f"more than {cap} components", tuple(lengths))
    return Inconclusive(max_steps, "step budget exhausted", tuple(lengths))


# -- measure transport ----------------------------------------------------------


@dataclass(frozen=True)
class ConjugatedMeasure:
    """``(h^{-1})_* mu`` on ``(0, 1)``, kept in lift coordinates."""

    upstairs: StepDensityMeasure
    conj: Optional[LazyConjugatedMap] = field(default=None, compare=False)

    def measure_of(self, a: LogisticPoint, b: LogisticPoint):
        return measure_of(self.upstairs, (a.p, b.p))

    def basic_interval_values(self) -> set:
        """Masses of the basic intervals of ``g`` (one per lift cell class)."""
        if self.conj is None:
            raise ValueError("need the conjugated map to list its basic intervals")
        F = self.conj.upstairs
        return {measure_of(self.upstairs, (c.lo, c.hi)) for c in F.cells()}


DIRECTIONS = ("lift_to_circle", "circle_to_lift", "interval_to_lift", "lift_to_interval")


def transport_measure(direction: str, mu, conj: Optional[LazyConjugatedMap] = None):
    if direction == "lift_to_circle":
        return push_to_circle(mu)
    if direction == "circle_to_lift":
        return circle_section(mu)
    if direction == "lift_to_interval":
        return ConjugatedMeasure(mu, conj)
    if direction == "interval_to_lift":
        if not isinstance(mu, ConjugatedMeasure):
            raise DomainMismatch("interval-side measures are carried as ConjugatedMeasure")
        return mu.upstairs
    raise ValueError(f"unknown direction {direction!r}; expected one of {DIRECTIONS}")


def witnesses_csv(cert: Certified) -> str:
    rows = ["lap_lo,lap_hi,increasing,x_L,x_R"]
    for w in cert.witnesses:
        rows.append(",".join([format_scalar(w.lo), format_scalar(w.hi),
                              str(w.increasing).lower(), format_scalar(w.x_L),
                              format_scalar(w.x_R)]))
    return "\n".join(rows) + "\n"
