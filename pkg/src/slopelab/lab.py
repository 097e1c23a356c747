"""Good/bad interval subdivision, the hypothesis checker for the
non-existence of probability eigen-measures, and the mass-escape probe.

Everything runs on the lift, where the eigen-measure is periodic Lebesgue
and every quantity is exact.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass
from typing import Optional

from ._parallel import pmap
from .errors import HypothesisViolated
from .lifts import Certified, transitivity_check
from .maps import ONE, ZERO, Cell, PiecewiseAffineMap, is_constant_slope, iterate
from .measures import (INFINITE, StepDensityMeasure, eigen_residual, measure_of, power_step,
                       push_forward, uniform_probability)
from .numeric import ExactScalar, as_scalar, format_scalar, to_decimal

# -- subdivision ------------------------------------------------------------------


@dataclass(frozen=True)
class StageRow:
    stage: int
    count: int
    bad_measure: ExactScalar
    bound: ExactScalar
    ok: bool


@dataclass(frozen=True)
class SubdivisionStats:
    lam: ExactScalar
    delta: ExactScalar
    N: int
    window: int
    start: tuple  # the starting P^N-basic interval J
    rows: tuple

    @property
    def all_ok(self) -> bool:
        return all(r.ok for r in self.rows)

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["stage", "count", "bad_measure", "bound", "ok"])
        for r in self.rows:
            w.writerow([r.stage, r.count, format_scalar(r.bad_measure),
                        format_scalar(r.bound), str(r.ok).lower()])
        return buf.getvalue()

    def to_dict(self) -> dict:
        return {"lambda": format_scalar(self.lam), "delta": format_scalar(self.delta),
                "N": self.N, "window": self.window,
                "J": [format_scalar(x) for x in self.start],
                "stages": [{"stage": r.stage, "count": r.count,
                            "bad_measure": format_scalar(r.bad_measure),
                            "bound": format_scalar(r.bound), "ok": r.ok} for r in self.rows]}


def _partition_points(P, lo, hi) -> list:
    """Points of the periodic set ``P + Z`` inside the closed interval."""
    pts = []
    for q in P:
        for k in range(math.ceil(lo - q), math.floor(hi - q) + 1):
            pts.append(q + k)
    return sorted(pts)


def _check_subdivision_hypotheses(f, mu, P, delta, lam):
    if not lam > 2:
        raise HypothesisViolated("lambda > 2", format_scalar(lam))
    if eigen_residual(f, mu, lam) != 0:
        raise HypothesisViolated("T_f mu = lambda mu")
    pts = sorted(P) + [P[0] + 1] if f.kind != "interval" else sorted(P)
    for a, b in zip(pts, pts[1:]):
        m = measure_of(mu, (a, b))
        if not (delta <= m < INFINITE):
            raise HypothesisViolated("delta <= mu(I) < inf", f"({format_scalar(a)}, {format_scalar(b)})")


def _split_bad(F: PiecewiseAffineMap, mu, P, cell: Cell, delta) -> list[Cell]:
    """Children of a bad interval ``cell`` (law of ``f^k`` on it) in ``P^{k+1}``,
    with the laws of ``f^{k+1}``."""
    ylo, yhi = cell.image()
    inside = [q for q in _partition_points(P, ylo, yhi) if ylo < q < yhi]
    if len(inside) > 1:
        raise HypothesisViolated("an interval of measure < delta holds at most one point of P",
                                 f"image ({format_scalar(ylo)}, {format_scalar(yhi)})")
    cuts = sorted(cell.preimage(q) for q in inside)
    edges = [cell.lo] + cuts + [cell.hi]
    out = []
    for a, b in zip(edges, edges[1:]):
        outer = F.law_at(cell.at((a + b) / 2))
        out.append(Cell(a, b, outer.slope * cell.slope, outer.slope * cell.intercept + outer.intercept))
    return out


def _image_measure(mu, c: Cell):
    return measure_of(mu, c.image())


def basic_intervals(f: PiecewiseAffineMap, N: int) -> list[Cell]:
    """``P^N``-basic intervals of one period with the laws of ``f^N``."""
    return iterate(f, N).cells()


def run_subdivision(f: PiecewiseAffineMap, mu: StepDensityMeasure, P, delta, N: int,
                    stages: int, J: Optional[tuple] = None, lam=None) -> SubdivisionStats:
    """Track the bad intervals ``B_i`` below a starting ``P^N``-basic interval.

    ``M`` in ``B(P^{N+i})`` is bad when ``mu(f^{N+i}(M)) < delta``.  Rows are
    produced for stages ``0..stages``; each asserts ``#B_i <= 2^i``,
    ``#B_{i+1} <= 2 #B_i`` and
    ``sum mu(L) <= (2/lam)^i lam^-N delta``, exactly.  ``J`` defaults to the
    interval with the smallest image measure.
    """
    delta = as_scalar(delta)
    lam = as_scalar(lam) if lam is not None else is_constant_slope(f)
    P = [as_scalar(p) for p in P]
    _check_subdivision_hypotheses(f, mu, P, delta, lam)
    cells = basic_intervals(f, N)
    if J is None:
        start = min(cells, key=lambda c: (_image_measure(mu, c), c.lo))
    else:
        lo, hi = (as_scalar(x) for x in J)
        matches = [c for c in cells if c.lo == lo and c.hi == hi]
        if not matches:
            raise ValueError(f"({lo}, {hi}) is not a P^{N}-basic interval")
        start = matches[0]
    return _subdivide(f, mu, P, delta, N, stages, start, lam)


def _subdivide(f, mu, P, delta, N, stages, start: Cell, lam) -> SubdivisionStats:
    window = math.ceil((N + stages) * f.displacement_bound()) + 1
    bad = [start] if _image_measure(mu, start) < delta else []
    rows = []
    prev = None
    for i in range(stages + 1):
        if i > 0:
            children = [m for L in bad for m in _split_bad(f, mu, P, L, delta)]
            bad = [m for m in children if _image_measure(mu, m) < delta]
        for L in bad:
            if measure_of(mu, (L.lo, L.hi)) * lam ** (N + i) != _image_measure(mu, L):
                raise HypothesisViolated("mu(L) = lam^-(N+i) mu(f^(N+i) L)", (L.lo, L.hi))
        total = sum((measure_of(mu, (L.lo, L.hi)) for L in bad), ZERO)
        bound = (2 / lam) ** i * delta / lam ** N
        ok = len(bad) <= 2 ** i and total <= bound and (prev is None or len(bad) <= 2 * prev)
        rows.append(StageRow(i, len(bad), total, bound, ok))
        prev = len(bad)
    return SubdivisionStats(lam, delta, N, window, (start.lo, start.hi), tuple(rows))


def run_subdivision_all(f, mu, P, delta, N: int, stages: int, lam=None,
                        bad_only: bool = False) -> list[SubdivisionStats]:
    """One run per ``P^N``-basic interval of the fundamental period
    (only the initially bad ones with ``bad_only``)."""
    delta = as_scalar(delta)
    lam = as_scalar(lam) if lam is not None else is_constant_slope(f)
    P = [as_scalar(p) for p in P]
    _check_subdivision_hypotheses(f, mu, P, delta, lam)
    starts = [c for c in basic_intervals(f, N)
              if not bad_only or _image_measure(mu, c) < delta]
    return pmap(lambda c: _subdivide(f, mu, P, delta, N, stages, c, lam), starts)


# -- hypotheses for non-existence of a probability eigen-measure -------------------------


@dataclass(frozen=True)
class HypothesisItem:
    name: str
    passed: bool
    detail: str = ""


@dataclass(frozen=True)
class MaintReport:
    items: tuple
    conclusion: str

    @property
    def all_pass(self) -> bool:
        return all(i.passed for i in self.items)

    def item(self, name: str) -> HypothesisItem:
        return next(i for i in self.items if i.name == name)

    def to_dict(self) -> dict:
        return {"all_pass": self.all_pass, "conclusion": self.conclusion,
                "hypotheses": [{"name": i.name, "pass": i.passed, "detail": i.detail}
                               for i in self.items]}


CONCLUSION_ALL = ("no probability measure nu with T_f nu = lam nu exists, so f admits no "
                  "nondecreasing semiconjugacy to a map of constant slope lam")


def check_maint_hypotheses(f: PiecewiseAffineMap, mu: StepDensityMeasure, P, lam, delta) -> MaintReport:
    lam, delta = as_scalar(lam), as_scalar(delta)
    items = [HypothesisItem("lambda > 2", lam > 2, format_scalar(lam))]
    try:
        res = eigen_residual(f, mu, lam)
        items.append(HypothesisItem("T_f mu = lambda mu", res == 0, f"residual {format_scalar(res)}"))
    except Exception as exc:  # domain mismatches are a failed hypothesis here
        items.append(HypothesisItem("T_f mu = lambda mu", False, str(exc)))
    pts = sorted(as_scalar(p) for p in P)
    if f.kind != "interval":
        pts = pts + [pts[0] + 1]
    worst = None
    for a, b in zip(pts, pts[1:]):
        m = measure_of(mu, (a, b))
        if not (delta <= m < INFINITE):
            worst = f"mu(({format_scalar(a)}, {format_scalar(b)})) = {m}"
            break
    items.append(HypothesisItem("delta <= mu(I) < inf", worst is None, worst or "all basic intervals"))
    items.append(HypothesisItem("mu infinite", mu.total_mass() == INFINITE, mu.extent))
    if f.kind == "lift":
        try:
            cert = transitivity_check(f)
            ok = isinstance(cert, Certified)
            detail = ("lift transitive by the diagonal criterion; the conjugated map misses "
                      "only countably many points" if ok else cert.reason)
        except Exception as exc:
            ok, detail = False, str(exc)
    else:
        ok, detail = False, "no transitivity surrogate for interval maps"
    items.append(HypothesisItem("substantially transitive", ok, detail))
    report = MaintReport(tuple(items), "")
    concl = CONCLUSION_ALL if report.all_pass else "hypotheses not all satisfied; nothing concluded"
    return MaintReport(tuple(items), concl)


# -- mass escape ---------------------------------------------------------------------


@dataclass(frozen=True)
class MassSeries:
    window: tuple
    lam: ExactScalar
    masses: tuple
    route: str

    def strictly_decreasing(self, start: int = 0) -> bool:
        m = self.masses[start:]
        return all(a > b for a, b in zip(m, m[1:]))

    def to_csv(self, digits: int = 12) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["step", "mass", "mass_exact"])
        for i, m in enumerate(self.masses):
            w.writerow([i, to_decimal(m, digits), format_scalar(m)])
        return buf.getvalue()


def mass_escape_probe(f: PiecewiseAffineMap, K, lam, steps: int, route: Optional[str] = None) -> MassSeries:
    """Window masses of ``(lam^-1 T_f)^n nu`` clipped to the window each step.

    ``nu`` is uniform on ``[-K, K]`` for lifts and on ``[0, 1]`` for interval
    maps.  Since ``|f'| = lam`` cancels, the mass after ``n`` steps is the
    proportion of the window whose first ``n`` iterates stay inside it.
    ``route="push"`` computes the same numbers by pushing the uniform
    measure forward, which keeps the partitions small; ``"pull"`` applies
    the operator literally.
    """
    lam = as_scalar(lam)
    if f.kind == "interval":
        lo, hi = ZERO, ONE
    else:
        lo, hi = -as_scalar(K), as_scalar(K)
    route = route or ("push" if f.kind == "lift" else "pull")
    nu = uniform_probability(lo, hi)
    masses = [nu.period_mass()]
    for _ in range(steps):
        if route == "pull":
            nu, m = power_step(f, nu, lam, (lo, hi))
        elif route == "push":
            nu = push_forward(f, nu).clip(lo, hi)
            m = nu.period_mass()
        else:
            raise ValueError(f"unknown route {route!r}")
        masses.append(m)
    return MassSeries((lo, hi), lam, tuple(masses), route)
