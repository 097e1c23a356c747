"""Eigen-measures, Perron data and the nondecreasing semiconjugacy.

Given ``T_f mu = lam * mu`` for a probability step measure ``mu`` on
``[0, 1]``, the distribution function ``phi(x) = mu([0, x])`` semiconjugates
``f`` to a map ``g`` of constant slope ``lam``.  For finite Markov maps the
measure comes from the Perron eigenvector of the transition matrix.
"""

from __future__ import annotations

import bisect
import csv
import io
import math
from dataclasses import dataclass, field
from decimal import Decimal, localcontext
from fractions import Fraction
from typing import Optional, Sequence

from .errors import NotEigen, NotMarkov, NotProbability, ReducibleMatrix
from .maps import (ONE, ZERO, PiecewiseAffineMap, from_limits, is_constant_slope, iterate,
                   refine)
from .measures import StepDensityMeasure, eigen_residual, lebesgue
from .numeric import ExactScalar, as_scalar, format_scalar, sqrt, to_decimal

# -- transition matrices ------------------------------------------------------


@dataclass(frozen=True)
class TransitionMatrix:
    states: tuple  # ((lo, hi), ...) Markov intervals
    entries: tuple  # rows of nonnegative ints

    @property
    def size(self) -> int:
        return len(self.entries)

    def as_lists(self) -> list[list[int]]:
        return [list(r) for r in self.entries]


def transition_matrix(f: PiecewiseAffineMap, partition: Sequence) -> TransitionMatrix:
    """Covering counts ``(I, J)`` for the Markov intervals of ``partition``.

    The image of every endpoint (one-sided limits included) must be a
    partition point.
    """
    if f.kind != "interval":
        raise NotMarkov("transition matrices are built for interval maps")
    pts = sorted({as_scalar(p) for p in partition} | {ZERO, ONE})
    pset = set(pts)
    states = list(zip(pts, pts[1:]))
    cuts = sorted(set(pts) | set(f.breakpoints))
    rows = [[0] * len(states) for _ in states]
    for a, b in zip(cuts, cuts[1:]):
        c = f.law_at((a + b) / 2)
        ya, yb = c.at(a), c.at(b)
        for y in (ya, yb):
            if y not in pset:
                raise NotMarkov(f"image {format_scalar(y)} of an endpoint of ({a}, {b}) "
                                "is not a partition point")
        lo, hi = min(ya, yb), max(ya, yb)
        i = bisect.bisect_right(pts, a) - 1
        for j, (u, v) in enumerate(states):
            if lo <= u and v <= hi:
                rows[i][j] += 1
    return TransitionMatrix(tuple(states), tuple(tuple(r) for r in rows))


def strongly_connected_components(m) -> list[list[int]]:
    n = len(m)
    reach = []
    for s in range(n):
        seen = {s}
        stack = [s]
        while stack:
            u = stack.pop()
            for v in range(n):
                if m[u][v] and v not in seen:
                    seen.add(v)
                    stack.append(v)
        reach.append(seen)
    comps, assigned = [], set()
    for s in range(n):
        if s in assigned:
            continue
        comp = sorted(t for t in reach[s] if s in reach[t])
        assigned.update(comp)
        comps.append(comp)
    return comps


def _is_irreducible(m) -> bool:
    comps = strongly_connected_components(m)
    if len(comps) != 1:
        return False
    # a single state needs a loop to be irreducible
    return len(m) > 1 or m[0][0] > 0


# -- Perron root --------------------------------------------------------------


@dataclass(frozen=True)
class PerronResult:
    lower: Fraction
    upper: Fraction
    vector: tuple  # positive, sums to 1
    iterations: int

    @property
    def width(self) -> Fraction:
        return self.upper - self.lower

    def contains(self, x) -> bool:
        return self.lower <= x <= self.upper


def _round_positive(x: Fraction, bits: int) -> Fraction:
    scale = 1 << bits
    n = max(1, round(x * scale))
    return Fraction(n, scale)


def perron(matrix, tol=Fraction(1, 10**12), max_iter: int = 100_000) -> PerronResult:
    """Two-sided enclosure of the spectral radius of an irreducible matrix.

    Power iteration on ``M + I`` (primitive whenever ``M`` is irreducible);
    for any positive ``x`` the Collatz-Wielandt ratios
    ``min_i (Ax)_i/x_i <= rho(A) <= max_i (Ax)_i/x_i`` hold exactly, so the
    returned bounds are rigorous whatever the rounding of the iterates.
    """
    m = matrix.as_lists() if isinstance(matrix, TransitionMatrix) else [list(r) for r in matrix]
    n = len(m)
    if n == 0 or any(len(r) != n for r in m):
        raise ValueError("need a square matrix")
    if any(v < 0 for r in m for v in r):
        raise ValueError("entries must be nonnegative")
    if not _is_irreducible(m):
        raise ReducibleMatrix("matrix is reducible; Perron enclosure not guaranteed",
                              strongly_connected_components(m))
    tol = as_scalar(tol)
    bits = max(64, int(-math.log2(float(tol))) + 40) if tol > 0 else 64
    a = [[Fraction(m[i][j] + (i == j)) for j in range(n)] for i in range(n)]
    x = [Fraction(1)] * n
    lo = hi = None
    for it in range(1, max_iter + 1):
        y = [sum(a[i][j] * x[j] for j in range(n)) for i in range(n)]
        ratios = [y[i] / x[i] for i in range(n)]
        lo, hi = min(ratios) - 1, max(ratios) - 1
        if hi - lo <= tol:
            break
        top = max(y)
        x = [_round_positive(v / top, bits) for v in y]
    total = sum(x)
    return PerronResult(lo, hi, tuple(v / total for v in x), it)


def _charpoly_factors(m):
    import sympy

    t = sympy.Symbol("t")
    poly = sympy.Matrix(m).charpoly(t)
    _, factors = sympy.factor_list(poly.as_expr(), t)
    out = []
    for fac, _mult in factors:
        coeffs = [Fraction(int(c.p), int(c.q)) for c in sympy.Poly(fac, t).all_coeffs()]
        out.append(coeffs)
    return out


def exact_perron(matrix, enclosure: Optional[PerronResult] = None):
    """Exact Perron root and normalised eigenvector when the root has degree <= 2.

    Returns ``(lam, v)`` in Q or Q(sqrt d), or ``None`` when the minimal
    polynomial of the root has higher degree.
    """
    m = matrix.as_lists() if isinstance(matrix, TransitionMatrix) else [list(r) for r in matrix]
    enc = enclosure or perron(m)
    lam = None
    for coeffs in _charpoly_factors(m):
        roots = []
        if len(coeffs) == 2:
            roots = [-coeffs[1] / coeffs[0]]
        elif len(coeffs) == 3:
            a, b, c = coeffs
            disc = b * b - 4 * a * c
            if disc >= 0:
                r = sqrt(disc)
                roots = [(-b + r) / (2 * a), (-b - r) / (2 * a)]
        for r in roots:
            if enc.contains(r):
                lam = r
    if lam is None:
        return None
    n = len(m)
    shifted = [[Fraction(m[i][j]) - (lam if i == j else 0) for j in range(n)] for i in range(n)]
    v = null_vector(shifted)
    total = sum(v)
    v = [x / total for x in v]
    if any(x <= 0 for x in v):
        raise ValueError("Perron vector is not positive")
    return lam, tuple(v)


def null_vector(rows) -> list:
    """A nonzero kernel vector of an exact square matrix (Gauss-Jordan)."""
    a = [list(r) for r in rows]
    n_rows, n_cols = len(a), len(a[0])
    pivots = []
    r = 0
    for col in range(n_cols):
        piv = next((i for i in range(r, n_rows) if a[i][col] != 0), None)
        if piv is None:
            continue
        a[r], a[piv] = a[piv], a[r]
        inv = 1 / a[r][col]
        a[r] = [v * inv for v in a[r]]
        for i in range(n_rows):
            if i != r and a[i][col] != 0:
                fac = a[i][col]
                a[i] = [vi - fac * vr for vi, vr in zip(a[i], a[r])]
        pivots.append(col)
        r += 1
        if r == n_rows:
            break
    free = [c for c in range(n_cols) if c not in pivots]
    if not free:
        raise ValueError("matrix is nonsingular")
    fcol = free[0]
    v = [Fraction(0)] * n_cols
    v[fcol] = Fraction(1)
    for row, pc in enumerate(pivots):
        v[pc] = -a[row][fcol]
    return v


# -- eigen-measures -----------------------------------------------------------


def markov_eigen_measure(f: PiecewiseAffineMap, partition: Sequence, lam, v,
                         max_depth: int = 4) -> tuple[StepDensityMeasure, int]:
    """Step probability measure with ``T_f mu = lam mu`` built from Perron data.

    Depth ``n`` spreads ``mu(C) = lam^{-n} * v(f^n(C))`` uniformly over each
    ``n``-cylinder ``C``; the first depth whose measure is an exact
    eigenvector is returned.  The eigen-measure of a general Markov map is
    singular, in which case :class:`NotEigen` is raised.
    """
    lam = as_scalar(lam)
    pts = sorted({as_scalar(p) for p in partition} | {ZERO, ONE})
    states = list(zip(pts, pts[1:]))
    v = [as_scalar(x) for x in v]
    if len(v) != len(states):
        raise ValueError("one eigenvector entry per Markov interval")

    def mass_of_union(lo, hi):
        return sum((vj for (u, w), vj in zip(states, v) if lo <= u and w <= hi), ZERO)

    mu = StepDensityMeasure(tuple(pts), tuple(vj / (w - u) for (u, w), vj in zip(states, v)))
    if eigen_residual(f, mu, lam) == 0:
        return mu, 0
    fine = refine(f, pts)
    for depth in range(1, max_depth + 1):
        fn = iterate(fine, depth)
        dens = []
        for c in fn.cells():
            lo, hi = c.image()
            dens.append(mass_of_union(lo, hi) / lam**depth / (c.hi - c.lo))
        mu = StepDensityMeasure(fn.breakpoints, tuple(dens))
        if eigen_residual(f, mu, lam) == 0:
            return mu, depth
    raise NotEigen(f"no step eigen-measure up to depth {max_depth}; "
                   "the Perron measure of this map is not a step density")


# -- semiconjugacy ------------------------------------------------------------


@dataclass(frozen=True)
class Semiconjugacy:
    """``phi o f = g o phi`` with ``phi`` the distribution function of ``mu``."""

    grid: tuple  # refinement of [0, 1] on which phi is affine
    phi_values: tuple
    source: PiecewiseAffineMap
    factor: PiecewiseAffineMap
    lam: ExactScalar
    measure: StepDensityMeasure = field(repr=False)

    def phi(self, x) -> ExactScalar:
        x = as_scalar(x)
        i = bisect.bisect_right(self.grid, x) - 1
        if i >= len(self.grid) - 1:
            return self.phi_values[-1]
        x0, x1 = self.grid[i], self.grid[i + 1]
        y0, y1 = self.phi_values[i], self.phi_values[i + 1]
        return y0 + (y1 - y0) * (x - x0) / (x1 - x0)

    def is_identity(self) -> bool:
        return all(self.phi(x) == x for x in self.grid)


def _refinement_grid(f: PiecewiseAffineMap, mu: StepDensityMeasure) -> list:
    pts = set(f.breakpoints) | set(mu.grid_points_in(-1, 2)) | {ZERO, ONE}
    for c in f.cells():
        lo, hi = c.image()
        pts.update(c.preimage(q) for q in mu.grid_points_in(lo, hi))
    return sorted(p for p in pts if 0 <= p <= 1)


def build_semiconjugacy(f: PiecewiseAffineMap, mu: StepDensityMeasure, lam) -> Semiconjugacy:
    """Construct ``phi(x) = mu([0, x])`` and the factor ``g = phi o f o phi^{-1}``.

    On each cell of the common refinement where ``mu`` has density ``d > 0``
    the factor is affine with slope ``s * d' / d`` (``d'`` the density at the
    image), which equals ``+-lam`` exactly when ``mu`` is an eigenvector.
    Cells of density zero collapse to points; the choice of representative
    is checked to be irrelevant.
    """
    lam = as_scalar(lam)
    if f.kind != "interval" or mu.extent != "window":
        raise NotProbability("semiconjugacy is built for interval maps and window measures")
    if mu.support_range[0] > 0 or mu.support_range[1] < 1:
        mu = mu + StepDensityMeasure((ZERO, ONE), (ZERO,))
    if mu.total_mass() != 1 or measure_mass_outside(mu) != 0:
        raise NotProbability("measure must be a probability measure on [0, 1]")
    res = eigen_residual(f, mu, lam)
    if res != 0:
        raise NotEigen(f"T_f mu - lam mu has L1 norm {format_scalar(res)}")

    grid = _refinement_grid(f, mu)
    acc = [ZERO]
    for a, b in zip(grid, grid[1:]):
        acc.append(acc[-1] + (b - a) * mu.density_at(a))
    sc_grid, phi_vals = tuple(grid), tuple(acc)

    def phi(y):
        i = bisect.bisect_right(grid, y) - 1
        if i >= len(grid) - 1:
            return phi_vals[-1]
        return phi_vals[i] + (y - grid[i]) * mu.density_at(grid[i])

    bps, slopes, intercepts = [], [], []
    for i, (a, b) in enumerate(zip(grid, grid[1:])):
        c = f.law_at((a + b) / 2)
        d = mu.density_at(a)
        if d == 0:
            if phi(c.at(a)) != phi(c.at(b)):
                raise NotEigen(f"collapsed interval ({a}, {b}) has an image of positive measure")
            continue
        d_img = mu.density_at(min(c.at(a), c.at(b)))
        s = c.slope * d_img / d
        u0 = phi_vals[i]
        bps.append(u0)
        slopes.append(s)
        intercepts.append(phi(c.at(a)) - s * u0)
    bps.append(ONE)
    g = PiecewiseAffineMap("interval", tuple(bps), tuple(slopes), tuple(intercepts),
                           f.continuous)
    if eigen_residual(g, lebesgue(), lam) != 0:
        raise NotEigen("factor map does not satisfy T_g m = lam m")
    return Semiconjugacy(sc_grid, phi_vals, f, g, lam, mu)


def measure_mass_outside(mu: StepDensityMeasure) -> ExactScalar:
    return sum(((b - a) * d for a, b, d in mu.cells() if a >= 1 or b <= 0), ZERO)


def verify_commutation(sc: Semiconjugacy, points_per_cell: int = 3) -> list:
    """Points of the refinement grid where ``phi(f(x)) != g(phi(x))``.

    Interior sample points are checked on cells where ``phi`` increases;
    one-sided limits are compared at both ends of every cell.
    """
    bad = []
    f, g = sc.source, sc.factor
    for a, b in zip(sc.grid, sc.grid[1:]):
        c = f.law_at((a + b) / 2)
        if sc.phi(a) == sc.phi(b):
            if sc.phi(c.at(a)) != sc.phi(c.at(b)):
                bad.append((a, b))
            continue
        gc = g.law_at((sc.phi(a) + sc.phi(b)) / 2)
        samples = [a + (b - a) * Fraction(k, points_per_cell + 1)
                   for k in range(points_per_cell + 2)]
        for x in samples:
            # endpoints compare one-sided limits of both sides
            if sc.phi(c.at(x)) != gc.at(sc.phi(x)):
                bad.append(x)
    return bad


# -- entropy ------------------------------------------------------------------


@dataclass(frozen=True)
class EntropyValue:
    slope: ExactScalar
    symbolic: str
    caveat: str

    def decimal(self, digits: int = 6) -> str:
        with localcontext() as ctx:
            ctx.prec = digits + 30
            value = Decimal(to_decimal(self.slope, digits + 25)).ln()
            return str(value.quantize(Decimal(1).scaleb(-digits)))

    def meets_transitive_floor(self) -> bool:
        """``log lam >= log sqrt 2``, the lower bound for transitive interval maps."""
        return self.slope * self.slope >= 2


ENTROPY_CAVEAT = ("entropy equals log(slope) for constant-slope maps with finitely many "
                  "pieces; with countably many pieces this can fail")


def entropy_of_constant_slope(lam) -> EntropyValue:
    lam = as_scalar(lam)
    if lam < 1:
        raise ValueError("slope must be >= 1")
    return EntropyValue(lam, f"log({format_scalar(lam)})", ENTROPY_CAVEAT)


# -- CSV ----------------------------------------------------------------------


def eigenvector_csv(states, vector) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["state", "lo", "hi", "entry"])
    for i, ((lo, hi), x) in enumerate(zip(states, vector)):
        w.writerow([i, format_scalar(lo), format_scalar(hi), format_scalar(x)])
    return buf.getvalue()


def factor_table_csv(g: PiecewiseAffineMap) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["lo", "hi", "value_lo", "value_hi", "slope"])
    for c in g.cells():
        w.writerow([format_scalar(c.lo), format_scalar(c.hi), format_scalar(c.at(c.lo)),
                    format_scalar(c.at(c.hi)), format_scalar(c.slope)])
    return buf.getvalue()


__all__ = [
    "TransitionMatrix", "transition_matrix", "PerronResult", "perron", "exact_perron",
    "markov_eigen_measure", "Semiconjugacy", "build_semiconjugacy", "verify_commutation",
    "EntropyValue", "entropy_of_constant_slope", "is_constant_slope", "markov_map_from_matrix",
    "eigenvector_csv", "factor_table_csv", "null_vector", "strongly_connected_components",
]


def markov_map_from_matrix(matrix, partition: Sequence, orientation: Sequence | None = None,
                           perron_data=None) -> tuple[PiecewiseAffineMap, ExactScalar, tuple]:
    """A Markov map realising a 0/1 transition matrix with a step eigen-measure.

    State ``i`` is cut into one affine piece per covered state ``j`` with
    length ``|I_i| * v_j / (lam * v_i)``, so the Perron measure (uniform on
    each Markov interval with mass ``v_j``) is an exact eigenvector.
    ``orientation[i] = -1`` traverses the covered states in reverse.  The
    result is flagged continuous when the one-sided limits happen to agree.
    """
    m = [list(r) for r in matrix]
    if any(v not in (0, 1) for r in m for v in r):
        raise ValueError("entries must be 0 or 1")
    if perron_data is None:
        perron_data = exact_perron(m)
        if perron_data is None:
            raise ValueError("Perron root is not in a quadratic field")
    lam, v = perron_data
    pts = [as_scalar(p) for p in partition]
    states = list(zip(pts, pts[1:]))
    orientation = list(orientation or [1] * len(m))
    bps, pairs = [], []
    for i, (lo, hi) in enumerate(states):
        targets = [j for j in range(len(m)) if m[i][j]]
        if orientation[i] < 0:
            targets.reverse()
        x = lo
        for j in targets:
            ln = (hi - lo) * v[j] / (lam * v[i])
            a, b = states[j]
            bps.append(x)
            pairs.append((a, b) if orientation[i] > 0 else (b, a))
            x = x + ln
        if x != hi:
            raise ValueError("piece lengths do not fill the state")
    bps.append(pts[-1])
    f = from_limits("interval", bps, pairs, continuous=False)
    try:
        f = from_limits("interval", bps, pairs, continuous=True)
    except ValueError:
        pass
    return f, lam, tuple(v)
