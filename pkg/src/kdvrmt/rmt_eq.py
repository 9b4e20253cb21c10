"""Equilibrium measures for the two-parameter quartic field family.

The external field is

    V_{x,t}(s) = e^x [ (1-t) s^2/2 + t (s^4/20 - 4 s^3/15 + s^2/5 + 8 s/5) ],

its equilibrium measure minimizes the logarithmic energy among unit
probability measures.  This module carries the three explicit one-cut
families (Gaussian line t=0, the x=0 segment 0 < t <= 1, and the
symmetric line t=9), a generic one-cut endpoint solver, variational
condition verification with a log-kernel quadrature, singularity
classification, and the (x,t) phase-diagram sweep.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field as dc_field
import numpy as np
from scipy.integrate import quad

from .core import RootConfig, gauss_jacobi_rule, newton_solve
from .errors import ConvergenceError, DomainError, NotOneCutError

__all__ = [
    "X_STAR",
    "QuarticField",
    "EquilibriumMeasure",
    "SingularityReport",
    "field_eval",
    "field_coeffs",
    "measure_gaussian",
    "measure_line_t",
    "measure_t9",
    "t9_halfwidth",
    "t9_offset",
    "log_potential",
    "variational_residual",
    "solve_onecut_endpoints",
    "make_onecut_measure",
    "classify",
    "rmt_phase_diagram",
]

# boundary of the one-cut regime on the symmetric line t = 9
X_STAR = -math.log(245.0 / 9.0)


@dataclass(frozen=True)
class QuarticField:
    """Parameters (x, t) of the quartic field family."""

    x: float
    t: float


def field_coeffs(f: QuarticField) -> np.ndarray:
    """Ascending polynomial coefficients of V_{x,t}."""
    ex = math.exp(f.x)
    t = f.t
    return np.array(
        [0.0, 8.0 * t / 5.0, (1.0 - t) / 2.0 + t / 5.0, -4.0 * t / 15.0, t / 20.0]
    ) * ex


def field_eval(f: QuarticField, s) -> tuple:
    """(V, V', V'') of the quartic field at s, by exact polynomial arithmetic."""
    c = field_coeffs(f)
    c1 = np.polynomial.polynomial.polyder(c)
    c2 = np.polynomial.polynomial.polyder(c, 2)
    pv = np.polynomial.polynomial.polyval
    return pv(s, c), pv(s, c1), pv(s, c2)


@dataclass(frozen=True)
class EquilibriumMeasure:
    """One-cut (or, in principle, multi-cut) equilibrium measure.

    density(s) = (1/2 pi) sqrt((s-a)(b-s)) * h(s) on each interval, with h
    stored as ascending polynomial coefficients; ``ell`` is the Lagrange
    constant of the variational equality.
    """

    intervals: tuple
    h_coeffs: np.ndarray
    ell: float
    label: str = ""

    @property
    def support(self) -> tuple:
        return self.intervals[0]

    def h(self, s):
        return np.polynomial.polynomial.polyval(s, self.h_coeffs)

    def density(self, s):
        a, b = self.support
        s = np.asarray(s, dtype=float)
        inside = (s >= a) & (s <= b)
        out = np.zeros_like(s, dtype=float)
        rad = np.where(inside, (s - a) * (b - s), 0.0)
        out = np.where(inside, np.sqrt(rad) * self.h(s) / (2.0 * math.pi), 0.0)
        return out if out.ndim else float(out)

    def mass(self) -> float:
        a, b = self.support
        w = 0.5 * (b - a)
        rule = gauss_jacobi_rule(24, 0.5, 0.5)
        s = 0.5 * (a + b) + w * rule.nodes
        return w * w * float(np.dot(rule.weights, self.h(s))) / (2.0 * math.pi)


@dataclass(frozen=True)
class SingularityReport:
    """Outcome of the singularity classification at one (x, t)."""

    kind: str  # none | exterior_I | interior_II | edge_III
    location: float
    margin: float
    ambiguous: bool = False
    margins: dict = dc_field(default_factory=dict)


def _lagrange_constant(intervals, h_coeffs, vfun) -> float:
    a, b = intervals[0]
    mid = 0.5 * (a + b)
    mu = EquilibriumMeasure(intervals=intervals, h_coeffs=h_coeffs, ell=0.0)
    return 2.0 * log_potential(mu, mid) - float(vfun(mid))


def measure_gaussian(x: float) -> EquilibriumMeasure:
    """Semicircle for the rescaled Gaussian line t = 0.

    Support [-2 e^{-x/2}, 2 e^{-x/2}], density (e^x / 2 pi) sqrt(4 e^{-x} - s^2).
    """
    half = 2.0 * math.exp(-x / 2.0)
    intervals = ((-half, half),)
    h_coeffs = np.array([math.exp(x)])
    f = QuarticField(x=x, t=0.0)
    ell = _lagrange_constant(intervals, h_coeffs, lambda s: field_eval(f, s)[0])
    return EquilibriumMeasure(intervals=intervals, h_coeffs=h_coeffs, ell=ell, label=f"gaussian(x={x})")


def measure_line_t(t: float) -> EquilibriumMeasure:
    """Explicit measure on the segment x = 0, 0 < t <= 1.

    density = sqrt(4 - s^2) ((s-2)^2 + g^2) / (2 pi (5 + g^2)) on [-2, 2]
    with g = sqrt(5/t - 5).  The radicand is taken as 4 - s^2, the sign
    that is real and positive on the stated support and gives unit mass
    exactly; at t = 1 the factor ((s-2)^2) makes the density vanish to
    order 5/2 at s = 2.
    """
    if not 0.0 < t <= 1.0:
        raise DomainError("measure_line_t needs 0 < t <= 1")
    g2 = 5.0 / t - 5.0
    denom = 5.0 + g2
    h_coeffs = np.array([(4.0 + g2) / denom, -4.0 / denom, 1.0 / denom])
    intervals = ((-2.0, 2.0),)
    f = QuarticField(x=0.0, t=t)
    ell = _lagrange_constant(intervals, h_coeffs, lambda s: field_eval(f, s)[0])
    return EquilibriumMeasure(intervals=intervals, h_coeffs=h_coeffs, ell=ell, label=f"line(t={t})")


def t9_halfwidth(x: float) -> float:
    """Half-width b of the support on the symmetric line t = 9."""
    inner = 27.0 * math.exp(x) + 245.0 * math.exp(2.0 * x)
    return math.sqrt(
        140.0 / 27.0 + (4.0 / 27.0) * math.sqrt(5.0) * math.exp(-x) * math.sqrt(inner)
    )


def t9_offset(x: float) -> float:
    """The constant C in the t = 9 density factor ((s - 4/3)^2 + C)."""
    b = t9_halfwidth(x)
    return math.exp(-x) / (36.0 * b * b) * (80.0 - 9.0 * b**4 * math.exp(x))


def measure_t9(x: float) -> EquilibriumMeasure:
    """Explicit one-cut measure on the symmetric line t = 9 for x <= x*.

    Support [4/3 - b, 4/3 + b]; density
    8 / (pi b^2 (b^2 + 4C)) sqrt(...) ((s - 4/3)^2 + C).  For x > x* the
    field is no longer one-cut and this formula is invalid.
    """
    if x > X_STAR + 1e-12:
        raise DomainError(
            f"measure_t9 is valid only for x <= x* = {X_STAR:.6f} (one-cut regime)"
        )
    b = t9_halfwidth(x)
    c_off = t9_offset(x)
    s_star = 4.0 / 3.0
    pref = 16.0 / (b * b * (b * b + 4.0 * c_off))
    # h(s) = pref ((s - s*)^2 + C) in ascending coefficients
    h_coeffs = pref * np.array([s_star**2 + c_off, -2.0 * s_star, 1.0])
    intervals = ((s_star - b, s_star + b),)
    f = QuarticField(x=x, t=9.0)
    ell = _lagrange_constant(intervals, h_coeffs, lambda s: field_eval(f, s)[0])
    return EquilibriumMeasure(intervals=intervals, h_coeffs=h_coeffs, ell=ell, label=f"t9(x={x})")


def log_potential(mu: EquilibriumMeasure, s: float) -> float:
    """int log|s - y| dmu(y) with splitting at the interior singularity."""
    s = float(s)
    total = 0.0
    for a, b in mu.intervals:
        fun = lambda y: mu.density(y) * math.log(abs(s - y))
        if a < s < b:
            va, _ = quad(fun, a, s, epsabs=1e-12, epsrel=1e-12, limit=300)
            vb, _ = quad(fun, s, b, epsabs=1e-12, epsrel=1e-12, limit=300)
            total += va + vb
        else:
            v, _ = quad(fun, a, b, epsabs=1e-12, epsrel=1e-12, limit=300)
            total += v
    return total


def _default_probes(mu: EquilibriumMeasure, f: QuarticField | None = None):
    a, b = mu.support
    w = b - a
    pad = 0.04 * w
    interior = 0.5 * (a + b) + 0.5 * (w - 2 * pad) * np.cos(
        np.pi * (2 * np.arange(1, 22) - 1) / 42.0
    )
    # the inequality can only saturate near wells of the field, so the
    # exterior scan must reach past every real critical point of V (a
    # single-well candidate measure looks locally valid otherwise)
    lo, hi = a - 2.0 * w, b + 2.0 * w
    if f is not None:
        vp = np.polynomial.polynomial.polyder(field_coeffs(f))
        roots = np.roots(vp[::-1]) if len(vp) > 1 else np.array([])
        real = roots[np.abs(roots.imag) < 1e-9].real
        if real.size:
            lo = min(lo, float(np.min(real)) - 0.5 * w)
            hi = max(hi, float(np.max(real)) + 0.5 * w)
    grid = np.linspace(lo, hi, 33)
    exterior = grid[(grid < a - 0.05 * w) | (grid > b + 0.05 * w)]
    return interior, exterior


def variational_residual(
    mu: EquilibriumMeasure, f: QuarticField, probe_grid=None
) -> tuple[float, float]:
    """Check the equality/inequality pair defining the minimizer.

    Returns (eq_residual, ineq_margin): the max deviation of
    2 int log|s-y| dmu - V(s) from a constant on support probes, and the
    minimum of (ell - lhs) over exterior probes (negative = violation).
    """
    if probe_grid is None:
        interior, exterior = _default_probes(mu, f)
    else:
        probe_grid = np.asarray(probe_grid, dtype=float)
        a, b = mu.support
        interior = probe_grid[(probe_grid > a) & (probe_grid < b)]
        exterior = probe_grid[(probe_grid <= a) | (probe_grid >= b)]
    lhs_int = np.array(
        [2.0 * log_potential(mu, s) - float(field_eval(f, s)[0]) for s in interior]
    )
    ell_hat = float(np.mean(lhs_int))
    eq_residual = float(np.max(np.abs(lhs_int - ell_hat))) if lhs_int.size else math.nan
    if exterior.size:
        lhs_ext = np.array(
            [2.0 * log_potential(mu, s) - float(field_eval(f, s)[0]) for s in exterior]
        )
        ineq_margin = float(np.min(ell_hat - lhs_ext))
    else:
        ineq_margin = math.inf
    return eq_residual, ineq_margin


_CHEB_N = 16


def _cheb_nodes():
    i = np.arange(1, _CHEB_N + 1)
    return np.cos((2.0 * i - 1.0) * math.pi / (2.0 * _CHEB_N))


def _endpoint_conditions(f: QuarticField, c: float, w: float) -> np.ndarray:
    """Moment conditions pinning a one-cut support [c-w, c+w].

    mean over the arcsine measure of V' must vanish, and of s V' must
    equal 2; both means are exact Chebyshev-Gauss sums for polynomial V.
    """
    nodes = c + w * _cheb_nodes()
    _, vp, _ = field_eval(f, nodes)
    return np.array([float(np.mean(vp)), float(np.mean(nodes * vp)) - 2.0])


def _build_h(f: QuarticField, a: float, b: float) -> np.ndarray:
    """h(s) = (1/pi) int (V'(s)-V'(y))/((s-y) sqrt((y-a)(b-y))) dy, exactly.

    For polynomial V' the difference quotient expands in powers of s with
    moment coefficients; arcsine moments come from exact Chebyshev sums.
    """
    c = 0.5 * (a + b)
    w = 0.5 * (b - a)
    nodes = c + w * _cheb_nodes()
    vp_coeffs = np.polynomial.polynomial.polyder(field_coeffs(f))
    deg = len(vp_coeffs) - 1
    moments = [float(np.mean(nodes**p)) for p in range(deg + 1)]
    h = np.zeros(deg)
    for d in range(1, deg + 1):
        for i in range(d):
            h[i] += vp_coeffs[d] * moments[d - 1 - i]
    return h


def solve_onecut_endpoints(f: QuarticField, seed: tuple | None = None) -> tuple[float, float]:
    """Support endpoints (a, b) of the one-cut equilibrium measure.

    Newton on (center, log half-width) with a coarse grid-scan seed; the
    result is cross-checked by rebuilding the density and verifying unit
    mass and nonnegativity.

    Raises
    ------
    NotOneCutError
        If no one-cut solution exists (negative density or mass failure).
    """
    def fun(p):
        return _endpoint_conditions(f, p[0], math.exp(p[1]))

    def validate(c, w):
        a, b = c - w, c + w
        h = _build_h(f, a, b)
        rule = gauss_jacobi_rule(24, 0.5, 0.5)
        s = c + w * rule.nodes
        mass = w * w * float(
            np.dot(rule.weights, np.polynomial.polynomial.polyval(s, h))
        ) / (2.0 * math.pi)
        if abs(mass - 1.0) > 1e-8:
            raise NotOneCutError(f"rebuilt density has mass {mass:.6f}, not 1")
        dense = c + w * np.cos(np.linspace(0.0, math.pi, 801))
        h_vals = np.polynomial.polynomial.polyval(dense, h)
        if np.min(h_vals) < -1e-10 * max(1.0, float(np.max(np.abs(h_vals)))):
            raise NotOneCutError("rebuilt density is negative inside the support")
        return a, b

    if seed is not None:
        a0, b0 = seed
        candidates = [(0.5 * (a0 + b0), math.log(0.5 * (b0 - a0)))]
    else:
        # the conditions can have several basins (notably for near-symmetric
        # two-well fields), so rank a scan grid and try the best few
        scored = []
        for c in np.linspace(-4.0, 4.0, 65):
            for lw in np.linspace(math.log(0.05), math.log(8.0), 65):
                r = _endpoint_conditions(f, c, math.exp(lw))
                scored.append((abs(r[0]) + abs(r[1]), c, lw))
        scored.sort(key=lambda row: row[0])
        candidates = [(c, lw) for _, c, lw in scored[:8]]

    box = (np.array([-50.0, math.log(1e-3)]), np.array([50.0, math.log(50.0)]))
    last_error: Exception | None = None
    for c0, lw0 in candidates:
        try:
            res = newton_solve(
                fun,
                np.array([c0, lw0]),
                RootConfig(abs_tol=1e-12, max_iter=80, bracket=box),
            )
            c, w = float(res.x[0]), math.exp(float(res.x[1]))
            return validate(c, w)
        except (ConvergenceError, NotOneCutError) as exc:
            last_error = exc
    raise NotOneCutError(
        "no valid one-cut endpoint solution found"
    ) from last_error


def make_onecut_measure(f: QuarticField, seed: tuple | None = None) -> EquilibriumMeasure:
    """Solve the endpoints and assemble the full one-cut measure."""
    a, b = solve_onecut_endpoints(f, seed=seed)
    h = _build_h(f, a, b)
    ell = _lagrange_constant(((a, b),), h, lambda s: field_eval(f, s)[0])
    return EquilibriumMeasure(intervals=((a, b),), h_coeffs=h, ell=ell, label=f"onecut(x={f.x},t={f.t})")


def classify(
    mu: EquilibriumMeasure, f: QuarticField, tol: float = 1e-6, check_exterior: bool = True
) -> SingularityReport:
    """Singularity type of the measure/field pair.

    exterior_I: the variational inequality saturates at an exterior point;
    interior_II: h vanishes strictly inside the support;
    edge_III: h vanishes at an endpoint.  Margins are normalized by the
    peak of |h| on the support; ties report the smaller margin and set
    the ambiguity flag.
    """
    a, b = mu.support
    w = b - a
    dense = np.linspace(a, b, 2001)
    h_vals = np.asarray(mu.h(dense), dtype=float)
    h_scale = float(np.max(np.abs(h_vals)))
    h_norm = h_vals / h_scale
    edge_margin = float(min(h_norm[0], h_norm[-1]))
    edge_loc = a if h_norm[0] <= h_norm[-1] else b
    inner = slice(20, -20)
    i_min = int(np.argmin(h_norm[inner])) + 20
    interior_margin = float(h_norm[i_min])
    interior_loc = float(dense[i_min])

    margins = {
        "interior_II": interior_margin,
        "edge_III": edge_margin,
    }
    locations = {"interior_II": interior_loc, "edge_III": edge_loc}
    if check_exterior:
        _, ineq_margin = variational_residual(mu, f)
        margins["exterior_I"] = ineq_margin
        _, ext_grid = _default_probes(mu, f)
        ell_hat = 2.0 * log_potential(mu, 0.5 * (a + b)) - float(
            field_eval(f, 0.5 * (a + b))[0]
        )
        lhs = np.array(
            [2.0 * log_potential(mu, s) - float(field_eval(f, s)[0]) for s in ext_grid]
        )
        locations["exterior_I"] = float(ext_grid[np.argmax(lhs)])

    triggered = {k: m for k, m in margins.items() if m < tol}
    if not triggered:
        worst = min(margins, key=margins.get)
        return SingularityReport(
            kind="none", location=locations[worst], margin=margins[worst], margins=margins
        )
    kind = min(triggered, key=triggered.get)
    return SingularityReport(
        kind=kind,
        location=locations[kind],
        margin=margins[kind],
        ambiguous=len(triggered) > 1,
        margins=margins,
    )


def rmt_phase_diagram(x_grid, t_grid, classify_tol: float = 1e-6) -> list[dict]:
    """One-cut classification sweep over an (x, t) grid.

    Solver failures are recorded per cell (class ``failed``) and never
    abort the sweep; the margin column carries the normalized interior
    minimum of h, whose sign change locates the breaking curve.
    """
    rows = []
    for t in np.asarray(t_grid, dtype=float):
        seed = None
        for x in np.asarray(x_grid, dtype=float):
            f = QuarticField(x=float(x), t=float(t))
            row = {"x": float(x), "t": float(t), "class": "failed", "margin": math.nan, "error": ""}
            try:
                mu = make_onecut_measure(f, seed=seed)
                seed = mu.support
                rep = classify(mu, f, tol=classify_tol)
                row["class"] = rep.kind
                row["margin"] = min(rep.margins.values())
            except (NotOneCutError, ConvergenceError, DomainError) as exc:
                row["error"] = str(exc)
                seed = None
            rows.append(row)
    return rows
