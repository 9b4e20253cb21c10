"""Recurrence coefficients and partition functions for e^{-N V} weights.

``compute_recurrence`` runs a discretized Stieltjes procedure on a
composite Gauss-Legendre discretization of the weight, carried out
entirely in extended precision (mpmath).  Fixed double precision loses
orthogonality for these strongly varying weights well before n = 64,
which is why the inner loop never touches float64; results are rounded
only on the way out.

The asymptotic side evaluates the regular one-cut limits, the interior
(Hastings-McLeod) and edge (fourth-order profile) critical formulas, and
the conjectured exterior-point train, and ``compare_asymptotics`` builds
the numeric-vs-formula error tables.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, Sequence

import mpmath as mp
import numpy as np
from scipy.integrate import quad
from scipy.special import roots_legendre

from . import painleve, rmt_eq
from .core import sech2_train
from .errors import DomainError, PrecisionError
from .rmt_eq import QuarticField, X_STAR, field_coeffs

__all__ = [
    "RecurrenceTable",
    "PartitionValue",
    "InteriorCriticalData",
    "compute_recurrence",
    "partition_log",
    "asym_onecut",
    "asym_interior",
    "asym_edge",
    "conjectured_exterior",
    "ConjecturedExteriorResult",
    "interior_critical_data_t9",
    "compare_asymptotics",
    "EDGE_C",
    "EDGE_C1",
    "EDGE_C2",
]

# constants of the edge double-scaling formulas
EDGE_C = 6.0 ** (2.0 / 7.0)
EDGE_C1 = 6.0 ** (-1.0 / 7.0)
EDGE_C2 = 2.0 * 6.0 ** (-3.0 / 7.0)

DESK_N_MAX = 64


@dataclass(frozen=True)
class RecurrenceTable:
    """Recurrence data gamma_1..gamma_n, beta_0..beta_n, kappa_0..kappa_n.

    ``log_kappa`` carries the leading coefficients in log form so the
    partition function stays accurate when the kappas span many decades.
    """

    N: int
    v_coeffs: np.ndarray
    gamma: np.ndarray
    beta: np.ndarray
    kappa: np.ndarray
    log_kappa: np.ndarray
    n_nodes: int
    dps: int

    @property
    def n_max(self) -> int:
        return self.gamma.size


@dataclass(frozen=True)
class PartitionValue:
    n: int
    logZ: float


def _as_poly(v) -> np.ndarray:
    if isinstance(v, QuarticField):
        return field_coeffs(v)
    arr = np.asarray(v, dtype=float)
    if arr.ndim != 1 or arr.size < 3:
        raise DomainError("V must be a QuarticField or ascending coefficients")
    if arr.size % 2 == 0 or arr[-1] <= 0.0:
        raise DomainError("V must have even degree and positive leading coefficient")
    return arr


@lru_cache(maxsize=8)
def _mp_legendre_rule(n: int, dps: int):
    """Gauss-Legendre nodes/weights to ``dps`` digits (Newton-refined)."""
    x0, _ = roots_legendre(n)
    with mp.workdps(dps + 10):
        nodes, weights = [], []
        for xs in x0:
            x = mp.mpf(float(xs))
            for _ in range(4):
                p0, p1 = mp.mpf(1), x
                for k in range(2, n + 1):
                    p0, p1 = p1, ((2 * k - 1) * x * p1 - (k - 1) * p0) / k
                dp = n * (x * p1 - p0) / (x * x - 1)
                x = x - p1 / dp
            p0, p1 = mp.mpf(1), x
            for k in range(2, n + 1):
                p0, p1 = p1, ((2 * k - 1) * x * p1 - (k - 1) * p0) / k
            dp = n * (x * p1 - p0) / (x * x - 1)
            nodes.append(x)
            weights.append(2 / ((1 - x * x) * dp * dp))
    return tuple(nodes), tuple(weights)


def _truncation_radius(coeffs: np.ndarray, n_weight: int) -> tuple[float, float]:
    """Radius R with N (V(+-R) - V_min) >= 230 nats (tail mass << 1e-30)."""
    pv = np.polynomial.polynomial.polyval
    grid = np.linspace(-30.0, 30.0, 4001)
    vmin = float(np.min(pv(grid, coeffs)))
    r = 2.0
    while r < 64.0:
        if (
            n_weight * (float(pv(r, coeffs)) - vmin) >= 230.0
            and n_weight * (float(pv(-r, coeffs)) - vmin) >= 230.0
        ):
            return r, vmin
        r *= 1.25
    raise DomainError("weight tail does not decay within the desk-scale window")


def compute_recurrence(
    v,
    n_weight: int,
    n_max: int,
    dps: int = 60,
    nodes_per_panel: int = 48,
    n_panels: int | None = None,
) -> RecurrenceTable:
    """Discretized Stieltjes run for the weight exp(-N V) on the line.

    The weight is truncated where its tail mass is below 1e-30, covered
    by a composite Gauss-Legendre rule, and the three-term recurrence is
    generated by the Stieltjes inner products in ``dps``-digit
    arithmetic.  Loss of positivity in gamma_n^2 raises PrecisionError
    naming the failing index.
    """
    coeffs = _as_poly(v)
    n_weight = int(n_weight)
    n_max = int(n_max)
    if n_max < 1:
        raise DomainError("n_max must be >= 1")
    if n_max > DESK_N_MAX:
        raise DomainError(
            f"n_max = {n_max} beyond the desk cap {DESK_N_MAX}; raise dps and "
            "the cap explicitly if you really need this"
        )
    radius, vmin = _truncation_radius(coeffs, n_weight)
    if n_panels is None:
        n_panels = max(10, int(math.ceil(2.0 * radius)))

    with mp.workdps(dps):
        c_mp = [mp.mpf(float(ci)) for ci in coeffs]

        def v_mp(x):
            acc = mp.mpf(0)
            for ci in reversed(c_mp):
                acc = acc * x + ci
            return acc

        base_nodes, base_weights = _mp_legendre_rule(nodes_per_panel, dps)
        edges = [mp.mpf(-radius) + 2 * mp.mpf(radius) * j / n_panels for j in range(n_panels + 1)]
        xs, ws = [], []
        vshift = mp.mpf(vmin)
        for j in range(n_panels):
            mid = (edges[j] + edges[j + 1]) / 2
            half = (edges[j + 1] - edges[j]) / 2
            for xb, wb in zip(base_nodes, base_weights):
                x = mid + half * xb
                xs.append(x)
                ws.append(half * wb * mp.e ** (-n_weight * (v_mp(x) - vshift)))

        n_nodes = len(xs)
        # Stieltjes loop on the discrete measure sum w_i delta(x_i)
        m0 = mp.fsum(ws)
        p_prev = [mp.mpf(0)] * n_nodes
        p_cur = [1 / mp.sqrt(m0)] * n_nodes
        # the weight was rescaled by e^{-N vshift}; the leading
        # coefficients of the unshifted weight gain e^{+N vshift / 2}
        log_kappa = [-mp.log(m0) / 2 + mp.mpf(n_weight) * vshift / 2]
        gammas: list = []
        betas: list = []
        for k in range(n_max + 1):
            beta_k = mp.fsum(w * x * p * p for w, x, p in zip(ws, xs, p_cur))
            betas.append(beta_k)
            if k == n_max:
                break
            gam_prev = gammas[-1] if gammas else mp.mpf(0)
            t_vec = [
                (x - beta_k) * p - gam_prev * pm
                for x, p, pm in zip(xs, p_cur, p_prev)
            ]
            norm2 = mp.fsum(w * t * t for w, t in zip(ws, t_vec))
            if norm2 <= 0:
                raise PrecisionError(
                    f"orthogonality lost at n = {k + 1}; raise dps above {dps}",
                    failing_index=k + 1,
                )
            gam = mp.sqrt(norm2)
            gammas.append(gam)
            log_kappa.append(log_kappa[-1] - mp.log(gam))
            p_prev = p_cur
            p_cur = [t / gam for t in t_vec]

        gamma_f = np.array([float(g) for g in gammas])
        beta_f = np.array([float(b) for b in betas])
        log_kappa_f = np.array([float(lk) for lk in log_kappa])
    kappa_f = np.exp(log_kappa_f)
    if np.any(gamma_f <= 0.0):
        raise PrecisionError("nonpositive gamma after rounding", failing_index=int(np.argmax(gamma_f <= 0)))
    return RecurrenceTable(
        N=n_weight,
        v_coeffs=coeffs,
        gamma=gamma_f,
        beta=beta_f,
        kappa=kappa_f,
        log_kappa=log_kappa_f,
        n_nodes=n_nodes,
        dps=dps,
    )


def partition_log(table: RecurrenceTable, n: int) -> PartitionValue:
    """log Z_n = log n! - 2 sum_{j<n} log kappa_j (log-Vandermonde identity)."""
    if not 1 <= n <= table.n_max + 1:
        raise DomainError("n outside the computed table")
    log_z = math.lgamma(n + 1) - 2.0 * float(np.sum(table.log_kappa[:n]))
    return PartitionValue(n=n, logZ=log_z)


def asym_onecut(a: float, b: float) -> tuple[float, float]:
    """Regular one-cut limits ((b-a)/4, (b+a)/2) of (gamma_n, beta_n)."""
    return (b - a) / 4.0, (b + a) / 2.0


@dataclass(frozen=True)
class InteriorCriticalData:
    """Data of an interior (type ii) singular point needed by the formulas.

    ``big_c`` is the density coefficient in
    psi(s) = C sqrt((s-a)(b-s)) (s - s*)^2, ``omega`` the leading-order
    phase integral int_0^b psi(s) ds.
    """

    a: float
    b: float
    s_star: float
    big_c: float
    x_star: float
    omega: float


def interior_critical_data_t9() -> InteriorCriticalData:
    """Critical data of the symmetric-line interior singular point."""
    mu = rmt_eq.measure_t9(X_STAR)
    a, b = mu.support
    big_c = float(mu.h_coeffs[2]) / (2.0 * math.pi)
    omega, _ = quad(lambda s: float(mu.density(s)), 0.0, b, epsabs=1e-12, epsrel=1e-12, limit=200)
    return InteriorCriticalData(
        a=a, b=b, s_star=4.0 / 3.0, big_c=big_c, x_star=X_STAR, omega=omega
    )


def asym_interior(
    x: float, n: int, crit: InteriorCriticalData, hm_grid=None
) -> tuple[float, float]:
    """Interior-critical expansion of (gamma_n, beta_n) at parameter x.

    The envelope is the Hastings-McLeod solution evaluated at
    s_{x,n} = n^{2/3} (e^{x*-x} - 1) / (c sqrt((s*-a)(b-s*))); the modulation
    phase uses the leading-order omega, so the formula is meaningful for
    x - x* = O(n^{-2/3}) and a warning flags arguments far outside it.
    """
    a, b, s_star = crit.a, crit.b, crit.s_star
    cross = math.sqrt((s_star - a) * (b - s_star))
    ratio = (b + a) / (b - a)
    if abs(ratio) > 1.0:
        raise DomainError("endpoint ratio outside [-1, 1]; invalid critical data")
    theta_rm = math.asin(ratio)
    c = (math.pi * crit.big_c * cross / 4.0) ** (1.0 / 3.0)
    s_xn = n ** (2.0 / 3.0) * (math.exp(crit.x_star - x) - 1.0) / (c * cross)
    if abs(s_xn) > n ** (1.0 / 6.0):
        warnings.warn(
            f"s_xn = {s_xn:.3g} exceeds n^(1/6); outside the double-scaling window",
            stacklevel=2,
        )
    grid = hm_grid if hm_grid is not None else painleve.default_hm_grid()
    q_val = float(painleve.eval_hm(grid, s_xn))
    phase = 2.0 * math.pi * n * crit.omega
    gamma_n = (b - a) / 4.0 - (0.5 / c) * q_val * math.cos(phase) * n ** (-1.0 / 3.0)
    beta_n = (b + a) / 2.0 + (1.0 / c) * q_val * math.sin(phase + theta_rm) * n ** (-1.0 / 3.0)
    return gamma_n, beta_n


def asym_edge(
    x: float, t: float, n: int, big_l: float = 50.0, n_points: int = 12001
) -> tuple[float, float]:
    """Edge-critical expansion near (x, t) = (0, 1).

    gamma_n = 1 + U(c1 n^{6/7}(e^x - 1), c2 n^{4/7} e^x (t-1)) n^{-2/7} / (2c),
    beta_n the same with 1/c and no constant term; c = 6^{2/7}.
    """
    x_arg = EDGE_C1 * n ** (6.0 / 7.0) * (math.exp(x) - 1.0)
    t_arg = EDGE_C2 * n ** (4.0 / 7.0) * math.exp(x) * (t - 1.0)
    if abs(x_arg) > big_l:
        raise DomainError(
            f"scaling argument X = {x_arg:.3g} outside the solved domain [-{big_l}, {big_l}]; "
            "increase big_l"
        )
    if abs(t_arg) > 20.0:
        raise DomainError(f"scaling argument T = {t_arg:.3g} too large for the desk-scale solver")
    sol = painleve.pi2_solution_cached(t_arg, big_l, n_points)
    u_val = float(painleve.eval_pi2(sol, x_arg))
    corr = u_val * n ** (-2.0 / 7.0)
    return 1.0 + corr / (2.0 * EDGE_C), corr / EDGE_C


@dataclass(frozen=True)
class ConjecturedExteriorResult:
    gamma_n: float
    beta_n: float
    conjectural: bool = True


@dataclass(frozen=True)
class ExteriorParams:
    """Caller-supplied data of the exterior-point train ansatz.

    The coefficients c2(y, k) and c3(k) are left symbolic by the theory;
    they must be provided as callables.  ``c0`` rescales the x-offset and
    ``c1`` the train amplitude.
    """

    a: float
    b: float
    c0: float
    c1: float
    c2: Callable
    c3: Callable


def conjectured_exterior(y: float, n: int, params: ExteriorParams) -> ConjecturedExteriorResult:
    """Exterior-point recurrence ansatz; output carries a conjecture flag.

    gamma_n = (b-a)/4 + c1 sum_k sech^2(X_k), beta_n = (b+a)/2 + the same
    sum, with X_k = -c2(y,k) ln n + c3(k) through the shared train kernel.
    """
    log_n = math.log(n)
    total = sech2_train(lambda k: -params.c2(y, k) * log_n + params.c3(k))
    gamma_n = (params.b - params.a) / 4.0 + params.c1 * total
    beta_n = (params.b + params.a) / 2.0 + params.c1 * total
    return ConjecturedExteriorResult(gamma_n=gamma_n, beta_n=beta_n)


def compare_asymptotics(
    f: QuarticField,
    n_range: Sequence[int],
    which: str,
    crit: InteriorCriticalData | None = None,
    dps: int = 60,
    pi2_kwargs: dict | None = None,
) -> tuple[list[dict], float]:
    """Numeric (diagonal N = n) vs asymptotic coefficients, with decay fit.

    Returns the rows and the least-squares slope of log|gamma error|
    against log n (the fitted error-decay exponent).
    """
    if which not in ("regular", "interior", "edge"):
        raise DomainError("which must be regular | interior | edge")
    rows = []
    if which == "regular":
        a, b = rmt_eq.solve_onecut_endpoints(f)
        g_lim, b_lim = asym_onecut(a, b)
    if which == "interior" and crit is None:
        crit = interior_critical_data_t9()
    kw = pi2_kwargs or {}
    for n in n_range:
        table = compute_recurrence(f, n, n, dps=dps)
        g_num = float(table.gamma[n - 1])
        b_num = float(table.beta[n - 1])
        if which == "regular":
            g_asym, b_asym = g_lim, b_lim
        elif which == "interior":
            g_asym, b_asym = asym_interior(f.x, n, crit)
        else:
            g_asym, b_asym = asym_edge(f.x, f.t, n, **kw)
        rows.append(
            {
                "n": int(n),
                "gamma_num": g_num,
                "beta_num": b_num,
                "gamma_asym": g_asym,
                "beta_asym": b_asym,
                "err_gamma": abs(g_num - g_asym),
                "err_beta": abs(b_num - b_asym),
            }
        )
    logs = [(math.log(r["n"]), math.log(r["err_gamma"])) for r in rows if r["err_gamma"] > 0.0]
    if len(logs) >= 2:
        xs = np.array([p[0] for p in logs])
        ys = np.array([p[1] for p in logs])
        slope = float(np.polyfit(xs, ys, 1)[0])
    else:
        slope = math.nan
    return rows, slope
