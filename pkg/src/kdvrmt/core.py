"""Special functions and generic solvers used by every other module.

Everything here is a pure function of its inputs; there is no shared
mutable state, so concurrent use from several threads is safe.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np
from scipy import special as sspecial

from .errors import (
    AccuracyError,
    ConvergenceError,
    DomainError,
    SingularJacobianError,
)

__all__ = [
    "QuadratureRule",
    "RootConfig",
    "NewtonResult",
    "airy",
    "complete_elliptic",
    "theta3",
    "gauss_legendre_rule",
    "gauss_jacobi_rule",
    "trapezoid_periodic_rule",
    "newton_solve",
    "sech2",
    "sech2_train",
]

_EPS = np.finfo(float).eps


@dataclass(frozen=True)
class QuadratureRule:
    """Nodes and positive weights of a fixed quadrature rule.

    ``kind`` tags the family: ``"gauss-legendre"``, ``"gauss-jacobi"``
    (with the endpoint exponents appended) or ``"trapezoid-periodic"``.
    """

    nodes: np.ndarray
    weights: np.ndarray
    kind: str

    def __post_init__(self):
        object.__setattr__(self, "nodes", np.asarray(self.nodes, dtype=float))
        object.__setattr__(self, "weights", np.asarray(self.weights, dtype=float))
        if self.nodes.size < 1:
            raise DomainError("quadrature rule needs at least one node")
        if np.any(self.weights <= 0.0):
            raise DomainError("quadrature weights must be positive")

    def integrate(self, f) -> float:
        return float(np.dot(self.weights, f(self.nodes)))


@dataclass(frozen=True)
class RootConfig:
    """Tolerances and iteration budget for Newton-type solves."""

    abs_tol: float = 1e-12
    rel_tol: float = 1e-12
    max_iter: int = 60
    bracket: Optional[tuple] = None

    def __post_init__(self):
        if self.abs_tol <= 0.0 or self.rel_tol <= 0.0:
            raise DomainError("tolerances must be positive")
        if self.max_iter < 1:
            raise DomainError("max_iter must be >= 1")


@dataclass(frozen=True)
class NewtonResult:
    x: np.ndarray
    iterations: int
    residual_norm: float

    def scalar(self) -> float:
        return float(np.atleast_1d(self.x)[0])


def airy(s: float) -> float:
    """Airy function Ai(s) for finite real s.

    Backed by the scipy implementation, which is accurate to machine
    precision on the range used here; the defining-ODE and series checks
    live in the test suite.
    """
    s = float(s)
    if not math.isfinite(s):
        raise DomainError("airy requires finite argument")
    return float(sspecial.airy(s)[0])


def airy_d(s: float) -> float:
    """Derivative Ai'(s)."""
    s = float(s)
    if not math.isfinite(s):
        raise DomainError("airy_d requires finite argument")
    return float(sspecial.airy(s)[1])


def complete_elliptic(s: float) -> tuple[float, float]:
    """Complete elliptic integrals (K(s), E(s)) in the modulus convention.

    K(s) = int_0^{pi/2} (1 - s^2 sin^2 t)^{-1/2} dt and similarly E.
    Computed with the arithmetic-geometric mean, which converges
    quadratically; relative accuracy is at machine-precision level.

    Raises
    ------
    DomainError
        If s >= 1 (K diverges there; for the elliptic ansatz this is the
        soliton degeneration beta_1 = beta_2).
    """
    s = float(s)
    if not 0.0 <= s < 1.0:
        raise DomainError(f"complete_elliptic requires 0 <= s < 1, got {s}")
    a = 1.0
    b = math.sqrt((1.0 - s) * (1.0 + s))
    c2_sum = 0.5 * s * s
    pow2 = 0.5
    for _ in range(60):
        c = 0.5 * (a - b)
        a, b = 0.5 * (a + b), math.sqrt(a * b)
        pow2 *= 2.0
        c2_sum += pow2 * c * c
        if abs(c) < 1e-18 * a:
            break
    k_val = math.pi / (2.0 * a)
    e_val = k_val * (1.0 - c2_sum)
    return k_val, e_val


def theta3(z: float, tau: complex, dz: int = 0) -> float:
    """Jacobi theta function with unit period in z.

    theta(z; tau) = sum_n exp(pi i n^2 tau + 2 pi i n z), restricted here
    to purely imaginary tau = i*T with T > 0, where the series is real:

        theta = 1 + 2 sum_{n>=1} exp(-pi T n^2) cos(2 pi n z).

    ``dz`` selects the analytic z-derivative of that order (term-by-term
    differentiation of the series).  Truncation keeps the tail below
    1e-16 in absolute terms, comfortably inside the advertised 1e-14.
    """
    tau = complex(tau)
    if tau.imag <= 0.0:
        raise DomainError("theta3 requires Im(tau) > 0")
    if abs(tau.real) > 1e-13:
        raise DomainError("theta3 implemented for purely imaginary tau only")
    big_t = tau.imag
    z = float(z)
    total = 1.0 if dz == 0 else 0.0
    two_pi = 2.0 * math.pi
    n = 1
    while True:
        amp = 2.0 * math.exp(-math.pi * big_t * n * n) * (two_pi * n) ** dz
        phase = two_pi * n * z
        cyc = dz % 4
        if cyc == 0:
            term = amp * math.cos(phase)
        elif cyc == 1:
            term = -amp * math.sin(phase)
        elif cyc == 2:
            term = -amp * math.cos(phase)
        else:
            term = amp * math.sin(phase)
        total += term
        if amp < 1e-17 * max(1.0, abs(total)) and n >= 2:
            break
        n += 1
        if n > 4000:
            raise AccuracyError(
                "theta3 series did not reach its tail bound; tau too close to real axis"
            )
    return total


def gauss_legendre_rule(n: int) -> QuadratureRule:
    """n-point Gauss-Legendre rule on [-1, 1]."""
    if n < 1:
        raise DomainError("need n >= 1 nodes")
    x, w = sspecial.roots_legendre(n)
    return QuadratureRule(nodes=x, weights=w, kind="gauss-legendre")


def gauss_jacobi_rule(n: int, alpha: float, beta: float) -> QuadratureRule:
    """n-point Gauss-Jacobi rule for weight (1-x)^alpha (1+x)^beta on [-1, 1].

    Exact for polynomials of degree 2n-1 against that weight; used for
    the inverse-square-root endpoint factors in the edge integrals.
    """
    if n < 1:
        raise DomainError("need n >= 1 nodes")
    if alpha <= -1.0 or beta <= -1.0:
        raise DomainError("Jacobi exponents must exceed -1")
    if alpha == 0.0 and beta == 0.0:
        x, w = sspecial.roots_legendre(n)
    else:
        x, w = sspecial.roots_jacobi(n, alpha, beta)
    return QuadratureRule(nodes=x, weights=w, kind=f"gauss-jacobi({alpha},{beta})")


def trapezoid_periodic_rule(n: int, period: float = 2.0 * math.pi) -> QuadratureRule:
    """Equispaced trapezoid rule on one period (spectrally accurate there)."""
    if n < 2:
        raise DomainError("need n >= 2 nodes")
    h = period / n
    nodes = h * np.arange(n)
    return QuadratureRule(nodes=nodes, weights=np.full(n, h), kind="trapezoid-periodic")


def _fd_jacobian(f: Callable, x: np.ndarray, fx: np.ndarray) -> np.ndarray:
    n = x.size
    m = fx.size
    jac = np.empty((m, n))
    h = _EPS ** (1.0 / 3.0)
    for j in range(n):
        step = h * max(abs(x[j]), 1.0)
        xp = x.copy()
        xm = x.copy()
        xp[j] += step
        xm[j] -= step
        jac[:, j] = (np.atleast_1d(f(xp)) - np.atleast_1d(f(xm))) / (2.0 * step)
    return jac


def newton_solve(
    f: Callable,
    x0,
    cfg: RootConfig | None = None,
    jac: Callable | None = None,
) -> NewtonResult:
    """Damped Newton iteration for F(x) = 0, F: R^k -> R^k.

    The Jacobian defaults to central finite differences with step
    eps^(1/3) * scale.  Identical inputs produce identical iterates.

    Raises
    ------
    SingularJacobianError
        If the linearization cannot be solved.
    ConvergenceError
        After ``cfg.max_iter`` iterations without meeting ``abs_tol``;
        the exception carries the last iterate.
    """
    cfg = cfg or RootConfig()
    scalar_input = np.isscalar(x0) or np.ndim(x0) == 0
    x = np.atleast_1d(np.asarray(x0, dtype=float)).copy()

    def fvec(v):
        return np.atleast_1d(np.asarray(f(v[0] if scalar_input else v), dtype=float))

    fx = fvec(x)
    norm = float(np.max(np.abs(fx)))
    for it in range(cfg.max_iter):
        if norm <= cfg.abs_tol:
            return NewtonResult(x=x[0] if scalar_input else x, iterations=it, residual_norm=norm)
        jmat = (
            np.atleast_2d(np.asarray(jac(x[0] if scalar_input else x), dtype=float))
            if jac is not None
            else _fd_jacobian(lambda v: fvec(v), x, fx)
        )
        try:
            step = np.linalg.solve(jmat, fx)
        except np.linalg.LinAlgError as exc:
            raise SingularJacobianError(
                f"singular Jacobian at iteration {it}", last_iterate=x.copy(), iterations=it
            ) from exc
        lam = 1.0
        for _ in range(25):
            x_new = x - lam * step
            if cfg.bracket is not None:
                lo, hi = cfg.bracket
                x_new = np.clip(x_new, lo, hi)
            try:
                f_new = fvec(x_new)
                n_new = float(np.max(np.abs(f_new)))
            except (ValueError, ArithmeticError):
                # trial left the admissible region; shorten the step
                lam *= 0.5
                continue
            if math.isfinite(n_new) and n_new < norm:
                break
            lam *= 0.5
        else:
            if norm <= 100.0 * cfg.abs_tol:  # stalled at the rounding floor
                return NewtonResult(
                    x=x[0] if scalar_input else x, iterations=it, residual_norm=norm
                )
            raise ConvergenceError(
                "Newton line search stalled", last_iterate=x.copy(), iterations=it
            )
        x, fx, norm = x_new, f_new, n_new
    if norm <= cfg.abs_tol:
        return NewtonResult(
            x=x[0] if scalar_input else x, iterations=cfg.max_iter, residual_norm=norm
        )
    raise ConvergenceError(
        f"no convergence after {cfg.max_iter} iterations (|F| = {norm:.3e})",
        last_iterate=x.copy(),
        iterations=cfg.max_iter,
    )


def sech2(x: float) -> float:
    """sech(x)^2 without overflow for large |x|."""
    ax = abs(x)
    if ax > 350.0:
        return 0.0
    c = math.cosh(ax)
    return 1.0 / (c * c)


def sech2_train(offset: Callable[[int], float], cutoff: float = 1e-16, k_max: int = 100000) -> float:
    """Sum of sech^2 over a train of centers, sum_k sech^2(X_k).

    ``offset(k)`` returns X_k.  Within the validity window the X_k
    decrease strictly with k; summation stops once a term on that
    decreasing side falls under ``cutoff``, or as soon as the sequence
    turns around (the far formal tail where X_k rises again lies outside
    the window and is deliberately not summed).  Both the soliton-train
    edge expansion and the conjectured exterior-point recurrence formula
    evaluate their sums through this one kernel, so matched inputs agree
    bit-for-bit.
    """
    x_cut = 0.5 * math.log(4.0 / cutoff)
    total = 0.0
    x_prev = math.inf
    for k in range(k_max):
        x_k = offset(k)
        if x_k >= x_prev:
            return total
        total += sech2(x_k)
        if x_k <= -x_cut:
            return total
        x_prev = x_k
    raise ConvergenceError("sech2_train did not reach its cutoff", last_iterate=total)
