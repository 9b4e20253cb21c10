"""Numerical laboratory for small-dispersion KdV asymptotics and
unitary-ensemble recurrence coefficients.

Submodules
----------
core
    Special functions, quadrature rules, Newton solver.
hopf
    Initial data, characteristics solution, gradient catastrophe,
    and the edge kernel theta(lam; u).
kdv_asym
    Edge systems, elliptic ansatz and the three critical expansions.
painleve
    Boundary-value solvers for the fourth-order profile U(X, T) and the
    Hastings-McLeod solution of q'' = s q + 2 q^3.
kdv_direct
    Fourier pseudospectral reference solver for the dispersive equation.
rmt_eq
    Equilibrium measures for the quartic field family, variational
    checks, singularity classification, phase diagram.
orthopoly
    Recurrence coefficients and partition functions for e^{-N V}
    weights, plus the regular/critical asymptotic formulas.
toda
    Lattice hierarchy flows, string equation, hodograph solution and
    catastrophe scaling constants.
cli
    Command-line front end (``kdvrmt`` entry point).
"""

from . import core, errors, hopf, kdv_asym, kdv_direct, orthopoly, painleve, rmt_eq, toda

__all__ = [
    "core",
    "errors",
    "hopf",
    "kdv_asym",
    "kdv_direct",
    "orthopoly",
    "painleve",
    "rmt_eq",
    "toda",
]

__version__ = "0.1.0"
