"""Self-similar solutions of the constrained Riemann problem, used as a convergence oracle."""

from __future__ import annotations

import numpy as np

from .errors import InadmissibleConstraint
from .flux import FluxModel, constraint_admissible, germ_couple, godunov_shifted

ACTIVATION_TOL = 1e-12


def classical_riemann(m: FluxModel, rho_l: float, rho_r: float, xi):
    """Entropy solution of the unconstrained Riemann problem at x/t = xi."""
    xi = np.asarray(xi, dtype=float)
    if rho_l == rho_r:
        return np.full_like(xi, rho_l)
    if rho_l < rho_r:
        speed = (m.f(rho_l) - m.f(rho_r)) / (rho_l - rho_r)
        return np.where(xi < speed, rho_l, rho_r)
    lo, hi = float(m.df(rho_l)), float(m.df(rho_r))
    fan = m.inverse_derivative(np.clip(xi, lo, hi))
    return np.where(xi <= lo, rho_l, np.where(xi >= hi, rho_r, fan))


def constraint_active(m: FluxModel, s: float, q: float, rho_l: float, rho_r: float) -> bool:
    return bool(godunov_shifted(m, s, rho_l, rho_r) > q + ACTIVATION_TOL)


def exact_constrained_riemann(m: FluxModel, s: float, q: float, rho_l: float, rho_r: float, x_over_t):
    """Exact solution with an interface leaving the origin at speed s under the constraint q.

    When the unconstrained Godunov flux across the interface would exceed q,
    the solution is the classical fan up to the germ pair, a non-classical
    jump riding on the interface, and the classical fan beyond it.
    """
    if not constraint_admissible(m, s, q):
        raise InadmissibleConstraint(f"(s={s}, q={q}) is not admissible")
    xi = np.asarray(x_over_t, dtype=float)
    if not constraint_active(m, s, q, rho_l, rho_r):
        return classical_riemann(m, rho_l, rho_r, xi)
    g = germ_couple(m, s, q)
    left = classical_riemann(m, rho_l, g.rho_hat, xi)
    right = classical_riemann(m, g.rho_check, rho_r, xi)
    return np.where(xi < s, left, right)


def wave_speeds(m: FluxModel, s: float, q: float, rho_l: float, rho_r: float) -> list[float]:
    """Every x/t where the exact solution is discontinuous or changes formula."""
    def classical(a, b):
        if a == b:
            return []
        if a < b:
            return [float((m.f(a) - m.f(b)) / (a - b))]
        return [float(m.df(a)), float(m.df(b))]

    if not constraint_active(m, s, q, rho_l, rho_r):
        return sorted(classical(rho_l, rho_r))
    g = germ_couple(m, s, q)
    return sorted(classical(rho_l, g.rho_hat) + [s] + classical(g.rho_check, rho_r))


def exact_cell_means(m: FluxModel, s: float, q: float, rho_l: float, rho_r: float, t: float, nodes, points: int = 8):
    """Cell averages of the exact solution at time t.

    Cells are split at every wave boundary so the Gauss-Legendre rule only
    ever sees constants or a smooth fan.
    """
    x = np.asarray(nodes, dtype=float)
    cuts = np.asarray(wave_speeds(m, s, q, rho_l, rho_r)) * t
    gx, gw = np.polynomial.legendre.leggauss(points)
    out = np.empty(x.size - 1)
    for k in range(x.size - 1):
        a, b = x[k], x[k + 1]
        edges = np.concatenate([[a], cuts[(cuts > a) & (cuts < b)], [b]])
        total = 0.0
        for lo, hi in zip(edges[:-1], edges[1:]):
            pts = 0.5 * (lo + hi) + 0.5 * (hi - lo) * gx
            total += 0.5 * (hi - lo) * float(exact_constrained_riemann(m, s, q, rho_l, rho_r, pts / t) @ gw)
        out[k] = total / (b - a)
    return out
