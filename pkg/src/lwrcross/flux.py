"""Pointwise flux mathematics for the constrained LWR model.

Everything here is pure. Functions accept scalars or numpy arrays for the
density arguments; the speed ``s`` and constraint level ``q`` are scalars.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy.optimize import brentq

from .errors import DomainError, InadmissibleConstraint, NoRoot

DOMAIN_SLACK = 1e-12
GERM_TOL = 1e-9
_BISECT_TOL = 1e-12
_SAMPLE = np.linspace(0.0, 1.0, 1001)


def _bisect(fun: Callable[[float], float], lo: float, hi: float, tol: float = _BISECT_TOL) -> float:
    flo = fun(lo)
    if flo == 0.0:
        return lo
    fhi = fun(hi)
    if fhi == 0.0:
        return hi
    if np.sign(flo) == np.sign(fhi):
        raise NoRoot(f"no sign change on [{lo}, {hi}]")
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        fm = fun(mid)
        if fm == 0.0:
            return mid
        if np.sign(fm) == np.sign(flo):
            lo, flo = mid, fm
        else:
            hi = mid
    return 0.5 * (lo + hi)


@dataclass(frozen=True)
class FluxModel:
    """A bell-shaped, uniformly concave flux on [0, 1].

    Build instances with :meth:`quadratic`, :meth:`polynomial` or :meth:`custom`.
    ``params`` holds the velocity (quadratic) or the monomial coefficients
    (polynomial); custom fluxes carry their callables instead.
    """

    kind: str
    rho_bar: float
    mu: float
    lipschitz: float
    params: tuple[float, ...] = ()
    _f: Callable = field(default=None, repr=False, compare=False)
    _df: Callable = field(default=None, repr=False, compare=False)
    _d2f: Callable = field(default=None, repr=False, compare=False)

    # -- constructors -----------------------------------------------------

    @classmethod
    def quadratic(cls, vmax: float = 1.0) -> "FluxModel":
        if vmax <= 0:
            raise ValueError("vmax must be positive")
        return cls(kind="quadratic", rho_bar=0.5, mu=2.0 * vmax, lipschitz=float(vmax), params=(float(vmax),))

    @classmethod
    def polynomial(cls, coeffs) -> "FluxModel":
        """f(rho) = sum_k coeffs[k] * rho**k, validated to be bell-shaped and concave."""
        c = np.asarray(coeffs, dtype=float)
        poly = np.polynomial.Polynomial(c)
        d1, d2 = poly.deriv(1), poly.deriv(2)
        m = cls._from_callables("polynomial", poly, d1, d2, params=tuple(float(v) for v in c))
        return m

    @classmethod
    def custom(cls, f: Callable, df: Callable, d2f: Callable) -> "FluxModel":
        return cls._from_callables("custom", f, df, d2f)

    @classmethod
    def _from_callables(cls, kind, f, df, d2f, params=()) -> "FluxModel":
        rho_bar = brentq(lambda r: float(df(r)), 0.0, 1.0, xtol=1e-15) if df(0.0) > 0 > df(1.0) else None
        if rho_bar is None:
            raise ValueError("flux is not bell-shaped: f' must change sign on ]0,1[")
        mu = -float(np.max(d2f(_SAMPLE)))
        lip = float(np.max(np.abs(df(_SAMPLE))))
        m = cls(kind=kind, rho_bar=float(rho_bar), mu=mu, lipschitz=lip, params=params, _f=f, _df=df, _d2f=d2f)
        problems = m.invariant_violations()
        if problems:
            raise ValueError("; ".join(problems))
        return m

    # -- pointwise evaluation ---------------------------------------------

    def f(self, rho):
        if self.kind == "quadratic":
            return self.params[0] * rho * (1.0 - rho)
        return self._f(rho)

    def df(self, rho):
        if self.kind == "quadratic":
            return self.params[0] * (1.0 - 2.0 * rho)
        return self._df(rho)

    def d2f(self, rho):
        if self.kind == "quadratic":
            return np.full_like(np.asarray(rho, dtype=float), -2.0 * self.params[0])
        return self._d2f(rho)

    @property
    def f_max(self) -> float:
        return float(self.f(self.rho_bar))

    def theta(self, s: float) -> float:
        """Maximiser of F_s = f - s*rho over [0, 1]."""
        if self.kind == "quadratic":
            v = self.params[0]
            return min(max(0.5 * (1.0 - s / v), 0.0), 1.0)
        if self.df(0.0) <= s:
            return 0.0
        if self.df(1.0) >= s:
            return 1.0
        return float(brentq(lambda r: float(self.df(r)) - s, 0.0, 1.0, xtol=1e-15))

    def max_shifted(self, s: float) -> float:
        th = self.theta(s)
        return float(self.f(th) - s * th)

    def inverse_derivative(self, xi):
        """Density whose characteristic speed is ``xi`` (clamped to [0, 1])."""
        xi = np.asarray(xi, dtype=float)
        if self.kind == "quadratic":
            v = self.params[0]
            return np.clip(0.5 * (1.0 - xi / v), 0.0, 1.0)
        out = np.empty_like(xi)
        lo_speed, hi_speed = float(self.df(1.0)), float(self.df(0.0))
        for idx, x in np.ndenumerate(xi):
            if x >= hi_speed:
                out[idx] = 0.0
            elif x <= lo_speed:
                out[idx] = 1.0
            else:
                out[idx] = brentq(lambda r: float(self.df(r)) - x, 0.0, 1.0, xtol=1e-15)
        return out

    def invariant_violations(self) -> list[str]:
        out = []
        if abs(float(self.f(0.0))) > 1e-12 or abs(float(self.f(1.0))) > 1e-12:
            out.append("f(0) and f(1) must vanish")
        grid = np.arange(1, 1000) * 1e-3
        grid = grid[np.abs(grid - self.rho_bar) > 1e-9]
        if np.any(self.df(grid) * (self.rho_bar - grid) <= 0):
            out.append("f'(rho)(rho_bar - rho) must be positive away from rho_bar")
        if np.any(self.d2f(grid) > -self.mu + 1e-12) or self.mu <= 0:
            out.append("f must be uniformly concave")
        return out


def _check_domain(rho) -> None:
    r = np.asarray(rho, dtype=float)
    if np.any(r < -DOMAIN_SLACK) or np.any(r > 1.0 + DOMAIN_SLACK) or np.any(np.isnan(r)):
        raise DomainError(f"density outside [0, 1]: {rho!r}")


def eval_flux(m: FluxModel, rho):
    _check_domain(rho)
    return m.f(rho)


def shifted_flux(m: FluxModel, s: float, rho):
    """F_s(rho) = f(rho) - s*rho, the flux seen by an observer moving at speed s."""
    _check_domain(rho)
    return m.f(rho) - s * rho


def entropy_flux(m: FluxModel, s: float, a, b):
    """Kruzhkov entropy flux sgn(a - b) (F_s(a) - F_s(b))."""
    _check_domain(a)
    _check_domain(b)
    return np.sign(a - b) * ((m.f(a) - s * a) - (m.f(b) - s * b))


def constraint_admissible(m: FluxModel, s: float, q: float) -> bool:
    top = m.max_shifted(s)
    low = 0.0 if s >= 0 else -s
    return bool(low <= q < top)


class GermClass(enum.Enum):
    G1 = "G1"
    G2 = "G2"
    G3 = "G3"
    NOT_IN_GERM = "NotInGerm"


@dataclass(frozen=True)
class GermCouple:
    rho_hat: float
    rho_check: float
    s: float
    q: float


def germ_couple(m: FluxModel, s: float, q: float) -> GermCouple:
    """The two solutions of F_s(rho) = q, largest first."""
    if q >= m.max_shifted(s):
        raise NoRoot(f"q={q} is not below max F_s={m.max_shifted(s)}")
    if not constraint_admissible(m, s, q):
        raise InadmissibleConstraint(f"(s={s}, q={q}) is not admissible")
    if m.kind == "quadratic":
        v = m.params[0]
        b = v - s
        disc = max(b * b - 4.0 * v * q, 0.0)
        root = np.sqrt(disc)
        hi = (b + root) / (2.0 * v)
        # Vieta keeps the small root accurate when q << b^2.
        lo = (2.0 * q / (b + root)) if b + root > 0 else (b - root) / (2.0 * v)
        return GermCouple(min(float(hi), 1.0), max(float(lo), 0.0), s, q)
    th = m.theta(s)
    g = lambda r: float(m.f(r) - s * r - q)  # noqa: E731
    lo = _bisect(g, 0.0, th)
    hi = _bisect(g, th, 1.0)
    return GermCouple(hi, lo, s, q)


def remainder(m: FluxModel, s: float, kappa, q: float):
    """2 (F_s(kappa) - min(F_s(kappa), q)): the entropy correction carried by the interface."""
    fs = m.f(kappa) - s * kappa
    return 2.0 * np.maximum(fs - q, 0.0)


def classify_germ(m: FluxModel, s: float, q: float, k_l: float, k_r: float, tol: float = GERM_TOL) -> GermClass:
    """Which part of the admissibility germ contains the trace pair (k_l, k_r).

    Equal pairs (within ``tol``) are tested against G2 first, then the order of
    the pair decides between G1 (k_l > k_r) and G3 (k_l < k_r).
    """
    fl = float(m.f(k_l) - s * k_l)
    fr = float(m.f(k_r) - s * k_r)
    if abs(k_l - k_r) <= tol:
        return GermClass.G2 if max(fl, fr) <= q + tol else GermClass.NOT_IN_GERM
    if k_l > k_r:
        if abs(fl - q) <= tol and abs(fr - q) <= tol:
            return GermClass.G1
        return GermClass.NOT_IN_GERM
    if abs(fl - fr) <= tol and max(fl, fr) <= q + tol:
        return GermClass.G3
    return GermClass.NOT_IN_GERM


def engquist_osher(m: FluxModel, a, b):
    """EO(a, b) = q+(a) + q-(b) with q+ the nondecreasing and q- the nonincreasing part of f."""
    half = 0.5 * m.f(m.rho_bar)
    return (m.f(np.minimum(a, m.rho_bar)) - half) + (m.f(np.maximum(b, m.rho_bar)) - half)


def godunov_shifted(m: FluxModel, s: float, a, b):
    """Exact Godunov flux of the concave flux F_s."""
    th = m.theta(s)
    left = np.minimum(a, th)
    right = np.maximum(b, th)
    return np.minimum(m.f(left) - s * left, m.f(right) - s * right)


def interface_flux(m: FluxModel, s: float, q: float, a, b):
    return np.minimum(godunov_shifted(m, s, a, b), q)
