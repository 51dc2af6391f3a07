"""Numerical checks of the scheme's discrete estimates.

Every checker returns :class:`CheckRecord` entries and never raises on a
failed inequality. Sweeps over a run need ``simulate(..., keep_history=True)``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .errors import ConfigMismatch, PreconditionError
from .flux import (
    FluxModel,
    GermClass,
    classify_germ,
    engquist_osher,
    entropy_flux,
    germ_couple,
    godunov_shifted,
    remainder,
)
from .mesh import StepCase
from .multi import Run
from .riemann import exact_constrained_riemann  # noqa: F401  (re-exported)
from .scheme import SolutionField, StepRecord

SLACK = 1e-10
KAPPA_GRID = np.linspace(0.0, 1.0, 21)
LINF_SLACK = 1e-12


# -- report --------------------------------------------------------------------


@dataclass(frozen=True)
class CheckRecord:
    name: str
    step: int
    value: float
    bound: float
    passed: bool

    def line(self) -> str:
        status = "pass" if self.passed else "fail"
        return f"name={self.name} step={self.step} value={self.value!r} bound={self.bound!r} status={status}"

    @classmethod
    def parse(cls, line: str) -> "CheckRecord":
        kv = dict(tok.split("=", 1) for tok in line.split())
        return cls(kv["name"], int(kv["step"]), float(kv["value"]), float(kv["bound"]), kv["status"] == "pass")


@dataclass
class DiagnosticsReport:
    records: list = field(default_factory=list)

    def add(self, name: str, step: int, value: float, bound: float, passed: bool | None = None):
        ok = value <= bound if passed is None else passed
        self.records.append(CheckRecord(name, int(step), float(value), float(bound), bool(ok)))

    def extend(self, recs: Iterable[CheckRecord]):
        self.records.extend(recs)

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.records)

    def failures(self) -> list:
        return [r for r in self.records if not r.passed]

    def summary(self) -> dict:
        """Worst record per check name."""
        out = {}
        for r in self.records:
            cur = out.get(r.name)
            if cur is None or (cur.passed and not r.passed) or (cur.passed == r.passed and r.value - r.bound > cur.value - cur.bound):
                out[r.name] = r
        return out

    def to_text(self, full: bool = False) -> str:
        recs = self.records if full else list(self.summary().values())
        return "".join(r.line() + "\n" for r in recs)

    @classmethod
    def from_text(cls, text: str) -> "DiagnosticsReport":
        return cls([CheckRecord.parse(ln) for ln in text.splitlines() if ln.strip()])


# -- trace data ----------------------------------------------------------------


@dataclass(frozen=True)
class TraceRecord:
    n: int
    id: object
    left: float
    right: float
    f_int: float
    q: float
    germ: GermClass


def traces(run: Run, tol: float = 1e-9) -> list[TraceRecord]:
    out = []
    for rec in run.steps:
        for i in rec.interfaces:
            g = classify_germ(run.model, i.s, i.q, i.left_trace, i.right_trace, tol)
            out.append(TraceRecord(rec.n, i.id, i.left_trace, i.right_trace, i.f_int, i.q, g))
    return out


# -- germ dissipativity ---------------------------------------------------------


def sample_germ(model: FluxModel, s: float, q: float, size: int, rng: np.random.Generator):
    """Random trace pairs (k_l, k_r) drawn evenly from the three parts of the germ.

    G1 is the saturated pair itself, G2 a constant state whose shifted flux does
    not exceed q, G3 a classical jump with equal shifted flux c <= q.
    """
    g = germ_couple(model, s, q)
    part = rng.integers(0, 3, size)
    left = np.empty(size)
    right = np.empty(size)
    for k in range(size):
        if part[k] == 0:
            left[k], right[k] = g.rho_hat, g.rho_check
        elif part[k] == 1:
            # F_s <= q exactly outside ]rho_check, rho_hat[
            lo_len, hi_len = g.rho_check, 1.0 - g.rho_hat
            u = rng.uniform(0.0, lo_len + hi_len)
            kappa = u if u <= lo_len else g.rho_hat + (u - lo_len)
            left[k] = right[k] = min(kappa, 1.0)
        else:
            c = rng.uniform(max(0.0, -s), q)
            gc = germ_couple(model, s, c)
            left[k], right[k] = gc.rho_check, gc.rho_hat
    return left, right


def germ_dissipativity(model: FluxModel, s: float, kl, kr, cl, cr):
    """Rankine-Hugoniot residuals of both pairs and Phi_s(k_l, c_l) - Phi_s(k_r, c_r)."""
    fs = lambda r: model.f(r) - s * r  # noqa: E731
    rh = np.maximum(np.abs(fs(kl) - fs(kr)), np.abs(fs(cl) - fs(cr)))
    slack = entropy_flux(model, s, kl, cl) - entropy_flux(model, s, kr, cr)
    return rh, slack


# -- one-sided Lipschitz ----------------------------------------------------------


def osl_parameter(model: FluxModel, lam: float) -> float:
    """a = mu dt / (4 dx)."""
    return model.mu * lam / 4.0


def downward_jumps(values: np.ndarray) -> np.ndarray:
    """D_j = max(v_{j-1} - v_j, 0) at every node of the cell array (0 at both domain ends)."""
    d = np.zeros(values.size + 1)
    d[1:-1] = np.maximum(values[:-1] - values[1:], 0.0)
    return d


def interface_nodes(f: SolutionField) -> list[int]:
    return f.mesh.interface_chi_indices()


def excluded_nodes(iface: Sequence[int], size: int) -> np.ndarray:
    mask = np.zeros(size, dtype=bool)
    for j in iface:
        mask[max(j - 2, 0):min(j + 2, size)] = True
    return mask


def check_osl(f_n: SolutionField, f_np1: SolutionField, a: float, slack: float = SLACK) -> list[tuple[int, float, float]]:
    """Nodes j (outside the interface windows at n+1) with D_j^{n+1} > psi(max D^n_{j-1..j+1}) + slack."""
    d0 = downward_jumps(f_n.values())
    d1 = downward_jumps(f_np1.values())
    if d0.size != d1.size:
        raise PreconditionError("levels n and n+1 carry a different number of interfaces")
    m = d0.copy()
    m[1:] = np.maximum(m[1:], d0[:-1])
    m[:-1] = np.maximum(m[:-1], d0[1:])
    bound = m - a * m * m
    bad = (d1 > bound + slack) & ~excluded_nodes(interface_nodes(f_np1), d1.size)
    return [(int(j), float(d1[j]), float(bound[j])) for j in np.flatnonzero(bad)]


def osl_decay_envelope(n: int, j: int, j_int: int, a: float) -> float:
    """Cascade bound on D_j^{n+1} for an interface node at chi-index j_int (level n+1)."""
    if j_int - 2 <= j <= j_int + 1:
        return np.inf
    dist = j - (j_int + 1) if j >= j_int + 2 else (j_int - 2) - j
    return 1.0 / (min(n + 1, dist) * a)


def cascade_bounds(size: int, iface: Sequence[int], n_since: int, a: float) -> np.ndarray:
    """Vectorised envelope for every node, combining all interfaces; inf inside their windows."""
    j = np.arange(size)
    k = np.full(size, n_since + 1, dtype=float)
    for ji in iface:
        right = j - (ji + 1)
        left = (ji - 2) - j
        k = np.where(j >= ji + 2, np.minimum(k, right), k)
        k = np.where(j <= ji - 3, np.minimum(k, left), k)
        k = np.where((j >= ji - 2) & (j <= ji + 1), 0.0, k)
    with np.errstate(divide="ignore"):
        return np.where(k > 0, 1.0 / (k * a), np.inf)


def _stable_steps(run: Run) -> list[bool]:
    """Steps handled by the plain single-interface recipe (no mesh transfer, no merged group)."""
    moved = {t.n for t in run.transitions}
    return [rec.n not in moved and not any(isinstance(i.id, tuple) for i in rec.interfaces) for rec in run.steps]


def osl_sweep(run: Run, slack: float = SLACK) -> DiagnosticsReport:
    """Lemma bound and cascade envelope over a run; the cascade clock restarts after skipped steps."""
    rep = DiagnosticsReport()
    a = osl_parameter(run.model, run.config.lam)
    stable = _stable_steps(run)
    start = 0
    lemma = (0, -np.inf)  # (step, worst D - bound)
    cascade = (0, -np.inf)
    for n, rec in enumerate(run.steps):
        if not stable[n]:
            start = n + 1
            continue
        f0, f1 = run.history[n], run.history[n + 1]
        for _, v, b in check_osl(f0, f1, a, -np.inf):
            if v - b > lemma[1]:
                lemma = (n, v - b)
        d1 = downward_jumps(f1.values())
        gap = d1 - cascade_bounds(d1.size, interface_nodes(f1), n - start, a)
        k = int(np.argmax(gap))
        if gap[k] > cascade[1]:
            cascade = (n, float(gap[k]))
    rep.add("osl_lemma", lemma[0], lemma[1], slack)
    rep.add("osl_cascade", cascade[0], cascade[1], slack)
    return rep


# -- localized BV and time continuity ---------------------------------------------


def tv_bound(a: float, eps: float, X: float) -> float:
    return 1.0 + 6.0 * X / (a * eps)


def _window_tv(f: SolutionField, lo: float, hi: float) -> float:
    x = f.nodes()
    v = f.values()
    inner = np.flatnonzero((x[1:-1] > lo) & (x[1:-1] < hi)) + 1
    return float(np.sum(np.abs(v[inner] - v[inner - 1])))


def localized_tv(f: SolutionField, y: float, eps: float, X: float, a: float, L: float, dt: float) -> tuple[float, float, float]:
    """(tv right of y, tv left of y, Lambda) on the windows ]y+eps, y+X[ and ]y-X, y-eps[."""
    dx = f.grid.dx
    if not (3 * dx <= eps < X):
        raise PreconditionError(f"need 3 dx <= eps < X, got eps={eps}, X={X}, dx={dx}")
    if f.n * dt < eps / (2 * L) - 1e-12:
        raise PreconditionError(f"t={f.n * dt} is earlier than eps/(2L)")
    return _window_tv(f, y + eps, y + X), _window_tv(f, y - X, y - eps), tv_bound(a, eps, X)


def l1_difference(nodes_a, vals_a, nodes_b, vals_b, lo: float = -np.inf, hi: float = np.inf) -> float:
    """Exact L1 distance of two piecewise-constant functions on [lo, hi] within both supports."""
    lo = max(lo, nodes_a[0], nodes_b[0])
    hi = min(hi, nodes_a[-1], nodes_b[-1])
    if hi <= lo:
        return 0.0
    x = np.unique(np.concatenate([nodes_a, nodes_b, [lo, hi]]))
    x = x[(x >= lo) & (x <= hi)]
    mid = 0.5 * (x[1:] + x[:-1])
    ia = np.clip(np.searchsorted(nodes_a, mid) - 1, 0, len(vals_a) - 1)
    ib = np.clip(np.searchsorted(nodes_b, mid) - 1, 0, len(vals_b) - 1)
    return float(np.sum(np.abs(np.asarray(vals_a)[ia] - np.asarray(vals_b)[ib]) * np.diff(x)))


def time_continuity(f1: SolutionField, f2: SolutionField, y: float, eps: float, X: float, a: float, L: float, dt: float):
    """L1 increments between consecutive levels on both windows and the bound 2dx + L(2 Lambda + 1) dt."""
    localized_tv(f1, y, eps, X, a, L, dt)
    lam_bv = tv_bound(a, eps, X)
    n1, n2 = f1.nodes(), f2.nodes()
    v1, v2 = f1.values(), f2.values()
    right = l1_difference(n1, v1, n2, v2, y + eps, y + X)
    left = l1_difference(n1, v1, n2, v2, y - X, y - eps)
    return right, left, 2 * f1.grid.dx + L * (2 * lam_bv + 1) * dt


def bv_sweep(run: Run, eps: float, X: float, every: int = 1) -> DiagnosticsReport:
    """Localized TV and time continuity around every single interface, at every eligible level."""
    rep = DiagnosticsReport()
    a = osl_parameter(run.model, run.config.lam)
    L, dt = run.config.L, run.dt
    stable = _stable_steps(run)
    worst_tv = (0, 0.0, tv_bound(a, eps, X))
    worst_tc = (0, 0.0, np.inf)
    for n in range(0, len(run.steps) - 1, every):
        if not (stable[n] and stable[n + 1]) or (n + 1) * dt < eps / (2 * L):
            continue
        f1, f2 = run.history[n + 1], run.history[n + 2]
        for i in run.steps[n + 1].interfaces:
            tr, tl, bound = localized_tv(f1, i.y_n, eps, X, a, L, dt)
            if max(tr, tl) - bound > worst_tv[1] - worst_tv[2]:
                worst_tv = (n + 1, max(tr, tl), bound)
            cr, cl, cb = time_continuity(f1, f2, i.y_n, eps, X, a, L, dt)
            if max(cr, cl) - cb > worst_tc[1] - worst_tc[2]:
                worst_tc = (n + 1, max(cr, cl), cb)
    rep.add("localized_tv", *worst_tv)
    rep.add("time_continuity", worst_tc[0], worst_tc[1], worst_tc[2] + SLACK)
    return rep


# -- discrete entropy inequalities --------------------------------------------------


def _entropy_fluxes(model: FluxModel, u: np.ndarray, kappa: np.ndarray) -> np.ndarray:
    """Phi at every slot face, shape (len(kappa), len(u)+1), with outflow ghost faces."""
    k = kappa[:, None]
    hi, lo = np.maximum(u[None, :], k), np.minimum(u[None, :], k)
    phi = np.empty((kappa.size, u.size + 1))
    phi[:, 1:-1] = engquist_osher(model, hi[:, :-1], hi[:, 1:]) - engquist_osher(model, lo[:, :-1], lo[:, 1:])
    phi[:, 0] = model.f(hi[:, 0]) - model.f(lo[:, 0])
    phi[:, -1] = model.f(hi[:, -1]) - model.f(lo[:, -1])
    return phi


def dei_slack(
    model: FluxModel, f_n: SolutionField, f_np1: SolutionField, rec: StepRecord, dt: float, kappa=KAPPA_GRID
) -> np.ndarray:
    """rhs - lhs of the discrete entropy inequality for every (kappa, region); negative means violated.

    Regions are the uniform cells plus, per interface, the left and right
    interface regions (the left one spans two new cells after a shift).
    """
    kappa = np.asarray(kappa, dtype=float)
    g = f_n.grid
    dx = g.dx
    u = f_n.slots.copy()
    for j, _ in f_n.interfaces:
        u[j] = u[j - 1]
    u1 = f_np1.slots
    phi = _entropy_fluxes(model, u, kappa)
    k = kappa[:, None]
    special = np.zeros(u.size, dtype=bool)
    cols = []
    for i in rec.interfaces:
        J = i.j_n
        special[J - 1:J + 2] = True
        if i.case is StepCase.SHIFT_RIGHT:
            special[J + 2] = True
        v, w = u[J - 1], u[J + 1]
        pint = np.minimum(godunov_shifted(model, i.s, np.maximum(v, kappa), np.maximum(w, kappa)), i.q)
        pint = pint - np.minimum(godunov_shifted(model, i.s, np.minimum(v, kappa), np.minimum(w, kappa)), i.q)
        rem = 0.5 * remainder(model, i.s, kappa, i.q) * dt
        x_l = g.node(J - 1)
        x_r = g.node(J + 2)
        # left region
        lhs = np.abs(u1[J - 1] - kappa) * (i.y_np1 - x_l)
        rhs = np.abs(v - kappa) * (i.y_n - x_l) - (pint - phi[:, J - 1]) * dt + rem
        cols.append(rhs - lhs)
        # right region
        if i.case is StepCase.STAY:
            lhs = np.abs(u1[J + 1] - kappa) * (x_r - i.y_np1)
            rhs = np.abs(w - kappa) * (x_r - i.y_n) - (phi[:, J + 2] - pint) * dt + rem
        else:
            lhs = np.abs(u1[J + 2] - kappa) * (x_r + dx - i.y_np1)
            rhs = (
                np.abs(w - kappa) * (x_r - i.y_n)
                + np.abs(u[J + 2] - kappa) * dx
                - (phi[:, J + 3] - pint) * dt
                + rem
            )
        cols.append(rhs - lhs)
    plain = np.flatnonzero(~special)
    lhs = np.abs(u1[None, plain] - k) * dx
    rhs = np.abs(u[None, plain] - k) * dx - (phi[:, plain + 1] - phi[:, plain]) * dt
    out = rhs - lhs
    if cols:
        out = np.concatenate([out, np.stack(cols, axis=1)], axis=1)
    return out


def dei_sweep(run: Run, kappa=KAPPA_GRID, slack: float = SLACK) -> DiagnosticsReport:
    rep = DiagnosticsReport()
    moved = {t.n for t in run.transitions}
    worst = (0, np.inf)
    for n, rec in enumerate(run.steps):
        if n in moved:
            continue
        s = dei_slack(run.model, run.history[n], run.history[n + 1], rec, run.dt, kappa)
        m = float(s.min())
        if m < worst[1]:
            worst = (n, m)
    # value = worst violation (negated slack), bound = allowed slack
    rep.add("discrete_entropy", worst[0], -worst[1], slack)
    return rep


# -- weak-form residuals -------------------------------------------------------------


def _beta(z):
    z = np.asarray(z, dtype=float)
    inside = np.abs(z) < 1.0
    zz = np.where(inside, z, 0.0)
    val = np.where(inside, np.exp(-1.0 / np.where(inside, 1.0 - zz * zz, 1.0)), 0.0)
    der = np.where(inside, val * (-2.0 * zz / np.where(inside, (1.0 - zz * zz) ** 2, 1.0)), 0.0)
    return val, der


@dataclass(frozen=True)
class Bump:
    """Smooth nonnegative test function beta((x-xc)/rx) beta((t-tc)/rt)."""

    xc: float
    rx: float
    tc: float
    rt: float

    def __call__(self, x, t):
        return self.eval(x, t)[0]

    def eval(self, x, t):
        bx, dbx = _beta((np.asarray(x) - self.xc) / self.rx)
        bt, dbt = _beta((np.asarray(t) - self.tc) / self.rt)
        return bx * bt, bx * dbt / self.rt, dbx * bt / self.rx

    @property
    def support(self):
        return (self.xc - self.rx, self.xc + self.rx), (self.tc - self.rt, self.tc + self.rt)


def bump_family(x_lo: float, x_hi: float, t_lo: float, t_hi: float, centers: int = 4) -> list[Bump]:
    """centers x 3 bumps spread over the rectangle, time support inside [t_lo, t_hi]."""
    out = []
    xs = np.linspace(x_lo, x_hi, centers + 2)[1:-1]
    tc = 0.5 * (t_lo + t_hi)
    span_x = (x_hi - x_lo) / (centers + 1)
    for xc in xs:
        for frac in (0.5, 0.75, 1.0):
            out.append(Bump(float(xc), float(frac * span_x), tc, float(frac * 0.5 * (t_hi - t_lo))))
    return out


def entropy_residual(run: Run, phi: Bump, kappa: float) -> float:
    """Left side of the approximate entropy inequality (>= -C(dx+dt) expected)."""
    m, dt = run.model, run.dt
    total = 0.0
    f0 = run.history[0]
    x0 = f0.nodes()
    total += float(np.sum(np.abs(f0.values() - kappa) * phi(0.5 * (x0[1:] + x0[:-1]), 0.0) * np.diff(x0)))
    (tlo, thi) = phi.support[1]
    for n, rec in enumerate(run.steps):
        tm = (n + 0.5) * dt
        if tm + 0.5 * dt < tlo or tm - 0.5 * dt > thi:
            continue
        f = run.history[n]
        x = f.nodes()
        v = f.values()
        xm = 0.5 * (x[1:] + x[:-1])
        _, pt, px = phi.eval(xm, tm)
        flux = np.sign(v - kappa) * (m.f(v) - m.f(kappa))
        total += float(np.sum((np.abs(v - kappa) * pt + flux * px) * np.diff(x))) * dt
        for i in rec.interfaces:
            ym = 0.5 * (i.y_n + i.y_np1)
            total += float(remainder(m, i.s, kappa, i.q)) * float(phi(ym, tm)) * dt
    return total


def constraint_residual(run: Run, phi: Bump, interface_id) -> float:
    """Weak-form flux excess across the interface beyond q (<= C(dx+dt) expected)."""
    m, dt = run.model, run.dt
    total = 0.0
    (tlo, thi) = phi.support[1]
    for n, rec in enumerate(run.steps):
        tm = (n + 0.5) * dt
        if tm + 0.5 * dt < tlo or tm - 0.5 * dt > thi:
            continue
        hits = [i for i in rec.interfaces if i.id == interface_id]
        if not hits:
            continue
        i = hits[0]
        f = run.history[n]
        x = f.nodes()
        v = f.values()
        right = x[:-1] >= i.y_n - 1e-15
        xm = 0.5 * (x[1:] + x[:-1])
        _, pt, px = phi.eval(xm[right], tm)
        total -= float(np.sum((v[right] * pt + m.f(v[right]) * px) * np.diff(x)[right])) * dt
        total -= i.q * float(phi(0.5 * (i.y_n + i.y_np1), tm)) * dt
    return total


@dataclass(frozen=True)
class CalibratedBound:
    """Constant C fitted on the coarsest mesh and the check that finer meshes respect it."""

    C: float
    observed: tuple  # observed constants, coarse to fine
    passed: bool


def calibrate(excess: Sequence[float], h: Sequence[float], floor: float = 1e-8) -> CalibratedBound:
    """excess_k >= 0 is how far run k misses the exact inequality; h_k = dx + dt."""
    obs = tuple(max(e, 0.0) / hk for e, hk in zip(excess, h))
    C = max(2.0 * obs[0], floor)
    return CalibratedBound(C, obs, all(o <= C for o in obs))


# -- L1 stability ------------------------------------------------------------------


def l1_stability_check(run_a: Run, run_b: Run) -> tuple[float, float]:
    """(||rho_a(T) - rho_b(T)||, ||rho_a(0) - rho_b(0)|| + 2 sum_i int |q_a - q_b|)."""
    if run_a.grid != run_b.grid or run_a.dt != run_b.dt or len(run_a.steps) != len(run_b.steps):
        raise ConfigMismatch("runs differ in grid, time step or horizon")
    if len(run_a.interfaces) != len(run_b.interfaces) or any(
        not np.array_equal(p.y, r.y) for p, r in zip(run_a.interfaces, run_b.interfaces)
    ):
        raise ConfigMismatch("runs differ in interface trajectories")
    fa, fb = run_a.final, run_b.final
    lhs = l1_difference(fa.nodes(), fa.values(), fb.nodes(), fb.values())
    ia = run_a.history[0] if run_a.history else None
    ib = run_b.history[0] if run_b.history else None
    if ia is None or ib is None:
        raise ConfigMismatch("initial fields unavailable: run with keep_history=True")
    rhs = l1_difference(ia.nodes(), ia.values(), ib.nodes(), ib.values())
    for p, r in zip(run_a.interfaces, run_b.interfaces):
        rhs += 2.0 * float(np.sum(np.abs(p.q - r.q))) * run_a.dt
    return lhs, rhs


# -- whole-run checks ---------------------------------------------------------------


def basic_checks(run: Run) -> DiagnosticsReport:
    """Mass balance, transfer drift, [0,1] bounds and the interface flux cap."""
    rep = DiagnosticsReport()
    errs = run.mass_errors()
    if errs.size:
        k = int(np.argmax(errs))
        rep.add("mass_balance", k, float(errs[k]), SLACK)
    drifts = run.transition_drifts()
    if drifts.size:
        k = int(np.argmax(drifts))
        rep.add("transition_mass", run.transitions[k].n, float(drifts[k]), SLACK)
    fields = run.history if run.history is not None else [run.final]
    lo = min(float(np.min(f.values())) for f in fields)
    hi = max(float(np.max(f.values())) for f in fields)
    rep.add("linf_upper", len(run.steps), hi, 1.0 + LINF_SLACK)
    rep.add("linf_lower", len(run.steps), -lo, LINF_SLACK)
    excess = [(rec.n, i.f_int - i.q) for rec in run.steps for i in rec.interfaces]
    if excess:
        n, e = max(excess, key=lambda t: t[1])
        rep.add("interface_flux_cap", n, e, 0.0)
    return rep


def full_report(run: Run, eps: float | None = None, X: float | None = None) -> DiagnosticsReport:
    rep = basic_checks(run)
    if run.history is not None:
        rep.extend(dei_sweep(run).records)
        rep.extend(osl_sweep(run).records)
        dx = run.grid.dx
        eps = 5 * dx if eps is None else eps
        X = 50 * dx if X is None else X
        if 3 * dx <= eps < X:
            rep.extend(bv_sweep(run, eps, X).records)
    return rep


# -- convergence --------------------------------------------------------------------


def empirical_orders(errors: Sequence[float], h: Sequence[float]) -> list[float]:
    e, hh = np.asarray(errors, float), np.asarray(h, float)
    with np.errstate(divide="ignore", invalid="ignore"):
        return list(np.log(e[:-1] / e[1:]) / np.log(hh[:-1] / hh[1:]))
