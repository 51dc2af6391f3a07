"""Finite volume marching on the interface-fitted mesh.

Away from interfaces the update is the three-point Engquist-Osher scheme. The
two cells touching an interface are updated from exact conservation on their
space-time parallelograms, with the constrained Godunov flux across the
slanted edge.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import CFLViolation, PhaseInvariantViolation
from .flux import FluxModel, engquist_osher, godunov_shifted
from .mesh import AdaptedMesh, Grid, StepCase, StepMesh, build_step_mesh, locate_interface

CFL_MARGIN = 1e-12
_GAUSS_X, _GAUSS_W = np.polynomial.legendre.leggauss(16)


# -- configuration -----------------------------------------------------------


@dataclass(frozen=True)
class SchemeConfig:
    dx: float
    lam: float
    L: float
    horizon: float

    def __post_init__(self):
        if self.dx <= 0 or self.lam <= 0 or self.horizon < 0:
            raise ValueError("dx, lambda must be positive and the horizon nonnegative")
        if 2.0 * self.L * self.lam > 1.0 - CFL_MARGIN:
            raise CFLViolation(f"2 L lambda = {2.0 * self.L * self.lam} exceeds 1")

    @classmethod
    def for_problem(cls, model: FluxModel, dx: float, lam: float, horizon: float, speeds: Sequence[float] = ()):
        return cls(dx, lam, model.lipschitz + max((abs(v) for v in speeds), default=0.0), horizon)

    @property
    def dt(self) -> float:
        return self.lam * self.dx

    @property
    def n_steps(self) -> int:
        from .trajectory import n_steps_for

        return n_steps_for(self.horizon, self.dt)


# -- initial data ------------------------------------------------------------


@dataclass(frozen=True)
class Piecewise:
    """values[0] left of breaks[0], values[i] on [breaks[i-1], breaks[i]), values[-1] beyond."""

    breaks: tuple[float, ...]
    values: tuple[float, ...]

    def __post_init__(self):
        b = np.asarray(self.breaks, dtype=float)
        if len(self.values) != b.size + 1:
            raise ValueError("need exactly one more value than breakpoints")
        if b.size and np.any(np.diff(b) < 0):
            raise ValueError("breakpoints must be nondecreasing")
        object.__setattr__(self, "breaks", tuple(float(x) for x in b))
        object.__setattr__(self, "values", tuple(float(v) for v in self.values))

    def __call__(self, x):
        i = np.searchsorted(np.asarray(self.breaks), x, side="right")
        return np.asarray(self.values)[i]

    def primitive(self, x):
        """Antiderivative anchored at the first breakpoint (or 0 without breaks)."""
        b = np.asarray(self.breaks)
        v = np.asarray(self.values)
        x = np.asarray(x, dtype=float)
        if b.size == 0:
            return v[0] * x
        cum = np.concatenate([[0.0], np.cumsum(v[1:-1] * np.diff(b))])
        i = np.searchsorted(b, x, side="right")
        anchor = np.where(i == 0, b[0], b[np.maximum(i - 1, 0)])
        base = np.where(i == 0, 0.0, cum[np.maximum(i - 1, 0)])
        return base + v[i] * (x - anchor)

    def means(self, left, right):
        left, right = np.asarray(left, float), np.asarray(right, float)
        out = (self.primitive(right) - self.primitive(left)) / (right - left)
        lo, hi = min(self.values), max(self.values)
        return np.clip(out, lo, hi)


def constant(value: float) -> Piecewise:
    return Piecewise((), (value,))


def indicator(a: float, b: float, value: float, background: float = 0.0) -> Piecewise:
    return Piecewise((a, b), (background, value, background))


def cell_means(rho0, left, right) -> np.ndarray:
    """Exact means for piecewise presets, 16-point Gauss-Legendre for callables."""
    left, right = np.asarray(left, float), np.asarray(right, float)
    if isinstance(rho0, Piecewise):
        return rho0.means(left, right)
    half = 0.5 * (right - left)
    mid = 0.5 * (right + left)
    pts = mid[:, None] + half[:, None] * _GAUSS_X[None, :]
    vals = np.asarray(rho0(pts), dtype=float)
    return np.clip(0.5 * vals @ _GAUSS_W, 0.0, 1.0)


# -- solution field ----------------------------------------------------------


@dataclass(frozen=True, eq=False)
class SolutionField:
    """Cell values at level n stored in uniform slots; interface holes hold NaN."""

    n: int
    mesh: AdaptedMesh
    slots: np.ndarray

    @property
    def grid(self) -> Grid:
        return self.mesh.grid

    @property
    def interfaces(self) -> tuple[tuple[int, float], ...]:
        return self.mesh.interfaces

    def values(self) -> np.ndarray:
        return self.mesh.cell_values(self.slots)

    def nodes(self) -> np.ndarray:
        return self.mesh.nodes()

    def widths(self) -> np.ndarray:
        return np.diff(self.nodes())

    def mass(self) -> float:
        return float(np.nansum(self.slots * self.mesh.slot_widths()))

    def as_piecewise(self) -> Piecewise:
        x = self.nodes()
        v = self.values()
        return Piecewise(tuple(x[1:-1]), tuple(v))


def adapted_mesh(grid: Grid, positions: Sequence[float]) -> AdaptedMesh:
    placed = tuple(sorted(locate_interface(grid.dx, y, grid.x_min, grid.n_cells) for y in positions))
    for (a, _), (b, _) in zip(placed[:-1], placed[1:]):
        if b - a < 4:
            raise PhaseInvariantViolation(f"interfaces in cells {a} and {b} have overlapping stencils")
    return AdaptedMesh(grid, placed)


def project_initial(rho0, mesh: AdaptedMesh, n: int = 0) -> SolutionField:
    x = mesh.nodes()
    vals = cell_means(rho0, x[:-1], x[1:])
    return SolutionField(n, mesh, _to_slots(mesh, vals))


def _to_slots(mesh: AdaptedMesh, values: np.ndarray) -> np.ndarray:
    holes = sorted(mesh.holes())
    if not holes:
        return np.array(values, dtype=float)
    idx = np.asarray(holes) - np.arange(len(holes))
    return np.insert(np.asarray(values, dtype=float), idx, np.nan)


def reproject(field: SolutionField, mesh: AdaptedMesh) -> SolutionField:
    """Conservative transfer of the piecewise-constant field onto another adapted mesh.

    Cells present in both meshes keep their value bit for bit.
    """
    if mesh.interfaces == field.mesh.interfaces:
        return field
    old_x = field.nodes()
    old_v = field.values()
    new_x = mesh.nodes()
    vals = field.as_piecewise().means(new_x[:-1], new_x[1:])
    li = np.searchsorted(old_x, new_x[:-1])
    ok = (li < old_x.size - 1) & (old_x[np.minimum(li, old_x.size - 1)] == new_x[:-1])
    ok &= old_x[np.minimum(li + 1, old_x.size - 1)] == new_x[1:]
    vals[ok] = old_v[li[ok]]
    return SolutionField(field.n, mesh, _to_slots(mesh, vals))


# -- pointwise updates -------------------------------------------------------


def step_away_from_interface(model: FluxModel, left, center, right, lam: float):
    """Three-point Engquist-Osher update of one cell."""
    return center - lam * (engquist_osher(model, center, right) - engquist_osher(model, left, center))


def step_interface_left(model: FluxModel, u, v, w, mesh: StepMesh, s: float, q: float, dt: float):
    """New value of the cell just left of the interface (u, v: left cells, w: right interface cell)."""
    f_int = np.minimum(godunov_shifted(model, s, v, w), q)
    return (v * mesh.left.width_n - (f_int - engquist_osher(model, u, v)) * dt) / mesh.left.width_np1


def step_interface_right(model: FluxModel, u, v, w, z, mesh: StepMesh, s: float, q: float, dt: float):
    """New value of the cell just right of the interface.

    u is the left interface cell, v the right one, w and z the next uniform
    cells. When the interface stays in its cell z is unused; after a shift the
    right cell absorbs the uniform cell holding w.
    """
    f_int = np.minimum(godunov_shifted(model, s, u, v), q)
    g = mesh.grid
    if mesh.case is StepCase.STAY:
        mass = v * (g.node(mesh.j_n + 2) - mesh.y_n) - (engquist_osher(model, v, w) - f_int) * dt
    else:
        mass = v * (g.node(mesh.j_n + 2) - mesh.y_n) + w * g.dx - (engquist_osher(model, w, z) - f_int) * dt
    return mass / mesh.right.width_np1


# -- full step ----------------------------------------------------------------


@dataclass(frozen=True)
class InterfaceStep:
    """Per-step interface data: positions at both levels, mean speed and constraint."""

    id: object
    y_n: float
    y_np1: float
    s: float
    q: float


@dataclass(frozen=True)
class InterfaceRecord:
    id: object
    case: StepCase
    j_n: int
    j_np1: int
    y_n: float
    y_np1: float
    s: float
    q: float
    f_int: float
    left_trace: float
    right_trace: float


@dataclass(frozen=True)
class StepRecord:
    n: int
    flux_in: float
    flux_out: float
    mass_before: float
    mass_after: float
    interfaces: tuple[InterfaceRecord, ...] = ()

    def balance_error(self, dt: float) -> float:
        return abs(self.mass_after - self.mass_before + dt * (self.flux_out - self.flux_in))


def advance_field(
    model: FluxModel, field: SolutionField, steps: Sequence[InterfaceStep], dt: float
) -> tuple[SolutionField, StepRecord]:
    """One time step with the given interfaces; their level-n positions must match the field mesh."""
    grid = field.grid
    meshes = [build_step_mesh(grid, st.y_n, st.y_np1) for st in steps]
    current = tuple(sorted((m.j_n, m.y_n) for m in meshes))
    if current != field.interfaces:
        raise PhaseInvariantViolation(f"field mesh {field.interfaces} does not match interfaces {current}")
    order = sorted(range(len(steps)), key=lambda i: meshes[i].j_n)
    for a, b in zip(order[:-1], order[1:]):
        if meshes[b].j_n - meshes[a].j_n < 4:
            raise PhaseInvariantViolation("independent interfaces are less than four cells apart")

    u = field.slots
    work = u.copy()
    for m in meshes:
        work[m.j_n] = work[m.j_n - 1]  # placeholder so the flux sweep stays finite
    lam = dt / grid.dx
    flux = np.empty(u.size + 1)
    flux[1:-1] = engquist_osher(model, work[:-1], work[1:])
    flux[0] = model.f(work[0])
    flux[-1] = model.f(work[-1])
    new = work - lam * (flux[1:] - flux[:-1])

    records = []
    for st, m in zip(steps, meshes):
        J = m.j_n
        left_val = float(step_interface_left(model, u[J - 2], u[J - 1], u[J + 1], m, st.s, st.q, dt))
        right_val = float(
            step_interface_right(model, u[J - 1], u[J + 1], u[J + 2], u[J + 3], m, st.s, st.q, dt)
        )
        f_int = float(min(godunov_shifted(model, st.s, u[J - 1], u[J + 1]), st.q))
        new[J - 1] = left_val
        if m.case is StepCase.STAY:
            new[J] = np.nan
            new[J + 1] = right_val
        else:
            new[J] = left_val
            new[J + 1] = np.nan
            new[J + 2] = right_val
        records.append(
            InterfaceRecord(st.id, m.case, J, m.j_np1, m.y_n, m.y_np1, st.s, st.q, f_int, float(u[J - 1]), float(u[J + 1]))
        )
    new_mesh = AdaptedMesh(grid, tuple(sorted((m.j_np1, m.y_np1) for m in meshes)))
    out = SolutionField(field.n + 1, new_mesh, new)
    rec = StepRecord(field.n, float(flux[0]), float(flux[-1]), field.mass(), out.mass(), tuple(records))
    return out, rec


def advance(model: FluxModel, field: SolutionField, interface, config: SchemeConfig) -> SolutionField:
    """Single-interface step; ``interface`` is a DiscreteInterface or None."""
    steps = []
    if interface is not None and interface.active(field.n):
        n = field.n
        steps.append(
            InterfaceStep(interface.id, interface.position(n), interface.position(n + 1), interface.slope(n), interface.constraint(n))
        )
    return advance_field(model, field, steps, config.dt)[0]

