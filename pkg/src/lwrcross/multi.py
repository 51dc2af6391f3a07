"""Several interfaces on one global mesh.

Every step the active interfaces are grouped by proximity. Groups of one are
advanced on their own local mesh modification; a group of several is replaced
by its mean trajectory carrying the smallest constraint. Whenever the set of
adapted nodes changes (an interface starts or ends, two interfaces merge or
separate) the field is transferred conservatively to the new mesh.
"""

from __future__ import annotations

import os
import warnings
from dataclasses import dataclass, field
from functools import reduce
from typing import Iterable, Sequence

import numpy as np

from .errors import LWRError
from .flux import FluxModel
from .mesh import Grid
from .scheme import (
    InterfaceStep,
    SchemeConfig,
    SolutionField,
    StepRecord,
    adapted_mesh,
    advance_field,
    project_initial,
    reproject,
)
from .trajectory import DiscreteInterface, InterfaceSpec, cluster, discretize


BOUNDARY_TOL = 1e-12


class BoundaryWarning(UserWarning):
    """A wave reached the truncated domain boundary, where outflow is only approximate."""


def _boundary_disturbed(f: SolutionField) -> bool:
    u = f.slots
    return abs(u[1] - u[0]) > BOUNDARY_TOL or abs(u[-1] - u[-2]) > BOUNDARY_TOL


def thread_cap() -> int:
    """Worker cap from LWR_THREADS (the marching itself is sequential)."""
    try:
        return max(1, int(os.environ.get("LWR_THREADS", "1")))
    except ValueError:
        return 1


@dataclass(frozen=True)
class GroupStep:
    """Interface data for one step of a (possibly merged) group."""

    ids: tuple
    y_n: float
    y_np1: float
    s: float
    q: float

    def as_step(self) -> InterfaceStep:
        key = self.ids[0] if len(self.ids) == 1 else self.ids
        return InterfaceStep(key, self.y_n, self.y_np1, self.s, self.q)


def group_step(members: Sequence[DiscreteInterface], n: int) -> GroupStep:
    """Fold the members pairwise in ascending id order: mean positions and speeds, min constraint."""
    ordered = sorted(members, key=lambda d: str(d.id))
    data = [(d.position(n), d.position(n + 1), d.slope(n), d.constraint(n)) for d in ordered]
    y0, y1, s, q = reduce(
        lambda a, b: (0.5 * (a[0] + b[0]), 0.5 * (a[1] + b[1]), 0.5 * (a[2] + b[2]), min(a[3], b[3])), data
    )
    return GroupStep(tuple(d.id for d in ordered), y0, y1, s, q)


@dataclass(frozen=True)
class Transition:
    n: int
    before: tuple
    after: tuple
    mass_before: float
    mass_after: float

    @property
    def drift(self) -> float:
        return abs(self.mass_after - self.mass_before)


@dataclass
class MultiScenarioState:
    field: SolutionField
    groups: tuple = ()  # (member ids, y) pairs in increasing position


def endpoint_transition(state: MultiScenarioState, positions: dict) -> tuple[MultiScenarioState, Transition | None]:
    """Move the field onto the mesh adapted to ``positions`` (group ids -> y^n).

    Covers activation, deactivation, merging and separation alike.
    """
    grid = state.field.grid
    mesh = adapted_mesh(grid, list(positions.values()))
    groups = tuple(sorted(positions.items(), key=lambda kv: kv[1]))
    if mesh.interfaces == state.field.interfaces:
        return MultiScenarioState(state.field, groups), None
    before = state.field
    after = reproject(before, mesh)
    tr = Transition(before.n, state.groups, groups, before.mass(), after.mass())
    return MultiScenarioState(after, groups), tr


def advance_multi(
    model: FluxModel, state: MultiScenarioState, interfaces: Sequence[DiscreteInterface], config: SchemeConfig
) -> tuple[MultiScenarioState, StepRecord, Transition | None]:
    n = state.field.n
    by_id = {d.id: d for d in interfaces}
    active = {d.id: d.position(n) for d in interfaces if d.active(n)}
    groups = cluster(active, config.dx)
    steps = [group_step([by_id[i] for i in g], n) for g in groups]
    state, tr = endpoint_transition(state, {g.ids: g.y_n for g in steps})
    new_field, rec = advance_field(model, state.field, [g.as_step() for g in steps], config.dt)
    moved = tuple(sorted(((g.ids, g.y_np1) for g in steps), key=lambda kv: kv[1]))
    return MultiScenarioState(new_field, moved), rec, tr


@dataclass(frozen=True)
class Snapshot:
    t: float
    n: int
    nodes: np.ndarray
    values: np.ndarray
    interfaces: tuple  # (group key, y) pairs


@dataclass
class Run:
    model: FluxModel
    grid: Grid
    config: SchemeConfig
    interfaces: tuple
    steps: list = field(default_factory=list)
    transitions: list = field(default_factory=list)
    snapshots: dict = field(default_factory=dict)
    history: list | None = None
    final: SolutionField | None = None

    @property
    def dt(self) -> float:
        return self.config.dt

    def mass_errors(self) -> np.ndarray:
        return np.array([r.balance_error(self.dt) for r in self.steps])

    def transition_drifts(self) -> np.ndarray:
        return np.array([t.drift for t in self.transitions])

    def field_at(self, n: int) -> SolutionField:
        if self.history is None:
            raise LWRError("run was made without keep_history")
        return self.history[n]


def initial_positions(interfaces: Sequence[DiscreteInterface], dx: float) -> dict:
    active = {d.id: d.position(0) for d in interfaces if d.active(0)}
    by_id = {d.id: d for d in interfaces}
    return {tuple(sorted(g, key=str)): group_step([by_id[i] for i in g], 0).y_n for g in cluster(active, dx)}


def simulate(
    model: FluxModel,
    grid: Grid,
    config: SchemeConfig,
    rho0,
    interfaces: Iterable[InterfaceSpec | DiscreteInterface] = (),
    snapshots: Sequence[float] = (),
    keep_history: bool = False,
    n_steps: int | None = None,
) -> Run:
    """March from t=0 to the horizon, recording per-step balances and requested snapshots."""
    if abs(config.dx - grid.dx) > 1e-15 * grid.dx:
        raise ValueError("grid and config disagree on dx")
    dt = config.dt
    total = config.n_steps if n_steps is None else n_steps
    disc = tuple(
        d if isinstance(d, DiscreteInterface) else discretize(d, dt, config.horizon, model) for d in interfaces
    )
    pos0 = initial_positions(disc, grid.dx)
    mesh0 = adapted_mesh(grid, list(pos0.values()))
    state = MultiScenarioState(project_initial(rho0, mesh0), tuple(sorted(pos0.items(), key=lambda kv: kv[1])))
    run = Run(model, grid, config, disc, history=[] if keep_history else None)
    want = {}
    for t in snapshots:
        want.setdefault(min(int(round(t / dt)), total), []).append(float(t))

    def capture(st: MultiScenarioState):
        f = st.field
        if run.history is not None:
            run.history.append(f)
        for t in want.get(f.n, ()):
            run.snapshots[t] = Snapshot(t, f.n, f.nodes(), f.values(), st.groups)

    capture(state)
    warned = _boundary_disturbed(state.field)
    for _ in range(total):
        try:
            state, rec, tr = advance_multi(model, state, disc, config)
        except LWRError as exc:
            exc.args = (f"step {state.field.n}: {exc}",)
            raise
        if tr is not None:
            run.transitions.append(tr)
        run.steps.append(rec)
        capture(state)
        if not warned and _boundary_disturbed(state.field):
            warned = True
            warnings.warn(f"step {rec.n}: waves reached the domain boundary", BoundaryWarning, stacklevel=2)
    run.final = state.field
    return run
