"""Interface trajectories and constraints, their time discretisation, and merge scheduling."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import InadmissibleConstraint, ScheduleError, ValidationError
from .flux import FluxModel, constraint_admissible

MERGE_CELLS = 4


@dataclass(frozen=True)
class InterfaceSpec:
    """A nondecreasing piecewise-linear trajectory carrying a piecewise-constant constraint.

    ``path`` is a sequence of ``(t, y)`` breakpoints, ``constraint`` a sequence of
    ``(t_start, t_end, q)`` segments covering ``[path[0].t, path[-1].t]``.
    """

    id: int
    path: tuple[tuple[float, float], ...]
    constraint: tuple[tuple[float, float, float], ...]

    def __post_init__(self):
        object.__setattr__(self, "path", tuple((float(t), float(y)) for t, y in self.path))
        object.__setattr__(self, "constraint", tuple((float(a), float(b), float(q)) for a, b, q in self.constraint))

    @property
    def start(self) -> float:
        return self.path[0][0]

    @property
    def end(self) -> float:
        return self.path[-1][0]

    def position(self, t):
        ts, ys = zip(*self.path)
        return np.interp(t, ts, ys)

    def slopes(self) -> list[tuple[float, float, float]]:
        return [
            (t0, t1, (y1 - y0) / (t1 - t0))
            for (t0, y0), (t1, y1) in zip(self.path[:-1], self.path[1:])
        ]

    def max_speed(self) -> float:
        return max((abs(v) for _, _, v in self.slopes()), default=0.0)

    def constraint_integral(self, a: float, b: float) -> float:
        """Integral of q over [a, b]; q is extended by its end values outside its support."""
        segs = list(self.constraint)
        total = 0.0
        first, last = segs[0], segs[-1]
        if a < first[0]:
            total += (min(b, first[0]) - a) * first[2]
        if b > last[1]:
            total += (b - max(a, last[1])) * last[2]
        for t0, t1, q in segs:
            lo, hi = max(a, t0), min(b, t1)
            if hi > lo:
                total += (hi - lo) * q
        return total

    def validate(self, model: FluxModel) -> None:
        if len(self.path) < 2:
            raise ValidationError(f"interface {self.id}.path", "needs at least two breakpoints")
        if self.start < 0:
            raise ValidationError(f"interface {self.id}.path", "start time must be nonnegative")
        for (t0, y0), (t1, y1) in zip(self.path[:-1], self.path[1:]):
            if not t1 > t0:
                raise ValidationError(f"interface {self.id}.path", "times must be strictly increasing")
            if y1 < y0:
                raise ValidationError(f"interface {self.id}.path", f"decreasing segment on [{t0}, {t1}]")
        if not self.constraint:
            raise ValidationError(f"interface {self.id}.constraint", "empty")
        if abs(self.constraint[0][0] - self.start) > 1e-12 or abs(self.constraint[-1][1] - self.end) > 1e-12:
            raise ValidationError(f"interface {self.id}.constraint", "must cover the trajectory time span")
        for (a0, b0, _), (a1, _, _) in zip(self.constraint[:-1], self.constraint[1:]):
            if abs(b0 - a1) > 1e-12:
                raise ValidationError(f"interface {self.id}.constraint", "segments must be contiguous")
        for a, b, q in self.constraint:
            if not b > a:
                raise ValidationError(f"interface {self.id}.constraint", "empty segment")
            for t0, t1, s in self.slopes():
                if min(b, t1) > max(a, t0) and not constraint_admissible(model, s, q):
                    raise ValidationError(
                        f"interface {self.id}.constraint",
                        f"q={q} inadmissible for speed {s} on [{max(a, t0)}, {min(b, t1)}]",
                    )


@dataclass(frozen=True, eq=False)
class DiscreteInterface:
    """Per-step data of an interface: active for the updates n_start <= n < n_end.

    ``y[k]`` is the position at level ``n_start + k`` (so it has one more entry
    than ``s`` and ``q``).
    """

    id: int | tuple
    n_start: int
    n_end: int
    s: np.ndarray
    q: np.ndarray
    y: np.ndarray
    dt: float

    def active(self, n: int) -> bool:
        return self.n_start <= n < self.n_end

    def position(self, n: int) -> float:
        return float(self.y[n - self.n_start])

    def slope(self, n: int) -> float:
        return float(self.s[n - self.n_start])

    def constraint(self, n: int) -> float:
        return float(self.q[n - self.n_start])


def n_steps_for(horizon: float, dt: float) -> int:
    return int(math.ceil(horizon / dt - 1e-9))


def discretize(spec: InterfaceSpec, dt: float, horizon: float, model: FluxModel | None = None) -> DiscreteInterface:
    """Exact step averages of the slope and the constraint.

    Raises InadmissibleConstraint when an averaged pair fails the admissibility
    test (only checked when ``model`` is given).
    """
    if dt <= 0:
        raise ValueError("dt must be positive")
    total = n_steps_for(horizon, dt)
    n0 = min(int(round(spec.start / dt)), total)
    n1 = min(int(round(spec.end / dt)), total)
    n1 = max(n1, n0)
    times = (np.arange(n0, n1 + 1)) * dt
    ypts = spec.position(times)
    s = np.diff(ypts) / dt
    q = np.array([spec.constraint_integral(a, b) / dt for a, b in zip(times[:-1], times[1:])])
    y = np.empty(n1 - n0 + 1)
    if y.size:
        y[0] = ypts[0]
        for k in range(s.size):
            y[k + 1] = y[k] + s[k] * dt
    for k in range(s.size):
        if s[k] + q[k] < 0:
            raise InadmissibleConstraint(f"interface {spec.id}: s+q < 0 at step {n0 + k}")
        if model is not None and not constraint_admissible(model, s[k], q[k]):
            raise InadmissibleConstraint(
                f"interface {spec.id}: averaged pair (s={s[k]}, q={q[k]}) inadmissible at step {n0 + k}"
            )
    return DiscreteInterface(spec.id, n0, n1, s, q, y, dt)


def combine(a: DiscreteInterface, b: DiscreteInterface, n: int) -> tuple[float, float, float, float]:
    """(y^n, y^{n+1}, s^n, q^n) of the mean trajectory with the minimum constraint."""
    return (
        0.5 * (a.position(n) + b.position(n)),
        0.5 * (a.position(n + 1) + b.position(n + 1)),
        0.5 * (a.slope(n) + b.slope(n)),
        min(a.constraint(n), b.constraint(n)),
    )


def merged_interface(a: DiscreteInterface, b: DiscreteInterface, steps: range) -> DiscreteInterface:
    if not steps:
        raise ValueError("empty step range")
    n0, n1 = steps.start, steps.stop
    for n in (n0, n1 - 1):
        if not (a.active(n) and b.active(n)):
            raise ValueError(f"step {n} is outside the support of one of the interfaces")
    ka, kb = n0 - a.n_start, n0 - b.n_start
    m = n1 - n0
    s = 0.5 * (a.s[ka:ka + m] + b.s[kb:kb + m])
    q = np.minimum(a.q[ka:ka + m], b.q[kb:kb + m])
    y = 0.5 * (a.y[ka:ka + m + 1] + b.y[kb:kb + m + 1])
    return DiscreteInterface((a.id, b.id), n0, n1, s, q, y, a.dt)


@dataclass(frozen=True)
class Phase:
    n_start: int  # first update step of the phase
    n_end: int  # one past the last update step
    groups: tuple[tuple, ...]  # ids handled together; singletons are independent interfaces

    @property
    def merged(self) -> bool:
        return any(len(g) > 1 for g in self.groups)


@dataclass(frozen=True)
class MergeSchedule:
    phases: tuple[Phase, ...]
    n1: int | None = None
    n2: int | None = None

    def groups_at(self, n: int) -> tuple[tuple, ...]:
        for p in self.phases:
            if p.n_start <= n < p.n_end:
                return p.groups
        return ()


def cluster(positions: dict, dx: float) -> tuple[tuple, ...]:
    """Single-linkage groups of interfaces whose neighbours sit within 4 dx."""
    if not positions:
        return ()
    order = sorted(positions, key=lambda k: (positions[k], str(k)))
    groups, cur = [], [order[0]]
    for prev, nxt in zip(order[:-1], order[1:]):
        if positions[nxt] - positions[prev] <= MERGE_CELLS * dx:
            cur.append(nxt)
        else:
            groups.append(tuple(sorted(cur, key=str)))
            cur = [nxt]
    groups.append(tuple(sorted(cur, key=str)))
    return tuple(groups)


def _compress(per_step: Sequence[tuple], n_steps: int) -> tuple[Phase, ...]:
    phases = []
    start = 0
    for n in range(1, n_steps + 1):
        if n == n_steps or per_step[n] != per_step[start]:
            phases.append(Phase(start, n, per_step[start]))
            start = n
    return tuple(phases)


def build_schedule(interfaces: Sequence[DiscreteInterface], dx: float, n_steps: int) -> MergeSchedule:
    """Grouping of the active interfaces for every update step."""
    per_step = []
    for n in range(n_steps):
        pos = {d.id: d.position(n) for d in interfaces if d.active(n)}
        per_step.append(cluster(pos, dx))
    return MergeSchedule(_compress(per_step, n_steps))


def build_merge_schedule(
    a: DiscreteInterface, b: DiscreteInterface, dx: float, crossing: int | None = None
) -> MergeSchedule:
    """Independent / merged phases for a pair of interfaces.

    N1 is the first step at which both are active and at most 4 dx apart. The
    merged phase lasts until the declared ``crossing`` step when given,
    otherwise until the pair separates by at least 4 dx again (N2) or one of
    them terminates.
    """
    n_steps = max(a.n_end, b.n_end)
    both = [n for n in range(max(a.n_start, b.n_start), min(a.n_end, b.n_end))]
    gap = {n: abs(a.position(n) - b.position(n)) for n in both}
    n1 = next((n for n in both if gap[n] <= MERGE_CELLS * dx), None)

    def independent(n):
        return tuple((d.id,) for d in sorted((a, b), key=lambda d: str(d.id)) if d.active(n))

    if n1 is None:
        per_step = [independent(n) for n in range(n_steps)]
        return MergeSchedule(_compress(per_step, n_steps))
    if crossing is not None:
        if crossing < n1:
            raise ScheduleError(f"crossing step {crossing} precedes the merge threshold N1={n1}")
        if crossing not in (a.n_end, b.n_end) or abs(a.position(crossing) - b.position(crossing)) > MERGE_CELLS * dx:
            raise ScheduleError("declared crossing is not a common endpoint of the pair")
        n2 = crossing
    else:
        n2 = next((n for n in both if n > n1 and gap[n] >= MERGE_CELLS * dx), min(a.n_end, b.n_end))
    pair = tuple(sorted((a.id, b.id), key=str))
    per_step = [pair if n1 <= n < n2 else independent(n) for n in range(n_steps)]
    per_step = [(g,) if g == pair else g for g in per_step]
    return MergeSchedule(_compress(per_step, n_steps), n1=n1, n2=n2)
