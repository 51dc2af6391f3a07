"""Interface-fitted mesh.

The grid keeps one storage slot per uniform cell ``]x_k, x_{k+1}[``. An
interface located in ``]x_J, x_{J+1}[`` removes the nodes ``x_J`` and
``x_{J+1}`` and inserts its position ``y``: slot ``J-1`` then holds the cell
``]x_{J-1}, y[``, slot ``J+1`` the cell ``]y, x_{J+2}[`` and slot ``J`` is an
empty hole. Both interface cells are therefore wider than ``dx`` and narrower
than ``2 dx``.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import InvalidStep, OutOfDomain

NUDGE = 1e-9


@dataclass(frozen=True)
class Grid:
    x_min: float
    dx: float
    n_cells: int

    @classmethod
    def from_bounds(cls, x_min: float, x_max: float, dx: float) -> "Grid":
        n = int(round((x_max - x_min) / dx))
        if n < 8 or abs(x_min + n * dx - x_max) > 1e-9 * max(1.0, abs(x_max)):
            raise ValueError(f"domain [{x_min}, {x_max}] is not a whole number (>= 8) of cells of size {dx}")
        return cls(float(x_min), float(dx), n)

    @property
    def x_max(self) -> float:
        return self.x_min + self.n_cells * self.dx

    def node(self, k):
        return self.x_min + k * self.dx

    def nodes(self) -> np.ndarray:
        return self.x_min + np.arange(self.n_cells + 1) * self.dx

    def centers(self) -> np.ndarray:
        return self.x_min + (np.arange(self.n_cells) + 0.5) * self.dx


def locate_interface(dx: float, y: float, x_min: float = 0.0, n_cells: int | None = None) -> tuple[int, float]:
    """Index j with y strictly inside ]x_j, x_{j+1}[, nudging y off a node if needed."""
    j = int(math.floor((y - x_min) / dx))
    for cand in (j, j + 1):
        node = x_min + cand * dx
        if abs(y - node) <= NUDGE * dx:
            j, y = cand, node + NUDGE * dx
            break
    if n_cells is not None and (j < 2 or j + 3 > n_cells - 1):
        raise OutOfDomain(f"interface at {y} is closer than the required margin to the domain boundary")
    return j, y


class StepCase(enum.Enum):
    STAY = "Stay"
    SHIFT_RIGHT = "ShiftRight"


class CellKind(enum.Enum):
    RECTANGLE = "Rectangle"
    LEFT_INTERFACE = "LeftInterfaceParallelogram"
    RIGHT_INTERFACE = "RightInterfaceParallelogram"


@dataclass(frozen=True)
class CellGeometry:
    left_n: float
    right_n: float
    left_np1: float
    right_np1: float
    kind: CellKind

    @property
    def width_n(self) -> float:
        return self.right_n - self.left_n

    @property
    def width_np1(self) -> float:
        return self.right_np1 - self.left_np1


@dataclass(frozen=True)
class StepMesh:
    """Geometry of one interface over one time step."""

    case: StepCase
    j_n: int
    j_np1: int
    y_n: float
    y_np1: float
    left: CellGeometry
    right: CellGeometry
    grid: Grid

    def chi(self, level: int) -> np.ndarray:
        j, y = (self.j_n, self.y_n) if level == 0 else (self.j_np1, self.y_np1)
        return AdaptedMesh(self.grid, ((j, y),)).nodes()

    def cells(self, level: int = 0) -> list[CellGeometry]:
        """All space-time cells of the step; the right interface cell may absorb one uniform cell."""
        g = self.grid
        out = []
        k = 0
        while k < g.n_cells:
            if k == self.j_n - 1:
                out.append(self.left)
                k = self.j_n + 1
                continue
            if k == self.j_n + 1:
                out.append(self.right)
                k = self.j_n + (3 if self.case is StepCase.SHIFT_RIGHT else 2)
                continue
            a, b = g.node(k), g.node(k + 1)
            out.append(CellGeometry(a, b, a, b, CellKind.RECTANGLE))
            k += 1
        return out


def build_step_mesh(grid: Grid, y_n: float, y_np1: float) -> StepMesh:
    dx = grid.dx
    if y_np1 < y_n:
        raise InvalidStep("interface moves left")
    if y_np1 - y_n > 0.5 * dx * (1 + 1e-9) + 2 * NUDGE * dx:
        raise InvalidStep(f"interface moves by {y_np1 - y_n} > dx/2 in one step")
    j0, y0 = locate_interface(dx, y_n, grid.x_min, grid.n_cells)
    j1, y1 = locate_interface(dx, y_np1, grid.x_min, grid.n_cells)
    if j1 == j0:
        case = StepCase.STAY
        right_edge = grid.node(j0 + 2)
        right = CellGeometry(y0, right_edge, y1, right_edge, CellKind.RIGHT_INTERFACE)
    elif j1 == j0 + 1:
        case = StepCase.SHIFT_RIGHT
        right_edge = grid.node(j0 + 3)
        right = CellGeometry(y0, right_edge, y1, right_edge, CellKind.RIGHT_INTERFACE)
    else:
        raise InvalidStep(f"interface jumps from cell {j0} to cell {j1}")
    left_edge = grid.node(j0 - 1)
    left = CellGeometry(left_edge, y0, left_edge, y1, CellKind.LEFT_INTERFACE)
    return StepMesh(case, j0, j1, y0, y1, left, right, grid)


@dataclass(frozen=True)
class AdaptedMesh:
    """A uniform grid modified around each (j, y) interface node (y already nudged)."""

    grid: Grid
    interfaces: tuple[tuple[int, float], ...] = ()

    def holes(self) -> list[int]:
        return [j for j, _ in self.interfaces]

    def slot_widths(self) -> np.ndarray:
        g = self.grid
        w = np.full(g.n_cells, g.dx)
        for j, y in self.interfaces:
            w[j - 1] = y - g.node(j - 1)
            w[j] = 0.0
            w[j + 1] = g.node(j + 2) - y
        return w

    def nodes(self) -> np.ndarray:
        x = self.grid.nodes()
        if not self.interfaces:
            return x
        drop = [k for j, _ in self.interfaces for k in (j, j + 1)]
        extra = [y for _, y in self.interfaces]
        return np.sort(np.concatenate([np.delete(x, drop), extra]))

    def cell_values(self, slots: np.ndarray) -> np.ndarray:
        if not self.interfaces:
            return np.asarray(slots).copy()
        return np.delete(slots, self.holes())

    def interface_chi_indices(self) -> list[int]:
        """chi-index of every interface node (the j_n of the chi numbering)."""
        out = []
        for rank, (j, _) in enumerate(sorted(self.interfaces)):
            out.append(j - rank)
        return out


def check_separation(grid: Grid, interfaces: Sequence[tuple[int, float]]) -> bool:
    js = sorted(j for j, _ in interfaces)
    return all(b - a >= 4 for a, b in zip(js[:-1], js[1:]))
