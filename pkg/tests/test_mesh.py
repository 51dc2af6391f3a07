import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from lwrcross.errors import InvalidStep, OutOfDomain
from lwrcross.mesh import (
    NUDGE,
    AdaptedMesh,
    CellKind,
    Grid,
    StepCase,
    build_step_mesh,
    check_separation,
    locate_interface,
)

G = Grid(0.0, 0.1, 20)


class TestLocate:
    def test_interior(self):
        assert locate_interface(0.1, 0.25) == (2, 0.25)
        assert locate_interface(0.1, 0.299999)[0] == 2

    def test_nudge_on_node(self):
        j, y = locate_interface(0.1, 0.2)
        assert j == 2 and y == pytest.approx(0.2 + 1e-10, abs=1e-15)
        assert 0.2 < y < 0.3

    def test_nudge_near_node_from_below(self):
        j, y = locate_interface(0.1, 0.3 - 1e-13)
        assert j == 3 and y > 0.3

    def test_margin(self):
        with pytest.raises(OutOfDomain):
            locate_interface(0.1, 0.15, 0.0, 20)
        with pytest.raises(OutOfDomain):
            locate_interface(0.1, 1.75, 0.0, 20)
        assert locate_interface(0.1, 1.65, 0.0, 20)[0] == 16


class TestStepMesh:
    def test_stay(self):
        m = build_step_mesh(G, 0.25, 0.27)
        assert m.case is StepCase.STAY and m.j_n == m.j_np1 == 2

    def test_shift_right(self):
        m = build_step_mesh(G, 0.28, 0.32)
        assert m.case is StepCase.SHIFT_RIGHT and m.j_np1 == 3
        assert m.j_np1 == locate_interface(0.1, 0.32)[0]

    def test_stationary(self):
        m = build_step_mesh(G, 0.25, 0.25)
        assert m.case is StepCase.STAY and m.j_n == 2

    def test_geometry(self):
        m = build_step_mesh(G, 0.55, 0.57)
        assert m.left.kind is CellKind.LEFT_INTERFACE and m.right.kind is CellKind.RIGHT_INTERFACE
        assert (m.left.left_n, m.left.right_n, m.left.right_np1) == (pytest.approx(0.4), 0.55, 0.57)
        assert (m.right.left_n, m.right.right_n) == (0.55, pytest.approx(0.7))

    def test_invalid_steps(self):
        with pytest.raises(InvalidStep):
            build_step_mesh(G, 0.55, 0.54)
        with pytest.raises(InvalidStep):
            build_step_mesh(G, 0.55, 0.62)

    @given(st.floats(0.2, 1.5), st.floats(0.0, 0.05))
    def test_shift_iff_floor_crossing(self, y0, dy):
        m = build_step_mesh(G, y0, y0 + dy)
        j0 = locate_interface(0.1, y0)[0]
        j1 = locate_interface(0.1, y0 + dy)[0]
        assert (m.case is StepCase.SHIFT_RIGHT) == (j1 == j0 + 1)
        assert (m.case is StepCase.STAY) == (j1 == j0)

    @given(st.floats(0.2, 1.5), st.floats(0.0, 0.05))
    def test_cells_tile_the_strip(self, y0, dy):
        m = build_step_mesh(G, y0, y0 + dy)
        for level in (0, 1):
            cells = m.cells()
            widths = [c.width_n if level == 0 else c.width_np1 for c in cells]
            assert all(w > 0 for w in widths)
            assert abs(sum(widths) - 2.0) <= 1e-10 * 20
            left_edges = [c.left_n if level == 0 else c.left_np1 for c in cells]
            assert np.all(np.diff(left_edges) > 0)


class TestAdaptedMesh:
    @given(st.floats(0.2, 1.65))
    def test_chi_invariants(self, y):
        j, yy = locate_interface(0.1, y, 0.0, 20)
        mesh = AdaptedMesh(G, ((j, yy),))
        chi = mesh.nodes()
        assert chi.size == 20 and np.all(np.diff(chi) > 0)
        assert chi[j] == yy
        assert np.array_equal(chi[:j], G.nodes()[:j])
        assert np.array_equal(chi[j + 1:], G.nodes()[j + 2:])
        w = np.diff(chi)
        # interface cells span ]x_{j-1}, y[ and ]y, x_{j+2}[
        assert 0.1 < w[j - 1] < 0.2 and 0.1 < w[j] < 0.2
        assert abs(w.sum() - 2.0) <= 1e-12
        sw = mesh.slot_widths()
        assert sw[j] == 0 and abs(sw.sum() - 2.0) <= 1e-12

    def test_cell_values_drop_holes(self):
        mesh = AdaptedMesh(G, ((5, 0.55),))
        slots = np.arange(20.0)
        slots[5] = np.nan
        vals = mesh.cell_values(slots)
        assert vals.size == 19 and not np.isnan(vals).any()

    def test_interface_chi_indices(self):
        mesh = AdaptedMesh(G, ((5, 0.55), (12, 1.25)))
        assert mesh.interface_chi_indices() == [5, 11]
        chi = mesh.nodes()
        assert chi[5] == 0.55 and chi[11] == 1.25

    def test_separation(self):
        assert check_separation(G, [(5, 0.55), (9, 0.95)])
        assert not check_separation(G, [(5, 0.55), (8, 0.85)])

    def test_grid_from_bounds(self):
        g = Grid.from_bounds(0.0, 14.0, 0.005)
        assert g.n_cells == 2800 and g.x_max == pytest.approx(14.0)
        with pytest.raises(ValueError):
            Grid.from_bounds(0.0, 1.0, 0.3)
        assert math.isclose(NUDGE, 1e-9)
