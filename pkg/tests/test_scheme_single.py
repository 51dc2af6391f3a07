import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from lwrcross.errors import CFLViolation, InvalidStep, PhaseInvariantViolation
from lwrcross.flux import FluxModel, constraint_admissible, engquist_osher, germ_couple, remainder
from lwrcross.mesh import NUDGE, AdaptedMesh, Grid, StepCase, build_step_mesh, locate_interface
from lwrcross.scheme import (
    InterfaceStep,
    Piecewise,
    SchemeConfig,
    SolutionField,
    adapted_mesh,
    advance,
    advance_field,
    cell_means,
    constant,
    indicator,
    project_initial,
    reproject,
    step_away_from_interface,
    step_interface_left,
    step_interface_right,
)
from lwrcross.trajectory import InterfaceSpec, discretize

Q = FluxModel.quadratic()
G = Grid(0.0, 0.1, 20)
density = st.floats(0.0, 1.0)


def eo_reference(u, lam):
    """Plain three-point EO scheme with outflow ghosts."""
    ext = np.concatenate([[u[0]], u, [u[-1]]])
    flux = engquist_osher(Q, ext[:-1], ext[1:])
    return u - lam * (flux[1:] - flux[:-1])


@st.composite
def interface_step(draw):
    s = draw(st.floats(0.0, 0.6))
    q = draw(st.floats(0.0, Q.max_shifted(s), exclude_max=True))
    y0 = draw(st.floats(0.45, 1.4))
    lam = draw(st.floats(0.05, 0.5 / (1.0 + s)))
    dt = lam * G.dx
    return s, q, y0, y0 + s * dt, dt


class TestConfig:
    def test_cfl(self):
        SchemeConfig(0.01, 0.5 - 1e-12, 1.0, 1.0)
        with pytest.raises(CFLViolation):
            SchemeConfig(0.01, 0.5, 1.0, 1.0)
        cfg = SchemeConfig.for_problem(Q, 0.01, 0.35, 1.0, [0.3])
        assert cfg.L == pytest.approx(1.3) and cfg.dt == pytest.approx(0.0035)
        assert cfg.n_steps == 286


class TestInitial:
    def test_indicator_exact_mean(self):
        rho0 = indicator(1.0, 3.0, 0.8)
        assert float(rho0.means(0.95, 1.05)) == pytest.approx(0.4, abs=1e-14)
        assert float(rho0.means(1.1, 1.2)) == pytest.approx(0.8, abs=1e-14)

    def test_constant(self):
        f = project_initial(constant(0.37), AdaptedMesh(G))
        assert np.all(f.values() == 0.37)

    def test_callable_quadrature(self):
        vals = cell_means(lambda x: x * x, np.array([0.0, 0.5]), np.array([0.5, 1.0]))
        assert np.allclose(vals, [1 / 12, 7 / 12], atol=1e-14)

    def test_piecewise_validation(self):
        with pytest.raises(ValueError):
            Piecewise((1.0,), (0.1,))
        with pytest.raises(ValueError):
            Piecewise((2.0, 1.0), (0.1, 0.2, 0.3))

    def test_adapted_projection_mass(self):
        rho0 = indicator(0.33, 1.27, 0.6, 0.1)
        f = project_initial(rho0, adapted_mesh(G, [0.87]))
        exact = 0.1 * 2.0 + 0.5 * (1.27 - 0.33)
        assert f.mass() == pytest.approx(exact, abs=1e-14)
        assert np.isnan(f.slots[8]) and f.values().size == 19


class TestPointUpdates:
    def test_constant_state(self):
        assert step_away_from_interface(Q, 0.3, 0.3, 0.3, 0.4) == pytest.approx(0.3, abs=1e-16)

    def test_stationary_shock(self):
        # rho = 1 left of 0, 0 right; the cell centred on 0 holds 0.5 and sees the
        # same EO flux (0.25) on both sides
        assert engquist_osher(Q, 1.0, 0.5) == engquist_osher(Q, 0.5, 0.0) == 0.25
        assert step_away_from_interface(Q, 1.0, 0.5, 0.0, 0.4) == 0.5

    @given(density, density, density, st.floats(0.01, 0.5))
    def test_local_bounds(self, a, b, c, lam):
        v = step_away_from_interface(Q, a, b, c, lam)
        assert min(a, b, c) - 1e-12 <= v <= max(a, b, c) + 1e-12

    def test_interface_extremes(self):
        m = build_step_mesh(G, 0.85, 0.86)
        for k in (0.0, 1.0):
            assert step_interface_left(Q, k, k, k, m, 0.25, 0.1, 0.04) == pytest.approx(k, abs=1e-14)
            assert step_interface_right(Q, k, k, k, k, m, 0.25, 0.1, 0.04) == pytest.approx(k, abs=1e-14)

    def test_constant_identity_frozen(self):
        # stationary interface at 0.85, dx = 0.1, dt = 0.04: both interface cells have width 0.15
        # and the remainder at 0.5 is 0.3, so the cells move by 0.04*0.3/(2*0.15) = 0.04
        m = build_step_mesh(G, 0.85, 0.85)
        assert step_interface_left(Q, 0.5, 0.5, 0.5, m, 0.0, 0.1, 0.04) == pytest.approx(0.54, abs=1e-14)
        assert step_interface_right(Q, 0.5, 0.5, 0.5, 0.5, m, 0.0, 0.1, 0.04) == pytest.approx(0.46, abs=1e-14)

    @given(interface_step(), density)
    def test_constant_identity(self, step, kappa):
        s, q, y0, y1, dt = step
        m = build_step_mesh(G, y0, y1)
        r = float(remainder(Q, s, kappa, q))
        left = step_interface_left(Q, kappa, kappa, kappa, m, s, q, dt)
        right = step_interface_right(Q, kappa, kappa, kappa, kappa, m, s, q, dt)
        # a node-coincidence nudge shortens the displacement by up to NUDGE dx
        tol = 1e-13 + 2 * NUDGE * G.dx / min(m.left.width_np1, m.right.width_np1)
        assert left == pytest.approx(kappa + dt * r / (2 * m.left.width_np1), abs=tol)
        assert right == pytest.approx(kappa - dt * r / (2 * m.right.width_np1), abs=tol)

    @given(interface_step(), st.lists(density, min_size=4, max_size=4), st.integers(0, 3))
    def test_monotone(self, step, vals, k):
        s, q, y0, y1, dt = step
        m = build_step_mesh(G, y0, y1)
        h = 1e-7
        up = list(vals)
        up[k] = min(up[k] + h, 1.0)
        if k < 3:
            a = step_interface_left(Q, *vals[:3], m, s, q, dt)
            b = step_interface_left(Q, *up[:3], m, s, q, dt)
            assert b - a >= -1e-12
        a = step_interface_right(Q, *vals, m, s, q, dt)
        b = step_interface_right(Q, *up, m, s, q, dt)
        assert b - a >= -1e-12


class TestAdvance:
    def test_no_interface_is_plain_eo(self):
        rng = np.random.default_rng(3)
        u = rng.uniform(0, 1, 20)
        f = SolutionField(0, AdaptedMesh(G), u.copy())
        new, rec = advance_field(Q, f, [], 0.04)
        assert np.max(np.abs(new.values() - eo_reference(u, 0.4))) <= 1e-14
        assert rec.balance_error(0.04) <= 1e-15

    def test_g2_constant_is_stationary(self):
        cfg = SchemeConfig(0.1, 0.4, 1.0, 1.0)
        iface = discretize(InterfaceSpec(1, ((0, 0.85), (1, 0.85)), ((0, 1, 0.2),)), cfg.dt, 1.0)
        f = project_initial(constant(0.1), adapted_mesh(G, [0.85]))
        for _ in range(20):
            f = advance(Q, f, iface, cfg)
        assert np.allclose(f.values(), 0.1, atol=1e-15)

    def test_mismatched_mesh(self):
        f = project_initial(constant(0.5), adapted_mesh(G, [0.85]))
        with pytest.raises(PhaseInvariantViolation):
            advance_field(Q, f, [InterfaceStep(1, 0.95, 0.95, 0.0, 0.1)], 0.04)

    def test_too_fast(self):
        f = project_initial(constant(0.5), adapted_mesh(G, [0.85]))
        with pytest.raises(InvalidStep):
            advance_field(Q, f, [InterfaceStep(1, 0.85, 0.97, 3.0, 0.0)], 0.04)

    def test_shift_duplicates_left_value(self):
        f = project_initial(indicator(0.3, 0.9, 0.7, 0.2), adapted_mesh(G, [0.88]))
        new, rec = advance_field(Q, f, [InterfaceStep(1, 0.88, 0.91, 0.75, 0.05)], 0.04)
        r = rec.interfaces[0]
        assert r.case is StepCase.SHIFT_RIGHT and (r.j_n, r.j_np1) == (8, 9)
        assert new.slots[8] == new.slots[7] and np.isnan(new.slots[9])
        assert new.interfaces == ((9, 0.91),)

    @given(
        st.lists(density, min_size=20, max_size=20),
        st.floats(0.0, 0.6),
        st.floats(0.0, 1.0),
        st.floats(0.45, 1.4),
        st.integers(1, 12),
    )
    def test_conservation_bounds_and_cap(self, vals, s, qfrac, y0, steps):
        q = qfrac * Q.max_shifted(s) * (1 - 1e-9)
        lam = 0.5 / (1.0 + s) * 0.99
        dt = lam * G.dx
        mesh = adapted_mesh(G, [y0])
        f = reproject(project_initial(Piecewise(tuple(G.nodes()[1:-1]), tuple(vals)), mesh), mesh)
        y = mesh.interfaces[0][1]
        for n in range(steps):
            if locate_interface(G.dx, y + s * dt, 0.0, 20)[0] > 15:
                break
            f, rec = advance_field(Q, f, [InterfaceStep(1, y, y + s * dt, s, q)], dt)
            y = f.interfaces[0][1]
            assert rec.balance_error(dt) <= 1e-10
            assert rec.interfaces[0].f_int <= q
            v = f.values()
            assert v.min() >= -1e-12 and v.max() <= 1 + 1e-12

    def test_locality_cone(self):
        rng = np.random.default_rng(11)
        g = Grid(0.0, 0.01, 200)
        u = rng.uniform(0, 1, 200)
        w = u.copy()
        w[100] = 1.0 - w[100]
        a = SolutionField(0, AdaptedMesh(g), u)
        b = SolutionField(0, AdaptedMesh(g), w)
        for k in range(1, 30):
            a, _ = advance_field(Q, a, [], 0.004)
            b, _ = advance_field(Q, b, [], 0.004)
            diff = np.flatnonzero(a.values() != b.values())
            assert diff.min() >= 100 - k and diff.max() <= 100 + k

    def test_saturated_traces_coarse(self):
        g = Grid.from_bounds(-1.0, 1.0, 0.02)
        cfg = SchemeConfig(0.02, 0.4, 1.0, 2.0)
        iface = discretize(InterfaceSpec(1, ((0, 0.0), (2, 0.0)), ((0, 2, 0.1),)), cfg.dt, 2.0)
        f = project_initial(constant(0.5), adapted_mesh(g, [0.0]))
        for _ in range(cfg.n_steps):
            f, rec = advance_field(Q, f, [InterfaceStep(1, 0.0, 0.0, 0.0, 0.1)], cfg.dt)
        gc = germ_couple(Q, 0.0, 0.1)
        r = rec.interfaces[0]
        assert abs(r.left_trace - gc.rho_hat) <= 0.02 and abs(r.right_trace - gc.rho_check) <= 0.02
        assert iface.n_end == cfg.n_steps
