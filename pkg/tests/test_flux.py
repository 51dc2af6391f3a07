import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from lwrcross.errors import DomainError, InadmissibleConstraint, NoRoot
from lwrcross.flux import (
    FluxModel,
    GermClass,
    classify_germ,
    constraint_admissible,
    engquist_osher,
    entropy_flux,
    eval_flux,
    germ_couple,
    godunov_shifted,
    interface_flux,
    remainder,
    shifted_flux,
)

Q = FluxModel.quadratic()
density = st.floats(0.0, 1.0)
speed = st.floats(-0.5, 0.9)


def brute_godunov(m, s, a, b, step=1e-4):
    grid = np.append(np.arange(min(a, b), max(a, b), step), [a, b])
    vals = m.f(grid) - s * grid
    return vals.min() if a <= b else vals.max()


@st.composite
def admissible_pair(draw):
    s = draw(speed)
    lo, hi = max(0.0, -s), Q.max_shifted(s)
    q = draw(st.floats(lo, hi, exclude_max=True))
    return s, q


class TestFluxModel:
    def test_quadratic_invariants(self):
        assert Q.invariant_violations() == []
        assert Q.rho_bar == 0.5 and Q.mu == 2.0 and Q.lipschitz == 1.0

    def test_polynomial_matches_quadratic(self):
        p = FluxModel.polynomial((0.0, 1.0, -1.0))
        x = np.linspace(0, 1, 101)
        assert np.allclose(p.f(x), Q.f(x), atol=1e-15)
        assert abs(p.rho_bar - 0.5) < 1e-12 and abs(p.mu - 2.0) < 1e-12

    def test_non_bell_shaped_rejected(self):
        with pytest.raises(ValueError):
            FluxModel.polynomial((0.0, 1.0))
        with pytest.raises(ValueError):
            FluxModel.quadratic(0.0)

    def test_theta_and_max_shifted(self):
        assert Q.theta(0.0) == 0.5
        assert Q.theta(0.4) == pytest.approx(0.3)
        assert Q.max_shifted(0.4) == pytest.approx(0.09)
        assert Q.theta(2.0) == 0.0 and Q.theta(-2.0) == 1.0

    def test_general_theta_matches_closed_form(self):
        p = FluxModel.polynomial((0.0, 1.0, -1.0))
        for s in (-0.3, 0.0, 0.2, 0.7):
            assert p.theta(s) == pytest.approx(Q.theta(s), abs=1e-12)


class TestExamples:
    @pytest.mark.parametrize("rho, expected", [(0.0, 0.0), (0.5, 0.25), (0.8, 0.16)])
    def test_eval_flux(self, rho, expected):
        assert eval_flux(Q, rho) == pytest.approx(expected, abs=1e-15)

    @pytest.mark.parametrize("s, rho, expected", [(0.0, 0.5, 0.25), (0.3, 1.0, -0.3), (0.2, 0.4, 0.16)])
    def test_shifted_flux(self, s, rho, expected):
        assert shifted_flux(Q, s, rho) == pytest.approx(expected, abs=1e-15)

    @pytest.mark.parametrize("a, b, expected", [(0.3, 0.3, 0.0), (0.8, 0.2, 0.0), (0.5, 0.2, 0.09)])
    def test_entropy_flux(self, a, b, expected):
        assert entropy_flux(Q, 0.0, a, b) == pytest.approx(expected, abs=1e-15)

    def test_germ_couple_oracle(self):
        g = germ_couple(Q, 0.0, 0.1)
        assert g.rho_hat == pytest.approx((1 + math.sqrt(0.6)) / 2, abs=1e-12)
        assert g.rho_check == pytest.approx((1 - math.sqrt(0.6)) / 2, abs=1e-12)

    def test_germ_couple_degenerate(self):
        g = germ_couple(Q, 0.0, 0.25 - 1e-15)
        assert g.rho_hat == pytest.approx(0.5, abs=1e-6) and g.rho_check == pytest.approx(0.5, abs=1e-6)
        g0 = germ_couple(Q, 0.0, 0.0)
        assert (g0.rho_hat, g0.rho_check) == (1.0, 0.0)

    def test_germ_couple_errors(self):
        with pytest.raises(NoRoot):
            germ_couple(Q, 0.0, 0.25)
        with pytest.raises(InadmissibleConstraint):
            germ_couple(Q, -0.1, 0.05)

    @pytest.mark.parametrize("s, q, ok", [(0.0, 0.1, True), (0.0, 0.25, False), (-0.1, 0.05, False)])
    def test_constraint_admissible(self, s, q, ok):
        assert constraint_admissible(Q, s, q) is ok

    @pytest.mark.parametrize("kappa, expected", [(0.5, 0.3), (0.05, 0.0), (0.0, 0.0)])
    def test_remainder(self, kappa, expected):
        assert remainder(Q, 0.0, kappa, 0.1) == pytest.approx(expected, abs=1e-15)

    def test_classify(self):
        assert classify_germ(Q, 0.0, 0.1, 0.8873, 0.1127, tol=1e-4) is GermClass.G1
        assert classify_germ(Q, 0.0, 0.1, 0.05, 0.05) is GermClass.G2
        assert classify_germ(Q, 0.0, 0.1, 0.2, 0.8) is GermClass.NOT_IN_GERM
        g = germ_couple(Q, 0.0, 0.1)
        assert classify_germ(Q, 0.0, 0.1, g.rho_check, g.rho_hat) is GermClass.G3

    @pytest.mark.parametrize("a, b, expected", [(0.5, 0.5, 0.25), (0.2, 0.8, 0.07), (0.8, 0.2, 0.25)])
    def test_engquist_osher(self, a, b, expected):
        assert engquist_osher(Q, a, b) == pytest.approx(expected, abs=1e-15)

    @pytest.mark.parametrize("a, b, expected", [(0.8, 0.2, 0.25), (0.1, 0.9, 0.09), (0.3, 0.3, 0.21)])
    def test_godunov(self, a, b, expected):
        assert godunov_shifted(Q, 0.0, a, b) == pytest.approx(expected, abs=1e-15)
        assert godunov_shifted(Q, 0.0, a, b) == pytest.approx(brute_godunov(Q, 0.0, a, b), abs=1e-6)

    @pytest.mark.parametrize("q, a, b, expected", [(0.1, 0.8, 0.2, 0.1), (0.1, 0.05, 0.05, 0.0475), (0.0, 0.5, 0.5, 0.0)])
    def test_interface_flux(self, q, a, b, expected):
        assert interface_flux(Q, 0.0, q, a, b) == pytest.approx(expected, abs=1e-15)

    def test_domain_errors(self):
        for bad in (-0.1, 1.1, float("nan")):
            with pytest.raises(DomainError):
                eval_flux(Q, bad)
        with pytest.raises(DomainError):
            entropy_flux(Q, 0.0, 0.5, 1.5)


class TestProperties:
    @given(density, speed)
    def test_consistency(self, u, s):
        assert abs(engquist_osher(Q, u, u) - Q.f(u)) <= 1e-12
        assert abs(godunov_shifted(Q, s, u, u) - (Q.f(u) - s * u)) <= 1e-12

    @given(density, density, speed)
    def test_monotone_fluxes(self, a, b, s):
        h = 1e-6
        for flux in (lambda x, y: engquist_osher(Q, x, y), lambda x, y: godunov_shifted(Q, s, x, y)):
            if a + h <= 1:
                assert flux(a + h, b) - flux(a, b) >= -1e-12
            if b + h <= 1:
                assert flux(a, b + h) - flux(a, b) <= 1e-12

    @given(density, density, speed)
    def test_godunov_brute_force(self, a, b, s):
        assert abs(godunov_shifted(Q, s, a, b) - brute_godunov(Q, s, a, b)) <= 1e-6

    @given(admissible_pair(), density)
    def test_remainder_sign(self, sq, kappa):
        s, q = sq
        r = remainder(Q, s, kappa, q)
        assert r >= 0
        assert (r == 0) == (Q.f(kappa) - s * kappa <= q)

    @given(admissible_pair())
    def test_germ_couple_is_g1(self, sq):
        s, q = sq
        g = germ_couple(Q, s, q)
        assert g.rho_hat >= g.rho_check
        assert abs(Q.f(g.rho_hat) - s * g.rho_hat - q) <= 1e-9
        assert abs(Q.f(g.rho_check) - s * g.rho_check - q) <= 1e-9
        if g.rho_hat - g.rho_check > 1e-9:
            assert classify_germ(Q, s, q, g.rho_hat, g.rho_check) is GermClass.G1

    @given(admissible_pair())
    def test_general_flux_roots_agree(self, sq):
        s, q = sq
        p = FluxModel.polynomial((0.0, 1.0, -1.0))
        a, b = germ_couple(Q, s, q), germ_couple(p, s, q)
        assert abs(a.rho_hat - b.rho_hat) <= 1e-8 and abs(a.rho_check - b.rho_check) <= 1e-8
