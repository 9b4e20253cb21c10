import math

import numpy as np
import pytest

from kdvrmt import orthopoly, rmt_eq, toda
from kdvrmt.errors import DomainError, GenericityError, StepSizeError


@pytest.fixture(scope="module")
def gauss20():
    return toda.gaussian_state(20, 40)


class TestFlows:
    def test_constant_state_is_fixed_point(self):
        st = toda.TodaState(
            eps=0.1, gamma=np.full(24, 0.8), beta=np.full(25, 0.3), times={}
        )
        out = toda.flow_t1(st, dt=0.01, steps=10)
        # interior rows are stationary; truncation effects enter at the
        # ends and decay about two orders of magnitude per site inward
        assert np.max(np.abs(out.gamma[7:-7] - 0.8)) < 1e-12
        assert np.max(np.abs(out.beta[8:-8] - 0.3)) < 1e-12

    def test_isospectrality_t1(self, gauss20):
        spec0 = np.linalg.eigvalsh(toda.jacobi_matrix(gauss20))
        out = toda.flow_t1(gauss20, dt=0.00125, steps=80)
        spec1 = np.linalg.eigvalsh(toda.jacobi_matrix(out))
        assert np.max(np.abs(spec1 - spec0)) < 1e-8

    def test_gaussian_flow_closed_form(self, gauss20):
        # gamma is frozen and beta drifts linearly to -t1 in the interior
        out = toda.flow_t1(gauss20, dt=0.005, steps=20)
        sl = slice(2, 25)
        assert np.max(np.abs(out.gamma[sl] - gauss20.gamma[sl])) < 1e-12
        assert np.max(np.abs(out.beta[sl] + 0.1)) < 1e-12

    def test_hierarchy_k1_equals_t1(self, gauss20):
        a = toda.flow_t1(gauss20, dt=0.005, steps=10)
        b = toda.flow_hierarchy(gauss20, 1, dt=0.005, steps=10)
        assert np.max(np.abs(a.gamma - b.gamma)) < 1e-12
        assert np.max(np.abs(a.beta - b.beta)) < 1e-12

    def test_k2_preserves_even_symmetry(self, gauss20):
        # even field: beta stays zero under the second flow (interior)
        out = toda.flow_hierarchy(gauss20, 2, dt=0.002, steps=25)
        assert np.max(np.abs(out.beta[3:30])) < 1e-10

    def test_k2_isospectral(self, gauss20):
        spec0 = np.linalg.eigvalsh(toda.jacobi_matrix(gauss20))
        out = toda.flow_hierarchy(gauss20, 2, dt=0.001, steps=50)
        spec1 = np.linalg.eigvalsh(toda.jacobi_matrix(out))
        assert np.max(np.abs(spec1 - spec0)) < 1e-8

    def test_zero_steps_identity(self, gauss20):
        out = toda.flow_hierarchy(gauss20, 3, dt=0.01, steps=0)
        assert out is gauss20

    def test_oversized_step_detected(self, gauss20):
        with pytest.raises(StepSizeError):
            toda.flow_t1(gauss20, dt=0.8, steps=4)

    def test_matches_direct_recurrence(self, gauss20):
        # Toda-flowed coefficients against the weight with the shifted field
        out = toda.flow_t1(gauss20, dt=0.005, steps=20)
        tab = orthopoly.compute_recurrence([0.0, 0.1, 0.5], 20, 30)
        sl = slice(2, 25)
        assert np.max(np.abs(out.gamma[sl] - tab.gamma[sl])) < 1e-6
        assert np.max(np.abs(out.beta[sl] - tab.beta[sl])) < 1e-6


class TestStringEquation:
    def test_gaussian_data_exact(self, gauss20):
        r1, r2, idx = toda.string_residual(gauss20, [0.0, 0.0, 0.5])
        assert np.max(np.abs(r1[idx - 1])) < 1e-14
        assert np.max(np.abs(r2[idx])) < 1e-14

    def test_propagates_under_flow(self, gauss20):
        out = toda.flow_t1(gauss20, dt=0.005, steps=20)
        r1, r2, idx = toda.string_residual(out, [0.0, 0.1, 0.5])
        # the truncation boundary contaminates the last rows at finite
        # speed; restrict to rows the contamination has not reached
        deep = idx[idx < out.n_max - 12]
        assert np.max(np.abs(r1[deep - 1])) < 1e-6
        assert np.max(np.abs(r2[deep])) < 1e-6

    def test_detects_perturbation(self, gauss20):
        bad = toda.TodaState(
            eps=gauss20.eps,
            gamma=gauss20.gamma + 0.1,
            beta=gauss20.beta,
            times={},
        )
        r1, _, idx = toda.string_residual(bad, [0.0, 0.0, 0.5])
        assert np.max(np.abs(r1[idx - 1])) > 1e-2


class TestHodograph:
    @pytest.mark.parametrize("x", [0.5, 1.0, 2.0])
    def test_gaussian_invariants(self, x):
        pt = toda.hodograph_solve(x, 0.0, [0.0, 0.0, 0.5])
        assert pt.r_plus == pytest.approx(2.0 * math.sqrt(x), abs=1e-10)
        assert pt.r_minus == pytest.approx(-2.0 * math.sqrt(x), abs=1e-10)

    def test_lambda_definition_replay(self):
        pt = toda.hodograph_solve(1.3, 0.0, [0.0, 0.0, 0.5])
        assert pt.lambda_plus == pytest.approx(-(pt.r_plus - pt.r_minus) / 4.0, abs=1e-14)
        assert pt.lambda_minus == pytest.approx((pt.r_plus - pt.r_minus) / 4.0, abs=1e-14)

    @pytest.mark.parametrize("x", [0.5, 1.0, 2.0])
    def test_agreement_with_equilibrium_endpoints(self, x):
        # Gaussian family: the field e^{x_g} s^2/2 has endpoints
        # -+2 e^{-x_g/2}; matching normalization maps x = e^{-x_g}
        pt = toda.hodograph_solve(x, 0.0, [0.0, 0.0, 0.5])
        a, b = rmt_eq.solve_onecut_endpoints(rmt_eq.QuarticField(-math.log(x), 0.0))
        assert pt.r_plus == pytest.approx(b, abs=1e-8)
        assert pt.r_minus == pytest.approx(a, abs=1e-8)

    def test_tilted_quartic_consistency(self):
        # reflection maps the Flaschka invariants to the endpoints of the
        # reflected field: r_+ = -a, r_- = -b for V0(s) + t s
        x, t1 = 1.0, 0.7
        v0 = [0.0, 0.0, 0.0, 0.0, 1.0]
        pt = toda.hodograph_solve(x, t1, v0)
        nodes = np.cos((2 * np.arange(1, 25) - 1) * np.pi / 48.0)
        from kdvrmt.core import RootConfig, newton_solve

        def cond(p):
            c, lw = p
            w = math.exp(lw)
            s = c + w * nodes
            coeffs = np.array([0.0, t1, 0.0, 0.0, 1.0]) / x
            vp = np.polynomial.polynomial.polyval(
                s, np.polynomial.polynomial.polyder(coeffs)
            )
            return np.array([float(np.mean(vp)), float(np.mean(s * vp)) - 2.0])

        res = newton_solve(cond, np.array([0.0, 0.0]), RootConfig(abs_tol=1e-12))
        c, w = float(res.x[0]), math.exp(float(res.x[1]))
        a, b = c - w, c + w
        assert pt.r_plus == pytest.approx(-a, abs=1e-8)
        assert pt.r_minus == pytest.approx(-b, abs=1e-8)


class TestContinuumLimit:
    def test_linear_profiles_near_exact(self):
        eps = 0.02
        n_max = 100
        n = np.arange(1, n_max + 1)
        u = 0.3 + 0.05 * eps * n
        beta = -(0.1 + 0.02 * eps * np.arange(0, n_max + 1))
        st = toda.TodaState(eps=eps, gamma=np.exp(u / 2.0), beta=beta, times={})
        # v linear: first differences are exact; residual carries only the
        # curvature of e^u, which is O(eps^2)
        assert toda.continuum_residual(st) < 10.0 * eps**2

    def test_eps_refinement_slope(self):
        # tilted quartic so that both lattice fields have genuine
        # curvature (for the pure Gaussian the truncated equations are
        # satisfied exactly and only spline noise would remain)
        v0 = [0.0, 0.0, 0.0, 0.0, 1.0]
        res = []
        eps_list = (0.04, 0.02, 0.01)
        for eps in eps_list:
            st = toda.state_from_hodograph(v0, 0.7, eps, int(4.0 / eps))
            res.append(toda.continuum_residual(st))
        slope = np.polyfit(np.log(eps_list), np.log(res), 1)[0]
        assert 1.6 < slope < 2.4

    def test_hodograph_state_residual_bound(self):
        eps = 0.02
        for v0, t1 in (([0.0, 0.0, 0.5], 0.5), ([0.0, 0.0, 0.0, 0.0, 1.0], 0.7)):
            st = toda.state_from_hodograph(v0, t1, eps, 200)
            assert toda.continuum_residual(st) < 10.0 * eps**2


class TestCatastrophe:
    V0 = [0.0, 0.0, 0.2, 4.0 / 15.0, 0.05]

    def test_located_point_matches_edge_singular_field(self):
        # the minus-invariant breaking of this quartic sits exactly at the
        # reflected edge-singular point of the t = 1 field: the density
        # there vanishes to order 5/2 at one support endpoint
        cd = toda.catastrophe_constants(self.V0, family="minus")
        assert cd.r_plus == pytest.approx(2.0, abs=1e-9)
        assert cd.r_minus == pytest.approx(-2.0, abs=1e-9)
        assert cd.t_c == pytest.approx(1.6, abs=1e-9)
        assert cd.x_c == pytest.approx(1.0, abs=1e-9)

    def test_universal_dispersive_constant(self):
        cd = toda.catastrophe_constants(self.V0, family="minus")
        assert cd.c4 == 1.0 / 96.0

    def test_speed_slope_constant(self):
        cd = toda.catastrophe_constants(self.V0, family="minus")
        # c2 = (speed slope -1/4) / (speed gap), gap = (r+ - r-)/2 = 2
        assert cd.c2 == pytest.approx(-0.125, abs=1e-10)

    def test_constants_against_symbolic_oracle(self):
        cd = toda.catastrophe_constants(self.V0, family="minus")
        f = toda.hodograph_potential(self.V0)
        f_pp = f.diff(0).diff(0)
        f_m4 = f.diff(1).diff(1).diff(1).diff(1)
        assert cd.c1 == pytest.approx(
            float(f_pp(cd.r_plus, cd.r_minus)) - cd.t_c / 4.0, abs=1e-9
        )
        assert cd.c3 == pytest.approx(float(f_m4(cd.r_plus, cd.r_minus)) / 6.0, abs=1e-9)

    def test_cubic_perturbation_has_no_generic_point(self):
        # for a cubic tilt the two defining curves meet only on the
        # degenerate diagonal, which must be reported, not returned
        with pytest.raises(GenericityError):
            toda.catastrophe_constants([0.0, 0.0, 0.5, -0.1])


class TestPotential:
    def test_gaussian_polynomial(self):
        f = toda.hodograph_potential([0.0, 0.0, 0.5])
        # f = (r+ - r-)^2 (r+ + r-) / 16
        for rp, rm in ((1.0, -0.3), (2.5, 0.5), (0.2, -2.0)):
            expected = (rp - rm) ** 2 * (rp + rm) / 16.0
            assert float(f(rp, rm)) == pytest.approx(expected, rel=1e-13)

    def test_quartic_matches_equilibrium_normalization(self):
        f = toda.hodograph_potential([0.0, 0.0, 0.0, 0.0, 1.0]).diff(0)
        for x in (0.5, 1.0, 2.0):
            a = (4.0 * x / 3.0) ** 0.25
            assert float(f(a, -a)) == pytest.approx(x, rel=1e-12)
