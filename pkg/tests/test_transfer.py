import numpy as np
import pytest
from scipy.optimize import brentq

from circleresp import (
    DualFunctional,
    GridFunction,
    NonPositiveEigenfunctionError,
    NotExpandingError,
    assemble_operator,
    check_expanding,
    circle_nodes,
    constant_weight,
    cr_norm,
    d_u_operator,
    doubling_family,
    exp_scaled_weight,
    fit_semilog,
    fixed_point_derivative,
    geometric_weight,
    gibbs_measure,
    holder_scan_operator,
    inverse_branches,
    lambda_derivative,
    linear_response,
    measure_response,
    normalized_map,
    pressure_s_derivative,
    solve_fixed_point,
    spectral_data,
    sup_norm,
    trig_perturbed_family,
    trig_weight,
)

PERTURBED = trig_perturbed_family(sin_coeffs=(1.0,))
DOUBLING = doubling_family()


def random_trig(rng, n, degree=4):
    xs = circle_nodes(n)
    vals = np.full(n, rng.standard_normal())
    for m in range(1, degree + 1):
        vals += rng.standard_normal() / m * np.sin(2 * np.pi * m * xs)
        vals += rng.standard_normal() / m * np.cos(2 * np.pi * m * xs)
    return vals


class TestInverseBranches:
    def test_doubling_at_zero(self):
        ys = inverse_branches(DOUBLING, [0.0], 0.0)
        assert np.allclose(np.sort(ys), [0.0, 0.5], atol=1e-14)

    def test_doubling_at_half(self):
        ys = inverse_branches(DOUBLING, [0.0], 0.5)
        assert np.allclose(np.sort(ys), [0.25, 0.75], atol=1e-14)

    def test_perturbed_vs_bisection_oracle(self):
        u = np.array([0.1])
        x = 0.3

        def lift(y):
            return float(PERTURBED.forward(u, np.array([y]))[0])

        ys = np.sort(inverse_branches(PERTURBED, u, x))
        # oracle: root-bracketing on each monotone lift interval
        for k, y_newton in enumerate(ys):
            y_oracle = brentq(lambda y: lift(y) - (x + k), -0.25, 1.25, xtol=1e-15)
            assert abs(y_newton - y_oracle) < 1e-12

    def test_branch_residuals(self):
        u = np.array([0.4])
        xs = circle_nodes(64)
        ys = inverse_branches(PERTURBED, u, xs)
        for k in range(2):
            resid = PERTURBED.forward(u, ys[k]) - (xs + np.ceil(-xs - 1e-12) + k)
            # target offsets were recomputed here; just check T(y) = x mod 1
            frac = np.abs(((PERTURBED.forward(u, ys[k]) - xs) + 0.5) % 1.0 - 0.5)
            assert np.max(frac) < 1e-12


class TestAssembleOperator:
    def test_doubling_half_weight_row_sums(self):
        lmat = assemble_operator(DOUBLING, constant_weight(0.5), [0.0], 64)
        assert np.max(np.abs(lmat @ np.ones(64) - 1.0)) < 1e-13

    def test_doubling_unit_weight_doubles(self):
        lmat = assemble_operator(DOUBLING, constant_weight(1.0), [0.0], 32)
        assert np.max(np.abs(lmat @ np.ones(32) - 2.0)) < 1e-12

    def test_duality_for_geometric_weight(self):
        # quadrature check of the pushforward identity: mean(L phi) = mean(phi)
        rng = np.random.default_rng(31)
        n = 64
        lmat = assemble_operator(PERTURBED, geometric_weight(PERTURBED), [0.35], n)
        leb = np.full(n, 1.0 / n)
        for _ in range(5):
            phi = random_trig(rng, n)
            assert abs(leb @ (lmat @ phi) - leb @ phi) < 1e-11

    def test_exactness_on_low_degree_modes(self):
        # oracle: evaluate the branch sum with exact trig values
        n = 64
        u = np.array([0.2])
        g = geometric_weight(PERTURBED)
        lmat = assemble_operator(PERTURBED, g, u, n)
        xs = circle_nodes(n)
        ys = inverse_branches(PERTURBED, u, xs)
        phi = np.sin(2 * np.pi * xs)
        oracle = sum(
            g.value(u, ys[k]) * np.sin(2 * np.pi * ys[k]) for k in range(2)
        )
        assert np.max(np.abs(lmat @ phi - oracle)) < 1e-12


class TestSpectralData:
    def test_doubling_geometric_analytic(self):
        n = 64
        data = spectral_data(assemble_operator(DOUBLING, geometric_weight(DOUBLING), [0.0], n))
        assert abs(data.lam - 1.0) < 1e-12
        assert np.max(np.abs(data.phi.samples - 1.0)) < 1e-9
        assert np.max(np.abs(data.ell.weights - 1.0 / n)) < 1e-9
        assert data.sigma_estimate <= 0.51

    def test_doubling_unit_weight(self):
        data = spectral_data(assemble_operator(DOUBLING, constant_weight(1.0), [0.0], 32))
        assert abs(data.lam - 2.0) < 1e-11
        assert np.max(np.abs(data.phi.samples - 1.0)) < 1e-9

    def test_projector_identities(self):
        n = 64
        lmat = assemble_operator(PERTURBED, geometric_weight(PERTURBED), [0.3], n)
        data = spectral_data(lmat)
        pi, r = data.pi, data.r
        assert np.max(np.abs(pi @ pi - pi)) < 1e-10
        assert np.max(np.abs(pi @ r)) < 1e-9
        assert np.max(np.abs(r @ pi)) < 1e-9
        assert np.max(np.abs(lmat - data.lam * pi - r)) < 1e-12
        assert data.eigen_residual < 1e-9
        assert np.min(data.phi.samples) > 0.0
        assert abs(data.ell.weights @ data.phi.samples - 1.0) < 1e-12

    def test_normalization_against_reference(self):
        n = 64
        lmat = assemble_operator(PERTURBED, geometric_weight(PERTURBED), [0.3], n)
        ref = DualFunctional.lebesgue(n)
        data = spectral_data(lmat, ell_ref=ref)
        assert abs(ref.weights @ data.phi.samples - 1.0) < 1e-12

    def test_sign_changing_leading_vector_rejected(self):
        lmat = np.diag([0.5] * 7 + [-2.0])
        with pytest.raises(NonPositiveEigenfunctionError):
            spectral_data(lmat)

    def test_spectral_decay_fit(self):
        # strong perturbation mixes modes enough for a clean geometric fit
        family = trig_perturbed_family(sin_coeffs=(1.0, 0.6))
        n = 128
        data = spectral_data(assemble_operator(family, geometric_weight(family), [0.9], n))
        rng = np.random.default_rng(7)
        v = rng.standard_normal(n)
        norms = []
        for _ in range(30):
            v = data.r @ v / data.lam
            norms.append(sup_norm(v))
        fit = fit_semilog(np.arange(1, 31), norms)
        sigma = float(np.exp(fit.slope))
        assert sigma < 0.9
        assert fit.r_squared > 0.99

    def test_resolution_convergence(self):
        family = PERTURBED
        weight = trig_weight(0.5, (), (0.1,))
        lam64 = spectral_data(assemble_operator(family, weight, [0.3], 64)).lam
        d128 = spectral_data(assemble_operator(family, weight, [0.3], 128))
        assert abs(lam64 - d128.lam) < 1e-10
        phi64 = spectral_data(assemble_operator(family, weight, [0.3], 64),
                              ell_ref=DualFunctional.lebesgue(64)).phi.samples
        phi128 = d128.phi.samples
        phi128 = phi128 / (np.mean(phi128))  # same Lebesgue normalization
        assert np.max(np.abs(phi64 - phi128[::2])) < 1e-8


class TestNormalizedMap:
    def test_q_at_fixed_point_is_scaled_remainder(self):
        n = 64
        lmat = assemble_operator(PERTURBED, geometric_weight(PERTURBED), [0.3], n)
        data = spectral_data(lmat)
        fmap = normalized_map(PERTURBED, geometric_weight(PERTURBED), data.ell, n)
        qmat = fmap.q_matrix(np.array([0.3]), data.phi.samples)
        target = lmat / data.lam - data.pi
        assert np.max(np.abs(qmat - target)) < 1e-10
        assert np.max(np.abs(target - data.r / data.lam)) < 1e-12

    def test_eigenvector_is_fixed_point(self):
        n = 64
        lmat = assemble_operator(PERTURBED, geometric_weight(PERTURBED), [0.3], n)
        data = spectral_data(lmat)
        fmap = normalized_map(PERTURBED, geometric_weight(PERTURBED), data.ell, n)
        image = fmap.apply(np.array([0.3]), data.phi.samples)
        assert sup_norm(image - data.phi.samples) < 1e-12

    def test_iterate_identity(self):
        # F^k(u, phi) = L^k phi / <l, L^k phi>
        rng = np.random.default_rng(37)
        n = 64
        u = np.array([0.3])
        lmat = assemble_operator(PERTURBED, geometric_weight(PERTURBED), u, n)
        data = spectral_data(lmat)
        fmap = normalized_map(PERTURBED, geometric_weight(PERTURBED), data.ell, n)
        phi = 1.5 + 0.3 * np.abs(random_trig(rng, n))
        iterated = phi.copy()
        for _ in range(3):
            iterated = fmap.apply(u, iterated)
        powered = np.linalg.matrix_power(lmat, 3) @ phi
        powered /= data.ell.weights @ powered
        assert sup_norm(iterated - powered) < 1e-11

    def test_picard_solve_converges_to_eigenvector(self):
        n = 64
        lmat = assemble_operator(PERTURBED, geometric_weight(PERTURBED), [0.3], n)
        data = spectral_data(lmat)
        fmap = normalized_map(PERTURBED, geometric_weight(PERTURBED), data.ell, n)
        result = solve_fixed_point(fmap, np.array([0.3]), np.ones(n), tol=1e-12)
        assert sup_norm(result.phi_star - data.phi.samples) < 1e-10
        assert result.contraction_estimate < 1.0


class TestDuOperator:
    def test_u_independent_family_zero(self):
        dop = d_u_operator(DOUBLING, constant_weight(0.5), [0.0], [1.0], 32)
        assert np.max(np.abs(dop)) == 0.0

    def test_weight_linear_in_u(self):
        # g(u, x) = 1/2 + u c(x): the derivative operator assembles weight c
        def base_weight(u, y):
            return 0.5 + float(u[0]) * np.cos(2 * np.pi * y)

        from circleresp import Weight

        g = Weight(
            value=base_weight,
            du_value=lambda u, y: np.cos(2 * np.pi * y)[:, None],
            dx_value=lambda u, y: -2 * np.pi * float(u[0]) * np.sin(2 * np.pi * y),
        )
        n = 32
        dop = d_u_operator(DOUBLING, g, [0.1], [1.0], n)
        oracle = assemble_operator(DOUBLING, trig_weight(1.0, (), (1.0,)), [0.0], n)
        oracle -= assemble_operator(DOUBLING, constant_weight(1.0), [0.0], n)
        # trig_weight(1 + cos) minus constant 1 leaves the pure cos weight
        assert np.max(np.abs(dop - oracle)) < 1e-12

    def test_matches_finite_differences(self):
        n = 64
        u0 = np.array([0.2])
        g = geometric_weight(PERTURBED)
        dop = d_u_operator(PERTURBED, g, u0, [1.0], n)
        delta = 1e-5
        plus = assemble_operator(PERTURBED, g, u0 + delta, n)
        minus = assemble_operator(PERTURBED, g, u0 - delta, n)
        fd = (plus - minus) / (2 * delta)
        assert np.max(np.abs(dop - fd)) < 1e-7


class TestLinearResponse:
    def test_u_independent_family_zero_response(self):
        resp = linear_response(DOUBLING, constant_weight(0.5), [0.0], [1.0], 32)
        assert sup_norm(resp.samples) < 1e-12

    def test_matches_eigenfunction_finite_differences(self):
        n = 64
        u0 = np.array([0.0])
        g = geometric_weight(PERTURBED)
        resp = linear_response(PERTURBED, g, u0, [1.0], n).samples
        base = spectral_data(assemble_operator(PERTURBED, g, u0, n))
        delta = 1e-4
        plus = spectral_data(assemble_operator(PERTURBED, g, u0 + delta, n),
                             ell_ref=base.ell).phi.samples
        minus = spectral_data(assemble_operator(PERTURBED, g, u0 - delta, n),
                              ell_ref=base.ell).phi.samples
        fd = (plus - minus) / (2 * delta)
        assert sup_norm(resp - fd) / sup_norm(resp) < 1e-4

    def test_response_annihilated_by_reference_functional(self):
        n = 64
        g = geometric_weight(PERTURBED)
        resp = linear_response(PERTURBED, g, [0.1], [1.0], n).samples
        base = spectral_data(assemble_operator(PERTURBED, g, [0.1], n))
        assert abs(base.ell.weights @ resp) < 1e-12

    def test_route_equivalence(self):
        # response formula == resolvent derivative of the renormalized map
        n = 64
        u0 = np.array([0.1])
        g = geometric_weight(PERTURBED)
        resp = linear_response(PERTURBED, g, u0, [1.0], n).samples
        base = spectral_data(assemble_operator(PERTURBED, g, u0, n))
        fmap = normalized_map(PERTURBED, g, base.ell, n)
        phi0 = base.phi.samples
        alt = fixed_point_derivative(fmap.p_matrix(u0, phi0), fmap.q_matrix(u0, phi0), [1.0])
        assert sup_norm(resp - alt) < 1e-9


class TestLambdaDerivative:
    def test_u_independent_family(self):
        assert lambda_derivative(DOUBLING, constant_weight(0.5), [0.0], [1.0], 32) == (
            pytest.approx(0.0, abs=1e-12)
        )

    def test_exponentially_scaled_weight(self):
        # L_u = e^u L_0 scales the eigenvalue exactly, so dlambda/du = lambda
        d = lambda_derivative(DOUBLING, exp_scaled_weight(0.5, 1.0), [0.0], [1.0], 32)
        assert abs(d - 1.0) < 1e-8

    def test_generic_family_vs_richardson(self):
        n = 64
        g = geometric_weight(PERTURBED)
        weight = trig_weight(0.5, (), (0.1,))
        u0 = np.array([0.2])
        d = lambda_derivative(PERTURBED, weight, u0, [1.0], n)

        def lam(u):
            return spectral_data(assemble_operator(PERTURBED, weight, [u], n)).lam

        def central(step):
            return (lam(0.2 + step) - lam(0.2 - step)) / (2 * step)

        fd = (4.0 * central(1e-4) - central(2e-4)) / 3.0
        assert abs(d - fd) / max(1.0, abs(fd)) < 1e-5


class TestGibbsMeasure:
    def test_normalization(self):
        data = spectral_data(assemble_operator(DOUBLING, geometric_weight(DOUBLING), [0.0], 32))
        one = GridFunction.constant(1.0, 32)
        assert gibbs_measure(data, one) == pytest.approx(1.0, abs=1e-12)

    def test_lebesgue_mean_zero(self):
        n = 32
        data = spectral_data(assemble_operator(DOUBLING, geometric_weight(DOUBLING), [0.0], n))
        f = GridFunction.from_callable(lambda x: np.sin(2 * np.pi * x), n)
        assert abs(gibbs_measure(data, f)) < 1e-12

    def test_positivity(self):
        n = 64
        data = spectral_data(assemble_operator(PERTURBED, geometric_weight(PERTURBED), [0.3], n))
        f = GridFunction.from_callable(lambda x: 0.5 + 0.5 * np.cos(2 * np.pi * x) ** 2, n)
        assert gibbs_measure(data, f) > 0.0


class TestPressureDerivative:
    def test_constant_observable(self):
        n = 32
        c = 0.7
        obs = GridFunction.constant(c, n)
        d = pressure_s_derivative(DOUBLING, geometric_weight(DOUBLING), [0.0], obs, n)
        assert abs(d - c) < 1e-10

    def test_lebesgue_mean_zero_observable(self):
        n = 32
        obs = GridFunction.from_callable(lambda x: np.sin(2 * np.pi * x), n)
        d = pressure_s_derivative(DOUBLING, geometric_weight(DOUBLING), [0.0], obs, n)
        assert abs(d) < 1e-8

    def test_identity_for_random_observables(self):
        rng = np.random.default_rng(41)
        n = 64
        g = geometric_weight(PERTURBED)
        data = spectral_data(assemble_operator(PERTURBED, g, [0.3], n))
        for _ in range(3):
            obs = GridFunction(random_trig(rng, n, degree=3))
            d = pressure_s_derivative(PERTURBED, g, [0.3], obs, n)
            m = gibbs_measure(data, obs)
            assert abs(d - m) / max(1.0, abs(m)) < 1e-6


class TestMeasureResponse:
    def test_constant_observable_is_stationary(self):
        n = 64
        g = geometric_weight(PERTURBED)
        one = GridFunction.constant(1.0, n)
        assert abs(measure_response(PERTURBED, g, [0.2], [1.0], one, n)) < 1e-10

    def test_u_independent_family(self):
        n = 32
        obs = GridFunction.from_callable(lambda x: np.cos(2 * np.pi * x), n)
        assert abs(measure_response(DOUBLING, constant_weight(0.5), [0.0], [1.0], obs, n)) < 1e-12

    def test_matches_finite_differences(self):
        n = 64
        weight = trig_weight(0.5, (), (0.1,))
        obs = GridFunction.from_callable(lambda x: np.sin(2 * np.pi * x) + 0.2, n)
        u0 = 0.2
        d = measure_response(PERTURBED, weight, [u0], [1.0], obs, n)

        def m_at(u):
            data = spectral_data(assemble_operator(PERTURBED, weight, [u], n))
            return gibbs_measure(data, obs)

        delta = 1e-4
        fd = (m_at(u0 + delta) - m_at(u0 - delta)) / (2 * delta)
        assert abs(d - fd) / max(1.0, abs(fd)) < 1e-4


class TestHolderScan:
    DELTAS = [2.0**-k for k in range(3, 9)]

    def test_u_independent_family_not_fit(self):
        report = holder_scan_operator(
            DOUBLING, constant_weight(0.5), [0.0], [[1.0]], self.DELTAS, 0.9, 0.1, 32
        )
        assert report.operator_slopes[0] == float("inf")
        assert report.fixed_point_slopes[0] == float("inf")

    def test_smooth_family_slope_near_one(self):
        report = holder_scan_operator(
            PERTURBED, geometric_weight(PERTURBED), [0.0], [[1.0]], self.DELTAS,
            0.9, 0.1, 64,
        )
        assert report.operator_slopes[0] >= 0.7
        assert report.fixed_point_slopes[0] >= 0.7
        assert report.operator_slopes[0] == pytest.approx(1.0, abs=0.15)

    def test_kink_family_forces_exponent(self):
        kink = trig_perturbed_family(sin_coeffs=(1.0,), kink_exponent=0.5)
        report = holder_scan_operator(
            kink, constant_weight(0.5), [0.0], [[1.0]], self.DELTAS, 0.9, 0.1, 64,
            enforce_gamma=False,
        )
        assert 0.4 <= report.operator_slopes[0] <= 0.6
        assert 0.4 <= report.fixed_point_slopes[0] <= 0.6


class TestCheckExpanding:
    def test_doubling(self):
        assert check_expanding(DOUBLING, [[0.0]]) == pytest.approx(2.0, abs=1e-12)

    def test_perturbed_bound(self):
        us = [[u] for u in np.linspace(-0.5, 0.5, 11)]
        lam = check_expanding(PERTURBED, us, x_resolution=1024)
        assert lam == pytest.approx(1.5, abs=1e-3)

    def test_not_expanding(self):
        with pytest.raises(NotExpandingError):
            check_expanding(PERTURBED, [[2.0]], x_resolution=1024)
