"""Collision kernel, BKW/Riemann references, and relaxation runs."""

import numpy as np
import pytest
from scipy.integrate import quad

from posfourier.boltzmann import (
    DEALIAS_FACTOR,
    NonFiniteState,
    SimConfig,
    SimState,
    advance,
    bhat_xi_eta,
    bkw_exact,
    build_kernel_table,
    collision_apply,
    collision_direct,
    kernel_bhat,
    prepare,
    riemann_init,
    run_simulation,
    _project,
)
from posfourier.grid import (
    GridField,
    SpectralField,
    analyze,
    conjugate_asymmetry,
    make_grid,
    sample,
    synthesize,
)

RADIUS = 3.0
HALF_WIDTH = DEALIAS_FACTOR * RADIUS


def bhat_quadrature(xi, eta, radius):
    """Independent kernel value: 32 pi R^3 int_0^1 r^2 sinc(r xi) sinc(r eta) dr.

    The closed form is this integral evaluated analytically, so agreement
    checks every algebraic branch at once.
    """

    def integrand(r):
        return r * r * np.sinc(r * xi / np.pi) * np.sinc(r * eta / np.pi)

    value, err = quad(integrand, 0.0, 1.0, epsabs=1e-14, epsrel=1e-13, limit=400)
    assert err < 1e-11
    return 32.0 * np.pi * radius**3 * value


class TestKernelTransform:
    def test_origin_value(self):
        assert bhat_xi_eta(0.0, 0.0, RADIUS) == pytest.approx(
            32.0 * np.pi * RADIUS**3 / 3.0, rel=1e-15
        )
        near = bhat_xi_eta(1e-4, 1e-4, RADIUS)
        assert near == pytest.approx(32.0 * np.pi * RADIUS**3 / 3.0, rel=1e-7)

    def test_matches_quadrature_across_branches(self):
        rng = np.random.default_rng(7)
        points = [
            (0.0, 0.0),
            (0.049, 0.049),       # series branch
            (0.051, 0.049),       # general branch next to the series box
            (0.8, 0.8),           # diagonal branch
            (0.8, 0.8 + 5e-5),    # diagonal branch, off-center
            (0.8, 0.8 + 2e-4),    # general branch near the diagonal
            (1e-5, 0.7),
            (0.0, 2.3),
            (12.0, 0.0),
            (31.4, 31.4),
        ]
        points += [tuple(rng.uniform(0.0, 60.0, size=2)) for _ in range(20)]
        # The general branch loses a few digits within ~1e-3 of the diagonal
        # (the xi^2 - eta^2 denominator); 5e-12 relative covers that worst case.
        for xi, eta in points:
            got = bhat_xi_eta(xi, eta, RADIUS)
            want = bhat_quadrature(xi, eta, RADIUS)
            assert got == pytest.approx(want, rel=5e-12, abs=5e-12), (xi, eta)

    def test_axis_line_equals_series_form(self):
        # eta = 0 reduces to 32 pi R^3 (sin xi - xi cos xi) / xi^3; the exact
        # xi = 0 guard must reproduce it, and so must a tiny nonzero xi.
        for eta in (0.7, 2.9, 11.0):
            series = 32.0 * np.pi * RADIUS**3 * (np.sin(eta) - eta * np.cos(eta)) / eta**3
            assert bhat_xi_eta(0.0, eta, RADIUS) == pytest.approx(series, rel=1e-14)
            assert bhat_xi_eta(1e-5, eta, RADIUS) == pytest.approx(series, rel=1e-8)

    def test_diagonal_equals_series_form(self):
        for xi in (0.6, 1.3, 7.7):
            series = 32.0 * np.pi * RADIUS**3 * (2 * xi - np.sin(2 * xi)) / (4 * xi**3)
            assert bhat_xi_eta(xi, xi, RADIUS) == pytest.approx(series, rel=1e-13)

    def test_symmetry_is_exact(self):
        rng = np.random.default_rng(11)
        xi = rng.uniform(0.0, 80.0, size=300)
        eta = rng.uniform(0.0, 80.0, size=300)
        forward = bhat_xi_eta(xi, eta, RADIUS)
        swapped = bhat_xi_eta(eta, xi, RADIUS)
        assert np.array_equal(forward, swapped)

    def test_continuity_across_branch_thresholds(self):
        # Values straddle each branch boundary by 1e-9; any jump beyond 1e-8
        # relative would mean the series and closed form disagree there.
        pairs = [
            ((0.05 - 1e-9, 0.03), (0.05 + 1e-9, 0.03)),
            ((0.05 - 1e-9, 0.05 - 1e-9), (0.05 + 1e-9, 0.05 + 1e-9)),
            ((0.8, 0.8 + 1e-4 - 1e-9), (0.8, 0.8 + 1e-4 + 1e-9)),
            ((6.0, 6.0 + 1e-4 - 1e-9), (6.0, 6.0 + 1e-4 + 1e-9)),
        ]
        for (x1, e1), (x2, e2) in pairs:
            v1 = bhat_xi_eta(x1, e1, RADIUS)
            v2 = bhat_xi_eta(x2, e2, RADIUS)
            assert abs(v1 - v2) <= 1e-8 * max(1.0, abs(v1))

    def test_integer_index_form(self):
        l = np.array([2, -1, 0])
        m = np.array([1, 1, -1])
        factor = np.pi * RADIUS / HALF_WIDTH
        xi = np.linalg.norm(l + m) * factor
        eta = np.linalg.norm(l - m) * factor
        assert kernel_bhat(l, m, RADIUS, HALF_WIDTH) == bhat_xi_eta(xi, eta, RADIUS)


class TestKernelTable:
    def test_entries_match_direct_evaluation(self):
        table = build_kernel_table(2, RADIUS)
        factor = np.pi * RADIUS / HALF_WIDTH
        for a in (0, 1, 5, 12):
            for b in (0, 2, 7, 48):
                want = bhat_xi_eta(np.sqrt(a) * factor, np.sqrt(b) * factor, RADIUS)
                assert table.btab[a, b] == want

    def test_loss_entries_match_gain_diagonal(self):
        # bdiag[|m|^2] must equal kernel_bhat(m, m) bitwise; this is what makes
        # the k = 0 collision terms cancel without a tolerance.
        table = build_kernel_table(3, RADIUS)
        rng = np.random.default_rng(3)
        for _ in range(20):
            m = rng.integers(-3, 4, size=3)
            q = int(np.sum(m * m))
            assert table.bdiag[q] == kernel_bhat(m, m, RADIUS, HALF_WIDTH)

    def test_all_values_finite(self):
        table = build_kernel_table(16, RADIUS)
        assert np.all(np.isfinite(table.btab))
        assert np.all(np.isfinite(table.bdiag))

    def test_table_symmetric_over_reachable_magnitudes(self):
        # The wrap table is square: btab[a, b] covers every magnitude pair
        # reachable at this N, so bitwise symmetry here is the B(l,m)=B(m,l)
        # invariant over the whole lattice.
        table = build_kernel_table(4, RADIUS, wrap=True)
        assert np.array_equal(table.btab, table.btab.T)

    def test_half_width_below_dealiasing_bound_rejected(self):
        with pytest.raises(ValueError):
            build_kernel_table(4, RADIUS, half_width=0.9 * HALF_WIDTH)

    def test_wrap_table_size_guard(self):
        with pytest.raises(ValueError):
            build_kernel_table(17, RADIUS, wrap=True)


def random_real_field(modes, seed):
    spec = make_grid(3, modes, HALF_WIDTH)
    rng = np.random.default_rng(seed)
    return analyze(GridField(spec, rng.normal(size=spec.shape))), spec


class TestCollision:
    @pytest.mark.parametrize("modes", [1, 2])
    @pytest.mark.parametrize("wrap", [False, True])
    def test_compiled_matches_direct_reference(self, modes, wrap):
        fhat, spec = random_real_field(modes, 100 + modes)
        table = build_kernel_table(modes, RADIUS, wrap=wrap)
        fast = collision_apply(fhat, table)
        slow = collision_direct(fhat, RADIUS, wrap=wrap)
        scale = np.max(np.abs(slow.coeffs))
        assert np.max(np.abs(fast.coeffs - slow.coeffs)) <= 1e-13 * scale

    def test_constant_field_is_equilibrium(self):
        spec = make_grid(3, 2, HALF_WIDTH)
        coeffs = np.zeros(spec.shape, dtype=complex)
        coeffs[2, 2, 2] = 0.37
        out = collision_apply(SpectralField(spec, coeffs), build_kernel_table(2, RADIUS))
        assert np.all(out.coeffs == 0.0)

    def test_single_cosine_pair_is_stationary(self):
        # With only the +-k0 pair populated, the gain and loss terms coincide
        # through the xi <-> eta symmetry, so Qhat vanishes identically.
        spec = make_grid(3, 2, HALF_WIDTH)
        coeffs = np.zeros(spec.shape, dtype=complex)
        coeffs[3, 2, 1] = 0.2 + 0.1j
        coeffs[1, 2, 3] = 0.2 - 0.1j
        out = collision_apply(SpectralField(spec, coeffs), build_kernel_table(2, RADIUS))
        assert np.all(out.coeffs == 0.0)

    @pytest.mark.parametrize("wrap", [False, True])
    def test_mass_mode_cancels_exactly(self, wrap):
        fhat, _ = random_real_field(3, 17)
        table = build_kernel_table(3, RADIUS, wrap=wrap)
        out = collision_apply(fhat, table)
        assert out.coeffs[3, 3, 3] == 0.0

    def test_output_conjugate_symmetric(self):
        fhat, _ = random_real_field(3, 23)
        out = collision_apply(fhat, build_kernel_table(3, RADIUS))
        scale = np.max(np.abs(out.coeffs))
        assert conjugate_asymmetry(out) <= 1e-13 * scale

    def test_wrap_and_exact_sums_differ(self):
        fhat, _ = random_real_field(2, 29)
        exact = collision_apply(fhat, build_kernel_table(2, RADIUS))
        wrapped = collision_apply(fhat, build_kernel_table(2, RADIUS, wrap=True))
        assert np.max(np.abs(exact.coeffs - wrapped.coeffs)) > 1e-6

    def test_grid_mismatch_rejected(self):
        fhat, _ = random_real_field(2, 31)
        with pytest.raises(ValueError):
            collision_apply(fhat, build_kernel_table(3, RADIUS))
        other = build_kernel_table(2, RADIUS, half_width=1.25 * HALF_WIDTH)
        with pytest.raises(ValueError):
            collision_apply(fhat, other)
        spec1 = make_grid(1, 2, HALF_WIDTH)
        flat = SpectralField(spec1, np.zeros(spec1.shape, dtype=complex))
        with pytest.raises(ValueError):
            collision_apply(flat, build_kernel_table(2, RADIUS))

    def test_direct_reference_refuses_large_grids(self):
        fhat, _ = random_real_field(2, 37)
        big_spec = make_grid(3, 4, HALF_WIDTH)
        big = SpectralField(big_spec, np.zeros(big_spec.shape, dtype=complex))
        with pytest.raises(ValueError):
            collision_direct(big, RADIUS)

    @pytest.mark.parametrize("modes,bound", [(4, 0.5), (8, 5e-2)])
    def test_consistent_with_bkw_time_derivative(self, modes, bound):
        # BKW solves the untruncated equation, so the interpolated collision
        # output must match d/dt of the formula up to truncation error.
        spec = make_grid(3, modes, HALF_WIDTH)
        fhat = analyze(sample(lambda *v: bkw_exact(0.0, *v), spec))
        qhat = collision_apply(fhat, build_kernel_table(modes, RADIUS))
        got = synthesize(qhat).values
        h = 1e-3
        pts = sample(lambda *v: (bkw_exact(h, *v) - bkw_exact(-h, *v)) / (2 * h), spec)
        gap = np.sqrt(np.sum((got - pts.values) ** 2))
        scale = np.sqrt(np.sum(pts.values**2))
        assert gap <= bound * scale


class TestBKWReference:
    def test_zero_at_origin_initially(self):
        assert abs(bkw_exact(0.0, 0.0, 0.0, 0.0)) <= 1e-15

    def test_conserved_moments(self):
        spec = make_grid(3, 12, HALF_WIDTH)
        w = spec.cell_volume
        grids = np.meshgrid(
            *(np.arange(-12, 13) * (2 * HALF_WIDTH / 25) for _ in range(3)),
            indexing="ij",
        )
        sq = sum(g * g for g in grids)
        for t in (0.0, 0.37, 2.0):
            f = bkw_exact(t, *grids)
            assert w * np.sum(f) == pytest.approx(1.0, abs=1e-9)
            for g in grids:
                assert w * np.sum(g * f) == pytest.approx(0.0, abs=1e-9)
            assert w * np.sum(sq * f) == pytest.approx(3.0, abs=1e-8)

    def test_long_time_limit_is_maxwellian(self):
        rng = np.random.default_rng(5)
        v = rng.uniform(-3, 3, size=(3, 50))
        limit = np.exp(-np.sum(v * v, axis=0) / 2) / (2 * np.pi) ** 1.5
        got = bkw_exact(1e3, v[0], v[1], v[2])
        np.testing.assert_allclose(got, limit, rtol=1e-13)

    def test_nonnegative(self):
        rng = np.random.default_rng(9)
        v = rng.uniform(-HALF_WIDTH, HALF_WIDTH, size=(3, 200))
        for t in (0.0, 0.05, 0.5, 3.0):
            assert np.min(bkw_exact(t, v[0], v[1], v[2])) >= -1e-15


class TestRiemannReference:
    def test_pointwise_values(self):
        want = 1.2 * (2 * np.pi * (2.0 / 3.0)) ** -1.5 * np.exp(-0.75)
        assert riemann_init(1.0, 0.0, 0.0) == pytest.approx(want, rel=1e-15)
        left = 0.8 * (2 * np.pi * 1.5) ** -1.5 * np.exp(-1.0 / 3.0)
        assert riemann_init(-1.0, 0.0, 0.0) == pytest.approx(left, rel=1e-15)

    def test_interface_plane_averages_the_states(self):
        v2, v3 = 0.4, -1.1
        sq = v2 * v2 + v3 * v3
        right = 1.2 * (2 * np.pi * (2.0 / 3.0)) ** -1.5 * np.exp(-sq / (2 * 2.0 / 3.0))
        left = 0.8 * (2 * np.pi * 1.5) ** -1.5 * np.exp(-sq / (2 * 1.5))
        assert riemann_init(0.0, v2, v3) == pytest.approx(0.5 * (right + left), rel=1e-15)

    def test_total_mass_is_mean_density(self):
        spec = make_grid(3, 12, HALF_WIDTH)
        f = sample(riemann_init, spec)
        mass = spec.cell_volume * np.sum(f.values)
        assert mass == pytest.approx(1.0, abs=1e-5)

    def test_nonnegative_and_temperature_guard(self):
        rng = np.random.default_rng(13)
        v = rng.uniform(-HALF_WIDTH, HALF_WIDTH, size=(3, 200))
        assert np.min(riemann_init(v[0], v[1], v[2])) >= 0.0
        with pytest.raises(ValueError):
            riemann_init(1.0, 0.0, 0.0, temp1=-1.0)


class TestSimConfig:
    def test_default_domain_tracks_radius(self):
        config = SimConfig(modes=4, radius=2.0)
        assert config.half_width == pytest.approx(DEALIAS_FACTOR * 2.0)

    def test_narrow_domain_rejected(self):
        with pytest.raises(ValueError):
            SimConfig(modes=4, half_width=0.8 * DEALIAS_FACTOR * 3.0)

    def test_step_count_must_divide_horizon(self):
        with pytest.raises(ValueError):
            SimConfig(modes=4, dt=0.03, t_final=0.1)
        assert SimConfig(modes=4, dt=0.02, t_final=0.1).n_steps == 5

    @pytest.mark.parametrize(
        "kwargs",
        [
            {"modes": 0},
            {"modes": 4, "scheme": "rk4"},
            {"modes": 4, "method": "filtered"},
            {"modes": 4, "initial": "vortex"},
            {"modes": 4, "init_approx": "collocate"},
            {"modes": 4, "diag_every": 0},
            {"modes": 4, "dt": -0.01},
            {"modes": 4, "temp1": 0.0, "initial": "riemann"},
        ],
    )
    def test_invalid_configs_rejected(self, kwargs):
        with pytest.raises(ValueError):
            SimConfig(**kwargs)


class TestSimulation:
    def test_single_mode_euler_step_is_identity(self):
        config = SimConfig(modes=2, method="spectral", scheme="euler")
        ctx, state, _ = prepare(config)
        spec = ctx.spec
        coeffs = np.zeros(spec.shape, dtype=complex)
        coeffs[2, 2, 2] = 0.37
        flat_state = SimState(
            nodal=synthesize(SpectralField(spec, coeffs)),
            spectral=SpectralField(spec, coeffs),
        )
        stepped, _ = advance(ctx, flat_state, 1)
        assert np.array_equal(stepped.spectral.coeffs, coeffs)

    def test_spectral_scheme_preserves_mass_over_100_steps(self):
        config = SimConfig(
            modes=4, method="spectral", scheme="euler", t_final=1.0, dt=0.01
        )
        ctx, state, _ = prepare(config)
        mass0 = state.spectral.coeffs[4, 4, 4].real
        for step in range(1, 101):
            state, _ = advance(ctx, state, step)
        mass = state.spectral.coeffs[4, 4, 4].real
        assert abs(mass - mass0) <= 1e-13 * abs(mass0)

    def test_positive_method_stays_positive_with_fixed_moments(self):
        rows, state, ctx = run_simulation(SimConfig(modes=4))
        assert len(rows) == 11
        for row in rows:
            assert row.min_value == 0.0
            assert row.moment_drift <= 1e-12
        assert np.min(state.nodal.values) == 0.0

    def test_moment_method_holds_moments_but_dips_negative(self):
        rows, state, ctx = run_simulation(SimConfig(modes=4, method="moment"))
        assert all(row.moment_drift <= 1e-12 for row in rows)
        assert min(row.min_value for row in rows) < 0.0

    def test_bkw_error_decreases_with_resolution(self):
        finals = {}
        for method in ("spectral", "moment", "positive"):
            errors = [
                run_simulation(SimConfig(modes=n, method=method))[0][-1].l2_error
                for n in (4, 8)
            ]
            assert errors[1] < errors[0] / 5
            finals[method] = errors[1]
        # The moment correction is a tiny 5-dimensional shift, so its error
        # column coincides with the plain spectral one at table precision.
        assert finals["moment"] == pytest.approx(finals["spectral"], rel=1e-2)

    def test_projected_interpolation_start_is_exact_on_grid(self):
        rows, _, _ = run_simulation(
            SimConfig(modes=4, method="spectral", init_approx="interpolate", t_final=0.0)
        )
        assert rows[0].l2_error == 0.0
        rows, _, _ = run_simulation(
            SimConfig(modes=4, method="spectral", init_approx="project", t_final=0.0)
        )
        assert rows[0].l2_error > 1e-3

    def test_non_finite_state_detected(self):
        config = SimConfig(modes=2, method="positive")
        ctx, state, _ = prepare(config)
        bad = np.full(ctx.spec.size, np.nan)
        with pytest.raises(NonFiniteState):
            _project(ctx, bad, ctx.rho_target, step=3)

    def test_solver_failure_carries_step_index(self):
        from posfourier.projection import SSNParams

        config = SimConfig(modes=2, method="positive")
        ctx, state, _ = prepare(config)
        ctx.ssn_params = SSNParams(max_iterations=0)
        with pytest.raises(RuntimeError, match="step 1"):
            advance(ctx, state, 1)
