import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from resq import (
    DomainError,
    InitialStateParams,
    ModelConfig,
    NumericError,
    PreconditionError,
    concurrence,
    death_time_bound,
    evolve,
    gibbs_state,
    initial_state,
    numerical_death_time,
    rates,
    resonance_table,
    survival_time_bound,
    xi_matrix,
)

from conftest import OHMIC, random_density_matrix, scaled_config


def _exact_char_poly(m):
    """Characteristic polynomial with exactly-computed coefficients.

    Principal minors are evaluated in rational complex arithmetic, so the
    coefficients are exact functions of the float entries; the analytically
    real parts are kept.
    """
    from fractions import Fraction
    from itertools import combinations, permutations

    exact = [[(Fraction(m[i, j].real), Fraction(m[i, j].imag)) for j in range(4)] for i in range(4)]

    def cmul(a, b):
        return (a[0] * b[0] - a[1] * b[1], a[0] * b[1] + a[1] * b[0])

    def cadd(a, b):
        return (a[0] + b[0], a[1] + b[1])

    def minor_det(idx):
        total = (Fraction(0), Fraction(0))
        for perm in permutations(range(len(idx))):
            sign = 1
            seen = list(perm)
            for i in range(len(seen)):
                for j in range(i + 1, len(seen)):
                    if seen[i] > seen[j]:
                        sign = -sign
            term = (Fraction(sign), Fraction(0))
            for row, col in enumerate(perm):
                term = cmul(term, exact[idx[row]][idx[col]])
            total = cadd(total, term)
        return total

    # p(x) = x^4 - e1 x^3 + e2 x^2 - e3 x + e4, e_k = sum of k x k minors
    coeffs = [1.0]
    for k in range(1, 5):
        acc = Fraction(0)
        for idx in combinations(range(4), k):
            acc += minor_det(idx)[0]
        coeffs.append(float(acc) * (-1) ** k)
    return np.array(coeffs)


def brute_force_concurrence(rho):
    """Oracle: char-poly roots of the spin-flip product by bisection.

    Real roots are isolated through the derivative chain (quadratic solved
    in closed form), entirely avoiding eigen machinery.
    """
    y = np.zeros((4, 4), dtype=complex)
    y[0, 3] = y[3, 0] = -1.0
    y[1, 2] = y[2, 1] = 1.0
    xi = rho @ y @ rho.conj() @ y
    coeffs = _exact_char_poly(xi)

    def real_roots(poly, lo, hi):
        poly = np.trim_zeros(poly, "f")
        deg = len(poly) - 1
        if deg == 1:
            root = -poly[1] / poly[0]
            return [root] if lo <= root <= hi else []
        if deg == 2:
            a, b, c = poly
            disc = b * b - 4.0 * a * c
            if disc < 0.0:
                return []
            roots = [(-b - math.sqrt(disc)) / (2 * a), (-b + math.sqrt(disc)) / (2 * a)]
            return sorted(r for r in roots if lo <= r <= hi)
        crit = real_roots(np.polyder(poly), lo, hi)
        points = [lo] + crit + [hi]
        found = []
        for a, b in zip(points, points[1:]):
            fa, fb = np.polyval(poly, a), np.polyval(poly, b)
            if fa == 0.0:
                found.append(a)
            if fa * fb < 0.0:
                x0, x1 = a, b
                for _ in range(200):
                    mid = 0.5 * (x0 + x1)
                    fm = np.polyval(poly, mid)
                    if fa * fm <= 0.0:
                        x1 = mid
                    else:
                        x0, fa = mid, fm
                found.append(0.5 * (x0 + x1))
        if np.polyval(poly, hi) == 0.0:
            found.append(hi)
        # touching (double) roots show up as critical points with tiny values
        scale = max(1.0, float(np.abs(poly).max()))
        for c in crit:
            if abs(np.polyval(poly, c)) < 1e-12 * scale and not any(
                abs(c - r) < 1e-9 for r in found
            ):
                found.extend([c, c])
        return sorted(found)

    hi = float(np.abs(xi).sum()) + 1.0
    roots = real_roots(coeffs, -0.1, hi)
    while len(roots) < 4:
        roots.append(0.0)
    nu = np.clip(sorted(roots, reverse=True)[:4], 0.0, None)
    vals = np.sqrt(nu)
    return max(0.0, vals[0] - vals[1] - vals[2] - vals[3])


class TestXiMatrix:
    def test_maximally_mixed(self):
        xi = xi_matrix(np.eye(4, dtype=complex) / 4.0)
        assert np.abs(xi - np.eye(4) / 16.0).max() < 1e-15

    def test_diagonal_state_spectrum(self, rng):
        p = rng.dirichlet(np.ones(4))
        xi = xi_matrix(np.diag(p.astype(complex)))
        expected = sorted([p[0] * p[3], p[0] * p[3], p[1] * p[2], p[1] * p[2]])
        assert np.allclose(sorted(np.diag(xi).real), expected, atol=1e-15)

    def test_x_state_spectrum(self, rng):
        for _ in range(10):
            x = rng.dirichlet(np.ones(4))
            amax = math.sqrt(x[0] * x[3])
            alpha = rng.uniform(0.0, amax) * np.exp(2j * np.pi * rng.uniform())
            m = np.diag(x.astype(complex))
            m[0, 3] = alpha
            m[3, 0] = np.conj(alpha)
            nu = np.array(concurrence(m).nu)
            expected = np.sort(
                [
                    x[1] * x[2],
                    x[1] * x[2],
                    (math.sqrt(x[0] * x[3]) + abs(alpha)) ** 2,
                    (math.sqrt(x[0] * x[3]) - abs(alpha)) ** 2,
                ]
            )[::-1]
            assert np.abs(nu - expected).max() < 1e-10

    def test_requires_hermitian(self):
        m = np.eye(4, dtype=complex) / 4.0
        m[0, 1] = 0.2
        with pytest.raises(DomainError):
            xi_matrix(m)

    def test_nonnegative_spectrum_random_states(self, rng):
        for _ in range(100):
            report = concurrence(random_density_matrix(rng))
            assert report.nu[3] >= -1e-10


class TestConcurrence:
    def test_bell_state(self):
        report = concurrence(initial_state(InitialStateParams(1.0, 1.0)))
        assert report.C == pytest.approx(1.0, abs=1e-12)

    def test_product_state(self):
        assert concurrence(initial_state(InitialStateParams(1.0, 0.0))).C == 0.0

    def test_gibbs_state(self, base_cfg):
        report = concurrence(gibbs_state(base_cfg))
        assert report.D == pytest.approx(-2.0 / base_cfg.partition_function(), abs=1e-10)
        assert report.C == 0.0

    def test_diagonal_states_disentangled(self, rng):
        for _ in range(20):
            p = rng.dirichlet(np.ones(4))
            assert concurrence(np.diag(p.astype(complex))).C == 0.0

    def test_oracle_equivalence(self, rng):
        for _ in range(100):
            rho = random_density_matrix(rng)
            assert concurrence(rho).C == pytest.approx(brute_force_concurrence(rho), abs=1e-8)

    def test_pure_family_value(self, rng):
        # concurrence of the superposition family is 2|a1 conj(a2)| / (|a1|^2+|a2|^2)
        for _ in range(20):
            a1 = complex(rng.normal(), rng.normal())
            a2 = complex(rng.normal(), rng.normal())
            expected = 2.0 * abs(a1 * np.conj(a2)) / (abs(a1) ** 2 + abs(a2) ** 2)
            got = concurrence(initial_state(InitialStateParams(a1, a2))).C
            assert got == pytest.approx(expected, abs=1e-12)

    def test_imaginary_relative_phase_is_still_entangled(self):
        # |++> + i|--> is Bell-equivalent under a local phase rotation
        params = InitialStateParams(1.0, 1j)
        assert params.p == pytest.approx(0.5)
        assert concurrence(initial_state(params)).C == pytest.approx(1.0, abs=1e-12)

    @given(st.floats(0.0, 2.0 * math.pi), st.floats(0.0, 2.0 * math.pi))
    @settings(max_examples=25, deadline=None)
    def test_free_phase_invariance(self, phi1, phi2):
        rng = np.random.default_rng(99)
        rho = random_density_matrix(rng)
        base = concurrence(rho).C
        # free evolution phases: conjugate pairs cancel on (1,4) and (2,3)
        u = np.diag(np.exp(1j * np.array([phi1, phi2, -phi2, -phi1])))
        rotated = u @ rho @ u.conj().T
        assert concurrence(rotated).C == pytest.approx(base, abs=1e-12)

    def test_unphysical_input_raises(self):
        m = np.diag([0.7, 0.5, -0.1, -0.1]).astype(complex)
        with pytest.raises(NumericError):
            concurrence(m)


class TestInitialState:
    def test_basis_state(self):
        rho = initial_state(InitialStateParams(1.0, 0.0))
        assert np.array_equal(rho.matrix, np.diag([1.0, 0, 0, 0]).astype(complex))

    def test_alpha_placement(self):
        params = InitialStateParams(0.6, 0.8j)
        rho = initial_state(params)
        assert rho.matrix[0, 3] == pytest.approx(np.conj(params.alpha0), abs=1e-15)
        assert rho.alpha == pytest.approx(params.alpha0, abs=1e-15)

    def test_alpha_modulus_identity(self, rng):
        for _ in range(10):
            params = InitialStateParams(
                complex(rng.normal(), rng.normal()), complex(rng.normal(), rng.normal())
            )
            p = params.p
            assert abs(params.alpha0) == pytest.approx(math.sqrt(p * (1 - p)), abs=1e-12)

    def test_rejects_zero_vector(self):
        with pytest.raises(DomainError):
            InitialStateParams(0.0, 0.0)


class TestTimeBounds:
    @pytest.fixture
    def cfg(self, rng):
        return scaled_config(rng, 0.01)

    def test_symmetric_in_p(self, cfg):
        for p in (0.1, 0.25, 0.4):
            assert death_time_bound(cfg, p, 2.0) == pytest.approx(
                death_time_bound(cfg, 1.0 - p, 2.0), rel=1e-14
            )
            assert survival_time_bound(cfg, p, 0.5) == pytest.approx(
                survival_time_bound(cfg, 1.0 - p, 0.5), rel=1e-14
            )

    def test_maximal_at_half(self, cfg):
        # maximal at p = 1/2; ties happen when a p-independent term
        # saturates the min/max
        grid = np.linspace(0.05, 0.95, 19)
        mid = len(grid) // 2
        t_a = [death_time_bound(cfg, float(p), 2.0) for p in grid]
        t_b = [survival_time_bound(cfg, float(p), 0.5) for p in grid]
        assert t_a[mid] == max(t_a)
        assert t_b[mid] == max(t_b)
        assert np.argmax(t_a) == mid  # the death bound is strictly unimodal here

    def test_grow_when_coupling_shrinks(self, cfg):
        halved = ModelConfig(
            B1=cfg.B1, B2=cfg.B2, beta=cfg.beta,
            lambda1=cfg.lambda1 / 2, lambda2=cfg.lambda2 / 2,
            kappa1=cfg.kappa1 / 2, kappa2=cfg.kappa2 / 2,
            mu1=cfg.mu1 / 2, mu2=cfg.mu2 / 2,
            nu1=cfg.nu1 / 2, nu2=cfg.nu2 / 2,
            g=cfg.g, f=cfg.f,
        )
        for p in (0.2, 0.5):
            assert death_time_bound(halved, p, 2.0) > death_time_bound(cfg, p, 2.0)
            assert survival_time_bound(halved, p, 0.5) > survival_time_bound(cfg, p, 0.5)

    def test_preconditions(self, cfg):
        for p in (0.0, 1.0):
            with pytest.raises(DomainError):
                death_time_bound(cfg, p, 1.0)
            with pytest.raises(DomainError):
                survival_time_bound(cfg, p, 1.0)
        frozen = ModelConfig(
            B1=0.7, B2=1.6, beta=0.9, kappa1=0.01, kappa2=0.02, g=OHMIC, f=OHMIC
        )
        with pytest.raises(PreconditionError):
            death_time_bound(frozen, 0.5, 1.0)
        # coupling too large relative to kappa0*sqrt(p(1-p))
        with pytest.raises(PreconditionError):
            death_time_bound(cfg, 0.5, 1.0, kappa0=0.01)


class TestNumericalDeathTime:
    def test_gibbs_already_dead(self, base_cfg):
        t0 = numerical_death_time(base_cfg, gibbs_state(base_cfg), t_max=10.0, grid_n=16)
        assert t0 == 0.0

    def test_bell_state_dies_in_finite_time(self, rng):
        cfg = scaled_config(rng, 0.05)
        rho0 = initial_state(InitialStateParams(1.0, 1.0))
        report = rates(cfg)
        t_max = 40.0 / report.delta5
        t0 = numerical_death_time(cfg, rho0, t_max=t_max, grid_n=300)
        assert t0 is not None and 0.0 < t0 < t_max
        table = resonance_table(cfg)
        just_before = concurrence(evolve(rho0, 0.98 * t0, table)).D
        just_after = concurrence(evolve(rho0, 1.02 * t0, table)).D
        assert just_before > 0.0 > just_after

    def test_none_found_when_grid_too_short(self, rng):
        cfg = scaled_config(rng, 0.05)
        rho0 = initial_state(InitialStateParams(1.0, 1.0))
        assert numerical_death_time(cfg, rho0, t_max=1e-3, grid_n=8) is None

    def test_conserving_only_configuration_runs(self):
        # no energy exchange: populations freeze, bounds refuse, but the
        # empirical search still executes (and finds no death)
        cfg = ModelConfig(
            B1=0.7, B2=1.6, beta=0.9, kappa1=0.02, kappa2=0.015, nu1=0.01, nu2=0.01,
            g=OHMIC, f=OHMIC,
        )
        with pytest.raises(PreconditionError):
            death_time_bound(cfg, 0.5, 1.0)
        rho0 = initial_state(InitialStateParams(1.0, 1.0))
        report_delta5 = resonance_table(cfg).data(5)[0].delta.imag
        t0 = numerical_death_time(cfg, rho0, t_max=5.0 / report_delta5, grid_n=64)
        assert t0 is None
        # the coherence decay is governed by the two-quantum rate alone
        table = resonance_table(cfg)
        t_probe = 1.0 / report_delta5
        out = evolve(rho0, t_probe, table)
        assert abs(out.alpha) == pytest.approx(0.5 * math.exp(-1.0), rel=1e-12)

    def test_argument_validation(self, base_cfg):
        rho0 = gibbs_state(base_cfg)
        with pytest.raises(DomainError):
            numerical_death_time(base_cfg, rho0, t_max=0.0, grid_n=8)
        with pytest.raises(DomainError):
            numerical_death_time(base_cfg, rho0, t_max=1.0, grid_n=1)
