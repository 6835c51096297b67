import cmath
import math

import numpy as np
import pytest
import scipy.sparse as sp

from primefock import fock as fk
from primefock.dirichlet import SiteVector, prime_zeta
from primefock.errors import DivergenceError, ResourceCapExceeded
from primefock.ncs import NcsParams, ncs_state, rm_tolerance
from primefock.numtheory import DirichletCoefficients, TruncationSpec, enumerate_basis
from primefock.spectra import (
    BoseHubbardParams,
    FiniteArrayParams,
    bose_hubbard_expectation,
    brute_force_spectrum,
    default_tau_grid,
    dirichlet_interaction_expectation,
    general_expectation,
    ground_state_transition,
    mode_cosines,
    multi_particle_spectrum,
    one_particle_spectrum,
    p_n_recursive,
    pn_tower_expectation,
    spectrum_sweep,
)

P1_AT_2 = 0.4522474200410655
P1_AT_4 = 0.07699313976424684
P1_AT_1_5 = 0.8495626836215664


class TestBoseHubbardExpectation:
    def test_interaction_only(self):
        out = bose_hubbard_expectation(1.0 + 0j, BoseHubbardParams(U=2.0, mu_chem=0.0, tau=0.0))
        assert out.value.real == pytest.approx(P1_AT_4, abs=1e-6)

    def test_hopping_only_real_axis(self):
        tau = 0.7
        out = bose_hubbard_expectation(1.5 + 0j, BoseHubbardParams(U=0.0, mu_chem=0.0, tau=tau))
        assert abs(out.value.real - (-2.0 * tau * P1_AT_1_5**2)) <= out.tail_bound

    def test_hopping_requires_wider_half_plane(self):
        with pytest.raises(DivergenceError):
            bose_hubbard_expectation(1.0 + 0j, BoseHubbardParams(U=0.0, mu_chem=0.0, tau=1.0))
        # but tau = 0 only needs Re s > 1/2
        out = bose_hubbard_expectation(0.8 + 0j, BoseHubbardParams(U=1.0, mu_chem=0.5, tau=0.0))
        assert math.isfinite(out.value.real)

    def test_matrix_oracle_with_finite_site_support(self, medium_basis):
        # materialize the Hamiltonian and compare against the closed form
        # evaluated with the same (finitely supported) site sums
        s = 1.3 + 0j
        U, mu, tau = 1.4, 0.3, 0.6
        z = SiteVector.ones(medium_basis.primes)
        params = NcsParams(s=s, z=z)
        state = ncs_state(params, medium_basis)
        dim = len(medium_basis)
        h = sp.csr_matrix((dim, dim), dtype=np.complex128)
        lower_sum = sp.csr_matrix((dim, dim), dtype=np.complex128)
        for p in medium_basis.primes:
            n_p = fk.number_operator(medium_basis, p).matrix
            h = h + 0.5 * U * (n_p @ n_p - n_p) - mu * n_p
            lower_sum = lower_sum + fk.annihilation_operator(medium_basis, p).matrix
        raise_sum = lower_sum.conjugate().transpose().tocsr()
        h = h - tau * 2.0 * (raise_sum @ lower_sum)
        numeric = float(np.real(state.vector.inner(fk.SparseOperator(medium_basis, h, "H").apply(state.vector))))
        p2 = sum(p ** (-2 * s.real) for p in medium_basis.primes)
        p4 = sum(p ** (-4 * s.real) for p in medium_basis.primes)
        p1 = sum(p ** (-s) for p in medium_basis.primes)
        closed = 0.5 * U * p4 - mu * p2 - 2.0 * tau * abs(p1) ** 2
        scale = 1 + abs(U) + abs(mu) + abs(tau) * (1 + abs(p1)) ** 2
        assert abs(closed - numeric) <= rm_tolerance(state.residual_mass) * scale


class TestTower:
    def test_rank_one(self):
        out = pn_tower_expectation(2.0 + 0j, 1)
        assert out.value.real == pytest.approx(1.0 + P1_AT_2**2, abs=1e-6)
        assert out.value.real == pytest.approx(1.2045, abs=1e-4)

    def test_rank_two_uses_half_sum_identity(self, mass_basis):
        s = 2.4 + 0j
        rec = p_n_recursive(2, s)
        direct = 0.5 * (prime_zeta(s).value ** 2 + prime_zeta(2 * s).value)
        assert rec.value == pytest.approx(direct, rel=1e-12)
        from primefock.dirichlet import p_n

        enum = p_n(2, s, mass_basis)
        assert abs(rec.value - enum.value) <= rec.tail_bound + enum.tail_bound

    def test_matrix_oracle_rank_two(self):
        basis = enumerate_basis(TruncationSpec(p_max=7, a_max=4, omega_max=4))
        s = 1.3 + 0j
        z = SiteVector.ones(basis.primes)
        params = NcsParams(s=s, z=z)
        state = ncs_state(params, basis)
        dim = len(basis)
        h = sp.identity(dim, dtype=np.complex128, format="csr")
        closed = 1.0
        for m in (1, 2):
            block = sp.csr_matrix((dim, dim), dtype=np.complex128)
            lam = 0j
            for f in basis.facts:
                if f.big_omega == m:
                    block = block + fk.annihilation_operator(basis, f.value).matrix
                    lam += f.value ** (-s)
            h = h + block.conjugate().transpose() @ block
            closed += abs(lam) ** 2
        numeric = float(np.real(state.vector.inner(fk.SparseOperator(basis, h.tocsr(), "H").apply(state.vector))))
        assert abs(closed - numeric) <= rm_tolerance(state.residual_mass) * (1 + closed)


class TestGeneralExpectation:
    def test_single_hop_pair(self):
        basis = enumerate_basis(TruncationSpec(p_max=7, a_max=3, omega_max=3))
        s = 1.3 + 0j
        out = general_expectation(s, [], [(4, 6, 1.0 + 0j)], basis)
        expected = 2.0 * (4.0 ** (-s.real) * 6.0 ** (-s.real))
        assert out.value.real == pytest.approx(expected, rel=1e-14)

    def test_unequal_counts_rejected(self):
        basis = enumerate_basis(TruncationSpec(p_max=7, a_max=3, omega_max=3))
        with pytest.raises(ValueError):
            general_expectation(1.3 + 0j, [], [(2, 4, 1.0)], basis)

    def test_constant_term_rejected(self):
        basis = enumerate_basis(TruncationSpec(p_max=7, a_max=3, omega_max=3))
        with pytest.raises(ValueError):
            general_expectation(1.3 + 0j, [1.0, 1.0], [], basis)

    def test_linear_poly_matrix_oracle(self):
        basis = enumerate_basis(TruncationSpec(p_max=7, a_max=4, omega_max=4))
        s = 1.3 + 0j
        z = SiteVector.ones(basis.primes)
        state = ncs_state(NcsParams(s=s, z=z), basis)
        dim = len(basis)
        h = sp.csr_matrix((dim, dim), dtype=np.complex128)
        for f in basis.facts:
            a_n = fk.annihilation_operator(basis, f.value).matrix
            h = h + a_n.conjugate().transpose() @ a_n
        numeric = float(np.real(state.vector.inner(fk.SparseOperator(basis, h.tocsr(), "H").apply(state.vector))))
        closed = float(np.sum(np.exp(-2.0 * s.real * basis.log_values)))
        assert abs(closed - numeric) <= rm_tolerance(state.residual_mass) * closed

    def test_wick_monomial(self, medium_basis):
        # normal-ordered square at one site: expectation is the fourth power
        s = 1.2 + 0j
        z = SiteVector.ones(medium_basis.primes)
        state = ncs_state(NcsParams(s=s, z=z), medium_basis)
        a2 = fk.annihilation_operator(medium_basis, 2).matrix
        a2d = a2.conjugate().transpose()
        op = a2d @ a2d @ a2 @ a2
        numeric = float(np.real(state.vector.inner(fk.SparseOperator(medium_basis, op.tocsr(), "W").apply(state.vector))))
        assert numeric == pytest.approx(2.0 ** (-4 * s.real), abs=rm_tolerance(state.residual_mass))

    def test_dirichlet_interaction_form(self):
        f = DirichletCoefficients.from_map({1: 1.0, 2: 0.5, 6: -2.0})
        s, sp_ = 1.1 + 0.3j, 0.7 - 0.1j
        z = SiteVector.from_map({2: 0.8, 3: 1.2j})
        total = 1.0 + 0.5 * 2.0 ** (-(s + sp_)) * 0.8 + (-2.0) * 6.0 ** (-(s + sp_)) * 0.8 * 1.2j
        expected = abs(total) ** 2
        out = dirichlet_interaction_expectation(s, sp_, f, z=z)
        assert out == pytest.approx(expected, rel=1e-12)

    def test_phase_twist_matches_complex_weights(self):
        f = DirichletCoefficients.from_map({2: 1.0, 3: 1.0})
        s, sp_ = 1.2 + 0j, 0.5 + 0j
        mu = {2: 0.3, 3: 0.6}
        z = SiteVector.from_map(
            {2: cmath.exp(2j * cmath.pi * 0.3), 3: cmath.exp(2j * cmath.pi * 0.6)}
        )
        assert dirichlet_interaction_expectation(s, sp_, f, mu=mu) == pytest.approx(
            dirichlet_interaction_expectation(s, sp_, f, z=z), rel=1e-12
        )


class TestOneParticle:
    def test_five_sites(self):
        vals, _ = one_particle_spectrum(5, 1.5 + 0j)
        expected = np.array([math.sqrt(3), 1.0, 0.0, -1.0, -math.sqrt(3)])
        assert np.allclose(vals, expected, atol=1e-10)

    def test_two_sites(self):
        vals, _ = one_particle_spectrum(2, 2.0 + 1j)
        assert np.allclose(vals, [1.0, -1.0], atol=1e-12)

    def test_independent_of_parameter(self):
        rng = np.random.default_rng(9)
        spectra = []
        for _ in range(5):
            s = complex(0.6 + 2.0 * rng.random(), 3.0 * rng.standard_normal())
            vals, _ = one_particle_spectrum(5, s)
            spectra.append(vals)
        base = spectra[0]
        for other in spectra[1:]:
            assert np.max(np.abs(other - base)) < 1e-10


class TestMultiParticle:
    def test_dimer(self):
        out = multi_particle_spectrum(FiniteArrayParams(N=2, n=2, gamma=0.0, tau=1.0, delta=0.0))
        assert [round(e, 12) for _, e in out] == [-2.0, 0.0, 2.0]
        # brute-force oracle on the 3x3 monomial matrix agrees
        bf = brute_force_spectrum(FiniteArrayParams(N=2, n=2, gamma=0.0, tau=1.0, delta=0.0))
        assert np.allclose(bf, [-2.0, 0.0, 2.0], atol=1e-12)

    def test_minimum_of_linear_model(self):
        tau = 0.7
        out = multi_particle_spectrum(FiniteArrayParams(N=5, n=3, gamma=1.0, tau=tau, delta=0.0))
        assert len(out) == 35
        assert out[0][1] == pytest.approx(3.0 - 3.0 * math.sqrt(3.0) * tau, abs=1e-12)

    def test_quadratic_is_pointwise_map(self):
        base = multi_particle_spectrum(FiniteArrayParams(N=4, n=2, gamma=0.5, tau=0.9, delta=0.0))
        quad = dict(
            (m.alpha, e)
            for m, e in multi_particle_spectrum(
                FiniteArrayParams(N=4, n=2, gamma=0.5, tau=0.9, delta=1.7)
            )
        )
        for m, lam in base:
            assert quad[m.alpha] == pytest.approx(1.7 * lam * lam + lam, rel=1e-12)

    def test_negation_symmetry_at_zero_offsets(self):
        out = [e for _, e in multi_particle_spectrum(FiniteArrayParams(N=5, n=2, gamma=0.0, tau=1.0, delta=0.0))]
        assert sorted(round(e, 9) for e in out) == sorted(round(-e, 9) for e in out)


class TestBruteForceOracle:
    @pytest.mark.parametrize("N", [2, 3, 4, 5])
    @pytest.mark.parametrize("n", [1, 2, 3])
    def test_multiset_equality(self, N, n):
        rng = np.random.default_rng(100 * N + n)
        for _ in range(5):
            params = FiniteArrayParams(
                N=N,
                n=n,
                gamma=float(rng.standard_normal()),
                tau=float(rng.standard_normal()),
                delta=float(rng.choice([0.0, 1.0, rng.standard_normal()])),
                s=complex(0.7 + rng.random(), rng.standard_normal()),
            )
            exact = np.array(sorted(e for _, e in multi_particle_spectrum(params)))
            brute = brute_force_spectrum(params)
            assert np.max(np.abs(exact - brute)) < 1e-9

    def test_single_particle_reduces_to_tridiagonal(self):
        params = FiniteArrayParams(N=5, n=1, gamma=0.4, tau=1.0, delta=0.0, s=1.5 + 0.5j)
        brute = brute_force_spectrum(params)
        vals, _ = one_particle_spectrum(5, params.s)
        expected = np.sort(params.gamma - params.tau * vals)
        assert np.allclose(brute, expected, atol=1e-10)

    def test_dimension_cap(self):
        with pytest.raises(ResourceCapExceeded):
            brute_force_spectrum(FiniteArrayParams(N=30, n=10))


class TestSweep:
    def test_figure_preset_shape(self):
        grid = default_tau_grid()
        assert len(grid) == 121
        table = spectrum_sweep(FiniteArrayParams(N=5, n=3, gamma=1.0, delta=0.0), grid, 15)
        assert len(table.rows) == 121 * 15
        ranks = {r.mode_rank for r in table.rows}
        assert ranks == set(range(1, 16))

    def test_linear_model_rows_are_affine_per_alpha(self):
        grid = default_tau_grid()
        table = spectrum_sweep(FiniteArrayParams(N=5, n=3, gamma=1.0, delta=0.0), grid, 15)
        cosines = mode_cosines(5)
        by_alpha = {}
        for r in table.rows:
            by_alpha.setdefault(r.alpha, []).append((r.tau, r.eigenvalue))
        for alpha, pts in by_alpha.items():
            slope = float(np.dot(alpha, cosines))
            for tau, ev in pts:
                assert ev == pytest.approx(3.0 + slope * tau, abs=1e-12)

    def test_linear_model_ground_constant(self):
        grid = default_tau_grid()
        trans = ground_state_transition(FiniteArrayParams(N=5, n=3, gamma=1.0, delta=0.0), grid)
        assert trans == []
        table = spectrum_sweep(FiniteArrayParams(N=5, n=3, gamma=1.0, delta=0.0), grid, 1)
        grounds = {r.alpha for r in table.rows}
        assert grounds == {(0, 0, 0, 0, 3)}

    def test_quadratic_model_transitions(self):
        # oracle scan (frozen): four change points, the first inside (0.4, 1)
        grid = default_tau_grid()
        trans = ground_state_transition(FiniteArrayParams(N=5, n=3, gamma=1.0, delta=1.0), grid)
        assert len(trans) == 4
        first = trans[0]
        assert (first.tau_low, first.tau_high) == (0.72, 0.73)
        assert first.old_alpha == (0, 0, 0, 0, 3)
        assert first.new_alpha == (0, 0, 0, 1, 2)
        assert 0.4 < first.tau_low < first.tau_high < 1.0
        # the new ground configuration pairs two particles in one mode
        assert max(first.new_alpha) == 2

    def test_quadratic_model_is_nonmonotonic(self):
        grid = default_tau_grid()
        table = spectrum_sweep(FiniteArrayParams(N=5, n=3, gamma=1.0, delta=1.0), grid, 15)
        by_alpha = {}
        for r in table.rows:
            by_alpha.setdefault(r.alpha, []).append((r.tau, r.eigenvalue))
        nonmono = 0
        for pts in by_alpha.values():
            evs = [e for _, e in sorted(pts)]
            if len(evs) > 2:
                diffs = np.diff(evs)
                if (diffs > 1e-12).any() and (diffs < -1e-12).any():
                    nonmono += 1
        assert nonmono >= 1

    def test_m_lowest_cap(self):
        with pytest.raises(ValueError):
            spectrum_sweep(FiniteArrayParams(N=2, n=2), [0.5], 10)
