"""Acceptance battery: one test per shipped criterion.

Each test pins the criterion's stated tolerance and runtime budget, and
prints one `[acceptance] criterion NN PASS/FAIL` line (visible under
`pytest -s` or in the captured-output section of a failure).
"""
import cmath
import math
import time

import numpy as np
import pytest

from primefock import fock as fk
from primefock import spectra as sp
from primefock.cli import main as cli_main
from primefock.dirichlet import SiteVector, p_n, prime_zeta, verify_mass_identity
from primefock.ncs import (
    NcsParams,
    QuadratureSpec,
    eigen_residual,
    ncs_state,
    particle_number_pmf,
    radial_factor,
    reconstructed_entry,
)
from primefock.numtheory import (
    DirichletCoefficients,
    TruncationSpec,
    dirichlet_convolve,
    enumerate_basis,
    sieve_primes,
)


def _finish(num: int, desc: str, ok: bool, t0: float, budget: float):
    elapsed = time.time() - t0
    in_budget = elapsed < budget
    status = "PASS" if (ok and in_budget) else "FAIL"
    print(f"[acceptance] criterion {num:02d} {status} ({elapsed:.1f}s < {budget:.0f}s): {desc}")
    assert ok, f"criterion {num} failed: {desc}"
    assert in_budget, f"criterion {num} exceeded runtime budget ({elapsed:.1f}s >= {budget}s)"


def test_criterion_01_ccr():
    t0 = time.time()
    basis = enumerate_basis(TruncationSpec(p_max=13, a_max=4, omega_max=4, guard=1))
    ok = True
    pairs = [(p, q) for p in (2, 3, 5, 7, 11, 13) for q in (2, 3, 5, 7, 11, 13)]
    for p, q in pairs:
        ok &= fk.verify_ccr(basis, p, q, tolerance=1e-12).passed
    for p, q in [(2, 2), (2, 3), (3, 2), (5, 5), (7, 11), (13, 13)]:
        ok &= fk.verify_quadrature_ccr(basis, p, q, tolerance=1e-12).passed
    _finish(1, "canonical commutation relations on interior columns", ok, t0, 5.0)


def test_criterion_02_mass_identities():
    t0 = time.time()
    basis = enumerate_basis(TruncationSpec(p_max=53, a_max=6, omega_max=6))
    ok = True
    for sigma in (0.8, 1.0, 3.0):
        rep = verify_mass_identity(sigma, basis)
        ok &= rep.passed
        if sigma == 3.0:
            ok &= rep.residual < 1e-8
    _finish(2, "mass sums match exp(P) and Poisson slices below tail bounds", ok, t0, 5.0)


def test_criterion_03_eigenproperty():
    t0 = time.time()
    basis = enumerate_basis(TruncationSpec(p_max=23, a_max=8, omega_max=8))
    rng = np.random.default_rng(20240611)
    z_primes = sieve_primes(31)
    ok = True
    for sigma in (0.8, 1.3):
        for _ in range(3):
            zmap = {
                p: (0.5 + 0.7 * rng.random()) * cmath.exp(2j * cmath.pi * rng.random())
                for p in z_primes
            }
            params = NcsParams(s=complex(sigma, 0.3), z=SiteVector.from_map(zmap))
            for n in (2, 3, 4, 6, 12):
                rep = eigen_residual(n, params, basis)
                # pinned form: residual < 3 sqrt(residual_mass)
                rm = rep.diagnostics["residual_mass"]
                ok &= rep.residual < 3.0 * math.sqrt(rm)
    _finish(3, "simultaneous eigenproperty within 3 sqrt(residual mass)", ok, t0, 10.0)


def test_criterion_04_poisson():
    t0 = time.time()
    basis = enumerate_basis(TruncationSpec(p_max=31, a_max=5, omega_max=6))
    state = ncs_state(NcsParams(s=1.0 + 0j), basis)
    dev = 0.0
    for n in range(5):
        block = fk.projector(basis, n).apply(state.vector)
        mass = float(np.real(block.inner(state.vector)))
        dev += abs(mass - particle_number_pmf(1.0, n))
    ok = dev <= state.residual_mass
    total = sum(particle_number_pmf(1.0, n) for n in range(21))
    ok &= abs(total - 1.0) < 1e-12
    _finish(4, "particle-count law is Poisson; pmf normalized", ok, t0, 5.0)


def test_criterion_05_displacement():
    t0 = time.time()
    basis = enumerate_basis(TruncationSpec(p_max=31, a_max=6, omega_max=6))
    s = 1.3 + 0j
    direct = fk.displace_vacuum(s, None, basis)
    target = ncs_state(NcsParams(s=np.conj(s)), basis)
    tol = target.residual_mass + 1e-8
    fid = abs(target.vector.inner(direct.vector))
    ok = fid >= 1.0 - tol
    bch = fk.displace_vacuum_bch(s, None, basis)
    agree = abs(direct.vector.inner(bch.vector)) / (direct.vector.norm() * bch.vector.norm())
    ok &= agree >= 1.0 - tol
    _finish(5, "displaced vacuum reproduces the coherent state; factored form agrees", ok, t0, 30.0)


def test_criterion_06_norm_bounds():
    t0 = time.time()
    basis = enumerate_basis(TruncationSpec(p_max=53, a_max=4, omega_max=4))
    sigma = 1.5
    cd = fk.c_raising(basis, sigma)
    p1_trunc = sum(p ** (-2.0 * sigma) for p in basis.primes)
    ok = abs(fk.block_norm(cd, 0) - math.sqrt(p1_trunc)) < 1e-10
    ok &= abs(fk.block_norm(cd, 1) - math.sqrt(2 * p1_trunc)) < 1e-10
    p1 = prime_zeta(2 * sigma)
    p2 = p_n(2, complex(sigma), basis)
    margins = []
    for n in (2, 3):
        bound = math.sqrt(
            n * (abs(p2.value) + p2.tail_bound) + p1.value.real + p1.tail_bound
        )
        margins.append(bound - fk.block_norm(cd, n))
    ok &= all(m > 0 for m in margins)
    for n in (0, 1, 2):
        ok &= fk.block_adjoint_check(basis, sigma + 0.4j, n).residual < 1e-13
    _finish(6, f"block norms: equalities at ranks 0,1; margins {[round(m,3) for m in margins]}", ok, t0, 10.0)


def test_criterion_07_resolution_of_identity():
    t0 = time.time()
    basis = enumerate_basis(TruncationSpec(p_max=13, a_max=4, omega_max=6))
    quad = QuadratureSpec(radial_order=8, prime_support=tuple(basis.primes), occupation_cap=4)
    ok = True
    for p in basis.primes:
        for a in range(5):
            ok &= abs(radial_factor(a, quad.radial_order) - 1.0) < 1e-12
    eligible = [f.value for f in basis.facts if all(a <= 4 for _, a in f.exponents)][:50]
    assert len(eligible) == 50
    for k in eligible:
        ok &= abs(reconstructed_entry(k, k, quad, basis) - 1.0) < 1e-12
    for k, l in zip(eligible, eligible[1:]):
        ok &= reconstructed_entry(k, l, quad, basis) == 0.0
    _finish(7, "identity resolution: radial factors and reconstructed entries", ok, t0, 10.0)


def test_criterion_08_dirichlet_ring():
    t0 = time.time()
    basis = enumerate_basis(TruncationSpec(p_max=11, a_max=4, omega_max=5))
    rng = np.random.default_rng(8)
    f = DirichletCoefficients.from_map(
        {n: complex(rng.standard_normal(), rng.standard_normal()) for n in range(1, 13)}
    )
    g = DirichletCoefficients.from_map(
        {n: complex(rng.standard_normal(), rng.standard_normal()) for n in range(1, 13)}
    )
    h = dirichlet_convolve(f, g)
    s = 1.2 + 0.7j
    fm = fk.dirichlet_operator(basis, s, f).matrix
    gm = fk.dirichlet_operator(basis, s, g).matrix
    hm = fk.dirichlet_operator(basis, s, h).matrix
    mask = basis.interior_mask()
    ok = fk.interior_max_abs(fm @ gm - hm, mask) < 1e-12
    # eigen-identity on a weighted coherent state
    eb = enumerate_basis(TruncationSpec(p_max=23, a_max=8, omega_max=8))
    z = SiteVector.from_map(
        {p: 0.8 * cmath.exp(0.2j * p) for p in sieve_primes(31)}
    )
    params = NcsParams(s=1.3 + 0.2j, z=z)
    state = ncs_state(params, eb)
    s_prime = 0.4 - 0.1j
    lam = 0j
    for n, fv in f.entries:
        term = fv if n == 1 else fv * cmath.exp(-(params.s + s_prime) * math.log(n))
        from primefock.numtheory import factorize

        for p, a in factorize(n).exponents:
            term *= z.get(p) ** a
        lam += term
    op = fk.dirichlet_operator(eb, s_prime, f)
    resid = (op.apply(state.vector) - state.vector.scaled(lam)).norm()
    scale = sum(abs(fv) for _, fv in f.entries)
    ok &= resid <= (3.0 * math.sqrt(state.residual_mass) + 1e-10) * scale
    _finish(8, "operator product realizes Dirichlet convolution; eigen-identity holds", ok, t0, 5.0)


def test_criterion_09_finite_array_spectra():
    t0 = time.time()
    vals, _ = sp.one_particle_spectrum(5, 1.5 + 0j)
    expected = np.array([math.sqrt(3), 1.0, 0.0, -1.0, -math.sqrt(3)])
    ok = bool(np.max(np.abs(vals - expected)) < 1e-10)
    rng = np.random.default_rng(99)
    base = None
    for _ in range(5):
        s = complex(0.6 + 2 * rng.random(), 2 * rng.standard_normal())
        v, _ = sp.one_particle_spectrum(5, s)
        base = v if base is None else base
        ok &= bool(np.max(np.abs(v - base)) < 1e-10)
    for N in (2, 3, 4, 5):
        for n in (1, 2, 3):
            for delta in (0.0, 1.0):
                params = sp.FiniteArrayParams(
                    N=N, n=n, gamma=1.0, tau=0.7, delta=delta, s=1.5 + 0.3j
                )
                exact = np.array(sorted(e for _, e in sp.multi_particle_spectrum(params)))
                brute = sp.brute_force_spectrum(params)
                ok &= bool(np.max(np.abs(exact - brute)) < 1e-9)
    _finish(9, "array spectra: cosine law, parameter independence, oracle multiset match", ok, t0, 20.0)


def test_criterion_10_figure_sweep(tmp_path, capsys):
    t0 = time.time()
    code = cli_main(["spectrum", "--figure1", "--outdir", str(tmp_path / "a")])
    ok = code == 0
    code = cli_main(["spectrum", "--figure1", "--outdir", str(tmp_path / "b")])
    ok &= code == 0
    capsys.readouterr()
    for name in ("figure1_delta0.csv", "figure1_delta1.csv"):
        ok &= (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()
    # linear sweep: affine rows, constant ground label
    grid = sp.default_tau_grid()
    table = sp.spectrum_sweep(sp.FiniteArrayParams(N=5, n=3, gamma=1.0, delta=0.0), grid, 15)
    cos5 = sp.mode_cosines(5)
    for r in table.rows:
        ok &= abs(r.eigenvalue - (3.0 + float(np.dot(r.alpha, cos5)) * r.tau)) < 1e-12
    ok &= (
        sp.ground_state_transition(sp.FiniteArrayParams(N=5, n=3, gamma=1.0, delta=0.0), grid)
        == []
    )
    trans = sp.ground_state_transition(sp.FiniteArrayParams(N=5, n=3, gamma=1.0, delta=1.0), grid)
    ok &= len(trans) >= 1
    ok &= any(0.4 < t.tau_low and t.tau_high < 1.0 for t in trans)
    _finish(10, "figure sweep: bit-stable files, affine linear modes, transition window", ok, t0, 10.0)


def test_criterion_11_holstein_and_fourier():
    t0 = time.time()
    basis = enumerate_basis(TruncationSpec(p_max=13, a_max=4, omega_max=4))
    ok = True
    for p in (2, 3, 5):
        ok &= fk.verify_holstein_primakoff(p, basis, tolerance=1e-12).passed
    rng = np.random.default_rng(4)
    for _ in range(10):
        picks = rng.choice(len(basis), size=10, replace=False)
        amps = np.zeros(len(basis), dtype=np.complex128)
        amps[picks] = rng.standard_normal(10) + 1j * rng.standard_normal(10)
        v = fk.FockVector(basis, amps)
        for _ in range(2):
            mu = {int(p): float(rng.random()) for p in basis.primes}
            ok &= abs(
                fk.fourier_sum_via_u(basis, v, mu) - fk.fourier_sum_direct(basis, v, mu)
            ) < 1e-12
    _finish(11, "shift factorization of site maps; Fourier sum via phase unitary", ok, t0, 5.0)
