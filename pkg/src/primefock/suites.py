"""Named verification suites driving the module-level checks.

Each suite runs a fixed battery at documented default parameters (flags can
override the truncation and the half-plane point) and returns one
VerificationReport per check.  Randomized inputs are drawn from a seeded
generator so output is reproducible byte for byte.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import fock as fk
from . import ncs
from .dirichlet import SiteVector, p_n, prime_zeta, verify_mass_identity
from .numtheory import (
    DirichletCoefficients,
    TruncationSpec,
    dirichlet_convolve,
    enumerate_basis,
    factorize,
    sieve_primes,
)
from .reports import VerificationReport

SUITE_NAMES = (
    "ccr",
    "eigen",
    "poisson",
    "uncertainty",
    "displacement",
    "resolution",
    "dirichlet-ring",
    "holstein",
    "norms",
    "commutator",
    "mass",
)


@dataclass
class SuiteOptions:
    """Overrides applied on top of each suite's documented defaults."""

    p_max: int | None = None
    a_max: int | None = None
    omega_max: int | None = None
    k_max: int | None = None
    guard: int | None = None
    sigma: float | None = None
    t: float = 0.0
    z: dict[int, complex] | None = None
    tolerance: float | None = None
    occupation_cap: int | None = None
    seed: int = 0

    def trunc(self, default: TruncationSpec) -> TruncationSpec:
        return TruncationSpec(
            p_max=self.p_max if self.p_max is not None else default.p_max,
            a_max=self.a_max if self.a_max is not None else default.a_max,
            omega_max=self.omega_max if self.omega_max is not None else default.omega_max,
            k_max=self.k_max if self.k_max is not None else default.k_max,
            guard=self.guard if self.guard is not None else default.guard,
        )

    def s(self, default_sigma: float) -> complex:
        sigma = self.sigma if self.sigma is not None else default_sigma
        return complex(sigma, self.t)


def random_site_weights(primes, rng) -> SiteVector:
    """Random nonzero weights: moduli in [0.5, 1.2], uniform phases."""
    return SiteVector.from_map(
        {
            int(p): (0.5 + 0.7 * rng.random()) * np.exp(2j * np.pi * rng.random())
            for p in primes
        }
    )


def run_suite(name: str, options: SuiteOptions | None = None) -> list[VerificationReport]:
    options = options or SuiteOptions()
    try:
        runner = _RUNNERS[name]
    except KeyError:
        raise ValueError(f"unknown suite {name!r}; choose from {SUITE_NAMES}") from None
    return runner(options)


def suite_ccr(opt: SuiteOptions) -> list[VerificationReport]:
    basis = enumerate_basis(opt.trunc(TruncationSpec(p_max=13, a_max=4, omega_max=4)))
    tol = opt.tolerance if opt.tolerance is not None else 1e-12
    reports = []
    for p, q in [(2, 2), (2, 3), (3, 3), (3, 5), (5, 5), (2, 13)]:
        reports.append(fk.verify_ccr(basis, p, q, tolerance=tol))
    for p, q in [(2, 2), (2, 3), (3, 2), (5, 5)]:
        reports.append(fk.verify_quadrature_ccr(basis, p, q, tolerance=tol))
    return reports


def suite_mass(opt: SuiteOptions) -> list[VerificationReport]:
    basis = enumerate_basis(opt.trunc(TruncationSpec(p_max=53, a_max=6, omega_max=6)))
    sigmas = [opt.sigma] if opt.sigma is not None else [0.8, 1.0, 3.0]
    return [verify_mass_identity(sigma, basis) for sigma in sigmas]


def suite_eigen(opt: SuiteOptions) -> list[VerificationReport]:
    basis = enumerate_basis(opt.trunc(TruncationSpec(p_max=23, a_max=8, omega_max=8)))
    sigmas = [opt.sigma] if opt.sigma is not None else [0.8, 1.3]
    rng = np.random.default_rng(opt.seed)
    # weights live on a slightly wider prime set than the basis: the
    # truncation then visibly cuts site content, as for the canonical state
    z_primes = sieve_primes(_next_next_prime(basis.trunc.p_max))
    reports: list[VerificationReport] = []
    for sigma in sigmas:
        draws = [SiteVector.from_map(opt.z)] if opt.z else [
            random_site_weights(z_primes, rng) for _ in range(3)
        ]
        for z in draws:
            params = ncs.NcsParams(s=complex(sigma, opt.t or 0.3), z=z)
            for n in (2, 3, 4, 6, 12):
                reports.append(ncs.eigen_residual(n, params, basis))
        reports.append(ncs.eigen_residual(2, ncs.NcsParams(s=complex(sigma, opt.t)), basis))
    return reports


def _next_next_prime(p: int) -> int:
    q = p
    for _ in range(2):
        q += 1
        while any(q % d == 0 for d in range(2, math.isqrt(q) + 1)):
            q += 1
    return q


def suite_poisson(opt: SuiteOptions) -> list[VerificationReport]:
    basis = enumerate_basis(opt.trunc(TruncationSpec(p_max=31, a_max=5, omega_max=6)))
    s = opt.s(1.0)
    state = ncs.ncs_state(ncs.NcsParams(s=s), basis)
    total_dev = 0.0
    per_block = {}
    for n in range(5):
        proj = fk.projector(basis, n)
        mass = float(np.real(proj.apply(state.vector).inner(state.vector)))
        pmf = ncs.particle_number_pmf(s, n)
        per_block[str(n)] = abs(mass - pmf)
        total_dev += abs(mass - pmf)
    reports = [
        VerificationReport.from_residual(
            name="poisson_blocks",
            residual=total_dev,
            tolerance=(opt.tolerance if opt.tolerance is not None else state.residual_mass),
            params={"sigma": s.real, "n_max": 4},
            diagnostics={"per_block": per_block, "residual_mass": state.residual_mass},
        )
    ]
    pmf_sum = sum(ncs.particle_number_pmf(s, n) for n in range(21))
    reports.append(
        VerificationReport.from_residual(
            name="poisson_normalization",
            residual=abs(pmf_sum - 1.0),
            tolerance=1e-12,
            params={"sigma": s.real, "n_terms": 21},
        )
    )
    return reports


def suite_uncertainty(opt: SuiteOptions) -> list[VerificationReport]:
    basis = enumerate_basis(opt.trunc(TruncationSpec(p_max=31, a_max=4, omega_max=4)))
    s = opt.s(3.0)
    tol = opt.tolerance if opt.tolerance is not None else 1e-6
    reports = []
    for p in (2, 3):
        vx, vp = ncs.quadrature_variances(p, s, basis)
        reports.append(
            VerificationReport.from_residual(
                name="minimal_uncertainty",
                residual=max(abs(vx - 0.5), abs(vp - 0.5)),
                tolerance=tol,
                params={"p": p, "sigma": s.real},
                diagnostics={"var_x": vx, "var_p": vp, "product": vx * vp},
            )
        )
        reports.append(
            VerificationReport.from_residual(
                name="heisenberg_product",
                residual=max(0.0, 0.25 - vx * vp),
                tolerance=tol,
                params={"p": p, "sigma": s.real},
            )
        )
    e1 = fk.FockVector.basis_state(basis, 1)
    x2 = fk.quadrature_x(basis, 2).matrix @ e1.amplitudes
    p2 = fk.quadrature_p(basis, 2).matrix @ e1.amplitudes
    vac = max(
        abs(float(np.real(np.vdot(x2, x2))) - 0.5),
        abs(float(np.real(np.vdot(p2, p2))) - 0.5),
    )
    reports.append(
        VerificationReport.from_residual(
            name="vacuum_variances", residual=vac, tolerance=1e-12, params={"p": 2}
        )
    )
    return reports


def suite_displacement(opt: SuiteOptions) -> list[VerificationReport]:
    basis = enumerate_basis(opt.trunc(TruncationSpec(p_max=31, a_max=6, omega_max=6)))
    s = opt.s(1.3)
    z = SiteVector.from_map(opt.z) if opt.z else None
    direct = fk.displace_vacuum(s, z, basis)
    target = ncs.ncs_state(
        ncs.NcsParams(s=np.conj(s), z=z.conjugated() if z else None), basis
    )
    fid = abs(target.vector.inner(direct.vector))
    tol = opt.tolerance if opt.tolerance is not None else target.residual_mass + 1e-8
    reports = [
        VerificationReport.from_residual(
            name="displacement_fidelity",
            residual=max(0.0, 1.0 - fid),
            tolerance=tol,
            params={"sigma": s.real, "p_max": basis.trunc.p_max},
            diagnostics={
                "fidelity": fid,
                "residual_mass": target.residual_mass,
                "taylor_terms": direct.terms_used,
                "boundary_loss": direct.boundary_loss,
            },
        )
    ]
    bch = fk.displace_vacuum_bch(s, z, basis)
    agree = abs(direct.vector.inner(bch.vector)) / (
        direct.vector.norm() * bch.vector.norm()
    )
    reports.append(
        VerificationReport.from_residual(
            name="displacement_bch_agreement",
            residual=max(0.0, 1.0 - agree),
            tolerance=tol,
            params={"sigma": s.real},
            diagnostics={"norm_difference": (direct.vector - bch.vector).norm()},
        )
    )
    return reports


def suite_resolution(opt: SuiteOptions) -> list[VerificationReport]:
    basis = enumerate_basis(opt.trunc(TruncationSpec(p_max=13, a_max=4, omega_max=6)))
    s = opt.s(0.8)
    cap = opt.occupation_cap if opt.occupation_cap is not None else 4
    quad = ncs.QuadratureSpec(
        radial_order=2 * cap, prime_support=tuple(basis.primes), occupation_cap=cap
    )
    tol = opt.tolerance if opt.tolerance is not None else 1e-12
    return [ncs.resolution_identity_check(s, quad, basis, tolerance=tol)]


def suite_dirichlet_ring(opt: SuiteOptions) -> list[VerificationReport]:
    basis = enumerate_basis(opt.trunc(TruncationSpec(p_max=11, a_max=4, omega_max=5)))
    rng = np.random.default_rng(opt.seed)
    tol = opt.tolerance if opt.tolerance is not None else 1e-12
    f = DirichletCoefficients.from_map(
        {n: complex(rng.standard_normal(), rng.standard_normal()) for n in range(1, 13)}
    )
    g = DirichletCoefficients.from_map(
        {n: complex(rng.standard_normal(), rng.standard_normal()) for n in range(1, 13)}
    )
    h = dirichlet_convolve(f, g)
    s = opt.s(1.2) + 0.7j
    fm = fk.dirichlet_operator(basis, s, f).matrix
    gm = fk.dirichlet_operator(basis, s, g).matrix
    hm = fk.dirichlet_operator(basis, s, h).matrix
    mask = basis.interior_mask()
    residual = max(
        fk.interior_max_abs(fm @ gm - hm, mask),
        fk.interior_max_abs(fm @ gm - gm @ fm, mask),
    )
    reports = [
        VerificationReport.from_residual(
            name="dirichlet_ring_product",
            residual=residual,
            tolerance=tol,
            params={"support": "1..12", "s": str(s)},
        )
    ]
    # eigen-identity of the ring operators on a coherent state
    eb = enumerate_basis(TruncationSpec(p_max=23, a_max=8, omega_max=8))
    z = random_site_weights(sieve_primes(31), rng)
    params = ncs.NcsParams(s=complex(1.3, 0.2), z=z)
    state = ncs.ncs_state(params, eb)
    s_prime = complex(0.4, -0.1)
    lam = 0j
    for n, fv in f.entries:
        term = fv if n == 1 else fv * np.exp(-(params.s + s_prime) * math.log(n))
        for p, a in factorize(n).exponents:
            term *= z.get(p) ** a
        lam += term
    op = fk.dirichlet_operator(eb, s_prime, f)
    resid = (op.apply(state.vector) - state.vector.scaled(lam)).norm()
    scale = sum(abs(fv) for _, fv in f.entries)
    reports.append(
        VerificationReport.from_residual(
            name="dirichlet_ring_eigen",
            residual=resid,
            tolerance=ncs.rm_tolerance(state.residual_mass) * scale,
            params={"s_prime": str(s_prime)},
            diagnostics={"eigenvalue": [lam.real, lam.imag]},
        )
    )
    return reports


def suite_holstein(opt: SuiteOptions) -> list[VerificationReport]:
    basis = enumerate_basis(opt.trunc(TruncationSpec(p_max=13, a_max=4, omega_max=4)))
    tol = opt.tolerance if opt.tolerance is not None else 1e-12
    reports = [fk.verify_holstein_primakoff(p, basis, tolerance=tol) for p in (2, 3, 5)]
    rng = np.random.default_rng(opt.seed)
    worst = 0.0
    for _ in range(10):
        support = rng.choice(len(basis), size=min(12, len(basis)), replace=False)
        v = fk.FockVector(
            basis,
            np.zeros(len(basis), dtype=np.complex128),
        )
        v.amplitudes[support] = rng.standard_normal(len(support)) + 1j * rng.standard_normal(
            len(support)
        )
        for _ in range(2):
            mu = {int(p): float(rng.random()) for p in basis.primes}
            lhs = fk.fourier_sum_via_u(basis, v, mu)
            rhs = fk.fourier_sum_direct(basis, v, mu)
            worst = max(worst, abs(lhs - rhs))
    reports.append(
        VerificationReport.from_residual(
            name="fourier_via_phase_unitary",
            residual=worst,
            tolerance=tol,
            params={"vectors": 10, "mu_draws": 20},
        )
    )
    return reports


def suite_norms(opt: SuiteOptions) -> list[VerificationReport]:
    basis = enumerate_basis(opt.trunc(TruncationSpec(p_max=53, a_max=4, omega_max=4)))
    s = opt.s(1.5)
    sigma = s.real
    cd = fk.c_raising(basis, s)
    p1_trunc = float(sum(p ** (-2.0 * sigma) for p in basis.primes))
    reports = []
    for n in (0, 1):
        nb = fk.block_norm(cd, n)
        expected = math.sqrt(n + 1) * math.sqrt(p1_trunc)
        reports.append(
            VerificationReport.from_residual(
                name="raising_block_norm_equality",
                residual=abs(nb - expected),
                tolerance=(opt.tolerance if opt.tolerance is not None else 1e-10),
                params={"n": n, "sigma": sigma},
                diagnostics={"norm": nb, "expected": expected},
            )
        )
    p1 = prime_zeta(2.0 * sigma)
    p2 = p_n(2, complex(sigma), basis)
    p2_upper = abs(p2.value) + p2.tail_bound
    for n in (2, 3):
        nb = fk.block_norm(cd, n)
        bound = math.sqrt(n * p2_upper + p1.value.real + p1.tail_bound)
        reports.append(
            VerificationReport.from_residual(
                name="raising_block_norm_bound",
                residual=max(0.0, nb - bound),
                tolerance=0.0,
                params={"n": n, "sigma": sigma},
                diagnostics={"norm": nb, "bound": bound, "margin": bound - nb},
            )
        )
    for n in (0, 1, 2):
        reports.append(fk.block_adjoint_check(basis, s + 0.4j, n))
    return reports


def suite_commutator(opt: SuiteOptions) -> list[VerificationReport]:
    basis = enumerate_basis(opt.trunc(TruncationSpec(p_max=13, a_max=4, omega_max=5)))
    tol = opt.tolerance if opt.tolerance is not None else 1e-12
    h = complex(0.7, 0.2)
    cases = [(4, 6), (2, 4), (3, 3), (2, 3), (6, 12)]
    return [fk.verify_commutator_number(n, k, h, basis, tolerance=tol) for n, k in cases]


_RUNNERS = {
    "ccr": suite_ccr,
    "eigen": suite_eigen,
    "poisson": suite_poisson,
    "uncertainty": suite_uncertainty,
    "displacement": suite_displacement,
    "resolution": suite_resolution,
    "dirichlet-ring": suite_dirichlet_ring,
    "holstein": suite_holstein,
    "norms": suite_norms,
    "commutator": suite_commutator,
    "mass": suite_mass,
}
