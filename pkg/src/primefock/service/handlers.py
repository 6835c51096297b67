"""Pure request -> response handlers shared by the HTTP routes and the CLI."""
from __future__ import annotations

import numpy as np

from .. import __version__
from .. import fock as fk
from .. import ncs
from .. import spectra as sp
from ..dirichlet import SiteVector
from ..numtheory import TruncationSpec, enumerate_basis
from ..suites import SUITE_NAMES, SuiteOptions, run_suite
from . import schemas as sc


def _trunc(model: sc.TruncationModel) -> TruncationSpec:
    return TruncationSpec(
        p_max=model.p_max,
        a_max=model.a_max,
        omega_max=model.omega_max,
        k_max=model.k_max,
        guard=model.guard,
    )


def _site_vector(entries: list[sc.ZEntry]) -> SiteVector | None:
    if not entries:
        return None
    return SiteVector.from_map({e.prime: complex(e.re, e.im) for e in entries})


def handle_verify(req: sc.VerifyRequest) -> sc.VerifyResponse:
    if req.suite not in SUITE_NAMES:
        raise ValueError(f"unknown suite {req.suite!r}; choose from {SUITE_NAMES}")
    options = SuiteOptions(
        p_max=req.truncation.p_max if req.truncation else None,
        a_max=req.truncation.a_max if req.truncation else None,
        omega_max=req.truncation.omega_max if req.truncation else None,
        k_max=req.truncation.k_max if req.truncation else None,
        guard=req.truncation.guard if req.truncation else None,
        sigma=req.sigma,
        t=req.t,
        z={e.prime: complex(e.re, e.im) for e in req.z} or None,
        tolerance=req.tolerance,
        occupation_cap=req.occupation_cap,
        seed=req.seed,
    )
    reports = run_suite(req.suite, options)
    return sc.VerifyResponse(
        suite=req.suite,
        all_passed=all(r.passed for r in reports),
        reports=[sc.ReportModel(**r.as_dict()) for r in reports],
    )


def handle_amplitudes(req: sc.AmplitudesRequest) -> sc.AmplitudesResponse:
    basis = enumerate_basis(_trunc(req.truncation))
    params = ncs.NcsParams(s=complex(req.sigma, req.t), z=_site_vector(req.z))
    state = ncs.ncs_state(params, basis)
    rows = []
    for k, amp in state.vector.terms():
        rows.append(
            sc.AmplitudeRow(k=int(k), re=amp.real, im=amp.imag, prob=abs(amp) ** 2)
        )
        if req.limit is not None and len(rows) >= req.limit:
            break
    return sc.AmplitudesResponse(
        rows=rows,
        residual_mass=state.residual_mass,
        mass_parameter=state.mass_parameter,
    )


def handle_expect(req: sc.ExpectRequest) -> sc.ExpectResponse:
    s = complex(req.sigma, req.t)
    z = _site_vector(req.z)
    params = ncs.NcsParams(s=s, z=z)
    truncated = None
    if req.observable == "N":
        closed = ncs.ncs_number_expectation(params).total
        bound = 0.0
        basis = enumerate_basis(_trunc(req.truncation))
        state = ncs.ncs_state(params, basis)
        op = fk.total_number_operator(basis)
        truncated = float(np.real(state.vector.inner(op.apply(state.vector))))
        tol = ncs.rm_tolerance(state.residual_mass)
    elif req.observable == "N2":
        closed = ncs.ncs_number_expectation(params).site_second_moment_sum
        bound = 0.0
        basis = enumerate_basis(_trunc(req.truncation))
        state = ncs.ncs_state(params, basis)
        acc = 0.0
        for p in basis.primes:
            np_op = fk.number_operator(basis, p)
            w = np_op.apply(state.vector)
            acc += float(np.real(w.inner(w)))
        truncated = acc
        tol = ncs.rm_tolerance(state.residual_mass)
    elif req.observable == "BH":
        vb = sp.bose_hubbard_expectation(
            s, sp.BoseHubbardParams(U=req.U, mu_chem=req.mu_chem, tau=req.tau)
        )
        closed, bound = vb.value.real, vb.tail_bound
        tol = bound + 1e-10
    else:  # tower
        vb = sp.pn_tower_expectation(s, req.order)
        closed, bound = vb.value.real, vb.tail_bound
        tol = bound + 1e-10
    return sc.ExpectResponse(
        observable=req.observable,
        closed_form=closed,
        truncated=truncated,
        tolerance=tol,
        tail_bound=bound,
    )


def handle_pmf(req: sc.PmfRequest) -> sc.PmfResponse:
    s = complex(req.sigma, req.t)
    rows = [
        sc.PmfRow(n=n, probability=ncs.particle_number_pmf(s, n))
        for n in range(req.n_max + 1)
    ]
    return sc.PmfResponse(rows=rows, total=float(sum(r.probability for r in rows)))


def _sweep_params(req: sc.SpectrumRequest) -> tuple[sp.FiniteArrayParams, list[float], int]:
    params = sp.FiniteArrayParams(
        N=req.sites,
        n=req.particles,
        gamma=req.gamma,
        tau=req.tau if req.tau is not None else 1.0,
        delta=req.delta,
        s=complex(req.sigma, req.t),
    )
    if req.tau is not None:
        grid = [float(req.tau)]
    else:
        grid = sp.default_tau_grid(req.tau_min, req.tau_max, req.tau_step)
    m = req.m_lowest if req.m_lowest is not None else min(15, params.dimension)
    return params, grid, m


def handle_spectrum(req: sc.SpectrumRequest) -> sc.SpectrumResponse:
    params, grid, m = _sweep_params(req)
    table = sp.spectrum_sweep(params, grid, m)
    return sc.SpectrumResponse(
        metadata=table.metadata,
        rows=[
            sc.SpectrumRowModel(
                tau=r.tau,
                mode_rank=r.mode_rank,
                eigenvalue=r.eigenvalue,
                alpha=list(r.alpha),
            )
            for r in table.rows
        ],
    )


def handle_transitions(req: sc.SpectrumRequest) -> sc.TransitionsResponse:
    params, grid, _ = _sweep_params(req)
    if len(grid) == 1:
        grid = sp.default_tau_grid(req.tau_min, req.tau_max, req.tau_step)
    found = sp.ground_state_transition(params, grid)
    return sc.TransitionsResponse(
        metadata={
            "N": params.N,
            "n": params.n,
            "gamma": params.gamma,
            "delta": params.delta,
            "grid_points": len(grid),
        },
        transitions=[
            sc.TransitionModel(
                tau_low=t.tau_low,
                tau_high=t.tau_high,
                old_alpha=list(t.old_alpha),
                new_alpha=list(t.new_alpha),
            )
            for t in found
        ],
    )


def handle_health() -> sc.HealthResponse:
    return sc.HealthResponse(status="ok", version=__version__)
