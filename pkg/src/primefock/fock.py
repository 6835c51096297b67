"""Operators on the truncated prime-labeled Fock space.

Every operator is materialized as a sparse complex matrix over a fixed
basis.  Annihilation-type operators never leave a divisor-closed basis;
creation-type entries that would land outside it are tallied into a
boundary-loss scalar rather than silently dropped, and identities are
asserted only on guard-band-interior columns where no loss occurs.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from .dirichlet import SiteVector
from .errors import DivergenceError, NumericalFailure, TruncationViolation
from .numtheory import FactoredInt, FockBasis, DirichletCoefficients, factorize
from .reports import VerificationReport


class FockVector:
    """Complex vector over a FockBasis, stored dense over basis positions."""

    def __init__(self, basis: FockBasis, amplitudes: np.ndarray):
        if amplitudes.shape != (len(basis),):
            raise ValueError("amplitude array does not match basis size")
        self.basis = basis
        self.amplitudes = amplitudes.astype(np.complex128)

    @classmethod
    def zeros(cls, basis: FockBasis) -> "FockVector":
        return cls(basis, np.zeros(len(basis), dtype=np.complex128))

    @classmethod
    def from_terms(cls, basis: FockBasis, terms: dict[int, complex]) -> "FockVector":
        v = np.zeros(len(basis), dtype=np.complex128)
        for k, a in terms.items():
            v[basis.position(k)] = a
        return cls(basis, v)

    @classmethod
    def basis_state(cls, basis: FockBasis, k: int) -> "FockVector":
        return cls.from_terms(basis, {k: 1.0})

    def terms(self):
        for i in np.nonzero(self.amplitudes)[0]:
            yield self.basis.values[i], complex(self.amplitudes[i])

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def inner(self, other: "FockVector") -> complex:
        return complex(np.vdot(self.amplitudes, other.amplitudes))

    def copy(self) -> "FockVector":
        return FockVector(self.basis, self.amplitudes.copy())

    def __add__(self, other: "FockVector") -> "FockVector":
        return FockVector(self.basis, self.amplitudes + other.amplitudes)

    def __sub__(self, other: "FockVector") -> "FockVector":
        return FockVector(self.basis, self.amplitudes - other.amplitudes)

    def scaled(self, c: complex) -> "FockVector":
        return FockVector(self.basis, self.amplitudes * c)


@dataclass
class SparseOperator:
    """Sparse matrix over a basis, with the boundary mass it had to drop."""

    basis: FockBasis
    matrix: sp.csr_matrix
    name: str
    boundary_loss: float = 0.0
    boundary_count: int = 0

    def apply(self, v: FockVector) -> FockVector:
        return FockVector(self.basis, self.matrix @ v.amplitudes)

    def dagger(self) -> "SparseOperator":
        return SparseOperator(
            basis=self.basis,
            matrix=self.matrix.conjugate().transpose().tocsr(),
            name=f"({self.name})^+",
            boundary_loss=self.boundary_loss,
            boundary_count=self.boundary_count,
        )


@dataclass(frozen=True)
class OperatorSpec:
    """Declarative description of one operator kind plus its parameters."""

    kind: str
    n: int | None = None
    p: int | None = None
    s: complex | None = None
    z: SiteVector | None = None
    coeffs: DirichletCoefficients | None = None
    mu: dict[int, float] | None = None


def _ratio_coeff(num_xsq: int, den_xsq: int) -> float:
    # x_{kn}/x_k as sqrt of an exact integer ratio (always an integer here)
    return math.sqrt(num_xsq // den_xsq)


def _shifted_xsq(fact: FactoredInt, nfact: FactoredInt) -> int:
    """x^2 of fact.value * nfact.value from the two exponent records."""
    xsq = fact.x_squared
    nmap = dict(nfact.exponents)
    fmap = dict(fact.exponents)
    for p, b in nmap.items():
        a = fmap.get(p, 0)
        xsq = xsq * math.factorial(a + b) // math.factorial(a)
    return xsq


def annihilation_operator(basis: FockBasis, n: int) -> SparseOperator:
    """Matrix of the lowering map |k> -> (x_k / x_{k/n}) |k/n>.

    Columns at labels not divisible by n are empty.  A divisor-closed basis
    is never escaped, so there is no boundary loss.
    """
    if n < 1:
        raise ValueError("operator index must be >= 1")
    rows, cols, data = [], [], []
    for i, f in enumerate(basis.facts):
        if f.value % n:
            continue
        j = basis.position(f.value // n)
        rows.append(j)
        cols.append(i)
        data.append(_ratio_coeff(f.x_squared, basis.facts[j].x_squared))
    m = sp.csr_matrix(
        (np.array(data, dtype=np.complex128), (rows, cols)),
        shape=(len(basis), len(basis)),
    )
    return SparseOperator(basis=basis, matrix=m, name=f"a[{n}]")


def creation_operator(basis: FockBasis, n: int) -> SparseOperator:
    """Matrix of the raising map |k> -> (x_{kn} / x_k) |kn>.

    Entries whose target lies outside the basis are tallied into
    ``boundary_loss`` (sum of squared coefficients) instead of erroring;
    callers assert identities on interior columns only.
    """
    if n < 1:
        raise ValueError("operator index must be >= 1")
    nfact = factorize(n)
    rows, cols, data = [], [], []
    loss = 0.0
    lost = 0
    for i, f in enumerate(basis.facts):
        target = f.value * n
        coeff = _ratio_coeff(_shifted_xsq(f, nfact), f.x_squared)
        if target in basis:
            rows.append(basis.position(target))
            cols.append(i)
            data.append(coeff)
        else:
            loss += coeff * coeff
            lost += 1
    m = sp.csr_matrix(
        (np.array(data, dtype=np.complex128), (rows, cols)),
        shape=(len(basis), len(basis)),
    )
    return SparseOperator(
        basis=basis, matrix=m, name=f"a_dag[{n}]", boundary_loss=loss, boundary_count=lost
    )


def apply_annihilate(n: int, v: FockVector) -> FockVector:
    """Lowering map applied directly to a vector (no matrix assembly)."""
    basis = v.basis
    out = np.zeros(len(basis), dtype=np.complex128)
    amps = v.amplitudes
    for i in np.nonzero(amps)[0]:
        f = basis.facts[i]
        if f.value % n:
            continue
        j = basis.position(f.value // n)
        out[j] += amps[i] * _ratio_coeff(f.x_squared, basis.facts[j].x_squared)
    return FockVector(basis, out)


def apply_create(n: int, v: FockVector, strict: bool = True) -> FockVector:
    """Raising map applied to a vector.

    In strict mode any support escaping the basis raises, listing the
    offending labels; otherwise escaped terms are dropped.
    """
    basis = v.basis
    nfact = factorize(n)
    out = np.zeros(len(basis), dtype=np.complex128)
    amps = v.amplitudes
    offending = []
    for i in np.nonzero(amps)[0]:
        f = basis.facts[i]
        target = f.value * n
        if target in basis:
            j = basis.position(target)
            out[j] += amps[i] * _ratio_coeff(_shifted_xsq(f, nfact), f.x_squared)
        else:
            offending.append(f.value)
    if offending and strict:
        raise TruncationViolation(
            f"raising by {n} leaves the basis from labels {offending[:8]}"
            + ("..." if len(offending) > 8 else ""),
            offending=offending,
        )
    return FockVector(basis, out)


def number_operator(basis: FockBasis, p: int) -> SparseOperator:
    diag = basis.exponent_array(p).astype(np.complex128)
    return SparseOperator(basis=basis, matrix=sp.diags(diag).tocsr(), name=f"N[{p}]")


def total_number_operator(basis: FockBasis) -> SparseOperator:
    diag = basis.omega.astype(np.complex128)
    return SparseOperator(basis=basis, matrix=sp.diags(diag).tocsr(), name="N")


def projector(basis: FockBasis, n: int) -> SparseOperator:
    diag = (basis.omega == n).astype(np.complex128)
    return SparseOperator(basis=basis, matrix=sp.diags(diag).tocsr(), name=f"Pi[{n}]")


def quadrature_x(basis: FockBasis, p: int) -> SparseOperator:
    a = annihilation_operator(basis, p)
    adag = creation_operator(basis, p)
    m = (a.matrix + adag.matrix) / math.sqrt(2.0)
    return SparseOperator(
        basis=basis, matrix=m.tocsr(), name=f"X[{p}]", boundary_loss=adag.boundary_loss / 2.0
    )


def quadrature_p(basis: FockBasis, p: int) -> SparseOperator:
    a = annihilation_operator(basis, p)
    adag = creation_operator(basis, p)
    m = (a.matrix - adag.matrix) / (math.sqrt(2.0) * 1j)
    return SparseOperator(
        basis=basis, matrix=m.tocsr(), name=f"P[{p}]", boundary_loss=adag.boundary_loss / 2.0
    )


def _site_weights(basis: FockBasis, s: complex, z: SiteVector | None) -> list[tuple[int, complex]]:
    s = complex(s)
    if z is None:
        return [(p, np.exp(-s * math.log(p))) for p in basis.primes]
    return [
        (p, np.exp(-s * math.log(p)) * zp)
        for p, zp in z.entries
        if p <= basis.trunc.p_max
    ]


def c_lowering(basis: FockBasis, s: complex, z: SiteVector | None = None) -> SparseOperator:
    """Weighted sum over sites of p^(-s) z_p times the lowering map at p."""
    m = sp.csr_matrix((len(basis), len(basis)), dtype=np.complex128)
    for p, w in _site_weights(basis, s, z):
        m = m + w * annihilation_operator(basis, p).matrix
    return SparseOperator(basis=basis, matrix=m.tocsr(), name="C")


def c_raising(basis: FockBasis, s: complex, z: SiteVector | None = None) -> SparseOperator:
    """Adjoint-weighted sum of raising maps; coefficients are exact conjugates
    of the lowering weights so finite-block adjointness holds to rounding."""
    m = sp.csr_matrix((len(basis), len(basis)), dtype=np.complex128)
    loss = 0.0
    count = 0
    for p, w in _site_weights(basis, s, z):
        op = creation_operator(basis, p)
        m = m + np.conj(w) * op.matrix
        loss += abs(w) ** 2 * op.boundary_loss
        count += op.boundary_count
    return SparseOperator(
        basis=basis, matrix=m.tocsr(), name="C^+", boundary_loss=loss, boundary_count=count
    )


def dirichlet_operator(
    basis: FockBasis, s: complex, coeffs: DirichletCoefficients
) -> SparseOperator:
    """Operator f(1) + sum over n >= 2 of f(n) n^(-s) times the lowering map."""
    s = complex(s)
    m = sp.csr_matrix((len(basis), len(basis)), dtype=np.complex128)
    for n, fv in coeffs.entries:
        if n == 1:
            m = m + fv * sp.identity(len(basis), dtype=np.complex128, format="csr")
        else:
            m = m + fv * np.exp(-s * math.log(n)) * annihilation_operator(basis, n).matrix
    return SparseOperator(basis=basis, matrix=m.tocsr(), name="F")


def u_mu(basis: FockBasis, mu: dict[int, float]) -> SparseOperator:
    """Diagonal unitary with phases exp(2 pi i sum_p a_p(k) mu_p)."""
    phase = np.zeros(len(basis), dtype=np.float64)
    for p, m in mu.items():
        phase += float(m) * basis.exponent_array(p)
    diag = np.exp(2j * np.pi * phase)
    return SparseOperator(basis=basis, matrix=sp.diags(diag).tocsr(), name="U_mu")


def shift_operator(basis: FockBasis, p: int) -> SparseOperator:
    """Unit-coefficient raising shift |k> -> |kp| (boundary entries tallied)."""
    rows, cols, data = [], [], []
    loss = 0.0
    count = 0
    for i, f in enumerate(basis.facts):
        target = f.value * p
        if target in basis:
            rows.append(basis.position(target))
            cols.append(i)
            data.append(1.0)
        else:
            loss += 1.0
            count += 1
    m = sp.csr_matrix(
        (np.array(data, dtype=np.complex128), (rows, cols)),
        shape=(len(basis), len(basis)),
    )
    return SparseOperator(
        basis=basis, matrix=m, name=f"S[{p}]", boundary_loss=loss, boundary_count=count
    )


def shift_dagger_operator(basis: FockBasis, p: int) -> SparseOperator:
    """Unit-coefficient lowering shift |k> -> |k/p> (zero when p does not divide k)."""
    rows, cols, data = [], [], []
    for i, f in enumerate(basis.facts):
        if f.value % p:
            continue
        rows.append(basis.position(f.value // p))
        cols.append(i)
        data.append(1.0)
    m = sp.csr_matrix(
        (np.array(data, dtype=np.complex128), (rows, cols)),
        shape=(len(basis), len(basis)),
    )
    return SparseOperator(basis=basis, matrix=m, name=f"S_dag[{p}]")


def assemble_operator(spec: OperatorSpec, basis: FockBasis) -> SparseOperator:
    """Dispatch an OperatorSpec to the matching builder."""
    kind = spec.kind
    if kind == "annihilate":
        return annihilation_operator(basis, spec.n)
    if kind == "create":
        return creation_operator(basis, spec.n)
    if kind == "number":
        return number_operator(basis, spec.p)
    if kind == "total_number":
        return total_number_operator(basis)
    if kind == "project":
        return projector(basis, spec.n)
    if kind == "quad_X":
        return quadrature_x(basis, spec.p)
    if kind == "quad_P":
        return quadrature_p(basis, spec.p)
    if kind == "C":
        return c_lowering(basis, spec.s, spec.z)
    if kind == "C_dagger":
        return c_raising(basis, spec.s, spec.z)
    if kind == "F":
        return dirichlet_operator(basis, spec.s, spec.coeffs)
    if kind == "U_mu":
        return u_mu(basis, spec.mu)
    if kind == "shift":
        return shift_operator(basis, spec.p)
    if kind == "shift_dagger":
        return shift_dagger_operator(basis, spec.p)
    raise ValueError(f"unknown operator kind: {kind!r}")


def interior_max_abs(m: sp.spmatrix, mask: np.ndarray) -> float:
    sub = m.tocsc()[:, np.nonzero(mask)[0]]
    return float(np.max(np.abs(sub.data))) if sub.nnz else 0.0


def verify_ccr(basis: FockBasis, p: int, q: int, tolerance: float = 1e-12) -> VerificationReport:
    """Canonical commutation relations for the site maps at primes p, q,
    asserted on guard-band-interior columns where truncation error is zero."""
    ap = annihilation_operator(basis, p).matrix
    aq = annihilation_operator(basis, q).matrix
    apd = creation_operator(basis, p).matrix
    aqd = creation_operator(basis, q).matrix
    eye = sp.identity(len(basis), dtype=np.complex128, format="csr")
    delta = 1.0 if p == q else 0.0
    mask = basis.interior_mask()
    residual = max(
        interior_max_abs(ap @ aqd - aqd @ ap - delta * eye, mask),
        interior_max_abs(ap @ aq - aq @ ap, mask),
        interior_max_abs(apd @ aqd - aqd @ apd, mask),
    )
    return VerificationReport.from_residual(
        name="ccr",
        residual=residual,
        tolerance=tolerance,
        params={"p": p, "q": q, "p_max": basis.trunc.p_max},
    )


def verify_quadrature_ccr(
    basis: FockBasis, p: int, q: int, tolerance: float = 1e-12
) -> VerificationReport:
    """[X_p, P_q] = i delta_{pq} together with vanishing X-X and P-P commutators."""
    xp = quadrature_x(basis, p).matrix
    xq = quadrature_x(basis, q).matrix
    pp = quadrature_p(basis, p).matrix
    pq = quadrature_p(basis, q).matrix
    eye = sp.identity(len(basis), dtype=np.complex128, format="csr")
    delta = 1.0 if p == q else 0.0
    mask = basis.interior_mask()
    residual = max(
        interior_max_abs(xp @ pq - pq @ xp - 1j * delta * eye, mask),
        interior_max_abs(xp @ xq - xq @ xp, mask),
        interior_max_abs(pp @ pq - pq @ pp, mask),
    )
    return VerificationReport.from_residual(
        name="quadrature_ccr",
        residual=residual,
        tolerance=tolerance,
        params={"p": p, "q": q},
    )


def _block_submatrix(op: SparseOperator, n: int, particle_shift: int) -> sp.csr_matrix:
    basis = op.basis
    cols = basis.block_positions(n)
    rows = basis.block_positions(n + particle_shift)
    if len(cols) == 0 or len(rows) == 0:
        return sp.csr_matrix((len(rows), len(cols)), dtype=np.complex128)
    return op.matrix.tocsc()[:, cols].tocsr()[rows, :]


def block_restrict(op: SparseOperator, n: int, particle_shift: int) -> np.ndarray:
    """Dense matrix of op from the n-particle block to the (n+shift)-block."""
    return _block_submatrix(op, n, particle_shift).toarray()


def block_adjoint_check(
    basis: FockBasis,
    s: complex,
    n: int,
    z: SiteVector | None = None,
    tolerance: float = 1e-13,
) -> VerificationReport:
    """Finite-block adjointness: the lowering block from n+1 to n equals the
    conjugate transpose of the raising block from n to n+1."""
    low = block_restrict(c_lowering(basis, s, z), n + 1, -1)
    high = block_restrict(c_raising(basis, s, z), n, +1)
    mismatch = low - high.conj().T
    residual = float(np.max(np.abs(mismatch))) if mismatch.size else 0.0
    return VerificationReport.from_residual(
        name="block_adjoint",
        residual=residual,
        tolerance=tolerance,
        params={"n": n, "s": str(s)},
        diagnostics={"block_shape": list(high.shape)},
    )


def block_norm(op: SparseOperator, n: int, particle_shift: int = 1) -> float:
    """Largest singular value of the block from n to n + particle_shift."""
    block = _block_submatrix(op, n, particle_shift)
    if block.shape[0] == 0 or block.shape[1] == 0 or block.nnz == 0:
        return 0.0
    if min(block.shape) <= 800:
        return float(np.linalg.svd(block.toarray(), compute_uv=False)[0])
    import scipy.sparse.linalg as spla

    return float(spla.svds(block, k=1, return_singular_vectors=False)[0])


@dataclass
class DisplacementResult:
    vector: FockVector
    series_residual: float
    terms_used: int
    boundary_loss: float


def expm_apply(
    m: sp.spmatrix,
    v: np.ndarray,
    tol: float = 1e-14,
    max_terms: int = 400,
) -> tuple[np.ndarray, float, int]:
    """Adaptive truncated Taylor action of exp(m) on v with norm monitoring."""
    acc = v.astype(np.complex128).copy()
    term = v.astype(np.complex128).copy()
    for j in range(1, max_terms + 1):
        term = m @ term / j
        acc += term
        tn = float(np.linalg.norm(term))
        if tn <= tol * max(1.0, float(np.linalg.norm(acc))):
            return acc, tn, j
    raise NumericalFailure(
        f"matrix exponential action did not converge in {max_terms} terms",
        achieved_residual=float(np.linalg.norm(term)),
    )


def displace_vacuum(
    s: complex,
    z: SiteVector | None,
    basis: FockBasis,
    tol: float = 1e-13,
) -> DisplacementResult:
    """Apply exp(C_raise - C_lower) to the vacuum by Taylor action.

    Valid as a unitary displacement for Re s > 1; boundary entries of the
    raising part are tallied, so the result is the truncated image of the
    coherent state with conjugated parameters.
    """
    if complex(s).real <= 1:
        raise DivergenceError(
            f"displacement requires Re s > 1 (got Re s = {complex(s).real})"
        )
    c = c_lowering(basis, s, z)
    cd = c_raising(basis, s, z)
    gen = cd.matrix - c.matrix
    e0 = np.zeros(len(basis), dtype=np.complex128)
    e0[basis.position(1)] = 1.0
    out, resid, terms = expm_apply(gen, e0, tol=tol)
    return DisplacementResult(
        vector=FockVector(basis, out),
        series_residual=resid,
        terms_used=terms,
        boundary_loss=cd.boundary_loss,
    )


def displace_vacuum_bch(
    s: complex,
    z: SiteVector | None,
    basis: FockBasis,
    tol: float = 1e-13,
) -> DisplacementResult:
    """Factored form: exp(-P/2) exp(C_raise) applied to the vacuum.

    The lowering factor acts as identity on the vacuum, and the scalar is
    half the materialized commutator, the weighted prime sum over the sites
    actually present.
    """
    if complex(s).real <= 1:
        raise DivergenceError(
            f"displacement requires Re s > 1 (got Re s = {complex(s).real})"
        )
    sigma = complex(s).real
    if z is None:
        lam = float(sum(p ** (-2.0 * sigma) for p in basis.primes))
    else:
        lam = z.sigma_norm_sq(sigma)
    cd = c_raising(basis, s, z)
    e0 = np.zeros(len(basis), dtype=np.complex128)
    e0[basis.position(1)] = 1.0
    out, resid, terms = expm_apply(cd.matrix, e0, tol=tol)
    out *= math.exp(-lam / 2.0)
    return DisplacementResult(
        vector=FockVector(basis, out),
        series_residual=resid,
        terms_used=terms,
        boundary_loss=cd.boundary_loss,
    )


def verify_holstein_primakoff(
    p: int, basis: FockBasis, tolerance: float = 1e-12
) -> VerificationReport:
    """Check the shift-based factorizations of the site maps at p.

    Lowering: (N_p + 1)^(-1/2) S_p^+ N_p; raising: N_p S_p (N_p + 1)^(-1/2),
    where S_p is the unit shift |k> -> |kp>.  Compared entrywise on interior
    columns.
    """
    np_diag = basis.exponent_array(p).astype(np.float64)
    inv_sqrt = sp.diags(1.0 / np.sqrt(np_diag + 1.0)).tocsr()
    n_op = sp.diags(np_diag.astype(np.complex128)).tocsr()
    s_op = shift_operator(basis, p).matrix
    sd_op = shift_dagger_operator(basis, p).matrix
    lhs_a = annihilation_operator(basis, p).matrix
    rhs_a = inv_sqrt @ sd_op @ n_op
    lhs_ad = creation_operator(basis, p).matrix
    rhs_ad = n_op @ s_op @ inv_sqrt
    mask = basis.interior_mask()
    residual = max(
        interior_max_abs(lhs_a - rhs_a, mask),
        interior_max_abs(lhs_ad - rhs_ad, mask),
    )
    return VerificationReport.from_residual(
        name="holstein_primakoff",
        residual=residual,
        tolerance=tolerance,
        params={"p": p},
    )


def verify_commutator_number(
    n: int, k: int, h: complex, basis: FockBasis, tolerance: float = 1e-12
) -> VerificationReport:
    """Commutator of a paired hopping term with the total number operator.

    Vanishes when the two indices carry equal particle counts; otherwise it
    must reproduce the weighted difference form with factors
    Omega(k) - Omega(n) on each summand.
    """
    on, ok = factorize(n).big_omega, factorize(k).big_omega
    an_d = creation_operator(basis, n).matrix
    ak = annihilation_operator(basis, k).matrix
    ak_d = creation_operator(basis, k).matrix
    an = annihilation_operator(basis, n).matrix
    h = complex(h)
    hop = h * (an_d @ ak) + np.conj(h) * (ak_d @ an)
    n_hat = total_number_operator(basis).matrix
    comm = hop @ n_hat - n_hat @ hop
    target = (ok - on) * h * (an_d @ ak) + (on - ok) * np.conj(h) * (ak_d @ an)
    mask = basis.interior_mask(depth=max(on, ok))
    residual = interior_max_abs(comm - target, mask)
    return VerificationReport.from_residual(
        name="commutator_number",
        residual=residual,
        tolerance=tolerance,
        params={"n": n, "k": k, "h": str(h), "omega_n": on, "omega_k": ok},
        diagnostics={"commutes": on == ok},
    )


def fourier_sum_via_u(basis: FockBasis, v: FockVector, mu: dict[int, float]) -> complex:
    """Coordinate-sum functional composed with the diagonal phase unitary."""
    w = u_mu(basis, mu).apply(v)
    return complex(np.sum(w.amplitudes))


def fourier_sum_direct(basis: FockBasis, v: FockVector, mu: dict[int, float]) -> complex:
    """The dual-group Fourier sum evaluated term by term with per-site phases."""
    total = 0j
    for k, amp in v.terms():
        fact = basis.facts[basis.position(k)]
        phase = 1.0 + 0j
        for p, a in fact.exponents:
            phase *= np.exp(2j * np.pi * mu.get(p, 0.0) * a)
        total += amp * phase
    return total
