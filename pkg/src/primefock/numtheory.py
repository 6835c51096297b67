"""Exact integer infrastructure: primes, factorization, occupation weights,
Dirichlet convolution, and enumeration of the truncated Fock basis.

States of the boson array are labeled by positive integers; the prime
factorization of a label is its site-occupation record, so everything here
is exact integer arithmetic.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterator

import numpy as np

from .errors import ResourceCapExceeded

#: Hard cap on materialized basis sizes; enumeration beyond this is refused.
DEFAULT_BASIS_CAP = 2_000_000


def sieve_primes(limit: int) -> list[int]:
    """All primes <= limit, increasing. Raises ValueError for limit < 2."""
    if limit < 2:
        raise ValueError(f"empty prime range: limit={limit} < 2")
    flags = np.ones(limit + 1, dtype=bool)
    flags[:2] = False
    for i in range(2, math.isqrt(limit) + 1):
        if flags[i]:
            flags[i * i :: i] = False
    return [int(p) for p in np.nonzero(flags)[0]]


@lru_cache(maxsize=8)
def _cached_primes(limit: int) -> tuple[int, ...]:
    return tuple(sieve_primes(limit))


@dataclass(frozen=True)
class FactoredInt:
    """A positive integer together with its exact multiplicative data.

    ``exponents`` maps each prime divisor to its multiplicity (no zeros
    stored), ``big_omega`` counts prime factors with multiplicity, and
    ``x_squared`` is the exact integer product of exponent factorials --
    the squared combinatorial weight relating |k> to repeated creations.
    """

    value: int
    exponents: tuple[tuple[int, int], ...]
    big_omega: int
    x_squared: int

    def exponent_of(self, p: int) -> int:
        for q, a in self.exponents:
            if q == p:
                return a
        return 0

    @property
    def exponent_map(self) -> dict[int, int]:
        return dict(self.exponents)


def factorize(k: int, primes: tuple[int, ...] | None = None) -> FactoredInt:
    """Trial-division factorization of k >= 1.

    ``primes`` may supply a precomputed sieve; otherwise divisors are found
    by direct trial division (basis values are smooth, so this is cheap).
    """
    if k < 1:
        raise ValueError(f"factorize requires k >= 1, got {k}")
    n = k
    exps: list[tuple[int, int]] = []
    omega = 0
    xsq = 1
    if primes is None:
        d = 2
        while d * d <= n:
            if n % d == 0:
                a = 0
                while n % d == 0:
                    n //= d
                    a += 1
                exps.append((d, a))
                omega += a
                xsq *= math.factorial(a)
            d += 1 if d == 2 else 2
    else:
        for d in primes:
            if d * d > n:
                break
            if n % d == 0:
                a = 0
                while n % d == 0:
                    n //= d
                    a += 1
                exps.append((d, a))
                omega += a
                xsq *= math.factorial(a)
    if n > 1:
        exps.append((n, 1))
        omega += 1
    exps.sort()
    return FactoredInt(value=k, exponents=tuple(exps), big_omega=omega, x_squared=xsq)


@dataclass(frozen=True)
class DirichletCoefficients:
    """Finitely supported arithmetic function n -> f(n); zeros are not stored."""

    entries: tuple[tuple[int, complex], ...]

    @classmethod
    def from_map(cls, mapping: dict[int, complex]) -> "DirichletCoefficients":
        items = []
        for n, v in mapping.items():
            if n < 1:
                raise ValueError(f"Dirichlet coefficient index must be >= 1, got {n}")
            v = complex(v)
            if v != 0:
                items.append((int(n), v))
        items.sort()
        return cls(entries=tuple(items))

    @classmethod
    def delta(cls, n: int = 1) -> "DirichletCoefficients":
        return cls.from_map({n: 1.0})

    @property
    def support(self) -> tuple[int, ...]:
        return tuple(n for n, _ in self.entries)

    def as_map(self) -> dict[int, complex]:
        return dict(self.entries)

    def __call__(self, n: int) -> complex:
        for m, v in self.entries:
            if m == n:
                return v
        return 0j


def dirichlet_convolve(
    f: DirichletCoefficients, g: DirichletCoefficients
) -> DirichletCoefficients:
    """Dirichlet convolution h(k) = sum over divisors d|k of f(d) g(k/d)."""
    out: dict[int, complex] = {}
    for n, fv in f.entries:
        for m, gv in g.entries:
            k = n * m
            out[k] = out.get(k, 0j) + fv * gv
    return DirichletCoefficients.from_map(out)


@dataclass(frozen=True)
class TruncationSpec:
    """Finite truncation of the Fock space.

    Keeps labels k whose prime factors are <= p_max, with per-site occupation
    at most a_max, total occupation at most omega_max, and (optionally)
    k <= k_max.  ``guard`` is the width of the interior band on which
    operator identities are asserted with zero truncation error.
    """

    p_max: int
    a_max: int
    omega_max: int
    k_max: int | None = None
    guard: int = 1

    def __post_init__(self):
        if self.p_max < 2:
            raise ValueError("p_max must be >= 2")
        if self.a_max < 1 or self.omega_max < 1:
            raise ValueError("a_max and omega_max must be >= 1")
        if self.guard < 0 or self.guard >= min(self.a_max, self.omega_max):
            raise ValueError("guard must satisfy 0 <= guard < min(a_max, omega_max)")

    def admits(self, fact: FactoredInt) -> bool:
        if fact.big_omega > self.omega_max:
            return False
        if self.k_max is not None and fact.value > self.k_max:
            return False
        for p, a in fact.exponents:
            if p > self.p_max or a > self.a_max:
                return False
        return True


class FockBasis:
    """The materialized, divisor-closed slice of the Fock space.

    Holds the ascending list of admitted labels with their factorizations,
    plus vectorized arrays used throughout the operator and state modules.
    """

    def __init__(self, trunc: TruncationSpec, facts: list[FactoredInt]):
        self.trunc = trunc
        self.facts = facts
        self.values = [f.value for f in facts]
        self.index = {f.value: i for i, f in enumerate(facts)}
        self.primes = [p for p in _cached_primes(trunc.p_max)]
        self.size = len(facts)
        self.omega = np.array([f.big_omega for f in facts], dtype=np.int64)
        self.x_squared = [f.x_squared for f in facts]
        self.log_values = np.array([math.log(v) for v in self.values], dtype=np.float64)
        self.x = np.sqrt(np.array([float(x) for x in self.x_squared]))

    def __len__(self) -> int:
        return self.size

    def __contains__(self, k: int) -> bool:
        return k in self.index

    def position(self, k: int) -> int:
        return self.index[k]

    def exponent_array(self, p: int) -> np.ndarray:
        return np.array([f.exponent_of(p) for f in self.facts], dtype=np.int64)

    def interior_mask(self, depth: int | None = None) -> np.ndarray:
        """Labels at distance >= depth from every truncation boundary.

        A product of up to ``depth`` creation operators applied to an
        interior label stays inside the basis, so identities restricted to
        these columns carry no truncation error.  Defaults to the guard width.
        """
        d = self.trunc.guard if depth is None else depth
        mask = self.omega <= self.trunc.omega_max - d
        a_ok = np.array(
            [all(a <= self.trunc.a_max - d for _, a in f.exponents) for f in self.facts],
            dtype=bool,
        )
        mask &= a_ok
        if self.trunc.k_max is not None:
            cap = np.array(
                [v * self.trunc.p_max**d <= self.trunc.k_max for v in self.values],
                dtype=bool,
            )
            mask &= cap
        return mask

    def block_positions(self, n: int) -> np.ndarray:
        """Positions of the labels with exactly n particles."""
        return np.nonzero(self.omega == n)[0]


def enumerate_basis(trunc: TruncationSpec, cap: int = DEFAULT_BASIS_CAP) -> FockBasis:
    """Materialize the basis admitted by ``trunc``, ascending by label.

    The result is divisor-closed by construction: dropping any exponent of
    an admitted label only loosens every constraint.
    """
    primes = _cached_primes(trunc.p_max)
    out: list[FactoredInt] = []

    def rec(idx: int, value: int, omega: int, xsq: int, exps: list[tuple[int, int]]):
        if len(out) > cap:
            raise ResourceCapExceeded(
                f"basis size exceeds cap {cap} for {trunc}"
            )
        out.append(
            FactoredInt(value=value, exponents=tuple(exps), big_omega=omega, x_squared=xsq)
        )
        for j in range(idx, len(primes)):
            p = primes[j]
            v = value
            for a in range(1, trunc.a_max + 1):
                if omega + a > trunc.omega_max:
                    break
                v = v * p
                if trunc.k_max is not None and v > trunc.k_max:
                    break
                exps.append((p, a))
                rec(j + 1, v, omega + a, xsq * math.factorial(a), exps)
                exps.pop()

    rec(0, 1, 0, 1, [])
    out.sort(key=lambda f: f.value)
    return FockBasis(trunc, out)


@dataclass(frozen=True)
class MultiIndex:
    """Occupation vector over the one-particle modes of a finite array."""

    alpha: tuple[int, ...]

    def __post_init__(self):
        if any(a < 0 for a in self.alpha):
            raise ValueError("multi-index entries must be nonnegative")

    @property
    def total(self) -> int:
        return sum(self.alpha)

    def __len__(self) -> int:
        return len(self.alpha)


def enumerate_multi_indices(N: int, n: int) -> list[MultiIndex]:
    """All length-N nonnegative tuples summing to n, in ascending lex order."""
    if N < 1:
        raise ValueError("array size N must be >= 1")
    if n < 0:
        raise ValueError("particle count n must be >= 0")
    out: list[MultiIndex] = []

    def rec(prefix: list[int], remaining: int, slots: int):
        if slots == 1:
            out.append(MultiIndex(alpha=tuple(prefix + [remaining])))
            return
        for a in range(remaining + 1):
            rec(prefix + [a], remaining - a, slots - 1)

    rec([], n, N)
    return out


def divisors(k: int) -> Iterator[int]:
    """All positive divisors of k (unordered)."""
    f = factorize(k)
    divs = [1]
    for p, a in f.exponents:
        divs = [d * p**e for d in divs for e in range(a + 1)]
    return iter(divs)
