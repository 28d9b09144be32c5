"""Prime-field helpers and exact arithmetic in Z[zeta], zeta a primitive ell^2-th root of unity.

Cyclotomic integers are stored as length-``ell**2`` integer coefficient
vectors over the powers ``zeta**k``.  The representation is redundant (any
``k < ell**2`` is allowed) so that character sums can be accumulated with one
array increment per field element; :func:`cyclo_reduce` gives the canonical
form used for comparisons.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .exceptions import ResourceGuardError

DEFAULT_MEMORY_GUARD = 2**26


# ---------------------------------------------------------------------------
# primes

def is_prime(n: int) -> bool:
    n = int(n)
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    if n % 3 == 0:
        return n == 3
    i = 5
    while i * i <= n:
        if n % i == 0 or n % (i + 2) == 0:
            return False
        i += 6
    return True


def prime_sieve(bound: int) -> np.ndarray:
    """All primes ``p <= bound`` as an ascending int64 array."""
    if bound < 2:
        return np.zeros(0, dtype=np.int64)
    flags = np.ones(bound + 1, dtype=bool)
    flags[:2] = False
    for p in range(2, math.isqrt(bound) + 1):
        if flags[p]:
            flags[p * p :: p] = False
    return np.flatnonzero(flags).astype(np.int64)


def prime_factors(n: int) -> list[int]:
    """Distinct prime divisors of ``n`` by trial division."""
    out = []
    d = 2
    while d * d <= n:
        if n % d == 0:
            out.append(d)
            while n % d == 0:
                n //= d
        d += 1 if d == 2 else 2
    if n > 1:
        out.append(n)
    return out


def check_odd_prime(ell: int) -> int:
    ell = int(ell)
    if ell < 3 or not is_prime(ell):
        raise ValueError(f"ell must be an odd prime >= 3, got {ell}")
    return ell


def multiplicative_order(x: int, m: int) -> int:
    """Order of ``x`` in (Z/mZ)*; ``x`` must be a unit."""
    if math.gcd(x, m) != 1:
        raise ValueError(f"{x} is not a unit modulo {m}")
    phi = euler_phi(m)
    order = phi
    for r in prime_factors(phi):
        while order % r == 0 and pow(x, order // r, m) == 1:
            order //= r
    return order


def euler_phi(m: int) -> int:
    result = m
    for r in prime_factors(m):
        result -= result // r
    return result


def primitive_root(q: int) -> int:
    """Smallest generator of F_q^*."""
    q = int(q)
    if not is_prime(q):
        raise ValueError(f"q={q} is not prime")
    if q == 2:
        return 1
    factors = prime_factors(q - 1)
    for g in range(2, q):
        if all(pow(g, (q - 1) // r, q) != 1 for r in factors):
            return g
    raise AssertionError("unreachable: F_q^* is cyclic")


def unit_group_generator(m: int) -> int:
    """Smallest generator of (Z/mZ)^* (m must admit one, e.g. an odd prime power)."""
    phi = euler_phi(m)
    for n in range(1, m):
        if math.gcd(n, m) == 1 and multiplicative_order(n, m) == phi:
            return n
    raise ValueError(f"(Z/{m}Z)^* is not cyclic")


@dataclass(frozen=True)
class DlogTable:
    """Discrete logarithms in F_q^* to base ``root``; ``index[0]`` is -1."""

    q: int
    root: int
    index: np.ndarray

    def __getitem__(self, x):
        return self.index[x]


def _powers(g: int, q: int) -> np.ndarray:
    # baby-step/giant-step layout keeps the Python loop at O(sqrt q)
    n = q - 1
    step = math.isqrt(n) + 1
    small = np.empty(step, dtype=np.int64)
    acc = 1
    for j in range(step):
        small[j] = acc
        acc = acc * g % q
    rows = -(-n // step)
    giant = pow(g, step, q)
    big = np.empty(rows, dtype=np.int64)
    acc = 1
    for i in range(rows):
        big[i] = acc
        acc = acc * giant % q
    return ((big[:, None] * small[None, :]) % q).ravel()[:n]


def dlog_table(q: int, root: int | None = None, guard: int = DEFAULT_MEMORY_GUARD) -> DlogTable:
    q = int(q)
    if not is_prime(q):
        raise ValueError(f"q={q} is not prime")
    if q > guard:
        raise ResourceGuardError("q", q, guard)
    if root is None:
        root = primitive_root(q)
    elif q > 2 and multiplicative_order(root % q, q) != q - 1:
        raise ValueError(f"{root} is not a primitive root modulo {q}")
    index = np.full(q, -1, dtype=np.int64)
    index[_powers(root % q, q)] = np.arange(q - 1, dtype=np.int64)
    return DlogTable(q=q, root=root % q, index=index)


# ---------------------------------------------------------------------------
# cyclotomic integers

def trace_of_zeta_power(k: int, ell: int) -> int:
    """Tr_{Q(zeta)/Q}(zeta**k) for zeta of order ell**2."""
    m = ell * ell
    if not 0 <= k < m:
        raise ValueError(f"exponent {k} outside [0, {m})")
    if k == 0:
        return ell * (ell - 1)
    if k % ell == 0:
        return -ell
    return 0


@dataclass(frozen=True, eq=False)
class CyclotomicInteger:
    level: int
    coeffs: tuple[int, ...]

    def __post_init__(self):
        if len(self.coeffs) != self.level:
            raise ValueError(f"expected {self.level} coefficients, got {len(self.coeffs)}")

    @property
    def ell(self) -> int:
        return math.isqrt(self.level)

    @classmethod
    def zero(cls, ell: int) -> "CyclotomicInteger":
        return cls(ell * ell, (0,) * (ell * ell))

    @classmethod
    def constant(cls, c: int, ell: int) -> "CyclotomicInteger":
        coeffs = [0] * (ell * ell)
        coeffs[0] = int(c)
        return cls(ell * ell, tuple(coeffs))

    @classmethod
    def zeta_power(cls, k: int, ell: int, coeff: int = 1) -> "CyclotomicInteger":
        m = ell * ell
        coeffs = [0] * m
        coeffs[k % m] = int(coeff)
        return cls(m, tuple(coeffs))

    @classmethod
    def from_coeffs(cls, coeffs: Sequence[int], ell: int) -> "CyclotomicInteger":
        m = ell * ell
        out = [0] * m
        for k, c in enumerate(coeffs):
            out[k % m] += int(c)
        return cls(m, tuple(out))

    def _check(self, other: "CyclotomicInteger"):
        if self.level != other.level:
            raise ValueError(f"level mismatch: {self.level} vs {other.level}")

    def __add__(self, other):
        if isinstance(other, int):
            other = CyclotomicInteger.constant(other, self.ell)
        self._check(other)
        return CyclotomicInteger(self.level, tuple(a + b for a, b in zip(self.coeffs, other.coeffs)))

    __radd__ = __add__

    def __neg__(self):
        return CyclotomicInteger(self.level, tuple(-a for a in self.coeffs))

    def __sub__(self, other):
        if isinstance(other, int):
            other = CyclotomicInteger.constant(other, self.ell)
        return self + (-other)

    def __mul__(self, other):
        if isinstance(other, int):
            return CyclotomicInteger(self.level, tuple(other * a for a in self.coeffs))
        return cyclo_mul(self, other)

    __rmul__ = __mul__

    def __eq__(self, other):
        if isinstance(other, int):
            other = CyclotomicInteger.constant(other, self.ell)
        if not isinstance(other, CyclotomicInteger) or other.level != self.level:
            return NotImplemented
        return cyclo_reduce(self).coeffs == cyclo_reduce(other).coeffs

    def __hash__(self):
        return hash((self.level, cyclo_reduce(self).coeffs))

    def embed(self, root_index: int = 1) -> complex:
        """Complex value under zeta -> exp(2 pi i root_index / ell^2)."""
        w = cmath.exp(2j * math.pi * root_index / self.level)
        return sum(c * w**k for k, c in enumerate(self.coeffs) if c)

    def trace(self) -> int:
        return cyclo_trace(self)

    def conj(self) -> "CyclotomicInteger":
        return cyclo_conj(self)

    def reduce(self) -> "CyclotomicInteger":
        return cyclo_reduce(self)

    def __repr__(self):
        terms = [f"{c}*z^{k}" for k, c in enumerate(self.coeffs) if c]
        return f"CyclotomicInteger(level={self.level}, {' + '.join(terms) or '0'})"


def cyclo_reduce(x: CyclotomicInteger) -> CyclotomicInteger:
    """Remainder modulo Phi_{ell^2}(z) = sum_{i<ell} z^(i*ell)."""
    ell = x.ell
    deg = ell * (ell - 1)
    c = list(x.coeffs)
    for k in range(x.level - 1, deg - 1, -1):
        top = c[k]
        if top:
            c[k] = 0
            base = k - deg
            for i in range(ell - 1):
                c[base + i * ell] -= top
    return CyclotomicInteger(x.level, tuple(c))


def cyclo_mul(x: CyclotomicInteger, y: CyclotomicInteger) -> CyclotomicInteger:
    x._check(y)
    m = x.level
    out = [0] * m
    ys = [(j, b) for j, b in enumerate(y.coeffs) if b]
    for i, a in enumerate(x.coeffs):
        if a:
            for j, b in ys:
                out[(i + j) % m] += a * b
    return CyclotomicInteger(m, tuple(out))


def cyclo_conj(x: CyclotomicInteger) -> CyclotomicInteger:
    m = x.level
    out = [0] * m
    for k, c in enumerate(x.coeffs):
        out[(m - k) % m] = c
    return CyclotomicInteger(m, tuple(out))


def cyclo_trace(x: CyclotomicInteger) -> int:
    ell = x.ell
    return sum(c * trace_of_zeta_power(k, ell) for k, c in enumerate(x.coeffs) if c)
