"""Point counts of y^ell = x(x^ell - 1) over prime fields.

Two independent routes are provided: a brute-force count through a table of
ell-th power multiplicities, and a dispatch on q mod ell and q mod ell^2
that falls back to the Galois trace of a Jacobi sum of order ell^2.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .arith import (
    DEFAULT_MEMORY_GUARD,
    CyclotomicInteger,
    DlogTable,
    check_odd_prime,
    dlog_table,
    is_prime,
    trace_of_zeta_power,
)
from .exceptions import BadReductionError, ResourceGuardError

METHODS = ("naive", "lemma_congruence", "jacobi_trace")


def genus(ell: int) -> int:
    return ell * (ell - 1) // 2


@dataclass(frozen=True)
class PointCountRecord:
    ell: int
    q: int
    count: int
    method: str

    @property
    def a1(self) -> float:
        return (self.q + 1 - self.count) / math.sqrt(self.q)

    def satisfies_weil_bound(self) -> bool:
        # |N - q - 1| <= 2 g sqrt(q), compared in integers
        dev = abs(self.count - self.q - 1)
        return dev * dev <= 4 * genus(self.ell) ** 2 * self.q


def _check_args(ell, q, guard=DEFAULT_MEMORY_GUARD):
    ell = check_odd_prime(ell)
    q = int(q)
    if not is_prime(q):
        raise ValueError(f"q={q} is not prime")
    if q == ell:
        raise BadReductionError(f"q={q} equals ell: bad reduction")
    if q > guard:
        raise ResourceGuardError("q", q, guard)
    return ell, q


def _powmod_array(x: np.ndarray, e: int, q: int) -> np.ndarray:
    result = np.ones_like(x)
    base = x % q
    while e:
        if e & 1:
            result = result * base % q
        base = base * base % q
        e >>= 1
    return result


def count_points_naive(ell: int, q: int, guard: int = DEFAULT_MEMORY_GUARD) -> PointCountRecord:
    """Projective point count by enumerating x and looking up #{y : y^ell = c}."""
    ell, q = _check_args(ell, q, guard)
    xs = np.arange(q, dtype=np.int64)
    powers = _powmod_array(xs, ell, q)
    multiplicity = np.bincount(powers, minlength=q)
    rhs = xs * ((powers - 1) % q) % q
    affine = int(multiplicity[rhs].sum())
    return PointCountRecord(ell, q, affine + 1, "naive")


def _check_jacobi(q, ell, a, b):
    m = ell * ell
    if (q - 1) % m:
        raise ValueError(f"q={q} is not 1 mod {m}")
    a %= m
    b %= m
    if a == 0 or b == 0:
        raise ValueError("degenerate Jacobi sum: a and b must be nonzero mod ell^2")
    return a, b


def _jacobi_exponent_counts(table: DlogTable, ell: int, a: int, b: int) -> np.ndarray:
    q = table.q
    m = ell * ell
    ind = table.index % m
    x = np.arange(2, q, dtype=np.int64)
    exps = (a * ind[x] + b * ind[(1 - x) % q]) % m
    return np.bincount(exps, minlength=m)


def jacobi_sum(q: int, ell: int, a: int, b: int, table: DlogTable | None = None) -> CyclotomicInteger:
    """J_q(a, b) = sum_x chi^a(x) chi^b(1 - x) with chi(root^t) = zeta^t."""
    ell = check_odd_prime(ell)
    a, b = _check_jacobi(q, ell, a, b)
    if table is None:
        table = dlog_table(q)
    counts = _jacobi_exponent_counts(table, ell, a, b)
    return CyclotomicInteger(ell * ell, tuple(int(c) for c in counts))


_TRACE_WEIGHTS: dict[int, np.ndarray] = {}


def _trace_weights(ell):
    w = _TRACE_WEIGHTS.get(ell)
    if w is None:
        w = np.array([trace_of_zeta_power(k, ell) for k in range(ell * ell)], dtype=np.int64)
        _TRACE_WEIGHTS[ell] = w
    return w


def jacobi_trace(q: int, ell: int, a: int, b: int, table: DlogTable | None = None) -> int:
    ell = check_odd_prime(ell)
    a, b = _check_jacobi(q, ell, a, b)
    if table is None:
        table = dlog_table(q)
    counts = _jacobi_exponent_counts(table, ell, a, b)
    # counts sum to q - 2 and weights are bounded by ell^2, so int64 is exact
    return int(counts @ _trace_weights(ell))


def count_points(ell: int, q: int, guard: int = DEFAULT_MEMORY_GUARD) -> PointCountRecord:
    ell, q = _check_args(ell, q, guard)
    if (q - 1) % (ell * ell):
        return PointCountRecord(ell, q, q + 1, "lemma_congruence")
    t = jacobi_trace(q, ell, ell * (ell - 1), 1)
    return PointCountRecord(ell, q, q + 1 + t, "jacobi_trace")


def normalized_a1(ell: int, q: int) -> float:
    return count_points(ell, q).a1
