"""Moment statistics of the Sato-Tate group <U(1)^g, gamma>.

Exact a1-moments come from the multinomial expansion over the identity
component (odd U(1) moments vanish, so only even-part partitions of n
contribute).  Other components have traceless elements and add nothing to
a1-moments; the full-group value averages uniformly over the
ell(ell - 1) components.

Monte-Carlo moments of every coefficient a_k use characteristic polynomials
of random elements U * gamma^i.  Because U * gamma^i is a monomial matrix
(one nonzero entry per row and column), its characteristic polynomial
factors over the cycles of the underlying permutation as
prod (T^L - product of the cycle's entries).
"""

from __future__ import annotations

import math
from collections import Counter
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache

import numpy as np

from .arith import check_odd_prime
from .exceptions import ResourceGuardError
from .stgroup import SignedBlockMatrix, block_power, default_generator, gamma_matrix

MAX_GENUS = 55
MAX_SAMPLES = 10**8
CHUNK_SIZE = 2**15


def u1_moment(n: int) -> int:
    """E[(u + conj u)^n] for u Haar-distributed on the unit circle."""
    if n < 0:
        raise ValueError("moment order must be non-negative")
    return 0 if n % 2 else math.comb(n, n // 2)


def _partitions(n: int, max_part: int | None = None):
    if max_part is None:
        max_part = n
    if n == 0:
        yield ()
        return
    for first in range(min(n, max_part), 0, -1):
        for rest in _partitions(n - first, first):
            yield (first,) + rest


@lru_cache(maxsize=None)
def exact_a1_moment_component0(ell: int, n: int) -> int:
    """E[a1^n] over U(1)^g, summed over even-part partitions of n.

    A partition (2c_1, ..., 2c_r) with r <= g contributes
    n! / prod (2c_i)! * prod binom(2c_i, c_i) * (ways to place the parts on g slots).
    """
    ell = check_odd_prime(ell)
    if n < 0:
        raise ValueError("moment order must be non-negative")
    if n % 2:
        return 0
    g = ell * (ell - 1) // 2
    total = 0
    for half in _partitions(n // 2):
        r = len(half)
        if r > g:
            continue
        parts = [2 * c for c in half]
        multinomial = math.factorial(n)
        for p in parts:
            multinomial //= math.factorial(p)
        weight = 1
        for p in parts:
            weight *= u1_moment(p)
        placements = math.perm(g, r)
        for mult in Counter(parts).values():
            placements //= math.factorial(mult)
        total += multinomial * weight * placements
    return total


def exact_a1_moment_component0_direct(ell: int, n: int) -> int:
    """Literal sum over all compositions b_0 + ... + b_{g-1} = n (small cases only)."""
    ell = check_odd_prime(ell)
    g = ell * (ell - 1) // 2

    def compositions(total, slots):
        if slots == 1:
            yield (total,)
            return
        for first in range(total + 1):
            for rest in compositions(total - first, slots - 1):
                yield (first,) + rest

    out = 0
    for b in compositions(n, g):
        term = math.factorial(n)
        for bi in b:
            term //= math.factorial(bi)
        for bi in b:
            term *= u1_moment(bi)
        out += term
    return out


def exact_a1_moment(ell: int, n: int) -> Fraction:
    ell = check_odd_prime(ell)
    if n == 0:
        # a1^0 = 1 on every component, not only the identity one
        return Fraction(1)
    return Fraction(exact_a1_moment_component0(ell, n), ell * (ell - 1))


# ---------------------------------------------------------------------------
# sampling

@dataclass(frozen=True)
class DiagonalUnitary:
    """diag(u_0, conj u_0, ..., u_{g-1}, conj u_{g-1}) with u_j = exp(i angles[j])."""

    angles: tuple[float, ...]

    @property
    def genus(self) -> int:
        return len(self.angles)

    def units(self) -> np.ndarray:
        return np.exp(1j * np.asarray(self.angles))

    def eigenvalues(self) -> np.ndarray:
        u = self.units()
        return np.stack([u, u.conj()], axis=1).ravel()

    def matrix(self) -> np.ndarray:
        return np.diag(self.eigenvalues())

    def alphas(self) -> np.ndarray:
        return 2 * np.cos(np.asarray(self.angles))


def sample_identity_component(ell: int, rng: np.random.Generator) -> DiagonalUnitary:
    g = check_odd_prime(ell) * (ell - 1) // 2
    return DiagonalUnitary(tuple(rng.uniform(0.0, 2 * np.pi, size=g).tolist()))


@dataclass(frozen=True)
class ComponentStructure:
    """Scalar-level monomial pattern of gamma^i: row r maps to column perm[r] with sign signs[r]."""

    index: int
    perm: np.ndarray
    signs: np.ndarray
    cycles: tuple[tuple[int, ...], ...]


def component_structure(gamma_power: SignedBlockMatrix, index: int = 0) -> ComponentStructure:
    dense = gamma_power.to_dense()
    n = dense.shape[0]
    rows, cols = np.nonzero(dense)
    if len(rows) != n or len(set(cols.tolist())) != n:
        raise ValueError("gamma power is not a monomial matrix")
    perm = np.empty(n, dtype=np.int64)
    perm[rows] = cols
    signs = dense[np.arange(n), perm]
    seen = np.zeros(n, dtype=bool)
    cycles = []
    for start in range(n):
        if seen[start]:
            continue
        cyc = []
        r = start
        while not seen[r]:
            seen[r] = True
            cyc.append(r)
            r = int(perm[r])
        cycles.append(tuple(cyc))
    return ComponentStructure(index, perm, signs, tuple(cycles))


@lru_cache(maxsize=32)
def _component_structures(ell: int, n: int) -> tuple[ComponentStructure, ...]:
    gamma = gamma_matrix(ell, n)
    out = []
    power = SignedBlockMatrix.identity(gamma.size)
    for i in range(ell * (ell - 1)):
        out.append(component_structure(power, i))
        power = power @ gamma
    return tuple(out)


def _poly_mul(p: np.ndarray, q: np.ndarray) -> np.ndarray:
    """Batched product of coefficient arrays (descending powers, leading axis = batch)."""
    out = np.zeros((p.shape[0], p.shape[1] + q.shape[1] - 1), dtype=np.result_type(p, q))
    for j in range(q.shape[1]):
        out[:, j : j + p.shape[1]] += p * q[:, j : j + 1]
    return out


def _charpoly_batch(angles: np.ndarray, structure: ComponentStructure) -> np.ndarray:
    """Descending coefficients [1, a_1, ..., a_2g] of det(T - U gamma^i) for each row of angles."""
    batch = angles.shape[0]
    u = np.exp(1j * angles)
    diag = np.stack([u, u.conj()], axis=2).reshape(batch, -1)
    entries = diag * structure.signs[None, :]  # (U P)[r, perm r] = d_r * sign_r
    poly = np.ones((batch, 1), dtype=np.complex128)
    for cyc in structure.cycles:
        factor = np.zeros((batch, len(cyc) + 1), dtype=np.complex128)
        factor[:, 0] = 1.0
        factor[:, -1] = -np.prod(entries[:, list(cyc)], axis=1)
        poly = _poly_mul(poly, factor)
    return poly


def group_element(U: DiagonalUnitary, gamma: SignedBlockMatrix, i: int) -> np.ndarray:
    return U.matrix() @ block_power(gamma, i).to_dense()


def charpoly_coeffs(
    U: DiagonalUnitary, gamma: SignedBlockMatrix, i: int, method: str = "cycles"
) -> np.ndarray:
    """Coefficients a_1..a_2g of det(T - U gamma^i) = T^2g + a_1 T^(2g-1) + ... + a_2g."""
    ell = _ell_from_size(gamma.size)
    if not 0 <= i < ell * (ell - 1):
        raise ValueError(f"component index {i} outside [0, {ell * (ell - 1)})")
    if method == "dense":
        coeffs = np.poly(group_element(U, gamma, i))
    elif method == "cycles":
        structure = component_structure(block_power(gamma, i), i)
        coeffs = _charpoly_batch(np.asarray(U.angles)[None, :], structure)[0]
    else:
        raise ValueError(f"unknown method {method!r}")
    if np.max(np.abs(np.imag(coeffs))) > 1e-9:
        raise ArithmeticError("characteristic polynomial is not real")
    return np.real(coeffs[1:])


def _ell_from_size(g: int) -> int:
    for x in range(3, 2 * g + 3):
        if x * (x - 1) // 2 == g:
            return x
    raise ValueError(f"{g} is not the genus of any C_ell")


# ---------------------------------------------------------------------------
# Monte-Carlo moments

@dataclass
class MomentTable:
    k: int
    values: dict[int, object] = field(default_factory=dict)
    stderr: dict[int, float] = field(default_factory=dict)
    exact: bool = False


@dataclass
class MCResult:
    ell: int
    samples: int
    seed: int
    component: int | None
    tables: dict[int, MomentTable]
    max_imag: float
    max_palindrome_error: float
    max_abs_a1_nontrivial: float


def _mc_chunk(args):
    ell, n, child, size, k_max, n_max, component = args
    g = ell * (ell - 1) // 2
    structures = _component_structures(ell, n)
    rng = np.random.default_rng(child)
    ncomp = ell * (ell - 1)
    comps = np.full(size, component) if component is not None else rng.integers(0, ncomp, size=size)
    angles = rng.uniform(0.0, 2 * np.pi, size=(size, g))
    powers = np.arange(1, n_max + 1)
    sums = np.zeros((k_max, n_max))
    sq = np.zeros((k_max, n_max))
    max_imag = max_pal = max_a1 = 0.0
    for c in np.unique(comps):
        mask = comps == c
        poly = _charpoly_batch(angles[mask], structures[int(c)])
        max_imag = max(max_imag, float(np.abs(poly.imag).max()))
        max_pal = max(max_pal, float(np.abs(poly - poly[:, ::-1]).max()))
        if c != 0:
            max_a1 = max(max_a1, float(np.abs(poly[:, 1]).max()))
        coeffs = poly.real[:, 1 : k_max + 1]
        vals = coeffs[:, :, None] ** powers[None, None, :]
        sums += vals.sum(axis=0)
        sq += (vals * vals).sum(axis=0)
    return sums, sq, max_imag, max_pal, max_a1


def mc_moments(
    ell: int,
    k_max: int = 1,
    n_max: int = 8,
    samples: int = 10**5,
    seed: int = 0,
    component: int | None = None,
    n: int | None = None,
    jobs: int = 1,
) -> MCResult:
    """Monte-Carlo E[a_k^m] for 1 <= k <= k_max, 1 <= m <= n_max.

    Samples are split into fixed-size chunks with spawned sub-seeds, so the
    result depends on (seed, samples) only, never on ``jobs``.  ``component``
    pins the component index; otherwise it is uniform over all components.
    """
    ell = check_odd_prime(ell)
    g = ell * (ell - 1) // 2
    if g > MAX_GENUS:
        raise ResourceGuardError("genus", g, MAX_GENUS)
    if not 1 <= samples <= MAX_SAMPLES:
        if samples < 1:
            raise ValueError("samples must be >= 1")
        raise ResourceGuardError("samples", samples, MAX_SAMPLES)
    if not 1 <= k_max <= 2 * g:
        raise ValueError(f"k_max must lie in [1, {2 * g}]")
    if component is not None and not 0 <= component < ell * (ell - 1):
        raise ValueError(f"component {component} out of range")
    if n is None:
        n = default_generator(ell)
    sizes = [CHUNK_SIZE] * (samples // CHUNK_SIZE)
    if samples % CHUNK_SIZE:
        sizes.append(samples % CHUNK_SIZE)
    children = np.random.SeedSequence(seed).spawn(len(sizes))
    tasks = [(ell, n, child, size, k_max, n_max, component) for child, size in zip(children, sizes)]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            parts = list(pool.map(_mc_chunk, tasks))
    else:
        parts = [_mc_chunk(t) for t in tasks]
    sums = np.zeros((k_max, n_max))
    sq = np.zeros((k_max, n_max))
    for s, s2, *_ in parts:
        sums += s
        sq += s2
    mean = sums / samples
    var = np.maximum(sq / samples - mean**2, 0.0)
    se = np.sqrt(var / samples)
    tables = {}
    for k in range(1, k_max + 1):
        tables[k] = MomentTable(
            k,
            {m: float(mean[k - 1, m - 1]) for m in range(1, n_max + 1)},
            {m: float(se[k - 1, m - 1]) for m in range(1, n_max + 1)},
        )
    return MCResult(
        ell,
        samples,
        seed,
        component,
        tables,
        max(p[2] for p in parts),
        max(p[3] for p in parts),
        max(p[4] for p in parts),
    )


def theory_table(ell: int, n_max: int) -> MomentTable:
    return MomentTable(1, {m: exact_a1_moment(ell, m) for m in range(n_max + 1)}, exact=True)
