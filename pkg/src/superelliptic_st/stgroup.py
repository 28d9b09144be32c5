"""Exponent calculus for the CM endomorphism and the component-group generator.

Everything here is exact.  2x2 blocks are tagged with small integers

    0 -> zero,  +1 -> I,  -1 -> -I,  +2 -> J,  -2 -> -J

where J = [[0, 1], [-1, 0]], so the block product only needs sign and kind.
The diagonal blocks Z^e = diag(zeta^e, zeta^-e) of the endomorphism are
carried as exponents; conjugating them by a block matrix is done with
monomial 2x2 matrices whose entries are signed powers of zeta.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .arith import check_odd_prime, multiplicative_order, unit_group_generator

ZERO, I, NEG_I, J, NEG_J = 0, 1, -1, 2, -2
TAG_NAMES = {ZERO: "0", I: "I", NEG_I: "-I", J: "J", NEG_J: "-J"}

_TAG_MATRIX = {
    ZERO: ((0, 0), (0, 0)),
    I: ((1, 0), (0, 1)),
    NEG_I: ((-1, 0), (0, -1)),
    J: ((0, 1), (-1, 0)),
    NEG_J: ((0, -1), (1, 0)),
}
_MATRIX_TAG = {v: k for k, v in _TAG_MATRIX.items()}


def tag_mul(x: int, y: int) -> int:
    if x == ZERO or y == ZERO:
        return ZERO
    sign = (1 if x > 0 else -1) * (1 if y > 0 else -1)
    kx, ky = abs(x), abs(y)
    if kx == 2 and ky == 2:  # J*J = -I
        return -sign
    return sign * max(kx, ky)


def tag_transpose(x: int) -> int:
    return -x if abs(x) == 2 else x


@dataclass(frozen=True)
class CurveParams:
    ell: int

    def __post_init__(self):
        check_odd_prime(self.ell)

    @property
    def genus(self) -> int:
        return self.ell * (self.ell - 1) // 2

    @property
    def modulus(self) -> int:
        return self.ell * self.ell

    @property
    def component_count(self) -> int:
        return self.ell * (self.ell - 1)


@dataclass(frozen=True)
class OneForm:
    """x^a dx / y^b."""

    a: int
    b: int


@dataclass(frozen=True)
class ExponentData:
    ell: int
    forms: tuple[OneForm, ...]
    e: tuple[int, ...]

    @cached_property
    def S(self) -> frozenset[int]:
        return frozenset(self.e)

    def index_of(self, exponent: int) -> int:
        return self.e.index(exponent)


@dataclass(frozen=True)
class GaloisAction:
    ell: int
    n: int
    raw: tuple[int, ...]  # g_i = <n e_i> mod ell^2
    targets: tuple[tuple[int, bool], ...]  # (exponent in S, conjugated)


def one_form_basis(ell: int) -> list[OneForm]:
    ell = check_odd_prime(ell)
    return [OneForm(a, b) for a in range(ell - 1) for b in range(a + 1, ell)]


def exponent_set(ell: int) -> ExponentData:
    ell = check_odd_prime(ell)
    m = ell * ell
    forms = tuple(one_form_basis(ell))
    e = tuple((ell * (f.a + 1 - f.b) - f.b) % m for f in forms)
    data = ExponentData(ell, forms, e)
    g = ell * (ell - 1) // 2
    S = data.S
    if len(S) != g:
        raise AssertionError("exponents are not distinct")
    if any(x % ell == 0 for x in e):
        raise AssertionError("exponent divisible by ell")
    if any((m - x) in S for x in e):
        raise AssertionError("S meets its negative")
    return data


def _check_unit(n, ell):
    m = ell * ell
    if not 1 <= n < m or math.gcd(n, ell) != 1:
        raise ValueError(f"n={n} is not a unit modulo {m}")


def galois_action(ell: int, n: int) -> GaloisAction:
    ell = check_odd_prime(ell)
    _check_unit(n, ell)
    m = ell * ell
    data = exponent_set(ell)
    raw = tuple(n * x % m for x in data.e)
    targets = tuple((gi, False) if gi in data.S else (m - gi, True) for gi in raw)
    return GaloisAction(ell, n, raw, targets)


# ---------------------------------------------------------------------------
# signed block matrices

class SignedBlockMatrix:
    """g x g grid of block tags, stored sparsely as {(row, col): tag}."""

    __slots__ = ("size", "_blocks")

    def __init__(self, size: int, blocks: dict[tuple[int, int], int] | None = None):
        self.size = size
        clean = {}
        for (i, j), t in (blocks or {}).items():
            if t not in TAG_NAMES:
                raise ValueError(f"invalid block tag {t}")
            if not (0 <= i < size and 0 <= j < size):
                raise IndexError((i, j))
            if t != ZERO:
                clean[(i, j)] = t
        self._blocks = clean

    @classmethod
    def identity(cls, size: int) -> "SignedBlockMatrix":
        return cls(size, {(i, i): I for i in range(size)})

    def __getitem__(self, ij) -> int:
        return self._blocks.get(ij, ZERO)

    def nonzero(self) -> dict[tuple[int, int], int]:
        return dict(self._blocks)

    def __eq__(self, other):
        return isinstance(other, SignedBlockMatrix) and self.size == other.size and self._blocks == other._blocks

    def __hash__(self):
        return hash((self.size, frozenset(self._blocks.items())))

    def __matmul__(self, other):
        return block_compose(self, other)

    def __repr__(self):
        body = ", ".join(f"{k}:{TAG_NAMES[v]}" for k, v in sorted(self._blocks.items()))
        return f"SignedBlockMatrix({self.size}, {{{body}}})"

    def is_signed_permutation(self) -> bool:
        rows = [i for i, _ in self._blocks]
        cols = [j for _, j in self._blocks]
        return len(self._blocks) == self.size and len(set(rows)) == self.size and len(set(cols)) == self.size

    def row_target(self, i: int) -> tuple[int, int]:
        """(column, tag) of the single nonzero block in row i."""
        hits = [(j, t) for (r, j), t in self._blocks.items() if r == i]
        if len(hits) != 1:
            raise ValueError(f"row {i} has {len(hits)} nonzero blocks")
        return hits[0]

    def transpose(self) -> "SignedBlockMatrix":
        return SignedBlockMatrix(self.size, {(j, i): tag_transpose(t) for (i, j), t in self._blocks.items()})

    def inverse(self) -> "SignedBlockMatrix":
        # valid for signed block permutations, whose blocks are orthogonal
        if not self.is_signed_permutation():
            raise ValueError("only signed block permutations are invertible here")
        return self.transpose()

    def is_block_diagonal(self) -> bool:
        return all(i == j for i, j in self._blocks)

    def to_dense(self) -> np.ndarray:
        out = np.zeros((2 * self.size, 2 * self.size), dtype=np.int64)
        for (i, j), t in self._blocks.items():
            out[2 * i : 2 * i + 2, 2 * j : 2 * j + 2] = _TAG_MATRIX[t]
        return out

    def to_grid(self) -> list[list[str]]:
        return [[TAG_NAMES[self[i, j]] for j in range(self.size)] for i in range(self.size)]


def _mat2_mul(x, y):
    return tuple(tuple(sum(x[r][k] * y[k][c] for k in range(2)) for c in range(2)) for r in range(2))


def _mat2_add(x, y):
    return tuple(tuple(x[r][c] + y[r][c] for c in range(2)) for r in range(2))


def block_compose(A: SignedBlockMatrix, B: SignedBlockMatrix) -> SignedBlockMatrix:
    if A.size != B.size:
        raise ValueError(f"size mismatch: {A.size} vs {B.size}")
    by_row: dict[int, list[tuple[int, int]]] = {}
    for (j, k), t in B.nonzero().items():
        by_row.setdefault(j, []).append((k, t))
    acc: dict[tuple[int, int], tuple] = {}
    for (i, j), s in A.nonzero().items():
        for k, t in by_row.get(j, ()):
            prod = _TAG_MATRIX[tag_mul(s, t)]
            acc[(i, k)] = _mat2_add(acc[(i, k)], prod) if (i, k) in acc else prod
    blocks = {}
    for ij, mat in acc.items():
        if mat not in _MATRIX_TAG:
            raise ValueError(f"block {ij} = {mat} leaves the algebra {{0, +-I, +-J}}")
        blocks[ij] = _MATRIX_TAG[mat]
    return SignedBlockMatrix(A.size, blocks)


def block_power(A: SignedBlockMatrix, d: int) -> SignedBlockMatrix:
    if d < 0:
        return block_power(A.inverse(), -d)
    result = SignedBlockMatrix.identity(A.size)
    base = A
    while d:
        if d & 1:
            result = block_compose(result, base)
        base = block_compose(base, base)
        d >>= 1
    return result


def default_generator(ell: int) -> int:
    return unit_group_generator(ell * ell)


def is_generator(ell: int, n: int) -> bool:
    return multiplicative_order(n, ell * ell) == ell * (ell - 1)


def gamma_matrix(ell: int, n: int | None = None) -> SignedBlockMatrix:
    """gamma[i, j] = I if g_i = e_j, J if g_i = ell^2 - e_j, else 0."""
    ell = check_odd_prime(ell)
    if n is None:
        n = default_generator(ell)
    _check_unit(n, ell)
    m = ell * ell
    data = exponent_set(ell)
    action = galois_action(ell, n)
    blocks = {}
    for i, gi in enumerate(action.raw):
        for j, ej in enumerate(data.e):
            if gi == ej:
                blocks[(i, j)] = I
            elif gi == m - ej:
                blocks[(i, j)] = J
    gamma = SignedBlockMatrix(len(data.e), blocks)
    if not gamma.is_signed_permutation():
        raise AssertionError("gamma is not a signed block permutation")
    return gamma


def gamma_inverse(ell: int, n: int | None = None) -> SignedBlockMatrix:
    """Inverse from the explicit formula with swapped indices: I if g_j = e_i, -J if g_j = ell^2 - e_i."""
    ell = check_odd_prime(ell)
    if n is None:
        n = default_generator(ell)
    _check_unit(n, ell)
    m = ell * ell
    data = exponent_set(ell)
    action = galois_action(ell, n)
    blocks = {}
    for i, ei in enumerate(data.e):
        for j, gj in enumerate(action.raw):
            if gj == ei:
                blocks[(i, j)] = I
            elif gj == m - ei:
                blocks[(i, j)] = NEG_J
    return SignedBlockMatrix(len(data.e), blocks)


# 2x2 matrices with entries in Z[Z/mZ]; an entry is a dict {exponent: coeff}.

def _zeta_block(tag: int):
    return tuple(tuple({0: v} if v else {} for v in row) for row in _TAG_MATRIX[tag])


def _z_block(e: int, m: int):
    return (({e % m: 1}, {}), ({}, {(-e) % m: 1}))


def _ring_mul(x, y, m):
    out: dict[int, int] = {}
    for a, c in x.items():
        for b, d in y.items():
            k = (a + b) % m
            out[k] = out.get(k, 0) + c * d
    return {k: v for k, v in out.items() if v}


def _ring_add(x, y):
    out = dict(x)
    for k, v in y.items():
        out[k] = out.get(k, 0) + v
    return {k: v for k, v in out.items() if v}


def _block_mul(x, y, m):
    return tuple(
        tuple(_ring_add(_ring_mul(x[r][0], y[0][c], m), _ring_mul(x[r][1], y[1][c], m)) for c in range(2))
        for r in range(2)
    )


def conjugate_alpha(gamma: SignedBlockMatrix, e, ell: int | None = None) -> list[tuple[int, bool]]:
    """Diagonal of gamma * diag(Z^e_j) * gamma^-1 as (exponent in S, conjugated) pairs.

    Off-diagonal blocks of the product are checked to vanish.
    """
    e = list(e)
    if ell is None:
        ell = _ell_from_genus(len(e))
    m = ell * ell
    S = set(e)
    inv = gamma.inverse()
    inv_rows: dict[int, list[tuple[int, int]]] = {}
    for (k, j), t in inv.nonzero().items():
        inv_rows.setdefault(k, []).append((j, t))
    product: dict[tuple[int, int], tuple] = {}
    for (i, k), t in gamma.nonzero().items():
        left = _block_mul(_zeta_block(t), _z_block(e[k], m), m)
        for j, s in inv_rows.get(k, ()):
            term = _block_mul(left, _zeta_block(s), m)
            if (i, j) in product:
                prev = product[(i, j)]
                term = tuple(tuple(_ring_add(prev[r][c], term[r][c]) for c in range(2)) for r in range(2))
            product[(i, j)] = term
    out = []
    for i in range(gamma.size):
        for (r, j), blk in product.items():
            if r != j and any(blk[a][b] for a in range(2) for b in range(2)):
                raise AssertionError(f"conjugate has nonzero off-diagonal block {(r, j)}")
        blk = product.get((i, i))
        if blk is None or blk[0][1] or blk[1][0]:
            raise AssertionError(f"diagonal block {i} is not diagonal")
        top, bottom = blk[0][0], blk[1][1]
        if len(top) != 1 or len(bottom) != 1 or list(top.values()) != [1] or list(bottom.values()) != [1]:
            raise AssertionError(f"diagonal block {i} is not a power of Z")
        x = next(iter(top))
        if (x + next(iter(bottom))) % m:
            raise AssertionError(f"diagonal block {i} is not of the form diag(z, conj z)")
        if x in S:
            out.append((x, False))
        elif (m - x) in S:
            out.append((m - x, True))
        else:
            raise AssertionError(f"exponent {x} not in S or -S")
    return out


def _ell_from_genus(g: int) -> int:
    for x in range(3, 2 * g + 3):
        if x * (x - 1) // 2 == g:
            return x
    raise ValueError(f"{g} is not a triangular genus")


def is_symplectic(gamma: SignedBlockMatrix) -> bool:
    """gamma^T Omega gamma == Omega for Omega = diag(J, ..., J), computed exactly."""
    M = gamma.to_dense()
    omega = SignedBlockMatrix(gamma.size, {(i, i): J for i in range(gamma.size)}).to_dense()
    return bool(np.array_equal(M.T @ omega @ M, omega))


def component_order(gamma: SignedBlockMatrix, limit: int | None = None) -> int:
    """Smallest d > 0 with gamma^d block diagonal with +-I blocks."""
    limit = limit or 4 * gamma.size * gamma.size + 4
    power = gamma
    for d in range(1, limit + 1):
        if power.is_block_diagonal() and all(abs(t) == 1 for t in power.nonzero().values()):
            return d
        power = block_compose(power, gamma)
    raise ValueError("gamma^d never lands in the identity component")


def matrix_order(gamma: SignedBlockMatrix, limit: int | None = None) -> int:
    """Smallest d > 0 with gamma^d equal to the identity."""
    limit = limit or 8 * gamma.size * gamma.size + 8
    ident = SignedBlockMatrix.identity(gamma.size)
    power = gamma
    for d in range(1, limit + 1):
        if power == ident:
            return d
        power = block_compose(power, gamma)
    raise ValueError("gamma has no finite order within the search limit")


def group_report(ell: int, n: int | None = None) -> dict:
    ell = check_odd_prime(ell)
    if n is None:
        n = default_generator(ell)
    data = exponent_set(ell)
    action = galois_action(ell, n)
    gamma = gamma_matrix(ell, n)
    conj = conjugate_alpha(gamma, data.e, ell)
    generator = is_generator(ell, n)
    report = {
        "l": ell,
        "n": n,
        "n_is_generator": generator,
        "genus": len(data.e),
        "basis": [[f.a, f.b] for f in data.forms],
        "alpha_exponents": list(data.e),
        "S": sorted(data.S),
        "galois_targets": [{"exponent": x, "conjugated": c} for x, c in action.targets],
        "gamma_blocks": [
            {"row": i, "col": j, "block": TAG_NAMES[t]} for (i, j), t in sorted(gamma.nonzero().items())
        ],
        "is_symplectic": is_symplectic(gamma),
        "conjugation_check": conj == list(action.targets),
        "component_order": component_order(gamma),
        "matrix_order": matrix_order(gamma),
    }
    return report
