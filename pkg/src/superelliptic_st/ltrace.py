"""a1 datasets over ranges of good primes, numerical moments and histograms."""

from __future__ import annotations

import io
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .arith import DEFAULT_MEMORY_GUARD, check_odd_prime, prime_sieve
from .counting import PointCountRecord, count_points, genus
from .exceptions import CacheError, ResourceGuardError
from .moments import MomentTable

CACHE_HEADER = "l,p,count"
DEFAULT_BINS = 101


@dataclass
class A1Dataset:
    ell: int
    bound: int
    records: list[PointCountRecord]
    field_computations: int = 0

    @property
    def primes(self) -> np.ndarray:
        return np.array([r.q for r in self.records], dtype=np.int64)

    @property
    def a1(self) -> np.ndarray:
        return np.array([r.a1 for r in self.records], dtype=np.float64)

    def __len__(self):
        return len(self.records)


@dataclass
class HistogramData:
    edges: np.ndarray
    counts: np.ndarray
    filter: str

    def rows(self):
        return [(float(lo), float(hi), int(c)) for lo, hi, c in zip(self.edges[:-1], self.edges[1:], self.counts)]


def good_primes(ell: int, bound: int) -> list[int]:
    return [int(p) for p in prime_sieve(bound) if p != ell]


# ---------------------------------------------------------------------------
# cache

def _parse_cache(text: str, source: str = "<cache>") -> dict[tuple[int, int], int]:
    out: dict[tuple[int, int], int] = {}
    lines = text.splitlines()
    for lineno, line in enumerate(lines, start=1):
        line = line.strip()
        if not line:
            continue
        if lineno == 1 and line == CACHE_HEADER:
            continue
        parts = line.split(",")
        if len(parts) != 3:
            raise CacheError(f"{source}: expected 3 fields, got {len(parts)}", lineno)
        try:
            ell, p, count = (int(x) for x in parts)
        except ValueError:
            raise CacheError(f"{source}: non-integer field in {line!r}", lineno) from None
        prev = out.get((ell, p))
        if prev is not None and prev != count:
            raise CacheError(f"{source}: conflicting counts for l={ell} p={p}: {prev} vs {count}", lineno)
        out[(ell, p)] = count
    return out


def cache_load(path, ell: int | None = None) -> list[PointCountRecord]:
    """Records in the cache file, deduplicated and sorted by (l, p)."""
    path = Path(path)
    if not path.exists():
        return []
    rows = _parse_cache(path.read_text(encoding="utf-8"), str(path))
    return [
        PointCountRecord(l_, p, c, "cache")
        for (l_, p), c in sorted(rows.items())
        if ell is None or l_ == ell
    ]


def _format_rows(records) -> str:
    buf = io.StringIO()
    buf.write(CACHE_HEADER + "\n")
    for r in sorted(records, key=lambda r: (r.ell, r.q)):
        buf.write(f"{r.ell},{r.q},{r.count}\n")
    return buf.getvalue()


def cache_store(records, path) -> None:
    """Write records (merged with any existing file content) sorted by (l, p)."""
    if isinstance(records, A1Dataset):
        records = records.records
    path = Path(path)
    merged = {(r.ell, r.q): r for r in cache_load(path)}
    for r in records:
        prev = merged.get((r.ell, r.q))
        if prev is not None and prev.count != r.count:
            raise CacheError(f"conflicting counts for l={r.ell} p={r.q}: {prev.count} vs {r.count}")
        merged[(r.ell, r.q)] = r
    tmp = path.with_suffix(path.suffix + ".tmp")
    tmp.write_text(_format_rows(merged.values()), encoding="utf-8")
    os.replace(tmp, path)


def _cache_append(path: Path, records) -> None:
    new = not path.exists() or path.stat().st_size == 0
    with open(path, "a", encoding="utf-8") as fh:
        if new:
            fh.write(CACHE_HEADER + "\n")
        for r in records:
            fh.write(f"{r.ell},{r.q},{r.count}\n")


# ---------------------------------------------------------------------------
# dataset construction

def _count_many(args):
    ell, primes = args
    return [count_points(ell, p) for p in primes]


def build_dataset(
    ell: int,
    bound: int,
    cache_path=None,
    jobs: int = 1,
    guard: int = DEFAULT_MEMORY_GUARD,
    progress=None,
) -> A1Dataset:
    """Point counts for all good p <= bound.

    Primes with p != 1 mod ell^2 get count p + 1 without any field arithmetic;
    the rest are read from the cache when present and computed otherwise.
    New counts are appended to the cache as each batch finishes, so an
    interrupted run keeps its partial work.
    """
    ell = check_odd_prime(ell)
    if bound > guard:
        raise ResourceGuardError("bound", bound, guard)
    m = ell * ell
    primes = good_primes(ell, bound)
    cached = {}
    if cache_path is not None:
        cache_path = Path(cache_path)
        cached = {r.q: r.count for r in cache_load(cache_path, ell)}
    todo = [p for p in primes if p % m == 1 and p not in cached]
    computed: dict[int, PointCountRecord] = {}
    if todo:
        batch = max(1, min(256, len(todo) // max(1, 4 * jobs) or 1))
        chunks = [todo[i : i + batch] for i in range(0, len(todo), batch)]
        tasks = [(ell, c) for c in chunks]
        if jobs > 1:
            with ProcessPoolExecutor(max_workers=jobs) as pool:
                results = pool.map(_count_many, tasks)
                _collect(results, computed, cache_path, progress, len(todo))
        else:
            _collect(map(_count_many, tasks), computed, cache_path, progress, len(todo))
    records = []
    for p in primes:
        if p % m != 1:
            records.append(PointCountRecord(ell, p, p + 1, "lemma_congruence"))
        elif p in computed:
            records.append(computed[p])
        else:
            records.append(PointCountRecord(ell, p, cached[p], "cache"))
    bad = [r.q for r in records if not r.satisfies_weil_bound()]
    if bad:
        raise ArithmeticError(f"Weil bound violated at p={bad[:5]}")
    return A1Dataset(ell, bound, records, field_computations=len(computed))


def _collect(results, computed, cache_path, progress, total):
    # single writer: results arrive in submission order regardless of workers
    done = 0
    for chunk in results:
        for r in chunk:
            computed[r.q] = r
        if cache_path is not None:
            _cache_append(cache_path, chunk)
        done += len(chunk)
        if progress is not None:
            progress(done, total)


def dataset_from_records(ell: int, bound: int, records) -> A1Dataset:
    recs = sorted((r for r in records if r.ell == ell and r.q <= bound), key=lambda r: r.q)
    return A1Dataset(ell, bound, recs)


# ---------------------------------------------------------------------------
# statistics

def _select(dataset: A1Dataset, restrict: bool) -> np.ndarray:
    a1 = dataset.a1
    if restrict:
        m = dataset.ell**2
        a1 = a1[dataset.primes % m == 1]
    return a1


def numerical_moments(dataset: A1Dataset, n_max: int, restrict: bool = False) -> MomentTable:
    """M_n = mean of a1(p)^n, over all good primes or only p = 1 mod ell^2."""
    a1 = _select(dataset, restrict)
    if a1.size == 0:
        raise ValueError("no records to average")
    values = {}
    stderr = {}
    for n in range(n_max + 1):
        x = a1**n
        values[n] = float(x.mean())
        stderr[n] = float(x.std() / math.sqrt(x.size))
    return MomentTable(1, values, stderr)


def histogram(dataset: A1Dataset, bins: int = DEFAULT_BINS, filter: str = "all") -> HistogramData:
    if bins < 1:
        raise ValueError("bins must be >= 1")
    if filter not in ("all", "res1"):
        raise ValueError(f"unknown filter {filter!r}")
    g = genus(dataset.ell)
    edges = np.linspace(-2 * g, 2 * g, bins + 1)
    a1 = _select(dataset, filter == "res1")
    counts, _ = np.histogram(a1, bins=edges)
    return HistogramData(edges, counts, filter)
