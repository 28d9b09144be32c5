import math

import pytest

from superelliptic_st.counting import PointCountRecord, count_points_naive
from superelliptic_st.exceptions import CacheError, ResourceGuardError
from superelliptic_st.ltrace import (
    A1Dataset,
    build_dataset,
    cache_load,
    cache_store,
    good_primes,
    histogram,
    numerical_moments,
)


def test_good_primes():
    assert good_primes(5, 30) == [2, 3, 7, 11, 13, 17, 19, 23, 29]
    assert good_primes(3, 10) == [2, 5, 7]
    assert good_primes(5, 2) == [2]


def test_dataset_without_qualifying_primes():
    data = build_dataset(5, 100)
    assert len(data) == 24
    assert all(r.a1 == 0 for r in data.records)
    assert data.field_computations == 0


def test_dataset_single_qualifying_prime():
    data = build_dataset(5, 101)
    hits = [r for r in data.records if r.q % 25 == 1]
    assert [r.q for r in hits] == [101]
    assert hits[0].count == count_points_naive(5, 101).count
    assert data.field_computations == 1


def test_dataset_lemma_zeros_and_naive_agreement():
    data = build_dataset(3, 3000)
    for r in data.records:
        if r.q % 9 != 1:
            assert r.a1 == 0
        assert r.satisfies_weil_bound()
    for r in data.records[::37]:
        assert r.count == count_points_naive(3, r.q).count


def test_warm_cache_skips_field_work(tmp_path):
    path = tmp_path / "c5.csv"
    cold = build_dataset(5, 3000, cache_path=path)
    assert cold.field_computations > 0
    warm = build_dataset(5, 3000, cache_path=path)
    assert warm.field_computations == 0
    assert [r.count for r in warm.records] == [r.count for r in cold.records]


def test_parallel_equals_serial():
    a = build_dataset(5, 5000, jobs=1)
    b = build_dataset(5, 5000, jobs=2)
    assert [(r.q, r.count) for r in a.records] == [(r.q, r.count) for r in b.records]


def test_bound_guard():
    with pytest.raises(ResourceGuardError):
        build_dataset(5, 10**6, guard=10**5)


def _records():
    return [PointCountRecord(5, 101, 157, "jacobi_trace"), PointCountRecord(5, 7, 8, "lemma_congruence"),
            PointCountRecord(5, 11, 12, "lemma_congruence")]


def test_cache_empty_file(tmp_path):
    p = tmp_path / "c.csv"
    p.write_text("")
    assert cache_load(p) == []
    assert cache_load(tmp_path / "missing.csv") == []


def test_cache_round_trip(tmp_path):
    p = tmp_path / "c.csv"
    cache_store(_records(), p)
    text = p.read_text()
    assert text == "l,p,count\n5,7,8\n5,11,12\n5,101,157\n"
    loaded = cache_load(p)
    assert [(r.ell, r.q, r.count) for r in loaded] == [(5, 7, 8), (5, 11, 12), (5, 101, 157)]
    cache_store(loaded, p)
    assert p.read_text() == text


def test_cache_dedups_identical_rows(tmp_path):
    p = tmp_path / "c.csv"
    p.write_text("l,p,count\n5,101,157\n5,7,8\n5,101,157\n")
    assert [r.q for r in cache_load(p)] == [7, 101]


def test_cache_conflict_names_prime(tmp_path):
    p = tmp_path / "c.csv"
    p.write_text("l,p,count\n5,101,157\n5,101,158\n")
    with pytest.raises(CacheError, match="p=101") as info:
        cache_load(p)
    assert info.value.line == 3


def test_cache_malformed_row(tmp_path):
    p = tmp_path / "c.csv"
    p.write_text("l,p,count\n5,7\n")
    with pytest.raises(CacheError, match="line 2"):
        cache_load(p)
    p.write_text("l,p,count\n5,7,x\n")
    with pytest.raises(CacheError):
        cache_load(p)


def _dataset(values):
    recs = []
    for p, a in zip([2, 3, 7, 11, 13], values):
        # integer deviation a = p + 1 - N
        recs.append(PointCountRecord(5, p, p + 1 - a, "naive"))
    return A1Dataset(5, 13, recs)


def test_numerical_moments_trivial():
    data = _dataset([0, 0, 2])
    x = 2 / math.sqrt(7)
    assert numerical_moments(data, 2).values[2] == pytest.approx(x * x / 3)


def test_numerical_moments_empty():
    with pytest.raises(ValueError):
        numerical_moments(A1Dataset(5, 1, []), 2)
    with pytest.raises(ValueError):
        numerical_moments(build_dataset(5, 100), 2, restrict=True)


def test_restricted_and_full_moments_consistent():
    data = build_dataset(5, 20000)
    n_all = len(data)
    n_res = int((data.primes % 25 == 1).sum())
    full = numerical_moments(data, 8)
    res = numerical_moments(data, 8, restrict=True)
    for n in (2, 4, 6, 8):
        assert full.values[n] * n_all == pytest.approx(res.values[n] * n_res, rel=1e-12)


def test_histogram_all_zero_middle_bin():
    h = histogram(build_dataset(5, 100), bins=3)
    assert h.counts.tolist() == [0, 24, 0]
    assert h.edges[0] == -20 and h.edges[-1] == 20


def test_histogram_filter_empty():
    h = histogram(build_dataset(5, 100), bins=11, filter="res1")
    assert h.counts.sum() == 0


def test_histogram_total_invariant():
    data = build_dataset(5, 20000)
    totals = {histogram(data, b).counts.sum() for b in (1, 7, 101)}
    assert totals == {len(data)}
    assert histogram(data, 13, "res1").counts.sum() == int((data.primes % 25 == 1).sum())
    with pytest.raises(ValueError):
        histogram(data, 0)
