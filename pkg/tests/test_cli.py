import io
import json
from fractions import Fraction
from pathlib import Path

import pytest

from superelliptic_st.cli import _fraction_str, main

GOLDEN = Path(__file__).parent / "golden"


def run(*argv):
    out, err = io.StringIO(), io.StringIO()
    status = main(list(argv), stdout=out, stderr=err)
    return status, out.getvalue(), err.getvalue()


def test_count_golden():
    status, out, _ = run("count", "--l", "5", "--q", "7")
    assert status == 0
    assert out.strip() == '{"l":5,"q":7,"count":8,"method":"lemma_congruence","a1":0}'
    assert out == (GOLDEN / "count_l5_q7.json").read_text()


def test_count_naive_and_jacobi():
    _, out, _ = run("count", "--l", "5", "--q", "101", "--method", "naive")
    naive = json.loads(out)
    _, out, _ = run("count", "--l", "5", "--q", "101")
    fast = json.loads(out)
    assert naive["count"] == fast["count"] == 157
    assert (naive["method"], fast["method"]) == ("naive", "jacobi_trace")
    assert fast["a1"] == pytest.approx((102 - 157) / 101**0.5)


def test_moments_theory_golden():
    status, out, _ = run("moments", "theory", "--l", "5", "--nmax", "8")
    moments = json.loads(out)["moments"]
    assert {k: moments[k] for k in "2468"} == {"2": "1", "4": "57", "6": "5140", "8": "615545"}
    assert out == (GOLDEN / "moments_theory_l5.json").read_text()


def test_moments_theory_rational_strings():
    _, out, _ = run("moments", "theory", "--l", "3", "--nmax", "4")
    assert json.loads(out)["moments"]["4"] == "15"
    _, out, _ = run("moments", "theory", "--l", "7", "--nmax", "4")
    # identity component: 21 * 6 + 6 * binom(21, 2) * 4 = 5166, over 42 components
    assert json.loads(out)["moments"]["4"] == "123"
    assert _fraction_str(Fraction(233, 2)) == "233/2"
    assert _fraction_str(Fraction(0)) == "0"


def test_group_golden():
    _, out, _ = run("group", "--l", "5", "--n", "2")
    report = json.loads(out)
    assert report["alpha_exponents"] == [24, 18, 12, 6, 23, 17, 11, 22, 16, 21]
    assert [i for i, t in enumerate(report["galois_targets"]) if t["conjugated"]] == [5, 7, 8]
    assert report["conjugation_check"] and report["is_symplectic"]
    assert report["component_order"] == 20
    assert out == (GOLDEN / "group_l5_n2.json").read_text()


def test_group_default_generator():
    _, out, _ = run("group", "--l", "7")
    assert json.loads(out)["n"] == 3


def test_scan_csv(tmp_path):
    out_path = tmp_path / "scan.csv"
    cache = tmp_path / "cache.csv"
    status, _, _ = run("scan", "--l", "5", "--bound", "200", "--cache", str(cache), "--out", str(out_path))
    assert status == 0
    lines = out_path.read_text().splitlines()
    assert lines[0] == "l,p,count"
    assert "5,101,157" in lines and "5,151,207" in lines
    assert len(lines) == 1 + 45
    assert "5,101,157" in cache.read_text()


def test_scan_uses_cache_dir_env(tmp_path, monkeypatch):
    monkeypatch.setenv("SUPERELLIPTIC_ST_CACHE_DIR", str(tmp_path / "cache"))
    run("scan", "--l", "5", "--bound", "200")
    assert (tmp_path / "cache" / "c5.csv").exists()


def test_moments_numeric():
    _, out, _ = run("moments", "numeric", "--l", "5", "--bound", "1000", "--nmax", "4")
    payload = json.loads(out)
    assert payload["moments"]["0"] == 1.0
    _, out, _ = run("moments", "numeric", "--l", "5", "--bound", "1000", "--nmax", "4", "--restrict")
    restricted = json.loads(out)
    # 101, 151, 251, 401, 601, 701, 751
    assert restricted["records"] == 7
    assert restricted["moments"]["2"] == pytest.approx(payload["moments"]["2"] * payload["records"] / 7, rel=1e-9)


def test_moments_mc_deterministic():
    args = ("moments", "mc", "--l", "3", "--samples", "5000", "--seed", "9", "--kmax", "2", "--nmax", "2")
    _, a, _ = run(*args)
    _, b, _ = run(*args)
    assert a == b
    m = json.loads(a)["moments"]
    assert set(m) == {"1", "2"}
    assert set(m["1"]["2"]) == {"value", "stderr"}


def test_hist_csv_and_svg(tmp_path):
    _, out, _ = run("hist", "--l", "5", "--bound", "100", "--bins", "3")
    assert out.splitlines() == ["bin_lo,bin_hi,count", "-20,-6.66666666667,0", "-6.66666666667,6.66666666667,24",
                                "6.66666666667,20,0"]
    svg = tmp_path / "h.svg"
    run("hist", "--l", "5", "--bound", "2000", "--bins", "11", "--filter", "res1", "--out", str(svg))
    text = svg.read_text()
    assert text.startswith("<svg") and "<rect" in text and "mod 25" in text


@pytest.mark.parametrize(
    "argv",
    [
        ("count", "--l", "5", "--q", "5"),
        ("count", "--l", "4", "--q", "7"),
        ("count", "--l", "5", "--q", "9"),
        ("moments", "mc", "--l", "5", "--samples", "0"),
    ],
)
def test_errors_are_one_json_line(argv):
    status, out, err = run(*argv)
    assert status != 0 and out == ""
    assert len(err.strip().splitlines()) == 1
    assert set(json.loads(err)) == {"error", "message"}
