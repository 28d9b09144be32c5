"""Command-line entry point.

Usage:
    superelliptic-st count --l 5 --q 101
    superelliptic-st scan --l 5 --bound 100000 --jobs 4 --cache c5.csv
    superelliptic-st group --l 5 --n 2
    superelliptic-st moments theory --l 5 --nmax 8
    superelliptic-st moments numeric --l 5 --bound 262144 --nmax 8
    superelliptic-st moments mc --l 5 --samples 1000000 --seed 20240101 --kmax 2 --nmax 8
    superelliptic-st hist --l 5 --bound 262144 --bins 101 --filter res1 --out fig.svg

Errors go to stderr as one JSON line ({"error": ..., "message": ...}) with a
nonzero exit status.
"""

from __future__ import annotations

import argparse
import io
import json
import os
import sys
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path
from xml.sax.saxutils import escape

from . import __version__
from .arith import check_odd_prime
from .counting import count_points, count_points_naive
from .exceptions import SuperellipticError
from .ltrace import (
    DEFAULT_BINS,
    _format_rows,
    build_dataset,
    histogram,
    numerical_moments,
)
from .moments import mc_moments, theory_table
from .stgroup import group_report

DEFAULT_SEED = 20240101
CACHE_DIR_ENV = "SUPERELLIPTIC_ST_CACHE_DIR"


@dataclass
class RunConfig:
    command: str
    ell: int
    q: int | None = None
    n: int | None = None
    method: str = "auto"
    bound: int | None = None
    n_max: int = 8
    k_max: int = 1
    samples: int = 10**5
    seed: int = DEFAULT_SEED
    jobs: int = 1
    cache: str | None = None
    out: str | None = None
    restrict: bool = False
    bins: int = DEFAULT_BINS
    filter: str = "all"

    def __post_init__(self):
        check_odd_prime(self.ell)


def _dumps(obj) -> str:
    return json.dumps(obj, separators=(",", ":"))


def _fraction_str(x: Fraction) -> str:
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def _sig12(x: float) -> float:
    return float(f"{x:.12g}")


def _number(x: float):
    return int(x) if float(x).is_integer() else x


def _cache_path(cfg: RunConfig):
    if cfg.cache:
        return cfg.cache
    cache_dir = os.environ.get(CACHE_DIR_ENV)
    if cache_dir:
        Path(cache_dir).mkdir(parents=True, exist_ok=True)
        return str(Path(cache_dir) / f"c{cfg.ell}.csv")
    return None


def _emit(text: str, out: str | None, stdout) -> None:
    if out:
        Path(out).write_text(text, encoding="utf-8")
    else:
        stdout.write(text)


def cmd_count(cfg: RunConfig, stdout) -> None:
    rec = count_points_naive(cfg.ell, cfg.q) if cfg.method == "naive" else count_points(cfg.ell, cfg.q)
    payload = {"l": rec.ell, "q": rec.q, "count": rec.count, "method": rec.method, "a1": _number(rec.a1)}
    stdout.write(_dumps(payload) + "\n")


def cmd_scan(cfg: RunConfig, stdout) -> None:
    data = build_dataset(cfg.ell, cfg.bound, cache_path=_cache_path(cfg), jobs=cfg.jobs)
    _emit(_format_rows(data.records), cfg.out, stdout)


def cmd_group(cfg: RunConfig, stdout) -> None:
    stdout.write(_dumps(group_report(cfg.ell, cfg.n)) + "\n")


def cmd_moments_theory(cfg: RunConfig, stdout) -> None:
    table = theory_table(cfg.ell, cfg.n_max)
    payload = {"l": cfg.ell, "k": 1, "moments": {str(n): _fraction_str(v) for n, v in table.values.items()}}
    stdout.write(_dumps(payload) + "\n")


def cmd_moments_numeric(cfg: RunConfig, stdout) -> None:
    data = build_dataset(cfg.ell, cfg.bound, cache_path=_cache_path(cfg), jobs=cfg.jobs)
    table = numerical_moments(data, cfg.n_max, restrict=cfg.restrict)
    payload = {
        "l": cfg.ell,
        "bound": cfg.bound,
        "restrict": cfg.restrict,
        "records": len(data.records) if not cfg.restrict else int((data.primes % cfg.ell**2 == 1).sum()),
        "moments": {str(n): _sig12(v) for n, v in table.values.items()},
    }
    stdout.write(_dumps(payload) + "\n")


def cmd_moments_mc(cfg: RunConfig, stdout) -> None:
    res = mc_moments(cfg.ell, cfg.k_max, cfg.n_max, cfg.samples, cfg.seed, jobs=cfg.jobs)
    payload = {
        "l": cfg.ell,
        "samples": cfg.samples,
        "seed": cfg.seed,
        "moments": {
            str(k): {str(n): {"value": _sig12(t.values[n]), "stderr": _sig12(t.stderr[n])} for n in t.values}
            for k, t in res.tables.items()
        },
    }
    stdout.write(_dumps(payload) + "\n")


def render_svg(hist, title: str, width: int = 640, height: int = 360) -> str:
    """Bar chart with axes and a title, no external dependencies."""
    pad_l, pad_r, pad_t, pad_b = 50, 20, 30, 40
    pw, ph = width - pad_l - pad_r, height - pad_t - pad_b
    counts = [int(c) for c in hist.counts]
    top = max(counts) if counts and max(counts) > 0 else 1
    bw = pw / max(1, len(counts))
    out = io.StringIO()
    out.write(f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}">\n')
    out.write(f'<text x="{width / 2:.1f}" y="18" text-anchor="middle" font-size="14">{escape(title)}</text>\n')
    x0, y0 = pad_l, pad_t + ph
    out.write(f'<line x1="{x0}" y1="{y0}" x2="{x0 + pw}" y2="{y0}" stroke="black"/>\n')
    out.write(f'<line x1="{x0}" y1="{pad_t}" x2="{x0}" y2="{y0}" stroke="black"/>\n')
    for i, c in enumerate(counts):
        if c:
            h = ph * c / top
            out.write(
                f'<rect x="{x0 + i * bw:.2f}" y="{y0 - h:.2f}" width="{bw:.2f}" height="{h:.2f}" fill="steelblue"/>\n'
            )
    lo, hi = float(hist.edges[0]), float(hist.edges[-1])
    out.write(f'<text x="{x0}" y="{y0 + 16}" text-anchor="middle" font-size="11">{lo:g}</text>\n')
    out.write(f'<text x="{x0 + pw}" y="{y0 + 16}" text-anchor="middle" font-size="11">{hi:g}</text>\n')
    out.write(f'<text x="{x0 - 6}" y="{pad_t + 4}" text-anchor="end" font-size="11">{top}</text>\n')
    out.write("</svg>\n")
    return out.getvalue()


def cmd_hist(cfg: RunConfig, stdout) -> None:
    data = build_dataset(cfg.ell, cfg.bound, cache_path=_cache_path(cfg), jobs=cfg.jobs)
    hist = histogram(data, cfg.bins, cfg.filter)
    if cfg.out and cfg.out.endswith(".svg"):
        which = "all good primes" if cfg.filter == "all" else f"p = 1 mod {cfg.ell**2}"
        text = render_svg(hist, f"a1 histogram, l={cfg.ell}, p <= {cfg.bound}, {which}")
    else:
        lines = ["bin_lo,bin_hi,count"] + [f"{lo:.12g},{hi:.12g},{c}" for lo, hi, c in hist.rows()]
        text = "\n".join(lines) + "\n"
    _emit(text, cfg.out, stdout)


COMMANDS = {
    "count": cmd_count,
    "scan": cmd_scan,
    "group": cmd_group,
    "moments theory": cmd_moments_theory,
    "moments numeric": cmd_moments_numeric,
    "moments mc": cmd_moments_mc,
    "hist": cmd_hist,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="superelliptic-st", description=__doc__.split("\n\n")[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--l", dest="ell", type=int, required=True, help="odd prime ell")

    p = sub.add_parser("count", help="point count over F_q")
    common(p)
    p.add_argument("--q", type=int, required=True)
    p.add_argument("--method", choices=("auto", "naive"), default="auto")

    p = sub.add_parser("scan", help="dataset CSV of point counts for p <= bound")
    common(p)
    p.add_argument("--bound", type=int, required=True)
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--cache")
    p.add_argument("--out")

    p = sub.add_parser("group", help="Sato-Tate generator report")
    common(p)
    p.add_argument("--n", type=int, default=None, help="unit mod l^2 (default: smallest generator)")

    p = sub.add_parser("moments", help="moment statistics")
    msub = p.add_subparsers(dest="mode", required=True)
    t = msub.add_parser("theory")
    common(t)
    t.add_argument("--nmax", dest="n_max", type=int, default=8)
    nm = msub.add_parser("numeric")
    common(nm)
    nm.add_argument("--bound", type=int, required=True)
    nm.add_argument("--nmax", dest="n_max", type=int, default=8)
    nm.add_argument("--restrict", action="store_true")
    nm.add_argument("--jobs", type=int, default=1)
    nm.add_argument("--cache")
    mc = msub.add_parser("mc")
    common(mc)
    mc.add_argument("--samples", type=int, default=10**5)
    mc.add_argument("--seed", type=int, default=DEFAULT_SEED)
    mc.add_argument("--kmax", dest="k_max", type=int, default=1)
    mc.add_argument("--nmax", dest="n_max", type=int, default=8)
    mc.add_argument("--jobs", type=int, default=1)

    p = sub.add_parser("hist", help="a1 histogram as CSV or SVG")
    common(p)
    p.add_argument("--bound", type=int, required=True)
    p.add_argument("--bins", type=int, default=DEFAULT_BINS)
    p.add_argument("--filter", choices=("all", "res1"), default="all")
    p.add_argument("--out")
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--cache")
    return parser


def run(cfg: RunConfig, stdout=None) -> int:
    stdout = stdout or sys.stdout
    COMMANDS[cfg.command](cfg, stdout)
    return 0


def main(argv=None, stdout=None, stderr=None) -> int:
    stderr = stderr or sys.stderr
    args = build_parser().parse_args(argv)
    command = args.command if args.command != "moments" else f"moments {args.mode}"
    fields = {k: v for k, v in vars(args).items() if k not in ("command", "mode") and v is not None}
    try:
        cfg = RunConfig(command=command, **fields)
        return run(cfg, stdout)
    except (SuperellipticError, ValueError, ArithmeticError) as exc:
        stderr.write(_dumps({"error": type(exc).__name__, "message": str(exc)}) + "\n")
        return 1


if __name__ == "__main__":
    sys.exit(main())
