"""The convergence-study harness: grid of cells, CSV/SVG output, slope fits."""

from __future__ import annotations

import csv
import math
import warnings
from collections import defaultdict
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence
from xml.sax.saxutils import escape

import numpy as np

from .estimator import EstimatorConfig, mean_of, median_of, replicate_values
from .netgen import RandomizationScheme
from .rng import cell_seed
from .testfns import ProductTestFunction

CSV_HEADER = ("scheme", "s", "gamma", "alpha", "m", "r", "seed", "estimate", "abs_error")
SCHEME_ORDER = ("CRD", "RLS", "STD")
_SCHEME_CODE = {"CRD": 0, "RLS": 1, "STD": 1}  # STD reuses the RLS streams
DEFAULT_BUDGET = 10**10
EXTENDED_S = 1000
EXTENDED_M = 13


@dataclass(frozen=True)
class ExperimentGrid:
    s_list: tuple[int, ...] = (10, 100, 1000)
    gamma_list: tuple[float, ...] = (2.0, 3.0, 4.0)
    alpha_list: tuple[int, ...] = (0, 1)
    m_range: tuple[int, ...] = tuple(range(1, 17))
    r: int = 10
    schemes: tuple[str, ...] = SCHEME_ORDER
    master_seed: int = 20240601
    full: bool = False
    budget: int = DEFAULT_BUDGET
    reference_mean: float = 1.0

    def __post_init__(self):
        for name in ("s_list", "gamma_list", "alpha_list", "m_range", "schemes"):
            val = tuple(getattr(self, name))
            if not val:
                raise ValueError(f"{name} must be nonempty")
            object.__setattr__(self, name, val)
        if list(self.m_range) != sorted(set(self.m_range)):
            raise ValueError("m_range must be strictly ascending")
        bad = set(self.schemes) - set(SCHEME_ORDER)
        if bad:
            raise ValueError(f"unknown schemes {sorted(bad)}")
        if self.r < 1:
            raise ValueError("r must be >= 1")

    @staticmethod
    def is_extended(s: int, m: int) -> bool:
        return s >= EXTENDED_S or m >= EXTENDED_M

    def cells(self) -> list[tuple[str, int, float, int, int]]:
        """``(scheme, s, gamma, alpha, m)`` in canonical order, extended cells dropped unless ``full``."""
        out = []
        for scheme in sorted(self.schemes, key=SCHEME_ORDER.index):
            for s in sorted(self.s_list):
                for g in sorted(self.gamma_list):
                    for a in sorted(self.alpha_list):
                        for m in self.m_range:
                            if self.full or not self.is_extended(s, m):
                                out.append((scheme, s, float(g), a, m))
        return out

    def cost(self) -> int:
        """Coordinate evaluations needed; STD is free when RLS runs too."""
        total = 0
        for scheme, s, _, _, m in self.cells():
            if scheme == "STD" and "RLS" in self.schemes:
                continue
            total += (2 * self.r - 1) * (1 << m) * s
        return total


@dataclass(frozen=True)
class ResultRow:
    scheme: str
    s: int
    gamma: float
    alpha: int
    m: int
    r: int
    seed: int
    estimate: float
    abs_error: float
    replicates: tuple[float, ...] = field(default=(), compare=False, repr=False)


def cell_key_seed(master_seed: int, scheme: str, s: int, gamma: float, alpha: int, m: int) -> int:
    """Seed of one cell; independent of every other cell and of the run's grid."""
    gamma_key = int(round(gamma * 10**6))
    return cell_seed(master_seed, _SCHEME_CODE[scheme], s, gamma_key, alpha, m)


def _run_cell(grid: ExperimentGrid, scheme: str, s: int, gamma: float, alpha: int, m: int) -> tuple[int, tuple[float, ...]]:
    seed = cell_key_seed(grid.master_seed, scheme, s, gamma, alpha, m)
    tag = "RLS" if scheme == "STD" else scheme
    f = ProductTestFunction(s, gamma, alpha)
    cfg = EstimatorConfig(m=m, r=grid.r, scheme=RandomizationScheme(tag), s=s, master_seed=seed)
    return seed, replicate_values(f, cfg)


def run_experiment(grid: ExperimentGrid, workers: int = 1) -> list[ResultRow]:
    """One row per cell; STD rows average the replicates of the matching RLS cell."""
    cost = grid.cost()
    if cost > grid.budget:
        raise ValueError(f"grid needs {cost:.3e} coordinate evaluations, over the budget {grid.budget:.3e}")
    cells = grid.cells()
    jobs = sorted({(("RLS" if c[0] == "STD" else c[0]),) + c[1:] for c in cells}, key=lambda c: (SCHEME_ORDER.index(c[0]),) + c[1:])

    def work(job):
        return job, _run_cell(grid, *job)

    if workers == 1:
        done = dict(map(work, jobs))
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            done = dict(pool.map(work, jobs))
    rows = []
    for scheme, s, g, a, m in cells:
        seed, reps = done[("RLS" if scheme == "STD" else scheme, s, g, a, m)]
        est = mean_of(reps) if scheme == "STD" else median_of(reps)
        rows.append(ResultRow(scheme, s, g, a, m, grid.r, seed, est, abs(est - grid.reference_mean), reps))
    return rows


def fit_slope(rows: Iterable[ResultRow], m_lo: int, m_hi: int) -> float:
    """Least-squares slope of ``log2 abs_error`` against ``m`` on ``[m_lo, m_hi]``."""
    pts = [(r.m, r.abs_error) for r in rows if m_lo <= r.m <= m_hi]
    zeros = [m for m, e in pts if e == 0]
    if zeros:
        warnings.warn(f"dropping zero errors at m={zeros}", stacklevel=2)
    pts = [(m, e) for m, e in pts if e != 0]
    if len(pts) < 3:
        raise ValueError(f"need at least 3 nonzero errors to fit a slope, got {len(pts)}")
    m = np.array([p[0] for p in pts], dtype=float)
    y = np.log2([p[1] for p in pts])
    return float(np.polyfit(m, y, 1)[0])


def _fmt(x: float) -> str:
    return format(x, ".17g")


def emit_csv(rows: Sequence[ResultRow], path: str | Path) -> None:
    if not rows:
        raise ValueError("no rows to write")
    path = Path(path)
    try:
        with path.open("w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(CSV_HEADER)
            for r in rows:
                w.writerow([r.scheme, r.s, _fmt(r.gamma), r.alpha, r.m, r.r, r.seed, _fmt(r.estimate), _fmt(r.abs_error)])
    except OSError as exc:
        raise OSError(f"cannot write CSV to {path}: {exc}") from exc


def read_csv(path: str | Path) -> list[ResultRow]:
    with Path(path).open(newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        if tuple(header) != CSV_HEADER:
            raise ValueError(f"unexpected header {header}")
        return [
            ResultRow(sc, int(s), float(g), int(a), int(m), int(r), int(seed), float(est), float(err))
            for sc, s, g, a, m, r, seed, est, err in reader
        ]


def emit_replicates(rows: Sequence[ResultRow], path: str | Path) -> None:
    """Debug dump: one line per cell with its replicate values."""
    with Path(path).open("w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["scheme", "s", "gamma", "alpha", "m", "replicate", "value"])
        for r in rows:
            for i, v in enumerate(r.replicates):
                w.writerow([r.scheme, r.s, _fmt(r.gamma), r.alpha, r.m, i, _fmt(v)])


_COLORS = {"CRD": "#1f77b4", "RLS": "#d62728", "STD": "#2ca02c"}


def _curves(rows: Sequence[ResultRow]) -> dict[tuple, dict[str, list[tuple[int, float]]]]:
    groups: dict[tuple, dict[str, list[tuple[int, float]]]] = defaultdict(lambda: defaultdict(list))
    for r in rows:
        if r.abs_error > 0:
            groups[(r.gamma, r.alpha, r.s)][r.scheme].append((r.m, math.log2(r.abs_error)))
    return groups


def _svg(title: str, series: dict[str, list[tuple[int, float]]]) -> str:
    W, H, L, R, T, B = 640, 440, 70, 110, 40, 55
    pts = [p for line in series.values() for p in line]
    xs = [p[0] for p in pts] or [0, 1]
    ys = [p[1] for p in pts] or [0, 1]
    x0, x1 = min(xs), max(xs) if max(xs) > min(xs) else min(xs) + 1
    y0, y1 = math.floor(min(ys)), math.ceil(max(ys))
    if y1 == y0:
        y1 = y0 + 1

    def px(x):
        return L + (x - x0) / (x1 - x0) * (W - L - R)

    def py(y):
        return H - B - (y - y0) / (y1 - y0) * (H - T - B)

    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" viewBox="0 0 {W} {H}">',
        f'<rect width="{W}" height="{H}" fill="white"/>',
        f'<text x="{W / 2}" y="22" text-anchor="middle" font-size="15">{escape(title)}</text>',
        f'<line x1="{L}" y1="{H - B}" x2="{W - R}" y2="{H - B}" stroke="black"/>',
        f'<line x1="{L}" y1="{T}" x2="{L}" y2="{H - B}" stroke="black"/>',
        f'<text x="{(L + W - R) / 2}" y="{H - 15}" text-anchor="middle" font-size="13">m</text>',
        f'<text x="18" y="{(T + H - B) / 2}" text-anchor="middle" font-size="13" '
        f'transform="rotate(-90 18 {(T + H - B) / 2})">log2|error|</text>',
    ]
    for m in range(x0, x1 + 1):
        out.append(f'<text x="{px(m):.1f}" y="{H - B + 16}" text-anchor="middle" font-size="10">{m}</text>')
    step = max(1, (y1 - y0) // 10)
    for y in range(y0, y1 + 1, step):
        out.append(f'<text x="{L - 6}" y="{py(y) + 3:.1f}" text-anchor="end" font-size="10">{y}</text>')
    for i, scheme in enumerate(sorted(series, key=lambda s: SCHEME_ORDER.index(s) if s in SCHEME_ORDER else 99)):
        line = sorted(series[scheme])
        color = _COLORS.get(scheme, "black")
        coords = " ".join(f"{px(m):.2f},{py(y):.2f}" for m, y in line)
        out.append(f'<polyline fill="none" stroke="{color}" stroke-width="1.6" points="{coords}"/>')
        ly = T + 14 + 18 * i
        out.append(f'<line x1="{W - R + 10}" y1="{ly}" x2="{W - R + 35}" y2="{ly}" stroke="{color}" stroke-width="2"/>')
        out.append(f'<text x="{W - R + 40}" y="{ly + 4}" font-size="12">{escape(scheme)}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


def _stem(gamma: float, alpha: int, s: int) -> str:
    return f"errors_gamma{gamma:g}_alpha{alpha}_s{s}"


def emit_svg(rows: Sequence[ResultRow], out_dir: str | Path) -> list[Path]:
    """One SVG chart (plus a gnuplot ``.dat`` table) per ``(gamma, alpha, s)``."""
    if not rows:
        raise ValueError("no rows to plot")
    out_dir = Path(out_dir)
    try:
        out_dir.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise OSError(f"cannot create {out_dir}: {exc}") from exc
    written = []
    for (g, a, s), series in sorted(_curves(rows).items()):
        stem = _stem(g, a, s)
        svg_path = out_dir / f"{stem}.svg"
        svg_path.write_text(_svg(f"gamma={g:g}, alpha={a}, s={s}", series))
        schemes = sorted(series, key=lambda x: SCHEME_ORDER.index(x) if x in SCHEME_ORDER else 99)
        table = {sc: dict(series[sc]) for sc in schemes}
        ms = sorted({m for sc in schemes for m in table[sc]})
        lines = ["# m " + " ".join(f"log2err_{sc}" for sc in schemes)]
        for m in ms:
            lines.append(f"{m} " + " ".join(_fmt(table[sc][m]) if m in table[sc] else "NaN" for sc in schemes))
        (out_dir / f"{stem}.dat").write_text("\n".join(lines) + "\n")
        written.append(svg_path)
    return written
