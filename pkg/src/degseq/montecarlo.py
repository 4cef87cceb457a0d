"""Monte Carlo estimation of P(i.i.d. degree sequence is graphical) and sampler checks.

Every trial draws from its own Philox stream keyed by the experiment seed,
with the counter's high words set to ``(trial_index, n)``. Results therefore
do not depend on chunking or on how many worker processes run.
"""

from __future__ import annotations

import csv
import io
import json
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path
from statistics import NormalDist
from typing import Any, NamedTuple, Sequence

import numpy as np

from .core import erdos_gallai_batch
from .distributions import OVERFLOW, TailSpec, parity_bias, renyi_from_exponential
from .errors import CapExceeded

SAMPLERS = ("iid", "renyi")
CSV_COLUMNS = [
    "n",
    "trials",
    "graphical",
    "even_sum",
    "graphical_given_even",
    "p_hat",
    "ci_low",
    "ci_high",
    "overflow",
]
_CHUNK_ELEMS = 1 << 20
_MASK64 = (1 << 64) - 1


def trial_rng(seed: int, n: int, trial: int) -> np.random.Generator:
    """Independent stream for trial ``trial`` of cell ``n``."""
    counter = np.array([0, 0, trial & _MASK64, n & _MASK64], dtype=np.uint64)
    return np.random.Generator(np.random.Philox(key=seed & _MASK64, counter=counter))


@dataclass(frozen=True)
class ExperimentConfig:
    family: TailSpec
    n_grid: tuple[int, ...]
    trials: int
    seed: int
    workers: int = 1
    sampler: str = "renyi"
    confidence: float = 0.95

    def __post_init__(self):
        grid = tuple(int(n) for n in self.n_grid)
        object.__setattr__(self, "n_grid", grid)
        if not grid or any(n < 1 for n in grid):
            raise ValueError("n_grid must be a nonempty list of positive integers")
        if any(a >= b for a, b in zip(grid, grid[1:])):
            raise ValueError("n_grid must be strictly increasing")
        if self.trials < 1:
            raise ValueError("trials must be >= 1")
        if self.workers < 1:
            raise ValueError("workers must be >= 1")
        if self.sampler not in SAMPLERS:
            raise ValueError(f"sampler must be one of {SAMPLERS}")
        if not 0 < self.confidence < 1:
            raise ValueError("confidence must be in (0, 1)")
        if not 0 <= self.seed <= _MASK64:
            raise ValueError("seed must be an unsigned 64-bit integer")

    def to_dict(self, include_workers: bool = True) -> dict[str, Any]:
        d = {
            "dist": self.family.to_config(),
            "n_grid": list(self.n_grid),
            "trials": self.trials,
            "seed": self.seed,
            "sampler": self.sampler,
            "confidence": self.confidence,
        }
        if include_workers:
            d["workers"] = self.workers
        return d


@dataclass
class EstimateRow:
    n: int
    trials: int
    graphical: int
    even_sum: int
    graphical_given_even: int
    eg_holds: int
    max_degree_violations: int
    overflow: int
    p_hat: float
    ci_low: float
    ci_high: float


@dataclass
class EstimateSeries:
    config: ExperimentConfig
    rows: list[EstimateRow] = field(default_factory=list)

    def row(self, n: int) -> EstimateRow:
        for r in self.rows:
            if r.n == n:
                return r
        raise KeyError(n)

    def to_csv(self) -> str:
        buf = io.StringIO()
        buf.write("# config: " + json.dumps(self.config.to_dict(include_workers=False), sort_keys=True) + "\n")
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(CSV_COLUMNS)
        for r in self.rows:
            w.writerow([repr(v) if isinstance(v, float) else v for v in (getattr(r, c) for c in CSV_COLUMNS)])
        return buf.getvalue()

    def to_json(self) -> dict[str, Any]:
        return {"config": self.config.to_dict(), "rows": [asdict(r) for r in self.rows]}


def wilson_ci(successes: int, trials: int, confidence: float = 0.95) -> tuple[float, float]:
    """Wilson score interval for a binomial proportion."""
    if trials < 1 or not 0 <= successes <= trials:
        raise ValueError("need 0 <= successes <= trials and trials >= 1")
    z = NormalDist().inv_cdf(0.5 + confidence / 2)
    p = successes / trials
    z2n = z * z / trials
    center = (p + z2n / 2) / (1 + z2n)
    half = z / (1 + z2n) * math.sqrt(p * (1 - p) / trials + z2n / (4 * trials))
    lo = 0.0 if successes == 0 else max(0.0, min(center - half, p))
    hi = 1.0 if successes == trials else min(1.0, max(center + half, p))
    return lo, hi


class CellCounts(NamedTuple):
    graphical: int
    even_sum: int
    eg_holds: int
    max_degree_violations: int
    overflow: int


def _draw_batch(family: TailSpec, sampler: str, seed: int, n: int, start: int, stop: int) -> np.ndarray:
    buf = np.empty((stop - start, n))
    for row, t in enumerate(range(start, stop)):
        rng = trial_rng(seed, n, t)
        if sampler == "iid":
            rng.random(out=buf[row])
        else:
            rng.standard_exponential(out=buf[row])
    if sampler == "iid":
        d = family.quantile(1.0 - buf)
        d.sort(axis=1)
        return d[:, ::-1]
    return renyi_from_exponential(family, buf)


def _run_chunk(family: TailSpec, sampler: str, seed: int, n: int, start: int, stop: int) -> CellCounts:
    d = _draw_batch(family, sampler, seed, n, start, stop)
    over = np.any(d == OVERFLOW, axis=1)
    ok = ~over
    even = ((d & 1).sum(axis=1) % 2 == 0) & ok
    maxviol = (d[:, 0] >= n) & ok
    clipped = np.minimum(d, n)
    clipped[over] = 0
    eg = erdos_gallai_batch(clipped) & ok
    return CellCounts(
        graphical=int(np.count_nonzero(eg & even)),
        even_sum=int(np.count_nonzero(even)),
        eg_holds=int(np.count_nonzero(eg)),
        max_degree_violations=int(np.count_nonzero(maxviol)),
        overflow=int(np.count_nonzero(over)),
    )


def _run_task(args) -> tuple[int, CellCounts]:
    family, sampler, seed, n, start, stop = args
    return n, _run_chunk(family, sampler, seed, n, start, stop)


def _tasks(cfg: ExperimentConfig):
    for n in cfg.n_grid:
        # at least one chunk per worker; results never depend on the split
        size = max(1, min(-(-cfg.trials // cfg.workers), _CHUNK_ELEMS // n))
        for start in range(0, cfg.trials, size):
            yield (cfg.family, cfg.sampler, cfg.seed, n, start, min(start + size, cfg.trials))


def estimate_graphical_prob(cfg: ExperimentConfig) -> EstimateSeries:
    """Estimate P(graphical) at every grid point.

    Trials whose draw exceeds ``support_max`` count as not graphical and are
    tallied in ``overflow``.
    """
    totals = {n: [0] * 5 for n in cfg.n_grid}
    tasks = list(_tasks(cfg))
    if cfg.workers == 1:
        results = map(_run_task, tasks)
        _merge(totals, results)
    else:
        with ProcessPoolExecutor(max_workers=cfg.workers) as pool:
            _merge(totals, pool.map(_run_task, tasks))
    series = EstimateSeries(cfg)
    for n in cfg.n_grid:
        g, ev, eg, mv, ov = totals[n]
        lo, hi = wilson_ci(g, cfg.trials, cfg.confidence)
        series.rows.append(
            EstimateRow(
                n=n,
                trials=cfg.trials,
                graphical=g,
                even_sum=ev,
                graphical_given_even=g,
                eg_holds=eg,
                max_degree_violations=mv,
                overflow=ov,
                p_hat=g / cfg.trials,
                ci_low=lo,
                ci_high=hi,
            )
        )
    return series


def _merge(totals, results) -> None:
    for n, counts in results:
        acc = totals[n]
        for i, v in enumerate(counts):
            acc[i] += v


def write_results(series: EstimateSeries, stem: str | Path, fmt: str = "both") -> list[Path]:
    stem = Path(stem)
    if stem.suffix in (".csv", ".json"):
        stem = stem.with_suffix("")
    out = []
    if fmt in ("csv", "both"):
        p = stem.with_suffix(".csv")
        p.write_text(series.to_csv())
        out.append(p)
    if fmt in ("json", "both"):
        p = stem.with_suffix(".json")
        p.write_text(json.dumps(series.to_json(), indent=2, sort_keys=True) + "\n")
        out.append(p)
    return out


# -- distributional checks -------------------------------------------------


class KSResult(NamedTuple):
    statistic: float
    pvalue: float


def kolmogorov_sf(lam: float, terms: int = 100) -> float:
    """P(K > lam) for the Kolmogorov distribution, series truncated at ``terms``."""
    if lam <= 0:
        return 1.0
    k = np.arange(1, terms + 1, dtype=np.float64)
    s = 2.0 * np.sum((-1.0) ** (k - 1) * np.exp(-2.0 * k * k * lam * lam))
    return float(min(1.0, max(0.0, s)))


def ks_two_sample(a: Sequence[float], b: Sequence[float]) -> KSResult:
    """Two-sample Kolmogorov–Smirnov statistic with the asymptotic p-value."""
    a = np.sort(np.asarray(a, dtype=np.float64))
    b = np.sort(np.asarray(b, dtype=np.float64))
    if a.size == 0 or b.size == 0:
        raise ValueError("both samples must be nonempty")
    pts = np.concatenate([a, b])
    fa = np.searchsorted(a, pts, side="right") / a.size
    fb = np.searchsorted(b, pts, side="right") / b.size
    d = float(np.max(np.abs(fa - fb)))
    en = math.sqrt(a.size * b.size / (a.size + b.size))
    return KSResult(d, kolmogorov_sf(en * d))


def _ecdf_sup_distance(sample: np.ndarray, cdf) -> float:
    """sup_x |ECDF(x) - F(x)| for integer-valued data and a CDF with integer jumps."""
    vals, counts = np.unique(sample, return_counts=True)
    ecdf = np.cumsum(counts) / sample.size
    prev = np.concatenate([[0.0], ecdf[:-1]])
    at = np.abs(ecdf - cdf(vals))
    before = np.abs(prev - cdf(vals - 1))
    return float(max(at.max(), before.max()))


def max_cdf(t: TailSpec, n: int, x) -> np.ndarray:
    """P(max of n draws <= x) = (1 - tail(floor(x) + 1))**n."""
    x = np.floor(np.asarray(x, dtype=np.float64))
    q = np.minimum(t.tail(x + 1), 1.0)
    with np.errstate(divide="ignore"):
        return np.where(x < 1, 0.0, np.exp(n * np.log1p(-q)))


def sample_maxima(t: TailSpec, n: int, draws: int, rng: np.random.Generator, sampler: str = "iid") -> np.ndarray:
    if sampler == "renyi":
        x = rng.standard_exponential(draws) / n
        m = t.quantile(-np.expm1(-x))
    else:
        m = np.empty(draws, dtype=np.int64)
        rows = max(1, _CHUNK_ELEMS // n)
        for s in range(0, draws, rows):
            e = min(s + rows, draws)
            d = t.quantile(1.0 - rng.random((e - s, n)))
            d[d == OVERFLOW] = np.iinfo(np.int64).max
            m[s:e] = d.max(axis=1)
        m[m == np.iinfo(np.int64).max] = OVERFLOW
    if np.any(m == OVERFLOW):
        raise CapExceeded(f"a maximum exceeded support_max={t.support_max}")
    return m


class MaxLawResult(NamedTuple):
    sup_distance: float
    band: float
    passed: bool
    n: int
    draws: int


def max_law_check(
    t: TailSpec, n: int, draws: int, rng: np.random.Generator, sampler: str = "iid"
) -> MaxLawResult:
    """Compare the empirical law of the sample maximum with its closed form (KS 99% band)."""
    if draws < 1000:
        raise ValueError("draws must be >= 1000")
    m = sample_maxima(t, n, draws, rng, sampler)
    dist = _ecdf_sup_distance(m, lambda x: max_cdf(t, n, x))
    band = 1.63 / math.sqrt(draws)
    return MaxLawResult(dist, band, dist <= band, n, draws)


class LimitLawResult(NamedTuple):
    sup_distance: float
    threshold: float
    passed: bool
    c: float


def scaled_max_limit_check(
    t: TailSpec,
    n: int,
    draws: int,
    rng: np.random.Generator,
    threshold: float = 0.02,
    probe: np.ndarray | None = None,
) -> LimitLawResult:
    """Distance between the law of max/n and the Fréchet limit ``exp(-c/x)``.

    The maximum is drawn as the first sorted component, ``g(n/X)`` with X a
    unit exponential, so large n costs one draw per repetition.
    """
    c = t.limit_c()
    if c is None or not 0 < c < math.inf:
        raise ValueError(f"{t.family}: needs a finite positive lim n*tail(n)")
    scaled = np.sort(sample_maxima(t, n, draws, rng, sampler="renyi") / n)
    if probe is None:
        probe = np.logspace(-2, 3, 501) * c
    ecdf = np.searchsorted(scaled, probe, side="right") / draws
    dist = float(np.max(np.abs(ecdf - np.exp(-c / probe))))
    return LimitLawResult(dist, threshold, dist <= threshold, float(c))


class ParityCheckResult(NamedTuple):
    frequency: float
    exact: float
    sigma: float
    passed: bool
    r: float
    n: int
    trials: int


def even_sum_frequency(t: TailSpec, n: int, trials: int, rng: np.random.Generator) -> float:
    even = 0
    rows = max(1, _CHUNK_ELEMS // n)
    for s in range(0, trials, rows):
        e = min(s + rows, trials)
        d = t.quantile(1.0 - rng.random((e - s, n)))
        if np.any(d == OVERFLOW):
            raise CapExceeded(f"a draw exceeded support_max={t.support_max}")
        even += int(np.count_nonzero((d & 1).sum(axis=1) % 2 == 0))
    return even / trials


def parity_check(t: TailSpec, n: int, trials: int, rng: np.random.Generator) -> ParityCheckResult:
    """Monte Carlo even-sum frequency against the exact ``(1 + r**n)/2`` (3 sigma band)."""
    r = parity_bias(t)
    exact = 0.5 * (1.0 + r**n)
    freq = even_sum_frequency(t, n, trials, rng)
    sigma = math.sqrt(exact * (1 - exact) / trials)
    return ParityCheckResult(freq, exact, sigma, abs(freq - exact) <= 3 * sigma, r, n, trials)
