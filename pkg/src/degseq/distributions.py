"""Laws of a positive integer degree D, described by the tail n -> P(D >= n).

Every family implements a vectorized ``_tail`` for ``n >= 2`` (``tail(1)``
is 1 by definition) and, where one exists, a closed-form inverse used by
the samplers. Sampling uses the quantile map

    D = max{n : P(D >= n) >= u},   u in (0, 1],

which gives ``P(D >= n) = tail(n)`` for uniform ``u``. The sorted sampler
feeds it ``u = 1 - exp(-T_i)`` with ``T_i`` the exponential spacings
partial sums, so ``D = g(1/T_i)``.
"""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field
from functools import cached_property
from pathlib import Path
from typing import Any, ClassVar, NamedTuple

import numpy as np
from scipy import special

from .core import DegreeSequence, SortedDegrees
from .errors import CapExceeded, DegenerateParity, InvalidTail

DEFAULT_CAP = 2**62
OVERFLOW = -1

# classifier thresholds
CONVERGE_REL = 1e-3
DIVERGE_RATIO = 2.0


@dataclass(frozen=True)
class TailSpec:
    """Base class for degree laws. Subclasses define ``_tail(n)`` for n >= 2."""

    support_max: int = field(default=DEFAULT_CAP, kw_only=True)

    family: ClassVar[str] = "tail"
    # lim n*P(D >= n) when known analytically (math.inf / 0.0 allowed)
    c_limit: ClassVar[float | None] = None
    _TABLE = 4096

    def __post_init__(self):
        if self.support_max < 1 or self.support_max > DEFAULT_CAP:
            raise InvalidTail(f"support_max must be in [1, 2**62], got {self.support_max}")
        self._validate()

    def _tail(self, n: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def tail(self, n):
        """P(D >= n); accepts scalars or arrays."""
        arr = np.asarray(n, dtype=np.float64)
        out = np.ones_like(arr)
        hi = arr >= 2
        if np.any(hi):
            out[hi] = self._tail(arr[hi])
        return float(out) if out.ndim == 0 else out

    def pmf(self, n):
        arr = np.asarray(n, dtype=np.float64)
        return self.tail(arr) - self.tail(arr + 1)

    def params(self) -> dict[str, Any]:
        return {}

    def to_config(self) -> dict[str, Any]:
        return {"family": self.family, "params": self.params(), "support_max": self.support_max}

    def limit_c(self) -> float | None:
        return self.c_limit

    def _validate(self) -> None:
        probe = np.unique(
            np.concatenate([np.arange(1, 65), np.round(np.logspace(2, 12, 41))])
        )
        t = self.tail(probe)
        if not np.all(np.isfinite(t)) or np.any(t < 0) or np.any(t > 1):
            raise InvalidTail(f"{self.family}: tail outside [0, 1]")
        if np.any(np.diff(t) > 1e-15):
            raise InvalidTail(f"{self.family}: tail is not nonincreasing")

    # -- inversion ---------------------------------------------------------

    def _quantile_float(self, u: np.ndarray) -> np.ndarray | None:
        """Closed-form quantile as float, or None to use the generic search."""
        return None

    @cached_property
    def _neg_table(self) -> np.ndarray:
        return -self.tail(np.arange(1, self._TABLE + 1, dtype=np.float64))

    def quantile(self, u) -> np.ndarray:
        """``max{n : tail(n) >= u}`` elementwise; ``OVERFLOW`` where it exceeds the cap."""
        u = np.asarray(u, dtype=np.float64)
        x = self._quantile_float(u)
        if x is not None:
            x = self._fixup(np.maximum(x, 1.0), u)
            over = ~(x <= self.support_max)
            d = np.where(over, 1.0, x).astype(np.int64)
            d[over] = OVERFLOW
            return d
        return self._quantile_search(u)

    def _fixup(self, x: np.ndarray, u: np.ndarray) -> np.ndarray:
        # closed forms can land one step off at exact boundaries
        fin = np.isfinite(x) & (x < 2.0**62)
        if not fin.all():
            x = x.copy()
            x[fin] = self._fixup(x[fin], u[fin] if u.shape == x.shape else u)
            return x
        up = self.tail(x + 1) >= u
        if up.any():
            x = np.where(up, x + 1, x)
        down = (x > 1) & (self.tail(x) < u)
        if down.any():
            x = np.where(down, x - 1, x)
        return x

    def _quantile_search(self, u: np.ndarray) -> np.ndarray:
        shape = u.shape
        u = u.ravel()
        table = self._neg_table
        k = table.size
        d = np.searchsorted(table, -u, side="right").astype(np.int64)
        d = np.maximum(d, 1)
        cap = min(self.support_max, DEFAULT_CAP)
        np.minimum(d, cap, out=d)
        deep = np.flatnonzero(d >= min(k, cap))
        if deep.size:
            d[deep] = self._search_beyond(u[deep], min(k, cap), cap)
        return d.reshape(shape)

    def _search_beyond(self, u: np.ndarray, start: int, cap: int) -> np.ndarray:
        lo = np.full(u.shape, start, dtype=np.int64)
        hi = np.full(u.shape, start, dtype=np.int64)
        active = np.ones(u.shape, dtype=bool)
        while True:
            nxt = np.where(hi > cap // 2, cap + 1, hi * 2)
            hi = np.where(active, nxt, hi)
            still = active & (hi <= cap) & (self.tail(hi.astype(np.float64)) >= u)
            lo = np.where(still, hi, lo)
            active = still
            if not active.any():
                break
        over = (hi > cap) & (self.tail(np.float64(cap + 1)) >= u)
        while True:
            gap = hi - lo > 1
            if not gap.any():
                break
            mid = lo + (hi - lo) // 2
            ok = self.tail(mid.astype(np.float64)) >= u
            lo = np.where(gap & ok, mid, lo)
            hi = np.where(gap & ~ok, mid, hi)
        lo[over] = OVERFLOW
        return lo


# -- families --------------------------------------------------------------


@dataclass(frozen=True)
class ExactCOverN(TailSpec):
    """tail(n) = min(1, c/n) for n >= 2."""

    c: float
    family: ClassVar[str] = "exact_c_over_n"

    def __post_init__(self):
        if not self.c > 0:
            raise InvalidTail("c must be positive")
        super().__post_init__()

    def _tail(self, n):
        return np.minimum(1.0, self.c / n)

    def _quantile_float(self, u):
        with np.errstate(divide="ignore"):
            return np.floor(self.c / u)

    def params(self):
        return {"c": self.c}

    def limit_c(self):
        return float(self.c)


@dataclass(frozen=True)
class PowerLawTail(TailSpec):
    """tail(n) = min(1, c * n**-alpha) for n >= 2."""

    c: float
    alpha: float
    family: ClassVar[str] = "power_law"

    def __post_init__(self):
        if not (self.c > 0 and self.alpha > 0):
            raise InvalidTail("c and alpha must be positive")
        super().__post_init__()

    def _tail(self, n):
        return np.minimum(1.0, self.c * n ** (-self.alpha))

    def _quantile_float(self, u):
        with np.errstate(divide="ignore", over="ignore"):
            return np.floor((self.c / u) ** (1.0 / self.alpha))

    def params(self):
        return {"c": self.c, "alpha": self.alpha}

    def limit_c(self):
        if self.alpha < 1:
            return math.inf
        return float(self.c) if self.alpha == 1 else 0.0


@dataclass(frozen=True)
class PerturbedCOverN(TailSpec):
    """tail(n) = c/n - 1/(n ln n) for large n, made monotone below.

    ``f(n) = c/n - 1/(n ln n)`` is decreasing only once ``ln n`` exceeds
    ``(1 + sqrt(1 + 4c)) / (2c)``. Below that point (and below ``n0``) the
    tail is the least nonincreasing majorant of ``f`` on ``[n0, inf)``,
    capped at 1.
    """

    c: float
    n0: int = 3
    family: ClassVar[str] = "perturbed_c_over_n"

    def __post_init__(self):
        if not self.c > 0 or self.n0 < 2:
            raise InvalidTail("need c > 0 and n0 >= 2")
        super().__post_init__()

    def _f(self, n):
        return self.c / n - 1.0 / (n * np.log(n))

    @cached_property
    def n_dec(self) -> int:
        log_star = (1 + math.sqrt(1 + 4 * self.c)) / (2 * self.c)
        return max(self.n0, math.floor(math.exp(log_star)) + 1)

    @cached_property
    def _majorant(self) -> np.ndarray:
        # entry i holds tail(i) for 2 <= i <= n_dec
        ns = np.arange(self.n0, self.n_dec + 1, dtype=np.float64)
        run = np.maximum.accumulate(self._f(ns)[::-1])[::-1]
        out = np.empty(self.n_dec + 1)
        out[: self.n0] = run[0]
        out[self.n0 :] = run
        return np.minimum(out, 1.0)

    def _tail(self, n):
        small = n <= self.n_dec
        out = np.empty_like(n)
        out[small] = self._majorant[n[small].astype(np.int64)]
        out[~small] = np.minimum(1.0, self._f(n[~small]))
        return out

    def _quantile_float(self, u):
        nd = self.n_dec
        x = np.empty_like(u)
        big = u <= self._majorant[nd]
        small = ~big
        if small.any():
            # descending majorant on 2..n_dec; tail(1) = 1 covers the rest
            neg = -self._majorant[2:]
            x[small] = 1 + np.searchsorted(neg, -u[small], side="right")
        if big.any():
            x[big] = self._invert_f(u[big])
        return x

    def _invert_f(self, u):
        c = self.c
        with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
            y = np.maximum(np.log(c / u), math.log(self.n_dec))
            for _ in range(50):
                h = np.log(c - 1.0 / y) - y - np.log(u)
                dh = 1.0 / (y * (c * y - 1.0)) - 1.0
                step = h / dh
                y = np.maximum(y - step, math.log(self.n_dec))
                if np.all(np.abs(step) < 1e-13 * y):
                    break
            x = np.floor(np.exp(y))
        ok = np.isfinite(x) & (x < 2.0**62)
        if ok.any():
            xs = x[ok]
            uo = u[ok]
            for _ in range(3):
                xs = np.where(self._f(xs + 1) >= uo, xs + 1, xs)
            for _ in range(3):
                xs = np.where((xs > self.n_dec) & (self._f(xs) < uo), xs - 1, xs)
            x[ok] = xs
        x[~ok] = np.inf
        return x

    def params(self):
        return {"c": self.c, "n0": self.n0}

    def limit_c(self):
        return float(self.c)


@dataclass(frozen=True)
class LogDamped(TailSpec):
    """tail(n) = min(1, 1/(n ln n)) for n >= n0 (infinite mean, bounded n ln n tail)."""

    n0: int = 2
    family: ClassVar[str] = "log_damped"
    c_limit: ClassVar[float] = 0.0

    def __post_init__(self):
        if self.n0 < 2:
            raise InvalidTail("n0 must be >= 2")
        super().__post_init__()

    def _tail(self, n):
        with np.errstate(divide="ignore"):
            return np.where(n < self.n0, 1.0, np.minimum(1.0, 1.0 / (n * np.log(n))))

    def _quantile_float(self, u):
        with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
            z = 1.0 / u
            w = special.lambertw(z).real
            x = np.floor(z / w)
            fin = np.isfinite(x) & (x < 2.0**62)
            xs = np.maximum(x[fin], 1.0)
            zs = z[fin]
            for _ in range(2):
                xs = np.where((xs + 1) * np.log(xs + 1) <= zs, xs + 1, xs)
            for _ in range(2):
                xs = np.where((xs >= 2) & (xs * np.log(xs) > zs), xs - 1, xs)
            x[fin] = np.maximum(xs, self.n0 - 1)
            x[~fin] = np.inf
        return x

    def params(self):
        return {"n0": self.n0}


@dataclass(frozen=True)
class Geometric(TailSpec):
    """P(D = n) = p (1-p)**(n-1) on {1, 2, ...}."""

    p: float
    family: ClassVar[str] = "geometric"
    c_limit: ClassVar[float] = 0.0

    def __post_init__(self):
        if not 0 < self.p <= 1:
            raise InvalidTail("p must be in (0, 1]")
        super().__post_init__()

    def _tail(self, n):
        return (1.0 - self.p) ** (n - 1)

    def _quantile_float(self, u):
        if self.p == 1:
            return np.ones_like(u)
        with np.errstate(divide="ignore"):
            return 1.0 + np.floor(np.log(u) / math.log1p(-self.p))

    def params(self):
        return {"p": self.p}


@dataclass(frozen=True)
class Zeta(TailSpec):
    """P(D = n) proportional to n**-beta, beta > 1."""

    beta: float
    family: ClassVar[str] = "zeta"

    def __post_init__(self):
        if not self.beta > 1:
            raise InvalidTail("beta must exceed 1")
        super().__post_init__()

    @cached_property
    def _norm(self) -> float:
        return float(special.zeta(self.beta, 1))

    def _tail(self, n):
        return np.minimum(1.0, special.zeta(self.beta, n) / self._norm)

    def params(self):
        return {"beta": self.beta}

    def limit_c(self):
        if self.beta < 2:
            return math.inf
        return 1.0 / self._norm if self.beta == 2 else 0.0


@dataclass(frozen=True)
class TableTail(TailSpec):
    """Explicit tail values for n = 1..K, then a continuation rule.

    ``continuation="zero"`` ends the support at K; ``"power"`` continues
    with ``tail(K) * (K/n)**alpha``.
    """

    values: tuple[float, ...]
    continuation: str = "zero"
    alpha: float = 1.0
    family: ClassVar[str] = "table"

    def __post_init__(self):
        vals = tuple(float(v) for v in self.values)
        object.__setattr__(self, "values", vals)
        if not vals or vals[0] != 1.0:
            raise InvalidTail("table must start with tail(1) = 1")
        if self.continuation not in ("zero", "power"):
            raise InvalidTail(f"unknown continuation {self.continuation!r}")
        if self.continuation == "power" and not self.alpha > 0:
            raise InvalidTail("alpha must be positive")
        super().__post_init__()

    def _tail(self, n):
        k = len(self.values)
        table = np.asarray(self.values)
        inside = n <= k
        out = np.empty_like(n)
        out[inside] = table[n[inside].astype(np.int64) - 1]
        if self.continuation == "zero":
            out[~inside] = 0.0
        else:
            out[~inside] = table[-1] * (k / n[~inside]) ** self.alpha
        return out

    def params(self):
        return {"values": list(self.values), "continuation": self.continuation, "alpha": self.alpha}

    def limit_c(self):
        if self.continuation == "zero" or self.values[-1] == 0:
            return 0.0
        if self.alpha < 1:
            return math.inf
        return self.values[-1] * len(self.values) if self.alpha == 1 else 0.0


def point_mass(k: int) -> TableTail:
    """D == k almost surely."""
    if k < 1:
        raise InvalidTail("point mass must sit on a positive integer")
    return TableTail(tuple([1.0] * k))


FAMILIES: dict[str, type[TailSpec]] = {
    cls.family: cls
    for cls in (ExactCOverN, PowerLawTail, PerturbedCOverN, LogDamped, Geometric, Zeta, TableTail)
}
_ALIASES = {
    "exactcovern": "exact_c_over_n",
    "powerlawtail": "power_law",
    "perturbedcovern": "perturbed_c_over_n",
    "logdamped": "log_damped",
}


def family_from_config(cfg: dict[str, Any]) -> TailSpec:
    """Build a family from ``{"family": name, "params": {...}, "support_max": int?}``."""
    if not isinstance(cfg, dict) or "family" not in cfg:
        raise InvalidTail("config needs a 'family' key")
    unknown = set(cfg) - {"family", "params", "support_max"}
    if unknown:
        raise InvalidTail(f"unknown config keys: {sorted(unknown)}")
    name = str(cfg["family"]).strip()
    key = name.lower()
    key = _ALIASES.get(key.replace("_", ""), key)
    params = dict(cfg.get("params") or {})
    extra = {}
    if cfg.get("support_max") is not None:
        extra["support_max"] = int(cfg["support_max"])
    if key == "point_mass":
        fam = point_mass(int(params.pop("k")))
        if params:
            raise InvalidTail(f"unexpected params for point_mass: {sorted(params)}")
        return TableTail(fam.values, **extra) if extra else fam
    if key not in FAMILIES:
        raise InvalidTail(f"unknown family {name!r}; known: {sorted(FAMILIES) + ['point_mass']}")
    if key == "table" and "values" in params:
        params["values"] = tuple(params["values"])
    try:
        return FAMILIES[key](**params, **extra)
    except TypeError as exc:
        raise InvalidTail(f"bad params for {key}: {exc}") from None


def load_dist_config(path: str | Path) -> TailSpec:
    try:
        cfg = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise InvalidTail(f"{path}: invalid JSON ({exc})") from None
    return family_from_config(cfg)


# -- pointwise operations --------------------------------------------------


def pmf(t: TailSpec, n: int) -> float:
    if n < 1:
        raise ValueError("n must be >= 1")
    p = t.pmf(n)
    if p < 0:
        raise InvalidTail(f"negative mass {p} at n={n}")
    return float(p)


def g_inverse(t: TailSpec, n: int) -> float:
    """``-1/ln(1 - P(D >= n))``: the threshold where g(u) reaches n (0 if tail(n) = 1)."""
    q = t.tail(n)
    if q >= 1.0:
        return 0.0
    if q <= 0.0:
        return math.inf
    return -1.0 / math.log1p(-q)


def g_of(t: TailSpec, x: float) -> int:
    """``max{n >= 1 : g_inverse(n) <= x}``; right-continuous and nondecreasing in x."""
    if not x > 0:
        raise ValueError("x must be positive")
    cap = t.support_max
    lo, hi = 1, 2
    while g_inverse(t, hi) <= x:
        if hi > cap:
            raise CapExceeded(f"g({x}) exceeds support_max={cap}")
        lo, hi = hi, 2 * hi
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if g_inverse(t, mid) <= x:
            lo = mid
        else:
            hi = mid
    if lo > cap:
        raise CapExceeded(f"g({x}) exceeds support_max={cap}")
    return lo


# -- samplers --------------------------------------------------------------


def _check_cap(d: np.ndarray, t: TailSpec) -> np.ndarray:
    if np.any(d == OVERFLOW):
        raise CapExceeded(f"a draw exceeded support_max={t.support_max}")
    return d


def iid_from_uniform(t: TailSpec, u: np.ndarray) -> np.ndarray:
    """Map uniforms in (0, 1] to i.i.d. degrees (``OVERFLOW`` marks capped draws)."""
    return t.quantile(u)


def spacing_weights(n: int) -> np.ndarray:
    """``1/(n - l + 1)`` for l = 1..n."""
    return 1.0 / np.arange(n, 0, -1, dtype=np.float64)


def renyi_from_exponential(t: TailSpec, x: np.ndarray) -> np.ndarray:
    """Sorted degrees ``g(1/T_i)`` from unit exponentials along the last axis."""
    x = np.asarray(x, dtype=np.float64)
    T = np.cumsum(x * spacing_weights(x.shape[-1]), axis=-1)
    return t.quantile(-np.expm1(-T))


def draw_iid(t: TailSpec, n: int, rng: np.random.Generator) -> np.ndarray:
    u = 1.0 - rng.random(n)
    return _check_cap(iid_from_uniform(t, u), t)


def draw_renyi(t: TailSpec, n: int, rng: np.random.Generator) -> np.ndarray:
    return _check_cap(renyi_from_exponential(t, rng.standard_exponential(n)), t)


def sample_iid(t: TailSpec, n: int, rng: np.random.Generator) -> DegreeSequence:
    if n < 1:
        raise ValueError("n must be >= 1")
    return DegreeSequence(draw_iid(t, n, rng).tolist())


def sample_sorted_renyi(t: TailSpec, n: int, rng: np.random.Generator) -> SortedDegrees:
    if n < 1:
        raise ValueError("n must be >= 1")
    return SortedDegrees.from_sorted(draw_renyi(t, n, rng).tolist())


# -- series ----------------------------------------------------------------


class ParitySeries(NamedTuple):
    r: float
    terms: int
    remainder_bound: float


def parity_series(t: TailSpec, tol: float = 1e-14, n_max: int = 10**9) -> ParitySeries:
    """Sum ``E(-1)**D = sum_n (-1)**n pmf(n)`` with a recorded stopping point.

    Stops once ``tail(N+1) < tol`` (bounds any remainder), or ``pmf(N+1) < tol``
    while pmf is nonincreasing (alternating-series bound), or at ``n_max``.
    """
    total = 0.0
    start = 1
    size = 1024
    while True:
        stop = min(start + size, n_max + 1)
        ns = np.arange(start, stop, dtype=np.float64)
        p = t.pmf(ns)
        sign = np.where(ns % 2 == 0, 1.0, -1.0)
        total += math.fsum(sign * p)
        nxt = float(stop)
        tail_rest = t.tail(nxt)
        p_next = float(t.pmf(nxt))
        monotone = bool(np.all(np.diff(np.append(p, p_next)) <= 0))
        if tail_rest < tol:
            return ParitySeries(total, stop - 1, tail_rest)
        if monotone and p_next < tol:
            return ParitySeries(total, stop - 1, p_next)
        if stop > n_max:
            return ParitySeries(total, n_max, p_next if monotone else tail_rest)
        start = stop
        size *= 2


def parity_bias(t: TailSpec, tol: float = 1e-14, n_max: int = 10**9) -> float:
    """``r = E(-1)**D``; the sum of n draws is even with probability ``(1 + r**n)/2``."""
    r = parity_series(t, tol, n_max).r
    if abs(r) >= 1 - 1e-12:
        raise DegenerateParity(f"P(D even) is {'1' if r > 0 else '0'}")
    return r


def prob_even_sum(t: TailSpec, n: int) -> float:
    return 0.5 * (1.0 + parity_bias(t) ** n)


_MOMENT_WEIGHTS = {
    1: lambda l: np.ones_like(l),
    2: lambda l: 2 * l - 1,
    3: lambda l: 3 * l * l - 3 * l + 1,
    4: lambda l: 4 * l**3 - 6 * l * l + 4 * l - 1,
}


def truncated_moment(t: TailSpec, j: int, k: int) -> float:
    """``E[min(j, D)**k] = sum_{l<=j} (l**k - (l-1)**k) P(D >= l)``."""
    if j < 1:
        raise ValueError("j must be >= 1")
    if k not in _MOMENT_WEIGHTS:
        raise ValueError("k must be 1, 2, 3 or 4")
    l = np.arange(1, j + 1, dtype=np.int64)
    w = _MOMENT_WEIGHTS[k](l).astype(np.float64)
    return math.fsum(w * t.tail(l.astype(np.float64)))


# -- regime classifier -----------------------------------------------------


@dataclass
class RegimeReport:
    family: dict[str, Any]
    N: int
    grid: list[int]
    nP_trend: list[float]
    c_hat: float | str
    c_source: str
    sum_start: int | None
    partial_sum_12: float | None
    partial_sum_12_trend: list[float] | None
    abs_sum_14: float | None
    abs_sum_14_trend: list[float] | None
    window_start: int
    n2pmf_window: list[float]
    sup_15: float
    sup_15_bounded: bool
    mean: float | str
    mean_trend: list[float]
    label: str
    trace: list[str]
    thresholds: dict[str, float] = field(
        default_factory=lambda: {"converge_rel": CONVERGE_REL, "diverge_ratio": DIVERGE_RATIO}
    )
    note: str = "labels are numerical diagnostics on a finite probe range, not proofs"

    def to_dict(self) -> dict[str, Any]:
        return asdict(self)


def _grid(N: int) -> list[int]:
    g = []
    v = 10
    while v <= N:
        g.append(v)
        v *= 10
    if g[-1] != N:
        g.append(N)
    return g


def _converged(seq: list[float]) -> bool:
    a, b = seq[-2], seq[-1]
    return abs(b - a) <= CONVERGE_REL * max(abs(b), 1e-300) or abs(b - a) < 1e-15


def _scan(t: TailSpec, N: int, grid: list[int], c: float | None, start: int, window_start: int):
    """One chunked pass over n = 1..N accumulating every classifier sum."""
    marks = {g: i for i, g in enumerate(grid)}
    mean = [0.0] * len(grid)
    s12 = [0.0] * len(grid)
    s14 = [0.0] * len(grid)
    acc_mean = acc12 = acc14 = 0.0
    sup_early = sup_late = 0.0
    late_from = max(2, N // 10)
    w_lo, w_hi = math.inf, -math.inf
    chunk = 1 << 20
    bounds = sorted(set(grid))
    lo = 1
    for hi in bounds:
        while lo <= hi:
            top = min(lo + chunk - 1, hi)
            ns = np.arange(lo, top + 1, dtype=np.float64)
            tl = t.tail(ns)
            acc_mean += math.fsum(tl)
            m = ns >= 2
            if m.any():
                v = ns[m] * np.log(ns[m]) * tl[m]
                early = ns[m] < late_from
                if early.any():
                    sup_early = max(sup_early, float(v[early].max()))
                if (~early).any():
                    sup_late = max(sup_late, float(v[~early].max()))
            if c is not None:
                s = ns >= start
                d = c / ns[s] - tl[s]
                acc12 += math.fsum(d)
                acc14 += math.fsum(np.abs(d))
            w = ns >= window_start
            if w.any():
                q = ns[w] ** 2 * t.pmf(ns[w])
                w_lo = min(w_lo, float(q.min()))
                w_hi = max(w_hi, float(q.max()))
            lo = top + 1
        i = marks[hi]
        mean[i], s12[i], s14[i] = acc_mean, acc12, acc14
    return mean, s12, s14, sup_early, sup_late, [w_lo, w_hi]


def classify_regime(fam: TailSpec, N: int = 10**6, window_start: int = 10**3) -> RegimeReport:
    """Diagnose which tail condition a family meets, by evaluation up to N.

    Decision order: (d) mean converges or ``n ln n tail(n)`` stops growing;
    (a) ``n tail(n)`` at least doubles per decade; with a finite positive
    limit c, (b) if ``sum (c/n - tail)`` keeps increasing, (c) if
    ``sum |c/n - tail|`` converges and ``n^2 pmf(n)`` stays in a positive band.
    """
    if N < 1000:
        raise ValueError("N must be at least 1000")
    window_start = min(window_start, N // 10)
    grid = _grid(N)
    trace: list[str] = []
    v = [float(g * fam.tail(g)) for g in grid]
    declared = fam.limit_c()

    c_hat: float | str
    c_source = "numeric"
    ratios = [b / a if a > 0 else math.inf for a, b in zip(v, v[1:])]
    if v[-1] < 1e-12 or all(r <= 1 / DIVERGE_RATIO for r in ratios[-2:]):
        c_hat = "->0"
    elif all(r >= DIVERGE_RATIO for r in ratios[-2:]):
        c_hat = "diverges"
    elif _converged(v):
        c_hat = v[-1]
    elif declared is not None:
        c_source = "declared"
        c_hat = declared if 0 < declared < math.inf else ("->0" if declared == 0 else "diverges")
    else:
        c_hat, c_source = "undetermined", "none"
    trace.append(f"n*tail(n) on grid: {['%.6g' % x for x in v]} -> c_hat={c_hat} ({c_source})")

    c = c_hat if isinstance(c_hat, float) else None
    start = max(2, math.floor(c) + 1) if c is not None else None
    mean_tr, s12, s14, sup_early, sup_late, window = _scan(fam, N, grid, c, start or 2, window_start)

    mean_conv = _converged(mean_tr)
    mean: float | str = mean_tr[-1] if mean_conv else "diverges"
    sup_bounded = sup_late <= (1 + CONVERGE_REL) * sup_early
    trace.append(f"mean partial sums {'converge' if mean_conv else 'do not converge'} (last {mean_tr[-1]:.6g})")
    trace.append(
        f"sup n ln n tail(n): early {sup_early:.6g}, last decade {sup_late:.6g} -> "
        f"{'bounded' if sup_bounded else 'growing'}"
    )

    label = "inconclusive"
    if mean_conv or sup_bounded:
        label = "d"
        trace.append("rule (d): finite mean or bounded n ln n tail(n)")
    elif c_hat == "diverges":
        label = "a"
        trace.append("rule (a): n tail(n) doubles every decade")
    elif c is not None:
        s12_inc = all(b > a for a, b in zip(s12[-3:], s12[-2:]))
        if not _converged(s12) and s12_inc:
            label = "b"
            trace.append(f"rule (b): sum (c/n - tail) still increasing ({s12[-2]:.6g} -> {s12[-1]:.6g})")
        else:
            band = window[0] > 0 and math.isfinite(window[1])
            band = band and window[1] / window[0] <= 4.0
            if _converged(s14) and band:
                label = "c"
                trace.append(f"rule (c): sum |c/n - tail| converged, n^2 pmf in [{window[0]:.6g}, {window[1]:.6g}]")
            else:
                trace.append("rules (b)/(c) not met")
    else:
        trace.append("no finite positive limit for n tail(n); no rule applies")

    return RegimeReport(
        family=fam.to_config(),
        N=N,
        grid=grid,
        nP_trend=v,
        c_hat=c_hat,
        c_source=c_source,
        sum_start=start,
        partial_sum_12=s12[-1] if c is not None else None,
        partial_sum_12_trend=s12 if c is not None else None,
        abs_sum_14=s14[-1] if c is not None else None,
        abs_sum_14_trend=s14 if c is not None else None,
        window_start=window_start,
        n2pmf_window=window,
        sup_15=max(sup_early, sup_late),
        sup_15_bounded=sup_bounded,
        mean=mean,
        mean_trend=mean_tr,
        label=label,
        trace=trace,
    )
