"""Constructive realization of graphical sequences and a brute-force oracle."""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from itertools import combinations
from pathlib import Path
from typing import Iterable

import numpy as np

from .core import (
    DegreeSequence,
    SortedDegrees,
    as_sequence,
    erdos_gallai_ok,
    sort_desc,
)
from .errors import DegreeFileError, NoSwapPair, NotGraphical, TooLarge

ORACLE_MAX_N = 7


@dataclass(frozen=True)
class SimpleGraph:
    """Undirected graph on vertices ``0..n-1``; edges stored as ``(u, v)`` with ``u < v``."""

    n: int
    edges: frozenset[tuple[int, int]]

    def __init__(self, n: int, edges: Iterable[tuple[int, int]]):
        norm = set()
        for u, v in edges:
            u, v = int(u), int(v)
            if u == v:
                raise ValueError(f"self-loop at vertex {u}")
            if not (0 <= u < n and 0 <= v < n):
                raise ValueError(f"edge ({u}, {v}) outside 0..{n - 1}")
            norm.add((u, v) if u < v else (v, u))
        object.__setattr__(self, "n", int(n))
        object.__setattr__(self, "edges", frozenset(norm))

    @property
    def degree(self) -> tuple[int, ...]:
        deg = [0] * self.n
        for u, v in self.edges:
            deg[u] += 1
            deg[v] += 1
        return tuple(deg)

    def relabel(self, mapping) -> "SimpleGraph":
        return SimpleGraph(self.n, ((mapping[u], mapping[v]) for u, v in self.edges))


def _peel(values: list[int]) -> list[tuple[int, int]]:
    """Reduce a sorted sequence to all zeros, returning the (j, last) pairs used.

    Decrementing the last entry of the maximal block and the last positive
    entry never breaks the nonincreasing order, so positions stay fixed and
    no re-sorting is needed.
    """
    m = list(values)
    cnt: dict[int, int] = {}
    for v in m:
        cnt[v] = cnt.get(v, 0) + 1
    positive = sum(1 for v in m if v > 0)
    top = m[0] if m else 0
    steps = []
    while positive:
        last = positive - 1
        j = cnt[top] - 1
        if j == last:
            # all positive entries equal: pair the last two of them
            j = last - 1
            if j < 0:
                raise NotGraphical("single vertex of positive degree")
        for p in (j, last):
            v = m[p]
            cnt[v] -= 1
            cnt[v - 1] = cnt.get(v - 1, 0) + 1
            m[p] = v - 1
            if v == 1:
                positive -= 1
        while top > 0 and cnt.get(top, 0) == 0:
            top -= 1
        steps.append((j, last))
    return steps


def _peel_checked(values: list[int]) -> list[tuple[int, int]]:
    m = list(values)
    steps = _peel(values)
    for j, last in steps:
        m[j] -= 1
        m[last] -= 1
        if sum(m) % 2 or not erdos_gallai_ok(SortedDegrees.from_sorted(m)):
            raise NotGraphical(f"reduced sequence fails Erdős–Gallai: {m}")
    return steps


def _find_swap(adj: list[set[int]], j: int, last: int) -> tuple[int, int]:
    nj, nl = adj[j], adj[last]
    for a in range(len(adj)):
        if a == j or a == last or a in nj:
            continue
        cands = [b for b in adj[a] if b != last and b not in nl]
        if cands:
            return a, min(cands)
    raise NoSwapPair(f"no edge (a, b) available to repair edge ({j}, {last})")


def choudum_realize(sorted_: SortedDegrees, check_steps: bool = False) -> SimpleGraph:
    """Build a simple graph whose vertex ``i`` has degree ``sorted_.values[i]``.

    Peels the sequence down to zeros, then replays the steps backwards: each
    lift either adds edge (j, last) or, when it is already present, trades
    edges (j, last) and (a, b) for (j, a), (last, b) and (j, last).

    ``check_steps`` re-runs the Erdős–Gallai test on every reduced
    sequence (O(n) per step).
    """
    values = list(sorted_.values)
    if sum(values) % 2 or not erdos_gallai_ok(sorted_):
        raise NotGraphical(f"sequence is not graphical: {values}")
    steps = _peel_checked(values) if check_steps else _peel(values)
    adj: list[set[int]] = [set() for _ in values]
    for j, last in reversed(steps):
        if last not in adj[j]:
            adj[j].add(last)
            adj[last].add(j)
            continue
        a, b = _find_swap(adj, j, last)
        adj[a].discard(b)
        adj[b].discard(a)
        adj[j].add(a)
        adj[a].add(j)
        adj[last].add(b)
        adj[b].add(last)
    edges = ((u, v) for u in range(len(adj)) for v in adj[u] if u < v)
    return SimpleGraph(len(values), edges)


def realize(seq, check_steps: bool = False) -> SimpleGraph:
    """Realize an unsorted sequence; vertex ``i`` gets degree ``seq[i]``."""
    s = sort_desc(seq)
    g = choudum_realize(s, check_steps=check_steps)
    return g.relabel(s.order)


def verify_realization(g: SimpleGraph, seq) -> bool:
    seq = as_sequence(seq)
    if g.n != seq.n:
        return False
    if any(u == v or not (0 <= u < g.n and 0 <= v < g.n) for u, v in g.edges):
        return False
    return sorted(g.degree) == sorted(seq.values)


@lru_cache(maxsize=None)
def achievable_multisets(n: int) -> frozenset[tuple[int, ...]]:
    """Every sorted degree multiset of a labeled simple graph on ``n`` vertices."""
    if n > ORACLE_MAX_N:
        raise TooLarge(f"exhaustive enumeration limited to n <= {ORACLE_MAX_N}")
    pairs = list(combinations(range(n), 2))
    e = len(pairs)
    inc = np.zeros((e, n), dtype=np.int64)
    for k, (u, v) in enumerate(pairs):
        inc[k, u] = inc[k, v] = 1
    found: set[tuple[int, ...]] = set()
    chunk = 1 << 16
    shifts = np.arange(e, dtype=np.int64)
    for start in range(0, 1 << e, chunk):
        masks = np.arange(start, min(start + chunk, 1 << e), dtype=np.int64)
        bits = (masks[:, None] >> shifts) & 1
        deg = -np.sort(-(bits @ inc), axis=1)
        found.update(map(tuple, np.unique(deg, axis=0).tolist()))
    return frozenset(found)


def exhaustive_oracle(seq) -> bool:
    """Decide graphicality by enumerating all labeled graphs (n <= 7)."""
    seq = as_sequence(seq)
    if seq.n > ORACLE_MAX_N:
        raise TooLarge(f"exhaustive enumeration limited to n <= {ORACLE_MAX_N}")
    return tuple(sorted(seq.values, reverse=True)) in achievable_multisets(seq.n)


def format_edge_list(g: SimpleGraph) -> str:
    lines = [f"# n={g.n} m={len(g.edges)}"]
    lines += [f"{u + 1} {v + 1}" for u, v in sorted(g.edges)]
    return "\n".join(lines) + "\n"


def write_edge_list(g: SimpleGraph, path: str | Path) -> None:
    Path(path).write_text(format_edge_list(g))


def parse_edge_list(text: str) -> SimpleGraph:
    n = None
    edges = []
    for line in text.splitlines():
        line = line.strip()
        if not line:
            continue
        if line.startswith("#"):
            for tok in line[1:].split():
                if tok.startswith("n="):
                    n = int(tok[2:])
            continue
        parts = line.split()
        if len(parts) != 2:
            raise DegreeFileError(f"bad edge line: {line!r}")
        u, v = (int(p) - 1 for p in parts)
        edges.append((u, v))
    if n is None:
        n = 1 + max((max(e) for e in edges), default=-1)
    return SimpleGraph(n, edges)
