"""Degree-sequence types and the Erdős–Gallai graphicality test.

Scalar routines work on Python ints, so totals are exact for any input
size. ``erdos_gallai_batch`` is the numpy path used by the Monte Carlo
engine; it clips degrees at ``n`` first, which keeps every intermediate
below ``n**2`` and therefore inside int64 for ``n < 3e9``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Iterator, NamedTuple, Sequence

import numpy as np

from .errors import DegreeFileError


@dataclass(frozen=True)
class DegreeSequence:
    values: tuple[int, ...]

    def __init__(self, values: Iterable[int]):
        vals = tuple(int(v) for v in values)
        if not vals:
            raise ValueError("a degree sequence needs at least one vertex")
        if any(v < 0 for v in vals):
            raise ValueError("degrees must be nonnegative")
        object.__setattr__(self, "values", vals)

    @property
    def n(self) -> int:
        return len(self.values)

    @property
    def total(self) -> int:
        return sum(self.values)

    def __len__(self) -> int:
        return len(self.values)

    def __iter__(self) -> Iterator[int]:
        return iter(self.values)


@dataclass(frozen=True)
class SortedDegrees:
    """Nonincreasing rearrangement of a degree sequence.

    ``prefix_sums[j]`` is the sum of the first ``j`` values, so it is
    indexed the 1-based way (``prefix_sums[0] == 0``). ``order[p]`` is the
    original index of the vertex sitting at sorted position ``p``.
    """

    values: tuple[int, ...]
    prefix_sums: tuple[int, ...] = field(repr=False)
    order: tuple[int, ...] = field(repr=False)

    @classmethod
    def from_sorted(cls, values: Iterable[int]) -> "SortedDegrees":
        vals = tuple(int(v) for v in values)
        if any(a < b for a, b in zip(vals, vals[1:])):
            raise ValueError("values are not nonincreasing")
        if any(v < 0 for v in vals):
            raise ValueError("degrees must be nonnegative")
        return cls(vals, _prefix(vals), tuple(range(len(vals))))

    @property
    def n(self) -> int:
        return len(self.values)

    @property
    def total(self) -> int:
        return self.prefix_sums[-1]

    def __len__(self) -> int:
        return len(self.values)


@dataclass(frozen=True)
class Parity:
    even: bool


class Margin(NamedTuple):
    value: int
    j: int


class Violation(NamedTuple):
    j: int
    lhs: int
    rhs: int


def _prefix(vals: Sequence[int]) -> tuple[int, ...]:
    out = [0]
    acc = 0
    for v in vals:
        acc += v
        out.append(acc)
    return tuple(out)


def as_sequence(seq) -> DegreeSequence:
    if isinstance(seq, DegreeSequence):
        return seq
    return DegreeSequence(seq)


def sort_desc(seq) -> SortedDegrees:
    seq = as_sequence(seq)
    # ties keep input order, so vertex labels are deterministic
    order = sorted(range(seq.n), key=lambda i: -seq.values[i])
    vals = tuple(seq.values[i] for i in order)
    return SortedDegrees(vals, _prefix(vals), tuple(order))


def sum_parity(seq) -> Parity:
    seq = as_sequence(seq)
    return Parity(even=seq.total % 2 == 0)


def durfee_cutoff(sorted_: SortedDegrees) -> int:
    """Largest j with ``m_j >= j``; only these j can break Erdős–Gallai."""
    s = 0
    for j, m in enumerate(sorted_.values, start=1):
        if m < j:
            break
        s = j
    return s


def eg_terms(sorted_: SortedDegrees, j_max: int | None = None) -> Iterator[Violation]:
    """Yield ``(j, lhs, rhs)`` of the Erdős–Gallai inequalities for j = 1..j_max.

    ``rhs = j(j-1) + sum_{i>j} min(j, m_i)`` is computed in O(1) per j from
    ``k(j) = #{i : m_i >= j}``, tracked with a pointer that only moves down.
    """
    m = sorted_.values
    prefix = sorted_.prefix_sums
    n = len(m)
    total = prefix[n]
    j_max = n if j_max is None else min(j_max, n)
    k = n
    for j in range(1, j_max + 1):
        while k > 0 and m[k - 1] < j:
            k -= 1
        idx = max(j, k)
        rhs = j * (j - 1) + j * max(k - j, 0) + total - prefix[idx]
        yield Violation(j, prefix[j], rhs)


def erdos_gallai_ok(sorted_: SortedDegrees, reduced: bool = True) -> bool:
    """Check every Erdős–Gallai inequality on an already sorted sequence.

    With ``reduced`` only j up to the Durfee cutoff are examined; past it
    the slack ``rhs - lhs`` can only grow.
    """
    j_max = max(durfee_cutoff(sorted_), 1) if reduced else None
    return all(lhs <= rhs for _, lhs, rhs in eg_terms(sorted_, j_max))


def erdos_gallai_naive(values: Sequence[int]) -> bool:
    """Direct O(n^2) evaluation of the inequalities for every j."""
    m = sorted(values, reverse=True)
    n = len(m)
    for j in range(1, n + 1):
        if sum(m[:j]) > j * (j - 1) + sum(min(j, x) for x in m[j:]):
            return False
    return True


def is_graphical(seq) -> bool:
    seq = as_sequence(seq)
    return sum_parity(seq).even and erdos_gallai_ok(sort_desc(seq))


def eg_margin(sorted_: SortedDegrees) -> Margin:
    """Maximum of ``lhs - rhs`` over all j, with the smallest maximizing j.

    Nonpositive exactly when all inequalities hold.
    """
    best = None
    for j, lhs, rhs in eg_terms(sorted_):
        gap = lhs - rhs
        if best is None or gap > best.value:
            best = Margin(gap, j)
    return best


def first_violation(sorted_: SortedDegrees) -> Violation | None:
    for term in eg_terms(sorted_):
        if term.lhs > term.rhs:
            return term
    return None


def erdos_gallai_batch(m: np.ndarray) -> np.ndarray:
    """Vectorized Erdős–Gallai check for a batch of sorted rows.

    ``m`` has shape ``(trials, n)``, each row nonincreasing with values in
    ``[0, n]``. Callers clip larger degrees to ``n``: such rows fail at j=1
    either way. Parity is not checked here.
    """
    m = np.asarray(m, dtype=np.int64)
    if m.ndim == 1:
        m = m[None, :]
    b, n = m.shape
    if n == 0:
        return np.ones(b, dtype=bool)
    prefix = np.zeros((b, n + 1), dtype=np.int64)
    np.cumsum(m, axis=1, out=prefix[:, 1:])
    total = prefix[:, -1]
    s = np.count_nonzero(m >= np.arange(1, n + 1), axis=1)
    jmax = max(int(s.max()), 1)
    j = np.arange(1, jmax + 1, dtype=np.int64)
    flat = (np.arange(b, dtype=np.int64)[:, None] * (n + 1) + m).ravel()
    hist = np.bincount(flat, minlength=b * (n + 1)).reshape(b, n + 1)
    below = np.cumsum(hist[:, :jmax], axis=1)
    k = n - below
    idx = np.maximum(j, k)
    rhs = (
        j * (j - 1)
        + j * np.maximum(k - j, 0)
        + total[:, None]
        - np.take_along_axis(prefix, idx, axis=1)
    )
    return np.all(prefix[:, 1 : jmax + 1] <= rhs, axis=1)


def parse_degrees(text: str) -> DegreeSequence:
    vals: list[int] = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        for tok in stripped.split():
            try:
                v = int(tok)
            except ValueError:
                raise DegreeFileError(f"line {lineno}: not an integer: {tok!r}") from None
            if v < 0:
                raise DegreeFileError(f"line {lineno}: negative degree {v}")
            vals.append(v)
    if not vals:
        raise DegreeFileError("no degrees found")
    return DegreeSequence(vals)


def read_degree_file(path: str | Path) -> DegreeSequence:
    return parse_degrees(Path(path).read_text())


def format_degrees(seq: Iterable[int]) -> str:
    return " ".join(str(int(v)) for v in seq)
