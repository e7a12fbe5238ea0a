"""Bounded search for roots escaping a subgroup.

A subgroup ``H`` is isolated when ``f^m in H`` forces ``f in H``.  The scan
enumerates every reduced word up to a length bound and every exponent in a
finite set, so a clean result certifies isolation only up to those bounds.
"""
from __future__ import annotations

import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from ._kernels import decode_codes, get_kernels
from .stallings import SubgroupGraph
from .words import Word

DEFAULT_EXPONENTS = (2, 3, 4, 5, 6)
_BLOCK = 1 << 15


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    i = 2
    while i * i <= n:
        if n % i == 0:
            return False
        i += 1
    return True


@dataclass(frozen=True)
class ScanBounds:
    max_word_length: int
    exponents: tuple[int, ...] = DEFAULT_EXPONENTS

    def __post_init__(self):
        if self.max_word_length < 1:
            raise ValueError("max_word_length must be at least 1")
        exps = tuple(sorted(set(int(e) for e in self.exponents)))
        if any(e < 2 for e in exps):
            raise ValueError("exponents must all be >= 2")
        object.__setattr__(self, "exponents", exps)


@dataclass(frozen=True)
class Violation:
    root: Word
    exponent: int
    power_in_subgroup: bool = True
    root_in_subgroup: bool = False


@dataclass
class ScanReport:
    bounds: ScanBounds
    rank: int
    words_scanned: int = 0
    violations: list[Violation] = field(default_factory=list)
    elapsed: float = 0.0
    backend: str = ""


def count_reduced_words(rank: int, length: int) -> int:
    return 2 * rank * (2 * rank - 1) ** (length - 1)


def scan(g: SubgroupGraph, bounds: ScanBounds, backend: str | None = None, threads: int = 1) -> ScanReport:
    """Full report of :func:`isolation_scan`, with counters and timing."""
    kern = get_kernels(backend)
    t0 = time.perf_counter()
    rank = g.rank
    table = np.ascontiguousarray(g.table, dtype=np.int64)
    exps = np.array(bounds.exponents, dtype=np.int64)
    report = ScanReport(bounds, rank, backend=kern.name)
    if len(exps) == 0:
        report.words_scanned = sum(count_reduced_words(rank, n) for n in range(1, bounds.max_word_length + 1))
        report.elapsed = time.perf_counter() - t0
        return report

    jobs = []
    for length in range(1, bounds.max_word_length + 1):
        per_first = (2 * rank - 1) ** (length - 1)
        for first in range(2 * rank):
            for start in range(0, per_first, _BLOCK):
                jobs.append((length, first, start, min(per_first, start + _BLOCK)))

    def run(job):
        length, first, start, stop = job
        hits = kern.isolation_block(table, g.basepoint, first, length, rank, start, stop, exps)
        return job, np.argwhere(hits)

    if threads > 1:
        with ThreadPoolExecutor(threads) as pool:
            results = list(pool.map(run, jobs))
    else:
        results = [run(j) for j in jobs]

    for (length, first, start, stop), hits in results:
        report.words_scanned += stop - start
        for r, e in hits:
            root = Word.from_codes(decode_codes(first, length, start + int(r), rank))
            report.violations.append(Violation(root, int(exps[e])))
    # jobs are already in (length, first letter, index) order, i.e. (length, lexicographic)
    report.elapsed = time.perf_counter() - t0
    return report


def isolation_scan(g: SubgroupGraph, bounds: ScanBounds, **kw) -> list[Violation]:
    return scan(g, bounds, **kw).violations


def prime_exponents(p: int, bounds: ScanBounds) -> ScanBounds:
    if not is_prime(p):
        raise ValueError(f"p must be prime, got {p}")
    return ScanBounds(bounds.max_word_length, tuple(q for q in bounds.exponents if is_prime(q) and q != p))


def p_prime_isolation_scan(g: SubgroupGraph, p: int, bounds: ScanBounds, **kw) -> list[Violation]:
    """Isolation scan restricted to prime exponents different from ``p``."""
    return isolation_scan(g, prime_exponents(p, bounds), **kw)
