"""Truncated Magnus expansion with exact integer coefficients.

``x_i -> 1 + X_i`` extends to an embedding of the free group into the units
of noncommutative power series; truncating at degree ``cap`` keeps exactly
enough information to decide membership in the lower central series terms
``gamma_d`` for ``d <= cap``: ``w`` lies in ``gamma_d`` iff every non-constant
term of its expansion has degree at least ``d``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping

import numpy as np

from .words import Word

Monomial = tuple[int, ...]


class CapMismatchError(ValueError):
    pass


@dataclass(frozen=True)
class TruncatedSeries:
    """Noncommutative polynomial truncated above degree ``cap``.

    ``terms`` maps monomials (tuples of generator indices, read left to
    right) to nonzero integer coefficients; ``()`` is the constant term.
    """

    cap: int
    terms: Mapping[Monomial, int] = field(default_factory=dict)

    def __post_init__(self):
        if self.cap < 0:
            raise ValueError("cap must be non-negative")
        clean = {tuple(m): int(c) for m, c in self.terms.items() if c and len(m) <= self.cap}
        object.__setattr__(self, "terms", dict(sorted(clean.items(), key=lambda kv: (len(kv[0]), kv[0]))))

    @classmethod
    def one(cls, cap: int) -> "TruncatedSeries":
        return cls(cap, {(): 1})

    @classmethod
    def variable(cls, i: int, cap: int) -> "TruncatedSeries":
        return cls(cap, {(i,): 1})

    def __add__(self, other: "TruncatedSeries") -> "TruncatedSeries":
        _check_caps(self, other)
        terms = dict(self.terms)
        for m, c in other.terms.items():
            terms[m] = terms.get(m, 0) + c
        return TruncatedSeries(self.cap, terms)

    def __neg__(self):
        return TruncatedSeries(self.cap, {m: -c for m, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other: "TruncatedSeries") -> "TruncatedSeries":
        return series_mul(self, other)

    def __eq__(self, other):
        if not isinstance(other, TruncatedSeries):
            return NotImplemented
        return self.cap == other.cap and self.terms == other.terms

    __hash__ = None

    def constant(self) -> int:
        return self.terms.get((), 0)

    def degree_part(self, d: int) -> dict[Monomial, int]:
        return {m: c for m, c in self.terms.items() if len(m) == d}

    def min_degree(self) -> int | None:
        """Lowest degree of a non-constant term, or ``None``."""
        return min((len(m) for m in self.terms if m), default=None)

    def format(self, names: str = "XYZWVUTSRQPONMLKJIHGFEDCBA") -> str:
        if not self.terms:
            return "0"
        parts = []
        for m, c in self.terms.items():
            mono = "".join(names[i] for i in m)
            if not mono:
                parts.append(str(c))
            elif c == 1:
                parts.append(mono)
            elif c == -1:
                parts.append("-" + mono)
            else:
                parts.append(f"{c}{mono}")
        return " + ".join(parts).replace("+ -", "- ")


def _check_caps(s, t):
    if s.cap != t.cap:
        raise CapMismatchError(f"cap mismatch: {s.cap} != {t.cap}")


def series_mul(s: TruncatedSeries, t: TruncatedSeries) -> TruncatedSeries:
    _check_caps(s, t)
    cap = s.cap
    by_deg: dict[int, list] = {}
    for m, c in t.terms.items():
        by_deg.setdefault(len(m), []).append((m, c))
    terms: dict[Monomial, int] = {}
    for m1, c1 in s.terms.items():
        room = cap - len(m1)
        for d, items in by_deg.items():
            if d > room:
                continue
            for m2, c2 in items:
                key = m1 + m2
                terms[key] = terms.get(key, 0) + c1 * c2
    return TruncatedSeries(cap, terms)


def _dense_blocks(w: Word, cap: int, rank: int) -> list[np.ndarray]:
    """Expansion of ``w`` as one object array of coefficients per degree.

    Monomial ``(m_1..m_d)`` sits at mixed-radix index ``m_1 r^{d-1} + ... + m_d``,
    so appending a letter on the right is a column of the ``(-1, rank)`` view.
    """
    blocks = [np.zeros(rank**d, dtype=object) for d in range(cap + 1)]
    blocks[0][0] = 1
    for g, s in w.letters:
        if s > 0:
            # right-multiply by (1 + X_g); descending so lower degrees are still old
            for d in range(cap, 0, -1):
                blocks[d].reshape(-1, rank)[:, g] += blocks[d - 1]
        else:
            # right-divide by (1 + X_g): t_d = s_d - t_{d-1} X_g, ascending
            for d in range(1, cap + 1):
                blocks[d].reshape(-1, rank)[:, g] -= blocks[d - 1]
    return blocks


def magnus(w: Word, cap: int, rank: int | None = None) -> TruncatedSeries:
    if cap < 0:
        raise ValueError("cap must be non-negative")
    rank = max(rank or 0, w.rank_needed, 1)
    blocks = _dense_blocks(w, cap, rank)
    terms = {}
    for d, blk in enumerate(blocks):
        for idx in np.flatnonzero(blk != 0):
            mono = tuple(int(c) for c in np.unravel_index(idx, (rank,) * d)) if d else ()
            terms[mono] = int(blk[idx])
    return TruncatedSeries(cap, terms)


def lcs_weight(w: Word, cap: int, rank: int | None = None) -> int:
    """Lower-central-series weight of ``w``, saturated at ``cap``.

    Returns the lowest degree ``d < cap`` of a nonzero non-constant term of
    the expansion, or ``cap`` itself meaning "at least cap".
    """
    if cap < 2:
        raise ValueError("cap must be at least 2")
    rank = max(rank or 0, w.rank_needed, 1)
    # degree cap-1 is the last one that can witness a weight below cap
    blocks = _dense_blocks(w, cap - 1, rank)
    for d in range(1, cap):
        if np.any(blocks[d] != 0):
            return d
    return cap


def in_gamma(w: Word, n: int) -> bool:
    """Whether ``w`` lies in the ``n``-th lower central series term."""
    if n < 1:
        raise ValueError("n must be at least 1")
    if n == 1:
        return True
    return lcs_weight(w, n) >= n


def format_weight(weight: int, cap: int) -> str:
    return f">={cap}" if weight >= cap else str(weight)
