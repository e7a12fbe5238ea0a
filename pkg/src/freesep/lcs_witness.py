"""Explicit witnesses that ``x`` and the subgroup ``<x[y,x], y>`` agree modulo every ``gamma_n``.

With ``a = x[y,x]`` and ``b = y`` one has ``x = a[x, y]``.  If ``W`` is a word
in ``a, b`` with ``W = x`` modulo ``gamma_k`` then ``a[W, b] = x`` modulo
``gamma_{k+1}``, which gives the recursion ``W_2 = a``,
``W_{k+1} = a [W_k, b]``.  None of this is trusted: each witness is checked
with the Magnus expansion before it is reported.
"""
from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Sequence

from .magnus import lcs_weight
from .words import (
    Alphabet,
    Word,
    apply_endomorphism,
    commutator,
    exponent_sums,
    inverse,
    multiply,
    nonseparable_subgroup_generators,
)

A_ALPHABET = Alphabet(2, "ab")
X_ALPHABET = Alphabet(2, "xy")


class CertificationError(RuntimeError):
    pass


def abelianize(w: Word, rank: int | None = None) -> tuple[int, ...]:
    rank = max(rank or 0, w.rank_needed)
    return tuple(exponent_sums(w, rank))


def _hermite_rows(vectors: Sequence[Sequence[int]]) -> list[list[int]]:
    """Row echelon basis of the integer row span (pivots positive, strictly increasing)."""
    rows = [list(map(int, v)) for v in vectors if any(v)]
    if not rows:
        return []
    ncols = len(rows[0])
    basis = []
    col = 0
    while rows and col < ncols:
        live = [r for r in rows if r[col] != 0]
        rest = [r for r in rows if r[col] == 0]
        if not live:
            col += 1
            continue
        # Euclid on column ``col`` until one row carries the gcd
        while len(live) > 1:
            live.sort(key=lambda r: abs(r[col]))
            pivot = live[0]
            nxt = [pivot]
            for r in live[1:]:
                q = r[col] // pivot[col]
                r = [a - q * b for a, b in zip(r, pivot)]
                if r[col] != 0:
                    nxt.append(r)
                elif any(r):
                    rest.append(r)
            live = nxt
        pivot = live[0]
        if pivot[col] < 0:
            pivot = [-a for a in pivot]
        basis.append(pivot)
        rows = rest
        col += 1
    return basis


def lattice_contains(basis: Sequence[Sequence[int]], v: Sequence[int]) -> bool:
    """Whether ``v`` is an integer combination of ``basis``."""
    v = list(map(int, v))
    if any(len(b) != len(v) for b in basis):
        raise ValueError("basis vectors and v must have the same length")
    for row in _hermite_rows(basis):
        col = next(i for i, a in enumerate(row) if a)
        if v[col] % row[col]:
            return False
        q = v[col] // row[col]
        v = [a - q * b for a, b in zip(v, row)]
    return not any(v)


@dataclass(frozen=True)
class WitnessReport:
    n: int
    witness: Word  # over the alphabet {a, b}
    expanded: Word  # over {x, y}
    discrepancy_weight: int  # saturated at n

    @property
    def certified(self) -> bool:
        return self.discrepancy_weight >= self.n


def subgroup_images() -> list[Word]:
    return nonseparable_subgroup_generators(X_ALPHABET)


def witness_word(n: int) -> Word:
    """``W_n`` over ``{a, b}``, reduced in the free group on ``a, b``."""
    if n < 2:
        raise ValueError("witness needs n >= 2")
    a, b = A_ALPHABET.generators()
    w = a
    for _ in range(n - 2):
        w = multiply(a, commutator(w, b))
    return w


def witness(n: int) -> WitnessReport:
    wa = witness_word(n)
    x = X_ALPHABET.generator(0)
    expanded = apply_endomorphism(subgroup_images(), wa)
    weight = lcs_weight(multiply(inverse(expanded), x), n, rank=2)
    report = WitnessReport(n, wa, expanded, weight)
    if not report.certified:
        raise CertificationError(f"witness for n={n} has discrepancy weight {weight} < {n}")
    return report


def nilpotent_image_equality(n_max: int, threads: int = 1) -> list[WitnessReport]:
    if n_max < 2:
        raise ValueError("n_max must be at least 2")
    ns = range(2, n_max + 1)
    if threads > 1:
        with ThreadPoolExecutor(threads) as pool:
            return list(pool.map(witness, ns))
    return [witness(n) for n in ns]
