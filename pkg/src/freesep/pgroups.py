"""Small concrete p-groups and exhaustive homomorphism scans from a free group.

Two families are supported: cyclic groups ``Z/p^k`` (elements are residues)
and upper unitriangular matrices ``UT(n, p)`` for ``n`` in ``{3, 4}``
(elements are row-major tuples of the ``n*n`` entries).  Every scan here
covers *all* homomorphisms into the listed targets, nothing more; it can
corroborate non-separability but never prove it for all p-groups.
"""
from __future__ import annotations

import itertools
import time
from collections import deque
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from functools import cached_property
from typing import Hashable, Iterable, Sequence

import numpy as np

from ._kernels import get_kernels
from .isolation import is_prime
from .words import Word

DEFAULT_BUDGET = 10**6
TABLE_LIMIT = 2048

Element = Hashable


class BudgetExceededError(ValueError):
    pass


@dataclass(frozen=True)
class FiniteGroup:
    kind: str  # "cyclic" or "unitriangular"
    p: int
    k: int = 1  # cyclic exponent, or matrix size n for unitriangular

    def __post_init__(self):
        if not is_prime(self.p):
            raise ValueError(f"p must be prime, got {self.p}")
        if self.kind == "cyclic":
            if self.k < 1:
                raise ValueError("cyclic group needs k >= 1")
        elif self.kind == "unitriangular":
            if self.k not in (3, 4):
                raise ValueError("unitriangular groups supported for n in {3, 4}")
        else:
            raise ValueError(f"unknown group kind {self.kind!r}")

    @classmethod
    def cyclic(cls, p: int, k: int) -> "FiniteGroup":
        return cls("cyclic", p, k)

    @classmethod
    def unitriangular(cls, n: int, p: int) -> "FiniteGroup":
        return cls("unitriangular", p, n)

    @property
    def name(self) -> str:
        if self.kind == "cyclic":
            return f"cyclic({self.p},{self.k})"
        return f"unitriangular({self.k},{self.p})"

    @property
    def order(self) -> int:
        if self.kind == "cyclic":
            return self.p**self.k
        n = self.k
        return self.p ** (n * (n - 1) // 2)

    @cached_property
    def _slots(self) -> list[tuple[int, int]]:
        n = self.k
        return [(i, j) for i in range(n) for j in range(i + 1, n)]

    @property
    def identity(self) -> Element:
        if self.kind == "cyclic":
            return 0
        n = self.k
        return tuple(int(i == j) for i in range(n) for j in range(n))

    def mul(self, a: Element, b: Element) -> Element:
        if self.kind == "cyclic":
            return (a + b) % self.order
        n, p = self.k, self.p
        out = []
        for i in range(n):
            for j in range(n):
                out.append(sum(a[i * n + t] * b[t * n + j] for t in range(n)) % p)
        return tuple(out)

    def inv(self, a: Element) -> Element:
        if self.kind == "cyclic":
            return (-a) % self.order
        # unipotent: (1+N)^-1 = 1 - N + N^2 - ..., N^n = 0
        n, p = self.k, self.p
        nil = tuple((a[i] - (i // n == i % n)) % p for i in range(n * n))
        term = self.identity
        acc = self.identity
        for r in range(1, n):
            term = _matmul(term, nil, n, p)
            sign = -1 if r % 2 else 1
            acc = tuple((x + sign * t) % p for x, t in zip(acc, term))
        return acc

    def index(self, a: Element) -> int:
        if self.kind == "cyclic":
            return int(a)
        n = self.k
        idx = 0
        for i, j in self._slots:
            idx = idx * self.p + a[i * n + j]
        return idx

    def element(self, idx: int) -> Element:
        if self.kind == "cyclic":
            return idx % self.order
        n = self.k
        m = [int(i == j) for i in range(n) for j in range(n)]
        for i, j in reversed(self._slots):
            m[i * n + j] = idx % self.p
            idx //= self.p
        return tuple(m)

    def elements(self) -> list[Element]:
        return [self.element(i) for i in range(self.order)]

    def is_element(self, a) -> bool:
        if self.kind == "cyclic":
            return isinstance(a, (int, np.integer)) and 0 <= a < self.order
        n = self.k
        return (
            isinstance(a, tuple)
            and len(a) == n * n
            and all(0 <= v < self.p for v in a)
            and all(a[i * n + j] == (i == j) for i in range(n) for j in range(i + 1))
        )

    def tables(self) -> tuple[np.ndarray, np.ndarray, int]:
        """Multiplication table, inverse map and identity, on element indices."""
        if self.order > TABLE_LIMIT:
            raise BudgetExceededError(
                f"{self.name} has order {self.order} above the table limit {TABLE_LIMIT}"
            )
        return _tables(self)


def _matmul(a, b, n, p):
    return tuple(sum(a[i * n + t] * b[t * n + j] for t in range(n)) % p for i in range(n) for j in range(n))


_TABLE_CACHE: dict[FiniteGroup, tuple[np.ndarray, np.ndarray, int]] = {}


def _tables(G: FiniteGroup):
    if G in _TABLE_CACHE:
        return _TABLE_CACHE[G]
    order = G.order
    idx = np.arange(order, dtype=np.int64)
    if G.kind == "cyclic":
        mul = (idx[:, None] + idx[None, :]) % order
        inv = (-idx) % order
    else:
        n, p = G.k, G.p
        mats = np.array([G.element(i) for i in range(order)], dtype=np.int64).reshape(order, n, n)
        weights = np.zeros((n, n), dtype=np.int64)
        w = 1
        for i, j in reversed(G._slots):
            weights[i, j] = w
            w *= p
        mul = np.empty((order, order), dtype=np.int64)
        for a in range(order):
            prod = np.einsum("ij,bjk->bik", mats[a], mats) % p
            mul[a] = np.tensordot(prod, weights, axes=([1, 2], [0, 1]))
        inv = np.empty(order, dtype=np.int64)
        ident = G.index(G.identity)
        rows, cols = np.nonzero(mul == ident)
        inv[rows] = cols
    mul.flags.writeable = False
    out = (np.ascontiguousarray(mul), np.ascontiguousarray(inv), G.index(G.identity))
    _TABLE_CACHE[G] = out
    return out


def check_group_axioms(G: FiniteGroup, samples: int = 200, seed: int = 0) -> bool:
    """Spot-check associativity, identity and inverses on random triples."""
    rng = np.random.default_rng(seed)
    e = G.identity
    for _ in range(samples):
        a, b, c = (G.element(int(i)) for i in rng.integers(0, G.order, 3))
        if G.mul(G.mul(a, b), c) != G.mul(a, G.mul(b, c)):
            return False
        if G.mul(a, e) != a or G.mul(e, a) != a or G.mul(a, G.inv(a)) != e:
            return False
    return True


@dataclass(frozen=True)
class Homomorphism:
    """A map from the free group; generators beyond ``images`` go to the identity."""

    target: FiniteGroup
    images: tuple[Element, ...]

    def image(self, gen: int) -> Element:
        return self.images[gen] if gen < len(self.images) else self.target.identity


def evaluate(h: Homomorphism, w: Word) -> Element:
    G = h.target
    e = G.identity
    for g, s in w.letters:
        img = h.image(g)
        e = G.mul(e, img if s > 0 else G.inv(img))
    return e


def closure(target: FiniteGroup, elems: Iterable[Element]) -> frozenset:
    """Subgroup generated by ``elems``."""
    gens = []
    for g in elems:
        gens.extend((g, target.inv(g)))
    seen = {target.identity}
    queue = deque(seen)
    while queue:
        e = queue.popleft()
        for g in gens:
            t = target.mul(e, g)
            if t not in seen:
                seen.add(t)
                queue.append(t)
    return frozenset(seen)


def separates(h: Homomorphism, gens: Sequence[Word], f: Word) -> bool:
    return evaluate(h, f) not in closure(h.target, [evaluate(h, g) for g in gens])


@dataclass
class TargetResult:
    target: FiniteGroup
    homs_total: int
    homs_separating: int
    first_separating: Homomorphism | None = None


@dataclass
class SeparabilityReport:
    generators: list[Word]
    excluded: Word
    targets: list[TargetResult] = field(default_factory=list)
    elapsed: float = 0.0
    backend: str = ""

    @property
    def homs_total(self) -> int:
        return sum(t.homs_total for t in self.targets)

    @property
    def homs_separating(self) -> int:
        return sum(t.homs_separating for t in self.targets)

    @property
    def first_separating(self) -> Homomorphism | None:
        return next((t.first_separating for t in self.targets if t.first_separating), None)


def _encode(words: Sequence[Word], occurring: list[int]) -> tuple[np.ndarray, np.ndarray]:
    pos = {g: i for i, g in enumerate(occurring)}
    codes, offsets = [], [0]
    for w in words:
        codes.extend(2 * pos[g] + (s < 0) for g, s in w.letters)
        offsets.append(len(codes))
    return np.array(codes, dtype=np.int64), np.array(offsets, dtype=np.int64)


def scan_target(
    gens: Sequence[Word],
    f: Word,
    target: FiniteGroup,
    budget: int = DEFAULT_BUDGET,
    backend: str | None = None,
    threads: int = 1,
) -> TargetResult:
    kern = get_kernels(backend)
    occurring = sorted({g for w in [*gens, f] for g, _ in w.letters})
    k = len(occurring)
    total = target.order**k
    if total > budget:
        raise BudgetExceededError(
            f"{target.name}: {target.order}^{k} = {total} homomorphisms exceeds budget {budget}"
        )
    mul, inv, ident = target.tables()
    gen_codes, gen_offsets = _encode(gens, occurring)
    f_codes, _ = _encode([f], occurring)
    chunk = max(1, (1 << 20) // target.order)
    blocks = [(s, min(total, s + chunk)) for s in range(0, total, chunk)]

    def run(block):
        return kern.homscan_block(mul, inv, ident, k, gen_codes, gen_offsets, f_codes, *block)

    if threads > 1 and len(blocks) > 1:
        with ThreadPoolExecutor(threads) as pool:
            parts = list(pool.map(run, blocks))
    else:
        parts = [run(b) for b in blocks]
    hits = np.concatenate(parts) if parts else np.zeros(0, dtype=bool)
    result = TargetResult(target, total, int(hits.sum()))
    if result.homs_separating:
        first = int(np.argmax(hits))
        digits = []
        for _ in range(k):
            digits.append(first % target.order)
            first //= target.order
        digits.reverse()
        rank = max(occurring) + 1
        images = [target.identity] * rank
        for g, d in zip(occurring, digits):
            images[g] = target.element(d)
        result.first_separating = Homomorphism(target, tuple(images))
    return result


def separability_scan(
    gens: Sequence[Word],
    f: Word,
    targets: Sequence[FiniteGroup],
    budget: int = DEFAULT_BUDGET,
    backend: str | None = None,
    threads: int = 1,
) -> SeparabilityReport:
    t0 = time.perf_counter()
    report = SeparabilityReport(list(gens), f, backend=get_kernels(backend).name)
    for target in targets:
        report.targets.append(scan_target(gens, f, target, budget, backend, threads))
    report.elapsed = time.perf_counter() - t0
    return report


def separability_scan_reference(gens: Sequence[Word], f: Word, target: FiniteGroup) -> tuple[int, int]:
    """Element-level enumeration with no tables or kernels; returns (total, separating)."""
    occurring = sorted({g for w in [*gens, f] for g, _ in w.letters})
    rank = max(occurring, default=-1) + 1
    total = sep = 0
    for combo in itertools.product(target.elements(), repeat=len(occurring)):
        images = [target.identity] * rank
        for g, e in zip(occurring, combo):
            images[g] = e
        total += 1
        sep += separates(Homomorphism(target, tuple(images)), gens, f)
    return total, sep


def parse_targets(text: str, primes: Iterable[int]) -> list[FiniteGroup]:
    """``"cyclic:1-3,ut:3"`` for each prime -> ``[cyclic(p,1..3), unitriangular(3,p)]``."""
    out = []
    for p in primes:
        for token in filter(None, (t.strip() for t in text.split(","))):
            kind, _, rng = token.partition(":")
            if not rng:
                raise ValueError(f"target {token!r} needs a size, e.g. cyclic:2 or ut:3")
            lo, _, hi = rng.partition("-")
            sizes = range(int(lo), int(hi or lo) + 1)
            for s in sizes:
                if kind in ("cyclic", "c"):
                    out.append(FiniteGroup.cyclic(p, s))
                elif kind in ("ut", "unitriangular", "heisenberg"):
                    out.append(FiniteGroup.unitriangular(s, p))
                else:
                    raise ValueError(f"unknown target family {kind!r}")
    return out
