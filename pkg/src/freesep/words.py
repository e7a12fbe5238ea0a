"""Reduced words in a free group of finite rank.

Letters are ``(generator, sign)`` pairs and a :class:`Word` is an immutable,
freely reduced tuple of them.  Text I/O uses one lowercase character per
generator and the uppercase character for its inverse, so ``xYXyx`` is
``x y^-1 x^-1 y x``.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, NamedTuple, Sequence

import numpy as np

DEFAULT_NAMES = "xyzwvutsrqponmlkjihgfedcba"


class Letter(NamedTuple):
    gen: int
    sign: int

    def inverse(self) -> "Letter":
        return Letter(self.gen, -self.sign)

    @property
    def code(self) -> int:
        """Dense integer code ``2*gen + (sign < 0)``; ``code ^ 1`` is the inverse."""
        return 2 * self.gen + (self.sign < 0)

    @classmethod
    def from_code(cls, code: int) -> "Letter":
        return cls(code >> 1, -1 if code & 1 else 1)


class WordParseError(ValueError):
    def __init__(self, text: str, position: int, reason: str):
        super().__init__(f"{reason} at position {position} in {text!r}")
        self.text = text
        self.position = position


@dataclass(frozen=True)
class Alphabet:
    rank: int
    names: str = ""

    def __post_init__(self):
        if self.rank < 1:
            raise ValueError(f"rank must be positive, got {self.rank}")
        names = self.names or DEFAULT_NAMES[: self.rank]
        if len(names) != self.rank:
            raise ValueError(f"need exactly {self.rank} generator names, got {names!r}")
        if len(set(names)) != self.rank or not all(c.isalpha() and c.islower() for c in names):
            raise ValueError(f"generator names must be distinct lowercase letters: {names!r}")
        object.__setattr__(self, "names", names)

    def generator(self, i: int) -> "Word":
        if not 0 <= i < self.rank:
            raise IndexError(f"generator {i} outside rank {self.rank}")
        return Word((Letter(i, 1),))

    def generators(self) -> list["Word"]:
        return [self.generator(i) for i in range(self.rank)]

    def parse(self, text: str) -> "Word":
        """Parse uppercase-inverse text; the result is freely reduced."""
        letters = []
        for pos, ch in enumerate(text):
            idx = self.names.find(ch.lower())
            if idx < 0 or not ch.isalpha():
                raise WordParseError(text, pos, f"unknown generator {ch!r}")
            letters.append(Letter(idx, -1 if ch.isupper() else 1))
        return reduce(letters)

    def format(self, w: "Word") -> str:
        out = []
        for g, s in w.letters:
            if g >= self.rank:
                raise ValueError(f"word uses generator {g} outside rank {self.rank}")
            out.append(self.names[g] if s > 0 else self.names[g].upper())
        return "".join(out)


@dataclass(frozen=True)
class Word:
    letters: tuple[Letter, ...] = ()

    def __post_init__(self):
        prev = None
        for let in self.letters:
            if prev is not None and prev.gen == let.gen and prev.sign == -let.sign:
                raise ValueError("Word letters must be freely reduced; use reduce()")
            prev = let

    def __len__(self):
        return len(self.letters)

    def __iter__(self):
        return iter(self.letters)

    def __getitem__(self, item):
        if isinstance(item, slice):
            return Word(self.letters[item])
        return self.letters[item]

    def __mul__(self, other: "Word") -> "Word":
        return multiply(self, other)

    def __pow__(self, m: int) -> "Word":
        return power(self, m)

    def __repr__(self):
        if not self.letters:
            return "Word(<empty>)"
        names = DEFAULT_NAMES
        txt = "".join(
            (names[g] if s > 0 else names[g].upper()) if g < len(names) else f"[{g}{'+' if s > 0 else '-'}]"
            for g, s in self.letters
        )
        return f"Word({txt})"

    def inverse(self) -> "Word":
        return inverse(self)

    @property
    def rank_needed(self) -> int:
        return max((g for g, _ in self.letters), default=-1) + 1

    def codes(self) -> np.ndarray:
        return np.array([2 * g + (s < 0) for g, s in self.letters], dtype=np.int64)

    @classmethod
    def from_codes(cls, codes: Iterable[int]) -> "Word":
        return reduce(Letter.from_code(int(c)) for c in codes)


EMPTY = Word()


def reduce(raw: Iterable[Sequence[int]]) -> Word:
    stack: list[Letter] = []
    for g, s in raw:
        if s not in (1, -1) or g < 0:
            raise ValueError(f"invalid letter {(g, s)!r}")
        if stack and stack[-1].gen == g and stack[-1].sign == -s:
            stack.pop()
        else:
            stack.append(Letter(g, s))
    return Word(tuple(stack))


def _join(u: Sequence[Letter], v: Sequence[Letter]) -> Word:
    # Both halves are reduced, so cancellation only happens at the seam.
    i, n = 0, min(len(u), len(v))
    while i < n and u[len(u) - 1 - i] == v[i].inverse():
        i += 1
    return Word(tuple(u[: len(u) - i]) + tuple(v[i:]))


def multiply(u: Word, v: Word) -> Word:
    return _join(u.letters, v.letters)


def inverse(u: Word) -> Word:
    return Word(tuple(let.inverse() for let in reversed(u.letters)))


def power(u: Word, m: int) -> Word:
    if m == 0:
        return EMPTY
    if m < 0:
        u, m = inverse(u), -m
    core, conj = cyclically_reduce(u)
    # conj * core^m * conj^-1 has no internal cancellation once core is cyclically reduced
    return multiply(multiply(conj, Word(core.letters * m)), inverse(conj))


def commutator(u: Word, v: Word) -> Word:
    """``[u, v] = u^-1 v^-1 u v``."""
    return multiply(multiply(inverse(u), inverse(v)), multiply(u, v))


def cyclically_reduce(f: Word) -> tuple[Word, Word]:
    """Split ``f`` as ``conjugator * core * conjugator^-1`` with ``core`` cyclically reduced."""
    lets = f.letters
    i, j = 0, len(lets) - 1
    while i < j and lets[i] == lets[j].inverse():
        i += 1
        j -= 1
    return Word(lets[i : j + 1]), Word(lets[:i])


def is_cyclically_reduced(f: Word) -> bool:
    return len(f) < 2 or f.letters[0] != f.letters[-1].inverse()


def nonseparable_subgroup_generators(alphabet: Alphabet, passive: Iterable[int] = ()) -> list[Word]:
    """Generators ``a = x[y,x]``, ``b = y`` and the chosen extra generators.

    ``passive`` lists indices (>= 2) of extra generators put into the subgroup
    unchanged.
    """
    if alphabet.rank < 2:
        raise ValueError("construction needs a free group of rank >= 2")
    x, y = alphabet.generator(0), alphabet.generator(1)
    gens = [multiply(x, commutator(y, x)), y]
    for j in sorted(set(passive)):
        if not 2 <= j < alphabet.rank:
            raise ValueError(f"passive generator index {j} must lie in [2, {alphabet.rank})")
        gens.append(alphabet.generator(j))
    return gens


def apply_endomorphism(images: Sequence[Word], w: Word) -> Word:
    """Substitute ``images[g]`` for each letter ``g`` (inverse image for ``g^-1``)."""
    inv = [inverse(im) for im in images]
    out: list[Letter] = []
    for g, s in w.letters:
        piece = images[g] if s > 0 else inv[g]
        for let in piece.letters:
            if out and out[-1] == let.inverse():
                out.pop()
            else:
                out.append(let)
    return Word(tuple(out))


def exponent_sums(w: Word, rank: int) -> list[int]:
    sums = [0] * rank
    for g, s in w.letters:
        sums[g] += s
    return sums


def iter_reduced_words(rank: int, length: int):
    """All reduced words of exactly ``length`` letters, lexicographic in letter code."""
    ncodes = 2 * rank
    if length == 0:
        yield EMPTY
        return

    def rec(prefix: list[int]):
        if len(prefix) == length:
            yield Word(tuple(Letter.from_code(c) for c in prefix))
            return
        for c in range(ncodes):
            if prefix and c == prefix[-1] ^ 1:
                continue
            prefix.append(c)
            yield from rec(prefix)
            prefix.pop()

    yield from rec([])
