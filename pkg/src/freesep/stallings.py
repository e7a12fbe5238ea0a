"""Stallings core graphs of finitely generated subgroups of a free group."""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass

import numpy as np

from .words import Word, apply_endomorphism, iter_reduced_words


class NotSeparableError(ValueError):
    """Raised when asked to separate a subgroup member from its subgroup."""


@dataclass(frozen=True, eq=False)
class SubgroupGraph:
    """Folded, basepointed core graph.

    ``table[v, code]`` is the endpoint of the edge leaving ``v`` labelled by
    letter ``code`` (``2*gen`` for ``gen``, ``2*gen+1`` for its inverse) or
    ``-1``.  Vertices are numbered by BFS from the basepoint ``0``.
    """

    rank: int
    table: np.ndarray
    basepoint: int = 0

    @property
    def num_vertices(self) -> int:
        return self.table.shape[0]

    def read(self, w: Word, start: int | None = None) -> int:
        """Endpoint of the path labelled ``w``, or ``-1`` if it falls off the graph."""
        v = self.basepoint if start is None else start
        t = self.table
        for g, s in w.letters:
            if g >= self.rank:
                return -1
            v = t[v, 2 * g + (s < 0)]
            if v < 0:
                return -1
        return int(v)

    def contains(self, w: Word) -> bool:
        return self.read(w) == self.basepoint

    def edges(self) -> list[tuple[int, int, int]]:
        """Positive edges ``(source, generator, target)``."""
        out = []
        for v in range(self.num_vertices):
            for g in range(self.rank):
                t = self.table[v, 2 * g]
                if t >= 0:
                    out.append((v, g, int(t)))
        return out


def _fold(rank: int, words: list[Word]) -> tuple[list[dict[int, int]], list[int]]:
    out: list[dict[int, int]] = [{}]
    parent = [0]

    def find(v):
        root = v
        while parent[root] != root:
            root = parent[root]
        while parent[v] != root:
            parent[v], v = root, parent[v]
        return root

    def new_vertex():
        out.append({})
        parent.append(len(parent))
        return len(parent) - 1

    pending: list[tuple[int, int]] = []

    def set_edge(s, code, t):
        e = out[s].get(code)
        if e is None:
            out[s][code] = t
        else:
            pending.append((e, t))

    def drain():
        while pending:
            a, b = pending.pop()
            a, b = find(a), find(b)
            if a == b:
                continue
            if b < a:
                a, b = b, a
            parent[b] = a
            moved, out[b] = out[b], {}
            for code, t in moved.items():
                set_edge(a, code, find(t))

    for w in words:
        if not len(w):
            continue
        v = 0
        n = len(w)
        for i, (g, s) in enumerate(w.letters):
            if g >= rank:
                raise ValueError(f"generator {g} outside rank {rank}")
            code = 2 * g + (s < 0)
            v = find(v)
            t = out[v].get(code)
            if i == n - 1:
                t_new = 0
            elif t is not None:
                t_new = find(t)
            else:
                t_new = new_vertex()
            set_edge(v, code, t_new)
            set_edge(find(t_new), code ^ 1, v)
            drain()
            v = find(t_new)
    return out, [find(v) for v in range(len(parent))]


def build(generators: list[Word], rank: int | None = None) -> SubgroupGraph:
    """Folded core graph of the subgroup generated by ``generators``."""
    if rank is None:
        rank = max((w.rank_needed for w in generators), default=1) or 1
    out, root = _fold(rank, generators)
    adj: dict[int, dict[int, int]] = {}
    for v in set(root):
        adj[v] = {c: root[t] for c, t in out[v].items()}

    base = root[0]
    # trim hanging trees; the basepoint always stays
    deg = {v: len(a) for v, a in adj.items()}
    stack = [v for v, d in deg.items() if d <= 1 and v != base]
    while stack:
        v = stack.pop()
        if v not in adj:
            continue
        for c, t in adj.pop(v).items():
            if t in adj and t != v:
                adj[t].pop(c ^ 1, None)
                deg[t] -= 1
                if deg[t] <= 1 and t != base:
                    stack.append(t)

    numbering = {base: 0}
    queue = deque([base])
    while queue:
        v = queue.popleft()
        for c in sorted(adj[v]):
            t = adj[v][c]
            if t not in numbering:
                numbering[t] = len(numbering)
                queue.append(t)
    table = np.full((len(numbering), 2 * rank), -1, dtype=np.int64)
    for v, i in numbering.items():
        for c, t in adj[v].items():
            table[i, c] = numbering[t]
    return SubgroupGraph(rank, table)


def contains(g: SubgroupGraph, w: Word) -> bool:
    return g.contains(w)


def index_info(g: SubgroupGraph) -> int | None:
    """Index of the subgroup in the free group, or ``None`` when infinite."""
    if (g.table >= 0).all():
        return g.num_vertices
    return None


def rank_of_subgroup(g: SubgroupGraph) -> int:
    """Free rank from the Euler characteristic ``E - V + 1``."""
    return len(g.edges()) - g.num_vertices + 1


@dataclass(frozen=True)
class PermutationRep:
    """Right action of the free group on ``range(degree)``."""

    degree: int
    images: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        for perm in self.images:
            if len(perm) != self.degree or sorted(perm) != list(range(self.degree)):
                raise ValueError("each image must be a permutation of range(degree)")

    def act(self, point: int, w: Word) -> int:
        inv = None
        for g, s in w.letters:
            if s > 0:
                point = self.images[g][point]
            else:
                if inv is None:
                    inv = [np.argsort(p) for p in self.images]
                point = int(inv[g][point])
        return point

    def separates(self, generators: list[Word], f: Word, basepoint: int = 0) -> bool:
        """Basepoint fixed by every generator and moved by ``f``."""
        return all(self.act(basepoint, h) == basepoint for h in generators) and (
            self.act(basepoint, f) != basepoint
        )


def separating_permutation_rep(g: SubgroupGraph, f: Word) -> PermutationRep:
    """Finite permutation action in which the subgroup fixes the basepoint but ``f`` does not.

    The path of ``f`` is grafted onto the core graph, then every generator's
    partial injection is completed to a permutation by pairing leftover
    sources with leftover targets in ascending order.
    """
    if g.contains(f):
        raise NotSeparableError("not separable from a member")
    rank = max(g.rank, f.rank_needed)
    table = [[-1] * (2 * rank) for _ in range(g.num_vertices)]
    for v in range(g.num_vertices):
        table[v][: 2 * g.rank] = [int(t) for t in g.table[v]]

    v = g.basepoint
    for gen, s in f.letters:
        code = 2 * gen + (s < 0)
        t = table[v][code]
        if t < 0:
            table.append([-1] * (2 * rank))
            t = len(table) - 1
            table[v][code] = t
            table[t][code ^ 1] = v
        v = t
    degree = len(table)

    images = []
    for gen in range(rank):
        perm = [table[v][2 * gen] for v in range(degree)]
        hit = set(p for p in perm if p >= 0)
        free_targets = iter(sorted(set(range(degree)) - hit))
        perm = [p if p >= 0 else next(free_targets) for p in perm]
        images.append(tuple(perm))
    rep = PermutationRep(degree, tuple(images))
    if rep.act(g.basepoint, f) == g.basepoint:
        raise AssertionError("separating representation failed its own check")
    return rep


def membership_by_enumeration(generators: list[Word], max_length: int) -> set[Word]:
    """Reductions of all reduced words of length ``<= max_length`` in the generators.

    A brute-force stand-in for :func:`build` used as an independent oracle.
    """
    found = set()
    for n in range(max_length + 1):
        for aw in iter_reduced_words(len(generators), n):
            found.add(apply_endomorphism(generators, aw))
    return found


__all__ = [
    "NotSeparableError",
    "PermutationRep",
    "SubgroupGraph",
    "build",
    "contains",
    "index_info",
    "membership_by_enumeration",
    "rank_of_subgroup",
    "separating_permutation_rep",
]
