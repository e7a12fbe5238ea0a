"""Hot loops of the scanners, in two interchangeable flavours.

Each kernel exists as a numba ``@njit`` loop and as a vectorised numpy
routine with identical inputs and outputs.  ``FREESEP_BACKEND=numpy`` (or a
missing numba) selects the numpy path; ``FREESEP_BACKEND=numba`` is the
default.  Callers go through :func:`get_kernels`.

Word enumeration convention shared by both flavours: a reduced word of a
given length starting with letter code ``first`` is numbered by the mixed
radix digits of its later letters, each digit ``k`` in ``[0, 2r-1)``
standing for code ``k`` if ``k < prev ^ 1`` else ``k + 1``.  Numbering order
is therefore lexicographic in letter codes.
"""
from __future__ import annotations

import os
from types import SimpleNamespace

import numpy as np

try:
    import numba
except ImportError:  # pragma: no cover - numba is a declared dependency
    numba = None

BACKENDS = ("numba", "numpy")


def default_backend() -> str:
    name = os.environ.get("FREESEP_BACKEND", "numba").strip().lower()
    if name not in BACKENDS:
        raise ValueError(f"FREESEP_BACKEND must be one of {BACKENDS}, got {name!r}")
    if name == "numba" and numba is None:
        return "numpy"
    return name


# --------------------------------------------------------------------------
# word decoding


def decode_codes(first: int, length: int, index: int, rank: int) -> list[int]:
    """Letter codes of word number ``index`` (see module docstring)."""
    base = 2 * rank - 1
    digits = []
    for _ in range(length - 1):
        digits.append(index % base)
        index //= base
    codes = [first]
    for k in reversed(digits):
        forbidden = codes[-1] ^ 1
        codes.append(k if k < forbidden else k + 1)
    return codes


def _decode_block_np(first, length, rank, start, stop):
    n = stop - start
    base = 2 * rank - 1
    codes = np.empty((n, length), dtype=np.int64)
    codes[:, 0] = first
    idx = np.arange(start, stop, dtype=np.int64)
    digits = np.empty((n, max(length - 1, 0)), dtype=np.int64)
    for j in range(length - 2, -1, -1):
        digits[:, j] = idx % base
        idx //= base
    for j in range(1, length):
        k = digits[:, j - 1]
        forbidden = codes[:, j - 1] ^ 1
        codes[:, j] = np.where(k < forbidden, k, k + 1)
    return codes


# --------------------------------------------------------------------------
# isolation scan: which (word, exponent) pairs have f^m in H but f not in H


def _isolation_block_np(table, base, first, length, rank, start, stop, exps):
    """Boolean matrix ``(stop-start, len(exps))`` of violations."""
    codes = _decode_block_np(first, length, rank, start, stop)
    n = codes.shape[0]
    nv = table.shape[0]
    # sink row nv absorbs missing transitions
    ext = np.full((nv + 1, table.shape[1]), nv, dtype=np.int64)
    ext[:nv] = np.where(table >= 0, table, nv)

    state = np.full(n, base, dtype=np.int64)
    for j in range(length):
        state = ext[state, codes[:, j]]
    member = state == base

    # cyclic decomposition f = c core c^-1
    half = length // 2
    mirrored = np.ones(n, dtype=bool)
    conj = np.zeros(n, dtype=np.int64)
    for k in range(half):
        mirrored &= codes[:, k] == (codes[:, length - 1 - k] ^ 1)
        conj += mirrored
    core_len = length - 2 * conj

    u = np.full(n, base, dtype=np.int64)
    for k in range(half):
        step = k < conj
        u = np.where(step, ext[u, codes[:, k]], u)

    rows = np.arange(n)
    out = np.zeros((n, len(exps)), dtype=bool)
    for e, m in enumerate(exps):
        s = u.copy()
        total = m * core_len
        for t in range(int(total.max()) if n else 0):
            active = t < total
            pos = conj + np.where(active, t % np.maximum(core_len, 1), 0)
            s = np.where(active, ext[s, codes[rows, pos]], s)
        out[:, e] = (u != nv) & (s == u) & ~member
    return out


def _isolation_block_py(table, base, first, length, rank, start, stop, exps):
    nb = 2 * rank - 1
    n = stop - start
    ne = exps.shape[0]
    out = np.zeros((n, ne), dtype=np.bool_)
    codes = np.empty(length, dtype=np.int64)
    digits = np.empty(max(length - 1, 1), dtype=np.int64)
    for r in range(n):
        idx = start + r
        for j in range(length - 2, -1, -1):
            digits[j] = idx % nb
            idx //= nb
        codes[0] = first
        for j in range(1, length):
            k = digits[j - 1]
            forbidden = codes[j - 1] ^ 1
            codes[j] = k if k < forbidden else k + 1

        s = base
        for j in range(length):
            s = table[s, codes[j]]
            if s < 0:
                break
        if s == base:
            continue  # f itself is a member, never a violation

        conj = 0
        while conj < length // 2 and codes[conj] == (codes[length - 1 - conj] ^ 1):
            conj += 1
        u = base
        for j in range(conj):
            u = table[u, codes[j]]
            if u < 0:
                break
        if u < 0:
            continue
        core_len = length - 2 * conj
        for e in range(ne):
            s = u
            for _ in range(exps[e]):
                for j in range(conj, conj + core_len):
                    s = table[s, codes[j]]
                    if s < 0:
                        break
                if s < 0:
                    break
            out[r, e] = s == u
    return out


# --------------------------------------------------------------------------
# homomorphism scan into a finite group given by its multiplication table


def _assignments_np(start, stop, order, k):
    idx = np.arange(start, stop, dtype=np.int64)
    images = np.empty((stop - start, k), dtype=np.int64)
    for j in range(k - 1, -1, -1):
        images[:, j] = idx % order
        idx //= order
    return images


def _eval_np(mul, inv, identity, images, codes):
    e = np.full(images.shape[0], identity, dtype=np.int64)
    for c in codes:
        img = images[:, c >> 1]
        if c & 1:
            img = inv[img]
        e = mul[e, img]
    return e


def _homscan_block_np(mul, inv, identity, k, gen_codes, gen_offsets, f_codes, start, stop):
    """Boolean array: assignment separates ``f`` from the generated subgroup."""
    order = mul.shape[0]
    images = _assignments_np(start, stop, order, k)
    n = images.shape[0]
    gimgs = [
        _eval_np(mul, inv, identity, images, gen_codes[gen_offsets[i] : gen_offsets[i + 1]])
        for i in range(len(gen_offsets) - 1)
    ]
    fimg = _eval_np(mul, inv, identity, images, f_codes)
    rows = np.arange(n)[:, None]
    visited = np.zeros((n, order), dtype=bool)
    visited[:, identity] = True
    # t joins the closure when t * s^-1 is already in it.  Applying s = g, g^2, g^4, ...
    # in place sweeps a whole cyclic subgroup <g> in one pass.
    steps = []
    for g in gimgs:
        span = 1
        while span < order:
            steps.append(mul[:, inv[g]].T)
            g = mul[g, g]
            span *= 2
    while True:
        before = visited.copy()
        for pre in steps:
            visited |= visited[rows, pre]
        if np.array_equal(before, visited):
            break
    return ~visited[np.arange(n), fimg]


def _homscan_block_py(mul, inv, identity, k, gen_codes, gen_offsets, f_codes, start, stop):
    order = mul.shape[0]
    ngens = gen_offsets.shape[0] - 1
    n = stop - start
    out = np.zeros(n, dtype=np.bool_)
    images = np.empty(max(k, 1), dtype=np.int64)
    gimg = np.empty(2 * max(ngens, 1), dtype=np.int64)
    visited = np.zeros(order, dtype=np.bool_)
    queue = np.empty(order, dtype=np.int64)
    for r in range(n):
        idx = start + r
        for j in range(k - 1, -1, -1):
            images[j] = idx % order
            idx //= order
        for i in range(ngens):
            e = identity
            for t in range(gen_offsets[i], gen_offsets[i + 1]):
                c = gen_codes[t]
                img = images[c >> 1]
                if c & 1:
                    img = inv[img]
                e = mul[e, img]
            gimg[2 * i] = e
            gimg[2 * i + 1] = inv[e]
        fe = identity
        for t in range(f_codes.shape[0]):
            c = f_codes[t]
            img = images[c >> 1]
            if c & 1:
                img = inv[img]
            fe = mul[fe, img]

        visited[:] = False
        visited[identity] = True
        queue[0] = identity
        head, tail = 0, 1
        while head < tail:
            e = queue[head]
            head += 1
            for i in range(2 * ngens):
                t = mul[e, gimg[i]]
                if not visited[t]:
                    visited[t] = True
                    queue[tail] = t
                    tail += 1
        out[r] = not visited[fe]
    return out


# --------------------------------------------------------------------------

_NUMPY = SimpleNamespace(
    name="numpy",
    isolation_block=_isolation_block_np,
    homscan_block=_homscan_block_np,
)

_numba_kernels = None


def _build_numba():
    global _numba_kernels
    if _numba_kernels is None:
        opts = dict(cache=True, nogil=True)
        _numba_kernels = SimpleNamespace(
            name="numba",
            isolation_block=numba.njit(**opts)(_isolation_block_py),
            homscan_block=numba.njit(**opts)(_homscan_block_py),
        )
    return _numba_kernels


def get_kernels(backend: str | None = None) -> SimpleNamespace:
    backend = backend or default_backend()
    if backend == "numpy":
        return _NUMPY
    if backend == "numba":
        if numba is None:
            raise RuntimeError("numba backend requested but numba is not importable")
        return _build_numba()
    raise ValueError(f"unknown backend {backend!r}; expected one of {BACKENDS}")
