"""Canonical forms of functions and vertex sets under the hypercube isometry group.

The canonical table is the lexicographically least table over all isometries
``alpha`` (and, for functions, all value renamings ``beta``). An isometry is
built one coordinate at a time: choosing a translation ``s`` fixes entry 0 of
the image, and choosing which old coordinate becomes new coordinate
``n - 1 - k`` fixes the entries with indices in ``[2**k, 2**(k+1))``. Value
renaming is forced by order of first appearance, so branches with a larger
block are cut as soon as they appear. Candidates are processed level by level
in batches; every surviving branch at the bottom is an automorphism.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import factorial

import numpy as np

from ..algebra import affine_dual, function_rank
from ..core import VertexSet, permute_vertex, popcount_array, walsh_transform
from ..resilient import VbFunction
from .equivalence import Equivalence, group_order

BATCH = 4096


def _pack(rows: np.ndarray, width: int) -> np.ndarray:
    """Pack small nonnegative values ``width`` bits each into uint64 words, most significant first.

    Comparing packed rows lexicographically word by word is the same as
    comparing the original rows.
    """
    per = 64 // width
    C, W = rows.shape
    pad = -W % per
    if pad:
        rows = np.concatenate([rows, np.zeros((C, pad), dtype=rows.dtype)], axis=1)
    rows = rows.reshape(C, -1, per).astype(np.uint64)
    shifts = (np.uint64(width) * np.arange(per - 1, -1, -1, dtype=np.uint64))
    return np.bitwise_or.reduce(rows << shifts, axis=2)


def _least_row(packed: np.ndarray) -> int:
    cand = np.arange(packed.shape[0])
    for col in range(packed.shape[1]):
        vals = packed[cand, col]
        cand = cand[vals == vals.min()]
        if cand.size == 1:
            break
    return int(cand[0])


@dataclass
class _Search:
    table: np.ndarray
    n: int
    relabel: bool
    width: int
    best: list
    blocks: list
    count: int = 0
    witness: tuple | None = None

    def descend(self, k, verts, used, cmap, nxt):
        n = self.n
        if k > n:
            self.count += verts.shape[0]
            if self.witness is None:
                self.witness = (verts[0].copy(), cmap[0].copy())
            return
        ci, cc = np.nonzero(~used)
        nv = verts[ci] ^ (np.int32(1) << (n - 1 - cc)).astype(np.int32)[:, None]
        raw = self.table[nv]
        if self.relabel:
            m = cmap[ci].copy()
            nx = nxt[ci].copy()
            rows = np.arange(len(ci))
            mapped = m[rows[:, None], raw]
            while True:
                un = mapped < 0
                pending = np.nonzero(un.any(axis=1))[0]
                if pending.size == 0:
                    break
                col = raw[pending, un[pending].argmax(axis=1)]
                m[pending, col] = nx[pending]
                nx[pending] += 1
                mapped[pending] = m[pending[:, None], raw[pending]]
        else:
            m, nx, mapped = cmap[ci], nxt[ci], raw
        packed = _pack(mapped, self.width)
        i = _least_row(packed)
        low = tuple(packed[i].tolist())
        if len(self.best) > k:
            if low > self.best[k]:
                return
            if low < self.best[k]:
                del self.best[k:], self.blocks[k:]
                self.best.append(low)
                self.blocks.append(mapped[i].copy())
                self.count, self.witness = 0, None
        else:
            self.best.append(low)
            self.blocks.append(mapped[i].copy())
        sel = (packed == packed[i]).all(axis=1)
        verts = np.concatenate([verts[ci[sel]], nv[sel]], axis=1)
        used = used[ci[sel]].copy()
        used[np.arange(used.shape[0]), cc[sel]] = True
        cmap, nxt = m[sel], nx[sel]
        for lo in range(0, verts.shape[0], BATCH):
            hi = lo + BATCH
            self.descend(k + 1, verts[lo:hi], used[lo:hi], cmap[lo:hi], nxt[lo:hi])


def _lexmin(table: np.ndarray, n: int, relabel: bool, nvals: int):
    table = np.asarray(table, dtype=np.int16)
    N = 1 << n
    s = np.arange(N, dtype=np.int32)
    cmap = np.full((N, nvals), -1, dtype=np.int16)
    if relabel:
        cmap[s, table] = 0
        first = np.zeros(N, dtype=np.int64)
    else:
        first = table.copy()
    low = int(first.min())
    search = _Search(table, n, relabel, max(1, (nvals - 1).bit_length()), [(low,)], [np.array([low])])
    keep = first == low
    verts = s[keep][:, None]
    used = np.zeros((verts.shape[0], n), dtype=bool)
    nxt = np.ones(verts.shape[0], dtype=np.int16)
    cmap = cmap[keep]
    for lo in range(0, verts.shape[0], BATCH):
        hi = lo + BATCH
        search.descend(1, verts[lo:hi], used[lo:hi], cmap[lo:hi], nxt[lo:hi])
    return np.concatenate(search.blocks), search.count, search.witness


def _witness_equivalence(n: int, nvals: int, witness, relabel: bool) -> Equivalence:
    verts, cmap = witness
    s = int(verts[0])
    # new coordinate n-1-k took old coordinate whose bit is verts[2**k] ^ s
    perm = [0] * n
    for k in range(n):
        bit = int(verts[1 << k]) ^ s
        perm[n - 1 - k] = n - bit.bit_length()
    translation = permute_vertex(s, n, perm)
    if relabel:
        beta = [int(v) for v in cmap]
        free = iter(v for v in range(nvals) if v not in beta)
        beta = tuple(v if v >= 0 else next(free) for v in beta)
    else:
        beta = tuple(range(nvals))
    return Equivalence(tuple(perm), translation, beta)


@dataclass(frozen=True)
class Canonical:
    """Result of a canonical-form computation.

    ``form = apply(witness, f)`` and ``automorphisms`` counts the group
    elements fixing ``f``; the orbit size is the group order divided by it.
    """

    form: VbFunction
    witness: Equivalence
    automorphisms: int

    @property
    def orbit_size(self) -> int:
        return group_order(self.form.n, self.form.m) // self.automorphisms


def canonical(f: VbFunction) -> Canonical:
    nvals = 1 << f.m
    table, count, witness = _lexmin(f.table, f.n, True, nvals)
    e = _witness_equivalence(f.n, nvals, witness, True)
    # value renamings of values f never takes also fix f
    missing = nvals - len(np.unique(f.table))
    return Canonical(VbFunction(f.n, f.m, table), e, count * factorial(missing))


def canonical_form(f: VbFunction) -> VbFunction:
    """Lexicographically least table in the orbit of ``f``."""
    return canonical(f).form


def canonical_set(C: VertexSet) -> tuple[VertexSet, int]:
    """Least characteristic vector among all isometric images of ``C``, and ``|Aut(C)|``.

    The order is lexicographic on the characteristic string read from vertex 0,
    with 1 before 0, so the canonical set always contains vertex 0 when nonempty.
    """
    table = (~C.bits).astype(np.int64)
    canon, count, _ = _lexmin(table, C.n, False, 2)
    return VertexSet(C.n, canon == 0), count


def distance_distribution(C: VertexSet) -> np.ndarray:
    """``out[d]`` = number of ordered pairs of words of ``C`` at distance ``d``."""
    spec = walsh_transform(C.bits.astype(np.int64))
    auto = walsh_transform(spec * spec) >> C.n
    out = np.zeros(C.n + 1, dtype=np.int64)
    np.add.at(out, popcount_array(np.arange(1 << C.n)), auto)
    return out


def dual_enumerator(C: VertexSet) -> np.ndarray:
    """Weight distribution of the affine dual of ``C``."""
    return np.bincount(popcount_array(affine_dual(C).indices()), minlength=C.n + 1)


def _cells(f: VbFunction) -> list[VertexSet]:
    return [VertexSet(f.n, f.table == v) for v in range(1 << f.m) if (f.table == v).any()]


def _value_counts(f: VbFunction):
    return tuple(sorted(np.bincount(f.table, minlength=1 << f.m).tolist()))


def _rank(f: VbFunction):
    return function_rank(f) if f.m == 2 else None


def _dual_enumerators(f: VbFunction):
    return tuple(sorted(tuple(dual_enumerator(c).tolist()) for c in _cells(f)))


def _distance_distributions(f: VbFunction):
    return tuple(sorted(tuple(distance_distribution(c).tolist()) for c in _cells(f)))


SCREENS = (_value_counts, _rank, _dual_enumerators, _distance_distributions)


def invariants(f: VbFunction) -> tuple:
    """Equivalence invariants: value counts, graph rank, dual enumerators, distance distributions."""
    return (f.n, f.m) + tuple(screen(f) for screen in SCREENS)


def are_equivalent(f: VbFunction, g: VbFunction, screen: bool = True) -> bool:
    """True iff ``g = beta o f o alpha^{-1}`` for some isometry ``alpha`` and renaming ``beta``.

    Invariants are compared cheapest first and any mismatch rejects early.
    """
    if f.n != g.n or f.m != g.m:
        return False
    if screen and any(test(f) != test(g) for test in SCREENS):
        return False
    return canonical_form(f) == canonical_form(g)
