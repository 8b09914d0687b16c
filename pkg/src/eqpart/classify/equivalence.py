"""Equivalence of (n,m)-functions: cube isometries on the input, value permutations on the output."""

from __future__ import annotations

from dataclasses import dataclass
from itertools import permutations
from typing import Iterator

import numpy as np

from ..core import permute_table, permute_vertex
from ..resilient import VbFunction


@dataclass(frozen=True)
class Equivalence:
    """The map ``f -> beta o f o alpha^{-1}`` with ``alpha(x) = P(x) ^ translation``.

    ``P`` moves old coordinate ``perm[j]`` to position ``j``; ``beta[v]`` is the
    new name of value ``v``.
    """

    perm: tuple
    translation: int
    beta: tuple

    @property
    def n(self) -> int:
        return len(self.perm)

    @classmethod
    def identity(cls, n: int, m: int = 2) -> "Equivalence":
        return cls(tuple(range(n)), 0, tuple(range(1 << m)))

    def alpha(self, x: int) -> int:
        return permute_vertex(x, self.n, self.perm) ^ self.translation

    def compose(self, first: "Equivalence") -> "Equivalence":
        """``self o first``: apply ``first``, then ``self``."""
        perm = tuple(first.perm[j] for j in self.perm)
        translation = permute_vertex(first.translation, self.n, self.perm) ^ self.translation
        beta = tuple(self.beta[v] for v in first.beta)
        return Equivalence(perm, translation, beta)

    def inverse(self) -> "Equivalence":
        inv = tuple(int(i) for i in np.argsort(self.perm))
        translation = permute_vertex(self.translation, self.n, inv)
        beta = tuple(int(i) for i in np.argsort(self.beta))
        return Equivalence(inv, translation, beta)


def apply(e: Equivalence, f: VbFunction) -> VbFunction:
    """The function ``g`` with ``g(alpha(x)) = beta(f(x))``."""
    if e.n != f.n or len(e.beta) != 1 << f.m:
        raise ValueError("equivalence and function dimensions differ")
    moved = permute_table(f.table, f.n, e.perm)
    idx = np.arange(1 << f.n, dtype=np.int64)
    return VbFunction(f.n, f.m, np.asarray(e.beta)[moved[idx ^ e.translation]])


def group_order(n: int, m: int = 2) -> int:
    from math import factorial

    return factorial(n) * (1 << n) * factorial(1 << m)


def isometry_tables(n: int) -> np.ndarray:
    """All ``n! * 2**n`` isometries of Q_n as index arrays ``idx[a, y] = alpha_a^{-1}(y)``.

    Only meant for small n (test oracles and exhaustive checks).
    """
    y = np.arange(1 << n, dtype=np.int64)
    perms = []
    for perm in permutations(range(n)):
        x = np.zeros_like(y)
        for j, old in enumerate(perm):
            x |= ((y >> (n - 1 - j)) & 1) << (n - 1 - old)
        perms.append(x)
    perms = np.array(perms)
    return (perms[:, None, :] ^ y[None, :, None]).reshape(-1, 1 << n)


def relabel_first_occurrence(tables: np.ndarray) -> np.ndarray:
    """Rename values row by row in order of first appearance (0, 1, 2, ...)."""
    tables = np.atleast_2d(np.asarray(tables, dtype=np.int64))
    out = np.empty(tables.shape, dtype=np.int64)
    rows = np.arange(tables.shape[0])
    nxt = np.zeros(tables.shape[0], dtype=np.int64)
    mapping = np.full((tables.shape[0], int(tables.max()) + 1), -1, dtype=np.int64)
    for col in range(tables.shape[1]):
        vals = tables[:, col]
        new = mapping[rows, vals] < 0
        mapping[rows[new], vals[new]] = nxt[new]
        nxt[new] += 1
        out[:, col] = mapping[rows, vals]
    return out


def orbit_keys(f: VbFunction, relabel: bool = True) -> set[bytes]:
    """Brute-force orbit of ``f``: every image under the full group, up to value renaming.

    Independent of the pruned canonical search; used as its oracle for n <= 6.
    """
    images = f.table.astype(np.int64)[isometry_tables(f.n)]
    if relabel:
        images = relabel_first_occurrence(images)
    return {row.astype(np.int8).tobytes() for row in images}


def iter_group(n: int, m: int = 2) -> Iterator[Equivalence]:
    """Every group element, for exhaustive checks on tiny n."""
    for perm in permutations(range(n)):
        for t in range(1 << n):
            for beta in permutations(range(1 << m)):
                yield Equivalence(perm, t, beta)
