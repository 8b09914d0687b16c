"""Affine rank and affine dual of vertex sets; rank classes of S2- and S4-partitions."""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np

from .core import CubePartition, PartitionError, VertexSet, popcount_array, require_matrix, walsh_transform
from .resilient import VbFunction, function_of


def _reduce(basis: dict[int, int], v: int) -> int:
    while v:
        top = v.bit_length() - 1
        if top not in basis:
            return v
        v ^= basis[top]
    return 0


def span_basis(vectors, n: int) -> list[int]:
    """A GF(2) basis (as int bitmasks) of the span of ``vectors``."""
    basis: dict[int, int] = {}
    for v in vectors:
        v = _reduce(basis, int(v))
        if v:
            basis[v.bit_length() - 1] = v
            if len(basis) == n:
                break
    return [basis[k] for k in sorted(basis, reverse=True)]


def _nonempty(C: VertexSet) -> np.ndarray:
    idx = C.indices()
    if idx.size == 0:
        raise ValueError("affine rank/dual of an empty set is undefined")
    return idx


def affine_rank(C: VertexSet) -> int:
    """Dimension of the affine span of ``C``."""
    idx = _nonempty(C)
    c0 = int(idx[0])
    return len(span_basis(np.unique(idx ^ c0), C.n))


def affine_dual(C: VertexSet) -> VertexSet:
    """All ``v`` such that ``<c, v>`` is the same for every ``c`` in ``C``."""
    idx = _nonempty(C)
    n = C.n
    basis = span_basis(np.unique(idx ^ int(idx[0])), n)
    # reduced row echelon form over GF(2), pivots on leading bits
    rows = list(basis)
    pivots = []
    for i in range(len(rows)):
        p = rows[i].bit_length() - 1
        pivots.append(p)
        for j in range(len(rows)):
            if j != i and (rows[j] >> p) & 1:
                rows[j] ^= rows[i]
    free = [b for b in range(n) if b not in pivots]
    null = []
    for f in free:
        v = 1 << f
        for row, p in zip(rows, pivots):
            if (row >> f) & 1:
                v |= 1 << p
        null.append(v)
    words = np.zeros(1, dtype=np.int64)
    for v in null:
        words = np.concatenate([words, words ^ v])
    return VertexSet.from_indices(n, words)


def affine_dual_bruteforce(C: VertexSet) -> VertexSet:
    """Reference implementation: ``v`` is dual iff ``|W_C(v)| = |C|``."""
    _nonempty(C)
    spectrum = walsh_transform(C.bits.astype(np.int64))
    return VertexSet(C.n, np.abs(spectrum) == len(C))


class RankKind(str, Enum):
    LINEAR = "linear"
    STRICTLY_SEMILINEAR = "strictly semilinear"
    FULL_RANK = "full rank"


@dataclass(frozen=True)
class RankClass:
    kind: RankKind
    rank: int

    @property
    def semilinear(self) -> bool:
        return self.kind is not RankKind.FULL_RANK

    def __str__(self) -> str:
        return f"{self.kind.value} (rank {self.rank})"


_KINDS = (RankKind.LINEAR, RankKind.STRICTLY_SEMILINEAR, RankKind.FULL_RANK)


def rank_class_s2(p: CubePartition) -> RankClass:
    """Rank class of an S2-partition, read off the affine rank of its first cell."""
    require_matrix(p, "S2")
    rank = affine_rank(p.cell(0))
    return RankClass(_KINDS[rank - (p.n - 2)], rank)


def graph_of(f: VbFunction) -> VertexSet:
    """The graph ``{x || f(x)}`` of an (n, 2)-function as a subset of Q_{n+2}."""
    if f.m != 2:
        raise ValueError("graph_of expects an (n, 2)-function")
    x = np.arange(1 << f.n, dtype=np.int64)
    return VertexSet.from_indices(f.n + 2, (x << 2) | f.table)


def function_rank(f: VbFunction) -> int:
    return affine_rank(graph_of(f))


def rank_class_s4(p: CubePartition) -> RankClass:
    """Rank class of an S4-partition: graph rank n, n+1 or n+2."""
    require_matrix(p, "S4")
    rank = function_rank(function_of(p, 2))
    return RankClass(_KINDS[rank - p.n], rank)


def rank_relation_check(p4: CubePartition) -> bool:
    """Check that the graph rank of ``p4`` plus one equals the rank of its S2 expansion."""
    from .bridge import expand_s4_to_s2

    require_matrix(p4, "S4")
    expanded = expand_s4_to_s2(p4)
    return function_rank(function_of(p4, 2)) + 1 == affine_rank(expanded.cell(0))


def semilinear_dual_words(C: VertexSet) -> np.ndarray:
    """Nonzero dual words of ``C`` with weight 2n/3, in increasing index order."""
    dual = affine_dual(C).indices()
    return dual[(dual != 0) & (popcount_array(dual) == 2 * C.n // 3)]


def suffix_permutation(a: int, n: int) -> tuple[int, ...]:
    """Coordinate permutation carrying the support of ``a`` to the leading positions."""
    ones = [i for i in range(n) if (a >> (n - 1 - i)) & 1]
    zeros = [i for i in range(n) if not (a >> (n - 1 - i)) & 1]
    return tuple(ones + zeros)


def move_dual_to_suffix(p: CubePartition) -> tuple[CubePartition, tuple[int, ...]]:
    """Permute coordinates so that ``1^(2n/3) 0^(n/3)`` is a dual word of cell 0.

    Returns the permuted partition and the permutation (``perm[j]`` is the old
    coordinate moved to position ``j``). With several candidates the smallest
    dual word is used.
    """
    require_matrix(p, "S2")
    words = semilinear_dual_words(p.cell(0))
    if words.size == 0:
        raise PartitionError("full-rank S2-partition has no nonzero dual word")
    perm = suffix_permutation(int(words[0]), p.n)
    return p.permute(perm), perm
