"""Multifold 1-perfect codes, parity extension and the semilinear S2/S4 constructions.

A semilinear S2-partition of Q_{3r} whose first cell has the dual word
``1^(2r) 0^r`` is rebuilt from a 3-cell partition ``(D, D', odd words)`` of
Q_{2r}, and every such 3-cell partition comes from an r-fold 1-perfect code of
length 2r - 1 by appending a parity bit.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .algebra import RankKind, rank_class_s2, semilinear_dual_words, suffix_permutation
from .core import (MAX_N, CubePartition, PartitionError, VertexSet, coord_bit, parity_array,
                   require_matrix, weight)


def ball_counts(C: VertexSet) -> np.ndarray:
    """``|C ∩ B(v)|`` for every radius-1 ball ``B(v)`` of Q_m."""
    counts = C.bits.astype(np.int64)
    idx = np.arange(1 << C.n, dtype=np.int64)
    for b in range(C.n):
        counts = counts + C.bits[idx ^ (1 << b)]
    return counts


def is_multifold_perfect(C: VertexSet, t: int) -> bool:
    """True iff every radius-1 ball of Q_m meets ``C`` in exactly ``t`` words."""
    return bool((ball_counts(C) == t).all())


@dataclass(frozen=True)
class MultifoldCode:
    """A t-fold 1-perfect code of length m."""

    m: int
    t: int
    words: VertexSet

    def __post_init__(self):
        if self.words.n != self.m:
            raise ValueError("word length does not match m")
        if not is_multifold_perfect(self.words, self.t):
            raise PartitionError(f"not a {self.t}-fold 1-perfect code of length {self.m}")

    def __len__(self) -> int:
        return len(self.words)


def hamming_code(m_param: int) -> MultifoldCode:
    """The linear Hamming code of length ``2**m_param - 1``.

    Column ``i`` of the parity-check matrix is the binary expansion of ``i + 1``.
    """
    if m_param < 2:
        raise ValueError("m_param must be at least 2")
    length = (1 << m_param) - 1
    if length > MAX_N:
        raise ValueError(f"code length {length} exceeds the cap {MAX_N}")
    x = np.arange(1 << length, dtype=np.int64)
    syndrome = np.zeros_like(x)
    for i in range(length):
        syndrome ^= ((x >> (length - 1 - i)) & 1) * (i + 1)
    return MultifoldCode(length, 1, VertexSet(length, syndrome == 0))


def multifold_union(base: MultifoldCode, translates: Sequence[int]) -> MultifoldCode:
    """Union of the translates ``base + e`` over the given weight-1 words ``e``."""
    translates = list(translates)
    if base.t != 1:
        raise ValueError("base must be a 1-fold code")
    if len(set(translates)) != len(translates):
        raise ValueError("translates must be distinct")
    bits = np.zeros(1 << base.m, dtype=bool)
    for e in translates:
        if not 0 <= e < 1 << base.m or weight(e) != 1:
            raise ValueError(f"translate {e} is not a weight-1 word of length {base.m}")
        shifted = base.words.translate(e).bits
        if (bits & shifted).any():
            raise PartitionError(f"translate by {e} overlaps the previous ones")
        bits |= shifted
    return MultifoldCode(base.m, len(translates), VertexSet(base.m, bits))


def extend_parity(code: MultifoldCode | VertexSet) -> VertexSet:
    """Append an overall parity bit (as the lowest bit) to every word."""
    words = code.words if isinstance(code, MultifoldCode) else code
    idx = words.indices()
    return VertexSet.from_indices(words.n + 1, (idx << 1) | parity_array(idx))


def puncture_last(D: VertexSet) -> VertexSet:
    """Delete the last coordinate of every word."""
    return VertexSet.from_indices(D.n - 1, np.unique(D.indices() >> 1))


def eperf_partition(D: VertexSet) -> CubePartition:
    """The 3-cell partition ``(D, even words minus D, odd words)`` of Q_{2r}."""
    par = parity_array(np.arange(1 << D.n))
    if (par[D.bits] != 0).any():
        raise PartitionError("D contains odd-weight words")
    labels = np.where(par == 1, 2, np.where(D.bits, 0, 1))
    return CubePartition(D.n, labels, 3)


def _suffix_masks(r: int):
    """Arrays over Q_{3r}: the prefix ``u`` in Q_{2r}, the suffix ``y`` in Q_r."""
    x = np.arange(1 << (3 * r), dtype=np.int64)
    return x >> r, x & ((1 << r) - 1)


def semi_to_s2(dp: CubePartition, sign: int = 0) -> CubePartition:
    """Build the S2(3r)-partition with dual word ``1^(2r) 0^r`` from an EPERF partition of Q_{2r}.

    ``C = D x Q_{r,even}  ∪  D' x Q_{r,odd}``; for ``sign=1`` the result is
    translated by the first unit vector so that ``<c, 1^(2r)0^r> = 1`` on C.
    """
    if sign not in (0, 1):
        raise ValueError("sign must be 0 or 1")
    if dp.n % 2 or dp.n == 0:
        raise PartitionError("EPERF partitions live in an even dimension")
    require_matrix(dp, "EPERF")
    par = parity_array(np.arange(1 << dp.n))
    if not np.array_equal(dp.labels == 2, par == 1):
        raise PartitionError("cell 2 of the EPERF partition is not the set of odd words")
    r = dp.n // 2
    u, y = _suffix_masks(r)
    ypar = parity_array(y)
    cell = dp.labels[u]
    in_c = ((cell == 0) & (ypar == 0)) | ((cell == 1) & (ypar == 1))
    out = CubePartition(3 * r, np.where(in_c, 0, 1), 2)
    if sign:
        out = out.translate(coord_bit(3 * r, 0))
    require_matrix(out, "S2", "semilinear construction output")
    return out


def _sign_of(C: VertexSet, v: int) -> int | None:
    ips = parity_array(C.indices() & v)
    return int(ips[0]) if (ips == ips[0]).all() else None


def s2_to_semi(p: CubePartition) -> tuple[CubePartition, int]:
    """Inverse of :func:`semi_to_s2` for S2-partitions having the dual word ``1^(2r) 0^r``."""
    require_matrix(p, "S2")
    r = p.n // 3
    v = ((1 << (2 * r)) - 1) << r
    sign = _sign_of(p.cell(0), v)
    if sign is None:
        raise PartitionError("1^(2r)0^r is not a dual word of the first cell")
    if sign:
        p = p.translate(coord_bit(p.n, 0))
    C = p.cell(0).bits
    u = np.arange(1 << (2 * r), dtype=np.int64)
    par = parity_array(u)
    labels = np.where(par == 1, 2, np.where(C[u << r], 0, 1))
    dp = CubePartition(2 * r, labels, 3)
    require_matrix(dp, "EPERF", "semilinear reduction output")
    return dp, sign


def semilinear_complete_to_s4(p: CubePartition) -> CubePartition:
    """Complete a semilinear S2-partition ``(C, rest)`` to an S4-partition with first cell ``C``.

    In suffix position, cell 1 is the even-prefix part of the complement and
    the odd-prefix words ``u y`` are split by the parity of the first r bits of
    ``u`` plus the weight of ``y``.
    """
    rc = rank_class_s2(p)
    if rc.kind is RankKind.FULL_RANK:
        raise PartitionError("full-rank S2-partitions have no dual word to complete along")
    n, r = p.n, p.n // 3
    a = int(semilinear_dual_words(p.cell(0))[0])
    perm = suffix_permutation(a, n)
    q = p.permute(perm)
    v = ((1 << (2 * r)) - 1) << r
    shift = coord_bit(n, 0) if _sign_of(q.cell(0), v) else 0
    q = q.translate(shift)
    u, y = _suffix_masks(r)
    upar = parity_array(u)
    in_c = q.labels == 0
    split = (parity_array(u >> r) + parity_array(y)) & 1
    labels = np.where(in_c, 0, np.where(upar == 0, 1, 2 + split))
    out = CubePartition(n, labels, 4).translate(shift).permute(np.argsort(perm))
    require_matrix(out, "S4", "semilinear completion output")
    return out
