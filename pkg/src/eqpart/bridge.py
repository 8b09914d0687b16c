"""Dimension-changing correspondences between S2-, S3- and S4-partitions."""

from __future__ import annotations

import numpy as np

from .core import (PAIR_OF, CubePartition, PartitionError, VertexSet, require_matrix)


class InvarianceError(PartitionError):
    """The first cell is not invariant under translation by 0...0111."""


def is_translation_invariant(C: VertexSet, w: int) -> bool:
    """True iff ``C + w = C``."""
    return C.translate(w) == C


def split_s2_to_s3(p: CubePartition) -> CubePartition:
    """Split the complement of an S2 cell ``C`` into ``C + 0...01`` and the rest."""
    require_matrix(p, "S2")
    C = p.cell(0)
    shifted = C.translate(1)
    labels = np.where(C.bits, 0, np.where(shifted.bits, 1, 2))
    out = CubePartition(p.n, labels, 3)
    require_matrix(out, "S3", "split output")
    return out


def expand_s4_to_s2(p4: CubePartition) -> CubePartition:
    """S4(n) -> S2(n+3): ``C = union_i C_i x T_i`` over the antipodal pairs ``T_i`` of Q_3.

    The three new coordinates are appended as the lowest bits, so the result
    is invariant under translation by 0...0111.
    """
    require_matrix(p4, "S4")
    x = np.arange(1 << (p4.n + 3), dtype=np.int64)
    in_c = PAIR_OF[x & 7] == p4.labels[x >> 3]
    out = CubePartition(p4.n + 3, np.where(in_c, 0, 1), 2)
    require_matrix(out, "S2", "expansion output")
    return out


def contract_s2_to_s4(p2: CubePartition) -> CubePartition:
    """Inverse of :func:`expand_s4_to_s2` on S2(n+3)-partitions whose first cell is 7-invariant."""
    require_matrix(p2, "S2")
    if p2.n < 6:
        raise PartitionError("contraction needs n + 3 >= 6")
    C = p2.cell(0)
    if not is_translation_invariant(C, 7):
        raise InvarianceError("first cell is not invariant under translation by 0...0111")
    fibers = C.bits.reshape(-1, 8)
    counts = fibers.sum(axis=1)
    if not (counts == 2).all():
        raise PartitionError("first cell does not meet every fiber in one antipodal pair")
    labels = PAIR_OF[np.argmax(fibers, axis=1)]
    out = CubePartition(p2.n - 3, labels, 4)
    require_matrix(out, "S4", "contraction output")
    return out
