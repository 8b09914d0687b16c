"""Hamming graph H(r,4): Latin hypercubes, MDS codes, the lift to Q_3r,
concatenation with inner S4-partitions, and reducibility detection.

A vertex of H(r,4) is an integer in ``[0, 4**r)``; coordinate ``j`` (0-based)
is the base-4 digit ``r - 1 - j``. Symbols are identified with Z_2^2, so the
three neighbors along coordinate ``j`` are ``v ^ (s << 2*(r-1-j))``, s = 1, 2, 3.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations
from typing import Sequence

import numpy as np

from .core import (ANTIPODAL_PAIRS, PAIR_OF, CubePartition, NotEquitable, PartitionError,
                   QuotientMismatch, _quotient_from_counts, antipodal_partition, has_matrix,
                   permute_table, quotient_matrix, require_matrix, standard_matrix)

MAX_R = 14

# symbol v of H(r,4) lifts to the antipodal pair ANTIPODAL_PAIRS[v] of Q_3
LIFT_TABLE = ANTIPODAL_PAIRS


@dataclass(frozen=True, eq=False)
class HammingPartition:
    """Labeling of the 4**r vertices of H(r,4) by cells ``0..k-1``."""

    r: int
    labels: np.ndarray
    k: int | None = None

    def __post_init__(self):
        if not 0 <= self.r <= MAX_R:
            raise ValueError(f"r={self.r} outside 0..{MAX_R}")
        labels = np.asarray(self.labels)
        if labels.shape != (4 ** self.r,):
            raise ValueError(f"expected {4 ** self.r} labels, got shape {labels.shape}")
        k = int(labels.max()) + 1 if self.k is None else int(self.k)
        if labels.min() < 0 or labels.max() >= k:
            raise ValueError(f"cell label out of range 0..{k - 1}")
        if (np.bincount(labels.astype(np.int64), minlength=k) == 0).any():
            raise PartitionError("empty cell")
        labels = labels.astype(np.int8)
        labels.flags.writeable = False
        object.__setattr__(self, "labels", labels)
        object.__setattr__(self, "k", k)

    def cell(self, i: int) -> np.ndarray:
        return np.flatnonzero(self.labels == i)

    def as_array(self) -> np.ndarray:
        """Labels reshaped to ``(4,) * r``, axis ``j`` = coordinate ``j``."""
        return self.labels.reshape((4,) * self.r)

    def __eq__(self, other) -> bool:
        if not isinstance(other, HammingPartition):
            return NotImplemented
        return self.r == other.r and self.k == other.k and np.array_equal(self.labels, other.labels)

    def __hash__(self) -> int:
        return hash((self.r, self.k, self.labels.tobytes()))

    def __repr__(self) -> str:
        return f"HammingPartition(r={self.r}, k={self.k})"


def hamming_neighbor_counts(labels: np.ndarray, r: int, k: int) -> np.ndarray:
    onehot = np.eye(k, dtype=np.int32)[labels]
    idx = np.arange(4 ** r, dtype=np.int64)
    counts = np.zeros((4 ** r, k), dtype=np.int32)
    for j in range(r):
        for s in (1, 2, 3):
            counts += onehot[idx ^ (s << (2 * j))]
    return counts


def quotient_matrix_h4(p: HammingPartition):
    """Quotient matrix of ``p`` over H(r,4), or :class:`NotEquitable`."""
    counts = hamming_neighbor_counts(p.labels.astype(np.int64), p.r, p.k)
    return _quotient_from_counts(p.labels.astype(np.int64), counts, p.k)


def h4_kind(p: HammingPartition) -> str | None:
    """Which of S2, S3, S4 (with 3r in place of n) ``p`` realizes, if any."""
    S = quotient_matrix_h4(p)
    if isinstance(S, NotEquitable) or p.r == 0:
        return None
    for kind in ("S2", "S3", "S4"):
        expected = standard_matrix(kind, 3 * p.r)
        if expected.shape == S.shape and np.array_equal(S, expected):
            return kind
    return None


def require_h4(p: HammingPartition, kind: str, what: str = "input") -> None:
    expected = standard_matrix(kind, 3 * p.r)
    S = quotient_matrix_h4(p)
    if isinstance(S, NotEquitable):
        raise QuotientMismatch(f"{what}: {S}")
    if S.shape != expected.shape or not np.array_equal(S, expected):
        raise QuotientMismatch(f"{what}: quotient matrix {S.tolist()} is not the {kind} analogue")


def is_latin(p: HammingPartition) -> bool:
    return p.k == 4 and h4_kind(p) == "S4"


def linear_latin(r: int) -> HammingPartition:
    """The Latin r-cube ``v_1 ^ v_2 ^ ... ^ v_r`` over the alphabet Z_2^2."""
    if r < 1:
        raise ValueError("r must be at least 1")
    idx = np.arange(4 ** r, dtype=np.int64)
    labels = np.zeros_like(idx)
    for j in range(r):
        labels ^= (idx >> (2 * j)) & 3
    return HammingPartition(r, labels, 4)


def enumerate_latin_squares() -> list[HammingPartition]:
    """All Latin squares of order 4 as Latin 2-cubes, in lexicographic order."""
    squares = []
    grid = [[-1] * 4 for _ in range(4)]

    def fill(cell: int):
        if cell == 16:
            squares.append(HammingPartition(2, np.array(grid).reshape(16), 4))
            return
        a, b = divmod(cell, 4)
        for s in range(4):
            if s in grid[a][:b] or any(grid[i][b] == s for i in range(a)):
                continue
            grid[a][b] = s
            fill(cell + 1)
        grid[a][b] = -1

    fill(0)
    return squares


def mds_from_latin(p: HammingPartition) -> HammingPartition:
    """The MDS code ``{v i : v in C_i}`` in H(r+1,4), as a 2-cell partition (code = cell 0)."""
    if p.k != 4:
        raise PartitionError("a Latin hypercube has four cells")
    require_h4(p, "S4")
    idx = np.arange(4 ** (p.r + 1), dtype=np.int64)
    in_code = p.labels[idx >> 2] == (idx & 3)
    out = HammingPartition(p.r + 1, np.where(in_code, 0, 1), 2)
    require_h4(out, "S2", "MDS output")
    return out


def latin_from_mds(code: HammingPartition) -> HammingPartition:
    """Latin r-cube with cells ``C_i = {v : v i in C}`` from an MDS code in H(r+1,4)."""
    if code.k != 2 or code.r < 2:
        raise PartitionError("expected a 2-cell partition of H(r+1,4) with r >= 1")
    require_h4(code, "S2")
    fibers = (code.labels == 0).reshape(-1, 4)
    if not (fibers.sum(axis=1) == 1).all():
        raise PartitionError("code does not meet every last-coordinate line once")
    out = HammingPartition(code.r - 1, np.argmax(fibers, axis=1), 4)
    require_h4(out, "S4", "Latin output")
    return out


def _symbol_index(symbols: list[np.ndarray]) -> np.ndarray:
    """Combine per-coordinate symbol arrays (coordinate 0 first) into H(r,4) indices."""
    idx = np.zeros_like(symbols[0])
    for s in symbols:
        idx = (idx << 2) | s
    return idx


def _matrix_kind(p: HammingPartition) -> str:
    kind = h4_kind(p)
    if kind is None:
        raise QuotientMismatch("outer partition is not an S2, S3 or S4 analogue on H(r,4)")
    return kind


def lift(p: HammingPartition) -> CubePartition:
    """Lift an equitable partition of H(r,4) to Q_3r by replacing symbol v with the pair T_v."""
    S = quotient_matrix_h4(p)
    if isinstance(S, NotEquitable):
        raise QuotientMismatch(f"cannot lift: {S}")
    n = 3 * p.r
    x = np.arange(1 << n, dtype=np.int64)
    symbols = [PAIR_OF[(x >> (3 * (p.r - 1 - j))) & 7] for j in range(p.r)]
    out = CubePartition(n, p.labels[_symbol_index(symbols)], p.k)
    S_out = quotient_matrix(out)
    if isinstance(S_out, NotEquitable) or not np.array_equal(S_out, S):
        raise AssertionError("lift changed the quotient matrix")
    return out


def concat(p: HammingPartition, inners: Sequence[CubePartition]) -> CubePartition:
    """Concatenate an outer partition of H(r,4) with one inner S4-partition per coordinate.

    Inner ``j`` occupies the ``j``-th contiguous coordinate block of the result.
    """
    inners = list(inners)
    if len(inners) != p.r:
        raise PartitionError(f"need {p.r} inner partitions, got {len(inners)}")
    for j, inner in enumerate(inners):
        try:
            require_matrix(inner, "S4", f"inner partition {j}")
        except (QuotientMismatch, ValueError) as exc:
            raise PartitionError(f"inner partition {j} is not an S4-partition: {exc}") from exc
    kind = _matrix_kind(p)
    N = sum(inner.n for inner in inners)
    x = np.arange(1 << N, dtype=np.int64)
    symbols, shift = [], N
    for inner in inners:
        shift -= inner.n
        symbols.append(inner.labels.astype(np.int64)[(x >> shift) & ((1 << inner.n) - 1)])
    out = CubePartition(N, p.labels[_symbol_index(symbols)], p.k)
    require_matrix(out, kind, "concatenation output")
    return out


def clique_balance_check(p: HammingPartition, i: int) -> bool:
    """True iff cell ``i`` meets every line (4-clique) of H(r,4) in ``|cell| / 4**(r-1)`` vertices."""
    if p.r == 0:
        return False
    size = int((p.labels == i).sum())
    if size % 4 ** (p.r - 1):
        return False
    target = size // 4 ** (p.r - 1)
    cube = (p.labels == i).reshape((4,) * p.r)
    return all(bool((cube.sum(axis=j) == target).all()) for j in range(p.r))


@dataclass(frozen=True)
class ReducibilityReport:
    """Result of :func:`detect_reducible`.

    For a reducible partition, ``blocks`` lists the coordinate blocks,
    ``inners`` the S4-partition on each block (coordinates in increasing
    order) and ``outer`` the partition of H(len(blocks), 4) such that
    ``concat(outer, inners)`` reproduces the input after moving the blocks to
    contiguous positions with ``perm``.
    """

    reducible: bool
    blocks: tuple = ()
    inners: tuple = ()
    outer: HammingPartition | None = None
    perm: tuple = field(default=())

    def __bool__(self) -> bool:
        return self.reducible


def _block_classes(labels: np.ndarray, n: int, block: tuple[int, ...]):
    """If the label depends on the block coordinates only through 4 classes, return them."""
    rest = tuple(i for i in range(n) if i not in block)
    grid = permute_table(labels, n, block + rest).reshape(1 << len(block), 1 << len(rest))
    rows, inverse = np.unique(grid, axis=0, return_inverse=True)
    if len(rows) != 4:
        return None
    part = CubePartition(len(block), inverse.reshape(-1), 4)
    return part if has_matrix(part, "S4") else None


def _exact_covers(n: int, good: dict[tuple, CubePartition]):
    """Partitions of the coordinates into at least two good blocks, in lexicographic order."""
    by_first: dict[int, list[tuple]] = {}
    for block in good:
        by_first.setdefault(block[0], []).append(block)

    def extend(covered: frozenset, chosen: list):
        if len(covered) == n:
            if len(chosen) >= 2:
                yield list(chosen)
            return
        first = min(set(range(n)) - covered)
        for block in by_first.get(first, ()):
            if covered.isdisjoint(block):
                chosen.append(block)
                yield from extend(covered | frozenset(block), chosen)
                chosen.pop()

    yield from extend(frozenset(), [])


def detect_reducible(p: CubePartition, kind: str | None = None) -> ReducibilityReport:
    """Search for a concatenation decomposition of an S2- or S4-partition.

    A block of coordinates is *good* when the partition depends on those
    coordinates only through an S4-partition of the block. Every block of a
    decomposition is good, so decompositions are found as exact covers of the
    coordinates by good blocks; each candidate is confirmed by checking the
    induced outer partition on H(r,4) and re-running the concatenation.
    """
    if kind is None:
        kind = "S4" if p.k == 4 else "S2"
    require_matrix(p, kind)
    n = p.n
    sizes = [s for s in range(3, n - 2) if s % 3 == 0]
    good: dict[tuple, CubePartition] = {}
    for s in sizes:
        for block in combinations(range(n), s):
            part = _block_classes(p.labels, n, block)
            if part is not None:
                good[block] = part
    for blocks in _exact_covers(n, good):
        perm = tuple(i for block in blocks for i in block)
        labels = permute_table(p.labels, n, perm)
        inners = [good[block] for block in blocks]
        x = np.arange(1 << n, dtype=np.int64)
        symbols, shift = [], n
        for inner in inners:
            shift -= inner.n
            symbols.append(inner.labels.astype(np.int64)[(x >> shift) & ((1 << inner.n) - 1)])
        outer_labels = np.zeros(4 ** len(blocks), dtype=np.int64)
        outer_labels[_symbol_index(symbols)] = labels
        outer = HammingPartition(len(blocks), outer_labels, p.k)
        if h4_kind(outer) != kind:
            continue
        if concat(outer, inners) != CubePartition(n, labels, p.k):
            continue
        return ReducibilityReport(True, tuple(blocks), tuple(inners), outer, perm)
    return ReducibilityReport(False)


def lift_table_partition() -> CubePartition:
    """The lift table as a partition of Q_3, checked to be the antipodal S4(3)-partition."""
    part = antipodal_partition()
    require_matrix(part, "S4", "lift table")
    return part
