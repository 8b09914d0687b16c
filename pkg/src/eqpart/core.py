"""Binary hypercube Q_n: vertex sets, partitions, subcubes, Walsh transform,
and equitable-partition verification.

Vertex convention: a vertex of Q_n is an integer in ``[0, 2**n)``. Coordinate
``i`` (0-based, so the i-th letter of the word read left to right) lives in bit
``n - 1 - i``. The last coordinate is the least-significant bit, so suffix
operations such as "translate by 0...0111" are ``x ^ 7``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

MAX_N = 28


class PartitionError(ValueError):
    """Raised when an input partition does not satisfy an operation's precondition."""


class QuotientMismatch(PartitionError):
    """The partition is not equitable with the required quotient matrix."""


def check_dimension(n: int) -> None:
    if not 0 <= n <= MAX_N:
        raise ValueError(f"dimension n={n} outside supported range 0..{MAX_N}")


def coord_bit(n: int, i: int) -> int:
    """Bit mask of coordinate ``i`` (0-based) in Q_n."""
    return 1 << (n - 1 - i)


def word(bits: str) -> int:
    """Parse a binary word such as ``"0111"`` into a vertex index."""
    return int(bits, 2) if bits else 0


def word_str(v: int, n: int) -> str:
    return format(v, f"0{n}b") if n else ""


def weight(v: int) -> int:
    """Hamming weight of a vertex."""
    return int(v).bit_count()


def popcount_array(a: np.ndarray) -> np.ndarray:
    a = np.asarray(a, dtype=np.int64)
    out = np.zeros(a.shape, dtype=np.int64)
    x = a.copy()
    while x.any():
        out += x & 1
        x >>= 1
    return out


def parity_array(a: np.ndarray) -> np.ndarray:
    return popcount_array(a) & 1


@dataclass(frozen=True, eq=False)
class VertexSet:
    """Subset of Q_n stored as a boolean characteristic array of length 2**n."""

    n: int
    bits: np.ndarray

    def __post_init__(self):
        check_dimension(self.n)
        bits = np.asarray(self.bits, dtype=bool)
        if bits.shape != (1 << self.n,):
            raise ValueError(f"expected {1 << self.n} bits, got shape {bits.shape}")
        bits = bits.copy()
        bits.flags.writeable = False
        object.__setattr__(self, "bits", bits)

    @classmethod
    def from_indices(cls, n: int, indices: Iterable[int]) -> "VertexSet":
        check_dimension(n)
        bits = np.zeros(1 << n, dtype=bool)
        idx = np.fromiter((int(i) for i in indices), dtype=np.int64)
        if idx.size and (idx.min() < 0 or idx.max() >= 1 << n):
            raise ValueError("vertex index out of range")
        bits[idx] = True
        return cls(n, bits)

    @classmethod
    def full(cls, n: int) -> "VertexSet":
        return cls(n, np.ones(1 << n, dtype=bool))

    def indices(self) -> np.ndarray:
        return np.flatnonzero(self.bits)

    def __len__(self) -> int:
        return int(self.bits.sum())

    def __contains__(self, v: int) -> bool:
        return 0 <= v < len(self.bits) and bool(self.bits[v])

    def __iter__(self):
        return iter(int(v) for v in self.indices())

    def __eq__(self, other) -> bool:
        if not isinstance(other, VertexSet):
            return NotImplemented
        return self.n == other.n and np.array_equal(self.bits, other.bits)

    def __hash__(self) -> int:
        return hash((self.n, np.packbits(self.bits).tobytes()))

    def __repr__(self) -> str:
        return f"VertexSet(n={self.n}, size={len(self)})"

    def complement(self) -> "VertexSet":
        return VertexSet(self.n, ~self.bits)

    def translate(self, w: int) -> "VertexSet":
        """The set ``{c ^ w : c in self}``."""
        idx = np.arange(1 << self.n, dtype=np.int64)
        return VertexSet(self.n, self.bits[idx ^ w])

    def permute(self, perm: Sequence[int]) -> "VertexSet":
        return VertexSet(self.n, permute_table(self.bits, self.n, perm))

    def __and__(self, other: "VertexSet") -> "VertexSet":
        return VertexSet(self.n, self.bits & other.bits)

    def __or__(self, other: "VertexSet") -> "VertexSet":
        return VertexSet(self.n, self.bits | other.bits)


def subcube(n: int, fixed_coords: Sequence[int] = (), fixed_values: Sequence[int] | int = ()) -> VertexSet:
    """Vertices agreeing with ``fixed_values`` on ``fixed_coords``.

    ``fixed_values`` is either a sequence of bits aligned with ``fixed_coords`` or
    an integer whose binary expansion (most significant first) lists them.
    """
    check_dimension(n)
    fixed_coords = list(fixed_coords)
    if len(set(fixed_coords)) != len(fixed_coords) or any(not 0 <= i < n for i in fixed_coords):
        raise ValueError(f"fixed coordinates must be distinct and in 0..{n - 1}")
    if isinstance(fixed_values, (int, np.integer)):
        k = len(fixed_coords)
        if not 0 <= fixed_values < 1 << k:
            raise ValueError("fixed value word has bits outside the fixed coordinates")
        fixed_values = [(int(fixed_values) >> (k - 1 - j)) & 1 for j in range(k)]
    fixed_values = list(fixed_values)
    if len(fixed_values) != len(fixed_coords) or any(b not in (0, 1) for b in fixed_values):
        raise ValueError("one bit per fixed coordinate required")
    mask = sum(coord_bit(n, i) for i in fixed_coords)
    target = sum(coord_bit(n, i) for i, b in zip(fixed_coords, fixed_values) if b)
    idx = np.arange(1 << n, dtype=np.int64)
    return VertexSet(n, (idx & mask) == target)


def walsh_transform(g) -> np.ndarray:
    """Fast Walsh-Hadamard transform: ``out[w] = sum_x g[x] * (-1)**<w, x>``."""
    a = np.array(g, dtype=np.int64)
    size = a.shape[0]
    if size & (size - 1):
        raise ValueError("table length must be a power of two")
    h = 1
    while h < size:
        a = a.reshape(-1, 2, h)
        a = np.stack((a[:, 0] + a[:, 1], a[:, 0] - a[:, 1]), axis=1)
        h *= 2
    return a.reshape(size)


def permute_table(table: np.ndarray, n: int, perm: Sequence[int]) -> np.ndarray:
    """Reorder a table on Q_n by a coordinate permutation.

    ``perm[j]`` names the old coordinate that becomes new coordinate ``j``; the
    result satisfies ``out[y] = table[x]`` where ``x`` carries ``y``'s bit j at
    coordinate ``perm[j]``.
    """
    perm = list(perm)
    if sorted(perm) != list(range(n)):
        raise ValueError(f"not a permutation of 0..{n - 1}: {perm}")
    y = np.arange(1 << n, dtype=np.int64)
    x = np.zeros_like(y)
    for j, old in enumerate(perm):
        x |= ((y >> (n - 1 - j)) & 1) << (n - 1 - old)
    return np.asarray(table)[x]


def permute_vertex(v: int, n: int, perm: Sequence[int]) -> int:
    """Image of a single vertex under the coordinate permutation of :func:`permute_table`."""
    out = 0
    for j, old in enumerate(perm):
        if (v >> (n - 1 - old)) & 1:
            out |= coord_bit(n, j)
    return out


@dataclass(frozen=True, eq=False)
class CubePartition:
    """Labeling of the 2**n vertices of Q_n by cells ``0..k-1`` (all nonempty)."""

    n: int
    labels: np.ndarray
    k: int | None = None

    def __post_init__(self):
        check_dimension(self.n)
        labels = np.asarray(self.labels)
        if labels.shape != (1 << self.n,):
            raise ValueError(f"expected {1 << self.n} labels, got shape {labels.shape}")
        if labels.size and (labels.min() < 0):
            raise ValueError("negative cell label")
        k = int(labels.max()) + 1 if self.k is None else int(self.k)
        labels = labels.astype(np.int64 if k > 127 else np.int8)
        if labels.size and labels.max() >= k:
            raise ValueError(f"cell label out of range 0..{k - 1}")
        counts = np.bincount(labels, minlength=k)
        if (counts == 0).any():
            raise PartitionError(f"cells {np.flatnonzero(counts == 0).tolist()} are empty")
        labels.flags.writeable = False
        object.__setattr__(self, "labels", labels)
        object.__setattr__(self, "k", k)

    @classmethod
    def from_cells(cls, n: int, cells: Sequence[VertexSet | Iterable[int]]) -> "CubePartition":
        labels = np.full(1 << n, -1, dtype=np.int64)
        for i, cell in enumerate(cells):
            idx = cell.indices() if isinstance(cell, VertexSet) else np.fromiter(cell, dtype=np.int64)
            if (labels[idx] >= 0).any():
                raise PartitionError(f"cell {i} overlaps an earlier cell")
            labels[idx] = i
        if (labels < 0).any():
            raise PartitionError("cells do not cover Q_n")
        return cls(n, labels, len(cells))

    def cell(self, i: int) -> VertexSet:
        return VertexSet(self.n, self.labels == i)

    def cells(self) -> list[VertexSet]:
        return [self.cell(i) for i in range(self.k)]

    def sizes(self) -> list[int]:
        return np.bincount(self.labels, minlength=self.k).tolist()

    def translate(self, w: int) -> "CubePartition":
        idx = np.arange(1 << self.n, dtype=np.int64)
        return CubePartition(self.n, self.labels[idx ^ w], self.k)

    def permute(self, perm: Sequence[int]) -> "CubePartition":
        return CubePartition(self.n, permute_table(self.labels, self.n, perm), self.k)

    def relabel(self, mapping: Sequence[int]) -> "CubePartition":
        """Cell ``i`` becomes cell ``mapping[i]``."""
        return CubePartition(self.n, np.asarray(mapping)[self.labels], self.k)

    def __eq__(self, other) -> bool:
        if not isinstance(other, CubePartition):
            return NotImplemented
        return self.n == other.n and self.k == other.k and np.array_equal(self.labels, other.labels)

    def __hash__(self) -> int:
        return hash((self.n, self.k, self.labels.tobytes()))

    def __repr__(self) -> str:
        return f"CubePartition(n={self.n}, k={self.k}, sizes={self.sizes()})"


@dataclass(frozen=True)
class NotEquitable:
    """Diagnostic for a failed equitability check.

    ``vertex`` is the first vertex (in index order) whose neighbor counts
    ``observed`` differ from ``expected``, the counts of the first vertex of
    the same cell.
    """

    vertex: int
    cell: int
    observed: tuple
    expected: tuple

    def __bool__(self) -> bool:
        return False

    def __str__(self) -> str:
        return (f"not equitable: vertex {self.vertex} in cell {self.cell} sees "
                f"{list(self.observed)}, expected {list(self.expected)}")


def neighbor_counts(labels: np.ndarray, n: int, k: int) -> np.ndarray:
    """Array ``(2**n, k)`` of neighbor counts per cell for every vertex of Q_n."""
    onehot = np.eye(k, dtype=np.int32)[labels]
    idx = np.arange(1 << n, dtype=np.int64)
    counts = np.zeros((1 << n, k), dtype=np.int32)
    for b in range(n):
        counts += onehot[idx ^ (1 << b)]
    return counts


def _quotient_from_counts(labels: np.ndarray, counts: np.ndarray, k: int):
    first = np.array([np.argmax(labels == i) for i in range(k)])
    S = counts[first]
    bad = np.any(counts != S[labels], axis=1)
    if bad.any():
        v = int(np.argmax(bad))
        c = int(labels[v])
        return NotEquitable(v, c, tuple(int(x) for x in counts[v]), tuple(int(x) for x in S[c]))
    return S.astype(np.int64)


def quotient_matrix(p: CubePartition):
    """Quotient matrix of ``p`` as a ``k x k`` integer array, or :class:`NotEquitable`."""
    counts = neighbor_counts(p.labels, p.n, p.k)
    return _quotient_from_counts(p.labels, counts, p.k)


KINDS = ("S2", "S3", "S4", "EPERF")


def standard_matrix(kind: str, n: int) -> np.ndarray:
    """The quotient matrices S2, S3, S4 (for Q_n, r = n/3) and EPERF (for Q_{2r}).

    For ``EPERF`` the argument is the even dimension ``2r`` of the cube the
    3-cell partition lives in.
    """
    kind = kind.upper()
    if kind == "EPERF":
        if n <= 0 or n % 2:
            raise ValueError(f"EPERF needs a positive even dimension, got {n}")
        r = n // 2
        return np.array([[0, 0, 2 * r], [0, 0, 2 * r], [r, r, 0]], dtype=np.int64)
    if n <= 0 or n % 3:
        raise ValueError(f"{kind} needs a positive dimension divisible by 3, got {n}")
    r = n // 3
    if kind == "S2":
        return np.array([[0, 3 * r], [r, 2 * r]], dtype=np.int64)
    if kind == "S3":
        return np.array([[0, r, 2 * r], [r, 0, 2 * r], [r, r, r]], dtype=np.int64)
    if kind == "S4":
        return r * (np.ones((4, 4), dtype=np.int64) - np.eye(4, dtype=np.int64))
    raise ValueError(f"unknown matrix kind {kind!r}; expected one of {KINDS}")


def has_matrix(p: CubePartition, kind: str) -> bool:
    """True iff ``p`` is equitable with ``standard_matrix(kind, p.n)``."""
    try:
        expected = standard_matrix(kind, p.n)
    except ValueError:
        return False
    if p.k != len(expected):
        return False
    S = quotient_matrix(p)
    return not isinstance(S, NotEquitable) and np.array_equal(S, expected)


def require_matrix(p: CubePartition, kind: str, what: str = "input") -> None:
    """Raise :class:`QuotientMismatch` unless ``p`` has the standard matrix ``kind``."""
    expected = standard_matrix(kind, p.n)
    if p.k != len(expected):
        raise QuotientMismatch(f"{what}: expected {len(expected)} cells for {kind}, got {p.k}")
    S = quotient_matrix(p)
    if isinstance(S, NotEquitable):
        raise QuotientMismatch(f"{what}: {S}")
    if not np.array_equal(S, expected):
        raise QuotientMismatch(f"{what}: quotient matrix {S.tolist()} is not {kind}({p.n}) = {expected.tolist()}")


def even_set(n: int) -> VertexSet:
    return VertexSet(n, parity_array(np.arange(1 << n)) == 0)


def odd_set(n: int) -> VertexSet:
    return VertexSet(n, parity_array(np.arange(1 << n)) == 1)


# The four antipodal pairs of Q_3. Cell i of the antipodal S4(3)-partition is
# ANTIPODAL_PAIRS[i]; the same table drives the H(r,4) -> Q_3r lift and the
# S4(n) -> S2(n+3) expansion.
ANTIPODAL_PAIRS = ((0b000, 0b111), (0b010, 0b101), (0b100, 0b011), (0b110, 0b001))
PAIR_OF = np.zeros(8, dtype=np.int64)
for _i, _pair in enumerate(ANTIPODAL_PAIRS):
    PAIR_OF[list(_pair)] = _i
PAIR_OF.flags.writeable = False


def antipodal_partition() -> CubePartition:
    """The antipodal S4(3)-partition ``({000,111}, {010,101}, {100,011}, {110,001})``."""
    return CubePartition(3, PAIR_OF, 4)
