"""Vectorial Boolean functions, correlation immunity and resilience."""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations

import numpy as np

from .core import CubePartition, PartitionError, VertexSet, check_dimension, popcount_array, walsh_transform

MAX_M = 8


@dataclass(frozen=True, eq=False)
class VbFunction:
    """An (n, m)-function given by its value table over Q_n."""

    n: int
    m: int
    table: np.ndarray

    def __post_init__(self):
        check_dimension(self.n)
        if not 0 <= self.m <= MAX_M:
            raise ValueError(f"output dimension m={self.m} outside 0..{MAX_M}")
        table = np.asarray(self.table)
        if table.shape != (1 << self.n,):
            raise ValueError(f"expected {1 << self.n} values, got shape {table.shape}")
        if table.size and (table.min() < 0 or table.max() >= 1 << self.m):
            raise ValueError(f"values must lie in [0, {1 << self.m})")
        table = table.astype(np.int16)
        table.flags.writeable = False
        object.__setattr__(self, "table", table)

    def __eq__(self, other) -> bool:
        if not isinstance(other, VbFunction):
            return NotImplemented
        return (self.n, self.m) == (other.n, other.m) and np.array_equal(self.table, other.table)

    def __hash__(self) -> int:
        return hash((self.n, self.m, self.table.tobytes()))

    def __repr__(self) -> str:
        return f"VbFunction(n={self.n}, m={self.m})"

    def __call__(self, x: int) -> int:
        return int(self.table[x])


def indicator(f: VbFunction, y: int) -> VertexSet:
    """The preimage ``f^{-1}(y)``."""
    if not 0 <= y < 1 << f.m:
        raise ValueError(f"value {y} outside [0, {1 << f.m})")
    return VertexSet(f.n, f.table == y)


def is_balanced(f: VbFunction) -> bool:
    if f.m > f.n:
        return False
    counts = np.bincount(f.table, minlength=1 << f.m)
    return bool((counts == 1 << (f.n - f.m)).all())


def component(f: VbFunction, b: int) -> VbFunction:
    """The Boolean function ``x -> <b, f(x)>``."""
    return VbFunction(f.n, 1, popcount_array(f.table.astype(np.int64) & b) & 1)


def _direct_level_ok(onehot: np.ndarray, totals: np.ndarray, n: int, t: int) -> bool:
    if (totals % (1 << t)).any():
        return False
    target = totals >> t
    cube = onehot.reshape((2,) * n + (onehot.shape[-1],))
    for fixed in combinations(range(n), t):
        free = tuple(i for i in range(n) if i not in fixed)
        counts = cube.sum(axis=free)
        if (counts != target).any():
            return False
    return True


def _ci_order_direct(f: VbFunction) -> int:
    M = 1 << f.m
    onehot = (f.table[:, None] == np.arange(M)[None, :]).astype(np.int64)
    totals = onehot.sum(axis=0)
    t = 0
    while t < f.n and _direct_level_ok(onehot, totals, f.n, t + 1):
        t += 1
    return t


def _ci_order_spectral(f: VbFunction) -> int:
    weights = popcount_array(np.arange(1 << f.n))
    lowest = f.n + 1
    for y in np.unique(f.table):
        spectrum = walsh_transform(f.table == y)
        nz = (spectrum != 0) & (weights > 0)
        if nz.any():
            lowest = min(lowest, int(weights[nz].min()))
    return min(f.n, lowest - 1)


def ci_order(f: VbFunction, method: str | None = None) -> int:
    """Correlation-immunity order of ``f``.

    ``method="direct"`` counts value occurrences in every subcube;
    ``method="spectral"`` looks for the lowest-weight nonzero Walsh coefficient
    of the value indicators. The default is direct up to n = 10.
    """
    if method is None:
        method = "spectral" if f.n > 10 else "direct"
    if method == "direct":
        return _ci_order_direct(f)
    if method == "spectral":
        return _ci_order_spectral(f)
    raise ValueError(f"unknown method {method!r}")


def is_resilient(f: VbFunction, t: int, method: str | None = None) -> bool:
    return is_balanced(f) and ci_order(f, method) >= t


def max_resilience_bound(n: int, m: int) -> int:
    """Largest t with ``(n - t - 1) / n >= (2**(m-1) - 1) / (2**m - 1)``."""
    if m < 1:
        raise ValueError("m must be at least 1")
    num, den = (1 << (m - 1)) - 1, (1 << m) - 1
    return n - 1 - (-(-n * num // den))


def partition_of(f: VbFunction) -> CubePartition:
    """The partition of Q_n into the preimages of ``0, 1, ..., 2**m - 1``."""
    return CubePartition(f.n, f.table, 1 << f.m)


def function_of(p: CubePartition, m: int | None = None) -> VbFunction:
    """Inverse of :func:`partition_of`: cell ``i`` becomes the preimage of ``i``."""
    if p.k & (p.k - 1):
        raise PartitionError(f"cell count {p.k} is not a power of two")
    bits = p.k.bit_length() - 1
    if m is not None and m != bits:
        raise PartitionError(f"{p.k} cells do not make an (n, {m})-function")
    return VbFunction(p.n, bits, p.labels)


def linear_function(n: int) -> VbFunction:
    """The linear (n,2)-function ``(<a,x>, <b,x>)`` with ``a = 1^(2r)0^r`` and ``b = 0^r 1^(2r)``.

    ``a``, ``b`` and ``a + b`` all have weight 2n/3, so the function is
    ``(2n/3 - 1)``-resilient.
    """
    if n <= 0 or n % 3:
        raise ValueError("n must be a positive multiple of 3")
    check_dimension(n)
    r = n // 3
    a = ((1 << (2 * r)) - 1) << r
    b = (1 << (2 * r)) - 1
    x = np.arange(1 << n, dtype=np.int64)
    return VbFunction(n, 2, (popcount_array(x & a) & 1) << 1 | (popcount_array(x & b) & 1))


def linear_s4(n: int) -> CubePartition:
    return partition_of(linear_function(n))


def linear_s2(n: int) -> CubePartition:
    """The common kernel of ``1^(2r)0^r`` and ``0^r 1^(2r)`` against its complement."""
    return CubePartition(n, (linear_function(n).table != 0).astype(np.int8), 2)
