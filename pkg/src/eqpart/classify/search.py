"""Exhaustive generation of S4-partitions and multifold perfect codes, up to equivalence.

Both searches are depth-first with constraint propagation on neighbor counts.
Solutions are deduplicated by canonical form, so the reported class list does
not depend on the search order or on how subtrees are shared among workers.
"""

from __future__ import annotations

import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from itertools import combinations
from typing import Iterator, Sequence

import numpy as np

from ..algebra import RankClass, rank_class_s4
from ..bridge import contract_s2_to_s4, is_translation_invariant
from ..core import CubePartition, VertexSet, coord_bit, standard_matrix
from ..latin import ReducibilityReport, detect_reducible
from ..perfect import MultifoldCode, eperf_partition, extend_parity, semi_to_s2
from ..resilient import VbFunction, function_of, partition_of
from .canonical import canonical, canonical_set
from .equivalence import group_order, orbit_keys, relabel_first_occurrence

SEARCH_NS = (3, 6, 9)


class BudgetExceeded(RuntimeError):
    """The time budget ran out before the search finished."""


def _check(deadline):
    if deadline is not None and time.monotonic() > deadline:
        raise BudgetExceeded


class EquitableSearch:
    """Depth-first enumeration of equitable partitions of Q_n with a given quotient matrix.

    ``fixed`` maps vertices to forced cells. Branching always takes the
    uncolored vertex with the fewest admissible cells (lowest index on ties), so
    a branch is identified by the sequence of cells chosen, and any subtree can
    be replayed from that sequence.
    """

    def __init__(self, n: int, matrix, fixed: dict[int, int] | None = None, deadline: float | None = None):
        S = np.asarray(matrix, dtype=np.int64)
        self.n, self.k = n, S.shape[0]
        if (S.sum(axis=1) != n).any():
            raise ValueError("quotient matrix rows must sum to n")
        self.S = S.tolist()
        self.N = 1 << n
        self.nb = [[v ^ (1 << b) for b in range(n)] for v in range(self.N)]
        # allowed[c][j]: cells e that can still see j neighbors of cell c
        self.allowed = [[sum(1 << e for e in range(self.k) if self.S[e][c] >= j) for j in range(n + 1)]
                        for c in range(self.k)]
        self.fixed = dict(fixed or {})
        self.deadline = deadline
        self.nodes = 0
        self._reset()

    def _reset(self):
        self.lab = [-1] * self.N
        self.cnt = [[0] * self.k for _ in range(self.N)]
        self.dom = [(1 << self.k) - 1] * self.N
        self.trail = []
        queue = []
        ok = True
        for v, c in self.fixed.items():
            if self.lab[v] >= 0:
                ok = ok and self.lab[v] == c
                continue
            if not (self.dom[v] >> c) & 1 or not self._assign(v, c, queue):
                ok = False
                break
        self.consistent = ok and self._propagate(queue)

    def _restrict(self, w, mask, queue):
        d = self.dom[w]
        if d & ~mask:
            self.trail.append((2, w, d))
            d &= mask
            self.dom[w] = d
            if d == 0:
                return False
            if d & (d - 1) == 0:
                queue.append(w)
        return True

    def _assign(self, v, c, queue):
        lab, cnt, S = self.lab, self.cnt, self.S
        lab[v] = c
        self.trail.append((0, v, c))
        for u in self.nb[v]:
            cu = cnt[u]
            cu[c] += 1
            self.trail.append((1, u, c))
            lu = lab[u]
            if lu >= 0:
                if cu[c] > S[lu][c]:
                    return False
                if cu[c] == S[lu][c]:
                    # u has all the c-neighbors it needs
                    for w in self.nb[u]:
                        if lab[w] < 0 and not self._restrict(w, ~(1 << c), queue):
                            return False
            elif not self._restrict(u, self.allowed[c][min(cu[c], self.n)], queue):
                return False
        return True

    def _undo(self, mark):
        trail = self.trail
        while len(trail) > mark:
            kind, a, b = trail.pop()
            if kind == 0:
                self.lab[a] = -1
            elif kind == 1:
                self.cnt[a][b] -= 1
            else:
                self.dom[a] = b

    def _propagate(self, queue):
        while queue:
            w = queue.pop()
            if self.lab[w] >= 0:
                continue
            d = self.dom[w]
            if d == 0 or not self._assign(w, d.bit_length() - 1, queue):
                return False
        return True

    def _choose(self):
        best, size = None, self.k + 1
        lab, dom = self.lab, self.dom
        for v in range(self.N):
            if lab[v] < 0:
                s = dom[v].bit_count()
                if s < size:
                    best, size = v, s
                    if s <= 2:
                        break
        return best

    def _try(self, v, c):
        mark = len(self.trail)
        queue = []
        if self._assign(v, c, queue) and self._propagate(queue):
            return mark
        self._undo(mark)
        return None

    def _solution(self) -> np.ndarray:
        labels = np.array(self.lab, dtype=np.int8)
        for v in range(self.N):
            if self.cnt[v] != self.S[labels[v]]:
                raise AssertionError("search produced a non-equitable labeling")
        return labels

    def _walk(self, depth, path, limit):
        """Yield ``(path, labels)`` for leaves, or ``(path, None)`` at the depth limit."""
        self.nodes += 1
        _check(self.deadline)
        v = self._choose()
        if v is None:
            yield tuple(path), self._solution()
            return
        if limit is not None and depth == limit:
            yield tuple(path), None
            return
        d = self.dom[v]
        for c in range(self.k):
            if (d >> c) & 1:
                mark = self._try(v, c)
                if mark is not None:
                    path.append(c)
                    yield from self._walk(depth + 1, path, limit)
                    path.pop()
                    self._undo(mark)

    def frontier(self, depth: int) -> list[tuple]:
        """Branch prefixes of the given length (shorter ones end in a solution)."""
        if not self.consistent:
            return []
        return [path for path, _ in self._walk(0, [], depth)]

    def solutions(self, prefix: Sequence[int] = ()) -> Iterator[np.ndarray]:
        """All completions below the branch ``prefix``."""
        if not self.consistent:
            return
        marks = []
        for c in prefix:
            v = self._choose()
            mark = self._try(v, c) if v is not None and (self.dom[v] >> c) & 1 else None
            if mark is None:
                raise ValueError("prefix is not a branch of this search")
            marks.append(mark)
        try:
            for _, labels in self._walk(0, [], None):
                yield labels
        finally:
            if marks:
                self._undo(marks[0])


def s4_normalization(n: int) -> dict[int, int]:
    """Vertex 0 in cell 0 and the neighbor along coordinate j in cell ``1 + j // (n/3)``.

    Every S4-partition is equivalent to one of this shape: translate a word of
    the first cell to 0, sort coordinates by the cell of the corresponding
    neighbor, and rename cells.
    """
    r = n // 3
    fixed = {0: 0}
    for j in range(n):
        fixed[coord_bit(n, j)] = 1 + j // r
    return fixed


def s4_completions(n: int, prefix: Sequence[int] = (), deadline: float | None = None) -> Iterator[np.ndarray]:
    """Label arrays of all normalized S4(n)-partitions."""
    search = EquitableSearch(n, standard_matrix("S4", n), s4_normalization(n), deadline)
    yield from search.solutions(prefix)


def s4_all_labelings(n: int) -> Iterator[np.ndarray]:
    """Every S4(n)-partition with every naming of its cells, with no symmetry reduction (oracle)."""
    yield from EquitableSearch(n, standard_matrix("S4", n)).solutions()


@dataclass(frozen=True)
class ClassReport:
    """One equivalence class of S4(n)-partitions, i.e. of (2n/3 - 1)-resilient (n,2)-functions."""

    representative: VbFunction
    automorphisms: int
    orbit_size: int
    hits: int
    rank: RankClass
    reducibility: ReducibilityReport

    @property
    def semilinear(self) -> bool:
        return self.rank.semilinear

    @property
    def reducible(self) -> bool:
        return bool(self.reducibility)

    @property
    def partition(self) -> CubePartition:
        return partition_of(self.representative)


@dataclass
class Census:
    """Result of an exhaustive search: the classes found and whether the search finished."""

    n: int
    classes: list[ClassReport]
    complete: bool
    nodes: int = 0
    solutions: int = 0
    elapsed: float = 0.0
    method: str = "dfs"

    def __len__(self) -> int:
        return len(self.classes)

    def __iter__(self):
        return iter(self.classes)

    def __getitem__(self, i):
        return self.classes[i]

    def counts(self) -> dict[str, int]:
        out: dict[str, int] = {}
        for c in self.classes:
            out[c.rank.kind.value] = out.get(c.rank.kind.value, 0) + 1
        return out


@dataclass
class _Partial:
    forms: dict = field(default_factory=dict)
    nodes: int = 0
    solutions: int = 0
    complete: bool = True

    def add(self, key, aut, hits=1):
        if key in self.forms:
            self.forms[key][1] += hits
        else:
            self.forms[key] = [aut, hits]

    def merge(self, other: "_Partial"):
        for key, (aut, hits) in other.forms.items():
            self.add(key, aut, hits)
        self.nodes += other.nodes
        self.solutions += other.solutions
        self.complete &= other.complete


def _run_subtree(args) -> _Partial:
    n, prefix, deadline = args
    out = _Partial()
    search = EquitableSearch(n, standard_matrix("S4", n), s4_normalization(n), deadline)
    try:
        for labels in search.solutions(prefix):
            out.solutions += 1
            c = canonical(VbFunction(n, 2, labels))
            out.add(c.form.table.astype(np.int8).tobytes(), c.automorphisms)
            _check(deadline)
    except BudgetExceeded:
        out.complete = False
    out.nodes = search.nodes
    return out


def _report(n: int, key: bytes, aut: int, hits: int) -> ClassReport:
    f = VbFunction(n, 2, np.frombuffer(key, dtype=np.int8))
    p = partition_of(f)
    return ClassReport(f, aut, group_order(n, 2) // aut, hits, rank_class_s4(p), detect_reducible(p, "S4"))


def _census(n: int, partial: _Partial, start: float, method: str) -> Census:
    classes = [_report(n, key, aut, hits) for key, (aut, hits) in sorted(partial.forms.items())]
    return Census(n, classes, partial.complete, partial.nodes, partial.solutions,
                  time.monotonic() - start, method)


def search_s4(n: int, jobs: int = 1, budget: float | None = None, split_depth: int | None = None) -> Census:
    """All S4(n)-partitions up to equivalence, for n in {3, 6, 9}.

    The search runs over normalized partitions (see :func:`s4_normalization`)
    and keeps one canonical representative per class. With ``jobs > 1`` the
    subtrees below ``split_depth`` are shared among worker processes. When the
    ``budget`` (seconds) runs out, the classes found so far are returned with
    ``complete=False``; they are a lower bound on the true list.
    """
    if n not in SEARCH_NS:
        raise ValueError(f"search_s4 supports n in {SEARCH_NS}, got {n}")
    if jobs < 1:
        raise ValueError("jobs must be positive")
    start = time.monotonic()
    deadline = None if budget is None else start + budget
    if jobs == 1:
        return _census(n, _run_subtree((n, (), deadline)), start, "dfs")
    if split_depth is None:
        split_depth = 4
    partial = _Partial()
    try:
        head = EquitableSearch(n, standard_matrix("S4", n), s4_normalization(n), deadline)
        prefixes = head.frontier(split_depth)
        partial.nodes += head.nodes
    except BudgetExceeded:
        partial.complete = False
        return _census(n, partial, start, "dfs")
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        for part in pool.map(_run_subtree, [(n, p, deadline) for p in prefixes]):
            partial.merge(part)
    return _census(n, partial, start, "dfs")


# --- multifold perfect codes -------------------------------------------------------


class _BallSearch:
    """Depth-first enumeration of sets meeting every radius-1 ball of Q_m in exactly t words."""

    def __init__(self, m: int, t: int, fixed: dict[int, int], deadline=None):
        self.m, self.t, self.N = m, t, 1 << m
        self.ball = [[v] + [v ^ (1 << b) for b in range(m)] for v in range(self.N)]
        self.val = [-1] * self.N
        self.ones = [0] * self.N
        self.free = [m + 1] * self.N
        self.trail = []
        self.deadline = deadline
        self.nodes = 0
        queue = [(v, x) for v, x in fixed.items()]
        self.consistent = self._propagate(queue)

    def _set(self, u, x, queue):
        if self.val[u] >= 0:
            return self.val[u] == x
        self.val[u] = x
        self.trail.append(u)
        t = self.t
        for b in self.ball[u]:
            self.free[b] -= 1
            self.ones[b] += x
        for b in self.ball[u]:
            o, f = self.ones[b], self.free[b]
            if o > t or o + f < t:
                return False
            if f and (o == t or o + f == t):
                fill = 0 if o == t else 1
                queue.extend((w, fill) for w in self.ball[b] if self.val[w] < 0)
        return True

    def _undo(self, mark):
        while len(self.trail) > mark:
            u = self.trail.pop()
            x = self.val[u]
            self.val[u] = -1
            for b in self.ball[u]:
                self.free[b] += 1
                self.ones[b] -= x

    def _propagate(self, queue):
        while queue:
            u, x = queue.pop()
            if not self._set(u, x, queue):
                return False
        return True

    def _choose(self):
        best, slack = None, self.m + 2
        for b in range(self.N):
            f = self.free[b]
            if 0 < f < slack:
                best, slack = b, f
        if best is None:
            return None
        return next(w for w in self.ball[best] if self.val[w] < 0)

    def solutions(self) -> Iterator[np.ndarray]:
        if self.consistent:
            yield from self._walk()

    def _walk(self):
        self.nodes += 1
        _check(self.deadline)
        u = self._choose()
        if u is None:
            yield np.array(self.val, dtype=bool)
            return
        for x in (1, 0):
            mark = len(self.trail)
            queue = []
            if self._set(u, x, queue) and self._propagate(queue):
                yield from self._walk()
            self._undo(mark)


MULTIFOLD_MAX_M = 7


def search_multifold(m: int = 7, t: int = 4, budget: float | None = None) -> list[MultifoldCode]:
    """All t-fold 1-perfect codes of length m up to coordinate permutation and translation.

    Normalization: the code contains 0 and, of the unit vectors, exactly the
    last ``t - 1``. Codes are returned in canonical form, sorted. Raises
    :class:`BudgetExceeded` when ``budget`` seconds run out.
    """
    if not 1 <= m <= MULTIFOLD_MAX_M:
        raise ValueError(f"search_multifold supports 1 <= m <= {MULTIFOLD_MAX_M}")
    if not 1 <= t <= m + 1:
        raise ValueError(f"t must lie in 1..{m + 1}")
    deadline = None if budget is None else time.monotonic() + budget
    fixed = {0: 1}
    for j in range(m):
        fixed[coord_bit(m, j)] = int(j >= m - (t - 1))
    seen = {}
    for bits in _BallSearch(m, t, fixed, deadline).solutions():
        canon, _ = canonical_set(VertexSet(m, bits))
        seen.setdefault(canon.bits.tobytes(), canon)
    return [MultifoldCode(m, t, seen[key]) for key in sorted(seen)]


# --- semilinear classes through multifold codes --------------------------------------


def weight3_invariances(p: CubePartition) -> list[int]:
    """Weight-3 words ``w`` with ``cell0 + w = cell0``, in increasing order."""
    C = p.cell(0)
    words = []
    for supp in combinations(range(p.n), 3):
        w = sum(coord_bit(p.n, i) for i in supp)
        if is_translation_invariant(C, w):
            words.append(w)
    return sorted(words)


def contractions(p2: CubePartition) -> list[CubePartition]:
    """Every S4-partition whose expansion is isometric to ``p2`` by a coordinate permutation."""
    out = []
    n = p2.n
    for w in weight3_invariances(p2):
        supp = [i for i in range(n) if (w >> (n - 1 - i)) & 1]
        perm = [i for i in range(n) if i not in supp] + supp
        out.append(contract_s2_to_s4(p2.permute(perm)))
    return out


def semilinear_classes(n: int, budget: float | None = None) -> Census:
    """Semilinear S4(n)-partitions up to equivalence, built from multifold perfect codes.

    An S4(n)-partition of graph rank at most n + 1 expands to a semilinear
    S2(n+3)-partition, which comes from an (n/3 + 1)-fold 1-perfect code of
    length 2n/3 + 1 by parity extension. Contracting back along every weight-3
    invariance recovers all of them.
    """
    if n not in SEARCH_NS:
        raise ValueError(f"semilinear_classes supports n in {SEARCH_NS}, got {n}")
    start = time.monotonic()
    r = n // 3 + 1
    deadline = None if budget is None else start + budget
    partial = _Partial()
    try:
        for code in search_multifold(2 * r - 1, r, budget):
            p2 = semi_to_s2(eperf_partition(extend_parity(code)))
            for p4 in contractions(p2):
                _check(deadline)
                c = canonical(function_of(p4, 2))
                partial.solutions += 1
                partial.add(c.form.table.astype(np.int8).tobytes(), c.automorphisms)
    except BudgetExceeded:
        partial.complete = False
    return _census(n, partial, start, "multifold")


# --- brute-force oracles ---------------------------------------------------------------


def oracle_class_count(n: int) -> int:
    """Number of S4(n)-classes from unnormalized enumeration and explicit orbit sweeping.

    Shares no code with the canonical-form machinery: each new labeling's whole
    orbit is generated by applying every isometry and removed from the pool.
    """
    pool = set()
    for labels in s4_all_labelings(n):
        pool.add(relabel_first_occurrence(labels)[0].astype(np.int8).tobytes())
    classes = 0
    while pool:
        key = min(pool)
        pool -= orbit_keys(VbFunction(n, 2, np.frombuffer(key, dtype=np.int8)))
        classes += 1
    return classes
