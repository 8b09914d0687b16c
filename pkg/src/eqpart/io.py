"""Plain-text instance files.

PartitionFile::

    # comment lines start with '#'
    q n k
    <q**n cell labels in vertex index order>

``q = 2`` gives a partition of Q_n, ``q = 4`` a partition of H(n,4).

FunctionFile: header ``n m`` followed by the ``2**n`` values.
SetFile: header ``q n`` followed by a count and that many distinct vertex indices.
"""

from __future__ import annotations

from pathlib import Path
from typing import Iterable, TextIO

import numpy as np

from .core import MAX_N, CubePartition, PartitionError, VertexSet
from .latin import MAX_R, HammingPartition
from .resilient import MAX_M, VbFunction

PER_LINE = 16


class FormatError(ValueError):
    """Malformed instance file."""


def _tokens(text: str) -> list[str]:
    out = []
    for line in text.splitlines():
        line = line.split("#", 1)[0]
        out.extend(line.split())
    return out


def _ints(tokens: list[str], what: str) -> np.ndarray:
    try:
        return np.array([int(t) for t in tokens], dtype=np.int64)
    except ValueError as exc:
        raise FormatError(f"{what}: non-integer token ({exc})") from None


def read_text(source) -> str:
    if isinstance(source, (str, Path)):
        try:
            return Path(source).read_text()
        except OSError as exc:
            raise FormatError(f"cannot read {source}: {exc.strerror}") from None
    return source.read()


def _dimension(q: int, n: int, what: str) -> None:
    if q not in (2, 4):
        raise FormatError(f"{what}: q must be 2 or 4, got {q}")
    cap = MAX_N if q == 2 else MAX_R
    if not 0 <= n <= cap:
        raise FormatError(f"{what}: n={n} outside 0..{cap} for q={q}")


def parse_partition(text: str) -> CubePartition | HammingPartition:
    tok = _tokens(text)
    if len(tok) < 3:
        raise FormatError("partition file: missing 'q n k' header")
    q, n, k = (int(v) for v in _ints(tok[:3], "partition header"))
    _dimension(q, n, "partition file")
    if k < 1:
        raise FormatError(f"partition file: k must be positive, got {k}")
    size = q ** n
    if len(tok) - 3 != size:
        raise FormatError(f"partition file: expected {size} labels, found {len(tok) - 3}")
    labels = _ints(tok[3:], "partition labels")
    if labels.size and (labels.min() < 0 or labels.max() >= k):
        raise FormatError(f"partition file: labels must lie in [0, {k})")
    try:
        return CubePartition(n, labels, k) if q == 2 else HammingPartition(n, labels, k)
    except PartitionError as exc:
        raise FormatError(f"partition file: {exc}") from None


def parse_function(text: str) -> VbFunction:
    tok = _tokens(text)
    if len(tok) < 2:
        raise FormatError("function file: missing 'n m' header")
    n, m = (int(v) for v in _ints(tok[:2], "function header"))
    _dimension(2, n, "function file")
    if not 0 <= m <= MAX_M:
        raise FormatError(f"function file: m={m} outside 0..{MAX_M}")
    if len(tok) - 2 != 1 << n:
        raise FormatError(f"function file: expected {1 << n} values, found {len(tok) - 2}")
    values = _ints(tok[2:], "function values")
    if values.size and (values.min() < 0 or values.max() >= 1 << m):
        raise FormatError(f"function file: values must lie in [0, {1 << m})")
    return VbFunction(n, m, values)


def parse_set(text: str) -> VertexSet:
    tok = _tokens(text)
    if len(tok) < 3:
        raise FormatError("set file: missing 'q n' header or count")
    q, n, count = (int(v) for v in _ints(tok[:3], "set header"))
    if q != 2:
        raise FormatError("set file: only binary sets (q=2) are supported")
    _dimension(q, n, "set file")
    if len(tok) - 3 != count:
        raise FormatError(f"set file: header announces {count} indices, found {len(tok) - 3}")
    idx = _ints(tok[3:], "set indices")
    if idx.size and (idx.min() < 0 or idx.max() >= 1 << n):
        raise FormatError(f"set file: indices must lie in [0, {1 << n})")
    if len(np.unique(idx)) != idx.size:
        raise FormatError("set file: indices are not distinct")
    return VertexSet.from_indices(n, idx)


def read_partition(source) -> CubePartition | HammingPartition:
    return parse_partition(read_text(source))


def read_function(source) -> VbFunction:
    return parse_function(read_text(source))


def read_set(source) -> VertexSet:
    return parse_set(read_text(source))


def sniff(text: str) -> str:
    """Tell a PartitionFile from a FunctionFile by matching the token count to the header."""
    tok = _tokens(text)
    head = [int(t) for t in tok[:2] if t.isdigit()]
    if len(head) == 2:
        q, n = head
        if q in (2, 4) and n <= MAX_N and len(tok) == 3 + q ** n:
            return "partition"
        if q <= MAX_N and len(tok) == 2 + (1 << q):
            return "function"
    raise FormatError("cannot tell the file type from its header and token count")


def _body(values: Iterable[int]) -> str:
    values = [str(int(v)) for v in values]
    return "\n".join(" ".join(values[i:i + PER_LINE]) for i in range(0, len(values), PER_LINE))


def _comments(comments: Iterable[str]) -> str:
    return "".join(f"# {c}\n" for c in comments)


def format_partition(p: CubePartition | HammingPartition, comments: Iterable[str] = ()) -> str:
    q, n = (2, p.n) if isinstance(p, CubePartition) else (4, p.r)
    return f"{_comments(comments)}{q} {n} {p.k}\n{_body(p.labels)}\n"


def format_function(f: VbFunction, comments: Iterable[str] = ()) -> str:
    return f"{_comments(comments)}{f.n} {f.m}\n{_body(f.table)}\n"


def format_set(C: VertexSet, comments: Iterable[str] = ()) -> str:
    idx = C.indices()
    return f"{_comments(comments)}2 {C.n}\n{len(idx)}\n{_body(idx)}\n"


def write_text(text: str, dest: str | Path | TextIO) -> None:
    if isinstance(dest, (str, Path)):
        Path(dest).write_text(text)
    else:
        dest.write(text)
