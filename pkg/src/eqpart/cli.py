"""Command-line interface.

Exit codes: 0 success / true, 1 verified false (not equitable, not resilient,
not equivalent, precondition of an operation not met, search incomplete),
2 usage or file-format error.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import io
from .algebra import affine_dual, function_rank, rank_class_s2, rank_class_s4
from .bridge import contract_s2_to_s4, expand_s4_to_s2, split_s2_to_s3
from .classify import are_equivalent, canonical
from .classify.search import SEARCH_NS, search_s4, semilinear_classes
from .core import KINDS, CubePartition, NotEquitable, PartitionError, coord_bit, has_matrix, quotient_matrix
from .latin import HammingPartition, concat, detect_reducible, h4_kind, lift, quotient_matrix_h4
from .perfect import eperf_partition, extend_parity, hamming_code, multifold_union, semilinear_complete_to_s4
from .resilient import ci_order, is_balanced, linear_s2, linear_s4, max_resilience_bound, partition_of

OK, FALSE, USAGE = 0, 1, 2


class _Usage(Exception):
    """Bad arguments detected after parsing."""


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(USAGE, f"{self.prog}: error: {message}\n")


def _out(args, text: str) -> None:
    if getattr(args, "output", None):
        io.write_text(text, args.output)
    else:
        sys.stdout.write(text)


def _grid(S: np.ndarray) -> str:
    width = max(len(str(int(v))) for v in S.flat)
    return "\n".join(" ".join(str(int(v)).rjust(width) for v in row) for row in S)


def _kind_of(p) -> str | None:
    if isinstance(p, HammingPartition):
        return h4_kind(p)
    for kind in KINDS:
        if has_matrix(p, kind):
            return kind
    return None


def _flags(p: CubePartition, kind: str) -> list[str]:
    lines = []
    if kind == "S4":
        lines.append(f"rank class: {rank_class_s4(p)}")
    elif kind == "S2":
        lines.append(f"rank class: {rank_class_s2(p)}")
    else:
        return lines
    rep = detect_reducible(p, kind)
    blocks = " | ".join(",".join(map(str, b)) for b in rep.blocks)
    lines.append(f"reducible: {'yes (blocks ' + blocks + ')' if rep else 'no'}")
    return lines


def cmd_verify(args) -> int:
    p = io.read_partition(args.file)
    S = quotient_matrix_h4(p) if isinstance(p, HammingPartition) else quotient_matrix(p)
    if isinstance(S, NotEquitable):
        print(S)
        print(f"RESULT equitable=0 vertex={S.vertex}")
        return FALSE
    kind = _kind_of(p)
    print(_grid(S))
    print(f"RESULT equitable=1 kind={kind or 'none'} matrix={json.dumps(S.tolist(), separators=(',', ':'))}")
    if args.flags and kind in ("S2", "S4") and isinstance(p, CubePartition):
        for line in _flags(p, kind):
            print(line)
    if args.expect and kind != args.expect:
        print(f"expected {args.expect}, found {kind or 'no standard matrix'}")
        return FALSE
    return OK


def cmd_resilience(args) -> int:
    f = io.read_function(args.file)
    order = ci_order(f, args.method)
    balanced = is_balanced(f)
    print(f"n={f.n} m={f.m}")
    print(f"balanced: {'yes' if balanced else 'no'}")
    print(f"correlation-immunity order: {order}")
    print(f"resilience order: {order if balanced else 'none (unbalanced)'}")
    if f.m >= 1:
        print(f"upper bound for balanced (n,m)-functions: {max_resilience_bound(f.n, f.m)}")
    if args.t is not None:
        ok = balanced and order >= args.t
        print(f"{args.t}-resilient: {'yes' if ok else 'no'}")
        return OK if ok else FALSE
    return OK


def cmd_construct(args) -> int:
    what = args.what
    comment = [f"construct {what}"]
    if what in ("linear-s2", "linear-s4"):
        if args.n is None:
            raise _Usage("--n is required")
        p = linear_s2(args.n) if what == "linear-s2" else linear_s4(args.n)
        _out(args, io.format_partition(p, comment))
    elif what == "hamming":
        if args.m is None:
            raise _Usage("--m is required")
        _out(args, io.format_set(hamming_code(args.m).words, comment))
    elif what == "multifold":
        if args.m is None or args.t is None:
            raise _Usage("--m and --t are required")
        base = hamming_code(args.m)
        if not 1 <= args.t <= base.m:
            raise _Usage(f"--t must lie in 1..{base.m}")
        code = multifold_union(base, [coord_bit(base.m, j) for j in range(args.t)])
        if args.eperf:
            _out(args, io.format_partition(eperf_partition(extend_parity(code)), comment + ["parity-extended"]))
        else:
            _out(args, io.format_set(code.words, comment))
    elif what == "lift":
        outer = _h4(args.files, 1)[0]
        _out(args, io.format_partition(lift(outer), comment))
    elif what == "concat":
        if len(args.files) < 2:
            raise _Usage("concat needs an H(r,4) file and r inner partition files")
        outer = _h4(args.files[:1], 1)[0]
        inners = [io.read_partition(f) for f in args.files[1:]]
        if any(not isinstance(q, CubePartition) for q in inners):
            raise _Usage("inner partitions must be binary (q=2)")
        _out(args, io.format_partition(concat(outer, inners), comment))
    elif what == "semi-complete":
        p = _binary(args.files, 1)[0]
        _out(args, io.format_partition(semilinear_complete_to_s4(p), comment))
    return OK


def _binary(files, count):
    if len(files) != count:
        raise _Usage(f"expected {count} file argument(s), got {len(files)}")
    parts = [io.read_partition(f) for f in files]
    if any(not isinstance(p, CubePartition) for p in parts):
        raise _Usage("expected a binary (q=2) partition file")
    return parts


def _h4(files, count):
    if len(files) < count:
        raise _Usage("missing H(r,4) partition file")
    parts = [io.read_partition(f) for f in files[:count]]
    if any(not isinstance(p, HammingPartition) for p in parts):
        raise _Usage("expected an H(r,4) (q=4) partition file")
    return parts


def cmd_bridge(args) -> int:
    p = _binary([args.file], 1)[0]
    op = {"expand": expand_s4_to_s2, "contract": contract_s2_to_s4, "split": split_s2_to_s3}[args.command]
    _out(args, io.format_partition(op(p), [args.command]))
    return OK


def cmd_rank(args) -> int:
    text = io.read_text(args.file)
    if io.sniff(text) == "function":
        f = io.parse_function(text)
        if f.m != 2:
            raise _Usage("rank of a function needs m = 2")
        p = partition_of(f)
        print(f"graph rank: {function_rank(f)}")
        if has_matrix(p, "S4"):
            print(f"rank class: {rank_class_s4(p)}")
        return OK
    p = io.parse_partition(text)
    if isinstance(p, CubePartition) and has_matrix(p, "S4"):
        rc = rank_class_s4(p)
    elif isinstance(p, CubePartition) and has_matrix(p, "S2"):
        rc = rank_class_s2(p)
    else:
        print("rank classes are defined for S2- and S4-partitions only")
        return FALSE
    print(f"rank: {rc.rank}")
    print(f"rank class: {rc.kind.value}")
    return OK


def cmd_dual(args) -> int:
    C = io.read_set(args.file)
    if not len(C):
        raise _Usage("the affine dual of an empty set is undefined")
    _out(args, io.format_set(affine_dual(C), ["affine dual"]))
    return OK


def cmd_canon(args) -> int:
    f = io.read_function(args.file)
    c = canonical(f)
    _out(args, io.format_function(c.form, [f"canonical form; automorphisms {c.automorphisms}"]))
    return OK


def cmd_equiv(args) -> int:
    f, g = io.read_function(args.first), io.read_function(args.second)
    if (f.n, f.m) != (g.n, g.m):
        raise _Usage("functions have different dimensions")
    same = are_equivalent(f, g)
    print("equivalent" if same else "not equivalent")
    return OK if same else FALSE


def cmd_classify(args) -> int:
    if args.method == "multifold":
        census = semilinear_classes(args.n, args.budget)
    else:
        census = search_s4(args.n, args.jobs, args.budget)
    out = Path(args.out) if args.out else None
    if out:
        out.mkdir(parents=True, exist_ok=True)
    counts = census.counts()
    print(f"n={args.n} classes={len(census)} " + " ".join(
        f"{k.replace(' ', '-')}={counts.get(k, 0)}" for k in ("linear", "strictly semilinear", "full rank")))
    print(f"complete: {'yes' if census.complete else 'no (lower bound)'}")
    for i, c in enumerate(census):
        flag = "reducible" if c.reducible else "irreducible"
        print(f"class {i}: {c.rank.kind.value} (rank {c.rank.rank}), {flag}, "
              f"automorphisms {c.automorphisms}, orbit {c.orbit_size}")
        if out:
            name = out / f"class_n{args.n}_{i:02d}.fun"
            io.write_text(io.format_function(c.representative, [
                f"class {i} of S4({args.n}): {c.rank.kind.value}, rank {c.rank.rank}, {flag}",
                f"automorphisms {c.automorphisms}, orbit size {c.orbit_size}"]), name)
    return OK if census.complete else FALSE


def cmd_detect(args) -> int:
    p = _binary([args.file], 1)[0]
    kind = "S4" if has_matrix(p, "S4") else "S2" if has_matrix(p, "S2") else None
    if kind is None:
        print("input is neither an S2- nor an S4-partition")
        return FALSE
    if args.property == "reducible":
        rep = detect_reducible(p, kind)
        if rep:
            print("reducible: yes")
            print("blocks: " + " | ".join(",".join(map(str, b)) for b in rep.blocks))
            return OK
        print("reducible: no")
        return FALSE
    rc = rank_class_s4(p) if kind == "S4" else rank_class_s2(p)
    print(f"rank class: {rc}")
    print(f"semilinear: {'yes' if rc.semilinear else 'no'}")
    return OK if rc.semilinear else FALSE


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="eqpart", description="Equitable partitions of hypercubes and resilient (n,2)-functions.")
    sub = ap.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("verify", help="quotient matrix of a partition file")
    p.add_argument("file")
    p.add_argument("--expect", choices=KINDS)
    p.add_argument("--flags", action="store_true", help="also report rank class and reducibility")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("resilience", help="correlation immunity and resilience of a function file")
    p.add_argument("file")
    p.add_argument("--t", type=int)
    p.add_argument("--method", choices=("direct", "spectral"))
    p.set_defaults(func=cmd_resilience)

    p = sub.add_parser("construct", help="build an instance")
    p.add_argument("what", choices=("linear-s2", "linear-s4", "hamming", "multifold", "lift", "concat",
                                    "semi-complete"))
    p.add_argument("files", nargs="*")
    p.add_argument("--n", type=int)
    p.add_argument("--m", type=int)
    p.add_argument("--t", type=int)
    p.add_argument("--eperf", action="store_true", help="multifold: emit the parity-extended 3-cell partition")
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_construct)

    for name, hlp in (("expand", "S4(n) -> S2(n+3)"), ("contract", "S2(n+3) -> S4(n)"), ("split", "S2 -> S3")):
        p = sub.add_parser(name, help=hlp)
        p.add_argument("file")
        p.add_argument("-o", "--output")
        p.set_defaults(func=cmd_bridge)

    p = sub.add_parser("rank", help="affine rank and rank class")
    p.add_argument("file")
    p.set_defaults(func=cmd_rank)

    p = sub.add_parser("dual", help="affine dual of a set file")
    p.add_argument("file")
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_dual)

    p = sub.add_parser("canon", help="canonical form of a function file")
    p.add_argument("file")
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_canon)

    p = sub.add_parser("equiv", help="test equivalence of two function files")
    p.add_argument("first")
    p.add_argument("second")
    p.set_defaults(func=cmd_equiv)

    p = sub.add_parser("classify", help="all S4(n)-partitions up to equivalence")
    p.add_argument("--n", type=int, required=True, choices=SEARCH_NS)
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--budget", type=float, help="time budget in seconds")
    p.add_argument("--method", choices=("dfs", "multifold"), default="dfs",
                   help="multifold: semilinear classes only, via multifold perfect codes")
    p.add_argument("--out", help="directory for representative function files")
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser("detect", help="reducibility or semilinearity of an S2/S4 partition file")
    p.add_argument("property", choices=("reducible", "semilinear"))
    p.add_argument("file")
    p.set_defaults(func=cmd_detect)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    if getattr(args, "jobs", 1) < 1:
        ap.error("--jobs must be positive")
    try:
        return args.func(args)
    except (io.FormatError, _Usage) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return USAGE
    except PartitionError as exc:
        print(f"not satisfied: {exc}", file=sys.stderr)
        return FALSE
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return USAGE


if __name__ == "__main__":
    sys.exit(main())
