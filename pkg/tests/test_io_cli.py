import subprocess
import sys
from pathlib import Path

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from eqpart import io
from eqpart.cli import main
from eqpart.core import CubePartition, VertexSet
from eqpart.latin import linear_latin, mds_from_latin
from eqpart.resilient import VbFunction, linear_s4

SAMPLES = Path(__file__).resolve().parent.parent / "samples"


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out = capsys.readouterr()
    return code, out.out, out.err


@settings(max_examples=40)
@given(st.integers(1, 6).flatmap(lambda n: st.lists(st.integers(0, 3), min_size=1 << n, max_size=1 << n)))
def test_format_round_trips(values):
    n = len(values).bit_length() - 1
    f = VbFunction(n, 2, values)
    assert io.parse_function(io.format_function(f, ["x"])) == f
    labels = np.unique(values, return_inverse=True)[1].reshape(-1)
    p = CubePartition(n, labels)
    assert io.parse_partition(io.format_partition(p)) == p
    C = VertexSet(n, np.asarray(values) == 0)
    assert io.parse_set(io.format_set(C)) == C


def test_hamming_round_trip():
    q = linear_latin(2)
    assert io.parse_partition(io.format_partition(q)) == q


@pytest.mark.parametrize("text", ["", "2 3", "2 3 4\n0 1 2", "3 3 4\n" + "0 " * 27, "2 3 4\n0 1 2 3 0 1 2 x",
                                  "2 3 2\n0 1 2 0 1 0 1 0", "2 40 2\n0"])
def test_malformed_partitions(text):
    with pytest.raises(io.FormatError):
        io.parse_partition(text)


def test_malformed_function_and_set():
    with pytest.raises(io.FormatError):
        io.parse_function("2 1\n0 1 2 0")
    with pytest.raises(io.FormatError):
        io.parse_set("2 3\n2 1 1")
    assert io.sniff("2 3 4\n0 3 1 2 2 1 3 0") == "partition"
    assert io.sniff("3 2\n0 3 1 2 2 1 3 0") == "function"


def test_verify_antipodal_sample(capsys):
    code, out, _ = run(capsys, "verify", SAMPLES / "antipodal_s4_3.part")
    assert code == 0
    assert "RESULT equitable=1 kind=S4 matrix=[[0,1,1,1],[1,0,1,1],[1,1,0,1],[1,1,1,0]]" in out


def test_verify_corrupted_sample(capsys):
    code, out, _ = run(capsys, "verify", "--expect", "S4", SAMPLES / "antipodal_s4_3_corrupted.part")
    assert code == 1
    assert "RESULT equitable=0 vertex=" in out


def test_resilience_linear_sample(capsys):
    code, out, _ = run(capsys, "resilience", "--t", 5, SAMPLES / "linear_9_2.fun")
    assert code == 0
    assert "correlation-immunity order: 5" in out and "5-resilient: yes" in out
    code, out, _ = run(capsys, "resilience", "--t", 6, SAMPLES / "linear_9_2.fun")
    assert code == 1


def test_usage_errors(capsys, tmp_path):
    bad = tmp_path / "bad.part"
    bad.write_text("2 3 4\n0 1\n")
    assert run(capsys, "verify", bad)[0] == 2
    assert run(capsys, "verify", tmp_path / "missing.part")[0] == 2
    assert run(capsys, "construct", "linear-s4")[0] == 2
    assert run(capsys, "construct", "linear-s4", "--n", 7)[0] == 2
    with pytest.raises(SystemExit) as exc:
        main(["frobnicate"])
    assert exc.value.code == 2
    with pytest.raises(SystemExit) as exc:
        main(["classify", "--n", "5"])
    assert exc.value.code == 2


def construct_cases(tmp_path):
    h4 = tmp_path / "square.part"
    h4.write_text(io.format_partition(linear_latin(2)))
    code = tmp_path / "code.part"
    code.write_text(io.format_partition(mds_from_latin(linear_latin(1))))
    a = SAMPLES / "antipodal_s4_3.part"
    return [
        (["linear-s2", "--n", 9], "S2"),
        (["linear-s4", "--n", 12], "S4"),
        (["multifold", "--m", 3, "--t", 4, "--eperf"], "EPERF"),
        (["lift", h4], "S4"),
        (["lift", code], "S2"),
        (["concat", h4, a, a], "S4"),
        (["concat", code, a, a], "S2"),
    ]


def test_construct_outputs_verify(capsys, tmp_path):
    for i, (args, kind) in enumerate(construct_cases(tmp_path)):
        out = tmp_path / f"out{i}.part"
        assert run(capsys, "construct", *args, "-o", out)[0] == 0, args
        code, text, _ = run(capsys, "verify", "--expect", kind, out)
        assert code == 0, (args, text)
    s2 = tmp_path / "out0.part"
    completed = tmp_path / "completed.part"
    assert run(capsys, "construct", "semi-complete", s2, "-o", completed)[0] == 0
    assert run(capsys, "verify", "--expect", "S4", completed)[0] == 0


def test_construct_sets(capsys, tmp_path):
    code, out, _ = run(capsys, "construct", "hamming", "--m", 3)
    assert code == 0 and len(io.parse_set(out)) == 16
    f = tmp_path / "h.set"
    f.write_text(out)
    # the dual of the Hamming code is the simplex code: 0 and seven words of weight 4
    code, dual, _ = run(capsys, "dual", f)
    words = sorted(io.parse_set(dual))
    assert code == 0 and words[0] == 0 and len(words) == 8
    assert all(int(w).bit_count() == 4 for w in words[1:])
    code, out, _ = run(capsys, "construct", "multifold", "--m", 3, "--t", 4)
    assert code == 0 and len(io.parse_set(out)) == 64


def test_bridge_commands(capsys, tmp_path):
    s4 = tmp_path / "s4.part"
    s4.write_text(io.format_partition(linear_s4(6)))
    e, c, s = tmp_path / "e.part", tmp_path / "c.part", tmp_path / "s.part"
    assert run(capsys, "expand", s4, "-o", e)[0] == 0
    assert run(capsys, "contract", e, "-o", c)[0] == 0
    assert io.read_partition(c) == linear_s4(6)
    assert run(capsys, "split", e, "-o", s)[0] == 0
    assert run(capsys, "verify", "--expect", "S3", s)[0] == 0
    # contraction of a partition that is not S2 is a verified failure
    assert run(capsys, "contract", s4)[0] == 1


def test_rank_detect_canon_equiv(capsys, tmp_path):
    lin = SAMPLES / "linear_9_2.fun"
    code, out, _ = run(capsys, "rank", lin)
    assert code == 0 and "rank class: linear" in out
    s4 = tmp_path / "s4.part"
    s4.write_text(io.format_partition(linear_s4(9)))
    assert run(capsys, "detect", "semilinear", s4)[0] == 0
    assert run(capsys, "detect", "reducible", SAMPLES / "antipodal_s4_3.part")[0] == 1
    canon = tmp_path / "canon.fun"
    assert run(capsys, "canon", lin, "-o", canon)[0] == 0
    code, out, _ = run(capsys, "equiv", lin, canon)
    assert code == 0 and out.strip() == "equivalent"
    other = tmp_path / "other.fun"
    other.write_text(io.format_function(VbFunction(9, 2, np.arange(512) % 4)))
    assert run(capsys, "equiv", lin, other)[0] == 1


def test_verify_flags(capsys, tmp_path):
    s4 = tmp_path / "s4.part"
    s4.write_text(io.format_partition(linear_s4(9)))
    code, out, _ = run(capsys, "verify", "--flags", s4)
    assert code == 0 and "rank class: linear" in out and "reducible: yes" in out


def test_classify_command(capsys, tmp_path):
    code, out, _ = run(capsys, "classify", "--n", 6, "--out", tmp_path)
    assert code == 0
    assert out.splitlines()[0] == "n=6 classes=2 linear=1 strictly-semilinear=1 full-rank=0"
    assert sorted(p.name for p in tmp_path.iterdir()) == ["class_n6_00.fun", "class_n6_01.fun"]
    code, out2, _ = run(capsys, "classify", "--n", 6, "--method", "multifold")
    assert code == 0 and out2.splitlines()[0] == out.splitlines()[0]
    code, out, _ = run(capsys, "classify", "--n", 9, "--budget", 0.2)
    assert code == 1 and "complete: no" in out


def test_output_is_deterministic():
    cmd = [sys.executable, "-m", "eqpart", "classify", "--n", "6"]
    first = subprocess.run(cmd, capture_output=True)
    second = subprocess.run(cmd, capture_output=True)
    assert first.returncode == 0 and first.stdout == second.stdout
