import csv
import shutil

import pytest

from henkin_synth.cli import main
from henkin_synth.formula import read_dqdimacs
from henkin_synth import oracle
from henkin_synth.certificate import parse_henkin_vector

from conftest import instance_path


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_synthesize_example1(tmp_path, capsys):
    cert = tmp_path / "f.hfn"
    code, out, _ = run(capsys, "synthesize", instance_path("example1.dqdimacs"), "--output", str(cert))
    assert code == 10
    assert "RESULT: SYNTHESIZED" in out
    _, vec = parse_henkin_vector(cert.read_text())
    assert oracle.check_vector(read_dqdimacs(instance_path("example1.dqdimacs")), vec)
    code, out, _ = run(capsys, "verify", instance_path("example1.dqdimacs"), str(cert))
    assert code == 0 and "CERTIFICATE: VALID" in out


def test_synthesize_to_stdout(capsys):
    code, out, _ = run(capsys, "synthesize", instance_path("xor2.dqdimacs"))
    assert code == 10
    assert "hfn 1 3 1" in out


def test_false_exit_code(capsys):
    code, out, _ = run(capsys, "synthesize", instance_path("unsat_matrix.dqdimacs"))
    assert code == 20 and "RESULT: FALSE" in out


def test_limitation_unknown_with_seeded_candidates(tmp_path, capsys):
    seed = tmp_path / "seed.hfn"
    seed.write_text("hfn 1 5 2\ndef 4 2\ndef 5 (not 2)\n")
    code, out, _ = run(capsys, "synthesize", instance_path("limitation.dqdimacs"), "--candidates", str(seed))
    assert code == 0
    assert "RESULT: UNKNOWN" in out
    assert "unrepaired existentials: 4 5" in out


def test_usage_and_io_errors(tmp_path, capsys):
    assert run(capsys, "synthesize", str(tmp_path / "missing.dqdimacs"))[0] == 1
    bad = tmp_path / "bad.dqdimacs"
    bad.write_text("p cnf 2 1\na 1 0\n1 2 0\n")
    code, _, err = run(capsys, "synthesize", str(bad))
    assert code == 1 and "line 3" in err
    assert run(capsys, "frobnicate")[0] == 1
    assert run(capsys)[0] == 1


def test_flags(tmp_path, capsys):
    code, out, _ = run(
        capsys, "synthesize", instance_path("example1.dqdimacs"),
        "--seed", "0", "--samples", "3", "--timeout", "10", "--max-iterations", "50",
        "--strict-paper", "--dump-samples", str(tmp_path / "s.csv"),
        "--dump-trees", str(tmp_path / "t"), "--trace-repairs", str(tmp_path / "r.txt"),
    )
    assert code in (10, 0)
    assert (tmp_path / "s.csv").exists() and (tmp_path / "r.txt").exists()


def test_verify_rejects_bad_certificates(tmp_path, capsys):
    inst = instance_path("example1.dqdimacs")
    wrong = tmp_path / "w.hfn"
    wrong.write_text("hfn 1 6 3\ndef 4 (not 1)\ndef 5 4\ndef 6 (or 2 3)\n")
    code, out, _ = run(capsys, "verify", inst, str(wrong))
    assert code == 2 and "Henkin sets violated" in out
    wrong.write_text("hfn 1 6 3\ndef 4 (not 1)\ndef 5 (not 1)\ndef 6 (or 2 3)\n")
    code, out, _ = run(capsys, "verify", inst, str(wrong))
    assert code == 2 and "CERTIFICATE: INVALID" in out
    code, out, _ = run(capsys, "verify", inst, str(wrong), "--enum-cap", "0")
    assert code == 2 and "method: sat" in out
    wrong.write_text("garbage\n")
    assert run(capsys, "verify", inst, str(wrong))[0] == 1


def test_decide(capsys):
    assert run(capsys, "decide", instance_path("limitation.dqdimacs"))[0] == 10
    assert run(capsys, "decide", instance_path("const_cannot_track.dqdimacs"))[0] == 20


def test_bench_bundled(tmp_path, capsys):
    out_csv = tmp_path / "r.csv"
    cactus = tmp_path / "c.txt"
    src = instance_path("")
    code, _, err = run(capsys, "bench", src, "--csv", str(out_csv), "--cactus", str(cactus))
    assert code == 0
    rows = list(csv.reader(out_csv.open()))
    assert rows[0] == ["instance", "outcome", "seconds", "iterations", "solver_calls", "seed"]
    assert len(rows) == 13
    decided = [r for r in rows[1:] if r[1] in ("synthesized", "false")]
    assert len(decided) >= 9
    assert sum(float(r[2]) for r in rows[1:]) < 60
    for r in rows[1:]:
        truth = oracle.decide_truth(read_dqdimacs(instance_path(r[0])))[0]
        if r[1] == "synthesized":
            assert truth
        if r[1] == "false":
            assert not truth
    assert cactus.read_text().splitlines()[0] == "solved cumulative_seconds"
    assert "instances=12" in err


def test_bench_empty_dir(tmp_path, capsys):
    out_csv = tmp_path / "r.csv"
    code, _, _ = run(capsys, "bench", str(tmp_path), "--csv", str(out_csv))
    assert code == 0
    assert out_csv.read_text().strip() == "instance,outcome,seconds,iterations,solver_calls,seed"


def test_bench_mixed_and_parallel(tmp_path, capsys):
    shutil.copy(instance_path("xor2.dqdimacs"), tmp_path / "a.dqdimacs")
    (tmp_path / "b.dqdimacs").write_text("p cnf oops\n")
    out_csv = tmp_path / "r.csv"
    code, _, _ = run(capsys, "bench", str(tmp_path), "--csv", str(out_csv), "--jobs", "2")
    assert code == 0
    rows = list(csv.reader(out_csv.open()))
    assert [r[:2] for r in rows[1:]] == [["a.dqdimacs", "synthesized"], ["b.dqdimacs", "parse_error"]]
