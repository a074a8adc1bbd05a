import subprocess
import sys

from groupsys import fixtures as F
from groupsys.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    cap = capsys.readouterr()
    return code, cap.out, cap.err


def test_analyze_h8(capsys):
    code, out, _ = run(capsys, "analyze", F.code_path("h8"))
    assert code == 0
    assert "\nell 3\n" in out and "state profile: 1 4 4 4 1" in out


def test_output_is_deterministic(capsys):
    a = run(capsys, "verify", F.code_path("s3chain"))
    b = run(capsys, "verify", F.code_path("s3chain"))
    assert a == b and a[0] == 0


def test_decode_preferred_h8(tmp_path, capsys):
    w = tmp_path / "w.txt"
    w.write_text("(10, 01, 01, 10)\n")
    code, out, _ = run(capsys, "decode", F.code_path("h8"), str(w), "--prefer", "2 2 2 2",
                       "--prefer", "3 3 0 0", "--prefer", "0 3 3 0", "--prefer", "0 0 3 3")
    assert code == 0
    assert "selected generators: g1 g3" in out


def test_encode_empty_tensor(tmp_path, capsys):
    t = tmp_path / "t.tensor"
    t.write_text("tensor\nend\n")
    code, out, _ = run(capsys, "encode", F.code_path("h8"), str(t))
    assert code == 0 and "0 0 0 0" in out


def test_quotient_fibers(capsys):
    code, out, _ = run(capsys, "quotient", F.code_path("h8"), "--index", "3,0", "--index", "1,1")
    assert code == 0
    assert "0000, 0033, 3300, 3333" in out
    assert "homomorphism: pass" in out


def test_bad_input_exits_2(tmp_path, capsys):
    bad = tmp_path / "bad.code"
    bad.write_text("code bad\nlength 2\nalphabet Z2\ncodewords\n1 0\n0 1\nend\n")
    code, _, err = run(capsys, "analyze", str(bad))
    assert code == 2 and "error" in err
    code, _, _ = run(capsys, "analyze", str(tmp_path / "missing.code"))
    assert code == 2


def test_time_invariance_failure_is_reported(capsys):
    code, _, err = run(capsys, "verify", F.code_path("h8"), "--period1")
    assert code == 2 and "window" in err


def test_synthesize_then_analyze(tmp_path, capsys):
    code, out, _ = run(capsys, "synthesize", F.spec_path("z2seq"), "--out", str(tmp_path))
    assert code == 0
    written = tmp_path / "z2seq.code"
    assert written.exists()
    code, out, _ = run(capsys, "analyze", str(written))
    assert code == 0


def test_report_file(tmp_path, capsys):
    dest = tmp_path / "r" / "report.txt"
    code, out, _ = run(capsys, "generators", F.code_path("z2rate1"), "--out", str(dest))
    assert code == 0 and dest.read_text() == out


def test_console_module_runs():
    proc = subprocess.run([sys.executable, "-m", "groupsys.cli", "verify", F.code_path("z2rate1"), "--period1"],
                          capture_output=True, text=True)
    assert proc.returncode == 0, proc.stderr
    assert "signature group order 4" in proc.stdout


def test_block_report_cli(capsys):
    code, out, _ = run(capsys, "block-report", F.code_path("h8"))
    assert code == 0 and "group stack" in out
