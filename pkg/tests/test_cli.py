import subprocess
import sys
from importlib import resources

import pytest

from msgautomata.cli import cli_main
from msgautomata.textio import parse_automaton

EXAMPLES = resources.files("msgautomata") / "examples"


def ex(name):
    return str(EXAMPLES / name)


def run(capsys, *argv):
    code = cli_main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_outset(capsys):
    code, out, _ = run(capsys, "outset", ex("parity.mpa"), "L", "L", "?")
    assert code == 0 and out == "⟨0⟩\n"


def test_outset_chaos(capsys):
    code, out, _ = run(capsys, "outset", ex("buffer_ab_cap3.mpa"), "?")
    assert code == 0 and out == "⟨⟩ ^ ...\n"


def test_validate(capsys):
    code, out, _ = run(capsys, "validate", ex("parity.mpa"))
    assert code == 0 and out.startswith("ok: parity")


def test_validate_bad_file(capsys, tmp_path):
    bad = tmp_path / "bad.mpa"
    bad.write_text("automaton x\nalphabet a\nstate p\ninit p /\ntrans p a -> nowhere /\n")
    code, _, err = run(capsys, "validate", str(bad))
    assert code == 1
    assert "line 5" in err and "unknown state nowhere" in err


def test_missing_file(capsys, tmp_path):
    code, _, err = run(capsys, "validate", str(tmp_path / "none.mpa"))
    assert code == 1 and err.startswith("error:")


def test_info(capsys):
    code, out, _ = run(capsys, "info", ex("figure_step5.mpa"))
    assert code == 0
    assert "total: no" in out
    assert "missing: (Selected,select)" in out
    assert "reachable: Deselected Selected" in out


def test_run(capsys):
    code, out, _ = run(capsys, "run", ex("parity.mpa"), "L", "L", "?")
    assert code == 0
    assert out == "init even / ; even -L/-> odd ; odd -L/-> even ; even -?/0-> even\n"


def test_run_reports_chaos(capsys):
    code, out, _ = run(capsys, "run", ex("figure_step5.mpa"), "select", "select")
    assert code == 0
    assert "init Selected / ; Selected -select/*-> chaos" in out.splitlines()


def test_run_unknown_character(capsys):
    code, _, err = run(capsys, "run", ex("parity.mpa"), "x")
    assert code == 1 and "unknown character x" in err


def test_check_refines_holds(capsys):
    code, out, _ = run(capsys, "check-refines", ex("figure_step5.mpa"), ex("figure_step6.mpa"))
    assert code == 0 and out.startswith("holds")


def test_check_refines_fails(capsys, tmp_path):
    liar = tmp_path / "liar.mpa"
    liar.write_text(
        (EXAMPLES / "parity.mpa").read_text(encoding="utf-8") + "trans even ? -> even / L\n"
    )
    code, out, _ = run(capsys, "check-refines", ex("parity.mpa"), str(liar), "--depth", "2")
    assert code == 1
    assert "counterexample input: ⟨?⟩" in out
    assert "uncovered output: ⟨L⟩" in out


def test_check_refines_alphabet_mismatch(capsys):
    code, _, err = run(capsys, "check-refines", ex("parity.mpa"), ex("figure_step6.mpa"))
    assert code == 1 and "alphabets differ" in err


def test_refine(capsys, tmp_path):
    code, out, _ = run(capsys, "refine", ex("figure.rft"), "--emit-intermediates", str(tmp_path))
    assert code == 0
    assert parse_automaton(out) == parse_automaton((EXAMPLES / "figure_step6.mpa").read_text(encoding="utf-8"))
    written = sorted(p.name for p in tmp_path.iterdir())
    assert written == [f"step{i}.mpa" for i in range(1, 6)]
    step4 = parse_automaton((tmp_path / "step4.mpa").read_text(encoding="utf-8"))
    assert step4 == parse_automaton((EXAMPLES / "figure_step5.mpa").read_text(encoding="utf-8"))


def test_refine_failing_transcript(capsys, tmp_path):
    bad = tmp_path / "bad.rft"
    bad.write_text(f"refine {EXAMPLES / 'parity.mpa'}\nadd-state x\nremove-state even\n")
    code, _, err = run(capsys, "refine", str(bad))
    assert code == 1
    assert "step 2 (line 3)" in err and "RemS" in err


def test_export_dot(capsys):
    code, out, _ = run(capsys, "export-dot", ex("parity.mpa"))
    assert code == 0 and out.startswith('digraph "parity"')


def test_usage_error(capsys):
    assert cli_main(["frobnicate"]) == 2
    capsys.readouterr()


@pytest.mark.parametrize("argv", [["validate", "parity.mpa"], ["outset", "parity.mpa", "?"]])
def test_module_entry_point(argv):
    proc = subprocess.run(
        [sys.executable, "-m", "msgautomata", *argv],
        cwd=str(EXAMPLES),
        capture_output=True,
        text=True,
        encoding="utf-8",
    )
    assert proc.returncode == 0, proc.stderr
