import io
import json
import subprocess
import sys
from pathlib import Path

import pytest

from grovecheck.cli import main

SAMPLES = Path(__file__).resolve().parent.parent / "samples"
LAWS = str(SAMPLES / "laws.grove")


def run(*argv):
    out = io.StringIO()
    code = main([str(a) for a in argv], out)
    return code, out.getvalue()


def test_check_equivalent():
    code, text = run("check", LAWS, "--lhs", "fp_lhs", "--rhs", "fp_rhs")
    assert code == 0 and json.loads(text) == {"verdict": "equivalent"}


def test_check_not_equivalent(tmp_path):
    target = tmp_path / "v.json"
    code, text = run("check", LAWS, "--lhs", "dist_lhs", "--rhs", "dist_rhs", "--json", target)
    assert code == 1
    data = json.loads(text)
    assert data["witness_word"] == "g_1 # h_1 $ # k_1 $"
    assert json.loads(target.read_text()) == data


def test_check_with_oracle():
    assert run("check", LAWS, "--lhs", "fp_lhs", "--rhs", "fp_rhs", "--oracle", 4, "--seed", 3)[0] == 0
    assert run("check", LAWS, "--lhs", "dist_lhs", "--rhs", "dist_rhs", "--oracle", 2)[0] == 1


def test_check_sort_mismatch(capsys):
    code, _ = run("check", LAWS, "--lhs", "fp_lhs", "--rhs", "dist_lhs")
    assert code == 2
    assert capsys.readouterr().err.startswith("error: ")


@pytest.mark.parametrize("argv", [
    ["check", LAWS, "--lhs", "fp_lhs"],
    ["check", LAWS, "--lhs", "fp_lhs", "--rhs", "nope"],
    ["check", "/no/such/file.grove", "--lhs", "a", "--rhs", "b"],
    ["unfold", LAWS, "--term", "loop", "--depth", "-1"],
    ["eval", LAWS, "--term", "loop", "--interp", LAWS, "--max-len", "3"],
    ["frobnicate"],
])
def test_usage_errors(argv):
    assert run(*argv)[0] == 2


def test_ill_sorted_definition():
    assert run("check", LAWS, "--lhs", "bad", "--rhs", "bad")[0] == 2


def test_eval_words():
    code, text = run("eval", LAWS, "--term", "loop", "--interp", SAMPLES / "words.interp", "--max-len", 5)
    assert code == 0
    assert text == "component 1:\nb\na b\na a b\na a a b\na a a a b\n"


def test_eval_trees():
    code, text = run("eval", LAWS, "--term", "dist_lhs", "--interp", SAMPLES / "trees.interp", "--max-len", 5)
    assert code == 0 and text == "component 1:\nc\na(b)\n"


def test_eval_zero_lists_nothing():
    code, text = run("eval", LAWS, "--term", "nothing", "--interp", SAMPLES / "words.interp", "--max-len", 4)
    assert code == 0 and text == "component 1:\n"


def test_eval_missing_variable(tmp_path, capsys):
    partial = tmp_path / "p.interp"
    partial.write_text('interp { h = { "c" } }')
    code, _ = run("eval", LAWS, "--term", "dist_lhs", "--interp", partial, "--max-len", 3)
    assert code == 2
    assert "variable g" in capsys.readouterr().err


def test_reduce_merges_copies():
    code, text = run("reduce", LAWS, "--term", "twice")
    assert code == 0 and text.count("shape=diamond") == 1


def test_unfold_depth_zero():
    code, text = run("unfold", LAWS, "--term", "letter", "--depth", 0)
    assert code == 0
    assert "shape=diamond" not in text and "root 1" in text


def test_unfold_to_file(tmp_path):
    target = tmp_path / "u.dot"
    code, text = run("unfold", LAWS, "--term", "loop", "--depth", 3, "--dot", target)
    assert code == 0 and text == ""
    assert target.read_text().count('label="a"') == 3


def test_enumerate_letter():
    code, text = run("enumerate", LAWS, "--term", "letter", "--max-len", 6)
    assert code == 0 and text == "a\na # x1 $\n"


def test_outputs_are_reproducible():
    argv = ["check", LAWS, "--lhs", "dist_rhs", "--rhs", "dist_lhs", "--oracle", 3, "--seed", 7]
    assert run(*argv) == run(*argv)
    assert run("reduce", LAWS, "--term", "fp_rhs") == run("reduce", LAWS, "--term", "fp_rhs")


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "grovecheck", "enumerate", LAWS, "--term", "letter",
                           "--max-len", "2"], capture_output=True, text=True)
    assert proc.returncode == 0 and proc.stdout == "a\n"
