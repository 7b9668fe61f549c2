import json

import pytest

from seqprove.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def test_prove_tautology(capsys):
    code, out, _ = run(capsys, "prove", "--calculus", "G4ip", "p -> p")
    assert code == 0
    assert out.strip() == "PROVABLE"


def test_prove_modal_k(capsys):
    code, out, _ = run(capsys, "prove", "--calculus", "G4i+R_K", "--engine", "g4",
                       "([]p & []q) -> [](p & q)")
    assert code == 0
    assert "PROVABLE" in out


def test_prove_peirce_unprovable_g3(capsys):
    code, out, _ = run(capsys, "prove", "--calculus", "G3ip", "--engine", "g3",
                       "((p -> q) -> p) -> p")
    assert code == 1
    assert out.strip() == "UNPROVABLE"


def test_prove_sequent_flag(capsys):
    code, out, _ = run(capsys, "prove", "--calculus", "G4ip", "--sequent", "p & q => q")
    assert code == 0


def test_prove_parse_error(capsys):
    code, _, err = run(capsys, "prove", "--calculus", "G4ip", "p ->")
    assert code >= 3
    assert "parse error" in err


def test_prove_engine_mismatch(capsys):
    code, _, err = run(capsys, "prove", "--calculus", "G3ip", "--engine", "g4", "p")
    assert code >= 3


def test_prove_emit_json(capsys):
    code, out, _ = run(capsys, "prove", "--calculus", "G4ip", "--emit", "json", "p -> p")
    assert code == 0
    payload = json.loads(out)
    assert payload["verdict"] == "provable"
    assert payload["derivation"]["rule"] == "RImp"
    assert list(payload["derivation"].keys()) == ["sequent", "rule", "children"]


def test_prove_refuses_nonterminating_g4(capsys):
    code, _, err = run(capsys, "prove", "--calculus", "G4i+R_GL", "--engine", "g4", "p")
    assert code >= 3
    assert "terminating" in err


def test_transform_rk(capsys):
    code, out, err = run(capsys, "transform", "--rules", "R_K")
    assert code == 0
    assert "rule R_K-> {" in out
    assert "P, box G, (box phi -> psi) => D" in out
    assert "# generated from R_K" in out


def test_transform_rt_warns(capsys):
    code, out, err = run(capsys, "transform", "--rules", "R_T")
    assert code == 0
    assert "R_T" in out
    assert "->" not in [line.split()[1] for line in out.splitlines()
                        if line.startswith("rule ")][-1]
    assert "not right modal" in err


def test_transform_rk_rd_one_generated(capsys):
    code, out, _ = run(capsys, "transform", "--rules", "R_K,R_D")
    assert code == 0
    generated = [line for line in out.splitlines() if line.startswith("# generated")]
    assert generated == ["# generated from R_K"]


def test_transform_output_reparses(capsys, tmp_path):
    code, out, _ = run(capsys, "transform", "--rules", "R_K,R_T")
    from seqprove.dsl import parse_rules
    rules, errors = parse_rules(out)
    assert not errors
    assert {"R_K", "R_K->", "R_T"} <= {r.name for r in rules}


def test_check_termination_positive(capsys):
    code, out, _ = run(capsys, "check-termination", "--rules", "R_K,R_D,R_T")
    assert code == 0
    lines = out.strip().splitlines()
    assert lines == ["R_K: TERMINATING", "R_D: TERMINATING", "R_T: TERMINATING"]


def test_check_termination_counterexample(capsys):
    code, out, _ = run(capsys, "check-termination", "--rules", "R_GL")
    assert code == 1
    assert out.startswith("R_GL: COUNTEREXAMPLE")


def test_check_termination_mixed(capsys):
    code, out, _ = run(capsys, "check-termination", "--rules", "R_K4,R_SL")
    assert code == 1
    assert out.count("COUNTEREXAMPLE") == 2


def test_check_termination_weights_file(capsys, tmp_path):
    weights = tmp_path / "w.txt"
    weights.write_text("and = 2\nor = 1\nimp = 1\nbox = 1\n")
    code, out, _ = run(capsys, "check-termination", "--rules", "R_K",
                       "--order", str(weights))
    assert code == 0 and "TERMINATING" in out


def test_equiv_test_small(capsys):
    code, out, _ = run(capsys, "equiv-test", "--modal", "R_K", "--count", "40",
                       "--size", "8", "--seed", "42")
    assert code == 0
    lines = out.strip().splitlines()
    summary = json.loads(lines[-1])
    assert summary["disagree"] == 0
    assert summary["count"] == 40
    assert len(lines) == 41


def test_equiv_test_empty(capsys):
    code, out, _ = run(capsys, "equiv-test", "--count", "0")
    assert code == 0
    assert json.loads(out.strip().splitlines()[-1])["count"] == 0


def test_equiv_test_refuses_gl(capsys, tmp_path):
    rules = tmp_path / "gl.rules"
    rules.write_text("rule R_GL { premises: G, box G, box phi => phi ; "
                     "conclusion: P, box G => box phi }\n")
    with pytest.warns(UserWarning):
        code, _, err = run(capsys, "equiv-test", "--modal", str(rules), "--count", "5")
    assert code >= 3
    assert "terminating" in err


def test_equiv_test_byte_identical(capsys):
    a = run(capsys, "equiv-test", "--modal", "R_K", "--count", "25", "--seed", "7")
    b = run(capsys, "equiv-test", "--modal", "R_K", "--count", "25", "--seed", "7")
    assert a == b


def test_rules_parse(capsys, tmp_path):
    f = tmp_path / "mine.rules"
    f.write_text("rule R_K { premises: G => phi ; conclusion: P, box G => box phi }\n")
    code, out, _ = run(capsys, "rules-parse", str(f))
    assert code == 0
    assert "# R_K: right-modal, 1 premise(s)" in out


def test_rules_parse_errors(capsys, tmp_path):
    f = tmp_path / "bad.rules"
    f.write_text("rule Bad { premises: G, psi => phi ; conclusion: G => phi }\n")
    code, out, err = run(capsys, "rules-parse", str(f))
    assert code == 3
    assert "psi" in err


def test_unknown_calculus(capsys):
    code, _, err = run(capsys, "prove", "--calculus", "G5ip", "p")
    assert code >= 3


def test_usage_error_exit_code(capsys):
    code = main(["prove"])  # missing goal
    assert code >= 3


def test_prove_with_user_rules_file(capsys, tmp_path):
    f = tmp_path / "k.rules"
    f.write_text("rule R_K { premises: G => phi ; conclusion: P, box G => box phi }\n")
    code, out, _ = run(capsys, "prove", "--calculus", f"G4i+{f}", "--engine", "g4",
                       "([]p & []q) -> [](p & q)")
    assert code == 0 and "PROVABLE" in out
    code, _, _ = run(capsys, "prove", "--calculus", f"G3i+{f}", "--engine", "g3",
                     "[]p -> p")
    assert code == 1


def test_equiv_test_exhaustive_match(capsys):
    code, out, _ = run(capsys, "equiv-test", "--modal", "R_K", "--count", "15",
                       "--seed", "3", "--match", "exhaustive")
    assert code == 0
    assert json.loads(out.strip().splitlines()[-1])["disagree"] == 0
