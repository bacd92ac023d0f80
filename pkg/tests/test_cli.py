from __future__ import annotations

import json
from pathlib import Path

import pytest

from specsemi.cli import main

CORPUS = Path(__file__).resolve().parent.parent / "corpus"


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out, err = capsys.readouterr()
    return code, out, err


def test_check_ok(capsys):
    code, out, _ = run(capsys, "check", CORPUS / "witness.json")
    assert code == 0 and out.startswith("axioms: ok")


def test_check_regular_violation_prints_json_witness(capsys):
    code, out, _ = run(capsys, "check", CORPUS / "witness.json", "--regular", "--json")
    assert code == 1
    report = json.loads(out)
    failing = [v for r in report["reports"] for v in r["verdicts"] if not v["ok"]]
    assert failing[0]["witness"] == {"lhs": "a", "rhs": ["b", "c"], "closure_join": "s"}


def test_check_seed_fails_axioms(capsys):
    code, out, _ = run(capsys, "check", CORPUS / "witness_seed.json")
    assert code == 1 and '"lhs": "a"' in out


def test_input_error_exit_code(capsys, tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text('{"kind": "cspace", "points": ["1"], "closed": []}')
    code, _, err = run(capsys, "check", bad)
    assert code == 2 and "$.closed" in err
    code, _, _ = run(capsys, "check", tmp_path / "absent.json")
    assert code == 2


def test_validation_error_exit_code(capsys, tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({"kind": "csl", "elements": ["0", "1"], "join": [["0", "1"], ["1", "1"]],
                               "K": {"0": "0", "1": "0"}}))
    code, out, _ = run(capsys, "check", bad)
    assert code == 1 and json.loads(out)["ok"] is False


def test_saturate(capsys):
    code, out, _ = run(capsys, "saturate", CORPUS / "witness_seed.json")
    assert code == 0
    assert out == (CORPUS / "witness.json").read_text()


def test_extend(capsys):
    code, out, _ = run(capsys, "extend", CORPUS / "two_chain_total.json")
    assert code == 0 and len(json.loads(out)["elements"]) == 3


def test_extend_cap(capsys):
    code, _, err = run(capsys, "extend", CORPUS / "witness.json", "--max-elements", "4")
    assert code == 2 and "cap" in err


def test_env_cap(capsys, monkeypatch):
    monkeypatch.setenv("SPECSEMI_MAX_EXTEND", "3")
    code, _, _ = run(capsys, "extend", CORPUS / "witness.json")
    assert code == 2


def test_embed_and_reduct(capsys):
    code, out, _ = run(capsys, "embed", CORPUS / "chain_csl.json")
    assert code == 0 and json.loads(out)["map"] == {"0": [], "1": ["0"]}
    code, out, _ = run(capsys, "reduct", CORPUS / "chain_csl.json")
    assert code == 0 and len(json.loads(out)["spec"]) == 6
    code, out, _ = run(capsys, "reduct", CORPUS / "gap_space.json")
    assert code == 0 and len(json.loads(out)["elements"]) == 8


def test_represent(capsys):
    code, out, _ = run(capsys, "represent", CORPUS / "one_element.json")
    assert code == 0 and json.loads(out)["space"]["points"] == ["e", "e+K{e}"]


def test_lift(capsys):
    code, out, _ = run(capsys, "lift", CORPUS / "hom_unit_point.json")
    assert code == 0 and json.loads(out)["map"] == {"e": "0", "e+K{e}": "1"}
    code, out, _ = run(capsys, "lift", CORPUS / "hom_into_chain.json", "--between")
    assert code == 0 and json.loads(out)["map"] == {"e": "0", "e+K{e}": "0+K{0}"}


def test_lift_non_regular_target(capsys, tmp_path):
    hom = tmp_path / "h.json"
    hom.write_text(json.dumps({"kind": "hom", "from": str(CORPUS / "one_element.json"),
                               "to": str(CORPUS / "witness.json"), "map": {"e": "a"}}))
    code, _, err = run(capsys, "lift", hom)
    assert code == 2 and "regular" in err


def test_search(capsys):
    code, out, _ = run(capsys, "search", "--property", "topo-gap", "--size", "3")
    assert code == 0 and json.loads(out)["witness"] == {"a": ["1"], "b": ["2"], "c": ["3"]}
    code, out, _ = run(capsys, "search", "--property", "topo-gap", "--size", "2")
    assert code == 1 and json.loads(out)["structure"] is None
    code, out, _ = run(capsys, "search", "--generate", "mspec", "--seed", "7", "--size", "4", "--density", "0.3")
    assert code == 0 and json.loads(out)["kind"] == "mspec"


def test_search_needs_mode(capsys):
    code, _, _ = run(capsys, "search")
    assert code == 2


@pytest.mark.parametrize("suite,extra", [("axioms", ["--count", "8"]), ("derived", ["--count", "8"]),
                                         ("corre2", ["--count", "8"]), ("emb", ["--count", "5"]),
                                         ("corm", ["--count", "8"]), ("universal", ["--size", "2"])])
def test_verify_suites(capsys, suite, extra):
    code, out, _ = run(capsys, "verify", suite, *extra, "--json")
    assert code == 0 and json.loads(out)["ok"]


def test_verify_files(capsys):
    code, out, _ = run(capsys, "verify", "axioms", CORPUS / "witness.json", CORPUS / "witness_seed.json")
    assert code == 1
    assert "FAIL  witness_seed.json" in out


def test_usage_error(capsys):
    with pytest.raises(SystemExit) as info:
        main(["frobnicate"])
    assert info.value.code == 2


def test_verify_files_take_reducts(capsys):
    code, out, _ = run(capsys, "verify", "axioms", CORPUS / "chain_csl.json", CORPUS / "gap_space.json")
    assert code == 0 and "gap_space.json" in out
    code, _, err = run(capsys, "verify", "axioms", CORPUS / "hom_into_chain.json")
    assert code == 2 and "Homomorphism" in err
