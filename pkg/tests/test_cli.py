"""Command line: exit codes, diagnostics, report formats and determinism."""

from __future__ import annotations

import io
import json
import re
import shutil
from importlib import resources

import pytest

from gstruct.cli import main
from gstruct.documents import flatten, parse_text

DATA = resources.files("gstruct").joinpath("data")


def run(*argv):
    out, err = io.StringIO(), io.StringIO()
    code = main(list(argv), stdout=out, stderr=err)
    return code, out.getvalue(), err.getvalue()


def run_json(*argv):
    code, out, err = run(*argv, "--format", "json")
    return code, (json.loads(out) if out else None), err


def bundled(tmp_path, name):
    dst = tmp_path / name
    dst.write_bytes(DATA.joinpath(name).read_bytes())
    return dst


def write(tmp_path, name, doc):
    p = tmp_path / name
    p.write_text(json.dumps(doc) if not isinstance(doc, str) else doc)
    return str(p)


R = lambda p, q=1: {"num": p, "den": q}  # noqa: E731


# ---------------------------------------------------------------------------
# happy paths

def test_validate_bundled_algebra():
    code, rep, _ = run_json("validate", "g2.json")
    assert code == 0
    res = rep["results"]
    assert res["jacobi"] and res["transitive"] and res["complete"] and res["dim"] == 14
    assert rep["provenance"]["source"] == "bundled:g2.json"
    assert rep["command"] == {"name": "validate", "flags": {}, "files": ["g2.json"]}


def test_prolong_g235(tmp_path):
    path = bundled(tmp_path, "g235.json")
    code, rep, _ = run_json("prolong", "--cap", "6", str(path))
    assert code == 0
    res = rep["results"]
    assert res["dims_by_degree"] == {"-3": 2, "-2": 1, "-1": 2, "0": 4, "1": 2, "2": 1, "3": 2}
    assert res["total_dim"] == 14 and res["verdict"] == "finite_type"
    assert res["reduction"]["f0_dim"] == 0


def test_prolong_heisenberg_reports_heuristic():
    code, rep, _ = run_json("prolong", "--cap", "3", "heisenberg.json")
    res = rep["results"]
    assert code == 0 and res["heuristic"]
    assert res["dims_by_degree"]["0"] == 4 and res["reduction"]["f0_dim"] == 3


def test_invariants_riemann3():
    code, rep, _ = run_json("invariants", "--cap", "4", "--convention", "section5", "riemann3.json")
    assert code == 0
    res = rep["results"]
    assert res["section5"]["I2"] == [2] and res["section5"]["I1"] == [1]
    assert res["r0"] == 2 and res["scan_complete"]
    assert "intro" not in res


def test_cohomology_range():
    code, rep, _ = run_json("cohomology", "--q", "2", "--r", "1..2", "riemann3.json")
    assert code == 0
    rows = rep["results"]["by_degree"]
    assert rows["1"]["h"] == 0 and rows["2"]["h"] == 6
    assert rep["results"]["square_zero"]


def test_condition_c():
    code, rep, _ = run_json("condition-c", "--cap", "3", "riemann3.json")
    assert code == 0 and rep["results"]["invariant_under_g0"]
    code, rep, _ = run_json("condition-c", "--cap", "5", "g2.json")
    assert code == 0 and not rep["results"]["invariant_under_g0"]
    assert rep["results"]["witnesses"]


def test_model_check_bundled():
    code, rep, _ = run_json("model-check", "sphere3_model.json")
    assert code == 0
    res = rep["results"]
    assert res["identities"]["all_zero"] and res["verdict"]["cartan"]
    assert all(s["violations"] == 0 for s in res["corollaries"]["summary"].values())
    code, rep, _ = run_json("model-check", "--identities", "contact_filtered_model.json")
    assert code == 0 and rep["results"]["identities"]["all_zero"]
    assert "corollaries" not in rep["results"]


def test_explicit_generators(tmp_path):
    doc = {"name": "plane_rotations", "degrees": {"-1": 2}, "brackets": [],
           "g0": {"mode": "explicit", "generators": [{"-1": [[0, -1], [1, 0]]}]}}
    code, rep, _ = run_json("prolong", "--cap", "3", write(tmp_path, "rot.json", doc))
    assert code == 0
    assert rep["results"]["dims_by_degree"] == {"-1": 2, "0": 1}
    assert rep["results"]["verdict"] == "finite_type"
    assert rep["provenance"]["g0"] == "explicit"


# ---------------------------------------------------------------------------
# errors

def test_truncated_json_is_schema_error(tmp_path):
    text = DATA.joinpath("g235.json").read_text()[:50]
    code, out, err = run("validate", write(tmp_path, "bad.json", text))
    assert code == 3 and out == ""
    # diagnostics are FILE:LINE:COLUMN
    assert re.search(r"bad\.json:\d+:\d+: ", err)


def test_negative_denominator_names_entry(tmp_path):
    doc = json.loads(DATA.joinpath("heisenberg.json").read_text())
    doc["brackets"][0]["out"][0]["den"] = -2
    code, _, err = run("validate", write(tmp_path, "neg.json", doc))
    assert code == 3
    assert "brackets[0].out[0].den" in err and "positive" in err and "-2" in err


def test_unknown_g0_mode_lists_modes(tmp_path):
    doc = {"name": "x", "degrees": {"-1": 2}, "brackets": [], "g0": {"mode": "conformal"}}
    code, _, err = run("prolong", write(tmp_path, "mode.json", doc))
    assert code == 3
    for m in ("full-derivations", "metric-orthogonal", "explicit"):
        assert m in err


def test_unknown_field_flagged(tmp_path):
    doc = {"name": "x", "degrees": {"-1": 2}, "brackets": [], "colour": "red"}
    code, _, err = run("validate", write(tmp_path, "f.json", doc))
    assert code == 3 and "colour" in err


def test_usage_errors():
    assert run("frobnicate")[0] == 64
    assert run()[0] == 64
    assert run("cohomology", "--q", "2", "--r", "3..1", "riemann3.json")[0] == 64
    assert run("gevrey", "--demo", "profile", "--rho", "abc")[0] == 64


def test_missing_file(tmp_path):
    code, _, err = run("validate", str(tmp_path / "nope.json"))
    assert code == 66 and "nope.json" in err


def test_jacobi_violation_exit_2(tmp_path):
    # [X0, X1] = Y and [Y, X2] = Z leave a nonzero cyclic sum on X0, X1, X2
    doc = {"name": "bad", "degrees": {"-3": 1, "-2": 1, "-1": 3},
           "brackets": [{"left": [-1, 0], "right": [-1, 1], "out": [{"index": 0, "num": 1, "den": 1}]},
                        {"left": [-2, 0], "right": [-1, 2], "out": [{"index": 0, "num": 1, "den": 1}]}]}
    code, rep, _ = run_json("validate", write(tmp_path, "jac.json", doc))
    assert code == 2
    assert not rep["results"]["jacobi"] and rep["results"]["jacobi_witness"]["triple"]


def test_non_admissible_model_exit_2(tmp_path):
    shutil.copy(DATA.joinpath("sl3_contact.json"), tmp_path / "sl3_contact.json")
    doc = {"name": "m", "base": "sl3_contact.json", "truncation": 2,
           "gamma": [{"left": [0, 0], "right": [2, 0],
                      "out": [{"degree": 0, "index": 0, "num": 1, "den": 1}]}]}
    code, rep, _ = run_json("model-check", write(tmp_path, "m.json", doc))
    assert code == 2
    assert rep["results"]["violations"][0]["constraint"] == "III(c<max-1)"
    code, rep, _ = run_json("validate", str(tmp_path / "m.json"))
    assert code == 2 and not rep["results"]["admissible"]


def test_model_with_bianchi_failure_exit_2(tmp_path):
    doc = {"name": "m", "base": "sl3_contact.json", "truncation": 2,
           "gamma": [{"left": [-2, 0], "right": [-1, 0],
                      "out": [{"degree": 0, "index": 0, "num": 1, "den": 1}]}]}
    code, rep, _ = run_json("model-check", "--identities", write(tmp_path, "m.json", doc))
    assert code == 2
    assert not rep["results"]["identities"]["all_zero"]
    assert rep["results"]["identities"]["witness"]["arguments"]


# ---------------------------------------------------------------------------
# complements round trip

def test_complements_emit_and_check(tmp_path):
    emitted = tmp_path / "w.json"
    code, rep, _ = run_json("complements", "--cap", "2", "--emit", str(emitted), "riemann3.json")
    assert code == 0 and rep["results"]["ok"]
    code, rep2, _ = run_json("complements", "--cap", "2", "--check", str(emitted), "riemann3.json")
    assert code == 0 and rep2["results"]["ok"]
    assert rep2["results"]["W2_dims"] == rep["results"]["W2_dims"]
    doc = json.loads(emitted.read_text())
    key = next(k for k, v in doc["W2"].items() if v)
    doc["W2"][key] = doc["W2"][key][:-1]
    code, rep3, _ = run_json("complements", "--cap", "2", "--check",
                             write(tmp_path, "bad.json", doc), "riemann3.json")
    assert code == 2 and not rep3["results"]["ok"] and rep3["results"]["failures"]


# ---------------------------------------------------------------------------
# formats and determinism

@pytest.mark.parametrize("argv", [
    ("prolong", "--cap", "4", "g235.json"),
    ("invariants", "--cap", "3", "riemann3.json"),
    ("gevrey", "--demo", "profile", "--rho", "3/2"),
    ("model-check", "sphere3_model.json"),
])
def test_text_and_json_agree(argv):
    c1, text, _ = run(*argv)
    c2, js, _ = run(*argv, "--format", "json")
    assert c1 == c2 == 0
    assert parse_text(text) == flatten(json.loads(js))


def test_byte_identical_reruns():
    argv = ("invariants", "--cap", "4", "--format", "json", "riemann3.json")
    assert run(*argv)[1] == run(*argv)[1]
    argv = ("gevrey", "--demo", "lemma-a", "--seed", "7", "--samples", "20")
    assert run(*argv)[1] == run(*argv)[1]


def test_gevrey_demos():
    code, rep, _ = run_json("gevrey", "--demo", "lemma-a", "--seed", "1", "--samples", "30")
    assert code == 0 and rep["results"]["ok"] and rep["results"]["samples"] == 30
    code, rep, _ = run_json("gevrey", "--demo", "expansion", "--order", "3", "--samples", "4")
    assert code == 0 and rep["results"]["all_zero"] and rep["results"]["path_bound_holds"]
    assert rep["results"]["path_counts"]["3,2"] == 2
    code, rep, _ = run_json("gevrey", "--demo", "profile", "--rho", "2", "--order", "4")
    assert code == 0
    assert rep["results"]["profiles"]["coordinate"] == [R(1), R(1, 2), R(1, 4), R(1, 8), R(1, 16)]


def test_threads_env(monkeypatch, capsys):
    monkeypatch.setenv("GSTRUCT_THREADS", "zero")
    code, _, _ = run("prolong", "--cap", "2", "riemann3.json")
    assert code == 0 and "GSTRUCT_THREADS" in capsys.readouterr().err
