import csv
import json
import os

import pytest

from bei import KERNEL_VERSION
from bei.cli import int_list, main
from bei.errors import BeiError
from bei.harness import (
    Options, ResultCache, chain_exprs, cmd_decompose, cmd_predict, cmd_suite, cmd_verify,
    composite_exprs, fan_exprs, open_cache, set_partitions,
)


def test_verify_fp2():
    rep = cmd_verify("Fp(2)", 3)
    assert rep["oracle"]["dim"] == 7 and rep["oracle"]["depth"] == 6 and rep["oracle"]["reg"] == 3
    assert set(rep["verdicts"].values()) == {"exact-match"} and not rep["violation"]
    assert rep["schema"] == 1 and rep["kernel"] == KERNEL_VERSION
    assert "predict" in rep["timings"]


def test_verify_k2():
    rep = cmd_verify("K(2)", 2)
    assert rep["oracle"]["reg"] == 1 and rep["verdicts"]["reg"] == "exact-match"


def test_verify_cap_degrades():
    rep = cmd_verify("star(Fp(3)@6,Fp(3)@1)", 2)
    assert rep["predicted"]["reg"]["value"] == 6
    assert rep["verdicts"]["reg"] == "oracle-unavailable"
    assert rep["verdicts"]["dim"] == "exact-match"
    assert "resolution cap" in rep["oracle"]["unavailable"]["reg"]
    assert not rep["violation"]


def test_formula_only():
    rep = cmd_verify("Fp(3)", 2, Options(formula_only=True))
    assert set(rep["verdicts"].values()) == {"oracle-unavailable"}


def test_predict_report():
    rep = cmd_predict("fan(3; W=[[1]]; a=[[2]])", 2)
    assert rep["predicted"]["reg"]["value"] == 2 and rep["predicted"]["cm"] is True


def test_decompose_examples():
    rep = cmd_decompose("path(3)", 2)
    assert [p["dim"] for p in rep["primes"]] == [4, 4]
    assert rep["identity"]["decomposition"] and all(rep["identity"]["vertex_split"].values())
    rep = cmd_decompose("K(3)", 2)
    assert len(rep["primes"]) == 1 and rep["identity"]["decomposition"]
    rep = cmd_decompose("fan(3; W=[[1]]; a=[[2]])", 2)
    assert sorted(p["dim"] for p in rep["primes"]) == [5, 5] and rep["dim"] == 5


def test_family_enumeration():
    assert len(list(set_partitions([1, 2, 3]))) == 5
    fans = fan_exprs()
    assert len(fans) == len(set(fans)) == 33
    assert len(fan_exprs(pure_only=True)) == 12
    assert composite_exprs() == composite_exprs()
    assert len(composite_exprs()) == 20
    assert len(chain_exprs()) >= 2


def test_suite_small():
    rep = cmd_suite("kn", [2, 3], n_max=3)
    assert rep["summary"]["violations"] == 0 and rep["summary"]["count"] == 4
    keys = [(r["canonical"], r["m"]) for r in rep["instances"]]
    assert keys == sorted(keys)
    with pytest.raises(BeiError):
        cmd_suite("nope", [2])


def test_cache_roundtrip_and_audit(tmp_path):
    opts = Options(cache_dir=str(tmp_path), audit_rate=1.0)
    cache = open_cache(opts)
    first = cmd_verify("path(3)", 2, opts, cache)
    assert cache.misses == 2 and cache.hits == 0
    again = cmd_verify("path(3)", 2, opts, cache)
    assert cache.hits == 2 and cache.audited == 2 and not cache.mismatches
    assert first["oracle"] == again["oracle"]


def test_cache_mismatch_detected(tmp_path):
    opts = Options(cache_dir=str(tmp_path), audit_rate=1.0)
    cache = open_cache(opts)
    cmd_verify("path(3)", 2, opts, cache)
    # corrupt every stored value
    for root, _, files in os.walk(tmp_path):
        for f in files:
            p = os.path.join(root, f)
            entry = json.load(open(p))
            if isinstance(entry["value"], int):
                entry["value"] += 1
            else:
                entry["value"]["betti"][0][2] += 1
            json.dump(entry, open(p, "w"))
    cache = open_cache(opts)
    rep = cmd_verify("path(3)", 2, opts, cache)
    assert len(cache.mismatches) == 2
    assert rep["oracle"]["dim"] == 4  # fresh value wins
    assert main(["oracle", "path(3)", "--cache", str(tmp_path), "--json", os.devnull]) in (0, 1)


def test_cache_ignores_other_kernels(tmp_path):
    c = ResultCache(str(tmp_path))
    k = c.key("V:1;E:", 2, 32003, "degrevlex", "dim")
    c.put(k, 5)
    assert c.get(k) == 5
    path = c._path(k)
    entry = json.load(open(path))
    entry["kernel"] = "old"
    json.dump(entry, open(path, "w"))
    assert c.get(k) is None


def test_int_list():
    assert int_list("2,3") == [2, 3] and int_list("2-4") == [2, 3, 4]
    assert int_list("2,4-5") == [2, 4, 5]


def test_cli_exit_codes(capsys):
    assert main(["verify", "Fp(2)", "--m", "3"]) == 0
    out = capsys.readouterr().out
    assert "exact-match" in out
    assert main(["predict", "circ(Fp(3)@6,"]) == 2
    assert "syntax-error" in capsys.readouterr().err
    assert main(["oracle", "path(12)", "--m", "2", "--gb-cap", "10", "--res-cap", "10"]) == 0


def test_cli_violation_exit(monkeypatch, capsys):
    import bei.harness as H
    real = H.oracle_invariants

    def lying(g, m, opts, cache=None):
        out, t = real(g, m, opts, cache)
        out["reg"] += 1
        return out, t

    monkeypatch.setattr(H, "oracle_invariants", lying)
    assert main(["verify", "K(2)"]) == 1
    assert "VIOLATION" in capsys.readouterr().out


def test_cli_json_and_csv(tmp_path, capsys):
    j, c = tmp_path / "r.json", tmp_path / "r.csv"
    assert main(["verify", "path(3)", "--m", "2,3", "--json", str(j), "--csv", str(c)]) == 0
    rep = json.load(open(j))
    assert rep["schema"] == 1 and len(rep["reports"]) == 2
    rows = list(csv.DictReader(open(c)))
    assert rows[0].keys() == {"expr", "m", "char", "invariant", "predicted_kind", "lo", "hi",
                              "oracle", "verdict", "rules"}
    assert len(rows) == 8 and {r["verdict"] for r in rows} == {"exact-match"}
    capsys.readouterr()
    assert main(["suite", "fp", "--m", "2", "--p-max", "2", "--json", "-"]) == 0
    rep = json.loads(capsys.readouterr().out)
    assert rep["summary"]["count"] == 2


def test_cli_decompose_text(capsys):
    assert main(["decompose", "path(3)"]) == 0
    out = capsys.readouterr().out
    assert "T=[2]" in out and '"decomposition": true' in out
