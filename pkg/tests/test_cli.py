import argparse
import csv
import io
import json

import pytest

from gbell.behavior import dump_behavior
from gbell.cli import CliConfig, resolve_config, run
from gbell.errors import FormatError
from gbell.verify import pm_behavior


def _run(*argv):
    out = io.StringIO()
    code = run(list(argv), out)
    return code, out.getvalue()


def _ns(**kw):
    base = dict(config=None, budget=None, tolerance=None, threads=None, format=None, long=None, seed=None)
    base.update(kw)
    return argparse.Namespace(**base)


def test_defaults():
    assert resolve_config(_ns(), environ={}) == CliConfig()


def test_precedence(tmp_path):
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"seed": 1, "budget": 10, "threads": 3}))
    env = {"GBELL_CONFIG": str(cfg), "GBELL_SEED": "2"}
    c = resolve_config(_ns(budget=99), environ=env)
    assert (c.seed, c.budget, c.threads) == (2, 99, 3)


def test_bad_config(tmp_path):
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"colour": "red"}))
    with pytest.raises(FormatError):
        resolve_config(_ns(config=str(cfg)), environ={})
    with pytest.raises(ValueError):
        resolve_config(_ns(tolerance=1.0), environ={})


def test_exit_codes(tmp_path):
    assert _run("verify", "result1", "--n", "3")[0] == 0
    assert _run("fractions", "--behavior", str(tmp_path / "missing.json"))[0] == 2
    assert _run("nonsense")[0] == 2
    assert _run("verify", "result1", "--n", "3", "--tolerance", "1")[0] == 2


def test_fractions_formats(tmp_path):
    dump_behavior(pm_behavior(), tmp_path / "pm.json")
    code, text = _run("fractions", "--behavior", str(tmp_path / "pm.json"), "--format", "structured")
    assert code == 0
    d = json.loads(text)
    assert (d["NLF"], d["CF"], d["NClF"]) == ("1", "1", "1")
    code, text = _run("fractions", "--behavior", str(tmp_path / "pm.json"), "--format", "csv")
    rows = list(csv.reader(io.StringIO(text)))
    assert rows[0] == ["key", "value"]


def test_ineq_subcommands(tmp_path):
    code, text = _run("ineq", "maximize", "kcbs")
    assert code == 0 and "5" in text
    code, _ = _run("ineq", "show", "nc", "--n", "5", "--gamma", "1,1,1,1,-1", "--out", str(tmp_path / "k.json"))
    assert code == 0 and (tmp_path / "k.json").exists()
    assert _run("ineq", "show", "chsh", "--i", "0", "--j", "1")[0] == 2


def test_scenario_and_porta(tmp_path):
    code, _ = _run("vertices", "--bob", "3", "--export-porta", str(tmp_path / "c3"))
    assert code == 0
    assert (tmp_path / "c3.poi").exists() and (tmp_path / "c3.ieq").exists()
    code, _ = _run("scenario", "--bob", "pm", "--alice", "2", "--out", str(tmp_path / "s.json"))
    assert code == 0


def test_quantum_and_determinism(tmp_path):
    code, a = _run("quantum", "appendix-c", "--format", "structured")
    assert code == 0
    assert _run("quantum", "appendix-c", "--format", "structured")[1] == a
    code, text = _run("quantum", "sweep", "--points", "3", "--format", "csv")
    assert code == 0 and text.startswith("visibility,")


def test_sampled_verify_is_deterministic():
    a = _run("verify", "quantifier-tradeoff", "--n", "3", "--samples", "15", "--seed", "4", "--format", "structured")
    b = _run("verify", "quantifier-tradeoff", "--n", "3", "--samples", "15", "--seed", "4", "--format", "structured")
    assert a[0] == 0 and a == b
