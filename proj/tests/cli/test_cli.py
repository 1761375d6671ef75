import json
from fractions import Fraction
import os
import pathlib
import subprocess

import jsonschema
import pytest

ROOT = pathlib.Path(__file__).resolve().parents[2]
CLI = os.environ.get("KITAOKA_CLI", str(ROOT / "build" / "kitaoka"))


def schema(name):
    return json.loads((ROOT / "schemas" / f"{name}.json").read_text())


def run(*args, rc=0):
    p = subprocess.run([CLI, *args], capture_output=True, text=True, timeout=300)
    assert p.returncode == rc, p.stderr
    return p


def report(name, *args, rc=0):
    p = run(name, *args, rc=rc)
    doc = json.loads(p.stdout)
    jsonschema.validate(doc, schema(name))
    return doc["outcome"]


def lines(name, *args):
    p = run(name, *args)
    docs = [json.loads(l) for l in p.stdout.splitlines() if l.strip()]
    s = schema(name)
    for d in docs:
        jsonschema.validate(d, s)
    return docs


def test_bounds_table():
    out = report("bounds", "--m", "1", "--rank", "3")
    assert out["bound_exact"] == "625"


def test_bounds_explicit():
    out = report("bounds", "--m", "3", "--rank", "3")
    assert out["mode"] == "explicit"
    assert Fraction(out["bound_exact"]["lower"]) <= Fraction(out["bound"]) <= Fraction(out["bound_exact"]["upper"])


def test_nonresidue():
    assert report("nonresidue", "--p", "23")["gamma"] == 5
    out = report("nonresidue", "--limit", "1000")
    assert out["trevino_all"]


def test_nonexist_d29():
    out = report("nonexist", "--D", "29")
    assert out["status"] == "Infeasible"
    assert "7,1,2" in out["S"]


def test_nonexist_witness_file(tmp_path):
    f = tmp_path / "s.txt"
    f.write_text("# positive control\n1,0,1\n2,0,1\n")
    out = report("nonexist", "--D", "7", "--elements", str(f))
    assert out["status"] == "Feasible"
    assert len(out["witness"]) == 2


def test_budget_inconclusive():
    out = report("nonexist", "--D", "29", "--budget", "10", rc=2)
    assert out["status"] == "Inconclusive"


def test_classify():
    docs = lines("classify", "--D", "5", "--trace-bound", "6", "--max-elements", "3")
    assert docs[-1]["record"] == "report"
    assert all(d["record"] == "lattice" for d in docs[:-1])


def test_verify():
    out = report("verify", "--squares-over", "2", "--trace-bound", "8")
    assert not out["universal_on_box"]
    assert "2,1,1" in out["failures"]


def test_represent_and_catalog():
    cat = report("catalog", "--D", "41")
    names = [e["name"] for e in cat["entries"]]
    assert "phi_41" in names
    out = report("represent", "--lattice", names[0], "--target", "1,0,1")
    assert out["represented"]


def test_sweep():
    docs = lines("sweep", "--from", "2", "--to", "40")
    assert docs[-1]["record"] == "report"
    assert {d["D"] for d in docs[:-1] if d["status"] == "Feasible"} <= {14, 19, 30}


@pytest.mark.parametrize("args,code", [
    (["nonexist", "--D", "12"], "NotSquarefree"),
    (["nonexist", "--D", "13"], "AdmissibleD"),
    (["catalog", "--name", "nope"], "UnknownName"),
])
def test_errors(args, code):
    p = run(*args, rc=3)
    err = json.loads(p.stderr)
    jsonschema.validate(err, schema("error"))
    assert err["error"] == code


def test_usage_error():
    run("bounds", "--bogus", rc=3)


def test_jobs_identical():
    def strip(args):
        d = json.loads(run(*args).stdout)
        d.pop("wall_time_ms")
        return d
    base = ["nonexist", "--D", "29"]
    assert strip(["--jobs", "1", *base]) == strip(["--jobs", "8", *base])
