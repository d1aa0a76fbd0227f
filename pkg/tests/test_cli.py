import io
import json
import subprocess
import sys

import pytest

from mumford.cli import CONFIG_SCHEMA, main, parse_config
from mumford.errors import EvenPrime, SchemaError, SingularGenerator

TATE = {"prime": 5, "precision": 24, "generators": [[["5", "0"], ["0", "1"]]]}
G2 = {
    "prime": 5,
    "precision": 24,
    "generators": [[["25", "0"], ["0", "1"]], [["13", "-12"], ["-12", "13"]]],
}


@pytest.fixture
def write_config(tmp_path):
    def write(doc, name="group.json"):
        path = tmp_path / name
        path.write_text(json.dumps(doc), encoding="utf-8")
        return str(path)

    return write


def run(*argv):
    buf = io.StringIO()
    code = main(list(argv), buf)
    return code, json.loads(buf.getvalue())


def test_schema_is_strict():
    assert CONFIG_SCHEMA["additionalProperties"] is False
    cfg = parse_config(json.dumps({**TATE, "depth": 4, "trunc": 10}))
    assert (cfg.prime, cfg.precision, cfg.depth, cfg.trunc) == (5, 24, 4, 10)


@pytest.mark.parametrize(
    "doc, path",
    [
        ({**TATE, "extra": 1}, "$"),
        ({**TATE, "precision": 4}, "$.precision"),
        ({**TATE, "generators": [[["5", "x"], ["0", "1"]]]}, "$.generators[0][0][1]"),
        ({**TATE, "generators": [[["5", "0"]]]}, "$.generators[0]"),
        ({"prime": 5, "precision": 24}, "$"),
        ({**TATE, "prime": 9}, "$.prime"),
    ],
)
def test_schema_errors(doc, path):
    with pytest.raises(SchemaError) as info:
        parse_config(json.dumps(doc))
    assert info.value.path == path


def test_even_prime_and_singular_generator():
    with pytest.raises(EvenPrime):
        parse_config(json.dumps({**TATE, "prime": 2}))
    with pytest.raises(SingularGenerator):
        parse_config(json.dumps({**TATE, "generators": [[["1", "2"], ["2", "4"]]]}))
    with pytest.raises(SchemaError):
        parse_config("{not json")


def test_info(write_config):
    code, doc = run("info", write_config(G2))
    assert code == 0
    assert doc["genus"] == 2
    assert doc["generators"][0]["translation_length"] == 2
    assert len(doc["certificate"]) == 4


def test_graph_and_dot(write_config, tmp_path):
    dot = tmp_path / "q.dot"
    code, doc = run("graph", write_config({**TATE, "generators": [[["25", "0"], ["0", "1"]]]}), "--dot", str(dot))
    assert code == 0
    assert doc["edges"] == [[0, 0, 2]] and doc["betti"] == 1
    assert dot.read_text().startswith("graph quotient {")


@pytest.mark.parametrize("q, v", [("5", 1), ("25", 2)])
def test_periods_tate(write_config, q, v):
    code, doc = run("periods", write_config({**TATE, "generators": [[[q, "0"], ["0", "1"]]]}))
    assert code == 0
    assert doc["gram"] == [[v]]
    assert doc["Q"][0][0]["v"] == v and doc["Q"][0][0]["unit"] == "1"
    assert doc["digits"] >= 20


def test_periods_genus_two(write_config):
    path = write_config(G2)
    code, doc = run("periods", path, "--digits", "12")
    assert code == 0
    assert doc["gram"] == [[2, 0], [0, 2]]
    # full working precision is out of reach at the default cap
    code, doc = run("periods", path, "--trunc", "6")
    assert code == 1 and doc["error"]["kind"] == "NotConverged"


def test_aj(write_config):
    code, doc = run("aj", write_config(TATE), "--point", "125", "--base", "1")
    assert code == 0
    assert doc["point"][0]["v"] == -3
    assert doc["n"] == [-3]
    assert doc["reduced"][0]["v"] == 0


def test_theta(write_config):
    code, doc = run("theta", write_config(TATE), "--divisor", "1,5", "--at", "3,2/7")
    assert code == 0
    assert doc["value"]["v"] == 0 and doc["digits"] >= 20


def test_integrate(write_config):
    code, doc = run("integrate", write_config(TATE), "--divisor", "25:1,1:-1", "--measure", "gamma_1")
    assert code == 0
    assert doc["valuation"] == -2 == doc["value"]["v"]
    assert doc["digits"] >= 10
    code, doc = run("integrate", write_config(TATE), "--divisor", "3:1,2:-1", "--measure", "g2")
    assert code == 1 and doc["error"]["kind"] == "UsageError"
    code, doc = run("integrate", write_config(TATE), "--divisor", "3:1,2:-2", "--measure", "g1")
    assert code == 1 and doc["error"]["kind"] == "NotDegreeZero"


def test_selfcheck(write_config):
    code, doc = run("selfcheck", write_config(G2), "--digits", "8")
    assert code == 0 and doc["ok"]
    names = [c["name"] for c in doc["checks"]]
    assert names == ["ping_pong", "quotient_graph", "harmonic_measures", "riemann_vs_theta", "period_matrix", "aj_well_defined"]


def test_exit_codes(write_config):
    code, doc = run("info", write_config({**TATE, "generators": [[["0", "1"], ["1", "0"]]]}))
    assert code == 2 and doc["error"]["kind"] == "NotHyperbolic"
    code, doc = run("info", write_config({**TATE, "prime": 2}))
    assert code == 1 and doc["error"]["kind"] == "EvenPrime"
    code, doc = run("info", "/nonexistent/group.json")
    assert code == 1 and doc["error"]["kind"] == "IOError"
    code, doc = run("bogus")
    assert code == 1 and doc["error"]["kind"] == "UsageError"
    code, doc = run("periods", write_config(TATE), "--precision", "4")
    assert code == 1


def test_module_entry_point(write_config):
    proc = subprocess.run(
        [sys.executable, "-m", "mumford", "periods", write_config(TATE)], capture_output=True, text=True, check=False
    )
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["gram"] == [[1]]
