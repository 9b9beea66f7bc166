import json
import subprocess
import sys

import pytest

from coadjoint.cli import run
from coadjoint.polyalg import DEFAULT_SEED, RationalPoly


def invoke(tmp_path, *argv, name="out.json"):
    out = tmp_path / name
    status = run([*argv, "--output", str(out)])
    return status, json.loads(out.read_text())


def test_compute_a1(tmp_path):
    status, doc = invoke(tmp_path, "compute", "--group", "A1", "--xi", "1,-1", "--k-max", "6")
    assert status == 0
    assert doc["schema"] == "1"
    assert doc["config"]["seed"] == DEFAULT_SEED
    classes = doc["result"]["classes"]
    for k in (1, 3, 5):
        assert RationalPoly.from_json(classes[str(k)]).is_zero()
    p6 = RationalPoly.from_json(classes["6"])
    assert p6 == RationalPoly.monomial((6,), 2 * 2**6)


def test_fullness_grassmannian(tmp_path):
    status, doc = invoke(tmp_path, "fullness", "--group", "A3", "--xi", "1,1,-1,-1",
                         "--cutoff", "4")
    assert status == 0
    res = doc["result"]
    assert res["full_up_to_cutoff"] is False
    assert res["missing_degrees"] == [3]
    assert res["standard_generators"]["c3"]["in_subalgebra"] is False
    assert doc["config"]["cutoff"] == 4


def test_independence(tmp_path):
    status, doc = invoke(tmp_path, "independence", "--group", "A2", "--xi", "2,1,-3",
                         "--k-max", "3")
    assert status == 0
    assert doc["result"]["rank"] == 2
    assert doc["result"]["certified_full"] is True


def test_oracle_su2(tmp_path):
    status, doc = invoke(tmp_path, "oracle", "--group", "SU2", "--xi", "1,-1", "--X", "1,-1",
                         "--k-values", "2,4,6", "--samples", "20000")
    assert status == 0
    assert doc["result"]["verdict"] == "PASS"
    assert doc["config"]["samples"] == 20000


def test_molien(tmp_path):
    status, doc = invoke(tmp_path, "molien", "--group", "D4", "--cutoff", "4")
    assert status == 0
    assert doc["result"]["invariant_dims"] == [1, 0, 1, 0, 3]


def test_product(tmp_path):
    status, doc = invoke(tmp_path, "product", "--group", "A1xA1", "--xi", "1,-1,1,-1",
                         "--cutoff", "4")
    assert status == 0
    assert doc["result"]["paths_agree"] is True
    assert doc["result"]["direct_algebra_dims"] == [1, 0, 2, 0, 3]


def test_semicontinuity(tmp_path):
    status, doc = invoke(tmp_path, "semicontinuity", "--group", "A2", "--xi", "2,-1,-1",
                         "--eta", "2,0,-2", "--cutoff", "4")
    assert status == 0
    assert doc["result"]["contained"] is True


@pytest.mark.parametrize("argv", [
    ["compute", "--group", "E8", "--xi", "1"],
    ["compute", "--group", "A2", "--xi", "0,1,-1"],
    ["compute", "--group", "A2"],
    ["compute", "--group", "A2", "--xi", "1,x,-1"],
    ["oracle", "--group", "SU2", "--xi", "1,-1", "--X", "1,-1", "--k-values", "1,3",
     "--samples", "100"],
])
def test_error_exit_one(tmp_path, argv):
    status, doc = invoke(tmp_path, *argv)
    assert status == 1
    assert "error" in doc and "result" not in doc


def test_integrity_exit_two(tmp_path, monkeypatch):
    from coadjoint import cli
    from coadjoint.errors import IntegrityError

    def broken(cfg):
        raise IntegrityError("remainder after exact division")

    monkeypatch.setitem(cli.HANDLERS, "molien", broken)
    status, doc = invoke(tmp_path, "molien", "--group", "A2")
    assert status == 2
    assert doc["error"]["type"] == "IntegrityError"


def test_config_file(tmp_path):
    cfg = tmp_path / "job.json"
    cfg.write_text(json.dumps({"group": "A2", "xi": "2,-1,-1", "cutoff": 3}))
    status, doc = invoke(tmp_path, "fullness", "--config", str(cfg))
    assert status == 0
    assert doc["config"]["cutoff"] == 3
    status, doc = invoke(tmp_path, "fullness", "--config", str(cfg), "--cutoff", "5")
    assert status == 1
    assert "cutoff" in doc["error"]["message"]
    cfg.write_text(json.dumps({"group": "A2", "bogus": 1}))
    status, _ = invoke(tmp_path, "fullness", "--config", str(cfg))
    assert status == 1


def test_reproducible_output(tmp_path):
    argv = ["fullness", "--group", "A2", "--xi", "2,1,-3", "--cutoff", "4", "--threads", "1"]
    _, a = invoke(tmp_path, *argv, name="a.json")
    _, b = invoke(tmp_path, *argv, name="b.json")
    a.pop("generated_at")
    b.pop("generated_at")
    assert json.dumps(a, sort_keys=True) == json.dumps(b, sort_keys=True)


def test_polynomials_reparse(tmp_path):
    _, doc = invoke(tmp_path, "fullness", "--group", "A2", "--xi", "2,1,-3", "--cutoff", "4")
    for polys in doc["result"]["basis"].values():
        for data in polys:
            p = RationalPoly.from_json(data)
            assert RationalPoly.from_json(p.to_json()) == p


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "coadjoint", "molien", "--group", "A1",
                           "--cutoff", "2"], capture_output=True, text=True, check=False)
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["result"]["invariant_dims"] == [1, 0, 1]
    assert "A1" in proc.stderr
