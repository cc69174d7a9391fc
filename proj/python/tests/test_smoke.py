import json
import math

import numpy as np
import pytest

import opspace


def test_examples():
    assert opspace.example("full:2").dim == 4
    c = opspace.example("corner:1")
    assert c.dim == 2 and not c.contains_identity()
    with pytest.raises(opspace.OpspaceError):
        opspace.example("full:0")


def test_norm_and_regnorm_on_full_algebra():
    v = opspace.example("full:2")
    rng = np.random.default_rng(3)
    x = rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4))
    n = opspace.norm(v, x)
    assert n == pytest.approx(np.linalg.norm(x, 2), rel=1e-12)
    r = opspace.regnorm(v, x)
    assert not r["infinite"]
    assert r["value"] == pytest.approx(n, abs=1e-5)


def test_corner_regnorm_is_infinite():
    c = opspace.example("corner:1")
    r = opspace.regnorm(c, np.array([[0, 1], [2j, 0]]))
    assert r["infinite"] and math.isinf(r["value"])


def test_element_outside_space_rejected():
    with pytest.raises(opspace.OpspaceError):
        opspace.norm(opspace.example("diag:2"), np.array([[1, 1], [0, 1]]))


def test_nu_brackets_norm():
    v = opspace.example("full:2")
    h = np.array([[1.0, 0.5 - 0.2j], [0.5 + 0.2j, -2.0]])
    r = opspace.nu(v, h)
    n = np.linalg.norm(h, 2)
    assert r["lower"] <= n * (1 + 1e-7)
    assert abs(r["upper"] - n) <= 2e-3 * n


def test_transpose_functional():
    v = opspace.example("full:2")
    e = lambda i, j: np.eye(2)[:, [i]] @ np.eye(2)[[j], :]
    tr = [[e(j, i) for j in range(2)] for i in range(2)]
    assert opspace.dualnorm(v, tr)["value"] == pytest.approx(2.0, rel=1e-7)
    assert opspace.cp_check(v, tr)["verdict"] == "certified_no"
    assert not opspace.extend(v, tr)["feasible"]
    ident = opspace.kraus_functional(v, [np.eye(2)])
    assert opspace.cp_check(v, ident)["verdict"] == "certified_yes"


def test_regularity_seeded():
    d = opspace.example("diag:2")
    a = opspace.regularity(d, samples=5, seed=7)
    b = opspace.regularity(d, samples=5, seed=7)
    assert a == b
    assert a["empirical_K"] == pytest.approx(1.0, abs=1e-4)


def test_cli_entry():
    code, out, err = opspace.run(["norm", "--space", "full:2", "--input", '{"re": [[3, 0], [0, 1]]}'])
    assert code == 0 and err == ""
    report = json.loads(out)
    assert report["value"] == pytest.approx(3.0)
    code, _, err = opspace.run(["nu", "--grid", "4"])
    assert code == 1 and "--grid" in json.loads(err)["error"]["message"]
