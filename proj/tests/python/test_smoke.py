import os

import numpy as np
import pytest

import opmap

DATA = os.path.join(os.path.dirname(__file__), "..", "data")


def test_transpose_evaluates():
    t = opmap.load_map({"kind": "transpose", "params": {"dim": 2}})
    assert t.arity == 1
    assert t.domains == [[2]]
    a = np.array([[1, 2j], [3, 4]], dtype=complex)
    np.testing.assert_allclose(t(a), a.T)


def test_kraus_is_positive():
    k = opmap.load_map(os.path.join(DATA, "kraus.json"))
    r = opmap.test_positive(k, "type1(2)", trials=200)
    assert r["verdict"] == "exhausted_trials"
    assert r["trials"] == 200
    # type2(n) with n at least the domain side is decided exactly.
    assert opmap.test_positive(k, "type2(2)")["verdict"] == "certified_positive"
    assert opmap.test_positive(k, "choi_exact")["verdict"] == "certified_positive"


def test_transpose_is_not_cp():
    t = opmap.load_map({"kind": "transpose", "params": {"dim": 2}})
    r = opmap.test_positive(t, "choi_exact")
    assert r["verdict"] == "violated"
    assert r["min_eig"] == pytest.approx(-1.0)


def test_same_seed_same_report():
    k = opmap.load_map(os.path.join(DATA, "kraus.json"))
    a = opmap.test_positive(k, "type1(2)", trials=100, seed=5)
    b = opmap.test_positive(k, "type1(2)", trials=100, seed=5, threads=4)
    assert a == b


def test_decompose():
    m = opmap.load_map(os.path.join(DATA, "tracial_linear.json"))
    d = opmap.decompose(m)
    assert d["certified"]
    assert d["residual"] <= 1e-9


def test_gallery():
    ids = [c["id"] for c in opmap.gallery_list()]
    assert "theta_transpose_tensor" in ids
    r = opmap.gallery_run("theta_transpose_tensor")
    assert r["observed"] == "violated"
    with pytest.raises(opmap.InputError):
        opmap.gallery_run("nosuch")


def test_bad_input_raises():
    with pytest.raises(opmap.InputError):
        opmap.load_map({"kind": "transpose", "params": {}})
    t = opmap.load_map({"kind": "transpose", "params": {"dim": 2}})
    with pytest.raises(opmap.InputError):
        opmap.test_positive(t, "type9")
    with pytest.raises(ValueError):
        t(np.eye(3))


def test_cli_in_process():
    code, out, _ = opmap.run_cli("check", os.path.join(DATA, "kraus.json"), "--n", "2", "--trials", "50")
    assert code == 0
    assert '"verdict"' in out
    assert opmap.run_cli("gallery", "run", "nosuch")[0] == 2
