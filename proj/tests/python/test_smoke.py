import math

import pytest

import bsqspec as b

ZERO = b.TrigSeries([0.0])


def centre(n):
    c = 2 * math.pi * abs(n) / math.sqrt(3)
    return math.copysign(c ** 3, n)


def test_trig_series():
    f = b.TrigSeries([0.5], [0.0, 0.25])
    assert f.cos == [0.5, 0.0] and f.sin == [0.0, 0.25]
    assert f(0.0) == pytest.approx(0.5)
    assert f.derivative()(0.0) == pytest.approx(0.25 * 4 * math.pi)


def test_monodromy_is_unimodular():
    p, q = b.TrigSeries([0.003], [0.001]), b.TrigSeries([0.01], [-0.005])
    M, det = b.monodromy(p, q, 40 + 10j)
    assert M.shape == (3, 3)
    assert abs(det - 1) < 1e-9
    assert b.ball_norm(p, q) < 0.05


def test_free_spectrum():
    bp = b.branch_points(ZERO, ZERO, -2)
    assert bp["r_minus"] == pytest.approx(centre(-2), rel=1e-10)
    mu, _ = b.three_point_eigenvalue(ZERO, ZERO, 1)
    assert mu == pytest.approx(centre(1), rel=1e-10)
    h = b.hill_spectra(ZERO, ZERO, 1)
    # closed gap: a double root, located to about sqrt(machine eps)
    assert h["closed"]
    assert h["E_plus"] == pytest.approx(math.pi ** 2, rel=1e-8)


def test_forward_and_inverse():
    p, q = b.TrigSeries([0.002]), b.TrigSeries([0.0], [0.01])
    data = b.forward_map(p, q, 1)
    assert [d["n"] for d in data["data"]] == [1, -1]
    p2, q2, history = b.invert_map(data)
    assert p2.cos[0] == pytest.approx(0.002, abs=1e-6)
    assert q2.sin[0] == pytest.approx(0.01, abs=1e-6)
    assert history[-1] <= 1e-8


def test_errors_are_typed():
    with pytest.raises(b.InputError):
        b.invert_map('{"n_max": 0, "data": []}')
    with pytest.raises(b.BsqError):
        b.evolve(b.TrigSeries([0.1] * 20), ZERO, 8, 1e-3, 0.01)


def test_flow_and_verify():
    p, q = b.evolve(b.TrigSeries([0.05]), b.TrigSeries([0.0], [0.05]), 16, 1e-3, 0.01)
    assert p.order == 16
    report = b.verify(ZERO, ZERO)
    assert report["all_passed"]
