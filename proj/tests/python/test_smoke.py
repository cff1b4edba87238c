import math

import numpy as np
import pytest

import splitadj


def test_names():
    assert "esdirk4" in splitadj.scheme_names()
    assert len(splitadj.scheme_names()) == 10
    assert {"mito", "fhn", "stiff38"} <= set(splitadj.model_names())


def test_tableau_and_order_conditions():
    t = splitadj.tableau("crank-nicolson")
    assert t["stages"] == 2
    assert t["b"] == [0.5, 0.5]
    ok, *_ = splitadj.order_conditions("esdirk4", 4)
    assert ok
    with pytest.raises(ValueError):
        splitadj.tableau("nope")


def test_phi():
    assert splitadj.phi(0.0) == 1.0
    assert splitadj.phi_prime(0.0) == pytest.approx(0.5)
    assert splitadj.phi(1e-3) == pytest.approx(math.expm1(1e-3) / 1e-3, rel=1e-15)


def test_parse_and_rhs():
    sys = splitadj.parse_system("name decay\nstate y = 1\nparam k = 2\ndy/dt = -k*y\n")
    assert sys.name == "decay"
    f = splitadj.rhs(sys, np.array([3.0]))
    assert f[0] == -6.0


def test_stepper_exponential_is_exact_on_linear_problem():
    sys = splitadj.parse_system("name decay\nstate y = 1\nparam k = 2\ndy/dt = -k*y\n")
    s = splitadj.Stepper(sys, "grl1")
    y = s.step(np.array([1.0]), 0.0, 0.5)
    assert y[0] == pytest.approx(math.exp(-1.0), rel=1e-15)


def test_adjoint_matches_tangent():
    sys = splitadj.model("fhn")
    s = splitadj.Stepper(sys, "esdirk3")
    rng = np.random.default_rng(1)
    y0 = np.array([30.0, 1.0])
    ydot = rng.standard_normal(2)
    ybar = rng.standard_normal(2)
    out = s.tangent(y0, ydot, 0.0, 0.1)
    back, pbar = s.adjoint(y0, ybar, 0.0, 0.1)
    assert float(out @ ybar) == pytest.approx(float(back @ ydot), rel=1e-12)
    assert len(pbar) == len(sys.param_names)


def test_mito_ramps():
    assert splitadj.mito_f(10.0) == 0.0
    assert splitadj.mito_g(500.0) == 0.1


def test_small_mito_run():
    r = splitadj.run_mito({"nx": 4, "T": 1.0, "timing": False}, taylor=False)
    assert r["functional"] > 0.0
    assert r["gradient_initial"].shape == (4, 25)
    assert r["forward_csv"].startswith("time,u_integral")


def test_converge_ode_csv():
    csv = splitadj.converge_ode({"scheme": "rk4", "rungs": 3})
    lines = csv.strip().splitlines()
    assert lines[0] == "scheme,dt,error,order"
    assert float(lines[-1].split(",")[-1]) == pytest.approx(4.0, abs=0.2)


def test_bad_override_raises():
    with pytest.raises(ValueError):
        splitadj.run_mito({"colour": "blue"})
