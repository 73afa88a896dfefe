import math

import numpy as np
import pytest

import qmcts

SMALL = dict(m=2, M=32, T=0.1, tau=0.01, N=16, R=4)


def test_normal_map():
    assert qmcts.Phi(0.0) == 0.5
    assert qmcts.inv_Phi(0.5) == 0.0
    assert abs(qmcts.Phi(qmcts.inv_Phi(0.123)) - 0.123) < 1e-15
    with pytest.raises(qmcts.QmctsError, match="domain"):
        qmcts.inv_Phi(1.5)


def test_grid_and_potential():
    x = qmcts.grid_nodes(8)
    assert x.shape == (8,)
    assert x[0] == -math.pi
    v = qmcts.cosine_potential(4.5, 2, 1.0, [1.0, 0.0], 8)
    assert np.allclose(v, 1.0 + np.cos(x), atol=1e-15)


def test_solve_conserves_mass():
    out = qmcts.solve([0.3, -0.7], **SMALL)
    h = 2 * math.pi / 32
    assert abs(h * out["S"].sum() - 2 / math.sqrt(math.pi)) < 1e-3
    assert np.allclose(out["S"], np.abs(np.asarray(out["psi"])) ** 2)


def test_weights_and_lattice():
    assert qmcts.lambda_star(1.0, 0.1) == 1.0
    assert abs(qmcts.theta_for(1.0, 1.0) - 1.112372) < 1e-6
    assert abs(qmcts.rho(0.353553, 1.0) - 20.68) < 0.01
    z, errs = qmcts.cbc(4.5, 3, 64)
    assert z[0] == 1 and all(math.gcd(v, 64) == 1 for v in z)
    assert len(errs) == 3
    pts = qmcts.lattice_points([1, 3], 4, [0.0, 0.0])
    assert pts.tolist() == [[0.25, 0.75], [0.5, 0.5], [0.75, 0.25], [0.0, 0.0]]
    shifts = qmcts.random_shifts(3, 2, 12345)
    assert np.array_equal(shifts, qmcts.random_shifts(3, 2, 12345))
    assert qmcts.mc_points(10, 2, 1).shape == (10, 2)


def test_estimate_is_deterministic():
    a = qmcts.estimate(functional="point", **SMALL)
    b = qmcts.estimate(functional="point", **SMALL)
    assert a["per_shift"].tolist() == b["per_shift"].tolist()
    assert a["fields"]["per_shift_S"].shape == (4, 32)
    assert a["std_error"] == pytest.approx(qmcts.standard_error(a["per_shift"]))
    assert a["observable"] == "S"


def test_reference_and_rules():
    nodes, weights = qmcts.gauss_hermite(20)
    assert abs(weights.sum() - 1) < 1e-14
    assert abs((weights * nodes**4).sum() - 3) < 1e-12
    ref = qmcts.reference(m=1, M=32, T=0.1, tau=0.01, ref_M=32, ref_tau=0.01, ref_nodes=8)
    assert ref["S"].shape == (32,)
    assert ref["nodes_used"] == 8
    with pytest.raises(qmcts.QmctsError, match="standard-error"):
        qmcts.reference(m=5)


def test_fit_and_errors():
    slope, _ = qmcts.fit_rate([2, 4, 8], [1, 0.5, 0.25])
    assert slope == pytest.approx(1.0)
    with pytest.raises(qmcts.QmctsError, match="config"):
        qmcts.estimate(tau=0.3)
    with pytest.raises(qmcts.QmctsError, match="config"):
        qmcts.estimate(wobble=1)
