import numpy as np
import pytest

import binrec


def indicator(n, support):
    x = np.zeros(n)
    x[list(support)] = 1.0
    return x


def test_box_bp_recovers_sparse_signal():
    A = binrec.gen_matrix("gaussian", 30, 40, seed=3)
    support = binrec.gen_support(40, 3, seed=5)
    x0 = indicator(40, support)
    out = binrec.solve("box_bp", A, A @ x0)
    assert out["status"] == "optimal"
    assert np.linalg.norm(out["x"] - x0) < 1e-8
    assert binrec.recovers_uniquely(A, support)


def test_box_ls_and_mibi_agree_when_unique():
    A = binrec.gen_matrix("biased", 60, 80, seed=1, mu=1.0, sigma=1.0)
    support = binrec.gen_support(80, 70, seed=2)
    x0 = indicator(80, support)
    assert binrec.check("kernel-hk", A, support)["verdict"] == "holds"
    for program in ("box_ls", "mibi_bp", "box_bp"):
        assert np.linalg.norm(binrec.solve(program, A, A @ x0)["x"] - x0) < 1e-6


def test_kernel_check_witness():
    A = np.array([[1.0, 1.0]])
    r = binrec.check("kernel-hk", A, [0])
    assert r["verdict"] == "fails"
    w = r["witness"]
    assert abs(A @ w).max() < 1e-12
    assert w[0] <= 0 <= w[1]
    assert binrec.check("hkplus", np.array([[1.0, -1.0]]), [0])["verdict"] == "holds"


def test_certificate_roundtrip():
    A = binrec.gen_matrix("biased", 20, 10, seed=4, mu=0.5, sigma=0.5)
    nu = binrec.dual_certificate(A - 0.5, 0.5, 0.5, [1, 3])
    assert nu.shape == (20,)
    assert abs((nu + 0.125).sum()) < 1e-9
    holds, margin, margins = binrec.verify_certificate(A, -nu, [1, 3], 0.0)
    assert margins.shape == (10,)
    assert holds == (margin > 0)


def test_theory_values():
    assert binrec.delta_bin(500, 500) == pytest.approx(250.0, abs=1e-6)
    assert binrec.face_survival_prob(1, 5) == 2.0 ** -4
    assert binrec.mibi_sample_bound(0, 100, 0.5) > 0


def test_phase_transition_shape_and_determinism():
    kw = dict(N=12, k_fractions=[0.25, 0.5], m_fractions=[0.5, 1.0], trials=3, programs=["box_bp", "box_ls"], seed=9)
    a = binrec.phase_transition(**kw, threads=1)
    b = binrec.phase_transition(**kw, threads=2)
    assert set(a) == {"box_bp", "box_ls"}
    assert a["box_bp"].shape == (2, 2)
    assert np.array_equal(a["box_bp"], b["box_bp"])
    assert (a["box_bp"][:, 1] == 1.0).all()


def test_errors_map_to_python_exceptions():
    with pytest.raises(ValueError):
        binrec.gen_matrix("nope", 2, 2)
    with pytest.raises(ValueError):
        binrec.gen_support(3, 5)
    with pytest.raises(ValueError):
        binrec.solve("box_bp", np.eye(2), np.ones(3))
