import numpy as np
import pytest

import ofd


def symmetric_x():
    return ofd.build_x(
        p_max=[1, 1], p_min=[-1, -1], s0=0.5, s_max=[1, 1], s_min=[0, 0], ramp_up=[1], ramp_dn=[-1]
    )


def test_market_vector_and_membership():
    x = symmetric_x()
    np.testing.assert_allclose(x, [1, 1, 1, 1, 0.5, 0.5, 0.5, 0.5, 1, 1])
    P = ofd.market_polytope(ofd.build_G(2), x)
    assert P.dim == 2 and P.rows == 10
    assert P.contains(np.zeros(2))
    assert not ofd.membership(P, np.array([0.9, 0.0]))


def test_ball_sandwich():
    L = ofd.ball_approximation(2, 1.0, 0.1)
    P = ofd.fourier_motzkin(L)
    rng = np.random.default_rng(0)
    for _ in range(50):
        u = rng.normal(size=2)
        u /= np.linalg.norm(u)
        s = ofd.support(P, u)
        assert 1 / 1.1 - 1e-7 <= s <= 1 + 1e-7
    with pytest.raises(ValueError):
        ofd.ball_approximation(2, 1.0, 0.0)


def test_toy_design():
    G = np.array([[1.0], [-1.0]])
    PD = ofd.HPolytope(G, np.array([0.5, 0.5]))
    r = ofd.farkas_design(np.array([1.0, 1.0]), G, PD)
    assert r["beta"] == pytest.approx(2.0)
    np.testing.assert_allclose(r["x_star"], [0.5, 0.5])
    assert ofd.volume_scale(8.0, 2.0, 3) == 1.0


def test_prototype_and_volume():
    G = ofd.build_G(2)
    x_bar = ofd.compute_prototype([np.array([0.4, -0.2]), np.array([-0.1, 0.3])], G)
    np.testing.assert_allclose(x_bar, [0.4, 0.3, 0.1, 0.2, 0.4, 0.2, 0.1, 0, 0.4, 0.6])
    box = ofd.HPolytope(np.vstack([np.eye(2), -np.eye(2)]), np.array([1.0, 1.0, 0.0, 0.0]))
    est, err = ofd.mc_volume(box, 1000, 3)
    assert est == 1.0 and err == 0.0
    assert ofd.certify_containment(box, box)["contained"]


def test_pipeline(tmp_path):
    config = {
        "seed": 3,
        "horizon": {"T": 2, "delta_hours": 1.0},
        "oracle": {
            "kind": "polytope",
            "model": {
                "p_max": [1, 1], "p_min": [-1, -1], "s0": 0.5, "s_max": [1, 1], "s_min": [0, 0],
                "ramp_up": [1], "ramp_dn": [-1],
            },
        },
        "dataset": {"N": 120},
        "evaluate": {"mc_samples": 5000, "M2": False},
    }
    report = ofd.run_pipeline(config, tmp_path)
    assert report["containment"]["contained"]
    assert (tmp_path / "report.json").exists()
    with pytest.raises(ValueError):
        ofd.run_pipeline({"seed": 1}, tmp_path / "bad")
