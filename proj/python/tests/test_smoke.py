import math

import numpy as np
import pytest

import hie_py


def test_tree_facts():
    g = hie_py.gen_tree(3, 1093, "H", 32, 0)
    assert g.n == 1093
    assert len(g.edges) == 1092
    assert g.num_classes() == 4
    assert min(g.depth) == 0 and max(g.depth) == 6
    assert round(hie_py.homophily(g), 3) == 0.998
    assert round(hie_py.homophily(hie_py.gen_tree(3, 1093, "L", 32, 0)), 3) == 0.018
    assert np.asarray(g.features).shape == (1093, 32)


def test_manifold_round_trip_and_conversion():
    rng = np.random.default_rng(0)
    x = rng.uniform(-0.3, 0.3, 3)
    v = rng.normal(size=3)
    y = hie_py.expmap("poincare", x, v, -2.0)
    assert np.allclose(hie_py.logmap("poincare", x, y, -2.0), v, atol=1e-9)
    z = rng.uniform(-0.3, 0.3, 3)
    d = hie_py.dist("poincare", y, z, -2.0)
    lx = hie_py.convert("poincare", y, -2.0)
    lz = hie_py.convert("poincare", z, -2.0)
    assert lx.shape == (4,)
    assert math.isclose(hie_py.dist("lorentz", lx, lz, -2.0), d, rel_tol=1e-9)


def test_center_of_symmetric_set_is_origin():
    pts = np.array([[0.3, 0.1], [-0.3, -0.1], [0.0, 0.5], [0.0, -0.5]])
    c = hie_py.hyperbolic_center("poincare", pts)
    assert np.linalg.norm(c) < 1e-12
    # Lorentz alignment is an isometry, so the aligned set is exactly centered.
    lor = np.array([hie_py.convert("poincare", p) for p in pts + 0.1])
    aligned = hie_py.align_root("lorentz", lor)
    assert np.linalg.norm(hie_py.hyperbolic_center("lorentz", aligned)[1:]) < 1e-9
    # The ball translation only brings the center closer.
    before = np.linalg.norm(hie_py.hyperbolic_center("poincare", pts + 0.1))
    after = np.linalg.norm(hie_py.hyperbolic_center("poincare", hie_py.align_root("poincare", pts + 0.1)))
    assert after < before


def test_ranking_metrics():
    auc, ap = hie_py.ranking_metrics([0.9, 0.8], [0.1, 0.85])
    assert auc == 0.75
    assert 0.0 < ap <= 1.0


def test_train_is_deterministic():
    g = hie_py.gen_tree(3, 121, "H", 8, 1)
    opts = dict(model="hgcn", dim=4, max_epochs=10, seed=3, hie__mode="full", hie__lambda=0.1)
    r1, e1, h1 = hie_py.train(g, **opts)
    r2, e2, h2 = hie_py.train(g, **opts)
    assert r1 == r2
    assert np.array_equal(e1, e2)
    assert e1.shape == (121, 4)
    assert len(h1) >= 1 and h1 == h2
    assert 0.0 <= r1["metrics"]["accuracy"] <= 1.0
    assert "hierarchy_accuracy" in r1["metrics"]


def test_bad_config_raises():
    g = hie_py.gen_tree(3, 40, "H", 4, 0)
    with pytest.raises(ValueError):
        hie_py.train(g, colour="blue")
    with pytest.raises(ValueError):
        hie_py.gen_tree(variant="X")


def test_gradcheck_passes():
    cases = hie_py.gradcheck()
    assert cases and all(c["passed"] for c in cases)
