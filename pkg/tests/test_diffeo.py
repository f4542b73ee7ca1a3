import math

import numpy as np
import pytest

from indefgeom import diffeo as df
from indefgeom import geometry as geo
from indefgeom import zoo
from indefgeom.errors import (
    DenominatorZeroError,
    InputError,
    NoUsableSampleError,
    NotHolomorphicError,
    SingularJacobianError,
)


def pts(rng, k=3, n=4, r=0.4):
    return [rng.uniform(-r, r, n) for _ in range(k)]


def test_pushforward_examples(rng):
    v = rng.standard_normal(4)
    p = rng.standard_normal(4)
    np.testing.assert_array_equal(df.pushforward(zoo.identity_map("flat"), p, v), v)
    flat = zoo.flat()
    twice = df.DiffeoMap.from_strings(flat, flat, ["2*x0", "2*x1", "2*x2", "2*x3"])
    np.testing.assert_allclose(df.pushforward(twice, p, v), 2 * v)


def test_pullback_metric_examples(rng):
    m = zoo.const_curv()
    p = pts(rng, 1)[0]
    np.testing.assert_allclose(df.pullback_metric_at(zoo.identity_map(), p), geo.metric_at(m, p))
    flat = zoo.flat(4, 2)
    c = 1.5
    dil = df.DiffeoMap.from_strings(flat, flat, [f"{c}*x{i}" for i in range(4)])
    np.testing.assert_allclose(df.pullback_metric_at(dil, p), c * c * geo.metric_at(flat, p))


def test_singular_jacobian():
    flat = zoo.flat()
    f = df.DiffeoMap.from_strings(flat, flat, ["x0^3", "x1", "x2", "x3"])
    with pytest.raises(SingularJacobianError):
        f.jacobian([0.0, 0.1, 0.2, 0.3])


def test_conformal_classify_examples(rng):
    rep = df.conformal_classify(zoo.scaled_identity("const_curv", k=4.0), pts(rng))
    assert rep.conformal_class is df.ConformalClass.HOMOTHETY
    assert rep.sigma[0] == pytest.approx(math.log(2.0))
    assert rep.gradient_class is df.GradientClass.ZERO
    rep = df.conformal_classify(zoo.lorentz_boost(0.7), pts(rng))
    assert rep.conformal_class is df.ConformalClass.ISOMETRY
    rep = df.conformal_classify(zoo.random_linear(), pts(rng))
    assert rep.conformal_class is df.ConformalClass.NOT_CONFORMAL


def test_inversion_factor(rng):
    f = zoo.inversion(4, 1)
    eta = np.diag([-1.0, 1, 1, 1])
    points = []
    while len(points) < 10:
        p = rng.uniform(-2, 2, 4)
        if abs(p @ eta @ p) > 0.3:
            points.append(p)
    rep = df.conformal_classify(f, points)
    assert rep.conformal_class is df.ConformalClass.CONFORMAL_NONCONSTANT
    for p, lam in zip(points, rep.lam):
        assert lam == pytest.approx((p @ eta @ p) ** -2, rel=1e-10)
    assert f.inverse_defect(points[0]) <= 1e-12


def test_conformal_classify_needs_two_points():
    with pytest.raises(InputError):
        df.conformal_classify(zoo.identity_map(), [[0, 0, 0, 0]])


def test_conformal_class_invariant_under_isometry(rng):
    eta1 = np.diag([-1.0, 1, 1, 1])

    def off_cone(q):
        return abs(q @ eta1 @ q) > 0.2

    # (map, model of the source, index, sampling radius, admissible image points)
    cases = [
        (zoo.inversion(4, 1), "flat", 1, 1.5, off_cone),
        (zoo.scaled_identity("flat", {"nu": 2}, k=9.0), "flat", 2, 0.4, None),
        (zoo.random_linear(4, 2, seed=3), "flat", 2, 0.4, None),
        (zoo.dilation(2.0), "const_curv", 1, 0.4, None),
    ]
    for k in range(10):
        f, model, nu, r, ok = cases[k % len(cases)]
        h = zoo.pseudo_orthogonal(model=model, nu=nu, seed=k)
        composed = df.compose(f, h)
        points = []
        while len(points) < 3:
            p = rng.uniform(-r, r, 4)
            if ok is None or ok(h.map_point(p)):
                points.append(p)
        base = df.conformal_classify(f, [h.map_point(p) for p in points])
        after = df.conformal_classify(composed, points)
        assert after.conformal_class is base.conformal_class
        if base.conformal_class is not df.ConformalClass.NOT_CONFORMAL:
            np.testing.assert_allclose(after.lam, base.lam, rtol=1e-9)


def test_compose_inverse(rng):
    f = zoo.inversion(4, 1)
    h = zoo.pseudo_orthogonal(model="flat", seed=2)
    c = df.compose(f, h)
    p = np.array([0.9, 0.2, -0.4, 1.3])
    np.testing.assert_allclose(c.map_point(p), f.map_point(h.map_point(p)))
    assert c.inverse_defect(p) <= 1e-12


def test_preservation_examples(rng):
    rep = df.preservation_defect(zoo.identity_map(), "sectional", rng, 50, pts(rng))
    assert rep.defect <= 1e-12
    iso = zoo.pseudo_orthogonal(model="const_curv", seed=1)
    for mode in ("sectional", "ricci_unit"):
        assert df.preservation_defect(iso, mode, rng, 100, pts(rng)).defect <= 1e-8
    rep = df.preservation_defect(zoo.dilation(2.0), "sectional", rng, 100, pts(rng))
    assert rep.defect == pytest.approx(0.75, abs=1e-6)
    with pytest.raises(InputError):
        df.preservation_defect(iso, "volume", rng, 10, pts(rng))


def test_limit_isometry_plane_weak(rng):
    f = zoo.pseudo_orthogonal(model="const_curv", nu=1, seed=0)
    rep = df.limit_ratio(f, "plane_weak", [0.1, -0.2, 0.15, 0.05], rng)
    assert rep.converged
    assert rep.limit == pytest.approx(1.0, abs=1e-5)


def test_limit_isometry_plane_strong(rng):
    f = zoo.pseudo_orthogonal(model="const_curv", nu=2, seed=0)
    rep = df.limit_ratio(f, "plane_strong", [0.1, -0.2, 0.15, 0.05], rng)
    assert rep.limit == pytest.approx(1.0, abs=1e-5)


def test_limit_holomorphic_isometry(rng):
    f = zoo.pair_rotation("const_hol")
    rep = df.limit_ratio(f, "holo", [0.1, -0.2, 0.15, 0.05], rng)
    assert rep.diagnostics["orientation"] == "holomorphic"
    assert rep.limit == pytest.approx(1.0, abs=1e-5)


def test_limit_homothety_ricci(rng):
    rep = df.limit_ratio(zoo.scaled_identity("const_curv", k=4.0), "ricci", [0.1, 0.2, -0.1, 0.0], rng)
    assert rep.limit == pytest.approx(0.25, abs=1e-4)


@pytest.mark.parametrize("mode", ["plane_weak", "ricci"])
def test_limit_flat_source(rng, mode):
    with pytest.raises(DenominatorZeroError, match="denominator identically zero"):
        df.limit_ratio(zoo.lorentz_boost(0.7), mode, [0, 0, 0, 0], rng)


def test_limit_flat_source_other_modes(rng):
    with pytest.raises(DenominatorZeroError):
        df.limit_ratio(zoo.pseudo_orthogonal(model="flat", nu=2), "plane_strong", [0, 0, 0, 0], rng)
    with pytest.raises(DenominatorZeroError):
        df.limit_ratio(zoo.pair_rotation("flat_kaehler"), "holo", [0, 0, 0, 0], rng)


def test_limit_holo_rejects_nonholomorphic(rng):
    with pytest.raises(NotHolomorphicError):
        df.limit_ratio(zoo.nonholomorphic_linear(), "holo", [0, 0, 0, 0], rng)


def test_limit_unknown_mode(rng):
    with pytest.raises(InputError):
        df.limit_ratio(zoo.identity_map(), "sideways", [0, 0, 0, 0], rng)


def test_richardson_first_order():
    ts = [0.1 / 2**k for k in range(5)]
    vals = [3.0 + 2.0 * t for t in ts]
    ext = df.richardson_first_order(vals)
    np.testing.assert_allclose(ext, 3.0, atol=1e-14)


def test_theorem1_trivial_cases(rng):
    m = zoo.const_curv()
    p = pts(rng, 1)[0]
    rep = df.theorem1_identities_defect(m, "0", p)
    assert (rep.d22, rep.dR) == (0.0, 0.0)
    rep = df.theorem1_identities_defect(zoo.flat(), "0.7", p)
    assert rep.d22 <= 1e-10 and rep.dR <= 1e-10
    assert rep.gradient_class is df.GradientClass.ZERO


def test_theorem1_generic_change_fails_identity():
    rep = df.theorem1_identities_defect(zoo.const_curv(), "0.3*x2", [0.1, 0.2, -0.1, 0.3])
    assert rep.d22 > 1e-3
    assert rep.gradient_class is df.GradientClass.NONNULL


def test_corollary_isometry_and_homothety(rng):
    points = pts(rng, 3, r=0.3)
    rep = df.corollary_lambda_check(zoo.pair_rotation("kaehler_product"), points, rng)
    assert rep.lam == pytest.approx(1.0, abs=1e-12)
    assert rep.defect_lambda <= 1e-6 and rep.defect_lambda_sq <= 1e-6
    assert rep.consistent_with_isometry
    rep = df.corollary_lambda_check(zoo.scaled_identity("kaehler_product", k=4.0), points, rng)
    assert rep.lam == pytest.approx(4.0)
    assert rep.r1 == pytest.approx(4.0, rel=1e-8)
    assert rep.defect_lambda_sq == pytest.approx(12.0, rel=1e-8)
    assert not rep.consistent_with_isometry


def test_corollary_flat_has_no_usable_sample(rng):
    f = zoo.pair_rotation("flat_kaehler")
    with pytest.raises(NoUsableSampleError, match="no usable"):
        df.corollary_lambda_check(f, pts(rng), rng, max_samples=50)


def test_null_cone_probe(rng):
    g = np.diag([-1.0, -1.0, 1.0, 1.0])
    A = rng.standard_normal((4, 4))
    probe = df.null_cone_probe(A, g, rng)
    assert probe.violated and probe.samples_used <= 500
    L = 3.0 * zoo.pseudo_orthogonal_matrix(4, 2, seed=5)
    probe = df.null_cone_probe(L, g, rng)
    assert not probe.violated and probe.max_defect <= 1e-10
    assert df.homothety_defect(L, g) <= 1e-12
