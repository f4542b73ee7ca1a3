from dataclasses import replace

import numpy as np
import pytest

from indefgeom import curvature as cv
from indefgeom import exprlang as el
from indefgeom import geometry as geo
from indefgeom import structure as st
from indefgeom import zoo


def box(rng, n=4, r=0.4):
    return rng.uniform(-r, r, n)


def test_einstein_defect_examples(rng):
    assert st.einstein_defect(cv.bundle_at(zoo.flat(), box(rng))) == 0.0
    assert st.einstein_defect(cv.bundle_at(zoo.const_curv(), box(rng))) <= 1e-9
    b = cv.bundle_at(zoo.conformal_flat("linear_x1"), [0, 0, 0, 0])
    assert st.einstein_defect(b) > 0.05


def test_conformally_flat_defect_examples(rng):
    assert st.conformally_flat_defect(cv.bundle_at(zoo.conformal_flat("sin_x1_x2"), box(rng))) <= 1e-8
    assert st.conformally_flat_defect(cv.bundle_at(zoo.const_curv(), box(rng))) <= 1e-9
    assert st.conformally_flat_defect(cv.bundle_at(zoo.s2xs2(), [1.0, 0.0, 1.2, 0.4])) > 0.01


def test_constant_curvature_fit_examples(rng):
    assert st.constant_curvature_fit(cv.bundle_at(zoo.flat(), box(rng))) == (0.0, 0.0)
    c, r = st.constant_curvature_fit(cv.bundle_at(zoo.const_curv(4, 1, 1.0), box(rng)))
    assert c == pytest.approx(1.0, abs=1e-8) and r <= 1e-8
    c, r = st.constant_curvature_fit(cv.bundle_at(zoo.const_curv(4, 2, -0.5), box(rng)))
    assert c == pytest.approx(-0.5, abs=1e-8) and r <= 1e-8
    _, r = st.constant_curvature_fit(cv.bundle_at(zoo.s2xs2(), [1.0, 0.0, 1.2, 0.4]))
    assert r > 0.1


def test_constant_hol_fit_examples(rng):
    m = zoo.flat_kaehler()
    assert st.constant_hol_curvature_fit(cv.bundle_at(m, box(rng)), m.J) == (0.0, 0.0)
    m = zoo.const_hol(2.0)
    c, r = st.constant_hol_curvature_fit(cv.bundle_at(m, box(rng, r=0.3)), m.J)
    assert c == pytest.approx(2.0, abs=1e-8) and r <= 1e-8
    m = zoo.kaehler_product()
    _, r = st.constant_hol_curvature_fit(cv.bundle_at(m, [0.1, 0.2, -0.3, 0.1]), m.J)
    assert r > 0.01


def test_quasi_constant_on_constant_curvature(rng):
    fit = st.quasi_constant_fit(cv.bundle_at(zoo.const_curv(4, 1, 1.0), box(rng)))
    assert fit.status is st.QuasiConstantStatus.OK
    assert not fit.distinguished
    assert fit.H == pytest.approx(1.0) and fit.N == pytest.approx(1.0)
    assert fit.residual <= 1e-8


def test_quasi_constant_one_variable_factor():
    b = cv.bundle_at(zoo.conformal_flat("linear_x1"), [0, 0, 0, 0])
    fit = st.quasi_constant_fit(b)
    assert fit.status is st.QuasiConstantStatus.OK and fit.distinguished
    assert fit.residual <= 1e-7
    # grad sigma points along x1
    V = fit.V / np.max(np.abs(fit.V))
    np.testing.assert_allclose(np.abs(V), [0, 1, 0, 0], atol=1e-6)
    assert st.quasi_constant_residual(b, fit.V, fit.H, fit.N) == pytest.approx(fit.residual)


def test_quasi_constant_rejects_s2xs2():
    fit = st.quasi_constant_fit(cv.bundle_at(zoo.s2xs2(), [1.0, 0.0, 1.2, 0.4]))
    assert fit.status is st.QuasiConstantStatus.NOT_CONFORMALLY_FLAT


def test_kn_star_flat_is_unclassified():
    fit = st.kn_star_classify(zoo.flat(), [0, 0, 0, 0])
    assert fit.kn_class is st.KnStarClass.SYMMETRIC_UNCLASSIFIED


def test_kn_star_pp_wave_recurrent():
    fit = st.kn_star_classify(zoo.pp_wave("u"), [2.0, 0.1, 0.3, -0.2])
    assert fit.kn_class is st.KnStarClass.RECURRENT
    np.testing.assert_allclose(fit.alpha, [0.5, 0, 0, 0], atol=1e-10)
    assert fit.residual <= 1e-7


def test_kn_star_symmetric_walker():
    m = zoo.pp_wave("1")
    v = el.parse_expr("u", m.coords)
    fit = st.kn_star_classify(m, [0.7, 0.1, 0.3, -0.2], v)
    assert fit.kn_class is st.KnStarClass.SYMMETRIC_WALKER
    np.testing.assert_allclose(fit.alpha, [1, 0, 0, 0])
    # without v nothing can be said
    fit = st.kn_star_classify(replace(m, recurrence_function=None), [0.7, 0.1, 0.3, -0.2])
    assert fit.kn_class is st.KnStarClass.SYMMETRIC_UNCLASSIFIED


def test_kn_star_generic_is_not_recurrent(rng):
    fit = st.kn_star_classify(zoo.random_poly(), box(rng, r=0.3))
    assert fit.kn_class is st.KnStarClass.NOT_KN_STAR


def test_recurrence_form_invariant_under_rescaling(rng):
    # alpha = d log|R|, so a constant factor in the metric leaves it unchanged
    p = [2.0, 0.1, 0.3, -0.2]
    m = zoo.pp_wave("u")
    scaled = geo.ChartManifold(
        "scaled", m.coords,
        tuple(tuple(el.mul(el.const(3.0), e) for e in row) for row in m.metric),
    )
    a = st.kn_star_classify(m, p).alpha
    b = st.kn_star_classify(scaled, p).alpha
    np.testing.assert_allclose(a, b, atol=1e-10)


def test_fit_recurrence_recovers_alpha(rng):
    R = cv.bundle_at(zoo.random_poly(), box(rng, r=0.3)).R
    alpha = rng.standard_normal(4)
    D = np.einsum("a,ijkl->aijkl", alpha, R)
    got, resid = st.fit_recurrence(D, R)
    np.testing.assert_allclose(got, alpha, atol=1e-12)
    assert resid <= 1e-14


@pytest.mark.parametrize("nu_c", [0, 1, 2])
def test_kaehler_check_flat(rng, nu_c):
    m = zoo.flat_kaehler(2, nu_c)
    rep = st.kaehler_check(m, [box(rng) for _ in range(3)])
    assert rep.max_defects == {"hermitian": 0.0, "d_phi": 0.0, "nabla_J": 0.0}


@pytest.mark.parametrize("model", ["kaehler_product", "const_hol"])
def test_kaehler_check_models(rng, model):
    m = zoo.instantiate_model(model)
    rep = st.kaehler_check(m, [box(rng, r=0.3) for _ in range(3)])
    assert rep.is_kaehler(1e-9)


def test_kaehler_check_witness():
    m = zoo.hermitian_nonkaehler()
    for x3 in (0.0, 0.5):
        rep = st.kaehler_check(m, [[0.1, -0.2, x3, 0.3]])
        d = rep.max_defects
        assert d["hermitian"] <= 1e-12
        assert d["d_phi"] == pytest.approx(2 * np.exp(2 * x3), rel=0.1)
        assert not rep.is_kaehler()


def test_bochner_identity(rng):
    m = zoo.flat_kaehler()
    b = cv.bundle_at(m, box(rng))
    assert st.bochner_zero_hol_identity_defect(b, m.J, rng.standard_normal(4)) == 0.0
    m = zoo.const_hol(2.0)
    b = cv.bundle_at(m, box(rng, r=0.3))
    for _ in range(10):
        assert st.bochner_zero_hol_identity_defect(b, m.J, rng.standard_normal(4)) <= 1e-8
    m = zoo.kaehler_product()
    b = cv.bundle_at(m, [0.1, 0.2, -0.3, 0.1])
    worst = max(st.bochner_zero_hol_identity_defect(b, m.J, rng.standard_normal(4)) for _ in range(20))
    assert worst > 1e-3
