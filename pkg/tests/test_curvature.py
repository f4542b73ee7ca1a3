import math

import numpy as np
import pytest

from indefgeom import curvature as cv
from indefgeom import geometry as geo
from indefgeom import zoo
from indefgeom.errors import (
    DegeneratePlaneError,
    IsotropicDirectionError,
    NotKaehlerError,
    UnsupportedDimensionError,
)

E = np.eye(4)


def box(rng, n, r=0.4):
    return rng.uniform(-r, r, n)


def test_flat_everything_zero(rng):
    for nu in range(5):
        b = cv.bundle_at(zoo.flat(4, nu), box(rng, 4))
        assert not np.any(b.gamma) and not np.any(b.R) and not np.any(b.S)
        assert b.tau == 0.0
        assert not np.any(b.nabla_R)


def test_sphere_values():
    th = 1.0
    b = cv.bundle_at(zoo.sphere2(), [th, 0.3])
    assert b.gamma[0, 1, 1] == pytest.approx(-math.sin(th) * math.cos(th), abs=1e-14)
    assert b.gamma[1, 0, 1] == pytest.approx(math.cos(th) / math.sin(th), abs=1e-14)
    assert b.R[0, 1, 1, 0] == pytest.approx(math.sin(th) ** 2, abs=1e-14)
    np.testing.assert_allclose(b.S, b.g, atol=1e-14)
    assert b.tau == pytest.approx(2.0)
    for x in ([1.0, 0.0], [0.3, -2.0]):
        assert cv.ricci_direction_curvature(b, np.array(x)) == pytest.approx(1.0)


def test_conformal_christoffels():
    m = geo.ChartManifold.from_strings(
        "c", ["x1", "x2"], [["exp(2*x1)", "0"], ["0", "exp(2*x1)"]]
    )
    G = cv.christoffels_at(m, [0.3, -0.2])
    # gamma[k, i, j] = Gamma^k_ij
    assert G[0, 1, 1] == pytest.approx(-1.0)
    assert G[1, 0, 1] == pytest.approx(1.0)
    assert G[0, 0, 0] == pytest.approx(1.0)


def test_constant_curvature_values(rng):
    m = zoo.const_curv(4, 1, 1.0)
    for _ in range(5):
        b = cv.bundle_at(m, box(rng, 4))
        np.testing.assert_allclose(b.S, 3 * b.g, atol=1e-12)
        assert b.tau == pytest.approx(12.0, abs=1e-10)
        assert np.max(np.abs(b.nabla_R)) <= 1e-8
        np.testing.assert_allclose(b.R, b.pi1, atol=1e-12)


def test_sectional_curvature_constant_model(rng):
    b = cv.bundle_at(zoo.const_curv(4, 1, 1.0), box(rng, 4))
    used = 0
    while used < 200:
        x, y = rng.standard_normal(4), rng.standard_normal(4)
        if geo.classify_plane(b.g, x, y) is not geo.PlaneClass.NONDEGENERATE:
            continue
        assert cv.sectional_curvature(b, x, y) == pytest.approx(1.0, abs=1e-8)
        used += 1


def test_sectional_curvature_rejects_degenerate_plane():
    b = cv.bundle_at(zoo.flat(4, 1), [0, 0, 0, 0])
    with pytest.raises(DegeneratePlaneError, match="plane rank 1"):
        cv.sectional_curvature(b, E[0] + E[1], E[2])


def test_ricci_direction_rejects_isotropic():
    b = cv.bundle_at(zoo.flat(4, 1), [0, 0, 0, 0])
    assert cv.ricci_direction_curvature(b, E[2]) == 0.0
    with pytest.raises(IsotropicDirectionError, match="isotropic direction"):
        cv.ricci_direction_curvature(b, E[0] + E[1])


def _fd_metric_jet(m, p, h):
    """g, dg[a], d2g[a, b] from central differences of metric values only."""
    n = m.dim
    p = np.asarray(p, float)
    g0 = geo.metric_at(m, p)
    step = np.eye(n) * h

    def g(q):
        return geo.metric_at(m, q)

    dg = np.array([(g(p + step[a]) - g(p - step[a])) / (2 * h) for a in range(n)])
    d2g = np.empty((n, n, n, n))
    for a in range(n):
        d2g[a, a] = (g(p + step[a]) - 2 * g0 + g(p - step[a])) / h**2
        for b in range(a + 1, n):
            d2g[a, b] = d2g[b, a] = (
                g(p + step[a] + step[b]) - g(p + step[a] - step[b])
                - g(p - step[a] + step[b]) + g(p - step[a] - step[b])
            ) / (4 * h * h)
    return g0, dg, d2g


def _riemann_oracle(g, dg, d2g):
    # R_ijkl = 1/2 (g_jl,ik + g_ik,jl - g_il,jk - g_jk,il)
    #          + g_pq (Gamma^p_ik Gamma^q_jl - Gamma^p_jk Gamma^q_il)
    G = np.linalg.inv(g)
    first = 0.5 * (np.einsum("ijl->lij", dg) + np.einsum("jil->lij", dg) - dg)
    Gam = np.einsum("kl,lij->kij", G, first)
    second = 0.5 * (
        np.einsum("ikjl->ijkl", d2g)
        + np.einsum("jlik->ijkl", d2g)
        - np.einsum("jkil->ijkl", d2g)
        - np.einsum("iljk->ijkl", d2g)
    )
    quad = np.einsum("pq,pik,qjl->ijkl", g, Gam, Gam) - np.einsum("pq,pjk,qil->ijkl", g, Gam, Gam)
    return second + quad


def test_riemann_oracle_sign_on_sphere():
    g, dg, d2g = _fd_metric_jet(zoo.sphere2(), [1.0, 0.0], 1e-4)
    assert _riemann_oracle(g, dg, d2g)[0, 1, 1, 0] == pytest.approx(math.sin(1.0) ** 2, abs=1e-6)


def test_riemann_against_finite_difference(rng):
    for seed, nu in [(2, 1), (5, 2), (8, 0)]:
        m = zoo.random_poly(4, nu, seed=seed)
        p = box(rng, 4, 0.3)
        R = cv.bundle_at(m, p).R
        R_fd = _riemann_oracle(*_fd_metric_jet(m, p, 1e-4))
        assert np.max(np.abs(R - R_fd)) <= 1e-5 * (1 + np.max(np.abs(R)))


def test_christoffels_against_metric_difference(rng):
    m = zoo.random_poly(4, 2, seed=4)
    p = box(rng, 4, 0.3)
    h = 1e-5
    dg = np.empty((4, 4, 4))
    for a in range(4):
        hp, hm = p.copy(), p.copy()
        hp[a] += h
        hm[a] -= h
        dg[a] = (geo.metric_at(m, hp) - geo.metric_at(m, hm)) / (2 * h)
    # first[l, i, j] = (d_i g_jl + d_j g_il - d_l g_ij) / 2
    first = 0.5 * (np.einsum("ijl->lij", dg) + np.einsum("jil->lij", dg) - dg)
    G = np.einsum("kl,lij->kij", geo.inverse_metric_at(m, p), first)
    np.testing.assert_allclose(cv.christoffels_at(m, p), G, atol=1e-8)


def test_symmetries_and_bianchi_generic(rng):
    m = zoo.random_poly(4, 1, seed=7)
    for _ in range(3):
        b = cv.bundle_at(m, box(rng, 4, 0.3))
        d = b.symmetry_defects()
        assert max(d.values()) <= 1e-10
        assert b.second_bianchi_defect() <= 1e-8


def test_pp_wave_recurrence():
    m = zoo.pp_wave("u")
    b = cv.bundle_at(m, [2.0, 0.3, 0.1, -0.4])
    D = b.nabla_R
    assert np.max(np.abs(D)) > 1e-3
    du = np.array([1.0, 0.0, 0.0, 0.0])
    assert np.max(np.abs(D - 0.5 * np.einsum("a,ijkl->aijkl", du, b.R))) <= 1e-8


def test_weyl_examples(rng):
    b = cv.bundle_at(zoo.const_curv(4, 1, 1.0), box(rng, 4))
    assert np.max(np.abs(cv.weyl_at(b))) <= 1e-9
    b = cv.bundle_at(zoo.conformal_flat("sin_x1_x2"), box(rng, 4))
    assert np.max(np.abs(cv.weyl_at(b))) <= 1e-8
    b = cv.bundle_at(zoo.s2xs2(), [1.0, 0.2, 0.8, -0.5])
    assert np.max(np.abs(cv.weyl_at(b))) > 0.1


def test_weyl_needs_dimension_four():
    m = geo.ChartManifold.from_strings("flat3", ["a", "b", "c"], [["1", "0", "0"], ["0", "1", "0"], ["0", "0", "1"]])
    with pytest.raises(UnsupportedDimensionError):
        cv.weyl_at(cv.bundle_at(m, [0, 0, 0]))


def test_weyl_is_trace_free(rng):
    m = zoo.random_poly(4, 1, seed=1)
    b = cv.bundle_at(m, box(rng, 4, 0.3))
    W = cv.weyl_at(b)
    assert np.max(np.abs(np.einsum("il,ijkl->jk", b.g_inv, W))) <= 1e-10


def test_holomorphic_sectional(rng):
    b = cv.bundle_at(zoo.flat_kaehler(2, 1), [0.1, 0.2, 0.3, 0.4])
    assert cv.holomorphic_sectional(b, zoo.flat_kaehler().J, E[0]) == 0.0
    m = zoo.const_hol(2.0)
    b = cv.bundle_at(m, box(rng, 4, 0.3))
    x = rng.standard_normal(4)
    h1 = cv.holomorphic_sectional(b, m.J, x)
    assert h1 == pytest.approx(2.0, abs=1e-8)
    assert cv.holomorphic_sectional(b, m.J, 2 * x) == pytest.approx(h1, rel=1e-12)


@pytest.mark.parametrize("model", ["const_hol", "kaehler_product"])
def test_kaehler_curvature_is_j_invariant(rng, model):
    m = zoo.instantiate_model(model)
    J = m.J
    b = cv.bundle_at(m, box(rng, 4, 0.3))
    RJ = np.einsum("ijab,ak,bl->ijkl", b.R, J, J)
    np.testing.assert_allclose(RJ, b.R, atol=1e-10)


def test_bochner_examples(rng):
    m = zoo.flat_kaehler(2, 1)
    assert not np.any(cv.bochner_at(cv.bundle_at(m, [0, 0, 0, 0]), m.J))
    for c in (-1.0, 0.5, 2.0):
        m = zoo.const_hol(c)
        b = cv.bundle_at(m, box(rng, 4, 0.3))
        assert np.max(np.abs(cv.bochner_at(b, m.J))) <= 1e-9
        mc = b.n // 2  # complex dimension
        np.testing.assert_allclose(b.S, (mc + 1) * c / 2 * b.g, atol=1e-10)
        assert b.tau == pytest.approx(mc * (mc + 1) * c, abs=1e-9)
    m = zoo.kaehler_product()
    b = cv.bundle_at(m, [0.1, -0.2, 0.3, 0.05])
    assert np.max(np.abs(cv.bochner_at(b, m.J))) > 1e-2


def test_bochner_rejects_non_kaehler():
    m = zoo.hermitian_nonkaehler()
    with pytest.raises(NotKaehlerError):
        cv.bochner_at(cv.bundle_at(m, [0, 0, 0.2, 0]), m.J)
