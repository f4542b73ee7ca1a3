"""Levi-Civita curvature at a point, from exact metric jets.

Conventions (fixed by the unit sphere having K = +1 and Ricci = +g)::

    R(X,Y)Z  = nabla_X nabla_Y Z - nabla_Y nabla_X Z - nabla_[X,Y] Z
    R_ijkl   = g(R(d_i, d_j) d_k, d_l)
    K(x, y)  = R(x,y,y,x) / pi1(x,y,y,x)
    S_jk     = g^il R_ijkl
    (nabla R)_mijkl, derivative direction in the first slot.
"""

from __future__ import annotations

from functools import cached_property
from typing import Optional, Sequence

import numpy as np

from .errors import (
    DegeneratePlaneError,
    IsotropicDirectionError,
    MissingComplexStructureError,
    NotKaehlerError,
    UnsupportedDimensionError,
)
from .geometry import (
    ChartManifold,
    PlaneClass,
    apply4,
    aux_norm,
    check_nonsingular,
    classify_plane,
    inner,
    phi_build,
    pi1_build,
    pi2_build,
    psi_build,
)

KAEHLER_TOL = 1e-8


def _first_kind(dg: np.ndarray) -> np.ndarray:
    """C[l,i,j] = 1/2 (d_i g_jl + d_j g_il - d_l g_ij) from dg[a,i,j] = d_a g_ij.

    Extra leading axes on ``dg`` (further derivatives) are carried through.
    """
    return 0.5 * (
        np.einsum("...ijl->...lij", dg) + np.einsum("...jil->...lij", dg) - dg
    )


class CurvatureBundle:
    """All point-local curvature data of a chart manifold.

    Built eagerly up to the Riemann tensor; the covariant derivative of R
    (which needs third metric derivatives) and the Weyl/Bochner tensors are
    computed on first access.
    """

    def __init__(self, manifold: ChartManifold, point: Sequence[float]):
        self.manifold = manifold
        self.point = tuple(float(v) for v in point)
        g, dg, d2g = manifold.metric_jet(self.point, 2)
        check_nonsingular(g)
        n = manifold.dim
        self.n = n
        self.g = g
        self.dg = dg
        self.d2g = d2g
        G = np.linalg.inv(g)
        self.g_inv = G

        C = _first_kind(dg)
        dC = _first_kind(d2g)  # dC[a, l, i, j]
        self._C, self._dC = C, dC
        dG = -np.einsum("kp,apq,ql->akl", G, dg, G)
        self._dG = dG
        Gam = np.einsum("kl,lij->kij", G, C)
        dGam = np.einsum("akl,lij->akij", dG, C) + np.einsum("kl,alij->akij", G, dC)
        self.gamma = Gam
        self._dgamma = dGam

        # A[m,i,j,k] = (R(d_i,d_j) d_k)^m
        A = (
            np.einsum("imjk->mijk", dGam)
            - np.einsum("jmik->mijk", dGam)
            + np.einsum("mip,pjk->mijk", Gam, Gam)
            - np.einsum("mjp,pik->mijk", Gam, Gam)
        )
        self._A = A
        self.R = np.einsum("lm,mijk->ijkl", g, A)
        self.S = np.einsum("il,ijkl->jk", G, self.R)
        self.tau = float(np.einsum("jk,jk->", G, self.S))

    @cached_property
    def nabla_R(self) -> np.ndarray:
        m = self.manifold
        d3g = m.metric_jet(self.point, 3)[3]
        G, dG, g, dg = self.g_inv, self._dG, self.g, self.dg
        Gam, dGam, C, dC = self.gamma, self._dgamma, self._C, self._dC
        d2C = _first_kind(d3g)  # [a, b, l, i, j]
        d2G = (
            -np.einsum("kp,abpq,ql->abkl", G, self.d2g, G)
            + np.einsum("kp,apq,qr,brs,sl->abkl", G, dg, G, dg, G)
            + np.einsum("kp,bpq,qr,ars,sl->abkl", G, dg, G, dg, G)
        )
        d2Gam = (
            np.einsum("abkl,lij->abkij", d2G, C)
            + np.einsum("akl,blij->abkij", dG, dC)
            + np.einsum("bkl,alij->abkij", dG, dC)
            + np.einsum("kl,ablij->abkij", G, d2C)
        )
        # dA[a, m, i, j, k] = d_a A^m_ijk
        dA = (
            np.einsum("aimjk->amijk", d2Gam)
            - np.einsum("ajmik->amijk", d2Gam)
            + np.einsum("amip,pjk->amijk", dGam, Gam)
            + np.einsum("mip,apjk->amijk", Gam, dGam)
            - np.einsum("amjp,pik->amijk", dGam, Gam)
            - np.einsum("mjp,apik->amijk", Gam, dGam)
        )
        dR = np.einsum("alm,mijk->aijkl", dg, self._A) + np.einsum("lm,amijk->aijkl", g, dA)
        R = self.R
        return (
            dR
            - np.einsum("pai,pjkl->aijkl", Gam, R)
            - np.einsum("paj,ipkl->aijkl", Gam, R)
            - np.einsum("pak,ijpl->aijkl", Gam, R)
            - np.einsum("pal,ijkp->aijkl", Gam, R)
        )

    @cached_property
    def pi1(self) -> np.ndarray:
        return pi1_build(self.g)

    @cached_property
    def weyl(self) -> np.ndarray:
        return weyl_at(self)

    def symmetry_defects(self) -> dict[str, float]:
        """Relative max-abs defects of the algebraic curvature symmetries."""
        R = self.R
        scale = 1.0 + aux_norm(R)
        bianchi = R + np.einsum("jkil->ijkl", R) + np.einsum("kijl->ijkl", R)
        return {
            "skew12": aux_norm(R + np.swapaxes(R, 0, 1)) / scale,
            "skew34": aux_norm(R + np.swapaxes(R, 2, 3)) / scale,
            "pair": aux_norm(R - np.einsum("klij->ijkl", R)) / scale,
            "bianchi1": aux_norm(bianchi) / scale,
        }

    def second_bianchi_defect(self) -> float:
        # nabla_m R_ijkl + nabla_i R_jmkl + nabla_j R_mikl = 0
        D = self.nabla_R
        cyc = D + np.einsum("ijmkl->mijkl", D) + np.einsum("jmikl->mijkl", D)
        return aux_norm(cyc) / (1.0 + aux_norm(D))


def bundle_at(m: ChartManifold, p: Sequence[float]) -> CurvatureBundle:
    """Cached :class:`CurvatureBundle` keyed on the exact coordinates of ``p``."""
    key = tuple(float(v) for v in p)
    cache = m.__dict__.setdefault("_bundles", {})
    bundle = cache.get(key)
    if bundle is None:
        bundle = cache.setdefault(key, CurvatureBundle(m, key))
    return bundle


def christoffels_at(m: ChartManifold, p) -> np.ndarray:
    """Gamma[k, i, j] = Gamma^k_ij."""
    return bundle_at(m, p).gamma


def riemann_at(m: ChartManifold, p) -> np.ndarray:
    return bundle_at(m, p).R


def nabla_riemann_at(m: ChartManifold, p) -> np.ndarray:
    return bundle_at(m, p).nabla_R


def ricci_at(m: ChartManifold, p) -> np.ndarray:
    return bundle_at(m, p).S


def scalar_at(m: ChartManifold, p) -> float:
    return bundle_at(m, p).tau


def sectional_curvature(bundle: CurvatureBundle, x, y) -> float:
    cls = classify_plane(bundle.g, x, y)
    if cls is not PlaneClass.NONDEGENERATE:
        raise DegeneratePlaneError(cls.rank)
    num = apply4(bundle.R, x, y, y, x)
    den = inner(bundle.g, x, x) * inner(bundle.g, y, y) - inner(bundle.g, x, y) ** 2
    return num / den


def _require_nonisotropic(g: np.ndarray, x) -> float:
    x = np.asarray(x, dtype=float)
    a = aux_norm(x)
    gxx = inner(g, x, x)
    if a == 0.0 or abs(gxx) <= 1e-9 * a * a:
        raise IsotropicDirectionError("isotropic direction" if a else "zero vector")
    return gxx


def ricci_direction_curvature(bundle: CurvatureBundle, x) -> float:
    """K_S(x) = S(x,x) / g(x,x)."""
    gxx = _require_nonisotropic(bundle.g, x)
    return inner(bundle.S, x, x) / gxx


def holomorphic_sectional(bundle: CurvatureBundle, J: Optional[np.ndarray], x) -> float:
    """H(x) = R(x,Jx,Jx,x) / g(x,x)^2."""
    if J is None:
        raise MissingComplexStructureError()
    gxx = _require_nonisotropic(bundle.g, x)
    Jx = J @ np.asarray(x, dtype=float)
    return apply4(bundle.R, x, Jx, Jx, x) / gxx**2


def weyl_at(bundle: CurvatureBundle) -> np.ndarray:
    n = bundle.n
    if n < 4:
        raise UnsupportedDimensionError(
            "Weyl-based conformal flatness needs dimension >= 4 (n = 3 needs the Cotton tensor)"
        )
    return (
        bundle.R
        - phi_build(bundle.g, bundle.S) / (n - 2)
        + bundle.tau / ((n - 1) * (n - 2)) * bundle.pi1
    )


def kaehler_defects_at(bundle: CurvatureBundle, J: np.ndarray) -> dict[str, float]:
    """Pointwise Kaehler defects for a constant J.

    hermitian: max|g(J., J.) - g|
    d_phi:     max over i<j<k of |d_i F_jk + d_j F_ki + d_k F_ij|, F_jk = g(J e_j, e_k)
    nabla_J:   max|Gamma^a_ic J^c_b - J^a_c Gamma^c_ib|
    """
    g, dg, Gam = bundle.g, bundle.dg, bundle.gamma
    n = bundle.n
    herm = aux_norm(J.T @ g @ J - g)
    dF = np.einsum("aj,iak->ijk", J, dg)  # dF[i,j,k] = d_i F_jk
    d_phi = 0.0
    for i in range(n):
        for j in range(i + 1, n):
            for k in range(j + 1, n):
                d_phi = max(d_phi, abs(dF[i, j, k] + dF[j, k, i] + dF[k, i, j]))
    nabla_J = np.einsum("aic,cb->iab", Gam, J) - np.einsum("ac,cib->iab", J, Gam)
    return {"hermitian": herm, "d_phi": float(d_phi), "nabla_J": aux_norm(nabla_J)}


def complex_dimension(bundle: CurvatureBundle) -> int:
    if bundle.n % 2 or bundle.n < 4:
        raise UnsupportedDimensionError("Kaehler operations need even dimension >= 4")
    return bundle.n // 2


def bochner_at(bundle: CurvatureBundle, J: Optional[np.ndarray], tol: float = KAEHLER_TOL) -> np.ndarray:
    """Bochner tensor; the coefficient ``m`` below is the complex dimension."""
    if J is None:
        raise MissingComplexStructureError()
    m = complex_dimension(bundle)
    defects = kaehler_defects_at(bundle, J)
    if max(defects.values()) > tol * (1.0 + aux_norm(bundle.g)):
        raise NotKaehlerError(f"metric is not Kaehler at this point: {defects}")
    g, S, tau = bundle.g, bundle.S, bundle.tau
    return (
        bundle.R
        - (phi_build(g, S) + psi_build(g, J, S)) / (2 * (m + 2))
        + tau / (4 * (m + 1) * (m + 2)) * (bundle.pi1 + pi2_build(g, J))
    )
