"""Pointwise membership tests for the structural classes.

Every predicate returns a quantitative defect (relative, in the auxiliary
max-abs norm) rather than a bare boolean; callers compare against a
tolerance. Fits use componentwise least squares, never the indefinite
inner product, since g-inner products of curvature-type tensors vanish
identically on the null cone.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from . import exprlang
from .curvature import (
    CurvatureBundle,
    bochner_at,
    bundle_at,
    complex_dimension,
    holomorphic_sectional,
    kaehler_defects_at,
    weyl_at,
)
from .errors import MissingComplexStructureError, NotKaehlerError
from .geometry import (
    ChartManifold,
    aux_norm,
    inner,
    orthonormal_frame,
    phi_build,
    pi2_build,
    rank1_form_build,
)

DEFAULT_TOL = 1e-6


def _lstsq_coeff(T: np.ndarray, basis: np.ndarray) -> float:
    den = float(np.sum(basis * basis))
    return float(np.sum(T * basis)) / den if den else 0.0


def einstein_defect(bundle: CurvatureBundle) -> float:
    S = bundle.S
    return aux_norm(S - bundle.tau / bundle.n * bundle.g) / (1.0 + aux_norm(S))


def conformally_flat_defect(bundle: CurvatureBundle) -> float:
    return aux_norm(weyl_at(bundle)) / (1.0 + aux_norm(bundle.R))


def constant_curvature_fit(bundle: CurvatureBundle) -> tuple[float, float]:
    """Least-squares c for R ~ c*pi1 and the relative residual."""
    c = _lstsq_coeff(bundle.R, bundle.pi1)
    residual = aux_norm(bundle.R - c * bundle.pi1) / (1.0 + aux_norm(bundle.R))
    return c, residual


def _require_kaehler(bundle: CurvatureBundle, J: Optional[np.ndarray]) -> None:
    if J is None:
        raise MissingComplexStructureError()
    complex_dimension(bundle)
    defects = kaehler_defects_at(bundle, J)
    if max(defects.values()) > 1e-8 * (1.0 + aux_norm(bundle.g)):
        raise NotKaehlerError(f"metric is not Kaehler at this point: {defects}")


def constant_hol_curvature_fit(bundle: CurvatureBundle, J: Optional[np.ndarray]) -> tuple[float, float]:
    """Least-squares c for R ~ (c/4)(pi1 + pi2)."""
    _require_kaehler(bundle, J)
    model = (bundle.pi1 + pi2_build(bundle.g, J)) / 4.0
    c = _lstsq_coeff(bundle.R, model)
    residual = aux_norm(bundle.R - c * model) / (1.0 + aux_norm(bundle.R))
    return c, residual


def bochner_defect(bundle: CurvatureBundle, J: Optional[np.ndarray]) -> float:
    return aux_norm(bochner_at(bundle, J)) / (1.0 + aux_norm(bundle.R))


class QuasiConstantStatus(enum.Enum):
    OK = "ok"
    NOT_CONFORMALLY_FLAT = "not_conformally_flat"
    NO_DISTINGUISHED_EIGENVECTOR = "no_distinguished_eigenvector"


@dataclass
class QuasiConstantFit:
    status: QuasiConstantStatus
    V: Optional[np.ndarray] = None
    H: float = float("nan")
    N: float = float("nan")
    residual: float = float("nan")
    distinguished: bool = False
    conformal_defect: float = float("nan")

    def as_dict(self) -> dict:
        return {
            "status": self.status.value,
            "V": None if self.V is None else [float(v) for v in self.V],
            "H": self.H,
            "N": self.N,
            "residual": self.residual,
            "distinguished": self.distinguished,
            "conformal_defect": self.conformal_defect,
        }


def quasi_constant_residual(bundle: CurvatureBundle, V, H: float, N: float) -> float:
    model = (N - H) * phi_build(bundle.g, rank1_form_build(bundle.g, V)) + H * bundle.pi1
    return aux_norm(bundle.R - model) / (1.0 + aux_norm(bundle.R))


def _normalize_unit(g: np.ndarray, v: np.ndarray) -> Optional[np.ndarray]:
    v = np.real(np.asarray(v)).astype(float)
    v = v / aux_norm(v)
    gvv = inner(g, v, v)
    if abs(gvv) <= 1e-9:
        return None
    v = v / np.sqrt(abs(gvv))
    lead = v[np.argmax(np.abs(v) > 1e-12 * aux_norm(v))]
    return -v if lead < 0 else v


def quasi_constant_fit(bundle: CurvatureBundle, tol: float = DEFAULT_TOL) -> QuasiConstantFit:
    """Fit R = (N - H) phi(B) + H pi1 with B = V (x) V lowered.

    V is the eigenvector of the simple eigenvalue of the Ricci endomorphism.
    With eps = g(V,V) the eigenvalues are
        mu_V    = (n-1) (eps (N-H) + H)
        mu_perp = eps (N-H) + (n-1) H
    which are solved for H and N.
    """
    n = bundle.n
    cf = conformally_flat_defect(bundle)
    if cf > tol:
        return QuasiConstantFit(QuasiConstantStatus.NOT_CONFORMALLY_FLAT, conformal_defect=cf)
    g = bundle.g
    ricci_endo = bundle.g_inv @ bundle.S
    w, U = np.linalg.eig(ricci_endo)
    radius = max(float(np.max(np.abs(w))), 1e-300)
    scale = 1.0 + radius
    if np.max(np.abs(w.imag)) > 1e-9 * scale:
        return QuasiConstantFit(QuasiConstantStatus.NO_DISTINGUISHED_EIGENVECTOR, conformal_defect=cf)
    w = w.real
    if np.ptp(w) <= 1e-9 * scale:
        # constant curvature: H = N, any unit V works
        H = bundle.tau / (n * (n - 1))
        V = orthonormal_frame(g).vectors[:, -1]
        return QuasiConstantFit(
            QuasiConstantStatus.OK, V, H, H,
            quasi_constant_residual(bundle, V, H, H), False, cf,
        )
    for k in range(n):
        rest = np.delete(w, k)
        gap = float(np.min(np.abs(rest - w[k])))
        if np.ptp(rest) <= 1e-9 * scale and gap > 1e-6 * radius:
            break
    else:
        return QuasiConstantFit(QuasiConstantStatus.NO_DISTINGUISHED_EIGENVECTOR, conformal_defect=cf)
    V = _normalize_unit(g, U[:, k])
    if V is None:
        return QuasiConstantFit(QuasiConstantStatus.NO_DISTINGUISHED_EIGENVECTOR, conformal_defect=cf)
    eps = np.sign(inner(g, V, V))
    mu_v = w[k]
    mu_perp = float(np.mean(rest))
    H = (mu_perp - mu_v / (n - 1)) / (n - 2)
    N = H + eps * (mu_v / (n - 1) - H)
    return QuasiConstantFit(
        QuasiConstantStatus.OK, V, float(H), float(N),
        quasi_constant_residual(bundle, V, H, N), True, cf,
    )


class KnStarClass(enum.Enum):
    RECURRENT = "recurrent"
    SYMMETRIC_WALKER = "symmetric_walker"
    SYMMETRIC_UNCLASSIFIED = "symmetric_unclassified"
    NOT_KN_STAR = "not_kn_star"


@dataclass
class RecurrenceFit:
    kn_class: KnStarClass
    alpha: np.ndarray
    residual: float
    nabla_norm: float
    recurrence_function: Optional[str] = None

    def as_dict(self) -> dict:
        return {
            "class": self.kn_class.value,
            "alpha": [float(a) for a in self.alpha],
            "residual": self.residual,
            "nabla_norm": self.nabla_norm,
            "recurrence_function": self.recurrence_function,
        }


def fit_recurrence(nabla_R: np.ndarray, R: np.ndarray) -> tuple[np.ndarray, float]:
    """Per-slot least squares for nabla R = alpha (x) R.

    The residual is relative to ``1 + max|nabla R|``.
    """
    den = float(np.sum(R * R))
    if den == 0.0:
        alpha = np.zeros(nabla_R.shape[0])
    else:
        alpha = np.einsum("aijkl,ijkl->a", nabla_R, R) / den
    resid = aux_norm(nabla_R - np.einsum("a,ijkl->aijkl", alpha, R))
    return alpha, resid / (1.0 + aux_norm(nabla_R))


def walker_cyclic_defect(alpha: np.ndarray, R: np.ndarray) -> float:
    """max|sum_cycl(x,y,z) alpha(x) R(y,z,u,v)|."""
    T = np.einsum("a,bcuv->abcuv", alpha, R)
    cyc = T + np.einsum("bcauv->abcuv", T) + np.einsum("cabuv->abcuv", T)
    return aux_norm(cyc)


def kn_star_classify(
    m: ChartManifold,
    p: Sequence[float],
    v: Optional[exprlang.Expr] = None,
    tol: float = DEFAULT_TOL,
) -> RecurrenceFit:
    bundle = bundle_at(m, p)
    R, D = bundle.R, bundle.nabla_R
    d_norm = aux_norm(D)
    if v is None:
        v = m.recurrence_function
    v_text = exprlang.render(v) if v is not None else None
    if d_norm > tol * (1.0 + aux_norm(R)):
        alpha, resid = fit_recurrence(D, R)
        recurrent = resid <= tol and aux_norm(alpha) > tol
        cls = KnStarClass.RECURRENT if recurrent else KnStarClass.NOT_KN_STAR
        return RecurrenceFit(cls, alpha, resid, d_norm, v_text)
    if v is None:
        return RecurrenceFit(KnStarClass.SYMMETRIC_UNCLASSIFIED, np.zeros(m.dim), 0.0, d_norm)
    # alpha(X) = g(grad v, X) = dv(X)
    alpha = np.array([exprlang.eval_expr(exprlang.diff_expr(v, c), p) for c in m.coords])
    cyc = walker_cyclic_defect(alpha, R) / (1.0 + aux_norm(R))
    ok = cyc <= 1e-8 and aux_norm(alpha) > tol
    cls = KnStarClass.SYMMETRIC_WALKER if ok else KnStarClass.SYMMETRIC_UNCLASSIFIED
    return RecurrenceFit(cls, alpha, cyc, d_norm, v_text)


@dataclass
class KaehlerReport:
    points: list
    hermitian: list = field(default_factory=list)
    d_phi: list = field(default_factory=list)
    nabla_J: list = field(default_factory=list)

    @property
    def max_defects(self) -> dict[str, float]:
        return {
            "hermitian": max(self.hermitian, default=0.0),
            "d_phi": max(self.d_phi, default=0.0),
            "nabla_J": max(self.nabla_J, default=0.0),
        }

    def is_kaehler(self, tol: float = 1e-8) -> bool:
        return all(v <= tol for v in self.max_defects.values())


def kaehler_check(m: ChartManifold, points: Sequence[Sequence[float]]) -> KaehlerReport:
    J = m.J
    report = KaehlerReport([list(map(float, p)) for p in points])
    for p in points:
        d = kaehler_defects_at(bundle_at(m, p), J)
        report.hermitian.append(d["hermitian"])
        report.d_phi.append(d["d_phi"])
        report.nabla_J.append(d["nabla_J"])
    return report


def bochner_zero_hol_identity_defect(bundle: CurvatureBundle, J: Optional[np.ndarray], x) -> float:
    """Defect of H(x) g(x,x) = 4/(m+2) S(x,x) - tau/((m+1)(m+2)) g(x,x),
    m the complex dimension; vanishes wherever the Bochner tensor does."""
    _require_kaehler(bundle, J)
    m = complex_dimension(bundle)
    H = holomorphic_sectional(bundle, J, x)
    gxx = inner(bundle.g, x, x)
    lhs = H * gxx
    rhs = 4.0 / (m + 2) * inner(bundle.S, x, x) - bundle.tau / ((m + 1) * (m + 2)) * gxx
    return abs(lhs - rhs) / (1.0 + abs(lhs))
