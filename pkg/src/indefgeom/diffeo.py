"""Diffeomorphisms between charts and the curvature-preservation checks.

A :class:`DiffeoMap` carries the target coordinates as expressions in the
source coordinates. Its Jacobian (the pushforward) is symbolic, and the
pulled-back metric is available both numerically and as an expression,
which is how the conformal factor is differentiated exactly.

Limit conditions are evaluated along straight approach paths in the
tangent space (``xi + t u`` and ``span{xi + t z, y}``) at
``t_k = 0.1 * 2**-k``, ``k = 0..10``, followed by first-order Richardson
extrapolation.
"""

from __future__ import annotations

import enum
import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Optional, Sequence

import numpy as np

from . import exprlang
from .curvature import (
    CurvatureBundle,
    bundle_at,
    ricci_direction_curvature,
)
from .errors import (
    DenominatorZeroError,
    InputError,
    NoUsableSampleError,
    NotHolomorphicError,
    NumericalError,
    SamplesExhaustedError,
    SingularJacobianError,
)
from .geometry import (
    ChartManifold,
    apply4,
    aux_norm,
    check_nonsingular,
    inner,
    orthonormal_frame,
    pi1_build,
    plane_rank,
    sample_isotropic,
)

T_SCHEDULE = tuple(0.1 * 2.0**-k for k in range(11))
CONVERGENCE_TOL = 1e-5


@dataclass(frozen=True, eq=False)
class DiffeoMap:
    source: ChartManifold
    target: ChartManifold
    components: tuple[exprlang.Expr, ...]
    inverse: Optional[tuple[exprlang.Expr, ...]] = None
    name: str = "map"

    def __post_init__(self):
        if self.source.dim != self.target.dim:
            raise InputError("source and target dimensions differ")
        if len(self.components) != self.source.dim:
            raise InputError("need one component expression per target coordinate")
        if self.inverse is not None and len(self.inverse) != self.source.dim:
            raise InputError("inverse needs one component per source coordinate")

    @classmethod
    def from_strings(cls, source, target, components, inverse=None, name="map"):
        comps = tuple(exprlang.parse_expr(c, source.coords) for c in components)
        inv = None
        if inverse is not None:
            inv = tuple(exprlang.parse_expr(c, target.coords) for c in inverse)
        return cls(source, target, comps, inv, name)

    @cached_property
    def _eval_components(self):
        return exprlang.compile_exprs(self.components)

    @cached_property
    def jacobian_exprs(self) -> list[list[exprlang.Expr]]:
        return [[exprlang.diff_expr(fa, c) for c in self.source.coords] for fa in self.components]

    @cached_property
    def _eval_jacobian(self):
        return exprlang.compile_exprs([e for row in self.jacobian_exprs for e in row])

    def map_point(self, p: Sequence[float]) -> np.ndarray:
        return self._eval_components(p)

    def jacobian(self, p: Sequence[float]) -> np.ndarray:
        n = self.source.dim
        Jf = self._eval_jacobian(p).reshape(n, n)
        scale = aux_norm(Jf)
        if scale == 0.0 or abs(np.linalg.det(Jf)) <= 1e-12 * scale**n:
            raise SingularJacobianError("Jacobian is singular at this point")
        return Jf

    @cached_property
    def pullback_exprs(self) -> list[list[exprlang.Expr]]:
        """(f* gbar)_ij as expressions over the source coordinates."""
        n = self.source.dim
        sub = dict(zip(self.target.coords, self.components))
        gbar = [[exprlang.substitute(self.target.metric[a][b], sub) for b in range(n)] for a in range(n)]
        Jx = self.jacobian_exprs
        out = [[None] * n for _ in range(n)]
        for i in range(n):
            for j in range(i, n):
                acc = exprlang.ZERO
                for a in range(n):
                    for b in range(n):
                        term = exprlang.mul(exprlang.mul(Jx[a][i], Jx[b][j]), gbar[a][b])
                        acc = exprlang.add(acc, term)
                out[i][j] = out[j][i] = acc
        return out

    def inverse_defect(self, p: Sequence[float]) -> float:
        if self.inverse is None:
            raise InputError("map has no inverse components")
        q = self.map_point(p)
        back = exprlang.compile_exprs(self.inverse)(q)
        return aux_norm(back - np.asarray(p, dtype=float))


def compose(f: DiffeoMap, h: DiffeoMap, name: Optional[str] = None) -> DiffeoMap:
    """f o h, i.e. apply h first. Requires h.target and f.source to share coordinates."""
    if h.target.coords != f.source.coords:
        raise InputError("h.target and f.source use different coordinate names")
    sub = dict(zip(f.source.coords, h.components))
    comps = tuple(exprlang.substitute(e, sub) for e in f.components)
    inv = None
    if f.inverse is not None and h.inverse is not None:
        sub_inv = dict(zip(h.target.coords, f.inverse))
        inv = tuple(exprlang.substitute(e, sub_inv) for e in h.inverse)
    return DiffeoMap(h.source, f.target, comps, inv, name or f"{f.name}.{h.name}")


def pushforward(f: DiffeoMap, p: Sequence[float], v) -> np.ndarray:
    return f.jacobian(p) @ np.asarray(v, dtype=float)


def pullback_metric_at(f: DiffeoMap, p: Sequence[float]) -> np.ndarray:
    Jf = f.jacobian(p)
    gbar = f.target.metric_jet(f.map_point(p), 0)[0]
    check_nonsingular(gbar)
    return Jf.T @ gbar @ Jf


def pullback4(T: np.ndarray, Jf: np.ndarray) -> np.ndarray:
    return np.einsum("abcd,ai,bj,ck,dl->ijkl", T, Jf, Jf, Jf, Jf)


# ---------------------------------------------------------------------------
# Conformality
# ---------------------------------------------------------------------------


class ConformalClass(enum.Enum):
    ISOMETRY = "isometry"
    HOMOTHETY = "homothety"
    CONFORMAL_NONCONSTANT = "conformal_nonconstant"
    NOT_CONFORMAL = "not_conformal"


class GradientClass(enum.Enum):
    ZERO = "zero"
    ISOTROPIC = "isotropic"
    NONNULL = "nonnull"


def classify_gradient(g: np.ndarray, dsigma: np.ndarray) -> GradientClass:
    """Zero / isotropic / non-null classification of grad sigma = g^-1 d sigma."""
    grad = np.linalg.solve(g, dsigma)
    a = aux_norm(grad)
    if a < 1e-8:
        return GradientClass.ZERO
    if a >= 1e-6 and abs(inner(g, grad, grad)) < 1e-8 * a * a:
        return GradientClass.ISOTROPIC
    return GradientClass.NONNULL


@dataclass
class ConformalReport:
    points: list
    lam: list
    sigma: list
    residual: list
    gradient: list  # per-point GradientClass or None
    conformal_class: ConformalClass
    gradient_class: Optional[GradientClass]
    gradient_method: str = "symbolic"

    def as_dict(self) -> dict:
        return {
            "class": self.conformal_class.value,
            "gradient_class": self.gradient_class.value if self.gradient_class else None,
            "gradient_method": self.gradient_method,
            "points": self.points,
            "lambda": self.lam,
            "sigma": self.sigma,
            "residual": self.residual,
            "gradient": [gc.value if gc else None for gc in self.gradient],
        }


def _conformal_factor_exprs(f: DiffeoMap):
    """lambda = <f*gbar, g>_aux / <g, g>_aux and d(1/2 log lambda) as expressions."""
    cache = f.__dict__.get("_lambda_exprs")
    if cache is None:
        n = f.source.dim
        num, den = exprlang.ZERO, exprlang.ZERO
        pull = f.pullback_exprs
        for i in range(n):
            for j in range(n):
                gij = f.source.metric[i][j]
                num = exprlang.add(num, exprlang.mul(pull[i][j], gij))
                den = exprlang.add(den, exprlang.mul(gij, gij))
        lam = exprlang.div(num, den)
        sigma = exprlang.mul(exprlang.const(0.5), exprlang.func("log", lam))
        grad = [exprlang.diff_expr(sigma, c) for c in f.source.coords]
        cache = (lam, exprlang.compile_exprs(grad))
        f.__dict__["_lambda_exprs"] = cache
    return cache


def conformal_classify(
    f: DiffeoMap, points: Sequence[Sequence[float]], tol: float = 1e-6
) -> ConformalReport:
    if len(points) < 2:
        raise InputError("conformal classification needs at least 2 sample points")
    _, grad_eval = _conformal_factor_exprs(f)
    lams, sigmas, resids, grads = [], [], [], []
    conformal = True
    for p in points:
        g = f.source.metric_jet(p, 0)[0]
        pull = pullback_metric_at(f, p)
        lam = float(np.sum(pull * g) / np.sum(g * g))
        resid = aux_norm(pull - lam * g) / (1.0 + aux_norm(pull))
        lams.append(lam)
        resids.append(resid)
        if resid > tol or lam <= 0.0:
            conformal = False
            sigmas.append(None)
            grads.append(None)
            continue
        sigmas.append(0.5 * math.log(lam))
        grads.append(classify_gradient(g, grad_eval(p)))
    if not conformal:
        cls = ConformalClass.NOT_CONFORMAL
        gclass = None
    else:
        if max(abs(s) for s in sigmas) <= 1e-8:
            cls = ConformalClass.ISOMETRY
        elif max(sigmas) - min(sigmas) <= 1e-8:
            cls = ConformalClass.HOMOTHETY
        else:
            cls = ConformalClass.CONFORMAL_NONCONSTANT
        if GradientClass.NONNULL in grads:
            gclass = GradientClass.NONNULL
        elif GradientClass.ISOTROPIC in grads:
            gclass = GradientClass.ISOTROPIC
        else:
            gclass = GradientClass.ZERO
    return ConformalReport(
        [list(map(float, p)) for p in points], lams, sigmas, resids, grads, cls, gclass
    )


# ---------------------------------------------------------------------------
# Preservation of sectional / Ricci curvature
# ---------------------------------------------------------------------------

COND_TOL = 1e-6


@dataclass
class PreservationReport:
    mode: str
    defect: float
    used: int
    skipped: int

    def as_dict(self) -> dict:
        return {"mode": self.mode, "defect": self.defect, "used": self.used, "skipped": self.skipped}


def _plane_curvature(b: CurvatureBundle, x, y) -> Optional[float]:
    """K of span{x, y}, or None when the plane is nearly degenerate."""
    den = inner(b.g, x, x) * inner(b.g, y, y) - inner(b.g, x, y) ** 2
    if abs(den) < COND_TOL * (aux_norm(x) * aux_norm(y)) ** 2:
        return None
    return apply4(b.R, x, y, y, x) / den


def preservation_defect(
    f: DiffeoMap,
    mode: str,
    rng: np.random.Generator,
    samples: int,
    points: Sequence[Sequence[float]],
) -> PreservationReport:
    """max |Kbar(f_* alpha) - K(alpha)| over random planes (``sectional``)
    or max |Kbar_Sbar(f_* x) - K_S(x)| over random unit vectors (``ricci_unit``)."""
    if mode not in ("sectional", "ricci_unit"):
        raise InputError(f"unknown preservation mode {mode!r}")
    n = f.source.dim
    worst, used, skipped = 0.0, 0, 0
    for s in range(samples):
        p = points[s % len(points)]
        bs = bundle_at(f.source, p)
        bt = bundle_at(f.target, f.map_point(p))
        Jf = f.jacobian(p)
        if mode == "sectional":
            x, y = rng.standard_normal(n), rng.standard_normal(n)
            k = _plane_curvature(bs, x, y)
            kb = _plane_curvature(bt, Jf @ x, Jf @ y)
        else:
            x = rng.standard_normal(n)
            gxx = inner(bs.g, x, x)
            fx = Jf @ x
            if abs(gxx) < COND_TOL * aux_norm(x) ** 2 or abs(inner(bt.g, fx, fx)) < COND_TOL * aux_norm(fx) ** 2:
                k = kb = None
            else:
                x = x / math.sqrt(abs(gxx))
                k = ricci_direction_curvature(bs, x)
                kb = ricci_direction_curvature(bt, Jf @ x)
        if k is None or kb is None:
            skipped += 1
            continue
        used += 1
        worst = max(worst, abs(kb - k))
    if used == 0:
        raise SamplesExhaustedError("every sample violated the nondegeneracy requirement")
    return PreservationReport(mode, worst, used, skipped)


# ---------------------------------------------------------------------------
# Limit conditions along degenerate data
# ---------------------------------------------------------------------------

LIMIT_MODES = ("plane_weak", "plane_strong", "ricci", "holo")


@dataclass
class LimitReport:
    mode: str
    point: list
    t: list
    ratios: list
    extrapolants: list
    limit: float
    converged: bool
    diagnostics: dict = field(default_factory=dict)

    def as_dict(self) -> dict:
        return {
            "mode": self.mode,
            "point": self.point,
            "t": self.t,
            "ratios": self.ratios,
            "extrapolants": self.extrapolants,
            "limit": self.limit,
            "converged": self.converged,
            "diagnostics": self.diagnostics,
        }


def _exact_form(T: np.ndarray, *vecs) -> Fraction:
    """T(v1, ..., vk) accumulated exactly in rationals.

    Along the approximating families the individual terms are O(1) while
    the result is O(t) or O(t^2); float summation would leave an error of
    order eps / t^2 in the ratio.
    """
    fv = [[Fraction(float(c)) for c in v] for v in vecs]
    total = Fraction(0)
    for idx in itertools.product(*(range(len(v)) for v in fv)):
        coeff = T[idx]
        if coeff == 0.0:
            continue
        term = Fraction(float(coeff))
        for v, i in zip(fv, idx):
            term *= v[i]
        total += term
    return total


def _exact_plane_curvature(b: CurvatureBundle, x, y) -> Optional[float]:
    den = _exact_form(b.g, x, x) * _exact_form(b.g, y, y) - _exact_form(b.g, x, y) ** 2
    if den == 0:
        return None
    return float(_exact_form(b.R, x, y, y, x) / den)


def _exact_ricci_curvature(b: CurvatureBundle, x) -> Optional[float]:
    den = _exact_form(b.g, x, x)
    return None if den == 0 else float(_exact_form(b.S, x, x) / den)


def _exact_holomorphic(b: CurvatureBundle, J: np.ndarray, x) -> Optional[float]:
    den = _exact_form(b.g, x, x)
    Jx = J @ x
    return None if den == 0 else float(_exact_form(b.R, x, Jx, Jx, x) / den**2)


def richardson_first_order(values: Sequence[float]) -> list[float]:
    """2 r(t/2) - r(t) for successive halvings of t."""
    return [2.0 * values[k + 1] - values[k] for k in range(len(values) - 1)]


def _random_with(rng, n, ok, tries=200):
    for _ in range(tries):
        u = rng.standard_normal(n)
        if ok(u):
            return u
    raise NoUsableSampleError("could not build an admissible approximating family")


def _best_isotropic(g, rng, score, tries=64):
    best, best_s = None, -1.0
    for _ in range(tries):
        xi = sample_isotropic(g, rng)
        s = abs(score(xi)) / aux_norm(xi) ** 4
        if s > best_s:
            best, best_s = xi, s
    return best


def _totally_isotropic_pair(g, rng):
    frame = orthonormal_frame(g)
    neg = frame.vectors[:, frame.signs < 0]
    pos = frame.vectors[:, frame.signs > 0]
    if neg.shape[1] < 2 or pos.shape[1] < 2:
        raise InputError("strongly degenerate planes need signature with at least two of each sign")
    qn, _ = np.linalg.qr(rng.standard_normal((neg.shape[1], 2)))
    qp, _ = np.linalg.qr(rng.standard_normal((pos.shape[1], 2)))
    u, w = neg @ qn, pos @ qp
    return u[:, 0] + w[:, 0], u[:, 1] + w[:, 1]


def check_holomorphic(f: DiffeoMap, p, tol: float = 1e-8) -> int:
    """+1 if f_* J = Jbar f_*, -1 if f_* J = -Jbar f_*, else raise."""
    J, Jb = f.source.J, f.target.J
    Jf = f.jacobian(p)
    scale = 1.0 + aux_norm(Jf)
    d_plus = aux_norm(Jf @ J - Jb @ Jf) / scale
    d_minus = aux_norm(Jf @ J + Jb @ Jf) / scale
    if d_plus <= tol:
        return 1
    if d_minus <= tol:
        return -1
    raise NotHolomorphicError(min(d_plus, d_minus))


def limit_ratio(
    f: DiffeoMap,
    mode: str,
    p: Sequence[float],
    rng: np.random.Generator,
    max_tries: int = 20,
) -> LimitReport:
    if mode not in LIMIT_MODES:
        raise InputError(f"unknown limit mode {mode!r}")
    n = f.source.dim
    bs = bundle_at(f.source, p)
    bt = bundle_at(f.target, f.map_point(p))
    Jf = f.jacobian(p)
    g = bs.g
    diagnostics: dict = {}

    if mode == "holo":
        diagnostics["orientation"] = "holomorphic" if check_holomorphic(f, p) > 0 else "antiholomorphic"
        J, Jb = f.source.J, f.target.J

    if mode in ("ricci", "holo"):
        if mode == "ricci":
            xi = _best_isotropic(g, rng, lambda v: inner(bs.S, v, v))
            diagnostics["S(xi,xi)"] = inner(bs.S, xi, xi)

            def ratio_parts(t, u):
                x = xi + t * u
                return _exact_ricci_curvature(bt, Jf @ x), _exact_ricci_curvature(bs, x)
        else:
            xi = _best_isotropic(g, rng, lambda v: apply4(bs.R, v, J @ v, J @ v, v))
            diagnostics["R(xi,Jxi,Jxi,xi)"] = apply4(bs.R, xi, J @ xi, J @ xi, xi)

            def ratio_parts(t, u):
                x = xi + t * u
                return _exact_holomorphic(bt, Jb, Jf @ x), _exact_holomorphic(bs, J, x)

        def admissible(u):
            a = aux_norm(xi) * aux_norm(u)
            return abs(inner(g, xi, u)) > 0.1 * a and abs(inner(bt.g, Jf @ xi, Jf @ u)) > 0.1 * a * aux_norm(Jf) ** 2
    else:
        if mode == "plane_weak":
            xi = sample_isotropic(g, rng)

            # r = g xi makes g(xi, r) = |g xi|^2 as large as possible
            r = g @ xi

            def perp(w):
                return w - inner(g, xi, w) / inner(g, xi, r) * r

            best = None
            for _ in range(32):
                y = perp(rng.standard_normal(n))
                if abs(inner(g, y, y)) < 0.1 * aux_norm(y) ** 2 or plane_rank(g, xi, y) != 1:
                    continue
                s = abs(apply4(bs.R, xi, y, y, xi)) / (aux_norm(y) ** 2 * aux_norm(xi) ** 2)
                if best is None or s > best[0]:
                    best = (s, y)
            if best is None:
                raise NoUsableSampleError("no weakly degenerate plane found")
            y = best[1]
        else:
            xi, y = _totally_isotropic_pair(g, rng)
            if plane_rank(g, xi, y) != 0:
                raise NumericalError("failed to build a strongly degenerate plane")
        diagnostics["R(xi,y,y,xi)"] = apply4(bs.R, xi, y, y, xi)

        def ratio_parts(t, z):
            x = xi + t * z
            return _exact_plane_curvature(bt, Jf @ x, Jf @ y), _exact_plane_curvature(bs, x, y)

        # the Gram determinant scales with g(xi, z) (weak) or g(z, y)^2 (strong);
        # keeping these well away from zero bounds the roundoff amplification
        anchor = g @ (xi if mode == "plane_weak" else y)

        def admissible(z):
            return abs(z @ anchor) > 0.5 * aux_norm(z) * aux_norm(anchor)

    for _ in range(max_tries):
        u = _random_with(rng, n, admissible)
        nums, dens = [], []
        for t in T_SCHEDULE:
            try:
                kb, k = ratio_parts(t, u)
            except NumericalError:
                kb = k = None
            if kb is None or k is None:
                break
            nums.append(kb)
            dens.append(k)
        else:
            break
    else:
        raise NoUsableSampleError("approximating family degenerates for every trial direction")

    dens = np.array(dens)
    nums = np.array(nums)
    if np.all(np.abs(dens) <= 1e-12):
        raise DenominatorZeroError(f"mode {mode}")
    if np.any(dens == 0.0):
        raise DenominatorZeroError(f"mode {mode}: source curvature vanishes at some t")
    ratios = (nums / dens).tolist()
    ext = richardson_first_order(ratios)
    converged = abs(ext[-1] - ext[-2]) < CONVERGENCE_TOL
    diagnostics["denominator_min"] = float(np.min(np.abs(dens)))
    return LimitReport(
        mode, [float(v) for v in p], list(T_SCHEDULE), ratios, ext, ext[-1], converged, diagnostics
    )


# ---------------------------------------------------------------------------
# Identity checks from the rigidity arguments
# ---------------------------------------------------------------------------


def conformal_rescale(m: ChartManifold, sigma: exprlang.Expr, name: Optional[str] = None) -> ChartManifold:
    """The manifold with metric exp(2 sigma) g on the same chart."""
    factor = exprlang.func("exp", exprlang.mul(exprlang.const(2.0), sigma))
    metric = tuple(tuple(exprlang.mul(factor, e) for e in row) for row in m.metric)
    return ChartManifold(
        name or f"{m.name}_conformal", m.coords, metric, m.complex_structure, m.recurrence_function
    )


@dataclass
class Theorem1Report:
    d22: float
    dR: float
    sigma: float
    gradient_class: GradientClass
    conformally_flat: Optional[tuple[float, float]]
    recurrence_angle: Optional[float] = None
    warnings: list = field(default_factory=list)

    def as_dict(self) -> dict:
        return {
            "d22": self.d22,
            "dR": self.dR,
            "sigma": self.sigma,
            "case": {"zero": "a", "isotropic": "b", "nonnull": "c"}[self.gradient_class.value],
            "gradient_class": self.gradient_class.value,
            "conformally_flat_defects": list(self.conformally_flat) if self.conformally_flat else None,
            "recurrence_angle": self.recurrence_angle,
            "warnings": self.warnings,
        }


def _aux_angle(a: np.ndarray, b: np.ndarray) -> float:
    na, nb = np.linalg.norm(a), np.linalg.norm(b)
    if na == 0.0 or nb == 0.0:
        return float("nan")
    c = min(1.0, abs(float(a @ b)) / (na * nb))
    return math.acos(c)


def theorem1_identities_defect(
    m: ChartManifold, sigma, p: Sequence[float], conf_tol: float = 1e-6
) -> Theorem1Report:
    """Defects of the Ricci and curvature relations for gbar = exp(2 sigma) g.

    d22: Sbar = e^{2s} (S + (taubar - tau)/n g)
    dR:  Rbar = e^{4s} (R + (taubar - tau)/(n(n-1)) pi1)
    """
    if isinstance(sigma, str):
        sigma = exprlang.parse_expr(sigma, m.coords)
    mbar = conformal_rescale(m, sigma)
    b = bundle_at(m, p)
    bb = bundle_at(mbar, p)
    n = b.n
    s = exprlang.eval_expr(sigma, p)
    e2 = math.exp(2.0 * s)
    dt = bb.tau - b.tau
    d22 = aux_norm(bb.S - e2 * (b.S + dt / n * b.g)) / (1.0 + aux_norm(bb.S))
    dR = aux_norm(bb.R - e2 * e2 * (b.R + dt / (n * (n - 1)) * pi1_build(b.g))) / (1.0 + aux_norm(bb.R))
    dsigma = np.array([exprlang.eval_expr(exprlang.diff_expr(sigma, c), p) for c in m.coords])
    grad_class = classify_gradient(b.g, dsigma)
    report = Theorem1Report(d22, dR, s, grad_class, None)
    if n >= 4:
        from .structure import conformally_flat_defect

        cf = (conformally_flat_defect(b), conformally_flat_defect(bb))
        report.conformally_flat = cf
        if max(cf) > conf_tol:
            report.warnings.append("metrics are not both conformally flat; dR is not expected to vanish")
    else:
        report.warnings.append("n = 3: conformal flatness not checked")
    if m.recurrence_function is not None and grad_class is not GradientClass.ZERO:
        v = m.recurrence_function
        dv = np.array([exprlang.eval_expr(exprlang.diff_expr(v, c), p) for c in m.coords])
        grad_s = np.linalg.solve(b.g, dsigma)
        grad_v = np.linalg.solve(b.g, dv)
        report.recurrence_angle = _aux_angle(grad_s, grad_v)
    return report


@dataclass
class CorollaryReport:
    lam: float
    r1: float
    defect_lambda: float
    defect_lambda_sq: float
    consistent_with_isometry: bool
    samples_tried: int

    def as_dict(self) -> dict:
        return {
            "lambda": self.lam,
            "r1": self.r1,
            "defect_lambda": self.defect_lambda,
            "defect_lambda_sq": self.defect_lambda_sq,
            "consistent_with_isometry": self.consistent_with_isometry,
            "samples_tried": self.samples_tried,
        }


def corollary_lambda_check(
    f: DiffeoMap,
    points: Sequence[Sequence[float]],
    rng: np.random.Generator,
    max_samples: int = 10_000,
) -> CorollaryReport:
    """Compare (f*Rbar)(xi,Jxi,Jxi,xi) / R(xi,Jxi,Jxi,xi) against lambda and lambda^2.

    ``points[0]`` is where the null vector is sampled; all points feed the
    constancy check on lambda.
    """
    conf = conformal_classify(f, points)
    if conf.conformal_class not in (ConformalClass.ISOMETRY, ConformalClass.HOMOTHETY):
        raise InputError(f"map must be conformal with constant factor, got {conf.conformal_class.value}")
    lam = float(np.mean(conf.lam))
    p = points[0]
    bs = bundle_at(f.source, p)
    bt = bundle_at(f.target, f.map_point(p))
    J = f.source.J
    Jf = f.jacobian(p)
    thresh = 1e-8 * (1.0 + aux_norm(bs.R))
    for k in range(1, max_samples + 1):
        xi = sample_isotropic(bs.g, rng)
        Jxi = J @ xi
        r = apply4(bs.R, xi, Jxi, Jxi, xi)
        if abs(r) > thresh * aux_norm(xi) ** 4:
            break
    else:
        raise NoUsableSampleError("no usable isotropic xi with R(xi,Jxi,Jxi,xi) != 0")
    rb = apply4(bt.R, Jf @ xi, Jf @ Jxi, Jf @ Jxi, Jf @ xi)
    r1 = rb / r
    return CorollaryReport(
        lam, r1, abs(r1 - lam), abs(r1 - lam * lam), abs(lam - 1.0) <= 1e-6, k
    )


# ---------------------------------------------------------------------------
# Null-cone preservation for linear maps
# ---------------------------------------------------------------------------


@dataclass
class NullConeProbe:
    violated: bool
    samples_used: int
    max_defect: float


def null_cone_probe(
    A: np.ndarray,
    g: np.ndarray,
    rng: np.random.Generator,
    max_samples: int = 500,
    threshold: float = 1e-6,
    gbar: Optional[np.ndarray] = None,
) -> NullConeProbe:
    """Sample null vectors xi of g and look for one with gbar(A xi, A xi) != 0.

    Stops at the first violation above ``threshold`` (relative to |xi|^2).
    """
    gbar = g if gbar is None else gbar
    worst = 0.0
    for k in range(1, max_samples + 1):
        xi = sample_isotropic(g, rng)
        Ax = A @ xi
        d = abs(inner(gbar, Ax, Ax)) / aux_norm(xi) ** 2
        worst = max(worst, d)
        if d > threshold:
            return NullConeProbe(True, k, worst)
    return NullConeProbe(False, max_samples, worst)


def homothety_defect(A: np.ndarray, g: np.ndarray, gbar: Optional[np.ndarray] = None) -> float:
    """Distance of A^T gbar A from the best multiple of g (relative)."""
    gbar = g if gbar is None else gbar
    P = A.T @ gbar @ A
    lam = float(np.sum(P * g) / np.sum(g * g))
    return aux_norm(P - lam * g) / (1.0 + aux_norm(P))
