"""Property-based acceptance suites.

Each suite draws everything from a seeded generator and returns its worst
observed defects next to the thresholds, so a run is reproducible to the
last bit and reports no timings.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np

from . import diffeo as dm
from . import exprlang
from . import structure as st
from . import zoo
from .curvature import (
    bochner_at,
    bundle_at,
    holomorphic_sectional,
    sectional_curvature,
    weyl_at,
)
from .diffeo import DiffeoMap
from .errors import DenominatorZeroError
from .geometry import (
    PlaneClass,
    aux_norm,
    classify_plane,
    frame_trace,
    inner,
    orthonormal_frame,
    phi_build,
    pi1_build,
    pi2_build,
    psi_build,
)


@dataclass
class Check:
    name: str
    value: float
    threshold: float
    relation: str = "<="  # value <= threshold, or ">=" for lower bounds

    @property
    def passed(self) -> bool:
        if math.isnan(self.value):
            return False
        if self.relation == "<=":
            return self.value <= self.threshold
        return self.value >= self.threshold

    def as_dict(self) -> dict:
        return {
            "name": self.name,
            "value": self.value,
            "relation": self.relation,
            "threshold": self.threshold,
            "passed": self.passed,
        }


@dataclass
class SuiteResult:
    name: str
    description: str
    checks: list[Check] = field(default_factory=list)
    notes: list[str] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return bool(self.checks) and all(c.passed for c in self.checks)

    def at_most(self, name: str, value: float, threshold: float) -> None:
        self.checks.append(Check(name, float(value), threshold, "<="))

    def at_least(self, name: str, value: float, threshold: float) -> None:
        self.checks.append(Check(name, float(value), threshold, ">="))

    def as_dict(self) -> dict:
        return {
            "name": self.name,
            "description": self.description,
            "passed": self.passed,
            "checks": [c.as_dict() for c in self.checks],
            "notes": self.notes,
        }


def _rng(seed: int, key: int) -> np.random.Generator:
    return np.random.default_rng([key, seed])


def _worst(values) -> float:
    return float(max(values, default=0.0))


# ---------------------------------------------------------------------------
# 1. curvature symmetries
# ---------------------------------------------------------------------------


def suite_symmetries(seed: int) -> SuiteResult:
    res = SuiteResult("symmetries", "Riemann symmetries, first and second Bianchi on every zoo manifold")
    rng = _rng(seed, 1)
    algebraic, bianchi2 = [], []
    for mid in zoo.MANIFOLDS:
        m = zoo.instantiate_model(mid)
        for p in zoo.sample_points(mid, rng, 10):
            b = bundle_at(m, p)
            algebraic.append(max(b.symmetry_defects().values()))
            bianchi2.append(b.second_bianchi_defect())
    res.at_most("algebraic_symmetries_and_first_bianchi", _worst(algebraic), 1e-10)
    res.at_most("second_bianchi", _worst(bianchi2), 1e-8)
    res.notes.append(f"{len(zoo.MANIFOLDS)} manifolds x 10 points")
    return res


# ---------------------------------------------------------------------------
# 2. anchors
# ---------------------------------------------------------------------------


def _random_nondegenerate_plane(g, rng):
    n = g.shape[0]
    while True:
        x, y = rng.standard_normal(n), rng.standard_normal(n)
        if classify_plane(g, x, y) is PlaneClass.NONDEGENERATE:
            return x, y


def suite_anchors(seed: int) -> SuiteResult:
    res = SuiteResult("anchors", "flat models vanish; constant-curvature model has K = 1 and tau = 12")
    rng = _rng(seed, 2)
    flat_worst = 0.0
    for mid, params in (("flat", {"n": 4, "nu": 1}), ("flat", {"n": 4, "nu": 2}), ("flat_kaehler", {})):
        m = zoo.instantiate_model(mid, **params)
        for p in zoo.sample_points(mid, rng, 5, **params):
            b = bundle_at(m, p)
            flat_worst = max(flat_worst, aux_norm(b.R), aux_norm(b.S), abs(b.tau))
    res.at_most("flat_R_S_tau", flat_worst, 1e-12)

    m = zoo.const_curv(4, 1, 1.0)
    points = zoo.sample_points("const_curv", rng, 10)
    k_err, tau_err = 0.0, 0.0
    for s in range(200):
        b = bundle_at(m, points[s % len(points)])
        x, y = _random_nondegenerate_plane(b.g, rng)
        k_err = max(k_err, abs(sectional_curvature(b, x, y) - 1.0))
    for p in points:
        b = bundle_at(m, p)
        frame = orthonormal_frame(b.g)
        ricci = frame_trace(b.R, frame)
        tau = float(np.einsum("a,ja,ka,jk->", frame.signs, frame.vectors, frame.vectors, ricci))
        tau_err = max(tau_err, abs(tau - 12.0))
    res.at_most("sectional_curvature_minus_1", k_err, 1e-8)
    res.at_most("frame_scalar_curvature_minus_12", tau_err, 1e-7)
    return res


# ---------------------------------------------------------------------------
# 3. algebraic operators
# ---------------------------------------------------------------------------


def random_metric(rng: np.random.Generator, n: int, nu: int) -> np.ndarray:
    """P^T eta P for a random well-conditioned P."""
    eta = np.diag([-1.0] * nu + [1.0] * (n - nu))
    P = np.eye(n) + 0.4 * rng.standard_normal((n, n))
    return P.T @ eta @ P


def random_symmetric(rng: np.random.Generator, n: int) -> np.ndarray:
    A = rng.standard_normal((n, n))
    return A + A.T


def psi_reference(g: np.ndarray, J: np.ndarray, Q: np.ndarray) -> np.ndarray:
    """psi(Q) evaluated term by term on basis vectors."""
    n = g.shape[0]
    E = np.eye(n)
    G = lambda a, b: inner(g, a, J @ b)  # noqa: E731
    H = lambda a, b: inner(Q, a, J @ b)  # noqa: E731
    out = np.empty((n,) * 4)
    for i, j, k, l in itertools.product(range(n), repeat=4):
        x, y, z, u = E[i], E[j], E[k], E[l]
        out[i, j, k, l] = (
            G(x, u) * H(y, z) - G(x, z) * H(y, u) - 2 * G(x, y) * H(z, u)
            + G(y, z) * H(x, u) - G(y, u) * H(x, z) - 2 * G(z, u) * H(x, y)
        )
    return out


def _hermitian_metric(rng, J, n, nu):
    g = random_metric(rng, n, nu)
    return 0.5 * (g + J.T @ g @ J)


def suite_operators(seed: int) -> SuiteResult:
    res = SuiteResult("operators", "phi, psi, pi1, pi2 identities and trace-freeness of Weyl and Bochner")
    rng = _rng(seed, 3)
    phi_g, psi_ref, pi2_ref, pi2_hol, tr_pi1, tr_phi = [], [], [], [], [], []
    J4 = zoo.flat_kaehler(2, 1).J
    for _ in range(20):
        n, nu = 4, int(rng.integers(0, 5))
        g = random_metric(rng, n, nu)
        Q = random_symmetric(rng, n)
        scale = 1.0 + aux_norm(g) ** 2
        phi_g.append(aux_norm(phi_build(g, g) - 2.0 * pi1_build(g)) / scale)
        frame = orthonormal_frame(g)
        tr_pi1.append(aux_norm(frame_trace(pi1_build(g), frame) - (n - 1) * g) / scale)
        tr_Q = float(np.sum(np.linalg.inv(g) * Q))
        expected = (n - 2) * Q + tr_Q * g
        tr_phi.append(aux_norm(frame_trace(phi_build(g, Q), frame) - expected) / (1.0 + aux_norm(expected)))

        gh = _hermitian_metric(rng, J4, n, 2 * int(rng.integers(0, 3)))
        ref = psi_reference(gh, J4, Q)
        psi_ref.append(aux_norm(psi_build(gh, J4, Q) - ref) / (1.0 + aux_norm(ref)))
        ref2 = 0.5 * psi_reference(gh, J4, gh)
        pi2_ref.append(aux_norm(pi2_build(gh, J4) - ref2) / (1.0 + aux_norm(ref2)))
        x = rng.standard_normal(n)
        Jx = J4 @ x
        pi2_val = float(np.einsum("ijkl,i,j,k,l->", pi2_build(gh, J4), x, Jx, Jx, x))
        pi2_hol.append(abs(pi2_val - 3.0 * inner(gh, x, x) ** 2) / (1.0 + abs(pi2_val)))
    res.at_most("phi(g) - 2 pi1", _worst(phi_g), 1e-8)
    res.at_most("psi vs termwise reference", _worst(psi_ref), 1e-8)
    res.at_most("pi2 - psi(g)/2 termwise", _worst(pi2_ref), 1e-8)
    res.at_most("pi2(x,Jx,Jx,x) - 3 g(x,x)^2", _worst(pi2_hol), 1e-8)
    res.at_most("frame trace pi1 - (n-1) g", _worst(tr_pi1), 1e-8)
    res.at_most("frame trace phi(Q) - ((n-2)Q + tr Q g)", _worst(tr_phi), 1e-8)

    weyl_tr = []
    for k in range(4):
        m = zoo.random_poly(4, 1 + k % 2, seed=seed * 10 + k)
        for p in zoo.sample_points("random_poly", rng, 2):
            b = bundle_at(m, p)
            W = weyl_at(b)
            weyl_tr.append(aux_norm(np.einsum("il,ijkl->jk", b.g_inv, W)) / (1.0 + aux_norm(b.R)))
    res.at_most("Weyl trace", _worst(weyl_tr), 1e-8)

    bochner_tr = []
    kaehler_models = [
        zoo.kaehler_product(*rng.uniform(0.5, 3.0, size=2), -1, 1),
        zoo.kaehler_product(*rng.uniform(-3.0, -0.5, size=2), 1, 1),
        zoo.const_hol(float(rng.uniform(-3, 3)), 2, 1),
        zoo.const_hol(float(rng.uniform(-3, 3)), 3, 1),
    ]
    for m in kaehler_models:
        for _ in range(2):
            p = rng.uniform(-0.2, 0.2, size=m.dim)
            b = bundle_at(m, p)
            B = bochner_at(b, m.J)
            bochner_tr.append(aux_norm(np.einsum("il,ijkl->jk", b.g_inv, B)) / (1.0 + aux_norm(b.R)))
    res.at_most("Bochner trace", _worst(bochner_tr), 1e-8)
    return res


# ---------------------------------------------------------------------------
# 4. conformal covariance
# ---------------------------------------------------------------------------


def suite_conformal(seed: int) -> SuiteResult:
    res = SuiteResult("conformal", "Weyl(exp(2s) g) = exp(2s) Weyl(g); conformally flat family has Weyl = 0")
    rng = _rng(seed, 4)
    cov = []
    base = zoo.random_poly(4, 1, seed=seed)
    for _ in range(3):
        sigma_text = zoo.random_sigma(base.coords, rng)
        sigma = exprlang.parse_expr(sigma_text, base.coords)
        mbar = dm.conformal_rescale(base, sigma)
        for p in zoo.sample_points("random_poly", rng, 2):
            W, Wb = weyl_at(bundle_at(base, p)), weyl_at(bundle_at(mbar, p))
            e2 = math.exp(2.0 * exprlang.eval_expr(sigma, p))
            cov.append(aux_norm(Wb - e2 * W) / (1.0 + aux_norm(Wb)))
    res.at_most("Weyl covariance", _worst(cov), 1e-7)
    cf = []
    for name in zoo.SIGMAS:
        for nu in (1, 2):
            m = zoo.conformal_flat(name, nu)
            for p in zoo.sample_points("conformal_flat", rng, 2):
                cf.append(st.conformally_flat_defect(bundle_at(m, p)))
    res.at_most("conformally_flat_defect", _worst(cf), 1e-8)
    return res


# ---------------------------------------------------------------------------
# 5. quasi-constant curvature
# ---------------------------------------------------------------------------


def _g_orthogonal_complement(g, V):
    """Basis of the g-orthogonal complement of V (columns)."""
    _, _, vh = np.linalg.svd((g @ V)[None, :])
    return vh[1:].T


def _aux_angle(a, b) -> float:
    c = abs(float(a @ b)) / (np.linalg.norm(a) * np.linalg.norm(b))
    return math.acos(min(1.0, c))


def suite_quasi_constant(seed: int) -> SuiteResult:
    res = SuiteResult("quasi_constant", "exp(2 x1) eta is quasi-constant with V along grad sigma")
    rng = _rng(seed, 5)
    m = zoo.conformal_flat("linear_x1", 1)
    status_ok = True
    resid, angle, h_err, n_err = [], [], [], []
    for p in zoo.sample_points("conformal_flat", rng, 5):
        b = bundle_at(m, p)
        fit = st.quasi_constant_fit(b)
        if fit.status is not st.QuasiConstantStatus.OK:
            status_ok = False
            continue
        resid.append(fit.residual)
        grad = np.linalg.solve(b.g, np.array([0.0, 1.0, 0.0, 0.0]))  # d(x1)
        angle.append(_aux_angle(fit.V, grad))
        perp = _g_orthogonal_complement(b.g, fit.V)
        for _ in range(5):
            x, y = perp @ rng.standard_normal(3), perp @ rng.standard_normal(3)
            if classify_plane(b.g, x, y) is PlaneClass.NONDEGENERATE:
                h_err.append(abs(sectional_curvature(b, x, y) - fit.H))
            w = perp @ rng.standard_normal(3)
            if classify_plane(b.g, fit.V, w) is PlaneClass.NONDEGENERATE:
                n_err.append(abs(sectional_curvature(b, fit.V, w) - fit.N))
    res.at_least("status_ok", 1.0 if status_ok else 0.0, 1.0)
    res.at_most("residual", _worst(resid), 1e-7)
    res.at_most("V angle to grad sigma", _worst(angle), 1e-6)
    res.at_most("H vs perpendicular planes", _worst(h_err), 1e-7)
    res.at_most("N vs planes containing V", _worst(n_err), 1e-7)
    res.at_least("planes_checked", float(min(len(h_err), len(n_err))), 10.0)
    return res


# ---------------------------------------------------------------------------
# 6. K*_n
# ---------------------------------------------------------------------------


def suite_kn_star(seed: int) -> SuiteResult:
    res = SuiteResult("kn_star", "pp-waves: A(u)=u recurrent, A(u)=1 symmetric of Walker type with v=u")
    rng = _rng(seed, 6)
    rec = zoo.pp_wave("u")
    sym = zoo.pp_wave("1", "u")
    points = zoo.sample_points("pp_wave", rng, 5)
    fits = [st.kn_star_classify(rec, p) for p in points]
    res.at_least("recurrent_count", sum(f.kn_class is st.KnStarClass.RECURRENT for f in fits), 5)
    res.at_most("recurrence_residual", _worst(f.residual for f in fits), 1e-7)
    fits = [st.kn_star_classify(sym, p) for p in points]
    res.at_least("symmetric_walker_count", sum(f.kn_class is st.KnStarClass.SYMMETRIC_WALKER for f in fits), 5)
    res.at_most("walker_cyclic_defect", _worst(f.residual for f in fits), 1e-8)
    return res


# ---------------------------------------------------------------------------
# 7. Kaehler
# ---------------------------------------------------------------------------


def suite_kaehler(seed: int) -> SuiteResult:
    res = SuiteResult("kaehler", "Kaehler models pass all defects; the Hermitian witness has d Phi = 2 exp(2 x3)")
    rng = _rng(seed, 7)
    worst = 0.0
    for mid in ("flat_kaehler", "const_hol", "kaehler_product"):
        m = zoo.instantiate_model(mid)
        rep = st.kaehler_check(m, zoo.sample_points(mid, rng, 5))
        worst = max(worst, max(rep.max_defects.values()))
    res.at_most("kaehler_defects", worst, 1e-8)
    m = zoo.hermitian_nonkaehler()
    rel = []
    for x3 in (0.0, 0.5):
        p = rng.uniform(-0.5, 0.5, size=4)
        p[2] = x3
        rep = st.kaehler_check(m, [p])
        hand = 2.0 * math.exp(2.0 * x3)
        rel.append(abs(rep.d_phi[0] - hand) / hand)
    res.at_most("witness d_phi relative to 2 exp(2 x3)", _worst(rel), 0.1)
    return res


# ---------------------------------------------------------------------------
# 8. constant holomorphic curvature
# ---------------------------------------------------------------------------


def suite_constant_hol(seed: int) -> SuiteResult:
    res = SuiteResult("constant_hol", "c = 2 model: H = 2, Bochner = 0 and the Bochner-zero identity")
    rng = _rng(seed, 8)
    m = zoo.const_hol(2.0, 2, 1)
    J = m.J
    points = zoo.sample_points("const_hol", rng, 5)
    h_err, ident, boch = [], [], []
    for p in points:
        boch.append(st.bochner_defect(bundle_at(m, p), J))
    count = 0
    while count < 100:
        b = bundle_at(m, points[count % len(points)])
        x = rng.standard_normal(4)
        # non-isotropic with a margin: H divides by g(x,x)^2
        if abs(inner(b.g, x, x)) < 1e-2 * float(x @ x):
            continue
        h_err.append(abs(holomorphic_sectional(b, J, x) - 2.0))
        ident.append(st.bochner_zero_hol_identity_defect(b, J, x))
        count += 1
    res.at_most("H - 2", _worst(h_err), 1e-8)
    res.at_most("bochner_defect", _worst(boch), 1e-8)
    res.at_most("bochner_zero_hol_identity_defect", _worst(ident), 1e-8)
    return res


# ---------------------------------------------------------------------------
# 9. null-cone lemma
# ---------------------------------------------------------------------------


def suite_null_cone(seed: int) -> SuiteResult:
    res = SuiteResult("null_cone", "non-conformal linear maps break the null cone; scaled isometries keep it")
    rng = _rng(seed, 9)
    eta = np.diag([-1.0, -1.0, 1.0, 1.0])
    exposed, worst_samples, min_hd = 0, 0, math.inf
    for _ in range(100):
        A = np.eye(4) + 0.5 * rng.standard_normal((4, 4))
        min_hd = min(min_hd, dm.homothety_defect(A, eta))
        probe = dm.null_cone_probe(A, eta, rng, max_samples=500)
        exposed += probe.violated
        worst_samples = max(worst_samples, probe.samples_used)
    res.at_least("non-conformal maps exposed (of 100)", exposed, 100)
    res.at_least("min homothety defect of the random maps", min_hd, 1e-6)
    res.notes.append(f"most samples needed: {worst_samples}")
    kept = 0.0
    for k in range(10):
        A = float(rng.uniform(0.3, 3.0)) * zoo.pseudo_orthogonal_matrix(4, 2, seed=seed * 100 + k)
        probe = dm.null_cone_probe(A, eta, rng, max_samples=500, threshold=1e-10)
        kept = max(kept, probe.max_defect)
    res.at_most("scaled isometry null defect", kept, 1e-10)
    return res


# ---------------------------------------------------------------------------
# 10. limits
# ---------------------------------------------------------------------------


def _limit_cases(seed: int) -> list[tuple[str, DiffeoMap, str, str]]:
    return [
        ("pseudo_orthogonal nu=1", zoo.pseudo_orthogonal("const_curv", 4, 1, seed), "plane_weak", "pseudo_orthogonal"),
        ("pseudo_orthogonal nu=1", zoo.pseudo_orthogonal("const_curv", 4, 1, seed), "ricci", "pseudo_orthogonal"),
        ("pseudo_orthogonal nu=2", zoo.pseudo_orthogonal("const_curv", 4, 2, seed), "plane_strong", "pseudo_orthogonal"),
        ("pair_rotation kaehler_product", zoo.pair_rotation("kaehler_product"), "plane_weak", "pair_rotation"),
        ("pair_rotation kaehler_product", zoo.pair_rotation("kaehler_product"), "plane_strong", "pair_rotation"),
        ("pair_rotation kaehler_product", zoo.pair_rotation("kaehler_product"), "ricci", "pair_rotation"),
        ("pair_rotation kaehler_product", zoo.pair_rotation("kaehler_product"), "holo", "pair_rotation"),
        ("pair_rotation const_hol", zoo.pair_rotation("const_hol"), "holo", "pair_rotation"),
    ]


def suite_limits(seed: int) -> SuiteResult:
    res = SuiteResult("limits", "isometries give limit 1 in every mode; gbar = 4g gives Ricci limit 1/4")
    rng = _rng(seed, 10)
    iso_err, evaluated, skipped, unconverged = 0.0, 0, 0, 0
    for label, f, mode, box_id in _limit_cases(seed):
        for p in zoo.sample_points(box_id, rng, 2):
            try:
                rep = dm.limit_ratio(f, mode, p, rng)
            except DenominatorZeroError:
                skipped += 1
                continue
            evaluated += 1
            unconverged += not rep.converged
            iso_err = max(iso_err, abs(rep.limit - 1.0))
    res.at_most("isometry |limit - 1|", iso_err, 1e-5)
    res.at_least("isometry limits evaluated", evaluated, 12)
    res.at_most("isometry limits not converged", unconverged, 0)
    res.notes.append(f"skipped for zero denominator: {skipped}")
    hom_err = 0.0
    for model in ("const_curv", "kaehler_product"):
        f = zoo.scaled_identity(model, k=4.0)
        for p in zoo.sample_points("scaled_identity", rng, 2):
            rep = dm.limit_ratio(f, "ricci", p, rng)
            hom_err = max(hom_err, abs(rep.limit - 0.25))
    res.at_most("homothety 4g |ricci limit - 0.25|", hom_err, 1e-4)
    return res


# ---------------------------------------------------------------------------
# 11. preservation
# ---------------------------------------------------------------------------


def suite_preservation(seed: int) -> SuiteResult:
    res = SuiteResult("preservation", "isometries preserve K and K_S; the dilation shifts K by 3/4")
    rng = _rng(seed, 11)
    worst = 0.0
    for f, box_id in (
        (zoo.pseudo_orthogonal("const_curv", 4, 1, seed), "pseudo_orthogonal"),
        (zoo.pair_rotation("kaehler_product"), "pair_rotation"),
        (zoo.lorentz_boost(0.7, "const_curv"), "lorentz_boost"),
    ):
        points = zoo.sample_points(box_id, rng, 4)
        for mode in ("sectional", "ricci_unit"):
            worst = max(worst, dm.preservation_defect(f, mode, rng, 100, points).defect)
    res.at_most("isometry preservation defect", worst, 1e-8)
    f = zoo.dilation(2.0, 4, 1, 1.0)
    rep = dm.preservation_defect(f, "sectional", rng, 100, zoo.sample_points("dilation", rng, 4))
    res.at_most("dilation |defect - 0.75|", abs(rep.defect - 0.75), 1e-6)
    return res


# ---------------------------------------------------------------------------
# 12. identity and corollary checks
# ---------------------------------------------------------------------------


def suite_identities(seed: int) -> SuiteResult:
    res = SuiteResult("identities", "conformal identities vanish for trivial sigma; corollary separates lambda from lambda^2")
    rng = _rng(seed, 12)
    worst = 0.0
    cases = [(mid, "0") for mid in ("const_curv", "conformal_flat", "random_poly", "kaehler_product", "pp_wave")]
    cases += [("flat", zoo._fmt(float(rng.uniform(-1, 1)))) for _ in range(3)]
    for mid, sigma in cases:
        m = zoo.instantiate_model(mid)
        for p in zoo.sample_points(mid, rng, 2):
            rep = dm.theorem1_identities_defect(m, sigma, p)
            worst = max(worst, rep.d22, rep.dR)
    res.at_most("identity defects for zero/constant sigma", worst, 1e-10)
    f = zoo.pair_rotation("kaehler_product")
    points = zoo.sample_points("pair_rotation", rng, 3)
    iso = dm.corollary_lambda_check(f, points, rng)
    res.at_most("isometry |lambda - 1|", abs(iso.lam - 1.0), 1e-6)
    res.at_most("isometry |r1 - lambda|", iso.defect_lambda, 1e-6)
    res.at_most("isometry |r1 - lambda^2|", iso.defect_lambda_sq, 1e-6)
    hom = dm.corollary_lambda_check(zoo.scaled_identity("kaehler_product", k=4.0), points, rng)
    res.at_least("homothety |r1 - lambda^2|", hom.defect_lambda_sq, 1.0)
    return res


# ---------------------------------------------------------------------------
# zoo self-validation
# ---------------------------------------------------------------------------


def suite_zoo(seed: int) -> SuiteResult:
    res = SuiteResult("zoo", "every registry entry satisfies its declared properties")
    rng = _rng(seed, 13)
    failed = []
    total = 0
    for mid in zoo.REGISTRY:
        for r in zoo.validate_model(mid, rng, 3):
            total += 1
            if not r.passed:
                failed.append(f"{mid}:{r.check}")
    res.at_most("failed expectations", len(failed), 0)
    res.at_least("expectations checked", total, 30)
    res.notes.extend(failed)
    return res


SUITES: dict[str, Callable[[int], SuiteResult]] = {
    "symmetries": suite_symmetries,
    "anchors": suite_anchors,
    "operators": suite_operators,
    "conformal": suite_conformal,
    "quasi_constant": suite_quasi_constant,
    "kn_star": suite_kn_star,
    "kaehler": suite_kaehler,
    "constant_hol": suite_constant_hol,
    "null_cone": suite_null_cone,
    "limits": suite_limits,
    "preservation": suite_preservation,
    "identities": suite_identities,
    "zoo": suite_zoo,
}


def run_suites(names: Optional[Sequence[str]] = None, seed: int = 0) -> list[SuiteResult]:
    names = list(SUITES) if names is None else list(names)
    return [SUITES[name](seed) for name in names]
