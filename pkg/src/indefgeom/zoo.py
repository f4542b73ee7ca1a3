"""Built-in example manifolds and maps.

Each registry entry knows how to build itself from parameters, where its
chart is valid (a sampling box), and which structural properties it is
expected to have. The expected properties are checked by
:func:`validate_model`, so the registry doubles as a regression corpus.

Expectations are either analytic (forced by the construction) or
regression-locked (first computed by the engine, sanity-checked by hand,
then frozen as a bound).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Callable, Optional, Sequence, Union

import numpy as np
from scipy.linalg import expm

from . import exprlang
from .diffeo import DiffeoMap
from .errors import InputError
from .geometry import ChartManifold

SIGMAS = {
    "linear_x1": "x1",
    "sin_x1_x2": "sin(x1)*x2",
    "generic": "0.3*x1 + 0.2*sin(x2)*x3 - 0.1*t*x3",
    "exp_mix": "0.1*exp(0.5*t)*cos(x2) + 0.2*x1*x3",
    "poly": "0.15*t^2 - 0.1*x1*x2 + 0.05*x3^3",
}


@dataclass(frozen=True)
class Expectation:
    check: str
    params: dict = field(default_factory=dict)
    provenance: str = "analytic"


@dataclass(frozen=True)
class ModelSpec:
    id: str
    kind: str  # "manifold" or "map"
    description: str
    defaults: dict
    builder: Callable[..., Any]
    box: Callable[[dict], np.ndarray]
    expected: tuple = ()


def _fmt(v: float) -> str:
    return exprlang.render(exprlang.const(v))


def _signs(n: int, nu: int) -> list[int]:
    if not 0 <= nu <= n:
        raise InputError(f"signature index nu={nu} out of range for n={n}")
    return [-1] * nu + [1] * (n - nu)


def _coords(n: int) -> list[str]:
    return [f"x{i}" for i in range(n)]


def _diag(entries: Sequence[str]) -> list[list[str]]:
    n = len(entries)
    return [[entries[i] if i == j else "0" for j in range(n)] for i in range(n)]


def _quadratic(coords, signs) -> str:
    return " + ".join(f"{'-' if s < 0 else ''}{c}^2" for c, s in zip(coords, signs)).replace("+ -", "- ")


def _box(lo, hi):
    return lambda p: np.array([lo, hi], dtype=float)


# ---------------------------------------------------------------------------
# Manifolds
# ---------------------------------------------------------------------------


def flat(n: int = 4, nu: int = 1) -> ChartManifold:
    signs = _signs(n, nu)
    return ChartManifold.from_strings(f"flat_{n}_{nu}", _coords(n), _diag([str(s) for s in signs]))


def const_curv(n: int = 4, nu: int = 1, c: float = 1.0) -> ChartManifold:
    """g_ij = eps_i delta_ij / (1 + c/4 <x,x>)^2, sectional curvature c."""
    if c == 0:
        raise InputError("const_curv needs c != 0; use 'flat'")
    signs = _signs(n, nu)
    coords = _coords(n)
    conf = f"(1 + {_fmt(c / 4)}*({_quadratic(coords, signs)}))^2"
    return ChartManifold.from_strings(
        f"const_curv_{n}_{nu}_{c}", coords, _diag([f"{s}/{conf}" for s in signs])
    )


def sphere2() -> ChartManifold:
    return ChartManifold.from_strings("sphere2", ["th", "ph"], [["1", "0"], ["0", "sin(th)^2"]])


def s2xs2() -> ChartManifold:
    return ChartManifold.from_strings(
        "s2xs2", ["th1", "ph1", "th2", "ph2"], _diag(["1", "sin(th1)^2", "1", "sin(th2)^2"])
    )


def conformal_flat(sigma: str = "sin_x1_x2", nu: int = 1) -> ChartManifold:
    """exp(2 sigma) eta on coordinates (t, x1, x2, x3)."""
    coords = ["t", "x1", "x2", "x3"]
    text = SIGMAS.get(sigma, sigma)
    signs = _signs(4, nu)
    return ChartManifold.from_strings(
        f"conformal_flat[{text}]", coords, _diag([f"{s}*exp(2*({text}))" for s in signs])
    )


def pp_wave(profile: str = "u", recurrence_function: Optional[str] = None) -> ChartManifold:
    """2 du dv + A(u)(x^2 - y^2) du^2 + dx^2 + dy^2."""
    if profile not in ("1", "u"):
        raise InputError("pp_wave profile must be '1' or 'u'")
    h = f"{profile}*(x^2 - y^2)" if profile != "1" else "x^2 - y^2"
    metric = [[h, "1", "0", "0"], ["1", "0", "0", "0"], ["0", "0", "1", "0"], ["0", "0", "0", "1"]]
    if recurrence_function is None and profile == "1":
        recurrence_function = "u"
    return ChartManifold.from_strings(
        f"pp_wave[A={profile}]", ["u", "v", "x", "y"], metric, recurrence_function=recurrence_function
    )


def _kaehler_coords(m: int) -> tuple[list[str], list[tuple[int, int]]]:
    coords = [f"{a}{k}" for k in range(1, m + 1) for a in ("x", "y")]
    return coords, [(2 * k, 2 * k + 1) for k in range(m)]


def flat_kaehler(m: int = 2, nu_c: int = 1) -> ChartManifold:
    coords, pairs = _kaehler_coords(m)
    signs = [s for s in _signs(m, nu_c) for _ in range(2)]
    return ChartManifold.from_strings(
        f"flat_kaehler_{m}_{nu_c}", coords, _diag([str(s) for s in signs]), pairs=pairs
    )


def const_hol(c: float = 2.0, m: int = 2, nu_c: int = 1) -> ChartManifold:
    """Complex space form of holomorphic curvature c.

    Real form of the Hermitian metric h = dd-bar of (4/c) log(1 + (c/4) rho),
    rho = sum eps_a |z_a|^2, written as g(x_a,x_b) = g(y_a,y_b) = P_ab,
    g(x_a,y_b) = Q_ab with
        P_ab = eps_a delta_ab / D - s eps_a eps_b (x_a x_b + y_a y_b) / D^2
        Q_ab = -s eps_a eps_b (x_a y_b - y_a x_b) / D^2,   D = 1 + s rho, s = c/4.
    Valid where D > 0.
    """
    coords, pairs = _kaehler_coords(m)
    eps = _signs(m, nu_c)
    s = _fmt(c / 4)
    xs = [f"x{k}" for k in range(1, m + 1)]
    ys = [f"y{k}" for k in range(1, m + 1)]
    rho = " + ".join(f"{'-' if e < 0 else ''}({x}^2 + {y}^2)" for e, x, y in zip(eps, xs, ys))
    rho = rho.replace("+ -", "- ")
    D = f"(1 + {s}*({rho}))"

    def P(a, b):
        out = f"-{s}*{eps[a] * eps[b]}*({xs[a]}*{xs[b]} + {ys[a]}*{ys[b]})/{D}^2"
        if a == b:
            out = f"{eps[a]}/{D} " + out
        return out

    def Q(a, b):
        if a == b:
            return "0"
        return f"-{s}*{eps[a] * eps[b]}*({xs[a]}*{ys[b]} - {ys[a]}*{xs[b]})/{D}^2"

    n = 2 * m
    metric = [["0"] * n for _ in range(n)]
    for a in range(m):
        for b in range(m):
            metric[2 * a][2 * b] = P(a, b)
            metric[2 * a + 1][2 * b + 1] = P(a, b)
            metric[2 * a][2 * b + 1] = Q(a, b)
            metric[2 * b + 1][2 * a] = Q(a, b)
    return ChartManifold.from_strings(f"const_hol_{c}_{m}_{nu_c}", coords, metric, pairs=pairs)


def kaehler_product(c1: float = 1.0, c2: float = 3.0, eps1: int = -1, eps2: int = 1) -> ChartManifold:
    """Product of two conformal 2-dim blocks eps (dx^2+dy^2)/(1 + c/4 (x^2+y^2))^2."""
    coords, pairs = _kaehler_coords(2)
    blocks = []
    for c, e, k in ((c1, eps1, 1), (c2, eps2, 2)):
        blocks.append(f"{e}/(1 + {_fmt(c / 4)}*(x{k}^2 + y{k}^2))^2")
    return ChartManifold.from_strings(
        f"kaehler_product_{c1}_{c2}", coords,
        _diag([blocks[0], blocks[0], blocks[1], blocks[1]]), pairs=pairs,
    )


def hermitian_nonkaehler() -> ChartManifold:
    """exp(2 x3)(dx1^2 + dx2^2) + dx3^2 + dx4^2, J on (x1,x2), (x3,x4)."""
    return ChartManifold.from_strings(
        "hermitian_nonkaehler", ["x1", "x2", "x3", "x4"],
        _diag(["exp(2*x3)", "exp(2*x3)", "1", "1"]), pairs=[(0, 1), (2, 3)],
    )


def random_poly(n: int = 4, nu: int = 1, seed: int = 0, amp: float = 0.15) -> ChartManifold:
    """eta + quadratic polynomial perturbation with seeded coefficients.

    A generic curved metric: not Einstein, not conformally flat. Entries stay
    within ``amp * (n + n^2)`` of eta on the unit box, so the metric is
    nonsingular there for the default amplitude.
    """
    rng = np.random.default_rng(seed)
    coords = _coords(n)
    signs = _signs(n, nu)
    rows = [["0"] * n for _ in range(n)]
    for i in range(n):
        for j in range(i, n):
            terms = [str(signs[i])] if i == j else []
            for k in range(n):
                terms.append(f"{_fmt(amp * rng.uniform(-1, 1))}*{coords[k]}")
            for k in range(n):
                for l in range(k, n):
                    terms.append(f"{_fmt(amp * rng.uniform(-1, 1) / n)}*{coords[k]}*{coords[l]}")
            rows[i][j] = rows[j][i] = " + ".join(terms)
    return ChartManifold.from_strings(f"random_poly[{seed}]", coords, rows)


def random_sigma(coords: Sequence[str], rng: np.random.Generator) -> str:
    """Random smooth conformal exponent mixing polynomial, trigonometric and exponential terms."""
    a = rng.uniform(-0.4, 0.4, size=5)
    i, j, k, l = rng.integers(0, len(coords), size=4)
    c = coords
    return (
        f"{_fmt(a[0])}*{c[i]} + {_fmt(a[1])}*sin({c[j]})*{c[k]}"
        f" + {_fmt(a[2])}*exp({_fmt(a[3])}*{c[l]}) + {_fmt(a[4])}*{c[i]}*{c[l]}"
    )


# ---------------------------------------------------------------------------
# Maps
# ---------------------------------------------------------------------------


def _linear_components(A: np.ndarray, coords: Sequence[str]) -> list[str]:
    rows = []
    for i in range(A.shape[0]):
        terms = [f"{_fmt(A[i, j])}*{c}" for j, c in enumerate(coords) if A[i, j] != 0.0]
        rows.append(" + ".join(terms).replace("+ -", "- ") if terms else "0")
    return rows


def linear_map(A: np.ndarray, source: ChartManifold, target: Optional[ChartManifold] = None, name="linear"):
    target = target or source
    A = np.asarray(A, dtype=float)
    inv = np.linalg.inv(A)
    return DiffeoMap.from_strings(
        source, target, _linear_components(A, source.coords),
        _linear_components(inv, target.coords), name=name,
    )


def _source_model(model: str, params: dict) -> ChartManifold:
    if model not in MANIFOLDS:
        raise InputError(f"unknown source model {model!r}")
    return instantiate_model(model, **params)


def identity_map(model: str = "const_curv", params: Optional[dict] = None) -> DiffeoMap:
    m = _source_model(model, params or {})
    return linear_map(np.eye(m.dim), m, name=f"identity[{m.name}]")


def scaled_identity(model: str = "const_curv", params: Optional[dict] = None, k: float = 4.0) -> DiffeoMap:
    """Identity chart map into the same chart with metric k*g."""
    m = _source_model(model, params or {})
    kc = exprlang.const(k)
    metric = tuple(tuple(exprlang.mul(kc, e) for e in row) for row in m.metric)
    target = ChartManifold(f"{m.name}*{k}", m.coords, metric, m.complex_structure, m.recurrence_function)
    return linear_map(np.eye(m.dim), m, target, name=f"scaled_identity[{k}]")


def dilation(s: float = 2.0, n: int = 4, nu: int = 1, c: float = 1.0) -> DiffeoMap:
    """x -> s x from the curvature-c model onto the curvature-c/s^2 model (f* gbar = s^2 g)."""
    src = const_curv(n, nu, c) if c else flat(n, nu)
    tgt = const_curv(n, nu, c / s**2) if c else flat(n, nu)
    return linear_map(s * np.eye(n), src, tgt, name=f"dilation[{s}]")


def pseudo_orthogonal_matrix(n: int, nu: int, seed: int = 0, scale: float = 0.5) -> np.ndarray:
    """exp(eta K) with K antisymmetric, so A^T eta A = eta."""
    rng = np.random.default_rng(seed)
    eta = np.diag(_signs(n, nu)).astype(float)
    K = rng.standard_normal((n, n)) * scale
    K = K - K.T
    return expm(eta @ K)


def pseudo_orthogonal(
    model: str = "const_curv", n: int = 4, nu: int = 1, seed: int = 0, c: float = 1.0
) -> DiffeoMap:
    if model == "const_curv":
        m = const_curv(n, nu, c)
    elif model == "flat":
        m = flat(n, nu)
    else:
        raise InputError("pseudo_orthogonal acts on 'flat' or 'const_curv'")
    A = pseudo_orthogonal_matrix(n, nu, seed)
    return linear_map(A, m, name=f"pseudo_orthogonal[{seed}]")


def lorentz_boost(rapidity: float = 0.7, model: str = "flat", n: int = 4, c: float = 1.0) -> DiffeoMap:
    m = const_curv(n, 1, c) if model == "const_curv" else flat(n, 1)
    A = np.eye(n)
    ch, sh = np.cosh(rapidity), np.sinh(rapidity)
    A[0, 0] = A[1, 1] = ch
    A[0, 1] = A[1, 0] = sh
    return linear_map(A, m, name=f"lorentz_boost[{rapidity}]")


def inversion(n: int = 4, nu: int = 1) -> DiffeoMap:
    """x -> x / <x,x>_eps on flat space minus the null cone; f* eta = <x,x>^-2 eta."""
    m = flat(n, nu)
    q = _quadratic(m.coords, _signs(n, nu))
    comps = [f"{c}/({q})" for c in m.coords]
    return DiffeoMap.from_strings(m, m, comps, comps, name="inversion")


def random_linear(n: int = 4, nu: int = 2, seed: int = 0) -> DiffeoMap:
    rng = np.random.default_rng(seed)
    A = np.eye(n) + 0.5 * rng.standard_normal((n, n))
    return linear_map(A, flat(n, nu), name=f"random_linear[{seed}]")


def pair_rotation(model: str = "const_hol", params: Optional[dict] = None, angles=(0.4, -1.1)) -> DiffeoMap:
    """Rotate every complex coordinate by its own phase; commutes with J."""
    m = _source_model(model, params or {})
    A = np.zeros((m.dim, m.dim))
    for k, (a, b) in enumerate(m.complex_structure.pairs):
        th = angles[k % len(angles)]
        A[a, a] = A[b, b] = np.cos(th)
        A[b, a] = np.sin(th)
        A[a, b] = -np.sin(th)
    return linear_map(A, m, name="pair_rotation")


def nonholomorphic_linear(model: str = "flat_kaehler", params: Optional[dict] = None) -> DiffeoMap:
    """Conjugate the first complex coordinate only: an isometry that is neither
    holomorphic nor antiholomorphic."""
    m = _source_model(model, params or {})
    A = np.eye(m.dim)
    a, b = m.complex_structure.pairs[0]
    A[b, b] = -1.0
    return linear_map(A, m, name="partial_conjugation")


# ---------------------------------------------------------------------------
# Registry
# ---------------------------------------------------------------------------

_E = Expectation

MANIFOLDS: dict[str, ModelSpec] = {
    "flat": ModelSpec(
        "flat", "manifold", "flat R^n_nu with diagonal eta (negatives first)",
        {"n": 4, "nu": 1}, flat, _box(-1.0, 1.0),
        (_E("riemann_zero"), _E("einstein", {"max": 1e-12}), _E("signature")),
    ),
    "const_curv": ModelSpec(
        "const_curv", "manifold", "conformally flat model of constant sectional curvature c",
        {"n": 4, "nu": 1, "c": 1.0}, const_curv, _box(-0.5, 0.5),
        (_E("constant_curvature", {"c_key": "c", "max": 1e-8}), _E("einstein", {"max": 1e-9}),
         _E("conformally_flat", {"max": 1e-9}), _E("nabla_R_zero", {"max": 1e-8}), _E("signature")),
    ),
    "sphere2": ModelSpec(
        "sphere2", "manifold", "unit round sphere, polar chart", {}, sphere2,
        lambda p: np.array([[0.5, -1.0], [2.5, 1.0]]),
        (_E("constant_curvature", {"c": 1.0, "max": 1e-9}),),
    ),
    "s2xs2": ModelSpec(
        "s2xs2", "manifold", "product of two unit spheres (not conformally flat)", {}, s2xs2,
        lambda p: np.array([[0.5, -1.0, 0.5, -1.0], [2.5, 1.0, 2.5, 1.0]]),
        (_E("not_conformally_flat", {"min": 0.01}, "regression-locked"),
         _E("not_constant_curvature", {"min": 0.1}, "regression-locked")),
    ),
    "conformal_flat": ModelSpec(
        "conformal_flat", "manifold", "exp(2 sigma) eta with sigma from a named list or an expression",
        {"sigma": "sin_x1_x2", "nu": 1}, conformal_flat, _box(-0.5, 0.5),
        (_E("conformally_flat", {"max": 1e-8}), _E("signature")),
    ),
    "pp_wave": ModelSpec(
        "pp_wave", "manifold", "plane wave 2dudv + A(u)(x^2-y^2)du^2 + dx^2 + dy^2, A in {1, u}",
        {"profile": "u"}, pp_wave,
        lambda p: np.array([[1.0, -1.0, -1.0, -1.0], [3.0, 1.0, 1.0, 1.0]]),
        (_E("kn_star", {}), _E("signature", {"nu": 1})),
    ),
    "flat_kaehler": ModelSpec(
        "flat_kaehler", "manifold", "flat indefinite Kaehler C^m with nu_c negative complex directions",
        {"m": 2, "nu_c": 1}, flat_kaehler, _box(-1.0, 1.0),
        (_E("kaehler", {"max": 1e-12}), _E("riemann_zero")),
    ),
    "const_hol": ModelSpec(
        "const_hol", "manifold", "indefinite complex space form of holomorphic curvature c",
        {"c": 2.0, "m": 2, "nu_c": 1}, const_hol, _box(-0.4, 0.4),
        (_E("kaehler", {"max": 1e-8}), _E("constant_hol", {"c_key": "c", "max": 1e-8}),
         _E("bochner_zero", {"max": 1e-8})),
    ),
    "kaehler_product": ModelSpec(
        "kaehler_product", "manifold", "product of two conformal 2-dim blocks with unequal curvatures",
        {"c1": 1.0, "c2": 3.0, "eps1": -1, "eps2": 1}, kaehler_product, _box(-0.5, 0.5),
        (_E("kaehler", {"max": 1e-9}), _E("bochner_nonzero", {"min": 1e-3}, "regression-locked"),
         _E("not_constant_hol", {"min": 0.01}, "regression-locked")),
    ),
    "hermitian_nonkaehler": ModelSpec(
        "hermitian_nonkaehler", "manifold", "Hermitian but not Kaehler: exp(2x3)(dx1^2+dx2^2)+dx3^2+dx4^2",
        {}, hermitian_nonkaehler, _box(-0.5, 0.5),
        (_E("hermitian", {"max": 1e-12}), _E("not_kaehler_dphi", {}),),
    ),
    "random_poly": ModelSpec(
        "random_poly", "manifold", "eta plus a seeded quadratic perturbation (generic curved metric)",
        {"n": 4, "nu": 1, "seed": 0, "amp": 0.15}, random_poly, _box(-0.5, 0.5),
        (
            _E("signature", {}),
            _E("not_conformally_flat", {"min": 1e-3}, "regression-locked"),
            _E("not_constant_curvature", {"min": 1e-3}, "regression-locked"),
        ),
    ),
}

MAPS: dict[str, ModelSpec] = {
    "identity": ModelSpec(
        "identity", "map", "identity map of a zoo manifold", {"model": "const_curv", "params": None},
        identity_map, _box(-0.5, 0.5), (_E("conformal_class", {"class": "isometry"}),),
    ),
    "scaled_identity": ModelSpec(
        "scaled_identity", "map", "identity chart map into k*g", {"model": "const_curv", "params": None, "k": 4.0},
        scaled_identity, _box(-0.5, 0.5), (_E("conformal_class", {"class": "homothety"}),),
    ),
    "dilation": ModelSpec(
        "dilation", "map", "x -> s x between constant-curvature models c and c/s^2",
        {"s": 2.0, "n": 4, "nu": 1, "c": 1.0}, dilation, _box(-0.2, 0.2),
        (_E("conformal_class", {"class": "homothety"}),),
    ),
    "pseudo_orthogonal": ModelSpec(
        "pseudo_orthogonal", "map", "linear isometry exp(eta K) of flat or constant-curvature models",
        {"model": "const_curv", "n": 4, "nu": 1, "seed": 0, "c": 1.0}, pseudo_orthogonal, _box(-0.2, 0.2),
        (_E("conformal_class", {"class": "isometry"}),),
    ),
    "lorentz_boost": ModelSpec(
        "lorentz_boost", "map", "boost in the (x0, x1) plane", {"rapidity": 0.7, "model": "flat", "n": 4, "c": 1.0},
        lorentz_boost, _box(-0.3, 0.3), (_E("conformal_class", {"class": "isometry"}),),
    ),
    "inversion": ModelSpec(
        "inversion", "map", "conformal inversion x -> x/<x,x> on flat space off the null cone",
        {"n": 4, "nu": 1}, inversion,
        lambda p: np.array([[-0.3] + [0.5] * (p["n"] - 1), [0.3] + [1.0] * (p["n"] - 1)]),
        (_E("conformal_class", {"class": "conformal_nonconstant"}),),
    ),
    "random_linear": ModelSpec(
        "random_linear", "map", "random non-conformal linear map on flat space",
        {"n": 4, "nu": 2, "seed": 0}, random_linear, _box(-1.0, 1.0),
        (_E("conformal_class", {"class": "not_conformal"}),),
    ),
    "pair_rotation": ModelSpec(
        "pair_rotation", "map", "phase rotation of each complex coordinate (holomorphic isometry)",
        {"model": "const_hol", "params": None, "angles": (0.4, -1.1)}, pair_rotation, _box(-0.3, 0.3),
        (_E("conformal_class", {"class": "isometry"}), _E("holomorphic", {"sign": 1})),
    ),
    "nonholomorphic_linear": ModelSpec(
        "nonholomorphic_linear", "map", "partial complex conjugation on C^2 (neither holomorphic nor anti)",
        {"model": "flat_kaehler", "params": None}, nonholomorphic_linear, _box(-1.0, 1.0),
        (_E("conformal_class", {"class": "isometry"}), _E("holomorphic", {"sign": 0})),
    ),
}

REGISTRY: dict[str, ModelSpec] = {**MANIFOLDS, **MAPS}


def instantiate_model(model_id: str, **params) -> Union[ChartManifold, DiffeoMap]:
    entry = REGISTRY.get(model_id)
    if entry is None:
        raise InputError(f"unknown model id {model_id!r}")
    unknown = set(params) - set(entry.defaults)
    if unknown:
        raise InputError(f"unknown parameters for {model_id}: {sorted(unknown)}")
    merged = {**entry.defaults, **params}
    return entry.builder(**merged)


def sample_points(model_id: str, rng: np.random.Generator, k: int, **params) -> list[np.ndarray]:
    entry = REGISTRY[model_id]
    merged = {**entry.defaults, **params}
    lo, hi = entry.box(merged)
    obj = entry.builder(**merged)
    n = (obj.source if isinstance(obj, DiffeoMap) else obj).dim
    lo = np.broadcast_to(lo, (n,))
    hi = np.broadcast_to(hi, (n,))
    return [lo + (hi - lo) * rng.random(n) for _ in range(k)]


def list_models() -> list[dict]:
    return [
        {"id": s.id, "kind": s.kind, "description": s.description, "defaults": _jsonable(s.defaults)}
        for s in REGISTRY.values()
    ]


def _jsonable(d: dict) -> dict:
    return {k: (list(v) if isinstance(v, tuple) else v) for k, v in d.items()}


# ---------------------------------------------------------------------------
# Self-validation
# ---------------------------------------------------------------------------


@dataclass
class CheckResult:
    model: str
    check: str
    passed: bool
    value: float
    provenance: str

    def as_dict(self) -> dict:
        return {
            "model": self.model, "check": self.check, "passed": self.passed,
            "value": self.value, "provenance": self.provenance,
        }


def _expected_nu(merged: dict, exp_params: dict) -> Optional[int]:
    if "nu" in exp_params:
        return exp_params["nu"]
    if "nu" in merged:
        return merged["nu"]
    if "nu_c" in merged:
        return 2 * merged["nu_c"]
    return None


def validate_model(model_id: str, rng: np.random.Generator, k: int = 3, **params) -> list[CheckResult]:
    """Run a registry entry's declared expectations at ``k`` sample points."""
    from .curvature import bundle_at
    from .diffeo import check_holomorphic, conformal_classify
    from .errors import NotHolomorphicError
    from .geometry import hermitian_defect, orthonormal_frame
    from . import structure as st

    entry = REGISTRY[model_id]
    merged = {**entry.defaults, **params}
    obj = entry.builder(**merged)
    points = sample_points(model_id, rng, k, **params)
    results = []
    for exp in entry.expected:
        ep = exp.params
        if entry.kind == "map":
            if exp.check == "conformal_class":
                rep = conformal_classify(obj, points)
                value = float(max(rep.residual))
                ok = rep.conformal_class.value == ep["class"]
            else:  # holomorphic
                try:
                    sign = check_holomorphic(obj, points[0])
                except NotHolomorphicError:
                    sign = 0
                value, ok = float(sign), sign == ep["sign"]
            results.append(CheckResult(model_id, exp.check, ok, value, exp.provenance))
            continue
        bundles = [bundle_at(obj, p) for p in points]
        check = exp.check
        if check == "riemann_zero":
            value = max(float(np.max(np.abs(b.R))) for b in bundles)
            ok = value <= 1e-12
        elif check == "einstein":
            value = max(st.einstein_defect(b) for b in bundles)
            ok = value <= ep["max"]
        elif check == "signature":
            want = _expected_nu(merged, ep)
            got = [orthonormal_frame(b.g).index for b in bundles]
            value, ok = float(got[0]), all(v == want for v in got)
        elif check == "constant_curvature":
            c_exp = merged[ep["c_key"]] if "c_key" in ep else ep["c"]
            fits = [st.constant_curvature_fit(b) for b in bundles]
            value = max(max(abs(c - c_exp), r) for c, r in fits)
            ok = value <= ep["max"]
        elif check == "not_constant_curvature":
            value = min(st.constant_curvature_fit(b)[1] for b in bundles)
            ok = value >= ep["min"]
        elif check == "conformally_flat":
            value = max(st.conformally_flat_defect(b) for b in bundles)
            ok = value <= ep["max"]
        elif check == "not_conformally_flat":
            value = min(st.conformally_flat_defect(b) for b in bundles)
            ok = value >= ep["min"]
        elif check == "nabla_R_zero":
            value = max(float(np.max(np.abs(b.nabla_R))) for b in bundles)
            ok = value <= ep["max"]
        elif check == "kn_star":
            want = "recurrent" if merged["profile"] == "u" else "symmetric_walker"
            fits = [st.kn_star_classify(obj, p) for p in points]
            value = max(f.residual for f in fits)
            ok = all(f.kn_class.value == want for f in fits)
        elif check in ("kaehler", "hermitian", "not_kaehler_dphi"):
            rep = st.kaehler_check(obj, points)
            d = rep.max_defects
            if check == "kaehler":
                value = max(d.values())
                ok = value <= ep["max"]
            elif check == "hermitian":
                value = max(hermitian_defect(b.g, obj.J) for b in bundles)
                ok = value <= ep["max"]
            else:
                value = min(rep.d_phi)
                ok = value > 1e-3
        elif check == "constant_hol":
            c_exp = merged[ep["c_key"]]
            fits = [st.constant_hol_curvature_fit(b, obj.J) for b in bundles]
            value = max(max(abs(c - c_exp), r) for c, r in fits)
            ok = value <= ep["max"]
        elif check == "not_constant_hol":
            value = min(st.constant_hol_curvature_fit(b, obj.J)[1] for b in bundles)
            ok = value >= ep["min"]
        elif check == "bochner_zero":
            value = max(st.bochner_defect(b, obj.J) for b in bundles)
            ok = value <= ep["max"]
        elif check == "bochner_nonzero":
            value = min(st.bochner_defect(b, obj.J) for b in bundles)
            ok = value >= ep["min"]
        else:
            raise InputError(f"unknown expectation {check!r}")
        results.append(CheckResult(model_id, check, bool(ok), float(value), exp.provenance))
    return results
