"""Point-local multilinear algebra for an indefinite inner product.

Tensors are plain numpy arrays of covariant components; a ``(0,4)`` tensor
has shape ``(n, n, n, n)``. Vectors are 1-d arrays of contravariant
components. The complex structure ``J`` is an ``(n, n)`` matrix acting on
component columns, so ``g(x, J u) == x @ g @ J @ u``.

All rank and degeneracy thresholds are measured in the auxiliary
Euclidean (max-abs) norm on components; the indefinite norm vanishes on
exactly the objects these tests care about.
"""

from __future__ import annotations

import enum
import functools
import itertools
from dataclasses import dataclass
from typing import NamedTuple, Optional, Sequence

import numpy as np

from . import exprlang
from .errors import (
    DefiniteMetricError,
    DependentVectorsError,
    InputError,
    MissingComplexStructureError,
    SingularMetricError,
)

RANK_TOL = 1e-9


@dataclass(frozen=True)
class ComplexStructure:
    """Constant complex structure ``J e_a = e_b, J e_b = -e_a`` on index pairs."""

    pairs: tuple[tuple[int, int], ...]

    def __post_init__(self):
        flat = [i for pair in self.pairs for i in pair]
        if any(len(p) != 2 for p in self.pairs) or len(set(flat)) != len(flat):
            raise InputError("complex structure pairs must be disjoint index pairs")

    def validate(self, n: int) -> None:
        flat = sorted(i for pair in self.pairs for i in pair)
        if n % 2:
            raise InputError("a complex structure needs even dimension")
        if flat != list(range(n)):
            raise InputError("complex structure pairs must cover every index exactly once")

    def matrix(self, n: int) -> np.ndarray:
        self.validate(n)
        J = np.zeros((n, n))
        for a, b in self.pairs:
            J[b, a] = 1.0
            J[a, b] = -1.0
        return J


@dataclass(frozen=True, eq=False)
class ChartManifold:
    """A single chart with symbolic metric components.

    ``metric`` is the full symmetric matrix of expressions; the upper
    triangle is authoritative and :meth:`from_strings` mirrors it.
    """

    name: str
    coords: tuple[str, ...]
    metric: tuple[tuple[exprlang.Expr, ...], ...]
    complex_structure: Optional[ComplexStructure] = None
    recurrence_function: Optional[exprlang.Expr] = None

    def __post_init__(self):
        n = len(self.coords)
        if n < 2:
            raise InputError("dimension must be at least 2")
        if len(set(self.coords)) != n:
            raise InputError("coordinate names must be distinct")
        if len(self.metric) != n or any(len(row) != n for row in self.metric):
            raise InputError(f"metric must be a {n}x{n} matrix")
        if self.complex_structure is not None:
            self.complex_structure.validate(n)

    @classmethod
    def from_strings(
        cls,
        name: str,
        coords: Sequence[str],
        metric: Sequence[Sequence[str]],
        pairs: Optional[Sequence[Sequence[int]]] = None,
        recurrence_function: Optional[str] = None,
    ) -> "ChartManifold":
        coords = tuple(coords)
        n = len(coords)
        rows = [[None] * n for _ in range(n)]
        for i in range(n):
            for j in range(i, n):
                e = exprlang.parse_expr(str(metric[i][j]), coords)
                rows[i][j] = rows[j][i] = e
        cs = ComplexStructure(tuple(tuple(p) for p in pairs)) if pairs is not None else None
        v = exprlang.parse_expr(recurrence_function, coords) if recurrence_function else None
        return cls(name, coords, tuple(tuple(r) for r in rows), cs, v)

    @property
    def dim(self) -> int:
        return len(self.coords)

    @property
    def J(self) -> np.ndarray:
        if self.complex_structure is None:
            raise MissingComplexStructureError()
        return self.complex_structure.matrix(self.dim)

    def metric_strings(self) -> list[list[str]]:
        return [[exprlang.render(e) for e in row] for row in self.metric]

    # -- jets ---------------------------------------------------------------

    def _derivative_exprs(self, order: int) -> list[exprlang.Expr]:
        """Upper-triangle metric components differentiated along every
        nondecreasing index tuple of length ``order``."""
        cache = self.__dict__.setdefault("_diff_cache", {})
        n = self.dim
        out = []
        for i in range(n):
            for j in range(i, n):
                for idx in itertools.combinations_with_replacement(range(n), order):
                    key = (i, j, idx)
                    if key not in cache:
                        if not idx:
                            cache[key] = self.metric[i][j]
                        else:
                            prev = cache[(i, j, idx[:-1])]
                            cache[key] = exprlang.diff_expr(prev, self.coords[idx[-1]])
                    out.append(cache[key])
        return out

    def _compiled(self, order: int):
        compiled = self.__dict__.setdefault("_compiled_cache", {})
        if order not in compiled:
            for k in range(order):
                self._derivative_exprs(k)  # populate lower orders first
            compiled[order] = exprlang.compile_exprs(self._derivative_exprs(order))
        return compiled[order]

    def metric_jet(self, point: Sequence[float], order: int) -> list[np.ndarray]:
        """Metric and its coordinate derivatives up to ``order`` at ``point``.

        Element ``k`` of the result has shape ``(n,)*k + (n, n)``: the
        leading ``k`` axes are derivative directions.
        """
        n = self.dim
        if len(point) != n:
            raise InputError(f"point has {len(point)} coordinates, expected {n}")
        jets = []
        for k in range(order + 1):
            vals = self._compiled(k)(point)
            targets, sources = _scatter_plan(n, k)
            arr = np.empty((n,) * k + (n, n))
            arr.flat[targets] = vals[sources]
            jets.append(arr)
        return jets


@functools.lru_cache(maxsize=None)
def _scatter_plan(n: int, order: int) -> tuple[np.ndarray, np.ndarray]:
    """Flat indices mapping packed upper-triangle/sorted-derivative values
    onto the full symmetric jet array."""
    shape = (n,) * order + (n, n)
    combos = list(itertools.combinations_with_replacement(range(n), order))
    targets, sources = [], []
    pos = 0
    for i in range(n):
        for j in range(i, n):
            for idx in combos:
                for perm in set(itertools.permutations(idx)):
                    for a, b in {(i, j), (j, i)}:
                        targets.append(np.ravel_multi_index(perm + (a, b), shape))
                        sources.append(pos)
                pos += 1
    return np.array(targets), np.array(sources)


class FrameResult(NamedTuple):
    vectors: np.ndarray  # columns are frame vectors e_i
    signs: np.ndarray

    @property
    def index(self) -> int:
        return int(np.sum(self.signs < 0))


class PlaneClass(enum.Enum):
    NONDEGENERATE = "nondegenerate"
    WEAKLY_DEGENERATE = "weakly_degenerate"
    STRONGLY_DEGENERATE = "strongly_degenerate"

    @property
    def rank(self) -> int:
        return {"nondegenerate": 2, "weakly_degenerate": 1, "strongly_degenerate": 0}[self.value]


def aux_norm(x) -> float:
    """Max-abs norm on components."""
    x = np.asarray(x, dtype=float)
    return float(np.max(np.abs(x))) if x.size else 0.0


def check_nonsingular(g: np.ndarray) -> None:
    n = g.shape[0]
    scale = aux_norm(g)
    if scale == 0.0 or abs(np.linalg.det(g)) <= 1e-12 * scale**n:
        raise SingularMetricError("metric is singular at this point")


def metric_at(m: ChartManifold, p: Sequence[float]) -> np.ndarray:
    if not np.all(np.isfinite(np.asarray(p, dtype=float))):
        raise InputError("point must be finite")
    g = m.metric_jet(p, 0)[0]
    check_nonsingular(g)
    return g


def inverse_metric_at(m: ChartManifold, p: Sequence[float]) -> np.ndarray:
    return np.linalg.inv(metric_at(m, p))


def inner(g: np.ndarray, x, y) -> float:
    return float(np.asarray(x) @ g @ np.asarray(y))


def pi1_apply(g: np.ndarray, z, u, v, w) -> float:
    return inner(g, z, w) * inner(g, u, v) - inner(g, z, v) * inner(g, u, w)


def pi1_build(g: np.ndarray) -> np.ndarray:
    return np.einsum("il,jk->ijkl", g, g) - np.einsum("ik,jl->ijkl", g, g)


def apply4(T: np.ndarray, x, y, z, u) -> float:
    return float(np.einsum("ijkl,i,j,k,l->", T, x, y, z, u))


def _check_symmetric(Q: np.ndarray, what: str = "Q") -> None:
    if aux_norm(Q - Q.T) > 1e-9 * (1.0 + aux_norm(Q)):
        raise InputError(f"{what} must be symmetric")


def phi_build(g: np.ndarray, Q: np.ndarray) -> np.ndarray:
    """phi(Q)(x,y,z,u) = g(x,u)Q(y,z) - g(x,z)Q(y,u) + g(y,z)Q(x,u) - g(y,u)Q(x,z)."""
    _check_symmetric(Q)
    return (
        np.einsum("il,jk->ijkl", g, Q)
        - np.einsum("ik,jl->ijkl", g, Q)
        + np.einsum("jk,il->ijkl", g, Q)
        - np.einsum("jl,ik->ijkl", g, Q)
    )


def psi_build(g: np.ndarray, J: Optional[np.ndarray], Q: np.ndarray) -> np.ndarray:
    """The six-term Kaehler companion of :func:`phi_build`.

    psi(Q)(x,y,z,u) = g(x,Ju)Q(y,Jz) - g(x,Jz)Q(y,Ju) - 2g(x,Jy)Q(z,Ju)
                    + g(y,Jz)Q(x,Ju) - g(y,Ju)Q(x,Jz) - 2g(z,Ju)Q(x,Jy)
    """
    if J is None:
        raise MissingComplexStructureError()
    _check_symmetric(Q)
    gJ = g @ J  # gJ[a, b] = g(e_a, J e_b)
    QJ = Q @ J
    return (
        np.einsum("il,jk->ijkl", gJ, QJ)
        - np.einsum("ik,jl->ijkl", gJ, QJ)
        - 2.0 * np.einsum("ij,kl->ijkl", gJ, QJ)
        + np.einsum("jk,il->ijkl", gJ, QJ)
        - np.einsum("jl,ik->ijkl", gJ, QJ)
        - 2.0 * np.einsum("kl,ij->ijkl", gJ, QJ)
    )


def pi2_build(g: np.ndarray, J: Optional[np.ndarray]) -> np.ndarray:
    return 0.5 * psi_build(g, J, g)


def rank1_form_build(g: np.ndarray, V) -> np.ndarray:
    """B(X, Y) = g(X, V) g(Y, V) for a unit vector V."""
    V = np.asarray(V, dtype=float)
    if abs(abs(inner(g, V, V)) - 1.0) > 1e-9:
        raise InputError("V must be a unit vector (|g(V,V)| = 1)")
    gV = g @ V
    return np.outer(gV, gV)


def orthonormal_frame(g: np.ndarray) -> FrameResult:
    """Pseudo-orthonormal frame from the symmetric eigendecomposition.

    Timelike (negative) vectors come first; each group is ordered by
    eigenvalue so the output is deterministic.
    """
    g = np.asarray(g, dtype=float)
    check_nonsingular(g)
    w, U = np.linalg.eigh(0.5 * (g + g.T))
    order = np.lexsort((w, np.sign(w)))
    w, U = w[order], U[:, order]
    E = U / np.sqrt(np.abs(w))
    # fix column signs: first nonzero component positive
    for k in range(E.shape[1]):
        col = E[:, k]
        lead = col[np.argmax(np.abs(col) > 1e-12 * aux_norm(col))]
        if lead < 0:
            E[:, k] = -col
    return FrameResult(E, np.sign(w))


def frame_trace(T4: np.ndarray, frame: FrameResult) -> np.ndarray:
    """sum_i eps_i T(e_i, ., ., e_i) as a (0,2) tensor."""
    E, eps = frame
    return np.einsum("a,ia,la,ijkl->jk", eps, E, E, T4)


def _independent(x, y) -> None:
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    scale = max(aux_norm(x), aux_norm(y))
    if scale == 0.0:
        raise DependentVectorsError("plane spanning vectors are zero")
    gram = np.array([[x @ x, x @ y], [x @ y, y @ y]]) / scale**2
    if np.linalg.det(gram) <= 1e-12:
        raise DependentVectorsError("plane spanning vectors are linearly dependent")


def plane_rank(g: np.ndarray, x, y) -> int:
    _independent(x, y)
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    # rescale spanners so the threshold is independent of their lengths
    x = x / aux_norm(x)
    y = y / aux_norm(y)
    gram = np.array([[inner(g, x, x), inner(g, x, y)], [inner(g, x, y), inner(g, y, y)]])
    sv = np.linalg.svd(gram, compute_uv=False)
    thresh = RANK_TOL * (1.0 + aux_norm(gram))
    return int(np.sum(sv > thresh))


def classify_plane(g: np.ndarray, x, y) -> PlaneClass:
    rank = plane_rank(g, x, y)
    return {2: PlaneClass.NONDEGENERATE, 1: PlaneClass.WEAKLY_DEGENERATE,
            0: PlaneClass.STRONGLY_DEGENERATE}[rank]


def is_isotropic(g: np.ndarray, x) -> bool:
    x = np.asarray(x, dtype=float)
    a = aux_norm(x)
    if a == 0.0:
        return False
    return abs(inner(g, x, x)) <= RANK_TOL * a * a


def _random_unit(rng: np.random.Generator, k: int) -> np.ndarray:
    while True:
        v = rng.standard_normal(k)
        norm = np.linalg.norm(v)
        if norm > 1e-8:
            return v / norm


def sample_isotropic(g: np.ndarray, rng: np.random.Generator) -> np.ndarray:
    """Random null vector u_minus + u_plus built from a pseudo-orthonormal frame."""
    frame = orthonormal_frame(g)
    neg = frame.vectors[:, frame.signs < 0]
    pos = frame.vectors[:, frame.signs > 0]
    if neg.shape[1] == 0 or pos.shape[1] == 0:
        raise DefiniteMetricError()
    return neg @ _random_unit(rng, neg.shape[1]) + pos @ _random_unit(rng, pos.shape[1])


def is_holomorphic_plane(J: Optional[np.ndarray], x, y) -> bool:
    """True iff span{x, y} is J-invariant."""
    if J is None:
        raise MissingComplexStructureError()
    _independent(x, y)
    x = np.asarray(x, dtype=float) / aux_norm(x)
    y = np.asarray(y, dtype=float) / aux_norm(y)
    M = np.column_stack([x, y, J @ x, J @ y])
    sv = np.linalg.svd(M, compute_uv=False)
    return int(np.sum(sv > RANK_TOL * sv[0])) == 2


def hermitian_defect(g: np.ndarray, J: np.ndarray) -> float:
    """max|g(J., J.) - g| over components."""
    return aux_norm(J.T @ g @ J - g)
