"""Cone geometry kernel.

Membership and dual membership for the three cone shapes the toy theories
need (positive orthant, Lorentz cone, polyhedral cone given by generators),
extremality inside a finite convex hull, and minimisation of a bilinear
pairing over a family of bipartite matrices.

Polyhedral questions are tiny (dimension <= 10, a few dozen generators), so
they are decided with non-negative least squares: ``v`` lies in the conic
hull of ``G`` iff ``min_{c>=0} |G c - v|`` vanishes.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Callable, Sequence, Union

import numpy as np
from scipy.optimize import minimize_scalar, nnls

from .errors import InputError

__all__ = [
    "Tolerance",
    "DEFAULT_TOL",
    "Orthant",
    "Lorentz",
    "PolyV",
    "ConeSpec",
    "cone_contains",
    "dual_contains",
    "on_lorentz_boundary",
    "conic_combination",
    "convex_combination",
    "is_extremal_in_hull",
    "FamilyPoint",
    "FiniteFamily",
    "minimize_bilinear",
    "maximize_bilinear",
    "refine_coordinatewise",
]


@dataclass(frozen=True)
class Tolerance:
    """Numerical tolerance and grid resolution used by every audit."""

    eps: float = 1e-9
    grid_angle: int = 720
    grid_gamma: int = 200

    def __post_init__(self) -> None:
        if not 0.0 <= self.eps < 1e-3:
            raise InputError(f"eps must lie in [0, 1e-3), got {self.eps!r}")
        if self.grid_angle < 8 or self.grid_gamma < 8:
            raise InputError(
                f"grids need at least 8 samples, got angle={self.grid_angle}, gamma={self.grid_gamma}"
            )

    def as_dict(self) -> dict[str, Any]:
        return {"eps": self.eps, "grid_angle": self.grid_angle, "grid_gamma": self.grid_gamma}


DEFAULT_TOL = Tolerance()


# ---------------------------------------------------------------------------
# cones
# ---------------------------------------------------------------------------


def _vec(v: Any, dim: int) -> np.ndarray:
    arr = np.asarray(v, dtype=float)
    if arr.ndim != 1 or arr.shape[0] != dim:
        raise InputError(f"expected a vector of length {dim}, got shape {arr.shape}")
    return arr


@dataclass(frozen=True)
class Orthant:
    """The non-negative orthant of R^dim (self-dual)."""

    dim: int

    def __post_init__(self) -> None:
        if self.dim < 1:
            raise InputError("cone dimension must be >= 1")

    def contains(self, v, tol: Tolerance = DEFAULT_TOL) -> bool:
        return bool(np.all(_vec(v, self.dim) >= -tol.eps))

    def dual_contains(self, a, tol: Tolerance = DEFAULT_TOL) -> bool:
        # <a, e_i> >= 0 for every generator e_i
        return bool(np.min(_vec(a, self.dim)) >= -tol.eps)

    def generators(self) -> np.ndarray:
        return np.eye(self.dim)


@dataclass(frozen=True)
class Lorentz:
    """Second-order cone ``x_1^2 + ... + x_{d-1}^2 <= x_d^2, x_d >= 0`` (self-dual)."""

    dim: int

    def __post_init__(self) -> None:
        if self.dim < 1:
            raise InputError("cone dimension must be >= 1")

    def contains(self, v, tol: Tolerance = DEFAULT_TOL) -> bool:
        v = _vec(v, self.dim)
        return bool(v[-1] >= -tol.eps and np.linalg.norm(v[:-1]) <= v[-1] + tol.eps)

    def dual_contains(self, a, tol: Tolerance = DEFAULT_TOL) -> bool:
        # min over unit boundary rays g = (u, 1) of <a, g> is a_d - |a_hat|
        a = _vec(a, self.dim)
        return bool(a[-1] - np.linalg.norm(a[:-1]) >= -tol.eps)


@dataclass(frozen=True, eq=False)
class PolyV:
    """Polyhedral cone spanned by a finite list of non-zero generators."""

    generators: np.ndarray

    def __post_init__(self) -> None:
        g = np.atleast_2d(np.asarray(self.generators, dtype=float))
        if g.shape[0] == 0 or g.shape[1] == 0:
            raise InputError("PolyV needs at least one generator of dimension >= 1")
        if not np.all(np.isfinite(g)) or np.any(np.linalg.norm(g, axis=1) == 0):
            raise InputError("PolyV generators must be finite and non-zero")
        g.setflags(write=False)
        object.__setattr__(self, "generators", g)

    @property
    def dim(self) -> int:
        return self.generators.shape[1]

    def contains(self, v, tol: Tolerance = DEFAULT_TOL) -> bool:
        v = _vec(v, self.dim)
        _, resid = nnls(self.generators.T, v)
        return bool(resid <= tol.eps * max(1.0, float(np.linalg.norm(v))))

    def dual_contains(self, a, tol: Tolerance = DEFAULT_TOL) -> bool:
        a = _vec(a, self.dim)
        return bool(np.min(self.generators @ a) >= -tol.eps)


ConeSpec = Union[Orthant, Lorentz, PolyV]


def cone_contains(cone: ConeSpec, v, tol: Tolerance = DEFAULT_TOL) -> bool:
    """True iff ``v`` satisfies the cone's defining inequalities within ``tol.eps``."""
    return cone.contains(v, tol)


def dual_contains(cone: ConeSpec, a, tol: Tolerance = DEFAULT_TOL) -> bool:
    """True iff the functional ``a`` is non-negative on the cone (within ``tol.eps``)."""
    return cone.dual_contains(a, tol)


def on_lorentz_boundary(v, tol: Tolerance = DEFAULT_TOL) -> bool:
    """Extremal-ray test for a Lorentz cone: ``|x|^2`` within eps of ``z^2``, ``z > 0``."""
    v = np.asarray(v, dtype=float)
    z = v[-1]
    return bool(z > tol.eps and abs(float(v[:-1] @ v[:-1]) - z * z) <= max(tol.eps, 1e-12) * max(1.0, z * z))


# ---------------------------------------------------------------------------
# finite hulls
# ---------------------------------------------------------------------------


def conic_combination(generators, v) -> tuple[np.ndarray, float]:
    """Non-negative coefficients ``c`` minimising ``|sum_k c_k g_k - v|`` and the residual."""
    g = np.asarray(generators, dtype=float).reshape(len(generators), -1)
    return nnls(g.T, np.asarray(v, dtype=float).ravel())


def convex_combination(points, v) -> tuple[np.ndarray, float]:
    """Convex weights expressing ``v`` through ``points`` (least squares) and the residual."""
    p = np.asarray(points, dtype=float).reshape(len(points), -1)
    target = np.asarray(v, dtype=float).ravel()
    scale = max(1.0, float(np.abs(p).max(initial=0.0)))
    a = np.vstack([p.T, np.full((1, p.shape[0]), scale)])
    b = np.concatenate([target, [scale]])
    return nnls(a, b)


def is_extremal_in_hull(points, v, tol: Tolerance = DEFAULT_TOL) -> bool:
    """True iff ``v`` is not a convex combination of the points that differ from it.

    ``points`` may hold vectors or matrices (they are flattened). ``v`` must lie
    in their convex hull.
    """
    pts = np.asarray(points, dtype=float)
    if pts.shape[0] == 0:
        raise InputError("empty point set")
    pts = pts.reshape(pts.shape[0], -1)
    target = np.asarray(v, dtype=float).ravel()
    if target.shape[0] != pts.shape[1]:
        raise InputError(f"dimension mismatch: points have {pts.shape[1]} entries, v has {target.shape[0]}")
    thresh = max(tol.eps, 1e-12) * max(1.0, float(np.linalg.norm(target)))
    _, resid = convex_combination(pts, target)
    if resid > thresh:
        raise InputError("v is not in the convex hull of the points")
    others = pts[np.linalg.norm(pts - target, axis=1) > thresh]
    if others.shape[0] == 0:
        return True
    _, resid = convex_combination(others, target)
    return bool(resid > thresh)


# ---------------------------------------------------------------------------
# bilinear minimisation over bipartite families
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class FamilyPoint:
    """One member of a bipartite family, with its label and parameters."""

    psi: np.ndarray
    label: str = ""
    params: dict = field(default_factory=dict)

    def to_json(self) -> dict[str, Any]:
        return {
            "label": self.label,
            "params": {k: _jsonable(v) for k, v in self.params.items()},
            "matrix": np.asarray(self.psi, dtype=float).tolist(),
        }


def _jsonable(v):
    if isinstance(v, np.ndarray):
        return v.tolist()
    if isinstance(v, (np.floating, np.integer)):
        return v.item()
    return v


@dataclass(frozen=True, eq=False)
class FiniteFamily:
    """A finite list of bipartite matrices, e.g. the vertices of a polytope."""

    members: tuple
    labels: tuple = ()

    def __post_init__(self) -> None:
        mats = tuple(np.asarray(m, dtype=float) for m in self.members)
        labels = tuple(self.labels) or tuple(str(k) for k in range(len(mats)))
        if len(labels) != len(mats):
            raise InputError("labels and members differ in length")
        object.__setattr__(self, "members", mats)
        object.__setattr__(self, "labels", labels)

    def __len__(self) -> int:
        return len(self.members)

    def __iter__(self):
        return iter(self.members)

    def stack(self) -> np.ndarray:
        return np.stack(self.members)

    def point(self, k: int) -> FamilyPoint:
        return FamilyPoint(self.members[k], self.labels[k], {"index": k})

    def by_label(self, label: str) -> np.ndarray:
        return self.members[self.labels.index(label)]

    def minimize(self, F, tol: Tolerance = DEFAULT_TOL) -> tuple[float, FamilyPoint]:
        if not self.members:
            raise InputError("empty bipartite family")
        vals = np.einsum("ij,kij->k", np.asarray(F, dtype=float), self.stack())
        best = float(vals.min())
        k = int(np.flatnonzero(vals <= best + tol.eps)[0])
        return float(vals[k]), self.point(k)

    def sample(self, rng: np.random.Generator, k: int) -> list[FamilyPoint]:
        return [self.point(i) for i in range(len(self))]


def minimize_bilinear(F, family, tol: Tolerance = DEFAULT_TOL) -> tuple[float, FamilyPoint]:
    """Smallest Frobenius pairing ``sum_ij F_ij Psi_ij`` over ``family`` and its minimiser.

    ``family`` is either a sequence of matrices or any object with a
    ``minimize(F, tol)`` method (the parametric families in ``gptaudit.models``).
    Ties within ``tol.eps`` resolve to the earliest member / smallest parameters.
    """
    if hasattr(family, "minimize"):
        return family.minimize(F, tol)
    members = list(family)
    if not members:
        raise InputError("empty bipartite family")
    return FiniteFamily(tuple(members)).minimize(F, tol)


def maximize_bilinear(F, family, tol: Tolerance = DEFAULT_TOL) -> tuple[float, FamilyPoint]:
    value, point = minimize_bilinear(-np.asarray(F, dtype=float), family, tol)
    return -value, point


def refine_coordinatewise(
    fun: Callable[[np.ndarray], float],
    x0: Sequence[float],
    bounds: Sequence[tuple[float, float]],
    xatol: float = 1e-12,
) -> tuple[np.ndarray, float]:
    """One pass of bounded scalar minimisation along each coordinate in turn.

    Returns the refined point and value; a coordinate move is only accepted
    when it strictly lowers ``fun``, so exact grid optima are kept.
    """
    x = np.array(x0, dtype=float)
    fx = float(fun(x))
    for i, (lo, hi) in enumerate(bounds):
        if hi <= lo:
            continue

        def along(t, i=i):
            y = x.copy()
            y[i] = t
            return fun(y)

        res = minimize_scalar(along, bounds=(lo, hi), method="bounded", options={"xatol": xatol})
        if res.fun < fx:
            x[i] = res.x
            fx = float(res.fun)
    return x, fx
