"""ModelBundle and the group descriptions used by the model constructors."""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Any

import numpy as np

from ..convex import DEFAULT_TOL, Tolerance
from ..errors import InputError
from ..kernel import SystemSpec

__all__ = ["ModelBundle", "FiniteGroup", "OrthogonalGroup", "PermutationGroup", "GhostPair", "haar_orthogonal"]


@dataclass(frozen=True, eq=False)
class FiniteGroup:
    """Explicitly listed group of transformation matrices."""

    elements: np.ndarray
    labels: tuple = ()
    finite: bool = field(default=True, init=False)

    def __post_init__(self) -> None:
        els = np.asarray(self.elements, dtype=float)
        if els.ndim != 3:
            raise InputError("group elements must be a stack of square matrices")
        object.__setattr__(self, "elements", els)
        if not self.labels:
            object.__setattr__(self, "labels", tuple(str(k) for k in range(len(els))))

    def __len__(self) -> int:
        return self.elements.shape[0]

    def all(self) -> np.ndarray:
        return self.elements

    def sample(self, rng: np.random.Generator, k: int) -> np.ndarray:
        return self.elements

    def index(self, T, tol: Tolerance = DEFAULT_TOL) -> int:
        """Position of ``T`` in the list, or -1."""
        d = np.abs(self.elements - np.asarray(T, dtype=float)).reshape(len(self), -1).max(axis=1)
        hits = np.flatnonzero(d <= max(tol.eps, 1e-12) * 10)
        return int(hits[0]) if hits.size else -1

    def contains(self, T, tol: Tolerance = DEFAULT_TOL) -> bool:
        return self.index(T, tol) >= 0


def haar_orthogonal(rng: np.random.Generator, n: int, k: int, special: bool = False) -> np.ndarray:
    """``k`` Haar-distributed ``n x n`` orthogonal matrices (rotations if ``special``)."""
    z = rng.standard_normal((k, n, n))
    q, r = np.linalg.qr(z)
    q = q * np.sign(np.diagonal(r, axis1=1, axis2=2))[:, None, :]
    if special:
        neg = np.linalg.det(q) < 0
        q[neg, :, 0] *= -1.0
    return q


def _embed(G: np.ndarray) -> np.ndarray:
    G = np.asarray(G, dtype=float)
    n = G.shape[-1]
    out = np.zeros(G.shape[:-2] + (n + 1, n + 1))
    out[..., :n, :n] = G
    out[..., n, n] = 1.0
    return out


@dataclass(frozen=True)
class OrthogonalGroup:
    """O(n) or SO(n) acting on the Bloch ball, embedded as ``diag(G, 1)``."""

    n: int
    special: bool = False
    finite: bool = field(default=False, init=False)

    @property
    def name(self) -> str:
        return f"{'SO' if self.special else 'O'}({self.n})"

    def embed(self, G) -> np.ndarray:
        return _embed(G)

    def sample(self, rng: np.random.Generator, k: int) -> np.ndarray:
        return _embed(haar_orthogonal(rng, self.n, k, self.special))

    def witnesses(self) -> list[tuple[str, np.ndarray]]:
        """Explicit elements: the full reversal, or for odd-n rotations the partial one."""
        out = []
        if not self.special or self.n % 2 == 0:
            out.append(("reversal", _embed(-np.eye(self.n))))
        else:
            out.append(("partial-reversal", _embed(np.diag([-1.0] * (self.n - 1) + [1.0]))))
        return out

    def contains(self, T, tol: Tolerance = DEFAULT_TOL) -> bool:
        T = np.asarray(T, dtype=float)
        n = self.n
        if T.shape != (n + 1, n + 1):
            return False
        thr = max(tol.eps, 1e-12) * 100
        G = T[:n, :n]
        if np.abs(T[n, :n]).max() > thr or np.abs(T[:n, n]).max() > thr or abs(T[n, n] - 1) > thr:
            return False
        if np.abs(G @ G.T - np.eye(n)).max() > thr:
            return False
        return not self.special or np.linalg.det(G) > 0


@dataclass(frozen=True)
class PermutationGroup:
    """Symmetric group on ``d`` letters as permutation matrices."""

    d: int
    enumerate_up_to: int = 6

    @property
    def finite(self) -> bool:
        return self.d <= self.enumerate_up_to

    def __len__(self) -> int:
        return math.factorial(self.d)

    def all(self) -> np.ndarray:
        if not self.finite:
            raise InputError(f"S_{self.d} is too large to enumerate; use sample()")
        eye = np.eye(self.d)
        return np.stack([eye[list(p)] for p in itertools.permutations(range(self.d))])

    def sample(self, rng: np.random.Generator, k: int) -> np.ndarray:
        if self.finite:
            return self.all()
        eye = np.eye(self.d)
        return np.stack([eye[rng.permutation(self.d)] for _ in range(k)])

    def contains(self, T, tol: Tolerance = DEFAULT_TOL) -> bool:
        T = np.asarray(T, dtype=float)
        if T.shape != (self.d, self.d):
            return False
        ones = np.isclose(T, 1.0, atol=tol.eps)
        zeros = np.isclose(T, 0.0, atol=tol.eps)
        return bool(np.all(ones | zeros) and np.all(ones.sum(0) == 1) and np.all(ones.sum(1) == 1))


@dataclass(frozen=True, eq=False)
class GhostPair:
    """Two transformations with the same local matrix but possibly different bipartite action.

    ``ext1``/``ext2`` are the images of the faithful state in whatever
    operator picture distinguishes them (4x4 for the ten-dimensional rebit).
    """

    name: str
    local1: np.ndarray
    local2: np.ndarray
    ext1: np.ndarray
    ext2: np.ndarray
    picture: str = ""


@dataclass(frozen=True, eq=False)
class ModelBundle:
    """Everything the audits need to know about one toy theory."""

    name: str
    params: dict
    spec: SystemSpec
    pure_states: np.ndarray
    extremal_effects: np.ndarray
    faithful: np.ndarray | None
    automorphisms: Any
    extremal_transforms: Any
    extremal_bipartite: Any
    faithful_pure: bool = True
    continuous: bool = False
    observables: np.ndarray | None = None
    ghost_pairs: tuple = ()
    extras: dict = field(default_factory=dict)

    @property
    def dim(self) -> int:
        return self.spec.dim

    def label(self) -> str:
        if not self.params:
            return self.name
        inner = ", ".join(f"{k}={v}" for k, v in self.params.items())
        return f"{self.name}({inner})"
