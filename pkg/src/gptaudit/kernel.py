"""Bloch-representation algebra.

States are column vectors ``l(w)``, effects are vectors ``lambda(a)`` and the
probability of ``a`` on ``w`` is their dot product. A transformation is a
square matrix acting on state vectors; its last row (in the canonical basis)
is the effect that tells how likely the transformation is to occur. A
bipartite state is the matrix ``Psi_ij = Psi(l_i, l_j)``, so that

    Psi(a, b) = lambda(a)^T Psi lambda(b)

and a local transformation on the left system multiplies from the left,
``(A x I) Psi = A Psi``, while one on the right gives ``Psi A^T``.

Effects, transformations and bipartite matrices are plain numpy arrays;
only states carry an extra flag telling whether they are normalised.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Literal

import numpy as np

from .convex import DEFAULT_TOL, ConeSpec, Tolerance
from .errors import InputError, SingularFaithfulState, ZeroProbability

__all__ = [
    "SystemSpec",
    "StateVec",
    "as_state",
    "pair",
    "apply",
    "probability",
    "condition",
    "bip_apply",
    "marginal",
    "faithful_inverse",
    "transform_from_bipartite",
    "bipartite_from_transform",
    "transpose_transform",
    "chaotic_state",
    "eval_bilinear",
    "is_effect",
    "is_positive_transform",
    "is_normalized_bipartite",
    "MAX_COND",
]

MAX_COND = 1e8

Side = Literal["left", "right"]


@dataclass(frozen=True, eq=False)
class SystemSpec:
    """Dimension, cones and deterministic effect of a single system."""

    dim: int
    state_cone: ConeSpec
    effect_cone: ConeSpec
    det_effect: np.ndarray

    def __post_init__(self) -> None:
        e = np.asarray(self.det_effect, dtype=float)
        if e.shape != (self.dim,):
            raise InputError(f"det_effect must have length {self.dim}")
        if self.state_cone.dim != self.dim or self.effect_cone.dim != self.dim:
            raise InputError("cone dimensions do not match the system dimension")
        if not self.state_cone.dual_contains(e):
            raise InputError("the deterministic effect must be positive on the state cone")
        e.setflags(write=False)
        object.__setattr__(self, "det_effect", e)


@dataclass(frozen=True, eq=False)
class StateVec:
    """Bloch vector of a (possibly unnormalised) state."""

    l: np.ndarray
    normalized: bool = True

    def __post_init__(self) -> None:
        v = np.array(self.l, dtype=float)
        if v.ndim != 1:
            raise InputError("a state vector must be one-dimensional")
        v.setflags(write=False)
        object.__setattr__(self, "l", v)

    def __len__(self) -> int:
        return self.l.shape[0]

    def __array__(self, dtype=None, copy=None):
        return self.l if dtype is None else self.l.astype(dtype)


def as_state(w) -> np.ndarray:
    return w.l if isinstance(w, StateVec) else np.asarray(w, dtype=float)


def _check_vec(v: np.ndarray, dim: int, what: str) -> None:
    if v.ndim != 1 or v.shape[0] != dim:
        raise InputError(f"{what} has shape {v.shape}, expected ({dim},)")


def _check_square(m: np.ndarray, dim: int | None, what: str) -> None:
    if m.ndim != 2 or m.shape[0] != m.shape[1] or (dim is not None and m.shape[0] != dim):
        want = f"({dim}, {dim})" if dim is not None else "square"
        raise InputError(f"{what} has shape {m.shape}, expected {want}")


def pair(a, w) -> float:
    """Probability ``a(w) = sum_i lambda_i(a) l_i(w)``."""
    a = np.asarray(a, dtype=float)
    l = as_state(w)
    _check_vec(a, l.shape[0], "effect")
    return float(a @ l)


def apply(T, w) -> StateVec:
    """Unnormalised image ``T l(w)``."""
    T = np.asarray(T, dtype=float)
    l = as_state(w)
    _check_square(T, l.shape[0], "transformation")
    return StateVec(T @ l, normalized=False)


def probability(T, w, det_effect=None) -> float:
    """Probability that ``T`` occurs on ``w``, i.e. ``det_effect . (T l)``.

    In the canonical basis this is the last row of ``T`` dotted with ``l``;
    pass ``det_effect`` for other bases (the classical simplex uses all-ones).
    """
    img = apply(T, w).l
    if det_effect is None:
        return float(img[-1])
    return pair(det_effect, img)


def condition(T, w, det_effect=None, tol: Tolerance = DEFAULT_TOL) -> StateVec:
    """State after ``T`` occurred, ``T l / p``; raises ``ZeroProbability`` when ``p <= eps``."""
    p = probability(T, w, det_effect)
    if p <= tol.eps:
        raise ZeroProbability(f"outcome probability {p:.3g} does not exceed eps={tol.eps:g}")
    return StateVec(apply(T, w).l / p, normalized=True)


def bip_apply(T, Psi, side: Side = "left") -> np.ndarray:
    """Local transformation on one half of a bipartite matrix: ``T Psi`` or ``Psi T^T``."""
    T = np.asarray(T, dtype=float)
    Psi = np.asarray(Psi, dtype=float)
    _check_square(Psi, None, "bipartite matrix")
    _check_square(T, Psi.shape[0], "transformation")
    if side == "left":
        return T @ Psi
    if side == "right":
        return Psi @ T.T
    raise InputError(f"side must be 'left' or 'right', got {side!r}")


def marginal(Psi, spec: SystemSpec, side: Side = "right") -> StateVec:
    """Reduced state obtained by discarding one system with the deterministic effect.

    ``side`` names the discarded system: ``"right"`` gives ``Psi e``, the
    state of the left system; ``"left"`` gives ``Psi^T e``.
    """
    Psi = np.asarray(Psi, dtype=float)
    _check_square(Psi, spec.dim, "bipartite matrix")
    if side == "right":
        return StateVec(Psi @ spec.det_effect)
    if side == "left":
        return StateVec(Psi.T @ spec.det_effect)
    raise InputError(f"side must be 'left' or 'right', got {side!r}")


def faithful_inverse(Phi) -> np.ndarray:
    """Inverse of a faithful-state matrix, refusing ill-conditioned input."""
    Phi = np.asarray(Phi, dtype=float)
    _check_square(Phi, None, "faithful state")
    cond = np.linalg.cond(Phi)
    if not np.isfinite(cond) or cond > MAX_COND:
        raise SingularFaithfulState(f"condition number {cond:.3g} exceeds {MAX_COND:g}")
    return np.linalg.inv(Phi)


def transform_from_bipartite(Psi, Phi) -> np.ndarray:
    """Transformation ``A`` with ``(I x A) Phi = Psi``, namely ``A = Psi^T Phi^{-1}``."""
    Psi = np.asarray(Psi, dtype=float)
    Phi = np.asarray(Phi, dtype=float)
    _check_square(Psi, Phi.shape[0], "bipartite matrix")
    faithful_inverse(Phi)  # condition guard
    # Psi^T Phi^-1 = (Phi^-T Psi)^T
    return np.linalg.solve(Phi.T, Psi).T


def bipartite_from_transform(T, Phi) -> np.ndarray:
    """Bipartite matrix ``(I x T) Phi = Phi T^T``."""
    return bip_apply(T, Phi, "right")


def transpose_transform(T, Phi) -> np.ndarray:
    """Transpose ``A'`` of ``A`` with respect to ``Phi``: ``(A' x I) Phi = (I x A) Phi``.

    Equals ``Phi A^T Phi^{-1}``; an involution when ``Phi`` is symmetric.
    """
    T = np.asarray(T, dtype=float)
    Phi = np.asarray(Phi, dtype=float)
    _check_square(T, Phi.shape[0], "transformation")
    return Phi @ T.T @ faithful_inverse(Phi)


def chaotic_state(Phi, spec: SystemSpec) -> StateVec:
    """Maximally chaotic state ``chi = Phi(e, .)``."""
    return marginal(Phi, spec, "left")


def eval_bilinear(F, Psi) -> float:
    """Frobenius pairing ``sum_ij F_ij Psi_ij`` of a bipartite effect and a state."""
    F = np.asarray(F, dtype=float)
    Psi = np.asarray(Psi, dtype=float)
    if F.shape != Psi.shape:
        raise InputError(f"shape mismatch {F.shape} vs {Psi.shape}")
    return float(np.sum(F * Psi))


# ---------------------------------------------------------------------------
# validity predicates
# ---------------------------------------------------------------------------


def is_effect(a, spec: SystemSpec, tol: Tolerance = DEFAULT_TOL) -> bool:
    """``0 <= a <= e``: both ``a`` and ``e - a`` are positive on the state cone."""
    a = np.asarray(a, dtype=float)
    _check_vec(a, spec.dim, "effect")
    return spec.state_cone.dual_contains(a, tol) and spec.state_cone.dual_contains(spec.det_effect - a, tol)


def is_positive_transform(T, spec: SystemSpec, extremal_states, tol: Tolerance = DEFAULT_TOL) -> bool:
    """True iff ``T`` maps every listed extremal state into the state cone."""
    T = np.asarray(T, dtype=float)
    _check_square(T, spec.dim, "transformation")
    imgs = np.asarray(extremal_states, dtype=float) @ T.T
    return all(spec.state_cone.contains(v, tol) for v in imgs)


def is_normalized_bipartite(Psi, spec: SystemSpec, tol: Tolerance = DEFAULT_TOL) -> bool:
    """``Psi(e, e) = 1`` and both marginals lie in the state cone."""
    Psi = np.asarray(Psi, dtype=float)
    e = spec.det_effect
    if abs(float(e @ Psi @ e) - 1.0) > tol.eps:
        return False
    return spec.state_cone.contains(Psi @ e, tol) and spec.state_cone.contains(Psi.T @ e, tol)
