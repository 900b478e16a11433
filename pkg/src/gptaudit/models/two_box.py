"""Two-box world: a pair of PR-box halves.

Each system has two binary measurements x = 0, 1. Coordinates are chosen so
that the effects "outcome 0 of measurement x" read

    lambda(a_0^(0)) = (1/2, -1/2, 1/2),    lambda(a_0^(1)) = (1/2, 1/2, 1/2),

the state space is the square |x| + |y| <= 1 (z = 1), and any joint
probability table is turned into a bipartite matrix by a change of basis
from {a_0^(0), a_0^(1), e} to the canonical functionals.
"""

from __future__ import annotations

import itertools

import numpy as np

from ..convex import DEFAULT_TOL, FiniteFamily, PolyV, Tolerance
from ..errors import InputError
from ..kernel import SystemSpec, transform_from_bipartite
from .bundle import FiniteGroup, ModelBundle

__all__ = [
    "EFFECT_BASIS",
    "CHANGE_OF_BASIS",
    "JointTable",
    "joint_table_to_bipartite",
    "nonlocal_table",
    "local_table",
    "pure_state",
    "two_box",
]

# rows: lambda(a_0^(0)), lambda(a_0^(1)), lambda(e)
EFFECT_BASIS = np.array([[0.5, -0.5, 0.5], [0.5, 0.5, 0.5], [0.0, 0.0, 1.0]])
# l = CHANGE_OF_BASIS @ (a_0^(0), a_0^(1), e)-coordinates
CHANGE_OF_BASIS = np.linalg.inv(EFFECT_BASIS)


class JointTable:
    """Validated table ``p[i, j, x, y] = P(ij | xy)`` for two binary parties."""

    def __init__(self, p, tol: Tolerance = DEFAULT_TOL):
        p = np.array(p, dtype=float)
        if p.shape != (2, 2, 2, 2):
            raise InputError(f"joint table must have shape (2, 2, 2, 2), got {p.shape}")
        if p.min() < -tol.eps or p.max() > 1 + tol.eps:
            raise InputError("probabilities must lie in [0, 1]")
        if np.abs(p.sum(axis=(0, 1)) - 1.0).max() > tol.eps:
            raise InputError("each (x, y) block must sum to 1")
        pa = p.sum(axis=1)  # (i, x, y)
        pb = p.sum(axis=0)  # (j, x, y)
        if np.abs(pa[:, :, 0] - pa[:, :, 1]).max() > tol.eps or np.abs(pb[:, 0, :] - pb[:, 1, :]).max() > tol.eps:
            raise InputError("table is signaling")
        p.setflags(write=False)
        self.p = p


def joint_table_to_bipartite(t) -> np.ndarray:
    """Bipartite matrix ``Psi_ij = Psi(l_i, l_j)`` of a no-signaling table."""
    if not isinstance(t, JointTable):
        t = JointTable(t)
    p = t.p
    G = np.empty((3, 3))
    G[:2, :2] = p[0, 0]  # Psi(a_0^(x), a_0^(y))
    G[:2, 2] = p[0].sum(axis=0)[:, 0]  # Psi(a_0^(x), e)
    G[2, :2] = p[:, 0].sum(axis=0)[0, :]  # Psi(e, a_0^(y))
    G[2, 2] = 1.0
    return CHANGE_OF_BASIS @ G @ CHANGE_OF_BASIS.T


def nonlocal_table(alpha: int, beta: int, gamma: int) -> np.ndarray:
    """PR box: i xor j = xy xor alpha x xor beta y xor gamma, uniform marginals."""
    p = np.zeros((2, 2, 2, 2))
    for i, j, x, y in itertools.product(range(2), repeat=4):
        if i ^ j == (x & y) ^ (alpha & x) ^ (beta & y) ^ gamma:
            p[i, j, x, y] = 0.5
    return p


def local_table(alpha: int, beta: int, gamma: int, delta: int) -> np.ndarray:
    """Deterministic box: i = alpha x xor beta, j = gamma y xor delta."""
    p = np.zeros((2, 2, 2, 2))
    for x, y in itertools.product(range(2), repeat=2):
        p[(alpha & x) ^ beta, (gamma & y) ^ delta, x, y] = 1.0
    return p


def pure_state(alpha: int, beta: int) -> np.ndarray:
    """Deterministic state answering ``alpha x xor beta`` to measurement x."""
    coords = [1.0 - ((alpha & x) ^ beta) for x in range(2)] + [1.0]
    return CHANGE_OF_BASIS @ np.array(coords)


def two_box(faithful: str = "000") -> ModelBundle:
    """The two-box world with faithful state ``Phi^{faithful}`` (default the symmetric PR box 000)."""
    labels_n = ["".join(map(str, k)) for k in itertools.product(range(2), repeat=3)]
    if faithful not in labels_n:
        raise InputError(f"faithful must be one of {labels_n}")
    e = np.array([0.0, 0.0, 1.0])
    pure = np.array([pure_state(a, b) for a, b in itertools.product(range(2), repeat=2)])
    spec = SystemSpec(
        dim=3,
        state_cone=PolyV(pure),
        effect_cone=PolyV(np.array([[sx, sy, 1.0] for sx in (1, -1) for sy in (1, -1)])),
        det_effect=e,
    )
    a00, a01 = EFFECT_BASIS[0], EFFECT_BASIS[1]
    effects = np.array([np.zeros(3), e, a00, e - a00, a01, e - a01])
    effect_labels = ("0", "e", "a0(0)", "a1(0)", "a0(1)", "a1(1)")

    nonlocal_ = [joint_table_to_bipartite(nonlocal_table(*map(int, k))) for k in labels_n]
    local_keys = list(itertools.product(range(2), repeat=4))
    local = [joint_table_to_bipartite(local_table(*k)) for k in local_keys]
    family = FiniteFamily(
        tuple(nonlocal_ + local),
        tuple([f"N:{k}" for k in labels_n] + ["L:" + "".join(map(str, k)) for k in local_keys]),
    )

    Phi = nonlocal_[labels_n.index(faithful)]
    D = np.array([transform_from_bipartite(P, Phi) for P in nonlocal_])
    autos = FiniteGroup(D, tuple(f"D{k}" for k in labels_n))

    # extremal non-automorphism maps: prepare sigma when effect a fires
    nontrivial = effects[2:]
    transforms = np.array([np.outer(s, a) for s in pure for a in nontrivial])

    return ModelBundle(
        name="two-box",
        params={} if faithful == "000" else {"faithful": faithful},
        spec=spec,
        pure_states=pure,
        extremal_effects=effects,
        faithful=Phi,
        automorphisms=autos,
        extremal_transforms=transforms,
        extremal_bipartite=family,
        observables=np.unique(2 * effects - e, axis=0),
        extras={
            "effect_labels": effect_labels,
            "pure_labels": tuple(f"w{a}{b}" for a, b in itertools.product(range(2), repeat=2)),
            "nonlocal": dict(zip(labels_n, nonlocal_)),
        },
    )
