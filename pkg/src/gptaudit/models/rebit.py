"""Rebit: the disk model read as quantum theory on a real two-dimensional space.

A Bloch vector ``r`` is sent to the real symmetric matrix
``Upsilon(r) = r . sigma / sqrt(2)`` with ``sigma = (sigma_z, sigma_x, I)``.
Operators on the pair use ``Upsilon(R) = 1/2 sum_nk R_nk sigma_n x sigma_k``.
``sigma_y`` is kept as a fourth operator only to build the ten quantum
operations ``rho -> sigma_i rho sigma_j``; on real matrices two of their
combinations collapse onto the same local map (the ghost pair).
"""

from __future__ import annotations

import itertools

import numpy as np

from ..convex import DEFAULT_TOL, Tolerance
from ..errors import InputError
from .bundle import GhostPair, ModelBundle
from .clock import clock

__all__ = [
    "SIGMA",
    "SIGMA4",
    "upsilon",
    "upsilon_inv",
    "bullet",
    "upsilon2",
    "upsilon2_inv",
    "star",
    "bullet2",
    "quantum_operation",
    "ten_generators",
    "kraus_action",
    "max_entangled",
    "ghost_pair",
    "rebit",
]

_I = np.eye(2)
_X = np.array([[0.0, 1.0], [1.0, 0.0]])
_Z = np.diag([1.0, -1.0])
_Y = np.array([[0.0, -1.0j], [1.0j, 0.0]])

SIGMA = (_Z, _X, _I)
SIGMA4 = (_Z.astype(complex), _X.astype(complex), _I.astype(complex), _Y)
_S2 = np.sqrt(2.0)


def upsilon(r) -> np.ndarray:
    r = np.asarray(r, dtype=float)
    if r.shape != (3,):
        raise InputError("Upsilon takes a vector of length 3")
    return sum(r[k] * SIGMA[k] for k in range(3)) / _S2


def upsilon_inv(A) -> np.ndarray:
    A = np.asarray(A)
    if A.shape != (2, 2):
        raise InputError("Upsilon^-1 takes a 2x2 matrix")
    return np.array([np.trace(A @ s) for s in SIGMA]).real / _S2


def bullet(A, B) -> float:
    """``Tr[AB]``, which equals ``Upsilon^-1(A) . Upsilon^-1(B)`` on symmetric matrices."""
    return float(np.trace(np.asarray(A) @ np.asarray(B)).real)


def upsilon2(R) -> np.ndarray:
    R = np.asarray(R, dtype=float)
    if R.shape != (3, 3):
        raise InputError("two-system Upsilon takes a 3x3 matrix")
    return 0.5 * sum(R[n, k] * np.kron(SIGMA[n], SIGMA[k]) for n, k in itertools.product(range(3), repeat=2))


def upsilon2_inv(X) -> np.ndarray:
    X = np.asarray(X)
    return np.array(
        [[0.5 * np.trace(X @ np.kron(SIGMA[i], SIGMA[j])).real for j in range(3)] for i in range(3)]
    )


def star(A, B) -> np.ndarray:
    """``Tr_2[(A x I)(I x B)]`` for ``A`` on systems (1, 2) and ``B`` on (2, 3)."""
    big = np.kron(np.asarray(A), _I) @ np.kron(_I, np.asarray(B))
    return np.einsum("ajbcjd->abcd", big.reshape((2,) * 6)).reshape(4, 4)


def bullet2(R, S) -> float:
    """Pairing of two bipartite matrices through the operator picture."""
    P = star(upsilon2(R), upsilon2(S))
    return float(sum(0.5 * np.trace(P @ np.kron(SIGMA[i], SIGMA[j])).real for i in range(3) for j in range(3)))


def quantum_operation(i: int, j: int) -> np.ndarray:
    """Complex 3x3 matrix of ``w -> Upsilon^-1[sigma_i Upsilon(w) sigma_j]`` (0-based, sigma_y last)."""
    cols = []
    for k in range(3):
        img = SIGMA4[i] @ (SIGMA[k] / _S2) @ SIGMA4[j]
        cols.append(np.array([np.trace(img @ s) for s in SIGMA]) / _S2)
    return np.array(cols).T


def ten_generators() -> tuple[tuple[str, ...], np.ndarray]:
    """The ten real matrices spanning the rebit transformations."""
    names, mats = [], []
    for i in range(4):
        names.append(f"A{i + 1}{i + 1}")
        mats.append(quantum_operation(i, i).real)
    for i, j in [(0, 1), (0, 2), (1, 2)]:
        names.append(f"ReA{i + 1}{j + 1}")
        mats.append(quantum_operation(i, j).real)
    for i in range(3):
        names.append(f"ImA{i + 1}4")
        mats.append(quantum_operation(i, 3).imag)
    return tuple(names), np.array(mats)


def kraus_action(terms, rho) -> np.ndarray:
    """``sum_k c_k (K_k x I) rho (K_k x I)^dagger`` for terms ``(c_k, K_k)``."""
    rho = np.asarray(rho, dtype=complex)
    out = np.zeros_like(rho)
    for c, K in terms:
        KI = np.kron(K, _I)
        out += c * KI @ rho @ KI.conj().T
    return out


def max_entangled() -> np.ndarray:
    """``(II + XX + YY + ZZ)/4``: the faithful operator completed with the sigma_y term."""
    return 0.25 * (np.kron(_I, _I) + np.kron(_X, _X) + np.kron(_Y, _Y) + np.kron(_Z, _Z))


# (coefficient, index into SIGMA4)
_GHOST1 = ((1.0, 1), (1.0, 0), (-1.0, 2))
_GHOST2 = ((1.0, 3),)


def ghost_pair(identify: bool = False) -> GhostPair:
    """``X.X + Z.Z - I.I`` versus ``Y.Y``.

    With ``identify`` the bipartite pictures are taken in the nine-dimensional
    real span, where transformations are determined by their local matrix.
    """
    local1 = sum(c * quantum_operation(k, k).real for c, k in _GHOST1)
    local2 = sum(c * quantum_operation(k, k).real for c, k in _GHOST2)
    if identify:
        return GhostPair("XX+ZZ-II vs YY", local1, local2, upsilon2(local1), upsilon2(local2), "9-dim real span")
    ext1 = kraus_action([(c, SIGMA4[k]) for c, k in _GHOST1], max_entangled()).real
    ext2 = kraus_action([(c, SIGMA4[k]) for c, k in _GHOST2], max_entangled()).real
    return GhostPair("XX+ZZ-II vs YY", local1, local2, ext1, ext2, "4x4 operator with sigma_y term")


def rebit(tol: Tolerance = DEFAULT_TOL, identify_ghosts: bool = False) -> ModelBundle:
    """Rebit bundle: the disk model plus the operator picture, generators and ghost pair."""
    base = clock(tol, name="rebit")
    names, gens = ten_generators()
    extras = dict(base.extras)
    extras.update(
        generator_names=names,
        generators=gens,
        F_phi=np.eye(3) / 3.0,
        A44=gens[3],
    )
    return ModelBundle(
        name="rebit",
        params={"identify_ghosts": True} if identify_ghosts else {},
        spec=base.spec,
        pure_states=base.pure_states,
        extremal_effects=base.extremal_effects,
        faithful=base.faithful,
        automorphisms=base.automorphisms,
        extremal_transforms=base.extremal_transforms,
        extremal_bipartite=base.extremal_bipartite,
        continuous=True,
        ghost_pairs=(ghost_pair(identify_ghosts),),
        extras=extras,
    )
