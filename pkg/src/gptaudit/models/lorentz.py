"""Building blocks shared by the Lorentz-cone models (clock, rebit, spin factors).

The extremal transformations are ``G1 A^g G2`` with ``G1, G2`` local
automorphisms and ``A^g`` the elliptical map below; the pure bipartite
states are their transposes divided by ``g``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import minimize_scalar

from ..convex import DEFAULT_TOL, FamilyPoint, Tolerance, refine_coordinatewise
from ..errors import InputError
from .bundle import OrthogonalGroup, haar_orthogonal

__all__ = [
    "rotation",
    "reflection",
    "flip",
    "elliptic_map",
    "ClockFamily",
    "OrbitFamily",
    "ball_pure_states",
    "ball_effects",
    "lorentz_chsh_canonical",
]

TWO_PI = 2.0 * math.pi


def rotation(t: float) -> np.ndarray:
    """Rotation of the disk by angle ``t`` (3x3 Bloch matrix)."""
    c, s = math.cos(t), math.sin(t)
    return np.array([[c, -s, 0.0], [s, c, 0.0], [0.0, 0.0, 1.0]])


def reflection(t: float) -> np.ndarray:
    """Reflection of the disk through the axis at angle ``t``."""
    c, s = math.cos(2 * t), math.sin(2 * t)
    return np.array([[c, s, 0.0], [s, -c, 0.0], [0.0, 0.0, 1.0]])


def flip(n: int = 2) -> np.ndarray:
    """``diag(1, -1, 1, ..., 1)``: reflection through the first axis."""
    d = np.ones(n + 1)
    d[1] = -1.0
    return np.diag(d)


def _sqrt2g(gamma):
    return np.sqrt(np.maximum(2.0 * np.asarray(gamma, dtype=float) - 1.0, 0.0))


def elliptic_map(gamma: float, n: int = 2) -> np.ndarray:
    """Elliptical map ``A^g`` on the n-ball, ``g`` in [1/2, 1].

    g = 1 is the identity, g = 1/2 projects every state onto the pure state
    along the first axis.
    """
    if not 0.5 - 1e-12 <= gamma <= 1.0 + 1e-12:
        raise InputError(f"gamma must lie in [1/2, 1], got {gamma}")
    A = np.zeros((n + 1, n + 1))
    A[0, 0] = A[n, n] = gamma
    A[0, n] = A[n, 0] = 1.0 - gamma
    for i in range(1, n):
        A[i, i] = float(_sqrt2g(gamma))
    return A


def _basis_parts(n: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    # A^g = g*M1 + (1-g)*M2 + sqrt(2g-1)*M3
    M1 = np.zeros((n + 1, n + 1))
    M1[0, 0] = M1[n, n] = 1.0
    M2 = np.zeros((n + 1, n + 1))
    M2[0, n] = M2[n, 0] = 1.0
    M3 = np.zeros((n + 1, n + 1))
    for i in range(1, n):
        M3[i, i] = 1.0
    return M1, M2, M3


def ball_pure_states(n: int, k: int, rng: np.random.Generator | None = None) -> np.ndarray:
    """``k`` pure states ``(u, 1)`` on the unit sphere: an angle grid for n = 2, seeded samples otherwise."""
    if n == 2:
        t = np.arange(k) * TWO_PI / k
        return np.column_stack([np.cos(t), np.sin(t), np.ones(k)])
    rng = rng or np.random.default_rng(0xD1CE)
    u = rng.standard_normal((k, n))
    u /= np.linalg.norm(u, axis=1, keepdims=True)
    axes = np.vstack([np.eye(n), -np.eye(n)])
    u = np.vstack([axes, u])[:k] if k > 2 * n else axes[:k]
    return np.column_stack([u, np.ones(len(u))])


def ball_effects(n: int, k: int, rng: np.random.Generator | None = None) -> np.ndarray:
    """Extremal effects: 0, e and ``(u, 1)/2`` for ``k`` unit vectors ``u``."""
    pure = ball_pure_states(n, k, rng)
    zero = np.zeros(n + 1)
    e = zero.copy()
    e[-1] = 1.0
    return np.vstack([zero, e, pure / 2.0])


def _dicho_support(w: np.ndarray) -> np.ndarray:
    # best response sum_x O.w over observables O = 2a - e: either (u, 0) or +-e
    return np.maximum(np.linalg.norm(w[..., :-1], axis=-1), np.abs(w[..., -1]))


def lorentz_chsh_canonical(psi: np.ndarray, tol: Tolerance = DEFAULT_TOL, mu_samples: int = 8):
    """CHSH maximum for a bipartite matrix whose hat block is diagonal.

    Bob measures in the plane of the first two axes: ``v0`` at angle ``mu``
    and ``v1`` at ``mu + delta``; Alice plays her best response in closed
    form. Returns ``(value, mu, delta)`` after one refinement pass.
    """
    d = psi.shape[0]

    def obs(t):
        t = np.asarray(t, dtype=float)
        o = np.zeros(t.shape + (d,))
        o[..., 0] = np.cos(t)
        o[..., 1] = np.sin(t)
        return o

    def value(mu, delta):
        v0, v1 = obs(mu), obs(mu + delta)
        return _dicho_support((v0 + v1) @ psi.T) + _dicho_support((v0 - v1) @ psi.T)

    mus = np.arange(mu_samples) * (math.pi / 2) / mu_samples
    deltas = np.arange(tol.grid_angle) * TWO_PI / tol.grid_angle
    grid = value(mus[:, None], deltas[None, :])
    i, j = np.unravel_index(int(np.argmax(grid)), grid.shape)
    best = float(grid[i, j])
    step = TWO_PI / tol.grid_angle
    x, fx = refine_coordinatewise(
        lambda p: -float(value(p[0], p[1])),
        [mus[i], deltas[j]],
        [(mus[i] - step, mus[i] + step), (deltas[j] - step, deltas[j] + step)],
    )
    if -fx > best + tol.eps:
        return -fx, float(x[0]), float(x[1])
    return best, float(mus[i]), float(deltas[j])


# ---------------------------------------------------------------------------
# clock family: parameters (a, b, gamma, branch)
# ---------------------------------------------------------------------------


_P0 = np.diag([0.0, 0.0, 1.0])
_P1 = np.diag([1.0, 1.0, 0.0])
_P2 = np.array([[0.0, -1.0, 0.0], [1.0, 0.0, 0.0], [0.0, 0.0, 0.0]])
_PS = (_P0, _P1, _P2)  # R_t = P0 + cos t P1 + sin t P2


@dataclass(frozen=True)
class ClockFamily:
    """Pure bipartite states ``(R_a A^g Z^k R_b)^T / g`` of the disk model.

    ``branch`` k = 1 inserts the reflection ``Z = diag(1, -1, 1)`` so that the
    four rotation/reflection combinations are all covered. ``branches=(0,)``
    restricts the local group to SO(2).
    """

    branches: tuple = (0, 1)
    finite: bool = field(default=False, init=False)

    def transform(self, a: float, b: float, gamma: float, branch: int = 0) -> np.ndarray:
        Z = flip(2) if branch else np.eye(3)
        return rotation(a) @ elliptic_map(gamma) @ Z @ rotation(b)

    def member(self, a: float, b: float, gamma: float, branch: int = 0) -> np.ndarray:
        return self.transform(a, b, gamma, branch).T / gamma

    def point(self, a: float, b: float, gamma: float, branch: int = 0) -> FamilyPoint:
        params = {"a": float(a) % TWO_PI, "b": float(b) % TWO_PI, "gamma": float(gamma), "branch": int(branch)}
        return FamilyPoint(self.member(a, b, gamma, branch), f"clock[{params['branch']}]", params)

    def _kernel(self, F: np.ndarray, gammas: np.ndarray, branch: int) -> np.ndarray:
        # <F, (R_a C R_b)^T> = tr(F R_a C R_b) = sum_pq u_p(a) u_q(b) tr(F P_p C P_q)
        Z = flip(2) if branch else np.eye(3)
        parts = [M @ Z for M in _basis_parts(2)]
        K = np.array([[[np.trace(F @ P @ M @ Q) for Q in _PS] for P in _PS] for M in parts])
        coef = np.stack([gammas, 1.0 - gammas, _sqrt2g(gammas)], axis=1)
        return np.einsum("gm,mpq->gpq", coef, K)

    def _best_a(self, F: np.ndarray, b: float, gamma: float, branch: int) -> tuple[float, float]:
        K = self._kernel(F, np.array([gamma]), branch)[0]
        v = K @ np.array([1.0, math.cos(b), math.sin(b)])
        return (v[0] - math.hypot(v[1], v[2])) / gamma, math.atan2(-v[2], -v[1])

    def minimize(self, F, tol: Tolerance = DEFAULT_TOL) -> tuple[float, FamilyPoint]:
        F = np.asarray(F, dtype=float)
        if F.shape != (3, 3):
            raise InputError(f"bipartite effect must be 3x3, got {F.shape}")
        gammas = np.linspace(0.5, 1.0, tol.grid_gamma)
        bs = np.arange(tol.grid_angle) * TWO_PI / tol.grid_angle
        ub = np.stack([np.ones_like(bs), np.cos(bs), np.sin(bs)], axis=1)
        cands = []
        for branch in self.branches:
            V = np.einsum("gpq,bq->gbp", self._kernel(F, gammas, branch), ub)
            vals = (V[..., 0] - np.hypot(V[..., 1], V[..., 2])) / gammas[:, None]
            cands.append(vals)
        allv = np.stack(cands)  # (branch, gamma, b)
        best = float(allv.min())
        k, g, j = (int(x[0]) for x in np.nonzero(allv <= best + tol.eps))
        branch = self.branches[k]
        gamma, b = float(gammas[g]), float(bs[j])
        value, a = self._best_a(F, b, gamma, branch)

        step_b = TWO_PI / tol.grid_angle
        step_g = 0.5 / (tol.grid_gamma - 1)
        x, fx = refine_coordinatewise(
            lambda p: self._best_a(F, p[0], p[1], branch)[0],
            [b, gamma],
            [(b - step_b, b + step_b), (max(0.5, gamma - step_g), min(1.0, gamma + step_g))],
        )
        if fx < value - tol.eps:
            b, gamma = float(x[0]), float(x[1])
            value, a = self._best_a(F, b, gamma, branch)
        return float(value), self.point(a, b, gamma, branch)

    def sample(self, rng: np.random.Generator, k: int) -> list[FamilyPoint]:
        out = []
        for _ in range(k):
            a, b = rng.uniform(0, TWO_PI, 2)
            out.append(self.point(a, b, rng.uniform(0.5, 1.0), int(rng.choice(self.branches))))
        return out

    def purifications(self, l, rng: np.random.Generator | None = None, extra: int = 1) -> list[FamilyPoint]:
        """Closed-form purification ``g = 1/(1+r)``, ``b = -phi``, then ``extra`` alternatives.

        The alternatives differ by a local automorphism on the purifying side
        (random ``a`` and branch), which leaves the marginal untouched.
        """
        l = np.asarray(l, dtype=float)
        r = math.hypot(l[0], l[1])
        if r > 1.0 + 1e-12:
            raise InputError("state lies outside the disk")
        gamma = 1.0 / (1.0 + r)
        phi = math.atan2(l[1], l[0]) if r > 0 else 0.0
        out = [self.point(0.0, -phi, gamma, self.branches[0])]
        rng = rng or np.random.default_rng(0xD1CE)
        for _ in range(extra):
            out.append(self.point(rng.uniform(0, TWO_PI), -phi, gamma, int(rng.choice(self.branches))))
        return out

    def chsh_max(self, tol: Tolerance = DEFAULT_TOL):
        """CHSH maximum over the family; by automorphism covariance only ``A^g`` matters."""
        return _chsh_over_gamma(2, tol)


def _chsh_over_gamma(n: int, tol: Tolerance):
    gammas = np.linspace(0.5, 1.0, max(8, tol.grid_gamma // 10))
    vals = [lorentz_chsh_canonical(elliptic_map(g, n).T / g, tol)[0] for g in gammas]
    i = int(np.argmax(vals))
    g0 = float(gammas[i])
    step = gammas[1] - gammas[0]
    res = minimize_scalar(
        lambda g: -lorentz_chsh_canonical(elliptic_map(g, n).T / g, tol)[0],
        bounds=(max(0.5, g0 - step), min(1.0, g0 + step)),
        method="bounded",
    )
    if -res.fun > vals[i] + tol.eps:
        g0 = float(res.x)
    psi = elliptic_map(g0, n).T / g0
    value, mu, delta = lorentz_chsh_canonical(psi, tol)
    return value, FamilyPoint(psi, "canonical", {"gamma": g0, "mu": mu, "delta": delta})


# ---------------------------------------------------------------------------
# spin-factor family: sampled orbits of O(n) / SO(n)
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class OrbitFamily:
    """Pure bipartite states ``(G1 A^g G2)^T / g`` with ``G1, G2`` in O(n) or SO(n).

    Minimisation evaluates the group's explicit witness elements first and
    then every pair from a seeded pool of ``ceil(sqrt(samples))`` Haar
    matrices, each over the gamma grid. A sample only replaces the
    incumbent when it is lower by more than eps.
    """

    n: int
    special: bool = False
    samples: int = 100_000
    seed: int = 0xD1CE
    chunk: int = 10_000
    finite: bool = field(default=False, init=False)

    @property
    def group(self) -> OrthogonalGroup:
        return OrthogonalGroup(self.n, self.special)

    def member_from(self, G1: np.ndarray, G2: np.ndarray, gamma: float) -> np.ndarray:
        return (G1 @ elliptic_map(gamma, self.n) @ G2).T / gamma

    def point(self, gamma: float = 1.0, G1=None, G2=None) -> FamilyPoint:
        eye = np.eye(self.n + 1)
        G1 = eye if G1 is None else _embed_stack(np.asarray(G1, dtype=float)[None])[0]
        G2 = eye if G2 is None else _embed_stack(np.asarray(G2, dtype=float)[None])[0]
        return FamilyPoint(self.member_from(G1, G2, gamma), "orbit", {"gamma": float(gamma)})

    def _values(self, F: np.ndarray, G1: np.ndarray, G2: np.ndarray, gammas: np.ndarray) -> np.ndarray:
        # <F, (G1 A G2)^T>/g = tr(G2 F G1 A)/g, A = g M1 + (1-g) M2 + s M3
        Y = G2 @ F @ G1
        t = np.stack([np.einsum("kij,ji->k", Y, M) for M in _basis_parts(self.n)], axis=1)
        return _gamma_values(t, gammas)

    def _pool(self) -> np.ndarray:
        k = int(math.ceil(math.sqrt(self.samples)))
        return _embed_stack(haar_orthogonal(np.random.default_rng(self.seed), self.n, k, self.special))

    def _pool_coefficients(self, F: np.ndarray, pool: np.ndarray) -> np.ndarray:
        """``t[i, j]`` = the three coefficients for the pair ``G1 = pool[i], G2 = pool[j]``."""
        n = self.n
        FG = F @ pool  # F G1 for each pool element
        R = pool  # G2
        y = lambda a, b: R[:, a, :] @ FG[:, :, b].T  # noqa: E731  Y_ab over (G2, G1)
        y00, ynn, y0n, yn0 = y(0, 0), y(n, n), y(0, n), y(n, 0)
        trace = R.reshape(len(R), -1) @ np.swapaxes(FG, 1, 2).reshape(len(FG), -1).T
        t = np.stack([y00 + ynn, y0n + yn0, trace - y00 - ynn], axis=-1)
        return np.swapaxes(t, 0, 1)  # index order (G1, G2)

    def minimize(self, F, tol: Tolerance = DEFAULT_TOL) -> tuple[float, FamilyPoint]:
        F = np.asarray(F, dtype=float)
        d = self.n + 1
        if F.shape != (d, d):
            raise InputError(f"bipartite effect must be {d}x{d}, got {F.shape}")
        gammas = np.linspace(0.5, 1.0, tol.grid_gamma)
        eye = np.eye(d)[None]
        wit = self.group.witnesses() + [("identity", np.eye(d))]
        G1 = np.stack([w for _, w in wit])
        vals = self._values(F, G1, np.repeat(eye, len(wit), 0), gammas)
        k, g = np.unravel_index(int(np.argmin(vals)), vals.shape)
        best = (float(vals[k, g]), G1[k], np.eye(d), float(gammas[g]), {"source": wit[k][0]})

        pool = self._pool()
        t = self._pool_coefficients(F, pool).reshape(-1, 3)
        for lo in range(0, len(t), self.chunk):
            vals = _gamma_values(t[lo : lo + self.chunk], gammas)
            k, g = np.unravel_index(int(np.argmin(vals)), vals.shape)
            if vals[k, g] < best[0] - tol.eps:
                i, j = divmod(lo + int(k), len(pool))
                best = (float(vals[k, g]), pool[i], pool[j], float(gammas[g]), {"source": "sample", "pair": [i, j]})

        value, Ga, Gb, gamma, meta = best
        step = 0.5 / (tol.grid_gamma - 1)
        res = minimize_scalar(
            lambda x: float(self._values(F, Ga[None], Gb[None], np.array([x]))[0, 0]),
            bounds=(max(0.5, gamma - step), min(1.0, gamma + step)),
            method="bounded",
        )
        if res.fun < value - tol.eps:
            value, gamma = float(res.fun), float(res.x)
        params = dict(meta, gamma=gamma, G1=Ga[: self.n, : self.n], G2=Gb[: self.n, : self.n])
        return value, FamilyPoint(self.member_from(Ga, Gb, gamma), f"orbit[{meta['source']}]", params)

    def sample(self, rng: np.random.Generator, k: int) -> list[FamilyPoint]:
        A = _embed_stack(haar_orthogonal(rng, self.n, k, self.special))
        B = _embed_stack(haar_orthogonal(rng, self.n, k, self.special))
        gs = rng.uniform(0.5, 1.0, k)
        return [
            FamilyPoint(self.member_from(A[i], B[i], gs[i]), "orbit[sample]", {"gamma": float(gs[i])})
            for i in range(k)
        ]

    def purifications(self, l, rng: np.random.Generator | None = None, extra: int = 1) -> list[FamilyPoint]:
        """Closed-form purification with ``G2^T e_1`` along the Bloch vector, plus ``extra`` variants."""
        l = np.asarray(l, dtype=float)
        x = l[:-1]
        r = float(np.linalg.norm(x))
        if r > 1.0 + 1e-12:
            raise InputError("state lies outside the ball")
        gamma = 1.0 / (1.0 + r)
        n = self.n
        G2t = np.eye(n)
        if r > 0:
            w = np.eye(n)[0] - x / r
            if np.linalg.norm(w) > 1e-12:
                G2t = np.eye(n) - 2.0 * np.outer(w, w) / (w @ w)
                if self.special:
                    G2t = G2t @ np.diag([1.0, -1.0] + [1.0] * (n - 2))
        G2 = _embed_stack(G2t.T[None])[0]
        out = [FamilyPoint(self.member_from(np.eye(n + 1), G2, gamma), "orbit[purify]", {"gamma": gamma})]
        rng = rng or np.random.default_rng(self.seed)
        for G1 in _embed_stack(haar_orthogonal(rng, n, extra, self.special)):
            out.append(FamilyPoint(self.member_from(G1, G2, gamma), "orbit[purify]", {"gamma": gamma}))
        return out

    def chsh_max(self, tol: Tolerance = DEFAULT_TOL):
        """CHSH maximum; automorphism covariance reduces the family to ``A^g``."""
        return _chsh_over_gamma(self.n, tol)


def _gamma_values(t: np.ndarray, gammas: np.ndarray) -> np.ndarray:
    coef = np.stack([gammas, 1.0 - gammas, _sqrt2g(gammas)], axis=0)
    return (t @ coef) / gammas[None, :]


def _embed_stack(G: np.ndarray) -> np.ndarray:
    k, n, _ = G.shape
    out = np.zeros((k, n + 1, n + 1))
    out[:, :n, :n] = G
    out[:, n, n] = 1.0
    return out
