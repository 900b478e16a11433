"""Decision procedures for the postulates, with witnesses.

Every audit returns an :class:`AuditResult` whose status is one of
``holds``, ``fails`` or ``inconclusive``. A failing result always carries a
witness (a state, bipartite matrix or transformation pair) that can be
re-checked independently.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Any

import numpy as np

from .convex import (
    DEFAULT_TOL,
    FamilyPoint,
    FiniteFamily,
    Lorentz,
    Orthant,
    PolyV,
    Tolerance,
    conic_combination,
    convex_combination,
    is_extremal_in_hull,
    maximize_bilinear,
    minimize_bilinear,
)
from .errors import GptAuditError, Inapplicable, InputError, SingularFaithfulState
from .kernel import (
    chaotic_state,
    faithful_inverse,
    is_positive_transform,
    marginal,
    transform_from_bipartite,
    transpose_transform,
)
from .models.bundle import ModelBundle

__all__ = [
    "POSTULATES",
    "DEFAULT_SEED",
    "AuditResult",
    "ChshSetting",
    "TeleportOutcome",
    "audit_pfaith",
    "audit_faithe",
    "teleport_check",
    "teleport_candidate",
    "audit_purify",
    "audit_local_observability",
    "chsh_value",
    "chsh_max",
    "audit_all",
    "sample_mixed_states",
    "identity_atomicity",
]

POSTULATES = ("PFAITH", "FAITHE", "PURIFY", "LOCAL_OBSERVABILITY", "TELEPORT", "CHSH")
STATUSES = ("holds", "fails", "inconclusive")
DEFAULT_SEED = 0xD1CE
LOCAL_BOUND = 2.0
TSIRELSON = 2.0 * math.sqrt(2.0)
NO_SIGNALING_BOUND = 4.0


def _arr(x) -> Any:
    if isinstance(x, np.ndarray):
        return x.tolist()
    if isinstance(x, (np.floating, np.integer)):
        return x.item()
    if isinstance(x, dict):
        return {k: _arr(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_arr(v) for v in x]
    return x


@dataclass(frozen=True)
class AuditResult:
    postulate: str
    status: str
    value: float | None = None
    witness: dict | None = None
    notes: str = ""

    def __post_init__(self) -> None:
        if self.postulate not in POSTULATES:
            raise InputError(f"unknown postulate {self.postulate!r}")
        if self.status not in STATUSES:
            raise InputError(f"unknown status {self.status!r}")
        if self.status == "fails" and self.witness is None:
            raise InputError("a failing audit needs a witness")
        if self.postulate == "FAITHE" and self.status == "holds" and not (self.value is not None and 0 < self.value <= 1):
            raise InputError("FAITHE can only hold with a teleportation probability alpha in (0, 1]")
        if self.value is not None:
            object.__setattr__(self, "value", float(self.value))
        if self.witness is not None:
            object.__setattr__(self, "witness", _arr(self.witness))

    def to_json(self) -> dict:
        return {
            "postulate": self.postulate,
            "status": self.status,
            "value": self.value,
            "witness": self.witness,
            "notes": self.notes,
        }

    @classmethod
    def from_json(cls, d: dict) -> "AuditResult":
        return cls(d["postulate"], d["status"], d.get("value"), d.get("witness"), d.get("notes", ""))


def _point_witness(kind: str, p: FamilyPoint, **extra) -> dict:
    out = {"kind": kind}
    out.update(p.to_json())
    out.update(extra)
    return out


# ---------------------------------------------------------------------------
# PFAITH
# ---------------------------------------------------------------------------


def identity_atomicity(states, tol: Tolerance = DEFAULT_TOL) -> int:
    """Dimension of ``{B : B r_k is parallel to r_k for every listed extremal state}``.

    If the identity splits as ``A1 + A2`` into positive maps, each ``A_i``
    sends every extremal ray into itself, so ``A_i`` lies in this space.
    A one-dimensional space (multiples of I) certifies that the identity is
    atomic, hence that the faithful state is pure.
    """
    R = np.asarray(states, dtype=float)
    k, d = R.shape
    M = np.zeros((k * d, d * d + k))
    for s, r in enumerate(R):
        for i in range(d):
            M[s * d + i, i * d : (i + 1) * d] = r  # (B r)_i
            M[s * d + i, d * d + s] = -r[i]
    sv = np.linalg.svd(M, compute_uv=False)
    thr = max(tol.eps, 1e-12) * max(1.0, sv[0]) * max(M.shape)
    rank = int(np.sum(sv > thr))
    return M.shape[1] - rank


def _family_members(m: ModelBundle, rng: np.random.Generator, k: int = 64) -> list[FamilyPoint]:
    fam = m.extremal_bipartite
    if isinstance(fam, FiniteFamily):
        return [fam.point(i) for i in range(len(fam))]
    return fam.sample(rng, k)


def audit_pfaith(m: ModelBundle, tol: Tolerance = DEFAULT_TOL, seed: int = DEFAULT_SEED) -> AuditResult:
    """Pure, symmetric, preparationally faithful state."""
    Phi = m.faithful
    if Phi is None:
        return AuditResult("PFAITH", "fails", witness={"kind": "missing"}, notes="no faithful state")
    if np.abs(Phi - Phi.T).max() > tol.eps:
        return AuditResult("PFAITH", "fails", witness={"kind": "faithful", "matrix": Phi}, notes="faithful state is not symmetric")
    try:
        faithful_inverse(Phi)
    except SingularFaithfulState as exc:
        return AuditResult("PFAITH", "fails", witness={"kind": "faithful", "matrix": Phi}, notes=str(exc))

    rng = np.random.default_rng(seed)
    notes = []
    for p in _family_members(m, rng):
        A = transform_from_bipartite(p.psi, Phi)
        if not is_positive_transform(A, m.spec, m.pure_states, tol):
            return AuditResult(
                "PFAITH",
                "fails",
                witness=_point_witness("bipartite", p, transform=A),
                notes="bipartite state whose transformation is not positive: Phi is not preparationally faithful",
            )

    fam = m.extremal_bipartite
    if isinstance(fam, FiniteFamily):
        pure = is_extremal_in_hull(fam.stack(), Phi, tol)
        if not pure:
            w, _ = convex_combination(fam.stack(), Phi)
            used = [(fam.labels[i], float(w[i])) for i in np.flatnonzero(w > tol.eps)]
            invertible = sum(np.linalg.matrix_rank(P) == m.dim for P in fam.members)
            nullity = identity_atomicity(m.pure_states, tol)
            msg = "no pure preparationally faithful state"
            if invertible == 0:
                msg += f"; every pure bipartite state is singular, so none can be faithful"
            if nullity > 1:
                msg += f"; identity is non-atomic (rays fixed by a {nullity}-dimensional space of maps)"
            return AuditResult(
                "PFAITH",
                "fails",
                witness={"kind": "decomposition", "matrix": Phi, "weights": used},
                notes=msg,
            )
        notes.append("Phi is a vertex of the bipartite polytope")
    else:
        fp = m.extras.get("faithful_params")
        on_family = fp is not None and np.abs(fam.point(**fp).psi - Phi).max() <= tol.eps
        nullity = identity_atomicity(m.pure_states, tol)
        if not on_family or nullity != 1:
            return AuditResult(
                "PFAITH",
                "fails",
                witness={"kind": "faithful", "matrix": Phi, "nullity": nullity},
                notes="faithful state is not certified pure",
            )
        notes.append("Phi is a family member and the identity is atomic (nullity 1)")

    chi = chaotic_state(Phi, m.spec).l
    group = m.automorphisms
    autos = group.all() if group.finite else group.sample(rng, 32)
    drift = max(float(np.abs(D @ chi - chi).max()) for D in autos)
    closed = all(group.contains(transpose_transform(D, Phi), tol) for D in autos)
    notes.append(f"chi automorphism-invariant (max drift {drift:.1e})" if drift <= 1e-9 else f"chi moves by {drift:.1e}")
    notes.append("automorphisms closed under transposition" if closed else "transposition leaves the automorphism set")
    return AuditResult("PFAITH", "holds", notes="; ".join(notes))


# ---------------------------------------------------------------------------
# FAITHE and teleportation
# ---------------------------------------------------------------------------


def _require_pure_faithful(m: ModelBundle) -> np.ndarray:
    if m.faithful is None:
        raise Inapplicable("model has no faithful state")
    if not m.faithful_pure:
        raise Inapplicable("model has no pure preparationally faithful state; FAITHE presupposes one")
    return m.faithful


def audit_faithe(m: ModelBundle, tol: Tolerance = DEFAULT_TOL) -> AuditResult:
    """Is ``Phi^{-1}`` (up to scale) a bipartite effect?"""
    Phi = _require_pure_faithful(m)
    F = faithful_inverse(Phi)
    mn, p = minimize_bilinear(F, m.extremal_bipartite, tol)
    if mn < -tol.eps:
        return AuditResult(
            "FAITHE",
            "fails",
            value=mn,
            witness=_point_witness("bipartite", p, value=mn),
            notes="Phi^-1 is negative on a state, so no faithful state can satisfy FAITHE; "
            "no super-faithful state admissible; purification cannot be unique at every level",
        )
    mx, q = maximize_bilinear(F, m.extremal_bipartite, tol)
    alpha = 1.0 / mx
    return AuditResult(
        "FAITHE",
        "holds",
        value=alpha,
        witness=_point_witness("bipartite", q, value=mx),
        notes=f"alpha*Phi^-1 is an effect with alpha = {alpha:.6g}: teleportation succeeds with probability alpha "
        f"(min Phi^-1 on states {mn:.3g})",
    )


@dataclass(frozen=True)
class TeleportOutcome:
    feasible: bool
    alpha: float | None
    residual: float
    min_value: float
    max_value: float
    witness: dict | None = None

    def to_result(self) -> AuditResult:
        status = "holds" if self.feasible else "fails"
        why = []
        if self.alpha is None or self.alpha <= 0:
            why.append("no positive alpha")
        if self.residual > 0 and not self.feasible:
            why.append(f"residual {self.residual:.3g}")
        if self.min_value < 0:
            why.append(f"F takes value {self.min_value:.6g} on a state")
        w = self.witness if self.witness is not None else {"kind": "none"}
        return AuditResult(
            "TELEPORT",
            status,
            value=self.alpha,
            witness=dict(w, residual=self.residual, min_value=self.min_value),
            notes="teleportation identity Phi F Phi = alpha Phi " + ("holds with a valid effect" if self.feasible else "fails: " + ", ".join(why)),
        )


def teleport_check(m: ModelBundle, F, tol: Tolerance = DEFAULT_TOL) -> TeleportOutcome:
    """Does the bipartite functional ``F`` teleport through ``Phi``?

    Fits ``Phi F Phi = alpha Phi`` by least squares and checks that ``F``
    takes values in [0, 1] on the extremal bipartite family.
    """
    if m.faithful is None:
        raise Inapplicable("model has no faithful state")
    Phi = m.faithful
    F = np.asarray(F, dtype=float)
    X = Phi @ F @ Phi
    alpha = float(np.sum(X * Phi) / np.sum(Phi * Phi))
    residual = float(np.abs(X - alpha * Phi).max())
    mn, p = minimize_bilinear(F, m.extremal_bipartite, tol)
    mx, _ = maximize_bilinear(F, m.extremal_bipartite, tol)
    valid = mn >= -tol.eps and mx <= 1.0 + tol.eps
    feasible = alpha > tol.eps and residual <= tol.eps and valid
    witness = None if valid else _point_witness("bipartite", p, value=mn)
    return TeleportOutcome(feasible, alpha, residual, mn, mx, witness)


def teleport_candidate(m: ModelBundle, tol: Tolerance = DEFAULT_TOL) -> tuple[float, np.ndarray]:
    """``(alpha, alpha Phi^-1)`` with alpha the largest scale keeping the effect below 1."""
    Phi = _require_pure_faithful(m)
    F = faithful_inverse(Phi)
    mx, _ = maximize_bilinear(F, m.extremal_bipartite, tol)
    alpha = 1.0 / mx
    return alpha, alpha * F


# ---------------------------------------------------------------------------
# PURIFY
# ---------------------------------------------------------------------------


def sample_mixed_states(m: ModelBundle, rng: np.random.Generator, k: int) -> np.ndarray:
    """``k`` states drawn uniformly from the state body by box rejection."""
    cone = m.spec.state_cone
    d = m.dim
    out = []
    if isinstance(cone, Orthant):
        # probability vectors: free coordinates in the unit box, last one fills up
        while len(out) < k:
            x = rng.uniform(0.0, 1.0, d - 1)
            if x.sum() < 1.0:
                out.append(np.append(x, 1.0 - x.sum()))
        return np.array(out)
    if isinstance(cone, PolyV):
        hats = m.pure_states[:, :-1]
        lo, hi = hats.min(axis=0), hats.max(axis=0)
    else:
        lo, hi = -np.ones(d - 1), np.ones(d - 1)
    while len(out) < k:
        v = np.append(rng.uniform(lo, hi), 1.0)
        if isinstance(cone, Lorentz):
            ok = np.linalg.norm(v[:-1]) < 1.0
        else:
            ok = cone.contains(v)
        if ok:
            out.append(v)
    return np.array(out)


def _finite_purifiers(m: ModelBundle, omega: np.ndarray, tol: Tolerance) -> list[int]:
    fam = m.extremal_bipartite
    e = m.spec.det_effect
    margs = fam.stack() @ e
    thr = max(tol.eps, 1e-12) * 10
    return [int(i) for i in np.flatnonzero(np.abs(margs - omega).max(axis=1) <= thr)]


def audit_purify(
    m: ModelBundle,
    samples: int = 50,
    tol: Tolerance = DEFAULT_TOL,
    seed: int = DEFAULT_SEED,
) -> AuditResult:
    """Does every sampled mixed state have a pure bipartite purification?

    The chaotic state is probed first, then ``samples`` uniform mixed
    states. Parametric families use their closed-form purification; for
    those, a second purification is linked to the first by a local
    automorphism on the purifying side (uniqueness check).
    """
    if samples < 1:
        raise InputError("samples must be >= 1")
    rng = np.random.default_rng(seed)
    chi = m.spec.det_effect / float(m.spec.det_effect @ m.spec.det_effect)
    if m.faithful is not None:
        chi = chaotic_state(m.faithful, m.spec).l
    states = np.vstack([chi[None], sample_mixed_states(m, rng, samples)])
    fam = m.extremal_bipartite
    purified = []
    failed = []
    details: dict[str, Any] = {"tested": len(states)}
    if isinstance(fam, FiniteFamily):
        for k, w in enumerate(states):
            hits = _finite_purifiers(m, w, tol)
            (purified if hits else failed).append(k)
            if k == 0:
                details["chi_purifiers"] = [fam.labels[i] for i in hits]
    else:
        max_marg = 0.0
        max_link = 0.0
        for k, w in enumerate(states):
            ps = fam.purifications(w, rng, extra=1)
            res = float(np.abs(marginal(ps[0].psi, m.spec, "right").l - w).max())
            max_marg = max(max_marg, res)
            (purified if res <= tol.eps else failed).append(k)
            # uniqueness: psi2 = psi1 D^T for some local automorphism D
            Dt, *_ = np.linalg.lstsq(ps[0].psi, ps[1].psi, rcond=None)
            link = float(np.abs(ps[0].psi @ Dt - ps[1].psi).max())
            if not m.automorphisms.contains(Dt.T, Tolerance(1e-8)):
                link = max(link, 1.0)
            max_link = max(max_link, link)
        details["max_marginal_residual"] = max_marg
        details["max_uniqueness_residual"] = max_link
    details["purified"] = len(purified)
    value = len(purified) / len(states)
    if failed:
        k = failed[0]
        return AuditResult(
            "PURIFY",
            "fails",
            value=value,
            witness=dict({"kind": "state", "vector": states[k], "index": k}, **details),
            notes=f"{len(failed)} of {len(states)} sampled states have no pure purification",
        )
    note = f"all {len(states)} sampled states purified"
    if "max_uniqueness_residual" in details:
        uniq = details["max_uniqueness_residual"] <= 1e-6
        note += "; purifications unique up to a local automorphism" if uniq else "; uniqueness check failed"
    return AuditResult("PURIFY", "holds", value=value, witness=dict({"kind": "summary"}, **details), notes=note)


# ---------------------------------------------------------------------------
# local observability
# ---------------------------------------------------------------------------


def audit_local_observability(m: ModelBundle, tol: Tolerance = DEFAULT_TOL) -> AuditResult:
    """Look for transformation pairs equal on local states but different on bipartite ones."""
    if not m.ghost_pairs:
        return AuditResult("LOCAL_OBSERVABILITY", "holds", notes="no locally indistinguishable candidate pairs")
    worst = 0.0
    for g in m.ghost_pairs:
        local = float(np.abs(g.local1 - g.local2).max())
        ext = float(np.linalg.norm(g.ext1 - g.ext2))
        if local <= tol.eps and ext > tol.eps:
            return AuditResult(
                "LOCAL_OBSERVABILITY",
                "fails",
                value=ext,
                witness={
                    "kind": "ghost_pair",
                    "name": g.name,
                    "local_difference": local,
                    "bipartite_difference": ext,
                    "picture": g.picture,
                    "local": g.local1,
                    "ext1": g.ext1,
                    "ext2": g.ext2,
                },
                notes="transformations agree on every local state but act differently on Phi",
            )
        worst = max(worst, ext if local <= tol.eps else 0.0)
    return AuditResult(
        "LOCAL_OBSERVABILITY",
        "holds",
        value=worst,
        notes=f"{len(m.ghost_pairs)} candidate pair(s) coincide on bipartite states too ({m.ghost_pairs[0].picture})",
    )


# ---------------------------------------------------------------------------
# CHSH
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class ChshSetting:
    """Dichotomic measurements: ``alice[x] = (a0, a1)``, ``bob[y] = (b0, b1)`` with ``a0 + a1 = e``."""

    alice: tuple
    bob: tuple
    det_effect: np.ndarray = field(default_factory=lambda: np.array([0.0, 0.0, 1.0]))

    def __post_init__(self) -> None:
        e = np.asarray(self.det_effect, dtype=float)
        pairs = []
        for side in (self.alice, self.bob):
            if len(side) != 2:
                raise InputError("each party needs two settings")
            cur = []
            for a0, a1 in side:
                a0, a1 = np.asarray(a0, dtype=float), np.asarray(a1, dtype=float)
                if a0.shape != e.shape or a1.shape != e.shape:
                    raise InputError("effect dimension does not match the deterministic effect")
                if np.abs(a0 + a1 - e).max() > 1e-9:
                    raise InputError("effect pair does not sum to the deterministic effect")
                cur.append((a0, a1))
            pairs.append(tuple(cur))
        object.__setattr__(self, "alice", pairs[0])
        object.__setattr__(self, "bob", pairs[1])
        object.__setattr__(self, "det_effect", e)

    @classmethod
    def from_observables(cls, alice, bob, det_effect) -> "ChshSetting":
        """Build from observable vectors ``O = a0 - a1 = 2 a0 - e``."""
        e = np.asarray(det_effect, dtype=float)
        mk = lambda O: ((e + np.asarray(O)) / 2.0, (e - np.asarray(O)) / 2.0)  # noqa: E731
        return cls(tuple(mk(O) for O in alice), tuple(mk(O) for O in bob), e)

    def observables(self) -> tuple[np.ndarray, np.ndarray]:
        A = np.array([a0 - a1 for a0, a1 in self.alice])
        B = np.array([b0 - b1 for b0, b1 in self.bob])
        return A, B

    def to_json(self) -> dict:
        A, B = self.observables()
        return {"alice": A.tolist(), "bob": B.tolist()}


def chsh_value(Psi, s: ChshSetting) -> float:
    """``E00 + E01 + E10 - E11`` with ``E_xy = sum_ij (-1)^(i+j) Psi(a_i^x, b_j^y)``."""
    Psi = np.asarray(Psi, dtype=float)
    A, B = s.observables()
    if Psi.shape != (A.shape[1], B.shape[1]):
        raise InputError("bipartite matrix and effects have different dimensions")
    E = A @ Psi @ B.T
    return float(E[0, 0] + E[0, 1] + E[1, 0] - E[1, 1])


def _finite_chsh(m: ModelBundle, tol: Tolerance):
    obs = np.asarray(m.observables, dtype=float)
    fam = m.extremal_bipartite
    best = (-np.inf, None, None)
    for k, Psi in enumerate(fam.members):
        img = obs @ Psi.T  # rows: Psi O for each candidate Bob observable
        uniq, first = np.unique(np.round(img, 12), axis=0, return_index=True)
        bi = first[np.argsort(first)]
        plus = img[bi][:, None, :] + img[bi][None, :, :]
        minus = img[bi][:, None, :] - img[bi][None, :, :]
        ap = (plus @ obs.T)  # Alice's response to each observable
        am = (minus @ obs.T)
        vals = ap.max(axis=-1) + am.max(axis=-1)
        j0, j1 = np.unravel_index(int(np.argmax(vals)), vals.shape)
        v = float(vals[j0, j1])
        if v > best[0] + tol.eps:
            x0 = int(np.argmax(ap[j0, j1]))
            x1 = int(np.argmax(am[j0, j1]))
            setting = ChshSetting.from_observables((obs[x0], obs[x1]), (obs[bi[j0]], obs[bi[j1]]), m.spec.det_effect)
            best = (v, fam.point(k), setting)
    return best


def chsh_max(m: ModelBundle, tol: Tolerance = DEFAULT_TOL) -> AuditResult:
    """Largest CHSH value over pure bipartite states and dichotomic measurements.

    Finite models are enumerated exhaustively; parametric ones use their
    family's grid search with one refinement pass. Status is ``holds`` when
    the value respects the local bound 2.
    """
    fam = m.extremal_bipartite
    if isinstance(fam, FiniteFamily):
        value, p, setting = _finite_chsh(m, tol)
        witness = _point_witness("chsh", p, setting=setting.to_json(), value=value)
    else:
        value, p = fam.chsh_max(tol)
        mu, delta = p.params["mu"], p.params["delta"]
        witness = _point_witness("chsh", p, value=value, bob_angles=[mu, mu + delta])
    status = "holds" if value <= LOCAL_BOUND + tol.eps else "fails"
    notes = f"local bound {LOCAL_BOUND:g}, Tsirelson {TSIRELSON:.6f}, no-signaling {NO_SIGNALING_BOUND:g}"
    return AuditResult("CHSH", status, value=value, witness=witness, notes=notes)


# ---------------------------------------------------------------------------
# all together
# ---------------------------------------------------------------------------


def audit_all(
    m: ModelBundle,
    tol: Tolerance = DEFAULT_TOL,
    seed: int = DEFAULT_SEED,
    purify_samples: int = 50,
) -> list[AuditResult]:
    """PFAITH, FAITHE, PURIFY, LOCAL_OBSERVABILITY and CHSH in that order."""
    runs = [
        ("PFAITH", lambda: audit_pfaith(m, tol, seed)),
        ("FAITHE", lambda: audit_faithe(m, tol)),
        ("PURIFY", lambda: audit_purify(m, purify_samples, tol, seed)),
        ("LOCAL_OBSERVABILITY", lambda: audit_local_observability(m, tol)),
        ("CHSH", lambda: chsh_max(m, tol)),
    ]
    out = []
    for name, fn in runs:
        try:
            out.append(fn())
        except GptAuditError as exc:
            out.append(AuditResult(name, "inconclusive", notes=f"{type(exc).__name__}: {exc}"))
    return out
