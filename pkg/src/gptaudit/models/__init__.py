"""Constructors for the five toy theories and a name registry for the CLI."""

from __future__ import annotations

from .bundle import FiniteGroup, GhostPair, ModelBundle, OrthogonalGroup, PermutationGroup
from .classical import classical
from .clock import clock
from .rebit import rebit
from .spin_factor import spin_factor
from .two_box import JointTable, joint_table_to_bipartite, two_box

MODEL_NAMES = ("two-box", "clock", "rebit", "spin-factor", "classical")

__all__ = [
    "MODEL_NAMES",
    "ModelBundle",
    "FiniteGroup",
    "OrthogonalGroup",
    "PermutationGroup",
    "GhostPair",
    "JointTable",
    "joint_table_to_bipartite",
    "two_box",
    "clock",
    "rebit",
    "spin_factor",
    "classical",
    "build_model",
]


def build_model(name: str, n: int | None = None, group: str = "O", tol=None, seed: int = 0xD1CE) -> ModelBundle:
    """Construct a bundle from its CLI name."""
    from ..convex import DEFAULT_TOL
    from ..errors import InputError

    tol = tol or DEFAULT_TOL
    if name == "two-box":
        return two_box()
    if name == "clock":
        return clock(tol)
    if name == "rebit":
        return rebit(tol)
    if name == "spin-factor":
        return spin_factor(3 if n is None else n, group, tol, seed=seed)
    if name == "classical":
        return classical(2 if n is None else n)
    raise InputError(f"unknown model {name!r}; choose from {', '.join(MODEL_NAMES)}")
