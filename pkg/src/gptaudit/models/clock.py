"""Two-clock world: a disk of states with self-dual Lorentz cones."""

from __future__ import annotations

import numpy as np

from ..convex import DEFAULT_TOL, Lorentz, Tolerance
from ..kernel import SystemSpec
from .bundle import ModelBundle, OrthogonalGroup
from .lorentz import ClockFamily, ball_effects, ball_pure_states

__all__ = ["clock", "disk_spec"]


def disk_spec() -> SystemSpec:
    return SystemSpec(dim=3, state_cone=Lorentz(3), effect_cone=Lorentz(3), det_effect=np.array([0.0, 0.0, 1.0]))


def clock(tol: Tolerance = DEFAULT_TOL, special: bool = False, name: str = "clock") -> ModelBundle:
    """Disk model with faithful state ``Phi = I_3`` and local group O(2) (or SO(2))."""
    family = ClockFamily(branches=(0,) if special else (0, 1))
    return ModelBundle(
        name=name,
        params={},
        spec=disk_spec(),
        pure_states=ball_pure_states(2, tol.grid_angle),
        extremal_effects=ball_effects(2, tol.grid_angle),
        faithful=np.eye(3),
        automorphisms=OrthogonalGroup(2, special),
        extremal_transforms=family,
        extremal_bipartite=family,
        continuous=True,
        extras={"faithful_params": {"a": 0.0, "b": 0.0, "gamma": 1.0, "branch": 0}},
    )
