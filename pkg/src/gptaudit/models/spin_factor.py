"""Spin-factor models: the unit n-ball with Lorentz cones."""

from __future__ import annotations

import numpy as np

from ..convex import DEFAULT_TOL, Lorentz, Tolerance
from ..errors import InputError
from ..kernel import SystemSpec
from .bundle import ModelBundle, OrthogonalGroup
from .lorentz import ClockFamily, OrbitFamily, ball_effects, ball_pure_states

__all__ = ["spin_factor"]

GROUPS = ("O", "SO")


def spin_factor(
    n: int,
    group: str = "O",
    tol: Tolerance = DEFAULT_TOL,
    samples: int = 100_000,
    seed: int = 0xD1CE,
) -> ModelBundle:
    """n-ball model with faithful state ``I_{n+1}`` and local group O(n) or SO(n).

    For n = 2 the bipartite family is the clock's angle-parameterised one;
    for n >= 3 it is sampled (``samples`` Haar pairs from ``seed``).
    """
    if isinstance(n, bool) or not isinstance(n, (int, np.integer)) or not 2 <= n <= 8:
        raise InputError(f"spin factor needs 2 <= n <= 8, got {n!r}")
    group = str(group).upper()
    if group not in GROUPS:
        raise InputError(f"group must be one of {GROUPS}, got {group!r}")
    n = int(n)
    special = group == "SO"
    d = n + 1
    e = np.zeros(d)
    e[-1] = 1.0
    spec = SystemSpec(dim=d, state_cone=Lorentz(d), effect_cone=Lorentz(d), det_effect=e)
    if n == 2:
        family = ClockFamily(branches=(0,) if special else (0, 1))
        faithful_params = {"a": 0.0, "b": 0.0, "gamma": 1.0, "branch": 0}
    else:
        family = OrbitFamily(n, special, samples=samples, seed=seed)
        faithful_params = {"gamma": 1.0}
    rng = np.random.default_rng(seed)
    k = tol.grid_angle if n == 2 else max(4 * n, 256)
    return ModelBundle(
        name="spin-factor",
        params={"n": n, "group": group},
        spec=spec,
        pure_states=ball_pure_states(n, k, rng),
        extremal_effects=ball_effects(n, k, np.random.default_rng(seed)),
        faithful=np.eye(d),
        automorphisms=OrthogonalGroup(n, special),
        extremal_transforms=family,
        extremal_bipartite=family,
        continuous=True,
        extras={"faithful_params": faithful_params},
    )
