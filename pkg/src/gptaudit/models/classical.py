"""Classical simplex theories in the probability-vector basis."""

from __future__ import annotations

import itertools

import numpy as np

from ..convex import FiniteFamily, Orthant
from ..errors import InputError
from ..kernel import SystemSpec
from .bundle import ModelBundle, PermutationGroup

__all__ = ["classical"]


def classical(n: int) -> ModelBundle:
    """Simplex with n + 1 vertices; states are probability vectors and ``e`` is all-ones.

    The cone-isomorphism state ``I/(n+1)`` exists but is a mixture of the
    product states ``w_i x w_i``, so it is carried with ``faithful_pure=False``.
    """
    if isinstance(n, bool) or not isinstance(n, (int, np.integer)) or not 1 <= n <= 8:
        raise InputError(f"classical model needs 1 <= n <= 8, got {n!r}")
    d = int(n) + 1
    eye = np.eye(d)
    spec = SystemSpec(dim=d, state_cone=Orthant(d), effect_cone=Orthant(d), det_effect=np.ones(d))
    cube = np.array(list(itertools.product((0.0, 1.0), repeat=d)))
    transforms = np.array([np.outer(eye[i], eye[j]) for i in range(d) for j in range(d)])
    family = FiniteFamily(tuple(transforms), tuple(f"w{i}w{j}" for i in range(d) for j in range(d)))
    return ModelBundle(
        name="classical",
        params={"n": int(n)},
        spec=spec,
        pure_states=eye,
        extremal_effects=cube,
        faithful=eye / d,
        automorphisms=PermutationGroup(d),
        extremal_transforms=transforms,
        extremal_bipartite=family,
        faithful_pure=False,
        observables=2.0 * cube - 1.0,
        extras={"transform_labels": tuple(f"w{i}a{j}" for i in range(d) for j in range(d))},
    )
