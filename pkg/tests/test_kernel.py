import numpy as np
import pytest

from gptaudit.convex import Lorentz, Tolerance
from gptaudit.errors import InputError, SingularFaithfulState, ZeroProbability
from gptaudit.kernel import (
    StateVec,
    SystemSpec,
    apply,
    bip_apply,
    bipartite_from_transform,
    chaotic_state,
    condition,
    eval_bilinear,
    faithful_inverse,
    is_effect,
    is_normalized_bipartite,
    is_positive_transform,
    marginal,
    pair,
    probability,
    transform_from_bipartite,
    transpose_transform,
)
from gptaudit.models import classical, clock, two_box
from gptaudit.models.lorentz import elliptic_map, reflection, rotation

SEEDS = range(10)
CHI = np.array([0.0, 0.0, 1.0])


@pytest.fixture(scope="module")
def pr():
    return two_box()


def _pure(m, label):
    return m.pure_states[m.extras["pure_labels"].index(label)]


def test_system_spec_validation():
    with pytest.raises(InputError):
        SystemSpec(3, Lorentz(3), Lorentz(3), np.array([0.0, 1.0]))
    with pytest.raises(InputError):
        SystemSpec(3, Lorentz(3), Lorentz(3), np.array([0.0, 0.0, -1.0]))


def test_statevec_is_read_only():
    w = StateVec([1.0, 0.0, 1.0])
    with pytest.raises(ValueError):
        w.l[0] = 2.0


def test_pair_examples(pr):
    a00 = pr.extremal_effects[2]
    assert pair(a00, _pure(pr, "w00")) == pytest.approx(1.0)
    for w in pr.pure_states:
        assert pair(pr.spec.det_effect, w) == pytest.approx(1.0)
    assert pair([0.5, 0.0, 0.5], CHI) == 0.5
    with pytest.raises(InputError):
        pair([1.0, 0.0], CHI)


def test_apply_examples(pr):
    w = np.array([0.3, -0.2, 1.0])
    assert np.array_equal(apply(np.eye(3), w).l, w)
    assert not apply(np.eye(3), w).normalized
    D111 = transform_from_bipartite(pr.extras["nonlocal"]["111"], pr.faithful)
    # independent oracle: D = Psi^T Phi^-1 by explicit inverse
    D_oracle = pr.extras["nonlocal"]["111"].T @ np.linalg.inv(pr.faithful)
    assert np.allclose(D111, D_oracle)
    assert np.allclose(apply(D111, _pure(pr, "w00")).l, D_oracle @ [1.0, 0.0, 1.0])
    # D111 is a quarter turn of the square
    assert np.allclose(np.linalg.matrix_power(D111, 4), np.eye(3))
    assert not np.allclose(np.linalg.matrix_power(D111, 2), np.eye(3))
    x, y = 0.4, -0.3
    assert np.allclose(apply(elliptic_map(0.5), [x, y, 1.0]).l, [(x + 1) / 2, 0.0, (x + 1) / 2])


@pytest.mark.parametrize("seed", SEEDS)
def test_apply_probability_consistency(seed, pr):
    rng = np.random.default_rng(seed)
    for T in pr.extremal_transforms:
        w = rng.dirichlet(np.ones(4)) @ pr.pure_states
        assert apply(T, w).l[-1] == probability(T, w)


def test_probability_examples(pr):
    rot = rotation(0.7)
    assert probability(rot, [0.1, 0.2, 1.0]) == pytest.approx(1.0)
    T = np.outer(pr.pure_states[0], pr.extremal_effects[2])
    assert probability(T, _pure(pr, "w01")) == pytest.approx(0.0)
    assert probability(elliptic_map(0.5), CHI) == pytest.approx(0.5)
    # the classical basis needs the all-ones effect
    m = classical(2)
    assert probability(np.eye(3), [0.2, 0.3, 0.5], m.spec.det_effect) == pytest.approx(1.0)


def test_condition_examples(pr):
    w = np.array([0.6, 0.0, 1.0])
    out = condition(rotation(np.pi / 2), w)
    assert out.normalized and np.allclose(out.l, [0.0, 0.6, 1.0])
    assert np.allclose(condition(elliptic_map(0.5), CHI).l, [1.0, 0.0, 1.0])
    T = pr.extremal_transforms[0]
    assert np.allclose(condition(T, _pure(pr, "w00")).l, [1.0, 0.0, 1.0])
    with pytest.raises(ZeroProbability):
        condition(T, _pure(pr, "w01"))


def test_bip_apply_examples(pr):
    Psi = np.arange(9.0).reshape(3, 3)
    assert np.array_equal(bip_apply(np.eye(3), Psi, "left"), Psi)
    assert np.array_equal(bip_apply(np.eye(3), Psi, "right"), Psi)
    assert np.allclose(bip_apply(rotation(np.pi), np.eye(3), "right"), rotation(np.pi).T)
    assert np.allclose(rotation(np.pi).T, np.diag([-1.0, -1.0, 1.0]))
    N = pr.extras["nonlocal"]
    D001 = N["001"].T @ np.linalg.inv(pr.faithful)
    assert np.allclose(bip_apply(D001, pr.faithful, "right"), N["001"])
    with pytest.raises(InputError):
        bip_apply(np.eye(3), Psi, "middle")
    with pytest.raises(InputError):
        bip_apply(np.eye(2), Psi)


def test_marginal_examples(pr):
    assert np.allclose(marginal(pr.faithful, pr.spec).l, CHI)
    w, s = np.array([0.3, 0.1, 1.0]), np.array([-0.5, 0.2, 1.0])
    assert np.allclose(marginal(np.outer(w, s), pr.spec, "right").l, w)
    assert np.allclose(marginal(np.outer(w, s), pr.spec, "left").l, s)
    m = clock()
    gamma, phi = 0.7, 1.1
    Psi = m.extremal_bipartite.member(0.3, -phi, gamma)
    r = (1 - gamma) / gamma
    assert np.allclose(marginal(Psi, m.spec).l, [r * np.cos(phi), r * np.sin(phi), 1.0])


def test_marginal_classical_uses_all_ones():
    m = classical(2)
    P = np.outer([0.2, 0.3, 0.5], [0.1, 0.1, 0.8])
    assert np.allclose(marginal(P, m.spec).l, [0.2, 0.3, 0.5])
    assert np.allclose(marginal(P, m.spec, "left").l, [0.1, 0.1, 0.8])


def test_transform_from_bipartite_examples(pr):
    assert np.allclose(transform_from_bipartite(pr.faithful, pr.faithful), np.eye(3))
    D = transform_from_bipartite(pr.extras["nonlocal"]["001"], pr.faithful)
    assert pr.automorphisms.labels[pr.automorphisms.index(D)] == "D001"
    # automorphisms permute the vertices of the square
    imgs = pr.pure_states @ D.T
    assert sorted(map(tuple, np.round(imgs, 12))) == sorted(map(tuple, pr.pure_states))
    S, A, St = reflection(0.4), elliptic_map(0.8), reflection(1.3).T
    C = S @ A @ St
    assert np.allclose(transform_from_bipartite(C.T, np.eye(3)), C)


def test_bipartite_from_transform_examples(pr):
    assert np.allclose(bipartite_from_transform(np.eye(3), pr.faithful), pr.faithful)
    assert np.allclose(bipartite_from_transform(rotation(0.9), np.eye(3)), rotation(0.9).T)
    D110 = pr.automorphisms.elements[pr.automorphisms.labels.index("D110")]
    assert np.allclose(bipartite_from_transform(D110, pr.faithful), pr.extras["nonlocal"]["110"])


def test_faithful_inverse_guard():
    with pytest.raises(SingularFaithfulState):
        faithful_inverse(np.diag([1.0, 1.0, 0.0]))
    with pytest.raises(SingularFaithfulState):
        transform_from_bipartite(np.eye(3), np.diag([1.0, 1e-10, 1.0]))


@pytest.mark.parametrize("seed", SEEDS)
def test_round_trip_random_transforms(seed, pr):
    rng = np.random.default_rng(seed)
    m = clock()
    for model, Ts in ((pr, None), (m, None)):
        for _ in range(100):
            if model is pr:
                c = rng.uniform(0, 1, len(pr.extremal_transforms))
                T = np.einsum("k,kij->ij", c, pr.extremal_transforms)
            else:
                a, b, g = rng.uniform(0, 2 * np.pi), rng.uniform(0, 2 * np.pi), rng.uniform(0.5, 1)
                T = m.extremal_transforms.transform(a, b, g, int(rng.integers(2)))
            Psi = bipartite_from_transform(T, model.faithful)
            assert np.allclose(transform_from_bipartite(Psi, model.faithful), T, atol=1e-9)


def test_transpose_examples(pr):
    assert np.allclose(transpose_transform(np.eye(3), pr.faithful), np.eye(3))
    assert np.allclose(transpose_transform(rotation(0.4), np.eye(3)), rotation(-0.4))


@pytest.mark.parametrize("model", ["two-box", "clock"])
def test_transposition_involution_and_closure(model):
    from gptaudit.models import build_model

    m = build_model(model)
    els = m.automorphisms.all() if m.automorphisms.finite else m.automorphisms.sample(np.random.default_rng(1), 50)
    for D in els:
        Dt = transpose_transform(D, m.faithful)
        assert np.allclose(transpose_transform(Dt, m.faithful), D, atol=1e-12)
        assert m.automorphisms.contains(Dt)


def test_pr_transposes_pair_reflections(pr):
    G = pr.automorphisms
    lab = lambda T: G.labels[G.index(T)]  # noqa: E731
    tr = {L: lab(transpose_transform(D, pr.faithful)) for L, D in zip(G.labels, G.elements)}
    assert tr["D001"] == "D001"
    assert tr["D010"] == "D100" and tr["D100"] == "D010"
    assert tr["D011"] == "D101" and tr["D101"] == "D011"


def test_chaotic_state_examples(pr):
    assert np.allclose(chaotic_state(pr.faithful, pr.spec).l, CHI)
    assert np.allclose(chaotic_state(np.eye(3), clock().spec).l, CHI)
    for n in (1, 2, 3):
        m = classical(n)
        assert np.allclose(chaotic_state(m.faithful, m.spec).l, np.full(n + 1, 1 / (n + 1)))


@pytest.mark.parametrize("model", ["two-box", "clock", "rebit"])
def test_chaotic_state_is_invariant(model):
    from gptaudit.models import build_model

    m = build_model(model)
    chi = chaotic_state(m.faithful, m.spec).l
    assert np.allclose(marginal(m.faithful, m.spec, "right").l, chi)
    els = m.automorphisms.all() if m.automorphisms.finite else m.automorphisms.sample(np.random.default_rng(2), 50)
    for D in els:
        assert np.allclose(D @ chi, chi, atol=1e-12)


def test_eval_bilinear_examples(pr):
    for Phi in (pr.faithful, np.eye(3), np.eye(5)):
        assert eval_bilinear(np.linalg.inv(Phi), Phi) == pytest.approx(Phi.shape[0])
    assert eval_bilinear(np.linalg.inv(pr.faithful), pr.extras["nonlocal"]["001"]) == pytest.approx(-1.0)
    assert eval_bilinear(np.zeros((3, 3)), pr.faithful) == 0.0
    with pytest.raises(InputError):
        eval_bilinear(np.eye(3), np.eye(4))


def test_effect_validity(pr):
    for a in pr.extremal_effects:
        assert is_effect(a, pr.spec)
    assert not is_effect([1.0, 1.0, 0.5], pr.spec)


def test_last_row_law(pr):
    for T in pr.extremal_transforms:
        assert is_effect(T[-1], pr.spec)
        assert is_positive_transform(T, pr.spec, pr.pure_states)
    m = clock()
    rng = np.random.default_rng(3)
    for p in m.extremal_transforms.sample(rng, 50):
        T = p.psi.T * p.params["gamma"]
        assert is_effect(T[-1], m.spec, Tolerance(eps=1e-9))


def test_normalized_bipartite(pr):
    for P in pr.extremal_bipartite:
        assert is_normalized_bipartite(P, pr.spec)
    assert not is_normalized_bipartite(2 * pr.faithful, pr.spec)
