import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from causalmark import scenario
from causalmark.operators import (
    SIGMA_X, DensityState, Projection, ValidationError, commutator,
    double_commutator, expectation, ket_projection, maximally_mixed, op_norm,
    op_norms, pure_state, validate,
)

seeds = st.integers(0, 2**32 - 1)
dims = st.integers(2, 6)

P0 = ket_projection([1, 0])
PLUS = ket_projection([1, 1])


def test_expectation_of_identity_is_one(rng):
    w = scenario.random_state(4, rng, mixed=True)
    assert expectation(w, np.eye(4)) == pytest.approx(1.0, abs=1e-12)


def test_expectation_eigenstate():
    assert expectation(DensityState(P0), P0) == pytest.approx(1.0)


def test_expectation_rotating_projection():
    # U_t |0> = (cos t, sin t) under H = sigma_y, so <+|Q_t|+> = 1/2 + sin(2t)/2
    for t in np.linspace(-3, 3, 13):
        q_t = ket_projection([np.cos(t), np.sin(t)])
        assert expectation(pure_state([1, 1]), q_t) == pytest.approx(0.5 + 0.5 * np.sin(2 * t), abs=1e-12)


def test_expectation_dimension_mismatch():
    with pytest.raises(ValueError, match="dimension mismatch"):
        expectation(np.eye(2) / 2, np.eye(3))


def test_commutator_examples():
    assert np.allclose(commutator(SIGMA_X, SIGMA_X), 0)
    assert np.allclose(commutator(np.diag([1, 0]), np.diag([3, -2])), 0)
    # [|+><+|, |0><0|] by hand
    assert np.allclose(commutator(PLUS, P0), 0.5 * np.array([[0, -1], [1, 0]]))


def test_double_commutator_examples():
    assert np.allclose(double_commutator(np.diag([1, 0]), np.diag([2, 5])), 0)
    assert np.allclose(double_commutator(P0, SIGMA_X), SIGMA_X)
    assert np.allclose(double_commutator(np.eye(2), SIGMA_X), 0)


def test_op_norm_examples():
    assert op_norm(SIGMA_X) == pytest.approx(1.0)
    assert op_norm(PLUS) == pytest.approx(1.0)
    n = 7
    assert op_norm(np.exp(-1 / (4 * n)) * SIGMA_X - SIGMA_X) == pytest.approx(1 - np.exp(-1 / (4 * n)))


def test_op_norm_matches_svd(rng):
    stack = rng.normal(size=(20, 5, 5)) + 1j * rng.normal(size=(20, 5, 5))
    ref = np.linalg.svd(stack, compute_uv=False)[:, 0]
    assert np.allclose(op_norms(stack), ref, atol=1e-12)
    assert np.allclose([op_norm(m) for m in stack], ref, atol=1e-12)


def test_validate_accepts_and_rejects():
    assert isinstance(validate(np.diag([1, 0]), "projection"), Projection)
    with pytest.raises(ValidationError) as info:
        validate(np.diag([0.5, 0.5]), "projection")
    assert info.value.invariant == "idempotence"
    assert info.value.residual == pytest.approx(0.25)
    assert isinstance(validate(0.5 * np.ones((2, 2)), "density"), DensityState)


@pytest.mark.parametrize("matrix, kind, invariant", [
    ([[0, 1], [0, 0]], "selfadjoint", "self-adjointness"),
    ([[1.2, 0], [0, -0.2]], "density", "positivity"),
    ([[0.7, 0], [0, 0.7]], "density", "unit trace"),
])
def test_validate_names_failed_invariant(matrix, kind, invariant):
    with pytest.raises(ValidationError, match=invariant):
        validate(matrix, kind)


def test_operators_reject_bad_input():
    with pytest.raises(ValueError):
        op_norm(np.ones((2, 3)))
    with pytest.raises(ValueError):
        op_norm([[np.nan, 0], [0, 1]])


def test_wrappers_are_immutable():
    p = Projection(P0)
    with pytest.raises(ValueError):
        p.op[0, 0] = 2
    w = maximally_mixed(3)
    with pytest.raises(ValueError):
        w.op[0, 0] = 2


@settings(max_examples=60, deadline=None)
@given(seeds, dims)
def test_commutator_antisymmetric(seed, d):
    rng = np.random.default_rng(seed)
    a = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
    b = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
    assert op_norm(commutator(a, b) + commutator(b, a)) <= 1e-9


@settings(max_examples=60, deadline=None)
@given(seeds, dims)
def test_double_commutator_is_nested_commutator(seed, d):
    rng = np.random.default_rng(seed)
    p = scenario.random_projection(d, rng)
    q = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
    assert np.max(np.abs(double_commutator(p, q) - commutator(p, commutator(p, q)))) <= 1e-9


@settings(max_examples=60, deadline=None)
@given(seeds, dims)
def test_expectation_real_and_bounded(seed, d):
    rng = np.random.default_rng(seed)
    w = scenario.random_state(d, rng, mixed=bool(seed % 2))
    a = scenario.random_observable(d, rng) * 3.0
    val = expectation(w, a)
    assert abs(val.imag) <= 1e-9
    assert abs(val) <= op_norm(a) + 1e-12


@settings(max_examples=60, deadline=None)
@given(seeds, dims, st.sampled_from(["commuting", "generic"]))
def test_double_commutator_vanishes_iff_commutator_does(seed, d, mode):
    rng = np.random.default_rng(seed)
    if mode == "commuting":
        _, v = np.linalg.eigh(scenario.random_hamiltonian(d, rng))
        mask = (rng.permutation(d) < rng.integers(1, d)).astype(float)
        p = (v * mask) @ v.conj().T
        q = (v * rng.normal(size=d)) @ v.conj().T
    else:
        p = scenario.random_projection(d, rng).op
        q = scenario.random_observable(d, rng)
    c, dc = op_norm(commutator(p, q)), op_norm(double_commutator(p, q))
    assert (c <= 1e-9) == (dc <= 1e-9)
