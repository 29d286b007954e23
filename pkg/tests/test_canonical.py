import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from opdual.canonical import MAGIC, PAULI_PAIRS, axis_to_x, canonical_params, interaction, kron_factor
from opdual.linalg import dagger, kron, operator_distance, random_unitary
from opdual.qobjects import SX, SY, SZ, named_gate, phase_gate

seeds = st.integers(min_value=0, max_value=2**32 - 1)


def test_magic_basis_is_unitary_and_makes_local_gates_real():
    assert np.allclose(dagger(MAGIC) @ MAGIC, np.eye(4))
    rng = np.random.default_rng(0)
    a, b = random_unitary(2, rng), random_unitary(2, rng)
    a, b = a / np.sqrt(np.linalg.det(a)), b / np.sqrt(np.linalg.det(b))
    m = dagger(MAGIC) @ kron(a, b) @ MAGIC
    assert np.allclose(m.imag, 0, atol=1e-12)


def test_axis_to_x_maps_each_pauli_to_x():
    for axis, s in enumerate((SX, SY, SZ)):
        c = axis_to_x(axis)
        assert np.allclose(c @ s @ dagger(c), SX)


def test_interaction_matches_phase_gate_on_first_axis():
    assert np.allclose(interaction((0.3, 0, 0)), phase_gate(0.3))
    assert np.allclose(interaction((0, 0, 0)), np.eye(4))


def test_kron_factor():
    rng = np.random.default_rng(1)
    a, b = random_unitary(2, rng), random_unitary(2, rng)
    v, w = kron_factor(kron(a, b))
    assert operator_distance(kron(v, w), kron(a, b)) < 1e-12


@pytest.mark.parametrize(
    "name, mu",
    [("CNOT", (np.pi / 4, 0, 0)), ("SWAP", (np.pi / 4, np.pi / 4, np.pi / 4)), ("identity", (0, 0, 0))],
)
def test_named_gate_parameters(name, mu):
    u = np.eye(4) if name == "identity" else named_gate(name)
    p = canonical_params(u)
    assert np.allclose(p.mu, mu, atol=1e-9)
    assert operator_distance(p.reconstruct(), u, up_to_global_phase=True) < 1e-8


def test_local_gate_has_zero_parameters():
    rng = np.random.default_rng(2)
    p = canonical_params(kron(random_unitary(2, rng), random_unitary(2, rng)))
    assert max(p.mu) < 1e-7


@given(seeds)
@settings(max_examples=60, deadline=None)
def test_random_unitaries_reconstruct(seed):
    u = random_unitary(4, np.random.default_rng(seed))
    p = canonical_params(u)
    assert all(0 <= m < np.pi / 2 for m in p.mu)
    assert p.mu[0] >= p.mu[1] >= p.mu[2]
    assert p.mu[0] + p.mu[1] <= np.pi / 2 + 1e-9
    assert operator_distance(p.reconstruct(), u, up_to_global_phase=True) < 1e-8


@given(seeds)
@settings(max_examples=30, deadline=None)
def test_parameters_are_local_invariants(seed):
    rng = np.random.default_rng(seed)
    u = random_unitary(4, rng)
    loc = kron(random_unitary(2, rng), random_unitary(2, rng))
    loc2 = kron(random_unitary(2, rng), random_unitary(2, rng))
    mu1 = canonical_params(u).mu
    mu2 = canonical_params(loc @ u @ loc2).mu
    assert np.allclose(mu1, mu2, atol=1e-7)


def test_ebit_bound_and_validation():
    p = canonical_params(named_gate("SWAP"))
    assert abs(p.ebit_bound(2.0) - 1.5 * np.pi) < 1e-9
    with pytest.raises(ValueError):
        canonical_params(np.diag([1, 1, 1, 2]))
    assert len(PAULI_PAIRS) == 3
