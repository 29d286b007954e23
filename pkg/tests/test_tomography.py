import numpy as np
import pytest

from opdual.duality import choi_of_channel, choi_of_unitary
from opdual.linalg import random_hermitian
from opdual.qobjects import Channel, depolarize, named_gate, phase_gate
from opdual.tomography import (
    channel_tomography,
    coefficients_exact,
    coefficients_sampled,
    operator_basis,
    resum,
    trace_distance,
)


def test_operator_basis():
    labels, basis = operator_basis(4)
    assert len(basis) == 16 and labels[0] == "II"
    assert np.allclose(basis[0], np.eye(4) / 2)
    gram = np.array([[np.trace(a @ b) for b in basis] for a in basis])
    assert np.allclose(gram, np.eye(16))
    target = np.diag([1.0, 0, 0, 0])
    assert np.allclose(sum(np.trace(b @ target) * b for b in basis), target)
    with pytest.raises(ValueError):
        operator_basis(3)


def test_maximally_mixed_has_single_coefficient():
    rec = coefficients_exact(np.eye(16) / 16)
    expected = np.zeros((16, 16))
    expected[0, 0] = 0.25
    assert np.allclose(rec.coefficients, expected)


def test_resummation_is_identity_on_hermitian():
    rng = np.random.default_rng(0)
    for _ in range(5):
        h = random_hermitian(16, rng)
        rec = coefficients_exact(h)
        assert np.max(np.abs(resum(rec.coefficients) - h)) < 1e-12


def test_exact_cnot_and_phase():
    e = choi_of_unitary(named_gate("CNOT"))
    rec = coefficients_exact(e)
    assert np.max(np.abs(rec.choi.density() - e.density())) < 1e-12
    assert not rec.repaired
    res = channel_tomography(Channel.unitary(phase_gate(0.4)), None)
    assert res.action_residual < 1e-10


def test_exact_channel_examples():
    assert channel_tomography(Channel.unitary(np.eye(4)), None).action_residual < 1e-10
    assert channel_tomography(depolarize(phase_gate(np.pi / 8), 0.7), None).action_residual < 1e-10


def test_sampled_within_five_over_root_s():
    e = choi_of_unitary(named_gate("CNOT"))
    exact = coefficients_exact(e).coefficients
    shots = 10**5
    hits = 0
    for seed in range(20):
        rec = coefficients_sampled(e, shots, np.random.default_rng(seed))
        hits += np.max(np.abs(rec.coefficients - exact)) < 5 / np.sqrt(shots)
    assert hits == 20


def test_sampled_is_unbiased():
    e = choi_of_channel(depolarize(named_gate("CNOT"), 0.6))
    exact = coefficients_exact(e).coefficients
    runs = np.array([coefficients_sampled(e, 200, np.random.default_rng(s)).coefficients for s in range(100)])
    mean = runs.mean(axis=0)
    se = runs.std(axis=0, ddof=1) / np.sqrt(100)
    # entries with zero spread are deterministic and must match exactly
    flat = se < 1e-15
    assert np.allclose(mean[flat], exact[flat])
    assert np.all(np.abs(mean - exact)[~flat] <= 4 * se[~flat] + 1e-3 / 16)


def test_trace_distance_decreases_with_shots():
    e = choi_of_unitary(named_gate("CNOT"))
    med = []
    for shots in (10**2, 10**3, 10**4):
        ds = [trace_distance(coefficients_sampled(e, shots, np.random.default_rng(s)).choi.density(), e.density()) for s in range(9)]
        med.append(np.median(ds))
    assert med[0] > med[1] > med[2]


def test_sampled_channel_residual_and_repair_flag():
    c = depolarize(phase_gate(np.pi / 8), 0.7)
    res = channel_tomography(c, 10**4, np.random.default_rng(3))
    assert res.action_residual < 0.05
    assert res.record.shots == 10**4
    assert res.record.repaired == (res.record.min_eig_before_repair < -1e-12)
    assert abs(np.trace(res.record.choi.density()) - 1) < 1e-10
    with pytest.raises(ValueError):
        channel_tomography(c, 10)
    with pytest.raises(ValueError):
        coefficients_sampled(choi_of_channel(c), 0, np.random.default_rng(0))


def test_rows_cover_all_pairs():
    rec = coefficients_exact(choi_of_unitary(named_gate("SWAP")))
    rows = list(rec.rows())
    assert len(rows) == 256 and rows[0][:2] == ("II", "II")
