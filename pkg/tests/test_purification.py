import numpy as np
import pytest

from opdual.linalg import Layout, kron
from opdual.purification import (
    fd_scaling,
    first_passage_times,
    lambda_of_q,
    noisy_choi,
    noisy_local_choi,
    ppt_min_eig,
    project_unknown,
    random_walk_exact,
    random_walk_success,
    threshold_bisection,
    threshold_closed_form,
    threshold_report,
)
from opdual.qobjects import PHI_PLUS, phase_gate

PAIR = Layout((2, 2), ["A", "B"])


def test_ppt_min_eig_examples():
    prod = np.diag([1.0, 0, 0, 0])
    assert ppt_min_eig(prod, ["A"], PAIR) >= 0
    assert abs(ppt_min_eig(np.outer(PHI_PLUS, PHI_PLUS), ["A"], PAIR) + 0.5) < 1e-12
    with pytest.raises(ValueError):
        ppt_min_eig(prod, ["A"])


def test_ppt_min_eig_closed_form_on_random_angles():
    rng = np.random.default_rng(0)
    for alpha in rng.uniform(0, np.pi / 2, 50):
        q = rng.uniform()
        c, s = np.cos(alpha), np.sin(alpha)
        expected = -q * c * s + (1 - q) / 16
        assert abs(ppt_min_eig(noisy_choi(phase_gate(alpha), q), ["A1", "A2"]) - expected) < 1e-12


def test_closed_forms():
    assert threshold_closed_form("CNOT") == 1 / 9
    assert abs(threshold_closed_form(np.pi / 4) - 1 / 9) < 1e-15
    assert threshold_closed_form(0.0) == 1.0
    q = threshold_closed_form(np.pi / 2**13)
    assert abs(q - 0.9939014973901976) < 1e-12
    with pytest.raises(ValueError):
        threshold_closed_form("SWAP")


def test_bisection_matches_known_thresholds():
    assert abs(threshold_bisection("CNOT") - 1 / 9) < 1e-9
    assert abs(threshold_bisection(np.pi / 8) - threshold_closed_form(np.pi / 8)) < 1e-9
    # SWAP's dual state has four equal Schmidt weights, giving -q/4 + (1-q)/16 = 0
    assert abs(threshold_bisection("SWAP") - 0.2) < 1e-9
    assert threshold_bisection(np.eye(4)) is None
    assert threshold_bisection(0.0) is None


def test_bisection_on_angle_grid():
    for alpha in np.linspace(np.pi / 4 / 50, np.pi / 4, 50):
        assert abs(threshold_bisection(alpha) - threshold_closed_form(alpha)) < 1e-9


def test_threshold_report():
    r = threshold_report("CNOT", grid=5)
    assert r.gate == "CNOT" and r.alpha is None
    assert abs(r.closed_form_q - r.bisection_q) < 1e-9
    assert len(r.samples) == 5 and r.samples[0][1] > 0 and r.samples[-1][1] < 0
    s = threshold_report("SWAP")
    assert s.closed_form_q is None and 0 < s.bisection_q < 1


@pytest.mark.parametrize("q, lam, p", [(1.0, 1.0, 1.0), (1 / 3, 0.5, 2 / 3), (0.0, 0.0, 0.5)])
def test_project_unknown_examples(q, lam, p):
    st = project_unknown(noisy_local_choi(0.4, q), q)
    assert abs(st.lam - lam) < 1e-12
    assert abs(st.success_probability - p) < 1e-12


def test_project_unknown_structure():
    rng = np.random.default_rng(1)
    for alpha, q in zip(rng.uniform(0, np.pi, 20), rng.uniform(0, 1, 20)):
        st = project_unknown(noisy_local_choi(alpha, q), q)
        assert abs(st.lam - lambda_of_q(q)) < 1e-12
        assert abs(st.success_probability - (q + 1) / 2) < 1e-12
        # the projected state is λ|ψ><ψ| + (1-λ)1/2 with |ψ> = (cos α, sin α) in the relabelled basis
        psi = np.array([np.cos(alpha), np.sin(alpha)])
        expected = st.lam * np.outer(psi, psi) + (1 - st.lam) * np.eye(2) / 2
        assert np.allclose(st.projected, expected, atol=1e-12)
    with pytest.raises(ValueError):
        project_unknown(np.eye(16) / 16)


def test_fd_scaling():
    assert fd_scaling(1.0, 7) == (1.0, 1.0)
    f, d = fd_scaling(0.5, 100)
    assert abs(f - 0.99) < 1e-12 and abs(d - 0.51) < 1e-12
    f, d = fd_scaling(0.3, 10**9)
    assert abs(f - 1) < 1e-8 and abs(d - 0.3) < 1e-8
    with pytest.raises(ValueError):
        fd_scaling(0.0, 3)


def test_random_walk_exact():
    assert random_walk_exact(1) == 0.5
    assert random_walk_exact(2) == 0.5
    assert abs(random_walk_exact(3) - 0.625) < 1e-15
    assert random_walk_exact(1001) > random_walk_exact(101)


def test_random_walk_monte_carlo():
    rng = np.random.default_rng(2)
    assert abs(random_walk_success(1, 20000, rng) - 0.5) < 0.02
    f101 = random_walk_success(101, 20000, rng)
    f1001 = random_walk_success(1001, 20000, rng)
    assert f1001 > f101
    assert abs(f101 - random_walk_exact(101)) < 0.015
    hits = first_passage_times(50, 2000, rng)
    assert np.all(hits[hits > 0] % 2 == 1)
