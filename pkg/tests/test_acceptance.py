"""Acceptance criteria 1-11, one recorded PASS/FAIL line per criterion or sub-item."""

import math
import time

import numpy as np

from opdual import gates, measure, photonic, purification, storage, tomography
from opdual.compression import (
    SignalEnsemble,
    average_infidelity,
    ensemble_entropy,
    normalization_residual,
    sequence_weight_total,
    typical_window,
)
from opdual.duality import apply_via_choi, choi_of_unitary, roundtrip_check, teleport_branches
from opdual.linalg import operator_distance, random_density, random_unitary
from opdual.qobjects import Channel, depolarize, entanglement_entropy, named_gate, phase_gate
from opdual.streams import substream

SEED = 20240601


def test_c01_f_infinity(criterion):
    t0 = time.perf_counter()
    f = gates.f_factor(60)
    dt = time.perf_counter() - t0
    ok = criterion("C1 f_inf", abs(f - 5.97932) <= 1e-4 and dt < 1.0, f"{f:.7f} vs 5.97932 ±1e-4 in {dt:.3f}s")
    assert ok


def test_c02_cascade(criterion):
    worst = 0.0
    for n in range(2, 11):
        target = phase_gate(math.pi / 2**n)
        for h in gates.all_histories(n):
            net, _ = gates.history_operation(n, h)
            worst = max(worst, operator_distance(net, target, up_to_global_phase=True))
    exact_ok = criterion("C2a cascade histories N=2..10", worst <= 1e-10, f"max distance {worst:.2e} <= 1e-10")

    n, runs = 4, 10**4
    rho = random_density(4, substream(SEED, 2, 0))
    e = np.empty(runs)
    b = np.empty(runs)
    for t in range(runs):
        tr = gates.cascade(n, rho, substream(SEED, 2, 1, t))
        e[t], b[t] = tr.ebits_consumed, tr.classical_bits
    se_e, se_b = e.std(ddof=1) / math.sqrt(runs), b.std(ddof=1) / math.sqrt(runs)
    ee, eb = gates.avg_entanglement(n), 2 - 0.5 ** (n - 2)
    mc_e = criterion("C2b mean ebits N=4", abs(e.mean() - ee) <= 3 * se_e, f"{e.mean():.5f} vs {ee:.5f} (3σ={3 * se_e:.5f})")
    mc_b = criterion("C2c mean classical bits N=4", abs(b.mean() - eb) <= 3 * se_b, f"{b.mean():.5f} vs {eb:.5f} (3σ={3 * se_b:.5f})")
    assert exact_ok and mc_e and mc_b


def test_c03_thresholds(criterion):
    q = purification.threshold_bisection("CNOT")
    a = criterion("C3a CNOT threshold", abs(q - 1 / 9) <= 1e-9, f"{q:.12f} vs 1/9 ±1e-9")
    grid = np.linspace(np.pi / 4 / 50, np.pi / 4, 50)
    dev = max(abs(purification.threshold_bisection(x) - purification.threshold_closed_form(x)) for x in grid)
    b = criterion("C3b phase-gate thresholds, 50 angles", dev <= 1e-9, f"max deviation {dev:.2e} <= 1e-9")
    q13 = purification.threshold_bisection(math.pi / 2**13)
    c = criterion("C3c alpha=pi/2^13 threshold", 0.9938 <= q13 <= 0.9940, f"{q13:.7f} in [0.9938, 0.9940]")
    assert a and b and c


STORAGE_ITEMS = [
    ("local infinite pi", lambda: storage.infinite_rate("pi", "local").qubits_per_operation, 3.8942, 5e-5),
    ("local infinite pi/8", lambda: storage.infinite_rate("pi8", "local").qubits_per_operation, 0.2257, 5e-5),
    ("local infinite pi/32", lambda: storage.infinite_rate("pi32", "local").qubits_per_operation, 0.0206, 5e-5),
    ("local finite M=100", lambda: storage.finite_rate(100, "local").qubits_per_operation, 0.245, 5e-4),
    ("local finite M=1000", lambda: storage.finite_rate(1000, "local").qubits_per_operation, 0.0361, 5e-5),
    ("nonlocal infinite pi", lambda: storage.infinite_rate("pi", "nonlocal").qubits_per_operation, 4.7758, 5e-5),
    ("nonlocal infinite pi/8", lambda: storage.infinite_rate("pi8", "nonlocal").qubits_per_operation, 0.3976, 5e-5),
    ("nonlocal infinite pi/32", lambda: storage.infinite_rate("pi32", "nonlocal").qubits_per_operation, 0.0379, 5e-5),
    ("nonlocal finite M=100", lambda: storage.finite_rate(100, "nonlocal").qubits_per_operation, 0.333, 5e-4),
    ("nonlocal finite M=1000", lambda: storage.finite_rate(1000, "nonlocal").qubits_per_operation, 0.050, 5e-4),
    ("quantum communication pi", lambda: storage.qcomm_rate("pi").qcomm_per_operation, 2.7758, 5e-5),
    ("quantum communication pi/8", lambda: storage.qcomm_rate("pi8").qcomm_per_operation, 0.3976, 5e-5),
]


def test_c04_storage(criterion):
    results = []
    for name, fn, published, tol in STORAGE_ITEMS:
        v = fn()
        err = abs(v - published)
        results.append(criterion(f"C4 {name}", err <= tol, f"{v:.6f} vs {published} (|err|={err:.1e}, tol {tol:.0e})"))
    assert all(results)


def test_c05_duality(criterion):
    rng = substream(SEED, 5)
    worst = 0.0
    for k in range(100):
        u = random_unitary(4, rng)
        c = Channel.unitary(u) if k % 2 == 0 else depolarize(u, rng.uniform())
        worst = max(worst, roundtrip_check(c))
    a = criterion("C5a round trip, 100 channels", worst <= 1e-10, f"max residual {worst:.2e} <= 1e-10")
    p2 = apply_via_choi(choi_of_unitary(random_unitary(4, rng)), random_density(4, rng)).probability
    p3 = apply_via_choi(choi_of_unitary(random_unitary(8, rng), (2, 2, 2)), random_density(8, rng)).probability
    b = criterion("C5b success probability N=2", abs(p2 - 1 / 16) < 1e-14, f"{p2!r} vs 1/16")
    c = criterion("C5c success probability N=3", abs(p3 - 1 / 64) < 1e-14, f"{p3!r} vs 1/64")
    assert a and b and c


def test_c06_photonic(criterion):
    trials = 10**5
    rho = random_density(4, substream(SEED, 6, 0))
    oks = []
    for k, (name, u, p) in enumerate([("CNOT", named_gate("CNOT"), 1 / 16), ("U(pi/8)", phase_gate(np.pi / 8), 1 / 4)]):
        hits = photonic.photonic_trials(u, rho, trials, substream(SEED, 6, 1, k))
        sigma = math.sqrt(p * (1 - p) / trials)
        p_hat = hits / trials
        oks.append(criterion(f"C6 {name} success rate", abs(p_hat - p) <= 3 * sigma, f"{p_hat:.5f} vs {p:.5f} (3σ={3 * sigma:.5f})"))
        st = photonic.photonic_stats(u, rho)
        err = float(np.max(np.abs(st.output - u @ rho @ u.conj().T)))
        oks.append(criterion(f"C6 {name} conditioned output", err <= 1e-10, f"max error {err:.1e} <= 1e-10"))
    assert all(oks)


def test_c07_tomography(criterion):
    c = depolarize(phase_gate(np.pi / 8), 0.7)
    exact = tomography.channel_tomography(c, None).action_residual
    a = criterion("C7a exact reconstruction", exact <= 1e-10, f"residual {exact:.1e} <= 1e-10")
    res = [tomography.channel_tomography(c, 10**4, substream(SEED, 7, r)).action_residual for r in range(20)]
    med = float(np.median(res))
    b = criterion("C7b 10^4 shots, median of 20", med < 0.05, f"median residual {med:.4f} < 0.05")
    assert a and b


def test_c08_measurements(criterion):
    demo = measure.parity_ebit_demo()
    a = criterion("C8a parity input PPT", demo.input_ppt_min_eig >= -1e-12, f"min eigenvalue {demo.input_ppt_min_eig:.2e} >= -1e-12")
    dev = max(abs(x - 1) for x in demo.post_entanglement)
    b = criterion("C8b parity post-states 1 ebit", dev <= 1e-10, f"max |E-1| {dev:.1e} <= 1e-10")
    basis = list(np.eye(4))
    ident = measure.proposal2_unitary(basis, [(0, 0), (0, 1), (1, 0), (1, 1)])
    swap = measure.proposal2_unitary(basis, [(0, 0), (1, 0), (0, 1), (1, 1)])
    c = criterion(
        "C8c proposal-2 identity and SWAP",
        np.array_equal(ident, np.eye(4)) and np.array_equal(swap, named_gate("SWAP")),
        "exact equality",
    )
    assert a and b and c


def test_c09_local_pipeline(criterion):
    dev_l = dev_p = 0.0
    for q in np.linspace(0, 1, 21):
        st = purification.project_unknown(purification.noisy_local_choi(0.3, q), q)
        dev_l = max(dev_l, abs(st.lam - 2 * q / (1 + q)))
        dev_p = max(dev_p, abs(st.success_probability - (q + 1) / 2))
    a = criterion("C9a lambda and success probability on q-grid", dev_l < 1e-12 and dev_p < 1e-12, f"max deviations {dev_l:.1e}, {dev_p:.1e}")
    caps = [1, 11, 101, 1001, 10**5]
    fr = [purification.random_walk_success(cap, 10**4, substream(SEED, 9)) for cap in caps]
    b = criterion("C9b random walk at cap 10^5", fr[-1] >= 0.98, f"{fr[-1]:.4f} >= 0.98")
    c = criterion("C9c random walk monotone in cap", all(x <= y for x, y in zip(fr, fr[1:])), " <= ".join(f"{x:.4f}" for x in fr))
    assert a and b and c


def test_c10_compression(criterion):
    alpha, mu, beta = np.pi / 4, 2.0, 0.6
    inf = [average_infidelity(n, alpha, mu, beta) for n in (25, 100, 400)]
    a = criterion("C10a average fidelity increasing", inf[0] > inf[1] > inf[2], "1-F = " + ", ".join(f"{x:.3e}" for x in inf))
    e = SignalEnsemble.two_state(alpha)
    s = ensemble_entropy(e)
    ok_rate, details = True, []
    for n in (25, 100, 400):
        r = typical_window(n, e, mu, beta).log2_dim / n
        hi = s + mu * n ** (beta - 1) * (1 + math.log2(n))
        ok_rate &= s <= r <= hi
        details.append(f"N={n}: {s:.4f} <= {r:.4f} <= {hi:.4f}")
    b = criterion("C10b rate bounds", ok_rate, "; ".join(details))
    resid = max(
        [normalization_residual(m, x) for m in (1, 25, 100, 400, 2000) for x in (0.1, alpha, 1.2)]
        + [abs(sequence_weight_total(n) - 1) for n in (25, 100, 400, 2000)]
    )
    c = criterion("C10c binomial normalization", resid <= 1e-12, f"max residual {resid:.1e} <= 1e-12")
    assert a and b and c


def test_c11_multiparty(criterion):
    worst = 0.0
    for m in range(2, 11):
        target = phase_gate(math.pi / 2**m, 3)
        for h in gates.all_histories(m):
            net, _ = gates.history_operation(m, h, parties=3)
            worst = max(worst, operator_distance(net, target, up_to_global_phase=True))
    rho = random_density(8, substream(SEED, 11, 0))
    for t in range(50):
        tr = gates.multiparty_cascade(3, 4, rho, substream(SEED, 11, 1, t))
        u = phase_gate(math.pi / 16, 3)
        worst = max(worst, float(np.max(np.abs(tr.output.density() - u @ rho @ u.conj().T))))
    a = criterion("C11a three-party cascade exactness", worst <= 1e-10, f"max distance {worst:.2e} <= 1e-10")
    trials = 10**5
    e = choi_of_unitary(phase_gate(math.pi / 8, 3), (2, 2, 2))
    _, probs, _ = teleport_branches(e, rho)
    draws = substream(SEED, 11, 2).choice(len(probs), size=trials, p=probs)
    p_hat = float(np.mean(draws == 0))
    p = 1 / 64
    sigma = math.sqrt(p * (1 - p) / trials)
    b = criterion("C11b three-party success 1/64", abs(p_hat - p) <= 3 * sigma, f"{p_hat:.5f} vs {p:.5f} (3σ={3 * sigma:.5f})")
    assert a and b
