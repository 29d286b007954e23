"""Non-local phase gates from pre-shared resource states.

A phase gate ``U(α) = exp(-iα σx⊗...⊗σx)`` is teleported through the resource
``|ψ_α>``. Each attempt applies ``U(+α)`` or ``U(-α)`` with equal probability;
after a failure the protocol retries with twice the angle, which compensates
the wrong sign. Starting from ``α = π/2^N`` the angle reaches the local gate
``U(π/2)`` after ``N - 1`` nonlocal rounds, so the target is always reached.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .canonical import axis_to_x, canonical_params
from .duality import teleport_branches
from .linalg import Layout, dagger, kron
from .qobjects import MultiState, phase_family_entanglement, phase_gate, psi_alpha

DEFAULT_BITS = 30
F_INF_TERMS = 60
SNAP_TOL = 1e-12


@dataclass
class CascadeTrace:
    """Record of one protocol run.

    ``rounds`` holds ``(angle, branch)`` per attempt with branch ``+1`` when
    ``U(+angle)`` was applied. ``outcomes`` holds the per-party Bell indices
    (``None`` for the free local round).
    """

    rounds: list = field(default_factory=list)
    outcomes: list = field(default_factory=list)
    ebits_consumed: float = 0.0
    classical_bits: float = 0.0
    net_operation: np.ndarray | None = None
    output: MultiState | None = None

    def extend(self, other: "CascadeTrace") -> None:
        self.rounds += other.rounds
        self.outcomes += other.outcomes
        self.ebits_consumed += other.ebits_consumed
        self.classical_bits += other.classical_bits


def _as_density(rho) -> tuple[np.ndarray, Layout]:
    if isinstance(rho, MultiState):
        return rho.density(), rho.layout
    r = np.asarray(rho, dtype=complex)
    n = int(round(np.log2(r.shape[0])))
    return r, Layout((2,) * n)


def branch_of(outcome) -> int:
    """``+1`` when an even number of parties found ``i1 = 2``, else ``-1``."""
    flips = sum(1 for i1, _ in outcome if i1 == 2)
    return 1 if flips % 2 == 0 else -1


@lru_cache(maxsize=256)
def _resource(alpha: float, parties: int) -> MultiState:
    return psi_alpha(alpha, parties)


def _teleport_round(alpha: float, r: np.ndarray, parties: int, rng) -> tuple[int, tuple, np.ndarray]:
    outcomes, probs, states = teleport_branches(_resource(alpha, parties), r)
    k = int(rng.choice(len(outcomes), p=probs))
    return branch_of(outcomes[k]), outcomes[k], states[k]


def single_shot(alpha: float, rho, rng: np.random.Generator) -> tuple[int, MultiState]:
    """One teleportation attempt of ``U(α)`` on two qubits; returns ``(branch, state)``."""
    r, layout = _as_density(rho)
    if r.shape != (4, 4):
        raise ValueError("single_shot acts on two qubits")
    branch, _, out = _teleport_round(alpha, r, 2, rng)
    return branch, MultiState(out, layout)


def _check_order(n: int) -> None:
    if n < 1:
        raise ValueError("the binary angle order must be at least 1")


def _run(order: int, rho, rng, parties: int) -> CascadeTrace:
    _check_order(order)
    r, layout = _as_density(rho)
    if r.shape[0] != 2**parties:
        raise ValueError(f"state does not act on {parties} qubits")
    target = np.pi / 2**order
    trace = CascadeTrace()
    net = np.eye(2**parties, dtype=complex)
    for k in range(1, order + 1):
        angle = 2 ** (k - 1) * target
        if k == order:
            # U(π/2) is a product of local σx: no resource, no communication
            u = phase_gate(angle, parties)
            r = u @ r @ dagger(u)
            net = u @ net
            trace.rounds.append((angle, 1))
            trace.outcomes.append(None)
            break
        branch, outcome, r = _teleport_round(angle, r, parties, rng)
        net = phase_gate(branch * angle, parties) @ net
        trace.rounds.append((angle, branch))
        trace.outcomes.append(outcome)
        trace.ebits_consumed += phase_family_entanglement(angle)
        trace.classical_bits += 1 if parties == 2 else parties
        if branch == 1:
            break
    trace.net_operation = net
    trace.output = MultiState(r, layout)
    return trace


def cascade(order: int, rho, rng: np.random.Generator) -> CascadeTrace:
    """Apply ``U(π/2^order)`` deterministically on two qubits."""
    return _run(order, rho, rng, 2)


def multiparty_cascade(parties: int, order: int, rho, rng: np.random.Generator) -> CascadeTrace:
    """Apply ``exp(-i π/2^order σx^⊗N)`` on ``parties`` qubits, one per party."""
    if parties < 2:
        raise ValueError("multiparty_cascade needs at least two parties")
    return _run(order, rho, rng, parties)


def history_operation(order: int, branches, parties: int = 2) -> tuple[np.ndarray, int]:
    """Net gate produced by a fixed stream of branch results.

    Consumes branches until the first ``+1`` (or the local final round) and
    returns the product together with the number of rounds used.
    """
    _check_order(order)
    target = np.pi / 2**order
    net = np.eye(2**parties, dtype=complex)
    for k in range(1, order + 1):
        angle = 2 ** (k - 1) * target
        sign = 1 if k == order else branches[k - 1]
        net = phase_gate(sign * angle, parties) @ net
        if sign == 1:
            return net, k
    return net, order


def all_histories(order: int):
    """Every sign sequence of length ``order``."""
    return itertools.product((1, -1), repeat=order)


def avg_entanglement(order: int) -> float:
    """Mean ebits of the cascade for ``U(π/2^order)``."""
    _check_order(order)
    return sum(
        0.5 ** (k - 1) * phase_family_entanglement(np.pi / 2 ** (order - k + 1))
        for k in range(1, order + 1)
    )


def mean_classical_bits(order: int) -> float:
    _check_order(order)
    return 2.0 - 0.5 ** (order - 2)


def f_factor(terms: int = F_INF_TERMS) -> float:
    """``(1/π) Σ_{k=1}^{terms} 2^k E(ψ_{π/2^k})``; ``terms=60`` is the limit to double precision."""
    if terms < 0:
        raise ValueError("terms must be non-negative")
    return sum(2**k * phase_family_entanglement(np.pi / 2**k) for k in range(1, terms + 1)) / np.pi


def binary_decompose(alpha: float, bits: int = DEFAULT_BITS) -> list[int]:
    """Bits ``n_k`` with ``α ≈ π Σ n_k 2^{-k}``, truncated after ``bits`` digits.

    ``α = π`` returns all zeros since ``U(π) = -1``.
    """
    if not 0.0 <= alpha <= np.pi:
        raise ValueError("alpha must lie in [0, π]")
    if not 1 <= bits <= 60:
        raise ValueError("bits must lie in [1, 60]")
    scaled = alpha / np.pi * 2.0**bits
    m = round(scaled)
    if abs(scaled - m) > SNAP_TOL * 2.0**bits:
        m = int(np.floor(scaled))
    # snapping absorbs float noise on exact dyadic angles
    m %= 2**bits
    return [(m >> (bits - k)) & 1 for k in range(1, bits + 1)]


def binary_value(bits) -> float:
    return float(np.pi * sum(b * 0.5 ** (k + 1) for k, b in enumerate(bits)))


def _apply_local(u: np.ndarray, r: np.ndarray, net: np.ndarray):
    return u @ r @ dagger(u), u @ net


def apply_phase(alpha: float, rho, rng: np.random.Generator, bits: int = DEFAULT_BITS, axis: int = 0) -> CascadeTrace:
    """``exp(-iα σ_axis⊗σ_axis)`` as a sequence of binary-angle cascades."""
    r, layout = _as_density(rho)
    c = kron(axis_to_x(axis), axis_to_x(axis))
    trace = CascadeTrace()
    net = np.eye(4, dtype=complex)
    r, net = _apply_local(c, r, net)
    for k, bit in enumerate(binary_decompose(alpha, bits), start=1):
        if not bit:
            continue
        sub = cascade(k, MultiState(r, layout), rng)
        trace.extend(sub)
        r = sub.output.density()
        net = sub.net_operation @ net
    r, net = _apply_local(dagger(c), r, net)
    trace.net_operation = net
    trace.output = MultiState(r, layout)
    return trace


def apply_arbitrary(u: np.ndarray, rho, rng: np.random.Generator, bits: int = DEFAULT_BITS) -> CascadeTrace:
    """Implement any two-qubit unitary via its canonical form and three phase-gate syntheses."""
    params = canonical_params(u)
    r, layout = _as_density(rho)
    trace = CascadeTrace()
    net = np.eye(4, dtype=complex)
    r, net = _apply_local(kron(params.v_tilde, params.w_tilde), r, net)
    for axis, mu in enumerate(params.mu):
        sub = apply_phase(mu, MultiState(r, layout), rng, bits, axis)
        trace.extend(sub)
        r = sub.output.density()
        net = sub.net_operation @ net
    r, net = _apply_local(kron(params.v, params.w), r, net)
    trace.net_operation = net
    trace.output = MultiState(r, layout)
    return trace


def expected_arbitrary_ebits(u: np.ndarray, bits: int = DEFAULT_BITS) -> float:
    """Exact mean ebits of :func:`apply_arbitrary`, summed over the set bits."""
    params = canonical_params(u)
    return sum(
        avg_entanglement(k)
        for mu in params.mu
        for k, b in enumerate(binary_decompose(mu, bits), start=1)
        if b
    )
