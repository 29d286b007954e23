"""Channel <-> state duality for N parties.

A channel acting on one ``d``-level system per party is turned into its state
by feeding it the first halves of local maximally entangled pairs. The reverse
direction projects each party's (second half, input) pair onto ``|Φ>``: with
probability ``1/d^{2N}`` the remaining particles carry the channel output.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import lru_cache
from typing import Sequence

import numpy as np

from .linalg import Layout, dagger, kron, operator_distance, permute_subsystems
from .qobjects import (
    BELL_INDICES,
    BellIndex,
    Channel,
    MultiState,
    bell_vector,
    mes,
    pair_labels,
    party_names,
    pauli,
)

PROB_TOL = 1e-14


@dataclass(frozen=True)
class DualityOutcome:
    success: bool
    probability: float
    output_state: MultiState | None
    outcome_indices: tuple[BellIndex, ...] | None = None


def choi_of_channel(c: Channel) -> MultiState:
    """State on ``A1, A2, B1, B2, ...`` obtained by applying ``c`` to the ``*1`` halves.

    Returns a pure state when the channel has a single Kraus operator.
    """
    n = c.parties
    d = c.dims[0]
    if any(x != d for x in c.dims) or c.dim_out != c.dim_in:
        raise ValueError("choi_of_channel needs one d-level input and output per party")
    big = d**n
    labels = pair_labels(n)
    outs = [labels[2 * i] for i in range(n)]
    refs = [labels[2 * i + 1] for i in range(n)]
    grouped = Layout((d,) * (2 * n), outs + refs)
    vecs = [permute_subsystems(k.reshape(-1) / np.sqrt(big), grouped, labels) for k in c.kraus]
    layout = Layout((d,) * (2 * n), labels)
    if len(vecs) == 1:
        return MultiState(vecs[0], layout)
    rho = sum(np.outer(v, v.conj()) for v in vecs)
    return MultiState(rho, layout)


def _infer(e: MultiState, rho_dim: int) -> tuple[int, int]:
    m = len(e.dims)
    if m % 2 or m == 0:
        raise ValueError("duality state must hold two subsystems per party")
    n = m // 2
    d = e.dims[0]
    if any(x != d for x in e.dims):
        raise ValueError("all subsystems of the duality state must share one dimension")
    if rho_dim != d**n:
        raise ValueError(f"input state dimension {rho_dim} does not match {n} parties of dimension {d}")
    return n, d


_PATHS: dict = {}


@lru_cache(maxsize=None)
def _contraction(n: int) -> str:
    letters = iter("abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ")
    o, e1, e2, f1, f2, r, s = ([next(letters) for _ in range(n)] for _ in range(7))
    e_ket = "".join(e1[p] + e2[p] for p in range(n))
    e_bra = "".join(f1[p] + f2[p] for p in range(n))
    terms = [e_ket + e_bra, "".join(r) + "".join(s)]
    for p in range(n):
        terms.append(o[p] + e2[p] + r[p])  # conjugated projection vector
        terms.append(o[p] + f2[p] + s[p])
    out = "".join(o) + "".join(e1) + "".join(f1)
    return ",".join(terms) + "->" + out


def _project(e: np.ndarray, rho: np.ndarray, n: int, d: int, vecs: np.ndarray) -> np.ndarray:
    """Unnormalised ``<v|_(2,3) (E ⊗ ρ) |v>_(2,3)`` for every joint outcome.

    ``vecs[o]`` is a ``d x d`` amplitude matrix ``v[x, y]`` of a state on the
    (second half, input) pair of one party. Returns shape ``(m,)*n + (D, D)``.
    """
    et = e.reshape((d,) * (4 * n))
    rt = rho.reshape((d,) * (2 * n))
    ops = [et, rt]
    for _ in range(n):
        ops += [vecs.conj(), vecs]
    key = (n, d, vecs.shape[0])
    path = _PATHS.get(key)
    if path is None:
        path = _PATHS[key] = np.einsum_path(_contraction(n), *ops, optimize="greedy")[0]
    out = np.einsum(_contraction(n), *ops, optimize=path)
    m = vecs.shape[0]
    return out.reshape((m,) * n + (d**n, d**n))


def choi_action(e: MultiState, op: np.ndarray) -> np.ndarray:
    """``d^{2N} tr_{2,3}(E · op · P ⊗ ... ⊗ P)`` for any operator ``op`` on the inputs."""
    op = np.asarray(op, dtype=complex)
    n, d = _infer(e, op.shape[0])
    phi = mes(d).data.reshape(1, d, d)
    out = _project(e.density(), op, n, d, phi)
    return d ** (2 * n) * out.reshape(d**n, d**n)


def apply_via_choi(e: MultiState, rho: MultiState | np.ndarray) -> DualityOutcome:
    """Post-selected implementation: all parties find ``|Φ>`` on their (2, 3) pair."""
    r = rho.density() if isinstance(rho, MultiState) else np.asarray(rho, dtype=complex)
    n, d = _infer(e, r.shape[0])
    phi = mes(d).data.reshape(1, d, d)
    out = _project(e.density(), r, n, d, phi).reshape(d**n, d**n)
    p = float(np.trace(out).real)
    if p <= PROB_TOL:
        raise ValueError("the success branch has zero probability")
    labels = [f"{x}1" for x in party_names(n)]
    state = MultiState(out / p, Layout((d,) * n, labels))
    return DualityOutcome(True, p, state, ((1, 1),) * n if d == 2 else None)


@lru_cache(maxsize=None)
def _bell_stack() -> np.ndarray:
    return np.array([bell_vector(i).reshape(2, 2) for i in BELL_INDICES])


@lru_cache(maxsize=None)
def _corrections(n: int) -> tuple[list, np.ndarray]:
    outcomes = list(itertools.product(BELL_INDICES, repeat=n))
    return outcomes, np.array([kron(*(pauli(i) for i in idx)) for idx in outcomes])


def teleport_branches(e: MultiState, rho: MultiState | np.ndarray):
    """Exact joint Bell-outcome distribution with Pauli corrections applied.

    Returns ``(outcomes, probabilities, states)`` where ``outcomes[k]`` is the
    tuple of per-party Bell indices, ``probabilities[k]`` its Born weight and
    ``states[k]`` the corrected, normalised output density matrix (zero matrix
    for zero-probability branches).
    """
    r = rho.density() if isinstance(rho, MultiState) else np.asarray(rho, dtype=complex)
    n, d = _infer(e, r.shape[0])
    if d != 2:
        raise ValueError("teleport corrections are defined for qubits only")
    raw = _project(e.density(), r, n, d, _bell_stack())
    outcomes, corr = _corrections(n)
    flat = raw.reshape(len(outcomes), 2**n, 2**n)
    probs = np.clip(np.trace(flat, axis1=1, axis2=2).real, 0.0, None)
    states = corr @ flat @ dagger(corr)
    live = probs > PROB_TOL
    states[live] /= probs[live, None, None]
    states[~live] = 0.0
    probs = probs / probs.sum()
    return list(outcomes), probs, states


def teleport_apply(e: MultiState, rho: MultiState | np.ndarray, rng: np.random.Generator) -> DualityOutcome:
    """Sample Bell outcomes by the Born rule and apply ``pauli(idx)`` at each party."""
    outcomes, probs, states = teleport_branches(e, rho)
    k = int(rng.choice(len(outcomes), p=probs))
    n = len(outcomes[k])
    labels = [f"{x}1" for x in party_names(n)]
    state = MultiState(states[k], Layout((2,) * n, labels))
    return DualityOutcome(True, float(probs[k]), state, outcomes[k])


def spanning_operators(dim: int) -> list[np.ndarray]:
    """Matrix units ``|i><j|``; they span every operator on ``C^dim``."""
    ops = []
    for i in range(dim):
        for j in range(dim):
            m = np.zeros((dim, dim), dtype=complex)
            m[i, j] = 1.0
            ops.append(m)
    return ops


def roundtrip_check(c: Channel) -> float:
    """Largest deviation between ``c`` and its reconstruction through the dual state."""
    e = choi_of_channel(c)
    return max(
        operator_distance(c(op), choi_action(e, op)) for op in spanning_operators(c.dim_in)
    )


def choi_of_unitary(u: np.ndarray, dims: Sequence[int] | None = None) -> MultiState:
    return choi_of_channel(Channel.unitary(u, dims))
