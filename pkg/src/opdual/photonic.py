"""Gate implementation when each party can only resolve ``Φ+``, ``Ψ+`` or "one of the other two"."""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .duality import choi_of_unitary, teleport_branches
from .linalg import Layout, kron, permute_subsystems
from .qobjects import (
    PHI_PLUS,
    PSI_PLUS,
    SX,
    MultiState,
    named_gate,
    pair_labels,
    phase_gate,
    psi_alpha,
)

FAMILY_TOL = 1e-10


class BellClass(enum.Enum):
    PHI_PLUS = "PHI_PLUS"
    PSI_PLUS = "PSI_PLUS"
    MERGED = "MERGED"


_CLASS_OF = {(1, 1): BellClass.PHI_PLUS, (1, 2): BellClass.PSI_PLUS, (2, 1): BellClass.MERGED, (2, 2): BellClass.MERGED}


@dataclass(frozen=True)
class IncompleteBellOutcome:
    cls: BellClass
    probability: float
    post_state: np.ndarray | None  # None for the merged outcome


@dataclass(frozen=True)
class PhotonicStats:
    gate: str
    accepted: tuple[tuple[BellClass, ...], ...]
    p_exact: float
    output: np.ndarray


def class_probabilities(rho: np.ndarray) -> dict[BellClass, float]:
    rho = np.asarray(rho, dtype=complex)
    p_phi = float((PHI_PLUS.conj() @ rho @ PHI_PLUS).real)
    p_psi = float((PSI_PLUS.conj() @ rho @ PSI_PLUS).real)
    return {
        BellClass.PHI_PLUS: p_phi,
        BellClass.PSI_PLUS: p_psi,
        BellClass.MERGED: max(0.0, float(np.trace(rho).real) - p_phi - p_psi),
    }


def incomplete_bell_measure(rho: np.ndarray, rng: np.random.Generator) -> IncompleteBellOutcome:
    """Sample the three-outcome coarse Bell measurement on a two-qubit state."""
    probs = class_probabilities(rho)
    classes = list(probs)
    p = np.array([probs[c] for c in classes])
    k = int(rng.choice(3, p=p / p.sum()))
    cls = classes[k]
    post = {BellClass.PHI_PLUS: PHI_PLUS, BellClass.PSI_PLUS: PSI_PLUS}.get(cls)
    return IncompleteBellOutcome(cls, float(p[k]), None if post is None else np.outer(post, post.conj()))


def phase_family_angle(u: np.ndarray) -> float | None:
    """``α`` if ``u`` equals ``U(α)`` up to a global phase, otherwise ``None``."""
    u = np.asarray(u, dtype=complex)
    xx = kron(SX, SX)
    a = np.trace(u) / 4
    b = np.trace(xx @ u) / 4
    if np.max(np.abs(u - a * np.eye(4) - b * xx)) > FAMILY_TOL:
        return None
    # remove the global phase that makes a real and non-negative
    phase = np.exp(-1j * np.angle(a)) if abs(a) > FAMILY_TOL else np.exp(-1j * (np.angle(b) + np.pi / 2))
    return float(np.arctan2(-(b * phase).imag, (a * phase).real))


def resource_state(name: str, alpha: float | None = None) -> MultiState:
    key = name.strip().upper()
    layout = Layout((2,) * 4, pair_labels(2))
    if key == "CNOT":
        zz = np.array([1, 0, 0, 0], dtype=complex)
        oo = np.array([0, 0, 0, 1], dtype=complex)
        return MultiState((np.kron(zz, PHI_PLUS) + np.kron(oo, PSI_PLUS)) / np.sqrt(2), layout)
    if key == "SWAP":
        v = np.kron(PHI_PLUS, PHI_PLUS)  # order A1 B2 A2 B1
        src = Layout((2,) * 4, ["A1", "B2", "A2", "B1"])
        return MultiState(permute_subsystems(v, src, layout.labels), layout)
    if key == "PHASE":
        if alpha is None:
            raise ValueError("the phase family needs an angle")
        return psi_alpha(alpha, 2)
    raise ValueError(f"unknown resource {name!r}")


def _accepting(u: np.ndarray) -> tuple[str, set]:
    if phase_family_angle(u) is not None:
        ok = {BellClass.PHI_PLUS, BellClass.PSI_PLUS}
        return "phase", {(a, b) for a in ok for b in ok}
    return "general", {(BellClass.PHI_PLUS, BellClass.PHI_PLUS)}


def photonic_stats(u: np.ndarray, rho, gate_name: str = "custom") -> PhotonicStats:
    """Exact success probability and conditional output of the coarse-measurement protocol."""
    u = np.asarray(u, dtype=complex)
    outcomes, probs, states = teleport_branches(choi_of_unitary(u), rho)
    _, accept = _accepting(u)
    p = 0.0
    out = np.zeros((4, 4), dtype=complex)
    for o, pk, st in zip(outcomes, probs, states):
        cls = tuple(_CLASS_OF[i] for i in o)
        if cls in accept:
            p += pk
            out += pk * st
    return PhotonicStats(gate_name, tuple(sorted(accept, key=str)), float(p), out / p if p > 0 else out)


def photonic_apply(u: np.ndarray, rho, rng: np.random.Generator) -> tuple[bool, np.ndarray | None]:
    """One run: sample joint Bell outcomes, keep the run only for accepted class pairs."""
    u = np.asarray(u, dtype=complex)
    outcomes, probs, states = teleport_branches(choi_of_unitary(u), rho)
    _, accept = _accepting(u)
    k = int(rng.choice(len(outcomes), p=probs))
    cls = tuple(_CLASS_OF[i] for i in outcomes[k])
    if cls in accept:
        return True, states[k]
    return False, None


def photonic_trials(u: np.ndarray, rho, trials: int, rng: np.random.Generator) -> int:
    """Number of successes in ``trials`` independent runs."""
    u = np.asarray(u, dtype=complex)
    outcomes, probs, _ = teleport_branches(choi_of_unitary(u), rho)
    _, accept = _accepting(u)
    mask = np.array([tuple(_CLASS_OF[i] for i in o) in accept for o in outcomes])
    draws = rng.choice(len(outcomes), size=trials, p=probs)
    return int(mask[draws].sum())


def gate_by_name(name: str, alpha: float | None = None) -> np.ndarray:
    if name.strip().upper() == "PHASE":
        if alpha is None:
            raise ValueError("the phase family needs an angle")
        return phase_gate(alpha)
    return named_gate(name)
