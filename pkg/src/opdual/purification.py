"""Distillability of noisy gate resources and the single-qubit purification pipeline."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.special import gammaln

from .duality import choi_of_channel
from .linalg import Layout, herm_eig, partial_transpose
from .qobjects import (
    PHI_PLUS,
    PSI_PLUS,
    SX,
    Channel,
    MultiState,
    depolarize,
    named_gate,
    phase_gate,
)

BISECT_TOL = 1e-12
NPT_TOL = 1e-13


@dataclass(frozen=True)
class ThresholdReport:
    gate: str
    alpha: float | None
    closed_form_q: float | None
    bisection_q: float | None
    samples: tuple[tuple[float, float], ...] = field(default=())


@dataclass(frozen=True)
class LocalPurifyState:
    lam: float
    success_probability: float
    projected: np.ndarray
    q: float | None = None


def ppt_min_eig(e: MultiState | np.ndarray, cut, layout: Layout | None = None) -> float:
    """Smallest eigenvalue of the partial transpose over the labels in ``cut``."""
    if isinstance(e, MultiState):
        rho, layout = e.density(), e.layout
    else:
        rho = np.asarray(e, dtype=complex)
        if layout is None:
            raise ValueError("a layout is needed for a bare matrix")
    cut = [cut] if isinstance(cut, str) else list(cut)
    return float(herm_eig(partial_transpose(rho, layout, cut))[0][-1])


def noisy_choi(u: np.ndarray, q: float) -> MultiState:
    return choi_of_channel(depolarize(u, q))


def _gate_matrix(gate) -> tuple[str, float | None, np.ndarray]:
    if isinstance(gate, str):
        return gate.upper(), None, named_gate(gate)
    if isinstance(gate, (int, float, np.floating)):
        return "phase", float(gate), phase_gate(float(gate))
    return "custom", None, np.asarray(gate, dtype=complex)


def threshold_closed_form(gate) -> float:
    """Depolarizing weight ``q`` above which the noisy resource turns NPT.

    ``gate`` is ``"CNOT"`` or the angle ``α`` of ``U(α)``.
    """
    if isinstance(gate, str):
        if gate.upper() != "CNOT":
            raise ValueError(f"no closed form for {gate!r}")
        return 1.0 / 9.0
    a = float(gate)
    return 1.0 / (16.0 * abs(np.cos(a) * np.sin(a)) + 1.0)


def npt_margin(u: np.ndarray, q: float) -> float:
    return ppt_min_eig(noisy_choi(u, q), ["A1", "A2"])


def threshold_bisection(gate, tol: float = BISECT_TOL, samples: int = 0) -> float | None:
    """Smallest ``q`` whose noisy resource is NPT, or ``None`` if it never is.

    The margin is concave in ``q`` and positive at ``q = 0``, so the crossing is unique.
    """
    _, _, u = _gate_matrix(gate)
    if npt_margin(u, 1.0) >= -NPT_TOL:
        return None
    lo, hi = 0.0, 1.0
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if npt_margin(u, mid) < 0:
            hi = mid
        else:
            lo = mid
    return 0.5 * (lo + hi)


def threshold_report(gate, grid: int = 0) -> ThresholdReport:
    name, alpha, u = _gate_matrix(gate)
    try:
        closed = threshold_closed_form(alpha if alpha is not None else name)
    except ValueError:
        closed = None
    qs = np.linspace(0.0, 1.0, grid) if grid else []
    return ThresholdReport(
        gate=name,
        alpha=alpha,
        closed_form_q=closed,
        bisection_q=threshold_bisection(u),
        samples=tuple((float(q), npt_margin(u, q)) for q in qs),
    )


# Basis of the two-dimensional subspace holding every Choi state of exp(-iασx).
_SUBSPACE = np.column_stack([PHI_PLUS, -1j * PSI_PLUS])


def noisy_local_choi(alpha: float, q: float) -> MultiState:
    """Choi state of ``ρ -> q UρU† + (1-q) 1/2`` with ``U = exp(-iασx)``."""
    u = np.cos(alpha) * np.eye(2) - 1j * np.sin(alpha) * SX
    return choi_of_channel(Channel(depolarize(u, q).kraus, (2,)))


def project_unknown(e: MultiState | np.ndarray, q: float | None = None) -> LocalPurifyState:
    """Project onto ``span{|Φ+>, -i|Ψ+>}`` and read off the Werner weight ``λ``."""
    rho = e.density() if isinstance(e, MultiState) else np.asarray(e, dtype=complex)
    if rho.shape != (4, 4):
        raise ValueError("project_unknown expects a two-qubit Choi state")
    block = _SUBSPACE.conj().T @ rho @ _SUBSPACE
    p = float(np.trace(block).real)
    if p <= 0:
        raise ValueError("projection has zero probability")
    block = block / p
    lam = 1.0 - 2.0 * float(herm_eig(block)[0][-1])
    return LocalPurifyState(lam, p, block, q)


def lambda_of_q(q: float) -> float:
    return 2.0 * q / (1.0 + q)


def fd_scaling(lam: float, copies: int) -> tuple[float, float]:
    """Asymptotic fidelity and yield after purifying ``copies`` Werner pairs."""
    if not 0.0 < lam <= 1.0:
        raise ValueError("λ must lie in (0, 1]")
    if copies < 1:
        raise ValueError("copies must be positive")
    f = 1.0 - (1.0 - lam) / (2.0 * copies * lam**2)
    d = lam + (1.0 - lam) / (copies * lam)
    return f, d


def random_walk_exact(cap: int) -> float:
    """Probability that a fair ±1 walk from 0 first hits +1 within ``cap`` steps."""
    if cap < 1:
        raise ValueError("cap must be at least 1")
    j = np.arange((cap - 1) // 2 + 1)
    # Catalan(j) / 2^(2j+1)
    logp = gammaln(2 * j + 1) - gammaln(j + 1) - gammaln(j + 2) - (2 * j + 1) * np.log(2.0)
    return float(np.exp(logp).sum())


def first_passage_times(cap: int, trials: int, rng: np.random.Generator, block: int = 256) -> np.ndarray:
    """Step at which each walk first reaches +1, or 0 if it has not by ``cap``."""
    if cap < 1:
        raise ValueError("cap must be at least 1")
    pos = np.zeros(trials, dtype=np.int64)
    hit = np.zeros(trials, dtype=np.int64)
    active = np.arange(trials)
    done = 0
    while active.size and done < cap:
        n = min(block, cap - done)
        steps = rng.integers(0, 2, size=(active.size, n), dtype=np.int8) * 2 - 1
        path = pos[active, None] + np.cumsum(steps, axis=1, dtype=np.int64)
        reached = path >= 1
        any_hit = reached.any(axis=1)
        first = reached.argmax(axis=1)
        hit[active[any_hit]] = done + first[any_hit] + 1
        pos[active] = path[:, -1]
        active = active[~any_hit]
        done += n
    return hit


def random_walk_success(cap: int, trials: int, rng: np.random.Generator) -> float:
    """Fraction of walks that stop (one net success) within ``cap`` attempts."""
    return float(np.mean(first_passage_times(cap, trials, rng) > 0))
