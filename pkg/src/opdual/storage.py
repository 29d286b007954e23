"""Qubit counts for storing unknown phase gates ``U(α)`` as compressed resource states.

Every resource ``|Ψ_α> = cos α |Φ+Φ+> - i sin α |Ψ+Ψ+>`` lies in one fixed
two-dimensional subspace, so mixtures of them are 2x2 matrices in the basis
``(|Φ+Φ+>, -i|Ψ+Ψ+>)``. Locally stored resources are compressed as pure
states; resources split between two parties are compressed locally from the
reduced operators ``diag(cos²α, sin²α)``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .linalg import binary_entropy, entropy_of_spectrum

LOCAL = "local"
NONLOCAL = "nonlocal"
LOCALITIES = (LOCAL, NONLOCAL)

# first step index for each supported upper angle
START_STEP = {"pi": 1, "pi8": 4, "pi32": 6}
ALPHA_MAX = {"pi": np.pi, "pi8": np.pi / 8, "pi32": np.pi / 32}

TERM_STOP = 1e-9
TAIL_TARGET = 1e-12
MAX_STEPS = 1000


@dataclass(frozen=True)
class RateReport:
    qubits_per_operation: float
    exact_series: float | None = None
    qcomm_per_operation: float | None = None
    tail_bound: float = 0.0
    breakdown: tuple[tuple[int, float, float], ...] = field(default=())  # (step, entropy, weight)


def _check_locality(locality: str) -> None:
    if locality not in LOCALITIES:
        raise ValueError(f"locality must be one of {LOCALITIES}")


def step_entropy(k: int, locality: str) -> float:
    """Entropy per step for the equal mixture of ``Ψ_0`` and ``Ψ_{π/2^k}``."""
    if k < 1:
        raise ValueError("step index starts at 1")
    _check_locality(locality)
    c = np.cos(np.ldexp(np.pi, -k))
    x = (1 + c) / 2 if locality == LOCAL else (1 + c * c) / 2
    return binary_entropy(float(x))


def mixture_entropy(angles, weights, locality: str) -> float:
    """Entropy of the weighted mixture of resources with the given angles."""
    _check_locality(locality)
    a = np.asarray(angles, dtype=float)
    w = np.asarray(weights, dtype=float)
    w = w / w.sum()
    c2 = float(np.sum(w * np.cos(a) ** 2))
    if locality == NONLOCAL:
        return binary_entropy(min(1.0, max(0.0, c2)))
    off = float(np.sum(w * np.cos(a) * np.sin(a)))
    rho = np.array([[c2, off], [off, 1.0 - c2]])
    return entropy_of_spectrum(np.linalg.eigvalsh(rho))


def _series(k0: int, locality: str):
    terms = []
    k = k0
    tail = np.inf
    while k - k0 < MAX_STEPS:
        t = step_entropy(k, locality)
        terms.append((k, t))
        if len(terms) >= 2 and t < TERM_STOP:
            ratio = t / terms[-2][1]
            if ratio < 1:
                # ratio test: remaining terms are dominated by a geometric series
                tail = t * ratio / (1 - ratio)
                if tail < TAIL_TARGET:
                    break
        k += 1
    if not np.isfinite(tail):
        raise ArithmeticError("series did not converge")
    return terms, tail


def infinite_rate(alpha_max: str, locality: str) -> RateReport:
    """``2 Σ_{k≥k0} S_k`` along with the exact weighted series it bounds."""
    if alpha_max not in START_STEP:
        raise ValueError(f"alpha_max must be one of {sorted(START_STEP)}")
    _check_locality(locality)
    terms, tail = _series(START_STEP[alpha_max], locality)
    bound = 2.0 * sum(t for _, t in terms)
    exact = sum(t * (2.0 - 0.5 ** (k - 1)) for k, t in terms)
    rows = tuple((k, t, 2.0) for k, t in terms)
    return RateReport(bound, exact, None, 2.0 * tail, rows)


def qcomm_rate(alpha_max: str) -> RateReport:
    """Quantum communication per gate when only party A stores the resources.

    ``Ψ_{π/2}`` is a product state, so the first step sends nothing.
    """
    base = infinite_rate(alpha_max, NONLOCAL)
    drop = 2.0 * step_entropy(1, NONLOCAL) if START_STEP[alpha_max] == 1 else 0.0
    return RateReport(
        base.qubits_per_operation,
        base.exact_series,
        base.qubits_per_operation - drop,
        base.tail_bound,
        base.breakdown,
    )


def column_angles(k: int, m: int) -> np.ndarray:
    """Angles stored in column ``k`` of the ``m``-row table (one per gate ``U(π/2^l)``)."""
    if not 1 <= k <= m:
        raise ValueError("column index must lie in [1, M]")
    nonzero = np.ldexp(np.pi, -np.arange(1, m - k + 2))
    return np.concatenate([np.zeros(k - 1), nonzero])


def finite_rate(m: int, locality: str) -> RateReport:
    """``Σ_k S(ρ_k) / 2^{k-1}`` for equally likely ``U(π/2^l)``, ``l = 1..M``."""
    if m < 1:
        raise ValueError("M must be at least 1")
    _check_locality(locality)
    rows = []
    total = 0.0
    for k in range(1, m + 1):
        a = column_angles(k, m)
        s = mixture_entropy(a, np.ones_like(a), locality)
        w = 0.5 ** (k - 1)
        rows.append((k, s, w))
        total += w * s
    return RateReport(total, None, None, 0.0, tuple(rows))


def gram_mixture_entropy(angles) -> float:
    """Entropy of the equal mixture of pure resources via their Gram matrix."""
    a = np.asarray(angles, dtype=float)
    g = np.cos(a[:, None] - a[None, :]) / len(a)
    return entropy_of_spectrum(np.linalg.eigvalsh(g))
