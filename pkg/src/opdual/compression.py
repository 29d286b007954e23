"""Local compression of sequences of entangled states ``c|00> + s|11>``.

Both parties project their half of the sequence onto the span of basis strings
whose number of zeros lies in a window around its mean, then relabel the kept
subspace. All binomial weights are handled as logarithms so that sequences of a
few thousand signals neither overflow nor lose the small infidelities.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import erf, logsumexp, xlogy

from .linalg import entropy_of_spectrum

LN2 = math.log(2.0)


@dataclass(frozen=True)
class SignalEnsemble:
    """Signals ``cos α_i |00> + sin α_i |11>`` with priors ``p_i``."""

    alphas: tuple[float, ...]
    priors: tuple[float, ...]

    def __post_init__(self):
        if len(self.alphas) != len(self.priors) or not self.alphas:
            raise ValueError("need one prior per signal")
        p = np.asarray(self.priors, dtype=float)
        if np.any(p < 0) or abs(p.sum() - 1.0) > 1e-12:
            raise ValueError("priors must form a probability vector")

    @classmethod
    def two_state(cls, alpha: float) -> "SignalEnsemble":
        """``|00>`` and ``cos α|00> + sin α|11>`` with equal priors."""
        return cls((0.0, float(alpha)), (0.5, 0.5))

    @property
    def mean_c2(self) -> float:
        return float(np.dot(self.priors, np.cos(self.alphas) ** 2))


@dataclass(frozen=True)
class Window:
    k_minus: float
    k_plus: float
    lo: int
    hi: int
    clamped: bool
    log2_dim: float


@dataclass(frozen=True)
class CompressionRun:
    n: int
    alpha: float
    mu: float
    beta: float
    window: Window
    s_tilde: float
    rate: float
    avg_fidelity: float
    infidelity: float
    gaussian_bound: float


def ensemble_entropy(e: SignalEnsemble) -> float:
    """Entropy of the prior-weighted reduced operator ``diag(Σ p c², Σ p s²)``."""
    c2 = e.mean_c2
    return entropy_of_spectrum([c2, 1.0 - c2])


def log_binom_row(m: int, anchor: int | None = None) -> np.ndarray:
    """``log b_{m,k}`` for ``k = 0..m``, exact at ``anchor`` and propagated by ratios.

    Anchoring at the dominant term keeps the terms that matter accurate to a
    few ulps, where ``gammaln`` differences lose ``~ε log(m!)``.
    """
    k0 = m // 2 if anchor is None else min(max(int(anchor), 0), m)
    row = np.empty(m + 1)
    row[k0] = math.log(math.comb(m, k0))
    up = np.arange(k0, m)
    row[k0 + 1 :] = row[k0] + np.cumsum(np.log((m - up) / (up + 1.0)))
    down = np.arange(k0, 0, -1)
    row[:k0][::-1] = row[k0] - np.cumsum(np.log((m - down + 1.0) / down))
    return row


def _check_params(n: int, mu: float, beta: float) -> None:
    if n < 1:
        raise ValueError("N must be positive")
    if not 0.5 < beta < 1.0:
        raise ValueError("β must lie in (1/2, 1)")
    if mu <= 0:
        raise ValueError("μ must be positive")


def typical_window(n: int, e: SignalEnsemble, mu: float, beta: float) -> Window:
    """Kept zero-counts ``[k-, k+]`` and ``log2`` of the kept dimension."""
    _check_params(n, mu, beta)
    centre = n * e.mean_c2
    half = mu * n**beta
    km, kp = centre - half, centre + half
    lo, hi = max(0, math.ceil(km - 1e-12)), min(n, math.floor(kp + 1e-12))
    clamped = km < 0 or kp > n
    if lo > hi:
        return Window(km, kp, lo, hi, clamped, -np.inf)
    row = log_binom_row(n, min(max(n // 2, lo), hi))
    log2_dim = float(logsumexp(row[lo : hi + 1]) / LN2)
    return Window(km, kp, lo, hi, clamped, log2_dim)


def _log_terms(m: int, alpha: float) -> np.ndarray:
    """``log(c^{2k} s^{2(m-k)} b_{m,k})`` for ``k = 0..m``."""
    k = np.arange(m + 1)
    c2, s2 = math.cos(alpha) ** 2, math.sin(alpha) ** 2
    row = log_binom_row(m, round(m * c2))
    with np.errstate(divide="ignore"):
        return xlogy(k, c2) + xlogy(m - k, s2) + row


def kept_log_mass(j: int, n: int, alpha: float, lo: int, hi: int) -> tuple[float, float]:
    """Logs of the kept and lost probability mass for a sequence with ``j`` product signals."""
    if not 0 <= j <= n:
        raise ValueError("j must lie in [0, N]")
    logs = _log_terms(n - j, alpha)
    k = np.arange(n - j + 1)
    inside = (j + k >= lo) & (j + k <= hi)
    kept = logsumexp(logs[inside]) if inside.any() else -np.inf
    lost = logsumexp(logs[~inside]) if (~inside).any() else -np.inf
    return float(kept), float(lost)


def normalization_residual(m: int, alpha: float) -> float:
    """``|log Σ_k c^{2k} s^{2(m-k)} b_{m,k}|``; zero for a correctly weighted binomial."""
    return abs(float(logsumexp(_log_terms(m, alpha))))


def sequence_fidelity(j: int, n: int, alpha: float, window: tuple[int, int]) -> float:
    kept, _ = kept_log_mass(j, n, alpha, *window)
    return math.exp(2.0 * kept)


def sequence_infidelity(j: int, n: int, alpha: float, window: tuple[int, int]) -> float:
    """``1 - F_j`` evaluated from the lost mass ``L`` as ``L (2 - L)``."""
    _, lost = kept_log_mass(j, n, alpha, *window)
    big_l = math.exp(lost)
    return big_l * (2.0 - big_l)


def _log_infidelities(n: int, alpha: float, lo: int, hi: int) -> np.ndarray:
    out = np.empty(n + 1)
    for j in range(n + 1):
        _, lost = kept_log_mass(j, n, alpha, lo, hi)
        if lost == -np.inf:
            out[j] = -np.inf
        else:
            out[j] = lost + math.log(2.0 - math.exp(lost))
    return out


def average_infidelity(n: int, alpha: float, mu: float, beta: float) -> float:
    """``1 - F̄`` with ``F̄ = 2^{-N} Σ_j b_{N,j} F_j`` over every ``j``."""
    w = typical_window(n, SignalEnsemble.two_state(alpha), mu, beta)
    if w.lo > w.hi:
        return 1.0
    logs = _log_infidelities(n, alpha, w.lo, w.hi)
    return float(np.exp(logsumexp(log_binom_row(n) - n * LN2 + logs)))


def average_fidelity(n: int, alpha: float, mu: float, beta: float) -> float:
    return 1.0 - average_infidelity(n, alpha, mu, beta)


def sequence_weight_total(n: int) -> float:
    """``Σ_j 2^{-N} b_{N,j}``, which must equal one."""
    return float(np.exp(logsumexp(log_binom_row(n) - n * LN2)))


def gaussian_bound(n: int, mu: float, beta: float) -> float:
    """Standard-normal mass of ``[-x, x]`` at ``x = 2 μ N^{β - 1/2}``."""
    _check_params(n, mu, beta)
    x = 2.0 * mu * n ** (beta - 0.5)
    return float(erf(x / math.sqrt(2.0)))


def rate_upper_bound(n: int, e: SignalEnsemble, mu: float, beta: float) -> float:
    """Per-signal slack allowed around the entropy: ``S + μ N^{β-1} (1 + log2 N)``."""
    return ensemble_entropy(e) + mu * n ** (beta - 1.0) * (1.0 + math.log2(n))


def compression_run(n: int, alpha: float, mu: float, beta: float) -> CompressionRun:
    e = SignalEnsemble.two_state(alpha)
    w = typical_window(n, e, mu, beta)
    inf = average_infidelity(n, alpha, mu, beta)
    return CompressionRun(
        n=n,
        alpha=alpha,
        mu=mu,
        beta=beta,
        window=w,
        s_tilde=ensemble_entropy(e),
        rate=w.log2_dim / n,
        avg_fidelity=1.0 - inf,
        infidelity=inf,
        gaussian_bound=gaussian_bound(n, mu, beta),
    )
