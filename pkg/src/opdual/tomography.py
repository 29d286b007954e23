"""Process tomography of two-party channels from local Pauli measurements on the dual state.

Each party holds a 4-level system (two qubits), so the dual state is expanded in
``A_i ⊗ B_j`` with ``A_i, B_j`` drawn from the 16 normalised two-qubit Pauli
products. A coefficient ``λ_ij`` is the correlation of two local ±1 measurements.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from .duality import choi_of_channel
from .linalg import Layout, herm_eig, kron, permute_subsystems
from .qobjects import I2, SX, SY, SZ, Channel, MultiState, pair_labels

PAULI_LETTERS = ("I", "X", "Y", "Z")
_PAULIS = dict(zip(PAULI_LETTERS, (I2, SX, SY, SZ)))
PSD_REPAIR_TOL = 1e-12


@dataclass(frozen=True)
class TomographyRecord:
    labels: tuple[str, ...]
    coefficients: np.ndarray  # 16 x 16 real, indexed (i, j)
    stderr: np.ndarray
    shots: int | None  # None for exact expectations
    choi: MultiState
    repaired: bool = False
    min_eig_before_repair: float = 0.0

    def rows(self):
        """``(i-label, j-label, lambda, stderr)`` for every coefficient."""
        for i, a in enumerate(self.labels):
            for j, b in enumerate(self.labels):
                yield a, b, float(self.coefficients[i, j]), float(self.stderr[i, j])


@dataclass(frozen=True)
class TomographyResult:
    record: TomographyRecord
    estimate: Channel
    action_residual: float


def pauli_strings() -> list[str]:
    return ["".join(p) for p in itertools.product(PAULI_LETTERS, repeat=2)]


def _pauli_matrix(label: str) -> np.ndarray:
    return kron(*(_PAULIS[c] for c in label))


def operator_basis(dim: int = 4) -> tuple[list[str], list[np.ndarray]]:
    """Hermitian basis of 4x4 matrices, orthonormal under ``tr(B_a B_b)``."""
    if dim != 4:
        raise ValueError("operator_basis supports local dimension 4 only")
    labels = pauli_strings()
    return labels, [_pauli_matrix(s) / 2.0 for s in labels]


def _dual_layout() -> Layout:
    return Layout((2, 2, 2, 2), pair_labels(2))


def _as_matrix(e) -> np.ndarray:
    rho = e.density() if isinstance(e, MultiState) else np.asarray(e, dtype=complex)
    if rho.shape != (16, 16):
        raise ValueError("expected a state on two 4-level parties")
    return rho


def _pauli_expectations(rho: np.ndarray) -> np.ndarray:
    """``<P_a ⊗ P_b>`` for all 16 x 16 Pauli string pairs."""
    _, basis = operator_basis()
    paulis = np.array([2.0 * b for b in basis])
    # tr((Pa⊗Pb) ρ) with ρ viewed as (a_row, b_row, a_col, b_col)
    r = rho.reshape(4, 4, 4, 4)
    return np.einsum("iqp,jsr,prqs->ij", paulis, paulis, r).real


def resum(coefficients: np.ndarray) -> np.ndarray:
    _, basis = operator_basis()
    b = np.array(basis)
    return np.einsum("ij,iab,jcd->acbd", coefficients, b, b).reshape(16, 16)


def _record(coeff, stderr, shots) -> TomographyRecord:
    labels, _ = operator_basis()
    est = resum(coeff)
    est = 0.5 * (est + est.conj().T)
    evals, evecs = herm_eig(est)
    low = float(evals[-1])
    repaired = low < -PSD_REPAIR_TOL
    if repaired:
        evals = np.clip(evals, 0.0, None)
        est = (evecs * evals) @ evecs.conj().T
        est /= np.trace(est).real
    return TomographyRecord(
        tuple(labels), coeff, stderr, shots, MultiState(est, _dual_layout()), repaired, low
    )


def coefficients_exact(e) -> TomographyRecord:
    rho = _as_matrix(e)
    coeff = _pauli_expectations(rho) / 4.0
    return _record(coeff, np.zeros_like(coeff), None)


def coefficients_sampled(e, shots: int, rng: np.random.Generator) -> TomographyRecord:
    """Estimate every ``λ_ij`` from ``shots`` joint outcomes of ``P_a`` (party A) and ``P_b`` (party B)."""
    if shots < 1:
        raise ValueError("shots must be positive")
    rho = _as_matrix(e)
    m = _pauli_expectations(rho)
    ma = m[:, :1]  # <P_a ⊗ 1>
    mb = m[:1, :]
    # joint outcome distribution of (a, b) in order (+,+), (+,-), (-,+), (-,-)
    signs = np.array([(1, 1), (1, -1), (-1, 1), (-1, -1)])
    probs = np.stack(
        [(1 + sa * ma + sb * mb + sa * sb * m) / 4.0 for sa, sb in signs], axis=-1
    )
    probs = np.clip(probs, 0.0, None)
    probs /= probs.sum(axis=-1, keepdims=True)
    counts = rng.multinomial(shots, probs.reshape(-1, 4)).reshape(16, 16, 4)
    products = signs[:, 0] * signs[:, 1]
    mean_ab = (counts * products).sum(axis=-1) / shots
    coeff = mean_ab / 4.0
    stderr = np.sqrt(np.clip(1.0 - mean_ab**2, 0.0, None) / shots) / 4.0
    return _record(coeff, stderr, shots)


def kraus_from_dual(e: MultiState) -> Channel:
    """Kraus operators of the channel whose dual state is ``e`` (no trace check)."""
    labels = pair_labels(2)
    outs_first = ["A1", "B1", "A2", "B2"]
    j = permute_subsystems(e.density(), Layout((2,) * 4, labels), outs_first) * 4
    evals, evecs = herm_eig(j)
    kraus = [np.sqrt(v) * evecs[:, k].reshape(4, 4) for k, v in enumerate(evals) if v > 1e-14]
    return Channel(tuple(kraus), (2, 2), check=False)


def probe_states() -> list[np.ndarray]:
    """The 16 product states built from ``|0>, |1>, |+>, |+i>``."""
    singles = [
        np.array([1, 0], dtype=complex),
        np.array([0, 1], dtype=complex),
        np.array([1, 1], dtype=complex) / np.sqrt(2),
        np.array([1, 1j], dtype=complex) / np.sqrt(2),
    ]
    out = []
    for a, b in itertools.product(singles, repeat=2):
        v = np.kron(a, b)
        out.append(np.outer(v, v.conj()))
    return out


def action_residual(c: Channel, estimate: Channel) -> float:
    return max(float(np.max(np.abs(c(r) - estimate(r)))) for r in probe_states())


def channel_tomography(c: Channel, shots: int | None, rng: np.random.Generator | None = None) -> TomographyResult:
    """Reconstruct ``c`` from its dual state; ``shots=None`` uses exact expectations."""
    if c.dims != (2, 2):
        raise ValueError("channel_tomography handles two-party qubit channels")
    e = choi_of_channel(c)
    if shots is None:
        rec = coefficients_exact(e)
    else:
        if rng is None:
            raise ValueError("sampled tomography needs a random stream")
        rec = coefficients_sampled(e, shots, rng)
    est = kraus_from_dual(rec.choi)
    return TomographyResult(rec, est, action_residual(c, est))


def trace_distance(a: np.ndarray, b: np.ndarray) -> float:
    return 0.5 * float(np.abs(np.linalg.eigvalsh(a - b)).sum())
