"""Non-local projective measurements realised through non-local unitaries."""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .canonical import canonical_params
from .linalg import Layout, dagger, entropy_of_spectrum, partial_transpose
from .qobjects import BELL_INDICES, PHI_PLUS, PSI_PLUS, bell_vector, matrix_from_json, matrix_to_json

SCHEMA_VERSION = 1
SPEC_TOL = 1e-10


@dataclass(frozen=True)
class MeasurementSpec:
    """Complete set of orthogonal projectors on a ``dim``-dimensional system."""

    projectors: tuple[np.ndarray, ...]

    def __post_init__(self):
        ps = tuple(np.asarray(p, dtype=complex) for p in self.projectors)
        if not ps:
            raise ValueError("a measurement needs at least one projector")
        n = ps[0].shape[0]
        for i, p in enumerate(ps):
            if p.shape != (n, n):
                raise ValueError("projectors must share one square shape")
            if np.max(np.abs(p @ p - p)) > SPEC_TOL or np.max(np.abs(p - dagger(p))) > SPEC_TOL:
                raise ValueError(f"projector {i} is not an orthogonal projector")
            for j in range(i):
                if np.max(np.abs(p @ ps[j])) > SPEC_TOL:
                    raise ValueError(f"projectors {j} and {i} overlap")
        if np.max(np.abs(sum(ps) - np.eye(n))) > SPEC_TOL:
            raise ValueError("projectors do not sum to the identity")
        object.__setattr__(self, "projectors", ps)

    @property
    def dim(self) -> int:
        return self.projectors[0].shape[0]

    @property
    def ranks(self) -> tuple[int, ...]:
        return tuple(int(round(np.trace(p).real)) for p in self.projectors)

    def probabilities(self, rho: np.ndarray) -> np.ndarray:
        return np.array([np.trace(p @ rho).real for p in self.projectors])

    def to_json(self) -> str:
        doc = {
            "schema_version": SCHEMA_VERSION,
            "dim": self.dim,
            "projectors": [matrix_to_json(p) for p in self.projectors],
        }
        return json.dumps(doc)

    @classmethod
    def from_json(cls, text: str) -> "MeasurementSpec":
        doc = json.loads(text)
        if doc.get("schema_version") != SCHEMA_VERSION:
            raise ValueError("unsupported measurement schema version")
        spec = cls(tuple(matrix_from_json(m) for m in doc["projectors"]))
        if spec.dim != int(doc["dim"]):
            raise ValueError("declared dimension does not match the projectors")
        return spec

    @classmethod
    def from_vectors(cls, vectors) -> "MeasurementSpec":
        return cls(tuple(np.outer(v, np.conj(v)) for v in vectors))


def parity_spec() -> MeasurementSpec:
    p1 = np.diag([1, 0, 0, 1]).astype(complex)
    return MeasurementSpec((p1, np.eye(4) - p1))


def proposal1_cost(d: int, with_post_state: bool = False) -> float:
    """Ebits to teleport one side over (and back, if the post-measurement state is needed)."""
    if d < 2:
        raise ValueError("d must be at least 2")
    return (2.0 if with_post_state else 1.0) * float(np.log2(d))


def proposal2_unitary(basis, labels, local_a: np.ndarray | None = None, local_b: np.ndarray | None = None) -> np.ndarray:
    """``U = Σ_k |a_k b_k><φ_k|`` for rank-one projectors onto ``basis``.

    ``labels[k] = (i, j)`` picks columns of ``local_a`` and ``local_b``
    (computational bases by default).
    """
    vecs = np.array([np.asarray(v, dtype=complex) for v in basis])
    n = vecs.shape[0]
    d = int(round(np.sqrt(n)))
    if d * d != n or vecs.shape[1] != n:
        raise ValueError("need d^2 vectors of length d^2")
    if np.max(np.abs(vecs.conj() @ vecs.T - np.eye(n))) > SPEC_TOL:
        raise ValueError("basis is not orthonormal")
    la = np.eye(d, dtype=complex) if local_a is None else np.asarray(local_a, dtype=complex)
    lb = np.eye(d, dtype=complex) if local_b is None else np.asarray(local_b, dtype=complex)
    if sorted(map(tuple, labels)) != [(i, j) for i in range(d) for j in range(d)]:
        raise ValueError("labels must enumerate every product index pair once")
    u = np.zeros((n, n), dtype=complex)
    for v, (i, j) in zip(vecs, labels):
        u += np.outer(np.kron(la[:, i], lb[:, j]), v.conj())
    return u


def proposal2_probabilities(u: np.ndarray, rho: np.ndarray, labels, local_a=None, local_b=None) -> np.ndarray:
    """Outcome probabilities read off local measurements after ``U``, ordered like ``labels``."""
    d = int(round(np.sqrt(u.shape[0])))
    la = np.eye(d) if local_a is None else np.asarray(local_a)
    lb = np.eye(d) if local_b is None else np.asarray(local_b)
    out = u @ rho @ dagger(u)
    return np.array([(np.kron(la[:, i], lb[:, j]).conj() @ out @ np.kron(la[:, i], lb[:, j])).real for i, j in labels])


def proposal3_unitary(spec: MeasurementSpec) -> np.ndarray:
    """``Σ_j T_{1j} ⊗ P_j`` on (ancilla with one level per outcome) ⊗ system.

    ``T_{1j}`` swaps ancilla levels 1 and j (identity for j = 1), so starting
    the ancilla in level 1 writes the outcome into it.
    """
    m = len(spec.projectors)
    u = np.zeros((m * spec.dim, m * spec.dim), dtype=complex)
    for j, p in enumerate(spec.projectors):
        t = np.eye(m)
        t[[0, j]] = t[[j, 0]]
        u += np.kron(t, p)
    return u


def proposal3_measure(spec: MeasurementSpec, rho: np.ndarray) -> tuple[np.ndarray, list]:
    """Outcome probabilities and post-measurement system states from reading the ancilla."""
    m = len(spec.projectors)
    anc = np.zeros((m, m), dtype=complex)
    anc[0, 0] = 1.0
    u = proposal3_unitary(spec)
    full = u @ np.kron(anc, rho) @ dagger(u)
    d = spec.dim
    blocks = full.reshape(m, d, m, d)
    probs, posts = [], []
    for j in range(m):
        b = blocks[j, :, j, :]
        p = float(np.trace(b).real)
        probs.append(p)
        posts.append(b / p if p > 1e-15 else None)
    return np.array(probs), posts


def operator_entanglement(u: np.ndarray, dim_a: int, dim_b: int) -> float:
    """Entanglement (ebits) of the dual state of ``u`` across the A:B cut.

    ``u`` acts on ``dim_a ⊗ dim_b`` with A first.
    """
    u = np.asarray(u, dtype=complex)
    t = u.reshape(dim_a, dim_b, dim_a, dim_b).transpose(0, 2, 1, 3).reshape(dim_a**2, dim_b**2)
    s = np.linalg.svd(t / np.sqrt(dim_a * dim_b), compute_uv=False)
    return entropy_of_spectrum(s**2)


def canonical_ebit_bound(u: np.ndarray, f_inf: float) -> float:
    """``f_∞ (μ1 + μ2 + μ3)`` for a two-qubit unitary."""
    return canonical_params(u).ebit_bound(f_inf)


@dataclass(frozen=True)
class ParityDemo:
    input_ppt_min_eig: float
    probabilities: tuple[float, float]
    post_states: tuple[np.ndarray, np.ndarray]
    post_entanglement: tuple[float, float]
    unitary_entanglement: float


def _pure_entanglement(rho: np.ndarray) -> float:
    r = rho.reshape(2, 2, 2, 2)
    reduced = np.einsum("ijkj->ik", r)
    return entropy_of_spectrum(np.linalg.eigvalsh(reduced))


def parity_ebit_demo() -> ParityDemo:
    """Parity measurement on the separable mixture of ``Φ+`` and ``Ψ+``."""
    rho = 0.5 * (np.outer(PHI_PLUS, PHI_PLUS.conj()) + np.outer(PSI_PLUS, PSI_PLUS.conj()))
    layout = Layout((2, 2), ["A", "B"])
    ppt = float(np.linalg.eigvalsh(partial_transpose(rho, layout, ["A"]))[0])
    spec = parity_spec()
    probs, posts = proposal3_measure(spec, rho)
    ent = tuple(_pure_entanglement(p) for p in posts)
    # Alice holds the ancilla and qubit A
    u = proposal3_unitary(spec)
    return ParityDemo(ppt, tuple(map(float, probs)), tuple(posts), ent, operator_entanglement(u, 4, 2))


def bell_basis_vectors() -> list[np.ndarray]:
    return [bell_vector(i) for i in BELL_INDICES]
