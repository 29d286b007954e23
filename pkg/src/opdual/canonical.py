"""Canonical form ``U = (V⊗W) exp(-i Σ μ_k σ_k⊗σ_k) (Ṽ⊗W̃)`` of two-qubit gates.

Computed with the magic-basis spectral method: in the magic basis local gates
become real orthogonal matrices and the interaction term becomes diagonal, so
diagonalising ``U_B^T U_B`` by a real orthogonal matrix separates the two.
Correctness is enforced by reconstructing the input.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .linalg import dagger, is_unitary, kron, operator_distance
from .qobjects import I2, SX, SY, SZ

RECON_TOL = 1e-8
HALF_PI = np.pi / 2

MAGIC = np.array(
    [[1, 1j, 0, 0], [0, 0, 1j, 1], [0, 0, 1j, -1], [1, -1j, 0, 0]], dtype=complex
) / np.sqrt(2)

PAULI_PAIRS = (kron(SX, SX), kron(SY, SY), kron(SZ, SZ))
_PAULIS = (SX, SY, SZ)

# Single-qubit Cliffords that carry σ_axis to σx (used to rotate any interaction
# term onto the σx⊗σx phase-gate family).
_TO_X = {
    0: I2,
    1: np.array([[1, 0], [0, -1j]], dtype=complex),
    2: np.array([[1, 1], [1, -1]], dtype=complex) / np.sqrt(2),
}


@dataclass(frozen=True)
class CanonicalParams:
    mu: tuple[float, float, float]
    v: np.ndarray
    w: np.ndarray
    v_tilde: np.ndarray
    w_tilde: np.ndarray

    def interaction(self) -> np.ndarray:
        return interaction(self.mu)

    def reconstruct(self) -> np.ndarray:
        return kron(self.v, self.w) @ self.interaction() @ kron(self.v_tilde, self.w_tilde)

    def ebit_bound(self, f_inf: float) -> float:
        return f_inf * float(sum(self.mu))


def interaction(mu) -> np.ndarray:
    """``exp(-i Σ μ_k σ_k⊗σ_k)`` as the product of three commuting phase gates."""
    out = np.eye(4, dtype=complex)
    for m, p in zip(mu, PAULI_PAIRS):
        out = out @ (np.cos(m) * np.eye(4) - 1j * np.sin(m) * p)
    return out


def axis_to_x(axis: int) -> np.ndarray:
    """Unitary ``C`` with ``C σ_axis C† = σx`` (axis 0, 1, 2 = x, y, z)."""
    return _TO_X[axis]


def kron_factor(m: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Split a 4x4 product of 2x2 unitaries into unitary factors ``(a, b)``, ``m = a⊗b``."""
    r = m.reshape(2, 2, 2, 2).transpose(0, 2, 1, 3).reshape(4, 4)
    u, s, vh = np.linalg.svd(r)
    a = u[:, 0].reshape(2, 2) * np.sqrt(s[0])
    b = vh[0].reshape(2, 2) * np.sqrt(s[0])
    scale = np.sqrt(abs(np.linalg.det(a)))
    a, b = a / scale, b * scale
    return a, b


def _real_orthogonal_diagonaliser(s: np.ndarray, rng: np.random.Generator) -> np.ndarray:
    """Real orthogonal ``P`` with ``P^T s P`` diagonal, for symmetric unitary ``s``."""
    re, im = s.real, s.imag
    for _ in range(50):
        t = rng.uniform(0.1, 10.0)
        _, p = np.linalg.eigh(re + t * im)
        d = p.T @ s @ p
        if np.max(np.abs(d - np.diag(np.diag(d)))) < 1e-10:
            if np.linalg.det(p) < 0:
                p[:, 0] *= -1
            return p
    raise ArithmeticError("could not diagonalise the magic-basis product")


def _magic_coefficients() -> np.ndarray:
    """Rows: eigenphase of each magic state under σx σx, σy σy, σz σz."""
    return np.real(np.array([np.diag(dagger(MAGIC) @ p @ MAGIC) for p in PAULI_PAIRS])).T


def canonical_params(u: np.ndarray, tol: float = RECON_TOL) -> CanonicalParams:
    """Canonical parameters with ``μ`` in ``[0, π/2)``, pairwise sums at most ``π/2``, sorted descending."""
    u = np.asarray(u, dtype=complex)
    if u.shape != (4, 4) or not is_unitary(u, 1e-10):
        raise ValueError("canonical_params needs a 4x4 unitary")
    su = u / np.linalg.det(u) ** 0.25
    ub = dagger(MAGIC) @ su @ MAGIC
    p = _real_orthogonal_diagonaliser(ub.T @ ub, np.random.default_rng(0))
    theta = np.angle(np.diag(p.T @ ub.T @ ub @ p)) / 2
    k1 = ub @ p @ np.diag(np.exp(-1j * theta))
    if np.linalg.det(k1).real < 0:
        theta[0] += np.pi
        k1[:, 0] *= -1
    k1 = k1.real
    # exp(-i Σ μ_k σ_kσ_k) is diagonal in the magic basis with phases -coeff·μ
    coeff = _magic_coefficients()
    a = np.hstack([np.ones((4, 1)), -coeff])
    sol = np.linalg.solve(a, theta)
    mu = sol[1:]

    left = MAGIC @ k1 @ dagger(MAGIC)
    right = MAGIC @ p.T @ dagger(MAGIC)

    # Fold each μ into [0, π/2): exp(-iπ/2 σσ) = -i σ⊗σ is local and commutes with the rest.
    fixed = []
    for k, m in enumerate(mu):
        shift = int(np.floor(m / HALF_PI + 1e-12))
        m = m - shift * HALF_PI
        if m > HALF_PI - 1e-12:
            m -= HALF_PI
            shift += 1
        if shift % 2:
            left = left @ PAULI_PAIRS[k]
        fixed.append(max(m, 0.0))
    left, fixed, right = _reduce_pairs(left, fixed, right)
    order = sorted(range(3), key=lambda k: -fixed[k])
    # Relabel axes by conjugating with C⊗C where C maps σ_order[j] -> σ_j (signs cancel pairwise).
    c = _axis_permutation(order)
    left = left @ kron(dagger(c), dagger(c))
    right = kron(c, c) @ right
    mu_sorted = tuple(float(fixed[k]) for k in order)

    v, w = kron_factor(left)
    vt, wt = kron_factor(right)
    params = CanonicalParams(mu_sorted, v, w, vt, wt)
    resid = operator_distance(params.reconstruct(), u, up_to_global_phase=True)
    if resid > tol:
        raise ArithmeticError(f"canonical decomposition residual {resid:.2e} exceeds {tol:.0e}")
    return params


def _reduce_pairs(left, mu, right):
    """Lower ``Σμ`` using the local equivalence ``(μ_j, μ_k) -> (π/2 - μ_j, π/2 - μ_k)``."""
    mu = list(mu)
    while True:
        pairs = [(j, k) for j, k in ((0, 1), (0, 2), (1, 2)) if mu[j] + mu[k] > HALF_PI + 1e-12]
        if not pairs:
            return left, mu, right
        j, k = max(pairs, key=lambda p: mu[p[0]] + mu[p[1]])
        new = list(mu)
        new[j], new[k] = HALF_PI - mu[j], HALF_PI - mu[k]
        # σ_l on one side flips the signs of μ_j and μ_k; the π/2 shifts are local
        flip = kron(_PAULIS[3 - j - k], I2)
        x = interaction(mu) @ flip @ dagger(interaction(new))
        left, right, mu = left @ x, flip @ right, new


def _axis_permutation(order: list[int]) -> np.ndarray:
    """Single-qubit unitary ``C`` with ``C σ_{order[j]} C† = ±σ_j``, signs equal on both qubits."""
    paulis = (SX, SY, SZ)
    target = [paulis[k] for k in order]
    # Search the 24 single-qubit Clifford rotations (up to phase) for a matching frame.
    for c in _clifford_group():
        ok = True
        for j in range(3):
            img = c @ target[j] @ dagger(c)
            if not (np.allclose(img, paulis[j]) or np.allclose(img, -paulis[j])):
                ok = False
                break
        if ok:
            return c
    raise ArithmeticError("no Clifford realises the axis permutation")


@lru_cache(maxsize=1)
def _clifford_group() -> tuple[np.ndarray, ...]:
    h = np.array([[1, 1], [1, -1]], dtype=complex) / np.sqrt(2)
    s = np.array([[1, 0], [0, 1j]], dtype=complex)
    group = [I2]
    frontier = [I2]
    while frontier:
        nxt = []
        for g in frontier:
            for gen in (h, s):
                cand = gen @ g
                if not any(operator_distance(cand, x, up_to_global_phase=True) < 1e-9 for x in group):
                    group.append(cand)
                    nxt.append(cand)
        frontier = nxt
    return tuple(group)
