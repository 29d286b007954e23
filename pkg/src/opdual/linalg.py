"""Dense complex linear algebra shared by every protocol module.

Matrices are plain ``numpy`` arrays. Composite systems are described by a
:class:`Layout` (local dimensions plus party labels). The tensor-index
convention is big-endian throughout the package: the first label is the most
significant index, so ``kron(a, b)`` puts ``a``'s indices first.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

HERMITIAN_TOL = 1e-10
PSD_TOL = 1e-8
TRACE_TOL = 1e-8
EIG_CLIP = 1e-12


@dataclass(frozen=True)
class Layout:
    """Ordered subsystem dimensions and their labels (e.g. ``A1, A2, B1, B2``)."""

    dims: tuple[int, ...]
    labels: tuple[str, ...]

    def __init__(self, dims: Sequence[int], labels: Sequence[str] | None = None):
        dims = tuple(int(d) for d in dims)
        if labels is None:
            labels = tuple(f"S{i}" for i in range(len(dims)))
        labels = tuple(str(x) for x in labels)
        if len(dims) != len(labels):
            raise ValueError("dims and labels must have equal length")
        if any(d < 1 for d in dims):
            raise ValueError(f"dimensions must be positive, got {dims}")
        if len(set(labels)) != len(labels):
            raise ValueError(f"duplicate labels in {labels}")
        object.__setattr__(self, "dims", dims)
        object.__setattr__(self, "labels", labels)

    @property
    def size(self) -> int:
        return int(np.prod(self.dims, dtype=np.int64)) if self.dims else 1

    def index(self, label: str) -> int:
        try:
            return self.labels.index(label)
        except ValueError:
            raise KeyError(f"unknown subsystem label {label!r}; have {self.labels}") from None

    def indices(self, labels: Iterable[str]) -> list[int]:
        if isinstance(labels, str):
            labels = [labels]
        return sorted(self.index(x) for x in labels)

    def sub(self, labels: Iterable[str]) -> "Layout":
        idx = self.indices(labels)
        return Layout([self.dims[i] for i in idx], [self.labels[i] for i in idx])

    def __add__(self, other: "Layout") -> "Layout":
        return Layout(self.dims + other.dims, self.labels + other.labels)


def _check_square(m: np.ndarray) -> None:
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {m.shape}")


def _check_layout(m: np.ndarray, layout: Layout) -> None:
    _check_square(m)
    if layout.size != m.shape[0]:
        raise ValueError(f"layout {layout.dims} does not match matrix dimension {m.shape[0]}")


def kron(*mats: np.ndarray) -> np.ndarray:
    """Kronecker product of any number of matrices or vectors, left factor most significant."""
    out = np.array([[1.0 + 0j]]) if mats and np.ndim(mats[0]) == 2 else np.array([1.0 + 0j])
    for m in mats:
        out = np.kron(out, np.asarray(m))
    return out


def dagger(m: np.ndarray) -> np.ndarray:
    return np.conj(np.swapaxes(m, -1, -2))


def ket(amplitudes: Sequence[complex]) -> np.ndarray:
    v = np.asarray(amplitudes, dtype=complex)
    return v / np.linalg.norm(v)


def projector(v: np.ndarray) -> np.ndarray:
    v = np.asarray(v, dtype=complex).reshape(-1)
    return np.outer(v, v.conj())


def is_hermitian(m: np.ndarray, tol: float = HERMITIAN_TOL) -> bool:
    m = np.asarray(m)
    return m.ndim == 2 and m.shape[0] == m.shape[1] and np.max(np.abs(m - dagger(m)), initial=0.0) <= tol


def is_unitary(m: np.ndarray, tol: float = 1e-10) -> bool:
    m = np.asarray(m)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        return False
    return np.max(np.abs(dagger(m) @ m - np.eye(m.shape[0]))) <= tol


def is_positive_semidefinite(m: np.ndarray, tol: float = PSD_TOL) -> bool:
    if not is_hermitian(m, max(tol, HERMITIAN_TOL)):
        return False
    return herm_eig(m, check=False)[0][-1] >= -tol


def herm_eig(m: np.ndarray, check: bool = True) -> tuple[np.ndarray, np.ndarray]:
    """Eigen-decomposition of a Hermitian matrix.

    Returns eigenvalues in descending order and the matching unitary
    eigenvector matrix (columns), so that ``m = V diag(w) V^†``.
    """
    m = np.asarray(m, dtype=complex)
    _check_square(m)
    if check and not is_hermitian(m):
        raise ValueError("herm_eig requires a Hermitian matrix")
    w, v = np.linalg.eigh((m + dagger(m)) / 2)
    return w[::-1].copy(), v[:, ::-1].copy()


def jacobi_eigh(m: np.ndarray, tol: float = 1e-14, max_sweeps: int = 100) -> tuple[np.ndarray, np.ndarray]:
    """Cyclic complex Jacobi eigensolver (descending eigenvalues, eigenvector columns).

    Kept as an independent route to :func:`herm_eig`; sweeps continue until the
    off-diagonal Frobenius mass falls below ``tol`` times the matrix norm.
    """
    a = np.array(m, dtype=complex)
    _check_square(a)
    if not is_hermitian(a):
        raise ValueError("jacobi_eigh requires a Hermitian matrix")
    n = a.shape[0]
    v = np.eye(n, dtype=complex)
    scale = max(np.linalg.norm(a), 1e-300)
    for _ in range(max_sweeps):
        off = np.sqrt(max(np.linalg.norm(a) ** 2 - np.sum(np.abs(np.diag(a)) ** 2), 0.0))
        if off <= tol * scale:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                mag = abs(apq)
                if mag < 1e-300:
                    continue
                # Phase-rotate so the pivot becomes real, then apply a real rotation.
                phase = apq / mag
                theta = 0.5 * np.arctan2(2 * mag, (a[q, q] - a[p, p]).real)
                c, s = np.cos(theta), np.sin(theta)
                rot = np.eye(n, dtype=complex)
                rot[p, p] = c
                rot[q, q] = c
                rot[p, q] = s * phase
                rot[q, p] = -s * np.conj(phase)
                a = dagger(rot) @ a @ rot
                v = v @ rot
    w = np.real(np.diag(a))
    order = np.argsort(w)[::-1]
    return w[order], v[:, order]


def _axes_perm(n: int, idx: Sequence[int], offset: int = 0) -> list[int]:
    return [i + offset for i in idx]


def partial_trace(m: np.ndarray, layout: Layout, keep: Iterable[str]) -> np.ndarray:
    """Reduced operator on the ``keep`` subsystems (kept in layout order)."""
    m = np.asarray(m)
    _check_layout(m, layout)
    keep_idx = layout.indices(keep)
    n = len(layout.dims)
    t = m.reshape(layout.dims + layout.dims)
    letters = [chr(ord("a") + i) for i in range(n)]
    bra = [chr(ord("A") + i) if i in keep_idx else letters[i] for i in range(n)]
    out = "".join(letters[i] for i in keep_idx) + "".join(bra[i] for i in keep_idx)
    r = np.einsum("".join(letters) + "".join(bra) + "->" + out, t)
    d = int(np.prod([layout.dims[i] for i in keep_idx], dtype=np.int64)) if keep_idx else 1
    return r.reshape(d, d)


def partial_transpose(m: np.ndarray, layout: Layout, party: Iterable[str]) -> np.ndarray:
    """Transpose the indices of the named subsystems."""
    m = np.asarray(m)
    _check_layout(m, layout)
    idx = layout.indices(party)
    n = len(layout.dims)
    t = m.reshape(layout.dims + layout.dims)
    axes = list(range(2 * n))
    for i in idx:
        axes[i], axes[i + n] = axes[i + n], axes[i]
    return t.transpose(axes).reshape(m.shape)


def permute_subsystems(m: np.ndarray, layout: Layout, order: Sequence[str]) -> np.ndarray:
    """Reorder subsystems of a vector or square matrix into the label order given."""
    m = np.asarray(m)
    perm = [layout.index(x) for x in order]
    if sorted(perm) != list(range(len(layout.dims))):
        raise ValueError("order must be a permutation of the layout labels")
    n = len(layout.dims)
    new_dims = [layout.dims[i] for i in perm]
    if m.ndim == 1:
        return m.reshape(layout.dims).transpose(perm).reshape(-1)
    t = m.reshape(layout.dims + layout.dims)
    return t.transpose(perm + [p + n for p in perm]).reshape(
        int(np.prod(new_dims, dtype=np.int64)), -1
    )


def entropy_of_spectrum(eigenvalues: Iterable[float]) -> float:
    p = np.asarray(list(eigenvalues), dtype=float)
    p = np.where((p < 0) & (p >= -EIG_CLIP), 0.0, p)
    p = p[p > 0]
    return float(-np.sum(p * np.log2(p))) + 0.0  # avoid -0.0


def von_neumann_entropy(rho: np.ndarray) -> float:
    """Entropy in qubits, with ``0 log 0 = 0``."""
    rho = np.asarray(rho, dtype=complex)
    w, _ = herm_eig(rho)
    if w[-1] < -PSD_TOL:
        raise ValueError(f"density matrix has negative eigenvalue {w[-1]:.3e}")
    tr = float(np.sum(w))
    if abs(tr - 1.0) > TRACE_TOL:
        raise ValueError(f"density matrix trace {tr} deviates from 1")
    return entropy_of_spectrum(np.clip(w, 0.0, None))


def binary_entropy(x: float) -> float:
    if not 0.0 <= x <= 1.0:
        raise ValueError(f"binary_entropy needs 0 <= x <= 1, got {x}")
    if x == 0.0 or x == 1.0:
        return 0.0
    return float(-x * np.log2(x) - (1.0 - x) * np.log2(1.0 - x))


def operator_distance(a: np.ndarray, b: np.ndarray, up_to_global_phase: bool = False) -> float:
    """Max-norm distance, optionally minimised over a global phase on ``b``.

    The phase is located by a coarse scan (plus the Frobenius-optimal phase
    ``arg tr(b^† a)``) and refined by golden-section search.
    """
    a = np.asarray(a, dtype=complex)
    b = np.asarray(b, dtype=complex)
    if a.shape != b.shape:
        raise ValueError(f"shape mismatch {a.shape} vs {b.shape}")
    if not up_to_global_phase:
        return float(np.max(np.abs(a - b), initial=0.0))

    def dist(theta: float) -> float:
        return float(np.max(np.abs(a - np.exp(1j * theta) * b)))

    overlap = np.vdot(b.reshape(-1), a.reshape(-1))
    grid = np.linspace(-np.pi, np.pi, 129)[:-1]
    if abs(overlap) > 0:
        grid = np.append(grid, np.angle(overlap))
    scan = np.max(np.abs(a.reshape(1, -1) - np.exp(1j * grid)[:, None] * b.reshape(1, -1)), axis=1)
    theta0 = float(grid[np.argmin(scan)])
    best = float(np.min(scan))
    step = 2 * np.pi / 128
    lo, hi = theta0 - step, theta0 + step
    g = (np.sqrt(5) - 1) / 2
    x1, x2 = hi - g * (hi - lo), lo + g * (hi - lo)
    f1, f2 = dist(x1), dist(x2)
    for _ in range(80):
        if f1 < f2:
            hi, x2, f2 = x2, x1, f1
            x1 = hi - g * (hi - lo)
            f1 = dist(x1)
        else:
            lo, x1, f1 = x1, x2, f2
            x2 = lo + g * (hi - lo)
            f2 = dist(x2)
    return min(best, f1, f2)


def random_unitary(n: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-random unitary via QR of a complex Ginibre matrix."""
    z = (rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    d = np.diag(r)
    return q * (d / np.abs(d))


def random_density(n: int, rng: np.random.Generator, rank: int | None = None) -> np.ndarray:
    rank = n if rank is None else rank
    g = rng.standard_normal((n, rank)) + 1j * rng.standard_normal((n, rank))
    rho = g @ dagger(g)
    return rho / np.trace(rho).real


def random_hermitian(n: int, rng: np.random.Generator) -> np.ndarray:
    g = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    return (g + dagger(g)) / 2
