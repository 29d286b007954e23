"""Named states, gates and noise channels.

Bell states use the redundant labelling ``|Ψ_{i1,i2}> = (1 ⊗ σ_{i1,i2})|Φ+>``
with ``σ_{1,1}=1, σ_{1,2}=σx, σ_{2,1}=σy, σ_{2,2}=σz``. This keeps the
teleportation correction for outcome ``(i1, i2)`` equal to ``pauli(i1, i2)``.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .linalg import (
    Layout,
    binary_entropy,
    dagger,
    is_unitary,
    kron,
    partial_trace,
    projector,
    von_neumann_entropy,
)

I2 = np.eye(2, dtype=complex)
SX = np.array([[0, 1], [1, 0]], dtype=complex)
SY = np.array([[0, -1j], [1j, 0]], dtype=complex)
SZ = np.array([[1, 0], [0, -1]], dtype=complex)

BellIndex = tuple[int, int]
BELL_INDICES: tuple[BellIndex, ...] = ((1, 1), (1, 2), (2, 1), (2, 2))
_PAULI = {(1, 1): I2, (1, 2): SX, (2, 1): SY, (2, 2): SZ}

NORM_TOL = 1e-10


def _check_bell_index(idx: BellIndex) -> BellIndex:
    idx = tuple(int(i) for i in idx)
    if idx not in _PAULI:
        raise ValueError(f"Bell index must be one of {BELL_INDICES}, got {idx}")
    return idx


def pauli(idx: BellIndex) -> np.ndarray:
    return _PAULI[_check_bell_index(idx)].copy()


@dataclass(frozen=True)
class MultiState:
    """A pure state vector or density matrix on labelled subsystems."""

    data: np.ndarray
    layout: Layout

    def __post_init__(self):
        data = np.asarray(self.data, dtype=complex)
        object.__setattr__(self, "data", data)
        n = self.layout.size
        if data.ndim == 1:
            if data.shape[0] != n:
                raise ValueError(f"vector length {data.shape[0]} does not match layout size {n}")
            if abs(np.linalg.norm(data) - 1.0) > NORM_TOL:
                raise ValueError("pure state is not normalised")
        elif data.ndim == 2:
            if data.shape != (n, n):
                raise ValueError(f"matrix shape {data.shape} does not match layout size {n}")
            if abs(np.trace(data).real - 1.0) > NORM_TOL:
                raise ValueError(f"density matrix trace {np.trace(data).real} != 1")
        else:
            raise ValueError("state data must be a vector or a matrix")

    @classmethod
    def from_density(cls, rho: np.ndarray, dims: Sequence[int], labels: Sequence[str] | None = None):
        return cls(np.asarray(rho, dtype=complex), Layout(dims, labels))

    @classmethod
    def from_vector(cls, psi: np.ndarray, dims: Sequence[int], labels: Sequence[str] | None = None):
        return cls(np.asarray(psi, dtype=complex), Layout(dims, labels))

    @property
    def is_pure(self) -> bool:
        return self.data.ndim == 1

    @property
    def dims(self) -> tuple[int, ...]:
        return self.layout.dims

    @property
    def labels(self) -> tuple[str, ...]:
        return self.layout.labels

    def density(self) -> np.ndarray:
        return projector(self.data) if self.is_pure else self.data

    def reduced(self, keep: Sequence[str]) -> np.ndarray:
        return partial_trace(self.density(), self.layout, keep)

    def relabel(self, labels: Sequence[str]) -> "MultiState":
        return MultiState(self.data, Layout(self.dims, labels))

    def tensor(self, other: "MultiState") -> "MultiState":
        if self.is_pure and other.is_pure:
            return MultiState(kron(self.data, other.data), self.layout + other.layout)
        return MultiState(kron(self.density(), other.density()), self.layout + other.layout)


@dataclass(frozen=True)
class Channel:
    """A completely positive trace-preserving map in Kraus form.

    ``dims`` lists the local dimension of each party's input system; the map
    acts on their tensor product.
    """

    kraus: tuple[np.ndarray, ...]
    dims: tuple[int, ...] = field(default=(2, 2))
    check: bool = field(default=True, compare=False, repr=False)

    def __post_init__(self):
        kraus = tuple(np.asarray(k, dtype=complex) for k in self.kraus)
        if not kraus:
            raise ValueError("a channel needs at least one Kraus operator")
        object.__setattr__(self, "kraus", kraus)
        object.__setattr__(self, "dims", tuple(int(d) for d in self.dims))
        d_in = self.dim_in
        for k in kraus:
            if k.shape != (k.shape[0], d_in):
                raise ValueError(f"Kraus operator shape {k.shape} inconsistent with input dimension {d_in}")
        if self.check and self.trace_defect() > NORM_TOL:
            raise ValueError(f"Kraus operators are not trace preserving (defect {self.trace_defect():.2e})")

    @property
    def dim_in(self) -> int:
        return int(np.prod(self.dims))

    @property
    def dim_out(self) -> int:
        return self.kraus[0].shape[0]

    @property
    def parties(self) -> int:
        return len(self.dims)

    def trace_defect(self) -> float:
        s = sum(dagger(k) @ k for k in self.kraus)
        return float(np.max(np.abs(s - np.eye(self.dim_in))))

    def __call__(self, rho: np.ndarray) -> np.ndarray:
        rho = np.asarray(rho, dtype=complex)
        return sum(k @ rho @ dagger(k) for k in self.kraus)

    def choi_matrix(self) -> np.ndarray:
        """Unnormalised Choi matrix ``Σ_ij E(|i><j|) ⊗ |i><j|`` (output first)."""
        d = self.dim_in
        j = np.zeros((self.dim_out * d, self.dim_out * d), dtype=complex)
        for k in self.kraus:
            v = k.reshape(-1)  # index (out, in), matches |out>|in> ordering
            j += np.outer(v, v.conj())
        return j

    @classmethod
    def unitary(cls, u: np.ndarray, dims: Sequence[int] | None = None) -> "Channel":
        u = np.asarray(u, dtype=complex)
        if not is_unitary(u, 1e-10):
            raise ValueError("matrix is not unitary")
        if dims is None:
            n = int(round(np.log2(u.shape[0])))
            dims = (2,) * n
        return cls((u,), tuple(dims))

    @classmethod
    def mixture(cls, channels: Sequence["Channel"], weights: Sequence[float]) -> "Channel":
        w = np.asarray(weights, dtype=float)
        if np.any(w < 0) or abs(w.sum() - 1) > 1e-12:
            raise ValueError("mixture weights must be a probability vector")
        dims = channels[0].dims
        ks = [np.sqrt(wi) * k for wi, c in zip(w, channels) for k in c.kraus if wi > 0]
        return cls(tuple(ks), dims)

    def to_json(self) -> str:
        doc = {
            "dims": [self.dim_in, self.dim_out],
            "parties": self.parties,
            "kraus": [matrix_to_json(k) for k in self.kraus],
        }
        return json.dumps(doc)

    @classmethod
    def from_json(cls, text: str) -> "Channel":
        doc = json.loads(text)
        d_in, d_out = (int(x) for x in doc["dims"])
        parties = int(doc["parties"])
        local = round(d_in ** (1.0 / parties))
        if local**parties != d_in:
            raise ValueError(f"input dimension {d_in} is not a {parties}-th power")
        kraus = tuple(matrix_from_json(m) for m in doc["kraus"])
        if any(k.shape != (d_out, d_in) for k in kraus):
            raise ValueError("Kraus shapes disagree with 'dims'")
        return cls(kraus, (local,) * parties)


def matrix_to_json(m: np.ndarray) -> list:
    """Rows of ``[re, im]`` pairs. Python's float repr round-trips exactly."""
    return [[[float(z.real), float(z.imag)] for z in row] for row in np.asarray(m, dtype=complex)]


def matrix_from_json(rows: list) -> np.ndarray:
    m = np.array([[complex(re, im) for re, im in row] for row in rows], dtype=complex)
    if m.ndim != 2:
        raise ValueError("matrix must be a list of rows")
    return m


def mes(d: int) -> MultiState:
    """Maximally entangled ``(1/√d) Σ |ii>`` on two ``d``-level systems."""
    if d < 2:
        raise ValueError("mes needs d >= 2")
    v = np.zeros(d * d, dtype=complex)
    v[[i * d + i for i in range(d)]] = 1 / np.sqrt(d)
    return MultiState(v, Layout((d, d), ("1", "2")))


def bell_vector(idx: BellIndex) -> np.ndarray:
    return kron(I2, pauli(idx)) @ mes(2).data


def bell_state(idx: BellIndex) -> MultiState:
    return MultiState(bell_vector(idx), Layout((2, 2), ("1", "2")))


PHI_PLUS = bell_vector((1, 1))
PSI_PLUS = bell_vector((1, 2))
PHI_MINUS = bell_vector((2, 2))
PSI_MINUS = np.array([0, 1, -1, 0], dtype=complex) / np.sqrt(2)


def pair_labels(parties: int) -> tuple[str, ...]:
    """``A1, A2, B1, B2, ...`` for the given number of parties."""
    names = [chr(ord("A") + i) for i in range(parties)]
    return tuple(f"{p}{k}" for p in names for k in (1, 2))


def party_names(parties: int) -> tuple[str, ...]:
    return tuple(chr(ord("A") + i) for i in range(parties))


def phase_gate(alpha: float, parties: int = 2) -> np.ndarray:
    """``exp(-i α σx⊗...⊗σx)`` on ``parties`` qubits."""
    xs = kron(*([SX] * parties))
    return np.cos(alpha) * np.eye(2**parties) - 1j * np.sin(alpha) * xs


def psi_alpha(alpha: float, parties: int = 2) -> MultiState:
    """``cos α |Φ+>^⊗N - i sin α |Ψ+>^⊗N`` with pairs ordered A1A2, B1B2, ..."""
    if parties < 2:
        raise ValueError("psi_alpha needs at least two parties")
    v = np.cos(alpha) * kron(*([PHI_PLUS] * parties)) - 1j * np.sin(alpha) * kron(*([PSI_PLUS] * parties))
    return MultiState(v, Layout((2,) * (2 * parties), pair_labels(parties)))


def entanglement_entropy(psi: MultiState, side: Sequence[str]) -> float:
    """Entropy of entanglement of a pure state across ``side`` vs the rest."""
    if not psi.is_pure:
        raise ValueError("entanglement_entropy requires a pure state")
    side = [side] if isinstance(side, str) else list(side)
    return von_neumann_entropy(psi.reduced(side))


def party_side(layout: Layout, party: str) -> list[str]:
    """All labels belonging to a party, e.g. ``A`` -> ``[A1, A2]``."""
    return [x for x in layout.labels if x.startswith(party)]


def named_gate(name: str) -> np.ndarray:
    key = name.strip().upper()
    if key == "CNOT":
        return np.array([[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]], dtype=complex)
    if key == "SWAP":
        return np.array([[1, 0, 0, 0], [0, 0, 1, 0], [0, 1, 0, 0], [0, 0, 0, 1]], dtype=complex)
    if key in ("IDENTITY", "I", "ID"):
        return np.eye(4, dtype=complex)
    raise ValueError(f"unknown gate {name!r}")


def pauli_group(n: int) -> list[np.ndarray]:
    """All ``4^n`` tensor products of ``{1, σx, σy, σz}``."""
    return [kron(*ps) for ps in itertools.product((I2, SX, SY, SZ), repeat=n)]


def depolarize(u: np.ndarray, q: float) -> Channel:
    """``ρ -> q UρU† + (1-q) 1/2^N`` via a uniform Pauli twirl after ``U``."""
    if not 0.0 <= q <= 1.0:
        raise ValueError(f"q must lie in [0, 1], got {q}")
    u = np.asarray(u, dtype=complex)
    if not is_unitary(u, 1e-10):
        raise ValueError("depolarize expects a unitary")
    n = int(round(np.log2(u.shape[0])))
    kraus = [np.sqrt(q) * u]
    if q < 1.0:
        w = np.sqrt((1.0 - q) / 4**n)
        kraus += [w * p @ u for p in pauli_group(n)]
    return Channel(tuple(kraus), (2,) * n)


def phase_family_entanglement(alpha: float) -> float:
    """Entropy of entanglement ``H(cos^2 α)`` of the phase-gate resource."""
    return binary_entropy(min(1.0, max(0.0, np.cos(alpha) ** 2)))
