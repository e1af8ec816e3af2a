"""Kets, density matrices and the small amount of linear algebra built on them.

Conventions
-----------
* Multi-qubit basis states are ordered with the left tensor factor most
  significant, so ``|ij>`` sits at row ``2*i + j``.
* Input qubits are parametrised by ``beta`` in [0, 1] with
  ``alpha = sqrt(1 - beta**2)`` and an optional relative phase ``phi``:
  ``|psi> = alpha|0> + beta*exp(i*phi)|1>``.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import reduce
from typing import Sequence, Union

import numpy as np

from .errors import DimensionError

__all__ = [
    "PAULIS",
    "Ket",
    "DensityMatrix",
    "BlochDecomposition",
    "basis_ket",
    "input_ket",
    "amplitudes",
    "projector",
    "tensor",
    "partial_trace",
    "overlap",
    "bloch_vector",
    "bloch_decompose",
    "reconstruct",
    "random_ket",
    "random_density_matrix",
]

PAULIS = (
    np.array([[0, 1], [1, 0]], dtype=complex),
    np.array([[0, -1j], [1j, 0]], dtype=complex),
    np.array([[1, 0], [0, -1]], dtype=complex),
)
_I2 = np.eye(2, dtype=complex)


def _frozen(array, ndim: int) -> np.ndarray:
    out = np.array(array, dtype=complex)
    if out.ndim != ndim:
        raise DimensionError(f"expected a {ndim}-d array, got shape {out.shape}")
    out.setflags(write=False)
    return out


@dataclass(frozen=True, eq=False)
class Ket:
    """A state vector. ``normalized=False`` marks an intermediate that may have any norm."""

    amplitudes: np.ndarray
    normalized: bool = True

    def __post_init__(self):
        amps = _frozen(self.amplitudes, 1)
        if amps.size == 0:
            raise DimensionError("a ket needs at least one amplitude")
        if self.normalized and abs(np.vdot(amps, amps).real - 1.0) > 1e-12:
            raise ValueError(f"ket is not normalized (norm^2 = {np.vdot(amps, amps).real!r})")
        object.__setattr__(self, "amplitudes", amps)

    @property
    def dim(self) -> int:
        return self.amplitudes.shape[0]

    def inner(self, other: "Ket") -> complex:
        """<self|other>."""
        return complex(np.vdot(self.amplitudes, other.amplitudes))

    def __repr__(self):
        return f"Ket({np.array2string(self.amplitudes, precision=6)})"


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    """A d x d complex matrix meant to be Hermitian, PSD and of unit trace.

    Construction only checks the shape; call :meth:`check` to enforce the
    physical invariants.
    """

    entries: np.ndarray

    def __post_init__(self):
        m = _frozen(self.entries, 2)
        if m.shape[0] != m.shape[1]:
            raise DimensionError(f"density matrix must be square, got {m.shape}")
        object.__setattr__(self, "entries", m)

    @property
    def dim(self) -> int:
        return self.entries.shape[0]

    def violations(self, herm_tol=1e-12, trace_tol=1e-12, psd_tol=1e-10) -> list[str]:
        m = self.entries
        problems = []
        herm = np.abs(m - m.conj().T).max()
        if herm >= herm_tol:
            problems.append(f"not Hermitian (max deviation {herm:.3e})")
        tr = np.trace(m)
        if abs(tr - 1.0) >= trace_tol:
            problems.append(f"trace {tr:.15g} != 1")
        lam = np.linalg.eigvalsh(0.5 * (m + m.conj().T))[0]
        if lam <= -psd_tol:
            problems.append(f"not PSD (smallest eigenvalue {lam:.3e})")
        return problems

    def is_valid(self, **tols) -> bool:
        return not self.violations(**tols)

    def check(self, **tols) -> "DensityMatrix":
        problems = self.violations(**tols)
        if problems:
            raise ValueError("invalid density matrix: " + "; ".join(problems))
        return self


@dataclass(frozen=True, eq=False)
class BlochDecomposition:
    """Pauli coefficients of a two-qubit state.

    ``x[i] = Tr(rho s_i x I)``, ``y[i] = Tr(rho I x s_i)``, ``t[i, j] = Tr(rho s_i x s_j)``.
    """

    x: np.ndarray
    y: np.ndarray
    t: np.ndarray

    def __post_init__(self):
        for name, shape in (("x", (3,)), ("y", (3,)), ("t", (3, 3))):
            arr = np.array(getattr(self, name), dtype=float)
            if arr.shape != shape:
                raise DimensionError(f"{name} must have shape {shape}, got {arr.shape}")
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)


State = Union[Ket, DensityMatrix]


def basis_ket(index: int, dim: int = 2) -> Ket:
    amps = np.zeros(dim, dtype=complex)
    amps[index] = 1.0
    return Ket(amps)


def amplitudes(beta: float, phase: float = 0.0) -> tuple[float, complex]:
    """Return ``(alpha, beta*exp(i*phase))`` for the input-state convention."""
    if not 0.0 <= beta <= 1.0:
        raise ValueError(f"beta must lie in [0, 1], got {beta!r}")
    alpha = np.sqrt(max(0.0, 1.0 - beta * beta))
    return float(alpha), complex(beta * np.exp(1j * phase))


def input_ket(beta: float, phase: float = 0.0) -> Ket:
    alpha, b = amplitudes(beta, phase)
    return Ket(np.array([alpha, b]) / np.sqrt(alpha**2 + abs(b) ** 2))


def projector(psi: Ket) -> DensityMatrix:
    v = psi.amplitudes
    return DensityMatrix(np.outer(v, v.conj()))


def tensor(*factors: State) -> State:
    """Kronecker product, left factor most significant. All factors must be the same kind."""
    if not factors:
        raise ValueError("tensor() needs at least one factor")
    kind = type(factors[0])
    if kind not in (Ket, DensityMatrix) or any(type(f) is not kind for f in factors):
        raise TypeError("tensor() operands must all be Kets or all be DensityMatrices")
    if kind is Ket:
        amps = reduce(np.kron, [f.amplitudes for f in factors])
        return Ket(amps, normalized=all(f.normalized for f in factors))
    return DensityMatrix(reduce(np.kron, [f.entries for f in factors]))


def partial_trace(rho: DensityMatrix, keep: Union[int, Sequence[int]], dims: Sequence[int]) -> DensityMatrix:
    """Trace out every subsystem not listed in ``keep``.

    ``keep`` may be a single index or a sequence; the kept subsystems appear in
    the order given.
    """
    dims = [int(d) for d in dims]
    if int(np.prod(dims)) != rho.dim:
        raise DimensionError(f"subsystem dims {dims} do not multiply to {rho.dim}")
    keep = [keep] if np.isscalar(keep) else list(keep)
    n = len(dims)
    if len(set(keep)) != len(keep) or any(not 0 <= k < n for k in keep):
        raise DimensionError(f"invalid subsystem selection {keep} for {n} subsystems")
    traced = [i for i in range(n) if i not in keep]
    t = rho.entries.reshape(dims + dims)
    perm = keep + traced
    t = t.transpose(perm + [n + p for p in perm])
    dk = int(np.prod([dims[k] for k in keep]))
    dt = int(np.prod([dims[k] for k in traced]))
    t = t.reshape(dk, dt, dk, dt)
    return DensityMatrix(np.einsum("ajbj->ab", t))


def overlap(rho: DensityMatrix, sigma: DensityMatrix) -> float:
    """Tr(rho sigma) as a real number."""
    if rho.dim != sigma.dim:
        raise DimensionError(f"dimension mismatch {rho.dim} vs {sigma.dim}")
    # Tr(AB) = sum_ij A_ij B_ji
    return float(np.sum(rho.entries * sigma.entries.T).real)


def bloch_vector(rho: DensityMatrix) -> np.ndarray:
    if rho.dim != 2:
        raise DimensionError("bloch_vector expects a single qubit")
    return np.array([np.trace(rho.entries @ s).real for s in PAULIS])


def bloch_decompose(rho: DensityMatrix) -> BlochDecomposition:
    if rho.dim != 4:
        raise DimensionError(f"bloch_decompose expects a two-qubit state, got dim {rho.dim}")
    m = rho.entries
    x = [np.trace(m @ np.kron(s, _I2)).real for s in PAULIS]
    y = [np.trace(m @ np.kron(_I2, s)).real for s in PAULIS]
    t = [[np.trace(m @ np.kron(si, sj)).real for sj in PAULIS] for si in PAULIS]
    return BlochDecomposition(np.array(x), np.array(y), np.array(t))


def reconstruct(b: BlochDecomposition) -> DensityMatrix:
    m = np.kron(_I2, _I2).astype(complex)
    for i, s in enumerate(PAULIS):
        m = m + b.x[i] * np.kron(s, _I2) + b.y[i] * np.kron(_I2, s)
        for j, sj in enumerate(PAULIS):
            m = m + b.t[i, j] * np.kron(s, sj)
    return DensityMatrix(m / 4)


def random_ket(rng: np.random.Generator, dim: int) -> Ket:
    """Haar-random pure state."""
    v = rng.standard_normal(dim) + 1j * rng.standard_normal(dim)
    return Ket(v / np.linalg.norm(v))


def random_density_matrix(rng: np.random.Generator, dim: int = 4, env_dim: int = 4) -> DensityMatrix:
    """Reduced state of a Haar-random purification on ``dim x env_dim``."""
    psi = random_ket(rng, dim * env_dim).amplitudes.reshape(dim, env_dim)
    return DensityMatrix(psi @ psi.conj().T)
