"""Cloning and deleting machines and closed-form evaluators for their output states.

A :class:`ClonerSpec` describes a 1 -> 2 cloner acting on ``|i>_a |0>_b |X>``::

    |0> -> a  |00>|A>  + b1  |01>|B1>  + b2  |10>|B2>  + c  |11>|C>
    |1> -> at |11>|At> + b1t |10>|B1t> + b2t |01>|B2t> + ct |00>|Ct>

The second row is the mirror image of the first (``at`` is the weight of the
correct double copy ``|11>``), which is what makes ``eta = |a|^2 - |c|^2`` the
Bloch-vector shrink factor. Tilde magnitudes equal untilded ones; only the
phases may differ.

Coefficient tables are the 4 x 4 matrices of the two-qubit output states,
indexed by ``|ij>`` with the left qubit most significant.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Union

import numpy as np

from .errors import IsometryViolation
from .qstate import DensityMatrix, Ket, amplitudes

__all__ = [
    "ClonerSpec",
    "RewriteRule",
    "DeleterKind",
    "DeleterSpec",
    "CoefficientTable",
    "ouqc_spec",
    "pc_spec",
    "named_machine",
    "reduction_factor",
    "cloner_fidelity",
    "clone_p_table",
    "cloned_state",
    "merge_rules",
    "imperfect_copy_deleter",
    "two_copy_deleter",
    "deleted_after_clone_r_table",
    "two_copy_deleted_state",
    "reclone_m_table",
    "reclone_n_table",
]

LABELS = ("00", "01", "10", "11")
_MERGE_TOL = 1e-12
_ORTHO_TOL = 1e-10


def _as_ket(v) -> Ket:
    return v if isinstance(v, Ket) else Ket(np.asarray(v, dtype=complex))


@dataclass(frozen=True, eq=False)
class ClonerSpec:
    mag_a: float
    mag_b1: float
    mag_b2: float
    mag_c: float
    anc_A: Ket
    anc_B1: Ket
    anc_B2: Ket
    anc_C: Ket
    anc_At: Ket
    anc_B1t: Ket
    anc_B2t: Ket
    anc_Ct: Ket
    phase_a: float = 0.0
    phase_b1: float = 0.0
    phase_b2: float = 0.0
    phase_c: float = 0.0
    phase_at: float = 0.0
    phase_b1t: float = 0.0
    phase_b2t: float = 0.0
    phase_ct: float = 0.0
    name: str = field(default="general", compare=False)

    def __post_init__(self):
        for attr in ("anc_A", "anc_B1", "anc_B2", "anc_C", "anc_At", "anc_B1t", "anc_B2t", "anc_Ct"):
            object.__setattr__(self, attr, _as_ket(getattr(self, attr)))
        mags = np.array([self.mag_a, self.mag_b1, self.mag_b2, self.mag_c], dtype=float)
        if np.any(mags < 0):
            raise ValueError("coefficient magnitudes must be non-negative")
        if abs(np.sum(mags**2) - 1.0) > 1e-12:
            raise ValueError(f"squared magnitudes sum to {np.sum(mags**2)!r}, not 1")
        dims = {k.dim for k in self.ancillas()}
        if len(dims) != 1:
            raise ValueError(f"ancilla kets live in different spaces: dims {sorted(dims)}")

    def ancillas(self) -> tuple[Ket, ...]:
        return (self.anc_A, self.anc_B1, self.anc_B2, self.anc_C,
                self.anc_At, self.anc_B1t, self.anc_B2t, self.anc_Ct)

    @property
    def anc_dim(self) -> int:
        return self.anc_A.dim

    def coefficient(self, name: str) -> complex:
        """Complex coefficient ``a``, ``b1``, ..., ``ct`` (tilde names end in ``t``)."""
        mag = getattr(self, "mag_" + name.rstrip("t"))
        return complex(mag * np.exp(1j * getattr(self, "phase_" + name)))

    def row(self, which: int) -> list[tuple[complex, np.ndarray]]:
        """``(coefficient, ancilla)`` per output basis state ``|00>, |01>, |10>, |11>``."""
        if which == 0:
            names = (("a", self.anc_A), ("b1", self.anc_B1), ("b2", self.anc_B2), ("c", self.anc_C))
        elif which == 1:
            names = (("ct", self.anc_Ct), ("b2t", self.anc_B2t), ("b1t", self.anc_B1t), ("at", self.anc_At))
        else:
            raise ValueError("a cloner has rows 0 and 1 only")
        return [(self.coefficient(n), k.amplitudes) for n, k in names]


def ouqc_spec() -> ClonerSpec:
    """Optimal universal 1 -> 2 cloner on a two-dimensional machine space."""
    A, A_perp = np.array([1, 0]), np.array([0, 1])
    return ClonerSpec(
        mag_a=np.sqrt(2 / 3), mag_b1=np.sqrt(1 / 6), mag_b2=np.sqrt(1 / 6), mag_c=0.0,
        anc_A=A, anc_B1=A_perp, anc_B2=A_perp, anc_C=A,
        anc_At=A_perp, anc_B1t=A, anc_B2t=A, anc_Ct=A_perp,
        name="ouqc",
    )


def pc_spec() -> ClonerSpec:
    """Phase-covariant cloner, optimal for inputs on the equator of the Bloch sphere."""
    s8 = np.sqrt(1 / 8)
    zero, one = np.array([1, 0]), np.array([0, 1])
    return ClonerSpec(
        mag_a=0.5 + s8, mag_b1=s8, mag_b2=s8, mag_c=0.5 - s8,
        anc_A=zero, anc_B1=one, anc_B2=one, anc_C=zero,
        anc_At=one, anc_B1t=zero, anc_B2t=zero, anc_Ct=one,
        name="pc",
    )


_NAMED = {"ouqc": ouqc_spec, "pc": pc_spec}


def named_machine(machine: Union[str, ClonerSpec]) -> ClonerSpec:
    if isinstance(machine, ClonerSpec):
        return machine
    try:
        return _NAMED[machine]()
    except KeyError:
        raise ValueError(f"unknown machine {machine!r}; expected one of {sorted(_NAMED)}") from None


def reduction_factor(spec: ClonerSpec) -> float:
    return spec.mag_a**2 - spec.mag_c**2


def cloner_fidelity(spec: ClonerSpec) -> float:
    return 0.5 * (1.0 + reduction_factor(spec))


@dataclass(frozen=True, eq=False)
class CoefficientTable:
    """Matrix elements ``t[ij, kl]`` of a two-qubit output state."""

    kind: str
    matrix: np.ndarray

    def __post_init__(self):
        if self.kind not in ("P", "R", "M", "N"):
            raise ValueError(f"unknown table kind {self.kind!r}")
        m = np.array(self.matrix, dtype=complex)
        if m.shape != (4, 4):
            raise ValueError(f"coefficient table must be 4x4, got {m.shape}")
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)

    def __getitem__(self, key: tuple[str, str]) -> complex:
        ij, kl = key
        return complex(self.matrix[LABELS.index(ij), LABELS.index(kl)])

    @property
    def entries(self) -> dict[tuple[str, str], complex]:
        return {(r, c): self[r, c] for r in LABELS for c in LABELS}

    def to_density_matrix(self) -> DensityMatrix:
        return DensityMatrix(self.matrix)


def _branch_matrix(spec: ClonerSpec, row: int) -> np.ndarray:
    """Rows are the (unnormalised) ancilla kets attached to |00>, |01>, |10>, |11>."""
    return np.array([coef * anc for coef, anc in spec.row(row)])


def clone_p_table(spec: ClonerSpec, beta: float, phase: float = 0.0) -> CoefficientTable:
    """Output of the cloner on ``(alpha|0> + beta e^{i phase}|1>) |0>``.

    The rows of ``w`` are the auxiliary kets u1, v1, v2, u2 (for |00>, |01>,
    |10>, |11>) so that ``p[ij, kl] = <w_kl | w_ij>``.
    """
    alpha, b = amplitudes(beta, phase)
    w = alpha * _branch_matrix(spec, 0) + b * _branch_matrix(spec, 1)
    return CoefficientTable("P", w @ w.conj().T)


def cloned_state(spec: ClonerSpec, beta: float, phase: float = 0.0) -> DensityMatrix:
    return clone_p_table(spec, beta, phase).to_density_matrix()


def _mixture_table(kind: str, spec: ClonerSpec, w0: float, w1: float) -> CoefficientTable:
    # cloning a diagonal input: the two machine rows add incoherently
    r0, r1 = _branch_matrix(spec, 0), _branch_matrix(spec, 1)
    return CoefficientTable(kind, w0 * (r0 @ r0.conj().T) + w1 * (r1 @ r1.conj().T))


def reclone_m_table(spec: ClonerSpec, beta: float) -> CoefficientTable:
    """Clone of the first deleted copy, ``alpha^2 |0><0| + beta^2 |1><1|``."""
    alpha, b = amplitudes(beta)
    return _mixture_table("M", spec, alpha**2, abs(b) ** 2)


def reclone_n_table(spec: ClonerSpec, beta: float) -> CoefficientTable:
    """Clone of the second deleted copy, ``(1 - s)|0><0| + s|1><1|`` with ``s = |alpha beta|^2``."""
    alpha, b = amplitudes(beta)
    s = (alpha * abs(b)) ** 2
    return _mixture_table("N", spec, 1.0 - s, s)


# --- deleting machines -----------------------------------------------------------


class DeleterKind(str, Enum):
    IMPERFECT_COPY = "ImperfectCopy"
    TWO_COPY = "TwoCopy"


@dataclass(frozen=True, eq=False)
class RewriteRule:
    """``in_sys (x) in_anc -> out_sys (x) out_anc``; system kets are two-qubit 4-vectors."""

    label: str
    in_sys: np.ndarray
    in_anc: np.ndarray
    out_sys: np.ndarray
    out_anc: np.ndarray

    @property
    def input_vector(self) -> np.ndarray:
        return np.kron(self.in_sys, self.in_anc)

    @property
    def output_vector(self) -> np.ndarray:
        return np.kron(self.out_sys, self.out_anc)


@dataclass(frozen=True, eq=False)
class DeleterSpec:
    kind: DeleterKind
    rules: tuple[RewriteRule, ...]
    anc_in_dim: int
    anc_out_dim: int

    def gram_mismatch(self) -> float:
        ins = np.array([r.input_vector for r in self.rules])
        outs = np.array([r.output_vector for r in self.rules])
        return float(np.abs(ins.conj() @ ins.T - outs.conj() @ outs.T).max())

    def check_isometry(self, tol: float = 1e-10) -> "DeleterSpec":
        dev = self.gram_mismatch()
        if dev >= tol:
            raise IsometryViolation(f"{self.kind.value} deleter does not preserve inner products (Gram deviation {dev:.3e})")
        return self


def _same(u: np.ndarray, v: np.ndarray) -> bool:
    return u.shape == v.shape and float(np.abs(u - v).max()) <= _MERGE_TOL


def merge_rules(rules) -> tuple[RewriteRule, ...]:
    """Drop duplicate rules; identical inputs with different outputs are an error."""
    kept: list[RewriteRule] = []
    for rule in rules:
        dup = next((k for k in kept if _same(k.input_vector, rule.input_vector)), None)
        if dup is None:
            kept.append(rule)
        elif not _same(dup.output_vector, rule.output_vector):
            raise IsometryViolation(f"rules {dup.label!r} and {rule.label!r} share an input but disagree on the output")
    return tuple(kept)


def _sys(label: str) -> np.ndarray:
    v = np.zeros(4, dtype=complex)
    v[LABELS.index(label)] = 1.0
    return v


def imperfect_copy_deleter(spec: ClonerSpec) -> DeleterSpec:
    """Deleter acting on the cloner's output together with its machine state.

    Fresh outputs A0..A3 occupy coordinates ``x .. x+3`` of an enlarged
    ancilla space, orthogonal to everything the cloner can produce. When two
    fresh rules share an input ket (e.g. ``A == Ct``) only the first survives.
    """
    x = spec.anc_dim
    out_dim = x + 4

    def embed(k: Ket) -> np.ndarray:
        return np.concatenate([k.amplitudes, np.zeros(4, dtype=complex)])

    def fresh(i: int) -> np.ndarray:
        v = np.zeros(out_dim, dtype=complex)
        v[x + i] = 1.0
        return v

    fresh_rules = (
        ("|00>|A> -> |00>|A0>", "00", spec.anc_A, "00", 0),
        ("|00>|Ct> -> |00>|A1>", "00", spec.anc_Ct, "00", 1),
        ("|11>|At> -> |10>|A2>", "11", spec.anc_At, "10", 2),
        ("|11>|C> -> |10>|A3>", "11", spec.anc_C, "10", 3),
    )
    rules: list[RewriteRule] = []
    for label, s_in, anc, s_out, k in fresh_rules:
        if any(_same(r.in_sys, _sys(s_in)) and _same(r.in_anc, anc.amplitudes) for r in rules):
            continue
        rules.append(RewriteRule(label, _sys(s_in), anc.amplitudes, _sys(s_out), fresh(k)))
    identity_rules = (
        ("|01>|B1> -> |01>|B1>", "01", spec.anc_B1),
        ("|10>|B2> -> |10>|B2>", "10", spec.anc_B2),
        ("|01>|B2t> -> |01>|B2t>", "01", spec.anc_B2t),
        ("|10>|B1t> -> |10>|B1t>", "10", spec.anc_B1t),
    )
    rules += [RewriteRule(label, _sys(s), anc.amplitudes, _sys(s), embed(anc)) for label, s, anc in identity_rules]
    return DeleterSpec(DeleterKind.IMPERFECT_COPY, merge_rules(rules), x, out_dim).check_isometry()


def two_copy_deleter() -> DeleterSpec:
    """State-dependent deleter for two identical copies.

    The ready state ``|A>`` is absorbed (input ancilla dimension 1); outputs
    live in ``span{A, Q0, Q1}`` with ``A = e0, Q0 = e1, Q1 = e2``.
    """
    ready = np.array([1.0 + 0j])
    A, Q0, Q1 = np.eye(3, dtype=complex)
    sym = (_sys("01") + _sys("10")) / np.sqrt(2)
    rules = (
        RewriteRule("|00>|A> -> |00>|Q0>", _sys("00"), ready, _sys("00"), Q0),
        RewriteRule("|11>|A> -> |10>|Q1>", _sys("11"), ready, _sys("10"), Q1),
        RewriteRule("(|01>+|10>)|A> -> (|01>+|10>)|A>", sym, ready, sym, A),
    )
    return DeleterSpec(DeleterKind.TWO_COPY, rules, 1, 3).check_isometry()


def _fresh_pair(first: Ket, second: Ket) -> bool:
    """True if two inputs of the same sector were merged into one rule.

    Raises if they are neither identical nor orthogonal, since distinct fresh
    outputs would then break the isometry.
    """
    if _same(first.amplitudes, second.amplitudes):
        return True
    if abs(first.inner(second)) > _ORTHO_TOL:
        raise IsometryViolation("deleter inputs with fresh outputs must be identical or orthogonal")
    return False


def deleted_after_clone_r_table(spec: ClonerSpec, beta: float, phase: float = 0.0) -> CoefficientTable:
    """State of the cloned pair after the imperfect-copy deleter, machine traced out.

    Fresh deleter outputs are orthonormal and orthogonal to the cloner's
    machine space, so every overlap between a fresh ket and anything else
    vanishes: only ``r[01, 10]`` survives off the diagonal, and ``|11>`` is
    empty.
    """
    alpha, b = amplitudes(beta, phase)
    a, c, at, ct = (spec.coefficient(n) for n in ("a", "c", "at", "ct"))
    v1 = alpha * spec.coefficient("b1") * spec.anc_B1.amplitudes + b * spec.coefficient("b2t") * spec.anc_B2t.amplitudes
    v2 = alpha * spec.coefficient("b2") * spec.anc_B2.amplitudes + b * spec.coefficient("b1t") * spec.anc_B1t.amplitudes

    if _fresh_pair(spec.anc_A, spec.anc_Ct):
        r00 = abs(alpha * a + b * ct) ** 2
    else:
        r00 = abs(alpha * a) ** 2 + abs(b * ct) ** 2
    if _fresh_pair(spec.anc_At, spec.anc_C):
        fresh10 = abs(alpha * c + b * at) ** 2
    else:
        fresh10 = abs(alpha * c) ** 2 + abs(b * at) ** 2

    r = np.zeros((4, 4), dtype=complex)
    r[0, 0] = r00
    r[1, 1] = np.vdot(v1, v1).real
    r[2, 2] = np.vdot(v2, v2).real + fresh10
    r[1, 2] = np.vdot(v2, v1)
    r[2, 1] = np.conj(r[1, 2])
    return CoefficientTable("R", r)


def two_copy_deleted_state(beta: float, phase: float = 0.0) -> DensityMatrix:
    """``alpha^4 |00><00| + beta^4 |10><10| + 2 alpha^2 beta^2 |psi+><psi+|``.

    The relative phase drops out because the three branches carry orthogonal
    machine states.
    """
    alpha, b = amplitudes(beta, phase)
    a2, b2 = alpha**2, abs(b) ** 2
    rho = np.zeros((4, 4), dtype=complex)
    rho[0, 0] = a2 * a2
    rho[2, 2] = b2 * b2
    rho[1:3, 1:3] += a2 * b2  # 2 a^2 b^2 |psi+><psi+|
    return DensityMatrix(rho)
