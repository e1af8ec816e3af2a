"""Brute-force reference: explicit isometries applied to state vectors.

Everything here is deliberately naive. Machines are turned into dense
matrices on the full system (x) machine space, applied to the pure input, and
reduced by partial trace; the results are compared against the closed-form
tables in :mod:`clonecoh.machines`.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple, Optional, Sequence, TextIO, Union

import numpy as np
from scipy.linalg import null_space

from . import machines as mc
from .errors import DimensionError, IsometryViolation
from .qstate import DensityMatrix, Ket, input_ket, random_ket

__all__ = [
    "IsometryMatrix",
    "Step",
    "cloner_isometry",
    "deleter_isometry",
    "simulate",
    "clone_chain",
    "clone_delete_chain",
    "delete_chain",
    "delete_clone_chain",
    "simulate_table",
    "VerificationEntry",
    "VerificationReport",
    "verify_all",
    "random_valid_spec",
]

ISO_TOL = 1e-10


@dataclass(frozen=True, eq=False)
class IsometryMatrix:
    """Dense ``d_out x d_in`` isometry between tensor-product register spaces.

    ``domain`` (orthonormal columns) marks the subspace on which the machine is
    actually defined; outside it the matrix is an arbitrary isometric completion
    and :func:`simulate` refuses to use it.
    """

    entries: np.ndarray
    in_dims: tuple[int, ...]
    out_dims: tuple[int, ...]
    domain: Optional[np.ndarray] = None

    def __post_init__(self):
        m = np.array(self.entries, dtype=complex)
        m.setflags(write=False)
        object.__setattr__(self, "entries", m)
        object.__setattr__(self, "in_dims", tuple(int(d) for d in self.in_dims))
        object.__setattr__(self, "out_dims", tuple(int(d) for d in self.out_dims))
        if m.shape != (self.d_out, self.d_in):
            raise DimensionError(f"entries {m.shape} do not match dims {self.out_dims} <- {self.in_dims}")

    @property
    def d_in(self) -> int:
        return int(np.prod(self.in_dims))

    @property
    def d_out(self) -> int:
        return int(np.prod(self.out_dims))

    def deviation(self) -> float:
        m = self.entries
        return float(np.abs(m.conj().T @ m - np.eye(self.d_in)).max())


class Step(NamedTuple):
    iso: IsometryMatrix
    targets: tuple[str, ...]
    outputs: tuple[str, ...]


def _e(bit: int) -> np.ndarray:
    return np.eye(2, dtype=complex)[bit]


def cloner_isometry(spec: mc.ClonerSpec) -> IsometryMatrix:
    """The cloner as a map from qubit ``a`` to ``a (x) b (x) machine``; blank and ready state absorbed."""

    def term(i, j, name, anc: Ket):
        return spec.coefficient(name) * np.kron(np.kron(_e(i), _e(j)), anc.amplitudes)

    col0 = (term(0, 0, "a", spec.anc_A) + term(0, 1, "b1", spec.anc_B1)
            + term(1, 0, "b2", spec.anc_B2) + term(1, 1, "c", spec.anc_C))
    col1 = (term(1, 1, "at", spec.anc_At) + term(1, 0, "b1t", spec.anc_B1t)
            + term(0, 1, "b2t", spec.anc_B2t) + term(0, 0, "ct", spec.anc_Ct))
    iso = IsometryMatrix(np.column_stack([col0, col1]), (2,), (2, 2, spec.anc_dim))
    dev = iso.deviation()
    if dev >= ISO_TOL:
        raise IsometryViolation(f"cloner images are not orthonormal (deviation {dev:.3e})")
    return iso


def deleter_isometry(d: mc.DeleterSpec) -> IsometryMatrix:
    """Linear extension of the rewrite rules, completed isometrically off their span."""
    d.check_isometry(ISO_TOL)
    ins = np.column_stack([r.input_vector for r in d.rules])
    outs = np.column_stack([r.output_vector for r in d.rules])
    u, s, vh = np.linalg.svd(ins, full_matrices=False)
    k = int(np.sum(s > 1e-10 * s[0]))
    q = u[:, :k]
    w = outs @ vh[:k].conj().T / s[:k]
    d_in, d_out = ins.shape[0], outs.shape[0]
    if d_out < d_in:
        raise DimensionError("deleter output space is smaller than its input space")
    m = w @ q.conj().T
    if k < d_in:
        q_perp = null_space(q.conj().T)
        w_perp = null_space(w.conj().T)[:, : d_in - k]
        m = m + w_perp @ q_perp.conj().T
    in_dims = (2, 2) if d.anc_in_dim == 1 else (2, 2, d.anc_in_dim)
    iso = IsometryMatrix(m, in_dims, (2, 2, d.anc_out_dim), domain=None if k == d_in else q)
    dev = iso.deviation()
    if dev >= ISO_TOL:
        raise IsometryViolation(f"deleter extension is not isometric (deviation {dev:.3e})")
    return iso


ChainItem = Union[Step, IsometryMatrix]


def simulate(
    chain: Sequence[ChainItem],
    beta: float,
    phase: float = 0.0,
    keep: Optional[Sequence[Union[str, int]]] = None,
    inputs: Sequence[str] = ("a",),
) -> DensityMatrix:
    """Push copies of ``alpha|0> + beta e^{i phase}|1>`` through ``chain`` and reduce.

    Registers are addressed by label. A bare :class:`IsometryMatrix` acts on
    the leading registers and relabels them positionally. ``keep`` lists labels
    or final positions; ``None`` keeps the input registers.
    """
    labels = list(inputs)
    dims = [2] * len(labels)
    psi = input_ket(beta, phase).amplitudes
    state = psi
    for _ in labels[1:]:
        state = np.kron(state, psi)
    state = state.reshape(dims)
    fresh = 0

    for item in chain:
        if isinstance(item, IsometryMatrix):
            n_in, n_out = len(item.in_dims), len(item.out_dims)
            targets = tuple(labels[:n_in])
            extra = []
            for _ in range(max(0, n_out - n_in)):
                fresh += 1
                extra.append(f"_r{fresh}")
            item = Step(item, targets, (targets + tuple(extra))[:n_out])
        iso, targets, outputs = item
        if len(outputs) != len(iso.out_dims) or len(targets) != len(iso.in_dims):
            raise DimensionError("step labels do not match the isometry's register counts")
        try:
            axes = [labels.index(t) for t in targets]
        except ValueError as exc:
            raise DimensionError(f"unknown register in {targets}") from exc
        if tuple(dims[a] for a in axes) != iso.in_dims:
            raise DimensionError(f"registers {targets} have dims {[dims[a] for a in axes]}, isometry expects {iso.in_dims}")
        rest = [i for i in range(len(labels)) if i not in axes]
        mat = np.transpose(state, axes + rest).reshape(iso.d_in, -1)
        if iso.domain is not None:
            leak = mat - iso.domain @ (iso.domain.conj().T @ mat)
            if np.linalg.norm(leak) > 1e-10:
                raise IsometryViolation(f"state leaves the defined domain of the machine acting on {targets}")
        mat = iso.entries @ mat
        rest_labels = [labels[i] for i in rest]
        rest_dims = [dims[i] for i in rest]
        labels = list(outputs) + rest_labels
        if len(set(labels)) != len(labels):
            raise DimensionError(f"duplicate register labels after step: {labels}")
        dims = list(iso.out_dims) + rest_dims
        state = mat.reshape(dims)

    if keep is None:
        keep = list(inputs)
    axes = [k if isinstance(k, (int, np.integer)) else labels.index(k) for k in keep]
    rest = [i for i in range(len(labels)) if i not in axes]
    d_keep = int(np.prod([dims[a] for a in axes]))
    mat = np.transpose(state, axes + rest).reshape(d_keep, -1)
    return DensityMatrix(mat @ mat.conj().T)


def clone_chain(spec: mc.ClonerSpec) -> list[Step]:
    return [Step(cloner_isometry(spec), ("a",), ("a", "b", "x"))]


def clone_delete_chain(spec: mc.ClonerSpec) -> list[Step]:
    dele = deleter_isometry(mc.imperfect_copy_deleter(spec))
    return clone_chain(spec) + [Step(dele, ("a", "b", "x"), ("a", "b", "x"))]


def delete_chain() -> list[Step]:
    return [Step(deleter_isometry(mc.two_copy_deleter()), ("a", "b"), ("a", "b", "q"))]


def delete_clone_chain(spec: mc.ClonerSpec, branch: str = "a") -> list[Step]:
    """Two-copy deletion, then cloning of copy ``branch`` onto a fresh blank ``branch'``."""
    if branch not in ("a", "b"):
        raise ValueError("branch must be 'a' or 'b'")
    return delete_chain() + [Step(cloner_isometry(spec), (branch,), (branch, branch + "'", "x"))]


def simulate_table(kind: str, spec: mc.ClonerSpec, beta: float, phase: float = 0.0) -> DensityMatrix:
    """Brute-force counterpart of the P, R, M or N table."""
    if kind == "P":
        return simulate(clone_chain(spec), beta, phase, keep=("a", "b"))
    if kind == "R":
        return simulate(clone_delete_chain(spec), beta, phase, keep=("a", "b"))
    if kind in ("M", "N"):
        br = "a" if kind == "M" else "b"
        return simulate(delete_clone_chain(spec, br), beta, phase, keep=(br, br + "'"), inputs=("a", "b"))
    raise ValueError(f"unknown table kind {kind!r}")


# --- verification --------------------------------------------------------------


@dataclass(frozen=True)
class VerificationEntry:
    machine: str
    table: str
    beta: float
    max_deviation: float
    passed: bool


@dataclass(frozen=True)
class VerificationReport:
    tol: float
    entries: tuple[VerificationEntry, ...]

    @property
    def passed(self) -> bool:
        return all(e.passed for e in self.entries)

    @property
    def max_deviation(self) -> float:
        return max((e.max_deviation for e in self.entries), default=0.0)

    @property
    def failures(self) -> list[VerificationEntry]:
        return [e for e in self.entries if not e.passed]

    def to_csv(self, sink: TextIO) -> int:
        from .analysis import write_csv

        rows = [(e.machine, e.table, e.beta, e.max_deviation, int(e.passed)) for e in self.entries]
        return write_csv(sink, ("machine", "table", "beta", "max_deviation", "passed"), rows)


def verify_all(
    machine: Union[str, mc.ClonerSpec],
    betas: Optional[Sequence[float]] = None,
    tol: float = 1e-9,
    phase: float = 0.0,
) -> VerificationReport:
    """Compare every closed-form table with its brute-force simulation on a beta grid."""
    if tol <= 0:
        raise ValueError("tol must be positive")
    spec = mc.named_machine(machine)
    betas = np.linspace(0.0, 1.0, 101) if betas is None else betas
    chains = {
        "P": (clone_chain(spec), ("a",), ("a", "b")),
        "R": (clone_delete_chain(spec), ("a",), ("a", "b")),
        "M": (delete_clone_chain(spec, "a"), ("a", "b"), ("a", "a'")),
        "N": (delete_clone_chain(spec, "b"), ("a", "b"), ("b", "b'")),
    }
    closed = {
        "P": lambda b: mc.clone_p_table(spec, b, phase),
        "R": lambda b: mc.deleted_after_clone_r_table(spec, b, phase),
        "M": lambda b: mc.reclone_m_table(spec, b),
        "N": lambda b: mc.reclone_n_table(spec, b),
    }
    entries = []
    for beta in betas:
        beta = float(beta)
        for kind, (chain, inputs, keep) in chains.items():
            brute = simulate(chain, beta, phase, keep=keep, inputs=inputs).entries
            dev = float(np.abs(closed[kind](beta).matrix - brute).max())
            entries.append(VerificationEntry(spec.name, kind, beta, dev, dev < tol))
    return VerificationReport(tol, tuple(entries))


def _orthogonal_to(rng: np.random.Generator, v: np.ndarray) -> np.ndarray:
    w = random_ket(rng, v.shape[0]).amplitudes
    w = w - np.vdot(v, w) * v
    return w / np.linalg.norm(w)


def random_valid_spec(rng: np.random.Generator, anc_dim: int = 4, max_tries: int = 100) -> mc.ClonerSpec:
    """Random general cloner that passes both the cloner and deleter isometry checks.

    Independent Haar kets almost never give an isometry, so candidates are
    built to satisfy the constraints (``A`` orthogonal to ``Ct``, ``At`` to
    ``C``, and a B-sector phase chosen to cancel the row overlap) and then
    re-checked, rejecting any that fail.
    """
    for _ in range(max_tries):
        mags = np.abs(rng.standard_normal(4))
        mags /= np.linalg.norm(mags)
        ph = rng.uniform(0, 2 * np.pi, 8)
        A = random_ket(rng, anc_dim).amplitudes
        Ct = _orthogonal_to(rng, A)
        C = random_ket(rng, anc_dim).amplitudes
        At = _orthogonal_to(rng, C)
        B1 = random_ket(rng, anc_dim).amplitudes
        B2 = random_ket(rng, anc_dim).amplitudes
        B2t = random_ket(rng, anc_dim).amplitudes
        # need conj(b1) b2t <B1|B2t> + conj(b2) b1t <B2|B1t> = 0
        g = np.vdot(B1, B2t)
        m = abs(g)
        theta = np.angle(-np.exp(1j * (ph[6] - ph[1])) * g) - (ph[5] - ph[2])
        B1t = m * np.exp(1j * theta) * B2 + np.sqrt(max(0.0, 1 - m * m)) * _orthogonal_to(rng, B2)
        try:
            spec = mc.ClonerSpec(
                *mags, A, B1, B2, C, At, B1t, B2t, Ct, *ph,
            )
            cloner_isometry(spec)
            mc.imperfect_copy_deleter(spec)
        except (IsometryViolation, ValueError):
            continue
        return spec
    raise RuntimeError("could not draw a valid cloner spec")
