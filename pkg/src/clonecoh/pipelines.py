"""The two composite processes, clone -> delete and delete -> clone, with coherence bookkeeping."""
from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Optional, Union

import numpy as np

from . import machines as mc
from .coherence import CoherenceReport, bloch_cross_check, coherence_report, l1_coherence
from .qstate import DensityMatrix, amplitudes, basis_ket, input_ket, overlap, partial_trace, projector, tensor

__all__ = [
    "Pipeline",
    "Stage",
    "PipelineReport",
    "closed_form_fidelity",
    "run_clone_then_delete",
    "run_delete_then_clone",
    "run",
    "delta_c",
]

SQRT2 = np.sqrt(2.0)


class Pipeline(str, Enum):
    CLONE_THEN_DELETE = "c2d"
    DELETE_THEN_CLONE = "d2c"

    @property
    def title(self) -> str:
        return "CloneThenDelete" if self is Pipeline.CLONE_THEN_DELETE else "DeleteThenClone"


@dataclass(frozen=True)
class Stage:
    label: str
    state: DensityMatrix
    coherence: CoherenceReport


@dataclass(frozen=True)
class PipelineReport:
    pipeline: Pipeline
    machine: str
    beta: float
    stages: tuple[Stage, ...]
    delta_c: float
    delta_residual: float
    fidelity: float
    fidelity_closed_form: Optional[float]
    branch: str = "a"
    deletion_fidelity: Optional[float] = None

    @property
    def stage_reports(self) -> tuple[tuple[str, CoherenceReport], ...]:
        return tuple((s.label, s.coherence) for s in self.stages)

    def stage(self, label: str) -> Stage:
        for s in self.stages:
            if s.label == label:
                return s
        raise KeyError(label)


def _ab(beta: float) -> float:
    alpha, b = amplitudes(beta)
    return alpha * abs(b)


def closed_form_fidelity(pipeline: Union[Pipeline, str], machine: str, beta: float) -> Optional[float]:
    """Reference closed-form process fidelity for a named machine, else ``None``."""
    pipeline = Pipeline(pipeline)
    s = _ab(beta) ** 2
    if pipeline is Pipeline.CLONE_THEN_DELETE:
        if machine == "ouqc":
            return 2 / 3 * (1 - 2 * s) + beta**2 / 6
        if machine == "pc":
            return (4 + 3 * SQRT2 - 16 * s) / (8 * SQRT2)
    else:
        if machine == "ouqc":
            return 2 / 3 * (1 - 2 * s)
        if machine == "pc":
            return (3 * SQRT2 + 4 - (16 - 2 * SQRT2) * s) / (8 * SQRT2)
    return None


def _stage(label: str, rho: DensityMatrix) -> Stage:
    bloch_cross_check(rho)
    return Stage(label, rho, coherence_report(rho))


def _finish(pipeline, spec, beta, stages, fidelity, branch="a", deletion_fidelity=None) -> PipelineReport:
    first, last = stages[0].coherence, stages[-1].coherence
    return PipelineReport(
        pipeline=pipeline,
        machine=spec.name,
        beta=float(beta),
        stages=tuple(stages),
        delta_c=last.global_ - first.global_,
        delta_residual=last.residual - first.residual,
        fidelity=fidelity,
        fidelity_closed_form=closed_form_fidelity(pipeline, spec.name, beta) if branch == "a" else None,
        branch=branch,
        deletion_fidelity=deletion_fidelity,
    )


def run_clone_then_delete(machine: Union[str, mc.ClonerSpec], beta: float, phase: float = 0.0) -> PipelineReport:
    """|psi>|0> -> cloner -> imperfect-copy deleter; fidelity is measured against |psi>|0>."""
    spec = mc.named_machine(machine)
    rho_in = tensor(projector(input_ket(beta, phase)), projector(basis_ket(0)))
    stages = [
        _stage("input", rho_in),
        _stage("cloned", mc.cloned_state(spec, beta, phase)),
        _stage("deleted", mc.deleted_after_clone_r_table(spec, beta, phase).to_density_matrix()),
    ]
    return _finish(Pipeline.CLONE_THEN_DELETE, spec, beta, stages, overlap(rho_in, stages[-1].state))


def run_delete_then_clone(
    machine: Union[str, mc.ClonerSpec], beta: float, branch: str = "a", phase: float = 0.0
) -> PipelineReport:
    """|psi>|psi> -> two-copy deleter -> cloner on copy ``branch``.

    Fidelity is the overlap of the recloned pair with the ideal |psi>|psi>.
    ``deletion_fidelity`` is the probability that the deleted copy is blank.
    """
    if branch not in ("a", "b"):
        raise ValueError("branch must be 'a' or 'b'")
    spec = mc.named_machine(machine)
    psi = projector(input_ket(beta, phase))
    rho0 = tensor(psi, psi)
    rho_del = mc.two_copy_deleted_state(beta, phase)
    table = mc.reclone_m_table(spec, beta) if branch == "a" else mc.reclone_n_table(spec, beta)
    stages = [
        _stage("input", rho0),
        _stage("deleted", rho_del),
        _stage("recloned", table.to_density_matrix()),
    ]
    blank = partial_trace(rho_del, 1, (2, 2)).entries[0, 0].real
    return _finish(
        Pipeline.DELETE_THEN_CLONE, spec, beta, stages, overlap(rho0, stages[-1].state),
        branch=branch, deletion_fidelity=float(blank),
    )


def run(pipeline: Union[Pipeline, str], machine: Union[str, mc.ClonerSpec], beta: float, **kwargs) -> PipelineReport:
    if Pipeline(pipeline) is Pipeline.CLONE_THEN_DELETE:
        return run_clone_then_delete(machine, beta, **kwargs)
    return run_delete_then_clone(machine, beta, **kwargs)


def delta_c(pipeline: Union[Pipeline, str], machine: Union[str, mc.ClonerSpec], beta: float) -> float:
    """Global coherence change of a full run, without building the report (used in root finding)."""
    spec = mc.named_machine(machine)
    if Pipeline(pipeline) is Pipeline.CLONE_THEN_DELETE:
        start = l1_coherence(tensor(projector(input_ket(beta)), projector(basis_ket(0))))
        end = l1_coherence(mc.deleted_after_clone_r_table(spec, beta).to_density_matrix())
    else:
        psi = projector(input_ket(beta))
        start = l1_coherence(tensor(psi, psi))
        end = l1_coherence(mc.reclone_m_table(spec, beta).to_density_matrix())
    return end - start
