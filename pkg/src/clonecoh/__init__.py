"""Coherence bookkeeping for quantum cloning and deleting machines."""
from .coherence import CoherenceReport, coherence_report, is_incoherent, l1_coherence
from .errors import DimensionError, DomainError, IsometryViolation, NoRoot
from .machines import ClonerSpec, DeleterSpec, ouqc_spec, pc_spec
from .pipelines import Pipeline, PipelineReport, run_clone_then_delete, run_delete_then_clone
from .qstate import DensityMatrix, Ket

__version__ = "0.1.0"
