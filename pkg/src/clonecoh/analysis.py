"""Sweeps over the input parameter, consumption thresholds, fidelity extrema and CSV output."""
from __future__ import annotations

import csv
from dataclasses import astuple, dataclass, fields
from typing import Iterable, Sequence, TextIO, Union

import numpy as np
from scipy.optimize import bisect, minimize_scalar

from . import machines as mc
from .errors import NoRoot
from .pipelines import Pipeline, PipelineReport, closed_form_fidelity, delta_c, run

__all__ = [
    "SweepRow",
    "sweep",
    "consumption_interval",
    "fidelity_extrema",
    "write_csv",
    "emit_csv",
    "read_csv",
]


@dataclass(frozen=True)
class SweepRow:
    beta: float
    alpha_beta: float
    c_global_in: float
    c_local_a_in: float
    c_local_b_in: float
    c_global_mid: float
    c_global_out: float
    residual_out: float
    delta_c: float
    delta_residual: float
    fidelity: float

    @classmethod
    def from_report(cls, report: PipelineReport) -> "SweepRow":
        first, mid, last = (s.coherence for s in report.stages)
        beta = report.beta
        return cls(
            beta=beta,
            alpha_beta=beta * float(np.sqrt(max(0.0, 1.0 - beta * beta))),
            c_global_in=first.global_,
            c_local_a_in=first.local_a,
            c_local_b_in=first.local_b,
            c_global_mid=mid.global_,
            c_global_out=last.global_,
            residual_out=last.residual,
            delta_c=report.delta_c,
            delta_residual=report.delta_residual,
            fidelity=report.fidelity,
        )


HEADER = tuple(f.name for f in fields(SweepRow))


def sweep(pipeline: Union[Pipeline, str], machine: Union[str, mc.ClonerSpec], n_points: int) -> list[SweepRow]:
    """One row per ``beta = k / (n_points - 1)``."""
    if n_points < 2:
        raise ValueError("n_points must be >= 2")
    return [SweepRow.from_report(run(pipeline, machine, k / (n_points - 1))) for k in range(n_points)]


def consumption_interval(
    pipeline: Union[Pipeline, str],
    machine: Union[str, mc.ClonerSpec],
    tol: float = 1e-10,
    n_coarse: int = 10_000,
) -> tuple[float, float]:
    """Range of beta over which the process consumes global coherence.

    The sign of the coherence change is scanned on a coarse grid, and each of
    the outermost sign changes is refined by bisection until ``|dC| < tol``.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    spec = mc.named_machine(machine)

    def f(beta):
        return delta_c(pipeline, spec, beta)

    grid = np.linspace(0.0, 1.0, n_coarse + 1)
    vals = np.array([f(b) for b in grid])
    sign = np.sign(vals)
    crossings = np.nonzero(sign[:-1] * sign[1:] <= 0)[0]
    if crossings.size < 2:
        raise NoRoot(f"coherence change has {crossings.size} sign change(s) on [0, 1]; expected two")

    roots = []
    for i in (crossings[0], crossings[-1]):
        lo, hi = grid[i], grid[i + 1]
        if vals[i] == 0.0:
            root = lo
        elif vals[i + 1] == 0.0:
            root = hi
        else:
            root = bisect(f, lo, hi, xtol=1e-15, maxiter=200)
        if abs(f(root)) >= tol:
            raise NoRoot(f"bisection stalled at beta={root!r} with |dC|={abs(f(root)):.3e} >= tol")
        roots.append(float(root))
    lo, hi = roots
    if not f(0.5 * (lo + hi)) < 0:
        raise NoRoot("coherence change is not negative between its outermost roots")
    return lo, hi


def fidelity_extrema(
    pipeline: Union[Pipeline, str], machine: str, n_grid: int = 2001
) -> tuple[float, float, float, float]:
    """``(f_min, beta_argmin, f_max, beta_argmax)`` of the closed-form process fidelity."""
    if closed_form_fidelity(pipeline, machine, 0.0) is None:
        raise ValueError(f"no closed-form fidelity for machine {machine!r}")

    def f(beta):
        return closed_form_fidelity(pipeline, machine, float(np.clip(beta, 0.0, 1.0)))

    grid = np.linspace(0.0, 1.0, n_grid)
    vals = np.array([f(b) for b in grid])

    def refine(sign):
        i = int(np.argmin(sign * vals))
        if i in (0, n_grid - 1):
            return vals[i], grid[i]
        res = minimize_scalar(lambda b: sign * f(b), bracket=(grid[i - 1], grid[i], grid[i + 1]),
                              method="golden", tol=1e-10)
        return f(res.x), float(res.x)

    f_min, b_min = refine(1.0)
    f_max, b_max = refine(-1.0)
    return float(f_min), float(b_min), float(f_max), float(b_max)


def write_csv(sink: TextIO, header: Sequence[str], rows: Iterable[Sequence]) -> int:
    """Header plus one line per row; floats are written with round-trip precision."""
    writer = csv.writer(sink, lineterminator="\n")
    writer.writerow(header)
    n = 0
    for row in rows:
        writer.writerow([repr(float(v)) if isinstance(v, (float, np.floating)) else v for v in row])
        n += 1
    return n


def emit_csv(rows: Sequence[SweepRow], sink: TextIO) -> int:
    return write_csv(sink, HEADER, (astuple(r) for r in rows))


def read_csv(source: TextIO) -> list[SweepRow]:
    reader = csv.reader(source)
    header = next(reader)
    if tuple(header) != HEADER:
        raise ValueError(f"unexpected header {header}")
    return [SweepRow(*map(float, line)) for line in reader]
