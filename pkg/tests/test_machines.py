import dataclasses

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from clonecoh import machines as mc
from clonecoh.coherence import coherence_report, l1_coherence
from clonecoh.errors import IsometryViolation
from clonecoh.qstate import bloch_vector, input_ket, overlap, partial_trace, projector

from conftest import BETA_GRID, INV_SQRT2

OUQC, PC = mc.ouqc_spec(), mc.pc_spec()
XX = np.kron(np.array([[0, 1], [1, 0]]), np.array([[0, 1], [1, 0]]))

betas = st.floats(0.0, 1.0)
phases = st.floats(0.0, 2 * np.pi)


def test_named_constants():
    assert abs(mc.reduction_factor(OUQC) - 2 / 3) < 1e-15
    assert abs(mc.cloner_fidelity(OUQC) - 5 / 6) < 1e-15
    assert abs(mc.reduction_factor(PC) - INV_SQRT2) < 1e-15
    assert abs(mc.cloner_fidelity(PC) - (1 + INV_SQRT2) / 2) < 1e-15
    for spec in (OUQC, PC):
        mags = np.array([spec.mag_a, spec.mag_b1, spec.mag_b2, spec.mag_c])
        assert abs((mags**2).sum() - 1) < 1e-15


def test_equal_magnitudes_give_no_information():
    spec = dataclasses.replace(PC, mag_a=0.5, mag_b1=0.5, mag_b2=0.5, mag_c=0.5)
    assert mc.reduction_factor(spec) == 0.0 and mc.cloner_fidelity(spec) == 0.5


def test_spec_validation():
    with pytest.raises(ValueError, match="sum"):
        dataclasses.replace(OUQC, mag_a=0.9)
    with pytest.raises(ValueError, match="non-negative"):
        dataclasses.replace(OUQC, mag_a=-np.sqrt(2 / 3))
    with pytest.raises(ValueError, match="dims"):
        dataclasses.replace(OUQC, anc_C=np.array([1, 0, 0]))
    with pytest.raises(ValueError, match="unknown machine"):
        mc.named_machine("bh")


def test_p_table_ouqc_equator():
    p = mc.clone_p_table(OUQC, INV_SQRT2)
    assert abs(p["00", "00"] - 1 / 3) < 1e-15
    assert abs(p["11", "11"] - 1 / 3) < 1e-15
    assert abs(p["00", "11"]) < 1e-15


def test_p_table_ouqc_zero():
    p = mc.clone_p_table(OUQC, 0.0)
    assert abs(p["00", "00"] - 2 / 3) < 1e-15
    assert abs(p["01", "01"] - 1 / 6) < 1e-15 and abs(p["10", "10"] - 1 / 6) < 1e-15
    assert abs(p["01", "10"] - 1 / 6) < 1e-15


def test_p_table_hermitian_unit_trace(rng):
    for _ in range(50):
        beta, phase = rng.uniform(), rng.uniform(0, 2 * np.pi)
        for spec in (OUQC, PC):
            m = mc.clone_p_table(spec, beta, phase).matrix
            assert np.abs(m - m.conj().T).max() < 1e-15
            assert abs(np.trace(m) - 1) < 1e-14


def _tilde_swapped(spec):
    return dataclasses.replace(
        spec,
        anc_A=spec.anc_At, anc_B1=spec.anc_B1t, anc_B2=spec.anc_B2t, anc_C=spec.anc_Ct,
        anc_At=spec.anc_A, anc_B1t=spec.anc_B1, anc_B2t=spec.anc_B2, anc_Ct=spec.anc_C,
        phase_a=spec.phase_at, phase_b1=spec.phase_b1t, phase_b2=spec.phase_b2t, phase_c=spec.phase_ct,
        phase_at=spec.phase_a, phase_b1t=spec.phase_b1, phase_b2t=spec.phase_b2, phase_ct=spec.phase_c,
    )


def test_zero_one_relabelling(rng):
    from clonecoh.oracle import random_valid_spec

    for spec in (OUQC, PC, random_valid_spec(rng), random_valid_spec(rng)):
        one = mc.clone_p_table(spec, 1.0).matrix
        zero = mc.clone_p_table(_tilde_swapped(spec), 0.0).matrix
        assert np.abs(one - XX @ zero @ XX).max() < 1e-14


def test_cloned_state_coherence_examples():
    rep = coherence_report(mc.cloned_state(OUQC, INV_SQRT2))
    assert np.abs(np.array(rep.as_tuple()) - [5 / 3, 2 / 3, 2 / 3, 1 / 3]).max() < 1e-12
    assert abs(l1_coherence(mc.cloned_state(PC, INV_SQRT2)) - (np.sqrt(2) + 0.5)) < 1e-12


def test_ouqc_marginals_at_zero():
    rho = mc.cloned_state(OUQC, 0.0)
    for keep in (0, 1):
        assert np.abs(partial_trace(rho, keep, (2, 2)).entries - np.diag([5 / 6, 1 / 6])).max() < 1e-15


@settings(max_examples=150, deadline=None)
@given(betas, phases)
def test_ouqc_symmetry_isotropy_fidelity(beta, phase):
    rho = mc.cloned_state(OUQC, beta, phase)
    ra, rb = partial_trace(rho, 0, (2, 2)), partial_trace(rho, 1, (2, 2))
    psi = projector(input_ket(beta, phase))
    assert np.abs(ra.entries - rb.entries).max() < 1e-12
    assert np.abs(bloch_vector(ra) - 2 / 3 * bloch_vector(psi)).max() < 1e-10
    assert abs(overlap(psi, ra) - 5 / 6) < 1e-10


@settings(max_examples=150, deadline=None)
@given(phases)
def test_pc_equatorial_laws(phase):
    # This machine shrinks x by 1/sqrt2 but y by 1/2, so only phase 0 and pi
    # reach (1 + 1/sqrt2) / 2.
    rho = mc.cloned_state(PC, INV_SQRT2, phase)
    ra, rb = partial_trace(rho, 0, (2, 2)), partial_trace(rho, 1, (2, 2))
    psi = projector(input_ket(INV_SQRT2, phase))
    assert np.abs(ra.entries - rb.entries).max() < 1e-12
    expected = [np.cos(phase) * INV_SQRT2, np.sin(phase) / 2, 0.0]
    assert np.abs(bloch_vector(ra) - expected).max() < 1e-10
    f = 0.5 * (1 + INV_SQRT2 * np.cos(phase) ** 2 + 0.5 * np.sin(phase) ** 2)
    assert abs(overlap(psi, ra) - f) < 1e-10


def test_pc_real_equatorial_inputs():
    for phase in (0.0, np.pi):
        rho = mc.cloned_state(PC, INV_SQRT2, phase)
        ra = partial_trace(rho, 0, (2, 2))
        psi = projector(input_ket(INV_SQRT2, phase))
        assert np.abs(bloch_vector(ra) - INV_SQRT2 * bloch_vector(psi)).max() < 1e-10
        assert abs(overlap(psi, ra) - (1 + INV_SQRT2) / 2) < 1e-10


@settings(max_examples=100, deadline=None)
@given(betas, phases)
def test_local_clone_coherence_is_two_eta_ab(beta, phase):
    alpha = np.sqrt(1 - beta**2)
    for spec, ph in ((OUQC, phase), (PC, 0.0)):
        rep = coherence_report(mc.cloned_state(spec, beta, ph))
        target = 2 * mc.reduction_factor(spec) * alpha * beta
        assert abs(rep.local_a - target) < 1e-10 and abs(rep.local_b - target) < 1e-10


def test_imperfect_copy_deleter_rules():
    d = mc.imperfect_copy_deleter(OUQC)
    assert d.kind is mc.DeleterKind.IMPERFECT_COPY and len(d.rules) == 8
    assert d.anc_out_dim == OUQC.anc_dim + 4
    assert d.gram_mismatch() < 1e-15
    d = mc.imperfect_copy_deleter(PC)
    labels = [r.label for r in d.rules]
    assert "|00>|A> -> |00>|A0>" in labels and "|00>|Ct> -> |00>|A1>" in labels
    zero_in = [r for r in d.rules if abs(r.in_sys[0]) == 1 and abs(r.in_anc[0]) == 1]
    one_in = [r for r in d.rules if abs(r.in_sys[0]) == 1 and abs(r.in_anc[1]) == 1]
    assert len(zero_in) == 1 and len(one_in) == 1


def test_deleter_merges_identical_inputs():
    spec = dataclasses.replace(PC, anc_Ct=PC.anc_A)
    d = mc.imperfect_copy_deleter(spec)
    assert sum(r.label.startswith("|00>") for r in d.rules) == 1
    d.check_isometry()


def test_merge_rules_conflict():
    e = np.eye(4)
    r1 = mc.RewriteRule("x", e[0], np.array([1.0]), e[0], np.array([1.0, 0]))
    r2 = mc.RewriteRule("y", e[0], np.array([1.0]), e[1], np.array([1.0, 0]))
    assert len(mc.merge_rules([r1, r1])) == 1
    with pytest.raises(IsometryViolation):
        mc.merge_rules([r1, r2])


def test_two_copy_deleter():
    d = mc.two_copy_deleter()
    assert d.kind is mc.DeleterKind.TWO_COPY and len(d.rules) == 3 and d.anc_in_dim == 1


def test_r_table_values():
    for beta in BETA_GRID:
        for spec, c in ((OUQC, 1 / 3), (PC, 1 / 4)):
            r = mc.deleted_after_clone_r_table(spec, beta)
            rep = coherence_report(r.to_density_matrix())
            assert abs(rep.global_ - c) < 1e-12
            assert abs(rep.local_a) < 1e-15 and abs(rep.local_b) < 1e-15
            assert np.abs(r.matrix[3]).max() == 0 and np.abs(r.matrix[:, 3]).max() == 0
    assert abs(mc.deleted_after_clone_r_table(OUQC, 0.4)["10", "01"] - 1 / 6) < 1e-15


def test_two_copy_deleted_examples():
    assert np.abs(mc.two_copy_deleted_state(0.0).entries - np.diag([1, 0, 0, 0])).max() == 0
    rep = coherence_report(mc.two_copy_deleted_state(INV_SQRT2))
    assert np.abs(np.array(rep.as_tuple()) - [0.5, 0, 0, 0.5]).max() < 1e-15


def test_reclone_tables():
    for beta in BETA_GRID:
        rep = coherence_report(mc.reclone_m_table(PC, beta).to_density_matrix())
        assert abs(rep.global_ - 0.5) < 1e-12
        assert abs(l1_coherence(mc.reclone_n_table(PC, beta).to_density_matrix()) - 0.5) < 1e-12
    rep = coherence_report(mc.reclone_m_table(OUQC, INV_SQRT2).to_density_matrix())
    assert abs(rep.global_ - 1 / 3) < 1e-12 and rep.local_a < 1e-15 and rep.local_b < 1e-15
    for spec in (OUQC, PC):
        m0 = mc.reclone_m_table(spec, 0.0).matrix
        assert np.abs(m0 - mc.clone_p_table(spec, 0.0).matrix).max() < 1e-15


def test_all_tables_are_states(rng):
    for _ in range(100):
        beta, phase = rng.uniform(), rng.uniform(0, 2 * np.pi)
        for spec in (OUQC, PC):
            for t in (mc.clone_p_table(spec, beta, phase), mc.deleted_after_clone_r_table(spec, beta, phase),
                      mc.reclone_m_table(spec, beta), mc.reclone_n_table(spec, beta)):
                t.to_density_matrix().check()
