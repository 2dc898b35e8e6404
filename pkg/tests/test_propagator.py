import numpy as np
import pytest

from bragg_entanglement.model import ModeId, SystemConfig, Variant, build_dynamical_matrix
from bragg_entanglement.propagator import BasisMismatchError, LinearOperatorForm, evolve, operator_at
from oracles import rk4_evolution

BASE = SystemConfig.working_point()


def test_matches_rk4_oracle():
    M = build_dynamical_matrix(BASE)
    for t in (0.1, 0.75, 1.5):
        ref = rk4_evolution(M.entries, t, steps=4000)
        E = evolve(M, t).matrix
        assert np.max(np.abs(E - ref)) <= 1e-10 * np.max(np.abs(ref))


def test_identity_and_group_law():
    M = build_dynamical_matrix(BASE)
    assert np.array_equal(evolve(M, 0.0).matrix, np.eye(5))
    a, b = evolve(M, 0.3).matrix, evolve(M, 0.45).matrix
    assert np.allclose(a @ b, evolve(M, 0.75).matrix, atol=1e-12)


def test_time_reversal_is_complex_conjugation():
    # M is purely imaginary, so E(t)^* = E(-t) = E(t)^-1
    M = build_dynamical_matrix(BASE)
    assert np.allclose(M.entries.real, 0)
    E = evolve(M, 0.6).matrix
    assert np.allclose(E.conj() @ E, np.eye(5), atol=1e-12)


def test_metric_preserved():
    emap = evolve(build_dynamical_matrix(BASE), 1.2)
    assert emap.metric_defect() < 1e-11


def test_negative_time_rejected():
    with pytest.raises(ValueError):
        evolve(build_dynamical_matrix(BASE), -0.1)


def test_operator_at_adjoint_rows():
    emap = evolve(build_dynamical_matrix(BASE), 0.5)
    f = operator_at(emap, ModeId.ALPHA_MINUS_Q)  # basis entry is alpha_-q^dag
    g = operator_at(emap, ModeId.ALPHA_MINUS_Q, daggered=True)
    assert f.conjugate().allclose(g)
    assert np.array_equal(g.coefficients, emap.matrix[1])
    assert not np.any(g.dagger_coefficients)


def test_form_algebra():
    basis = build_dynamical_matrix(BASE).basis
    a = LinearOperatorForm.unit(basis, 0)
    c = LinearOperatorForm.unit(basis, 4)
    h = a + a.conjugate()
    assert h.is_hermitian()
    assert not (a + c).is_hermitian()
    assert ((a * 2.0) / 2.0).allclose(a)
    assert (a - a).allclose(LinearOperatorForm.zero(basis))
    assert a.conjugate().conjugate().allclose(a)


def test_embed_and_mismatch():
    full = build_dynamical_matrix(BASE)
    small = build_dynamical_matrix(SystemConfig(omega_A=0.1, delta=0.1, eta_A=1, eta_B=1, variant=Variant.RESONANT_ONLY3))
    f = LinearOperatorForm.unit(small.basis, 0)
    g = f.embed(full.basis)
    assert g.coefficients[0] == 1 and np.count_nonzero(g.doubled) == 1
    with pytest.raises(BasisMismatchError):
        f + LinearOperatorForm.unit(full.basis, 0)
