"""Structural invariants over randomly drawn configurations."""

import math
from dataclasses import replace

import numpy as np
from hypothesis import given, settings, strategies as st

from bragg_entanglement import diagnostics, gaussian
from bragg_entanglement.model import (
    SystemConfig,
    Variant,
    build_dynamical_matrix,
    hamiltonian_quadratic_form,
    heisenberg_matrix,
)
from bragg_entanglement.propagator import evolve, operator_at

configs = st.builds(
    SystemConfig,
    omega_A=st.floats(0.0, 2.0),
    omega_B=st.floats(0.0, 2.0),
    delta=st.floats(-2.0, 2.0),
    eta_A=st.floats(0.0, 2.5),
    eta_B=st.floats(0.0, 2.5),
    n_probe=st.floats(0.0, 20.0),
    probe_phase=st.floats(0.0, 2 * math.pi),
    variant=st.sampled_from(list(Variant)),
)
times = st.floats(0.0, 1.0)
SETTINGS = settings(max_examples=60, deadline=None)


@SETTINGS
@given(configs)
def test_generator_is_metric_antihermitian(cfg):
    M = build_dynamical_matrix(cfg)
    G = M.metric
    assert np.allclose(M.entries @ G + G @ M.entries.conj().T, 0, atol=1e-14)


@SETTINGS
@given(configs)
def test_commutator_derivation_agrees(cfg):
    M = build_dynamical_matrix(cfg)
    assert np.array_equal(heisenberg_matrix(hamiltonian_quadratic_form(cfg), M.basis), M.entries)


@SETTINGS
@given(configs, times)
def test_evolution_is_canonical_and_time_reversible(cfg, t):
    emap = evolve(build_dynamical_matrix(cfg), t)
    assert emap.metric_defect() < 1e-10
    E = emap.matrix
    assert np.allclose(E.conj() @ E, np.eye(len(E)), atol=1e-9 * max(1.0, np.max(np.abs(E)) ** 2))


@SETTINGS
@given(configs, times)
def test_single_mode_physicality(cfg, t):
    emap = evolve(build_dynamical_matrix(cfg), t)
    forms = [operator_at(emap, m) for m in cfg.variant.modes]
    assert gaussian.moment_set(forms, gaussian.InitialState.from_config(cfg)).is_physical()


@SETTINGS
@given(configs, times)
def test_four_point_wick_matches_single_mode_closed_form(cfg, t):
    emap = evolve(build_dynamical_matrix(cfg), t)
    state = gaussian.InitialState.from_config(cfg)
    for mode in cfg.variant.modes:
        f = operator_at(emap, mode)
        closed = gaussian.single_mode_number_variance(
            gaussian.mean(f, state), gaussian.contract_pair(f.conjugate(), f).real, gaussian.contract_pair(f, f)
        )
        wick = gaussian.number_covariance(f, f, state)
        assert math.isclose(wick, closed, rel_tol=1e-9, abs_tol=1e-9)


@SETTINGS
@given(configs.filter(lambda c: c.variant is Variant.FULL5), st.floats(0.05, 1.0), st.floats(0.0, 2 * math.pi))
def test_entanglement_parameters_do_not_depend_on_probe_phase(cfg, t, phase):
    emap = evolve(build_dynamical_matrix(cfg), t)
    uv = diagnostics.bogoliubov_uv()
    a = gaussian.InitialState.from_config(cfg)
    b = gaussian.InitialState.from_config(replace(cfg, probe_phase=phase))
    for pair in diagnostics.ALL_PAIRS:
        for p in (pair, pair.with_picture("particle")):
            assert math.isclose(diagnostics.xi_quadrature(p, a, emap, uv), diagnostics.xi_quadrature(p, b, emap, uv),
                                rel_tol=1e-10)
            xa, xb = diagnostics.xi_number(p, a, emap, uv), diagnostics.xi_number(p, b, emap, uv)
            if xa is not None:
                assert math.isclose(xa, xb, rel_tol=1e-8, abs_tol=1e-10)


@SETTINGS
@given(configs.filter(lambda c: c.variant is Variant.FULL5), times)
def test_xi_p_is_positive(cfg, t):
    emap = evolve(build_dynamical_matrix(cfg), t)
    state = gaussian.InitialState.from_config(cfg)
    for pair in diagnostics.ALL_PAIRS:
        assert diagnostics.xi_quadrature(pair, state, emap) > 0
