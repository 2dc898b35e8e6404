import math
from dataclasses import replace

import numpy as np
import pytest

from bragg_entanglement import diagnostics, gaussian
from bragg_entanglement.diagnostics import ALL_PAIRS, ENTANGLED_PAIR, ModePair, ModeRef, Picture
from bragg_entanglement.model import ModeId, SystemConfig, build_dynamical_matrix
from bragg_entanglement.propagator import evolve, operator_at

BASE = SystemConfig.working_point()


def test_pair_labels_roundtrip():
    for pair in ALL_PAIRS:
        assert ModePair.parse(pair.label) == pair
    assert ENTANGLED_PAIR.label == "qA_mqB"
    assert ENTANGLED_PAIR.second.mode is ModeId.BETA_MINUS_Q
    for bad in ("qA_qA", "xA_qB", "qA", "qA_mqB_qB"):
        with pytest.raises(ValueError):
            ModePair.parse(bad)
    with pytest.raises(ValueError):
        ModeRef("C", 1)


def test_bogoliubov_uv_default():
    u, v = diagnostics.bogoliubov_uv()
    assert (u, v) == pytest.approx((1.0051419616550832, 0.10153995804523852), rel=1e-14)


def test_initial_vacuum_values():
    state = gaussian.InitialState.vacuum()
    emap = evolve(build_dynamical_matrix(BASE), 0.0)
    assert diagnostics.xi_number(ENTANGLED_PAIR, state, emap) is None
    assert diagnostics.xi_quadrature(ENTANGLED_PAIR, state, emap) == pytest.approx(1.0)
    uv = diagnostics.bogoliubov_uv()
    # the quasiparticle vacuum is squeezed in the atomic basis: Var(X) = Var(P) = (u^2 + v^2)/2 per mode
    particle = ENTANGLED_PAIR.with_picture(Picture.PARTICLE)
    assert diagnostics.xi_quadrature(particle, state, emap, uv) == pytest.approx(uv[0] ** 2 + uv[1] ** 2)


def test_undefined_xi_n_flagged_in_series():
    cfg = replace(BASE, n_probe=0.0)
    rep = diagnostics.time_series(cfg, [0.0, 0.1], [ENTANGLED_PAIR])[0]
    assert rep.undefined.tolist() == [True, False]
    assert math.isnan(rep.xi_n[0]) and np.isfinite(rep.xi_n[1])
    assert rep.min_xi_n == rep.xi_n[1]


def test_particle_picture_requires_uv():
    emap = evolve(build_dynamical_matrix(BASE), 0.1)
    with pytest.raises(ValueError):
        diagnostics.xi_quadrature(ENTANGLED_PAIR.with_picture("particle"), gaussian.InitialState.vacuum(), emap)


def test_xi_p_equals_sigma_anticommutator():
    # (Var(X1+X2) + Var(P1-P2))/2 = <{dS, dS^dag}>/2 with S = f1 + f2^dag
    state = gaussian.InitialState.from_config(BASE)
    emap = evolve(build_dynamical_matrix(BASE), 0.7)
    f1, f2 = diagnostics.pair_forms(ENTANGLED_PAIR, emap)
    s = f1 + f2.conjugate()
    anti = gaussian.contract_pair(s, s.conjugate()) + gaussian.contract_pair(s.conjugate(), s)
    assert diagnostics.xi_quadrature(ENTANGLED_PAIR, state, emap) == pytest.approx(0.5 * anti.real, rel=1e-12)


def test_equal_couplings_without_free_rotation_conserve_sigma():
    cfg = SystemConfig(omega_A=0.0, delta=0.17, eta_A=1.62, eta_B=1.62, n_probe=10.0)
    M = build_dynamical_matrix(cfg)
    state = gaussian.InitialState.from_config(cfg)

    def sigma(emap):
        return operator_at(emap, ModeId.ALPHA_Q) + operator_at(emap, ModeId.BETA_MINUS_Q, daggered=True)

    s0 = sigma(evolve(M, 0.0))
    for t in np.linspace(0.0, 5.0, 51):
        emap = evolve(M, t)
        assert sigma(emap).allclose(s0, atol=1e-10)
        assert diagnostics.xi_quadrature(ENTANGLED_PAIR, state, emap) == pytest.approx(1.0, abs=1e-10)


def test_free_rotation_breaks_sigma_conservation():
    # d/dt (alpha_q + beta_-q^dag) = -i w (alpha_q - beta_-q^dag) at equal couplings
    cfg = BASE.with_ratio(1.0)
    M = build_dynamical_matrix(cfg)
    h = 1e-6
    s = lambda t: operator_at(evolve(M, t), ModeId.ALPHA_Q) + operator_at(evolve(M, t), ModeId.BETA_MINUS_Q, daggered=True)
    deriv = (s(h) - s(0.0)) / h
    expected = np.zeros(5, complex)
    expected[0], expected[3] = -1j * cfg.omega_A, 1j * cfg.omega_B
    assert np.allclose(deriv.coefficients, expected, atol=1e-5)


@pytest.mark.parametrize("phase", [0.3, 1.7, math.pi, 5.0])
def test_probe_phase_does_not_matter(phase):
    ref = diagnostics.time_series(BASE, [0.4, 0.9], ALL_PAIRS, diagnostics.bogoliubov_uv())
    rot = diagnostics.time_series(replace(BASE, probe_phase=phase), [0.4, 0.9], ALL_PAIRS, diagnostics.bogoliubov_uv())
    for a, b in zip(ref, rot):
        assert np.allclose(a.xi_n, b.xi_n, rtol=1e-11)
        assert np.allclose(a.xi_p, b.xi_p, rtol=1e-11)


def test_series_is_order_stable_across_workers():
    times = np.linspace(0.05, 1.5, 30)
    a = diagnostics.time_series(BASE, times, workers=1)
    b = diagnostics.time_series(BASE, times, workers=8)
    for x, y in zip(a, b):
        assert np.array_equal(x.xi_p, y.xi_p) and np.array_equal(x.xi_n, y.xi_n)


def test_sweep_shape_and_validation():
    reps = diagnostics.sweep_coupling_ratio(BASE, [0.5, 1.0, 1.25, 2.0], 0.75)
    assert [r.config.eta_B / r.config.eta_A for r in reps] == pytest.approx([0.5, 1.0, 1.25, 2.0])
    assert reps[2].xi_p[0] < 1 < reps[0].xi_p[0]
    with pytest.raises(ValueError):
        diagnostics.sweep_coupling_ratio(BASE, [0.0], 0.75)
