"""Verification stage: weak probe read-out, beam-splitter superposition and Monte Carlo estimators.

After generation, one weak verifying probe per condensate is scattered in
a frame rotating at the pump-probe detuning. To first order in the verifying
coupling ``eta_v``, the output of the probe on condensate A is

    c_out = c_in + s_-(t) alpha_q^dag + s_+(t) alpha_-q,
    s_-(+)(t) = eta_v / (delta -(+) w) * (exp(i (delta -(+) w) t) - 1)

and on condensate B the same with beta and the momenta exchanged. A
phase-sensitive detector at ``delta - w`` keeps the ``c_in + s_- x^dag`` part;
dividing by ``s_-`` demodulates it to ``x^dag + c_in / s_-``.

Homodyne samples are drawn from the exact Gaussian distribution of a
Hermitian quadrature form. Heterodyne samples follow the Husimi distribution
(one extra half quantum per quadrature); the normally ordered photon-number
moments are recovered from its anti-normally ordered moments:

    <n>          = E|a|^2 - 1
    <n^2>        = E|a|^4 - 3 E|a|^2 + 1
    <n_1 n_2>    = E|a_1|^2|a_2|^2 - E|a_1|^2 - E|a_2|^2 + 1
"""

from __future__ import annotations

import cmath
import hashlib
import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from . import gaussian
from .model import ModeId, SystemConfig, metric_of
from .propagator import EvolutionMap, LinearOperatorForm, operator_at

CHUNK = 1 << 14
VERIFY_A = "verify_A"
VERIFY_B = "verify_B"
DEFAULT_VERIFY_DURATION = 20.0
DEFAULT_VERIFY_FRACTION = 1e-3
WEAK_COUPLING_WARN = 0.1


@dataclass(frozen=True)
class ProbeOutputForm:
    condensate: str
    input_coefficient: complex
    sideband_minus: complex  # on x^dag at delta - w
    sideband_plus: complex  # on the opposite-momentum annihilator at delta + w
    duration: float
    eta_verify: float
    resonant: bool = False

    @property
    def modes(self) -> tuple[ModeId, ModeId]:
        """(mode carried by sideband_minus as its creator, mode annihilated by sideband_plus)."""
        if self.condensate == "A":
            return ModeId.ALPHA_Q, ModeId.ALPHA_MINUS_Q
        return ModeId.BETA_MINUS_Q, ModeId.BETA_Q

    @property
    def input_label(self) -> str:
        return VERIFY_A if self.condensate == "A" else VERIFY_B

    def as_operator(self, emap: EvolutionMap, basis=None, spectral: str | None = None) -> LinearOperatorForm:
        """Operator form over the generation basis extended by the verifying probe inputs.

        ``spectral="minus"`` keeps only the component detected at
        ``delta - w`` (input noise plus ``sideband_minus``).
        """
        basis = tuple(basis or extended_basis(emap))
        created, annihilated = self.modes
        form = LinearOperatorForm.unit(basis, basis.index((self.input_label, False))) * self.input_coefficient
        form = form + operator_at(emap, created, daggered=True).embed(basis) * self.sideband_minus
        if spectral != "minus":
            form = form + operator_at(emap, annihilated).embed(basis) * self.sideband_plus
        return form

    def demodulated(self, emap: EvolutionMap, basis=None) -> LinearOperatorForm:
        """``(c_in + s_- x^dag) / s_-``: an estimate of ``x^dag`` plus scaled input noise."""
        if self.sideband_minus == 0:
            raise ValueError("zero read-out coefficient (t = 0?)")
        return self.as_operator(emap, basis, spectral="minus") / self.sideband_minus


def extended_basis(emap: EvolutionMap) -> tuple:
    return tuple(emap.basis) + ((VERIFY_A, False), (VERIFY_B, False))


def _sideband(eta: float, detuning: float, t: float) -> tuple[complex, bool]:
    x = detuning * t
    if x == 0:
        return 1j * eta * t, True
    if abs(x) < 1e-8:
        # (e^{ix} - 1)/x = i (1 + i x/2 + ...)
        return 1j * eta * t * (1 + 0.5j * x), False
    return eta / detuning * (cmath.exp(1j * x) - 1), False


def output_probe_form(
    config: SystemConfig,
    condensate: str,
    t: float = DEFAULT_VERIFY_DURATION,
    eta_verify: float | None = None,
    convention: str = "exp_plus",
) -> ProbeOutputForm:
    """Two-sideband read-out form of the verifying probe on ``condensate``.

    The default ``"exp_plus"`` uses the ``exp(+i (delta -+ w) t)`` phases of
    the module docstring. ``convention="heisenberg"`` returns the complex conjugate sideband phases,
    which is what integrating the verification Hamiltonian with
    ``H_F = -delta c^dag c`` gives in the frame ``c -> exp(-i delta t) c``.
    """
    omega = config.omega_A if condensate == "A" else config.omega_B
    if condensate not in ("A", "B"):
        raise ValueError("condensate must be 'A' or 'B'")
    if eta_verify is None:
        eta_verify = DEFAULT_VERIFY_FRACTION * omega
    if omega > 0 and eta_verify > WEAK_COUPLING_WARN * omega:
        warnings.warn(
            f"eta_verify = {eta_verify:g} is not small against omega_B = {omega:g}; "
            "the first-order read-out is inaccurate",
            stacklevel=2,
        )
    s_minus, resonant = _sideband(eta_verify, config.delta - omega, t)
    s_plus, res_plus = _sideband(eta_verify, config.delta + omega, t)
    if convention == "heisenberg":
        s_minus, s_plus = s_minus.conjugate(), s_plus.conjugate()
    elif convention != "exp_plus":
        raise ValueError(f"unknown convention {convention!r}")
    return ProbeOutputForm(condensate, 1.0, s_minus, s_plus, float(t), float(eta_verify), resonant or res_plus)


def superpose_outputs(a_out: LinearOperatorForm, b_out: LinearOperatorForm, sign: int = 1) -> LinearOperatorForm:
    """Balanced beam splitter port ``(a + sign * b) / sqrt 2``."""
    return (a_out + b_out * sign) * (1.0 / math.sqrt(2.0))


def input_noise_variance(h: LinearOperatorForm, labels=(VERIFY_A, VERIFY_B)) -> float:
    """Part of ``Var(h)`` contributed by the (vacuum) verifying-probe inputs."""
    total = 0.0
    for k, (label, dag) in enumerate(h.basis):
        if label in labels:
            c, d = h.coefficients[k], h.dagger_coefficients[k]
            # vacuum annihilator: <dv dv^dag> = 1, contraction picks c * d
            total += (d * c).real if dag else (c * d).real
    return float(total)


@dataclass(frozen=True)
class VerificationQuadratures:
    """Measured quadratures giving ``xi_p = scale * (Var(x) + Var(p)) - noise``."""

    x: LinearOperatorForm
    p: LinearOperatorForm
    scale: float
    noise: float


def ideal_quadratures(emap: EvolutionMap) -> VerificationQuadratures:
    """``X1 + X2`` and ``P1 - P2`` of (alpha_q, beta_-q), read out noiselessly."""
    fa = operator_at(emap, ModeId.ALPHA_Q)
    fb = operator_at(emap, ModeId.BETA_MINUS_Q)
    xa, pa = gaussian.quadrature_forms(fa)
    xb, pb = gaussian.quadrature_forms(fb)
    return VerificationQuadratures(xa + xb, pa - pb, 0.5, 0.0)


def probe_chain_quadratures(
    config: SystemConfig,
    emap: EvolutionMap,
    t_verify: float = DEFAULT_VERIFY_DURATION,
    eta_verify: float | None = None,
) -> VerificationQuadratures:
    """Quadratures of the two beam-splitter ports built from the demodulated probe outputs.

    With ``F_A ~ alpha_q^dag`` and ``F_B ~ beta_-q^dag``, the X quadrature of
    ``(F_A + F_B)/sqrt2`` is ``(X1 + X2)/sqrt2`` and the P quadrature of
    ``(F_A - F_B)/sqrt2`` is ``-(P1 - P2)/sqrt2``, so
    ``xi_p = Var(X_sum) + Var(P_diff) - noise``.
    """
    basis = extended_basis(emap)
    fa = output_probe_form(config, "A", t_verify, eta_verify).demodulated(emap, basis)
    fb = output_probe_form(config, "B", t_verify, eta_verify).demodulated(emap, basis)
    x_sum, _ = gaussian.quadrature_forms(superpose_outputs(fa, fb, +1))
    _, p_diff = gaussian.quadrature_forms(superpose_outputs(fa, fb, -1))
    noise = input_noise_variance(x_sum) + input_noise_variance(p_diff)
    return VerificationQuadratures(x_sum, p_diff, 1.0, noise)


@dataclass(eq=False)
class MeasurementRun:
    shots: int
    rng_seed: int
    estimates: dict
    standard_errors: dict
    digest: str = ""
    extra: dict = field(default_factory=dict)

    def same_as(self, other: "MeasurementRun") -> bool:
        return self.digest == other.digest and self.estimates == other.estimates


def _chunks(shots: int):
    full, rest = divmod(shots, CHUNK)
    return [CHUNK] * full + ([rest] if rest else [])


def _gaussian_samples(mean: np.ndarray, cov: np.ndarray, shots: int, seed: int) -> np.ndarray:
    """``shots`` real Gaussian vectors from per-chunk substreams of ``seed``.

    Chunks have a fixed size, so the stream does not depend on how the work
    is scheduled.
    """
    sizes = _chunks(shots)
    children = np.random.SeedSequence(seed).spawn(len(sizes))
    # eigen-factor tolerates the semidefinite covariances of pure states
    w, V = np.linalg.eigh(cov)
    L = V * np.sqrt(np.clip(w, 0.0, None))
    parts = []
    for size, child in zip(sizes, children):
        z = np.random.default_rng(child).standard_normal((size, len(mean)))
        parts.append(mean + z @ L.T)
    return np.concatenate(parts) if parts else np.empty((0, len(mean)))


def _digest(samples: np.ndarray) -> str:
    return hashlib.sha256(np.ascontiguousarray(samples).tobytes()).hexdigest()


def sample_homodyne(h: LinearOperatorForm, state: gaussian.InitialState, shots: int, seed: int) -> MeasurementRun:
    """Homodyne record of the Hermitian form ``h``: sample mean and variance with standard errors."""
    if not h.is_hermitian(atol=1e-9 * max(1.0, float(np.max(np.abs(h.doubled))))):
        raise ValueError("homodyne detection needs a Hermitian quadrature form")
    mu = gaussian.mean(h, state).real
    var = gaussian.variance(h)
    x = _gaussian_samples(np.array([mu]), np.array([[var]]), shots, seed)[:, 0]
    m, v = float(np.mean(x)), float(np.var(x, ddof=1))
    return MeasurementRun(
        shots=shots,
        rng_seed=seed,
        estimates={"mean": m, "variance": v},
        standard_errors={"mean": math.sqrt(v / shots), "variance": v * math.sqrt(2.0 / (shots - 1))},
        digest=_digest(x),
        extra={"analytic_mean": mu, "analytic_variance": var},
    )


def estimate_xi_p_homodyne(
    quads: VerificationQuadratures, state: gaussian.InitialState, shots: int, seed: int
) -> MeasurementRun:
    """xi_p from two homodyne records (separate runs, independent substreams)."""
    seeds = np.random.SeedSequence(seed).generate_state(2)
    rx = sample_homodyne(quads.x, state, shots, int(seeds[0]))
    rp = sample_homodyne(quads.p, state, shots, int(seeds[1]))
    est = quads.scale * (rx.estimates["variance"] + rp.estimates["variance"]) - quads.noise
    se = quads.scale * math.hypot(rx.standard_errors["variance"], rp.standard_errors["variance"])
    return MeasurementRun(
        shots=shots,
        rng_seed=seed,
        estimates={"xi_p": est, "var_x": rx.estimates["variance"], "var_p": rp.estimates["variance"]},
        standard_errors={"xi_p": se},
        digest=hashlib.sha256((rx.digest + rp.digest).encode()).hexdigest(),
    )


def heterodyne_moments(f1: LinearOperatorForm, f2: LinearOperatorForm, state: gaussian.InitialState):
    """Mean and covariance of ``(Re a1, Im a1, Re a2, Im a2)`` under the Husimi distribution."""
    forms = (f1, f2)
    mu = np.array([gaussian.mean(f, state) for f in forms])
    # anti-normal moments: A_ij = <df_i df_j^dag>, B_ij = <df_i df_j>
    A = np.array([[gaussian.contract_pair(fi, fj.conjugate()) for fj in forms] for fi in forms])
    B = np.array([[gaussian.contract_pair(fi, fj) for fj in forms] for fi in forms])
    B = 0.5 * (B + B.T)
    cov = np.empty((4, 4))
    for i in range(2):
        for j in range(2):
            cov[2 * i, 2 * j] = 0.5 * (A[i, j] + B[i, j]).real
            cov[2 * i + 1, 2 * j + 1] = 0.5 * (A[i, j] - B[i, j]).real
            cov[2 * i, 2 * j + 1] = 0.5 * (B[i, j] - A[i, j]).imag
            cov[2 * i + 1, 2 * j] = 0.5 * (B[i, j] + A[i, j]).imag
    mean = np.array([mu[0].real, mu[0].imag, mu[1].real, mu[1].imag])
    return mean, cov


def estimate_xi_n_heterodyne(
    f1: LinearOperatorForm, f2: LinearOperatorForm, state: gaussian.InitialState, shots: int, seed: int
) -> MeasurementRun:
    """xi_n of two modes from simultaneous heterodyne records.

    ``xi_n_raw`` treats ``|a|^2`` as the photon number; ``xi_n`` applies the
    anti-normal-to-normal ordering correction from the module docstring.
    Standard errors use the delta method on the per-shot estimands.
    """
    mean, cov = heterodyne_moments(f1, f2, state)
    r = _gaussian_samples(mean, cov, shots, seed)
    q1 = r[:, 0] ** 2 + r[:, 1] ** 2
    q2 = r[:, 2] ** 2 + r[:, 3] ** 2
    # per-shot unbiased estimands of <(n1-n2)^2>, <n1-n2>, <n1+n2>
    g = (q1**2 - 3 * q1 + 1) + (q2**2 - 3 * q2 + 1) - 2 * (q1 * q2 - q1 - q2 + 1)
    h = q1 - q2
    s = q1 + q2 - 2.0
    mg, mh, ms = g.mean(), h.mean(), s.mean()
    n_mean = {"n1": float(q1.mean() - 1), "n2": float(q2.mean() - 1)}
    if abs(ms) < 1e-12:
        xi = math.nan
        se = math.nan
    else:
        xi = float((mg - mh**2) / ms)
        grad = np.array([1.0 / ms, -2.0 * mh / ms, -xi / ms])
        S = np.cov(np.vstack([g, h, s]))
        se = float(math.sqrt(grad @ S @ grad / shots))
    raw = float(np.var(h, ddof=1) / np.mean(q1 + q2))
    return MeasurementRun(
        shots=shots,
        rng_seed=seed,
        estimates={"xi_n": xi, "xi_n_raw": raw, **n_mean},
        standard_errors={"xi_n": se, "n1": float(np.std(q1, ddof=1) / math.sqrt(shots)),
                         "n2": float(np.std(q2, ddof=1) / math.sqrt(shots))},
        digest=_digest(r),
    )


def two_stage_verification(
    config: SystemConfig, emap_gen: EvolutionMap, t_verify: float, eta_verify: float
) -> tuple[LinearOperatorForm, LinearOperatorForm]:
    """Exact two-stage evolution in an enlarged mode set, for checking the read-out formula.

    Stage 2 switches the generation couplings off and scatters one verifying
    probe per condensate (``verify_A`` on alpha_q/alpha_-q, ``verify_B`` on
    beta_-q/beta_q). Returns the forms of both verifying probes in the frame
    ``c -> exp(-i delta t) c``, over :func:`extended_basis`.
    """
    basis = extended_basis(emap_gen)
    n = len(basis)
    idx = {label: k for k, (label, _) in enumerate(basis)}
    # stage-2 state vector uses verify_A^dag and verify_B so the system closes on the same entries
    s2_basis = basis[:-2] + ((VERIFY_A, True), (VERIFY_B, False))
    M2 = np.zeros((n, n), complex)
    w_a, w_b, d = config.omega_A, config.omega_B, config.delta
    ia, iam, ib, ibm, ic = (idx[m] for m in (ModeId.ALPHA_Q, ModeId.ALPHA_MINUS_Q, ModeId.BETA_Q,
                                            ModeId.BETA_MINUS_Q, ModeId.PROBE))
    iva, ivb = idx[VERIFY_A], idx[VERIFY_B]
    M2[ia, ia], M2[iam, iam] = -1j * w_a, 1j * w_a
    M2[ib, ib], M2[ibm, ibm] = -1j * w_b, 1j * w_b
    M2[ic, ic] = -1j * d
    # verify_A^dag' = -i d verify_A^dag + i eta (alpha_q + alpha_-q^dag)
    M2[iva, iva] = -1j * d
    M2[iva, ia] = M2[iva, iam] = 1j * eta_verify
    M2[ia, iva], M2[iam, iva] = -1j * eta_verify, 1j * eta_verify
    # verify_B' = +i d verify_B - i eta (beta_-q^dag + beta_q)
    M2[ivb, ivb] = 1j * d
    M2[ivb, ibm] = M2[ivb, ib] = -1j * eta_verify
    M2[ibm, ivb], M2[ib, ivb] = 1j * eta_verify, -1j * eta_verify
    assert np.allclose(M2 @ metric_of(s2_basis) + metric_of(s2_basis) @ M2.conj().T, 0)
    from scipy.linalg import expm

    E2 = expm(M2 * t_verify)
    E1 = np.eye(n, dtype=complex)
    E1[:-2, :-2] = emap_gen.matrix
    # stage-1 rows are over the generation basis with verify inputs idle; express stage-2
    # entries through stage-1 operators, then through initial operators.
    total = E2 @ E1
    rot = np.exp(-1j * d * t_verify)

    def form_of(row, row_is_dagger):
        # row gives the entry in s2_basis; columns are initial entries whose dagger flags follow s2_basis
        c = np.zeros(n, complex)
        dd = np.zeros(n, complex)
        for k, (label, dag) in enumerate(s2_basis):
            if dag == basis[k][1]:
                c[k] = row[k]
            else:
                dd[k] = row[k]
        f = LinearOperatorForm(basis, c, dd)
        return f.conjugate() if row_is_dagger else f

    out_a = form_of(total[iva], True) * rot
    out_b = form_of(total[ivb], False) * rot
    return out_a, out_b
