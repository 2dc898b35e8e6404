"""Brute-force state-vector oracle in a truncated multimode Fock basis.

The state is evolved in the Schroedinger picture under the sparse matrix of
the quadratic Hamiltonian and every observable is evaluated directly, with
no use of the Gaussian machinery. Truncation is monitored through the
population of the top layer (any mode at its cap).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np
import scipy.sparse as sp
from scipy.linalg import eigh
from scipy.sparse.linalg import expm_multiply
from scipy.special import gammaln

from .model import ModeId, QuadraticHamiltonian

DEFAULT_MAX_DIM = 3_000_000
DENSE_MAX_DIM = 2000
XI_N_EPS = 1e-12


class MemoryCeilingError(ValueError):
    pass


class UntrustedStateError(RuntimeError):
    pass


@dataclass(frozen=True)
class TruncationSpec:
    """Per-mode occupation caps, in the order of the Hamiltonian's modes."""

    caps: tuple[int, ...]
    leakage_tolerance: float = 1e-6
    max_dim: int = DEFAULT_MAX_DIM

    def __post_init__(self):
        object.__setattr__(self, "caps", tuple(int(c) for c in self.caps))
        if any(c < 0 for c in self.caps):
            raise ValueError("caps must be non-negative")
        if self.dim > self.max_dim:
            raise MemoryCeilingError(f"basis dimension {self.dim} exceeds ceiling {self.max_dim}")

    @property
    def dim(self) -> int:
        return math.prod(c + 1 for c in self.caps)

    def bumped(self, by: int = 2) -> "TruncationSpec":
        return TruncationSpec(tuple(c + by for c in self.caps), self.leakage_tolerance, self.max_dim)


class FockSpace:
    """Product basis over ``modes`` with ladder operators as sparse matrices."""

    def __init__(self, modes, spec: TruncationSpec):
        modes = tuple(modes)
        if len(modes) != len(spec.caps):
            raise ValueError("one cap per mode is required")
        self.modes = modes
        self.spec = spec
        self.shape = tuple(c + 1 for c in spec.caps)
        self.dim = spec.dim
        self._ladder: dict = {}

    def annihilator(self, mode) -> sp.csr_matrix:
        if mode not in self._ladder:
            k = self.modes.index(mode)
            cap = self.spec.caps[k]
            a = sp.diags(np.sqrt(np.arange(1, cap + 1, dtype=float)), 1, format="csr")
            left = sp.identity(math.prod(self.shape[:k]), format="csr")
            right = sp.identity(math.prod(self.shape[k + 1:]), format="csr")
            self._ladder[mode] = sp.kron(sp.kron(left, a), right, format="csr")
        return self._ladder[mode]

    def number(self, mode) -> sp.csr_matrix:
        a = self.annihilator(mode)
        return (a.T @ a).tocsr()

    @cached_property
    def top_layer(self) -> np.ndarray:
        """Mask of basis states with at least one mode at its cap."""
        idx = np.indices(self.shape).reshape(len(self.shape), -1)
        caps = np.array(self.spec.caps)[:, None]
        return np.any(idx == caps, axis=0)

    def hamiltonian(self, ham: QuadraticHamiltonian) -> sp.csr_matrix:
        n = len(ham.modes)
        ops = [self.annihilator(m) for m in ham.modes]
        H = sp.csr_matrix((self.dim, self.dim), dtype=complex)
        for i in range(n):
            for j in range(n):
                if ham.number[i, j] != 0:
                    H = H + ham.number[i, j] * (ops[i].T @ ops[j])
                if ham.pairing[i, j] != 0:
                    pair = 0.5 * ham.pairing[i, j] * (ops[i].T @ ops[j].T)
                    H = H + pair + pair.conj().T
        return H.tocsr()

    def coherent_state(self, amplitudes: dict) -> "FockStateVector":
        """Product of coherent-state expansions ``e^{-|a|^2/2} a^n / sqrt(n!)`` cut at each cap.

        The truncated tail is not renormalized; it shows up as a norm deficit.
        """
        psi = np.ones(1, complex)
        for mode, cap in zip(self.modes, self.spec.caps):
            amp = complex(amplitudes.get(mode, 0.0))
            n = np.arange(cap + 1)
            if amp == 0:
                factor = (n == 0).astype(complex)
            else:
                log_mag = -0.5 * abs(amp) ** 2 + n * math.log(abs(amp)) - 0.5 * gammaln(n + 1)
                factor = np.exp(log_mag) * np.exp(1j * n * np.angle(amp))
            psi = np.kron(psi, factor)
        return FockStateVector(psi, self)


@dataclass(eq=False)
class FockStateVector:
    amplitudes: np.ndarray
    space: FockSpace
    time: float = 0.0
    initial_norm: float | None = field(default=None)

    def __post_init__(self):
        if self.initial_norm is None:
            self.initial_norm = self.norm

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    @property
    def leakage(self) -> float:
        return float(np.sum(np.abs(self.amplitudes[self.space.top_layer]) ** 2))

    @property
    def trusted(self) -> bool:
        return self.leakage < self.space.spec.leakage_tolerance

    def expect(self, op) -> complex:
        psi = self.amplitudes
        return complex(np.vdot(psi, op @ psi))


def assemble_hamiltonian(ham: QuadraticHamiltonian, spec: TruncationSpec) -> sp.csr_matrix:
    """Sparse matrix of ``ham`` in the truncated product basis (caps follow ``ham.modes``)."""
    return FockSpace(ham.modes, spec).hamiltonian(ham)


def evolve_state(H, state: FockStateVector, t: float, check: bool = False) -> FockStateVector:
    """``exp(-i H t) |psi>``.

    Uses ``scipy.sparse.linalg.expm_multiply`` (truncated Taylor series with
    norm-based step control). With ``check`` the result is compared with two
    half steps; a mismatch above 1e-8 raises.
    """
    psi = expm_multiply(-1j * t * H, state.amplitudes)
    if check:
        half = expm_multiply(-0.5j * t * H, state.amplitudes)
        half = expm_multiply(-0.5j * t * H, half)
        err = np.max(np.abs(psi - half))
        if err > 1e-8:
            raise RuntimeError(f"step-halving disagreement {err:.2e} at t={t}")
    return FockStateVector(psi, state.space, state.time + t, state.initial_norm)


def evolve_state_dense(H, state: FockStateVector, t: float) -> FockStateVector:
    """Second path by full diagonalization; only for small bases."""
    if H.shape[0] > DENSE_MAX_DIM:
        raise MemoryCeilingError(f"dense path limited to dimension {DENSE_MAX_DIM}")
    w, V = eigh(H.toarray())
    psi = V @ (np.exp(-1j * w * t) * (V.conj().T @ state.amplitudes))
    return FockStateVector(psi, state.space, state.time + t, state.initial_norm)


@dataclass(frozen=True)
class Measured:
    value: float
    trusted: bool
    leakage: float


class Observables:
    """Direct operator evaluation of the quantities the Gaussian engine reports."""

    def __init__(self, space: FockSpace):
        self.space = space

    def annihilator(self, ref, picture="quasi", uv=None) -> sp.csr_matrix:
        """Quasiparticle mode or the atomic side-mode ``u alpha_q - v alpha_-q^dag``.

        ``ref`` is a :class:`ModeId` or a diagnostics ``ModeRef``.
        """
        mode = getattr(ref, "mode", ref)
        a = self.space.annihilator(mode)
        if str(getattr(picture, "value", picture)) == "quasi":
            return a
        u, v = uv
        partner = _PARTNER[mode]
        return (u * a - v * self.space.annihilator(partner).T).tocsr()

    def occupation(self, state, a) -> float:
        return state.expect(a.conj().T @ a).real

    def normal(self, state, a, b) -> complex:
        """``<a^dag b>``."""
        psi = state.amplitudes
        return complex(np.vdot(a @ psi, b @ psi))

    def anomalous(self, state, a, b) -> complex:
        """``<a b>``."""
        psi = state.amplitudes
        return complex(np.vdot(a.conj().T @ psi, b @ psi))

    def mean(self, state, a) -> complex:
        return state.expect(a)

    def number_difference_variance(self, state, a, b) -> float:
        d = (a.conj().T @ a - b.conj().T @ b).tocsr()
        psi = state.amplitudes
        dpsi = d @ psi
        return float(np.vdot(dpsi, dpsi).real - np.vdot(psi, dpsi).real ** 2)

    def quadrature_variance(self, state, op) -> float:
        """Variance of a Hermitian sparse operator."""
        psi = state.amplitudes
        opsi = op @ psi
        return float(np.vdot(opsi, opsi).real - np.vdot(psi, opsi).real ** 2)

    def xi_n(self, state, a, b) -> float:
        """NaN when both modes are empty (same threshold as the Gaussian engine)."""
        denom = self.occupation(state, a) + self.occupation(state, b)
        if denom < XI_N_EPS:
            return math.nan
        return self.number_difference_variance(state, a, b) / denom

    def xi_p(self, state, a, b) -> float:
        s = 1.0 / math.sqrt(2.0)
        ad, bd = a.conj().T, b.conj().T
        x_sum = s * (a + ad + b + bd)
        p_diff = -1j * s * (a - ad - b + bd)
        return 0.5 * (self.quadrature_variance(state, x_sum) + self.quadrature_variance(state, p_diff))

    def energy(self, state, H) -> float:
        return state.expect(H).real


_PARTNER = {
    ModeId.ALPHA_Q: ModeId.ALPHA_MINUS_Q,
    ModeId.ALPHA_MINUS_Q: ModeId.ALPHA_Q,
    ModeId.BETA_Q: ModeId.BETA_MINUS_Q,
    ModeId.BETA_MINUS_Q: ModeId.BETA_Q,
}

OBSERVABLES = ("occupation", "number_covariance", "quadrature_variance", "xi_n", "xi_p", "energy")


def measure(state: FockStateVector, observable: str, *operands, **kwargs) -> Measured:
    """Evaluate one observable; the trust flag of ``state`` is carried along.

    ``operands`` are sparse annihilators (or a Hermitian operator for
    ``quadrature_variance``, the Hamiltonian for ``energy``).
    ``number_covariance`` with two operands means ``Var(n_1 - n_2)``.
    """
    obs = Observables(state.space)
    if observable == "occupation":
        value = obs.occupation(state, *operands)
    elif observable == "number_covariance":
        value = obs.number_difference_variance(state, *operands)
    elif observable == "quadrature_variance":
        value = obs.quadrature_variance(state, *operands)
    elif observable == "xi_n":
        value = obs.xi_n(state, *operands)
    elif observable == "xi_p":
        value = obs.xi_p(state, *operands)
    elif observable == "energy":
        value = obs.energy(state, *operands)
    else:
        raise ValueError(f"unknown observable {observable!r}; expected one of {OBSERVABLES}")
    return Measured(float(value), state.trusted, state.leakage)
