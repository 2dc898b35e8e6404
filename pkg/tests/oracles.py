"""Independent reference computations used by the tests.

Nothing here goes through the package's propagator, Wick or Fock code.
"""

import math

import numpy as np


def rk4_evolution(M: np.ndarray, t: float, steps: int = 20000) -> np.ndarray:
    """Integrate ``E' = M E`` from the identity with classical RK4."""
    E = np.eye(M.shape[0], dtype=complex)
    h = t / steps
    for _ in range(steps):
        k1 = M @ E
        k2 = M @ (E + 0.5 * h * k1)
        k3 = M @ (E + 0.5 * h * k2)
        k4 = M @ (E + h * k3)
        E = E + (h / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)
    return E


def hand_dynamical_matrix(wA, wB, d, eA, eB) -> np.ndarray:
    """Five-mode generator typed in from the equations of motion.

    Order: alpha_q, alpha_-q^dag, beta_q, beta_-q^dag, c^dag.
    """
    i = 1j
    return np.array(
        [
            [-i * wA, 0, 0, 0, -i * eA],
            [0, i * wA, 0, 0, i * eA],
            [0, 0, -i * wB, 0, -i * eB],
            [0, 0, 0, i * wB, i * eB],
            [i * eA, i * eA, i * eB, i * eB, -i * d],
        ]
    )


def ladder(cap: int) -> np.ndarray:
    return np.diag(np.sqrt(np.arange(1, cap + 1, dtype=float)), 1)


def three_mode_fock_hamiltonian(eA, eB, wA, wB, d, caps):
    """Dense H of (alpha_q, beta_q, c) with ``eta (c^dag x^dag + x c)`` couplings, built with kron."""
    a, b, c = (ladder(k) for k in caps)
    I = [np.eye(k + 1) for k in caps]
    A = np.kron(np.kron(a, I[1]), I[2])
    B = np.kron(np.kron(I[0], b), I[2])
    C = np.kron(np.kron(I[0], I[1]), c)
    H = wA * A.T @ A + wB * B.T @ B - d * C.T @ C
    pair = eA * C.T @ A.T + eB * C.T @ B.T
    return H + pair + pair.T, (A, B, C)


def coherent(cap: int, amp: complex) -> np.ndarray:
    n = np.arange(cap + 1)
    fact = np.array([math.factorial(int(k)) for k in n], float)
    return np.exp(-abs(amp) ** 2 / 2) * amp**n / np.sqrt(fact)
