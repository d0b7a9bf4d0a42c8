"""Analytic machinery for the linearized rotating-frame model.

Two equivalent state representations are used:

* real quadratures x = (Re da, Im da, Re b, Im b) driven by four
  unit-spectral-density real white noises -- the classical symmetrized
  picture integrated by the stochastic simulator;
* the complex operator basis v = (da, da^dag, b, b^dag) with
  non-symmetrized input correlators -- used for emission spectra and
  for comparisons against the Fock-space oracle.

Both derive from the same equations of motion:
    d(da)/dt = (i Delta - kappa/2) da - i g (b + b*) - sqrt(kappa) xi_a
    d(b)/dt  = (-i omega_b - gamma/2) b - i g (da + da*) - sqrt(gamma) xi_b
with g = g0 * abar and abar chosen real.
"""

from __future__ import annotations

import numpy as np
from scipy.linalg import expm


def drift_real(kappa: float, gamma: float, omega_b: float, Delta: float,
               g: float) -> np.ndarray:
    """Drift matrix of the real-quadrature 4-vector (Re da, Im da, Re b, Im b)."""
    return np.array([
        [-kappa / 2.0, -Delta, 0.0, 0.0],
        [Delta, -kappa / 2.0, -2.0 * g, 0.0],
        [0.0, 0.0, -gamma / 2.0, omega_b],
        [-2.0 * g, 0.0, -omega_b, -gamma / 2.0],
    ])


def noise_sigma_real(kappa: float, gamma: float, n_eq: float,
                     lf_noise_scale: float = 1.0) -> np.ndarray:
    """Input matrix mapping four unit-PSD white noises onto the state.

    The vacuum inputs xi = (w1 + i w2)/2 give quadrature spectral
    density 1 per combo (xi + xi*) and steady mode variance 1/2; the
    low-frequency channel carries the thermal scale sqrt(1 + 2 n_eq).
    lf_noise_scale = 0 disables the input-circuit intrinsic noise
    (used to isolate amplifier-added noise in a linear model).
    """
    s_b = lf_noise_scale * np.sqrt(1.0 + 2.0 * n_eq)
    return np.diag([-np.sqrt(kappa) / 2.0, -np.sqrt(kappa) / 2.0,
                    -s_b * np.sqrt(gamma) / 2.0, -s_b * np.sqrt(gamma) / 2.0])


def _lyapunov(A: np.ndarray, Q: np.ndarray) -> np.ndarray:
    """Solve A P + P A^T + Q = 0 by Kronecker linearization (plain
    transpose, valid for real and complex A alike)."""
    n = A.shape[0]
    eye = np.eye(n)
    K = np.kron(eye, A) + np.kron(A, eye)
    p = np.linalg.solve(K, -Q.flatten(order="F"))
    return p.reshape((n, n), order="F")


def steady_covariance_real(A: np.ndarray, Sigma: np.ndarray) -> np.ndarray:
    """Stationary covariance of the real-quadrature state."""
    return _lyapunov(A, Sigma @ Sigma.T)


def drift_complex(kappa: float, gamma: float, omega_b: float, Delta: float,
                  g: complex) -> np.ndarray:
    """Drift matrix in the operator basis (da, da^dag, b, b^dag).

    g = g0 * abar may be complex; conjugations follow the linearized
    interaction -i g0 (abar* da + abar da^dag)(b + b^dag).
    """
    gc = np.conj(g)
    return np.array([
        [1j * Delta - kappa / 2.0, 0.0, -1j * g, -1j * g],
        [0.0, -1j * Delta - kappa / 2.0, 1j * gc, 1j * gc],
        [-1j * gc, -1j * g, -1j * omega_b - gamma / 2.0, 0.0],
        [1j * gc, 1j * g, 0.0, 1j * omega_b - gamma / 2.0],
    ], dtype=complex)


def noise_complex(kappa: float, gamma: float, n_th: float) -> np.ndarray:
    """Noise-moment matrix N[i,j] = <in_i in_j> rates for the operator
    basis, from <a_in a_in^dag> = 1, <b_in b_in^dag> = n_th + 1 and
    <b_in^dag b_in> = n_th."""
    N = np.zeros((4, 4), dtype=complex)
    N[0, 1] = kappa
    N[2, 3] = gamma * (n_th + 1.0)
    N[3, 2] = gamma * n_th
    return N


def steady_moments_complex(A: np.ndarray, N: np.ndarray) -> np.ndarray:
    """Stationary operator moments M[i,j] = <v_i v_j>."""
    return _lyapunov(A, N)


def two_time_correlation(A: np.ndarray, M: np.ndarray,
                         taus: np.ndarray) -> np.ndarray:
    """C[k, i, j] = <v_i(tau_k) v_j(0)> = (e^{A tau_k} M)[i, j] for tau >= 0."""
    lam, V = np.linalg.eig(A)
    Vinv = np.linalg.inv(V)
    VM = Vinv @ M
    phases = np.exp(np.outer(np.asarray(taus), lam))  # (n_tau, 4)
    return np.einsum("il,kl,lj->kij", V, phases, VM)


def emission_spectrum_complex(A: np.ndarray, M: np.ndarray, taus: np.ndarray):
    """Incoherent emission spectrum of the microwave mode from the
    linear model: S(omega) = FT of <da^dag(tau) da(0)>, using
    C(-tau) = C(tau)^*.

    Returns (omega, S) on the FFT grid of the tau spacing.
    """
    C = two_time_correlation(A, M, taus)[:, 1, 0]  # <da^dag(tau) da(0)>
    return correlation_to_spectrum(np.asarray(taus), C)


def correlation_to_spectrum(taus: np.ndarray, C: np.ndarray):
    """Two-sided spectrum from a one-sided correlation with
    C(-tau) = C(tau)^*; plain FFT convention S(w) = int dt e^{i w t} C(t)."""
    n = len(taus)
    dt = taus[1] - taus[0]
    full = np.concatenate([C, np.zeros(1, dtype=complex), np.conj(C[:0:-1])])
    # order: tau = 0..T, (T+dt pad), -T..-dt  -- matches np.fft layout
    spec = np.fft.fft(full) * dt
    omega = -2.0 * np.pi * np.fft.fftfreq(len(full), d=dt)
    idx = np.argsort(omega)
    return omega[idx], spec[idx].real


def van_loan_discretization(A: np.ndarray, Qc: np.ndarray, dt: float):
    """Exact discretization of dx = A x dt + dW, <dW dW^T> = Qc dt.

    Returns (E, Qd) with E = e^{A dt} and
    Qd = int_0^dt e^{A s} Qc e^{A^T s} ds (Van Loan block-exponential).
    """
    n = A.shape[0]
    block = np.zeros((2 * n, 2 * n))
    block[:n, :n] = -A
    block[:n, n:] = Qc
    block[n:, n:] = A.T
    F = expm(block * dt)
    E = F[n:, n:].T
    Qd = E @ F[:n, n:]
    return E, Qd


def psd_sqrt(Q: np.ndarray) -> np.ndarray:
    """Symmetric square root of a PSD matrix via eigh, tolerant of
    eigenvalues at numerical zero."""
    w, V = np.linalg.eigh((Q + Q.T) / 2.0)
    w = np.clip(w, 0.0, None)
    return V @ np.diag(np.sqrt(w))
