"""Shared test helpers: random states and fixed-step ODE oracles."""

from __future__ import annotations

import numpy as np

from qdcascade.linalg import HBAR_UEV_PS


def random_density_matrix(rng: np.random.Generator, dim: int = 4) -> np.ndarray:
    """Ginibre-random full-rank density matrix."""
    a = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    rho = a @ a.conj().T
    return rho / np.trace(rho).real


def random_pure_state(rng: np.random.Generator, dim: int = 4) -> np.ndarray:
    psi = rng.normal(size=dim) + 1j * rng.normal(size=dim)
    return psi / np.linalg.norm(psi)


def random_unitary(rng: np.random.Generator, dim: int = 2) -> np.ndarray:
    """Haar-random unitary via phase-fixed QR."""
    a = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    q, r = np.linalg.qr(a)
    return q * (np.diag(r) / np.abs(np.diag(r)))


def rk4_density_batch(rho0: np.ndarray, h_total: np.ndarray, t: np.ndarray,
                      n_steps: int) -> np.ndarray:
    """Fixed-step RK4 for i hbar d rho/dt = [H, rho], batched over axis 0.

    Independent of the closed-form propagator under test: integrates the
    commutator equation directly.
    """
    rho = np.array(rho0, dtype=complex)
    dt = (np.asarray(t, dtype=float) / n_steps).reshape(-1, 1, 1)

    def rhs(r):
        return (-1j / HBAR_UEV_PS) * (h_total @ r - r @ h_total)

    for _ in range(n_steps):
        k1 = rhs(rho)
        k2 = rhs(rho + 0.5 * dt * k1)
        k3 = rhs(rho + 0.5 * dt * k2)
        k4 = rhs(rho + dt * k3)
        rho = rho + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
    return rho


def rk4_unitary(h: np.ndarray, t: float, n_steps: int) -> np.ndarray:
    """Fixed-step RK4 for i hbar dU/dt = H U starting from the identity."""
    u = np.eye(h.shape[0], dtype=complex)
    dt = t / n_steps

    def rhs(m):
        return (-1j / HBAR_UEV_PS) * (h @ m)

    for _ in range(n_steps):
        k1 = rhs(u)
        k2 = rhs(u + 0.5 * dt * k1)
        k3 = rhs(u + 0.5 * dt * k2)
        k4 = rhs(u + dt * k3)
        u = u + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
    return u
