"""Biexciton-exciton cascade model under frozen nuclear spin noise.

The bright exciton doublet is split by the fine-structure splitting ``s``
and shifted by a random Overhauser field ``h_z`` that is constant within a
single emission event (the nuclear bath moves on ~100 us timescales, far
slower than the ~100 ps radiative decay). The relative phase accrued over
the emission delay dephases the two-photon polarization state once delays
and shifts are averaged over.

Unit conventions: energies in micro-eV (ueV), times in ps, except where a
field name says otherwise (``t2_star`` in ns, ``tau_s`` in us). The reduced
Planck constant in these units is :data:`~qdcascade.linalg.HBAR_UEV_PS`.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np
from scipy.special import ndtri

from .linalg import (
    HBAR_UEV_PS,
    IDENTITY_2,
    IDENTITY_4,
    assert_density_matrix,
    eig_hermitian,
    tensor,
    unitary_exp,
)

PS_PER_NS = 1e3
PS_PER_US = 1e6

QUADRATURE_MODES = ("monte_carlo", "gauss_hermite")
COMPOSITION_VARIANTS = ("quadratic", "linear")

# Agreement required between an explicit sigma and the one implied by a
# simultaneously given T2*, in ueV.
SIGMA_MATCH_TOL = 1e-6


def sigma_from_t2star(t2_star_ns: float) -> float:
    """Overhauser standard deviation sigma = hbar / T2*, in ueV for T2* in ns."""
    if not t2_star_ns > 0:
        raise ValueError("t2_star must be > 0")
    return HBAR_UEV_PS / (t2_star_ns * PS_PER_NS)


def k_from_g2(g2_xx: float, g2_x: float, eta_p: float) -> float:
    """Single-pair fraction from the two autocorrelations and the inversion
    efficiency: k = 1 - (g2_xx + g2_x)/2 * eta_p.

    The closed interval [0, 1] is accepted for the autocorrelations so the
    degenerate bound k = 0 stays representable.
    """
    for name, value in (("g2_xx", g2_xx), ("g2_x", g2_x)):
        if not 0.0 <= value <= 1.0:
            raise ValueError(f"{name} must lie in [0, 1]")
    if not 0.0 < eta_p <= 1.0:
        raise ValueError("eta_p must lie in (0, 1]")
    return 1.0 - 0.5 * (g2_xx + g2_x) * eta_p


def coherence_loss(t1_ps: float, t2_star_ns: float) -> float:
    """Time-averaged exciton coherence loss 1 - exp(-(T1/T2*)^2)."""
    if not t1_ps > 0:
        raise ValueError("t1 must be > 0")
    if not t2_star_ns > 0:
        raise ValueError("t2_star must be > 0")
    ratio = t1_ps / (t2_star_ns * PS_PER_NS)
    return float(-np.expm1(-(ratio * ratio)))


def analytic_fidelity(s: float, sigma: float, t1: float, k: float) -> float:
    """Closed-form estimate of the time-averaged Bell-state fidelity.

    f = (1 + k + 2k / (1 + 4 T1^2 (s^2 + sigma^2) / hbar^2)) / 4.

    This replaces the average of the Lorentzian coherence factor over the
    shift distribution by a single Lorentzian of the combined broadening, so
    it sits below the quadrature average for broad spin noise. The CLI
    reports both values side by side.
    """
    if s < 0 or sigma < 0 or t1 < 0:
        raise ValueError("s, sigma and t1 must be >= 0")
    if not 0.0 < k <= 1.0:
        raise ValueError("k must lie in (0, 1]")
    lorentz = 1.0 / (1.0 + 4.0 * t1 * t1 * (s * s + sigma * sigma) / HBAR_UEV_PS**2)
    return 0.25 * (1.0 + k + 2.0 * k * lorentz)


@dataclass(frozen=True)
class NuclearSpecies:
    """One nuclear species in contact with the electron wavefunction.

    fraction: abundance x_n, dimensionless, in [0, 1].
    hyperfine: coupling constant A_n, ueV.
    spin: nuclear spin I_n, half-integer > 0.
    """

    fraction: float
    hyperfine: float
    spin: float

    def __post_init__(self) -> None:
        if not 0.0 <= self.fraction <= 1.0:
            raise ValueError("fraction must lie in [0, 1]")
        if not self.hyperfine > 0:
            raise ValueError("hyperfine must be > 0")
        if not self.spin > 0 or round(2 * self.spin) != 2 * self.spin:
            raise ValueError("spin must be a positive half-integer")


@dataclass(frozen=True)
class SpeciesParams:
    """Nuclear composition: species list plus the number of nuclei N."""

    species: tuple[NuclearSpecies, ...]
    n_nuclei: float

    def __post_init__(self) -> None:
        object.__setattr__(self, "species", tuple(self.species))
        if not self.species:
            raise ValueError("at least one species is required")
        if not self.n_nuclei > 0:
            raise ValueError("n_nuclei must be > 0")
        total = sum(sp.fraction for sp in self.species)
        if abs(total - 1.0) > 1e-9:
            raise ValueError(f"species fractions sum to {total!r}, expected 1")


def sigma_from_composition(species: SpeciesParams, variant: str = "quadratic") -> float:
    """Spin-bath sigma from the nuclear composition.

    variant "quadratic": sigma = sqrt(sum x_n A_n^2 I_n(I_n+1) / N), which is
    dimensionally consistent (result in ueV). variant "linear" keeps A_n to
    the first power, as the expression is sometimes quoted; its result is
    labelled ueV for comparison purposes only.
    """
    if variant not in COMPOSITION_VARIANTS:
        raise ValueError(f"variant must be one of {COMPOSITION_VARIANTS}")
    power = 2 if variant == "quadratic" else 1
    acc = sum(sp.fraction * sp.hyperfine**power * sp.spin * (sp.spin + 1.0) for sp in species.species)
    return float(np.sqrt(acc / species.n_nuclei))


@dataclass(frozen=True)
class PhysicalParams:
    """Model inputs for one quantum dot.

    s: fine-structure splitting, ueV, >= 0.
    t1: exciton radiative lifetime, ps, > 0.
    sigma: Overhauser standard deviation, ueV. May be omitted when t2_star
        is given; if both are given they must agree via sigma = hbar/T2*.
    t2_star: inhomogeneous electron spin coherence time, ns.
    k: fraction of cycles with at most one photon pair, in (0, 1]. May be
        omitted when g2_xx, g2_x and eta_p are all given instead.
    t1_xx: biexciton lifetime, ps. Metadata only, unused by the model.
    tau_s: nuclear spin correlation time, us. Metadata; a warning is issued
        when it undercuts the frozen-spin assumption tau_s >> T1.
    """

    s: float
    t1: float
    sigma: float | None = None
    t2_star: float | None = None
    k: float | None = None
    g2_xx: float | None = None
    g2_x: float | None = None
    eta_p: float | None = None
    t1_xx: float | None = None
    tau_s: float | None = None

    def __post_init__(self) -> None:
        if self.s < 0:
            raise ValueError("s must be >= 0")
        if not self.t1 > 0:
            raise ValueError("t1 must be > 0")
        if self.sigma is None and self.t2_star is None:
            raise ValueError("provide sigma or t2_star")
        if self.sigma is not None and self.sigma < 0:
            raise ValueError("sigma must be >= 0")
        if self.t2_star is not None:
            implied = sigma_from_t2star(self.t2_star)
            if self.sigma is None:
                object.__setattr__(self, "sigma", implied)
            elif abs(self.sigma - implied) > SIGMA_MATCH_TOL:
                raise ValueError(
                    f"sigma={self.sigma} disagrees with hbar/T2* = {implied:.6f} ueV"
                )
        g2_inputs = (self.g2_xx, self.g2_x, self.eta_p)
        if self.k is None:
            if any(x is None for x in g2_inputs):
                raise ValueError("provide k, or all of g2_xx, g2_x and eta_p")
            object.__setattr__(self, "k", k_from_g2(self.g2_xx, self.g2_x, self.eta_p))
        elif any(x is not None for x in g2_inputs):
            raise ValueError("give either k or the g2/eta_p inputs, not both")
        if not 0.0 < self.k <= 1.0:
            raise ValueError("k must lie in (0, 1]")
        if self.t1_xx is not None and not self.t1_xx > 0:
            raise ValueError("t1_xx must be > 0")
        if self.tau_s is not None:
            if not self.tau_s > 0:
                raise ValueError("tau_s must be > 0")
            if self.tau_s * PS_PER_US < 100.0 * self.t1:
                warnings.warn(
                    "tau_s is below 100 T1; the frozen-spin approximation is "
                    "questionable for this dot",
                    stacklevel=2,
                )


@dataclass(frozen=True)
class SimConfig:
    """Averaging controls.

    n_samples: Monte Carlo draws of the Overhauser shift.
    seed: 64-bit seed for the counter-based sampler.
    window: coincidence window in ps; None averages over all emission times.
    quadrature: "monte_carlo" or "gauss_hermite".
    gh_order: Gauss-Hermite order, used only in gauss_hermite mode.
    """

    n_samples: int = 200_000
    seed: int = 1234
    window: float | None = None
    quadrature: str = "monte_carlo"
    gh_order: int = 32

    def __post_init__(self) -> None:
        if self.n_samples < 1:
            raise ValueError("n_samples must be >= 1")
        if not 0 <= self.seed < 2**64:
            raise ValueError("seed must be an unsigned 64-bit integer")
        if self.window is not None and not self.window > 0:
            raise ValueError("window must be > 0")
        if self.quadrature not in QUADRATURE_MODES:
            raise ValueError(f"quadrature must be one of {QUADRATURE_MODES}")
        if not 3 <= self.gh_order <= 64:
            raise ValueError("gh_order must lie in [3, 64]")


def build_hamiltonian(s: float, h_z: float) -> np.ndarray:
    """Bright-exciton Hamiltonian in the linear polarization basis, ueV.

    The splitting enters on the diagonal as +-s/2 and the Overhauser shift
    couples the two states off-diagonally with the phase that keeps the
    matrix Hermitian: [[s/2, i h_z], [-i h_z, -s/2]].
    """
    if s < 0:
        raise ValueError("s must be >= 0")
    return np.array([[0.5 * s, 1j * h_z], [-1j * h_z, -0.5 * s]], dtype=complex)


def exciton_eigensystem(h) -> tuple[np.ndarray, np.ndarray, float]:
    """Orthonormal exciton eigenstates (upper, lower) and splitting delta_e >= 0."""
    h = np.asarray(h, dtype=complex)
    if h.shape != (2, 2):
        raise ValueError("exciton_eigensystem expects a 2x2 matrix")
    w, v = eig_hermitian(h)
    return v[:, 0].copy(), v[:, 1].copy(), float(w[0].real - w[1].real)


def two_photon_state(j, l, delta_e: float, t: float) -> np.ndarray:
    """Cascade two-photon ket for orthonormal exciton eigenstates j and l.

    The first tensor slot (first emitted photon) carries the complex
    conjugates of the exciton states; the branch through l accrues the
    relative phase exp(-i delta_e t / hbar) over the emission delay t.
    """
    j = np.asarray(j, dtype=complex)
    l = np.asarray(l, dtype=complex)
    phase = np.exp(-1j * delta_e * t / HBAR_UEV_PS)
    return (tensor(j.conj(), j) + phase * tensor(l.conj(), l)) / np.sqrt(2.0)


def propagate_rho(rho0, h, t: float) -> np.ndarray:
    """Evolve a two-photon density matrix over the emission delay t.

    Only the second slot (the photon still stored as the exciton) evolves:
    rho(t) = (I (x) U) rho0 (I (x) U)^dag with U = exp(-i h t / hbar).
    """
    rho0 = assert_density_matrix(rho0)
    gate = tensor(IDENTITY_2, unitary_exp(np.asarray(h, dtype=complex), t))
    return gate @ rho0 @ gate.conj().T


def _expm1_ratio(x: np.ndarray) -> np.ndarray:
    """(1 - exp(-x)) / x elementwise for complex x, series branch near zero."""
    x = np.asarray(x, dtype=complex)
    out = np.empty_like(x)
    small = np.abs(x) < 1e-4
    xs = x[small]
    out[small] = 1.0 - xs / 2.0 + xs * xs / 6.0 - xs * xs * xs / 24.0
    xl = x[~small]
    out[~small] = (1.0 - np.exp(-xl)) / xl
    return out


def emission_phase_average(delta, t1: float, window: float | None = None):
    """Average of exp(-i delta t / hbar) over the exciton emission delay.

    The delay density is exp(-t/T1)/T1, truncated and renormalized to
    [0, window] when a coincidence window is given. Accepts a scalar or an
    array of splittings delta (ueV) and returns matching complex values.
    """
    scalar = np.ndim(delta) == 0
    delta = np.atleast_1d(np.asarray(delta, dtype=float))
    rate = 1.0 / t1 + 1j * delta / HBAR_UEV_PS
    if window is None:
        g = 1.0 / (rate * t1)
    else:
        g = _expm1_ratio(rate * window) / _expm1_ratio(np.atleast_1d(window / t1 + 0j))
    return complex(g[0]) if scalar else g


def _branch_pair_vectors(s: float, shifts: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Photon-pair basis vectors through the upper and lower exciton branch.

    Vectorized over the Overhauser shifts; returns (u, v) of shape (n, 4)
    where u_n = conj(j_n) (x) j_n for the upper eigenstate j_n and v_n the
    same through the lower one. These pair vectors are gauge invariant, so
    no eigenvector phase convention is needed here.
    """
    half = 0.5 * s
    energy = np.sqrt(half * half + shifts * shifts)
    a = half + energy
    norm = np.sqrt(a * a + shifts * shifts)
    degenerate = norm == 0.0  # only at s == 0 and h_z == 0
    safe = np.where(degenerate, 1.0, norm)
    j1 = np.where(degenerate, 1.0, a / safe).astype(complex)
    j2 = -1j * (shifts / safe)
    # The lower eigenstate is the orthogonal partner (j2, j1).
    l1, l2 = j2, j1
    u = np.stack([j1.conj() * j1, j1.conj() * j2, j2.conj() * j1, j2.conj() * j2], axis=1)
    v = np.stack([l1.conj() * l1, l1.conj() * l2, l2.conj() * l1, l2.conj() * l2], axis=1)
    return u, v


def _averaged_rho(s: float, shifts: np.ndarray, t1: float, window: float | None,
                  weights: np.ndarray) -> np.ndarray:
    """Weighted average over shifts of the emission-time averaged state."""
    shifts = np.asarray(shifts, dtype=float)
    weights = np.asarray(weights, dtype=float)
    u, v = _branch_pair_vectors(s, shifts)
    delta = 2.0 * np.sqrt((0.5 * s) ** 2 + shifts * shifts)
    g = emission_phase_average(delta, t1, window)
    uu = (u * weights[:, None]).T @ u.conj()
    vv = (v * weights[:, None]).T @ v.conj()
    cross = (u * (weights * g)[:, None]).T @ v.conj()
    rho = 0.5 * (uu + vv + cross + cross.conj().T)
    return 0.5 * (rho + rho.conj().T)


def time_averaged_rho(s: float, h_z: float, t1: float, window: float | None = None) -> np.ndarray:
    """Two-photon density matrix at fixed shift, averaged over emission times.

    The average runs over the exponential delay density exp(-t/T1)/T1, up to
    the coincidence window when one is given. Computed in the exciton
    eigenbasis through the closed-form phase average and rotated back.
    """
    if s < 0:
        raise ValueError("s must be >= 0")
    if not t1 > 0:
        raise ValueError("t1 must be > 0")
    if window is not None and not window > 0:
        raise ValueError("window must be > 0")
    return _averaged_rho(s, np.array([float(h_z)]), t1, window, np.array([1.0]))


def overhauser_samples(seed: int, n: int, sigma: float, start: int = 0) -> np.ndarray:
    """Deterministic Gaussian Overhauser shifts h_z ~ N(0, sigma), in ueV.

    Sample i is a pure function of (seed, start + i): it is derived from
    Philox counter block start + i keyed by the seed, so any contiguous
    chunk reproduces the matching slice of the full stream regardless of
    how the work is partitioned.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    if sigma < 0:
        raise ValueError("sigma must be >= 0")
    if start < 0:
        raise ValueError("start must be >= 0")
    bitgen = np.random.Philox(key=seed)
    if start:
        bitgen.advance(start)  # Philox advances whole 4-word counter blocks
    raw = bitgen.random_raw(4 * n)[::4]
    # Map the top 52 bits to the open interval (0, 1); ndtri stays finite.
    uniforms = ((raw >> np.uint64(12)).astype(np.float64) + 0.5) * 2.0**-52
    return sigma * ndtri(uniforms)


def monte_carlo_rho(params: PhysicalParams, config: SimConfig) -> np.ndarray:
    """Spin-noise averaged two-photon density matrix.

    Averages :func:`time_averaged_rho` over Overhauser shifts drawn from
    N(0, sigma). Monte Carlo mode uses the counter-based sampler and is
    bitwise deterministic for a given (seed, n_samples); gauss_hermite mode
    integrates the same Gaussian with deterministic quadrature nodes. The
    multi-pair mixing channel is not applied here, see
    :func:`apply_multipair_mixing`.
    """
    if params.sigma == 0.0:
        return time_averaged_rho(params.s, 0.0, params.t1, config.window)
    if config.quadrature == "gauss_hermite":
        nodes, gh_weights = np.polynomial.hermite.hermgauss(config.gh_order)
        shifts = np.sqrt(2.0) * params.sigma * nodes
        weights = gh_weights / np.sqrt(np.pi)
    else:
        shifts = overhauser_samples(config.seed, config.n_samples, params.sigma)
        weights = np.full(shifts.size, 1.0 / shifts.size)
    return _averaged_rho(params.s, shifts, params.t1, config.window, weights)


def apply_multipair_mixing(rho, k: float) -> np.ndarray:
    """Mix with the maximally mixed state: k rho + (1 - k)/4 I."""
    rho = assert_density_matrix(rho)
    if not 0.0 < k <= 1.0:
        raise ValueError("k must lie in (0, 1]")
    return k * rho + (1.0 - k) * 0.25 * IDENTITY_4
