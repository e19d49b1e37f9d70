"""Polarization-resolved coincidence simulation and state reconstruction.

Simulates the counting experiments used to characterize the two-photon
state: the six co/cross-polarized correlation measurements that yield a
fidelity estimate, and the full 16-setting product-projector tomography
reconstructed by maximum likelihood.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field

import numpy as np

from .linalg import SIGMA_X, SIGMA_Y, SIGMA_Z, assert_density_matrix, tensor

_SQRT2 = np.sqrt(2.0)

# Fixed polarization convention: D = (H+V)/sqrt2, A = (H-V)/sqrt2,
# R = (H+iV)/sqrt2, L = (H-iV)/sqrt2.
POLARIZATION_KETS = {
    "H": np.array([1.0, 0.0], dtype=complex),
    "V": np.array([0.0, 1.0], dtype=complex),
    "D": np.array([1.0, 1.0], dtype=complex) / _SQRT2,
    "A": np.array([1.0, -1.0], dtype=complex) / _SQRT2,
    "R": np.array([1.0, 1j], dtype=complex) / _SQRT2,
    "L": np.array([1.0, -1j], dtype=complex) / _SQRT2,
}

SIX_BASIS_LABELS = ("HH", "HV", "DD", "DA", "RR", "RL")
SIXTEEN_BASIS_LABELS = tuple(a + b for a in "HVDR" for b in "HVDR")

MLE_DEFAULT_MAX_ITERATIONS = 100_000
MLE_DEFAULT_TOL = 1e-10


class InsufficientSettingsError(ValueError):
    """Settings do not span the state space needed for full reconstruction."""


class ZeroCountsError(ValueError):
    """Visibility is undefined because both records have zero counts."""


@dataclass(frozen=True)
class BasisSetting:
    """Analyzer states for the two arms; the first letter of the label is
    the first-photon arm, the second letter the second-photon arm."""

    projector_xx: np.ndarray
    projector_x: np.ndarray
    label: str

    def product_ket(self) -> np.ndarray:
        return tensor(self.projector_xx, self.projector_x)


@dataclass
class CountRecord:
    setting: BasisSetting
    counts: int
    acquisition_weight: float = 1.0

    def __post_init__(self) -> None:
        if self.counts < 0:
            raise ValueError("counts must be >= 0")
        if not self.acquisition_weight > 0:
            raise ValueError("acquisition_weight must be > 0")


@dataclass
class ReconstructionResult:
    rho: np.ndarray
    log_likelihood: float
    iterations: int
    converged: bool
    history: np.ndarray = field(default=None, repr=False)


def setting_from_label(label: str) -> BasisSetting:
    if len(label) != 2 or any(ch not in POLARIZATION_KETS for ch in label):
        raise ValueError(f"unknown polarization label {label!r}")
    return BasisSetting(POLARIZATION_KETS[label[0]], POLARIZATION_KETS[label[1]], label)


def standard_settings(mode: str) -> list[BasisSetting]:
    """Measurement settings for the two standard acquisition modes.

    "six_basis" gives the co/cross pairs of the three mutually unbiased
    bases (HH, HV, DD, DA, RR, RL); "sixteen_basis" the {H, V, D, R} product
    grid used for full tomography.
    """
    if mode == "six_basis":
        labels = SIX_BASIS_LABELS
    elif mode == "sixteen_basis":
        labels = SIXTEEN_BASIS_LABELS
    else:
        raise ValueError("mode must be 'six_basis' or 'sixteen_basis'")
    return [setting_from_label(label) for label in labels]


def expected_probability(rho, setting: BasisSetting) -> float:
    """Born-rule probability of a coincidence in the given setting."""
    projector = setting.product_ket()
    return float(np.real(projector.conj() @ np.asarray(rho, dtype=complex) @ projector))


def simulate_counts(rho, settings, n_per_setting: int, seed: int = 0,
                    poisson: bool = False) -> list[CountRecord]:
    """Coincidence counts for each setting.

    The expectation is n_per_setting times the Born-rule probability. With
    poisson=True the counts are Poisson draws around that mean, reproducible
    for a given seed; otherwise the rounded expectations are returned.
    """
    rho = assert_density_matrix(rho)
    if n_per_setting <= 0:
        raise ValueError("n_per_setting must be > 0")
    means = np.array([max(expected_probability(rho, s), 0.0) for s in settings])
    means *= n_per_setting
    if poisson:
        rng = np.random.Generator(np.random.Philox(key=seed))
        values = rng.poisson(means)
    else:
        values = np.round(means)
    return [CountRecord(s, int(v)) for s, v in zip(settings, values)]


def visibility(co: CountRecord, cross: CountRecord) -> float:
    """(co - cross)/(co + cross) on weight-normalized count rates."""
    if co.counts + cross.counts <= 0:
        raise ZeroCountsError("both records have zero counts")
    rate_co = co.counts / co.acquisition_weight
    rate_cross = cross.counts / cross.acquisition_weight
    return float((rate_co - rate_cross) / (rate_co + rate_cross))


def fidelity_from_visibilities(c_hv: float, c_da: float, c_rl: float) -> float:
    """Bell-state fidelity estimator f = (1 + c_hv + c_da - c_rl)/4.

    Exact when the inputs are the full polarization correlations of the
    state (see :func:`correlation_visibilities`); clamped to [0, 1].
    """
    for name, value in (("c_hv", c_hv), ("c_da", c_da), ("c_rl", c_rl)):
        if not -1.0 <= value <= 1.0:
            raise ValueError(f"{name} must lie in [-1, 1]")
    return min(max(0.25 * (1.0 + c_hv + c_da - c_rl), 0.0), 1.0)


def correlation_visibilities(rho) -> tuple[float, float, float]:
    """Exact polarization correlations (c_hv, c_da, c_rl) of a state.

    These are the expectation values of sz(x)sz, sx(x)sx and sy(x)sy, the
    quantities the co/cross count ratios estimate. Feeding them to
    :func:`fidelity_from_visibilities` reproduces the Bell-state fidelity
    identically for any density matrix.
    """
    rho = assert_density_matrix(rho)
    c_hv = float(np.real(np.trace(tensor(SIGMA_Z, SIGMA_Z) @ rho)))
    c_da = float(np.real(np.trace(tensor(SIGMA_X, SIGMA_X) @ rho)))
    c_rl = float(np.real(np.trace(tensor(SIGMA_Y, SIGMA_Y) @ rho)))
    return c_hv, c_da, c_rl


# Lower-triangular parametrization rho = T^dag T / Tr(T^dag T): 4 real
# diagonal entries followed by (re, im) pairs for the 6 sub-diagonal ones.
_PARAM_ENTRIES: list[tuple[int, int, complex]] = [(i, i, 1.0 + 0j) for i in range(4)]
for _row in range(4):
    for _col in range(_row):
        _PARAM_ENTRIES.append((_row, _col, 1.0 + 0j))
        _PARAM_ENTRIES.append((_row, _col, 1j))
_P_ROWS = np.array([e[0] for e in _PARAM_ENTRIES])
_P_COLS = np.array([e[1] for e in _PARAM_ENTRIES])
_P_COEF = np.array([e[2] for e in _PARAM_ENTRIES])

_PROB_FLOOR = 1e-300


def _triangular(theta: np.ndarray) -> np.ndarray:
    t = np.zeros((4, 4), dtype=complex)
    np.add.at(t, (_P_ROWS, _P_COLS), theta * _P_COEF)
    return t


def _rho_of(theta: np.ndarray) -> np.ndarray:
    t = _triangular(theta)
    gram = t.conj().T @ t
    return gram / np.trace(gram).real


def _probabilities(theta: np.ndarray, projectors: np.ndarray) -> np.ndarray:
    rho = _rho_of(theta)
    probs = np.real(np.einsum("ia,ab,ib->i", projectors.conj(), rho, projectors))
    return np.clip(probs, _PROB_FLOOR, None)


def _log_likelihood(theta, projectors, counts, weights) -> float:
    # Poisson likelihood with the overall flux profiled out, up to a
    # counts-only constant.
    probs = _probabilities(theta, projectors)
    total = counts.sum()
    return float(counts @ np.log(probs) - total * np.log(weights @ probs))


def _gradient(theta, projectors, counts, weights) -> np.ndarray:
    t = _triangular(theta)
    gram = t.conj().T @ t
    scale = np.trace(gram).real
    rho = gram / scale
    probs = np.real(np.einsum("ia,ab,ib->i", projectors.conj(), rho, projectors))
    probs = np.clip(probs, _PROB_FLOOR, None)
    total = counts.sum()
    dll_dp = counts / probs - total * weights / (weights @ probs)
    mapped = projectors @ t.T  # row i is T pi_i
    # d p_i / d theta_k for the entry (a_k, b_k) with coefficient c_k:
    #   (2 Re(conj((T pi_i)_a) c_k (pi_i)_b) - p_i 2 Re(conj(T_ab) c_k)) / scale
    pair = np.conj(mapped)[:, _P_ROWS] * projectors[:, _P_COLS] * _P_COEF
    trace_part = 2.0 * np.real(np.conj(t[_P_ROWS, _P_COLS]) * _P_COEF)
    dp = (2.0 * np.real(pair) - probs[:, None] * trace_part[None, :]) / scale
    return dll_dp @ dp


def mle_reconstruct(records, max_iterations: int = MLE_DEFAULT_MAX_ITERATIONS,
                    tol: float = MLE_DEFAULT_TOL) -> ReconstructionResult:
    """Maximum-likelihood density matrix from coincidence records.

    The state is parametrized as rho = T^dag T / Tr(T^dag T) with T lower
    triangular, so every iterate is physical by construction. A Poisson
    log-likelihood (overall flux profiled out) is maximized by gradient
    ascent with a backtracking step, starting from the maximally mixed
    state. Iterations stop when the improvement drops below ``tol``; if the
    iteration budget runs out first the best iterate is returned with
    converged=False.

    Requires at least 16 linearly independent projectors; six-basis input
    is rejected.
    """
    records = list(records)
    if len(records) < 16:
        raise InsufficientSettingsError(
            f"full reconstruction needs >= 16 settings, got {len(records)}"
        )
    projectors = np.array([r.setting.product_ket() for r in records])
    operators = np.array([np.outer(p, p.conj()).ravel() for p in projectors])
    if np.linalg.matrix_rank(operators, tol=1e-10) < 16:
        raise InsufficientSettingsError(
            "settings do not span the state space (16 linearly independent "
            "projectors required)"
        )
    counts = np.array([float(r.counts) for r in records])
    weights = np.array([float(r.acquisition_weight) for r in records])

    theta = np.zeros(len(_PARAM_ENTRIES))
    theta[:4] = 0.5  # T = I/2, the maximally mixed starting point
    ll = _log_likelihood(theta, projectors, counts, weights)
    history = [ll]
    step = 1e-3
    iterations = 0
    converged = False
    while iterations < max_iterations:
        iterations += 1
        grad = _gradient(theta, projectors, counts, weights)
        grad_norm = np.linalg.norm(grad)
        if grad_norm == 0.0:
            converged = True
            break
        direction = grad / grad_norm
        improved = False
        while step >= 1e-18:
            candidate = theta + step * direction
            candidate_ll = _log_likelihood(candidate, projectors, counts, weights)
            if candidate_ll > ll:
                theta, ll = candidate, candidate_ll
                step *= 1.6
                improved = True
                break
            step *= 0.5
        history.append(ll)
        if not improved:
            # No improving step at floating-point resolution: local optimum.
            converged = True
            break
        if history[-1] - history[-2] < tol:
            converged = True
            break
    return ReconstructionResult(
        rho=_rho_of(theta),
        log_likelihood=ll,
        iterations=iterations,
        converged=converged,
        history=np.array(history),
    )


def save_count_records_csv(records, path) -> None:
    """Write records as CSV with the header row label,counts,weight."""
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["label", "counts", "weight"])
        for record in records:
            writer.writerow([
                record.setting.label,
                record.counts,
                repr(float(record.acquisition_weight)),
            ])


def load_count_records_csv(path) -> list[CountRecord]:
    """Read count records written by :func:`save_count_records_csv`."""
    with open(path, encoding="utf-8", newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames != ["label", "counts", "weight"]:
            raise ValueError("expected CSV header label,counts,weight")
        return [
            CountRecord(
                setting_from_label(row["label"]),
                int(row["counts"]),
                float(row["weight"]),
            )
            for row in reader
        ]
