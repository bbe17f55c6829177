"""First-order quantum averaging for the resonantly driven Landau problem.

Index bookkeeping for the degenerate quasienergy, the averaged blocks A_s,
the generator W_1(0) of the averaging transformation, and the resulting
averaged energy growth and acceleration rate.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass

import numpy as np

from . import jacobi
from .landau import dHdp_matrix, energy, ratio_matrix
from .params import DriveSpec, ModelParams

log = logging.getLogger(__name__)


def index_forward(m, n, mu):
    """(m, n) -> (k, l) = (mu m + n, floor(n / mu))."""
    if n < 0:
        raise ValueError("n must be nonnegative")
    return mu * m + n, n // mu


def index_inverse(k, ell, mu):
    """(k, l) -> (m, n) = (floor(k/mu) - l, mu l + (k mod mu))."""
    if ell < 0:
        raise ValueError("ell must be nonnegative")
    return k // mu - ell, mu * ell + k % mu


def block_level(k, params: ModelParams):
    """lambda_k = hbar omega_c (k + p + 1/2), the k-th unperturbed quasienergy."""
    return params.energy_quantum * (k + params.p + 0.5)


def fourier_coeff(drive, j, samples=256):
    """j-th Fourier coefficient (2pi)^-1 int_0^{2pi} exp(-i j s) f(s) ds.

    ``drive`` is a DriveSpec, the name ``"sin"``, or a 2pi-periodic callable
    (integrated with the periodic trapezoidal rule).
    """
    if isinstance(drive, str):
        if drive != "sin":
            raise ValueError(f"unknown named drive {drive!r}")
        drive = DriveSpec.sine()
    if isinstance(drive, DriveSpec):
        return drive.coefficient(j)
    s = 2.0 * np.pi * np.arange(samples) / samples
    f = np.asarray([drive(x) for x in s], dtype=float)
    return complex(np.mean(np.exp(-1j * j * s) * f))


def a_matrix(s, params: ModelParams, size, drive: DriveSpec | None = None):
    """Averaged block A_s truncated to size x size (indices l = 0 .. size-1)."""
    if size < 2:
        raise ValueError("size must be at least 2")
    drive = DriveSpec.sine() if drive is None else drive
    ell = np.arange(size)
    n = np.array([index_inverse(s, l, params.mu)[1] for l in ell])
    lg_ratio = ratio_matrix(params.p, int(n.max()) + 1)[np.ix_(n, n)]
    shift = ell[None, :] - ell[:, None]
    coeff = np.zeros((size, size), dtype=complex)
    for j, c in drive.harmonics.items():
        coeff[shift == j] = c
    return 0.5 * params.energy_quantum * coeff * lg_ratio


def w1_matrix(params: ModelParams, drive: DriveSpec | None = None, t=0.0, derivative=False):
    """Matrix of <phi_n1, W_1(t) phi_n2> (or of its time derivative), n <= n_max.

    Each harmonic j contributes F[f](j) exp(i Omega j t) dH_{n1 n2} /
    (hbar omega_c (mu j + n1 - n2)), resonant combinations excluded.
    """
    drive = DriveSpec.sine() if drive is None else drive
    size = params.n_max + 1
    n = np.arange(size)
    dH = dHdp_matrix(params.p, size, params)
    diff = n[:, None] - n[None, :]
    W = np.zeros((size, size), dtype=complex)
    for j, c in drive.harmonics.items():
        denom = params.mu * j + diff
        factor = c * np.exp(1j * params.omega * j * t)
        if derivative:
            factor *= 1j * params.omega * j
        with np.errstate(divide="ignore", invalid="ignore"):
            term = np.where(denom != 0, factor / (params.energy_quantum * denom), 0.0)
        W += term
    return W * dH


def offdiag_k1(params: ModelParams, drive: DriveSpec | None = None, t=0.0):
    """Off-diagonal part of K_1 = f(Omega t) dH/dp at time t, as an n x n matrix.

    The full operator is f(Omega t) dH/dp; the block-diagonal part keeps
    only the harmonics with mu j + n1 - n2 = 0.
    """
    drive = DriveSpec.sine() if drive is None else drive
    size = params.n_max + 1
    n = np.arange(size)
    diff = n[:, None] - n[None, :]
    dH = dHdp_matrix(params.p, size, params)
    full = drive.value(params.omega * t) * dH
    diag = np.zeros((size, size), dtype=complex)
    for j, c in drive.harmonics.items():
        diag += np.where(params.mu * j + diff == 0, c * np.exp(1j * params.omega * j * t), 0.0)
    return full - diag * dH


def apply_exp_skew(W, scale, x, tol=1e-16):
    """exp(scale W) x by a scaled truncated Taylor series acting on the vector."""
    W = np.asarray(W)
    x = np.asarray(x, dtype=complex)
    if W.shape[1] != x.shape[0]:
        raise ValueError(f"dimension mismatch: W is {W.shape}, x has length {x.shape[0]}")
    if scale == 0:
        return x.copy()
    norm1 = abs(scale) * np.abs(W).sum(axis=0).max()
    steps = max(1, math.ceil(norm1 / 0.5))
    A = (scale / steps) * W
    y = x
    for _ in range(steps):
        term = y
        acc = y.copy()
        for k in range(1, 60):
            term = A @ term / k
            acc += term
            if np.linalg.norm(term) <= tol * np.linalg.norm(acc):
                break
        y = acc
    return y


def commutator_matrix(params: ModelParams, drive: DriveSpec | None = None):
    """<phi_n1, [H(p), W_1(0)] phi_n2> computed from w1_matrix."""
    W = w1_matrix(params, drive)
    e = energy(np.arange(params.n_max + 1), params)
    return (e[:, None] - e[None, :]) * W


def commutator_formula(params: ModelParams, size):
    """Closed-form commutator entries quoted for the sine drive, off the n1-n2 = +-mu parallels.

    (hbar omega_c / 4i) (n1 - n2) / ((n1 - n2)^2 - mu^2) * min-ratio.
    """
    n = np.arange(size)
    d = (n[:, None] - n[None, :]).astype(float)
    mu = params.mu
    with np.errstate(divide="ignore", invalid="ignore"):
        core = np.where(np.abs(d) != mu, d / (d**2 - mu**2), 0.0)
    return params.energy_quantum / 4j * core * ratio_matrix(params.p, size)


def q_matrix(params: ModelParams, size):
    """Q_{n1 n2} = hbar omega_c / (4i (n1 - n2)) * min-ratio, zero on the diagonal."""
    n = np.arange(size)
    d = (n[:, None] - n[None, :]).astype(float)
    with np.errstate(divide="ignore"):
        core = np.where(d != 0, 1.0 / d, 0.0)
    return params.energy_quantum / 4j * core * ratio_matrix(params.p, size)


def commutator_bound_check(params: ModelParams, size):
    """Row-sum bound sup_n1 sum_n2 |B_{n1 n2}| of B = commutator - Q off the +-mu parallels."""
    if size < 10:
        raise ValueError("size must be at least 10")
    n = np.arange(size)
    d = n[:, None] - n[None, :]
    B = commutator_formula(params, size) - q_matrix(params, size)
    B[np.abs(d) == params.mu] = 0.0
    return float(np.abs(B).sum(axis=1).max())


def acceleration_rate(rho, params: ModelParams):
    """(|eps| hbar omega_c Omega / 2) int sin|rho|^2 / int |rho|^2."""
    dens = np.abs(rho.values) ** 2
    norm = float(np.sum(rho.weights * dens))
    if not norm > 0:
        raise ValueError("density has zero norm")
    mean_sin = float(np.sum(rho.weights * np.sin(rho.nodes) * dens)) / norm
    return 0.5 * abs(params.epsilon) * params.energy_quantum * params.omega * mean_sin


@dataclass
class AveragedEnergy:
    N: np.ndarray
    energy: np.ndarray
    captured: np.ndarray
    flagged: np.ndarray


def spectral_components(rho, params: ModelParams, j_keep, spec: jacobi.JacobiSpec | None = None):
    """delta-normalized xi_j(theta) on the density's nodes, j <= j_keep."""
    if spec is None:
        spec = jacobi.JacobiSpec.from_params(params, j_max=max(2000, 2 * j_keep))
    if j_keep > spec.j_max:
        raise ValueError("j_keep exceeds the Jacobi truncation")
    comps, _, _ = jacobi.eigenvector_table(rho.nodes, spec, j_keep)
    return comps


def averaged_energy(rho, N, params: ModelParams, j_max, components=None, threshold=0.99):
    """Mean energy after N steps of the averaged Floquet operator.

    sum_j E_{s+j mu}(p) |c_j(N)|^2 / sum_j |c_j(N)|^2 with
    c_j(N) = int exp(-i eps cos(theta) omega_c T N / 2) xi_j(theta) rho(theta) dtheta.
    ``N`` may be a scalar or a sequence; a scalar returns floats.
    """
    scalar = np.ndim(N) == 0
    Ns = np.atleast_1d(np.asarray(N, dtype=float))
    if components is None:
        components = spectral_components(rho, params, j_max)
    comps = components[:, : j_max + 1]
    phase = np.exp(
        -0.5j * params.epsilon * params.omega_c * params.period
        * np.outer(np.cos(rho.nodes), Ns)
    )
    weighted = (rho.weights * rho.values)[:, None] * phase
    c = comps.T @ weighted
    prob = np.abs(c) ** 2
    levels = energy(params.s + params.mu * np.arange(comps.shape[1]), params)
    total = prob.sum(axis=0)
    norm_rho = float(np.sum(rho.weights * np.abs(rho.values) ** 2))
    captured = total / norm_rho
    mean = (levels @ prob) / total
    flagged = captured < threshold
    for n_, frac in zip(Ns[flagged], captured[flagged]):
        log.warning("averaged energy at N=%g captures only %.4f of the norm", n_, frac)
    if scalar:
        return AveragedEnergy(float(Ns[0]), float(mean[0]), float(captured[0]), bool(flagged[0]))
    return AveragedEnergy(Ns, mean, captured, flagged)


def required_j(N_max, params: ModelParams, margin=300):
    """Number of Jacobi components needed to follow the averaged packet up to N_max periods."""
    drift = 0.5 * abs(params.epsilon) * params.omega_c * params.period * N_max
    return int(math.ceil(drift)) + margin
