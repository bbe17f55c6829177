"""Landau levels of the radial Hamiltonian with an Aharonov-Bohm flux.

Eigenvalues E_n(p) = hbar omega_c (n + p + 1/2) and eigenfunctions

    phi_n(p; r) = c_n(p) r^p L_n^(p)(eB r^2 / 2hbar) exp(-eB r^2 / 4hbar)

in L^2((0, inf), r dr), together with the p-derivative matrix elements
needed by the averaging method and by the propagator.
"""

from __future__ import annotations

import math

import numpy as np
from scipy.special import gammaln

from .params import ModelParams


def laguerre(n, p, x):
    """Generalized Laguerre polynomial L_n^(p)(x) by upward recurrence.

    ``x`` may be an array; the result has the same shape.
    """
    x = np.asarray(x, dtype=float)
    prev = np.ones_like(x)
    if n == 0:
        return prev if prev.ndim else float(prev)
    cur = 1.0 + p - x
    for k in range(1, n):
        prev, cur = cur, ((2 * k + 1 + p - x) * cur - (k + p) * prev) / (k + 1)
    return cur if cur.ndim else float(cur)


def log_gamma_weight(p, n):
    """log gamma(p; n) = (lgamma(n + p + 1) - lgamma(n + 1)) / 2, vectorized in n."""
    n = np.asarray(n, dtype=float)
    return 0.5 * (gammaln(n + p + 1.0) - gammaln(n + 1.0))


def gamma_ratio_min(p, n1, n2):
    """min{gamma(p;n2)/gamma(p;n1), gamma(p;n1)/gamma(p;n2)}.

    Computed from log-gamma differences so that it stays finite for large n.
    """
    d = log_gamma_weight(p, n1) - log_gamma_weight(p, n2)
    out = np.exp(-np.abs(d))
    return out if np.ndim(out) else float(out)


def energy(n, params: ModelParams, a=None):
    """E_n(a) = hbar omega_c (n + a + 1/2); ``a`` defaults to the static offset p."""
    if a is None:
        a = params.p
    return params.energy_quantum * (np.asarray(n, dtype=float) + a + 0.5)


def log_norm_constant(n, p, params: ModelParams):
    """log c_n(p) for the normalized eigenfunction."""
    return (
        0.5 * (p + 1.0) * math.log(params.length_scale)
        + 0.5 * (math.log(2.0) + math.lgamma(n + 1.0) - math.lgamma(n + p + 1.0))
    )


def eigenfunction(n, p, r, params: ModelParams):
    """phi_n(p; r). ``r`` may be an array of positive radii."""
    r = np.asarray(r, dtype=float)
    x = params.length_scale * r**2
    with np.errstate(divide="ignore"):
        log_env = log_norm_constant(n, p, params) + p * np.log(r) - 0.5 * x
    out = laguerre(n, p, x) * np.exp(log_env)
    return out if np.ndim(out) else float(out)


def overlap_dp(n1, n2, p):
    """<phi_n1, d phi_n2 / dp>; zero on the diagonal (real, unit-norm functions)."""
    if n1 == n2:
        return 0.0
    return gamma_ratio_min(p, n1, n2) / (2.0 * (n2 - n1))


def dHdp_element(n1, n2, p, params: ModelParams):
    """<phi_n1, (dH/dp) phi_n2> at flux offset p."""
    if n1 == n2:
        return params.energy_quantum
    return 0.5 * params.energy_quantum * gamma_ratio_min(p, n1, n2)


def log_gamma_relative(p, size):
    """log(gamma(p;n) / gamma(p;0)) for n < size.

    Accumulated from gamma(p;n)^2 / gamma(p;n-1)^2 = 1 + p/n, which keeps
    differences between nearby n accurate to a few ulps.
    """
    m = np.arange(1, size, dtype=float)
    return np.concatenate(([0.0], 0.5 * np.cumsum(np.log1p(p / m))))


def ratio_matrix(p, size):
    """Matrix of gamma_ratio_min(p, n1, n2) for 0 <= n1, n2 < size."""
    lg = log_gamma_relative(p, size)
    return np.exp(-np.abs(lg[:, None] - lg[None, :]))


def overlap_dp_matrix(p, size):
    """Real antisymmetric matrix M[n1, n2] = <phi_n1, d phi_n2 / dp>."""
    n = np.arange(size)
    diff = n[None, :] - n[:, None]
    with np.errstate(divide="ignore"):
        inv = np.where(diff != 0, 1.0 / (2.0 * diff), 0.0)
    return ratio_matrix(p, size) * inv


def dHdp_matrix(p, size, params: ModelParams):
    """Matrix of <phi_n1, (dH/dp) phi_n2> for 0 <= n1, n2 < size."""
    m = 0.5 * params.energy_quantum * ratio_matrix(p, size)
    np.fill_diagonal(m, params.energy_quantum)
    return m


def radial_cutoff(n_max, p, params: ModelParams):
    """Radius beyond which phi_n (n <= n_max) is negligible in double precision."""
    # x = eB r^2 / 2hbar; the integrand behaves like x^(n+p) exp(-x), tail < 1e-16
    # well beyond x ~ 4 (n + p) + 80.
    x_cut = 4.0 * (n_max + p + 1.0) + 80.0
    return math.sqrt(x_cut / params.length_scale)
