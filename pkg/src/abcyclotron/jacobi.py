"""Generalized eigenvectors of the half-line Jacobi matrix J with zero diagonal.

J has off-diagonal entries

    alpha_j = prod_{nu=1}^{mu} ((mu j + s + nu) / (mu j + s + p + nu))^(1/2),

and its spectrum is [-2, 2]. A point 2 cos(theta) of the spectrum carries the
real solution of

    alpha_{j-1} xi_{j-1} + alpha_j xi_{j+1} = 2 cos(theta) xi_j,   xi_{-1} = 0,

whose tail oscillates like A cos(j theta - (p/2) cot(theta) log(j+1) + phi).
The amplitude A and phase phi are extracted by a linear least-squares fit
over a window in the tail.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

DELTA_AMPLITUDE = math.sqrt(2.0 / math.pi)
EULER_GAMMA = 0.57721566490153286061


class FitError(ArithmeticError):
    """The tail fit is ill-conditioned (theta near 0 or pi, or window too short)."""


@dataclass(frozen=True)
class JacobiSpec:
    p: float
    mu: int = 1
    s: int = 0
    j_max: int = 2000
    window: tuple = (0.4, 0.8)
    theta_min: float = 0.05
    envelope: bool = True

    def __post_init__(self):
        if self.p < 0:
            raise ValueError("p must be nonnegative")
        if self.mu < 1 or not 0 <= self.s < self.mu:
            raise ValueError("need mu >= 1 and 0 <= s < mu")
        lo, hi = self.window
        if not 0.0 <= lo < hi <= 1.0:
            raise ValueError(f"bad fit window fractions {self.window!r}")

    @classmethod
    def from_params(cls, params, **kw):
        return cls(p=params.p, mu=params.mu, s=params.s, **kw)

    def window_indices(self):
        lo, hi = self.window
        return int(round(lo * self.j_max)), int(round(hi * self.j_max))


@dataclass
class GeneralizedEigenvector:
    theta: float
    components: np.ndarray
    amplitude: float
    phase: float
    eigenvalue: float
    residual: float = 0.0

    def complex_components(self):
        """i^j xi_j, the eigenvector of the averaged block A_s."""
        return self.components * ipow(np.arange(self.components.size))


def ipow(j):
    return np.array([1, 1j, -1, -1j])[np.asarray(j) % 4]


def alpha(j, spec: JacobiSpec):
    """Off-diagonal entry alpha_j; vectorized over j."""
    n = spec.mu * np.asarray(j, dtype=float) + spec.s
    log_sq = np.zeros_like(n)
    for nu in range(1, spec.mu + 1):
        log_sq -= np.log1p(spec.p / (n + nu))
    out = np.exp(0.5 * log_sq)
    return out if out.ndim else float(out)


def jacobi_matrix(spec: JacobiSpec, size):
    """Dense size x size truncation of J."""
    a = alpha(np.arange(size - 1), spec)
    return np.diag(a, 1) + np.diag(a, -1)


def tail_phase(j, theta, p):
    """psi_j = j theta - (p/2) cot(theta) log(j+1); broadcasts theta against j."""
    theta = np.asarray(theta, dtype=float)[..., None]
    j = np.asarray(j, dtype=float)
    return j * theta - 0.5 * p / np.tan(theta) * np.log(j + 1.0)


def tail_envelope(j, theta, p):
    """Leading 1/j correction to the amplitude of the tail oscillation."""
    theta = np.asarray(theta, dtype=float)[..., None]
    j = np.asarray(j, dtype=float)
    return 1.0 + p / (4.0 * (j + 1.0) * np.sin(theta) ** 2)


def _check_theta(theta, spec):
    theta = np.asarray(theta, dtype=float)
    if np.any(theta <= 0.0) or np.any(theta >= math.pi):
        raise ValueError("theta must lie in the open interval (0, pi)")
    return theta


def eigenvector_raw(theta, spec: JacobiSpec, j_max=None):
    """Solution of the three-term recurrence with xi_0 = 1, xi_{-1} = 0.

    ``theta`` may be a scalar (returns shape (j_max+1,)) or a 1-d array
    (returns shape (len(theta), j_max+1)).
    """
    theta = _check_theta(theta, spec)
    j_max = spec.j_max if j_max is None else j_max
    a = alpha(np.arange(j_max + 1), spec)
    two_cos = 2.0 * np.cos(np.atleast_1d(theta))
    xi = np.empty((two_cos.size, j_max + 1))
    xi[:, 0] = 1.0
    if j_max >= 1:
        xi[:, 1] = two_cos / a[0]
    for j in range(1, j_max):
        xi[:, j + 1] = (two_cos * xi[:, j] - a[j - 1] * xi[:, j - 1]) / a[j]
    return xi[0] if theta.ndim == 0 else xi


def recurrence_residual(seq, theta, spec: JacobiSpec):
    """max over interior j of |alpha_{j-1} x_{j-1} + alpha_j x_{j+1} - 2cos(theta) x_j| / max|x|."""
    seq = np.asarray(seq)
    a = alpha(np.arange(seq.size), spec)
    lhs = a[:-2] * seq[:-2] + a[1:-1] * seq[2:]
    res = np.abs(lhs - 2.0 * math.cos(theta) * seq[1:-1])
    return float(res.max() / np.abs(seq).max())


def fit_tail(seq, theta, spec: JacobiSpec, window=None):
    """Least-squares fit of seq_j ~ a cos(psi_j) + b sin(psi_j) over a window.

    Returns (A, phi) with A = hypot(a, b) and phi = atan2(-b, a), so that
    seq_j ~ A cos(psi_j + phi). ``seq`` and ``theta`` may be batched
    (shape (m, J) and (m,)).
    """
    seq = np.asarray(seq, dtype=float)
    theta = _check_theta(theta, spec)
    lo, hi = spec.window_indices() if window is None else window
    if hi - lo < 50:
        raise FitError("fit window must contain at least 50 points")
    if hi >= seq.shape[-1]:
        raise FitError("fit window exceeds the sequence length")
    j = np.arange(lo, hi + 1)
    th = np.atleast_1d(theta)
    y = np.atleast_2d(seq)[:, lo : hi + 1]
    psi = tail_phase(j, th, spec.p)
    if spec.envelope:
        y = y / tail_envelope(j, th, spec.p)
    c, s = np.cos(psi), np.sin(psi)
    m_cc = np.sum(c * c, axis=-1)
    m_ss = np.sum(s * s, axis=-1)
    m_cs = np.sum(c * s, axis=-1)
    r_c = np.sum(c * y, axis=-1)
    r_s = np.sum(s * y, axis=-1)
    det = m_cc * m_ss - m_cs**2
    if np.any(det <= 1e-6 * m_cc * m_ss):
        raise FitError("near-singular tail fit; theta too close to 0 or pi or window too short")
    a = (m_ss * r_c - m_cs * r_s) / det
    b = (m_cc * r_s - m_cs * r_c) / det
    amp = np.hypot(a, b)
    phase = np.arctan2(-b, a)
    if theta.ndim == 0:
        return float(amp[0]), float(phase[0])
    return amp, phase


def eigenvector_table(thetas, spec: JacobiSpec, j_keep=None):
    """delta-normalized components for many theta at once.

    Returns (components, amplitudes, phases); components has shape
    (len(thetas), j_keep+1) and carries the fitted amplitude sqrt(2/pi).
    """
    thetas = np.asarray(thetas, dtype=float)
    raw = eigenvector_raw(thetas, spec)
    amp, phase = fit_tail(raw, thetas, spec)
    j_keep = spec.j_max if j_keep is None else j_keep
    comps = raw[:, : j_keep + 1] * (DELTA_AMPLITUDE / amp)[:, None]
    return comps, amp, phase


def eigenvector_normalized(theta, spec: JacobiSpec, energy_quantum=1.0):
    theta = float(_check_theta(theta, spec))
    raw = eigenvector_raw(theta, spec)
    amp, phase = fit_tail(raw, theta, spec)
    comps = raw * (DELTA_AMPLITUDE / amp)
    return GeneralizedEigenvector(
        theta=theta,
        components=comps,
        amplitude=DELTA_AMPLITUDE,
        phase=phase,
        eigenvalue=0.5 * energy_quantum * math.cos(theta),
        residual=recurrence_residual(comps, theta, spec),
    )


def _richardson_limit(f, j):
    """Limit of f(j) = L (1 + c2/j^2 + ...) from samples at j and 2j."""
    return (4.0 * f[2 * j] - f[j]) / 3.0


def zero_mode(spec: JacobiSpec, j_max=None):
    """Null vector u of J with u_0 = 1, and the tail constant u_inf.

    u_{2j+1} = 0 and u_{2j} = (-1)^j prod_{k<j} alpha_{2k}/alpha_{2k+1}.
    """
    j_max = spec.j_max if j_max is None else j_max
    half = j_max // 2
    a = alpha(np.arange(2 * half + 2), spec)
    log_ratio = np.log(a[0 : 2 * half : 2]) - np.log(a[1 : 2 * half + 1 : 2])
    mag = np.exp(np.concatenate(([0.0], np.cumsum(log_ratio))))
    u = np.zeros(j_max + 1)
    signs = np.where(np.arange(half + 1) % 2 == 0, 1.0, -1.0)
    u[0 : 2 * half + 1 : 2] = signs * mag
    jj = np.arange(half + 1, dtype=float)
    jj[0] = 1.0
    reduced = mag / (1.0 + spec.p / (8.0 * jj))
    u_inf = _richardson_limit(reduced, half // 2) if half >= 4 else reduced[-1]
    return u, float(u_inf)


def v_solution(spec: JacobiSpec, j_max=None):
    """Solution of J v = u with v_{2j} = 0, u the zero mode."""
    j_max = spec.j_max if j_max is None else j_max
    u, _ = zero_mode(spec, j_max + 1)
    a = alpha(np.arange(j_max + 2), spec)
    even = u[0::2]
    csum = np.cumsum(even**2)
    v = np.zeros(j_max + 1)
    n_odd = len(v[1::2])
    v[1::2] = csum[:n_odd] / (a[0::2][:n_odd] * even[:n_odd])
    return v


def phase_derivative_center(spec: JacobiSpec, series_terms=200_000):
    """d phi(p; pi/2) / d theta from the zero-mode series."""
    if spec.p == 0:
        return 1.0
    u, u_inf = zero_mode(spec, 8 * series_terms)
    j = np.arange(series_terms + 1)
    ratio_sq = (u[0 : 2 * series_terms + 1 : 2] / u_inf) ** 2
    terms = ratio_sq - 1.0 - spec.p / (4.0 * j + 2.0)
    return float(1.0 + 0.5 * spec.p * (math.log(2.0) + EULER_GAMMA) + 2.0 * math.fsum(terms))


def phase_derivative_fd(spec: JacobiSpec, delta=1e-3):
    """Central difference of the fitted phase at theta = pi/2."""
    _, up = fit_tail(eigenvector_raw(math.pi / 2 + delta, spec), math.pi / 2 + delta, spec)
    _, dn = fit_tail(eigenvector_raw(math.pi / 2 - delta, spec), math.pi / 2 - delta, spec)
    return (up - dn) / (2.0 * delta)
