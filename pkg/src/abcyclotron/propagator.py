"""Direct integration of the driven Schroedinger equation in the instantaneous eigenbasis.

With psi(t) = sum_n x_n(t) phi_n(a(t)) and a(t) = p + eps f(Omega t),

    x_n' = -i E_n(a) x_n / hbar - a' sum_j <phi_n(a), d phi_j(a)/da> x_j,

integrated by classical RK4 with step-doubling error control. By default the
integration runs on y_n = exp(i theta_n(t)) x_n with theta_n' = E_n(a(t)) / hbar,
which removes the exactly known fast phases and leaves

    y_n' = -a' sum_j <phi_n(a), d phi_j(a)/da> exp(i omega_c (n - j) t) y_j.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field

import numpy as np

from .landau import energy, log_gamma_relative, overlap_dp_matrix
from .params import DriveSpec, ModelParams

log = logging.getLogger(__name__)

TAIL_MODES = 5
LEAK_THRESHOLD = 1e-6


class IntegrationError(RuntimeError):
    """Step size underflow or loss of unitarity."""


def drive_value(t, params: ModelParams, drive: DriveSpec | None = None):
    """(a(t), a'(t)) with a(t) = p + eps f(Omega t).

    The drive phase is reduced modulo a period first so that a(N T) = p holds
    exactly for the sine drive.
    """
    drive = DriveSpec.sine() if drive is None else drive
    cycles = t / params.period
    phase = 2.0 * math.pi * (cycles - math.floor(cycles))
    a = params.p + params.epsilon * drive.value(phase)
    a_prime = params.epsilon * params.omega * drive.derivative(phase)
    return a, a_prime


class SchroedingerRHS:
    """Right-hand side of the truncated coefficient system, n = 0..n_max.

    The overlap matrix <phi_n(a), d phi_j(a)/da> = g_<(a)/g_>(a) / (2(j-n))
    with g_n(a) = (Gamma(n+a+1)/n!)^(1/2) increasing in n for a >= 0, so its
    action splits into two constant triangular products scaled by g.
    """

    def __init__(self, params: ModelParams, drive: DriveSpec | None = None):
        self.params = params
        self.drive = DriveSpec.sine() if drive is None else drive
        size = params.n_max + 1
        self.n = np.arange(size)
        diff = self.n[None, :] - self.n[:, None]
        with np.errstate(divide="ignore"):
            inv = np.where(diff != 0, 1.0 / (2.0 * diff), 0.0)
        self.upper = np.triu(inv, 1)
        self.lower = np.tril(inv, -1)
        self.evals = 0

    def overlap_action(self, a, x):
        """sum_j <phi_n(a), d phi_j(a)/da> x_j."""
        if a < 0:
            return overlap_dp_matrix(a, self.n.size) @ x
        g = np.exp(log_gamma_relative(a, self.n.size))
        up = self.upper @ (x / g).view(float).reshape(-1, 2)
        lo = self.lower @ (x * g).view(float).reshape(-1, 2)
        up = up[:, 0] + 1j * up[:, 1]
        lo = lo[:, 0] + 1j * lo[:, 1]
        return g * up + lo / g

    def __call__(self, t, x):
        self.evals += 1
        a, a_prime = drive_value(t, self.params, self.drive)
        e = energy(self.n, self.params, a)
        out = (-1j / self.params.hbar) * e * x
        if a_prime != 0.0:
            out -= a_prime * self.overlap_action(a, x)
        return out


class InteractionRHS(SchroedingerRHS):
    """Coupling-only right-hand side for the phase-stripped coefficients y."""

    def __init__(self, params: ModelParams, drive: DriveSpec | None = None):
        super().__init__(params, drive)
        self.freq = params.omega_c * self.n

    def __call__(self, t, y):
        self.evals += 1
        a, a_prime = drive_value(t, self.params, self.drive)
        if a_prime == 0.0:
            return np.zeros_like(y)
        rot = np.exp(1j * self.freq * t)
        return -a_prime * rot * self.overlap_action(a, np.conj(rot) * y)

    def dynamic_phase(self, t):
        """theta_n(t) = int_0^t E_n(a(tau)) d tau / hbar."""
        p = self.params
        cycles = t / p.period
        phase = 2.0 * math.pi * (cycles - math.floor(cycles))
        flux_integral = p.p * t + p.epsilon / p.omega * self.drive.integral(phase)
        return p.omega_c * ((self.n + 0.5) * t + flux_integral)

    def to_lab(self, t, y):
        return np.exp(-1j * self.dynamic_phase(t)) * y


def rhs(t, x, params: ModelParams, drive: DriveSpec | None = None):
    """One-off evaluation of the coefficient system's right-hand side."""
    return SchroedingerRHS(params, drive)(t, np.asarray(x, dtype=complex))


def rk4_step(f, t, x, h):
    k1 = f(t, x)
    k2 = f(t + 0.5 * h, x + 0.5 * h * k1)
    k3 = f(t + 0.5 * h, x + 0.5 * h * k2)
    k4 = f(t + h, x + h * k3)
    return x + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


def integrate_fixed(f, x0, t_end, steps):
    """Plain RK4 with a constant step; used for convergence checks."""
    h = t_end / steps
    x = np.asarray(x0, dtype=complex)
    for i in range(steps):
        x = rk4_step(f, i * h, x, h)
    return x


def mean_energy(x, t, params: ModelParams, drive: DriveSpec | None = None):
    """sum_n E_n(a(t)) |x_n|^2."""
    x = np.asarray(getattr(x, "coefficients", x))
    a, _ = drive_value(t, params, drive)
    return float(energy(np.arange(x.size), params, a) @ (np.abs(x) ** 2))


def tail_weight(x, modes=TAIL_MODES):
    return float(np.sum(np.abs(x[-modes:]) ** 2))


@dataclass
class Trajectory:
    times: np.ndarray
    states: np.ndarray
    energies: np.ndarray
    norms: np.ndarray
    tail: np.ndarray
    flux: np.ndarray
    flux_rate: np.ndarray
    steps_accepted: int = 0
    steps_rejected: int = 0
    rhs_evals: int = 0
    info: dict = field(default_factory=dict)

    @property
    def norm_drift(self):
        return float(np.max(np.abs(self.norms - self.norms[0])))

    @property
    def max_tail(self):
        return float(np.max(self.tail))

    @property
    def leaked(self):
        return self.max_tail > LEAK_THRESHOLD


def integrate(
    x0,
    t_end,
    params: ModelParams,
    drive: DriveSpec | None = None,
    tol=1e-8,
    samples_per_period=1,
    h0=None,
    h_min=None,
    safety=0.9,
    picture="interaction",
    progress=None,
):
    """Adaptive RK4 (step doubling) from t = 0 to t_end.

    A step h is accepted when |x_h - x_{h/2,h/2}| / 15 < tol max(1, |x|); the
    two-half-step result is kept. Samples are taken exactly at multiples of
    T / samples_per_period. ``picture`` selects the integrated variables:
    "interaction" (phase-stripped, the default) or "lab" (x itself).
    """
    if not tol > 0 or not t_end > 0:
        raise ValueError("tol and t_end must be positive")
    if picture == "interaction":
        f = InteractionRHS(params, drive)
        to_lab = f.to_lab
    elif picture == "lab":
        f = SchroedingerRHS(params, drive)
        to_lab = lambda t, x: x  # noqa: E731
    else:
        raise ValueError(f"unknown picture {picture!r}")
    T = params.period
    h = 1e-3 * T if h0 is None else h0
    h_min = 1e-9 * T if h_min is None else h_min
    dt_sample = T / samples_per_period
    n_samples = int(math.floor(t_end / dt_sample * (1 + 1e-12)))
    sample_times = [k * dt_sample for k in range(1, n_samples + 1)]
    if not sample_times or sample_times[-1] < t_end * (1 - 1e-12):
        sample_times.append(t_end)

    x = np.array(getattr(x0, "coefficients", x0), dtype=complex)
    norm0 = float(np.linalg.norm(x))
    records = [(0.0, x.copy())]  # y(0) = x(0) in either picture
    accepted = rejected = 0
    t = 0.0
    for target in sample_times:
        while t < target:
            last = False
            step = h
            if t + step >= target * (1 - 1e-14):
                step = target - t
                last = True
            full = rk4_step(f, t, x, step)
            half = rk4_step(f, t, x, 0.5 * step)
            half = rk4_step(f, t + 0.5 * step, half, 0.5 * step)
            err = np.linalg.norm(half - full) / 15.0
            scale = tol * max(1.0, float(np.linalg.norm(x)))
            factor = 4.0 if err == 0 else min(4.0, max(0.2, safety * (scale / err) ** 0.2))
            if err <= scale:
                accepted += 1
                t = target if last else t + step
                x = half
                if not last:
                    h = step * factor
            else:
                rejected += 1
                h = step * factor
                if h < h_min:
                    raise IntegrationError(f"step size underflow at t={t:.6g} (h={h:.3g})")
        drift = abs(float(np.linalg.norm(x)) - norm0)
        if drift > 100 * tol:
            raise IntegrationError(f"norm drift {drift:.3g} exceeds {100 * tol:.3g} at t={t:.6g}")
        lab = to_lab(target, x)
        records.append((target, lab))
        if progress is not None:
            progress(target, lab)

    times = np.array([r[0] for r in records])
    states = np.array([r[1] for r in records])
    drive_rec = [drive_value(tt, params, drive) for tt in times]
    traj = Trajectory(
        times=times,
        states=states,
        energies=np.array([mean_energy(s, tt, params, drive) for tt, s in zip(times, states)]),
        norms=np.linalg.norm(states, axis=1),
        tail=np.array([tail_weight(s) for s in states]),
        flux=np.array([d[0] for d in drive_rec]),
        flux_rate=np.array([d[1] for d in drive_rec]),
        steps_accepted=accepted,
        steps_rejected=rejected,
        rhs_evals=f.evals,
    )
    if traj.leaked:
        log.warning("weight in the top %d modes reached %.3g", TAIL_MODES, traj.max_tail)
    return traj


@dataclass
class AccelerationSeries:
    times: np.ndarray
    ratio: np.ndarray
    slope: float
    intercept: float


def acceleration_series(traj: Trajectory, fraction=0.5):
    """E(t)/t for t > 0 and the least-squares slope of E(t) over the final ``fraction``."""
    t = np.asarray(traj.times, dtype=float)
    e = np.asarray(traj.energies, dtype=float)
    keep = t > 0
    t, e = t[keep], e[keep]
    if t.size == 0:
        raise ValueError("trajectory has no samples with t > 0")
    sel = t >= t[-1] - fraction * (t[-1] - 0.0)
    if sel.sum() < 2:
        sel[-2:] = True
    slope, intercept = np.polyfit(t[sel], e[sel], 1)
    return AccelerationSeries(t, e / t, float(slope), float(intercept))
