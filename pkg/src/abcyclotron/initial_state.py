"""Initial wavefunctions built from a spectral density rho(theta) on (0, pi)."""

from __future__ import annotations

import csv
import logging
import math
from dataclasses import dataclass

import numpy as np

from . import jacobi
from .averaging import apply_exp_skew, w1_matrix
from .params import DriveSpec, ModelParams
from .quadrature import composite_gauss_legendre

log = logging.getLogger(__name__)


@dataclass
class ThetaDensity:
    nodes: np.ndarray
    weights: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        self.nodes = np.asarray(self.nodes, dtype=float)
        self.weights = np.asarray(self.weights, dtype=float)
        self.values = np.asarray(self.values, dtype=complex)
        if not (self.nodes.shape == self.weights.shape == self.values.shape):
            raise ValueError("nodes, weights and values must have the same shape")
        if np.any(np.diff(self.nodes) <= 0):
            raise ValueError("nodes must be strictly increasing")
        if self.nodes[0] <= 0 or self.nodes[-1] >= math.pi:
            raise ValueError("nodes must lie inside (0, pi)")

    @property
    def norm_sq(self):
        return float(np.sum(self.weights * np.abs(self.values) ** 2))

    def __add__(self, other):
        self._check_same_grid(other)
        return ThetaDensity(self.nodes, self.weights, self.values + other.values)

    def __mul__(self, scalar):
        return ThetaDensity(self.nodes, self.weights, scalar * self.values)

    __rmul__ = __mul__

    def _check_same_grid(self, other):
        if not np.array_equal(self.nodes, other.nodes):
            raise ValueError("densities live on different grids")


@dataclass
class FockState:
    """Coefficients x_n, n = 0..n_max, in the eigenbasis phi_n(flux)."""

    coefficients: np.ndarray
    flux: float

    @property
    def norm(self):
        return float(np.linalg.norm(self.coefficients))


def theta_grid(n_nodes=2048, theta_min=0.05, panels=32):
    """Composite Gauss-Legendre nodes and weights on [theta_min, pi - theta_min]."""
    per = max(2, n_nodes // panels)
    breaks = np.linspace(theta_min, math.pi - theta_min, panels + 1)
    return composite_gauss_legendre(breaks, per)


def gaussian_density(grid=None, center=2.0, concentration=10.0, momentum=8.0):
    """(2c/pi)^(1/4) exp(-c (center - theta)^2 + i k theta) sampled on ``grid``.

    The defaults reproduce the density of the reference run; ``grid`` is a
    (nodes, weights) pair, by default ``theta_grid()``.
    """
    nodes, weights = theta_grid() if grid is None else grid
    amp = (2.0 * concentration / math.pi) ** 0.25
    values = amp * np.exp(-concentration * (center - nodes) ** 2 + 1j * momentum * nodes)
    return ThetaDensity(nodes, weights, values)


def tabulated_density(path, grid=None):
    """Density read from a CSV with columns theta, re, im, interpolated onto ``grid``."""
    with open(path, newline="") as fh:
        rows = [r for r in csv.reader(fh) if r and not r[0].lstrip().startswith("#")]
    try:
        data = np.array([[float(v) for v in r[:3]] for r in rows])
    except ValueError:
        data = np.array([[float(v) for v in r[:3]] for r in rows[1:]])
    th, re, im = data.T
    nodes, weights = theta_grid() if grid is None else grid
    values = np.interp(nodes, th, re, left=0.0, right=0.0) + 1j * np.interp(
        nodes, th, im, left=0.0, right=0.0
    )
    return ThetaDensity(nodes, weights, values)


def synthesize_state(rho: ThetaDensity, params: ModelParams, spec=None, components=None):
    """Fock coefficients of psi_0 = int Xi_s(theta, .) rho(theta) dtheta.

    x_{s + j mu} = i^j int xi_j(theta) rho(theta) dtheta; all other
    residue classes stay empty.
    """
    j_count = (params.n_max - params.s) // params.mu + 1
    if components is None:
        if spec is None:
            spec = jacobi.JacobiSpec.from_params(params)
        components, _, _ = jacobi.eigenvector_table(rho.nodes, spec, j_count - 1)
    c = components[:, :j_count].T @ (rho.weights * rho.values)
    x = np.zeros(params.n_max + 1, dtype=complex)
    x[params.s :: params.mu][:j_count] = c * jacobi.ipow(np.arange(j_count))
    captured = float(np.vdot(x, x).real)
    if captured < 0.999 * rho.norm_sq:
        log.warning(
            "synthesized state keeps %.6f of the density norm %.6f; raise n_max",
            captured, rho.norm_sq,
        )
    return FockState(x, params.p)


def dress_initial_state(x: FockState, params: ModelParams, drive: DriveSpec | None = None, W=None):
    """exp(-eps W_1(0)) x, the initial condition matched to the averaged dynamics."""
    if W is None:
        W = w1_matrix(params, drive)
    return FockState(apply_exp_skew(W, -params.epsilon, x.coefficients), x.flux)
