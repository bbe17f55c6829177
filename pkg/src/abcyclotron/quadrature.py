"""Gauss-Legendre rules on intervals, single and composite."""

from __future__ import annotations

import numpy as np
from numpy.polynomial.legendre import leggauss


def gauss_legendre(a, b, n):
    """Nodes and weights of the n-point Gauss-Legendre rule on [a, b]."""
    x, w = leggauss(n)
    half = 0.5 * (b - a)
    return a + half * (x + 1.0), half * w


def composite_gauss_legendre(breaks, n_per_panel):
    """Concatenated Gauss-Legendre rules on consecutive panels [breaks[i], breaks[i+1]]."""
    x, w = leggauss(n_per_panel)
    nodes, weights = [], []
    for a, b in zip(breaks[:-1], breaks[1:]):
        half = 0.5 * (b - a)
        nodes.append(a + half * (x + 1.0))
        weights.append(half * w)
    return np.concatenate(nodes), np.concatenate(weights)


def radial_rule(r_max, n_nodes=512, grading=12):
    """Composite rule on [0, r_max] with panels refined geometrically toward r = 0.

    The r^p factor of the Landau eigenfunctions makes the integrand
    non-analytic at the origin for non-integer p; geometric grading restores
    fast convergence there.
    """
    inner = [r_max * 0.5**k for k in range(grading, 0, -1)]
    per = max(8, n_nodes // (grading + 8))
    outer = list(np.linspace(r_max * 0.5, r_max, 9))
    breaks = [0.0] + inner + outer[1:]
    return composite_gauss_legendre(breaks, per)
