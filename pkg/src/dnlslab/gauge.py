"""Gauge transformations between the derivative NLS equation and its gauged form.

The maps multiply by a unimodular factor exp(-i a * P(x)) where P is the
antiderivative of |f|^2 taken from the left box endpoint.  On the periodic
box this is meaningful only for data that decay near the boundary; a
diagnostic warns otherwise.

Phase weights: a = 1 for the forward map, a = -1 for the inverse and a = 3/4
for the variant map used in the pointwise energy identity
    H(u) = ||v_x||_{L2}^2 - (1/16) ||v||_{L6}^6.
(The weight 3/4 is forced by that identity; see tests.)
"""
from __future__ import annotations

import numpy as np

from .spectral import Field, Grid, PHYSICAL, warn_if_boundary_mass


def antiderivative_of_density(f: Field, method: str = "spectral") -> np.ndarray:
    """P(x_j) = integral of |f|^2 from the left box endpoint to x_j.

    method="spectral": mean part handled linearly, oscillatory part by
    division by i*xi (exact for the trigonometric interpolant).
    method="trapezoid": cumulative trapezoidal sum (second order).
    """
    g = f.grid
    rho = np.abs(f.phys) ** 2
    if method == "trapezoid":
        incr = 0.5 * (rho[:-1] + rho[1:]) * g.dx
        return np.concatenate([[0.0], np.cumsum(incr)])
    if method != "spectral":
        raise ValueError(f"unknown antiderivative method {method!r}")
    rho_hat = np.fft.fft(rho) / g.K
    mean = rho_hat[0].real
    xi = g.xi
    q_hat = np.zeros_like(rho_hat)
    nz = (xi != 0) & g.nyquist_mask
    q_hat[nz] = rho_hat[nz] / (1j * xi[nz])
    q = np.fft.ifft(q_hat * g.K).real
    return mean * g.x + (q - q[0])


def _phase_multiply(f: Field, a: float, method: str) -> Field:
    warn_if_boundary_mass(f)
    phase = antiderivative_of_density(f, method=method)
    return Field(f.grid, f.phys * np.exp(-1j * a * phase), PHYSICAL)


def gauge_forward(f: Field, method: str = "spectral") -> Field:
    """f -> exp(-i P) f with P(x) = int_0^x |f|^2."""
    return _phase_multiply(f, 1.0, method)


def gauge_inverse(f: Field, method: str = "spectral") -> Field:
    """f -> exp(+i P) f; inverse of gauge_forward."""
    return _phase_multiply(f, -1.0, method)


def gauge_variant(u: Field, method: str = "spectral") -> Field:
    """u -> exp(-(3i/4) P) u, the weight that realises the Hamiltonian identity."""
    return _phase_multiply(u, 0.75, method)
