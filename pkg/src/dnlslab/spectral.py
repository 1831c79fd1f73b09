"""Periodic grid, dual-representation complex fields and Fourier calculus.

Conventions (fixed once, everything else derives from them):

* box  x in [0, L), K equispaced points, dx = L/K
* modes k in {-K/2, ..., K/2-1}, frequencies xi_k = 2*pi*k/L
* forward transform   fhat_k = (sqrt(L)/K) * sum_j f(x_j) exp(-i xi_k x_j)
  so that the discrete Plancherel identity
      dx * sum_j |f(x_j)|^2 == sum_k |fhat_k|^2
  holds with constant exactly 1.  Equivalently f = sum_k fhat_k e_k with the
  orthonormal basis e_k(x) = exp(i xi_k x)/sqrt(L).
* the Nyquist mode k = -K/2 is always zeroed by the dealiasing mask.
"""
from __future__ import annotations

import json
import warnings
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .config import BOUNDARY_MASS_WARN, TOL_MASS_NORM
from .errors import ContractViolation, DomainError, MassConstraintError

PHYSICAL = "physical"
SPECTRAL = "spectral"


@dataclass(frozen=True)
class Grid:
    """Uniform periodic grid on [0, L) with K modes (K even)."""

    L: float
    K: int

    def __post_init__(self) -> None:
        if self.L <= 0:
            raise DomainError(f"period length must be positive, got {self.L}")
        if self.K < 4 or self.K % 2 != 0:
            raise DomainError(f"mode count must be even and >= 4, got {self.K}")

    @property
    def dx(self) -> float:
        return self.L / self.K

    @property
    def x(self) -> np.ndarray:
        return np.arange(self.K) * self.dx

    @property
    def k(self) -> np.ndarray:
        """Integer mode indices in FFT (natural) order."""
        return np.fft.fftfreq(self.K, d=1.0 / self.K).astype(np.int64)

    @property
    def xi(self) -> np.ndarray:
        """Physical frequencies 2*pi*k/L in FFT order."""
        return 2.0 * np.pi * self.k / self.L

    @property
    def nyquist_mask(self) -> np.ndarray:
        return self.k != -self.K // 2

    @property
    def dealias_mask(self) -> np.ndarray:
        """2/3-rule mask (also kills the Nyquist mode)."""
        return (np.abs(self.k) <= self.K // 3) & self.nyquist_mask

    @property
    def band(self) -> int:
        """Largest |mode index| kept by the dealiasing mask."""
        return self.K // 3

    # -- raw transforms --------------------------------------------------

    def forward(self, values_phys: np.ndarray) -> np.ndarray:
        return (np.sqrt(self.L) / self.K) * np.fft.fft(values_phys)

    def backward(self, values_spec: np.ndarray) -> np.ndarray:
        return np.fft.ifft(values_spec) * (self.K / np.sqrt(self.L))

    def coeff_by_index(self, spec: np.ndarray, k: np.ndarray) -> np.ndarray:
        """Gather spectral coefficients by (possibly negative) mode index."""
        return spec[np.asarray(k) % self.K]


@dataclass(frozen=True)
class Field:
    """Complex field on a Grid, tagged physical or spectral.

    Values are immutable; all operations return new Fields.
    """

    grid: Grid
    values: np.ndarray
    representation: str = PHYSICAL

    def __post_init__(self) -> None:
        if self.representation not in (PHYSICAL, SPECTRAL):
            raise ContractViolation(
                f"unknown representation {self.representation!r}"
            )
        v = np.asarray(self.values, dtype=np.complex128)
        if v.shape != (self.grid.K,):
            raise ContractViolation(
                f"value array shape {v.shape} does not match grid K={self.grid.K}"
            )
        v = v.copy()
        v.flags.writeable = False
        object.__setattr__(self, "values", v)

    # -- representation changes -------------------------------------------

    def to_spectral(self) -> "Field":
        if self.representation == SPECTRAL:
            return self
        return Field(self.grid, self.grid.forward(self.values), SPECTRAL)

    def to_physical(self) -> "Field":
        if self.representation == PHYSICAL:
            return self
        return Field(self.grid, self.grid.backward(self.values), PHYSICAL)

    @property
    def spec(self) -> np.ndarray:
        return self.to_spectral().values

    @property
    def phys(self) -> np.ndarray:
        return self.to_physical().values


def transform(f: Field, direction: str) -> Field:
    """Unitary DFT with the package convention; flips the representation tag.

    Raises ContractViolation when the field is already in the target
    representation (the caller asked for a transform that is a no-op).
    """
    if direction == "to_spectral":
        if f.representation == SPECTRAL:
            raise ContractViolation("field is already spectral")
        return f.to_spectral()
    if direction == "to_physical":
        if f.representation == PHYSICAL:
            raise ContractViolation("field is already physical")
        return f.to_physical()
    raise ContractViolation(f"unknown transform direction {direction!r}")


def apply_symbol(f: Field, symbol) -> Field:
    """Multiply the spectrum by symbol(xi); returns a spectral Field."""
    g = f.grid
    return Field(g, f.spec * symbol(g.xi), SPECTRAL)


def derivative(f: Field) -> Field:
    """Spatial derivative: multiplication by i*xi, Nyquist mode zeroed."""
    g = f.grid
    out = f.spec * (1j * g.xi)
    out = out * g.nyquist_mask
    return Field(g, out, SPECTRAL)


def sobolev_norm(f: Field, s: float) -> float:
    """Inhomogeneous Sobolev norm (sum <xi>^{2s} |fhat|^2)^{1/2}."""
    g = f.grid
    w = (1.0 + g.xi**2) ** s
    return float(np.sqrt(np.sum(w * np.abs(f.spec) ** 2)))


def l2_norm(f: Field) -> float:
    if f.representation == SPECTRAL:
        return float(np.linalg.norm(f.values))
    return float(np.sqrt(f.grid.dx * np.sum(np.abs(f.values) ** 2)))


def lebesgue_norm(f: Field, p: float) -> float:
    """L^p norm over one period by trapezoidal (= uniform) quadrature."""
    if p < 1:
        raise DomainError(f"lebesgue_norm requires p >= 1, got {p}")
    v = np.abs(f.phys)
    if np.isinf(p):
        return float(v.max())
    return float((f.grid.dx * np.sum(v**p)) ** (1.0 / p))


def gn_ratio(f: Field) -> float:
    """||f||_L6^6 / (||f||_L2^4 ||f_x||_L2^2).

    The sharp Gagliardo-Nirenberg inequality bounds this by 4/pi^2 for
    decaying data; the caller asserts that bound.
    """
    dx_norm = l2_norm(derivative(f))
    if dx_norm == 0.0:
        raise DomainError("gn_ratio undefined for fields with zero derivative")
    return lebesgue_norm(f, 6) ** 6 / (l2_norm(f) ** 4 * dx_norm**2)


def project_band(f: Field, k_max: int) -> Field:
    """Zero every coefficient with |mode index| > k_max (Nyquist always zeroed)."""
    if k_max <= 0:
        raise DomainError(f"band limit must be positive, got {k_max}")
    g = f.grid
    if k_max > g.K // 2:
        raise DomainError(f"band limit {k_max} exceeds K/2 = {g.K // 2}")
    mask = (np.abs(g.k) <= k_max) & g.nyquist_mask
    return Field(g, f.spec * mask, SPECTRAL)


def boundary_mass_fraction(f: Field, width_frac: float = 0.05) -> float:
    """Fraction of the total mass within width_frac*L of the box endpoints."""
    g = f.grid
    v = np.abs(f.phys) ** 2
    total = v.sum()
    if total == 0.0:
        return 0.0
    m = int(max(1, round(width_frac * g.K)))
    return float((v[:m].sum() + v[-m:].sum()) / total)


def padded_product(fields, grid: Grid, pad: int = 3) -> np.ndarray:
    """Pointwise product of several fields, alias-free via zero padding.

    Returns the spectral coefficients of the product on the original grid.
    Exact as long as the summed bandwidth stays below (pad-1/2)*K.
    """
    K, L = grid.K, grid.L
    Kp = pad * K
    prod = None
    for f in fields:
        spec = f.spec if isinstance(f, Field) else np.asarray(f)
        big = np.zeros(Kp, dtype=np.complex128)
        half = K // 2
        big[:half] = spec[:half]
        big[Kp - half :] = spec[half:]
        phys = np.fft.ifft(big) * (Kp / np.sqrt(L))
        prod = phys if prod is None else prod * phys
    big_spec = (np.sqrt(L) / Kp) * np.fft.fft(prod)
    half = K // 2
    out = np.concatenate([big_spec[:half], big_spec[Kp - half :]])
    return out


def integrate_product(fields, grid: Grid, pad: int = 3) -> complex:
    """Alias-free quadrature of the pointwise product of several fields."""
    spec = padded_product(fields, grid, pad=pad)
    # zero mode of the product carries the integral:
    # int f dx = sqrt(L) * fhat(0)
    return complex(np.sqrt(grid.L) * spec[0])


# -- test data ----------------------------------------------------------------

SQRT_2PI = float(np.sqrt(2.0 * np.pi))


def make_test_data(
    grid: Grid,
    kind: str,
    *,
    mass: float | None = None,
    seed: int = 0,
    strict_mass: bool = False,
    **params,
) -> Field:
    """Deterministic initial data families.

    kind = "gaussian":  exp(-(x-center)^2/(2 width^2)) * exp(i k0 x)
           params: center (default L/2), width (default L/32), k0 (default 0)
    kind = "two_mode":  A1 e^{i k1 x} + A2 e^{i k2 x}
           params: k1, k2 (integer mode indices), A1, A2
    kind = "random_hs": random spectral field with H^s-type profile <xi>^{-s-1/2}
           params: s (default 0.5), k_max (default K//3)

    When ``mass`` is given the field is rescaled so its L^2 norm matches it to
    1e-10.  ``strict_mass=True`` rejects mass >= sqrt(2*pi) (the gauged
    equation's smallness requirement).
    """
    if mass is not None and strict_mass and mass >= SQRT_2PI:
        raise MassConstraintError(
            f"requested L2 mass {mass} violates the smallness bound sqrt(2*pi)"
        )
    x = grid.x
    if kind == "gaussian":
        center = params.get("center", grid.L / 2.0)
        width = params.get("width", grid.L / 32.0)
        k0 = params.get("k0", 0)
        v = np.exp(-((x - center) ** 2) / (2.0 * width**2)).astype(np.complex128)
        if k0:
            v = v * np.exp(2j * np.pi * k0 * x / grid.L)
        f = Field(grid, v, PHYSICAL)
    elif kind == "two_mode":
        k1 = params.get("k1", 1)
        k2 = params.get("k2", 3)
        a1 = params.get("A1", 1.0)
        a2 = params.get("A2", 0.5)
        v = a1 * np.exp(2j * np.pi * k1 * x / grid.L) + a2 * np.exp(
            2j * np.pi * k2 * x / grid.L
        )
        f = Field(grid, v, PHYSICAL)
    elif kind == "random_hs":
        s = params.get("s", 0.5)
        k_max = params.get("k_max", grid.K // 3)
        rng = np.random.default_rng(seed)
        re = rng.standard_normal(grid.K)
        im = rng.standard_normal(grid.K)
        spec = (re + 1j * im) * (1.0 + grid.xi**2) ** (-(s + 0.5) / 2.0)
        spec[np.abs(grid.k) > k_max] = 0.0
        spec[~grid.nyquist_mask] = 0.0
        f = Field(grid, spec, SPECTRAL)
    else:
        raise DomainError(f"unknown test data kind {kind!r}")

    if mass is not None:
        cur = l2_norm(f)
        if cur == 0.0:
            raise DomainError("cannot normalise a zero field")
        f = Field(f.grid, f.values * (mass / cur), f.representation)
    return f


def warn_if_boundary_mass(f: Field, threshold: float = BOUNDARY_MASS_WARN) -> float:
    frac = boundary_mass_fraction(f)
    if frac > threshold:
        warnings.warn(
            f"field carries mass fraction {frac:.3e} near the box boundary; "
            "antiderivative-based transforms lose accuracy",
            stacklevel=3,
        )
    return frac


# -- serialization -------------------------------------------------------------

FIELD_FORMAT = "dnlslab-field-v1"


def field_to_dict(f: Field) -> dict:
    data = np.empty(2 * f.grid.K, dtype=np.float64)
    data[0::2] = f.values.real
    data[1::2] = f.values.imag
    return {
        "format": FIELD_FORMAT,
        "L": f.grid.L,
        "K": f.grid.K,
        "representation": f.representation,
        "data": data.tolist(),
    }


def field_from_dict(d: dict) -> Field:
    if d.get("format") != FIELD_FORMAT:
        raise ContractViolation(f"unknown field format {d.get('format')!r}")
    data = np.asarray(d["data"], dtype=np.float64)
    values = data[0::2] + 1j * data[1::2]
    return Field(Grid(float(d["L"]), int(d["K"])), values, d["representation"])


def save_field(f: Field, path: str | Path) -> None:
    Path(path).write_text(json.dumps(field_to_dict(f)) + "\n")


def load_field(path: str | Path) -> Field:
    return field_from_dict(json.loads(Path(path).read_text()))
