"""Time integration of the derivative NLS equation and its gauged form.

Equations (lambda real, default 1):

  "dnls":    u_t = i u_xx + lambda * d_x(|u|^2 u)
  "gauged":  w_t = i w_xx - w^2 d_x(conj w) + (i/2) |w|^4 w

Integrator: integrating-factor RK4 (exact linear propagator exp(-i xi^2 t)
in spectral space).  All nonlinear products are evaluated alias-free on a
zero-padded grid and the result is restricted to the 2/3 dealiasing band, so
the semi-discrete system is the exact spectral Galerkin truncation of the
band.  That exactness is what the multiplier-identity tests lean on.
"""
from __future__ import annotations

import csv
import json
from dataclasses import dataclass, field as dc_field
from pathlib import Path

import numpy as np

from .config import BLOWUP_FACTOR
from .errors import BlowUpError, DomainError, MassConstraintError
from .spectral import (
    Field,
    Grid,
    PHYSICAL,
    SPECTRAL,
    SQRT_2PI,
    boundary_mass_fraction,
    derivative,
    field_from_dict,
    field_to_dict,
    integrate_product,
    l2_norm,
)

EQ_DNLS = "dnls"
EQ_GAUGED = "gauged"


@dataclass(frozen=True)
class SimConfig:
    grid: Grid
    dt: float
    T: float
    equation: str = EQ_GAUGED
    lam: float = 1.0
    dealias: bool = True
    sample_every: int = 0  # 0 -> only first/last sample
    check_mass: bool = True
    cfl_constant: float = 10.0

    def __post_init__(self) -> None:
        if self.equation not in (EQ_DNLS, EQ_GAUGED):
            raise DomainError(f"unknown equation {self.equation!r}")
        if self.dt == 0.0 or self.T == 0.0 or self.dt * self.T < 0.0:
            raise DomainError("dt and T must be nonzero and share a sign")
        xi_max = np.pi * self.grid.K / self.grid.L
        if abs(self.dt) > self.cfl_constant / xi_max**2:
            raise DomainError(
                f"dt={self.dt} exceeds the step-size guard "
                f"{self.cfl_constant / xi_max**2:.3e} for K={self.grid.K}"
            )


@dataclass
class Trajectory:
    grid: Grid
    equation: str
    lam: float
    dt: float
    band: int
    times: np.ndarray = dc_field(default_factory=lambda: np.empty(0))
    fields: list = dc_field(default_factory=list)
    ledger: dict = dc_field(default_factory=dict)

    def field_at(self, i: int) -> Field:
        return self.fields[i]

    def sample_index(self, t: float) -> int:
        i = int(np.argmin(np.abs(self.times - t)))
        if abs(self.times[i] - t) > 1e-9 * max(1.0, abs(t)):
            raise DomainError(f"no sample at t={t}; nearest is {self.times[i]}")
        return i

    def save(self, directory: str | Path) -> None:
        d = Path(directory)
        d.mkdir(parents=True, exist_ok=True)
        meta = {
            "format": "dnlslab-trajectory-v1",
            "grid": {"L": self.grid.L, "K": self.grid.K},
            "equation": self.equation,
            "lambda": self.lam,
            "dt": self.dt,
            "band": self.band,
            "times": self.times.tolist(),
        }
        (d / "metadata.json").write_text(json.dumps(meta, indent=1) + "\n")
        with open(d / "ledger.csv", "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["t", "mass", "hamiltonian", "energy_E"])
            for i, t in enumerate(self.times):
                w.writerow(
                    [
                        repr(float(t)),
                        repr(float(self.ledger["mass"][i])),
                        repr(float(self.ledger["hamiltonian"][i])),
                        repr(float(self.ledger["energy_E"][i])),
                    ]
                )
        for i, f in enumerate(self.fields):
            (d / f"field_{i:06d}.json").write_text(
                json.dumps(field_to_dict(f)) + "\n"
            )

    @classmethod
    def load(cls, directory: str | Path) -> "Trajectory":
        d = Path(directory)
        meta = json.loads((d / "metadata.json").read_text())
        grid = Grid(meta["grid"]["L"], meta["grid"]["K"])
        traj = cls(
            grid=grid,
            equation=meta["equation"],
            lam=meta["lambda"],
            dt=meta["dt"],
            band=meta["band"],
            times=np.asarray(meta["times"]),
        )
        traj.fields = [
            field_from_dict(json.loads(p.read_text()))
            for p in sorted(d.glob("field_*.json"))
        ]
        ledger = {"mass": [], "hamiltonian": [], "energy_E": []}
        with open(d / "ledger.csv", newline="") as fh:
            for row in csv.DictReader(fh):
                ledger["mass"].append(float(row["mass"]))
                ledger["hamiltonian"].append(float(row["hamiltonian"]))
                ledger["energy_E"].append(float(row["energy_E"]))
        traj.ledger = {k: np.asarray(v) for k, v in ledger.items()}
        return traj


# -- conserved functionals ------------------------------------------------------


def mass(f: Field) -> float:
    return l2_norm(f) ** 2


def _im_cubic_flux(f: Field) -> float:
    """Im int |f|^2 f conj(f_x) dx, alias-free."""
    fx = derivative(f)
    fp = f.to_physical()
    conj_f = Field(f.grid, np.conj(fp.values), PHYSICAL)
    conj_fx = Field(f.grid, np.conj(fx.phys), PHYSICAL)
    val = integrate_product([fp, conj_f, fp, conj_fx], f.grid, pad=3)
    return float(val.imag)


def _sextic(f: Field) -> float:
    fp = f.to_physical()
    conj_f = Field(f.grid, np.conj(fp.values), PHYSICAL)
    val = integrate_product([fp, conj_f] * 3, f.grid, pad=4)
    return float(val.real)


def hamiltonian(u: Field, lam: float = 1.0) -> float:
    """H(u) = int |u_x|^2 + (3 lam/2) Im |u|^2 u conj(u_x) + (lam^2/2) |u|^6."""
    kin = l2_norm(derivative(u)) ** 2
    return kin + 1.5 * lam * _im_cubic_flux(u) + 0.5 * lam**2 * _sextic(u)


def energy_E(f: Field) -> float:
    """E(f) = int |f_x|^2 - (1/2) Im int |f|^2 f conj(f_x)."""
    return l2_norm(derivative(f)) ** 2 - 0.5 * _im_cubic_flux(f)


# -- right-hand sides ------------------------------------------------------------


def _nl_spectrum(equation: str, spec: np.ndarray, grid: Grid, lam: float,
                 mask: np.ndarray) -> np.ndarray:
    """Spectrum of the nonlinear part of the time derivative, dealiased."""
    from .spectral import padded_product

    f = Field(grid, spec, SPECTRAL)
    conj_f = Field(grid, np.conj(f.phys), PHYSICAL)
    if equation == EQ_DNLS:
        p3 = padded_product([f, conj_f, f], grid, pad=2)
        out = lam * (1j * grid.xi) * p3
    else:
        fx_conj = Field(grid, np.conj(derivative(f).phys), PHYSICAL)
        cubic = padded_product([f, f, fx_conj], grid, pad=2)
        quintic = padded_product([f, conj_f, f, conj_f, f], grid, pad=3)
        out = -cubic + 0.5j * quintic
    return out * mask


def rhs_eval(equation: str, f: Field, lam: float = 1.0, dealias: bool = True) -> Field:
    """Time derivative of the field under the chosen equation."""
    g = f.grid
    mask = g.dealias_mask if dealias else g.nyquist_mask
    spec = f.spec
    lin = -1j * g.xi**2 * spec
    nl = _nl_spectrum(equation, spec, g, lam, mask)
    return Field(g, lin + nl, SPECTRAL)


# -- time stepping ----------------------------------------------------------------


def evolve(cfg: SimConfig, w0: Field) -> Trajectory:
    """Integrating-factor RK4 evolution; deterministic, ledger at samples."""
    g = cfg.grid
    if cfg.equation == EQ_GAUGED and cfg.check_mass:
        m0 = l2_norm(w0)
        if m0 >= SQRT_2PI:
            raise MassConstraintError(
                f"gauged evolution requires L2 mass < sqrt(2*pi), got {m0:.6f}"
            )
    mask = g.dealias_mask if cfg.dealias else g.nyquist_mask
    spec = w0.spec * mask
    amp0 = float(np.max(np.abs(Field(g, spec, SPECTRAL).phys)))

    n_steps = int(round(cfg.T / cfg.dt))
    if abs(n_steps * cfg.dt - cfg.T) > 1e-9 * abs(cfg.T):
        raise DomainError(f"T={cfg.T} is not an integer number of steps dt={cfg.dt}")
    sample_every = cfg.sample_every if cfg.sample_every > 0 else max(n_steps, 1)

    xi2 = g.xi**2
    e_half = np.exp(-1j * xi2 * (cfg.dt / 2.0))
    e_full = e_half * e_half

    def nl(s: np.ndarray) -> np.ndarray:
        return _nl_spectrum(cfg.equation, s, g, cfg.lam, mask)

    traj = Trajectory(
        grid=g, equation=cfg.equation, lam=cfg.lam, dt=cfg.dt, band=g.band
    )
    times, fields = [], []
    ledger = {"mass": [], "hamiltonian": [], "energy_E": []}

    def record(t: float, s: np.ndarray) -> None:
        f = Field(g, s, SPECTRAL)
        amp = float(np.max(np.abs(f.phys)))
        if not np.isfinite(amp) or amp > BLOWUP_FACTOR * max(amp0, 1e-300):
            raise BlowUpError(
                f"blow-up detected at t={t} (amplitude {amp:.3e})",
                last_valid_time=times[-1] if times else 0.0,
            )
        times.append(t)
        fields.append(f)
        ledger["mass"].append(mass(f))
        ledger["hamiltonian"].append(hamiltonian(f, cfg.lam))
        ledger["energy_E"].append(energy_E(f))

    record(0.0, spec)
    for step in range(1, n_steps + 1):
        k1 = cfg.dt * nl(spec)
        k2 = cfg.dt * nl(e_half * (spec + 0.5 * k1))
        k3 = cfg.dt * nl(e_half * spec + 0.5 * k2)
        k4 = cfg.dt * nl(e_full * spec + e_half * k3)
        spec = e_full * spec + (e_full * k1 + 2.0 * e_half * (k2 + k3) + k4) / 6.0
        if step % sample_every == 0 or step == n_steps:
            record(step * cfg.dt, spec)

    traj.times = np.asarray(times)
    traj.fields = fields
    traj.ledger = {k: np.asarray(v) for k, v in ledger.items()}
    return traj


# -- rescaling ---------------------------------------------------------------------


def rescale(f: Field, mu: float, boundary_tol: float = 1e-8) -> Field:
    """w_mu(x) = mu^{-1/2} w(x_c + (x - x_c)/mu) about the box centre.

    L^2-invariant; the H^1 seminorm scales by 1/mu.  Raises DomainError when
    the rescaled support no longer fits inside the box.
    """
    if mu <= 0:
        raise DomainError(f"scale factor must be positive, got {mu}")
    g = f.grid
    if mu == 1.0:
        return f.to_physical()
    xc = g.L / 2.0
    y = xc + (g.x - xc) / mu
    spec = f.spec
    # direct trigonometric evaluation at the stretched points
    phases = np.exp(1j * np.outer(y, g.xi))
    vals = phases @ spec / np.sqrt(g.L)
    out = Field(g, mu ** (-0.5) * vals, PHYSICAL)
    if boundary_mass_fraction(out) > boundary_tol:
        raise DomainError(
            f"rescale by mu={mu} pushes support into the box boundary"
        )
    return out
