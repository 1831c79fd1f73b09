"""Multilinear hyperplane functionals, modified energies and identity residuals.

The n-linear functional of a multiplier M against a field w is realised as a
lattice sum over integer mode tuples (k_1..k_n) with k_1+...+k_n = 0 and
|k_j| <= K_trunc:

    Lambda_n(M; w) = L^{1-n/2} * sum M(xi) * c_1(k_1) ... c_n(k_n)

where c_j is the spectrum of w in odd slots and of conj(w) in even slots
(so c_j(k) = conj(what(-k)) there).  The prefactor is chosen so that for
product multipliers the sum equals the physical-space integral of the
correspondingly filtered fields; block-contracted multipliers then reduce to
lower-arity sums with product fields in the contracted slots, with no extra
weight.  Block products are masked to the solver's dealiasing band so the
identities hold exactly for the band-truncated Galerkin flow.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .config import ComparisonPolicy, TruncationConfig
from .errors import BudgetError, DomainError
from .multipliers import IParams, alpha_n, apply_I, m4_eval, m6_eval, omega_classify, sigma6
from .solver import Trajectory
from .spectral import Field, PHYSICAL, SPECTRAL, derivative, integrate_product, l2_norm, padded_product


@dataclass
class LambdaResult:
    value: complex
    tuples: int = 0
    sigma_leaks: int = 0


# -- small field helpers ---------------------------------------------------------


def conj_field(f: Field) -> Field:
    return Field(f.grid, np.conj(f.phys), PHYSICAL)


def filt(f: Field, sym) -> Field:
    """Apply a real symbol sym(xi) to the spectrum of f."""
    g = f.grid
    return Field(g, f.spec * sym(g.xi), SPECTRAL)


def xweight(f: Field) -> Field:
    """Symbol xi (physical -i d/dx)."""
    return filt(f, lambda xi: xi)


def block_field(factors, grid, band: int | None = None) -> Field:
    """Alias-free pointwise product of factors, masked to |k| <= band."""
    spec = padded_product(factors, grid, pad=3)
    if band is not None:
        k = grid.k
        spec = spec * ((np.abs(k) <= band) & (k != -grid.K // 2))
    return Field(grid, spec, SPECTRAL)


def _alternating(w: Field, n: int) -> list:
    wb = conj_field(w)
    return [w if j % 2 == 0 else wb for j in range(n)]


# -- generic lattice evaluation ----------------------------------------------------


def _kahan(acc, comp, x):
    t = acc + x
    if abs(acc) >= abs(x):
        comp += (acc - t) + x
    else:
        comp += (x - t) + acc
    return t, comp


def lambda_fields(
    M,
    slot_fields,
    K_trunc: int,
    budget: int = TruncationConfig().budget,
    chunk: int = 2_000_000,
) -> LambdaResult:
    """Lattice sum with per-slot coefficient fields.

    M: vectorized callable on (B, n) arrays of physical frequencies, or None
    for the constant multiplier 1.
    """
    grid = slot_fields[0].grid
    n = len(slot_fields)
    if n % 2 != 0:
        raise DomainError("arity must be even")
    Kt = int(K_trunc)
    if Kt < 1:
        raise DomainError("K_trunc must be positive")
    side = 2 * Kt + 1
    total = side ** (n - 1)
    if total > budget:
        raise BudgetError(
            f"Lambda_{n} at K_trunc={Kt} enumerates {total:.3e} tuples, over "
            f"budget {budget:.3e}; lower K_trunc or use a factorized evaluator"
        )
    coeffs = [f.spec for f in slot_fields]
    offs = np.arange(-Kt, Kt + 1, dtype=np.int64)
    dxi = 2.0 * np.pi / grid.L
    kappa = grid.L ** (1.0 - n / 2.0)

    acc, comp = 0.0 + 0.0j, 0.0 + 0.0j
    count = 0
    for start in range(0, total, chunk):
        flat = np.arange(start, min(start + chunk, total), dtype=np.int64)
        idx = np.unravel_index(flat, (side,) * (n - 1))
        ks = [offs[i] for i in idx]
        klast = -sum(ks)
        keep = np.abs(klast) <= Kt
        if not np.any(keep):
            continue
        cols = [k[keep] for k in ks] + [klast[keep]]
        weight = np.ones(cols[0].shape[0], dtype=np.complex128)
        for j, k in enumerate(cols):
            weight = weight * grid.coeff_by_index(coeffs[j], k)
        if M is None:
            vals = weight
        else:
            xi = np.stack([k * dxi for k in cols], axis=1)
            vals = np.asarray(M(xi)) * weight
        count += cols[0].shape[0]
        acc, comp = _kahan(acc, comp, complex(np.sum(vals)))
    return LambdaResult(value=kappa * (acc + comp), tuples=count)


def lambda_eval(
    M,
    w: Field,
    n: int,
    K_trunc: int,
    budget: int = TruncationConfig().budget,
) -> LambdaResult:
    """Lambda_n(M; w) with the alternating w / conj(w) slot pattern."""
    return lambda_fields(M, _alternating(w, n), K_trunc, budget)


def lambda_product_phys(symbols, w: Field, pad: int = 3) -> complex:
    """Lambda_n of a product multiplier prod_j sym_j(xi_j), evaluated as a
    physical-space integral (exact at full band; no lattice truncation)."""
    g = w.grid
    wb = conj_field(w)
    fields = []
    for j, sym in enumerate(symbols):
        base = w if j % 2 == 0 else wb
        fields.append(base if sym is None else filt(base, sym))
    return integrate_product(fields, g, pad=pad)


# -- modified energies ----------------------------------------------------------------


def quadratic_energy(w: Field, p: IParams) -> float:
    return l2_norm(derivative(apply_I(w, p))) ** 2


def e1_quartic(w: Field, p: IParams) -> float:
    """-(1/2) Im int |Iw|^2 Iw conj(d_x Iw) dx (alias-free)."""
    iw = apply_I(w, p)
    val = integrate_product(
        [iw, conj_field(iw), iw, conj_field(derivative(iw))], w.grid, pad=3
    )
    return -0.5 * float(val.imag)


@dataclass
class EnergyResult:
    value: float
    imag_residual: float = 0.0
    sigma_leaks: int = 0
    tuples: int = 0


def modified_energy(
    order: int,
    w: Field,
    p: IParams,
    pol: ComparisonPolicy | None = None,
    K_trunc: int | None = None,
    budget: int = TruncationConfig().budget,
) -> EnergyResult:
    """First, second or third modified energy of w.

    order 1: quadratic + quartic parts of the energy of the smoothed field,
             evaluated in physical space (exact, no truncation).
    order 2: quadratic part + (1/2) Lambda_4 of the four-multiplier over the
             full dealiasing band.
    order 3: order 2 plus Lambda_6 of the resonant quotient, truncated at
             K_trunc (required; the arity-6 lattice is the expensive one).
    """
    if order == 1:
        val = quadratic_energy(w, p) + e1_quartic(w, p)
        return EnergyResult(value=val)
    band = w.grid.band
    quad = quadratic_energy(w, p)
    r4 = lambda_eval(lambda t: m4_eval(t, p), w, 4, band, budget)
    e2c = quad + 0.5 * r4.value
    if order == 2:
        return EnergyResult(
            value=float(e2c.real),
            imag_residual=abs(e2c.imag),
            tuples=r4.tuples,
        )
    if order != 3:
        raise DomainError(f"modified energy order must be 1, 2 or 3, got {order}")
    if pol is None:
        pol = ComparisonPolicy()
    Kt = K_trunc if K_trunc is not None else TruncationConfig().L6
    leaks = [0]

    def sig(t):
        v, lk = sigma6(t, p, pol)
        leaks[0] += lk
        return v

    r6 = lambda_eval(sig, w, 6, Kt, budget)
    e3c = e2c + r6.value
    return EnergyResult(
        value=float(e3c.real),
        imag_residual=abs(e3c.imag),
        sigma_leaks=leaks[0],
        tuples=r4.tuples + r6.tuples,
    )


# -- multiplier sides of the energy derivatives ----------------------------------------


def _m2_sym(p: IParams):
    return lambda xi: p.m(xi) * xi


def d_e1_multiplier_side(w: Field, p: IParams, band: int | None = None) -> complex:
    """Exact time derivative of the first modified energy along the
    band-truncated flow, assembled from physical-space integrals."""
    g = w.grid
    band = g.band if band is None else band
    m = p.m
    msym = lambda xi: m(xi)
    xm = lambda xi: xi * m(xi)
    x2m2 = lambda xi: xi**2 * m(xi) ** 2
    x = lambda xi: xi
    wb = conj_field(w)

    # Lambda_4 part: i * [X_1^2(M2) xi_2 + X_2^2(M2) xi_3] + M4_loworder * alpha_4
    # with M2 = xi_1 xi_2 m_1 m_2 and M4_loworder = (1/4) xi_13 m1 m2 m3 m4.
    t4 = 1j * (
        -lambda_product_phys([None, x, None, x2m2], w)
        - lambda_product_phys([x2m2, None, x, None], w)
    )
    # (1/4) xi_13 m^4 * alpha_4, alpha_4 = i sum_j (-1)^j xi_j^2
    for a in (0, 2):
        for j in range(4):
            syms: list = [msym, msym, msym, msym]
            syms[a] = xm
            if j == a:
                syms[j] = lambda xi: xi**3 * m(xi)
            else:
                syms[j] = (lambda s: (lambda xi: xi**2 * s(xi)))(syms[j])
            t4 += 0.25 * 1j * (-1.0) ** (j + 1) * lambda_product_phys(syms, w)

    # Lambda_6 from the quintic insertion into the quadratic term:
    # -(i/2) [ Lambda_6(X_1^4(M2)) - Lambda_6(X_2^4(M2)) ]
    p5 = block_field([w, wb, w, wb, w], g, band)  # |w|^4 w, band-masked
    t6 = -0.5j * (
        integrate_product([filt(p5, xm), filt(wb, xm)], g, pad=3)
        - integrate_product([filt(w, xm), filt(conj_field(p5), xm)], g, pad=3)
    )
    # -i sum_j Lambda_6(X_j^2(M4_loworder) xi_{j+1})
    q_odd = block_field([w, xweight(wb), w], g, band)  # odd-slot 3-block
    q_even = block_field([wb, xweight(w), wb], g, band)  # even-slot 3-block
    for j in range(1, 5):
        slots = [w, wb, w, wb]
        slots[j - 1] = q_odd if j % 2 == 1 else q_even
        acc = 0.0 + 0.0j
        for a in (0, 2):
            syms = [msym] * 4
            syms[a] = xm
            fields = [
                filt(f, syms[i]) for i, f in enumerate(slots)
            ]
            acc += integrate_product(fields, g, pad=3)
        t6 += -1j * 0.25 * acc

    # (i/2) sum_j (-1)^{j+1} Lambda_8(X_j^4(M4_loworder))
    t8 = 0.0 + 0.0j
    for j in range(1, 5):
        slots = [w, wb, w, wb]
        slots[j - 1] = p5 if j % 2 == 1 else conj_field(p5)
        acc = 0.0 + 0.0j
        for a in (0, 2):
            syms = [msym] * 4
            syms[a] = xm
            fields = [filt(f, syms[i]) for i, f in enumerate(slots)]
            acc += integrate_product(fields, g, pad=3)
        t8 += 0.5j * (-1.0) ** (j + 1) * 0.25 * acc
    return t4 + t6 + t8


def lambda8_m8(w: Field, p: IParams, band: int | None = None,
               budget: int = TruncationConfig().budget) -> LambdaResult:
    """Lambda_8 of the eight-multiplier via four arity-4 block sums."""
    g = w.grid
    band = g.band if band is None else band
    wb = conj_field(w)
    p5 = block_field([w, wb, w, wb, w], g, band)
    p5b = conj_field(p5)
    total = 0.0 + 0.0j
    tuples = 0
    for j, sign in ((1, +1), (2, -1), (3, +1), (4, -1)):
        slots = [w, wb, w, wb]
        slots[j - 1] = p5 if j % 2 == 1 else p5b
        r = lambda_fields(lambda t: m4_eval(t, p), slots, band, budget)
        total += sign * r.value
        tuples += r.tuples
    return LambdaResult(value=0.25j * total, tuples=tuples)


def _sigma_blocks(w: Field, band: int):
    g = w.grid
    wb = conj_field(w)
    q_odd = block_field([w, xweight(wb), w], g, band)
    q_even = block_field([wb, xweight(w), wb], g, band)
    p_odd = block_field([w, wb, w, wb, w], g, band)
    p_even = conj_field(p_odd)
    return wb, q_odd, q_even, p_odd, p_even


def lambda8_m8tilde(
    w: Field,
    p: IParams,
    pol: ComparisonPolicy,
    K_trunc: int,
    band: int | None = None,
    budget: int = TruncationConfig().budget,
) -> LambdaResult:
    """Lambda_8 of the resonant-quotient eight-multiplier via six arity-6 sums."""
    g = w.grid
    band = g.band if band is None else band
    wb, q_odd, q_even, _, _ = _sigma_blocks(w, band)
    leaks = [0]

    def sig(t):
        v, lk = sigma6(t, p, pol)
        leaks[0] += lk
        return v

    total = 0.0 + 0.0j
    tuples = 0
    for j in range(1, 7):
        slots = _alternating(w, 6)
        slots[j - 1] = q_odd if j % 2 == 1 else q_even
        r = lambda_fields(sig, slots, K_trunc, budget)
        total += r.value
        tuples += r.tuples
    return LambdaResult(value=-1j * total, tuples=tuples, sigma_leaks=leaks[0])


def lambda10_m10(
    w: Field,
    p: IParams,
    pol: ComparisonPolicy,
    K_trunc: int,
    band: int | None = None,
    budget: int = TruncationConfig().budget,
) -> LambdaResult:
    """Lambda_10 of the ten-multiplier via six arity-6 block sums."""
    g = w.grid
    band = g.band if band is None else band
    _, _, _, p_odd, p_even = _sigma_blocks(w, band)
    leaks = [0]

    def sig(t):
        v, lk = sigma6(t, p, pol)
        leaks[0] += lk
        return v

    total = 0.0 + 0.0j
    tuples = 0
    for j in range(1, 7):
        slots = _alternating(w, 6)
        slots[j - 1] = p_odd if j % 2 == 1 else p_even
        r = lambda_fields(sig, slots, K_trunc, budget)
        total += (-1.0) ** (j + 1) * r.value
        tuples += r.tuples
    return LambdaResult(value=0.5j * total, tuples=tuples, sigma_leaks=leaks[0])


def _band_xi(w: Field, band: int | None) -> float:
    b = w.grid.band if band is None else band
    return 2.0 * np.pi * b / w.grid.L


def d_e2_multiplier_side(
    w: Field,
    p: IParams,
    K_trunc: int,
    band: int | None = None,
    budget: int = TruncationConfig().budget,
) -> LambdaResult:
    bxi = _band_xi(w, band)
    r6 = lambda_eval(lambda t: m6_eval(t, p, bxi), w, 6, K_trunc, budget)
    r8 = lambda8_m8(w, p, band, budget)
    return LambdaResult(value=r6.value + r8.value, tuples=r6.tuples + r8.tuples)


def d_e3_multiplier_side(
    w: Field,
    p: IParams,
    pol: ComparisonPolicy,
    K_trunc: int,
    band: int | None = None,
    budget: int = TruncationConfig().budget,
) -> LambdaResult:
    bxi = _band_xi(w, band)

    def m6_nonres(t):
        # banded multiplier minus the non-resonant-union part of the plain
        # one: the union subtraction comes from the quotient's phase term,
        # which carries no band indicator.
        inside = omega_classify(t, p, pol) > 0
        return m6_eval(t, p, bxi) - np.where(inside, m6_eval(t, p), 0.0)

    r6 = lambda_eval(m6_nonres, w, 6, K_trunc, budget)
    r8 = lambda8_m8(w, p, band, budget)
    r8t = lambda8_m8tilde(w, p, pol, K_trunc, band, budget)
    r10 = lambda10_m10(w, p, pol, K_trunc, band, budget)
    return LambdaResult(
        value=r6.value + r8.value + r8t.value + r10.value,
        tuples=r6.tuples + r8.tuples + r8t.tuples + r10.tuples,
        sigma_leaks=r8t.sigma_leaks + r10.sigma_leaks,
    )


# -- identity residuals ------------------------------------------------------------------


@dataclass
class ResidualReport:
    order: int
    dt: float
    K_trunc: int | None
    fd_derivative: float
    multiplier_side: complex
    residual: float
    normalized: float
    sigma_leaks: int = 0

    def as_dict(self) -> dict:
        return {
            "order": self.order,
            "dt": self.dt,
            "K_trunc": self.K_trunc,
            "fd_derivative": self.fd_derivative,
            "multiplier_side_re": self.multiplier_side.real,
            "multiplier_side_im": self.multiplier_side.imag,
            "residual": self.residual,
            "normalized": self.normalized,
            "sigma_leaks": self.sigma_leaks,
        }


def identity_residual(
    order: int,
    w_minus: Field,
    w_center: Field,
    w_plus: Field,
    dt: float,
    p: IParams,
    pol: ComparisonPolicy | None = None,
    K_trunc: int | None = None,
    band: int | None = None,
    budget: int = TruncationConfig().budget,
) -> ResidualReport:
    """Centered-difference energy derivative against the multiplier-side sum."""
    pol = pol or ComparisonPolicy()
    leaks = 0
    if order == 1:
        em = modified_energy(1, w_minus, p)
        ep = modified_energy(1, w_plus, p)
        side = d_e1_multiplier_side(w_center, p, band)
    elif order == 2:
        em = modified_energy(2, w_minus, p, budget=budget)
        ep = modified_energy(2, w_plus, p, budget=budget)
        side_r = d_e2_multiplier_side(w_center, p, K_trunc, band, budget)
        side = side_r.value
    elif order == 3:
        em = modified_energy(3, w_minus, p, pol, K_trunc, budget)
        ep = modified_energy(3, w_plus, p, pol, K_trunc, budget)
        side_r = d_e3_multiplier_side(w_center, p, pol, K_trunc, band, budget)
        side = side_r.value
        leaks = em.sigma_leaks + ep.sigma_leaks + side_r.sigma_leaks
    else:
        raise DomainError(f"identity order must be 1, 2 or 3, got {order}")
    fd = (ep.value - em.value) / (2.0 * dt)
    resid = abs(fd - side)
    scale = abs(fd) + abs(side) + 1e-30
    return ResidualReport(
        order=order,
        dt=dt,
        K_trunc=K_trunc,
        fd_derivative=fd,
        multiplier_side=complex(side),
        residual=resid,
        normalized=resid / scale,
        sigma_leaks=leaks,
    )


def derivative_residual(
    order: int,
    traj: Trajectory,
    t: float,
    p: IParams,
    pol: ComparisonPolicy | None = None,
    K_trunc: int | None = None,
    budget: int = TruncationConfig().budget,
) -> ResidualReport:
    """Residual at an interior sample of a trajectory sampled every step."""
    i = traj.sample_index(t)
    if i == 0 or i == len(traj.times) - 1:
        raise DomainError("residual needs an interior sample with neighbours")
    dt = traj.times[i + 1] - traj.times[i]
    return identity_residual(
        order,
        traj.field_at(i - 1),
        traj.field_at(i),
        traj.field_at(i + 1),
        dt,
        p,
        pol,
        K_trunc,
        band=traj.band,
        budget=budget,
    )
