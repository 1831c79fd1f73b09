"""Smoothing multiplier, hyperplane multiplier family and resonant sets.

All multiplier evaluators are pure functions operating on arrays of shape
(B, n): B frequency tuples of arity n lying on the zero-sum hyperplane.
Frequencies are physical (same units as grid.xi).

Sign conventions are pinned in one place (see _BETA6_SIGN below): the
quadratic part of the 6-multiplier carries the sign forced by the collapse
identity (the multiplier must vanish identically wherever the smoothing
multiplier is 1) and confirmed dynamically by the order-2 derivative
identity test.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from .config import SIGMA6_ALPHA_FLOOR, ComparisonPolicy
from .errors import DomainError, SingularityError
from .spectral import Field, SPECTRAL

#: sign of the quadratic block in the 6-multiplier, relative to
#: (i/6) * sum_j (-1)^j m_j^2 xi_j^2.  Pinned by the plateau collapse
#: identity; do not change without re-running the identity suite.
_BETA6_SIGN = +1.0

#: relative threshold below which a denominator factor counts as singular
_SING_REL = 1e-6


# -- smoothing multiplier -------------------------------------------------------


@dataclass(frozen=True)
class IParams:
    """Frequency cutoff N, Sobolev index s and tail variant of the
    smoothing multiplier m.

    m(xi) = 1 for |xi| <= N and N^{1-s} |xi|^{s-1} for |xi| > 2N.  The
    "sharp" tail applies the power law immediately above N (continuous,
    piecewise smooth); "blend" interpolates with a C^2 monotone smoothstep
    in log-log coordinates on (N, 2N).
    """

    N: float
    s: float = 0.5
    tail: str = "sharp"

    def __post_init__(self) -> None:
        if self.N < 1:
            raise DomainError(f"cutoff N must be >= 1, got {self.N}")
        if not 0.0 < self.s < 1.0:
            raise DomainError(f"Sobolev index must lie in (0,1), got {self.s}")
        if self.tail not in ("sharp", "blend"):
            raise DomainError(f"unknown tail variant {self.tail!r}")

    def m2(self, xi) -> np.ndarray:
        """m(xi)^2; for the sharp tail this is min(1, N/|xi|)^{2-2s}."""
        a = np.abs(np.asarray(xi, dtype=np.float64))
        if self.tail == "sharp":
            r = np.minimum(1.0, self.N / np.maximum(a, 1e-300))
            if self.s == 0.5:
                return r
            return r ** (2.0 - 2.0 * self.s)
        out = np.ones_like(a)
        mid = (a > self.N) & (a < 2.0 * self.N)
        hi = a >= 2.0 * self.N
        u = np.log2(a[mid] / self.N)
        smooth = u**3 * (10.0 - 15.0 * u + 6.0 * u**2)
        out[mid] = np.exp(2.0 * (self.s - 1.0) * smooth * u * np.log(2.0))
        out[hi] = (self.N / a[hi]) ** (2.0 - 2.0 * self.s)
        return out

    def m(self, xi) -> np.ndarray:
        return np.sqrt(self.m2(xi))

    def dm2(self, xi) -> np.ndarray:
        """d(m^2)/dxi, analytic except at the plateau edge (one-sided there)."""
        x = np.asarray(xi, dtype=np.float64)
        a = np.abs(x)
        sgn = np.sign(x)
        out = np.zeros_like(a)
        if self.tail == "sharp":
            hi = a > self.N
            out[hi] = (
                (2.0 * self.s - 2.0)
                * self.N ** (2.0 - 2.0 * self.s)
                * a[hi] ** (2.0 * self.s - 3.0)
                * sgn[hi]
            )
            return out
        mid = (a > self.N) & (a < 2.0 * self.N)
        hi = a >= 2.0 * self.N
        u = np.log2(a[mid] / self.N)
        smooth = u**3 * (10.0 - 15.0 * u + 6.0 * u**2)
        dsmooth = u**2 * (30.0 - 60.0 * u + 30.0 * u**2)
        m2 = np.exp(2.0 * (self.s - 1.0) * np.log(2.0) * smooth * u)
        out[mid] = (
            m2
            * 2.0
            * (self.s - 1.0)
            * (dsmooth * u + smooth)
            / a[mid]
            * sgn[mid]
        )
        out[hi] = (
            (2.0 * self.s - 2.0)
            * self.N ** (2.0 - 2.0 * self.s)
            * a[hi] ** (2.0 * self.s - 3.0)
            * sgn[hi]
        )
        return out

    def as_dict(self) -> dict:
        return {"N": self.N, "s": self.s, "tail": self.tail}


def m_eval(xi: float, p: IParams) -> float:
    return float(p.m(np.asarray([xi]))[0])


def apply_I(f: Field, p: IParams) -> Field:
    """Coefficientwise multiplication of the spectrum by m."""
    g = f.grid
    return Field(g, f.spec * p.m(g.xi), SPECTRAL)


# -- frequency tuples -----------------------------------------------------------


class FrequencyTuple:
    """Even-arity real frequency tuple constrained to the zero-sum hyperplane."""

    def __init__(self, xi):
        xi = np.asarray(xi, dtype=np.float64)
        if xi.ndim != 1 or xi.size % 2 != 0 or xi.size < 2:
            raise DomainError("frequency tuple must be 1-d with even arity")
        scale = np.max(np.abs(xi))
        if scale > 0 and abs(xi.sum()) > 1e-9 * scale:
            raise DomainError(
                f"tuple off the zero-sum hyperplane: sum={xi.sum():.3e}"
            )
        self.xi = xi

    @property
    def n(self) -> int:
        return self.xi.size

    @property
    def stars(self) -> np.ndarray:
        return np.sort(np.abs(self.xi))[::-1]

    def as_row(self) -> np.ndarray:
        return self.xi.reshape(1, -1)


def close_tuple(partial) -> np.ndarray:
    """Append the frequency forced by the zero-sum constraint."""
    partial = np.atleast_2d(np.asarray(partial, dtype=np.float64))
    return np.concatenate([partial, -partial.sum(axis=1, keepdims=True)], axis=1)


def star_magnitudes(tuples: np.ndarray) -> np.ndarray:
    """Row-wise magnitudes sorted descending."""
    return np.sort(np.abs(tuples), axis=1)[:, ::-1]


def alpha_n(tuples: np.ndarray) -> np.ndarray:
    """alpha_n = i * sum_j (-1)^j xi_j^2 (1-based alternating signs)."""
    t = np.atleast_2d(tuples)
    signs = np.array([(-1.0) ** (c + 1) for c in range(t.shape[1])])
    return 1j * np.sum(signs * t**2, axis=1)


def alpha_eval(t: FrequencyTuple) -> complex:
    return complex(alpha_n(t.as_row())[0])


# -- the four-linear multiplier ---------------------------------------------------


def _vtail(x1, x2, x3, x4, p: IParams):
    mu = lambda x: p.m2(x) - 1.0
    return (
        x1**2 * x3 * mu(x1)
        + x2**2 * x4 * mu(x2)
        + x3**2 * x1 * mu(x3)
        + x4**2 * x2 * mu(x4)
    )


def _vtail_deriv(x1, x3b, p: IParams):
    """d/dg of the tail numerator along (x1, -x1+g, x3b, -x3b-g) at g=0."""
    mu1 = p.m2(x1) - 1.0
    mu3 = p.m2(x3b) - 1.0
    dmu1 = p.dm2(x1)
    dmu3 = p.dm2(x3b)
    return (
        2.0 * x1 * x3b * mu1
        - x1**2 * mu1
        + x1**2 * x3b * dmu1
        - 2.0 * x1 * x3b * mu3
        + x3b**2 * mu3
        - x1 * x3b**2 * dmu3
    )


def m4_eval(tuples: np.ndarray, p: IParams, mu=None) -> np.ndarray:
    """Robust evaluation of the four-linear multiplier.

    Uses the exact split  M4 = (xi1+xi3)/2 - Vtail / (2 (xi1+xi2)(xi1+xi4))
    whose first term carries the whole plateau contribution, so the removable
    singularities on {xi1+xi2=0} and {xi1+xi4=0} only involve the tail part.
    Near those sets the directional limit along the hyperplane is used.

    mu, when given, holds the four precomputed columns of m^2 - 1 (callers
    evaluating many contracted variants share them).
    """
    t = np.atleast_2d(np.asarray(tuples, dtype=np.float64))
    if t.shape[1] != 4:
        raise DomainError("m4_eval expects arity-4 tuples")
    x1, x2, x3, x4 = t[:, 0], t[:, 1], t[:, 2], t[:, 3]
    g1 = x1 + x2
    g2 = x1 + x4
    scale = np.max(np.abs(t), axis=1)
    thr = _SING_REL * np.maximum(scale, 1e-300)
    flat = 0.5 * (x1 + x3)

    out = np.empty(t.shape[0], dtype=np.float64)
    ok = (np.abs(g1) > thr) & (np.abs(g2) > thr)
    if np.any(ok):
        if mu is not None:
            m1, m2_, m3, m4_ = (m[ok] for m in mu)
            vt = (
                x1[ok] ** 2 * x3[ok] * m1
                + x2[ok] ** 2 * x4[ok] * m2_
                + x3[ok] ** 2 * x1[ok] * m3
                + x4[ok] ** 2 * x2[ok] * m4_
            )
        else:
            vt = _vtail(x1[ok], x2[ok], x3[ok], x4[ok], p)
        out[ok] = flat[ok] - vt / (2.0 * g1[ok] * g2[ok])

    s1 = (~ok) & (np.abs(g2) > thr)  # xi1+xi2 ~ 0
    s2 = (~ok) & (np.abs(g1) > thr)  # xi1+xi4 ~ 0
    s3 = (~ok) & ~s1 & ~s2  # both ~ 0
    if np.any(s1):
        x3b = 0.5 * (x3[s1] - x4[s1])
        d1 = _vtail_deriv(x1[s1], x3b, p)
        out[s1] = flat[s1] - d1 / (2.0 * g2[s1])
    if np.any(s2):
        # swap symmetry in the even slots: M4(x1,x2,x3,x4) = M4(x1,x4,x3,x2)
        x3b = 0.5 * (x3[s2] - x2[s2])
        d1 = _vtail_deriv(x1[s2], x3b, p)
        out[s2] = flat[s2] - d1 / (2.0 * g1[s2])
    if np.any(s3):
        xb = 0.5 * (x1[s3] + x3[s3])
        vt_here = _vtail(x1[s3], x2[s3], x3[s3], x4[s3], p)
        leftover = np.abs(vt_here) > 1e3 * (
            (np.abs(g1[s3]) + np.abs(g2[s3])) * scale[s3] ** 2 + 1e-300
        )
        if np.any(leftover):
            raise SingularityError(
                "four-linear multiplier evaluated at a doubly singular point "
                "with non-vanishing numerator residual"
            )
        h = 1e-3 * np.maximum(scale[s3], 1.0)
        vpp = (
            _vtail(xb, -xb + h, xb, -xb - h, p)
            + _vtail(xb, -xb - h, xb, -xb + h, p)
        ) / h**2
        out[s3] = flat[s3] + 0.25 * vpp
    return out


def M4_eval(t: FrequencyTuple, p: IParams) -> float:
    return float(m4_eval(t.as_row(), p)[0])


# -- the six-linear multiplier -----------------------------------------------------

#: canonical coefficient of the merged 18-term block (see m6_eval_literal for
#: the defining 144-term sum this regroups exactly)
C6 = -1j / 9.0


def beta6(tuples: np.ndarray, p: IParams) -> np.ndarray:
    t = np.atleast_2d(tuples)
    m2 = p.m2(t)
    signs = np.array([(-1.0) ** (c + 1) for c in range(6)])
    return _BETA6_SIGN * (1j / 6.0) * np.sum(signs * m2 * t**2, axis=1)


#: the 18 distinct contracted terms of the six-multiplier: (block triple,
#: arity-4 slot layout with 0 marking the block slot, weight index); 1-based.
_M6_TABLE = (
    ((2, 1, 4), (3, 0, 5, 6), 1), ((2, 1, 6), (3, 0, 5, 4), 1), ((4, 1, 6), (3, 0, 5, 2), 1),
    ((1, 2, 3), (0, 4, 5, 6), 2), ((1, 2, 5), (0, 4, 3, 6), 2), ((3, 2, 5), (0, 4, 1, 6), 2),
    ((2, 3, 4), (1, 0, 5, 6), 3), ((2, 3, 6), (1, 0, 5, 4), 3), ((4, 3, 6), (1, 0, 5, 2), 3),
    ((1, 4, 3), (0, 2, 5, 6), 4), ((1, 4, 5), (0, 2, 3, 6), 4), ((3, 4, 5), (0, 2, 1, 6), 4),
    ((2, 5, 4), (1, 0, 3, 6), 5), ((2, 5, 6), (1, 0, 3, 4), 5), ((4, 5, 6), (1, 0, 3, 2), 5),
    ((1, 6, 3), (0, 2, 5, 4), 6), ((1, 6, 5), (0, 2, 3, 4), 6), ((3, 6, 5), (0, 2, 1, 4), 6),
)


def _m6_block_terms(t: np.ndarray, p: IParams, band_xi: float | None = None) -> np.ndarray:
    """Sum of the 18 distinct contracted four-multiplier terms.

    band_xi, when given, multiplies each term by the indicator
    |block sum| <= band_xi; that is the multiplier the band-truncated
    Galerkin flow actually produces (products outside the dealiasing band
    never enter the dynamics)."""
    x = [t[:, i] for i in range(6)]
    mu_cols = [p.m2(c) - 1.0 for c in x]
    total = np.zeros(t.shape[0], dtype=np.float64)
    for triple, layout, widx in _M6_TABLE:
        block = x[triple[0] - 1] + x[triple[1] - 1] + x[triple[2] - 1]
        mu_block = p.m2(block) - 1.0
        args = np.stack(
            [block if s == 0 else x[s - 1] for s in layout], axis=1
        )
        mu = [mu_block if s == 0 else mu_cols[s - 1] for s in layout]
        term = m4_eval(args, p, mu=mu) * x[widx - 1]
        if band_xi is not None:
            term = term * (np.abs(block) <= band_xi * (1.0 + 1e-12))
        total += term
    return total


def m6_eval(
    tuples: np.ndarray, p: IParams, band_xi: float | None = None
) -> np.ndarray:
    """Six-linear multiplier: beta6 + C6 * (18 contracted terms).

    Exactly regroups the 144-term assignment sum (multiplicity 8 per distinct
    term); m6_eval_literal keeps the defining sum for cross-checks.  With
    band_xi set, the contracted terms carry the dealiasing-band indicator
    (see _m6_block_terms); the quadratic part needs none since its contracted
    sums are pinned by the zero-sum constraint."""
    t = np.atleast_2d(np.asarray(tuples, dtype=np.float64))
    if t.shape[1] != 6:
        raise DomainError("m6_eval expects arity-6 tuples")
    return beta6(t, p) + C6 * _m6_block_terms(t, p, band_xi)


def m6_eval_literal(tuples: np.ndarray, p: IParams) -> np.ndarray:
    """Defining 144-term form: -(i/72) * sum over ordered odd/even assignments."""
    t = np.atleast_2d(np.asarray(tuples, dtype=np.float64))
    x = {i + 1: t[:, i] for i in range(6)}
    total = np.zeros(t.shape[0], dtype=np.float64)

    def M4(a, b, c, d):
        return m4_eval(np.stack([a, b, c, d], axis=1), p)

    for (a, c, e) in itertools.permutations((1, 3, 5)):
        for (b, d, f) in itertools.permutations((2, 4, 6)):
            total += M4(x[a] + x[b] + x[c], x[d], x[e], x[f]) * x[b]
            total += M4(x[a], x[b] + x[c] + x[d], x[e], x[f]) * x[c]
            total += M4(x[a], x[b], x[c] + x[d] + x[e], x[f]) * x[d]
            total += M4(x[a], x[b], x[c], x[d] + x[e] + x[f]) * x[e]
    return beta6(t, p) + (-1j / 72.0) * total


def M6_eval(t: FrequencyTuple, p: IParams) -> complex:
    return complex(m6_eval(t.as_row(), p)[0])


# -- resonant decomposition ---------------------------------------------------------

OUTSIDE, OMEGA1, OMEGA2, OMEGA3 = 0, 1, 2, 3


def omega_flags(
    tuples: np.ndarray, p: IParams, pol: ComparisonPolicy
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Membership masks for the three non-resonant subsets.

    The set definitions live on the representative with odd-slot and
    even-slot magnitudes sorted; the conditions below are phrased directly
    in terms of those sorted magnitudes, which makes the classification
    invariant under the slot-parity swap (needed so the quotient multiplier
    defines a real functional).
    """
    t = np.atleast_2d(np.asarray(tuples, dtype=np.float64))
    if t.shape[1] != 6:
        raise DomainError("omega classification expects arity-6 tuples")
    mags = np.abs(t)
    stars = np.sort(mags, axis=1)[:, ::-1]
    odd_m = np.sort(mags[:, 0::2], axis=1)[:, ::-1]
    even_m = np.sort(mags[:, 1::2], axis=1)[:, ::-1]
    # signed values of the class leaders (largest odd / even slot entries)
    odd_lead = np.take_along_axis(
        t[:, 0::2], np.argmax(mags[:, 0::2], axis=1)[:, None], axis=1
    )[:, 0]
    even_lead = np.take_along_axis(
        t[:, 1::2], np.argmax(mags[:, 1::2], axis=1)[:, None], axis=1
    )[:, 0]

    ups = pol.at_least(stars[:, 1], p.N) & pol.similar(stars[:, 0], stars[:, 1])

    om1 = ups & (
        (pol.similar(odd_m[:, 0], odd_m[:, 1]) & pol.much_greater(odd_m[:, 1], stars[:, 2]))
        | (pol.similar(even_m[:, 0], even_m[:, 1]) & pol.much_greater(even_m[:, 1], stars[:, 2]))
    )

    big = np.maximum(odd_m[:, 0], even_m[:, 0])
    small = np.minimum(odd_m[:, 0], even_m[:, 0])
    gap = np.abs(odd_lead + even_lead)
    om2 = (
        ups
        & pol.similar(odd_m[:, 0], even_m[:, 0])
        & pol.at_least(small, p.N)
        & pol.much_greater(p.N, stars[:, 2])
        & pol.much_greater(np.sqrt(big) * gap, stars[:, 2] ** 1.5)
    )

    om3 = ups & pol.much_greater(stars[:, 2], stars[:, 3])
    return om1, om2, om3


def omega_classify(
    tuples: np.ndarray, p: IParams, pol: ComparisonPolicy
) -> np.ndarray:
    """Region code per tuple: 0 outside, 1/2/3 for the three non-resonant
    subsets (reported with precedence 1 > 2 > 3; membership in the union is
    what the resonant quotient uses)."""
    om1, om2, om3 = omega_flags(tuples, p, pol)
    codes = np.zeros(om1.shape[0], dtype=np.int64)
    codes[om3] = OMEGA3
    codes[om2] = OMEGA2
    codes[om1] = OMEGA1
    return codes


def sigma6(
    tuples: np.ndarray, p: IParams, pol: ComparisonPolicy
) -> tuple[np.ndarray, int]:
    """Resonant quotient: -M6/alpha6 on the non-resonant union, 0 elsewhere.

    Returns (values, leak_count).  A leak is a tuple classified inside the
    union whose |alpha6| falls below the absolute floor; its value is clamped
    to 0 and counted rather than raised (the policy constants, not the
    mathematics, decide leakage).
    """
    t = np.atleast_2d(np.asarray(tuples, dtype=np.float64))
    vals = np.zeros(t.shape[0], dtype=np.complex128)
    # cheap necessary condition for the union: second-largest >= gate
    gate = pol.C_gtr * p.N
    second = np.partition(np.abs(t), t.shape[1] - 2, axis=1)[:, t.shape[1] - 2]
    cand = second >= gate
    if not np.any(cand):
        return vals, 0
    tc = t[cand]
    codes = omega_classify(tc, p, pol)
    inside = codes > 0
    leaks = 0
    sub_all = np.zeros(tc.shape[0], dtype=np.complex128)
    if np.any(inside):
        ti = tc[inside]
        a6 = alpha_n(ti)
        floor = SIGMA6_ALPHA_FLOOR * star_magnitudes(ti)[:, 0] ** 2
        good = np.abs(a6) >= floor
        leaks = int(np.sum(~good))
        m6 = m6_eval(ti, p)
        sub = np.zeros(ti.shape[0], dtype=np.complex128)
        sub[good] = -m6[good] / a6[good]
        sub_all[inside] = sub
    vals[cand] = sub_all
    return vals, leaks


def sigma6_eval(t: FrequencyTuple, p: IParams, pol: ComparisonPolicy) -> complex:
    v, _ = sigma6(t.as_row(), p, pol)
    return complex(v[0])


# -- argument-contraction combinator -------------------------------------------------


def X_shift(j: int, l: int, multiplier, n: int):
    """Contract arguments j..j+l of an arity-n multiplier into one slot,
    producing an arity-(n+l) multiplier (1-based j, even l)."""
    if not 1 <= j <= n:
        raise DomainError(f"slot index {j} outside 1..{n}")
    if l % 2 != 0 or l <= 0:
        raise DomainError(f"contraction length must be positive and even, got {l}")

    def shifted(tuples, *args, **kwargs):
        t = np.atleast_2d(np.asarray(tuples, dtype=np.float64))
        if t.shape[1] != n + l:
            raise DomainError(
                f"contracted multiplier expects arity {n + l}, got {t.shape[1]}"
            )
        block = t[:, j - 1 : j + l].sum(axis=1, keepdims=True)
        new = np.concatenate([t[:, : j - 1], block, t[:, j + l :]], axis=1)
        return multiplier(new, *args, **kwargs)

    return shifted


# -- the eight- and ten-linear multipliers --------------------------------------------

_ODDS8 = (1, 3, 5, 7)
_EVENS8 = (2, 4, 6, 8)


def m8_raw(tuples: np.ndarray, p: IParams) -> np.ndarray:
    """Unsymmetrised eight-multiplier (i/4) sum_j (-1)^{j+1} of the arity-4
    multiplier with arguments j..j+4 contracted.  Equal to m8_eval as a
    hyperplane functional; use m8_eval for pointwise bounds."""
    t = np.atleast_2d(np.asarray(tuples, dtype=np.float64))
    acc = np.zeros(t.shape[0], dtype=np.float64)
    for j in (1, 2, 3, 4):
        block = t[:, j - 1 : j + 4].sum(axis=1, keepdims=True)
        args = np.concatenate([t[:, : j - 1], block, t[:, j + 4 :]], axis=1)
        acc += (-1.0) ** (j + 1) * m4_eval(args, p)
    return 0.25j * acc


def m8_eval(tuples: np.ndarray, p: IParams) -> np.ndarray:
    """Symmetrised eight-multiplier: (i/48) (sum over odd-heavy blocks minus
    sum over even-heavy blocks) of the contracted four-multiplier."""
    t = np.atleast_2d(np.asarray(tuples, dtype=np.float64))
    if t.shape[1] != 8:
        raise DomainError("m8_eval expects arity-8 tuples")
    x = {i + 1: t[:, i] for i in range(8)}

    def M4(a, b, c, d):
        return m4_eval(np.stack([a, b, c, d], axis=1), p)

    odd_sum = np.zeros(t.shape[0], dtype=np.float64)
    for triple in itertools.combinations(_ODDS8, 3):
        g = next(i for i in _ODDS8 if i not in triple)
        for pair in itertools.combinations(_EVENS8, 2):
            f, h = (i for i in _EVENS8 if i not in pair)
            block = sum(x[i] for i in triple) + sum(x[i] for i in pair)
            odd_sum += M4(block, x[f], x[g], x[h])

    even_sum = np.zeros(t.shape[0], dtype=np.float64)
    for triple in itertools.combinations(_EVENS8, 3):
        h = next(i for i in _EVENS8 if i not in triple)
        for pair in itertools.combinations(_ODDS8, 2):
            a, c = (i for i in _ODDS8 if i not in pair)
            block = sum(x[i] for i in triple) + sum(x[i] for i in pair)
            even_sum += M4(x[a], block, x[c], x[h])

    return (1j / 48.0) * (odd_sum - even_sum)


def m8_eval_bruteforce(tuples: np.ndarray, p: IParams) -> np.ndarray:
    """Literal symmetrisation over all odd/even slot relabelings (oracle)."""
    t = np.atleast_2d(np.asarray(tuples, dtype=np.float64))
    acc = np.zeros(t.shape[0], dtype=np.complex128)
    count = 0
    for po in itertools.permutations(range(0, 8, 2)):
        for pe in itertools.permutations(range(1, 8, 2)):
            perm = np.empty(8, dtype=np.int64)
            perm[0::2] = po
            perm[1::2] = pe
            acc += m8_raw(t[:, perm], p)
            count += 1
    return acc / count


def M8_eval(t: FrequencyTuple, p: IParams) -> complex:
    return complex(m8_eval(t.as_row(), p)[0])


def _sigma6_vals(args_cols, p, pol):
    arr = np.stack(args_cols, axis=1)
    v, leaks = sigma6(arr, p, pol)
    return v, leaks


def m8tilde_eval(
    tuples: np.ndarray, p: IParams, pol: ComparisonPolicy,
    symmetrized: bool = True,
) -> tuple[np.ndarray, int]:
    """Eight-multiplier built from the resonant quotient:
    -i sum_j X_j^2(sigma6) xi_{j+1}, symmetrised by default.

    Returns (values, leak_count)."""
    t = np.atleast_2d(np.asarray(tuples, dtype=np.float64))
    if t.shape[1] != 8:
        raise DomainError("m8tilde_eval expects arity-8 tuples")
    x = {i + 1: t[:, i] for i in range(8)}
    leaks = 0
    if not symmetrized:
        acc = np.zeros(t.shape[0], dtype=np.complex128)
        for j in range(1, 7):
            block = t[:, j - 1 : j + 2].sum(axis=1)
            args = [t[:, i] for i in range(j - 1)] + [block] + [
                t[:, i] for i in range(j + 2, 8)
            ]
            v, lk = _sigma6_vals(args, p, pol)
            leaks += lk
            acc += v * t[:, j]  # xi_{j+1} is column j (0-based)
        return -1j * acc, leaks

    odd_sum = np.zeros(t.shape[0], dtype=np.complex128)
    for pair in itertools.combinations(_ODDS8, 2):
        o_rest = [i for i in _ODDS8 if i not in pair]
        for e in _EVENS8:
            e_rest = [i for i in _EVENS8 if i != e]
            block = x[pair[0]] + x[e] + x[pair[1]]
            args = [block, x[e_rest[0]], x[o_rest[0]], x[e_rest[1]],
                    x[o_rest[1]], x[e_rest[2]]]
            v, lk = _sigma6_vals(args, p, pol)
            leaks += lk
            odd_sum += v * x[e]

    even_sum = np.zeros(t.shape[0], dtype=np.complex128)
    for pair in itertools.combinations(_EVENS8, 2):
        e_rest = [i for i in _EVENS8 if i not in pair]
        for c in _ODDS8:
            o_rest = [i for i in _ODDS8 if i != c]
            block = x[pair[0]] + x[c] + x[pair[1]]
            args = [x[o_rest[0]], block, x[o_rest[1]], x[e_rest[0]],
                    x[o_rest[2]], x[e_rest[1]]]
            v, lk = _sigma6_vals(args, p, pol)
            leaks += lk
            even_sum += v * x[c]

    return -(1j / 8.0) * (odd_sum + even_sum), leaks


def M8tilde_eval(t: FrequencyTuple, p: IParams, pol: ComparisonPolicy) -> complex:
    v, _ = m8tilde_eval(t.as_row(), p, pol)
    return complex(v[0])


_ODDS10 = (1, 3, 5, 7, 9)
_EVENS10 = (2, 4, 6, 8, 10)


def m10_eval(
    tuples: np.ndarray, p: IParams, pol: ComparisonPolicy,
    symmetrized: bool = True,
) -> tuple[np.ndarray, int]:
    """Ten-multiplier (i/2) sum_j (-1)^{j+1} X_j^4(sigma6), symmetrised by
    default.  Returns (values, leak_count)."""
    t = np.atleast_2d(np.asarray(tuples, dtype=np.float64))
    if t.shape[1] != 10:
        raise DomainError("m10_eval expects arity-10 tuples")
    x = {i + 1: t[:, i] for i in range(10)}
    leaks = 0
    if not symmetrized:
        acc = np.zeros(t.shape[0], dtype=np.complex128)
        for j in range(1, 7):
            block = t[:, j - 1 : j + 4].sum(axis=1)
            args = [t[:, i] for i in range(j - 1)] + [block] + [
                t[:, i] for i in range(j + 4, 10)
            ]
            v, lk = _sigma6_vals(args, p, pol)
            leaks += lk
            acc += (-1.0) ** (j + 1) * v
        return 0.5j * acc, leaks

    odd_sum = np.zeros(t.shape[0], dtype=np.complex128)
    for triple in itertools.combinations(_ODDS10, 3):
        o_rest = [i for i in _ODDS10 if i not in triple]
        for pair in itertools.combinations(_EVENS10, 2):
            e_rest = [i for i in _EVENS10 if i not in pair]
            block = sum(x[i] for i in triple) + sum(x[i] for i in pair)
            args = [block, x[e_rest[0]], x[o_rest[0]], x[e_rest[1]],
                    x[o_rest[1]], x[e_rest[2]]]
            v, lk = _sigma6_vals(args, p, pol)
            leaks += lk
            odd_sum += v

    even_sum = np.zeros(t.shape[0], dtype=np.complex128)
    for triple in itertools.combinations(_EVENS10, 3):
        e_rest = [i for i in _EVENS10 if i not in triple]
        for pair in itertools.combinations(_ODDS10, 2):
            o_rest = [i for i in _ODDS10 if i not in pair]
            block = sum(x[i] for i in triple) + sum(x[i] for i in pair)
            args = [x[o_rest[0]], block, x[o_rest[1]], x[e_rest[0]],
                    x[o_rest[2]], x[e_rest[1]]]
            v, lk = _sigma6_vals(args, p, pol)
            leaks += lk
            even_sum += v

    return (3j / 200.0) * (odd_sum - even_sum), leaks


def M10_eval(t: FrequencyTuple, p: IParams, pol: ComparisonPolicy) -> complex:
    v, _ = m10_eval(t.as_row(), p, pol)
    return complex(v[0])
