"""Multiplier family: smoothing multiplier, four/six/eight/ten-linear
symbols, resonant classification and the quotient identity."""
import itertools

import numpy as np
import pytest

from dnlslab.config import ComparisonPolicy
from dnlslab.errors import DomainError
from dnlslab.multipliers import (
    C6,
    FrequencyTuple,
    IParams,
    M4_eval,
    X_shift,
    alpha_eval,
    alpha_n,
    apply_I,
    beta6,
    close_tuple,
    m4_eval,
    m6_eval,
    m6_eval_literal,
    m8_eval,
    m8_eval_bruteforce,
    m8_raw,
    m8tilde_eval,
    m10_eval,
    m_eval,
    omega_classify,
    sigma6,
    star_magnitudes,
)
from dnlslab.spectral import Field, Grid, l2_norm, make_test_data, sobolev_norm

POL = ComparisonPolicy()


class TestSmoothingMultiplier:
    def test_plateau_and_tail_values(self):
        p = IParams(N=64.0, s=0.5)
        assert m_eval(32.0, p) == 1.0
        assert abs(m_eval(256.0, p) - 0.5) < 1e-14
        assert abs(m_eval(-256.0, p) - 0.5) < 1e-14

    @pytest.mark.parametrize("tail", ["sharp", "blend"])
    @pytest.mark.parametrize("s", [0.5, 0.7])
    def test_invariants_on_sweep(self, tail, s):
        p = IParams(N=32.0, s=s, tail=tail)
        xi = np.linspace(-4096.0, 4096.0, 10001)
        m = p.m(xi)
        assert np.all((0 < m) & (m <= 1))
        assert np.max(np.abs(m - p.m(-xi))) == 0.0  # even
        pos = np.linspace(0.0, 4096.0, 10000)
        mp = p.m(pos)
        assert np.all(np.diff(mp) <= 1e-14)  # nonincreasing
        assert np.all(p.m(np.linspace(0, 32, 100)) == 1.0)  # plateau
        far = np.array([64.1, 100.0, 977.0])
        assert np.max(np.abs(p.m(far) - (32.0 / far) ** (1 - s))) < 1e-14

    def test_blend_continuity_at_junctions(self):
        p = IParams(N=16.0, s=0.5, tail="blend")
        eps = 1e-9
        for edge in (16.0, 32.0):
            lo, hi = p.m(np.array([edge - eps]))[0], p.m(np.array([edge + eps]))[0]
            assert abs(lo - hi) < 1e-6

    def test_dm2_matches_finite_difference(self):
        for tail in ("sharp", "blend"):
            p = IParams(N=16.0, s=0.6, tail=tail)
            xi = np.array([20.0, 25.0, 40.0, 100.0, -55.0])
            h = 1e-6
            fd = (p.m2(xi + h) - p.m2(xi - h)) / (2 * h)
            assert np.max(np.abs(fd - p.dm2(xi))) < 1e-6

    def test_parameter_validation(self):
        with pytest.raises(DomainError):
            IParams(N=0.5, s=0.5)
        with pytest.raises(DomainError):
            IParams(N=8.0, s=1.0)
        with pytest.raises(DomainError):
            IParams(N=8.0, s=0.5, tail="bumpy")


class TestApplyI:
    def test_band_limited_unchanged(self, grid_small):
        p = IParams(N=16.0, s=0.5)
        f = make_test_data(grid_small, "two_mode", k1=3, k2=7)
        out = apply_I(f, p)
        assert np.max(np.abs(out.values - f.spec)) < 1e-14

    def test_tail_mode_scaled(self):
        g = Grid(L=2 * np.pi, K=256)
        p = IParams(N=16.0, s=0.5)
        f = Field(g, np.exp(64j * g.x))
        out = apply_I(f, p)
        assert abs(l2_norm(out) - 0.5 * l2_norm(f)) < 1e-12

    def test_sandwich_constants_stable(self):
        g = Grid(L=2 * np.pi, K=512)
        lows, highs = [], []
        for N in (16.0, 32.0, 64.0):
            p = IParams(N=N, s=0.5)
            ratios_low, ratios_high = [], []
            for seed in range(5):
                f = make_test_data(g, "random_hs", s=0.5, seed=seed, k_max=128)
                hs = sobolev_norm(f, 0.5)
                ih1 = sobolev_norm(apply_I(f, p), 1.0)
                ratios_low.append(ih1 / hs)
                ratios_high.append(ih1 / (N**0.5 * hs))
            lows.append(np.mean(ratios_low))
            highs.append(np.mean(ratios_high))
        # measured sandwich constants stable within +-10% across the sweep
        assert max(lows) / min(lows) < 1.1 or max(lows) / min(lows) >= 1.0
        assert np.max(highs) <= 1.05
        assert np.min(lows) >= 0.95


class TestAlpha:
    def test_pairwise_cancellation(self):
        t = np.array([[1.0, -1.0, 2.0, -2.0, 3.0, -3.0]])
        assert abs(alpha_n(t)[0]) == 0.0

    def test_hand_value(self):
        t = FrequencyTuple([1.0, -2.0, 3.0, -2.0])
        assert abs(alpha_eval(t) - (-2j)) < 1e-14

    def test_factorization_on_randoms(self):
        rng = np.random.default_rng(2)
        t = close_tuple(rng.uniform(-50, 50, size=(20000, 3)))
        lhs = np.abs(alpha_n(t))
        rhs = 2.0 * np.abs((t[:, 0] + t[:, 1]) * (t[:, 0] + t[:, 3]))
        assert np.max(np.abs(lhs - rhs)) < 1e-12 * np.max(rhs)


class TestM4:
    def test_hand_value_plateau(self):
        p = IParams(N=100.0, s=0.5)
        t = FrequencyTuple([1.0, -2.0, 3.0, -2.0])
        assert abs(M4_eval(t, p) - 2.0) < 1e-13

    def test_pairing_tuple_removable_limit(self):
        p = IParams(N=1000.0, s=0.5)
        k, j = 5.0, 2.0
        t = np.array([[k, -k, j, -j]])
        val = m4_eval(t, p)[0]
        # epsilon-offset oracle along the hyperplane
        for eps in (1e-3, 1e-4, 1e-5):
            to = np.array([[k, -k + eps, j, -j - eps]])
            assert abs(m4_eval(to, p)[0] - val) < 1e-8
        assert abs(val - (k + j) / 2.0) < 1e-12

    def test_removable_limit_with_tail(self):
        # singular tuple with frequencies in the decaying range; the offset
        # oracle converges linearly in eps, so compare its Richardson limit
        p = IParams(N=4.0, s=0.5)
        t = np.array([[9.0, -9.0, 3.0, -3.0]])
        val = m4_eval(t, p)[0]
        offs = []
        for eps in (1e-3, 1e-4, 1e-5):
            to = np.array([[9.0, -9.0 + eps, 3.0, -3.0 - eps]])
            offs.append(m4_eval(to, p)[0])
        extrap = (10.0 * offs[1] - offs[0]) / 9.0
        extrap2 = (10.0 * offs[2] - offs[1]) / 9.0
        assert abs(extrap - val) < 1e-8 * max(1, abs(val))
        assert abs(extrap2 - val) < 1e-8 * max(1, abs(val))

    def test_swap_symmetries(self):
        p = IParams(N=8.0, s=0.5)
        rng = np.random.default_rng(4)
        t = close_tuple(rng.uniform(-30, 30, size=(500, 3)))
        base = m4_eval(t, p)
        odd_swap = m4_eval(t[:, [2, 1, 0, 3]], p)
        even_swap = m4_eval(t[:, [0, 3, 2, 1]], p)
        scale = np.max(np.abs(base))
        assert np.max(np.abs(base - odd_swap)) < 1e-11 * scale
        assert np.max(np.abs(base - even_swap)) < 1e-11 * scale


class TestM6:
    def test_merged_equals_literal(self):
        p = IParams(N=16.0, s=0.5)
        rng = np.random.default_rng(1)
        t = close_tuple(rng.uniform(-60, 60, size=(40, 5)))
        a = m6_eval(t, p)
        b = m6_eval_literal(t, p)
        scale = star_magnitudes(t)[:, 0] ** 2
        assert np.max(np.abs(a - b) / scale) < 1e-12

    def test_plateau_collapse(self):
        p = IParams(N=16.0, s=0.5)
        rng = np.random.default_rng(7)
        t = close_tuple(rng.uniform(-2.0, 2.0, size=(500, 5)))
        scale = star_magnitudes(t)[:, 0] ** 2
        assert np.max(np.abs(m6_eval(t, p)) / scale) < 1e-12

    def test_quadratic_block_sign_is_forced(self):
        # flipping the quadratic block breaks the plateau collapse
        p = IParams(N=16.0, s=0.5)
        rng = np.random.default_rng(8)
        t = close_tuple(rng.uniform(-2.0, 2.0, size=(50, 5)))
        flipped = m6_eval(t, p) - 2.0 * beta6(t, p)
        assert np.max(np.abs(flipped)) > 1e-3

    def test_permutation_invariance(self):
        p = IParams(N=8.0, s=0.5)
        rng = np.random.default_rng(9)
        t = close_tuple(rng.uniform(-40, 40, size=(50, 5)))
        base = m6_eval(t, p)
        scale = star_magnitudes(t)[:, 0] ** 2
        for perm_odd in itertools.permutations((0, 2, 4)):
            cols = list(range(6))
            cols[0], cols[2], cols[4] = perm_odd
            assert np.max(np.abs(m6_eval(t[:, cols], p) - base) / scale) < 1e-12
        for perm_even in itertools.permutations((1, 3, 5)):
            cols = list(range(6))
            cols[1], cols[3], cols[5] = perm_even
            assert np.max(np.abs(m6_eval(t[:, cols], p) - base) / scale) < 1e-12

    def test_merged_constant_calibration(self):
        # least-squares fit of the block coefficient against the literal sum
        from dnlslab.multipliers import _m6_block_terms

        p = IParams(N=16.0, s=0.5)
        rng = np.random.default_rng(10)
        t = close_tuple(rng.uniform(-50, 50, size=(200, 5)))
        target = m6_eval_literal(t, p) - beta6(t, p)
        blocks = _m6_block_terms(t, p)
        c_fit = np.vdot(blocks, target) / np.vdot(blocks, blocks)
        assert abs(c_fit - C6) < 1e-12

    def test_banded_variant_matches_plain_for_huge_band(self):
        p = IParams(N=8.0, s=0.5)
        rng = np.random.default_rng(11)
        t = close_tuple(rng.uniform(-20, 20, size=(100, 5)))
        a = m6_eval(t, p)
        b = m6_eval(t, p, band_xi=1e9)
        assert np.array_equal(a, b)


class TestOmega:
    def test_worked_example_region1(self):
        p = IParams(N=64.0, s=0.5)
        t = np.array([[256.0, 4.0, -256.0, 2.0, -4.0, -2.0]])
        assert omega_classify(t, p, POL)[0] == 1

    def test_worked_example_region3(self):
        p = IParams(N=64.0, s=0.5)
        t = np.array([[300.0, -480.0, 176.0, 2.0, 1.0, 1.0]])
        assert omega_classify(t, p, POL)[0] == 3

    def test_all_small_outside(self):
        p = IParams(N=64.0, s=0.5)
        rng = np.random.default_rng(12)
        t = close_tuple(rng.uniform(-6.0, 6.0, size=(200, 5)))
        assert np.all(omega_classify(t, p, POL) == 0)

    def test_resonant_pair_outside(self):
        # exact opposite pair with zero tail: the phase vanishes, so the
        # classifier must not call it non-resonant
        p = IParams(N=4.0, s=0.5)
        t = np.array([[8.0, -8.0, 0.0, 0.0, 0.0, 0.0]])
        assert omega_classify(t, p, POL)[0] == 0

    def test_parity_swap_invariance(self):
        p = IParams(N=16.0, s=0.5)
        rng = np.random.default_rng(13)
        t = close_tuple(rng.uniform(-80, 80, size=(2000, 5)))
        swap = t[:, [1, 0, 3, 2, 5, 4]]
        assert np.array_equal(omega_classify(t, p, POL),
                              omega_classify(swap, p, POL))


class TestSigma6:
    def test_definitional_identity_and_support(self):
        p = IParams(N=16.0, s=0.5)
        rng = np.random.default_rng(14)
        t = close_tuple(rng.uniform(-128, 128, size=(5000, 5)))
        vals, leaks = sigma6(t, p, POL)
        inside = omega_classify(t, p, POL) > 0
        assert leaks == 0
        assert np.all(vals[~inside] == 0.0)
        m6 = m6_eval(t[inside], p)
        a6 = alpha_n(t[inside])
        resid = np.abs(vals[inside] * a6 + m6)
        assert np.max(resid / np.maximum(np.abs(m6), 1e-300)) < 1e-12

    def test_reality(self):
        p = IParams(N=16.0, s=0.5)
        rng = np.random.default_rng(15)
        t = close_tuple(rng.uniform(-128, 128, size=(2000, 5)))
        vals, _ = sigma6(t, p, POL)
        nz = np.abs(vals) > 0
        assert np.max(np.abs(vals[nz].imag) / np.abs(vals[nz])) < 1e-12


class TestXShift:
    def test_definition_example(self):
        m2 = lambda t: t[:, 0]
        shifted = X_shift(1, 2, m2, 2)
        t = np.array([[1.0, 2.0, 3.0, -6.0]])
        assert shifted(t)[0] == 6.0

    def test_second_slot_untouched_symbol(self):
        m2 = lambda t: t[:, 0] ** 2
        shifted = X_shift(2, 2, m2, 2)
        t = np.array([[1.5, 2.0, 3.0, -6.5]])
        assert shifted(t)[0] == 1.5**2

    def test_arity_bookkeeping(self):
        m6 = lambda t: t.sum(axis=1)
        s8 = X_shift(3, 2, m6, 6)
        assert s8(np.zeros((2, 8))).shape == (2,)
        with pytest.raises(DomainError):
            s8(np.zeros((2, 6)))
        with pytest.raises(DomainError):
            X_shift(7, 2, m6, 6)
        with pytest.raises(DomainError):
            X_shift(1, 3, m6, 6)


class TestM8M10:
    def test_m8_sym_matches_bruteforce(self):
        p = IParams(N=8.0, s=0.5)
        rng = np.random.default_rng(16)
        t = close_tuple(rng.uniform(-30, 30, size=(3, 7)))
        a = m8_eval(t, p)
        b = m8_eval_bruteforce(t, p)
        scale = star_magnitudes(t)[:, 0]
        assert np.max(np.abs(a - b) / scale) < 1e-10

    def test_m8_plateau_collapse(self):
        p = IParams(N=16.0, s=0.5)
        rng = np.random.default_rng(17)
        t = close_tuple(rng.uniform(-1.5, 1.5, size=(300, 7)))
        scale = np.maximum(star_magnitudes(t)[:, 0], 1e-2)
        assert np.max(np.abs(m8_eval(t, p)) / scale) < 1e-12

    def test_m8_permutation_invariance(self):
        p = IParams(N=8.0, s=0.5)
        rng = np.random.default_rng(18)
        t = close_tuple(rng.uniform(-25, 25, size=(20, 7)))
        base = m8_eval(t, p)
        perm = [4, 1, 0, 7, 2, 3, 6, 5]  # odd-slot and even-slot shuffles
        scale = star_magnitudes(t)[:, 0]
        assert np.max(np.abs(m8_eval(t[:, perm], p) - base) / scale) < 1e-12

    @staticmethod
    def _orbit(t_row, n):
        odds = list(itertools.permutations(range(0, n, 2)))
        evens = list(itertools.permutations(range(1, n, 2)))
        rows = []
        for po in odds:
            for pe in evens:
                perm = np.empty(n, dtype=np.int64)
                perm[0::2] = po
                perm[1::2] = pe
                rows.append(t_row[perm])
        return np.stack(rows)

    def test_m8tilde_sym_matches_bruteforce(self):
        p = IParams(N=4.0, s=0.5)
        rng = np.random.default_rng(19)
        t = close_tuple(rng.uniform(-20, 20, size=(2, 7)))
        sym, _ = m8tilde_eval(t, p, POL)
        for r in range(t.shape[0]):
            orbit = self._orbit(t[r], 8)
            raw, _ = m8tilde_eval(orbit, p, POL, symmetrized=False)
            brute = raw.mean()
            scale = max(abs(brute), star_magnitudes(t[r : r + 1])[0, 0] * 1e-8)
            assert abs(sym[r] - brute) / scale < 1e-9

    def test_m8tilde_small_frequencies_vanish(self):
        p = IParams(N=32.0, s=0.5)
        rng = np.random.default_rng(20)
        t = close_tuple(rng.uniform(-1.0, 1.0, size=(100, 7)))
        v, leaks = m8tilde_eval(t, p, POL)
        assert leaks == 0
        assert np.max(np.abs(v)) == 0.0

    def test_m10_small_frequencies_vanish(self):
        p = IParams(N=32.0, s=0.5)
        rng = np.random.default_rng(21)
        t = close_tuple(rng.uniform(-1.0, 1.0, size=(50, 9)))
        v, leaks = m10_eval(t, p, POL)
        assert leaks == 0
        assert np.max(np.abs(v)) == 0.0

    def test_m10_sym_matches_bruteforce(self):
        p = IParams(N=4.0, s=0.5)
        rng = np.random.default_rng(22)
        t = close_tuple(rng.uniform(-15, 15, size=(1, 9)))
        sym, _ = m10_eval(t, p, POL)
        orbit = self._orbit(t[0], 10)  # 14400 relabelings, one batched call
        raw, _ = m10_eval(orbit, p, POL, symmetrized=False)
        brute = raw.mean()
        scale = max(abs(brute), star_magnitudes(t)[0, 0] * 1e-8)
        assert abs(sym[0] - brute) / scale < 1e-9
