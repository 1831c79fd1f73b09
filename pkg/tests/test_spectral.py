"""Spectral core: transforms, norms, band projection, test data, serialization."""
import json
from pathlib import Path

import numpy as np
import pytest

from dnlslab.errors import ContractViolation, DomainError, MassConstraintError
from dnlslab.spectral import (
    Field,
    Grid,
    SQRT_2PI,
    derivative,
    field_to_dict,
    gn_ratio,
    l2_norm,
    lebesgue_norm,
    load_field,
    make_test_data,
    project_band,
    save_field,
    sobolev_norm,
    transform,
)

GOLDEN = Path(__file__).parent / "golden" / "field_golden.json"


class TestTransform:
    def test_constant_concentrates_at_zero(self, grid_small):
        g = grid_small
        c = 0.7 - 0.2j
        f = Field(g, np.full(g.K, c))
        spec = f.spec
        assert abs(spec[0] - c * np.sqrt(g.L)) < 1e-12
        assert np.max(np.abs(spec[1:])) < 1e-12

    def test_single_mode(self, grid_small):
        g = grid_small
        f = Field(g, np.exp(3j * g.x))
        spec = f.spec
        k = g.k
        assert abs(spec[k == 3][0] - np.sqrt(g.L)) < 1e-12
        spec_rest = spec[k != 3]
        assert np.max(np.abs(spec_rest)) < 1e-12

    def test_roundtrip_unitarity_seeded_corpus(self, grid_small):
        g = grid_small
        rng = np.random.default_rng(0)
        for _ in range(100):
            v = rng.standard_normal(g.K) + 1j * rng.standard_normal(g.K)
            f = Field(g, v)
            back = f.to_spectral().to_physical()
            assert np.max(np.abs(back.values - v)) < 1e-12 * np.max(np.abs(v))
            # Plancherel with constant exactly 1
            assert abs(l2_norm(f.to_spectral()) - l2_norm(f)) < 1e-12 * l2_norm(f)

    def test_wrong_representation_rejected(self, grid_small):
        f = Field(grid_small, np.ones(grid_small.K))
        with pytest.raises(ContractViolation):
            transform(f, "to_physical")
        with pytest.raises(ContractViolation):
            transform(f.to_spectral(), "to_spectral")
        with pytest.raises(ContractViolation):
            transform(f, "sideways")


class TestDerivative:
    def test_single_mode(self, grid_small):
        g = grid_small
        f = Field(g, np.exp(5j * g.x))
        df = derivative(f).phys
        assert np.max(np.abs(df - 5j * np.exp(5j * g.x))) < 1e-10

    def test_constant(self, grid_small):
        f = Field(grid_small, np.ones(grid_small.K))
        assert np.max(np.abs(derivative(f).phys)) < 1e-12

    def test_gaussian_vs_finite_difference_oracle(self):
        # eighth-order central differences on a 4x finer sampling of the
        # same analytic profile
        g = Grid(L=64.0, K=256)
        gf = Grid(L=64.0, K=1024)
        prof = lambda x: np.exp(-((x - 32.0) ** 2) / 2.0) * np.exp(0.5j * x)
        f = Field(g, prof(g.x))
        ours = derivative(f).phys

        vals = prof(gf.x)
        h = gf.dx
        c = [4.0 / 5.0, -1.0 / 5.0, 4.0 / 105.0, -1.0 / 280.0]
        fd = np.zeros_like(vals)
        for m, cm in enumerate(c, start=1):
            fd += cm * (np.roll(vals, -m) - np.roll(vals, m))
        fd /= h
        assert np.max(np.abs(ours - fd[::4])) < 1e-8


class TestNorms:
    def test_sobolev_single_mode(self, grid_small):
        g = grid_small
        f = Field(g, np.exp(4j * g.x))
        for s in (-0.5, 0.0, 0.5, 1.0, 2.0):
            expect = (1 + 16.0) ** (s / 2.0) * np.sqrt(g.L)
            assert abs(sobolev_norm(f, s) - expect) < 1e-10 * expect

    def test_sobolev_zero_equals_l2(self, grid_small):
        rng = np.random.default_rng(3)
        f = Field(grid_small, rng.standard_normal(grid_small.K) * (1 + 1j))
        assert abs(sobolev_norm(f, 0.0) - l2_norm(f)) < 1e-12 * l2_norm(f)

    def test_sobolev_half_refinement_oracle(self):
        g1 = Grid(L=64.0, K=256)
        g2 = Grid(L=64.0, K=512)
        prof = lambda x: np.exp(-((x - 32.0) ** 2) / 2.0)
        n1 = sobolev_norm(Field(g1, prof(g1.x)), 0.5)
        n2 = sobolev_norm(Field(g2, prof(g2.x)), 0.5)
        assert abs(n1 - n2) < 1e-8 * n2

    def test_lebesgue_constant(self, grid_small):
        g = grid_small
        f = Field(g, np.full(g.K, -2.0 + 0j))
        for p in (1.0, 2.0, 6.0):
            assert abs(lebesgue_norm(f, p) - 2.0 * g.L ** (1 / p)) < 1e-12

    def test_lebesgue_single_mode_p6(self, grid_small):
        g = grid_small
        f = Field(g, np.exp(7j * g.x))
        assert abs(lebesgue_norm(f, 6) - g.L ** (1 / 6)) < 1e-12

    def test_lebesgue_gaussian_refinement(self):
        g1 = Grid(L=64.0, K=256)
        g2 = Grid(L=64.0, K=512)
        prof = lambda x: np.exp(-((x - 32.0) ** 2) / 2.0)
        n1 = lebesgue_norm(Field(g1, prof(g1.x)), 6)
        n2 = lebesgue_norm(Field(g2, prof(g2.x)), 6)
        assert abs(n1 - n2) < 1e-8 * n2

    def test_lebesgue_domain_error(self, grid_small):
        f = Field(grid_small, np.ones(grid_small.K))
        with pytest.raises(DomainError):
            lebesgue_norm(f, 0.5)

    def test_lebesgue_infinity(self, grid_small):
        g = grid_small
        v = np.ones(g.K)
        v[5] = 3.0
        assert lebesgue_norm(Field(g, v), np.inf) == 3.0


class TestGNRatio:
    def test_single_mode_hand_value(self, grid_small):
        g = grid_small
        f = Field(g, np.exp(1j * g.x))
        assert abs(gn_ratio(f) - 1.0 / g.L**2) < 1e-12

    def test_wide_gaussian_below_sharp_constant(self, grid_box):
        f = make_test_data(grid_box, "gaussian", width=3.0, mass=1.0)
        assert gn_ratio(f) < 4.0 / np.pi**2

    def test_scaling_family_invariance(self):
        g = Grid(L=64.0, K=512)
        prof = lambda lam: np.sqrt(lam) * np.exp(
            -((lam * (g.x - 32.0)) ** 2) / 2.0
        )
        r1 = gn_ratio(Field(g, prof(1.0)))
        r2 = gn_ratio(Field(g, prof(2.0)))
        assert abs(r1 - r2) < 1e-6

    def test_corpus_respects_sharp_constant(self, grid_box):
        rng = np.random.default_rng(11)
        for trial in range(20):
            w = rng.uniform(0.8, 4.0)
            k0 = rng.integers(0, 4)
            f = make_test_data(grid_box, "gaussian", width=w, k0=int(k0), mass=1.0)
            assert gn_ratio(f) <= 4.0 / np.pi**2 + 1e-6

    def test_zero_derivative_guard(self, grid_small):
        f = Field(grid_small, np.full(grid_small.K, 1.0 + 0j))
        with pytest.raises(DomainError):
            gn_ratio(f)


class TestProjectBand:
    def test_full_band_identity_up_to_nyquist(self, grid_small):
        g = grid_small
        rng = np.random.default_rng(5)
        f = Field(g, rng.standard_normal(g.K) + 1j * rng.standard_normal(g.K))
        pf = project_band(f, g.K // 2)
        spec = f.spec * g.nyquist_mask
        assert np.max(np.abs(pf.values - spec)) < 1e-14

    def test_high_mode_killed(self, grid_small):
        g = grid_small
        f = Field(g, np.exp(12j * g.x))
        assert l2_norm(project_band(f, 8)) < 1e-12

    def test_tail_mass_identity(self, grid_box):
        g = grid_box
        f = make_test_data(g, "gaussian", width=0.8, mass=1.0)
        pf = project_band(f, 8)
        tail = f.spec.copy()
        tail[np.abs(g.k) <= 8] = 0.0
        err = l2_norm(Field(g, f.spec * g.nyquist_mask - pf.values, "spectral"))
        assert abs(err - np.linalg.norm(tail[g.nyquist_mask])) < 1e-12

    def test_idempotent_and_self_adjoint(self, grid_small):
        g = grid_small
        rng = np.random.default_rng(6)
        f = Field(g, rng.standard_normal(g.K) + 1j * rng.standard_normal(g.K))
        h = Field(g, rng.standard_normal(g.K) + 1j * rng.standard_normal(g.K))
        pf = project_band(f, 10)
        assert np.max(np.abs(project_band(pf, 10).values - pf.values)) < 1e-14
        lhs = np.vdot(project_band(f, 10).values, h.spec)
        rhs = np.vdot(f.spec, project_band(h, 10).values)
        assert abs(lhs - rhs) < 1e-12 * max(1.0, abs(lhs))

    def test_domain_errors(self, grid_small):
        f = Field(grid_small, np.ones(grid_small.K))
        with pytest.raises(DomainError):
            project_band(f, 0)
        with pytest.raises(DomainError):
            project_band(f, grid_small.K)


class TestMakeTestData:
    def test_gaussian_mass_normalisation(self, grid_box):
        m = 0.9 * SQRT_2PI
        f = make_test_data(grid_box, "gaussian", mass=m, strict_mass=True)
        assert abs(l2_norm(f) - m) < 1e-10

    def test_two_mode_two_lines(self, grid_small):
        f = make_test_data(grid_small, "two_mode", k1=2, k2=5, A1=1.0, A2=0.3)
        spec = np.abs(f.spec)
        assert int(np.sum(spec > 1e-12)) == 2

    def test_random_hs_deterministic(self, grid_small):
        a = make_test_data(grid_small, "random_hs", s=0.5, seed=42)
        b = make_test_data(grid_small, "random_hs", s=0.5, seed=42)
        assert np.array_equal(a.values, b.values)

    def test_strict_mass_rejected(self, grid_small):
        with pytest.raises(MassConstraintError):
            make_test_data(grid_small, "gaussian", mass=SQRT_2PI, strict_mass=True)

    def test_unknown_kind(self, grid_small):
        with pytest.raises(DomainError):
            make_test_data(grid_small, "soliton")


class TestSerialization:
    def test_golden_file(self, tmp_path):
        g = Grid(L=2 * np.pi, K=8)
        vals = np.array(
            [0.5, -0.25 + 1j, 0.125j, 1.0, -1.0, 0.75 - 0.5j, 0.0, 2.0]
        )
        out = tmp_path / "field.json"
        save_field(Field(g, vals, "physical"), out)
        assert out.read_text() == GOLDEN.read_text()

    def test_roundtrip(self, grid_small, tmp_path):
        rng = np.random.default_rng(9)
        f = Field(
            grid_small,
            rng.standard_normal(grid_small.K) * (1 - 2j),
            "physical",
        ).to_spectral()
        path = tmp_path / "f.json"
        save_field(f, path)
        back = load_field(path)
        assert back.representation == "spectral"
        assert np.array_equal(back.values, f.values)

    def test_format_check(self):
        from dnlslab.spectral import field_from_dict

        with pytest.raises(ContractViolation):
            field_from_dict({"format": "other"})
