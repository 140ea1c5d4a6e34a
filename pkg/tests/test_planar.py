import math

import numpy as np
import pytest

from nvlab import (
    ConfigurationError,
    DegenerateDirectionError,
    PlanarParams,
    kappa,
    kdv_soliton,
    planar_from_kdv,
    planar_speed,
    speed_profile,
    standard_kdv_soliton,
)
from nvlab.planar import nvkdv_residual


class TestKappa:
    def test_threefold_symmetry(self):
        for alpha in np.linspace(0, 2 * np.pi, 37):
            assert kappa(alpha + 2 * np.pi / 3) == pytest.approx(kappa(alpha),
                                                                 abs=1e-14)

    def test_reference_values(self):
        assert kappa(0.0) == 1.0
        assert kappa(np.pi / 3) == pytest.approx(-1.0)
        assert kappa(np.pi / 6) == pytest.approx(0.0, abs=1e-15)

    def test_speed_profile_table(self):
        rows = speed_profile(2.0, n_samples=12)
        assert rows.shape == (12, 3)
        np.testing.assert_allclose(rows[:, 1], np.cos(3 * rows[:, 0]), atol=1e-14)
        np.testing.assert_allclose(rows[:, 2], 2.0 * rows[:, 1], atol=1e-14)


class TestSolitons:
    def test_nv_soliton_fields(self):
        s = kdv_soliton(1.5, x0=2.0)
        x = np.linspace(-10, 10, 101)
        np.testing.assert_allclose(s.u(x, 0.0),
                                   -3.0 / np.cosh(np.sqrt(1.5) * (x - 2.0)) ** 2)
        np.testing.assert_array_equal(s.u(x, 0.3), s.v(x, 0.3))
        np.testing.assert_array_equal(s.w(x, 0.3), np.zeros_like(x))

    def test_nv_soliton_translates_at_c(self):
        s = kdv_soliton(2.0)
        x = np.linspace(-10, 10, 101)
        np.testing.assert_allclose(s.u(x, 1.0), s.u(x - 2.0, 0.0), atol=1e-14)

    def test_standard_soliton_translates_at_4c(self):
        q = standard_kdv_soliton(0.5)
        x = np.linspace(-10, 10, 101)
        np.testing.assert_allclose(q(1.0, x), q(0.0, x - 2.0), atol=1e-14)

    def test_invalid_speed(self):
        with pytest.raises(ConfigurationError):
            kdv_soliton(0.0)
        with pytest.raises(ConfigurationError):
            standard_kdv_soliton(-1.0)


class TestPlanarParams:
    def test_k1_derived_from_constraint(self):
        p = PlanarParams(c=1.0, alpha=0.2, c1_offset=0.4, c2_offset=-0.1, k2=0.3)
        assert p.k1 == pytest.approx(0.75 * p.beta - 1.5 * p.kappa * 0.3)

    def test_inconsistent_constants_rejected(self):
        with pytest.raises(ConfigurationError):
            PlanarParams(c=1.0, alpha=0.0, k2=0.0, k1=1.0)

    def test_direction_cosines(self):
        p = PlanarParams(c=1.0, alpha=np.pi / 4)
        assert p.n1 == pytest.approx(p.n2)
        assert p.n1**2 + p.n2**2 == pytest.approx(1.0)


class TestPlanarMapping:
    def test_axis_aligned_reduces_to_nv_soliton(self):
        c = 1.3
        sol = planar_from_kdv(standard_kdv_soliton(c),
                              PlanarParams(c=c, alpha=0.0))
        ref = kdv_soliton(c)
        x = np.linspace(-8, 8, 81)
        for t in (0.0, 0.7):
            np.testing.assert_allclose(sol.u(t, x, 0.0), ref.u(x, t), atol=1e-12)

    def test_degenerate_direction_rejected(self):
        with pytest.raises(DegenerateDirectionError):
            planar_from_kdv(standard_kdv_soliton(1.0),
                            PlanarParams(c=1.0, alpha=np.pi / 6))

    def test_auxiliary_field_relations(self):
        p = PlanarParams(c=1.0, alpha=0.5, c1_offset=0.2, c2_offset=0.1)
        sol = planar_from_kdv(standard_kdv_soliton(1.0), p)
        s = np.linspace(-5, 5, 11)
        u = sol.u_line(0.3, s)
        np.testing.assert_allclose(sol.v1_line(0.3, s),
                                   (p.n1**2 - p.n2**2) * u + 0.2, atol=1e-14)
        np.testing.assert_allclose(sol.v2_line(0.3, s),
                                   -2 * p.n1 * p.n2 * u + 0.1, atol=1e-14)

    def test_plane_sampler_depends_only_on_s(self):
        sol = planar_from_kdv(standard_kdv_soliton(1.0),
                              PlanarParams(c=1.0, alpha=0.7))
        p = sol.params
        # two (x, y) points with the same s = n1 x + n2 y give equal u
        x1, y1 = 1.0, 2.0
        s_val = p.n1 * x1 + p.n2 * y1
        x2 = s_val / p.n1  # y2 = 0
        assert sol.u(0.2, x1, y1) == pytest.approx(sol.u(0.2, x2, 0.0), abs=1e-13)

    @pytest.mark.parametrize("alpha", list(np.pi / 3 * np.arange(8) / 8 + 0.02))
    def test_reduced_equation_residual(self, alpha):
        c = 1.0
        sol = planar_from_kdv(standard_kdv_soliton(c),
                              PlanarParams(c=c, alpha=alpha,
                                           c1_offset=0.1, c2_offset=0.05, k2=0.02))
        s = np.linspace(-30, 30, 1024, endpoint=False)
        res = nvkdv_residual(sol, s, t=0.1)
        assert np.abs(res).max() < 1e-8

    def test_planar_speed_values(self):
        assert planar_speed(2.0, 0.0) == 2.0
        assert planar_speed(2.0, np.pi / 3) == pytest.approx(-2.0)
        with pytest.raises(ConfigurationError):
            planar_speed(-1.0, 0.0)

    def test_translation_speed_along_direction(self):
        # the soliton's peak in s moves at c*kappa(alpha)
        c, alpha = 1.2, 0.4
        sol = planar_from_kdv(standard_kdv_soliton(c),
                              PlanarParams(c=c, alpha=alpha))
        s = np.linspace(-20, 20, 4001)
        t1 = 1.0
        peak0 = s[np.argmin(sol.u_line(0.0, s))]
        peak1 = s[np.argmin(sol.u_line(t1, s))]
        assert (peak1 - peak0) / t1 == pytest.approx(planar_speed(c, alpha),
                                                     abs=2e-2)
