import numpy as np
import pytest
from scipy import special as sp
from scipy.optimize import brentq

from phaseless.exceptions import GeometryError, TruncationError
from phaseless.forward import (
    FOUR_PI,
    Kind,
    ScattererConfig,
    TruncationPolicy,
    farfield_plane_wave,
    farfield_point_source,
    phi,
    phi_farfield,
    reflection_coefficient,
    reflection_coefficients,
    scattered_field_plane_wave,
    scattered_field_point_source,
    superposition_farfield,
    total_farfield_point_source,
    total_field_plane_wave,
)
from phaseless.measurement import direction_grid

ORIGIN = (0.0, 0.0, 0.0)
HOOK = TruncationPolicy(zero_reflection=True)


def unit(v):
    v = np.asarray(v, dtype=float)
    return v / np.linalg.norm(v, axis=-1, keepdims=True)


def random_dirs(n, seed=0):
    return unit(np.random.default_rng(seed).normal(size=(n, 3)))


LOSSLESS = [
    ScattererConfig.dirichlet(ORIGIN, 1.0),
    ScattererConfig.neumann(ORIGIN, 1.0),
    ScattererConfig.impedance(ORIGIN, 1.0, 1.7),
    ScattererConfig.medium(ORIGIN, 1.0, 1.69),
    ScattererConfig.medium(ORIGIN, 1.0, 0.5),
]
LOSSY = [
    ScattererConfig.impedance(ORIGIN, 1.0, 1 + 1j),
    ScattererConfig.impedance(ORIGIN, 1.0, 1j),
    ScattererConfig.medium(ORIGIN, 1.0, 1.69 + 0.2j),
]


def scipy_tables(nmax, x):
    n = np.arange(nmax + 1)
    j, jp = sp.spherical_jn(n, x), sp.spherical_jn(n, x, derivative=True)
    y, yp = sp.spherical_yn(n, x), sp.spherical_yn(n, x, derivative=True)
    return j, jp, j + 1j * y, jp + 1j * yp


class TestConfig:
    def test_validation(self):
        with pytest.raises(ValueError):
            ScattererConfig.dirichlet(ORIGIN, 0.0)
        with pytest.raises(ValueError):
            ScattererConfig.impedance(ORIGIN, 1.0, 1 - 0.1j)
        with pytest.raises(ValueError):
            ScattererConfig.medium(ORIGIN, 1.0, 1.0)
        with pytest.raises(ValueError):
            ScattererConfig.medium(ORIGIN, 1.0, -2.0)
        with pytest.raises(ValueError):
            ScattererConfig.dirichlet((0.0, 1.0), 1.0)

    def test_shifted_keeps_kind(self):
        c = ScattererConfig.impedance(ORIGIN, 2.0, 1 + 1j).shifted([1, 2, 3])
        assert c.center == (1.0, 2.0, 3.0) and c.kind is Kind.IMPEDANCE and c.param == 1 + 1j


class TestReflection:
    def test_dirichlet_zero_at_pi(self):
        assert abs(reflection_coefficient(ScattererConfig.dirichlet(ORIGIN, 1.0), 0, np.pi)) < 1e-15

    def test_neumann_zero_at_first_zero_of_j1(self):
        root = brentq(lambda x: sp.spherical_jn(1, x), 4.0, 5.0, xtol=1e-15)
        assert root == pytest.approx(4.49340945790906, abs=1e-12)
        cfg = ScattererConfig.neumann(ORIGIN, 1.0)
        assert abs(reflection_coefficient(cfg, 0, root)) < 1e-14

    @pytest.mark.parametrize("cfg", LOSSLESS, ids=lambda c: f"{c.kind.value}-{c.param}")
    @pytest.mark.parametrize("ka", [0.5, 1.0, 2.0, 5.0])
    def test_unitarity(self, cfg, ka):
        R = reflection_coefficients(cfg, ka, 40)
        assert np.max(np.abs(np.abs(1 + 2 * R) - 1)) <= 1e-12

    @pytest.mark.parametrize("cfg", LOSSY, ids=lambda c: f"{c.kind.value}-{c.param}")
    def test_passivity(self, cfg):
        R = reflection_coefficients(cfg, 2.0, 40)
        assert np.all(np.abs(1 + 2 * R) <= 1 + 1e-12)
        assert np.abs(1 + 2 * R[0]) < 1 - 1e-6

    def test_dirichlet_neumann_against_scipy(self):
        ka = 2.0
        j, jp, h, hp = scipy_tables(20, ka)
        np.testing.assert_allclose(
            reflection_coefficients(ScattererConfig.dirichlet(ORIGIN, 1.0), ka, 20), -j / h,
            rtol=1e-10, atol=1e-30,
        )
        np.testing.assert_allclose(
            reflection_coefficients(ScattererConfig.neumann(ORIGIN, 1.0), ka, 20), -jp / hp,
            rtol=1e-10, atol=1e-30,
        )

    @pytest.mark.parametrize("lam", [1.5, 1 + 1j, 2 + 0.5j])
    def test_impedance_mode_satisfies_boundary_condition(self, lam):
        k, a = 2.0, 1.3
        R = reflection_coefficients(ScattererConfig.impedance(ORIGIN, a, lam), k, 20)
        j, jp, h, hp = scipy_tables(20, k * a)
        # u_n = j_n(kr) + R_n h_n(kr);  du/dr + lam u = 0 at r = a
        residual = k * (jp + R * hp) + lam * (j + R * h)
        assert np.max(np.abs(residual)) <= 1e-12 * (abs(k) + abs(lam))

    @pytest.mark.parametrize("n0", [1.69, 0.5, 1.69 + 0.2j, 4.0 + 1.0j])
    def test_medium_mode_satisfies_transmission(self, n0):
        k, a = 2.0, 1.0
        R = reflection_coefficients(ScattererConfig.medium(ORIGIN, a, n0), k, 20)
        k1 = k * np.sqrt(complex(n0))
        j, jp, h, hp = scipy_tables(20, k * a)
        n = np.arange(21)
        ji = sp.spherical_jn(n, k1 * a)
        jip = sp.spherical_jn(n, k1 * a, derivative=True)
        # interior amplitude from continuity of u, then continuity of du/dr
        A = (j + R * h) / ji
        residual = k * (jp + R * hp) - A * k1 * jip
        assert np.max(np.abs(residual)) <= 1e-11 * k


class TestPlaneWave:
    def test_rotational_symmetry(self):
        cfg = ScattererConfig.neumann(ORIGIN, 1.0)
        x1, d1 = unit([1, 0, 0]), unit([0, 0, 1])
        # rotate the pair about an arbitrary axis
        theta = 0.7
        axis = unit([1, 2, -1])
        K = np.array([[0, -axis[2], axis[1]], [axis[2], 0, -axis[0]], [-axis[1], axis[0], 0]])
        rot = np.eye(3) + np.sin(theta) * K + (1 - np.cos(theta)) * K @ K
        a = farfield_plane_wave(cfg, 2.0, x1, d1)
        b = farfield_plane_wave(cfg, 2.0, rot @ x1, rot @ d1)
        assert a == pytest.approx(b, abs=1e-14)

    def test_small_sound_soft_limit(self):
        cfg = ScattererConfig.dirichlet(ORIGIN, 1.0)
        dirs = random_dirs(20)
        u = farfield_plane_wave(cfg, 0.01, dirs, dirs[0])
        assert np.max(np.abs(u + 1.0)) <= 0.02
        errs = [np.max(np.abs(farfield_plane_wave(cfg, k, dirs, dirs[0]) + 1.0)) for k in (0.1, 0.03, 0.01)]
        assert errs[0] > errs[1] > errs[2]

    def test_translation_factor(self):
        k = 2.0
        h = np.array([0.3, -0.4, 0.25])
        cfg = ScattererConfig.medium(ORIGIN, 1.0, 1.69)
        xs, d = random_dirs(30, 1), unit([1, 1, 0])
        u0 = farfield_plane_wave(cfg, k, xs, d)
        u1 = farfield_plane_wave(cfg.shifted(h), k, xs, d)
        np.testing.assert_array_equal(np.abs(u1) - np.abs(u0) <= 1e-15, True)
        expected = np.angle(np.exp(1j * k * ((d - xs) @ h)))
        diff = np.angle(u1 / u0)
        assert np.max(np.abs(np.angle(np.exp(1j * (diff - expected))))) <= 1e-10

    def test_dirichlet_surface_residual(self):
        k, a = 2.0, 1.0
        cfg = ScattererConfig.dirichlet((0.2, -0.1, 0.3), a)
        normals = random_dirs(50, 3)
        pts = cfg.center_array + a * (1 + 1e-8) * normals
        u = total_field_plane_wave(cfg, k, pts, unit([0.3, 0.2, -1]))
        assert np.max(np.abs(u)) <= 1e-6

    def test_neumann_surface_residual(self):
        k, a = 2.0, 1.0
        cfg = ScattererConfig.neumann((0.1, 0.0, -0.2), a)
        d = unit([1, -1, 0.5])
        normals = random_dirs(20, 4)
        step = 1e-3
        radii = a * (1 + 1e-12) + step * np.arange(5)
        u = np.array([total_field_plane_wave(cfg, k, cfg.center_array + r * normals, d) for r in radii])
        du = (-25 * u[0] + 48 * u[1] - 36 * u[2] + 16 * u[3] - 3 * u[4]) / (12 * step)
        assert np.max(np.abs(du)) <= 1e-6 * k

    @pytest.mark.parametrize("cfg", [LOSSLESS[0], LOSSLESS[3], LOSSY[0]], ids=lambda c: c.kind.value)
    def test_far_field_limit_of_scattered_field(self, cfg):
        k = 2.0
        cfg = cfg.shifted([0.2, 0.1, -0.1])
        xs, d = random_dirs(10, 5), unit([0, 1, 1])
        r = 1e4 / k
        us = scattered_field_plane_wave(cfg, k, r * xs, d)
        approx = r * np.exp(-1j * k * r) * us
        exact = farfield_plane_wave(cfg, k, xs, d)
        assert np.max(np.abs(approx - exact) / np.abs(exact)) <= 1e-3

    def test_inside_point_rejected(self):
        cfg = ScattererConfig.dirichlet(ORIGIN, 1.0)
        with pytest.raises(GeometryError):
            scattered_field_plane_wave(cfg, 1.0, [0.5, 0, 0], [0, 0, 1])
        with pytest.raises(GeometryError):
            scattered_field_plane_wave(cfg, 1.0, [1.0, 0, 0], [0, 0, 1])

    def test_non_unit_direction_rejected(self):
        with pytest.raises(ValueError):
            farfield_plane_wave(ScattererConfig.dirichlet(ORIGIN, 1.0), 1.0, [1, 0, 0], [0, 0, 2])


class TestPointSource:
    def test_phi_farfield_values(self):
        assert phi_farfield([0, 0, 1], ORIGIN, 3.0) == pytest.approx(1 / FOUR_PI, abs=1e-17)
        assert 1 / FOUR_PI == pytest.approx(0.0795774715, abs=1e-10)
        z = np.array([0.3, -2.0, 5.0])
        assert np.allclose(np.abs(phi_farfield(random_dirs(20), z, 2.0)), 1 / FOUR_PI, rtol=1e-15)
        k = 2.0
        x = unit([1, 1, 0])
        z = x * np.pi / k
        assert phi_farfield(x, z, k) == pytest.approx(-1 / FOUR_PI, abs=1e-16)

    def test_phi_far_field_limit(self):
        k, z = 2.0, np.array([0.5, -0.2, 0.1])
        xs = random_dirs(8, 6)
        r = 1e6
        approx = r * np.exp(-1j * k * r) * phi(r * xs, z, k)
        np.testing.assert_allclose(approx, phi_farfield(xs, z, k), atol=1e-7)

    def test_mixed_reciprocity(self):
        k, a = 2.0, 1.0
        cfg = ScattererConfig.dirichlet((0.1, 0.2, -0.3), a)
        grid = direction_grid(8, 16)
        zs = cfg.center_array + 3 * a * random_dirs(16, 7)
        lhs = FOUR_PI * farfield_point_source(cfg, k, grid.nodes, zs)
        rhs = scattered_field_plane_wave(cfg, k, zs, -grid.nodes).T
        assert np.max(np.abs(lhs - rhs) / np.maximum(1.0, np.abs(rhs))) <= 1e-8

    def test_translation_covariance(self):
        k = 2.0
        c = np.array([0.4, -0.3, 0.2])
        base = ScattererConfig.impedance(ORIGIN, 1.0, 1 + 0.5j)
        moved = base.shifted(c)
        xs = random_dirs(40, 8)
        z = np.array([2.0, 3.0, -1.0])
        lhs = farfield_point_source(moved, k, xs, z)
        rhs = np.exp(-1j * k * xs @ c) * farfield_point_source(base, k, xs, z - c)
        np.testing.assert_allclose(lhs, rhs, rtol=0, atol=1e-12)

    def test_hook_removes_scatterer(self):
        cfg = ScattererConfig.dirichlet(ORIGIN, 1.0)
        xs, z = random_dirs(10), np.array([0.0, 0.0, 4.0])
        assert np.all(farfield_point_source(cfg, 2.0, xs, z, HOOK) == 0)
        v = total_farfield_point_source(cfg, 2.0, xs, z, HOOK)
        np.testing.assert_array_equal(v, phi_farfield(xs, z, 2.0))
        assert np.allclose(np.abs(v), 1 / FOUR_PI)

    def test_superposition_is_sum(self):
        cfg = ScattererConfig.medium(ORIGIN, 1.0, 1.69)
        xs = random_dirs(10)
        z1, z2 = np.array([0, 0, 3.0]), np.array([0, 2.5, 2.0])
        total = superposition_farfield(cfg, 2.0, xs, z1, z2)
        parts = total_farfield_point_source(cfg, 2.0, xs, z1) + total_farfield_point_source(cfg, 2.0, xs, z2)
        np.testing.assert_allclose(total, parts, rtol=0, atol=1e-16)

    def test_superposition_rejects_coincident_sources(self):
        cfg = ScattererConfig.dirichlet(ORIGIN, 1.0)
        with pytest.raises(GeometryError):
            superposition_farfield(cfg, 2.0, [0, 0, 1], [0, 0, 3.0], [0, 0, 3.0])

    def test_total_far_field_from_near_field(self):
        # |x| e^{-ik|x|} (Phi(x, z) + v^s(x, z)) -> v_inf_D + Phi_inf
        k = 2.0
        cfg = ScattererConfig.neumann((0.2, 0.0, 0.1), 1.0)
        # the asymptotic phase error is about k |z|^2 / (2 r), so keep z near the origin
        z = np.array([0.3, 0.2, 1.5])
        xs = random_dirs(12, 9)
        r = 1e4 / k
        pts = r * xs
        near = phi(pts, z, k) + scattered_field_point_source(cfg, k, pts, z)
        approx = r * np.exp(-1j * k * r) * near
        exact = total_farfield_point_source(cfg, k, xs, z)
        assert np.max(np.abs(approx - exact) / np.abs(exact)) <= 1e-3

    def test_point_source_near_field_obeys_boundary_condition(self):
        k = 2.0
        cfg = ScattererConfig.dirichlet((0.0, 0.1, 0.0), 1.0)
        z = np.array([0.0, 0.0, 2.5])
        pts = cfg.center_array + (1 + 1e-9) * random_dirs(30, 10)
        total = phi(pts, z, k) + scattered_field_point_source(cfg, k, pts, z)
        assert np.max(np.abs(total)) <= 1e-7

    def test_source_inside_rejected(self):
        cfg = ScattererConfig.dirichlet(ORIGIN, 1.0)
        with pytest.raises(GeometryError):
            farfield_point_source(cfg, 2.0, [0, 0, 1], [0.2, 0.0, 0.0])

    def test_truncation_failure_is_explicit(self):
        cfg = ScattererConfig.dirichlet(ORIGIN, 1.0)
        policy = TruncationPolicy(n_cap=40)
        with pytest.raises(TruncationError):
            scattered_field_point_source(cfg, 2.0, [0.0, 1.01, 0.0], [0.0, 0.0, 1.01], policy)
        # the far-field series converges factorially and needs no extension
        farfield_point_source(cfg, 2.0, [0, 0, 1], [0.0, 0.0, 1.01], policy)
