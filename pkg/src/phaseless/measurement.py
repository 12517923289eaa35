"""Source/observation geometry and synthesis of the three phaseless datasets.

For a reference source ``z0`` and sources ``z`` on a cap ``Gamma`` of the
boundary of an auxiliary ball ``Omega``, the measured quantities are

    d_ref[i]    = |v_inf(xhat_i, z0)|
    d_src[i, j] = |v_inf(xhat_i, z_j)|
    d_sup[i, j] = |v_inf(xhat_i, z0) + v_inf(xhat_i, z_j)|

where ``v_inf`` is the far field of the point source plus the field it
scatters off the obstacle.
"""

from dataclasses import dataclass, field

import numpy as np

from . import forward
from .exceptions import GeometryError, InadmissibleError
from .forward import DEFAULT_POLICY
from .special import spherical_jn_table

GOLDEN_ANGLE = np.pi * (3.0 - np.sqrt(5.0))
ADMISSIBILITY_MARGIN = 1e-8


@dataclass(frozen=True)
class AdmissibilityVerdict:
    admissible: bool
    witness: int | None
    min_abs_j: float
    sufficient: bool  # kR < pi, which alone guarantees admissibility
    warnings: tuple = ()


def check_admissible_ball(omega_radius, k, policy=DEFAULT_POLICY):
    """Decide whether ``k**2`` avoids the Dirichlet spectrum of a ball of radius ``omega_radius``.

    The Dirichlet eigenvalues of a ball are ``k**2`` with ``j_n(kR) = 0``.
    The first zero of ``j_n`` exceeds ``n``, so only orders ``n < kR`` (and no
    more than the series cutoff) need scanning.
    """
    if not omega_radius > 0 or not k > 0:
        raise ValueError("omega_radius and k must be positive")
    kr = k * omega_radius
    nscan = min(policy.base_order(kr), int(np.floor(kr)))
    values = np.abs(spherical_jn_table(max(nscan, 1), kr)[: nscan + 1])
    witness = int(np.argmin(values))
    min_abs = float(values[witness])
    # kR < pi is an analytic guarantee and overrides the numerical margin.
    admissible = kr < np.pi or min_abs > ADMISSIBILITY_MARGIN
    warnings = ()
    if admissible and min_abs < 1e-3:
        warnings = (f"near Dirichlet resonance: |j_{witness}(kR)| = {min_abs:.3e}",)
    return AdmissibilityVerdict(
        admissible=admissible,
        witness=None if admissible else witness,
        min_abs_j=min_abs,
        sufficient=kr < np.pi,
        warnings=warnings,
    )


def _frame(axis):
    axis = np.asarray(axis, dtype=float)
    axis = axis / np.linalg.norm(axis)
    helper = np.array([1.0, 0.0, 0.0]) if abs(axis[0]) < 0.9 else np.array([0.0, 1.0, 0.0])
    e1 = np.cross(axis, helper)
    e1 /= np.linalg.norm(e1)
    e2 = np.cross(axis, e1)
    return e1, e2, axis


def sample_gamma(omega_center, omega_radius, cap_axis, cap_half_angle, count):
    """Deterministic Fibonacci-spiral points on the spherical cap around ``cap_axis``.

    Point ``i`` sits at ``cos(theta_i) = 1 - (1 - cos(alpha)) * i / count``
    (equal-area in the polar direction, seeded at the pole) and azimuth
    ``i * golden_angle``.
    """
    if count < 1:
        raise ValueError("count must be at least 1")
    if not 0 < cap_half_angle <= np.pi:
        raise ValueError("cap_half_angle must lie in (0, pi]")
    e1, e2, axis = _frame(cap_axis)
    i = np.arange(count)
    cos_t = 1.0 - (1.0 - np.cos(cap_half_angle)) * i / count
    sin_t = np.sqrt(np.clip(1.0 - cos_t**2, 0.0, None))
    phi = i * GOLDEN_ANGLE
    local = (
        sin_t[:, None] * (np.cos(phi)[:, None] * e1 + np.sin(phi)[:, None] * e2)
        + cos_t[:, None] * axis
    )
    return np.asarray(omega_center, dtype=float) + omega_radius * local


@dataclass(frozen=True)
class DirectionGrid:
    """Product quadrature on the unit sphere: Gauss-Legendre in cos(theta), uniform in phi."""

    n_polar: int
    n_azimuthal: int
    nodes: np.ndarray = field(repr=False)
    weights: np.ndarray = field(repr=False)
    theta: np.ndarray = field(repr=False)
    phi: np.ndarray = field(repr=False)

    def __len__(self):
        return len(self.weights)

    def integrate(self, values, axis=0):
        return np.tensordot(self.weights, values, axes=([0], [axis]))


def direction_grid(n_polar, n_azimuthal):
    if n_polar < 2 or n_azimuthal < 4:
        raise ValueError("need n_polar >= 2 and n_azimuthal >= 4")
    x, w = np.polynomial.legendre.leggauss(n_polar)
    theta = np.arccos(x)
    phi = 2.0 * np.pi * np.arange(n_azimuthal) / n_azimuthal
    tt, pp = np.meshgrid(theta, phi, indexing="ij")
    tt, pp = tt.ravel(), pp.ravel()
    nodes = np.stack([np.sin(tt) * np.cos(pp), np.sin(tt) * np.sin(pp), np.cos(tt)], axis=1)
    # Re-normalize to remove rounding drift in the unit-vector invariant.
    nodes /= np.linalg.norm(nodes, axis=1)[:, None]
    weights = np.repeat(w, n_azimuthal) * (2.0 * np.pi / n_azimuthal)
    return DirectionGrid(n_polar, n_azimuthal, nodes, weights, tt, pp)


@dataclass(frozen=True)
class SourceGeometry:
    z0: np.ndarray
    omega_center: np.ndarray
    omega_radius: float
    cap_axis: np.ndarray
    cap_half_angle: float
    gamma_points: np.ndarray = field(repr=False)

    def __post_init__(self):
        for name in ("z0", "omega_center", "cap_axis"):
            object.__setattr__(self, name, np.asarray(getattr(self, name), dtype=float))
        pts = np.atleast_2d(np.asarray(self.gamma_points, dtype=float))
        object.__setattr__(self, "gamma_points", pts)
        if not self.omega_radius > 0:
            raise ValueError("omega_radius must be positive")
        rel = pts - self.omega_center
        dist = np.linalg.norm(rel, axis=1)
        if np.any(np.abs(dist - self.omega_radius) > 1e-10 * max(1.0, self.omega_radius)):
            raise GeometryError("gamma points must lie on the boundary of Omega")
        axis = self.cap_axis / np.linalg.norm(self.cap_axis)
        cos_angle = np.clip((rel @ axis) / dist, -1.0, 1.0)
        if np.any(np.arccos(cos_angle) > self.cap_half_angle + 1e-10):
            raise GeometryError("gamma points must lie inside the cap")
        if np.any(np.linalg.norm(pts - self.z0, axis=1) < 1e-10):
            raise GeometryError("z0 must not lie on Gamma")

    @property
    def n_sources(self):
        return len(self.gamma_points)


def make_geometry(
    omega_center,
    omega_radius,
    cap_axis=None,
    cap_half_angle=np.pi / 2,
    count=64,
    z0=None,
    scatterer_center=(0.0, 0.0, 0.0),
):
    """Build a source geometry with the default placements.

    The cap faces the scatterer unless ``cap_axis`` is given, and ``z0``
    defaults to the far side of ``Omega`` at distance ``2 * omega_radius``
    from its centre.
    """
    omega_center = np.asarray(omega_center, dtype=float)
    away = omega_center - np.asarray(scatterer_center, dtype=float)
    norm = np.linalg.norm(away)
    if norm == 0:
        raise GeometryError("Omega must not be centred on the scatterer")
    away /= norm
    if cap_axis is None:
        cap_axis = -away
    if z0 is None:
        z0 = omega_center + 2.0 * omega_radius * away
    points = sample_gamma(omega_center, omega_radius, cap_axis, cap_half_angle, count)
    return SourceGeometry(np.asarray(z0, dtype=float), omega_center, omega_radius,
                          np.asarray(cap_axis, dtype=float), cap_half_angle, points)


def check_exterior(config, geometry):
    """Raise GeometryError unless Omega, Gamma and z0 all avoid the closed scatterer."""
    c = config.center_array
    if np.linalg.norm(geometry.omega_center - c) <= geometry.omega_radius + config.radius:
        raise GeometryError("Omega intersects the scatterer")
    if np.linalg.norm(geometry.z0 - c) <= config.radius:
        raise GeometryError("z0 lies inside or on the scatterer")


@dataclass(frozen=True)
class PhasedFarFields:
    """Complex far fields behind a phaseless dataset: ``ref`` is (M,), ``src`` is (M, S)."""

    ref: np.ndarray
    src: np.ndarray


@dataclass(frozen=True)
class PhaselessDataset:
    k: float
    geometry: SourceGeometry
    grid: DirectionGrid
    d_ref: np.ndarray = field(repr=False)
    d_src: np.ndarray = field(repr=False)
    d_sup: np.ndarray = field(repr=False)
    noise_level: float = 0.0
    seed: int = 0

    def triangle_violation(self):
        """Largest excess over the entrywise triangle inequalities (<= 0 when consistent)."""
        a = self.d_ref[:, None]
        b = self.d_src
        s = self.d_sup
        return float(max(np.max(np.abs(a - b) - s), np.max(s - (a + b))))


def synthesize_phased(config, geometry, k, grid, policy=DEFAULT_POLICY):
    nodes = grid.nodes
    ref = forward.total_farfield_point_source(config, k, nodes, geometry.z0, policy)
    src = forward.total_farfield_point_source(config, k, nodes, geometry.gamma_points, policy)
    return PhasedFarFields(ref, np.asarray(src).reshape(len(nodes), -1))


def _noise_factor(seed, stream, shape, level):
    # One substream per dataset; entry (i, j) always takes draw number i*ncols + j.
    rng = np.random.default_rng(np.random.SeedSequence(int(seed), spawn_key=(stream,)))
    return 1.0 + level * rng.uniform(-1.0, 1.0, size=shape)


def synthesize_phaseless(
    config,
    geometry,
    k,
    grid,
    noise=0.0,
    seed=0,
    policy=DEFAULT_POLICY,
    check_admissible=True,
    return_phased=False,
):
    """Synthesize ``d_ref``, ``d_src`` and ``d_sup`` for a sphere.

    ``noise`` is a relative level ``delta``: each modulus is multiplied by
    ``1 + delta * u`` with ``u`` uniform on [-1, 1].
    """
    if check_admissible:
        verdict = check_admissible_ball(geometry.omega_radius, k, policy)
        if not verdict.admissible:
            raise InadmissibleError(
                f"k^2 is a Dirichlet eigenvalue of Omega (witness n={verdict.witness})",
                witness=verdict.witness,
            )
    check_exterior(config, geometry)
    phased = synthesize_phased(config, geometry, k, grid, policy)
    d_ref = np.abs(phased.ref)
    d_src = np.abs(phased.src)
    d_sup = np.abs(phased.ref[:, None] + phased.src)
    if noise:
        d_ref = d_ref * _noise_factor(seed, 0, d_ref.shape, noise)
        d_src = d_src * _noise_factor(seed, 1, d_src.shape, noise)
        d_sup = d_sup * _noise_factor(seed, 2, d_sup.shape, noise)
    data = PhaselessDataset(float(k), geometry, grid, d_ref, d_src, d_sup, float(noise), int(seed))
    if return_phased:
        return data, phased
    return data


def synthesize_triangle_moduli(config, k, xhat, sources, policy=DEFAULT_POLICY):
    """Single and pairwise-superposition moduli for three sources at fixed directions.

    Returns ``(singles, pairs)`` with ``singles = (|A|, |B|, |C|)`` and
    ``pairs = (|A+B|, |B+C|, |C+A|)``.
    """
    fields = [forward.total_farfield_point_source(config, k, xhat, z, policy) for z in sources]
    a, b, c = fields
    return (np.abs(a), np.abs(b), np.abs(c)), (np.abs(a + b), np.abs(b + c), np.abs(c + a))
