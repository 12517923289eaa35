"""Exact series solutions for scattering by a single sphere.

A sphere of radius ``a`` centred at ``c`` is described by a per-mode
reflection coefficient ``R_n``: an incident regular wave ``j_n(kr) P_n`` is
answered by the outgoing wave ``R_n h1_n(kr) P_n``.  Everything else
(plane-wave and point-source incidence, near and far fields) follows from the
plane-wave expansion and the addition theorem

    h1_0(k|x - z|) = sum_n (2n+1) j_n(k|x|) h1_n(k|z|) P_n(xhat . zhat),  |x| < |z|,

with the angular dependence kept pre-summed over azimuthal orders.

Conventions: time factor ``exp(-i omega t)``; the scattered field behaves like
``exp(ik|x|)/|x| * u_inf(xhat)``; ``Phi(x, z) = exp(ik|x-z|) / (4 pi |x-z|)``.

Shapes: direction and point arguments are ``(3,)`` or ``(M, 3)``.  Functions
of an observation set and a source/incidence set return an ``(M, S)`` array,
squeezed along any axis that was passed as a single vector.
"""

import enum
import math
from dataclasses import dataclass, field, replace
from functools import lru_cache

import numpy as np

from .exceptions import GeometryError, ResonanceError, TruncationError
from .special import (
    derivative_table,
    legendre_table,
    spherical_h1_table,
    spherical_jn_table,
    spherical_yn_table,
)

FOUR_PI = 4.0 * np.pi


class Kind(str, enum.Enum):
    DIRICHLET = "dirichlet"
    NEUMANN = "neumann"
    IMPEDANCE = "impedance"
    MEDIUM = "medium"


@dataclass(frozen=True)
class ScattererConfig:
    """A spherical scatterer.

    ``param`` is the impedance ``lambda`` (boundary condition
    ``du/dnu + lambda u = 0`` with outward normal) for ``Kind.IMPEDANCE`` and
    the constant refractive index for ``Kind.MEDIUM``; it is ignored otherwise.
    """

    center: tuple
    radius: float
    kind: Kind = Kind.DIRICHLET
    param: complex = 0j

    def __post_init__(self):
        center = tuple(float(v) for v in np.asarray(self.center, dtype=float).ravel())
        if len(center) != 3 or not all(math.isfinite(v) for v in center):
            raise ValueError("center must be a finite 3-vector")
        object.__setattr__(self, "center", center)
        object.__setattr__(self, "kind", Kind(self.kind))
        object.__setattr__(self, "radius", float(self.radius))
        object.__setattr__(self, "param", complex(self.param))
        if not self.radius > 0 or not math.isfinite(self.radius):
            raise ValueError("radius must be positive")
        if self.kind is Kind.IMPEDANCE and self.param.imag < 0:
            raise ValueError("impedance requires Im(lambda) >= 0")
        if self.kind is Kind.MEDIUM:
            n0 = self.param
            if n0.real <= 0 or n0.imag < 0:
                raise ValueError("refractive index requires Re(n) > 0 and Im(n) >= 0")
            if n0 == 1:
                raise ValueError("refractive index n = 1 is not a scatterer")
        if self.kind in (Kind.DIRICHLET, Kind.NEUMANN):
            object.__setattr__(self, "param", 0j)

    @classmethod
    def dirichlet(cls, center, radius):
        return cls(center, radius, Kind.DIRICHLET)

    @classmethod
    def neumann(cls, center, radius):
        return cls(center, radius, Kind.NEUMANN)

    @classmethod
    def impedance(cls, center, radius, lam):
        return cls(center, radius, Kind.IMPEDANCE, lam)

    @classmethod
    def medium(cls, center, radius, index):
        return cls(center, radius, Kind.MEDIUM, index)

    @property
    def center_array(self):
        return np.array(self.center)

    @property
    def lossless(self):
        return self.param.imag == 0

    def shifted(self, h):
        return replace(self, center=tuple(self.center_array + np.asarray(h, dtype=float)))


@dataclass(frozen=True)
class TruncationPolicy:
    """Series cutoff rule.

    The starting order is ``ceil(ka + 4 (ka)**(1/3) + 8)``.  The order is then
    grown until the last retained term, including any radial Hankel factors
    at the evaluation distances, is below ``tail_tol`` relative to the
    largest term.  ``zero_reflection`` forces every ``R_n`` to zero, which
    turns the scatterer off (test hook).
    """

    tail_tol: float = 1e-14
    n_cap: int = 300
    zero_reflection: bool = False

    def base_order(self, ka):
        return max(1, math.ceil(ka + 4.0 * ka ** (1.0 / 3.0) + 8.0))


DEFAULT_POLICY = TruncationPolicy()


@dataclass
class FarFieldSamples:
    grid: np.ndarray
    values: np.ndarray = field(repr=False)

    def __post_init__(self):
        self.grid = np.atleast_2d(np.asarray(self.grid, dtype=float))
        self.values = np.asarray(self.values, dtype=complex)
        if self.grid.shape[0] != self.values.shape[0]:
            raise ValueError("grid and values must have equal length")
        if not np.all(np.isfinite(self.values)):
            raise ValueError("far-field values must be finite")


def _tables(nmax, x):
    """j, j', h, h' at orders 0..nmax for real x."""
    jt = spherical_jn_table(nmax + 1, x)
    ht = jt + 1j * spherical_yn_table(nmax + 1, x)
    return jt[: nmax + 1], derivative_table(jt, x), ht[: nmax + 1], derivative_table(ht, x)


@lru_cache(maxsize=512)
def _reflection_cached(kind, param, ka, k, nmax):
    j, jp, h, hp = _tables(nmax, ka)
    with np.errstate(over="ignore", invalid="ignore", divide="ignore"):
        if kind is Kind.DIRICHLET:
            num, den = -j, h
        elif kind is Kind.NEUMANN:
            num, den = -jp, hp
        elif kind is Kind.IMPEDANCE:
            num = -(k * jp + param * j)
            den = k * hp + param * h
        else:
            k1 = k * np.sqrt(param)
            x1 = k1 * ka / k
            if param.imag == 0:
                k1, x1 = k1.real, x1.real
            jt1 = spherical_jn_table(nmax + 1, x1)
            j1, j1p = jt1[: nmax + 1], derivative_table(jt1, x1)
            num = -(k * jp * j1 - k1 * j * j1p)
            den = k * hp * j1 - k1 * h * j1p
        if np.any(np.abs(den) < 1e-300):
            raise ResonanceError("vanishing mode denominator in reflection coefficient")
        out = num / den
    # Orders far past ka give 0/inf; those modes are genuinely absent.
    out[~np.isfinite(out) & (np.abs(num) == 0)] = 0
    out.setflags(write=False)
    return out


def reflection_coefficients(config, k, nmax, policy=DEFAULT_POLICY):
    """Array ``R_0 .. R_nmax`` for ``config`` at wavenumber ``k``."""
    if not k > 0:
        raise ValueError("wavenumber must be positive")
    if policy.zero_reflection:
        return np.zeros(nmax + 1, dtype=complex)
    return _reflection_cached(config.kind, config.param, k * config.radius, float(k), int(nmax))


def reflection_coefficient(config, n, k, policy=DEFAULT_POLICY):
    return complex(reflection_coefficients(config, k, max(int(n), 1), policy)[n])


def series_order(config, k, policy=DEFAULT_POLICY, distances=()):
    """Order N and coefficients R_0..R_N for a series with the given radial factors.

    Each entry of ``distances`` contributes a factor ``|h1_n(k d)|`` to the
    per-order term magnitude; without distances the term is ``(2n+1)|R_n|``.
    """
    ka = k * config.radius
    nmax = policy.base_order(ka)
    while True:
        R = reflection_coefficients(config, k, nmax, policy)
        if policy.zero_reflection:
            return nmax, R
        with np.errstate(over="ignore", invalid="ignore"):
            w = (2 * np.arange(nmax + 1) + 1) * np.abs(R)
            for d in distances:
                w = w * np.abs(spherical_h1_table(nmax, k * d))
        if np.all(np.isfinite(w)):
            peak = w.max()
            if peak == 0 or w[-1] <= policy.tail_tol * peak:
                return nmax, R
        if nmax >= policy.n_cap:
            raise TruncationError(
                f"series tail not below {policy.tail_tol:g} at order {nmax} (ka={ka:g})"
            )
        nmax = min(policy.n_cap, 2 * nmax)


def _vectors(v):
    v = np.asarray(v, dtype=float)
    return np.atleast_2d(v), v.ndim == 1


def _squeeze(out, single_rows, single_cols):
    if single_cols:
        out = out[:, 0]
    if single_rows:
        out = out[0]
    return out


def _check_directions(d):
    norms = np.linalg.norm(d, axis=-1)
    if np.any(np.abs(norms - 1) > 1e-12):
        raise ValueError("directions must be unit vectors")


def incident_plane_wave(x, d, k):
    """``exp(ik x . d)`` for points ``x`` and incident directions ``d``."""
    x, sx = _vectors(x)
    d, sd = _vectors(d)
    return _squeeze(np.exp(1j * k * (x @ d.T)), sx, sd)


def farfield_plane_wave(config, k, xhat, d, policy=DEFAULT_POLICY):
    """Far-field pattern ``u_inf(xhat, d)`` of the sphere for plane-wave incidence."""
    xhat, sx = _vectors(xhat)
    d, sd = _vectors(d)
    _check_directions(xhat)
    _check_directions(d)
    nmax, R = series_order(config, k, policy)
    c = config.center_array
    P = legendre_table(nmax, xhat @ d.T)
    coef = (2 * np.arange(nmax + 1) + 1) * R / (1j * k)
    series = np.tensordot(coef, P, axes=1)
    phase = np.exp(1j * k * (d @ c))[None, :] * np.exp(-1j * k * (xhat @ c))[:, None]
    return _squeeze(phase * series, sx, sd)


def _local(config, x, what):
    rel = x - config.center_array
    r = np.linalg.norm(rel, axis=1)
    if np.any(r <= config.radius):
        raise GeometryError(f"{what} inside or on the scatterer")
    return rel, r


def scattered_field_plane_wave(config, k, x, d, policy=DEFAULT_POLICY):
    """Scattered field ``u^s(x, d)`` at exterior points for plane-wave incidence."""
    x, sx = _vectors(x)
    d, sd = _vectors(d)
    _check_directions(d)
    rel, r = _local(config, x, "evaluation point")
    nmax, R = series_order(config, k, policy, distances=(r.min(),))
    n = np.arange(nmax + 1)
    h = spherical_h1_table(nmax, k * r)  # (N+1, P)
    P = legendre_table(nmax, (rel / r[:, None]) @ d.T)  # (N+1, P, D)
    coef = (2 * n + 1) * (1j**n) * R
    series = np.einsum("n,np,npd->pd", coef, h, P)
    phase = np.exp(1j * k * (d @ config.center_array))[None, :]
    return _squeeze(phase * series, sx, sd)


def total_field_plane_wave(config, k, x, d, policy=DEFAULT_POLICY):
    return incident_plane_wave(x, d, k) + scattered_field_plane_wave(config, k, x, d, policy)


def phi(x, z, k):
    """Fundamental solution ``exp(ik|x-z|) / (4 pi |x-z|)``."""
    x, sx = _vectors(x)
    z, sz = _vectors(z)
    dist = np.linalg.norm(x[:, None, :] - z[None, :, :], axis=-1)
    if np.any(dist == 0):
        raise GeometryError("fundamental solution evaluated at its source")
    return _squeeze(np.exp(1j * k * dist) / (FOUR_PI * dist), sx, sz)


def phi_farfield(xhat, z, k):
    """Far-field pattern ``exp(-ik xhat . z) / (4 pi)`` of a point source at ``z``."""
    xhat, sx = _vectors(xhat)
    z, sz = _vectors(z)
    return _squeeze(np.exp(-1j * k * (xhat @ z.T)) / FOUR_PI, sx, sz)


def farfield_point_source(config, k, xhat, z, policy=DEFAULT_POLICY):
    """Far field ``v_inf_D(xhat, z)`` scattered by the sphere from a point source at ``z``.

    About the centre, ``Phi(., z)`` has regular coefficients
    ``(ik / 4pi) (2n+1) h1_n(k|z'|)``; after reflection and passage to the far
    field (``h1_n(t) ~ (-i)**(n+1) exp(it) / t``) this gives

        v_inf_D = exp(-ik xhat.c) / (4 pi) * sum (2n+1) (-i)**n R_n h1_n(k|z'|) P_n(xhat . zhat').
    """
    xhat, sx = _vectors(xhat)
    z, sz = _vectors(z)
    _check_directions(xhat)
    rel, rho = _local(config, z, "source point")
    nmax, R = series_order(config, k, policy, distances=(rho.min(),))
    n = np.arange(nmax + 1)
    h = spherical_h1_table(nmax, k * rho)  # (N+1, S)
    P = legendre_table(nmax, xhat @ (rel / rho[:, None]).T)  # (N+1, M, S)
    coef = (2 * n + 1) * ((-1j) ** n) * R / FOUR_PI
    series = np.einsum("n,ns,nms->ms", coef, h, P)
    phase = np.exp(-1j * k * (xhat @ config.center_array))[:, None]
    return _squeeze(phase * series, sx, sz)


def scattered_field_point_source(config, k, x, z, policy=DEFAULT_POLICY):
    """Scattered near field at exterior points ``x`` for a point source at ``z``."""
    x, sx = _vectors(x)
    z, sz = _vectors(z)
    rel_x, r = _local(config, x, "evaluation point")
    rel_z, rho = _local(config, z, "source point")
    nmax, R = series_order(config, k, policy, distances=(r.min(), rho.min()))
    n = np.arange(nmax + 1)
    hx = spherical_h1_table(nmax, k * r)
    hz = spherical_h1_table(nmax, k * rho)
    P = legendre_table(nmax, (rel_x / r[:, None]) @ (rel_z / rho[:, None]).T)
    coef = (1j * k / FOUR_PI) * (2 * n + 1) * R
    return _squeeze(np.einsum("n,np,ns,nps->ps", coef, hx, hz, P), sx, sz)


def total_farfield_point_source(config, k, xhat, z, policy=DEFAULT_POLICY):
    """``v_inf = v_inf_D + Phi_inf``: the far field co-produced by sphere and source."""
    return farfield_point_source(config, k, xhat, z, policy) + phi_farfield(xhat, z, k)


def superposition_farfield(config, k, xhat, z1, z2, policy=DEFAULT_POLICY):
    """Far field for the incident field ``Phi(., z1) + Phi(., z2)`` by linearity."""
    z1 = np.asarray(z1, dtype=float)
    z2 = np.asarray(z2, dtype=float)
    if np.any(np.all(np.isclose(np.atleast_2d(z1), np.atleast_2d(z2), rtol=0, atol=1e-14), axis=-1)):
        raise GeometryError("superposed point sources must be distinct")
    return total_farfield_point_source(config, k, xhat, z1, policy) + total_farfield_point_source(
        config, k, xhat, z2, policy
    )
