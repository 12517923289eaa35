"""Relative-phase information recoverable from three moduli.

For complex far fields ``A = v_inf(xhat, z0)`` and ``B = v_inf(xhat, z)`` the
moduli ``|A|``, ``|B|`` and ``|A + B|`` determine the interference term
``Re(A conj(B)) = (|A+B|^2 - |A|^2 - |B|^2) / 2`` and therefore the cosine of
the phase difference wherever both amplitudes are nonzero.  The sign of the
phase difference is not recoverable pointwise; ``triangle_phase_consistency``
certifies that a globally consistent signed assignment exists.
"""

from dataclasses import dataclass, field

import numpy as np

from .exceptions import InconsistentDataError
from .forward import phi_farfield

TRIANGLE_TOL = 1e-9
DEFAULT_REL_FLOOR = 1e-10


def cross_term(a, b, s, tol=TRIANGLE_TOL):
    """``Re(A conj(B))`` from ``|A|``, ``|B|`` and ``|A+B|``."""
    a, b, s = (np.asarray(v, dtype=float) for v in (a, b, s))
    if np.any(a < 0) or np.any(b < 0) or np.any(s < 0):
        raise InconsistentDataError("moduli must be non-negative")
    slack = tol * np.maximum(1.0, np.maximum(a, b))
    if np.any(np.abs(a - b) - s > slack) or np.any(s - (a + b) > slack):
        raise InconsistentDataError("moduli violate the triangle inequality")
    out = 0.5 * (s * s - a * a - b * b)
    return float(out) if out.ndim == 0 else out


def cos_phase_diff(a, b, s, floor=None, tol=TRIANGLE_TOL, strict=True):
    """Cosine of ``arg A - arg B``; NaN where either amplitude is at or below ``floor``.

    ``floor`` defaults to ``1e-10`` times the largest amplitude supplied.
    With ``strict=False`` (noisy data) inconsistent entries are clamped into
    [-1, 1] instead of raising.
    """
    a, b, s = (np.asarray(v, dtype=float) for v in (a, b, s))
    if floor is None:
        floor = DEFAULT_REL_FLOOR * max(float(np.max(a)), float(np.max(b)))
    re = cross_term(a, b, s, tol if strict else np.inf)
    valid = (a > floor) & (b > floor)
    with np.errstate(divide="ignore", invalid="ignore"):
        c = np.where(valid, re / (a * b), np.nan)
    over = np.abs(c) - 1.0
    if strict and np.any(over[valid] > tol):
        raise InconsistentDataError("recovered cosine lies outside [-1, 1]")
    c = np.where(valid, np.clip(c, -1.0, 1.0), np.nan)
    return float(c) if c.ndim == 0 else c


@dataclass(frozen=True)
class PhaseDiffField:
    """Cosines over the (direction, source) grid; invalid entries are NaN and masked out."""

    cos_delta: np.ndarray = field(repr=False)
    valid_mask: np.ndarray = field(repr=False)

    @property
    def coverage(self):
        return float(self.valid_mask.mean())


def phase_difference_field(dataset, rel_floor=DEFAULT_REL_FLOOR, tol=TRIANGLE_TOL, strict=True):
    a = np.broadcast_to(dataset.d_ref[:, None], dataset.d_src.shape)
    floor = rel_floor * max(float(dataset.d_ref.max()), float(dataset.d_src.max()))
    c = cos_phase_diff(a, dataset.d_src, dataset.d_sup, floor=floor, tol=tol, strict=strict)
    return PhaseDiffField(c, np.isfinite(c))


def dichotomy_residuals(dataset, truth, rel_floor=DEFAULT_REL_FLOOR):
    """Sup-norm misfit of the recovered cosines against the two proof branches.

    ``truth`` holds the phased far fields ``ref`` (M,) and ``src`` (M, S).
    The same-branch target is ``cos(arg A - arg B)``.  The conjugate branch
    reflects both phases about the reference point-source phase
    ``psi = arg Phi_inf(xhat, z0)``, giving ``cos(arg A + arg B - 2 psi)``.
    """
    pdf = phase_difference_field(dataset, rel_floor)
    mask = pdf.valid_mask
    if not mask.any():
        raise ValueError("no valid entries above the amplitude floor")
    alpha = np.angle(truth.ref)[:, None]
    beta = np.angle(truth.src)
    psi = np.angle(phi_farfield(dataset.grid.nodes, dataset.geometry.z0, dataset.k))[:, None]
    same = np.cos(alpha - beta)
    conj = np.cos(alpha + beta - 2.0 * psi)
    res_same = float(np.max(np.abs(pdf.cos_delta - same)[mask]))
    res_conj = float(np.max(np.abs(pdf.cos_delta - conj)[mask]))
    return res_same, res_conj


def _wrap(angle):
    """Distance from ``angle`` to the nearest multiple of 2 pi, in [0, pi]."""
    return np.abs((angle + np.pi) % (2.0 * np.pi) - np.pi)


def triangle_phase_consistency(singles, pairs, floor=0.0, tol=TRIANGLE_TOL):
    """Residual of the best signed closure ``+-D_ab +- D_bc +- D_ca = 0 (mod 2 pi)``.

    ``singles = (|A|, |B|, |C|)`` and ``pairs = (|A+B|, |B+C|, |C+A|)``; the
    unsigned differences ``D`` come from the cosines.  Entries where any
    amplitude is at or below ``floor`` are NaN.
    """
    a, b, c = (np.asarray(v, dtype=float) for v in singles)
    ab, bc, ca = (np.asarray(v, dtype=float) for v in pairs)
    d_ab = np.arccos(cos_phase_diff(a, b, ab, floor=floor, tol=tol))
    d_bc = np.arccos(cos_phase_diff(b, c, bc, floor=floor, tol=tol))
    d_ca = np.arccos(cos_phase_diff(c, a, ca, floor=floor, tol=tol))
    best = np.full(np.shape(d_ab), np.inf)
    for s1 in (1, -1):
        for s2 in (1, -1):
            for s3 in (1, -1):
                best = np.minimum(best, _wrap(s1 * d_ab + s2 * d_bc + s3 * d_ca))
    best = np.where(np.isfinite(d_ab + d_bc + d_ca), best, np.nan)
    return float(best) if best.ndim == 0 else best
