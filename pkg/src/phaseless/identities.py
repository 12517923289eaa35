"""Numerical checks of the structural identities behind phaseless uniqueness."""

from dataclasses import asdict, dataclass

import numpy as np

from . import forward
from .exceptions import GeometryError
from .forward import DEFAULT_POLICY, FOUR_PI
from .measurement import check_admissible_ball, check_exterior, synthesize_phaseless


@dataclass(frozen=True)
class CheckResult:
    name: str
    residual: float | None
    threshold: float
    passed: bool
    detail: str = ""

    def as_record(self):
        return asdict(self)


def check_mixed_reciprocity(config, k, obs_grid, source_points, policy=DEFAULT_POLICY):
    """Max relative gap of ``4 pi v_inf_D(xhat, z) = u^s(z, -xhat)``.

    The left side comes from the addition-theorem expansion of the point
    source, the right side from the plane-wave series evaluated at ``z``.
    """
    nodes = getattr(obs_grid, "nodes", obs_grid)
    zs = np.atleast_2d(source_points)
    lhs = FOUR_PI * forward.farfield_point_source(config, k, nodes, zs, policy)  # (M, S)
    rhs = forward.scattered_field_plane_wave(config, k, zs, -nodes, policy).T
    return float(np.max(np.abs(lhs - rhs) / np.maximum(1e-30, np.abs(rhs))))


def check_reciprocity(config, k, grid, policy=DEFAULT_POLICY):
    """Max of ``|u_inf(xhat, d) - u_inf(-d, -xhat)|`` over all grid pairs."""
    nodes = getattr(grid, "nodes", grid)
    forward_pairs = forward.farfield_plane_wave(config, k, nodes, nodes, policy)
    swapped = forward.farfield_plane_wave(config, k, -nodes, -nodes, policy).T
    return float(np.max(np.abs(forward_pairs - swapped)))


@dataclass(frozen=True)
class TranslationGaps:
    modulus_gap: float
    dataset_gap: float | None


def check_translation_invariance(
    config, h, k, grid, incident="plane", geometry=None, policy=DEFAULT_POLICY
):
    """Compare a scatterer with its translate by ``h``.

    ``modulus_gap`` is the sup over grid pairs of the change in plane-wave
    far-field modulus.  In ``"superposition"`` mode ``dataset_gap`` is the sup
    entrywise change of the three phaseless datasets with the geometry held
    fixed.
    """
    if incident not in ("plane", "superposition"):
        raise ValueError("incident must be 'plane' or 'superposition'")
    moved = config.shifted(h)
    nodes = grid.nodes
    u0 = forward.farfield_plane_wave(config, k, nodes, nodes, policy)
    u1 = forward.farfield_plane_wave(moved, k, nodes, nodes, policy)
    modulus_gap = float(np.max(np.abs(np.abs(u1) - np.abs(u0))))
    if incident == "plane":
        return TranslationGaps(modulus_gap, None)
    if geometry is None:
        raise ValueError("superposition mode needs a source geometry")
    check_exterior(moved, geometry)
    gate = uniqueness_gate(config, moved, geometry, k, grid, policy=policy)
    return TranslationGaps(modulus_gap, max(gate.gaps))


@dataclass(frozen=True)
class GateReport:
    gap_ref: float
    gap_src: float
    gap_sup: float
    threshold: float
    distinguishable: bool

    @property
    def gaps(self):
        return (self.gap_ref, self.gap_src, self.gap_sup)


def uniqueness_gate(config1, config2, geometry, k, grid, noise_floor=1e-12, policy=DEFAULT_POLICY):
    """Sup gaps between the three phaseless datasets of two scatterers.

    Equal datasets force equal scatterers, so any gap above ``10 * noise_floor``
    marks the pair as distinguishable.
    """
    d1 = synthesize_phaseless(config1, geometry, k, grid, policy=policy)
    d2 = synthesize_phaseless(config2, geometry, k, grid, policy=policy)
    gaps = [
        float(np.max(np.abs(d1.d_ref - d2.d_ref))),
        float(np.max(np.abs(d1.d_src - d2.d_src))),
        float(np.max(np.abs(d1.d_sup - d2.d_sup))),
    ]
    threshold = 10.0 * noise_floor
    return GateReport(*gaps, threshold=threshold, distinguishable=max(gaps) > threshold)


def check_optical_theorem(config, k, grid, directions=None, policy=DEFAULT_POLICY):
    """Relative gap of ``Im u_inf(d, d) = k/(4 pi) * integral |u_inf(., d)|^2``.

    Returns None for lossy scatterers, where the identity becomes an inequality.
    """
    if not config.lossless:
        return None
    if directions is None:
        directions = np.array(
            [[0.0, 0.0, 1.0], [1.0, 0.0, 0.0], [0.0, -1.0, 0.0], [1.0, 1.0, 1.0] / np.sqrt(3.0)]
        )
    directions = np.atleast_2d(directions)
    u = forward.farfield_plane_wave(config, k, grid.nodes, directions, policy)  # (M, D)
    energy = grid.integrate(np.abs(u) ** 2)
    forward_amp = np.array(
        [forward.farfield_plane_wave(config, k, d, d, policy) for d in directions]
    )
    lhs = forward_amp.imag
    rhs = k / FOUR_PI * energy
    return float(np.max(np.abs(lhs - rhs) / np.abs(lhs)))


def check_admissibility(omega_radius, k, policy=DEFAULT_POLICY):
    verdict = check_admissible_ball(omega_radius, k, policy)
    detail = f"kR={k * omega_radius:.12g} min|j_n|={verdict.min_abs_j:.3e}"
    if verdict.witness is not None:
        detail += f" witness n={verdict.witness}"
    return CheckResult("admissible", verdict.min_abs_j, 1e-8, verdict.admissible, detail)


def run_checks(config, k, grid, geometry, which="all", shift=None, policy=DEFAULT_POLICY):
    """Run the named checks and return a list of CheckResult records."""
    names = ("admissible", "reciprocity", "mixed", "translation", "optical")
    selected = names if which == "all" else (which,)
    unknown = set(selected) - set(names)
    if unknown:
        raise ValueError(f"unknown check: {sorted(unknown)}")
    results = []
    for name in selected:
        if name == "admissible":
            results.append(check_admissibility(geometry.omega_radius, k, policy))
        elif name == "reciprocity":
            r = check_reciprocity(config, k, grid, policy)
            results.append(CheckResult(name, r, 1e-12, r <= 1e-12))
        elif name == "mixed":
            r = check_mixed_reciprocity(config, k, grid, geometry.gamma_points, policy)
            results.append(CheckResult(name, r, 1e-8, r <= 1e-8))
        elif name == "translation":
            h = np.array([0.5 / k, 0.0, 0.0]) if shift is None else np.asarray(shift, dtype=float)
            try:
                gaps = check_translation_invariance(
                    config, h, k, grid, "superposition", geometry, policy
                )
            except GeometryError as exc:
                results.append(CheckResult(name, None, 1e-12, False, str(exc)))
                continue
            results.append(
                CheckResult(
                    "translation_plane_modulus", gaps.modulus_gap, 1e-12, gaps.modulus_gap <= 1e-12
                )
            )
            positive = gaps.dataset_gap > 0 or not np.any(h)
            results.append(
                CheckResult(
                    "translation_superposition_gap",
                    gaps.dataset_gap,
                    0.0,
                    positive,
                    "phaseless datasets must separate translates",
                )
            )
        elif name == "optical":
            r = check_optical_theorem(config, k, grid, policy=policy)
            if r is None:
                results.append(CheckResult(name, None, 1e-6, True, "not applicable: lossy"))
            else:
                results.append(CheckResult(name, r, 1e-6, r <= 1e-6))
    return results
