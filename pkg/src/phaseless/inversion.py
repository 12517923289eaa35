"""Least-squares recovery of sphere parameters from phaseless data.

Parameters are searched in wavenumber-scaled units: lengths are multiplied
by ``k`` and the impedance by ``1/k``, so a unit step is comparable across
frequencies.  The physical kind is fixed for a run.
"""

from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import minimize

from . import forward
from .exceptions import GeometryError, ScatteringError
from .forward import DEFAULT_POLICY, FOUR_PI, Kind, ScattererConfig
from .measurement import PhaselessDataset, check_exterior, synthesize_phaseless

PENALTY = 1e6
SCALE = (1.0 / FOUR_PI) ** 2
SIMPLEX_EDGE = 0.1


@dataclass(frozen=True)
class MisfitOptions:
    """Weights for (d_ref, d_src, d_sup); a zero weight drops that dataset."""

    weights: tuple = (1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0)

    def __post_init__(self):
        w = tuple(float(v) for v in self.weights)
        if len(w) != 3 or any(v < 0 for v in w):
            raise ValueError("weights must be three non-negative numbers")
        if not any(v > 0 for v in w):
            raise ValueError("at least one dataset must be active")
        if abs(sum(w) - 1.0) > 1e-12:
            raise ValueError("weights must sum to 1")
        object.__setattr__(self, "weights", w)


@dataclass(frozen=True)
class PlaneWaveDataset:
    """Surrogate data ``|u_inf(xhat_i, d_j)|`` for finitely many incident plane waves."""

    k: float
    grid: object
    directions: np.ndarray
    moduli: np.ndarray = field(repr=False)


def synthesize_plane_wave_moduli(config, k, grid, directions, policy=DEFAULT_POLICY):
    directions = np.atleast_2d(np.asarray(directions, dtype=float))
    values = forward.farfield_plane_wave(config, k, grid.nodes, directions, policy)
    return PlaneWaveDataset(float(k), grid, directions, np.abs(np.reshape(values, (len(grid), -1))))


def n_params(kind):
    return 6 if Kind(kind) in (Kind.IMPEDANCE, Kind.MEDIUM) else 4


def to_vector(config, k):
    """Scaled parameter vector ``[k c, k a, (Re p, Im p)]`` for a scatterer."""
    head = [*(k * config.center_array), k * config.radius]
    if config.kind is Kind.IMPEDANCE:
        head += [config.param.real / k, config.param.imag / k]
    elif config.kind is Kind.MEDIUM:
        head += [config.param.real, config.param.imag]
    return np.array(head)


def from_vector(x, kind, k):
    """Inverse of ``to_vector``; raises ValueError for infeasible vectors."""
    kind = Kind(kind)
    x = np.asarray(x, dtype=float)
    if len(x) != n_params(kind):
        raise ValueError(f"{kind.value} needs {n_params(kind)} parameters")
    param = 0j
    if kind is Kind.IMPEDANCE:
        param = complex(x[4], x[5]) * k
    elif kind is Kind.MEDIUM:
        param = complex(x[4], x[5])
    return ScattererConfig(x[:3] / k, x[3] / k, kind, param)


def misfit(candidate, observed, options=MisfitOptions(), policy=DEFAULT_POLICY):
    """Weighted mean-square gap between synthesized and observed moduli, in units of (1/4pi)^2.

    Infeasible candidates (overlapping the source geometry, failing series)
    score ``PENALTY``.
    """
    try:
        if isinstance(observed, PlaneWaveDataset):
            syn = synthesize_plane_wave_moduli(
                candidate, observed.k, observed.grid, observed.directions, policy
            )
            return float(np.mean((syn.moduli - observed.moduli) ** 2) / SCALE)
        check_exterior(candidate, observed.geometry)
        if np.any(
            np.linalg.norm(observed.geometry.gamma_points - candidate.center_array, axis=1)
            <= candidate.radius
        ):
            raise GeometryError("candidate swallows a source point")
        syn = synthesize_phaseless(
            candidate, observed.geometry, observed.k, observed.grid,
            policy=policy, check_admissible=False,
        )
    except (ScatteringError, ValueError):
        return PENALTY
    total = 0.0
    for w, a, b in zip(
        options.weights,
        (syn.d_ref, syn.d_src, syn.d_sup),
        (observed.d_ref, observed.d_src, observed.d_sup),
    ):
        if w:
            total += w * float(np.mean((a - b) ** 2))
    return total / SCALE


@dataclass
class FitResult:
    config: ScattererConfig
    misfit: float
    trace: list  # (evaluation index, misfit, scaled parameter vector)
    evaluations: int
    budget_exhausted: bool


def fit_parameters(
    observed,
    initial,
    options=MisfitOptions(),
    budget=4000,
    xatol=1e-9,
    fatol=1e-22,
    restarts=3,
    policy=DEFAULT_POLICY,
):
    """Nelder-Mead descent on the penalized misfit, starting from ``initial``.

    Coefficients are the standard ones (reflection 1, expansion 2,
    contraction 0.5, shrink 0.5) with an axis-aligned initial simplex of edge
    0.1 in scaled units.  After convergence the simplex is rebuilt around the
    best vertex up to ``restarts`` times, which guards against the collapsed
    simplices Nelder-Mead is prone to in 4 to 6 dimensions.
    """
    if budget < 1:
        raise ValueError("budget must be at least 1")
    k = observed.k
    kind = initial.kind
    trace = []

    def objective(x):
        try:
            cand = from_vector(x, kind, k)
        except ValueError:
            value = PENALTY
        else:
            value = misfit(cand, observed, options, policy)
        trace.append((len(trace), value, np.array(x)))
        return value

    x_best = to_vector(initial, k)
    f_best = objective(x_best)
    exhausted = False
    for _ in range(restarts + 1):
        remaining = budget - len(trace)
        if remaining <= 0 or f_best == 0.0:
            exhausted = remaining <= 0 and f_best != 0.0
            break
        simplex = np.vstack([x_best, x_best + SIMPLEX_EDGE * np.eye(len(x_best))])
        res = minimize(
            objective,
            x_best,
            method="Nelder-Mead",
            options={
                "initial_simplex": simplex,
                "maxfev": remaining,
                "xatol": xatol,
                "fatol": fatol,
                "adaptive": False,
            },
        )
        improved = res.fun < f_best
        if improved:
            x_best, f_best = np.array(res.x), float(res.fun)
        if len(trace) >= budget:
            exhausted = True
            break
        if not improved:
            break
    return FitResult(from_vector(x_best, kind, k), f_best, trace, len(trace), exhausted)


@dataclass(frozen=True)
class ValleyProfile:
    shifts: np.ndarray
    misfits: np.ndarray
    mode: str
    truncated: bool


def translation_valley_scan(
    truth,
    direction,
    magnitudes,
    mode,
    k,
    geometry=None,
    grid=None,
    plane_directions=None,
    options=MisfitOptions(),
    policy=DEFAULT_POLICY,
):
    """Misfit of translated copies of ``truth`` against data generated by ``truth``.

    ``mode="plane-only"`` uses moduli of plane-wave far fields for the given
    incident directions (five fixed directions by default).
    ``mode="full-phaseless"`` uses the three point-source datasets.  Shifts
    that collide with the source geometry truncate the profile.
    """
    direction = np.asarray(direction, dtype=float)
    direction = direction / np.linalg.norm(direction)
    magnitudes = np.asarray(magnitudes, dtype=float)
    if mode == "plane-only":
        if plane_directions is None:
            plane_directions = default_plane_directions()
        observed = synthesize_plane_wave_moduli(truth, k, grid, plane_directions, policy)
    elif mode == "full-phaseless":
        observed = synthesize_phaseless(truth, geometry, k, grid, policy=policy)
    else:
        raise ValueError("mode must be 'plane-only' or 'full-phaseless'")
    values = []
    truncated = False
    for s in magnitudes:
        candidate = truth.shifted(s * direction)
        if isinstance(observed, PhaselessDataset):
            try:
                check_exterior(candidate, geometry)
            except GeometryError:
                truncated = True
                break
        values.append(misfit(candidate, observed, options, policy))
    n = len(values)
    return ValleyProfile(magnitudes[:n], np.array(values), mode, truncated)


def default_plane_directions():
    d = np.array(
        [[0.0, 0.0, 1.0], [1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [1.0, 1.0, 1.0], [-1.0, 0.5, -0.25]]
    )
    return d / np.linalg.norm(d, axis=1)[:, None]
