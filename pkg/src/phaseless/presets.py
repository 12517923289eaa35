"""Named configurations shared by the checks, the regression floors and the demos."""

import numpy as np

from .forward import ScattererConfig
from .measurement import direction_grid, make_geometry

# Acceptance configuration: unit sound-soft sphere at the origin, ka = 2.
K = 2.0
RADIUS = 1.0
OMEGA_CENTER = (0.0, 0.0, 4.0)
OMEGA_RADIUS = 1.0  # k * R = 2 < pi
GAMMA_COUNT = 64
GRID = (8, 16)

# Regression floors, frozen from the forward model at the configuration above
# with the shift 0.5/k along x.  Computed values in the trailing comments;
# tests/test_regression_floors.py recomputes them.
TRANSLATION_DATASET_GAP_FLOOR = 0.011  # 0.0120160 (absolute; about 0.151 / (4 pi))
CONJUGATE_BRANCH_FLOOR = 0.4  # 0.439881
TRIANGLE_PERTURBATION_FLOOR = 0.07  # 0.0789753
GATE_DIRICHLET_NEUMANN_FLOOR = 0.055  # 0.0611088
FULL_VALLEY_FLOOR = 1.0e-3  # 1.11616e-3
STRICT_MINIMUM_MARGIN = 4e-7  # 4.49946e-7


def acceptance_scatterer():
    return ScattererConfig.dirichlet((0.0, 0.0, 0.0), RADIUS)


def acceptance_geometry(count=GAMMA_COUNT):
    return make_geometry(OMEGA_CENTER, OMEGA_RADIUS, count=count)


def acceptance_grid():
    return direction_grid(*GRID)


def acceptance_shift(k=K):
    return np.array([0.5 / k, 0.0, 0.0])
