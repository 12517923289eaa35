"""Phaseless inverse acoustic scattering by spheres with superposed point sources."""

from .exceptions import (
    GeometryError,
    InadmissibleError,
    InconsistentDataError,
    ResonanceError,
    ScatteringError,
    TruncationError,
)
from .forward import (
    Kind,
    ScattererConfig,
    TruncationPolicy,
    farfield_plane_wave,
    farfield_point_source,
    phi_farfield,
    reflection_coefficient,
    scattered_field_plane_wave,
    total_farfield_point_source,
)
from .measurement import (
    PhaselessDataset,
    SourceGeometry,
    check_admissible_ball,
    direction_grid,
    make_geometry,
    sample_gamma,
    synthesize_phaseless,
)

__version__ = "0.1.0"
