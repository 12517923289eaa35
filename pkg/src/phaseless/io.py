"""JSON run configurations and CSV/JSON serialization of datasets and reports.

Run configuration (all lengths in units of 1/k when ``scaled_units`` is true;
the impedance is then given in units of k)::

    {
      "k": 2.0,
      "scaled_units": false,
      "scatterer": {"kind": "dirichlet|neumann|impedance|medium",
                    "center": [x, y, z], "radius": a,
                    "impedance": [re, im],          # impedance only
                    "index": [re, im]},             # medium only
      "geometry": {"omega_center": [x, y, z], "omega_radius": R,
                   "cap_axis": [x, y, z],           # optional, faces scatterer
                   "cap_half_angle": 1.5707963267948966,
                   "gamma_count": 64,
                   "z0": [x, y, z]},                # optional
      "grid": {"n_polar": 8, "n_azimuthal": 16},
      "truncation": {"tail_tol": 1e-14, "n_cap": 300, "zero_reflection": false},
      "noise": {"level": 0.0, "seed": 0},
      "check": {"shift": [hx, hy, hz]},
      "demo": {"direction": [1, 0, 0], "shifts": [0, 0.05, ...]}
    }

Dataset directory: ``manifest.json`` plus ``d_ref.csv``, ``d_src.csv`` and
``d_sup.csv`` with columns ``obs_theta, obs_phi, source_index, value``
(``source_index = -1`` is the reference source ``z0``).  The optional phased
dump adds ``v_ref.csv`` and ``v_src.csv`` with ``re, im`` in place of
``value``.  Reals are written with 17 significant digits.
"""

import csv
import json
import re
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .exceptions import InadmissibleError, ScatteringError
from .forward import Kind, ScattererConfig, TruncationPolicy
from .measurement import (
    PhasedFarFields,
    PhaselessDataset,
    SourceGeometry,
    check_admissible_ball,
    check_exterior,
    direction_grid,
    make_geometry,
)

FORMAT_VERSION = "1"
REF_INDEX = -1


class ConfigError(ScatteringError):
    """A run configuration or input file failed validation."""


def fmt(value):
    return f"{value:.17g}"


@dataclass
class RunConfig:
    k: float
    scatterer: ScattererConfig
    geometry: SourceGeometry
    grid: object
    policy: TruncationPolicy
    noise_level: float = 0.0
    seed: int = 0
    extras: dict = field(default_factory=dict)


def _line_of(text, key):
    if text is None:
        return ""
    m = re.search(rf'"{re.escape(key)}"\s*:', text)
    if not m:
        return ""
    return f" (line {text.count(chr(10), 0, m.start()) + 1})"


class _Reader:
    def __init__(self, text):
        self.text = text

    def get(self, section, key, path, default=..., cast=float):
        if key not in section:
            if default is ...:
                parent = path.rstrip(".").split(".")[-1]
                where = _line_of(self.text, parent) if parent else ""
                raise ConfigError(f"{path}{key}: missing required field{where}")
            return default
        value = section[key]
        try:
            if cast is None:
                return value
            return cast(value)
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"{path}{key}: {exc}{_line_of(self.text, key)}") from None

    def section(self, raw, key, path="", required=True):
        if key not in raw:
            if required:
                raise ConfigError(f"{path}{key}: missing required field")
            return {}
        value = raw[key]
        if not isinstance(value, dict):
            raise ConfigError(f"{path}{key}: expected an object{_line_of(self.text, key)}")
        return value


def _vec3(value):
    arr = np.asarray(value, dtype=float)
    if arr.shape != (3,):
        raise ValueError("expected a 3-vector")
    return arr


def _cplx(value):
    if isinstance(value, (list, tuple)):
        if len(value) != 2:
            raise ValueError("expected [re, im]")
        return complex(float(value[0]), float(value[1]))
    return complex(float(value))


def parse_scatterer(raw, k, scaled=False, text=None, path="scatterer."):
    """Build a ScattererConfig from its JSON object."""
    rd = _Reader(text)
    unit = 1.0 / k if scaled else 1.0
    kind_name = rd.get(raw, "kind", path, cast=str)
    try:
        kind = Kind(kind_name.lower())
    except ValueError:
        raise ConfigError(f"{path}kind: unknown kind {kind_name!r}{_line_of(text, 'kind')}") from None
    center = rd.get(raw, "center", path, cast=_vec3) * unit
    radius = rd.get(raw, "radius", path) * unit
    param = 0j
    if kind is Kind.IMPEDANCE:
        param = rd.get(raw, "impedance", path, cast=_cplx) * (k if scaled else 1.0)
    elif kind is Kind.MEDIUM:
        param = rd.get(raw, "index", path, cast=_cplx)
    try:
        return ScattererConfig(center, radius, kind, param)
    except ValueError as exc:
        raise ConfigError(f"{path.rstrip('.')}: {exc}{_line_of(text, path.rstrip('.'))}") from None


def parse_run_config(raw, text=None):
    rd = _Reader(text)
    if not isinstance(raw, dict):
        raise ConfigError("configuration must be a JSON object")
    k = rd.get(raw, "k", "")
    if not k > 0:
        raise ConfigError(f"k: must be positive{_line_of(text, 'k')}")
    scaled = bool(raw.get("scaled_units", False))
    unit = 1.0 / k if scaled else 1.0
    scatterer = parse_scatterer(rd.section(raw, "scatterer"), k, scaled, text)

    g = rd.section(raw, "geometry")
    omega_center = rd.get(g, "omega_center", "geometry.", cast=_vec3) * unit
    omega_radius = rd.get(g, "omega_radius", "geometry.") * unit
    cap_axis = rd.get(g, "cap_axis", "geometry.", default=None, cast=None)
    z0 = rd.get(g, "z0", "geometry.", default=None, cast=None)
    try:
        geometry = make_geometry(
            omega_center,
            omega_radius,
            cap_axis=None if cap_axis is None else _vec3(cap_axis),
            cap_half_angle=rd.get(g, "cap_half_angle", "geometry.", default=np.pi / 2),
            count=rd.get(g, "gamma_count", "geometry.", default=64, cast=int),
            z0=None if z0 is None else _vec3(z0) * unit,
            scatterer_center=scatterer.center_array,
        )
        check_exterior(scatterer, geometry)
    except (ValueError, ScatteringError) as exc:
        raise ConfigError(f"geometry: {exc}{_line_of(text, 'geometry')}") from None
    verdict = check_admissible_ball(geometry.omega_radius, k)
    if not verdict.admissible:
        raise InadmissibleError(
            f"geometry: k^2 is a Dirichlet eigenvalue of Omega "
            f"(witness n={verdict.witness}){_line_of(text, 'omega_radius')}",
            witness=verdict.witness,
        )

    gr = rd.section(raw, "grid", required=False)
    try:
        grid = direction_grid(
            rd.get(gr, "n_polar", "grid.", default=8, cast=int),
            rd.get(gr, "n_azimuthal", "grid.", default=16, cast=int),
        )
    except ValueError as exc:
        raise ConfigError(f"grid: {exc}{_line_of(text, 'grid')}") from None

    tr = rd.section(raw, "truncation", required=False)
    policy = TruncationPolicy(
        tail_tol=rd.get(tr, "tail_tol", "truncation.", default=1e-14),
        n_cap=rd.get(tr, "n_cap", "truncation.", default=300, cast=int),
        zero_reflection=rd.get(tr, "zero_reflection", "truncation.", default=False, cast=bool),
    )
    nz = rd.section(raw, "noise", required=False)
    level = rd.get(nz, "level", "noise.", default=0.0)
    if level < 0:
        raise ConfigError(f"noise.level: must be non-negative{_line_of(text, 'level')}")
    seed = rd.get(nz, "seed", "noise.", default=0, cast=int)

    extras = {}
    for name in ("check", "demo"):
        extras[name] = dict(rd.section(raw, name, required=False))
    for name in ("shift", "direction"):
        for sec in extras.values():
            if name in sec:
                sec[name] = _vec3(sec[name]) * (unit if name == "shift" else 1.0)
    if "shifts" in extras["demo"]:
        extras["demo"]["shifts"] = np.asarray(extras["demo"]["shifts"], dtype=float) * unit
    return RunConfig(k, scatterer, geometry, grid, policy, level, seed, extras)


def load_run_config(path):
    path = Path(path)
    text = path.read_text()
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: invalid JSON at line {exc.lineno}: {exc.msg}") from None
    return parse_run_config(raw, text)


def _rows(grid, values, source_index):
    """Yield (theta, phi, source, value) rows in direction-major order."""
    values = np.asarray(values)
    if values.ndim == 1:
        values = values[:, None]
    for i in range(values.shape[0]):
        for j in range(values.shape[1]):
            yield grid.theta[i], grid.phi[i], source_index(j), values[i, j]


def _write_csv(path, header, rows):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        w.writerows(rows)


def _write_real(path, grid, values, ref):
    idx = (lambda j: REF_INDEX) if ref else (lambda j: j)
    rows = ([fmt(t), fmt(p), s, fmt(v)] for t, p, s, v in _rows(grid, values, idx))
    _write_csv(path, ["obs_theta", "obs_phi", "source_index", "value"], rows)


def _write_complex(path, grid, values, ref):
    idx = (lambda j: REF_INDEX) if ref else (lambda j: j)
    rows = (
        [fmt(t), fmt(p), s, fmt(v.real), fmt(v.imag)] for t, p, s, v in _rows(grid, values, idx)
    )
    _write_csv(path, ["obs_theta", "obs_phi", "source_index", "re", "im"], rows)


def geometry_record(geometry):
    return {
        "z0": geometry.z0.tolist(),
        "omega_center": geometry.omega_center.tolist(),
        "omega_radius": float(geometry.omega_radius),
        "cap_axis": geometry.cap_axis.tolist(),
        "cap_half_angle": float(geometry.cap_half_angle),
        "gamma_points": geometry.gamma_points.tolist(),
    }


def write_dataset(dataset, outdir, phased=None, policy=None):
    """Write a PhaselessDataset (and optionally its phased far fields) to ``outdir``."""
    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    grid = dataset.grid
    _write_real(outdir / "d_ref.csv", grid, dataset.d_ref, ref=True)
    _write_real(outdir / "d_src.csv", grid, dataset.d_src, ref=False)
    _write_real(outdir / "d_sup.csv", grid, dataset.d_sup, ref=False)
    files = ["d_ref.csv", "d_src.csv", "d_sup.csv"]
    if phased is not None:
        _write_complex(outdir / "v_ref.csv", grid, phased.ref, ref=True)
        _write_complex(outdir / "v_src.csv", grid, phased.src, ref=False)
        files += ["v_ref.csv", "v_src.csv"]
    manifest = {
        "format_version": FORMAT_VERSION,
        "k": dataset.k,
        "geometry": geometry_record(dataset.geometry),
        "grid": {"n_polar": grid.n_polar, "n_azimuthal": grid.n_azimuthal},
        "noise": {"level": dataset.noise_level, "seed": dataset.seed},
        "files": files,
    }
    if policy is not None:
        manifest["truncation"] = {
            "tail_tol": policy.tail_tol,
            "n_cap": policy.n_cap,
            "zero_reflection": policy.zero_reflection,
        }
    (outdir / "manifest.json").write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n")
    return outdir


def _read_table(path, grid, n_sources, columns):
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        expected = ["obs_theta", "obs_phi", "source_index", *columns]
        if header != expected:
            raise ConfigError(f"{path}: expected header {expected}, got {header}")
        rows = list(reader)
    if len(rows) != len(grid) * n_sources:
        raise ConfigError(f"{path}: expected {len(grid) * n_sources} rows, got {len(rows)}")
    data = np.array([[float(v) for v in row[3:]] for row in rows]).reshape(len(grid), n_sources, -1)
    theta = np.array([float(row[0]) for row in rows]).reshape(len(grid), n_sources)
    if not np.array_equal(theta[:, 0], grid.theta):
        raise ConfigError(f"{path}: observation angles do not match the manifest grid")
    return data


def read_dataset(path):
    """Read a dataset directory; returns ``(PhaselessDataset, PhasedFarFields or None)``."""
    path = Path(path)
    manifest_path = path / "manifest.json"
    try:
        manifest = json.loads(manifest_path.read_text())
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{manifest_path}: invalid JSON at line {exc.lineno}: {exc.msg}") from None
    if manifest.get("format_version") != FORMAT_VERSION:
        raise ConfigError(f"{manifest_path}: unsupported format_version")
    g = manifest["geometry"]
    geometry = SourceGeometry(
        np.array(g["z0"]),
        np.array(g["omega_center"]),
        g["omega_radius"],
        np.array(g["cap_axis"]),
        g["cap_half_angle"],
        np.array(g["gamma_points"]),
    )
    grid = direction_grid(manifest["grid"]["n_polar"], manifest["grid"]["n_azimuthal"])
    s = geometry.n_sources
    d_ref = _read_table(path / "d_ref.csv", grid, 1, ["value"])[:, 0, 0]
    d_src = _read_table(path / "d_src.csv", grid, s, ["value"])[:, :, 0]
    d_sup = _read_table(path / "d_sup.csv", grid, s, ["value"])[:, :, 0]
    dataset = PhaselessDataset(
        float(manifest["k"]), geometry, grid, d_ref, d_src, d_sup,
        float(manifest["noise"]["level"]), int(manifest["noise"]["seed"]),
    )
    phased = None
    if (path / "v_ref.csv").exists() and (path / "v_src.csv").exists():
        ref = _read_table(path / "v_ref.csv", grid, 1, ["re", "im"])[:, 0]
        src = _read_table(path / "v_src.csv", grid, s, ["re", "im"])
        phased = PhasedFarFields(ref[:, 0] + 1j * ref[:, 1], src[..., 0] + 1j * src[..., 1])
    return dataset, phased


def write_json(obj, path):
    text = json.dumps(obj, indent=2, sort_keys=True, default=_json_default) + "\n"
    if path is None:
        print(text, end="")
    else:
        Path(path).write_text(text)


def _json_default(value):
    if isinstance(value, np.ndarray):
        return value.tolist()
    if isinstance(value, (np.floating, np.integer, np.bool_)):
        return value.item()
    if isinstance(value, complex):
        return [value.real, value.imag]
    raise TypeError(f"cannot serialize {type(value).__name__}")


def scatterer_record(config):
    rec = {"kind": config.kind.value, "center": list(config.center), "radius": config.radius}
    if config.kind is Kind.IMPEDANCE:
        rec["impedance"] = [config.param.real, config.param.imag]
    elif config.kind is Kind.MEDIUM:
        rec["index"] = [config.param.real, config.param.imag]
    return rec


def write_trace(trace, path):
    width = max(len(x) for _, _, x in trace)
    header = ["evaluation", "misfit"] + [f"p{i}" for i in range(width)]
    rows = ([i, fmt(f), *(fmt(v) for v in x)] for i, f, x in trace)
    _write_csv(path, header, rows)


def write_profile(shifts, plane, full, path):
    rows = ([fmt(s), fmt(p), fmt(f)] for s, p, f in zip(shifts, plane, full))
    _write_csv(path, ["shift", "plane_only", "full_phaseless"], rows)
