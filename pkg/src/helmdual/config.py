"""Run configuration (flat key = value text) and the HLMF binary field format.

The config format is deliberately flat and diff-friendly: one `key = value`
per line, `#` comments, dotted key names, unknown keys rejected with the
offending line.  `serialize_config` emits every effective value so a run's
provenance round-trips exactly.

Field files: 24-byte little-endian header (magic "HLMF", u32 version,
u32 dimension, u32 points per axis, f64 box length) followed by the
row-major float64 payload; write/read is bit-exact.
"""

import struct
from dataclasses import dataclass, fields as dataclass_fields

import numpy as np

from .errors import (
    BadMagicError,
    ConfigError,
    ConfigTypeError,
    FieldFileError,
    MissingRequiredError,
    TruncatedPayloadError,
    UnknownKeyError,
    VersionMismatchError,
)
from .kernel import Field, GridSpec

MAGIC = b"HLMF"
VERSION = 1
_HEADER = struct.Struct("<4sIIId")

MODES = ("solve", "compare", "farfield", "selftest")
COEFFICIENT_KINDS = ("constant", "sine_product", "compact_bump", "file")


@dataclass
class RunConfig:
    mode: str
    grid_dimension: int = 2
    grid_box_length: float = 6.0
    grid_points_per_axis: int = 96
    grid_shell_epsilon: float = 0.0
    exponents_p: float = 7.0
    coefficient_kind: str = "sine_product"
    coefficient_value: float = 1.0
    coefficient_offset: float = 1.0
    coefficient_amplitude: float = 0.5
    coefficient_center: tuple = ()
    coefficient_radius: float = 1.6
    coefficient_path: str = ""
    coefficient_periodic: bool = True
    descent_tol_residual: float = 1e-8
    descent_max_iters: int = 2000
    descent_armijo_c: float = 1e-4
    descent_armijo_shrink: float = 0.5
    descent_step_init: float = 1.0
    descent_dedup_rel_threshold: float = 1e-2
    descent_multistart_count: int = 20
    descent_divergence_floor: float = -1e9
    descent_anderson_depth: int = 6
    bump_center: tuple = ()
    bump_radius: float = 1.2
    bump_amplitude: float = 0.3
    farfield_direction_count: int = 200
    farfield_shell_count: int = 8
    farfield_fit_degree: int = 6
    farfield_r_min: float = 0.0
    farfield_r_max: float = 0.0
    seed: int = 0
    output_dir: str = "out"


def _key_of(field_name: str) -> str:
    head, _, tail = field_name.partition("_")
    return f"{head}.{tail}" if tail and head in (
        "grid", "exponents", "coefficient", "descent", "bump", "farfield", "output"
    ) else field_name


_SCHEMA = {_key_of(f.name): f for f in dataclass_fields(RunConfig)}


def _parse_value(raw: str, py_type, key: str, line_no: int):
    raw = raw.strip()
    try:
        if py_type is int:
            return int(raw)
        if py_type is float:
            return float(raw)
        if py_type is bool:
            low = raw.lower()
            if low in ("true", "yes", "1", "on"):
                return True
            if low in ("false", "no", "0", "off"):
                return False
            raise ValueError(raw)
        if py_type is tuple:
            if not raw:
                return ()
            return tuple(float(part) for part in raw.split(","))
        return raw
    except ValueError as exc:
        raise ConfigTypeError(
            f"line {line_no}: value {raw!r} for key {key!r} is not a valid {py_type.__name__}"
        ) from exc


def parse_config(text: str, mode_override: str | None = None) -> RunConfig:
    """Parse flat `key = value` lines into a validated RunConfig."""
    values = {}
    for line_no, line in enumerate(text.splitlines(), start=1):
        stripped = line.split("#", 1)[0].strip()
        if not stripped:
            continue
        if "=" not in stripped:
            raise ConfigTypeError(f"line {line_no}: expected 'key = value', got {stripped!r}")
        key, _, raw = stripped.partition("=")
        key = key.strip()
        if key not in _SCHEMA:
            raise UnknownKeyError(f"line {line_no}: unknown key {key!r}")
        entry = _SCHEMA[key]
        declared = entry.type if isinstance(entry.type, type) else type(entry.default)
        values[entry.name] = _parse_value(raw, declared, key, line_no)

    if mode_override is not None:
        values["mode"] = mode_override
    if "mode" not in values:
        raise MissingRequiredError("required key 'mode' missing")
    cfg = RunConfig(**values)
    _validate(cfg)
    return cfg


def _validate(cfg: RunConfig):
    if cfg.mode not in MODES:
        raise ConfigTypeError(f"mode must be one of {MODES}, got {cfg.mode!r}")
    if cfg.coefficient_kind not in COEFFICIENT_KINDS:
        raise ConfigTypeError(
            f"coefficient.kind must be one of {COEFFICIENT_KINDS}, got {cfg.coefficient_kind!r}"
        )
    if cfg.coefficient_kind == "file" and not cfg.coefficient_path:
        raise MissingRequiredError("coefficient.path required when coefficient.kind = file")


def serialize_config(cfg: RunConfig) -> str:
    """Emit every effective value; parse(serialize(cfg)) == cfg."""
    lines = []
    for f in dataclass_fields(RunConfig):
        value = getattr(cfg, f.name)
        if isinstance(value, tuple):
            rendered = ", ".join(repr(x) for x in value)
        elif isinstance(value, bool):
            rendered = "true" if value else "false"
        elif isinstance(value, float):
            rendered = repr(value)
        else:
            rendered = str(value)
        lines.append(f"{_key_of(f.name)} = {rendered}")
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# binary field files
# ---------------------------------------------------------------------------


def write_field(field: Field) -> bytes:
    grid = field.grid
    header = _HEADER.pack(
        MAGIC, VERSION, grid.dimension, grid.points_per_axis, grid.box_length
    )
    return header + np.ascontiguousarray(field.values, dtype="<f8").tobytes()


def read_field(data: bytes, shell_epsilon: float = 0.0) -> Field:
    """Reconstruct a Field; the header does not carry the absorption
    parameter, so pass shell_epsilon when reading onto a regularized grid."""
    if len(data) < _HEADER.size:
        raise TruncatedPayloadError(f"file shorter than the {_HEADER.size}-byte header")
    magic, version, dimension, n, box_length = _HEADER.unpack_from(data)
    if magic != MAGIC:
        raise BadMagicError(f"bad magic {magic!r}")
    if version != VERSION:
        raise VersionMismatchError(f"unsupported version {version}")
    if dimension not in (2, 3):
        raise FieldFileError(f"unsupported dimension {dimension}")
    expected = (n ** dimension) * 8
    payload = data[_HEADER.size:]
    if len(payload) < expected:
        raise TruncatedPayloadError(
            f"payload holds {len(payload) // 8} values, header promises {n ** dimension}"
        )
    if len(payload) > expected:
        raise FieldFileError(f"{len(payload) - expected} trailing bytes after payload")
    grid = GridSpec(
        dimension=dimension,
        box_length=box_length,
        points_per_axis=n,
        shell_epsilon=shell_epsilon,
    )
    values = np.frombuffer(payload, dtype="<f8").astype(np.float64).reshape(grid.shape)
    return Field(grid, values)
