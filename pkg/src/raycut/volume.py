"""Volumetric image I/O (NRRD subset) and continuous-space sampling.

The NRRD support is deliberately a subset: 3D scalar volumes, attached
headers, raw or gzip encodings, axis-aligned geometry. Anything else is
rejected with a specific error rather than guessed at.
"""

from __future__ import annotations

import gzip
import zlib
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import (
    MalformedHeader,
    NonAxisAlignedDirections,
    NonFiniteData,
    SizeMismatch,
    UnsupportedDimension,
    UnsupportedEncoding,
    UnsupportedType,
)

# NRRD type aliases -> canonical scalar kind
_TYPE_MAP = {
    "uchar": "uint8",
    "unsigned char": "uint8",
    "uint8": "uint8",
    "uint8_t": "uint8",
    "short": "int16",
    "short int": "int16",
    "signed short": "int16",
    "signed short int": "int16",
    "int16": "int16",
    "int16_t": "int16",
    "ushort": "uint16",
    "unsigned short": "uint16",
    "unsigned short int": "uint16",
    "uint16": "uint16",
    "uint16_t": "uint16",
    "int": "int32",
    "signed int": "int32",
    "int32": "int32",
    "int32_t": "int32",
    "float": "float32",
    "double": "float64",
}

_DTYPES = {
    "uint8": np.uint8,
    "int16": np.int16,
    "uint16": np.uint16,
    "int32": np.int32,
    "float32": np.float32,
    "float64": np.float64,
}


def _as_triple(values, kind=float) -> tuple:
    return tuple(kind(v) for v in values)


@dataclass(frozen=True)
class Volume:
    """Scalar 3D image on an axis-aligned lattice.

    data has shape (nx, ny, nz), float64, and is marked read-only: a loaded
    volume is immutable and safe to share across threads.
    """

    dims: tuple
    spacing: tuple
    origin: tuple
    data: np.ndarray
    scalar_kind: str = "float64"

    def __post_init__(self):
        dims = _as_triple(self.dims, int)
        spacing = _as_triple(self.spacing)
        origin = _as_triple(self.origin)
        if len(dims) != 3 or any(n < 1 for n in dims):
            raise ValueError(f"dims must be three counts >= 1, got {self.dims}")
        if any(s <= 0 for s in spacing):
            raise ValueError(f"spacing must be positive, got {self.spacing}")
        data = np.asarray(self.data, dtype=np.float64)
        if data.shape != dims:
            if data.size != dims[0] * dims[1] * dims[2]:
                raise ValueError(f"data size {data.size} != dims product {dims}")
            data = data.reshape(dims)
        if not np.isfinite(data).all():
            raise NonFiniteData("volume contains NaN or infinite intensities")
        data = np.ascontiguousarray(data)
        data.setflags(write=False)
        object.__setattr__(self, "dims", dims)
        object.__setattr__(self, "spacing", spacing)
        object.__setattr__(self, "origin", origin)
        object.__setattr__(self, "data", data)


@dataclass(frozen=True)
class MaskVolume:
    """Binary mask on the same lattice as the volume it was derived from."""

    dims: tuple
    spacing: tuple
    origin: tuple
    data: np.ndarray = field(repr=False)

    def __post_init__(self):
        dims = _as_triple(self.dims, int)
        spacing = _as_triple(self.spacing)
        origin = _as_triple(self.origin)
        data = np.asarray(self.data)
        if data.shape != dims:
            data = data.reshape(dims)
        if data.dtype != np.uint8:
            data = data.astype(np.uint8)
        bad = (data > 1).any()
        if bad:
            raise ValueError("mask values must be 0 or 1")
        data = np.ascontiguousarray(data)
        data.setflags(write=False)
        object.__setattr__(self, "dims", dims)
        object.__setattr__(self, "spacing", spacing)
        object.__setattr__(self, "origin", origin)
        object.__setattr__(self, "data", data)

    def voxel_count(self) -> int:
        return int(self.data.sum(dtype=np.int64))


# ---------------------------------------------------------------------------
# NRRD subset reader/writer


def _parse_vector(text: str, what: str) -> tuple:
    text = text.strip()
    if not (text.startswith("(") and text.endswith(")")):
        raise MalformedHeader(f"{what}: expected '(a,b,c)', got {text!r}")
    try:
        return tuple(float(v) for v in text[1:-1].split(","))
    except ValueError as exc:
        raise MalformedHeader(f"{what}: {exc}") from None


def _parse_header(blob: bytes, path) -> tuple[dict, int]:
    """Split the attached header from the payload. Returns (fields, payload offset)."""
    end = blob.find(b"\n\n")
    end_crlf = blob.find(b"\r\n\r\n")
    if end_crlf != -1 and (end == -1 or end_crlf < end):
        end, sep = end_crlf, 4
    elif end != -1:
        sep = 2
    else:
        raise MalformedHeader(f"{path}: no blank line terminating the header")
    try:
        header = blob[:end].decode("ascii")
    except UnicodeDecodeError as exc:
        raise MalformedHeader(f"{path}: header is not ASCII ({exc})") from None

    lines = header.splitlines()
    if not lines or not lines[0].startswith("NRRD000"):
        raise MalformedHeader(f"{path}: missing NRRD magic")
    if len(lines[0]) != 8 or lines[0][7] not in "12345":
        raise MalformedHeader(f"{path}: unsupported NRRD version {lines[0]!r}")

    fields: dict[str, str] = {}
    for line in lines[1:]:
        if not line.strip() or line.startswith("#"):
            continue
        if ":=" in line:
            # key/value metadata; carries no geometry, ignored
            continue
        if ":" not in line:
            raise MalformedHeader(f"{path}: not a 'field: value' line: {line!r}")
        name, value = line.split(":", 1)
        name = " ".join(name.lower().split())
        if name in fields:
            raise MalformedHeader(f"{path}: duplicate field {name!r}")
        fields[name] = value.strip()
    return fields, end + sep


def _spacing_from_directions(raw: str, path) -> tuple:
    rows = []
    for chunk in raw.replace(") (", ")|(").replace(")(", ")|(").split("|"):
        chunk = chunk.strip()
        if chunk == "none":
            raise MalformedHeader(f"{path}: non-spatial axis in a 3D scalar volume")
        rows.append(_parse_vector(chunk, "space directions"))
    if len(rows) != 3 or any(len(r) != 3 for r in rows):
        raise MalformedHeader(f"{path}: space directions must be three 3-vectors")
    spacing = []
    for i, row in enumerate(rows):
        norm = float(np.linalg.norm(row))
        if norm == 0.0:
            raise MalformedHeader(f"{path}: zero-length space direction {i}")
        for j in range(3):
            if j != i and abs(row[j]) > 1e-6 * norm:
                raise NonAxisAlignedDirections(
                    f"{path}: space directions carry rotation (axis {i}: {row});"
                    " resampling is not supported"
                )
        if row[i] <= 0:
            raise NonAxisAlignedDirections(
                f"{path}: axis {i} is flipped (direction {row}); reorientation is not supported"
            )
        spacing.append(row[i])
    return tuple(spacing)


def read_nrrd(path) -> Volume:
    """Read a 3D scalar NRRD file (attached header, raw or gzip encoding)."""
    path = Path(path)
    blob = path.read_bytes()
    fields, offset = _parse_header(blob, path)

    if "data file" in fields or "datafile" in fields:
        raise MalformedHeader(f"{path}: detached headers ('data file:') are not supported")

    try:
        dimension = int(fields["dimension"])
    except KeyError:
        raise MalformedHeader(f"{path}: missing 'dimension' field") from None
    except ValueError:
        raise MalformedHeader(f"{path}: bad dimension {fields['dimension']!r}") from None
    if dimension != 3:
        raise UnsupportedDimension(f"{path}: dimension {dimension}, only 3 supported")

    for required in ("sizes", "type", "encoding"):
        if required not in fields:
            raise MalformedHeader(f"{path}: missing '{required}' field")

    try:
        dims = _as_triple(fields["sizes"].split(), int)
    except ValueError:
        raise MalformedHeader(f"{path}: bad sizes {fields['sizes']!r}") from None
    if len(dims) != 3 or any(n < 1 for n in dims):
        raise MalformedHeader(f"{path}: sizes must be three counts >= 1, got {dims}")

    kind = _TYPE_MAP.get(" ".join(fields["type"].split()))
    if kind is None:
        raise UnsupportedType(f"{path}: type {fields['type']!r} not supported")

    encoding = fields["encoding"].lower()
    if encoding not in ("raw", "gz", "gzip"):
        raise UnsupportedEncoding(f"{path}: encoding {fields['encoding']!r} not supported")

    if "spacings" in fields:
        try:
            spacing = _as_triple(fields["spacings"].split())
        except ValueError:
            raise MalformedHeader(f"{path}: bad spacings {fields['spacings']!r}") from None
        if len(spacing) != 3 or any(not np.isfinite(s) or s <= 0 for s in spacing):
            raise MalformedHeader(f"{path}: spacings must be three positive numbers")
    elif "space directions" in fields:
        spacing = _spacing_from_directions(fields["space directions"], path)
    else:
        raise MalformedHeader(f"{path}: no 'spacings' or 'space directions' to derive spacing")

    origin = (0.0, 0.0, 0.0)
    if "space origin" in fields:
        origin = _parse_vector(fields["space origin"], "space origin")
        if len(origin) != 3:
            raise MalformedHeader(f"{path}: space origin must be a 3-vector")

    endian = fields.get("endian", "little").lower()
    if endian not in ("little", "big"):
        raise MalformedHeader(f"{path}: bad endian {fields['endian']!r}")

    payload = blob[offset:]
    if encoding in ("gz", "gzip"):
        try:
            payload = gzip.decompress(payload)
        except (OSError, EOFError, zlib.error) as exc:
            raise SizeMismatch(f"{path}: gzip payload does not decode ({exc})") from None

    dtype = np.dtype(_DTYPES[kind]).newbyteorder("<" if endian == "little" else ">")
    expected = dims[0] * dims[1] * dims[2] * dtype.itemsize
    if len(payload) != expected:
        raise SizeMismatch(f"{path}: payload {len(payload)} bytes, expected {expected}")

    flat = np.frombuffer(payload, dtype=dtype)
    # file order is x-fastest: reshape as (nz, ny, nx) then put axes as (x, y, z)
    data = flat.reshape(dims[2], dims[1], dims[0]).transpose(2, 1, 0)
    data = np.ascontiguousarray(data, dtype=np.float64)
    if not np.isfinite(data).all():
        raise NonFiniteData(f"{path}: payload contains NaN or infinite values")
    return Volume(dims=dims, spacing=spacing, origin=origin, data=data, scalar_kind=kind)


def _format_number(v: float) -> str:
    return f"{float(v):.17g}"


def write_nrrd(
    vol,
    path,
    scalar_kind: str | None = None,
    encoding: str = "gzip",
) -> None:
    """Write a Volume or MaskVolume in the supported NRRD subset.

    gzip payloads are written with mtime 0 so identical inputs produce
    byte-identical files.
    """
    if scalar_kind is None:
        scalar_kind = getattr(vol, "scalar_kind", None) or "float32"
    if scalar_kind not in _DTYPES:
        raise UnsupportedType(f"cannot write scalar kind {scalar_kind!r}")
    if encoding not in ("raw", "gzip"):
        raise UnsupportedEncoding(f"cannot write encoding {encoding!r}")

    nrrd_type = {"uint8": "uchar", "int16": "short", "uint16": "ushort",
                 "int32": "int", "float32": "float", "float64": "double"}[scalar_kind]
    header = [
        "NRRD0005",
        f"type: {nrrd_type}",
        "dimension: 3",
        "sizes: {} {} {}".format(*vol.dims),
        "spacings: {} {} {}".format(*(_format_number(s) for s in vol.spacing)),
        "space origin: ({},{},{})".format(*(_format_number(o) for o in vol.origin)),
        "endian: little",
        f"encoding: {encoding}",
        "",
        "",
    ]
    dtype = np.dtype(_DTYPES[scalar_kind]).newbyteorder("<")
    arr = np.asarray(vol.data).astype(dtype, copy=False)
    payload = arr.transpose(2, 1, 0).tobytes()  # x-fastest on disk
    if encoding == "gzip":
        payload = gzip.compress(payload, 9, mtime=0)
    Path(path).write_bytes("\n".join(header).encode("ascii") + payload)


def write_nrrd_mask(mask: MaskVolume, path) -> None:
    """Write a binary mask as 'type: uchar, encoding: gzip'."""
    write_nrrd(mask, path, scalar_kind="uint8", encoding="gzip")


def volume_to_mask(vol: Volume) -> MaskVolume:
    """Binarize a loaded volume (values > 0.5 count as foreground)."""
    return MaskVolume(
        dims=vol.dims,
        spacing=vol.spacing,
        origin=vol.origin,
        data=(vol.data > 0.5).astype(np.uint8),
    )


# ---------------------------------------------------------------------------
# Geometry and sampling


def index_to_world(vol, ijk) -> np.ndarray:
    """Center of voxel (i,j,k) in world mm: origin + index * spacing."""
    return np.asarray(vol.origin, dtype=np.float64) + np.asarray(ijk, dtype=np.float64) * np.asarray(
        vol.spacing, dtype=np.float64
    )


def world_to_index(vol, p) -> np.ndarray:
    """Continuous voxel index of world point p (inverse of index_to_world)."""
    return (np.asarray(p, dtype=np.float64) - np.asarray(vol.origin, dtype=np.float64)) / np.asarray(
        vol.spacing, dtype=np.float64
    )


def voxel_volume_mm3(vol) -> float:
    sx, sy, sz = vol.spacing
    return float(sx * sy * sz)


def sample_trilinear_many(vol: Volume, pts: np.ndarray) -> np.ndarray:
    """Trilinear interpolation at world points pts (N,3), clamped to the lattice hull."""
    idx = world_to_index(vol, pts)
    nx, ny, nz = vol.dims
    hi = np.array([nx - 1, ny - 1, nz - 1], dtype=np.float64)
    idx = np.clip(idx, 0.0, hi)
    lo = np.floor(idx).astype(np.int64)
    # keep the upper corner in range for 1-wide axes and points on the far face
    lo = np.minimum(lo, np.maximum(np.array([nx, ny, nz], dtype=np.int64) - 2, 0))
    frac = idx - lo
    x0, y0, z0 = lo[..., 0], lo[..., 1], lo[..., 2]
    x1 = np.minimum(x0 + 1, nx - 1)
    y1 = np.minimum(y0 + 1, ny - 1)
    z1 = np.minimum(z0 + 1, nz - 1)
    fx, fy, fz = frac[..., 0], frac[..., 1], frac[..., 2]
    d = vol.data
    c000 = d[x0, y0, z0]
    c100 = d[x1, y0, z0]
    c010 = d[x0, y1, z0]
    c110 = d[x1, y1, z0]
    c001 = d[x0, y0, z1]
    c101 = d[x1, y0, z1]
    c011 = d[x0, y1, z1]
    c111 = d[x1, y1, z1]
    c00 = c000 * (1 - fx) + c100 * fx
    c10 = c010 * (1 - fx) + c110 * fx
    c01 = c001 * (1 - fx) + c101 * fx
    c11 = c011 * (1 - fx) + c111 * fx
    c0 = c00 * (1 - fy) + c10 * fy
    c1 = c01 * (1 - fy) + c11 * fy
    return c0 * (1 - fz) + c1 * fz


def sample_trilinear(vol: Volume, p) -> float:
    """Trilinear interpolation at a single world point (clamp-to-border outside)."""
    return float(sample_trilinear_many(vol, np.asarray(p, dtype=np.float64).reshape(1, 3))[0])
