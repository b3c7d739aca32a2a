"""2D views of volumes: windowed PNG slices and mask boundary contours.

Pixel convention shared with the UI: column = x pixel, row = y pixel,
integer coordinates at pixel centers. Slice orientations:
axis z -> rows are volume y, cols are volume x;
axis y -> rows are volume z, cols are volume x;
axis x -> rows are volume z, cols are volume y.
"""

from __future__ import annotations

import io
from typing import List

import numpy as np
from PIL import Image

AXES = ("x", "y", "z")

# Edge midpoints of a marching-squares cell, relative to the cell's
# top-left pixel center: top, bottom, left, right.
_T, _B, _L, _R = 0, 1, 2, 3
_EDGE_XY = {_T: (0.5, 0.0), _B: (0.5, 1.0), _L: (0.0, 0.5), _R: (1.0, 0.5)}

# case index = tl*8 + tr*4 + br*2 + bl*1 -> directed segments (inside on the
# right of travel); saddle cases 5/10 keep the two inside corners separate.
_SEGMENTS = {
    1: [(_L, _B)],
    2: [(_B, _R)],
    3: [(_L, _R)],
    4: [(_R, _T)],
    5: [(_L, _B), (_R, _T)],
    6: [(_B, _T)],
    7: [(_L, _T)],
    8: [(_T, _L)],
    9: [(_T, _B)],
    10: [(_T, _L), (_B, _R)],
    11: [(_T, _R)],
    12: [(_R, _L)],
    13: [(_R, _B)],
    14: [(_B, _L)],
}


def axis_size(dims, axis: str) -> int:
    nx, ny, nz = dims
    return {"x": nx, "y": ny, "z": nz}[axis]


def slice_view(data: np.ndarray, axis: str, index: int) -> np.ndarray:
    """Extract one slice in display orientation (rows x cols)."""
    if axis == "z":
        return data[:, :, index].T
    if axis == "y":
        return data[:, index, :].T
    if axis == "x":
        return data[index, :, :].T
    raise ValueError(f"axis must be one of {AXES}, got {axis!r}")


def window_png(slice2d: np.ndarray, lo: float, hi: float) -> bytes:
    """Linear window: lo -> 0, hi -> 255, clamped; encoded as grayscale PNG."""
    if not (hi > lo):
        raise ValueError(f"degenerate window ({lo}, {hi})")
    scaled = np.clip((slice2d.astype(np.float64) - lo) * (255.0 / (hi - lo)), 0.0, 255.0)
    img = Image.fromarray(np.ascontiguousarray(scaled).astype(np.uint8), mode="L")
    buf = io.BytesIO()
    img.save(buf, format="PNG")
    return buf.getvalue()


def mask_contours(mask2d: np.ndarray) -> List[List[List[float]]]:
    """Closed boundary polylines of a binary slice, marching-squares style.

    Points are edge midpoints in pixel coordinates [x, y]; each loop is
    implicitly closed (last point connects back to the first).
    """
    padded = np.pad(np.asarray(mask2d, dtype=np.uint8), 1)
    tl = padded[:-1, :-1]
    tr = padded[:-1, 1:]
    bl = padded[1:, :-1]
    br = padded[1:, 1:]
    case = tl * 8 + tr * 4 + br * 2 + bl * 1

    # Directed segments keyed by quantized start point (doubled coords stay
    # integral, so dictionary lookups are exact).
    seg_from: dict = {}
    cells = np.argwhere((case > 0) & (case < 15))
    for ci, cj in cells:
        # cell top-left pixel center in original coordinates
        base_x = float(cj) - 1.0
        base_y = float(ci) - 1.0
        for e0, e1 in _SEGMENTS[int(case[ci, cj])]:
            dx0, dy0 = _EDGE_XY[e0]
            dx1, dy1 = _EDGE_XY[e1]
            p0 = (base_x + dx0, base_y + dy0)
            p1 = (base_x + dx1, base_y + dy1)
            seg_from[(int(round(2 * p0[0])), int(round(2 * p0[1])))] = (p0, p1)

    loops: List[List[List[float]]] = []
    visited = set()
    for key in sorted(seg_from):
        if key in visited:
            continue
        loop: List[List[float]] = []
        k = key
        while k not in visited and k in seg_from:
            visited.add(k)
            p0, p1 = seg_from[k]
            loop.append([p0[0], p0[1]])
            k = (int(round(2 * p1[0])), int(round(2 * p1[1])))
        loops.append(loop)
    return loops
