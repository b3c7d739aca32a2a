"""Synthetic test volumes with analytic ground-truth masks."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence, Tuple

import numpy as np

from .volume import MaskVolume, Volume

PHANTOM_KINDS = ("sphere", "ellipsoid", "shifted")

_DIMS = (80, 80, 80)
_SPACING = (1.0, 1.0, 1.0)
_SHIFT = (7, -5, 4)  # voxel offset of the "shifted" sphere from the volume center


@dataclass(frozen=True)
class PhantomCase:
    """A synthetic volume, its analytic truth mask, and a seed at its center."""

    volume: Volume
    truth: MaskVolume
    seed_index: Tuple[int, int, int]


def _center_grids(dims, spacing, center_index):
    ax = [(np.arange(dims[i]) - center_index[i]) * spacing[i] for i in range(3)]
    return np.meshgrid(*ax, indexing="ij")


def _assemble(
    inside_mask: np.ndarray,
    dims,
    spacing,
    inside: float,
    outside: float,
    sigma: float,
    rng_seed: int,
    seed_index,
) -> PhantomCase:
    data = np.where(inside_mask, float(inside), float(outside))
    if sigma > 0:
        rng = np.random.default_rng(rng_seed)
        data = data + rng.normal(0.0, float(sigma), size=dims)
    vol = Volume(
        dims=tuple(dims),
        spacing=tuple(float(s) for s in spacing),
        origin=(0.0, 0.0, 0.0),
        data=data,
        scalar_kind="float32",
    )
    truth = MaskVolume(
        dims=vol.dims,
        spacing=vol.spacing,
        origin=vol.origin,
        data=inside_mask.astype(np.uint8),
    )
    return PhantomCase(volume=vol, truth=truth, seed_index=tuple(int(v) for v in seed_index))


def make_sphere_phantom(
    radius_mm: float = 20.0,
    dims: Sequence[int] = _DIMS,
    spacing: Sequence[float] = _SPACING,
    inside: float = 200.0,
    outside: float = 50.0,
    sigma: float = 0.0,
    rng_seed: int = 0,
    center_index: Optional[Sequence[int]] = None,
) -> PhantomCase:
    """Ball of the given radius around the (possibly offset) volume center."""
    if center_index is None:
        center_index = tuple(d // 2 for d in dims)
    gx, gy, gz = _center_grids(dims, spacing, center_index)
    inside_mask = gx * gx + gy * gy + gz * gz <= float(radius_mm) ** 2
    return _assemble(inside_mask, dims, spacing, inside, outside, sigma, rng_seed, center_index)


def make_ellipsoid_phantom(
    semi_axes_mm: Sequence[float] = (25.0, 20.0, 15.0),
    dims: Sequence[int] = _DIMS,
    spacing: Sequence[float] = _SPACING,
    inside: float = 200.0,
    outside: float = 50.0,
    sigma: float = 0.0,
    rng_seed: int = 0,
) -> PhantomCase:
    """Axis-aligned ellipsoid around the volume center."""
    center_index = tuple(d // 2 for d in dims)
    a, b, c = (float(v) for v in semi_axes_mm)
    gx, gy, gz = _center_grids(dims, spacing, center_index)
    inside_mask = (gx / a) ** 2 + (gy / b) ** 2 + (gz / c) ** 2 <= 1.0
    return _assemble(inside_mask, dims, spacing, inside, outside, sigma, rng_seed, center_index)


def make_shifted_phantom(
    radius_mm: float = 20.0,
    dims: Sequence[int] = _DIMS,
    spacing: Sequence[float] = _SPACING,
    inside: float = 200.0,
    outside: float = 50.0,
    sigma: float = 0.0,
    rng_seed: int = 0,
) -> PhantomCase:
    """Same ball, displaced off-center (seed handling away from the midpoint)."""
    center_index = tuple(d // 2 + o for d, o in zip(dims, _SHIFT))
    return make_sphere_phantom(
        radius_mm=radius_mm,
        dims=dims,
        spacing=spacing,
        inside=inside,
        outside=outside,
        sigma=sigma,
        rng_seed=rng_seed,
        center_index=center_index,
    )


def make_phantom(kind: str, **kwargs) -> PhantomCase:
    """Dispatch by kind name: sphere, ellipsoid, or shifted."""
    if kind == "sphere":
        return make_sphere_phantom(**kwargs)
    if kind == "ellipsoid":
        return make_ellipsoid_phantom(**kwargs)
    if kind == "shifted":
        return make_shifted_phantom(**kwargs)
    raise ValueError(f"unknown phantom kind {kind!r}, expected one of {PHANTOM_KINDS}")
