"""Build the directed s-t flow network from ray samples.

Node convention: id(r, z) = r*Z + z, source = R*Z, sink = R*Z + 1.
Arc list order is deterministic: intra-ray arcs, then smoothness arcs,
then terminal arcs, then the base-forcing arcs, each block in
(ray ascending, neighbor ascending, z ascending) order.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import SeedOutsideVolume
from .template import RayGrid, SphereTemplate
from .volume import Volume

CAP_SCALE = 1 << 20  # float weight -> 64-bit integer capacity multiplier


@dataclass(frozen=True)
class CostGrid:
    """Per-node boundary costs: c[r][z] >= 0, plus the reference mean they came from."""

    mu: float
    c: np.ndarray  # (R, Z) float64

    def __post_init__(self):
        c = np.ascontiguousarray(np.asarray(self.c, dtype=np.float64))
        if c.ndim != 2:
            raise ValueError(f"cost grid must be R x Z, got shape {c.shape}")
        if not np.isfinite(c).all():
            raise ValueError("cost grid contains non-finite values")
        if (c < 0).any():
            raise ValueError("cost grid contains negative values")
        c.setflags(write=False)
        object.__setattr__(self, "c", c)
        object.__setattr__(self, "mu", float(self.mu))


@dataclass(frozen=True)
class SegGraph:
    """Flow network as parallel arc arrays with 64-bit integer capacities."""

    num_nodes: int
    source: int
    sink: int
    tails: np.ndarray  # (M,) int64
    heads: np.ndarray  # (M,) int64
    caps: np.ndarray  # (M,) int64
    inf_cap: int  # finite stand-in for infinity (0 when the graph has no such arcs)
    rays: int = 0  # R (0 for generic graphs)
    samples: int = 0  # Z
    scale: int = 1  # multiplier that turned float weights into integer capacities

    def __post_init__(self):
        for name in ("tails", "heads", "caps"):
            arr = np.ascontiguousarray(np.asarray(getattr(self, name), dtype=np.int64))
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)
        if not (len(self.tails) == len(self.heads) == len(self.caps)):
            raise ValueError("arc arrays must have equal length")
        if (self.caps < 0).any():
            raise ValueError("negative capacity")

    @property
    def arc_count(self) -> int:
        return len(self.tails)

    @classmethod
    def from_arcs(cls, num_nodes: int, source: int, sink: int, arcs) -> "SegGraph":
        """Build a generic graph from an iterable of (tail, head, capacity)."""
        arcs = list(arcs)
        tails = np.array([a[0] for a in arcs], dtype=np.int64)
        heads = np.array([a[1] for a in arcs], dtype=np.int64)
        caps = np.array([a[2] for a in arcs], dtype=np.int64)
        return cls(
            num_nodes=num_nodes,
            source=source,
            sink=sink,
            tails=tails,
            heads=heads,
            caps=caps,
            inf_cap=0,
        )


def estimate_mean(vol: Volume, seed, window: int = 3) -> float:
    """Mean intensity of the window^3 voxel neighborhood around a seed index,
    clipped to the volume bounds."""
    if window < 1 or window % 2 == 0:
        raise ValueError(f"window must be odd and >= 1, got {window}")
    seed = np.asarray(seed)
    if seed.shape != (3,):
        raise ValueError("seed must be a voxel index triple")
    i, j, k = (int(v) for v in seed)
    nx, ny, nz = vol.dims
    if not (0 <= i < nx and 0 <= j < ny and 0 <= k < nz):
        raise SeedOutsideVolume(f"seed outside volume: index ({i},{j},{k}) not in dims {vol.dims}")
    h = window // 2
    block = vol.data[
        max(i - h, 0) : min(i + h + 1, nx),
        max(j - h, 0) : min(j + h + 1, ny),
        max(k - h, 0) : min(k + h + 1, nz),
    ]
    return float(block.mean())


def compute_costs(rays: RayGrid, mu: float) -> CostGrid:
    """c[r][z] = |I(p_{r,z}) - mu|."""
    return CostGrid(mu=float(mu), c=np.abs(rays.intensities - float(mu)))


def terminal_weights(costs: CostGrid) -> np.ndarray:
    """Terminal weights w: c itself at z=0, first difference of c for z>0.

    The prefix sum of w along a ray telescopes to the boundary's cost:
    sum_{z<=b} w(r,z) = c[r][b].
    """
    c = costs.c
    w = np.empty_like(c)
    w[:, 0] = c[:, 0]
    w[:, 1:] = c[:, 1:] - c[:, :-1]
    return w


def otsu_threshold(values: np.ndarray, bins: int = 512) -> float:
    """Histogram threshold maximizing between-class variance (first maximum wins)."""
    values = np.asarray(values, dtype=np.float64).ravel()
    vmin = float(values.min())
    vmax = float(values.max())
    if vmax <= vmin:
        return vmax
    hist, edges = np.histogram(values, bins=bins, range=(vmin, vmax))
    p = hist.astype(np.float64) / hist.sum()
    centers = (edges[:-1] + edges[1:]) / 2.0
    w0 = np.cumsum(p)
    w1 = 1.0 - w0
    m = np.cumsum(p * centers)
    m_total = m[-1]
    with np.errstate(divide="ignore", invalid="ignore"):
        mu0 = m / w0
        mu1 = (m_total - m) / w1
        between = w0 * w1 * (mu0 - mu1) ** 2
    between[~np.isfinite(between)] = -1.0
    k = int(np.argmax(between))
    return float(edges[k + 1])


def condition_costs(costs: CostGrid) -> CostGrid:
    """Make the cut pick the outermost seed-like surface.

    Raw costs score every sample that resembles the seed neighborhood near
    zero, so the minimum-cost boundary is free to sit anywhere inside a
    homogeneous structure (noise decides). Two monotone adjustments anchor
    it at the intensity transition without touching the graph semantics:

    - flatten: costs at or below an automatic threshold (Otsu over the cost
      values) collapse to exactly zero, so interior texture/noise stops
      steering the cut;
    - outward preference: a small per-sample bonus for larger radii makes
      the outermost zero-cost surface the unique optimum instead of a tie.
    """
    c = costs.c
    samples = c.shape[1]
    threshold = otsu_threshold(c)
    eps = 1e-3 * max(threshold, 1.0)
    tilt = eps * (samples - 1 - np.arange(samples, dtype=np.float64))
    return CostGrid(mu=costs.mu, c=np.maximum(c - threshold, 0.0) + tilt[None, :])


def build_graph(costs: CostGrid, tmpl: SphereTemplate, delta_r: int) -> SegGraph:
    """Assemble the s-t network: A_z, A_r, terminal arcs, base forcing."""
    if delta_r < 0:
        raise ValueError(f"delta_r must be >= 0, got {delta_r}")
    c = costs.c
    rays, samples = c.shape
    if rays != tmpl.ray_count:
        raise ValueError(f"cost grid has {rays} rays, template {tmpl.ray_count}")
    n_nodes = rays * samples + 2
    source = rays * samples
    sink = source + 1

    w = terminal_weights(costs)
    term_caps = np.rint(np.abs(w) * CAP_SCALE).astype(np.int64).ravel()
    inf_cap = int(term_caps.sum()) + 1
    if inf_cap >= (1 << 62):
        raise ValueError("terminal weights too large to scale into 64-bit capacities")

    # (a) intra-ray arcs: (r,z) -> (r,z-1), z in 1..Z-1
    az_tails = (np.arange(rays, dtype=np.int64)[:, None] * samples + np.arange(1, samples, dtype=np.int64)[None, :]).ravel()
    az_heads = az_tails - 1

    # (b) smoothness arcs: (r,z) -> (n, max(0, z-delta_r)), neighbor order sorted
    offsets, flat = tmpl.neighbor_csr()
    counts = np.diff(offsets)
    pair_r = np.repeat(np.arange(rays, dtype=np.int64), counts)
    z_range = np.arange(samples, dtype=np.int64)
    z_down = np.maximum(z_range - delta_r, 0)
    ar_tails = (pair_r[:, None] * samples + z_range[None, :]).ravel()
    ar_heads = (flat[:, None] * samples + z_down[None, :]).ravel()

    # (c) terminal arcs, node-ascending; zero capacities are materialized
    node_ids = np.arange(rays * samples, dtype=np.int64)
    negative = (w.ravel() < 0)
    t_tails = np.where(negative, source, node_ids)
    t_heads = np.where(negative, node_ids, sink)

    # (d) base forcing: s -> (r, 0)
    base_heads = np.arange(rays, dtype=np.int64) * samples

    m_inf = len(az_tails) + len(ar_tails)
    tails = np.concatenate([az_tails, ar_tails, t_tails, np.full(rays, source, dtype=np.int64)])
    heads = np.concatenate([az_heads, ar_heads, t_heads, base_heads])
    caps = np.concatenate(
        [np.full(m_inf, inf_cap, dtype=np.int64), term_caps, np.full(rays, inf_cap, dtype=np.int64)]
    )
    return SegGraph(
        num_nodes=n_nodes,
        source=source,
        sink=sink,
        tails=tails,
        heads=heads,
        caps=caps,
        inf_cap=inf_cap,
        rays=rays,
        samples=samples,
        scale=CAP_SCALE,
    )


def dump_dimacs(g: SegGraph) -> str:
    """Render the graph in DIMACS max-flow text form (1-based node ids)."""
    lines = [f"p max {g.num_nodes} {g.arc_count}", f"n {g.source + 1} s", f"n {g.sink + 1} t"]
    for u, v, cap in zip(g.tails, g.heads, g.caps):
        lines.append(f"a {u + 1} {v + 1} {cap}")
    return "\n".join(lines) + "\n"
