"""Shared assertions for cut results on ray graphs."""

import numpy as np

from raycut.graph import SegGraph
from raycut.maxflow import CutResult, extract_boundary
from raycut.template import SphereTemplate


def assert_cut_invariants(g: SegGraph, cut: CutResult, tmpl: SphereTemplate, delta_r: int) -> None:
    """Prefix property per ray, neighbor smoothness, and no cut infinite arc."""
    b = extract_boundary(cut.source_side, g.rays, g.samples)  # raises on prefix violation
    assert (b == cut.boundary).all()
    for r in range(tmpl.ray_count):
        for n in tmpl.neighbors[r]:
            assert abs(int(b[r]) - int(b[n])) <= delta_r
    inf_arcs = g.caps == g.inf_cap
    crossing = cut.source_side[g.tails] & ~cut.source_side[g.heads]
    assert not (inf_arcs & crossing).any(), "an infinite-capacity arc crosses the cut"


def cut_cost(c: np.ndarray, boundary: np.ndarray) -> float:
    return float(c[np.arange(c.shape[0]), boundary].sum())
