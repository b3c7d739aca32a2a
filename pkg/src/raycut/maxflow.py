"""Maximum s-t flow / minimum cut on SegGraph instances.

The production solver is an augmenting-path algorithm with two search
trees grown from s and t (Boykov-Kolmogorov style) compiled with numba.
Determinism: FIFO active and orphan queues, adjacency scanned in edge-id
order, first valid parent wins during adoption, and the returned source
side is exactly the set of nodes reachable from s in the final residual
graph (the minimal source set).

reference_max_flow is an independent shortest-augmenting-path solver in
plain Python used as a cross-check oracle; it shares no code with the
production kernel.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from typing import Optional

import numpy as np
from numba import njit

from .errors import MalformedCut, MalformedHeader
from .graph import SegGraph

_FREE = 0
_S_TREE = 1
_T_TREE = 2

# parent_edge sentinels
_ROOT = -1
_ORPHAN = -2
_NO_PARENT = -3


@dataclass(frozen=True)
class CutResult:
    """Outcome of a min-cut solve."""

    flow_value: int
    source_side: np.ndarray  # (num_nodes,) bool
    boundary: Optional[np.ndarray]  # (R,) int64, None for graphs without ray structure
    arc_flow: Optional[np.ndarray] = None  # (M,) int64 flow through each input arc

    def __post_init__(self):
        side = np.ascontiguousarray(np.asarray(self.source_side, dtype=bool))
        side.setflags(write=False)
        object.__setattr__(self, "source_side", side)
        if self.boundary is not None:
            b = np.ascontiguousarray(np.asarray(self.boundary, dtype=np.int64))
            b.setflags(write=False)
            object.__setattr__(self, "boundary", b)
        if self.arc_flow is not None:
            f = np.ascontiguousarray(np.asarray(self.arc_flow, dtype=np.int64))
            f.setflags(write=False)
            object.__setattr__(self, "arc_flow", f)


@njit(cache=True, nogil=True)
def _has_root(v, parent_edge, ehead, ts, now):  # pragma: no cover - jit
    y = v
    ok = False
    while True:
        if ts[y] == now:
            ok = True
            break
        pe = parent_edge[y]
        if pe == _ROOT:
            ok = True
            break
        if pe < _ROOT:
            ok = False
            break
        y = ehead[pe]
    if ok:
        y = v
        while ts[y] != now and parent_edge[y] >= 0:
            ts[y] = now
            y = ehead[parent_edge[y]]
    return ok


@njit(cache=True, nogil=True)
def _bk_kernel(n, s, t, adj_off, adj_lst, ehead, ecap):  # pragma: no cover - jit
    tree = np.zeros(n, dtype=np.int8)
    parent_edge = np.full(n, _NO_PARENT, dtype=np.int64)
    ts = np.zeros(n, dtype=np.int64)
    now = np.int64(0)

    active_q = np.empty(n, dtype=np.int64)
    in_active = np.zeros(n, dtype=np.bool_)
    a_head = 0
    a_count = 0
    orphan_q = np.empty(n, dtype=np.int64)
    o_head = 0
    o_count = 0

    tree[s] = _S_TREE
    tree[t] = _T_TREE
    parent_edge[s] = _ROOT
    parent_edge[t] = _ROOT
    active_q[0] = s
    active_q[1] = t
    in_active[s] = True
    in_active[t] = True
    a_count = 2

    flow = np.int64(0)

    while a_count > 0:
        u = active_q[a_head]
        a_head = (a_head + 1) % n
        a_count -= 1
        in_active[u] = False
        my_tree = tree[u]
        if my_tree == _FREE:
            continue

        for i in range(adj_off[u], adj_off[u + 1]):
            e = adj_lst[i]
            v = ehead[e]
            while True:
                if tree[u] != my_tree:
                    break  # u was freed during adoption; abandon the scan
                if my_tree == _S_TREE:
                    res = ecap[e]
                else:
                    res = ecap[e ^ 1]
                if res <= 0:
                    break
                tv = tree[v]
                if tv == _FREE:
                    tree[v] = my_tree
                    parent_edge[v] = e ^ 1
                    if not in_active[v]:
                        in_active[v] = True
                        active_q[(a_head + a_count) % n] = v
                        a_count += 1
                    break
                if tv == my_tree:
                    break

                # The trees touch: augment along s -> ... -> conn -> ... -> t.
                if my_tree == _S_TREE:
                    conn = e
                    sn = u
                    tn = v
                else:
                    conn = e ^ 1
                    sn = v
                    tn = u

                bott = ecap[conn]
                y = sn
                while parent_edge[y] >= 0:
                    pe = parent_edge[y]
                    r = ecap[pe ^ 1]
                    if r < bott:
                        bott = r
                    y = ehead[pe]
                y = tn
                while parent_edge[y] >= 0:
                    pe = parent_edge[y]
                    r = ecap[pe]
                    if r < bott:
                        bott = r
                    y = ehead[pe]

                flow += bott
                ecap[conn] -= bott
                ecap[conn ^ 1] += bott
                y = sn
                while parent_edge[y] >= 0:
                    pe = parent_edge[y]
                    ecap[pe ^ 1] -= bott
                    ecap[pe] += bott
                    nxt = ehead[pe]
                    if ecap[pe ^ 1] == 0:
                        parent_edge[y] = _ORPHAN
                        orphan_q[(o_head + o_count) % n] = y
                        o_count += 1
                    y = nxt
                y = tn
                while parent_edge[y] >= 0:
                    pe = parent_edge[y]
                    ecap[pe] -= bott
                    ecap[pe ^ 1] += bott
                    nxt = ehead[pe]
                    if ecap[pe] == 0:
                        parent_edge[y] = _ORPHAN
                        orphan_q[(o_head + o_count) % n] = y
                        o_count += 1
                    y = nxt

                # Adoption: every orphan either finds a rooted same-tree
                # parent through a residual edge or drops out of its tree.
                while o_count > 0:
                    x = orphan_q[o_head]
                    o_head = (o_head + 1) % n
                    o_count -= 1
                    tx = tree[x]
                    now += 1
                    found = np.int64(-1)
                    for j in range(adj_off[x], adj_off[x + 1]):
                        e2 = adj_lst[j]
                        v2 = ehead[e2]
                        if tree[v2] != tx:
                            continue
                        if tx == _S_TREE:
                            r2 = ecap[e2 ^ 1]
                        else:
                            r2 = ecap[e2]
                        if r2 <= 0:
                            continue
                        if _has_root(v2, parent_edge, ehead, ts, now):
                            found = e2
                            break
                    if found >= 0:
                        parent_edge[x] = found
                    else:
                        for j in range(adj_off[x], adj_off[x + 1]):
                            e2 = adj_lst[j]
                            v2 = ehead[e2]
                            if tree[v2] != tx:
                                continue
                            if tx == _S_TREE:
                                r2 = ecap[e2 ^ 1]
                            else:
                                r2 = ecap[e2]
                            if r2 > 0 and not in_active[v2]:
                                in_active[v2] = True
                                active_q[(a_head + a_count) % n] = v2
                                a_count += 1
                            if parent_edge[v2] == (e2 ^ 1):
                                parent_edge[v2] = _ORPHAN
                                orphan_q[(o_head + o_count) % n] = v2
                                o_count += 1
                        tree[x] = _FREE
                        parent_edge[x] = _NO_PARENT
    return flow


@njit(cache=True, nogil=True)
def _residual_reach(n, s, adj_off, adj_lst, ehead, ecap):  # pragma: no cover - jit
    seen = np.zeros(n, dtype=np.bool_)
    stack = np.empty(n, dtype=np.int64)
    seen[s] = True
    stack[0] = s
    top = 1
    while top > 0:
        top -= 1
        u = stack[top]
        for i in range(adj_off[u], adj_off[u + 1]):
            e = adj_lst[i]
            if ecap[e] <= 0:
                continue
            v = ehead[e]
            if not seen[v]:
                seen[v] = True
                stack[top] = v
                top += 1
    return seen


def _edge_arrays(g: SegGraph):
    """Interleave each arc with a zero-capacity reverse edge (ids 2k, 2k+1)
    and index the edges per tail node, edge-id ascending."""
    m = g.arc_count
    ehead = np.empty(2 * m, dtype=np.int64)
    etail = np.empty(2 * m, dtype=np.int64)
    ecap = np.empty(2 * m, dtype=np.int64)
    ehead[0::2] = g.heads
    ehead[1::2] = g.tails
    etail[0::2] = g.tails
    etail[1::2] = g.heads
    ecap[0::2] = g.caps
    ecap[1::2] = 0
    adj_lst = np.argsort(etail, kind="stable").astype(np.int64)
    adj_off = np.zeros(g.num_nodes + 1, dtype=np.int64)
    counts = np.bincount(etail, minlength=g.num_nodes)
    adj_off[1:] = np.cumsum(counts)
    return adj_off, adj_lst, ehead, ecap


def max_flow_bk(g: SegGraph) -> CutResult:
    """Solve the min cut; source side is the residual-reachable set from s."""
    adj_off, adj_lst, ehead, ecap = _edge_arrays(g)
    n = g.num_nodes
    flow = int(_bk_kernel(n, g.source, g.sink, adj_off, adj_lst, ehead, ecap))
    side = np.asarray(_residual_reach(n, g.source, adj_off, adj_lst, ehead, ecap))
    boundary = None
    if g.rays > 0:
        boundary = extract_boundary(side, g.rays, g.samples)
    # Residual capacity of arc k's reverse edge equals the flow pushed on k.
    return CutResult(flow_value=flow, source_side=side, boundary=boundary, arc_flow=ecap[1::2])


def warmup_solver() -> None:
    """Trigger the solver's JIT compilation with a tiny throwaway instance.

    Call once per process before timing-sensitive work (CLI and service do
    this at startup) so compile time never lands in a phase measurement.
    """
    g = SegGraph.from_arcs(3, 1, 2, [(1, 0, 2), (0, 2, 1)])
    max_flow_bk(g)


def reference_max_flow(g: SegGraph) -> int:
    """Shortest-augmenting-path max flow (BFS, plain Python). Oracle only."""
    n = g.num_nodes
    adj: list[list[int]] = [[] for _ in range(n)]
    cap: list[int] = []
    to: list[int] = []
    for u, v, c in zip(g.tails.tolist(), g.heads.tolist(), g.caps.tolist()):
        adj[u].append(len(cap))
        to.append(v)
        cap.append(c)
        adj[v].append(len(cap))
        to.append(u)
        cap.append(0)
    s, t = g.source, g.sink
    flow = 0
    while True:
        prev_edge = [-1] * n
        prev_edge[s] = -2
        q = deque([s])
        while q and prev_edge[t] == -1:
            u = q.popleft()
            for eid in adj[u]:
                v = to[eid]
                if cap[eid] > 0 and prev_edge[v] == -1:
                    prev_edge[v] = eid
                    q.append(v)
        if prev_edge[t] == -1:
            return flow
        bott = None
        v = t
        while v != s:
            eid = prev_edge[v]
            bott = cap[eid] if bott is None else min(bott, cap[eid])
            v = to[eid ^ 1]
        v = t
        while v != s:
            eid = prev_edge[v]
            cap[eid] -= bott
            cap[eid ^ 1] += bott
            v = to[eid ^ 1]
        flow += bott


def extract_boundary(source_side: np.ndarray, rays: int, samples: int) -> np.ndarray:
    """Per-ray boundary index: the largest z whose node sits on the source side.

    Requires the prefix property (source side closed under decreasing z);
    a violation means an infinite-capacity arc was cut upstream.
    """
    side = np.asarray(source_side, dtype=bool)
    if side.size < rays * samples:
        raise MalformedCut(
            f"partition covers {side.size} nodes, need at least {rays * samples}"
        )
    grid = side[: rays * samples].reshape(rays, samples)
    if not grid[:, 0].all():
        bad = int(np.flatnonzero(~grid[:, 0])[0])
        raise MalformedCut(f"ray {bad}: node z=0 is not on the source side")
    b = grid.sum(axis=1).astype(np.int64) - 1
    expect = np.zeros_like(grid)
    for r in range(rays):
        expect[r, : b[r] + 1] = True
    if not (expect == grid).all():
        bad = int(np.flatnonzero((expect != grid).any(axis=1))[0])
        raise MalformedCut(f"ray {bad} violates the prefix property")
    return b


def read_dimacs(text: str) -> SegGraph:
    """Parse DIMACS max-flow text into a generic SegGraph (0-based ids)."""
    n_nodes = -1
    source = -1
    sink = -1
    tails: list[int] = []
    heads: list[int] = []
    caps: list[int] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("c"):
            continue
        parts = line.split()
        if parts[0] == "p":
            if len(parts) != 4 or parts[1] != "max":
                raise MalformedHeader(f"line {lineno}: bad problem line")
            n_nodes = int(parts[2])
        elif parts[0] == "n":
            if len(parts) != 3 or parts[2] not in ("s", "t"):
                raise MalformedHeader(f"line {lineno}: bad node descriptor")
            if parts[2] == "s":
                source = int(parts[1]) - 1
            else:
                sink = int(parts[1]) - 1
        elif parts[0] == "a":
            if len(parts) != 4:
                raise MalformedHeader(f"line {lineno}: bad arc line")
            tails.append(int(parts[1]) - 1)
            heads.append(int(parts[2]) - 1)
            caps.append(int(parts[3]))
        else:
            raise MalformedHeader(f"line {lineno}: unknown record {parts[0]!r}")
    if n_nodes < 0 or source < 0 or sink < 0:
        raise MalformedHeader("missing problem line or terminal descriptors")
    return SegGraph.from_arcs(n_nodes, source, sink, zip(tails, heads, caps))
