"""Exact shortest-path engine on the weighted lattice.

Passage times, geodesics, metric balls and path utilities.  The search runs
inside a SearchBox that grows geometrically (x2 margin) whenever the result
cannot be certified: the returned path touches the box boundary, or some
boundary vertex was settled below the returned time (so a cheaper path might
exit the box).

Two engines sit behind the same contract:

* a pure-Python reference engine (lazy weights, any distribution, overlays,
  switchable neighbor iteration order) popping in tentative-distance order
  with exact ties broken lexicographically on (distance, predecessor (y,x),
  vertex (y,x)) — this ordering is the documented semantics and the one that
  decides tied instances such as constant weights; and
* a numba kernel that regenerates weights in-kernel (atomless distributions
  with affine quantile, empty overlay) and orders its frontier by the
  goal-directed priority dist + min_weight * l1-to-targets.  Atomless
  weights make the geodesic almost surely unique, so both engines return
  the same path bit for bit (tested), and the boundary certificate below is
  sound for either ordering.

Reported times are exactly-rounded sums (math.fsum) over the traced path,
which makes T(u,v) and T(v,u) bit-equal whenever the geodesic is unique.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from heapq import heappush, heappop

import numpy as np

from .env import (
    Environment,
    EdgeKey,
    HORIZONTAL,
    VERTICAL,
    affine_quantile_coeffs,
    edge_between,
)
from . import _fastpath

__all__ = [
    "LatticePath",
    "SearchBox",
    "path_time",
    "geodesic",
    "passage_time",
    "multi_geodesic",
    "metric_ball",
    "symmetric_difference",
    "subpath_between",
]

Vertex = tuple  # (x, y)


@dataclass(frozen=True)
class LatticePath:
    """Oriented simple path of lattice vertices; a single vertex is allowed."""

    vertices: tuple

    def __init__(self, vertices):
        vs = tuple((int(x), int(y)) for x, y in vertices)
        if not vs:
            raise ValueError("a path needs at least one vertex")
        if len(set(vs)) != len(vs):
            raise ValueError("path is not simple (repeated vertex)")
        for (ax, ay), (bx, by) in zip(vs, vs[1:]):
            if abs(ax - bx) + abs(ay - by) != 1:
                raise ValueError(f"vertices ({ax},{ay}) and ({bx},{by}) are not adjacent")
        object.__setattr__(self, "vertices", vs)

    def __len__(self):
        return len(self.vertices)

    def __iter__(self):
        return iter(self.vertices)

    def __getitem__(self, i):
        return self.vertices[i]

    @property
    def start(self):
        return self.vertices[0]

    @property
    def end(self):
        return self.vertices[-1]

    def n_edges(self) -> int:
        return len(self.vertices) - 1

    def edge_keys(self):
        """Edges in traversal order."""
        return tuple(edge_between(a, b) for a, b in zip(self.vertices, self.vertices[1:]))

    def edge_set(self) -> frozenset:
        return frozenset(self.edge_keys())

    def reversed(self) -> "LatticePath":
        return LatticePath(self.vertices[::-1])


def path_time(env: Environment, p: LatticePath) -> float:
    """Sum of edge weights along p (exactly-rounded); trivial path -> 0."""
    return math.fsum(env.weight(e) for e in p.edge_keys())


def symmetric_difference(p: LatticePath, q: LatticePath) -> int:
    """Number of edges belonging to exactly one of the two paths."""
    return len(p.edge_set() ^ q.edge_set())


def subpath_between(p: LatticePath, a, b) -> LatticePath:
    """Contiguous segment of p from a to b (reversed if b precedes a)."""
    a = (int(a[0]), int(a[1]))
    b = (int(b[0]), int(b[1]))
    try:
        ia = p.vertices.index(a)
        ib = p.vertices.index(b)
    except ValueError as err:
        raise ValueError(f"vertex not on path: {err}") from err
    if ia <= ib:
        return LatticePath(p.vertices[ia : ib + 1])
    return LatticePath(p.vertices[ib : ia + 1][::-1])


@dataclass(frozen=True)
class SearchBox:
    xmin: int
    xmax: int
    ymin: int
    ymax: int

    def contains(self, v) -> bool:
        return self.xmin <= v[0] <= self.xmax and self.ymin <= v[1] <= self.ymax

    def on_boundary(self, v) -> bool:
        return v[0] in (self.xmin, self.xmax) or v[1] in (self.ymin, self.ymax)

    @property
    def width(self):
        return self.xmax - self.xmin + 1

    @property
    def height(self):
        return self.ymax - self.ymin + 1


def _initial_box(u, v, margin=None) -> SearchBox:
    d1 = abs(u[0] - v[0]) + abs(u[1] - v[1])
    m = margin if margin is not None else max(2 * d1, 64)
    return SearchBox(
        min(u[0], v[0]) - m, max(u[0], v[0]) + m, min(u[1], v[1]) - m, max(u[1], v[1]) + m
    )


def _grow(box: SearchBox, u, v) -> SearchBox:
    m = 2 * max(
        min(u[0], v[0]) - box.xmin,
        box.xmax - max(u[0], v[0]),
        min(u[1], v[1]) - box.ymin,
        box.ymax - max(u[1], v[1]),
    )
    return _initial_box(u, v, margin=m)


class _SearchResult:
    """Engine-independent view of a finished search."""

    def __init__(self, dist_of, pred_of, boundary_min, status):
        self.dist_of = dist_of  # vertex -> settled distance or None
        self.pred_of = pred_of  # vertex -> predecessor vertex
        self.boundary_min = boundary_min  # min settled distance on the box boundary
        self.status = status

    def trace(self, v) -> LatticePath:
        chain = [v]
        while True:
            p = self.pred_of(v)
            if p == v:
                break
            chain.append(p)
            v = p
        return LatticePath(chain[::-1])


def _search_reference(env, box, source, targets, tstop, neighbor_order="standard"):
    """Lazy Dijkstra with heap entries (d, pred_y, pred_x, y, x)."""
    settled = {}
    pred = {}
    best = {source: 0.0}
    sx, sy = source
    heap = [(0.0, sy, sx, sy, sx)]
    remaining = set(targets) if targets is not None else None
    boundary_min = math.inf
    status = 2
    if neighbor_order == "standard":
        steps = ((1, 0), (-1, 0), (0, 1), (0, -1))
    else:
        steps = ((0, -1), (0, 1), (-1, 0), (1, 0))
    while heap:
        d0, py, px, vy, vx = heappop(heap)
        v = (vx, vy)
        if v in settled:
            continue
        if d0 > tstop:
            status = 1
            break
        settled[v] = d0
        pred[v] = (px, py)
        if box.on_boundary(v) and d0 < boundary_min:
            boundary_min = d0
        if remaining is not None:
            remaining.discard(v)
            if not remaining:
                status = 0
                break
        for dx, dy in steps:
            nb = (vx + dx, vy + dy)
            if nb in settled or not box.contains(nb):
                continue
            nd = d0 + env.weight(edge_between(v, nb))
            if nd < best.get(nb, math.inf):
                best[nb] = nd
                heappush(heap, (nd, vy, vx, nb[1], nb[0]))
    return _SearchResult(settled.get, pred.get, boundary_min, status)


def _search_fast(env, box, source, targets, tstop):
    c0, c1 = affine_quantile_coeffs(env.dist)
    W, H = box.width, box.height

    def pack(v):
        return (v[1] - box.ymin) * W + (v[0] - box.xmin)

    tgt_ids = np.array(sorted({pack(t) for t in targets}), dtype=np.int64) if targets else np.empty(
        0, dtype=np.int64
    )
    if targets and math.isinf(tstop):
        # goal-directed ordering; c0 = min weight is a consistent heuristic
        hmin = max(c0, 0.0)
        bb_x0 = min(t[0] for t in targets)
        bb_x1 = max(t[0] for t in targets)
        bb_y0 = min(t[1] for t in targets)
        bb_y1 = max(t[1] for t in targets)
    else:
        hmin, bb_x0, bb_x1, bb_y0, bb_y1 = 0.0, 0, 0, 0, 0
    dist, pred, status = _fastpath.dijkstra_kernel(
        np.uint64(env.seed & 0xFFFFFFFFFFFFFFFF),
        c0,
        c1,
        box.xmin,
        box.ymin,
        W,
        H,
        pack(source),
        tgt_ids,
        tstop,
        hmin,
        bb_x0,
        bb_x1,
        bb_y0,
        bb_y1,
    )

    def unpack(i):
        return (box.xmin + i % W, box.ymin + i // W)

    def dist_of(v):
        d = dist[pack(v)]
        return None if math.isinf(d) else float(d)

    def pred_of(v):
        p = pred[pack(v)]
        return v if p < 0 else unpack(int(p))

    border = np.concatenate([dist[:W], dist[-W:], dist[::W], dist[W - 1 :: W]])
    finite = border[np.isfinite(border)]
    boundary_min = float(finite.min()) if finite.size else math.inf
    return _SearchResult(dist_of, pred_of, boundary_min, status)


def _use_fast(env: Environment) -> bool:
    return (
        _fastpath.HAVE_NUMBA
        and not env.overlay
        and env.dist.atomless
        and affine_quantile_coeffs(env.dist) is not None
    )


def _run_certified(env, source, targets, engine="auto", neighbor_order="standard"):
    """Search and grow the box until the optimum is certified inside it."""
    far = max(targets, key=lambda t: abs(t[0] - source[0]) + abs(t[1] - source[1]))
    box = _initial_box(source, far)
    fast = _use_fast(env) if engine == "auto" else (engine == "fast")
    for _ in range(32):
        if fast:
            res = _search_fast(env, box, source, targets, math.inf)
        else:
            res = _search_reference(env, box, source, targets, math.inf, neighbor_order)
        tmax = max(res.dist_of(t) for t in targets)
        touches = any(box.on_boundary(v) for t in targets for v in res.trace(t))
        if res.boundary_min >= tmax and not touches:
            return res, box
        box = _grow(box, source, far)
    raise RuntimeError("search box grew 32 times without certification")


def geodesic(env: Environment, u, v, engine="auto", neighbor_order="standard"):
    """Passage time and the unique minimizing path from u to v (oriented u->v).

    The fast engine is used automatically when eligible; both engines apply
    the same tie-break, so the choice never changes the answer.
    """
    u = (int(u[0]), int(u[1]))
    v = (int(v[0]), int(v[1]))
    if u == v:
        return 0.0, LatticePath([u])
    res, _ = _run_certified(env, u, [v], engine, neighbor_order)
    path = res.trace(v)
    return path_time(env, path), path


def passage_time(env: Environment, u, v, engine="auto") -> float:
    return geodesic(env, u, v, engine)[0]


def multi_geodesic(env: Environment, source, targets, engine="auto"):
    """Geodesics from one source to several targets out of a single search.

    Returns {target: (time, path)}.  Equivalent to calling geodesic per
    target, but the search (and its certification) is shared.
    """
    source = (int(source[0]), int(source[1]))
    targets = [(int(t[0]), int(t[1])) for t in targets]
    out = {}
    rest = [t for t in targets if t != source]
    if len(rest) < len(targets):
        out[source] = (0.0, LatticePath([source]))
    if rest:
        res, _ = _run_certified(env, source, rest, engine)
        for t in rest:
            p = res.trace(t)
            out[t] = (path_time(env, p), p)
    return out


def metric_ball(env: Environment, t: float, engine="auto"):
    """Vertices v with T(0,v) <= t (exact membership via traced-path times)."""
    if t < 0:
        raise ValueError("t must be >= 0")
    origin = (0, 0)
    lo, _ = env.dist.support()
    guess = int(math.ceil(t / lo)) if lo > 0 else int(math.ceil(4 * t / env.dist.mean()))
    margin = max(64, guess)
    fast = _use_fast(env) if engine == "auto" else (engine == "fast")
    for _ in range(32):
        box = SearchBox(-margin, margin, -margin, margin)
        if fast:
            res = _search_fast(env, box, origin, [], t * (1 + 1e-12) + 1e-9)
        else:
            res = _search_reference(env, box, origin, None, t * (1 + 1e-12) + 1e-9)
        if res.boundary_min <= t:
            margin *= 2
            continue
        ball = set()
        for x in range(box.xmin, box.xmax + 1):
            for y in range(box.ymin, box.ymax + 1):
                v = (x, y)
                d = res.dist_of(v)
                if d is None or d > t * (1 + 1e-12) + 1e-9:
                    continue
                if path_time(env, res.trace(v)) <= t:
                    ball.add(v)
        return ball
    raise RuntimeError("metric ball box grew 32 times without certification")
