"""Numba search kernel: goal-directed Dijkstra over an implicit lattice box.

Edge weights are regenerated inside the kernel with the same SplitMix64 chain
as env.edge_weight, so nothing is materialized.  Only distributions with an
affine quantile (w = c0 + c1*u) are eligible; the affine map keeps the kernel
bit-identical to the numpy/scalar path.

When a target set is given, the frontier is ordered by f = dist + h with the
consistent heuristic h(v) = w_min * l1-distance to the target bounding box,
so settled distances are final and the explored region shrinks to a goal
ellipse.  Eligible distributions are atomless, so the geodesic is almost
surely unique and the returned path agrees with the reference engine; exact
float ties fall back to the same lexicographic (priority, predecessor (y,x),
vertex (y,x)) rule.  Pass w_min = 0 (or no targets) for plain Dijkstra
ordering, e.g. for metric balls halted at a time threshold.
"""

from __future__ import annotations

import numpy as np

try:
    from numba import njit, int64, uint64

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - numba is a declared dependency
    HAVE_NUMBA = False

    def njit(*a, **k):
        def deco(f):
            return f

        return deco

    int64 = uint64 = lambda x: x


@njit(cache=True, inline="always")
def _mix64(z):
    z = z + uint64(0x9E3779B97F4A7C15)
    z = (z ^ (z >> uint64(30))) * uint64(0xBF58476D1CE4E5B9)
    z = (z ^ (z >> uint64(27))) * uint64(0x94D049BB133111EB)
    return z ^ (z >> uint64(31))


@njit(cache=True, inline="always")
def _zigzag(v):
    return uint64((v << 1) ^ (v >> 63))


@njit(cache=True, inline="always")
def _edge_weight(seed_mixed, c0, c1, ex, ey, orient):
    h = _mix64(seed_mixed ^ _zigzag(int64(ex)))
    h = _mix64(h ^ _zigzag(int64(ey)))
    h = _mix64(h ^ uint64(orient))
    u = (h >> uint64(11)) * (2.0**-53)
    return c0 + c1 * u


@njit(cache=True, inline="always")
def _heap_less(hf, hp, hv, i, j):
    if hf[i] != hf[j]:
        return hf[i] < hf[j]
    if hp[i] != hp[j]:
        return hp[i] < hp[j]
    return hv[i] < hv[j]


@njit(cache=True)
def dijkstra_kernel(seed, c0, c1, x0, y0, W, H, src, tgts, tstop, hmin,
                    bb_x0, bb_x1, bb_y0, bb_y1):
    """Single-source search on the box [x0,x0+W) x [y0,y0+H).

    Stops when every target id in `tgts` is settled, or when the frontier
    priority exceeds `tstop` (priorities include the heuristic; use hmin = 0
    when tstop matters).  Returns (dist, pred, status): 0 = targets settled,
    1 = frontier passed tstop, 2 = heap exhausted.  Unsettled nodes keep
    dist = +inf and pred = -1.
    """
    n = W * H
    dist = np.full(n, np.inf)
    best = np.full(n, np.inf)  # tentative values keyed like dist
    pred = np.full(n, -1, dtype=np.int64)
    settled = np.zeros(n, dtype=np.uint8)
    is_tgt = np.zeros(n, dtype=np.uint8)
    tgt_left = 0
    for i in range(tgts.shape[0]):
        if is_tgt[tgts[i]] == 0:
            is_tgt[tgts[i]] = 1
            tgt_left += 1
    seed_mixed = _mix64(uint64(seed))

    cap = 1 << 12
    hf = np.empty(cap)               # priority: dist + heuristic
    hd = np.empty(cap)               # exact tentative dist
    hp = np.empty(cap, dtype=np.int64)
    hv = np.empty(cap, dtype=np.int64)
    m = 0

    hf[0] = 0.0
    hd[0] = 0.0
    hp[0] = src
    hv[0] = src
    m = 1
    best[src] = 0.0

    status = 2
    while m > 0:
        f0 = hf[0]
        d0 = hd[0]
        p0 = hp[0]
        v0 = hv[0]
        m -= 1
        hf[0] = hf[m]
        hd[0] = hd[m]
        hp[0] = hp[m]
        hv[0] = hv[m]
        i = 0
        while True:
            l = 2 * i + 1
            r = l + 1
            s = i
            if l < m and _heap_less(hf, hp, hv, l, s):
                s = l
            if r < m and _heap_less(hf, hp, hv, r, s):
                s = r
            if s == i:
                break
            hf[i], hf[s] = hf[s], hf[i]
            hd[i], hd[s] = hd[s], hd[i]
            hp[i], hp[s] = hp[s], hp[i]
            hv[i], hv[s] = hv[s], hv[i]
            i = s
        if settled[v0]:
            continue
        if f0 > tstop:
            status = 1
            break
        settled[v0] = 1
        dist[v0] = d0
        pred[v0] = p0
        if is_tgt[v0]:
            tgt_left -= 1
            if tgt_left == 0:
                status = 0
                break
        vy = v0 // W
        vx = v0 - vy * W
        for k in range(4):
            if k == 0:
                if vx + 1 >= W:
                    continue
                nb = v0 + 1
                nx = vx + 1
                ny = vy
                ex = x0 + vx
                ey = y0 + vy
                orient = 0
            elif k == 1:
                if vx == 0:
                    continue
                nb = v0 - 1
                nx = vx - 1
                ny = vy
                ex = x0 + vx - 1
                ey = y0 + vy
                orient = 0
            elif k == 2:
                if vy + 1 >= H:
                    continue
                nb = v0 + W
                nx = vx
                ny = vy + 1
                ex = x0 + vx
                ey = y0 + vy
                orient = 1
            else:
                if vy == 0:
                    continue
                nb = v0 - W
                nx = vx
                ny = vy - 1
                ex = x0 + vx
                ey = y0 + vy - 1
                orient = 1
            if settled[nb]:
                continue
            nd = d0 + _edge_weight(seed_mixed, c0, c1, ex, ey, orient)
            if nd < best[nb]:
                best[nb] = nd
                nf = nd
                if hmin > 0.0:
                    gx = x0 + nx
                    gy = y0 + ny
                    dx = bb_x0 - gx
                    if gx - bb_x1 > dx:
                        dx = gx - bb_x1
                    if dx < 0:
                        dx = 0
                    dy = bb_y0 - gy
                    if gy - bb_y1 > dy:
                        dy = gy - bb_y1
                    if dy < 0:
                        dy = 0
                    nf = nd + hmin * (dx + dy)
                if m >= cap:
                    cap2 = cap * 2
                    hf2 = np.empty(cap2)
                    hd2 = np.empty(cap2)
                    hp2 = np.empty(cap2, dtype=np.int64)
                    hv2 = np.empty(cap2, dtype=np.int64)
                    hf2[:m] = hf[:m]
                    hd2[:m] = hd[:m]
                    hp2[:m] = hp[:m]
                    hv2[:m] = hv[:m]
                    hf, hd, hp, hv, cap = hf2, hd2, hp2, hv2, cap2
                i = m
                hf[i] = nf
                hd[i] = nd
                hp[i] = v0
                hv[i] = nb
                m += 1
                while i > 0:
                    par = (i - 1) >> 1
                    if _heap_less(hf, hp, hv, i, par):
                        hf[i], hf[par] = hf[par], hf[i]
                        hd[i], hd[par] = hd[par], hd[i]
                        hp[i], hp[par] = hp[par], hp[i]
                        hv[i], hv[par] = hv[par], hv[i]
                        i = par
                    else:
                        break
    return dist, pred, status
