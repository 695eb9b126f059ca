"""numba kernels for walk sampling, online loop-erasure, and path statistics.

All kernels are seeded explicitly per call so replica streams are
reproducible regardless of call order.
"""

import numpy as np
from numba import njit

# neighbor step order shared with harmonic.neighbor_table: +x, -x, +y, -y
_STEPS = np.array([[1, 0], [-1, 0], [0, 1], [0, -1]], dtype=np.int64)


@njit(cache=True)
def hprocess_lerw(nbr, cum, start, seed, path, pos):
    """Sample one conditioned walk with loops erased on the fly.

    nbr:  (n, 4) int32 neighbor indices, -1 off-domain
    cum:  (n, 4) float64 cumulative move probabilities; mass beyond cum[i, 3]
          is the terminal exit (positive only at the target edge's endpoint)
    start: site index of the first in-domain vertex
    path: int32 scratch of length n + 1
    pos:  int32 scratch of length n, must be -1 everywhere on entry
          (restored on exit)

    Returns (saw_length, raw_steps); path[:saw_length] holds the
    loop-erased visit sequence ending at the exit site.
    """
    np.random.seed(seed)
    top = 0
    path[0] = start
    pos[start] = 0
    cur = start
    raw = 0
    while True:
        u = np.random.random()
        if u >= cum[cur, 3]:
            break  # exit through the target edge
        k = 0
        if u >= cum[cur, 0]:
            k = 1
            if u >= cum[cur, 1]:
                k = 2
                if u >= cum[cur, 2]:
                    k = 3
        nxt = nbr[cur, k]
        raw += 1
        p = pos[nxt]
        if p >= 0:
            # erase the loop back to the previous visit
            while top > p:
                pos[path[top]] = -1
                top -= 1
        else:
            top += 1
            path[top] = nxt
            pos[nxt] = top
        cur = nxt
    n_saw = top + 1
    for i in range(n_saw):
        pos[path[i]] = -1
    return n_saw, raw


@njit(cache=True)
def srw_exit_edge(nbr, start, seed):
    """Walk until stepping off-domain; return (last site, direction slot)."""
    np.random.seed(seed)
    cur = start
    while True:
        k = int(np.random.random() * 4)
        if k > 3:
            k = 3
        nxt = nbr[cur, k]
        if nxt < 0:
            return cur, k
        cur = nxt


@njit(cache=True)
def interior_lerw_disk(r, seed, path, pos, width, half):
    """Loop-erased walk from 0 stopped on first reaching {|z| >= r}.

    pos is an int32 grid of shape (width, width) indexed by (x + half,
    y + half), -1 on entry and restored on exit.  path is an (m, 2) int32
    buffer.  Returns the number of SAW vertices written (terminal vertex
    lies on or outside the circle).

    Control flow is kept branch-simple (flag loop, local erasure counter):
    numba's SSA pass miscompiles the straightforward while-True variant.
    """
    np.random.seed(seed)
    r2 = r * r
    top = 0
    path[0, 0] = 0
    path[0, 1] = 0
    pos[half, half] = 0
    x = 0
    y = 0
    done = False
    while not done:
        k = int(np.random.random() * 4)
        if k > 3:
            k = 3
        if k == 0:
            x += 1
        elif k == 1:
            x -= 1
        elif k == 2:
            y += 1
        else:
            y -= 1
        if x * x + y * y >= r2:
            top = top + 1
            path[top, 0] = x
            path[top, 1] = y
            done = True
        else:
            p = int(pos[x + half, y + half])
            if p >= 0:
                q = top
                while q > p:
                    pos[path[q, 0] + half, path[q, 1] + half] = -1
                    q -= 1
                top = p
            else:
                top = top + 1
                path[top, 0] = x
                path[top, 1] = y
                pos[x + half, y + half] = top
    n_saw = top + 1
    for i in range(n_saw - 1):
        pos[path[i, 0] + half, path[i, 1] + half] = -1
    return n_saw


@njit(cache=True)
def loop_erase_walk(walk, out, pos, x0, y0, width):
    """Chronological loop-erasure of an explicit nearest-neighbor walk.

    pos is an int32 grid over the walk's bounding box (all -1 on entry,
    restored on exit); out must have room for the full walk.  Returns the
    number of vertices in the loop-erased path.
    """
    m = len(walk)
    top = 0
    out[0, 0] = walk[0, 0]
    out[0, 1] = walk[0, 1]
    pos[walk[0, 0] - x0, walk[0, 1] - y0] = 0
    for j in range(1, m):
        x = walk[j, 0]
        y = walk[j, 1]
        p = pos[x - x0, y - y0]
        if p >= 0:
            while top > p:
                pos[out[top, 0] - x0, out[top, 1] - y0] = -1
                top -= 1
        else:
            top += 1
            out[top, 0] = x
            out[top, 1] = y
            pos[x - x0, y - y0] = top
    n = top + 1
    for i in range(n):
        pos[out[i, 0] - x0, out[i, 1] - y0] = -1
    return n


@njit(cache=True)
def ball_visit_count(verts, cx, cy, radius):
    r2 = radius * radius
    c = 0
    for i in range(len(verts)):
        dx = verts[i, 0] - cx
        dy = verts[i, 1] - cy
        if dx * dx + dy * dy <= r2:
            c += 1
    return c


@njit(cache=True)
def maximal_ball_count(verts, spacing, radius):
    """max over centers on the sublattice (spacing * Z)^2 of the number of
    path vertices within `radius` of the center."""
    n = len(verts)
    if n == 0:
        return 0
    xmin = verts[0, 0]
    xmax = verts[0, 0]
    ymin = verts[0, 1]
    ymax = verts[0, 1]
    for i in range(n):
        if verts[i, 0] < xmin:
            xmin = verts[i, 0]
        if verts[i, 0] > xmax:
            xmax = verts[i, 0]
        if verts[i, 1] < ymin:
            ymin = verts[i, 1]
        if verts[i, 1] > ymax:
            ymax = verts[i, 1]
    gx0 = (xmin - radius) // spacing - 1
    gx1 = (xmax + radius) // spacing + 1
    gy0 = (ymin - radius) // spacing - 1
    gy1 = (ymax + radius) // spacing + 1
    W = gx1 - gx0 + 1
    H = gy1 - gy0 + 1
    acc = np.zeros((W, H), dtype=np.int64)
    r2 = radius * radius
    reach = radius // spacing + 1
    for i in range(n):
        vx = verts[i, 0]
        vy = verts[i, 1]
        cgx = vx // spacing
        cgy = vy // spacing
        for a in range(cgx - reach, cgx + reach + 2):
            for b in range(cgy - reach, cgy + reach + 2):
                dx = a * spacing - vx
                dy = b * spacing - vy
                if dx * dx + dy * dy <= r2:
                    acc[a - gx0, b - gy0] += 1
    return acc.max()


@njit(cache=True)
def first_radius_indices(verts, r):
    """Index of the first vertex with |v| < r scanning forward, and scanning
    backward; (-1, -1) if the path never enters the open disk."""
    n = len(verts)
    r2 = r * r
    fwd = -1
    for i in range(n):
        if verts[i, 0] * verts[i, 0] + verts[i, 1] * verts[i, 1] < r2:
            fwd = i
            break
    if fwd < 0:
        return -1, -1
    bwd = -1
    for i in range(n - 1, -1, -1):
        if verts[i, 0] * verts[i, 0] + verts[i, 1] * verts[i, 1] < r2:
            bwd = i
            break
    return fwd, bwd


@njit(cache=True)
def bottleneck_flag(verts, r, R):
    """True if some vertex reaches |v| >= R and a later one returns to |v| <= r."""
    n = len(verts)
    R2 = R * R
    r2 = r * r
    out = False
    for j in range(n):
        d2 = verts[j, 0] * verts[j, 0] + verts[j, 1] * verts[j, 1]
        if not out:
            if d2 >= R2:
                out = True
        else:
            if d2 <= r2:
                return True
    return False
