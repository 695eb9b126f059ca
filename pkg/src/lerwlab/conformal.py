"""Numerical conformal map from a union-of-squares domain onto the upper
half-plane with the marked boundary edges sent to 0 and infinity.

The map is built by the geodesic zipper: walk the boundary polygon from b
around to b, at each vertex composing a Mobius slide with a vertical-slit
map that flattens the hyperbolic geodesic to the vertex's current image.
Polygon edges can be refined dyadically for accuracy.  Derivatives come
from the chain rule through the elementary maps, never from differencing.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from numba import njit
from scipy import ndimage, sparse
from scipy.sparse.linalg import splu

from .grid import DomainTriple, UnionOfSquares, union_of_squares

__all__ = [
    "HalfPlaneMap",
    "MapConvergenceError",
    "BoundaryEvaluationError",
    "map_to_halfplane",
    "sine_and_radius",
    "disk_normalized_sine",
    "compare_lattice_maps",
    "harmonic_measure_arc_fd",
    "map_diagnostics_csv",
]


class MapConvergenceError(RuntimeError):
    pass


class BoundaryEvaluationError(ValueError):
    pass


@njit(cache=True)
def _slit(w, h):
    """sqrt(w^2 + h^2) on the branch fixing the half-plane, ~ w at infinity."""
    if w == 0:
        return complex(0.0, h)
    return w * np.sqrt(1.0 + (h / w) ** 2)


@njit(cache=True)
def _build_steps(pts, bs, hs):
    """Sequential zipper construction with per-step renormalization.

    pts[k] holds the current image of data point k in the running frame.
    Each elementary step is rescaled by 1/h so the newly opened slit has
    unit height; the lost dilation is repinned by the final normalization.
    Returns 0 on success, the failing step index otherwise.
    """
    m = len(pts)
    for k in range(2, m):
        z = pts[k]
        x = z.real
        y = z.imag
        if y <= 0.0:
            return k
        if abs(x) < 1e-14 * (1.0 + abs(y)):
            b = np.inf
            h = y
        else:
            b = (x * x + y * y) / x
            h = (x * x + y * y) / y
        bs[k] = b
        hs[k] = h
        for j in range(k + 1, m):
            w = pts[j]
            if not np.isinf(b):
                w = w / (1.0 - w / b)
            pts[j] = _slit(w, h) / h
    return 0


@njit(cache=True, inline="always")
def _step_real(x, b, h):
    """One renormalized elementary step restricted to the real axis."""
    if np.isinf(x):
        if np.isinf(b):
            return x
        x = -b
    elif not np.isinf(b):
        if x == b:
            return np.inf
        x = x / (1.0 - x / b)
        if np.isinf(x):
            return x
    s = math.sqrt(x * x + h * h)
    return (s if x > 0 else -s) / h


@njit(cache=True)
def _track_real(x, bs, hs, k0):
    """Push a real boundary image through steps k0..end."""
    for k in range(k0, len(bs)):
        x = _step_real(x, bs[k], hs[k])
    return x


@njit(cache=True)
def _track_point_at_infinity(bs, hs):
    x = np.inf
    for k in range(2, len(bs)):
        x = _step_real(x, bs[k], hs[k])
    return x


@njit(cache=True)
def _forward(zs, p0, p1, bs, hs, xinf, sq, xa, lam, out, der, want_der):
    n = len(zs)
    for i in range(n):
        z = zs[i]
        u = (z - p1) / (z - p0)
        su = np.sqrt(u)
        w = 1j * su
        if want_der:
            d = 1j * (p1 - p0) / ((z - p0) ** 2 * 2.0 * su)
        else:
            d = 0.0 + 0.0j
        for k in range(2, len(bs)):
            b = bs[k]
            h = hs[k]
            if not np.isinf(b):
                q = 1.0 - w / b
                if want_der:
                    d = d / (q * q)
                w = w / q
            s = _slit(w, h)
            if want_der:
                if s != 0:
                    d = d * (w / s)
            w = s / h
            if want_der:
                d = d / h
        q = 1.0 - w / xinf
        if want_der:
            d = d / (q * q)
        w = w / q
        if want_der:
            d = d * (2.0 * sq * w)
        w = sq * w * w
        out[i] = lam * (w - xa)
        if want_der:
            der[i] = lam * d


@njit(cache=True)
def _inverse(ws, p0, p1, bs, hs, xinf, sq, xa, lam):
    n = len(ws)
    out = np.empty(n, dtype=np.complex128)
    for i in range(n):
        w = ws[i] / lam + xa
        # invert the closing square (branch: quarter-plane on the sq side)
        if sq < 0:
            v = -np.sqrt(-w)
        else:
            v = np.sqrt(w)
        v = v / (1.0 + v / xinf)
        for k in range(len(bs) - 1, 1, -1):
            h = hs[k]
            b = bs[k]
            v = v * h
            if v == 0.0:
                u = complex(0.0, h)  # slit base pulls back to the tip
            else:
                u = v * np.sqrt(1.0 - (h / v) ** 2)
                if u.imag < 0.0 and u.imag > -1e-12 * (1.0 + abs(u.real)):
                    u = complex(u.real, 0.0)
            if not np.isinf(b):
                u = u / (1.0 + u / b)
            v = u
        z = (p1 + v * v * p0) / (1.0 + v * v)
        out[i] = z
    return out


@dataclass
class HalfPlaneMap:
    """Conformal F: D_A -> H with F(a) = 0, F(b) = infinity.

    The dilation is pinned by Im F(0) = 1 when 0 lies in the domain,
    otherwise by |F'| = 1 at a central site.  `scale` multiplies the whole
    map; sine and conformal radius do not depend on it.
    """

    triple: DomainTriple
    polygon: UnionOfSquares
    p0: complex
    p1: complex
    bs: np.ndarray
    hs: np.ndarray
    xinf: float
    sq: float
    xa: float
    lam: float
    scale: float = 1.0
    refine: int = 1

    def __call__(self, zs, derivative: bool = False):
        z = np.atleast_1d(np.asarray(zs, dtype=complex))
        out = np.empty(len(z), dtype=complex)
        der = np.empty(len(z), dtype=complex)
        _forward(z, self.p0, self.p1, self.bs, self.hs, self.xinf, self.sq,
                 self.xa, self.lam, out, der, derivative)
        out *= self.scale
        if derivative:
            der *= self.scale
            return (out[0], der[0]) if np.isscalar(zs) or np.ndim(zs) == 0 else (out, der)
        return out[0] if np.isscalar(zs) or np.ndim(zs) == 0 else out

    def inverse(self, ws):
        w = np.atleast_1d(np.asarray(ws, dtype=complex)) / self.scale
        if np.any(w.imag < 0):
            raise ValueError("inverse requires upper half-plane points")
        z = _inverse(w, self.p0, self.p1, self.bs, self.hs, self.xinf,
                     self.sq, self.xa, self.lam)
        return z[0] if np.isscalar(ws) or np.ndim(ws) == 0 else z

    def with_scale(self, factor: float) -> "HalfPlaneMap":
        if factor <= 0:
            raise ValueError("scale must be positive")
        return HalfPlaneMap(
            triple=self.triple, polygon=self.polygon, p0=self.p0, p1=self.p1,
            bs=self.bs, hs=self.hs, xinf=self.xinf, sq=self.sq, xa=self.xa,
            lam=self.lam, scale=self.scale * factor, refine=self.refine,
        )

    def interior_depth_ok(self, z: complex, depth: float = 1.0) -> bool:
        """Conservative check that z is at least `depth` from the boundary."""
        t = self.triple
        x, y = z.real, z.imag
        for cx in (math.floor(x), math.ceil(x)):
            for cy in (math.floor(y), math.ceil(y)):
                for dx in (-1, 0, 1):
                    for dy in (-1, 0, 1):
                        if not t.contains((cx + dx, cy + dy)):
                            return False
        return True


def _refined_polygon_points(poly: UnionOfSquares, refine: int) -> np.ndarray:
    verts = poly.vertices_complex()
    if refine <= 0:
        return verts
    pieces = []
    n = len(verts)
    k = 2**refine
    for i in range(n):
        a, b = verts[i], verts[(i + 1) % n]
        ts = np.arange(k) / k
        pieces.append(a + (b - a) * ts)
    return np.concatenate(pieces)


def map_to_halfplane(poly_or_triple, refine: int = 1) -> HalfPlaneMap:
    """Build the zipper map for a union-of-squares domain.

    refine: each boundary segment is split into 2^refine data points;
    accuracy improves roughly linearly in the refinement at the cost of a
    quadratic build.
    """
    if isinstance(poly_or_triple, DomainTriple):
        triple = poly_or_triple
        poly = union_of_squares(triple)
    else:
        poly = poly_or_triple
        triple = poly.source
    pts_all = _refined_polygon_points(poly, refine)
    a_mid = complex(*triple.a.midpoint)
    b_mid = complex(*triple.b.midpoint)
    jb = int(np.argmin(np.abs(pts_all - b_mid)))
    if abs(pts_all[jb] - b_mid) > 1e-9:
        raise MapConvergenceError("edge b midpoint missing from polygon data")
    pts = np.roll(pts_all, -jb)
    ja = int(np.argmin(np.abs(pts - a_mid)))
    if abs(pts[ja] - a_mid) > 1e-9:
        raise MapConvergenceError("edge a midpoint missing from polygon data")
    m = len(pts)
    p0, p1 = pts[0], pts[1]
    work = np.empty(m, dtype=complex)
    work[:] = pts
    # first map i*sqrt((z - p1)/(z - p0)) opens the edge [p0, p1]
    u = (work[2:] - p1) / (work[2:] - p0)
    work[2:] = 1j * np.sqrt(u)
    bs = np.full(m, np.inf)
    hs = np.zeros(m)
    bad = _build_steps(work, bs, hs)
    if bad:
        raise MapConvergenceError(
            f"boundary image left the half-plane at data point {bad} of {m}"
        )
    # processed side of the real axis, from the domain side of the first edge
    mid01 = 0.5 * (p0 + p1)
    normal = 1j * (p1 - p0) / abs(p1 - p0)
    probe = mid01 + 1e-3 * normal
    wpro = 1j * np.sqrt((probe - p1) / (probe - p0))
    sigma = 1.0 if wpro.real > 0 else -1.0
    # image of a's midpoint: tip at its own step, then the renormalized slit
    # foot sigma * 1, then the real boundary flow
    if ja + 1 < m:
        xa = _track_real(sigma * 1.0, bs, hs, ja + 2)
    else:
        xa = 0.0  # a was the final tip
    xinf = _track_point_at_infinity(bs, hs)
    if not np.isfinite(xinf) or xinf == 0.0:
        raise MapConvergenceError("pinch point of b degenerated")
    # closing: z/(1 - z/xinf) then +-square onto the half-plane
    xa_m = xa / (1.0 - xa / xinf)
    interior_ref = 0j if triple.contains((0, 0)) else complex(*triple.sites[len(triple) // 2])
    wref = np.empty(1, dtype=complex)
    dref = np.empty(1, dtype=complex)
    _forward(np.array([interior_ref]), p0, p1, bs, hs, xinf, 1.0, 0.0, 1.0,
             wref, dref, False)
    sq = 1.0 if wref[0].imag > 0 else -1.0
    xa_q = sq * xa_m * xa_m
    _forward(np.array([interior_ref]), p0, p1, bs, hs, xinf, sq, xa_q, 1.0,
             wref, dref, True)
    if wref[0].imag <= 0:
        raise MapConvergenceError("interior reference point not mapped into H")
    if triple.contains((0, 0)):
        lam = 1.0 / wref[0].imag
    else:
        lam = 1.0 / abs(dref[0])
    return HalfPlaneMap(
        triple=triple, polygon=poly, p0=p0, p1=p1, bs=bs, hs=hs,
        xinf=float(xinf), sq=float(sq), xa=float(xa_q), lam=float(lam),
        refine=refine,
    )


def sine_and_radius(m: HalfPlaneMap, z, check_depth: bool = True):
    """(sin arg F(z), conformal radius 2 Im F / |F'|) at an interior point."""
    if check_depth and not m.interior_depth_ok(complex(z)):
        raise BoundaryEvaluationError(f"{z} is within one lattice unit of the boundary")
    w, dw = m(complex(z), derivative=True)
    if w.imag <= 0 or not np.isfinite(w.imag):
        raise BoundaryEvaluationError(f"map degenerate at {z}")
    s = w.imag / abs(w)
    r = 2.0 * w.imag / abs(dw)
    return float(s), float(r)


def disk_normalized_sine(triple: DomainTriple, refine: int = 0) -> float:
    """Sine separation sin(arg F(0)) of a triple containing the origin.

    Agrees with sin(arg f(b)/2) for the disk map f fixing 0 with arg f(a)=0;
    both equal sine of pi times the harmonic measure of one boundary arc.
    """
    if not triple.contains((0, 0)):
        raise ValueError("triple must contain the origin")
    m = map_to_halfplane(triple, refine=refine)
    w = m(0j)
    return float(w.imag / abs(w))


def compare_lattice_maps(shape, n1: int, n2: int, grid=None, refine: int = 1) -> dict:
    """Sup distance between the two scaled inverse maps on a half-plane grid.

    Both lattice approximations are mapped with the Im F(0) = 1 pinning, so
    their inverses are directly comparable; the sup over the grid reports the
    Caratheodory-type convergence of the approximations.
    """
    from .grid import approximate_domain

    if not n1 < n2:
        raise ValueError("need n1 < n2")
    if grid is None:
        xs = np.linspace(-2.0, 2.0, 21)
        ys = np.linspace(0.25, 3.0, 12)
        grid = (xs[None, :] + 1j * ys[:, None]).ravel()
    maps = []
    for n in (n1, n2):
        t = approximate_domain(shape, n)
        maps.append((n, map_to_halfplane(t, refine=refine)))
    z1 = maps[0][1].inverse(grid) / n1
    z2 = maps[1][1].inverse(grid) / n2
    diff = np.abs(z1 - z2)
    return {
        "sup": float(diff.max()),
        "mean": float(diff.mean()),
        "grid": grid,
        "n1": n1,
        "n2": n2,
    }


# -- independent finite-difference oracle ----------------------------------


def harmonic_measure_arc_fd(triple: DomainTriple, points, subdivision: int = 6):
    """Harmonic measure, from each query point, of the counterclockwise
    boundary arc from edge a to edge b of the union-of-squares domain.

    Independent of the zipper: solves the Dirichlet problem on a grid of
    spacing 1/subdivision with a five-point stencil, then interpolates.
    """
    poly = union_of_squares(triple)
    s = int(subdivision)
    mask, (x0, y0) = triple.mask()
    fine = np.kron(mask, np.ones((s, s), dtype=bool))
    H, W = fine.shape

    def cell_center(i, j):
        return (x0 - 0.5 + (j + 0.5) / s, y0 - 0.5 + (i + 0.5) / s)

    # classify each unit dual segment by its position along the polygon cycle:
    # arc1 is the counterclockwise run from a's midpoint to b's midpoint
    verts = poly.vertices
    a_mid = triple.a.midpoint
    b_mid = triple.b.midpoint
    jb = next(i for i, v in enumerate(verts) if tuple(v) == b_mid)

    def is_corner(v):
        return abs(v[0] - round(v[0])) > 0.25 and abs(v[1] - round(v[1])) > 0.25

    seg_flag = {}
    n_v = len(verts)
    for i in range(n_v):
        p = tuple(verts[i])
        q = tuple(verts[(i + 1) % n_v])
        if not (is_corner(p) and is_corner(q)):
            continue  # half segments at the marks handled separately
        key = (min(p, q), max(p, q))
        seg_flag[key] = i < jb
    # traversal direction through each marked midpoint, for the half splits
    a_dir = (verts[1][0] - a_mid[0], verts[1][1] - a_mid[1])
    b_next = verts[(jb + 1) % n_v]
    b_dir = (b_next[0] - b_mid[0], b_next[1] - b_mid[1])

    def crossing_value(bx, by, vertical):
        if vertical:  # crossing a vertical dual line
            X = round(bx * 2) / 2
            Ylo = math.floor(by - 0.5) + 0.5
            key = ((X, Ylo), (X, Ylo + 1))
            mid_here = (X, Ylo + 0.5)
            along = by - mid_here[1]
            axis = 1
        else:
            Y = round(by * 2) / 2
            Xlo = math.floor(bx - 0.5) + 0.5
            key = ((Xlo, Y), (Xlo + 1, Y))
            mid_here = (Xlo + 0.5, Y)
            along = bx - mid_here[0]
            axis = 0
        if mid_here == a_mid:
            # the forward (ccw) half of a's segment opens arc1
            return 1.0 if along * a_dir[axis] > 0 else 0.0
        if mid_here == b_mid:
            # arc1 ends at b's midpoint
            return 0.0 if along * b_dir[axis] > 0 else 1.0
        flag = seg_flag.get(key)
        if flag is None:
            raise RuntimeError(f"boundary crossing {key} not on polygon")
        return 1.0 if flag else 0.0

    idx = np.full(fine.shape, -1, dtype=np.int64)
    ii, jj = np.nonzero(fine)
    idx[ii, jj] = np.arange(len(ii))
    n = len(ii)
    rows, cols, data = [], [], []
    rhs = np.zeros(n)
    for c, (i, j) in enumerate(zip(ii.tolist(), jj.tolist())):
        diag = 0.0
        cx, cy = cell_center(i, j)
        for di, dj in ((0, 1), (0, -1), (1, 0), (-1, 0)):
            i2, j2 = i + di, j + dj
            if 0 <= i2 < H and 0 <= j2 < W and fine[i2, j2]:
                rows.append(c); cols.append(idx[i2, j2]); data.append(-1.0)
                diag += 1.0
            else:
                # ghost with value 2*val - u_c puts the Dirichlet value
                # exactly on the cell edge (the polygon boundary)
                val = crossing_value(cx + dj * 0.5 / s, cy + di * 0.5 / s, dj != 0)
                diag += 2.0
                rhs[c] += 2.0 * val
        rows.append(c); cols.append(c); data.append(diag)
    mat = sparse.csc_matrix((data, (rows, cols)), shape=(n, n))
    sol = splu(mat).solve(rhs)
    field = np.zeros(fine.shape)
    field[ii, jj] = sol
    out = []
    pts = np.atleast_1d(np.asarray(points, dtype=complex))
    for z in pts:
        gx = (z.real - (x0 - 0.5)) * s - 0.5
        gy = (z.imag - (y0 - 0.5)) * s - 0.5
        j0, i0 = int(math.floor(gx)), int(math.floor(gy))
        fx, fy = gx - j0, gy - i0
        v = (
            field[i0, j0] * (1 - fx) * (1 - fy)
            + field[i0, j0 + 1] * fx * (1 - fy)
            + field[i0 + 1, j0] * (1 - fx) * fy
            + field[i0 + 1, j0 + 1] * fx * fy
        )
        out.append(v)
    out = np.array(out)
    return out[0] if np.ndim(points) == 0 else out


def map_diagnostics_csv(m: HalfPlaneMap, points, path) -> None:
    pts = np.asarray(points, dtype=complex)
    w, dw = m(pts, derivative=True)
    rows = []
    for z, wi, di in zip(pts, w, dw):
        s = wi.imag / abs(wi)
        r = 2 * wi.imag / abs(di)
        rows.append([z.real, z.imag, wi.real, wi.imag, di.real, di.imag, s, r])
    np.savetxt(
        path, np.asarray(rows), delimiter=",",
        header="x,y,Re_F,Im_F,Re_dF,Im_dF,sine,radius", comments="",
    )
