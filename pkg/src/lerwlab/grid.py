"""Lattice geometry: discrete domains with marked boundary edges.

A domain is a finite, simply connected subset A of Z^2 together with two
boundary edges a, b (each an edge of Z^2 with exactly one endpoint in A,
identified with its midpoint).  The union of the closed unit squares
centered at the sites of A is a Jordan domain; its boundary polygon lives
on the dual lattice and carries the marked edge midpoints.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Callable, Iterable, Sequence

import numpy as np
from scipy import ndimage

__all__ = [
    "Site",
    "BoundaryEdge",
    "DomainTriple",
    "UnionOfSquares",
    "AnalyticShape",
    "EmptyDomainError",
    "DegenerateMarksError",
    "PathExhaustsDomainError",
    "lattice_disk",
    "approximate_domain",
    "check_simply_connected",
    "remove_initial_segment",
    "refine_triple",
    "union_of_squares",
    "boundary_edges",
    "nearest_boundary_edge",
    "disk_triple",
    "triple_to_json",
    "triple_from_json",
    "polygon_to_csv",
]

Site = tuple[int, int]

NEIGHBOR_STEPS = ((1, 0), (-1, 0), (0, 1), (0, -1))


class EmptyDomainError(ValueError):
    """No lattice square fits inside the scaled shape."""


class DegenerateMarksError(ValueError):
    """The two requested marks resolve to the same boundary edge."""


class PathExhaustsDomainError(ValueError):
    """Removing a path prefix disconnects or deletes the target edge."""


@dataclass(frozen=True)
class BoundaryEdge:
    """Edge of Z^2 crossing the domain boundary, oriented outside -> inside."""

    inner: Site
    outer: Site

    def __post_init__(self):
        dx = self.inner[0] - self.outer[0]
        dy = self.inner[1] - self.outer[1]
        if abs(dx) + abs(dy) != 1:
            raise ValueError(f"edge endpoints not nearest neighbors: {self}")

    @property
    def midpoint(self) -> tuple[float, float]:
        return (
            0.5 * (self.inner[0] + self.outer[0]),
            0.5 * (self.inner[1] + self.outer[1]),
        )

    @property
    def midpoint_complex(self) -> complex:
        m = self.midpoint
        return complex(m[0], m[1])


def _as_site_array(sites: Iterable[Site] | np.ndarray) -> np.ndarray:
    arr = np.asarray(sorted(map(tuple, sites)), dtype=np.int64)
    if arr.ndim != 2 or arr.shape[1] != 2:
        raise ValueError("sites must be an iterable of (x, y) pairs")
    return arr


def _occupancy(sites: np.ndarray, pad: int = 1):
    """Bool(H, W) mask plus the (x0, y0) offset of its [0, 0] cell."""
    x0, y0 = sites.min(axis=0) - pad
    x1, y1 = sites.max(axis=0) + pad
    mask = np.zeros((y1 - y0 + 1, x1 - x0 + 1), dtype=bool)
    mask[sites[:, 1] - y0, sites[:, 0] - x0] = True
    return mask, (int(x0), int(y0))


_CROSS = ndimage.generate_binary_structure(2, 1)  # 4-adjacency


class DomainTriple:
    """Finite simply connected A in Z^2 with marked boundary edges a, b."""

    __slots__ = ("sites", "a", "b", "_mask", "_offset", "_site_set")

    def __init__(
        self,
        sites: Iterable[Site] | np.ndarray,
        a: BoundaryEdge,
        b: BoundaryEdge,
        validate: bool = True,
    ):
        self.sites = _as_site_array(sites)
        self.a = a
        self.b = b
        self._mask, self._offset = _occupancy(self.sites)
        self._site_set = None
        if validate:
            self._validate()

    def _validate(self):
        if len(self.sites) == 0:
            raise ValueError("empty site set")
        if not check_simply_connected(self.sites):
            raise ValueError("site set is not simply connected")
        if self.a.outer == self.b.outer:
            raise ValueError("marked edges share their outer endpoint")
        for e in (self.a, self.b):
            if not self.contains(e.inner) or self.contains(e.outer):
                raise ValueError(f"{e} is not a boundary edge of the domain")

    # -- basic queries ----------------------------------------------------

    def __len__(self) -> int:
        return len(self.sites)

    def contains(self, site: Site) -> bool:
        x0, y0 = self._offset
        j, i = site[0] - x0, site[1] - y0
        if i < 0 or j < 0 or i >= self._mask.shape[0] or j >= self._mask.shape[1]:
            return False
        return bool(self._mask[i, j])

    @property
    def site_set(self) -> frozenset:
        if self._site_set is None:
            self._site_set = frozenset(map(tuple, self.sites.tolist()))
        return self._site_set

    def mask(self) -> tuple[np.ndarray, tuple[int, int]]:
        """Occupancy mask (copy) and the lattice coordinates of cell [0, 0]."""
        return self._mask.copy(), self._offset

    def index_grid(self) -> tuple[np.ndarray, tuple[int, int]]:
        """int32 grid mapping each in-domain cell to its row in `sites`, -1 outside."""
        x0, y0 = self._offset
        grid = np.full(self._mask.shape, -1, dtype=np.int32)
        grid[self.sites[:, 1] - y0, self.sites[:, 0] - x0] = np.arange(
            len(self.sites), dtype=np.int32
        )
        return grid, (x0, y0)

    def content_hash(self) -> str:
        import hashlib

        h = hashlib.sha256()
        h.update(self.sites.tobytes())
        for e in (self.a, self.b):
            h.update(np.asarray(e.inner + e.outer, dtype=np.int64).tobytes())
        return h.hexdigest()[:16]

    def __repr__(self):
        return (
            f"DomainTriple(|A|={len(self.sites)}, a={self.a.midpoint}, "
            f"b={self.b.midpoint})"
        )


def lattice_disk(r: float) -> np.ndarray:
    """Sites of the discrete open disk C_r = {z in Z^2 : |z| < r}."""
    if r < 1:
        raise ValueError("radius must be >= 1")
    m = int(math.ceil(r))
    xs, ys = np.meshgrid(np.arange(-m, m + 1), np.arange(-m, m + 1))
    keep = xs * xs + ys * ys < r * r
    return _as_site_array(np.column_stack([xs[keep], ys[keep]]))


def check_simply_connected(sites: Iterable[Site] | np.ndarray) -> bool:
    """True iff the sites are 4-connected and their complement is 4-connected.

    The complement is taken in Z^2 plus a point at infinity, realized by a
    one-cell padding collar around the bounding box.
    """
    arr = _as_site_array(sites)
    if len(arr) == 0:
        return False
    mask, _ = _occupancy(arr, pad=1)
    _, n_in = ndimage.label(mask, structure=_CROSS)
    if n_in != 1:
        return False
    _, n_out = ndimage.label(~mask, structure=_CROSS)
    return n_out == 1


def boundary_edges(triple_or_sites) -> list[BoundaryEdge]:
    """All boundary edges of a site set, oriented outside -> inside."""
    if isinstance(triple_or_sites, DomainTriple):
        arr = triple_or_sites.sites
    else:
        arr = _as_site_array(triple_or_sites)
    in_set = set(map(tuple, arr.tolist()))
    out = []
    for x, y in arr.tolist():
        for dx, dy in NEIGHBOR_STEPS:
            nb = (x + dx, y + dy)
            if nb not in in_set:
                out.append(BoundaryEdge(inner=(x, y), outer=nb))
    return out


def nearest_boundary_edge(edges: Sequence[BoundaryEdge], target: complex) -> BoundaryEdge:
    """Boundary edge whose midpoint is closest to `target`.

    Ties are broken deterministically by (distance, angle of midpoint), so a
    rerun on the same domain always picks the same edge.
    """

    def key(e: BoundaryEdge):
        m = e.midpoint_complex
        return (abs(m - target), math.atan2(m.imag, m.real), m.real, m.imag)

    return min(edges, key=key)


@dataclass(frozen=True)
class AnalyticShape:
    """Bounded simply connected shape containing 0, with two marked boundary points.

    kind 'disk': params = (radius,); 'rectangle': params = (half_w, half_h);
    'polygon': params = convex vertex list; 'parametric': boundary(theta)
    callback sampled into a convex polygon.
    """

    kind: str
    params: tuple
    mark_a: complex
    mark_b: complex

    def __post_init__(self):
        if self.mark_a == self.mark_b:
            raise DegenerateMarksError("marked boundary points coincide")

    @staticmethod
    def disk(radius: float = 1.0, mark_a: complex = None, mark_b: complex = None) -> "AnalyticShape":
        a = radius * (1 + 0j) if mark_a is None else mark_a
        b = radius * (-1 + 0j) if mark_b is None else mark_b
        return AnalyticShape("disk", (float(radius),), a, b)

    @staticmethod
    def rectangle(half_w: float, half_h: float, mark_a: complex = None, mark_b: complex = None) -> "AnalyticShape":
        a = complex(half_w, 0.0) if mark_a is None else mark_a
        b = complex(-half_w, 0.0) if mark_b is None else mark_b
        return AnalyticShape("rectangle", (float(half_w), float(half_h)), a, b)

    @staticmethod
    def polygon(vertices: Sequence[complex], mark_a: complex, mark_b: complex) -> "AnalyticShape":
        verts = list(map(complex, vertices))
        signed2 = sum(
            (verts[k].real * verts[(k + 1) % len(verts)].imag
             - verts[(k + 1) % len(verts)].real * verts[k].imag)
            for k in range(len(verts))
        )
        if signed2 < 0:
            verts.reverse()
        return AnalyticShape("polygon", tuple(verts), mark_a, mark_b)

    @staticmethod
    def parametric(boundary: Callable[[float], complex], mark_a: complex, mark_b: complex, samples: int = 720) -> "AnalyticShape":
        verts = tuple(boundary(2 * math.pi * k / samples) for k in range(samples))
        return AnalyticShape("polygon", verts, mark_a, mark_b)

    def contains_squares(self, centers: np.ndarray, scale: float) -> np.ndarray:
        """Mask of lattice centers whose closed unit square fits inside scale*shape."""
        cx = centers[:, 0].astype(float)
        cy = centers[:, 1].astype(float)
        if self.kind == "disk":
            (radius,) = self.params
            # farthest corner of the square from the origin
            far = np.hypot(np.abs(cx) + 0.5, np.abs(cy) + 0.5)
            return far < scale * radius
        if self.kind == "rectangle":
            hw, hh = self.params
            return (np.abs(cx) + 0.5 < scale * hw) & (np.abs(cy) + 0.5 < scale * hh)
        if self.kind == "polygon":
            verts = np.asarray(self.params, dtype=complex) * scale
            ok = np.ones(len(centers), dtype=bool)
            # convex polygon: square inside iff all 4 corners strictly inside
            # every half-plane spanned by consecutive (CCW) vertices
            n = len(verts)
            for k in range(n):
                p, q = verts[k], verts[(k + 1) % n]
                ex, ey = (q - p).real, (q - p).imag
                for sx in (-0.5, 0.5):
                    for sy in (-0.5, 0.5):
                        cross = ex * (cy + sy - p.imag) - ey * (cx + sx - p.real)
                        ok &= cross > 0
            return ok
        raise ValueError(f"unknown shape kind {self.kind!r}")


def approximate_domain(shape: AnalyticShape, N: int) -> DomainTriple:
    """Lattice approximation of N*shape: the component of {z : square(z) in N*shape}
    containing the origin, with boundary edges nearest the scaled marks."""
    if N <= 0:
        raise ValueError("N must be positive")
    # generous candidate box around the scaled shape
    if shape.kind == "disk":
        lim = int(math.ceil(N * shape.params[0])) + 2
    elif shape.kind == "rectangle":
        lim = int(math.ceil(N * max(shape.params))) + 2
    else:
        lim = int(math.ceil(N * max(abs(v) for v in shape.params))) + 2
    xs, ys = np.meshgrid(np.arange(-lim, lim + 1), np.arange(-lim, lim + 1))
    centers = np.column_stack([xs.ravel(), ys.ravel()])
    keep = shape.contains_squares(centers, float(N))
    if not keep.any():
        raise EmptyDomainError(f"no unit square fits inside {N} * {shape.kind}")
    sites = centers[keep]
    mask, (x0, y0) = _occupancy(sites)
    labels, _ = ndimage.label(mask, structure=_CROSS)
    if not (0 <= -y0 < mask.shape[0] and 0 <= -x0 < mask.shape[1]):
        raise EmptyDomainError("origin square does not fit inside the scaled shape")
    lab0 = labels[-y0, -x0]
    if lab0 == 0:
        raise EmptyDomainError("origin square does not fit inside the scaled shape")
    iy, jx = np.nonzero(labels == lab0)
    comp = np.column_stack([jx + x0, iy + y0])
    edges = boundary_edges(comp)
    ea = nearest_boundary_edge(edges, N * shape.mark_a)
    eb = nearest_boundary_edge(edges, N * shape.mark_b)
    if ea == eb or ea.outer == eb.outer:
        raise DegenerateMarksError("marks resolve to overlapping boundary edges")
    return DomainTriple(comp, ea, eb)


def remove_initial_segment(triple: DomainTriple, saw, j: int) -> DomainTriple:
    """Domain left after a crossing SAW has taken j steps inside A.

    The first j in-domain vertices of the walk are removed, the new start
    edge points from the j-th removed vertex to the walk's next vertex, and
    the remaining domain is the component of the target edge b.
    """
    verts = saw.vertices if hasattr(saw, "vertices") else np.asarray(saw, dtype=np.int64)
    if j == 0:
        return triple
    if j + 1 >= len(verts):
        raise ValueError("walk too short for requested prefix length")
    if tuple(verts[0]) != triple.a.outer or tuple(verts[1]) != triple.a.inner:
        raise ValueError("walk does not start at edge a")
    removed = [tuple(v) for v in verts[1 : j + 1]]
    tip = tuple(verts[j + 1])
    b_in = triple.b.inner
    if b_in in removed or tip == triple.b.outer:
        raise PathExhaustsDomainError("prefix consumes the target edge")
    removed_set = set(removed)
    keep = np.array([tuple(s) not in removed_set for s in triple.sites], dtype=bool)
    rest = triple.sites[keep]
    if len(rest) == 0:
        raise PathExhaustsDomainError("prefix consumes the whole domain")
    mask, (x0, y0) = _occupancy(rest)
    labels, _ = ndimage.label(mask, structure=_CROSS)
    lab_b = labels[b_in[1] - y0, b_in[0] - x0]
    if lab_b == 0:
        raise PathExhaustsDomainError("target edge removed from domain")
    if labels[tip[1] - y0, tip[0] - x0] != lab_b:
        raise PathExhaustsDomainError("tip disconnected from target edge")
    iy, jx = np.nonzero(labels == lab_b)
    comp = np.column_stack([jx + x0, iy + y0])
    new_a = BoundaryEdge(inner=tip, outer=removed[-1])
    return DomainTriple(comp, new_a, triple.b)


# -- union of squares boundary -------------------------------------------

# For a site with a missing neighbor in direction d, the dual boundary
# segment crossing that edge, directed so the domain lies on the left
# (counterclockwise traversal).  Offsets are relative to the site center.
_SEGMENT_FOR_MISSING = {
    (1, 0): ((0.5, -0.5), (0.5, 0.5)),
    (0, 1): ((0.5, 0.5), (-0.5, 0.5)),
    (-1, 0): ((-0.5, 0.5), (-0.5, -0.5)),
    (0, -1): ((-0.5, -0.5), (0.5, -0.5)),
}


@dataclass(frozen=True)
class UnionOfSquares:
    """Jordan polygon bounding the union of unit squares over the sites of A.

    `vertices` is the closed counterclockwise vertex cycle (first point
    repeated at the end is omitted), starting at the midpoint of edge a.
    """

    vertices: np.ndarray
    source: DomainTriple

    @property
    def area(self) -> float:
        v = self.vertices
        x, y = v[:, 0], v[:, 1]
        return 0.5 * float(np.sum(x * np.roll(y, -1) - np.roll(x, -1) * y))

    @property
    def perimeter(self) -> float:
        v = self.vertices
        d = v - np.roll(v, 1, axis=0)
        return float(np.hypot(d[:, 0], d[:, 1]).sum())

    def vertices_complex(self) -> np.ndarray:
        return self.vertices[:, 0] + 1j * self.vertices[:, 1]


def union_of_squares(triple: DomainTriple) -> UnionOfSquares:
    """Trace the boundary polygon of the union-of-squares domain of A.

    Vertices are the dual-lattice corners; the marked edge midpoints a and b
    are inserted as explicit vertices so downstream maps can pin them.
    """
    in_set = triple.site_set
    # directed segments on the half-integer dual lattice, keyed by start
    nxt = {}
    for x, y in triple.sites.tolist():
        for d, (p, q) in _SEGMENT_FOR_MISSING.items():
            if (x + d[0], y + d[1]) not in in_set:
                start = (x + p[0], y + p[1])
                end = (x + q[0], y + q[1])
                if start in nxt:
                    raise ValueError("boundary is not a simple cycle")
                nxt[start] = end
    a_mid = triple.a.midpoint
    b_mid = triple.b.midpoint
    start = None
    for s, e in nxt.items():
        if (0.5 * (s[0] + e[0]), 0.5 * (s[1] + e[1])) == a_mid:
            start = s
            break
    if start is None:
        raise ValueError("edge a midpoint not on the boundary polygon")
    cycle = [a_mid]
    cur = start
    total = len(nxt)
    for _ in range(total):
        end = nxt[cur]
        mid = (0.5 * (cur[0] + end[0]), 0.5 * (cur[1] + end[1]))
        if mid == b_mid:
            cycle.append(b_mid)
        cycle.append(end)
        cur = end
    if cur != start:
        raise ValueError("boundary tracing did not close")
    # cycle ends at the corner preceding a_mid; closure back to a_mid is implicit
    verts = np.asarray(cycle, dtype=float)
    out = UnionOfSquares(vertices=verts, source=triple)
    if out.area <= 0:
        raise ValueError("boundary polygon is not counterclockwise")
    return out


def refine_triple(triple: DomainTriple) -> DomainTriple:
    """Exact factor-two rescaling: each site becomes a 2x2 block, so the new
    union-of-squares domain is the old one scaled by 2 (up to translation by
    (1/2, 1/2)).  Marks map to the nearest refined boundary edge."""
    s = triple.sites
    blocks = np.concatenate(
        [2 * s + np.array(off) for off in ((0, 0), (1, 0), (0, 1), (1, 1))]
    )
    edges = boundary_edges(blocks)

    def scaled_mark(e: BoundaryEdge) -> complex:
        m = e.midpoint_complex
        return 2 * m + complex(0.5, 0.5)

    ea = nearest_boundary_edge(edges, scaled_mark(triple.a))
    eb = nearest_boundary_edge(edges, scaled_mark(triple.b))
    return DomainTriple(blocks, ea, eb)


def disk_triple(r: float, angle_a: float = 0.0, angle_b: float = math.pi) -> DomainTriple:
    """Discrete disk C_r with boundary edges nearest the two circle angles."""
    sites = lattice_disk(r)
    edges = boundary_edges(sites)
    ta = r * complex(math.cos(angle_a), math.sin(angle_a))
    tb = r * complex(math.cos(angle_b), math.sin(angle_b))
    ea = nearest_boundary_edge(edges, ta)
    eb = nearest_boundary_edge(edges, tb)
    if ea == eb or ea.outer == eb.outer:
        raise DegenerateMarksError(f"angles {angle_a}, {angle_b} give overlapping edges")
    return DomainTriple(sites, ea, eb)


# -- serialization ---------------------------------------------------------


def triple_to_json(triple: DomainTriple) -> str:
    obj = {
        "sites": triple.sites.tolist(),
        "a": {"inner": list(triple.a.inner), "outer": list(triple.a.outer)},
        "b": {"inner": list(triple.b.inner), "outer": list(triple.b.outer)},
    }
    return json.dumps(obj)


def triple_from_json(text: str) -> DomainTriple:
    obj = json.loads(text)

    def edge(d):
        return BoundaryEdge(inner=tuple(d["inner"]), outer=tuple(d["outer"]))

    return DomainTriple(obj["sites"], edge(obj["a"]), edge(obj["b"]))


def polygon_to_csv(poly: UnionOfSquares, path) -> None:
    np.savetxt(path, poly.vertices, delimiter=",", header="x,y", comments="")
