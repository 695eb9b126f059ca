"""Loop-erased random walk: sampling, exact weights, and path observables.

The chordal LERW in a domain triple (A, a, b) is sampled by running the
random walk h-process conditioned to leave A through edge b, erasing loops
chronologically on the fly, and attaching the two boundary half-edges.
Small domains admit exact oracles: the loop-erased measure of a single SAW
via a product of Green's functions over shrinking domains, and full SAW
enumeration for visit probabilities.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from . import _kernels
from .grid import BoundaryEdge, DomainTriple
from .harmonic import HarmonicTable, HProcessLaw, build_harmonic_table, hprocess_law

__all__ = [
    "LatticePath",
    "Saw",
    "SawWeight",
    "FirstLastDecomposition",
    "PathNotInDomainError",
    "TooLargeForOracleError",
    "loop_erase",
    "sample_lerw",
    "prepare_sampler",
    "exact_saw_weight",
    "enumerate_saws",
    "exact_visit_probability",
    "first_last_decompose",
    "separation_statistic",
    "visit_counts",
    "maximal_visit_count",
    "bottleneck_event",
    "saw_to_csv",
]

ENUMERATION_LIMIT = 12


class PathNotInDomainError(ValueError):
    pass


class TooLargeForOracleError(ValueError):
    """Full SAW enumeration is only run on domains of at most 12 sites."""


def _as_vertices(path) -> np.ndarray:
    if isinstance(path, (LatticePath, Saw)):
        return path.vertices
    arr = np.asarray(path, dtype=np.int64)
    if arr.ndim != 2 or arr.shape[1] != 2:
        raise ValueError("path must be an (m, 2) array of lattice points")
    return arr


@dataclass
class LatticePath:
    """Nearest-neighbor walk on Z^2."""

    vertices: np.ndarray

    def __post_init__(self):
        self.vertices = _as_vertices(self.vertices)

    def __len__(self) -> int:
        return len(self.vertices)

    @property
    def steps(self) -> int:
        return len(self.vertices) - 1

    def validate(self):
        d = np.abs(np.diff(self.vertices, axis=0)).sum(axis=1)
        if len(d) and not np.all(d == 1):
            raise ValueError("vertices are not consecutive nearest neighbors")

    def reversed(self) -> "LatticePath":
        return LatticePath(self.vertices[::-1].copy())


@dataclass
class Saw(LatticePath):
    """Self-avoiding walk, optionally anchored at boundary edges."""

    start_edge: Optional[BoundaryEdge] = None
    end_edge: Optional[BoundaryEdge] = None

    def validate(self):
        super().validate()
        if len(np.unique(self.vertices, axis=0)) != len(self.vertices):
            raise ValueError("walk revisits a vertex")

    @property
    def interior_count(self) -> int:
        """Number of in-domain vertices when anchored (drops the two outer ends)."""
        n = len(self.vertices)
        return n - 2 if self.start_edge is not None else n

    def curve_times(self) -> np.ndarray:
        """Unit-speed timestamps: edge midpoints at integers, sites at half-integers."""
        n = len(self.vertices)
        if self.start_edge is None:
            return np.arange(n, dtype=float)
        return np.concatenate([[0.0], np.arange(n - 2) + 0.5, [float(n - 2)]])

    def points_complex(self) -> np.ndarray:
        pts = self.vertices[:, 0] + 1j * self.vertices[:, 1]
        if self.start_edge is not None:
            pts = pts.astype(complex)
            pts[0] = self.start_edge.midpoint_complex
            pts[-1] = self.end_edge.midpoint_complex
        return pts


def loop_erase(walk) -> Saw:
    """Chronological loop-erasure; self-avoiding input comes back unchanged."""
    verts = _as_vertices(walk)
    if len(verts) == 0:
        raise ValueError("empty walk")
    x0, y0 = verts.min(axis=0)
    x1, y1 = verts.max(axis=0)
    pos = np.full((x1 - x0 + 1, y1 - y0 + 1), -1, dtype=np.int32)
    out = np.empty_like(verts)
    n = _kernels.loop_erase_walk(verts, out, pos, x0, y0, x1 - x0 + 1)
    return Saw(out[:n].copy())


class _SamplerTables:
    """Precomputed transition tables for the h-process kernel."""

    __slots__ = ("nbr", "cum", "start", "sites", "a", "b", "law")

    def __init__(self, law: HProcessLaw):
        t = law.domain
        nbr = law.nbr
        h = law.h
        n = len(h)
        w = np.zeros((n, 4))
        for k in range(4):
            j = nbr[:, k]
            ok = j >= 0
            w[ok, k] = h[j[ok]]
        cum = np.cumsum(w, axis=1) / (4.0 * h[:, None])
        idx = {tuple(s): i for i, s in enumerate(t.sites.tolist())}
        ib = idx[t.b.inner]
        # only the target endpoint may terminate; guard others from rounding
        safe = np.ones(n, dtype=bool)
        safe[ib] = False
        cum[safe, 3] = 2.0
        self.nbr = nbr
        self.cum = cum
        self.start = idx[t.a.inner]
        self.sites = t.sites
        self.a = t.a
        self.b = t.b
        self.law = law


def prepare_sampler(arg) -> _SamplerTables:
    """Build (or fetch) kernel tables from a DomainTriple, table, or law."""
    if isinstance(arg, _SamplerTables):
        return arg
    if isinstance(arg, DomainTriple):
        arg = hprocess_law(build_harmonic_table(arg, dense=len(arg) <= 3000))
    if isinstance(arg, HarmonicTable):
        arg = hprocess_law(arg)
    return _SamplerTables(arg)


def sample_lerw(triple_or_tables, law=None, rng=None, *, seed=None, scratch=None) -> Saw:
    """One LERW from a to b, distributed as the normalized loop-erased measure.

    Accepts either (DomainTriple, HProcessLaw) per the module contract or a
    prepared sampler table object; `seed` (uint32) makes the draw
    reproducible without an rng object.
    """
    tab = prepare_sampler(law if law is not None else triple_or_tables)
    if seed is None:
        if rng is None:
            rng = np.random.default_rng()
        seed = int(rng.integers(0, 2**32 - 1))
    n = len(tab.cum)
    if scratch is None:
        scratch = (np.empty(n + 1, dtype=np.int32), np.full(n, -1, dtype=np.int32))
    path, pos = scratch
    n_saw, _ = _kernels.hprocess_lerw(tab.nbr, tab.cum, tab.start, np.uint32(seed), path, pos)
    verts = np.empty((n_saw + 2, 2), dtype=np.int64)
    verts[0] = tab.a.outer
    verts[1:-1] = tab.sites[path[:n_saw]]
    verts[-1] = tab.b.outer
    return Saw(verts, start_edge=tab.a, end_edge=tab.b)


@dataclass(frozen=True)
class SawWeight:
    """log of the loop-erased measure of one SAW."""

    log_weight: float

    @property
    def weight(self) -> float:
        return math.exp(self.log_weight)


def exact_saw_weight(triple: DomainTriple, saw) -> SawWeight:
    """Loop-erased measure of a crossing SAW: 4^(-edges) times the product of
    Green's functions at each vertex in the successively slit domain.

    Exact up to floating point; cost is one dense Green solve plus a rank-one
    downdate per path vertex, so this is meant for domains of a few hundred
    sites.
    """
    verts = _as_vertices(saw)
    t = triple
    if tuple(verts[0]) != t.a.outer or tuple(verts[-1]) != t.b.outer:
        raise PathNotInDomainError("walk does not join edge a to edge b")
    inner = [tuple(v) for v in verts[1:-1]]
    if inner[0] != t.a.inner or inner[-1] != t.b.inner:
        raise PathNotInDomainError("walk does not traverse the marked edges")
    for v in inner:
        if not t.contains(v):
            raise PathNotInDomainError(f"vertex {v} outside the domain")
    if len(set(inner)) != len(inner):
        raise ValueError("walk is not self-avoiding")
    table = build_harmonic_table(t, dense=True)
    G = table.green.copy()
    idx = {tuple(s): i for i, s in enumerate(t.sites.tolist())}
    log_w = -(len(verts) - 1) * math.log(4.0)
    alive = np.ones(len(G), dtype=bool)
    for v in inner:
        i = idx[v]
        g = G[i, i]
        if g <= 0:
            raise PathNotInDomainError(f"vertex {v} unreachable in slit domain")
        log_w += math.log(g)
        col = G[:, i].copy()
        G -= np.outer(col, col) / g
        alive[i] = False
        G[i, :] = 0.0
        G[:, i] = 0.0
    return SawWeight(log_weight=log_w)


def enumerate_saws(triple: DomainTriple) -> list[Saw]:
    """All crossing SAWs from edge a to edge b (oracle mode, |A| <= 12)."""
    t = triple
    if len(t) > ENUMERATION_LIMIT:
        raise TooLargeForOracleError(f"|A| = {len(t)} exceeds {ENUMERATION_LIMIT}")
    target = t.b.inner
    out = []
    path = [t.a.inner]
    used = {t.a.inner}

    def extend():
        cur = path[-1]
        if cur == target:
            verts = np.array([t.a.outer] + path + [t.b.outer], dtype=np.int64)
            out.append(Saw(verts, start_edge=t.a, end_edge=t.b))
            # a SAW may continue through b+ and come back only by revisiting,
            # so reaching b+ always terminates this branch
            return
        for dx, dy in ((1, 0), (-1, 0), (0, 1), (0, -1)):
            nxt = (cur[0] + dx, cur[1] + dy)
            if nxt in used or not t.contains(nxt):
                continue
            path.append(nxt)
            used.add(nxt)
            extend()
            path.pop()
            used.remove(nxt)

    extend()
    return out


def exact_visit_probability(triple: DomainTriple, site) -> float:
    """P{site on the LERW} by full enumeration of crossing SAWs."""
    site = tuple(site)
    if not triple.contains(site):
        return 0.0
    total = 0.0
    hit = 0.0
    for saw in enumerate_saws(triple):
        w = exact_saw_weight(triple, saw).weight
        total += w
        if any(tuple(v) == site for v in saw.vertices[1:-1]):
            hit += w
    if total <= 0:
        raise PathNotInDomainError("no crossing SAW exists")
    return hit / total


@dataclass
class FirstLastDecomposition:
    """Split of a crossing SAW at its first and last visits to the disk C_r."""

    eta1: Saw
    eta_tilde: Saw
    eta2: Saw
    inner_triple: DomainTriple
    r: float

    def reassembled(self) -> np.ndarray:
        return np.concatenate(
            [self.eta1.vertices, self.eta_tilde.vertices[1:], self.eta2.vertices[1:]]
        )


def first_last_decompose(saw: Saw, r: float, triple: DomainTriple) -> Optional[FirstLastDecomposition]:
    """Decompose at the first visits of the path and its reversal to C_r.

    Returns None when the path never enters the open disk of radius r.  The
    inner triple is the component containing the origin of the domain minus
    the two outer arms, with the two first-visit sites retained as the new
    marked edge endpoints.
    """
    verts = saw.vertices
    fwd, bwd = _kernels.first_radius_indices(verts, float(r))
    if fwd < 0:
        return None
    a_star = tuple(verts[fwd])
    b_star = tuple(verts[bwd])
    removed = {tuple(v) for v in verts[1:fwd]} | {tuple(v) for v in verts[bwd + 1 : -1]}
    removed.discard(a_star)
    removed.discard(b_star)
    keep_mask = np.array([tuple(s) not in removed for s in triple.sites.tolist()], dtype=bool)
    rest = triple.sites[keep_mask]
    from scipy import ndimage

    from .grid import _CROSS, _occupancy

    mask, (x0, y0) = _occupancy(rest)
    labels, _ = ndimage.label(mask, structure=_CROSS)
    lab0 = labels[-y0, -x0]
    if lab0 == 0:
        raise PathNotInDomainError("origin not in the inner component")
    iy, jx = np.nonzero(labels == lab0)
    comp = np.column_stack([jx + x0, iy + y0])
    a_r = BoundaryEdge(inner=a_star, outer=tuple(verts[fwd - 1]))
    b_r = BoundaryEdge(inner=b_star, outer=tuple(verts[bwd + 1]))
    inner = DomainTriple(comp, a_r, b_r)
    return FirstLastDecomposition(
        eta1=Saw(verts[: fwd + 1].copy(), start_edge=saw.start_edge),
        eta_tilde=Saw(verts[fwd : bwd + 1].copy()),
        eta2=Saw(verts[bwd:].copy(), end_edge=saw.end_edge),
        inner_triple=inner,
        r=float(r),
    )


def separation_statistic(decomp: Optional[FirstLastDecomposition], refine: int = 0) -> float:
    """Sine separation of the inner configuration; 0 when the disk was missed."""
    if decomp is None:
        return 0.0
    from .conformal import disk_normalized_sine

    return disk_normalized_sine(decomp.inner_triple, refine=refine)


def visit_counts(saw: Saw, radii=(), centers=((0, 0),)) -> dict:
    """Step count T, ball counts T(r; center), and the doubled-ball maximal
    statistic over a sublattice of spacing ceil(r) for each radius."""
    verts = saw.vertices[1:-1] if saw.start_edge is not None else saw.vertices
    out = {"T": len(verts), "Tr": {}, "Tbar": {}}
    for r in radii:
        for c in centers:
            out["Tr"][(float(r), tuple(c))] = int(
                _kernels.ball_visit_count(verts, int(c[0]), int(c[1]), float(r))
            )
        out["Tbar"][float(r)] = maximal_visit_count(saw, r)
    return out


def maximal_visit_count(saw: Saw, radius: float) -> int:
    """max over sublattice centers (spacing ceil(r)) of visits within 2r."""
    verts = saw.vertices[1:-1] if saw.start_edge is not None else saw.vertices
    spacing = max(1, int(math.ceil(radius)))
    return int(_kernels.maximal_ball_count(verts, spacing, int(math.ceil(2 * radius))))


def bottleneck_event(saw: Saw, r: float, R: float) -> bool:
    """True when some interior vertex reaches radius R and a later interior
    vertex returns inside radius r."""
    if not r < R:
        raise ValueError("need r < R")
    verts = saw.vertices[1:-1]
    return bool(_kernels.bottleneck_flag(verts, float(r), float(R)))


def saw_to_csv(saw: Saw, path) -> None:
    arr = np.column_stack([np.arange(len(saw.vertices)), saw.vertices])
    np.savetxt(path, arr, fmt="%d", delimiter=",", header="index,x,y", comments="")
