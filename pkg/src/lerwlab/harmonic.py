"""Exact potential theory for simple random walk on a lattice domain.

Green's function G_A(z, w) = expected visits to w before leaving A, exit
kernels over boundary edges, the boundary Poisson kernel H(a, b) =
G_A(a+, b+)/16, and the Doob h-process conditioned to leave through a
given boundary edge.  Dense solves back small domains (and the exact
oracles); large domains use a sparse factorization with Green columns
computed on demand.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from scipy import sparse
from scipy.sparse.linalg import splu

from .grid import BoundaryEdge, DomainTriple, boundary_edges

__all__ = [
    "HarmonicTable",
    "HProcessLaw",
    "SolverFailureError",
    "UnreachableTargetError",
    "neighbor_table",
    "build_harmonic_table",
    "boundary_poisson",
    "hprocess_law",
    "escape_probability",
    "save_table_cache",
    "load_table_cache",
]

DENSE_LIMIT = 3000


class SolverFailureError(RuntimeError):
    """Linear solve for the Green's function failed to converge."""


class UnreachableTargetError(ValueError):
    """Conditioning edge has zero harmonic measure from the start."""


def neighbor_table(triple: DomainTriple) -> np.ndarray:
    """(n, 4) array of neighbor site indices in sites order, -1 off-domain.

    Column order follows grid.NEIGHBOR_STEPS: +x, -x, +y, -y.
    """
    grid, (x0, y0) = triple.index_grid()
    s = triple.sites
    n = len(s)
    nbr = np.full((n, 4), -1, dtype=np.int32)
    H, W = grid.shape
    for k, (dx, dy) in enumerate(((1, 0), (-1, 0), (0, 1), (0, -1))):
        jj = s[:, 0] - x0 + dx
        ii = s[:, 1] - y0 + dy
        ok = (ii >= 0) & (ii < H) & (jj >= 0) & (jj < W)
        nbr[ok, k] = grid[ii[ok], jj[ok]]
    return nbr


def _killed_laplacian(nbr: np.ndarray) -> sparse.csc_matrix:
    """I - P for the walk killed on leaving the domain."""
    n = len(nbr)
    rows, cols = np.nonzero(nbr >= 0)
    data = np.full(len(rows), -0.25)
    mat = sparse.coo_matrix(
        (np.concatenate([np.ones(n), data]),
         (np.concatenate([np.arange(n), rows]),
          np.concatenate([np.arange(n), nbr[rows, cols]]))),
        shape=(n, n),
    )
    return mat.tocsc()


@dataclass
class HarmonicTable:
    """Green's function and boundary exit data for one domain.

    `green` is the full symmetric matrix for small domains and None for
    large ones, in which case columns are solved on demand through the
    cached sparse factorization.
    """

    domain: DomainTriple
    green: Optional[np.ndarray]
    edges: list
    _lu: object = field(default=None, repr=False)
    _index: dict = field(default=None, repr=False)
    _columns: dict = field(default_factory=dict, repr=False)

    def site_index(self, site) -> int:
        if self._index is None:
            self._index = {tuple(s): i for i, s in enumerate(self.domain.sites.tolist())}
        return self._index[tuple(site)]

    def green_column(self, w) -> np.ndarray:
        """G_A(., w) over all sites."""
        iw = self.site_index(w)
        if self.green is not None:
            return self.green[:, iw]
        col = self._columns.get(iw)
        if col is None:
            rhs = np.zeros(len(self.domain))
            rhs[iw] = 1.0
            col = self._lu.solve(rhs)
            self._columns[iw] = col
        return col

    def green_at(self, z, w) -> float:
        return float(self.green_column(w)[self.site_index(z)])

    def hvector(self, edge: BoundaryEdge) -> np.ndarray:
        """H_A(., edge): probability the walk exits A through `edge`."""
        return 0.25 * self.green_column(edge.inner)

    def exit_kernel(self) -> np.ndarray:
        """(n, n_edges) matrix of exit probabilities over boundary edges."""
        cols = [self.hvector(e) for e in self.edges]
        return np.column_stack(cols)


def build_harmonic_table(triple: DomainTriple, dense: Optional[bool] = None) -> HarmonicTable:
    n = len(triple)
    nbr = neighbor_table(triple)
    if dense is None:
        dense = n <= DENSE_LIMIT
    edges = boundary_edges(triple)
    if dense:
        P = np.zeros((n, n))
        rows, cols = np.nonzero(nbr >= 0)
        P[rows, nbr[rows, cols]] = 0.25
        try:
            green = np.linalg.solve(np.eye(n) - P, np.eye(n))
        except np.linalg.LinAlgError as exc:
            raise SolverFailureError(str(exc)) from exc
        green = 0.5 * (green + green.T)
        return HarmonicTable(domain=triple, green=green, edges=edges)
    lap = _killed_laplacian(nbr)
    try:
        lu = splu(lap)
    except RuntimeError as exc:
        raise SolverFailureError(str(exc)) from exc
    return HarmonicTable(domain=triple, green=None, edges=edges, _lu=lu)


def boundary_poisson(table: HarmonicTable) -> float:
    """Boundary Poisson kernel H(a, b) = G_A(a+, b+) / 16."""
    t = table.domain
    return table.green_at(t.a.inner, t.b.inner) / 16.0


@dataclass
class HProcessLaw:
    """Walk conditioned to leave the domain through the target edge.

    From z the walk moves to an in-domain neighbor w with probability
    h(w) / (4 h(z)); at the target's inner endpoint it additionally exits
    through the edge with probability 1 / (4 h(z)).
    """

    domain: DomainTriple
    target: BoundaryEdge
    h: np.ndarray
    nbr: np.ndarray

    def transition_row(self, site) -> tuple[np.ndarray, float]:
        """(probabilities over the 4 neighbor slots, exit probability)."""
        idx = {tuple(s): i for i, s in enumerate(self.domain.sites.tolist())}
        i = idx[tuple(site)]
        hz = self.h[i]
        probs = np.zeros(4)
        for k in range(4):
            j = self.nbr[i, k]
            if j >= 0:
                probs[k] = self.h[j] / (4 * hz)
        exit_p = 0.0
        if tuple(site) == self.target.inner:
            exit_p = 1.0 / (4 * hz)
        return probs, exit_p


def hprocess_law(table: HarmonicTable) -> HProcessLaw:
    t = table.domain
    h = table.hvector(t.b)
    ia = table.site_index(t.a.inner)
    if h[ia] <= 0:
        raise UnreachableTargetError("target edge unreachable from start edge")
    return HProcessLaw(domain=t, target=t.b, h=h, nbr=neighbor_table(t))


def escape_probability(r: float, eta: np.ndarray) -> float:
    """Probability that a walk from the origin reaches {|z| >= r} before
    revisiting the given self-avoiding path.

    `eta` is the vertex list of a SAW started at 0; vertices on or outside
    the circle of radius r are treated like the rest of the path (the walk
    loses by stepping on them, wins by reaching any other site off C_r).
    The first step of the walk is uniform over the four neighbors of 0.
    """
    eta = np.asarray(eta, dtype=np.int64).reshape(-1, 2)
    if tuple(eta[0]) != (0, 0):
        raise ValueError("path must start at the origin")
    blocked = set(map(tuple, eta.tolist()))
    m = int(np.ceil(r))
    xs, ys = np.meshgrid(np.arange(-m, m + 1), np.arange(-m, m + 1))
    inside = (xs * xs + ys * ys < r * r).ravel()
    coords = np.column_stack([xs.ravel(), ys.ravel()])
    free = [tuple(c) for c, keep in zip(coords.tolist(), inside) if keep and tuple(c) not in blocked]
    index = {c: i for i, c in enumerate(free)}
    n = len(free)
    if n == 0:
        return 0.0
    rows, cols, data = [], [], []
    rhs = np.zeros(n)
    for c, i in index.items():
        rows.append(i); cols.append(i); data.append(1.0)
        for dx, dy in ((1, 0), (-1, 0), (0, 1), (0, -1)):
            w = (c[0] + dx, c[1] + dy)
            if w in blocked:
                continue
            if w in index:
                rows.append(i); cols.append(index[w]); data.append(-0.25)
            elif w[0] * w[0] + w[1] * w[1] >= r * r:
                rhs[i] += 0.25
    mat = sparse.csc_matrix((data, (rows, cols)), shape=(n, n))
    q = splu(mat).solve(rhs)
    total = 0.0
    for dx, dy in ((1, 0), (-1, 0), (0, 1), (0, -1)):
        w = (dx, dy)
        if w in blocked:
            continue
        if w in index:
            total += 0.25 * q[index[w]]
        elif dx * dx + dy * dy >= r * r:
            total += 0.25
    return float(min(1.0, max(0.0, total)))


# -- binary cache ----------------------------------------------------------

_MAGIC = b"LWHT"
_VERSION = 1


def save_table_cache(table: HarmonicTable, path) -> None:
    """Dense Green matrix cache keyed by the domain content hash."""
    if table.green is None:
        raise ValueError("only dense tables are cached")
    n = len(table.domain)
    with open(path, "wb") as f:
        f.write(_MAGIC)
        f.write(struct.pack("<II", _VERSION, n))
        f.write(bytes.fromhex(table.domain.content_hash()))
        f.write(np.ascontiguousarray(table.green, dtype=np.float64).tobytes())


def load_table_cache(triple: DomainTriple, path) -> HarmonicTable:
    with open(path, "rb") as f:
        if f.read(4) != _MAGIC:
            raise ValueError("not a harmonic table cache")
        version, n = struct.unpack("<II", f.read(8))
        if version != _VERSION:
            raise ValueError(f"unsupported cache version {version}")
        digest = f.read(8).hex()
        if digest != triple.content_hash():
            raise ValueError("cache does not match this domain")
        if n != len(triple):
            raise ValueError("site count mismatch")
        green = np.frombuffer(f.read(8 * n * n), dtype=np.float64).reshape(n, n).copy()
    return HarmonicTable(domain=triple, green=green, edges=boundary_edges(triple))
