"""Parametrized planar curves and the time-plus-space curve distance.

The distance between curves gamma1, gamma2 is the infimum over increasing
homeomorphisms alpha between their time intervals of

    sup |alpha(t) - t|  +  sup |gamma2(alpha(t)) - gamma1(t)|.

It is approximated from above by a monotone alignment of the two sampled
point sequences: for a grid of time-slack candidates tau we compute the
least achievable spatial sup by bisection over a feasibility dynamic
program, then minimize tau + space(tau).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from numba import njit

__all__ = ["Curve", "OutOfRangeError", "rho_distance", "truncate"]


class OutOfRangeError(ValueError):
    pass


@dataclass
class Curve:
    """Polyline with nondecreasing timestamps.

    tag records the parametrization: 'capacity', 'natural', or 'lattice'.
    """

    points: np.ndarray
    times: np.ndarray
    tag: str = "capacity"

    def __post_init__(self):
        self.points = np.asarray(self.points, dtype=complex)
        self.times = np.asarray(self.times, dtype=float)
        if len(self.points) != len(self.times):
            raise ValueError("points and times must align")
        if len(self.times) and np.any(np.diff(self.times) < -1e-12):
            raise ValueError("times must be nondecreasing")

    def __len__(self):
        return len(self.points)

    @property
    def duration(self) -> float:
        return float(self.times[-1] - self.times[0])

    def diameter(self) -> float:
        if len(self.points) < 2:
            return 0.0
        pts = self.points
        # cheap two-pass farthest-point bound is enough for diagnostics
        c = pts.mean()
        far = pts[np.argmax(np.abs(pts - c))]
        return float(np.abs(pts - far).max())

    def value_at(self, t: float) -> complex:
        re = np.interp(t, self.times, self.points.real)
        im = np.interp(t, self.times, self.points.imag)
        return complex(re, im)

    def refined(self) -> "Curve":
        """One midpoint-insertion pass."""
        if len(self.points) < 2:
            return self
        p, t = self.points, self.times
        pm = 0.5 * (p[:-1] + p[1:])
        tm = 0.5 * (t[:-1] + t[1:])
        pts = np.empty(2 * len(p) - 1, dtype=complex)
        tms = np.empty(2 * len(p) - 1)
        pts[0::2] = p
        pts[1::2] = pm
        tms[0::2] = t
        tms[1::2] = tm
        return Curve(pts, tms, self.tag)

    def translated(self, v: complex) -> "Curve":
        return Curve(self.points + v, self.times.copy(), self.tag)


@njit(cache=True)
def _feasible(dt_ok, dist, c):
    """Monotone alignment from (0,0) to (n-1,m-1) with all matched pairs
    allowed in time and within spatial distance c."""
    n, m = dist.shape
    prev = np.zeros(m, dtype=np.bool_)
    cur = np.zeros(m, dtype=np.bool_)
    for i in range(n):
        for j in range(m):
            if not dt_ok[i, j] or dist[i, j] > c:
                cur[j] = False
            elif i == 0 and j == 0:
                cur[j] = True
            else:
                ok = False
                if i > 0 and prev[j]:
                    ok = True
                elif j > 0 and cur[j - 1]:
                    ok = True
                elif i > 0 and j > 0 and prev[j - 1]:
                    ok = True
                cur[j] = ok
        prev, cur = cur, prev
    return prev[m - 1]


@njit(cache=True)
def _min_space(dt_ok, dist, levels):
    """Least spatial sup achievable given the time mask, by bisection over
    the sorted candidate levels; inf if no alignment exists at all."""
    lo, hi = 0, len(levels) - 1
    if not _feasible(dt_ok, dist, levels[hi]):
        return np.inf
    while lo < hi:
        mid = (lo + hi) // 2
        if _feasible(dt_ok, dist, levels[mid]):
            hi = mid
        else:
            lo = mid + 1
    return levels[lo]


def rho_distance(c1: Curve, c2: Curve, tau_candidates: int = 65, refine: bool = True) -> float:
    """Upper approximation of the curve distance (time sup + space sup).

    One midpoint refinement tightens the discretization; the result can
    overshoot the true infimum only by the discretization modulus of the
    two curves.
    """
    if len(c1) == 0 or len(c2) == 0:
        raise ValueError("curves must be nonempty")
    if refine:
        c1, c2 = c1.refined(), c2.refined()
    t1 = c1.times - c1.times[0]
    t2 = c2.times - c2.times[0]
    dt = np.abs(t1[:, None] - t2[None, :])
    dist = np.abs(c1.points[:, None] - c2.points[None, :])
    levels = np.unique(dist)
    # endpoints must match: the time sup is at least the duration gap
    tau_floor = abs(t1[-1] - t2[-1])
    taus = np.unique(
        np.concatenate(
            [
                [tau_floor],
                np.quantile(dt[dt >= tau_floor - 1e-15], np.linspace(0, 1, tau_candidates))
                if np.any(dt >= tau_floor - 1e-15)
                else [],
            ]
        )
    )
    best = np.inf
    for tau in taus:
        if tau >= best:
            continue
        space = _min_space(dt <= tau + 1e-15, dist, levels)
        best = min(best, tau + space)
    return float(best)


def truncate(c: Curve, t1: float):
    """Prefix of the curve up to time t1, with tail-trim diagnostics.

    Returns (prefix, info) where info reports the trimmed duration and the
    trimmed piece's diameter; the curve distance to the original is at most
    their sum.
    """
    if not (c.times[0] <= t1 <= c.times[-1]):
        raise OutOfRangeError(f"t1={t1} outside [{c.times[0]}, {c.times[-1]}]")
    keep = c.times <= t1 + 1e-15
    pts = c.points[keep]
    tms = c.times[keep]
    if len(tms) == 0 or tms[-1] < t1 - 1e-15:
        pts = np.append(pts, c.value_at(t1))
        tms = np.append(tms, t1)
    tail_pts = np.append(c.points[~keep][::-1], c.value_at(t1))
    if len(tail_pts) < 2:
        diam = 0.0
    elif len(tail_pts) <= 2000:
        diam = float(np.abs(tail_pts[:, None] - tail_pts[None, :]).max())
    else:
        diam = float(
            np.hypot(np.ptp(tail_pts.real), np.ptp(tail_pts.imag))
        )  # bounding-box overestimate, safe for the trim bound
    info = {
        "duration_trimmed": float(c.times[-1] - t1),
        "diameter_trimmed": diam,
    }
    return Curve(pts, tms, c.tag), info
