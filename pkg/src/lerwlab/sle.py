"""SLE trace generation from Brownian driving and the Green's-function shape.

Driving uses the module-wide clock in which capacity equals elapsed time
and SLE_kappa is driven by sqrt(kappa/2) B with B standard Brownian motion;
the trace pulls the lifted tip back through the inverse slit-map chain.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .conformal import HalfPlaneMap, sine_and_radius
from .loewner import DrivingRecord, record_chain, trace_points
from .metrics import Curve

__all__ = [
    "BrownianDriving",
    "GreenShape",
    "InverseOutOfRangeError",
    "sample_driving",
    "trace",
    "map_into_domain",
    "green_shape_value",
    "one_point_ratio",
    "curve_to_csv",
]


class InverseOutOfRangeError(ValueError):
    pass


@dataclass
class BrownianDriving(DrivingRecord):
    """Driving record U_t = sqrt(kappa/2) B_t on a uniform capacity grid."""

    kappa: float = 2.0


def sample_driving(kappa: float, total_capacity: float, dt: float, rng) -> BrownianDriving:
    if dt <= 0 or total_capacity <= 0:
        raise ValueError("capacity and step must be positive")
    if isinstance(rng, (int, np.integer)):
        rng = np.random.default_rng(rng)
    n = int(round(total_capacity / dt))
    times = dt * np.arange(n + 1)
    if kappa == 0:
        vals = np.zeros(n + 1)
    else:
        steps = rng.normal(0.0, math.sqrt(kappa / 2.0 * dt), size=n)
        vals = np.concatenate([[0.0], np.cumsum(steps)])
    return BrownianDriving(times=times, values=vals, kappa=kappa)


def trace(record: DrivingRecord, y0=None) -> Curve:
    """Capacity-parametrized trace of the Loewner flow for the record."""
    pts = trace_points(record, y0=y0)
    points = np.concatenate([[complex(record.values[0], 0.0)], pts])
    return Curve(points=points, times=record.times.copy(), tag="capacity")


def map_into_domain(curve: Curve, m: HalfPlaneMap) -> Curve:
    """Pull a half-plane curve into the domain of the map, keeping timestamps."""
    pts = np.asarray(curve.points, dtype=complex)
    if np.any(pts.imag < -1e-9):
        raise InverseOutOfRangeError("curve leaves the closed half-plane")
    safe = pts.copy()
    safe.imag = np.maximum(safe.imag, 1e-12)
    out = m.inverse(safe)
    if np.any(~np.isfinite(out)):
        raise InverseOutOfRangeError("inverse map diverged on the curve")
    return Curve(points=out, times=curve.times.copy(), tag=curve.tag)


@dataclass(frozen=True)
class GreenShape:
    """Exponents of the SLE Green's function r^(d-2) sin(arg)^beta."""

    kappa: float

    def __post_init__(self):
        if not 0 < self.kappa < 8:
            raise ValueError("kappa must lie in (0, 8)")

    @property
    def d(self) -> float:
        return 1.0 + self.kappa / 8.0

    @property
    def beta(self) -> float:
        return 8.0 / self.kappa - 1.0


def green_shape_value(gs: GreenShape, m: Optional[HalfPlaneMap], z, check_depth: bool = True) -> float:
    """Green's function without its unknown multiplicative constant.

    m=None evaluates directly in the upper half-plane, where the conformal
    radius is 2 Im z and the angle is arg z.
    """
    if m is None:
        z = complex(z)
        if z.imag <= 0:
            raise ValueError("half-plane evaluation needs Im z > 0")
        s = z.imag / abs(z)
        r = 2.0 * z.imag
    else:
        s, r = sine_and_radius(m, z, check_depth=check_depth)
    return r ** (gs.d - 2.0) * s**gs.beta


def one_point_ratio(
    kappa: float,
    halfplane_map: HalfPlaneMap,
    z_list,
    eps_list,
    replicas: int,
    rng,
    capacity: float = 3.0,
    dt: float = 5e-4,
) -> dict:
    """Monte Carlo hitting ratios P{dist(z, trace) <= eps} / (eps^(2-d) G(z)).

    Traces are truncated at the given capacity in the map's half-plane
    clock; ratios are comparable across z and stabilize in eps when the
    scaling law holds.
    """
    if isinstance(rng, (int, np.integer)):
        rng = np.random.default_rng(rng)
    gs = GreenShape(kappa)
    zs = np.asarray(z_list, dtype=complex)
    eps = np.asarray(eps_list, dtype=float)
    hits = np.zeros((len(zs), len(eps)), dtype=np.int64)
    dmin = np.empty((replicas, len(zs)))
    for rep in range(replicas):
        rec = sample_driving(kappa, capacity, dt, rng)
        curve = trace(rec)
        dom = curve if halfplane_map is None else map_into_domain(curve, halfplane_map)
        for iz, z in enumerate(zs):
            dmin[rep, iz] = np.abs(dom.points - z).min()
    for iz in range(len(zs)):
        for ie, e in enumerate(eps):
            hits[iz, ie] = int((dmin[:, iz] <= e).sum())
    probs = hits / replicas
    shape = np.array([green_shape_value(gs, halfplane_map, z, check_depth=False) for z in zs])
    ratios = probs / (eps[None, :] ** (2.0 - gs.d) * shape[:, None])
    stderr = np.sqrt(np.maximum(probs * (1 - probs), 1e-12) / replicas) / (
        eps[None, :] ** (2.0 - gs.d) * shape[:, None]
    )
    return {
        "z": zs,
        "eps": eps,
        "prob": probs,
        "ratio": ratios,
        "stderr": stderr,
        "min_dist_samples": dmin,
    }


def curve_to_csv(curve: Curve, path) -> None:
    arr = np.column_stack(
        [np.arange(len(curve)), curve.times, curve.points.real, curve.points.imag]
    )
    np.savetxt(path, arr, delimiter=",", header="k,t,x,y", comments="")
