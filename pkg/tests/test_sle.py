import math

import numpy as np
import pytest
from scipy import stats

from lerwlab.grid import BoundaryEdge, DomainTriple, approximate_domain, AnalyticShape
from lerwlab.conformal import map_to_halfplane
from lerwlab.loewner import extract_driving
from lerwlab.sle import (
    GreenShape,
    green_shape_value,
    map_into_domain,
    one_point_ratio,
    sample_driving,
    trace,
)


def test_green_shape_exponents():
    gs = GreenShape(2.0)
    assert gs.d == pytest.approx(1.25)
    assert gs.beta == pytest.approx(3.0)
    with pytest.raises(ValueError):
        GreenShape(8.0)


def test_sample_driving_variance_slope():
    for kappa in (2.0, 8 / 3):
        rng = np.random.default_rng(1)
        finals = [sample_driving(kappa, 1.0, 1e-3, rng).values[-1] for _ in range(800)]
        var = np.var(finals)
        se = var * math.sqrt(2 / 799)
        assert abs(var - kappa / 2) < 3 * se


def test_kappa0_driving_identically_zero():
    rec = sample_driving(0.0, 0.5, 1e-3, 0)
    assert np.all(rec.values == 0.0)


def test_trace_is_simple_kappa2():
    # min distance over non-adjacent pairs stays positive (window 5)
    ok = 0
    for seed in range(10):
        rec = sample_driving(2.0, 0.5, 2e-4, np.random.default_rng(seed))
        pts = trace(rec).points
        n = len(pts)
        stride = 7
        sub = pts[::stride]
        d = np.abs(sub[:, None] - sub[None, :])
        k = np.arange(len(sub))
        mask = np.abs(k[:, None] - k[None, :]) > 1
        if d[mask].min() > 0:
            ok += 1
    assert ok >= 9


def test_brownian_scaling_of_driving():
    # U at capacity lam*t, rescaled by sqrt(lam), matches U at capacity t
    lam = 4.0
    a = [sample_driving(2.0, lam, 1e-2, np.random.default_rng(s)).values[-1] / math.sqrt(lam) for s in range(300)]
    b = [sample_driving(2.0, 1.0, 1e-2, np.random.default_rng(10_000 + s)).values[-1] for s in range(300)]
    p = stats.ks_2samp(a, b).pvalue
    assert p > 0.01


def unit_square_triple():
    return DomainTriple(
        [(0, 0)],
        BoundaryEdge((0, 0), (1, 0)),
        BoundaryEdge((0, 0), (-1, 0)),
    )


def test_map_into_domain_symmetric_kappa0():
    # marks on the east/west edges: the trace of zero driving pulls back to
    # the horizontal symmetry axis, entering at a = (1/2, 0)
    m = map_to_halfplane(unit_square_triple(), refine=3)
    rec = sample_driving(0.0, 0.25, 1e-3, 0)
    cur = trace(rec)
    dom = map_into_domain(cur, m)
    assert np.abs(dom.points.imag).max() < 1e-4
    assert abs(dom.points[0] - 0.5) < 1e-4
    # x decreases monotonically from a toward b
    assert np.all(np.diff(dom.points.real) < 1e-12)
    assert np.allclose(dom.times, cur.times)


def test_domain_curve_approaches_b():
    t = approximate_domain(AnalyticShape.disk(), 12)
    m = map_to_halfplane(t, refine=1)
    rec = sample_driving(2.0, 12.0, 2e-3, np.random.default_rng(3))
    dom = map_into_domain(trace(rec), m)
    b = complex(*t.b.midpoint)
    d_early = abs(dom.points[len(dom) // 20] - b)
    d_late = abs(dom.points[-1] - b)
    assert d_late < d_early


def test_trace_prefix_capacity_matches_timestamp():
    rec = sample_driving(2.0, 0.4, 1e-4, np.random.default_rng(7))
    cur = trace(rec)
    k = 3 * len(cur.points) // 4
    _, chain, _ = extract_driving(cur.points[: k + 1], h=1e-3)
    assert chain.total_capacity == pytest.approx(cur.times[k], abs=1e-3)


def test_green_shape_scale_covariance():
    # exact factor-2 rescaling of the lattice domain scales the shape value
    # by 2^(d-2) = 2^(-3/4); the doubled domain is D translated by (.5, .5)
    from lerwlab.grid import refine_triple

    gs = GreenShape(2.0)
    t1 = approximate_domain(AnalyticShape.disk(), 10)
    t2 = refine_triple(t1)
    m1 = map_to_halfplane(t1, refine=2)
    m2 = map_to_halfplane(t2, refine=2)
    shift = complex(0.5, 0.5)
    for z1 in [0j, 2 + 1j, -3j]:
        v1 = green_shape_value(gs, m1, z1)
        v2 = green_shape_value(gs, m2, 2 * z1 + shift)
        assert v2 / v1 == pytest.approx(2 ** (-0.75), rel=0.01)


def test_one_point_ratio_symmetric_points():
    # two reflection-symmetric z in the square get equal ratios within 3 sigma
    m = map_to_halfplane(unit_square_triple(), refine=3)
    out = one_point_ratio(
        2.0, m, [0.22j, -0.22j], [0.1], replicas=400, rng=5, capacity=1.5, dt=2e-3
    )
    r = out["ratio"][:, 0]
    se = out["stderr"][:, 0]
    assert abs(r[0] - r[1]) < 3 * math.hypot(se[0], se[1])
