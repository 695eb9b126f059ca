import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from lerwlab.metrics import Curve, OutOfRangeError, rho_distance, truncate


def seg(n=41, speed=1.0, t0=0.0):
    t = np.linspace(0, 1 / speed, n)
    return Curve(points=(t * speed).astype(complex), times=t + t0)


def random_curve(rng, n):
    steps = rng.normal(size=n) + 1j * rng.normal(size=n)
    pts = np.concatenate([[0j], np.cumsum(steps) * 0.1])
    times = np.concatenate([[0.0], np.cumsum(rng.uniform(0.05, 0.2, size=n))])
    return Curve(points=pts, times=times)


def test_rho_identity_zero():
    c = seg()
    assert rho_distance(c, c) == pytest.approx(0.0, abs=1e-12)


def test_rho_translation_exact():
    c = seg()
    v = 0.3 - 0.4j
    d = rho_distance(c, c.translated(v))
    assert d == pytest.approx(abs(v), abs=1e-3)


def test_rho_time_dilation_exact():
    # c1(t) = t on [0,1]; c2(s) = 2s on [0,1/2]: distance exactly 1/2
    c1 = Curve(points=np.linspace(0, 1, 41).astype(complex), times=np.linspace(0, 1, 41))
    c2 = Curve(points=np.linspace(0, 1, 41).astype(complex), times=np.linspace(0, 0.5, 41))
    assert rho_distance(c1, c2) == pytest.approx(0.5, abs=1e-3)


def test_rho_linear_time_change_bound():
    lam = 1.3
    c1 = seg(61)
    c2 = Curve(points=c1.points.copy(), times=c1.times * lam)
    d = rho_distance(c1, c2)
    assert d <= (lam - 1) * c1.duration + 1e-9


@settings(max_examples=20, deadline=None)
@given(st.integers(0, 10**6))
def test_rho_symmetry_within_modulus(seed):
    rng = np.random.default_rng(seed)
    c1 = random_curve(rng, 25)
    c2 = random_curve(rng, 30)
    d12 = rho_distance(c1, c2)
    d21 = rho_distance(c2, c1)
    mod = max(np.abs(np.diff(c1.points)).max(), np.abs(np.diff(c2.points)).max())
    assert abs(d12 - d21) <= 2 * mod + 1e-9


@settings(max_examples=10, deadline=None)
@given(st.integers(0, 10**6))
def test_rho_triangle_inequality_within_modulus(seed):
    rng = np.random.default_rng(seed)
    c1, c2, c3 = (random_curve(rng, 20) for _ in range(3))
    d12 = rho_distance(c1, c2)
    d23 = rho_distance(c2, c3)
    d13 = rho_distance(c1, c3)
    mod = max(
        np.abs(np.diff(c.points)).max() for c in (c1, c2, c3)
    )
    assert d13 <= d12 + d23 + 3 * mod + 1e-9


def test_truncate_identity_and_degenerate():
    c = seg()
    pre, info = truncate(c, c.times[-1])
    assert info["duration_trimmed"] == pytest.approx(0.0)
    assert info["diameter_trimmed"] == pytest.approx(0.0)
    assert len(pre) == len(c)
    pre0, info0 = truncate(c, 0.0)
    assert info0["duration_trimmed"] == pytest.approx(c.duration)
    assert info0["diameter_trimmed"] == pytest.approx(1.0, abs=1e-12)


def test_truncate_bound_respected():
    rng = np.random.default_rng(12)
    for _ in range(25):
        c = random_curve(rng, 40)
        t1 = rng.uniform(c.times[5], c.times[-2])
        pre, info = truncate(c, t1)
        d = rho_distance(c, pre)
        assert d <= info["duration_trimmed"] + info["diameter_trimmed"] + 1e-6


def test_truncate_out_of_range():
    c = seg()
    with pytest.raises(OutOfRangeError):
        truncate(c, c.times[-1] + 1.0)
