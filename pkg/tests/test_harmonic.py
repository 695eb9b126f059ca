import numpy as np
import pytest

from lerwlab.grid import BoundaryEdge, DomainTriple, disk_triple, lattice_disk
from lerwlab.harmonic import (
    UnreachableTargetError,
    boundary_poisson,
    build_harmonic_table,
    escape_probability,
    hprocess_law,
    load_table_cache,
    neighbor_table,
    save_table_cache,
)


def singleton():
    return DomainTriple(
        [(0, 0)],
        BoundaryEdge(inner=(0, 0), outer=(1, 0)),
        BoundaryEdge(inner=(0, 0), outer=(-1, 0)),
    )


def domino():
    return DomainTriple(
        [(0, 0), (1, 0)],
        BoundaryEdge(inner=(0, 0), outer=(-1, 0)),
        BoundaryEdge(inner=(1, 0), outer=(2, 0)),
    )


def test_green_singleton():
    tab = build_harmonic_table(singleton())
    assert tab.green_at((0, 0), (0, 0)) == pytest.approx(1.0)
    assert boundary_poisson(tab) == pytest.approx(1 / 16)


def test_green_domino_exact():
    # solve the 2x2 system by hand: G = (I - P)^-1 with P = [[0,1/4],[1/4,0]]
    tab = build_harmonic_table(domino())
    assert tab.green_at((0, 0), (0, 0)) == pytest.approx(16 / 15, rel=1e-12)
    assert tab.green_at((0, 0), (1, 0)) == pytest.approx(4 / 15, rel=1e-12)
    assert boundary_poisson(tab) == pytest.approx(1 / 60, rel=1e-12)


def test_green_symmetry_and_mean_value():
    t = disk_triple(3.5)
    tab = build_harmonic_table(t)
    G = tab.green
    assert np.allclose(G, G.T, atol=1e-11)
    nbr = neighbor_table(t)
    # (I - P) G = I row-wise
    n = len(t)
    for i in range(0, n, 7):
        row = G[i].copy()
        for k in range(4):
            j = nbr[i, k]
            if j >= 0:
                row -= 0.25 * G[j]
        expect = np.zeros(n)
        expect[i] = 1.0
        assert np.abs(row - expect).max() < 1e-10


def test_exit_kernel_rows_sum_to_one():
    t = disk_triple(4.5)
    tab = build_harmonic_table(t)
    K = tab.exit_kernel()
    assert np.abs(K.sum(axis=1) - 1.0).max() < 1e-9
    assert K.min() >= 0


def test_green_log_growth():
    # G(0,0) grows like (2/pi) log r on disks
    rs = [8, 16, 32, 64]
    vals = []
    for r in rs:
        t = disk_triple(r + 0.5)
        tab = build_harmonic_table(t, dense=len(t) <= 3000)
        vals.append(tab.green_at((0, 0), (0, 0)))
    slope = np.polyfit(np.log(rs), vals, 1)[0]
    assert slope == pytest.approx(2 / np.pi, rel=0.05)


def test_boundary_poisson_symmetric_swap():
    t = disk_triple(4.5, 0.3, 2.2)
    t_swapped = DomainTriple(t.sites, t.b, t.a)
    assert boundary_poisson(build_harmonic_table(t)) == pytest.approx(
        boundary_poisson(build_harmonic_table(t_swapped)), rel=1e-10
    )


def test_sparse_matches_dense():
    t = disk_triple(6.5)
    dense = build_harmonic_table(t, dense=True)
    sp = build_harmonic_table(t, dense=False)
    h1 = dense.hvector(t.b)
    h2 = sp.hvector(t.b)
    assert np.abs(h1 - h2).max() < 1e-10


def test_hprocess_rows_normalize():
    t = disk_triple(3.5)
    law = hprocess_law(build_harmonic_table(t))
    assert np.all(law.h > 0)
    for site in [(0, 0), (1, 1), t.a.inner, t.b.inner]:
        probs, exit_p = law.transition_row(site)
        assert probs.sum() + exit_p == pytest.approx(1.0, abs=1e-12)
        if site != t.b.inner:
            assert exit_p == 0.0


def test_hprocess_singleton_exits_through_b():
    law = hprocess_law(build_harmonic_table(singleton()))
    probs, exit_p = law.transition_row((0, 0))
    assert probs.sum() == pytest.approx(0.0)
    assert exit_p == pytest.approx(1.0)


def test_hprocess_unreachable():
    # no walk can reach b if h vanishes; build an artificial zero by masking
    t = domino()
    tab = build_harmonic_table(t)
    law = hprocess_law(tab)  # fine
    tab2 = build_harmonic_table(t)
    tab2.green[:, :] = 0.0
    with pytest.raises(UnreachableTargetError):
        hprocess_law(tab2)


def test_escape_probability_origin_only():
    # eta = {0} in C_1.5 (9 free sites minus the origin): by symmetry the
    # axis and diagonal neighbors satisfy a = 1/4 + b/2, b = 1/2 + a/2,
    # so a = 2/3 and the uniform-first-step escape probability is 2/3
    p = escape_probability(1.5, np.array([[0, 0]]))
    assert p == pytest.approx(2 / 3, abs=1e-12)


def test_escape_probability_ray_blocks_one_side():
    # a radial ray from the origin: escape remains possible off the ray
    r = 8.5
    ray = np.array([[0, y] for y in range(0, 9)])
    p = escape_probability(r, ray)
    assert 0 < p < 1
    # blocking more of the disk can only reduce the escape probability
    shorter = np.array([[0, y] for y in range(0, 5)])
    assert escape_probability(r, shorter) > p


def test_escape_probability_in_unit_interval_random():
    rng = np.random.default_rng(0)
    from lerwlab._kernels import interior_lerw_disk

    r = 6.5
    half = 10
    pos = np.full((2 * half + 1, 2 * half + 1), -1, dtype=np.int32)
    buf = np.empty((500, 2), dtype=np.int32)
    for seed in range(20):
        n = interior_lerw_disk(r, np.uint32(seed), buf, pos, 2 * half + 1, half)
        eta = buf[:n].astype(np.int64)
        p = escape_probability(r, eta)
        assert 0.0 <= p <= 1.0


def test_table_cache_roundtrip(tmp_path):
    t = disk_triple(3.5)
    tab = build_harmonic_table(t)
    path = tmp_path / "table.bin"
    save_table_cache(tab, path)
    tab2 = load_table_cache(t, path)
    assert np.allclose(tab.green, tab2.green)
    other = disk_triple(4.5)
    with pytest.raises(ValueError):
        load_table_cache(other, path)


def test_mc_exit_frequencies_match_kernel():
    # 10^5 walks from the origin of a small diamond vs the exact exit kernel
    from lerwlab._kernels import srw_exit_edge

    t = disk_triple(2.5)
    tab = build_harmonic_table(t)
    law_idx = {tuple(s): i for i, s in enumerate(t.sites.tolist())}
    nbr = neighbor_table(t)
    start = law_idx[(0, 0)]
    edges = tab.edges
    by_key = {(e.inner, e.outer): k for k, e in enumerate(edges)}
    counts = np.zeros(len(edges))
    n = 100_000
    steps = [(1, 0), (-1, 0), (0, 1), (0, -1)]
    for s in range(n):
        i, k = srw_exit_edge(nbr, start, np.uint32(7_000_000 + s))
        site = tuple(t.sites[i])
        outer = (site[0] + steps[k][0], site[1] + steps[k][1])
        counts[by_key[(site, outer)]] += 1
    probs = tab.exit_kernel()[start]
    sigma = np.sqrt(probs * (1 - probs) / n)
    assert np.all(np.abs(counts / n - probs) < 4 * sigma + 1e-9)
