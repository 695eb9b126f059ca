"""Named experiments probing the quantitative scaling laws.

Each experiment consumes an ExperimentConfig and returns a ResultRecord
with per-replica observables (or sufficient counts), fitted exponents with
bootstrap confidence intervals, and the derived quantities its acceptance
thresholds refer to.  All randomness derives from the config seed.
"""

from __future__ import annotations

import math

import numpy as np

from ..conformal import disk_normalized_sine, map_to_halfplane, sine_and_radius
from ..content import content_martingale_probe, minkowski_content
from ..grid import (
    AnalyticShape,
    BoundaryEdge,
    DomainTriple,
    DegenerateMarksError,
    approximate_domain,
    boundary_edges,
    disk_triple,
    lattice_disk,
    nearest_boundary_edge,
)
from ..harmonic import boundary_poisson, build_harmonic_table, escape_probability
from ..lerw import (
    Saw,
    bottleneck_event,
    enumerate_saws,
    exact_saw_weight,
    first_last_decompose,
    loop_erase,
    maximal_visit_count,
    prepare_sampler,
    sample_lerw,
    separation_statistic,
)
from ..loewner import extract_driving
from ..metrics import Curve
from ..sle import GreenShape, map_into_domain, one_point_ratio, sample_driving, trace
from .. import _kernels
from .config import ExperimentConfig
from .results import ResultRecord, bootstrap_slope, fit_loglog

__all__ = ["run_experiment", "EXPERIMENT_RUNNERS"]


def _seeds(config: ExperimentConfig, label: str, n: int) -> np.ndarray:
    """Deterministic uint32 kernel seeds for one experiment phase."""
    key = abs(hash(label)) % (2**31)
    ss = np.random.SeedSequence([config.seed, key])
    return ss.generate_state(n, dtype=np.uint32)


def _rng(config: ExperimentConfig, label: str) -> np.random.Generator:
    key = abs(hash(label)) % (2**31)
    return np.random.default_rng(np.random.SeedSequence([config.seed, key]))


def _sample_saws(triple, n, seeds, keep=None):
    """Run n LERW draws; apply `keep(saw) -> value` or collect vertex arrays."""
    tab = prepare_sampler(triple)
    n_sites = len(triple.sites)
    scratch = (np.empty(n_sites + 1, dtype=np.int32), np.full(n_sites, -1, dtype=np.int32))
    out = []
    for i in range(n):
        saw = sample_lerw(tab, seed=int(seeds[i]), scratch=scratch)
        out.append(keep(saw) if keep else saw.vertices)
    return out


# -- one-point law ----------------------------------------------------------


def exp_one_point(config: ExperimentConfig) -> ResultRecord:
    rec = ResultRecord(config=config)
    r_list = config.float_list("r_list", [8, 16, 32, 64])
    n = config.replicas
    counts = []
    for r in r_list:
        triple = disk_triple(r)
        seeds = _seeds(config, f"one-point-r{r}", n)
        tab = prepare_sampler(triple)
        scratch = (
            np.empty(len(triple.sites) + 1, dtype=np.int32),
            np.full(len(triple.sites), -1, dtype=np.int32),
        )
        hits = 0
        for i in range(n):
            saw = sample_lerw(tab, seed=int(seeds[i]), scratch=scratch)
            hits += _kernels.ball_visit_count(saw.vertices[1:-1], 0, 0, 0.0)
        counts.append((hits, n))
        rec.add(r, -1, "hits", hits)
        rec.add(r, -1, "samples", n)
        m = map_to_halfplane(triple, refine=1)
        s0, r0 = sine_and_radius(m, 0j)
        rec.add(r, -1, "sine", s0)
        rec.add(r, -1, "conformal_radius", r0)
        rec.add(r, -1, "c_hat", (hits / n) * r0**0.75 / s0**3)
    slope, lo, hi = bootstrap_slope(r_list, None, config.seed, counts=counts)
    # sine cube: fixed radius, marks walked around the circle
    r_s = float(config.get("sine_radius", 32))
    angles = config.float_list(
        "angles", [math.pi, 2.62, 2.36, 2.09, 1.83, 1.57, 1.31, 1.05, 0.79]
    )
    n_s = int(config.get("sine_replicas", max(n // 2, 1000)))
    sines, s_counts = [], []
    for k, ang in enumerate(angles):
        triple = disk_triple(r_s, 0.0, ang)
        seeds = _seeds(config, f"one-point-s{k}", n_s)
        tab = prepare_sampler(triple)
        scratch = (
            np.empty(len(triple.sites) + 1, dtype=np.int32),
            np.full(len(triple.sites), -1, dtype=np.int32),
        )
        hits = 0
        for i in range(n_s):
            saw = sample_lerw(tab, seed=int(seeds[i]), scratch=scratch)
            hits += _kernels.ball_visit_count(saw.vertices[1:-1], 0, 0, 0.0)
        s_val = disk_normalized_sine(triple, refine=1)
        sines.append(s_val)
        s_counts.append((hits, n_s))
        rec.add(f"angle:{ang}", -1, "hits", hits)
        rec.add(f"angle:{ang}", -1, "samples", n_s)
        rec.add(f"angle:{ang}", -1, "sine", s_val)
    s_slope, s_lo, s_hi = bootstrap_slope(sines, None, config.seed + 1, counts=s_counts)
    chat = rec.values("c_hat")
    rec.summary = {
        "r_exponent": {"slope": slope, "ci": [lo, hi]},
        "sine_exponent": {"slope": s_slope, "ci": [s_lo, s_hi]},
        "c_hat_by_r": dict(zip(map(str, r_list), chat)),
        "c_hat_spread": float(chat.max() / chat.min() - 1.0) if len(chat) else None,
    }
    return rec


# -- conditional hitting ----------------------------------------------------


def exp_conditional_hitting(config: ExperimentConfig) -> ResultRecord:
    rec = ResultRecord(config=config)
    r_list = config.float_list("r_list", [8, 16, 32, 64])
    factor = float(config.get("domain_factor", 2.5))
    n = config.replicas
    cond_counts = []
    for r in r_list:
        triple = disk_triple(factor * r)
        seeds = _seeds(config, f"cond-r{r}", n)
        tab = prepare_sampler(triple)
        scratch = (
            np.empty(len(triple.sites) + 1, dtype=np.int32),
            np.full(len(triple.sites), -1, dtype=np.int32),
        )
        in_ir = 0
        hit0 = 0
        for i in range(n):
            saw = sample_lerw(tab, seed=int(seeds[i]), scratch=scratch)
            fwd, _ = _kernels.first_radius_indices(saw.vertices, float(r))
            if fwd >= 0:
                in_ir += 1
                hit0 += _kernels.ball_visit_count(saw.vertices[1:-1], 0, 0, 0.0)
        cond_counts.append((hit0, in_ir))
        rec.add(r, -1, "in_ir", in_ir)
        rec.add(r, -1, "hits_origin", hit0)
        rec.add(r, -1, "samples", n)
        rec.add(r, -1, "p_ir", in_ir / n)
        rec.add(r, -1, "cond_prob", hit0 / in_ir if in_ir else 0.0)
        # companion ratio P[I_r] / (r^{3/4} P{0 in eta})
        p0 = hit0 / n  # joint: {0 in eta} implies I_r
        rec.add(r, -1, "ratio_ir", (in_ir / n) / (r**0.75 * p0) if p0 else float("nan"))
    slope, lo, hi = bootstrap_slope(r_list, None, config.seed, counts=cond_counts)
    ratios = rec.values("ratio_ir")
    drifts = np.abs(np.diff(np.log(ratios)))
    rec.summary = {
        "cond_exponent": {"slope": slope, "ci": [lo, hi]},
        "ratio_by_r": dict(zip(map(str, r_list), ratios)),
        "max_ratio_drift_per_doubling": float(drifts.max()) if len(drifts) else 0.0,
    }
    return rec


# -- growth exponents --------------------------------------------------------


def exp_growth(config: ExperimentConfig) -> ResultRecord:
    rec = ResultRecord(config=config)
    n_list = config.int_list("n_list", [50, 100, 200, 400])
    base = config.replicas
    t_samples, t2_samples = [], []
    for N in n_list:
        reps = max(int(config.get("min_replicas", 1000)), int(base * n_list[0] / N))
        triple = approximate_domain(AnalyticShape.disk(), N)
        seeds = _seeds(config, f"growth-N{N}", reps)
        ts = np.asarray(
            _sample_saws(triple, reps, seeds, keep=lambda s: s.interior_count),
            dtype=float,
        )
        t_samples.append(ts)
        t2_samples.append(ts**2)
        rec.add_many(N, "T", ts)
        rec.add(N, -1, "replicas", reps)
    s1 = bootstrap_slope(n_list, t_samples, config.seed)
    s2 = bootstrap_slope(n_list, t2_samples, config.seed + 1)
    ratios = [float(np.mean(t2) / np.mean(t) ** 2) for t, t2 in zip(t_samples, t2_samples)]
    rec.summary = {
        "T_exponent": {"slope": s1[0], "ci": [s1[1], s1[2]]},
        "T2_exponent": {"slope": s2[0], "ci": [s2[1], s2[2]]},
        "second_moment_ratio_by_N": dict(zip(map(str, n_list), ratios)),
    }
    return rec


# -- maximal second moment ----------------------------------------------------


def exp_maximal(config: ExperimentConfig) -> ResultRecord:
    rec = ResultRecord(config=config)
    N = int(config.get("n", 200))
    r_list = config.float_list("r_list", [1 / 32, 1 / 16, 1 / 8, 1 / 4])
    reps = config.replicas
    triple = approximate_domain(AnalyticShape.disk(), N)
    seeds = _seeds(config, f"maximal-N{N}", reps)
    tab = prepare_sampler(triple)
    scratch = (
        np.empty(len(triple.sites) + 1, dtype=np.int32),
        np.full(len(triple.sites), -1, dtype=np.int32),
    )
    tbar2 = {r: np.empty(reps) for r in r_list}
    for i in range(reps):
        saw = sample_lerw(tab, seed=int(seeds[i]), scratch=scratch)
        for r in r_list:
            tb = maximal_visit_count(saw, r * N)
            tbar2[r][i] = float(tb) ** 2
    samples = [tbar2[r] / N**2.5 for r in r_list]
    for r, s in zip(r_list, samples):
        rec.add_many(r, "tbar2_scaled", s)
    slope, lo, hi = bootstrap_slope(r_list, samples, config.seed)
    means = [float(s.mean()) for s in samples]
    rec.summary = {
        "r_exponent": {"slope": slope, "ci": [lo, hi]},
        "mean_by_r": dict(zip(map(str, r_list), means)),
        "monotone_in_r": bool(np.all(np.diff(means) > 0)),
    }
    return rec


# -- two-point estimates -------------------------------------------------------


def exp_two_point(config: ExperimentConfig) -> ResultRecord:
    rec = ResultRecord(config=config)
    n_list = config.int_list("n_list", [64, 128])
    reps0 = config.replicas
    zetas = [(2, 0), (3, 0), (5, 0), (8, 0), (12, 0)]
    pair_sets = {}
    diag_fits = {}
    bound_ratios = {}
    for N in n_list:
        reps = max(1000, int(reps0 * n_list[0] / N))
        triple = disk_triple(N + 0.5)
        a_mid = triple.a.midpoint_complex
        b_mid = triple.b.midpoint_complex
        # first two pairs are mirror images across the mark axis, so their
        # joint probabilities agree in law
        pairs = [
            ((N // 4, N // 8), (-N // 4, N // 8)),
            ((N // 4, -N // 8), (-N // 4, -N // 8)),
            ((N // 4, 0), (0, N // 4)),
            ((N // 8, N // 8), (-N // 8, -N // 8)),
        ]
        seeds = _seeds(config, f"two-point-N{N}", reps)
        tab = prepare_sampler(triple)
        scratch = (
            np.empty(len(triple.sites) + 1, dtype=np.int32),
            np.full(len(triple.sites), -1, dtype=np.int32),
        )
        pair_hits = np.zeros(len(pairs), dtype=np.int64)
        hit0 = 0
        diag_hits = np.zeros(len(zetas), dtype=np.int64)
        for i in range(reps):
            saw = sample_lerw(tab, seed=int(seeds[i]), scratch=scratch)
            verts = {tuple(v) for v in saw.vertices[1:-1].tolist()}
            for k, (z, w) in enumerate(pairs):
                if z in verts and w in verts:
                    pair_hits[k] += 1
            if (0, 0) in verts:
                hit0 += 1
                for k, zeta in enumerate(zetas):
                    if zeta in verts:
                        diag_hits[k] += 1
        for k, (z, w) in enumerate(pairs):
            p = pair_hits[k] / reps
            dz = min(abs(complex(*z) - a_mid), abs(complex(*z) - b_mid))
            dw = min(abs(complex(*w) - a_mid), abs(complex(*w) - b_mid))
            dz, dw = min(dz, dw), max(dz, dw)
            bound = dz**-0.75 * (dw**-0.75 + abs(complex(*z) - complex(*w)) ** -0.75)
            rec.add(f"N{N}:pair{k}", -1, "joint_prob", p)
            rec.add(f"N{N}:pair{k}", -1, "bound", bound)
            bound_ratios.setdefault(N, []).append(p / bound)
        dists = [math.hypot(*z) for z in zetas]
        cond = diag_hits / max(hit0, 1)
        for zeta, c in zip(zetas, cond):
            rec.add(f"N{N}:diag{zeta[0]}", -1, "cond_prob", c)
        diag_fits[N] = bootstrap_slope(
            dists, None, config.seed + N, counts=[(h, max(hit0, 1)) for h in diag_hits]
        )
        pair_sets[N] = pair_hits / reps
    # symmetric pairs (first two) should agree at each N
    sym_gap = {
        str(N): float(abs(np.log(max(p[0], 1e-12) / max(p[1], 1e-12))))
        for N, p in pair_sets.items()
    }
    ratio_drift = float(
        np.max(
            np.abs(
                np.log(
                    np.asarray(bound_ratios[n_list[1]])
                    / np.asarray(bound_ratios[n_list[0]])
                )
            )
        )
    )
    rec.summary = {
        "diag_exponent_by_N": {
            str(N): {"slope": s[0], "ci": [s[1], s[2]]} for N, s in diag_fits.items()
        },
        "max_bound_ratio": {
            str(N): float(np.max(v)) for N, v in bound_ratios.items()
        },
        "bound_ratio_drift_log": ratio_drift,
        "symmetric_pair_log_gap": sym_gap,
    }
    return rec


# -- separation ---------------------------------------------------------------


def _adversarial_triple(radius: float, gap: float) -> DomainTriple:
    sites = lattice_disk(radius)
    edges = boundary_edges(sites)
    ea = nearest_boundary_edge(edges, radius * complex(math.cos(0.0), math.sin(0.0)))
    g = gap
    while True:
        target = radius * complex(math.cos(g), math.sin(g))
        eb = nearest_boundary_edge(edges, target)
        if eb != ea and eb.outer != ea.outer:
            return DomainTriple(sites, ea, eb)
        g += 0.25 / radius


def exp_separation(config: ExperimentConfig) -> ResultRecord:
    rec = ResultRecord(config=config)
    r_list = config.float_list("r_list", [8, 16, 32, 64])
    gaps = config.float_list("gaps", [math.pi, math.pi / 2, 0.5, 0.15, 0.06])
    target = config.replicas
    max_raw = int(config.get("max_raw", target * 10_000))
    thresholds = config.float_list("thresholds", [0.02, 0.05, 0.1])
    factor = float(config.get("domain_factor", 2.5))
    table = {}
    for r in r_list:
        for gi, gap in enumerate(gaps):
            triple = _adversarial_triple(factor * r, gap)
            tab = prepare_sampler(triple)
            scratch = (
                np.empty(len(triple.sites) + 1, dtype=np.int32),
                np.full(len(triple.sites), -1, dtype=np.int32),
            )
            seeds = _seeds(config, f"sep-r{r}-g{gi}", max_raw)
            s_vals = []
            raw = 0
            for i in range(max_raw):
                raw += 1
                saw = sample_lerw(tab, seed=int(seeds[i]), scratch=scratch)
                d = first_last_decompose(saw, r, triple)
                if d is None:
                    continue
                s_vals.append(separation_statistic(d, refine=0))
                if len(s_vals) >= target:
                    break
            s_vals = np.asarray(s_vals)
            for v in s_vals:
                rec.add(f"r{r}:gap{gi}", -1, "S_r", v)
            rec.add(f"r{r}:gap{gi}", -1, "raw_samples", raw)
            rec.add(f"r{r}:gap{gi}", -1, "conditioned", len(s_vals))
            for c0 in thresholds:
                p = float((s_vals >= c0).mean()) if len(s_vals) else 0.0
                table[(r, gi, c0)] = (p, len(s_vals))
                rec.add(f"r{r}:gap{gi}", -1, f"p_ge_{c0}", p)
    worst = min(table[(r, gi, thresholds[0])][0] for r in r_list for gi in range(len(gaps)))
    trend = {}
    for gi in range(len(gaps)):
        ps = np.asarray([table[(r, gi, thresholds[0])][0] for r in r_list])
        ns = np.asarray([table[(r, gi, thresholds[0])][1] for r in r_list])
        x = np.log(np.asarray(r_list, dtype=float))
        xc = x - x.mean()
        denom = float((xc**2).sum())
        slope = float((xc * ps).sum() / denom) if denom > 0 else 0.0
        # binomial noise propagated through the least-squares weights
        var = float(((xc / denom) ** 2 * ps * (1 - ps) / np.maximum(ns, 1)).sum())
        trend[str(gi)] = {
            "slope": slope,
            "se": math.sqrt(max(var, 1e-18)),
            "n_min": int(ns.min()),
        }
    rec.summary = {
        "min_conditional_prob": worst,
        "threshold": thresholds[0],
        "trend_by_gap": trend,
    }
    return rec


# -- bottleneck ----------------------------------------------------------------


def _slit_disk_triple(L: float, r: float) -> DomainTriple:
    sites = [
        (x, y)
        for (x, y) in map(tuple, lattice_disk(L).tolist())
        if not (y == 0 and x >= r)
    ]
    edges = boundary_edges(sites)
    ea = next(
        e for e in edges if e.inner == (int(r) - 1, 0) and e.outer == (int(r), 0)
    )
    eb = nearest_boundary_edge(edges, -L + 0j)
    return DomainTriple(sites, ea, eb)


def exp_bottleneck(config: ExperimentConfig) -> ResultRecord:
    rec = ResultRecord(config=config)
    r = float(config.get("r", 8))
    R_list = config.float_list("R_list", [16, 32, 64, 128])
    L = float(config.get("L", 1.5 * max(R_list)))
    reps = config.replicas
    triple = _slit_disk_triple(L, r)
    tab = prepare_sampler(triple)
    scratch = (
        np.empty(len(triple.sites) + 1, dtype=np.int32),
        np.full(len(triple.sites), -1, dtype=np.int32),
    )
    seeds = _seeds(config, "bottleneck", reps)
    hits = {R: 0 for R in R_list}
    for i in range(reps):
        saw = sample_lerw(tab, seed=int(seeds[i]), scratch=scratch)
        for R in R_list:
            if bottleneck_event(saw, r, R):
                hits[R] += 1
    for R in R_list:
        rec.add(R, -1, "bottleneck_hits", hits[R])
        rec.add(R, -1, "samples", reps)
        rec.add(R, -1, "prob", hits[R] / reps)
    ratios = [r / R for R in R_list]
    slope, lo, hi = bootstrap_slope(
        ratios, None, config.seed, counts=[(hits[R], reps) for R in R_list]
    )
    rec.summary = {
        "ratio_exponent": {"slope": slope, "ci": [lo, hi]},
        "conjectured_exponent": 1.5,
        "prob_by_R": {str(R): hits[R] / reps for R in R_list},
    }
    return rec


# -- driving extraction ----------------------------------------------------------


def _map_lerw_capacity_window(saw: Saw, halfplane_map, h: float, cap: float = 1.0,
                              chunk: int = 512):
    """Map the walk into H chunk by chunk and unzip to the capacity window.

    Returns (mesoscopic record, fine chain, lattice steps consumed).
    """
    pts_dom = saw.points_complex()[:-1]  # the terminal midpoint is the map's pole
    mapped = []
    total = 0.0
    for start in range(0, len(pts_dom), chunk):
        block = halfplane_map(pts_dom[start : start + chunk])
        mapped.append(block)
        # cheap capacity upper bound: unzip lazily only when plausibly needed
        cur = np.concatenate(mapped)
        rec, chain, _ = extract_driving(cur, h=h, cap_max=cap * 1.05)
        total = chain.total_capacity
        if total >= cap:
            # count lattice steps consumed: absorbed points index
            consumed = len(chain) + 1
            return rec, chain, consumed
    rec, chain, _ = extract_driving(np.concatenate(mapped), h=h, cap_max=cap * 1.05)
    return rec, chain, len(chain) + 1


def exp_driving(config: ExperimentConfig) -> ResultRecord:
    rec = ResultRecord(config=config)
    n_list = config.int_list("n_list", [100, 200, 400])
    reps0 = config.replicas
    h = config.h
    t_grid = np.linspace(0.1, 1.0, 10)
    ks_by_n = {}
    for N in n_list:
        reps = max(200, int(reps0 * n_list[0] / N))
        triple = approximate_domain(AnalyticShape.disk(), N)
        m = map_to_halfplane(triple, refine=int(config.get("refine", 0)))
        tab = prepare_sampler(triple)
        scratch = (
            np.empty(len(triple.sites) + 1, dtype=np.int32),
            np.full(len(triple.sites), -1, dtype=np.int32),
        )
        seeds = _seeds(config, f"driving-N{N}", reps)
        u_at = np.zeros((reps, len(t_grid)))
        u_at_h2 = np.zeros((reps, len(t_grid)))
        increments = []
        for i in range(reps):
            saw = sample_lerw(tab, seed=int(seeds[i]), scratch=scratch)
            meso, chain, _ = _map_lerw_capacity_window(saw, m, h=h)
            meso2 = extract_driving_record_at(chain, h / 2)
            for j, t in enumerate(t_grid):
                u_at[i, j] = meso.value_at(t)
                u_at_h2[i, j] = meso2.value_at(t)
            xi = np.diff(meso.values)
            dt_m = np.diff(meso.times)
            ok = dt_m > h * 0.5
            increments.append(xi[ok] / np.sqrt(dt_m[ok]))
        var_t = u_at.var(axis=0)
        slope = float(np.sum(var_t * t_grid) / np.sum(t_grid**2))
        var_t2 = u_at_h2.var(axis=0)
        slope_h2 = float(np.sum(var_t2 * t_grid) / np.sum(t_grid**2))
        norm_inc = np.concatenate(increments)
        from scipy import stats

        ks = float(stats.kstest(norm_inc, "norm").statistic)
        skew = float(stats.skew(norm_inc))
        drift = float(u_at[:, -1].mean())
        drift_se = float(u_at[:, -1].std(ddof=1) / math.sqrt(reps))
        ks_by_n[N] = ks
        for j, t in enumerate(t_grid):
            rec.add(f"N{N}", -1, f"var_U_{t:.1f}", float(var_t[j]))
        rec.add_many(f"N{N}", "U_1", u_at[:, -1])
        rec.add(f"N{N}", -1, "var_slope", slope)
        rec.add(f"N{N}", -1, "var_slope_half_h", slope_h2)
        rec.add(f"N{N}", -1, "ks_normal", ks)
        rec.add(f"N{N}", -1, "skewness", skew)
        rec.add(f"N{N}", -1, "drift", drift)
        rec.add(f"N{N}", -1, "drift_se", drift_se)
    rec.summary = {
        "var_slope_by_N": {
            str(N): rec.values("var_slope", f"N{N}")[0] for N in n_list
        },
        "var_slope_half_h_by_N": {
            str(N): rec.values("var_slope_half_h", f"N{N}")[0] for N in n_list
        },
        "ks_by_N": {str(N): ks_by_n[N] for N in n_list},
        "ks_decreasing": bool(
            all(ks_by_n[a] >= ks_by_n[b] for a, b in zip(n_list, n_list[1:]))
        ),
    }
    return rec


def extract_driving_record_at(chain, h: float):
    """Mesoscopic record of an already-unzipped chain at a different scale."""
    from ..loewner import DrivingRecord

    times = [0.0]
    values = [chain.bases[0] if len(chain) else 0.0]
    t_cum = 0.0
    piece = 0.0
    for k in range(len(chain)):
        t_cum += chain.dts[k]
        piece += chain.dts[k]
        if piece >= h * (1 - 1e-9) or k == len(chain) - 1:
            times.append(t_cum)
            values.append(chain.bases[k])
            piece = 0.0
    return DrivingRecord(np.asarray(times), np.asarray(values))


# -- natural time ------------------------------------------------------------------


def exp_natural_time(config: ExperimentConfig) -> ResultRecord:
    rec = ResultRecord(config=config)
    n_list = config.int_list("n_list", [100, 200, 400])
    reps0 = config.replicas
    dt = config.dt
    from scipy import stats

    ks_by_n = {}
    var_ratio_by_n = {}
    for N in n_list:
        reps = max(100, int(reps0 * n_list[0] / N)) if bool(config.get("taper", False)) else reps0
        triple = approximate_domain(AnalyticShape.disk(), N)
        m = map_to_halfplane(triple, refine=int(config.get("refine", 0)))
        tab = prepare_sampler(triple)
        scratch = (
            np.empty(len(triple.sites) + 1, dtype=np.int32),
            np.full(len(triple.sites), -1, dtype=np.int32),
        )
        seeds = _seeds(config, f"nat-lerw-N{N}", reps)
        t_steps = np.empty(reps)
        for i in range(reps):
            saw = sample_lerw(tab, seed=int(seeds[i]), scratch=scratch)
            _, chain, consumed = _map_lerw_capacity_window(saw, m, h=config.h)
            t_steps[i] = consumed
        t_check = t_steps * N ** (-1.25)
        rng = _rng(config, f"nat-sle-N{N}")
        thetas = np.empty(reps)
        eps_grid = np.asarray(config.float_list("eps_grid", [0.015, 0.03, 0.06, 0.12]))
        for i in range(reps):
            drec = sample_driving(2.0, 1.0, dt, rng)
            cur = trace(drec)
            dom = map_into_domain(cur, m)
            scaled = Curve(points=dom.points / N, times=dom.times, tag="capacity")
            prof = minkowski_content(scaled, d=1.25, eps_grid=eps_grid)
            thetas[i] = prof.contents[-1]
        a = t_check / t_check.mean()
        b = thetas / thetas.mean()
        ks = float(stats.ks_2samp(a, b).statistic)
        vr = float(a.var(ddof=1) / b.var(ddof=1))
        ks_by_n[N] = ks
        var_ratio_by_n[N] = vr
        rec.add_many(f"N{N}", "T_check", t_check)
        rec.add_many(f"N{N}", "Theta_check", thetas)
        rec.add(f"N{N}", -1, "ks", ks)
        rec.add(f"N{N}", -1, "var_ratio", vr)
    rec.summary = {
        "ks_by_N": {str(N): ks_by_n[N] for N in n_list},
        "var_ratio_by_N": {str(N): var_ratio_by_n[N] for N in n_list},
        "ks_decreasing": bool(
            all(ks_by_n[a] >= ks_by_n[b] for a, b in zip(n_list, n_list[1:]))
        ),
    }
    return rec


# -- escape probability ---------------------------------------------------------


def exp_escape(config: ExperimentConfig) -> ResultRecord:
    rec = ResultRecord(config=config)
    r_list = config.float_list("r_list", [8, 16, 32, 64])
    reps0 = config.replicas
    samples = []
    for r in r_list:
        reps = max(500, int(reps0 * r_list[0] / r))
        half = int(math.ceil(r)) + 2
        width = 2 * half + 1
        pos = np.full((width, width), -1, dtype=np.int32)
        buf = np.empty((len(lattice_disk(r)) + 4, 2), dtype=np.int32)
        seeds = _seeds(config, f"escape-r{r}", reps)
        vals = np.empty(reps)
        for i in range(reps):
            n = _kernels.interior_lerw_disk(float(r), np.uint32(seeds[i]), buf, pos, width, half)
            eta = buf[:n].astype(np.int64)
            vals[i] = escape_probability(r, eta)
        samples.append(vals)
        rec.add_many(r, "h_r", vals)
    slope, lo, hi = bootstrap_slope(r_list, samples, config.seed)
    means = [float(v.mean()) for v in samples]
    rec.summary = {
        "exponent": {"slope": slope, "ci": [lo, hi]},
        "mean_by_r": dict(zip(map(str, r_list), means)),
        "monotone_decreasing": bool(np.all(np.diff(means) < 0)),
        "all_in_unit_interval": bool(
            all(np.all((v >= 0) & (v <= 1)) for v in samples)
        ),
    }
    return rec


# -- oracle suite ------------------------------------------------------------------


def _oracle_catalog() -> list[DomainTriple]:
    def t(sites, a_in, a_out, b_in, b_out):
        return DomainTriple(
            sites, BoundaryEdge(tuple(a_in), tuple(a_out)), BoundaryEdge(tuple(b_in), tuple(b_out))
        )

    single = [(0, 0)]
    domino = [(0, 0), (1, 0)]
    ell = [(0, 0), (1, 0), (1, 1)]
    square22 = [(0, 0), (1, 0), (0, 1), (1, 1)]
    bar4 = [(x, 0) for x in range(4)]
    tee = [(0, 0), (1, 0), (2, 0), (1, 1)]
    ess = [(0, 0), (1, 0), (1, 1), (2, 1)]
    plus = [(0, 0), (1, 0), (-1, 0), (0, 1), (0, -1)]
    bar7 = [(x, 0) for x in range(7)]
    block23 = [(x, y) for x in range(3) for y in range(2)]
    block33 = [(x, y) for x in range(3) for y in range(3)]
    cat = [
        t(single, (0, 0), (1, 0), (0, 0), (-1, 0)),
        t(single, (0, 0), (1, 0), (0, 0), (0, 1)),
        t(domino, (0, 0), (-1, 0), (1, 0), (2, 0)),
        t(domino, (0, 0), (0, 1), (1, 0), (1, -1)),
        t(domino, (0, 0), (0, 1), (1, 0), (2, 0)),
        t(ell, (0, 0), (-1, 0), (1, 1), (1, 2)),
        t(ell, (0, 0), (0, -1), (1, 1), (2, 1)),
        t(square22, (0, 0), (-1, 0), (1, 1), (2, 1)),
        t(square22, (0, 0), (0, -1), (0, 1), (-1, 1)),
        t(bar4, (0, 0), (-1, 0), (3, 0), (4, 0)),
        t(bar4, (0, 0), (0, 1), (3, 0), (3, -1)),
        t(tee, (0, 0), (-1, 0), (2, 0), (3, 0)),
        t(tee, (1, 1), (1, 2), (2, 0), (2, -1)),
        t(ess, (0, 0), (0, -1), (2, 1), (2, 2)),
        t(plus, (0, 1), (0, 2), (0, -1), (0, -2)),
        t(plus, (1, 0), (2, 0), (-1, 0), (-2, 0)),
        t(bar7, (0, 0), (-1, 0), (6, 0), (7, 0)),
        t(block23, (0, 0), (-1, 0), (2, 1), (3, 1)),
        t(block23, (0, 0), (0, -1), (2, 0), (2, -1)),
        t(block33, (0, 0), (-1, 0), (2, 2), (3, 2)),
        t(block33, (1, 0), (1, -1), (1, 2), (1, 3)),
        t(block33, (0, 0), (0, -1), (2, 0), (2, -1)),
    ]
    return cat


def exp_oracle_suite(config: ExperimentConfig) -> ResultRecord:
    rec = ResultRecord(config=config)
    catalog = _oracle_catalog()
    n = config.replicas
    tv_max = 0.0
    weight_err_max = 0.0
    for idx, triple in enumerate(catalog):
        saws = enumerate_saws(triple)
        weights = np.array([exact_saw_weight(triple, s).weight for s in saws])
        H = boundary_poisson(build_harmonic_table(triple))
        weight_err = abs(weights.sum() - H) / H
        weight_err_max = max(weight_err_max, weight_err)
        probs = weights / weights.sum()
        keys = {tuple(map(tuple, s.vertices.tolist())): k for k, s in enumerate(saws)}
        counts = np.zeros(len(saws))
        tab = prepare_sampler(triple)
        seeds = _seeds(config, f"oracle-{idx}", n)
        scratch = (
            np.empty(len(triple.sites) + 1, dtype=np.int32),
            np.full(len(triple.sites), -1, dtype=np.int32),
        )
        for i in range(n):
            saw = sample_lerw(tab, seed=int(seeds[i]), scratch=scratch)
            counts[keys[tuple(map(tuple, saw.vertices.tolist()))]] += 1
        tv = 0.5 * float(np.abs(counts / n - probs).sum())
        tv_max = max(tv_max, tv)
        rec.add(f"triple{idx}", -1, "tv_distance", tv)
        rec.add(f"triple{idx}", -1, "weight_sum_rel_err", weight_err)
        rec.add(f"triple{idx}", -1, "n_saws", len(saws))
    # loop-erasure identities on random walks
    n_walks = int(config.get("walks", 100_000))
    rng = _rng(config, "oracle-walks")
    idem_fail = 0
    prefix_fail = 0
    steps = np.array([[1, 0], [-1, 0], [0, 1], [0, -1]])
    for i in range(n_walks):
        L = int(rng.integers(1, 120))
        walk = np.vstack([[0, 0], np.cumsum(steps[rng.integers(0, 4, size=L)], axis=0)])
        le1 = loop_erase(walk).vertices
        if not np.array_equal(le1, loop_erase(le1).vertices):
            idem_fail += 1
        lo = walk.min(axis=0)
        hi = walk.max(axis=0)
        head = np.array([[lo[0] - 1, walk[0, 1]]])
        tail = np.array([[hi[0] + 1, walk[-1, 1]]])
        le2 = loop_erase(np.vstack([head, walk, tail])).vertices
        if not np.array_equal(le2, np.vstack([head, le1, tail])):
            prefix_fail += 1
    rec.add("walks", -1, "idempotence_failures", idem_fail)
    rec.add("walks", -1, "prefix_failures", prefix_fail)
    rec.summary = {
        "catalog_size": len(catalog),
        "max_tv_distance": tv_max,
        "max_weight_sum_rel_err": weight_err_max,
        "idempotence_failures": idem_fail,
        "prefix_failures": prefix_fail,
    }
    return rec


EXPERIMENT_RUNNERS = {
    "one-point": exp_one_point,
    "conditional-hitting": exp_conditional_hitting,
    "growth": exp_growth,
    "maximal": exp_maximal,
    "two-point": exp_two_point,
    "separation": exp_separation,
    "bottleneck": exp_bottleneck,
    "driving": exp_driving,
    "natural-time": exp_natural_time,
    "escape": exp_escape,
    "oracle-suite": exp_oracle_suite,
}


def run_experiment(config: ExperimentConfig) -> ResultRecord:
    return EXPERIMENT_RUNNERS[config.experiment](config)
