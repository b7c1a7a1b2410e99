"""Top-level Monte-Carlo harnesses.

Every experiment is trial-parallel with derived per-trial seeds
(mix(master_seed, i)), so per-trial rows are byte-identical whatever the
worker count.  Rates proved in the source material carry unknown constants;
aggregates here are therefore trends with confidence intervals, and hard
gates appear only where one side is analytic.

Endpoint sampling in the coalescence experiment is a sampled supremum (four
corner-extremal tuples plus k random ones), reported as such.
"""

from __future__ import annotations

import math
import random
import time
import warnings
from dataclasses import dataclass, field

import numpy as np

from .env import (
    EdgeKey,
    Environment,
    GaussianCoupling,
    StandardGaussian,
    combine_seed,
    dist_spec,
    parse_dist,
    std_normal_cdf,
    std_normal_quantile,
)
from .geodesic import geodesic, multi_geodesic, symmetric_difference
from .geometry import IntervalJ, has_bounded_slope, pioneer_profile
from .reporting import ExperimentReport
from .restricted import RestrictedQuery, attractive_interval_detail, _counted_fn, _hop_cap, _slices, dependence_region
from .runner import mean_stderr, run_trials, wilson_interval

__all__ = [
    "ExperimentConfig",
    "coalescence_experiment",
    "midpoint_experiment",
    "attractiveness_diagnostic",
    "wrong_direction_probe",
    "tail_fit",
    "mw_check_gaussian",
    "mw_check_general",
    "MWGeneralResult",
    "enumerate_restricted_paths",
    "restricted_time_event",
    "box_event",
]

KINDS = ("coalesce", "midpoint", "attract", "probe", "tails")


@dataclass(frozen=True)
class ExperimentConfig:
    kind: str
    dist: str  # distribution spec string
    master_seed: int
    trials: int
    params: dict = field(default_factory=dict)
    workers: int = 1

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown experiment kind {self.kind!r}")
        if self.trials < 1:
            raise ValueError("trials must be >= 1")
        parse_dist(self.dist)  # fail fast on bad specs

    def echo(self, derived=None) -> dict:
        out = {
            "kind": self.kind,
            "dist": self.dist,
            "master_seed": self.master_seed,
            "trials": self.trials,
            "workers": self.workers,
            "params": dict(self.params),
        }
        if derived:
            out["derived"] = derived
        return out


def _require_atomless(cfg):
    d = parse_dist(cfg.dist)
    if not d.atomless:
        raise ValueError(f"{cfg.kind} requires an atomless distribution (got {cfg.dist})")
    return d


def _trial_seed(cfg, i):
    return combine_seed(cfg.master_seed, i)


def _l1(v):
    return abs(v[0]) + abs(v[1])


# ---------------------------------------------------------------------------
# coalescence
# ---------------------------------------------------------------------------


def _coal_trial(a):
    env = Environment(seed=a["seed"], dist=parse_dist(a["dist"]))
    y = tuple(a["y"])
    ell = a["ell"]
    rng = random.Random(combine_seed(a["seed"], 0xC0A1E5CE))
    BL, BR, TL, TR = (-ell, -ell), (ell, -ell), (-ell, ell), (ell, ell)

    def plus(p, q):
        return (p[0] + q[0], p[1] + q[1])

    tuples = [
        (BL, plus(y, BL), TR, plus(y, TR)),
        (TL, plus(y, TL), BR, plus(y, BR)),
        (BL, plus(y, TR), TR, plus(y, BL)),
        (TL, plus(y, BR), BR, plus(y, TL)),
    ]
    for _ in range(a["k_random"]):
        u = (rng.randint(-ell, ell), rng.randint(-ell, ell))
        z = (rng.randint(-ell, ell), rng.randint(-ell, ell))
        v = plus(y, (rng.randint(-ell, ell), rng.randint(-ell, ell)))
        w = plus(y, (rng.randint(-ell, ell), rng.randint(-ell, ell)))
        tuples.append((u, v, z, w))

    by_source = {}
    for (u, v, z, w) in tuples:
        by_source.setdefault(u, set()).add(v)
        by_source.setdefault(z, set()).add(w)
    paths = {}
    for s in sorted(by_source):
        for t, (_, p) in multi_geodesic(env, s, sorted(by_source[s])).items():
            paths[(s, t)] = p
    worst = 0
    for (u, v, z, w) in tuples:
        worst = max(worst, symmetric_difference(paths[(u, v)], paths[(z, w)]))
    return (a["index"], worst, int(worst > a["threshold"]))


def coalescence_experiment(cfg: ExperimentConfig) -> ExperimentReport:
    """Sampled-sup symmetric difference of geodesics with nearby endpoints."""
    _require_atomless(cfg)
    y = tuple(cfg.params["y"])
    eps = float(cfg.params.get("epsilon", 1 / 17))
    delta = float(cfg.params.get("delta", 0.0))
    k_random = int(cfg.params.get("k_random", 16))
    if y == (0, 0):
        raise ValueError("y must be nonzero")
    if not 0 < eps <= 1 / 17:
        raise ValueError("epsilon must lie in (0, 1/17]")
    if delta < 0:
        raise ValueError("delta must be >= 0")
    norm = _l1(y)
    ell = int(cfg.params.get("ell", math.floor(norm ** (1 / 8 - eps))))
    if ell < 0:
        raise ValueError("ell must be >= 0")
    threshold = 0.5 * norm ** (1 - delta)
    t0 = time.monotonic()
    args = [
        {"index": i, "seed": _trial_seed(cfg, i), "dist": cfg.dist, "y": y,
         "ell": ell, "k_random": k_random, "threshold": threshold}
        for i in range(cfg.trials)
    ]
    rows = run_trials(_coal_trial, args, cfg.workers)
    exceed = sum(r[2] for r in rows)
    p, lo, hi = wilson_interval(exceed, cfg.trials)
    mean_sd, se_sd = mean_stderr([r[1] for r in rows])
    return ExperimentReport(
        kind="coalesce",
        config=cfg.echo({"ell": ell, "threshold": threshold, "norm_y": norm,
                         "endpoint_sampling": "sampled-sup: 4 corner-extremal + k random tuples"}),
        columns=["trial", "max_symmetric_difference", "exceeds_threshold"],
        rows=rows,
        aggregates={
            "exceedance_frequency": p,
            "exceedance_wilson_lo": lo,
            "exceedance_wilson_hi": hi,
            "mean_max_symmetric_difference": mean_sd,
            "stderr_max_symmetric_difference": se_sd,
        },
        counters={"wall_clock_s": time.monotonic() - t0},
    )


# ---------------------------------------------------------------------------
# midpoint (BKS)
# ---------------------------------------------------------------------------


def _mid_trial(a):
    env = Environment(seed=a["seed"], dist=parse_dist(a["dist"]))
    u, v, z = tuple(a["u"]), tuple(a["v"]), tuple(a["z"])
    ell = a["ell"]
    hits = 0
    direct = 0
    shifts = [(wx, wy) for wx in range(-ell, ell + 1) for wy in range(-ell, ell + 1)]
    for (wx, wy) in shifts:
        uu = (u[0] + wx, u[1] + wy)
        vv = (v[0] + wx, v[1] + wy)
        zz = (z[0] + wx, z[1] + wy)
        _, p = geodesic(env, uu, vv)
        on = int(zz in set(p.vertices))
        hits += on
        if (wx, wy) == (0, 0):
            direct = on
    return (a["index"], direct, hits / len(shifts))


def midpoint_experiment(cfg: ExperimentConfig) -> ExperimentReport:
    """Edge-influence probe: direct and translation-averaged estimators of
    the probability that z lies on the geodesic between u and v."""
    _require_atomless(cfg)
    u = tuple(cfg.params.get("u", (0, 0)))
    v = tuple(cfg.params["v"])
    z = tuple(cfg.params["z"])
    eps = float(cfg.params.get("epsilon", 1 / 16))
    if len({u, v, z}) != 3:
        raise ValueError("u, v, z must be distinct")
    D = min(_l1((u[0] - z[0], u[1] - z[1])), _l1((v[0] - z[0], v[1] - z[1])))
    if D < 1:
        raise ValueError("z must be separated from u and v")
    ell = int(math.floor(D ** (1 / 8 - eps)))
    t0 = time.monotonic()
    args = [
        {"index": i, "seed": _trial_seed(cfg, i), "dist": cfg.dist,
         "u": u, "v": v, "z": z, "ell": ell}
        for i in range(cfg.trials)
    ]
    rows = run_trials(_mid_trial, args, cfg.workers)
    hits = sum(r[1] for r in rows)
    p, lo, hi = wilson_interval(hits, cfg.trials)
    avg_mean, avg_se = mean_stderr([r[2] for r in rows])
    return ExperimentReport(
        kind="midpoint",
        config=cfg.echo({"ell": ell, "D": D}),
        columns=["trial", "direct_indicator", "averaged_estimate"],
        rows=rows,
        aggregates={
            "direct_probability": p,
            "direct_wilson_lo": lo,
            "direct_wilson_hi": hi,
            "direct_stderr": math.sqrt(max(p * (1 - p), 1e-30) / cfg.trials),
            "averaged_probability": avg_mean,
            "averaged_stderr": avg_se,
        },
        counters={"wall_clock_s": time.monotonic() - t0},
    )


# ---------------------------------------------------------------------------
# attractiveness diagnostic
# ---------------------------------------------------------------------------


def _att_trial(a):
    env = Environment(seed=a["seed"], dist=parse_dist(a["dist"]))
    L, s, N = a["L"], a["s"], a["N"]
    _, g = geodesic(env, (0, 0), (L, s))
    prof = pioneer_profile(g)
    bounded = has_bounded_slope(prof, a["rho"], a["m"])
    cuts = a["cuts"]
    holds = 0
    for a_i, a_j in zip(cuts, cuts[1:]):
        ok, _, _, _ = attractive_interval_detail(
            env, g, IntervalJ(a_i, a_j), a["r"], rho1=a["rho1"], L=L, rho2=a["rho2"]
        )
        holds += ok
    frac = holds / N
    return (a["index"], frac, int(frac > a["xi"]), int(bounded))


def attractiveness_diagnostic(cfg: ExperimentConfig) -> ExperimentReport:
    """Per-interval sufficient-condition frequencies along a long geodesic."""
    dist = _require_atomless(cfg)
    L = int(cfg.params["L"])
    m = int(cfg.params["m"])
    N = int(cfg.params["N"])
    r = int(cfg.params["r"])
    xi = float(cfg.params.get("xi", 0.0))
    s = int(cfg.params.get("s", 0))
    rho = float(cfg.params.get("rho", 4.0))
    rho1 = float(cfg.params.get("rho1", 4.0 * dist.mean()))
    rho2 = float(cfg.params.get("rho2", 8.0))
    cuts = [round(i * L / N) for i in range(N + 1)]
    widths = [b - a for a, b in zip(cuts, cuts[1:])]
    if not all(m <= w <= 2 * m for w in widths):
        raise ValueError(f"partition widths {set(widths)} must lie in [m, 2m] = [{m}, {2*m}]")
    log2L = math.log(L) ** 2
    if r > min(N / log2L, N * N / log2L**3):
        warnings.warn("r exceeds the shape constraint r <= min(N/log^2 L, N^2/log^6 L) "
                      "(unknown constant taken as 1); results remain valid diagnostics")
    if max(r, log2L) > math.sqrt(m / r):
        warnings.warn("max(r, log^2 L) > sqrt(m/r); the tube-separation regime is not met "
                      "(unknown constant taken as 1)")
    t0 = time.monotonic()
    args = [
        {"index": i, "seed": _trial_seed(cfg, i), "dist": cfg.dist, "L": L, "s": s,
         "N": N, "m": m, "r": r, "xi": xi, "rho": rho, "rho1": rho1, "rho2": rho2,
         "cuts": cuts}
        for i in range(cfg.trials)
    ]
    rows = run_trials(_att_trial, args, cfg.workers)
    frac_mean, frac_se = mean_stderr([r_[1] for r_ in rows])
    ind = sum(r_[2] for r_ in rows)
    bs = sum(r_[3] for r_ in rows)
    p_ind, lo_i, hi_i = wilson_interval(ind, cfg.trials)
    p_bs, lo_b, hi_b = wilson_interval(bs, cfg.trials)
    return ExperimentReport(
        kind="attract",
        config=cfg.echo({"cuts": cuts, "rho1": rho1, "rho2": rho2, "rho": rho}),
        columns=["trial", "attractive_fraction", "fraction_exceeds_xi", "bounded_slope"],
        rows=rows,
        aggregates={
            "mean_attractive_fraction": frac_mean,
            "stderr_attractive_fraction": frac_se,
            "indicator_frequency": p_ind,
            "indicator_wilson_lo": lo_i,
            "indicator_wilson_hi": hi_i,
            "bounded_slope_frequency": p_bs,
            "bounded_slope_wilson_lo": lo_b,
            "bounded_slope_wilson_hi": hi_b,
        },
        counters={"wall_clock_s": time.monotonic() - t0},
    )


# ---------------------------------------------------------------------------
# wrong-direction probe
# ---------------------------------------------------------------------------


def _probe_trial(a):
    env = Environment(seed=a["seed"], dist=parse_dist(a["dist"]))
    n, th0 = a["n"], a["theta0"]
    target = (math.floor(n * math.cos(th0)), math.floor(n * math.sin(th0)))
    _, p = geodesic(env, (0, 0), target)
    worst = 0.0
    for (x, y) in p.vertices:
        if (x, y) == (0, 0):
            continue
        if abs(math.atan2(y, x)) >= a["theta_u"]:
            worst = max(worst, math.hypot(x, y))
    return (a["index"], worst, int(worst >= a["r_star"]))


def wrong_direction_probe(cfg: ExperimentConfig) -> ExperimentReport:
    """How far does a geodesic towards theta0 stray past the angle theta_u."""
    _require_atomless(cfg)
    n = int(cfg.params["n"])
    theta0 = float(cfg.params.get("theta0", 0.0))
    theta_u = float(cfg.params["theta_u"])
    r_star = float(cfg.params["r_star"])
    if not 0 <= theta0 <= math.pi / 4:
        raise ValueError("theta0 must lie in [0, pi/4]")
    if not math.pi / 4 < theta_u < math.pi / 2:
        raise ValueError("theta_u must lie in (pi/4, pi/2)")
    t0 = time.monotonic()
    args = [
        {"index": i, "seed": _trial_seed(cfg, i), "dist": cfg.dist,
         "n": n, "theta0": theta0, "theta_u": theta_u, "r_star": r_star}
        for i in range(cfg.trials)
    ]
    rows = run_trials(_probe_trial, args, cfg.workers)
    exceed = sum(r[2] for r in rows)
    p, lo, hi = wilson_interval(exceed, cfg.trials)
    mean_r, se_r = mean_stderr([r[1] for r in rows])
    return ExperimentReport(
        kind="probe",
        config=cfg.echo(),
        columns=["trial", "max_wrong_direction_radius", "exceeds_r_star"],
        rows=rows,
        aggregates={
            "exceedance_frequency": p,
            "exceedance_wilson_lo": lo,
            "exceedance_wilson_hi": hi,
            "mean_max_radius": mean_r,
            "stderr_max_radius": se_r,
        },
        counters={"wall_clock_s": time.monotonic() - t0},
    )


# ---------------------------------------------------------------------------
# tail fits
# ---------------------------------------------------------------------------


def _tail_trial(a):
    env = Environment(seed=a["seed"], dist=parse_dist(a["dist"]))
    d = a["distance"]
    t, p = geodesic(env, (0, 0), (d, 0))
    return (a["index"], d, t, p.n_edges())


def _tail_slope(values):
    """Least-squares slope of log empirical survival over the upper tail."""
    xs = np.sort(np.asarray(values, dtype=float))
    n = len(xs)
    if xs[0] == xs[-1]:
        return float("nan")  # degenerate (constant weights)
    lo = int(0.5 * n)
    pts = []
    for k in range(lo, n - 1):
        surv = (n - k) / n
        pts.append((xs[k], math.log(surv)))
    if len(pts) < 2:
        return float("nan")
    A = np.array([[x, 1.0] for x, _ in pts])
    b = np.array([y for _, y in pts])
    slope, _ = np.linalg.lstsq(A, b, rcond=None)[0]
    return float(slope)


def tail_fit(cfg: ExperimentConfig) -> ExperimentReport:
    """Empirical tails of T/l1, |geodesic|/l1 and |T-mean|/sqrt(l1); also
    suggests (rho1, rho2) as the smallest ratios with exceedance < 1e-3.

    Constant weights are allowed (degenerate tails, exact ratios); the
    uniqueness-dependent kinds are the ones that require atomless laws.
    """
    distances = [int(d) for d in cfg.params["distances"]]
    if not distances or min(distances) < 1:
        raise ValueError("distances must be positive")
    t0 = time.monotonic()
    args = []
    idx = 0
    for di, d in enumerate(distances):
        for i in range(cfg.trials):
            args.append({"index": idx, "seed": combine_seed(cfg.master_seed, di, i),
                         "dist": cfg.dist, "distance": d})
            idx += 1
    rows = run_trials(_tail_trial, args, cfg.workers)
    agg = {}
    time_ratios = []
    hop_ratios = []
    for d in distances:
        ts = np.array([r[2] for r in rows if r[1] == d])
        hs = np.array([r[3] for r in rows if r[1] == d])
        mean_t = float(np.mean(ts))
        std_t = float(np.std(ts, ddof=1)) if len(ts) > 1 else float("nan")
        agg[f"d{d}_mean_time"] = mean_t
        agg[f"d{d}_std_time"] = std_t
        agg[f"d{d}_mean_hops"] = float(np.mean(hs))
        agg[f"d{d}_concentration_q99_over_sqrt"] = float(
            np.quantile(np.abs(ts - mean_t), 0.99) / math.sqrt(d)
        )
        time_ratios.extend(ts / d)
        hop_ratios.extend(hs / d)
    agg["suggested_rho1"] = float(np.quantile(np.asarray(time_ratios), 1 - 1e-3))
    agg["suggested_rho2"] = float(np.quantile(np.asarray(hop_ratios), 1 - 1e-3))
    agg["tail_slope_time_ratio"] = _tail_slope(time_ratios)
    agg["tail_slope_hop_ratio"] = _tail_slope(hop_ratios)
    return ExperimentReport(
        kind="tails",
        config=cfg.echo({"distances": distances}),
        columns=["trial", "distance", "time", "hops"],
        rows=rows,
        aggregates=agg,
        counters={"wall_clock_s": time.monotonic() - t0},
    )


# ---------------------------------------------------------------------------
# Mermin-Wagner checks
# ---------------------------------------------------------------------------


def mw_check_gaussian(tau, box):
    """Closed-form check of the Gaussian shift inequality on a product box.

    tau: shift vector; box: list of (lo, hi) per coordinate (inf allowed).
    Returns (lhs, rhs, holds) with lhs = sqrt(P(X+tau in A) P(X-tau in A))
    and rhs = exp(-||tau||^2/2) P(A); holds allows 1e-9 slack.
    """
    tau = [float(t) for t in tau]
    box = [(float(lo), float(hi)) for lo, hi in box]
    if len(tau) != len(box):
        raise ValueError("tau and box dimensions differ")
    if not 1 <= len(tau) <= 4:
        raise ValueError("dimension must be between 1 and 4")
    for lo, hi in box:
        if not lo < hi:
            raise ValueError("box intervals must have lo < hi")

    def prob(shift):
        p = 1.0
        for (lo, hi), s in zip(box, shift):
            p *= float(std_normal_cdf(hi - s) - std_normal_cdf(lo - s))
        return p

    p_plus = prob(tau)                      # P(X + tau in A)
    p_minus = prob([-t for t in tau])       # P(X - tau in A)
    p_a = prob([0.0] * len(tau))
    lhs = math.sqrt(p_plus * p_minus)
    rhs = math.exp(-0.5 * sum(t * t for t in tau)) * p_a
    return lhs, rhs, lhs >= rhs - 1e-9


@dataclass(frozen=True)
class MWGeneralResult:
    p_event: float
    p_plus: float       # P(T+(A)), via the inverse map (down-shifted weights)
    p_minus: float      # P(T-(A)), via the inverse map (up-shifted weights)
    lhs: float
    rhs: float
    margin: float
    bootstrap_ci: float
    trials: int

    @property
    def holds_within(self):
        return self.margin >= -3 * self.bootstrap_ci


def mw_check_general(dist, tau, edges, event, trials, seed=0, bootstrap=200) -> MWGeneralResult:
    """Monte-Carlo check of sqrt(P(T+(A)) P(T-(A))) >= exp(-||tau||^2/2) P(A).

    tau maps a subset of `edges` to shifts in [0,1]; `event` is a vectorized
    predicate on the (trials x len(edges)) weight matrix whose columns follow
    `edges` (see box_event / restricted_time_event / scalar_event).  All
    three probabilities share base randomness; membership in the image sets
    T+(A), T-(A) is evaluated through the inverse maps, i.e. on the down- and
    up-shifted weight matrices respectively.
    """
    if trials < 100:
        raise ValueError("trials must be >= 100")
    edges = list(edges)
    index = {e: j for j, e in enumerate(edges)}
    tvec = np.zeros(len(edges))
    for e, s in tau.items():
        if not 0 <= s <= 1:
            raise ValueError("tau values must lie in [0,1]")
        if e not in index:
            raise ValueError(f"tau edge {e} not in the listed edge set")
        tvec[index[e]] = s
    coupling = GaussianCoupling(dist)
    rng = np.random.Generator(np.random.PCG64(np.random.SeedSequence([seed & (2**63 - 1), len(edges)])))
    u = rng.random((trials, len(edges)))
    w = np.asarray(dist.quantile(u))
    w_dn = w.copy()
    w_up = w.copy()
    hot = np.nonzero(tvec)[0]
    if hot.size:
        z = std_normal_quantile(dist.cdf(w[:, hot]))
        w_up[:, hot] = dist.quantile(std_normal_cdf(z + tvec[hot]))
        w_dn[:, hot] = dist.quantile(std_normal_cdf(z - tvec[hot]))
    ind_a = np.asarray(event(w), dtype=bool)
    ind_plus = np.asarray(event(w_dn), dtype=bool)   # w in T+(A) iff g-(w) in A
    ind_minus = np.asarray(event(w_up), dtype=bool)  # w in T-(A) iff g+(w) in A
    decay = math.exp(-0.5 * float(np.dot(tvec, tvec)))

    def margin_of(ia, ip, im):
        pa = float(np.mean(ia))
        pp = float(np.mean(ip))
        pm = float(np.mean(im))
        return math.sqrt(pp * pm) - decay * pa, pa, pp, pm

    margin, p_a, p_plus, p_minus = margin_of(ind_a, ind_plus, ind_minus)
    boots = []
    brng = np.random.Generator(np.random.PCG64(np.random.SeedSequence([seed & (2**63 - 1), 991])))
    for _ in range(bootstrap):
        pick = brng.integers(0, trials, size=trials)
        m, _, _, _ = margin_of(ind_a[pick], ind_plus[pick], ind_minus[pick])
        boots.append(m)
    ci = float(np.std(np.asarray(boots), ddof=1)) if bootstrap > 1 else float("inf")
    lhs = math.sqrt(p_plus * p_minus)
    return MWGeneralResult(p_a, p_plus, p_minus, lhs, decay * p_a, margin, ci, trials)


def box_event(edges, box):
    """Vectorized product-box membership event over the listed edges."""
    lo = np.array([b[0] for b in box])
    hi = np.array([b[1] for b in box])
    if len(box) != len(edges):
        raise ValueError("box dimension must match edge count")

    def event(w):
        return np.all((w >= lo) & (w <= hi), axis=1)

    return event


def scalar_event(fn, edges):
    """Adapter: wrap a per-environment predicate fn(dict EdgeKey->weight)."""

    def event(w):
        out = np.empty(w.shape[0], dtype=bool)
        for i in range(w.shape[0]):
            out[i] = bool(fn(dict(zip(edges, w[i]))))
        return out

    return event


def enumerate_restricted_paths(q: RestrictedQuery):
    """All simple paths in the restricted class (tiny fixtures only).

    Membership is pure topology, so the class can be enumerated once and
    reused as a weight-measurable event.
    """
    counted = _counted_fn(q)
    sources, targets = _slices(q)
    tgt = set(targets)
    quota = q.tube_quota
    cap = _hop_cap(q)
    log2L = q.log2L()
    x_lo, x_hi, y_lo, y_hi = dependence_region(q)
    out = []

    def dfs(src, v, hops, cnt, seen, trail):
        if v in tgt and cnt >= quota:
            d = abs(src[0] - v[0]) + abs(src[1] - v[1])
            if hops <= q.rho2 * max(d, log2L):
                out.append(tuple(trail))
        if hops >= cap:
            return
        x, y = v
        for nb in ((x + 1, y), (x - 1, y), (x, y + 1), (x, y - 1)):
            if nb in seen or not (x_lo <= nb[0] <= x_hi and y_lo <= nb[1] <= y_hi):
                continue
            from .env import edge_between

            if edge_between(v, nb) in q.p_edges:
                continue
            ncnt = cnt + 1 if (counted(v) and counted(nb)) else cnt
            seen.add(nb)
            trail.append(nb)
            dfs(src, nb, hops + 1, ncnt, seen, trail)
            trail.pop()
            seen.remove(nb)

    for s in sources:
        dfs(s, s, 0, 0, {s}, [s])
    if len(out) > 200_000:
        raise RuntimeError("fixture too large to enumerate")
    return out


def restricted_time_event(q: RestrictedQuery, threshold):
    """(edges, event) for the tube event {restricted time >= threshold}.

    Enumerates the restricted class once; the event then evaluates, per
    weight row, min over class paths of the path's weight sum.  The returned
    edge list is exactly the set the event is measurable with respect to.
    """
    from .env import edge_between

    paths = enumerate_restricted_paths(q)
    if not paths:
        edges = []

        def always(w):
            return np.ones(w.shape[0], dtype=bool)  # empty class: time = +inf

        return edges, always
    edge_lists = []
    edge_index = {}
    for p in paths:
        idxs = []
        for a, b in zip(p, p[1:]):
            e = edge_between(a, b)
            if e not in edge_index:
                edge_index[e] = len(edge_index)
            idxs.append(edge_index[e])
        edge_lists.append(np.asarray(idxs, dtype=np.int64))
    edges = [e for e, _ in sorted(edge_index.items(), key=lambda kv: kv[1])]

    def event(w):
        best = np.full(w.shape[0], np.inf)
        for idxs in edge_lists:
            np.minimum(best, w[:, idxs].sum(axis=1), out=best)
        return best >= threshold

    return edges, event
