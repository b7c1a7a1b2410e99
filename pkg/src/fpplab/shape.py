"""Time-constant probes, limit-shape boundary estimation, flat-edge tests,
and the staircase / CLT constructions behind the many-sides lower bound.

Everything here is Monte Carlo except where a constant environment collapses
to an l1 closed form.  Time-constant estimates are biased upward at finite n
(subadditivity), so trend checks must compare like n with like n; every
probe records its n for that reason.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .env import (
    Environment,
    ScaledShifted,
    Uniform,
    combine_seed,
    dist_spec,
    parse_dist,
    std_normal_cdf,
)
from .geodesic import metric_ball, passage_time
from .runner import mean_stderr, run_trials, wilson_interval

__all__ = [
    "DirectionProbe",
    "ShapeEstimate",
    "time_constant",
    "shape_boundary",
    "flat_edge_test",
    "FlatEdgeVerdict",
    "linf_bound_check",
    "staircase_bound",
    "berry_probe",
    "sides_witness",
    "sides_probe_schedule",
    "probe_to_csv",
    "boundary_to_csv",
]


@dataclass(frozen=True)
class DirectionProbe:
    direction: tuple
    n: int
    trials: int
    mean: float
    stderr: float

    def scaled(self, factor: float) -> "DirectionProbe":
        return DirectionProbe(self.direction, self.n, self.trials,
                              self.mean * factor, self.stderr * factor)


@dataclass(frozen=True)
class ShapeEstimate:
    t: float
    trials: int
    angles: np.ndarray     # bin centers in (-pi, pi]
    radius: np.ndarray     # mean of per-trial max radius, normalized by t
    stderr: np.ndarray
    seeds: tuple


def _floor_point(direction, n):
    # the nudge keeps lattice-intended directions exact through the
    # cos/atan2 float round trip (floor(7 - 1e-16) must be 7, not 6)
    return (math.floor(n * direction[0] + 1e-9), math.floor(n * direction[1] + 1e-9))


def _tc_trial(args):
    seed, spec, target = args
    e = Environment(seed=seed, dist=parse_dist(spec))
    return passage_time(e, (0, 0), target)


def time_constant(dist, direction, n, trials, seed=0, workers=1) -> DirectionProbe:
    """Monte-Carlo estimate of T(0, floor(n*direction))/n over fresh seeds."""
    if n < 1 or trials < 2:
        raise ValueError("need n >= 1 and trials >= 2")
    target = _floor_point(direction, n)
    if target == (0, 0):
        raise ValueError(f"direction {direction} collapses to the origin at n={n}")
    try:
        spec = dist_spec(dist)
    except ValueError:
        spec = None
    if spec is None or workers <= 1:
        times = [
            passage_time(Environment(seed=combine_seed(seed, i), dist=dist), (0, 0), target)
            for i in range(trials)
        ]
    else:
        args = [(combine_seed(seed, i), spec, target) for i in range(trials)]
        times = run_trials(_tc_trial, args, workers)
    mean, err = mean_stderr(times)
    return DirectionProbe(tuple(direction), n, trials, mean / n, err / n)


def shape_boundary(dist, t, trials, seed=0, bins=256) -> ShapeEstimate:
    """Angular max-radius profile of B(t)/t averaged over independent balls."""
    if t <= 0:
        raise ValueError("t must be > 0")
    if trials < 1:
        raise ValueError("trials must be >= 1")
    width = 2 * math.pi / bins
    per_trial = np.full((trials, bins), np.nan)
    seeds = tuple(combine_seed(seed, i) for i in range(trials))
    for i, s in enumerate(seeds):
        ball = metric_ball(Environment(seed=s, dist=dist), t)
        for (x, y) in ball:
            if x == 0 and y == 0:
                continue
            theta = math.atan2(y, x)
            b = min(int((theta + math.pi) / width), bins - 1)
            r = math.hypot(x, y) / t
            if not per_trial[i, b] >= r:
                per_trial[i, b] = r
    angles = -math.pi + width * (np.arange(bins) + 0.5)
    counts = np.sum(~np.isnan(per_trial), axis=0)
    import warnings

    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RuntimeWarning)  # all-NaN bins stay NaN
        mean = np.nanmean(per_trial, axis=0)
        sd = np.nanstd(per_trial, axis=0, ddof=1) if trials > 1 else np.full(bins, np.nan)
    stderr = sd / np.sqrt(np.maximum(counts, 1))
    return ShapeEstimate(t, trials, angles, mean, stderr, seeds)


@dataclass(frozen=True)
class FlatEdgeVerdict:
    verdict: str  # consistent-with-flat | strictly-convex | inconclusive
    gap: float
    stderr: float
    probes: tuple


def flat_edge_test(dist, theta1, theta2, R1=1.0, R2=1.0, n=32, trials=64, seed=0,
                   workers=1) -> FlatEdgeVerdict:
    """Additivity defect of the estimated norm along two directions.

    gap = mu(R1 e^{i theta1}) + mu(R2 e^{i theta2}) - mu(sum); always >= 0 up
    to noise by the triangle inequality, and 0 exactly on a shared flat edge.
    The three-way verdict guards against overclaiming from noise: convexity
    needs 3 sigma, flatness is only claimed inside 1 sigma.
    """
    if (theta1, R1) == (theta2, R2):
        raise ValueError("directions must be distinct")
    u1 = (R1 * math.cos(theta1), R1 * math.sin(theta1))
    u2 = (R2 * math.cos(theta2), R2 * math.sin(theta2))
    u12 = (u1[0] + u2[0], u1[1] + u2[1])
    p1 = time_constant(dist, u1, n, trials, combine_seed(seed, 1), workers)
    p2 = time_constant(dist, u2, n, trials, combine_seed(seed, 2), workers)
    p12 = time_constant(dist, u12, n, trials, combine_seed(seed, 3), workers)
    gap = p1.mean + p2.mean - p12.mean
    se = math.sqrt(p1.stderr**2 + p2.stderr**2 + p12.stderr**2)
    if se > 0 and gap > 3 * se:
        verdict = "strictly-convex"
    elif abs(gap) < max(se, 1e-15):
        verdict = "consistent-with-flat"
    else:
        verdict = "inconclusive"
    return FlatEdgeVerdict(verdict, gap, se, (p1, p2, p12))


def linf_bound_check(dist, x, n=32, trials=64, seed=0, workers=1):
    """Check mu(x) >= ||x||_inf * mu(1,0) within Monte-Carlo noise.

    Returns (holds, margin, stderr); holds allows a 3 sigma shortfall.
    """
    px = time_constant(dist, x, n, trials, combine_seed(seed, 1), workers)
    p10 = time_constant(dist, (1.0, 0.0), n, trials, combine_seed(seed, 2), workers)
    xinf = max(abs(x[0]), abs(x[1]))
    margin = px.mean - xinf * p10.mean
    se = math.sqrt(px.stderr**2 + (xinf * p10.stderr) ** 2)
    return margin >= -3 * se, margin, se


def _validate_unit_X(dist):
    lo, hi = dist.support()
    if lo < 0 or hi > 1:
        raise ValueError("X must be supported on [0,1]")
    if not dist.atomless:
        raise ValueError("X must be atomless with positive variance")


def _draw_sums(dist, M, trials, rng):
    """Column sums of (trials x M) iid draws, chunked to bound memory."""
    out = np.empty(trials)
    done = 0
    chunk = max(1, min(trials, 8_000_000 // max(M, 1)))
    while done < trials:
        k = min(chunk, trials - done)
        u = rng.random((k, M))
        out[done : done + k] = np.asarray(dist.quantile(u)).sum(axis=1)
        done += k
    return out


@dataclass(frozen=True)
class StaircaseResult:
    lhs_estimate: float
    lhs_stderr: float
    rhs_bound: float
    gap: float

    @property
    def gap_stderr(self):
        return self.lhs_stderr


def staircase_bound(dist_X, epsilon, delta, trials, seed=0) -> StaircaseResult:
    """Expected cost of the better of two disjoint one-up staircase segments.

    Each segment has 1 + 1/delta edges of weight 1 + epsilon*X; the minimum
    of the two independent copies beats the mean by about
    epsilon*sigma*sqrt(M/pi), which is the sqrt(delta) separation driving the
    flat-edge exclusion.  Returns the Monte-Carlo lhs E[min(T,T')], the
    deterministic rhs (1+1/delta)(1+epsilon*E[X]) and gap = rhs - lhs.
    """
    _validate_unit_X(dist_X)
    if epsilon <= 0:
        raise ValueError("epsilon must be > 0")
    inv = 1.0 / delta
    if abs(inv - round(inv)) > 1e-9:
        raise ValueError("1/delta must be an integer")
    if trials < 2:
        raise ValueError("trials must be >= 2")
    M = int(round(inv)) + 1
    rng = np.random.Generator(np.random.PCG64(np.random.SeedSequence([seed, M])))
    s1 = _draw_sums(dist_X, M, trials, rng)
    s2 = _draw_sums(dist_X, M, trials, rng)
    t1 = M + epsilon * s1
    t2 = M + epsilon * s2
    lo = np.minimum(t1, t2)
    lhs = float(np.mean(lo))
    lhs_se = float(np.std(lo, ddof=1) / math.sqrt(trials))
    rhs = M * (1.0 + epsilon * dist_X.mean())
    return StaircaseResult(lhs, lhs_se, rhs, rhs - lhs)


def berry_probe(dist_X, M, trials, seed=0):
    """Empirical P(sum of M iid X <= M*E[X] - sqrt(M)) with Wilson interval.

    Returns (estimate, lo, hi).  The CLT limit is Phi(-1/sigma_X).
    """
    _validate_unit_X(dist_X)
    if M < 2:
        raise ValueError("M must be >= 2")
    threshold = M * dist_X.mean() - math.sqrt(M)
    rng = np.random.Generator(np.random.PCG64(np.random.SeedSequence([seed, 7, M])))
    hits = 0
    done = 0
    chunk = max(1, min(trials, 16_000_000 // max(M, 1)))
    while done < trials:
        k = min(chunk, trials - done)
        u = rng.random((k, M))
        s = np.asarray(dist_X.quantile(u)).sum(axis=1)
        hits += int(np.count_nonzero(s <= threshold))
        done += k
    return wilson_interval(hits, trials)


def berry_clt_limit(dist_X, samples=200_001):
    """Phi(-1/sigma_X), with sigma from the quantile representation."""
    u = (np.arange(samples) + 0.5) / samples
    x = np.asarray(dist_X.quantile(u))
    sigma = float(np.std(x))
    return float(std_normal_cdf(-1.0 / sigma))


def sides_probe_schedule(epsilon, k):
    """delta_i = epsilon * log^{3i}(1/epsilon) for i = 1..k."""
    if not 0 < epsilon < 1:
        raise ValueError("epsilon must be in (0,1)")
    L = math.log(1.0 / epsilon)
    return [epsilon * L ** (3 * i) for i in range(1, k + 1)]


def sides_witness(epsilon, probes, n=32, trials=64, seed=0, workers=1):
    """Accumulate flat-edge verdicts for G = 1 + epsilon*U[0,1].

    QUALITATIVE ONLY: the separation constants are existential, so this
    report is evidence toward the many-sides lower bound, never a
    certificate.  `probes` is a list of (delta1, delta2) pairs, each
    required to satisfy delta1*log^3(1/delta1) <= delta2.
    """
    if epsilon <= 0:
        raise ValueError("epsilon must be > 0 (constant weights have no perturbation)")
    results = []
    for (d1, d2) in probes:
        if d1 <= 0 or d2 <= 0:
            raise ValueError("probe deltas must be positive")
        if d1 < 1 and d1 * math.log(1.0 / d1) ** 3 > d2:
            raise ValueError(f"probe pair ({d1}, {d2}) violates delta1 log^3(1/delta1) <= delta2")
        G = ScaledShifted(Uniform(0.0, 1.0), epsilon)
        fe = flat_edge_test(
            G, math.atan(d1), math.atan(d2), 1.0, 1.0, n, trials,
            combine_seed(seed, len(results)), workers
        )
        results.append({"delta1": d1, "delta2": d2, "verdict": fe.verdict,
                        "gap": fe.gap, "stderr": fe.stderr})
    convex = sum(1 for r in results if r["verdict"] == "strictly-convex")
    return {
        "header": "qualitative evidence only; separation constants are existential",
        "epsilon": epsilon,
        "n": n,
        "trials": trials,
        "probes": results,
        "strictly_convex_count": convex,
    }


def probe_to_csv(probes) -> str:
    lines = ["direction_x,direction_y,n,mean,stderr"]
    for p in probes:
        lines.append(
            f"{p.direction[0]:.17g},{p.direction[1]:.17g},{p.n},{p.mean:.17g},{p.stderr:.17g}"
        )
    return "\n".join(lines) + "\n"


def boundary_to_csv(est: ShapeEstimate) -> str:
    lines = ["theta,radius,stderr"]
    for th, r, se in zip(est.angles, est.radius, est.stderr):
        lines.append(f"{th:.17g},{r:.17g},{se:.17g}")
    return "\n".join(lines) + "\n"
