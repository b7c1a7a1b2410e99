import math

import numpy as np
import pytest

from fpplab.env import Constant, Exponential, ScaledShifted, Uniform
from fpplab.shape import (
    berry_clt_limit,
    berry_probe,
    boundary_to_csv,
    flat_edge_test,
    linf_bound_check,
    probe_to_csv,
    shape_boundary,
    sides_probe_schedule,
    sides_witness,
    staircase_bound,
    time_constant,
)


def diamond_radius(theta):
    return 1.0 / (abs(math.cos(theta)) + abs(math.sin(theta)))


# --- time_constant -----------------------------------------------------------


def test_time_constant_constant_dist():
    p = time_constant(Constant(2.0), (1.0, 0.0), 16, 4)
    assert p.mean == 2.0 and p.stderr == 0.0
    p2 = time_constant(Constant(2.0), (1.0, 1.0), 8, 4)
    assert p2.mean == 4.0  # c * l1((n,n))/n = 2c


def test_time_constant_validation():
    with pytest.raises(ValueError):
        time_constant(Constant(1), (1.0, 0.0), 0, 4)
    with pytest.raises(ValueError):
        time_constant(Constant(1), (1.0, 0.0), 4, 1)
    with pytest.raises(ValueError):
        time_constant(Constant(1), (0.001, 0.0), 4, 4)


def test_time_constant_subadditive_trend():
    lo = time_constant(Uniform(1, 2), (1.0, 0.0), 16, 100, seed=5)
    hi = time_constant(Uniform(1, 2), (1.0, 0.0), 32, 100, seed=6)
    assert hi.mean <= lo.mean + 3 * math.hypot(lo.stderr, hi.stderr)


def test_time_constant_reproducible():
    a = time_constant(Uniform(1, 2), (1.0, 0.25), 12, 20, seed=3)
    b = time_constant(Uniform(1, 2), (1.0, 0.25), 12, 20, seed=3)
    assert a == b


def test_time_constant_lattice_symmetry():
    n, trials = 16, 80
    pxy = time_constant(Uniform(1, 2), (1.0, 0.5), n, trials, seed=1)
    pyx = time_constant(Uniform(1, 2), (0.5, 1.0), n, trials, seed=2)
    pneg = time_constant(Uniform(1, 2), (-1.0, 0.5), n, trials, seed=3)
    tol = 3 * math.sqrt(pxy.stderr**2 + pyx.stderr**2)
    assert abs(pxy.mean - pyx.mean) < tol
    tol2 = 3 * math.sqrt(pxy.stderr**2 + pneg.stderr**2)
    assert abs(pxy.mean - pneg.mean) < tol2


def test_time_constant_homogeneity():
    # mu(2x) estimated at n vs 2*mu(x) at 2n target the same point
    a = time_constant(Uniform(1, 2), (2.0, 0.0), 12, 80, seed=9)
    b = time_constant(Uniform(1, 2), (1.0, 0.0), 24, 80, seed=10)
    assert abs(a.mean - 2 * b.mean) < 3 * math.sqrt(a.stderr**2 + (2 * b.stderr) ** 2)


# --- shape boundary ----------------------------------------------------------


def test_shape_boundary_constant_is_diamond():
    # For constant weights the ball IS the l1 diamond; the estimator output
    # must match binning the exact diamond vertex set.  (The Hausdorff-vs-
    # diamond geometry gate lives in the acceptance suite.)
    t = 30
    est = shape_boundary(Constant(1.0), t, trials=1, seed=0)
    bins = len(est.angles)
    width = 2 * math.pi / bins
    expected = np.full(bins, np.nan)
    for x in range(-t, t + 1):
        for y in range(-t, t + 1):
            if (x, y) == (0, 0) or abs(x) + abs(y) > t:
                continue
            b = min(int((math.atan2(y, x) + math.pi) / width), bins - 1)
            r = math.hypot(x, y) / t
            if not expected[b] >= r:
                expected[b] = r
    assert np.array_equal(np.isnan(est.radius), np.isnan(expected))
    assert np.allclose(est.radius[~np.isnan(expected)], expected[~np.isnan(expected)])
    # vertices stay inside the diamond (radius at their own angle), and the
    # estimator populates nearly every bin at this t
    for b in range(bins):
        if not np.isnan(est.radius[b]):
            assert est.radius[b] <= 1.0 + 1e-12
    assert np.isnan(est.radius).sum() < bins // 8


def test_shape_boundary_symmetry():
    est = shape_boundary(Uniform(1, 2), 14, trials=12, seed=4)
    bins = len(est.angles)
    # theta and -theta bins mirror around the middle
    for b in range(bins // 4, bins // 2):
        mirrored = bins - 1 - b
        r1, r2 = est.radius[b], est.radius[mirrored]
        se = 3 * math.hypot(est.stderr[b], est.stderr[mirrored]) + 1e-9
        if not (np.isnan(r1) or np.isnan(r2)):
            assert abs(r1 - r2) < max(se, 0.12)


def test_shape_boundary_convergence_trend():
    # rescaled boundaries drift less between larger t: max binwise gap
    # between t=20 and t=40 below that between t=10 and t=40
    ests = {t: shape_boundary(Uniform(1, 2), t, trials=12, seed=21) for t in (10, 20, 40)}

    def gap(a, b):
        d = np.abs(a.radius - b.radius)
        return float(np.nanmax(d))

    assert gap(ests[20], ests[40]) < gap(ests[10], ests[40])


def test_shape_boundary_validation():
    with pytest.raises(ValueError):
        shape_boundary(Constant(1), 0, 1)


def test_boundary_csv_format():
    est = shape_boundary(Constant(1.0), 10, trials=1, seed=0)
    csv = boundary_to_csv(est)
    head, first = csv.splitlines()[:2]
    assert head == "theta,radius,stderr"
    assert len(first.split(",")) == 3


# --- flat edge ----------------------------------------------------------------


def test_flat_edge_constant_l1_additive():
    # (1,0) and (1,1) lie on the same flat edge of the l1 diamond
    fe = flat_edge_test(Constant(1.0), 0.0, math.pi / 4, 1.0, math.sqrt(2.0), n=16, trials=4)
    assert fe.gap == pytest.approx(0.0, abs=1e-12)
    assert fe.verdict == "consistent-with-flat"


def test_flat_edge_triangle_inequality():
    # triangle inequality for the estimated norm: gap >= -3 sigma on 50
    # random direction pairs.  Directions are lattice vectors so the floored
    # endpoints add exactly; with real-valued directions the O(1/n) floor
    # bias would drown the inequality at desk n.
    import random as _random

    rng = _random.Random(3)
    for k in range(50):
        a1, b1 = rng.randint(1, 4), rng.randint(0, 3)
        a2, b2 = rng.randint(1, 4), rng.randint(0, 3)
        if (a1 * b2 - a2 * b1) == 0:
            b2 += 1
        th1, r1 = math.atan2(b1, a1), math.hypot(a1, b1)
        th2, r2 = math.atan2(b2, a2), math.hypot(a2, b2)
        fe = flat_edge_test(Uniform(1, 2), th1, th2, r1, r2, n=10, trials=12, seed=500 + k)
        assert fe.gap >= -3 * fe.stderr, f"pair {k}: gap {fe.gap} stderr {fe.stderr}"


def test_flat_edge_rejects_equal_directions():
    with pytest.raises(ValueError):
        flat_edge_test(Constant(1), 0.1, 0.1)


def test_linf_bound():
    holds, margin, se = linf_bound_check(Constant(1.0), (3.0, 1.0), n=8, trials=4)
    assert holds and margin == pytest.approx(1.0, abs=1e-12)
    holds2, margin2, _ = linf_bound_check(Constant(1.0), (1.0, 0.0), n=8, trials=4)
    assert holds2 and margin2 == pytest.approx(0.0, abs=1e-12)
    holds3, _, _ = linf_bound_check(Uniform(1, 2), (2.0, 1.0), n=16, trials=60, seed=8)
    assert holds3


# --- staircase / Berry --------------------------------------------------------


def test_staircase_validation():
    with pytest.raises(ValueError):
        staircase_bound(Uniform(0, 1), 0.1, 0.3, 100)  # 1/delta not integer
    with pytest.raises(ValueError):
        staircase_bound(Uniform(1, 2), 0.1, 0.25, 100)  # X not on [0,1]
    with pytest.raises(ValueError):
        staircase_bound(Uniform(0, 1), -1, 0.25, 100)


def test_staircase_gap_positive_and_matches_identity():
    res = staircase_bound(Uniform(0, 1), 0.1, 1 / 16, trials=40_000, seed=1)
    assert res.gap > 3 * res.lhs_stderr
    # independent identity: E[min] = M*E - E|S1-S2|/2, brute-forced separately
    M = 17
    rng = np.random.Generator(np.random.PCG64(12345))
    s1 = rng.random((200_000, M)).sum(axis=1)
    s2 = rng.random((200_000, M)).sum(axis=1)
    emin = M / 2 - float(np.mean(np.abs(s1 - s2))) / 2
    lhs_pred = M + 0.1 * emin
    assert abs(res.lhs_estimate - lhs_pred) < 6 * res.lhs_stderr


def test_staircase_epsilon_to_zero():
    res = staircase_bound(Uniform(0, 1), 1e-9, 1 / 8, trials=2_000, seed=2)
    assert abs(res.gap) < 1e-8


def test_staircase_sqrt_delta_scaling():
    r16 = staircase_bound(Uniform(0, 1), 0.1, 1 / 16, trials=60_000, seed=3)
    r64 = staircase_bound(Uniform(0, 1), 0.1, 1 / 64, trials=60_000, seed=4)
    ratio = r16.gap / r64.gap  # gap ~ eps/sqrt(delta): (eps*4)/(eps*8) = 0.5
    assert 0.35 < ratio < 0.65


def test_berry_probe_m2_boundary_case():
    # threshold 1 - sqrt(2) < 0: impossible event, estimator must report 0
    p, lo, hi = berry_probe(Uniform(0, 1), 2, trials=50_000, seed=5)
    assert p == 0.0 and lo == 0.0


def test_berry_probe_near_clt_limit():
    limit = berry_clt_limit(Uniform(0, 1))
    assert limit == pytest.approx(float(__import__("scipy.special", fromlist=["ndtr"]).ndtr(-math.sqrt(12))), abs=1e-9)
    p, lo, hi = berry_probe(Uniform(0, 1), 400, trials=400_000, seed=6)
    assert lo <= limit * 1.6 and hi >= limit * 0.4  # coarse: full gate in acceptance


def test_berry_probe_stabilizes_in_M():
    pa, loa, hia = berry_probe(Uniform(0, 1), 100, trials=300_000, seed=7)
    pb, lob, hib = berry_probe(Uniform(0, 1), 400, trials=300_000, seed=8)
    assert loa <= hib and lob <= hia  # overlapping intervals


def test_berry_validation():
    with pytest.raises(ValueError):
        berry_probe(Uniform(0, 1), 1, 100)
    with pytest.raises(ValueError):
        berry_probe(Exponential(1), 10, 100)


# --- sides witness -------------------------------------------------------------


def test_sides_schedule():
    eps = 0.05
    sch = sides_probe_schedule(eps, 3)
    L = math.log(1 / eps)
    assert sch[0] == pytest.approx(eps * L**3)
    assert len(sch) == 3
    with pytest.raises(ValueError):
        sides_probe_schedule(1.5, 2)


def test_sides_witness_empty():
    rep = sides_witness(0.05, [])
    assert rep["probes"] == [] and rep["strictly_convex_count"] == 0
    assert "qualitative" in rep["header"]


def test_sides_witness_runs_and_validates():
    rep = sides_witness(0.3, [(0.5, 0.9)], n=8, trials=6, seed=1)
    assert len(rep["probes"]) == 1
    assert rep["probes"][0]["verdict"] in ("strictly-convex", "consistent-with-flat", "inconclusive")
    with pytest.raises(ValueError):
        sides_witness(0.0, [])
    with pytest.raises(ValueError):
        sides_witness(0.1, [(0.01, 0.011)])  # schedule constraint violated


def test_probe_csv():
    p = time_constant(Constant(1.0), (1.0, 0.0), 4, 2)
    csv = probe_to_csv([p])
    assert csv.startswith("direction_x,direction_y,n,mean,stderr\n")
    assert ",4," in csv.splitlines()[1]
