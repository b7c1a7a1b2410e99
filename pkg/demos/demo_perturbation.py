"""The Gaussian quantile coupling and the shift inequality it powers.

Weights map to standard normals through h^{-1}; shifting there and mapping
back gives the monotone perturbations g+/g-.  The square-root inequality
relating the probabilities of the shifted events has a closed form for
product boxes under Gaussian weights and is checked by Monte Carlo for
Uniform(1,2) tube events.
"""

from fpplab import (
    EdgeKey,
    GaussianCoupling,
    HORIZONTAL,
    IntervalJ,
    LatticePath,
    Uniform,
    mw_check_gaussian,
    mw_check_general,
    perturb,
    query_for_path,
    restricted_time_event,
)

c = GaussianCoupling(Uniform(1, 2))
w = 1.3
for sigma in (0.0, 0.25, 0.5, 1.0):
    up = perturb(c, w, sigma, "up")
    dn = perturb(c, w, sigma, "down")
    print(f"sigma={sigma:4.2f}:  g-({w}) = {dn:.5f}   g+({w}) = {up:.5f}")

lhs, rhs, holds = mw_check_gaussian([0.3, 0.4], [(0, 1), (-1, 2)])
print(f"\nGaussian closed form: sqrt(P+ P-) = {lhs:.6f} >= {rhs:.6f} -> {holds}")

p = LatticePath([(i, 0) for i in range(5)])
q = query_for_path(p, IntervalJ(0, 4), 1, rho2=1.5, L=8, hop_bound_mode="enforced")
edges, event = restricted_time_event(q, threshold=6.0)
tau = {edges[0]: 0.3, edges[1]: 0.3}
res = mw_check_general(Uniform(1, 2), tau, edges, event, trials=50_000, seed=1)
print(f"tube event {{restricted time >= 6.0}} over {len(edges)} edges:")
print(f"  P(A) = {res.p_event:.4f}  P(T+A) = {res.p_plus:.4f}  P(T-A) = {res.p_minus:.4f}")
print(f"  margin = {res.margin:.5f} (bootstrap CI {res.bootstrap_ci:.5f}) "
      f"-> {'holds' if res.holds_within else 'VIOLATED'}")
