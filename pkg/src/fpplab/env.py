"""Random edge-weight environments on the square lattice.

The environment is an *infinite* weight field realized lazily: the weight of
an edge is a pure function of (seed, distribution, overlay, edge), produced by
a counter-mode avalanche mixer so that queries are bit-identical regardless of
traversal order, process, or worker count.  Signed coordinates are zig-zag
encoded before mixing so the whole lattice is stable across runs.

Also provided: the Gaussian quantile coupling h(x) = Q(Phi(x)) between a weight
distribution and the standard normal, and the monotone perturbation maps
g+/g- built from it (shift in Gaussian coordinates, map back).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import NamedTuple

import numpy as np
from scipy.special import ndtr, ndtri

__all__ = [
    "HORIZONTAL",
    "VERTICAL",
    "EdgeKey",
    "Constant",
    "Uniform",
    "Exponential",
    "ScaledShifted",
    "StandardGaussian",
    "WeightDistribution",
    "parse_dist",
    "dist_spec",
    "Environment",
    "edge_weight",
    "GaussianCoupling",
    "coupling_h",
    "coupling_h_inv",
    "perturb",
    "perturb_environment",
    "mix64",
    "mix64_array",
    "zigzag",
    "combine_seed",
    "std_normal_cdf",
    "std_normal_quantile",
]

_MASK64 = 0xFFFFFFFFFFFFFFFF
_SM_GAMMA = 0x9E3779B97F4A7C15
_SM_MUL1 = 0xBF58476D1CE4E5B9
_SM_MUL2 = 0x94D049BB133111EB


def mix64(z: int) -> int:
    """SplitMix64 finalizer on a 64-bit integer."""
    z = (z + _SM_GAMMA) & _MASK64
    z = ((z ^ (z >> 30)) * _SM_MUL1) & _MASK64
    z = ((z ^ (z >> 27)) * _SM_MUL2) & _MASK64
    return z ^ (z >> 31)


def mix64_array(z: np.ndarray) -> np.ndarray:
    """Vectorized mix64; bit-identical to the scalar version."""
    with np.errstate(over="ignore"):
        z = z + np.uint64(_SM_GAMMA)
        z = (z ^ (z >> np.uint64(30))) * np.uint64(_SM_MUL1)
        z = (z ^ (z >> np.uint64(27))) * np.uint64(_SM_MUL2)
        return z ^ (z >> np.uint64(31))


def zigzag(n: int) -> int:
    """Map a signed integer to an unsigned one (0,-1,1,-2,.. -> 0,1,2,3,..)."""
    return ((n << 1) ^ (n >> 63)) & _MASK64


def zigzag_array(n: np.ndarray) -> np.ndarray:
    n = n.astype(np.int64, copy=False)
    return (((n << np.int64(1)) ^ (n >> np.int64(63)))).astype(np.uint64)


def combine_seed(seed: int, *words: int) -> int:
    """Derive a sub-seed by absorbing words into the mixer state."""
    h = mix64(seed & _MASK64)
    for w in words:
        h = mix64(h ^ (w & _MASK64))
    return h


def std_normal_cdf(x):
    """Phi, exact to machine precision."""
    return ndtr(x)


def std_normal_quantile(p):
    """Phi^-1 on (0,1)."""
    return ndtri(p)


HORIZONTAL = 0
VERTICAL = 1


class EdgeKey(NamedTuple):
    """Canonical name of an undirected lattice edge.

    (x, y, HORIZONTAL) is the edge (x,y)-(x+1,y); (x, y, VERTICAL) is
    (x,y)-(x,y+1).  Every edge of Z^2 has exactly one key.
    """

    x: int
    y: int
    orientation: int

    def endpoints(self):
        if self.orientation == HORIZONTAL:
            return (self.x, self.y), (self.x + 1, self.y)
        return (self.x, self.y), (self.x, self.y + 1)


def edge_between(u, v) -> EdgeKey:
    """EdgeKey of the edge joining two adjacent vertices."""
    (ux, uy), (vx, vy) = u, v
    dx, dy = vx - ux, vy - uy
    if abs(dx) + abs(dy) != 1:
        raise ValueError(f"vertices {u} and {v} are not lattice-adjacent")
    if dx == 1:
        return EdgeKey(ux, uy, HORIZONTAL)
    if dx == -1:
        return EdgeKey(vx, vy, HORIZONTAL)
    if dy == 1:
        return EdgeKey(ux, uy, VERTICAL)
    return EdgeKey(vx, vy, VERTICAL)


# ---------------------------------------------------------------------------
# Weight distributions
# ---------------------------------------------------------------------------
#
# Every variant exposes cdf/quantile/mean, a support interval, and capability
# flags: `atomless` (assumption ABS) and `has_exp_moment` (assumption EXP).
# Quantiles run through numpy scalar ops only, so the scalar and vectorized
# paths produce bit-identical doubles.  Variants with plateaued CDFs inside
# their support are rejected at construction; for everything shipped here the
# strict-increase set is the whole support.


@dataclass(frozen=True)
class Constant:
    """Point mass at c (atom; kept for exact closed-form checks)."""

    c: float = 1.0

    def __post_init__(self):
        if self.c < 0:
            raise ValueError("Constant weight must be >= 0")

    atomless = False
    has_exp_moment = True

    def support(self):
        return (self.c, self.c)

    def cdf(self, w):
        return np.where(np.asarray(w) >= self.c, 1.0, 0.0)[()]

    def quantile(self, u):
        return np.full_like(np.asarray(u, dtype=np.float64), self.c)[()]

    def mean(self):
        return self.c


@dataclass(frozen=True)
class Uniform:
    a: float
    b: float

    def __post_init__(self):
        if not (0 <= self.a < self.b):
            raise ValueError("Uniform requires 0 <= a < b")

    atomless = True
    has_exp_moment = True

    def support(self):
        return (self.a, self.b)

    def cdf(self, w):
        return np.clip((np.asarray(w, dtype=np.float64) - self.a) / (self.b - self.a), 0.0, 1.0)[()]

    def quantile(self, u):
        return (self.a + np.asarray(u, dtype=np.float64) * (self.b - self.a))[()]

    def mean(self):
        return 0.5 * (self.a + self.b)


@dataclass(frozen=True)
class Exponential:
    rate: float

    def __post_init__(self):
        if self.rate <= 0:
            raise ValueError("Exponential rate must be > 0")

    atomless = True
    has_exp_moment = True  # E[exp(a t)] finite for a < rate

    def support(self):
        return (0.0, math.inf)

    def cdf(self, w):
        w = np.asarray(w, dtype=np.float64)
        return np.where(w <= 0, 0.0, -np.expm1(-self.rate * w))[()]

    def quantile(self, u):
        return (-np.log1p(-np.asarray(u, dtype=np.float64)) / self.rate)[()]

    def mean(self):
        return 1.0 / self.rate


@dataclass(frozen=True)
class ScaledShifted:
    """Distribution of 1 + epsilon * X for a base X supported on [0,1]."""

    base: "WeightDistribution"
    epsilon: float

    def __post_init__(self):
        if self.epsilon <= 0:
            raise ValueError("epsilon must be > 0")
        lo, hi = self.base.support()
        if lo < 0 or hi > 1:
            raise ValueError("ScaledShifted base must be supported on [0,1]")
        if not self.base.atomless:
            raise ValueError("ScaledShifted base must be atomless (no CDF plateaus)")

    @property
    def atomless(self):
        return self.base.atomless

    has_exp_moment = True

    def support(self):
        lo, hi = self.base.support()
        return (1.0 + self.epsilon * lo, 1.0 + self.epsilon * hi)

    def cdf(self, w):
        return self.base.cdf((np.asarray(w, dtype=np.float64) - 1.0) / self.epsilon)

    def quantile(self, u):
        return (1.0 + self.epsilon * np.asarray(self.base.quantile(u), dtype=np.float64))[()]

    def mean(self):
        return 1.0 + self.epsilon * self.base.mean()


@dataclass(frozen=True)
class StandardGaussian:
    """Test-only variant: negative support, never a valid edge-weight law.

    Exists so the degenerate coupling case (h = identity) and the
    Mermin-Wagner closed form can be exercised; Environment rejects it.
    """

    atomless = True
    has_exp_moment = True

    def support(self):
        return (-math.inf, math.inf)

    def cdf(self, w):
        return ndtr(w)

    def quantile(self, u):
        return ndtri(u)

    def mean(self):
        return 0.0


WeightDistribution = Constant | Uniform | Exponential | ScaledShifted | StandardGaussian


def affine_quantile_coeffs(dist):
    """(c0, c1) with quantile(u) = c0 + c1*u, or None if not affine.

    The numba engine regenerates weights in-kernel and is restricted to
    affine quantiles so the bits match the numpy path exactly.
    """
    if isinstance(dist, Uniform):
        return (dist.a, dist.b - dist.a)
    if isinstance(dist, ScaledShifted) and isinstance(dist.base, Uniform):
        a, b = dist.base.a, dist.base.b
        return (1.0 + dist.epsilon * a, dist.epsilon * (b - a))
    return None


def parse_dist(spec: str) -> WeightDistribution:
    """Parse `const:C`, `unif:A:B`, `exp:RATE`, `scaled:EPS:unif01`."""
    parts = spec.strip().split(":")
    kind = parts[0]
    try:
        if kind == "const" and len(parts) == 2:
            return Constant(float(parts[1]))
        if kind == "unif" and len(parts) == 3:
            return Uniform(float(parts[1]), float(parts[2]))
        if kind == "exp" and len(parts) == 2:
            return Exponential(float(parts[1]))
        if kind == "scaled" and len(parts) == 3 and parts[2] == "unif01":
            return ScaledShifted(Uniform(0.0, 1.0), float(parts[1]))
    except ValueError as err:
        raise ValueError(f"bad distribution spec {spec!r}: {err}") from err
    raise ValueError(f"unknown distribution spec {spec!r}")


def dist_spec(dist: WeightDistribution) -> str:
    """Inverse of parse_dist; serialized into every report."""
    if isinstance(dist, Constant):
        return f"const:{dist.c:.17g}"
    if isinstance(dist, Uniform):
        return f"unif:{dist.a:.17g}:{dist.b:.17g}"
    if isinstance(dist, Exponential):
        return f"exp:{dist.rate:.17g}"
    if isinstance(dist, ScaledShifted) and dist.base == Uniform(0.0, 1.0):
        return f"scaled:{dist.epsilon:.17g}:unif01"
    raise ValueError(f"distribution {dist!r} has no spec string")


# ---------------------------------------------------------------------------
# The environment
# ---------------------------------------------------------------------------


def _edge_unit(seed_mixed: int, e: EdgeKey) -> float:
    h = mix64(seed_mixed ^ zigzag(e.x))
    h = mix64(h ^ zigzag(e.y))
    h = mix64(h ^ e.orientation)
    return (h >> 11) * 2.0**-53


@dataclass(frozen=True)
class Environment:
    """Deterministic infinite weight field keyed by (seed, edge).

    Immutable; edge_weight is pure and safe to call concurrently.  Overlay
    entries (a finite EdgeKey -> weight map) take precedence over generated
    values, which is how fixtures pin specific edges.
    """

    seed: int
    dist: WeightDistribution
    overlay: dict = field(default_factory=dict)

    def __post_init__(self):
        lo, _ = self.dist.support()
        if lo < 0:
            raise ValueError("edge weights must be nonnegative; distribution has negative support")
        if isinstance(self.dist, Constant) and self.dist.c == 0:
            raise ValueError("Constant(0) environment rejected (degenerate metric)")
        for e, w in self.overlay.items():
            if w < 0:
                raise ValueError(f"overlay weight for {e} is negative")
        object.__setattr__(self, "_seed_mixed", mix64(self.seed & _MASK64))

    def weight(self, e: EdgeKey) -> float:
        ow = self.overlay.get(e)
        if ow is not None:
            return ow
        return float(self.dist.quantile(_edge_unit(self._seed_mixed, e)))

    def weight_between(self, u, v) -> float:
        return self.weight(edge_between(u, v))

    def with_overlay(self, extra: dict) -> "Environment":
        merged = dict(self.overlay)
        merged.update(extra)
        return replace(self, overlay=merged)


def edge_weight(env: Environment, e: EdgeKey) -> float:
    """Weight of edge e; total, pure, bit-stable."""
    return env.weight(e)


def edge_units_array(seed: int, ex: np.ndarray, ey: np.ndarray, orientation) -> np.ndarray:
    """Vectorized uniforms in [0,1) for many edges at once (same bits as scalar)."""
    sm = np.uint64(mix64(seed & _MASK64))
    h = mix64_array(sm ^ zigzag_array(np.asarray(ex)))
    h = mix64_array(h ^ zigzag_array(np.asarray(ey)))
    h = mix64_array(h ^ np.asarray(orientation).astype(np.uint64))
    return (h >> np.uint64(11)).astype(np.float64) * 2.0**-53


# ---------------------------------------------------------------------------
# Gaussian quantile coupling and Mermin-Wagner perturbation maps
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class GaussianCoupling:
    """Increasing bijection h with h(standard normal) = dist."""

    dist: WeightDistribution

    def __post_init__(self):
        if not self.dist.atomless:
            raise ValueError("coupling requires an atomless distribution")

    def h(self, x):
        return self.dist.quantile(ndtr(x))

    def h_inv(self, w):
        lo, hi = self.dist.support()
        w_arr = np.asarray(w, dtype=np.float64)
        if np.any(w_arr < lo) or np.any(w_arr > hi):
            raise ValueError("weight outside distribution support")
        return ndtri(self.dist.cdf(w))


def coupling_h(c: GaussianCoupling, x):
    return c.h(x)


def coupling_h_inv(c: GaussianCoupling, w):
    return c.h_inv(w)


def perturb(c: GaussianCoupling, w, sigma: float, direction: str):
    """g+/g-: shift by sigma in Gaussian coordinates.

    Nondecreasing in w and in sigma; `up` never decreases the weight, `down`
    never increases it.  sigma = 0 is the identity (exactly).
    """
    if not 0.0 <= sigma <= 1.0:
        raise ValueError("sigma must lie in [0,1]")
    if direction not in ("up", "down"):
        raise ValueError("direction must be 'up' or 'down'")
    if sigma == 0.0:
        c.h_inv(w)  # still validate support membership
        return w
    s = sigma if direction == "up" else -sigma
    return c.h(c.h_inv(w) + s)


def perturb_environment(env: Environment, tau: dict, direction: str) -> Environment:
    """New environment with weight(e) -> g±_{tau[e]}(weight(e)) for e in tau."""
    coupling = GaussianCoupling(env.dist)
    extra = {}
    for e, sigma in tau.items():
        extra[e] = float(perturb(coupling, env.weight(e), sigma, direction))
    return env.with_overlay(extra)
