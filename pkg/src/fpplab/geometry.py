"""Pioneer-point profiles, tubes, r-closeness and bounded-slope predicates.

For a path p with endpoint abscissae t1 <= t2, the profile maps each integer
x in [t1, t2] to the ordinate of the *first* vertex of p on the vertical line
S_x, scanning p from its stored first vertex.  The traversal origin is
recorded (`start`) because the notion is orientation-dependent; callers that
need the left-to-right convention can normalize before profiling.
"""

from __future__ import annotations

import io
from dataclasses import dataclass

from .geodesic import LatticePath, subpath_between

__all__ = [
    "PioneerProfile",
    "IntervalJ",
    "pioneer_profile",
    "in_tube",
    "is_r_close",
    "has_bounded_slope",
    "profile_to_csv",
]


@dataclass(frozen=True)
class IntervalJ:
    """Integer interval [a, b] with a <= b."""

    a: int
    b: int

    def __post_init__(self):
        if self.a > self.b:
            raise ValueError("interval requires a <= b")

    def __len__(self):
        return self.b - self.a

    def contains(self, x) -> bool:
        return self.a <= x <= self.b


@dataclass(frozen=True)
class PioneerProfile:
    """x -> f_p(x) over the integer abscissae of X(p), plus tube membership."""

    x_min: int
    x_max: int
    f: dict
    start: tuple  # traversal origin of "first"

    @property
    def x_range(self):
        return range(self.x_min, self.x_max + 1)

    def value(self, x: int) -> int:
        return self.f[x]

    def pioneer_point(self, x: int):
        return (x, self.f[x])

    def check_interval(self, J: IntervalJ):
        if not (self.x_min <= J.a <= self.x_max and self.x_min <= J.b <= self.x_max):
            raise ValueError(f"interval [{J.a},{J.b}] outside profile range [{self.x_min},{self.x_max}]")


def pioneer_profile(p: LatticePath) -> PioneerProfile:
    """First-intersection ordinates of p over X(p), scanned from p's start."""
    x1, x2 = p.start[0], p.end[0]
    lo, hi = min(x1, x2), max(x1, x2)
    f = {}
    for x, y in p:
        if lo <= x <= hi and x not in f:
            f[x] = y
    # p is connected, so every integer abscissa between the endpoints is hit
    assert len(f) == hi - lo + 1
    return PioneerProfile(lo, hi, f, p.start)


def in_tube(profile: PioneerProfile, r: int, v) -> bool:
    """v in Tube_r(p): abscissa in X(p) and |y - f_p(x)| <= r."""
    x, y = v
    if not profile.x_min <= x <= profile.x_max:
        return False
    return abs(y - profile.f[x]) <= r


def _tube_slice_hits(q: LatticePath, profile, x0: int, r: int):
    return [v for v in q if v[0] == x0 and abs(v[1] - profile.f[x0]) <= r]


def is_r_close(q: LatticePath, profile: PioneerProfile, J: IntervalJ, r: int) -> bool:
    """q is r-close to p on J.

    There must exist vertices u, v of q in the tube's end slices S_a, S_b so
    that the subpath of q between them has at least ceil(|J|/2) edges with
    both endpoints in Tube_r(p) ∩ S_J.  All candidate (u, v) pairs are tried
    (the definition is existential).
    """
    profile.check_interval(J)
    need = (len(J) + 1) // 2
    us = _tube_slice_hits(q, profile, J.a, r)
    vs = _tube_slice_hits(q, profile, J.b, r)
    if not us or not vs:
        return False

    def counted(vtx):
        x, y = vtx
        return J.a <= x <= J.b and abs(y - profile.f[x]) <= r

    for u in us:
        for v in vs:
            if u == v:
                if need == 0:
                    return True
                continue
            sub = subpath_between(q, u, v)
            edges_in = sum(
                1 for a, b in zip(sub.vertices, sub.vertices[1:]) if counted(a) and counted(b)
            )
            if edges_in >= need:
                return True
    return False


def has_bounded_slope(profile: PioneerProfile, rho: float, m: int) -> bool:
    """(rho, m)-bounded slope: |f(x1)-f(x2)| <= rho|x1-x2| when |x1-x2| >= m."""
    if rho <= 0 or m <= 0:
        raise ValueError("rho and m must be positive")
    xs = sorted(profile.f)
    n = len(xs)
    for i in range(n):
        fi = profile.f[xs[i]]
        for j in range(i + 1, n):
            dx = xs[j] - xs[i]
            if dx < m:
                continue
            if abs(profile.f[xs[j]] - fi) > rho * dx:
                return False
    return True


def profile_to_csv(profile: PioneerProfile) -> str:
    """CSV `x,f` rows, for plotting tube envelopes."""
    buf = io.StringIO()
    buf.write("x,f\n")
    for x in profile.x_range:
        buf.write(f"{x},{profile.f[x]}\n")
    return buf.getvalue()
