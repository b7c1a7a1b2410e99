"""Coalescence of nearby geodesics, drawn the way the overlay figures do it.

Two geodesics with vertically offset endpoints typically share a long common
trunk; only the heads near the endpoints differ.  This script computes a
pair in one environment, prints how much they share, and writes an SVG you
can open in a browser.
"""

from fpplab import Environment, Uniform, geodesic, symmetric_difference
from fpplab.cli import path_to_csv, render_svg

SPAN = 220
OFFSET = 8

env = Environment(seed=20240807, dist=Uniform(1, 2))

t1, p1 = geodesic(env, (0, 0), (SPAN, 0))
t2, p2 = geodesic(env, (0, OFFSET), (SPAN, OFFSET))

shared = len(p1.edge_set() & p2.edge_set())
print(f"geodesic 1: time {t1:.3f}, {p1.n_edges()} edges")
print(f"geodesic 2: time {t2:.3f}, {p2.n_edges()} edges")
print(f"shared edges: {shared}")
print(f"symmetric difference: {symmetric_difference(p1, p2)}")

with open("demo_geodesics.svg", "w") as fh:
    fh.write(render_svg([p1, p2]))
with open("demo_geodesic_1.csv", "w") as fh:
    fh.write(path_to_csv(p1))
with open("demo_geodesic_2.csv", "w") as fh:
    fh.write(path_to_csv(p2))
print("wrote demo_geodesics.svg (shared trunk drawn in the overlap color)")
