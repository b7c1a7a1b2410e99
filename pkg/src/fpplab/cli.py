"""Command-line entry point: experiment dispatch, output writing, SVG.

Exit codes: 0 success, 1 hard-gate failure, 2 usage error.  Flags override
config-file values, which override built-in defaults; the effective config
is echoed into every JSON report.  Existing output files are never silently
overwritten (pass --force).
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys

from .env import EdgeKey, Environment, HORIZONTAL, VERTICAL, StandardGaussian, parse_dist
from .experiments import (
    ExperimentConfig,
    attractiveness_diagnostic,
    coalescence_experiment,
    midpoint_experiment,
    mw_check_gaussian,
    mw_check_general,
    restricted_time_event,
    tail_fit,
    wrong_direction_probe,
)
from .geodesic import LatticePath, geodesic, metric_ball
from .reporting import fmt_float, to_json
from .restricted import load_fixture, restricted_passage_time, result_to_json
from .shape import boundary_to_csv, flat_edge_test, shape_boundary, sides_probe_schedule, sides_witness

__all__ = ["run", "main", "render_svg", "path_to_csv", "path_from_csv"]


# --- path CSV + SVG ---------------------------------------------------------


def path_to_csv(p: LatticePath) -> str:
    return "x,y\n" + "".join(f"{x},{y}\n" for x, y in p)


def path_from_csv(text: str) -> LatticePath:
    rows = [ln for ln in text.splitlines() if ln and not ln.startswith("x,")]
    return LatticePath([tuple(int(t) for t in ln.split(",")) for ln in rows])


DEFAULT_STYLES = {
    "colors": ["#1f4fd8", "#d82121", "#1f9d3a", "#d88f1f"],
    "overlap": "#8d1fd8",
    "stroke_width": 0.4,
    "pad": 2,
}


def render_svg(paths, styles=None) -> str:
    """Deterministic SVG (polyline/rect subset) with shared-edge overlay.

    Each path gets its own stroke; edges present in more than one path are
    re-drawn on top in the overlap color, so coalescing geodesics show
    distinct heads and a shared trunk.
    """
    if not paths:
        raise ValueError("render_svg needs at least one path")
    st = dict(DEFAULT_STYLES)
    if styles:
        st.update(styles)
    xs = [x for p in paths for (x, _) in p]
    ys = [-y for p in paths for (_, y) in p]
    pad = st["pad"]
    x0, x1 = min(xs) - pad, max(xs) + pad
    y0, y1 = min(ys) - pad, max(ys) + pad
    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" '
        f'viewBox="{x0} {y0} {x1 - x0} {y1 - y0}">',
        f'<rect x="{x0}" y="{y0}" width="{x1 - x0}" height="{y1 - y0}" fill="white"/>',
    ]
    w = st["stroke_width"]
    for i, p in enumerate(paths):
        color = st["colors"][i % len(st["colors"])]
        pts = " ".join(f"{x},{-y}" for x, y in p)
        out.append(
            f'<polyline points="{pts}" fill="none" stroke="{color}" stroke-width="{w}"/>'
        )
    if len(paths) > 1:
        seen = {}
        for p in paths:
            for e in p.edge_set():
                seen[e] = seen.get(e, 0) + 1
        shared = sorted(e for e, k in seen.items() if k > 1)
        for e in shared:
            (ax, ay), (bx, by) = e.endpoints()
            out.append(
                f'<polyline points="{ax},{-ay} {bx},{-by}" fill="none" '
                f'stroke="{st["overlap"]}" stroke-width="{w}"/>'
            )
    out.append("</svg>")
    return "\n".join(out) + "\n"


# --- output helpers -----------------------------------------------------------


class UsageError(Exception):
    pass


def _prepare_out(ns):
    outdir = ns.out
    os.makedirs(outdir, exist_ok=True)
    return outdir


def _write(ns, name, text):
    path = os.path.join(ns.out, name)
    if os.path.exists(path) and not ns.force:
        raise UsageError(f"refusing to overwrite {path} (use --force)")
    with open(path, "w") as fh:
        fh.write(text)
    return path


def _write_report(ns, report):
    _write(ns, "report.json", report.json())
    _write(ns, "rows.csv", report.rows_csv())


def _parse_point(s):
    try:
        x, y = s.split(",")
        return (int(x), int(y))
    except ValueError as err:
        raise UsageError(f"bad point {s!r} (expected X,Y)") from err


def _parse_taus(items):
    tau = {}
    for it in items or []:
        try:
            key, val = it.split("=")
            x, y, o = key.split(",")
            e = EdgeKey(int(x), int(y), HORIZONTAL if o.upper() == "H" else VERTICAL)
            tau[e] = float(val)
        except ValueError as err:
            raise UsageError(f"bad --tau-edge {it!r} (expected X,Y,H=S)") from err
    return tau


def _experiment_config(ns, kind, params):
    return ExperimentConfig(
        kind=kind,
        dist=ns.dist,
        master_seed=ns.seed,
        trials=ns.trials,
        params=params,
        workers=ns.workers,
    )


# --- subcommand handlers --------------------------------------------------------


def _cmd_geodesic(ns):
    env = Environment(seed=ns.seed, dist=parse_dist(ns.dist))
    t, p = geodesic(env, _parse_point(getattr(ns, "from")), _parse_point(ns.to))
    _prepare_out(ns)
    _write(ns, "path.csv", path_to_csv(p))
    paths = [p]
    if ns.to2 is not None:
        frm2 = _parse_point(ns.from2) if ns.from2 else _parse_point(getattr(ns, "from"))
        t2, p2 = geodesic(env, frm2, _parse_point(ns.to2))
        _write(ns, "path2.csv", path_to_csv(p2))
        paths.append(p2)
    if ns.svg:
        _write(ns, ns.svg, render_svg(paths))
    meta = {"dist": ns.dist, "seed": ns.seed, "time": t, "edges": p.n_edges()}
    _write(ns, "meta.json", to_json(meta))
    print(f"geodesic: time={fmt_float(t)} edges={p.n_edges()} -> {ns.out}")
    return 0


def _cmd_ball(ns):
    env = Environment(seed=ns.seed, dist=parse_dist(ns.dist))
    ball = metric_ball(env, ns.t)
    _prepare_out(ns)
    body = "x,y\n" + "".join(f"{x},{y}\n" for x, y in sorted(ball))
    _write(ns, "ball.csv", body)
    print(f"ball: t={ns.t} vertices={len(ball)} -> {ns.out}")
    return 0


def _cmd_coalesce(ns):
    params = {"y": _parse_point(ns.y), "epsilon": ns.epsilon, "delta": ns.delta,
              "k_random": ns.k_random}
    rep = coalescence_experiment(_experiment_config(ns, "coalesce", params))
    _prepare_out(ns)
    _write_report(ns, rep)
    ag = rep.aggregates
    print(f"coalesce: exceedance={fmt_float(ag['exceedance_frequency'])} "
          f"[{fmt_float(ag['exceedance_wilson_lo'])},{fmt_float(ag['exceedance_wilson_hi'])}] -> {ns.out}")
    return 0 if rep.all_gates_pass else 1


def _cmd_midpoint(ns):
    params = {"u": _parse_point(ns.u), "v": _parse_point(ns.v), "z": _parse_point(ns.z),
              "epsilon": ns.epsilon}
    rep = midpoint_experiment(_experiment_config(ns, "midpoint", params))
    _prepare_out(ns)
    _write_report(ns, rep)
    ag = rep.aggregates
    print(f"midpoint: direct={fmt_float(ag['direct_probability'])} "
          f"averaged={fmt_float(ag['averaged_probability'])} -> {ns.out}")
    return 0 if rep.all_gates_pass else 1


def _cmd_attract(ns):
    params = {"L": ns.L, "m": ns.m, "N": ns.N, "r": ns.r, "xi": ns.xi, "s": ns.s}
    if ns.rho1 is not None:
        params["rho1"] = ns.rho1
    if ns.rho2 is not None:
        params["rho2"] = ns.rho2
    rep = attractiveness_diagnostic(_experiment_config(ns, "attract", params))
    _prepare_out(ns)
    _write_report(ns, rep)
    ag = rep.aggregates
    print(f"attract: mean_fraction={fmt_float(ag['mean_attractive_fraction'])} "
          f"bounded_slope={fmt_float(ag['bounded_slope_frequency'])} -> {ns.out}")
    return 0 if rep.all_gates_pass else 1


def _cmd_probe(ns):
    params = {"n": ns.n, "theta0": ns.theta0, "theta_u": ns.theta_u, "r_star": ns.r_star}
    rep = wrong_direction_probe(_experiment_config(ns, "probe", params))
    _prepare_out(ns)
    _write_report(ns, rep)
    print(f"probe: exceedance={fmt_float(rep.aggregates['exceedance_frequency'])} -> {ns.out}")
    return 0 if rep.all_gates_pass else 1


def _cmd_tails(ns):
    distances = [int(t) for t in ns.distances.split(",")]
    rep = tail_fit(_experiment_config(ns, "tails", {"distances": distances}))
    _prepare_out(ns)
    _write_report(ns, rep)
    ag = rep.aggregates
    print(f"tails: suggested_rho1={fmt_float(ag['suggested_rho1'])} "
          f"suggested_rho2={fmt_float(ag['suggested_rho2'])} -> {ns.out}")
    return 0 if rep.all_gates_pass else 1


def _cmd_shape(ns):
    est = shape_boundary(parse_dist(ns.dist), ns.t, ns.trials, ns.seed)
    _prepare_out(ns)
    _write(ns, "boundary.csv", boundary_to_csv(est))
    meta = {"dist": ns.dist, "t": ns.t, "trials": ns.trials, "seed": ns.seed,
            "format": "fpp-report/1", "kind": "shape"}
    _write(ns, "meta.json", to_json(meta))
    print(f"shape: t={ns.t} bins={len(est.angles)} -> {ns.out}")
    return 0


def _cmd_flatedge(ns):
    fe = flat_edge_test(parse_dist(ns.dist), ns.theta1, ns.theta2, ns.r1, ns.r2,
                        ns.n, ns.trials, ns.seed, ns.workers)
    _prepare_out(ns)
    doc = {"format": "fpp-report/1", "kind": "flatedge", "dist": ns.dist,
           "theta1": ns.theta1, "theta2": ns.theta2, "R1": ns.r1, "R2": ns.r2,
           "n": ns.n, "trials": ns.trials, "seed": ns.seed,
           "verdict": fe.verdict, "gap": fe.gap, "stderr": fe.stderr}
    _write(ns, "flatedge.json", to_json(doc))
    print(f"flatedge: {fe.verdict} gap={fmt_float(fe.gap)} se={fmt_float(fe.stderr)}")
    return 0


def _cmd_sides(ns):
    if ns.pairs:
        pairs = []
        for tok in ns.pairs.split(","):
            d1, d2 = tok.split(":")
            pairs.append((float(d1), float(d2)))
    else:
        sched = sides_probe_schedule(ns.epsilon, ns.schedule)
        pairs = list(zip(sched, sched[1:]))
    rep = sides_witness(ns.epsilon, pairs, ns.n, ns.trials, ns.seed, ns.workers)
    _prepare_out(ns)
    _write(ns, "sides.json", to_json({"format": "fpp-report/1", "kind": "sides", **rep}))
    print(f"sides: strictly_convex={rep['strictly_convex_count']}/{len(pairs)} (qualitative)")
    return 0


def _cmd_mw(ns):
    if ns.gaussian:
        tau = [float(t) for t in ns.tau.split(",")]
        box = []
        for tok in ns.box.split(":"):
            lo, hi = tok.split(",")
            box.append((float(lo), float(hi)))
        lhs, rhs, holds = mw_check_gaussian(tau, box)
        print(f"mw gaussian: lhs={fmt_float(lhs)} rhs={fmt_float(rhs)} "
              f"{'HOLDS' if holds else 'VIOLATED'}")
        return 0 if holds else 1
    if not ns.fixture:
        raise UsageError("mw requires --gaussian or --fixture FILE")
    with open(ns.fixture) as fh:
        env, p, q = load_fixture(fh.read())
    edges, event = restricted_time_event(q, ns.threshold)
    tau = _parse_taus(ns.tau_edge)
    res = mw_check_general(env.dist, tau, edges, event, ns.trials, ns.seed)
    print(f"mw general: margin={fmt_float(res.margin)} ci={fmt_float(res.bootstrap_ci)} "
          f"{'HOLDS' if res.holds_within else 'VIOLATED'}")
    return 0 if res.holds_within else 1


def _cmd_fixture(ns):
    with open(ns.file) as fh:
        env, p, q = load_fixture(fh.read())
    res = restricted_passage_time(env, q)
    _prepare_out(ns)
    _write(ns, "restricted.json", to_json({"format": "fpp-report/1", "kind": "fixture",
                                           **result_to_json(res)}))
    t = "inf" if math.isinf(res.time) else fmt_float(res.time)
    print(f"fixture: time={t} labels={res.labels_expanded} -> {ns.out}")
    return 0


# --- parser -----------------------------------------------------------------------


def _add_common(p, dist=True, seed=True, out=True):
    if dist:
        p.add_argument("--dist", required=True, help="const:C | unif:A:B | exp:RATE | scaled:EPS:unif01")
    if seed:
        p.add_argument("--seed", type=int, default=0)
    if out:
        p.add_argument("--out", default="out")
        p.add_argument("--force", action="store_true", help="overwrite existing outputs")


def _add_experiment(p):
    _add_common(p)
    p.add_argument("--trials", type=int, required=True)
    p.add_argument("--workers", type=int, default=1)


def build_parser():
    top = argparse.ArgumentParser(prog="fpplab",
                                  description="first-passage percolation laboratory")
    top.add_argument("--config", help="JSON file of default flag values (flags override)")
    sub = top.add_subparsers(dest="command", required=True)

    p = sub.add_parser("geodesic", help="one or two geodesics, CSV + optional SVG")
    _add_common(p)
    p.add_argument("--from", required=True, help="X,Y")
    p.add_argument("--to", required=True, help="X,Y")
    p.add_argument("--from2", help="second geodesic start (defaults to --from)")
    p.add_argument("--to2", help="second geodesic end")
    p.add_argument("--svg", help="also write an SVG with this filename")
    p.set_defaults(fn=_cmd_geodesic)

    p = sub.add_parser("ball", help="metric ball vertex set")
    _add_common(p)
    p.add_argument("--t", type=float, required=True)
    p.set_defaults(fn=_cmd_ball)

    p = sub.add_parser("coalesce", help="coalescence experiment")
    _add_experiment(p)
    p.add_argument("--y", required=True, help="X,Y")
    p.add_argument("--epsilon", type=float, default=1 / 17)
    p.add_argument("--delta", type=float, default=0.0)
    p.add_argument("--k-random", type=int, default=16, dest="k_random")
    p.set_defaults(fn=_cmd_coalesce)

    p = sub.add_parser("midpoint", help="BKS midpoint experiment")
    _add_experiment(p)
    p.add_argument("--u", default="0,0")
    p.add_argument("--v", required=True)
    p.add_argument("--z", required=True)
    p.add_argument("--epsilon", type=float, default=1 / 16)
    p.set_defaults(fn=_cmd_midpoint)

    p = sub.add_parser("attract", help="attractive-interval diagnostic")
    _add_experiment(p)
    p.add_argument("--L", type=int, required=True)
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--N", type=int, required=True)
    p.add_argument("--r", type=int, required=True)
    p.add_argument("--xi", type=float, default=0.0)
    p.add_argument("--s", type=int, default=0)
    p.add_argument("--rho1", type=float)
    p.add_argument("--rho2", type=float)
    p.set_defaults(fn=_cmd_attract)

    p = sub.add_parser("probe", help="wrong-direction probe")
    _add_experiment(p)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--theta0", type=float, default=0.0)
    p.add_argument("--theta-u", type=float, required=True, dest="theta_u")
    p.add_argument("--r-star", type=float, required=True, dest="r_star")
    p.set_defaults(fn=_cmd_probe)

    p = sub.add_parser("tails", help="passage-time and length tail fits")
    _add_experiment(p)
    p.add_argument("--distances", required=True, help="comma-separated l1 distances")
    p.set_defaults(fn=_cmd_tails)

    p = sub.add_parser("shape", help="limit-shape boundary estimate")
    _add_common(p)
    p.add_argument("--t", type=float, required=True)
    p.add_argument("--trials", type=int, default=8)
    p.set_defaults(fn=_cmd_shape)

    p = sub.add_parser("flatedge", help="flat-edge additivity test")
    _add_common(p)
    p.add_argument("--theta1", type=float, required=True)
    p.add_argument("--theta2", type=float, required=True)
    p.add_argument("--r1", type=float, default=1.0)
    p.add_argument("--r2", type=float, default=1.0)
    p.add_argument("--n", type=int, default=32)
    p.add_argument("--trials", type=int, default=64)
    p.add_argument("--workers", type=int, default=1)
    p.set_defaults(fn=_cmd_flatedge)

    p = sub.add_parser("sides", help="many-sides witness report (qualitative)")
    _add_common(p, dist=False)
    p.add_argument("--epsilon", type=float, required=True)
    p.add_argument("--pairs", help="d1:d2,d1:d2,...")
    p.add_argument("--schedule", type=int, default=3, help="use the log^3 schedule of this length")
    p.add_argument("--n", type=int, default=32)
    p.add_argument("--trials", type=int, default=64)
    p.add_argument("--workers", type=int, default=1)
    p.set_defaults(fn=_cmd_sides)

    p = sub.add_parser("mw", help="Mermin-Wagner inequality checks")
    p.add_argument("--gaussian", action="store_true")
    p.add_argument("--tau", help="comma-separated shifts (gaussian mode)")
    p.add_argument("--box", help="lo,hi:lo,hi:... (gaussian mode)")
    p.add_argument("--fixture", help="fixture file (general mode)")
    p.add_argument("--threshold", type=float, default=0.0)
    p.add_argument("--tau-edge", action="append", dest="tau_edge", help="X,Y,H=SIGMA")
    p.add_argument("--trials", type=int, default=100_000)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(fn=_cmd_mw)

    p = sub.add_parser("fixture", help="restricted passage time from a fixture file")
    _add_common(p, dist=False, seed=False)
    p.add_argument("--file", required=True)
    p.set_defaults(fn=_cmd_fixture)

    return top


def _apply_config_file(parser, argv):
    """flags > config file > defaults, by re-seeding subparser defaults."""
    if "--config" not in argv:
        return argv
    i = argv.index("--config")
    path = argv[i + 1]
    with open(path) as fh:
        conf = json.load(fh)
    rest = argv[:i] + argv[i + 2 :]
    for sp in parser._subparsers._group_actions[0].choices.values():
        sp.set_defaults(**conf)
        for action in sp._actions:
            if action.dest in conf:
                action.required = False
    return rest


def run(argv) -> int:
    parser = build_parser()
    try:
        argv = _apply_config_file(parser, list(argv))
        ns = parser.parse_args(argv)
    except SystemExit as e:
        return 2 if e.code not in (0, None) else 0
    except (OSError, json.JSONDecodeError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    try:
        return ns.fn(ns)
    except UsageError as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    except (ValueError, OSError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 2


def main():
    sys.exit(run(sys.argv[1:]))
