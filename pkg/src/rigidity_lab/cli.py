"""Command-line entry point: ``rigidity-lab <subcommand> ...``."""
from __future__ import annotations

import argparse
import json
import math
import os
import sys

import numpy as np

from . import analytics as A
from . import experiments as X
from .cores import k_core, three_plus_two_core
from .graph import GraphError, read_graph
from .pebble import DensityWitness, is_laman_spanning, rigid_components, two_orientation

SEED_ENV = "RIGIDITY_SEED"
CHECK_FAILED = 2

# fallbacks for options left unset by both the command line and --config
DEFAULTS = {"n": [20000], "trials": 10, "width": 1, "eps": 0.01, "c_step": 0.1,
            "tau_value": 2.688, "points": 201, "timings": False}


def _default_seed() -> int:
    raw = os.environ.get(SEED_ENV)
    if raw is None:
        return 0
    try:
        return int(raw)
    except ValueError:
        raise SystemExit(f"{SEED_ENV} must be an integer, got {raw!r}")


def _merge_config(args: argparse.Namespace) -> argparse.Namespace:
    """Fill options not given on the command line from --config, then defaults."""
    if getattr(args, "config", None):
        with open(args.config) as fh:
            conf = json.load(fh)
        if not isinstance(conf, dict):
            raise SystemExit("--config must hold a JSON object")
        for key, val in conf.items():
            key = key.replace("-", "_")
            if getattr(args, key, None) is None:
                setattr(args, key, val)
    for key, val in DEFAULTS.items():
        if getattr(args, key, None) is None:
            setattr(args, key, val)
    if getattr(args, "seed", None) is None:
        args.seed = _default_seed()
    return args


def _grid(lo, hi, step) -> list[float]:
    if step <= 0:
        raise SystemExit("--c-step must be positive")
    count = int(math.floor((hi - lo) / step + 1e-9)) + 1
    return [round(lo + i * step, 10) for i in range(max(count, 0))]


def _c_grid(args) -> list[float]:
    if getattr(args, "c", None):
        return [float(x) for x in args.c]
    if getattr(args, "c_min", None) is not None:
        hi = args.c_max if args.c_max is not None else args.c_min
        return _grid(float(args.c_min), float(hi), float(args.c_step))
    return []


def _config(args, name: str) -> X.ExperimentConfig:
    n = args.n if isinstance(args.n, list) else [args.n]
    tau = getattr(args, "tau", None) or []
    try:
        return X.ExperimentConfig(name, n=n, c_grid=_c_grid(args), tau_grid=tau, trials=int(args.trials),
                                  seed=int(args.seed), out=args.out, width=int(args.width), eps=float(args.eps))
    except ValueError as exc:
        raise SystemExit(str(exc))


def _emit(text: str, path: str | None) -> None:
    if path:
        with open(path, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _verdict(failures: list[str], check: bool) -> int:
    label = "check failed" if check else "note"
    for f in failures:
        print(f"{label}: {f}", file=sys.stderr)
    return CHECK_FAILED if check and failures else 0


# ---------------------------------------------------------------------------
# graph-file subcommands

def cmd_components(args) -> int:
    g = read_graph(args.graph)
    dec = rigid_components(g)
    sys.stdout.write(dec.format())
    failures = []
    if args.check:
        for i, comp in enumerate(dec.components):
            if len(comp) >= 2:
                sub, _ = g.subgraph(comp)
                if not is_laman_spanning(sub):
                    failures.append(f"component {i} is not Laman-spanning")
    return _verdict(failures, args.check)


def cmd_orient(args) -> int:
    g = read_graph(args.graph, multi=True)
    res = two_orientation(g)
    if isinstance(res, DensityWitness):
        print(f"not 2-orientable: witness {' '.join(map(str, res.vertices))} "
              f"({res.induced_edges} edges on {len(res.vertices)} vertices)")
        return 1
    sys.stdout.write(res.format())
    failures = []
    if args.check:
        try:
            res.check(g)
        except (AssertionError, GraphError) as exc:
            failures.append(str(exc))
        if res.max_outdeg() > 2:
            failures.append("out-degree above 2")
    return _verdict(failures, args.check)


def cmd_cores(args) -> int:
    g = read_graph(args.graph)
    res = three_plus_two_core(g) if args.three_plus_two else k_core(g, args.k)
    sys.stdout.write(res.format())
    return 0


# ---------------------------------------------------------------------------
# experiments

def cmd_sweep(args) -> int:
    cfg = _config(args, "sweep")
    recs, summary = X.sweep_transition(cfg)
    rows, cols = X.record_rows(recs, timings=bool(args.timings))
    if cfg.out:
        _emit(X.to_csv(rows, cols), cfg.out)
    sys.stdout.write(X.to_csv(summary))
    c2 = A.c2_solve()
    failures = []
    for r in recs:
        if r.c < c2 and r.largest > 3:
            failures.append(f"c={r.c} trial {r.trial}: component of size {r.largest} below c2")
        if r.c > c2 and (r.big != 1 or r.fraction < 0.8):
            failures.append(f"c={r.c} trial {r.trial}: giant spans {r.fraction:.3f} of the (3+2)-core")
    return _verdict(failures, args.check)


def cmd_gap(args) -> int:
    cfg = _config(args, "gap")
    rows = X.gap_histogram(cfg)
    _emit(X.to_csv(rows), cfg.out)
    failures = [f"c={r['c']} trial {r['trial']}: {r['mid']} mid-size components" for r in rows if r["mid"]]
    return _verdict(failures, args.check)


def _loose_failures(summary: list[dict], rows: list[dict]) -> list[str]:
    out = []
    for r in rows:
        if r["L1"] + r["L2"] + r["L3"] + r["cutoff"] != r["loose"]:
            out.append(f"trial {r['trial']}: loose causes do not sum to the total")
    for (kind, x), ss in X.group(summary, lambda s: (s["kind"], s["param"])).items():
        fr = [s["loose_fraction_mean"] for s in sorted(ss, key=lambda s: s["n"])]
        if any(b >= a for a, b in zip(fr, fr[1:])):
            out.append(f"{kind}={x}: loose fraction not strictly decreasing in n: {fr}")
    return out


def cmd_loose(args) -> int:
    cfg = _config(args, "loose")
    rows = X.loose_scaling(cfg)
    cols = X.LOOSE_COLUMNS + (["wall_time"] if args.timings else [])
    summary = X.loose_summary(rows)
    if cfg.out:
        _emit(X.to_csv(rows, cols), cfg.out)
    sys.stdout.write(X.to_csv(summary))
    return _verdict(_loose_failures(summary, rows), args.check)


def round_growth(summary: list[dict], tolerance: float = 1.25) -> list[str]:
    """Failures of the no-growth check: the mean max-round / ln n ratio at the
    largest n may exceed the one at the smallest n by at most ``tolerance``."""
    out = []
    for (kind, x), ss in X.group(summary, lambda s: (s["kind"], s["param"])).items():
        ss = sorted(ss, key=lambda s: s["n"])
        lo, hi = ss[0]["round_ratio_mean"], ss[-1]["round_ratio_mean"]
        if len(ss) > 1 and hi > tolerance * lo:
            out.append(f"{kind}={x}: max round / ln n grew from {lo:.3f} to {hi:.3f}")
        for s in ss:
            if s["mean_children"] >= 1:
                out.append(f"{kind}={x} n={s['n']}: mean children {s['mean_children']:.3f} >= 1")
    return out


def cmd_rounds(args) -> int:
    cfg = _config(args, "rounds")
    rows = X.loose_scaling(cfg)
    summary = X.loose_summary(rows)
    if cfg.out:
        _emit(X.to_csv([{k: r[k] for k in X.ROUND_COLUMNS} for r in rows], X.ROUND_COLUMNS), cfg.out)
    sys.stdout.write(X.to_csv(summary))
    return _verdict(round_growth(summary), args.check)


def cmd_analytic(args) -> int:
    lam3, arg3 = A.lambda_k(3)
    c2 = A.c2_solve()
    q, tau_c2 = A.q_32core(c2)
    consts = {"lambda3": lam3, "mu3_at_lambda3": arg3, "core3_at_lambda3": A.core_fraction(lam3 + 1e-6),
              "c2": c2, "q_at_c2": q, "tau_at_c2": tau_c2, "tau_star": A.lambda0_critical()}
    tau = float(args.tau_value)
    try:
        curve = A.phase3_curve(tau)
    except A.RegimeError as exc:
        raise SystemExit(str(exc))
    s = np.linspace(0.0, curve.s_star, int(args.points))
    rows = [{"s": si, "delta": float(curve.delta(si)), "a3": float(curve.a3(si)),
             "mu": float(curve.mu(si)), "lambda": float(curve.lam(si))} for si in s]
    head = "".join(f"# {k}={X._fmt(v)}\n" for k, v in consts.items())
    head += f"# tau={X._fmt(tau)} s_star={X._fmt(curve.s_star)}\n"
    text = X.to_csv(rows, ["s", "delta", "a3", "mu", "lambda"])
    stamp, body = text.split("\n", 1)
    _emit(stamp + "\n" + head + body, args.out)
    failures = []
    if args.check:
        ode = A.ode_oracle(tau, curve.s_star)
        err = float(np.max(np.abs(curve.a3(ode.s) - ode.a3)))
        if err >= 1e-8:
            failures.append(f"closed form and ODE differ by {err:.3g}")
        lam = np.array([r["lambda"] for r in rows])
        if np.any(np.diff(lam) >= 0):
            failures.append("lambda(s) is not strictly decreasing")
    return _verdict(failures, args.check)


def cmd_compare(args) -> int:
    cfg = _config(args, "compare")
    rows = X.compare_analytic(cfg)
    _emit(X.to_csv(rows, X.COMPARE_COLUMNS), cfg.out)
    failures = []
    for r in rows:
        if abs(r["core3_mean"] - r["core3_analytic"]) > 0.01:
            failures.append(f"c={r['c']}: 3-core fraction off by more than 0.01")
        if not math.isnan(r["avgdeg_analytic"]) and abs(r["avgdeg_mean"] - r["avgdeg_analytic"]) > 0.05:
            failures.append(f"c={r['c']}: 3-core average degree off by more than 0.05")
    return _verdict(failures, args.check)


# ---------------------------------------------------------------------------
# parser

def _experiment_args(p: argparse.ArgumentParser, grid: str = "c") -> None:
    p.add_argument("--n", type=int, nargs="+", help="vertex counts (default 20000)")
    p.add_argument("--c", type=float, nargs="+", help="explicit c grid")
    p.add_argument("--c-min", type=float)
    p.add_argument("--c-max", type=float)
    p.add_argument("--c-step", type=float)
    if grid == "tau":
        p.add_argument("--tau", type=float, nargs="+", help="truncated-Poisson parameters")
    p.add_argument("--trials", type=int)
    p.add_argument("--width", type=int, help="worker processes")
    p.add_argument("--eps", type=float, help="gap threshold as a fraction of n")
    p.add_argument("--timings", action="store_true", default=None, help="add a wall-time column")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="rigidity-lab", description="Rigidity of sparse random graphs.")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, help=f"master seed (default ${SEED_ENV} or 0)")
    common.add_argument("--config", help="JSON file with option values")
    common.add_argument("--out", help="output path (default stdout)")
    common.add_argument("--check", action="store_true", help=f"verify results; exit {CHECK_FAILED} on failure")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("components", parents=[common], help="rigid components of a graph file")
    p.add_argument("graph")
    p.set_defaults(func=cmd_components)
    p = sub.add_parser("orient", parents=[common], help="2-orientation of a graph file")
    p.add_argument("graph")
    p.set_defaults(func=cmd_orient)
    p = sub.add_parser("cores", parents=[common], help="k-core or (3+2)-core of a graph file")
    p.add_argument("graph")
    which = p.add_mutually_exclusive_group(required=True)
    which.add_argument("--k", type=int)
    which.add_argument("--three-plus-two", action="store_true")
    p.set_defaults(func=cmd_cores)

    for name, fn, grid, text in [("sweep", cmd_sweep, "c", "rigidity transition sweep over c"),
                                 ("gap", cmd_gap, "c", "component-size gap histogram"),
                                 ("loose", cmd_loose, "tau", "loose-vertex scaling"),
                                 ("rounds", cmd_rounds, "tau", "phase-3 round lengths"),
                                 ("compare", cmd_compare, "c", "empirical cores against analytics")]:
        p = sub.add_parser(name, parents=[common], help=text)
        _experiment_args(p, grid)
        p.set_defaults(func=fn)

    p = sub.add_parser("analytic", parents=[common], help="constants and phase-3 curves")
    p.add_argument("--tau", dest="tau_value", type=float, help="phase-3 parameter (default 2.688)")
    p.add_argument("--points", type=int, help="curve samples on [0, s*]")
    p.set_defaults(func=cmd_analytic)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = _merge_config(build_parser().parse_args(argv))
    try:
        return args.func(args)
    except (GraphError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
