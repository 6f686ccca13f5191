"""Monte Carlo drivers: transition sweeps, size gaps, loose vertices, rounds, core sizes.

Every trial draws from ``RngStream(seed, key)`` where the key is built from
the trial's own parameters and index, so a record never depends on the grid
it was run in, on scheduling, or on the worker count.
"""
from __future__ import annotations

import csv
import io
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, fields
from datetime import datetime, timezone

import numpy as np

from . import analytics as A
from .cores import core_mask, k_core, three_plus_two_core
from .graph import SimpleGraph
from .orientation import simplified_run
from .pebble import rigid_components
from .random_models import DegreeSequence, RngStream, gnp, truncated_poisson_sequence

EXPERIMENTS = ("sweep", "gap", "loose", "rounds", "compare")


@dataclass
class ExperimentConfig:
    experiment: str = "sweep"
    n: list[int] = field(default_factory=lambda: [20000])
    c_grid: list[float] = field(default_factory=list)
    tau_grid: list[float] = field(default_factory=list)
    trials: int = 10
    seed: int = 0
    out: str | None = None
    width: int = 1
    eps: float = 0.01

    def __post_init__(self):
        if isinstance(self.n, int):
            self.n = [self.n]
        self.n = [int(x) for x in self.n]
        self.c_grid = [float(x) for x in self.c_grid]
        self.tau_grid = [float(x) for x in self.tau_grid]
        if self.experiment not in EXPERIMENTS:
            raise ValueError(f"unknown experiment {self.experiment!r}")
        if self.trials < 1:
            raise ValueError("trials must be at least 1")
        if not self.n or min(self.n) < 1:
            raise ValueError("n grid must be nonempty and positive")
        if not (self.c_grid or self.tau_grid):
            raise ValueError("a c grid or a tau grid is required")
        if self.width < 1:
            raise ValueError("width must be at least 1")


def _key(x: float) -> int:
    # grid values enter the stream key at micro resolution
    return int(round(x * 10 ** 6))


def trial_stream(seed: int, tag: int, n: int, x: float, trial: int) -> RngStream:
    return RngStream(seed, (tag, n, _key(x), trial))


def run_tasks(fn, tasks: list, width: int = 1) -> list:
    """Map ``fn`` over tasks, in order, with up to ``width`` worker processes."""
    if width <= 1 or len(tasks) <= 1:
        return [fn(t) for t in tasks]
    with ProcessPoolExecutor(max_workers=width) as pool:
        return list(pool.map(fn, tasks, chunksize=1))


# ---------------------------------------------------------------------------
# records and CSV

@dataclass
class TrialRecord:
    n: int
    c: float
    seed: int
    trial: int
    edges: int = 0
    core3: int = 0
    core32: int = 0
    largest: int = 0
    second: int = 0
    size1: int = 0
    size2: int = 0
    size3: int = 0
    mid: int = 0          # components with 4 <= size <= eps * n
    big: int = 0          # components with size > eps * n
    loose_L1: int = 0
    loose_L2: int = 0
    loose_L3: int = 0
    loose_cutoff: int = 0
    max_round: int = 0
    wall_time: float = 0.0

    @property
    def fraction(self) -> float:
        """Largest rigid component over the (3+2)-core size."""
        return self.largest / self.core32 if self.core32 else 0.0


def _fmt(x) -> str:
    if isinstance(x, bool):
        return str(int(x))
    if isinstance(x, (float, np.floating)):
        return "nan" if math.isnan(x) else f"{float(x):.6g}"
    return str(x)


def to_csv(rows: list[dict], columns: list[str] | None = None, stamp: bool = True) -> str:
    """CSV text with a leading timestamp comment and floats at 6 significant digits."""
    if columns is None:
        columns = list(rows[0]) if rows else []
    buf = io.StringIO()
    if stamp:
        buf.write(f"# generated {datetime.now(timezone.utc).isoformat(timespec='seconds')}\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for r in rows:
        w.writerow([_fmt(r[c]) for c in columns])
    return buf.getvalue()


RECORD_COLUMNS = [f.name for f in fields(TrialRecord) if f.name != "wall_time"]


def record_rows(records: list[TrialRecord], timings: bool = False) -> tuple[list[dict], list[str]]:
    """Rows for CSV output; wall time is left out unless asked for, which keeps
    reruns byte-identical."""
    cols = RECORD_COLUMNS + (["wall_time"] if timings else []) + ["fraction"]
    rows = []
    for r in records:
        d = asdict(r)
        d["fraction"] = r.fraction
        rows.append(d)
    return rows, cols


# ---------------------------------------------------------------------------
# rigidity transition

def gap_violations(sizes, n: int, eps: float = 0.01) -> list[int]:
    """Component sizes strictly between 3 and eps * n (inclusive of eps * n)."""
    return [s for s in sizes if 4 <= s <= eps * n]


def transition_trial(task: tuple) -> TrialRecord:
    n, c, seed, trial, eps = task
    t0 = time.perf_counter()
    rng = trial_stream(seed, 0, n, c, trial)
    g = gnp(n, c, rng)
    core = k_core(g, 3)
    shell = three_plus_two_core(g, core)
    sizes = sorted(rigid_components(g).sizes(), reverse=True)
    rec = TrialRecord(n, c, seed, trial, edges=g.m, core3=core.size, core32=shell.size)
    rec.largest = sizes[0] if sizes else 0
    rec.second = sizes[1] if len(sizes) > 1 else 0
    rec.size1 = sizes.count(1)
    rec.size2 = sizes.count(2)
    rec.size3 = sizes.count(3)
    rec.mid = len(gap_violations(sizes, n, eps))
    rec.big = sum(1 for s in sizes if s > eps * n)
    if core.size:
        st = simplified_run(core_degrees(g), rng.child(0), cutoff=math.ceil(math.sqrt(n)))
        rec.loose_L1, rec.loose_L2, rec.loose_L3, rec.loose_cutoff = (
            st.loose_by_cause[k] for k in ("L1", "L2", "L3", "cutoff"))
        rec.max_round = st.max_round
    rec.wall_time = time.perf_counter() - t0
    return rec


def _transition_records(cfg: ExperimentConfig) -> list[TrialRecord]:
    tasks = [(n, c, cfg.seed, t, cfg.eps) for n in cfg.n for c in cfg.c_grid for t in range(cfg.trials)]
    return run_tasks(transition_trial, tasks, cfg.width)


def group(records, key):
    out: dict = {}
    for r in records:
        out.setdefault(key(r), []).append(r)
    return out


def _mean_sd(xs) -> tuple[float, float]:
    a = np.asarray(xs, float)
    return float(a.mean()), float(a.std(ddof=1)) if len(a) > 1 else 0.0


def sweep_summary(records: list[TrialRecord]) -> list[dict]:
    rows = []
    for (n, c), rs in sorted(group(records, lambda r: (r.n, r.c)).items()):
        m, sd = _mean_sd([r.fraction for r in rs])
        rows.append({"n": n, "c": c, "trials": len(rs), "fraction_mean": m, "fraction_sd": sd,
                     "largest_max": max(r.largest for r in rs), "core32_mean": _mean_sd([r.core32 for r in rs])[0],
                     "giants": sum(1 for r in rs if r.big == 1 and r.largest >= 4),
                     "mid_total": sum(r.mid for r in rs)})
    return rows


def sweep_transition(cfg: ExperimentConfig) -> tuple[list[TrialRecord], list[dict]]:
    """Per-trial records and per-(n, c) aggregates of the largest-component fraction."""
    recs = _transition_records(cfg)
    return recs, sweep_summary(recs)


def gap_histogram(cfg: ExperimentConfig) -> list[dict]:
    """Per-trial component-size histogram; ``mid`` counts gap violations."""
    rows = []
    for r in _transition_records(cfg):
        rows.append({"n": r.n, "c": r.c, "seed": r.seed, "trial": r.trial, "size1": r.size1,
                     "size2": r.size2, "size3": r.size3, "mid": r.mid, "big": r.big,
                     "largest": r.largest, "second": r.second})
    return rows


# ---------------------------------------------------------------------------
# loose vertices and rounds

def core_degrees(g: SimpleGraph) -> DegreeSequence:
    """Degree sequence of the 3-core's induced subgraph (isolated vertices dropped)."""
    mask = core_mask(g, 3)
    ends = np.asarray(g.edges, dtype=np.int64).reshape(-1, 2)
    live = ends[mask[ends[:, 0]] & mask[ends[:, 1]]]
    deg = np.bincount(live.ravel(), minlength=g.n)[mask]
    return DegreeSequence(deg)


def loose_trial(task: tuple) -> dict:
    kind, n, x, seed, trial = task
    t0 = time.perf_counter()
    rng = trial_stream(seed, 1 if kind == "c" else 2, n, x, trial)
    if kind == "c":
        ds = core_degrees(gnp(n, x, rng))
    else:
        ds = truncated_poisson_sequence(n, x, 3, rng)
    # the cutoff counts vertices of the original graph, not of its core
    st = simplified_run(ds, rng.child(0), cutoff=math.ceil(math.sqrt(n))) if ds.n else None
    size = ds.n
    loose = st.loose_total if st else 0
    ln = math.log(n)
    row = {"kind": kind, "param": x, "n": n, "seed": seed, "trial": trial, "core": size,
           "loose": loose,
           "L1": st.loose_by_cause["L1"] if st else 0, "L2": st.loose_by_cause["L2"] if st else 0,
           "L3": st.loose_by_cause["L3"] if st else 0, "cutoff": st.loose_by_cause["cutoff"] if st else 0,
           "loose_fraction": loose / size if size else 0.0,
           "loose_scaled": loose / (ln ** 3 * math.sqrt(n)),
           "processed": st.processed if st else 0, "rounds": len(st.round_lengths) if st else 0,
           "max_round": st.max_round if st else 0,
           "round_ratio": (st.max_round if st else 0) / ln,
           "mean_children": st.mean_children if st else 0.0,
           "ending": st.ending if st else "empty",
           "phase4_size": st.phase4_size if st else 0}
    row["wall_time"] = time.perf_counter() - t0
    return row


LOOSE_COLUMNS = ["kind", "param", "n", "seed", "trial", "core", "loose", "L1", "L2", "L3", "cutoff",
                 "loose_fraction", "loose_scaled", "processed", "rounds", "max_round", "round_ratio",
                 "mean_children", "ending", "phase4_size"]
ROUND_COLUMNS = ["kind", "param", "n", "seed", "trial", "rounds", "max_round", "round_ratio",
                 "mean_children"]


def _loose_tasks(cfg: ExperimentConfig) -> list[tuple]:
    grid = [("c", c) for c in cfg.c_grid] + [("tau", t) for t in cfg.tau_grid]
    return [(kind, n, x, cfg.seed, t) for kind, x in grid for n in cfg.n for t in range(cfg.trials)]


def loose_scaling(cfg: ExperimentConfig) -> list[dict]:
    """Simplified-algorithm loose counts on gnp cores (c grid) or truncated Poisson cores (tau grid)."""
    return run_tasks(loose_trial, _loose_tasks(cfg), cfg.width)


def round_lengths(cfg: ExperimentConfig) -> list[dict]:
    """Maximum phase-3 round length per trial, also relative to ln n."""
    return [{k: r[k] for k in ROUND_COLUMNS} for r in loose_scaling(cfg)]


def loose_summary(rows: list[dict]) -> list[dict]:
    out = []
    for (kind, x, n), rs in sorted(group(rows, lambda r: (r["kind"], r["param"], r["n"])).items()):
        out.append({"kind": kind, "param": x, "n": n, "trials": len(rs),
                    "loose_fraction_mean": _mean_sd([r["loose_fraction"] for r in rs])[0],
                    "loose_scaled_mean": _mean_sd([r["loose_scaled"] for r in rs])[0],
                    "round_ratio_mean": _mean_sd([r["round_ratio"] for r in rs])[0],
                    "round_ratio_max": max(r["round_ratio"] for r in rs),
                    "mean_children": _mean_sd([r["mean_children"] for r in rs])[0]})
    return out


# ---------------------------------------------------------------------------
# analytic comparison

def core_trial(task: tuple) -> dict:
    n, c, seed, trial = task
    g = gnp(n, c, trial_stream(seed, 3, n, c, trial))
    core = k_core(g, 3)
    shell = three_plus_two_core(g, core)
    if core.size:
        ends = np.asarray(g.edges, dtype=np.int64).reshape(-1, 2)
        mask = core.mask()
        inside = int(np.count_nonzero(mask[ends[:, 0]] & mask[ends[:, 1]]))
        avg = 2 * inside / core.size
    else:
        avg = math.nan
    return {"n": n, "c": c, "trial": trial, "core3": core.size / n, "core32": shell.size / n, "avgdeg": avg}


def _stats(xs) -> tuple[float, float]:
    a = np.asarray([x for x in xs if not math.isnan(x)], float)
    if len(a) == 0:
        return math.nan, math.nan
    return float(a.mean()), float(a.std(ddof=1) / math.sqrt(len(a))) if len(a) > 1 else 0.0


COMPARE_COLUMNS = ["n", "c", "trials", "core3_analytic", "core3_mean", "core3_stderr",
                   "avgdeg_analytic", "avgdeg_mean", "avgdeg_stderr", "q_analytic",
                   "core32_mean", "core32_stderr", "lambda0", "c2"]


def compare_analytic(cfg: ExperimentConfig) -> list[dict]:
    """Empirical core sizes and degrees next to their asymptotic predictions.

    The (3+2)-core prediction q is a conjectured formula, reported for comparison.
    """
    tasks = [(n, c, cfg.seed, t) for n in cfg.n for c in cfg.c_grid for t in range(cfg.trials)]
    trials = run_tasks(core_trial, tasks, cfg.width)
    c2 = A.c2_solve()
    lam3, _ = A.lambda_k(3)
    rows = []
    for (n, c), rs in sorted(group(trials, lambda r: (r["n"], r["c"])).items()):
        sup = c > lam3
        q, tau = A.q_32core(c) if sup else (math.nan, math.nan)
        row = {"n": n, "c": c, "trials": len(rs),
               "core3_analytic": A.core_fraction(c),
               "avgdeg_analytic": A.core_avg_degree(c) if sup else math.nan,
               "q_analytic": q, "lambda0": A.lambda0(tau) if sup else math.nan, "c2": c2}
        row["core3_mean"], row["core3_stderr"] = _stats([r["core3"] for r in rs])
        row["avgdeg_mean"], row["avgdeg_stderr"] = _stats([r["avgdeg"] for r in rs])
        row["core32_mean"], row["core32_stderr"] = _stats([r["core32"] for r in rs])
        rows.append(row)
    return rows
