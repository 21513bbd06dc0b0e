"""Benchmark sweep comparing the token allocator with the exhaustive one.

Each trial generates a scenario, builds the cost tables and times both
allocators on them. Failed trials become rows with an error status; the
sweep carries on.
"""
from __future__ import annotations

import csv
import math
import os
import statistics
from concurrent.futures import ProcessPoolExecutor

from .generate import BenchConfig, generate_random
from .pipeline import allocate, robot_tables

COLUMNS = ["n", "m", "trial", "seed", "token_cost", "opt_cost", "token_ms", "opt_ms",
           "token_assigned", "opt_assigned", "status"]
METRICS = ["token_cost", "opt_cost", "token_ms", "opt_ms", "token_assigned", "opt_assigned"]
AGG_COLUMNS = [f"{k}_{s}" for k in METRICS for s in ("min", "max")]


def run_trial(config: BenchConfig, n: int, m: int, trial: int) -> dict:
    row = {"n": n, "m": m, "trial": trial, "seed": config.seed}
    try:
        scenario = generate_random(config, n, m, trial)
        sats, tables = robot_tables(scenario)
        report = allocate(sats, tables, m)
    except Exception as err:  # recorded, the sweep continues
        row["status"] = f"error: {type(err).__name__}: {err}"
        return row
    opt = report.optimal_assignment or [0] * m
    row.update(
        token_cost=report.token_cost,
        opt_cost=report.optimal_cost,
        token_ms=report.token_time * 1e3,
        opt_ms=report.optimal_time * 1e3,
        token_assigned=sum(1 for i in report.token_assignment if i),
        opt_assigned=sum(1 for i in opt if i),
        status="ok",
    )
    return row


def _trial_args(args):
    return run_trial(*args)


def aggregate(rows) -> dict:
    """Mean in the metric columns plus min/max columns over the ok rows of
    one ``(n, m)`` point."""
    first = rows[0]
    ok = [r for r in rows if r.get("status") == "ok"]
    out = {"n": first["n"], "m": first["m"], "trial": "aggregate", "seed": first["seed"],
           "status": f"ok {len(ok)}/{len(rows)}"}
    for k in METRICS:
        values = [r[k] for r in ok if math.isfinite(r[k])]
        if values:
            out[k] = statistics.fmean(values)
            out[f"{k}_min"] = min(values)
            out[f"{k}_max"] = max(values)
    return out


def bench(config: BenchConfig, workers: int = 1):
    """All data rows followed by one aggregate row per ``(n, m)`` point, in
    sweep order."""
    points = [(n, m) for n in config.robot_counts for m in config.task_counts]
    jobs = [(config, n, m, t) for n, m in points for t in range(config.trials)]
    if workers > 1:
        with ProcessPoolExecutor(workers) as pool:
            data = list(pool.map(_trial_args, jobs))
    else:
        data = [run_trial(*job) for job in jobs]
    rows = []
    for n, m in points:
        mine = [r for r in data if (r["n"], r["m"]) == (n, m)]
        rows.extend(mine)
        rows.append(aggregate(mine))
    return rows


def _fmt(v):
    if isinstance(v, float):
        return repr(round(v, 6))
    return "" if v is None else str(v)


def write_csv(rows, path):
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(COLUMNS + AGG_COLUMNS)
        for r in rows:
            w.writerow([_fmt(r.get(c)) for c in COLUMNS + AGG_COLUMNS])


def write_gnuplot(rows, directory):
    """``cost.dat`` and ``time.dat`` (one line per point: n m then
    mean/min/max for token and optimal) and a script plotting both with
    error bars."""
    os.makedirs(directory, exist_ok=True)
    agg = [r for r in rows if r["trial"] == "aggregate" and "token_cost" in r]
    for name, (a, b) in {"cost": ("token_cost", "opt_cost"),
                         "time": ("token_ms", "opt_ms")}.items():
        with open(os.path.join(directory, f"{name}.dat"), "w", encoding="utf-8") as fh:
            fh.write(f"# n m {a}_mean {a}_min {a}_max {b}_mean {b}_min {b}_max\n")
            for r in agg:
                cells = [r["n"], r["m"]] + [r.get(f"{k}{s}", math.nan) for k in (a, b)
                                            for s in ("", "_min", "_max")]
                fh.write(" ".join(_fmt(c) for c in cells) + "\n")
    script = """set terminal pngcairo size 800,500
set xlabel "robots"
set output "cost.png"
set ylabel "total cost"
plot "cost.dat" using 1:3:4:5 with yerrorlines title "token", \\
     "cost.dat" using 1:6:7:8 with yerrorlines title "optimal"
set output "time.png"
set ylabel "allocation time (ms)"
set logscale y
plot "time.dat" using 1:3:4:5 with yerrorlines title "token", \\
     "time.dat" using 1:6:7:8 with yerrorlines title "optimal"
"""
    with open(os.path.join(directory, "plots.gp"), "w", encoding="utf-8") as fh:
        fh.write(script)
