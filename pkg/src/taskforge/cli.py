"""Command line interface.

Exit codes: 0 ok, 1 invalid input, 2 infeasible, 3 internal error.
"""
from __future__ import annotations

import argparse
import json
import math
import sys

from . import ltl
from .buchi import translate
from .harness.bench import bench, write_csv, write_gnuplot
from .harness.generate import BenchConfig
from .harness.pipeline import final_behavior, run_pipeline
from .harness.scenario import ScenarioError, load_scenario
from .hoa import export_hoa

OK, INVALID, INFEASIBLE, INTERNAL = 0, 1, 2, 3


def _num(x):
    return None if x is None or not math.isfinite(x) else x


def _behavior_dict(b):
    return {
        "cost": _num(b.cost),
        "cycle_cost": _num(b.cycle_cost),
        "prefix": [list(s) for s, _ in b.prefix],
        "cycle": [list(s) for s, _ in b.cycle],
        "prefix_labels": [sorted(x) for x in b.prefix_labels],
        "cycle_labels": [sorted(x) for x in b.cycle_labels],
    }


def _print_behavior(b, out=None):
    out = out or sys.stdout
    if b.is_empty:
        print("no satisfying behavior", file=out)
        return
    print(f"cost {b.cost:g} (cycle {b.cycle_cost:g})", file=out)
    print("prefix:", file=out)
    for (s, _), label in zip(b.prefix, b.prefix_labels):
        print(f"  {s}  {sorted(label)}", file=out)
    print("cycle:", file=out)
    for (s, _), label in zip(b.cycle, b.cycle_labels):
        print(f"  {s}  {sorted(label)}", file=out)


def cmd_check(args):
    s = load_scenario(args.file)
    print(f"ok: {s.n} robots, {s.m} new tasks")
    return OK


def cmd_translate(args):
    b = translate(ltl.parse_ltl(args.formula))
    if args.hoa:
        text = export_hoa(b, name=args.formula)
        if args.hoa == "-":
            sys.stdout.write(text)
            return OK
        with open(args.hoa, "w", encoding="utf-8") as fh:
            fh.write(text)
    print(b)
    return OK


def cmd_plan(args):
    s = load_scenario(args.file)
    s.robot(args.robot)
    if args.task == "all":
        tasks = list(range(s.m))
    else:
        tasks = [int(x) for x in args.task.split(",")]
        bad = [j for j in tasks if not 0 <= j < s.m]
        if bad:
            raise ScenarioError("/new_tasks", f"no task with index {bad[0]}")
    b = final_behavior(s, args.robot, tasks)
    _print_behavior(b)
    return INFEASIBLE if b.is_empty else OK


def cmd_allocate(args):
    s = load_scenario(args.file)
    r = run_pipeline(s, skip_optimal=args.skip_optimal)
    print(f"token   alpha={r.token_assignment} cost={r.token_cost:g} "
          f"time={r.token_time * 1e3:.3f} ms")
    if not args.skip_optimal:
        print(f"optimal alpha={r.optimal_assignment} cost={r.optimal_cost:g} "
              f"time={r.optimal_time * 1e3:.3f} ms")
    if r.unassigned:
        print(f"unassigned tasks: {r.unassigned}")
    if args.json:
        out = {
            "token": {"alpha": r.token_assignment, "cost": _num(r.token_cost),
                      "time_ms": r.token_time * 1e3},
            "optimal": None if args.skip_optimal else {
                "alpha": r.optimal_assignment, "cost": _num(r.optimal_cost),
                "time_ms": r.optimal_time * 1e3},
            "unassigned": r.unassigned,
            "sat": r.sats,
            "tables": [[{"tasks": sorted(k), "cost": _num(v)}
                        for k, v in sorted(t.items(), key=lambda kv: (len(kv[0]), sorted(kv[0])))]
                       for t in r.tables],
            "behaviors": {str(i): _behavior_dict(b) for i, b in r.behaviors.items()},
        }
        with open(args.json, "w", encoding="utf-8") as fh:
            json.dump(out, fh, indent=2)
            fh.write("\n")
    return OK if r.token_complete else INFEASIBLE


def cmd_bench(args):
    config = BenchConfig.load(args.config)
    rows = bench(config, workers=args.workers)
    write_csv(rows, args.out)
    if args.gnuplot:
        write_gnuplot(rows, args.gnuplot)
    failed = sum(1 for r in rows if r["trial"] != "aggregate" and r["status"] != "ok")
    print(f"wrote {len(rows)} rows to {args.out} ({failed} failed trials)")
    return OK


def build_parser():
    p = argparse.ArgumentParser(prog="taskforge", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    c = sub.add_parser("check", help="validate a scenario file")
    c.add_argument("file")
    c.set_defaults(func=cmd_check)

    c = sub.add_parser("translate", help="translate an LTL formula to a Buchi automaton")
    c.add_argument("formula")
    c.add_argument("--hoa", metavar="OUT", help="write HOA to OUT ('-' for stdout)")
    c.set_defaults(func=cmd_translate)

    c = sub.add_parser("plan", help="synthesize one robot's behavior")
    c.add_argument("file")
    c.add_argument("--robot", type=int, required=True)
    c.add_argument("--task", required=True,
                   help="'all' or comma-separated 0-based new-task indices")
    c.set_defaults(func=cmd_plan)

    c = sub.add_parser("allocate", help="run the full allocation pipeline")
    c.add_argument("file")
    c.add_argument("--skip-optimal", action="store_true")
    c.add_argument("--json", metavar="OUT")
    c.set_defaults(func=cmd_allocate)

    c = sub.add_parser("bench", help="benchmark sweep to CSV")
    c.add_argument("--config", required=True)
    c.add_argument("--out", required=True)
    c.add_argument("--gnuplot", metavar="DIR")
    c.add_argument("--workers", type=int, default=1)
    c.set_defaults(func=cmd_bench)
    return p


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ScenarioError, ltl.LTLSyntaxError, KeyError, ValueError, OSError) as err:
        print(f"error: {err}", file=sys.stderr)
        return INVALID
    except Exception as err:
        print(f"internal error: {type(err).__name__}: {err}", file=sys.stderr)
        return INTERNAL


if __name__ == "__main__":
    sys.exit(main())
