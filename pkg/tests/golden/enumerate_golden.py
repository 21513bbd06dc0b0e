"""Standalone enumeration of the golden 3-robot / 3-task allocation.

Reads alloc_3x3.json, tries every mapping of tasks to {unassigned, robot 1..3},
and writes the best complete assignment and its cost back into the file.
Uses only the standard library so it shares no code with the allocator.
"""
import itertools
import json
import pathlib

PATH = pathlib.Path(__file__).with_name("alloc_3x3.json")


def main():
    data = json.loads(PATH.read_text())
    n, m = data["n"], data["m"]
    tables = []
    for rows in data["tables"]:
        tables.append({tuple(sorted(r["tasks"])): (float("inf") if r["cost"] is None else r["cost"])
                       for r in rows})
    results = []
    for alpha in itertools.product(range(n + 1), repeat=m):
        cost = 0.0
        for i in range(1, n + 1):
            mine = tuple(j for j in range(m) if alpha[j] == i)
            cost += tables[i - 1].get(mine, float("inf"))
        results.append((alpha.count(0), cost, list(alpha)))
    results.sort()
    unassigned, cost, alpha = results[0]
    data["expected"] = {"alpha": alpha, "cost": cost, "unassigned": unassigned,
                        "feasible_complete": sum(1 for r in results if r[0] == 0 and r[1] < float("inf"))}
    PATH.write_text(json.dumps(data, indent=2) + "\n")
    print(data["expected"])


if __name__ == "__main__":
    main()
