#!/usr/bin/env python3
"""Solve a CPLEX-LP model with HiGHS and print the optimum as JSON.

Exit status 77 when highspy is not installed, 1 when the model is not
solved to optimality.
"""
import json
import sys


def main() -> int:
    if len(sys.argv) != 2:
        print("usage: solve_lp.py MODEL.lp", file=sys.stderr)
        return 2
    try:
        import highspy
    except ImportError:
        print("highspy not available", file=sys.stderr)
        return 77
    h = highspy.Highs()
    h.setOptionValue("output_flag", False)
    if h.readModel(sys.argv[1]) != highspy.HighsStatus.kOk:
        print(f"cannot read {sys.argv[1]}", file=sys.stderr)
        return 1
    h.run()
    status = h.getModelStatus()
    optimal = status == highspy.HighsModelStatus.kOptimal
    info = h.getInfo()
    print(json.dumps({
        "status": h.modelStatusToString(status),
        "objective": info.objective_function_value if optimal else None,
        "columns": h.getNumCol(),
        "rows": h.getNumRow(),
    }))
    return 0 if optimal else 1


if __name__ == "__main__":
    sys.exit(main())
