#!/usr/bin/env python3
"""Run a sample of egc subcommands and validate their JSON reports.

usage: validate_reports.py EGC_BINARY SCHEMA OUTDIR
Exit status 77 when the jsonschema package is missing.
"""
import json
import pathlib
import subprocess
import sys

ZERO = "0" * 32

RUNS = {
    "encrypt": ["encrypt", "--key", ZERO, "--pt", ZERO],
    "rule-search": ["rule-search"],
    "degree": ["degree", "--width", "12", "--rounds", "3"],
    "graph": ["graph", "--variant", "poor"],
    "bounds": ["bounds", "--mode", "linear"],
    "single-layer": ["single-layer"],
    "avalanche": ["avalanche", "--samples", "4"],
    "sac": ["sac", "--samples", "100"],
    "bic": ["bic", "--samples", "1000"],
    "diff-empirical": ["diff-empirical", "--bits", "0", "--rounds", "3", "--samples", "500"],
    "related-key": ["related-key", "--samples", "100"],
    "subspace": ["subspace", "--dims", "2,4", "--samples", "3"],
    "zero-scan": ["zero-scan", "--delta", "00000001", "--rounds", "2", "--samples", "65536"],
    "coverage": ["coverage", "--samples", "200"],
    "bench": ["bench", "--blocks", "1000"],
}


def main() -> int:
    if len(sys.argv) != 4:
        print(__doc__, file=sys.stderr)
        return 2
    try:
        import jsonschema
    except ImportError:
        print("jsonschema not available", file=sys.stderr)
        return 77
    binary, schema_path, outdir = sys.argv[1:]
    schema = json.loads(pathlib.Path(schema_path).read_text())
    validator = jsonschema.Draft202012Validator(schema)
    out = pathlib.Path(outdir)
    out.mkdir(parents=True, exist_ok=True)

    extra = {
        "lp-emit": ["lp-emit", "--rounds", "1", "--lp", str(out / "model.lp")],
        "nist-gen": ["nist-gen", "--bits", "1280", "--mode", "counter", "--bitstream", str(out / "stream.txt")],
    }
    failures = 0
    for name, args in {**RUNS, **extra}.items():
        report = out / f"{name}.json"
        proc = subprocess.run([binary, *args, "--format", "json", "--out", str(report)], capture_output=True, text=True)
        if proc.returncode != 0:
            print(f"{name}: exit {proc.returncode}: {proc.stderr.strip()}")
            failures += 1
            continue
        doc = json.loads(report.read_text())
        errors = sorted(validator.iter_errors(doc), key=lambda e: list(e.path))
        if errors or doc["manifest"]["subcommand"] != name:
            for e in errors:
                print(f"{name}: {'/'.join(map(str, e.path))}: {e.message}")
            failures += 1
        else:
            print(f"{name}: ok")
    return 1 if failures else 0


if __name__ == "__main__":
    sys.exit(main())
