#!/usr/bin/env python3
"""Run every CLI command in JSON and CSV mode, validate the JSON reports
against the schema, and check that CSV reruns are byte-identical."""

import filecmp
import json
import shutil
import subprocess
import sys
from pathlib import Path

import jsonschema

RUNS = {
    "tradeoff": ["tradeoff", "--sigma", "preset:half", "--trajectories", "2000",
                 "--mc-epsilon", "0.1", "--seed", "3"],
    "grover-table": ["grover-table"],
    "ite": ["ite", "--sites", "2,3,4", "--trajectories", "200", "--max-rounds", "100", "--seed", "4"],
    "method1": ["method1", "--sites", "2,3,4", "--mode", "sampled", "--seed", "5"],
    "method2": ["method2", "--sites", "4,6", "--seed", "6"],
    "ground-state": ["oracle", "ground-state", "--couplings", "1,-1,1"],
}


def run(exe, args, out, fmt):
    cmd = [exe] + args + ["--out", str(out), "--format", fmt]
    res = subprocess.run(cmd, capture_output=True, text=True)
    if res.returncode != 0:
        raise SystemExit(f"FAIL: {' '.join(cmd)}\n{res.stderr}")


def main():
    exe, schema_path, work = sys.argv[1], Path(sys.argv[2]), Path(sys.argv[3])
    schema = json.loads(schema_path.read_text())
    shutil.rmtree(work, ignore_errors=True)
    failures = 0
    for name, args in RUNS.items():
        jdir = work / "json" / name
        run(exe, args, jdir, "json")
        report = json.loads((jdir / f"{name}.json").read_text())
        try:
            jsonschema.validate(report, schema)
            assert report["command"] == name
            print(f"ok   schema {name}")
        except (jsonschema.ValidationError, AssertionError) as e:
            failures += 1
            print(f"FAIL schema {name}: {e}")

        a, b = work / "csv_a" / name, work / "csv_b" / name
        run(exe, args, a, "csv")
        run(exe, args, b, "csv")
        files = sorted(p.name for p in a.iterdir())
        same = files == sorted(p.name for p in b.iterdir())
        _, mismatch, errors = filecmp.cmpfiles(a, b, files, shallow=False)
        if same and not mismatch and not errors and any(f.endswith(".csv") for f in files):
            print(f"ok   rerun  {name} ({len(files)} files)")
        else:
            failures += 1
            print(f"FAIL rerun  {name}: {mismatch or errors or 'file sets differ'}")

    bad = subprocess.run([exe, "method2", "--k", "zero", "--out", str(work / "bad")], capture_output=True)
    if bad.returncode == 2:
        print("ok   exit code 2 on a bad argument")
    else:
        failures += 1
        print(f"FAIL exit code {bad.returncode} on a bad argument")
    sys.exit(1 if failures else 0)


if __name__ == "__main__":
    main()
