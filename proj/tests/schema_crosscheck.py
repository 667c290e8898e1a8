#!/usr/bin/env python3
# SPDX-License-Identifier: Apache-2.0
"""Runs the cxrt CLI on a small synthetic cohort and validates every trace
with the reference jsonschema implementation."""

import argparse
import json
import pathlib
import shutil
import subprocess
import sys

import jsonschema


def run(cmd):
    result = subprocess.run(cmd, capture_output=True, text=True)
    if result.returncode != 0:
        sys.stderr.write(f"command failed ({result.returncode}): {' '.join(cmd)}\n{result.stderr}")
        sys.exit(1)
    return result.stdout


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("--cxrt", required=True)
    parser.add_argument("--schema", required=True)
    parser.add_argument("--work-dir", required=True)
    args = parser.parse_args()

    work = pathlib.Path(args.work_dir)
    shutil.rmtree(work, ignore_errors=True)
    work.mkdir(parents=True)
    cohort = work / "cohort"
    run([args.cxrt, "gen-cohort", "--out", str(cohort), "--n", "30", "--seed", "3",
         "--reference-cases", "40", "--image-size", "96"])
    run([args.cxrt, "calibrate", "--reference", str(cohort / "reference"), "--model", str(work / "model.json")])
    shutil.copytree(cohort / "cases", work / "input")
    (work / "input" / "broken.png").write_bytes(b"\x89PNG\r\n\x1a\nnot really")
    (work / "input" / "notes.txt").write_text("not an image\n")
    run([args.cxrt, "run", "--input", str(work / "input"), "--output", str(work / "out"),
         "--model", str(work / "model.json"), "--stub-behavior", str(cohort / "stub_behavior.json")])

    schema = json.loads(pathlib.Path(args.schema).read_text())
    validator = jsonschema.Draft202012Validator(schema)
    traces = sorted((work / "out" / "traces").glob("*.json"))
    failures = 0
    statuses = {}
    for path in traces:
        trace = json.loads(path.read_text())
        statuses[trace["status"]] = statuses.get(trace["status"], 0) + 1
        for error in validator.iter_errors(trace):
            failures += 1
            print(f"{path.name}: {'/'.join(map(str, error.absolute_path))}: {error.message}")
    print(f"{len(traces)} traces, statuses {statuses}, {failures} schema errors")
    if len(traces) < 31 or "quarantined" not in statuses:
        print("expected 30 decided traces plus quarantined inputs")
        return 1
    return 1 if failures else 0


if __name__ == "__main__":
    sys.exit(main())
