"""Runs the wreach binary on each config and validates every JSON artifact.

Each config is run twice into separate directories; the outputs must be
byte-identical.
"""
import argparse
import filecmp
import json
import pathlib
import subprocess
import sys
import tempfile

import jsonschema


def load(path):
    with open(path) as f:
        return json.load(f)


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--wreach", required=True)
    ap.add_argument("--schemas", required=True)
    ap.add_argument("--config", required=True)
    ap.add_argument("--subcommand", required=True)
    args = ap.parse_args()

    schemas = pathlib.Path(args.schemas)
    jsonschema.validate(load(args.config), load(schemas / "config.schema.json"))

    runs = []
    with tempfile.TemporaryDirectory() as tmp:
        for i in range(2):
            out = pathlib.Path(tmp) / f"run{i}"
            proc = subprocess.run([args.wreach, args.subcommand, "--config", args.config, "--out", str(out)],
                                  capture_output=True, text=True)
            sys.stdout.write(proc.stdout)
            sys.stderr.write(proc.stderr)
            if proc.returncode != 0:
                print(f"exit status {proc.returncode}")
                return 1
            runs.append(out)

        report = load(runs[0] / "report.json")
        jsonschema.validate(report, load(schemas / f"{args.subcommand}_report.schema.json"))
        if not report["pass"]:
            print("report.json: pass is false")
            return 1
        if args.subcommand == "transport":
            jsonschema.validate(load(runs[0] / "plan.json"), load(schemas / "plan.schema.json"))

        names = sorted(p.name for p in runs[0].iterdir())
        match, mismatch, errors = filecmp.cmpfiles(runs[0], runs[1], names, shallow=False)
        if mismatch or errors:
            print(f"nondeterministic outputs: {mismatch + errors}")
            return 1
        print(f"validated {', '.join(names)}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
