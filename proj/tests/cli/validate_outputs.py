"""Runs every CLI command on reduced configs and validates the outputs against the published schemas."""

import argparse
import copy
import csv
import json
import pathlib
import re
import subprocess
import sys

import jsonschema
from referencing import Registry, Resource

CSV_HEADERS = {
    "bands.csv": ["arclength", "alpha_x", "alpha_y", "omega1", "omega2", "residual1", "residual2",
                  "omega1_asym", "omega2_asym"],
    "dirac_cone.csv": ["direction", "theta", "t", "t_rel", "alpha_x", "alpha_y", "omega1", "omega2"],
    "field.csv": ["x", "y", "re_u", "im_u", "inside"],
    "line.csv": ["x", "re_u", "im_u", "inside"],
    "envelope.csv": ["epsilon", "f_dispersion", "f_fft"],
    "compare.csv": ["epsilon", "f_honeycomb", "f_square"],
}
NUMBER = re.compile(r"^(-?[0-9]\.[0-9]{12}e[+-][0-9]{2,3}|nan)$")


def reduced(config):
    c = copy.deepcopy(config)
    honeycomb = c["lattice"]["kind"] == "honeycomb"
    c["bands"] = {"path": ["K", "M"] if honeycomb else ["X", "M"], "points_per_segment": 2}
    c["dirac"] = {"h_rel": 1e-3, "directions": 2, "t_min": 1e-3, "t_max": 5e-2, "samples": 5}
    c["field"].update({"cells": 1, "per_cell": 6, "probes": 5})
    c["envelope"] = {"epsilons": [-4e-3, 4e-3, 8e-3], "fft_epsilons": [8e-3], "fft_cells": 64, "fft_per_cell": 8}
    c["compare"] = {"honeycomb_epsilons": [2e-3, 4e-3], "square_epsilons": [2e-3, 4e-3]}
    return c


def check_csv(path):
    with open(path, newline="", encoding="utf-8") as fh:
        rows = list(csv.reader(fh))
    expected = CSV_HEADERS[path.name]
    if rows[0] != expected:
        raise AssertionError(f"{path}: header {rows[0]} != {expected}")
    if len(rows) < 2:
        raise AssertionError(f"{path}: no data rows")
    for row in rows[1:]:
        if len(row) != len(expected):
            raise AssertionError(f"{path}: ragged row {row}")
        for cell in row:
            if not NUMBER.match(cell):
                raise AssertionError(f"{path}: '{cell}' is not %.12e")


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--cli", required=True)
    ap.add_argument("--schemas", required=True, type=pathlib.Path)
    ap.add_argument("--configs", required=True, type=pathlib.Path)
    ap.add_argument("--work", required=True, type=pathlib.Path)
    args = ap.parse_args()

    schemas = {p.name.split(".")[0]: json.loads(p.read_text()) for p in args.schemas.glob("*.schema.json")}
    registry = Registry().with_resources(
        (f"{name}.schema.json", Resource.from_contents(s)) for name, s in schemas.items())

    def validate(instance, name):
        jsonschema.Draft202012Validator(schemas[name], registry=registry).validate(instance)

    failures = 0

    def check(label, fn):
        nonlocal failures
        try:
            fn()
            print(f"ok   {label}")
        except Exception as exc:  # noqa: BLE001 - report every failure, then exit nonzero
            failures += 1
            print(f"FAIL {label}: {exc}")

    for cfg in sorted(args.configs.glob("*.json")):
        check(f"config {cfg.name}", lambda cfg=cfg: validate(json.loads(cfg.read_text()), "config"))

    args.work.mkdir(parents=True, exist_ok=True)
    runs = [
        ("default.json", "bands", "bands"),
        ("default.json", "dirac", "dirac"),
        ("default.json", "field", "field"),
        ("default.json", "envelope", "envelope"),
        ("default.json", "compare", "compare"),
        ("square.json", "bands", "bands"),
        ("square.json", "field", "field"),
        ("square.json", "envelope", "envelope"),
    ]
    for cfg_name, command, schema in runs:
        base = json.loads((args.configs / cfg_name).read_text())
        small = reduced(base)
        cfg_path = args.work / f"{cfg_name[:-5]}_reduced.json"
        cfg_path.write_text(json.dumps(small, indent=2))
        out = args.work / f"{cfg_name[:-5]}_{command}"

        def run(cfg_path=cfg_path, out=out, command=command, schema=schema):
            proc = subprocess.run([args.cli, command, "--config", str(cfg_path), "--out", str(out)],
                                  capture_output=True, text=True)
            if proc.returncode != 0:
                raise AssertionError(f"exit {proc.returncode}: {proc.stderr.strip()}")
            manifest = json.loads((out / "manifest.json").read_text())
            validate(manifest, "manifest")
            for name in manifest["outputs"]:
                path = out / name
                if name.endswith(".json"):
                    validate(json.loads(path.read_text()), schema)
                else:
                    check_csv(path)

        check(f"{command} on {cfg_name}", run)

    print(f"{failures} failure(s)")
    return 1 if failures else 0


if __name__ == "__main__":
    sys.exit(main())
