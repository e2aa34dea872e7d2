#!/usr/bin/env python3
"""Regenerate tests/golden/*.csv from the manifest using a built zenolab binary.

usage: tools/regen_golden.py [path/to/zenolab]
"""
import json
import pathlib
import subprocess
import sys

root = pathlib.Path(__file__).resolve().parent.parent
golden = root / "tests" / "golden"
binary = sys.argv[1] if len(sys.argv) > 1 else str(root / "build" / "zenolab")

manifest = json.loads((golden / "manifest.json").read_text())
for case in manifest["cases"]:
    result = subprocess.run([binary, *case["args"], "--sequential"], capture_output=True, check=True)
    (golden / f"{case['name']}.csv").write_bytes(result.stdout)
    print(f"wrote {case['name']}.csv")
