#!/usr/bin/env python3
"""Validate fixtures and CLI outputs against the schemas in schemas/."""

import json
import subprocess
import sys
from pathlib import Path

import jsonschema

cli, root = sys.argv[1], Path(sys.argv[2])
schemas = {p.name.removesuffix(".schema.json"): json.loads(p.read_text()) for p in (root / "schemas").glob("*.schema.json")}
fx = root / "fixtures"

inputs = {
    "operator": ["haar_choi.json"],
    "map": ["channel_identity.json", "channel_erasure.json", "channel_depolarizing.json"],
    "process": ["state_phi_plus.json", "omega.json", "separable.json", "feedback_loop.json",
                "channel_process_identity.json"],
    "network": ["fig6_small.json", "identity_network.json"],
    "config": ["optimizer_config.json"],
}

outputs = [
    ("validate_output", ["validate", fx / "state_phi_plus.json"], 0),
    ("validate_output", ["validate", fx / "feedback_loop.json"], 2),
    ("ci_output", ["ci", fx / "omega.json", "--target", "b"], 0),
    ("channel_q_output", ["channel-q", fx / "channel_erasure.json", "--config", fx / "optimizer_config.json", "--seed", "1"], 0),
    ("process_ci_output", ["process-ci", fx / "channel_process_identity.json", "--target-owner", "B", "--seed", "1"], 0),
    ("random_unitary_output", ["random-unitary-exp", "--samples", "50", "--seed", "1"], 0),
    ("random_unitary_output", ["random-unitary-exp", "--mode", "swap", "--samples", "5", "--seed", "1"], 0),
    ("network_output", ["network-exp", "--spec", fx / "fig6_small.json", "--samples", "3", "--seed", "1"], 0),
    ("locc_probe_output", ["locc-probe", "--process", fx / "separable.json", "--setting", "forward", "--measure", "hashing",
                           "--samples", "5", "--seed", "1"], 0),
]

failures = 0


def check(schema, doc, what):
    global failures
    try:
        jsonschema.validate(doc, schemas[schema], cls=jsonschema.Draft202012Validator)
        print(f"ok   {schema:24s} {what}")
    except jsonschema.ValidationError as e:
        failures += 1
        print(f"FAIL {schema:24s} {what}: {e.message}")


for schema, files in inputs.items():
    for name in files:
        check(schema, json.loads((fx / name).read_text()), name)

for schema, args, code in outputs:
    r = subprocess.run([cli, *map(str, args)], capture_output=True, text=True)
    what = " ".join(str(a) for a in args[:1])
    if r.returncode != code:
        failures += 1
        print(f"FAIL {schema:24s} {what}: exit {r.returncode}, expected {code}: {r.stderr.strip()}")
        continue
    check(schema, json.loads(r.stdout), what)

sys.exit(1 if failures else 0)
