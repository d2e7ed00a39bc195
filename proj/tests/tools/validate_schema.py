"""Validates every config in a directory against the run-config schema."""
import glob
import json
import os
import sys

import jsonschema

schema_path, config_dir = sys.argv[1], sys.argv[2]
with open(schema_path) as f:
    schema = json.load(f)
jsonschema.Draft7Validator.check_schema(schema)
failed = 0
for path in sorted(glob.glob(os.path.join(config_dir, "*.json"))):
    with open(path) as f:
        doc = json.load(f)
    try:
        jsonschema.validate(doc, schema)
    except jsonschema.ValidationError as e:
        print(f"{path}: {e.message}")
        failed += 1
# A config the CLI rejects must be rejected by the schema too.
for bad in ({"experiment": "ldp_tails", "samples": 100000},
            {"experiment": "rigidity_scaling", "seed": 1, "samples": 2, "n_list": [10, 20], "nlist": [1]}):
    try:
        jsonschema.validate(bad, schema)
        print(f"accepted invalid config {bad}")
        failed += 1
    except jsonschema.ValidationError:
        pass
sys.exit(1 if failed else 0)
