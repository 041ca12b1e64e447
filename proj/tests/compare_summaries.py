#!/usr/bin/env python3
"""Compare two run summaries, ignoring the timestamp field."""
import json
import sys


def load(path):
    with open(path) as fh:
        doc = json.load(fh)
    doc.pop("generated_at", None)
    return json.dumps(doc, sort_keys=False)


a, b = load(sys.argv[1]), load(sys.argv[2])
if a != b:
    sys.stderr.write("summaries differ\n")
    sys.exit(1)
