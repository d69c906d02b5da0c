#!/usr/bin/env python3
"""Reference wrapper for the external model protocol.

Reads one JSON object per line on stdin: {"points": [[x1, ..., xd], ...]}
and answers one JSON object per line on stdout: {"values": [y1, ...]} with
one value per point, in order. This echo model returns the first coordinate.
"""
import json
import sys

for line in sys.stdin:
    line = line.strip()
    if not line:
        continue
    request = json.loads(line)
    values = [point[0] for point in request["points"]]
    sys.stdout.write(json.dumps({"values": values}) + "\n")
    sys.stdout.flush()
