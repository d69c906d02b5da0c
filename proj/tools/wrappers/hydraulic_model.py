#!/usr/bin/env python3
"""Flood model exposed through the external protocol, for cross-checks.

Expects 4-dimensional points (Q, Ks, Zv, Zm).
"""
import json
import math
import sys


def height(q, ks, zv, zm):
    return (q / (300.0 * ks * math.sqrt((zm - zv) / 5000.0))) ** 0.6


for line in sys.stdin:
    line = line.strip()
    if not line:
        continue
    request = json.loads(line)
    values = [height(*point) for point in request["points"]]
    sys.stdout.write(json.dumps({"values": values}) + "\n")
    sys.stdout.flush()
