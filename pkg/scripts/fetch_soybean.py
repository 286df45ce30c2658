#!/usr/bin/env python3
"""Download the soybean-small dataset and stage it for the test suite.

The test suite expects ``tests/data/soybean-small.csv``: a header row
``f1..f35,class`` followed by the 47 data rows of the UCI
``soybean-small.data`` file (35 integer-coded attributes plus a class
label D1..D4). This script fetches the raw file, validates its shape
and class counts, and writes the staged CSV. It needs outbound network
access; run it anywhere that can reach the UCI archive and commit the
resulting file if the test environment cannot.
"""

from __future__ import annotations

import argparse
import sys
import urllib.request
from collections import Counter
from pathlib import Path

DEFAULT_URL = "https://archive.ics.uci.edu/ml/machine-learning-databases/soybean/soybean-small.data"
DEFAULT_DEST = Path(__file__).resolve().parents[1] / "tests" / "data" / "soybean-small.csv"

EXPECTED_ROWS = 47
EXPECTED_FIELDS = 36  # 35 attributes + class label
EXPECTED_CLASSES = {"D1": 10, "D2": 10, "D3": 10, "D4": 17}


def fetch(url: str) -> str:
    with urllib.request.urlopen(url, timeout=60) as resp:
        return resp.read().decode("utf-8")


def validate(rows: list[list[str]]) -> None:
    if len(rows) != EXPECTED_ROWS:
        raise ValueError(f"expected {EXPECTED_ROWS} rows, got {len(rows)}")
    for i, row in enumerate(rows, start=1):
        if len(row) != EXPECTED_FIELDS:
            raise ValueError(f"row {i}: expected {EXPECTED_FIELDS} fields, got {len(row)}")
        for field in row[:-1]:
            if not field.strip().isdigit():
                raise ValueError(f"row {i}: non-integer attribute {field!r}")
    counts = Counter(row[-1].strip() for row in rows)
    if dict(counts) != EXPECTED_CLASSES:
        raise ValueError(f"class counts {dict(counts)} differ from {EXPECTED_CLASSES}")


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--url", default=DEFAULT_URL)
    parser.add_argument("--dest", type=Path, default=DEFAULT_DEST)
    args = parser.parse_args(argv)

    try:
        raw = fetch(args.url)
    except OSError as exc:
        print(f"download failed: {exc}", file=sys.stderr)
        return 1
    rows = [line.split(",") for line in raw.splitlines() if line.strip()]
    try:
        validate(rows)
    except ValueError as exc:
        print(f"validation failed: {exc}", file=sys.stderr)
        return 1

    header = [f"f{i}" for i in range(1, EXPECTED_FIELDS)] + ["class"]
    args.dest.parent.mkdir(parents=True, exist_ok=True)
    with open(args.dest, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(field.strip() for field in row) + "\n")
    print(f"wrote {args.dest} ({len(rows)} rows)")
    return 0


if __name__ == "__main__":
    sys.exit(main())
