#!/usr/bin/env python3
"""Unpack the bundled IDX dataset (or any *-ubyte.gz dropped into data/)."""

import argparse
import gzip
import pathlib
import shutil
import sys


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--src", default="data", help="directory holding *-ubyte.gz files")
    parser.add_argument("--out", default=None, help="destination (default: same as --src)")
    args = parser.parse_args()

    src = pathlib.Path(args.src)
    out = pathlib.Path(args.out) if args.out else src
    out.mkdir(parents=True, exist_ok=True)

    archives = sorted(src.glob("*-ubyte.gz"))
    if not archives:
        print(f"no *-ubyte.gz files in {src}", file=sys.stderr)
        return 1

    for gz in archives:
        dest = out / gz.name[: -len(".gz")]
        if dest.exists() and dest.stat().st_size > 0:
            print(f"{dest} already present")
            continue
        with gzip.open(gz, "rb") as fin, open(dest, "wb") as fout:
            shutil.copyfileobj(fin, fout)
        print(f"wrote {dest}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
