#!/usr/bin/env python3
"""Install ISCAS-85 .bench files into benchmarks/iscas85 and check their stats.

    fetch_benchmarks.py --from DIR          copy from a local directory
    fetch_benchmarks.py --from URL_PREFIX   download <prefix>/<file> for each circuit
    fetch_benchmarks.py --check             only verify what is installed

Exit status is 0 when every circuit is present and matches the manifest.
"""

import argparse
import json
import re
import shutil
import sys
import urllib.request
from pathlib import Path

ROOT = Path(__file__).resolve().parent.parent
MANIFEST = ROOT / "benchmarks" / "manifest.json"

DECL = re.compile(r"^\s*(INPUT|OUTPUT)\s*\(", re.IGNORECASE)
ASSIGN = re.compile(r"^\s*[^#=\s]+\s*=")


def bench_stats(path):
    inputs = outputs = gates = 0
    for line in path.read_text().splitlines():
        line = line.split("#", 1)[0]
        m = DECL.match(line)
        if m:
            if m.group(1).upper() == "INPUT":
                inputs += 1
            else:
                outputs += 1
        elif ASSIGN.match(line):
            gates += 1
    return inputs, outputs, gates


def install(source, target, name):
    if re.match(r"^[a-z]+://", source):
        url = source.rstrip("/") + "/" + name
        with urllib.request.urlopen(url, timeout=60) as response:
            target.write_bytes(response.read())
    else:
        shutil.copyfile(Path(source) / name, target)


def main():
    parser = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    group = parser.add_mutually_exclusive_group(required=True)
    group.add_argument("--from", dest="source", help="directory or URL prefix holding the .bench files")
    group.add_argument("--check", action="store_true")
    parser.add_argument("--dest", type=Path, help="install directory (default: from the manifest)")
    args = parser.parse_args()

    manifest = json.loads(MANIFEST.read_text())
    dest = args.dest or MANIFEST.parent / manifest["directory"]
    dest.mkdir(parents=True, exist_ok=True)

    ok = True
    for circuit in manifest["circuits"]:
        target = dest / circuit["file"]
        if args.source:
            try:
                install(args.source, target, circuit["file"])
            except (OSError, ValueError) as err:
                print(f"{circuit['name']}: fetch failed: {err}")
                ok = False
                continue
        if not target.exists():
            print(f"{circuit['name']}: missing {target}")
            ok = False
            continue
        got = bench_stats(target)
        want = (circuit["inputs"], circuit["outputs"], circuit["gates"])
        status = "ok" if got == want else f"MISMATCH, expected {want[0]}/{want[1]}/{want[2]}"
        print(f"{circuit['name']}: {got[0]}/{got[1]}/{got[2]} {status}")
        ok = ok and got == want
    return 0 if ok else 1


if __name__ == "__main__":
    sys.exit(main())
