#!/usr/bin/env python3
"""Prepend .license_header to C++ sources that do not carry it yet."""

import pathlib
import sys

ROOT = pathlib.Path(__file__).resolve().parent.parent
DIRS = ("core", "tools", "tests", "benchmarks")
SUFFIXES = {".hpp", ".cpp"}


def main() -> int:
    header = (ROOT / ".license_header").read_text()
    if not header.endswith("\n"):
        header += "\n"
    marker = header.splitlines()[1]
    changed = 0
    for d in DIRS:
        for path in sorted((ROOT / d).rglob("*")):
            if path.suffix not in SUFFIXES or not path.is_file():
                continue
            text = path.read_text()
            if marker in text[: len(header) + 64]:
                continue
            path.write_text(header + "\n" + text)
            changed += 1
    print(f"updated {changed} file(s)")
    return 0


if __name__ == "__main__":
    sys.exit(main())
