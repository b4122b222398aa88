#!/usr/bin/env python3
"""Regenerates src/catalog_data.inc from data/families/*.txt.

The .inc file embeds every family file verbatim so the library works without
access to the data directory; a unit test keeps the two in sync.
"""

import pathlib
import re

ROOT = pathlib.Path(__file__).resolve().parent.parent
FAMILY_DIR = ROOT / "data" / "families"
OUT = ROOT / "src" / "catalog_data.inc"


def sort_key(path: pathlib.Path):
    m = re.fullmatch(r"(\d+)_(\d+)", path.stem)
    if not m:
        raise SystemExit(f"unexpected family file name: {path.name}")
    return (int(m.group(1)), int(m.group(2)))


def main() -> None:
    files = sorted(FAMILY_DIR.glob("*.txt"), key=sort_key)
    if not files:
        raise SystemExit(f"no family files under {FAMILY_DIR}")
    lines = ["// Generated by tools/gen_catalog.py from data/families/. Do not edit."]
    for path in files:
        text = path.read_text()
        if ")CAT" in text:
            raise SystemExit(f"{path.name} clashes with the raw-string delimiter")
        lines.append('{"%s", R"CAT(%s)CAT"},' % (path.stem, text))
    OUT.write_text("\n".join(lines) + "\n")
    print(f"wrote {OUT} ({len(files)} families)")


if __name__ == "__main__":
    main()
