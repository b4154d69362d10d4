#!/usr/bin/env python3
"""Run every named reproduction and print a summary table.

    python scripts/run_reproductions.py [NAME ...]
"""

import sys
import time

from strictlin import reproductions


def main(argv: list[str]) -> int:
    names = argv or sorted(reproductions.CATALOG)
    failures = 0
    for name in names:
        t0 = time.monotonic()
        rep = reproductions.run(name)
        print(rep.text())
        print(f"  elapsed: {time.monotonic() - t0:.2f}s")
        failures += not rep.ok
    print(f"\n{len(names) - failures}/{len(names)} reproductions ok")
    return 1 if failures else 0


if __name__ == "__main__":
    sys.exit(main(sys.argv[1:]))
