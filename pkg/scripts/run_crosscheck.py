#!/usr/bin/env python3
"""Run the seeded solver-versus-oracle suite and print a summary table.

Usage: python scripts/run_crosscheck.py [SEED] [COUNT] [MAX_STATES]
"""

import sys
import time

from qualtree.suite import emptiness_crosscheck


def main() -> int:
    seed = int(sys.argv[1]) if len(sys.argv) > 1 else 1
    count = int(sys.argv[2]) if len(sys.argv) > 2 else 100
    max_states = int(sys.argv[3]) if len(sys.argv) > 3 else 4

    t0 = time.monotonic()
    records = emptiness_crosscheck(seed, count, max_states)
    elapsed = time.monotonic() - t0

    for r in records:
        print(r.line())
    nonempty = sum(1 for r in records if r.verdict == "nonempty")
    bad = [r for r in records if not r.ok]
    print(f"\n{count} instances in {elapsed:.1f}s: "
          f"{nonempty} nonempty, {count - nonempty} empty, {len(bad)} disagreements")
    return 0 if not bad else 4


if __name__ == "__main__":
    sys.exit(main())
