"""Distortion-vs-n table from a sweep CSV.

    hdajscc sweep --sigma2 1 --power 1 --noise 1 --rho 0.1,0.25,0.4 --n 16,32,48 \
        --mode genie --delta 0.05 | python scripts/trend_table.py
"""

import csv
import sys
from collections import defaultdict


def main(stream=sys.stdin):
    rows = list(csv.DictReader(stream))
    table = defaultdict(dict)
    ns = []
    for r in rows:
        if r["error"]:
            continue
        n = int(r["n"])
        if n not in ns:
            ns.append(n)
        table[r["rho"]][n] = (float(r["mean_distortion"]), float(r["stderr"]), float(r["D_star"]))
    if not table:
        print("no successful grid points", file=sys.stderr)
        return 1
    print(f"{'rho':>6} " + " ".join(f"{'n=' + str(n):>18}" for n in ns) + f" {'D*':>8}")
    for rho, by_n in table.items():
        cells = []
        for n in ns:
            if n in by_n:
                d, se, _ = by_n[n]
                cells.append(f"{d:>9.4f} ±{se:<7.4f}")
            else:
                cells.append(f"{'-':>18}")
        dstar = next(iter(by_n.values()))[2]
        print(f"{rho:>6} " + " ".join(cells) + f" {dstar:>8.4f}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
