"""Wall time of resolve + zero-A delta solve against the degree bound."""

import argparse
import time

from secext.amap import ATable
from secext.resolution import resolve
from secext.secondary import solve_through


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--max-filt", type=int, default=12)
    ap.add_argument("--degrees", default="10,15,20,25,30,35")
    ap.add_argument("--jobs", type=int, default=1)
    args = ap.parse_args()
    print("max_deg generators resolve_s delta_s")
    for d in map(int, args.degrees.split(",")):
        t0 = time.perf_counter()
        res = resolve(args.max_filt, d, jobs=args.jobs)
        t1 = time.perf_counter()
        solve_through(res, ATable.zero(), jobs=args.jobs)
        t2 = time.perf_counter()
        print(f"{d} {sum(res.counts().values())} {t1 - t0:.3f} {t2 - t1:.3f}")


if __name__ == "__main__":
    main()
