"""Extract d2 from the bundled delta table, compare with the hand-entered arrow
list and write the E3 chart (text + svg) plus a per-bidegree E2/E3 table."""

import argparse
import time
from pathlib import Path

from secext import data_file
from secext.chart import ChartSpec, render_chart
from secext.resolution import resolve
from secext.secondary import e3_dimensions, extract_d2, import_delta, load_d2


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", default="chart-out")
    ap.add_argument("--max-stem", type=int, default=40)
    args = ap.parse_args()
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)

    t0 = time.perf_counter()
    res = resolve(14, 35)
    print(f"resolution m<=14 d<=35: {sum(res.counts().values())} generators, {time.perf_counter() - t0:.2f}s")
    table = import_delta(data_file("published-delta-deg35.txt"), res)
    d2 = extract_d2(table)
    ref = load_d2(data_file("published-d2.txt"))
    print(f"{len(d2)} arrows extracted, {len(ref)} in the reference list, equal: {d2.arrows == ref.arrows}")
    for s, t in d2.sorted_arrows():
        print(f"  d2 {s} -> {t}   (stem {s.stem}, m {s.m})")
    print("d2 o d2 = 0:", not d2.check_square_zero(res))

    e3 = e3_dimensions(res, d2)
    rows = ["stem m e2 e3"]
    for (m, d), e in sorted(e3.items(), key=lambda kv: (kv[1].stem, kv[0][0])):
        if e.e2 != e.e3:
            rows.append(f"{e.stem} {m} {e.e2} {e.e3}")
    (out / "e2_e3_changes.txt").write_text("\n".join(rows) + "\n")
    print(f"bidegrees changed by d2: {len(rows) - 1}, total dimension drop {sum(e.e2 - e.e3 for e in e3.values())}")

    for fmt, name in (("text", "chart.txt"), ("svg", "chart.svg")):
        spec = ChartSpec.from_resolution(res, d2, max_stem=args.max_stem, max_filt=14, format=fmt)
        (out / name).write_text(render_chart(spec))
    print(f"wrote {out}/chart.txt, {out}/chart.svg, {out}/e2_e3_changes.txt")


if __name__ == "__main__":
    main()
