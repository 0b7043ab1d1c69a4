"""secext: command line front end.

Exit codes: 0 ok, 1 usage, 2 data error, 3 verification failure,
4 inconsistent delta solve.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import logging
import os
import sys
from dataclasses import asdict, dataclass, fields
from pathlib import Path

from filelock import FileLock

from . import resolution as resmod
from .amap import ATable, ATableError, load_table, validate_table
from .chart import ChartSpec, render_chart
from .pairmod import AssemblyError, assemble, check_secondary_exactness
from .resolution import ResolutionError
from .secondary import (
    DeltaError,
    InconsistentSolve,
    dump_d2,
    dump_delta,
    e3_dimensions,
    extract_d2,
    import_delta,
    load_d2,
    parse_delta,
    solve_through,
)

log = logging.getLogger("secext")

EXIT_USAGE, EXIT_DATA, EXIT_VERIFY, EXIT_INCONSISTENT = 1, 2, 3, 4


class VerificationFailed(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


# --- cache ----------------------------------------------------------------------


def cache_dir() -> Path:
    return Path(os.environ.get("SECEXT_CACHE", ".secext"))


def content_hash(*parts: str) -> str:
    h = hashlib.sha256()
    for p in parts:
        h.update(p.encode())
        h.update(b"\0")
    return h.hexdigest()[:20]


def cached(kind: str, key: str, compute):
    """Return cached text for (kind, key), computing and storing it under a lock."""
    root = cache_dir() / kind
    root.mkdir(parents=True, exist_ok=True)
    path = root / f"{key}.txt"
    with FileLock(str(path) + ".lock"):
        if path.exists():
            log.info("cache hit %s/%s", kind, key)
            return path.read_text()
        text = compute()
        tmp = path.with_suffix(".tmp")
        tmp.write_text(text)
        tmp.replace(path)
        return text


# --- helpers --------------------------------------------------------------------


def _load_amap(spec: str) -> ATable:
    return load_table(spec)


def _write(text: str, out: str | None):
    if out in (None, "-"):
        sys.stdout.write(text)
    else:
        Path(out).write_text(text)


def _window(s: str) -> tuple[int, int, int, int]:
    try:
        ms, ds = s.split(",")
        m0, m1 = (int(x) for x in ms.split(":"))
        d0, d1 = (int(x) for x in ds.split(":"))
    except ValueError:
        raise argparse.ArgumentTypeError(f"window must look like mMin:mMax,dMin:dMax, got {s!r}") from None
    return m0, m1, d0, d1


def format_e3(report: dict) -> str:
    lines = ["# m d stem e2 e3"]
    for (m, d), e in sorted(report.items()):
        lines.append(f"{m} {d} {d - m} {e.e2} {e.e3}")
    return "\n".join(lines) + "\n"


# --- subcommands ----------------------------------------------------------------


def cmd_resolve(args) -> int:
    state = Path(args.state)
    if args.resume and state.exists():
        res = resmod.load(state)
        log.info("resuming from caps (%d, %d)", res.max_filt, res.max_deg)
        res.extend(max(args.max_filt, res.max_filt), max(args.max_deg, res.max_deg), jobs=args.jobs)
    else:
        res = resmod.resolve(args.max_filt, args.max_deg, jobs=args.jobs)
    bad = res.check_d_squared() + res.check_minimal()
    if bad:
        raise VerificationFailed(f"resolution invariants fail at {', '.join(map(str, bad))}")
    resmod.save(res, state)
    print(f"{len(res.all_generators())} generators through filtration {res.max_filt}, degree {res.max_deg}")
    return 0


def cmd_delta(args) -> int:
    res = resmod.load(args.res)
    A = _load_amap(args.amap)
    table = solve_through(res, A, args.max_deg, jobs=args.jobs)
    _write(dump_delta(table), args.out)
    return 0


def cmd_d2(args) -> int:
    table = import_delta(args.delta)
    _write(dump_d2(extract_d2(table)), args.out)
    return 0


def cmd_e3(args) -> int:
    res = resmod.load(args.res)
    d2 = load_d2(args.d2)
    bad = d2.check_square_zero(res)
    if bad:
        raise VerificationFailed(f"d2 o d2 != 0 at {bad}")
    _write(format_e3(e3_dimensions(res, d2)), args.out)
    return 0


def cmd_chart(args) -> int:
    res = resmod.load(args.res)
    d2 = load_d2(args.d2) if args.d2 else None
    spec = ChartSpec.from_resolution(res, d2, max_stem=args.max_stem, max_filt=args.max_filt, format=args.format)
    _write(render_chart(spec), args.out)
    return 0


def cmd_verify(args) -> int:
    res = resmod.load(args.res)
    A = _load_amap(args.amap)
    table = import_delta(args.delta, res)
    c = assemble(res, table, A)
    rep = check_secondary_exactness(c, args.window)
    print(rep.to_json())
    return 0 if rep.ok else EXIT_VERIFY


def cmd_validate_amap(args) -> int:
    A = _load_amap(args.amap)
    rep = validate_table(A, args.cap, samples=args.samples, seed=args.seed)
    print("\n".join(rep.lines()))
    return 0 if rep.ok else EXIT_VERIFY


def cmd_import_delta(args) -> int:
    res = resmod.load(args.res) if args.res else None
    table = import_delta(args.delta, res)
    print(f"{len(table.delta)} entries through degree {table.max_deg}", file=sys.stderr)
    if args.out:
        _write(dump_delta(table), args.out)
    return 0


@dataclass
class PipelineConfig:
    max_filt: int = 6
    max_deg: int = 12
    amap: str = "zero"
    delta_file: str | None = None  # extract-only mode: take delta from a file instead of solving
    out_dir: str = "secext-out"
    jobs: int = 1
    resume: bool = False
    max_stem: int = 40
    chart_filt: int = 15

    @classmethod
    def from_file(cls, path) -> "PipelineConfig":
        data = json.loads(Path(path).read_text())
        known = {f.name for f in fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise ValueError(f"unknown config keys: {sorted(unknown)}")
        return cls(**data)


def pipeline(cfg: PipelineConfig) -> int:
    out = Path(cfg.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    state = out / "resolution.txt"

    def compute_res():
        if cfg.resume and state.exists():
            res = resmod.load(state)
            res.extend(max(cfg.max_filt, res.max_filt), max(cfg.max_deg, res.max_deg), jobs=cfg.jobs)
        else:
            res = resmod.resolve(cfg.max_filt, cfg.max_deg, jobs=cfg.jobs)
        return resmod.dumps(res)

    res_text = cached("resolution", content_hash("res", str(cfg.max_filt), str(cfg.max_deg)), compute_res)
    res = resmod.loads(res_text)
    state.write_text(res_text)

    if cfg.delta_file:
        delta_text = Path(cfg.delta_file).read_text()
        table = parse_delta(delta_text, res)
    else:
        A = _load_amap(cfg.amap)
        key = content_hash("delta", res_text, A.content_key(), str(cfg.max_deg))
        delta_text = cached("delta", key, lambda: dump_delta(solve_through(res, A, cfg.max_deg, jobs=cfg.jobs)))
        table = parse_delta(delta_text, res)
    (out / "delta.txt").write_text(dump_delta(table))

    d2 = extract_d2(table)
    bad = d2.check_square_zero(res)
    if bad:
        raise VerificationFailed(f"d2 o d2 != 0 at {bad}")
    (out / "d2.txt").write_text(dump_d2(d2))
    (out / "e3.txt").write_text(format_e3(e3_dimensions(res, d2)))
    spec = ChartSpec.from_resolution(res, d2, max_stem=cfg.max_stem, max_filt=cfg.chart_filt)
    (out / "chart.txt").write_text(render_chart(spec))
    spec.format = "svg"
    (out / "chart.svg").write_text(render_chart(spec))
    sys.stdout.write(dump_d2(d2))
    print(f"{len(d2)} d2 arrows; outputs in {out}", file=sys.stderr)
    return 0


def cmd_pipeline(args) -> int:
    cfg = PipelineConfig.from_file(args.config) if args.config else PipelineConfig()
    for f in fields(PipelineConfig):
        v = getattr(args, f.name, None)
        if v is not None and v is not False:
            setattr(cfg, f.name, v)
    log.info("pipeline config %s", asdict(cfg))
    return pipeline(cfg)


# --- parser ---------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="secext", description="Minimal resolutions, secondary differential delta, d2 and E3 charts.")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    s = sub.add_parser("resolve", help="compute a minimal resolution")
    s.add_argument("--max-deg", type=int, required=True)
    s.add_argument("--max-filt", type=int, required=True)
    s.add_argument("--state", required=True, help="resolution file (written; read with --resume)")
    s.add_argument("--jobs", type=int, default=1)
    s.add_argument("--resume", action="store_true")
    s.set_defaults(func=cmd_resolve)

    s = sub.add_parser("delta", help="solve d delta = delta d degree by degree")
    s.add_argument("--res", required=True)
    s.add_argument("--amap", default="zero", help="A table file, or 'zero'")
    s.add_argument("--max-deg", type=int, required=True)
    s.add_argument("--out")
    s.add_argument("--jobs", type=int, default=1)
    s.set_defaults(func=cmd_delta)

    s = sub.add_parser("d2", help="extract d2 from a delta file")
    s.add_argument("--delta", required=True)
    s.add_argument("--out")
    s.set_defaults(func=cmd_d2)

    s = sub.add_parser("e3", help="E2 and E3 dimensions per bidegree")
    s.add_argument("--res", required=True)
    s.add_argument("--d2", required=True)
    s.add_argument("--out")
    s.set_defaults(func=cmd_e3)

    s = sub.add_parser("chart", help="render an Adams chart")
    s.add_argument("--res", required=True)
    s.add_argument("--d2")
    s.add_argument("--format", choices=["text", "svg"], default="text")
    s.add_argument("--max-stem", type=int, default=40)
    s.add_argument("--max-filt", type=int, default=15)
    s.add_argument("--out")
    s.set_defaults(func=cmd_chart)

    s = sub.add_parser("verify", help="check the secondary complex identities and exactness")
    s.add_argument("--res", required=True)
    s.add_argument("--delta", required=True)
    s.add_argument("--amap", default="zero")
    s.add_argument("--window", type=_window, required=True, help="mMin:mMax,dMin:dMax")
    s.set_defaults(func=cmd_verify)

    s = sub.add_parser("validate-amap", help="check an A table against the derivation rules")
    s.add_argument("--amap", required=True)
    s.add_argument("--cap", type=int, required=True, help="check entries with n + |rho| <= cap")
    s.add_argument("--samples", type=int, default=200)
    s.add_argument("--seed", type=int, default=0)
    s.set_defaults(func=cmd_validate_amap)

    s = sub.add_parser("import-delta", help="parse and shape-check a delta file")
    s.add_argument("--delta", required=True)
    s.add_argument("--res")
    s.add_argument("--out")
    s.set_defaults(func=cmd_import_delta)

    s = sub.add_parser("pipeline", help="resolve, delta, d2, e3 and chart in one go")
    s.add_argument("--config", help="JSON file with pipeline settings")
    s.add_argument("--max-filt", type=int)
    s.add_argument("--max-deg", type=int)
    s.add_argument("--amap")
    s.add_argument("--delta-file", help="extract-only mode: use this delta table instead of solving")
    s.add_argument("--out-dir")
    s.add_argument("--jobs", type=int)
    s.add_argument("--resume", action="store_true")
    s.set_defaults(func=cmd_pipeline)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        return args.func(args)
    except InconsistentSolve as e:
        print(f"secext: {e}", file=sys.stderr)
        return EXIT_INCONSISTENT
    except VerificationFailed as e:
        print(f"secext: verification failed: {e}", file=sys.stderr)
        return EXIT_VERIFY
    except (DeltaError, ResolutionError, ATableError, AssemblyError, OSError, ValueError) as e:
        print(f"secext: data error: {e}", file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
