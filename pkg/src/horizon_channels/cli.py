"""Command-line front end.

Subcommands: ``point``, ``sweep``, ``figures``, ``verify`` and ``fit``.
Exit codes: 0 success, 1 domain/numerical/I-O failure, 2 usage error.
"""

from __future__ import annotations

import argparse
import csv
import io
import math
import os
import sys
import tempfile
import time
from pathlib import Path

from . import analysis
from .analysis import Axis, SweepGrid, SweepRow
from .closedform import derived_quantities
from .errors import HorizonChannelsError, InputError
from .quantities import QUANTITY_FIELDS, ChannelQuantities
from .unruh import (
    AccelerationSpec,
    Encoding,
    Preparation,
    Protocol,
    SchwarzschildSpec,
    acceleration_from_schwarzschild,
    acceleration_from_squeezing,
    as_squeezing,
    squeezing_from_acceleration,
)
from .verification import default_grid, max_deltas, verify_grid

CSV_COLUMNS = ("a", "r", "omega", "alpha_sq", "encoding", "protocol") + QUANTITY_FIELDS + ("status",)
FIGURE_POINTS = 200
FIGURE_R_MAX = 6.0


class UsageError(Exception):
    """Bad flag combination; reported with exit code 2."""


def _fmt(x: float) -> str:
    return format(float(x), ".12g")


def row_to_record(row: SweepRow) -> list[str]:
    record = [_fmt(row.a), _fmt(row.r), _fmt(row.omega), _fmt(row.alpha_sq),
              row.encoding.value, row.protocol.value]
    if row.ok:
        record += [_fmt(getattr(row.quantities, k)) for k in QUANTITY_FIELDS]
    else:
        record += [""] * len(QUANTITY_FIELDS)
    # keep the status on one line so every record is one physical line
    return record + [" ".join(row.status.split())]


def format_csv(rows) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_COLUMNS)
    for row in rows:
        writer.writerow(row_to_record(row))
    return buf.getvalue()


def write_atomic(path, text: str) -> None:
    """Write via a temporary file in the target directory, then rename."""
    path = Path(path)
    fd, tmp = tempfile.mkstemp(prefix=f".{path.name}.", suffix=".tmp", dir=path.parent)
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        try:
            os.unlink(tmp)
        except FileNotFoundError:
            pass
        raise


def write_csv(path, rows) -> None:
    write_atomic(path, format_csv(rows))


def read_csv(path) -> list[SweepRow]:
    """Parse a file written by :func:`write_csv` back into sweep rows."""
    with open(path, encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or tuple(header) != CSV_COLUMNS:
            raise InputError(f"{path}: header does not match {','.join(CSV_COLUMNS)}")
        rows = []
        for line, rec in enumerate(reader, start=2):
            if len(rec) != len(CSV_COLUMNS):
                raise InputError(f"{path}:{line}: expected {len(CSV_COLUMNS)} fields, got {len(rec)}")
            f = dict(zip(CSV_COLUMNS, rec))
            try:
                q = None
                if f["status"] == "ok":
                    vals = {k: float(f[k]) for k in QUANTITY_FIELDS}
                    q = ChannelQuantities(**vals, source_entropy_bits=math.nan)
                rows.append(SweepRow(float(f["a"]), float(f["r"]), float(f["omega"]),
                                     float(f["alpha_sq"]), Encoding.parse(f["encoding"]),
                                     Protocol.parse(f["protocol"]), q, f["status"]))
            except ValueError as exc:
                raise InputError(f"{path}:{line}: {exc}") from None
    return rows


def _resolve_point(args) -> tuple[float, float]:
    """``(a, r)`` from exactly one of --r, --a or --mass/--radius."""
    given = [name for name, v in (("--r", args.r), ("--a", args.a)) if v is not None]
    geometric = args.mass is not None or args.radius is not None
    if geometric:
        if args.mass is None or args.radius is None:
            raise UsageError("--mass and --radius must be given together")
        given.append("--mass/--radius")
    if len(given) != 1:
        raise UsageError("give exactly one of --r, --a, or --mass with --radius"
                         + (f" (got {', '.join(given)})" if given else ""))
    if args.r is not None:
        s = as_squeezing(args.r)
        return acceleration_from_squeezing(s, args.omega), s.r
    if args.a is not None:
        spec = AccelerationSpec(args.a, args.omega)
    else:
        spec = acceleration_from_schwarzschild(SchwarzschildSpec(args.mass, args.radius), args.omega)
    return spec.a, squeezing_from_acceleration(spec).r


def cmd_point(args) -> int:
    a, r = _resolve_point(args)
    prep = Preparation(args.alpha_sq)
    q = derived_quantities(prep, args.encoding, args.protocol, r,
                           maximize_coherent=args.maximize_coherent)
    out = [("a", a), ("r", r), ("omega", args.omega), ("alpha_sq", prep.alpha_sq)]
    out += [(k, getattr(q, k)) for k in QUANTITY_FIELDS]
    out.append(("source_entropy_bits", q.source_entropy_bits))
    print(f"encoding = {Encoding.parse(args.encoding).value}")
    print(f"protocol = {Protocol.parse(args.protocol).value}")
    for name, value in out:
        print(f"{name} = {value:.12f}")
    return 0


def _channels(values, kind):
    if not values or "all" in values:
        return tuple(kind)
    return tuple(kind.parse(v) for v in values)


def cmd_sweep(args) -> int:
    grid = SweepGrid(args.axis, args.start, args.stop, args.points, args.omega, args.alpha_sq,
                     _channels(args.encoding, Encoding), _channels(args.protocol, Protocol))
    rows = analysis.sweep(grid, workers=args.workers)
    if args.out == "-":
        sys.stdout.write(format_csv(rows))
    else:
        write_csv(args.out, rows)
    failed = sum(not row.ok for row in rows)
    if failed:
        print(f"warning: {failed} of {len(rows)} rows failed; see the status column", file=sys.stderr)
    return 0


def figure_tables(rows) -> dict[str, list[SweepRow]]:
    """Split a four-channel sweep into the four figure tables."""
    classical = [row for row in rows if row.protocol is Protocol.CLASSICAL]
    return {"fig1.csv": classical, "fig2.csv": classical, "fig3.csv": list(rows), "fig4.csv": list(rows)}


def cmd_figures(args) -> int:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    start = time.perf_counter()
    grid = SweepGrid(Axis.SQUEEZING, 0.0, args.r_max, args.points, args.omega, args.alpha_sq)
    rows = analysis.sweep(grid, workers=args.workers)
    for name, table in figure_tables(rows).items():
        write_csv(out / name, table)
    print(f"wrote fig1.csv-fig4.csv to {out} ({len(rows)} rows, "
          f"{time.perf_counter() - start:.1f} s)")
    return 0


def cmd_verify(args) -> int:
    ftol = args.fidelity_tolerance
    if ftol is None:
        ftol = min(args.tolerance, 1e-8)
    points = default_grid(args.r_max)
    if not points:
        raise UsageError(f"no verification points with r <= {args.r_max}")
    start = time.perf_counter()
    reports = verify_grid(points, args.tolerance, ftol, workers=args.workers)
    table = max_deltas(reports)
    print(f"{'quantity':<26}{'max |series-oracle|':>22}{'max |N vs 2N|':>18}{'limit':>10}")
    for k, (d, dd) in table.items():
        limit = ftol if k == "fidelity" else args.tolerance
        print(f"{k:<26}{d:>22.3e}{dd:>18.3e}{limit:>10.1e}")
    failed = [rep for rep in reports if not rep.passed]
    for rep in failed:
        p = rep.point
        why = rep.error or ", ".join(f"{k}={v:.2e}" for k, v in rep.deltas.items() if v > rep.limit(k))
        if not why:
            why = "truncation doubling changed values"
        print(f"FAIL r={p.r:g} alpha_sq={p.alpha_sq:g} {p.encoding.value} {p.protocol.value}: {why}")
    print(f"{len(reports) - len(failed)}/{len(reports)} points passed "
          f"in {time.perf_counter() - start:.1f} s")
    return 0 if not failed else 1


def _parse_window(text: str) -> tuple[float, float]:
    try:
        lo, hi = (float(x) for x in text.split(","))
    except ValueError:
        raise UsageError(f"--window expects lo,hi, got {text!r}") from None
    if not lo < hi:
        raise UsageError(f"--window needs lo < hi, got {text!r}")
    return lo, hi


def cmd_fit(args) -> int:
    lo, hi = _parse_window(args.window)
    if args.input:
        rows = read_csv(args.input)
    else:
        grid = SweepGrid(Axis.SQUEEZING, lo, hi, args.points, alpha_sq=args.alpha_sq,
                         encodings=(args.encoding,), protocols=(args.protocol,))
        rows = analysis.sweep(grid, workers=args.workers)
    rows = analysis.select(rows, args.encoding, args.protocol)
    fit = analysis.fit_exponential_decay(rows, (lo, hi), args.quantity)
    print(f"gamma = {fit.gamma:.12f}")
    print(f"log_intercept = {fit.log_intercept:.12f}")
    print(f"rms_residual = {fit.rms_residual:.12g}")
    print(f"window = {fit.window[0]:g},{fit.window[1]:g}")
    print(f"points = {fit.points}")
    return 0


def _positive_int(text):
    n = int(text)
    if n < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text}")
    return n


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="horizon-channels",
        description="Information measures for photonic qubits received by an accelerated "
                    "or horizon-hovering observer.")
    sub = parser.add_subparsers(dest="command", required=True)

    def channel_flags(p, many=False):
        p.add_argument("--omega", type=float, default=1.0, help="mode frequency (default 1)")
        p.add_argument("--alpha-sq", type=float, default=0.5, help="weight of logical zero (default 0.5)")
        if many:
            p.add_argument("--encoding", action="append", help="single, dual or all (repeatable)")
            p.add_argument("--protocol", action="append", help="classical, quantum or all (repeatable)")
        else:
            p.add_argument("--encoding", default="single", help="single or dual (default single)")
            p.add_argument("--protocol", default="classical", help="classical or quantum (default classical)")

    def workers_flag(p):
        p.add_argument("--workers", type=_positive_int, default=None,
                       help="worker processes (default: CPU count, capped by HORIZON_CHANNELS_THREADS)")

    p = sub.add_parser("point", help="evaluate every quantity at one point")
    p.add_argument("--r", type=float, help="squeezing parameter")
    p.add_argument("--a", type=float, help="proper acceleration")
    p.add_argument("--mass", type=float, help="black hole mass (with --radius)")
    p.add_argument("--radius", type=float, help="hovering radius (with --mass)")
    p.add_argument("--maximize-coherent", action="store_true",
                   help="maximize coherent information over alpha_sq instead of using 1/2")
    channel_flags(p)
    p.set_defaults(func=cmd_point)

    p = sub.add_parser("sweep", help="evaluate a grid and write CSV")
    p.add_argument("--axis", default="squeezing", choices=["squeezing", "acceleration", "r", "a"])
    p.add_argument("--start", type=float, required=True)
    p.add_argument("--stop", type=float, required=True)
    p.add_argument("--points", type=int, default=FIGURE_POINTS)
    p.add_argument("--out", required=True, help="CSV path, or - for stdout")
    channel_flags(p, many=True)
    workers_flag(p)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("figures", help="write fig1.csv to fig4.csv")
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("--points", type=int, default=FIGURE_POINTS)
    p.add_argument("--r-max", type=float, default=FIGURE_R_MAX)
    p.add_argument("--omega", type=float, default=1.0)
    p.add_argument("--alpha-sq", type=float, default=0.5)
    workers_flag(p)
    p.set_defaults(func=cmd_figures)

    p = sub.add_parser("verify", help="compare the series with the brute-force pipeline")
    p.add_argument("--tolerance", type=float, default=1e-6, help="bits (default 1e-6)")
    p.add_argument("--fidelity-tolerance", type=float, default=None,
                   help="fidelity limit (default min(tolerance, 1e-8))")
    p.add_argument("--r-max", type=float, default=3.0,
                   help="largest r on the grid; 3 includes the spot check (default 3)")
    workers_flag(p)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("fit", help="fit exp(-gamma r) to a decaying quantity")
    p.add_argument("--window", default="3,6", help="lo,hi in r (default 3,6)")
    p.add_argument("--input", help="CSV written by sweep or figures; default sweeps the window")
    p.add_argument("--quantity", default="coherent_info_bits", choices=list(QUANTITY_FIELDS))
    p.add_argument("--points", type=int, default=61, help="sweep points when no --input")
    p.add_argument("--alpha-sq", type=float, default=0.5)
    p.add_argument("--encoding", default="dual")
    p.add_argument("--protocol", default="quantum")
    workers_flag(p)
    p.set_defaults(func=cmd_fit)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        parser.error(str(exc))
    except InputError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 2
    except (HorizonChannelsError, ArithmeticError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
