#!/usr/bin/env python3
"""Sweep the scalar vertical probe across gauges and ubar values.

Writes one CSV per gauge (columns: ubar, kind, limit, liminf, limsup) plus the
full traces, ready for plotting.  Gauges: the linear reference and a family of
oscillatory gauges with varying slope ratio M.
"""

import argparse
import sys
from pathlib import Path

from h1gauge.gauges import linear_gauge, oscillatory_gauge
from h1gauge.limits import EpsGrid, vertical_limit_probe


def sweep(gauge, ubars, grid, out_dir: Path, tag: str) -> None:
    rows = ["ubar,kind,limit,liminf,limsup"]
    traces = []
    for ub in ubars:
        tr = vertical_limit_probe(gauge, ub, grid)
        c = tr.classification
        rows.append(
            f"{ub!r},{c.kind},{c.limit!r},{c.liminf!r},{c.limsup!r}"
        )
        traces.append((ub, tr))
    (out_dir / f"sweep_{tag}.csv").write_text("\n".join(rows) + "\n")

    lines = ["ubar,epsilon,value"]
    for ub, tr in traces:
        for eps, val in tr.rows():
            lines.append(f"{ub!r},{eps!r},{val!r}")
    (out_dir / f"traces_{tag}.csv").write_text("\n".join(lines) + "\n")
    print(f"{tag}: {len(ubars)} probes -> sweep_{tag}.csv, traces_{tag}.csv")


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", default="sweep_out", help="output directory")
    ap.add_argument("--count", type=int, default=30, help="grid length")
    ap.add_argument(
        "--amplitudes", default="3,10,30",
        help="comma-separated slope-ratio amplitudes for the oscillatory family",
    )
    args = ap.parse_args(argv)

    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    grid = EpsGrid(count=args.count)
    ubars = [0.125 * 2**i for i in range(7)]  # 0.125 .. 8

    sweep(linear_gauge(), ubars, grid, out_dir, "linear")
    for m_text in args.amplitudes.split(","):
        M = float(m_text)
        r = min(1e-3, 0.5 / (M * M))  # keep r inside its validity range
        gauge = oscillatory_gauge(M=M, r=r, levels=8)
        sweep(gauge, ubars, grid, out_dir, f"oscillatory_M{m_text.strip()}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
