#!/usr/bin/env python3
"""Render SER-vs-SNR figures from relaylab result CSVs.

One figure per CSV: Monte-Carlo estimates as markers with 95% confidence
bars, the high-SNR asymptote as a dashed line, log-scale error axis, one
series per value of the grouping column.  Zero-SER Monte-Carlo points
cannot appear on a log axis; they are dropped and the drop is annotated in
the legend.

    plot_figures.py --csv results.csv --group-by n_relays --out fig.png
    plot_figures.py --all figures-out/           # fig1..fig4 CSVs in a dir
"""

from __future__ import annotations

import argparse
import csv
import sys
from dataclasses import dataclass
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

REQUIRED_COLUMNS = [
    "scenario", "snr_db", "n_relays", "rho_f1", "rho_f2", "rho_e",
    "modulation", "trials", "ser_mc", "ci_low", "ci_high",
    "ser_asymptotic", "ser_integral", "diversity_order",
]

# natural grouping column for each shipped figure scenario
DEFAULT_GROUP_BY = {
    "fig1": "n_relays",
    "fig2": "rho_f1",
    "fig3": "scenario",
    "fig4": "scenario",
}


class SchemaError(Exception):
    pass


@dataclass
class FigureSpec:
    input_csv: Path
    group_by: str
    output: Path
    title: str = ""
    xlabel: str = "SNR (dB)"
    ylabel: str = "average SER"


def read_rows(path: Path) -> list[dict]:
    """Parse the fixed-schema CSV; numeric fields become floats, blank
    Monte-Carlo fields become None."""
    with path.open(newline="") as fh:
        reader = csv.DictReader(fh)
        header = reader.fieldnames or []
        missing = [c for c in REQUIRED_COLUMNS if c not in header]
        if missing:
            raise SchemaError(f"{path}: missing column(s): {', '.join(missing)}")
        rows = []
        for lineno, raw in enumerate(reader, start=2):
            row = dict(raw)
            try:
                row["snr_db"] = float(raw["snr_db"])
                for col in ("ser_mc", "ci_low", "ci_high",
                            "ser_asymptotic", "ser_integral"):
                    row[col] = float(raw[col]) if raw[col] not in ("", None) else None
            except (TypeError, ValueError) as exc:
                raise SchemaError(f"{path}: malformed row at line {lineno}: {exc}") from None
            rows.append(row)
    return rows


def render(spec: FigureSpec):
    """Draw the figure described by `spec`, save it, and return it."""
    rows = read_rows(spec.input_csv)
    if rows and spec.group_by not in rows[0]:
        raise SchemaError(f"{spec.input_csv}: no grouping column {spec.group_by!r}")

    fig, ax = plt.subplots(figsize=(7.0, 5.2))
    groups: dict[str, list[dict]] = {}
    for row in rows:
        groups.setdefault(str(row[spec.group_by]), []).append(row)

    colors = plt.rcParams["axes.prop_cycle"].by_key()["color"]
    for i, (key, pts) in enumerate(sorted(groups.items())):
        color = colors[i % len(colors)]
        pts = sorted(pts, key=lambda r: r["snr_db"])
        label = f"{spec.group_by}={key}" if spec.group_by != "scenario" else key

        mc = [p for p in pts if p["ser_mc"] is not None]
        nonzero = [p for p in mc if p["ser_mc"] > 0.0]
        dropped = len(mc) - len(nonzero)
        if nonzero:
            x = [p["snr_db"] for p in nonzero]
            y = [p["ser_mc"] for p in nonzero]
            lo = [max(p["ser_mc"] - p["ci_low"], 0.0) for p in nonzero]
            hi = [max(p["ci_high"] - p["ser_mc"], 0.0) for p in nonzero]
            mc_label = f"{label} (simulated)"
            if dropped:
                mc_label += f" [{dropped} zero-SER dropped]"
            ax.errorbar(x, y, yerr=[lo, hi], fmt="o", ms=4.5, lw=1.0,
                        capsize=2.5, color=color, label=mc_label)
        elif dropped:
            ax.plot([], [], "o", ms=4.5, color=color,
                    label=f"{label} (simulated) [{dropped} zero-SER dropped]")

        asym = [p for p in pts if p["ser_asymptotic"] is not None
                and p["ser_asymptotic"] > 0.0]
        if asym:
            ax.plot([p["snr_db"] for p in asym],
                    [p["ser_asymptotic"] for p in asym],
                    "--", lw=1.4, color=color, label=f"{label} (asymptote)")

    ax.set_yscale("log")
    ax.set_xlabel(spec.xlabel)
    ax.set_ylabel(spec.ylabel)
    if spec.title:
        ax.set_title(spec.title)
    ax.grid(True, which="both", alpha=0.3)
    if groups:
        ax.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(spec.output, dpi=150)
    return fig


def render_all(directory: Path, out_dir: Path | None = None) -> list[Path]:
    """Consume a `relaylab figures` output directory: fig1..fig4 CSVs."""
    out_dir = out_dir or directory
    outputs = []
    for stem, group_by in DEFAULT_GROUP_BY.items():
        src = directory / f"{stem}.csv"
        if not src.exists():
            raise SchemaError(f"{directory}: expected {src.name} not found")
        out = out_dir / f"{stem}.png"
        spec = FigureSpec(input_csv=src, group_by=group_by, output=out,
                          title=stem)
        fig = render(spec)
        plt.close(fig)
        outputs.append(out)
    return outputs


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--csv", type=Path, help="input result CSV")
    ap.add_argument("--group-by", default="scenario", metavar="COL")
    ap.add_argument("--out", type=Path, help="output image path")
    ap.add_argument("--all", type=Path, metavar="DIR",
                    help="render fig1..fig4 CSVs from a directory")
    ap.add_argument("--out-dir", type=Path, default=None,
                    help="with --all: where to write the images")
    ap.add_argument("--title", default="")
    args = ap.parse_args(argv)

    try:
        if args.all:
            for out in render_all(args.all, args.out_dir):
                print(f"wrote {out}")
        else:
            if not args.csv or not args.out:
                ap.error("--csv and --out are required without --all")
            fig = render(FigureSpec(input_csv=args.csv, group_by=args.group_by,
                                    output=args.out, title=args.title))
            plt.close(fig)
            print(f"wrote {args.out}")
    except (SchemaError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
