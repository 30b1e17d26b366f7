#!/usr/bin/env python3
"""Plot sweep CSVs produced by `halfline simulate --out` or `halfline figure`.

Each CSV holds `# key=value` provenance comments and rows of
axis_value,policy,mean_distance,stderr,variance,matched_fraction,analytic_value,ratio

Files sharing a prefix before the last underscore (fig5_exp, fig5_det, ...)
are drawn on a single axes set; simulated means get error bars, closed-form
values a dashed line.
"""

import argparse
import csv
import sys
from collections import defaultdict
from pathlib import Path


def read_sweep(path):
    meta, rows = {}, []
    with open(path, newline="") as fh:
        for line in fh:
            line = line.strip()
            if not line:
                continue
            if line.startswith("#"):
                body = line.lstrip("# ")
                if "=" in body:
                    key, _, value = body.partition("=")
                    meta.setdefault(key.strip(), value.strip())
                continue
            rows.append(line)
    parsed = []
    reader = csv.DictReader(rows)
    for row in reader:
        try:
            parsed.append(
                {
                    "axis": float(row["axis_value"]),
                    "policy": row["policy"],
                    "mean": float(row["mean_distance"]),
                    "stderr": float(row["stderr"]),
                    "analytic": float(row["analytic_value"])
                    if row["analytic_value"]
                    else None,
                }
            )
        except (KeyError, TypeError, ValueError):
            continue
    return meta, parsed


def group_key(path):
    stem = path.stem
    return stem.rsplit("_", 1)[0] if "_" in stem else stem


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("csv_dir", type=Path, help="directory of sweep CSVs")
    ap.add_argument("--save", type=Path, default=None,
                    help="write PNGs here instead of showing windows")
    ap.add_argument("--logy", action="store_true", help="log-scale the y axis")
    args = ap.parse_args()

    try:
        import matplotlib
        if args.save:
            matplotlib.use("Agg")
        import matplotlib.pyplot as plt
    except ImportError:
        sys.exit("matplotlib is required: pip install matplotlib")

    files = sorted(args.csv_dir.glob("*.csv"))
    if not files:
        sys.exit(f"no CSV files in {args.csv_dir}")

    groups = defaultdict(list)
    for path in files:
        groups[group_key(path)].append(path)

    if args.save:
        args.save.mkdir(parents=True, exist_ok=True)

    for name, paths in sorted(groups.items()):
        fig, ax = plt.subplots(figsize=(7, 5))
        axis_label = "axis value"
        for path in paths:
            meta, rows = read_sweep(path)
            axis_label = meta.get("axis", axis_label)
            curve = path.stem[len(name):].lstrip("_") or path.stem
            by_policy = defaultdict(list)
            for r in rows:
                by_policy[r["policy"]].append(r)
            for policy, pts in sorted(by_policy.items()):
                pts.sort(key=lambda r: r["axis"])
                xs = [r["axis"] for r in pts]
                label = f"{curve} {policy}".strip()
                ax.errorbar(xs, [r["mean"] for r in pts],
                            yerr=[r["stderr"] for r in pts],
                            marker="o", markersize=3, capsize=2, label=label)
                analytic = [(r["axis"], r["analytic"]) for r in pts
                            if r["analytic"] is not None]
                if analytic:
                    ax.plot([a for a, _ in analytic], [v for _, v in analytic],
                            "--", alpha=0.7, label=f"{label} (closed form)")
        ax.set_xlabel(axis_label)
        ax.set_ylabel("mean distance")
        ax.set_title(name)
        if args.logy:
            ax.set_yscale("log")
        ax.grid(True, alpha=0.3)
        ax.legend(fontsize=8)
        fig.tight_layout()
        if args.save:
            out = args.save / f"{name}.png"
            fig.savefig(out, dpi=150)
            print(f"wrote {out}")
            plt.close(fig)
    if not args.save:
        plt.show()


if __name__ == "__main__":
    main()
