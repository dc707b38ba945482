#!/usr/bin/env python3
"""Cumulative curves for one grid cell written by `ewsim simulate`."""

import argparse
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import pandas as pd


def load(cell: Path) -> pd.DataFrame:
    rel = pd.read_csv(cell / "relative.csv", parse_dates=["date"])
    profit = pd.read_csv(cell / "profit.csv", parse_dates=["date"])
    dec = pd.read_csv(cell / "decomposition.csv", parse_dates=["date"])
    df = rel.merge(profit, on="date").merge(dec, on="date")
    return df.set_index("date")


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("cell", type=Path, help="cell directory, e.g. out/demo/lrg_tc0_monthly")
    ap.add_argument("--out", type=Path, help="image path (default: <cell>/curves.png)")
    ap.add_argument("--from", dest="start", help="rebase the curves at this date (YYYY-MM-DD)")
    args = ap.parse_args()

    df = load(args.cell)
    if args.start:
        df = df.loc[args.start:]
    cum = df[["ew_rel_logret", "trading_profit", "size_exposure", "premium_estimate", "leakage"]].cumsum()

    fig, ax = plt.subplots(figsize=(10, 5))
    ax.plot(cum.index, cum["ew_rel_logret"], color="tab:red", label="relative to full market")
    ax.plot(cum.index, cum["trading_profit"], color="tab:blue", label="trading profit")
    ax.plot(cum.index, cum["size_exposure"], color="tab:pink", label="size exposure")
    ax.plot(cum.index, cum["premium_estimate"], color="tab:green", label="premium estimate")
    ax.plot(cum.index, cum["leakage"], color="tab:gray", linestyle="--", label="leakage")
    ax.axhline(0.0, color="black", linewidth=0.5)
    ax.set_ylabel("cumulative log return")
    ax.set_title(args.cell.name)
    ax.legend(loc="best")
    fig.tight_layout()
    out = args.out or args.cell / "curves.png"
    fig.savefig(out, dpi=120)
    print(out)


if __name__ == "__main__":
    main()
