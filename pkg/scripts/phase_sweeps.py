"""Theta sweeps of both phase families, exact curves plus sampled points.

Writes results/family_a.csv and results/column_family.csv (with .meta.json sidecars).
"""
import argparse
from pathlib import Path

from tqme.cli import main

ap = argparse.ArgumentParser()
ap.add_argument("--shots", type=int, default=20_000)
ap.add_argument("--steps", type=int, default=16)
ap.add_argument("--seed", type=int, default=0)
ap.add_argument("--outdir", default="results")
args = ap.parse_args()

out = Path(args.outdir)
out.mkdir(exist_ok=True)
for family, name in (("a", "family_a"), ("column", "column_family")):
    main(["sweep", "--family", family, "--steps", str(args.steps), "--endpoint", "--shots", str(args.shots),
          "--seed", str(args.seed), "--out", str(out / f"{name}.csv")])
    print(f"wrote {out / name}.csv")
