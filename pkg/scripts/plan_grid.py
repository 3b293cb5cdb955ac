"""Required event counts over (P, d): analytic grid, plus empirical checks at a few points."""
import argparse
import csv
import sys

from tqme.linalg import RandomStream
from tqme.sampling import coverage_check, required_samples_analytic, required_samples_empirical

ap = argparse.ArgumentParser()
ap.add_argument("--eps", type=float, default=0.01)
ap.add_argument("--trials", type=int, default=10_000)
ap.add_argument("--seed", type=int, default=0)
ap.add_argument("--workers", type=int, default=4)
args = ap.parse_args()

ps = [0.55, 0.6, 0.65, 0.7, 0.75, 0.8, 0.85, 0.9, 0.925, 0.95, 0.99]
ds = [2, 4, 8, 16, 32, 64, 128, 256, 512, 1024, 0]
root = RandomStream(args.seed)

w = csv.writer(sys.stdout, lineterminator="\n")
w.writerow(["P", "d", "n_analytic", "coverage_at_analytic", "n_empirical"])
for d in ds:
    for p in ps:
        n = required_samples_analytic(p, d, args.eps).n_required
        stream = root.child(f"{p}-{d}")
        cov = coverage_check(n, p, d, args.eps, args.trials, stream, args.workers)
        emp = ""
        if p in (0.925, 0.95) and d in (2, 1024, 0):
            emp = required_samples_empirical(p, d, args.eps, 0.95, args.trials, stream, args.workers).n_required
        w.writerow([p, d if d else "inf", n, f"{cov:.4f}", emp])
