"""Exact and sampled fidelities for the bundled 21 module pairs."""
import argparse

from tqme.chip import load_pair_table
from tqme.choi import fidelity_chain
from tqme.hom import hom_distribution
from tqme.linalg import TABLE_TOL, RandomStream
from tqme.sampling import estimate_fidelity, sample_from_distribution

ap = argparse.ArgumentParser()
ap.add_argument("--shots", type=int, default=7987)
ap.add_argument("--seed", type=int, default=0)
args = ap.parse_args()

root = RandomStream(args.seed)
print(f"{'pair':>4} {'F exact':>9} {'F hat':>9}  {'95% CI':>17}")
for rec in load_pair_table():
    exact = fidelity_chain(rec.w, rec.v, TABLE_TOL)
    tally = sample_from_distribution(hom_distribution(rec.w, rec.v, tol=TABLE_TOL), args.shots,
                                     root.child(f"pair-{rec.index}"))
    est = estimate_fidelity(tally, 2)
    flag = "" if est.ci_low <= exact.f_gate <= est.ci_high else "  *"
    print(f"{rec.index:>4} {exact.f_gate:9.5f} {est.f_gate_hat:9.5f}  [{est.ci_low:.4f}, {est.ci_high:.4f}]{flag}")
