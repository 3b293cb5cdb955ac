"""Command-line front end.

Exit codes: 0 success, 2 input validation, 3 dimension mismatch, 4 dataset
error, 5 resource guard, 6 I/O error.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import numpy as np

from . import __version__
from .chip import default_pair_table, standard_module, load_pair_table
from .choi import HADAMARD, fidelity_chain, phase_family_a, phase_family_column
from .errors import DimensionError, ResourceGuardError, TqmeError, ValidationError
from .hom import hom_distribution
from .linalg import GENERATED_TOL, TABLE_TOL, RandomStream, haar_random_unitary, load_unitary, save_unitary
from .qubit import (MAX_MODULE_QUBITS, ConfusionModel, exact_bunching, histogram_to_dict,
                    bunching_mask, sample_histogram, tqme_qubit_circuit, unfold_readout)
from .sampling import (estimate_fidelity, estimate_from_counts, required_samples_analytic,
                       required_samples_empirical, sample_from_distribution)

EXIT_IO = 6


def _command_line(argv) -> str:
    # worker count must not leak into outputs, which are compared byte for byte
    out, skip = [], False
    for a in argv:
        if skip:
            skip = False
            continue
        if a == "--workers":
            skip = True
            continue
        if a.startswith("--workers="):
            continue
        out.append(a)
    return " ".join(["tqme", *out])


def _provenance(args, shots=None) -> dict:
    return {
        "tool": "tqme",
        "version": __version__,
        "command_line": args.command_line,
        "seed": args.seed,
        "shots": shots,
    }


def _map(fn, items, workers):
    if workers > 1:
        with ThreadPoolExecutor(workers) as pool:
            return list(pool.map(fn, items))
    return [fn(x) for x in items]


def _emit(args, text: str):
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)


def _emit_json(args, report: dict):
    _emit(args, json.dumps(report, indent=2) + "\n")


def _emit_csv(args, header, rows, meta: dict):
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)
    _emit(args, buf.getvalue())
    if args.out:
        Path(str(args.out) + ".meta.json").write_text(json.dumps(meta, indent=2) + "\n")


def _load(path, args, tol=None):
    return load_unitary(path, tol=tol or args.unitary_tol, project=args.project_unitary)


def _tol(args):
    return GENERATED_TOL if args.project_unitary else args.unitary_tol


def _sampled_hom(w, v, shots, stream, confidence, tol, seed):
    dist = hom_distribution(w, v, tol=tol)
    tally = sample_from_distribution(dist, shots, stream)
    d = w.shape[0]
    return estimate_fidelity(tally, d, confidence, seed=seed)


def cmd_evaluate(args):
    w = _load(args.w, args)
    v = _load(args.v, args)
    if w.shape != v.shape:
        raise DimensionError(f"W is {w.shape[0]}-dimensional, V is {v.shape[0]}-dimensional")
    tol = _tol(args)
    exact = fidelity_chain(w, v, tol)
    report = _provenance(args, args.shots)
    report["mode"] = "sampled" if args.shots else "exact"
    report.update(exact.to_dict())
    if args.shots:
        stream = RandomStream(args.seed).child("evaluate")
        est = _sampled_hom(w, v, args.shots, stream, args.confidence, tol, args.seed)
        report["estimate"] = est.to_dict()
    _emit_json(args, report)


def cmd_sweep(args):
    if args.steps < 1:
        raise ValidationError("--steps must be >= 1")
    if args.family == "a":
        w = HADAMARD
        tol = GENERATED_TOL
        family = phase_family_a
    else:
        if args.w:
            w, tol = _load(args.w, args), _tol(args)
        else:
            # projected so that the theta = 0 point is exactly W against itself
            w, tol = standard_module(project=True), GENERATED_TOL
        family = lambda th: phase_family_column(w, th, args.column, tol)  # noqa: E731
    count = args.steps + 1 if args.endpoint else args.steps
    thetas = [k * 2 * np.pi / args.steps for k in range(count)]
    root = RandomStream(args.seed)

    def row(k):
        theta = thetas[k]
        rep = fidelity_chain(w, family(theta), tol)
        out = [theta, rep.p_bunch, rep.p_antibunch, rep.f_gate]
        if args.shots:
            est = _sampled_hom(w, family(theta), args.shots, root.child(f"sweep-{k}"),
                               args.confidence, tol, args.seed)
            out += [est.p_hat, est.f_gate_hat, est.ci_low, est.ci_high]
        return out

    header = ["theta", "p_exact", "p_antibunch_exact", "f_gate_exact"]
    if args.shots:
        header += ["p_hat", "f_gate_hat", "ci_low", "ci_high"]
    rows = _map(row, range(count), args.workers)
    meta = _provenance(args, args.shots)
    meta["family"] = args.family
    _emit_csv(args, header, rows, meta)


def cmd_table(args):
    records = load_pair_table(args.data, project=args.project_unitary)
    root = RandomStream(args.seed)

    def row(rec):
        rep = fidelity_chain(rec.w, rec.v, TABLE_TOL)
        out = {"index": rec.index, "f_gate_exact": rep.f_gate, "p_bunch_exact": rep.p_bunch,
               "f_choi_exact": rep.f_choi}
        if args.shots:
            est = _sampled_hom(rec.w, rec.v, args.shots, root.child(f"pair-{rec.index}"),
                               args.confidence, TABLE_TOL, args.seed)
            out.update(p_hat=est.p_hat, f_gate_hat=est.f_gate_hat, ci_low=est.ci_low, ci_high=est.ci_high)
        return out

    rows = _map(row, records, args.workers)
    f_gate = [r["f_gate_exact"] for r in rows]
    f_choi = [r["f_choi_exact"] for r in rows]
    summary = {"min_f_gate": min(f_gate), "max_f_gate": max(f_gate),
               "min_f_choi": min(f_choi), "max_f_choi": max(f_choi)}
    if args.format == "csv":
        header = list(rows[0])
        meta = _provenance(args, args.shots)
        meta["summary"] = summary
        _emit_csv(args, header, [[r[h] for h in header] for r in rows], meta)
    else:
        report = _provenance(args, args.shots)
        report["data"] = str(args.data or default_pair_table().name)
        report["pairs"] = rows
        report["summary"] = summary
        _emit_json(args, report)


def _floats(text):
    try:
        return [float(x) for x in text.split(",") if x.strip()]
    except ValueError as exc:
        raise ValidationError(f"bad number list {text!r}") from exc


def cmd_plan(args):
    if args.grid:
        ps = _floats(args.p_values)
        ds = [int(x) for x in _floats(args.d_values)]
        rows = []
        for d in ds:
            for p in ps:
                if args.empirical:
                    plan = required_samples_empirical(p, d, args.eps, args.conf, args.trials,
                                                      RandomStream(args.seed).child(f"plan-{p}-{d}"),
                                                      args.workers)
                else:
                    plan = required_samples_analytic(p, d, args.eps, args.conf)
                rows.append([p, d, plan.n_required, plan.method])
        meta = _provenance(args)
        meta.update(epsilon=args.eps, confidence=args.conf)
        _emit_csv(args, ["P", "d", "n_required", "method"], rows, meta)
        return
    if args.p is None or args.d is None:
        raise ValidationError("--p and --d are required unless --grid is given")
    if args.empirical:
        plan = required_samples_empirical(args.p, args.d, args.eps, args.conf, args.trials,
                                          RandomStream(args.seed).child("plan"), args.workers)
    else:
        plan = required_samples_analytic(args.p, args.d, args.eps, args.conf)
    report = _provenance(args)
    report.update(plan.to_dict())
    if args.empirical:
        report["trials"] = args.trials
    _emit_json(args, report)


def _readout(text, n_qubits):
    vals = _floats(text)
    if len(vals) != 2:
        raise ValidationError("--readout expects p01,p10")
    return ConfusionModel.uniform(n_qubits, vals[0], vals[1])


def cmd_qubit(args):
    if args.n is not None and args.n > MAX_MODULE_QUBITS:
        raise ResourceGuardError(f"n = {args.n} exceeds the limit n <= {MAX_MODULE_QUBITS}")
    w = _load(args.w, args)
    v = _load(args.v, args)
    if w.shape != v.shape:
        raise DimensionError(f"W is {w.shape[0]}-dimensional, V is {v.shape[0]}-dimensional")
    n = int(np.log2(w.shape[0]))
    if 2**n != w.shape[0]:
        raise DimensionError(f"module dimension {w.shape[0]} is not a power of two")
    if args.n is not None and args.n != n:
        raise DimensionError(f"--n {args.n} but modules act on {n} qubits")
    if n > MAX_MODULE_QUBITS:
        raise ResourceGuardError(f"n = {n} exceeds the limit n <= {MAX_MODULE_QUBITS}")
    if args.mitigate and not args.readout:
        raise ValidationError("--mitigate needs --readout")
    tol = _tol(args)
    d = 2**n
    report = _provenance(args, args.shots)
    report.update(n=n, d=d, mode="sampled" if args.shots else "exact")
    if args.circuit_out:
        Path(args.circuit_out).write_text(tqme_qubit_circuit(n, w, v, tol=tol).dumps() + "\n")
    if not args.shots:
        p = exact_bunching(n, w, v, tol=tol)
        f = 2 * p - 1
        report.update(P=p, f_choi=f, F=(d * f + 1) / (d + 1))
    else:
        noise = _readout(args.readout, 4 * n) if args.readout else None
        stream = RandomStream(args.seed).child("qubit")
        counts = sample_histogram(n, w, v, args.shots, stream, noise, tol)
        if args.mitigate:
            counts = unfold_readout(counts, noise)
        n_bunch = float(counts[bunching_mask(n)].sum())
        est = estimate_from_counts(n_bunch, float(counts.sum()), d, args.confidence, args.seed)
        report.update(P=est.p_hat, f_choi=2 * est.p_hat - 1, F=est.f_gate_hat,
                      ci_low=est.ci_low, ci_high=est.ci_high, mitigated=bool(args.mitigate))
        if args.readout:
            report["readout"] = {"p01": noise.p01[0], "p10": noise.p10[0]}
        if args.histogram:
            report["histogram"] = histogram_to_dict(counts, 4 * n)
    report["F_trace"] = fidelity_chain(w, v, tol).f_gate
    _emit_json(args, report)


def cmd_gen(args):
    if args.d < 1:
        raise ValidationError("--d must be >= 1")
    root = RandomStream(args.seed)
    out = Path(args.out)
    if args.pair:
        stem = out.with_suffix("")
        save_unitary(f"{stem}_w.json", haar_random_unitary(args.d, root.child("gen-w")))
        save_unitary(f"{stem}_v.json", haar_random_unitary(args.d, root.child("gen-v")))
    else:
        save_unitary(out, haar_random_unitary(args.d, root.child("gen")))


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--out", help="output file (default: stdout)")
    common.add_argument("--workers", type=int, default=1)
    common.add_argument("--project-unitary", action="store_true",
                        help="replace loaded matrices by their nearest unitary")
    common.add_argument("--unitary-tol", type=float, default=GENERATED_TOL)
    common.add_argument("--confidence", type=float, default=0.95)

    parser = argparse.ArgumentParser(prog="tqme", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"tqme {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("evaluate", parents=[common], help="fidelity of V relative to W")
    p.add_argument("--w", required=True)
    p.add_argument("--v", required=True)
    mode = p.add_mutually_exclusive_group()
    mode.add_argument("--exact", action="store_true")
    mode.add_argument("--shots", type=int)
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("sweep", parents=[common], help="theta sweeps of the phase families")
    p.add_argument("--family", choices=["a", "column"], required=True)
    p.add_argument("--w", help="standard module for the column family (default: bundled)")
    p.add_argument("--column", type=int, default=1)
    p.add_argument("--steps", type=int, default=8)
    p.add_argument("--endpoint", action="store_true", help="include theta = 2 pi")
    p.add_argument("--shots", type=int)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("table", parents=[common], help="evaluate the 21 bundled module pairs")
    p.add_argument("--data", help="pair table (default: bundled, or $TQME_DATA_DIR/pairs21.json)")
    p.add_argument("--shots", type=int)
    p.add_argument("--format", choices=["json", "csv"], default="json")
    p.set_defaults(func=cmd_table)

    p = sub.add_parser("plan", parents=[common], help="required event counts")
    p.add_argument("--p", type=float)
    p.add_argument("--d", type=int, help="module dimension; 0 means d -> infinity")
    p.add_argument("--eps", type=float, default=0.01)
    p.add_argument("--conf", type=float, default=0.95)
    p.add_argument("--empirical", action="store_true")
    p.add_argument("--trials", type=int, default=10_000)
    p.add_argument("--grid", action="store_true", help="CSV over --p-values x --d-values")
    p.add_argument("--p-values", default="0.55,0.6,0.65,0.7,0.75,0.8,0.85,0.9,0.95,0.99")
    p.add_argument("--d-values", default="2,4,8,16,32,64,128,256,512,1024,0")
    p.set_defaults(func=cmd_plan)

    p = sub.add_parser("qubit", parents=[common], help="generalized protocol on qubits")
    p.add_argument("--n", type=int)
    p.add_argument("--w", required=True)
    p.add_argument("--v", required=True)
    mode = p.add_mutually_exclusive_group()
    mode.add_argument("--exact", action="store_true")
    mode.add_argument("--shots", type=int)
    p.add_argument("--readout", help="uniform readout error p01,p10")
    p.add_argument("--mitigate", action="store_true")
    p.add_argument("--histogram", action="store_true", help="include the measured histogram")
    p.add_argument("--circuit-out", help="write the circuit as a JSON gate list")
    p.set_defaults(func=cmd_qubit)

    p = sub.add_parser("gen", parents=[common], help="write Haar-random unitaries")
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--pair", action="store_true", help="write <out>_w.json and <out>_v.json")
    p.set_defaults(func=cmd_gen)
    return parser


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    args = parser.parse_args(argv)
    args.command_line = _command_line(argv)
    if getattr(args, "shots", None) is not None and args.shots < 1:
        parser.error("--shots must be >= 1")
    if args.command == "gen" and not args.out:
        parser.error("gen needs --out")
    try:
        args.func(args)
    except TqmeError as exc:
        print(f"tqme: error: {exc}", file=sys.stderr)
        return exc.exit_code
    except OSError as exc:
        print(f"tqme: I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    return 0


if __name__ == "__main__":
    sys.exit(main())
