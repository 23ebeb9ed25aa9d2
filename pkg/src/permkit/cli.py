"""Command-line front end: ``permkit classify|check|sample|metric <file>``."""
import argparse
import os
import sys
import time
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from .classify import classify, independence_report
from .crosscheck import corroborate_not_kernel
from .divisibility import certify_all_beta, log_det_series, MAX_SERIES_DIM
from .errors import (BadBetaError, DimensionError, NegativePairProductError, NoConvergenceError,
                     NotClass1Error, ParseError, PermkitError)
from .kernelcheck import Kernel, check_necessary
from .matrixio import dump_report, read_matrix_file
from .sampleverify import (alpha_grid, empirical_laplace, half_integer_order, metric_table,
                           moment_report, sample_gaussian_squares, symmetrized_psd_check)
from .spectra import vere_jones_sweep

EXIT_OK, EXIT_USAGE, EXIT_NUMERIC = 0, 2, 3


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise _UsageError(message)


def thread_count() -> int:
    raw = os.environ.get("PERMKIT_THREADS", "")
    try:
        return max(1, int(raw)) if raw else min(4, os.cpu_count() or 1)
    except ValueError:
        return 1


# ---------------------------------------------------------------- per-matrix work


def _witness1(w):
    if w is None:
        return None
    return {"kind": w.kind, "scaling": w.scaling, "target": w.target}


def _witness2(w):
    if w is None:
        return None
    return {"signature": w.signature, "scaling": w.scaling, "mmatrix": w.mmatrix}


def classify_entry(m, args) -> dict:
    rep = classify(m)
    out = {
        "verdict": rep.verdict,
        "failure": rep.failure,
        "notes": list(rep.notes),
        "admissible_beta": rep.admissible_beta,
        "class1_witness": _witness1(rep.class1_witness),
        "class2_witness": _witness2(rep.class2_witness),
    }
    ind = independence_report(m)
    out["independence"] = {
        "pairwise_independent": ind.pairwise_independent,
        "product_form": ind.product_form,
        "c_coefficient": ind.c_coefficient,
        "fully_independent": ind.fully_independent,
    }
    return out


def check_entry(m, args) -> dict:
    k = Kernel(m)
    nec = check_necessary(k)
    failing = nec.failures()
    out = {"necessary": {"overall": nec.overall, "failures": failing}, "notes": []}
    sweep = vere_jones_sweep(k, r_max=args.sweep_rmax)
    out["sweep"] = {"verdict": sweep.verdict, "fail_r": sweep.fail_r,
                    "fail_subset": sweep.fail_subset,
                    "real_eigenvalues_positive": sweep.real_eigs_positive}
    if sweep.contradicts_kernel:
        failing = failing + [f"Resolvent{sweep.verdict}"]
    degree = args.series_degree
    if degree == 0:
        out["series"] = None
        out["notes"].append("series skipped (--series-degree 0)")
    elif k.n > MAX_SERIES_DIM:
        out["series"] = None
        out["notes"].append(f"series skipped (n > {MAX_SERIES_DIM})")
    else:
        s = log_det_series(k, degree)
        out["series"] = {"verdict": s.verdict, "max_degree": s.max_degree,
                         "min_coefficient": s.min_coefficient,
                         "negative_at": s.negative_at}
    try:
        cert = certify_all_beta(k, degree)
    except PermkitError as exc:
        cert = None
        out["notes"].append(f"certification: {type(exc).__name__}: {exc}")
    if cert is None:
        out["certification"] = None
    else:
        poisson = cert.poisson
        out["certification"] = {
            "verdict": cert.verdict,
            "reason": cert.reason,
            "poisson": None if poisson is None else {
                "verdict": poisson.verdict, "min_coefficient": poisson.min_coefficient,
                "t": poisson.t, "negative_at": poisson.negative_at,
                "near_zero": poisson.near_zero},
        }
        if cert.verdict == "CertifiedAllBeta":
            out["verdict"] = "CertifiedAllBeta"
    if "verdict" not in out:
        evidence = corroborate_not_kernel(k, first_only=False)
        out["evidence"] = [{"method": e.method, "detail": e.detail} for e in evidence]
        # the resolvent failure is already listed above
        failing = failing + [f"{e.method}Fails" for e in evidence if e.method != "VereJones"]
        out["verdict"] = "FailsNecessary" if failing else "NotCertified"
    out["failing_conditions"] = failing
    return out


def sample_entry(m, args) -> dict:
    k = Kernel(m)
    try:
        batch = sample_gaussian_squares(k, args.beta, int(args.n), args.seed, threads=1)
    except NotClass1Error as exc:
        return {"verdict": "NotClass1", "notes": [f"NotClass1: {exc}"]}
    out = {"verdict": "Sampled", "beta": batch.beta, "n": batch.count, "seed": batch.seed,
           "notes": []}
    rows = []
    for alpha in alpha_grid(k.n, args.alpha_grid):
        est, se, analytic = empirical_laplace(batch, alpha)
        z = (est - analytic) / se if se > 0 else (0.0 if est == analytic else float("inf"))
        rows.append({"alpha": alpha, "estimate": est, "std_error": se,
                     "analytic": analytic, "z": z})
    out["laplace"] = rows
    if batch.count >= 10_000:
        mr = moment_report(batch)
        out["moments"] = {"means": mr.means, "analytic_means": mr.analytic_means,
                          "mean_z": mr.mean_z, "cov": mr.cov, "analytic_cov": mr.analytic_cov,
                          "cov_z": mr.cov_z, "max_abs_z": mr.max_abs_z}
    else:
        out["moments"] = None
        out["notes"].append("moments need at least 1e4 draws")
    out["max_abs_laplace_z"] = max((abs(r["z"]) for r in rows), default=0.0)
    return out


def metric_entry(m, args) -> dict:
    k = Kernel(m)
    try:
        t = metric_table(k)
    except NegativePairProductError as exc:
        return {"verdict": "NegativePairProduct", "notes": [f"NegativePairProduct: {exc}"]}
    out = {"verdict": "Computed", "d": t.d, "worst_slack": t.worst_slack,
           "worst_triple": t.worst_triple, "necessary_ok": t.necessary_ok,
           "notes": list(t.notes)}
    out["symmetrized_psd"] = symmetrized_psd_check(k) if k.n == 3 else None
    return out


COMMANDS = {
    "classify": classify_entry,
    "check": check_entry,
    "sample": sample_entry,
    "metric": metric_entry,
}


def _run_one(fn, item, args):
    start = time.perf_counter()
    try:
        m = np.asarray(item.rows, dtype=float)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise DimensionError(f"matrix is not square: shape {m.shape}")
        entry = fn(m, args)
    except NoConvergenceError:
        raise
    except PermkitError as exc:
        name = type(exc).__name__
        entry = {"verdict": "Error", "notes": [f"{name}: {exc}"]}
    entry["label"] = item.label
    if args.timings:
        entry["seconds"] = time.perf_counter() - start
    return entry


def run(command: str, items, args) -> dict:
    fn = COMMANDS[command]
    threads = thread_count()
    if threads > 1 and len(items) > 1:
        with ThreadPoolExecutor(threads) as pool:
            entries = list(pool.map(lambda it: _run_one(fn, it, args), items))
    else:
        entries = [_run_one(fn, it, args) for it in items]
    counts = {}
    for e in entries:
        counts[e["verdict"]] = counts.get(e["verdict"], 0) + 1
    return {"command": command, "count": len(entries), "verdicts": counts, "results": entries}


# ---------------------------------------------------------------- text output


def _fmt(v) -> str:
    if isinstance(v, (float, np.floating)):
        return f"{float(v):.6g}"
    if isinstance(v, np.ndarray):
        return np.array2string(v, precision=6, suppress_small=True).replace("\n", "")
    return str(v)


def format_text(report: dict) -> str:
    lines = [f"{report['command']}: {report['count']} matrices"]
    for e in report["results"]:
        lines.append(f"[{e['label']}] {e['verdict']}")
        for key in ("failure", "admissible_beta", "worst_slack", "failing_conditions",
                    "max_abs_laplace_z"):
            if e.get(key) not in (None, "", []):
                lines.append(f"  {key}: {_fmt(e[key])}")
        if e.get("sweep"):
            lines.append(f"  sweep: {e['sweep']['verdict']}")
        if e.get("series"):
            lines.append(f"  series: {e['series']['verdict']} "
                         f"(min {_fmt(e['series']['min_coefficient'])})")
        if "d" in e:
            lines.append(f"  d: {_fmt(np.asarray(e['d']))}")
        for note in e.get("notes", []):
            lines.append(f"  note: {note}")
        if "seconds" in e:
            lines.append(f"  seconds: {e['seconds']:.3f}")
    summary = ", ".join(f"{k}={v}" for k, v in sorted(report["verdicts"].items()))
    lines.append(f"summary: {summary or 'empty'}")
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------- entry point


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="permkit", description="Screen matrices as permanental kernels.")
    p.add_argument("command", choices=sorted(COMMANDS))
    p.add_argument("file")
    p.add_argument("--format", choices=("json", "text"), default="text")
    p.add_argument("--sweep-rmax", type=float, default=1e3)
    p.add_argument("--series-degree", type=int, default=8)
    p.add_argument("--beta", type=float, default=0.5)
    p.add_argument("--n", type=float, default=1e6)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--alpha-grid", type=int, default=20)
    p.add_argument("--timings", action="store_true",
                   help="add per-matrix wall-clock seconds (output is then not reproducible)")
    return p


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
        if args.command == "sample":
            half_integer_order(args.beta)
            if args.n < 1 or args.alpha_grid < 1:
                raise _UsageError("--n and --alpha-grid must be positive")
        if args.sweep_rmax <= 0 or not 0 <= args.series_degree <= 12:
            raise _UsageError("--sweep-rmax must be > 0 and --series-degree in 0..12")
        items = read_matrix_file(args.file)
    except (_UsageError, ParseError, BadBetaError) as exc:
        print(f"permkit: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    try:
        report = run(args.command, items, args)
    except NoConvergenceError as exc:
        print(f"permkit: numeric failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    out = dump_report(report) if args.format == "json" else format_text(report)
    sys.stdout.write(out)
    return EXIT_OK


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
