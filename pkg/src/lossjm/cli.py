"""Command-line interface.

Commands construct measurement families, decide joint measurability,
reproduce the benchmark verdict table, verify parent-measurement marginals,
evaluate the qubit pair criterion, and report discrimination probabilities.

Every run emits a manifest echoing the resolved parameters and version
stamps.  JSON is the canonical format; the table command also writes CSV.
Exit codes: 0 success, 1 error, 2 when the decided verdict is INCOMPATIBLE
(for scripting pipelines).
"""

from __future__ import annotations

import argparse
import concurrent.futures
import csv
import io
import json
import os
import platform
import sys
import time

import numpy as np

from . import __version__, compat, parent, qubit, serialize, usd
from .measurements import FamilyParams, random_measurement_set, symmetric_family

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_INCOMPATIBLE = 2

JOBS_ENV = "LOSSJM_JOBS"

# Benchmark operating points of the symmetric family: for a label n the
# family has n+1 measurements at tau = 1/n + eps and stays incompatible.
TABLE_POINTS = {
    2: (0.005, 0.00005),
    3: (0.010, 0.00018),
    4: (0.065, 0.00118),
    5: (0.045, 0.00135),
    6: (0.035, 0.00100),
    7: (0.025, 0.00055),
    8: (0.015, 0.00015),
    9: (0.010, 0.00010),
    10: (0.005, 0.00005),
}


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # argparse would exit(2); keep 2 for verdicts
        self.print_usage(sys.stderr)
        self.exit(EXIT_ERROR, f"{self.prog}: error: {message}\n")


def _params(args) -> dict:
    return {k: v for k, v in vars(args).items() if k not in ("func", "command")}


def _manifest(command: str, params: dict) -> dict:
    return {
        "command": command,
        "params": params,
        "versions": {
            "lossjm": __version__,
            "numpy": np.__version__,
            "python": platform.python_version(),
        },
    }


def _emit_json(payload: dict, out: str | None) -> None:
    text = json.dumps(payload, indent=2, sort_keys=True) + "\n"
    if out is None or out == "-":
        sys.stdout.write(text)
    else:
        with open(out, "w") as fh:
            fh.write(text)


def _default_jobs() -> int:
    try:
        return max(1, int(os.environ.get(JOBS_ENV, "1")))
    except ValueError:
        return 1


def cmd_family(args) -> int:
    params = FamilyParams(args.count, args.r, args.tau, args.d)
    t0 = time.perf_counter()
    mset = symmetric_family(params)
    payload = serialize.measurement_set_to_json(mset)
    payload["manifest"] = _manifest("family", _params(args))
    payload["manifest"]["wall_time_s"] = time.perf_counter() - t0
    _emit_json(payload, args.out)
    return EXIT_OK


def cmd_compat(args) -> int:
    params = FamilyParams(args.count, args.r, args.tau, args.d)
    d_sub = args.d_sub or args.d
    t0 = time.perf_counter()
    row = compat.decide_table_row(
        params, d_sub=d_sub, tol=args.tol, max_iter=args.max_iter
    )
    payload = row.as_dict()
    payload["manifest"] = _manifest("compat", _params(args))
    payload["manifest"]["wall_time_s"] = time.perf_counter() - t0
    _emit_json(payload, args.out)
    return EXIT_INCOMPATIBLE if row.verdict == "INCOMPATIBLE" else EXIT_OK


def _run_row(n: int, d: int, d_sub: int, tol: float, max_iter: int):
    r, eps = TABLE_POINTS[n]
    count = n + 1
    at_tau_min = compat.decide_table_row(
        FamilyParams(count, r, 1.0 / n + eps, d), d_sub=d_sub, tol=tol, max_iter=max_iter
    )
    # Result-2 side: the same family is compatible by construction at the
    # breaking point 1/count of a count-measurement set.
    at_break = compat.decide_table_row(
        FamilyParams(count, r, 1.0 / count, d), d_sub=d_sub, tol=tol, max_iter=max_iter
    )
    return n, [at_tau_min, at_break]


def cmd_table1(args) -> int:
    rows = list(range(args.row_min, args.row_max + 1))
    unknown = [n for n in rows if n not in TABLE_POINTS]
    if unknown:
        raise ValueError(f"no bundled operating point for rows {unknown}")
    d_sub = args.d_sub or args.d
    t0 = time.perf_counter()
    jobs = args.jobs or _default_jobs()
    results = {}
    if jobs > 1:
        with concurrent.futures.ThreadPoolExecutor(max_workers=jobs) as pool:
            futs = [
                pool.submit(_run_row, n, args.d, d_sub, args.tol, args.max_iter)
                for n in rows
            ]
            for fut in concurrent.futures.as_completed(futs):
                n, recs = fut.result()
                results[n] = recs
    else:
        for n in rows:
            _, recs = _run_row(n, args.d, d_sub, args.tol, args.max_iter)
            results[n] = recs

    buf = io.StringIO()
    writer = csv.writer(buf)
    writer.writerow(["n", "r", "tau", "d", "eta_star", "verdict", "seconds"])
    any_incompatible = False
    for n in rows:  # deterministic ordering regardless of scheduling
        for rec in results[n]:
            any_incompatible |= rec.verdict == "INCOMPATIBLE"
            writer.writerow(
                [n, rec.r, rec.tau, rec.d_sub, rec.eta_star, rec.verdict, f"{rec.seconds:.3f}"]
            )
    text = buf.getvalue()
    if args.out is None or args.out == "-":
        sys.stdout.write(text)
    else:
        with open(args.out, "w") as fh:
            fh.write(text)
        manifest = _manifest("table1", _params(args))
        manifest["wall_time_s"] = time.perf_counter() - t0
        with open(args.out + ".manifest.json", "w") as fh:
            json.dump(manifest, fh, indent=2, sort_keys=True)
            fh.write("\n")
    return EXIT_INCOMPATIBLE if any_incompatible else EXIT_OK


def cmd_parent_verify(args) -> int:
    rng = np.random.default_rng(args.random_seed)
    mset = random_measurement_set(args.d, args.n, rng)
    taus = [args.tau if args.tau is not None else 1.0 / args.n] * args.n
    t0 = time.perf_counter()
    residual = parent.verify_marginal_identity(mset, taus, eta=args.eta)
    payload = {
        "n": args.n,
        "d": args.d,
        "taus": taus,
        "eta": args.eta,
        "random_seed": args.random_seed,
        "marginal_identity_residual": residual,
        "manifest": _manifest("parent-verify", _params(args)),
    }
    payload["manifest"]["wall_time_s"] = time.perf_counter() - t0
    _emit_json(payload, args.out)
    return EXIT_OK


def cmd_qubit_pair(args) -> int:
    t0 = time.perf_counter()
    a, b = qubit.lossy_displaced_pair(args.r, args.tau)
    report = qubit.pair_test(a, b)
    test_value, predicted = qubit.leading_order_check(args.r, args.tau)
    payload = report.as_dict()
    payload["r"] = args.r
    payload["tau"] = args.tau
    payload["leading_order_prediction"] = predicted
    payload["manifest"] = _manifest("qubit-pair", _params(args))
    payload["manifest"]["wall_time_s"] = time.perf_counter() - t0
    _emit_json(payload, args.out)
    return EXIT_INCOMPATIBLE if report.incompatible else EXIT_OK


def cmd_usd(args) -> int:
    t0 = time.perf_counter()
    report = usd.usd_report(args.n, args.r, args.tau)
    payload = report.as_dict()
    payload["manifest"] = _manifest("usd", _params(args))
    if args.sweep:
        rows = ["r,p_d,p_lon,lossy_success"]
        for r in np.linspace(args.sweep_min, args.sweep_max, args.sweep_steps):
            rows.append(
                f"{r},{usd.p_d(args.n, r)},{usd.p_lon(args.n, r)},"
                f"{usd.lossy_usd_success(args.n, r, args.tau)}"
            )
        with open(args.sweep, "w") as fh:
            fh.write("\n".join(rows) + "\n")
        payload["sweep_file"] = args.sweep
    payload["manifest"]["wall_time_s"] = time.perf_counter() - t0
    _emit_json(payload, args.out)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="lossjm", description=__doc__)
    sub = p.add_subparsers(dest="command", required=True)

    fam = sub.add_parser("family", help="construct a displaced on-off family")
    fam.add_argument("--count", type=int, required=True)
    fam.add_argument("--r", type=float, required=True)
    fam.add_argument("--tau", type=float, required=True)
    fam.add_argument("--d", type=int, required=True)
    fam.add_argument("--out", default=None)
    fam.set_defaults(func=cmd_family)

    cmp_ = sub.add_parser("compat", help="decide joint measurability of a family")
    cmp_.add_argument("--count", type=int, required=True)
    cmp_.add_argument("--r", type=float, required=True)
    cmp_.add_argument("--tau", type=float, required=True)
    cmp_.add_argument("--d", type=int, required=True)
    cmp_.add_argument("--d-sub", type=int, default=None)
    cmp_.add_argument("--tol", type=float, default=compat.DEFAULT_TOL)
    cmp_.add_argument("--max-iter", type=int, default=compat.DEFAULT_MAX_ITER)
    cmp_.add_argument("--out", default=None)
    cmp_.set_defaults(func=cmd_compat)

    tab = sub.add_parser("table1", help="verdicts over the bundled operating points")
    tab.add_argument("--row-min", type=int, default=2)
    tab.add_argument("--row-max", type=int, default=5)
    tab.add_argument("--d", type=int, default=3)
    tab.add_argument("--d-sub", type=int, default=None)
    tab.add_argument("--tol", type=float, default=compat.DEFAULT_TOL)
    tab.add_argument("--max-iter", type=int, default=compat.DEFAULT_MAX_ITER)
    tab.add_argument("--jobs", type=int, default=None)
    tab.add_argument("--out", default=None)
    tab.set_defaults(func=cmd_table1)

    pv = sub.add_parser("parent-verify", help="check the network-parent marginals")
    pv.add_argument("--n", type=int, required=True)
    pv.add_argument("--d", type=int, required=True)
    pv.add_argument("--tau", type=float, default=None, help="per-arm transmissivity (default 1/n)")
    pv.add_argument("--eta", type=float, default=1.0)
    pv.add_argument("--random-seed", type=int, default=0)
    pv.add_argument("--out", default=None)
    pv.set_defaults(func=cmd_parent_verify)

    qp = sub.add_parser("qubit-pair", help="closed-form pair criterion after loss")
    qp.add_argument("--r", type=float, required=True)
    qp.add_argument("--tau", type=float, required=True)
    qp.add_argument("--out", default=None)
    qp.set_defaults(func=cmd_qubit_pair)

    us = sub.add_parser("usd", help="unambiguous-discrimination report")
    us.add_argument("--n", type=int, required=True)
    us.add_argument("--r", type=float, required=True)
    us.add_argument("--tau", type=float, required=True)
    us.add_argument("--sweep", default=None, help="write a CSV sweep over r to this path")
    us.add_argument("--sweep-min", type=float, default=0.001)
    us.add_argument("--sweep-max", type=float, default=0.5)
    us.add_argument("--sweep-steps", type=int, default=50)
    us.add_argument("--out", default=None)
    us.set_defaults(func=cmd_usd)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, OSError, RuntimeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
