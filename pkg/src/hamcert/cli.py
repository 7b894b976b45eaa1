"""Command line front end.

Exit codes: 0 = Accept (or success), 1 = Reject, 2 = usage or input error.
"""
from __future__ import annotations

import argparse
import csv
import datetime as _dt
import hashlib
import io
import json
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

import numpy as np

from . import certify
from .coefficients import l2_lower_bound, l2_upper_bound, non_identity_set
from .errors import HamcertError
from .evolution import EvolutionOracle, trotter_u2
from .hamiltonians import load_hamiltonian, plant_residual, random_hamiltonian, save_hamiltonian
from .lowerbound import (experiment_distribution, hypothesis_instances, minimax_success,
                         random_experiment, scaling_experiment, tv_bound_check)
from .sampling import SbsTable
from .stabilizer import MaximalStabilizerGroup

SCHEMA_VERSION = "v1"


class UsageError(Exception):
    pass


def _write_text(path, text: str):
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        Path(path).write_text(text)


def _csv_text(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


def report_digest(records) -> str:
    blob = json.dumps(records, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(blob.encode()).hexdigest()


def report_document(records) -> str:
    doc = {
        "schema_version": SCHEMA_VERSION,
        "digest": report_digest(records),
        "records": records,
        "created_utc": _dt.datetime.now(_dt.timezone.utc).isoformat(timespec="seconds"),
    }
    return json.dumps(doc, sort_keys=True, indent=2) + "\n"


# certify

def _validate_certify(a):
    if a.m is None or a.m < 1:
        raise UsageError("--m must be a positive integer")
    if a.bound is None or not a.bound > 0:
        raise UsageError("--bound must be positive")
    if not 0 < a.delta <= 1 / 3:
        raise UsageError("--delta must lie in (0, 1/3]")
    if a.trials < 1:
        raise UsageError("--trials must be at least 1")
    if a.method == "rchc":
        if a.norm != "frobenius":
            raise UsageError("rchc certifies the Frobenius norm only")
        if a.eps1 is None or a.eps2 is None or not 0 < a.eps1 < a.eps2 < 1:
            raise UsageError("rchc needs 0 < --eps1 < --eps2 < 1")
    else:
        if a.eps is None:
            raise UsageError(f"{a.method} needs --eps")
        if a.method == "shc":
            if a.norm != "frobenius":
                raise UsageError("shc certifies the Frobenius norm only")
            if not 0 < a.eps < 0.25:
                raise UsageError("shc needs 0 < --eps < 1/4")
        elif not 0 < a.eps < 1:
            raise UsageError("chc needs 0 < --eps < 1")
        if a.norm == "pauli" and a.p < 1:
            raise UsageError("Pauli norms need --p >= 1")
        if a.norm == "schatten" and not 1 <= a.p <= 2:
            raise UsageError("Schatten certification supports --p in [1, 2] only")


def _run_trial(job):
    a, H_json, H0_json, seed = job
    from .hamiltonians import PauliHamiltonian

    H = PauliHamiltonian.from_json_dict(H_json)
    H0 = PauliHamiltonian.from_json_dict(H0_json)
    rng = np.random.default_rng(seed)
    oracle = EvolutionOracle(H, forward_only=(a["method"] == "shc"))
    if a["method"] == "rchc":
        rep = certify.rchc(H0, oracle, a["m"], a["bound"], a["eps1"], a["eps2"], a["delta"], rng)
    elif a["method"] == "shc":
        rep = certify.shc(H0, oracle, a["m"], a["bound"], a["eps"], a["delta"], rng)
    elif a["norm"] == "pauli":
        rep = certify.certify_pauli_norm(a["p"], H0, oracle, a["m"], a["bound"], a["eps"], a["delta"], rng)
    elif a["norm"] == "schatten":
        rep = certify.certify_schatten_norm(a["p"], H0, oracle, a["m"], a["bound"], a["eps"], a["delta"], rng)
    else:
        rep = certify.chc(H0, oracle, a["m"], a["bound"], a["eps"], a["delta"], rng)
    rec = rep.to_record()
    rec["seed"] = seed
    return rec


def cmd_certify(a) -> int:
    _validate_certify(a)
    H0 = load_hamiltonian(a.h0)
    H_json = json.loads(Path(a.h).read_text())
    H = load_hamiltonian(a.h)  # validates before any oracle exists
    if H.n != H0.n:
        raise UsageError("H and H0 act on different qubit counts")
    if H0.m > a.m or H0.S > a.bound:
        raise UsageError("H0 violates the declared --m/--bound")
    seeds = [int(s.generate_state(1, dtype=np.uint64)[0]) for s in np.random.SeedSequence(a.seed).spawn(a.trials)]
    if a.trials == 1:
        seeds = [a.seed]
    opts = {k: getattr(a, k) for k in ("method", "norm", "p", "m", "bound", "eps", "eps1", "eps2", "delta")}
    jobs = [(opts, H_json, H0.to_json_dict(), s) for s in seeds]
    if a.workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=a.workers) as pool:
            records = list(pool.map(_run_trial, jobs))
    else:
        records = [_run_trial(j) for j in jobs]
    _write_text(a.out, report_document(records))
    accepted = sum(r["verdict"] == certify.ACCEPT for r in records)
    print(f"{accepted}/{len(records)} Accept", file=sys.stderr)
    return 0 if accepted == len(records) else 1


# gen

def cmd_gen(a) -> int:
    if a.h0:
        base = load_hamiltonian(a.h0)
        if a.residual is None:
            raise UsageError("--residual is required with --h0")
        H = plant_residual(base, a.residual, a.seed, extra_terms=a.extra_terms, bound=a.bound)
    else:
        if a.n is None or a.m is None or a.bound is None:
            raise UsageError("gen needs --n, --m and --bound")
        H = random_hamiltonian(a.n, a.m, a.bound, a.seed)
    if a.out in (None, "-"):
        sys.stdout.write(json.dumps(H.to_json_dict(), indent=2) + "\n")
    else:
        save_hamiltonian(H, a.out)
    return 0


# analyze-bounds

def cmd_analyze_bounds(a) -> int:
    check = l2_lower_bound if a.kind == "lower" else l2_upper_bound
    rows = []
    for i in range(a.trials):
        seed = a.seed + i
        rng = np.random.default_rng(seed)
        H = random_hamiltonian(a.n, a.m, a.bound, rng)
        t = rng.uniform(0, 1 / (H.m * H.S))
        res = check(H, t, non_identity_set(a.n))
        rows.append([seed, a.n, H.m, repr(H.S), repr(t), repr(res.lhs), repr(res.rhs), int(res.holds)])
    _write_text(a.out, _csv_text(["seed", "n", "m", "S", "t", "lhs", "rhs", "holds"], rows))
    return 0 if all(r[-1] for r in rows) else 1


# sample

def cmd_sample(a) -> int:
    H = load_hamiltonian(a.h)
    H0 = load_hamiltonian(a.h0)
    G = MaximalStabilizerGroup.from_descriptor({"kind": a.group}, H0.n)
    oracle = EvolutionOracle(H)
    with oracle.deferred_charges():
        U = trotter_u2(H0, oracle, a.t, a.r)
    table = SbsTable(U, G)
    thetas, observed = table.sample(np.random.default_rng(a.seed), a.trials)
    rows = []
    for i, (th, ob) in enumerate(zip(thetas, observed)):
        out = table.outcome(int(th), int(ob))
        rows.append([i, out.theta.label, str(out.syndrome), out.z])
    _write_text(a.out, _csv_text(["trial", "theta", "syndrome", "Z"], rows))
    return 0


# scaling

def _grid(text: str) -> list[float]:
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError as exc:
        raise UsageError(f"bad grid {text!r}") from exc


def cmd_scaling(a) -> int:
    grid = _grid(a.grid)
    res = scaling_experiment(a.certifier, grid, a.trials, a.seed, n=a.n, m=a.m or 2,
                             B=a.bound or 1.0, eps=a.eps or 0.05, delta=a.delta)
    _write_text(a.out, res.to_csv())
    print(f"slope {res.slope:.4f}", file=sys.stderr)
    return 0


# lowerbound

def cmd_lowerbound(a) -> int:
    grid = _grid(a.grid)
    H1, H2 = hypothesis_instances(a.p, a.m, a.eps1, a.eps2, a.n)
    rng = np.random.default_rng(a.seed)
    rows = []
    for T in grid:
        worst_tv, worst_success, bound, ok = 0.0, 0.0, 0.0, True
        for _ in range(a.trials):
            E = random_experiment(a.n, a.n + 1, 2, rng)
            scale = T / E.time if E.time > 0 else 0.0
            E.durations = [t * scale for t in E.durations]
            tv, bound, holds = tv_bound_check(E, H1, H2)
            ok &= holds
            worst_tv = max(worst_tv, tv)
            worst_success = max(worst_success, minimax_success(experiment_distribution(E, H1),
                                                               experiment_distribution(E, H2)))
        rows.append([repr(T), repr(worst_tv), repr(bound), int(ok), repr(worst_success)])
    _write_text(a.out, _csv_text(["T", "tv_max", "bound", "holds", "best_success"], rows))
    return 0 if all(r[3] for r in rows) else 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="hamcert", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--out", default=None)

    p = sub.add_parser("gen", help="generate a random Hamiltonian or plant a residual")
    common(p)
    p.add_argument("--n", type=int)
    p.add_argument("--m", type=int)
    p.add_argument("--bound", type=float)
    p.add_argument("--h0", help="base Hamiltonian for --residual")
    p.add_argument("--residual", type=float, help="Frobenius norm of the planted residual")
    p.add_argument("--extra-terms", type=int, default=0)
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("certify", help="run a certifier against an oracle built from --h")
    common(p)
    p.add_argument("--h", required=True, help="hidden Hamiltonian (read only by the oracle)")
    p.add_argument("--h0", required=True, help="target Hamiltonian")
    p.add_argument("--method", choices=["rchc", "chc", "shc"], default="chc")
    p.add_argument("--norm", choices=["frobenius", "pauli", "schatten"], default="frobenius")
    p.add_argument("--p", type=float, default=2.0)
    p.add_argument("--m", type=int)
    p.add_argument("--bound", type=float)
    p.add_argument("--eps", type=float)
    p.add_argument("--eps1", type=float)
    p.add_argument("--eps2", type=float)
    p.add_argument("--delta", type=float, default=0.1)
    p.add_argument("--trials", type=int, default=1)
    p.add_argument("--workers", type=int, default=1)
    p.set_defaults(func=cmd_certify)

    p = sub.add_parser("analyze-bounds", help="sweep the coefficient bounds on random instances")
    common(p)
    p.add_argument("--n", type=int, default=3)
    p.add_argument("--m", type=int, default=4)
    p.add_argument("--bound", type=float, default=1.0)
    p.add_argument("--trials", type=int, default=100)
    p.add_argument("--kind", choices=["lower", "upper"], default="upper")
    p.set_defaults(func=cmd_analyze_bounds)

    p = sub.add_parser("sample", help="dump stabilizer Bernoulli samples")
    common(p)
    p.add_argument("--h", required=True)
    p.add_argument("--h0", required=True)
    p.add_argument("--group", choices=["all_z", "all_x"], default="all_z")
    p.add_argument("--t", type=float, default=0.1)
    p.add_argument("--r", type=int, default=4)
    p.add_argument("--trials", type=int, default=100)
    p.set_defaults(func=cmd_sample)

    p = sub.add_parser("scaling", help="fit queried evolution time against a parameter grid")
    common(p)
    p.add_argument("--certifier", choices=["rchc", "shc"], default="rchc")
    p.add_argument("--grid", default="0.2,0.1,0.05,0.025")
    p.add_argument("--n", type=int, default=3)
    p.add_argument("--m", type=int)
    p.add_argument("--bound", type=float)
    p.add_argument("--eps", type=float)
    p.add_argument("--delta", type=float, default=0.1)
    p.add_argument("--trials", type=int, default=1)
    p.set_defaults(func=cmd_scaling)

    p = sub.add_parser("lowerbound", help="check TV bounds on the anticommuting hypothesis pair")
    common(p)
    p.add_argument("--n", type=int, default=1)
    p.add_argument("--m", type=int, default=2)
    p.add_argument("--p", type=float, default=2.0)
    p.add_argument("--eps1", type=float, default=0.1)
    p.add_argument("--eps2", type=float, default=0.2)
    p.add_argument("--grid", default="0.1,0.5,1,2")
    p.add_argument("--trials", type=int, default=20)
    p.set_defaults(func=cmd_lowerbound)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (UsageError, HamcertError, OSError, json.JSONDecodeError) as exc:
        print(f"hamcert {args.command}: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
