"""Command line interface.

Every subcommand is a thin client over the document operations: in local
mode it calls them in-process, with ``--server URL`` it posts the same
payload to a running service instance.  Instance documents come from
``--in`` or stdin; results go to stdout or ``--out``.

Exit codes: 0 success, 1 usage error, 2 runtime error.
"""
from __future__ import annotations

import argparse
import json
import os
import sys
from typing import Any, Dict, List, Optional

from . import api
from .serialize import write_csv

LOCAL_OPS = {
    "gen": api.op_gen,
    "partitions": api.op_partitions,
    "build": api.op_build,
    "solve": api.op_solve,
    "perturb": api.op_perturb,
    "pipeline": api.op_pipeline,
    "score": api.op_score,
}


class _Parser(argparse.ArgumentParser):
    """argparse with usage failures mapped to exit code 1."""

    def error(self, message: str):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def _read_text(path: Optional[str]) -> str:
    if path is None or path == "-":
        return sys.stdin.read()
    with open(path, "r", encoding="utf-8") as fh:
        return fh.read()


def _write_text(text: str, path: Optional[str]) -> None:
    if path is None or path == "-":
        sys.stdout.write(text)
        return
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(text)


def _dumps(doc: Any) -> str:
    return json.dumps(doc, indent=2) + "\n"


def _call(args: argparse.Namespace, op: str, payload: Dict[str, Any]) -> Dict[str, Any]:
    if args.server:
        import httpx

        resp = httpx.post(f"{args.server.rstrip('/')}/{op}", json=payload,
                          timeout=300.0)
        if resp.status_code != 200:
            raise RuntimeError(f"server returned {resp.status_code}: {resp.text}")
        return resp.json()
    return LOCAL_OPS[op](payload)


def _instance_payload(args: argparse.Namespace) -> Dict[str, Any]:
    return json.loads(_read_text(getattr(args, "infile", None)))


def _add_instance_io(p: argparse.ArgumentParser) -> None:
    p.add_argument("--in", dest="infile", default=None,
                   help="instance JSON file (default: stdin)")
    p.add_argument("--out", default=None, help="output file (default: stdout)")


def _add_model_flags(p: argparse.ArgumentParser, forms: List[str]) -> None:
    p.add_argument("--form", choices=forms, default=forms[0])
    p.add_argument("--basis", action="store_true",
                   help="restrict refinements to the (1,j,k) basis")
    p.add_argument("--prune", action="store_true",
                   help="drop containment-inconsistent assignment variables")
    p.add_argument("--tau", type=float, default=None,
                   help="tolerance for approximate two-partition enumeration")


def cmd_gen(args) -> int:
    payload = {
        "dist": args.dist, "n": args.n, "seed": args.seed,
        "quantum": args.quantum, "genome_length": args.genome_length,
        "circular": args.circular,
    }
    doc = _call(args, "gen", payload)
    _write_text(_dumps(doc), args.out)
    return 0


def cmd_partitions(args) -> int:
    payload = {"instance": _instance_payload(args), "tau": args.tau,
               "gaps": args.gaps}
    doc = _call(args, "partitions", payload)
    lines = [f"{r} {s} {t}" for r, s, t in doc["triples"]]
    text = "\n".join(lines) + ("\n" if lines else "") + _dumps(doc["summary"])
    _write_text(text, args.out)
    return 0


def cmd_build(args) -> int:
    payload = {"instance": _instance_payload(args), "form": args.form,
               "basis": args.basis, "prune": args.prune, "tau": args.tau}
    doc = _call(args, "build", payload)
    if args.stats_json:
        _write_text(_dumps(doc["stats"]), args.out)
    else:
        stats = doc["stats"]
        text = "".join(f"{k}: {stats[k]}\n" for k in stats)
        _write_text(text, args.out)
    return 0


def cmd_export_lp(args) -> int:
    payload = {"instance": _instance_payload(args), "form": args.form,
               "basis": args.basis, "prune": args.prune, "tau": args.tau,
               "include_lp": True}
    doc = _call(args, "build", payload)
    _write_text(doc["lp"], args.out)
    return 0


def cmd_solve(args) -> int:
    payload = {"instance": _instance_payload(args), "form": args.form,
               "basis": args.basis, "prune": args.prune, "tau": args.tau,
               "exact": args.exact, "node_limit": args.node_limit,
               "time_limit": args.time_limit}
    doc = _call(args, "solve", payload)
    assignment = doc.pop("assignment", None)
    if assignment is not None and args.out:
        _write_text(_dumps(assignment), args.out)
    elif assignment is not None:
        doc["assignment"] = assignment
    sys.stdout.write(_dumps(doc))
    return 0


def cmd_perturb(args) -> int:
    payload = {"instance": _instance_payload(args), "r": args.r, "R": args.R,
               "seed": args.seed, "mode": args.mode, "dist": args.dist}
    doc = _call(args, "perturb", payload)
    if args.out:
        _write_text(_dumps(doc["instance"]), args.out)
        sys.stdout.write(_dumps(doc["provenance"]))
    else:
        sys.stdout.write(_dumps(doc))
    return 0


def cmd_pipeline(args) -> int:
    payload = {"instance": _instance_payload(args), "form": args.form,
               "basis": args.basis, "prune": not args.no_prune,
               "tau": args.tau, "coords": args.coords, "verify": args.verify,
               "exact": args.exact, "node_limit": args.node_limit,
               "time_limit": args.time_limit, "timing": args.timing}
    doc = _call(args, "pipeline", payload)
    _write_text(_dumps(doc), args.out)
    return 0


def cmd_score(args) -> int:
    payload = {
        "instance": json.loads(_read_text(args.infile)),
        "assignment": json.loads(_read_text(args.assignment)),
    }
    doc = _call(args, "score", payload)
    _write_text(_dumps(doc), args.out)
    return 0


def _experiment_spec(args, **extra):
    from .bench.experiments import ExperimentSpec

    fields: Dict[str, Any] = {
        "trials": args.trials,
        "seed": args.seed,
        "record_time": getattr(args, "times", False),
    }
    fields.update(extra)
    return ExperimentSpec(**fields)


def _csv_out(args, name: str) -> Optional[str]:
    if getattr(args, "out_dir", None):
        os.makedirs(args.out_dir, exist_ok=True)
        return os.path.join(args.out_dir, name)
    return args.out


def _emit_csv(path: Optional[str], header, rows) -> None:
    if path is None or path == "-":
        write_csv(sys.stdout, header, rows)
        return
    with open(path, "w", encoding="utf-8", newline="") as fh:
        write_csv(fh, header, rows)


def _grid(text: str) -> tuple:
    try:
        return tuple(float(v) for v in text.split(",") if v.strip() != "")
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad grid {text!r}")


def _int_list(text: str) -> tuple:
    try:
        return tuple(int(v) for v in text.split(",") if v.strip() != "")
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad integer list {text!r}")


def cmd_phase(args) -> int:
    from .bench.experiments import phase_experiment, phase_rows

    spec = _experiment_spec(
        args, generator=args.generator, n_values=(args.n,),
        quantum=args.quantum, genome_length=args.genome_length,
        r_grid=args.r_grid, R_grid=args.R_grid, tau_rule=args.tau_rule,
        tau_fixed=args.tau_fixed, mode=args.mode)
    header, rows = phase_rows(phase_experiment(spec))
    _emit_csv(_csv_out(args, "phase.csv"), header, rows)
    return 0


def cmd_integrality(args) -> int:
    from .bench.experiments import integrality_experiment, integrality_rows

    spec = _experiment_spec(
        args, generator=args.generator, n_values=args.n_list,
        quantum=args.quantum, genome_length=args.genome_length,
        basis=args.basis, prune=not args.no_prune, exact=args.exact)
    header, rows = integrality_rows(integrality_experiment(spec))
    _emit_csv(_csv_out(args, "integrality.csv"), header, rows)
    return 0


def cmd_digest(args) -> int:
    from .bench.experiments import digest_experiment, digest_rows

    generator = "digest_circular" if args.circular else "digest_linear"
    # An integral grid must stay an int so the rounded multiset stays exact.
    grid = int(args.R) if float(args.R).is_integer() else args.R
    spec = _experiment_spec(
        args, generator=generator, n_values=args.sites_list,
        genome_length=args.genome_length, noise_r=args.r, noise_R=grid,
        exact=args.exact)
    header, rows = digest_rows(digest_experiment(spec))
    _emit_csv(_csv_out(args, "digest.csv"), header, rows)
    return 0


def cmd_serve(args) -> int:
    import uvicorn

    uvicorn.run("turnpike.service:app", host=args.host, port=args.port,
                log_level="warning")
    return 0


def build_parser() -> _Parser:
    parser = _Parser(prog="turnpike",
                     description="Turnpike/Partial-Digest assignment toolkit")
    parser.add_argument("--server", default=None,
                        help="base URL of a running service; run remotely")
    sub = parser.add_subparsers(dest="command", metavar="command")

    p = sub.add_parser("gen", help="generate a seeded instance")
    p.add_argument("--dist", default="uniform01",
                   choices=["uniform01", "normal", "cauchy", "beltway",
                            "digest-linear", "digest-circular"])
    p.add_argument("--n", type=int, default=5,
                   help="points (synthetic) or cut sites (digest)")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--quantum", default="0.000001",
                   help="coordinate grid unit for continuous draws")
    p.add_argument("--genome-length", type=int, default=500)
    p.add_argument("--circular", action="store_true")
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("partitions", help="enumerate the two-partition set")
    _add_instance_io(p)
    p.add_argument("--tau", type=float, default=None,
                   help="approximate enumeration tolerance (default exact)")
    p.add_argument("--gaps", action="store_true", help="include gap summary")
    p.set_defaults(func=cmd_partitions)

    p = sub.add_parser("build", help="build a model and report its size")
    _add_instance_io(p)
    _add_model_flags(p, ["tri-ilp", "tri-lp", "milp"])
    p.add_argument("--stats-json", action="store_true")
    p.set_defaults(func=cmd_build)

    p = sub.add_parser("export-lp", help="write the model as an LP file")
    _add_instance_io(p)
    _add_model_flags(p, ["tri-ilp", "tri-lp", "milp"])
    p.set_defaults(func=cmd_export_lp)

    p = sub.add_parser("solve", help="solve the feasibility model")
    _add_instance_io(p)
    _add_model_flags(p, ["tri-ilp", "tri-lp", "milp"])
    p.add_argument("--exact", action="store_true",
                   help="certify the outcome in rational arithmetic")
    p.add_argument("--node-limit", type=int, default=100_000)
    p.add_argument("--time-limit", type=float, default=None)
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("perturb", help="apply bounded noise and rounding")
    _add_instance_io(p)
    p.add_argument("--r", type=float, default=0.0, help="noise radius")
    p.add_argument("--R", type=float, default=0.0, help="rounding grid")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--mode", choices=["per_value", "per_element"],
                   default="per_value")
    p.add_argument("--dist", choices=["uniform_pm_r", "adversarial_pm_r"],
                   default="uniform_pm_r")
    p.set_defaults(func=cmd_perturb)

    p = sub.add_parser("pipeline", help="assignment-first reconstruction")
    _add_instance_io(p)
    p.add_argument("--form", choices=["tri-ilp", "tri-lp"], default="tri-ilp")
    p.add_argument("--basis", action="store_true")
    p.add_argument("--no-prune", action="store_true",
                   help="keep containment-inconsistent variables")
    p.add_argument("--tau", type=float, default=None)
    p.add_argument("--coords", action="store_true",
                   help="emit reconstructed coordinates")
    p.add_argument("--verify", action="store_true",
                   help="independently re-check a realizable claim")
    p.add_argument("--exact", action="store_true")
    p.add_argument("--node-limit", type=int, default=100_000)
    p.add_argument("--time-limit", type=float, default=None)
    p.add_argument("--timing", action="store_true",
                   help="include wall-clock times in the output")
    p.set_defaults(func=cmd_pipeline)

    p = sub.add_parser("score", help="score an assignment against ground truth")
    _add_instance_io(p)
    p.add_argument("--assignment", required=True, help="assignment JSON file")
    p.set_defaults(func=cmd_score)

    p = sub.add_parser("phase", help="noisy-recovery phase grid (CSV)")
    p.add_argument("--generator", default="uniform01")
    p.add_argument("--n", type=int, default=5)
    p.add_argument("--trials", type=int, default=10)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--quantum", default="0.01")
    p.add_argument("--genome-length", type=int, default=500)
    p.add_argument("--r-grid", type=_grid, required=True)
    p.add_argument("--R-grid", type=_grid, required=True)
    p.add_argument("--tau-rule", choices=["half_gap_star", "fixed"],
                   default="half_gap_star")
    p.add_argument("--tau-fixed", type=float, default=0.0)
    p.add_argument("--mode", choices=["per_value", "per_element"],
                   default="per_value")
    p.add_argument("--out", default=None)
    p.add_argument("--out-dir", default=None)
    p.set_defaults(func=cmd_phase)

    p = sub.add_parser("integrality", help="LP integrality sweep (CSV)")
    p.add_argument("--generator", default="uniform01")
    p.add_argument("--n-list", type=_int_list, default=(4, 5, 6))
    p.add_argument("--trials", type=int, default=5)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--quantum", default="0.000001")
    p.add_argument("--genome-length", type=int, default=500)
    p.add_argument("--basis", action="store_true")
    p.add_argument("--no-prune", action="store_true")
    p.add_argument("--exact", action="store_true")
    p.add_argument("--times", action="store_true", help="record wall times")
    p.add_argument("--out", default=None)
    p.add_argument("--out-dir", default=None)
    p.set_defaults(func=cmd_integrality)

    p = sub.add_parser("digest", help="noisy partial-digest sweep (CSV)")
    p.add_argument("--circular", action="store_true")
    p.add_argument("--sites-list", type=_int_list, default=(2, 3, 4))
    p.add_argument("--genome-length", type=int, default=500)
    p.add_argument("--r", type=float, default=5.0)
    p.add_argument("--R", type=float, default=1.0)
    p.add_argument("--trials", type=int, default=5)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--exact", action="store_true")
    p.add_argument("--times", action="store_true", help="record wall times")
    p.add_argument("--out", default=None)
    p.add_argument("--out-dir", default=None)
    p.set_defaults(func=cmd_digest)

    p = sub.add_parser("serve", help="run the HTTP service")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8000)
    p.set_defaults(func=cmd_serve)

    return parser


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "command", None) is None:
        parser.print_usage(sys.stderr)
        return 1
    try:
        return args.func(args)
    except (ValueError, OSError, RuntimeError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
