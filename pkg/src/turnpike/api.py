"""Document-level operations shared by the CLI and the HTTP service.

Every function takes and returns plain JSON-ready dictionaries shaped like
the on-disk formats, so the CLI in local mode, the CLI in client mode and
the service endpoints all run the exact same code paths.
"""
from __future__ import annotations

import dataclasses
import json
import math
from fractions import Fraction
from typing import Any, Dict, Optional

from .core import DistanceMultiset, PointSet, ruler_from_assignment
from .bench.generators import gen_partial_digest, gen_synthetic
from .metrics import (
    coordinate_mae,
    ground_truth,
    harden,
    integrality_score,
    kendall_tau,
    labeling_error,
    perm_from_assignment,
)
from .model import build_milp, build_triangle_ilp, model_stats, relax
from .lpfile import render_model
from .noise import NoiseSpec, observe
from .numbers import Number, is_exact, parse_grid_unit
from .partitions import (
    approximate_two_partitions,
    enumerate_two_partitions,
    gaps,
    sorted_triples,
)
from .pipeline import PipelineOptions, coords_least_squares, run, verify_certificate
from .serialize import (
    dumps_assignment,
    dumps_instance,
    jsonable,
    loads_assignment,
    loads_instance,
)
from .solver import FEASIBLE, SolverConfig, extract_assignment, solve

__all__ = [
    "instance_from_doc",
    "instance_text",
    "op_gen",
    "op_partitions",
    "op_build",
    "op_solve",
    "op_perturb",
    "op_pipeline",
    "op_score",
]

FORM_ALIASES = {
    "milp": "milp",
    "tri-ilp": "tri_ilp",
    "tri_ilp": "tri_ilp",
    "tri-lp": "tri_lp",
    "tri_lp": "tri_lp",
}


def instance_from_doc(doc: Dict[str, Any]):
    """Validate a parsed instance document; returns (Y, ground truth, scale)."""
    return loads_instance(json.dumps(doc))


def instance_text(Y: DistanceMultiset, gt: Optional[PointSet],
                  scale: Optional[Number]) -> str:
    """Canonical instance rendering; scale emitted only when informative."""
    if scale is None and not all(isinstance(v, int) for v in Y.values):
        if Y.exact:
            raise ValueError("non-integer exact values need a declared scale")
    return dumps_instance(Y, scale=scale, ground_truth=gt)


def _instance_doc(Y: DistanceMultiset, gt: Optional[PointSet],
                  scale: Optional[Number]) -> Dict[str, Any]:
    return json.loads(instance_text(Y, gt, scale))


def op_gen(req: Dict[str, Any]) -> Dict[str, Any]:
    dist = str(req.get("dist", "uniform01")).replace("-", "_")
    n = int(req.get("n", 5))
    seed = int(req.get("seed", 0))
    if dist in ("digest_linear", "digest_circular", "digest"):
        circular = bool(req.get("circular", False)) or dist == "digest_circular"
        ps, Y = gen_partial_digest(n, int(req.get("genome_length", 500)),
                                   circular, seed)
        return _instance_doc(Y, ps, None)
    quantum = req.get("quantum", "0.000001")
    ps, Y = gen_synthetic(dist, n, seed, quantum)
    scale: Optional[Number] = None
    if not all(isinstance(v, int) for v in Y.values):
        scale = parse_grid_unit(quantum)
    return _instance_doc(Y, ps, scale)


def op_partitions(req: Dict[str, Any]) -> Dict[str, Any]:
    Y, _, _ = instance_from_doc(req["instance"])
    tau = req.get("tau")
    if tau is None:
        pset = enumerate_two_partitions(Y)
    else:
        pset = approximate_two_partitions(Y, float(tau))
    triples = [[p.r, p.s, p.t] for p in sorted_triples(pset)]
    summary: Dict[str, Any] = {"count": len(triples)}
    if req.get("gaps"):
        prof = gaps(Y)
        summary["gap_star"] = jsonable(_finite(prof.gap_star))
        summary["per_target_min"] = [jsonable(_finite(g)) for g in prof.per_target]
    return {"triples": triples, "summary": summary}


def _finite(v: Number) -> Any:
    if isinstance(v, float) and math.isinf(v):
        return "inf"
    return v


def _build_model(Y: DistanceMultiset, form: str, basis: bool, prune: bool,
                 tau: Optional[float]):
    form_key = FORM_ALIASES.get(form)
    if form_key is None:
        raise ValueError(f"unknown form {form!r}")
    if form_key == "milp":
        if tau is not None:
            raise ValueError("the assignment MILP does not take a tau")
        return build_milp(Y)
    if tau is None:
        pset = enumerate_two_partitions(Y)
        approx = False
    else:
        pset = approximate_two_partitions(Y, float(tau))
        approx = True
    model = build_triangle_ilp(Y, pset, basis=basis, prune=prune,
                               approximate=approx)
    if form_key == "tri_lp":
        model = relax(model)
    return model


def op_build(req: Dict[str, Any]) -> Dict[str, Any]:
    Y, _, _ = instance_from_doc(req["instance"])
    model = _build_model(Y, req.get("form", "tri-ilp"),
                         bool(req.get("basis", False)),
                         bool(req.get("prune", False)), req.get("tau"))
    stats = dataclasses.asdict(model_stats(model))
    stats["form"] = model.form
    stats["warnings"] = list(model.warnings)
    out: Dict[str, Any] = {"stats": stats}
    if req.get("include_lp"):
        out["lp"] = render_model(model)
    return out


def _assignment_doc(P) -> Dict[str, Any]:
    return json.loads(dumps_assignment(P))


def op_solve(req: Dict[str, Any]) -> Dict[str, Any]:
    Y, _, _ = instance_from_doc(req["instance"])
    model = _build_model(Y, req.get("form", "tri-ilp"),
                         bool(req.get("basis", False)),
                         bool(req.get("prune", False)), req.get("tau"))
    cfg = SolverConfig(
        exact=bool(req.get("exact", False)),
        node_limit=int(req.get("node_limit", 100_000)),
        time_limit=req.get("time_limit"),
    )
    sol = solve(model, cfg)
    out: Dict[str, Any] = {
        "status": sol.status,
        "certified": sol.stats.certified,
        "iterations": sol.stats.simplex_iterations,
        "nodes": sol.stats.bb_nodes,
        "assignment": None,
    }
    if sol.status == FEASIBLE:
        P = extract_assignment(sol, model.n, model.m_prime)
        if P.is_integral(1e-6):
            P = P.rounded()
        out["assignment"] = _assignment_doc(P)
    return out


def op_perturb(req: Dict[str, Any]) -> Dict[str, Any]:
    Y, gt, scale = instance_from_doc(req["instance"])
    R = req.get("R", 0.0)
    # An integral grid stays an int so rounded output stays exact.
    if isinstance(R, float) and R.is_integer():
        R = int(R)
    spec = NoiseSpec(
        r=float(req.get("r", 0.0)),
        R=R,
        seed=int(req.get("seed", 0)),
        mode=str(req.get("mode", "per_value")),
        distribution=str(req.get("dist", "uniform_pm_r")),
    )
    obs = observe(Y, spec)
    out_scale: Optional[Number] = None
    if obs.multiset.exact:
        if all(isinstance(v, int) for v in obs.multiset.values):
            out_scale = None
        elif is_exact(spec.R) and spec.R:
            out_scale = spec.R
        else:
            out_scale = scale
    doc = _instance_doc(obs.multiset, gt, out_scale)
    provenance = {
        "r": spec.r,
        "R": float(spec.R),
        "seed": spec.seed,
        "mode": spec.mode,
        "dist": spec.distribution,
        "splits": obs.splits,
        "merges": obs.merges,
        "resampled": obs.resampled,
        "clamped": obs.clamped,
    }
    return {"instance": doc, "provenance": provenance}


def op_pipeline(req: Dict[str, Any]) -> Dict[str, Any]:
    Y, _, _ = instance_from_doc(req["instance"])
    form = FORM_ALIASES.get(str(req.get("form", "tri-ilp")))
    if form not in ("tri_ilp", "tri_lp"):
        raise ValueError("pipeline form must be tri-ilp or tri-lp")
    opts = PipelineOptions(
        form=form,
        basis=bool(req.get("basis", False)),
        prune=bool(req.get("prune", True)),
        tau=req.get("tau"),
        coords=bool(req.get("coords", False)),
        exact=bool(req.get("exact", False)),
        node_limit=int(req.get("node_limit", 100_000)),
        time_limit=req.get("time_limit"),
    )
    result = run(Y, opts)
    provenance = dict(result.provenance)
    if not req.get("timing"):
        solver_prov = dict(provenance.get("solver", {}))
        solver_prov.pop("wall_time", None)
        provenance["solver"] = solver_prov
    doc: Dict[str, Any] = {
        "certificate": result.certificate,
        "integral": result.integral,
        "induced_ruler_residual": jsonable(result.induced_ruler_residual),
        "coords": jsonable(list(result.coords.coords)) if result.coords else None,
        "assignment": _assignment_doc(result.assignment) if result.assignment else None,
        "provenance": jsonable(provenance),
    }
    if req.get("verify"):
        report = verify_certificate(result, Y)
        doc["verified"] = report.ok
        doc["verify_reason"] = report.reason
    return doc


def op_score(req: Dict[str, Any]) -> Dict[str, Any]:
    Y, gt_points, _ = instance_from_doc(req["instance"])
    if gt_points is None:
        raise ValueError("scoring needs an instance with ground_truth")
    P_hat = loads_assignment(json.dumps(req["assignment"]))
    truth = ground_truth(gt_points)
    if P_hat.m_prime != Y.m_prime or P_hat.n != Y.point_count():
        raise ValueError("assignment shape does not match the instance")
    integrality = float(integrality_score(P_hat))
    hard, violated = harden(P_hat, Y.multiplicities)
    lab = float(labeling_error(hard, truth.assignment))
    pi_hat = perm_from_assignment(hard, Y.multiplicities)
    kt = None
    if pi_hat is not None:
        kt = float(kendall_tau(pi_hat, truth.perm))
    mae = None
    try:
        x_hat = coords_least_squares(ruler_from_assignment(P_hat, Y))
        mae = float(coordinate_mae(x_hat, gt_points))
    except ValueError:
        pass
    return {
        "labeling_error": lab,
        "kendall_tau": kt,
        "mae": mae,
        "integrality": integrality,
        "multiplicity_violation": violated,
    }
