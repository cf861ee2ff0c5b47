"""Batch front door: validate families, run analyses, write JSON/CSV reports.

Exit codes: 0 pass, 1 I/O or schema error, 2 validation failure,
3 non-convergence (partial report still written).  Reports are
deterministic for fixed input and seed; the only run-dependent fields
(timestamp) live in a separate metadata block.
"""
from __future__ import annotations

import argparse
import csv
import json
import logging
import os
import sys
import time
from pathlib import Path

import numpy as np

from . import __version__
from .bergman import (
    EXPONENT_CONVENTION,
    JetIdealProblem,
    RadialWeight,
    extension_jumping_numbers,
    moment_table,
    n1_estimate,
    quotient_norm,
)
from .errors import LelongError, NonConvergent, SchemaError
from .families import check_convexity, check_moderate_growth, check_negative_curvature
from .filtration import build_filtration, verify_theorem_1_1
from .flow import compute_flow, flat_limit
from .openness import ModelWeight, lemma_identity, openness_interval
from .profiles import check_profile_convexity
from .serialize import load_family, matrix_to_json, vector_from_json, vector_to_json
from .tailfit import FitConfig
from .testing import random_vector

log = logging.getLogger("lelong")

EXIT_PASS = 0
EXIT_IO = 1
EXIT_VALIDATION = 2
EXIT_NONCONVERGENT = 3

TOLERANCES = {
    "convexity": 1e-7,
    "lambda_monotone": 1e-7,
    "annihilator": 1e-8,
    "beta_consistency": 5e-2,
    "cluster_tol_default": 1e-2,
}


def _jsonify(obj):
    """Recursively convert numpy scalars/arrays for json.dumps."""
    if isinstance(obj, dict):
        return {k: _jsonify(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonify(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _jsonify(obj.tolist())
    if isinstance(obj, (np.floating, np.integer, np.bool_)):
        return obj.item()
    if isinstance(obj, complex):
        return [obj.real, obj.imag]
    return obj


def write_report(report: dict, output, seed, metadata: dict | None = None) -> None:
    doc = {
        "metadata": {"timestamp": time.strftime("%Y-%m-%dT%H:%M:%S"), "tool": "lelong", **(metadata or {})},
        "report": {
            "version": __version__,
            "seed": seed,
            "tolerances": TOLERANCES,
            "exponent_convention": EXPONENT_CONVENTION,
            **_jsonify(report),
        },
    }
    text = json.dumps(doc, indent=2, sort_keys=True)
    if output:
        Path(output).write_text(text + "\n")
    else:
        print(text)


def _load_directions(args, n: int):
    """Dual directions from --directions JSON, else seeded random ones."""
    if args.directions:
        doc = json.loads(Path(args.directions).read_text())
        if not isinstance(doc, list):
            raise SchemaError("directions file must hold a JSON list of vectors")
        return [vector_from_json(v, f"directions[{i}]") for i, v in enumerate(doc)]
    rng = np.random.default_rng(args.seed)
    return [random_vector(rng, n) for _ in range(args.n_directions)]


def cmd_validate(args) -> int:
    fam = load_family(args.input, validate=False)
    profile_worst = 0.0
    if fam.kind == "generated":
        for blk in fam.blocks:
            for prof in blk.profiles:
                profile_worst = max(profile_worst, check_profile_convexity(prof, fam.t_max))
    probes = list(np.eye(fam.n, dtype=complex))
    grid = np.linspace(0.0, fam.t_max, 201)
    conv = check_convexity(fam, probes, grid)
    growth = check_moderate_growth(fam, probes)
    sections = [(probes[i], probes[(i + 1) % fam.n]) for i in range(min(fam.n, 2))]
    t_mid = 0.25 * fam.t_max
    curv = check_negative_curvature(fam, sections, (t_mid, t_mid + 1.0, -0.5, 0.5), step=0.2)
    profiles_ok = profile_worst <= 1e-9
    passed = profiles_ok and conv.passed and curv.passed and growth.verdict == "moderate"
    write_report(
        {
            "command": "validate",
            "n": fam.n,
            "kind": fam.kind,
            "profile_convexity_worst": profile_worst,
            "log_norm_convexity": {"worst": conv.worst, "passed": conv.passed},
            "curvature": {"worst": curv.worst, "tol": curv.tol, "passed": curv.passed},
            "growth": {"a": growth.a, "C": growth.C, "verdict": growth.verdict},
            "passed": passed,
        },
        args.output,
        args.seed,
    )
    return EXIT_PASS if passed else EXIT_VALIDATION


def _flow_csv(fam, path, n_points: int):
    grid = np.linspace(fam.t_max / n_points, fam.t_max, n_points)
    flow = compute_flow(fam, grid)
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["t"] + [f"lambda_{j + 1}" for j in range(fam.n)])
        for t, row in zip(flow.grid, flow.lambdas):
            writer.writerow([repr(float(t))] + [repr(float(x)) for x in row])
    return flow


def cmd_analyze(args) -> int:
    fam = load_family(args.input)
    if args.t_max is not None and args.t_max != fam.t_max:
        raise SchemaError("--t-max must match the family file horizon")
    csv_path = (Path(args.output).with_suffix(".csv")) if args.output else Path("lambda_curves.csv")
    _flow_csv(fam, csv_path, args.grid_points)
    flat = flat_limit(fam)
    filtration = build_filtration(flat, args.cluster_tol)
    directions = _load_directions(args, fam.n)
    reports = []
    for v in directions:
        rep = verify_theorem_1_1(fam, v, filtration)
        reports.append(
            {
                "vector": vector_to_json(rep.direction),
                "j_index": rep.j_index,
                "beta": rep.beta,
                "verdicts": rep.verdicts,
            }
        )
    write_report(
        {
            "command": "analyze",
            "n": fam.n,
            "alphas": filtration.jumps,
            "multiplicities": filtration.multiplicities,
            "v_bases": [matrix_to_json(b) for b in filtration.v_bases],
            "f_bases": [matrix_to_json(b) for b in filtration.f_bases],
            "directions": reports,
        },
        args.output,
        args.seed,
        metadata={"lambda_csv": str(csv_path)},
    )
    return EXIT_PASS


def cmd_flat_limit(args) -> int:
    fam = load_family(args.input)
    flat = flat_limit(fam)
    write_report(
        {
            "command": "flat-limit",
            "n": fam.n,
            "exponents": flat.exponents,
            "basis": matrix_to_json(flat.basis),
            "base_form": matrix_to_json(flat.base_form.matrix),
        },
        args.output,
        args.seed,
    )
    return EXIT_PASS


def cmd_verify_thm(args) -> int:
    fam = load_family(args.input)
    flat = flat_limit(fam)
    filtration = build_filtration(flat, args.cluster_tol)
    directions = _load_directions(args, fam.n)
    reports = []
    all_ok = True
    for v in directions:
        rep = verify_theorem_1_1(fam, v, filtration)
        all_ok = all_ok and rep.verdicts["consistent"]
        reports.append(
            {
                "vector": vector_to_json(rep.direction),
                "j_index": rep.j_index,
                "beta": rep.beta,
                "interval_endpoint": rep.interval_endpoint,
                "verdicts": rep.verdicts,
            }
        )
    write_report(
        {
            "command": "verify-thm",
            "alphas": filtration.jumps,
            "directions": reports,
            "passed": all_ok,
        },
        args.output,
        args.seed,
    )
    return EXIT_PASS if all_ok else EXIT_VALIDATION


def cmd_openness(args) -> int:
    cfg = json.loads(Path(args.input).read_text())
    for key in ("phi_kind", "c", "m"):
        if key not in cfg:
            raise SchemaError(f"openness config: missing field {key!r}")
    w = ModelWeight(phi_kind=cfg["phi_kind"], psi_coeff=float(cfg["c"]))
    m = int(cfg["m"])
    result = openness_interval(w, m)
    residuals = []
    for x in np.linspace(-2.0, 0.0, 5):
        for p in np.linspace(0.25, 1.75, 5):
            lhs, rhs, _ = lemma_identity(float(x), float(p))
            residuals.append({"x": float(x), "p": float(p), "residual": abs(lhs - rhs) / rhs})
    write_report(
        {
            "command": "openness",
            "p_max": result.p_max,
            "closed_form": result.closed_form,
            "probes": [{"p": p, "verdict": v} for p, v in result.probes],
            "identity_residuals": residuals,
            "reduction_endpoint": result.reduction_endpoint,
            "endpoint_excluded": result.endpoint_excluded,
            "passed": result.passed,
        },
        args.output,
        args.seed,
    )
    return EXIT_PASS if result.passed else EXIT_VALIDATION


def cmd_bergman(args) -> int:
    cfg = json.loads(Path(args.input).read_text())
    for key in ("n", "weight", "jets"):
        if key not in cfg:
            raise SchemaError(f"bergman problem: missing field {key!r}")
    weight = RadialWeight(kind=cfg["weight"]["kind"], params=cfg["weight"].get("params"))
    jets = vector_from_json(cfg["jets"], "jets")
    problem = JetIdealProblem(n=int(cfg["n"]), weight=weight, jets=jets)
    t_grid = np.asarray(cfg.get("t_grid", [0.0, 0.5, 1.0, 2.0]), dtype=float)
    table = moment_table(weight, range(problem.n + 1), t_grid)
    norms = [quotient_norm(problem, float(t)) for t in t_grid]
    jumps = extension_jumping_numbers(weight, problem.n)
    report = {
        "command": "bergman",
        "n": problem.n,
        "t_grid": t_grid,
        "moments": table.values,
        "quotient_norms": norms,
        "jumping_numbers": jumps,
    }
    if problem.n == 1:
        res = n1_estimate(weight, problem.jets[0], problem.jets[1])
        report["n1"] = {"bound": res.bound, "exact": res.exact, "sharp_gap": res.bound - res.exact}
    write_report(report, args.output, args.seed)
    return EXIT_PASS


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="lelong", description="Metric-family filtration toolkit")
    sub = parser.add_subparsers(dest="command", required=True)
    handlers = {
        "validate": cmd_validate,
        "analyze": cmd_analyze,
        "flat-limit": cmd_flat_limit,
        "verify-thm": cmd_verify_thm,
        "openness": cmd_openness,
        "bergman": cmd_bergman,
    }
    for name, handler in handlers.items():
        p = sub.add_parser(name)
        p.add_argument("--input", required=True)
        p.add_argument("--output", default=None)
        p.add_argument("--t-max", type=float, default=None)
        p.add_argument("--grid-points", type=int, default=400)
        p.add_argument("--cluster-tol", type=float, default=1e-2)
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--directions", default=None)
        p.add_argument("--n-directions", type=int, default=5)
        p.set_defaults(handler=handler)
    return parser


def main(argv=None) -> int:
    logging.basicConfig(level=os.environ.get("LELONG_LOG", "WARNING").upper())
    args = build_parser().parse_args(argv)
    try:
        return args.handler(args)
    except NonConvergent as exc:
        log.error("non-convergent: %s", exc)
        write_report({"command": args.command, "error": str(exc), "partial": True}, args.output, args.seed)
        return EXIT_NONCONVERGENT
    except (SchemaError, OSError, json.JSONDecodeError) as exc:
        log.error("input error: %s", exc)
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except LelongError as exc:
        log.error("validation error: %s", exc)
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION


def entry_point() -> None:
    raise SystemExit(main())
