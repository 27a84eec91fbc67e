"""Command-line front end.

Subcommands: ``generate`` (zoo complexes to JSON files), ``analyze``
(homology / hodge / formality / obstruction pipeline over a complex file),
``check`` (obstruction rules over a summary file), ``search`` (weight
search, persisting the best weights plus a CSV residual trace).

All file outputs are canonical JSON (sorted keys, stable float repr), so
reports are byte-stable across runs apart from the recorded timings.

Exit codes: 0 success; 1 the analysis ran fine and found an obstructed
verdict; 2 usage or input-schema error; 3 internal numerical failure.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from pathlib import Path

import numpy as np

from . import __version__
from .complexes import (
    SimplicialComplex,
    connected_sum,
    is_closed_pseudomanifold,
    load_complex,
    orient,
    product_complex,
    save_complex,
    sphere,
    surface,
    torus,
)
from .cup import intersection_form
from .errors import NumericalError
from .formality import SearchConfig, formality_residual, search_formal_weights
from .hodge import harmonic_basis, random_weights, unit_weights, weights_from_arrays
from .homology import betti_numbers, euler_characteristic, poincare_duality_check
from .obstructions import (
    check_obstructions,
    load_summary,
    summary_to_dict,
    summarize,
)

EXIT_OK = 0
EXIT_OBSTRUCTED = 1
EXIT_USAGE = 2
EXIT_NUMERICAL = 3

_STAGES = ("betti", "hodge", "formality", "obstructions")


def _dump_json(payload: dict, path: str | None) -> None:
    text = json.dumps(payload, sort_keys=True, indent=2) + "\n"
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        Path(path).write_text(text)


def parse_zoo_identifier(identifier: str) -> SimplicialComplex:
    """Resolve a zoo identifier or a complex-file path.

    Grammar: sphere:n | torus:n | surface:g | product:A,B | connsum:A,B,
    where A and B are themselves identifiers (commas cannot nest; write
    intermediate files for deeper expressions), or a path to a JSON file.
    """
    if Path(identifier).is_file():
        return load_complex(identifier)
    head, sep, rest = identifier.partition(":")
    if not sep:
        raise ValueError(f"unknown complex identifier {identifier!r}")
    if head in ("sphere", "torus", "surface"):
        try:
            arg = int(rest)
        except ValueError:
            raise ValueError(f"{identifier!r}: expected an integer parameter")
        if head == "sphere":
            return sphere(arg)
        if head == "torus":
            return torus(arg)
        return surface(arg)
    if head in ("product", "connsum"):
        parts = rest.split(",")
        if len(parts) != 2:
            raise ValueError(f"{identifier!r}: expected exactly two operands")
        a, b = (parse_zoo_identifier(p) for p in parts)
        return product_complex(a, b) if head == "product" else connected_sum(a, b)
    raise ValueError(f"unknown complex identifier {identifier!r}")


def _load_weights(K: SimplicialComplex, path: str | None):
    if path is None:
        return unit_weights(K)
    payload = json.loads(Path(path).read_text())
    if not isinstance(payload, dict) or "weights" not in payload:
        raise ValueError(f"{path}: expected an object with a 'weights' key")
    return weights_from_arrays(K, payload["weights"])


def _weights_payload(w) -> dict:
    return {"weights": [list(map(float, arr)) for arr in w.by_degree]}


def cmd_generate(args) -> int:
    K = parse_zoo_identifier(args.identifier)
    save_complex(K, args.output)
    return EXIT_OK


def _analyze_report(K: SimplicialComplex, w, stages: set[str], tol: float) -> dict:
    report: dict = {
        "tool": {"name": "hodgeform", "version": __version__},
        "complex": {
            "name": K.name,
            "dimension": K.dimension,
            "f_vector": list(K.f_vector),
        },
        "timings": {},
        "errors": {},
    }
    n = K.dimension
    closed = is_closed_pseudomanifold(K)
    orientation = orient(K) if closed else None

    def run_stage(stage, fn):
        start = time.perf_counter()
        try:
            fn()
        except (NumericalError, ValueError, np.linalg.LinAlgError) as exc:
            report["errors"][stage] = str(exc)
        report["timings"][stage] = time.perf_counter() - start

    def stage_betti():
        duality = None
        if closed and orientation is not None:
            duality = poincare_duality_check(K)
        report["homology"] = {
            "betti": list(betti_numbers(K)),
            "euler_characteristic": euler_characteristic(K),
            "closed_pseudomanifold": closed,
            "orientable": None if not closed else orientation is not None,
            "poincare_duality": duality,
        }

    def stage_hodge():
        degrees = []
        for k in range(n + 1):
            basis = harmonic_basis(K, w, k, tol)
            degrees.append(
                {
                    "degree": k,
                    "dimension": basis.cardinality,
                    "residual": basis.residual,
                    "spectral_gap": basis.gap,
                }
            )
        payload = {"tolerance": tol, "degrees": degrees}
        if (
            n > 0
            and n % 2 == 0
            and closed
            and orientation is not None
            and poincare_duality_check(K)
        ):
            form = intersection_form(K, w, tol)
            payload["intersection"] = {
                "degree": form.degree,
                "symmetric": form.symmetric,
                "b_plus": form.b_plus,
                "b_minus": form.b_minus,
                "b_zero": form.b_zero,
                "signature": form.signature,
                "skew_rank": form.skew_rank,
                "matrix": [[float(x) for x in row] for row in form.matrix],
                "matrix_rational": form.matrix_rational(),
            }
        else:
            payload["intersection"] = None
        report["hodge"] = payload

    def stage_formality():
        report["formality"] = formality_residual(K, w, tol).to_dict()

    def stage_obstructions():
        summary = summarize(K, w)
        payload = check_obstructions(summary).to_dict()
        payload["summary"] = summary_to_dict(summary)
        report["obstructions"] = payload

    if "betti" in stages:
        run_stage("betti", stage_betti)
    if "hodge" in stages:
        run_stage("hodge", stage_hodge)
    if "formality" in stages:
        run_stage("formality", stage_formality)
    if "obstructions" in stages:
        run_stage("obstructions", stage_obstructions)
    if not report["errors"]:
        del report["errors"]
    return report


def cmd_analyze(args) -> int:
    K = load_complex(args.complex)
    w = _load_weights(K, args.weights)
    stages = {s for s in _STAGES if getattr(args, s)}
    if args.all or not stages:
        stages = set(_STAGES)
    report = _analyze_report(K, w, stages, args.tolerance)
    _dump_json(report, args.output)
    if report.get("errors"):
        return EXIT_NUMERICAL
    obstructions = report.get("obstructions")
    if obstructions and obstructions["verdict"] == "obstructed":
        return EXIT_OBSTRUCTED
    return EXIT_OK


def cmd_check(args) -> int:
    summary = load_summary(args.summary)
    report = check_obstructions(summary)
    payload = report.to_dict()
    payload["summary"] = summary_to_dict(summary)
    _dump_json(payload, args.output)
    return EXIT_OBSTRUCTED if report.verdict == "obstructed" else EXIT_OK


def cmd_search(args) -> int:
    K = load_complex(args.complex)
    if args.init == "random":
        initial = random_weights(K, np.random.default_rng(args.seed))
    else:
        initial = _load_weights(K, args.weights)
    cfg = SearchConfig(
        max_iterations=args.max_iterations,
        improvement_tol=args.improvement_tol,
        step_scale=args.step,
        seed=args.seed,
        free_degrees=None
        if args.degrees is None
        else tuple(int(d) for d in args.degrees.split(",")),
    )
    best, trace = search_formal_weights(K, cfg, initial)
    _dump_json(_weights_payload(best), args.output)
    trace_path = args.trace
    if trace_path is None:
        trace_path = str(Path(args.output).with_suffix(".trace.csv"))
    lines = ["iteration,aggregate"]
    lines += [f"{i},{value!r}" for i, value in enumerate(trace)]
    Path(trace_path).write_text("\n".join(lines) + "\n")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="hodgeform",
        description="Harmonic cochains, cup products and formality probes "
        "on triangulated closed manifolds.",
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    g = sub.add_parser("generate", help="write a zoo complex to a JSON file")
    g.add_argument("identifier", help="sphere:n | torus:n | surface:g | product:A,B | connsum:A,B | path")
    g.add_argument("-o", "--output", required=True)
    g.set_defaults(fn=cmd_generate)

    a = sub.add_parser("analyze", help="run the analysis pipeline on a complex file")
    a.add_argument("complex")
    a.add_argument("--weights", help="weights JSON file (default: unit weights)")
    a.add_argument("--tolerance", type=float, default=1e-9)
    for stage in _STAGES:
        a.add_argument(f"--{stage}", action="store_true")
    a.add_argument("--all", action="store_true", help="run every stage (default)")
    a.add_argument("-o", "--output", help="report path (default: stdout)")
    a.set_defaults(fn=cmd_analyze)

    c = sub.add_parser("check", help="run obstruction rules on a summary file")
    c.add_argument("summary")
    c.add_argument("-o", "--output", help="report path (default: stdout)")
    c.set_defaults(fn=cmd_check)

    s = sub.add_parser("search", help="search weights minimizing the residual")
    s.add_argument("complex")
    s.add_argument("--weights", help="initial weights file (with --init file)")
    s.add_argument("--init", choices=["unit", "random", "file"], default="unit")
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--max-iterations", type=int, default=20)
    s.add_argument("--improvement-tol", type=float, default=1e-6)
    s.add_argument("--step", type=float, default=0.5)
    s.add_argument("--degrees", help="comma-separated free degrees (default: all)")
    s.add_argument("-o", "--output", required=True, help="best-weights JSON path")
    s.add_argument("--trace", help="CSV trace path (default: <output>.trace.csv)")
    s.set_defaults(fn=cmd_search)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except NumericalError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except (ValueError, OSError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
