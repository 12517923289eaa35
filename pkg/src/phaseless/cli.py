"""Command-line front end.

Exit codes: 0 success (all checks pass), 1 validation error, 2 numerical
check failure, 3 I/O error.
"""

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import identities, inversion, io, retrieval
from .exceptions import InconsistentDataError, ScatteringError, TruncationError
from .measurement import synthesize_phaseless

EXIT_OK, EXIT_INVALID, EXIT_CHECK, EXIT_IO = 0, 1, 2, 3


class CheckFailed(Exception):
    pass


def cmd_synth(args):
    cfg = io.load_run_config(args.config)
    noise = cfg.noise_level if args.noise is None else args.noise
    seed = cfg.seed if args.seed is None else args.seed
    dataset, phased = synthesize_phaseless(
        cfg.scatterer, cfg.geometry, cfg.k, cfg.grid, noise=noise, seed=seed,
        policy=cfg.policy, return_phased=True,
    )
    io.write_dataset(dataset, args.out, phased if args.debug_phased else None, cfg.policy)
    print(f"wrote {len(dataset.grid)} x {dataset.geometry.n_sources} dataset to {args.out}")


def cmd_check(args):
    cfg = io.load_run_config(args.config)
    results = identities.run_checks(
        cfg.scatterer, cfg.k, cfg.grid, cfg.geometry, which=args.which,
        shift=cfg.extras["check"].get("shift"), policy=cfg.policy,
    )
    for r in results:
        status = "PASS" if r.passed else "FAIL"
        residual = "n/a" if r.residual is None else f"{r.residual:.3e}"
        print(f"{status} {r.name}: residual={residual} threshold={r.threshold:.1e} {r.detail}".rstrip())
    if args.out:
        io.write_json({"checks": [r.as_record() for r in results]}, args.out)
    if not all(r.passed for r in results):
        raise CheckFailed("one or more checks failed")


def cmd_retrieve(args):
    dataset, phased = io.read_dataset(args.dataset)
    if args.truth is not None:
        _, phased = io.read_dataset(args.truth)
        if phased is None:
            raise io.ConfigError(f"{args.truth}: no phased far fields (write with --debug-phased)")
    strict = dataset.noise_level == 0
    pdf = retrieval.phase_difference_field(dataset, strict=strict)
    valid = pdf.cos_delta[pdf.valid_mask]
    report = {
        "strict": strict,
        "triangle_violation": dataset.triangle_violation(),
        "entries": int(pdf.valid_mask.size),
        "valid_entries": int(pdf.valid_mask.sum()),
        "valid_coverage": pdf.coverage,
        "cos_delta_min": float(valid.min()) if valid.size else None,
        "cos_delta_max": float(valid.max()) if valid.size else None,
    }
    if phased is not None and strict:
        res_same, res_conj = retrieval.dichotomy_residuals(dataset, phased)
        report["res_same"] = res_same
        report["res_conj"] = res_conj
    io.write_json(report, args.out)


def cmd_invert(args):
    dataset, _ = io.read_dataset(args.dataset)
    start_text = Path(args.start).read_text()
    try:
        raw = json.loads(start_text)
    except json.JSONDecodeError as exc:
        raise io.ConfigError(f"{args.start}: invalid JSON at line {exc.lineno}: {exc.msg}") from None
    initial = io.parse_scatterer(raw, dataset.k, bool(raw.get("scaled_units", False)), start_text, "")
    options = inversion.MisfitOptions(tuple(raw.get("weights", (1 / 3, 1 / 3, 1 / 3))))
    result = inversion.fit_parameters(dataset, initial, options, budget=args.budget)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    io.write_json(
        {
            "scatterer": io.scatterer_record(result.config),
            "misfit": result.misfit,
            "evaluations": result.evaluations,
            "budget_exhausted": result.budget_exhausted,
        },
        out / "params.json",
    )
    io.write_trace(result.trace, out / "trace.csv")
    print(f"misfit={result.misfit:.3e} after {result.evaluations} evaluations -> {out}")


def cmd_demo_invariance(args):
    cfg = io.load_run_config(args.config)
    demo = cfg.extras["demo"]
    direction = demo.get("direction", np.array([1.0, 0.0, 0.0]))
    shifts = demo.get("shifts", np.linspace(0.0, 0.5, 11) / cfg.k)
    plane = inversion.translation_valley_scan(
        cfg.scatterer, direction, shifts, "plane-only", cfg.k, cfg.geometry, cfg.grid,
        policy=cfg.policy,
    )
    full = inversion.translation_valley_scan(
        cfg.scatterer, direction, shifts, "full-phaseless", cfg.k, cfg.geometry, cfg.grid,
        policy=cfg.policy,
    )
    n = min(len(plane.misfits), len(full.misfits))
    if full.truncated:
        print(f"profile truncated at {n} shifts: geometry collision", file=sys.stderr)
    io.write_profile(shifts[:n], plane.misfits[:n], full.misfits[:n], args.out)


def build_parser():
    p = argparse.ArgumentParser(prog="phaseless", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("synth", help="synthesize the three phaseless datasets")
    s.add_argument("--config", required=True)
    s.add_argument("--out", required=True)
    s.add_argument("--seed", type=int)
    s.add_argument("--noise", type=float)
    s.add_argument("--debug-phased", action="store_true", help="also dump complex far fields")
    s.set_defaults(func=cmd_synth)

    c = sub.add_parser("check", help="run identity checks")
    c.add_argument("--config", required=True)
    c.add_argument(
        "--which", default="all",
        choices=["all", "reciprocity", "mixed", "translation", "optical", "admissible"],
    )
    c.add_argument("--out")
    c.set_defaults(func=cmd_check)

    r = sub.add_parser("retrieve", help="phase-difference report for a dataset")
    r.add_argument("dataset")
    r.add_argument("--truth")
    r.add_argument("--out")
    r.set_defaults(func=cmd_retrieve)

    i = sub.add_parser("invert", help="fit sphere parameters to a dataset")
    i.add_argument("dataset")
    i.add_argument("--start", required=True)
    i.add_argument("--budget", type=int, default=4000)
    i.add_argument("--out", required=True)
    i.set_defaults(func=cmd_invert)

    d = sub.add_parser("demo-invariance", help="misfit along translations, plane vs phaseless")
    d.add_argument("--config", required=True)
    d.add_argument("--out", required=True)
    d.set_defaults(func=cmd_demo_invariance)
    return p


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        args.func(args)
    except CheckFailed as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CHECK
    except (InconsistentDataError, TruncationError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CHECK
    except (ScatteringError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
