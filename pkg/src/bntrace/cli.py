"""Command-line interface.

Exit codes: 0 success, 2 validation/usage error, 3 runtime failure.  Report
paths write the delimited curve files and render a PNG figure alongside
(suppress with --no-figure).
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from . import theory
from .attack import (
    empirical_roc,
    fit_population_model,
    lr_statistics,
    write_curve_dat,
)
from .bn import complexity, load_model, save_model
from .dataset import load_csv, write_csv, write_schema
from .errors import ValidationError
from .experiment import parse_config_file, run_experiment, write_report_files
from .learn import (
    PriorSpec,
    StructureSearchConfig,
    learn_parameters,
    learn_structure,
    min_support_filter,
    synthesize,
)


def _figure_path(out: str) -> Path:
    return Path(out).with_suffix(".png")


def _cmd_complexity(args) -> int:
    model = load_model(args.model)
    print(complexity(model.structure))
    return 0


def _cmd_bound(args) -> int:
    curve = theory.bound_curve(args.complexity, args.pool_size, gdp_mu=args.gdp_mu)
    print(f"complexity: {curve.complexity:g}")
    print(f"pool_size: {curve.pool_size}")
    if args.gdp_mu is not None:
        print(f"gdp_mu: {args.gdp_mu:g}")
    print(f"theoretical AUC: {curve.auc:.6f}")
    if args.out:
        comments = [
            "theoretical power bound",
            f"complexity={curve.complexity:g} pool_size={curve.pool_size}"
            + (f" gdp_mu={args.gdp_mu:g}" if args.gdp_mu is not None else ""),
            f"auc={curve.auc:.6f}",
        ]
        write_curve_dat(curve.alphas, curve.betas, args.out, comments=comments)
        print(f"wrote {args.out}")
        if not args.no_figure:
            from .plots import save_power_plot

            figure = save_power_plot(
                _figure_path(args.out),
                [(curve.alphas, curve.betas, "theoretical bound")],
                title=f"power bound, C={curve.complexity:g}, n={curve.pool_size}",
            )
            print(f"wrote {figure}")
    return 0


def _cmd_learn(args) -> int:
    data = load_csv(args.data, schema_path=args.schema)
    structure = learn_structure(data, StructureSearchConfig(eta=args.eta))
    network = learn_parameters(data, structure, PriorSpec(pseudo_count=args.prior))
    save_model(network, args.out)
    flagged = min_support_filter(network, args.min_support)
    print(f"nodes: {structure.node_count}  edges: {structure.edge_count}")
    print(f"complexity: {complexity(structure)}")
    print(f"wrote {args.out}")
    if flagged:
        print(
            f"warning: {len(flagged)} CPT rows have support below {args.min_support}",
            file=sys.stderr,
        )
    return 0


def _cmd_synthesize(args) -> int:
    data = load_csv(args.data, schema_path=args.schema)
    synthetic = synthesize(
        data, args.eta, args.count, args.seed, PriorSpec(pseudo_count=args.prior)
    )
    write_csv(synthetic, args.out)
    write_schema(synthetic, str(args.out) + ".schema")
    print(f"wrote {args.count} synthetic records to {args.out}")
    return 0


def _cmd_attack(args) -> int:
    released = load_model(args.released)
    pool = load_csv(args.pool)
    reference = load_csv(args.reference)
    nonmembers = load_csv(args.nonmembers)
    prior = PriorSpec(pseudo_count=args.prior)
    population_model = fit_population_model(reference, released.structure, prior)
    member_stats = lr_statistics(population_model, released, pool)
    nonmember_stats = lr_statistics(population_model, released, nonmembers)
    curve = empirical_roc(member_stats, nonmember_stats)
    print(f"members: {pool.row_count}  non-members: {nonmembers.row_count}")
    print(f"empirical AUC: {curve.auc:.6f}")
    if args.out:
        write_curve_dat(
            curve.alphas,
            curve.betas,
            args.out,
            comments=[
                "empirical tracing ROC (error vs power)",
                f"members={pool.row_count} nonmembers={nonmembers.row_count}",
                f"auc={curve.auc:.6f}",
            ],
        )
        print(f"wrote {args.out}")
        if not args.no_figure:
            from .plots import save_roc_plot

            bound = theory.bound_curve(
                complexity(released.structure), pool.row_count
            )
            figure = save_roc_plot(
                _figure_path(args.out), curve, bound=bound, title="tracing attack ROC"
            )
            print(f"wrote {figure}")
    return 0


def _cmd_experiment(args) -> int:
    config = parse_config_file(args.config)
    report = run_experiment(config)
    out_dir = args.out_dir or (Path(args.config).stem + "_out")
    written = write_report_files(report, out_dir, figures=not args.no_figure)
    print(f"mean empirical AUC: {report.mean_auc:.6f}")
    print(f"theoretical AUC:    {report.theory_auc:.6f}")
    print(f"mean complexity:    {report.complexity:.1f}")
    for path in written:
        print(f"wrote {path}")
    return 0


def _cmd_nb_variance(args) -> int:
    value = theory.naive_bayes_variance(args.attributes, args.pool_size, args.p1)
    print(f"{value:.9f}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="bntrace",
        description=(
            "Quantify how much a released Bayesian network leaks about the "
            "records it was learned from."
        ),
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("complexity", help="print the released-parameter count of a model")
    p.add_argument("--model", required=True, help="model JSON path")
    p.set_defaults(func=_cmd_complexity)

    p = sub.add_parser("bound", help="closed-form power bound and AUC")
    p.add_argument("--complexity", type=float, required=True)
    p.add_argument("--pool-size", type=int, required=True)
    p.add_argument("--gdp-mu", type=float, default=None)
    p.add_argument("--out", default=None, help="write the curve to this .dat file")
    p.add_argument("--no-figure", action="store_true", help="skip the PNG next to --out")
    p.set_defaults(func=_cmd_bound)

    p = sub.add_parser("learn", help="learn structure and parameters from a CSV")
    p.add_argument("--data", required=True)
    p.add_argument("--eta", type=int, required=True, help="max parents per node")
    p.add_argument("--prior", type=float, default=1.0, help="Dirichlet pseudo-count")
    p.add_argument("--schema", default=None, help="explicit cardinality sidecar")
    p.add_argument("--min-support", type=int, default=50)
    p.add_argument("--out", required=True, help="model JSON output path")
    p.set_defaults(func=_cmd_learn)

    p = sub.add_parser("synthesize", help="posterior-sampled synthetic records")
    p.add_argument("--data", required=True)
    p.add_argument("--eta", type=int, required=True)
    p.add_argument("--count", type=int, required=True)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--prior", type=float, default=1.0)
    p.add_argument("--schema", default=None)
    p.add_argument("--out", required=True, help="synthetic CSV output path")
    p.set_defaults(func=_cmd_synthesize)

    p = sub.add_parser("attack", help="trace members of a released model's pool")
    p.add_argument("--released", required=True, help="released model JSON")
    p.add_argument("--pool", required=True, help="candidate member records CSV")
    p.add_argument("--reference", required=True, help="population sample CSV")
    p.add_argument("--nonmembers", required=True, help="held-out non-member CSV")
    p.add_argument("--prior", type=float, default=1.0)
    p.add_argument("--out", default=None, help="write the ROC to this .dat file")
    p.add_argument("--no-figure", action="store_true", help="skip the PNG next to --out")
    p.set_defaults(func=_cmd_attack)

    p = sub.add_parser("experiment", help="multi-split protocol from a config file")
    p.add_argument("--config", required=True, help="flat key=value config path")
    p.add_argument("--out-dir", default=None, help="report directory (default <config>_out)")
    p.add_argument("--no-figure", action="store_true", help="skip PNG rendering")
    p.set_defaults(func=_cmd_experiment)

    p = sub.add_parser("nb-variance", help="exact statistic variance, star-shaped model")
    p.add_argument("--attributes", type=int, required=True)
    p.add_argument("--pool-size", type=int, required=True)
    p.add_argument("--p1", type=float, required=True)
    p.set_defaults(func=_cmd_nb_variance)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ValidationError, FileNotFoundError, IsADirectoryError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:  # runtime failure
        print(f"failure: {exc}", file=sys.stderr)
        return 3


def entrypoint() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entrypoint()
