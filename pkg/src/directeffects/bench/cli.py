"""Command line entry point: ``directeffects <run|summarize|plot|run-real|gen-data>``.

Exit codes: 0 success, 1 usage or configuration error, 2 data error,
3 internal error.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
import traceback
from pathlib import Path

from ..errors import ConfigurationError, DataError, UsageError
from .config import PRESETS, Cell, ExperimentConfig, desk_scale

EXIT_OK, EXIT_USAGE, EXIT_DATA, EXIT_INTERNAL = 0, 1, 2, 3


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _config(args):
    if args.config and args.preset:
        raise UsageError("give either a config file or --preset, not both")
    if args.config:
        cfg = ExperimentConfig.from_file(args.config)
    elif args.preset:
        cfg = PRESETS[args.preset]()
    else:
        cfg = ExperimentConfig()
    if getattr(args, "desk", False):
        cfg = desk_scale(cfg)
    changes = {}
    if getattr(args, "seed", None) is not None:
        changes["seed"] = args.seed
    if getattr(args, "output", None):
        changes["output"] = args.output
    if getattr(args, "datasets", None):
        changes["datasets"] = args.datasets
    if getattr(args, "replicates", None):
        changes["replicates"] = args.replicates
    if getattr(args, "methods", None):
        changes["methods"] = _methods(args.methods)
    if getattr(args, "hct", False):
        changes["hct"] = True
    return cfg.with_(**changes) if changes else cfg


def _methods(text):
    return tuple(m.strip() for m in text.split(",") if m.strip())


def cmd_run(args):
    from .runner import run

    cfg = _config(args)
    path = run(cfg, workers=args.workers, append=args.append)
    print(path)


def cmd_summarize(args):
    from .runner import summarize

    print(summarize(args.results, args.output))


def cmd_plot(args):
    from .plotting import FigureSpec, plot

    spec = FigureSpec(x=args.x, scoring=args.scoring,
                      methods=_methods(args.methods) if args.methods else None,
                      title=args.title, prefix=args.prefix)
    for p in plot(args.summary, args.output, spec):
        print(p)


def cmd_run_real(args):
    from .runner import run_real

    cfg = _config(args)
    methods = _methods(args.methods) if args.methods is not None else cfg.methods
    out, _ = run_real(args.dataset, methods, cfg, output=args.finds, min_prev=args.min_prev)
    print(out)


def cmd_gen_data(args):
    from .runner import gen_data

    if args.generator == "clustered" and args.k is None:
        raise UsageError("--k is required for the clustered generator")
    cell = Cell(args.generator, args.n, args.p, args.rho,
                args.k if args.generator == "clustered" else None, args.effect)
    cell.generator_config()
    X, truth, _ = gen_data(cell, args.n_causal, args.seed, args.output, with_response=not args.no_response)
    if truth is not None:
        side = Path(str(args.output) + ".truth.json")
        side.write_text(json.dumps({
            "indices": list(truth.indices),
            "labels": [X.labels[j] for j in truth.indices],
            "coefficients": list(truth.coefficients),
            "intercept": truth.intercept,
        }, indent=2) + "\n")
    print(args.output)


def build_parser():
    p = _Parser(prog="directeffects", description="Variable-selection benchmark for binary predictors.")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def config_args(sp):
        sp.add_argument("config", nargs="?", help="INI experiment config")
        sp.add_argument("--preset", choices=sorted(PRESETS), help="built-in paper grid")
        sp.add_argument("--desk", action="store_true", help="shrink to p=100, 20 datasets x 10 replicates")
        sp.add_argument("--seed", type=int)
        sp.add_argument("--output", help="output directory")
        sp.add_argument("--methods", help="comma-separated method list")

    r = sub.add_parser("run", help="run a simulation grid")
    config_args(r)
    r.add_argument("--datasets", type=int)
    r.add_argument("--replicates", type=int)
    r.add_argument("--hct", action="store_true", help="also score with the correlation relaxation")
    r.add_argument("--workers", type=int, help="process pool width (default: config or $DIRECTEFFECTS_WORKERS)")
    r.add_argument("--append", action="store_true", help="append to an existing results table")
    r.set_defaults(func=cmd_run)

    s = sub.add_parser("summarize", help="aggregate a results table")
    s.add_argument("results")
    s.add_argument("-o", "--output")
    s.set_defaults(func=cmd_summarize)

    pl = sub.add_parser("plot", help="four-panel SVG figures from a summary")
    pl.add_argument("summary")
    pl.add_argument("-o", "--output", default="figures")
    pl.add_argument("--x", choices=("rho", "n", "k", "p", "effect"))
    pl.add_argument("--scoring", default="strict", choices=("strict", "hct"))
    pl.add_argument("--methods")
    pl.add_argument("--title")
    pl.add_argument("--prefix", default="figure")
    pl.set_defaults(func=cmd_plot)

    rr = sub.add_parser("run-real", help="run methods once on a dataset file")
    rr.add_argument("dataset")
    config_args(rr)
    rr.add_argument("--finds", help="output CSV (default <output>/finds.csv)")
    rr.add_argument("--min-prev", type=float, default=0.05)
    rr.set_defaults(func=cmd_run_real)

    g = sub.add_parser("gen-data", help="write one simulated dataset")
    g.add_argument("output")
    g.add_argument("--generator", choices=("serial", "clustered"), default="serial")
    g.add_argument("--n", type=int, default=1000)
    g.add_argument("--p", type=int, default=400)
    g.add_argument("--rho", type=float, default=0.0)
    g.add_argument("--k", type=int)
    g.add_argument("--effect", type=float, default=0.81)
    g.add_argument("--n-causal", type=int, default=1)
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--no-response", action="store_true")
    g.set_defaults(func=cmd_gen_data)
    return p


def main(argv=None):
    try:
        args = build_parser().parse_args(argv)
    except UsageError as exc:
        print(f"directeffects: {exc}", file=sys.stderr)
        return EXIT_USAGE
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        args.func(args)
    except (UsageError, ConfigurationError) as exc:
        print(f"directeffects: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (DataError, OSError) as exc:
        print(f"directeffects: {exc}", file=sys.stderr)
        return EXIT_DATA
    except Exception:
        traceback.print_exc()
        return EXIT_INTERNAL
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
