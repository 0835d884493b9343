"""Command-line interface.

Subcommands: ``fit`` (one estimation run writing a report directory),
``compare`` (L1 tables across report directories), ``consistency`` (L1 trend
over a sample-size ladder).  Exit codes: 0 success, 1 data error,
2 configuration error, 3 numerical/truncation error.
"""
from __future__ import annotations

import argparse
import sys

from .dpmm import Hyperparams
from .errors import ConfigurationError, DataError, NumericalError
from .experiment import ExperimentConfig, compare, consistency, fit

EXIT_OK = 0
EXIT_DATA = 1
EXIT_CONFIG = 2
EXIT_NUMERICAL = 3


def _parse_lambda_prior(text: str) -> tuple:
    if text.strip().lower() == "improper":
        return 0.0, 0.0
    try:
        a_text, b_text = text.split(",")
        return float(a_text), float(b_text)
    except ValueError:
        raise ConfigurationError(
            f"--lambda-prior takes 'a,b' or 'improper', got {text!r}"
        ) from None


def _parse_bandwidth(text: str):
    if text.strip().lower() == "auto":
        return None
    try:
        return float(text)
    except ValueError:
        raise ConfigurationError(f"--bandwidth takes a number or 'auto', got {text!r}") from None


def _add_fit_options(sub):
    src = sub.add_mutually_exclusive_group()
    src.add_argument("--data", help="CSV file with one positive numeric column")
    src.add_argument("--preset", choices=("gamma1", "mixture2"), help="synthetic data preset")
    sub.add_argument("--n", type=int, help="synthetic sample size (preset default otherwise)")
    sub.add_argument("--seed", type=int, default=0)
    sub.add_argument("--iters", type=int, default=60_000)
    sub.add_argument("--burnin", type=int, default=10_000)
    sub.add_argument("--thin", type=int, default=10)
    sub.add_argument("--c", type=float, default=1.0, help="Dirichlet concentration")
    sub.add_argument("--s", type=float, default=0.5, help="base-measure precision")
    sub.add_argument("--lambda-prior", default="improper", help="'a,b' or 'improper'")
    sub.add_argument("--bandwidth", default="auto", help="kernel bandwidth or 'auto'")
    sub.add_argument("--grid-max", type=float, help="grid upper end (default 1.5 max datum)")
    sub.add_argument("--grid-points", type=int, default=512)
    sub.add_argument("--backend", default="auto", choices=("auto", "compiled", "python"),
                     help="Gibbs kernel backend")


def _config_from_args(args, out_dir=None) -> ExperimentConfig:
    a, b = _parse_lambda_prior(args.lambda_prior)
    hyper = Hyperparams(
        a=a, b=b, s=args.s, c=args.c,
        n_iter=args.iters, burn_in=args.burnin, thin=args.thin, seed=args.seed,
    )
    return ExperimentConfig(
        data_path=args.data,
        preset=args.preset,
        n=args.n,
        hyper=hyper,
        bandwidth=_parse_bandwidth(args.bandwidth),
        grid_max=args.grid_max,
        grid_points=args.grid_points,
        out_dir=out_dir,
        seed=args.seed,
        backend=args.backend,
    )


def _cmd_fit(args) -> int:
    config = _config_from_args(args, out_dir=args.out)
    report = fit(config)
    if not report.valid:
        print(f"run invalid: {report.error}", file=sys.stderr)
        return EXIT_NUMERICAL
    print(f"report written to {args.out}" if args.out else "fit complete (no --out given)")
    print(f"average clusters: {report.average_clusters:.3f}")
    print(f"bandwidth: {report.bandwidth.h:.6g} ({report.bandwidth.method})")
    print(f"debias acceptance rate: {report.trace.acceptance_running[-1]:.3f}")
    return EXIT_OK


def _cmd_compare(args) -> int:
    rows = compare(args.reports, out_path=args.out)
    if args.out is None:
        print("kind,label_a,label_b,method,l1")
        for kind, a, b, method, value in rows:
            print(f"{kind},{a},{b},{method},{value!r}")
    else:
        print(f"comparison written to {args.out}")
    return EXIT_OK


def _cmd_consistency(args) -> int:
    config = _config_from_args(args, out_dir=None)
    ns = tuple(int(x) for x in args.ns.split(","))
    rows = consistency(config, ns=ns, replications=args.replications, out_path=args.out)
    print("n,mean_l1")
    for n, mean_l1, _ in rows:
        print(f"{n},{mean_l1!r}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="lbde",
        description="Density estimation from length-biased samples: "
        "Dirichlet-process mixture fit, Metropolis debiasing, KDE baselines.",
    )
    subs = parser.add_subparsers(dest="command", required=True)

    fit_p = subs.add_parser("fit", help="run one estimation and write a report directory")
    _add_fit_options(fit_p)
    fit_p.add_argument("--out", help="report output directory")
    fit_p.set_defaults(func=_cmd_fit)

    cmp_p = subs.add_parser("compare", help="L1 tables for one or more report directories")
    cmp_p.add_argument("reports", nargs="+", help="report directories from 'fit'")
    cmp_p.add_argument("--out", help="CSV output path (default: stdout)")
    cmp_p.set_defaults(func=_cmd_compare)

    con_p = subs.add_parser("consistency", help="L1 trend over a sample-size ladder")
    _add_fit_options(con_p)
    con_p.add_argument("--ns", default="50,200,800", help="comma-separated ladder sizes")
    con_p.add_argument("--replications", type=int, default=5)
    con_p.add_argument("--out", help="CSV output path")
    con_p.set_defaults(func=_cmd_consistency)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except DataError as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except ConfigurationError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except NumericalError as exc:
        print(f"numerical error: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL


def console_main() -> None:
    raise SystemExit(main())
