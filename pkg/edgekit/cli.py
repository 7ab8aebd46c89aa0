"""Command-line interface: ``edgekit <subcommand> ...``.

Examples:
    $ edgekit edge-hermite --n 100000 --beta 2 --k 1 --samples 10000 --seed 1 --out h.csv
    $ edgekit riccati-cdf --beta 2 --lambda-min -4 --lambda-max 6 --points 41 \\
          --samples 10000 --seed 1 --out r.csv
    $ edgekit tw-reference --beta 2 --lambda-min -4 --lambda-max 6 --points 41 --out f2.csv
    $ edgekit compare --a r.csv --b f2.csv
"""

from __future__ import annotations

import argparse
import logging
import sys
from collections.abc import Sequence

from pydantic import ValidationError

from edgekit.exceptions import EdgekitError
from edgekit.harness import (
    HermiteExperiment,
    LaguerreExperiment,
    PainleveExperiment,
    RiccatiCdfExperiment,
    SaoExperiment,
    TailExperiment,
    compare,
    plot_output,
    run_experiment,
)
from edgekit.riccati import RiccatiConfig

logger = logging.getLogger(__name__)


def _comma_floats(text: str) -> list[float]:
    try:
        return [float(part) for part in text.split(",") if part.strip()]
    except ValueError as e:
        raise argparse.ArgumentTypeError(f"expected a comma-separated list of numbers: {text!r}") from e


def _add_run_args(parser: argparse.ArgumentParser, samples: bool = True) -> None:
    if samples:
        parser.add_argument("--samples", type=int, required=True)
        parser.add_argument("--seed", type=int, required=True)
    parser.add_argument("--out", required=True)


def _add_grid_args(parser: argparse.ArgumentParser, required: bool) -> None:
    parser.add_argument("--lambda-min", type=float, required=required, default=-6.0)
    parser.add_argument("--lambda-max", type=float, required=required, default=8.0)
    parser.add_argument("--points", type=int, required=required, default=141)


def _add_riccati_overrides(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--cap", type=float, default=None, help="restart value P0")
    parser.add_argument("--dt-max", type=float, default=None)
    parser.add_argument("--horizon-margin", type=float, default=None)


def _riccati_config(args: argparse.Namespace) -> RiccatiConfig:
    overrides = {
        "cap": args.cap,
        "dt_max": args.dt_max,
        "horizon_margin": args.horizon_margin,
    }
    return RiccatiConfig(**{k: v for k, v in overrides.items() if v is not None})


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="edgekit",
        description="Soft-edge eigenvalue laws of beta-ensembles by four routes.",
    )
    parser.add_argument("-v", "--verbose", action="store_true", help="debug logging")
    parser.add_argument("-q", "--quiet", action="store_true", help="warnings and errors only")
    parser.add_argument("--threads", type=int, default=None, help="overrides EDGEKIT_THREADS")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("edge-hermite", help="scaled top eigenvalues of the beta-Hermite model")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--beta", type=float, required=True)
    p.add_argument("--k", type=int, required=True)
    _add_run_args(p)

    p = sub.add_parser("edge-laguerre", help="scaled top eigenvalues of the beta-Laguerre model")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--kappa", type=float, required=True)
    p.add_argument("--beta", type=float, required=True)
    p.add_argument("--k", type=int, required=True)
    _add_run_args(p)

    p = sub.add_parser("sao", help="lowest eigenvalues of the discretized stochastic Airy operator")
    p.add_argument("--beta", type=float, required=True)
    p.add_argument("--h", type=float, required=True)
    p.add_argument("--xmax", type=float, required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--split", choices=["diagonal", "hermite"], default="diagonal")
    _add_run_args(p)

    p = sub.add_parser("riccati-cdf", help="Riccati estimate of P(Lambda_j > lambda)")
    p.add_argument("--beta", type=float, required=True)
    _add_grid_args(p, required=True)
    p.add_argument("--index", type=int, default=0, help="eigenvalue index j (default 0)")
    _add_run_args(p)
    _add_riccati_overrides(p)

    p = sub.add_parser("tw-reference", help="Painleve II reference P(Lambda_0 > lambda)")
    p.add_argument("--beta", type=int, choices=[1, 2, 4], required=True)
    _add_grid_args(p, required=True)
    p.add_argument("--table", default=None, help="cached s/u table to read or create")
    _add_run_args(p, samples=False)

    p = sub.add_parser("tails", help="Riccati tail probabilities of TW_beta")
    p.add_argument("--beta", type=float, required=True)
    p.add_argument("--side", choices=["right", "left"], required=True)
    p.add_argument("--a", type=_comma_floats, required=True, help="comma-separated tail points")
    _add_run_args(p)
    _add_riccati_overrides(p)

    p = sub.add_parser("compare", help="KS distance and z-scores of two outputs")
    p.add_argument("--a", required=True)
    p.add_argument("--b", required=True)

    p = sub.add_parser("plot", help="static plot of a CDF or edge-sample output")
    p.add_argument("--in", dest="in_path", required=True)
    p.add_argument("--out", required=True)
    return parser


def _config_from_args(args: argparse.Namespace):
    cmd = args.command
    if cmd == "edge-hermite":
        return HermiteExperiment(
            n=args.n, beta=args.beta, k=args.k, samples=args.samples, seed=args.seed, out=args.out
        )
    if cmd == "edge-laguerre":
        return LaguerreExperiment(
            n=args.n, kappa=args.kappa, beta=args.beta, k=args.k,
            samples=args.samples, seed=args.seed, out=args.out,
        )
    if cmd == "sao":
        return SaoExperiment(
            beta=args.beta, h=args.h, x_max=args.xmax, k=args.k, split=args.split,
            samples=args.samples, seed=args.seed, out=args.out,
        )
    if cmd == "riccati-cdf":
        return RiccatiCdfExperiment(
            beta=args.beta, lambda_min=args.lambda_min, lambda_max=args.lambda_max,
            points=args.points, index=args.index, samples=args.samples, seed=args.seed,
            out=args.out, config=_riccati_config(args),
        )
    if cmd == "tw-reference":
        return PainleveExperiment(
            beta=args.beta, lambda_min=args.lambda_min, lambda_max=args.lambda_max,
            points=args.points, table=args.table, out=args.out,
        )
    return TailExperiment(
        beta=args.beta, side=args.side, a=args.a, samples=args.samples, seed=args.seed,
        out=args.out, config=_riccati_config(args),
    )


def main(argv: Sequence[str] | None = None) -> int:
    """Entry point of the ``edgekit`` console script. Returns the exit code."""
    args = build_parser().parse_args(argv)
    level = logging.DEBUG if args.verbose else logging.WARNING if args.quiet else logging.INFO
    logging.basicConfig(level=level, format="%(asctime)s %(name)s %(levelname)s: %(message)s")

    try:
        if args.command == "compare":
            print(compare(args.a, args.b).format())
        elif args.command == "plot":
            print(plot_output(args.in_path, args.out))
        else:
            result = run_experiment(_config_from_args(args), threads=args.threads)
            for path in result.paths:
                print(path)
    except ValidationError as e:
        logger.error("invalid arguments:\n%s", e)
        return 2
    except EdgekitError as e:
        logger.error("%s", e)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
