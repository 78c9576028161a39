import argparse
import logging
import sys
from pathlib import Path

from .handlers import bench_handlers, data_handlers, design_handlers, export_handlers, run_handlers
from .handlers.common import EXIT_CONFIG, fail
from .runconfig import load_run_config

ORACLE_KINDS = ("analytic_synthetic", "transfer_matrix_synthetic", "fdfd")


def _int_list(text: str) -> list[int]:
    try:
        return [int(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got '{text}'") from None


def _str_list(text: str) -> list[str]:
    return [v.strip() for v in text.split(",") if v.strip()]


def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", type=Path, default=None, help="JSON run config (defaults when omitted)")
    parser.add_argument("--seed", type=int, default=None, help="Override master_seed")
    parser.add_argument("--jobs", type=int, default=1, help="Worker threads for oracle batches (1 = bit-deterministic)")
    parser.add_argument("--out", type=Path, default=None, help="Output file or directory")
    parser.add_argument("--verbose", action="store_true", help="DEBUG logging")


def _add_seed_list(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--seed-list", type=_int_list, default=None, help="Comma-separated seeds, e.g. 1,2,3")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="lensctl", description="Metalens surrogate toolkit")
    subparsers = parser.add_subparsers(dest="command")

    gen = subparsers.add_parser("gen-data", help="Label uniform random points into a dataset CSV")
    _add_common(gen)
    gen.add_argument("--n", type=int, required=True, help="Number of points")
    gen.add_argument("--oracle", choices=ORACLE_KINDS, default=None, help="Override the configured oracle")

    al = subparsers.add_parser("al-run", help="Active-learning run")
    _add_common(al)
    _add_seed_list(al)

    base = subparsers.add_parser("baseline-run", help="Random-sampling run at matched budget")
    _add_common(base)
    _add_seed_list(base)
    base.add_argument("--budgets", type=_int_list, default=None, help="Training-set sizes (default: AL total budget)")

    des = subparsers.add_parser("design", help="Optimize a metasurface with a trained ensemble")
    _add_common(des)
    des.add_argument("--ensemble", type=Path, required=True, help="ensemble.json checkpoint")
    des.add_argument("--iterations", type=int, default=None, help="Override design.iterations")

    val = subparsers.add_parser("validate", help="Solve every cell of a design directly and compare focal lines")
    _add_common(val)
    val.add_argument("--design", type=Path, required=True, help="design.json")
    val.add_argument("--ensemble", type=Path, default=None, help="Surrogate to compare (default: the design's own labels)")

    b = subparsers.add_parser("bench", help="Surrogate vs. oracle wall time per point")
    _add_common(b)
    b.add_argument("--ensemble", type=Path, required=True)
    b.add_argument("--oracle", choices=ORACLE_KINDS, default="fdfd")
    b.add_argument("--n", type=int, default=20)

    exp = subparsers.add_parser("export-plots", help="Plot-ready learning-curve and focal-line tables")
    _add_common(exp)
    exp.add_argument("run_dirs", type=Path, nargs="+", help="Run directories (al, baseline, cheb)")

    cheb = subparsers.add_parser("cheb-run", help="Tensor Chebyshev baseline")
    _add_common(cheb)
    cheb.add_argument("--compare-nn", action="store_true", help="Also train an ensemble on the same number of points")

    cc = subparsers.add_parser("cell-compare", help="Learning curves for the unit-cell presets")
    _add_common(cc)
    _add_seed_list(cc)
    cc.add_argument("--variants", type=_str_list, default=["normal", "small", "smallest"])
    cc.add_argument("--budgets", type=_int_list, default=[500, 1000, 2000])

    hs = subparsers.add_parser("hessian", help="Hessian singular values of the surrogate mean")
    _add_common(hs)
    hs.add_argument("--ensemble", type=Path, required=True)
    hs.add_argument("--wavelength", choices=["blue", "green", "red"], default="green")
    hs.add_argument("--point", choices=["mid", "random"], default="mid")
    hs.add_argument("--h", type=float, default=0.05, help="Finite-difference step in normalized units")

    return parser


def _configure_logging(verbose: bool) -> None:
    logging.basicConfig(
        level=logging.DEBUG if verbose else logging.INFO,
        format="%(asctime)s %(levelname)s %(name)s %(message)s",
    )


def main(argv: list[str] | None = None) -> int:
    argv = argv if argv is not None else sys.argv[1:]
    parser = build_parser()
    args = parser.parse_args(argv)

    if not args.command:
        parser.print_help()
        return EXIT_CONFIG

    _configure_logging(args.verbose)

    if args.command == "export-plots":
        return export_handlers.export_plots(args.run_dirs, args.out)

    try:
        cfg = load_run_config(args.config)
        if args.seed is not None:
            cfg = cfg.with_seed(args.seed)
    except Exception as e:
        return fail(args.command, e)

    # Dispatch
    if args.command == "gen-data":
        return data_handlers.gen_data(cfg, args.n, args.out, jobs=args.jobs, oracle_kind=args.oracle)

    if args.command == "al-run":
        return run_handlers.al_run(cfg, args.out, seed_list=args.seed_list, jobs=args.jobs)

    if args.command == "baseline-run":
        return run_handlers.baseline_run(cfg, args.out, seed_list=args.seed_list, budgets=args.budgets, jobs=args.jobs)

    if args.command == "design":
        return design_handlers.design(cfg, args.ensemble, args.out, iterations=args.iterations)

    if args.command == "validate":
        return design_handlers.validate_design(cfg, args.design, args.out, ensemble_path=args.ensemble, jobs=args.jobs)

    if args.command == "bench":
        return bench_handlers.bench(cfg, args.ensemble, args.out, n=args.n, oracle_kind=args.oracle)

    if args.command == "cheb-run":
        return data_handlers.cheb_run(cfg, args.out, jobs=args.jobs, compare_nn=args.compare_nn)

    if args.command == "cell-compare":
        return run_handlers.cell_compare(
            cfg, args.out, variants=args.variants, budgets=args.budgets, seed_list=args.seed_list, jobs=args.jobs
        )

    if args.command == "hessian":
        return bench_handlers.hessian(cfg, args.ensemble, args.out, wavelength=args.wavelength, point=args.point, h=args.h)

    parser.print_help()
    return EXIT_CONFIG


if __name__ == "__main__":
    raise SystemExit(main())
