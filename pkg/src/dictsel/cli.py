"""Command-line interface.

Subcommands: ``select``, ``synth``, ``phase``, ``subspaces``, ``eval`` and
``check``.  Settings resolve as command-line flag, then ``--config`` file
(``key=value`` lines, keys named like the long flags), then built-in default.

Exit codes: 0 success, 1 numeric failure, 2 usage or I/O error.
"""
from __future__ import annotations

import argparse
import csv
import io
import logging
import sys
from pathlib import Path

import numpy as np

from . import analysis, datagen, phase
from .errors import NumericError, PreconditionError, RefusalError, ShapeError
from .iht import IhtConfig, evaluate_dictionary
from .linop import DctDiracDictionary, DenseDictionary
from .matio import MatrixFormatError, read_matrix, write_matrix
from .solver import SolverConfig, extract_dictionary, select
from .sparsity import ConstraintMode, ModelParams

log = logging.getLogger("dictsel")

EXIT_OK, EXIT_NUMERIC, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


def _float_list(text):
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from exc


def _int_list(text):
    try:
        return [int(v) for v in text.split(",") if v.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from exc


def _mode_list(text):
    try:
        return [ConstraintMode(v.strip()) for v in text.split(",") if v.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from exc


def _tuple4(text):
    vals = _int_list(text)
    if len(vals) != 4:
        raise argparse.ArgumentTypeError(f"expected k,p,n,L, got {text!r}")
    return tuple(vals)


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--config", help="key=value settings file")
    common.add_argument("--out-dir", default=".")
    common.add_argument("-v", "--verbose", action="store_true")

    solver = argparse.ArgumentParser(add_help=False)
    solver.add_argument("--mode", type=ConstraintMode, default=ConstraintMode.KP,
                        choices=list(ConstraintMode), metavar="{kp,k_only,p_only}")
    solver.add_argument("--max-iters", type=int, default=1000)
    solver.add_argument("--rho", type=float, default=0.95)
    solver.add_argument("--beta", type=float, default=0.5)
    solver.add_argument("--epsilon", type=float, default=None,
                        help="stall threshold; default 1e-12 * ||Y||_F^2")
    solver.add_argument("--init", choices=("project", "zero"), default="project")
    solver.add_argument("--tie-break", choices=("low", "random"), default="low")
    solver.add_argument("--row-norm", choices=("l2", "linf"), default="l2",
                        help="rank rows for the p-row budget by energy or by max-abs entry")

    phi_src = argparse.ArgumentParser(add_help=False)
    phi_src.add_argument("--phi", help="mother dictionary matrix file")
    phi_src.add_argument("--dct-dirac", type=int, metavar="Q",
                         help="use the Q-times oversampled DCT + Dirac dictionary")

    parser = argparse.ArgumentParser(prog="dictsel", description=__doc__.split("\n")[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("select", parents=[common, solver, phi_src],
                       help="select a dictionary from exemplar signals")
    p.add_argument("--y", required=True, help="exemplar matrix file (m x L)")
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--p", type=int, required=True)
    p.set_defaults(func=cmd_select)

    p = sub.add_parser("synth", parents=[common], help="write a planted synthetic problem")
    p.add_argument("--m", type=int, default=20)
    p.add_argument("--n", type=int, default=80)
    p.add_argument("--p", type=int, default=30)
    p.add_argument("--k", type=int, default=4)
    p.add_argument("--L", type=int, default=320)
    p.add_argument("--noise-std", type=float, default=0.0)
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("phase", parents=[common, solver], help="phase-transition sweep")
    p.add_argument("--m", type=int, default=20)
    p.add_argument("--n", type=int, default=80)
    p.add_argument("--L", type=int, default=320)
    p.add_argument("--deltas", type=_float_list, default=list(phase.DEFAULT_DELTAS))
    p.add_argument("--rhos", type=_float_list, default=list(phase.DEFAULT_RHOS))
    p.add_argument("--trials", type=int, default=20)
    p.add_argument("--modes", type=_mode_list, default=list(ConstraintMode))
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--gnuplot", action="store_true", help="also write one .gp script per mode")
    p.set_defaults(func=cmd_phase)

    p = sub.add_parser("subspaces", parents=[common], help="subspace-count ratio and bounds")
    p.add_argument("--tuple", dest="tuples", type=_tuple4, action="append", default=[],
                   metavar="k,p,n,L")
    p.add_argument("--n-values", type=_int_list, default=[],
                   help="n sweep at fixed p/n, sparsity ratio and L/n")
    p.add_argument("--delta", type=float, default=0.25, help="p/n in the n sweep")
    p.add_argument("--sparsity-ratio", type=float, default=0.1)
    p.add_argument("--sparsity-base", choices=("p", "m"), default="p",
                   help="k = ratio * p (default) or k = ratio * m")
    p.add_argument("--m", type=int, help="signal dimension for --sparsity-base m")
    p.add_argument("--t", type=float, default=100.0, help="L/n in the n sweep")
    p.set_defaults(func=cmd_subspaces)

    p = sub.add_parser("eval", parents=[common, phi_src], help="IHT evaluation of a dictionary")
    p.add_argument("--dict", help="dictionary matrix file (overrides --phi)")
    p.add_argument("--selected", help="selected.txt restricting --phi to those atoms")
    p.add_argument("--m", type=int, help="signal dimension for --dct-dirac")
    p.add_argument("--y-test", required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--iht-iters", type=int, default=300)
    p.add_argument("--stall-tol", type=float, default=1e-8)
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("check", parents=[common, phi_src], help="well-posedness checks")
    p.add_argument("--m", type=int, help="signal dimension for --dct-dirac")
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--p", type=int, required=True)
    p.add_argument("--cap", type=int, default=analysis.DEFAULT_ENUMERATION_CAP)
    p.set_defaults(func=cmd_check)
    return parser


def read_config(path) -> dict:
    out = {}
    for ln in Path(path).read_text().splitlines():
        ln = ln.strip()
        if not ln or ln.startswith("#"):
            continue
        key, sep, val = ln.partition("=")
        if not sep:
            raise UsageError(f"config line {ln!r} is not key=value")
        out[key.strip().lstrip("-").replace("-", "_")] = val.strip()
    return out


def _prescan(argv):
    """The subcommand and the ``--config`` value, if any, without a full parse."""
    command = argv[0] if argv and not argv[0].startswith("-") else None
    config = None
    for i, tok in enumerate(argv):
        if tok == "--config" and i + 1 < len(argv):
            config = argv[i + 1]
        elif tok.startswith("--config="):
            config = tok.split("=", 1)[1]
    return command, config


def _apply_config(parser, argv):
    """Config values slot in as subcommand defaults, so flags still win."""
    argv = list(sys.argv[1:] if argv is None else argv)
    command, config = _prescan(argv)
    subparsers = parser._subparsers._group_actions[0].choices
    if config and command in subparsers:
        cfg = read_config(config)
        subparser = subparsers[command]
        actions = {a.dest: a for a in subparser._actions}
        defaults = {}
        for key, raw in cfg.items():
            if key not in actions or key in ("config", "func", "command", "help"):
                raise UsageError(f"unknown config key {key!r} for '{command}'")
            act = actions[key]
            if isinstance(act, argparse._StoreTrueAction):
                defaults[key] = raw.lower() in ("1", "true", "yes", "on")
            elif act.type is not None:
                try:
                    defaults[key] = act.type(raw)
                except (ValueError, argparse.ArgumentTypeError) as exc:
                    raise UsageError(f"config key {key!r}: {exc}") from exc
            else:
                defaults[key] = raw
            if act.choices is not None and defaults[key] not in act.choices:
                raise UsageError(f"config key {key!r}: invalid choice {raw!r}")
        for key in defaults:
            actions[key].required = False
        subparser.set_defaults(**defaults)
    return parser.parse_args(argv)


def _out_dir(args) -> Path:
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _load_phi(args, m=None):
    if args.phi:
        return DenseDictionary(read_matrix(args.phi))
    if args.dct_dirac:
        if m is None:
            raise UsageError("--dct-dirac needs the signal dimension (--m or the data file)")
        return DctDiracDictionary(m, args.dct_dirac)
    raise UsageError("give a mother dictionary with --phi FILE or --dct-dirac Q")


def _solver_config(args, k, p) -> SolverConfig:
    return SolverConfig(
        params=ModelParams(k, p),
        rho=args.rho,
        beta=args.beta,
        epsilon=args.epsilon,
        max_iters=args.max_iters,
        mode=args.mode,
        init=args.init,
        row_norm=args.row_norm,
        tie_break=args.tie_break,
        seed=args.seed,
    )


def cmd_select(args) -> int:
    Y = read_matrix(args.y)
    if Y.shape[1] == 0:
        raise UsageError("Y has no columns (L = 0)")
    phi = _load_phi(args, m=Y.shape[0])
    report = select(phi, Y, _solver_config(args, args.k, args.p))
    out = _out_dir(args)
    (out / "selected.txt").write_text("".join(f"{i}\n" for i in report.selected))
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(("iter", "objective"))
    for i, f in enumerate(report.objective_trace):
        w.writerow((i, repr(f)))
    (out / "trace.csv").write_text(buf.getvalue())
    write_matrix(out / "D.txt", extract_dictionary(phi, report))
    print(
        f"selected {len(report.selected)} atoms; stop={report.stop_reason.value} "
        f"iterations={report.iterations_run} objective={report.objective_trace[-1]!r}"
    )
    return EXIT_OK


def cmd_synth(args) -> int:
    prob = datagen.gen_problem(args.m, args.n, args.p, args.k, args.L, args.seed, args.noise_std)
    out = _out_dir(args)
    datagen.write_problem(out, prob)
    print(f"wrote phi.txt, Y.txt, Xtrue.txt, meta.txt to {out}")
    return EXIT_OK


def cmd_phase(args) -> int:
    grid = phase.run_phase(
        args.m, args.n, args.L,
        deltas=args.deltas, rhos=args.rhos, trials=args.trials, seed=args.seed,
        modes=args.modes, jobs=args.jobs,
        rho=args.rho, beta=args.beta, epsilon=args.epsilon, max_iters=args.max_iters,
        init=args.init, row_norm=args.row_norm, tie_break=args.tie_break,
    )
    out = _out_dir(args)
    (out / "phase.csv").write_text(grid.to_csv())
    if args.gnuplot:
        for mode in grid.modes:
            (out / f"phase_{mode.value}.gp").write_text(phase.gnuplot_script("phase.csv", mode.value))
    print(f"wrote {out / 'phase.csv'}")
    return EXIT_OK


def _fmt(v):
    return "" if v is None else repr(float(v))


def cmd_subspaces(args) -> int:
    tuples = list(args.tuples)
    for n in args.n_values:
        p = int(round(args.delta * n))
        if args.sparsity_base == "p":
            k = int(round(args.sparsity_ratio * p))
        else:
            if args.m is None:
                raise UsageError("--sparsity-base m needs --m")
            k = int(round(args.sparsity_ratio * args.m))
        tuples.append((k, p, n, int(round(args.t * n))))
    if not tuples:
        raise UsageError("give --tuple k,p,n,L and/or --n-values")
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(("k", "p", "n", "L", "R_exact", "f", "lower", "upper"))
    for k, p, n, L in tuples:
        try:
            sc = analysis.subspace_reduction(k, p, n, L)
        except PreconditionError as exc:
            raise UsageError(str(exc)) from exc
        w.writerow((k, p, n, L, repr(sc.R_exact), _fmt(sc.f_value),
                    _fmt(sc.lower_bound), _fmt(sc.upper_bound)))
    out = _out_dir(args)
    (out / "subspaces.csv").write_text(buf.getvalue())
    print(f"wrote {len(tuples)} rows to {out / 'subspaces.csv'}")
    return EXIT_OK


def cmd_eval(args) -> int:
    Y = read_matrix(args.y_test)
    if args.dict:
        D = read_matrix(args.dict)
    else:
        phi = _load_phi(args, m=args.m if args.m is not None else Y.shape[0])
        if args.selected:
            idx = [int(v) for v in Path(args.selected).read_text().split()]
            D = phi.columns(idx)
        else:
            D = phi
    res = evaluate_dictionary(D, Y, IhtConfig(args.k, max_iters=args.iht_iters,
                                              stall_tol=args.stall_tol))
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(("signal_index", "residual", "snr_db"))
    for j, (r, s) in enumerate(zip(res.residuals, res.snr_db)):
        w.writerow((j, repr(float(r)), repr(float(s))))
    out = _out_dir(args)
    (out / "eval.csv").write_text(buf.getvalue())
    summary = f"mean_snr_db={res.mean_snr_db!r} signals={len(res.residuals)} excluded={res.n_excluded}"
    (out / "summary.txt").write_text(summary + "\n")
    print(summary)
    return EXIT_OK


def cmd_check(args) -> int:
    phi = _load_phi(args, m=args.m)
    A = phi.materialize()
    params = ModelParams(args.k, args.p)
    lines = [f"m={A.shape[0]}", f"n={A.shape[1]}", f"k={args.k}", f"p={args.p}"]
    bounded = analysis.check_boundedness(A, params, cap=args.cap)
    lines.append(f"boundedness={str(bounded).lower()}")
    try:
        unique = analysis.check_uniqueness_sufficient(A, params, cap=args.cap)
        lines.append(f"uniqueness_sufficient={str(unique).lower()}")
    except PreconditionError as exc:
        lines.append(f"uniqueness_sufficient=na ({exc})")
    text = "\n".join(lines) + "\n"
    (_out_dir(args) / "check.txt").write_text(text)
    sys.stdout.write(text)
    return EXIT_OK


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = _apply_config(parser, argv)
    except (UsageError, OSError) as exc:
        print(f"dictsel: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except SystemExit as exc:  # argparse usage errors and --help
        return int(exc.code or 0)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except (UsageError, ShapeError, PreconditionError, MatrixFormatError, OSError) as exc:
        print(f"dictsel: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (NumericError, RefusalError, FloatingPointError) as exc:
        print(f"dictsel: numeric failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
