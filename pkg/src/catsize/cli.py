"""Command-line front end.

Every subcommand prints a plain table (tab separated, ``#`` comments on top)
and exits 0 on success, 2 on invalid arguments or input, and 3 when a number
distribution is not normalised.
"""

import argparse
import csv
import math
import re
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

import numpy as np

from . import __version__
from .distinguish import CLOSED_FORM, FINITE_N, cat_sizes
from .entropy import DEFAULT_THRESHOLD, disconnectivity, entropy_curve, fock_disconnectivity
from .fit import DEFAULT_SIGMA_MAX, DEFAULT_SIGMA_STEP, DEFAULT_THETA0_STEP, FitGrid, fit_number_distribution
from .quadrature import QuadratureError
from .sequential import ProductBranchPair, simulate_protocol
from .state import SuperpositionSpec

EXIT_USAGE = 2
EXIT_NORMALIZATION = 3
MODE_FLAGS = {"closed": CLOSED_FORM, "finite": FINITE_N}
NORMALIZATION_ATOL = 1e-6


class InputError(ValueError):
    """Bad user input; carries the exit status to use."""

    def __init__(self, message, status=EXIT_USAGE):
        super().__init__(message)
        self.status = status


# -- angles -------------------------------------------------------------------

def parse_angle(text):
    """Radians from ``'0.3'`` (radians) or the suffix form ``'0.05pi'``, ``'-pi'``, ``'0.1*pi'``."""
    s = str(text).strip().lower()
    try:
        if s.endswith("pi"):
            head = s[:-2].rstrip("*").strip()
            factor = 1.0 if head in ("", "+") else -1.0 if head == "-" else float(head)
            value = factor * math.pi
        else:
            value = float(s)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an angle: {text!r} (use radians or e.g. 0.05pi)") from None
    if not math.isfinite(value):
        raise argparse.ArgumentTypeError(f"angle must be finite: {text!r}")
    return value


def format_angle(value):
    """Shortest ``<x>pi`` string that parses back to exactly ``value``; radians otherwise."""
    if value == 0.0:
        return "0pi"
    ratio = value / math.pi
    for digits in range(1, 18):
        head = f"{ratio:.{digits}g}"
        if float(head) * math.pi == value:
            return f"{head}pi"
    return repr(float(value))


def _in_pi(value, digits=6):
    return f"{value / math.pi:.{digits}g}"


def _positive_int(text):
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if v < 1:
        raise argparse.ArgumentTypeError(f"must be >= 1, got {v}")
    return v


def _delta(text):
    try:
        v = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None
    if not 0.0 < v < 0.5:
        raise argparse.ArgumentTypeError(f"delta must lie in (0, 1/2), got {v}")
    return v


def _n_range(text):
    """``'1..50'`` (inclusive), ``'7'`` or ``'1,2,5'``."""
    try:
        if ".." in text:
            lo, hi = text.split("..")
            ns = list(range(int(lo), int(hi) + 1))
        else:
            ns = [int(x) for x in text.split(",")]
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad n range {text!r}; use e.g. 1..50") from None
    if not ns or min(ns) < 1:
        raise argparse.ArgumentTypeError(f"n range must be non-empty and >= 1: {text!r}")
    return ns


def _float_list(text):
    try:
        return [float(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad number list {text!r}") from None


def _int_list(text):
    try:
        return [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad integer list {text!r}") from None


def _resolve_mode(args):
    if args.mode is None:
        return FINITE_N if args.N is not None else CLOSED_FORM
    mode = MODE_FLAGS[args.mode]
    if mode == FINITE_N and args.N is None:
        raise InputError("--mode finite needs --N")
    return mode


def _spec(args):
    # closed-form results do not depend on N; a placeholder keeps the types uniform
    return SuperpositionSpec.from_angles(args.N if args.N is not None else 1, args.theta0, args.sigma)


def _metadata(out, command, argv, extra=()):
    out.write(f"# catsize {__version__} {command}\n")
    out.write(f"# flags: {' '.join(argv)}\n")
    for line in extra:
        out.write(f"# {line}\n")


# -- catsize ------------------------------------------------------------------

def cmd_catsize(args, out):
    mode = _resolve_mode(args)
    results = cat_sizes(_spec(args), args.delta, mode, args.n_max)
    out.write(f"# theta0={format_angle(args.theta0)} sigma={format_angle(args.sigma)} mode={mode}\n")
    out.write("delta\tn_min\tC\trelative_size\n")
    for d in args.delta:
        r = results[d]
        n_min = r.n_min if r.n_min is not None else 0
        c = f"{r.cat_size:.6g}" if args.N is not None else "nan"
        out.write(f"{d:g}\t{n_min}\t{c}\t{r.relative_size:.6g}\n")
    return 0


# -- sweep --------------------------------------------------------------------

def _axis(lo, hi, step, name):
    if step <= 0:
        raise InputError(f"{name} step must be positive")
    if hi < lo:
        raise InputError(f"{name} range is empty: {lo} > {hi}")
    count = int(math.floor((hi - lo) / step + 1e-9)) + 1
    # grid points that are zero up to accumulated rounding are exactly zero
    return [0.0 if abs(v) < 1e-12 else v for v in (lo + i * step for i in range(count))]


def _sweep_cell(job):
    n_particles, theta0, sigma, deltas, mode, n_max = job
    spec = SuperpositionSpec.from_angles(n_particles, theta0, sigma)
    try:
        return cat_sizes(spec, deltas, mode, n_max), None
    except (ValueError, QuadratureError) as exc:
        return None, str(exc)


def cmd_sweep(args, out):
    mode = _resolve_mode(args)
    thetas = _axis(args.theta0_min, args.theta0_max, args.theta0_step, "theta0")
    sigmas = _axis(args.sigma_min, args.sigma_max, args.sigma_step, "sigma")
    for t in thetas:
        if abs(t) > 0.5 * math.pi + 1e-12:
            raise InputError(f"theta0 grid leaves [-pi/2, pi/2]: {t}")
    for s in sigmas:
        if s < 0 or s > 0.5 * math.pi + 1e-12:
            raise InputError(f"sigma grid leaves [0, pi/2]: {s}")

    output = Path(args.output)
    trace_path = output.with_name(output.stem + ".traces.tsv")
    n_particles = args.N if args.N is not None else 1
    jobs = [(n_particles, t, s, tuple(args.delta), mode, args.n_max) for t in thetas for s in sigmas]
    if args.jobs > 1:
        with ProcessPoolExecutor(max_workers=args.jobs) as pool:
            cells = list(pool.map(_sweep_cell, jobs, chunksize=4))
    else:
        cells = [_sweep_cell(j) for j in jobs]

    try:
        with open(output, "w", encoding="utf-8", newline="\n") as fh, \
                open(trace_path, "w", encoding="utf-8", newline="\n") as th:
            _metadata(fh, "sweep", args.argv, [
                f"grid: theta0 {_in_pi(args.theta0_min)}..{_in_pi(args.theta0_max)} step {_in_pi(args.theta0_step)} (pi); "
                f"sigma {_in_pi(args.sigma_min)}..{_in_pi(args.sigma_max)} step {_in_pi(args.sigma_step)} (pi)",
                f"mode={mode} n_max={args.n_max if args.n_max is not None else 'default'} N={args.N}",
                "angles in units of pi; undefined n_min is written as 0",
            ])
            fh.write("theta0\tsigma\tdelta\tn_min\trelative_size\ttrace\n")
            th.write("# P_E traces for " + output.name + "\n")
            th.write("cell\tn\tP_E\n")
            for cell, ((_, t, s, *_rest), (res, err)) in enumerate(zip(jobs, cells)):
                ref = f"{trace_path.name}#{cell}"
                if err is not None:
                    for d in args.delta:
                        fh.write(f"{_in_pi(t)}\t{_in_pi(s)}\t{d:g}\tnan\tnan\terror: {err}\n")
                    continue
                longest = max(res.values(), key=lambda r: len(r.probability_trace))
                for n, p_e in longest.error_trace:
                    th.write(f"{cell}\t{n}\t{p_e:.17g}\n")
                for d in args.delta:
                    r = res[d]
                    n_min = r.n_min if r.n_min is not None else 0
                    fh.write(f"{_in_pi(t)}\t{_in_pi(s)}\t{d:g}\t{n_min}\t{r.relative_size:.6g}\t{ref}\n")
    except OSError as exc:
        raise InputError(f"cannot write {exc.filename}: {exc.strerror}") from None
    out.write(f"wrote {len(jobs)} cells to {output} (traces in {trace_path})\n")
    return 0


# -- fit ----------------------------------------------------------------------

def read_distribution_csv(path):
    """Parse an ``n,probability`` CSV into a probability array.

    Raises :class:`InputError` with status 2 and the offending line number for
    malformed input; normalisation is checked by the caller.
    """
    try:
        with open(path, encoding="utf-8", newline="") as fh:
            rows = list(csv.reader(fh))
    except (OSError, UnicodeDecodeError) as exc:
        raise InputError(f"cannot read {path}: {exc}") from None
    if not rows:
        raise InputError(f"{path}: line 1: empty file, expected header 'n,probability'")
    if rows[0] != ["n", "probability"]:
        raise InputError(f"{path}: line 1: header must be exactly 'n,probability'")
    probs = []
    for lineno, row in enumerate(rows[1:], start=2):
        if not row:
            raise InputError(f"{path}: line {lineno}: blank line")
        if len(row) != 2:
            raise InputError(f"{path}: line {lineno}: expected 2 fields, got {len(row)}")
        try:
            n = int(row[0])
            p = float(row[1])
        except ValueError:
            raise InputError(f"{path}: line {lineno}: cannot parse {','.join(row)!r}") from None
        if n != len(probs):
            raise InputError(f"{path}: line {lineno}: expected n={len(probs)}, got {n}")
        if not math.isfinite(p) or p < 0:
            raise InputError(f"{path}: line {lineno}: probability must be finite and >= 0")
        probs.append(p)
    if not probs:
        raise InputError(f"{path}: line 2: no data rows")
    return np.array(probs)


def cmd_fit(args, out):
    probs = read_distribution_csv(args.input)
    n_particles = len(probs) - 1
    if args.N is not None and args.N != n_particles:
        raise InputError(f"--N {args.N} does not match {len(probs)} rows (N={n_particles})")
    total = float(probs.sum())
    if abs(total - 1.0) > NORMALIZATION_ATOL:
        raise InputError(f"probabilities sum to {total!r}, not 1 within {NORMALIZATION_ATOL:g}", EXIT_NORMALIZATION)
    if n_particles < 1:
        raise InputError("need at least two rows (N >= 1)")
    grid = FitGrid(args.theta0_step, args.sigma_step, args.sigma_max)
    mode = MODE_FLAGS[args.mode or "finite"]
    res = fit_number_distribution(probs, n_particles, grid, tuple(args.delta), mode)
    out.write(f"# N={n_particles} grid: theta0 step {_in_pi(grid.theta0_step)}pi, "
              f"sigma step {_in_pi(grid.sigma_step)}pi, sigma max {_in_pi(grid.sigma_max)}pi\n")
    out.write("theta0/pi\tsigma/pi\tresidual\n")
    out.write(f"{_in_pi(res.theta0)}\t{_in_pi(res.sigma)}\t{res.residual:.6g}\n")
    if args.delta:
        out.write("delta\tC\n")
        for d in args.delta:
            out.write(f"{d:g}\t{res.cat_sizes[d]:.6g}\n")
    return 0


# -- entropy / disconnectivity ------------------------------------------------

def cmd_entropy(args, out):
    mode = _resolve_mode(args)
    if mode == FINITE_N and max(args.n) > args.N:
        raise InputError(f"n range exceeds N={args.N}")
    source = _spec(args) if mode == FINITE_N else _spec(args).spread
    curve = entropy_curve(source, args.n, mode)
    out.write(f"# theta0={format_angle(args.theta0)} sigma={format_angle(args.sigma)} mode={mode} (nats)\n")
    out.write("n\tS_n\n")
    for n, s in curve.values:
        out.write(f"{n}\t{s:.12f}\n")
    return 0


def cmd_disconnectivity(args, out):
    if args.fock is not None:
        result = fock_disconnectivity(args.fock, args.threshold)
        label = f"fock={','.join(map(str, args.fock))}"
    else:
        if args.N is None or args.theta0 is None or args.sigma is None:
            raise InputError("give --fock, or all of --N, --theta0, --sigma")
        spec = SuperpositionSpec.from_angles(args.N, args.theta0, args.sigma)
        result = disconnectivity(entropy_curve(spec, range(1, args.N + 1), FINITE_N), args.threshold)
        label = f"N={args.N} theta0={format_angle(args.theta0)} sigma={format_angle(args.sigma)}"
    out.write(f"# {label} threshold={args.threshold:g}\n")
    out.write("n\tbeta_n\n")
    for n, b in result.betas:
        out.write(f"{n}\t{b:.12f}\n")
    out.write(f"D\t{result.d_value}\n")
    return 0


# -- seqsim -------------------------------------------------------------------

def cmd_seqsim(args, out):
    branches = ProductBranchPair(tuple(args.overlaps), args.prior_a)
    true_branch = None if args.true_branch == "random" else args.true_branch
    r = simulate_protocol(branches, true_branch, args.seed, args.trials)
    out.write(f"# overlaps={','.join(f'{c:g}' for c in branches.overlaps)} prior_a={branches.prior_a:g} "
              f"true_branch={args.true_branch} seed={args.seed}\n")
    out.write("analytic_P\tempirical_rate\tstd_error\tz\ttrials\n")
    out.write(f"{r.analytic:.12f}\t{r.rate:.12f}\t{r.standard_error:.3e}\t{r.z_score:.3f}\t{r.trials}\n")
    return 0


# -- parser -------------------------------------------------------------------

def _add_state_flags(p, required=True):
    p.add_argument("--N", type=_positive_int, help="total particle number")
    p.add_argument("--theta0", type=parse_angle, required=required, help="centre angle (radians or <x>pi)")
    p.add_argument("--sigma", type=parse_angle, required=required, help="width (radians or <x>pi)")
    p.add_argument("--mode", choices=sorted(MODE_FLAGS), help="RDM family (default: finite if --N is given)")


def build_parser():
    parser = argparse.ArgumentParser(prog="catsize", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"catsize {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("catsize", help="n_min and C_delta for one state")
    _add_state_flags(p)
    p.add_argument("--delta", type=_delta, action="append", required=True, help="precision (repeatable)")
    p.add_argument("--n-max", type=_positive_int, help="scan limit (default 100 closed, N finite)")
    p.set_defaults(func=cmd_catsize)

    p = sub.add_parser("sweep", help="relative cat size over a (theta0, sigma) grid, as TSV")
    for axis, lo, hi, step in (("theta0", "-0.25pi", "0.25pi", "0.025pi"), ("sigma", "0", "0.25pi", "0.025pi")):
        p.add_argument(f"--{axis}-min", type=parse_angle, default=parse_angle(lo))
        p.add_argument(f"--{axis}-max", type=parse_angle, default=parse_angle(hi))
        p.add_argument(f"--{axis}-step", type=parse_angle, default=parse_angle(step))
    p.add_argument("--N", type=_positive_int)
    p.add_argument("--mode", choices=sorted(MODE_FLAGS))
    p.add_argument("--delta", type=_delta, action="append", required=True)
    p.add_argument("--n-max", type=_positive_int)
    p.add_argument("--jobs", type=_positive_int, default=1, help="worker processes")
    p.add_argument("--output", "-o", required=True, help="TSV path; traces go to <stem>.traces.tsv")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("fit", help="fit theta0, sigma to an n,probability CSV")
    p.add_argument("input")
    p.add_argument("--N", type=_positive_int)
    p.add_argument("--theta0-step", type=parse_angle, default=DEFAULT_THETA0_STEP)
    p.add_argument("--sigma-step", type=parse_angle, default=DEFAULT_SIGMA_STEP)
    p.add_argument("--sigma-max", type=parse_angle, default=DEFAULT_SIGMA_MAX)
    p.add_argument("--delta", type=_delta, action="append", default=[])
    p.add_argument("--mode", choices=sorted(MODE_FLAGS), help="RDM family for C_delta (default finite)")
    p.set_defaults(func=cmd_fit)

    p = sub.add_parser("entropy", help="von Neumann entropies S_n")
    _add_state_flags(p)
    p.add_argument("--n", type=_n_range, required=True, help="e.g. 1..50")
    p.set_defaults(func=cmd_entropy)

    p = sub.add_parser("disconnectivity", help="beta_n and D for a Fock state or a two-branch state")
    p.add_argument("--fock", type=_int_list, help="occupations, e.g. 3,2")
    p.add_argument("--N", type=_positive_int)
    p.add_argument("--theta0", type=parse_angle)
    p.add_argument("--sigma", type=parse_angle)
    p.add_argument("--threshold", type=float, default=DEFAULT_THRESHOLD)
    p.set_defaults(func=cmd_disconnectivity)

    p = sub.add_parser("seqsim", help="Monte Carlo of the sequential single-particle protocol")
    p.add_argument("--overlaps", type=_float_list, required=True, help="comma list of c_k")
    p.add_argument("--prior-a", type=float, default=0.5)
    p.add_argument("--trials", type=_positive_int, default=100_000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--true-branch", choices=("A", "B", "random"), default="random")
    p.set_defaults(func=cmd_seqsim)
    return parser


_NEGATIVE_PI = re.compile(r"^-[0-9.]*(e[-+]?[0-9]+)?\*?pi$", re.IGNORECASE)


def _attach_negative_angles(argv):
    """Join ``--flag -0.25pi`` into ``--flag=-0.25pi`` so argparse does not read an option."""
    out = []
    for tok in argv:
        if out and out[-1].startswith("--") and "=" not in out[-1] and _NEGATIVE_PI.match(tok):
            out[-1] = f"{out[-1]}={tok}"
        else:
            out.append(tok)
    return out


def main(argv=None, out=None):
    argv = list(sys.argv[1:] if argv is None else argv)
    out = out or sys.stdout
    parser = build_parser()
    args = parser.parse_args(_attach_negative_angles(argv))
    args.argv = argv
    try:
        return args.func(args, out)
    except InputError as exc:
        print(f"catsize {args.command}: error: {exc}", file=sys.stderr)
        return exc.status
    except (ValueError, TypeError) as exc:
        print(f"catsize {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except QuadratureError as exc:
        print(f"catsize {args.command}: quadrature failed: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
