"""Command-line front end.

Input files (format version 1) are line-oriented::

    format: 1
    # comments and blank lines are ignored
    moments: 1 2 5 14
    atom 1 0.5
    atom 3 0.5

Each ``moments:`` line is one moment-sequence record. A run of ``atom``
lines is one atomic-measure record, closed by a blank line or any other
record. The CSV written by the moment-producing subcommands is accepted
back as input (one record per file), so commands can be chained.

Every output starts with ``format: 1`` followed by a CSV table with a
header row. Numbers are printed with 17 significant digits.

Exit status: 0 on success, 1 on a domain or solver error (or a failed
``validate`` check), 2 on malformed input or bad usage.
"""

from __future__ import annotations

import argparse
import io
import sys
from typing import Sequence

from freeprob import estimators, freeconv, rmtsim
from freeprob.core import AtomicMeasure, MomentSequence
from freeprob.errors import (
    ConvergenceError,
    DomainError,
    FreeProbError,
    ResourceError,
    SolverError,
)
from freeprob.transforms import dozier_silverstein_mw, stieltjes_moments

FORMAT_VERSION = "1"

EXIT_OK, EXIT_ERROR, EXIT_MALFORMED = 0, 1, 2


class MalformedInput(Exception):
    pass


def fmt(x) -> str:
    return format(float(x), ".17g")


# --- parsing --------------------------------------------------------------


def _float(tok: str, where: str) -> float:
    try:
        return float(tok)
    except ValueError:
        raise MalformedInput(f"{where}: not a number: {tok!r}") from None


def parse_records(text: str, source: str = "<input>") -> list:
    """Parse one version-1 input file into a list of records."""
    lines = text.splitlines()
    body = [(i + 1, ln.strip()) for i, ln in enumerate(lines)]
    content = [(i, ln) for i, ln in body if ln and not ln.startswith("#")]
    if not content:
        raise MalformedInput(f"{source}: empty input")
    i0, first = content[0]
    key, _, val = first.partition(":")
    if key.strip() != "format" or val.strip() != FORMAT_VERSION:
        raise MalformedInput(f"{source}:{i0}: expected 'format: {FORMAT_VERSION}' header, got {first!r}")

    records: list = []
    atoms: list[tuple[float, float]] = []
    csv_rows: list[float] | None = None

    def close_atoms():
        if atoms:
            try:
                records.append(AtomicMeasure(tuple(atoms)))
            except DomainError as e:
                raise MalformedInput(f"{source}: invalid atomic measure: {e}") from None
            atoms.clear()

    start = body.index((i0, first)) + 1
    for lineno, ln in body[start:]:
        where = f"{source}:{lineno}"
        if not ln:
            close_atoms()
            continue
        if ln.startswith("#"):
            continue
        if csv_rows is not None:
            cells = ln.split(",")
            if len(cells) < 2:
                raise MalformedInput(f"{where}: short CSV row {ln!r}")
            k = _float(cells[0], where)
            if k != len(csv_rows) + 1:
                raise MalformedInput(f"{where}: CSV rows must list k = 1, 2, ... in order")
            csv_rows.append(_float(cells[1], where))
            continue
        if ln.startswith("moments:"):
            close_atoms()
            toks = ln[len("moments:"):].split()
            if not toks:
                raise MalformedInput(f"{where}: empty moment record")
            records.append(MomentSequence([_float(t, where) for t in toks]))
        elif ln.split()[0] == "atom":
            toks = ln.split()
            if len(toks) != 3:
                raise MalformedInput(f"{where}: expected 'atom <position> <weight>'")
            atoms.append((_float(toks[1], where), _float(toks[2], where)))
        elif ln.replace(" ", "").startswith("k,m_k"):
            close_atoms()
            if records:
                raise MalformedInput(f"{where}: CSV table must be the only record in a file")
            csv_rows = []
        else:
            raise MalformedInput(f"{where}: unrecognized line {ln!r}")
    close_atoms()
    if csv_rows is not None:
        if not csv_rows:
            raise MalformedInput(f"{source}: CSV table has no rows")
        records.append(MomentSequence(csv_rows))
    if not records:
        raise MalformedInput(f"{source}: no records")
    return records


def read_records(paths: Sequence[str] | None) -> list:
    if not paths:
        return parse_records(sys.stdin.read(), "<stdin>")
    records = []
    for path in paths:
        if path == "-":
            records.extend(parse_records(sys.stdin.read(), "<stdin>"))
            continue
        try:
            with open(path, encoding="utf-8") as fh:
                text = fh.read()
        except OSError as e:
            raise MalformedInput(f"cannot read {path}: {e.strerror}") from None
        records.extend(parse_records(text, path))
    return records


def as_moments(rec, order: int | None) -> MomentSequence:
    if isinstance(rec, AtomicMeasure):
        if order is None:
            raise MalformedInput("an atomic-measure input needs --order")
        return rec.moments(order)
    if order is not None:
        if order > rec.order:
            raise MalformedInput(f"--order {order} exceeds the {rec.order} moments supplied")
        return rec.truncate(order)
    return rec


def _operands(args, count: int) -> list[MomentSequence]:
    recs = read_records(args.input)
    if len(recs) != count:
        raise MalformedInput(f"{args.command} needs {count} input record(s), got {len(recs)}")
    ms = [as_moments(r, args.order) for r in recs]
    if args.order is None and count > 1:
        k = min(m.order for m in ms)
        ms = [m.truncate(k) for m in ms]
    return ms


def _atomic(args) -> AtomicMeasure:
    recs = read_records(args.input)
    if len(recs) != 1 or not isinstance(recs[0], AtomicMeasure):
        raise MalformedInput(f"{args.command} needs exactly one atomic-measure record")
    return recs[0]


# --- output ---------------------------------------------------------------


def write_table(out, header: Sequence[str], rows) -> None:
    out.write(f"format: {FORMAT_VERSION}\n")
    out.write(",".join(header) + "\n")
    for row in rows:
        out.write(",".join(c if isinstance(c, str) else fmt(c) for c in row) + "\n")


def moment_rows(m: MomentSequence):
    return [(str(k), v) for k, v in enumerate(m, start=1)]


# --- subcommands ----------------------------------------------------------


def cmd_binary(args, out):
    a, b = _operands(args, 2)
    op = {
        "conv-add": freeconv.add_conv,
        "deconv-add": freeconv.add_deconv,
        "conv-mult": freeconv.mult_conv,
        "deconv-mult": freeconv.mult_deconv,
    }[args.command]
    write_table(out, ("k", "m_k"), moment_rows(op(a, b)))
    return EXIT_OK


def cmd_mp(args, out):
    (a,) = _operands(args, 1)
    op = freeconv.mp_conv if args.command == "mp-conv" else freeconv.mp_deconv
    write_table(out, ("k", "m_k"), moment_rows(op(a, args.c)))
    return EXIT_OK


def cmd_info_noise(args, out):
    (a,) = _operands(args, 1)
    p = estimators.InfoNoiseParams(args.c, args.sigma2, a.order)
    op = estimators.info_noise_forward if args.command == "info-noise" else estimators.info_noise_inverse
    write_table(out, ("k", "m_k"), moment_rows(op(a, p)))
    return EXIT_OK


def cmd_g2(args, out):
    recs = read_records(args.input)
    if len(recs) != 1:
        raise MalformedInput("g2 needs exactly one input record")
    rec = recs[0]
    route = args.route
    if route == "auto":
        route = "fixed-point" if isinstance(rec, AtomicMeasure) else "moment"
    rows = []
    for z in args.z:
        if route == "fixed-point":
            if not isinstance(rec, AtomicMeasure):
                raise MalformedInput("the fixed-point route needs an atomic-measure input")
            rows.append((z, estimators.g2_fixed_point(rec, args.c, z)))
        else:
            if args.support_bound is None:
                raise MalformedInput("the moment route needs --support-bound")
            m = as_moments(rec, args.order)
            rows.append((z, estimators.g2_moment_route(m, args.c, z, args.support_bound)))
    write_table(out, ("z", "g2"), rows)
    return EXIT_OK


def cmd_simulate(args, out):
    gamma = _atomic(args)
    spec = rmtsim.EnsembleSpec(
        n=args.n[0], N=args.N, sigma2=args.sigma2, gamma_spectrum=gamma, seed=args.seed,
        reps=args.reps, order=args.order or 6, rotate=args.rotate, noise=args.noise,
    )
    est = rmtsim.simulate_info_noise(spec, workers=args.workers)
    rows = [(str(k), m, s) for k, (m, s) in enumerate(zip(est.mean, est.stderr), start=1)]
    write_table(out, ("k", "m_k", "stderr"), rows)
    return EXIT_OK


def cmd_mixed_decay(args, out):
    gamma = _atomic(args)
    n0 = args.n[0]
    template = rmtsim.EnsembleSpec(
        n=n0, N=max(1, round(n0 / args.c)), sigma2=0.0, gamma_spectrum=gamma,
        seed=args.seed, reps=args.reps,
    )
    pattern = rmtsim.IDENTICAL_PATTERN if args.control else rmtsim.ALTERNATING_PATTERN
    rows = [(str(n), v) for n, v in rmtsim.mixed_moment_decay(args.n, template, pattern)]
    write_table(out, ("n", "value"), rows)
    return EXIT_OK


SERIES_TOL = 1e-9


def cmd_validate(args, out):
    """Cross-route checks on an atomic signal spectrum.

    The information-plus-noise moments pushed through the Stieltjes series
    are compared with the fixed-point solver, and the two G2 routes are
    compared with each other. Series truncation is held to ``SERIES_TOL``.
    """
    gamma = _atomic(args)
    K = args.order or 40
    p = estimators.InfoNoiseParams(args.c, args.sigma2, K)
    w = estimators.info_noise_forward(gamma.moments(K), p)
    edge = estimators.info_noise_support_edge(gamma, args.c, args.sigma2)
    rows, ok = [], True
    for z in args.z:
        a = stieltjes_moments(w, z, edge, tol=SERIES_TOL).real
        b = dozier_silverstein_mw(gamma, args.c, args.sigma2, z).real
        passed = abs(a - b) <= args.tol_noise
        ok &= passed
        rows.append(("info-noise", z, a, b, abs(a - b), "pass" if passed else "FAIL"))
    bound = args.support_bound if args.support_bound is not None else gamma.support_bound()
    for z in args.z:
        a = estimators.g2_moment_route(gamma.moments(K), args.c, z, bound, tol=SERIES_TOL)
        b = estimators.g2_fixed_point(gamma, args.c, z)
        passed = abs(a - b) <= args.tol_g2
        ok &= passed
        rows.append(("g2", z, a, b, abs(a - b), "pass" if passed else "FAIL"))
    write_table(out, ("check", "z", "route_a", "route_b", "abs_diff", "status"), rows)
    if not ok:
        print("validate: at least one cross-route check failed", file=sys.stderr)
        return EXIT_ERROR
    return EXIT_OK


# --- argument parsing -----------------------------------------------------


def _positive_int(s: str) -> int:
    v = int(s)
    if v < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {s}")
    return v


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="freeprob",
        description="Free convolution and deconvolution of spectral moment sequences.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    io_args = argparse.ArgumentParser(add_help=False)
    io_args.add_argument("--input", action="append", metavar="PATH",
                         help="input file (repeatable; '-' or omitted reads stdin)")
    io_args.add_argument("--output", metavar="PATH", help="output file (default stdout)")
    io_args.add_argument("--order", type=_positive_int, metavar="K",
                         help="moment order (default: order of the input moments)")

    c_arg = argparse.ArgumentParser(add_help=False)
    c_arg.add_argument("--c", type=float, required=True, help="aspect ratio n/N")

    for name, helptext in (
        ("conv-add", "additive free convolution of two inputs"),
        ("deconv-add", "additive free deconvolution (first minus second)"),
        ("conv-mult", "multiplicative free convolution of two inputs"),
        ("deconv-mult", "multiplicative free deconvolution of the first by the second"),
    ):
        sp = sub.add_parser(name, parents=[io_args], help=helptext)
        sp.set_defaults(func=cmd_binary)

    for name, helptext in (("mp-conv", "convolve with Marcenko-Pastur(c)"),
                           ("mp-deconv", "deconvolve Marcenko-Pastur(c)")):
        sp = sub.add_parser(name, parents=[io_args, c_arg], help=helptext)
        sp.set_defaults(func=cmd_mp)

    for name, helptext in (("info-noise", "predict the information-plus-noise spectrum"),
                           ("denoise", "recover the signal spectrum from the noisy one")):
        sp = sub.add_parser(name, parents=[io_args, c_arg], help=helptext)
        sp.add_argument("--sigma2", type=float, default=0.0, help="noise variance (default 0)")
        sp.set_defaults(func=cmd_info_noise)

    sp = sub.add_parser("g2", parents=[io_args, c_arg], help="G2 covariance-spectrum estimate")
    sp.add_argument("--z", type=float, action="append", required=True, help="real z < 0 (repeatable)")
    sp.add_argument("--support-bound", type=float, help="support bound of the deconvolved measure")
    sp.add_argument("--route", choices=("auto", "fixed-point", "moment"), default="auto")
    sp.set_defaults(func=cmd_g2)

    sp = sub.add_parser("simulate", parents=[io_args], help="Monte Carlo information-plus-noise moments")
    sp.add_argument("--n", type=_positive_int, action="append", required=True, help="rows")
    sp.add_argument("--N", type=_positive_int, required=True, help="columns")
    sp.add_argument("--sigma2", type=float, default=0.0)
    sp.add_argument("--seed", type=int, required=True)
    sp.add_argument("--reps", type=_positive_int, default=10)
    sp.add_argument("--rotate", action="store_true", help="conjugate the signal by a seeded Haar unitary")
    sp.add_argument("--noise", choices=("gaussian", "bernoulli"), default="gaussian",
                    help="noise entries; bernoulli is experimental")
    sp.add_argument("--workers", type=_positive_int, default=1)
    sp.set_defaults(func=cmd_simulate)

    sp = sub.add_parser("mixed-decay", parents=[io_args], help="centered mixed-moment decay experiment")
    sp.add_argument("--n", type=_positive_int, action="append", required=True, help="sizes (repeatable)")
    sp.add_argument("--c", type=float, default=0.5)
    sp.add_argument("--seed", type=int, required=True)
    sp.add_argument("--reps", type=_positive_int, default=20)
    sp.add_argument("--control", action="store_true", help="identical-factor negative control")
    sp.set_defaults(func=cmd_mixed_decay)

    sp = sub.add_parser("validate", parents=[io_args, c_arg], help="run the cross-route checks")
    sp.add_argument("--sigma2", type=float, default=0.0)
    sp.add_argument("--z", type=float, action="append", help="real z < 0 (default -8, -10, -15)")
    sp.add_argument("--support-bound", type=float,
                    help="support bound of the deconvolved spectrum (default: largest atom)")
    sp.add_argument("--tol-noise", type=float, default=1e-7)
    sp.add_argument("--tol-g2", type=float, default=1e-6)
    sp.set_defaults(func=cmd_validate)
    return parser


def run(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)
    if args.command == "validate" and not args.z:
        args.z = [-8.0, -10.0, -15.0]
    if args.command == "simulate" and len(args.n) != 1:
        print("error: simulate takes a single --n", file=sys.stderr)
        return EXIT_MALFORMED

    buf = io.StringIO()
    try:
        code = args.func(args, buf)
    except MalformedInput as e:
        print(f"malformed input: {e}", file=sys.stderr)
        return EXIT_MALFORMED
    except SolverError as e:
        extra = f" (residual {e.residual:.3g})" if e.residual is not None else ""
        print(f"solver error: {e}{extra}", file=sys.stderr)
        return EXIT_ERROR
    except ConvergenceError as e:
        print(f"convergence error: {e}", file=sys.stderr)
        return EXIT_ERROR
    except ResourceError as e:
        print(f"resource error: {e}", file=sys.stderr)
        return EXIT_ERROR
    except DomainError as e:
        print(f"domain error: {e}", file=sys.stderr)
        return EXIT_ERROR
    except FreeProbError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_ERROR

    text = buf.getvalue()
    if args.output:
        with open(args.output, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return code


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
