"""Command-line front end.

Subcommands:

* sum-dist    exact PMF of a mod-p sum of independent symbols
* construct   build a CQAM constellation and export its points
* table       gap/gain tables for the supported shaping schemes
* pas         run a shaping chain and report empirical statistics

Every file the tool writes starts with a provenance header (tool
version, the full parameter set, and the numeric tolerances in force).
Exit codes: 0 success, 2 invalid input, 3 numerical non-convergence.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from fractions import Fraction

import numpy as np

from . import __version__
from .awgn_mi import DEFAULT_NODES
from .constellations import (
    CqamParams,
    Stretch,
    build_cqam,
    build_cqam_stretched,
    figure_of_merit,
    min_distance,
    point_table,
)
from .field import Prime
from .optimizer import (
    NU_REL_TOL,
    RATE_TOL,
    compute_table,
    emit_table,
    optimize_cqam,
    optimize_shaped_ask,
    optimize_time_sharing,
    solution_record,
)
from .pas import CodeSpec, empirical_distributions, generate_frames
from .shaping import MaxwellBoltzmann
from .sumdist import (
    NORMALIZATION_TOL,
    SymbolDistribution,
    sum_distribution_dft,
    uniformity_gap,
)

#: Stretch parameters of the reference constructions used by default in
#: `table --mode cqam` and `pas` (chosen to maximize the shaped gain).
REFERENCE_STRETCH = {7: Stretch(4.8, 0.76), 13: Stretch(6.0, 0.80)}


def _provenance(args: argparse.Namespace) -> dict:
    params = {
        k: v for k, v in sorted(vars(args).items()) if k != "func" and v is not None
    }
    return {
        "tool": f"primeshape {__version__}",
        "command": args.command,
        "parameters": json.dumps(params, default=str, sort_keys=True),
        "tolerances": json.dumps(
            {
                "pmf_normalization": NORMALIZATION_TOL,
                "rate_bisection_bits": RATE_TOL,
                "nu_search_relative_width": NU_REL_TOL,
            }
        ),
    }


def _write_output(text: str, path: str | None) -> None:
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        with open(path, "w") as fh:
            fh.write(text)


def _parse_fraction(text: str) -> Fraction:
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError) as exc:
        raise ValueError(f"cannot parse coding rate {text!r}: {exc}") from exc


# ---------------------------------------------------------------------------
# sum-dist
# ---------------------------------------------------------------------------


def _parse_pmf(field: Prime, values: list[float]) -> SymbolDistribution:
    probs = np.asarray(values, dtype=float)
    if probs.shape != (field.p,):
        raise ValueError(
            f"factor has {probs.shape[0]} entries, expected {field.p}"
        )
    total = probs.sum()
    if abs(total - 1.0) > 1e-9:
        raise ValueError(f"factor sums to {total!r}, expected 1 within 1e-9")
    return SymbolDistribution(field, probs / total)


def cmd_sum_dist(args: argparse.Namespace) -> int:
    field = Prime(args.prime)
    factors: list[SymbolDistribution] = []
    for spec in args.factor or []:
        factors.append(_parse_pmf(field, [float(v) for v in spec.split(",")]))
    if args.factors_file:
        with open(args.factors_file) as fh:
            for row in csv.reader(fh):
                if not row or row[0].lstrip().startswith("#"):
                    continue
                factors.append(_parse_pmf(field, [float(v) for v in row]))
    factors = factors * args.repeat
    if args.uniform_factor:
        factors.append(SymbolDistribution.uniform(field))
    if not factors:
        raise ValueError("no factor distributions given")

    result = sum_distribution_dft(factors)
    gap = uniformity_gap(result)
    prov = _provenance(args)
    if args.format == "json":
        doc = {
            "provenance": prov,
            "p": field.p,
            "num_factors": len(factors),
            "pmf": result.probs.tolist(),
            "uniformity_gap": gap,
        }
        _write_output(json.dumps(doc, indent=2) + "\n", args.output)
    else:
        buf = io.StringIO()
        for key, value in prov.items():
            buf.write(f"# {key}: {value}\n")
        buf.write(f"# num_factors: {len(factors)}\n")
        buf.write(f"# uniformity_gap: {gap!r}\n")
        buf.write("symbol,probability\n")
        for k, pr in enumerate(result.probs):
            buf.write(f"{k},{float(pr)!r}\n")
        _write_output(buf.getvalue(), args.output)
    return 0


# ---------------------------------------------------------------------------
# construct
# ---------------------------------------------------------------------------


def _stretch_for(args: argparse.Namespace, p: int) -> Stretch | None:
    if getattr(args, "no_stretch", False):
        return None
    if getattr(args, "stretch", None):
        return Stretch(args.stretch[0], args.stretch[1])
    return None


def cmd_construct(args: argparse.Namespace) -> int:
    field = Prime(args.prime)
    stretch = _stretch_for(args, field.p)
    params = CqamParams(args.delta_rho, args.phase_steps, stretch)
    c = (
        build_cqam_stretched(field, params)
        if stretch
        else build_cqam(field, CqamParams(args.delta_rho, args.phase_steps))
    )
    dmin = min_distance(c)
    merit = figure_of_merit(c)
    rho_out = float(c.shells.radii[-1])

    buf = io.StringIO()
    for key, value in _provenance(args).items():
        buf.write(f"# {key}: {value}\n")
    buf.write(f"# rho_out: {rho_out!r}\n")
    buf.write(f"# min_distance: {dmin!r}\n")
    buf.write(f"# figure_of_merit: {merit!r}\n")
    buf.write("index,shell,re,im,prior\n")
    for idx, shell, re, im, prior in point_table(c):
        buf.write(f"{idx},{shell},{re!r},{im!r},{prior!r}\n")
    _write_output(buf.getvalue(), args.output)
    if args.output and args.output != "-":
        print(
            f"p={field.p}: {c.size} points, rho_out={rho_out:.6f}, "
            f"d_min={dmin:.6f}, figure_of_merit={merit:.6f}"
        )
    return 0


# ---------------------------------------------------------------------------
# table
# ---------------------------------------------------------------------------


def cmd_table(args: argparse.Namespace) -> int:
    primes = args.prime or [7, 13]
    if args.rc:
        rates = [_parse_fraction(r) for r in args.rc]
    elif args.mode == "cqam":
        rates = [Fraction(2, 3)]
    else:
        rates = [
            Fraction(2, 3), Fraction(3, 4), Fraction(4, 5),
            Fraction(17, 20), Fraction(9, 10), Fraction(19, 20),
        ]

    tasks = []
    labels = []
    if args.mode == "time-sharing":
        conventions = (
            ["shaped", "time-averaged"] if args.convention == "both" else [args.convention]
        )
        for conv in conventions:
            for p in primes:
                for rc in rates:
                    labels.append({"scheme": "time-sharing", "p": p, "Rc": str(rc)})
                    tasks.append(
                        lambda p=p, rc=rc, conv=conv: optimize_time_sharing(
                            Prime(p), rc, convention=conv, nodes=args.nodes
                        )
                    )
    else:
        for p in primes:
            stretch = args.stretch and Stretch(args.stretch[0], args.stretch[1])
            if stretch is None and not args.no_stretch:
                stretch = REFERENCE_STRETCH.get(p)
            params = CqamParams(stretch=stretch)
            for rc in rates:
                labels.append({"scheme": "shaped-ask-squared", "p": p, "Rc": str(rc)})
                tasks.append(
                    lambda p=p, rc=rc: optimize_shaped_ask(
                        Prime(p), rc, nodes=args.nodes
                    )
                )
                labels.append({"scheme": "cqam", "p": p, "Rc": str(rc)})
                tasks.append(
                    lambda p=p, rc=rc, params=params: optimize_cqam(
                        Prime(p),
                        rc,
                        params,
                        nodes=args.nodes,
                        search_nodes=args.search_nodes,
                    )
                )

    def guarded(task, label):
        def run():
            try:
                return task()
            except ValueError as exc:
                return {**label, "status": f"unreachable: {exc}"}

        return run

    rows = compute_table(
        [guarded(t, lab) for t, lab in zip(tasks, labels)], jobs=args.jobs
    )
    text = emit_table(rows, fmt=args.format, provenance=_provenance(args))
    _write_output(text, args.output)
    return 0


# ---------------------------------------------------------------------------
# pas
# ---------------------------------------------------------------------------


def cmd_pas(args: argparse.Namespace) -> int:
    field = Prime(args.prime)
    rc = _parse_fraction(args.rc)
    if args.block_n is not None:
        n = args.block_n
        if n % 2 or (n * rc.numerator) % rc.denominator:
            raise ValueError(
                f"block length {n} incompatible with coding rate {rc}"
            )
        k = n * rc.numerator // rc.denominator
    else:
        n = rc.denominator if rc.denominator % 2 == 0 else 2 * rc.denominator
        k = n * rc.numerator // rc.denominator
    code = CodeSpec.random_dense(field, n, k, seed=args.seed)

    stretch = _stretch_for(args, field.p)
    if stretch is None and not args.no_stretch:
        stretch = REFERENCE_STRETCH.get(field.p)
    cqam = (
        build_cqam_stretched(field, CqamParams(stretch=stretch))
        if stretch
        else build_cqam(field)
    )
    shell_prior = MaxwellBoltzmann.from_amplitudes(args.nu, cqam.shells.radii)
    frames, plan = generate_frames(
        code, cqam, shell_prior, args.frames, seed=args.seed, dm_block=args.dm_block
    )
    target = np.array(plan.counts, dtype=float) / plan.block_length
    report = empirical_distributions(
        frames, cqam, shell_target=target, min_frames=min(args.frames, 10_000)
    )
    report["code"] = {"n": n, "k": k, "coding_rate": str(rc), "seed": args.seed}
    report["matcher"] = {
        "block_length": plan.block_length,
        "counts": list(plan.counts),
        "input_length": plan.input_length(),
        "rate_bits_per_symbol": plan.rate_bits(),
    }
    doc = {"provenance": _provenance(args), **report}
    _write_output(json.dumps(doc, indent=2) + "\n", args.output)

    if args.dump_frames:
        with open(args.dump_frames, "w") as fh:
            for key, value in _provenance(args).items():
                fh.write(f"# {key}: {value}\n")
            fh.write("frame,shell_symbols,phase_symbols,point_indices\n")
            for i, frame in enumerate(frames):
                fh.write(
                    f"{i},{' '.join(map(str, frame.shell_symbols))},"
                    f"{' '.join(map(str, frame.phase_symbols))},"
                    f"{' '.join(map(str, frame.point_indices))}\n"
                )
    return 0


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="primeshape",
        description="Shaping toolkit for prime-field constellations",
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    sd = sub.add_parser("sum-dist", help="PMF of a mod-p sum of independent symbols")
    sd.add_argument("-p", "--prime", type=int, required=True)
    sd.add_argument(
        "--factor",
        action="append",
        metavar="P0,P1,...",
        help="one factor PMF, comma separated (repeatable)",
    )
    sd.add_argument("--factors-file", help="CSV file, one factor PMF per row")
    sd.add_argument(
        "--repeat", type=int, default=1, help="replicate the factor list this many times"
    )
    sd.add_argument(
        "--uniform-factor",
        action="store_true",
        help="append one uniform factor (makes the sum exactly uniform)",
    )
    sd.add_argument("--format", choices=["csv", "json"], default="csv")
    sd.add_argument("-o", "--output", help="output path (default stdout)")
    sd.set_defaults(func=cmd_sum_dist)

    ct = sub.add_parser("construct", help="build a p^2-point CQAM constellation")
    ct.add_argument("-p", "--prime", type=int, required=True)
    ct.add_argument(
        "--stretch",
        nargs=2,
        type=float,
        metavar=("RHO_MAX", "BETA"),
        help="stretch shell radii to rho_max with exponent beta",
    )
    ct.add_argument("--phase-steps", type=int, default=4096)
    ct.add_argument("--delta-rho", type=float, default=1e-4)
    ct.add_argument("-o", "--output", help="points CSV path (default stdout)")
    ct.set_defaults(func=cmd_construct, no_stretch=False)

    tb = sub.add_parser("table", help="gap/gain table for shaping schemes")
    tb.add_argument(
        "--mode", choices=["time-sharing", "cqam"], default="time-sharing"
    )
    tb.add_argument(
        "-p", "--prime", type=int, action="append", help="field size (repeatable)"
    )
    tb.add_argument(
        "--rc", action="append", metavar="A/B", help="coding rate (repeatable)"
    )
    tb.add_argument(
        "--convention",
        choices=["shaped", "time-averaged", "both"],
        default="time-averaged",
        help="energy normalization of the time-sharing rate terms "
        "('shaped' reproduces the reference table)",
    )
    tb.add_argument(
        "--stretch",
        nargs=2,
        type=float,
        metavar=("RHO_MAX", "BETA"),
        help="override the CQAM stretch for all listed primes",
    )
    tb.add_argument(
        "--no-stretch", action="store_true", help="force unstretched CQAM"
    )
    tb.add_argument("--nodes", type=int, default=DEFAULT_NODES)
    tb.add_argument(
        "--search-nodes",
        type=int,
        default=48,
        help="quadrature nodes during the nu search (final solve uses --nodes)",
    )
    tb.add_argument("--jobs", type=int, default=1, help="parallel row evaluation")
    tb.add_argument("--format", choices=["csv", "json"], default="csv")
    tb.add_argument("-o", "--output", help="output path (default stdout)")
    tb.set_defaults(func=cmd_table)

    ps = sub.add_parser("pas", help="run a shaping chain, report statistics")
    ps.add_argument("-p", "--prime", type=int, required=True)
    ps.add_argument("--rc", default="2/3", help="coding rate k/n (>= 1/2)")
    ps.add_argument(
        "--block-n", type=int, help="code length n (default: smallest even length)"
    )
    ps.add_argument("--nu", type=float, default=0.05, help="shell shaping parameter")
    ps.add_argument("--dm-block", type=int, default=64, help="matcher block length")
    ps.add_argument("--frames", type=int, default=20_000)
    ps.add_argument("--seed", type=int, default=1)
    ps.add_argument(
        "--stretch", nargs=2, type=float, metavar=("RHO_MAX", "BETA")
    )
    ps.add_argument("--no-stretch", action="store_true")
    ps.add_argument("-o", "--output", help="report JSON path (default stdout)")
    ps.add_argument("--dump-frames", help="also dump per-frame symbols as CSV")
    ps.set_defaults(func=cmd_pas)

    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except RuntimeError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    raise SystemExit(main())
