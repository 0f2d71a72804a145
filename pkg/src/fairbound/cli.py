"""Command-line entry point: ``fairbound <command> [flags]``.

Exit codes: 0 success, 2 parse or parameter error, 3 regime violation,
4 size guard.
"""
from __future__ import annotations

import argparse
import sys
import warnings
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path

import numpy as np

from .bounds import Quantities, RegimeWarning, crossovers
from .info import get_base, use_base
from .jointfile import JointFileError, format_channel, read_joint, write_joint
from .mechanism import (
    DEFAULT_CELL_BUDGET,
    RECIPES,
    RegimeError,
    SizeGuardError,
    audit,
    construct,
)
from .oracle import DEFAULT_ITERS, DEFAULT_RESTARTS, oracle_optimize
from .report import ReportError, bound_rows, format_csv, plot_csv
from .typewriter import FIGURE_READS, typewriter_joint

EXIT_OK, EXIT_PARSE, EXIT_REGIME, EXIT_SIZE = 0, 2, 3, 4


@dataclass(frozen=True)
class SweepSpec:
    axis: str
    start: float
    stop: float
    steps: int

    @classmethod
    def parse(cls, axis: str, text: str) -> "SweepSpec":
        parts = text.split(":")
        if len(parts) != 3:
            raise ValueError(f"sweep {text!r} must look like start:stop:steps")
        start, stop, steps = float(parts[0]), float(parts[1]), int(parts[2])
        if steps < 1 or start > stop:
            raise ValueError(f"sweep {text!r} needs start <= stop and steps >= 1")
        if start < 0:
            raise ValueError(f"sweep {text!r} must be nonnegative")
        return cls(axis, start, stop, steps)

    @classmethod
    def fixed(cls, axis: str, value: float) -> "SweepSpec":
        if value < 0:
            raise ValueError(f"{axis} must be nonnegative")
        return cls(axis, value, value, 1)

    def values(self) -> list[float]:
        if self.steps == 1:
            return [self.start]
        return [float(v) for v in np.linspace(self.start, self.stop, self.steps)]


def _emit(text: str, out) -> None:
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def _grid(args, r_default=None, eps_default=None):
    if args.r_sweep:
        rs = SweepSpec.parse("r", args.r_sweep)
    elif args.r is not None:
        rs = SweepSpec.fixed("r", args.r)
    elif r_default is not None:
        rs = SweepSpec.parse("r", r_default)
    else:
        raise ValueError("one of --r or --r-sweep is required")
    if args.eps_sweep:
        es = SweepSpec.parse("epsilon", args.eps_sweep)
    elif args.epsilon is not None:
        es = SweepSpec.fixed("epsilon", args.epsilon)
    elif eps_default is not None:
        es = SweepSpec.fixed("epsilon", eps_default)
    else:
        raise ValueError("one of --epsilon or --eps-sweep is required")
    return rs.values(), es.values()


def cmd_bounds(args) -> int:
    j = read_joint(args.joint)
    rs, es = _grid(args)
    rows = bound_rows(j, rs, es)
    _emit(format_csv(rows, get_base(), [f"joint: {Path(args.joint).name}"]), args.out)
    return EXIT_OK


def _crossover_lines(j, eps: float) -> list[str]:
    """Crossovers in both bases (epsilon taken in each base's own unit)."""
    base = get_base()
    alt = "nats" if base == "bits" else "bits"
    found = {}
    for b in (base, alt):
        with use_base(b):
            found[b] = crossovers(Quantities.from_joint(j), eps)
    lines = []
    for key, ref in FIGURE_READS.items():
        parts = []
        for b in (base, alt):
            v = found[b][key]
            parts.append(f"{b} none" if v is None else f"{b} {v!r} (diff {v - ref:+.4f})")
        lines.append(f"crossover {key}: " + "; ".join(parts) + f"; figure read {ref}")
    return lines


def cmd_typewriter(args) -> int:
    hit = float(Fraction(args.hit_prob))
    j = typewriter_joint(args.n, hit)
    if args.joint_out:
        write_joint(j, args.joint_out)
    rs, es = _grid(args, r_default="0:10:201", eps_default=0.1)
    rows = bound_rows(j, rs, es)
    comments = [f"typewriter n={args.n} hit_prob={args.hit_prob}"]
    for e in es:
        comments += [f"epsilon={e!r} " + c for c in _crossover_lines(j, float(e))]
    _emit(format_csv(rows, get_base(), comments), args.out)
    return EXIT_OK


def cmd_mechanism(args) -> int:
    j = read_joint(args.joint)
    if args.r is None or args.epsilon is None:
        raise ValueError("mechanism needs --r and --epsilon")
    m = construct(j, args.recipe, args.r, args.epsilon, cell_budget=args.cell_budget)
    res = audit(m, j)
    ch = m.realize(j)
    summary = [f"base: {get_base()}", f"recipe {m.recipe}: r={m.r!r} epsilon={m.epsilon!r} "
               f"mix_prob={m.mix_prob!r}"]
    summary += m.log + res.summary().splitlines()
    text = format_channel(ch, summary)
    if args.out:
        Path(args.out).write_text(text)
        sys.stdout.write("\n".join(summary) + "\n")
    else:
        sys.stdout.write(text)
    return EXIT_OK


def cmd_oracle(args) -> int:
    j = read_joint(args.joint)
    if args.r is None or args.epsilon is None:
        raise ValueError("oracle needs --r and --epsilon")
    r, eps = args.r, args.epsilon
    row = bound_rows(j, [r], [eps])[0]
    res = oracle_optimize(j, r, eps, y_card=args.y_card, restarts=args.restarts,
                          iters=args.iters, seed=args.seed, markov_input=args.markov)
    best_c, best_name = None, None
    if not args.markov:
        for recipe in ("L1", "L3") if eps > 0 else ("thm1", "L3"):
            try:
                a = audit(construct(j, recipe, r, eps, cell_budget=args.cell_budget), j)
            except (RegimeError, SizeGuardError):
                continue
            if best_c is None or a.utility > best_c:
                best_c, best_name = a.utility, recipe
    lines = [
        f"base: {get_base()}",
        f"r = {r!r}, epsilon = {eps!r}",
        f"best_lower (closed form)  = {row['best_lower']!r}",
        (f"constructive ({best_name})   = {best_c!r}" if best_c is not None
         else "constructive              = n/a"),
        f"oracle                    = {res.utility!r}   "
        f"(I(Y;S) = {res.leakage!r}, I(Y;X) = {res.rate!r}, feasible {res.feasible})",
        f"best_upper (closed form)  = {row['best_upper']!r}",
        f"oracle <= best_upper: {res.utility <= row['best_upper'] + 1e-6}",
    ]
    if best_c is not None:
        lines.append(f"constructive <= oracle + 1e-3: {best_c <= res.utility + 1e-3}")
    _emit("\n".join(lines) + "\n", args.out)
    return EXIT_OK


def cmd_plot(args) -> int:
    if not args.out:
        raise ValueError("plot needs --out PATH")
    svg, dat = plot_csv(args.csv, args.out)
    sys.stdout.write(f"wrote {svg} and {dat}\n")
    return EXIT_OK


def _add_grid(p):
    g = p.add_mutually_exclusive_group()
    g.add_argument("--r", type=float, help="rate budget")
    g.add_argument("--r-sweep", metavar="a:b:n", help="rate grid, n points from a to b")
    g = p.add_mutually_exclusive_group()
    g.add_argument("--epsilon", type=float, help="leakage budget")
    g.add_argument("--eps-sweep", metavar="a:b:n", help="leakage grid")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="fairbound", description=__doc__.splitlines()[0])
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--nats", action="store_true", help="natural logarithms (default bits)")
    common.add_argument("--out", help="output path (default stdout)")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("bounds", parents=[common], help="closed-form bounds on a grid")
    p.add_argument("--joint", required=True)
    _add_grid(p)
    p.set_defaults(func=cmd_bounds)

    p = sub.add_parser("typewriter", parents=[common], help="noisy-typewriter joint and bound sweep")
    p.add_argument("--n", type=int, default=1000)
    p.add_argument("--hit-prob", default="1/3")
    p.add_argument("--joint-out", help="also write the generated joint here")
    _add_grid(p)
    p.set_defaults(func=cmd_typewriter)

    p = sub.add_parser("mechanism", parents=[common], help="build and audit a mechanism")
    p.add_argument("--joint", required=True)
    p.add_argument("--recipe", choices=RECIPES, default="L1")
    p.add_argument("--r", type=float)
    p.add_argument("--epsilon", type=float)
    p.add_argument("--cell-budget", type=int, default=DEFAULT_CELL_BUDGET)
    p.set_defaults(func=cmd_mechanism)

    p = sub.add_parser("oracle", parents=[common], help="numerical optimum vs the bounds")
    p.add_argument("--joint", required=True)
    p.add_argument("--r", type=float)
    p.add_argument("--epsilon", type=float)
    p.add_argument("--y-card", type=int)
    p.add_argument("--restarts", type=int, default=DEFAULT_RESTARTS)
    p.add_argument("--iters", type=int, default=DEFAULT_ITERS)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--markov", choices=("S", "X", "T"), help="let Y see only this variable")
    p.add_argument("--cell-budget", type=int, default=DEFAULT_CELL_BUDGET)
    p.set_defaults(func=cmd_oracle)

    p = sub.add_parser("plot", parents=[common], help="SVG and gnuplot data from a bounds CSV")
    p.add_argument("--csv", required=True)
    p.set_defaults(func=cmd_plot)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        with use_base("nats" if args.nats else "bits"), warnings.catch_warnings():
            warnings.simplefilter("ignore", RegimeWarning)
            return args.func(args)
    except RegimeError as e:
        print(f"regime violation: {e}", file=sys.stderr)
        return EXIT_REGIME
    except SizeGuardError as e:
        print(f"size guard: {e}", file=sys.stderr)
        return EXIT_SIZE
    except (JointFileError, ReportError, ValueError, OSError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_PARSE


if __name__ == "__main__":
    sys.exit(main())
