"""Batch command line: ``tmflow {compile,reach,flow,beltrami}``.

Exit codes: 0 success, 2 input error, 3 property-check failure.
"""

from __future__ import annotations

import argparse
import logging
import os
import random
import sys
import tempfile
from fractions import Fraction
from pathlib import Path
from typing import Sequence

from . import __version__
from .beltrami import (CauchyDatum, NotAGradient, check_compatibility, extend, grid_csv,
                       parse_poly, residual, series_dump)
from .cantor import (apply_blockmap, blockmap_report, check_area_preserving,
                     check_disjoint_images, compile_machine, decode_point, encode_sequence,
                     gshift_to_blockmap)
from .dynamics import halting_equivalence, trace_csv
from .gshift import SymbolSequence, apply_gshift, identity_shift, four_window_shift
from .machine import (Configuration, MachineSemanticError, MachineSyntaxError, Tape,
                      TuringMachine, parse_machine, random_tape, transition)
from .planar import TubeTooWide, flow_run, u_set
from .svg import blockmap_svg, flow_svg

log = logging.getLogger("tmflow")

EXIT_OK, EXIT_INPUT, EXIT_CHECK = 0, 2, 3

BUILTIN_SHIFTS = {"four-window": four_window_shift, "identity": identity_shift}


class InputError(Exception):
    """Bad user input; reported with exit code 2."""


# -- helpers -----------------------------------------------------------------


def write_atomic(path: Path, text: str) -> None:
    """Write ``text`` to ``path`` via a temporary file and an atomic rename."""
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
        os.replace(tmp, path)
        log.info("wrote %s", path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def parse_tape(spec: str) -> Tape:
    """``"-1:1,0:1"`` -> tape with ones at -1 and 0; the empty string is the blank tape."""
    cells: dict[int, int] = {}
    for item in filter(None, (p.strip() for p in spec.split(","))):
        pos, sep, bit = item.partition(":")
        try:
            if not sep:
                raise ValueError
            p, b = int(pos), int(bit)
        except ValueError:
            raise InputError(f"bad tape cell {item!r}; expected position:bit") from None
        if b not in (0, 1):
            raise InputError(f"bad tape cell {item!r}; bit must be 0 or 1")
        if p in cells:
            raise InputError(f"tape position {p} given twice")
        cells[p] = b
    return Tape.from_cells(cells)


def load_machine(path: Path | None) -> TuringMachine:
    if path is None:
        raise InputError("--machine is required")
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as e:
        raise InputError(f"cannot read machine file: {e}") from None
    try:
        return parse_machine(text)
    except (MachineSyntaxError, MachineSemanticError) as e:
        raise InputError(f"{path}: {e}") from None


def _parse_fraction(text: str) -> Fraction:
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"not a rational number: {text!r}") from None


def _header(cmd: str, **fields) -> list[str]:
    lines = [f"# tmflow {cmd}"]
    lines += [f"# {k}: {v}" for k, v in fields.items()]
    return lines


def _flag(v: bool) -> str:
    return "true" if v else "false"


# -- compile -----------------------------------------------------------------


def _machine_conjugacy(cm, rng: random.Random, samples: int, steps: int) -> int:
    tm = cm.tm
    bad = 0
    for _ in range(samples):
        c = Configuration(rng.randint(1, tm.states), random_tape(rng))
        p = cm.encode(c)
        for _ in range(steps):
            c, p = transition(tm, c), cm.step(p)
            if cm.decode(p) != c:
                bad += 1
                break
    return bad


def _shift_conjugacy(gs, bm, rng: random.Random, samples: int, steps: int) -> int:
    bad = 0
    for _ in range(samples):
        lo = rng.randint(-20, 0)
        word = tuple(rng.randint(0, gs.alphabet - 1) for _ in range(20))
        s = SymbolSequence(gs.alphabet, lo, word)
        p = encode_sequence(s)
        for _ in range(steps):
            s, p = apply_gshift(gs, s), apply_blockmap(bm, p)
            if decode_point(p) != s:
                bad += 1
                break
    return bad


def cmd_compile(args) -> int:
    rng = random.Random(args.seed)
    if args.builtin:
        gs = BUILTIN_SHIFTS[args.builtin]()
        source = f"builtin:{args.builtin}"
        bm = gshift_to_blockmap(gs)
        disj = check_disjoint_images(bm)
        bijective, witness = disj.ok, disj.witness
        bad = _shift_conjugacy(gs, bm, rng, args.samples, args.steps)
    else:
        tm = load_machine(args.machine)
        source = Path(args.machine).name
        cm = compile_machine(tm)
        bm = cm.blockmap
        disj = check_disjoint_images(bm, cm.live)
        bijective, witness = disj.ok, disj.witness
        bad = _machine_conjugacy(cm, rng, args.samples, args.steps)
    area = check_area_preserving(bm)
    dets = sorted(set(area.determinants))
    lines = _header("compile", source=source, seed=args.seed,
                    samples=args.samples, steps=args.steps)
    lines.append(f"components: {len(bm.components)}")
    lines.append(f"window: {bm.lo}..{bm.hi}")
    lines.append(blockmap_report(bm).rstrip("\n"))
    lines.append(f"area_preserving: {_flag(area.ok)}")
    lines.append(f"determinants: {' '.join(str(d) for d in dets)}")
    lines.append(f"source_area: {area.source_area} image_area: {area.image_area}")
    lines.append(f"disjoint_images: {_flag(disj.ok)}"
                 + (f" witness: {witness[0]} {witness[1]}" if witness else ""))
    lines.append(f"bijective: {_flag(bijective)}")
    lines.append(f"conjugacy: mismatches={bad} {'pass' if bad == 0 else 'fail'}")
    out = Path(args.out_dir)
    write_atomic(out / "compile_report.txt", "\n".join(lines) + "\n")
    write_atomic(out / "blockmap.svg", blockmap_svg(bm, title=source))
    print(f"components={len(bm.components)} bijective={_flag(bijective)} "
          f"area={_flag(area.ok)} conjugacy_mismatches={bad}")
    return EXIT_OK if area.ok and bad == 0 else EXIT_CHECK


# -- reach -------------------------------------------------------------------


def cmd_reach(args) -> int:
    tm = load_machine(args.machine)
    specs = args.input or [""]
    if len(specs) != 1:
        raise InputError("reach takes a single --input")
    c = tm.initial(parse_tape(specs[0]))
    cm = compile_machine(tm)
    rep = halting_equivalence(tm, c, args.steps, cm)
    lines = _header("reach", machine=Path(args.machine).name, input=specs[0] or "blank",
                    steps=args.steps)
    lines.append(f"machine: {rep.machine}")
    lines.append(f"blockmap: {rep.flow}")
    lines.append(f"agree: {_flag(rep.agree)}")
    out = Path(args.out_dir)
    write_atomic(out / "reach_report.txt", "\n".join(lines) + "\n")
    write_atomic(out / "trace.csv", trace_csv(cm, c, args.steps))
    print(f"{rep.flow} agree={_flag(rep.agree)}")
    return EXIT_OK if rep.agree else EXIT_CHECK


# -- flow --------------------------------------------------------------------


def cmd_flow(args) -> int:
    tm = load_machine(args.machine)
    if args.delta < 0:
        raise InputError("--delta must be non-negative")
    if args.delta > 0 and args.seed is None:
        raise InputError("--seed is required when --delta > 0")
    if not 0 < args.epsilon < 1:
        raise InputError("--epsilon must lie in (0, 1)")
    if args.c <= 0:
        raise InputError("--c must be positive")
    specs = args.input or [""]
    inputs = [tm.initial(parse_tape(s)) for s in specs]
    try:
        fr = flow_run(tm, inputs, args.height, delta=args.delta, seed=args.seed, c=args.c,
                      r_tube=args.r_tube, jobs=args.jobs)
    except TubeTooWide as e:
        raise InputError(str(e)) from None
    rep = fr.report
    lines = _header("flow", machine=Path(args.machine).name, height=args.height,
                    delta=args.delta, seed=args.seed, c=args.c, r_tube=args.r_tube,
                    epsilon=args.epsilon)
    lines.append(f"delta_star: {rep.delta_star:.6e}")
    lines.append("# band input machine_halt flow_halt equivalent decoded_match visits_match "
                 "divergence max_abscissa_error")
    for spec, r in zip(specs, rep.inputs):
        lines.append(f"{r.band} {spec or 'blank'} {r.machine_halt} {r.flow_halt} "
                     f"{_flag(r.equivalent)} {_flag(r.decoded_match)} {_flag(r.visits_match)} "
                     f"{r.divergence} {r.max_abscissa_error:.3e}")
    lines.append(f"ok: {_flag(rep.ok)}")
    out = Path(args.out_dir)
    write_atomic(out / "flow_report.txt", "\n".join(lines) + "\n")
    usets = []
    for cv, traj in zip(fr.curves, fr.trajectories):
        write_atomic(out / f"trajectory_{cv.band}.csv", traj.to_csv())
        for k, conf in enumerate(cv.configs):
            usets.append(u_set(conf.state, conf.tape, (cv.band,), (k,),
                               Fraction(args.epsilon).limit_denominator(10 ** 6)))
    write_atomic(out / "flow.svg", flow_svg(fr.curves, fr.trajectories, usets,
                                            title=Path(args.machine).name))
    print(f"ok={_flag(rep.ok)} inputs={len(rep.inputs)} delta_star={rep.delta_star:.3e}")
    return EXIT_OK if rep.ok else EXIT_CHECK


# -- beltrami ----------------------------------------------------------------


def cmd_beltrami(args) -> int:
    if args.lam == 0:
        raise InputError("--lambda must be nonzero")
    if args.order < 1:
        raise InputError("--order must be at least 1")
    try:
        if args.datum is not None:
            parts = args.datum.split(";")
            if len(parts) != 2:
                raise InputError("--datum expects 'v1;v2'")
            F = check_compatibility(parse_poly(parts[0]), parse_poly(parts[1]))
            source = f"datum {args.datum}"
        else:
            F = parse_poly(args.F)
            source = f"F {args.F}"
    except NotAGradient as e:
        raise InputError(str(e)) from None
    except InputError:
        raise
    except Exception as e:  # sympy raises a zoo of parse errors
        raise InputError(f"cannot parse polynomial: {e}") from None
    series = extend(CauchyDatum(F, args.lam), args.order)
    res = residual(series, F=F)
    n = args.grid
    pts = [-1 + 2 * i / (n - 1) for i in range(n)] if n > 1 else [0.0]
    lines = _header("beltrami", source=source, F=F, **{"lambda": args.lam}, order=args.order)
    lines.append(f"certified_order: {res.certified_order}")
    lines.append(f"datum_matches: {_flag(not any(res.datum))}")
    lines.append(f"u3_zero_at_z0: {_flag(not series.u3[0])}")
    lines.append(f"exact: {_flag(res.exact)}")
    out = Path(args.out_dir)
    write_atomic(out / "beltrami_certificate.txt", "\n".join(lines) + "\n")
    write_atomic(out / "series.txt", series_dump(series))
    write_atomic(out / "grid.csv", grid_csv(series, pts, pts, pts))
    print(f"certified_order={res.certified_order} exact={_flag(res.exact)}")
    return EXIT_OK if res.exact else EXIT_CHECK


# -- entry point -------------------------------------------------------------


def _positive_int(text: str) -> int:
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError("must be a positive integer")
    return v


def _nonneg_int(text: str) -> int:
    v = int(text)
    if v < 0:
        raise argparse.ArgumentTypeError("must be a non-negative integer")
    return v


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="tmflow", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=f"tmflow {__version__}")
    p.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = p.add_subparsers(dest="subcommand", required=True)

    def common(sp, machine=True):
        if machine:
            sp.add_argument("--machine", type=Path, help="machine description file")
        sp.add_argument("--out-dir", type=Path, default=Path("."), help="output directory")
        sp.add_argument("--jobs", type=_positive_int, default=1, help="worker processes")

    sp = sub.add_parser("compile", help="lower a machine (or built-in shift) to a block map")
    common(sp)
    sp.add_argument("--builtin", choices=sorted(BUILTIN_SHIFTS))
    sp.add_argument("--samples", type=_nonneg_int, default=100,
                    help="random configurations for the conjugacy test")
    sp.add_argument("--steps", type=_nonneg_int, default=50, help="iterations per sample")
    sp.add_argument("--seed", type=int, default=0)
    sp.set_defaults(func=cmd_compile)

    sp = sub.add_parser("reach", help="bounded halting reachability on the block map")
    common(sp)
    sp.add_argument("--input", action="append", help="tape as position:bit pairs")
    sp.add_argument("--steps", type=_nonneg_int, default=100, help="step bound N")
    sp.set_defaults(func=cmd_reach)

    sp = sub.add_parser("flow", help="integrate the planar gradient flow")
    common(sp)
    sp.add_argument("--input", action="append",
                    help="tape as position:bit pairs; repeat for several bands")
    sp.add_argument("--height", type=_nonneg_int, default=30, help="height K")
    sp.add_argument("--delta", type=float, default=0.0, help="perturbation amplitude")
    sp.add_argument("--seed", type=int, default=None, help="perturbation seed")
    sp.add_argument("--epsilon", type=float, default=0.1, help="coding-set thickness")
    sp.add_argument("--c", type=float, default=10.0, help="contraction strength")
    sp.add_argument("--r-tube", type=float, default=None, help="capture radius")
    sp.set_defaults(func=cmd_flow)

    sp = sub.add_parser("beltrami", help="truncated Beltrami extension of a planar gradient")
    common(sp, machine=False)
    g = sp.add_mutually_exclusive_group(required=True)
    g.add_argument("--F", help="potential, e.g. 'x^3-3*x*y^2'")
    g.add_argument("--datum", help="planar field 'v1;v2' (must be a gradient)")
    sp.add_argument("--lambda", dest="lam", type=_parse_fraction, default=Fraction(1))
    sp.add_argument("--order", type=int, default=10, help="truncation order K")
    sp.add_argument("--grid", type=_positive_int, default=5, help="grid points per axis")
    sp.set_defaults(func=cmd_beltrami)
    return p


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s")
    if args.subcommand == "compile" and not args.builtin and args.machine is None:
        print("tmflow: error: compile needs --machine or --builtin", file=sys.stderr)
        return EXIT_INPUT
    try:
        return args.func(args)
    except InputError as e:
        print(f"tmflow: error: {e}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
