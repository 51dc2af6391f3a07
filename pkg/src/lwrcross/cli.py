"""Command-line front end.

    lwrcross simulate SCENARIO [--out DIR] [--refine K] [--strict] [--snapshots T,...] [--diagnostics LEVEL]
    lwrcross check ARCHIVE
    lwrcross export ARCHIVE OUT_DIR [--tsv]
    lwrcross riemann --s S --q Q --left RHO --right RHO --t T [--x-min X] [--x-max X] [--cells N]

Exit codes: 0 success, 2 invalid scenario or arguments, 3 scheme error,
4 failed diagnostics (``simulate --strict`` and ``check``).
"""

from __future__ import annotations

import argparse
import dataclasses
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import numpy as np

from .archive import RunArchive, export_plot_data, run_scenario, snapshot_differences
from .errors import IoError, LWRError, ParseError, ValidationError
from .flux import FluxModel
from .multi import thread_cap
from .riemann import exact_cell_means
from .scenario import parse_scenario, validate_scenario

EXIT_OK, EXIT_INVALID, EXIT_SCHEME, EXIT_DIAGNOSTICS = 0, 2, 3, 4


def _floats(text: str) -> tuple[float, ...]:
    try:
        return tuple(float(t) for t in text.split(",") if t.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None


def _parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="lwrcross", description="Traffic flow with moving flux constraints.")
    sub = p.add_subparsers(dest="command", required=True)

    sim = sub.add_parser("simulate", help="run a scenario and write an archive")
    sim.add_argument("scenario", type=Path)
    sim.add_argument("--out", type=Path, default=Path("run"))
    sim.add_argument("--refine", type=int, default=1, help="number of levels dx, dx/2, ... to run")
    sim.add_argument("--strict", action="store_true", help="exit 4 when a diagnostic fails")
    sim.add_argument("--snapshots", type=_floats, default=None, help="override the snapshot times")
    sim.add_argument("--diagnostics", choices=("none", "basic", "full"), default=None)

    chk = sub.add_parser("check", help="rerun an archive and compare it bit for bit")
    chk.add_argument("archive", type=Path)

    exp = sub.add_parser("export", help="write plot-ready files from an archive")
    exp.add_argument("archive", type=Path)
    exp.add_argument("out", type=Path)
    exp.add_argument("--tsv", action="store_true")

    rp = sub.add_parser("riemann", help="print the exact constrained Riemann solution")
    rp.add_argument("--s", type=float, required=True, help="interface speed")
    rp.add_argument("--q", type=float, required=True, help="flux constraint")
    rp.add_argument("--left", type=float, required=True)
    rp.add_argument("--right", type=float, required=True)
    rp.add_argument("--t", type=float, default=1.0)
    rp.add_argument("--x-min", type=float, default=-1.5)
    rp.add_argument("--x-max", type=float, default=1.5)
    rp.add_argument("--cells", type=int, default=60)
    rp.add_argument("--vmax", type=float, default=1.0)
    return p


def _level_dir(out: Path, k: int, levels: int) -> Path:
    return out if levels == 1 else out / f"level_{k}"


def cmd_simulate(args) -> int:
    sc = parse_scenario(args.scenario)
    if args.snapshots is not None:
        sc = dataclasses.replace(sc, output=dataclasses.replace(sc.output, snapshots=args.snapshots))
        validate_scenario(sc)
    if args.refine < 1:
        raise ValidationError("--refine", "must be at least 1")
    factors = [2**k for k in range(args.refine)]
    with ThreadPoolExecutor(max_workers=min(thread_cap(), len(factors))) as pool:
        results = list(pool.map(lambda r: run_scenario(sc, refine=r, diagnostics=args.diagnostics), factors))
    ok = True
    for k, (_, archive) in enumerate(results):
        where = archive.write(_level_dir(args.out, k, len(factors)))
        status = "pass" if archive.report.passed else "fail"
        print(f"dx={archive.dx!r} steps={archive.n_steps} diagnostics={status} archive={where}")
        for rec in archive.report.failures():
            print("  " + rec.line())
        ok &= archive.report.passed
    if len(results) > 1:
        lines = []
        for k in range(len(results) - 1):
            a, b = results[k][1], results[k + 1][1]
            for t, d in snapshot_differences(a, b):
                lines.append(f"dx={a.dx!r} dx_fine={b.dx!r} t={t!r} l1={d!r}")
        (args.out / "refinement.txt").write_text("".join(ln + "\n" for ln in lines))
        print("\n".join(lines))
    return EXIT_DIAGNOSTICS if args.strict and not ok else EXIT_OK


def cmd_check(args) -> int:
    stored = RunArchive.read(args.archive)
    validate_scenario(stored.scenario)
    _, fresh = run_scenario(stored.scenario)
    same = _same_archive(stored, fresh)
    print(f"reproduced={'yes' if same else 'no'} diagnostics={'pass' if fresh.report.passed else 'fail'}")
    print(fresh.report.to_text(), end="")
    return EXIT_OK if same and fresh.report.passed else EXIT_DIAGNOSTICS


def _same_archive(a: RunArchive, b: RunArchive) -> bool:
    if len(a.snapshots) != len(b.snapshots) or a.overlay != b.overlay:
        return False
    for s, r in zip(a.snapshots, b.snapshots):
        if s.t != r.t or s.n != r.n:
            return False
        if not all(np.array_equal(x, y) for x, y in ((s.x_left, r.x_left), (s.x_right, r.x_right), (s.rho, r.rho))):
            return False
    return True


def cmd_export(args) -> int:
    for path in export_plot_data(args.archive, args.out, "\t" if args.tsv else ","):
        print(path)
    return EXIT_OK


def cmd_riemann(args) -> int:
    if args.t <= 0 or args.cells < 1 or not args.x_max > args.x_min:
        raise ValidationError("riemann", "need t > 0, cells >= 1 and x_max > x_min")
    for name in ("left", "right"):
        if not 0.0 <= getattr(args, name) <= 1.0:
            raise ValidationError(name, "density must lie in [0, 1]")
    model = FluxModel.quadratic(args.vmax)
    nodes = np.linspace(args.x_min, args.x_max, args.cells + 1)
    try:
        means = exact_cell_means(model, args.s, args.q, args.left, args.right, args.t, nodes)
    except ValueError as exc:
        raise ValidationError("riemann", str(exc)) from None
    print("x_center,rho")
    for x, r in zip((0.5 * (nodes[:-1] + nodes[1:])).tolist(), means.tolist()):
        print(f"{x!r},{r!r}")
    return EXIT_OK


COMMANDS = {"simulate": cmd_simulate, "check": cmd_check, "export": cmd_export, "riemann": cmd_riemann}


def main(argv=None) -> int:
    args = _parser().parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except (ParseError, ValidationError, IoError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except LWRError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_SCHEME


if __name__ == "__main__":
    sys.exit(main())
