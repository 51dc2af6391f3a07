"""Run archives on disk and plot-ready exports.

An archive directory holds::

    scenario.cfg      the scenario actually run (dx already refined)
    manifest.txt      dx, dt, step count and one line per snapshot
    snap_NNN.csv      x_left,x_right,rho for every cell of a snapshot
    interfaces.csv    t,id,y,q,f_int,left_trace,right_trace for every interface step
    diagnostics.txt   worst record per check

Every float is written with ``repr`` and nothing time-dependent is stored, so
running the same scenario twice gives byte-identical archives.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import diagnostics as diag
from .errors import IoError
from .multi import Run, simulate
from .scenario import ScenarioFile, parse_text, serialize

ARTIFACT_CELLS = 10


def group_label(key) -> str:
    return "+".join(str(i) for i in key) if isinstance(key, tuple) else str(key)


@dataclass(frozen=True)
class ArchivedSnapshot:
    t: float
    n: int
    x_left: np.ndarray
    x_right: np.ndarray
    rho: np.ndarray

    @property
    def x_center(self) -> np.ndarray:
        return 0.5 * (self.x_left + self.x_right)


@dataclass(frozen=True)
class OverlayRow:
    t: float
    id: str
    y: float
    q: float
    f_int: float
    left_trace: float
    right_trace: float

    @property
    def merged(self) -> bool:
        return "+" in self.id


@dataclass(frozen=True)
class RunArchive:
    scenario: ScenarioFile
    dx: float
    dt: float
    n_steps: int
    snapshots: tuple[ArchivedSnapshot, ...]
    overlay: tuple[OverlayRow, ...]
    report: diag.DiagnosticsReport

    @classmethod
    def from_run(cls, scenario: ScenarioFile, run: Run, report: diag.DiagnosticsReport) -> "RunArchive":
        snaps = []
        for t in sorted(run.snapshots):
            s = run.snapshots[t]
            snaps.append(ArchivedSnapshot(t, s.n, s.nodes[:-1].copy(), s.nodes[1:].copy(), s.values.copy()))
        rows = []
        for rec in run.steps:
            for i in sorted(rec.interfaces, key=lambda r: r.y_n):
                rows.append(OverlayRow(
                    rec.n * run.dt, group_label(i.id), float(i.y_n), float(i.q), float(i.f_int), float(i.left_trace), float(i.right_trace)
                ))
        return cls(scenario, run.grid.dx, run.dt, len(run.steps), tuple(snaps), tuple(rows), report)

    # -- writing ---------------------------------------------------------------

    def write(self, directory) -> Path:
        out = Path(directory)
        try:
            out.mkdir(parents=True, exist_ok=True)
            (out / "scenario.cfg").write_text(serialize(self.scenario))
            lines = [f"dx = {self.dx!r}", f"dt = {self.dt!r}", f"n_steps = {self.n_steps}"]
            for k, s in enumerate(self.snapshots):
                name = f"snap_{k:03d}.csv"
                lines.append(f"snapshot = {s.t!r} {s.n} {name}")
                body = "".join(f"{a!r},{b!r},{r!r}\n" for a, b, r in zip(s.x_left.tolist(), s.x_right.tolist(), s.rho.tolist()))
                (out / name).write_text("x_left,x_right,rho\n" + body)
            (out / "manifest.txt").write_text("\n".join(lines) + "\n")
            body = "".join(
                f"{r.t!r},{r.id},{r.y!r},{r.q!r},{r.f_int!r},{r.left_trace!r},{r.right_trace!r}\n" for r in self.overlay
            )
            (out / "interfaces.csv").write_text("t,id,y,q,f_int,left_trace,right_trace\n" + body)
            (out / "diagnostics.txt").write_text(self.report.to_text())
        except OSError as exc:
            raise IoError(f"cannot write archive {out}: {exc}") from exc
        return out

    # -- reading ---------------------------------------------------------------

    @classmethod
    def read(cls, directory) -> "RunArchive":
        root = Path(directory)
        try:
            scenario = parse_text((root / "scenario.cfg").read_text(), validate=False)
            meta, snaps = {}, []
            for line in (root / "manifest.txt").read_text().splitlines():
                key, value = (p.strip() for p in line.split("=", 1))
                if key == "snapshot":
                    t, n, name = value.split()
                    data = _read_csv(root / name, 3)
                    snaps.append(ArchivedSnapshot(float(t), int(n), data[:, 0], data[:, 1], data[:, 2]))
                else:
                    meta[key] = value
            rows = []
            for line in (root / "interfaces.csv").read_text().splitlines()[1:]:
                t, ident, *rest = line.split(",")
                rows.append(OverlayRow(float(t), ident, *(float(v) for v in rest)))
            report = diag.DiagnosticsReport.from_text((root / "diagnostics.txt").read_text())
        except (OSError, ValueError, KeyError) as exc:
            raise IoError(f"cannot read archive {root}: {exc}") from exc
        return cls(scenario, float(meta["dx"]), float(meta["dt"]), int(meta["n_steps"]), tuple(snaps), tuple(rows), report)


def _read_csv(path: Path, cols: int) -> np.ndarray:
    data = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
    if data.shape[1] != cols:
        raise ValueError(f"{path.name}: expected {cols} columns")
    return data


# -- running ---------------------------------------------------------------------


def run_scenario(scenario: ScenarioFile, refine: int = 1, diagnostics: str | None = None) -> tuple[Run, RunArchive]:
    """Simulate a (validated) scenario at dx / refine and package the result."""
    sc = scenario if refine == 1 else scenario.refined(refine)
    level = sc.output.diagnostics if diagnostics is None else diagnostics
    run = simulate(
        sc.model(), sc.grid(), sc.config(), sc.initial.datum(), sc.interfaces,
        snapshots=sc.output.snapshots, keep_history=level == "full",
    )
    if level == "none":
        report = diag.DiagnosticsReport()
    elif level == "basic":
        report = diag.basic_checks(run)
    else:
        report = diag.full_report(run)
    return run, RunArchive.from_run(sc, run, report)


def snapshot_differences(coarse: RunArchive, fine: RunArchive) -> list[tuple[float, float]]:
    """(t, L1 distance) between matching snapshots of two runs of the same scenario."""
    fine_by_t = {s.t: s for s in fine.snapshots}
    out = []
    for s in coarse.snapshots:
        f = fine_by_t.get(s.t)
        if f is None:
            continue
        a = np.append(s.x_left, s.x_right[-1])
        b = np.append(f.x_left, f.x_right[-1])
        out.append((s.t, diag.l1_difference(a, s.rho, b, f.rho)))
    return out


# -- plot export -------------------------------------------------------------------


def artifact_mask(archive: RunArchive, snap: ArchivedSnapshot) -> np.ndarray:
    """Cells within ARTIFACT_CELLS * dx of an interface group handled as merged at the snapshot time."""
    at = [r for r in archive.overlay if r.merged and abs(r.t - snap.t) <= 0.5 * archive.dt]
    mask = np.zeros(snap.rho.size, dtype=bool)
    centers = snap.x_center
    for r in at:
        mask |= np.abs(centers - r.y) <= ARTIFACT_CELLS * archive.dx
    return mask


def export_plot_data(archive: RunArchive | str | Path, out_dir, delimiter: str = ",") -> list[Path]:
    """One x_center/rho file per snapshot (plus an artifact flag) and the interface overlay."""
    if not isinstance(archive, RunArchive):
        archive = RunArchive.read(archive)
    out = Path(out_dir)
    written = []
    ext = "tsv" if delimiter == "\t" else "csv"
    try:
        out.mkdir(parents=True, exist_ok=True)
        for k, s in enumerate(archive.snapshots):
            flag = artifact_mask(archive, s)
            head = delimiter.join(("x_center", "rho", "artifact")) + "\n"
            body = "".join(
                delimiter.join((repr(float(x)), repr(float(r)), str(int(m)))) + "\n"
                for x, r, m in zip(s.x_center, s.rho, flag)
            )
            path = out / f"plot_{k:03d}_t{s.t!r}.{ext}"
            path.write_text(head + body)
            written.append(path)
        cols = ("t", "id", "y", "q", "f_int", "left_trace", "right_trace")
        rows = "".join(
            delimiter.join((repr(r.t), r.id, repr(r.y), repr(r.q), repr(r.f_int), repr(r.left_trace), repr(r.right_trace))) + "\n"
            for r in archive.overlay
        )
        path = out / f"overlay.{ext}"
        path.write_text(delimiter.join(cols) + "\n" + rows)
        written.append(path)
    except OSError as exc:
        raise IoError(f"cannot write plot data to {out}: {exc}") from exc
    return written
