"""Scenario files: a line-oriented ``[section]`` / ``key = value`` format.

Grammar (one item per line, ``#`` starts a comment line)::

    [flux]        kind = quadratic | polynomial
                  vmax = <float>                 (quadratic)
                  coeffs = <float>, <float>, ... (polynomial, increasing powers)
    [domain]      x_min, x_max, dx, lambda, T = <float>
    [initial]     preset = constant | indicator | piecewise
                  value = <float>                (constant, indicator)
                  a, b = <float>                 (indicator)
                  background = <float>           (indicator, optional, default 0)
                  breaks = <floats>; values = <floats>   (piecewise, one more value than breaks)
    [interface]   id = <int>                     (section may repeat)
                  path = t:y, t:y, ...
                  constraint = t0:t1:q, ...
    [crossing]    incoming = <ids>; outgoing = <ids>; time = <float>   (section may repeat)
    [output]      snapshots = <floats>           (optional)
                  diagnostics = none | basic | full   (optional, default basic)

Comment lines before the first section are kept as notes. Floats are written
with ``repr`` so that serialising and parsing again gives back the same values.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import ParseError, ValidationError
from .flux import FluxModel
from .mesh import Grid
from .scheme import CFL_MARGIN, Piecewise, SchemeConfig, constant, indicator
from .trajectory import InterfaceSpec

DIAGNOSTIC_LEVELS = ("none", "basic", "full")
CROSSING_TOL = 1e-9

_SECTIONS = {
    "flux": ({"kind"}, {"vmax", "coeffs"}),
    "domain": ({"x_min", "x_max", "dx", "lambda", "T"}, set()),
    "initial": ({"preset"}, {"value", "a", "b", "background", "breaks", "values"}),
    "interface": ({"id", "path", "constraint"}, set()),
    "crossing": ({"incoming", "outgoing", "time"}, set()),
    "output": (set(), {"snapshots", "diagnostics"}),
}
_REPEATABLE = {"interface", "crossing"}


@dataclass(frozen=True)
class FluxBlock:
    kind: str
    params: tuple[float, ...]

    def model(self) -> FluxModel:
        if self.kind == "quadratic":
            return FluxModel.quadratic(self.params[0])
        return FluxModel.polynomial(self.params)


@dataclass(frozen=True)
class DomainBlock:
    x_min: float
    x_max: float
    dx: float
    lam: float
    T: float


@dataclass(frozen=True)
class InitialBlock:
    preset: str
    params: tuple[tuple[str, object], ...]  # sorted (key, value) pairs

    def get(self, key, default=None):
        return dict(self.params).get(key, default)

    def datum(self) -> Piecewise:
        if self.preset == "constant":
            return constant(self.get("value"))
        if self.preset == "indicator":
            return indicator(self.get("a"), self.get("b"), self.get("value"), self.get("background", 0.0))
        return Piecewise(self.get("breaks"), self.get("values"))


@dataclass(frozen=True)
class CrossingSpec:
    incoming: tuple[int, ...]
    outgoing: tuple[int, ...]
    time: float


@dataclass(frozen=True)
class OutputBlock:
    snapshots: tuple[float, ...] = ()
    diagnostics: str = "basic"


@dataclass(frozen=True)
class ScenarioFile:
    flux: FluxBlock
    domain: DomainBlock
    initial: InitialBlock
    interfaces: tuple[InterfaceSpec, ...] = ()
    crossings: tuple[CrossingSpec, ...] = ()
    output: OutputBlock = field(default_factory=OutputBlock)
    notes: tuple[str, ...] = ()

    def model(self) -> FluxModel:
        return self.flux.model()

    def grid(self, refine: int = 1) -> Grid:
        d = self.domain
        return Grid.from_bounds(d.x_min, d.x_max, d.dx / refine)

    def config(self, refine: int = 1) -> SchemeConfig:
        d = self.domain
        speeds = [i.max_speed() for i in self.interfaces]
        return SchemeConfig.for_problem(self.model(), d.dx / refine, d.lam, d.T, speeds)

    def refined(self, factor: int) -> "ScenarioFile":
        d = self.domain
        return ScenarioFile(
            self.flux, DomainBlock(d.x_min, d.x_max, d.dx / factor, d.lam, d.T),
            self.initial, self.interfaces, self.crossings, self.output, self.notes,
        )

    def to_text(self) -> str:
        return serialize(self)


# -- low-level parsing ------------------------------------------------------------


def _floats(text: str, line: int) -> tuple[float, ...]:
    if not text.strip():
        return ()
    try:
        return tuple(float(tok) for tok in text.split(","))
    except ValueError:
        raise ParseError(line, f"expected a comma-separated list of numbers, got {text!r}") from None


def _float(text: str, line: int) -> float:
    vals = _floats(text, line)
    if len(vals) != 1:
        raise ParseError(line, f"expected one number, got {text!r}")
    return vals[0]


def _ints(text: str, line: int) -> tuple[int, ...]:
    try:
        return tuple(int(tok) for tok in text.split(","))
    except ValueError:
        raise ParseError(line, f"expected a comma-separated list of integers, got {text!r}") from None


def _tuples(text: str, line: int, width: int) -> tuple[tuple[float, ...], ...]:
    out = []
    for item in text.split(","):
        parts = item.split(":")
        if len(parts) != width:
            raise ParseError(line, f"expected {width} colon-separated numbers in {item.strip()!r}")
        try:
            out.append(tuple(float(p) for p in parts))
        except ValueError:
            raise ParseError(line, f"bad number in {item.strip()!r}") from None
    return tuple(out)


def _sections(text: str):
    """Yield (name, header line, {key: (value, line)}) and collect leading notes."""
    notes, sections, cur = [], [], None
    for no, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line:
            continue
        if line.startswith("#"):
            if cur is None:
                notes.append(line[1:].strip())
            continue
        if line.startswith("["):
            if not line.endswith("]"):
                raise ParseError(no, f"malformed section header {line!r}")
            name = line[1:-1].strip()
            if name not in _SECTIONS:
                raise ParseError(no, f"unknown section [{name}]")
            if name not in _REPEATABLE and any(s[0] == name for s in sections):
                raise ParseError(no, f"section [{name}] may appear only once")
            cur = (name, no, {})
            sections.append(cur)
            continue
        if cur is None:
            raise ParseError(no, "key outside of any section")
        if "=" not in line:
            raise ParseError(no, f"expected 'key = value', got {line!r}")
        key, value = (part.strip() for part in line.split("=", 1))
        req, opt = _SECTIONS[cur[0]]
        if key not in req | opt:
            raise ParseError(no, f"unknown key {key!r} in [{cur[0]}]")
        if key in cur[2]:
            raise ParseError(no, f"duplicate key {key!r}")
        cur[2][key] = (value, no)
    for name, no, kv in sections:
        missing = sorted(_SECTIONS[name][0] - kv.keys())
        if missing:
            raise ParseError(no, f"[{name}] is missing {', '.join(missing)}")
    for name in ("flux", "domain", "initial"):
        if not any(s[0] == name for s in sections):
            raise ParseError(0, f"missing section [{name}]")
    return tuple(notes), sections


def parse_text(text: str, validate: bool = True) -> ScenarioFile:
    notes, sections = _sections(text)
    flux = domain = initial = None
    interfaces, crossings = [], []
    output = OutputBlock()
    lines = {}
    for name, no, kv in sections:
        get = {k: v for k, (v, _) in kv.items()}
        at = {k: ln for k, (_, ln) in kv.items()}
        if name == "flux":
            kind = get["kind"]
            if kind == "quadratic":
                if "vmax" not in get:
                    raise ParseError(no, "[flux] quadratic needs vmax")
                flux = FluxBlock(kind, (_float(get["vmax"], at["vmax"]),))
            elif kind == "polynomial":
                if "coeffs" not in get:
                    raise ParseError(no, "[flux] polynomial needs coeffs")
                flux = FluxBlock(kind, _floats(get["coeffs"], at["coeffs"]))
            else:
                raise ParseError(at["kind"], f"unknown flux kind {kind!r}")
            lines["flux"] = no
        elif name == "domain":
            vals = {k: _float(get[k], at[k]) for k in get}
            domain = DomainBlock(vals["x_min"], vals["x_max"], vals["dx"], vals["lambda"], vals["T"])
            lines["domain"] = no
        elif name == "initial":
            preset = get["preset"]
            need = {"constant": {"value"}, "indicator": {"a", "b", "value"}, "piecewise": {"breaks", "values"}}
            if preset not in need:
                raise ParseError(at["preset"], f"unknown preset {preset!r}")
            allowed = need[preset] | ({"background"} if preset == "indicator" else set())
            for k in get:
                if k != "preset" and k not in allowed:
                    raise ParseError(at[k], f"key {k!r} does not apply to preset {preset!r}")
            if need[preset] - get.keys():
                raise ParseError(no, f"preset {preset!r} needs {', '.join(sorted(need[preset]))}")
            params = []
            for k in sorted(get):
                if k == "preset":
                    continue
                params.append((k, _floats(get[k], at[k]) if k in ("breaks", "values") else _float(get[k], at[k])))
            initial = InitialBlock(preset, tuple(params))
            lines["initial"] = no
        elif name == "interface":
            ids = _ints(get["id"], at["id"])
            if len(ids) != 1:
                raise ParseError(at["id"], "interface id must be a single integer")
            path = _tuples(get["path"], at["path"], 2)
            cons = _tuples(get["constraint"], at["constraint"], 3)
            interfaces.append(InterfaceSpec(ids[0], path, cons))
            lines[("interface", ids[0])] = no
        elif name == "crossing":
            crossings.append(
                CrossingSpec(_ints(get["incoming"], at["incoming"]), _ints(get["outgoing"], at["outgoing"]), _float(get["time"], at["time"]))
            )
            lines[("crossing", len(crossings) - 1)] = no
        else:
            diag = get.get("diagnostics", "basic")
            if diag not in DIAGNOSTIC_LEVELS:
                raise ParseError(at["diagnostics"], f"diagnostics must be one of {', '.join(DIAGNOSTIC_LEVELS)}")
            snaps = _floats(get["snapshots"], at["snapshots"]) if "snapshots" in get else ()
            output = OutputBlock(snaps, diag)
    sc = ScenarioFile(flux, domain, initial, tuple(interfaces), tuple(crossings), output, notes)
    if validate:
        validate_scenario(sc, lines)
    return sc


def parse_scenario(path) -> ScenarioFile:
    return parse_text(Path(path).read_text())


# -- validation ----------------------------------------------------------------------


def _where(lines: dict, key) -> str:
    no = lines.get(key) if lines else None
    return f" (line {no})" if no else ""


def validate_scenario(sc: ScenarioFile, lines: dict | None = None) -> None:
    lines = lines or {}
    try:
        model = sc.model()
    except ValueError as exc:
        raise ValidationError("flux" + _where(lines, "flux"), str(exc)) from None
    d = sc.domain
    where = _where(lines, "domain")
    if not (d.x_max > d.x_min and d.dx > 0 and d.lam > 0 and d.T > 0):
        raise ValidationError("domain" + where, "need x_max > x_min and positive dx, lambda, T")
    try:
        sc.grid()
    except ValueError as exc:
        raise ValidationError("domain.dx" + where, str(exc)) from None
    speed = max((i.max_speed() for i in sc.interfaces), default=0.0)
    if 2 * (model.lipschitz + speed) * d.lam > 1 - CFL_MARGIN:
        raise ValidationError("domain.lambda" + where, f"CFL condition 2 (|f'| + |y'|) lambda <= 1 fails for lambda={d.lam!r}")
    ini = sc.initial
    vals = [v for k, v in ini.params if k in ("value", "values", "background")]
    flat = [x for v in vals for x in (v if isinstance(v, tuple) else (v,))]
    if any(not 0.0 <= x <= 1.0 for x in flat):
        raise ValidationError("initial" + _where(lines, "initial"), "densities must lie in [0, 1]")
    if ini.preset == "indicator" and not ini.get("a") < ini.get("b"):
        raise ValidationError("initial" + _where(lines, "initial"), "indicator needs a < b")
    if ini.preset == "piecewise":
        try:
            ini.datum()
        except ValueError as exc:
            raise ValidationError("initial" + _where(lines, "initial"), str(exc)) from None
    ids = [i.id for i in sc.interfaces]
    if len(set(ids)) != len(ids):
        raise ValidationError("interface.id", "interface ids must be unique")
    lo, hi = d.x_min + 3 * d.dx, d.x_max - 5 * d.dx
    for spec in sc.interfaces:
        name = f"interface {spec.id}" + _where(lines, ("interface", spec.id))
        try:
            spec.validate(model)
        except ValidationError as exc:
            raise ValidationError(exc.field + _where(lines, ("interface", spec.id)), exc.reason) from None
        if spec.end > d.T + 1e-12:
            raise ValidationError(name + ".path", "trajectory outlives the horizon T")
        ys = [y for _, y in spec.path]
        if min(ys) < lo or max(ys) > hi:
            raise ValidationError(name + ".path", f"positions must stay inside [{lo!r}, {hi!r}]")
    for t in sc.output.snapshots:
        if not 0.0 <= t <= d.T:
            raise ValidationError("output.snapshots", f"snapshot time {t!r} outside [0, T]")
    by_id = {i.id: i for i in sc.interfaces}
    for k, c in enumerate(sc.crossings):
        _validate_crossing(c, by_id, "crossing" + _where(lines, ("crossing", k)))
    _check_intersections(sc)


def _validate_crossing(c: CrossingSpec, by_id: dict, name: str) -> None:
    if not c.incoming and not c.outgoing:
        raise ValidationError(name, "crossing lists no interfaces")
    pts = []
    for i in c.incoming:
        if i not in by_id:
            raise ValidationError(name, f"unknown interface {i}")
        if abs(by_id[i].end - c.time) > CROSSING_TOL:
            raise ValidationError(name, f"interface {i} does not end at t={c.time!r}")
        pts.append(by_id[i].path[-1][1])
    for i in c.outgoing:
        if i not in by_id:
            raise ValidationError(name, f"unknown interface {i}")
        if abs(by_id[i].start - c.time) > CROSSING_TOL:
            raise ValidationError(name, f"interface {i} does not start at t={c.time!r}")
        pts.append(by_id[i].path[0][1])
    if max(pts) - min(pts) > CROSSING_TOL:
        raise ValidationError(name, "the interfaces do not meet at a common point")


def _check_intersections(sc: ScenarioFile) -> None:
    """Two interfaces may only meet at a declared crossing."""
    declared = set()
    for c in sc.crossings:
        members = set(c.incoming) | set(c.outgoing)
        declared |= {(a, b) for a in members for b in members if a != b}
    specs = sc.interfaces
    for ia in range(len(specs)):
        for ib in range(ia + 1, len(specs)):
            a, b = specs[ia], specs[ib]
            t0, t1 = max(a.start, b.start), min(a.end, b.end)
            if t1 < t0:
                continue
            ts = sorted({t0, t1, *(t for t, _ in a.path + b.path if t0 < t < t1)})
            gap = np.asarray(a.position(ts)) - np.asarray(b.position(ts))
            touching = np.abs(gap) <= CROSSING_TOL
            crossing = gap.max() > CROSSING_TOL and gap.min() < -CROSSING_TOL
            if (crossing or touching.any()) and (a.id, b.id) not in declared:
                raise ValidationError("interfaces", f"interfaces {a.id} and {b.id} meet without a declared crossing")


# -- serialisation ----------------------------------------------------------------------


def _fmt(values) -> str:
    return ", ".join(repr(float(v)) for v in values)


def serialize(sc: ScenarioFile) -> str:
    out = [f"# {n}" if n else "#" for n in sc.notes]
    out.append("[flux]")
    out.append(f"kind = {sc.flux.kind}")
    if sc.flux.kind == "quadratic":
        out.append(f"vmax = {sc.flux.params[0]!r}")
    else:
        out.append(f"coeffs = {_fmt(sc.flux.params)}")
    d = sc.domain
    out += ["", "[domain]", f"x_min = {d.x_min!r}", f"x_max = {d.x_max!r}", f"dx = {d.dx!r}", f"lambda = {d.lam!r}", f"T = {d.T!r}"]
    out += ["", "[initial]", f"preset = {sc.initial.preset}"]
    for k, v in sc.initial.params:
        out.append(f"{k} = {_fmt(v) if isinstance(v, tuple) else repr(v)}")
    for i in sc.interfaces:
        out += ["", "[interface]", f"id = {i.id}"]
        out.append("path = " + ", ".join(f"{t!r}:{y!r}" for t, y in i.path))
        out.append("constraint = " + ", ".join(f"{a!r}:{b!r}:{q!r}" for a, b, q in i.constraint))
    for c in sc.crossings:
        out += ["", "[crossing]", "incoming = " + ", ".join(map(str, c.incoming)),
                "outgoing = " + ", ".join(map(str, c.outgoing)), f"time = {c.time!r}"]
    out += ["", "[output]"]
    if sc.output.snapshots:
        out.append(f"snapshots = {_fmt(sc.output.snapshots)}")
    out.append(f"diagnostics = {sc.output.diagnostics}")
    return "\n".join(out) + "\n"
