"""Strict ``key = value`` run configuration with ``[section]`` headers.

Keys may also be written in dotted form (``grid.n = 2048``) outside a
section.  Unknown sections or keys, duplicates and malformed lines are all
configuration errors carrying the offending line number.
"""
from __future__ import annotations

from dataclasses import dataclass, field, fields, replace

from .dynamics import InitialData, check_time_step
from .errors import ConfigurationError
from .radial_grid import RadialGrid, make_grid
from .spinor_model import COMPONENTS, Honeycomb, ModelSpec, PurePower, Soler, Zero
from .weights import WeightFamily, weight_from_name

NONLINEARITIES = ("zero", "honeycomb", "soler", "purepower")


@dataclass(frozen=True)
class GridSection:
    n: int = 4096
    rmax: float = 40.0


@dataclass(frozen=True)
class ModelSection:
    mass: float = 0.0
    vorticity: int = 1
    nonlinearity: str = "zero"
    beta1: float = 2.0
    beta2: float = 1.0
    g: float = 1.0
    power: float = 3.0


@dataclass(frozen=True)
class InitSection:
    amplitude: float = 0.01
    width: float = 0.5
    center: float = 3.0
    # the default pairs p22 = -p11 and p21 = p12, which is purely outgoing
    components: tuple = ("p11", "-p22", "p12", "p21")


@dataclass(frozen=True)
class TimeSection:
    dt_factor: float = 0.25
    tmax: float = 5.0
    record_every: int = 1
    cfl: float = 0.5


@dataclass(frozen=True)
class WeightSection:
    family: str = "Strong"
    delta: float = 0.1


@dataclass(frozen=True)
class OutputSection:
    dir: str = "out"
    snapshot_every: int = 0
    radii: tuple = (5.0,)


@dataclass(frozen=True)
class VerifySection:
    cl1_tol: float = 1e-6
    int0_tol: float = 1e-8
    virial_rel_tol: float = 1e-4
    static_tol: float = 1e-4
    static_n: int = 2048
    static_rmax: float = 60.0
    static_lambda: float = 1.0


@dataclass(frozen=True)
class RunConfig:
    grid: GridSection = field(default_factory=GridSection)
    model: ModelSection = field(default_factory=ModelSection)
    init: InitSection = field(default_factory=InitSection)
    time: TimeSection = field(default_factory=TimeSection)
    weight: WeightSection = field(default_factory=WeightSection)
    output: OutputSection = field(default_factory=OutputSection)
    verify: VerifySection = field(default_factory=VerifySection)

    # ---- derived objects
    def make_grid(self) -> RadialGrid:
        return make_grid(self.grid.rmax, self.grid.n)

    def make_model(self) -> ModelSpec:
        m = self.model
        kind = m.nonlinearity.lower()
        if kind == "zero":
            nl = Zero()
        elif kind == "honeycomb":
            nl = Honeycomb(m.beta1, m.beta2, m.g)
        elif kind == "soler":
            nl = Soler(m.g)
        elif kind == "purepower":
            nl = PurePower(m.g, m.power)
        else:
            raise ConfigurationError(f"unknown nonlinearity {m.nonlinearity!r}; expected one of {NONLINEARITIES}")
        return ModelSpec(m.mass, m.vorticity, nl)

    def make_init(self) -> InitialData:
        i = self.init
        return InitialData(i.amplitude, i.width, i.center, i.components)

    def make_weight(self) -> WeightFamily:
        return weight_from_name(self.weight.family, self.weight.delta)

    def dt(self) -> float:
        return self.time.dt_factor * self.make_grid().h

    def validate(self) -> "RunConfig":
        grid = self.make_grid()
        model = self.make_model()
        self.make_init()
        w = self.make_weight()
        if w.tag == "HWeight":
            raise ConfigurationError("weight.family must be Strong or Delta (HWeight is fixed for H)")
        t = self.time
        if not t.tmax > 0:
            raise ConfigurationError("time.tmax must be positive")
        if t.record_every < 1:
            raise ConfigurationError("time.record_every must be >= 1")
        if not t.dt_factor > 0:
            raise ConfigurationError("time.dt_factor must be positive")
        check_time_step(model, grid, t.dt_factor * grid.h, t.cfl)
        for R in self.output.radii:
            if not 0 < R <= grid.rmax:
                raise ConfigurationError(f"output.radii entry {R} outside (0, rmax={grid.rmax}]")
        if self.output.snapshot_every < 0:
            raise ConfigurationError("output.snapshot_every must be >= 0")
        v = self.verify
        make_grid(v.static_rmax, v.static_n)
        if not v.static_lambda > 0:
            raise ConfigurationError("verify.static_lambda must be positive")
        return self

    def with_values(self, **sections) -> "RunConfig":
        """Copy with some section fields replaced, e.g. ``with_values(model={"power": 5})``."""
        out = self
        for name, values in sections.items():
            out = replace(out, **{name: replace(getattr(out, name), **values)})
        return out

    def to_dict(self) -> dict:
        return {f.name: {g.name: _plain(getattr(getattr(self, f.name), g.name))
                         for g in fields(getattr(self, f.name))} for f in fields(self)}

    def to_text(self) -> str:
        lines = []
        for section, values in self.to_dict().items():
            lines.append(f"[{section}]")
            for key, val in values.items():
                if isinstance(val, list):
                    val = ", ".join(str(v) for v in val)
                lines.append(f"{key} = {val}")
            lines.append("")
        return "\n".join(lines)


def _plain(v):
    return list(v) if isinstance(v, tuple) else v


_SECTIONS = {f.name: f.default_factory for f in fields(RunConfig)}


def _convert(raw: str, default, key: str, lineno: int):
    text = raw.strip()
    try:
        if isinstance(default, bool):
            if text.lower() in ("true", "yes", "1"):
                return True
            if text.lower() in ("false", "no", "0"):
                return False
            raise ValueError(text)
        if isinstance(default, int):
            val = float(text)
            if val != int(val):
                raise ValueError(text)
            return int(val)
        if isinstance(default, float):
            return float(text)
        if isinstance(default, tuple):
            items = [s.strip() for s in text.split(",") if s.strip()]
            if key == "radii":
                return tuple(float(s) for s in items)
            return tuple(items)
        return text
    except ValueError:
        raise ConfigurationError(f"line {lineno}: cannot parse {key} = {raw.strip()!r}") from None


def parse_config(text: str) -> RunConfig:
    """Parse and validate configuration text; an empty text gives all defaults."""
    values: dict[str, dict] = {name: {} for name in _SECTIONS}
    seen: set = set()
    section = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("["):
            if not line.endswith("]"):
                raise ConfigurationError(f"line {lineno}: malformed section header {raw.strip()!r}")
            section = line[1:-1].strip()
            if section not in _SECTIONS:
                raise ConfigurationError(f"line {lineno}: unknown section [{section}]")
            continue
        if "=" not in line:
            raise ConfigurationError(f"line {lineno}: expected 'key = value', got {raw.strip()!r}")
        key, val = (s.strip() for s in line.split("=", 1))
        if "." in key:
            sec, _, name = key.partition(".")
        elif section is not None:
            sec, name = section, key
        else:
            raise ConfigurationError(f"line {lineno}: key {key!r} outside any section")
        if sec not in _SECTIONS:
            raise ConfigurationError(f"line {lineno}: unknown key {key!r}")
        defaults = _SECTIONS[sec]()
        known = {f.name for f in fields(defaults)}
        if name not in known:
            raise ConfigurationError(f"line {lineno}: unknown key {sec}.{name}")
        if (sec, name) in seen:
            raise ConfigurationError(f"line {lineno}: duplicate key {sec}.{name}")
        seen.add((sec, name))
        values[sec][name] = _convert(val, getattr(defaults, name), name, lineno)
    for comp in values["init"].get("components", ()):
        if comp.lstrip("+-") not in COMPONENTS:
            raise ConfigurationError(f"unknown component {comp!r} in init.components")
    cfg = RunConfig(**{sec: _SECTIONS[sec]().__class__(**vals) for sec, vals in values.items()})
    try:
        return cfg.validate()
    except ConfigurationError:
        raise
    except ValueError as exc:
        raise ConfigurationError(str(exc)) from None


def load_config(path) -> RunConfig:
    with open(path, encoding="utf-8") as fh:
        return parse_config(fh.read())
