"""INI-style run configuration: [model], [drive], [rho], [numerics], [output]."""

from __future__ import annotations

import configparser
import re
from dataclasses import dataclass, field, fields

from .params import DriveSpec, ModelParams


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class DriveConfig:
    name: str = "sin"
    harmonics: str = ""

    def build(self) -> DriveSpec:
        if self.name == "sin":
            return DriveSpec.sine()
        if self.name != "custom":
            raise ConfigError(f"[drive] name: unknown drive {self.name!r} (use sin or custom)")
        table = {}
        for item in filter(None, (s.strip() for s in self.harmonics.split(","))):
            j, _, c = item.partition(":")
            table[int(j)] = complex(c.replace(" ", ""))
        if not table:
            raise ConfigError("[drive] harmonics: custom drive needs at least one harmonic")
        return DriveSpec(table, name="custom")


@dataclass(frozen=True)
class RhoConfig:
    kind: str = "gaussian"
    center: float = 2.0
    concentration: float = 10.0
    momentum: float = 8.0
    path: str = ""


@dataclass(frozen=True)
class NumericsConfig:
    j_max: int = 2000
    theta_nodes: int = 2048
    theta_min: float = 0.05
    fit_window_lo: float = 0.4
    fit_window_hi: float = 0.8
    series_terms: int = 200000
    tol: float = 1e-8
    t_end_periods: float = 300.0
    samples_per_period: int = 4
    slope_fraction: float = 0.5
    picture: str = "interaction"
    averaged_n: str = "0:400:10"
    thetas: str = "0.5, 1.0, 1.5707963267948966, 2.0, 2.5"


@dataclass(frozen=True)
class OutputConfig:
    directory: str = "out"
    plot: bool = True


@dataclass(frozen=True)
class RunConfig:
    model: ModelParams = field(default_factory=ModelParams)
    drive: DriveConfig = field(default_factory=DriveConfig)
    rho: RhoConfig = field(default_factory=RhoConfig)
    numerics: NumericsConfig = field(default_factory=NumericsConfig)
    output: OutputConfig = field(default_factory=OutputConfig)
    allow_off_resonance: bool = False


SECTIONS = {
    "model": ModelParams,
    "drive": DriveConfig,
    "rho": RhoConfig,
    "numerics": NumericsConfig,
    "output": OutputConfig,
}


def _field_types(cls):
    hints = {
        "hbar": float, "charge": float, "mass": float, "b_field": float, "p": float,
        "epsilon": float, "mu": int, "s": int, "n_max": int, "drive_frequency": float,
    }
    out = {}
    for f in fields(cls):
        if f.name in hints:
            out[f.name] = hints[f.name]
        else:
            out[f.name] = type(f.default)
    return out


def _convert(raw, typ):
    if typ is bool:
        low = raw.strip().lower()
        if low in ("1", "true", "yes", "on"):
            return True
        if low in ("0", "false", "no", "off"):
            return False
        raise ValueError(f"not a boolean: {raw!r}")
    if typ is int:
        return int(raw)
    if typ is float:
        return float(raw)
    return raw.strip()


def _line_of(text, section, key):
    current = None
    for lineno, line in enumerate(text.splitlines(), 1):
        m = re.match(r"\s*\[(\w+)\]", line)
        if m:
            current = m.group(1)
            continue
        if current == section and re.match(rf"\s*{re.escape(key)}\s*[=:]", line):
            return lineno
    return None


def parse_config(text, source="<config>", allow_off_resonance=False):
    parser = configparser.ConfigParser(interpolation=None)
    try:
        parser.read_string(text, source=source)
    except configparser.Error as exc:
        raise ConfigError(f"{source}: {exc}") from None
    parts = {}
    for section in parser.sections():
        if section not in SECTIONS:
            raise ConfigError(f"{source}: unknown section [{section}]")
    for name, cls in SECTIONS.items():
        types = _field_types(cls)
        kwargs = {}
        if parser.has_section(name):
            for key, raw in parser.items(name):
                where = _line_of(text, name, key)
                loc = f"{source}:{where}" if where else source
                if key not in types:
                    raise ConfigError(f"{loc}: [{name}] unknown key {key!r}")
                if name == "model" and key == "drive_frequency" and raw.strip().lower() in ("", "none"):
                    kwargs[key] = None
                    continue
                try:
                    kwargs[key] = _convert(raw, types[key])
                except ValueError as exc:
                    raise ConfigError(f"{loc}: [{name}] {key}: {exc}") from None
        try:
            parts[name] = cls(**kwargs)
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"{source}: [{name}] {exc}") from None
    cfg = RunConfig(**parts, allow_off_resonance=allow_off_resonance)
    validate(cfg, source)
    return cfg


def load_config(path, allow_off_resonance=False):
    with open(path) as fh:
        return parse_config(fh.read(), str(path), allow_off_resonance)


def validate(cfg: RunConfig, source="<config>"):
    n = cfg.numerics
    positive = {
        "j_max": n.j_max, "theta_nodes": n.theta_nodes, "theta_min": n.theta_min,
        "series_terms": n.series_terms, "tol": n.tol, "t_end_periods": n.t_end_periods,
        "samples_per_period": n.samples_per_period, "slope_fraction": n.slope_fraction,
    }
    for key, val in positive.items():
        if not val > 0:
            raise ConfigError(f"{source}: [numerics] {key} must be positive, got {val!r}")
    if not 0 <= n.fit_window_lo < n.fit_window_hi <= 1:
        raise ConfigError(f"{source}: [numerics] fit window must satisfy 0 <= lo < hi <= 1")
    if n.picture not in ("interaction", "lab"):
        raise ConfigError(f"{source}: [numerics] picture must be interaction or lab")
    if cfg.rho.kind not in ("gaussian", "table"):
        raise ConfigError(f"{source}: [rho] kind must be gaussian or table")
    if cfg.rho.kind == "table" and not cfg.rho.path:
        raise ConfigError(f"{source}: [rho] path is required for a tabulated density")
    if cfg.rho.kind == "gaussian" and not cfg.rho.concentration > 0:
        raise ConfigError(f"{source}: [rho] concentration must be positive")
    cfg.drive.build()
    if not cfg.model.resonant and not cfg.allow_off_resonance:
        raise ConfigError(
            f"{source}: [model] drive_frequency {cfg.model.drive_frequency!r} breaks the "
            f"resonance Omega = mu omega_c; pass --allow-off-resonance to run anyway"
        )


def _format(value):
    if isinstance(value, bool):
        return "true" if value else "false"
    if value is None:
        return "none"
    return repr(value) if isinstance(value, float) else str(value)


def dump_config(cfg: RunConfig) -> str:
    lines = []
    for name in SECTIONS:
        part = getattr(cfg, name)
        lines.append(f"[{name}]")
        for f in fields(part):
            lines.append(f"{f.name} = {_format(getattr(part, f.name))}")
        lines.append("")
    return "\n".join(lines)


def parse_index_list(spec):
    """'0:400:10' (inclusive range) or '0, 50, 100' -> list of ints."""
    spec = spec.strip()
    if ":" in spec:
        parts = [int(v) for v in spec.split(":")]
        start, stop = parts[0], parts[1]
        step = parts[2] if len(parts) > 2 else 1
        return list(range(start, stop + 1, step))
    return [int(v) for v in spec.split(",") if v.strip()]


def parse_float_list(spec):
    return [float(v) for v in spec.split(",") if v.strip()]
