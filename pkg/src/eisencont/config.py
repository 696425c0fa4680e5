"""Run configuration: dataclass blocks plus a flat ``section.key = value`` file format."""
from __future__ import annotations

import dataclasses
import math
import os
from dataclasses import dataclass, field
from pathlib import Path

ENV_VAR = "EISEN_CONFIG"


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class GridConfig:
    c: float = 0.5
    c0: float = math.sqrt(3) / 2
    y_cusp: float = 3.0
    y_max: float = 5.0
    nx: int = 32
    ny: int = 80
    N: float = 4.0
    interp_order: int = 6

    def validate(self):
        if not (0 < self.c < self.c0 <= math.sqrt(3) / 2 + 1e-12):
            raise ConfigError("need 0 < c < c0 <= sqrt(3)/2")
        if not (1.0 < self.y_cusp < self.y_max):
            raise ConfigError("need 1 < y_cusp < y_max")
        if self.nx < 8 or self.nx % 2 or self.ny < 16:
            raise ConfigError("need even nx >= 8 and ny >= 16")
        if self.N <= 0:
            raise ConfigError("N must be positive")
        if self.interp_order < 2 or self.interp_order > 12:
            raise ConfigError("interp_order must lie in [2, 12]")


@dataclass(frozen=True)
class KernelConfig:
    radius: float = 0.5
    shape: str = "poly"
    power: int = 6

    def validate(self):
        if not (0 < self.radius < 3):
            raise ConfigError("kernel radius must lie in (0, 3)")
        if self.shape not in ("poly", "exp"):
            raise ConfigError("kernel shape must be 'poly' or 'exp'")
        if self.power < 3:
            raise ConfigError("kernel power must be >= 3")


@dataclass(frozen=True)
class ContinuationConfig:
    probe_count: int = 3
    probe_radius: float = 0.1
    uniqueness_samples: tuple = (1.6 + 0j, 2.0 + 0j, 1.8 + 0.4j)
    witness_rank_tol: float = 1e-3
    rank_tol: float = 1e-10
    residual_tol: float = 1e-6
    denom_floor: float = 1e-6
    fit_tol: float = 1e-3
    extra_triples: int = 64
    svd: str = "randomized"
    seed: int = 0

    def validate(self):
        if not (1 <= self.probe_count <= 9):
            raise ConfigError("probe_count must lie in [1, 9]")
        if not self.uniqueness_samples or any(complex(s).real <= 1 for s in self.uniqueness_samples):
            raise ConfigError("uniqueness samples must be nonempty with Re s > 1")
        for name in ("witness_rank_tol", "rank_tol", "residual_tol", "denom_floor", "fit_tol", "probe_radius"):
            if not getattr(self, name) > 0:
                raise ConfigError(f"{name} must be positive")
        if self.extra_triples < 0:
            raise ConfigError("extra_triples must be >= 0")
        if self.svd not in ("full", "randomized"):
            raise ConfigError("svd must be 'full' or 'randomized'")


@dataclass(frozen=True)
class OutputConfig:
    csv: str = ""
    json: str = ""
    precision: int = 12

    def validate(self):
        if not (1 <= self.precision <= 17):
            raise ConfigError("precision must lie in [1, 17]")


@dataclass(frozen=True)
class RunConfig:
    grid: GridConfig = field(default_factory=GridConfig)
    kernel: KernelConfig = field(default_factory=KernelConfig)
    continuation: ContinuationConfig = field(default_factory=ContinuationConfig)
    output: OutputConfig = field(default_factory=OutputConfig)

    def validate(self) -> "RunConfig":
        for block in (self.grid, self.kernel, self.continuation, self.output):
            block.validate()
        # kernel balls around the c0..y_cusp band must stay inside [c, y_max]
        r = self.kernel.radius
        if self.grid.c0 * math.exp(-r) < self.grid.c or self.grid.y_cusp * math.exp(r) > self.grid.y_max:
            raise ConfigError("kernel support leaves the strip: need c <= c0 e^-r and y_cusp e^r <= y_max")
        return self

    def to_flat(self) -> dict:
        out = {}
        for section in dataclasses.fields(self):
            block = getattr(self, section.name)
            for f in dataclasses.fields(block):
                val = getattr(block, f.name)
                if isinstance(val, tuple):
                    val = ",".join(_fmt_complex(v) for v in val)
                out[f"{section.name}.{f.name}"] = val
        return out

    def with_overrides(self, pairs: dict) -> "RunConfig":
        blocks = {f.name: getattr(self, f.name) for f in dataclasses.fields(self)}
        updates: dict = {name: {} for name in blocks}
        for key, raw in pairs.items():
            if "." not in key:
                raise ConfigError(f"config key {key!r} must be 'section.name'")
            section, name = key.split(".", 1)
            if section not in blocks:
                raise ConfigError(f"unknown config section {section!r}")
            fields = {f.name: f for f in dataclasses.fields(blocks[section])}
            if name not in fields:
                raise ConfigError(f"unknown config key {key!r}")
            updates[section][name] = _coerce(raw, getattr(blocks[section], name), key)
        new = {name: dataclasses.replace(block, **updates[name]) for name, block in blocks.items()}
        return RunConfig(**new).validate()


def _fmt_complex(z) -> str:
    z = complex(z)
    return repr(z.real) if z.imag == 0 else repr(z).strip("()")


def _coerce(raw, current, key):
    if not isinstance(raw, str):
        return raw
    text = raw.strip()
    try:
        if isinstance(current, bool):
            return text.lower() in ("1", "true", "yes", "on")
        if isinstance(current, int):
            return int(text)
        if isinstance(current, float):
            return float(text)
        if isinstance(current, tuple):
            return tuple(complex(t.replace(" ", "")) for t in text.split(",") if t.strip())
    except ValueError as exc:
        raise ConfigError(f"cannot parse {key} = {raw!r}") from exc
    return text


def parse_flat(text: str) -> dict:
    """Parse ``key = value`` lines; '#' starts a comment; blank lines ignored."""
    out = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'key = value'")
        key, value = (part.strip() for part in line.split("=", 1))
        out[key] = value
    return out


def load_config(path: str | os.PathLike | None = None, overrides: dict | None = None) -> RunConfig:
    """Defaults, then the file (explicit path or $EISEN_CONFIG), then overrides."""
    cfg = RunConfig()
    path = path or os.environ.get(ENV_VAR) or None
    if path:
        p = Path(path)
        if not p.is_file():
            raise ConfigError(f"config file {p} not found")
        cfg = cfg.with_overrides(parse_flat(p.read_text()))
    if overrides:
        cfg = cfg.with_overrides(overrides)
    return cfg.validate()
