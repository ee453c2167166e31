"""Run configuration and the flat key=value config file format.

A config file is UTF-8 text, one ``key = value`` pair per line, with ``#``
starting a comment.  Unknown keys are rejected (they are almost always
typos), missing keys take the documented defaults.
"""

from __future__ import annotations

from dataclasses import dataclass, fields
from pathlib import Path


class ConfigError(ValueError):
    """Raised for unreadable, malformed, or invalid configuration."""


@dataclass(frozen=True)
class FlowConfig:
    """Parameters of a solver run.

    phi             dimensionless flux of the base flow, > 0
    n_r             number of radial collocation nodes (>= 8)
    n_z             number of axial samples, even and >= 8 (powers of two
                    give the fastest transforms)
    half_period     L_z; the axial domain is z in [-L_z, L_z), periodic
    picard_tol      residual threshold for the fixed-point iteration
    picard_max_iter iteration cap
    relaxation      damping factor in (0, 1]; 1 is the undamped scheme
    dealias         apply the 2/3 rule to axial modes of nonlinear products
    c1_cal, c2_cal  calibrated gain constants of the linear solution
                    operator (stream and swirl part) used by the
                    bounded-set membership checks; produced by `calibrate`
    """

    phi: float = 100.0
    n_r: int = 64
    n_z: int = 256
    half_period: float = 16.0
    picard_tol: float = 1e-10
    picard_max_iter: int = 200
    relaxation: float = 1.0
    dealias: bool = True
    c1_cal: float = 1.0
    c2_cal: float = 1.0

    def __post_init__(self):
        if not self.phi > 0:
            raise ConfigError("phi must be positive")
        if self.n_r < 8:
            raise ConfigError("n_r must be at least 8")
        if self.n_z < 8 or self.n_z % 2 != 0:
            raise ConfigError("n_z must be even and at least 8")
        if not self.half_period > 0:
            raise ConfigError("half_period must be positive")
        if not self.picard_tol > 0:
            raise ConfigError("picard_tol must be positive")
        if self.picard_max_iter < 1:
            raise ConfigError("picard_max_iter must be at least 1")
        if not 0.0 < self.relaxation <= 1.0:
            raise ConfigError("relaxation must lie in (0, 1]")
        if not self.c1_cal > 0:
            raise ConfigError("c1_cal must be positive")
        if not self.c2_cal > 0:
            raise ConfigError("c2_cal must be positive")

    def replace(self, **kw) -> "FlowConfig":
        vals = {f.name: getattr(self, f.name) for f in fields(self)}
        vals.update(kw)
        return FlowConfig(**vals)


_BOOL_WORDS = {"true": True, "1": True, "yes": True,
               "false": False, "0": False, "no": False}


def _convert(key: str, raw: str, target_type):
    if target_type is bool:
        word = raw.strip().lower()
        if word not in _BOOL_WORDS:
            raise ConfigError(f"{key}: expected a boolean, got {raw!r}")
        return _BOOL_WORDS[word]
    try:
        return target_type(raw)
    except ValueError:
        raise ConfigError(
            f"{key}: expected {target_type.__name__}, got {raw!r}") from None


def parse_config(text: str) -> FlowConfig:
    """Parse config-file text into a validated FlowConfig."""
    types = {f.name: f.type for f in fields(FlowConfig)}
    # dataclass field types are strings under `from __future__ import annotations`
    py_types = {"float": float, "int": int, "bool": bool}
    values = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.split("#", 1)[0].strip()
        if not stripped:
            continue
        if "=" not in stripped:
            raise ConfigError(f"line {lineno}: expected key=value, got {line!r}")
        key, raw = (part.strip() for part in stripped.split("=", 1))
        if key not in types:
            raise ConfigError(f"line {lineno}: unknown key {key!r}")
        if key in values:
            raise ConfigError(f"line {lineno}: duplicate key {key!r}")
        values[key] = _convert(key, raw, py_types[types[key]])
    return FlowConfig(**values)


def load_config(path) -> FlowConfig:
    """Load a FlowConfig from a key=value file; defaults fill missing keys."""
    p = Path(path)
    if not p.is_file():
        raise ConfigError(f"config file not found: {p}")
    return parse_config(p.read_text(encoding="utf-8"))


def dumps_config(config: FlowConfig) -> str:
    """Render a FlowConfig in the key=value file format."""
    lines = []
    for f in fields(config):
        val = getattr(config, f.name)
        if isinstance(val, bool):
            val = "true" if val else "false"
        elif isinstance(val, float):
            val = format(val, ".17g")
        lines.append(f"{f.name} = {val}")
    return "\n".join(lines) + "\n"
