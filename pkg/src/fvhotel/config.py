"""Run configuration from a ``key = value`` file and/or command-line flags.

File keys mirror the long flag names (``lambda``, ``half-width``, ...).
Flags override file values; anything unset keeps the library default.
"""

from __future__ import annotations

import hashlib
import json
import math
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Optional

from .grid import (
    ConfigError,
    GridSpec,
    OpticalConfig,
    ReferenceWaveParams,
    TruncationConfig,
)

# key -> (converter, config section, attribute)
FIELDS: dict[str, tuple[type, str, str]] = {
    "mu": (float, "run", "mu"),
    "from": (float, "sweep", "start"),
    "to": (float, "sweep", "stop"),
    "step": (float, "sweep", "step"),
    "lambda": (float, "optics", "wavelength"),
    "z": (float, "optics", "z"),
    "half-width": (float, "grid", "half_width"),
    "nx": (int, "grid", "nx"),
    "ny": (int, "grid", "ny"),
    "n-max": (int, "trunc", "n_max"),
    "tail-tol": (float, "trunc", "tail_tol"),
    "amplitude": (float, "reference", "amplitude"),
    "tilt": (float, "reference", "tilt"),
    "width": (float, "reference", "width"),
    "shift": (float, "reference", "shift"),
    "aperture-radius": (float, "run", "aperture_radius"),
    "n-quad": (int, "run", "n_quad"),
    "out": (str, "run", "output_dir"),
    "figures": (bool, "emit", "figures"),
    "csv": (bool, "emit", "csv"),
    "images": (bool, "emit", "images"),
}

_FLAG_FOR_ATTR = {(sec, attr): key for key, (_, sec, attr) in FIELDS.items()}


@dataclass(frozen=True)
class SweepSpec:
    start: float
    stop: float
    step: float

    def __post_init__(self):
        if not self.step > 0:
            raise ConfigError("step", "must be > 0")
        if not self.stop >= self.start:
            raise ConfigError("to", "must be >= from")

    def values(self) -> list[float]:
        n = int(math.floor((self.stop - self.start) / self.step + 1e-9))
        return [round(self.start + i * self.step, 12) for i in range(n + 1)]


@dataclass(frozen=True)
class EmitFlags:
    csv: bool = True
    images: bool = True
    figures: bool = True


@dataclass(frozen=True)
class RunConfig:
    mu: float = 1.5
    sweep: Optional[SweepSpec] = None
    optics: OpticalConfig = field(default_factory=OpticalConfig)
    grid: GridSpec = field(default_factory=GridSpec)
    trunc: TruncationConfig = field(default_factory=TruncationConfig)
    reference: ReferenceWaveParams = field(default_factory=ReferenceWaveParams)
    aperture_radius: float = 4e-3
    n_quad: int = 1024
    output_dir: str = "out"
    emit: EmitFlags = field(default_factory=EmitFlags)

    def __post_init__(self):
        if not math.isfinite(self.mu):
            raise ConfigError("mu", "must be finite")
        if not self.aperture_radius > 0:
            raise ConfigError("aperture-radius", "must be > 0")
        if self.n_quad < 16 or self.n_quad % 2:
            raise ConfigError("n-quad", "must be an even integer >= 16")

    def canonical(self) -> dict:
        """Plain-data form used for hashing (output location excluded)."""
        d = asdict(self)
        d.pop("output_dir")
        d.pop("emit")
        return d

    def digest(self) -> str:
        blob = json.dumps(self.canonical(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(blob.encode()).hexdigest()


def _convert(key: str, raw):
    conv = FIELDS[key][0]
    if raw is None or not isinstance(raw, str):
        return raw
    text = raw.strip()
    if conv is bool:
        low = text.lower()
        if low in ("1", "true", "yes", "on"):
            return True
        if low in ("0", "false", "no", "off"):
            return False
        raise ConfigError(key, f"expected a boolean, got {raw!r}")
    if conv is str:
        return text
    if key in ("n-max", "tilt", "width") and text.lower() in ("", "none", "auto"):
        return None
    try:
        return conv(text)
    except ValueError:
        kind = "an integer" if conv is int else "a number"
        raise ConfigError(key, f"expected {kind}, got {raw!r}") from None


def read_config_file(path) -> dict[str, str]:
    """Parse a flat ``key = value`` file; ``#`` starts a comment."""
    values: dict[str, str] = {}
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError("config", f"cannot read {path}: {exc.strerror}") from None
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError("config", f"{path}:{lineno}: expected 'key = value'")
        key, value = (s.strip() for s in line.split("=", 1))
        key = key.replace("_", "-")
        if key not in FIELDS:
            raise ConfigError(key, f"{path}:{lineno}: unknown key")
        values[key] = value
    return values


def _build(section_cls, values: dict, section: str):
    try:
        return section_cls(**values)
    except ConfigError as exc:
        flag = _FLAG_FOR_ATTR.get((section, exc.field_name), exc.field_name)
        raise ConfigError(flag, str(exc).split(": ", 1)[1]) from None


def parse_config(file_values: Optional[dict] = None, flag_values: Optional[dict] = None) -> RunConfig:
    """Merge file and flag values (flags win) into a validated :class:`RunConfig`.

    Both mappings use flag names as keys; values may be strings (converted
    here) or already-typed.  ``None`` values are ignored.
    """
    merged: dict = {}
    for source in (file_values or {}, flag_values or {}):
        for key, raw in source.items():
            if raw is None:
                continue
            key = key.replace("_", "-")
            if key not in FIELDS:
                raise ConfigError(key, "unknown option")
            merged[key] = _convert(key, raw)

    sections: dict[str, dict] = {s: {} for s in ("run", "sweep", "optics", "grid", "trunc", "reference", "emit")}
    for key, value in merged.items():
        _, sec, attr = FIELDS[key]
        sections[sec][attr] = value

    sweep = None
    if sections["sweep"]:
        missing = [k for k, a in (("from", "start"), ("to", "stop"), ("step", "step")) if a not in sections["sweep"]]
        if missing:
            raise ConfigError(missing[0], "sweep needs from, to and step")
        sweep = SweepSpec(**sections["sweep"])
    run = sections["run"]
    return RunConfig(
        sweep=sweep,
        optics=_build(OpticalConfig, sections["optics"], "optics"),
        grid=_build(GridSpec, sections["grid"], "grid"),
        trunc=_build(TruncationConfig, sections["trunc"], "trunc"),
        reference=_build(ReferenceWaveParams, sections["reference"], "reference"),
        emit=EmitFlags(**sections["emit"]),
        **run,
    )
