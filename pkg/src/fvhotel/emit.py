"""File emitters: field CSV, binary PPM/PGM images and JSON hotel reports.

All writers are deterministic: the same inputs give byte-identical files.
The only run-dependent value is the report's ``provenance.timestamp``.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path
from typing import Optional

import numpy as np

from .grid import ComplexField
from .vortex import Correspondence, HotelState, Regime, Vortex, VortexPair

CSV_HEADER = "x,y,re,im"


class EmitError(OSError):
    """A write failed; the message carries the target path."""


def _write_bytes(path: Path, data: bytes) -> Path:
    path = Path(path)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_bytes(data)
    except OSError as exc:
        raise EmitError(f"cannot write {path}: {exc.strerror or exc}") from exc
    return path


# ---------------------------------------------------------------- fields


def field_to_csv(field: ComplexField) -> str:
    """Row-major ``x,y,re,im`` table with 17 significant digits."""
    xx, yy = field.grid.mesh()
    table = np.column_stack(
        [xx.ravel(), yy.ravel(), field.values.real.ravel(), field.values.imag.ravel()]
    )
    lines = [CSV_HEADER]
    lines.extend(",".join("%.17g" % v for v in row) for row in table)
    return "\n".join(lines) + "\n"


def write_field_csv(path, field: ComplexField) -> Path:
    return _write_bytes(Path(path), field_to_csv(field).encode("ascii"))


def read_field_csv(path) -> np.ndarray:
    """Parse a field CSV back into an ``(N, 4)`` float array."""
    return np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)


# ---------------------------------------------------------------- images


def encode_pnm(image: np.ndarray) -> bytes:
    """P5 for ``(h, w)`` and P6 for ``(h, w, 3)`` ``uint8`` arrays, maxval 255."""
    image = np.asarray(image)
    if image.dtype != np.uint8:
        raise ValueError("image must be uint8")
    if image.ndim == 2:
        magic = b"P5"
    elif image.ndim == 3 and image.shape[2] == 3:
        magic = b"P6"
    else:
        raise ValueError(f"unsupported image shape {image.shape}")
    h, w = image.shape[:2]
    return magic + b"\n%d %d\n255\n" % (w, h) + np.ascontiguousarray(image).tobytes()


def decode_pnm(data: bytes) -> np.ndarray:
    """Inverse of :func:`encode_pnm` for the headers it writes."""
    magic, dims, maxval, body = data.split(b"\n", 3)
    if maxval != b"255" or magic not in (b"P5", b"P6"):
        raise ValueError("not an 8-bit P5/P6 image")
    w, h = (int(t) for t in dims.split())
    shape = (h, w) if magic == b"P5" else (h, w, 3)
    return np.frombuffer(body, dtype=np.uint8).reshape(shape).copy()


def write_image(path, image: np.ndarray) -> Path:
    return _write_bytes(Path(path), encode_pnm(image))


# ---------------------------------------------------------------- reports


@dataclass(frozen=True)
class Provenance:
    config_hash: str
    tool_version: str
    timestamp: str


@dataclass
class HotelReport:
    """Serializable hotel state plus provenance."""

    mu: float
    regime: Regime
    correspondence: Correspondence
    central_charge: int
    pairs: list[VortexPair] = field(default_factory=list)
    provenance: Optional[Provenance] = None

    @classmethod
    def from_state(
        cls, state: HotelState, config_hash: str = "", timestamp: Optional[str] = None
    ) -> "HotelReport":
        from . import __version__

        if timestamp is None:
            timestamp = datetime.now(timezone.utc).isoformat(timespec="seconds")
        return cls(
            float(state.mu),
            state.regime,
            state.correspondence,
            int(state.central_charge),
            list(state.pairs),
            Provenance(config_hash, __version__, timestamp),
        )

    def to_dict(self) -> dict:
        def point(v: Optional[Vortex]):
            return None if v is None else {"x": float(v.x), "y": float(v.y)}

        prov = self.provenance
        return {
            "mu": self.mu,
            "regime": self.regime.value,
            "correspondence": self.correspondence.value,
            "central_charge": self.central_charge,
            "pairs": [
                {
                    "room": point(p.room),
                    "guest": point(p.guest),
                    "separation": p.separation,
                    "annihilated": p.annihilated,
                }
                for p in self.pairs
            ],
            "provenance": None
            if prov is None
            else {
                "config_hash": prov.config_hash,
                "tool_version": prov.tool_version,
                "timestamp": prov.timestamp,
            },
        }

    @classmethod
    def from_dict(cls, d: dict) -> "HotelReport":
        regime = Regime(d["regime"])
        room_sign = -1 if d["mu"] < 0 else 1
        pairs = []
        for p in d["pairs"]:
            room = Vortex(p["room"]["x"], p["room"]["y"], room_sign)
            guest = None if p["guest"] is None else Vortex(p["guest"]["x"], p["guest"]["y"], -room_sign)
            pairs.append(VortexPair(room, guest))
        prov = d.get("provenance")
        return cls(
            d["mu"],
            regime,
            Correspondence(d["correspondence"]),
            d["central_charge"],
            pairs,
            None if prov is None else Provenance(prov["config_hash"], prov["tool_version"], prov["timestamp"]),
        )


def report_to_json(report: HotelReport) -> str:
    return json.dumps(report.to_dict(), indent=2) + "\n"


def report_from_json(text: str) -> HotelReport:
    return HotelReport.from_dict(json.loads(text))


def write_report(path, report: HotelReport) -> Path:
    return _write_bytes(Path(path), report_to_json(report).encode("utf-8"))


def read_report(path) -> HotelReport:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise EmitError(f"cannot read {path}: {exc.strerror or exc}") from exc
    return report_from_json(text)
