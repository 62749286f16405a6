"""CSV, config-file and checkpoint serialization.

CSV files open with comment lines recording the tool version and the fully
resolved configuration, so a file is reproducible from its own header.
Floats are written with 17 significant digits for exact round-tripping.

The binary checkpoint layout is: one little-endian uint64 carrying the
grid size, five little-endian float64 values (domain length, advection
strength, both equilibrium densities, simulation time), then the raw
little-endian float64 samples of species 1 followed by species 2.
"""
from __future__ import annotations

import os
from typing import Iterable, Mapping

import numpy as np

from ._version import __version__
from .model import ModelParams
from .spectral import StateGrid

__all__ = [
    "format_float",
    "write_csv",
    "read_config",
    "save_checkpoint",
    "load_checkpoint",
]

CSV_DIGITS = 17
SUMMARY_DIGITS = 6


def format_float(x: float, digits: int = CSV_DIGITS) -> str:
    return f"{x:.{digits}g}"


def _cell(value) -> str:
    if isinstance(value, bool) or isinstance(value, np.bool_):
        return "1" if value else "0"
    if isinstance(value, (float, np.floating)):
        return format_float(float(value))
    return str(value)


def write_csv(path, columns: Mapping[str, Iterable], meta: Mapping[str, object] | None = None):
    """Write named columns with a ``#``-comment header of resolved settings."""
    cols = {name: list(values) for name, values in columns.items()}
    lengths = {len(v) for v in cols.values()}
    if len(lengths) > 1:
        raise ValueError(f"columns have unequal lengths: {lengths}")
    n_rows = lengths.pop() if lengths else 0
    lines = [f"# nlad {__version__}"]
    for key, value in (meta or {}).items():
        lines.append(f"# {key} = {_cell(value)}")
    lines.append(",".join(cols))
    names = list(cols)
    for i in range(n_rows):
        lines.append(",".join(_cell(cols[name][i]) for name in names))
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")


def read_config(path) -> dict[str, str]:
    """Parse a flat ``key = value`` configuration file.

    Blank lines and ``#`` comments are ignored.  Values are returned as
    strings; the caller owns typing and key validation.
    """
    out: dict[str, str] = {}
    with open(path) as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ValueError(f"{path}:{lineno}: expected 'key = value', got {raw!r}")
            key, value = line.split("=", 1)
            key = key.strip()
            if not key:
                raise ValueError(f"{path}:{lineno}: empty key")
            if key in out:
                raise ValueError(f"{path}:{lineno}: duplicate key {key!r}")
            out[key] = value.strip()
    return out


def save_checkpoint(path, state: StateGrid, p: ModelParams, t: float = 0.0):
    header_n = np.array([state.n], dtype="<u8")
    header_f = np.array([state.L, p.gamma, p.u1_bar, p.u2_bar, t], dtype="<f8")
    with open(path, "wb") as fh:
        fh.write(header_n.tobytes())
        fh.write(header_f.tobytes())
        fh.write(state.u1.astype("<f8").tobytes())
        fh.write(state.u2.astype("<f8").tobytes())


def load_checkpoint(path) -> tuple[StateGrid, dict[str, float]]:
    with open(path, "rb") as fh:
        raw = fh.read()
    if len(raw) < 48:
        raise ValueError(f"checkpoint {path} is truncated")
    n = int(np.frombuffer(raw[:8], dtype="<u8")[0])
    L, gamma, u1_bar, u2_bar, t = np.frombuffer(raw[8:48], dtype="<f8")
    expected = 48 + 2 * 8 * n
    if len(raw) != expected:
        raise ValueError(
            f"checkpoint {path} has {len(raw)} bytes, expected {expected} for n={n}"
        )
    u1 = np.frombuffer(raw[48 : 48 + 8 * n], dtype="<f8")
    u2 = np.frombuffer(raw[48 + 8 * n :], dtype="<f8")
    state = StateGrid(n=n, L=float(L), u1=u1, u2=u2)
    meta = {
        "gamma": float(gamma),
        "u1_bar": float(u1_bar),
        "u2_bar": float(u2_bar),
        "t": float(t),
    }
    return state, meta


def ensure_dir(path):
    os.makedirs(path, exist_ok=True)
    return path
