"""Deterministic report and field persistence.

JSON is written with sorted keys and every float rendered with 17
significant digits, so identical data produces byte-identical files on
every run.  Field arrays go to CSV with an `r,z,value` header (one file
per component); complex arrays use paired `re`/`im` value columns.
"""

from __future__ import annotations

import json
import math
from pathlib import Path

import numpy as np


def fmt(x) -> str:
    """17-significant-digit rendering of one float."""
    if isinstance(x, float) and math.isnan(x):
        return "NaN"
    if isinstance(x, float) and math.isinf(x):
        return "Infinity" if x > 0 else "-Infinity"
    return format(float(x), ".17g")


def _render(obj, indent: int) -> str:
    pad = " " * indent
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = []
        for key in sorted(obj, key=str):
            items.append(f'{pad}  {json.dumps(str(key))}: {_render(obj[key], indent + 2)}')
        return "{\n" + ",\n".join(items) + f"\n{pad}}}"
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        items = [f"{pad}  {_render(v, indent + 2)}" for v in obj]
        return "[\n" + ",\n".join(items) + f"\n{pad}]"
    if isinstance(obj, bool) or obj is None:
        return json.dumps(obj)
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return fmt(float(obj))
    if isinstance(obj, complex):
        return _render({"re": obj.real, "im": obj.imag}, indent)
    if isinstance(obj, np.ndarray):
        return _render(obj.tolist(), indent)
    if isinstance(obj, str):
        return json.dumps(obj)
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def write_report(report, path) -> None:
    """Serialize a report (dict or dataclass with to_dict) deterministically."""
    path = Path(path)
    if not path.parent.is_dir():
        raise FileNotFoundError(f"directory does not exist: {path.parent}")
    data = report.to_dict() if hasattr(report, "to_dict") else report
    path.write_text(_render(data, 0) + "\n", encoding="utf-8")


def read_report(path):
    return json.loads(Path(path).read_text(encoding="utf-8"))


def write_csv(path, header, rows) -> None:
    """Write rows of numbers (or strings) with deterministic formatting."""
    path = Path(path)
    if not path.parent.is_dir():
        raise FileNotFoundError(f"directory does not exist: {path.parent}")
    lines = [",".join(header)]
    for row in rows:
        cells = []
        for v in row:
            if isinstance(v, (float, np.floating)):
                cells.append(fmt(float(v)))
            else:
                cells.append(str(v))
        lines.append(",".join(cells))
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")


def write_field_csv(path, grid, modes, values: np.ndarray) -> None:
    """One real field component as r,z,value rows (z fastest)."""
    values = np.asarray(values)
    z = modes.z
    rows = []
    for i, r in enumerate(grid.nodes):
        for j, zj in enumerate(z):
            rows.append((r, zj, values[i, j]))
    write_csv(path, ["r", "z", "value"], rows)


def write_complex_field_csv(path, grid, modes, values: np.ndarray) -> None:
    """One complex field component as r,z,re,im rows."""
    values = np.asarray(values)
    z = modes.z
    rows = []
    for i, r in enumerate(grid.nodes):
        for j, zj in enumerate(z):
            rows.append((r, zj, values[i, j].real, values[i, j].imag))
    write_csv(path, ["r", "z", "re", "im"], rows)


def read_complex_field_csv(path, grid, modes) -> np.ndarray:
    lines = Path(path).read_text(encoding="utf-8").strip().splitlines()
    if lines[0].strip() != "r,z,re,im":
        raise ValueError(f"{path}: expected header 'r,z,re,im'")
    re_vals = np.array([float(line.split(",")[2]) for line in lines[1:]])
    im_vals = np.array([float(line.split(",")[3]) for line in lines[1:]])
    return (re_vals + 1j * im_vals).reshape(grid.n, modes.n_z)


def read_field_csv(path, grid, modes) -> np.ndarray:
    lines = Path(path).read_text(encoding="utf-8").strip().splitlines()
    if lines[0].strip() != "r,z,value":
        raise ValueError(f"{path}: expected header 'r,z,value'")
    vals = np.array([float(line.split(",")[2]) for line in lines[1:]])
    return vals.reshape(grid.n, modes.n_z)


def write_forcing_json(path, grid, modes, forcing) -> None:
    data = {
        "r": grid.nodes,
        "z": modes.z,
        "fr": forcing.fr,
        "ftheta": forcing.ftheta,
        "fz": forcing.fz,
    }
    write_report(data, path)


def read_forcing_json(path, grid, modes):
    from .fields import ForcingField
    data = read_report(path)
    shape = (grid.n, modes.n_z)
    arrays = {}
    for key in ("fr", "ftheta", "fz"):
        arr = np.asarray(data[key], float)
        if arr.shape != shape:
            raise ValueError(f"{path}: component {key} has shape {arr.shape}, expected {shape}")
        arrays[key] = arr
    return ForcingField.from_components(arrays["fr"], arrays["ftheta"], arrays["fz"], modes)


def write_state_json(path, grid, modes, state) -> None:
    data = {
        "r": grid.nodes,
        "frequencies": modes.frequencies,
        "psi_re": state.psi_modes.real,
        "psi_im": state.psi_modes.imag,
        "swirl_re": state.swirl_modes.real,
        "swirl_im": state.swirl_modes.imag,
    }
    write_report(data, path)
