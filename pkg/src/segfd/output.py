"""Result files: nodal CSV fields, JSON reports, convergence tables, PGM images."""

from __future__ import annotations

import csv
import json
from pathlib import Path

import numpy as np

from segfd.grid import make_grid
from segfd.solver import MultiField


def _fmt(v: float) -> str:
    return "%.17g" % v


def write_field_csv(path, state: MultiField, l: int) -> Path:
    """Component ``l`` (0-based) as ``x,y,value`` rows in row-major node order."""
    path = Path(path)
    x = state.grid.coords
    vals = state.values[l]
    lines = ["x,y,value"]
    for j in range(state.grid.N + 1):
        yj = _fmt(x[j])
        lines.extend(f"{_fmt(x[i])},{yj},{_fmt(vals[j, i])}" for i in range(state.grid.N + 1))
    path.write_text("\n".join(lines) + "\n")
    return path


def field_path(directory, l: int) -> Path:
    return Path(directory) / f"field_{l + 1}.csv"


def read_fields(directory, m: int | None = None, a: float | None = None) -> MultiField:
    """Reload ``field_1.csv ... field_m.csv`` written by :func:`write_field_csv`."""
    directory = Path(directory)
    if m is None:
        m = 0
        while field_path(directory, m).exists():
            m += 1
    if m == 0:
        raise FileNotFoundError(f"no field CSVs in {directory}")
    arrays = []
    grid = None
    for l in range(m):
        with open(field_path(directory, l), newline="") as fh:
            reader = csv.reader(fh)
            if next(reader) != ["x", "y", "value"]:
                raise ValueError(f"{field_path(directory, l)}: expected header x,y,value")
            rows = np.array([[float(t) for t in r] for r in reader])
        n1 = int(round(np.sqrt(len(rows))))
        if n1 * n1 != len(rows):
            raise ValueError(f"{field_path(directory, l)}: {len(rows)} rows is not a square mesh")
        if grid is None:
            grid = make_grid(float(rows[-1, 0]) if a is None else a, n1 - 1)
        elif grid.N != n1 - 1:
            raise ValueError("field files disagree on mesh size")
        X, Y = grid.mesh
        if not (np.allclose(rows[:, 0], X.ravel()) and np.allclose(rows[:, 1], Y.ravel())):
            raise ValueError(f"{field_path(directory, l)}: nodes are not in row-major order")
        arrays.append(rows[:, 2].reshape(grid.shape))
    return MultiField(grid, np.stack(arrays))


def write_json(path, doc: dict) -> Path:
    path = Path(path)
    path.write_text(json.dumps(doc, indent=2, sort_keys=True, allow_nan=True) + "\n")
    return path


def write_convergence_csv(path, report, m: int) -> Path:
    path = Path(path)
    header = ["N", "h"] + [f"err_{l + 1}" for l in range(m)] + ["bound", "iters"]
    lines = [",".join(header)]
    for r in report.rows:
        bound = "" if r.bound is None else _fmt(r.bound)
        lines.append(",".join([str(r.N), _fmt(r.h)] + [_fmt(e) for e in r.errors] + [bound, str(r.iterations)]))
    path.write_text("\n".join(lines) + "\n")
    return path


def write_pgm(path, image: np.ndarray) -> Path:
    """Binary P5 greyscale image, maxval 255; ``image[0]`` is the top row."""
    path = Path(path)
    image = np.ascontiguousarray(image, dtype=np.uint8)
    rows, cols = image.shape
    path.write_bytes(b"P5\n%d %d\n255\n" % (cols, rows) + image.tobytes())
    return path


def read_pgm(path) -> np.ndarray:
    data = Path(path).read_bytes()
    magic, dims, maxval, body = data.split(b"\n", 3)
    if magic != b"P5" or maxval != b"255":
        raise ValueError(f"{path}: not an 8-bit P5 image")
    cols, rows = (int(t) for t in dims.split())
    return np.frombuffer(body, dtype=np.uint8).reshape(rows, cols)


def density_image(values: np.ndarray) -> np.ndarray:
    """0 -> black, the field's maximum -> white; y grows upward."""
    top = values.max()
    scaled = np.zeros(values.shape) if top <= 0 else np.clip(values, 0, None) / top
    return np.rint(scaled * 255).astype(np.uint8)[::-1]


def ownership_image(values: np.ndarray) -> np.ndarray:
    """Grey level ``255*(k+1)/m`` where component ``k`` is the argmax.

    Nodes where every component vanishes are black.
    """
    m = values.shape[0]
    owner = np.argmax(values, axis=0)
    level = np.rint(255 * (owner + 1) / m)
    level[values.max(axis=0) <= 0] = 0
    return level.astype(np.uint8)[::-1]


def write_outputs(out_dir, state: MultiField, formats=("csv", "json"), report: dict | None = None,
                  study=None) -> list:
    """Write the requested artefacts of a run; returns the paths written."""
    out_dir = Path(out_dir)
    try:
        out_dir.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise OSError(f"unwritable directory {out_dir}: {exc}") from exc
    written = []
    if state is not None and "csv" in formats:
        written += [write_field_csv(field_path(out_dir, l), state, l) for l in range(state.m)]
    if study is not None and "csv" in formats:
        written.append(write_convergence_csv(out_dir / "convergence.csv", study, len(study.rows[0].errors)))
    if report is not None and "json" in formats:
        written.append(write_json(out_dir / "report.json", report))
    if state is not None and "pgm" in formats:
        for l in range(state.m):
            written.append(write_pgm(out_dir / f"field_{l + 1}.pgm", density_image(state.values[l])))
        written.append(write_pgm(out_dir / "ownership.pgm", ownership_image(state.values)))
    return written
