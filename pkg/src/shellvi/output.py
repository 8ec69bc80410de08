"""Result-file writers: legacy-ASCII VTK, CSV tables and their readers.

Floats are written with ``repr`` (shortest round-trip form), so re-parsing a
CSV reproduces the in-memory values bit-exactly; a run is byte-deterministic
once the optional timestamp line is suppressed.
"""

from __future__ import annotations

import datetime

import numpy as np

from .discretization import Mesh
from .errors import ParameterError


def _fmt(v) -> str:
    if isinstance(v, str):
        return v.replace(",", ";").replace("\n", " ")
    if isinstance(v, (bool, np.bool_)):
        return str(int(v))
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    return repr(float(v))


def export_vtk(mesh: Mesh, fields, path, points=None, title: str = "shellvi output"):
    """Write a legacy-ASCII unstructured-grid file of quad cells.

    ``fields`` is a sequence of (name, location, array) with location 'point'
    or 'cell'; arrays may be scalars (n,) or vectors (n, 3).  ``points``
    overrides the node coordinates (e.g. with mapped 3D surface positions);
    by default nodes are embedded at height zero.
    """
    fields = list(fields or [])
    for name, location, arr in fields:
        arr = np.asarray(arr)
        expect = mesh.n_nodes if location == "point" else mesh.n_elems
        if location not in ("point", "cell"):
            raise ParameterError(f"field {name!r}: location must be 'point' or 'cell'")
        if arr.shape[0] != expect or arr.ndim > 2 or (arr.ndim == 2 and arr.shape[1] != 3):
            raise ParameterError(
                f"field {name!r}: shape {arr.shape} does not match its {location} count {expect}"
            )
    if points is None:
        points = np.column_stack([mesh.nodes, np.zeros(mesh.n_nodes)])
    points = np.asarray(points, dtype=float)
    if points.shape != (mesh.n_nodes, 3):
        raise ParameterError(f"points must have shape ({mesh.n_nodes}, 3), got {points.shape}")

    lines = ["# vtk DataFile Version 3.0", title, "ASCII", "DATASET UNSTRUCTURED_GRID"]
    lines.append(f"POINTS {mesh.n_nodes} double")
    for p in points:
        lines.append(" ".join(_fmt(v) for v in p))
    lines.append(f"CELLS {mesh.n_elems} {5 * mesh.n_elems}")
    for conn in mesh.elems:
        lines.append("4 " + " ".join(str(int(n)) for n in conn))
    lines.append(f"CELL_TYPES {mesh.n_elems}")
    lines.extend(["9"] * mesh.n_elems)

    for location, count in (("point", mesh.n_nodes), ("cell", mesh.n_elems)):
        group = [(n, np.asarray(a)) for n, loc, a in fields if loc == location]
        if not group:
            continue
        lines.append(f"{'POINT_DATA' if location == 'point' else 'CELL_DATA'} {count}")
        for name, arr in group:
            if arr.ndim == 2:
                lines.append(f"VECTORS {name} double")
                for row in arr:
                    lines.append(" ".join(_fmt(v) for v in row))
            else:
                lines.append(f"SCALARS {name} double 1")
                lines.append("LOOKUP_TABLE default")
                for v in arr:
                    lines.append(_fmt(v))
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("\n".join(lines) + "\n")


def timestamp_line() -> str:
    return "# generated: " + datetime.datetime.now(datetime.timezone.utc).isoformat()


def write_csv(path, columns: dict, timestamp: bool = False):
    """Write named columns as a comma-separated table with a header row.

    Integer columns stay integers; floats use shortest round-trip formatting.
    """
    names = list(columns)
    arrays = [np.asarray(columns[n]) for n in names]
    n = arrays[0].shape[0] if arrays else 0
    for name, arr in zip(names, arrays):
        if arr.shape[0] != n:
            raise ParameterError(f"column {name!r} has length {arr.shape[0]}, expected {n}")
    with open(path, "w", encoding="utf-8") as fh:
        if timestamp:
            fh.write(timestamp_line() + "\n")
        fh.write(",".join(names) + "\n")
        for k in range(n):
            fh.write(",".join(_fmt(arr[k]) for arr in arrays) + "\n")


def read_csv(path) -> dict:
    """Read a CSV written by :func:`write_csv` back into named float arrays."""
    with open(path, "r", encoding="utf-8") as fh:
        lines = [ln.rstrip("\n") for ln in fh if ln.strip() and not ln.startswith("#")]
    if not lines:
        return {}
    names = lines[0].split(",")
    cols = {name: [] for name in names}
    for ln in lines[1:]:
        for name, tok in zip(names, ln.split(",")):
            cols[name].append(tok)
    out = {}
    for name, vals in cols.items():
        try:
            out[name] = np.array([float(v) for v in vals])
        except ValueError:
            out[name] = np.array(vals, dtype=object)
    return out
