"""CSV writers and readers for solutions, convergence tables and stability scans.

Floats are written with 17 significant digits so that reading a file back
reproduces every value bit for bit.
"""
from __future__ import annotations

import csv
import json
from pathlib import Path

import numpy as np

from .mesh import AFState1D, AFState2D, BoundaryCondition, FarField, Grid1D, Periodic

FMT = "%.17g"


def _f(v) -> str:
    return FMT % float(v)


def solution_rows(state, grid, bc: BoundaryCondition = Periodic()):
    """Yield CSV rows (without header) for a 1D or 2D state."""
    if isinstance(state, AFState1D):
        xp = grid.point_coords(bc)
        xc = grid.centers
        for i in range(grid.n_cells):
            yield (_f(xp[i]), "point", _f(state.points[i]))
            yield (_f(xc[i]), "avg", _f(state.averages[i]))
        if len(state.points) > grid.n_cells:
            yield (_f(xp[-1]), "point", _f(state.points[-1]))
        return
    xe, ye = grid.x_axis.point_coords(bc), grid.y_axis.point_coords(bc)
    xc, yc = grid.x_axis.centers, grid.y_axis.centers
    families = (
        ("avg", xc, yc, state.averages),
        ("face_x", xe, yc, state.face_x),
        ("face_y", xc, ye, state.face_y),
        ("corner", xe, ye, state.corners),
    )
    for kind, xs, ys, vals in families:
        for i in range(vals.shape[0]):
            for j in range(vals.shape[1]):
                yield (_f(xs[i]), _f(ys[j]), kind, _f(vals[i, j]))


def write_solution_csv(state, grid, t: float, path, bc: BoundaryCondition = Periodic()) -> Path:
    path = Path(path)
    header = ["x", "kind", "u"] if isinstance(state, AFState1D) else ["x", "y", "kind", "u"]
    with path.open("w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        fh.write(f"# t={_f(t)}\n")
        w.writerow(header)
        w.writerows(solution_rows(state, grid, bc))
    return path


def read_solution_csv(path):
    """Return ``(t, {kind: (coords, values)})`` with coordinates as a tuple of arrays."""
    with Path(path).open() as fh:
        first = fh.readline().strip()
        t = float(first.split("=", 1)[1])
        rows = list(csv.DictReader(fh))
    out = {}
    for r in rows:
        coord = (float(r["x"]),) if "y" not in r else (float(r["x"]), float(r["y"]))
        out.setdefault(r["kind"], []).append(coord + (float(r["u"]),))
    tables = {}
    for kind, items in out.items():
        arr = np.array(items, dtype=float)
        tables[kind] = (tuple(arr[:, k] for k in range(arr.shape[1] - 1)), arr[:, -1])
    return t, tables


def state_from_csv(path, grid):
    """Rebuild an AFState1D/AFState2D written by :func:`write_solution_csv`."""
    t, tables = read_solution_csv(path)
    if isinstance(grid, Grid1D):
        return t, AFState1D(tables["avg"][1], tables["point"][1])
    shape = lambda kind, nx, ny: tables[kind][1].reshape(nx, ny)
    nx, ny = grid.n_x, grid.n_y
    nfx = len(tables["face_x"][1]) // ny
    nfy = len(tables["face_y"][1]) // nx
    return t, AFState2D(
        shape("avg", nx, ny), shape("face_x", nfx, ny), shape("face_y", nx, nfy), shape("corner", nfx, nfy)
    )


def _write(path, header, rows) -> Path:
    path = Path(path)
    with path.open("w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        w.writerows(rows)
    return path


def write_convergence_csv(table, path) -> Path:
    rows = []
    for row in table.rows:
        if row.norms is None:
            rows.append(["", "unstable", "", "", "", "", ""])
            continue
        n = row.norms
        rows.append([n.n, _f(n.l2_avg), _f(row.rate_avg), _f(n.l2_pnt), _f(row.rate_pnt),
                     _f(n.linf_avg), _f(n.linf_pnt)])
    return _write(path, ["n", "l2_avg", "rate_avg", "l2_pnt", "rate_pnt", "linf_avg", "linf_pnt"], rows)


def write_cfl_csv(entries, path) -> Path:
    """``entries``: iterable of (variant, rk_order, max_cfl)."""
    rows = [[str(v), int(rk), _f(c)] for v, rk, c in entries]
    return _write(path, ["variant", "rk", "max_cfl"], rows)


def write_region_csv(region, path) -> Path:
    rows = [[_f(na), _f(nb), _f(th), int(st)] for na, nb, th, st in region.rows()]
    return _write(path, ["nu_a", "nu_b", "theta", "stable"], rows)


def read_table_csv(path) -> list[dict]:
    with Path(path).open() as fh:
        return list(csv.DictReader(fh))


def bc_label(bc) -> str:
    if isinstance(bc, FarField):
        return f"far field u={bc.value!r}"
    return "periodic"


def write_metadata(meta: dict, path) -> Path:
    path = Path(path)
    path.write_text(json.dumps(meta, indent=2, sort_keys=True, default=str) + "\n")
    return path
