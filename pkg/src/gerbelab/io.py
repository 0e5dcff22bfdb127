"""JSON file formats.

Mesh::

    {"vertices": [[x, y, z], ...], "cells": [[v0, ..., vd], ...]}

Lower simplices are inferred; the vertex order of each cell is its
orientation.  Cochain::

    {"degree": k, "kind": "real" | "phase",
     "values": {"v0,v1,...": number | [re, im]}}

Keys may list the vertices in any order; the value refers to that
orientation.  A Hamiltonian family is a mesh plus ``"band"``, optional
``"gap_tol"`` and ``"matrices"``: one row-major list of ``[re, im]`` pairs
per vertex.  A unitary-lift file is a mesh plus ``"lifts"``:
``{"v,w": row-major [re, im] pairs}``.
"""

from __future__ import annotations

import json
from pathlib import Path
from typing import Any

import numpy as np

from .cochain import Cochain
from .complex import SimplicialComplex


def _read(source) -> dict:
    if isinstance(source, dict):
        return source
    return json.loads(Path(source).read_text())


def _write(data: dict, path) -> dict:
    if path is not None:
        Path(path).write_text(json.dumps(data, indent=1))
    return data


def mesh_to_dict(K: SimplicialComplex) -> dict:
    cells = []
    for row, sign in zip(K.simplices[K.dim].tolist(), K.orientation.tolist()):
        if sign < 0:
            row[0], row[1] = row[1], row[0]
        cells.append(row)
    coords = K.coords if K.coords is not None else np.zeros((K.n_vertices, 3))
    return {"vertices": coords.tolist(), "cells": cells}


def dump_mesh(K: SimplicialComplex, path=None) -> dict:
    return _write(mesh_to_dict(K), path)


def load_mesh(source) -> SimplicialComplex:
    data = _read(source)
    coords = np.asarray(data["vertices"], dtype=float)
    return SimplicialComplex(data["cells"], n_vertices=len(coords), coords=coords)


def _key(simplex) -> str:
    return ",".join(str(int(v)) for v in simplex)


def cochain_to_dict(c: Cochain) -> dict:
    values: dict[str, Any] = {}
    for simplex, v in zip(c.complex.simplices[c.degree].tolist(), c.values.tolist()):
        values[_key(simplex)] = [v.real, v.imag] if c.kind == "phase" else v
    return {"degree": c.degree, "kind": c.kind, "values": values}


def dump_cochain(c: Cochain, path=None) -> dict:
    return _write(cochain_to_dict(c), path)


def load_cochain(source, K: SimplicialComplex) -> Cochain:
    data = _read(source)
    k, kind = int(data["degree"]), data["kind"]
    if kind == "phase":
        vals = np.ones(K.count(k), dtype=complex)
    else:
        vals = np.zeros(K.count(k))
    seen = np.zeros(K.count(k), dtype=bool)
    for key, v in data["values"].items():
        simplex = [int(x) for x in key.split(",")]
        sid, sign = K.index(simplex)
        if kind == "phase":
            z = complex(v[0], v[1])
            vals[sid] = z if sign > 0 else z.conjugate()
        else:
            vals[sid] = sign * float(v)
        seen[sid] = True
    if not seen.all():
        raise ValueError(f"cochain file misses {int((~seen).sum())} simplices")
    if kind == "phase":
        vals = vals / np.abs(vals)
    return Cochain(K, k, kind, vals)


def _matrix(entries, n: int | None = None) -> np.ndarray:
    arr = np.asarray(entries, dtype=float)
    z = arr[..., 0] + 1j * arr[..., 1]
    size = int(round(np.sqrt(z.size))) if n is None else n
    return z.reshape(size, size)


def _entries(mat: np.ndarray) -> list:
    return [[z.real, z.imag] for z in np.asarray(mat).reshape(-1).tolist()]


def dump_hamiltonian(h, path=None) -> dict:
    data = mesh_to_dict(h.base)
    data.update(band=h.band, gap_tol=h.gap_tol, matrices=[_entries(m) for m in h.matrices])
    return _write(data, path)


def load_hamiltonian(source):
    from .berry import HamiltonianFamily

    data = _read(source)
    K = load_mesh(data)
    mats = np.array([_matrix(m) for m in data["matrices"]])
    return HamiltonianFamily(K, mats, band=int(data.get("band", 0)), gap_tol=data.get("gap_tol"))


def dump_lifts(K: SimplicialComplex, lifts: dict, path=None) -> dict:
    data = mesh_to_dict(K)
    data["lifts"] = {_key(e): _entries(g) for e, g in lifts.items()}
    return _write(data, path)


def load_lifts(source) -> tuple[SimplicialComplex, dict]:
    data = _read(source)
    K = load_mesh(data)
    lifts = {}
    for key, entries in data["lifts"].items():
        v, w = (int(x) for x in key.split(","))
        lifts[(v, w)] = _matrix(entries)
    return K, lifts
