"""JSON workspaces: a quiver, a modulus and named reps, complexes, morphisms and collections.

Layout (all keys optional except ``quiver``)::

    {
      "modulus": 2,
      "quiver": {"vertices": 2, "edges": [[0, 1]]},
      "reps": {"P1": {"dims": [1, 1], "maps": [[[1]]]}},
      "complexes": {
        "Y": {"terms": {"0": "S1", "1": {"dims": [0, 1], "maps": [[]]}},
              "diffs": {"1": [[], [[0]]]}}
      },
      "morphisms": {
        "f": {"source": "P2", "target": "P1", "comps": {"0": [[], [[1]]]}}
      },
      "collections": {"A2": ["P2", "P1"]}
    }

Matrices are lists of rows.  The map of an edge ``s -> t`` has shape
``dims[t] x dims[s]``; a differential ``d_n: X_n -> X_{n-1}`` and a chain-map
component in degree ``n`` are lists with one matrix per vertex.  Degrees are
string keys.  A term may be the name of a rep; a morphism endpoint may name a
rep (read as a complex in degree 0) or a complex.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

import numpy as np

from .complexes import ChainMap, Complex, concentrated
from .exactlin import Matrix, is_prime
from .quiverrep import Quiver, Rep, RepMap

BUNDLED = Path(__file__).parent / "data"


class WorkspaceError(ValueError):
    """Invalid workspace input; the message starts with the offending entry."""

    def __init__(self, where: str, msg: str):
        super().__init__(f"{where}: {msg}")
        self.where = where


@dataclass(eq=True)
class Workspace:
    modulus: int
    quiver: Quiver
    reps: dict[str, Rep] = field(default_factory=dict)
    complexes: dict[str, Complex] = field(default_factory=dict)
    morphisms: dict[str, ChainMap] = field(default_factory=dict)
    collections: dict[str, list[str]] = field(default_factory=dict)

    def names(self) -> list[str]:
        return list(self.reps) + list(self.complexes)

    def complex(self, name: str) -> Complex:
        if name in self.complexes:
            return self.complexes[name]
        if name in self.reps:
            return concentrated(self.reps[name], 0)
        raise WorkspaceError(name, "no such rep or complex")

    def morphism(self, name: str) -> ChainMap:
        if name not in self.morphisms:
            raise WorkspaceError(name, "no such morphism")
        return self.morphisms[name]

    def collection(self, name: str) -> tuple[list[Complex], list[str]]:
        if name not in self.collections:
            raise WorkspaceError(name, "no such collection")
        names = self.collections[name]
        return [self.complex(n) for n in names], list(names)

    def objects(self) -> dict[str, Complex]:
        return {n: self.complex(n) for n in self.names()}


# --- parsing ------------------------------------------------------------------------------

def _int(value: Any, where: str) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise WorkspaceError(where, f"expected an integer, got {value!r}")
    return value


def _matrix(data: Any, rows: int, cols: int, p: int, where: str) -> Matrix:
    if not isinstance(data, list):
        raise WorkspaceError(where, "expected a list of rows")
    if rows == 0 or cols == 0:
        if any(isinstance(r, list) and r for r in data):
            raise WorkspaceError(where, f"expected an empty {rows}x{cols} matrix")
        return Matrix.zeros(rows, cols, p)
    if len(data) != rows or any(not isinstance(r, list) or len(r) != cols for r in data):
        raise WorkspaceError(where, f"expected shape {rows}x{cols}")
    for i, r in enumerate(data):
        for j, x in enumerate(r):
            _int(x, f"{where}[{i}][{j}]")
    return Matrix._wrap(np.array(data, dtype=np.int64).reshape(rows, cols) % p, p)


def _rep(data: Any, q: Quiver, p: int, where: str) -> Rep:
    if not isinstance(data, dict):
        raise WorkspaceError(where, "a rep is an object with 'dims' and 'maps'")
    dims = data.get("dims")
    if not isinstance(dims, list) or len(dims) != q.vertex_count:
        raise WorkspaceError(f"{where}.dims", f"expected {q.vertex_count} dimensions")
    dims = [_int(d, f"{where}.dims") for d in dims]
    if any(d < 0 for d in dims):
        raise WorkspaceError(f"{where}.dims", "dimensions must be non-negative")
    maps = data.get("maps", [[] for _ in q.edges])
    if not isinstance(maps, list) or len(maps) != len(q.edges):
        raise WorkspaceError(f"{where}.maps", f"expected one matrix per edge ({len(q.edges)})")
    mats = tuple(_matrix(m, dims[t], dims[s], p, f"{where}.maps[{k}]")
                 for k, (m, (s, t)) in enumerate(zip(maps, q.edges)))
    return Rep(q, tuple(dims), mats, p)


def _degree(key: str, where: str) -> int:
    try:
        return int(key)
    except (TypeError, ValueError):
        raise WorkspaceError(where, f"degree key {key!r} is not an integer") from None


def _vertex_maps(data: Any, src: Rep, dst: Rep, where: str) -> RepMap:
    q, p = src.quiver, src.p
    if not isinstance(data, list) or len(data) != q.vertex_count:
        raise WorkspaceError(where, f"expected one matrix per vertex ({q.vertex_count})")
    comps = [_matrix(m, dst.dims[v], src.dims[v], p, f"{where}[{v}]") for v, m in enumerate(data)]
    try:
        return RepMap(src, dst, comps)
    except ValueError as exc:
        raise WorkspaceError(where, f"not a map of representations ({exc})") from None


def _complex(data: Any, ws: Workspace, where: str) -> Complex:
    q, p = ws.quiver, ws.modulus
    if not isinstance(data, dict):
        raise WorkspaceError(where, "a complex is an object with 'terms' and 'diffs'")
    terms: dict[int, Rep] = {}
    for key, t in (data.get("terms") or {}).items():
        n = _degree(key, f"{where}.terms")
        if isinstance(t, str):
            if t not in ws.reps:
                raise WorkspaceError(f"{where}.terms.{key}", f"unknown rep {t!r}")
            terms[n] = ws.reps[t]
        else:
            terms[n] = _rep(t, q, p, f"{where}.terms.{key}")
    zero = Rep(q, (0,) * q.vertex_count, tuple(Matrix.zeros(0, 0, p) for _ in q.edges), p)
    diffs: dict[int, RepMap] = {}
    for key, d in (data.get("diffs") or {}).items():
        n = _degree(key, f"{where}.diffs")
        diffs[n] = _vertex_maps(d, terms.get(n, zero), terms.get(n - 1, zero), f"{where}.diffs.{key}")
    for n in diffs:
        if n - 1 in diffs and not (diffs[n - 1] @ diffs[n]).is_zero():
            raise WorkspaceError(f"{where}.diffs.{n}", f"d_{n - 1} d_{n} != 0 (degree {n})")
    return Complex(q, terms, diffs, p)


def _morphism(data: Any, ws: Workspace, where: str) -> ChainMap:
    if not isinstance(data, dict):
        raise WorkspaceError(where, "a morphism is an object with 'source', 'target' and 'comps'")
    ends = []
    for side in ("source", "target"):
        name = data.get(side)
        if not isinstance(name, str):
            raise WorkspaceError(f"{where}.{side}", "expected the name of a rep or complex")
        if name not in ws.reps and name not in ws.complexes:
            raise WorkspaceError(f"{where}.{side}", f"unknown object {name!r}")
        ends.append(ws.complex(name))
    X, Y = ends
    comps = {}
    for key, c in (data.get("comps") or {}).items():
        n = _degree(key, f"{where}.comps")
        comps[n] = _vertex_maps(c, X.term(n), Y.term(n), f"{where}.comps.{key}")
    try:
        return ChainMap(X, Y, comps)
    except ValueError as exc:
        raise WorkspaceError(where, f"does not commute with the differentials ({exc})") from None


def _quiver(data: Any) -> Quiver:
    if not isinstance(data, dict):
        raise WorkspaceError("quiver", "expected an object with 'vertices' and 'edges'")
    n = _int(data.get("vertices"), "quiver.vertices")
    edges = data.get("edges", [])
    if not isinstance(edges, list):
        raise WorkspaceError("quiver.edges", "expected a list of [source, target] pairs")
    pairs = []
    for k, e in enumerate(edges):
        if not isinstance(e, list) or len(e) != 2:
            raise WorkspaceError(f"quiver.edges[{k}]", "expected [source, target]")
        s, t = (_int(x, f"quiver.edges[{k}]") for x in e)
        if not (0 <= s < n and 0 <= t < n):
            raise WorkspaceError(f"quiver.edges[{k}]", f"vertex out of range 0..{n - 1}")
        pairs.append((s, t))
    try:
        return Quiver(n, tuple(pairs))
    except ValueError as exc:
        raise WorkspaceError("quiver", str(exc)) from None


def parse_workspace(data: Any) -> Workspace:
    if not isinstance(data, dict):
        raise WorkspaceError("<root>", "expected a JSON object")
    p = _int(data.get("modulus", 2), "modulus")
    if not is_prime(p):
        raise WorkspaceError("modulus", f"modulus must be prime, got {p}")
    ws = Workspace(p, _quiver(data.get("quiver")))
    seen: set[str] = set()

    def claim(name: str, section: str) -> None:
        if name in seen:
            raise WorkspaceError(f"{section}.{name}", "name already used")
        seen.add(name)

    for name, r in (data.get("reps") or {}).items():
        claim(name, "reps")
        ws.reps[name] = _rep(r, ws.quiver, p, f"reps.{name}")
    for name, c in (data.get("complexes") or {}).items():
        claim(name, "complexes")
        ws.complexes[name] = _complex(c, ws, f"complexes.{name}")
    for name, m in (data.get("morphisms") or {}).items():
        claim(name, "morphisms")
        ws.morphisms[name] = _morphism(m, ws, f"morphisms.{name}")
    for name, coll in (data.get("collections") or {}).items():
        claim(name, "collections")
        if not isinstance(coll, list) or not all(isinstance(x, str) for x in coll):
            raise WorkspaceError(f"collections.{name}", "expected a list of object names")
        for x in coll:
            if x not in ws.reps and x not in ws.complexes:
                raise WorkspaceError(f"collections.{name}", f"unknown object {x!r}")
        ws.collections[name] = list(coll)
    return ws


def load_workspace(path: str | Path) -> Workspace:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise WorkspaceError(str(path), f"cannot read file ({exc.strerror})") from None
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise WorkspaceError(f"{path}:{exc.lineno}:{exc.colno}", f"invalid JSON ({exc.msg})") from None
    return parse_workspace(data)


def bundled(name: str) -> Workspace:
    return load_workspace(BUNDLED / f"{name}.json")


# --- serialization ---------------------------------------------------------------------------

def _dump_matrix(M: Matrix) -> list[list[int]]:
    return [[int(x) for x in row] for row in M.array]


def _dump_rep(R: Rep) -> dict:
    return {"dims": list(R.dims), "maps": [_dump_matrix(m) for m in R.maps]}


def _dump_repmap(f: RepMap) -> list:
    return [_dump_matrix(c) for c in f.comps]


def _rep_ref(ws: Workspace, R: Rep):
    for name, S in ws.reps.items():
        if S == R:
            return name
    return _dump_rep(R)


def _endpoint(ws: Workspace, X: Complex) -> str:
    for name in ws.names():
        if ws.complex(name) == X:
            return name
    raise WorkspaceError("morphisms", "endpoint is not a named object")


def serialize_workspace(ws: Workspace) -> dict:
    q = ws.quiver
    out: dict[str, Any] = {
        "modulus": ws.modulus,
        "quiver": {"vertices": q.vertex_count, "edges": [list(e) for e in q.edges]},
        "reps": {n: _dump_rep(R) for n, R in ws.reps.items()},
        "complexes": {},
        "morphisms": {},
        "collections": {n: list(c) for n, c in ws.collections.items()},
    }
    for name, X in ws.complexes.items():
        out["complexes"][name] = {
            "terms": {str(n): _rep_ref(ws, X.term(n)) for n in X.degrees},
            "diffs": {str(n): _dump_repmap(d) for n, d in sorted(X.diffs.items())},
        }
    for name, f in ws.morphisms.items():
        out["morphisms"][name] = {
            "source": _endpoint(ws, f.source),
            "target": _endpoint(ws, f.target),
            "comps": {str(n): _dump_repmap(c) for n, c in sorted(f.comps.items())},
        }
    return out


def dumps_workspace(ws: Workspace) -> str:
    return json.dumps(serialize_workspace(ws), indent=2)
