"""CSV and GeoJSON formats.

Nodes: ``id,x,y``. Edges: ``id,tail,head,directed,length`` with ``directed``
in ``{0,1}`` and an optional (possibly blank) ``length``. Events:
``x,y[,replicate][,mark]``.
"""

from __future__ import annotations

import csv
import json
import math
from pathlib import Path as FsPath
from typing import Iterable, Sequence

from .graph import Edge, NetworkError, SpatialNetwork, Vertex
from .pattern import Event


class FormatError(ValueError):
    pass


def fmt(value) -> str:
    """Shortest round-trip text for numbers, ``""`` for ``None``."""
    if value is None:
        return ""
    if isinstance(value, bool):
        return "1" if value else "0"
    if isinstance(value, int) or getattr(getattr(value, "dtype", None), "kind", "") in ("i", "u"):
        return str(int(value))
    if isinstance(value, str):
        return value
    return repr(float(value))


def _read_rows(path, required: Sequence[str]) -> tuple[list[str], list[tuple[int, dict]]]:
    path = FsPath(path)
    with path.open(newline="") as fh:
        reader = csv.DictReader(fh)
        header = [h.strip() for h in (reader.fieldnames or [])]
        missing = [c for c in required if c not in header]
        if missing:
            raise FormatError(f"{path.name}: missing column(s) {', '.join(missing)}")
        reader.fieldnames = header
        rows = [(i, {k: (v or "").strip() for k, v in row.items() if k is not None})
                for i, row in enumerate(reader, start=1)]
    return header, rows


def _num(path, row: int, col: str, text: str, kind=float):
    try:
        val = kind(text)
    except ValueError:
        raise FormatError(f"{FsPath(path).name} row {row}: bad {col} value {text!r}") from None
    if kind is float and not math.isfinite(val):
        raise FormatError(f"{FsPath(path).name} row {row}: non-finite {col}")
    return val


def load_network(nodes_path, edges_path) -> SpatialNetwork:
    _, node_rows = _read_rows(nodes_path, ("id", "x", "y"))
    vertices: dict[int, Vertex] = {}
    for row, rec in node_rows:
        vid = _num(nodes_path, row, "id", rec["id"], int)
        if vid in vertices:
            raise FormatError(f"{FsPath(nodes_path).name} row {row}: duplicate vertex id {vid}")
        vertices[vid] = Vertex(vid, _num(nodes_path, row, "x", rec["x"]),
                               _num(nodes_path, row, "y", rec["y"]))

    name = FsPath(edges_path).name
    header, edge_rows = _read_rows(edges_path, ("id", "tail", "head", "directed"))
    edges: list[Edge] = []
    seen_ids: set[int] = set()
    seen_pairs: dict[frozenset, int] = {}
    for row, rec in edge_rows:
        eid = _num(edges_path, row, "id", rec["id"], int)
        tail = _num(edges_path, row, "tail", rec["tail"], int)
        head = _num(edges_path, row, "head", rec["head"], int)
        if rec["directed"] not in ("0", "1"):
            raise FormatError(f"{name} row {row}: directed must be 0 or 1, got {rec['directed']!r}")
        if eid in seen_ids:
            raise FormatError(f"{name} row {row}: duplicate edge id {eid}")
        for end in (tail, head):
            if end not in vertices:
                raise FormatError(f"{name} row {row}: edge {eid} references unknown vertex {end}")
        if tail == head:
            raise FormatError(f"{name} row {row}: edge {eid} is a self-loop")
        pair = frozenset((tail, head))
        if pair in seen_pairs:
            raise FormatError(f"{name} row {row}: edge {eid} duplicates the vertex pair "
                              f"of edge {seen_pairs[pair]}")
        length = None
        if rec.get("length"):
            length = _num(edges_path, row, "length", rec["length"])
            if length <= 0:
                raise FormatError(f"{name} row {row}: nonpositive length {length}")
        seen_ids.add(eid)
        seen_pairs[pair] = eid
        edges.append(Edge(eid, tail, head, rec["directed"] == "1", length))
    try:
        return SpatialNetwork(vertices.values(), edges)
    except NetworkError as exc:
        raise FormatError(str(exc)) from None


def summary_line(net: SpatialNetwork) -> str:
    return (f"nodes={net.n_vertices} edges={net.n_edges} kind={net.kind} "
            f"mean_cg_degree={fmt(net.mean_cg_degree())}")


def save_network(net: SpatialNetwork, nodes_path, edges_path) -> None:
    write_csv(nodes_path, ("id", "x", "y"), [(v.id, v.x, v.y) for v in net.vertices])
    write_csv(edges_path, ("id", "tail", "head", "directed", "length"),
              [(e.id, e.tail, e.head, int(e.directed), e.length) for e in net.edges])


def load_events(path) -> list[Event]:
    _, rows = _read_rows(path, ("x", "y"))
    events = []
    for row, rec in rows:
        x = _num(path, row, "x", rec["x"])
        y = _num(path, row, "y", rec["y"])
        rep = rec.get("replicate") or "0"
        rep = _num(path, row, "replicate", rep, int)
        if rep < 0:
            raise FormatError(f"{FsPath(path).name} row {row}: negative replicate {rep}")
        events.append(Event(x, y, rep, rec.get("mark") or None))
    return events


def load_edge_rates(path) -> dict[int, float]:
    """``edge_id,rate`` table for the inhomogeneous simulation model."""
    _, rows = _read_rows(path, ("edge_id", "rate"))
    return {_num(path, row, "edge_id", rec["edge_id"], int): _num(path, row, "rate", rec["rate"])
            for row, rec in rows}


def save_events(events: Iterable[Event], path) -> None:
    write_csv(path, ("x", "y", "replicate", "mark"),
              [(ev.x, ev.y, ev.replicate, ev.mark) for ev in events])


def write_csv(path, header: Sequence[str], rows: Iterable[Sequence]) -> None:
    with FsPath(path).open("w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([fmt(v) for v in row])


def node_geojson(net: SpatialNetwork, rows: Iterable[dict]) -> dict:
    """Point features for node-level results; each row needs ``vertex_id``."""
    features = []
    for props in rows:
        v = net.vertex(props["vertex_id"])
        clean = {k: _json_value(val) for k, val in props.items()}
        features.append({
            "type": "Feature",
            "geometry": {"type": "Point", "coordinates": [v.x, v.y]},
            "properties": clean,
        })
    return {"type": "FeatureCollection", "features": features}


def _json_value(val):
    if val is None or isinstance(val, (str, bool, int)):
        return val
    x = float(val)
    return x if math.isfinite(x) else None


def write_json(path, obj) -> None:
    with FsPath(path).open("w") as fh:
        json.dump(obj, fh, indent=2, sort_keys=True, allow_nan=False)
        fh.write("\n")
