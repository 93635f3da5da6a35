"""JSON-lines dump formats for graphs and overlay state.

Tag graph dumps hold one record per tag: ``{"tag": ..., "arcs":
[{"target": ..., "weight": ...}]}``, sorted by tag and then target.
Bipartite graph dumps hold one record per resource: ``{"resource": ...,
"uri": ..., "tags": [{"tag": ..., "weight": ...}]}``, sorted likewise.
Overlay dumps hold one record per block, sorted by key digest. All files
are UTF-8 with one compact JSON object per line.
"""

from __future__ import annotations

import json
from pathlib import Path

from .errors import DecodeError
from .graphs import FolksonomyGraph, TagResourceGraph
from .overlay import OverlayStore


def _write_lines(records, path: str | Path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as handle:
        for record in records:
            handle.write(json.dumps(record, ensure_ascii=False, separators=(",", ":")))
            handle.write("\n")


def _read_lines(path: str | Path):
    with open(path, "r", encoding="utf-8") as handle:
        for lineno, line in enumerate(handle, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                yield json.loads(line)
            except json.JSONDecodeError as exc:
                raise DecodeError(f"{path}:{lineno}: not valid JSON") from exc


def write_fg_dump(fg: FolksonomyGraph, path: str | Path) -> None:
    records = []
    for tag in sorted(fg.tags()):
        arcs = fg.neighbors(tag)
        records.append(
            {
                "tag": tag,
                "arcs": [
                    {"target": target, "weight": arcs[target]}
                    for target in sorted(arcs)
                ],
            }
        )
    _write_lines(records, path)


def load_fg_dump(path: str | Path) -> FolksonomyGraph:
    fg = FolksonomyGraph()
    for record in _read_lines(path):
        try:
            tag = record["tag"]
            for arc in record["arcs"]:
                fg.bump_arc(tag, arc["target"], int(arc["weight"]))
        except (KeyError, TypeError, ValueError) as exc:
            raise DecodeError(f"{path}: malformed tag record {record!r}") from exc
    return fg


def write_trg_dump(trg: TagResourceGraph, path: str | Path) -> None:
    records = []
    for resource in sorted(trg.resources()):
        tags = {tag: trg.weight(tag, resource) for tag in trg.tags_of(resource)}
        records.append(
            {
                "resource": resource,
                "uri": trg.uri_of(resource),
                "tags": [
                    {"tag": tag, "weight": tags[tag]} for tag in sorted(tags)
                ],
            }
        )
    _write_lines(records, path)


def load_trg_dump(path: str | Path) -> TagResourceGraph:
    trg = TagResourceGraph()
    for record in _read_lines(path):
        try:
            resource = record["resource"]
            trg.register_resource(resource, record["uri"])
            for entry in record["tags"]:
                trg.bump_edge(entry["tag"], resource, int(entry["weight"]))
        except (KeyError, TypeError, ValueError) as exc:
            raise DecodeError(f"{path}: malformed resource record {record!r}") from exc
    return trg


def write_overlay_dump(store: OverlayStore, path: str | Path) -> None:
    _write_lines(store.dump_records(), path)


def load_overlay_dump(path: str | Path) -> OverlayStore:
    return OverlayStore.from_dump_records(_read_lines(path))
