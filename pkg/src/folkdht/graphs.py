"""In-memory reference model of a collaborative tagging system.

Two coupled graphs evolve as annotation events arrive:

* a bipartite tag-resource graph whose edge weight ``u(t, r)`` counts how
  many times tag ``t`` was applied to resource ``r``, and
* a directed tag-tag graph whose arc weight ``sim(t1, t2)`` accumulates,
  over the resources carrying ``t1``, the applications of ``t2``.

``TaggingModel`` owns the update rules and keeps the two graphs mutually
consistent; the bare graph classes only hold state and answer queries.
The model doubles as the correctness oracle for the distributed protocol,
which must decode back to the same graphs.

Weights are plain Python integers, so they never overflow. The classes do
no internal locking: callers must serialize mutations.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Iterator

from .errors import UnknownResourceError, ValidationError


def normalize_name(name: str) -> str:
    """Trim surrounding whitespace and reject empty names.

    No case folding or unicode normalization is applied: near-duplicate
    tags are kept distinct on purpose.
    """
    if not isinstance(name, str):
        raise ValidationError(f"name must be a string, got {type(name).__name__}")
    trimmed = name.strip()
    if not trimmed:
        raise ValidationError("names must be non-empty after trimming")
    return trimmed


@dataclass(frozen=True)
class TaggingEvent:
    """One application of a tag to a resource, optionally by a known actor."""

    resource: str
    tag: str
    actor: str | None = None


class TagResourceGraph:
    """Weighted bipartite graph between tags and resources."""

    def __init__(self) -> None:
        self._weights: dict[tuple[str, str], int] = {}
        self._res_by_tag: dict[str, set[str]] = {}
        self._tags_by_res: dict[str, set[str]] = {}
        self._uris: dict[str, str] = {}

    # -- resources ---------------------------------------------------------

    def register_resource(self, resource: str, uri: str) -> None:
        """Add a resource node. Re-registration keeps the original URI."""
        if not isinstance(uri, str) or not uri:
            raise ValidationError("resource URI must be a non-empty string")
        self._uris.setdefault(resource, uri)

    def has_resource(self, resource: str) -> bool:
        return resource in self._uris

    def uri_of(self, resource: str) -> str:
        try:
            return self._uris[resource]
        except KeyError:
            raise UnknownResourceError(f"unknown resource {resource!r}") from None

    def resources(self) -> set[str]:
        return set(self._uris)

    def tags(self) -> set[str]:
        return set(self._res_by_tag)

    # -- edges ---------------------------------------------------------------

    def bump_edge(self, tag: str, resource: str, amount: int = 1) -> int:
        """Raise u(tag, resource) by ``amount`` and return the new weight.

        The resource must have been registered first; this catches decode
        and maintenance bugs early.
        """
        if amount < 1:
            raise ValidationError("edge increments must be positive")
        if resource not in self._uris:
            raise UnknownResourceError(f"unknown resource {resource!r}")
        key = (tag, resource)
        new = self._weights.get(key, 0) + amount
        self._weights[key] = new
        if new == amount:
            self._res_by_tag.setdefault(tag, set()).add(resource)
            self._tags_by_res.setdefault(resource, set()).add(tag)
        return new

    def weight(self, tag: str, resource: str) -> int:
        return self._weights.get((tag, resource), 0)

    def tags_of(self, resource: str) -> set[str]:
        """Tags applied to ``resource`` at least once; empty set if unknown."""
        return set(self._tags_by_res.get(resource, ()))

    def res_of(self, tag: str) -> set[str]:
        """Resources carrying ``tag``; empty set for a never-used tag."""
        return set(self._res_by_tag.get(tag, ()))

    def edges(self) -> Iterator[tuple[str, str, int]]:
        for (tag, resource), w in self._weights.items():
            yield tag, resource, w

    def edge_count(self) -> int:
        return len(self._weights)

    def total_weight(self) -> int:
        return sum(self._weights.values())

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, TagResourceGraph):
            return NotImplemented
        return self._weights == other._weights and self._uris == other._uris

    def __repr__(self) -> str:  # pragma: no cover - debugging aid
        return (
            f"<TagResourceGraph resources={len(self._uris)} "
            f"tags={len(self._res_by_tag)} edges={len(self._weights)}>"
        )


class FolksonomyGraph:
    """Directed weighted tag-tag graph.

    Arcs always come in pairs: whenever (t1, t2) exists, so does (t2, t1),
    though the two weights usually differ. Self-arcs are forbidden.
    """

    def __init__(self) -> None:
        self._out: dict[str, dict[str, int]] = {}

    def bump_arc(self, source: str, target: str, amount: int = 1) -> int:
        if source == target:
            raise ValidationError(f"self arc on {source!r} is not allowed")
        if amount < 1:
            raise ValidationError("arc increments must be positive")
        row = self._out.setdefault(source, {})
        row[target] = row.get(target, 0) + amount
        return row[target]

    def arc_weight(self, source: str, target: str) -> int:
        return self._out.get(source, {}).get(target, 0)

    def neighbors(self, tag: str) -> dict[str, int]:
        """Outgoing arcs of ``tag`` as a target->weight mapping (a copy)."""
        return dict(self._out.get(tag, ()))

    def tags(self) -> set[str]:
        return set(self._out)

    def arcs(self) -> Iterator[tuple[str, str, int]]:
        for source, row in self._out.items():
            for target, w in row.items():
                yield source, target, w

    def arc_count(self) -> int:
        return sum(len(row) for row in self._out.values())

    def total_weight(self) -> int:
        return sum(w for row in self._out.values() for w in row.values())

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, FolksonomyGraph):
            return NotImplemented
        return self._out == other._out

    def __repr__(self) -> str:  # pragma: no cover - debugging aid
        return f"<FolksonomyGraph tags={len(self._out)} arcs={self.arc_count()}>"


def _dedupe(tags: Iterable[str]) -> list[str]:
    """Normalize tags and drop duplicates, keeping the first occurrence."""
    seen: set[str] = set()
    out: list[str] = []
    for raw in tags:
        t = normalize_name(raw)
        if t not in seen:
            seen.add(t)
            out.append(t)
    return out


class TaggingModel:
    """Couples the two graphs and applies the maintenance rules.

    Rules, per operation:

    * inserting a brand-new resource with tag list T creates every edge at
      weight 1 and raises both arc directions of every unordered tag pair
      of T by 1 (creating them at 1);
    * applying tag t to an existing resource r raises u(t, r) by 1, raises
      sim(tau, t) by 1 for every tag tau already on r, and, only when t is
      new to r, also raises sim(t, tau) by the current u(tau, r).

    Inserting a resource name that already exists degrades to applying its
    tags one by one; the original URI is kept.
    """

    def __init__(self) -> None:
        self.trg = TagResourceGraph()
        self.fg = FolksonomyGraph()

    def insert_resource(self, resource: str, uri: str, tags: Iterable[str]) -> None:
        r = normalize_name(resource)
        tag_list = _dedupe(tags)
        if not tag_list:
            raise ValidationError("a resource must be inserted with at least one tag")
        if self.trg.has_resource(r):
            for t in tag_list:
                self.apply_tag(r, t)
            return
        self.trg.register_resource(r, uri)
        for t in tag_list:
            self.trg.bump_edge(t, r)
        for i, t1 in enumerate(tag_list):
            for t2 in tag_list[i + 1:]:
                self.fg.bump_arc(t1, t2)
                self.fg.bump_arc(t2, t1)

    def apply_tag(self, resource: str, tag: str) -> None:
        r = normalize_name(resource)
        t = normalize_name(tag)
        if not self.trg.has_resource(r):
            raise UnknownResourceError(f"unknown resource {r!r}")
        before = self.trg.tags_of(r)
        fresh = t not in before
        self.trg.bump_edge(t, r)
        for other in before:
            if other == t:
                continue
            self.fg.bump_arc(other, t)
            if fresh:
                self.fg.bump_arc(t, other, self.trg.weight(other, r))

    def apply_event(self, event: TaggingEvent) -> None:
        self.apply_tag(event.resource, event.tag)

    # -- queries, delegated ---------------------------------------------------

    def tags_of(self, resource: str) -> set[str]:
        return self.trg.tags_of(resource)

    def res_of(self, tag: str) -> set[str]:
        return self.trg.res_of(tag)

    def similarity(self, t1: str, t2: str) -> int:
        return self.fg.arc_weight(t1, t2)

    def neighbors(self, tag: str) -> dict[str, int]:
        return self.fg.neighbors(tag)
