"""Client-side tagging protocol over the simulated overlay.

Each name owns up to four blocks (see ``overlay.BlockType``): the tags of
a resource, the resources of a tag, the related tags of a tag, and the
resource URI. All graph state lives in those blocks; a client holds no
state of its own beyond its RNG and nonce counter.

Cost model, in overlay lookups (block accesses):

* ``insert_resource`` with m distinct tags: 2 + 2m
* ``tag``: 4 + |S|, where S is the set of co-tags whose arcs get updated.
  In exact mode S is every other tag already on the resource; in
  approximated mode S is a uniform random subset of them of size
  min(k, count), resampled independently per operation.
* ``search_step``: 2

Exact mode mirrors ``graphs.TaggingModel`` arc for arc. Approximated mode
bounds the per-operation fan-out by k and also changes how arcs grow:
instead of copying edge weights and counting one token per operation, the
client writes pair bits in both directions of every sampled co-tag, with
nonces derived from the resource name. A given (tag pair, resource)
combination therefore contributes at most one unit to each arc direction
no matter how often or how concurrently it is sampled, which keeps every
decoded weight at or below the count of shared resources - itself a lower
bound on the exact weight. The price is resolution: approximated arc
weights count co-occurrence resources seen, not tag applications.
"""

from __future__ import annotations

import itertools
import random
import threading
from dataclasses import dataclass
from typing import Iterable, Sequence

from .errors import DecodeError, UnknownResourceError, ValidationError
from .graphs import FolksonomyGraph, TagResourceGraph, normalize_name
from .overlay import BlockType, OverlayKey, OverlayStore, Token, derive_key

EXACT = "exact"
APPROXIMATED = "approximated"


def resource_tags_key(resource: str) -> OverlayKey:
    return derive_key(resource, BlockType.RESOURCE_TAGS)


def tag_resources_key(tag: str) -> OverlayKey:
    return derive_key(tag, BlockType.TAG_RESOURCES)


def tag_neighbors_key(tag: str) -> OverlayKey:
    return derive_key(tag, BlockType.TAG_NEIGHBORS)


def resource_uri_key(resource: str) -> OverlayKey:
    return derive_key(resource, BlockType.RESOURCE_URI)


def _pair_bit_nonce(resource: str, target: str) -> str:
    # One unit of forward arc weight per (arc, resource): writers that race
    # on the same resource produce the same token and collapse.
    return f"co:{resource}|{target}"


@dataclass(frozen=True)
class ProtocolConfig:
    """Client behavior switches.

    mode: ``exact`` or ``approximated``.
    k: approximated-mode fan-out bound (ignored in exact mode).
    rng_seed: seeds the per-client subset sampler.
    get_cap: optional entry cap applied to search reads. Navigation used
        for evaluation must leave this unset so intersections see full
        blocks.
    """

    mode: str = EXACT
    k: int = 1
    rng_seed: int = 0
    get_cap: int | None = None

    def __post_init__(self) -> None:
        if self.mode not in (EXACT, APPROXIMATED):
            raise ValidationError(f"unknown mode {self.mode!r}")
        if self.k < 1:
            raise ValidationError("k must be at least 1")
        if self.get_cap is not None and self.get_cap < 1:
            raise ValidationError("get_cap must be at least 1")


@dataclass(frozen=True)
class SearchStepResult:
    """Both reads behind one navigation step, ranked and totalled."""

    related_tags: list[tuple[str, int]]
    resources: list[tuple[str, int]]
    total_tags: int
    total_resources: int


class ProtocolClient:
    """Issues protocol operations against a store and pays their lookups."""

    def __init__(
        self,
        store: OverlayStore,
        config: ProtocolConfig | None = None,
        client_id: str = "c0",
    ) -> None:
        self.store = store
        self.config = config or ProtocolConfig()
        self._client_id = client_id
        self._rng = random.Random(self.config.rng_seed)
        self._seq = itertools.count()
        self._nonce_lock = threading.Lock()

    def _next_nonce(self) -> str:
        with self._nonce_lock:
            return f"{self._client_id}.{next(self._seq)}"

    # -- write operations ------------------------------------------------------

    def insert_resource(self, resource: str, uri: str, tags: Iterable[str]) -> None:
        """Publish a brand-new resource with its initial tag list.

        Costs exactly 2 + 2m lookups for m distinct tags: the URI write,
        the batched resource-tags write, one tag-resources write per tag
        and one related-tags write per tag (each batching that tag's
        co-tags). The caller is responsible for not re-inserting an
        existing resource name; merging belongs to ``tag``.
        """
        r = normalize_name(resource)
        if not isinstance(uri, str) or not uri:
            raise ValidationError("resource URI must be a non-empty string")
        seen: set[str] = set()
        tag_list: list[str] = []
        for raw in tags:
            t = normalize_name(raw)
            if t not in seen:
                seen.add(t)
                tag_list.append(t)
        if not tag_list:
            raise ValidationError("a resource must be inserted with at least one tag")

        self.store.put_token(resource_uri_key(r), Token(uri, self._next_nonce()))
        self.store.put_tokens(
            resource_tags_key(r),
            [Token(t, self._next_nonce()) for t in tag_list],
        )
        for t in tag_list:
            self.store.put_token(tag_resources_key(t), Token(r, self._next_nonce()))
        for t in tag_list:
            self.store.put_tokens(
                tag_neighbors_key(t),
                [
                    Token(other, _pair_bit_nonce(r, other))
                    for other in tag_list
                    if other != t
                ],
            )

    def tag(
        self,
        resource: str,
        tag: str,
        subset: Sequence[str] | None = None,
    ) -> None:
        """Apply one tag to an already-inserted resource.

        Costs exactly 4 + |S| lookups: the resource-tags and tag-resources
        writes, the resource-tags read that reveals the co-tags, the
        batched related-tags write for the tagged tag, then one write per
        chosen co-tag.

        ``subset`` (approximated mode only) injects a pre-sampled co-tag
        subset instead of drawing one, which lets a driver dispatch a
        fixed multiset of operations across threads and still land on one
        well-defined result.
        """
        r = normalize_name(resource)
        t = normalize_name(tag)
        exact = self.config.mode == EXACT
        if subset is not None and exact:
            raise ValidationError("subset injection requires approximated mode")
        rbar = resource_tags_key(r)
        if not self.store.has_block(rbar):
            raise UnknownResourceError(f"resource {r!r} was never inserted")

        self.store.put_token(rbar, Token(t, self._next_nonce()))
        self.store.put_token(tag_resources_key(t), Token(r, self._next_nonce()))
        weights = self.store.read_block_weights(rbar)
        assert weights is not None  # the block exists: we just wrote to it
        co_tags = [other for other in weights if other != t]

        if exact:
            chosen = co_tags
            # First application of t to r copies each co-tag's edge weight
            # into the forward arcs; later applications leave them alone.
            # Our own token is the only one on t exactly in the fresh case.
            if weights[t] == 1:
                forward = [
                    Token(other, self._next_nonce())
                    for other in chosen
                    for _ in range(weights[other])
                ]
            else:
                forward = []
        else:
            if subset is not None:
                cleaned: list[str] = []
                for raw in subset:
                    s = normalize_name(raw)
                    if s != t and s not in cleaned:
                        cleaned.append(s)
                unknown = [s for s in cleaned if s not in weights]
                if unknown:
                    raise ValidationError(
                        f"subset tags {unknown!r} are not on resource {r!r}"
                    )
                chosen = cleaned
            else:
                size = min(self.config.k, len(co_tags))
                chosen = self._rng.sample(co_tags, size)
            forward = [Token(other, _pair_bit_nonce(r, other)) for other in chosen]

        self.store.put_tokens(tag_neighbors_key(t), forward)
        reverse_nonce = None if exact else _pair_bit_nonce(r, t)
        for other in chosen:
            self.store.put_token(
                tag_neighbors_key(other),
                Token(t, reverse_nonce if reverse_nonce else self._next_nonce()),
            )

    # -- reads -----------------------------------------------------------------

    def search_step(self, tag: str) -> SearchStepResult:
        """Fetch a tag's related tags and resources. Costs 2 lookups."""
        t = normalize_name(tag)
        cap = self.config.get_cap
        related = self.store.get_block(tag_neighbors_key(t), cap=cap)
        resources = self.store.get_block(tag_resources_key(t), cap=cap)
        return SearchStepResult(
            related_tags=related.entries,
            resources=resources.entries,
            total_tags=related.total,
            total_resources=resources.total,
        )


# -- decoding: overlay state back into graphs (offline, uncounted) -------------


def decode_trg(store: OverlayStore, resources: Iterable[str]) -> TagResourceGraph:
    """Rebuild the tag-resource graph for the given resource universe.

    Block keys are digests, so the universe of names must be supplied; a
    name without blocks is simply skipped.
    """
    graph = TagResourceGraph()
    for resource in sorted({normalize_name(r) for r in resources}):
        uri_weights = store.peek_weights(resource_uri_key(resource))
        tag_weights = store.peek_weights(resource_tags_key(resource))
        if uri_weights is None and tag_weights is None:
            continue
        if uri_weights is None or not uri_weights:
            raise DecodeError(f"resource {resource!r} has tags but no URI block")
        if len(uri_weights) != 1:
            raise DecodeError(
                f"URI block of {resource!r} holds {len(uri_weights)} targets"
            )
        (uri,) = uri_weights
        graph.register_resource(resource, uri)
        for tag, weight in (tag_weights or {}).items():
            graph.bump_edge(tag, resource, weight)
    return graph


def decode_fg(store: OverlayStore, tags: Iterable[str]) -> FolksonomyGraph:
    """Rebuild the tag-tag graph for the given tag universe."""
    graph = FolksonomyGraph()
    for tag in sorted({normalize_name(t) for t in tags}):
        weights = store.peek_weights(tag_neighbors_key(tag))
        if not weights:
            continue
        for target, weight in weights.items():
            graph.bump_arc(tag, target, weight)
    return graph
