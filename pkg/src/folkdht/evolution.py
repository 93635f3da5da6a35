"""Replaying a dataset through the protocol, from an empty graph.

The run starts from a fully disconnected state: every resource is
pre-registered with its URI and an empty tag block so that tagging
operations find their target. Registration writes are excluded from the
lookup accounting. The annotation instances are then applied one by one
in a seeded uniform shuffle; drawing without replacement in proportion
to the remaining instance counts is exactly that shuffle, so the cheap
form is used. The same sampled order is replayed for every fan-out bound
in the sweep, which isolates the effect of the bound.
"""

from __future__ import annotations

import random
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Sequence

from .dataset import Dataset
from .errors import ValidationError
from .graphs import FolksonomyGraph, TagResourceGraph, TaggingEvent
from .overlay import OverlayStore, Token
from .protocol import (
    APPROXIMATED,
    EXACT,
    ProtocolClient,
    ProtocolConfig,
    decode_fg,
    decode_trg,
    resource_tags_key,
    resource_uri_key,
)

EXACT_LABEL = "exact"


@dataclass(frozen=True)
class EvolutionConfig:
    """Sweep settings. In exact mode the k values are ignored."""

    mode: str = APPROXIMATED
    k_values: tuple[int, ...] = (1,)
    rng_seed: int = 0
    get_cap: int | None = None

    def __post_init__(self) -> None:
        if self.mode not in (EXACT, APPROXIMATED):
            raise ValidationError(f"unknown mode {self.mode!r}")
        if self.mode == APPROXIMATED:
            if not self.k_values:
                raise ValidationError("need at least one k value")
            if any(k < 1 for k in self.k_values):
                raise ValidationError("k values must be positive")


@dataclass
class RunResult:
    """Decoded outcome of one replay."""

    label: str
    k: int | None
    fg: FolksonomyGraph
    trg: TagResourceGraph
    lookups: int
    events: int
    store: OverlayStore | None = None


@dataclass
class EvolutionResult:
    events: int
    runs: dict[str, RunResult] = field(default_factory=dict)


def sample_event_order(dataset: Dataset, rng_seed: int) -> list[TaggingEvent]:
    """Seeded uniform shuffle of the annotation instances."""
    order = [TaggingEvent(e.item, e.tag, e.user) for e in dataset.events]
    random.Random(rng_seed).shuffle(order)
    return order


def register_resources(store: OverlayStore, resources: Sequence[str]) -> None:
    """Create the URI block and an empty tag block for every resource."""
    for resource in resources:
        store.put_token(resource_uri_key(resource), Token(resource, f"reg:{resource}"))
        store.ensure_block(resource_tags_key(resource))


def _client_seed(rng_seed: int, k: int) -> int:
    return rng_seed * 1_000_003 + k


def replay(
    dataset: Dataset,
    order: Sequence[TaggingEvent],
    config: ProtocolConfig,
    label: str,
    keep_store: bool = False,
) -> RunResult:
    store = OverlayStore()
    resources = sorted(dataset.resources)
    register_resources(store, resources)
    store.reset_stats()
    client = ProtocolClient(store, config)
    for event in order:
        client.tag(event.resource, event.tag)
    lookups = store.read_stats().lookup_count
    fg = decode_fg(store, dataset.tags)
    trg = decode_trg(store, resources)
    return RunResult(
        label=label,
        k=None if config.mode == EXACT else config.k,
        fg=fg,
        trg=trg,
        lookups=lookups,
        events=len(order),
        store=store if keep_store else None,
    )


def run_evolution(
    dataset: Dataset, config: EvolutionConfig, keep_stores: bool = False
) -> EvolutionResult:
    """Replay the dataset once per configured run, under one event order."""
    if not dataset.events:
        raise ValidationError("cannot evolve an empty dataset")
    order = sample_event_order(dataset, config.rng_seed)
    result = EvolutionResult(events=len(order))
    if config.mode == EXACT:
        proto = ProtocolConfig(
            mode=EXACT, rng_seed=_client_seed(config.rng_seed, 0), get_cap=config.get_cap
        )
        result.runs[EXACT_LABEL] = replay(dataset, order, proto, EXACT_LABEL, keep_stores)
        return result
    for k in config.k_values:
        proto = ProtocolConfig(
            mode=APPROXIMATED,
            k=k,
            rng_seed=_client_seed(config.rng_seed, k),
            get_cap=config.get_cap,
        )
        label = f"k{k}"
        result.runs[label] = replay(dataset, order, proto, label, keep_stores)
    return result


def dispatch_tag_ops(
    client: ProtocolClient,
    ops: Sequence[tuple[str, str, Sequence[str] | None]],
    workers: int = 1,
) -> None:
    """Apply (resource, tag, subset) operations through a worker pool.

    With pre-sampled subsets every operation contributes a fixed token
    delta, so the decoded weights are the same for any worker count.
    """
    if workers < 1:
        raise ValidationError("worker count must be positive")
    if workers == 1:
        for resource, tag, subset in ops:
            client.tag(resource, tag, subset=subset)
        return
    with ThreadPoolExecutor(max_workers=workers) as pool:
        futures = [
            pool.submit(client.tag, resource, tag, subset)
            for resource, tag, subset in ops
        ]
        for future in futures:
            future.result()
