"""Shared test scaffolding: seeded event scripts and twin replays.

A "script" is a list of operations, each either
``("insert", resource, uri, tags)`` for a brand-new resource or
``("tag", resource, tag)`` for a later application. Replaying the same
script through the in-memory model and through an exact-mode protocol
client must land on identical graphs; that equivalence is the backbone
of the unit and acceptance oracles.
"""

from __future__ import annotations

import random

from folkdht.evolution import register_resources
from folkdht.graphs import TaggingModel
from folkdht.overlay import OverlayStore
from folkdht.protocol import (
    APPROXIMATED,
    EXACT,
    ProtocolClient,
    ProtocolConfig,
    decode_fg,
    decode_trg,
)

Op = tuple


def random_script(
    seed: int,
    max_events: int = 300,
    max_tags: int = 40,
    max_resources: int = 30,
    max_initial_tags: int = 6,
) -> list[Op]:
    """Draw a plausible mixed insert/tag workload."""
    rng = random.Random(seed)
    tags = [f"t{i}" for i in range(rng.randint(2, max_tags))]
    script: list[Op] = []
    inserted: list[str] = []
    n_events = rng.randint(1, max_events)
    next_r = 0
    while len(script) < n_events:
        if not inserted or (next_r < max_resources and rng.random() < 0.15):
            name = f"r{next_r}"
            next_r += 1
            initial = rng.sample(tags, rng.randint(1, min(max_initial_tags, len(tags))))
            script.append(("insert", name, f"uri:{name}", initial))
            inserted.append(name)
        else:
            script.append(("tag", rng.choice(inserted), rng.choice(tags)))
    return script


def script_universe(script: list[Op]) -> tuple[list[str], list[str]]:
    """Resource and tag names touched by a script, sorted."""
    resources: set[str] = set()
    tags: set[str] = set()
    for op in script:
        if op[0] == "insert":
            resources.add(op[1])
            tags.update(op[3])
        else:
            resources.add(op[1])
            tags.add(op[2])
    return sorted(resources), sorted(tags)


def replay_model(script: list[Op]) -> TaggingModel:
    model = TaggingModel()
    for op in script:
        if op[0] == "insert":
            model.insert_resource(op[1], op[2], op[3])
        else:
            model.apply_tag(op[1], op[2])
    return model


def replay_protocol(
    script: list[Op],
    mode: str = EXACT,
    k: int = 1,
    rng_seed: int = 0,
) -> tuple[OverlayStore, ProtocolClient]:
    """Run a script through a fresh client. Re-inserts degrade to tag ops."""
    store = OverlayStore()
    client = ProtocolClient(store, ProtocolConfig(mode=mode, k=k, rng_seed=rng_seed))
    inserted: set[str] = set()
    for op in script:
        if op[0] == "insert" and op[1] not in inserted:
            client.insert_resource(op[1], op[2], op[3])
            inserted.add(op[1])
        elif op[0] == "insert":
            for t in dict.fromkeys(op[3]):
                client.tag(op[1], t)
        else:
            client.tag(op[1], op[2])
    return store, client


def decoded_graphs(store: OverlayStore, script: list[Op]):
    resources, tags = script_universe(script)
    return decode_trg(store, resources), decode_fg(store, tags)


def tag_only_script(
    seed: int,
    n_resources: int,
    tags: list[str],
    n_events: int,
) -> list[Op]:
    """Pre-registered-resources workload: tag operations only.

    Mirrors the evolution driver, which starts from registered but
    untagged resources.
    """
    rng = random.Random(seed)
    resources = [f"r{i}" for i in range(n_resources)]
    return [
        ("tag", rng.choice(resources), rng.choice(tags)) for _ in range(n_events)
    ]


def replay_tag_only(
    script: list[Op],
    mode: str = EXACT,
    k: int = 1,
    rng_seed: int = 0,
) -> OverlayStore:
    resources = sorted({op[1] for op in script})
    store = OverlayStore()
    register_resources(store, resources)
    store.reset_stats()
    client = ProtocolClient(store, ProtocolConfig(mode=mode, k=k, rng_seed=rng_seed))
    for _, resource, tag in script:
        client.tag(resource, tag)
    return store


def model_from_tag_only(script: list[Op]) -> TaggingModel:
    model = TaggingModel()
    for resource in sorted({op[1] for op in script}):
        model.trg.register_resource(resource, resource)
    for _, resource, tag in script:
        model.apply_tag(resource, tag)
    return model


__all__ = [
    "APPROXIMATED",
    "EXACT",
    "decoded_graphs",
    "model_from_tag_only",
    "random_script",
    "replay_model",
    "replay_protocol",
    "replay_tag_only",
    "script_universe",
    "tag_only_script",
]
