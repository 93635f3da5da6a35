"""Annotation datasets: TSV triples, aggregation, synthesis, statistics.

A dataset is an ordered list of (user, item, tag) annotations. The tag
and resource universes are the projections of that list. Aggregating a
dataset produces the reference graphs directly: edge weights count the
triples per (tag, item) pair and arc weights follow the closed form
``sim(t1, t2) = sum over resources carrying t1 of u(t2, r)``.

Items double as their own URIs here; annotation exports carry no URI
column, and nothing downstream needs more than a stable non-empty value.
"""

from __future__ import annotations

import hashlib
from collections import Counter
from dataclasses import dataclass
from math import sqrt
from pathlib import Path

import numpy as np

from .errors import ValidationError
from .graphs import FolksonomyGraph, TagResourceGraph

_MAX_REPORTED_BAD_LINES = 10


@dataclass(frozen=True)
class AnnotationTriple:
    user: str
    item: str
    tag: str


@dataclass
class Dataset:
    events: list[AnnotationTriple]

    @property
    def tags(self) -> set[str]:
        return {e.tag for e in self.events}

    @property
    def resources(self) -> set[str]:
        return {e.item for e in self.events}

    def content_hash(self) -> str:
        """SHA-256 over the canonical TSV serialization."""
        digest = hashlib.sha256()
        for e in self.events:
            digest.update(f"{e.user}\t{e.item}\t{e.tag}\n".encode("utf-8"))
        return digest.hexdigest()


def load_triples(path: str | Path, strict: bool = True) -> Dataset:
    """Parse a headerless TSV of user, item, tag rows.

    A malformed line has anything other than three tab-separated fields,
    or a field that is empty once trimmed. In strict mode any malformed
    line fails the load with the offending line numbers; otherwise they
    are skipped.
    """
    events: list[AnnotationTriple] = []
    bad: list[int] = []
    with open(path, "r", encoding="utf-8") as handle:
        for lineno, line in enumerate(handle, start=1):
            row = line.rstrip("\n").rstrip("\r")
            if not row:
                bad.append(lineno)
                continue
            fields = row.split("\t")
            if len(fields) != 3:
                bad.append(lineno)
                continue
            user, item, tag = (f.strip() for f in fields)
            if not user or not item or not tag:
                bad.append(lineno)
                continue
            events.append(AnnotationTriple(user, item, tag))
    if bad and strict:
        shown = ", ".join(str(n) for n in bad[:_MAX_REPORTED_BAD_LINES])
        more = "" if len(bad) <= _MAX_REPORTED_BAD_LINES else f" (+{len(bad) - _MAX_REPORTED_BAD_LINES} more)"
        raise ValidationError(
            f"{len(bad)} malformed line(s) in {path}: lines {shown}{more}"
        )
    return Dataset(events)


def write_triples(dataset: Dataset, path: str | Path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as handle:
        for e in dataset.events:
            handle.write(f"{e.user}\t{e.item}\t{e.tag}\n")


def aggregate(dataset: Dataset) -> tuple[TagResourceGraph, FolksonomyGraph]:
    """Fold a dataset into the reference graphs, order independently."""
    per_resource: dict[str, Counter[str]] = {}
    for e in dataset.events:
        per_resource.setdefault(e.item, Counter())[e.tag] += 1

    trg = TagResourceGraph()
    fg = FolksonomyGraph()
    for item, tag_counts in per_resource.items():
        trg.register_resource(item, item)
        for tag, count in tag_counts.items():
            trg.bump_edge(tag, item, count)
        tags = list(tag_counts)
        for t1 in tags:
            for t2 in tags:
                if t1 != t2:
                    fg.bump_arc(t1, t2, tag_counts[t2])
    return trg, fg


# -- synthetic generation ---------------------------------------------------------


@dataclass(frozen=True)
class SynthConfig:
    """Knobs for the seeded generator.

    Popularity exponents control bounded power-law rank weights: rank j
    is drawn with probability proportional to j**-(1 + exponent). Larger
    values concentrate the head; at 1.0 the tag frequencies come out with
    a heavy head and a long tail of tags seen only once or twice. The
    resource exponent shapes how many extra annotations (beyond the one
    guaranteed per resource) pile onto popular items, and with them the
    tags-per-resource distribution.

    With ``vocab_cap`` set, each resource instead converges on a bounded
    shortlist of distinct tags: shortlist members are drawn by rank weight
    under ``vocab_exponent`` (typically flatter than event popularity, so
    niche tags still surface somewhere), every member is applied once, and
    the remaining annotations repeat members proportionally to their global
    popularity. Lightly-tagged resources then carry a handful of one-shot
    tags while popular resources pile repeat applications onto the same few
    tags, instead of accumulating ever more distinct ones.
    """

    n_tags: int
    n_resources: int
    n_events: int
    tag_popularity_exponent: float = 1.0
    resource_popularity_exponent: float = 0.25
    rng_seed: int = 0
    vocab_cap: int | None = None
    vocab_exponent: float = 0.2

    def __post_init__(self) -> None:
        if self.n_tags < 1 or self.n_resources < 1 or self.n_events < 1:
            raise ValidationError("universe sizes and event count must be positive")
        if self.n_events < self.n_resources:
            raise ValidationError(
                "need at least one event per resource (n_events >= n_resources)"
            )
        if self.tag_popularity_exponent <= 0 or self.resource_popularity_exponent <= 0:
            raise ValidationError("popularity exponents must be positive")
        if self.vocab_cap is not None and self.vocab_cap < 2:
            raise ValidationError(
                "vocab cap must be at least 2 (one-tag shortlists cannot co-occur)"
            )
        if self.vocab_exponent <= 0:
            raise ValidationError("popularity exponents must be positive")


def _rank_weights(n: int, exponent: float) -> np.ndarray:
    ranks = np.arange(1, n + 1, dtype=np.float64)
    weights = ranks ** -(1.0 + exponent)
    return weights / weights.sum()


def generate_synthetic(config: SynthConfig) -> Dataset:
    """Draw a dataset with Zipf-ish tag and resource popularity.

    Every resource receives at least one annotation; the remaining events
    land on resources by rank weight. The same seed always yields the
    same event list.
    """
    rng = np.random.default_rng(config.rng_seed)
    tag_p = _rank_weights(config.n_tags, config.tag_popularity_exponent)
    res_p = _rank_weights(config.n_resources, config.resource_popularity_exponent)

    extra = config.n_events - config.n_resources
    res_idx = np.concatenate(
        [
            np.arange(config.n_resources, dtype=np.int64),
            rng.choice(config.n_resources, size=extra, p=res_p),
        ]
    )
    if config.vocab_cap is None:
        tag_idx = rng.choice(config.n_tags, size=config.n_events, p=tag_p)
    else:
        tag_idx = _shortlisted_tags(config, rng, res_idx, tag_p)
    n_users = max(1, config.n_events // 20)
    user_idx = rng.integers(0, n_users, size=config.n_events)
    order = rng.permutation(config.n_events)

    tag_w = len(str(config.n_tags))
    res_w = len(str(config.n_resources))
    user_w = len(str(n_users))
    events = [
        AnnotationTriple(
            f"u{user_idx[i] + 1:0{user_w}d}",
            f"r{res_idx[i] + 1:0{res_w}d}",
            f"t{tag_idx[i] + 1:0{tag_w}d}",
        )
        for i in order
    ]
    return Dataset(events)


def _shortlisted_tags(
    config: SynthConfig,
    rng: np.random.Generator,
    res_idx: np.ndarray,
    tag_p: np.ndarray,
) -> np.ndarray:
    """Tag indices for each event slot under the bounded-shortlist model.

    Each resource keeps at most ``vocab_cap`` distinct tags: the shortlist
    is filled with distinct draws under the vocab rank weights, applied
    once each, and any further annotations repeat shortlist members with
    probability proportional to their global popularity.
    """
    counts = np.bincount(res_idx, minlength=config.n_resources)
    sizes = np.minimum(counts, config.vocab_cap)

    # One big candidate pool beats 20k tiny weighted draws; refill the pool
    # in the (rare) case duplicates exhaust it before a shortlist is full.
    vocab_p = _rank_weights(config.n_tags, config.vocab_exponent)
    pool = rng.choice(config.n_tags, size=int(sizes.sum()) * 2 + 16, p=vocab_p)
    cursor = 0

    tag_idx = np.empty(len(res_idx), dtype=np.int64)
    slots: dict[int, list[int]] = {}
    for r in range(config.n_resources):
        members: list[int] = []
        seen: set[int] = set()
        while len(members) < sizes[r]:
            if cursor >= len(pool):
                pool = rng.choice(config.n_tags, size=len(pool), p=vocab_p)
                cursor = 0
            t = int(pool[cursor])
            cursor += 1
            if t not in seen:
                seen.add(t)
                members.append(t)
        picks = list(members)
        repeats = counts[r] - len(members)
        if repeats > 0:
            w = tag_p[members]
            picks.extend(
                int(members[j])
                for j in rng.choice(len(members), size=repeats, p=w / w.sum())
            )
        slots[r] = picks
    for i, r in enumerate(res_idx):
        tag_idx[i] = slots[r].pop()
    return tag_idx


# -- degree statistics -------------------------------------------------------------


@dataclass(frozen=True)
class DegreeSummary:
    mean: float
    sigma: float  # population standard deviation
    max_value: int


@dataclass(frozen=True)
class DegreeStats:
    """Distributions of tags per resource, resources per tag and tag degree."""

    tags_per_resource: DegreeSummary
    resources_per_tag: DegreeSummary
    fg_neighbors: DegreeSummary
    tags_per_resource_cdf: list[tuple[int, float]]
    resources_per_tag_cdf: list[tuple[int, float]]
    fg_neighbors_cdf: list[tuple[int, float]]

    def rounded_rows(self) -> list[tuple[str, int, int, int]]:
        """Table rows (metric, tags_r, res_t, nfg_t) with integers."""
        def row(name: str, pick) -> tuple[str, int, int, int]:
            return (
                name,
                round(pick(self.tags_per_resource)),
                round(pick(self.resources_per_tag)),
                round(pick(self.fg_neighbors)),
            )

        return [
            row("mean", lambda s: s.mean),
            row("sigma", lambda s: s.sigma),
            row("max", lambda s: s.max_value),
        ]


def _summary(values: list[int]) -> DegreeSummary:
    n = len(values)
    if n == 0:
        return DegreeSummary(0.0, 0.0, 0)
    mean = sum(values) / n
    variance = sum((v - mean) ** 2 for v in values) / n
    return DegreeSummary(mean, sqrt(variance), max(values))


def cdf_points(values: list[int]) -> list[tuple[int, float]]:
    """Cumulative fractions at each distinct value, ascending."""
    if not values:
        return []
    counts = Counter(values)
    total = len(values)
    points = []
    running = 0
    for value in sorted(counts):
        running += counts[value]
        points.append((value, running / total))
    return points


def degree_stats(trg: TagResourceGraph, fg: FolksonomyGraph) -> DegreeStats:
    """Summarize the three degree families over the full tag universe.

    Tags that never co-occur with another tag count as degree 0 in the
    tag-graph family.
    """
    tags_r = [len(trg.tags_of(r)) for r in sorted(trg.resources())]
    tags = sorted(trg.tags())
    res_t = [len(trg.res_of(t)) for t in tags]
    nfg_t = [len(fg.neighbors(t)) for t in tags]
    return DegreeStats(
        tags_per_resource=_summary(tags_r),
        resources_per_tag=_summary(res_t),
        fg_neighbors=_summary(nfg_t),
        tags_per_resource_cdf=cdf_points(tags_r),
        resources_per_tag_cdf=cdf_points(res_t),
        fg_neighbors_cdf=cdf_points(nfg_t),
    )
