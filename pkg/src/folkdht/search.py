"""Faceted navigation over the tag graphs.

A session starts from one tag and keeps two shrinking views: the
candidate tags (neighbors of the start tag, intersected with each
refinement's neighborhood, minus everything already on the path) and the
matching resources (intersection of the resource sets of every tag on the
path). Each refinement must pick a current candidate, so the candidate
set loses at least that tag per step and navigation always terminates.

Sources are interchangeable: ``GraphSource`` answers from in-memory
graphs at zero lookup cost, ``ProtocolSource`` pays two overlay lookups
per fetched tag. With uncapped reads both yield identical traces.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from enum import Enum
from typing import Protocol, TextIO

from .errors import UnknownTagError, ValidationError
from .graphs import FolksonomyGraph, TagResourceGraph, normalize_name
from .protocol import ProtocolClient, tag_resources_key


@dataclass(frozen=True)
class StopCriteria:
    """Session is terminal once either view is small enough."""

    tag_floor: int = 1
    resource_floor: int = 10

    def __post_init__(self) -> None:
        if self.tag_floor < 1 or self.resource_floor < 1:
            raise ValidationError("stop floors must be at least 1")


class Strategy(Enum):
    """Scripted refinement policies used by the simulator."""

    FIRST_TAG = "first"    # strongest displayed candidate
    LAST_TAG = "last"      # weakest displayed candidate
    RANDOM_TAG = "random"  # uniform over the displayed candidates


class SearchSource(Protocol):
    def has_tag(self, tag: str) -> bool: ...

    def fetch(self, tag: str) -> tuple[dict[str, int], set[str], int]: ...


class GraphSource:
    """Serves navigation straight from decoded graphs (no lookup cost)."""

    def __init__(self, trg: TagResourceGraph, fg: FolksonomyGraph) -> None:
        self._trg = trg
        self._fg = fg

    def has_tag(self, tag: str) -> bool:
        return bool(self._trg.res_of(tag))

    def fetch(self, tag: str) -> tuple[dict[str, int], set[str], int]:
        return self._fg.neighbors(tag), self._trg.res_of(tag), 0


class ProtocolSource:
    """Serves navigation through protocol reads (2 lookups per fetch)."""

    def __init__(self, client: ProtocolClient) -> None:
        self._client = client

    def has_tag(self, tag: str) -> bool:
        return self._client.store.has_block(tag_resources_key(normalize_name(tag)))

    def fetch(self, tag: str) -> tuple[dict[str, int], set[str], int]:
        step = self._client.search_step(tag)
        return (
            dict(step.related_tags),
            {resource for resource, _ in step.resources},
            2,
        )


@dataclass(frozen=True)
class SearchStep:
    """Trace record: the tag chosen and the view sizes it led to."""

    tag: str
    n_candidates: int
    n_resources: int


@dataclass
class SearchSession:
    source: SearchSource
    path: list[str]
    candidates: dict[str, int]  # candidate -> similarity seen from path[-1]
    resources: set[str]
    display_cap: int = 100
    lookup_cost: int = 0

    @property
    def current_tag(self) -> str:
        return self.path[-1]

    def ranked(self) -> list[tuple[str, int]]:
        return sorted(self.candidates.items(), key=lambda kv: (-kv[1], kv[0]))

    def displayed(self) -> list[tuple[str, int]]:
        return self.ranked()[: self.display_cap]


def start_session(
    source: SearchSource, start_tag: str, display_cap: int = 100
) -> SearchSession:
    t0 = normalize_name(start_tag)
    if display_cap < 1:
        raise ValidationError("display cap must be at least 1")
    if not source.has_tag(t0):
        raise UnknownTagError(f"tag {t0!r} is not in the source")
    neighbors, resources, cost = source.fetch(t0)
    neighbors.pop(t0, None)  # defensive: self arcs are never stored
    return SearchSession(
        source=source,
        path=[t0],
        candidates=neighbors,
        resources=set(resources),
        display_cap=display_cap,
        lookup_cost=cost,
    )


def refine(session: SearchSession, next_tag: str) -> SearchSession:
    """Narrow the session by one chosen candidate (mutates in place)."""
    t = normalize_name(next_tag)
    if t not in session.candidates:
        raise ValidationError(f"{t!r} is not among the current candidates")
    before = len(session.candidates)
    neighbors, resources, cost = session.source.fetch(t)
    exclude = set(session.path)
    exclude.add(t)
    session.candidates = {
        c: w
        for c, w in neighbors.items()
        if c in session.candidates and c not in exclude
    }
    session.resources &= resources
    session.path.append(t)
    session.lookup_cost += cost
    assert len(session.candidates) < before
    return session


def is_terminal(session: SearchSession, stop: StopCriteria = StopCriteria()) -> bool:
    return (
        len(session.candidates) <= stop.tag_floor
        or len(session.resources) <= stop.resource_floor
    )


def run_scripted_search(
    source: SearchSource,
    start_tag: str,
    strategy: Strategy,
    stop: StopCriteria = StopCriteria(),
    display_cap: int = 100,
    rng: random.Random | None = None,
) -> tuple[int, list[SearchStep]]:
    """Drive one session to termination under a policy.

    Returns the number of refinements made and a trace whose first record
    describes the freshly started session. Terminal-at-start sessions give
    a zero-step path.
    """
    if strategy is Strategy.RANDOM_TAG and rng is None:
        rng = random.Random()
    session = start_session(source, start_tag, display_cap)
    trace = [SearchStep(session.current_tag, len(session.candidates), len(session.resources))]
    steps = 0
    while not is_terminal(session, stop):
        shown = session.displayed()
        if strategy is Strategy.FIRST_TAG:
            pick = shown[0][0]
        elif strategy is Strategy.LAST_TAG:
            pick = shown[-1][0]
        else:
            pick = rng.choice(shown)[0]
        refine(session, pick)
        steps += 1
        trace.append(SearchStep(pick, len(session.candidates), len(session.resources)))
    return steps, trace


# -- interactive loop ------------------------------------------------------------


def repl_navigate(
    source: SearchSource,
    start_tag: str,
    stop: StopCriteria = StopCriteria(),
    display_cap: int = 100,
    input_stream: TextIO | None = None,
    output_stream: TextIO | None = None,
) -> SearchSession:
    """Line-oriented navigation: pick candidates by number, "back", "quit".

    Reads one command per line; invalid input reprompts without changing
    state. Returns the final session (useful for transcript tests).
    """
    import sys

    stdin = input_stream if input_stream is not None else sys.stdin
    stdout = output_stream if output_stream is not None else sys.stdout

    def say(text: str) -> None:
        stdout.write(text + "\n")

    session = start_session(source, start_tag, display_cap)
    while True:
        step_no = len(session.path) - 1
        say(
            f"step {step_no} | tags: {len(session.candidates)}"
            f" | resources: {len(session.resources)}"
        )
        terminal = is_terminal(session, stop)
        shown = session.displayed()
        if terminal:
            say("stopping rule reached (back/quit)")
        else:
            for i, (tag, weight) in enumerate(shown, start=1):
                say(f"  {i}. {tag} ({weight})")
        stdout.write("> ")
        stdout.flush()
        line = stdin.readline()
        if not line:  # EOF behaves like quit
            return session
        command = line.strip().lower()
        if command == "quit":
            return session
        if command == "back":
            if len(session.path) <= 1:
                say("already at the start tag")
                continue
            replay = start_session(source, session.path[0], display_cap)
            for tag in session.path[1:-1]:
                refine(replay, tag)
            session = replay
            continue
        if command.isdigit() and not terminal:
            index = int(command)
            if 1 <= index <= len(shown):
                refine(session, shown[index - 1][0])
                continue
        say("enter a listed number, 'back' or 'quit'")
