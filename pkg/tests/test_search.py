"""Navigation oracles.

The fixtures are built so the candidate and resource trajectories can be
worked out by hand. The main cross-check runs the same scripted search
against the in-memory graphs and through protocol reads and demands
identical traces, with the protocol side paying 2(n+1) lookups for an
n-step path.
"""

import io
import random

import pytest

from folkdht.errors import UnknownTagError, ValidationError
from folkdht.graphs import TaggingModel
from folkdht.overlay import OverlayStore
from folkdht.protocol import EXACT, ProtocolClient, ProtocolConfig
from folkdht.search import (
    GraphSource,
    ProtocolSource,
    SearchStep,
    StopCriteria,
    Strategy,
    is_terminal,
    refine,
    repl_navigate,
    run_scripted_search,
    start_session,
)


def triple_tag_model(n_resources: int = 12) -> TaggingModel:
    """Every resource carries the same three tags; sim is n everywhere."""
    model = TaggingModel()
    for i in range(n_resources):
        model.insert_resource(f"r{i:02d}", f"u{i}", ["a", "b", "c"])
    return model


def hub_model() -> TaggingModel:
    """A hub tag with five spokes of co-occurrence counts 5, 4, 3, 2, 1."""
    model = TaggingModel()
    counts = {"x1": 5, "x2": 4, "x3": 3, "x4": 2, "x5": 1}
    i = 0
    for spoke, n in counts.items():
        for _ in range(n):
            model.insert_resource(f"r{i:02d}", f"u{i}", ["hub", spoke])
            i += 1
    return model


def graph_source(model: TaggingModel) -> GraphSource:
    return GraphSource(model.trg, model.fg)


def protocol_twin(model_builder) -> ProtocolSource:
    """Replay the builder's inserts through an exact client."""
    model = TaggingModel()
    store = OverlayStore()
    client = ProtocolClient(store, ProtocolConfig(mode=EXACT))
    # rebuild by running the same inserts on both sides
    if model_builder is triple_tag_model:
        for i in range(12):
            client.insert_resource(f"r{i:02d}", f"u{i}", ["a", "b", "c"])
    else:
        counts = {"x1": 5, "x2": 4, "x3": 3, "x4": 2, "x5": 1}
        i = 0
        for spoke, n in counts.items():
            for _ in range(n):
                client.insert_resource(f"r{i:02d}", f"u{i}", ["hub", spoke])
                i += 1
    del model
    return ProtocolSource(client)


class TestSessionBasics:
    def test_start_session_views(self):
        session = start_session(graph_source(triple_tag_model()), "a")
        assert session.path == ["a"]
        assert session.candidates == {"b": 12, "c": 12}
        assert len(session.resources) == 12
        assert session.lookup_cost == 0

    def test_unknown_start_tag(self):
        with pytest.raises(UnknownTagError):
            start_session(graph_source(triple_tag_model()), "zzz")

    def test_display_cap_validated(self):
        with pytest.raises(ValidationError):
            start_session(graph_source(triple_tag_model()), "a", display_cap=0)

    def test_refine_requires_a_candidate(self):
        session = start_session(graph_source(triple_tag_model()), "a")
        with pytest.raises(ValidationError):
            refine(session, "a")
        with pytest.raises(ValidationError):
            refine(session, "nope")

    def test_refine_shrinks_candidates(self):
        session = start_session(graph_source(triple_tag_model()), "a")
        refine(session, "b")
        assert session.path == ["a", "b"]
        assert session.candidates == {"c": 12}
        assert len(session.resources) == 12

    def test_ranking_is_weight_then_name(self):
        session = start_session(graph_source(hub_model()), "hub")
        assert session.ranked() == [
            ("x1", 5), ("x2", 4), ("x3", 3), ("x4", 2), ("x5", 1),
        ]

    def test_terminal_conditions(self):
        session = start_session(graph_source(triple_tag_model()), "a")
        assert not is_terminal(session)
        assert is_terminal(session, StopCriteria(tag_floor=2, resource_floor=1))
        assert is_terminal(session, StopCriteria(tag_floor=1, resource_floor=12))

    def test_stop_criteria_validated(self):
        with pytest.raises(ValidationError):
            StopCriteria(tag_floor=0)


class TestScriptedSearch:
    def test_every_strategy_stops_after_one_step(self):
        """Two candidates at the start leave exactly one refinement."""
        source = graph_source(triple_tag_model())
        for strategy in Strategy:
            steps, trace = run_scripted_search(
                source, "a", strategy, rng=random.Random(0)
            )
            assert steps == 1
            assert [t.n_candidates for t in trace] == [2, 1]
            assert trace[0].tag == "a"

    def test_terminal_at_start_is_a_zero_step_path(self):
        model = TaggingModel()
        model.insert_resource("r", "u", ["a", "b"])
        steps, trace = run_scripted_search(
            graph_source(model), "a", Strategy.FIRST_TAG
        )
        assert steps == 0
        assert trace == [SearchStep("a", 1, 1)]

    def test_first_picks_heaviest_and_last_picks_lightest(self):
        source = graph_source(hub_model())
        stop = StopCriteria(tag_floor=1, resource_floor=1)
        _, trace_first = run_scripted_search(source, "hub", Strategy.FIRST_TAG, stop)
        _, trace_last = run_scripted_search(source, "hub", Strategy.LAST_TAG, stop)
        assert trace_first[1].tag == "x1"
        assert trace_last[1].tag == "x5"

    def test_display_cap_bounds_the_last_pick(self):
        source = graph_source(hub_model())
        stop = StopCriteria(tag_floor=1, resource_floor=1)
        _, trace = run_scripted_search(
            source, "hub", Strategy.LAST_TAG, stop, display_cap=3
        )
        assert trace[1].tag == "x3"

    def test_random_is_reproducible_under_a_seed(self):
        source = graph_source(triple_tag_model(40))
        stop = StopCriteria(tag_floor=1, resource_floor=1)
        runs = [
            run_scripted_search(source, "a", Strategy.RANDOM_TAG, stop, rng=random.Random(7))
            for _ in range(2)
        ]
        assert runs[0] == runs[1]

    def test_candidate_counts_strictly_decrease(self):
        model = TaggingModel()
        for i in range(20):
            model.insert_resource(f"r{i}", f"u{i}", ["a", "b", "c", "d"])
        stop = StopCriteria(tag_floor=1, resource_floor=1)
        steps, trace = run_scripted_search(
            graph_source(model), "a", Strategy.FIRST_TAG, stop
        )
        counts = [t.n_candidates for t in trace]
        assert counts == [3, 2, 1]
        assert steps == 2


class TestSourceEquivalence:
    @pytest.mark.parametrize("builder", [triple_tag_model, hub_model])
    @pytest.mark.parametrize("strategy", [Strategy.FIRST_TAG, Strategy.LAST_TAG])
    def test_graph_and_protocol_traces_match(self, builder, strategy):
        start = "a" if builder is triple_tag_model else "hub"
        stop = StopCriteria(tag_floor=1, resource_floor=1)
        g_steps, g_trace = run_scripted_search(
            graph_source(builder()), start, strategy, stop
        )
        proto = protocol_twin(builder)
        p_steps, p_trace = run_scripted_search(proto, start, strategy, stop)
        assert (g_steps, g_trace) == (p_steps, p_trace)

    def test_protocol_path_costs_two_per_fetch(self):
        proto = protocol_twin(triple_tag_model)
        store = proto._client.store
        store.reset_stats()
        steps, _ = run_scripted_search(
            proto, "a", Strategy.FIRST_TAG, StopCriteria(tag_floor=1, resource_floor=1)
        )
        assert store.read_stats().lookup_count == 2 * (steps + 1)

    def test_session_lookup_cost_tracks_fetches(self):
        proto = protocol_twin(triple_tag_model)
        session = start_session(proto, "a")
        assert session.lookup_cost == 2
        refine(session, "b")
        assert session.lookup_cost == 4


class TestReplNavigation:
    def run_repl(self, commands: str, source=None, start="a") -> tuple[str, object]:
        if source is None:
            source = graph_source(triple_tag_model())
        out = io.StringIO()
        session = repl_navigate(
            source,
            start,
            StopCriteria(),
            100,
            io.StringIO(commands),
            out,
        )
        return out.getvalue(), session

    def test_full_transcript(self):
        output, session = self.run_repl("1\nback\n2\nquit\n")
        assert output == (
            "step 0 | tags: 2 | resources: 12\n"
            "  1. b (12)\n"
            "  2. c (12)\n"
            "> "
            "step 1 | tags: 1 | resources: 12\n"
            "stopping rule reached (back/quit)\n"
            "> "
            "step 0 | tags: 2 | resources: 12\n"
            "  1. b (12)\n"
            "  2. c (12)\n"
            "> "
            "step 1 | tags: 1 | resources: 12\n"
            "stopping rule reached (back/quit)\n"
            "> "
        )
        assert session.path == ["a", "c"]

    def test_back_at_the_start_complains(self):
        output, session = self.run_repl("back\nquit\n")
        assert "already at the start tag" in output
        assert session.path == ["a"]

    def test_invalid_inputs_reprompt(self):
        output, session = self.run_repl("99\nbogus\nquit\n")
        assert output.count("enter a listed number, 'back' or 'quit'") == 2
        assert session.path == ["a"]

    def test_numbers_are_refused_once_terminal(self):
        output, session = self.run_repl("1\n1\nquit\n")
        # the second "1" arrives at a terminal view and is rejected
        assert "enter a listed number, 'back' or 'quit'" in output
        assert session.path == ["a", "b"]

    def test_eof_acts_like_quit(self):
        output, session = self.run_repl("")
        assert session.path == ["a"]
        assert output.endswith("> ")

    def test_protocol_source_transcript_matches_graph_source(self):
        graph_out, _ = self.run_repl("1\nquit\n")
        proto_out, _ = self.run_repl("1\nquit\n", source=protocol_twin(triple_tag_model))
        assert proto_out == graph_out
