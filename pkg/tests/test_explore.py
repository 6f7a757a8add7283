import random

import pytest

from cfsm.builtins import get, systems
from cfsm.explore import (
    ExplorationLimitError,
    build_lts,
    deadlocks,
    drainable_to_stable,
    observables,
    receive_drain,
    send_lts,
    to_dot,
)
from cfsm.lang import language_equal, prefix_closed_nfa
from cfsm.model import initial_configuration, run_all
from cfsm.trace import is_k_bounded

from oracles import brute_explore, random_trace, random_walk

# frozen from the brute-force explorer in oracles.py
SIZES22 = {0: (5, 4), 1: (12, 14), 2: (18, 24), 3: (18, 24)}


class TestBuild:
    @pytest.mark.parametrize("k", [0, 1, 2, 3])
    def test_sizes(self, lts22, k):
        lts = lts22[k]
        assert (len(lts.states), len(lts.edges)) == SIZES22[k]

    def test_initial_first(self, lts22, example22):
        assert lts22[2].states[0] == initial_configuration(example22)

    def test_bound_respected(self, lts22):
        for k in (1, 2, 3):
            assert max(c.max_buffer() for c in lts22[k].states) <= k

    def test_rendezvous_labels(self, lts22):
        assert {lab.kind for _, lab, _ in lts22[0].edges} == {"!?"}

    def test_deterministic(self, example22):
        assert build_lts(example22, "p2p", 2) == build_lts(example22, "p2p", 2)

    def test_ceiling(self, example22):
        with pytest.raises(ExplorationLimitError):
            build_lts(example22, "p2p", 2, max_states=3)

    def test_negative_bound(self, example22):
        with pytest.raises(ValueError):
            build_lts(example22, "p2p", -1)


class TestBruteForceParity:
    @pytest.mark.parametrize("sem", ["p2p", "mailbox", "bag"])
    @pytest.mark.parametrize("name", [b.name for b in systems()])
    def test_same_graph(self, name, sem):
        system = get(name).value
        for k in (0, 1, 2):
            lts = build_lts(system, sem, k)
            states, edges = brute_explore(system, sem, k)
            assert set(lts.states) == states
            got = {(lts.states[s], lab, lts.states[t]) for s, lab, t in lts.edges}
            plain = {(c, lab if lab.kind != "!?" else type(lab)("!", lab.letter, lab.src, lab.dst), d) for c, lab, d in got}
            assert plain == edges


class TestObservables:
    @pytest.mark.parametrize("k,word", [(0, "aabc"), (1, "aabc"), (2, "aabcd"), (3, "aabcd")])
    def test_send_languages(self, lts22, k, word):
        assert language_equal(observables(lts22[k]).send_language, prefix_closed_nfa([word]))

    def test_five_stable_keys(self, lts22):
        assert len(observables(lts22[0]).stable_map) == 5

    def test_send_lts_silent_receives(self, example22):
        lts = send_lts(example22, "p2p", 1)
        assert any(lab is None for _, lab, _ in lts.edges)
        assert all(lab is None or lab.kind == "!" for _, lab, _ in lts.edges)


class TestDeadlocks:
    def test_example22(self, lts22):
        report = deadlocks(lts22[2])
        assert [str(c) for c in report.orphans] == ["(q3, q5, q2, 1>2:a.a, 2>1:d)"]
        assert [str(c) for c in report.terminal] == ["(q3, q3, q2)"]
        assert not report.deadlocks

    def test_bound_blocked(self):
        lts = build_lts(get("send-send-idle").value, "p2p", 1)
        assert len(deadlocks(lts).bound_blocked) == 1


class TestDrain:
    def test_stable_drains_trivially(self, example22):
        assert receive_drain(example22, "p2p", initial_configuration(example22)) == ()

    def test_orphan_reported(self):
        lts = build_lts(get("send-idle").value, "p2p", 1)
        verdict = drainable_to_stable(lts)
        assert not verdict
        (conf, bufs), = verdict.failures
        assert bufs == {(1, 2): ("a",)}

    def test_ring_drains(self):
        assert drainable_to_stable(build_lts(get("ring-pingpong").value, "p2p", 2))


class TestDot:
    def test_shape(self, lts22):
        text = to_dot(lts22[1])
        assert text.startswith('digraph "example22_k1"')
        assert text.count("->") == len(lts22[1].edges)


class TestMembershipOracle:
    @pytest.mark.parametrize("name", [b.name for b in systems()])
    def test_random_traces(self, name):
        system = get(name).value
        rng = random.Random(name)
        walker = build_lts(system, "p2p", 3)
        for k in (0, 1, 2):
            lts = build_lts(system, "p2p", k)
            for n in range(500):
                tr = random_walk(rng, walker, rng.randint(0, 8)) if n % 2 else random_trace(rng, system, rng.randint(0, 6))
                expected = bool(run_all(system, "p2p", tr)) and is_k_bounded(tr, k)
                assert lts.accepts_trace(tr) == expected, (k, tr)


class TestOtherSemantics:
    def test_mailbox_bound_per_receiver(self, example22):
        lts = build_lts(example22, "mailbox", 1)
        assert all(len(w) <= 1 for c in lts.states for _, w in c.buffers)

    def test_bag_sorted_contents(self, example22):
        lts = build_lts(example22, "bag", 2)
        assert all(tuple(sorted(w)) == w for c in lts.states for _, w in c.buffers)

    def test_two_peer_mailbox_equals_p2p(self):
        for b in systems():
            if b.value.np == 2:
                assert len(build_lts(b.value, "mailbox", 2).states) == len(build_lts(b.value, "p2p", 2).states)
