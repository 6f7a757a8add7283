import pytest

from cfsm.builtins import ring_systems, systems, two_peer_systems
from cfsm.decide import (
    PreconditionError,
    branching_bisimilar,
    is_normalized,
    k_stable,
    k_synchronizable,
    normalize_trace,
    reach_contains,
    reach_representation,
    ring_synchronizable,
    strongly_k_stable,
)
from cfsm.explore import build_lts, observables, send_lts
from cfsm.lang import accepts, language_subset
from cfsm.model import Configuration, initial_configuration, validate_system
from cfsm.trace import system_equivalent


def sys2(p1, p2, messages=(("a", 1, 2), ("b", 2, 1))):
    return validate_system(
        {
            "peers": 2,
            "messages": list(messages),
            "machines": {
                1: {"transitions": [tuple(x.split()) for x in p1]},
                2: {"transitions": [tuple(x.split()) for x in p2]},
            },
        }
    )


class TestKSynchronizable:
    def test_example22_k1(self, example22):
        assert k_synchronizable(example22, "p2p", 1).equal

    def test_example22_k2_witness(self, example22):
        v = k_synchronizable(example22, "p2p", 2)
        assert not v.equal
        assert v.send_word == ("a", "a", "b", "c", "d")
        assert v.stable_configuration is None

    def test_k_must_be_positive(self, example22):
        with pytest.raises(ValueError):
            k_synchronizable(example22, "p2p", 0)

    def test_language_only_example22(self, example22):
        assert k_synchronizable(example22, "p2p", 1, language_only=True).equal
        assert not k_synchronizable(example22, "p2p", 2, language_only=True).equal

    def test_stable_pair_witness(self):
        # peer 3 can take b before a only when a is still buffered: the send
        # languages agree but a stable configuration is new
        s = validate_system(
            {
                "peers": 3,
                "messages": [("a", 1, 3), ("c", 1, 2), ("b", 2, 3)],
                "machines": {
                    1: {"transitions": [("q0", "!a", "q1"), ("q1", "!c", "q2")]},
                    2: {"transitions": [("q0", "?c", "q1"), ("q1", "!b", "q2")]},
                    3: {"transitions": [("q0", "?a", "q1"), ("q1", "?b", "q2"), ("q0", "?b", "q3"), ("q3", "?a", "q4")]},
                },
            }
        )
        assert k_synchronizable(s, "p2p", 1, language_only=True).equal
        full = k_synchronizable(s, "p2p", 1)
        assert not full.equal
        assert full.send_word == ("a", "c", "b")
        assert full.stable_configuration.control == ("q2", "q2", "q4")

    @pytest.mark.parametrize("entry", [b for b in systems() if "k_sync" in b.expected], ids=lambda b: b.name)
    def test_builtin_expectations(self, entry):
        for k, expected in entry.expected["k_sync"].items():
            assert k_synchronizable(entry.value, "p2p", k).equal is expected

    @pytest.mark.parametrize("entry", systems(), ids=lambda b: b.name)
    def test_witness_in_k_not_in_zero(self, entry):
        for k in (1, 2):
            v = k_synchronizable(entry.value, "p2p", k)
            if v.equal:
                continue
            ok = observables(build_lts(entry.value, "p2p", k)).as_nfa()
            o0 = observables(build_lts(entry.value, "p2p", 0)).as_nfa()
            word = v.send_word + ((v.stable_configuration,) if v.stable_configuration else ())
            assert accepts(ok, word) and not accepts(o0, word)

    @pytest.mark.parametrize("entry", systems(), ids=lambda b: b.name)
    def test_zero_included_in_k(self, entry):
        o0 = observables(build_lts(entry.value, "p2p", 0)).as_nfa()
        for k in (1, 2, 3):
            assert language_subset(o0, observables(build_lts(entry.value, "p2p", k)).as_nfa())


class TestRing:
    def test_pingpong(self, builtin):
        assert ring_synchronizable(builtin("ring-pingpong")).equal

    def test_double_send(self, builtin):
        v = ring_synchronizable(builtin("ring-double-send"))
        assert not v.equal and v.send_word == ("a", "a")

    def test_not_a_ring(self, example22):
        with pytest.raises(PreconditionError):
            ring_synchronizable(example22)

    def test_requires_p2p(self, builtin):
        with pytest.raises(PreconditionError):
            ring_synchronizable(builtin("ring-pingpong"), "mailbox")

    @pytest.mark.parametrize("entry", ring_systems(), ids=lambda b: b.name)
    def test_expected_and_consistent(self, entry):
        v = ring_synchronizable(entry.value)
        assert v.equal is entry.expected["ring_sync"]
        for k in (2, 3):
            assert k_synchronizable(entry.value, "p2p", k).equal is v.equal
        if "witness" in entry.expected:
            assert v.send_word == entry.expected["witness"]


class TestNormalize:
    def test_synchronous_unchanged(self, builtin):
        s = builtin("ring3-fork")
        tau = s.message_set.parse_trace("!?a !?c !?b")
        assert normalize_trace(s, tau) == tau

    def test_trailing_send_unchanged(self, builtin):
        s = builtin("ring3-fork")
        tau = s.message_set.parse_trace("!?a !c")
        assert normalize_trace(s, tau) == tau

    def test_interleaved(self, builtin):
        s = builtin("ring3-fork")
        tau = s.message_set.parse_trace("!a !c ?a ?c !b")
        out = normalize_trace(s, tau)
        assert out == s.message_set.parse_trace("!?a !?c !b")
        assert system_equivalent(s, "p2p", tau, out)

    def test_pending_sends_reordered(self, builtin):
        s = builtin("genest-sync")
        tau = s.message_set.parse_trace("!a !b !a ?a ?b")
        out = normalize_trace(s, tau)
        assert is_normalized(out)
        assert system_equivalent(s, "p2p", tau, out)

    def test_unexecutable(self):
        # P1 = !a.?b.!a, P2 = ?a.!b: !b needs ?a first, so !a !b ?a ?b !a never runs
        s = sys2(["q0 !a q1", "q1 ?b q2", "q2 !a q3"], ["q0 ?a q1", "q1 !b q2"])
        with pytest.raises(PreconditionError, match="not executable"):
            normalize_trace(s, s.message_set.parse_trace("!a !b ?a ?b !a"))

    def test_requires_synchronizable(self, builtin):
        s = builtin("ring-double-send")
        with pytest.raises(PreconditionError, match="1-synchronizable"):
            normalize_trace(s, s.message_set.parse_trace("!a"))

    def test_is_normalized(self, builtin):
        m = builtin("ring-pingpong").message_set
        assert is_normalized(m.parse_trace("!?a !b"))
        assert not is_normalized(m.parse_trace("!a !b ?a"))


class TestReach:
    def test_pingpong_base(self, builtin):
        s = builtin("ring-pingpong")
        rep = reach_representation(s)
        assert [c.control for c in rep.base] == [("q0", "q0"), ("q1", "q1"), ("q2", "q2")]
        assert rep.path_targets(1, "q0", ["a"]) == {"q1"}

    def test_initial_contained(self, builtin):
        s = builtin("ring3-token")
        assert reach_contains(reach_representation(s), initial_configuration(s))

    def test_foreign_buffer_word(self, builtin):
        s = builtin("ring-pingpong")
        c = Configuration(("q1", "q0"), (((1, 2), ("a", "a")), ((2, 1), ())))
        assert not reach_contains(reach_representation(s), c)

    def test_no_sends(self):
        s = sys2([], [])
        rep = reach_representation(s)
        assert rep.base == (initial_configuration(s),)

    @pytest.mark.parametrize("entry", [b for b in ring_systems() if b.expected["ring_sync"]], ids=lambda b: b.name)
    def test_agrees_with_exploration(self, entry):
        rep = reach_representation(entry.value)
        for k in (1, 2, 3):
            assert all(reach_contains(rep, c) for c in build_lts(entry.value, "p2p", k).states)

    def test_path_nfa(self, builtin):
        rep = reach_representation(builtin("ring-pingpong"))
        assert accepts(rep.path_nfa(0, 1), ["a"])


class TestStability:
    def test_counterexample(self, example22):
        l0, l1, l2 = (send_lts(example22, "p2p", k) for k in range(3))
        assert branching_bisimilar(l0, l1)
        assert not branching_bisimilar(l1, l2)

    def test_reflexive(self, example22):
        for k in range(3):
            lts = send_lts(example22, "p2p", k)
            assert branching_bisimilar(lts, lts)

    def test_k_stable(self, example22):
        assert k_stable(example22, "p2p", 0)
        assert not k_stable(example22, "p2p", 1)

    @pytest.mark.parametrize("name,k,expected", [("send-idle", 1, True), ("send-send-idle", 1, False), ("example22", 2, True), ("example22", 1, False)])
    def test_strongly_stable(self, builtin, name, k, expected):
        assert strongly_k_stable(builtin(name), "p2p", k) is expected

    def test_strongly_stable_negative_k(self, example22):
        with pytest.raises(ValueError):
            strongly_k_stable(example22, "p2p", -1)


class TestMailbox:
    @pytest.mark.parametrize("entry", two_peer_systems(), ids=lambda b: b.name)
    def test_two_peer_verdicts_coincide(self, entry):
        for k in (1, 2, 3):
            assert k_synchronizable(entry.value, "mailbox", k).equal == k_synchronizable(entry.value, "p2p", k).equal

    def test_example22_bag_exploratory(self, example22):
        # no expected value is published; record the verdicts only
        verdicts = [k_synchronizable(example22, "bag", k, language_only=True).equal for k in (1, 2)]
        assert verdicts[1] is False
