from itertools import product

import pytest

from cfsm.builtins import get
from cfsm.decide import k_synchronizable
from cfsm.explore import build_lts, observables
from cfsm.lang import Nfa, language_equal, words_up_to
from cfsm.reduce import (
    CUT,
    FifoAutomaton,
    TilingInstance,
    check_r1_r2,
    fa,
    fifo_to_system,
    fifo_to_system_merged,
    fifo_to_system_prime,
    fifo_traces,
    find_tiling,
    lm_language,
    morphism_h,
    morphism_h_doubleprime,
    morphism_h_prime,
    reduction_messages,
    tiling_to_fifo,
)
from cfsm.trace import Action, is_k_bounded, max_buffer

from oracles import lm_oracle


def act(kind, a, i, j):
    return Action(kind, f"{a}_{i}{j}", i, j)


@pytest.fixture(scope="module")
def singleton():
    return get("tiling-singleton").value


class TestTiling:
    def test_padding_required(self):
        with pytest.raises(ValueError, match="padding"):
            TilingInstance(frozenset({"t", "u"}), "t", "t", frozenset({("t", "u")}), frozenset({("t", "u")}), "u")

    def test_cut_reserved(self):
        with pytest.raises(ValueError):
            TilingInstance(frozenset({CUT}), CUT, CUT, frozenset({(CUT, CUT)}), frozenset({(CUT, CUT)}), CUT)

    def test_alphabet(self, singleton):
        assert tiling_to_fifo(singleton).alphabet == {"t", CUT}

    def test_single_initial_transition(self, singleton):
        a = tiling_to_fifo(singleton)
        assert [(x, r) for x, r in a.outgoing["q0"]] == [(fa("!", "t"), "first(t)")]

    def test_execution_shape(self, singleton):
        a = tiling_to_fifo(singleton)
        prefixes = {tuple(str(x) for x in t) for t, _, _ in fifo_traces(a, 2, 4)}
        assert ("!t", "!#", "?t", "!t") in prefixes

    def test_r2_and_bounded_r1(self, singleton):
        report = check_r1_r2(tiling_to_fifo(singleton), 4, 12)
        assert report.r2 and report.r1_ok
        assert "no violation found up to depth 12, bound 4" in report.describe()

    def test_find_tiling(self, singleton):
        assert find_tiling(singleton, 2, 2) == [["t"]]


class TestR1R2:
    def test_example33(self, example33):
        report = check_r1_r2(example33)
        assert report.r2
        assert [str(x) for x in report.r1_violation] == ["!m", "?m"]

    def test_receive_from_initial(self):
        a = FifoAutomaton.build("q0", [("q0", "?a", "q1"), ("q0", "!a", "q1")])
        assert not check_r1_r2(a).r2


class TestSystems:
    def test_messages(self, example33):
        s = fifo_to_system(example33)
        assert len(s.message_set.letters) == 10
        assert s.message_set == reduction_messages({"a", "m"})

    def test_peer_shapes(self, example33):
        p1, p2, p3 = fifo_to_system(example33).peers
        assert "q[q1,?a,q0]" in p1.states
        assert {"a.1", "a.2", "m.1", "m.2"} <= set(p2.states)
        assert len(p3.states) == 1 + 3 * 2
        cycle = [str(x) for x, _ in p3.outgoing["q0"]]
        assert cycle == ["?a_13", "?m_13"]

    def test_not_synchronizable_zero_language(self, example33):
        lts = build_lts(fifo_to_system(example33), "p2p", 0)
        assert words_up_to(observables(lts).send_language, 5) == {()}

    def test_prime_sink(self, example33):
        p2 = fifo_to_system_prime(example33, "m").peers[1]
        sinks = {q for q, x, r in p2.transitions if str(x) == "?m_32" and r == "bot"}
        assert sinks == set(p2.states)

    def test_m_not_in_alphabet(self, example33):
        with pytest.raises(ValueError):
            fifo_to_system_prime(example33, "z")
        with pytest.raises(ValueError):
            fifo_to_system_merged(example33, "z")

    @pytest.mark.parametrize("k", [1, 2, 3])
    def test_prime_synchronizable(self, example33, k):
        assert k_synchronizable(fifo_to_system_prime(example33, "m"), "p2p", k).equal

    def test_merged_observable_union(self, example33):
        obs = {
            name: observables(build_lts(build, "p2p", 1)).as_nfa()
            for name, build in (
                ("s", fifo_to_system(example33)),
                ("p", fifo_to_system_prime(example33, "m")),
                ("m", fifo_to_system_merged(example33, "m")),
            )
        }
        union = _union(obs["s"], obs["p"])
        assert language_equal(obs["m"], union)

    def test_merged_verdicts(self, example33):
        v = k_synchronizable(fifo_to_system_merged(example33, "m"), "p2p", 1)
        assert not v.equal and "m_23" in v.send_word
        no_recv = get("example33-no-recv-m").value
        assert k_synchronizable(fifo_to_system_merged(no_recv, "m"), "p2p", 1).equal


def _union(a: Nfa, b: Nfa) -> Nfa:
    ta = {(("a", q), s, ("a", r)) for q, s, r in a.transitions}
    tb = {(("b", q), s, ("b", r)) for q, s, r in b.transitions}
    start = ("u", 0)
    trans = ta | tb | {(start, None, ("a", a.initial)), (start, None, ("b", b.initial))}
    states = {("a", q) for q in a.states} | {("b", q) for q in b.states} | {start}
    acc = {("a", q) for q in a.accepting} | {("b", q) for q in b.accepting}
    return Nfa(frozenset(states), a.alphabet | b.alphabet, frozenset(trans), start, frozenset(acc))


class TestMorphisms:
    def test_h_send(self):
        assert morphism_h([fa("!", "a")]) == (act("!", "a", 1, 2),)

    def test_h_receive(self):
        expected = (
            act("!", "a", 1, 3), act("?", "a", 1, 3),
            act("!", "a", 3, 2), act("?", "a", 3, 2),
            act("?", "a", 1, 2),
            act("!", "a", 2, 3), act("?", "a", 2, 3),
            act("!", "a", 3, 1), act("?", "a", 3, 1),
        )
        assert morphism_h([fa("?", "a")]) == expected

    def test_h_prime(self):
        assert morphism_h_prime([fa("!", "a")], "m") == (act("!", "a", 1, 2), act("?", "a", 1, 2))
        assert len(morphism_h_prime([fa("?", "a")], "m")) == 8
        assert len(morphism_h_prime([fa("?", "m")], "m")) == 4

    def test_h_doubleprime(self):
        tau = (act("!", "a", 1, 2), act("!", "a", 1, 3), act("?", "a", 1, 2))
        assert morphism_h_doubleprime(tau) == (act("!", "a", 1, 2), act("?", "a", 1, 2), act("!", "a", 1, 3))

    @pytest.mark.parametrize("k", [1, 2, 3])
    def test_h_preserves_bounds(self, example33, k):
        for tau, _, _ in fifo_traces(example33, k, 8):
            assert is_k_bounded(tau, k)
            assert max_buffer(morphism_h(tau)) <= max(k, 1)


class TestLm:
    def test_regex_oracle(self, example33):
        nfa = lm_language(example33, "m")
        accepted = words_up_to(nfa, 8)
        alphabet = sorted(nfa.alphabet, key=str)
        for n in range(9):
            for word in product(alphabet, repeat=n):
                assert (word in accepted) == lm_oracle(word), word

    def test_special_last(self, example33):
        for word in words_up_to(lm_language(example33, "m"), 8):
            idx = [i for i, x in enumerate(word) if x == fa("?", "m")]
            assert idx in ([], [len(word) - 1])

    def test_without_receive_is_plain(self, example33):
        a = example33.without("q1", "?m", "q0")
        words = words_up_to(lm_language(a, "m"), 6)
        assert all(fa("?", "m") not in w for w in words)
