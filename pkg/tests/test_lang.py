import random

import pytest
from hypothesis import given
from hypothesis import strategies as st

from cfsm.lang import (
    Nfa,
    accepts,
    counterexample_word,
    determinize,
    isomorphic,
    language_equal,
    language_subset,
    minimize,
    prefix_closed_nfa,
    words_up_to,
)

from oracles import brute_accepts, brute_language, random_nfa

AABC = prefix_closed_nfa(["aabc"])
AABCD = prefix_closed_nfa(["aabcd"])


class TestBasics:
    def test_rejects_unknown_state(self):
        with pytest.raises(ValueError):
            Nfa(frozenset({0}), frozenset({"a"}), frozenset({(0, "a", 1)}), 0, frozenset())

    def test_rejects_unknown_symbol(self):
        with pytest.raises(ValueError):
            Nfa(frozenset({0}), frozenset({"a"}), frozenset({(0, "b", 0)}), 0, frozenset())

    def test_accepts_with_silent(self):
        n = Nfa.build(0, {(0, None, 1), (1, "a", 2)})
        assert accepts(n, ["a"])
        assert not accepts(n, ["a", "a"])


class TestDeterminize:
    def test_chain(self):
        d = determinize(AABC)
        assert d.is_deterministic
        assert len(d.states) == 5
        assert all(a is not None for _, a, _ in d.transitions)

    def test_empty_language_minimizes_to_one_state(self):
        n = Nfa(frozenset({0, 1}), frozenset({"a"}), frozenset({(0, "a", 1)}), 0, frozenset())
        m = minimize(n)
        assert len(m.states) == 1 and not m.accepting

    def test_prefix_closed_preserved(self):
        m = minimize(AABCD)
        assert m.accepting == m.states

    def test_idempotent_on_random(self):
        rng = random.Random(11)
        for _ in range(500):
            n = random_nfa(rng)
            d = determinize(n)
            assert isomorphic(determinize(d), d)


class TestComparison:
    def test_one_sync_languages(self):
        assert language_subset(AABC, AABCD)
        assert not language_equal(AABC, AABCD)
        assert counterexample_word(AABCD, AABC) == tuple("aabcd")

    def test_self(self):
        assert language_equal(AABC, AABC)

    def test_shortest_then_lexicographic(self):
        a = prefix_closed_nfa(["ab", "ba", "bb"])
        b = prefix_closed_nfa(["a"])
        assert counterexample_word(a, b) == ("b",)

    def test_words_up_to(self):
        assert words_up_to(AABC, 2) == {(), ("a",), ("a", "a")}


class TestOracle:
    def test_500_random_pairs(self):
        rng = random.Random(2024)
        disagreements = 0
        for _ in range(500):
            a, b = random_nfa(rng), random_nfa(rng)
            n = len(a.states) + len(b.states)
            la, lb = brute_language(a, "ab", n), brute_language(b, "ab", n)
            if language_equal(a, b) != (la == lb):
                disagreements += 1
            cex = counterexample_word(a, b)
            assert (cex is None) == language_subset(a, b)
            if cex is not None:
                assert brute_accepts(a, cex) and not brute_accepts(b, cex)
        assert disagreements == 0

    @given(st.integers(0, 10**6))
    def test_minimize_preserves_language(self, seed):
        n = random_nfa(random.Random(seed))
        m = minimize(n)
        assert brute_language(n, "ab", 6) == brute_language(m, "ab", 6)

    @given(st.integers(0, 10**6))
    def test_counterexample_is_shortest(self, seed):
        rng = random.Random(seed)
        a, b = random_nfa(rng), random_nfa(rng)
        cex = counterexample_word(a, b)
        if cex is not None:
            shorter = brute_language(a, "ab", len(cex) - 1) - brute_language(b, "ab", len(cex) - 1)
            assert not shorter
