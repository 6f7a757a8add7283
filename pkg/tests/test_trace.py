import random

import pytest
from hypothesis import given
from hypothesis import strategies as st

from cfsm.model import MessageSet, run_all
from cfsm.trace import (
    Action,
    buffer_after,
    causally_equivalent,
    channel_projection,
    exists_equiv_k_bounded,
    format_trace,
    is_fifo,
    is_k_bounded,
    is_stable,
    is_synchronous,
    max_buffer,
    peer_projection,
    recv_projection,
    send_projection,
    shuffles,
    sync_trace_of,
    system_equivalent,
)

from oracles import random_trace, shuffle_count

M2 = MessageSet.of(2, {"a": (1, 2), "b": (2, 1)})
M3 = MessageSet.of(3, {"a": (1, 2), "b": (1, 3), "c": (3, 2), "d": (2, 1)})


def t(text, msgs=M3):
    return msgs.parse_trace(text)


@pytest.fixture
def tau22():
    return t("!a !a !?b !?c !d")


class TestProjections:
    def test_send_recv(self):
        assert send_projection(t("!a ?a !b")) == ("a", "b")
        assert recv_projection(t("!a ?a !b")) == ("a",)

    def test_example_send_projection(self, tau22):
        assert send_projection(tau22) == ("a", "a", "b", "c", "d")

    def test_peer(self, tau22):
        assert peer_projection(t("!a ?a"), 1) == t("!a")
        assert peer_projection(t("!a ?a"), 2) == t("?a")
        assert peer_projection(tau22, 3) == t("?b !c")

    def test_channel(self, tau22):
        assert channel_projection(tau22, 1, 2) == t("!a !a")
        assert channel_projection(tau22, 3, 1) == ()

    def test_buffer_after(self, tau22):
        assert buffer_after(t("!a !a"), 1, 2) == ("a", "a")
        assert buffer_after(t("?a"), 1, 2) is None
        assert buffer_after(tau22, 2, 1) == ("d",)

    def test_format(self):
        assert format_trace(t("!a ?a")) == "!a ?a"


class TestPredicates:
    def test_example_trace(self, tau22):
        assert is_fifo(tau22)
        assert is_k_bounded(tau22, 2)
        assert not is_k_bounded(tau22, 1)
        assert not is_synchronous(tau22)
        assert not is_stable(tau22)
        assert max_buffer(tau22) == 2

    def test_synchronous(self):
        tr = t("!?a !?b")
        assert is_synchronous(tr) and is_stable(tr) and is_k_bounded(tr, 1)

    def test_zero_bound_is_synchronous(self):
        assert is_k_bounded(t("!?a"), 0)
        assert not is_k_bounded(t("!a !b ?a ?b"), 0)

    def test_receive_alone_not_fifo(self):
        assert not is_fifo(t("?a"))

    def test_out_of_order_not_fifo(self):
        assert not is_fifo(t("!a !b ?b", MessageSet.of(2, {"a": (1, 2), "b": (1, 2)})))


class TestEquivalence:
    def test_example_commutation(self, example22):
        t1 = example22.message_set.parse_trace("!a !a !?b !c ?a ?a ?c")
        t2 = example22.message_set.parse_trace("!?a !?a !?b !?c")
        assert causally_equivalent(t1, t2)
        assert system_equivalent(example22, "p2p", t1, t2)

    def test_same_peer_order_matters(self):
        assert not causally_equivalent(t("!a !b"), t("!b !a"))

    def test_different_configurations(self, example22):
        assert not system_equivalent(example22, "p2p", t("!a"), t("!a !a"))

    def test_reflexive(self, tau22):
        assert causally_equivalent(tau22, tau22)


class TestSyncTrace:
    def test_basic(self):
        assert sync_trace_of(t("!a !b ?a ?b")) == t("!?a !?b")
        assert sync_trace_of(()) == ()

    def test_random_send_projection(self):
        rng = random.Random(7)
        from cfsm.builtins import get

        s = get("example22").value
        for _ in range(1000):
            tr = random_trace(rng, s, rng.randint(0, 8))
            assert send_projection(sync_trace_of(tr)) == send_projection(tr)


class TestShuffles:
    def test_six(self):
        assert len(shuffles(t("!a ?a", M2), t("!b ?b", M2))) == 6

    def test_empty(self):
        v = t("!a ?a", M2)
        assert shuffles((), v) == {v}

    @given(st.integers(0, 4), st.integers(0, 4))
    def test_binomial(self, n, m):
        u = tuple(Action("!", f"u{i}", 1, 2) for i in range(n))
        v = tuple(Action("!", f"v{i}", 2, 1) for i in range(m))
        assert len(shuffles(u, v)) == shuffle_count(n, m)


GENEST = MessageSet.of(2, {"a": (1, 2), "b": (2, 1)})


class TestExistsBounded:
    def test_genest_not_1(self):
        tr = GENEST.parse_trace("!a !a !b !b ?a ?a ?b ?b")
        assert exists_equiv_k_bounded(tr, 1) is None

    def test_genest_2(self):
        tr = GENEST.parse_trace("!a !a !b !b ?a ?a ?b ?b")
        found = exists_equiv_k_bounded(tr, 2)
        assert found is not None
        assert causally_equivalent(found, tr) and is_k_bounded(found, 2)

    def test_synchronous_itself(self):
        tr = GENEST.parse_trace("!?a !?b")
        assert exists_equiv_k_bounded(tr, 1) == tr

    def test_rejects_non_fifo(self):
        with pytest.raises(ValueError):
            exists_equiv_k_bounded(GENEST.parse_trace("?a"), 1)


# -- properties over random FIFO traces ------------------------------------------

ACTS3 = [M3.send(x) for x in "abcd"] + [M3.recv(x) for x in "abcd"]


@st.composite
def fifo_traces(draw, max_len=8):
    out = []
    for _ in range(draw(st.integers(0, max_len))):
        out.append(draw(st.sampled_from(ACTS3)))
        if not is_fifo(out):
            out.pop()
    return tuple(out)


class TestProperties:
    @given(fifo_traces(), fifo_traces())
    def test_causal_symmetric(self, t1, t2):
        assert causally_equivalent(t1, t2) == causally_equivalent(t2, t1)

    @given(fifo_traces())
    def test_bounded_monotone(self, tr):
        k = max_buffer(tr)
        assert is_k_bounded(tr, k)
        assert all(is_k_bounded(tr, j) for j in range(max(k, 1), k + 3))

    @given(fifo_traces(), st.integers(1, 3))
    def test_witness_is_equivalent_and_bounded(self, tr, k):
        found = exists_equiv_k_bounded(tr, k)
        if found is not None:
            assert causally_equivalent(found, tr)
            assert is_k_bounded(found, k)
        if is_k_bounded(tr, k):
            assert found is not None

    @given(fifo_traces(), fifo_traces(), fifo_traces())
    def test_congruence(self, t1, t2, u):
        if causally_equivalent(t1, t2) and is_fifo(t1 + u) and is_fifo(t2 + u):
            assert causally_equivalent(t1 + u, t2 + u)

    @given(fifo_traces())
    def test_fifo_iff_buffers_defined(self, tr):
        channels = {(a.src, a.dst) for a in ACTS3}
        for n in range(len(tr) + 1):
            assert all(buffer_after(tr[:n], i, j) is not None for i, j in channels)

    @given(fifo_traces(), fifo_traces())
    def test_causal_implies_system(self, t1, t2):
        from cfsm.builtins import get

        s = get("example22").value
        if causally_equivalent(t1, t2) and run_all(s, "p2p", t1) and run_all(s, "p2p", t2):
            assert system_equivalent(s, "p2p", t1, t2)
