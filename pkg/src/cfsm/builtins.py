"""Named example systems, FIFO automata and tiling instances.

Each entry records the verdicts the acceptance suite expects of it.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache

from cfsm.model import System, validate_system
from cfsm.reduce import FifoAutomaton, TilingInstance

__all__ = ["Builtin", "builtin_examples", "get", "systems", "ring_systems", "two_peer_systems"]


@dataclass(frozen=True)
class Builtin:
    name: str
    kind: str  # "system", "fifo", "tiling" or "unavailable"
    value: object
    description: str
    expected: dict = field(default_factory=dict)


def _system(name, np, messages, machines) -> System:
    raw = {
        "name": name,
        "peers": np,
        "messages": messages,
        "machines": {
            i: {"initial": init, "transitions": [tuple(t.split()) for t in trans]}
            for i, (init, trans) in machines.items()
        },
    }
    return validate_system(raw)


def _chain(tokens: str, start: int = 0) -> list[str]:
    toks = tokens.split()
    return [f"q{start + n} {tok} q{start + n + 1}" for n, tok in enumerate(toks)]


def _example22() -> System:
    return _system(
        "example22",
        3,
        [("a", 1, 2), ("b", 1, 3), ("c", 3, 2), ("d", 2, 1)],
        {
            1: ("q0", _chain("!a !a !b")),
            2: ("q0", _chain("?a ?a ?c") + ["q0 ?c q4", "q4 !d q5"]),
            3: ("q0", _chain("?b !c")),
        },
    )


def _genest() -> System:
    # product automata of the two independent threads of each peer
    p, q = [], []
    for i in range(3):
        for j in range(3):
            if i < 2:
                p.append(f"s{i}{j} !a s{i + 1}{j}")
                q.append(f"s{i}{j} ?a s{i + 1}{j}")
            if j < 2:
                p.append(f"s{i}{j} ?b s{i}{j + 1}")
                q.append(f"s{i}{j} !b s{i}{j + 1}")
    return _system("genest-sync", 2, [("a", 1, 2), ("b", 2, 1)], {1: ("s00", p), 2: ("s00", q)})


def _entries() -> list[Builtin]:
    two = [("a", 1, 2), ("b", 2, 1)]
    three = [("a", 1, 2), ("b", 2, 3), ("c", 3, 1)]
    out = [
        Builtin(
            "example22",
            "system",
            _example22(),
            "1-synchronizable but not synchronizable (three peers, not a ring)",
            {"k_sync": {1: True, 2: False}, "witness_k2": ("a", "a", "b", "c", "d"), "ring": False, "strongly_stable": {2: True}},
        ),
        Builtin(
            "intro-sync",
            "system",
            _system("intro-sync", 2, [("a", 1, 2), ("b", 1, 2)], {1: ("q0", _chain("!a !b")), 2: ("q0", _chain("?a ?b"))}),
            "P = !a.!b, Q = ?a.?b: synchronizable",
            {"k_sync": {1: True, 2: True, 3: True}, "ring": False},
        ),
        Builtin(
            "intro-unsync",
            "system",
            _system(
                "intro-unsync",
                2,
                [("a", 1, 2), ("b", 1, 2), ("c", 1, 2)],
                {1: ("q0", _chain("!a !b !c")), 2: ("q0", _chain("?a ?b"))},
            ),
            "P = !a.!b.!c, Q = ?a.?b: c is never received, not synchronizable",
            {"k_sync": {1: False, 2: False, 3: False}, "ring": False},
        ),
        Builtin(
            "send-idle",
            "system",
            _system("send-idle", 2, [("a", 1, 2)], {1: ("q0", ["q0 !a q1"]), 2: ("q0", [])}),
            "P1 = !a, P2 idle: existentially 1-bounded, strongly 1-stable, not synchronizable",
            {"k_sync": {1: False}, "strongly_stable": {1: True}, "ring": False},
        ),
        Builtin(
            "send-send-idle",
            "system",
            _system("send-send-idle", 2, [("a", 1, 2)], {1: ("q0", _chain("!a !a")), 2: ("q0", [])}),
            "P1 = !a.!a, P2 idle: not strongly 1-stable",
            {"strongly_stable": {1: False}, "ring": False},
        ),
        Builtin(
            "genest-sync",
            "system",
            _genest(),
            "P = !a.!a || ?b.?b, Q = ?a.?a || !b.!b: synchronizable, not existentially 1-bounded",
            {"k_sync": {1: True, 2: True, 3: True}, "ring": True, "ring_sync": True},
        ),
        Builtin(
            "ring-pingpong",
            "system",
            _system("ring-pingpong", 2, two, {1: ("q0", _chain("!a ?b")), 2: ("q0", _chain("?a !b"))}),
            "P1 = !a.?b, P2 = ?a.!b",
            {"ring": True, "ring_sync": True},
        ),
        Builtin(
            "ring-pingpong-loop",
            "system",
            _system(
                "ring-pingpong-loop",
                2,
                two,
                {1: ("q0", ["q0 !a q1", "q1 ?b q0", "q1 !a q2", "q2 ?b q1"]), 2: ("q0", ["q0 ?a q1", "q1 !b q0"])},
            ),
            "cyclic ping-pong where P1 may run one message ahead",
            {"ring": True, "ring_sync": False, "witness": ("a", "a")},
        ),
        Builtin(
            "ring-cycle",
            "system",
            _system("ring-cycle", 2, two, {1: ("q0", ["q0 !a q1", "q1 ?b q0"]), 2: ("q0", ["q0 ?a q1", "q1 !b q0"])}),
            "endless strict alternation of a and b",
            {"ring": True, "ring_sync": True},
        ),
        Builtin(
            "ring3-token",
            "system",
            _system(
                "ring3-token",
                3,
                three,
                {
                    1: ("q0", ["q0 !a q1", "q1 ?c q0"]),
                    2: ("q0", ["q0 ?a q1", "q1 !b q0"]),
                    3: ("q0", ["q0 ?b q1", "q1 !c q0"]),
                },
            ),
            "a token circulating forever on a three-peer ring",
            {"ring": True, "ring_sync": True},
        ),
        Builtin(
            "ring3-fork",
            "system",
            _system(
                "ring3-fork",
                3,
                three,
                {
                    1: ("q0", ["q0 !a q1", "q1 ?c q2", "q0 ?c q3", "q3 !a q2"]),
                    2: ("q0", ["q0 ?a q1", "q1 !b q2"]),
                    3: ("q0", ["q0 !c q1", "q1 ?b q2", "q0 ?b q3", "q3 !c q2"]),
                },
            ),
            "peers 1 and 3 may send in either order; every order is matched",
            {"ring": True, "ring_sync": True},
        ),
        Builtin(
            "ring-double-send",
            "system",
            _system("ring-double-send", 2, two, {1: ("q0", _chain("!a !a")), 2: ("q0", _chain("?a"))}),
            "P1 = !a.!a, P2 = ?a: the second a is only sent asynchronously",
            {"ring": True, "ring_sync": False, "witness": ("a", "a")},
        ),
        Builtin(
            "ring-orphan",
            "system",
            _system("ring-orphan", 2, two, {1: ("q0", ["q0 !a q1"]), 2: ("q0", [])}),
            "P1 = !a, P2 idle, over a two-peer ring message set",
            {"ring": True, "ring_sync": False},
        ),
        Builtin(
            "ring3-race",
            "system",
            _system(
                "ring3-race",
                3,
                three,
                {1: ("q0", _chain("!a ?c")), 2: ("q0", _chain("?a !b")), 3: ("q0", _chain("!c ?b"))},
            ),
            "peer 3 can send c before peer 1 is ready to receive it",
            {"ring": True, "ring_sync": False},
        ),
        Builtin(
            "example33",
            "fifo",
            FifoAutomaton.build(
                "q0", [("q0", "!a", "q0"), ("q0", "!m", "q1"), ("q1", "?a", "q0"), ("q1", "?m", "q0")], name="example33"
            ),
            "FIFO automaton over {a, m} that can dequeue m after enqueueing it",
            {"m": "m", "receives_m": True},
        ),
        Builtin(
            "example33-no-recv-m",
            "fifo",
            FifoAutomaton.build("q0", [("q0", "!a", "q0"), ("q0", "!m", "q1"), ("q1", "?a", "q0")], alphabet={"a", "m"}, name="example33-no-recv-m"),
            "example33 without its ?m transition: m is never dequeued",
            {"m": "m", "receives_m": False},
        ),
        Builtin(
            "tiling-singleton",
            "tiling",
            TilingInstance(frozenset({"t"}), "t", "t", frozenset({("t", "t")}), frozenset({("t", "t")}), "t"),
            "one tile compatible with itself; t0 = tF = blank",
            {"tiling_exists": True},
        ),
        Builtin(
            "example51-mailbox",
            "unavailable",
            None,
            "mailbox counterexample whose machines exist only in a figure; not reconstructible from text",
        ),
    ]
    return out


@lru_cache(maxsize=1)
def builtin_examples() -> dict[str, Builtin]:
    return {b.name: b for b in _entries()}


def get(name: str) -> Builtin:
    try:
        return builtin_examples()[name]
    except KeyError:
        raise KeyError(f"unknown example {name!r}; known: {', '.join(builtin_examples())}") from None


def systems() -> list[Builtin]:
    return [b for b in builtin_examples().values() if b.kind == "system"]


def ring_systems() -> list[Builtin]:
    return [b for b in systems() if b.expected.get("ring")]


def two_peer_systems() -> list[Builtin]:
    return [b for b in systems() if b.value.np == 2]
