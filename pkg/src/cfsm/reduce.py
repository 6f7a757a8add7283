"""From tilings to FIFO automata to three-peer systems.

A FIFO automaton reads and writes a single queue.  Its actions reuse
:class:`~cfsm.trace.Action` with ``src == dst == 0``, so the trace
predicates of :mod:`cfsm.trace` apply to it unchanged.

The system built from a FIFO automaton ``A`` has three peers.  Peer 1
follows ``A``; channel ``1 -> 2`` holds ``A``'s queue.  A dequeue of ``a`` is
an order ``a_13`` relayed by peer 3 as ``a_32``; peer 2 performs it and the
acknowledgement travels back as ``a_23`` then ``a_31``.  Letter ``a`` on
channel ``i -> j`` is named ``a_ij``.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from itertools import product
from typing import Iterable, Iterator, Sequence

from cfsm.lang import Nfa
from cfsm.model import MessageSet, Peer, System
from cfsm.trace import Action

__all__ = [
    "CUT",
    "TilingInstance",
    "FifoAutomaton",
    "R1R2Report",
    "tiling_to_fifo",
    "find_tiling",
    "check_r1_r2",
    "fifo_traces",
    "reduction_letter",
    "reduction_messages",
    "fifo_to_system",
    "fifo_to_system_prime",
    "fifo_to_system_merged",
    "morphism_h",
    "morphism_h_prime",
    "morphism_h_doubleprime",
    "lm_language",
]

CUT = "#"
RELAY = ((1, 2), (1, 3), (3, 1), (3, 2), (2, 3))


def fa(kind: str, letter: str) -> Action:
    return Action(kind, letter, 0, 0)


@dataclass(frozen=True)
class TilingInstance:
    tiles: frozenset[str]
    t0: str
    tF: str
    H: frozenset[tuple[str, str]]
    V: frozenset[tuple[str, str]]
    blank: str

    def __post_init__(self):
        for t in (self.t0, self.tF, self.blank):
            if t not in self.tiles:
                raise ValueError(f"tile {t!r} not in the tile set")
        if CUT in self.tiles:
            raise ValueError(f"{CUT!r} is reserved for the row separator")
        for rel in (self.H, self.V):
            for x, y in rel:
                if x not in self.tiles or y not in self.tiles:
                    raise ValueError(f"relation pair ({x}, {y}) uses an unknown tile")
        missing = [t for t in self.tiles if (t, self.blank) not in self.H or (t, self.blank) not in self.V]
        if missing:
            raise ValueError(f"padding tile {self.blank!r} not compatible with {sorted(missing)}")


@dataclass(frozen=True)
class FifoAutomaton:
    states: frozenset[str]
    alphabet: frozenset[str]
    transitions: frozenset[tuple[str, Action, str]]
    initial: str
    name: str = ""

    @classmethod
    def build(cls, initial, transitions: Iterable[tuple[str, str, str]], alphabet=None, states=(), name=""):
        """``transitions`` use tokens: ``("q0", "!a", "q1")``."""
        trans = frozenset((q, fa(tok[0], tok[1:]), r) for q, tok, r in transitions)
        st = {initial, *states}
        for q, _, r in trans:
            st.update((q, r))
        letters = {act.letter for _, act, _ in trans}
        return cls(frozenset(st), frozenset(alphabet or letters) | letters, trans, initial, name)

    @property
    def outgoing(self) -> dict[str, list[tuple[Action, str]]]:
        table: dict[str, list] = {q: [] for q in self.states}
        for q, act, r in sorted(self.transitions, key=lambda t: (t[0], t[1].sort_key(), t[2])):
            table[q].append((act, r))
        return table

    def without(self, q: str, token: str, r: str) -> "FifoAutomaton":
        drop = (q, fa(token[0], token[1:]), r)
        return FifoAutomaton(self.states, self.alphabet, self.transitions - {drop}, self.initial, self.name)


def tiling_to_fifo(inst: TilingInstance) -> FifoAutomaton:
    """FIFO automaton that writes a first row, then each next row while
    consuming the previous one, so that receiving ``tF`` witnesses a tiling."""
    tiles = sorted(inst.tiles)
    first = {t: f"first({t})" for t in tiles}
    below = {t: f"below({t})" for t in tiles}
    left = {t: f"left({t})" for t in tiles}

    def leftbelow(t, u):
        return f"leftbelow({t},{u})"

    trans = {("q0", "!" + inst.t0, first[inst.t0])}
    for t, u in inst.H:
        trans.add((first[t], "!" + u, first[u]))
    for t in tiles:
        trans.add((first[t], "!" + CUT, "q1"))
        trans.add(("q1", "?" + t, below[t]))
        trans.add((leftbelow(t, CUT), "!" + CUT, "q1"))
        for u in tiles + [CUT]:
            trans.add((left[t], "?" + u, leftbelow(t, u)))
    for t, u in inst.V:
        trans.add((below[t], "!" + u, left[u]))
    for t, u, v in product(tiles, tiles, tiles):
        if (t, v) in inst.H and (u, v) in inst.V:
            trans.add((leftbelow(t, u), "!" + v, left[v]))
    states = {"q0", "q1"} | set(first.values()) | set(below.values()) | set(left.values())
    states |= {leftbelow(t, u) for t in tiles for u in tiles + [CUT]}
    return FifoAutomaton.build("q0", trans, alphabet=set(tiles) | {CUT}, states=states, name="tiling")


def find_tiling(inst: TilingInstance, max_width: int, max_rows: int) -> list[list[str]] | None:
    """Brute-force search for a rectangle of at most the given size that
    starts with ``t0`` and contains ``tF``.  Test oracle only."""
    for n in range(1, max_width + 1):
        rows = [r for r in product(sorted(inst.tiles), repeat=n) if all((r[j], r[j + 1]) in inst.H for j in range(n - 1))]
        firsts = [r for r in rows if r[0] == inst.t0]
        queue = deque(([r],) for r in firsts)
        while queue:
            (grid,) = queue.popleft()
            if any(inst.tF in r for r in grid):
                return [list(r) for r in grid]
            if len(grid) == max_rows:
                continue
            last = grid[-1]
            for r in rows:
                if all((last[j], r[j]) in inst.V for j in range(n)):
                    queue.append((grid + [r],))
    return None


def fifo_traces(a: FifoAutomaton, k: int, depth: int) -> Iterator[tuple[tuple[Action, ...], str, tuple[str, ...]]]:
    """Every k-bounded trace of ``a`` up to ``depth`` actions, with its end
    configuration ``(state, queue)``."""
    out = a.outgoing
    stack = [((), a.initial, ())]
    while stack:
        trace, q, w = stack.pop()
        yield trace, q, w
        if len(trace) == depth:
            continue
        for act, r in out[q]:
            if act.kind == "!":
                if len(w) >= k:
                    continue
                nw = w + (act.letter,)
            else:
                if not w or w[0] != act.letter:
                    continue
                nw = w[1:]
            stack.append((trace + (act,), r, nw))


@dataclass(frozen=True)
class R1R2Report:
    r2: bool
    r2_violations: tuple
    r1_violation: tuple[Action, ...] | None
    bound: int
    depth: int

    @property
    def r1_ok(self) -> bool:
        return self.r1_violation is None

    def describe(self) -> str:
        r2 = "R2 holds" if self.r2 else f"R2 fails: {len(self.r2_violations)} receive(s) from the initial state"
        if self.r1_violation is None:
            r1 = f"R1: no violation found up to depth {self.depth}, bound {self.bound}"
        else:
            r1 = "R1 fails: " + " ".join(map(str, self.r1_violation))
        return f"{r2}; {r1}"


def check_r1_r2(a: FifoAutomaton, bound: int = 4, depth: int = 12) -> R1R2Report:
    """R2 exactly; R1 by breadth-first search up to the given bounds."""
    bad = tuple((q, act, r) for q, act, r in sorted(a.transitions, key=str) if q == a.initial and act.kind == "?")
    out = a.outgoing
    start = (a.initial, ())
    parent: dict = {start: None}
    frontier = [start]
    violation = None
    for _ in range(depth):
        nxt = []
        for conf in frontier:
            q, w = conf
            for act, r in out[q]:
                if act.kind == "!":
                    if len(w) >= bound:
                        continue
                    nw = w + (act.letter,)
                else:
                    if not w or w[0] != act.letter:
                        continue
                    nw = w[1:]
                if not nw:
                    path = [act]
                    node = conf
                    while parent[node] is not None:
                        node, prev = parent[node]
                        path.append(prev)
                    violation = tuple(reversed(path))
                    break
                new = (r, nw)
                if new not in parent:
                    parent[new] = (conf, act)
                    nxt.append(new)
            if violation:
                break
        if violation or not nxt:
            break
        frontier = nxt
    return R1R2Report(not bad, bad, violation, bound, depth)


def reduction_letter(a: str, i: int, j: int) -> str:
    return f"{a}_{i}{j}"


def _act(kind: str, a: str, i: int, j: int) -> Action:
    return Action(kind, reduction_letter(a, i, j), i, j)


def reduction_messages(alphabet: Iterable[str]) -> MessageSet:
    return MessageSet(3, tuple((reduction_letter(a, i, j), i, j) for a in sorted(alphabet) for i, j in RELAY))


def _order_state(q: str, act: Action, r: str) -> str:
    return f"q[{q},?{act.letter},{r}]"


def _peer1(a: FifoAutomaton) -> Peer:
    trans = set()
    for q, act, r in a.transitions:
        if act.kind == "!":
            trans.add((q, _act("!", act.letter, 1, 2), r))
        else:
            mid = _order_state(q, act, r)
            trans.add((q, _act("!", act.letter, 1, 3), mid))
            trans.add((mid, _act("?", act.letter, 3, 1), r))
    return Peer(a.initial, frozenset(trans), frozenset(a.states))


def _peer2_transitions(alphabet) -> set:
    trans = set()
    for x in alphabet:
        for q in ("q0", "q1"):
            trans.add((q, _act("?", x, 3, 2), f"{x}.1"))
        trans.add((f"{x}.1", _act("?", x, 1, 2), f"{x}.2"))
        trans.add((f"{x}.2", _act("!", x, 2, 3), "q1"))
    return trans


def _peer2_prime_transitions(alphabet, m: str) -> set:
    states = {"q0", "q0'", "bot"} | {f"{x}.1'" for x in alphabet if x != m}
    trans = set()
    for x in alphabet:
        trans.add(("q0", _act("?", x, 1, 2), "q0'"))
        for q in states - {"q0"}:
            trans.add((q, _act("?", x, 1, 2), q))
        if x != m:
            trans.add(("q0", _act("?", x, 3, 2), f"{x}.1'"))
            trans.add(("q0'", _act("?", x, 3, 2), f"{x}.1'"))
            trans.add((f"{x}.1'", _act("!", x, 2, 3), "q0'"))
    for q in states:
        trans.add((q, _act("?", m, 3, 2), "bot"))
    return trans


def _peer3(alphabet) -> Peer:
    trans = set()
    for x in alphabet:
        trans.add(("q0", _act("?", x, 1, 3), f"{x}.1"))
        trans.add((f"{x}.1", _act("!", x, 3, 2), f"{x}.2"))
        trans.add((f"{x}.2", _act("?", x, 2, 3), f"{x}.3"))
        trans.add((f"{x}.3", _act("!", x, 3, 1), "q0"))
    return Peer("q0", frozenset(trans))


def _check_m(a: FifoAutomaton, m: str) -> None:
    if m not in a.alphabet:
        raise ValueError(f"special message {m!r} is not in the alphabet {sorted(a.alphabet)}")


def fifo_to_system(a: FifoAutomaton) -> System:
    peer2 = Peer("q0", frozenset(_peer2_transitions(a.alphabet)), frozenset({"q1"}))
    return System(reduction_messages(a.alphabet), (_peer1(a), peer2, _peer3(a.alphabet)), f"S[{a.name or 'A'}]")


def fifo_to_system_prime(a: FifoAutomaton, m: str) -> System:
    _check_m(a, m)
    peer2 = Peer("q0", frozenset(_peer2_prime_transitions(a.alphabet, m)))
    return System(reduction_messages(a.alphabet), (_peer1(a), peer2, _peer3(a.alphabet)), f"S'[{a.name or 'A'},{m}]")


def fifo_to_system_merged(a: FifoAutomaton, m: str) -> System:
    """Both variants of peer 2 glued at their common initial state."""
    _check_m(a, m)
    trans = _peer2_transitions(a.alphabet) | _peer2_prime_transitions(a.alphabet, m)
    peer2 = Peer("q0", frozenset(trans), frozenset({"q1"}))
    return System(reduction_messages(a.alphabet), (_peer1(a), peer2, _peer3(a.alphabet)), f"S''[{a.name or 'A'},{m}]")


def _sync(a: str, i: int, j: int) -> tuple[Action, Action]:
    return (_act("!", a, i, j), _act("?", a, i, j))


def morphism_h(trace: Sequence[Action]) -> tuple[Action, ...]:
    out: list[Action] = []
    for act in trace:
        x = act.letter
        if act.kind == "!":
            out.append(_act("!", x, 1, 2))
        else:
            out += [*_sync(x, 1, 3), *_sync(x, 3, 2), _act("?", x, 1, 2), *_sync(x, 2, 3), *_sync(x, 3, 1)]
    return tuple(out)


def morphism_h_prime(trace: Sequence[Action], m: str) -> tuple[Action, ...]:
    out: list[Action] = []
    for act in trace:
        x = act.letter
        if act.kind == "!":
            out += _sync(x, 1, 2)
        elif x == m:
            out += [*_sync(x, 1, 3), *_sync(x, 3, 2)]
        else:
            out += [*_sync(x, 1, 3), *_sync(x, 3, 2), *_sync(x, 2, 3), *_sync(x, 3, 1)]
    return tuple(out)


def morphism_h_doubleprime(trace: Sequence[Action]) -> tuple[Action, ...]:
    out: list[Action] = []
    for act in trace:
        if act.channel == (1, 2):
            if act.kind == "!":
                out += [act, act.dual()]
        else:
            out.append(act)
    return tuple(out)


def lm_language(a: FifoAutomaton, m: str) -> Nfa:
    """Paths of ``a`` read as a plain automaton (queue ignored) in which
    ``?m`` occurs at most once, as the last action.  Every state accepts."""
    _check_m(a, m)
    trans = set()
    for q, act, r in a.transitions:
        if act.kind == "?" and act.letter == m:
            trans.add(((q, False), act, (r, True)))
        else:
            trans.add(((q, False), act, (r, False)))
    alphabet = {act for _, act, _ in a.transitions} | {fa("!", m), fa("?", m)}
    states = {(q, flag) for q in a.states for flag in (False, True)}
    return Nfa.build((a.initial, False), trans, alphabet=alphabet, states=states)
