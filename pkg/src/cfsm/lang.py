"""Small finite-automaton engine used for every language-level decision.

Symbols are arbitrary hashable values.  Letters are strings; observables
also use non-string tags (stable configurations), which always sort after
letters.  ``None`` is the silent symbol.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from functools import cached_property
from typing import Hashable, Iterable

__all__ = [
    "SILENT",
    "Nfa",
    "symbol_key",
    "determinize",
    "minimize",
    "isomorphic",
    "language_subset",
    "language_equal",
    "counterexample_word",
    "accepts",
    "words_up_to",
    "prefix_closed_nfa",
]

SILENT = None


def symbol_key(sym) -> tuple:
    if isinstance(sym, str):
        return (0, sym)
    return (1, repr(sym))


@dataclass(frozen=True)
class Nfa:
    states: frozenset
    alphabet: frozenset
    transitions: frozenset  # of (state, symbol | None, state)
    initial: Hashable
    accepting: frozenset

    def __post_init__(self):
        if self.initial not in self.states:
            raise ValueError(f"initial state {self.initial!r} unknown")
        if not self.accepting <= self.states:
            raise ValueError("accepting states must be states")
        for q, a, r in self.transitions:
            if q not in self.states or r not in self.states:
                raise ValueError(f"transition {q!r} -{a!r}-> {r!r} references an unknown state")
            if a is not SILENT and a not in self.alphabet:
                raise ValueError(f"transition symbol {a!r} not in alphabet")

    @classmethod
    def build(cls, initial, transitions: Iterable, accepting=None, alphabet=None, states=None):
        transitions = frozenset(transitions)
        st = {initial}
        for q, _, r in transitions:
            st.add(q)
            st.add(r)
        if states is not None:
            st |= set(states)
        if alphabet is None:
            alphabet = {a for _, a, _ in transitions if a is not SILENT}
        acc = frozenset(st) if accepting is None else frozenset(accepting)
        return cls(frozenset(st), frozenset(alphabet), transitions, initial, acc)

    @cached_property
    def delta(self) -> dict:
        table: dict = {}
        for q, a, r in self.transitions:
            table.setdefault(q, {}).setdefault(a, set()).add(r)
        return table

    @cached_property
    def sorted_alphabet(self) -> tuple:
        return tuple(sorted(self.alphabet, key=symbol_key))

    @property
    def is_deterministic(self) -> bool:
        for row in self.delta.values():
            if SILENT in row or any(len(t) > 1 for t in row.values()):
                return False
        return True

    @property
    def prefix_closed_shape(self) -> bool:
        return self.accepting == self.states

    def closure(self, states: Iterable) -> frozenset:
        out = set(states)
        todo = list(out)
        while todo:
            q = todo.pop()
            for r in self.delta.get(q, {}).get(SILENT, ()):
                if r not in out:
                    out.add(r)
                    todo.append(r)
        return frozenset(out)

    def post(self, states: Iterable, sym) -> frozenset:
        nxt = set()
        for q in states:
            nxt |= self.delta.get(q, {}).get(sym, set())
        return self.closure(nxt)


def accepts(nfa: Nfa, word: Iterable) -> bool:
    cur = nfa.closure({nfa.initial})
    for sym in word:
        cur = nfa.post(cur, sym)
        if not cur:
            return False
    return bool(cur & nfa.accepting)


def determinize(nfa: Nfa) -> Nfa:
    """Subset construction; states are renumbered 0.. in BFS order.

    The result is partial (no dead state) but always has its initial state.
    """
    start = nfa.closure({nfa.initial})
    index = {start: 0}
    order = [start]
    trans = []
    queue = deque([start])
    while queue:
        cur = queue.popleft()
        for sym in nfa.sorted_alphabet:
            nxt = nfa.post(cur, sym)
            if not nxt:
                continue
            if nxt not in index:
                index[nxt] = len(order)
                order.append(nxt)
                queue.append(nxt)
            trans.append((index[cur], sym, index[nxt]))
    accepting = {index[s] for s in order if s & nfa.accepting}
    return Nfa(frozenset(range(len(order))), nfa.alphabet, frozenset(trans), 0, frozenset(accepting))


def minimize(nfa: Nfa) -> Nfa:
    """Minimal partial DFA: determinize, drop dead states, merge by refinement."""
    dfa = determinize(nfa)
    alive = set(dfa.accepting)
    rev: dict = {}
    for q, a, r in dfa.transitions:
        rev.setdefault(r, set()).add(q)
    todo = list(alive)
    while todo:
        r = todo.pop()
        for q in rev.get(r, ()):
            if q not in alive:
                alive.add(q)
                todo.append(q)
    if dfa.initial not in alive:
        return Nfa(frozenset({0}), nfa.alphabet, frozenset(), 0, frozenset())
    step = {(q, a): r for q, a, r in dfa.transitions if q in alive and r in alive}
    block = {q: int(q in dfa.accepting) for q in alive}
    while True:
        sig = {
            q: (block[q],) + tuple(block.get(step.get((q, a)), -1) for a in dfa.sorted_alphabet)
            for q in alive
        }
        ids: dict = {}
        new_block = {q: ids.setdefault(sig[q], len(ids)) for q in sorted(alive)}
        if len(ids) == len(set(block.values())):
            block = new_block
            break
        block = new_block
    # renumber blocks in BFS order from the initial block
    order = {block[dfa.initial]: 0}
    queue = deque([dfa.initial])
    seen = {dfa.initial}
    trans = set()
    reps = {}
    while queue:
        q = queue.popleft()
        reps.setdefault(block[q], q)
        for a in dfa.sorted_alphabet:
            r = step.get((q, a))
            if r is None:
                continue
            if block[r] not in order:
                order[block[r]] = len(order)
            trans.add((order[block[q]], a, order[block[r]]))
            if r not in seen:
                seen.add(r)
                queue.append(r)
    accepting = {order[block[q]] for q in alive if q in dfa.accepting and block[q] in order}
    return Nfa(frozenset(order.values()), nfa.alphabet, frozenset(trans), 0, frozenset(accepting))


def isomorphic(a: Nfa, b: Nfa) -> bool:
    """Isomorphism of deterministic automata (reachable parts)."""
    if not (a.is_deterministic and b.is_deterministic):
        raise ValueError("isomorphism check needs deterministic automata")
    if a.alphabet != b.alphabet:
        return False
    mapping = {a.initial: b.initial}
    queue = deque([a.initial])
    while queue:
        q = queue.popleft()
        p = mapping[q]
        if (q in a.accepting) != (p in b.accepting):
            return False
        ra, rb = a.delta.get(q, {}), b.delta.get(p, {})
        if set(ra) != set(rb):
            return False
        for sym, (qa,) in ((s, tuple(t)) for s, t in ra.items()):
            (pb,) = tuple(rb[sym])
            if qa in mapping:
                if mapping[qa] != pb:
                    return False
            else:
                mapping[qa] = pb
                queue.append(qa)
    return len(set(mapping.values())) == len(mapping)


def counterexample_word(a: Nfa, b: Nfa) -> tuple | None:
    """A shortest word of L(a) \\ L(b); ties go to the smallest symbols.

    Breadth-first search over pairs (subset of ``a``, subset of ``b``); an
    empty ``b`` subset plays the role of the complement's sink.
    """
    alphabet = sorted(set(a.alphabet) | set(b.alphabet), key=symbol_key)
    start = (a.closure({a.initial}), b.closure({b.initial}))
    parent = {start: None}
    queue = deque([start])
    while queue:
        node = queue.popleft()
        sa, sb = node
        if sa & a.accepting and not (sb & b.accepting):
            word = []
            while parent[node] is not None:
                node, sym = parent[node]
                word.append(sym)
            return tuple(reversed(word))
        for sym in alphabet:
            na = a.post(sa, sym)
            if not na:
                continue
            nxt = (na, b.post(sb, sym))
            if nxt not in parent:
                parent[nxt] = (node, sym)
                queue.append(nxt)
    return None


def language_subset(a: Nfa, b: Nfa) -> bool:
    return counterexample_word(a, b) is None


def language_equal(a: Nfa, b: Nfa) -> bool:
    return language_subset(a, b) and language_subset(b, a)


def words_up_to(nfa: Nfa, n: int) -> set[tuple]:
    """Every accepted word of length at most ``n``."""
    out = set()
    frontier = {(): nfa.closure({nfa.initial})}
    for length in range(n + 1):
        nxt = {}
        for word, cur in frontier.items():
            if cur & nfa.accepting:
                out.add(word)
            if length == n:
                continue
            for sym in nfa.alphabet:
                post = nfa.post(cur, sym)
                if post:
                    nxt[word + (sym,)] = post
        frontier = nxt
    return out


def prefix_closed_nfa(words: Iterable[Iterable]) -> Nfa:
    """Trie automaton for the prefix closure of finitely many words."""
    trans = set()
    for w in words:
        w = tuple(w)
        for i in range(len(w)):
            trans.add((w[:i], w[i], w[: i + 1]))
    return Nfa.build((), trans)
