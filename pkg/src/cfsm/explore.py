"""Bounded state spaces of a system and the observables derived from them."""

from __future__ import annotations

import logging
from collections import deque
from dataclasses import dataclass
from functools import cached_property
from typing import Iterator

from cfsm import _engine
from cfsm.lang import SILENT, Nfa
from cfsm.model import (
    Configuration,
    SemanticsKind,
    System,
    channel_keys,
    buffer_key,
    successors,
)
from cfsm.trace import Action

log = logging.getLogger(__name__)

__all__ = [
    "DEFAULT_MAX_STATES",
    "ExplorationLimitError",
    "BoundedLts",
    "Observable",
    "DeadlockReport",
    "DrainVerdict",
    "build_lts",
    "send_lts",
    "observables",
    "deadlocks",
    "receive_drain",
    "drainable_to_stable",
    "to_dot",
]

DEFAULT_MAX_STATES = 1_000_000


class ExplorationLimitError(RuntimeError):
    """The reachable state space is larger than the configured ceiling."""


@dataclass(frozen=True)
class BoundedLts:
    """Reachable configurations under a buffer bound.

    ``bound == 0`` is the rendezvous LTS: its edges carry ``!?`` labels.
    Edge labels are :class:`Action` values, or ``None`` for receives in a
    send-LTS.  State 0 is the initial configuration.
    """

    system: System
    semantics: SemanticsKind
    bound: int
    states: tuple[Configuration, ...]
    edges: tuple[tuple[int, Action | None, int], ...]

    initial = 0

    @cached_property
    def index(self) -> dict[Configuration, int]:
        return {c: i for i, c in enumerate(self.states)}

    @cached_property
    def out(self) -> tuple[tuple[tuple[Action | None, int], ...], ...]:
        table: list[list] = [[] for _ in self.states]
        for s, lab, t in self.edges:
            table[s].append((lab, t))
        return tuple(tuple(row) for row in table)

    @property
    def stats(self) -> dict:
        return {
            "states": len(self.states),
            "edges": len(self.edges),
            "k": self.bound,
            "semantics": self.semantics.value,
        }

    def stable_states(self) -> list[int]:
        return [i for i, c in enumerate(self.states) if c.stable]

    def accepts_trace(self, trace) -> bool:
        """Whether ``trace`` (plain actions) labels a path from the initial state."""
        trace = tuple(trace)
        if self.bound == 0:
            if len(trace) % 2:
                return False
            labels = []
            for snd, rcv in zip(trace[::2], trace[1::2]):
                if snd.kind != "!" or rcv.kind != "?" or snd.letter != rcv.letter:
                    return False
                labels.append(Action("!?", snd.letter, snd.src, snd.dst))
        else:
            labels = list(trace)
        current = {0}
        for lab in labels:
            current = {t for s in current for l2, t in self.out[s] if l2 == lab}
            if not current:
                return False
        return True

    def traces(self, depth: int) -> Iterator[tuple[tuple[Action, ...], int]]:
        """Every (trace, state) with trace length at most ``depth`` actions.

        Rendezvous edges count as two actions.  Traces reaching the same
        state by different paths are all reported.
        """
        stack = [((), 0)]
        while stack:
            trace, s = stack.pop()
            yield trace, s
            for lab, t in self.out[s]:
                if lab is None:
                    raise ValueError("cannot enumerate traces of a send-LTS")
                if lab.kind == "!?":
                    ext = (Action("!", lab.letter, lab.src, lab.dst), Action("?", lab.letter, lab.src, lab.dst))
                else:
                    ext = (lab,)
                if len(trace) + len(ext) <= depth:
                    stack.append((trace + ext, t))


@dataclass(frozen=True)
class Observable:
    """Send words of bounded traces, plus the stable configurations they reach."""

    send_language: Nfa
    stable_map: dict

    def as_nfa(self, with_stable: bool = True) -> Nfa:
        """Single automaton for the observable.

        A stable pair ``(w, c)`` is encoded as the word ``w`` followed by the
        tag ``c``; tags sort after letters.
        """
        if not with_stable:
            return self.send_language
        lang = self.send_language
        top = "⊤"
        trans = set(lang.transitions)
        tags = set()
        for c, nfa in self.stable_map.items():
            for q in nfa.accepting:
                trans.add((q, c, top))
            tags.add(c)
        states = lang.states | {top}
        return Nfa(states, lang.alphabet | tags, frozenset(trans), lang.initial, frozenset(states))


def _encode(system: System, sem: SemanticsKind):
    msgs = system.message_set
    letters = sorted(msgs.letters)
    lid = {a: i for i, a in enumerate(letters)}
    keys = channel_keys(msgs, sem)
    kid = {k: i for i, k in enumerate(keys)}
    state_names = [p.states for p in system.peers]
    sid = [{q: i for i, q in enumerate(names)} for names in state_names]
    trans = []
    for p, peer in enumerate(system.peers):
        rows = []
        for q in state_names[p]:
            rows.append(
                tuple((int(act.kind == "?"), lid[act.letter], sid[p][r]) for act, r in peer.outgoing[q])
            )
        trans.append(rows)
    initial = tuple(sid[p][peer.initial] for p, peer in enumerate(system.peers))
    letter_buf = [kid[buffer_key(msgs, sem, a)] for a in letters]
    letter_dst = [msgs.dst(a) - 1 for a in letters]
    return letters, keys, state_names, trans, initial, letter_buf, letter_dst


def build_lts(system: System, sem=SemanticsKind.P2P, k: int = 1, max_states: int = DEFAULT_MAX_STATES) -> BoundedLts:
    """Reachable graph of ``system`` with every buffer bounded by ``k``.

    For the mailbox discipline the bound applies to each receiver's queue,
    for bags to each multiset's size.
    """
    if k < 0:
        raise ValueError("bound must be >= 0")
    sem = SemanticsKind.parse(sem)
    letters, keys, names, trans, initial, letter_buf, letter_dst = _encode(system, sem)
    try:
        raw_states, raw_edges = _engine.explore(
            trans, initial, letter_buf, letter_dst, len(keys), sem is SemanticsKind.BAG, k, max_states
        )
    except OverflowError as exc:
        raise ExplorationLimitError(f"{system.name or 'system'} at k={k}: {exc}") from None
    np = system.np
    msgs = system.message_set
    states = tuple(
        Configuration(
            tuple(names[p][raw[p]] for p in range(np)),
            tuple((keys[b], tuple(letters[x] for x in raw[np + b])) for b in range(len(keys))),
        )
        for raw in raw_states
    )
    kinds = ("!", "?", "!?")
    labels = {}
    edges = []
    for s, kind, a, t in raw_edges:
        lab = labels.get((kind, a))
        if lab is None:
            letter = letters[a]
            lab = labels[(kind, a)] = Action(kinds[kind], letter, msgs.src(letter), msgs.dst(letter))
        edges.append((s, lab, t))
    log.debug("explored %s at k=%d: %d states, %d edges", system.name, k, len(states), len(edges))
    return BoundedLts(system, sem, k, states, tuple(edges))


def send_lts(system: System, sem=SemanticsKind.P2P, k: int = 1, max_states: int = DEFAULT_MAX_STATES) -> BoundedLts:
    """``build_lts`` with receive edges relabelled silent."""
    lts = build_lts(system, sem, k, max_states)
    edges = tuple((s, None if lab.kind == "?" else lab, t) for s, lab, t in lts.edges)
    return BoundedLts(lts.system, lts.semantics, lts.bound, lts.states, edges)


def observables(lts: BoundedLts) -> Observable:
    trans = set()
    for s, lab, t in lts.edges:
        sym = SILENT if lab is None or lab.kind == "?" else lab.letter
        trans.add((s, sym, t))
    states = frozenset(range(len(lts.states)))
    alphabet = frozenset(lts.system.message_set.letters)
    lang = Nfa(states, alphabet, frozenset(trans), 0, states)
    stable_map = {
        lts.states[i]: Nfa(states, alphabet, lang.transitions, 0, frozenset({i})) for i in lts.stable_states()
    }
    return Observable(lang, stable_map)


@dataclass(frozen=True)
class DeadlockReport:
    """Sink states of a bounded LTS, classified.

    ``deadlocks``: some peer still has transitions but none can fire (and no
    send is held back only by the bound).  ``terminal``: every peer is in a
    state without transitions and buffers are empty.  ``orphans``: every peer
    is finished but messages remain.  ``bound_blocked``: only the buffer
    bound prevents progress.
    """

    deadlocks: tuple[Configuration, ...]
    terminal: tuple[Configuration, ...]
    orphans: tuple[Configuration, ...]
    bound_blocked: tuple[Configuration, ...]


def deadlocks(lts: BoundedLts) -> DeadlockReport:
    groups: dict[str, list] = {"deadlocks": [], "terminal": [], "orphans": [], "bound_blocked": []}
    peers = lts.system.peers
    for i, c in enumerate(lts.states):
        if lts.out[i]:
            continue
        finished = all(p.is_final(q) for p, q in zip(peers, c.control))
        if finished:
            groups["terminal" if c.stable else "orphans"].append(c)
        elif lts.bound > 0 and any(
            act.kind == "!" for p, q in zip(peers, c.control) for act, _ in p.outgoing[q]
        ):
            groups["bound_blocked"].append(c)
        else:
            groups["deadlocks"].append(c)
    return DeadlockReport(**{k: tuple(v) for k, v in groups.items()})


def receive_drain(system: System, sem, c: Configuration) -> tuple[Action, ...] | None:
    """A shortest receive-only sequence from ``c`` to a stable configuration."""
    sem = SemanticsKind.parse(sem)
    parent = {c: None}
    queue = deque([c])
    while queue:
        cur = queue.popleft()
        if cur.stable:
            path = []
            while parent[cur] is not None:
                cur, act = parent[cur]
                path.append(act)
            return tuple(reversed(path))
        for p, peer in enumerate(system.peers):
            for act, _ in peer.outgoing[cur.control[p]]:
                if act.kind != "?":
                    continue
                for nxt in successors(system, sem, cur, act):
                    if nxt not in parent:
                        parent[nxt] = (cur, act)
                        queue.append(nxt)
    return None


@dataclass(frozen=True)
class DrainVerdict:
    drainable: bool
    failures: tuple[tuple[Configuration, dict], ...]
    witnesses: dict

    def __bool__(self) -> bool:
        return self.drainable


def drainable_to_stable(lts: BoundedLts) -> DrainVerdict:
    """Check that every state can reach a stable one by receives alone.

    Failures carry the blocking buffer contents (orphan messages or
    unspecified receptions).
    """
    failures = []
    witnesses = {}
    for c in lts.states:
        path = receive_drain(lts.system, lts.semantics, c)
        if path is None:
            failures.append((c, c.nonempty_buffers()))
        else:
            witnesses[c] = path
    return DrainVerdict(not failures, tuple(failures), witnesses)


def _dot_escape(text: str) -> str:
    return text.replace("\\", "\\\\").replace('"', '\\"')


def to_dot(lts: BoundedLts) -> str:
    lines = [f'digraph "{_dot_escape(lts.system.name or "lts")}_k{lts.bound}" {{', "  rankdir=LR;"]
    for i, c in enumerate(lts.states):
        shape = "doublecircle" if i == 0 else ("circle" if c.stable else "box")
        lines.append(f'  s{i} [label="{_dot_escape(str(c))}", shape={shape}];')
    for s, lab, t in lts.edges:
        text = "tau" if lab is None else f"{lab.kind}{lab.letter}"
        lines.append(f'  s{s} -> s{t} [label="{_dot_escape(text)}"];')
    lines.append("}")
    return "\n".join(lines) + "\n"
