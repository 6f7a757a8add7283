"""Message sets, peers, systems and their operational semantics.

Peers are numbered from 1.  A letter determines its channel: the same
message name cannot be used on two different channels.

Three disciplines are supported:

* ``p2p-fifo``: one FIFO queue per ordered pair of peers;
* ``mailbox-fifo``: one FIFO queue per receiver;
* ``p2p-bag``: one multiset per ordered pair of peers.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Mapping

from cfsm.trace import Action, Trace

__all__ = [
    "SemanticsKind",
    "MessageSet",
    "Topology",
    "Peer",
    "System",
    "Configuration",
    "ValidationError",
    "NotEnabledError",
    "RunError",
    "validate_system",
    "topology",
    "is_oriented_ring",
    "initial_configuration",
    "enabled_actions",
    "step",
    "run",
]


class ValidationError(ValueError):
    """A system description violates a structural invariant."""


class NotEnabledError(ValueError):
    """An action was fired from a configuration that does not enable it."""


class RunError(ValueError):
    """A trace is not executable; ``index`` is the first offending action."""

    def __init__(self, index: int, action: Action, reason: str = "not enabled"):
        self.index = index
        self.action = action
        super().__init__(f"action {index} ({action}) {reason}")


class SemanticsKind(str, enum.Enum):
    P2P = "p2p-fifo"
    MAILBOX = "mailbox-fifo"
    BAG = "p2p-bag"

    @classmethod
    def parse(cls, text: str | SemanticsKind) -> SemanticsKind:
        if isinstance(text, SemanticsKind):
            return text
        aliases = {"p2p": cls.P2P, "mailbox": cls.MAILBOX, "bag": cls.BAG}
        try:
            return aliases.get(text) or cls(text)
        except ValueError:
            raise ValueError(f"unknown semantics {text!r}") from None

    @property
    def is_fifo(self) -> bool:
        return self is not SemanticsKind.BAG


@dataclass(frozen=True)
class MessageSet:
    """Letters with their source and destination peers."""

    np: int
    channels: tuple[tuple[str, int, int], ...] = ()

    def __post_init__(self):
        if self.np < 1:
            raise ValidationError("peer count must be at least 1")
        seen = set()
        for letter, src, dst in self.channels:
            if letter in seen:
                raise ValidationError(f"duplicate letter {letter!r}")
            seen.add(letter)
            if src == dst:
                raise ValidationError(f"self-loop channel: letter {letter!r} has src=dst={src}")
            for p in (src, dst):
                if not 1 <= p <= self.np:
                    raise ValidationError(f"letter {letter!r}: peer {p} out of range 1..{self.np}")
        object.__setattr__(self, "channels", tuple(sorted(self.channels)))

    @classmethod
    def of(cls, np: int, letters: Mapping[str, tuple[int, int]] | Iterable[tuple[str, int, int]]):
        if isinstance(letters, Mapping):
            letters = [(a, s, d) for a, (s, d) in letters.items()]
        return cls(np, tuple(letters))

    @cached_property
    def _table(self) -> dict[str, tuple[int, int]]:
        return {a: (s, d) for a, s, d in self.channels}

    @property
    def letters(self) -> tuple[str, ...]:
        return tuple(a for a, _, _ in self.channels)

    def __contains__(self, letter) -> bool:
        return letter in self._table

    def src(self, letter: str) -> int:
        return self._table[letter][0]

    def dst(self, letter: str) -> int:
        return self._table[letter][1]

    def send(self, letter: str) -> Action:
        s, d = self._table[letter]
        return Action("!", letter, s, d)

    def recv(self, letter: str) -> Action:
        s, d = self._table[letter]
        return Action("?", letter, s, d)

    def action(self, token: str) -> Action:
        """Resolve a single ``!a`` / ``?a`` token."""
        if len(token) < 2 or token[0] not in "!?":
            raise ValueError(f"bad action token {token!r}")
        letter = token[1:]
        if letter not in self._table:
            raise ValueError(f"unknown letter {letter!r}")
        return self.send(letter) if token[0] == "!" else self.recv(letter)

    def actions_of(self, peer: int) -> frozenset[Action]:
        out = set()
        for a, s, d in self.channels:
            if s == peer:
                out.add(self.send(a))
            if d == peer:
                out.add(self.recv(a))
        return frozenset(out)

    def parse_trace(self, text: str) -> Trace:
        """Parse whitespace-separated tokens; ``!?a`` expands to ``!a ?a``."""
        out: list[Action] = []
        for tok in text.split():
            if tok.startswith("!?"):
                out.append(self.send(self._check(tok[2:])))
                out.append(self.recv(tok[2:]))
            else:
                out.append(self.action(tok))
        return tuple(out)

    def _check(self, letter: str) -> str:
        if letter not in self._table:
            raise ValueError(f"unknown letter {letter!r}")
        return letter


@dataclass(frozen=True)
class Topology:
    np: int
    edges: frozenset[tuple[int, int]]


@dataclass(frozen=True)
class Peer:
    """A finite automaton over the actions of one peer.  Every state accepts."""

    initial: str
    transitions: frozenset[tuple[str, Action, str]] = frozenset()
    extra_states: frozenset[str] = frozenset()

    @cached_property
    def states(self) -> tuple[str, ...]:
        st = {self.initial} | set(self.extra_states)
        for q, _, r in self.transitions:
            st.add(q)
            st.add(r)
        return tuple(sorted(st))

    @cached_property
    def outgoing(self) -> dict[str, tuple[tuple[Action, str], ...]]:
        table: dict[str, list[tuple[Action, str]]] = {q: [] for q in self.states}
        for q, act, r in self.transitions:
            table[q].append((act, r))
        return {q: tuple(sorted(v, key=lambda e: (e[0].sort_key(), e[1]))) for q, v in table.items()}

    def is_final(self, state: str) -> bool:
        return not self.outgoing[state]

    def accepts(self, trace: Iterable[Action]) -> bool:
        """Whether ``trace`` labels a path from the initial state."""
        current = {self.initial}
        for act in trace:
            current = {r for q in current for a, r in self.outgoing[q] if a == act}
            if not current:
                return False
        return True


@dataclass(frozen=True)
class System:
    message_set: MessageSet
    peers: tuple[Peer, ...]
    name: str = ""

    def __post_init__(self):
        if len(self.peers) != self.message_set.np:
            raise ValidationError(
                f"{len(self.peers)} peers given for a message set over {self.message_set.np} peers"
            )

    @property
    def np(self) -> int:
        return self.message_set.np

    def peer(self, i: int) -> Peer:
        return self.peers[i - 1]


BufferKey = "tuple[int, int] | int"


@dataclass(frozen=True, order=True)
class Configuration:
    """Control states plus buffer contents.

    ``buffers`` lists every channel key of the active discipline in sorted
    order, so two configurations are equal iff they are the same tuple.
    Bag contents are kept sorted.
    """

    control: tuple[str, ...]
    buffers: tuple[tuple[object, tuple[str, ...]], ...] = field(default=())

    @property
    def stable(self) -> bool:
        return all(not w for _, w in self.buffers)

    def buffer(self, key) -> tuple[str, ...]:
        for k, w in self.buffers:
            if k == key:
                return w
        raise KeyError(key)

    def buffer_map(self) -> dict:
        return dict(self.buffers)

    def nonempty_buffers(self) -> dict:
        return {k: w for k, w in self.buffers if w}

    def max_buffer(self) -> int:
        return max((len(w) for _, w in self.buffers), default=0)

    def __str__(self) -> str:
        parts = list(self.control)
        for k, w in self.buffers:
            if w:
                key = f"{k[0]}>{k[1]}" if isinstance(k, tuple) else f">{k}"
                parts.append(f"{key}:{'.'.join(w)}")
        return "(" + ", ".join(parts) + ")"


def channel_keys(msgs: MessageSet, sem: SemanticsKind) -> list:
    n = msgs.np
    if sem is SemanticsKind.MAILBOX:
        return list(range(1, n + 1))
    return [(i, j) for i in range(1, n + 1) for j in range(1, n + 1) if i != j]


def buffer_key(msgs: MessageSet, sem: SemanticsKind, letter: str):
    if sem is SemanticsKind.MAILBOX:
        return msgs.dst(letter)
    return (msgs.src(letter), msgs.dst(letter))


def validate_system(raw: Mapping) -> System:
    """Build a :class:`System` from a parsed description.

    ``raw`` has keys ``peers`` (count), ``messages`` (iterable of
    ``(letter, src, dst)``), ``machines`` (mapping peer id to a mapping with
    ``initial``, ``transitions`` as ``(state, token, state)`` triples and an
    optional ``states`` list) and an optional ``name``.
    """
    np = int(raw["peers"])
    letters = list(raw.get("messages", ()))
    seen: set[str] = set()
    for letter, src, dst in letters:
        if letter in seen:
            raise ValidationError(f"duplicate letter {letter!r}")
        seen.add(letter)
        if src == dst:
            raise ValidationError(f"self-loop channel: letter {letter!r} has src=dst={src}")
    msgs = MessageSet(np, tuple((a, int(s), int(d)) for a, s, d in letters))
    machines = raw.get("machines", {})
    unknown = set(machines) - set(range(1, np + 1))
    if unknown:
        raise ValidationError(f"machine for unknown peer(s) {sorted(unknown)}")
    peers = []
    for i in range(1, np + 1):
        spec = machines.get(i, {})
        declared = spec.get("states")
        initial = spec.get("initial", "q0")
        if declared is not None and initial not in declared:
            raise ValidationError(f"peer {i}: unknown state {initial!r} referenced as initial")
        own = msgs.actions_of(i)
        trans = set()
        for q, token, r in spec.get("transitions", ()):
            if declared is not None:
                for st in (q, r):
                    if st not in declared:
                        raise ValidationError(f"peer {i}: unknown state {st!r} referenced")
            try:
                act = token if isinstance(token, Action) else msgs.action(token)
            except ValueError as exc:
                raise ValidationError(f"peer {i}: {exc}") from None
            if act not in own:
                raise ValidationError(f"peer {i}: foreign action {act} (belongs to peer {act.peer})")
            trans.add((q, act, r))
        peers.append(Peer(initial, frozenset(trans), frozenset(declared or ())))
    return System(msgs, tuple(peers), raw.get("name", ""))


def topology(msgs: MessageSet) -> Topology:
    return Topology(msgs.np, frozenset((s, d) for _, s, d in msgs.channels))


def is_oriented_ring(topo: Topology) -> bool:
    n = topo.np
    ring = {(i, i % n + 1) for i in range(1, n + 1)}
    return topo.edges == ring


def initial_configuration(system: System, sem: SemanticsKind | str = SemanticsKind.P2P) -> Configuration:
    sem = SemanticsKind.parse(sem)
    keys = channel_keys(system.message_set, sem)
    return Configuration(tuple(p.initial for p in system.peers), tuple((k, ()) for k in keys))


def _receivable(content: tuple[str, ...], letter: str, sem: SemanticsKind) -> bool:
    if sem is SemanticsKind.BAG:
        return letter in content
    return bool(content) and content[0] == letter


def enabled_actions(system: System, sem, c: Configuration) -> set[Action]:
    sem = SemanticsKind.parse(sem)
    msgs = system.message_set
    buffers = c.buffer_map()
    out = set()
    for i, peer in enumerate(system.peers):
        for act, _ in peer.outgoing[c.control[i]]:
            if act.kind == "!":
                out.add(act)
            elif _receivable(buffers[buffer_key(msgs, sem, act.letter)], act.letter, sem):
                out.add(act)
    return out


def step(system: System, sem, c: Configuration, action: Action) -> Configuration:
    """Fire ``action``; raises :class:`NotEnabledError` if it cannot fire.

    Peers may be nondeterministic; the first matching transition (in sorted
    order) is taken.  Use :func:`successors` to see every choice.
    """
    succ = successors(system, sem, c, action)
    if not succ:
        raise NotEnabledError(f"{action} not enabled in {c}")
    return succ[0]


def successors(system: System, sem, c: Configuration, action: Action) -> list[Configuration]:
    sem = SemanticsKind.parse(sem)
    msgs = system.message_set
    if action.letter not in msgs:
        raise NotEnabledError(f"unknown letter {action.letter!r}")
    i = action.peer
    key = buffer_key(msgs, sem, action.letter)
    buffers = c.buffer_map()
    content = buffers[key]
    if action.kind == "!":
        if sem is SemanticsKind.BAG:
            new_content = tuple(sorted(content + (action.letter,)))
        else:
            new_content = content + (action.letter,)
    else:
        if not _receivable(content, action.letter, sem):
            return []
        if sem is SemanticsKind.BAG:
            idx = content.index(action.letter)
            new_content = content[:idx] + content[idx + 1 :]
        else:
            new_content = content[1:]
    targets = [r for act, r in system.peer(i).outgoing[c.control[i - 1]] if act == action]
    new_buffers = tuple((k, new_content if k == key else w) for k, w in c.buffers)
    out = []
    for r in targets:
        control = c.control[: i - 1] + (r,) + c.control[i:]
        out.append(Configuration(control, new_buffers))
    return out


def run(system: System, sem, trace: Iterable[Action]) -> Configuration:
    """Execute ``trace`` from the initial configuration.

    Nondeterministic peers are handled by tracking every reachable
    configuration; the result is the smallest one when several remain.
    """
    sem = SemanticsKind.parse(sem)
    current = {initial_configuration(system, sem)}
    for idx, act in enumerate(trace):
        nxt = set()
        for c in current:
            nxt.update(successors(system, sem, c, act))
        if not nxt:
            raise RunError(idx, act)
        current = nxt
    return min(current)


def run_all(system: System, sem, trace: Iterable[Action]) -> frozenset[Configuration]:
    """Every configuration reachable by ``trace`` (empty if not executable)."""
    sem = SemanticsKind.parse(sem)
    current = {initial_configuration(system, sem)}
    for act in trace:
        current = {n for c in current for n in successors(system, sem, c, act)}
        if not current:
            break
    return frozenset(current)
