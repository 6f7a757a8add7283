"""Decision procedures over bounded state spaces.

k-synchronizability compares the observable of the k-bounded LTS with the
rendezvous one.  On oriented rings, 1-synchronizability coincides with
synchronizability, which makes :func:`ring_synchronizable` a decision
procedure for the full property.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterable, Sequence

from cfsm.explore import (
    DEFAULT_MAX_STATES,
    BoundedLts,
    build_lts,
    observables,
    receive_drain,
    send_lts,
)
from cfsm.lang import counterexample_word
from cfsm.model import (
    Configuration,
    SemanticsKind,
    System,
    is_oriented_ring,
    run_all,
    topology,
)
from cfsm.trace import Action

__all__ = [
    "PreconditionError",
    "SyncVerdict",
    "RegularReachSet",
    "k_synchronizable",
    "ring_synchronizable",
    "normalize_trace",
    "is_normalized",
    "reach_representation",
    "reach_contains",
    "receive_drain",
    "branching_bisimilar",
    "k_stable",
    "strongly_k_stable",
]


class PreconditionError(ValueError):
    """The input falls outside the class a procedure is defined for."""


@dataclass(frozen=True)
class SyncVerdict:
    """Outcome of comparing the k-bounded observable with the rendezvous one.

    ``witness`` is a send word, or a ``(send word, configuration)`` pair for
    a stable configuration reached asynchronously but not synchronously.
    """

    equal: bool
    witness: tuple | None = None
    k: int = 1
    language_only: bool = False
    stats: dict = field(default_factory=dict, compare=False)

    def __bool__(self) -> bool:
        return self.equal

    @property
    def send_word(self) -> tuple[str, ...] | None:
        if self.witness is None:
            return None
        if self.witness and isinstance(self.witness[-1], Configuration):
            return self.witness[0]
        return self.witness

    @property
    def stable_configuration(self) -> Configuration | None:
        if self.witness and isinstance(self.witness[-1], Configuration):
            return self.witness[1]
        return None


def k_synchronizable(
    system: System,
    sem=SemanticsKind.P2P,
    k: int = 1,
    language_only: bool = False,
    max_states: int = DEFAULT_MAX_STATES,
) -> SyncVerdict:
    """Decide whether the k-bounded observable equals the rendezvous one.

    Only the inclusion of the k-bounded observable in the rendezvous one is
    checked; the converse holds for every system.
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    sem = SemanticsKind.parse(sem)
    lts_k = build_lts(system, sem, k, max_states)
    lts_0 = build_lts(system, sem, 0, max_states)
    a = observables(lts_k).as_nfa(not language_only)
    b = observables(lts_0).as_nfa(not language_only)
    word = counterexample_word(a, b)
    stats = {"k_states": len(lts_k.states), "k_edges": len(lts_k.edges), "sync_states": len(lts_0.states)}
    stats.update(lts_k.stats)
    if word is None:
        return SyncVerdict(True, None, k, language_only, stats)
    if word and isinstance(word[-1], Configuration):
        witness = (tuple(word[:-1]), word[-1])
    else:
        witness = tuple(word)
    return SyncVerdict(False, witness, k, language_only, stats)


def _require_ring(system: System) -> None:
    if not is_oriented_ring(topology(system.message_set)):
        raise PreconditionError("communication topology is not an oriented ring")


def ring_synchronizable(system: System, sem=SemanticsKind.P2P, max_states: int = DEFAULT_MAX_STATES) -> SyncVerdict:
    """Synchronizability of a system whose topology is an oriented ring."""
    if SemanticsKind.parse(sem) is not SemanticsKind.P2P:
        raise PreconditionError("ring decision requires p2p-fifo semantics")
    _require_ring(system)
    return k_synchronizable(system, SemanticsKind.P2P, 1, False, max_states)


@lru_cache(maxsize=64)
def _one_synchronizable(system: System) -> bool:
    return k_synchronizable(system, SemanticsKind.P2P, 1).equal


def is_normalized(trace: Sequence[Action]) -> bool:
    """A rendezvous prefix followed by sends only."""
    i = 0
    n = len(trace)
    while i + 1 < n and trace[i].kind == "!" and trace[i + 1].kind == "?" and trace[i].letter == trace[i + 1].letter:
        i += 2
    return all(a.kind == "!" for a in trace[i:])


def normalize_trace(system: System, trace: Iterable[Action], assume_synchronizable: bool = False) -> tuple[Action, ...]:
    """Rewrite an executable trace into a normalized, system-equivalent one.

    Induction on the trace.  The normal form of the prefix is kept as a
    rendezvous word plus a list of pending sends.  A send is appended to the
    pending list.  A receive ``?a`` by the successor of peer ``i`` requires
    the first pending send of peer ``i`` to be ``a``; it is moved into the
    rendezvous prefix, and the pending list becomes the sends of the other
    peers followed by the rest of peer ``i``'s sends.
    """
    trace = tuple(trace)
    _require_ring(system)
    if not run_all(system, SemanticsKind.P2P, trace):
        raise PreconditionError("trace is not executable")
    if not assume_synchronizable and not _one_synchronizable(system):
        raise PreconditionError("system is not 1-synchronizable")
    prefix: list[Action] = []
    pending: list[Action] = []
    for act in trace:
        if act.kind == "!":
            pending.append(act)
            continue
        own = [p for p in pending if p.src == act.src]
        other = [p for p in pending if p.src != act.src]
        if not own or own[0].letter != act.letter:
            raise PreconditionError(f"receive {act} does not match the first pending send of peer {act.src}")
        prefix.extend((own[0], act))
        pending = other + own[1:]
    return tuple(prefix) + tuple(pending)


@dataclass(frozen=True)
class RegularReachSet:
    """Reachable configurations as stable bases extended by send-only moves.

    ``send_moves[i][q]`` lists ``(letter, target)`` for the sends of peer
    ``i + 1`` in state ``q``.  A configuration is reachable iff, for some
    base, each peer has a send-only path from its base state to its current
    state whose letters are exactly the content of its outgoing channel.
    """

    system: System
    base: tuple[Configuration, ...]
    send_moves: tuple[dict, ...]

    def path_targets(self, peer: int, start: str, word: Sequence[str]) -> frozenset[str]:
        current = {start}
        moves = self.send_moves[peer - 1]
        for letter in word:
            current = {r for q in current for a, r in moves.get(q, ()) if a == letter}
            if not current:
                break
        return frozenset(current)

    def path_nfa(self, base_index: int, peer: int):
        """Send-only path automaton of ``peer`` from its state in a base configuration."""
        from cfsm.lang import Nfa

        moves = self.send_moves[peer - 1]
        trans = {(q, a, r) for q, row in moves.items() for a, r in row}
        start = self.base[base_index].control[peer - 1]
        return Nfa.build(start, trans, states=moves.keys())


def reach_representation(system: System, max_states: int = DEFAULT_MAX_STATES) -> RegularReachSet:
    _require_ring(system)
    if not k_synchronizable(system, SemanticsKind.P2P, 1, False, max_states).equal:
        raise PreconditionError("system is not 1-synchronizable")
    base = build_lts(system, SemanticsKind.P2P, 0, max_states).states
    moves = []
    for peer in system.peers:
        moves.append(
            {q: tuple((act.letter, r) for act, r in peer.outgoing[q] if act.kind == "!") for q in peer.states}
        )
    return RegularReachSet(system, tuple(base), tuple(moves))


def reach_contains(rep: RegularReachSet, c: Configuration) -> bool:
    n = rep.system.np
    ring = {(i, i % n + 1) for i in range(1, n + 1)}
    buffers = c.buffer_map()
    if any(w for key, w in buffers.items() if key not in ring):
        return False
    for b in rep.base:
        if all(
            c.control[i - 1] in rep.path_targets(i, b.control[i - 1], buffers.get((i, i % n + 1), ()))
            for i in range(1, n + 1)
        ):
            return True
    return False


def _visible(lab):
    if lab is None:
        return None
    return ("?" if lab.kind == "?" else "!", lab.letter)


def branching_bisimilar(l1: BoundedLts, l2: BoundedLts) -> bool:
    """Branching bisimilarity of the initial states (divergence-insensitive).

    Signature refinement on the disjoint union: the signature of a state is
    the set of ``(label, block)`` pairs reachable after inert silent steps,
    ignoring silent steps that stay in the current block.  ``!?a`` and
    ``!a`` are the same visible label.
    """
    edges: list[list] = []
    offset = len(l1.states)
    for lts, off in ((l1, 0), (l2, offset)):
        for row in lts.out:
            edges.append([(_visible(lab), t + off) for lab, t in row])
    n = len(edges)
    block = [0] * n
    count = 1
    while True:
        sigs = []
        for s in range(n):
            b = block[s]
            seen = {s}
            todo = [s]
            sig = set()
            while todo:
                u = todo.pop()
                for lab, t in edges[u]:
                    if lab is None and block[t] == b:
                        if t not in seen:
                            seen.add(t)
                            todo.append(t)
                    else:
                        sig.add((lab, block[t]))
            sigs.append((b, frozenset(sig)))
        ids: dict = {}
        block = [ids.setdefault(sg, len(ids)) for sg in sigs]
        if len(ids) == count:
            break
        count = len(ids)
    return block[0] == block[offset]


def k_stable(system: System, sem=SemanticsKind.P2P, k: int = 0, max_states: int = DEFAULT_MAX_STATES) -> bool:
    """Bounded stability step: send-LTS at k branching bisimilar to k+1."""
    return branching_bisimilar(send_lts(system, sem, k, max_states), send_lts(system, sem, k + 1, max_states))


def strongly_k_stable(system: System, sem=SemanticsKind.P2P, k: int = 1, max_states: int = DEFAULT_MAX_STATES) -> bool:
    """All traces are k-bounded: no buffer ever reaches k+1 messages."""
    if k < 0:
        raise ValueError("k must be >= 0")
    lts = build_lts(system, sem, k + 1, max_states)
    return all(c.max_buffer() <= k for c in lts.states)
