"""Actions and traces over a message set, with the peer-to-peer FIFO
predicates used throughout the package.

An :class:`Action` carries the channel of its letter, so every function here
works without the surrounding :class:`~cfsm.model.MessageSet`.
"""

from __future__ import annotations

from collections import defaultdict, deque
from dataclasses import dataclass
from itertools import combinations
from typing import Iterable, Sequence

__all__ = [
    "Action",
    "Trace",
    "format_trace",
    "send_projection",
    "recv_projection",
    "peer_projection",
    "channel_projection",
    "buffer_after",
    "is_fifo",
    "is_k_bounded",
    "max_buffer",
    "is_synchronous",
    "is_stable",
    "causally_equivalent",
    "system_equivalent",
    "sync_trace_of",
    "shuffles",
    "exists_equiv_k_bounded",
]


@dataclass(frozen=True, order=True)
class Action:
    kind: str  # "!" or "?"
    letter: str
    src: int
    dst: int

    @property
    def peer(self) -> int:
        return self.src if self.kind == "!" else self.dst

    @property
    def channel(self) -> tuple[int, int]:
        return (self.src, self.dst)

    @property
    def is_send(self) -> bool:
        return self.kind == "!"

    def dual(self) -> "Action":
        return Action("?" if self.kind == "!" else "!", self.letter, self.src, self.dst)

    def sort_key(self):
        return (self.letter, self.kind)

    def __str__(self) -> str:
        return f"{self.kind}{self.letter}"


Trace = tuple  # tuple[Action, ...]


def format_trace(trace: Iterable[Action]) -> str:
    return " ".join(map(str, trace))


def send_projection(trace: Iterable[Action]) -> tuple[str, ...]:
    return tuple(a.letter for a in trace if a.kind == "!")


def recv_projection(trace: Iterable[Action]) -> tuple[str, ...]:
    return tuple(a.letter for a in trace if a.kind == "?")


def peer_projection(trace: Iterable[Action], i: int) -> Trace:
    return tuple(a for a in trace if a.peer == i)


def channel_projection(trace: Iterable[Action], i: int, j: int) -> Trace:
    return tuple(a for a in trace if a.src == i and a.dst == j)


def buffer_after(trace: Iterable[Action], i: int, j: int) -> tuple[str, ...] | None:
    """Content of channel ``i -> j`` after ``trace``; ``None`` when undefined."""
    chan = channel_projection(trace, i, j)
    sent = send_projection(chan)
    recv = recv_projection(chan)
    if sent[: len(recv)] != recv:
        return None
    return sent[len(recv) :]


def _scan(trace: Iterable[Action]) -> int | None:
    """Largest channel occupancy over all prefixes, or ``None`` if not FIFO."""
    queues: dict[tuple[int, int], deque] = defaultdict(deque)
    worst = 0
    for a in trace:
        q = queues[a.channel]
        if a.kind == "!":
            q.append(a.letter)
            worst = max(worst, len(q))
        else:
            if not q or q[0] != a.letter:
                return None
            q.popleft()
    return worst


def is_fifo(trace: Iterable[Action]) -> bool:
    return _scan(trace) is not None


def max_buffer(trace: Iterable[Action]) -> int | None:
    return _scan(trace)


def is_synchronous(trace: Sequence[Action]) -> bool:
    if len(trace) % 2:
        return False
    for snd, rcv in zip(trace[::2], trace[1::2]):
        if snd.kind != "!" or rcv.kind != "?" or snd.letter != rcv.letter:
            return False
    return True


def is_k_bounded(trace: Sequence[Action], k: int) -> bool:
    """k-bounded FIFO; ``k == 0`` means synchronous."""
    if k == 0:
        return is_synchronous(trace)
    worst = _scan(trace)
    return worst is not None and worst <= k


def is_stable(trace: Iterable[Action]) -> bool:
    trace = tuple(trace)
    if not is_fifo(trace):
        return False
    channels = {a.channel for a in trace}
    return all(buffer_after(trace, i, j) == () for i, j in channels)


def _peers(*traces: Iterable[Action]) -> set[int]:
    return {a.peer for t in traces for a in t}


def causally_equivalent(t1: Sequence[Action], t2: Sequence[Action]) -> bool:
    if not (is_fifo(t1) and is_fifo(t2)):
        return False
    return all(peer_projection(t1, i) == peer_projection(t2, i) for i in _peers(t1, t2))


def system_equivalent(system, sem, t1: Sequence[Action], t2: Sequence[Action]) -> bool:
    """Both traces executable and some configuration is reached by both."""
    from cfsm.model import run_all

    r1 = run_all(system, sem, t1)
    return bool(r1) and bool(r1 & run_all(system, sem, t2))


def sync_trace_of(trace: Iterable[Action]) -> Trace:
    out: list[Action] = []
    for a in trace:
        if a.kind == "!":
            out.append(a)
            out.append(a.dual())
    return tuple(out)


def shuffles(u: Sequence, v: Sequence) -> set[tuple]:
    """All interleavings of ``u`` and ``v`` that keep both internal orders."""
    n, m = len(u), len(v)
    out = set()
    for picks in combinations(range(n + m), n):
        chosen = set(picks)
        it_u, it_v = iter(u), iter(v)
        out.add(tuple(next(it_u) if p in chosen else next(it_v) for p in range(n + m)))
    return out


def exists_equiv_k_bounded(trace: Sequence[Action], k: int) -> Trace | None:
    """A k-bounded trace causally equivalent to ``trace``, or ``None``.

    Depth-first search over schedules of the per-peer projections.  A
    schedule state is the vector of per-peer positions (buffer contents are
    a function of it), so each vector is expanded once; the worst case is
    the product of the projection lengths.
    """
    trace = tuple(trace)
    if not is_fifo(trace):
        raise ValueError("trace is not FIFO")
    peers = sorted(_peers(trace))
    projections = [peer_projection(trace, i) for i in peers]
    if k == 0:
        return trace if is_synchronous(trace) else None

    start = (0,) * len(peers)
    goal = tuple(len(p) for p in projections)
    seen = {start}
    # stack entries: (positions, queues, path)
    stack = [(start, {}, ())]
    while stack:
        pos, queues, path = stack.pop()
        if pos == goal:
            return path
        moves = []
        for idx, proj in enumerate(projections):
            if pos[idx] == len(proj):
                continue
            a = proj[pos[idx]]
            q = queues.get(a.channel, ())
            if a.kind == "!":
                if len(q) >= k:
                    continue
                nq = q + (a.letter,)
            else:
                if not q or q[0] != a.letter:
                    continue
                nq = q[1:]
            npos = pos[:idx] + (pos[idx] + 1,) + pos[idx + 1 :]
            if npos in seen:
                continue
            moves.append((npos, a, nq))
        # receives first: draining keeps buffers small
        moves.sort(key=lambda m: m[1].kind != "?", reverse=True)
        for npos, a, nq in moves:
            seen.add(npos)
            nqueues = dict(queues)
            nqueues[a.channel] = nq
            stack.append((npos, nqueues, path + (a,)))
    return None
