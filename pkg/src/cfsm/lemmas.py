"""Bounded property suites for the structural results the deciders rely on.

Each suite explores a finite slice of a system and either confirms the
property on every instance it enumerates or returns the first violation.
None of these are proofs; they are regression nets with explicit bounds.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from itertools import product
from typing import Callable, Iterable, Sequence

from cfsm.builtins import get, ring_systems, systems
from cfsm.decide import (
    PreconditionError,
    is_normalized,
    k_synchronizable,
    normalize_trace,
    reach_contains,
    reach_representation,
)
from cfsm.explore import build_lts, drainable_to_stable
from cfsm.lang import words_up_to
from cfsm.model import Configuration, SemanticsKind, System, successors
from cfsm.reduce import (
    FifoAutomaton,
    _act,
    fifo_to_system,
    fifo_to_system_merged,
    fifo_to_system_prime,
    fifo_traces,
    lm_language,
    morphism_h,
    morphism_h_doubleprime,
    morphism_h_prime,
    tiling_to_fifo,
)
from cfsm.trace import Action, peer_projection, shuffles, system_equivalent

__all__ = ["PropertyResult", "SUITES", "run_suites"]

P2P = SemanticsKind.P2P


@dataclass(frozen=True)
class PropertyResult:
    name: str
    holds: bool
    checked: int
    detail: str = ""
    counterexample: object = None

    def line(self) -> str:
        status = "PASS" if self.holds else "FAIL"
        text = f"{status} {self.name}: {self.checked} instance(s)"
        if self.detail:
            text += f"; {self.detail}"
        return text


def _after(system: System, start: Iterable[Configuration], trace: Sequence[Action]) -> frozenset:
    current = set(start)
    for act in trace:
        current = {n for c in current for n in successors(system, P2P, c, act)}
        if not current:
            break
    return frozenset(current)


def _sync_configurations(system: System, depth: int) -> list[Configuration]:
    """Configurations reached by synchronous traces of at most ``depth`` actions."""
    lts = build_lts(system, P2P, 0)
    dist = {0: 0}
    queue = deque([0])
    while queue:
        s = queue.popleft()
        if dist[s] + 2 > depth:
            continue
        for _, t in lts.out[s]:
            if t not in dist:
                dist[t] = dist[s] + 2
                queue.append(t)
    return [lts.states[s] for s in sorted(dist)]


def _send_words(system: System, c: Configuration, n: int, peers=None) -> set[tuple[Action, ...]]:
    """Send-only action sequences of length ``n`` executable from ``c``."""
    out = set()
    stack = [((), frozenset({c}))]
    while stack:
        word, confs = stack.pop()
        if len(word) == n:
            out.add(word)
            continue
        acts = {
            act
            for conf in confs
            for i, peer in enumerate(system.peers)
            if peers is None or i + 1 in peers
            for act, _ in peer.outgoing[conf.control[i]]
            if act.kind == "!"
        }
        for act in acts:
            nxt = _after(system, confs, (act,))
            if nxt:
                stack.append((word + (act,), nxt))
    return out


def _flatten(word: Sequence[Action]) -> tuple[Action, ...]:
    return tuple(x for a in word for x in (a, a.dual()))


def one_synchronizable_systems() -> list[System]:
    return [b.value for b in systems() if k_synchronizable(b.value, P2P, 1).equal]


# -- reduction suites ---------------------------------------------------------


def check_fifo_encoding(a: FifoAutomaton, k: int, depth: int = 12) -> PropertyResult:
    """Bounded traces of S_A are the prefixes of h-images, plus blocked orders."""
    lhs = {t for t, _ in build_lts(fifo_to_system(a), P2P, k).traces(depth)}
    rhs: set = set()
    out = a.outgoing
    for tau, q, _ in fifo_traces(a, k, depth):
        img = morphism_h(tau)
        rhs.update(img[:n] for n in range(min(len(img), depth) + 1))
        for act, _r in out[q]:
            if act.kind == "?":
                x = act.letter
                ext = img + (_act("!", x, 1, 3), _act("?", x, 1, 3), _act("!", x, 3, 2), _act("?", x, 3, 2))
                rhs.update(ext[:n] for n in range(min(len(ext), depth) + 1))
    diff = sorted(lhs ^ rhs, key=len)
    name = f"fifo-encoding[{a.name},k={k}]"
    if diff:
        side = "system only" if diff[0] in lhs else "image only"
        return PropertyResult(name, False, len(lhs), side, diff[0])
    return PropertyResult(name, True, len(lhs), f"depth {depth}")


def check_flooding_encoding(a: FifoAutomaton, m: str, depth: int = 12) -> PropertyResult:
    """Synchronous traces of S'_{A,m} are the synchronous prefixes of h'(L^m(A))."""
    lhs = {t for t, _ in build_lts(fifo_to_system_prime(a, m), P2P, 0).traces(depth)}
    rhs: set = set()
    for word in words_up_to(lm_language(a, m), depth // 2):
        img = morphism_h_prime(word, m)
        rhs.update(img[:n] for n in range(0, min(len(img), depth) + 1, 2))
    diff = sorted(lhs ^ rhs, key=len)
    name = f"flooding-encoding[{a.name},{m}]"
    if diff:
        side = "system only" if diff[0] in lhs else "image only"
        return PropertyResult(name, False, len(lhs), side, diff[0])
    return PropertyResult(name, True, len(lhs), f"depth {depth}")


def check_flooding_synchronizable(a: FifoAutomaton, m: str, ks=(1, 2, 3)) -> PropertyResult:
    system = fifo_to_system_prime(a, m)
    for k in ks:
        v = k_synchronizable(system, P2P, k)
        if not v.equal:
            return PropertyResult(f"flooding-synchronizable[{a.name},{m}]", False, k, f"k={k}", v.witness)
    return PropertyResult(f"flooding-synchronizable[{a.name},{m}]", True, len(ks), f"k in {list(ks)}")


def _receives_m(a: FifoAutomaton, m: str, k: int, depth: int) -> bool:
    return any(t and t[-1].kind == "?" and t[-1].letter == m for t, _, _ in fifo_traces(a, k, depth))


def check_special_reception(a: FifoAutomaton, m: str, k: int = 1, depth: int = 12) -> PropertyResult:
    """S''_{A,m} is k-synchronizable iff ?m is not reachable in A at bound k."""
    receives = _receives_m(a, m, k, depth)
    v = k_synchronizable(fifo_to_system_merged(a, m), P2P, k)
    name = f"special-reception[{a.name},{m},k={k}]"
    agrees = v.equal != receives
    marker = f"{m}_23"
    if agrees and not v.equal and marker not in (v.send_word or ()):
        return PropertyResult(name, False, 1, f"witness lacks {marker}", v.witness)
    detail = f"?{m} reachable={receives}, synchronizable={v.equal}"
    return PropertyResult(name, agrees, 1, detail, None if agrees else v.witness)


def check_receive_insertion(a: FifoAutomaton, m: str, k: int = 2, depth: int = 10) -> PropertyResult:
    """Moving receives on 1->2 next to their sends gives a synchronous trace.

    Checked on every bounded trace whose other channels are empty; when the
    trace is stable the result must also reach the same configuration.
    """
    system = fifo_to_system_prime(a, m)
    sync = build_lts(system, P2P, 0)
    lts = build_lts(system, P2P, k)
    checked = 0
    for tau, s in lts.traces(depth):
        conf = lts.states[s]
        if any(w for key, w in conf.buffers if key != (1, 2)):
            continue
        checked += 1
        img = morphism_h_doubleprime(tau)
        if not sync.accepts_trace(img):
            return PropertyResult(f"receive-insertion[{a.name},{m}]", False, checked, "image not synchronous", tau)
        if conf.stable and not system_equivalent(system, P2P, tau, img):
            return PropertyResult(f"receive-insertion[{a.name},{m}]", False, checked, "not equivalent", tau)
    return PropertyResult(f"receive-insertion[{a.name},{m}]", True, checked, f"Tr_{k} depth {depth}")


def check_reduction_pipeline(name: str = "tiling-singleton", ks=(1, 2, 3), depth: int = 12) -> PropertyResult:
    """Tiling to FIFO automaton to S'': a tiling makes ?tF reachable and the system unsynchronizable."""
    inst = get(name).value
    a = tiling_to_fifo(inst)
    reach = next(((t, k) for k in ks for t, _, _ in fifo_traces(a, k, depth) if t and t[-1].kind == "?" and t[-1].letter == inst.tF), None)
    if reach is None:
        return PropertyResult(f"reduction-pipeline[{name}]", False, 0, f"?{inst.tF} not found")
    system = fifo_to_system_merged(a, inst.tF)
    for k in ks:
        v = k_synchronizable(system, P2P, k)
        if not v.equal:
            return PropertyResult(f"reduction-pipeline[{name}]", True, k, f"not {k}-synchronizable", v.witness)
    return PropertyResult(f"reduction-pipeline[{name}]", False, len(ks), "synchronizable at every k tried")


# -- confluence suites ---------------------------------------------------------


def check_shuffle_projection(system: System) -> PropertyResult:
    """Every shuffle of !a?a with !b?b looks, to each peer, like !?a!?b or !?b!?a."""
    msgs = system.message_set
    checked = 0
    for x, y in product(msgs.letters, repeat=2):
        if msgs.src(x) == msgs.src(y):
            continue
        a, b = msgs.send(x), msgs.send(y)
        ab, ba = _flatten((a, b)), _flatten((b, a))
        for sh in shuffles((a, a.dual()), (b, b.dual())):
            checked += 1
            for i in range(1, system.np + 1):
                p = peer_projection(sh, i)
                if p != peer_projection(ab, i) and p != peer_projection(ba, i):
                    return PropertyResult(f"shuffle-projection[{system.name}]", False, checked, f"peer {i}", sh)
    return PropertyResult(f"shuffle-projection[{system.name}]", True, checked)


def _diamond(system: System, c: Configuration, left: Sequence[Action], right: Sequence[Action]):
    reached = []
    for sh in sorted(shuffles(_flatten(left), _flatten(right)), key=lambda t: [a.sort_key() for a in t]):
        r = _after(system, {c}, sh)
        if not r:
            return sh, "not executable"
        reached.append((sh, r))
    base = reached[0][1]
    for sh, r in reached[1:]:
        if not (r & base):
            return sh, "not equivalent"
    return None


def check_send_diamond(system: System, depth: int = 8) -> PropertyResult:
    """Two sends from distinct peers commute in all six interleavings."""
    checked = 0
    for c in _sync_configurations(system, depth):
        sends = sorted(_send_words(system, c, 1))
        for (a,), (b,) in product(sends, repeat=2):
            if a.src == b.src:
                continue
            checked += 1
            bad = _diamond(system, c, (a,), (b,))
            if bad:
                return PropertyResult(f"send-diamond[{system.name}]", False, checked, f"{bad[1]} from {c}", bad[0])
    return PropertyResult(f"send-diamond[{system.name}]", True, checked, f"depth {depth}")


def check_generalized_diamond(system: System, depth: int = 8, max_len: int = 2) -> PropertyResult:
    """Send sequences from disjoint sets of peers commute in every interleaving."""
    checked = 0
    for c in _sync_configurations(system, depth):
        words = [w for n in range(1, max_len + 1) for w in sorted(_send_words(system, c, n))]
        for left, right in product(words, repeat=2):
            if {a.src for a in left} & {b.src for b in right}:
                continue
            checked += 1
            bad = _diamond(system, c, left, right)
            if bad:
                return PropertyResult(f"generalized-diamond[{system.name}]", False, checked, f"{bad[1]} from {c}", bad[0])
    return PropertyResult(f"generalized-diamond[{system.name}]", True, checked, f"depth {depth}, n,m <= {max_len}")


def check_same_source_lifting(system: System, depth: int = 8, max_len: int = 3) -> PropertyResult:
    """Sends of a single peer from a stable configuration can be paired with their receives."""
    checked = 0
    for c in _sync_configurations(system, depth):
        for i in range(1, system.np + 1):
            for n in range(1, max_len + 1):
                for word in sorted(_send_words(system, c, n, peers={i})):
                    checked += 1
                    if not _after(system, {c}, _flatten(word)):
                        return PropertyResult(f"same-source-lifting[{system.name}]", False, checked, f"from {c}", word)
    return PropertyResult(f"same-source-lifting[{system.name}]", True, checked, f"depth {depth}, n <= {max_len}")


# -- ring suites ---------------------------------------------------------------


def check_normalization(system: System, k: int = 2, depth: int = 10) -> PropertyResult:
    checked = 0
    for tau, _ in build_lts(system, P2P, k).traces(depth):
        checked += 1
        try:
            out = normalize_trace(system, tau, assume_synchronizable=True)
        except PreconditionError as exc:
            return PropertyResult(f"normalization[{system.name}]", False, checked, str(exc), tau)
        if not is_normalized(out) or not system_equivalent(system, P2P, tau, out):
            return PropertyResult(f"normalization[{system.name}]", False, checked, "bad output", tau)
    return PropertyResult(f"normalization[{system.name}]", True, checked, f"Tr_{k} depth {depth}")


def check_reach_drain(system: System, bound: int = 3) -> PropertyResult:
    """Every explored configuration is in the regular representation and drains to a stable one."""
    rep = reach_representation(system)
    lts = build_lts(system, P2P, bound)
    for c in lts.states:
        if not reach_contains(rep, c):
            return PropertyResult(f"reach-drain[{system.name}]", False, len(lts.states), "not represented", c)
    verdict = drainable_to_stable(lts)
    if not verdict.drainable:
        return PropertyResult(f"reach-drain[{system.name}]", False, len(lts.states), "not drainable", verdict.failures[0])
    return PropertyResult(f"reach-drain[{system.name}]", True, len(lts.states), f"bound {bound}")


def _synchronizable_rings() -> list[System]:
    return [b.value for b in ring_systems() if b.expected.get("ring_sync")]


def _example33():
    return get("example33").value, get("example33-no-recv-m").value


SUITES: dict[str, Callable[[], list[PropertyResult]]] = {
    "fifo-encoding": lambda: [check_fifo_encoding(_example33()[0], k) for k in (1, 2)],
    "flooding-encoding": lambda: [check_flooding_encoding(_example33()[0], "m")],
    "flooding-synchronizable": lambda: [check_flooding_synchronizable(_example33()[0], "m")],
    "special-reception": lambda: [check_special_reception(a, "m") for a in _example33()],
    "receive-insertion": lambda: [check_receive_insertion(_example33()[0], "m")],
    "reduction-pipeline": lambda: [check_reduction_pipeline()],
    "shuffle-projection": lambda: [check_shuffle_projection(b.value) for b in systems()],
    "send-diamond": lambda: [check_send_diamond(s) for s in one_synchronizable_systems()],
    "generalized-diamond": lambda: [check_generalized_diamond(s) for s in one_synchronizable_systems()],
    "same-source-lifting": lambda: [check_same_source_lifting(s) for s in one_synchronizable_systems()],
    "normalization": lambda: [check_normalization(s) for s in _synchronizable_rings()],
    "reach-drain": lambda: [check_reach_drain(s) for s in _synchronizable_rings()],
}


def run_suites(names: Iterable[str] | None = None) -> list[PropertyResult]:
    names = list(SUITES) if names is None else list(names)
    unknown = [n for n in names if n not in SUITES]
    if unknown:
        raise KeyError(f"unknown suite(s): {', '.join(unknown)}; known: {', '.join(SUITES)}")
    out: list[PropertyResult] = []
    for n in names:
        out.extend(SUITES[n]())
    return out
