"""Text format for systems, FIFO automata and tiling instances.

One directive per line.  Lines whose first non-blank character is ``#`` are
comments; ``#`` elsewhere is an ordinary character (it is the row separator
letter of tiling automata).  A system::

    system example22
    peers 3
    msg a 1 2
    peer 1
    initial q0
    q0 !a q1
    end

``states q ...`` inside a peer block declares states without transitions.
A FIFO automaton uses ``fifo NAME``, ``alphabet a b ...``, ``initial q``
and ``q !a r`` lines; a tiling instance uses ``tiling NAME``, ``tiles``,
``initial``, ``final``, ``blank``, ``h t u`` and ``v t u``.  Every block
ends with ``end``.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

from cfsm.model import MessageSet, System, ValidationError, validate_system
from cfsm.reduce import FifoAutomaton, TilingInstance

__all__ = [
    "SystemFileError",
    "parse",
    "parse_system",
    "parse_fifo",
    "parse_tiling",
    "serialize",
    "serialize_system",
    "serialize_fifo",
    "serialize_tiling",
]


class SystemFileError(ValueError):
    def __init__(self, message: str, line: int, column: int = 1):
        super().__init__(f"line {line}, column {column}: {message}")
        self.line = line
        self.column = column
        self.reason = message


@dataclass(frozen=True)
class _Line:
    number: int
    tokens: tuple[str, ...]
    columns: tuple[int, ...]

    def error(self, message: str, index: int = 0) -> SystemFileError:
        col = self.columns[index] if index < len(self.columns) else (self.columns[-1] if self.columns else 1)
        return SystemFileError(message, self.number, col)

    def arity(self, n: int) -> None:
        if len(self.tokens) != n:
            raise self.error(f"{self.tokens[0]!r} expects {n - 1} argument(s), got {len(self.tokens) - 1}")

    def integer(self, index: int) -> int:
        try:
            return int(self.tokens[index])
        except ValueError:
            raise self.error(f"expected an integer, got {self.tokens[index]!r}", index) from None


def _lines(text: str) -> list[_Line]:
    out = []
    for number, raw in enumerate(text.splitlines(), start=1):
        stripped = raw.strip()
        if not stripped or stripped.startswith("#"):
            continue
        tokens, columns = [], []
        col = 0
        for part in raw.split():
            col = raw.index(part, col)
            tokens.append(part)
            columns.append(col + 1)
            col += len(part)
        out.append(_Line(number, tuple(tokens), tuple(columns)))
    return out


def _header(lines: list[_Line], keyword: str) -> str:
    if not lines:
        raise SystemFileError("empty description", 1)
    first = lines[0]
    if first.tokens[0] != keyword:
        raise first.error(f"expected {keyword!r}, got {first.tokens[0]!r}")
    if len(first.tokens) > 2:
        raise first.error("name must be a single token", 2)
    if lines[-1].tokens != ("end",):
        raise lines[-1].error("missing 'end'")
    for ln in lines[1:-1]:
        if ln.tokens == ("end",):
            raise ln.error("'end' before the last directive")
    return first.tokens[1] if len(first.tokens) == 2 else ""


def parse_system(text: str) -> System:
    lines = _lines(text)
    name = _header(lines, "system")
    np = None
    messages: list[tuple[str, int, int]] = []
    msg_at: dict[str, _Line] = {}
    machines: dict[int, dict] = {}
    current = None
    for ln in lines[1:-1]:
        head = ln.tokens[0]
        if head == "peers":
            ln.arity(2)
            if np is not None:
                raise ln.error("'peers' given twice")
            np = ln.integer(1)
            if np < 1:
                raise ln.error("peer count must be positive", 1)
        elif head == "msg":
            ln.arity(4)
            if np is None:
                raise ln.error("'msg' before 'peers'")
            letter, src, dst = ln.tokens[1], ln.integer(2), ln.integer(3)
            if letter in msg_at:
                raise ln.error(f"duplicate letter {letter!r} (first declared on line {msg_at[letter].number})", 1)
            for idx, p in ((2, src), (3, dst)):
                if not 1 <= p <= np:
                    raise ln.error(f"peer {p} out of range 1..{np}", idx)
            if src == dst:
                raise ln.error(f"letter {letter!r} has src=dst={src}", 3)
            messages.append((letter, src, dst))
            msg_at[letter] = ln
        elif head == "peer":
            ln.arity(2)
            if np is None:
                raise ln.error("'peer' before 'peers'")
            i = ln.integer(1)
            if not 1 <= i <= np:
                raise ln.error(f"peer {i} out of range 1..{np}", 1)
            if i in machines:
                raise ln.error(f"peer {i} defined twice", 1)
            current = i
            machines[i] = {"transitions": [], "extra": []}
        elif head in ("initial", "states") or (len(ln.tokens) == 3 and ln.tokens[1][:1] in "!?"):
            if current is None:
                raise ln.error(f"{head!r} outside a peer block")
            spec = machines[current]
            is_transition = len(ln.tokens) == 3 and ln.tokens[1][:1] in "!?"
            if head == "initial" and not is_transition:
                ln.arity(2)
                if "initial" in spec:
                    raise ln.error("'initial' given twice for this peer")
                spec["initial"] = ln.tokens[1]
            elif head == "states" and not is_transition:
                spec["extra"].extend(ln.tokens[1:])
            else:
                _transition(ln, current, messages, spec)
        else:
            raise ln.error(f"unknown directive {head!r}")
    if np is None:
        raise lines[0].error("missing 'peers'")
    for i, spec in machines.items():
        if "initial" not in spec:
            spec["initial"] = "q0"
    raw = {
        "name": name,
        "peers": np,
        "messages": messages,
        "machines": {i: {"initial": s["initial"], "transitions": s["transitions"]} for i, s in machines.items()},
    }
    try:
        system = validate_system(raw)
    except ValidationError as exc:
        raise lines[0].error(str(exc)) from None
    extras = {i: frozenset(s["extra"]) for i, s in machines.items() if s["extra"]}
    if extras:
        peers = tuple(
            replace(p, extra_states=p.extra_states | extras.get(i, frozenset())) for i, p in enumerate(system.peers, 1)
        )
        system = System(system.message_set, peers, system.name)
    return system


def _transition(ln: _Line, peer: int, messages, spec) -> None:
    q, token, r = ln.tokens
    letter = token[1:]
    table = {a: (s, d) for a, s, d in messages}
    if letter not in table:
        raise ln.error(f"unknown letter {letter!r}", 1)
    s, d = table[letter]
    owner = s if token[0] == "!" else d
    if owner != peer:
        raise ln.error(f"{token} belongs to peer {owner}, not peer {peer}", 1)
    spec["transitions"].append((q, token, r))


def parse_fifo(text: str) -> FifoAutomaton:
    lines = _lines(text)
    name = _header(lines, "fifo")
    alphabet: set[str] = set()
    initial = None
    extra: list[str] = []
    trans = []
    for ln in lines[1:-1]:
        head = ln.tokens[0]
        if head == "alphabet":
            alphabet.update(ln.tokens[1:])
        elif head == "initial" and len(ln.tokens) == 2:
            initial = ln.tokens[1]
        elif head == "states" and len(ln.tokens) >= 2 and ln.tokens[1][:1] not in "!?":
            extra.extend(ln.tokens[1:])
        elif len(ln.tokens) == 3 and ln.tokens[1][:1] in "!?" and len(ln.tokens[1]) > 1:
            if alphabet and ln.tokens[1][1:] not in alphabet:
                raise ln.error(f"letter {ln.tokens[1][1:]!r} not in the alphabet", 1)
            trans.append(ln.tokens)
        else:
            raise ln.error(f"unknown directive {head!r}")
    if initial is None:
        raise lines[0].error("missing 'initial'")
    return FifoAutomaton.build(initial, trans, alphabet=alphabet, states=extra, name=name)


def parse_tiling(text: str) -> TilingInstance:
    lines = _lines(text)
    _header(lines, "tiling")
    tiles: set[str] = set()
    single: dict[str, str] = {}
    rel: dict[str, set] = {"h": set(), "v": set()}
    for ln in lines[1:-1]:
        head = ln.tokens[0]
        if head == "tiles":
            tiles.update(ln.tokens[1:])
        elif head in ("initial", "final", "blank"):
            ln.arity(2)
            single[head] = ln.tokens[1]
        elif head in rel:
            ln.arity(3)
            rel[head].add((ln.tokens[1], ln.tokens[2]))
        else:
            raise ln.error(f"unknown directive {head!r}")
    for key in ("initial", "final", "blank"):
        if key not in single:
            raise lines[0].error(f"missing {key!r}")
    try:
        return TilingInstance(
            frozenset(tiles), single["initial"], single["final"], frozenset(rel["h"]), frozenset(rel["v"]), single["blank"]
        )
    except ValueError as exc:
        raise lines[0].error(str(exc)) from None


def parse(text: str):
    """Parse any of the three block kinds, chosen by the first directive."""
    lines = _lines(text)
    if not lines:
        raise SystemFileError("empty description", 1)
    head = lines[0].tokens[0]
    parsers = {"system": parse_system, "fifo": parse_fifo, "tiling": parse_tiling}
    if head not in parsers:
        raise lines[0].error(f"expected 'system', 'fifo' or 'tiling', got {head!r}")
    return parsers[head](text)


def serialize_system(system: System) -> str:
    msgs: MessageSet = system.message_set
    out = [f"system {system.name}".rstrip(), f"peers {system.np}"]
    out += [f"msg {a} {s} {d}" for a, s, d in msgs.channels]
    for i, peer in enumerate(system.peers, 1):
        out += [f"peer {i}", f"initial {peer.initial}"]
        used = {peer.initial} | {q for q, _, _ in peer.transitions} | {r for _, _, r in peer.transitions}
        isolated = sorted(set(peer.states) - used)
        if isolated:
            out.append("states " + " ".join(isolated))
        for q, act, r in sorted(peer.transitions, key=lambda t: (t[0], t[1].sort_key(), t[2])):
            out.append(f"{q} {act.kind}{act.letter} {r}")
    out.append("end")
    return "\n".join(out) + "\n"


def serialize_fifo(a: FifoAutomaton) -> str:
    out = [f"fifo {a.name}".rstrip(), "alphabet " + " ".join(sorted(a.alphabet)), f"initial {a.initial}"]
    used = {a.initial} | {q for q, _, _ in a.transitions} | {r for _, _, r in a.transitions}
    isolated = sorted(a.states - used)
    if isolated:
        out.append("states " + " ".join(isolated))
    for q, act, r in sorted(a.transitions, key=lambda t: (t[0], t[1].sort_key(), t[2])):
        out.append(f"{q} {act.kind}{act.letter} {r}")
    out.append("end")
    return "\n".join(out) + "\n"


def serialize_tiling(inst: TilingInstance, name: str = "") -> str:
    out = [f"tiling {name}".rstrip(), "tiles " + " ".join(sorted(inst.tiles))]
    out += [f"initial {inst.t0}", f"final {inst.tF}", f"blank {inst.blank}"]
    out += [f"h {x} {y}" for x, y in sorted(inst.H)]
    out += [f"v {x} {y}" for x, y in sorted(inst.V)]
    out.append("end")
    return "\n".join(out) + "\n"


def serialize(value, name: str = "") -> str:
    if isinstance(value, System):
        return serialize_system(value)
    if isinstance(value, FifoAutomaton):
        return serialize_fifo(value)
    if isinstance(value, TilingInstance):
        return serialize_tiling(value, name)
    raise TypeError(f"cannot serialize {type(value).__name__}")

