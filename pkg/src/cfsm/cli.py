"""Command line front end.

Exit codes: 0 the property holds (or the command succeeded), 1 it fails,
2 usage or input error, 3 a precondition of the analysis is violated.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from importlib import resources
from pathlib import Path

from cfsm import builtins, sysfile
from cfsm.decide import (
    PreconditionError,
    k_stable,
    k_synchronizable,
    normalize_trace,
    reach_contains,
    reach_representation,
    ring_synchronizable,
    strongly_k_stable,
)
from cfsm.explore import (
    DEFAULT_MAX_STATES,
    ExplorationLimitError,
    build_lts,
    deadlocks,
    drainable_to_stable,
    to_dot,
)
from cfsm.model import RunError, SemanticsKind, System, ValidationError, run, run_all
from cfsm.reduce import (
    FifoAutomaton,
    TilingInstance,
    check_r1_r2,
    fifo_to_system,
    fifo_to_system_merged,
    fifo_to_system_prime,
    tiling_to_fifo,
)
from cfsm.trace import causally_equivalent, exists_equiv_k_bounded, format_trace, system_equivalent

__all__ = ["main", "build_parser"]


HOLDS, FAILS, USAGE, PRECONDITION = 0, 1, 2, 3


class InputError(Exception):
    pass


class Outcome:
    """What a command reports; rendered as text or JSON."""

    def __init__(self, command: str, verdict: bool, lines=(), witness=None, stats=None, output=None):
        self.command = command
        self.verdict = verdict
        self.lines = list(lines)
        self.witness = witness
        self.stats = stats
        self.output = output

    def as_json(self) -> dict:
        stats = {"states": None, "edges": None, "k": None, "semantics": None}
        stats.update({k: v for k, v in (self.stats or {}).items() if k in stats})
        out = {"command": self.command, "verdict": self.verdict}
        if self.witness is not None:
            out["witness"] = self.witness
        out["stats"] = stats
        if self.output is not None:
            out["output"] = self.output
        return out


# -- inputs -------------------------------------------------------------------


def _read_file(path: str) -> str:
    p = Path(path)
    if p.exists():
        return p.read_text()
    shipped = resources.files("cfsm") / "data" / p.name
    if shipped.is_file():
        return shipped.read_text()
    raise InputError(f"no such file: {path}")


def _load(args, kind: type):
    if bool(args.file) == bool(args.example):
        raise InputError("give exactly one of --file or --example")
    if args.file:
        try:
            value = sysfile.parse(_read_file(args.file))
        except sysfile.SystemFileError as exc:
            raise InputError(f"{args.file}: {exc}") from None
    else:
        try:
            entry = builtins.get(args.example)
        except KeyError as exc:
            raise InputError(exc.args[0]) from None
        if entry.kind == "unavailable":
            raise InputError(f"example {entry.name!r} is not available: {entry.description}")
        value = entry.value
    if not isinstance(value, kind):
        raise InputError(f"expected a {kind.__name__} description, got {type(value).__name__}")
    return value


def _parse_trace(system: System, text: str):
    try:
        return system.message_set.parse_trace(text)
    except ValueError as exc:
        raise InputError(f"bad trace {text!r}: {exc}") from None


def _word_tokens(system: System, word) -> list[str]:
    msgs = system.message_set
    return [f"{a}@{msgs.src(a)}>{msgs.dst(a)}" for a in word]


def _sync_outcome(command: str, system: System, verdict) -> Outcome:
    lines = [f"{'holds' if verdict.equal else 'fails'} (k={verdict.k}{', language only' if verdict.language_only else ''})"]
    witness = None
    if not verdict.equal:
        tokens = _word_tokens(system, verdict.send_word)
        witness = {"word": list(verdict.send_word), "tokens": tokens}
        lines.append("witness: " + (" ".join(tokens) or "(empty word)"))
        conf = verdict.stable_configuration
        if conf is not None:
            witness["configuration"] = str(conf)
            lines.append(f"stable configuration reached only asynchronously: {conf}")
    return Outcome(command, verdict.equal, lines, witness, verdict.stats)


# -- commands -------------------------------------------------------------------


def cmd_check(args) -> Outcome:
    system = _load(args, System)
    sem = args.semantics
    name = f"check {args.check}"
    if args.check == "k-sync":
        return _sync_outcome(name, system, k_synchronizable(system, sem, args.k, args.language_only, args.max_states))
    if args.check == "ring-sync":
        return _sync_outcome(name, system, ring_synchronizable(system, sem, args.max_states))
    if args.check == "stable":
        ok = k_stable(system, sem, args.k, args.max_states)
        lts = build_lts(system, sem, args.k + 1, args.max_states)
        relation = "branching bisimilar" if ok else "not branching bisimilar"
        return Outcome(name, ok, [f"send-LTS at k={args.k} and k={args.k + 1}: {relation}"], stats=lts.stats)
    lts = build_lts(system, sem, args.k + 1, args.max_states)
    over = next((c for c in lts.states if c.max_buffer() > args.k), None)
    ok = strongly_k_stable(system, sem, args.k, args.max_states)
    lines = [f"every trace is {args.k}-bounded" if ok else f"some buffer exceeds {args.k}"]
    if over is not None:
        lines.append(f"configuration: {over}")
    return Outcome(name, ok, lines, None if over is None else {"configuration": str(over)}, lts.stats)


def cmd_explore(args) -> Outcome:
    system = _load(args, System)
    lts = build_lts(system, args.semantics, args.k, args.max_states)
    report = deadlocks(lts)
    if args.dot:
        Path(args.dot).write_text(to_dot(lts))
    lines = [f"{len(lts.states)} states, {len(lts.edges)} edges (k={args.k}, {lts.semantics.value})"]
    groups = {}
    for label in ("deadlocks", "terminal", "orphans", "bound_blocked"):
        confs = getattr(report, label)
        groups[label] = [str(c) for c in confs]
        lines.append(f"{label}: {len(confs)}")
        lines += [f"  {c}" for c in confs]
    ok = not report.deadlocks and not report.orphans
    return Outcome("explore", ok, lines, stats=lts.stats, output=groups)


def cmd_reach(args) -> Outcome:
    system = _load(args, System)
    if SemanticsKind.parse(args.semantics) is not SemanticsKind.P2P:
        raise PreconditionError("the regular representation requires p2p-fifo semantics")
    rep = reach_representation(system, args.max_states)
    lts = build_lts(system, SemanticsKind.P2P, args.k, args.max_states)
    missing = [c for c in lts.states if not reach_contains(rep, c)]
    lines = [f"{len(rep.base)} stable base configuration(s):"] + [f"  {c}" for c in rep.base]
    for i, moves in enumerate(rep.send_moves, 1):
        edges = [f"{q} !{a} {r}" for q in sorted(moves) for a, r in moves[q]]
        lines.append(f"peer {i} send moves: " + (", ".join(edges) or "none"))
    lines.append(f"{len(lts.states) - len(missing)}/{len(lts.states)} configurations at k={args.k} represented")
    output = {"base": [str(c) for c in rep.base]}
    return Outcome("reach", not missing, lines, None if not missing else {"configuration": str(missing[0])}, lts.stats, output)


def cmd_drain(args) -> Outcome:
    system = _load(args, System)
    lts = build_lts(system, args.semantics, args.k, args.max_states)
    verdict = drainable_to_stable(lts)
    lines = [f"{len(lts.states)} configuration(s) at k={args.k}: " + ("all drain to a stable one" if verdict else f"{len(verdict.failures)} cannot drain")]
    witness = None
    for c, bufs in verdict.failures:
        lines.append(f"  {c} blocked buffers: " + ", ".join(f"{_key(k)}:{'.'.join(w)}" for k, w in bufs.items()))
    if verdict.failures:
        c, bufs = verdict.failures[0]
        witness = {"configuration": str(c), "buffers": {_key(k): list(w) for k, w in bufs.items()}}
    return Outcome("drain", verdict.drainable, lines, witness, lts.stats)


def _key(k) -> str:
    return f"{k[0]}>{k[1]}" if isinstance(k, tuple) else f">{k}"


def cmd_trace(args) -> Outcome:
    system = _load(args, System)
    sem = args.semantics
    name = f"trace {args.trace_cmd}"
    t1 = _parse_trace(system, args.trace)
    if args.trace_cmd == "run":
        try:
            run(system, sem, t1)
        except RunError as exc:
            return Outcome(name, False, [f"not executable: {exc}"], {"index": exc.index, "action": str(exc.action)})
        shown = sorted(run_all(system, sem, t1))
        return Outcome(name, True, [str(c) for c in shown], output=[str(c) for c in shown])
    if args.trace_cmd == "equiv":
        t2 = _parse_trace(system, args.other)
        same = system_equivalent(system, sem, t1, t2)
        causal = causally_equivalent(t1, t2)
        lines = [f"system equivalent: {same}", f"causally equivalent: {causal}"]
        return Outcome(name, same, lines, output={"causal": causal})
    if args.trace_cmd == "normalize":
        if SemanticsKind.parse(sem) is not SemanticsKind.P2P:
            raise PreconditionError("normalization requires p2p-fifo semantics")
        out = normalize_trace(system, t1)
        return Outcome(name, True, [format_trace(out)], output=format_trace(out))
    try:
        found = exists_equiv_k_bounded(t1, args.k)
    except ValueError as exc:
        raise InputError(str(exc)) from None
    if found is None:
        return Outcome(name, False, [f"no causally equivalent {args.k}-bounded trace"])
    return Outcome(name, True, [format_trace(found)], {"trace": format_trace(found)})


def cmd_generate(args) -> Outcome:
    what = args.generate
    if what == "tiling-fifo":
        value = tiling_to_fifo(_load(args, TilingInstance))
        report = check_r1_r2(value)
        note = [f"# {report.describe()}"]
    else:
        a = _load(args, FifoAutomaton)
        note = []
        if what == "fifo-system":
            value = fifo_to_system(a)
        else:
            if args.m is None:
                raise InputError(f"{what} needs --m LETTER")
            build = fifo_to_system_prime if what == "fifo-system-prime" else fifo_to_system_merged
            try:
                value = build(a, args.m)
            except ValueError as exc:
                raise InputError(str(exc)) from None
    text = sysfile.serialize(value)
    return Outcome(f"generate {what}", True, note + text.splitlines(), output=text)


def cmd_examples(args) -> Outcome:
    table = builtins.builtin_examples()
    if args.examples_cmd == "list":
        lines = [f"{b.name:22} {b.kind:11} {b.description}" for b in table.values()]
        return Outcome("examples list", True, lines, output={b.name: b.kind for b in table.values()})
    try:
        entry = builtins.get(args.name)
    except KeyError as exc:
        raise InputError(exc.args[0]) from None
    if entry.kind == "unavailable":
        raise InputError(f"example {entry.name!r} is not available: {entry.description}")
    text = sysfile.serialize(entry.value, entry.name)
    return Outcome("examples emit", True, text.splitlines(), output=text)


def cmd_verify(args) -> Outcome:
    from cfsm.lemmas import run_suites

    try:
        results = run_suites(args.suite or None)
    except KeyError as exc:
        raise InputError(exc.args[0]) from None
    failed = [r for r in results if not r.holds]
    lines = [r.line() for r in results]
    witness = None
    if failed:
        witness = {"suite": failed[0].name, "counterexample": str(failed[0].counterexample)}
    return Outcome("verify lemmas", not failed, lines, witness, output={r.name: r.holds for r in results})


# -- parser -------------------------------------------------------------------


def _common(p: argparse.ArgumentParser, k_default: int = 1) -> None:
    src = p.add_argument_group("input")
    src.add_argument("--file", help="system, fifo or tiling description file")
    src.add_argument("--example", help="name of a built-in example")
    p.add_argument("--semantics", default="p2p", type=_semantics, help="p2p, mailbox or bag (default p2p)")
    p.add_argument("--k", type=_natural, default=k_default, help=f"buffer bound (default {k_default})")
    p.add_argument("--max-states", type=_natural, default=DEFAULT_MAX_STATES)
    p.add_argument("--json", action="store_true", help="machine-readable output")


def _semantics(text: str) -> SemanticsKind:
    try:
        return SemanticsKind.parse(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _natural(text: str) -> int:
    try:
        n = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if n < 0:
        raise argparse.ArgumentTypeError("must be >= 0")
    return n


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="cfsm", description="Analyse systems of communicating finite state machines.")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    check = sub.add_parser("check", help="decide a property")
    check_sub = check.add_subparsers(dest="check", required=True)
    for name, text in (
        ("k-sync", "compare the k-bounded observable with the synchronous one"),
        ("ring-sync", "synchronizability of an oriented ring"),
        ("stable", "send-LTS at k branching bisimilar to k+1"),
        ("strong-stable", "every trace is k-bounded"),
    ):
        p = check_sub.add_parser(name, help=text)
        _common(p)
        if name == "k-sync":
            p.add_argument("--language-only", action="store_true", help="compare send languages only")
        p.set_defaults(func=cmd_check)

    p = sub.add_parser("explore", help="build the k-bounded LTS and classify its sink states")
    _common(p)
    p.add_argument("--dot", metavar="PATH", help="write the LTS in DOT format")
    p.set_defaults(func=cmd_explore)

    p = sub.add_parser("reach", help="regular representation of the reachable configurations of a ring")
    _common(p, k_default=3)
    p.set_defaults(func=cmd_reach)

    p = sub.add_parser("drain", help="check every configuration can drain to a stable one")
    _common(p, k_default=3)
    p.set_defaults(func=cmd_drain)

    trace = sub.add_parser("trace", help="work with a single trace")
    trace_sub = trace.add_subparsers(dest="trace_cmd", required=True)
    for name, text in (
        ("run", "execute a trace"),
        ("equiv", "system and causal equivalence of two traces"),
        ("normalize", "normalize a trace of a synchronizable ring"),
        ("exists-kbounded", "find a causally equivalent k-bounded trace"),
    ):
        p = trace_sub.add_parser(name, help=text)
        _common(p)
        p.add_argument("trace", help='tokens such as "!a ?a !?b"')
        if name == "equiv":
            p.add_argument("other")
        p.set_defaults(func=cmd_trace)

    gen = sub.add_parser("generate", help="reduction generators")
    gen_sub = gen.add_subparsers(dest="generate", required=True)
    for name in ("tiling-fifo", "fifo-system", "fifo-system-prime", "fifo-system-merged"):
        p = gen_sub.add_parser(name)
        _common(p)
        if name.startswith("fifo-system-"):
            p.add_argument("--m", help="the special letter")
        p.set_defaults(func=cmd_generate)

    ex = sub.add_parser("examples", help="built-in examples")
    ex_sub = ex.add_subparsers(dest="examples_cmd", required=True)
    p = ex_sub.add_parser("list")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_examples)
    p = ex_sub.add_parser("emit")
    p.add_argument("name")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_examples)

    ver = sub.add_parser("verify", help="bounded property suites")
    ver_sub = ver.add_subparsers(dest="verify", required=True)
    p = ver_sub.add_parser("lemmas")
    p.add_argument("--suite", action="append", help="run only this suite (repeatable)")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_verify)
    return parser


def _emit_error(args, command: str, message: str, code: int, out) -> int:
    if getattr(args, "json", False):
        json.dump({"command": command, "verdict": None, "error": message, "exit": code}, out, sort_keys=True)
        out.write("\n")
    else:
        print(f"error: {message}", file=sys.stderr)
    return code


def main(argv=None, out=None) -> int:
    out = out or sys.stdout
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING, format="%(name)s: %(message)s")
    command = " ".join(x for x in (args.command, getattr(args, "check", None), getattr(args, "trace_cmd", None), getattr(args, "generate", None), getattr(args, "examples_cmd", None), getattr(args, "verify", None)) if x)
    try:
        outcome = args.func(args)
    except PreconditionError as exc:
        return _emit_error(args, command, f"precondition violated: {exc}", PRECONDITION, out)
    except (InputError, ValidationError, ExplorationLimitError) as exc:
        return _emit_error(args, command, str(exc), USAGE, out)
    except ValueError as exc:
        return _emit_error(args, command, str(exc), USAGE, out)
    if args.json:
        json.dump(outcome.as_json(), out, sort_keys=True)
        out.write("\n")
    else:
        for line in outcome.lines:
            print(line, file=out)
    return HOLDS if outcome.verdict else FAILS


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
