"""Protocol construction and the online trace monitor.

Protocols are ordinary transducers whose language delimits what the
environment may do.  Asynchronous protocols are written as regular
expressions over single moves; the compiled transducer's language is the
prefix closure of the regex's path language (there are no accepting states
anywhere in this library, matching the game-style reading of plays).
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import FrozenSet, List, Optional, Tuple

from . import algebra
from .errors import ParseError, ResourceLimit, SignatureMismatch, UnknownLabel
from .kernel import Round, Signature, Trace, Transducer, render_round, round_key


# -- protocol regular expressions -------------------------------------------


@dataclass(frozen=True)
class Lit:
    label: str


@dataclass(frozen=True)
class Cat:
    items: Tuple


@dataclass(frozen=True)
class Alt:
    items: Tuple


@dataclass(frozen=True)
class Star:
    item: object


ProtocolRegex = object

_TOKEN_RE = re.compile(r"\s*(?:(?P<ident>[A-Za-z_][A-Za-z0-9_]*)|(?P<sym>[()+*]))")


def parse_regex(text: str) -> ProtocolRegex:
    """Parse ``a (b c + d)* e`` style protocol expressions.

    Juxtaposition is concatenation, ``+`` alternation, ``*`` iteration.
    """
    tokens = []
    pos = 0
    line = 1
    line_start = 0
    while pos < len(text):
        if text[pos] == "\n":
            line += 1
            line_start = pos + 1
            pos += 1
            continue
        m = _TOKEN_RE.match(text, pos)
        if not m or m.end() == pos:
            if text[pos].isspace():
                pos += 1
                continue
            raise ParseError(line, pos - line_start + 1,
                             f"unexpected character {text[pos]!r}")
        tokens.append((m.group("ident") or m.group("sym"),
                       line, m.start(m.lastgroup) - line_start + 1))
        pos = m.end()

    state = {"i": 0}

    def peek():
        return tokens[state["i"]][0] if state["i"] < len(tokens) else None

    def where():
        if state["i"] < len(tokens):
            _, ln, col = tokens[state["i"]]
            return ln, col
        return line, len(text) - line_start + 1

    def advance():
        state["i"] += 1

    def parse_alt():
        arms = [parse_cat()]
        while peek() == "+":
            advance()
            arms.append(parse_cat())
        return arms[0] if len(arms) == 1 else Alt(tuple(arms))

    def parse_cat():
        items = []
        while peek() is not None and peek() not in (")", "+"):
            items.append(parse_rep())
        if not items:
            ln, col = where()
            raise ParseError(ln, col, "expected an event or a group")
        return items[0] if len(items) == 1 else Cat(tuple(items))

    def parse_rep():
        node = parse_atom()
        while peek() == "*":
            advance()
            node = Star(node)
        return node

    def parse_atom():
        tok = peek()
        ln, col = where()
        if tok is None:
            raise ParseError(ln, col, "unexpected end of expression")
        if tok == "(":
            advance()
            inner = parse_alt()
            if peek() != ")":
                ln, col = where()
                raise ParseError(ln, col, "expected ')'")
            advance()
            return inner
        if tok in (")", "+", "*"):
            raise ParseError(ln, col, f"unexpected {tok!r}")
        advance()
        return Lit(tok)

    out = parse_alt()
    if peek() is not None:
        ln, col = where()
        raise ParseError(ln, col, f"trailing input {peek()!r}")
    return out


def regex_labels(r: ProtocolRegex) -> FrozenSet[str]:
    if isinstance(r, Lit):
        return frozenset({r.label})
    if isinstance(r, Star):
        return regex_labels(r.item)
    if isinstance(r, (Cat, Alt)):
        out = frozenset()
        for item in r.items:
            out |= regex_labels(item)
        return out
    raise TypeError(f"not a protocol regex: {r!r}")


def _glushkov(r: ProtocolRegex):
    """Position automaton data: (positions, nullable, first, last, follow)."""
    positions: List[str] = []
    follow = {}

    def walk(node):
        # returns (nullable, first, last) over position ids
        if isinstance(node, Lit):
            p = len(positions)
            positions.append(node.label)
            follow.setdefault(p, set())
            return False, {p}, {p}
        if isinstance(node, Star):
            nullable, first, last = walk(node.item)
            for p in last:
                follow[p] |= first
            return True, first, last
        if isinstance(node, Alt):
            nullable, first, last = False, set(), set()
            for item in node.items:
                n, f, l = walk(item)
                nullable |= n
                first |= f
                last |= l
            return nullable, first, last
        if isinstance(node, Cat):
            nullable, first, last = True, set(), set()
            for item in node.items:
                n, f, l = walk(item)
                if nullable:
                    first |= f
                for p in last:
                    follow[p] |= f
                if n:
                    last |= l
                else:
                    last = l
                nullable &= n
            return nullable, first, last
        raise TypeError(f"not a protocol regex: {node!r}")

    nullable, first, last = walk(r)
    return positions, nullable, first, last, follow


def compile_regex(r, sig: Signature) -> Transducer:
    """Compile a protocol regex (text or AST) to a deterministic transducer.

    Position-automaton construction followed by subset construction; the
    result is trimmed so that its path language is exactly the prefix
    closure of the regex's language.  Every literal becomes a singleton
    round.
    """
    if isinstance(r, str):
        r = parse_regex(r)
    for label in regex_labels(r):
        if label not in sig.universe:
            raise UnknownLabel(label)
    positions, nullable, first, last, follow = _glushkov(r)
    accepting = set(last)

    # subset construction over position sets; -1 is the start marker
    start = frozenset({-1})
    succ_of = {-1: first}
    for p in range(len(positions)):
        succ_of[p] = follow[p]

    def subset_accepting(subset) -> bool:
        if -1 in subset and nullable:
            return True
        return any(p in accepting for p in subset if p >= 0)

    table = {start: {}}
    frontier = [start]
    while frontier:
        cur = frontier.pop()
        buckets = {}
        for p in cur:
            for q in succ_of[p]:
                buckets.setdefault(positions[q], set()).add(q)
        for label, targets in buckets.items():
            tgt = frozenset(targets)
            table[cur][label] = tgt
            if tgt not in table:
                table[tgt] = {}
                frontier.append(tgt)

    # trim to subsets from which some accepting subset is reachable, so all
    # paths spell prefixes of accepted words
    live = {s for s in table if subset_accepting(s)}
    changed = True
    while changed:
        changed = False
        for s, edges in table.items():
            if s not in live and any(t in live for t in edges.values()):
                live.add(s)
                changed = True

    names = {}

    def name_of(subset) -> str:
        if subset not in names:
            names[subset] = f"P{len(names)}"
        return names[subset]

    delta = set()
    if start not in live:
        # empty language: the prefix closure is {epsilon}
        return Transducer(sig, frozenset({"P0"}), "P0", frozenset())
    order = [start]
    seen = {start}
    idx = 0
    while idx < len(order):
        cur = order[idx]
        idx += 1
        name_of(cur)
        for label in sorted(table[cur]):
            tgt = table[cur][label]
            if tgt not in live:
                continue
            if tgt not in seen:
                seen.add(tgt)
                order.append(tgt)
            delta.add((name_of(cur), frozenset({label}), name_of(tgt)))
    return Transducer(sig, frozenset(names.values()), names[start],
                      frozenset(delta))


# -- the online monitor ------------------------------------------------------


@dataclass(frozen=True)
class Verdict:
    """Monitor outcome: acceptance, or the first offending round."""

    status: str  # "OK" | "VIOLATION"
    index: Optional[int] = None
    offending: Optional[Round] = None
    expected: Optional[FrozenSet[Round]] = None

    @property
    def ok(self) -> bool:
        return self.status == "OK"

    def render(self) -> str:
        if self.ok:
            return "OK"
        expected = ",".join(
            render_round(v) for v in sorted(self.expected, key=round_key)
        )
        return (
            f"VIOLATION index={self.index} "
            f"round={render_round(self.offending)} expected={{{expected}}}"
        )


def monitor(P: Transducer, t: Trace) -> Verdict:
    """Online membership check: consume rounds left to right and flag the
    first round the protocol does not enable."""
    if not P.is_deterministic():
        P = algebra.determinize(P)
    state = P.initial
    for i, v in enumerate(t):
        v = frozenset(v)
        targets = P.step(state, v)
        if not targets:
            return Verdict("VIOLATION", i, v, P.enabled(state))
        (state,) = targets
    return Verdict("OK")


# -- canonical protocols -----------------------------------------------------

_UNIVERSAL_CAP = 4096


def universal_protocol(sig: Signature) -> Transducer:
    """One state enabling every round: the all-permitting protocol."""
    labels = sorted(sig.universe)
    if 2 ** len(labels) > _UNIVERSAL_CAP:
        raise ResourceLimit(
            f"universal protocol over {len(labels)} labels is too large"
        )
    rounds = [frozenset()]
    for lab in labels:
        rounds += [v | {lab} for v in rounds]
    return Transducer(
        sig, frozenset({"u"}), "u", frozenset(("u", v, "u") for v in rounds)
    )


def empty_protocol(sig: Signature) -> Transducer:
    """No interaction is permitted; the language is {epsilon}."""
    return Transducer(sig, frozenset({"e"}), "e", frozenset())


def align_protocol(P: Transducer, sig: Signature) -> Transducer:
    """Rebind a protocol to the subject's signature (same label universe)."""
    if P.signature == sig:
        return P
    if P.signature.universe != sig.universe:
        raise SignatureMismatch(
            "protocol and subject use different label universes"
        )
    return P.relabel_signature(sig)
