"""Text formats: transducers, symbolic transducers, traces and protocols.

One model per file, line oriented, ``#`` starts a comment.  Serialisation
is canonical (states sorted, transitions sorted by source/round/target) so
equal models produce byte-identical output.
"""

from __future__ import annotations

import re
from typing import List, Tuple

from .. import protocol as protocol_mod
from ..errors import ParseError, UnknownLabel
from ..kernel import Round, Signature, Trace, Transducer, mkround, round_key
from ..symbolic import (
    SFST,
    Bin,
    BoolLit,
    IntLit,
    Neg,
    Not,
    Port,
    Reg,
    STransition,
    TRUE,
    Update,
    ValuedRound,
)

_IDENT = re.compile(r"[A-Za-z_][A-Za-z0-9_]*\Z")


# -- expression text ---------------------------------------------------------

_EXPR_TOKEN = re.compile(
    r"\s*(?:(?P<num>\d+)|(?P<ident>[A-Za-z_][A-Za-z0-9_]*)"
    r"|(?P<op><=|>=|[+\-*=<>()]))"
)


class _ExprParser:
    def __init__(self, text: str, registers, inputs, line: int):
        self.text = text
        self.registers = frozenset(registers)
        self.inputs = frozenset(inputs)
        self.line = line
        self.tokens: List[Tuple[str, str, int]] = []
        pos = 0
        while pos < len(self.text):
            if self.text[pos].isspace():
                pos += 1
                continue
            m = _EXPR_TOKEN.match(self.text, pos)
            if not m:
                raise ParseError(line, pos + 1,
                                 f"bad character {self.text[pos]!r} in expression")
            kind = m.lastgroup
            self.tokens.append((kind, m.group(kind), m.start(kind) + 1))
            pos = m.end()
        self.i = 0

    def peek(self):
        return self.tokens[self.i] if self.i < len(self.tokens) else (None, None, len(self.text) + 1)

    def take(self):
        tok = self.peek()
        self.i += 1
        return tok

    def fail(self, message):
        _, _, col = self.peek()
        raise ParseError(self.line, col, message)

    def parse(self):
        e = self.parse_or()
        if self.peek()[0] is not None:
            self.fail(f"trailing input {self.peek()[1]!r} in expression")
        return e

    def parse_or(self):
        e = self.parse_and()
        while self.peek()[1] == "or":
            self.take()
            e = Bin("or", e, self.parse_and())
        return e

    def parse_and(self):
        e = self.parse_not()
        while self.peek()[1] == "and":
            self.take()
            e = Bin("and", e, self.parse_not())
        return e

    def parse_not(self):
        if self.peek()[1] == "not":
            self.take()
            return Not(self.parse_not())
        return self.parse_cmp()

    def parse_cmp(self):
        e = self.parse_add()
        if self.peek()[1] in ("=", "<", "<=", ">", ">="):
            op = self.take()[1]
            return Bin(op, e, self.parse_add())
        return e

    def parse_add(self):
        e = self.parse_mul()
        while self.peek()[1] in ("+", "-"):
            op = self.take()[1]
            e = Bin(op, e, self.parse_mul())
        return e

    def parse_mul(self):
        e = self.parse_unary()
        while self.peek()[1] == "*":
            self.take()
            e = Bin("*", e, self.parse_unary())
        return e

    def parse_unary(self):
        kind, value, col = self.peek()
        if value == "-":
            self.take()
            return Neg(self.parse_unary())
        if kind == "num":
            self.take()
            return IntLit(int(value))
        if value == "(":
            self.take()
            e = self.parse_or()
            if self.peek()[1] != ")":
                self.fail("expected ')'")
            self.take()
            return e
        if kind == "ident":
            self.take()
            if value == "true":
                return BoolLit(True)
            if value == "false":
                return BoolLit(False)
            if value in self.registers:
                return Reg(value)
            if value in self.inputs:
                return Port(value)
            raise ParseError(self.line, col,
                             f"unknown name {value!r} (not a register or input port)")
        self.fail("expected an expression")


def parse_expr(text: str, registers, inputs, line: int = 1):
    return _ExprParser(text, registers, inputs, line).parse()


_LEVEL = {"or": 1, "and": 2, "=": 4, "<": 4, "<=": 4, ">": 4, ">=": 4,
          "+": 5, "-": 5, "*": 6}


def render_expr(e, parent_level: int = 0) -> str:
    if isinstance(e, IntLit):
        return str(e.value)
    if isinstance(e, BoolLit):
        return "true" if e.value else "false"
    if isinstance(e, (Reg, Port)):
        return e.name
    if isinstance(e, Neg):
        return _wrap("-" + render_expr(e.arg, 7), 7, parent_level)
    if isinstance(e, Not):
        return _wrap("not " + render_expr(e.arg, 3), 3, parent_level)
    if isinstance(e, Bin):
        lvl = _LEVEL[e.op]
        text = (
            f"{render_expr(e.left, lvl)} {e.op} {render_expr(e.right, lvl + 1)}"
        )
        return _wrap(text, lvl, parent_level)
    raise TypeError(f"not an expression: {e!r}")


def _wrap(text: str, level: int, parent_level: int) -> str:
    return f"({text})" if level < parent_level else text


# -- statement scanner -------------------------------------------------------


def _statements(text: str):
    """Yield (line, statement-text) with comments stripped; ';' terminates."""
    buf = []
    start_line = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0]
        for piece in re.split(r"(;)", line):
            if piece == ";":
                stmt = "".join(buf).strip()
                if stmt:
                    yield start_line, stmt
                buf = []
                start_line = None
            elif piece.strip():
                if start_line is None:
                    start_line = lineno
                buf.append(piece)
            else:
                buf.append(piece)
    tail = "".join(buf).strip()
    if tail:
        raise ParseError(start_line or 1, 1, "missing ';' at end of statement")


def _split_names(text: str, line: int) -> List[str]:
    names = [n.strip() for n in text.split(",") if n.strip()]
    for n in names:
        if not _IDENT.match(n):
            raise ParseError(line, 1, f"bad identifier {n!r}")
    return names


def _split_state_names(text: str, line: int) -> List[str]:
    """States split on top-level commas; product names like (a,b) survive."""
    names, buf, depth = [], [], 0
    for ch in text + ",":
        if ch == "," and depth == 0:
            name = "".join(buf).strip()
            if name:
                names.append(name)
            buf = []
            continue
        depth += ch == "("
        depth -= ch == ")"
        buf.append(ch)
    if depth != 0:
        raise ParseError(line, 1, "unbalanced parentheses in state list")
    for n in names:
        if any(c.isspace() for c in n) or any(c in ";{}" for c in n):
            raise ParseError(line, 1, f"bad state name {n!r}")
    return names


def _parse_round_text(text: str, line: int) -> List[str]:
    text = text.strip()
    if not (text.startswith("{") and text.endswith("}")):
        raise ParseError(line, 1, f"expected a round in braces, got {text!r}")
    inner = text[1:-1].strip()
    return _split_names(inner, line) if inner else []


_TRANS_RE = re.compile(
    r"trans\s+(?P<src>\S+)\s*->\s*(?P<tgt>\S+)\s*:\s*(?P<round>\{[^}]*\})"
    r"(?:\s+when\s+(?P<guard>.*?))?(?:\s+do\s+(?P<updates>.*))?\Z",
    re.S,
)


def _parse_header(statements, line_hint):
    """signature / states / initial / registers statements, in any order.

    ``signature in a, b; out c;`` spans two ';'-terminated segments, so an
    ``out`` segment is read as the continuation of the signature.
    """
    header = {"registers": []}
    body = []
    expecting_out = False
    for line, stmt in statements:
        if expecting_out:
            if not stmt.startswith("out"):
                raise ParseError(line, 1, "expected: out <labels>;")
            text = stmt[len("out"):].strip()
            header["outputs"] = _split_names(text, line) if text else []
            expecting_out = False
        elif stmt.startswith("signature"):
            m = re.match(r"signature\s+in\b(?P<ins>.*)\Z", stmt, re.S)
            if not m:
                raise ParseError(line, 1, "expected: signature in ...; out ...;")
            ins = m.group("ins").strip()
            header["inputs"] = _split_names(ins, line) if ins else []
            expecting_out = True
        elif stmt.startswith("states"):
            header["states"] = _split_state_names(stmt[len("states"):], line)
        elif stmt.startswith("registers"):
            header["registers"] = _split_names(stmt[len("registers"):], line)
        elif stmt.startswith("initial"):
            names = _split_state_names(stmt[len("initial"):], line)
            if len(names) != 1:
                raise ParseError(line, 1, "exactly one initial state expected")
            header["initial"] = names[0]
        else:
            body.append((line, stmt))
    for key in ("inputs", "outputs", "states", "initial"):
        if key not in header:
            raise ParseError(line_hint, 1, f"missing {key!r} declaration")
    return header, body


def looks_like_sfst(text: str) -> bool:
    stripped = re.sub(r"#[^\n]*", "", text)
    return bool(re.search(r"\bregisters\b|\bwhen\b|\bdo\b", stripped))


def looks_like_regex_protocol(text: str) -> bool:
    stripped = re.sub(r"#[^\n]*", "", text).strip()
    return stripped.startswith("alphabet")


def parse_transducer(text: str) -> Transducer:
    header, body = _parse_header(_statements(text), 1)
    if header["registers"]:
        raise ParseError(1, 1, "registers are only allowed in symbolic files")
    sig = Signature(frozenset(header["inputs"]), frozenset(header["outputs"]))
    delta = set()
    for line, stmt in body:
        m = _TRANS_RE.match(stmt)
        if not m:
            raise ParseError(line, 1, f"bad statement: {stmt!r}")
        if m.group("guard") or m.group("updates"):
            raise ParseError(line, 1, "guards/updates are only allowed in symbolic files")
        labels = _parse_round_text(m.group("round"), line)
        for lab in labels:
            if lab not in sig.universe:
                raise ParseError(line, 1, f"unknown label {lab!r} in round")
        delta.add((m.group("src"), mkround(labels), m.group("tgt")))
    return Transducer(sig, frozenset(header["states"]), header["initial"],
                      frozenset(delta))


def parse_sfst(text: str) -> SFST:
    header, body = _parse_header(_statements(text), 1)
    sig = Signature(frozenset(header["inputs"]), frozenset(header["outputs"]))
    registers = frozenset(header["registers"])
    delta = set()
    for line, stmt in body:
        m = _TRANS_RE.match(stmt)
        if not m:
            raise ParseError(line, 1, f"bad statement: {stmt!r}")
        labels = _parse_round_text(m.group("round"), line)
        for lab in labels:
            if lab not in sig.universe:
                raise ParseError(line, 1, f"unknown label {lab!r} in round")
        round_inputs = frozenset(labels) & sig.inputs
        guard = TRUE
        if m.group("guard"):
            guard = parse_expr(m.group("guard"), registers, round_inputs, line)
        updates = set()
        if m.group("updates"):
            for part in m.group("updates").split(","):
                um = re.match(r"\s*(?P<target>[A-Za-z_][A-Za-z0-9_]*)\s*:=\s*(?P<expr>.+)\Z",
                              part, re.S)
                if not um:
                    raise ParseError(line, 1, f"bad update {part.strip()!r}")
                updates.add(Update(
                    um.group("target"),
                    parse_expr(um.group("expr"), registers, round_inputs, line),
                ))
        delta.add(STransition(m.group("src"), mkround(labels), guard,
                              frozenset(updates), m.group("tgt")))
    return SFST(sig, frozenset(header["states"]), registers,
                header["initial"], frozenset(delta))


def parse_model(text: str):
    """Transducer or SFST, decided by the file contents."""
    return parse_sfst(text) if looks_like_sfst(text) else parse_transducer(text)


# -- traces ------------------------------------------------------------------


def parse_trace(text: str) -> Trace:
    rounds = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        rounds.append(mkround(_parse_round_text(line, lineno)))
    return tuple(rounds)


_VALUED_EVENT = re.compile(
    r"(?P<label>[A-Za-z_][A-Za-z0-9_]*)\s*(?:=\s*(?P<value>-?\d+))?\Z"
)


def parse_valued_trace(text: str):
    rounds = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if not (line.startswith("{") and line.endswith("}")):
            raise ParseError(lineno, 1, f"expected a round in braces, got {line!r}")
        inner = line[1:-1].strip()
        events = {}
        if inner:
            for part in inner.split(","):
                m = _VALUED_EVENT.match(part.strip())
                if not m:
                    raise ParseError(lineno, 1, f"bad event {part.strip()!r}")
                value = m.group("value")
                events[m.group("label")] = int(value) if value is not None else None
        rounds.append(ValuedRound.of(events))
    return tuple(rounds)


def is_valued_trace_text(text: str) -> bool:
    stripped = re.sub(r"#[^\n]*", "", text)
    return "=" in stripped


# -- regex protocol files ----------------------------------------------------


def parse_regex_protocol(text: str) -> Tuple[List[str], object]:
    """``alphabet a, b; regex (a b)*;`` -> (labels, regex AST)."""
    alphabet = None
    regex = None
    for line, stmt in _statements(text):
        if stmt.startswith("alphabet"):
            alphabet = _split_names(stmt[len("alphabet"):], line)
        elif stmt.startswith("regex"):
            regex = protocol_mod.parse_regex(stmt[len("regex"):])
        else:
            raise ParseError(line, 1, f"bad statement: {stmt!r}")
    if alphabet is None:
        raise ParseError(1, 1, "missing 'alphabet' declaration")
    if regex is None:
        raise ParseError(1, 1, "missing 'regex' declaration")
    for label in protocol_mod.regex_labels(regex):
        if label not in alphabet:
            raise UnknownLabel(label)
    return alphabet, regex


# -- serialisation -----------------------------------------------------------


def _render_round(v: Round) -> str:
    return "{" + ", ".join(sorted(v)) + "}"


def serialize_transducer(T: Transducer) -> str:
    lines = [
        f"signature in {', '.join(sorted(T.signature.inputs))};"
        f" out {', '.join(sorted(T.signature.outputs))};",
        f"states {', '.join(sorted(T.states))};",
        f"initial {T.initial};",
    ]
    for src, v, tgt in sorted(T.delta, key=lambda x: (x[0], round_key(x[1]), x[2])):
        lines.append(f"trans {src} -> {tgt} : {_render_round(v)};")
    return "\n".join(lines) + "\n"


def serialize_sfst(T: SFST) -> str:
    lines = [
        f"signature in {', '.join(sorted(T.signature.inputs))};"
        f" out {', '.join(sorted(T.signature.outputs))};",
        f"states {', '.join(sorted(T.states))};",
    ]
    if T.registers:
        lines.append(f"registers {', '.join(sorted(T.registers))};")
    lines.append(f"initial {T.initial};")

    def key(t: STransition):
        return (t.source, round_key(t.round), t.target, render_expr(t.guard),
                tuple(sorted(u.target for u in t.updates)))

    for t in sorted(T.delta, key=key):
        text = f"trans {t.source} -> {t.target} : {_render_round(t.round)}"
        if t.guard != TRUE:
            text += f" when {render_expr(t.guard)}"
        if t.updates:
            rendered = [
                f"{u.target} := {render_expr(u.expr)}"
                for u in sorted(t.updates, key=lambda u: u.target)
            ]
            text += " do " + ", ".join(rendered)
        lines.append(text + ";")
    return "\n".join(lines) + "\n"


def serialize_model(model) -> str:
    if isinstance(model, SFST):
        return serialize_sfst(model)
    return serialize_transducer(model)


def serialize_trace(t: Trace) -> str:
    return "".join(_render_round(v) + "\n" for v in t)


def serialize_valued_trace(rounds) -> str:
    return "".join(v.render() + "\n" for v in rounds)
