"""Symbolic transducers: guarded, register-updating transitions over a
small integer/boolean expression language.

Guards and updates live in a closed grammar with two equivalence modes
(structural normal forms, or agreement on a bounded test domain) instead of
an external solver; the structural mode under-approximates semantic
equivalence, which is the conservative direction for minimisation.
Coherence is decided on control states only, with witness reachability
computed on the control skeleton (guards ignored), again conservative.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Dict, FrozenSet, List, Mapping, Optional, Tuple

from . import coherence, kernel
from .coherence import CoherenceRelation, EquivalencePairs
from .errors import (
    DomainExceeded,
    MissingInitial,
    NotAProtocol,
    Overflow,
    ResourceLimit,
    SameState,
    SignatureMismatch,
    TypeMismatch,
    UnboundReference,
    UnknownState,
)
from .kernel import Round, Signature, Transducer

INT64_MIN = -(2**63)
INT64_MAX = 2**63 - 1

SEMANTIC_DOMAIN = (-4, 4)   # default per-variable test domain
SEMANTIC_CAP = 10**6        # assignment cap for bounded-semantic checks


# -- expression syntax ------------------------------------------------------


@dataclass(frozen=True)
class IntLit:
    value: int


@dataclass(frozen=True)
class BoolLit:
    value: bool


@dataclass(frozen=True)
class Reg:
    name: str


@dataclass(frozen=True)
class Port:
    """The value carried on an input port present in the current round."""

    name: str


@dataclass(frozen=True)
class Neg:
    arg: "Expr"


@dataclass(frozen=True)
class Not:
    arg: "Expr"


@dataclass(frozen=True)
class Bin:
    op: str  # + - * = < <= > >= and or
    left: "Expr"
    right: "Expr"


Expr = object  # union of the node classes above

TRUE = BoolLit(True)
FALSE = BoolLit(False)

_INT_OPS = {"+", "-", "*"}
_CMP_OPS = {"=", "<", "<=", ">", ">="}
_BOOL_OPS = {"and", "or"}


def type_of(e: Expr, registers=None, ports=None) -> str:
    """'int' or 'bool'; checks declared references when sets are given."""
    if isinstance(e, IntLit):
        return "int"
    if isinstance(e, BoolLit):
        return "bool"
    if isinstance(e, Reg):
        if registers is not None and e.name not in registers:
            raise UnboundReference(e.name)
        return "int"
    if isinstance(e, Port):
        if ports is not None and e.name not in ports:
            raise UnboundReference(e.name)
        return "int"
    if isinstance(e, Neg):
        if type_of(e.arg, registers, ports) != "int":
            raise TypeMismatch("unary minus needs an integer operand")
        return "int"
    if isinstance(e, Not):
        if type_of(e.arg, registers, ports) != "bool":
            raise TypeMismatch("'not' needs a boolean operand")
        return "bool"
    if isinstance(e, Bin):
        lt = type_of(e.left, registers, ports)
        rt = type_of(e.right, registers, ports)
        if e.op in _INT_OPS or e.op in _CMP_OPS:
            if lt != "int" or rt != "int":
                raise TypeMismatch(f"operator {e.op!r} needs integer operands")
            return "int" if e.op in _INT_OPS else "bool"
        if e.op in _BOOL_OPS:
            if lt != "bool" or rt != "bool":
                raise TypeMismatch(f"operator {e.op!r} needs boolean operands")
            return "bool"
        raise TypeMismatch(f"unknown operator {e.op!r}")
    raise TypeMismatch(f"not an expression: {e!r}")


def _check64(v: int) -> int:
    if v < INT64_MIN or v > INT64_MAX:
        raise Overflow(f"arithmetic overflow: {v}")
    return v


def eval_expr(e: Expr, regs: Mapping[str, int], ports: Mapping[str, int] = None):
    """Strict evaluation; 64-bit checked arithmetic, overflow is an error."""
    ports = ports or {}
    if isinstance(e, IntLit):
        return e.value
    if isinstance(e, BoolLit):
        return e.value
    if isinstance(e, Reg):
        if e.name not in regs:
            raise UnboundReference(e.name)
        return regs[e.name]
    if isinstance(e, Port):
        if e.name not in ports or ports[e.name] is None:
            raise UnboundReference(e.name)
        return ports[e.name]
    if isinstance(e, Neg):
        return _check64(-eval_expr(e.arg, regs, ports))
    if isinstance(e, Not):
        v = eval_expr(e.arg, regs, ports)
        if not isinstance(v, bool):
            raise TypeMismatch("'not' applied to an integer")
        return not v
    if isinstance(e, Bin):
        a = eval_expr(e.left, regs, ports)
        b = eval_expr(e.right, regs, ports)
        if e.op in _INT_OPS or e.op in _CMP_OPS:
            if isinstance(a, bool) or isinstance(b, bool):
                raise TypeMismatch(f"operator {e.op!r} applied to a boolean")
        if e.op == "+":
            return _check64(a + b)
        if e.op == "-":
            return _check64(a - b)
        if e.op == "*":
            return _check64(a * b)
        if e.op == "=":
            return a == b
        if e.op == "<":
            return a < b
        if e.op == "<=":
            return a <= b
        if e.op == ">":
            return a > b
        if e.op == ">=":
            return a >= b
        if not isinstance(a, bool) or not isinstance(b, bool):
            raise TypeMismatch(f"operator {e.op!r} applied to an integer")
        return (a and b) if e.op == "and" else (a or b)
    raise TypeMismatch(f"not an expression: {e!r}")


def free_refs(e: Expr):
    """(register names, port names) referenced by an expression."""
    regs, ports = set(), set()
    stack = [e]
    while stack:
        x = stack.pop()
        if isinstance(x, Reg):
            regs.add(x.name)
        elif isinstance(x, Port):
            ports.add(x.name)
        elif isinstance(x, (Neg, Not)):
            stack.append(x.arg)
        elif isinstance(x, Bin):
            stack.extend((x.left, x.right))
    return regs, ports


def int_literals(e: Expr):
    stack, out = [e], set()
    while stack:
        x = stack.pop()
        if isinstance(x, IntLit):
            out.add(x.value)
        elif isinstance(x, (Neg, Not)):
            stack.append(x.arg)
        elif isinstance(x, Bin):
            stack.extend((x.left, x.right))
    return out


# -- structural normal forms ------------------------------------------------


def _nf_key(nf) -> str:
    return repr(nf)


def normal_form(e: Expr):
    """Hashable normal form: constant-fold, flatten associative operators,
    sort commutative operands."""
    if isinstance(e, IntLit):
        return ("int", e.value)
    if isinstance(e, BoolLit):
        return ("bool", e.value)
    if isinstance(e, Reg):
        return ("reg", e.name)
    if isinstance(e, Port):
        return ("port", e.name)
    if isinstance(e, Neg):
        nf = normal_form(e.arg)
        if nf[0] == "int":
            return ("int", -nf[1])
        if nf[0] == "neg":
            return nf[1]
        return ("neg", nf)
    if isinstance(e, Not):
        nf = normal_form(e.arg)
        if nf[0] == "bool":
            return ("bool", not nf[1])
        if nf[0] == "not":
            return nf[1]
        return ("not", nf)
    if isinstance(e, Bin):
        if e.op in ("+", "*"):
            return _nf_sum_prod(e)
        if e.op == "-":
            a, b = normal_form(e.left), normal_form(e.right)
            if a[0] == "int" and b[0] == "int":
                return ("int", a[1] - b[1])
            if b[0] == "int" and b[1] == 0:
                return a
            return ("sub", a, b)
        if e.op in _CMP_OPS:
            a, b = normal_form(e.left), normal_form(e.right)
            if a[0] == "int" and b[0] == "int":
                return ("bool", eval_expr(Bin(e.op, IntLit(a[1]), IntLit(b[1])), {}))
            if e.op == "=" and _nf_key(b) < _nf_key(a):
                a, b = b, a
            return ("cmp", e.op, a, b)
        if e.op in _BOOL_OPS:
            return _nf_and_or(e)
    raise TypeMismatch(f"not an expression: {e!r}")


def _nf_sum_prod(e: Bin):
    op = e.op
    kind = "sum" if op == "+" else "prod"
    const = 0 if op == "+" else 1
    operands: List = []
    stack = [e.left, e.right]
    while stack:
        x = stack.pop()
        if isinstance(x, Bin) and x.op == op:
            stack.extend((x.left, x.right))
            continue
        nf = normal_form(x)
        if nf[0] == kind:  # flatten an already-normalised child
            const = const + nf[1] if op == "+" else const * nf[1]
            operands.extend(nf[2])
        elif nf[0] == "int":
            const = const + nf[1] if op == "+" else const * nf[1]
        else:
            operands.append(nf)
    if op == "*" and const == 0:
        return ("int", 0)
    if not operands:
        return ("int", const)
    operands.sort(key=_nf_key)
    neutral = 0 if op == "+" else 1
    if const == neutral and len(operands) == 1:
        return operands[0]
    return (kind, const, tuple(operands))


def _nf_and_or(e: Bin):
    op = e.op
    absorbing = op == "or"
    operands = set()
    stack = [e.left, e.right]
    while stack:
        x = stack.pop()
        if isinstance(x, Bin) and x.op == op:
            stack.extend((x.left, x.right))
            continue
        nf = normal_form(x)
        if nf[0] == op:
            operands.update(nf[1])
        elif nf[0] == "bool":
            if nf[1] == absorbing:
                return ("bool", absorbing)
        else:
            operands.add(nf)
    if not operands:
        return ("bool", not absorbing)
    items = tuple(sorted(operands, key=_nf_key))
    if len(items) == 1:
        return items[0]
    return (op, items)


def guard_equiv(g1: Expr, g2: Expr, mode: str = "structural",
                domain: Tuple[int, int] = SEMANTIC_DOMAIN) -> bool:
    """Equivalence of two expressions of the same type.

    ``structural``: equality of normal forms (sound but incomplete for
    semantic equivalence).  ``bounded-semantic``: equal value on every
    assignment over the finite test domain.
    """
    t1, t2 = type_of(g1), type_of(g2)
    if t1 != t2:
        raise TypeMismatch(f"comparing a {t1} expression with a {t2} one")
    if mode == "structural":
        return normal_form(g1) == normal_form(g2)
    if mode != "bounded-semantic":
        raise ValueError(f"unknown guard equivalence mode: {mode!r}")
    r1, p1 = free_refs(g1)
    r2, p2 = free_refs(g2)
    regs, ports = sorted(r1 | r2), sorted(p1 | p2)
    lo, hi = domain
    width = hi - lo + 1
    if width ** (len(regs) + len(ports)) > SEMANTIC_CAP:
        raise ResourceLimit("bounded-semantic domain too large")
    for values in itertools.product(range(lo, hi + 1), repeat=len(regs) + len(ports)):
        renv = dict(zip(regs, values[: len(regs)]))
        penv = dict(zip(ports, values[len(regs):]))
        if eval_expr(g1, renv, penv) != eval_expr(g2, renv, penv):
            return False
    return True


# -- updates and transitions ------------------------------------------------


@dataclass(frozen=True)
class Update:
    """Assignment of an integer expression to a register or an output port."""

    target: str
    expr: Expr


@dataclass(frozen=True)
class STransition:
    source: str
    round: Round
    guard: Expr
    updates: FrozenSet[Update]
    target: str

    def __post_init__(self):
        object.__setattr__(self, "round", frozenset(self.round))
        object.__setattr__(self, "updates", frozenset(self.updates))


def is_identity_update(u: Update) -> bool:
    return isinstance(u.expr, Reg) and u.expr.name == u.target


def normalised_updates(updates: FrozenSet[Update]) -> FrozenSet[Tuple[str, object]]:
    """Identity updates dropped; expressions in normal form."""
    return frozenset(
        (u.target, normal_form(u.expr)) for u in updates if not is_identity_update(u)
    )


def updates_equiv(u1: FrozenSet[Update], u2: FrozenSet[Update],
                  mode: str = "structural",
                  domain: Tuple[int, int] = SEMANTIC_DOMAIN) -> bool:
    """Target-wise equivalence of the right-hand sides (identities dropped)."""
    a = {u.target: u.expr for u in u1 if not is_identity_update(u)}
    b = {u.target: u.expr for u in u2 if not is_identity_update(u)}
    if a.keys() != b.keys():
        return False
    return all(guard_equiv(a[t], b[t], mode, domain) for t in a)


@dataclass(frozen=True)
class SFST:
    """Control states plus registers; transitions carry a guard and a set
    of simultaneous updates.  Registers start at 0."""

    signature: Signature
    states: FrozenSet[str]
    registers: FrozenSet[str]
    initial: str
    delta: FrozenSet[STransition]

    def __post_init__(self):
        object.__setattr__(self, "states", frozenset(self.states))
        object.__setattr__(self, "registers", frozenset(self.registers))
        object.__setattr__(self, "delta", frozenset(self.delta))
        if not self.states:
            raise UnknownState("<empty state set>")
        if self.initial not in self.states:
            raise MissingInitial(self.initial)
        clash = self.registers & self.signature.universe
        if clash:
            raise SignatureMismatch(
                f"register names collide with port labels: {sorted(clash)}"
            )
        for name in self.registers:
            kernel.check_label(name)
        for tr in self.delta:
            self._check_transition(tr)
        adj: Dict[str, List[STransition]] = {}
        for tr in self.delta:
            adj.setdefault(tr.source, []).append(tr)
        object.__setattr__(self, "_adj", adj)

    def _check_transition(self, tr: STransition):
        if tr.source not in self.states:
            raise UnknownState(tr.source)
        if tr.target not in self.states:
            raise UnknownState(tr.target)
        self.signature.check_round(tr.round)
        round_inputs = tr.round & self.signature.inputs
        if type_of(tr.guard, self.registers, round_inputs) != "bool":
            raise TypeMismatch("guard must be boolean")
        seen_targets = set()
        for u in tr.updates:
            if u.target in seen_targets:
                raise TypeMismatch(f"two updates for target {u.target!r}")
            seen_targets.add(u.target)
            if u.target not in self.registers:
                if u.target not in self.signature.outputs:
                    raise UnboundReference(u.target)
                if u.target not in tr.round:
                    raise TypeMismatch(
                        f"output update for {u.target!r} outside its round"
                    )
            if type_of(u.expr, self.registers, round_inputs) != "int":
                raise TypeMismatch(f"update for {u.target!r} must be integer")

    def out(self, s: str) -> List[STransition]:
        if s not in self.states:
            raise UnknownState(s)
        return self._adj.get(s, [])

    def control_skeleton(self) -> Transducer:
        """Guards and updates dropped; duplicates collapse."""
        return Transducer(
            self.signature,
            self.states,
            self.initial,
            frozenset((t.source, t.round, t.target) for t in self.delta),
        )

    def data_ports(self) -> FrozenSet[str]:
        """Ports that ever carry a value: referenced inputs, updated outputs."""
        out = set()
        for tr in self.delta:
            for e in [tr.guard] + [u.expr for u in tr.updates]:
                out |= free_refs(e)[1]
            for u in tr.updates:
                if u.target in self.signature.outputs:
                    out.add(u.target)
        return frozenset(out)

    def initial_registers(self) -> Tuple[Tuple[str, int], ...]:
        return tuple((r, 0) for r in sorted(self.registers))


def lift_transducer(T: Transducer) -> SFST:
    """View a plain transducer as an SFST with true guards and no updates."""
    return SFST(
        T.signature,
        T.states,
        frozenset(),
        T.initial,
        frozenset(
            STransition(s, v, TRUE, frozenset(), t) for s, v, t in T.delta
        ),
    )


# -- concrete runs ----------------------------------------------------------


@dataclass(frozen=True)
class ValuedRound:
    """One synchronous step with concrete port values.

    ``events`` maps each fired port to an integer, or to None for a
    control-only (unit-valued) firing.
    """

    events: FrozenSet[Tuple[str, Optional[int]]]

    @classmethod
    def of(cls, mapping: Mapping[str, Optional[int]]) -> "ValuedRound":
        return cls(frozenset(mapping.items()))

    def labels(self) -> FrozenSet[str]:
        return frozenset(label for label, _ in self.events)

    def as_dict(self) -> Dict[str, Optional[int]]:
        return dict(self.events)

    def render(self) -> str:
        items = sorted(self.as_dict().items())
        return "{" + ", ".join(
            lab if val is None else f"{lab}={val}" for lab, val in items
        ) + "}"


Config = Tuple[str, Tuple[Tuple[str, int], ...]]


def _fire(T: SFST, tr: STransition, vround: ValuedRound, regs: Dict[str, int]):
    """Register valuation after firing, or None if the transition declines."""
    values = vround.as_dict()
    ports = {
        lab: val for lab, val in values.items() if lab in T.signature.inputs
    }
    if eval_expr(tr.guard, regs, ports) is not True:
        return None
    new_regs = dict(regs)
    for u in tr.updates:
        v = eval_expr(u.expr, regs, ports)
        if u.target in T.registers:
            new_regs[u.target] = v
        else:
            if values.get(u.target) != v:
                return None
    return new_regs


def sfst_run(T: SFST, trace) -> FrozenSet[Config]:
    """All configurations reachable on a valued trace from (initial, zeros).

    A transition fires when its round equals the fired label set, its guard
    holds, and every output update reproduces the carried value; register
    updates read the pre-state.  Evaluation errors carry the round index.
    """
    configs = {(T.initial, T.initial_registers())}
    for i, vround in enumerate(trace):
        stray = vround.labels() - T.signature.universe
        if stray:
            raise SignatureMismatch(f"round {i}: unknown labels {sorted(stray)}")
        nxt = set()
        for state, regs in configs:
            regs_d = dict(regs)
            for tr in T.out(state):
                if tr.round != vround.labels():
                    continue
                try:
                    new_regs = _fire(T, tr, vround, regs_d)
                except Exception as e:
                    e.round_index = i
                    raise
                if new_regs is not None:
                    nxt.add((tr.target, tuple(sorted(new_regs.items()))))
        configs = nxt
        if not configs:
            return frozenset()
    return frozenset(configs)


def sfst_accepts(T: SFST, trace) -> bool:
    return bool(sfst_run(T, trace))


# -- explicit expansion -----------------------------------------------------

EXPAND_STATE_CAP = 10**5


def expanded_label(port: str, value: Optional[int]) -> str:
    """Valued events as plain labels: x=3 -> 'x_eq_3', x=-3 -> 'x_eq_n3'."""
    if value is None:
        return port
    return f"{port}_eq_{value}" if value >= 0 else f"{port}_eq_n{-value}"


def _config_name(state: str, regs) -> str:
    if not regs:
        return state
    return state + "[" + ",".join(f"{r}={v}" for r, v in regs) + "]"


def expand(T: SFST, lo: int, hi: int, data_ports=None,
           state_cap: int = EXPAND_STATE_CAP) -> Transducer:
    """Map register values into explicit states over a finite value domain.

    States are reachable (control state, register valuation) pairs; labels
    are (port, value) events rendered via :func:`expanded_label`.  Runs
    whose register values or carried values leave the domain are cut at the
    frontier, so acceptance agrees with ``sfst_run`` exactly on traces whose
    values stay within the domain.
    """
    if lo > hi:
        raise DomainExceeded(f"empty domain [{lo}..{hi}]")
    if not (lo <= 0 <= hi):
        raise DomainExceeded("domain must contain 0 (the initial register value)")
    for tr in T.delta:
        for e in [tr.guard] + [u.expr for u in tr.updates]:
            outside = {v for v in int_literals(e) if not lo <= v <= hi}
            if outside:
                raise DomainExceeded(
                    f"literal {sorted(outside)[0]} outside [{lo}..{hi}]"
                )
    data = frozenset(T.data_ports() if data_ports is None else data_ports)
    domain = range(lo, hi + 1)

    def port_labels(port):
        if port in data:
            return [expanded_label(port, v) for v in domain]
        return [port]

    inputs = frozenset(
        lab for p in T.signature.inputs for lab in port_labels(p)
    )
    outputs = frozenset(
        lab for p in T.signature.outputs for lab in port_labels(p)
    )
    sig = Signature(inputs, outputs)

    init = (T.initial, T.initial_registers())
    names = {init: _config_name(*init)}
    frontier = [init]
    delta = set()
    while frontier:
        state, regs = frontier.pop()
        regs_d = dict(regs)
        for tr in T.out(state):
            in_data = sorted(tr.round & T.signature.inputs & data)
            for values in itertools.product(domain, repeat=len(in_data)):
                ports = dict(zip(in_data, values))
                try:
                    guard_ok = eval_expr(tr.guard, regs_d, ports) is True
                except Overflow:
                    continue
                if not guard_ok:
                    continue
                new_regs = dict(regs_d)
                out_vals = {}
                ok = True
                for u in tr.updates:
                    try:
                        v = eval_expr(u.expr, regs_d, ports)
                    except Overflow:
                        ok = False
                        break
                    if not lo <= v <= hi:
                        ok = False
                        break
                    if u.target in T.registers:
                        new_regs[u.target] = v
                    else:
                        out_vals[u.target] = v
                if not ok:
                    continue
                free_outs = sorted(
                    (tr.round & T.signature.outputs & data) - out_vals.keys()
                )
                for extra in itertools.product(domain, repeat=len(free_outs)):
                    carried = dict(out_vals)
                    carried.update(zip(free_outs, extra))
                    label_set = set()
                    for p in sorted(tr.round):
                        if p in data:
                            val = ports.get(p, carried.get(p))
                            label_set.add(expanded_label(p, val))
                        else:
                            label_set.add(p)
                    cfg = (tr.target, tuple(sorted(new_regs.items())))
                    if cfg not in names:
                        if len(names) >= state_cap:
                            raise ResourceLimit(
                                f"expansion exceeded {state_cap} states"
                            )
                        names[cfg] = _config_name(*cfg)
                        frontier.append(cfg)
                    delta.add((names[(state, regs)], frozenset(label_set),
                               names[cfg]))
    return Transducer(sig, frozenset(names.values()), names[init],
                      frozenset(delta))


def expand_valued_trace(T: SFST, trace, data_ports=None):
    """Render a valued trace in the alphabet of :func:`expand`."""
    data = frozenset(T.data_ports() if data_ports is None else data_ports)
    out = []
    for vround in trace:
        labels = set()
        for lab, val in vround.as_dict().items():
            labels.add(expanded_label(lab, val) if lab in data else lab)
        out.append(frozenset(labels))
    return tuple(out)


# -- symbolic protocols and coherence ---------------------------------------


def is_symbolic_protocol(T: SFST) -> bool:
    """Guards all literally true, updates all identities (or none)."""
    for tr in T.delta:
        if normal_form(tr.guard) != ("bool", True):
            return False
        if normalised_updates(tr.updates):
            return False
    return True


def sfst_coherent_simulation(T: SFST, P: SFST, mode: str = "structural",
                             domain: Tuple[int, int] = SEMANTIC_DOMAIN) -> CoherenceRelation:
    """Greatest coherent simulation on control states.

    Transition matching additionally demands guard equivalence and
    target-wise update equivalence in the chosen mode; the witness
    reachability behind the protocol-dead escape runs on the control
    skeleton, which over-approximates witnesses and therefore only ever
    forbids merges.
    """
    if isinstance(P, Transducer):
        P = lift_transducer(P)
    if not is_symbolic_protocol(P):
        raise NotAProtocol("guards must be true and updates identities")
    skel_t = T.control_skeleton()
    skel_p = P.control_skeleton()
    if skel_t.signature != skel_p.signature:
        raise SignatureMismatch("coherent simulation needs identical signatures")
    states = sorted(T.states)
    extendable = coherence._extendable_rounds(skel_t, skel_p)

    pairs = set()
    for s1 in states:
        e1 = skel_t.enabled(s1)
        for s2 in states:
            extra = e1 - skel_t.enabled(s2)
            if any(v in extendable[s2] for v in extra):
                continue
            pairs.add((s1, s2))

    def matches(a: STransition, b: STransition) -> bool:
        return (
            a.round == b.round
            and guard_equiv(a.guard, b.guard, mode, domain)
            and updates_equiv(a.updates, b.updates, mode, domain)
        )

    changed = True
    while changed:
        changed = False
        for (s1, s2) in list(pairs):
            ok = True
            for tb in T.out(s2):
                if not any(
                    matches(ta, tb) and (ta.target, tb.target) in pairs
                    for ta in T.out(s1)
                ):
                    ok = False
                    break
            if not ok:
                pairs.discard((s1, s2))
                changed = True
    return CoherenceRelation(frozenset(pairs), T, P)


def sfst_equivalence_pairs(T: SFST, P: SFST, mode: str = "structural",
                           relation=None) -> EquivalencePairs:
    rel = relation if relation is not None else sfst_coherent_simulation(T, P, mode)
    out = set()
    for (a, b) in rel.pairs:
        if a != b and (b, a) in rel.pairs:
            out.add(frozenset((a, b)))
    return EquivalencePairs(frozenset(out))


def sfst_quotient(T: SFST, s1: str, s2: str) -> SFST:
    """Merge two control states; registers are untouched.  Transitions
    collapse only when round, guard, updates and endpoints all coincide."""
    for s in (s1, s2):
        if s not in T.states:
            raise UnknownState(s)
    if s1 == s2:
        raise SameState(s1)
    keep, drop = min(s1, s2), max(s1, s2)

    def rename(s):
        return keep if s == drop else s

    return SFST(
        T.signature,
        frozenset(rename(s) for s in T.states),
        T.registers,
        rename(T.initial),
        frozenset(
            STransition(rename(t.source), t.round, t.guard, t.updates,
                        rename(t.target))
            for t in T.delta
        ),
    )


def sfst_coherent_minimize(T: SFST, P: SFST, mode: str = "structural",
                           keep_unreachable: bool = False):
    """Iterated quotienting of coherently equivalent control states."""
    current = T
    log: List[Tuple[str, str]] = []
    while True:
        pairs = sfst_equivalence_pairs(current, P, mode)
        if not pairs:
            break
        a, b = pairs.sorted_pairs()[0]
        current = sfst_quotient(current, a, b)
        log.append((min(a, b), max(a, b)))
    if not keep_unreachable:
        reach = current.control_skeleton().reachable_states()
        if reach != current.states:
            current = SFST(
                current.signature,
                reach,
                current.registers,
                current.initial,
                frozenset(t for t in current.delta
                          if t.source in reach and t.target in reach),
            )
    return current, log


def sfst_bisim_partition(T: SFST) -> List[FrozenSet[str]]:
    """Guard-sensitive coarsest partition: transitions distinguish on round,
    guard normal form and normalised updates."""
    skel = T.control_skeleton()
    info = {}
    for tr in T.delta:
        info.setdefault((tr.source, tr.round, tr.target), set()).add(
            (normal_form(tr.guard), normalised_updates(tr.updates))
        )

    def signature(s, v, t):
        return frozenset(info[(s, v, t)])

    return coherence.bisim_partition(skel, signature)


def sfst_bisim_minimize(T: SFST, keep_unreachable: bool = False) -> SFST:
    partition = sfst_bisim_partition(T)
    rename = {}
    for group in partition:
        survivor = min(group)
        for s in group:
            rename[s] = survivor
    out = SFST(
        T.signature,
        frozenset(rename.values()),
        T.registers,
        rename[T.initial],
        frozenset(
            STransition(rename[t.source], t.round, t.guard, t.updates,
                        rename[t.target])
            for t in T.delta
        ),
    )
    if not keep_unreachable:
        reach = out.control_skeleton().reachable_states()
        if reach != out.states:
            out = SFST(
                out.signature, reach, out.registers, out.initial,
                frozenset(t for t in out.delta
                          if t.source in reach and t.target in reach),
            )
    return out
