"""Standard machines used across tests, demos and the docs.

The interesting ones are deliberately nondeterministic: a transducer can
carry behaviour that a protocol-respecting environment can never trigger,
and coherent minimisation is exactly the tool that folds such behaviour
away while conventional bisimulation cannot.
"""

from __future__ import annotations

from typing import Tuple

from .kernel import Signature, Transducer, mkround
from .protocol import compile_regex
from .symbolic import (
    SFST,
    Bin,
    BoolLit,
    IntLit,
    Not,
    Port,
    Reg,
    STransition,
    TRUE,
    Update,
)


def _t(src, labels, tgt):
    return (src, mkround(labels), tgt)


def two_phase_cycle() -> Transducer:
    """Minimal request/acknowledge loop: reads ``a``, answers ``b``."""
    sig = Signature(frozenset({"a"}), frozenset({"b"}))
    return Transducer(
        sig,
        frozenset({"s0", "s1"}),
        "s0",
        frozenset([_t("s0", {"a"}, "s1"), _t("s1", {"b"}, "s0")]),
    )


def forked_reader() -> Transducer:
    """A nondeterministic reader whose two branches differ only in ways a
    two-step session can never observe.

    After ``i`` the machine forks; the ``P`` branch additionally forks on
    ``a`` into a branch that answers ``b`` and one that stops.  Under
    :func:`linear_protocol` the fork is invisible, so coherent minimisation
    reaches four states while bisimulation stops at five.
    """
    sig = Signature(frozenset({"i", "a"}), frozenset({"b"}))
    return Transducer(
        sig,
        frozenset({"r0", "P", "Q", "p1", "p2", "q1", "p3", "q3"}),
        "r0",
        frozenset([
            _t("r0", {"i"}, "P"),
            _t("r0", {"i"}, "Q"),
            _t("P", {"a"}, "p1"),
            _t("P", {"a"}, "p2"),
            _t("Q", {"a"}, "q1"),
            _t("p1", {"b"}, "p3"),
            _t("q1", {"b"}, "q3"),
        ]),
    )


def linear_protocol() -> Transducer:
    """Two-step session: one ``i`` then one ``a``, nothing afterwards."""
    sig = Signature(frozenset({"i", "a"}), frozenset({"b"}))
    return Transducer(
        sig,
        frozenset({"X0", "X1", "X2"}),
        "X0",
        frozenset([_t("X0", {"i"}, "X1"), _t("X1", {"a"}, "X2")]),
    )


# -- the two-display program -------------------------------------------------


def display_protocol() -> Transducer:
    """Session discipline of a program driving two external display calls.

    The environment starts the program with ``q5``; the program either
    answers ``d5`` or calls one of the displays (``r2``/``r4``).  A called
    display may interrogate its argument (``q1``/``q3``, answered by
    ``n1``/``n3``) any number of times before returning (``d2``/``d4``).
    The whole exchange may repeat.
    """
    sig = Signature(
        frozenset({"q5", "d2", "q1", "d4", "q3"}),
        frozenset({"d5", "r2", "r4", "n1", "n3"}),
    )
    return Transducer(
        sig,
        frozenset({"idle", "run", "d1_call", "d1_arg", "d2_call", "d2_arg"}),
        "idle",
        frozenset([
            _t("idle", {"q5"}, "run"),
            _t("run", {"d5"}, "idle"),
            _t("run", {"r2"}, "d1_call"),
            _t("run", {"r4"}, "d2_call"),
            _t("d1_call", {"d2"}, "run"),
            _t("d1_call", {"q1"}, "d1_arg"),
            _t("d1_arg", {"n1"}, "d1_call"),
            _t("d2_call", {"d4"}, "run"),
            _t("d2_call", {"q3"}, "d2_arg"),
            _t("d2_arg", {"n3"}, "d2_call"),
        ]),
    )


def display_legal_trace():
    """A complete run: both displays called once, one argument query each."""
    moves = ["q5", "r2", "q1", "n1", "d2", "r4", "q3", "n3", "d4", "d5"]
    return tuple(mkround({m}) for m in moves)


def display_attack_trace():
    """display2 reports termination without ever having been called."""
    return tuple(mkround({m}) for m in ["q5", "r2", "d4"])


# -- the two-read adder ------------------------------------------------------


def adder() -> SFST:
    """Reads an integer twice from ``x`` and emits the sum on ``r``, but
    only when it is positive."""
    sig = Signature(frozenset({"x"}), frozenset({"r"}))
    y_plus_z = Bin("+", Reg("y"), Reg("z"))
    return SFST(
        sig,
        frozenset({"A", "B", "C"}),
        frozenset({"y", "z"}),
        "A",
        frozenset([
            STransition("A", mkround({"x"}), TRUE,
                        frozenset({Update("y", Port("x"))}), "B"),
            STransition("B", mkround({"x"}), TRUE,
                        frozenset({Update("z", Port("x"))}), "C"),
            STransition("C", mkround({"r"}),
                        Bin(">", y_plus_z, IntLit(0)),
                        frozenset({Update("r", y_plus_z)}), "A"),
        ]),
    )


# -- the iterator-map circuit -------------------------------------------------

ITERATOR_MAP_REGEX = (
    "(r (q_more b_more + q_f1 (q_f2 m_f2)* m_f1 + r_init d_init"
    " + r_next d_next + w_l ok_l + q_v m_v)* d)*"
)

_IM_INPUTS = frozenset(
    {"r", "b_more", "q_f2", "m_f1", "d_init", "d_next", "ok_l", "m_v"}
)
_IM_OUTPUTS = frozenset(
    {"d", "q_more", "q_f1", "m_f2", "r_init", "r_next", "w_l", "q_v"}
)


def iterator_map() -> Tuple[SFST, Transducer]:
    """A compiled iterate-and-map circuit together with its protocol.

    The program initialises a cursor, then loops: poll for more elements
    (``q_more``/``b_more``), feed the current value through an external
    function (``q_f1`` .. ``m_f1``), write the result back (``w_l``/
    ``ok_l``) and advance (``r_next``/``d_next``).  The circuit is the
    composition of reactive sub-blocks, so it has thirteen control states,
    five of which are interchangeable wait hubs (0, B, H, J, L) that accept
    every incoming pulse; pulses that the session discipline rules out at a
    hub fall into per-hub hazard paths (the dead latch ``I``, or the shadow
    poll-wait ``F``).  Those hazard paths are what a protocol-respecting
    environment can never see: coherent minimisation folds the machine to
    seven states, while conventional bisimulation only merges the two
    identical poll states ``C`` and ``M``.
    """
    sig = Signature(_IM_INPUTS, _IM_OUTPUTS)
    m_from_b = frozenset({Update("m", Port("b_more"))})
    t_from_mv = frozenset({Update("t", Port("m_v"))})
    u_from_mf1 = frozenset({Update("u", Port("m_f1"))})
    emit_mf2 = frozenset({Update("m_f2", Reg("t"))})
    emit_wl = frozenset({Update("w_l", Reg("u"))})
    none = frozenset()

    def tr(src, labels, tgt, updates=none, guard=TRUE):
        return STransition(src, mkround(labels), guard, updates, tgt)

    delta = []
    # wait hubs: every input pulse is accepted; outputs can be driven too
    for hub, poll_wait in [("0", "D"), ("B", "F"), ("H", "D"),
                           ("J", "F"), ("L", "D")]:
        delta += [
            tr(hub, {"r"}, "A"),
            tr(hub, {"d_init"}, "C"),
            tr(hub, {"d_next"}, "M"),
            tr(hub, {"ok_l"}, "L"),
            tr(hub, {"m_v"}, "H", t_from_mv),
            tr(hub, {"b_more"}, "E", m_from_b),
            tr(hub, {"q_f2"}, poll_wait),
            tr(hub, {"m_f1"}, "0", u_from_mf1),
            tr(hub, {"q_v"}, "H"),
            tr(hub, {"m_f2"}, "G", emit_mf2),
            tr(hub, {"w_l"}, "J", emit_wl),
            tr(hub, {"r_next"}, "L"),
        ]
    # per-hub hazard edges into the dead latch
    delta += [
        tr("B", {"m_f1"}, "I", u_from_mf1),
        tr("H", {"q_f2"}, "I"),
        tr("J", {"b_more"}, "I", m_from_b),
        tr("L", {"b_more"}, "I", m_from_b),
        tr("L", {"m_f1"}, "I", u_from_mf1),
    ]
    # poll-wait states: latch the flag; a stray return or ack derails
    for s in ("D", "F"):
        delta += [
            tr(s, {"b_more"}, "E", m_from_b),
            tr(s, {"m_f1"}, "0", u_from_mf1),
            tr(s, {"ok_l"}, "I"),
        ]
    delta.append(tr("F", {"m_f1"}, "I", u_from_mf1))
    # the two poll states (entry check and loop check)
    delta += [tr("C", {"q_more"}, "D"), tr("M", {"q_more"}, "D")]
    # cursor start, loop branch, function-call wait
    m_is_zero = Bin("=", Reg("m"), IntLit(0))
    delta += [
        tr("A", {"r_init"}, "B"),
        tr("E", {"q_f1"}, "G", guard=Not(m_is_zero)),
        tr("E", {"d"}, "0", guard=m_is_zero),
        tr("G", {"q_f2"}, "H"),
        tr("G", {"m_f1"}, "J", u_from_mf1),
    ]
    machine = SFST(
        sig,
        frozenset("0ABCDEFGHIJLM"),
        frozenset({"m", "t", "u"}),
        "0",
        frozenset(delta),
    )
    return machine, compile_regex(ITERATOR_MAP_REGEX, sig)
