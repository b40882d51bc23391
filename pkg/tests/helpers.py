"""Shared test machinery: seeded generators and independent oracles.

The oracles here deliberately avoid the library's own algorithms: the
relation oracle enumerates every candidate relation and unions the coherent
ones; the regex oracle decides membership through derivatives.
"""

from __future__ import annotations

import itertools
import random

import numpy as np

from cohmin import coherence
from cohmin.kernel import Signature, Transducer, mkround
from cohmin.protocol import Alt, Cat, Lit, Star


def all_rounds(sig: Signature):
    labels = sorted(sig.universe)
    out = [frozenset()]
    for lab in labels:
        out += [v | {lab} for v in out]
    return sorted(out, key=lambda v: (len(v), tuple(sorted(v))))


def random_transducer(rng: random.Random, sig: Signature, max_states: int,
                      max_trans: int, prefix: str = "s",
                      deterministic: bool = False) -> Transducer:
    n = rng.randint(1, max_states)
    states = [f"{prefix}{i}" for i in range(n)]
    rounds = all_rounds(sig)
    delta = set()
    used = set()
    for _ in range(rng.randint(0, max_trans)):
        src = rng.choice(states)
        v = rng.choice(rounds)
        if deterministic:
            if (src, v) in used:
                continue
            used.add((src, v))
        delta.add((src, v, rng.choice(states)))
    return Transducer(sig, frozenset(states), states[0], frozenset(delta))


SIG2 = Signature(frozenset({"x"}), frozenset({"y"}))
SIG3 = Signature(frozenset({"x"}), frozenset({"y", "z"}))


def linear_protocol_shaped(sig: Signature) -> Transducer:
    """A two-step corridor protocol like the forked-reader one."""
    labels = sorted(sig.universe)
    first, second = labels[0], labels[-1]
    return Transducer(
        sig,
        frozenset({"X0", "X1", "X2"}),
        "X0",
        frozenset([
            ("X0", mkround({first}), "X1"),
            ("X1", mkround({second}), "X2"),
        ]),
    )


# -- brute-force relation oracle ---------------------------------------------


def bruteforce_coherent_union(T: Transducer, P: Transducer):
    """Union of every relation satisfying the two coherence conditions.

    Enumerates all subsets of the pairs passing the (relation-independent)
    protocol-escape condition and keeps those whose matching condition is
    self-supporting.  Exponential: callers keep T at <= 4 states.
    """
    states = sorted(T.states)
    n = len(states)
    idx = {s: i for i, s in enumerate(states)}

    def pid(a, b):
        return idx[a] * n + idx[b]

    ext = coherence._extendable_rounds(T, P)
    m2_bits = []
    for s1 in states:
        for s2 in states:
            extra = T.enabled(s1) - T.enabled(s2)
            if not any(v in ext[s2] for v in extra):
                m2_bits.append(pid(s1, s2))
    trans = {s: [(v, t) for v, ts in T.out(s).items() for t in ts] for s in states}
    requirements = []
    for s1 in states:
        for s2 in states:
            masks = []
            for v, t2 in trans[s2]:
                m = 0
                for w, t1 in trans[s1]:
                    if w == v:
                        m |= 1 << pid(t1, t2)
                masks.append(m)
            if masks:
                requirements.append((pid(s1, s2), masks))

    k = len(m2_bits)
    if k > 22:
        raise ValueError(f"instance too large for enumeration: {k} candidate pairs")
    subsets = np.arange(1 << k, dtype=np.int64)
    relations = np.zeros(1 << k, dtype=np.int64)
    for j, b in enumerate(m2_bits):
        relations |= ((subsets >> j) & 1) << b
    ok = np.ones(1 << k, dtype=bool)
    for pair_bit, masks in requirements:
        has_pair = ((relations >> pair_bit) & 1).astype(bool)
        for m in masks:
            ok &= ~(has_pair & ((relations & m) == 0))
    if not ok.any():
        return frozenset()
    union = int(np.bitwise_or.reduce(relations[ok]))
    return frozenset(
        (states[i // n], states[i % n])
        for i in range(n * n)
        if (union >> i) & 1
    )


# -- regex derivative oracle ---------------------------------------------------

EMPTY = ("empty",)
EPSILON = ("epsilon",)


def _cat(a, b):
    if a is EMPTY or b is EMPTY:
        return EMPTY
    if a is EPSILON:
        return b
    if b is EPSILON:
        return a
    return Cat((a, b))


def _alt(a, b):
    if a is EMPTY:
        return b
    if b is EMPTY:
        return a
    if a == b:
        return a
    return Alt((a, b))


def _nullable(r) -> bool:
    if r is EMPTY:
        return False
    if r is EPSILON:
        return True
    if isinstance(r, Lit):
        return False
    if isinstance(r, Star):
        return True
    if isinstance(r, Cat):
        return all(_nullable(x) for x in r.items)
    if isinstance(r, Alt):
        return any(_nullable(x) for x in r.items)
    raise TypeError(r)


def _derivative(r, label):
    if r is EMPTY or r is EPSILON:
        return EMPTY
    if isinstance(r, Lit):
        return EPSILON if r.label == label else EMPTY
    if isinstance(r, Star):
        return _cat(_derivative(r.item, label), r)
    if isinstance(r, Alt):
        out = EMPTY
        for x in r.items:
            out = _alt(out, _derivative(x, label))
        return out
    if isinstance(r, Cat):
        head, tail = r.items[0], r.items[1:]
        rest = tail[0] if len(tail) == 1 else Cat(tail)
        out = _cat(_derivative(head, label), rest)
        if _nullable(head):
            out = _alt(out, _derivative(rest, label))
        return out
    raise TypeError(r)


def regex_prefix_member(r, labels) -> bool:
    """Is the label sequence a prefix of some word of the regex language?

    The smart constructors collapse the empty language, so a trace is a
    member of the prefix closure exactly when its derivative is not EMPTY.
    """
    cur = r
    for lab in labels:
        cur = _derivative(cur, lab)
        if cur is EMPTY:
            return False
    return True


def random_regex(rng: random.Random, labels, depth: int = 3):
    if depth == 0 or rng.random() < 0.3:
        return Lit(rng.choice(labels))
    kind = rng.choice(["cat", "alt", "star", "lit"])
    if kind == "lit":
        return Lit(rng.choice(labels))
    if kind == "star":
        return Star(random_regex(rng, labels, depth - 1))
    items = tuple(
        random_regex(rng, labels, depth - 1) for _ in range(rng.randint(2, 3))
    )
    return Cat(items) if kind == "cat" else Alt(items)
