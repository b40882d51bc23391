"""Transducer and trace-set combinators: intersection, interaction,
projection and composition, plus bounded-depth language comparisons.

The product constructions keep only pairs reachable from the initial pair
by default (``keep_unreachable=True`` preserves the full product; the
number of pruned pairs is attached to the result as ``pruned_pairs``).
"""

from __future__ import annotations

from typing import FrozenSet, Tuple

from . import kernel
from .errors import LabelClash, ResourceLimit, SignatureMismatch
from .kernel import Round, Signature, Trace, TraceSet, Transducer, round_key


def product_state(left: str, right: str) -> str:
    """Canonical rendering of a product state."""
    return f"({left},{right})"


def _restrict_reachable(T: Transducer, keep_unreachable: bool) -> Transducer:
    if keep_unreachable:
        object.__setattr__(T, "pruned_pairs", 0)
        return T
    reach = T.reachable_states()
    pruned = len(T.states) - len(reach)
    out = Transducer(
        T.signature,
        reach,
        T.initial,
        frozenset((s, v, t) for s, v, t in T.delta if s in reach and t in reach),
    )
    object.__setattr__(out, "pruned_pairs", pruned)
    return out


def intersect(T: Transducer, U: Transducer, keep_unreachable: bool = False) -> Transducer:
    """Synchronous product on identical signatures: a joint step needs the
    same round on both sides."""
    if T.signature != U.signature:
        raise SignatureMismatch("intersection needs identical signatures")
    states = frozenset(product_state(a, b) for a in T.states for b in U.states)
    delta = set()
    for (s1, v, s2) in T.delta:
        for (u1, w, u2) in U.delta:
            if v == w:
                delta.add((product_state(s1, u1), v, product_state(s2, u2)))
    out = Transducer(
        T.signature, states, product_state(T.initial, U.initial), frozenset(delta)
    )
    return _restrict_reachable(out, keep_unreachable)


def _merge_signatures(T: Transducer, U: Transducer) -> Signature:
    """Disjoint-union-by-name; on shared labels an output polarity wins."""
    outputs = T.signature.outputs | U.signature.outputs
    inputs = (T.signature.inputs | U.signature.inputs) - outputs
    return Signature(inputs, outputs)


def interact(
    T: Transducer,
    U: Transducer,
    keep_unreachable: bool = False,
    strict_polarity: bool = False,
) -> Transducer:
    """Joint stepping over the union universe.

    The shared part is the intersection of the two label universes; a joint
    round V steps T on its T-side projection and U on its U-side projection.
    Candidate rounds come from transition pairs whose shared projections
    agree (never from enumerating the full powerset).  There is no implicit
    idling: a side that should stutter needs its own empty-round transition.
    """
    ut, uu = T.signature.universe, U.signature.universe
    shared = ut & uu
    if strict_polarity:
        clash = (T.signature.inputs & U.signature.outputs) | (
            T.signature.outputs & U.signature.inputs
        )
        if clash:
            raise LabelClash(f"conflicting polarity on shared labels: {sorted(clash)}")
    sig = _merge_signatures(T, U)
    states = frozenset(product_state(a, b) for a in T.states for b in U.states)
    delta = set()
    for (s1, v, s2) in T.delta:
        vb = v & shared
        for (u1, w, u2) in U.delta:
            if w & shared == vb:
                delta.add((product_state(s1, u1), v | w, product_state(s2, u2)))
    out = Transducer(
        sig, states, product_state(T.initial, U.initial), frozenset(delta)
    )
    return _restrict_reachable(out, keep_unreachable)


def project(T: Transducer, keep: Signature) -> Transducer:
    """Replace every transition round by its projection onto ``keep``."""
    if not keep.is_sub_signature_of(T.signature):
        raise SignatureMismatch("projection target is not a sub-signature")
    u = keep.universe
    delta = frozenset((s, v & u, t) for s, v, t in T.delta)
    return Transducer(keep, T.states, T.initial, delta)


def compose(
    T: Transducer,
    U: Transducer,
    keep_unreachable: bool = False,
    strict_polarity: bool = False,
) -> Transducer:
    """Interaction followed by hiding of the shared labels."""
    shared = T.signature.universe & U.signature.universe
    joint = interact(T, U, keep_unreachable, strict_polarity)
    keep = joint.signature.restrict(joint.signature.universe - shared)
    out = project(joint, keep)
    object.__setattr__(out, "pruned_pairs", getattr(joint, "pruned_pairs", 0))
    return out


# -- trace-set combinators (independent oracles) ---------------------------


class _TrieNode:
    __slots__ = ("children", "member")

    def __init__(self):
        self.children = {}
        self.member = False


def _build_trie(ts: TraceSet) -> _TrieNode:
    root = _TrieNode()
    for t in ts.traces:
        node = root
        for v in t:
            node = node.children.setdefault(v, _TrieNode())
        node.member = True
    return root


def traceset_interact(
    theta: TraceSet, theta2: TraceSet, cap: int = kernel.DEFAULT_TRACE_CAP
) -> TraceSet:
    """All traces over the union universe whose side projections are members.

    Projection preserves length, so the maximum operand length bounds the
    result exactly; enumeration walks the two prefix tries in lockstep.
    """
    shared = theta.signature.universe & theta2.signature.universe
    outputs = theta.signature.outputs | theta2.signature.outputs
    sig = Signature(
        (theta.signature.inputs | theta2.signature.inputs) - outputs, outputs
    )
    bound = max(theta.max_length(), theta2.max_length())
    ra, rb = _build_trie(theta), _build_trie(theta2)
    found = set()
    count = 0
    frontier = [((), ra, rb)]
    for _ in range(bound + 1):
        nxt = []
        for trace, na, nb in frontier:
            if na.member and nb.member:
                found.add(trace)
                count += 1
                if count > cap:
                    raise ResourceLimit(f"trace interaction exceeded cap of {cap}")
            if len(trace) == bound:
                continue
            joint = {}
            for va, ca in na.children.items():
                for vb, cb in nb.children.items():
                    if va & shared == vb & shared:
                        joint.setdefault(va | vb, []).append((ca, cb))
            for v, pairs in joint.items():
                for ca, cb in pairs:
                    nxt.append((trace + (v,), ca, cb))
        # several (ca, cb) pairs can spell the same joint trace; collapse them
        merged = {}
        for trace, ca, cb in nxt:
            merged.setdefault(trace, []).append((ca, cb))
        frontier = []
        for trace, pairs in merged.items():
            union_a = _merge_nodes([a for a, _ in pairs])
            union_b = _merge_nodes([b for _, b in pairs])
            frontier.append((trace, union_a, union_b))
    return TraceSet(sig, frozenset(found))


def _merge_nodes(nodes):
    if len(nodes) == 1:
        return nodes[0]
    out = _TrieNode()
    out.member = any(n.member for n in nodes)
    keys = set()
    for n in nodes:
        keys.update(n.children.keys())
    for k in keys:
        out.children[k] = _merge_nodes([n.children[k] for n in nodes if k in n.children])
    return out


def traceset_compose(
    theta: TraceSet, theta2: TraceSet, cap: int = kernel.DEFAULT_TRACE_CAP
) -> TraceSet:
    """Interaction followed by hiding of the shared labels."""
    shared = theta.signature.universe & theta2.signature.universe
    joint = traceset_interact(theta, theta2, cap)
    keep = joint.signature.restrict(joint.signature.universe - shared)
    return joint.project(keep)


# -- bounded-depth language comparisons ------------------------------------


def bounded_language_equal(T: Transducer, U: Transducer, k: int) -> bool:
    """Do T and U accept exactly the same traces of length <= k?

    Walks pairs of reachable state subsets; two machines differ at depth
    d+1 exactly when some jointly reached subset pair enables different
    round sets.
    """
    frontier = {(frozenset({T.initial}), frozenset({U.initial}))}
    seen = set(frontier)
    for _ in range(k):
        nxt = set()
        for sa, sb in frontier:
            ea = {v for s in sa for v in T.out(s)}
            eb = {v for s in sb for v in U.out(s)}
            if ea != eb:
                return False
            for v in ea:
                pair = (T.step_set(sa, v), U.step_set(sb, v))
                if pair not in seen:
                    seen.add(pair)
                    nxt.add(pair)
        frontier = nxt
        if not frontier:
            return True
    return True


def bounded_language_subset(T: Transducer, U: Transducer, k: int) -> bool:
    """Is every trace of T with length <= k also a trace of U?"""
    frontier = {(frozenset({T.initial}), frozenset({U.initial}))}
    seen = set(frontier)
    for _ in range(k):
        nxt = set()
        for sa, sb in frontier:
            for v in {v for s in sa for v in T.out(s)}:
                ta = T.step_set(sa, v)
                tb = U.step_set(sb, v)
                if ta and not tb:
                    return False
                pair = (ta, tb)
                if pair not in seen:
                    seen.add(pair)
                    nxt.add(pair)
        frontier = nxt
        if not frontier:
            return True
    return True


def determinize(T: Transducer) -> Transducer:
    """Subset construction over rounds (labels stay whole rounds)."""
    initial = frozenset({T.initial})
    names = {initial: _subset_name(initial)}
    frontier = [initial]
    delta = set()
    while frontier:
        cur = frontier.pop()
        rounds = {v for s in cur for v in T.out(s)}
        for v in sorted(rounds, key=round_key):
            succ = T.step_set(cur, v)
            if succ not in names:
                names[succ] = _subset_name(succ)
                frontier.append(succ)
            delta.add((names[cur], v, names[succ]))
    return Transducer(
        T.signature, frozenset(names.values()), names[initial], frozenset(delta)
    )


def _subset_name(states: FrozenSet[str]) -> str:
    return "{" + ",".join(sorted(states)) + "}"
