import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cohmin import kernel
from cohmin.errors import MissingInitial, UnknownLabel, UnknownState
from cohmin.fixtures import forked_reader, two_phase_cycle
from cohmin.kernel import EMPTY_TRACE, Signature, mkround

from helpers import SIG2, random_transducer

R = mkround
T1 = two_phase_cycle()
FORK = forked_reader()


class TestValidate:
    def test_minimal_legal_input(self):
        desc = {
            "inputs": ["a"], "outputs": ["b"], "states": ["s0", "s1"],
            "initial": "s0",
            "trans": [("s0", {"a"}, "s1"), ("s1", {"b"}, "s0")],
        }
        T = kernel.validate(desc)
        assert T == T1
        assert kernel.violations(desc) == []

    def test_unknown_label(self):
        desc = {
            "inputs": ["a"], "outputs": ["b"], "states": ["s0"],
            "initial": "s0", "trans": [("s0", {"c"}, "s0")],
        }
        with pytest.raises(UnknownLabel) as err:
            kernel.validate(desc)
        assert err.value.label == "c"
        assert any(isinstance(v, UnknownLabel) for v in kernel.violations(desc))

    def test_missing_initial(self):
        desc = {
            "inputs": ["a"], "outputs": [], "states": ["s0"],
            "initial": "S9", "trans": [],
        }
        with pytest.raises(MissingInitial):
            kernel.validate(desc)

    def test_endpoint_not_in_states(self):
        desc = {
            "inputs": ["a"], "outputs": [], "states": ["s0"],
            "initial": "s0", "trans": [("s0", {"a"}, "nowhere")],
        }
        assert any(isinstance(v, UnknownState) for v in kernel.violations(desc))


class TestStep:
    def test_step_on_enabled_round(self):
        assert kernel.step(T1, "s0", R({"a"})) == {"s1"}

    def test_step_on_missing_round(self):
        assert kernel.step(T1, "s0", R({"b"})) == frozenset()

    def test_step_nondeterministic(self):
        assert kernel.step(FORK, "r0", R({"i"})) == {"P", "Q"}

    def test_unknown_state(self):
        with pytest.raises(UnknownState):
            kernel.step(T1, "zz", R({"a"}))


class TestRun:
    def test_empty_trace_stays_initial(self):
        assert kernel.run(T1, EMPTY_TRACE) == {"s0"}

    def test_two_steps(self):
        assert kernel.run(T1, (R({"a"}), R({"b"}))) == {"s0"}

    def test_dead_round(self):
        assert kernel.run(T1, (R({"b"}),)) == frozenset()


class TestAccepts:
    def test_epsilon_always_accepted(self):
        assert kernel.accepts(T1, EMPTY_TRACE)

    def test_single_step(self):
        assert kernel.accepts(T1, (R({"a"}),))

    def test_rejected(self):
        assert not kernel.accepts(T1, (R({"a"}), R({"a"})))


class TestTracesUpto:
    def test_depth_zero(self):
        assert kernel.traces_upto(T1, 0).traces == {EMPTY_TRACE}

    def test_depth_two(self):
        got = kernel.traces_upto(T1, 2).traces
        assert got == {EMPTY_TRACE, (R({"a"}),), (R({"a"}), R({"b"}))}

    def test_monotone_in_depth(self):
        rng = random.Random(11)
        for _ in range(20):
            T = random_transducer(rng, SIG2, 4, 8)
            k = rng.randint(0, 3)
            assert kernel.traces_upto(T, k).traces <= kernel.traces_upto(T, k + 1).traces

    def test_stable_ordering(self):
        a = kernel.traces_upto(FORK, 3).sorted_traces()
        b = kernel.traces_upto(FORK, 3).sorted_traces()
        assert a == b

    def test_cap(self):
        with pytest.raises(kernel.ResourceLimit):
            kernel.traces_upto(FORK, 3, cap=2)


class TestWitnessTraces:
    def test_initial_state_has_epsilon(self):
        assert kernel.witness_traces_upto(T1, "s0", 0).traces == {EMPTY_TRACE}

    def test_cycle_witnesses(self):
        got = kernel.witness_traces_upto(T1, "s1", 3).traces
        assert got == {(R({"a"}),), (R({"a"}), R({"b"}), R({"a"}))}

    def test_non_initial_at_depth_zero(self):
        assert kernel.witness_traces_upto(T1, "s1", 0).traces == frozenset()


class TestDualize:
    def test_swap(self):
        assert kernel.dualize(Signature(frozenset({"a"}), frozenset({"b"}))) == \
            Signature(frozenset({"b"}), frozenset({"a"}))

    def test_empty(self):
        empty = Signature(frozenset(), frozenset())
        assert kernel.dualize(empty) == empty

    def test_involution(self):
        sig = Signature(frozenset({"a", "c"}), frozenset({"b"}))
        assert kernel.dualize(kernel.dualize(sig)) == sig


class TestProjectTrace:
    SIG = Signature(frozenset({"a", "c"}), frozenset({"b"}))

    def test_apply_definition(self):
        keep = self.SIG.restrict({"a", "c"})
        assert kernel.project_trace((R({"a", "b"}), R({"c"})), keep) == \
            (R({"a"}), R({"c"}))

    def test_identity_on_full_signature(self):
        t = (R({"a", "b"}), R({"c"}))
        assert kernel.project_trace(t, self.SIG) == t

    def test_round_emptied_not_removed(self):
        keep = self.SIG.restrict({"a"})
        assert kernel.project_trace((R({"b"}),), keep) == (frozenset(),)

    def test_not_a_sub_signature(self):
        other = Signature(frozenset({"zz"}), frozenset())
        with pytest.raises(kernel.SignatureMismatch):
            kernel.project_trace((R({"a"}),), other, within=self.SIG)


class TestInvariants:
    def test_prefix_closure_random(self):
        rng = random.Random(23)
        for _ in range(30):
            T = random_transducer(rng, SIG2, 5, 9)
            traces = kernel.traces_upto(T, rng.randint(0, 8) % 5 + 2).traces
            for t in traces:
                if t:
                    assert t[:-1] in traces

    def test_epsilon_always_in_language(self):
        rng = random.Random(5)
        for _ in range(10):
            T = random_transducer(rng, SIG2, 5, 9)
            assert kernel.accepts(T, EMPTY_TRACE)

    def test_run_recurrence(self):
        rng = random.Random(7)
        for _ in range(25):
            T = random_transducer(rng, SIG2, 5, 9)
            for t, _ in [(x, None) for x in kernel.traces_upto(T, 3).traces]:
                for v in [R(set()), R({"x"}), R({"y"}), R({"x", "y"})]:
                    lhs = kernel.run(T, t + (v,))
                    rhs = frozenset().union(
                        *(kernel.step(T, s, v) for s in kernel.run(T, t))
                    ) if kernel.run(T, t) else frozenset()
                    assert lhs == rhs

    @given(st.lists(st.sets(st.sampled_from(["a", "b", "c"])), max_size=6))
    @settings(max_examples=60, deadline=None)
    def test_projection_preserves_length(self, rounds):
        sig = Signature(frozenset({"a"}), frozenset({"b", "c"}))
        t = tuple(mkround(v) for v in rounds)
        assert len(kernel.project_trace(t, sig.restrict({"a", "b"}))) == len(t)
