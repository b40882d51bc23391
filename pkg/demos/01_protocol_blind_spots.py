"""What a protocol-constrained environment cannot see.

A transducer can carry behaviour that no protocol-respecting environment is
able to trigger.  Conventional bisimulation must still distinguish states by
that behaviour; coherent simulation may ignore it, which buys extra merges.
"""

from cohmin import coherence, kernel
from cohmin.fixtures import forked_reader, linear_protocol
from cohmin.frontend import serialize_transducer

machine = forked_reader()
proto = linear_protocol()

print("machine:")
print(serialize_transducer(machine))
print("protocol (one i, then one a, then silence):")
print(serialize_transducer(proto))

# Which states can stand in for which?  (s1, s2) in the relation means s1
# can do everything s2 does, and anything extra s1 enables is dead under
# the protocol after s2's witnesses.
rel = coherence.coherent_simulation(machine, proto)
print("coherent simulation pairs (identity omitted):")
for a, b in rel.sorted_pairs():
    if a != b:
        print(f"  {a} can stand in for {b}")

pairs = coherence.equivalence_pairs(machine, proto)
print("mutually equivalent pairs:", pairs.sorted_pairs())

mini, log = coherence.coherent_minimize(machine, proto)
print(f"\ncoherent minimisation: {len(machine.states)} -> {len(mini.states)} states")
for keep, drop in log:
    print(f"  merge {drop} -> {keep}")

baseline = coherence.bisim_minimize(machine)
print(f"bisimulation baseline:  {len(machine.states)} -> {len(baseline.states)} states")

print("\nthe protocol-restricted languages agree to depth 8:",
      coherence.coherent_equiv_bounded(machine, mini, proto, 8))

# Sanity: the raw languages do NOT agree -- the merges really did add
# behaviour, it is just behaviour the protocol rules out.
from cohmin import algebra
print("raw languages equal:",
      algebra.bounded_language_equal(machine, mini, 8))
