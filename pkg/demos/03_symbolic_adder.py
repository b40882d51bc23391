"""Symbolic transducers: guarded transitions over registers.

The adder reads an integer twice and emits the sum, but only when it is
positive.  Register machines stay small where explicit ones explode; the
explicit expansion over a finite value domain is the cross-check oracle.
"""

from cohmin.fixtures import adder
from cohmin.frontend import serialize_sfst
from cohmin.symbolic import (
    Bin,
    IntLit,
    Reg,
    ValuedRound,
    expand,
    expand_valued_trace,
    guard_equiv,
    sfst_run,
)

machine = adder()
print(serialize_sfst(machine))

VR = ValuedRound.of
good = [VR({"x": 2}), VR({"x": 3}), VR({"r": 5})]
bad = [VR({"x": 2}), VR({"x": -3}), VR({"r": -1})]
print("run x=2, x=3, r=5  ->", sfst_run(machine, good) or "rejected")
print("run x=2, x=-3, r=-1 ->", sfst_run(machine, bad) or "rejected")

# Two ways to compare guards: by normal form, or on a finite test domain.
a = Bin(">", Bin("+", Reg("y"), Reg("z")), IntLit(0))
b = Bin(">", Bin("+", Reg("z"), Reg("y")), IntLit(0))
c = Bin(">=", Bin("+", Reg("y"), Reg("z")), IntLit(1))
print("\ny+z>0 vs z+y>0, structural:      ", guard_equiv(a, b, "structural"))
print("y+z>0 vs y+z>=1, structural:     ", guard_equiv(a, c, "structural"))
print("y+z>0 vs y+z>=1, bounded-semantic:", guard_equiv(a, c, "bounded-semantic"))

# The expansion interprets registers explicitly over [-2..2]; acceptance
# must agree with sfst_run for every in-domain trace.
explicit = expand(machine, -2, 2)
print(f"\nexplicit expansion over [-2..2]: {len(explicit.states)} states,"
      f" {len(explicit.delta)} transitions")
for trace in (good, bad):
    agrees = explicit.accepts(expand_valued_trace(machine, trace)) == \
        bool(sfst_run(machine, trace))
    print("expansion agrees on", [r.render() for r in trace], "->", agrees)
