"""Build the weight-5 [[30,4,5]] code and inspect it end to end.

Run with ``python3 demos/weight5_walkthrough.py``.
"""

from tbcode import gf2_core as gf2
from tbcode.code_builder import bpt_locality_constant, build_code, parse_spec
from tbcode.distance import exact_distance
from tbcode.tanner_layout import biplanar_split, build_toric_layout, toric_layout_tuples

spec = parse_spec("l=3 m=5 A=x+z^4 B=x+y^2+z^2")
code = build_code(spec)
print(f"{spec.to_text()}  ->  n={code.n}, k={code.k}")
print(f"rank H_X = {gf2.rank(code.h_x)}, checks commute: {code.commutes()}")

d = exact_distance(code)
print(f"exact distance {d.value}; a minimum-weight logical acts on qubits {d.witness.support()}")
print(f"BPT constant k d^2 / n = {float(bpt_locality_constant(code, d.value)):.3f}")

tuples = toric_layout_tuples(code)
print(f"{len(tuples)} index tuples give a toric layout; the first is {tuples[0]}")
layout = build_toric_layout(code, *tuples[0][:4])
print(f"torus {layout.shape[0]} x {layout.shape[1]}, long-range edge families:")
for (kind, (block, term)), vec in layout.long_range_families().items():
    print(f"  {kind} checks via {block}{term + 1}: vector {vec}")

split = biplanar_split(code)
print(f"two-layer split planar: {split.planar1} and {split.planar2}")
