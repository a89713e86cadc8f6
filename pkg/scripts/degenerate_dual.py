"""Show the three constructions failing on the repeated-e1 frame and
succeeding once the canonical dual is used instead."""
import json
import sys

from erasure_duals.erasure import ErasureSet, equivalence_check
from erasure_duals.fixtures import repeated_e1
from erasure_duals.frames import canonical_dual, dual_pair, make_frame

r = int(sys.argv[1]) if len(sys.argv) > 1 else 4
x, z = repeated_e1(r)
frame = make_frame(x)
E = ErasureSet((0,), r + 2)

for label, pair in (("non-canonical dual", dual_pair(frame, z)), ("canonical dual", canonical_dual(frame))):
    rep = equivalence_check(pair, E)
    print(f"== {label}")
    print(json.dumps(rep.to_dict(), indent=2))
