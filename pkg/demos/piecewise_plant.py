"""The four-level piecewise-linear plant, end to end.

1. learn a grammar from a random admissible run and compare it with the
   transition table worked out by hand
2. watch a run whose gain jumps from 2 to 3 twice, once for long and once
   briefly, and see which of the two the distance threshold picks up
3. steer the plant through a word of target levels, then do it again with
   the output knocked off course in the middle
"""
from collections import Counter

from ctlgram.controller import LOWEST_INDEX
from ctlgram.experiments import CONTROL_TARGETS, pw_anomaly, pw_control, pw_grammar
from ctlgram.plants import enumerate_admissible, viable_kernel

g = pw_grammar()
print(f"learned {len(g)} productions, by order {g.counts_by_order()}")
print(f"admissible (y_k-1, y_k, u) triples: {len(enumerate_admissible(2))}")
print(f"states the plant can stay inside forever: {sorted(viable_kernel(2))}")
for p in g:
    print("  ", p)

# --- anomaly
res = pw_anomaly(grammar=g)
rep = res.report
print()
print(f"threshold from a noisy healthy run: {rep.threshold:g}")
print("gain per step (3 marks the fault):")
print("  ", "".join(str(k) for k in res.gains))
print("distance > threshold:")
above = set(rep.flagged_steps())
print("  ", "".join("#" if k in above else "." for k in range(len(res.gains))))
print("flagged intervals:", rep.flags)

# --- control
print()
ct = pw_control(g)
print(f"target word {CONTROL_TARGETS}: {ct.outcome} in {len(ct.steps)} steps")
print("  outputs:", "".join(s.output.label for s in ct.steps))
print("  controls:", "".join(s.control.label for s in ct.steps))

bumped = pw_control(g, overrides={6: 2})
print(f"same word, output knocked to level 2 at step 6: {bumped.outcome} in {len(bumped.steps)} steps")

naive = pw_control(g, tie_break=LOWEST_INDEX)
last = naive.steps[-1]
print(f"breaking ties by control index instead: {naive.outcome} "
      f"(stuck after {len(naive.steps)} steps chasing {last.target.label})")
print("controls used by the default run:", dict(Counter(s.control.label for s in ct.steps)))
