"""A simulated field-oriented induction motor drive.

The speed loop is left open: the q-axis current is a sum of three sines
and the grammar learns how speed symbols follow each other under it.
"""
import numpy as np

from ctlgram.experiments import (
    generalization_locality, interpolation_gain, motor_broken_bar, motor_recognition,
)

rec = motor_recognition()
print(f"grammar from 100 s of training: {len(rec.grammar)} productions {rec.grammar.counts_by_order()}")
print(f"teacher-forced on a different excitation: {len(rec.covered)} of {len(rec.trace)} steps covered, "
      f"{rec.within_one:.1%} of those within one speed bin")

off, on, _ = interpolation_gain()
print()
print("grammar from the first half of a run, recognizing all of it")
print(f"  steps with no prediction: {sum(p.output is None for p in off)} without interpolation, "
      f"{sum(p.output is None for p in on)} with")

bb = motor_broken_bar()
rep = bb.report
t_above = bb.times[rep.flagged]
print()
print(f"rotor time constant modulated from {bb.anomaly.t_start} s to {bb.anomaly.t_end} s")
print(f"  threshold {rep.threshold:g}, peak distance {rep.distance.max():g}")
print(f"  above threshold from {t_above.min():.2f} s to {t_above.max():.2f} s")
# a coarse strip chart, one character per 0.1 s
cols = np.arange(0, bb.times[-1], 0.1)
row = "".join("#" if rep.flagged[(bb.times >= c) & (bb.times < c + 0.1)].any() else "." for c in cols)
print("  ", row)

loc = generalization_locality()
neg = set(loc.negative.tolist())
centers = loc.trace.terminals.centers
hits = sum(1 for k in neg if loc.predictions[k].output == loc.trace.outputs[k])
reverse = sum(1 for p in loc.predictions if p.output is not None and centers[p.output.index] < 0)
print()
print("trained on forward rotation only, tested on a run that reverses")
print(f"  {len(neg)} steps at negative speed, {hits} predicted correctly, "
      f"{reverse} predictions of any negative speed")
