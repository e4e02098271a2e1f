"""Six observations, four productions.

Walks the learner through the short hand-checkable trace and prints every
decision it makes, then the grammar it ends with.
"""
from ctlgram.experiments import worked_alphabets, worked_example, worked_trace
from ctlgram.grammar import serialize

T, N = worked_alphabets()
tr = worked_trace()
print("controls:", "".join(s.label for s in tr.controls))
print("outputs: ", "".join(s.label for s in tr.outputs))
print()

g, events = worked_example()
for e in events:
    print(e)

print()
print(serialize(g))
