"""
One bit is enough for any grid
==============================

MakeMove covers every grid within twice its number of vertices, from any
start and either memory value. The transient configurations it never
returns to are what let it climb into higher floors.
"""

import math

import numpy as np

from gridpatrol import MakeMove, arrow_diagram, run, verify_patrols

for dims in [(3, 3), (4, 5), (3, 3, 3), (4, 3, 3, 2), (3, 3, 3, 3)]:
    report = verify_patrols(dims, MakeMove())
    print(dims, report.verdict, report.worst_cover_time, "<=", 2 * math.prod(dims))

# how many configurations are recurrent?
d = arrow_diagram((3, 4), MakeMove())
print(len(d.recurrent), "recurrent of", len(d.arrows))

# visits per vertex over a long run on 4x5
trace = run((4, 5), MakeMove(), (1, 1), 0, 400)
counts = np.zeros((4, 5), dtype=int)
for x, y in trace.positions:
    counts[x - 1, y - 1] += 1
print(counts)
