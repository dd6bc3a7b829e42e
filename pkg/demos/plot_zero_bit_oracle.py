"""
When does a memoryless patroller exist?
========================================

Compare the closed-form test with an exhaustive search over every
memoryless table for small 2-D grids, range 1.
"""

import numpy as np

from gridpatrol import brute_force_0bit_search, theorem1_check

sizes = range(2, 6)
closed = np.zeros((4, 4), dtype=int)
search = np.zeros((4, 4), dtype=int)
for i, a in enumerate(sizes):
    for j, b in enumerate(sizes):
        closed[i, j] = theorem1_check((a, b), 1).patrollable_0bit
        search[i, j] = brute_force_0bit_search((a, b), 1) is not None

# rows and columns are n1, n2 = 2..5
print(closed)
print(np.array_equal(closed, search))

# 3x3 fails for a parity reason: nine sensing regions, an odd cycle is impossible
print(theorem1_check((3, 3), 1).to_dict())

# a found table can be saved and reloaded
policy = brute_force_0bit_search((2, 3), 1)
print(policy.to_text())
