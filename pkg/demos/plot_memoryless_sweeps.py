"""
Memoryless sweeps on 5x3x3x2 and 7x5x5x2
=========================================

A memoryless agent with sensing range 1 patrols the 5x3x3x2 grid by
following one Hamiltonian cycle. With range 2 the same idea covers 7x5x5x2,
whose two long axes are too big for range 1.
"""

from gridpatrol import MemorylessV1, MemorylessVgt1, induced_cycle_check, run
from gridpatrol import render, theorem1_check

# the characterisation says both grids admit a 0-bit patroller
for dims, V in [((5, 3, 3, 2), 1), ((7, 5, 5, 2), 2)]:
    print(dims, V, theorem1_check(dims, V).to_dict())

# walk one orbit from the corner and confirm it closes after exactly N steps
dims = (5, 3, 3, 2)
trace = run(dims, MemorylessV1(dims), (1, 1, 1, 1), 0, 91)
print(induced_cycle_check(trace, dims))

dims = (7, 5, 5, 2)
trace = run(dims, MemorylessVgt1(dims, 2), (1, 1, 1, 1), 0, 351)
print(induced_cycle_check(trace, dims))

# the arrow diagram as an SVG string, ready to save and open in a browser
svg = render((5, 3, 3, 2), MemorylessV1((5, 3, 3, 2)), "svg")
print(len(svg), "bytes of SVG")
