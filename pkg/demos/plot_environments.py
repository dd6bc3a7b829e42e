"""
Beyond boxes: holes and L-shapes
================================

Any finite connected piece of the lattice can be patrolled by trying every
direction sequence of length diam(G) and undoing it. With full visibility
memory is unnecessary exactly when the piece has a Hamiltonian cycle.
"""

from gridpatrol import dirseq_patroller, env_load, full_visibility_hamiltonian
from gridpatrol import verify_patrols
from gridpatrol.environment import load_table_fixture

hole = env_load("grid-with-hole")
ell = env_load("l-shape")
print(len(hole), hole.diameter, len(ell), ell.diameter)

# the direction-sequence patroller on a small shape
env = env_load("path:3")
pol = dirseq_patroller(env)
print(pol.describe(), verify_patrols(env, pol, budget=pol.step_bound()).verdict)

# full visibility: the holed grid is a ring of 24 vertices, the 3-path is not
print(full_visibility_hamiltonian(hole) is not None)
print(full_visibility_hamiltonian(env_load("path:3")))

# small hand-written tables with a few states also do the job
for name, env in [("hole5_4state.table", hole), ("lshape_3state.table", ell)]:
    report = verify_patrols(env, load_table_fixture(name))
    print(name, report.verdict, report.worst_cover_time)
