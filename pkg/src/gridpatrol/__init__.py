"""Patrolling grid graphs and other lattice environments with a single agent
that has limited sensing and at most a few bits of memory."""

from .grid import (FloorSpec, GridDims, GridError, SenseData, Step, ZERO_STEP,
                   boundary_distances, floor_of, region_dims, sense_set,
                   sensing_regions)
from .policies import (MakeMove, MakeMove1D, MakeMove2D, MakeMove3D, MakeMoveKD,
                       MakeMoveNoninductive, MemorylessV1, MemorylessVgt1, Policy,
                       PolicyConfigError, PolicyError, PolicyUndefinedError,
                       TablePolicy, make_move_1d, make_move_2d, make_move_3d,
                       make_move_all, make_move_kd, make_move_noninductive,
                       make_policy, memoryless_v1, memoryless_vgt1, parity,
                       table_policy_eval)
from .simulator import (CycleCheck, IllegalStepError, PolicyFailure,
                        SimulationError, Trace, TransitionTable, VerifyReport,
                        ZeroStepError, floor_entry_audit, induced_cycle_check,
                        run, verify_patrols)
from .feasibility import (FeasibilityVerdict, SearchCapExceeded,
                          brute_force_0bit_search, hamiltonian_cycle,
                          hamiltonian_search, hamiltonicity_parity,
                          theorem1_check)
from .environment import (DirSeqPatroller, DirSeqState, EnvError, Environment,
                          dirseq_patroller, env_diameter, env_hamiltonian_search,
                          env_load, env_sense, full_visibility_hamiltonian)
from .viz import arrow_diagram, render

__version__ = "0.1.0"
