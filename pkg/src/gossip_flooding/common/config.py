"""Configuration constants for the gossip flooding package.

This module contains the tunable limits and defaults shared by the simulation
engine, the exact Markov-chain oracle, the Monte Carlo estimators and the
verification suite.

Environment Variables:
    GFL_ORACLE_CAP: Largest site count the exact oracle commands accept
                    (default 4). Raising it is allowed but the exact solve
                    grows very quickly beyond n = 4.
"""
import os

# Simulation engine
# A run that needs more steps than this is treated as a bug or a disconnected graph
DEFAULT_STEP_CAP = 10**8
# Edge indices drawn per call to the random generator inside a run
DRAW_CHUNK = 4096

# Markov-chain oracle
ORACLE_CAP = int(os.getenv("GFL_ORACLE_CAP", "4"))
ORACLE_STATE_CAP = 200_000
# The float path exists only for n = 5 smoke runs
FLOAT_PATH_MAX_N = 5
FLOAT_PATH_STATE_CAP = 5_000_000

# Exact formulas
# Beyond this the harmonic sum switches to compensated float summation
HARMONIC_EXACT_LIMIT = 10_000

# Monte Carlo
DEFAULT_CI_LEVEL = 0.95
DEFAULT_MASTER_SEED = 20240101
DEFAULT_REPS = 10_000

# Verification suite defaults, overridable with `verify --config PATH`
VERIFY_DEFAULTS = {
    "reps": 20_000,
    "seed": 7,
    "cdf_horizon": 50,
    "er_n": 12,
    "er_p": 0.4,
    "er_seed": 12,
    "ratio_complete_n": 64,
    "ratio_star_leaves": 4,
    "ring_trend_n": [16, 64],
    "sigma_margin": 3.0,
    "reversal_gap_limit": 4.0,
}

TOOL_NAME = "gossip-flooding"
