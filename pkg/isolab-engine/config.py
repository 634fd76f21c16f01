import os
from dotenv import load_dotenv

# Load environment variables from a .env file if present
load_dotenv()

# -------------------------------------------------------------------
# Reproducibility & Logging
# -------------------------------------------------------------------
default_seed = int(os.getenv("ISOLAB_SEED", "0"))
default_log_level = os.getenv("ISOLAB_LOG_LEVEL", "WARNING").upper()
default_threads = int(os.getenv("ISOLAB_THREADS", "0"))

# -------------------------------------------------------------------
# Arithmetic bounds
# -------------------------------------------------------------------
max_modulus = int(os.getenv("ISOLAB_MAX_MODULUS", str(2 ** 61)))
factor_effort = int(os.getenv("ISOLAB_FACTOR_EFFORT", "1000000"))

# -------------------------------------------------------------------
# Curves & Isogenies
# -------------------------------------------------------------------
point_count_bound = int(os.getenv("ISOLAB_POINT_COUNT_BOUND", "1000000000"))
exhaustive_count_bound = int(os.getenv("ISOLAB_EXHAUSTIVE_COUNT_BOUND", "10000"))
bsgs_aux_points = int(os.getenv("ISOLAB_BSGS_AUX_POINTS", "8"))
max_isogeny_degree = int(os.getenv("ISOLAB_MAX_ISOGENY_DEGREE", "13"))
kernel_subset_cap = int(os.getenv("ISOLAB_KERNEL_SUBSET_CAP", str(2 ** 20)))
velu_test_pairs = int(os.getenv("ISOLAB_VELU_TEST_PAIRS", "10"))
modular_levels = tuple(
    int(level) for level in os.getenv("ISOLAB_MODULAR_LEVELS", "2,3,5,7").split(",") if level.strip()
)
modular_gate_primes = tuple(
    int(p) for p in os.getenv("ISOLAB_MODULAR_GATE_PRIMES", "101,103,107").split(",") if p.strip()
)
modular_gate_pairs = int(os.getenv("ISOLAB_MODULAR_GATE_PAIRS", "50"))

# -------------------------------------------------------------------
# Class groups & Graphs
# -------------------------------------------------------------------
class_number_bound = int(os.getenv("ISOLAB_CLASS_NUMBER_BOUND", "100000"))
theta_bound = int(os.getenv("ISOLAB_THETA_BOUND", "10000"))
eigen_max_dim = int(os.getenv("ISOLAB_EIGEN_MAX_DIM", "5000"))
default_delta = float(os.getenv("ISOLAB_DELTA", "1.0"))
walk_chunk = int(os.getenv("ISOLAB_WALK_CHUNK", "1024"))
walk_max_prime = int(os.getenv("ISOLAB_WALK_MAX_PRIME", "7"))
