CONFIG_ENV_KEYWORD = "LEVY_BSDE"
THREADS_ENV_VAR = "LEVY_BSDE_THREADS"

# levy_measures
QUADRATURE_TOLERANCE = 1e-10
QUADRATURE_EPS_MIN = 1e-8
PANELS_PER_DECADE = 4
INVERSE_CDF_NODES = 4096
INVERSE_CDF_TAIL_DECAY = 40.0
ATOMIC_RESIDUAL_TOLERANCE = 1e-12

# path_sim
PATH_CHUNK_SIZE = 256
PATH_DUMP_MAGIC = b"LBSP"
PATH_DUMP_VERSION = 1
INDEPENDENCE_BINS = 5
INDEPENDENCE_MIN_PATHS = 10_000

# bsde_solver
JUMP_QUADRATURE_NODES = 512
POISSON_TAIL = 1e-12
PICARD_TOLERANCE = 1e-10
PICARD_MAX_ITERATIONS = 50
CONTRACTION_MARGIN = 0.5
SPACE_GRID_QUANTILE = 1e-6
SPACE_GRID_SAMPLES = 20_000
SPACE_GRID_MASS_WARNING = 1e-4
LSMC_MAX_DEGREE = 6
LSMC_MIN_PATHS = 1_000
LSMC_CONDITION_LIMIT = 1e12

# rates
DEFAULT_LEVELS = (2, 4, 8, 16, 32, 64)
DEFAULT_PATHS = 10_000
DEFAULT_EPS_REF = 1e-4
BIAS_FRACTION = 0.05
BOOTSTRAP_RESAMPLES = 200
U_NORM_QUADRATURE_NODES = 128
BRACKET_TOLERANCE = 1e-12

# RNG stream purposes (second Philox key word)
STREAM_PATHS = 0
STREAM_SPACE_GRID = 1
STREAM_LSMC = 2
STREAM_BOOTSTRAP = 3
STREAM_ORACLE = 4
STREAM_APPENDIX = 5
STREAM_INDEPENDENCE = 6
STREAM_LIPSCHITZ = 7
