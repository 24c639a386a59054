"""Constants for nonbilocality."""

ENV_SEED = "NONBILOCAL_SEED"

CONF_RESTARTS = "restarts"
CONF_REFINE_ITERS = "refine_iters"
CONF_STEP_TOLERANCE = "step_tolerance"
CONF_VALUE_TOLERANCE = "value_tolerance"
CONF_SEED = "seed"
CONF_STRUCTURED_SEEDS = "structured_seeds"
CONF_WORKERS = "workers"

DEFAULT_RESTARTS = 64
DEFAULT_REFINE_ITERS = 400
DEFAULT_STEP_TOLERANCE = 1e-9
DEFAULT_VALUE_TOLERANCE = 1e-10
DEFAULT_SEED = 7
DEFAULT_WORKERS = 1

# Validation tolerances for states, operators and measurements.
KET_NORM_TOLERANCE = 1e-12
HERMITIAN_TOLERANCE = 1e-10
TRACE_TOLERANCE = 1e-10
PSD_TOLERANCE = 1e-10
PROJECTOR_TOLERANCE = 1e-10

# Relative gap below which eigenvalues share a degenerate block.
DEGENERACY_GAP = 1e-8

# Largest total Hilbert-space dimension accepted anywhere.
DIMENSION_CAP = 4096

# Slack used when comparing optimizer values against theorem bounds.
THEOREM1_SLACK = 1e-6
BOUND_SLACK = 1e-7
PRODUCT_ZERO_TOLERANCE = 1e-8

# Significant digits for every float written to reports and CSV files.
REPORT_DIGITS = 12

EXIT_OK = 0
EXIT_ASSERTION = 1
EXIT_INPUT = 2
EXIT_DIMENSION_CAP = 3
