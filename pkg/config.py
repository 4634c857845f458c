"""Configuration constants for the taxigraph toolkit."""

# Tool identity
TOOL_NAME = "taxigraph"
TOOL_VERSION = "0.1.0"

# Trips CSV
PICKUP_COLUMN = "pickup_community_area"
DROPOFF_COLUMN = "dropoff_community_area"
DURATION_COLUMN = "trip_seconds"
DEFAULT_TRIP_COLUMNS = (PICKUP_COLUMN, DROPOFF_COLUMN, DURATION_COLUMN)
CSV_CHUNK_ROWS = 200_000  # rows parsed per pandas chunk

# Graph file
GRAPH_HEADER_KEYWORD = "digraph"
ASSIGNMENTS_HEADER = ("node_id", "cluster")
MANIFEST_SUFFIX = ".manifest.json"
REPORT_SUFFIX = ".report.json"

# Numerical tolerances
FACTORIZATION_TOL = 1e-8     # relative residual for eigh / svd / eig
SYMMETRY_TOL = 1e-10         # relative ||A - A^T||_inf accepted by eigh_symmetric
STOCHASTIC_TOL = 1e-12       # row sums of a transition matrix
STATIONARY_TOL = 1e-10       # ||pi P - pi||_1 of a stationary distribution
STATIONARY_STEP_TOL = 1e-12  # power iteration stops when ||delta||_1 drops below this
STATIONARY_MAX_ITER = 100_000
SIGN_TOL = 1e-10             # components smaller than this are skipped by sign canonicalization
TIE_DECIMALS = 10            # eigenvalue moduli are compared at this many decimals
DEGENERATE_GAP = 1e-12       # |lambda_1| - |lambda_2| below this flags a degenerate spectrum
KERNEL_MIN_STD = 1e-14       # below this the Gaussian kernel bandwidth is degenerate
LATENT_GAP_EPS = 1e-12       # floor for singular values in the relative-gap rule

# k-means
KMEANS_RESTARTS = 10
KMEANS_MAX_ITER = 300

# Teleport
DEFAULT_TELEPORT = 0.0
AUTO_TELEPORT = 0.15  # applied when a chain is reducible, periodic or has dangling rows

# Community detection
WALKTRAP_DEFAULT_T = 4
LEIDEN_MAX_LEVELS = 20
LEIDEN_MIN_GAIN = 1e-12  # a local move must improve CPM quality by more than this

# Randomness
DEFAULT_SEED = 0

# Exit codes
EXIT_OK = 0
EXIT_USAGE = 2
EXIT_NUMERIC = 3
EXIT_IO = 4

# Logging
LOG_LEVEL_ENV = "TAXIGRAPH_LOG_LEVEL"
DEFAULT_LOG_LEVEL = "WARNING"
LOG_FORMAT = "%(asctime)s %(levelname)s %(name)s: %(message)s"

# Export
UNASSIGNED_COLOR = "#cccccc"  # nodes dropped before clustering (label -1)
CLUSTER_PALETTE = (
    "#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b",
    "#e377c2", "#7f7f7f", "#bcbd22", "#17becf", "#aec7e8", "#ffbb78",
)
MIN_PENWIDTH = 0.5
MAX_PENWIDTH = 5.0
