"""Pinned numerical constants.

The asymptotic statements this package reproduces hide constants. The values
chosen for them live here so tests and reports refer to a single source.
"""

# linear algebra
HERMITIAN_TOL_PER_DIM = 1e-10      # allowed ||H - H^dag|| per unit dimension
LAMBDA_FLOOR_REL = 1e-12           # eigenvalues below this * lambda_max are not PD
UNITARY_TOL = 1e-10

# polynomial approximation
DEGREE_CONSTANT = 40               # K in the degree bounds
AUDIT_GRID_SIZE = 20000
BOUND_SLACK = 1e-9
MAX_DEGREE = 1 << 23               # hard memory guard for coefficient vectors
DEGREE_HYSTERESIS = 2

# block encodings
MAX_QUBITS = 14                    # dense simulation cap on n + (physical) ancillas
NORM_SLACK = 1e-9
QSVT_GATES_PER_QUERY = 1           # O((a+1)d) gates for QSVT, constant pinned to 1
UPSCALE_ERROR_CONSTANT = 1.0       # claimed error C * sqrt(alpha * eps)
UPSCALE_QUERY_CONSTANT = 1.0       # queries C * alpha * ln(1/eps)

# pipelines
POLY_EPS_FLOOR = 1e-11             # smallest polynomial accuracy attempted
POLY_EPS_CEIL = 0.25

# estimation
MEDIAN_K = 15
AE_TRIALS_CONFIDENCE = 8 / 3.141592653589793 ** 2

# decision problem
BQP_REPEATS = 21
POSTSELECT_FLOOR_CONSTANT = 0.25   # floor = c * kappa_A^-6 kappa_C^-2

SCHEMA_VERSION = "1.0"


def as_dict():
    """All pinned constants, for embedding in output provenance."""
    return {k: v for k, v in globals().items() if k.isupper()}
