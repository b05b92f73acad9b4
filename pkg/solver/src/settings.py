import os

__version__ = "0.3.0"

# Sturm-Liouville meshes for the classical (s = 1) problems
CAP_MESH_NODES = 1024
# tensor meshes (phi intervals, psi intervals) for the extension problem
EXTENSION_MESH = (256, 128)
# extension solves closer to s = 1 are refused by public entry points
MAX_FRACTIONAL_ORDER = 0.999

QUADRATURE_ANGULAR_NODES = 64
QUADRATURE_PANELS_PER_DECADE = 16
QUADRATURE_RHO_MIN = 1e-4
QUADRATURE_RHO_MAX = 1e4

THREADS_ENV = "CONE_EXPONENTS_THREADS"


def worker_count() -> int:
    """Number of workers used for parameter sweeps, capped by the environment.

    Returns:
        int: Value of CONE_EXPONENTS_THREADS when it is a positive integer, otherwise 1.
    """
    raw = os.environ.get(THREADS_ENV, "1")
    try:
        count = int(raw)
    except ValueError:
        return 1
    return max(1, count)
