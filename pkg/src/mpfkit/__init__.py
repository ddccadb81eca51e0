"""Multi-component binary64 arithmetic (double-, triple- and quad-double) with
four-lane kernels, component-planar matrices and an exact dyadic oracle."""
from ._backend import ENV_FLAG, HAVE_NUMBA, backend_name, check_fp_environment, use_backend

check_fp_environment()

from . import eft, linalg, mpf, oracle, simd  # noqa: E402
from .linalg import KernelVariant, MPMatrix  # noqa: E402
from .mpf import Double2, Double3, Double4, Precision  # noqa: E402

__version__ = "0.1.0"

__all__ = [
    "ENV_FLAG", "HAVE_NUMBA", "backend_name", "check_fp_environment", "use_backend", "eft",
    "linalg", "mpf", "oracle", "simd", "KernelVariant", "MPMatrix", "Double2", "Double3",
    "Double4", "Precision", "__version__",
]
