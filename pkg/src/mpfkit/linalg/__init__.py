"""Component-planar matrices and matrix products."""
from .matmul import (
    ALGORITHMS, DEFAULT_VARIANT, OpCounter, ew_add, ew_mul, ew_op, mat_add, mat_sub, matmul,
    matmul_block, matmul_block_parallel, matmul_naive, matmul_strassen,
    matmul_strassen_parallel,
)
from .matrix import KernelVariant, MPMatrix, aligned_zeros, bit_equal_all, padded_stride

__all__ = [
    "ALGORITHMS", "DEFAULT_VARIANT", "KernelVariant", "MPMatrix", "OpCounter", "aligned_zeros",
    "bit_equal_all", "ew_add", "ew_mul", "ew_op", "mat_add", "mat_sub", "matmul", "matmul_block",
    "matmul_block_parallel", "matmul_naive", "matmul_strassen", "matmul_strassen_parallel",
    "padded_stride",
]
