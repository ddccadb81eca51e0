"""Backend selection: numba-compiled kernels or the pure-numpy portable path.

Setting ``MPFKIT_FORCE_PORTABLE=1`` in the environment (or running without
numba installed) routes every lane/packed/matrix kernel through numpy.
"""
from __future__ import annotations

import math
import os
import struct
import threading
from fractions import Fraction
from contextlib import contextmanager

try:
    import numba
    from numba import types as _nbtypes
    from numba.extending import intrinsic, overload, register_jitable
    from llvmlite import ir as _llir
except ImportError:  # pragma: no cover - exercised only without numba
    numba = None

HAVE_NUMBA = numba is not None
ENV_FLAG = "MPFKIT_FORCE_PORTABLE"

_state = threading.local()


def _env_portable() -> bool:
    return os.environ.get(ENV_FLAG, "").strip().lower() not in ("", "0", "false", "no")


_DEFAULT_PORTABLE = _env_portable() or not HAVE_NUMBA


def portable() -> bool:
    """True when the pure-numpy path is active for the calling thread."""
    return getattr(_state, "portable", _DEFAULT_PORTABLE)


def backend_name() -> str:
    return "numpy" if portable() else "numba"


@contextmanager
def use_backend(name: str):
    """Temporarily select ``"numba"`` or ``"numpy"`` for the calling thread.

    Worker threads spawned by the parallel matmuls inherit the selection
    explicitly; see ``linalg.matmul``.
    """
    if name not in ("numba", "numpy"):
        raise ValueError(f"unknown backend {name!r}")
    if name == "numba" and not HAVE_NUMBA:
        raise RuntimeError("numba backend requested but numba is not installed")
    prev = getattr(_state, "portable", None)
    _state.portable = name == "numpy"
    try:
        yield
    finally:
        if prev is None:
            del _state.portable
        else:
            _state.portable = prev


def set_thread_backend(name: str) -> None:
    _state.portable = name == "numpy"


if HAVE_NUMBA:
    jitable = register_jitable

    def njit(*args, **kwargs):
        return numba.njit(*args, **kwargs)
else:  # pragma: no cover
    def jitable(fn=None, **_kw):
        return fn if fn is not None else (lambda f: f)

    def njit(*args, **_kwargs):
        if args and callable(args[0]):
            return args[0]
        return lambda f: f


# -- correctly rounded fused multiply-add -----------------------------------

_SPLITTER = 134217729.0  # 2**27 + 1


_SAFE_LO = 2.0 ** -500
_SAFE_HI = 2.0 ** 500
_SAFE_PROD = 2.0 ** -960
_SAFE_C = 2.0 ** 1020


def _bits(x: float) -> int:
    return struct.unpack("<q", struct.pack("<d", x))[0]


def _exact_fma(a: float, b: float, c: float) -> float:
    q = Fraction(a) * Fraction(b) + Fraction(c)
    if q == 0:
        p = a * b
        return p + c if p == 0.0 else 0.0
    try:
        return q.numerator / q.denominator
    except OverflowError:
        return math.inf if q > 0 else -math.inf


def _py_fma(a: float, b: float, c: float) -> float:
    # Exact product via Veltkamp/Dekker, then a*b + c summed with one
    # round-to-odd step followed by round-to-nearest (Boldo-Melquiond).
    # Inputs where the split itself may overflow or underflow take the
    # rational route instead.
    if not (math.isfinite(a) and math.isfinite(b)):
        return a * b + c
    if not math.isfinite(c):
        return c + 0.0 * a * b if math.isnan(c) else c
    p = a * b
    if not (_SAFE_LO <= abs(a) <= _SAFE_HI and _SAFE_LO <= abs(b) <= _SAFE_HI
            and abs(p) >= _SAFE_PROD) or abs(c) > _SAFE_C:
        if a == 0.0 or b == 0.0:
            return p + c
        return _exact_fma(a, b, c)
    t = _SPLITTER * a
    ah = t - (t - a)
    al = a - ah
    t = _SPLITTER * b
    bh = t - (t - b)
    bl = b - bh
    pl = ((ah * bh - p) + ah * bl + al * bh) + al * bl
    th = c + p
    bb = th - c
    tl = (c - (th - bb)) + (p - bb)
    v = tl + pl
    bb = v - tl
    ve = (tl - (v - bb)) + (pl - bb)
    if ve != 0.0 and not (_bits(v) & 1):
        v = math.nextafter(v, math.inf if ve > 0.0 else -math.inf)
    return th + v


def fma(a, b, c):
    """Return ``a*b + c`` with a single rounding.

    Interpreted Python has no hardware FMA before 3.13, so this falls back to
    an exact emulation; inside numba-compiled code it lowers to ``llvm.fma``.
    Exact only when ``a*b`` stays clear of overflow and the subnormal range.
    """
    return _py_fma(float(a), float(b), float(c))


if HAVE_NUMBA:
    @intrinsic
    def _llvm_fma(typingctx, a, b, c):
        sig = _nbtypes.float64(_nbtypes.float64, _nbtypes.float64, _nbtypes.float64)

        def codegen(context, builder, signature, args):
            d = _llir.DoubleType()
            fn = builder.module.declare_intrinsic("llvm.fma", [d], _llir.FunctionType(d, [d, d, d]))
            return builder.call(fn, args)

        return sig, codegen

    @overload(fma, inline="always")
    def _fma_overload(a, b, c):
        def impl(a, b, c):
            return _llvm_fma(float(a), float(b), float(c))
        return impl


# -- floating-point environment probe ----------------------------------------

def check_fp_environment() -> None:
    """Refuse to run unless binary64 arithmetic rounds to nearest-even and the
    selected FMA path rounds once."""
    import numpy as np

    one = 1.0
    tiny = 2.0 ** -53
    ok = (one + tiny == one and -one - tiny == -one
          and (one + 2.0 ** -52) + tiny == one + 2.0 ** -51)
    arr = np.array([one, -one, one + 2.0 ** -52])
    off = np.array([tiny, -tiny, tiny])
    ok = ok and bool(np.all(arr + off == np.array([one, -one, one + 2.0 ** -51])))
    if not ok:
        raise RuntimeError("binary64 arithmetic is not round-to-nearest-even; refusing to run")
    a = 2.0 ** 27 + 1.0
    if fma(a, a, -(2.0 ** 54 + 2.0 ** 28)) != 1.0:
        raise RuntimeError("no correctly rounded FMA available")
