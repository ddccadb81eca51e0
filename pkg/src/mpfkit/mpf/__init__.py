"""Double-double, triple-double and quad-double numbers.

Scalar values (:class:`Double2`, :class:`Double3`, :class:`Double4`) and their
four-lane packed forms (:class:`PackedD2` ...) share one set of operation
functions; each function accepts either form and returns the same form.

Triple-double addition defaults to the quad-double-based ``td_add_q``; the
merge-sort variant ``td_add_merge`` is kept for comparison.
"""
from __future__ import annotations

import decimal
import enum
import math
from fractions import Fraction
from typing import Callable, Sequence

import numpy as np

from .._backend import njit, portable
from ..oracle import DyadicReal, o_from_components
from . import kernels, vector

__all__ = [
    "Precision", "MPFloat", "Double2", "Double3", "Double4", "Packed", "PackedD2",
    "PackedD3", "PackedD4", "dd_add", "dd_mul", "dd_sub", "td_add_merge", "td_add_q",
    "td_mul", "td_mul_q", "td_sub", "qd_add", "qd_mul", "qd_sub", "neg", "add", "sub",
    "mul", "from_f64", "from_decimal_string", "to_dyadic", "to_decimal_string",
    "is_normalized",
]


class Precision(enum.Enum):
    DD = 2
    TD = 3
    QD = 4

    @property
    def width(self) -> int:
        return self.value

    @property
    def eps(self) -> float:
        return {2: 2.0 ** -104, 3: 2.0 ** -157, 4: 2.0 ** -209}[self.value]

    @property
    def decimal_digits(self) -> float:
        return -math.log10(self.eps)

    @classmethod
    def parse(cls, name) -> Precision:
        if isinstance(name, Precision):
            return name
        try:
            return cls[str(name).upper()]
        except KeyError:
            raise ValueError(f"unknown precision {name!r}; expected dd, td or qd") from None


class MPFloat:
    """A normalized unevaluated sum of binary64 components, leading first."""

    __slots__ = ("c",)
    precision: Precision

    def __init__(self, *components: float):
        w = self.precision.width
        if len(components) == 1 and isinstance(components[0], (tuple, list)):
            components = tuple(components[0])
        if len(components) > w:
            raise ValueError(f"{type(self).__name__} takes at most {w} components")
        self.c = tuple(float(v) for v in components) + (0.0,) * (w - len(components))

    @classmethod
    def from_f64(cls, v: float):
        return cls(float(v))

    @classmethod
    def from_decimal_string(cls, s: str):
        return from_decimal_string(s, cls.precision)

    def to_dyadic(self) -> DyadicReal:
        return o_from_components(self.c)

    def __iter__(self):
        return iter(self.c)

    def __len__(self):
        return len(self.c)

    def __getitem__(self, i):
        return self.c[i]

    def __eq__(self, other):
        if type(other) is not type(self):
            return NotImplemented
        return all(_same_bits(a, b) for a, b in zip(self.c, other.c))

    def __hash__(self):
        return hash((type(self), self.c))

    def __neg__(self):
        return neg(self)

    def __add__(self, other):
        return add(self, _coerce_like(self, other))

    __radd__ = __add__

    def __sub__(self, other):
        return sub(self, _coerce_like(self, other))

    def __rsub__(self, other):
        return sub(_coerce_like(self, other), self)

    def __mul__(self, other):
        return mul(self, _coerce_like(self, other))

    __rmul__ = __mul__

    def __float__(self) -> float:
        return float(self.to_dyadic())

    def __repr__(self):
        return f"{type(self).__name__}{self.c!r}"

    def __str__(self):
        return to_decimal_string(self)


class Double2(MPFloat):
    __slots__ = ()
    precision = Precision.DD


class Double3(MPFloat):
    __slots__ = ()
    precision = Precision.TD


class Double4(MPFloat):
    __slots__ = ()
    precision = Precision.QD


SCALAR_TYPES = {Precision.DD: Double2, Precision.TD: Double3, Precision.QD: Double4}


class Packed:
    """Several multi-component numbers held component-wise: ``comp[k][lane]``."""

    __slots__ = ("comp",)
    precision: Precision

    def __init__(self, *comp):
        w = self.precision.width
        if len(comp) == 1 and len(comp[0]) == w and np.ndim(comp[0][0]) == 1:
            comp = tuple(comp[0])
        if len(comp) != w:
            raise ValueError(f"{type(self).__name__} needs {w} component packs")
        arrs = np.broadcast_arrays(*[np.asarray(c, dtype=np.float64) for c in comp])
        self.comp = tuple(np.array(a) for a in arrs)

    @classmethod
    def from_scalars(cls, values: Sequence[MPFloat]):
        return cls(*(np.array([v.c[k] for v in values]) for k in range(cls.precision.width)))

    @property
    def lanes(self) -> int:
        return self.comp[0].shape[0]

    def lane(self, i: int) -> MPFloat:
        return SCALAR_TYPES[self.precision](*(float(c[i]) for c in self.comp))

    def stacked(self) -> np.ndarray:
        return np.ascontiguousarray(np.stack(self.comp))

    def __eq__(self, other):
        if type(other) is not type(self):
            return NotImplemented
        return all(np.array_equal(a.view(np.int64), b.view(np.int64))
                   for a, b in zip(self.comp, other.comp))

    def __repr__(self):
        return f"{type(self).__name__}({', '.join(repr(c) for c in self.comp)})"


class PackedD2(Packed):
    __slots__ = ()
    precision = Precision.DD


class PackedD3(Packed):
    __slots__ = ()
    precision = Precision.TD


class PackedD4(Packed):
    __slots__ = ()
    precision = Precision.QD


PACKED_TYPES = {Precision.DD: PackedD2, Precision.TD: PackedD3, Precision.QD: PackedD4}


def _same_bits(a: float, b: float) -> bool:
    return a == b and math.copysign(1.0, a) == math.copysign(1.0, b) or (a != a and b != b)


def _coerce_like(x, other):
    if isinstance(other, MPFloat):
        return other
    if isinstance(other, (int, float)):
        return type(x).from_f64(other)
    return NotImplemented


# -- compiled packed loops -------------------------------------------------------------

def _packed_loop(fn: Callable, width: int):
    ld = kernels.LOADERS[width]
    st = kernels.store

    @njit(nogil=True)
    def loop(X, Y, out):
        for i in range(X.shape[1]):
            st(out, i, fn(ld(X, i), ld(Y, i)))

    return loop


_COMPILED: dict[str, Callable] = {}


def _run_packed(name: str, x: Packed, y: Packed) -> Packed:
    width = x.precision.width
    if portable():
        return type(x)(*getattr(vector, name)(x.comp, y.comp))
    loop = _COMPILED.get(name)
    if loop is None:
        loop = _COMPILED[name] = _packed_loop(getattr(kernels, name), width)
    X, Y = np.broadcast_arrays(x.stacked(), y.stacked())
    out = np.empty(X.shape)
    loop(np.ascontiguousarray(X), np.ascontiguousarray(Y), out)
    return type(x)(*out)


def _binary(name: str, precision: Precision):
    scalar = getattr(kernels, name)

    def op(x, y):
        if type(x) is not type(y) or x.precision is not precision:
            raise TypeError(f"{name} expects two {precision.name} operands of the same form, "
                            f"got {type(x).__name__} and {type(y).__name__}")
        if isinstance(x, MPFloat):
            return type(x)(*scalar(x.c, y.c))
        return _run_packed(name, x, y)

    op.__name__ = op.__qualname__ = name
    return op


dd_add = _binary("dd_add", Precision.DD)
dd_mul = _binary("dd_mul", Precision.DD)
dd_sub = _binary("dd_sub", Precision.DD)
td_add_merge = _binary("td_add_merge", Precision.TD)
td_add_q = _binary("td_add_q", Precision.TD)
td_mul = _binary("td_mul", Precision.TD)
td_mul_q = _binary("td_mul_q", Precision.TD)
td_sub = _binary("td_sub", Precision.TD)
td_sub_merge = _binary("td_sub_merge", Precision.TD)
qd_add = _binary("qd_add", Precision.QD)
qd_mul = _binary("qd_mul", Precision.QD)
qd_sub = _binary("qd_sub", Precision.QD)

DEFAULT_OPS = {
    Precision.DD: {"add": "dd_add", "sub": "dd_sub", "mul": "dd_mul"},
    Precision.TD: {"add": "td_add_q", "sub": "td_sub", "mul": "td_mul"},
    Precision.QD: {"add": "qd_add", "sub": "qd_sub", "mul": "qd_mul"},
}
_OPS = {name: globals()[name] for ops in DEFAULT_OPS.values() for name in ops.values()}


def add(x, y):
    return _OPS[DEFAULT_OPS[x.precision]["add"]](x, y)


def sub(x, y):
    return _OPS[DEFAULT_OPS[x.precision]["sub"]](x, y)


def mul(x, y):
    return _OPS[DEFAULT_OPS[x.precision]["mul"]](x, y)


def neg(x):
    if isinstance(x, MPFloat):
        return type(x)(*(-v for v in x.c))
    return type(x)(*(-c for c in x.comp))


# -- conversions --------------------------------------------------------------------------

def from_f64(v: float, precision) -> MPFloat:
    return SCALAR_TYPES[Precision.parse(precision)](float(v))


def _round_fraction(q: Fraction) -> float:
    # int/int true division is correctly rounded (ties to even) in CPython.
    return q.numerator / q.denominator


def from_decimal_string(s: str, precision) -> MPFloat:
    """Parse a decimal literal and round it component by component.

    Each component is the nearest binary64 to what the previous components
    leave over, so the result is within half an ulp of its last component.
    """
    precision = Precision.parse(precision)
    try:
        q = Fraction(s.strip())
    except (ValueError, ZeroDivisionError):
        raise ValueError(f"cannot parse {s!r} as a decimal number") from None
    comps = []
    for _ in range(precision.width):
        try:
            c = _round_fraction(q)
        except OverflowError:
            raise ValueError(f"{s!r} is outside the binary64 range") from None
        comps.append(c)
        q -= Fraction(c)
    if comps[0] == 0.0 and s.strip().startswith("-"):
        comps[0] = -0.0
    return SCALAR_TYPES[precision](*comps)


def to_dyadic(x: MPFloat) -> DyadicReal:
    return x.to_dyadic()


def to_decimal_string(x: MPFloat, digits: int | None = None) -> str:
    """Decimal text that parses back to the exact value of ``x``.

    At least ``digits`` (default ``16 * width``) significant digits are
    printed, more when the components need them to round-trip.  Components
    that are already nearest-rounded come back bit for bit, apart from the
    sign of zero tails.
    """
    w = x.precision.width
    digits = digits or 16 * w
    if x.c[0] == 0.0:
        return "-0.0" if math.copysign(1.0, x.c[0]) < 0 else "0.0"
    with decimal.localcontext(decimal.Context(prec=4000)):
        exact = sum((decimal.Decimal(v) for v in x.c), decimal.Decimal(0))
    value = to_dyadic(x)
    while True:
        rounded = decimal.Context(prec=digits, rounding=decimal.ROUND_HALF_EVEN).plus(exact)
        text = format(rounded, f".{digits - 1}e")
        if to_dyadic(from_decimal_string(text, x.precision)) == value or digits > 1200:
            return text
        digits += 4


def is_normalized(x) -> bool:
    """``|c[i+1]| <= ulp(c[i])`` for every adjacent pair (zeros may trail)."""
    c = x.c if isinstance(x, MPFloat) else x
    return all(abs(c[i + 1]) <= math.ulp(c[i]) for i in range(len(c) - 1))
