"""Component-planar multi-component matrices.

An ``MPMatrix`` keeps one contiguous binary64 plane per component index, each
``rows x stride`` row-major, with ``stride`` the column count rounded up to a
multiple of four.  Planes start on 64-byte boundaries and padding cells hold
exact zeros, so four-lane loads never read garbage.
"""
from __future__ import annotations

import csv
import enum
import io
import struct
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from ..mpf import SCALAR_TYPES, MPFloat, Precision, from_decimal_string, to_decimal_string
from ..oracle import DyadicReal, o_from_components
from ..simd import LANES

ALIGNMENT = 64
MAGIC = b"MPFM"
FORMAT_VERSION = 1
_HEADER = struct.Struct("<4sIBQQQ")


class KernelVariant(enum.Enum):
    NORMAL = "normal"
    SIMD_SET = "set"
    SIMD_LOADSTORE = "loadstore"

    @property
    def code(self) -> int:
        return _VARIANT_CODES[self]

    @classmethod
    def parse(cls, v) -> KernelVariant:
        if isinstance(v, KernelVariant):
            return v
        s = str(v).lower()
        for member in cls:
            if s in (member.value, member.name.lower()):
                return member
        raise ValueError(f"unknown kernel variant {v!r}; expected normal, set or loadstore")


_VARIANT_CODES = {KernelVariant.NORMAL: 0, KernelVariant.SIMD_SET: 1, KernelVariant.SIMD_LOADSTORE: 2}


def padded_stride(cols: int) -> int:
    return -(-cols // LANES) * LANES if cols else LANES


def aligned_zeros(shape: tuple[int, ...]) -> np.ndarray:
    n = int(np.prod(shape))
    buf = np.zeros(n + ALIGNMENT // 8, dtype=np.float64)
    off = (-buf.ctypes.data % ALIGNMENT) // 8
    return buf[off:off + n].reshape(shape)


class MPMatrix:
    __slots__ = ("precision", "rows", "cols", "stride", "planes")

    def __init__(self, precision, rows: int, cols: int, planes: np.ndarray | None = None):
        self.precision = Precision.parse(precision)
        if rows < 0 or cols < 0:
            raise ValueError("matrix dimensions must be non-negative")
        self.rows, self.cols = int(rows), int(cols)
        self.stride = padded_stride(self.cols)
        shape = (self.precision.width, self.rows, self.stride)
        if planes is None:
            self.planes = aligned_zeros(shape)
        else:
            if planes.shape != shape:
                raise ValueError(f"planes have shape {planes.shape}, expected {shape}")
            self.planes = aligned_zeros(shape)
            self.planes[...] = planes
            self.clear_padding()

    # -- construction ----------------------------------------------------------

    @classmethod
    def zeros(cls, precision, rows: int, cols: int) -> MPMatrix:
        return cls(precision, rows, cols)

    @classmethod
    def identity(cls, n: int, precision) -> MPMatrix:
        m = cls(precision, n, n)
        m.planes[0, np.arange(n), np.arange(n)] = 1.0
        return m

    @classmethod
    def from_f64(cls, values, precision) -> MPMatrix:
        values = np.atleast_2d(np.asarray(values, dtype=np.float64))
        m = cls(precision, *values.shape)
        m.planes[0, :, :m.cols] = values
        return m

    @classmethod
    def from_components(cls, comps: np.ndarray, precision) -> MPMatrix:
        """Build from an array shaped ``(width, rows, cols)``."""
        comps = np.asarray(comps, dtype=np.float64)
        m = cls(precision, comps.shape[1], comps.shape[2])
        m.planes[:, :, :m.cols] = comps
        return m

    @classmethod
    def from_elements(cls, rows: Sequence[Sequence[MPFloat]]) -> MPMatrix:
        prec = rows[0][0].precision
        m = cls(prec, len(rows), len(rows[0]))
        for i, row in enumerate(rows):
            for j, v in enumerate(row):
                m[i, j] = v
        return m

    # -- element access -----------------------------------------------------------

    @property
    def shape(self) -> tuple[int, int]:
        return self.rows, self.cols

    @property
    def width(self) -> int:
        return self.precision.width

    def components(self, i: int, j: int) -> tuple[float, ...]:
        return tuple(float(v) for v in self.planes[:, i, j])

    def __getitem__(self, ij) -> MPFloat:
        i, j = ij
        self._check_index(i, j)
        return SCALAR_TYPES[self.precision](*self.components(i, j))

    def __setitem__(self, ij, value) -> None:
        i, j = ij
        self._check_index(i, j)
        if isinstance(value, MPFloat):
            if value.precision is not self.precision:
                raise ValueError("precision mismatch")
            value = value.c
        elif np.isscalar(value):
            value = (float(value),) + (0.0,) * (self.width - 1)
        self.planes[:, i, j] = value

    def _check_index(self, i, j):
        if not (0 <= i < self.rows and 0 <= j < self.cols):
            raise IndexError(f"index ({i}, {j}) outside {self.rows}x{self.cols} matrix")

    def view_components(self) -> np.ndarray:
        """``(width, rows, cols)`` view without the padding columns."""
        return self.planes[:, :, :self.cols]

    def flat_planes(self) -> np.ndarray:
        return self.planes.reshape(self.width, self.rows * self.stride)

    def leading(self) -> np.ndarray:
        return self.planes[0, :, :self.cols].copy()

    def to_dyadic(self) -> list[list[DyadicReal]]:
        comps = self.view_components()
        return [[o_from_components(comps[:, i, j]) for j in range(self.cols)]
                for i in range(self.rows)]

    def to_f64(self) -> np.ndarray:
        """Each element rounded to binary64 (exact sum, one rounding)."""
        out = np.empty((self.rows, self.cols))
        for i in range(self.rows):
            for j in range(self.cols):
                out[i, j] = float(o_from_components(self.planes[:, i, j]))
        return out

    # -- structural helpers --------------------------------------------------------

    def copy(self) -> MPMatrix:
        return MPMatrix(self.precision, self.rows, self.cols, self.planes)

    def like(self, rows: int | None = None, cols: int | None = None) -> MPMatrix:
        return MPMatrix(self.precision, self.rows if rows is None else rows,
                        self.cols if cols is None else cols)

    def block(self, r0: int, r1: int, c0: int, c1: int) -> MPMatrix:
        """Copy of rows ``r0:r1`` and columns ``c0:c1``; out-of-range cells read as zero."""
        out = self.like(r1 - r0, c1 - c0)
        rr1, cc1 = min(r1, self.rows), min(c1, self.cols)
        if rr1 > r0 and cc1 > c0:
            out.planes[:, :rr1 - r0, :cc1 - c0] = self.planes[:, r0:rr1, c0:cc1]
        return out

    def put_block(self, r0: int, c0: int, src: MPMatrix) -> None:
        """Write ``src`` at ``(r0, c0)``, clipped to this matrix."""
        rr = min(src.rows, self.rows - r0)
        cc = min(src.cols, self.cols - c0)
        if rr > 0 and cc > 0:
            self.planes[:, r0:r0 + rr, c0:c0 + cc] = src.planes[:, :rr, :cc]

    def clear_padding(self) -> None:
        self.planes[:, :, self.cols:] = 0.0

    def padding_is_zero(self) -> bool:
        pad = self.planes[:, :, self.cols:]
        return bool(np.all(pad.view(np.int64) == 0))

    def bit_equal(self, other: MPMatrix) -> bool:
        return (self.precision is other.precision and self.shape == other.shape
                and np.array_equal(self.planes.view(np.int64), other.planes.view(np.int64)))

    def __eq__(self, other):
        if not isinstance(other, MPMatrix):
            return NotImplemented
        return self.bit_equal(other)

    __hash__ = None

    def __repr__(self):
        return f"MPMatrix({self.precision.name}, {self.rows}x{self.cols})"

    # -- CSV -------------------------------------------------------------------------

    def to_csv(self, path_or_file=None, digits: int | None = None) -> str | None:
        """Write decimal strings, one matrix row per line.  Lossy below round-trip width."""
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        for i in range(self.rows):
            w.writerow([_fmt(self[i, j], digits) for j in range(self.cols)])
        text = buf.getvalue()
        if path_or_file is None:
            return text
        _write_text(path_or_file, text)
        return None

    @classmethod
    def from_csv(cls, path_or_file, precision) -> MPMatrix:
        text = _read_text(path_or_file)
        rows = [r for r in csv.reader(io.StringIO(text)) if r]
        if not rows or len({len(r) for r in rows}) != 1:
            raise ValueError("CSV matrix rows must be non-empty and equally long")
        prec = Precision.parse(precision)
        m = cls(prec, len(rows), len(rows[0]))
        for i, row in enumerate(rows):
            for j, cell in enumerate(row):
                m[i, j] = from_decimal_string(cell, prec)
        return m

    # -- raw binary ---------------------------------------------------------------

    def to_bytes(self) -> bytes:
        header = _HEADER.pack(MAGIC, FORMAT_VERSION, self.width, self.rows, self.cols, self.stride)
        return header + self.planes.astype("<f8", copy=False).tobytes(order="C")

    @classmethod
    def from_bytes(cls, data: bytes) -> MPMatrix:
        if len(data) < _HEADER.size:
            raise ValueError("truncated MPFM header")
        magic, version, width, rows, cols, stride = _HEADER.unpack_from(data)
        if magic != MAGIC:
            raise ValueError(f"bad magic {magic!r}")
        if version != FORMAT_VERSION:
            raise ValueError(f"unsupported MPFM version {version}")
        prec = Precision(width)
        if stride != padded_stride(cols):
            raise ValueError(f"stride {stride} does not match {cols} columns")
        n = width * rows * stride
        body = data[_HEADER.size:]
        if len(body) != 8 * n:
            raise ValueError(f"expected {8 * n} payload bytes, found {len(body)}")
        planes = np.frombuffer(body, dtype="<f8").astype(np.float64).reshape(width, rows, stride)
        m = cls(prec, rows, cols)
        m.planes[...] = planes
        return m

    def save(self, path) -> None:
        try:
            Path(path).write_bytes(self.to_bytes())
        except OSError as exc:
            raise OSError(f"cannot write matrix to {path}: {exc}") from exc

    @classmethod
    def load(cls, path) -> MPMatrix:
        return cls.from_bytes(Path(path).read_bytes())


def _fmt(x: MPFloat, digits):
    return to_decimal_string(x, digits) if digits is None else _plain(x, digits)


def _plain(x: MPFloat, digits: int) -> str:
    import decimal
    with decimal.localcontext(decimal.Context(prec=4000)):
        exact = sum((decimal.Decimal(v) for v in x.c), decimal.Decimal(0))
    r = decimal.Context(prec=digits).plus(exact)
    return format(r, f".{digits - 1}e")


def _write_text(target, text: str) -> None:
    if hasattr(target, "write"):
        target.write(text)
        return
    try:
        Path(target).write_text(text)
    except OSError as exc:
        raise OSError(f"cannot write {target}: {exc}") from exc


def _read_text(source) -> str:
    if hasattr(source, "read"):
        return source.read()
    if isinstance(source, str) and "\n" in source:
        return source
    return Path(source).read_text()


def bit_equal_all(mats: Iterable[MPMatrix]) -> bool:
    mats = list(mats)
    return all(mats[0].bit_equal(m) for m in mats[1:])
