"""Dense bit-packed linear algebra over GF(2).

Rows are stored as ``uint64`` words, 64 columns per word, bit ``j`` of a row
living in word ``j // 64`` at position ``j % 64``. Padding bits past ``cols``
are always zero.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable

import numpy as np

WORD = 64


def _nwords(cols: int) -> int:
    return (cols + WORD - 1) // WORD


def _pack(bits: np.ndarray) -> np.ndarray:
    """Pack a 2-D 0/1 array into uint64 words (little-endian bit order)."""
    bits = np.asarray(bits, dtype=np.uint8) & 1
    rows, cols = bits.shape
    nw = _nwords(cols)
    padded = np.zeros((rows, nw * WORD), dtype=np.uint8)
    padded[:, :cols] = bits
    packed = np.packbits(padded, axis=1, bitorder="little")
    return np.ascontiguousarray(packed).view("<u8").astype(np.uint64).reshape(rows, nw)


def _unpack(data: np.ndarray, cols: int) -> np.ndarray:
    rows = data.shape[0]
    if rows == 0:
        return np.zeros((0, cols), dtype=np.uint8)
    raw = np.ascontiguousarray(data.astype("<u8")).view(np.uint8).reshape(rows, -1)
    return np.unpackbits(raw, axis=1, bitorder="little")[:, :cols]


class DimensionError(ValueError):
    """Operand shapes do not agree."""


@dataclass(frozen=True, eq=False)
class BinaryMatrix:
    """Row-major bit-packed binary matrix."""

    rows: int
    cols: int
    data: np.ndarray = field(repr=False)

    def __post_init__(self) -> None:
        if self.data.shape != (self.rows, _nwords(self.cols)):
            raise DimensionError(f"data shape {self.data.shape} does not fit {self.rows}x{self.cols}")
        self.data.setflags(write=False)

    # constructors -----------------------------------------------------------

    @classmethod
    def from_dense(cls, bits) -> BinaryMatrix:
        bits = np.asarray(bits)
        if bits.ndim != 2:
            raise DimensionError("expected a 2-D array")
        return cls(bits.shape[0], bits.shape[1], _pack(bits))

    @classmethod
    def zeros(cls, rows: int, cols: int) -> BinaryMatrix:
        return cls(rows, cols, np.zeros((rows, _nwords(cols)), dtype=np.uint64))

    @classmethod
    def identity(cls, size: int) -> BinaryMatrix:
        return cls.from_dense(np.eye(size, dtype=np.uint8))

    @classmethod
    def from_rows(cls, vectors: Iterable[BinaryVector], cols: int) -> BinaryMatrix:
        vectors = list(vectors)
        if any(v.len != cols for v in vectors):
            raise DimensionError("vector length mismatch")
        data = np.zeros((len(vectors), _nwords(cols)), dtype=np.uint64)
        for i, v in enumerate(vectors):
            data[i] = v.data
        return cls(len(vectors), cols, data)

    # views ------------------------------------------------------------------

    @property
    def shape(self) -> tuple[int, int]:
        return (self.rows, self.cols)

    def to_dense(self) -> np.ndarray:
        return _unpack(self.data, self.cols)

    def row(self, i: int) -> BinaryVector:
        return BinaryVector(self.cols, self.data[i].copy())

    def __iter__(self):
        return (self.row(i) for i in range(self.rows))

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, BinaryMatrix):
            return NotImplemented
        return self.shape == other.shape and np.array_equal(self.data, other.data)

    def __hash__(self) -> int:
        return hash((self.rows, self.cols, self.data.tobytes()))

    def row_weights(self) -> np.ndarray:
        return np.bitwise_count(self.data).sum(axis=1).astype(np.int64)

    def col_weights(self) -> np.ndarray:
        return self.to_dense().sum(axis=0).astype(np.int64)

    def is_zero(self) -> bool:
        return not self.data.any()

    @property
    def T(self) -> BinaryMatrix:
        return transpose(self)

    def __matmul__(self, other):
        if isinstance(other, BinaryVector):
            return matvec(self, other)
        return matmul(self, other)

    def __add__(self, other: BinaryMatrix) -> BinaryMatrix:
        if self.shape != other.shape:
            raise DimensionError(f"cannot add {self.shape} and {other.shape}")
        return BinaryMatrix(self.rows, self.cols, self.data ^ other.data)

    def __str__(self) -> str:
        return "\n".join("".join(map(str, r)) for r in self.to_dense())


@dataclass(frozen=True, eq=False)
class BinaryVector:
    """Bit-packed binary vector."""

    len: int
    data: np.ndarray = field(repr=False)

    def __post_init__(self) -> None:
        if self.data.shape != (_nwords(self.len),):
            raise DimensionError("packed data does not fit vector length")
        self.data.setflags(write=False)

    @classmethod
    def from_dense(cls, bits) -> BinaryVector:
        bits = np.asarray(bits).reshape(1, -1)
        return cls(bits.shape[1], _pack(bits)[0])

    @classmethod
    def zeros(cls, length: int) -> BinaryVector:
        return cls(length, np.zeros(_nwords(length), dtype=np.uint64))

    @classmethod
    def from_support(cls, length: int, support: Iterable[int]) -> BinaryVector:
        bits = np.zeros(length, dtype=np.uint8)
        bits[list(support)] = 1
        return cls.from_dense(bits)

    def to_dense(self) -> np.ndarray:
        return _unpack(self.data.reshape(1, -1), self.len)[0]

    def support(self) -> list[int]:
        return np.flatnonzero(self.to_dense()).tolist()

    def weight(self) -> int:
        return int(np.bitwise_count(self.data).sum())

    def is_zero(self) -> bool:
        return not self.data.any()

    def __getitem__(self, j: int) -> int:
        return int((self.data[j // WORD] >> np.uint64(j % WORD)) & np.uint64(1))

    def __add__(self, other: BinaryVector) -> BinaryVector:
        if self.len != other.len:
            raise DimensionError(f"cannot add vectors of length {self.len} and {other.len}")
        return BinaryVector(self.len, self.data ^ other.data)

    def dot(self, other: BinaryVector) -> int:
        if self.len != other.len:
            raise DimensionError("length mismatch")
        return int(np.bitwise_count(self.data & other.data).sum()) & 1

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, BinaryVector):
            return NotImplemented
        return self.len == other.len and np.array_equal(self.data, other.data)

    def __hash__(self) -> int:
        return hash((self.len, self.data.tobytes()))

    def __str__(self) -> str:
        return "".join(map(str, self.to_dense()))


def weight(v: BinaryVector) -> int:
    return v.weight()


def add(u: BinaryVector, v: BinaryVector) -> BinaryVector:
    return u + v


def transpose(M: BinaryMatrix) -> BinaryMatrix:
    return BinaryMatrix.from_dense(M.to_dense().T)


def matmul(M: BinaryMatrix, N: BinaryMatrix) -> BinaryMatrix:
    if M.cols != N.rows:
        raise DimensionError(f"cannot multiply {M.shape} by {N.shape}")
    # (M N)[i, j] = parity(M[i] & N^T[j])
    nt = transpose(N).data
    out = np.bitwise_count(M.data[:, None, :] & nt[None, :, :]).sum(axis=2) & 1
    return BinaryMatrix.from_dense(out.astype(np.uint8))


def matvec(M: BinaryMatrix, v: BinaryVector) -> BinaryVector:
    if M.cols != v.len:
        raise DimensionError(f"cannot multiply {M.shape} by vector of length {v.len}")
    bits = np.bitwise_count(M.data & v.data[None, :]).sum(axis=1) & 1
    return BinaryVector.from_dense(bits.astype(np.uint8))


def hstack(*mats: BinaryMatrix) -> BinaryMatrix:
    if len({m.rows for m in mats}) > 1:
        raise DimensionError("row counts differ")
    return BinaryMatrix.from_dense(np.hstack([m.to_dense() for m in mats]))


def vstack(*mats: BinaryMatrix) -> BinaryMatrix:
    if len({m.cols for m in mats}) > 1:
        raise DimensionError("column counts differ")
    cols = mats[0].cols
    data = np.concatenate([m.data for m in mats], axis=0).reshape(-1, _nwords(cols))
    return BinaryMatrix(data.shape[0], cols, data)


# elimination ----------------------------------------------------------------


def _bit(data: np.ndarray, col: int) -> np.ndarray:
    return (data[:, col // WORD] >> np.uint64(col % WORD)) & np.uint64(1)


def _rref(data: np.ndarray, cols: int, order: Iterable[int] | None = None,
          track: np.ndarray | None = None) -> tuple[np.ndarray, list[int]]:
    """Reduced row echelon form, in place on ``data``.

    ``order`` gives the column sequence in which pivots are sought. ``track``,
    if given, receives the same row operations (used for transformation
    matrices). Returns the rows reduced to the top and the pivot columns.
    """
    rows = data.shape[0]
    pivots: list[int] = []
    r = 0
    for c in (range(cols) if order is None else order):
        if r == rows:
            break
        hits = np.flatnonzero(_bit(data[r:], c)) + r
        if hits.size == 0:
            continue
        p = hits[0]
        if p != r:
            data[[r, p]] = data[[p, r]]
            if track is not None:
                track[[r, p]] = track[[p, r]]
        others = np.flatnonzero(_bit(data, c))
        others = others[others != r]
        if others.size:
            data[others] ^= data[r]
            if track is not None:
                track[others] ^= track[r]
        pivots.append(c)
        r += 1
    return data, pivots


@dataclass(frozen=True)
class Echelon:
    """Cached reduced row echelon form of a matrix.

    Membership and solving queries against the same matrix reuse this object.
    """

    cols: int
    basis: np.ndarray  # rank x words, reduced
    pivots: tuple[int, ...]

    @classmethod
    def of(cls, M: BinaryMatrix) -> Echelon:
        data, pivots = _rref(M.data.copy(), M.cols)
        return cls(M.cols, data[: len(pivots)].copy(), tuple(pivots))

    @property
    def rank(self) -> int:
        return len(self.pivots)

    def reduce(self, v: np.ndarray) -> np.ndarray:
        """Reduce packed row(s) ``v`` against the basis; zero result means membership."""
        v = np.array(v, dtype=np.uint64, copy=True)
        single = v.ndim == 1
        v = np.atleast_2d(v)
        for i, c in enumerate(self.pivots):
            hit = _bit(v, c).astype(bool)
            if hit.any():
                v[hit] ^= self.basis[i]
        return v[0] if single else v

    def contains(self, v: BinaryVector) -> bool:
        if v.len != self.cols:
            raise DimensionError(f"vector length {v.len} != {self.cols}")
        return not self.reduce(v.data).any()

    def contains_many(self, data: np.ndarray) -> np.ndarray:
        return ~self.reduce(data).any(axis=1)


def rank(M: BinaryMatrix) -> int:
    return len(_rref(M.data.copy(), M.cols)[1])


def row_echelon(M: BinaryMatrix) -> Echelon:
    return Echelon.of(M)


def kernel_basis(M: BinaryMatrix) -> BinaryMatrix:
    """Basis of the right null space ``{v : M v = 0}`` as rows."""
    ech = Echelon.of(M)
    free = [c for c in range(M.cols) if c not in set(ech.pivots)]
    dense = np.zeros((len(free), M.cols), dtype=np.uint8)
    red = _unpack(ech.basis, M.cols) if ech.rank else np.zeros((0, M.cols), dtype=np.uint8)
    for k, f in enumerate(free):
        dense[k, f] = 1
        # pivot variable i equals the sum of its row's free entries
        dense[k, list(ech.pivots)] = red[:, f]
    return BinaryMatrix.from_dense(dense)


def row_space_contains(M: BinaryMatrix | Echelon, v: BinaryVector) -> bool:
    """True iff ``v`` is a GF(2) combination of rows of ``M``.

    Pass an :class:`Echelon` to amortize elimination over repeated queries.
    """
    ech = M if isinstance(M, Echelon) else Echelon.of(M)
    return ech.contains(v)


def solve(M: BinaryMatrix, s: BinaryVector) -> BinaryVector | None:
    """Some ``e`` with ``M e = s``, free variables set to zero; None if inconsistent."""
    if s.len != M.rows:
        raise DimensionError(f"syndrome length {s.len} != rows {M.rows}")
    aug = np.hstack([M.to_dense(), s.to_dense()[:, None]])
    data, pivots = _rref(_pack(aug), M.cols)
    r = len(pivots)
    tail = _bit(data[r:], M.cols)
    if tail.any():
        return None
    rhs = _bit(data[:r], M.cols).astype(np.uint8)
    e = np.zeros(M.cols, dtype=np.uint8)
    e[pivots] = rhs
    return BinaryVector.from_dense(e)


def intersect_kernels(A: BinaryMatrix, B: BinaryMatrix) -> BinaryMatrix:
    if A.cols != B.cols:
        raise DimensionError(f"column counts differ: {A.cols} vs {B.cols}")
    return kernel_basis(vstack(A, B))


def independent_modulo(vectors: BinaryMatrix, base: BinaryMatrix) -> BinaryMatrix:
    """Rows of ``vectors`` that extend a basis of rs(base), greedily in order."""
    ech_data = base.data.copy()
    data, pivots = _rref(ech_data, base.cols)
    cur = Echelon(base.cols, data[: len(pivots)].copy(), tuple(pivots))
    picked = []
    for i in range(vectors.rows):
        red = cur.reduce(vectors.data[i])
        if not red.any():
            continue
        picked.append(i)
        stacked = np.vstack([cur.basis, vectors.data[i][None, :]])
        d2, p2 = _rref(stacked, base.cols)
        cur = Echelon(base.cols, d2[: len(p2)].copy(), tuple(p2))
    return BinaryMatrix(len(picked), vectors.cols, vectors.data[picked].copy())


# plain-text format --------------------------------------------------------------


def dumps(M: BinaryMatrix) -> str:
    lines = [f"{M.rows} {M.cols}"]
    lines += ["".join(map(str, r)) for r in M.to_dense()]
    return "\n".join(lines) + "\n"


def loads(text: str) -> BinaryMatrix:
    lines = [ln.strip() for ln in text.strip().splitlines() if ln.strip()]
    rows, cols = map(int, lines[0].split())
    body = lines[1:]
    if len(body) != rows or any(len(b) != cols or set(b) - {"0", "1"} for b in body):
        raise ValueError("malformed matrix text")
    dense = np.array([[int(ch) for ch in b] for b in body], dtype=np.uint8).reshape(rows, cols)
    return BinaryMatrix.from_dense(dense)


def save(M: BinaryMatrix, path: str | Path) -> None:
    Path(path).write_text(dumps(M))


def load(path: str | Path) -> BinaryMatrix:
    return loads(Path(path).read_text())
