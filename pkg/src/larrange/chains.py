"""Sparse signed chains and boundary-operator matrices.

Chains carry coefficients in {-1, 0, +1}.  Arithmetic is ordinary integer
arithmetic followed by a range check: in a coherently oriented complex every
sum cancels back into range, so a surviving +-2 means the input is broken.

Operators are stored as canonical CSC matrices (sorted row indices, no
explicit zeros, int8 data).  Two operators are equal iff their canonical
arrays are identical.
"""

from __future__ import annotations

from typing import Iterable, Mapping

import numpy as np
import scipy.io
import scipy.sparse as sps

from .errors import CoefficientOverflow, DimensionMismatch, IndexOutOfRange


class SignedChain:
    """Sparse coordinate vector of a p-chain over a basis of ``size`` cells."""

    __slots__ = ("dim", "size", "indices", "values")

    def __init__(self, dim: int, size: int, indices=(), values=()):
        idx = np.asarray(indices, dtype=np.int64).ravel()
        val = np.asarray(values, dtype=np.int64).ravel()
        if idx.shape != val.shape:
            raise DimensionMismatch("indices and values differ in length")
        keep = val != 0
        idx, val = idx[keep], val[keep]
        order = np.argsort(idx, kind="stable")
        idx, val = idx[order], val[order]
        if idx.size and (idx[0] < 0 or idx[-1] >= size):
            raise IndexOutOfRange(f"chain index outside basis of size {size}")
        if idx.size > 1 and np.any(np.diff(idx) == 0):
            raise ValueError("duplicate chain indices")
        if np.any(np.abs(val) > 1):
            raise CoefficientOverflow("chain coefficient outside {-1,0,+1}")
        self.dim = int(dim)
        self.size = int(size)
        self.indices = idx
        self.values = val.astype(np.int8)
        self.indices.setflags(write=False)
        self.values.setflags(write=False)

    @classmethod
    def from_dict(cls, dim: int, size: int, mapping: Mapping[int, int]) -> "SignedChain":
        items = sorted((int(k), int(v)) for k, v in mapping.items() if v)
        return cls(dim, size, [k for k, _ in items], [v for _, v in items])

    @classmethod
    def unit(cls, dim: int, size: int, index: int, sign: int = 1) -> "SignedChain":
        return cls(dim, size, [index], [sign])

    @classmethod
    def zero(cls, dim: int, size: int) -> "SignedChain":
        return cls(dim, size)

    @classmethod
    def from_dense(cls, dim: int, vector) -> "SignedChain":
        v = np.asarray(vector, dtype=np.int64).ravel()
        nz = np.flatnonzero(v)
        return cls(dim, v.size, nz, v[nz])

    def to_dict(self) -> dict[int, int]:
        return {int(i): int(v) for i, v in zip(self.indices, self.values)}

    def to_dense(self) -> np.ndarray:
        out = np.zeros(self.size, dtype=np.int64)
        out[self.indices] = self.values
        return out

    @property
    def support(self) -> tuple[int, ...]:
        return tuple(int(i) for i in self.indices)

    def is_zero(self) -> bool:
        return self.indices.size == 0

    def __len__(self) -> int:
        return int(self.indices.size)

    def __neg__(self) -> "SignedChain":
        return SignedChain(self.dim, self.size, self.indices, -self.values.astype(np.int64))

    def __add__(self, other: "SignedChain") -> "SignedChain":
        if self.size != other.size or self.dim != other.dim:
            raise DimensionMismatch("chains live in different spaces")
        total = self.to_dense() + other.to_dense()
        if np.any(np.abs(total) > 1):
            raise CoefficientOverflow("chain sum left {-1,0,+1}")
        return SignedChain.from_dense(self.dim, total)

    def __sub__(self, other: "SignedChain") -> "SignedChain":
        return self + (-other)

    def __eq__(self, other) -> bool:
        if not isinstance(other, SignedChain):
            return NotImplemented
        return (
            self.dim == other.dim
            and self.size == other.size
            and np.array_equal(self.indices, other.indices)
            and np.array_equal(self.values, other.values)
        )

    def __hash__(self):
        return hash((self.dim, self.size, self.indices.tobytes(), self.values.tobytes()))

    def __repr__(self) -> str:
        terms = " ".join(f"{'+' if v > 0 else '-'}{i}" for i, v in zip(self.indices, self.values))
        return f"SignedChain(dim={self.dim}, size={self.size}, [{terms}])"


def _canonical_csc(matrix, dtype) -> sps.csc_matrix:
    m = sps.csc_matrix(matrix, dtype=np.int64)
    m.sum_duplicates()
    m.eliminate_zeros()
    m.sort_indices()
    return sps.csc_matrix(
        (m.data.astype(dtype), m.indices.astype(np.int32), m.indptr.astype(np.int32)),
        shape=m.shape,
    )


class SignedOperator:
    """Matrix of a boundary map with entries in {-1, +1}, in canonical CSC form.

    ``grade`` is the dimension p of the domain (so the operator is the matrix
    of the boundary map from p-chains to (p-1)-chains); it is optional.
    """

    __slots__ = ("matrix", "grade")

    def __init__(self, matrix, grade: int | None = None):
        m = _canonical_csc(matrix, np.int8)
        if m.nnz and np.any(np.abs(m.data) != 1):
            raise CoefficientOverflow("operator entries must be +-1")
        for a in (m.data, m.indices, m.indptr):
            a.setflags(write=False)
        self.matrix = m
        self.grade = grade

    @classmethod
    def from_columns(cls, nrows: int, columns: Iterable[Mapping[int, int]], grade=None):
        rows, cols, vals = [], [], []
        ncols = 0
        for j, col in enumerate(columns):
            ncols = j + 1
            for i, v in col.items():
                if v:
                    if not 0 <= i < nrows:
                        raise IndexOutOfRange(f"row {i} outside 0..{nrows - 1}")
                    rows.append(i)
                    cols.append(j)
                    vals.append(v)
        m = sps.coo_matrix(
            (np.asarray(vals, dtype=np.int64), (np.asarray(rows, dtype=np.int64), np.asarray(cols, dtype=np.int64))),
            shape=(nrows, ncols),
        )
        return cls(m, grade)

    @classmethod
    def from_coo(cls, shape, triples, grade=None):
        triples = list(triples)
        if triples:
            arr = np.asarray(triples, dtype=np.int64).reshape(-1, 3)
            i, j, v = arr[:, 0], arr[:, 1], arr[:, 2]
        else:
            i = j = v = np.zeros(0, dtype=np.int64)
        m, n = shape
        if i.size and (i.min() < 0 or i.max() >= m or j.min() < 0 or j.max() >= n):
            raise IndexOutOfRange("COO index outside matrix shape")
        return cls(sps.coo_matrix((v, (i, j)), shape=(m, n)), grade)

    @classmethod
    def from_dense(cls, array, grade=None):
        return cls(sps.csc_matrix(np.asarray(array, dtype=np.int64)), grade)

    @classmethod
    def empty(cls, nrows: int, ncols: int = 0, grade=None):
        return cls(sps.csc_matrix((nrows, ncols), dtype=np.int8), grade)

    @property
    def shape(self) -> tuple[int, int]:
        return self.matrix.shape

    @property
    def rows(self) -> int:
        return self.matrix.shape[0]

    @property
    def cols(self) -> int:
        return self.matrix.shape[1]

    @property
    def nnz(self) -> int:
        return int(self.matrix.nnz)

    def column(self, j: int) -> tuple[np.ndarray, np.ndarray]:
        if not 0 <= j < self.cols:
            raise IndexOutOfRange(f"column {j} outside 0..{self.cols - 1}")
        lo, hi = self.matrix.indptr[j], self.matrix.indptr[j + 1]
        return self.matrix.indices[lo:hi], self.matrix.data[lo:hi]

    def column_dict(self, j: int) -> dict[int, int]:
        r, v = self.column(j)
        return {int(a): int(b) for a, b in zip(r, v)}

    def column_chain(self, j: int) -> SignedChain:
        r, v = self.column(j)
        dim = self.grade - 1 if self.grade is not None else 0
        return SignedChain(dim, self.rows, r, v)

    def columns(self) -> list[dict[int, int]]:
        return [self.column_dict(j) for j in range(self.cols)]

    def to_coo(self) -> list[tuple[int, int, int]]:
        c = self.matrix.tocoo()
        order = np.lexsort((c.row, c.col))
        return [(int(c.row[k]), int(c.col[k]), int(c.data[k])) for k in order]

    def toarray(self) -> np.ndarray:
        return self.matrix.toarray().astype(np.int64)

    def csr(self) -> sps.csr_matrix:
        return self.matrix.tocsr()

    def __eq__(self, other) -> bool:
        if not isinstance(other, SignedOperator):
            return NotImplemented
        a, b = self.matrix, other.matrix
        return (
            a.shape == b.shape
            and np.array_equal(a.indptr, b.indptr)
            and np.array_equal(a.indices, b.indices)
            and np.array_equal(a.data, b.data)
        )

    def __hash__(self):
        return hash((self.shape, self.matrix.indices.tobytes(), self.matrix.data.tobytes()))

    def __repr__(self) -> str:
        return f"SignedOperator(shape={self.shape}, nnz={self.nnz})"


class UnsignedMatrix:
    """Binary matrix in CSR form (implicit value 1), e.g. a characteristic matrix."""

    __slots__ = ("matrix",)

    def __init__(self, matrix):
        m = sps.csr_matrix(matrix, dtype=np.int64)
        m.sum_duplicates()
        m.eliminate_zeros()
        m.sort_indices()
        m = sps.csr_matrix(
            (np.ones(m.nnz, dtype=np.int8), m.indices.astype(np.int32), m.indptr.astype(np.int32)),
            shape=m.shape,
        )
        self.matrix = m

    @classmethod
    def from_rows(cls, rows: Iterable[Iterable[int]], ncols: int):
        indptr, indices = [0], []
        for r in rows:
            r = sorted(set(int(k) for k in r))
            if r and (r[0] < 0 or r[-1] >= ncols):
                raise IndexOutOfRange(f"column index outside 0..{ncols - 1}")
            indices.extend(r)
            indptr.append(len(indices))
        m = sps.csr_matrix(
            (np.ones(len(indices), dtype=np.int8), np.asarray(indices, dtype=np.int32), np.asarray(indptr, dtype=np.int32)),
            shape=(len(indptr) - 1, ncols),
        )
        return cls(m)

    @classmethod
    def from_dense(cls, array):
        return cls(sps.csr_matrix(np.asarray(array) != 0))

    @property
    def shape(self):
        return self.matrix.shape

    @property
    def nnz(self) -> int:
        return int(self.matrix.nnz)

    def row(self, i: int) -> np.ndarray:
        return self.matrix.indices[self.matrix.indptr[i]:self.matrix.indptr[i + 1]]

    def rows(self) -> list[tuple[int, ...]]:
        return [tuple(int(k) for k in self.row(i)) for i in range(self.shape[0])]

    def transpose(self) -> "UnsignedMatrix":
        return UnsignedMatrix(self.matrix.T)

    def toarray(self) -> np.ndarray:
        return self.matrix.toarray().astype(np.int64)

    def __eq__(self, other) -> bool:
        if not isinstance(other, UnsignedMatrix):
            return NotImplemented
        a, b = self.matrix, other.matrix
        return a.shape == b.shape and np.array_equal(a.indptr, b.indptr) and np.array_equal(a.indices, b.indices)

    def __repr__(self):
        return f"UnsignedMatrix(shape={self.shape}, nnz={self.nnz})"


class IntegerMatrix:
    """Sparse matrix of nonnegative integer counts (CSR)."""

    __slots__ = ("matrix",)

    def __init__(self, matrix):
        m = sps.csr_matrix(matrix, dtype=np.int64)
        m.sum_duplicates()
        m.eliminate_zeros()
        m.sort_indices()
        if m.nnz and m.data.min() < 1:
            raise ValueError("IntegerMatrix entries must be positive where stored")
        self.matrix = m

    @property
    def shape(self):
        return self.matrix.shape

    def toarray(self) -> np.ndarray:
        return self.matrix.toarray()

    def __repr__(self):
        return f"IntegerMatrix(shape={self.shape}, nnz={self.matrix.nnz})"


def apply_operator(op, c: SignedChain, mod2: bool = False) -> SignedChain:
    """Exact integer product ``op @ c``.

    With an :class:`UnsignedMatrix` and ``mod2=True`` the product is reduced
    modulo 2, which is how unoriented boundaries are evaluated.
    """
    if c.size != op.shape[1]:
        raise DimensionMismatch(f"chain of size {c.size} vs operator with {op.shape[1]} columns")
    if isinstance(op, SignedOperator) and op.grade is not None and c.dim != op.grade:
        raise DimensionMismatch(f"{c.dim}-chain fed to boundary of grade {op.grade}")
    m = op.matrix
    if c.indices.size == 0:
        out = np.zeros(m.shape[0], dtype=np.int64)
    else:
        sub = m[:, c.indices].astype(np.int64)
        out = np.asarray(sub @ c.values.astype(np.int64)).ravel()
    dim = c.dim - 1 if c.dim > 0 else 0
    if mod2:
        if not isinstance(op, UnsignedMatrix):
            raise TypeError("mod 2 evaluation is defined for unsigned matrices")
        return SignedChain.from_dense(dim, np.abs(out) % 2)
    if np.any(np.abs(out) > 1):
        raise CoefficientOverflow("boundary coefficient of magnitude >= 2 survived cancellation")
    return SignedChain.from_dense(dim, out)


def transpose(op: SignedOperator) -> SignedOperator:
    """Matrix of the dual (coboundary) map."""
    return SignedOperator(op.matrix.T)


def unsigned_product(A: UnsignedMatrix, B: UnsignedMatrix) -> IntegerMatrix:
    """``A @ B.T``: entry (i, j) counts the common members of row i of A and row j of B."""
    if A.shape[1] != B.shape[1]:
        raise DimensionMismatch(f"{A.shape} vs {B.shape}: column counts differ")
    prod = A.matrix.astype(np.int64) @ B.matrix.T.astype(np.int64)
    return IntegerMatrix(prod)


def filter_entries(M: IntegerMatrix, k: int) -> UnsignedMatrix:
    """Binary matrix of the positions where ``M`` equals ``k``."""
    if k < 1:
        raise ValueError("filter value must be >= 1")
    m = M.matrix.copy()
    m.data = (m.data == k).astype(np.int64)
    return UnsignedMatrix(m)


def append_column(op: SignedOperator, column: Mapping[int, int] | SignedChain) -> SignedOperator:
    if isinstance(column, SignedChain):
        if column.size != op.rows:
            raise DimensionMismatch("column length differs from operator rows")
        column = column.to_dict()
    new = SignedOperator.from_columns(op.rows, [column])
    return SignedOperator(sps.hstack([op.matrix, new.matrix], format="csc"), op.grade)


def remove_column(op: SignedOperator, j: int) -> SignedOperator:
    if not 0 <= j < op.cols:
        raise IndexOutOfRange(f"column {j} outside 0..{op.cols - 1}")
    keep = np.r_[0:j, j + 1:op.cols]
    return SignedOperator(op.matrix[:, keep], op.grade)


def negate_column(op: SignedOperator, j: int) -> SignedOperator:
    if not 0 <= j < op.cols:
        raise IndexOutOfRange(f"column {j} outside 0..{op.cols - 1}")
    m = op.matrix.astype(np.int64).tolil()
    m[:, j] = -m[:, j]
    return SignedOperator(m, op.grade)


def column_ops(op: SignedOperator, action: str, payload) -> SignedOperator:
    """Dispatch for ``append`` (payload: column), ``remove`` and ``negate`` (payload: index)."""
    if action == "append":
        return append_column(op, payload)
    if action == "remove":
        return remove_column(op, payload)
    if action == "negate":
        return negate_column(op, payload)
    raise ValueError(f"unknown column action {action!r}")


def hstack(nrows: int, blocks: Iterable[SignedOperator], grade=None) -> SignedOperator:
    mats = [b.matrix for b in blocks]
    if not mats:
        return SignedOperator.empty(nrows, 0, grade)
    return SignedOperator(sps.hstack(mats, format="csc"), grade)


def write_matrix_market(path, op) -> None:
    """Write an operator in the coordinate integer Matrix Market format."""
    m = op.matrix.tocoo().astype(np.int64)
    scipy.io.mmwrite(str(path), m, field="integer")


def read_matrix_market(path, grade=None) -> SignedOperator:
    return SignedOperator(scipy.io.mmread(str(path)), grade)
