"""Exact and float linear algebra on small dense matrices and sparse operators."""
from collections import defaultdict
from typing import Dict, List, Sequence, Tuple

import numpy as np

from core.errors import InputError
from core.math import Scalar, ScalarField

Vector = Dict[int, Scalar]


class SingularMatrix(InputError):
    """Matrix has no inverse."""
    pass


def invert(matrix: Sequence[Sequence[Scalar]], field: ScalarField) -> List[List[Scalar]]:
    """
    Invert a square matrix.

    Exact mode runs Gauss-Jordan elimination over Fraction; float mode uses numpy.

    Args:
        matrix: Row-major square matrix
        field: Scalar field of the entries

    Returns:
        The inverse, row-major
    """
    n = len(matrix)
    if any(len(row) != n for row in matrix):
        raise InputError("matrix is not square")
    if n == 0:
        return []
    if not field.exact:
        dense = np.array([[complex(x) for x in row] for row in matrix], dtype=complex)
        if np.linalg.matrix_rank(dense, tol=field.tolerance) < n:
            raise SingularMatrix("matrix is singular")
        return np.linalg.inv(dense).tolist()

    work = [[field.convert(x) for x in row] + [field.one() if i == j else field.zero() for j in range(n)]
            for i, row in enumerate(matrix)]
    for col in range(n):
        pivot = next((r for r in range(col, n) if work[r][col] != 0), None)
        if pivot is None:
            raise SingularMatrix("matrix is singular")
        work[col], work[pivot] = work[pivot], work[col]
        scale = work[col][col]
        work[col] = [x / scale for x in work[col]]
        for r in range(n):
            if r != col and work[r][col] != 0:
                factor = work[r][col]
                work[r] = [x - factor * y for x, y in zip(work[r], work[col])]
    return [row[n:] for row in work]


class SparseMatrix:
    """
    Sparse matrix over a ScalarField.

    Rows index the codomain, columns the domain; absent entries are zero.
    """

    def __init__(self, shape: Tuple[int, int], entries: Dict[Tuple[int, int], Scalar], field: ScalarField):
        self.shape = shape
        self.field = field
        self.entries = {key: value for key, value in entries.items() if value != 0}

    @classmethod
    def identity(cls, n: int, field: ScalarField) -> "SparseMatrix":
        return cls((n, n), {(i, i): field.one() for i in range(n)}, field)

    def __matmul__(self, other: "SparseMatrix") -> "SparseMatrix":
        if self.shape[1] != other.shape[0]:
            raise InputError(f"cannot compose {self.shape} with {other.shape}")
        by_row = defaultdict(list)
        for (k, j), value in other.entries.items():
            by_row[k].append((j, value))
        result = defaultdict(lambda: self.field.zero())
        for (i, k), value in self.entries.items():
            for j, other_value in by_row.get(k, ()):
                result[i, j] += value * other_value
        return SparseMatrix((self.shape[0], other.shape[1]), dict(result), self.field)

    def kron(self, other: "SparseMatrix") -> "SparseMatrix":
        """Tensor product with row-major (self outer, other inner) index order."""
        rows, cols = other.shape
        entries = {}
        for (i, j), a in self.entries.items():
            for (k, l), b in other.entries.items():
                entries[i * rows + k, j * cols + l] = a * b
        return SparseMatrix((self.shape[0] * rows, self.shape[1] * cols), entries, self.field)

    def column(self, j: int) -> Vector:
        return {i: value for (i, jj), value in self.entries.items() if jj == j}

    def columns(self) -> Dict[int, Vector]:
        cols = defaultdict(dict)
        for (i, j), value in self.entries.items():
            cols[j][i] = value
        return cols

    def apply(self, vector: Vector) -> Vector:
        result = defaultdict(lambda: self.field.zero())
        for (i, j), value in self.entries.items():
            if j in vector:
                result[i] += value * vector[j]
        return {i: v for i, v in result.items() if v != 0}

    def trace(self) -> Scalar:
        return sum((v for (i, j), v in self.entries.items() if i == j), self.field.zero())

    def residual(self, other: "SparseMatrix"):
        """Largest entrywise difference."""
        if self.shape != other.shape:
            raise InputError(f"shape mismatch {self.shape} vs {other.shape}")
        keys = set(self.entries) | set(other.entries)
        zero = self.field.zero()
        return max((self.field.residual(self.entries.get(k, zero), other.entries.get(k, zero)) for k in keys),
                   default=self.field.residual(zero, zero))

    def to_dense(self) -> np.ndarray:
        dtype = object if self.field.exact else complex
        dense = np.zeros(self.shape, dtype=dtype)
        if self.field.exact:
            dense[:] = self.field.zero()
        for (i, j), value in self.entries.items():
            dense[i, j] = value
        return dense

    def __repr__(self):
        return f"SparseMatrix(shape={self.shape}, nnz={len(self.entries)})"


class EchelonBasis:
    """
    Incrementally built reduced row echelon basis of a span of sparse vectors.

    Every stored vector has a pivot entry equal to one that vanishes in all other stored
    vectors, so coordinates of a vector in the span are read off at the pivots.
    """

    def __init__(self, field: ScalarField):
        self.field = field
        self.vectors: List[Vector] = []
        self.pivots: List[int] = []

    def __len__(self):
        return len(self.vectors)

    def reduce(self, vector: Vector) -> Vector:
        work = dict(vector)
        for pivot, row in zip(self.pivots, self.vectors):
            factor = work.get(pivot)
            if factor is None or factor == 0:
                continue
            for i, value in row.items():
                work[i] = work.get(i, self.field.zero()) - factor * value
        return {i: v for i, v in work.items() if not self.field.is_zero(v)}

    def add(self, vector: Vector) -> bool:
        """Insert a vector; returns False when it already lies in the span."""
        rest = self.reduce(vector)
        if not rest:
            return False
        if self.field.exact:
            pivot = min(rest)
        else:
            pivot = max(sorted(rest), key=lambda i: abs(rest[i]))
        scale = rest[pivot]
        rest = {i: v / scale for i, v in rest.items()}
        for k, row in enumerate(self.vectors):
            factor = row.get(pivot)
            if factor is None or factor == 0:
                continue
            updated = dict(row)
            for i, value in rest.items():
                updated[i] = updated.get(i, self.field.zero()) - factor * value
            self.vectors[k] = {i: v for i, v in updated.items() if not self.field.is_zero(v)}
        self.vectors.append(rest)
        self.pivots.append(pivot)
        return True

    def coordinates(self, vector: Vector) -> List[Scalar]:
        """Coordinates of a vector of the span with respect to the stored basis."""
        zero = self.field.zero()
        return [vector.get(p, zero) for p in self.pivots]

    def contains(self, vector: Vector) -> bool:
        return not self.reduce(vector)


def image_basis(matrix: SparseMatrix, rank: int = None) -> EchelonBasis:
    """
    Echelon basis of the column space, stopping early once rank columns are independent.

    Args:
        matrix: Operator whose image is wanted
        rank: Known rank, e.g. the trace of an idempotent
    """
    basis = EchelonBasis(matrix.field)
    for j, column in sorted(matrix.columns().items()):
        if rank is not None and len(basis) >= rank:
            break
        basis.add(column)
    return basis


def numeric_rank(matrix: SparseMatrix) -> int:
    """Rank of the dense view, computed by numpy."""
    if matrix.field.exact:
        dense = np.array(matrix.to_dense(), dtype=float)
        return int(np.linalg.matrix_rank(dense))
    return int(np.linalg.matrix_rank(matrix.to_dense(), tol=matrix.field.tolerance))


def gf2_rank(rows: Sequence[int]) -> int:
    """Rank over GF(2) of rows given as int bitmasks."""
    pivots = {}
    for row in rows:
        while row:
            top = row.bit_length() - 1
            if top not in pivots:
                pivots[top] = row
                break
            row ^= pivots[top]
    return len(pivots)
