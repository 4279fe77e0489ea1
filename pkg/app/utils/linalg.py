"""Exact linear algebra over the rationals on sympy's sparse DomainMatrix.

Matrices are built in dictionary-of-keys form over QQ and reduced with
DomainMatrix.rref, so ranks and kernels never leave exact arithmetic.
numpy object arrays (the K-theory tables) are accepted and converted.
"""

import logging
from fractions import Fraction
from typing import List, Mapping, Sequence, Tuple, Union

import numpy as np
from sympy.polys.domains import QQ
from sympy.polys.matrices import DomainMatrix

from app.utils.exact_core import Scalar, from_qq, to_qq

logger = logging.getLogger(__name__)

MatrixLike = Union[DomainMatrix, np.ndarray]


def sparse_matrix(rows: int, cols: int, entries: Mapping[Tuple[int, int], Scalar] = None) -> DomainMatrix:
    """A rows x cols matrix over QQ holding only the nonzero entries given."""
    dok = {}
    for (i, j), value in (entries or {}).items():
        if value:
            dok[(i, j)] = to_qq(value)
    return DomainMatrix.from_dok(dok, (rows, cols), QQ)


def as_domain_matrix(m: MatrixLike) -> DomainMatrix:
    if isinstance(m, DomainMatrix):
        return m if m.domain == QQ else m.convert_to(QQ)
    array = np.asarray(m, dtype=object)
    rows, cols = array.shape
    return sparse_matrix(rows, cols, {(i, j): array[i, j] for i in range(rows) for j in range(cols)})


def shape(m: MatrixLike) -> Tuple[int, int]:
    return tuple(m.shape)


def rank(m: MatrixLike) -> int:
    dm = as_domain_matrix(m)
    if 0 in dm.shape:
        return 0
    r = dm.rank()
    logger.debug("rank of %dx%d matrix: %d", dm.shape[0], dm.shape[1], r)
    return r


def is_zero(m: MatrixLike) -> bool:
    return not as_domain_matrix(m).to_dok()


def product(a: MatrixLike, b: MatrixLike) -> DomainMatrix:
    a, b = as_domain_matrix(a), as_domain_matrix(b)
    if a.shape[1] != b.shape[0]:
        raise ValueError(f"cannot multiply {a.shape} by {b.shape}")
    if 0 in a.shape or 0 in b.shape:
        return sparse_matrix(a.shape[0], b.shape[1])
    return a * b


def nullspace(m: MatrixLike) -> List[List[Fraction]]:
    """Basis of {v : m v = 0}, one vector per free column of the reduced form."""
    dm = as_domain_matrix(m)
    rows, cols = dm.shape
    if cols == 0:
        return []
    if rows == 0:
        return [[Fraction(int(i == j)) for i in range(cols)] for j in range(cols)]
    kernel = dm.nullspace()
    basis = [[Fraction(0)] * cols for _ in range(kernel.shape[0])]
    for (i, j), value in kernel.to_dok().items():
        basis[i][j] = from_qq(value)
    return basis


def stack_columns(m: MatrixLike, vectors: Sequence[Sequence[Scalar]]) -> DomainMatrix:
    """m with the given vectors appended as extra columns."""
    dm = as_domain_matrix(m)
    extra = sparse_matrix(dm.shape[0], len(vectors), {
        (i, j): x for j, v in enumerate(vectors) for i, x in enumerate(v)
    })
    if dm.shape[1] == 0:
        return extra
    return dm.hstack(extra)


def in_span(m: MatrixLike, v: Sequence[Scalar]) -> bool:
    """Is v a linear combination of the columns of m?"""
    if all(x == 0 for x in v):
        return True
    if shape(m)[1] == 0:
        return False
    return rank(stack_columns(m, [v])) == rank(m)


def matmul(m: MatrixLike, v: Sequence[Scalar]) -> List[Fraction]:
    dm = as_domain_matrix(m)
    column = sparse_matrix(len(v), 1, {(i, 0): x for i, x in enumerate(v)})
    out = [Fraction(0)] * dm.shape[0]
    for (i, _), value in product(dm, column).to_dok().items():
        out[i] = from_qq(value)
    return out
