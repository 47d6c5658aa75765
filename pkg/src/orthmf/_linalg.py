"""Exact rational linear algebra.

Dense exact matrices are numpy object arrays of ``Fraction``.  Sparse rows
are ``dict`` objects mapping a column index to a nonzero ``Fraction``.
Row reduction is delegated to sympy's ``DomainMatrix`` over QQ, which uses
gmpy2 rationals when available.
"""
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np
from sympy import QQ
from sympy.polys.matrices import DomainMatrix

SparseRow = dict


def frac(x) -> Fraction:
    """Coerce ints, strings "p/q", Fractions and QQ elements to ``Fraction``."""
    if isinstance(x, Fraction):
        if type(x.numerator) is int and type(x.denominator) is int:
            return x
        return Fraction(int(x.numerator), int(x.denominator))
    if isinstance(x, (int, np.integer)):
        return Fraction(int(x))
    if isinstance(x, str):
        return Fraction(x.strip())
    if hasattr(x, "numerator") and hasattr(x, "denominator"):
        return Fraction(int(x.numerator), int(x.denominator))
    if isinstance(x, float) and x.is_integer():
        return Fraction(int(x))
    raise TypeError(f"cannot convert {x!r} to an exact rational")


def qarray(a) -> np.ndarray:
    """Return ``a`` as a numpy object array of Fractions (1-D or 2-D)."""
    arr = np.array(a, dtype=object)
    out = np.empty(arr.shape, dtype=object)
    for idx, x in np.ndenumerate(arr):
        out[idx] = frac(x)
    return out


def qeye(n: int) -> np.ndarray:
    out = np.full((n, n), Fraction(0), dtype=object)
    for i in range(n):
        out[i, i] = Fraction(1)
    return out


def qzeros(shape) -> np.ndarray:
    return np.full(shape, Fraction(0), dtype=object)


def to_float(a) -> np.ndarray:
    return np.array(a, dtype=object).astype(float)


def fstr(x: Fraction) -> str:
    """Serialize a rational as "p/q" (or "p" when integral)."""
    x = frac(x)
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def _q(x: Fraction):
    return QQ(x.numerator, x.denominator)


def _dm_from_sparse(rows: Sequence[SparseRow], ncols: int) -> DomainMatrix:
    data = {}
    for i, row in enumerate(rows):
        r = {j: _q(v) for j, v in row.items() if v}
        if r:
            data[i] = r
    return DomainMatrix(data, (len(rows), ncols), QQ)


def _dm_from_dense(a: np.ndarray) -> DomainMatrix:
    a = np.asarray(a, dtype=object)
    rows = [{j: frac(a[i, j]) for j in range(a.shape[1]) if a[i, j] != 0} for i in range(a.shape[0])]
    return _dm_from_sparse(rows, a.shape[1])


def _sparse_from_dm(dm: DomainMatrix) -> list:
    sdm = dm.to_sparse().rep
    out = []
    for i in range(dm.shape[0]):
        row = sdm.get(i, {})
        out.append({j: frac(v) for j, v in sorted(row.items())})
    return out


def sparse_to_dense(rows: Sequence[SparseRow], ncols: int) -> np.ndarray:
    out = qzeros((len(rows), ncols))
    for i, row in enumerate(rows):
        for j, v in row.items():
            out[i, j] = v
    return out


def dense_to_sparse(a) -> list:
    a = np.asarray(a, dtype=object)
    return [{j: frac(a[i, j]) for j in range(a.shape[1]) if a[i, j] != 0} for i in range(a.shape[0])]


def sparse_rref(rows: Sequence[SparseRow], ncols: int) -> tuple[list, tuple]:
    """Reduced row echelon form of sparse rows; zero rows are dropped."""
    if not rows:
        return [], ()
    r, pivots = _dm_from_sparse(rows, ncols).rref()
    out = _sparse_from_dm(r)[: len(pivots)]
    return out, tuple(int(p) for p in pivots)


def sparse_nullspace(rows: Sequence[SparseRow], ncols: int) -> list:
    """Basis (in RREF) of {x : row . x = 0 for every row}."""
    if ncols == 0:
        return []
    reduced, pivots = sparse_rref(rows, ncols)
    pivot_set = set(pivots)
    basis = []
    for free in range(ncols):
        if free in pivot_set:
            continue
        vec = {free: Fraction(1)}
        for row, p in zip(reduced, pivots):
            v = row.get(free)
            if v:
                vec[p] = -v
        basis.append(dict(sorted(vec.items())))
    return sparse_rref(basis, ncols)[0]


def rref(a) -> tuple[np.ndarray, tuple]:
    a = qarray(a)
    if a.size == 0:
        return a.reshape(0, a.shape[1] if a.ndim == 2 else 0), ()
    rows, pivots = sparse_rref(dense_to_sparse(a), a.shape[1])
    return sparse_to_dense(rows, a.shape[1]), pivots


def rank(a) -> int:
    return len(rref(a)[1])


def nullspace(a) -> np.ndarray:
    """Rows spanning the right kernel of ``a``, in RREF."""
    a = qarray(a)
    ncols = a.shape[1]
    return sparse_to_dense(sparse_nullspace(dense_to_sparse(a), ncols), ncols)


def left_nullspace(a) -> np.ndarray:
    return nullspace(qarray(a).T)


def det(a) -> Fraction:
    return frac(_dm_from_dense(qarray(a)).det())


def inverse(a) -> np.ndarray:
    a = qarray(a)
    inv = _dm_from_dense(a).inv()
    return sparse_to_dense(_sparse_from_dm(inv), a.shape[0])


def solve(a, b) -> np.ndarray:
    """Solve a x = b exactly for square invertible ``a``."""
    return inverse(a).dot(qarray(b))


def row_space_equal(a, b) -> bool:
    ra, pa = rref(a)
    rb, pb = rref(b)
    return pa == pb and bool(np.all(ra[: len(pa)] == rb[: len(pb)]))


def intersect_rowspaces(a, b) -> np.ndarray:
    """RREF basis of rowspace(a) intersected with rowspace(b)."""
    a = qarray(a)
    b = qarray(b)
    if a.shape[0] == 0 or b.shape[0] == 0:
        return qzeros((0, a.shape[1]))
    # x a = y b  <=>  (x, -y) [a; b] = 0
    kernel = left_nullspace(np.vstack([a, -b]))
    if kernel.shape[0] == 0:
        return qzeros((0, a.shape[1]))
    vecs = kernel[:, : a.shape[0]].dot(a)
    return rref(vecs)[0][: rank(vecs)]


def in_rowspace(vec, reduced_rows: Sequence[SparseRow], pivots: Sequence[int]) -> bool:
    """Membership of a sparse vector in the span of RREF rows."""
    residual = dict(vec)
    for row, p in zip(reduced_rows, pivots):
        c = residual.get(p)
        if c:
            for j, v in row.items():
                nv = residual.get(j, Fraction(0)) - c * v
                if nv:
                    residual[j] = nv
                else:
                    residual.pop(j, None)
    return not any(residual.values())


def lcm_denominator(values: Iterable) -> int:
    from math import lcm
    out = 1
    for v in values:
        out = lcm(out, frac(v).denominator)
    return out
