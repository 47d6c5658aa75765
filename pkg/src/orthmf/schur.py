"""Orthogonal Schur functors on explicit tensor spaces.

The representation attached to a partition λ of d is realised as

    V_λ = c_λ · V^[d]  ⊂  V^{⊗d},

where V^[d] is the space of traceless tensors (killed by every pairwise
contraction with the Gram form) and c_λ = b_λ a_λ is the Young symmetrizer
of the column canonical tableau.  Bases are exact and in reduced row
echelon form with respect to the lexicographic order of tensor monomials,
so they are reproducible.

Every contraction and every place permutation preserves the grading of
V^{⊗d} by torus weights, so the kernels are computed one weight block at a
time and merged.
"""
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property, lru_cache
from itertools import permutations, product
from typing import Optional, Sequence

import numpy as np
import scipy.sparse as sp

from . import _linalg as la
from .config import size_cap
from .errors import NotInvariant, NotOrthogonal, SizeCapExceeded

__all__ = [
    "Partition", "partition", "QuadraticSpace", "SplitQuadraticSpace",
    "ExactSubspace", "SchurSpace", "traceless_subspace",
    "young_symmetrizer", "young_symmetrizer_matrix", "schur_space",
    "weyl_dimension_oracle", "predicted_dimension", "so_restriction",
    "corank", "act_on_schur", "act_on_schur_numeric", "invariant_subspace",
    "highest_weight_vector", "unipotent_generators", "torus_element",
    "schur_gram", "quadratic_space", "space_eichler", "subspace_from_vectors",
]


# ---------------------------------------------------------------- partitions

@dataclass(frozen=True)
class Partition:
    """A partition λ labelling an irreducible O(n)-representation."""

    parts: tuple
    n: int

    @property
    def size(self) -> int:
        return sum(self.parts)

    @property
    def length(self) -> int:
        return len(self.parts)

    @property
    def lambda1(self) -> int:
        return self.parts[0] if self.parts else 0

    @cached_property
    def conjugate(self) -> tuple:
        if not self.parts:
            return ()
        return tuple(sum(1 for p in self.parts if p > j) for j in range(self.parts[0]))

    def padded(self, length: Optional[int] = None) -> tuple:
        length = self.n if length is None else length
        return self.parts + (0,) * (length - len(self.parts))

    @property
    def is_trivial(self) -> bool:
        return not self.parts

    @property
    def is_det(self) -> bool:
        return self.parts == (1,) * self.n

    @property
    def is_scalar(self) -> bool:
        """True for the one-dimensional representations 1 and det."""
        return self.is_trivial or self.is_det

    def prime(self) -> "Partition":
        """λ' = (λ_2, ..., λ_{n-1}) as a partition for O(n-2)."""
        p = self.padded()[1:self.n - 1]
        return partition([x for x in p if x], self.n - 2)

    def __str__(self) -> str:
        return "(" + ",".join(map(str, self.parts)) + ")"


def partition(parts, n: int) -> Partition:
    """Validate a partition for O(n): weakly decreasing, ᵗλ₁ + ᵗλ₂ ≤ n."""
    if isinstance(parts, int):
        parts = [parts]
    parts = [int(p) for p in parts]
    if any(p < 0 for p in parts):
        raise ValueError("parts must be non-negative")
    if any(a < b for a, b in zip(parts, parts[1:])):
        raise ValueError("parts must be weakly decreasing")
    parts = tuple(p for p in parts if p)
    lam = Partition(parts, int(n))
    c = lam.conjugate + (0, 0)
    if c[0] + c[1] > n:
        raise ValueError(f"partition {lam} is not admissible for O({n})")
    return lam


# ---------------------------------------------------------- quadratic spaces

@dataclass(frozen=True)
class QuadraticSpace:
    """A rational quadratic space Q^n with nondegenerate Gram matrix."""

    gram: tuple

    @property
    def dim(self) -> int:
        return len(self.gram)

    @cached_property
    def G(self) -> np.ndarray:
        return la.qarray(self.gram)

    @cached_property
    def G_float(self) -> np.ndarray:
        return la.to_float(self.G)

    @cached_property
    def letter_weights(self) -> tuple:
        """A grading of the basis with G_ij ≠ 0 only between opposite weights.

        Each bipartite connected component of the graph of nonzero Gram
        entries gets its own weight ±1; components with loops get 0.  For
        the split form this recovers the weights of the diagonal torus.
        """
        n = self.dim
        adj = [[j for j in range(n) if self.gram[i][j] != 0] for i in range(n)]
        color = [None] * n
        comp = [None] * n
        ncomp = 0
        for s in range(n):
            if comp[s] is not None:
                continue
            stack, members, bip = [s], [], True
            comp[s], color[s] = ncomp, 1
            while stack:
                i = stack.pop()
                members.append(i)
                for j in adj[i]:
                    if j == i:
                        bip = False
                    elif comp[j] is None:
                        comp[j], color[j] = ncomp, -color[i]
                        stack.append(j)
                    elif color[j] == color[i]:
                        bip = False
            if not bip:
                for i in members:
                    color[i] = 0
            ncomp += 1
        out = []
        for i in range(n):
            w = [0] * ncomp
            w[comp[i]] = color[i]
            out.append(tuple(w))
        return tuple(out)


class SplitQuadraticSpace(QuadraticSpace):
    """Q^n with the anti-diagonal form (e_i, e_j) = 1 iff i + j = n + 1."""

    def __init__(self, n: int):
        gram = tuple(tuple(Fraction(int(i + j == n - 1)) for j in range(n)) for i in range(n))
        object.__setattr__(self, "gram", gram)

    def __repr__(self) -> str:
        return f"SplitQuadraticSpace({self.dim})"


def quadratic_space(gram) -> QuadraticSpace:
    g = la.qarray(gram)
    if not np.array_equal(g, g.T) or la.det(g) == 0:
        raise ValueError("Gram matrix must be symmetric and nondegenerate")
    return QuadraticSpace(tuple(tuple(r) for r in g))


def _check_cap(n: int, d: int) -> None:
    if n ** d > size_cap():
        raise SizeCapExceeded(f"n^d = {n}^{d} exceeds the size cap {size_cap()}")


# ---------------------------------------------------------- exact subspaces

@dataclass(frozen=True)
class ExactSubspace:
    """Subspace of Q^ncols given by sparse RREF rows and their pivots."""

    rows: tuple
    pivots: tuple
    ncols: int

    @property
    def dim(self) -> int:
        return len(self.rows)

    def dense(self) -> np.ndarray:
        return la.sparse_to_dense(self.rows, self.ncols)

    @cached_property
    def as_float(self) -> np.ndarray:
        out = np.zeros((self.dim, self.ncols))
        for i, row in enumerate(self.rows):
            for j, v in row.items():
                out[i, j] = float(v)
        return out

    def contains(self, vec: dict) -> bool:
        return la.in_rowspace(vec, self.rows, self.pivots)

    def coordinates(self, vec: dict) -> list:
        """Coordinates of ``vec`` in this basis; raises NotInvariant if outside."""
        coords = [vec.get(p, Fraction(0)) for p in self.pivots]
        residual = dict(vec)
        for c, row in zip(coords, self.rows):
            if c:
                for j, v in row.items():
                    nv = residual.get(j, Fraction(0)) - c * v
                    if nv:
                        residual[j] = nv
                    else:
                        residual.pop(j, None)
        if any(residual.values()):
            raise NotInvariant("vector does not lie in the subspace")
        return coords

    def contains_subspace(self, other: "ExactSubspace") -> bool:
        return all(self.contains(r) for r in other.rows)

    def __eq__(self, other) -> bool:
        if not isinstance(other, ExactSubspace):
            return NotImplemented
        return (self.ncols == other.ncols and self.pivots == other.pivots
                and all(a == b for a, b in zip(self.rows, other.rows)))

    def __hash__(self) -> int:
        return hash((self.pivots, self.ncols))


def _merge_blocks(blocks) -> ExactSubspace:
    pairs = []
    ncols = None
    for rows, pivots, nc in blocks:
        ncols = nc
        pairs.extend(zip(pivots, rows))
    pairs.sort(key=lambda t: t[0])
    return ExactSubspace(tuple(r for _, r in pairs), tuple(p for p, _ in pairs), ncols)


def subspace_from_vectors(vecs, ncols: int) -> ExactSubspace:
    rows, pivots = la.sparse_rref(list(vecs), ncols)
    return ExactSubspace(tuple(rows), pivots, ncols)


# ---------------------------------------------------------- tensor plumbing

class _TensorIndex:
    """Flattening of words (i_1, ..., i_d) to lexicographic indices."""

    def __init__(self, n: int, d: int):
        self.n, self.d = n, d
        self.strides = tuple(n ** (d - 1 - k) for k in range(d))

    def index(self, word) -> int:
        return sum(i * s for i, s in zip(word, self.strides))

    def word(self, idx: int) -> tuple:
        out = []
        for s in self.strides:
            q, idx = divmod(idx, s)
            out.append(q)
        return tuple(out)

    def words(self):
        return product(range(self.n), repeat=self.d)


def _word_weight(word, weights) -> tuple:
    if not word:
        return (0,) * len(weights[0])
    return tuple(map(sum, zip(*(weights[i] for i in word))))


def _traceless_blocks(space: QuadraticSpace, d: int) -> dict:
    """Traceless subspace of each weight block: weight -> (words, kernel rows).

    Kernel rows are sparse dicts keyed by the position inside ``words``.
    """
    n = space.dim
    wts = space.letter_weights
    tidx = _TensorIndex(n, d)
    blocks = {}
    for word in tidx.words():
        blocks.setdefault(_word_weight(word, wts), []).append(word)
    pairs_nz = [(i, j, space.G[i, j]) for i in range(n) for j in range(n) if space.G[i, j] != 0]
    short = {}
    if d >= 2:
        for u in product(range(n), repeat=d - 2):
            short.setdefault(_word_weight(u, wts), []).append(u)
    out = {}
    for wt, words in blocks.items():
        local = {w: k for k, w in enumerate(words)}
        cons = []
        for p in range(d):
            for q in range(p + 1, d):
                for u in short.get(wt, ()):
                    row = {}
                    for i, j, g in pairs_nz:
                        w = list(u)
                        w.insert(p, i)
                        w.insert(q, j)
                        k = local[tuple(w)]
                        row[k] = row.get(k, Fraction(0)) + g
                    row = {k: v for k, v in row.items() if v}
                    if row:
                        cons.append(row)
        out[wt] = (words, la.sparse_nullspace(cons, len(words)))
    return out


def traceless_subspace(space: QuadraticSpace, d: int) -> ExactSubspace:
    """Basis of V^[d], the simultaneous kernel of all contractions."""
    if d < 0:
        raise ValueError("degree must be non-negative")
    _check_cap(space.dim, d)
    return _traceless_cached(space, d)


@lru_cache(maxsize=64)
def _traceless_cached(space: QuadraticSpace, d: int) -> ExactSubspace:
    ncols = space.dim ** d
    blocks = []
    tidx = _TensorIndex(space.dim, d)
    for wt, (words, kern) in _traceless_blocks(space, d).items():
        glob = [{tidx.index(words[k]): v for k, v in r.items()} for r in kern]
        rows, piv = la.sparse_rref(glob, ncols) if glob else ([], ())
        blocks.append((rows, piv, ncols))
    return _merge_blocks(blocks)


# ------------------------------------------------------- Young symmetrizers

def _column_tableau(parts: tuple) -> tuple[list, list]:
    """Rows and columns (as position lists) of the column canonical tableau."""
    conj = tuple(sum(1 for p in parts if p > j) for j in range(parts[0])) if parts else ()
    cols, pos = [], 0
    for c in conj:
        cols.append(list(range(pos, pos + c)))
        pos += c
    rows = [[col[i] for col in cols if len(col) > i] for i in range(len(parts))]
    return rows, cols


def _subgroup(blocks, d: int, signed: bool) -> list:
    """Direct product of symmetric groups on disjoint position blocks."""
    out = [(tuple(range(d)), 1)]
    for blk in blocks:
        new = []
        for perm_b in permutations(range(len(blk))):
            sgn = _perm_sign(perm_b) if signed else 1
            for base, s in out:
                p = list(base)
                for a, b in zip(blk, perm_b):
                    p[a] = base[blk[b]]
                new.append((tuple(p), s * sgn))
        out = new
    return out


def _perm_sign(p) -> int:
    p = list(p)
    sign = 1
    for i in range(len(p)):
        while p[i] != i:
            j = p[i]
            p[i], p[j] = p[j], p[i]
            sign = -sign
    return sign


def _compose(a, b) -> tuple:
    return tuple(a[b[k]] for k in range(len(b)))


def _inverse(a) -> tuple:
    out = [0] * len(a)
    for k, v in enumerate(a):
        out[v] = k
    return tuple(out)


@lru_cache(maxsize=128)
def young_symmetrizer(parts: tuple) -> tuple[dict, int]:
    """The group-algebra element c_λ = b_λ a_λ and the scalar m with c² = m c.

    Returns a dict permutation -> integer coefficient (a permutation is a
    tuple p with p[k] the image of k) together with m.
    """
    parts = tuple(parts)
    d = sum(parts)
    rows, cols = _column_tableau(parts)
    row_group = _subgroup(rows, d, signed=False)
    col_group = _subgroup(cols, d, signed=True)
    elem = {}
    for q, s in col_group:
        for p, _ in row_group:
            qp = _compose(q, p)
            elem[qp] = elem.get(qp, 0) + s
    elem = {k: v for k, v in elem.items() if v}
    m = sum(c * elem.get(_inverse(x), 0) for x, c in elem.items())
    return elem, m


def _act_perm_on_word(word, perm_inv) -> tuple:
    return tuple(word[perm_inv[k]] for k in range(len(word)))


def _apply_group_element(elem: dict, vec: dict, tidx: _TensorIndex) -> dict:
    out = {}
    invs = [(_inverse(p), c) for p, c in elem.items()]
    for idx, val in vec.items():
        word = tidx.word(idx)
        for pinv, c in invs:
            k = tidx.index(_act_perm_on_word(word, pinv))
            out[k] = out.get(k, 0) + c * val
    return {k: v for k, v in out.items() if v}


def young_symmetrizer_matrix(lam: Partition) -> tuple[sp.csr_matrix, int]:
    """Sparse integer matrix of c_λ on V^{⊗d} (place permutations) and m."""
    d, n = lam.size, lam.n
    _check_cap(n, d)
    _, m = young_symmetrizer(lam.parts)
    tidx = _TensorIndex(n, d)
    classes = {}
    for word in tidx.words():
        classes.setdefault(tuple(sorted(word)), []).append(word)
    rows, cols, vals = [], [], []
    for words in classes.values():
        images = _young_on_block(np.eye(len(words), dtype=np.int64).astype(object), words, lam.parts)
        for j, img in enumerate(images):
            for i, v in enumerate(img):
                if v:
                    rows.append(tidx.index(words[i]))
                    cols.append(tidx.index(words[j]))
                    vals.append(int(v))
    mat = sp.csr_matrix((vals, (rows, cols)), shape=(n ** d, n ** d), dtype=np.int64)
    return mat, m


# --------------------------------------------------------------- V_lambda

@dataclass(frozen=True)
class SchurSpace:
    """Exact basis of V_λ inside V^{⊗d} for a quadratic space V."""

    space: QuadraticSpace
    lam: Partition
    basis: ExactSubspace

    @property
    def dim(self) -> int:
        return self.basis.dim

    @property
    def d(self) -> int:
        return self.lam.size

    @property
    def n(self) -> int:
        return self.space.dim

    @cached_property
    def tensor_index(self) -> _TensorIndex:
        return _TensorIndex(self.n, self.d)

    def basis_matrix(self) -> np.ndarray:
        """Dense exact basis (rows) in the monomial tensor basis."""
        return self.basis.dense()


def schur_space(space: QuadraticSpace, lam: Partition) -> SchurSpace:
    """V_λ = c_λ · V^[d] with an RREF basis."""
    if lam.n != space.dim:
        raise ValueError("partition and space have different dimensions")
    _check_cap(space.dim, lam.size)
    return _schur_cached(space, lam)


def _swap_gather(words, local, a: int, b: int) -> np.ndarray:
    """Index array realising the transposition of tensor positions a, b."""
    out = np.empty(len(words), dtype=np.int64)
    for k, w in enumerate(words):
        w = list(w)
        w[a], w[b] = w[b], w[a]
        out[k] = local[tuple(w)]
    return out


def _young_on_block(K: np.ndarray, words, parts: tuple) -> np.ndarray:
    """Rows of K (coefficients on ``words``) multiplied by c_λ = b_λ a_λ.

    The symmetrizer of a row with positions p_1..p_k factors as
    S_k = S_{k-1} (1 + Σ_{j<k} (p_j p_k)), and likewise the column
    antisymmetrizers with a minus sign, so only transpositions are applied.
    The set ``words`` must be stable under place permutations.
    """
    local = {w: k for k, w in enumerate(words)}
    rows, cols = _column_tableau(parts)
    out = K
    for blocks, sign in ((rows, 1), (cols, -1)):
        for blk in blocks:
            for t in range(len(blk) - 1, 0, -1):
                acc = out.copy()
                for j in range(t):
                    acc = acc + sign * out[:, _swap_gather(words, local, blk[j], blk[t])]
                out = acc
    return out


def _block_symmetrize(parts: tuple, words, kern) -> list:
    """Apply c_λ to the kernel rows of one weight block."""
    K = np.zeros((len(kern), len(words)), dtype=object)
    for i, row in enumerate(kern):
        den = la.lcm_denominator(row.values())
        for k, v in row.items():
            K[i, k] = int(v * den)
    images = _young_on_block(K, words, parts)
    out = []
    for r in images:
        nz = {k: Fraction(int(v)) for k, v in enumerate(r) if v}
        if nz:
            out.append(nz)
    return out


@lru_cache(maxsize=128)
def _schur_cached(space: QuadraticSpace, lam: Partition) -> SchurSpace:
    n, d = space.dim, lam.size
    ncols = n ** d
    tidx = _TensorIndex(n, d)
    if d == 0:
        return SchurSpace(space, lam, ExactSubspace(({0: Fraction(1)},), (0,), 1))
    blocks = []
    for wt, (words, kern) in _traceless_blocks(space, d).items():
        if not kern:
            continue
        images = _block_symmetrize(lam.parts, words, kern)
        if not images:
            continue
        local_rows, local_piv = la.sparse_rref(images, len(words))
        rows = [{tidx.index(words[k]): v for k, v in r.items()} for r in local_rows]
        piv = tuple(tidx.index(words[k]) for k in local_piv)
        blocks.append((rows, piv, ncols))
    if not blocks:
        return SchurSpace(space, lam, ExactSubspace((), (), ncols))
    return SchurSpace(space, lam, _merge_blocks(blocks))


def highest_weight_vector(lam: Partition) -> dict:
    """The tensor ⊗_j (e_1 ∧ ... ∧ e_{ᵗλ_j}) as a sparse vector.

    Tensor positions follow the column canonical tableau, matching the
    convention of :func:`young_symmetrizer`.
    """
    n, d = lam.n, lam.size
    tidx = _TensorIndex(n, d)
    vec = {(): 1}
    for c in lam.conjugate:
        new = {}
        for perm in permutations(range(c)):
            s = _perm_sign(perm)
            for w, v in vec.items():
                key = w + perm
                new[key] = new.get(key, 0) + s * v
        vec = new
    return {tidx.index(w): Fraction(v) for w, v in vec.items() if v}


# ---------------------------------------------------- dimension predictions

def weyl_dimension_oracle(lambda_bar, n: int) -> int:
    r"""
    Dimension of the so(n) irreducible representation W_λ̄.

    With m = [n/2], l = λ̄ + ρ and ρ_i = m - i + 1/2 (n odd) or m - i
    (n even),

    .. math::

        \dim W_{\bar\lambda} = \prod_{i<j}\frac{l_i^2-l_j^2}{\rho_i^2-\rho_j^2}
        \cdot \prod_i \frac{l_i}{\rho_i}\quad(\text{last factor only for odd } n).

    Args:
        lambda_bar: highest weight with [n/2] entries (the last may be
            negative when n is even).
        n: dimension of the defining representation.

    Returns:
        The dimension as a Python int.
    """
    m = n // 2
    lb = [Fraction(x) for x in lambda_bar] + [Fraction(0)] * (m - len(lambda_bar))
    if len(lb) > m:
        raise ValueError("highest weight has too many entries")
    half = Fraction(1, 2) if n % 2 else Fraction(0)
    rho = [Fraction(m - i) + half for i in range(1, m + 1)]
    l = [a + b for a, b in zip(lb, rho)]
    dim = Fraction(1)
    for i in range(m):
        for j in range(i + 1, m):
            dim *= (l[i] ** 2 - l[j] ** 2) / (rho[i] ** 2 - rho[j] ** 2)
    if n % 2:
        for i in range(m):
            dim *= l[i] / rho[i]
    assert dim.denominator == 1
    return int(dim)


def so_restriction(lam: Partition, n: Optional[int] = None) -> dict:
    """λ̄, whether V_λ splits over SO(n), and whether λ is an associated partition.

    λ̄_i = λ_i - λ_{n+1-i} for i ≤ [n/2].  The restriction splits exactly
    when n = 2m and ᵗλ₁ = m; when ᵗλ₁ > n/2, V_λ ≅ V_λ̄ ⊗ det.
    """
    n = lam.n if n is None else n
    p = lam.padded(n)
    m = n // 2
    bar = tuple(p[i] - p[n - 1 - i] for i in range(m))
    t1 = lam.conjugate[0] if lam.parts else 0
    return {"lambda_bar": bar, "splits": n % 2 == 0 and t1 == m, "associated": 2 * t1 > n}


def predicted_dimension(lam: Partition) -> int:
    """dim V_λ from the Weyl formula, doubled in the split case."""
    info = so_restriction(lam)
    dim = weyl_dimension_oracle(info["lambda_bar"], lam.n)
    return 2 * dim if info["splits"] else dim


def corank(lam: Partition, n: Optional[int] = None) -> int:
    """Maximal i ≤ [n/2] with λ_1 = ... = λ_i and λ_n = ... = λ_{n+1-i} = 0."""
    n = lam.n if n is None else n
    if lam.is_trivial:
        raise ValueError("corank is undefined for the trivial partition")
    p = lam.padded(n)
    best = 0
    for i in range(1, n // 2 + 1):
        if all(p[k] == p[0] for k in range(i)) and all(p[n - 1 - k] == 0 for k in range(i)):
            best = i
    return best


# ------------------------------------------------------------ group actions

def _apply_tensor_power(g: np.ndarray, vec: dict, tidx: _TensorIndex) -> dict:
    """g^{⊗d} applied to a sparse tensor, one axis at a time."""
    n, d = tidx.n, tidx.d
    cols = [[(j, g[j, i]) for j in range(n) if g[j, i] != 0] for i in range(n)]
    cur = {tidx.word(k): v for k, v in vec.items()}
    for axis in range(d):
        nxt = {}
        for word, v in cur.items():
            for j, gji in cols[word[axis]]:
                w = word[:axis] + (j,) + word[axis + 1:]
                nxt[w] = nxt.get(w, 0) + gji * v
        cur = {w: v for w, v in nxt.items() if v}
    return {tidx.index(w): v for w, v in cur.items()}


def _check_orthogonal(g, space: QuadraticSpace) -> np.ndarray:
    g = la.qarray(g)
    if g.shape != (space.dim, space.dim):
        raise NotOrthogonal("matrix has the wrong shape")
    if not np.array_equal(g.T.dot(space.G).dot(g), space.G):
        raise NotOrthogonal("matrix does not preserve the quadratic form")
    return g


def act_on_schur(g, S: SchurSpace) -> np.ndarray:
    """Exact matrix of g on V_λ in the SchurSpace basis (column convention).

    Column i holds the coordinates of g · b_i.
    """
    g = _check_orthogonal(g, S.space)
    tidx = S.tensor_index
    out = la.qzeros((S.dim, S.dim))
    for i, row in enumerate(S.basis.rows):
        image = _apply_tensor_power(g, row, tidx)
        out[:, i] = S.basis.coordinates(image)
    return out


def act_on_schur_numeric(g, S: SchurSpace) -> np.ndarray:
    """Complex matrix of g^{⊗d} on V_λ for a floating (complex) matrix g.

    No orthogonality check is made; the coordinates are read off at the
    pivot columns of the RREF basis.
    """
    g = np.asarray(g, dtype=complex)
    n, d = S.n, S.d
    if d == 0:
        return np.ones((1, 1), dtype=complex)
    B = S.basis.as_float.reshape((S.dim,) + (n,) * d).astype(complex)
    for axis in range(1, d + 1):
        B = np.moveaxis(np.tensordot(B, g, axes=([axis], [1])), -1, axis)
    Y = B.reshape(S.dim, -1)
    return Y[:, list(S.basis.pivots)].T


def invariant_subspace(generators: Sequence, dim: int) -> np.ndarray:
    """Rows spanning the common fixed space of the given exact matrices."""
    if not generators:
        return la.qeye(dim)
    eye = la.qeye(dim)
    stacked = np.vstack([la.qarray(g) - eye for g in generators])
    return la.nullspace(stacked)


def schur_gram(S: SchurSpace) -> np.ndarray:
    """Restriction of the tensor-power form G^{⊗d} to the SchurSpace basis."""
    n = S.n
    tidx = S.tensor_index
    partners = [[(j, S.space.G[i, j]) for j in range(n) if S.space.G[i, j] != 0] for i in range(n)]
    out = la.qzeros((S.dim, S.dim))
    for a, ra in enumerate(S.basis.rows):
        image = {}
        for idx, v in ra.items():
            word = tidx.word(idx)
            for combo in product(*(partners[i] for i in word)):
                coef = v
                for _, gij in combo:
                    coef *= gij
                k = tidx.index(tuple(j for j, _ in combo))
                image[k] = image.get(k, 0) + coef
        for b, rb in enumerate(S.basis.rows):
            out[a, b] = sum((image.get(k, 0) * v for k, v in rb.items()), Fraction(0))
    return out


# ---------------------------------------------------- unipotents and torus

def space_eichler(space: QuadraticSpace, m, l) -> np.ndarray:
    """Eichler transvection E_{m⊗l} on a quadratic space (column convention)."""
    G = space.G
    m, l = la.qarray(m), la.qarray(l)
    if l.dot(G).dot(l) != 0 or m.dot(G).dot(l) != 0:
        raise NotOrthogonal("need (l, l) = 0 and (m, l) = 0")
    lG, mG = l.dot(G), m.dot(G)
    return (la.qeye(space.dim) - np.outer(l, mG) + np.outer(m, lG)
            - m.dot(G).dot(m) / 2 * np.outer(l, lG))


def unipotent_generators(space: QuadraticSpace) -> list:
    """The n - 2 Eichler generators E_{v⊗e_1}, v running over e_2, ..., e_{n-1}.

    Requires the first and last basis vectors to be an isotropic pair
    orthogonal to the middle ones (true for split spaces and for V(I) in
    the frame basis).
    """
    n = space.dim
    e1 = [int(i == 0) for i in range(n)]
    return [space_eichler(space, [int(i == k) for i in range(n)], e1) for k in range(1, n - 1)]


def torus_element(space: QuadraticSpace, alpha) -> np.ndarray:
    """diag(α, 1, ..., 1, α^{-1})."""
    n = space.dim
    t = la.qeye(n)
    t[0, 0] = la.frac(alpha)
    t[n - 1, n - 1] = 1 / la.frac(alpha)
    return t
