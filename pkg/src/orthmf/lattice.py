"""Integral quadratic lattices, primitive sublattices and isotropic flags.

A lattice is ``Z^N`` with an integral nondegenerate symmetric Gram matrix.
Vectors are written in the ambient coordinates.  Everything here is exact:
integers, ``Fraction`` and sympy's Smith normal form.
"""
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from itertools import product
from math import gcd, lcm
from typing import Optional

import numpy as np
from sympy import Matrix
from sympy.matrices.normalforms import smith_normal_decomp

from . import _linalg as la
from .errors import (DegenerateForm, DependentRows, NoIsotropicVectorFound,
                     NotIsotropic, NotOrthogonal, NotSymmetric, WittRankOne)

__all__ = [
    "QuadLattice", "Sublattice", "IsotropicFlag", "new_lattice", "sublattice",
    "orthogonal_complement", "saturate", "find_isotropic_flag",
    "eichler_transvection", "integral_unipotent_lattice", "inertia",
    "hyperbolic_plane", "lattice_from_json", "lattice_to_json",
    "flag_from_vectors", "flag_through", "flag_to_json", "flag_from_json", "block_gram",
]


def inertia(gram) -> tuple[int, int, int]:
    """Exact inertia (p, q, z) of a rational symmetric matrix by congruence."""
    a = la.qarray(gram)
    n = a.shape[0]
    p = q = 0
    while n:
        piv = next((i for i in range(n) if a[i, i] != 0), None)
        if piv is None:
            off = next(((i, j) for i in range(n) for j in range(n) if a[i, j] != 0), None)
            if off is None:
                break
            i, j = off
            # e_i -> e_i + e_j makes the diagonal entry 2 a_ij nonzero
            a[i, :] += a[j, :]
            a[:, i] += a[:, j]
            piv = i
        d = a[piv, piv]
        if d > 0:
            p += 1
        else:
            q += 1
        col = a[:, piv].copy()
        a = a - np.outer(col, col) / d
        keep = [k for k in range(n) if k != piv]
        a = a[np.ix_(keep, keep)]
        n -= 1
    return p, q, a.shape[0]


@dataclass(frozen=True)
class QuadLattice:
    """Integral lattice ``Z^rank`` with Gram matrix ``gram``."""

    gram: tuple
    signature: tuple
    name: str = ""

    @property
    def rank(self) -> int:
        return len(self.gram)

    @cached_property
    def G(self) -> np.ndarray:
        """Gram matrix as an exact object array."""
        return la.qarray(self.gram)

    def pair(self, u, v) -> Fraction:
        return la.qarray(u).dot(self.G).dot(la.qarray(v))

    def norm(self, v) -> Fraction:
        return self.pair(v, v)


def new_lattice(gram, name: str = "") -> QuadLattice:
    """Validate an integral Gram matrix and compute its signature."""
    g = np.array(gram, dtype=object)
    if g.ndim != 2 or g.shape[0] != g.shape[1] or g.shape[0] == 0:
        raise NotSymmetric("Gram matrix must be square and nonempty")
    for x in g.flat:
        if la.frac(x).denominator != 1:
            raise ValueError("Gram matrix must be integral")
    g = np.vectorize(lambda x: int(la.frac(x)), otypes=[object])(g)
    if not np.array_equal(g, g.T):
        raise NotSymmetric("Gram matrix is not symmetric")
    if la.det(g) == 0:
        raise DegenerateForm("Gram matrix has determinant 0")
    p, q, _ = inertia(g)
    return QuadLattice(tuple(tuple(int(x) for x in row) for row in g), (p, q), name)


def hyperbolic_plane() -> list:
    return [[0, 1], [1, 0]]


def block_gram(*blocks) -> list:
    """Orthogonal direct sum of Gram matrices."""
    size = sum(len(b) for b in blocks)
    out = [[0] * size for _ in range(size)]
    off = 0
    for b in blocks:
        for i, row in enumerate(b):
            for j, x in enumerate(row):
                out[off + i][off + j] = x
        off += len(b)
    return out


@dataclass(frozen=True)
class Sublattice:
    """Sublattice spanned by integer rows ``basis`` of the ambient lattice."""

    ambient: QuadLattice
    basis: tuple

    @property
    def rank(self) -> int:
        return len(self.basis)

    @cached_property
    def elementary_divisors(self) -> tuple:
        s, _, _ = smith_normal_decomp(Matrix(self.basis))
        return tuple(int(s[i, i]) for i in range(self.rank))

    @property
    def is_primitive(self) -> bool:
        return all(d == 1 for d in self.elementary_divisors)

    def gram(self) -> np.ndarray:
        b = la.qarray(self.basis)
        return b.dot(self.ambient.G).dot(b.T)


def _int_rows(rows) -> tuple:
    out = []
    for r in rows:
        rr = [la.frac(x) for x in r]
        if any(x.denominator != 1 for x in rr):
            raise ValueError("sublattice basis must be integral")
        out.append(tuple(int(x) for x in rr))
    return tuple(out)


def sublattice(L: QuadLattice, basis) -> Sublattice:
    rows = _int_rows(basis)
    if not rows or any(len(r) != L.rank for r in rows):
        raise ValueError("basis rows must be nonempty ambient vectors")
    if la.rank(rows) < len(rows):
        raise DependentRows("basis rows are linearly dependent")
    return Sublattice(L, rows)


def hnf_rows(rows) -> list:
    """Row-style Hermite normal form; returns the nonzero rows."""
    a = [list(map(int, r)) for r in rows]
    if not a:
        return []
    m, n = len(a), len(a[0])
    r = 0
    for c in range(n):
        if r == m:
            break
        while True:
            nz = [i for i in range(r, m) if a[i][c] != 0]
            if not nz:
                break
            i0 = min(nz, key=lambda i: abs(a[i][c]))
            a[r], a[i0] = a[i0], a[r]
            done = True
            for i in range(r + 1, m):
                if a[i][c]:
                    f = a[i][c] // a[r][c]
                    a[i] = [x - f * y for x, y in zip(a[i], a[r])]
                    if a[i][c]:
                        done = False
            if done:
                break
        if a[r][c] == 0:
            continue
        if a[r][c] < 0:
            a[r] = [-x for x in a[r]]
        for i in range(r):
            f = a[i][c] // a[r][c]
            a[i] = [x - f * y for x, y in zip(a[i], a[r])]
        r += 1
    return [row for row in a[:r]]


def _integer_kernel(rows, ncols: int) -> list:
    """Basis (HNF) of {v in Z^ncols : A v = 0} for an integer matrix A."""
    if not rows:
        return [[int(i == j) for j in range(ncols)] for i in range(ncols)]
    a = Matrix(rows)
    s, _, v = smith_normal_decomp(a)
    r = sum(1 for i in range(min(s.shape)) if s[i, i] != 0)
    kern = [[int(v[i, j]) for i in range(ncols)] for j in range(r, ncols)]
    return hnf_rows(kern)


def _clear_denominators(vec) -> list:
    vec = [la.frac(x) for x in vec]
    d = lcm(*(x.denominator for x in vec)) if vec else 1
    out = [int(x * d) for x in vec]
    g = 0
    for x in out:
        g = gcd(g, x)
    return [x // g for x in out] if g else out


def saturate(sub: Sublattice) -> Sublattice:
    """Primitive closure ``(Q-span of sub) ∩ L``."""
    if la.rank(sub.basis) < sub.rank:
        raise DependentRows("basis rows are linearly dependent")
    if sub.is_primitive:
        return sub
    s, _, v = smith_normal_decomp(Matrix(sub.basis))
    vinv = v.inv()
    rows = [[int(vinv[i, j]) for j in range(sub.ambient.rank)] for i in range(sub.rank)]
    return Sublattice(sub.ambient, tuple(map(tuple, hnf_rows(rows))))


def orthogonal_complement(sub: Sublattice) -> Sublattice:
    """The primitive sublattice of vectors orthogonal to ``sub``."""
    a = la.qarray(sub.basis).dot(sub.ambient.G)
    rows = [[int(x) for x in r] for r in a]
    kern = _integer_kernel(rows, sub.ambient.rank)
    return Sublattice(sub.ambient, tuple(map(tuple, kern)))


def _height_shell(n: int, h: int):
    """Integer vectors of sup-norm exactly ``h``, lexicographic, in chunks."""
    side = 2 * h + 1
    if n == 1:
        yield np.array([[-h], [h]], dtype=np.int64)
        return
    rest = np.indices((side,) * (n - 1)).reshape(n - 1, -1).T - h
    rest_max = np.abs(rest).max(axis=1)
    for c0 in range(-h, h + 1):
        if abs(c0) == h:
            block = rest
        else:
            block = rest[rest_max == h]
        yield np.hstack([np.full((block.shape[0], 1), c0, dtype=np.int64), block])


def _candidates(L: QuadLattice, bound: int, constraints=()):
    """Primitive isotropic vectors of height <= bound in the documented order.

    Order: increasing sup-norm height, then increasing number of nonzero
    coordinates, then lexicographic (each coordinate running from -h to h).
    Only vectors whose first nonzero coordinate is positive are produced, so
    each line appears once.  ``constraints`` are integer rows c with c.v = 0.
    """
    G = np.array(L.gram, dtype=np.int64)
    n = L.rank
    for h in range(1, bound + 1):
        found = []
        for block in _height_shell(n, h):
            nz_first = np.argmax(block != 0, axis=1)
            lead = block[np.arange(block.shape[0]), nz_first]
            block = block[lead > 0]
            if block.size == 0:
                continue
            mask = np.einsum("ij,jk,ik->i", block, G, block) == 0
            for c in constraints:
                mask &= block.dot(np.array(c, dtype=np.int64)) == 0
            mask &= np.gcd.reduce(block, axis=1) == 1
            found.append(block[mask])
        if not found:
            continue
        shell = np.vstack(found)
        support = (shell != 0).sum(axis=1)
        for i in np.argsort(support, kind="stable"):
            yield tuple(int(x) for x in shell[i])


@dataclass(frozen=True)
class IsotropicFlag:
    """Chain I ⊂ J of primitive isotropic sublattices with a hyperbolic frame.

    ``e1`` spans I and ``e1, e2`` span J over Z; ``f1, f2`` are rational with
    (e_i, f_j) = δ_ij and all other pairings zero.  ``vj`` is an integral
    basis of the orthogonal complement of the frame.  When J is absent,
    ``e2``/``f2`` are None and ``vj`` spans the complement of ⟨e1, f1⟩.
    """

    ambient: QuadLattice
    I: Sublattice
    J: Optional[Sublattice]
    e1: tuple
    f1: tuple
    e2: Optional[tuple]
    f2: Optional[tuple]
    vj: tuple
    height_bound: int = field(default=10, compare=False)

    @property
    def has_j(self) -> bool:
        return self.J is not None

    @property
    def n(self) -> int:
        """Dimension of V(I) = I^⊥/I."""
        return self.ambient.rank - 2

    @cached_property
    def frame(self) -> np.ndarray:
        """Rows e1, e2, vj..., f2, f1 (or e1, vj..., f1 without J)."""
        if self.has_j:
            rows = [self.e1, self.e2, *self.vj, self.f2, self.f1]
        else:
            rows = [self.e1, *self.vj, self.f1]
        return la.qarray(rows)

    @cached_property
    def frame_inverse(self) -> np.ndarray:
        return la.inverse(self.frame)

    @cached_property
    def vi_basis(self) -> np.ndarray:
        """Ambient lifts of the V(I) basis: e2, vj..., f2 (inside e1^⊥)."""
        return self.frame[1:-1]

    @cached_property
    def vi_gram(self) -> np.ndarray:
        b = self.vi_basis
        return b.dot(self.ambient.G).dot(b.T)

    @cached_property
    def vj_gram(self) -> np.ndarray:
        if not self.vj:
            return la.qzeros((0, 0))
        b = la.qarray(self.vj)
        return b.dot(self.ambient.G).dot(b.T)

    def to_frame(self, v) -> np.ndarray:
        """Frame coordinates of an ambient vector (row convention)."""
        return la.qarray(v).dot(self.frame_inverse)

    def from_frame(self, c) -> np.ndarray:
        return la.qarray(c).dot(self.frame)

    def validate(self) -> None:
        """Re-check every invariant of the flag; raises AssertionError."""
        L = self.ambient
        vecs = {"e1": self.e1, "f1": self.f1}
        if self.has_j:
            vecs.update(e2=self.e2, f2=self.f2)
        for a, u in vecs.items():
            for b, v in vecs.items():
                want = 1 if {a, b} in ({"e1", "f1"}, {"e2", "f2"}) else 0
                assert L.pair(u, v) == want, (a, b)
        for v in self.vj:
            for u in vecs.values():
                assert L.pair(u, v) == 0
        if self.vj:
            p, q, z = inertia(self.vj_gram)
            assert z == 0 and p == (0 if self.has_j else self.ambient.signature[0] - 1)
        assert self.I.is_primitive and tuple(self.I.basis[0]) == tuple(self.e1)
        if self.has_j:
            assert self.J.is_primitive
            # e1, e2 must be a Z-basis of J
            m = Matrix([list(self.e1), list(self.e2)])
            s, _, _ = smith_normal_decomp(m)
            assert all(s[i, i] in (1, -1) for i in range(2))


def _dual_partner(L: QuadLattice, isotropic_rows, target: int) -> np.ndarray:
    """Rational g with (e_i, g) = δ_{i,target}; free variables set to 0."""
    a = la.qarray(isotropic_rows).dot(L.G)
    k = a.shape[0]
    aug = np.hstack([a, la.qarray([[1 if i == target else 0] for i in range(k)])])
    r, piv = la.rref(aug)
    g = la.qzeros(L.rank)
    for row, p in zip(r, piv):
        g[p] = row[-1]
    return g


def _hyperbolic_frame(L: QuadLattice, e1, e2=None):
    e1 = la.qarray(e1)
    if e2 is None:
        g1 = _dual_partner(L, [e1], 0)
        f1 = g1 - L.norm(g1) / 2 * e1
        return f1, None
    e2 = la.qarray(e2)
    g1 = _dual_partner(L, [e1, e2], 0)
    g2 = _dual_partner(L, [e1, e2], 1)
    f2 = g2 - L.norm(g2) / 2 * e2
    g1 = g1 - L.pair(g1, f2) * e2
    f1 = g1 - L.norm(g1) / 2 * e1
    return f1, f2


def find_isotropic_flag(L: QuadLattice, height_bound: int = 10, require_j: bool = True) -> IsotropicFlag:
    """Search a primitive isotropic flag I ⊂ J by bounded enumeration.

    The first primitive isotropic vector in the documented order spans I.
    J is spanned by I and the first isotropic vector of ``e1^⊥`` that is
    independent of ``e1``, then saturated.  With ``require_j=False`` a
    missing J is allowed and the returned flag only carries I.
    """
    if height_bound < 1:
        raise ValueError("height_bound must be positive")
    e1 = next(_candidates(L, height_bound), None)
    if e1 is None:
        raise NoIsotropicVectorFound(f"no isotropic vector of height <= {height_bound}")
    return flag_through(L, e1, height_bound, require_j)


def flag_through(L: QuadLattice, e1, height_bound: int = 10, require_j: bool = True) -> IsotropicFlag:
    """A flag with I = ⟨e1⟩, J found by the same bounded enumeration."""
    e1 = tuple(int(x) for x in e1)
    a1 = [int(x) for x in la.qarray(e1).dot(L.G)]
    w = None
    for cand in _candidates(L, height_bound, constraints=(a1,)):
        if la.rank([e1, cand]) == 2:
            w = cand
            break
    if w is None:
        if require_j:
            raise WittRankOne(f"I = <{e1}> found but no isotropic plane of height <= {height_bound}")
        return flag_from_vectors(L, e1, None, height_bound)
    J = saturate(Sublattice(L, (e1, w)))
    # complete e1 to a Z-basis (e1, e2) of J
    b1, b2 = J.basis
    M = la.qarray([b1, b2]).T
    sol, _ = la.rref(np.hstack([M, la.qarray(e1).reshape(-1, 1)]))
    a, c = int(sol[0, -1]), int(sol[1, -1])
    # a y - c x = 1
    x, y = _bezout_pair(a, c)
    e2 = tuple(int(x * u + y * v) for u, v in zip(b1, b2))
    return flag_from_vectors(L, e1, e2, height_bound)


def flag_from_vectors(L: QuadLattice, e1, e2=None, height_bound: int = 10) -> IsotropicFlag:
    """The flag ⟨e1⟩ ⊂ ⟨e1, e2⟩ with the canonical rational frame completion.

    ``e1`` must be primitive isotropic; ``e2`` (optional) must make
    ``e1, e2`` a basis of a primitive isotropic plane.
    """
    e1 = tuple(int(x) for x in e1)
    I = Sublattice(L, (e1,))
    if L.norm(e1) != 0 or not I.is_primitive:
        raise NotIsotropic("e1 must be primitive isotropic")
    if e2 is None:
        f1, _ = _hyperbolic_frame(L, e1)
        comp = _integer_kernel([_clear_denominators(la.qarray(v).dot(L.G)) for v in (e1, f1)], L.rank)
        return IsotropicFlag(L, I, None, e1, tuple(f1), None, None,
                             tuple(map(tuple, comp)), height_bound)
    e2 = tuple(int(x) for x in e2)
    J = Sublattice(L, (e1, e2))
    if L.norm(e2) != 0 or L.pair(e1, e2) != 0 or not J.is_primitive:
        raise NotIsotropic("e1, e2 must span a primitive isotropic plane")
    f1, f2 = _hyperbolic_frame(L, e1, e2)
    comp = _integer_kernel([_clear_denominators(la.qarray(v).dot(L.G)) for v in (e1, e2, f1, f2)], L.rank)
    return IsotropicFlag(L, I, J, e1, tuple(f1), e2, tuple(f2),
                         tuple(map(tuple, comp)), height_bound)


def _bezout_pair(a: int, c: int) -> tuple[int, int]:
    """Return (x, y) with a*y - c*x = 1, assuming gcd(a, c) = 1."""
    def egcd(p, q):
        if q == 0:
            return (p, 1, 0)
        g, s, t = egcd(q, p % q)
        return (g, t, s - (p // q) * t)
    g, s, t = egcd(a, -c)
    if g < 0:
        g, s, t = -g, -s, -t
    assert g == 1, "e1 is not primitive in J"
    # a*s + (-c)*t = 1  ->  y = s, x = t
    return t, s


def eichler_transvection(L: QuadLattice, m, l) -> np.ndarray:
    r"""
    Matrix of the Eichler transvection :math:`E_{m\otimes l}` on ambient
    coordinates (column vectors),

    .. math::

        E(v) = v - (m, v)\,l + (l, v)\,m - \tfrac12 (m, m)(l, v)\,l .

    Args:
        L: ambient lattice supplying the bilinear form.
        m: rational vector orthogonal to ``l``.
        l: rational isotropic vector.

    Returns:
        Exact ``Fraction`` matrix preserving the Gram form.
    """
    m = la.qarray(m)
    l = la.qarray(l)
    if L.norm(l) != 0:
        raise NotIsotropic("l must be isotropic")
    if L.pair(m, l) != 0:
        raise NotOrthogonal("m must be orthogonal to l")
    G = L.G
    lG = l.dot(G)
    mG = m.dot(G)
    return (la.qeye(L.rank) - np.outer(l, mG) + np.outer(m, lG)
            - L.norm(m) / 2 * np.outer(l, lG))


def _integrality_lattice(a) -> np.ndarray:
    """Basis rows of {x in Q^n : A x in Z^r} for rational A of full column rank."""
    a = la.qarray(a)
    r, n = a.shape
    d = la.lcm_denominator(a.flat)
    ai = Matrix([[int(x * d) for x in row] for row in a])
    s, _, v = smith_normal_decomp(ai)
    rows = []
    for i in range(n):
        si = int(s[i, i])
        if si == 0:
            raise ValueError("integrality constraints do not bound the lattice")
        rows.append([Fraction(int(v[j, i]) * d, si) for j in range(n)])
    return la.qarray(rows)


def _lattice_from_generators(gens, basis) -> np.ndarray:
    """HNF basis of the Z-span of integer combinations ``gens`` of ``basis``."""
    vecs = la.qarray(hnf_rows(gens)).dot(basis)
    d = la.lcm_denominator(vecs.flat)
    rows = hnf_rows([[int(x * d) for x in v] for v in vecs])
    return la.qarray(rows) / d


def integral_unipotent_lattice(flag: IsotropicFlag, max_cosets: int = 1 << 20) -> np.ndarray:
    """
    Basis of U(I)_Z in the V(I) coordinates (e2, vj..., f2).

    A coordinate vector x corresponds to the Eichler transvection
    E_{m⊗e1} with m the ambient lift of x; it belongs to U(I)_Z when that
    matrix is integral.  Integrality is linear in x except for one
    quadratic term; we first solve the linear conditions, then pick out
    the sublattice on which the quadratic condition holds by running
    through cosets of a finite-index sublattice.
    """
    L = flag.ambient
    nV = flag.vi_basis.shape[0]
    e1 = [int(x) for x in flag.e1]
    # unimodular T with T e1 = first standard vector
    _, _, v = smith_normal_decomp(Matrix([e1]))
    T = la.qarray([[int(v[j, i]) for j in range(L.rank)] for i in range(L.rank)])
    sign = T.dot(la.qarray(e1))[0]
    T = T * sign
    Tinv = la.inverse(T)
    Gp = Tinv.T.dot(L.G).dot(Tinv)
    ap = Gp[0]
    g = 0
    for x in ap:
        g = gcd(g, int(x))
    _, _, sv = smith_normal_decomp(Matrix([[int(x) for x in ap]]))
    S = la.qarray([[int(sv[i, j]) for j in range(L.rank)] for i in range(L.rank)])
    if ap.dot(S)[0] < 0:
        S[:, 0] = -S[:, 0]
    lifts = flag.vi_basis.dot(T.T)  # rows: lifts in new coordinates

    def linear_parts(x):
        mp = la.qarray(x).dot(lifts)
        bS = mp.dot(Gp).dot(S)
        return mp, bS

    cons = []
    for i in range(nV):
        x = [int(i == j) for j in range(nV)]
        mp, bS = linear_parts(x)
        cons.append(list(g * mp[1:]) + list(bS[1:]))
    A = la.qarray(cons).T
    base = _integrality_lattice(A)

    Q = flag.vi_gram

    def phi(x):
        mp, bS = linear_parts(x)
        return g * mp[0] - g * x.dot(Q).dot(x) / 2 - bS[0]

    vals = [phi(b) for b in base]
    cross = [g * base[i].dot(Q).dot(base[j]) for i in range(nV) for j in range(nV)]
    N = la.lcm_denominator(vals + cross + [g * b.dot(Q).dot(b) / 2 for b in base])
    if N ** nV > max_cosets:
        raise ValueError("too many cosets while solving integrality of U(I)")
    gens = [[N * int(i == j) for j in range(nV)] for i in range(nV)]
    for c in product(range(N), repeat=nV):
        if any(c):
            x = la.qarray(c).dot(base)
            if phi(x).denominator == 1:
                gens.append(list(c))
    return _lattice_from_generators(gens, base)


def lattice_to_json(L: QuadLattice) -> dict:
    return {"gram": [list(r) for r in L.gram], "name": L.name}


def lattice_from_json(obj: dict) -> QuadLattice:
    return new_lattice(obj["gram"], obj.get("name", ""))


def flag_to_json(flag: IsotropicFlag) -> dict:
    out = {"lattice": lattice_to_json(flag.ambient), "e1": [int(x) for x in flag.e1]}
    if flag.has_j:
        out["e2"] = [int(x) for x in flag.e2]
    return out


def flag_from_json(obj: dict) -> IsotropicFlag:
    """Rebuild a flag from its lattice and isotropic vectors, then validate."""
    L = lattice_from_json(obj["lattice"])
    flag = flag_from_vectors(L, obj["e1"], obj.get("e2"))
    flag.validate()
    return flag
