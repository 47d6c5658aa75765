"""Coefficient-level operators on Fourier expansions.

Siegel operator, Fourier–Jacobi slices, Witt restriction to a sublattice,
quasi-pullback (Taylor slices along a sub-domain) and the Rankin–Cohen
bracket of two scalar-valued expansions.  All operations are exact on
coefficients; nothing here checks modularity beyond what the inputs carry.
"""
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

import numpy as np

from . import _linalg as la
from .config import DEFAULT_MAX_TAYLOR_DEGREE
from .domain import cusp_data
from .errors import (ComplementNotDefinite, IdenticallyZero, NotUInvariant,
                     WeightMismatch)
from .fourier import FourierExpansion, fourier_expansion, pairing, unit
from .lattice import (IsotropicFlag, Sublattice, flag_from_vectors,
                      flag_through, inertia, new_lattice,
                      orthogonal_complement)
from .schur import (act_on_schur, invariant_subspace, partition,
                    space_eichler)

__all__ = [
    "RayExpansion", "JacobiSlice", "RestrictionData", "QuasiPullback",
    "u_generators_on_vi", "siegel_operator", "ray_generator",
    "fourier_jacobi_slice", "fourier_jacobi_decomposition", "reassemble",
    "restriction_data", "restrict", "quasi_pullback", "rankin_cohen",
]


def _abs_max(vec) -> float:
    return max((abs(complex(x)) for x in vec if x), default=0.0)


# ---------------------------------------------------------------- Siegel

@dataclass(frozen=True)
class RayExpansion:
    """Φ_J f: coefficients along the isotropic ray σ_J.

    ``coeffs`` maps t ≥ 0 to a(t·generator) where ``generator`` is the
    primitive index of U(I)_Z^∨ on σ_J (dual-basis coordinates).
    """

    flag: IsotropicFlag
    lam: object
    k: int
    weight: int
    target_dim: int
    generator: tuple
    coeffs: tuple

    def as_dict(self) -> dict:
        return dict(self.coeffs)

    @property
    def is_zero(self) -> bool:
        return not self.coeffs


def ray_generator(flag: IsotropicFlag) -> tuple:
    """Primitive dual-basis index spanning U(I)_Z^∨ ∩ R_{≥0}·e2."""
    cd = cusp_data(flag)
    e2 = la.qzeros(flag.n)
    e2[0] = Fraction(1)
    c = cd.vector_to_index(e2)
    den = la.lcm_denominator(list(c))
    ints = [int(x * den) for x in c]
    g = 0
    for x in ints:
        g = np.gcd(g, abs(x))
    return tuple(Fraction(x, int(g)) for x in ints)


def u_generators_on_vi(flag: IsotropicFlag, S) -> list:
    """Exact matrices on V(I)_λ of the Eichler generators E_{v⊗e2}, v ∈ vj."""
    n = flag.n
    l = [Fraction(int(i == 0)) for i in range(n)]
    gens = []
    for j in range(1, n - 1):
        m = [Fraction(int(i == j)) for i in range(n)]
        gens.append(act_on_schur(space_eichler(S.space, m, l), S))
    return gens


def siegel_operator(exp: FourierExpansion) -> RayExpansion:
    """Restrict to σ_J and check that every coefficient is U(J/I)-invariant.

    Raises NotUInvariant with the largest residual instead of projecting.
    """
    if exp.lam.is_trivial or exp.lam.is_det:
        raise ValueError("the Siegel operator here needs λ ≠ 1, det")
    flag = exp.flag
    if not flag.has_j:
        raise ValueError("flag has no J")
    cd = cusp_data(flag)
    S = exp.schur
    gens = u_generators_on_vi(flag, S)
    inv = invariant_subspace(gens, S.dim)
    gen = ray_generator(flag)
    gvec = cd.index_to_vector(gen)
    out = []
    worst = 0.0
    for l, a in exp.coeffs:
        v = cd.index_to_vector(l)
        if any(v[1:]) or v[0] < 0:
            continue
        t = v[0] / gvec[0]
        vec = np.array(a, dtype=object)
        for R in gens:
            res = R.dot(vec) - vec
            worst = max(worst, _abs_max(res))
        out.append((t, a))
    if worst > 0:
        raise NotUInvariant(f"coefficient on σ_J is not U-invariant (defect {worst:.3g})", worst)
    return RayExpansion(flag, exp.lam, exp.k, exp.k + exp.lam.lambda1, inv.shape[0], gen, tuple(out))


# -------------------------------------------------------- Fourier–Jacobi

@dataclass(frozen=True)
class JacobiSlice:
    """φ_m: b(l) = a(l + m·l_{J,Γ}) for l ⟂ U(J), as a fractional expansion."""

    flag: IsotropicFlag
    m: Fraction
    expansion: FourierExpansion
    beta0: Fraction

    def holomorphy_defects(self) -> list:
        """Indices violating 2·n·(mβ₀) ≥ |(l_z, l_z)| (empty when holomorphic)."""
        cd = cusp_data(self.flag)
        Q = self.flag.vj_gram
        bad = []
        for l in self.expansion.support:
            v = cd.index_to_vector(l)
            x, y = v[0], v[1:-1]
            yy = y.dot(Q).dot(y) if len(y) else Fraction(0)
            if 2 * x * self.m * self.beta0 < -yy:
                bad.append(l)
        return bad

    def is_holomorphic(self) -> bool:
        return not self.holomorphy_defects()


def _slice_index(cd, v) -> Fraction:
    """(l, v_{J,Γ}) = α₀ · (f2-coordinate of l)."""
    return cd.alpha0 * v[-1]


def fourier_jacobi_decomposition(exp: FourierExpansion) -> dict:
    """All slices φ_m with nonzero support, keyed by m."""
    flag = exp.flag
    if not flag.has_j:
        raise ValueError("flag has no J")
    cd = cusp_data(flag)
    lJ = cd.l_J_gamma
    groups = {}
    for l, a in exp.coeffs:
        v = cd.index_to_vector(l)
        m = _slice_index(cd, v)
        lp = cd.vector_to_index(v - lJ * m)
        groups.setdefault(m, []).append((lp, a))
    out = {}
    for m, items in sorted(groups.items()):
        sub = fourier_expansion(flag, exp.lam, exp.k, items, None, exp.holomorphic, False, exp.space)
        out[m] = JacobiSlice(flag, m, sub, cd.beta0)
    return out


def fourier_jacobi_slice(exp: FourierExpansion, m) -> JacobiSlice:
    m = la.frac(m)
    slices = fourier_jacobi_decomposition(exp)
    if m in slices:
        return slices[m]
    empty = fourier_expansion(exp.flag, exp.lam, exp.k, [], None, exp.holomorphic, False, exp.space)
    return JacobiSlice(exp.flag, m, empty, cusp_data(exp.flag).beta0)


def reassemble(slices, like: FourierExpansion) -> FourierExpansion:
    """Inverse of the Fourier–Jacobi decomposition."""
    cd = cusp_data(like.flag)
    lJ = cd.l_J_gamma
    items = []
    for m, sl in dict(slices).items():
        for lp, a in sl.expansion.coeffs:
            v = cd.index_to_vector(lp) + lJ * m
            items.append((cd.vector_to_index(v), a))
    return like.replace_coeffs(items, denominator=None)


# ------------------------------------------------------- Witt restriction

@dataclass(frozen=True)
class RestrictionData:
    """Geometry of D' ⊂ D for a sublattice L' ∋ e1.

    ``embed`` has as rows the big V(I) coordinates of the sub-flag's V(I')
    basis; ``kappa`` the big V(I) coordinates of a basis of K = L'^⊥;
    ``shift`` the big V(I) coordinates of the sub-flag's f1' (the tube
    charts differ by this translation).
    """

    subflag: IsotropicFlag
    embed: np.ndarray
    kappa: np.ndarray
    shift: np.ndarray
    sublattice: Sublattice = field(repr=False)


def _vi_coords(flag: IsotropicFlag, u) -> np.ndarray:
    """Big V(I) coordinates of an ambient vector orthogonal to e1."""
    c = flag.to_frame(u)
    if c[-1] != 0:
        raise ValueError("vector is not orthogonal to e1")
    return c[1:-1]


def _coords_in(L, B: np.ndarray, u) -> Optional[list]:
    """Integral coordinates of u in the basis rows B, or None."""
    u = la.qarray(u)
    x = la.solve(B.dot(L.G).dot(B.T), B.dot(L.G).dot(u))
    if any(x.dot(B) != u) or any(c.denominator != 1 for c in x):
        return None
    return [int(c) for c in x]


def restriction_data(flag: IsotropicFlag, Lprime: Sublattice, height_bound: int = 10) -> RestrictionData:
    L = flag.ambient
    if Lprime.ambient != L:
        raise ValueError("sublattice of a different lattice")
    B = la.qarray(Lprime.basis)
    K = orthogonal_complement(Lprime)
    if K.rank:
        p, q, z = inertia(K.gram())
        if p or z:
            raise ComplementNotDefinite("L'^⊥ is not negative definite")
    if not K.rank:
        eye = la.qeye(flag.n)
        return RestrictionData(flag, eye, la.qzeros((0, flag.n)), la.qzeros(flag.n), Lprime)
    sub_L = new_lattice(B.dot(L.G).dot(B.T), name=f"{L.name}'")
    e1p = _coords_in(L, B, flag.e1)
    if e1p is None:
        raise ValueError("L' must contain I")
    e2p = _coords_in(L, B, flag.e2) if flag.has_j else None
    sub = flag_from_vectors(sub_L, e1p, e2p, height_bound) if e2p else flag_through(sub_L, e1p, height_bound)

    def big(u):
        return _vi_coords(flag, la.qarray(u).dot(B))

    embed = la.qarray([big(u) for u in sub.vi_basis])
    # the two positive cones must match: compare reference vectors
    r_big = cusp_data(flag).reference
    r_sub = la.qzeros(sub.n)
    r_sub[0] = r_sub[-1] = Fraction(1)
    if pairing(flag, r_sub.dot(embed), r_big) < 0:
        sub = flag_from_vectors(sub_L, e1p, [-x for x in sub.e2], height_bound)
        embed = la.qarray([big(u) for u in sub.vi_basis])
    kappa = la.qarray([_vi_coords(flag, k) for k in K.basis])
    shift = flag.to_frame(la.qarray(sub.f1).dot(B))[1:-1]
    return RestrictionData(sub, embed, kappa, shift, Lprime)


def _project(flag: IsotropicFlag, rd: RestrictionData, v) -> np.ndarray:
    """Sub V(I') coordinates of the orthogonal projection of v."""
    Q = flag.vi_gram
    Qs = rd.subflag.vi_gram
    rhs = rd.embed.dot(Q).dot(la.qarray(v))
    return la.solve(Qs, rhs)


def _taylor_slices(exp: FourierExpansion, rd: RestrictionData, degrees) -> dict:
    flag = exp.flag
    cd = cusp_data(flag)
    sub_cd = cusp_data(rd.subflag)
    Q = flag.vi_gram
    acc = {nu: {} for nu in degrees}
    for l, a in exp.coeffs:
        v = cd.index_to_vector(l)
        lp = tuple(sub_cd.vector_to_index(_project(flag, rd, v)))
        phase = unit(v.dot(Q).dot(rd.shift))
        ns = [v.dot(Q).dot(k) for k in rd.kappa]
        for nu in degrees:
            w = Fraction(1)
            for n_i, e in zip(ns, nu):
                w *= n_i ** e if e else 1
            if not w:
                continue
            c = [x * w * phase for x in a]
            if lp in acc[nu]:
                acc[nu][lp] = [x + y for x, y in zip(acc[nu][lp], c)]
            else:
                acc[nu][lp] = c
    return acc


def restrict(exp: FourierExpansion, Lprime: Sublattice) -> FourierExpansion:
    """Witt restriction b(l') = Σ_{π(l) = l'} a(l) (values stay in V(I)_λ of L).

    The sub-flag's chart is translated from the big one by the V(I) part of
    its f1'; the corresponding factor e((l, shift)) is applied exactly.
    """
    rd = restriction_data(exp.flag, Lprime)
    zero = (0,) * rd.kappa.shape[0]
    acc = _taylor_slices(exp, rd, [zero])[zero]
    return fourier_expansion(rd.subflag, exp.lam, exp.k, acc, None, exp.holomorphic,
                             exp.cusp, exp.schur)


@dataclass(frozen=True)
class QuasiPullback:
    """Vanishing order ν and the degree-ν Taylor slices indexed by (ν₁..ν_r)."""

    nu: int
    slices: dict
    subflag: IsotropicFlag
    isotropic_zero: bool

    @property
    def is_cusp(self) -> bool:
        return self.isotropic_zero


def _compositions(total: int, parts: int):
    if parts == 0:
        if total == 0:
            yield ()
        return
    for head in range(total, -1, -1):
        for tail in _compositions(total - head, parts - 1):
            yield (head,) + tail


def quasi_pullback(exp: FourierExpansion, Lprime: Sublattice,
                   max_degree: int = DEFAULT_MAX_TAYLOR_DEGREE) -> QuasiPullback:
    """Smallest ν with a nonzero degree-ν Taylor slice along D'.

    Slice (ν₁..ν_r) has b(l') = Σ n₁^{ν₁}···n_r^{ν_r} a(l' + (n₁..n_r)) with
    n_i = (l, κ_i) and 0⁰ = 1.  For ν > 0 the slices are checked to vanish
    at every isotropic index.
    """
    rd = restriction_data(exp.flag, Lprime)
    r = rd.kappa.shape[0]
    sub_cd = cusp_data(rd.subflag)
    for nu in range(max_degree + 1):
        degrees = list(_compositions(nu, r))
        acc = _taylor_slices(exp, rd, degrees)
        slices = {}
        for d, coeffs in acc.items():
            e = fourier_expansion(rd.subflag, exp.lam, exp.k + nu, coeffs, None,
                                  exp.holomorphic, nu > 0 or exp.cusp, exp.schur)
            if len(e):
                slices[d] = e
        if slices:
            iso_zero = True
            if nu > 0:
                for e in slices.values():
                    for l in e.support:
                        v = sub_cd.index_to_vector(l)
                        if pairing(rd.subflag, v, v) == 0:
                            iso_zero = False
            return QuasiPullback(nu, slices, rd.subflag, iso_zero)
    raise IdenticallyZero(f"all Taylor slices vanish up to degree {max_degree}")


# ----------------------------------------------------------- Rankin–Cohen

def rankin_cohen(f: FourierExpansion, g: FourierExpansion) -> FourierExpansion:
    r"""
    The bracket {f, g} of scalar-valued expansions of weights k and l.

    .. math::

        c(m) = \sum_{l_1 + l_2 = m} a(l_1)\, b(l_2)\, (l\cdot l_1 - k\cdot l_2)

    with indices read as V(I)-vectors; the result has weight (St, k+l+1)
    and the overall constant 2πi is dropped.
    """
    if not (f.lam.is_trivial and g.lam.is_trivial):
        raise WeightMismatch("Rankin–Cohen needs scalar-valued inputs")
    if f.flag != g.flag:
        raise ValueError("inputs live at different flags")
    flag = f.flag
    cd = cusp_data(flag)
    k, l = f.k, g.k
    acc = {}
    for l1, a in f.coeffs:
        v1 = cd.index_to_vector(l1)
        for l2, b in g.coeffs:
            v2 = cd.index_to_vector(l2)
            m = tuple(x + y for x, y in zip(l1, l2))
            vec = (v1 * l - v2 * k) * (a[0] * b[0])
            if m in acc:
                acc[m] = acc[m] + vec
            else:
                acc[m] = vec
    St = partition((1,), flag.n)
    return fourier_expansion(flag, St, k + l + 1, {m: list(v) for m, v in acc.items()}, None,
                             f.holomorphic and g.holomorphic, f.cusp and g.cusp)
