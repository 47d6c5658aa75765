"""Tube-domain coordinates, the Jacobi group and factors of automorphy.

A flag I ⊂ J with frame e1, e2, vj..., f2, f1 gives the tube chart

    Z = τ f2 + z + w e2,        ω(Z) = f1 + Z - ((Z, Z)/2) e1,

so (ω, e1) = 1 and (ω, ω) = 0.  Points are stored through (τ, z, w); V(I)
vectors are written in the basis (e2, vj..., f2), in which the form is

    Q = [[0, 0, 1], [0, G_J, 0], [1, 0, 0]].

Ambient isometries act on column vectors of L-coordinates.  Factors of
automorphy are computed numerically from ambient matrices; everything on
the lattice side stays exact.
"""
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Optional

import numpy as np

from . import _linalg as la
from .config import tolerance
from .errors import ChartBoundary, DomainExit
from .lattice import (IsotropicFlag, QuadLattice, eichler_transvection,
                      integral_unipotent_lattice)
from .schur import SchurSpace, act_on_schur_numeric

__all__ = [
    "TubePoint", "JacobiElement", "AmbientIsometry", "CuspData", "tube_point",
    "omega_of", "omega_symbolic", "point_from_omega", "jacobi_action",
    "to_ambient", "ambient_isometry", "stabilizer_element", "act",
    "factor_L", "factor_E", "factor_Elk", "omega_J_multiplier",
    "omega_J_closed_form", "cusp_data", "reference_point", "random_tube_point",
    "random_isometry", "collinearity_defect",
]


def _vi_gram_float(flag: IsotropicFlag) -> np.ndarray:
    return la.to_float(flag.vi_gram)


# ------------------------------------------------------------------ points

@dataclass(frozen=True)
class TubePoint:
    """A point (τ, z, w) of the tube domain attached to ``flag``."""

    flag: IsotropicFlag
    tau: complex
    z: tuple
    w: complex

    @property
    def vector(self) -> np.ndarray:
        """Z in the V(I) basis (e2, vj..., f2)."""
        return np.array([self.w, *self.z, self.tau], dtype=complex)

    @property
    def imag(self) -> np.ndarray:
        return self.vector.imag

    def imag_norm(self) -> float:
        """(Im Z, Im Z) = 2 Im τ Im w + (Im z, Im z)."""
        y = self.imag
        return float(y @ _vi_gram_float(self.flag) @ y)


def tube_point(flag: IsotropicFlag, tau, z=None, w=0j) -> TubePoint:
    """Build a domain point, raising DomainExit outside the positive cone."""
    if not flag.has_j:
        raise ValueError("tube coordinates need a flag with J")
    nz = flag.n - 2
    z = tuple(complex(x) for x in (np.zeros(nz) if z is None else z))
    if len(z) != nz:
        raise ValueError(f"z must have length {nz}")
    Z = TubePoint(flag, complex(tau), z, complex(w))
    if Z.tau.imag <= 0:
        raise DomainExit("Im τ must be positive")
    if Z.imag_norm() <= 0:
        raise DomainExit("Im Z is not in the positive cone")
    return Z


def reference_point(flag: IsotropicFlag) -> TubePoint:
    """τ = i, z = 0, w = i; Im Z = e2 + f2 fixes the positive cone."""
    return tube_point(flag, 1j, None, 1j)


def omega_of(Z: TubePoint) -> np.ndarray:
    """Normalized period vector ω(Z) in ambient coordinates."""
    x = Z.vector
    zz = x @ _vi_gram_float(Z.flag) @ x
    coords = np.concatenate([[-zz / 2], x, [1.0]])
    return coords @ la.to_float(Z.flag.frame)


def omega_symbolic(flag: IsotropicFlag):
    """ω with symbolic τ, z_i, w as a sympy column in ambient coordinates."""
    import sympy

    nz = flag.n - 2
    tau, w = sympy.symbols("tau w")
    z = sympy.symbols(f"z0:{nz}") if nz else ()
    x = sympy.Matrix([w, *z, tau])
    Q = sympy.Matrix(flag.vi_gram.tolist())
    zz = (x.T * Q * x)[0, 0]
    coords = sympy.Matrix([[-zz / 2, *x, 1]])
    frame = sympy.Matrix(flag.frame.tolist())
    return (coords * frame).T, (tau, z, w)


def point_from_omega(flag: IsotropicFlag, omega: np.ndarray, tol: Optional[float] = None) -> TubePoint:
    """Read (τ, z, w) off a nonzero isotropic vector proportional to ω(Z)."""
    tol = tolerance() if tol is None else tol
    G = la.to_float(flag.ambient.G)
    e1 = la.to_float(la.qarray(flag.e1))
    omega = np.asarray(omega, dtype=complex)
    pair = omega @ G @ e1
    if abs(pair) <= tol * max(1.0, np.abs(omega).max()):
        raise ChartBoundary("(ω, e1) vanishes")
    c = (omega / pair) @ la.to_float(flag.frame_inverse)
    return tube_point(flag, c[-2], c[2:-2], c[1])


def random_tube_point(flag: IsotropicFlag, rng: np.random.Generator, scale: float = 1.0) -> TubePoint:
    """A random point with Im Z well inside the positive cone."""
    nz = flag.n - 2
    GJ = la.to_float(flag.vj_gram)
    re = rng.normal(size=nz + 2) * scale
    y_tau = rng.uniform(0.5, 2.0) * scale
    y_z = rng.normal(size=nz) * scale * 0.5
    slack = rng.uniform(0.5, 2.0) * scale ** 2
    y_w = (slack - y_z @ GJ @ y_z) / (2 * y_tau)
    z = re[1:-1] + 1j * y_z
    return tube_point(flag, re[-1] + 1j * y_tau, z, re[0] + 1j * y_w)


# ---------------------------------------------------------- isometries

def _positive_plane(G: np.ndarray) -> np.ndarray:
    vals, vecs = np.linalg.eigh(G)
    return vecs[:, vals > 0].T


@dataclass(frozen=True)
class AmbientIsometry:
    """An element of O(L_R) as a matrix on column vectors."""

    matrix: np.ndarray
    preserves_component: bool

    @property
    def is_exact(self) -> bool:
        return self.matrix.dtype == object

    @property
    def as_float(self) -> np.ndarray:
        return la.to_float(self.matrix) if self.is_exact else np.asarray(self.matrix, dtype=float)

    def __matmul__(self, other: "AmbientIsometry") -> "AmbientIsometry":
        if self.is_exact and other.is_exact:
            m = self.matrix.dot(other.matrix)
        else:
            m = self.as_float @ other.as_float
        return AmbientIsometry(m, self.preserves_component == other.preserves_component)

    def inverse(self, L: QuadLattice) -> "AmbientIsometry":
        """g^{-1} = G^{-1} g^T G."""
        if self.is_exact:
            m = la.inverse(L.G).dot(self.matrix.T).dot(L.G)
        else:
            G = la.to_float(L.G)
            m = np.linalg.solve(G, self.as_float.T @ G)
        return AmbientIsometry(m, self.preserves_component)


def ambient_isometry(L: QuadLattice, matrix, tol: float = 1e-12) -> AmbientIsometry:
    """Check MᵀGM = G and decide whether M lies in O^+(L_R).

    Exact (Fraction) input is checked exactly.  Membership in O^+ is read
    off the orientation of a positive-definite 2-plane P: the 2×2 matrix
    ((g x_i, x_j)) has positive determinant iff g preserves the component.
    """
    if L.signature[0] != 2:
        raise ValueError("O^+ is only defined here for signature (2, n)")
    mat = np.asarray(matrix)
    if mat.dtype == object:
        mat = la.qarray(mat)
        if not np.array_equal(mat.T.dot(L.G).dot(mat), L.G):
            raise ValueError("matrix does not preserve the Gram form")
        M = la.to_float(mat)
    else:
        mat = M = np.asarray(mat, dtype=float)
        G = la.to_float(L.G)
        scale = max(1.0, np.abs(M).max()) ** 2 * max(1.0, np.abs(G).max())
        if np.abs(M.T @ G @ M - G).max() > tol * scale:
            raise ValueError("matrix does not preserve the Gram form")
    G = la.to_float(L.G)
    P = _positive_plane(G)
    proj = (P @ G @ M @ P.T)
    return AmbientIsometry(mat, bool(np.linalg.det(proj) > 0))


def stabilizer_element(flag: IsotropicFlag, gamma1, eps: int = 1, alpha=None) -> AmbientIsometry:
    r"""
    The element of Γ(I)_Q acting on the tube by Z ↦ γ₁Z + α.

    Its Levi part sends e1 ↦ εe1, f1 ↦ εf1 and acts on V(I) by εγ₁, so that
    the induced action on U(I) = V(I)⊗I is γ₁; the translation is the
    Eichler transvection E_{α⊗e1}.

    Args:
        flag: flag with J (only I and the frame are used).
        gamma1: exact orthogonal matrix of V(I) in the (e2, vj..., f2) basis.
        eps: the action ±1 on I.
        alpha: translation vector in V(I) coordinates, or None.

    Returns:
        Exact AmbientIsometry.
    """
    if eps not in (1, -1):
        raise ValueError("eps must be ±1")
    g1 = la.qarray(gamma1)
    Q = flag.vi_gram
    if not np.array_equal(g1.T.dot(Q).dot(g1), Q):
        raise ValueError("gamma1 is not orthogonal for the V(I) form")
    N = flag.ambient.rank
    A = la.qzeros((N, N))
    A[0, 0] = Fraction(eps)
    A[N - 1, N - 1] = Fraction(eps)
    A[1:N - 1, 1:N - 1] = g1 * eps
    P = flag.frame
    M = P.T.dot(A).dot(la.inverse(P.T))
    if alpha is not None:
        m = la.qarray(alpha).dot(flag.vi_basis)
        M = eichler_transvection(flag.ambient, m, flag.e1).dot(M)
    return ambient_isometry(flag.ambient, M)


def random_isometry(flag: IsotropicFlag, rng: np.random.Generator, length: int = 3,
                    height: int = 2) -> AmbientIsometry:
    """Exact product of random rational Eichler transvections and SL2-lifts.

    Isotropic directions are taken among e1, e2, f1, f2 so that the
    result is a fairly generic element of O^+(L_Q).
    """
    L = flag.ambient
    iso = [flag.e1, flag.e2, flag.f1, flag.f2]
    M = la.qeye(L.rank)
    for _ in range(length):
        if rng.random() < 0.25:
            a, b, c = (int(x) for x in rng.integers(-height, height + 1, size=3))
            # (a b; c d) with det 1 from (1 b; 0 1)(1 0; c 1)
            g = JacobiElement.sl2(1 + b * c, b, c, 1)
            M = to_ambient(g, flag).matrix.dot(M)
            continue
        l = la.qarray(iso[int(rng.integers(0, 4))])
        lG = l.dot(L.G)
        # random m ⟂ l: project a random rational vector
        v = la.qarray([Fraction(int(x), int(rng.integers(1, 3)))
                       for x in rng.integers(-height, height + 1, size=L.rank)])
        partner = [x for x in iso if L.pair(x, l) != 0][0]
        p = la.qarray(partner)
        m = v - p * (v.dot(lG) / L.pair(partner, l))
        M = eichler_transvection(L, m, l).dot(M)
    return ambient_isometry(L, M)


def act(g: AmbientIsometry, Z: TubePoint) -> TubePoint:
    """g·Z, read from the normalized image of ω(Z)."""
    return point_from_omega(Z.flag, g.as_float @ omega_of(Z))


def collinearity_defect(u: np.ndarray, v: np.ndarray) -> float:
    """sin of the angle between two complex vectors (0 iff collinear)."""
    u = np.asarray(u, dtype=complex)
    v = np.asarray(v, dtype=complex)
    # residual of u after projecting onto C·v, relative to |u|
    r = u - (np.vdot(v, u) / np.vdot(v, v)) * v
    return float(np.linalg.norm(r) / np.linalg.norm(u))


# ------------------------------------------------------------ Jacobi group

@dataclass(frozen=True)
class JacobiElement:
    """One of the four generator kinds of the Jacobi group Γ(J)_Q."""

    kind: str
    payload: tuple

    KINDS = ("center", "e1-translate", "e2-translate", "sl2")

    def __post_init__(self):
        if self.kind not in self.KINDS:
            raise ValueError(f"unknown Jacobi element kind {self.kind!r}")
        if self.kind == "sl2":
            a, b, c, d = self.payload
            if a * d - b * c != 1:
                raise ValueError("sl2 payload must have determinant 1")

    @classmethod
    def center(cls, alpha) -> "JacobiElement":
        return cls("center", (Fraction(alpha),))

    @classmethod
    def e1_translate(cls, v1) -> "JacobiElement":
        return cls("e1-translate", tuple(Fraction(x) for x in v1))

    @classmethod
    def e2_translate(cls, v2) -> "JacobiElement":
        return cls("e2-translate", tuple(Fraction(x) for x in v2))

    @classmethod
    def sl2(cls, a, b, c, d) -> "JacobiElement":
        return cls("sl2", tuple(int(x) for x in (a, b, c, d)))


def _check_payload(g: JacobiElement, flag: IsotropicFlag) -> None:
    if g.kind in ("e1-translate", "e2-translate") and len(g.payload) != flag.n - 2:
        raise ValueError(f"vector payload must have length {flag.n - 2}")


def jacobi_action(g: JacobiElement, Z: TubePoint) -> TubePoint:
    """The closed-form action of a Jacobi generator on (τ, z, w)."""
    flag = Z.flag
    _check_payload(g, flag)
    GJ = la.to_float(flag.vj_gram)
    z = np.array(Z.z, dtype=complex)
    tau, w = Z.tau, Z.w
    if g.kind == "center":
        new = (tau, z, w + float(g.payload[0]))
    elif g.kind == "e1-translate":
        new = (tau, z + la.to_float(la.qarray(g.payload)), w)
    elif g.kind == "e2-translate":
        v2 = la.to_float(la.qarray(g.payload))
        new = (tau, z + tau * v2, w - v2 @ GJ @ z - 0.5 * (v2 @ GJ @ v2) * tau)
    else:
        a, b, c, d = g.payload
        j = c * tau + d
        new = ((a * tau + b) / j, z / j, w + c * (z @ GJ @ z) / (2 * j))
    return tube_point(flag, new[0], new[1], new[2])


def to_ambient(g: JacobiElement, flag: IsotropicFlag) -> AmbientIsometry:
    """Exact ambient matrix of a Jacobi generator in the fixed splitting."""
    if not flag.has_j:
        raise ValueError("flag has no J")
    _check_payload(g, flag)
    L = flag.ambient
    vj = la.qarray(flag.vj) if flag.vj else la.qzeros((0, L.rank))
    if g.kind == "center":
        m = la.qarray(flag.e2) * g.payload[0]
        M = eichler_transvection(L, m, flag.e1)
    elif g.kind == "e1-translate":
        M = eichler_transvection(L, la.qarray(g.payload).dot(vj), flag.e1)
    elif g.kind == "e2-translate":
        M = eichler_transvection(L, la.qarray(g.payload).dot(vj), flag.e2)
    else:
        a, b, c, d = (Fraction(x) for x in g.payload)
        N = L.rank
        A = la.qeye(N)
        # frame order e1, e2, vj..., f2, f1; columns are images
        A[0, 0], A[1, 0] = a, -c
        A[0, 1], A[1, 1] = -b, d
        A[N - 1, N - 1], A[N - 2, N - 1] = d, b
        A[N - 1, N - 2], A[N - 2, N - 2] = c, a
        P = flag.frame
        M = P.T.dot(A).dot(la.inverse(P.T))
    return ambient_isometry(L, M)


# ------------------------------------------------------ automorphy factors

def _pair_e1(flag: IsotropicFlag, v: np.ndarray) -> complex:
    G = la.to_float(flag.ambient.G)
    return complex(v @ G @ la.to_float(la.qarray(flag.e1)))


def factor_L(g: AmbientIsometry, Z: TubePoint) -> complex:
    """(g ω(Z), e1): the factor of automorphy on L in the I-trivialization."""
    gw = g.as_float @ omega_of(Z)
    j = _pair_e1(Z.flag, gw)
    if abs(j) <= tolerance() * max(1.0, np.abs(gw).max()):
        raise ChartBoundary("(g ω, e1) vanishes")
    return j


def factor_E(g: AmbientIsometry, Z: TubePoint) -> np.ndarray:
    """Matrix of V(I) → E_{[ω]} → E_{[gω]} → V(I) (column convention).

    A basis vector v lifts to s_v = v - (v, ω) e1 ∈ ω^⊥.  After applying g
    the multiple of ω(gZ) is removed using the f1-coordinate, and the
    remaining (e2, vj..., f2) coordinates form the column.
    """
    flag = Z.flag
    G = la.to_float(flag.ambient.G)
    M = g.as_float
    w = omega_of(Z)
    gZ = point_from_omega(flag, M @ w)
    w2 = omega_of(gZ)
    e1 = la.to_float(la.qarray(flag.e1))
    lifts = la.to_float(flag.vi_basis)
    Pinv = la.to_float(flag.frame_inverse)
    cols = []
    for v in lifts:
        s = v - (v @ G @ w) * e1
        u = M @ s
        c = u @ Pinv
        u = u - c[-1] * w2
        cols.append((u @ Pinv)[1:-1])
    return np.array(cols).T


def factor_Elk(g: AmbientIsometry, Z: TubePoint, S: SchurSpace, k: int) -> np.ndarray:
    """ρ_λ(factor_E) · factor_L^k on V(I)_{λ,k} (S built on the V(I) form)."""
    if S.n != Z.flag.n:
        raise ValueError("SchurSpace dimension does not match V(I)")
    return act_on_schur_numeric(factor_E(g, Z), S) * factor_L(g, Z) ** k


# ------------------------------------------------- cusp data and ω_J

@dataclass(frozen=True)
class CuspData:
    """Lattice data of U(I)_Z in V(I) coordinates (e2, vj..., f2).

    ``alpha0`` is the positive generator of U(J)_Z = U(I)_Z ∩ Q e2, so that
    v_{J,Γ} = alpha0·e2 and β₀ = 1/alpha0; l_{J,Γ} = β₀ f2 pairs to 1 with it.
    """

    basis: np.ndarray
    dual_basis: np.ndarray
    alpha0: Fraction
    reference: np.ndarray

    @property
    def beta0(self) -> Fraction:
        return 1 / self.alpha0

    @property
    def n(self) -> int:
        return self.basis.shape[0]

    @property
    def v_J_gamma(self) -> np.ndarray:
        v = la.qzeros(self.n)
        v[0] = self.alpha0
        return v

    @property
    def l_J_gamma(self) -> np.ndarray:
        v = la.qzeros(self.n)
        v[-1] = self.beta0
        return v

    def index_to_vector(self, c) -> np.ndarray:
        """Dual-basis coordinates → V(I) coordinates."""
        return la.qarray(c).dot(self.dual_basis)

    def vector_to_index(self, v) -> np.ndarray:
        return la.qarray(v).dot(la.inverse(self.dual_basis))

    def lattice_to_vector(self, c) -> np.ndarray:
        return la.qarray(c).dot(self.basis)


@lru_cache(maxsize=64)
def cusp_data(flag: IsotropicFlag) -> CuspData:
    B = integral_unipotent_lattice(flag)
    Q = flag.vi_gram
    D = la.inverse(B.dot(Q)).T
    n = flag.n
    r = la.inverse(B)[0]
    den = la.lcm_denominator(list(r))
    s = [int(x * den) for x in r]
    g = 0
    for x in s:
        g = np.gcd(g, abs(x))
    alpha0 = Fraction(den, int(g))
    ref = la.qzeros(n)
    ref[0] = ref[-1] = Fraction(1)
    return CuspData(B, D, alpha0, ref)


def omega_J_closed_form(g: JacobiElement, Z: TubePoint, beta0) -> complex:
    """The four closed forms of the ω_J multiplier j_γ(τ, z)."""
    GJ = la.to_float(Z.flag.vj_gram)
    b0 = float(beta0)
    z = np.array(Z.z, dtype=complex)
    if g.kind == "center":
        x = b0 * float(g.payload[0])
    elif g.kind == "e1-translate":
        x = 0.0
    elif g.kind == "e2-translate":
        v2 = la.to_float(la.qarray(g.payload))
        x = -b0 * (v2 @ GJ @ z) - 0.5 * b0 * (v2 @ GJ @ v2) * Z.tau
    else:
        a, b, c, d = g.payload
        x = b0 * c * (z @ GJ @ z) / (2 * (c * Z.tau + d))
    return complex(np.exp(2j * np.pi * x))


def omega_J_multiplier(g: JacobiElement, Z: TubePoint, beta0=None, check: bool = True) -> complex:
    """(γ*ω_J)/ω_J = e(β₀(γ*w - w)), optionally cross-checked."""
    if beta0 is None:
        beta0 = cusp_data(Z.flag).beta0
    gZ = jacobi_action(g, Z)
    val = complex(np.exp(2j * np.pi * float(beta0) * (gZ.w - Z.w)))
    if check:
        ref = omega_J_closed_form(g, Z, beta0)
        if abs(val - ref) > 1e3 * tolerance() * max(1.0, abs(ref)):
            raise AssertionError("ω_J multiplier disagrees with its closed form")
    return val
