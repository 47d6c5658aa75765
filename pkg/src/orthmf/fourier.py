"""Formal Fourier expansions at a 0-dimensional cusp.

An expansion is a finite map l ↦ a(l) from indices of U(I)_Z^∨ (written in
the dual basis of U(I)_Z) to coefficient vectors of V(I)_{λ,k} in the
SchurSpace basis.  Coefficients are exact: rationals, or elements of a
cyclotomic field when unit-circle factors e(x) enter through translations.
"""
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from math import lcm
from typing import Optional

import numpy as np
import sympy

from . import _linalg as la
from .domain import CuspData, TubePoint, cusp_data
from .errors import NotAGroup, NotLatticePreserving
from .lattice import IsotropicFlag, flag_from_json, flag_to_json
from .schur import (Partition, SchurSpace, act_on_schur, partition,
                    quadratic_space, schur_space)

__all__ = [
    "Cyclotomic", "unit", "FourierExpansion", "CuspStabilizer",
    "ValidationReport", "fourier_expansion", "coefficient_space",
    "cone_position", "validate", "symmetry_defect", "is_symmetric",
    "symmetrize", "evaluate", "rebase", "expansion_to_json",
    "expansion_from_json", "pairing",
]


# ----------------------------------------------------- cyclotomic numbers

@lru_cache(maxsize=None)
def _phi(N: int) -> tuple:
    """Coefficients (low to high) of the N-th cyclotomic polynomial."""
    x = sympy.Symbol("x")
    return tuple(int(c) for c in reversed(sympy.Poly(sympy.cyclotomic_poly(N, x), x).all_coeffs()))


def _reduce(poly: list, N: int) -> tuple:
    """Reduce a coefficient list modulo Φ_N (monic)."""
    phi = _phi(N)
    deg = len(phi) - 1
    poly = list(poly)
    for i in range(len(poly) - 1, deg - 1, -1):
        c = poly[i]
        if c:
            for j in range(deg + 1):
                poly[i - deg + j] -= c * phi[j]
    poly = poly[:deg] + [Fraction(0)] * (deg - len(poly))
    return tuple(Fraction(c) for c in poly)


class Cyclotomic:
    """An element of Q(ζ_N), ζ_N = e(1/N), in the power basis 1, ζ, ..., ζ^{φ(N)-1}.

    Arithmetic with Fraction and int is supported; results that are
    rational collapse back to Fraction.
    """

    __slots__ = ("N", "coeffs")

    def __init__(self, N: int, coeffs):
        self.N = int(N)
        self.coeffs = _reduce(coeffs, self.N)

    @classmethod
    def root(cls, x) -> "Fraction | Cyclotomic":
        """e(x) for rational x."""
        x = Fraction(x) % 1
        if x == 0:
            return Fraction(1)
        if x == Fraction(1, 2):
            return Fraction(-1)
        N, p = x.denominator, x.numerator
        poly = [Fraction(0)] * (p + 1)
        poly[p] = Fraction(1)
        return cls(N, poly)

    def lift(self, M: int) -> "Cyclotomic":
        """The same number written in Q(ζ_M), N | M."""
        if M == self.N:
            return self
        s = M // self.N
        poly = [Fraction(0)] * (s * len(self.coeffs) + 1)
        for i, c in enumerate(self.coeffs):
            poly[s * i] = c
        return Cyclotomic(M, poly)

    def _collapse(self):
        if all(c == 0 for c in self.coeffs[1:]):
            return self.coeffs[0] if self.coeffs else Fraction(0)
        return self

    @staticmethod
    def _coerce(other):
        if isinstance(other, Cyclotomic):
            return other
        if isinstance(other, (int, Fraction)):
            return Cyclotomic(1, [Fraction(other)])
        return None

    def __add__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        M = lcm(self.N, o.N)
        a, b = self.lift(M).coeffs, o.lift(M).coeffs
        return Cyclotomic(M, [x + y for x, y in zip(a, b)])._collapse()

    __radd__ = __add__

    def __neg__(self):
        return Cyclotomic(self.N, [-c for c in self.coeffs])

    def __sub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        M = lcm(self.N, o.N)
        a, b = self.lift(M).coeffs, o.lift(M).coeffs
        poly = [Fraction(0)] * (len(a) + len(b))
        for i, x in enumerate(a):
            if x:
                for j, y in enumerate(b):
                    poly[i + j] += x * y
        return Cyclotomic(M, poly)._collapse()

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction)):
            return Cyclotomic(self.N, [c / other for c in self.coeffs])._collapse()
        return NotImplemented

    def __eq__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        M = lcm(self.N, o.N)
        return self.lift(M).coeffs == o.lift(M).coeffs

    def __hash__(self):
        return hash((self.N, self.coeffs))

    def __bool__(self):
        return any(self.coeffs)

    def __complex__(self):
        z = np.exp(2j * np.pi / self.N)
        return complex(sum(float(c) * z ** i for i, c in enumerate(self.coeffs)))

    def __abs__(self):
        return abs(complex(self))

    def __repr__(self):
        return f"Cyclotomic({self.N}, {[str(c) for c in self.coeffs]})"

    def to_json(self) -> dict:
        return {"cyclotomic": self.N, "c": [la.fstr(c) for c in self.coeffs]}


def unit(x):
    """Exact e(x) = exp(2πi x) for rational x."""
    return Cyclotomic.root(x)


def _entry_to_json(v):
    return v.to_json() if isinstance(v, Cyclotomic) else la.fstr(v)


def _entry_from_json(v):
    if isinstance(v, dict):
        return Cyclotomic(int(v["cyclotomic"]), [Fraction(c) for c in v["c"]])._collapse()
    return Fraction(v)


def _to_complex(vec) -> np.ndarray:
    return np.array([complex(x) for x in vec], dtype=complex)


# --------------------------------------------------------------- expansions

@lru_cache(maxsize=64)
def coefficient_space(flag: IsotropicFlag, lam: Partition) -> SchurSpace:
    """V(I)_λ realised on the flag's V(I) basis (e2, vj..., f2)."""
    return schur_space(quadratic_space(flag.vi_gram), lam)


def _canon_index(l) -> tuple:
    return tuple(la.frac(x) for x in l)


@dataclass(frozen=True)
class FourierExpansion:
    """Finite Fourier expansion Σ a(l) q^l at the cusp I of ``flag``.

    ``coeffs`` is a tuple of (index, vector) pairs sorted by index; indices
    lie in (1/denominator)·U(I)_Z^∨.  ``holomorphic`` and ``cusp`` are the
    declared support classes checked by :func:`validate`.  ``space`` is the
    coefficient space; it defaults to V(I)_λ but may be the V(I)_λ of a
    larger lattice after restriction.
    """

    flag: IsotropicFlag
    lam: Partition
    k: int
    coeffs: tuple
    denominator: int = 1
    holomorphic: bool = True
    cusp: bool = False
    space: Optional[SchurSpace] = field(default=None, compare=False)

    @property
    def schur(self) -> SchurSpace:
        return self.space if self.space is not None else coefficient_space(self.flag, self.lam)

    @property
    def dim(self) -> int:
        return self.schur.dim

    @property
    def support(self) -> list:
        return [l for l, _ in self.coeffs]

    def as_dict(self) -> dict:
        return {l: a for l, a in self.coeffs}

    def coefficient(self, l) -> tuple:
        return self.as_dict().get(_canon_index(l), (Fraction(0),) * self.dim)

    def __len__(self) -> int:
        return len(self.coeffs)

    def replace_coeffs(self, coeffs, **changes) -> "FourierExpansion":
        kw = dict(flag=self.flag, lam=self.lam, k=self.k, denominator=self.denominator,
                  holomorphic=self.holomorphic, cusp=self.cusp, space=self.space)
        kw.update(changes)
        return fourier_expansion(coeffs=coeffs, **kw)


def fourier_expansion(flag: IsotropicFlag, lam, k: int, coeffs, denominator: Optional[int] = None,
                      holomorphic: bool = True, cusp: bool = False,
                      space: Optional[SchurSpace] = None) -> FourierExpansion:
    """Canonical constructor: drops zero coefficients, sorts, checks shapes.

    ``coeffs`` is a mapping or iterable of (index, vector) pairs; repeated
    indices are summed.  With ``denominator=None`` the smallest N making
    all indices lie in (1/N)·U(I)_Z^∨ is used.
    """
    if not isinstance(lam, Partition):
        lam = partition(lam, flag.n)
    S = space if space is not None else coefficient_space(flag, lam)
    items = coeffs.items() if isinstance(coeffs, dict) else coeffs
    acc = {}
    for l, a in items:
        l = _canon_index(l)
        a = tuple(x if isinstance(x, Cyclotomic) else la.frac(x) for x in a)
        if len(a) != S.dim:
            raise ValueError(f"coefficient has length {len(a)}, expected {S.dim}")
        if len(l) != flag.n:
            raise ValueError(f"index has length {len(l)}, expected {flag.n}")
        if l in acc:
            acc[l] = tuple(x + y for x, y in zip(acc[l], a))
        else:
            acc[l] = a
    clean = tuple(sorted((l, a) for l, a in acc.items() if any(a)))
    need = 1
    for l, _ in clean:
        for x in l:
            need = lcm(need, x.denominator)
    if denominator is None:
        denominator = need
    elif denominator % need:
        raise ValueError(f"indices need denominator {need}, got {denominator}")
    return FourierExpansion(flag, lam, int(k), clean, int(denominator), holomorphic, cusp, space)


def pairing(flag: IsotropicFlag, u, v):
    """(u, v) for V(I)-coordinate vectors (exact when inputs are)."""
    return la.qarray(u).dot(flag.vi_gram).dot(la.qarray(v))


# ------------------------------------------------------------------- cones

def cone_position(flag: IsotropicFlag, l, cd: Optional[CuspData] = None) -> str:
    """'interior', 'boundary_ray' or 'outside' for a dual-basis index l."""
    cd = cusp_data(flag) if cd is None else cd
    v = cd.index_to_vector(l)
    q = pairing(flag, v, v)
    p = pairing(flag, v, cd.reference)
    if q > 0 and p > 0:
        return "interior"
    if q == 0 and p >= 0:
        return "boundary_ray"
    return "outside"


@dataclass
class ValidationReport:
    """Outcome of :func:`validate`; lints do not make an expansion invalid."""

    holomorphic: bool
    cusp: bool
    integral: bool
    violations: list
    lints: list
    notes: list

    @property
    def ok(self) -> bool:
        return not self.violations

    def as_dict(self) -> dict:
        return {"ok": self.ok, "holomorphic": self.holomorphic, "cusp": self.cusp,
                "integral": self.integral, "violations": list(self.violations),
                "lints": list(self.lints), "notes": list(self.notes)}


def validate(exp: FourierExpansion) -> ValidationReport:
    """Check support against the declared classes and lint a(0) ≠ 0."""
    cd = cusp_data(exp.flag)
    positions = {l: cone_position(exp.flag, l, cd) for l in exp.support}
    holo = all(p != "outside" for p in positions.values())
    cusp = all(p == "interior" for p in positions.values())
    integral = all(x.denominator == 1 for l in exp.support for x in l)
    violations, lints = [], []
    if exp.holomorphic and not holo:
        bad = [l for l, p in positions.items() if p == "outside"]
        violations.append(f"holomorphy violated at {len(bad)} index(es), first {[la.fstr(x) for x in bad[0]]}")
    if exp.cusp and not cusp:
        violations.append("cusp condition violated: support meets the cone boundary")
    if exp.denominator == 1 and not integral:
        violations.append("index outside U(I)_Z^∨ in an integral expansion")
    zero = tuple(Fraction(0) for _ in range(exp.flag.n))
    if not (exp.lam.is_trivial or exp.lam.is_det) and zero in positions:
        lints.append("constant term must vanish for λ ≠ 1, det")
    notes = ["cusp condition checked only at the cusp of the stored flag"]
    return ValidationReport(holo, cusp, integral, violations, lints, notes)


# ---------------------------------------------------------------- symmetry

@dataclass(frozen=True)
class CuspStabilizer:
    """(γ₁, ε, α): Z ↦ γ₁Z + α with ε the action on I.

    ``gamma1`` is an exact orthogonal matrix on U(I) in the V(I) basis
    (column convention); ``alpha`` a vector of U(I)_Q in the same basis.
    """

    gamma1: tuple
    eps: int = 1
    alpha: Optional[tuple] = None

    @classmethod
    def make(cls, gamma1, eps: int = 1, alpha=None) -> "CuspStabilizer":
        g = tuple(tuple(la.frac(x) for x in row) for row in gamma1)
        a = None if alpha is None else tuple(la.frac(x) for x in alpha)
        if a is not None and not any(a):
            a = None
        return cls(g, int(eps), a)

    @property
    def matrix(self) -> np.ndarray:
        return la.qarray(self.gamma1)

    def alpha_vec(self, n: int) -> np.ndarray:
        return la.qzeros(n) if self.alpha is None else la.qarray(self.alpha)

    def compose(self, other: "CuspStabilizer") -> "CuspStabilizer":
        """self ∘ other."""
        g = self.matrix.dot(other.matrix)
        a = self.matrix.dot(other.alpha_vec(g.shape[0])) + self.alpha_vec(g.shape[0])
        return CuspStabilizer.make(g, self.eps * other.eps, a)


def _check_stabilizer(flag: IsotropicFlag, gamma: CuspStabilizer, cd: CuspData) -> None:
    g = gamma.matrix
    Q = flag.vi_gram
    if g.shape != (flag.n, flag.n) or not np.array_equal(g.T.dot(Q).dot(g), Q):
        raise NotLatticePreserving("γ₁ is not orthogonal on U(I)")
    B = cd.basis
    M = B.dot(g.T).dot(la.inverse(B))
    if any(x.denominator != 1 for x in M.flat) or abs(la.det(M)) != 1:
        raise NotLatticePreserving("γ₁ does not preserve U(I)_Z")
    if pairing(flag, g.dot(cd.reference), cd.reference) <= 0:
        raise NotLatticePreserving("γ₁ swaps the positive cones")
    if gamma.eps not in (1, -1):
        raise ValueError("ε must be ±1")


def _index_map(cd: CuspData, g: np.ndarray, l: tuple) -> tuple:
    v = cd.index_to_vector(l)
    return _canon_index(cd.vector_to_index(g.dot(v)))


def _coefficient_action(exp: FourierExpansion, gamma: CuspStabilizer) -> np.ndarray:
    """ρ_λ(εγ₁)·ε^k on V(I)_{λ,k}."""
    if exp.schur.n != exp.flag.n:
        raise ValueError("symmetry needs coefficients in the flag's own V(I)_λ")
    R = act_on_schur(gamma.matrix * gamma.eps, exp.schur)
    return R * (gamma.eps ** (exp.k % 2))


def _translate(exp: FourierExpansion, gamma: CuspStabilizer, cd: CuspData, R=None) -> dict:
    """The expansion γ·a with (γ·a)(γ₁l) = e(-(γ₁l, α)) ρ(γ) a(l)."""
    R = _coefficient_action(exp, gamma) if R is None else R
    g = gamma.matrix
    alpha = gamma.alpha_vec(exp.flag.n)
    out = {}
    for l, a in exp.coeffs:
        gl = _index_map(cd, g, l)
        img = R.dot(np.array(a, dtype=object))
        if gamma.alpha is not None:
            phase = unit(-pairing(exp.flag, cd.index_to_vector(gl), alpha))
            img = img * phase
        out[gl] = tuple(img)
    return out


def _max_abs(vecs) -> float:
    m = 0.0
    for v in vecs:
        for x in v:
            if x:
                m = max(m, abs(complex(x)))
    return m


def symmetry_defect(exp: FourierExpansion, gamma: CuspStabilizer) -> float:
    """max_l ‖a(γ₁l) - e(-(γ₁l, α)) ρ(γ) a(l)‖_∞ (exactly 0.0 when symmetric)."""
    cd = cusp_data(exp.flag)
    _check_stabilizer(exp.flag, gamma, cd)
    moved = _translate(exp, gamma, cd)
    have = exp.as_dict()
    zero = (Fraction(0),) * exp.dim
    diffs = []
    for l in set(moved) | set(have):
        a = have.get(l, zero)
        b = moved.get(l, zero)
        diffs.append([x - y for x, y in zip(a, b)])
    return _max_abs(diffs)


def is_symmetric(exp: FourierExpansion, gamma: CuspStabilizer) -> bool:
    return symmetry_defect(exp, gamma) == 0.0


def _same_mod_lattice(a: CuspStabilizer, b: CuspStabilizer, cd: CuspData) -> bool:
    if a.gamma1 != b.gamma1 or a.eps != b.eps:
        return False
    n = cd.n
    diff = a.alpha_vec(n) - b.alpha_vec(n)
    c = diff.dot(la.inverse(cd.basis))
    return all(x.denominator == 1 for x in c)


def _check_group(flag: IsotropicFlag, group, cd: CuspData) -> None:
    for g in group:
        _check_stabilizer(flag, g, cd)
    for g in group:
        for h in group:
            gh = g.compose(h)
            if not any(_same_mod_lattice(gh, x, cd) for x in group):
                raise NotAGroup("list is not closed under composition")


def symmetrize(exp: FourierExpansion, group) -> FourierExpansion:
    """Average the γ-translates of ``exp`` over a finite group of stabilizers.

    Elements are compared modulo translations by U(I)_Z, which act
    trivially on integral expansions.
    """
    group = list(group)
    if not group:
        raise NotAGroup("empty group")
    cd = cusp_data(exp.flag)
    _check_group(exp.flag, group, cd)
    if exp.denominator != 1 and any(g.alpha is not None for g in group):
        raise ValueError("translations need an integral expansion")
    acc = {}
    for g in group:
        for l, a in _translate(exp, g, cd).items():
            if l in acc:
                acc[l] = [x + y for x, y in zip(acc[l], a)]
            else:
                acc[l] = list(a)
    n = len(group)
    out = {l: [x / n for x in a] for l, a in acc.items()}
    return exp.replace_coeffs(out)


# -------------------------------------------------------------- evaluation

def evaluate(exp: FourierExpansion, Z: TubePoint) -> np.ndarray:
    """Σ a(l) e((l, Z)) as a complex vector in the SchurSpace basis."""
    cd = cusp_data(exp.flag)
    Q = la.to_float(exp.flag.vi_gram)
    x = Z.vector
    out = np.zeros(exp.dim, dtype=complex)
    for l, a in exp.coeffs:
        v = la.to_float(cd.index_to_vector(l))
        out += _to_complex(a) * np.exp(2j * np.pi * (v @ Q @ x))
    return out


def rebase(exp: FourierExpansion, v0) -> FourierExpansion:
    """Multiply a(l) by e((l, v0)): the expansion of Z ↦ f(Z + v0).

    This is the effect of moving the base point I′ by the Eichler
    transvection E_{v0⊗e1}; ``v0`` is a V(I)-coordinate vector.
    """
    cd = cusp_data(exp.flag)
    v0 = la.qarray(v0)
    out = {}
    for l, a in exp.coeffs:
        ph = unit(pairing(exp.flag, cd.index_to_vector(l), v0))
        out[l] = [x * ph for x in a]
    return exp.replace_coeffs(out)


# -------------------------------------------------------------------- JSON

def expansion_to_json(exp: FourierExpansion) -> dict:
    out = {
        "flag": flag_to_json(exp.flag),
        "lambda": list(exp.lam.parts),
        "k": exp.k,
        "denominator": exp.denominator,
        "holomorphic": exp.holomorphic,
        "cusp": exp.cusp,
        "coeffs": [{"l": [la.fstr(x) for x in l], "a": [_entry_to_json(x) for x in a]}
                   for l, a in exp.coeffs],
    }
    if exp.space is not None and exp.space.n != exp.flag.n:
        out["value_gram"] = [[la.fstr(x) for x in row] for row in exp.space.space.gram]
    return out


def expansion_from_json(obj: dict, flag: Optional[IsotropicFlag] = None) -> FourierExpansion:
    flag = flag_from_json(obj["flag"]) if flag is None else flag
    space = None
    lam_n = flag.n
    if "value_gram" in obj:
        q = quadratic_space([[Fraction(x) for x in row] for row in obj["value_gram"]])
        lam_n = q.dim
        space = schur_space(q, partition(obj["lambda"], lam_n))
    lam = partition(obj["lambda"], lam_n)
    coeffs = [([Fraction(x) for x in c["l"]], [_entry_from_json(x) for x in c["a"]])
              for c in obj.get("coeffs", [])]
    return fourier_expansion(flag, lam, int(obj["k"]), coeffs, obj.get("denominator"),
                             bool(obj.get("holomorphic", True)), bool(obj.get("cusp", False)), space)
