"""Petersson metrics in the tube chart and the weight-bound predicates.

With Y = Im Z and (·,·) the form on V(I):

    |s|²_L = 2(Y, Y),   (v1, v2)_E = -(v1, v2) + 2(v1, Y)(v2, Y)/(Y, Y),

and the metric on E_{λ,k} is the d-fold tensor metric of (·,·)_E restricted
to V(I)_λ, times |s|²_L to the k.  Under g ∈ O^+(L_R) these transform
through the inverse factor of automorphy:

    metric_L(gZ) · |j(g, Z)|² = metric_L(Z),
    J^H · gram_Elk(gZ) · J = gram_Elk(Z),   J = factor_Elk(g, Z).
"""
from dataclasses import dataclass, field
from fractions import Fraction
from math import comb, factorial
from typing import Optional

import numpy as np

from . import _linalg as la
from .domain import TubePoint, omega_of
from .errors import OutOfTableRange
from .schur import Partition, SchurSpace, corank, partition, so_restriction

__all__ = [
    "MetricReport", "WeightVerdict", "metric_L", "metric_L_ambient",
    "metric_E", "gram_E", "gram_Elk", "volume_factor", "metric_report",
    "weight_verdict", "classical_dictionary", "holomorphic_tensor_table",
    "N_trivial",
]


def _Q(Z: TubePoint) -> np.ndarray:
    return la.to_float(Z.flag.vi_gram)


def metric_L(Z: TubePoint) -> float:
    """2(Im Z, Im Z)."""
    Y = Z.imag
    return float(2 * Y @ _Q(Z) @ Y)


def metric_L_ambient(Z: TubePoint) -> float:
    """(ω, ω̄) evaluated with the ambient Gram matrix; equals metric_L."""
    w = omega_of(Z)
    G = la.to_float(Z.flag.ambient.G)
    return float(np.real(w @ G @ np.conj(w)))


def metric_E(Z: TubePoint, v1, v2) -> float:
    Q = _Q(Z)
    Y = Z.imag
    v1, v2 = np.asarray(v1, dtype=float), np.asarray(v2, dtype=float)
    return float(-v1 @ Q @ v2 + 2 * (v1 @ Q @ Y) * (v2 @ Q @ Y) / (Y @ Q @ Y))


def gram_E(Z: TubePoint) -> np.ndarray:
    """Gram matrix of (·,·)_E in the V(I) basis: −Q plus a rank-one update."""
    Q = _Q(Z)
    qy = Q @ Z.imag
    return -Q + 2 * np.outer(qy, qy) / (Z.imag @ qy)


def _tensor_gram(S: SchurSpace, H: np.ndarray) -> np.ndarray:
    """B · H^{⊗d} · B^T for the SchurSpace basis B."""
    n, d = S.n, S.d
    if d == 0:
        return np.ones((1, 1))
    B = np.zeros((S.dim, n ** d))
    for i, row in enumerate(S.basis.rows):
        for j, v in row.items():
            B[i, j] = float(v)
    T = B.reshape((S.dim,) + (n,) * d)
    for ax in range(1, d + 1):
        T = np.moveaxis(np.tensordot(T, H, axes=([ax], [0])), -1, ax)
    return B @ T.reshape(S.dim, -1).T


def gram_Elk(Z: TubePoint, S: SchurSpace, k: int) -> np.ndarray:
    """Metric on V(I)_{λ,k} in the SchurSpace basis (real symmetric)."""
    if S.space.G.shape != Z.flag.vi_gram.shape or not np.array_equal(S.space.G, Z.flag.vi_gram):
        raise ValueError("SchurSpace is not built on the flag's V(I)")
    return _tensor_gram(S, gram_E(Z)) * metric_L(Z) ** k


def volume_factor(Z: TubePoint) -> float:
    """(Im Z, Im Z)^{-n}, the invariant volume density up to a constant."""
    Y = Z.imag
    return float((Y @ _Q(Z) @ Y) ** (-Z.flag.n))


@dataclass(frozen=True)
class MetricReport:
    point: TubePoint
    gram_L: float
    gram_E: np.ndarray = field(repr=False)
    gram_Elk: Optional[np.ndarray] = field(repr=False)
    volume_factor: float

    def as_dict(self) -> dict:
        out = {
            "point": {"tau": _cjson(self.point.tau), "z": [_cjson(x) for x in self.point.z],
                      "w": _cjson(self.point.w)},
            "gram_L": self.gram_L,
            "gram_E": self.gram_E.tolist(),
            "gram_E_eigenvalues": np.linalg.eigvalsh(self.gram_E).tolist(),
            "volume_factor": self.volume_factor,
        }
        if self.gram_Elk is not None:
            out["gram_Elk"] = self.gram_Elk.tolist()
        return out


def _cjson(x) -> list:
    x = complex(x)
    return [x.real, x.imag]


def metric_report(Z: TubePoint, S: Optional[SchurSpace] = None, k: int = 0) -> MetricReport:
    Elk = gram_Elk(Z, S, k) if S is not None else None
    return MetricReport(Z, metric_L(Z), gram_E(Z), Elk, volume_factor(Z))


# ------------------------------------------------------------- predicates

@dataclass(frozen=True)
class WeightVerdict:
    """Vanishing and square-integrability predicates for weight (λ, k) on O(2, n)."""

    lam: Partition
    k: int
    n: int
    vt1: bool
    vt2_sq: bool
    cusp_vanish: bool
    m_vanish: bool
    l2_class: str
    reasons: tuple = ()
    notes: tuple = ()
    dictionary: Optional[dict] = None

    def as_dict(self) -> dict:
        return {
            "lambda": list(self.lam.parts), "k": self.k, "n": self.n,
            "vt1": self.vt1, "vt2_sq": self.vt2_sq, "cusp_vanish": self.cusp_vanish,
            "m_vanish": self.m_vanish, "l2_class": self.l2_class,
            "reasons": list(self.reasons), "notes": list(self.notes),
            "dictionary": self.dictionary,
        }


def classical_dictionary(lam: Partition, k: int) -> Optional[dict]:
    """Classical weights for n = 3 (Siegel genus 2) and n = 4 (Hermitian) when λ = (d)."""
    if len(lam.parts) > 1:
        return None
    d = lam.lambda1
    if lam.n == 3:
        return {"type": "siegel_genus2", "rho": [k + d, k - d], "vanishes": k <= d}
    if lam.n == 4:
        return {"type": "hermitian", "r": k - d, "rho": f"Sym^{d} x Sym^{d}", "cusp_vanishes": k - d <= 1}
    return None


def _scalar_verdict(lam: Partition, k: int, n: int, witt_index: Optional[int]) -> WeightVerdict:
    half = Fraction(n, 2)
    reasons, notes = [], []
    m_vanish = False
    if k < 0:
        m_vanish = True
        reasons.append("k < 0")
    elif 0 < k < half - 1:
        m_vanish = True
        reasons.append("0 < k < n/2 - 1")
    if witt_index == 2:
        l2 = "cusp_iff_L2" if k >= n - 1 else ("always_L2" if k <= n - 2 else "indeterminate")
    else:
        l2 = "unknown"
        notes.append("square integrability of scalar weights is only settled for Witt index 2")
    return WeightVerdict(lam, k, n, False, False, False, m_vanish, l2, tuple(reasons), tuple(notes))


def weight_verdict(lam, k: int, n: Optional[int] = None, witt_index: Optional[int] = None) -> WeightVerdict:
    """Evaluate every bound as printed, in exact rational arithmetic.

    Args:
        lam: a Partition, or parts together with ``n``.
        k: the scalar weight.
        n: dimension of V(I); taken from ``lam`` when omitted.
        witt_index: Witt index of L if known.  The first vanishing bound
            assumes index 2; with ``None`` it is applied and flagged, with a
            smaller index it is not applied.

    Returns:
        A WeightVerdict.  For λ = 1 only the scalar bounds are evaluated.
    """
    if not isinstance(lam, Partition):
        lam = partition(lam, n)
    n = lam.n
    k = int(k)
    if lam.is_det:
        raise ValueError("no bounds are available for λ = det")
    if lam.is_trivial:
        return _scalar_verdict(lam, k, n, witt_index)
    half = Fraction(n, 2)
    lam1 = lam.lambda1
    bar = sum(abs(x) for x in so_restriction(lam)["lambda_bar"])
    cork = corank(lam)
    notes = []
    if witt_index is None:
        notes.append("Witt index 2 assumed for the first vanishing bound")
    vt1 = (witt_index in (None, 2)) and k < lam1 + half - 1
    vt2_sq = k < n + lam1 - cork - 1
    reasons = []
    if k < 0:
        reasons.append("k < 0")
    if k == 0:
        reasons.append("k = 0 with λ ≠ 1, det")
    if vt1:
        reasons.append("VT I: k < λ1 + n/2 - 1")
    if k < n - bar - 1:
        reasons.append("VT II: k < n - |λ̄| - 1")
    if k >= n + bar - 1:
        l2 = "cusp_iff_L2"
    elif k <= n - bar - 2:
        l2 = "always_L2"
    else:
        l2 = "indeterminate"
    v = WeightVerdict(lam, k, n, vt1, vt2_sq, vt2_sq, bool(reasons), l2, tuple(reasons),
                      tuple(notes), classical_dictionary(lam, k))
    if v.l2_class == "always_L2" and v.cusp_vanish and not v.m_vanish:
        raise AssertionError("inconsistent bounds")
    return v


def N_trivial(k: int) -> int:
    """k!/(2^{k/2}(k/2)!): multiplicity of the trivial summand in St^{⊗k}, k even."""
    if k % 2:
        return 0
    return factorial(k) // (2 ** (k // 2) * factorial(k // 2))


def holomorphic_tensor_table(n: int, k: int) -> dict:
    """Possible weights of holomorphic k-tensors for 0 < k ≤ n/2.

    ``terms`` lists (name, multiplicity) of the spaces M receiving an
    embedding; empty means the tensors vanish.
    """
    if k <= 0 or Fraction(k) > Fraction(n, 2):
        raise OutOfTableRange(f"k = {k} is outside 0 < k <= n/2 for n = {n}")
    out = {"n": n, "k": k}
    if Fraction(k) < Fraction(n, 2) - 1:
        out.update(case="below", vanishes=True, terms=[])
        return out
    terms = []
    if k == (n - 1) // 2:
        case = "k=[(n-1)/2]"
        if n % 4 in (1, 2):
            terms.append([f"M_{k}", N_trivial(k)])
    else:
        case = "k=n/2"
        terms.append([f"M_(wedge^{k},{k})", 1])
        if n % 4 == 0:
            terms.append([f"M_{k}", N_trivial(k)])
    out.update(case=case, vanishes=not terms, terms=terms,
               wedge_dim=comb(n, k) if case == "k=n/2" else None)
    return out
