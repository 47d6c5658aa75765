"""The J-filtration on V(I)_λ in split coordinates.

In a split basis e_1, ..., e_n of V(I) with e_1 spanning J/I, the flag

    0 ⊂ ⟨e_1⟩ ⊂ ⟨e_1, ..., e_{n-1}⟩ ⊂ V        (levels -1, 0, 1)

induces F^r V^{⊗d} = Σ_{|i|=r} F^{i_1} ⊗ ... ⊗ F^{i_d} and, by
intersection, F^r V_λ.  The torus diag(α, 1, ..., 1, α^{-1}) splits the
filtration: F^r is the sum of the weight spaces of weight ≥ -r, and Gr^r
is represented by the weight -r space.  Both descriptions are computed
and compared.
"""
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product

from . import _linalg as la
from .schur import (ExactSubspace, Partition, SchurSpace, SplitQuadraticSpace,
                    act_on_schur, invariant_subspace, schur_space,
                    subspace_from_vectors, unipotent_generators)

__all__ = [
    "FiltrationTable", "base_flag_filtration", "filtration_table",
    "flag_sum_filtration", "u_invariants_equal_bottom", "jacobi_decomposition",
    "alpha_table",
]


def base_flag_filtration(n: int) -> list:
    """Bases (exact rows) of ⟨e1⟩ ⊂ ⟨e1..e_{n-1}⟩ ⊂ V, levels -1, 0, 1."""
    if n < 3:
        raise ValueError("need n >= 3")
    eye = la.qeye(n)
    return [eye[:1], eye[: n - 1], eye]


@dataclass(frozen=True)
class FiltrationTable:
    """F^r V_λ for r in [-λ1, λ1] with graded ranks α(r)."""

    lam: Partition
    n: int
    levels: dict
    alpha: dict
    graded: dict = field(repr=False)

    @property
    def lambda1(self) -> int:
        return self.lam.lambda1

    def is_symmetric(self) -> bool:
        return all(self.alpha[r] == self.alpha[-r] for r in self.alpha)

    def total(self) -> int:
        return sum(self.alpha.values())

    def as_rows(self) -> list:
        return [(r, self.alpha[r], self.levels[r].dim) for r in sorted(self.alpha)]


def _torus_weight(idx: int, n: int, d: int) -> int:
    """C*-weight of a monomial: #e_1 - #e_n among its letters."""
    w = 0
    for _ in range(d):
        idx, letter = divmod(idx, n)
        w += (letter == 0) - (letter == n - 1)
    return w


def _weight_spaces(S: SchurSpace) -> dict:
    """Exact weight-space decomposition of V_λ under the C* torus."""
    n, d = S.n, S.d
    comps = {}
    for row in S.basis.rows:
        split = {}
        for idx, v in row.items():
            split.setdefault(_torus_weight(idx, n, d), {})[idx] = v
        for w, vec in split.items():
            comps.setdefault(w, []).append(vec)
    return {w: subspace_from_vectors(vecs, S.basis.ncols) for w, vecs in comps.items()}


def _direct_sum(spaces, ncols: int) -> ExactSubspace:
    rows = [r for s in spaces for r in s.rows]
    if not rows:
        return ExactSubspace((), (), ncols)
    return subspace_from_vectors(rows, ncols)


def _require_split(S: SchurSpace) -> None:
    if S.space != SplitQuadraticSpace(S.n):
        raise ValueError("the J-filtration is computed on the split model of V(I)")


def filtration_table(S: SchurSpace, cross_check: bool = True) -> FiltrationTable:
    """The J-filtration of V_λ from torus weights, optionally cross-checked.

    With ``cross_check`` the flag-sum description is computed as well and
    an AssertionError is raised on any mismatch.
    """
    _require_split(S)
    lam1 = S.lam.lambda1
    ncols = S.basis.ncols
    spaces = _weight_spaces(S)
    levels, alpha, graded = {}, {}, {}
    for r in range(-lam1, lam1 + 1):
        graded[r] = spaces.get(-r, ExactSubspace((), (), ncols))
        alpha[r] = graded[r].dim
        levels[r] = _direct_sum([s for w, s in spaces.items() if w >= -r], ncols)
    if any(w > lam1 or w < -lam1 for w in spaces):
        raise AssertionError("torus weights outside [-λ1, λ1]")
    if cross_check:
        flagged = flag_sum_filtration(S)
        for r in range(-lam1, lam1 + 1):
            if flagged[r] != levels[r]:
                raise AssertionError(f"flag-sum and torus filtrations differ at r={r}")
        if flagged[-lam1 - 1].dim != 0:
            raise AssertionError("F^{-λ1-1} is not zero")
    return FiltrationTable(S.lam, S.n, levels, alpha, graded)


def _tensor_level_space(pieces, d: int, r: int, n: int) -> ExactSubspace:
    """F^r V^{⊗d} spanned by tensor products of flag-piece basis vectors."""
    ncols = n ** d
    sparse_pieces = {lvl: la.dense_to_sparse(b) for lvl, b in zip((-1, 0, 1), pieces)}
    vecs = {}
    for idx in product((-1, 0, 1), repeat=d):
        if sum(idx) != r:
            continue
        partial = [{0: Fraction(1)}]
        for lvl in idx:
            new = []
            for vec in partial:
                for b in sparse_pieces[lvl]:
                    prod_vec = {}
                    for i, x in vec.items():
                        for j, y in b.items():
                            prod_vec[i * n + j] = x * y
                    new.append(prod_vec)
            partial = new
        for vec in partial:
            key = tuple(sorted(vec.items()))
            vecs[key] = vec
    if not vecs:
        return ExactSubspace((), (), ncols)
    return subspace_from_vectors(list(vecs.values()), ncols)


def _intersect(S: SchurSpace, F: ExactSubspace) -> ExactSubspace:
    """V_λ ∩ F, solving c B ∈ F for coefficient vectors c."""
    ncols = S.basis.ncols
    if F.dim == 0 or S.dim == 0:
        return ExactSubspace((), (), ncols)
    # residual of each basis row of V_λ after reduction by F
    residual_rows = []
    for row in S.basis.rows:
        res = dict(row)
        for p, frow in zip(F.pivots, F.rows):
            c = res.get(p)
            if c:
                for j, v in frow.items():
                    nv = res.get(j, Fraction(0)) - c * v
                    if nv:
                        res[j] = nv
                    else:
                        res.pop(j, None)
        residual_rows.append(res)
    cols = sorted({j for r in residual_rows for j in r})
    colpos = {j: k for k, j in enumerate(cols)}
    # left kernel: c R = 0  <=>  R^T c^T = 0
    transposed = [dict() for _ in cols]
    for i, r in enumerate(residual_rows):
        for j, v in r.items():
            transposed[colpos[j]][i] = v
    kern = la.sparse_nullspace(transposed, S.dim) if cols else [
        {i: Fraction(1)} for i in range(S.dim)]
    vecs = []
    for c in kern:
        vec = {}
        for i, ci in c.items():
            for j, v in S.basis.rows[i].items():
                vec[j] = vec.get(j, Fraction(0)) + ci * v
        vecs.append({j: v for j, v in vec.items() if v})
    return subspace_from_vectors(vecs, ncols) if vecs else ExactSubspace((), (), ncols)


def flag_sum_filtration(S: SchurSpace) -> dict:
    """F^r V_λ for r in [-λ1-1, λ1] via sums of products of flag pieces."""
    _require_split(S)
    pieces = base_flag_filtration(S.n)
    lam1 = S.lam.lambda1
    out = {}
    for r in range(-lam1 - 1, lam1 + 1):
        if r < -S.d:
            out[r] = ExactSubspace((), (), S.basis.ncols)
            continue
        F = _tensor_level_space(pieces, S.d, min(r, S.d), S.n)
        out[r] = _intersect(S, F)
    return out


def u_invariants_equal_bottom(S: SchurSpace) -> dict:
    """Compare V_λ^U (U = unipotent radical for J/I) with F^{-λ1} exactly."""
    if S.lam.is_det:
        raise ValueError("λ = det is excluded")
    table = filtration_table(S, cross_check=False)
    gens = [act_on_schur(g, S) for g in unipotent_generators(S.space)]
    inv = invariant_subspace(gens, S.dim)
    B = S.basis.rows
    vecs = []
    for c in inv:
        vec = {}
        for i, ci in enumerate(c):
            if ci:
                for j, v in B[i].items():
                    vec[j] = vec.get(j, Fraction(0)) + ci * v
        vecs.append({j: v for j, v in vec.items() if v})
    ncols = S.basis.ncols
    U = subspace_from_vectors(vecs, ncols) if vecs else ExactSubspace((), (), ncols)
    bottom = table.levels[-S.lam.lambda1]
    return {
        "equal": U == bottom,
        "dim_invariants": U.dim,
        "dim_bottom": bottom.dim,
        "lambda": list(S.lam.parts),
        "n": S.n,
    }


def alpha_table(lam: Partition) -> dict:
    """α(r) for r in [-λ1, λ1] (exact computation on the split model)."""
    S = schur_space(SplitQuadraticSpace(lam.n), lam)
    return dict(filtration_table(S, cross_check=False).alpha)


def jacobi_decomposition(lam: Partition, k: int) -> dict:
    """Target shape of J_{λ,k,m} ↪ ⊕_r J_{k-r,m}^{⊕α(r)}.

    Returns the list of (weight k - r, multiplicity α(r)) and whether the
    whole space is forced to vanish, which happens when k + λ1 < n/2 - 1.
    """
    if lam.is_det:
        raise ValueError("λ = det is excluded")
    alpha = alpha_table(lam)
    terms = [(k - r, alpha[r]) for r in sorted(alpha)]
    vanishes = Fraction(k + lam.lambda1) < Fraction(lam.n, 2) - 1
    return {"terms": terms, "vanishes": vanishes, "lambda": list(lam.parts), "n": lam.n, "k": k}
