from fractions import Fraction as F

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from orthmf.domain import act, factor_Elk, random_tube_point, stabilizer_element, tube_point
from orthmf.errors import NotAGroup, NotLatticePreserving
from orthmf.fourier import (Cyclotomic, CuspStabilizer, coefficient_space, cone_position,
                            evaluate, expansion_from_json, expansion_to_json,
                            fourier_expansion, rebase, symmetrize, symmetry_defect, unit,
                            validate)
from orthmf.schur import partition

ID = CuspStabilizer.make(np.eye(3, dtype=int))
FLIP = CuspStabilizer.make([[1, 0, 0], [0, -1, 0], [0, 0, 1]])
SWAP = CuspStabilizer.make([[0, 0, 1], [0, 1, 0], [1, 0, 0]])
GROUP = [ID, FLIP, SWAP, FLIP.compose(SWAP)]
INDICES = [(1, 1, 1), (2, 1, 1), (1, 0, 3), (2, 2, 3)]


def _random_expansion(flag, parts, k, rng):
    lam = partition(parts, flag.n)
    S = coefficient_space(flag, lam)
    coeffs = {l: [F(int(x)) for x in rng.integers(-3, 4, S.dim)] for l in INDICES}
    return fourier_expansion(flag, lam, k, coeffs), S


@pytest.mark.parametrize("parts,k", [((1,), 4), ((2,), 3), ((2, 1), 5), ((), 4), ((1, 1), 6)])
def test_symmetrize_then_modular(flag_a1, rng, parts, k):
    e, S = _random_expansion(flag_a1, parts, k, rng)
    s = symmetrize(e, GROUP)
    assert all(symmetry_defect(s, g) == 0.0 for g in GROUP)
    assert validate(s).ok
    for _ in range(3):
        Z = random_tube_point(flag_a1, rng, scale=0.2)
        for g in GROUP:
            M = stabilizer_element(flag_a1, g.matrix, g.eps)
            lhs = evaluate(s, act(M, Z))
            rhs = factor_Elk(M, Z, S, k) @ evaluate(s, Z)
            assert np.abs(lhs - rhs).max() <= 1e-8 * max(np.abs(rhs).max(), 1e-300)


def test_unsymmetrized_has_defect(flag_a1, rng):
    e, _ = _random_expansion(flag_a1, (1,), 4, rng)
    assert symmetry_defect(e, SWAP) > 0


def test_translation_group_uses_roots_of_unity(flag_a1, rng):
    gt = CuspStabilizer.make(np.eye(3, dtype=int), 1, [F(1, 3), 0, 0])
    G3 = [ID, gt, gt.compose(gt)]
    lam = partition((1,), 3)
    e = fourier_expansion(flag_a1, lam, 2, {(1, 1, 1): [1, 0, 0], (0, 1, 1): [0, 1, 2]})
    s = symmetrize(e, G3)
    # the index with a nontrivial character is averaged away
    assert s.support == [(0, 1, 1)]
    assert all(symmetry_defect(s, g) == 0.0 for g in G3)
    Z = random_tube_point(flag_a1, rng, scale=0.2)
    M = stabilizer_element(flag_a1, gt.matrix, 1, [F(1, 3), 0, 0])
    S = coefficient_space(flag_a1, lam)
    assert np.allclose(evaluate(s, act(M, Z)), factor_Elk(M, Z, S, 2) @ evaluate(s, Z),
                       rtol=1e-9, atol=1e-14)


def test_group_checks(flag_a1):
    e = fourier_expansion(flag_a1, partition((1,), 3), 2, {(1, 1, 1): [1, 0, 0]})
    with pytest.raises(NotAGroup):
        symmetrize(e, [ID, FLIP, SWAP])
    with pytest.raises(NotAGroup):
        symmetrize(e, [])
    with pytest.raises(NotLatticePreserving):
        symmetry_defect(e, CuspStabilizer.make(-np.eye(3, dtype=int)))
    with pytest.raises(NotLatticePreserving):
        symmetry_defect(e, CuspStabilizer.make([[1, 0, 0], [0, 1, 0], [0, 0, 2]]))


def test_validation_classes(flag_a1):
    lam = partition((1,), 3)
    lint = validate(fourier_expansion(flag_a1, lam, 2, {(0, 0, 0): [1, 0, 0]}))
    assert lint.ok and lint.lints
    scalar = validate(fourier_expansion(flag_a1, partition((), 3), 2, {(0, 0, 0): [1]}))
    assert not scalar.lints
    bad = validate(fourier_expansion(flag_a1, lam, 2, {(0, 0, -1): [1, 0, 0]}))
    assert not bad.ok and not bad.holomorphic
    cusp = fourier_expansion(flag_a1, lam, 2, {(1, 0, 0): [1, 0, 0]}, cusp=True)
    assert cone_position(flag_a1, (1, 0, 0)) == "boundary_ray"
    assert not validate(cusp).ok
    frac = fourier_expansion(flag_a1, lam, 2, {(F(1, 2), 1, 1): [1, 0, 0]})
    assert frac.denominator == 2 and validate(frac).ok and not validate(frac).integral


def test_constructor_normalizes(flag_a1):
    lam = partition((1,), 3)
    e = fourier_expansion(flag_a1, lam, 2, [((1, 1, 1), [1, 0, 0]), ((1, 1, 1), [-1, 0, 0]),
                                            ((2, 1, 1), [0, 1, 0])])
    assert e.support == [(2, 1, 1)]
    with pytest.raises(ValueError):
        fourier_expansion(flag_a1, lam, 2, {(1, 1, 1): [1, 0]})
    with pytest.raises(ValueError):
        fourier_expansion(flag_a1, lam, 2, {(F(1, 3), 1, 1): [1, 0, 0]}, denominator=2)


def test_rebase_is_a_shift(flag_a1, rng):
    lam = partition((1,), 3)
    e = fourier_expansion(flag_a1, lam, 2, {(1, 1, 1): [1, 0, 0], (3, 1, 1): [0, 1, 2]})
    v0 = [F(1, 5), F(1, 7), 0]
    r = rebase(e, v0)
    Z = random_tube_point(flag_a1, rng, scale=0.2)
    Zs = tube_point(flag_a1, Z.tau, np.array(Z.z) + 1 / 7, Z.w + 1 / 5)
    assert np.allclose(evaluate(r, Z), evaluate(e, Zs), rtol=1e-10, atol=1e-14)
    assert expansion_from_json(expansion_to_json(r)) == r


def test_json_round_trip(flag_a2, rng):
    lam = partition((2,), 4)
    S = coefficient_space(flag_a2, lam)
    coeffs = {(1, 0, 0, 1): [F(int(x), 3) for x in rng.integers(-3, 4, S.dim)]}
    e = fourier_expansion(flag_a2, lam, 3, coeffs)
    assert expansion_from_json(expansion_to_json(e)) == e


@settings(max_examples=40, deadline=None)
@given(st.integers(-12, 12), st.integers(1, 12), st.integers(-12, 12), st.integers(1, 12))
def test_cyclotomic_matches_complex(a, b, c, d):
    x, y = unit(F(a, b)), unit(F(c, d))
    z = complex(x) * complex(y)
    assert abs(complex(x * y) - z) < 1e-12
    assert abs(complex(x + y) - (complex(x) + complex(y))) < 1e-12
    assert abs(complex(x - x)) == 0
    assert x * unit(F(-a, b)) == 1


def test_cyclotomic_collapses_to_rationals():
    assert unit(F(1, 2)) == -1
    assert unit(F(3)) == 1
    w = Cyclotomic.root(F(1, 3))
    assert w + w * w == -1
    i = Cyclotomic.root(F(1, 4))
    assert i * i == -1
