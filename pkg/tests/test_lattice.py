from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from orthmf import _linalg as la
from orthmf.errors import (DependentRows, NoIsotropicVectorFound, NotIsotropic,
                           NotOrthogonal, WittRankOne)
from orthmf.lattice import (block_gram, eichler_transvection, find_isotropic_flag,
                            flag_from_json, flag_from_vectors, flag_to_json,
                            hyperbolic_plane, inertia, integral_unipotent_lattice,
                            lattice_from_json, lattice_to_json, new_lattice,
                            orthogonal_complement, saturate, sublattice)

U = hyperbolic_plane()
L5 = new_lattice(block_gram(U, U, [[-2]]))
small = st.integers(-3, 3)


def _perp_vector(L, l, coeffs):
    """A rational vector orthogonal to l built from integer coefficients."""
    v = la.qarray(coeffs)
    lG = la.qarray(l).dot(L.G)
    j = next(i for i, x in enumerate(lG) if x)
    v[j] -= v.dot(lG) / lG[j]
    return v


def test_inertia_of_standard_blocks():
    assert inertia(block_gram(U, U, [[-2]])) == (2, 3, 0)
    assert inertia([[0, 0], [0, 1]]) == (1, 0, 1)
    assert inertia([[-2, 1], [1, -2]]) == (0, 2, 0)


def test_lattice_signature_and_json():
    assert L5.signature == (2, 3)
    assert lattice_from_json(lattice_to_json(L5)) == L5


def test_degenerate_gram_is_rejected():
    with pytest.raises(Exception):
        new_lattice([[0, 0], [0, 1]])


@settings(max_examples=40, deadline=None)
@given(st.lists(small, min_size=5, max_size=5), st.sampled_from([0, 1, 2, 3]))
def test_eichler_preserves_gram(coeffs, which):
    iso = [(1, 0, 0, 0, 0), (0, 1, 0, 0, 0), (0, 0, 1, 0, 0), (0, 0, 0, 1, 0)][which]
    m = _perp_vector(L5, iso, coeffs)
    E = eichler_transvection(L5, m, iso)
    assert np.array_equal(E.T.dot(L5.G).dot(E), L5.G)


@settings(max_examples=30, deadline=None)
@given(st.lists(small, min_size=5, max_size=5), st.lists(small, min_size=5, max_size=5))
def test_eichler_additive_in_m(c1, c2):
    l = (0, 0, 0, 1, 0)
    m1, m2 = _perp_vector(L5, l, c1), _perp_vector(L5, l, c2)
    lhs = eichler_transvection(L5, m1, l).dot(eichler_transvection(L5, m2, l))
    assert np.array_equal(lhs, eichler_transvection(L5, m1 + m2, l))


def test_eichler_rejects_bad_input():
    with pytest.raises(NotIsotropic):
        eichler_transvection(L5, [0, 0, 0, 0, 1], [1, 1, 0, 0, 0])
    with pytest.raises(NotOrthogonal):
        eichler_transvection(L5, [1, 0, 0, 0, 0], [0, 1, 0, 0, 0])


@pytest.mark.parametrize("blocks", [
    [[[-2]]], [[[-2, 1], [1, -2]]], [[[-2]], [[-2]]],
    [[[-2, 1, 0], [1, -2, 1], [0, 1, -2]]],
])
def test_flags_found_and_valid(blocks):
    L = new_lattice(block_gram(U, U, *blocks))
    flag = find_isotropic_flag(L, 10)
    flag.validate()
    assert flag.has_j
    assert flag.vi_gram.shape == (L.rank - 2, L.rank - 2)
    # V(I) form: (e2, f2) hyperbolic pair around a negative definite block
    Q = flag.vi_gram
    assert Q[0, -1] == 1 and Q[0, 0] == 0 and Q[-1, -1] == 0
    assert inertia(flag.vj_gram)[0] == 0


def test_flag_is_deterministic():
    a = find_isotropic_flag(L5)
    b = find_isotropic_flag(new_lattice(block_gram(U, U, [[-2]])))
    assert a.e1 == b.e1 and a.e2 == b.e2 and a.f1 == b.f1


def test_witt_index_one_and_anisotropic():
    L = new_lattice(block_gram(U, [[2]], [[-6]], [[-6]]))
    with pytest.raises(WittRankOne):
        find_isotropic_flag(L, 3)
    with pytest.raises(WittRankOne):
        find_isotropic_flag(new_lattice(block_gram(U, [[-2]], [[-2]])), 10)
    flag = find_isotropic_flag(L, 3, require_j=False)
    assert not flag.has_j and flag.n == 3
    flag.validate()
    with pytest.raises(NoIsotropicVectorFound):
        find_isotropic_flag(new_lattice([[1, 0, 0], [0, -3, 0], [0, 0, -3]]), 4)


def test_flag_from_vectors_checks():
    with pytest.raises(NotIsotropic):
        flag_from_vectors(L5, [1, 1, 0, 0, 0])
    with pytest.raises(NotIsotropic):
        flag_from_vectors(L5, [2, 0, 0, 0, 0])
    with pytest.raises(NotIsotropic):
        flag_from_vectors(L5, [1, 0, 0, 0, 0], [0, 1, 0, 0, 0])


def test_flag_json_round_trip(flag_a2):
    again = flag_from_json(flag_to_json(flag_a2))
    assert again.e1 == flag_a2.e1 and again.e2 == flag_a2.e2
    assert np.array_equal(again.frame, flag_a2.frame)


def test_sublattice_saturation_and_complement():
    with pytest.raises(DependentRows):
        sublattice(L5, [[1, 0, 0, 0, 0], [2, 0, 0, 0, 0]])
    S = sublattice(L5, [[2, 0, 0, 0, 0], [0, 0, 0, 0, 1]])
    assert not S.is_primitive
    assert saturate(S).is_primitive
    K = orthogonal_complement(sublattice(L5, [[0, 0, 0, 0, 1]]))
    assert K.rank == 4
    assert np.array_equal(la.qarray(K.basis).dot(L5.G).dot(la.qarray([0, 0, 0, 0, 1])), la.qzeros(4))


def test_unipotent_lattice_unimodular(flag_a1):
    B = integral_unipotent_lattice(flag_a1)
    assert abs(la.det(B)) == 1


def test_unipotent_lattice_rank_for_2U():
    flag = find_isotropic_flag(new_lattice(block_gram(U, U)))
    B = integral_unipotent_lattice(flag)
    assert B.shape == (2, 2) and abs(la.det(B)) == 1


def test_unipotent_lattice_is_integral(flag_u2):
    """Every basis vector gives an integral Eichler transvection, and half of it does not."""
    flag = flag_u2
    B = integral_unipotent_lattice(flag)
    for x in B:
        m = x.dot(flag.vi_basis)
        E = eichler_transvection(flag.ambient, m, flag.e1)
        assert all(Fraction(v).denominator == 1 for v in E.flat)
        E_half = eichler_transvection(flag.ambient, m / 2, flag.e1)
        assert any(Fraction(v).denominator != 1 for v in E_half.flat)
