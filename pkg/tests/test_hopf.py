import pytest

from homexp.eml import ambient_algebra, parse_space
from homexp.hopf import (
    AlgebraGenerator,
    HopfStructure,
    ResourceError,
    TruncatedAlgebra,
    decomposables,
    frobenius_image,
    indecomposables,
    milnor_moore_check,
    primitives,
)


def poly(*gens, D=16):
    return TruncatedAlgebra.polynomial(gens, D)


def test_one_generator():
    A = poly(("x", 2))
    H = HopfStructure(A)
    assert indecomposables(A, 2).dimension == 1
    assert indecomposables(A, 4).dimension == 0
    # primitives of F2[x] are the powers x^(2^k)
    assert [primitives(H, a).dimension for a in range(17)] == [0, 0, 1, 0, 1, 0, 0, 0, 1] + [0] * 7 + [1]


def test_exterior_generator():
    A = poly(("e", 1, True), ("x", 2), D=6)
    assert A.dimensions() == [1, 1, 1, 1, 1, 1, 1]
    e = A.generator_vector(A.generator_index("e"))
    assert A.mul(1, e, 1, e) == 0


def test_multiplication_and_powers():
    A = poly(("x", 1), ("y", 2), D=8)
    x = A.parse_element("x")[1]
    y = A.parse_element("y")[1]
    assert A.format(3, A.mul(1, x, 2, y)) == "x*y"
    assert A.format(8, A.power(2, y, 4)) == "y^4"
    assert A.frobenius(3, A.parse_element("x^3 + x*y")[1]) == A.parse_element("x^6 + x^2*y^2")[1]
    assert A.is_square((2, 2)) and not A.is_square((1, 2))
    with pytest.raises(ValueError):
        A.mul(4, A.power(1, x, 4), 5, A.power(1, x, 5))


def test_validation():
    with pytest.raises(ValueError):
        TruncatedAlgebra([AlgebraGenerator("x", 0)], 4)
    with pytest.raises(ValueError):
        TruncatedAlgebra([AlgebraGenerator("x", 1), AlgebraGenerator("x", 2)], 4)
    with pytest.raises(ResourceError):
        TruncatedAlgebra([AlgebraGenerator(f"g{i}", 1) for i in range(6)], 12, monomial_cap=100)


@pytest.mark.parametrize("space", ["K(Z/2,2)", "K(Z/2,3)", "K(Z,3)", "K(Z/4,2) x K(Z,1)"])
def test_coassociativity(space):
    A = ambient_algebra(parse_space(space), 12)
    H = HopfStructure(A)
    for a in range(13):
        for mono in A.basis(a):
            assert H.coassociativity_holds(mono)


@pytest.mark.parametrize("space", ["K(Z/2,2)", "K(Z/2,3)", "K(Z,3)"])
def test_milnor_moore_through_16(space):
    H = HopfStructure(ambient_algebra(parse_space(space), 16))
    for a in range(1, 17):
        res = milnor_moore_check(H, a)
        assert res.exact, (a, res.witness)


def test_primitives_are_generator_powers():
    # for a primitively generated polynomial algebra, P is spanned by g^(2^k)
    A = ambient_algebra(parse_space("K(Z/2,3)"), 24)
    H = HopfStructure(A)
    for a in range(1, 25):
        expected = 0
        for g in A.generators:
            d = g.degree
            while d < a:
                d *= 2
            expected += d == a
        assert primitives(H, a).dimension == expected


def test_indecomposables_count_generators():
    A = ambient_algebra(parse_space("K(Z/2,2) x K(Z,3)"), 20)
    for a in range(1, 21):
        assert indecomposables(A, a).dimension == sum(g.degree == a for g in A.generators)
        assert len(decomposables(A, a)) + indecomposables(A, a).dimension >= A.dim(a) - 1


def test_frobenius_image_only_even():
    A = ambient_algebra(parse_space("K(Z/2,2)"), 12)
    assert frobenius_image(A, 7) == []
    assert len(frobenius_image(A, 6)) == A.dim(3)


@pytest.mark.parametrize("a", [15, 23, 27, 29, 31])
def test_gap_vanishing_k_z2_3(a):
    A = ambient_algebra(parse_space("K(Z/2,3)"), 33)
    H = HopfStructure(A)
    assert primitives(H, a).dimension == 0
    assert indecomposables(A, a).dimension == 0
