from fractions import Fraction

import pytest

from qtorus.cartan import cartan_from_matrix, cartan_from_type, derive_l, lattice_from_choice, make_config
from qtorus.errors import LatticeOutOfRange, NegativeL, NotCartan, UnknownType


def test_type_a2():
    c = cartan_from_type("A", 2)
    assert [list(r) for r in c.a] == [[2, -1], [-1, 2]]
    assert c.d == (1, 1)


@pytest.mark.parametrize("series,rank,prod", [("B", 2, 2), ("C", 2, 2), ("G", 2, 3)])
def test_rank_two_products(series, rank, prod):
    c = cartan_from_type(series, rank)
    assert c.a[0][1] * c.a[1][0] == prod
    for i in range(2):
        for j in range(2):
            assert c.d[i] * c.a[i][j] == c.d[j] * c.a[j][i]


def test_g2_symmetrizer():
    assert cartan_from_type("G", 2).d == (1, 3)


@pytest.mark.parametrize("series,rank", [("A", 4), ("B", 3), ("C", 3), ("D", 4), ("E", 6), ("E", 7), ("E", 8), ("F", 4)])
def test_series_symmetrizable(series, rank):
    c = cartan_from_type(series, rank)
    n = c.rank
    assert n == rank
    assert all(c.d[i] * c.a[i][j] == c.d[j] * c.a[j][i] for i in range(n) for j in range(n))
    assert c.det() > 0


def test_from_matrix():
    assert cartan_from_matrix([[2, -1], [-1, 2]]).d == (1, 1)
    assert cartan_from_matrix([[2, -3], [-1, 2]]).d == (1, 3)
    with pytest.raises(NotCartan):
        cartan_from_matrix([[2, 0], [-1, 2]])


@pytest.mark.parametrize("series,rank", [("A", 0), ("D", 2), ("E", 5), ("H", 2)])
def test_unknown_type(series, rank):
    with pytest.raises(UnknownType):
        cartan_from_type(series, rank)


def test_derive_l():
    assert derive_l(cartan_from_type("A", 2), [1, 1]) == (1, 1)
    assert derive_l(cartan_from_type("A", 1), [1]) == (2,)
    with pytest.raises(NegativeL):
        derive_l(cartan_from_type("A", 2), [1, 3])


def test_lattices():
    a1 = cartan_from_type("A", 1)
    adj = lattice_from_choice(a1, "adjoint")
    assert adj.m == ((1,),) and adj.detA == 2
    sc = lattice_from_choice(a1, "simply-connected")
    assert sc.m == ((2,),) and sc.mInv == ((Fraction(1, 2),),)
    assert lattice_from_choice(cartan_from_type("A", 2), "adjoint").detA == 3
    with pytest.raises(LatticeOutOfRange):
        lattice_from_choice(a1, [[3]])


def test_rsplit_config():
    a1 = cartan_from_type("A", 1)
    cfg = make_config(a1, "qaffine", [1], rsplit=[[1]])
    assert cfg.plus_factors(0) == (1,) and cfg.minus_factors(0) == (2,)
    assert make_config(a1, "qaffine", [1]).plus_factors(0) == (1, 2)
