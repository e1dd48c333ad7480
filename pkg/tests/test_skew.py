import pytest

from qtorus.errors import MixedInstance, SubstitutionIntoShiftedSymbol
from qtorus.scalars import Field, Symbol
from qtorus.skew import ShiftGen, SkewAlgebra, anticommutator, commutator


@pytest.fixture(scope="module")
def torus():
    K = Field([Symbol("lam", "lambda"), Symbol("v_1_1", "v", (1, 1)), Symbol("v_2_1", "v", (2, 1)), Symbol("z", "spectral")])
    return SkewAlgebra(K, "multiplicative", [ShiftGen("u_1_1", "v_1_1", 2), ShiftGen("u_2_1", "v_2_1", 2)])


@pytest.fixture(scope="module")
def additive():
    K = Field([Symbol("h", "hbar"), Symbol("g_1_1", "gamma", (1, 1)), Symbol("g_1_2", "gamma", (1, 2)), Symbol("u", "spectral"), Symbol("nu", "nu")])
    return SkewAlgebra(K, "additive", [ShiftGen("beta_1_1", "g_1_1", K.gen("h")), ShiftGen("beta_1_2", "g_1_2", K.gen("h"))])


def test_torus_commutation(torus):
    u, v = torus.shift("u_1_1"), torus.scalar("v_1_1")
    q = torus.field.gen("lam") ** 2
    assert u * v == q * v * u
    assert torus.shift("u_1_1") * torus.scalar("v_2_1") == torus.scalar("v_2_1") * torus.shift("u_1_1")


def test_additive_shift(additive):
    b, g = additive.shift("beta_1_1"), additive.scalar("g_1_1")
    h = additive.field.gen("h")
    assert b * g == (g + h) * b
    assert commutator(b, g) == h * b
    assert commutator(additive.scalar("g_1_1"), additive.scalar("g_1_2")).is_zero()


def test_linear(additive):
    b = additive.shift("beta_1_1")
    assert b + 0 == b
    assert (b - b).is_zero()
    x = additive.scalar("g_1_1") * b + b**2
    assert anticommutator(x, x) == 2 * x * x


def test_inverse_monomial(torus):
    x = torus.scalar(torus.field.gen("z") - torus.field.gen("v_1_1")) * torus.shift("u_1_1", 2)
    assert x.inverse_monomial() * x == torus.one()


def test_associativity(torus):
    K = torus.field
    z, v, w = K.gen("z"), K.gen("v_1_1"), K.gen("v_2_1")
    x = torus.shift("u_1_1", 1, 1 / (z - v)) + torus.shift("u_2_1", -1, w)
    y = torus.shift("u_1_1", -2, v**2) + torus.scalar(z)
    t = torus.shift("u_2_1", 1, 1 / (v - w)) * torus.shift("u_1_1", 1)
    assert (x * y) * t == x * (y * t)


def test_substitution(additive):
    K = additive.field
    x = additive.scalar(1 / (K.gen("u") - K.gen("g_1_1"))) * additive.shift("beta_1_1")
    assert x.substitute_central("u", K.gen("nu")) == additive.scalar(1 / (K.gen("nu") - K.gen("g_1_1"))) * additive.shift("beta_1_1")
    with pytest.raises(SubstitutionIntoShiftedSymbol):
        x.substitute_central("g_1_1", K.gen("nu"))


def test_mixed(torus, additive):
    with pytest.raises(MixedInstance):
        torus.one() + additive.one()


def test_numeric_lambda_matches_symbolic(torus):
    from fractions import Fraction

    from qtorus.skew import SkewAlgebra as A

    num = A(torus.field, "multiplicative", torus.gens, lam_value=Fraction(3, 2))
    f = 1 / (torus.field.gen("v_1_1") - torus.field.gen("z"))
    sym = torus.action.act(f, (1, 0)).specialize({"lam": Fraction(3, 2)})
    assert num.action.act(f.specialize({"lam": Fraction(3, 2)}), (1, 0)) == sym
