import pytest

from qtorus.cartan import cartan_from_type, make_config
from qtorus.errors import NegativeL
from qtorus.generators import MUTATIONS, build, constant_term, extract_modes, zero_mode_generators
from qtorus.series import DeltaSeries, expand


@pytest.fixture(scope="module")
def a1():
    return cartan_from_type("A", 1)


def test_yangian_a1(a1):
    g = build(a1, make_config(a1, "yangian", [1]))
    K = g.field
    u, h, gm = K.gen("u"), K.gen("h"), K.gen("g_1_1")
    n1, n2 = K.gen("nu_1_1"), K.gen("nu_1_2")
    assert g.H(0, "u") == g.alg.scalar((u - n1) * (u - n2) / ((u - gm) * (u - gm - h)))
    assert g.E(0, "u") == g.alg.shift("beta_1_1", -1, 1 / (u - gm))
    assert g.F(0, "u") == g.alg.shift("beta_1_1", 1, -(gm + h - n1) * (gm + h - n2) / (u - gm - h))


def test_yangian_a2_cross_factor():
    c = cartan_from_type("A", 2)
    g = build(c, make_config(c, "yangian", [1, 1]))
    K = g.field
    u, h = K.gen("u"), K.gen("h")
    num = g.H(0, "u").scalar_part().num
    cross = (u - K.gen("g_2_1") - h / 2).num
    _, rem = divmod(num, cross)
    assert rem == 0


def test_yangian_h_leading_term(a1):
    for m in (1, 2):
        g = build(a1, make_config(a1, "yangian", [m]))
        H = g.H(0, "t").scalar_part()
        assert expand(H, "t", "+", 0, 0)[0] == g.field.one


def test_yangian_modes(a1):
    g = build(a1, make_config(a1, "yangian", [1]))
    gm = g.field.gen("g_1_1")
    for n in range(4):
        assert extract_modes(g, "E", 0, n) == g.alg.shift("beta_1_1", -1, gm**n)


def test_qaffine_a1(a1):
    g = build(a1, make_config(a1, "qaffine", [1]))
    K = g.field
    z, lam, v = K.gen("z"), K.gen("lam"), K.gen("v_1_1")
    w1, w2 = K.gen("w_1_1"), K.gen("w_1_2")
    q = lam**2
    assert g.constant(0) == q
    want = q * v**2 * (z / w1 - w1) * (z / w2 - w2) / ((z - v**2) * (z - q**2 * v**2))
    assert g.K(0, "z").scalar_part() == want
    E = g.E(0, "z")
    assert isinstance(E, DeltaSeries)
    (term,) = E.items()
    assert term.supports == (("z", v**2),)
    R = (v**2 / w1 - w1) * (v**2 / w2 - w2)
    assert term.coeff == g.alg.shift("u_1_1", -1, q / (q - 1 / q) / v * R)


def test_constant_term_formula(a1):
    g = build(a1, make_config(a1, "qaffine", [1]))
    got, want = constant_term(g, 0)
    K = g.field
    assert got == want == K.gen("lam") ** 2 * K.gen("v_1_1") ** 2 / (K.gen("w_1_1") * K.gen("w_1_2"))


def test_uqg_a1_kbeta(a1):
    g = build(a1, make_config(a1, "uqg", [1], lattice="adjoint"))
    assert g.Kbeta(0) * g.Kbeta_inv(0) == g.alg.one()
    K = g.field
    # w-power d = det a = 2 and K_beta = K_1 = c * w^-2 * v^2 in this convention
    assert g.K(0) == g.alg.scalar(K.gen("lam") ** 2 * K.gen("v_1_1") ** 2 / (K.gen("w_1_1") ** 2 * K.gen("w_1_2") ** 2))
    assert len(g.E(0).terms) == 1 and len(g.F(0).terms) == 1


def test_zero_modes_are_uqg(a1):
    g = build(a1, make_config(a1, "qaffine", [1]))
    z = zero_mode_generators(g)
    assert z.family == "uqg"
    assert z.E(0) == extract_modes(g, "E", 0, 0)


def test_negative_l_rejected():
    c = cartan_from_type("A", 2)
    with pytest.raises(NegativeL):
        build(c, make_config(c, "yangian", [1, 3]))


def test_mutation_names(a1):
    cfg = make_config(a1, "uqg", [1], lattice="adjoint")
    clean = build(a1, cfg)
    for mu in MUTATIONS:
        bad = build(a1, cfg, mutation=mu)
        pairs = [(bad.E(0), clean.E(0)), (bad.F(0), clean.F(0)), (bad.K(0), clean.K(0))]
        assert any(x.to_json() != y.to_json() for x, y in pairs)
    with pytest.raises(ValueError):
        build(a1, cfg, mutation="nonsense")


def test_env_mutation_hook(a1, monkeypatch):
    cfg = make_config(a1, "uqg", [1], lattice="adjoint")
    monkeypatch.setenv("QTORUS_INJECT_MUTATION", "scale-E")
    assert build(a1, cfg).mutation == "scale-E"
