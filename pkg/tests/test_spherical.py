import pytest

from qspherical.cartan import satake
from qspherical.exactq import ONE, ZERO, qpow, quantum_int
from qspherical.linalg import vadd, vscale
from qspherical.qsp import CoidealAction, default_parameters, shift_of_basepoint
from qspherical.spherical import (
    Projection, a_form_image_check, bottom_vector, branching_table, certificates_markdown, certify,
    character_chi, check_spherical, crystal_grid, crystal_limit_check, dual_integral_certify, integral_certify,
    observed_crystal_condition, predicted_multiplicity, solve_spherical, stated_crystal_condition, tensor_spherical,
)
from qspherical.umod import build_simple

AI = satake("A1")
AIV2 = satake("A2", [], "(1 2)")
AIV3 = satake("A3", [2], "(1 3)")


def solve(sd, lam, n, l):
    a = CoidealAction(build_simple(sd.cartan, lam), sd, default_parameters(sd, n))
    return a, solve_spherical(a, character_chi(sd, a.params, l))


def lowest(M, word):
    v = M.top()
    for i in word:
        v = M.f(i, v)
    return v


# -- characters ------------------------------------------------------------------

def test_character_values():
    p = default_parameters(AI, 0)
    assert character_chi(AI, p, 0).b[0] == ZERO
    for n in range(-3, 4):
        for l in range(-3, 4):
            assert character_chi(AI, default_parameters(AI, n), l).b[0] == quantum_int(l - n)
    chi = character_chi(AIV2, default_parameters(AIV2, 1), 2)
    assert chi.k_value((1, -1)) == qpow(2)
    assert all(b == ZERO for b in chi.b.values())


# -- rank-one vectors ---------------------------------------------------------------

@pytest.mark.parametrize("n", range(-3, 5))
def test_ai_l1_vectors(n):
    _, s = solve(AI, (1,), n, 1)
    assert s.multiplicity == 1 and s.vectors[0] == {0: ONE, 1: qpow(-n)}
    _, s = solve(AI, (1,), n, -1)
    assert s.multiplicity == 1 and s.vectors[0] == {0: ONE, 1: -qpow(n)}


@pytest.mark.parametrize("m", range(0, 5))
@pytest.mark.parametrize("n", [-1, 0, 2])
def test_ai_branching_rule(m, n):
    for l in range(-5, 6):
        _, s = solve(AI, (m,), n, l)
        assert s.multiplicity == int(abs(l) <= m and (l - m) % 2 == 0)


@pytest.mark.parametrize("sd,word_pos,word_neg", [(AIV2, (0, 1), (1, 0)), (AIV3, (0, 1, 2), (2, 1, 0))])
@pytest.mark.parametrize("n", [-1, 0, 2])
def test_aiv_degree_one_vectors(sd, word_pos, word_neg, n):
    p = default_parameters(sd, n)
    node, other = sd.hermitian.node, sd.tau[sd.hermitian.node]
    for l, word, c in ((1, word_pos, p.c[node]), (-1, word_neg, p.c[other])):
        bv = bottom_vector(sd, n, l)
        M = bv.module
        assert bv.f == vadd(M.top(), vscale(-ONE / c, lowest(M, word)))


def test_aiv_branching_examples():
    p = default_parameters(AIV3, 1)
    cells = {(c.lam, c.l): c for c in branching_table(AIV3, p, [(1, 0, 0), (0, 0, 1), (0, 0, 0)], [-1, 0, 1])}
    assert cells[((1, 0, 0), 1)].multiplicity == 1
    assert cells[((1, 0, 0), -1)].multiplicity == 0
    assert cells[((0, 0, 1), -1)].multiplicity == 1
    assert cells[((0, 0, 0), 0)].multiplicity == 1
    assert all(c.ok for c in cells.values())


def test_branching_skips_over_cap():
    cells = branching_table(AIV2, default_parameters(AIV2, 0), [(9, 9)], [0], dim_cap=50)
    assert cells[0].skipped and cells[0].multiplicity is None


def test_predicted_multiplicity():
    assert predicted_multiplicity(AI, (3,), 1) == 1
    assert predicted_multiplicity(AI, (3,), 2) == 0
    assert predicted_multiplicity(AIV3, (1, 0, 2), -1) == 1
    for lam, l in [((1, 0, 2), -1), ((1, 0, 2), 1), ((2, 0, 1), 1), ((0, 1, 0), 0)]:
        assert solve(AIV3, lam, 0, l)[1].multiplicity == predicted_multiplicity(AIV3, lam, l)


# -- tensor route ---------------------------------------------------------------------

@pytest.mark.parametrize("sd,n", [(AI, 2), (AI, -1), (AIV2, 1), (AIV3, 0)])
def test_tensor_spherical(sd, n):
    p = default_parameters(sd, n)
    a, s = solve(sd, sd.mu(1), n, 1)
    chi = character_chi(sd, p, 1)
    sp = shift_of_basepoint(sd, p, chi)
    b = CoidealAction(build_simple(sd.cartan, sd.mu(1)), sd, sp)
    eta = character_chi(sd, default_parameters(sd, n - 1), 1)
    (w,) = solve_spherical(b, eta).vectors
    T, x, comp = tensor_spherical(sd, p, a.M, s.vectors[0], chi, b.M, w, eta)
    assert check_spherical(CoidealAction(T, sd, p), comp, x)
    assert comp.b == character_chi(sd, p, 2).b


@pytest.mark.parametrize("sd", [AI, AIV2, AIV3])
@pytest.mark.parametrize("n,l", [(2, 2), (0, -2), (1, 3), (3, -3)])
def test_bottom_vector_routes_agree(sd, n, l):
    bv = bottom_vector(sd, n, l)
    assert bv.scalar == ONE
    assert bv.chain == [n - (1 if l > 0 else -1) * k for k in range(abs(l))]


def test_bottom_vector_trivial():
    bv = bottom_vector(AI, 3, 0)
    assert bv.module.dim == 1 and bv.f == {0: ONE}


# -- crystal limits ---------------------------------------------------------------------

@pytest.mark.parametrize("l,n,expected", [(1, 2, True), (1, 0, False), (-1, -1, True), (-1, 0, False)])
def test_crystal_limit_examples(l, n, expected):
    bv = bottom_vector(AI, n, l)
    assert crystal_limit_check(bv.module, bv.f).passed is expected


def test_crystal_grid_degree_one_matches_stated():
    for sd in (AI, AIV2, AIV3):
        assert all(c.agrees for c in crystal_grid(sd, range(-3, 5), [-1, 1]))


def test_crystal_grid_degree_two_follows_tensor_chain():
    # reductions follow the chain f_{e,n}, f_{e,n-e}, ...
    for sd in (AI, AIV2):
        m = 2 if sd is AIV2 else 0
        for c in crystal_grid(sd, range(-3, 5), [-2, 2]):
            assert c.verdict == observed_crystal_condition(sd.hermitian.tag, c.l, c.n, m)


def test_stated_conditions():
    assert stated_crystal_condition("AI", 2, 1)
    assert not stated_crystal_condition("AI", -1, 0)
    assert stated_crystal_condition("AIV", -1, 0, 2) and not stated_crystal_condition("AIV", -1, 1, 2)


# -- projections and certificates ----------------------------------------------------------

def test_projection_equivariant():
    for sd, lam, n, l in [(AI, (3,), 1, 1), (AIV2, (2, 1), 1, 1), (AI, (2,), 0, 0)]:
        a, s = solve(sd, lam, n, l)
        pi = Projection(a.M, s.vectors[0])
        assert pi(a.M.top()) == ONE
        assert pi.equivariant(a, character_chi(sd, a.params, l))


@pytest.mark.parametrize("n", [1, 2, 4])
def test_a_form_image_rank_one(n):
    bv = bottom_vector(AI, n, 1)
    res = a_form_image_check(bv.module, bv.f)
    assert res.passed and set(res.witness["values"]) == {"1", str(qpow(-n))}


def test_certificates():
    assert certify(AI, 0, 0, (0,)).status == "pass"
    good = certify(AI, 1, 1, (3,))
    assert good.status == "pass" and good.failing == []
    bad = certify(AI, 0, 1, (1,))
    assert bad.status == "fail" and 4 in bad.failing
    md = certificates_markdown([good, bad])
    assert md.count("\n") == 4 and "| fail | 4 |" in md


def test_dual_and_integral_certificates():
    for n in (0, 1, 3):
        bv = bottom_vector(AI, n, 1)
        assert dual_integral_certify(bv.module, bv.f).passed
        res = integral_certify(AI, bv)
        assert res.passed and res.witness["quasi_minuscule_route"] and res.witness["direct_route"]
    bv = bottom_vector(AIV2, 2, 1)
    assert integral_certify(AIV2, bv).passed
    bv = bottom_vector(AI, 2, 3)
    res = integral_certify(AI, bv)
    assert res.passed and res.witness["route"] == "certified-via-tensor"
    assert dual_integral_certify(*(lambda b: (b.module, b.f))(bottom_vector(AI, 0, 0))).passed
