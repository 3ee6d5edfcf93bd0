from pathlib import Path

import pytest
from hypothesis import given, settings, strategies as st

from qspherical.cartan import CartanDatum
from qspherical.exactq import ONE, ZERO, LaurentPoly, RatFun, q, qpow, quantum_int
from qspherical.linalg import axpy, vscale
from qspherical.umod import (
    CartanProjection, DimensionCapExceeded, WeightModule, braid_apply, braid_word, build_simple, check_contravariance,
    check_relations, crystal_lattice_basis, dual_integral_membership, equiv_infinity, form, integral_form_basis,
    kashiwara_e, kashiwara_f, lattice_membership, sl2_string_decompose, tensor, tensor_vectors, weight_vectors,
)

GOLDEN = Path(__file__).parent / "golden"
_cache: dict = {}


def mod(t, lam):
    key = (t, tuple(lam))
    if key not in _cache:
        _cache[key] = build_simple(CartanDatum.of_type(t), tuple(lam))
    return _cache[key]


SMALL = [("A1", (0,)), ("A1", (1,)), ("A1", (3,)), ("A2", (1, 0)), ("A2", (1, 1)), ("A2", (2, 1)),
         ("A3", (1, 0, 1)), ("B2", (1, 0)), ("B2", (0, 1)), ("B2", (1, 1)), ("C2", (1, 1)), ("G2", (1, 0))]


# -- construction -------------------------------------------------------------

@pytest.mark.parametrize("t,lam", SMALL)
def test_relations_and_dimension(t, lam):
    M = mod(t, lam)
    assert M.dim == M.cartan.weyl_dimension(lam)
    assert check_relations(M) == []


def test_a1_small_modules():
    M = mod("A1", (1,))
    assert M.dim == 2 and M.f(0, M.top()) == {1: ONE}
    L0 = mod("A1", (0,))
    assert L0.dim == 1 and L0.e(0, L0.top()) == {} and L0.f(0, L0.top()) == {}
    assert mod("A2", (1, 0)).dim == 3


@pytest.mark.parametrize("n", range(5))
def test_a1_string_formula(n):
    # E F^k v = [k][n-k+1] F^(k-1) v, independent of the stored basis
    M = mod("A1", (n,))
    v = M.top()
    prev = v
    for k in range(1, n + 1):
        cur = M.f(0, prev)
        assert M.e(0, cur) == vscale(quantum_int(k) * quantum_int(n - k + 1), prev)
        prev = cur
    assert M.f(0, prev) == {}


@pytest.mark.parametrize("name", sorted(p.name for p in GOLDEN.glob("*.txt")))
def test_golden_modules(name):
    text = (GOLDEN / name).read_text()
    t, rest = name[:-4].split("_L")
    lam = tuple(int(x) for x in rest.split("_"))
    assert mod(t, lam).dumps() == text
    assert WeightModule.loads(text).dumps() == text


def test_dimension_cap():
    with pytest.raises(DimensionCapExceeded):
        build_simple(CartanDatum.of_type("A2"), (5, 5), dim_cap=100)


# -- tensor products and the form ------------------------------------------------

def test_tensor_with_trivial():
    M = mod("A2", (1, 0))
    T = tensor(mod("A2", (0, 0)), M)
    for i in range(2):
        for k in range(M.dim):
            assert T.e(i, {k: ONE}) == M.e(i, {k: ONE})
            assert T.f(i, {k: ONE}) == M.f(i, {k: ONE})


def test_tensor_a1_square():
    M = mod("A1", (1,))
    T = tensor(M, M)
    assert T.dim == 4 and check_relations(T) == []
    zero = [k for k, w in enumerate(T.weights) if w == (0,)]
    rows = [T.e(0, {k: ONE}) for k in zero]
    from qspherical.linalg import rank
    assert len(zero) - rank(rows) == 1


def test_tensor_character():
    M, N = mod("A2", (1, 0)), mod("A2", (0, 1))
    T = tensor(M, N)
    prod: dict = {}
    for a, x in M.character().items():
        for b, y in N.character().items():
            w = tuple(i + j for i, j in zip(a, b))
            prod[w] = prod.get(w, 0) + x * y
    assert T.character() == prod


@pytest.mark.parametrize("t,lam", SMALL)
def test_contravariant_form(t, lam):
    M = mod(t, lam)
    vecs = weight_vectors(M)
    assert form(M, M.top(), M.top()) == ONE
    assert check_contravariance(M, [(v, w) for v in vecs for w in vecs])
    for v in vecs:
        for w in vecs:
            if M.weight_of(v) != M.weight_of(w):
                assert form(M, v, w) == ZERO


def test_form_a1():
    M = mod("A1", (1,))
    assert form(M, {1: ONE}, {1: ONE}) == ONE
    M2 = mod("A1", (2,))
    x = M2.f(0, M2.top())
    assert form(M2, x, x) == qpow(-1) * quantum_int(2)


def test_tensor_form_contravariant():
    M = mod("A1", (1,))
    T = tensor(M, mod("A1", (2,)))
    vecs = weight_vectors(T)
    assert check_contravariance(T, [(v, w) for v in vecs for w in vecs])


# -- braid operators ---------------------------------------------------------------

def test_braid_a1_golden():
    M = mod("A1", (1,))
    assert braid_apply(M, 0, {0: ONE}) == {1: -q}
    assert braid_apply(M, 0, {1: ONE}) == {0: ONE}


@pytest.mark.parametrize("t,lam", SMALL)
def test_braid_inverse_and_simple_root(t, lam):
    M = mod(t, lam)
    for i in range(M.rank):
        for k in range(M.dim):
            e = {k: ONE}
            assert braid_apply(M, i, braid_apply(M, i, e, inverse=True)) == e
            # T_i E_i T_i^-1 = -F_i K_i
            lhs = braid_apply(M, i, M.e(i, braid_apply(M, i, e, inverse=True)))
            assert lhs == vscale(-ONE, M.f(i, M.k_i(i, e)))


@pytest.mark.parametrize("t,lam", [("A2", (1, 1)), ("A3", (1, 0, 1))])
def test_braid_neighbour(t, lam):
    # T_i E_j T_i^-1 = E_i E_j - q^-1 E_j E_i for a_ij = -1
    M = mod(t, lam)
    i, j = 0, 1
    for k in range(M.dim):
        e = {k: ONE}
        lhs = braid_apply(M, i, M.e(j, braid_apply(M, i, e, inverse=True)))
        rhs = M.e(i, M.e(j, e))
        axpy(rhs, -qpow(-1), M.e(j, M.e(i, e)))
        assert lhs == rhs


def test_braid_relation_a2():
    M = mod("A2", (1, 0))
    for k in range(M.dim):
        e = {k: ONE}
        assert braid_word(M, (0, 1, 0), e) == braid_word(M, (1, 0, 1), e)


# -- crystal and integral lattices ------------------------------------------------

def test_kashiwara_exact_on_a_string():
    M = mod("A1", (3,))
    v = M.f(0, M.top())
    assert kashiwara_e(M, 0, kashiwara_f(M, 0, v)) == v


def test_kashiwara_a1():
    M = mod("A1", (2,))
    v = M.top()
    assert sl2_string_decompose(M, 0, v) == [(0, v)]
    assert kashiwara_f(M, 0, v) == M.f(0, v)
    assert kashiwara_f(M, 0, kashiwara_f(M, 0, v)) == M.f_div(0, 2, v)


@pytest.mark.parametrize("t,lam", SMALL)
def test_kashiwara_preserves_crystal_lattice(t, lam):
    M = mod(t, lam)
    cb = crystal_lattice_basis(M)
    assert len(cb.vectors) == M.dim
    for b in cb.vectors:
        for i in range(M.rank):
            for op in (kashiwara_e, kashiwara_f):
                x = op(M, i, b)
                assert lattice_membership(x, cb, "Ainf")[0]
            y = kashiwara_f(M, i, b)
            if not lattice_membership(y, cb, "qinvAinf")[0]:
                assert equiv_infinity(kashiwara_e(M, i, y), b, cb)


def test_crystal_bases_small():
    assert len(crystal_lattice_basis(mod("A1", (0,))).vectors) == 1
    assert crystal_lattice_basis(mod("A1", (1,))).vectors == [{0: ONE}, {1: ONE}]
    assert len(crystal_lattice_basis(mod("A2", (1, 0))).vectors) == 3


def test_lattice_membership_examples():
    M = mod("A1", (1,))
    cb = crystal_lattice_basis(M)
    v = {0: ONE, 1: qpow(-1)}
    assert lattice_membership(v, cb, "Ainf")[0]
    assert equiv_infinity(v, {0: ONE}, cb)
    assert not lattice_membership({0: q}, cb, "Ainf")[0]
    assert lattice_membership({1: qpow(-2)}, cb, "qinvAinf")[0]
    for n in range(1, 4):
        assert equiv_infinity({0: ONE, 1: qpow(-n)}, {0: ONE}, cb)


def test_integral_forms():
    for n in range(5):
        M = mod("A1", (n,))
        ib = integral_form_basis(M)
        assert ib.decided
        divided = [M.f_div(0, k, M.top()) for k in range(n + 1)]
        for x in divided:
            assert lattice_membership(x, ib, "A")[0]
        # and they span: each basis vector is an A-combination of divided powers
        for b in ib.vectors:
            assert lattice_membership(b, _as_basis(M, divided), "A")[0]
    M = mod("A1", (1,))
    ib = integral_form_basis(M)
    assert lattice_membership(vscale(quantum_int(2), {1: ONE}), ib, "A")[0]
    assert not lattice_membership(vscale(ONE / quantum_int(2), {1: ONE}), ib, "A")[0]


def _as_basis(M, vecs):
    from qspherical.umod import LatticeBasis
    return LatticeBasis(M, vecs, "integral")


def test_dual_integral():
    M = mod("A1", (2,))
    assert dual_integral_membership(M, M.top())[0]
    x = vscale(ONE / quantum_int(2), M.f(0, M.top()))
    assert dual_integral_membership(M, x)[0]
    assert not lattice_membership(x, integral_form_basis(M), "A")[0]


@pytest.mark.parametrize("t,lam", SMALL[:8])
def test_integral_inside_dual(t, lam):
    M = mod(t, lam)
    for b in integral_form_basis(M).vectors:
        assert dual_integral_membership(M, b)[0]


# -- Cartan projection ------------------------------------------------------------

def test_projection_identity_with_trivial():
    M = mod("A1", (2,))
    P = CartanProjection(tensor(M, mod("A1", (0,))))
    assert P.N.dim == M.dim


def test_projection_a1():
    M = mod("A1", (1,))
    P = CartanProjection(tensor(M, M))
    assert P.N.dim == 3
    assert P.coords(tensor_vectors(M, M, {0: ONE}, {1: ONE}))


coef = st.dictionaries(st.integers(-3, -1), st.integers(-3, 3), max_size=2).map(lambda d: RatFun(LaurentPoly(d)))


def _lattice_vector(M, cb, cs):
    v = dict(M.top())
    for b, c in zip(cb.vectors, cs):
        axpy(v, c, b)
    return v


PAIRS = {"A1": [((1,), (2,)), ((2,), (2,)), ((1,), (3,))],
         "A2": [((1, 0), (0, 1)), ((1, 0), (1, 0)), ((0, 1), (1, 1))]}
_proj: dict = {}


def _projection(t, lam, mu):
    key = (t, lam, mu)
    if key not in _proj:
        M, N = mod(t, lam), mod(t, mu)
        P = CartanProjection(tensor(M, N))
        _proj[key] = (M, N, P, crystal_lattice_basis(M), crystal_lattice_basis(N), crystal_lattice_basis(P.N))
    return _proj[key]


@pytest.mark.parametrize("t", ["A1", "A2"])
@settings(max_examples=60, deadline=None)
@given(data=st.data())
def test_projection_preserves_crystal_limit(t, data):
    lam, mu = data.draw(st.sampled_from(PAIRS[t]))
    M, N, P, cbm, cbn, cbp = _projection(t, lam, mu)
    v = _lattice_vector(M, cbm, data.draw(st.lists(coef, min_size=M.dim, max_size=M.dim)))
    w = _lattice_vector(N, cbn, data.draw(st.lists(coef, min_size=N.dim, max_size=N.dim)))
    img = P.coords(tensor_vectors(M, N, v, w))
    assert equiv_infinity(img, P.N.top(), cbp)
