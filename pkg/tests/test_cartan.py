import pytest
from hypothesis import given, strategies as st

from qspherical.cartan import (
    CartanDatum, CartanError, DiagramConfig, HalfSumError, format_cycles, parse_cycles,
    satake, table_instances,
)


def test_weyl_dimensions():
    A2 = CartanDatum.of_type("A2")
    assert A2.weyl_dimension((1, 0)) == 3
    assert A2.weyl_dimension((1, 1)) == 8
    assert CartanDatum.of_type("B2").weyl_dimension((0, 1)) == 4
    assert CartanDatum.of_type("G2").weyl_dimension((1, 0)) in (7, 14)


def test_symmetrizer_nonsimply_laced():
    C = CartanDatum.of_type("B2")
    d = C.symmetrizer
    for i in range(2):
        for j in range(2):
            assert d[i] * C.c(i, j) == d[j] * C.c(j, i)


def test_cycles_roundtrip():
    assert parse_cycles("(1 3)", 3) == (2, 1, 0)
    assert format_cycles((2, 1, 0)) == "(1 3)"
    assert format_cycles(parse_cycles("id", 4)) == "id"


def test_valid_pairs():
    assert satake("A1").hermitian.tag == "AI"
    sd = satake("A3", [2], "(1 3)")
    assert sd.hermitian.tag == "AIV"
    assert set(sd.hermitian.orbit) == {0, 2}


def test_half_sum_violation_is_condition_three():
    with pytest.raises(HalfSumError) as exc:
        satake("A2", [1], "id")
    assert exc.value.condition == 3


def test_non_hermitian_pair():
    sd = satake("A2")
    assert sd.hermitian is None
    with pytest.raises(CartanError):
        sd.mu(1)


def test_theta_ai():
    sd = satake("A1")
    assert sd.theta((1,)) == (-1,)
    assert sd.iweight((3,)) == sd.iweight((1,)) != sd.iweight((2,))


def test_icoweights_aiv():
    sd = satake("A3", [2], "(1 3)")
    basis = sd.icoweight_basis
    assert (1, 0, -1) in basis and (0, 1, 0) in basis
    for h in basis:
        assert sd.theta_coweight(h) == h


def test_spherical_weights():
    assert satake("A1").is_spherical((0,))
    assert satake("A1").is_spherical((2,))
    assert not satake("A1").is_spherical((1,))
    assert satake("A3", [2], "(1 3)").is_spherical((1, 0, 1))


def test_restricted_roots():
    assert satake("A1").is_reduced
    assert not satake("A3", [2], "(1 3)").is_reduced
    assert satake("A3", [], "(1 3)").is_reduced


def test_mu():
    assert satake("A1").mu(-3) == (3,)
    assert satake("A2", [], "(1 2)").mu(2) == (2, 0)
    sd = satake("A3", [2], "(1 3)")
    assert sd.mu(-1) == (0, 0, 1) and sd.mu(0) == (0, 0, 0)


@pytest.mark.parametrize("tag,cfg", table_instances(), ids=[t for t, _ in table_instances()])
def test_table_instances_classify(tag, cfg):
    assert cfg.satake().hermitian.tag == tag


def test_config_roundtrip():
    cfg = DiagramConfig("A3", black=(2,), tau="(1 3)", n=2, overrides=(("c1", "q^2"),))
    assert DiagramConfig.loads(cfg.dumps()) == cfg


@given(st.sampled_from([("A1", [], "id"), ("A3", [2], "(1 3)"), ("A3", [], "(1 3)"), ("A2", [], "(1 2)")]),
       st.lists(st.integers(-3, 3), min_size=3, max_size=3))
def test_theta_is_an_involution(pair, coords):
    sd = satake(*pair)
    lam = tuple(coords[: sd.rank])
    assert sd.theta(sd.theta(lam)) == lam
