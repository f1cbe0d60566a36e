from __future__ import annotations

import random
from math import factorial

import pytest
from hypothesis import given, strategies as st

from cmtori.cmgroup import (
    CMType,
    DodsonData,
    SignedPermutation,
    closure,
    cocycle_splitting,
    conjugate_group,
    dodson_decompose,
    full_cg,
    is_primitive,
    normalize_cm_type,
    parse_group,
    reflex,
    sigma_stabilizer,
    validate_cm,
)
from cmtori.errors import DomainError, ResourceError
from cmtori.reciprocity import enumerate_cm_data, make_family


@st.composite
def signed_perms(draw, g):
    perm = draw(st.permutations(range(1, g + 1)))
    signs = draw(st.lists(st.sampled_from([1, -1]), min_size=g, max_size=g))
    return SignedPermutation.from_parts(signs, perm)


def as_map(x: SignedPermutation) -> dict[int, int]:
    g = x.g
    return {p: x.act(p) for p in list(range(1, g + 1)) + list(range(-g, 0))}


@given(st.integers(1, 5).flatmap(lambda g: st.tuples(signed_perms(g), signed_perms(g), signed_perms(g))))
def test_group_laws(xyz):
    x, y, z = xyz
    g = x.g
    assert (x * y) * z == x * (y * z)
    assert x * x.inverse() == SignedPermutation.identity(g)
    for p in as_map(x):
        assert (x * y).act(p) == y.act(x.act(p))
        # elements commute with rho: act(-p) = -act(p)
        assert x.act(-p) == -x.act(p)
    assert SignedPermutation.from_parts(x.signs, x.perm) == x


def test_bad_image_rejected():
    with pytest.raises(DomainError):
        SignedPermutation((1, 1))
    with pytest.raises(DomainError):
        CMType(2, frozenset({1, -1}))


@pytest.mark.parametrize("g", range(1, 6))
def test_full_cg_order(g):
    G = full_cg(g)
    assert G.order == 2 ** g * factorial(g)
    assert validate_cm(G).ok
    data = dodson_decompose(G)
    assert data.v == g and len(data.g0_elements) == factorial(g)


def test_closure_guard():
    with pytest.raises(ResourceError):
        closure([SignedPermutation.rho(13)], 13)
    with pytest.raises(ResourceError):
        full_cg(5, cap=100)


def test_validate_failures():
    g = 2
    swap = SignedPermutation((2, 1))
    assert validate_cm(closure([swap], g)).failure.startswith("complex conjugation")
    non_transitive = closure([SignedPermutation.rho(2)], 2)
    assert "transitive" in validate_cm(non_transitive).failure
    with pytest.raises(DomainError):
        dodson_decompose(non_transitive)


def test_dodson_named_families():
    G, _ = make_family("klein_g4")
    data = dodson_decompose(G)
    assert (data.v, len(data.g0_elements), G.order) == (1, 4, 8)
    G, _ = make_family("cyclic_2p", 5)
    data = dodson_decompose(G)
    assert (data.v, len(data.g0_elements), G.order) == (1, 5, 10)


def test_cyclic_family_needs_twist():
    # the section b * b∘pi is a coboundary, so conjugating by b untwists it
    G, _ = make_family("cyclic_2p", 5)
    b = cocycle_splitting(G)
    assert b is not None
    assert cocycle_splitting(full_cg(3)) is not None


def random_section(data: DodsonData, rng: random.Random) -> DodsonData:
    vs = sorted(data.v_subgroup)
    section = {}
    for pi, s in data.section.items():
        u = rng.choice(vs)
        section[pi] = tuple(a * b for a, b in zip(s, u))
    return DodsonData(data.g, data.v, data.g0_elements, section, data.v_subgroup)


@pytest.mark.parametrize("g", [2, 3, 4])
def test_section_independence(g):
    rng = random.Random(100 + g)
    for G, cm in enumerate_cm_data(g):
        base = dodson_decompose(G)
        split = cocycle_splitting(G, base) is not None
        gsig = {pi for pi in base.g0_elements if base.section[pi] in base.v_subgroup}
        for _ in range(3):
            other = random_section(base, rng)
            assert (cocycle_splitting(G, other) is not None) == split
            assert {pi for pi in other.g0_elements
                    if other.section[pi] in other.v_subgroup} == gsig


def random_element(g: int, rng: random.Random) -> SignedPermutation:
    perm = list(range(1, g + 1))
    rng.shuffle(perm)
    return SignedPermutation.from_parts([rng.choice((1, -1)) for _ in range(g)], perm)


@pytest.mark.parametrize("g", [2, 3, 4])
def test_conjugation_independence(g):
    """Conjugating the group and moving Sigma along leaves every invariant fixed."""
    rng = random.Random(7 * g)
    for G, cm in enumerate_cm_data(g):
        ref = reflex(G, cm)
        prim = is_primitive(G, cm)
        for _ in range(2):
            c = random_element(g, rng)
            G2 = conjugate_group(G, c)
            cm2 = CMType(g, frozenset(c.act(p) for p in cm.sigma))
            r2 = reflex(G2, cm2)
            assert (r2.reflex_degree, r2.v, r2.g0_order) == (ref.reflex_degree, ref.v, ref.g0_order)
            assert is_primitive(G2, cm2) == prim
            N, ncm = normalize_cm_type(G2, cm2)
            assert ncm.is_standard and validate_cm(N).ok


def test_reflex_full_cg():
    for g in range(1, 5):
        r = reflex(full_cg(g), CMType.standard(g))
        assert r.reflex_degree == 2 ** g
        assert len(r.g_sigma) == factorial(g)


def test_sigma_stabilizer_is_subgroup():
    for G, cm in enumerate_cm_data(3):
        H = set(sigma_stabilizer(G, cm))
        assert all(x * y in H for x in H for y in H)


def test_nonprimitive_example():
    # g = 2, G = <(2,1), rho>: Sigma = {1, 2} is induced from the quadratic subfield
    G = parse_group(2, [[2, 1], [-1, -2]])
    assert validate_cm(G).ok
    assert not is_primitive(G, CMType.standard(2))
    assert is_primitive(full_cg(2), CMType.standard(2))


def test_parse_group_length_check():
    with pytest.raises(DomainError):
        parse_group(3, [[1, 2]])


@pytest.mark.parametrize("g", [2, 3, 4])
def test_dodson_round_trip_and_rho_central(g):
    rho = SignedPermutation.rho(g)
    for G, _ in enumerate_cm_data(g):
        data = dodson_decompose(G)
        rebuilt = {SignedPermutation.from_parts(tuple(a * b for a, b in zip(s, w)), pi)
                   for pi, s in data.section.items() for w in data.v_subgroup}
        assert rebuilt == set(G.elements)
        assert all(rho * x == x * rho for x in G.elements)


def test_full_cg_has_trivial_section():
    for g in (2, 3, 4):
        assert cocycle_splitting(full_cg(g)) == (1,) * g
