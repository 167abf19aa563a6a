from __future__ import annotations

from fractions import Fraction
from math import lcm

import numpy as np
import pytest
from hypothesis import given, strategies as st

from operlab.errors import InvalidRank
from operlab.liealg import (LieType, RootSystem, algebra, all_types, build_chevalley,
                            build_root_system, cartan_involution, cartan_matrix, killing,
                            weyl_orbits)

from conftest import ALL_TYPES, SMALL_TYPES

DIMS = {"A": lambda n: n * (n + 2), "B": lambda n: n * (2 * n + 1), "C": lambda n: n * (2 * n + 1),
        "D": lambda n: n * (2 * n - 1), "E": {6: 78, 7: 133, 8: 248}.get, "F": lambda n: 52,
        "G": lambda n: 14}


def reflection_closure(a):
    """Roots as the orbit of the simple roots under simple reflections (independent oracle)."""
    n = len(a)
    simple = [tuple(int(i == j) for j in range(n)) for i in range(n)]
    found = set(simple)
    frontier = list(simple)
    while frontier:
        nxt = []
        for v in frontier:
            for i in range(n):
                pair = sum(v[j] * a[i][j] for j in range(n))
                w = tuple(v[j] - pair * (j == i) for j in range(n))
                if w not in found:
                    found.add(w)
                    nxt.append(w)
        frontier = nxt
    return found


# -- types and parsing -----------------------------------------------------------


def test_parse_accepts_common_spellings():
    assert LieType.parse("e8") == LieType("E", 8)
    assert LieType.parse(" B_3 ").name == "B3"


@pytest.mark.parametrize("bad", ["E9", "F3", "G3", "B1", "D2", "X2", "A0", "A"])
def test_out_of_classification_ranks_raise(bad):
    with pytest.raises(InvalidRank):
        LieType.parse(bad)


def test_all_types_counts():
    # A1..A8, B2..B8, C2..C8, D3..D8, E6-8, F4, G2
    assert len(all_types(8)) == 8 + 7 + 7 + 6 + 3 + 1 + 1


# -- root systems ------------------------------------------------------------------


def test_a2_has_six_roots_and_height_two():
    rs = build_root_system(LieType.parse("A2"))
    assert len(rs.all_roots) == 6
    assert rs.heights[rs.highest_root] == 2


def test_g2_roots():
    rs = build_root_system(LieType.parse("G2"))
    assert len(rs.all_roots) == 12
    assert len(rs.positive_roots) == 6


def test_a1_killing_gram_of_coroot():
    rs = build_root_system(LieType.parse("A1"))
    assert set(rs.all_roots) == {(1,), (-1,)}
    assert rs.killing_gram == [[Fraction(8)]]


@pytest.mark.parametrize("name", ALL_TYPES)
def test_roots_match_reflection_closure(name):
    t = LieType.parse(name)
    rs = RootSystem(t)
    assert set(rs.all_roots) == reflection_closure(cartan_matrix(t))
    assert len(rs.all_roots) == DIMS[t.family](t.rank) - t.rank


@pytest.mark.parametrize("name", ALL_TYPES)
def test_highest_root_dominates(name):
    rs = RootSystem(LieType.parse(name))
    top = rs.highest_root
    assert all(all(x <= y for x, y in zip(r, top)) for r in rs.positive_roots)


def test_orbit_structure():
    assert len(weyl_orbits(RootSystem(LieType("A", 5)))) == 1
    b2 = weyl_orbits(RootSystem(LieType("B", 2)))
    assert [len(o.roots) for o in b2] == [4, 4]
    g2 = weyl_orbits(RootSystem(LieType("G", 2)))
    assert g2[0].label == "long" and len(g2[0].roots) == 6
    assert RootSystem(LieType("G", 2)).highest_root in g2[0].roots


# -- Chevalley basis -----------------------------------------------------------------


def _ad_integer(alg):
    ad = alg.ad_matrices
    assert np.array_equal(ad, np.round(ad))
    return ad


def test_a1_relations():
    a = algebra("A1")
    h, e, f = {0: 1}, {1: 1}, {2: 1}
    assert a.bracket(e, f) == h
    assert a.bracket(h, e) == {1: 2}


def test_a2_structure_constant_magnitude():
    a = algebra("A2")
    s = a.bracket({a.index[(1, 0)]: 1}, {a.index[(0, 1)]: 1})
    assert list(s) == [a.index[(1, 1)]]
    assert abs(s[a.index[(1, 1)]]) == 1


@pytest.mark.parametrize("name", SMALL_TYPES + ["E6"])
def test_jacobi_exact_on_all_basis_triples(name):
    # ad is a Lie algebra map: ad([x, y]) = [ad x, ad y].  Entries are small
    # integers, so float products are exact.
    a = algebra(name)
    ad = _ad_integer(a)
    c = a.structure_tensor(np.float64)
    for i in range(a.dim):
        lhs = np.einsum("bk,kmn->bmn", c[i], ad)
        rhs = np.einsum("mk,bkn->bmn", ad[i], ad) - np.einsum("bmk,kn->bmn", ad, ad[i])
        assert np.array_equal(lhs, rhs), f"Jacobi fails for basis element {a.label(i)}"


@pytest.mark.parametrize("name", ["E7", "E8"])
def test_jacobi_sampled_for_large_types(name, rng):
    a = algebra(name)
    for _ in range(40):
        x, y, z = ({int(k): 1} for k in rng.integers(0, a.dim, 3))
        br = a.bracket
        tot = {}
        for part in (br(x, br(y, z)), br(y, br(z, x)), br(z, br(x, y))):
            for k, v in part.items():
                tot[k] = tot.get(k, 0) + v
        assert all(v == 0 for v in tot.values())


def _scaled_killing(a):
    d = lcm(*(v.denominator for v in a.killing_table.values()))
    k = np.zeros((a.dim, a.dim))
    for (i, j), v in a.killing_table.items():
        k[i, j] = float(v * d)
    return k


@pytest.mark.parametrize("name", ALL_TYPES)
def test_killing_invariance_exact(name):
    # kappa([x, y], z) + kappa(y, [x, z]) = 0  <=>  ad_x^T K + K ad_x = 0
    a = algebra(name)
    ad = _ad_integer(a)
    k = _scaled_killing(a)
    for i in range(a.dim):
        assert np.array_equal(ad[i].T @ k, -(k @ ad[i]))


@pytest.mark.parametrize("name", SMALL_TYPES)
def test_killing_table_is_the_trace_form(name):
    a = algebra(name)
    ad = a.ad_matrices
    trace_form = np.einsum("aij,bji->ab", ad, ad)
    assert np.allclose(trace_form, a.killing_matrix(), atol=1e-9)


def test_killing_examples():
    a = algebra("A1")
    assert killing(a, {1: 1}, {1: 1}) == 0
    assert killing(a, {1: 1}, {2: 1}) == 4


@pytest.mark.parametrize("n", [1, 2, 3, 4])
def test_sl_killing_matches_matrix_model(n):
    # Killing form of sl(n+1) is 2(n+1) tr(xy); h_i has trace norm 2, e_a f_a trace 1.
    a = algebra(f"A{n}")
    for r in a.rs.positive_roots:
        assert a.killing({a.index[r]: 1}, {a.index[tuple(-x for x in r)]: 1}) == 2 * (n + 1)
    for i in range(n):
        assert a.killing({i: 1}, {i: 1}) == 4 * (n + 1)


# -- Cartan involution ---------------------------------------------------------------


def test_theta_on_basis():
    a = algebra("A2")
    r = (1, 1)
    assert cartan_involution(a, {a.index[r]: 1}) == {a.index[(-1, -1)]: -1}
    assert cartan_involution(a, {0: 1j}) == {0: 1j}


@pytest.mark.parametrize("name", SMALL_TYPES)
def test_theta_is_an_involution_on_basis(name):
    a = algebra(name)
    for k in range(a.dim):
        assert cartan_involution(a, cartan_involution(a, {k: 1})) == {k: 1}


@pytest.mark.parametrize("name", ["A3", "B2", "G2", "F4"])
@given(data=st.data())
def test_theta_positivity(name, data):
    a = algebra(name)
    coeffs = data.draw(st.lists(st.tuples(st.integers(-5, 5), st.integers(-5, 5)),
                                min_size=a.dim, max_size=a.dim))
    x = {k: complex(re, im) for k, (re, im) in enumerate(coeffs) if re or im}
    if not x:
        return
    val = a.killing(x, a.theta(x))
    assert abs(complex(val).imag) < 1e-9
    assert -complex(val).real > 0


def test_chevalley_is_deterministic():
    a1 = build_chevalley(RootSystem(LieType.parse("B3")))
    a2 = build_chevalley(RootSystem(LieType.parse("B3")))
    assert a1.to_json() == a2.to_json()
