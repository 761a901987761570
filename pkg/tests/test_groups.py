import math

import pytest
from hypothesis import given, settings, strategies as st

from ahsp_sim.groups import (
    FiniteAbelianGroup,
    brute_force_orthogonal,
    inner_product,
    is_orthogonal,
    normalize_generator,
    subgroup_generated_by,
)
from ahsp_sim.instances import enumerate_instances, enumerate_subgroups


small_moduli = st.lists(st.integers(min_value=1, max_value=8), min_size=1, max_size=3)


def make(moduli, gens=None):
    g = FiniteAbelianGroup(tuple(moduli))
    return (g, g.subgroup(gens)) if gens is not None else g


# --- construction ---------------------------------------------------------

@pytest.mark.parametrize("moduli, m, alphas, order", [
    ([2, 4], 4, (2, 1), 8),
    ([5], 5, (1,), 5),
    ([6, 4], 12, (2, 3), 24),
])
def test_group_construction(moduli, m, alphas, order):
    g = FiniteAbelianGroup(tuple(moduli))
    assert g.lcm_modulus == m
    assert g.weights == alphas
    assert g.order == order


def test_group_construction_errors():
    with pytest.raises(ValueError):
        FiniteAbelianGroup(())
    with pytest.raises(ValueError):
        FiniteAbelianGroup((0,))
    with pytest.raises(ValueError):
        FiniteAbelianGroup((3, -2))


# --- element arithmetic ---------------------------------------------------

def test_element_add_mod():
    g = FiniteAbelianGroup((2, 4))
    assert (g.element((1, 3)) + g.element((1, 2))).coords == (0, 1)


def test_negate_identity():
    g = FiniteAbelianGroup((2, 4))
    assert (-g.zero()).coords == (0, 0)


def test_negate_cyclic():
    g = FiniteAbelianGroup((4,))
    assert (-g.element((1,))).coords == (3,)


def test_mismatched_groups_raise():
    a = FiniteAbelianGroup((2,))
    b = FiniteAbelianGroup((3,))
    with pytest.raises(ValueError):
        a.element((1,)) + b.element((1,))
    with pytest.raises(ValueError):
        a.element((1,)).dot(b.element((1,)))


# --- inner product --------------------------------------------------------

def test_inner_product_examples():
    g = FiniteAbelianGroup((2, 4))
    assert inner_product(g.element((1, 1)), g.element((1, 2))) == 0
    assert inner_product(g.element((1, 3)), g.element((0, 1))) == 3
    for x in g.elements():
        assert inner_product(x, g.zero()) == 0


@given(small_moduli, st.data())
def test_inner_product_bilinear(moduli, data):
    g = FiniteAbelianGroup(tuple(moduli))
    coords = st.tuples(*(st.integers(0, n - 1) for n in g.moduli))
    x = g.element(data.draw(coords))
    y = g.element(data.draw(coords))
    z = g.element(data.draw(coords))
    m = g.lcm_modulus
    assert (x + y).dot(z) == (x.dot(z) + y.dot(z)) % m
    assert x.dot(y) == y.dot(x)


def test_bilinearity_exhaustive_small():
    for g, _ in enumerate_instances(16):
        m = g.lcm_modulus
        elems = list(g.elements())
        for x in elems:
            for y in elems:
                for z in elems:
                    assert (x + y).dot(z) == (x.dot(z) + y.dot(z)) % m


# --- generator normalization ---------------------------------------------

@pytest.mark.parametrize("raw, n, expected", [
    (6, 4, 2),
    (0, 4, 4),
    (3, 4, 1),
    (0, 1, 1),
    (5, 10, 5),
])
def test_normalize_generator(raw, n, expected):
    assert normalize_generator(raw, n) == expected


@given(st.integers(0, 100), st.integers(1, 50))
def test_normalize_generator_spans_same_subgroup(raw, n):
    h = normalize_generator(raw, n)
    assert n % h == 0
    assert {(raw * q) % n for q in range(n)} == {(h * q) % n for q in range(n)}


# --- orthogonal subgroup --------------------------------------------------

def test_orthogonal_examples():
    g, h = make((4,), (2,))
    assert h.orthogonal().generators == (2,)
    assert {e.coords for e in h.orthogonal().elements()} == {(0,), (2,)}

    g2 = FiniteAbelianGroup((2, 4))
    full = g2.full_subgroup()
    assert full.orthogonal().generators == (2, 4)
    assert {e.coords for e in full.orthogonal().elements()} == {(0, 0)}

    h2 = g2.subgroup((1, 2))
    perp = h2.orthogonal()
    assert {e.coords for e in perp.elements()} == {(0, 0), (0, 2)}
    assert perp.order == 2 == g2.order // h2.order


def test_is_orthogonal_examples():
    g = FiniteAbelianGroup((2, 4))
    h = g.subgroup((1, 2))
    assert is_orthogonal(g.element((0, 2)), h)
    assert is_orthogonal(g.zero(), h)
    g4 = FiniteAbelianGroup((4,))
    assert not is_orthogonal(g4.element((1,)), g4.subgroup((2,)))


def test_is_orthogonal_exhaustive_agrees_with_generator_check():
    for g, h in enumerate_instances(48):
        for x in g.elements():
            assert is_orthogonal(x, h) == is_orthogonal(x, h, exhaustive=True)


def test_brute_force_orthogonal_examples():
    g, h = make((4,), (2,))
    assert {e.coords for e in brute_force_orthogonal(h)} == {(0,), (2,)}
    trivial = g.trivial_subgroup()
    assert brute_force_orthogonal(trivial) == set(g.elements())
    g22 = FiniteAbelianGroup((2, 2))
    h22 = g22.subgroup((2, 1))
    assert {e.coords for e in brute_force_orthogonal(h22)} == {(0, 0), (1, 0)}


def test_brute_force_bound():
    g = FiniteAbelianGroup((2,) * 4)
    with pytest.raises(ValueError):
        brute_force_orthogonal(g.full_subgroup(), bound=8)


def test_double_orthogonal_and_order_duality():
    for g, h in enumerate_instances(128):
        perp = h.orthogonal()
        assert perp.orthogonal().generators == h.generators
        assert h.order * perp.order == g.order


# --- cosets ---------------------------------------------------------------

def test_coset_representatives_examples():
    g, h = make((4,), (2,))
    assert [r.coords for r in h.coset_representatives()] == [(0,), (1,)]
    assert [r.coords for r in g.full_subgroup().coset_representatives()] == [(0,)]
    g2 = FiniteAbelianGroup((2, 4))
    h2 = g2.subgroup((1, 2))
    assert [r.coords for r in h2.coset_representatives()] == [(0, 0), (0, 1)]


def test_coset_representatives_pairwise_distinct():
    for g, h in enumerate_instances(96):
        reps = h.coset_representatives()
        assert len(reps) == g.order // h.order
        for i, r1 in enumerate(reps):
            for r2 in reps[i + 1:]:
                assert not h.contains(r1 - r2)


def test_coset_label_is_canonical_representative():
    g = FiniteAbelianGroup((2, 4))
    h = g.subgroup((1, 2))
    for x in g.elements():
        label = h.coset_label(x)
        assert h.contains(x - g.element(label))


# --- span of samples ------------------------------------------------------

def test_subgroup_generated_by_examples():
    g = FiniteAbelianGroup((4,))
    assert subgroup_generated_by(g, [g.element((2,))]).generators == (2,)
    assert subgroup_generated_by(g, [g.zero()]).generators == (4,)
    assert subgroup_generated_by(g, []).generators == (4,)
    g2 = FiniteAbelianGroup((2, 4))
    span = subgroup_generated_by(g2, [g2.element((0, 2)), g2.element((1, 0))])
    assert span.generators == (1, 2)


def test_subgroup_generated_by_recovers_subgroup():
    for g, h in enumerate_instances(96):
        assert subgroup_generated_by(g, h.elements()).generators == h.generators


def test_subgroup_orders_multiply():
    for g in [FiniteAbelianGroup((2, 4)), FiniteAbelianGroup((12,))]:
        for h in enumerate_subgroups(g):
            assert h.order * math.prod(h.generators) == g.order
