import itertools
from fractions import Fraction

import pytest

from seifert_obstruct.errors import DomainError
from seifert_obstruct.exactalg import FGAbelianGroup
from seifert_obstruct.forms import AlternatingTrilinearForm, LinkingForm


def _product_form(genus: int) -> AlternatingTrilinearForm:
    values = {(0, 2 * i - 1, 2 * i): 1 for i in range(1, genus + 1)}
    return AlternatingTrilinearForm.from_values(2 * genus + 1, values, "Q")


def test_linking_form_reduces_mod_one():
    form = LinkingForm.build(FGAbelianGroup(rank=0, torsion=(5,)), [[Fraction(-1, 5)]])
    assert form.gram == ((Fraction(4, 5),),)
    assert form((1,), (1,)) == Fraction(4, 5)
    assert form((2,), (1,)) == Fraction(3, 5)
    assert form.is_symmetric()
    assert form.is_nonsingular()


def test_linking_form_rejects_undefined_values():
    with pytest.raises(DomainError):
        LinkingForm(FGAbelianGroup(rank=0, torsion=(3,)), ((Fraction(1, 2),),))
    with pytest.raises(DomainError):
        LinkingForm(FGAbelianGroup(rank=1, torsion=()), ())


def test_linking_form_on_generators_rewrites_to_normal_form():
    form = LinkingForm.on_generators([2, 3], [[Fraction(1, 2), 0], [0, Fraction(1, 3)]])
    assert form.orders == (6,)
    assert form.is_nonsingular()
    assert form.gram == ((Fraction(5, 6),),)


def test_singular_linking_form_detected():
    form = LinkingForm.build(FGAbelianGroup(rank=0, torsion=(3, 3)), [[Fraction(1, 3), 0], [0, 0]])
    assert not form.is_nonsingular()


def test_orthogonal_sum_and_negation():
    a = LinkingForm.build(FGAbelianGroup(rank=0, torsion=(3,)), [[Fraction(1, 3)]])
    total = a.orthogonal_sum(a.negated())
    assert total.orders == (3, 3)
    assert sorted(v for row in total.gram for v in row) == [0, 0, Fraction(1, 3), Fraction(2, 3)]
    assert a.orthogonal_sum(LinkingForm.trivial()).orders == (3,)
    assert LinkingForm.trivial().describe() == "0"


def test_trilinear_form_is_alternating():
    form = AlternatingTrilinearForm.from_values(3, {(0, 1, 2): 2}, "Z")
    assert form.value(0, 1, 2) == 2
    assert form.value(1, 0, 2) == -2
    assert form.value(2, 0, 1) == 2
    assert form.value(0, 0, 1) == 0
    assert form.evaluate((1, 0, 0), (0, 1, 0), (0, 0, 1)) == 2
    assert form.evaluate((1, 1, 0), (1, 1, 0), (0, 0, 1)) == 0


def test_from_values_collects_permutations():
    form = AlternatingTrilinearForm.from_values(3, {(2, 1, 0): 1, (0, 1, 2): 3}, "Z")
    assert form.values == {(0, 1, 2): 2}
    with pytest.raises(DomainError):
        AlternatingTrilinearForm.from_values(3, {(0, 0, 1): 1})
    assert AlternatingTrilinearForm.from_values(3, {(0, 0, 1): 0}).is_zero()


def test_radical_of_product_forms():
    for genus in (1, 2, 3):
        assert _product_form(genus).radical_dimension() == 0
    assert AlternatingTrilinearForm.zero(3).radical_dimension() == 3
    padded = AlternatingTrilinearForm.from_values(4, {(0, 1, 2): 1}, "Q")
    assert padded.radical_dimension() == 1
    assert padded.radical_basis() == [(0, 0, 0, 1)]


def test_radical_over_finite_field():
    form = AlternatingTrilinearForm.from_values(5, {(0, 1, 2): 1, (0, 3, 4): 3}, "Z")
    assert form.as_rational().radical_dimension() == 0
    reduced = form.reduce_mod(3)
    assert reduced.values == {(0, 1, 2): 1}
    assert reduced.radical_dimension() == 2
    assert AlternatingTrilinearForm.from_values(3, {(0, 1, 2): 3}, "Z").reduce_mod(3).is_zero()


def test_block_sum_and_rings():
    z = AlternatingTrilinearForm.from_values(3, {(0, 1, 2): 2}, "Z")
    total = z.block_sum(AlternatingTrilinearForm.zero(1, "Z"))
    assert total.dimension == 4 and total.ring == "Z"
    assert total.content() == 2
    mixed = z.block_sum(_product_form(1))
    assert mixed.ring == "Q"
    assert mixed.values == {(0, 1, 2): 2, (3, 4, 5): 1}
    with pytest.raises(DomainError):
        z.reduce_mod(3).block_sum(z.reduce_mod(5))
    with pytest.raises(DomainError):
        _product_form(1).content()


def test_pullback_along_a_change_of_basis():
    form = AlternatingTrilinearForm.from_values(3, {(0, 1, 2): 1}, "Q")
    pulled = form.pullback([(1, 1, 0), (0, 1, 0), (0, 0, 1)])
    assert pulled.values == {(0, 1, 2): 1}
    degenerate = form.pullback([(1, 0, 0), (2, 0, 0), (0, 0, 1)])
    assert degenerate.is_zero()


def test_witness_and_description():
    form = AlternatingTrilinearForm.from_values(3, {(0, 1, 2): 5}, "Z")
    assert form.nonzero_witness() == ((0, 1, 2), 5)
    assert form.describe() == "dimension 3 over Z: f(e1,e2,e3)=5"
    assert AlternatingTrilinearForm.zero(2, "Zp", 3).describe() == "zero form of dimension 2 over Z/3"
    assert AlternatingTrilinearForm.zero(2).nonzero_witness() is None


def _random_form(rng, ring: str, modulus=None) -> AlternatingTrilinearForm:
    n = rng.randint(3, 6)
    values = {}
    for triple in itertools.combinations(range(n), 3):
        if rng.random() < 0.4:
            numerator = rng.randint(-4, 4)
            values[triple] = Fraction(numerator, rng.randint(1, 3)) if ring == "Q" else numerator
    return AlternatingTrilinearForm.from_values(n, values, ring, modulus)


def _parity(order) -> int:
    inversions = sum(1 for a, b in itertools.combinations(order, 2) if a > b)
    return -1 if inversions % 2 else 1


@pytest.mark.parametrize("ring, modulus", [("Q", None), ("Z", None), ("Zp", 5)])
def test_sign_rule_on_every_basis_triple(rng, ring, modulus):
    for _ in range(30):
        form = _random_form(rng, ring, modulus)
        n = form.dimension
        basis = [tuple(int(t == i) for t in range(n)) for i in range(n)]
        for triple in itertools.product(range(n), repeat=3):
            base = form.value(*triple)
            assert form.evaluate(*(basis[i] for i in triple)) == base
            if len(set(triple)) < 3:
                assert base == 0
                continue
            for order in itertools.permutations(range(3)):
                permuted = form.value(*(triple[t] for t in order))
                expected = _parity(order) * base
                assert permuted == (expected % modulus if modulus else expected)


@pytest.mark.parametrize("ring, modulus", [("Q", None), ("Z", None), ("Zp", 3), ("Zp", 5)])
def test_radical_dimension_is_invariant_under_change_of_basis(rng, unimodular, ring, modulus):
    for _ in range(40):
        form = _random_form(rng, ring, modulus)
        pulled = form.pullback(unimodular(form.dimension).to_rows())
        assert pulled.dimension == form.dimension
        assert pulled.radical_dimension() == form.radical_dimension()
        assert pulled.is_zero() == form.is_zero()
        if ring == "Z":
            assert pulled.content() == form.content()
