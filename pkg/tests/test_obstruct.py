import itertools
from fractions import Fraction

import pytest

from seifert_obstruct.errors import CutoffExceeded, DomainError
from seifert_obstruct.exactalg import FGAbelianGroup, IntMatrix
from seifert_obstruct.forms import AlternatingTrilinearForm, LinkingForm
from seifert_obstruct.links import catalog
from seifert_obstruct.manifold import (
    ManifoldDescriptor,
    SurgeryPresentation,
    connected_sum,
    descriptor_from_seifert,
    descriptor_from_surgery,
    linking_form_from_surgery,
    s1xs2_descriptor,
    sphere_descriptor,
)
from seifert_obstruct.observability import metric_value
from seifert_obstruct.obstruct import (
    ObstructionReport,
    Verdict,
    check_theorem_1_1,
    check_theorem_1_3,
    distinguish,
    find_isometry,
    linking_forms_isomorphic,
    obstruct,
)
from seifert_obstruct.seifert import parse_seifert


def _surgery(name: str, **parameters) -> ManifoldDescriptor:
    return descriptor_from_surgery(SurgeryPresentation.from_link(catalog(name, parameters)))


def _seifert(text: str) -> ManifoldDescriptor:
    return descriptor_from_seifert(parse_seifert(text))


def _lens(p: int) -> LinkingForm:
    return linking_form_from_surgery(SurgeryPresentation(IntMatrix.from_rows([[p]])))


def _lens_descriptor(p: int) -> ManifoldDescriptor:
    return descriptor_from_surgery(SurgeryPresentation(IntMatrix.from_rows([[p]])))


def _synthetic(beta1: int, values, ring: str = "Q") -> ManifoldDescriptor:
    form = AlternatingTrilinearForm.from_values(beta1, values, ring)
    return ManifoldDescriptor(beta1=beta1, torsion=FGAbelianGroup.trivial(), cup_form_q=form)


@pytest.mark.parametrize(
    "text",
    ["(+0|2/1,3/1,5/1)", "(+1|2/1,2/-1)", "(+1|2/1,3/1)", "(+2|)", "(+0|3/1,3/1,3/1)", "(+0|1/5)"],
)
def test_seifert_spaces_are_never_obstructed(text):
    report = obstruct(_seifert(text))
    assert not report.obstructed
    assert report.verdict is Verdict.CONSISTENT


def test_two_torsion_leaves_only_the_vacuous_mod_p_check():
    d = _seifert("(-1|)")
    assert d.beta1 == 0
    assert check_theorem_1_1(d).verdict is Verdict.INAPPLICABLE
    assert check_theorem_1_3(d).verdict is Verdict.CONSISTENT
    assert obstruct(d).verdict is Verdict.CONSISTENT


def test_three_sphere_is_consistent():
    sphere = sphere_descriptor()
    assert check_theorem_1_1(sphere).verdict is Verdict.INAPPLICABLE
    assert check_theorem_1_3(sphere).notes == ["no odd prime divides |H_1|"]
    report = obstruct(sphere)
    assert report.verdict is Verdict.CONSISTENT
    assert not report.fired_rules


def test_even_betti_number_with_nonzero_cup_form_is_obstructed():
    d = _synthetic(4, {(0, 1, 2): 1})
    report = check_theorem_1_1(d)
    assert report.verdict is Verdict.OBSTRUCTED
    rule = report.fired_rules[0]
    assert rule.tag == "Thm1.1"
    assert rule.data == {"triple": [0, 1, 2], "value": 1}


def test_even_betti_number_with_zero_cup_form_is_consistent():
    assert check_theorem_1_1(_synthetic(2, {})).verdict is Verdict.CONSISTENT
    assert obstruct(_surgery("whitehead")).verdict is Verdict.CONSISTENT


def test_odd_betti_number_with_radical_fires_corollary():
    d = _synthetic(5, {(0, 1, 2): 1})
    report = check_theorem_1_1(d)
    assert report.tags == ["Cor1.2"]
    data = report.fired_rules[0].data
    assert data["radical_dimension"] == 2
    vector = [Fraction(v) for v in data["radical_vector"]]
    assert d.cup_form_q.evaluate(vector, [1, 0, 0, 0, 0], [0, 1, 0, 0, 0]) == 0
    assert any(vector)


def test_odd_betti_number_nondegenerate_forms():
    three = check_theorem_1_1(_surgery("borromean"))
    assert three.verdict is Verdict.CONSISTENT
    assert "S1 x Sigma_1" in three.notes[0]
    five = check_theorem_1_1(_synthetic(5, {(0, 1, 2): 1, (0, 3, 4): 1}))
    assert five.verdict is Verdict.CONSISTENT
    assert "not decided" in five.notes[0]
    assert check_theorem_1_1(_synthetic(1, {})).verdict is Verdict.CONSISTENT


def test_rational_homology_sphere_with_mod_p_product_is_obstructed():
    d = _surgery("borromean_framed", p=3)
    assert check_theorem_1_1(d).verdict is Verdict.INAPPLICABLE
    report = obstruct(d)
    assert report.verdict is Verdict.OBSTRUCTED
    assert report.tags == ["Thm1.3", "Prop4.4"]
    assert report.fired_rules[0].data == {"p": 3, "triple": [0, 1, 2], "value": 1}


def test_mod_p_check_needs_an_odd_prime_form():
    assert check_theorem_1_3(_surgery("borromean")).verdict is Verdict.INAPPLICABLE
    lens = _lens_descriptor(5)
    assert check_theorem_1_3(lens).verdict is Verdict.INAPPLICABLE
    assert obstruct(lens).verdict is Verdict.INAPPLICABLE


def test_zero_surgery_on_even_link_adds_proposition_tag():
    report = obstruct(_surgery("borromean_unlink", n=1))
    assert report.tags == ["Thm1.1", "Prop4.2"]


def test_connected_sums_do_not_carry_surgery_tags():
    d = connected_sum(_surgery("borromean"), s1xs2_descriptor())
    report = obstruct(d)
    assert report.tags == ["Thm1.1"]


def test_obstructed_report_needs_a_rule():
    with pytest.raises(ValueError):
        ObstructionReport(Verdict.OBSTRUCTED)


def test_verdicts_are_counted():
    before = metric_value("obstruction_verdict_total", verdict="Obstructed")
    obstruct(_surgery("borromean_unlink", n=1))
    assert metric_value("obstruction_verdict_total", verdict="Obstructed") == before + 1


def test_linking_form_isometries():
    assert linking_forms_isomorphic(_lens(5), _lens(-5))
    assert not linking_forms_isomorphic(_lens(3), _lens(-3))
    assert not linking_forms_isomorphic(_lens(3), _lens(9))
    images = find_isometry(_lens(7), _lens(7))
    assert images is not None and len(images) == 1
    with pytest.raises(CutoffExceeded):
        find_isometry(_lens(3), _lens(3), cutoff=2)


def test_isometry_of_rank_two_forms():
    first = LinkingForm.on_generators([3, 3], [[Fraction(1, 3), 0], [0, Fraction(1, 3)]])
    second = LinkingForm.on_generators([3, 3], [[Fraction(2, 3), 0], [0, Fraction(2, 3)]])
    mixed = LinkingForm.on_generators([3, 3], [[Fraction(1, 3), 0], [0, Fraction(2, 3)]])
    # x^2 + y^2 and -x^2 - y^2 are equivalent over F_3, x^2 - y^2 is not
    assert linking_forms_isomorphic(first, second)
    assert not linking_forms_isomorphic(first, mixed)


def test_distinguish_by_homology():
    report = distinguish(_seifert("(+0|2/1,3/1,5/1)"), _lens_descriptor(5))
    assert report.distinct
    assert report.evidence[0].invariant == "H_1"


def test_distinguish_by_linking_form():
    report = distinguish(_lens_descriptor(3), _lens_descriptor(-3))
    assert report.distinct
    assert [e.invariant for e in report.evidence] == ["linking form"]
    assert not distinguish(_lens_descriptor(5), _lens_descriptor(-5)).distinct


def test_distinguish_by_cup_forms_and_milnor_degree():
    borromean = _surgery("borromean")
    unlink = _surgery("unlink", n=3)
    report = distinguish(borromean, unlink)
    invariants = [e.invariant for e in report.evidence]
    assert "rational cup form" in invariants
    assert report.caveats

    cabled = distinguish(_surgery("cabled_borromean", k=1), _surgery("cabled_borromean", k=2))
    assert [e.invariant for e in cabled.evidence] == ["rational cup form integral content"]


def test_distinguish_reports_cutoff_as_caveat():
    # the 2-primary part is still searched, so its size is bounded by the cutoff
    report = distinguish(_lens_descriptor(8), _lens_descriptor(8), cutoff=3)
    assert not report.distinct
    assert report.caveats
    assert not distinguish(_lens_descriptor(7), _lens_descriptor(7), cutoff=3).caveats


def _diagonal(order: int, numerators) -> LinkingForm:
    n = len(numerators)
    gram = [[Fraction(u, order) if i == j else Fraction(0) for j in range(n)] for i, u in enumerate(numerators)]
    return LinkingForm.on_generators([order] * n, gram)


def _preserves_form(f1: LinkingForm, f2: LinkingForm, images) -> bool:
    k = len(f1.orders)
    basis = [tuple(1 if t == i else 0 for t in range(k)) for i in range(k)]
    return all(f2(images[i], images[j]) == f1(basis[i], basis[j]) for i in range(k) for j in range(k))


@pytest.mark.parametrize("rank", [4, 5, 6])
def test_elementary_forms_are_decided_by_local_invariants(rank):
    squares = _diagonal(3, [1] * rank)
    twisted = _diagonal(3, [1] * (rank - 1) + [2])
    doubled = _diagonal(3, [1] * (rank - 2) + [2, 2])
    assert not linking_forms_isomorphic(squares, twisted)
    assert find_isometry(squares, twisted) is None
    # 2 * 2 = 4 is a square mod 3
    assert linking_forms_isomorphic(squares, doubled)
    images = find_isometry(squares, doubled)
    assert images is not None and _preserves_form(squares, doubled, images)


def test_local_invariants():
    mixed = _diagonal(9, [1]).orthogonal_sum(_diagonal(3, [2]))
    assert mixed.local_invariants(3) == {1: (1, -1), 2: (1, 1)}
    assert mixed.local_invariants(5) == {}
    hyperbolic = LinkingForm.on_generators([3, 3], [[Fraction(0), Fraction(1, 3)], [Fraction(1, 3), Fraction(0)]])
    assert hyperbolic.local_invariants(3) == {1: (2, -1)}
    assert linking_forms_isomorphic(hyperbolic, _diagonal(3, [1, 2]))
    assert not linking_forms_isomorphic(hyperbolic, _diagonal(3, [1, 1]))
    zero = LinkingForm.on_generators([3], [[Fraction(0)]])
    assert zero.local_invariants(3) is None
    assert linking_forms_isomorphic(zero, zero)
    assert not linking_forms_isomorphic(zero, _diagonal(3, [1]))
    with pytest.raises(DomainError):
        mixed.local_invariants(2)


def _exhaustively_isometric(f1: LinkingForm, f2: LinkingForm) -> bool:
    if f1.orders != f2.orders:
        return False
    elements = list(f2.elements())
    size = f1.group.torsion_order
    for images in itertools.product(elements, repeat=len(f1.orders)):
        if not _preserves_form(f1, f2, images):
            continue
        if any(f2.group.element_order(y) != d for y, d in zip(images, f1.orders)):
            continue
        if len({f2.group.normalize([sum(c * y[t] for c, y in zip(x, images)) for t in range(len(x))]) for x in f1.elements()}) == size:
            return True
    return False


def test_isometry_decision_agrees_with_exhaustive_search(rng):
    forms = []
    while len(forms) < 10:
        a, c, b = rng.randint(-6, 6), rng.randint(-6, 6), rng.randint(-3, 3)
        if 2 <= abs(a * c - b * b) <= 30:
            forms.append(linking_form_from_surgery(SurgeryPresentation(IntMatrix.from_rows([[a, b], [b, c]]))))
    forms += [form.negated() for form in forms]
    for f1, f2 in itertools.combinations(forms, 2):
        if f1.orders == f2.orders:
            assert linking_forms_isomorphic(f1, f2) == _exhaustively_isometric(f1, f2)


def test_distinguish_is_symmetric(rng, descriptor_pool):
    names = sorted(descriptor_pool)
    candidates = list(descriptor_pool.values())
    for _ in range(6):
        a, b = (descriptor_pool[rng.choice(names)] for _ in range(2))
        candidates.append(connected_sum(a, b))
    for first, second in itertools.combinations(candidates, 2):
        forward, backward = distinguish(first, second), distinguish(second, first)
        assert forward.distinct == backward.distinct
        assert [e.invariant for e in forward.evidence] == [e.invariant for e in backward.evidence]
        assert [(e.first, e.second) for e in forward.evidence] == [(e.second, e.first) for e in backward.evidence]
