"""Obstructions to Seifert fibered representatives and distinctions between classes."""
from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Dict, List, Optional, Sequence, Tuple

from sympy import primefactors

from .errors import CutoffExceeded
from .forms import AlternatingTrilinearForm, LinkingForm
from .magnus import AtLeast
from .manifold import ManifoldDescriptor
from .observability import record_distinction, record_verdict, span, structured_log

DEFAULT_CUTOFF = 2000


class Verdict(str, Enum):
    OBSTRUCTED = "Obstructed"
    CONSISTENT = "ConsistentNecessaryChecksPassed"
    INAPPLICABLE = "Inapplicable"


@dataclass(frozen=True)
class FiredRule:
    tag: str
    witness: str
    data: Dict[str, Any] = field(default_factory=dict, compare=False)


@dataclass
class ObstructionReport:
    verdict: Verdict
    fired_rules: List[FiredRule] = field(default_factory=list)
    notes: List[str] = field(default_factory=list)

    def __post_init__(self) -> None:
        if self.verdict is Verdict.OBSTRUCTED and not self.fired_rules:
            raise ValueError("an obstructed verdict needs a fired rule")

    @property
    def obstructed(self) -> bool:
        return self.verdict is Verdict.OBSTRUCTED

    @property
    def tags(self) -> List[str]:
        return [rule.tag for rule in self.fired_rules]


@dataclass(frozen=True)
class Evidence:
    invariant: str
    first: str
    second: str


@dataclass
class DistinctionReport:
    distinct: bool
    evidence: List[Evidence] = field(default_factory=list)
    caveats: List[str] = field(default_factory=list)


def _triple_witness(form: AlternatingTrilinearForm) -> Tuple[str, Dict[str, Any]]:
    (i, j, k), value = form.nonzero_witness()
    return (
        f"f(e{i + 1}, e{j + 1}, e{k + 1}) = {value} != 0",
        {"triple": [i, j, k], "value": value},
    )


def check_theorem_1_1(d: ManifoldDescriptor) -> ObstructionReport:
    """Rational cup form test: zero for even beta1, nondegenerate pairing for odd beta1."""
    if d.torsion.has_even_torsion():
        return ObstructionReport(Verdict.INAPPLICABLE, notes=["H_1 has 2-torsion"])
    if d.cup_form_q is None:
        return ObstructionReport(Verdict.INAPPLICABLE, notes=["no rational cup form available"])
    if d.beta1 == 0:
        return ObstructionReport(Verdict.INAPPLICABLE, notes=["rational homology sphere"])
    form = d.cup_form_q
    b1 = d.beta1
    if b1 % 2 == 0:
        if form.is_zero():
            return ObstructionReport(Verdict.CONSISTENT, notes=[f"beta1 = {b1} even and the cup form vanishes"])
        text, data = _triple_witness(form)
        return ObstructionReport(
            Verdict.OBSTRUCTED,
            [FiredRule("Thm1.1", f"beta1 = {b1} is even but {text}", data)],
        )
    if b1 == 1:
        return ObstructionReport(Verdict.CONSISTENT, notes=["beta1 = 1 forces a zero cup form"])
    radical = form.radical_dimension()
    if radical:
        vector = form.as_rational().radical_basis()[0] if form.ring != "Q" else form.radical_basis()[0]
        return ObstructionReport(
            Verdict.OBSTRUCTED,
            [
                FiredRule(
                    "Cor1.2",
                    f"beta1 = {b1} is odd and alpha = {[str(v) for v in vector]} cups trivially with all of H^1",
                    {"radical_vector": [str(v) for v in vector], "radical_dimension": radical},
                )
            ],
        )
    if b1 == 3:
        return ObstructionReport(
            Verdict.CONSISTENT, notes=["nonzero form on a 3-dimensional space: equivalent to the S1 x Sigma_1 form"]
        )
    return ObstructionReport(
        Verdict.CONSISTENT,
        notes=[f"cup pairing is nondegenerate; isomorphism with the S1 x Sigma_{(b1 - 1) // 2} form is not decided"],
    )


def check_theorem_1_3(d: ManifoldDescriptor) -> ObstructionReport:
    """Mod p cup products of a rational homology sphere, p an odd prime dividing |H_1|."""
    if d.beta1 > 0:
        return ObstructionReport(Verdict.INAPPLICABLE, notes=["beta1 > 0"])
    order = d.torsion.torsion_order
    odd = [p for p in primefactors(order) if p % 2]
    if not odd:
        # H^1(M; Z/p) = 0 for every odd p, so the mod p cup products vanish
        return ObstructionReport(Verdict.CONSISTENT, notes=["no odd prime divides |H_1|"])
    forms = {p: f for p, f in sorted(d.cup_forms_mod_p.items()) if p in odd}
    if not forms:
        return ObstructionReport(Verdict.INAPPLICABLE, notes=["no mod p cup form for an odd prime dividing |H_1|"])
    fired = []
    for p, form in forms.items():
        if not form.is_zero():
            text, data = _triple_witness(form)
            fired.append(FiredRule("Thm1.3", f"mod {p} cup product {text}", {"p": p, **data}))
    if fired:
        return ObstructionReport(Verdict.OBSTRUCTED, fired)
    return ObstructionReport(Verdict.CONSISTENT, notes=[f"mod p cup forms vanish for p in {sorted(forms)}"])


def obstruct(d: ManifoldDescriptor) -> ObstructionReport:
    reports = [check_theorem_1_1(d), check_theorem_1_3(d)]
    fired: List[FiredRule] = []
    notes: List[str] = []
    for report in reports:
        fired.extend(report.fired_rules)
        notes.extend(report.notes)
    surgery = d.origin == "surgery"
    for rule in list(fired):
        if (
            rule.tag == "Thm1.1"
            and surgery
            and d.zero_framed
            and d.link_components is not None
            and d.link_components % 2 == 0
        ):
            fired.append(FiredRule("Prop4.2", f"zero surgery on an even link with {rule.witness}", rule.data))
        if rule.tag == "Thm1.3" and surgery:
            fired.append(FiredRule("Prop4.4", f"surgery matrix divisible by {rule.data['p']}; {rule.witness}", rule.data))
    if fired:
        verdict = Verdict.OBSTRUCTED
    elif any(report.verdict is Verdict.CONSISTENT for report in reports):
        verdict = Verdict.CONSISTENT
    else:
        verdict = Verdict.INAPPLICABLE
    report = ObstructionReport(verdict, fired, notes)
    record_verdict(verdict.value, report.tags)
    structured_log("obstruction_verdict", origin=d.origin, beta1=d.beta1, verdict=verdict.value, rules=report.tags)
    return report


def _candidates(form: LinkingForm) -> Dict[Tuple[int, Any], List[Tuple[int, ...]]]:
    grouped: Dict[Tuple[int, Any], List[Tuple[int, ...]]] = {}
    for x in form.elements():
        grouped.setdefault((form.group.element_order(x), form(x, x)), []).append(x)
    return grouped


def _image(images: Sequence[Tuple[int, ...]], coords: Sequence[int], orders: Sequence[int]) -> Tuple[int, ...]:
    total = [0] * len(orders)
    for c, image in zip(coords, images):
        if c:
            for idx, value in enumerate(image):
                total[idx] += c * value
    return tuple(value % d for value, d in zip(total, orders))


def _odd_parts_agree(f1: LinkingForm, f2: LinkingForm) -> Optional[bool]:
    """Compare the local invariants at every odd prime; None when some odd part is singular."""
    for p in primefactors(f1.group.torsion_order):
        if p == 2:
            continue
        a, b = f1.local_invariants(p), f2.local_invariants(p)
        if a is None or b is None:
            return None
        if a != b:
            return False
    return True


def find_isometry(f1: LinkingForm, f2: LinkingForm, cutoff: int = DEFAULT_CUTOFF) -> Optional[List[Tuple[int, ...]]]:
    """Images of the normal generators of T1 in T2 under an isometry, or None."""
    if not f1.group.is_isomorphic(f2.group):
        return None
    size = f1.group.torsion_order
    if size > cutoff:
        raise CutoffExceeded(f"|T| = {size} exceeds the isomorphism cutoff {cutoff}", order=size, cutoff=cutoff)
    if _odd_parts_agree(f1, f2) is False:
        return None
    orders = f1.orders
    candidates = _candidates(f2)
    k = len(orders)
    basis = [tuple(1 if t == i else 0 for t in range(k)) for i in range(k)]
    # a form-preserving map out of a nonsingular form is injective
    check_kernel = not f1.is_nonsingular()
    images: List[Tuple[int, ...]] = []

    def consistent(y: Tuple[int, ...], i: int) -> bool:
        return all(f2(y, previous) == f1(basis[i], basis[j]) for j, previous in enumerate(images))

    def injective() -> bool:
        return len({_image(images, x, f2.orders) for x in f1.elements()}) == size

    def search(i: int) -> bool:
        if i == k:
            return not check_kernel or injective()
        for y in candidates.get((orders[i], f1(basis[i], basis[i])), []):
            if consistent(y, i):
                images.append(y)
                if search(i + 1):
                    return True
                images.pop()
        return False

    with span("linking_form_isometry", order=size):
        found = search(0)
    return list(images) if found else None


def linking_forms_isomorphic(f1: LinkingForm, f2: LinkingForm, cutoff: int = DEFAULT_CUTOFF) -> bool:
    """Odd primary parts are compared by their local invariants; only the 2-primary part is searched."""
    if not f1.group.is_isomorphic(f2.group):
        return False
    with span("linking_form_invariants", order=f1.group.torsion_order):
        odd = _odd_parts_agree(f1, f2)
    if odd is None:
        return find_isometry(f1, f2, cutoff) is not None
    if not odd:
        return False
    two1, two2 = f1.primary_part(2), f2.primary_part(2)
    if not two1.orders:
        return True
    return find_isometry(two1, two2, cutoff) is not None


def _form_kind(form: AlternatingTrilinearForm) -> str:
    return "zero" if form.is_zero() else "nonzero"


def _compare_forms(
    name: str, a: AlternatingTrilinearForm, b: AlternatingTrilinearForm, evidence: List[Evidence]
) -> None:
    if a.dimension != b.dimension:
        return
    if a.is_zero() != b.is_zero():
        evidence.append(Evidence(name, _form_kind(a), _form_kind(b)))
        return
    ra, rb = a.radical_dimension(), b.radical_dimension()
    if ra != rb:
        evidence.append(Evidence(f"{name} radical dimension", str(ra), str(rb)))
    if a.ring == "Z" and b.ring == "Z" and a.content() != b.content():
        evidence.append(Evidence(f"{name} integral content", str(a.content()), str(b.content())))


def distinguish(d1: ManifoldDescriptor, d2: ManifoldDescriptor, cutoff: int = DEFAULT_CUTOFF) -> DistinctionReport:
    evidence: List[Evidence] = []
    caveats: List[str] = []

    if not d1.homology.is_isomorphic(d2.homology):
        evidence.append(Evidence("H_1", d1.homology.describe(), d2.homology.describe()))
    elif d1.linking_form is not None and d2.linking_form is not None:
        try:
            if not linking_forms_isomorphic(d1.linking_form, d2.linking_form, cutoff):
                evidence.append(Evidence("linking form", d1.linking_form.describe(), d2.linking_form.describe()))
        except CutoffExceeded as exc:
            caveats.append(exc.detail)

    if d1.cup_form_q is not None and d2.cup_form_q is not None:
        _compare_forms("rational cup form", d1.cup_form_q, d2.cup_form_q, evidence)
    for p in sorted(set(d1.cup_forms_mod_p) & set(d2.cup_forms_mod_p)):
        _compare_forms(f"mod {p} cup form", d1.cup_forms_mod_p[p], d2.cup_forms_mod_p[p], evidence)

    m1, m2 = d1.milnor_degree, d2.milnor_degree
    if m1 is not None and m2 is not None:
        if isinstance(m1, AtLeast) or isinstance(m2, AtLeast):
            if m1 != m2:
                caveats.append(f"milnor degrees {m1} and {m2} include a lower bound; not compared")
        elif m1 != m2:
            evidence.append(Evidence("milnor degree", str(m1), str(m2)))

    report = DistinctionReport(bool(evidence), evidence, caveats)
    record_distinction(report.distinct)
    structured_log(
        "distinction_verdict", distinct=report.distinct, evidence=[row.invariant for row in evidence]
    )
    return report
