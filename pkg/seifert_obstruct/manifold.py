"""Surgery presentations and the homology cobordism invariant bundle."""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

from sympy import isprime, primefactors

from .errors import (
    DomainError,
    EvenPrime,
    MatrixNotDivisibleByP,
    MissingLinkData,
    NonZeroLinkingMatrix,
    NotRationalHomologySphere,
    UnsupportedBase,
)
from .exactalg import FGAbelianGroup, IntMatrix, cokernel, rational_inverse
from .forms import AlternatingTrilinearForm, LinkingForm, transport
from .links import LinkCatalogEntry, unlink
from .magnus import AtLeast, MilnorDegree, MuTable, milnor_degree
from .observability import record_descriptor, span, structured_log
from .seifert import (
    CohomologyRingType,
    SeifertInvariants,
    betti_one,
    first_homology,
    format_seifert,
    has_two_torsion,
    negative_continued_fraction,
    rational_cohomology_type,
    standard_triple_cup_form,
)


@dataclass(frozen=True)
class SurgeryPresentation:
    """Integral surgery on a link in S^3: framings on the diagonal, linking numbers off it."""

    matrix: IntMatrix
    link: Optional[LinkCatalogEntry] = None

    def __post_init__(self) -> None:
        if not self.matrix.is_square or not self.matrix.is_symmetric():
            raise DomainError("surgery matrix must be square and symmetric")
        if self.link is not None and self.link.linking_matrix != self.matrix:
            raise DomainError(f"surgery matrix does not match the linking matrix of {self.link.name}")

    @classmethod
    def from_link(cls, link: LinkCatalogEntry) -> "SurgeryPresentation":
        return cls(link.linking_matrix, link)

    @property
    def n(self) -> int:
        return self.matrix.rows

    @property
    def label(self) -> str:
        return self.link.name if self.link else f"matrix{self.matrix.to_rows()}"

    def divisible_by(self, p: int) -> bool:
        return all(value % p == 0 for value in self.matrix.entries)


def h1_from_surgery(sp: SurgeryPresentation) -> FGAbelianGroup:
    return cokernel(sp.matrix)


def linking_form_from_surgery(sp: SurgeryPresentation) -> LinkingForm:
    """lambda(m_i, m_j) = -(A^-1)_ij mod 1 on meridians, rewritten on the normal generators of coker A."""
    if sp.matrix.determinant() == 0:
        raise NotRationalHomologySphere("surgery matrix is singular", surgery=sp.label)
    inverse = rational_inverse(sp.matrix)
    group = h1_from_surgery(sp)
    negated = [[-value for value in row] for row in inverse]
    return LinkingForm.build(group, transport(negated, group.gen_lift))


def plumbing_matrix(s: SeifertInvariants) -> IntMatrix:
    """Star-shaped plumbing: a central 0-framed vertex and one chain per filling."""
    if not s.base_orientable or s.genus:
        raise UnsupportedBase("plumbing is built for an orientable genus 0 base", seifert=format_seifert(s))
    weights: List[int] = [0]
    edges: List[Tuple[int, int]] = []
    for alpha, beta in s.fillings:
        previous = 0
        for c in negative_continued_fraction(alpha, beta):
            weights.append(c)
            edges.append((previous, len(weights) - 1))
            previous = len(weights) - 1
    size = len(weights)
    rows = [[weights[i] if i == j else 0 for j in range(size)] for i in range(size)]
    for a, b in edges:
        rows[a][b] = rows[b][a] = 1
    return IntMatrix.from_rows(rows, size)


def seifert_linking_form(s: SeifertInvariants) -> LinkingForm:
    if not s.base_orientable:
        raise UnsupportedBase("linking form is computed for an orientable base", seifert=format_seifert(s))
    if s.genus or betti_one(s):
        raise NotRationalHomologySphere("H_1 is infinite", seifert=format_seifert(s))
    return linking_form_from_surgery(SurgeryPresentation(plumbing_matrix(s)))


def _triple_values(sp: SurgeryPresentation) -> Dict[Tuple[int, int, int], int]:
    table = MuTable(sp.link.longitudes, 2)
    return {
        (i, j, k): table.mu_bar((i + 1, j + 1, k + 1)).value
        for i, j, k in itertools.combinations(range(sp.n), 3)
    }


def cup_form_zero_surgery(sp: SurgeryPresentation) -> AlternatingTrilinearForm:
    """Cup form of zero surgery on a link with vanishing linking numbers: f(e_i, e_j, e_k) = mu-bar(ijk)."""
    if not sp.matrix.is_zero():
        raise NonZeroLinkingMatrix("cup form needs zero framings and linking numbers", surgery=sp.label)
    if sp.link is None:
        raise MissingLinkData("cup form needs the link longitudes", surgery=sp.label)
    return AlternatingTrilinearForm.from_values(sp.n, _triple_values(sp), "Z")


def cup_form_mod_p(sp: SurgeryPresentation, p: int) -> AlternatingTrilinearForm:
    if p == 2:
        raise EvenPrime("mod 2 cup forms are not supported", p=p)
    if p < 2 or not isprime(p):
        raise DomainError(f"{p} is not a prime", p=p)
    if sp.link is None:
        raise MissingLinkData("mod p cup form needs the link longitudes", surgery=sp.label)
    if not sp.divisible_by(p):
        raise MatrixNotDivisibleByP(f"surgery matrix is not divisible by {p}", surgery=sp.label, p=p)
    return AlternatingTrilinearForm.from_values(sp.n, _triple_values(sp), "Zp", p)


@dataclass(frozen=True)
class DescriptorOptions:
    """None computes an invariant when it applies, True demands it, False skips it."""

    linking_form: Optional[bool] = None
    cup_form: Optional[bool] = None
    mod_primes: Optional[Tuple[int, ...]] = None
    milnor_cap: Optional[int] = 6

    def __post_init__(self) -> None:
        if self.milnor_cap is not None and self.milnor_cap < 2:
            raise DomainError(f"milnor cap must be at least 2, got {self.milnor_cap}")


@dataclass(frozen=True)
class ManifoldDescriptor:
    beta1: int
    torsion: FGAbelianGroup
    linking_form: Optional[LinkingForm] = None
    cup_form_q: Optional[AlternatingTrilinearForm] = None
    cup_forms_mod_p: Dict[int, AlternatingTrilinearForm] = field(default_factory=dict)
    milnor_degree: Optional[MilnorDegree] = None
    ring_type: Optional[CohomologyRingType] = field(default=None, compare=False)
    origin: str = field(default="unknown", compare=False)
    link_components: Optional[int] = field(default=None, compare=False)
    zero_framed: bool = field(default=False, compare=False)
    provenance: Tuple[str, ...] = field(default=(), compare=False)

    def __post_init__(self) -> None:
        if self.torsion.rank:
            raise DomainError("torsion group must be finite")
        if self.cup_form_q is not None and self.cup_form_q.dimension != self.beta1:
            raise DomainError(f"cup form dimension {self.cup_form_q.dimension} differs from beta1 {self.beta1}")
        for p, form in self.cup_forms_mod_p.items():
            expected = self.beta1 + self.torsion.p_rank(p)
            if form.modulus != p or form.dimension != expected:
                raise DomainError(f"mod {p} cup form must have dimension {expected}")
        if self.linking_form is not None and not self.linking_form.group.is_isomorphic(self.torsion):
            raise DomainError("linking form lives on a different group")

    @property
    def homology(self) -> FGAbelianGroup:
        return FGAbelianGroup(rank=self.beta1, torsion=self.torsion.torsion)

    @property
    def massey_degree(self) -> Optional[MilnorDegree]:
        if self.milnor_degree is None:
            return None
        if isinstance(self.milnor_degree, AtLeast):
            return AtLeast(self.milnor_degree.bound - 1)
        return self.milnor_degree - 1

    @property
    def is_rational_homology_sphere(self) -> bool:
        return self.beta1 == 0


def _auto_primes(sp: SurgeryPresentation) -> Tuple[int, ...]:
    content = math.gcd(*sp.matrix.entries) if sp.matrix.entries else 0
    if content == 0:
        return ()
    return tuple(p for p in primefactors(content) if p != 2)


def descriptor_from_surgery(sp: SurgeryPresentation, options: DescriptorOptions = DescriptorOptions()) -> ManifoldDescriptor:
    with span("descriptor_from_surgery", surgery=sp.label):
        group = h1_from_surgery(sp)
        torsion = group.torsion_part()
        provenance = [f"surgery on {sp.label} with matrix {sp.matrix.to_rows()}"]
        rational_sphere = sp.matrix.determinant() != 0

        linking_form = None
        if options.linking_form is not False:
            if rational_sphere:
                linking_form = linking_form_from_surgery(sp)
                torsion = linking_form.group
            elif options.linking_form:
                raise NotRationalHomologySphere("linking form needs a nonsingular surgery matrix", surgery=sp.label)
            elif not torsion.torsion:
                linking_form = LinkingForm.trivial()

        cup_form = None
        if options.cup_form is not False:
            if rational_sphere:
                cup_form = AlternatingTrilinearForm.zero(0, "Z")
            elif sp.matrix.is_zero() and sp.link is not None:
                cup_form = cup_form_zero_surgery(sp)
            elif options.cup_form:
                cup_form = cup_form_zero_surgery(sp)

        mod_forms: Dict[int, AlternatingTrilinearForm] = {}
        primes = options.mod_primes
        if primes is None:
            primes = _auto_primes(sp) if sp.link is not None else ()
        for p in primes:
            mod_forms[p] = cup_form_mod_p(sp, p)
            provenance.append(f"mod {p} cup form from mu-bar(ijk) mod {p}")

        degree = None
        if options.milnor_cap is not None and sp.link is not None and sp.matrix.is_zero():
            degree = milnor_degree(sp.link.longitudes, options.milnor_cap)
            provenance.append(f"milnor degree searched up to length {options.milnor_cap}")

        descriptor = ManifoldDescriptor(
            beta1=group.rank,
            torsion=torsion,
            linking_form=linking_form,
            cup_form_q=cup_form,
            cup_forms_mod_p=mod_forms,
            milnor_degree=degree,
            origin="surgery",
            link_components=sp.n,
            zero_framed=sp.matrix.is_zero(),
            provenance=tuple(provenance),
        )
    record_descriptor("surgery")
    structured_log("descriptor_built", origin="surgery", source=sp.label, beta1=descriptor.beta1, torsion=torsion.describe())
    return descriptor


def _odd_primes_dividing(order: int) -> List[int]:
    return [p for p in primefactors(order) if p != 2] if order > 1 else []


def descriptor_from_seifert(s: SeifertInvariants) -> ManifoldDescriptor:
    label = format_seifert(s)
    with span("descriptor_from_seifert", seifert=label):
        group = first_homology(s)
        torsion = group.torsion_part()
        provenance = [f"Seifert fibered space {label}"]

        cup_form = None
        if s.base_orientable and not has_two_torsion(s):
            cup_form = standard_triple_cup_form(s)
            provenance.append("standard cup form of a Seifert fibered space")

        linking_form = None
        if s.base_orientable and group.rank == 0:
            linking_form = seifert_linking_form(s)
            torsion = linking_form.group
            provenance.append("linking form from the star-shaped plumbing")
        elif not torsion.torsion:
            linking_form = LinkingForm.trivial()

        mod_forms: Dict[int, AlternatingTrilinearForm] = {}
        if group.rank == 0:
            for p in _odd_primes_dividing(torsion.torsion_order):
                mod_forms[p] = AlternatingTrilinearForm.zero(torsion.p_rank(p), "Zp", p)
            if mod_forms:
                provenance.append("mod p cup products of a Seifert rational homology sphere vanish")

        descriptor = ManifoldDescriptor(
            beta1=group.rank,
            torsion=torsion,
            linking_form=linking_form,
            cup_form_q=cup_form,
            cup_forms_mod_p=mod_forms,
            ring_type=rational_cohomology_type(s),
            origin="seifert",
            provenance=tuple(provenance),
        )
    record_descriptor("seifert")
    structured_log("descriptor_built", origin="seifert", source=label, beta1=descriptor.beta1, torsion=torsion.describe())
    return descriptor


def sphere_descriptor() -> ManifoldDescriptor:
    """S^3: the identity for connected sums."""
    return ManifoldDescriptor(
        beta1=0,
        torsion=FGAbelianGroup.trivial(),
        linking_form=LinkingForm.trivial(),
        cup_form_q=AlternatingTrilinearForm.zero(0, "Z"),
        origin="S3",
        provenance=("S^3",),
    )


def s1xs2_descriptor(milnor_cap: Optional[int] = 6) -> ManifoldDescriptor:
    return descriptor_from_surgery(SurgeryPresentation.from_link(unlink(1)), DescriptorOptions(milnor_cap=milnor_cap))


def _summand_cup_form(d: ManifoldDescriptor) -> Optional[AlternatingTrilinearForm]:
    if d.beta1 == 0:
        return AlternatingTrilinearForm.zero(0, "Z")
    return d.cup_form_q


def _summand_mod_form(d: ManifoldDescriptor, p: int) -> Optional[AlternatingTrilinearForm]:
    if p in d.cup_forms_mod_p:
        return d.cup_forms_mod_p[p]
    if d.beta1 == 0 and d.torsion.p_rank(p) == 0:
        return AlternatingTrilinearForm.zero(0, "Zp", p)
    return None


def combine_milnor(d1: ManifoldDescriptor, d2: ManifoldDescriptor) -> Optional[MilnorDegree]:
    if d1.beta1 == 0 and d2.beta1 == 0:
        # an uncomputed degree of a rational homology sphere is neutral
        known = [m for m in (d1.milnor_degree, d2.milnor_degree) if m is not None]
        if len(known) < 2:
            return known[0] if known else None
        a, b = known
    elif d1.beta1 == 0:
        return d2.milnor_degree
    elif d2.beta1 == 0:
        return d1.milnor_degree
    else:
        a, b = d1.milnor_degree, d2.milnor_degree
        if a is None or b is None:
            return None
    if isinstance(a, AtLeast) and isinstance(b, AtLeast):
        return AtLeast(min(a.bound, b.bound))
    if isinstance(a, AtLeast):
        a, b = b, a
    if isinstance(b, AtLeast):
        return a if a <= b.bound else AtLeast(b.bound)
    return min(a, b)


def connected_sum(d1: ManifoldDescriptor, d2: ManifoldDescriptor) -> ManifoldDescriptor:
    linking_form = None
    torsion = d1.torsion.direct_sum(d2.torsion)
    if d1.linking_form is not None and d2.linking_form is not None:
        linking_form = d1.linking_form.orthogonal_sum(d2.linking_form)
        torsion = linking_form.group

    cup_form = None
    f1, f2 = _summand_cup_form(d1), _summand_cup_form(d2)
    if f1 is not None and f2 is not None:
        cup_form = f1.block_sum(f2)

    mod_forms: Dict[int, AlternatingTrilinearForm] = {}
    for p in sorted(set(d1.cup_forms_mod_p) | set(d2.cup_forms_mod_p)):
        g1, g2 = _summand_mod_form(d1, p), _summand_mod_form(d2, p)
        if g1 is not None and g2 is not None:
            mod_forms[p] = g1.block_sum(g2)

    return ManifoldDescriptor(
        beta1=d1.beta1 + d2.beta1,
        torsion=torsion,
        linking_form=linking_form,
        cup_form_q=cup_form,
        cup_forms_mod_p=mod_forms,
        milnor_degree=combine_milnor(d1, d2),
        origin="connected_sum",
        provenance=d1.provenance + ("#",) + d2.provenance,
    )


def connected_sum_all(descriptors: Sequence[ManifoldDescriptor]) -> ManifoldDescriptor:
    result = sphere_descriptor()
    for d in descriptors:
        result = connected_sum(result, d)
    return result