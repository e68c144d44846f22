"""Seifert invariants, fundamental group presentations and homology.

Notation: ``(+g | a1/b1, ..., ak/bk)`` for an orientable base of genus g and
``(-g | ...)`` for a non-orientable base with g crosscaps. Euler number sign
convention: ``e = -sum(b_j / a_j)``.
"""
from __future__ import annotations

import math
import re
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import List, Optional, Tuple

from .errors import DomainError, ParseError, TwoTorsionPresent, UnsupportedBase
from .exactalg import FGAbelianGroup, IntMatrix, cokernel
from .forms import AlternatingTrilinearForm
from .magnus import FreeWord, commutator

MINUS_SIGNS = "-−"


@dataclass(frozen=True)
class SeifertInvariants:
    base_orientable: bool
    genus: int
    fillings: Tuple[Tuple[int, int], ...] = ()

    def __post_init__(self) -> None:
        if self.genus < 0:
            raise DomainError(f"genus must be nonnegative, got {self.genus}")
        if not self.base_orientable and self.genus < 1:
            raise DomainError("a non-orientable base needs genus at least 1")
        for alpha, beta in self.fillings:
            if alpha < 1:
                raise DomainError(f"alpha must be at least 1, got {alpha}/{beta}", filling=[alpha, beta])
            if beta == 0:
                raise DomainError(f"beta must be nonzero, got {alpha}/{beta}", filling=[alpha, beta])
            if math.gcd(alpha, beta) != 1:
                raise DomainError(f"filling {alpha}/{beta} is not in lowest terms", filling=[alpha, beta])

    @property
    def k(self) -> int:
        return len(self.fillings)

    def __str__(self) -> str:
        return format_seifert(self)


class _Scanner:
    def __init__(self, text: str):
        self.text = text
        self.pos = 0

    def skip(self) -> None:
        while self.pos < len(self.text) and self.text[self.pos].isspace():
            self.pos += 1

    def peek(self) -> str:
        self.skip()
        return self.text[self.pos] if self.pos < len(self.text) else ""

    def fail(self, expected: str) -> ParseError:
        found = self.peek() or "end of input"
        return ParseError(
            f"unexpected {found!r} at position {self.pos}", text=self.text, position=self.pos, expected=expected
        )

    def expect(self, char: str) -> None:
        if self.peek() != char:
            raise self.fail(repr(char))
        self.pos += 1

    def integer(self, signed: bool) -> int:
        self.skip()
        sign = 1
        head = self.peek()
        if signed and head and head in MINUS_SIGNS + "+":
            sign = -1 if head in MINUS_SIGNS else 1
            self.pos += 1
        match = re.compile(r"\d+").match(self.text, self.pos)
        if not match:
            raise self.fail("integer")
        self.pos = match.end()
        return sign * int(match.group())


def parse_seifert(text: str) -> SeifertInvariants:
    """Parse ``'(' SIGN? INT '|' (FRACTION (',' FRACTION)*)? ')'``."""
    scan = _Scanner(text)
    scan.expect("(")
    orientable = True
    head = scan.peek()
    if head and head in MINUS_SIGNS:
        orientable = False
        scan.pos += 1
    elif head == "+":
        scan.pos += 1
    genus = scan.integer(signed=False)
    scan.expect("|")
    fillings: List[Tuple[int, int]] = []
    if scan.peek() != ")":
        while True:
            alpha = scan.integer(signed=True)
            scan.expect("/")
            beta = scan.integer(signed=True)
            fillings.append((alpha, beta))
            if scan.peek() == ",":
                scan.pos += 1
                continue
            break
    scan.expect(")")
    if scan.peek():
        raise scan.fail("end of input")
    return SeifertInvariants(orientable, genus, tuple(fillings))


def format_seifert(s: SeifertInvariants) -> str:
    sign = "+" if s.base_orientable else "-"
    body = ", ".join(f"{alpha}/{beta}" for alpha, beta in s.fillings)
    return f"({sign}{s.genus} | {body})"


@dataclass(frozen=True)
class GroupPresentation:
    generators: Tuple[str, ...]
    relators: Tuple[FreeWord, ...]

    def relator_strings(self) -> List[str]:
        return [word.format(self.generators) for word in self.relators]

    def format(self) -> str:
        return f"<{', '.join(self.generators)} | {', '.join(self.relator_strings())}>"


def generator_names(s: SeifertInvariants) -> Tuple[str, ...]:
    """Generator order used by presentations and relation matrices: x's, y's, mu's, then t."""
    names = [f"x{i}" for i in range(1, s.genus + 1)]
    if s.base_orientable:
        names += [f"y{i}" for i in range(1, s.genus + 1)]
    names += [f"mu{j}" for j in range(1, s.k + 1)]
    return tuple(names + ["t"])


def fundamental_group_presentation(s: SeifertInvariants) -> GroupPresentation:
    names = generator_names(s)
    index = {name: i + 1 for i, name in enumerate(names)}

    def gen(name: str, power: int = 1) -> FreeWord:
        return FreeWord.generator(index[name], power)

    t = gen("t")
    xs = [gen(f"x{i}") for i in range(1, s.genus + 1)]
    mus = [gen(f"mu{j}") for j in range(1, s.k + 1)]
    relators: List[FreeWord] = []
    if s.base_orientable:
        ys = [gen(f"y{i}") for i in range(1, s.genus + 1)]
        relators += [commutator(x, t) for x in xs]
        relators += [commutator(y, t) for y in ys]
    else:
        relators += [x * t * x.inverse() * t for x in xs]
    relators += [commutator(mu, t) for mu in mus]
    for j, (alpha, beta) in enumerate(s.fillings, start=1):
        relators.append(gen(f"mu{j}", alpha) * gen("t", beta))
    surface = FreeWord.identity()
    if s.base_orientable:
        for x, y in zip(xs, ys):
            surface = surface * commutator(x, y)
    else:
        for x in xs:
            surface = surface * x * x
    for mu in mus:
        surface = surface * mu
    relators.append(surface)
    return GroupPresentation(names, tuple(relators))


def abelianize(presentation: GroupPresentation) -> IntMatrix:
    """Exponent-sum matrix of the relators: one row per relator, one column per generator."""
    width = len(presentation.generators)
    rows = [[word.exponent_sum(g) for g in range(1, width + 1)] for word in presentation.relators]
    return IntMatrix.from_rows(rows, width)


def relation_matrix(s: SeifertInvariants) -> IntMatrix:
    """H_1 relations read off directly: a_j mu_j + b_j t, the surface relation, and 2t for a crosscap base."""
    names = generator_names(s)
    width = len(names)
    col = {name: i for i, name in enumerate(names)}
    rows: List[List[int]] = []
    for j, (alpha, beta) in enumerate(s.fillings, start=1):
        row = [0] * width
        row[col[f"mu{j}"]] = alpha
        row[col["t"]] = beta
        rows.append(row)
    surface = [0] * width
    for j in range(1, s.k + 1):
        surface[col[f"mu{j}"]] = 1
    if not s.base_orientable:
        for i in range(1, s.genus + 1):
            surface[col[f"x{i}"]] = 2
        fiber = [0] * width
        fiber[col["t"]] = 2
        rows.append(fiber)
    rows.append(surface)
    return IntMatrix.from_rows(rows, width)


@lru_cache(maxsize=256)
def first_homology(s: SeifertInvariants) -> FGAbelianGroup:
    return cokernel(relation_matrix(s))


def regular_fiber_order(s: SeifertInvariants) -> float | int:
    group = first_homology(s)
    return group.element_order(group.image_of(len(generator_names(s)) - 1))


def betti_one(s: SeifertInvariants) -> int:
    return first_homology(s).rank


def has_two_torsion(s: SeifertInvariants) -> bool:
    return first_homology(s).has_even_torsion()


def euler_number(s: SeifertInvariants) -> Fraction:
    if not s.base_orientable:
        raise UnsupportedBase("the Euler number is only used for an orientable base", seifert=format_seifert(s))
    return -sum((Fraction(beta, alpha) for alpha, beta in s.fillings), Fraction(0))


@dataclass(frozen=True)
class CohomologyRingType:
    tag: str
    parameter: Optional[int] = None

    PRODUCT = "ProductS1Sigma"
    CONNECTED_SUM = "ConnectedSumS1S2"
    UNCLASSIFIED = "Unclassified"

    def describe(self) -> str:
        if self.tag == self.PRODUCT:
            return f"S1 x Sigma_{self.parameter}"
        if self.tag == self.CONNECTED_SUM:
            return f"#{self.parameter} S1 x S2"
        return "unclassified"


def rational_cohomology_type(s: SeifertInvariants) -> CohomologyRingType:
    if has_two_torsion(s):
        return CohomologyRingType(CohomologyRingType.UNCLASSIFIED)
    b1 = betti_one(s)
    if b1 % 2:
        return CohomologyRingType(CohomologyRingType.PRODUCT, (b1 - 1) // 2)
    return CohomologyRingType(CohomologyRingType.CONNECTED_SUM, b1)


def standard_triple_cup_form(s: SeifertInvariants) -> AlternatingTrilinearForm:
    """Cup form on the basis (t, a1, b1, ..., ag, bg), with f(t, a_i, b_i) = 1 when the fiber has infinite order."""
    if not s.base_orientable:
        raise UnsupportedBase("cup form of a non-orientable base is not classified", seifert=format_seifert(s))
    if has_two_torsion(s):
        raise TwoTorsionPresent("H_1 has 2-torsion", seifert=format_seifert(s))
    b1 = betti_one(s)
    if b1 % 2 == 0:
        return AlternatingTrilinearForm.zero(b1, "Q")
    values = {(0, 2 * i - 1, 2 * i): 1 for i in range(1, s.genus + 1)}
    return AlternatingTrilinearForm.from_values(b1, values, "Q")


def negative_continued_fraction(alpha: int, beta: int) -> Tuple[int, ...]:
    """alpha/beta = c0 - 1/(c1 - 1/(c2 - ...)) with c_i = ceil of the running remainder."""
    x = Fraction(alpha, beta)
    coefficients = []
    while True:
        c = math.ceil(x)
        coefficients.append(c)
        if c == x:
            return tuple(coefficients)
        x = 1 / (c - x)
