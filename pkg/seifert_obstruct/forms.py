"""Linking forms on torsion groups and alternating trilinear (cup product) forms."""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, Iterator, List, Mapping, Optional, Sequence, Tuple, Union

from sympy import Matrix, multiplicity
from sympy.ntheory import legendre_symbol
from sympy.polys.domains import GF
from sympy.polys.matrices import DomainMatrix

from .errors import DomainError
from .exactalg import FGAbelianGroup, IntMatrix, cokernel

Scalar = Union[int, Fraction]
Triple = Tuple[int, int, int]

RINGS = ("Z", "Q", "Zp")


def _mod_one(value: Fraction) -> Fraction:
    return value - math.floor(value)


@dataclass(frozen=True)
class LinkingForm:
    """Symmetric pairing T x T -> Q/Z, stored on the normal generators of T."""

    group: FGAbelianGroup
    gram: Tuple[Tuple[Fraction, ...], ...]

    def __post_init__(self) -> None:
        if self.group.rank:
            raise DomainError("linking forms live on torsion groups")
        k = len(self.group.torsion)
        if len(self.gram) != k or any(len(row) != k for row in self.gram):
            raise DomainError(f"gram matrix must be {k}x{k}")
        for i, d in enumerate(self.group.torsion):
            for value in self.gram[i]:
                if (value * d).denominator != 1:
                    raise DomainError(f"pairing of a generator of order {d} with value {value} is not defined")

    @classmethod
    def build(cls, group: FGAbelianGroup, gram: Sequence[Sequence[Fraction]]) -> "LinkingForm":
        return cls(group, tuple(tuple(_mod_one(Fraction(v)) for v in row) for row in gram))

    @classmethod
    def trivial(cls) -> "LinkingForm":
        return cls(FGAbelianGroup.trivial(), ())

    @classmethod
    def on_generators(cls, orders: Sequence[int], gram: Sequence[Sequence[Fraction]]) -> "LinkingForm":
        """Form given on generators of the listed orders, rewritten on the normal generators."""
        width = len(orders)
        relations = [[d if j == i else 0 for j in range(width)] for i, d in enumerate(orders)]
        group = cokernel(IntMatrix.from_rows(relations, width))
        return cls.build(group, transport(gram, group.gen_lift))

    @property
    def orders(self) -> Tuple[int, ...]:
        return self.group.torsion

    def __call__(self, x: Sequence[int], y: Sequence[int]) -> Fraction:
        total = Fraction(0)
        for i, a in enumerate(x):
            if not a:
                continue
            for j, b in enumerate(y):
                if b:
                    total += a * b * self.gram[i][j]
        return _mod_one(total)

    def elements(self) -> Iterator[Tuple[int, ...]]:
        return itertools.product(*(range(d) for d in self.orders))

    def is_symmetric(self) -> bool:
        k = len(self.gram)
        return all(self.gram[i][j] == self.gram[j][i] for i in range(k) for j in range(k))

    def is_nonsingular(self) -> bool:
        """The adjoint T -> Hom(T, Q/Z) is injective; checked by enumeration."""
        k = len(self.orders)
        for x in self.elements():
            if any(x) and all(self(x, e) == 0 for e in _unit_vectors(k)):
                return False
        return True

    def _primary_generators(self, p: int) -> List[Tuple[int, ...]]:
        k = len(self.orders)
        gens = []
        for i, d in enumerate(self.orders):
            v = multiplicity(p, d)
            if v:
                gens.append(tuple(d // p**v if j == i else 0 for j in range(k)))
        return gens

    def primary_part(self, p: int) -> "LinkingForm":
        """Restriction to the p-primary subgroup, which is an orthogonal summand."""
        gens = self._primary_generators(p)
        if not gens:
            return LinkingForm.trivial()
        orders = [self.group.element_order(g) for g in gens]
        return LinkingForm.on_generators(orders, [[self(g, h) for h in gens] for g in gens])

    def local_invariants(self, p: int) -> Optional[Dict[int, Tuple[int, int]]]:
        """Jordan data of the p-primary part for an odd prime p.

        Maps each exponent a to (rank, Legendre symbol of the determinant) of the
        homogeneous Z/p^a block of an orthogonal splitting. Two nonsingular forms on
        isomorphic groups are isometric exactly when these agree for every odd p
        (the 2-primary parts aside). Returns None when the p-part is singular.
        """
        if p % 2 == 0:
            raise DomainError("local invariants are defined here for odd primes only")

        def exponent(x: Tuple[int, ...]) -> int:
            return multiplicity(p, self.group.element_order(x))

        def exact(value: Fraction, a: int) -> bool:
            return value.denominator == p**a

        gens = self._primary_generators(p)
        units: Dict[int, List[int]] = {}
        while gens:
            a = max(exponent(g) for g in gens)
            top = [g for g in gens if exponent(g) == a]
            pivot = next((g for g in top if exact(self(g, g), a)), None)
            if pivot is None:
                pair = next(((g, h) for g in top for h in gens if exact(self(g, h), a)), None)
                if pair is None:
                    return None
                pivot = self.group.normalize([s + t for s, t in zip(*pair)])
            modulus = p**a
            u = self(pivot, pivot).numerator % modulus
            units.setdefault(a, []).append(u)
            inverse = pow(u, -1, modulus)
            # split off <pivot>: g -> g - c*pivot is orthogonal to it
            rest = []
            for g in gens:
                c = ((self(g, pivot) * modulus).numerator * inverse) % modulus
                g = self.group.normalize([s - c * t for s, t in zip(g, pivot)])
                if any(g):
                    rest.append(g)
            gens = rest
        return {a: (len(us), legendre_symbol(math.prod(us) % p, p)) for a, us in sorted(units.items())}

    def orthogonal_sum(self, other: "LinkingForm") -> "LinkingForm":
        k, l = len(self.orders), len(other.orders)
        gram = [[Fraction(0)] * (k + l) for _ in range(k + l)]
        for i in range(k):
            for j in range(k):
                gram[i][j] = self.gram[i][j]
        for i in range(l):
            for j in range(l):
                gram[k + i][k + j] = other.gram[i][j]
        return LinkingForm.on_generators(self.orders + other.orders, gram)

    def negated(self) -> "LinkingForm":
        return LinkingForm.build(self.group, [[-v for v in row] for row in self.gram])

    def describe(self) -> str:
        if not self.orders:
            return "0"
        rows = ["[" + ", ".join(str(v) for v in row) + "]" for row in self.gram]
        return f"on {self.group.describe()}: " + "; ".join(rows)


def _unit_vectors(k: int) -> Iterator[Tuple[int, ...]]:
    for i in range(k):
        yield tuple(1 if j == i else 0 for j in range(k))


def transport(gram: Sequence[Sequence[Fraction]], lift: Sequence[Sequence[int]]) -> List[List[Fraction]]:
    """L G L^T, the gram matrix on generators written (as rows of L) in the old ones."""
    out = []
    for row_a in lift:
        out_row = []
        for row_b in lift:
            total = Fraction(0)
            for k, a in enumerate(row_a):
                if not a:
                    continue
                for l, b in enumerate(row_b):
                    if b:
                        total += a * b * Fraction(gram[k][l])
            out_row.append(total)
        out.append(out_row)
    return out


def _sort_with_sign(triple: Sequence[int]) -> Tuple[int, Triple]:
    items = list(triple)
    sign = 1
    for i in range(len(items)):
        for j in range(len(items) - 1 - i):
            if items[j] > items[j + 1]:
                items[j], items[j + 1] = items[j + 1], items[j]
                sign = -sign
    return sign, (items[0], items[1], items[2])


@dataclass(frozen=True)
class AlternatingTrilinearForm:
    """Alternating trilinear form on a free module of rank ``dimension``.

    Only the structure constants f(e_i, e_j, e_k) with i < j < k are stored,
    zero entries dropped. ``ring`` is "Z", "Q" or "Zp" (with ``modulus`` p).
    """

    dimension: int
    ring: str
    constants: Tuple[Tuple[Triple, Scalar], ...]
    modulus: Optional[int] = None

    def __post_init__(self) -> None:
        if self.ring not in RINGS:
            raise DomainError(f"unknown coefficient ring {self.ring!r}")
        if (self.ring == "Zp") != (self.modulus is not None):
            raise DomainError("a modulus is required exactly for ring Zp")
        for (i, j, k), _ in self.constants:
            if not 0 <= i < j < k < self.dimension:
                raise DomainError(f"structure constant index {(i, j, k)} out of range")

    @classmethod
    def from_values(
        cls,
        dimension: int,
        values: Mapping[Sequence[int], Scalar],
        ring: str = "Q",
        modulus: Optional[int] = None,
    ) -> "AlternatingTrilinearForm":
        collected: Dict[Triple, Scalar] = {}
        for triple, value in values.items():
            if len(set(triple)) < 3:
                if value:
                    raise DomainError(f"alternating form cannot be nonzero on repeated index {tuple(triple)}")
                continue
            sign, key = _sort_with_sign(triple)
            collected[key] = collected.get(key, 0) + sign * value
        return cls._normalized(dimension, collected, ring, modulus)

    @classmethod
    def _normalized(cls, dimension, collected, ring, modulus) -> "AlternatingTrilinearForm":
        cleaned = []
        for key in sorted(collected):
            value = collected[key]
            if ring == "Zp":
                value = int(value) % modulus
            elif ring == "Z":
                if Fraction(value).denominator != 1:
                    raise DomainError(f"non-integral value {value} for a form over Z")
                value = int(value)
            else:
                value = Fraction(value)
            if value:
                cleaned.append((key, value))
        return cls(dimension, ring, tuple(cleaned), modulus)

    @classmethod
    def zero(cls, dimension: int, ring: str = "Q", modulus: Optional[int] = None) -> "AlternatingTrilinearForm":
        return cls(dimension, ring, (), modulus)

    @property
    def values(self) -> Dict[Triple, Scalar]:
        return dict(self.constants)

    def value(self, i: int, j: int, k: int) -> Scalar:
        if len({i, j, k}) < 3:
            return 0
        sign, key = _sort_with_sign((i, j, k))
        value = self.values.get(key, 0)
        if self.ring == "Zp":
            return (sign * value) % self.modulus
        return sign * value

    def evaluate(self, u: Sequence[Scalar], v: Sequence[Scalar], w: Sequence[Scalar]) -> Scalar:
        for vec in (u, v, w):
            if len(vec) != self.dimension:
                raise DomainError(f"expected vectors of length {self.dimension}")
        total: Scalar = 0
        for (i, j, k), c in self.constants:
            minor = (
                u[i] * (v[j] * w[k] - v[k] * w[j])
                - u[j] * (v[i] * w[k] - v[k] * w[i])
                + u[k] * (v[i] * w[j] - v[j] * w[i])
            )
            total += c * minor
        if self.ring == "Zp":
            return int(total) % self.modulus
        return total

    def is_zero(self) -> bool:
        return not self.constants

    def nonzero_witness(self) -> Optional[Tuple[Triple, Scalar]]:
        return self.constants[0] if self.constants else None

    def block_sum(self, other: "AlternatingTrilinearForm") -> "AlternatingTrilinearForm":
        ring, modulus = _combined_ring(self, other)
        shifted = {(i + self.dimension, j + self.dimension, k + self.dimension): c for (i, j, k), c in other.constants}
        merged = {**self.values, **shifted}
        return AlternatingTrilinearForm._normalized(self.dimension + other.dimension, merged, ring, modulus)

    def pullback(self, basis: Sequence[Sequence[Scalar]]) -> "AlternatingTrilinearForm":
        """The form on the span of ``basis`` (vectors in the current coordinates)."""
        n = len(basis)
        values = {
            (i, j, k): self.evaluate(basis[i], basis[j], basis[k])
            for i, j, k in itertools.combinations(range(n), 3)
        }
        return AlternatingTrilinearForm._normalized(n, values, self.ring, self.modulus)

    def reduce_mod(self, p: int) -> "AlternatingTrilinearForm":
        if self.ring == "Q":
            raise DomainError("only integral forms reduce mod p")
        return AlternatingTrilinearForm._normalized(self.dimension, self.values, "Zp", p)

    def as_rational(self) -> "AlternatingTrilinearForm":
        if self.ring == "Zp":
            raise DomainError("mod-p forms do not lift to Q")
        return AlternatingTrilinearForm._normalized(self.dimension, self.values, "Q", None)

    def _contraction_rows(self) -> List[List[Scalar]]:
        pairs = list(itertools.combinations(range(self.dimension), 2))
        return [[self.value(i, j, k) for j, k in pairs] for i in range(self.dimension)]

    def radical_dimension(self) -> int:
        """dim of {a : f(a, ., .) = 0}."""
        n = self.dimension
        if n < 3 or self.is_zero():
            return n
        rows = self._contraction_rows()
        if self.ring == "Zp":
            field = GF(self.modulus)
            dm = DomainMatrix([[field(int(v)) for v in row] for row in rows], (n, len(rows[0])), field)
            return n - dm.rank()
        return n - Matrix(rows).rank()

    def radical_basis(self) -> List[Tuple[Fraction, ...]]:
        """A rational basis of the radical; for Zp forms use ``radical_dimension``."""
        if self.ring == "Zp":
            raise DomainError("radical basis is only computed over Q")
        n = self.dimension
        if n < 3 or self.is_zero():
            return [tuple(Fraction(int(i == j)) for j in range(n)) for i in range(n)]
        kernel = Matrix(self._contraction_rows()).T.nullspace()
        basis = []
        for vec in kernel:
            scale = math.lcm(*(Fraction(str(entry)).denominator for entry in vec))
            basis.append(tuple(Fraction(str(entry)) * scale for entry in vec))
        return basis

    def content(self) -> int:
        """gcd of all values of an integral form; 0 for the zero form."""
        if self.ring != "Z":
            raise DomainError("content is defined for forms over Z")
        return math.gcd(*(int(c) for _, c in self.constants)) if self.constants else 0

    def triples(self) -> List[Tuple[int, int, int, Scalar]]:
        return [(i, j, k, c) for (i, j, k), c in self.constants]

    def describe(self) -> str:
        ring = f"Z/{self.modulus}" if self.ring == "Zp" else self.ring
        if self.is_zero():
            return f"zero form of dimension {self.dimension} over {ring}"
        terms = ", ".join(f"f(e{i + 1},e{j + 1},e{k + 1})={c}" for (i, j, k), c in self.constants)
        return f"dimension {self.dimension} over {ring}: {terms}"


def _combined_ring(a: AlternatingTrilinearForm, b: AlternatingTrilinearForm) -> Tuple[str, Optional[int]]:
    if a.ring == b.ring and a.modulus == b.modulus:
        return a.ring, a.modulus
    if {a.ring, b.ring} == {"Z", "Q"}:
        return "Q", None
    if a.ring == "Zp" and b.ring == "Zp":
        raise DomainError(f"cannot sum forms mod {a.modulus} and mod {b.modulus}")
    raise DomainError(f"cannot sum forms over {a.ring} and {b.ring}")
