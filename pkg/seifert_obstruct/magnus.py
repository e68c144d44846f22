"""Free-group words, truncated Magnus expansions and Milnor invariants."""
from __future__ import annotations

import itertools
import math
import re
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Dict, Iterable, List, Sequence, Tuple, Union

from .errors import DomainError, IndexOutOfRange, ParseError
from .observability import span

Monomial = Tuple[int, ...]
Letter = Tuple[int, int]

_TOKEN = re.compile(r"\s*(?:x(\d+)(?:\^(-?\d+))?|(1))\s*")


@dataclass(frozen=True)
class FreeWord:
    """A word in x1, x2, ...; letters are (generator index >= 1, +1 or -1)."""

    letters: Tuple[Letter, ...] = ()

    def __post_init__(self) -> None:
        for gen, sign in self.letters:
            if gen < 1 or sign not in (1, -1):
                raise DomainError(f"malformed letter {(gen, sign)}")

    @classmethod
    def identity(cls) -> "FreeWord":
        return cls(())

    @classmethod
    def generator(cls, index: int, power: int = 1) -> "FreeWord":
        sign = 1 if power > 0 else -1
        return cls(((index, sign),) * abs(power))

    @classmethod
    def parse(cls, text: str) -> "FreeWord":
        letters: List[Letter] = []
        pos = 0
        stripped = text.strip()
        if not stripped:
            return cls(())
        while pos < len(text):
            match = _TOKEN.match(text, pos)
            if not match or match.end() == pos:
                if text[pos:].strip() == "":
                    break
                raise ParseError(
                    f"invalid word {text!r}", text=text, position=pos, expected="x<index>[^<power>]"
                )
            if match.group(1):
                letters.extend(cls.generator(int(match.group(1)), int(match.group(2) or 1)).letters)
            pos = match.end()
        return cls(tuple(letters))

    def __mul__(self, other: "FreeWord") -> "FreeWord":
        return FreeWord(self.letters + other.letters)

    def inverse(self) -> "FreeWord":
        return FreeWord(tuple((gen, -sign) for gen, sign in reversed(self.letters)))

    def __pow__(self, n: int) -> "FreeWord":
        base = self if n >= 0 else self.inverse()
        return FreeWord(base.letters * abs(n))

    def reduced(self) -> "FreeWord":
        out: List[Letter] = []
        for letter in self.letters:
            if out and out[-1][0] == letter[0] and out[-1][1] == -letter[1]:
                out.pop()
            else:
                out.append(letter)
        return FreeWord(tuple(out))

    def exponent_sum(self, gen: int) -> int:
        return sum(sign for g, sign in self.letters if g == gen)

    @property
    def max_generator(self) -> int:
        return max((gen for gen, _ in self.letters), default=0)

    def format(self, names: Sequence[str] | None = None) -> str:
        if not self.letters:
            return "1"
        chunks: List[str] = []
        for gen, group in itertools.groupby(self.letters, key=lambda letter: letter):
            power = len(list(group)) * gen[1]
            name = names[gen[0] - 1] if names else f"x{gen[0]}"
            chunks.append(name if power == 1 else f"{name}^{power}")
        return " ".join(chunks)

    def __str__(self) -> str:
        return self.format()


def commutator(a: FreeWord, b: FreeWord) -> FreeWord:
    """[a, b] = a b a^-1 b^-1."""
    return a * b * a.inverse() * b.inverse()


def left_normed(first: FreeWord, *rest: FreeWord) -> FreeWord:
    """[[...[first, r1], r2], ...]."""
    word = first
    for item in rest:
        word = commutator(word, item)
    return word


def right_normed(*items: FreeWord) -> FreeWord:
    """[i1, [i2, [..., [i_{n-1}, i_n]]]]."""
    word = items[-1]
    for item in reversed(items[:-1]):
        word = commutator(item, word)
    return word


@dataclass
class TruncatedSeries:
    """Noncommutative power series in X1, X2, ... with monomials of length <= degree."""

    degree: int
    coefficients: Dict[Monomial, int] = field(default_factory=dict)

    @classmethod
    def one(cls, degree: int) -> "TruncatedSeries":
        return cls(degree, {(): 1})

    def coefficient(self, monomial: Sequence[int]) -> int:
        return self.coefficients.get(tuple(monomial), 0)

    def homogeneous(self, length: int) -> Dict[Monomial, int]:
        return {mono: c for mono, c in self.coefficients.items() if len(mono) == length}

    def truncate(self, degree: int) -> "TruncatedSeries":
        return TruncatedSeries(degree, {m: c for m, c in self.coefficients.items() if len(m) <= degree})

    def __mul__(self, other: "TruncatedSeries") -> "TruncatedSeries":
        degree = min(self.degree, other.degree)
        out: Dict[Monomial, int] = {}
        for left, a in self.coefficients.items():
            room = degree - len(left)
            if room < 0:
                continue
            for right, b in other.coefficients.items():
                if len(right) <= room:
                    key = left + right
                    out[key] = out.get(key, 0) + a * b
        return TruncatedSeries(degree, {m: c for m, c in out.items() if c})

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, TruncatedSeries):
            return NotImplemented
        return self.degree == other.degree and self.coefficients == other.coefficients

    def format(self) -> str:
        if not self.coefficients:
            return "0"
        terms = []
        for mono in sorted(self.coefficients, key=lambda m: (len(m), m)):
            c = self.coefficients[mono]
            body = "".join(f"X{i}" for i in mono) or "1"
            if mono and abs(c) == 1:
                terms.append(("-" if c < 0 else "+") + body)
            else:
                terms.append(f"{c:+d}" + ("" if not mono else body))
        return " ".join(terms).lstrip("+")


def _times_letter(coeffs: Dict[Monomial, int], gen: int, sign: int, degree: int) -> Dict[Monomial, int]:
    out = dict(coeffs)
    for mono, c in coeffs.items():
        room = degree - len(mono)
        ext = mono
        term = c
        for _ in range(room if sign < 0 else min(room, 1)):
            ext = ext + (gen,)
            term = term if sign > 0 else -term
            out[ext] = out.get(ext, 0) + term
    return {m: c for m, c in out.items() if c}


@lru_cache(maxsize=512)
def _expand(word: FreeWord, degree: int) -> Tuple[Tuple[Monomial, int], ...]:
    coeffs: Dict[Monomial, int] = {(): 1}
    for gen, sign in word.letters:
        coeffs = _times_letter(coeffs, gen, sign, degree)
    return tuple(coeffs.items())


def magnus_expansion(word: FreeWord, degree: int) -> TruncatedSeries:
    if degree < 1:
        raise DomainError(f"degree bound must be at least 1, got {degree}")
    with span("magnus_expansion", letters=len(word.letters), degree=degree):
        return TruncatedSeries(degree, dict(_expand(word, degree)))


@dataclass(frozen=True)
class AtLeast:
    """Lower bound for a Milnor degree that was not reached under the length cap."""

    bound: int

    def __str__(self) -> str:
        return f">={self.bound}"


MilnorDegree = Union[int, AtLeast]


@dataclass(frozen=True)
class MuBar:
    value: int
    modulus: int

    def is_nonzero(self) -> bool:
        return self.value != 0


def _check_index(longitudes: Sequence[FreeWord], index: Sequence[int]) -> None:
    if len(index) < 2:
        raise IndexOutOfRange(f"multi-index {tuple(index)} must have length at least 2", index=list(index))
    n = len(longitudes)
    for i in index:
        if not 1 <= i <= n:
            raise IndexOutOfRange(
                f"index {i} outside component range 1..{n}", index=list(index), components=n
            )


class MuTable:
    """Magnus coefficients of every longitude up to a fixed degree."""

    def __init__(self, longitudes: Sequence[FreeWord], degree: int):
        self.degree = degree
        self.expansions = [dict(_expand(word, degree)) for word in longitudes]

    def mu(self, index: Sequence[int]) -> int:
        return self.expansions[index[-1] - 1].get(tuple(index[:-1]), 0)

    def delta(self, index: Sequence[int]) -> int:
        k = len(index)
        g = 0
        seen = set()
        for size in range(2, k):
            for positions in itertools.combinations(range(k), size):
                sub = tuple(index[p] for p in positions)
                for shift in range(size):
                    rotated = sub[shift:] + sub[:shift]
                    if rotated in seen:
                        continue
                    seen.add(rotated)
                    g = math.gcd(g, self.mu(rotated))
                    if g == 1:
                        return 1
        return g

    def mu_bar(self, index: Sequence[int]) -> MuBar:
        value = self.mu(index)
        modulus = self.delta(index)
        return MuBar(value % modulus if modulus else value, modulus)


def mu(longitudes: Sequence[FreeWord], index: Sequence[int]) -> int:
    """Coefficient of X_{i1}...X_{ik} in the expansion of longitude j, for index (i1, ..., ik, j)."""
    index = tuple(index)
    _check_index(longitudes, index)
    return MuTable(longitudes, len(index) - 1).mu(index)


def mu_bar(longitudes: Sequence[FreeWord], index: Sequence[int]) -> MuBar:
    index = tuple(index)
    _check_index(longitudes, index)
    return MuTable(longitudes, len(index) - 1).mu_bar(index)


def multi_indices(components: int, length: int) -> Iterable[Tuple[int, ...]]:
    return itertools.product(range(1, components + 1), repeat=length)


def milnor_degree(longitudes: Sequence[FreeWord], max_len: int) -> MilnorDegree:
    """Shortest |I| <= max_len with a nonvanishing mu-bar(I), else AtLeast(max_len + 1)."""
    if max_len < 2:
        raise DomainError(f"max_len must be at least 2, got {max_len}")
    n = len(longitudes)
    if n == 0:
        return AtLeast(max_len + 1)
    with span("milnor_degree", components=n, max_len=max_len):
        table = MuTable(longitudes, max_len - 1)
        for length in range(2, max_len + 1):
            for index in multi_indices(n, length):
                if table.mu(index) and table.mu_bar(index).is_nonzero():
                    return length
    return AtLeast(max_len + 1)


def nonvanishing_indices(longitudes: Sequence[FreeWord], length: int) -> List[Tuple[Tuple[int, ...], MuBar]]:
    table = MuTable(longitudes, length - 1)
    found = []
    for index in multi_indices(len(longitudes), length):
        if table.mu(index):
            value = table.mu_bar(index)
            if value.is_nonzero():
                found.append((index, value))
    return found
