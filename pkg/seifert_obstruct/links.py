from __future__ import annotations

import json
from dataclasses import dataclass, replace
from functools import lru_cache
from pathlib import Path
from typing import Callable, Dict, Iterable, List, Mapping, Optional, Sequence, Tuple

from .errors import BadParameter, DomainError, UnknownCatalogName
from .exactalg import IntMatrix
from .magnus import FreeWord, commutator, left_normed, mu, right_normed

DEFAULT_LINKS_PATH = Path(__file__).resolve().parent.parent / "data" / "links.json"


@dataclass(frozen=True)
class LinkCatalogEntry:
    """A link given by its linking matrix and one longitude word per component.

    Longitudes are words in the meridians x1..xn; the diagonal of the
    linking matrix holds framings.
    """

    name: str
    linking_matrix: IntMatrix
    longitudes: Tuple[FreeWord, ...]

    def __post_init__(self) -> None:
        n = len(self.longitudes)
        A = self.linking_matrix
        if A.rows != n or A.cols != n:
            raise DomainError(f"{self.name}: linking matrix must be {n}x{n}")
        if not A.is_symmetric():
            raise DomainError(f"{self.name}: linking matrix must be symmetric")
        for word in self.longitudes:
            if word.max_generator > n:
                raise DomainError(f"{self.name}: longitude {word} uses a generator beyond x{n}")
        for i in range(n):
            for j in range(n):
                if i != j and mu(self.longitudes, (i + 1, j + 1)) != A[i, j]:
                    raise DomainError(
                        f"{self.name}: linking number lk({i + 1},{j + 1}) = {A[i, j]} "
                        "does not match the longitude exponent sums",
                        component=[i + 1, j + 1],
                    )

    @property
    def components(self) -> int:
        return len(self.longitudes)

    @property
    def framings(self) -> Tuple[int, ...]:
        return tuple(self.linking_matrix[i, i] for i in range(self.components))

    def with_framings(self, framings: Sequence[int], name: Optional[str] = None) -> "LinkCatalogEntry":
        if len(framings) != self.components:
            raise BadParameter(f"expected {self.components} framings, got {len(framings)}")
        rows = self.linking_matrix.to_rows()
        for i, value in enumerate(framings):
            rows[i][i] = int(value)
        return replace(self, name=name or self.name, linking_matrix=IntMatrix.from_rows(rows, self.components))

    def longitude_strings(self) -> List[str]:
        return [word.format() for word in self.longitudes]


def entry_from_words(name: str, linking_matrix: Sequence[Sequence[int]], longitudes: Iterable[str]) -> LinkCatalogEntry:
    words = tuple(FreeWord.parse(text) for text in longitudes)
    return LinkCatalogEntry(name, IntMatrix.from_rows(linking_matrix, len(words)), words)


def split_union(first: LinkCatalogEntry, second: LinkCatalogEntry, name: Optional[str] = None) -> LinkCatalogEntry:
    shift = first.components
    moved = tuple(FreeWord(tuple((gen + shift, sign) for gen, sign in word.letters)) for word in second.longitudes)
    return LinkCatalogEntry(
        name or f"{first.name}+{second.name}",
        first.linking_matrix.block_sum(second.linking_matrix),
        first.longitudes + moved,
    )


def _x(i: int) -> FreeWord:
    return FreeWord.generator(i)


def unlink(n: int) -> LinkCatalogEntry:
    return LinkCatalogEntry(f"unlink({n})", IntMatrix.zeros(n, n), tuple(FreeWord.identity() for _ in range(n)))


def iterated_bracket_link(d: int) -> LinkCatalogEntry:
    """Three-component link whose first nonvanishing mu-bar has length d."""
    depth = d - 2
    x1, x2, x3 = _x(1), _x(2), _x(3)
    l3 = left_normed(commutator(x1, x2), *([x2] * (depth - 1)))
    l1 = right_normed(*([x2] * depth), x3)
    l2 = left_normed(commutator(x3, x1), *([x1] * (depth - 1)))
    return LinkCatalogEntry(f"L_d({d})", IntMatrix.zeros(3, 3), (l1, l2, l3))


class LinkCatalog:
    """Fixed links from the data file plus the parametric families."""

    _PARAMETERS: Dict[str, Dict[str, Tuple[Optional[int], Optional[int]]]] = {
        # name -> parameter -> (minimum, default)
        "unlink": {"n": (1, None)},
        "L_d": {"d": (3, None)},
        "cabled_borromean": {"k": (1, None)},
        "borromean_framed": {"p": (None, None)},
        "borromean_unlink": {"n": (0, 1)},
    }

    def __init__(self, path: str | Path = DEFAULT_LINKS_PATH):
        self._path = Path(path)
        if not self._path.exists():
            raise FileNotFoundError(f"Link catalog file not found: {self._path}")
        with self._path.open("r", encoding="utf-8") as fh:
            raw_entries = list(json.load(fh))
        self.fixed: Dict[str, LinkCatalogEntry] = {}
        for obj in raw_entries:
            entry = entry_from_words(obj["name"], obj["linking_matrix"], obj["longitudes"])
            self.fixed[entry.name] = entry
        self._builders: Dict[str, Callable[..., LinkCatalogEntry]] = {
            "unlink": unlink,
            "L_d": iterated_bracket_link,
            "cabled_borromean": self._cabled_borromean,
            "borromean_framed": self._borromean_framed,
            "borromean_unlink": self._borromean_unlink,
        }

    def names(self) -> List[str]:
        return sorted(set(self.fixed) | set(self._builders))

    def _cabled_borromean(self, k: int) -> LinkCatalogEntry:
        base = self.fixed["borromean"]
        return LinkCatalogEntry(f"cabled_borromean({k})", base.linking_matrix, tuple(w**k for w in base.longitudes))

    def _borromean_framed(self, p: int) -> LinkCatalogEntry:
        return self.fixed["borromean"].with_framings((p, p, p), name=f"borromean_framed({p})")

    def _borromean_unlink(self, n: int) -> LinkCatalogEntry:
        base = self.fixed["borromean"]
        if n == 0:
            return base
        return split_union(base, unlink(n), name=f"borromean_unlink({n})")

    def _coerce(self, name: str, parameters: Mapping[str, object]) -> Dict[str, int]:
        spec = self._PARAMETERS.get(name, {})
        unknown = set(parameters) - set(spec)
        if unknown:
            raise BadParameter(f"{name} does not take parameter(s) {sorted(unknown)}", catalog=name)
        values: Dict[str, int] = {}
        for key, (minimum, default) in spec.items():
            raw = parameters.get(key, default)
            if raw is None:
                raise BadParameter(f"{name} requires parameter {key}", catalog=name)
            try:
                value = int(raw)
            except (TypeError, ValueError):
                raise BadParameter(f"parameter {key}={raw!r} is not an integer", catalog=name) from None
            if minimum is not None and value < minimum:
                raise BadParameter(f"parameter {key}={value} must be at least {minimum}", catalog=name)
            values[key] = value
        return values

    def get(self, name: str, parameters: Optional[Mapping[str, object]] = None) -> LinkCatalogEntry:
        parameters = dict(parameters or {})
        if name in self.fixed:
            self._coerce(name, parameters)
            return self.fixed[name]
        builder = self._builders.get(name)
        if builder is None:
            raise UnknownCatalogName(f"unknown link {name!r}", known=self.names())
        return builder(**self._coerce(name, parameters))


@lru_cache(maxsize=1)
def default_catalog() -> LinkCatalog:
    return LinkCatalog()


def catalog(name: str, parameters: Optional[Mapping[str, object]] = None) -> LinkCatalogEntry:
    return default_catalog().get(name, parameters)
