"""Exact integer and rational linear algebra.

Relation convention used everywhere in the package: a presentation matrix has
one row per relation and one column per generator, so ``cokernel(A)`` is
``Z^cols / rowspace(A)``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import List, Optional, Sequence, Tuple

from sympy import Matrix

from .errors import DomainError, SingularMatrix
from .observability import span

INFINITE = math.inf

Rows = List[List[int]]


@dataclass(frozen=True)
class IntMatrix:
    rows: int
    cols: int
    entries: Tuple[int, ...]

    def __post_init__(self) -> None:
        if self.rows < 0 or self.cols < 0:
            raise DomainError("matrix dimensions must be nonnegative")
        if len(self.entries) != self.rows * self.cols:
            raise DomainError(
                f"expected {self.rows * self.cols} entries for a {self.rows}x{self.cols} matrix, got {len(self.entries)}"
            )

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence[int]], cols: Optional[int] = None) -> "IntMatrix":
        rows = [list(row) for row in rows]
        width = cols if cols is not None else (len(rows[0]) if rows else 0)
        for row in rows:
            if len(row) != width:
                raise DomainError("ragged matrix rows")
        return cls(len(rows), width, tuple(int(value) for row in rows for value in row))

    @classmethod
    def identity(cls, n: int) -> "IntMatrix":
        return cls(n, n, tuple(1 if i == j else 0 for i in range(n) for j in range(n)))

    @classmethod
    def zeros(cls, rows: int, cols: int) -> "IntMatrix":
        return cls(rows, cols, (0,) * (rows * cols))

    @classmethod
    def diagonal(cls, values: Sequence[int]) -> "IntMatrix":
        n = len(values)
        return cls(n, n, tuple(values[i] if i == j else 0 for i in range(n) for j in range(n)))

    def __getitem__(self, index: Tuple[int, int]) -> int:
        i, j = index
        return self.entries[i * self.cols + j]

    def to_rows(self) -> Rows:
        return [list(self.entries[i * self.cols : (i + 1) * self.cols]) for i in range(self.rows)]

    def transpose(self) -> "IntMatrix":
        return IntMatrix(self.cols, self.rows, tuple(self[i, j] for j in range(self.cols) for i in range(self.rows)))

    def __matmul__(self, other: "IntMatrix") -> "IntMatrix":
        if self.cols != other.rows:
            raise DomainError(f"cannot multiply {self.rows}x{self.cols} by {other.rows}x{other.cols}")
        return IntMatrix(
            self.rows,
            other.cols,
            tuple(
                sum(self[i, k] * other[k, j] for k in range(self.cols))
                for i in range(self.rows)
                for j in range(other.cols)
            ),
        )

    @property
    def is_square(self) -> bool:
        return self.rows == self.cols

    def is_symmetric(self) -> bool:
        return self.is_square and all(self[i, j] == self[j, i] for i in range(self.rows) for j in range(i))

    def is_zero(self) -> bool:
        return not any(self.entries)

    def determinant(self) -> int:
        if not self.is_square:
            raise DomainError("determinant of a non-square matrix")
        if self.rows == 0:
            return 1
        return int(Matrix(self.to_rows()).det())

    def block_sum(self, other: "IntMatrix") -> "IntMatrix":
        rows = [row + [0] * other.cols for row in self.to_rows()]
        rows += [[0] * self.cols + row for row in other.to_rows()]
        return IntMatrix.from_rows(rows, self.cols + other.cols)


@dataclass(frozen=True)
class SNFResult:
    U: IntMatrix
    D: IntMatrix
    V: IntMatrix
    V_inverse: IntMatrix

    @property
    def diagonal(self) -> Tuple[int, ...]:
        return tuple(self.D[i, i] for i in range(min(self.D.rows, self.D.cols)))


def _identity_rows(n: int) -> Rows:
    return [[1 if i == j else 0 for j in range(n)] for i in range(n)]


class _Reducer:
    """Row/column reduction that keeps U, V and V^-1 in step with D."""

    def __init__(self, rows: Rows, m: int, n: int):
        self.D = rows
        self.m = m
        self.n = n
        self.U = _identity_rows(m)
        self.V = _identity_rows(n)
        self.Vinv = _identity_rows(n)

    def swap_rows(self, a: int, b: int) -> None:
        if a == b:
            return
        self.D[a], self.D[b] = self.D[b], self.D[a]
        self.U[a], self.U[b] = self.U[b], self.U[a]

    def swap_cols(self, a: int, b: int) -> None:
        if a == b:
            return
        for row in self.D:
            row[a], row[b] = row[b], row[a]
        for row in self.V:
            row[a], row[b] = row[b], row[a]
        self.Vinv[a], self.Vinv[b] = self.Vinv[b], self.Vinv[a]

    def add_row(self, target: int, source: int, factor: int) -> None:
        # row[target] += factor * row[source]
        for mat in (self.D, self.U):
            src = mat[source]
            dst = mat[target]
            for k in range(len(dst)):
                dst[k] += factor * src[k]

    def add_col(self, target: int, source: int, factor: int) -> None:
        # col[target] += factor * col[source]; V^-1 gets the inverse row operation
        for mat in (self.D, self.V):
            for row in mat:
                row[target] += factor * row[source]
        src = self.Vinv[target]
        dst = self.Vinv[source]
        for k in range(len(dst)):
            dst[k] -= factor * src[k]

    def negate_row(self, i: int) -> None:
        self.D[i] = [-v for v in self.D[i]]
        self.U[i] = [-v for v in self.U[i]]

    def _min_in_block(self, t: int) -> Optional[Tuple[int, int]]:
        best: Optional[Tuple[int, int]] = None
        best_abs = 0
        for i in range(t, self.m):
            row = self.D[i]
            for j in range(t, self.n):
                value = abs(row[j])
                if value and (best is None or value < best_abs):
                    best, best_abs = (i, j), value
                    if value == 1:
                        return best
        return best

    def _min_in_cross(self, t: int) -> Tuple[int, int]:
        best = (t, t)
        best_abs = abs(self.D[t][t])
        for i in range(t + 1, self.m):
            value = abs(self.D[i][t])
            if value and (best_abs == 0 or value < best_abs):
                best, best_abs = (i, t), value
        for j in range(t + 1, self.n):
            value = abs(self.D[t][j])
            if value and (best_abs == 0 or value < best_abs):
                best, best_abs = (t, j), value
        return best

    def _clear_cross(self, t: int) -> bool:
        pivot = self.D[t][t]
        clean = True
        for i in range(t + 1, self.m):
            if self.D[i][t]:
                self.add_row(i, t, -(self.D[i][t] // pivot))
                clean = clean and self.D[i][t] == 0
        for j in range(t + 1, self.n):
            if self.D[t][j]:
                self.add_col(j, t, -(self.D[t][j] // pivot))
                clean = clean and self.D[t][j] == 0
        return clean

    def _non_divisible_row(self, t: int) -> Optional[int]:
        pivot = self.D[t][t]
        for i in range(t + 1, self.m):
            for j in range(t + 1, self.n):
                if self.D[i][j] % pivot:
                    return i
        return None

    def run(self) -> None:
        for t in range(min(self.m, self.n)):
            start = self._min_in_block(t)
            if start is None:
                return
            self.swap_rows(t, start[0])
            self.swap_cols(t, start[1])
            while True:
                i, j = self._min_in_cross(t)
                self.swap_rows(t, i)
                self.swap_cols(t, j)
                if not self._clear_cross(t):
                    continue
                offender = self._non_divisible_row(t)
                if offender is None:
                    break
                self.add_row(t, offender, 1)
            if self.D[t][t] < 0:
                self.negate_row(t)


def smith_normal_form(A: IntMatrix) -> SNFResult:
    with span("smith_normal_form", rows=A.rows, cols=A.cols):
        reducer = _Reducer(A.to_rows(), A.rows, A.cols)
        reducer.run()
    return SNFResult(
        U=IntMatrix.from_rows(reducer.U, A.rows),
        D=IntMatrix.from_rows(reducer.D, A.cols),
        V=IntMatrix.from_rows(reducer.V, A.cols),
        V_inverse=IntMatrix.from_rows(reducer.Vinv, A.cols),
    )


@dataclass(frozen=True)
class FGAbelianGroup:
    """``Z^rank + Z/d_1 + ... + Z/d_r`` with d_i | d_(i+1).

    Normal-form coordinates list the torsion summands first, then the free
    ones. ``gen_map[k]`` gives the coordinates of original generator k and
    ``gen_lift[i]`` writes normal generator i in the original generators.
    """

    rank: int
    torsion: Tuple[int, ...]
    gen_map: Tuple[Tuple[int, ...], ...] = field(default=(), compare=False)
    gen_lift: Tuple[Tuple[int, ...], ...] = field(default=(), compare=False)

    def __post_init__(self) -> None:
        if self.rank < 0:
            raise DomainError("rank must be nonnegative")
        for idx, d in enumerate(self.torsion):
            if d < 2:
                raise DomainError(f"torsion coefficient {d} must be at least 2")
            if idx and d % self.torsion[idx - 1]:
                raise DomainError(f"torsion coefficients {self.torsion} are not a divisor chain")

    @classmethod
    def trivial(cls) -> "FGAbelianGroup":
        return cls(rank=0, torsion=())

    @classmethod
    def free(cls, rank: int) -> "FGAbelianGroup":
        basis = tuple(tuple(1 if i == j else 0 for j in range(rank)) for i in range(rank))
        return cls(rank=rank, torsion=(), gen_map=basis, gen_lift=basis)

    @property
    def ngens(self) -> int:
        return len(self.torsion) + self.rank

    @property
    def order(self) -> float | int:
        if self.rank:
            return INFINITE
        return math.prod(self.torsion)

    @property
    def torsion_order(self) -> int:
        return math.prod(self.torsion)

    def is_trivial(self) -> bool:
        return self.rank == 0 and not self.torsion

    def has_even_torsion(self) -> bool:
        return any(d % 2 == 0 for d in self.torsion)

    def p_rank(self, p: int) -> int:
        """Dimension of G tensor Z/p, which is also dim H^1(M; Z/p) for G = H_1(M)."""
        return self.rank + sum(1 for d in self.torsion if d % p == 0)

    def normalize(self, coords: Sequence[int]) -> Tuple[int, ...]:
        if len(coords) != self.ngens:
            raise DomainError(f"expected {self.ngens} coordinates, got {len(coords)}")
        k = len(self.torsion)
        return tuple(c % self.torsion[i] if i < k else c for i, c in enumerate(coords))

    def element_order(self, coords: Sequence[int]) -> float | int:
        coords = self.normalize(coords)
        k = len(self.torsion)
        if any(coords[k:]):
            return INFINITE
        order = 1
        for d, c in zip(self.torsion, coords):
            order = math.lcm(order, d // math.gcd(d, c))
        return order

    def image_of(self, generator: int) -> Tuple[int, ...]:
        return self.gen_map[generator]

    def is_isomorphic(self, other: "FGAbelianGroup") -> bool:
        return self.rank == other.rank and self.torsion == other.torsion

    def torsion_part(self) -> "FGAbelianGroup":
        k = len(self.torsion)
        basis = tuple(tuple(1 if i == j else 0 for j in range(k)) for i in range(k))
        return FGAbelianGroup(rank=0, torsion=self.torsion, gen_map=basis, gen_lift=basis)

    def direct_sum(self, other: "FGAbelianGroup") -> "FGAbelianGroup":
        """Invariant factors of the sum; generator data is recomputed from a diagonal presentation."""
        diag = list(self.torsion) + list(other.torsion)
        width = len(diag) + self.rank + other.rank
        rows = [[d if j == i else 0 for j in range(width)] for i, d in enumerate(diag)]
        return cokernel(IntMatrix.from_rows(rows, width))

    def describe(self) -> str:
        parts = [f"Z/{d}" for d in self.torsion]
        if self.rank:
            parts.insert(0, "Z" if self.rank == 1 else f"Z^{self.rank}")
        return " + ".join(parts) if parts else "0"


def cokernel(A: IntMatrix) -> FGAbelianGroup:
    snf = smith_normal_form(A)
    diag = list(snf.diagonal) + [0] * (A.cols - min(A.rows, A.cols))
    torsion_idx = [i for i, d in enumerate(diag) if d >= 2]
    free_idx = [i for i, d in enumerate(diag) if d == 0]
    kept = torsion_idx + free_idx
    torsion = tuple(diag[i] for i in torsion_idx)
    gen_map = []
    for k in range(A.cols):
        coords = []
        for pos, i in enumerate(kept):
            value = snf.V[k, i]
            coords.append(value % torsion[pos] if pos < len(torsion) else value)
        gen_map.append(tuple(coords))
    gen_lift = tuple(tuple(snf.V_inverse[i, k] for k in range(A.cols)) for i in kept)
    return FGAbelianGroup(rank=len(free_idx), torsion=torsion, gen_map=tuple(gen_map), gen_lift=gen_lift)


def to_fraction(value) -> Fraction:
    return Fraction(int(value.p), int(value.q))


def rational_inverse(A: IntMatrix) -> Tuple[Tuple[Fraction, ...], ...]:
    if not A.is_square:
        raise DomainError(f"cannot invert a {A.rows}x{A.cols} matrix")
    if A.rows == 0:
        return ()
    sym = Matrix(A.to_rows())
    if sym.det() == 0:
        raise SingularMatrix("matrix is singular", rows=A.rows)
    inverse = sym.inv()
    return tuple(tuple(to_fraction(inverse[i, j]) for j in range(A.cols)) for i in range(A.rows))
