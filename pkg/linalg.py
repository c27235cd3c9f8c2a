"""Exact integer linear algebra.

Everything here works on Python ints, so entries never overflow. Pivots are
chosen by minimal absolute value to keep intermediate entries small.
"""

from dataclasses import dataclass
from math import gcd
from typing import Iterable, List, Sequence, Tuple

from errors import InternalInvariantError, InvalidArgument


@dataclass(frozen=True)
class IntMatrix:
    nrows: int
    ncols: int
    entries: Tuple[Tuple[int, ...], ...]

    def __post_init__(self):
        if len(self.entries) != self.nrows or any(
            len(row) != self.ncols for row in self.entries
        ):
            raise InvalidArgument(
                f"matrix entries do not match the declared shape {self.nrows}x{self.ncols}"
            )

    @classmethod
    def from_rows(cls, rows: Iterable[Sequence[int]], ncols: int | None = None) -> "IntMatrix":
        rows = tuple(tuple(int(x) for x in row) for row in rows)
        if ncols is None:
            if not rows:
                raise InvalidArgument("ncols is required for a matrix with no rows")
            ncols = len(rows[0])
        return cls(len(rows), ncols, rows)

    @classmethod
    def zeros(cls, nrows: int, ncols: int) -> "IntMatrix":
        return cls(nrows, ncols, tuple((0,) * ncols for _ in range(nrows)))

    @classmethod
    def identity(cls, n: int) -> "IntMatrix":
        return cls(
            n, n, tuple(tuple(int(i == j) for j in range(n)) for i in range(n))
        )

    @classmethod
    def from_columns(cls, columns: Sequence[Sequence[int]], nrows: int) -> "IntMatrix":
        return cls.from_rows(
            ([col[i] for col in columns] for i in range(nrows)), ncols=len(columns)
        )

    def __getitem__(self, index: Tuple[int, int]) -> int:
        i, j = index
        return self.entries[i][j]

    def __matmul__(self, other: "IntMatrix") -> "IntMatrix":
        if self.ncols != other.nrows:
            raise InvalidArgument(
                f"cannot multiply {self.nrows}x{self.ncols} by {other.nrows}x{other.ncols}"
            )
        cols = other.transpose().entries
        return IntMatrix(
            self.nrows,
            other.ncols,
            tuple(
                tuple(sum(a * b for a, b in zip(row, col) if a) for col in cols)
                for row in self.entries
            ),
        )

    def __add__(self, other: "IntMatrix") -> "IntMatrix":
        if (self.nrows, self.ncols) != (other.nrows, other.ncols):
            raise InvalidArgument("cannot add matrices of different shapes")
        return IntMatrix(
            self.nrows,
            self.ncols,
            tuple(
                tuple(a + b for a, b in zip(r, s))
                for r, s in zip(self.entries, other.entries)
            ),
        )

    def __neg__(self) -> "IntMatrix":
        return self.scaled(-1)

    def scaled(self, c: int) -> "IntMatrix":
        return IntMatrix(
            self.nrows, self.ncols, tuple(tuple(c * x for x in r) for r in self.entries)
        )

    def transpose(self) -> "IntMatrix":
        return IntMatrix(
            self.ncols,
            self.nrows,
            tuple(tuple(self.entries[i][j] for i in range(self.nrows)) for j in range(self.ncols)),
        )

    def column(self, j: int) -> Tuple[int, ...]:
        return tuple(row[j] for row in self.entries)

    def apply(self, vector: Sequence[int]) -> Tuple[int, ...]:
        if len(vector) != self.ncols:
            raise InvalidArgument("vector length does not match the matrix")
        return tuple(sum(a * b for a, b in zip(row, vector) if a) for row in self.entries)

    def is_zero(self) -> bool:
        return all(x == 0 for row in self.entries for x in row)

    def tolist(self) -> List[List[int]]:
        return [list(row) for row in self.entries]


def vstack(blocks: Sequence[IntMatrix], ncols: int) -> IntMatrix:
    for b in blocks:
        if b.ncols != ncols:
            raise InvalidArgument("stacked blocks must share a column count")
    return IntMatrix.from_rows(
        (row for b in blocks for row in b.entries), ncols=ncols
    )


@dataclass(frozen=True)
class AbelianInvariants:
    """Z^rank + Z/t_1 + ... + Z/t_m with t_1 | t_2 | ... | t_m and every t_i >= 2."""

    rank: int
    torsion: Tuple[int, ...] = ()

    def __post_init__(self):
        if self.rank < 0:
            raise InvalidArgument("rank must be nonnegative")
        for t in self.torsion:
            if t < 2:
                raise InvalidArgument(f"torsion coefficient {t} is not >= 2")
        for a, b in zip(self.torsion, self.torsion[1:]):
            if b % a:
                raise InvalidArgument(f"torsion {self.torsion} is not a divisibility chain")

    @classmethod
    def from_orders(cls, rank: int, orders: Iterable[int]) -> "AbelianInvariants":
        """Canonical form of Z^rank plus the cyclic groups Z/o (o = 1 ignored)."""
        chain = divisibility_chain(abs(o) for o in orders if abs(o) != 1)
        return cls(rank, tuple(c for c in chain if c != 1))

    @property
    def is_trivial(self) -> bool:
        return self.rank == 0 and not self.torsion

    def __add__(self, other: "AbelianInvariants") -> "AbelianInvariants":
        return AbelianInvariants.from_orders(
            self.rank + other.rank, self.torsion + other.torsion
        )

    def to_dict(self) -> dict:
        return {"rank": self.rank, "torsion": list(self.torsion)}

    def __str__(self) -> str:
        parts = [f"Z^{self.rank}"] if self.rank else []
        parts += [f"Z/{t}" for t in self.torsion]
        return " + ".join(parts) or "0"


def divisibility_chain(values: Iterable[int]) -> List[int]:
    """Rewrite a list of cyclic orders as invariant factors."""
    d = [abs(v) for v in values if v != 0]
    for i in range(len(d)):
        for j in range(i + 1, len(d)):
            g = gcd(d[i], d[j])
            d[i], d[j] = g, d[i] * d[j] // g
    return sorted(d)


@dataclass(frozen=True)
class ColumnEchelon:
    """``matrix @ transform`` is in column echelon form with ``rank`` pivot columns.

    ``inverse`` is the inverse of ``transform``; ``pivot_rows[t]`` is the row of
    the pivot in column t.
    """

    reduced: Tuple[Tuple[int, ...], ...]
    transform: Tuple[Tuple[int, ...], ...]
    inverse: Tuple[Tuple[int, ...], ...]
    pivot_rows: Tuple[int, ...]
    ncols: int

    @property
    def rank(self) -> int:
        return len(self.pivot_rows)


def column_echelon(m: IntMatrix) -> ColumnEchelon:
    a = [list(row) for row in m.entries]
    n = m.ncols
    v = [[int(i == j) for j in range(n)] for i in range(n)]
    vinv = [[int(i == j) for j in range(n)] for i in range(n)]
    pivot_rows = []
    p = 0
    for r in range(m.nrows):
        if p == n:
            break
        row = a[r]
        while True:
            nonzero = [j for j in range(p, n) if row[j]]
            if not nonzero:
                break
            piv = min(nonzero, key=lambda j: (abs(row[j]), j))
            if piv != p:
                for line in a:
                    line[p], line[piv] = line[piv], line[p]
                for line in v:
                    line[p], line[piv] = line[piv], line[p]
                vinv[p], vinv[piv] = vinv[piv], vinv[p]
            cleared = True
            for j in range(p + 1, n):
                if not row[j]:
                    continue
                q = row[j] // row[p]
                if q:
                    for line in a:
                        if line[p]:
                            line[j] -= q * line[p]
                    for line in v:
                        if line[p]:
                            line[j] -= q * line[p]
                    source = vinv[j]
                    target = vinv[p]
                    for c in range(n):
                        if source[c]:
                            target[c] += q * source[c]
                if row[j]:
                    cleared = False
            if cleared:
                break
        if row[p]:
            pivot_rows.append(r)
            p += 1
    return ColumnEchelon(
        reduced=tuple(tuple(row) for row in a),
        transform=tuple(tuple(row) for row in v),
        inverse=tuple(tuple(row) for row in vinv),
        pivot_rows=tuple(pivot_rows),
        ncols=n,
    )


@dataclass(frozen=True)
class KernelLattice:
    """Basis of ker(m) as columns plus an integer left inverse.

    ``projection @ x`` gives the coordinates of any x in the kernel.
    """

    basis: IntMatrix
    projection: IntMatrix

    @property
    def rank(self) -> int:
        return self.basis.ncols


def kernel_lattice(m: IntMatrix) -> KernelLattice:
    ech = column_echelon(m)
    n = m.ncols
    r = ech.rank
    basis = IntMatrix.from_rows(
        (row[r:] for row in ech.transform), ncols=n - r
    ) if n else IntMatrix.zeros(0, 0)
    projection = IntMatrix.from_rows(ech.inverse[r:], ncols=n)
    return KernelLattice(basis=basis, projection=projection)


def rank(m: IntMatrix) -> int:
    return column_echelon(m).rank


def solve(m: IntMatrix, b: Sequence[int], echelon: ColumnEchelon | None = None) -> Tuple[int, ...] | None:
    """An integer x with m x = b, or None if there is none."""
    ech = echelon or column_echelon(m)
    a = ech.reduced
    y = [0] * m.ncols
    for t, r in enumerate(ech.pivot_rows):
        acc = b[r] - sum(a[r][s] * y[s] for s in range(t) if y[s])
        if acc % a[r][t]:
            return None
        y[t] = acc // a[r][t]
    for r in range(m.nrows):
        if sum(a[r][s] * y[s] for s in range(ech.rank) if y[s]) != b[r]:
            return None
    return tuple(
        sum(row[s] * y[s] for s in range(ech.rank) if y[s]) for row in ech.transform
    )


def smith_diagonal(m: IntMatrix) -> List[int]:
    """Nonzero invariant factors of m, as a divisibility chain."""
    a = [list(row) for row in m.entries]
    nrows, ncols = m.nrows, m.ncols
    diag = []
    t = 0
    while t < nrows and t < ncols:
        candidates = [
            (abs(a[i][j]), i, j)
            for i in range(t, nrows)
            for j in range(t, ncols)
            if a[i][j]
        ]
        if not candidates:
            break
        _, i, j = min(candidates)
        while True:
            if i != t:
                a[t], a[i] = a[i], a[t]
            if j != t:
                for line in a:
                    line[t], line[j] = line[j], line[t]
            pivot = a[t][t]
            for i2 in range(t + 1, nrows):
                q = a[i2][t] // pivot
                if q:
                    src, dst = a[t], a[i2]
                    for c in range(t, ncols):
                        if src[c]:
                            dst[c] -= q * src[c]
            for j2 in range(t + 1, ncols):
                q = a[t][j2] // pivot
                if q:
                    for line in a[t:]:
                        if line[t]:
                            line[j2] -= q * line[t]
            rest = [(abs(a[i2][t]), i2, t) for i2 in range(t + 1, nrows) if a[i2][t]]
            rest += [(abs(a[t][j2]), t, j2) for j2 in range(t + 1, ncols) if a[t][j2]]
            if not rest:
                break
            _, i, j = min(rest)
        diag.append(abs(a[t][t]))
        t += 1
    return divisibility_chain(diag)


def cokernel_invariants(m: IntMatrix) -> AbelianInvariants:
    """Z^nrows / image(m)."""
    diag = smith_diagonal(m)
    return AbelianInvariants.from_orders(m.nrows - len(diag), diag)


def kernel_invariants(m: IntMatrix) -> AbelianInvariants:
    return AbelianInvariants(m.ncols - rank(m))


def check_zero(m: IntMatrix, what: str):
    if not m.is_zero():
        raise InternalInvariantError(f"{what} is not the zero matrix")
