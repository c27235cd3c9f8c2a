"""Hall bases of basic commutators and free Lie algebras over the integers.

Trees are ordered by weight, then lexicographically on (left, right), with
x1 < x2 < ... on leaves. A bracket [u, v] is a Hall tree when u and v are,
u > v, and u = [a, b] implies b <= v.
"""

from dataclasses import dataclass
from functools import cached_property, lru_cache, total_ordering
from itertools import combinations
from typing import Dict, Iterable, List, Mapping, Sequence, Tuple, Union

from sympy import divisors, mobius

from errors import InvalidArgument
from linalg import AbelianInvariants, IntMatrix, kernel_invariants, vstack


@total_ordering
@dataclass(frozen=True, eq=True)
class HallTree:
    generator: int = 0
    left: "HallTree | None" = None
    right: "HallTree | None" = None

    @classmethod
    def leaf(cls, i: int) -> "HallTree":
        return cls(generator=i)

    @classmethod
    def bracket(cls, u: "HallTree", v: "HallTree") -> "HallTree":
        return cls(left=u, right=v)

    @property
    def is_leaf(self) -> bool:
        return self.left is None

    @cached_property
    def weight(self) -> int:
        return 1 if self.is_leaf else self.left.weight + self.right.weight

    @cached_property
    def key(self) -> tuple:
        if self.is_leaf:
            return (1, self.generator)
        return (self.weight, self.left.key, self.right.key)

    def __lt__(self, other: "HallTree") -> bool:
        return self.key < other.key

    def __hash__(self) -> int:
        return hash(self.key)

    @cached_property
    def max_generator(self) -> int:
        return self.generator if self.is_leaf else max(self.left.max_generator, self.right.max_generator)

    def leaves(self) -> List[int]:
        if self.is_leaf:
            return [self.generator]
        return self.left.leaves() + self.right.leaves()

    def __str__(self) -> str:
        if self.is_leaf:
            return f"x{self.generator}"
        return f"[{self.left},{self.right}]"


def is_hall_bracket(u: HallTree, v: HallTree) -> bool:
    """Assuming u and v are Hall trees, is [u, v] one."""
    return u > v and (u.is_leaf or u.right <= v)


@lru_cache(maxsize=None)
def hall_basis(k: int, n: int) -> Tuple[HallTree, ...]:
    if k < 0 or n < 1:
        raise InvalidArgument(f"hall_basis needs k >= 0 and n >= 1, got ({k}, {n})")
    if n == 1:
        return tuple(HallTree.leaf(i) for i in range(1, k + 1))
    if k < 2:
        return ()
    trees = []
    for a in range(1, n):
        for u in hall_basis(k, a):
            for v in hall_basis(k, n - a):
                if is_hall_bracket(u, v):
                    trees.append(HallTree.bracket(u, v))
    return tuple(sorted(trees))


def hall_basis_upto(k: int, n: int) -> Tuple[HallTree, ...]:
    """Concatenated Hall bases of weights 1..n; the letters of F_k / Gamma_{n+1}."""
    return tuple(t for w in range(1, n + 1) for t in hall_basis(k, w))


def witt_rank(k: int, n: int) -> int:
    if k < 0 or n < 1:
        raise InvalidArgument(f"witt_rank needs k >= 0 and n >= 1, got ({k}, {n})")
    total = sum(int(mobius(d)) * k ** (n // d) for d in divisors(n))
    return total // n


@lru_cache(maxsize=None)
def _hall_bracket(s: HallTree, t: HallTree) -> Tuple[Tuple[HallTree, int], ...]:
    """[s, t] for Hall trees s, t, expanded in the Hall basis."""
    if s == t:
        return ()
    if s < t:
        return tuple((h, -c) for h, c in _hall_bracket(t, s))
    if s.is_leaf or s.right <= t:
        return ((HallTree.bracket(s, t), 1),)
    # [[a, b], t] = [[a, t], b] + [a, [b, t]]
    a, b = s.left, s.right
    acc: Dict[HallTree, int] = {}
    for h, c in _hall_bracket(a, t):
        for h2, c2 in _hall_bracket(h, b):
            acc[h2] = acc.get(h2, 0) + c * c2
    for h, c in _hall_bracket(b, t):
        for h2, c2 in _hall_bracket(a, h):
            acc[h2] = acc.get(h2, 0) + c * c2
    return tuple(sorted((h, c) for h, c in acc.items() if c))


@dataclass(frozen=True)
class LieElement:
    """A homogeneous element of Lie_n(Z^k) in Hall coordinates."""

    k: int
    weight: int
    terms: Tuple[Tuple[HallTree, int], ...] = ()

    @classmethod
    def from_mapping(cls, k: int, weight: int, coeffs: Mapping[HallTree, int]) -> "LieElement":
        return cls(k, weight, tuple(sorted((h, c) for h, c in coeffs.items() if c)))

    @classmethod
    def generator(cls, k: int, i: int) -> "LieElement":
        if not 1 <= i <= k:
            raise InvalidArgument(f"generator x{i} out of range 1..{k}")
        return cls(k, 1, ((HallTree.leaf(i), 1),))

    @classmethod
    def zero(cls, k: int, weight: int) -> "LieElement":
        return cls(k, weight, ())

    @property
    def is_zero(self) -> bool:
        return not self.terms

    def coefficient(self, tree: HallTree) -> int:
        return dict(self.terms).get(tree, 0)

    def _check(self, other: "LieElement"):
        if (self.k, self.weight) != (other.k, other.weight):
            raise InvalidArgument("Lie elements of different generator count or weight")

    def __add__(self, other: "LieElement") -> "LieElement":
        self._check(other)
        acc = dict(self.terms)
        for h, c in other.terms:
            acc[h] = acc.get(h, 0) + c
        return LieElement.from_mapping(self.k, self.weight, acc)

    def __neg__(self) -> "LieElement":
        return self.scaled(-1)

    def __sub__(self, other: "LieElement") -> "LieElement":
        return self + (-other)

    def scaled(self, c: int) -> "LieElement":
        if c == 0:
            return LieElement.zero(self.k, self.weight)
        return LieElement(self.k, self.weight, tuple((h, c * x) for h, x in self.terms))

    def bracket(self, other: "LieElement") -> "LieElement":
        if self.k != other.k:
            raise InvalidArgument("Lie elements over different generator counts")
        acc: Dict[HallTree, int] = {}
        for s, a in self.terms:
            for t, b in other.terms:
                for h, c in _hall_bracket(s, t):
                    acc[h] = acc.get(h, 0) + a * b * c
        return LieElement.from_mapping(self.k, self.weight + other.weight, acc)

    def vector(self) -> Tuple[int, ...]:
        coeffs = dict(self.terms)
        return tuple(coeffs.get(h, 0) for h in hall_basis(self.k, self.weight))

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        return " + ".join(f"{c}*{h}" for h, c in self.terms)


# A formal bracket expression: a generator index or a pair of expressions.
Bracket = Union[int, Tuple["Bracket", "Bracket"]]


def bracket_weight(expr: Bracket) -> int:
    return 1 if isinstance(expr, int) else bracket_weight(expr[0]) + bracket_weight(expr[1])


def parse_bracket(text: str) -> Bracket:
    """Parse ``"[[x1,x2],x1]"``."""
    pos = 0
    s = text.replace(" ", "")

    def parse() -> Bracket:
        nonlocal pos
        if s.startswith("[", pos):
            pos += 1
            left = parse()
            if not s.startswith(",", pos):
                raise InvalidArgument(f"expected ',' at position {pos} in {text!r}")
            pos += 1
            right = parse()
            if not s.startswith("]", pos):
                raise InvalidArgument(f"expected ']' at position {pos} in {text!r}")
            pos += 1
            return (left, right)
        if s.startswith("x", pos):
            end = pos + 1
            while end < len(s) and s[end].isdigit():
                end += 1
            if end == pos + 1:
                raise InvalidArgument(f"generator without index at position {pos} in {text!r}")
            index = int(s[pos + 1:end])
            pos = end
            return index
        raise InvalidArgument(f"unexpected input at position {pos} in {text!r}")

    expr = parse()
    if pos != len(s):
        raise InvalidArgument(f"trailing input at position {pos} in {text!r}")
    return expr


def evaluate_bracket(expr: Bracket, k: int) -> LieElement:
    if isinstance(expr, int):
        return LieElement.generator(k, expr)
    return evaluate_bracket(expr[0], k).bracket(evaluate_bracket(expr[1], k))


def lie_normalize(expr: Iterable[Tuple[int, Bracket]], k: int, n: int) -> LieElement:
    """Expand sum(c * bracket) in the Hall basis of Lie_n(Z^k)."""
    total = LieElement.zero(k, n)
    for c, b in expr:
        w = bracket_weight(b)
        if w != n:
            raise InvalidArgument(f"bracket of weight {w} in an expression of weight {n}")
        total = total + evaluate_bracket(b, k).scaled(c)
    return total


def lie_of_map(f: IntMatrix, n: int) -> IntMatrix:
    """Lie_n(f) : Lie_n(Z^k) -> Lie_n(Z^l) in Hall bases, for f an l x k matrix."""
    if n < 1:
        raise InvalidArgument("weight must be >= 1")
    l, k = f.nrows, f.ncols
    images: Dict[HallTree, LieElement] = {}

    def image(t: HallTree) -> LieElement:
        if t not in images:
            if t.is_leaf:
                images[t] = LieElement.from_mapping(
                    l, 1, {HallTree.leaf(j + 1): f[j, t.generator - 1] for j in range(l)}
                )
            else:
                images[t] = image(t.left).bracket(image(t.right))
        return images[t]

    columns = [image(t).vector() for t in hall_basis(k, n)]
    return IntMatrix.from_columns(columns, witt_rank(l, n))


def _collapse(ranks: Sequence[int], kept: Sequence[int], dropped: int) -> IntMatrix:
    """Projection from the sum of A_i (i in kept) onto the sum without A_dropped."""
    offsets = {}
    pos = 0
    for i in kept:
        offsets[i] = pos
        pos += ranks[i]
    remaining = [i for i in kept if i != dropped]
    rows = []
    for i in remaining:
        for r in range(ranks[i]):
            row = [0] * pos
            row[offsets[i] + r] = 1
            rows.append(row)
    return IntMatrix.from_rows(rows, ncols=pos)


def _sign(kept: Sequence[int], dropped: int) -> int:
    return -1 if list(kept).index(dropped) % 2 else 1


def cross_effect_complex(n: int, ranks: Sequence[int]) -> Tuple[IntMatrix, IntMatrix]:
    """The maps L_0 -> L_1 -> L_2 of the cross-effect complex of Lie_n.

    L_k is the sum over |S| = k of Lie_n(sum of A_i, i not in S); the component
    S -> S + {j} is Lie_n of collapsing A_j, signed by the position of j among
    the summands still present.
    """
    if n < 1:
        raise InvalidArgument("weight must be >= 1")
    if len(ranks) != n + 1 or any(r < 1 for r in ranks):
        raise InvalidArgument(f"cross effect of Lie_{n} needs {n + 1} positive ranks")
    everything = list(range(n + 1))
    singles = [(j,) for j in everything]
    pairs = list(combinations(everything, 2))

    def kept(S) -> List[int]:
        return [i for i in everything if i not in S]

    def lie_rank(S) -> int:
        return witt_rank(sum(ranks[i] for i in kept(S)), n)

    d0 = vstack(
        [
            lie_of_map(_collapse(ranks, everything, j), n).scaled(_sign(everything, j))
            for (j,) in singles
        ],
        lie_rank(()),
    )
    blocks = []
    for S in pairs:
        row_blocks = []
        for T in singles:
            if set(T) <= set(S):
                (dropped,) = set(S) - set(T)
                m = lie_of_map(_collapse(ranks, kept(T), dropped), n).scaled(_sign(kept(T), dropped))
            else:
                m = IntMatrix.zeros(lie_rank(S), lie_rank(T))
            row_blocks.append(m)
        blocks.append(
            IntMatrix.from_rows(
                (sum((b.entries[r] for b in row_blocks), ()) for r in range(lie_rank(S))),
                ncols=sum(lie_rank(T) for T in singles),
            )
        )
    d1 = vstack(blocks, sum(lie_rank(T) for T in singles))
    return d0, d1


def cross_effect_kernel(n: int, ranks: Sequence[int]) -> AbelianInvariants:
    d0, _ = cross_effect_complex(n, ranks)
    return kernel_invariants(d0)
