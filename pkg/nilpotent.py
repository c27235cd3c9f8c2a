"""Free nilpotent groups F_k / Gamma_{n+1} F_k and their finitely presented quotients.

Elements are kept in Hall normal form c_1^{e_1} ... c_N^{e_N}, where c_1 < ... < c_N
are the basic commutators of weight <= n (see :mod:`hall_lie`) read as group
commutators with [x, y] = x^-1 y^-1 x y.

Normal forms are produced by collection from the left, one syllable c_i^e at a
time. The conjugates c_j^{c_i^e} it needs are derived from the truncated Magnus
embedding x_i -> 1 + X_i, which is faithful on F_k / Gamma_{n+1} F_k, and cached
per group for small exponents.
"""

import re
import string
from dataclasses import dataclass, field
from functools import lru_cache
from itertools import combinations
from math import comb
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

from config import get_settings
from errors import InternalInvariantError, InvalidArgument, PresentationFormatError, ResourceCapExceeded
from hall_lie import HallTree, hall_basis, hall_basis_upto, witt_rank
from linalg import AbelianInvariants, IntMatrix, column_echelon, cokernel_invariants, solve
from logs import log_event

# (letter index, exponent)
Syllable = Tuple[int, int]
Series = Dict[Tuple[int, ...], int]
# conjugates c_j^(c_i^e) are cached for |e| up to this bound
_RULE_CACHE_EXPONENT = 2


def generator_names(k: int) -> List[str]:
    if k <= 26:
        return list(string.ascii_lowercase[:k])
    return [f"x{i}" for i in range(1, k + 1)]


@dataclass(frozen=True)
class FreeWord:
    """A freely reduced word: (generator, exponent) pairs, generators numbered from 1."""

    letters: Tuple[Tuple[int, int], ...] = ()

    @classmethod
    def of(cls, pairs: Iterable[Tuple[int, int]]) -> "FreeWord":
        word: List[List[int]] = []
        for gen, power in pairs:
            if power == 0:
                continue
            if word and word[-1][0] == gen:
                word[-1][1] += power
                if word[-1][1] == 0:
                    word.pop()
            else:
                word.append([gen, power])
        return cls(tuple((g, p) for g, p in word))

    @classmethod
    def parse(cls, text: str, names: Optional[Sequence[str]] = None) -> "FreeWord":
        """Parse ``"b a b^-1"``; generators by name or as ``x1``, ``x2``, ..."""
        pairs = []
        for token in text.split():
            match = re.fullmatch(r"([A-Za-z]\w*?)(?:\^(-?\d+))?", token)
            if not match:
                raise InvalidArgument(f"cannot parse letter {token!r}")
            name, power = match.group(1), int(match.group(2) or 1)
            if names is not None and name in names:
                gen = list(names).index(name) + 1
            elif re.fullmatch(r"x\d+", name):
                gen = int(name[1:])
            elif names is None and len(name) == 1 and name.islower():
                gen = string.ascii_lowercase.index(name) + 1
            else:
                raise InvalidArgument(f"unknown generator {name!r}")
            pairs.append((gen, power))
        return cls.of(pairs)

    def __mul__(self, other: "FreeWord") -> "FreeWord":
        return FreeWord.of(self.letters + other.letters)

    def inverse(self) -> "FreeWord":
        return FreeWord(tuple((g, -p) for g, p in reversed(self.letters)))

    @property
    def is_identity(self) -> bool:
        return not self.letters

    @property
    def max_generator(self) -> int:
        return max((g for g, _ in self.letters), default=0)

    def substitute(self, images: Sequence["FreeWord"]) -> "FreeWord":
        pairs: List[Tuple[int, int]] = []
        for g, p in self.letters:
            w = images[g - 1] if p > 0 else images[g - 1].inverse()
            pairs.extend(w.letters * abs(p))
        return FreeWord.of(pairs)

    def format(self, names: Optional[Sequence[str]] = None) -> str:
        names = names or [f"x{i}" for i in range(1, self.max_generator + 1)]
        return " ".join(
            names[g - 1] if p == 1 else f"{names[g - 1]}^{p}" for g, p in self.letters
        )

    def __str__(self) -> str:
        return self.format()


def _series_mul(p: Series, q: Series, n: int) -> Series:
    by_length: Dict[int, List[Tuple[Tuple[int, ...], int]]] = {}
    for v, b in q.items():
        by_length.setdefault(len(v), []).append((v, b))
    out: Series = {}
    for u, a in p.items():
        for length in range(n - len(u) + 1):
            for v, b in by_length.get(length, ()):
                w = u + v
                out[w] = out.get(w, 0) + a * b
    return {w: c for w, c in out.items() if c}


def _binomial(e: int, m: int) -> int:
    if e >= 0:
        return comb(e, m)
    return (-1) ** m * comb(m - e - 1, m)


def _series_pow(p: Series, e: int, n: int) -> Series:
    """(1 + A)^e = sum C(e, m) A^m, truncated at length n; p must have constant term 1."""
    a = {w: c for w, c in p.items() if w}
    out: Series = {(): 1}
    term: Series = {(): 1}
    for m in range(1, n + 1):
        term = _series_mul(term, a, n)
        if not term:
            break
        coeff = _binomial(e, m)
        for w, c in term.items():
            out[w] = out.get(w, 0) + coeff * c
    return {w: c for w, c in out.items() if c}


@dataclass(frozen=True)
class NilpotentElement:
    k: int
    n: int
    exponents: Tuple[int, ...]

    @property
    def is_identity(self) -> bool:
        return not any(self.exponents)

    def truncate(self, n: int) -> "NilpotentElement":
        if not 1 <= n <= self.n:
            raise InvalidArgument(f"cannot truncate class {self.n} to class {n}")
        size = sum(witt_rank(self.k, w) for w in range(1, n + 1))
        return NilpotentElement(self.k, n, self.exponents[:size])

    def weight_coordinates(self, w: int) -> Tuple[int, ...]:
        start = sum(witt_rank(self.k, v) for v in range(1, w))
        return self.exponents[start:start + witt_rank(self.k, w)]

    def syllables(self) -> List[Syllable]:
        return [(idx, e) for idx, e in enumerate(self.exponents) if e]

    def to_dict(self) -> Dict[str, int]:
        letters = hall_basis_upto(self.k, self.n)
        return {str(t): e for t, e in zip(letters, self.exponents) if e}

    def __str__(self) -> str:
        parts = [f"{t}^{e}" for t, e in self.to_dict().items()]
        return " ".join(parts) or "1"


def check_hall_rank(k: int, n: int, source: str, cap_class: bool = True):
    """Raise ResourceCapExceeded when the Hall basis through weight n is too large.

    ``cap_class`` also applies the nilpotency class cap; plain Hall basis
    listings are bounded by their size alone.
    """
    settings = get_settings()
    total = sum(witt_rank(k, w) for w in range(1, n + 1))
    if (cap_class and n > settings.MAX_CLASS) or total > settings.MAX_HALL_RANK:
        log_event(
            "warning",
            "resource cap exceeded",
            {"generators": k, "class": n, "hall_rank": total,
             "max_class": settings.MAX_CLASS, "max_hall_rank": settings.MAX_HALL_RANK},
            source=source,
        )
        raise ResourceCapExceeded(
            f"free nilpotent group on {k} generators of class {n} has Hall rank {total}; "
            f"caps are class {settings.MAX_CLASS}, rank {settings.MAX_HALL_RANK}"
        )


class NilpotentGroup:
    """Arithmetic in F_k / Gamma_{n+1} F_k. Obtain instances with :func:`free_nilpotent_group`."""

    def __init__(self, k: int, n: int):
        if k < 0 or n < 1:
            raise InvalidArgument(f"free nilpotent group needs k >= 0 and n >= 1, got ({k}, {n})")
        check_hall_rank(k, n, "nilpotent.NilpotentGroup")
        self.k = k
        self.n = n
        self.letters: Tuple[HallTree, ...] = hall_basis_upto(k, n)
        self.index: Dict[HallTree, int] = {t: i for i, t in enumerate(self.letters)}
        self.weights: Tuple[int, ...] = tuple(t.weight for t in self.letters)
        self.size = len(self.letters)
        self._magnus: Dict[Tuple[int, int], Series] = {}
        self._rules: Dict[Tuple[int, int, int], NilpotentElement] = {}
        self._solvers: Dict[int, tuple] = {}
        log_event(
            "debug",
            "free nilpotent group constructed",
            {"generators": k, "class": n, "hall_rank": self.size},
            source="nilpotent.NilpotentGroup",
        )

    def __repr__(self) -> str:
        return f"NilpotentGroup(k={self.k}, n={self.n})"

    # elements

    def element(self, exponents: Sequence[int]) -> NilpotentElement:
        if len(exponents) != self.size:
            raise InvalidArgument(f"expected {self.size} exponents, got {len(exponents)}")
        return NilpotentElement(self.k, self.n, tuple(exponents))

    def identity(self) -> NilpotentElement:
        return self.element([0] * self.size)

    def generator(self, i: int) -> NilpotentElement:
        if not 1 <= i <= self.k:
            raise InvalidArgument(f"generator {i} out of range 1..{self.k}")
        return self.letter(i - 1)

    def letter(self, idx: int) -> NilpotentElement:
        e = [0] * self.size
        e[idx] = 1
        return self.element(e)

    def _check(self, *elements: NilpotentElement):
        for u in elements:
            if (u.k, u.n) != (self.k, self.n):
                raise InvalidArgument(
                    f"element of F_{u.k}/Gamma_{u.n + 1} used in F_{self.k}/Gamma_{self.n + 1}"
                )

    # Magnus embedding

    def _magnus_letter(self, idx: int, sign: int) -> Series:
        key = (idx, sign)
        if key not in self._magnus:
            t = self.letters[idx]
            if sign < 0:
                value = _series_pow(self._magnus_letter(idx, 1), -1, self.n)
            elif t.is_leaf:
                value = {(): 1, (t.generator,): 1}
            else:
                u, v = self.index[t.left], self.index[t.right]
                value = self._magnus_letter(u, -1)
                for part in (self._magnus_letter(v, -1), self._magnus_letter(u, 1), self._magnus_letter(v, 1)):
                    value = _series_mul(value, part, self.n)
            self._magnus[key] = value
        return self._magnus[key]

    def _magnus_power(self, idx: int, e: int) -> Series:
        if e in (1, -1):
            return self._magnus_letter(idx, e)
        return _series_pow(self._magnus_letter(idx, 1), e, self.n)

    def magnus(self, u: NilpotentElement) -> Series:
        self._check(u)
        out: Series = {(): 1}
        for idx, e in u.syllables():
            out = _series_mul(out, self._magnus_power(idx, e), self.n)
        return out

    def _lie_polynomial(self, t: HallTree) -> Series:
        if t.is_leaf:
            return {(t.generator,): 1}
        a, b = self._lie_polynomial(t.left), self._lie_polynomial(t.right)
        out = _series_mul(a, b, self.n)
        for w, c in _series_mul(b, a, self.n).items():
            out[w] = out.get(w, 0) - c
        return {w: c for w, c in out.items() if c}

    def _solver(self, w: int):
        if w not in self._solvers:
            trees = hall_basis(self.k, w)
            polys = [self._lie_polynomial(t) for t in trees]
            words = sorted({word for p in polys for word in p})
            matrix = IntMatrix.from_columns(
                [[p.get(word, 0) for word in words] for p in polys], len(words)
            )
            self._solvers[w] = (words, {word: r for r, word in enumerate(words)}, matrix, column_echelon(matrix))
        return self._solvers[w]

    def _peel(self, series: Series) -> Tuple[int, ...]:
        """Normal form exponents of the group element with Magnus image ``series``."""
        exponents = [0] * self.size
        rest = dict(series)
        offset = 0
        for w in range(1, self.n + 1):
            words, row_of, matrix, ech = self._solver(w)
            vector = [0] * len(words)
            for word, c in rest.items():
                if len(word) < w and word:
                    raise InternalInvariantError(f"Magnus remainder has a term of length {len(word)} at weight {w}")
                if len(word) == w:
                    if word not in row_of:
                        raise InternalInvariantError(f"weight-{w} part is not a Lie polynomial")
                    vector[row_of[word]] = c
            coords = solve(matrix, vector, ech) if any(vector) else (0,) * matrix.ncols
            if coords is None:
                raise InternalInvariantError(f"weight-{w} part is not in the Hall lattice")
            peeled: Series = {(): 1}
            for pos, e in enumerate(coords):
                if e:
                    exponents[offset + pos] = e
                    peeled = _series_mul(peeled, self._magnus_power(offset + pos, e), self.n)
            if len(peeled) > 1:
                rest = _series_mul(_series_pow(peeled, -1, self.n), rest, self.n)
            offset += matrix.ncols
        if rest != {(): 1}:
            raise InternalInvariantError("Magnus image not exhausted by the Hall normal form")
        return tuple(exponents)

    # collection

    def _rule(self, i: int, j: int, e: int) -> NilpotentElement:
        """Normal form of c_j^(c_i^e) = c_i^-e c_j c_i^e, for i < j; its letters all exceed i."""
        key = (i, j, e)
        cached = self._rules.get(key)
        if cached is not None:
            return cached
        if self.weights[i] + self.weights[j] > self.n:
            value = self.letter(j)
        else:
            series = _series_mul(
                _series_mul(self._magnus_power(i, -e), self._magnus_letter(j, 1), self.n),
                self._magnus_power(i, e),
                self.n,
            )
            value = self.element(self._peel(series))
        if abs(e) <= _RULE_CACHE_EXPONENT:
            self._rules[key] = value
        return value

    def _conjugate(self, i: int, e: int, j: int, f: int) -> List[Syllable]:
        """A word for (c_j^f)^(c_i^e)."""
        if self.weights[i] + self.weights[j] > self.n:
            return [(j, f)]
        rule = self._rule(i, j, e)
        if abs(f) <= _RULE_CACHE_EXPONENT:
            word = rule.syllables() if f > 0 else [(a, -b) for a, b in reversed(rule.syllables())]
            return word * abs(f)
        return self.power(rule, f).syllables()

    def _collect(self, start: Sequence[int], syllables: Iterable[Syllable]) -> Tuple[int, ...]:
        exps = list(start)
        stack = [s for s in syllables if s[1]]
        stack.reverse()
        weights, n = self.weights, self.n
        while stack:
            i, e = stack.pop()
            tail = [(j, exps[j]) for j in range(i + 1, self.size) if exps[j]]
            exps[i] += e
            if all(weights[i] + weights[j] > n for j, _ in tail):
                continue
            for j, _ in tail:
                exps[j] = 0
            pending: List[Syllable] = []
            for j, f in tail:
                pending.extend(self._conjugate(i, e, j, f))
            pending.reverse()
            stack.extend(pending)
        return tuple(exps)

    def collect(self, w: FreeWord) -> NilpotentElement:
        if w.max_generator > self.k or any(g < 1 for g, _ in w.letters):
            raise InvalidArgument(f"word {w} uses a generator outside 1..{self.k}")
        return self.collect_syllables((g - 1, p) for g, p in w.letters)

    def collect_syllables(self, syllables: Iterable[Syllable]) -> NilpotentElement:
        return self.element(self._collect([0] * self.size, syllables))

    def multiply(self, u: NilpotentElement, v: NilpotentElement) -> NilpotentElement:
        self._check(u, v)
        return self.element(self._collect(u.exponents, v.syllables()))

    def inverse(self, u: NilpotentElement) -> NilpotentElement:
        self._check(u)
        return self.collect_syllables((idx, -e) for idx, e in reversed(u.syllables()))

    def power(self, u: NilpotentElement, e: int) -> NilpotentElement:
        self._check(u)
        base = u if e >= 0 else self.inverse(u)
        out = self.identity()
        e = abs(e)
        while e:
            if e & 1:
                out = self.multiply(out, base)
            e >>= 1
            if e:
                base = self.multiply(base, base)
        return out

    def commutator(self, u: NilpotentElement, v: NilpotentElement) -> NilpotentElement:
        """[u, v] = u^-1 v^-1 u v."""
        self._check(u, v)
        syllables = [(i, -e) for i, e in reversed(u.syllables())]
        syllables += [(i, -e) for i, e in reversed(v.syllables())]
        syllables += u.syllables() + v.syllables()
        return self.collect_syllables(syllables)

    def product(self, elements: Iterable[NilpotentElement]) -> NilpotentElement:
        out = self.identity()
        for u in elements:
            out = self.multiply(out, u)
        return out


@lru_cache(maxsize=64)
def _cached_group(k: int, n: int) -> NilpotentGroup:
    return NilpotentGroup(k, n)


def free_nilpotent_group(k: int, n: int) -> NilpotentGroup:
    """Shared instance per (k, n); caps are checked on every request."""
    if k < 0 or n < 1:
        raise InvalidArgument(f"free nilpotent group needs k >= 0 and n >= 1, got ({k}, {n})")
    check_hall_rank(k, n, "nilpotent.free_nilpotent_group")
    return _cached_group(k, n)


def collect(w: FreeWord, k: int, n: int) -> NilpotentElement:
    return free_nilpotent_group(k, n).collect(w)


def _group_of(u: NilpotentElement, v: Optional[NilpotentElement] = None) -> NilpotentGroup:
    if v is not None and (u.k, u.n) != (v.k, v.n):
        raise InvalidArgument(f"mismatched groups ({u.k}, {u.n}) and ({v.k}, {v.n})")
    return free_nilpotent_group(u.k, u.n)


def nil_multiply(u: NilpotentElement, v: NilpotentElement) -> NilpotentElement:
    return _group_of(u, v).multiply(u, v)


def nil_inverse(u: NilpotentElement) -> NilpotentElement:
    return _group_of(u).inverse(u)


@dataclass(frozen=True)
class GradedLayer:
    """Gamma_w / Gamma_{w+1} of F_k / Gamma_{n+1} matched with Lie_w(Z^k).

    ``pairs`` sends the letter index of a weight-w basic commutator to the Hall
    tree of the same shape.
    """

    k: int
    n: int
    weight: int
    pairs: Tuple[Tuple[int, HallTree], ...]

    @property
    def rank(self) -> int:
        return len(self.pairs)


def graded_layer(k: int, n: int, w: int) -> GradedLayer:
    if not 1 <= w <= n:
        raise InvalidArgument(f"layer weight {w} outside 1..{n}")
    group = free_nilpotent_group(k, n)
    return GradedLayer(
        k, n, w, tuple((group.index[t], t) for t in hall_basis(k, w))
    )


@dataclass(frozen=True)
class NilpotentHom:
    """A homomorphism F_k / Gamma_{n+1} -> F_l / Gamma_{n+1} given on generators."""

    source: int
    target: int
    n: int
    images: Tuple[NilpotentElement, ...]

    def __post_init__(self):
        if len(self.images) != self.source:
            raise InvalidArgument(f"{self.source} generators but {len(self.images)} images")
        for u in self.images:
            if (u.k, u.n) != (self.target, self.n):
                raise InvalidArgument("image does not live in the target group")

    @classmethod
    def identity(cls, k: int, n: int) -> "NilpotentHom":
        group = free_nilpotent_group(k, n)
        return cls(k, k, n, tuple(group.generator(i) for i in range(1, k + 1)))

    @classmethod
    def from_words(cls, source: int, target: int, n: int, words: Sequence[FreeWord]) -> "NilpotentHom":
        group = free_nilpotent_group(target, n)
        return cls(source, target, n, tuple(group.collect(w) for w in words))


@lru_cache(maxsize=256)
def _letter_images(f: NilpotentHom) -> Tuple[NilpotentElement, ...]:
    target = free_nilpotent_group(f.target, f.n)
    source_letters = hall_basis_upto(f.source, f.n)
    images: Dict[HallTree, NilpotentElement] = {}
    for t in source_letters:
        if t.is_leaf:
            images[t] = f.images[t.generator - 1]
        else:
            images[t] = target.commutator(images[t.left], images[t.right])
    return tuple(images[t] for t in source_letters)


def apply_hom(f: NilpotentHom, u: NilpotentElement) -> NilpotentElement:
    if (u.k, u.n) != (f.source, f.n):
        raise InvalidArgument("element does not live in the source group")
    target = free_nilpotent_group(f.target, f.n)
    images = _letter_images(f)
    return target.product(
        target.power(images[idx], e) for idx, e in enumerate(u.exponents) if e
    )


def theory_compose(g: NilpotentHom, f: NilpotentHom) -> NilpotentHom:
    """g after f."""
    if f.target != g.source or f.n != g.n:
        raise InvalidArgument("homomorphisms are not composable")
    return NilpotentHom(f.source, g.target, f.n, tuple(apply_hom(g, u) for u in f.images))


def theory_projection(k: int, s: int, n: int) -> NilpotentHom:
    """The unary operation x_s of Nil_n, as F_1 -> F_k."""
    if not 1 <= s <= k:
        raise InvalidArgument(f"projection index {s} outside 1..{k}")
    return NilpotentHom(1, k, n, (free_nilpotent_group(k, n).generator(s),))


def theory_product(homs: Sequence[NilpotentHom]) -> NilpotentHom:
    """Pair unary operations F_1 -> F_m into a single F_k -> F_m."""
    if not homs:
        raise InvalidArgument("product of no homomorphisms needs an explicit target")
    m, n = homs[0].target, homs[0].n
    for h in homs:
        if h.source != 1 or (h.target, h.n) != (m, n):
            raise InvalidArgument("product factors must be unary operations of one arity")
    return NilpotentHom(len(homs), m, n, tuple(h.images[0] for h in homs))


def theory_diagonal(k: int, n: int) -> NilpotentHom:
    """F_k -> F_1 sending every generator to the single generator."""
    x = free_nilpotent_group(1, n).generator(1)
    return NilpotentHom(k, 1, n, (x,) * k)


@dataclass(frozen=True)
class Presentation:
    generators: Tuple[str, ...]
    relators: Tuple[FreeWord, ...] = ()

    @classmethod
    def parse(cls, generators: Sequence[str], relators: Sequence[str]) -> "Presentation":
        if len(set(generators)) != len(generators):
            raise PresentationFormatError("generator names must be distinct")
        try:
            words = tuple(FreeWord.parse(r, generators) for r in relators)
        except InvalidArgument as e:
            raise PresentationFormatError(str(e)) from None
        for w in words:
            if w.max_generator > len(generators):
                raise PresentationFormatError(f"relator {w} uses an undeclared generator")
        return cls(tuple(generators), words)


@dataclass(frozen=True)
class PolycyclicQuotient:
    """The class-n quotient G / Gamma_{n+1} G of a presented group.

    It is F_k / Gamma_{n+1} modulo the normal subgroup with induced generating
    sequence ``relators`` (distinct leading letters, positive leading exponents).
    """

    k: int
    n: int
    layers: Tuple[AbelianInvariants, ...]
    relators: Tuple[NilpotentElement, ...] = field(default_factory=tuple)

    def relative_orders(self) -> Tuple[int, ...]:
        """Per Hall letter, the leading exponent of the relator at that depth, 0 for infinite."""
        orders = [0] * sum(witt_rank(self.k, w) for w in range(1, self.n + 1))
        for r in self.relators:
            d = _depth(r)
            orders[d] = r.exponents[d]
        return tuple(orders)

    def reduce(self, u: NilpotentElement) -> NilpotentElement:
        """The canonical representative of the coset of ``u``.

        Sifts through the relators in depth order, so every letter with a finite
        relative order m ends up with an exponent in [0, m).
        """
        if (u.k, u.n) != (self.k, self.n):
            raise InvalidArgument("element does not live in the presented group")
        group = free_nilpotent_group(self.k, self.n)
        for r in sorted(self.relators, key=_depth):
            d = _depth(r)
            q = u.exponents[d] // r.exponents[d]
            if q:
                u = group.multiply(u, group.power(r, -q))
        return u

    def same_coset(self, u: NilpotentElement, v: NilpotentElement) -> bool:
        return self.reduce(u) == self.reduce(v)

    def to_dict(self) -> dict:
        return {
            "generators": self.k,
            "class": self.n,
            "layers": [layer.to_dict() for layer in self.layers],
            "relators": [r.to_dict() for r in self.relators],
        }


def _depth(u: NilpotentElement) -> Optional[int]:
    return next((i for i, e in enumerate(u.exponents) if e), None)


class _InducedSequence:
    """Echelon generating sequence of a subgroup of a free nilpotent group."""

    def __init__(self, group: NilpotentGroup):
        self.group = group
        self.by_depth: Dict[int, NilpotentElement] = {}

    def add(self, g: NilpotentElement) -> bool:
        group = self.group
        changed = False
        while True:
            d = _depth(g)
            if d is None:
                return changed
            h = self.by_depth.get(d)
            if h is None:
                self.by_depth[d] = g if g.exponents[d] > 0 else group.inverse(g)
                return True
            a, b = g, h
            while a.exponents[d]:
                if abs(a.exponents[d]) < abs(b.exponents[d]):
                    a, b = b, a
                q = a.exponents[d] // b.exponents[d]
                a = group.multiply(a, group.power(b, -q))
            if b.exponents[d] < 0:
                b = group.inverse(b)
            if b != h:
                self.by_depth[d] = b
                changed = True
            g = a

    def close_normally(self):
        group = self.group
        gens = [group.generator(i) for i in range(1, group.k + 1)]
        while True:
            changed = False
            for g in list(self.by_depth.values()):
                for x in gens:
                    changed |= self.add(group.commutator(g, x))
            elements = list(self.by_depth.values())
            for g, h in combinations(elements, 2):
                changed |= self.add(group.commutator(g, h))
                changed |= self.add(group.commutator(g, group.inverse(h)))
            if not changed:
                return

    def elements(self) -> Tuple[NilpotentElement, ...]:
        return tuple(self.by_depth[d] for d in sorted(self.by_depth))


def quotient_by_elements(group: NilpotentGroup, relators: Iterable[NilpotentElement]) -> PolycyclicQuotient:
    sequence = _InducedSequence(group)
    for r in relators:
        sequence.add(r)
    sequence.close_normally()
    kernel = sequence.elements()
    layers = []
    for w in range(1, group.n + 1):
        vectors = [u.weight_coordinates(w) for u in kernel if group.weights[_depth(u)] == w]
        layers.append(cokernel_invariants(IntMatrix.from_columns(vectors, witt_rank(group.k, w))))
    return PolycyclicQuotient(group.k, group.n, tuple(layers), kernel)


def nilpotent_quotient(P: Presentation, n: int) -> PolycyclicQuotient:
    if n < 1:
        raise InvalidArgument("class must be >= 1")
    group = free_nilpotent_group(len(P.generators), n)
    return quotient_by_elements(group, (group.collect(r) for r in P.relators))
