"""Finite reduced simplicial sets, their reduced linearization and Moore homology.

A q-simplex is written in Eilenberg-Zilber canonical form
``s_{i_1} ... s_{i_k} x`` with ``i_1 > ... > i_k`` and x nondegenerate, and
stored as a :class:`SimplexRef` ``(degeneracies=(i_1, ..., i_k), base=x)``.
"""

from abc import ABC, abstractmethod
from dataclasses import dataclass, field
from itertools import combinations
from typing import Dict, List, Mapping, Optional, Sequence, Tuple

from config import get_settings
from errors import InternalInvariantError, InvalidArgument, ResourceCapExceeded, UnsupportedTorsion
from linalg import (
    AbelianInvariants,
    IntMatrix,
    kernel_lattice,
    rank,
    smith_diagonal,
    vstack,
)
from logs import log_event

BASEPOINT = "*"


@dataclass(frozen=True, order=True)
class SimplexRef:
    degeneracies: Tuple[int, ...]
    base: str

    def __str__(self) -> str:
        prefix = "".join(f"s{i}" for i in self.degeneracies)
        return f"{prefix}{self.base}"

    def to_dict(self) -> dict:
        return {"degeneracies": list(self.degeneracies), "base": self.base}


@dataclass(frozen=True)
class NondegenerateSimplex:
    id: str
    dimension: int
    faces: Tuple[SimplexRef, ...] = ()


def basepoint_ref(dimension: int) -> SimplexRef:
    """The totally degenerate basepoint s_{d-1} ... s_0 * in dimension d."""
    return SimplexRef(tuple(range(dimension - 1, -1, -1)), BASEPOINT)


def normalize_degeneracies(word: Sequence[int]) -> Tuple[int, ...]:
    """Canonical (strictly decreasing) form using s_a s_b = s_{b+1} s_a for a <= b."""
    w = list(word)
    changed = True
    while changed:
        changed = False
        for p in range(len(w) - 1):
            a, b = w[p], w[p + 1]
            if a <= b:
                w[p], w[p + 1] = b + 1, a
                changed = True
    return tuple(w)


class SimplicialSet:
    """A finite simplicial set given by its nondegenerate simplices.

    The object is not validated on construction so that broken inputs can be
    reported by :func:`validate`.
    """

    def __init__(self, name: str, simplices: Sequence[Sequence[NondegenerateSimplex]]):
        self.name = name
        self._by_dimension: Tuple[Tuple[NondegenerateSimplex, ...], ...] = tuple(
            tuple(level) for level in simplices
        )
        self._by_id: Dict[str, NondegenerateSimplex] = {}
        for level in self._by_dimension:
            for x in level:
                self._by_id.setdefault(x.id, x)
        self._simplices_cache: Dict[int, Tuple[SimplexRef, ...]] = {}

    @property
    def dimension(self) -> int:
        dims = [q for q, level in enumerate(self._by_dimension) if level]
        return max(dims) if dims else -1

    def nondegenerate(self, q: int) -> Tuple[NondegenerateSimplex, ...]:
        if 0 <= q < len(self._by_dimension):
            return self._by_dimension[q]
        return ()

    def all_nondegenerate(self) -> List[NondegenerateSimplex]:
        return [x for level in self._by_dimension for x in level]

    def has(self, simplex_id: str) -> bool:
        return simplex_id in self._by_id

    def get(self, simplex_id: str) -> NondegenerateSimplex:
        try:
            return self._by_id[simplex_id]
        except KeyError:
            raise InvalidArgument(f"no nondegenerate simplex with id {simplex_id!r}") from None

    def ref_dimension(self, ref: SimplexRef) -> int:
        return self.get(ref.base).dimension + len(ref.degeneracies)

    @property
    def is_reduced(self) -> bool:
        vertices = self.nondegenerate(0)
        return len(vertices) == 1 and vertices[0].id == BASEPOINT

    def face(self, ref: SimplexRef, i: int) -> SimplexRef:
        q = self.ref_dimension(ref)
        if q < 1 or not 0 <= i <= q:
            raise InvalidArgument(f"d{i} is not defined on the {q}-simplex {ref}")
        j: Optional[int] = i
        out: List[int] = []
        for s in ref.degeneracies:
            if j is None:
                out.append(s)
            elif j < s:
                out.append(s - 1)
            elif j in (s, s + 1):
                j = None
            else:
                out.append(s)
                j -= 1
        if j is None:
            return SimplexRef(normalize_degeneracies(out), ref.base)
        f = self.get(ref.base).faces[j]
        return SimplexRef(normalize_degeneracies(out + list(f.degeneracies)), f.base)

    def degeneracy(self, ref: SimplexRef, j: int) -> SimplexRef:
        q = self.ref_dimension(ref)
        if not 0 <= j <= q:
            raise InvalidArgument(f"s{j} is not defined on the {q}-simplex {ref}")
        return SimplexRef(normalize_degeneracies((j,) + ref.degeneracies), ref.base)

    def simplices(self, q: int) -> Tuple[SimplexRef, ...]:
        """Every q-simplex, nondegenerate ones first, in a fixed order."""
        if q in self._simplices_cache:
            return self._simplices_cache[q]
        refs = []
        for m in range(q, -1, -1):
            for x in self.nondegenerate(m):
                for word in combinations(range(q - 1, -1, -1), q - m):
                    refs.append(SimplexRef(tuple(word), x.id))
        self._simplices_cache[q] = tuple(refs)
        return self._simplices_cache[q]

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "simplices": [
                [
                    {"id": x.id, "faces": [f.to_dict() for f in x.faces]}
                    for x in level
                ]
                for level in self._by_dimension
            ],
        }

    def __repr__(self) -> str:
        counts = [len(level) for level in self._by_dimension]
        return f"SimplicialSet({self.name!r}, nondegenerate={counts})"


@dataclass(frozen=True)
class Violation:
    simplex: str
    identity: str
    detail: str = ""

    def to_dict(self) -> dict:
        return {"simplex": self.simplex, "identity": self.identity, "detail": self.detail}


@dataclass(frozen=True)
class ValidationReport:
    violations: Tuple[Violation, ...] = field(default_factory=tuple)

    @property
    def ok(self) -> bool:
        return not self.violations

    def to_dict(self) -> dict:
        return {
            "ok": self.ok,
            "violations": [v.to_dict() for v in self.violations],
        }


def structural_violations(X: SimplicialSet) -> List[Violation]:
    found = []
    vertices = X.nondegenerate(0)
    if len(vertices) != 1:
        found.append(
            Violation("*", "reduced", f"expected exactly one 0-simplex, found {len(vertices)}")
        )
    elif vertices[0].id != BASEPOINT:
        found.append(Violation(vertices[0].id, "reduced", "the unique vertex must have id '*'"))
    seen = set()
    for q, level in enumerate(X._by_dimension):
        for x in level:
            if x.id in seen:
                found.append(Violation(x.id, "unique-id", "simplex id is used more than once"))
            seen.add(x.id)
            if x.dimension != q:
                found.append(Violation(x.id, "dimension", f"listed in dimension {q}"))
            expected = q + 1 if q >= 1 else 0
            if len(x.faces) != expected:
                found.append(
                    Violation(x.id, "face-count", f"has {len(x.faces)} faces, expected {expected}")
                )
                continue
            for i, f in enumerate(x.faces):
                if not X.has(f.base):
                    found.append(Violation(x.id, f"d{i}", f"refers to unknown simplex {f.base!r}"))
                    continue
                word = f.degeneracies
                if any(a <= b for a, b in zip(word, word[1:])) or any(s < 0 for s in word):
                    found.append(
                        Violation(x.id, f"d{i}", f"degeneracy word {list(word)} is not strictly decreasing")
                    )
                    continue
                if word and word[0] > q - 2:
                    found.append(Violation(x.id, f"d{i}", f"degeneracy index {word[0]} out of range"))
                    continue
                if X.ref_dimension(f) != q - 1:
                    found.append(
                        Violation(x.id, f"d{i}", f"face has dimension {X.ref_dimension(f)}, expected {q - 1}")
                    )
    return found


def _identity_violations(X: SimplicialSet) -> List[Violation]:
    found = []
    for x in X.all_nondegenerate():
        q = x.dimension
        ref = SimplexRef((), x.id)
        for j in range(q + 1):
            for i in range(j):
                if q < 2:
                    continue
                lhs = X.face(X.face(ref, j), i)
                rhs = X.face(X.face(ref, i), j - 1)
                if lhs != rhs:
                    found.append(
                        Violation(x.id, f"d{i}d{j}=d{j - 1}d{i}", f"{lhs} != {rhs}")
                    )
        for j in range(q + 1):
            y = X.degeneracy(ref, j)
            for i in range(q + 2):
                lhs = X.face(y, i)
                if i < j:
                    rhs = X.degeneracy(X.face(ref, i), j - 1)
                elif i in (j, j + 1):
                    rhs = ref
                else:
                    rhs = X.degeneracy(X.face(ref, i - 1), j)
                if lhs != rhs:
                    found.append(Violation(x.id, f"d{i}s{j}", f"{lhs} != {rhs}"))
    return found


def validate(X: SimplicialSet) -> ValidationReport:
    found = structural_violations(X)
    if not found:
        found = _identity_violations(X)
    return ValidationReport(tuple(found))


@dataclass(frozen=True)
class SimplicialMap:
    """f : X -> Y given on the nondegenerate simplices of X, extended by f(s_I x) = s_I f(x)."""

    source: SimplicialSet
    target: SimplicialSet
    images: Tuple[Tuple[str, SimplexRef], ...]

    @classmethod
    def of(cls, source: SimplicialSet, target: SimplicialSet, images: Mapping[str, SimplexRef]) -> "SimplicialMap":
        return cls(source, target, tuple(sorted(images.items())))

    def image(self, simplex_id: str) -> SimplexRef:
        for name, ref in self.images:
            if name == simplex_id:
                return ref
        raise InvalidArgument(f"{self.source.name} -> {self.target.name} has no image for {simplex_id!r}")

    def __call__(self, ref: SimplexRef) -> SimplexRef:
        y = self.image(ref.base)
        return SimplexRef(normalize_degeneracies(ref.degeneracies + y.degeneracies), y.base)

    def violations(self) -> List[Violation]:
        """Missing images, dimension changes and faces that do not commute with f."""
        X, Y = self.source, self.target
        found = []
        assigned = dict(self.images)
        for x in X.all_nondegenerate():
            y = assigned.get(x.id)
            if y is None:
                found.append(Violation(x.id, "defined", "no image"))
                continue
            if not Y.has(y.base):
                found.append(Violation(x.id, "defined", f"image {y} is not a simplex of {Y.name}"))
                continue
            if Y.ref_dimension(y) != x.dimension:
                found.append(Violation(x.id, "dimension", f"image {y} has dimension {Y.ref_dimension(y)}"))
                continue
            for i, face in enumerate(x.faces):
                if face.base in assigned and self(face) != Y.face(y, i):
                    found.append(Violation(x.id, f"f d{i}=d{i} f", f"{self(face)} != {Y.face(y, i)}"))
        return found

    def compose(self, before: "SimplicialMap") -> "SimplicialMap":
        """self after ``before``."""
        if before.target is not self.source and before.target.name != self.source.name:
            raise InvalidArgument(f"cannot compose {before.target.name} -> with {self.source.name} ->")
        return SimplicialMap.of(
            before.source, self.target, {name: self(ref) for name, ref in before.images}
        )


def identity_map(X: SimplicialSet) -> SimplicialMap:
    return SimplicialMap.of(X, X, {x.id: SimplexRef((), x.id) for x in X.all_nondegenerate()})


def simplicial_map(
    source: SimplicialSet, target: SimplicialSet, images: Mapping[str, SimplexRef]
) -> SimplicialMap:
    """A checked simplicial map; raises InvalidArgument on the first violation."""
    f = SimplicialMap.of(source, target, images)
    found = f.violations()
    if found:
        v = found[0]
        raise InvalidArgument(f"not a simplicial map: {v.identity} fails at {v.simplex}: {v.detail}")
    return f


def wedge(X: SimplicialSet, Y: SimplicialSet) -> SimplicialSet:
    """One-point union; ids of Y that clash with X get primes appended."""
    if not (X.is_reduced and Y.is_reduced):
        raise InvalidArgument("wedge needs two reduced simplicial sets")
    taken = {x.id for x in X.all_nondegenerate()}
    renamed = {BASEPOINT: BASEPOINT}
    for y in Y.all_nondegenerate():
        if y.id == BASEPOINT:
            continue
        new_id = y.id
        while new_id in taken:
            new_id += "'"
        taken.add(new_id)
        renamed[y.id] = new_id
    top = max(X.dimension, Y.dimension)
    levels = []
    for q in range(top + 1):
        level = list(X.nondegenerate(q))
        if q > 0:
            level += [
                NondegenerateSimplex(
                    renamed[y.id],
                    q,
                    tuple(SimplexRef(f.degeneracies, renamed[f.base]) for f in y.faces),
                )
                for y in Y.nondegenerate(q)
            ]
        levels.append(level)
    return SimplicialSet(f"{X.name}v{Y.name}", levels)


class SimplicialAbelianGroup(ABC):
    """Degreewise finitely generated abelian groups with face/degeneracy matrices.

    ``face(q, i)`` maps degree q to degree q-1 and is a ``rank(q-1) x rank(q)``
    matrix on the chosen generators.
    """

    @abstractmethod
    def rank(self, q: int) -> int: ...

    def torsion(self, q: int) -> Tuple[int, ...]:
        return ()

    @abstractmethod
    def face(self, q: int, i: int) -> IntMatrix: ...

    @abstractmethod
    def degeneracy(self, q: int, j: int) -> IntMatrix: ...

    def invariants(self, q: int) -> AbelianInvariants:
        return AbelianInvariants.from_orders(self.rank(q), self.torsion(q))


class ReducedLinearization(SimplicialAbelianGroup):
    """Z~X = ZX / Z*: degree q is free on the q-simplices other than the basepoint's."""

    def __init__(self, X: SimplicialSet):
        self.space = X
        self._basis: Dict[int, Tuple[SimplexRef, ...]] = {}
        self._index: Dict[int, Dict[SimplexRef, int]] = {}

    def basis(self, q: int) -> Tuple[SimplexRef, ...]:
        if q not in self._basis:
            self._basis[q] = tuple(r for r in self.space.simplices(q) if r.base != BASEPOINT)
            self._index[q] = {r: n for n, r in enumerate(self._basis[q])}
        return self._basis[q]

    def rank(self, q: int) -> int:
        return len(self.basis(q))

    def _induced(self, source: int, target: int, op) -> IntMatrix:
        self.basis(target)
        index = self._index[target]
        columns = []
        for ref in self.basis(source):
            image = op(ref)
            col = [0] * len(index)
            if image.base != BASEPOINT:
                col[index[image]] = 1
            columns.append(col)
        return IntMatrix.from_columns(columns, len(index))

    def face(self, q: int, i: int) -> IntMatrix:
        return self._induced(q, q - 1, lambda r: self.space.face(r, i))

    def degeneracy(self, q: int, j: int) -> IntMatrix:
        return self._induced(q, q + 1, lambda r: self.space.degeneracy(r, j))


def reduced_linearization(X: SimplicialSet) -> ReducedLinearization:
    report = validate(X)
    if not report.ok:
        raise InvalidArgument(f"{X.name} is not a valid reduced simplicial set: {report.violations[0]}")
    return ReducedLinearization(X)


def _normalized_lattice(A: SimplicialAbelianGroup, q: int):
    """N_q = intersection of ker d_i for i = 1..q."""
    n = A.rank(q)
    if q == 0:
        return kernel_lattice(IntMatrix.zeros(0, n))
    return kernel_lattice(vstack([A.face(q, i) for i in range(1, q + 1)], n))


def moore_complex(A: SimplicialAbelianGroup, q: int) -> IntMatrix:
    """d_0 : N_q -> N_{q-1} in lattice coordinates."""
    source = _normalized_lattice(A, q)
    if q == 0:
        return IntMatrix.zeros(0, source.rank)
    target = _normalized_lattice(A, q - 1)
    image = A.face(q, 0) @ source.basis
    coordinates = target.projection @ image
    if target.basis @ coordinates != image:
        raise InternalInvariantError(f"d0 does not map N_{q} into N_{q - 1}")
    return coordinates


def moore_homology(A: SimplicialAbelianGroup, s: int) -> AbelianInvariants:
    if s < 0:
        raise InvalidArgument("homology degree must be nonnegative")
    settings = get_settings()
    if s + 1 > settings.MAX_DEGREE:
        log_event(
            "warning",
            "degree cap exceeded",
            {"degree": s + 1, "cap": settings.MAX_DEGREE},
            source="simplicial.moore_homology",
        )
        raise ResourceCapExceeded(
            f"homology in degree {s} needs degree {s + 1} > cap {settings.MAX_DEGREE}"
        )
    for q in range(s + 2):
        if A.torsion(q):
            raise UnsupportedTorsion(
                f"degree {q} has torsion {list(A.torsion(q))}; Moore homology is computed on free degrees only"
            )
    outgoing = moore_complex(A, s)
    incoming = moore_complex(A, s + 1)
    cycles = outgoing.ncols - rank(outgoing)
    diag = smith_diagonal(incoming)
    return AbelianInvariants.from_orders(cycles - len(diag), diag)


def reduced_homology(X: SimplicialSet, s: int) -> AbelianInvariants:
    return moore_homology(reduced_linearization(X), s)
