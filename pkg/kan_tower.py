"""Kan's loop group GX and its degreewise lower central series.

Everything is computed at the loop-group level: the delooping B is never
built, so pi_s of anything here is pi_{s+1} of its delooping. In particular
pi_s(GX / [GX, GX]) = H~_{s+1}(X).

Face and degeneracy conventions, for x a (q+1)-simplex of X and tau(x) the
corresponding degree-q generator:

    d_0 tau(x) = tau(d_1 x) tau(d_0 x)^-1
    d_i tau(x) = tau(d_{i+1} x)          (i >= 1)
    s_i tau(x) = tau(s_{i+1} x)
    tau(s_0 y) = 1
"""

from dataclasses import dataclass
from typing import Dict, List, Optional, Tuple

from config import get_settings
from errors import InternalInvariantError, InvalidArgument, ResourceCapExceeded
from hall_lie import Bracket, HallTree, LieElement, hall_basis, lie_normalize, lie_of_map, witt_rank
from linalg import AbelianInvariants, IntMatrix
from logs import log_event
from nilpotent import (
    FreeWord,
    NilpotentElement,
    NilpotentGroup,
    NilpotentHom,
    PolycyclicQuotient,
    apply_hom,
    check_hall_rank,
    free_nilpotent_group,
    quotient_by_elements,
)
from simplicial import (
    SimplexRef,
    SimplicialAbelianGroup,
    SimplicialMap,
    SimplicialSet,
    Violation,
    moore_homology,
    validate,
)
from spaces import wedge_of_circles


def _check_degree(q: int, source: str):
    settings = get_settings()
    if q > settings.MAX_DEGREE:
        log_event(
            "warning",
            "degree cap exceeded",
            {"degree": q, "cap": settings.MAX_DEGREE},
            source=source,
        )
        raise ResourceCapExceeded(f"degree {q} exceeds the cap {settings.MAX_DEGREE}")


class LoopGroup:
    """GX: degree q is free on the (q+1)-simplices of X outside the image of s_0."""

    def __init__(self, X: SimplicialSet):
        self.space = X
        self._generators: Dict[int, Tuple[SimplexRef, ...]] = {}
        self._index: Dict[int, Dict[SimplexRef, int]] = {}
        self._faces: Dict[Tuple[int, int], Tuple[FreeWord, ...]] = {}
        self._degeneracies: Dict[Tuple[int, int], Tuple[FreeWord, ...]] = {}

    def generators(self, q: int) -> Tuple[SimplexRef, ...]:
        if q < 0:
            raise InvalidArgument("loop group degrees start at 0")
        _check_degree(q, "kan_tower.LoopGroup.generators")
        if q not in self._generators:
            gens = tuple(
                r for r in self.space.simplices(q + 1)
                if not (r.degeneracies and r.degeneracies[-1] == 0)
            )
            self._generators[q] = gens
            self._index[q] = {r: i for i, r in enumerate(gens)}
        return self._generators[q]

    def rank(self, q: int) -> int:
        return len(self.generators(q))

    def tau(self, q: int, ref: SimplexRef) -> FreeWord:
        """The degree-q element named by the (q+1)-simplex ``ref``."""
        self.generators(q)
        i = self._index[q].get(ref)
        return FreeWord() if i is None else FreeWord(((i + 1, 1),))

    def face_words(self, q: int, i: int) -> Tuple[FreeWord, ...]:
        if q < 1 or not 0 <= i <= q:
            raise InvalidArgument(f"d{i} is not defined in degree {q}")
        key = (q, i)
        if key not in self._faces:
            X = self.space
            words = []
            for x in self.generators(q):
                if i == 0:
                    words.append(self.tau(q - 1, X.face(x, 1)) * self.tau(q - 1, X.face(x, 0)).inverse())
                else:
                    words.append(self.tau(q - 1, X.face(x, i + 1)))
            self._faces[key] = tuple(words)
        return self._faces[key]

    def degeneracy_words(self, q: int, j: int) -> Tuple[FreeWord, ...]:
        if not 0 <= j <= q:
            raise InvalidArgument(f"s{j} is not defined in degree {q}")
        key = (q, j)
        if key not in self._degeneracies:
            X = self.space
            self._degeneracies[key] = tuple(
                self.tau(q + 1, X.degeneracy(x, j + 1)) for x in self.generators(q)
            )
        return self._degeneracies[key]

    def check_identities(self, q: int) -> List[Violation]:
        """Simplicial group identities on the degree-q generators."""
        found = []

        def d(p, i, w):
            return w.substitute(self.face_words(p, i))

        def s(p, j, w):
            return w.substitute(self.degeneracy_words(p, j))

        for g, x in enumerate(self.generators(q)):
            w = FreeWord(((g + 1, 1),))
            if q >= 2:
                for j in range(q + 1):
                    for i in range(j):
                        if d(q - 1, i, d(q, j, w)) != d(q - 1, j - 1, d(q, i, w)):
                            found.append(Violation(str(x), f"d{i}d{j}=d{j - 1}d{i}"))
            for j in range(q + 1):
                up = s(q, j, w)
                for i in range(q + 2):
                    lhs = d(q + 1, i, up)
                    if i < j:
                        rhs = s(q - 1, j - 1, d(q, i, w))
                    elif i in (j, j + 1):
                        rhs = w
                    else:
                        rhs = s(q - 1, j, d(q, i - 1, w))
                    if lhs != rhs:
                        found.append(Violation(str(x), f"d{i}s{j}"))
                for i in range(j + 1):
                    if s(q + 1, i, s(q, j, w)) != s(q + 1, j + 1, s(q, i, w)):
                        found.append(Violation(str(x), f"s{i}s{j}=s{j + 1}s{i}"))
        return found


def loop_group(X: SimplicialSet) -> LoopGroup:
    report = validate(X)
    if not report.ok:
        raise InvalidArgument(f"{X.name} is not a valid reduced simplicial set: {report.violations[0]}")
    return LoopGroup(X)


def _abelianize(words: Tuple[FreeWord, ...], nrows: int) -> IntMatrix:
    columns = []
    for w in words:
        col = [0] * nrows
        for g, p in w.letters:
            col[g - 1] += p
        columns.append(col)
    return IntMatrix.from_columns(columns, nrows)


class AbelianizedLoop(SimplicialAbelianGroup):
    """GX / [GX, GX]: Z~X with the loop-group degree shift, pi_s = H~_{s+1} X."""

    def __init__(self, G: LoopGroup):
        self.loop = G

    def rank(self, q: int) -> int:
        return self.loop.rank(q)

    def face(self, q: int, i: int) -> IntMatrix:
        return _abelianize(self.loop.face_words(q, i), self.loop.rank(q - 1))

    def degeneracy(self, q: int, j: int) -> IntMatrix:
        return _abelianize(self.loop.degeneracy_words(q, j), self.loop.rank(q + 1))


def abelianized_loop(X: SimplicialSet) -> AbelianizedLoop:
    return AbelianizedLoop(loop_group(X))


def _relabel(t: HallTree, relabel: List[Optional[int]]) -> Optional[Bracket]:
    if t.is_leaf:
        return relabel[t.generator - 1]
    left, right = _relabel(t.left, relabel), _relabel(t.right, relabel)
    if left is None or right is None:
        return None
    return (left, right)


class SimplicialGroupTower:
    """GX / Gamma_{n+1} GX, degreewise free nilpotent of class n."""

    def __init__(self, G: LoopGroup, n: int):
        if n < 1:
            raise InvalidArgument("tower class must be >= 1")
        self.loop = G
        self.n = n
        self._faces: Dict[Tuple[int, int], NilpotentHom] = {}
        self._degeneracies: Dict[Tuple[int, int], NilpotentHom] = {}

    def group(self, q: int) -> NilpotentGroup:
        return free_nilpotent_group(self.loop.rank(q), self.n)

    def face(self, q: int, i: int) -> NilpotentHom:
        key = (q, i)
        if key not in self._faces:
            words = self.loop.face_words(q, i)
            self._faces[key] = NilpotentHom.from_words(
                self.loop.rank(q), self.loop.rank(q - 1), self.n, words
            )
        return self._faces[key]

    def degeneracy(self, q: int, j: int) -> NilpotentHom:
        key = (q, j)
        if key not in self._degeneracies:
            words = self.loop.degeneracy_words(q, j)
            self._degeneracies[key] = NilpotentHom.from_words(
                self.loop.rank(q), self.loop.rank(q + 1), self.n, words
            )
        return self._degeneracies[key]

    def previous(self) -> "SimplicialGroupTower":
        if self.n == 1:
            raise InvalidArgument("class 1 is the bottom of the tower")
        return tower_stage(self.loop, self.n - 1)

    def project(self, u: NilpotentElement, n: Optional[int] = None) -> NilpotentElement:
        """The tower map to class n (default n - 1)."""
        return u.truncate(self.n - 1 if n is None else n)

    def check_identities(self, q: int) -> List[Violation]:
        """Face identities d_i d_j = d_{j-1} d_i on generators, in normal form."""
        found = []
        if q < 2:
            return found
        group = self.group(q)
        for g in range(1, group.k + 1):
            u = group.generator(g)
            for j in range(q + 1):
                for i in range(j):
                    lhs = apply_hom(self.face(q - 1, i), apply_hom(self.face(q, j), u))
                    rhs = apply_hom(self.face(q - 1, j - 1), apply_hom(self.face(q, i), u))
                    if lhs != rhs:
                        found.append(Violation(f"generator {g}", f"d{i}d{j}=d{j - 1}d{i}"))
        return found

    def maps_commute(self, q: int) -> bool:
        """The tower map to class n - 1 commutes with every face in degree q."""
        lower = self.previous()
        group = self.group(q)
        for i in range(q + 1):
            for g in range(1, group.k + 1):
                u = group.generator(g)
                down = self.project(apply_hom(self.face(q, i), u))
                if down != apply_hom(lower.face(q, i), self.project(u)):
                    return False
        return True

    def kernel_is_central(self, q: int) -> bool:
        """Weight-n letters die under the tower map and commute with the generators."""
        group = self.group(q)
        top = [i for i, w in enumerate(group.weights) if w == self.n]
        for i in top:
            c = group.letter(i)
            if self.n > 1 and not self.project(c).is_identity:
                return False
            for g in range(1, group.k + 1):
                if not group.commutator(c, group.generator(g)).is_identity:
                    return False
        return True

    def layer_face(self, q: int, i: int) -> IntMatrix:
        """Induced map Gamma_n/Gamma_{n+1} in degree q -> degree q-1, in Hall coordinates."""
        group = self.group(q)
        f = self.face(q, i)
        return self._layer_matrix(group, f, self.loop.rank(q - 1))

    def layer_degeneracy(self, q: int, j: int) -> IntMatrix:
        """s_j on the layer. Degeneracies send generators to generators or 1, so the
        weight-n letter c_T goes to the commutator on the relabelled tree."""
        words = self.loop.degeneracy_words(q, j)
        relabel: List[Optional[int]] = []
        for w in words:
            if len(w.letters) > 1 or (w.letters and w.letters[0][1] != 1):
                raise InternalInvariantError(f"s{j} in degree {q} sends a generator to {w}")
            relabel.append(w.letters[0][0] if w.letters else None)
        target = self.loop.rank(q + 1)
        columns = []
        for t in hall_basis(self.loop.rank(q), self.n):
            expr = _relabel(t, relabel)
            value = LieElement.zero(target, self.n) if expr is None else lie_normalize([(1, expr)], target, self.n)
            columns.append(value.vector())
        return IntMatrix.from_columns(columns, witt_rank(target, self.n))

    def collected_layer_degeneracy(self, q: int, j: int) -> IntMatrix:
        """s_j on the layer through collection in the class-n group of degree q + 1."""
        return self._layer_matrix(self.group(q), self.degeneracy(q, j), self.loop.rank(q + 1))

    def _layer_matrix(self, group: NilpotentGroup, f: NilpotentHom, target_rank: int) -> IntMatrix:
        n = self.n
        columns = []
        for idx, w in enumerate(group.weights):
            if w != n:
                continue
            image = apply_hom(f, group.letter(idx))
            if any(image.exponents[: len(image.exponents) - witt_rank(target_rank, n)]):
                raise InternalInvariantError(f"a weight-{n} letter left Gamma_{n}")
            columns.append(image.weight_coordinates(n))
        return IntMatrix.from_columns(columns, witt_rank(target_rank, n))


def tower_stage(G: LoopGroup, n: int) -> SimplicialGroupTower:
    if n < 1:
        raise InvalidArgument("tower class must be >= 1")
    check_hall_rank(0, n, "kan_tower.tower_stage")
    return SimplicialGroupTower(G, n)


class GammaLayer(SimplicialAbelianGroup):
    """Gamma_n GX / Gamma_{n+1} GX computed through collection."""

    def __init__(self, tower: SimplicialGroupTower):
        self.tower = tower

    def rank(self, q: int) -> int:
        return witt_rank(self.tower.loop.rank(q), self.tower.n)

    def face(self, q: int, i: int) -> IntMatrix:
        return self.tower.layer_face(q, i)

    def degeneracy(self, q: int, j: int) -> IntMatrix:
        return self.tower.layer_degeneracy(q, j)


class LieLayer(SimplicialAbelianGroup):
    """Lie_n applied degreewise to GX / [GX, GX]."""

    def __init__(self, base: AbelianizedLoop, n: int):
        self.base = base
        self.n = n
        self._faces: Dict[Tuple[int, int], IntMatrix] = {}
        self._degeneracies: Dict[Tuple[int, int], IntMatrix] = {}

    def rank(self, q: int) -> int:
        k = self.base.rank(q)
        check_hall_rank(k, self.n, "kan_tower.LieLayer")
        return witt_rank(k, self.n)

    def face(self, q: int, i: int) -> IntMatrix:
        if (q, i) not in self._faces:
            self.rank(q)
            self._faces[(q, i)] = lie_of_map(self.base.face(q, i), self.n)
        return self._faces[(q, i)]

    def degeneracy(self, q: int, j: int) -> IntMatrix:
        if (q, j) not in self._degeneracies:
            self.rank(q + 1)
            self._degeneracies[(q, j)] = lie_of_map(self.base.degeneracy(q, j), self.n)
        return self._degeneracies[(q, j)]


@dataclass(frozen=True)
class LayerObject:
    """Both presentations of the n-th layer and the comparison between them.

    The comparison sends the weight-n basic commutator c_T to the Hall tree T,
    so in Hall coordinates it is the identity matrix.
    """

    n: int
    gamma: GammaLayer
    lie: LieLayer

    def comparison(self, q: int) -> IntMatrix:
        return IntMatrix.identity(self.gamma.rank(q))

    def is_isomorphism(self, q: int) -> bool:
        """Ranks agree in degree q and the comparison commutes with the faces out of
        degree q and the degeneracies into it.

        Degrees 0..q together cover every structure map among them.
        """
        if self.gamma.rank(q) != self.lie.rank(q):
            return False
        if q == 0:
            return True
        c = self.comparison
        for i in range(q + 1):
            if self.lie.face(q, i) @ c(q) != c(q - 1) @ self.gamma.face(q, i):
                return False
        for j in range(q):
            if self.lie.degeneracy(q - 1, j) @ c(q - 1) != c(q) @ self.gamma.degeneracy(q - 1, j):
                return False
        return True


def layer(G: LoopGroup, n: int) -> LayerObject:
    tower = tower_stage(G, n)
    return LayerObject(n, GammaLayer(tower), LieLayer(AbelianizedLoop(G), n))


def pi0(T: SimplicialGroupTower) -> PolycyclicQuotient:
    """pi_0 = degree-0 group modulo the normal closure of d_0(g) d_1(g)^-1."""
    group = T.group(0)
    d0, d1 = T.face(1, 0), T.face(1, 1)
    relators = [
        group.multiply(a, group.inverse(b)) for a, b in zip(d0.images, d1.images)
    ]
    log_event(
        "debug",
        "pi0 relators collected",
        {"space": T.loop.space.name, "class": T.n, "relators": len(relators)},
        source="kan_tower.pi0",
    )
    return quotient_by_elements(group, relators)


def layer_homotopy(G: LoopGroup, n: int, s: int) -> AbelianInvariants:
    """pi_s of Lie_n(GX / [GX, GX]), the n-th layer at the loop-group level."""
    if n < 1 or s < 0:
        raise InvalidArgument("layer_homotopy needs n >= 1 and s >= 0")
    check_hall_rank(0, n, "kan_tower.layer_homotopy")
    return moore_homology(LieLayer(AbelianizedLoop(G), n), s)


def first_nonvanishing(G: LoopGroup, n: int, s_max: int) -> Optional[int]:
    """Least s <= s_max with layer_homotopy(G, n, s) nonzero, or None."""
    for s in range(s_max + 1):
        if not layer_homotopy(G, n, s).is_trivial:
            return s
    return None


def layer_homotopy_table(G: LoopGroup, n_max: int, s_max: int) -> Dict[int, List[AbelianInvariants]]:
    return {
        n: [layer_homotopy(G, n, s) for s in range(s_max + 1)]
        for n in range(1, n_max + 1)
    }


class LoopGroupMap:
    """G(f) : GX -> GY for a simplicial map f, tau(x) -> tau(f(x)) on generators."""

    def __init__(self, f: SimplicialMap, source: LoopGroup, target: LoopGroup):
        self.map = f
        self.source = source
        self.target = target
        self._words: Dict[int, Tuple[FreeWord, ...]] = {}

    def words(self, q: int) -> Tuple[FreeWord, ...]:
        if q not in self._words:
            self._words[q] = tuple(
                self.target.tau(q, self.map(x)) for x in self.source.generators(q)
            )
        return self._words[q]

    def tower_hom(self, n: int, q: int) -> NilpotentHom:
        """Degree q of the induced map of class-n towers."""
        return NilpotentHom.from_words(self.source.rank(q), self.target.rank(q), n, self.words(q))

    def abelianized(self, q: int) -> IntMatrix:
        return _abelianize(self.words(q), self.target.rank(q))

    def layer_map(self, n: int, q: int) -> IntMatrix:
        """Degree q of Lie_n of the abelianized map, in Hall coordinates."""
        return lie_of_map(self.abelianized(q), n)

    def check_naturality(self, q: int) -> List[Violation]:
        """Faces out of degree q and degeneracies out of degree q against the generator images."""
        S, T = self.source, self.target
        found = []
        for g, x in enumerate(S.generators(q)):
            image = self.words(q)[g]
            if q >= 1:
                for i in range(q + 1):
                    lhs = image.substitute(T.face_words(q, i))
                    rhs = S.face_words(q, i)[g].substitute(self.words(q - 1))
                    if lhs != rhs:
                        found.append(Violation(str(x), f"d{i}G(f)=G(f)d{i}", f"{lhs} != {rhs}"))
            for j in range(q + 1):
                lhs = image.substitute(T.degeneracy_words(q, j))
                rhs = S.degeneracy_words(q, j)[g].substitute(self.words(q + 1))
                if lhs != rhs:
                    found.append(Violation(str(x), f"s{j}G(f)=G(f)s{j}", f"{lhs} != {rhs}"))
        return found


def induced_map(f: SimplicialMap) -> LoopGroupMap:
    found = f.violations()
    if found:
        raise InvalidArgument(f"not a simplicial map: {found[0].identity} fails at {found[0].simplex}")
    return LoopGroupMap(f, loop_group(f.source), loop_group(f.target))


@dataclass(frozen=True)
class WedgeComparison:
    """F_k / Gamma_{n+1} -> pi_0 of the class-n tower of the wedge of k circles."""

    k: int
    n: int
    hom: NilpotentHom
    quotient: PolycyclicQuotient

    def is_isomorphism(self) -> bool:
        if self.hom.target != self.k or self.quotient.relators:
            return False
        group = free_nilpotent_group(self.k, self.n)
        return set(self.hom.images) == {group.generator(i) for i in range(1, self.k + 1)}


def wedge_pi0_comparison(k: int, n: int) -> WedgeComparison:
    """Send the i-th free generator to the loop around the i-th circle."""
    if k < 1:
        raise InvalidArgument("wedge comparison needs at least one circle")
    G = loop_group(wedge_of_circles(k))
    T = tower_stage(G, n)
    words = [G.tau(0, SimplexRef((), f"x{i}")) for i in range(1, k + 1)]
    hom = NilpotentHom.from_words(k, G.rank(0), n, words)
    return WedgeComparison(k, n, hom, pi0(T))
