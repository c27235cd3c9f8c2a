import pytest

from errors import InvalidArgument, ResourceCapExceeded, UnsupportedTorsion
from linalg import AbelianInvariants, IntMatrix
from simplicial import (
    BASEPOINT,
    NondegenerateSimplex,
    SimplexRef,
    SimplicialAbelianGroup,
    SimplicialMap,
    SimplicialSet,
    identity_map,
    moore_complex,
    moore_homology,
    normalize_degeneracies,
    reduced_homology,
    reduced_linearization,
    simplicial_map,
    validate,
    wedge,
)
from spaces import (
    circle_two_edges,
    collapse_circle_model,
    collapse_sphere_model,
    moore,
    point,
    sphere,
    sphere_two_cells,
    standard_space,
    wedge_fold,
    wedge_inclusion,
    wedge_of_circles,
)
from verification.oracles import cellular_homology


def test_sphere_one_is_minimal():
    s1 = sphere(1)
    assert [x.id for x in s1.all_nondegenerate()] == [BASEPOINT, "s1"]
    assert s1.get("s1").faces == (SimplexRef((), BASEPOINT),) * 2


def test_sphere_two_faces_are_degenerate_basepoints():
    s2 = standard_space("sphere(2)")
    assert len(s2.all_nondegenerate()) == 2
    assert s2.get("s2").faces == (SimplexRef((0,), BASEPOINT),) * 3


def test_empty_wedge_is_the_point():
    assert wedge_of_circles(0).to_dict() == point().to_dict()


@pytest.mark.parametrize(
    "X",
    [point(), sphere(1), sphere(2), sphere(3), wedge_of_circles(3), moore(2, 2), moore(3, 1), moore(4, 2),
     circle_two_edges(), sphere_two_cells()],
    ids=lambda X: X.name,
)
def test_standard_spaces_validate(X):
    assert validate(X).ok


def test_unknown_space_and_bad_parameters():
    with pytest.raises(InvalidArgument):
        standard_space("torus")
    with pytest.raises(InvalidArgument):
        sphere(0)
    with pytest.raises(InvalidArgument):
        moore(1, 2)
    with pytest.raises(InvalidArgument):
        standard_space("moore", 2)


def test_retargeted_face_is_reported():
    bad = SimplicialSet(
        "broken",
        [
            [NondegenerateSimplex(BASEPOINT, 0)],
            [NondegenerateSimplex("s1", 1, (SimplexRef((), "nowhere"), SimplexRef((), BASEPOINT)))],
        ],
    )
    report = validate(bad)
    assert not report.ok
    assert report.violations[0].simplex == "s1"
    assert report.violations[0].identity == "d0"


def test_non_reduced_set_is_reported():
    two_points = SimplicialSet(
        "two", [[NondegenerateSimplex(BASEPOINT, 0), NondegenerateSimplex("b", 0)]]
    )
    assert [v.identity for v in validate(two_points).violations] == ["reduced"]


def test_normalize_degeneracies():
    assert normalize_degeneracies([0, 0]) == (1, 0)
    assert normalize_degeneracies([0, 1]) == (2, 0)
    assert normalize_degeneracies([2, 0]) == (2, 0)


def test_faces_through_degeneracies():
    s2 = sphere(2)
    x = SimplexRef((), "s2")
    s1x = s2.degeneracy(x, 1)
    assert s2.face(s1x, 1) == x
    assert s2.face(s1x, 2) == x
    assert s2.face(s1x, 0) == s2.degeneracy(s2.face(x, 0), 0)


def test_wedge_counts_and_validity():
    X = wedge(sphere(1), sphere(2))
    assert len(X.all_nondegenerate()) == 3
    assert validate(X).ok
    assert len(wedge(point(), sphere(2)).all_nondegenerate()) == 2


def test_wedge_of_two_circles_renames_clashes():
    X = wedge(sphere(1), sphere(1))
    assert [x.id for x in X.nondegenerate(1)] == ["s1", "s1'"]
    assert validate(X).ok


def test_reduced_linearization_ranks():
    assert [reduced_linearization(point()).rank(q) for q in range(4)] == [0, 0, 0, 0]
    s1 = reduced_linearization(sphere(1))
    assert (s1.rank(0), s1.rank(1)) == (0, 1)
    assert reduced_linearization(wedge_of_circles(2)).rank(2) == 4


def test_reduced_linearization_rejects_invalid_input():
    bad = SimplicialSet("empty", [])
    with pytest.raises(InvalidArgument):
        reduced_linearization(bad)


@pytest.mark.parametrize("n", [1, 2, 3])
def test_sphere_homology(n):
    for s in range(0, n + 3):
        expected = AbelianInvariants(1) if s == n else AbelianInvariants(0)
        assert reduced_homology(sphere(n), s) == expected


def test_moore_space_torsion():
    assert reduced_homology(moore(2, 2), 2) == AbelianInvariants(0, (2,))
    assert reduced_homology(moore(3, 1), 1) == AbelianInvariants(0, (3,))
    assert reduced_homology(moore(4, 2), 3).is_trivial


@pytest.mark.parametrize(
    "X",
    [sphere(1), sphere(2), wedge_of_circles(2), moore(2, 2), moore(3, 2), wedge(sphere(1), sphere(2))],
    ids=lambda X: X.name,
)
def test_homology_matches_cellular_oracle(X):
    for s in range(4):
        rank, torsion = cellular_homology(X, s)
        assert reduced_homology(X, s) == AbelianInvariants(rank, torsion)


def test_homology_of_wedge_is_additive():
    for s in range(4):
        total = reduced_homology(sphere(1), s) + reduced_homology(sphere(2), s)
        assert reduced_homology(wedge(sphere(1), sphere(2)), s) == total


@pytest.mark.parametrize("X", [sphere(2), moore(2, 2), wedge_of_circles(2)], ids=lambda X: X.name)
def test_moore_boundary_squares_to_zero(X):
    A = reduced_linearization(X)
    for q in range(2, 5):
        assert (moore_complex(A, q - 1) @ moore_complex(A, q)).is_zero()


def test_degree_cap_is_enforced(monkeypatch):
    monkeypatch.setenv("KANTOWER_MAX_DEGREE", "2")
    with pytest.raises(ResourceCapExceeded):
        moore_homology(reduced_linearization(sphere(2)), 2)


class ConstantCyclic(SimplicialAbelianGroup):
    """Z/order in every degree."""

    def __init__(self, order):
        self.order = order

    def rank(self, q):
        return 0

    def torsion(self, q):
        return (self.order,)

    def face(self, q, i):
        return IntMatrix.zeros(0, 0)

    def degeneracy(self, q, j):
        return IntMatrix.zeros(0, 0)


def test_moore_homology_refuses_torsion_degrees():
    with pytest.raises(UnsupportedTorsion) as info:
        moore_homology(ConstantCyclic(2), 1)
    assert info.value.exit_code == 2


def test_larger_models_have_the_homology_of_spheres():
    for s in range(5):
        assert reduced_homology(circle_two_edges(), s) == reduced_homology(sphere(1), s)
        assert reduced_homology(sphere_two_cells(), s) == reduced_homology(sphere(2), s)
    assert standard_space("sphere_two_cells").name == "S2_two_cells"


@pytest.mark.parametrize(
    "f",
    [collapse_circle_model(), collapse_sphere_model(), wedge_fold(3), wedge_inclusion(3, 2)],
    ids=lambda f: f"{f.source.name}->{f.target.name}",
)
def test_standard_maps_are_simplicial(f):
    assert f.violations() == []
    for q in range(1, 4):
        for x in f.source.simplices(q):
            for i in range(q + 1):
                assert f(f.source.face(x, i)) == f.target.face(f(x), i)


def test_maps_extend_along_degeneracies():
    f = collapse_sphere_model()
    assert f(SimplexRef((1,), "u")) == SimplexRef((1,), "s2")
    assert f(SimplexRef((2,), "w")) == SimplexRef((2, 0), "s2")
    assert f(SimplexRef((1, 0), BASEPOINT)) == SimplexRef((1, 0), BASEPOINT)


def test_fold_after_inclusion_is_the_identity():
    for i in (1, 2):
        assert wedge_fold(2).compose(wedge_inclusion(2, i)).images == identity_map(sphere(1)).images
    with pytest.raises(InvalidArgument):
        wedge_inclusion(2, 3)


def test_broken_maps_are_reported():
    star = SimplexRef((), BASEPOINT)
    images = {BASEPOINT: star, "a": SimplexRef((0,), BASEPOINT), "b": SimplexRef((), "s1"), "t": SimplexRef((0,), "s1")}
    found = SimplicialMap.of(circle_two_edges(), sphere(1), images).violations()
    assert [(v.simplex, v.identity) for v in found] == [("t", "f d1=d1 f")]
    with pytest.raises(InvalidArgument):
        simplicial_map(circle_two_edges(), sphere(1), images)
    missing = SimplicialMap.of(sphere(1), sphere(2), {BASEPOINT: star})
    assert [v.identity for v in missing.violations()] == ["defined"]
    wrong_dimension = SimplicialMap.of(sphere(1), sphere(2), {BASEPOINT: star, "s1": SimplexRef((), "s2")})
    assert [v.identity for v in wrong_dimension.violations()] == ["dimension"]
    unknown = SimplicialMap.of(sphere(1), sphere(2), {BASEPOINT: star, "s1": SimplexRef((), "ghost")})
    assert [v.identity for v in unknown.violations()] == ["defined"]
