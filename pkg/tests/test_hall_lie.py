import random
import warnings
from itertools import permutations

import pytest

from errors import InvalidArgument
from hall_lie import (
    HallTree,
    LieElement,
    cross_effect_complex,
    cross_effect_kernel,
    hall_basis,
    lie_normalize,
    lie_of_map,
    parse_bracket,
    witt_rank,
)
from linalg import IntMatrix
from verification.oracles import (
    brute_hall_basis,
    brute_witt,
    combination_polynomial,
    lie_polynomial,
)

x1, x2 = HallTree.leaf(1), HallTree.leaf(2)


def element_polynomial(e: LieElement):
    return combination_polynomial({str(h): c for h, c in e.terms})


def test_small_hall_bases():
    assert hall_basis(2, 1) == (x1, x2)
    assert [str(t) for t in hall_basis(2, 2)] == ["[x2,x1]"]
    assert [str(t) for t in hall_basis(2, 3)] == ["[[x2,x1],x1]", "[[x2,x1],x2]"]


@pytest.mark.parametrize("k,n", [(k, n) for k in range(1, 4) for n in range(1, 5)])
def test_hall_basis_matches_exhaustive_enumeration(k, n):
    assert [str(t) for t in hall_basis(k, n)] == brute_hall_basis(k, n)


@pytest.mark.parametrize("k,n", [(k, n) for k in range(0, 5) for n in range(1, 7)])
def test_hall_basis_size_is_witt_rank(k, n):
    assert len(hall_basis(k, n)) == witt_rank(k, n) == brute_witt(k, n)


def test_witt_small_values():
    assert witt_rank(2, 2) == 1
    assert witt_rank(2, 3) == 2
    assert witt_rank(3, 2) == 3
    with pytest.raises(InvalidArgument):
        witt_rank(2, 0)


def test_witt_rank_uses_no_deprecated_number_theory():
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        assert witt_rank(3, 6) == 116
        assert witt_rank(2, 12) == 335


def test_antisymmetry_rewrites():
    assert lie_normalize([(1, (1, 1))], 2, 2).is_zero
    assert lie_normalize([(1, (1, 2))], 2, 2).terms == ((HallTree.bracket(x2, x1), -1),)
    e = lie_normalize([(1, parse_bracket("[[x1,x2],x1]"))], 2, 3)
    assert e.terms == ((HallTree.bracket(HallTree.bracket(x2, x1), x1), -1),)


@pytest.mark.parametrize("seed", range(20))
def test_normalized_brackets_have_the_same_associative_expansion(seed):
    rng = random.Random(seed)
    k = rng.randint(2, 3)

    def random_bracket(w):
        if w == 1:
            return rng.randint(1, k)
        a = rng.randint(1, w - 1)
        return (random_bracket(a), random_bracket(w - a))

    n = rng.randint(2, 5)
    expr = random_bracket(n)
    normal = lie_normalize([(1, expr)], k, n)
    assert element_polynomial(normal) == lie_polynomial(expr)


def test_jacobi_identity_in_normal_form():
    k = 3
    a, b, c = (LieElement.generator(k, i) for i in (1, 2, 3))
    total = a.bracket(b).bracket(c) + b.bracket(c).bracket(a) + c.bracket(a).bracket(b)
    assert total.is_zero


def test_parse_bracket_errors():
    assert parse_bracket("[ [x1, x2], x1 ]") == ((1, 2), 1)
    for bad in ["[x1,x2", "x", "[x1;x2]", "[x1,x2]]"]:
        with pytest.raises(InvalidArgument):
            parse_bracket(bad)


def test_lie_of_map_on_small_maps():
    assert lie_of_map(IntMatrix.identity(2), 3) == IntMatrix.identity(2)
    swap = IntMatrix.from_rows([[0, 1], [1, 0]])
    assert lie_of_map(swap, 2) == IntMatrix.from_rows([[-1]])
    kill = IntMatrix.from_rows([[1, 0]])
    assert lie_of_map(kill, 2).is_zero()
    assert lie_of_map(kill, 2).nrows == 0


@pytest.mark.parametrize("seed", range(8))
def test_lie_of_map_is_functorial(seed):
    rng = random.Random(seed)

    def m(r, c):
        return IntMatrix.from_rows([[rng.randint(-2, 2) for _ in range(c)] for _ in range(r)])

    f, g = m(3, 2), m(2, 3)
    for n in (2, 3):
        assert lie_of_map(g @ f, n) == lie_of_map(g, n) @ lie_of_map(f, n)


def test_lie_of_map_commutes_with_permutations():
    for perm in permutations(range(3)):
        p = IntMatrix.from_rows([[int(perm[j] == i) for j in range(3)] for i in range(3)])
        for n in (2, 3):
            image = lie_of_map(p, n)
            assert image.nrows == image.ncols == witt_rank(3, n)
            back = IntMatrix.from_rows([[int(perm[i] == j) for j in range(3)] for i in range(3)])
            assert lie_of_map(back, n) @ image == IntMatrix.identity(witt_rank(3, n))


@pytest.mark.parametrize("n", [1, 2, 3, 4])
def test_cross_effect_kernel_trivial_on_unit_ranks(n):
    assert cross_effect_kernel(n, [1] * (n + 1)).is_trivial


def test_cross_effect_kernel_with_mixed_ranks():
    assert cross_effect_kernel(2, [2, 1, 1]).is_trivial


@pytest.mark.parametrize("n,ranks", [(1, [1, 1]), (2, [1, 1, 1]), (2, [2, 1, 1]), (3, [1, 1, 1, 1])])
def test_cross_effect_is_a_complex(n, ranks):
    d0, d1 = cross_effect_complex(n, ranks)
    assert (d1 @ d0).is_zero()


def test_cross_effect_rejects_wrong_rank_count():
    with pytest.raises(InvalidArgument):
        cross_effect_kernel(2, [1, 1])
