import random

import pytest

from errors import InvalidArgument
from linalg import (
    AbelianInvariants,
    IntMatrix,
    cokernel_invariants,
    column_echelon,
    divisibility_chain,
    kernel_lattice,
    rank,
    smith_diagonal,
    solve,
)
from verification.oracles import sympy_smith_invariants


def random_matrix(rng: random.Random, nrows: int, ncols: int) -> IntMatrix:
    return IntMatrix.from_rows(
        ([rng.randint(-6, 6) for _ in range(ncols)] for _ in range(nrows)), ncols=ncols
    )


@pytest.mark.parametrize("seed", range(25))
def test_smith_diagonal_matches_sympy(seed):
    rng = random.Random(seed)
    m = random_matrix(rng, rng.randint(1, 5), rng.randint(1, 5))
    diag = smith_diagonal(m)
    oracle_rank, oracle_torsion = sympy_smith_invariants(m.tolist(), m.ncols)
    assert len(diag) == oracle_rank
    assert tuple(d for d in diag if d != 1) == oracle_torsion


def test_smith_diagonal_of_diagonal_matrix_is_a_chain():
    m = IntMatrix.from_rows([[2, 0], [0, 3]])
    assert smith_diagonal(m) == [1, 6]
    assert cokernel_invariants(m) == AbelianInvariants(0, (6,))


@pytest.mark.parametrize("seed", range(15))
def test_kernel_lattice_is_a_basis_with_left_inverse(seed):
    rng = random.Random(100 + seed)
    m = random_matrix(rng, rng.randint(1, 4), rng.randint(2, 6))
    lattice = kernel_lattice(m)
    assert lattice.rank == m.ncols - rank(m)
    assert (m @ lattice.basis).is_zero()
    assert lattice.projection @ lattice.basis == IntMatrix.identity(lattice.rank)


@pytest.mark.parametrize("seed", range(15))
def test_solve_finds_preimages(seed):
    rng = random.Random(200 + seed)
    m = random_matrix(rng, 4, 3)
    x = [rng.randint(-4, 4) for _ in range(3)]
    b = m.apply(x)
    y = solve(m, b)
    assert y is not None
    assert m.apply(y) == b


def test_solve_reports_no_integer_solution():
    m = IntMatrix.from_rows([[2]])
    assert solve(m, [3]) is None
    assert solve(m, [4]) == (2,)


def test_column_echelon_transform_and_inverse():
    m = IntMatrix.from_rows([[4, 6, 2], [1, 1, 1]])
    ech = column_echelon(m)
    v = IntMatrix.from_rows(ech.transform)
    vinv = IntMatrix.from_rows(ech.inverse)
    assert v @ vinv == IntMatrix.identity(3)
    assert m @ v == IntMatrix.from_rows(ech.reduced)
    assert ech.rank == 2


def test_divisibility_chain():
    assert divisibility_chain([4, 6]) == [2, 12]
    assert divisibility_chain([0, 3, 1]) == [1, 3]


def test_abelian_invariants_reject_bad_chains():
    with pytest.raises(InvalidArgument):
        AbelianInvariants(1, (4, 6))
    with pytest.raises(InvalidArgument):
        AbelianInvariants(-1)
    assert AbelianInvariants.from_orders(1, [4, 6, 1]) == AbelianInvariants(1, (2, 12))
    assert str(AbelianInvariants(2, (2,))) == "Z^2 + Z/2"


def test_matrix_shape_is_checked():
    with pytest.raises(InvalidArgument):
        IntMatrix(2, 1, ((1,),))
    with pytest.raises(InvalidArgument):
        IntMatrix.identity(2) @ IntMatrix.identity(3)
