"""Independent reference computations used only by the test suite.

Nothing in the library imports this module. Each oracle recomputes a value by
a different route than the main code: brute force, sympy, or a concrete
matrix representation.
"""

import random
from typing import Dict, List, Sequence, Tuple, Union

from sympy import Matrix, ZZ, eye
from sympy.matrices.normalforms import smith_normal_form

Tree = Union[int, Tuple["Tree", "Tree"]]


# free groups


def free_reduce(pairs: Sequence[Tuple[int, int]]) -> Tuple[Tuple[int, int], ...]:
    """Free reduction by a stack of unit letters."""
    stack: List[Tuple[int, int]] = []
    for g, p in pairs:
        unit = 1 if p > 0 else -1
        for _ in range(abs(p)):
            if stack and stack[-1] == (g, -unit):
                stack.pop()
            else:
                stack.append((g, unit))
    out: List[List[int]] = []
    for g, u in stack:
        if out and out[-1][0] == g:
            out[-1][1] += u
        else:
            out.append([g, u])
    return tuple((g, p) for g, p in out)


# Hall trees by exhaustive enumeration


def tree_weight(t: Tree) -> int:
    return 1 if isinstance(t, int) else tree_weight(t[0]) + tree_weight(t[1])


def tree_key(t: Tree):
    if isinstance(t, int):
        return (1, t)
    return (tree_weight(t), tree_key(t[0]), tree_key(t[1]))


def tree_str(t: Tree) -> str:
    if isinstance(t, int):
        return f"x{t}"
    return f"[{tree_str(t[0])},{tree_str(t[1])}]"


def all_trees(k: int, n: int) -> List[Tree]:
    """Every bracketing of n letters from x1..xk."""
    if n == 1:
        return list(range(1, k + 1))
    out: List[Tree] = []
    for a in range(1, n):
        for u in all_trees(k, a):
            for v in all_trees(k, n - a):
                out.append((u, v))
    return out


def is_hall(t: Tree) -> bool:
    if isinstance(t, int):
        return True
    u, v = t
    if not (is_hall(u) and is_hall(v)):
        return False
    if tree_key(u) <= tree_key(v):
        return False
    return isinstance(u, int) or tree_key(u[1]) <= tree_key(v)


def brute_hall_basis(k: int, n: int) -> List[str]:
    trees = [t for t in all_trees(k, n) if is_hall(t)]
    return [tree_str(t) for t in sorted(trees, key=tree_key)]


# Witt ranks by trial division


def brute_mobius(n: int) -> int:
    sign, m, p = 1, n, 2
    while p * p <= m:
        if m % p == 0:
            m //= p
            if m % p == 0:
                return 0
            sign = -sign
        p += 1
    if m > 1:
        sign = -sign
    return sign


def brute_witt(k: int, n: int) -> int:
    total = sum(brute_mobius(d) * k ** (n // d) for d in range(1, n + 1) if n % d == 0)
    assert total % n == 0
    return total // n


# Lie polynomials in the free associative ring


def lie_polynomial(t: Tree) -> Dict[Tuple[int, ...], int]:
    if isinstance(t, int):
        return {(t,): 1}
    a, b = lie_polynomial(t[0]), lie_polynomial(t[1])
    out: Dict[Tuple[int, ...], int] = {}
    for u, x in a.items():
        for v, y in b.items():
            out[u + v] = out.get(u + v, 0) + x * y
            out[v + u] = out.get(v + u, 0) - x * y
    return {w: c for w, c in out.items() if c}


def parse_tree(text: str) -> Tree:
    text = text.strip()
    if text.startswith("x"):
        return int(text[1:])
    depth = 0
    for i, ch in enumerate(text):
        if ch == "[":
            depth += 1
        elif ch == "]":
            depth -= 1
        elif ch == "," and depth == 1:
            return (parse_tree(text[1:i]), parse_tree(text[i + 1:-1]))
    raise ValueError(f"not a bracket: {text}")


def combination_polynomial(terms: Dict[str, int]) -> Dict[Tuple[int, ...], int]:
    out: Dict[Tuple[int, ...], int] = {}
    for text, c in terms.items():
        for w, x in lie_polynomial(parse_tree(text)).items():
            out[w] = out.get(w, 0) + c * x
    return {w: c for w, c in out.items() if c}


# Smith form via sympy


def sympy_smith_invariants(rows: Sequence[Sequence[int]], ncols: int) -> Tuple[int, Tuple[int, ...]]:
    """(rank, nonunit invariant factors) of an integer matrix."""
    if not rows or not ncols:
        return 0, ()
    snf = smith_normal_form(Matrix(rows), domain=ZZ)
    diag = [abs(int(snf[i, i])) for i in range(min(snf.shape)) if snf[i, i] != 0]
    return len(diag), tuple(sorted(d for d in diag if d != 1))


def cellular_homology(X, s: int) -> Tuple[int, Tuple[int, ...]]:
    """H~_s from normalized chains on nondegenerate simplices, faces read directly."""

    def basis(q):
        return [x.id for x in X.nondegenerate(q) if x.id != "*"]

    def boundary(q):
        source, target = basis(q), basis(q - 1)
        index = {x: i for i, x in enumerate(target)}
        rows = [[0] * len(source) for _ in target]
        for j, x in enumerate(source):
            for i, f in enumerate(X.get(x).faces):
                if not f.degeneracies and f.base in index:
                    rows[index[f.base]][j] += (-1) ** i
        return rows, len(source)

    n_s = len(basis(s))
    out_rank = 0
    if s >= 1:
        rows, ncols = boundary(s)
        out_rank, _ = sympy_smith_invariants(rows, ncols)
    rows, ncols = boundary(s + 1)
    in_rank, torsion = sympy_smith_invariants(rows, ncols)
    return n_s - out_rank - in_rank, torsion


# unitriangular representations of free nilpotent groups


def random_unitriangular(size: int, rng: random.Random) -> Matrix:
    m = eye(size)
    for i in range(size):
        for j in range(i + 1, size):
            m[i, j] = rng.randint(-3, 3)
    return m


def evaluate_word(pairs: Sequence[Tuple[int, int]], images: Sequence[Matrix]) -> Matrix:
    out = eye(images[0].shape[0])
    for g, p in pairs:
        base = images[g - 1] if p > 0 else images[g - 1].inv()
        out = out * base ** abs(p)
    return out


def evaluate_normal_form(exponents: Sequence[Tuple[str, int]], images: Sequence[Matrix]) -> Matrix:
    """Product of basic commutators c^e in the given order, [x, y] = x^-1 y^-1 x y."""

    def value(t: Tree) -> Matrix:
        if isinstance(t, int):
            return images[t - 1]
        x, y = value(t[0]), value(t[1])
        return x.inv() * y.inv() * x * y

    out = eye(images[0].shape[0])
    for text, e in exponents:
        v = value(parse_tree(text))
        base = v if e > 0 else v.inv()
        out = out * base ** abs(e)
    return out


def random_word(k: int, length: int, rng: random.Random) -> Tuple[Tuple[int, int], ...]:
    return tuple((rng.randint(1, k), rng.choice((-1, 1))) for _ in range(length))
