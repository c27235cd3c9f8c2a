import re
from typing import Callable, Dict

from errors import InvalidArgument
from simplicial import (
    BASEPOINT,
    NondegenerateSimplex,
    SimplexRef,
    SimplicialMap,
    SimplicialSet,
    basepoint_ref,
    simplicial_map,
)


def point() -> SimplicialSet:
    return SimplicialSet("point", [[NondegenerateSimplex(BASEPOINT, 0)]])


def sphere(n: int) -> SimplicialSet:
    """S^n = Delta^n / boundary: one vertex and one n-simplex with collapsed faces."""
    if n < 1:
        raise InvalidArgument(f"sphere needs n >= 1, got {n}")
    levels = [[NondegenerateSimplex(BASEPOINT, 0)]] + [[] for _ in range(n)]
    levels[n] = [NondegenerateSimplex(f"s{n}", n, (basepoint_ref(n - 1),) * (n + 1))]
    return SimplicialSet(f"S{n}", levels)


def wedge_of_circles(k: int) -> SimplicialSet:
    if k < 0:
        raise InvalidArgument(f"wedge_of_circles needs k >= 0, got {k}")
    if k == 0:
        return point()
    star = SimplexRef((), BASEPOINT)
    return SimplicialSet(
        f"wedge{k}",
        [
            [NondegenerateSimplex(BASEPOINT, 0)],
            [NondegenerateSimplex(f"x{i}", 1, (star, star)) for i in range(1, k + 1)],
        ],
    )


def moore(m: int, n: int) -> SimplicialSet:
    """Moore space M(Z/m, n).

    The n-cells e = f_0, f_1, ..., f_{m-2} have all faces at the basepoint.
    The (n+1)-cells t_j (1 <= j <= m-2) have boundary f_{j-1} - f_j + e and the
    last one has boundary f_{m-2} + e, so the boundary matrix has Smith form
    diag(1, ..., 1, m). For m = 2 this is the two-cell model.
    """
    if m < 2:
        raise InvalidArgument(f"moore needs m >= 2, got {m}")
    if n < 1:
        raise InvalidArgument(f"moore needs n >= 1, got {n}")
    low = basepoint_ref(n - 1)
    high = basepoint_ref(n)
    cells = ["e"] + [f"f{j}" for j in range(1, m - 1)]
    levels = [[NondegenerateSimplex(BASEPOINT, 0)]] + [[] for _ in range(n + 1)]
    levels[n] = [NondegenerateSimplex(c, n, (low,) * (n + 1)) for c in cells]

    def top(name: str, d0: str, d1: str | None, d2: str) -> NondegenerateSimplex:
        faces = [high] * (n + 2)
        faces[0] = SimplexRef((), d0)
        if d1 is not None:
            faces[1] = SimplexRef((), d1)
        faces[2] = SimplexRef((), d2)
        return NondegenerateSimplex(name, n + 1, tuple(faces))

    tops = [top(f"t{j}", cells[j - 1], cells[j], "e") for j in range(1, m - 1)]
    tops.append(top(f"t{m - 1}", cells[m - 2], None, "e"))
    levels[n + 1] = tops
    return SimplicialSet(f"M{m}_{n}", levels)


def circle_two_edges() -> SimplicialSet:
    """A larger model of S^1: loops a and b and a 2-simplex t with d0 t = b, d1 t = a."""
    star = SimplexRef((), BASEPOINT)
    return SimplicialSet(
        "S1_two_edges",
        [
            [NondegenerateSimplex(BASEPOINT, 0)],
            [NondegenerateSimplex("a", 1, (star, star)), NondegenerateSimplex("b", 1, (star, star))],
            [NondegenerateSimplex("t", 2, (SimplexRef((), "b"), SimplexRef((), "a"), basepoint_ref(1)))],
        ],
    )


def sphere_two_cells() -> SimplicialSet:
    """A larger model of S^2: 2-simplices u and v and a 3-simplex w with d0 w = u, d1 w = v."""
    low, high = basepoint_ref(1), basepoint_ref(2)
    return SimplicialSet(
        "S2_two_cells",
        [
            [NondegenerateSimplex(BASEPOINT, 0)],
            [],
            [NondegenerateSimplex("u", 2, (low,) * 3), NondegenerateSimplex("v", 2, (low,) * 3)],
            [NondegenerateSimplex("w", 3, (SimplexRef((), "u"), SimplexRef((), "v"), high, high))],
        ],
    )


def collapse_circle_model() -> SimplicialMap:
    """circle_two_edges() -> sphere(1), a and b to the circle, t to s_0 of it."""
    return simplicial_map(
        circle_two_edges(),
        sphere(1),
        {BASEPOINT: SimplexRef((), BASEPOINT), "a": SimplexRef((), "s1"), "b": SimplexRef((), "s1"),
         "t": SimplexRef((0,), "s1")},
    )


def collapse_sphere_model() -> SimplicialMap:
    """sphere_two_cells() -> sphere(2), u and v to the sphere, w to s_0 of it."""
    return simplicial_map(
        sphere_two_cells(),
        sphere(2),
        {BASEPOINT: SimplexRef((), BASEPOINT), "u": SimplexRef((), "s2"), "v": SimplexRef((), "s2"),
         "w": SimplexRef((0,), "s2")},
    )


def wedge_inclusion(k: int, i: int) -> SimplicialMap:
    """The i-th circle sphere(1) -> wedge_of_circles(k)."""
    if not 1 <= i <= k:
        raise InvalidArgument(f"circle {i} outside 1..{k}")
    return simplicial_map(
        sphere(1),
        wedge_of_circles(k),
        {BASEPOINT: SimplexRef((), BASEPOINT), "s1": SimplexRef((), f"x{i}")},
    )


def wedge_fold(k: int) -> SimplicialMap:
    """wedge_of_circles(k) -> sphere(1), every circle onto the one circle."""
    images = {BASEPOINT: SimplexRef((), BASEPOINT)}
    images.update({f"x{i}": SimplexRef((), "s1") for i in range(1, k + 1)})
    return simplicial_map(wedge_of_circles(k), sphere(1), images)


def standard_spaces() -> Dict[str, Callable[..., SimplicialSet]]:
    space_map = {
        "point": point,
        "sphere": sphere,
        "wedge_of_circles": wedge_of_circles,
        "moore": moore,
        "circle_two_edges": circle_two_edges,
        "sphere_two_cells": sphere_two_cells,
    }

    return space_map


_CALL = re.compile(r"^\s*([a-z_]+)\s*(?:\(\s*([-\d,\s]*)\))?\s*$")


def standard_space(name: str, *params: int) -> SimplicialSet:
    """Build a standard space, either ``standard_space("sphere", 2)`` or ``standard_space("sphere(2)")``."""
    if not params:
        match = _CALL.match(name)
        if not match:
            raise InvalidArgument(f"cannot parse space name {name!r}")
        name, args = match.group(1), match.group(2)
        params = tuple(int(a) for a in args.split(",") if a.strip()) if args else ()
    builders = standard_spaces()
    if name not in builders:
        raise InvalidArgument(f"unknown space {name!r}; known: {sorted(builders)}")
    try:
        return builders[name](*params)
    except TypeError:
        raise InvalidArgument(f"wrong number of parameters for {name}") from None
