"""
Small standard triangulations, generated programmatically with heights = vertex id + 1.
"""
import itertools
import re
from typing import Any, Callable, Dict, List, Mapping, Optional, Sequence, Tuple

from core.errors import InputError
from modules.topology.mesh import Triangulation, build_triangulation


class UnknownName(InputError):
    pass


class BadParams(InputError):
    pass


def _canonical(dim: int, simplices: Sequence[Sequence[int]],
               boundary_marks: Optional[Mapping[str, Sequence[Sequence[int]]]] = None) -> Triangulation:
    vertices = sorted({v for s in simplices for v in s})
    return build_triangulation(dim, {v: v + 1 for v in vertices}, simplices, None, boundary_marks)


def octahedron_triangles() -> List[Tuple[int, int, int]]:
    # 0/1 = +x/-x, 2/3 = +y/-y, 4/5 = +z/-z
    return [(x, y, z) for x in (0, 1) for y in (2, 3) for z in (4, 5)]


def torus_triangles() -> List[Tuple[int, int, int]]:
    """The 7-vertex torus."""
    triangles = []
    for i in range(7):
        triangles.append((i, (i + 1) % 7, (i + 3) % 7))
        triangles.append((i, (i + 2) % 7, (i + 3) % 7))
    return triangles


def sphere2() -> Triangulation:
    return _canonical(2, octahedron_triangles())


def torus2() -> Triangulation:
    return _canonical(2, torus_triangles())


def surface_genus(g: int) -> Triangulation:
    """
    Closed orientable surface of genus g.

    Tori are chained by connected sums: the triangle (2, 4, 5) of one copy is removed and
    identified with the removed triangle (0, 1, 3) of the next, giving 4g + 3 vertices.
    """
    if isinstance(g, bool) or not isinstance(g, int) or g < 0:
        raise BadParams(f"genus must be a non-negative int, got {g!r}")
    if g == 0:
        return sphere2()
    hole_in, hole_out = (0, 1, 3), (2, 4, 5)
    triangles = []
    previous: Dict[int, int] = {}
    next_id = 0
    for copy in range(g):
        ids = {}
        for local in range(7):
            if copy > 0 and local in hole_in:
                ids[local] = previous[hole_out[hole_in.index(local)]]
            else:
                ids[local] = next_id
                next_id += 1
        for t in torus_triangles():
            if copy > 0 and set(t) == set(hole_in):
                continue
            if copy < g - 1 and set(t) == set(hole_out):
                continue
            triangles.append(tuple(ids[v] for v in t))
        previous = ids
    return _canonical(2, triangles)


def sphere3() -> Triangulation:
    """Boundary of the 4-simplex."""
    return _canonical(3, list(itertools.combinations(range(5), 4)))


def circle_product(base: Sequence[Tuple[int, int, int]], levels: int = 3) -> List[Tuple[int, ...]]:
    """
    Tetrahedra of base x S^1 with the circle cut into levels arcs.

    Each prism over a triangle a < b < c between consecutive levels is cut into three
    tetrahedra along the staircase; copy l of base vertex x gets id l * V + x.
    """
    size = max(v for t in base for v in t) + 1
    tets = []
    for level in range(levels):
        top = (level + 1) % levels
        for triangle in base:
            a, b, c = sorted(triangle)
            lo = lambda x: level * size + x
            hi = lambda x: top * size + x
            tets.append((lo(a), lo(b), lo(c), hi(c)))
            tets.append((lo(a), lo(b), hi(b), hi(c)))
            tets.append((lo(a), hi(a), hi(b), hi(c)))
    return tets


def s2xs1() -> Triangulation:
    return _canonical(3, circle_product(list(itertools.combinations(range(4), 3))))


def torus3() -> Triangulation:
    return _canonical(3, circle_product(torus_triangles()))


def _heegaard_tets(m: int, n: int) -> List[Tuple[Any, ...]]:
    """S^3 as two solid tori glued along an m x n grid torus; vertices as tagged tuples."""
    grid = lambda i, j: ("t", i % m, j % n)
    core = lambda i: ("c", i % m)
    cocore = lambda j: ("d", j % n)
    tets = []
    for i in range(m):
        for j in range(n):
            upper = (grid(i, j), grid(i + 1, j), grid(i + 1, j + 1))
            lower = (grid(i, j), grid(i, j + 1), grid(i + 1, j + 1))
            tets.append((core(i),) + upper)
            tets.append((core(i),) + lower)
            tets.append((core(i), core(i + 1), grid(i + 1, j), grid(i + 1, j + 1)))
            tets.append((cocore(j),) + upper)
            tets.append((cocore(j),) + lower)
            tets.append((cocore(j), cocore(j + 1), grid(i, j + 1), grid(i + 1, j + 1)))
    return tets


def _relabel(tets: Sequence[Tuple[Any, ...]]) -> List[Tuple[int, ...]]:
    unique = sorted({frozenset(t) for t in tets}, key=lambda t: sorted(t))
    vertices = sorted({v for t in unique for v in t})
    ids = {v: k for k, v in enumerate(vertices)}
    return [tuple(sorted(ids[v] for v in t)) for t in unique]


def heegaard_sphere(m: int = 3, n: int = 3) -> Triangulation:
    """S^3 from a genus-one Heegaard splitting on an m x n grid; m, n >= 3."""
    if m < 3 or n < 3:
        raise BadParams("grid sides must be at least 3")
    return _canonical(3, _relabel(_heegaard_tets(m, n)))


def rp3() -> Triangulation:
    """
    Real projective 3-space as the quotient of the 6 x 6 Heegaard sphere by the free
    involution shifting both grid directions and both core circles by 3 steps.
    """
    def fold(vertex):
        tag, *rest = vertex
        if tag == "t":
            i, j = rest
            return ("t", i, j) if i < 3 else ("t", i - 3, (j - 3) % 6)
        return (tag, rest[0] % 3)

    folded = [tuple(fold(v) for v in t) for t in _heegaard_tets(6, 6)]
    return _canonical(3, _relabel(folded))


def cone_disk(n: int, boundary: str = "out") -> Triangulation:
    """Disk as the cone over an n-gon; the apex is vertex n."""
    if n < 3:
        raise BadParams("a disk needs at least 3 boundary edges")
    triangles = [(i, (i + 1) % n, n) for i in range(n)]
    return _canonical(2, triangles, {boundary: [(i, (i + 1) % n) for i in range(n)]})


def annulus(n: int, inner: str = "in", outer: str = "out") -> Triangulation:
    """Annulus between an inner n-gon 0..n-1 and an outer n-gon n..2n-1."""
    if n < 3:
        raise BadParams("an annulus needs at least 3 edges per boundary circle")
    triangles = []
    for i in range(n):
        j = (i + 1) % n
        triangles.append((i, j, n + i))
        triangles.append((j, n + i, n + j))
    marks = {
        inner: [(i, (i + 1) % n) for i in range(n)],
        outer: [(n + i, n + (i + 1) % n) for i in range(n)],
    }
    return _canonical(2, triangles, marks)


def pants() -> Triangulation:
    """Pair of pants: the octahedron with three disjoint triangles subdivided and removed."""
    triangles = [(6, 2, 4), (6, 0, 4), (0, 2, 5), (0, 3, 4), (1, 2, 5), (1, 3, 4), (1, 3, 5),
                 (7, 1, 2), (7, 2, 4), (8, 0, 3), (8, 0, 5)]
    holes = {"in0": (0, 2, 6), "in1": (1, 4, 7), "out": (3, 5, 8)}
    marks = {name: list(itertools.combinations(hole, 2)) for name, hole in holes.items()}
    return _canonical(2, triangles, marks)


_MANIFOLDS: Dict[str, Callable[..., Triangulation]] = {
    "sphere2": sphere2,
    "torus2": torus2,
    "surface_genus": surface_genus,
    "sphere3": sphere3,
    "s2xs1": s2xs1,
    "torus3": torus3,
    "rp3": rp3,
    "heegaard_sphere": heegaard_sphere,
}

ALIASES = {"s2": "sphere2", "t2": "torus2", "s3": "sphere3", "t3": "torus3"}


def builtin_manifold(name: str, params: Any = None) -> Triangulation:
    """
    Closed built-in triangulation by name.

    Args:
        name: sphere2, torus2, surface_genus, sphere3, s2xs1, torus3, rp3, heegaard_sphere
            or a short alias (s2, t2, s3, t3)
        params: Genus for surface_genus (int or {"g": int}); grid sides for heegaard_sphere

    Returns:
        The validated triangulation
    """
    name = ALIASES.get(name, name)
    factory = _MANIFOLDS.get(name)
    if factory is None:
        raise UnknownName(f"unknown manifold {name!r}; known: {sorted(_MANIFOLDS)}")
    if name == "surface_genus":
        if isinstance(params, Mapping):
            params = params.get("g")
        if params is None:
            raise BadParams("surface_genus needs a genus")
        return factory(params)
    if name == "heegaard_sphere":
        if params is None:
            return factory()
        if isinstance(params, Mapping):
            return factory(**params)
        if isinstance(params, (list, tuple)) and len(params) == 2:
            return factory(*params)
        raise BadParams("heegaard_sphere takes (m, n)")
    if params not in (None, {}, ()):
        raise BadParams(f"{name} takes no parameters")
    return factory()


_CALL = re.compile(r"^\s*([a-z_0-9]+)\s*(?:\(\s*([0-9,\s]*)\s*\))?\s*$")


def manifold_from_text(text: str) -> Triangulation:
    """Parse 'torus3', 's3' or 'surface_genus(2)' into a built-in triangulation."""
    match = _CALL.match(text)
    if not match:
        raise UnknownName(f"cannot read manifold name {text!r}")
    name, args = match.groups()
    if not args:
        return builtin_manifold(name)
    values = [int(a) for a in args.split(",") if a.strip()]
    return builtin_manifold(name, values[0] if len(values) == 1 else tuple(values))


"""
from modules.topology import builtin

builtin.builtin_manifold("surface_genus", 2).euler_characteristic()  # -2
builtin.manifold_from_text("s3").f_vector                            # (5, 10, 10, 5)
builtin.pants().boundary_marks.keys()                                # in0, in1, out
"""
