"""
Oriented triangulated 2- and 3-manifolds with a total vertex order.

Vertices are ints carrying injective rational heights. Every simplex is stored with its
vertices sorted by height, which orients all edges toward the higher vertex and gives every
top simplex a reference orientation; the per-simplex sign records whether that reference
agrees with the manifold orientation. The facet obtained by omitting position i of a top
simplex with sign s inherits the boundary orientation s * (-1)**i, and two top simplices
sharing a facet are coherent exactly when they induce opposite orientations on it.
"""
import bisect
import itertools
from collections import defaultdict, deque
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from types import MappingProxyType
from typing import Any, Dict, Iterable, List, Mapping, Optional, Sequence, Set, Tuple

from core import log
from core.errors import InputError, OrbifoldError
from core.linalg import gf2_rank
from core.math import parse_rational

logger = log.create_logger(__name__)

Simplex = Tuple[int, ...]

KINDS = {
    2: ("2-2", "1-3", "3-1"),
    3: ("2-3", "3-2", "1-4", "4-1"),
}


class MalformedTriangulation(InputError):
    pass


class DuplicateHeight(InputError):
    pass


class NonManifold(InputError):
    pass


class NonOrientable(InputError):
    pass


class DanglingVertex(InputError):
    pass


class KindDimensionMismatch(InputError):
    pass


class StaleSite(OrbifoldError):
    """The move site does not describe a configuration of this triangulation."""
    pass


class BoundaryMismatch(InputError):
    pass


class OrientationClash(InputError):
    pass


def permutation_sign(sequence: Sequence, key) -> int:
    """Sign of the permutation that sorts sequence by key."""
    values = [key(x) for x in sequence]
    inversions = sum(1 for i, j in itertools.combinations(range(len(values)), 2) if values[i] > values[j])
    return -1 if inversions % 2 else 1


def _omitted_position(simplex: Simplex, facet: Simplex) -> int:
    for i, v in enumerate(simplex):
        if v not in facet:
            return i
    raise ValueError(f"{facet} is not a facet of {simplex}")


def _curve_kind(edges: Iterable[Tuple[int, int]]) -> Optional[str]:
    """'circle' or 'path' for a connected 1-manifold given by its edges, else None."""
    edges = list(edges)
    if not edges:
        return None
    adjacency = defaultdict(set)
    for u, v in edges:
        if u == v or v in adjacency[u]:
            return None
        adjacency[u].add(v)
        adjacency[v].add(u)
    degrees = [len(n) for n in adjacency.values()]
    if any(d > 2 for d in degrees):
        return None
    if not _connected(adjacency):
        return None
    ends = degrees.count(1)
    if ends == 0:
        return "circle"
    if ends == 2:
        return "path"
    return None


def _connected(adjacency: Mapping[int, Set[int]]) -> bool:
    if not adjacency:
        return True
    start = next(iter(adjacency))
    seen = {start}
    queue = deque([start])
    while queue:
        u = queue.popleft()
        for v in adjacency[u]:
            if v not in seen:
                seen.add(v)
                queue.append(v)
    return len(seen) == len(adjacency)


def surface_kind(triangles: Iterable[Sequence[int]]) -> Optional[str]:
    """
    Classify a pure 2-complex as 'sphere' or 'disk'.

    Args:
        triangles: Vertex triples

    Returns:
        'sphere', 'disk', or None for anything else
    """
    triangles = [tuple(sorted(t)) for t in triangles]
    if not triangles or len(set(triangles)) != len(triangles):
        return None
    edge_count = defaultdict(int)
    vertex_links = defaultdict(list)
    for t in triangles:
        for i in range(3):
            others = tuple(v for j, v in enumerate(t) if j != i)
            edge_count[others] += 1
            vertex_links[t[i]].append(others)
    if any(c > 2 for c in edge_count.values()):
        return None
    if any(_curve_kind(link) is None for link in vertex_links.values()):
        return None
    adjacency = defaultdict(set)
    by_edge = defaultdict(list)
    for k, t in enumerate(triangles):
        adjacency.setdefault(k, set())
        for e in itertools.combinations(t, 2):
            by_edge[e].append(k)
    for members in by_edge.values():
        if len(members) == 2:
            adjacency[members[0]].add(members[1])
            adjacency[members[1]].add(members[0])
    if not _connected(adjacency):
        return None
    chi = len(vertex_links) - len(edge_count) + len(triangles)
    boundary = [e for e, c in edge_count.items() if c == 1]
    if not boundary:
        return "sphere" if chi == 2 else None
    if chi == 1 and _curve_kind(boundary) == "circle":
        return "disk"
    return None


@dataclass(frozen=True, eq=False)
class Triangulation:
    """
    Validated oriented triangulation; build with build_triangulation.

    Args:
        dim: 2 or 3
        heights: Vertex -> rational height, injective
        simplices: Top simplices, vertices sorted by height
        signs: Per top simplex, +1 if the height orientation is the manifold orientation
        boundary_marks: Boundary component name -> its facets
    """
    dim: int
    heights: Mapping[int, Fraction]
    simplices: Tuple[Simplex, ...]
    signs: Tuple[int, ...]
    boundary_marks: Mapping[str, Tuple[Simplex, ...]]

    def height_key(self, simplex: Iterable[int]) -> Tuple[Fraction, ...]:
        return tuple(self.heights[v] for v in simplex)

    def sort(self, vertices: Iterable[int]) -> Simplex:
        """Order vertices by height."""
        return tuple(sorted(vertices, key=self.heights.__getitem__))

    @property
    def vertices(self) -> Simplex:
        return self.sort(self.heights)

    @cached_property
    def index_of(self) -> Dict[Simplex, int]:
        return {s: i for i, s in enumerate(self.simplices)}

    @cached_property
    def star(self) -> Dict[Simplex, Tuple[int, ...]]:
        """Every face -> indices of the top simplices containing it."""
        star = defaultdict(list)
        for i, simplex in enumerate(self.simplices):
            for r in range(1, self.dim + 2):
                for face in itertools.combinations(simplex, r):
                    star[face].append(i)
        return {face: tuple(members) for face, members in star.items()}

    @cached_property
    def faces(self) -> Dict[int, Tuple[Simplex, ...]]:
        """Faces by dimension, each sorted by height."""
        by_dim = defaultdict(list)
        for face in self.star:
            by_dim[len(face) - 1].append(face)
        return {d: tuple(sorted(by_dim.get(d, ()), key=self.height_key)) for d in range(self.dim + 1)}

    def has_face(self, vertices: Iterable[int]) -> bool:
        return self.sort(vertices) in self.star

    @cached_property
    def boundary_facets(self) -> Tuple[Simplex, ...]:
        return tuple(f for f in self.faces[self.dim - 1] if len(self.star[f]) == 1)

    @cached_property
    def boundary_faces(self) -> Set[Simplex]:
        """All faces of boundary facets."""
        result = set()
        for facet in self.boundary_facets:
            for r in range(1, len(facet) + 1):
                result.update(itertools.combinations(facet, r))
        return result

    def is_interior(self, face: Simplex) -> bool:
        return face not in self.boundary_faces

    @property
    def is_closed(self) -> bool:
        return not self.boundary_facets

    @property
    def f_vector(self) -> Tuple[int, ...]:
        return tuple(len(self.faces[d]) for d in range(self.dim + 1))

    def euler_characteristic(self) -> int:
        return sum((-1) ** d * n for d, n in enumerate(self.f_vector))

    def sign_of(self, simplex: Simplex) -> int:
        return self.signs[self.index_of[simplex]]

    def induced_sign(self, facet: Simplex) -> int:
        """Orientation a boundary facet inherits from its unique top simplex."""
        (index,) = self.star[facet]
        simplex = self.simplices[index]
        return self.signs[index] * (-1) ** _omitted_position(simplex, facet)

    def canonical_form(self) -> Tuple:
        """Relabel vertices by height rank; equal forms mean order-preserving isomorphism."""
        rank = {v: i for i, v in enumerate(self.vertices)}
        simplices = tuple(sorted(tuple(rank[v] for v in s) + (sign,) for s, sign in zip(self.simplices, self.signs)))
        marks = tuple(sorted((name, tuple(sorted(tuple(rank[v] for v in f) for f in facets)))
                             for name, facets in self.boundary_marks.items()))
        return self.dim, len(rank), simplices, marks

    def mirror(self) -> "Triangulation":
        """Same complex with the opposite orientation."""
        return build_triangulation(self.dim, self.heights, self.simplices, [-s for s in self.signs],
                                   self.boundary_marks)

    def shifted(self, offset) -> "Triangulation":
        """Add a constant to every height; order and signs are unchanged."""
        offset = parse_rational(offset)
        return build_triangulation(self.dim, {v: h + offset for v, h in self.heights.items()}, self.simplices,
                                   self.signs, self.boundary_marks)

    def to_json(self) -> Dict[str, Any]:
        order = sorted(range(len(self.simplices)), key=lambda i: self.height_key(self.simplices[i]))
        return {
            "dim": self.dim,
            "vertices": {str(v): str(self.heights[v]) for v in self.vertices},
            "simplices": [list(self.simplices[i]) for i in order],
            "signs": [self.signs[i] for i in order],
            "boundary": {name: [list(f) for f in facets] for name, facets in sorted(self.boundary_marks.items())},
        }

    def __repr__(self):
        return (f"Triangulation(dim={self.dim}, f_vector={self.f_vector}, "
                f"boundary={sorted(self.boundary_marks)})")


def z2_betti_numbers(tri: Triangulation) -> Tuple[int, int]:
    """(b0, b1) of tri with Z/2 coefficients."""
    vertex_bit = {v: 1 << i for i, v in enumerate(tri.heights)}
    edge_bit = {e: 1 << i for i, e in enumerate(tri.faces[1])}
    boundary1 = [vertex_bit[u] | vertex_bit[v] for u, v in tri.faces[1]]
    boundary2 = [sum(edge_bit[e] for e in itertools.combinations(t, 2)) for t in tri.faces.get(2, ())]
    rank1 = gf2_rank(boundary1)
    return len(vertex_bit) - rank1, len(edge_bit) - rank1 - gf2_rank(boundary2)


def is_isomorphic(a: Triangulation, b: Triangulation) -> bool:
    return a.canonical_form() == b.canonical_form()


def _facet_incidence(simplices: Sequence[Simplex]) -> Dict[Simplex, List[Tuple[int, int]]]:
    incidence = defaultdict(list)
    for i, simplex in enumerate(simplices):
        for pos in range(len(simplex)):
            incidence[simplex[:pos] + simplex[pos + 1:]].append((i, pos))
    return incidence


def orient_coherently(simplices: Sequence[Simplex], first_sign: int = 1) -> List[int]:
    """
    Choose signs making adjacent height-sorted simplices coherent, component by component.

    Args:
        simplices: Top simplices with vertices in height order
        first_sign: Sign given to the first simplex of every connected component

    Returns:
        One sign per simplex
    """
    incidence = _facet_incidence(simplices)
    signs: List[Optional[int]] = [None] * len(simplices)
    for seed in range(len(simplices)):
        if signs[seed] is not None:
            continue
        signs[seed] = first_sign
        queue = deque([seed])
        while queue:
            i = queue.popleft()
            for pos in range(len(simplices[i])):
                facet = simplices[i][:pos] + simplices[i][pos + 1:]
                for j, other_pos in incidence[facet]:
                    if j == i:
                        continue
                    wanted = -signs[i] * (-1) ** pos * (-1) ** other_pos
                    if signs[j] is None:
                        signs[j] = wanted
                        queue.append(j)
                    elif signs[j] != wanted:
                        raise NonOrientable(f"no coherent orientation around facet {facet}")
    return signs


def _check_links(dim: int, simplices: Sequence[Simplex], vertices: Iterable[int]):
    links = defaultdict(list)
    for simplex in simplices:
        for pos, v in enumerate(simplex):
            links[v].append(simplex[:pos] + simplex[pos + 1:])
    for v in vertices:
        if dim == 2:
            ok = _curve_kind(links[v]) is not None
        else:
            ok = surface_kind(links[v]) is not None
        if not ok:
            raise NonManifold(f"link of vertex {v} is not a {'circle or arc' if dim == 2 else 'sphere or disk'}")


def _boundary_components(facets: Sequence[Simplex], key) -> List[List[Simplex]]:
    """Group boundary facets into components connected through shared codim-2 faces."""
    parent = list(range(len(facets)))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    by_ridge = defaultdict(list)
    for i, facet in enumerate(facets):
        for pos in range(len(facet)):
            by_ridge[facet[:pos] + facet[pos + 1:]].append(i)
    for members in by_ridge.values():
        for other in members[1:]:
            parent[find(other)] = find(members[0])
    groups = defaultdict(list)
    for i, facet in enumerate(facets):
        groups[find(i)].append(facet)
    components = [sorted(g, key=key) for g in groups.values()]
    return sorted(components, key=lambda c: key(c[0]))


def build_triangulation(dim: int,
                        vertex_heights: Mapping[int, Any],
                        top_simplices: Iterable[Sequence[int]],
                        orientation_signs: Optional[Sequence[int]] = None,
                        boundary_marks: Optional[Mapping[str, Iterable[Sequence[int]]]] = None) -> Triangulation:
    """
    Validate and build an oriented triangulation.

    Args:
        dim: 2 or 3
        vertex_heights: Vertex id -> rational height (int, Fraction or "p/q")
        top_simplices: Vertex tuples in any order
        orientation_signs: Per simplex sign relative to its height order; None orients
            the complex automatically, giving the first simplex of each component +1
        boundary_marks: Boundary component name -> facets; None names components
            boundary0, boundary1, ... by lowest facet

    Returns:
        The validated Triangulation

    Raises:
        DuplicateHeight, NonManifold, NonOrientable, DanglingVertex, MalformedTriangulation
    """
    if dim not in KINDS:
        raise MalformedTriangulation(f"dimension must be 2 or 3, got {dim!r}")
    heights: Dict[int, Fraction] = {}
    for v, h in vertex_heights.items():
        if isinstance(v, bool) or not isinstance(v, int):
            raise MalformedTriangulation(f"vertex ids must be ints, got {v!r}")
        heights[v] = parse_rational(h)
    owners = {}
    for v in sorted(heights):
        if heights[v] in owners:
            raise DuplicateHeight(f"vertices {owners[heights[v]]} and {v} share height {heights[v]}")
        owners[heights[v]] = v

    key = lambda s: tuple(heights[v] for v in s)
    raw = [tuple(s) for s in top_simplices]
    simplices: List[Simplex] = []
    for s in raw:
        if len(s) != dim + 1 or len(set(s)) != len(s):
            raise MalformedTriangulation(f"{s} is not a {dim}-simplex")
        unknown = [v for v in s if v not in heights]
        if unknown:
            raise MalformedTriangulation(f"simplex {s} uses unknown vertices {unknown}")
        simplices.append(tuple(sorted(s, key=heights.__getitem__)))
    if len(set(simplices)) != len(simplices):
        raise NonManifold("a top simplex is listed twice")

    used = {v for s in simplices for v in s}
    dangling = sorted(set(heights) - used)
    if dangling:
        raise DanglingVertex(f"vertices {dangling} lie in no top simplex")

    incidence = _facet_incidence(simplices)
    for facet, members in incidence.items():
        if len(members) > 2:
            raise NonManifold(f"facet {facet} lies in {len(members)} top simplices")
    _check_links(dim, simplices, used)

    if orientation_signs is None:
        signs = orient_coherently(simplices)
    else:
        signs = list(orientation_signs)
        if len(signs) != len(simplices) or any(s not in (1, -1) for s in signs):
            raise MalformedTriangulation("need one sign of +1 or -1 per top simplex")
        for facet, members in incidence.items():
            if len(members) == 2:
                (i, p), (j, q) = members
                if signs[i] * (-1) ** p == signs[j] * (-1) ** q:
                    raise NonOrientable(f"simplices {simplices[i]} and {simplices[j]} disagree across {facet}")

    boundary = sorted((f for f, members in incidence.items() if len(members) == 1), key=key)
    if boundary_marks is None:
        marks = {f"boundary{i}": tuple(c) for i, c in enumerate(_boundary_components(boundary, key))}
    else:
        marks = {}
        claimed = set()
        for name, facets in boundary_marks.items():
            sorted_facets = []
            for f in facets:
                facet = tuple(sorted(f, key=lambda v: heights.get(v, 0)))
                if facet not in incidence or len(incidence[facet]) != 1:
                    raise MalformedTriangulation(f"boundary mark {name!r} lists {tuple(f)}, not a boundary facet")
                if facet in claimed:
                    raise MalformedTriangulation(f"boundary facet {facet} is marked twice")
                claimed.add(facet)
                sorted_facets.append(facet)
            if sorted_facets:
                marks[str(name)] = tuple(sorted(sorted_facets, key=key))
        if claimed != set(boundary):
            raise MalformedTriangulation("boundary marks do not cover the boundary")

    order = sorted(range(len(simplices)), key=lambda i: key(simplices[i]))
    tri = Triangulation(
        dim=dim,
        heights=MappingProxyType(dict(heights)),
        simplices=tuple(simplices[i] for i in order),
        signs=tuple(signs[i] for i in order),
        boundary_marks=MappingProxyType(marks),
    )
    logger.debug("built triangulation", dim=dim, vertices=len(heights), simplices=len(simplices))
    return tri


def from_json(data: Mapping[str, Any]) -> Triangulation:
    """Build a Triangulation from its JSON object."""
    try:
        dim = data["dim"]
        vertices = {int(v): h for v, h in data["vertices"].items()}
        simplices = data["simplices"]
    except (KeyError, TypeError, ValueError, AttributeError) as e:
        raise MalformedTriangulation(f"triangulation JSON needs dim, vertices and simplices: {e}")
    return build_triangulation(dim, vertices, simplices, data.get("signs"), data.get("boundary"))


@dataclass(frozen=True)
class MoveSite:
    """
    A place where an oriented Pachner move applies.

    Args:
        kind: e.g. "2-3"
        simplices: Top simplices that are replaced, each in height order
        new_height: Height of the inserted vertex for 1-3 and 1-4
        signature: (kind, ranks of the non-shared vertices among all vertices of the
            configuration, sign of the replaced simplex avoiding the highest of them)
    """
    kind: str
    simplices: Tuple[Simplex, ...]
    new_height: Optional[Fraction] = None
    signature: Tuple = ()


def _move_sizes(kind: str) -> Tuple[int, int]:
    old, new = kind.split("-")
    return int(old), int(new)


def _class_height(tri: Triangulation, simplex: Simplex, position: int) -> Fraction:
    """A fresh height placing the new vertex at rank position among the simplex's vertices."""
    all_heights = sorted(tri.heights.values())
    if position == 0:
        return all_heights[0] - 1
    lower = tri.heights[simplex[position - 1]]
    i = bisect.bisect_right(all_heights, lower)
    if i == len(all_heights):
        return lower + 1
    return (lower + all_heights[i]) / 2


def _signature(kind: str, tri_heights: Mapping[int, Fraction], apexes: Sequence[int], shared: Sequence[int],
               sign_of_reference: int) -> Tuple:
    config = sorted(list(apexes) + list(shared), key=tri_heights.__getitem__)
    ranks = tuple(sorted(config.index(a) for a in apexes))
    return kind, ranks, sign_of_reference


def enumerate_oriented_moves(tri: Triangulation, kind: str) -> List[MoveSite]:
    """
    Every site of tri where the move of the given kind applies.

    Expanding moves yield one site per height class of the new vertex relative to the
    vertices of the simplex (dim + 2 classes).

    Raises:
        KindDimensionMismatch: kind is not a move of tri.dim
    """
    if kind not in KINDS[tri.dim]:
        raise KindDimensionMismatch(f"{kind} is not a move in dimension {tri.dim}")
    k, _ = _move_sizes(kind)
    n = tri.dim
    sites = []
    if k == 1:
        new_vertex = object()
        for simplex, sign in zip(tri.simplices, tri.signs):
            for position in range(n + 2):
                h = _class_height(tri, simplex, position)
                ranks = {v: tri.heights[v] for v in simplex}
                ranks[new_vertex] = h
                sites.append(MoveSite(kind, (simplex,), h,
                                      _signature(kind, ranks, [new_vertex], simplex, sign)))
        return sites

    for shared in tri.faces[n + 1 - k]:
        members = tri.star[shared]
        if len(members) != k:
            continue
        old = [tri.simplices[i] for i in members]
        apexes = tri.sort({v for s in old for v in s} - set(shared))
        if len(apexes) != k or tri.has_face(apexes):
            continue
        config = set(apexes) | set(shared)
        reference = tri.sort(config - {apexes[-1]})
        sites.append(MoveSite(kind, tuple(sorted(old, key=tri.height_key)), None,
                              _signature(kind, tri.heights, apexes, shared, tri.sign_of(reference))))
    return sites


def _site_geometry(tri: Triangulation, site: MoveSite):
    if site.kind not in KINDS[tri.dim]:
        raise KindDimensionMismatch(f"{site.kind} is not a move in dimension {tri.dim}")
    k, _ = _move_sizes(site.kind)
    n = tri.dim
    if len(site.simplices) != k or any(s not in tri.index_of for s in site.simplices):
        raise StaleSite(f"{site.kind} site {site.simplices} is not present")
    if k == 1:
        if site.new_height is None or site.new_height in set(tri.heights.values()):
            raise StaleSite("expanding move needs a fresh height")
        new_vertex = max(tri.heights) + 1
        return [new_vertex], list(site.simplices[0]), new_vertex
    shared = set(site.simplices[0]).intersection(*site.simplices[1:])
    apexes = {v for s in site.simplices for v in s} - shared
    shared_face = tri.sort(shared)
    if (len(shared) != n + 2 - k or len(apexes) != k or set(tri.star.get(shared_face, ())) !=
            {tri.index_of[s] for s in site.simplices} or tri.has_face(apexes)):
        raise StaleSite(f"{site.kind} site {site.simplices} no longer has the move pattern")
    return tri.sort(apexes), list(shared_face), None


def apply_pachner_move(tri: Triangulation, site: MoveSite) -> Triangulation:
    """
    Replace the site's simplices by the complementary faces of the (dim+1)-simplex.

    New simplices induce on every outer facet the orientation the replaced simplex did.

    Raises:
        StaleSite: the site is not a configuration of tri
    """
    apexes, shared, new_vertex = _site_geometry(tri, site)
    heights = dict(tri.heights)
    if new_vertex is not None:
        heights[new_vertex] = site.new_height
    config = set(apexes) | set(shared)
    order = lambda vs: tuple(sorted(vs, key=heights.__getitem__))
    sign_of = dict(zip(tri.simplices, tri.signs))

    pivot = apexes[0]
    added, added_signs = [], []
    for b in shared:
        tau = order(config - {b})
        if new_vertex is not None:
            sigma = order(shared)
        else:
            sigma = order(config - {pivot})
        sign = sign_of[sigma] * (-1) ** sigma.index(b) * (-1) ** tau.index(pivot)
        added.append(tau)
        added_signs.append(sign)

    removed = set(site.simplices)
    kept = [(s, g) for s, g in zip(tri.simplices, tri.signs) if s not in removed]
    if len(shared) == 1:
        del heights[shared[0]]
    simplices = [s for s, _ in kept] + added
    signs = [g for _, g in kept] + added_signs
    logger.debug("applied move", kind=site.kind, removed=len(removed), added=len(added))
    return build_triangulation(tri.dim, heights, simplices, signs, tri.boundary_marks)


def oriented_move_templates(dim: int, kind: str) -> List[Tuple[Triangulation, MoveSite]]:
    """
    Materialize every oriented variant of a move as a small complex and its site.

    Vertices get heights 1, 2, ...; for each choice of apex ranks and each sign of the
    reference simplex one template is produced.
    """
    if dim not in KINDS or kind not in KINDS[dim]:
        raise KindDimensionMismatch(f"{kind} is not a move in dimension {dim}")
    k, _ = _move_sizes(kind)
    templates = []
    if k == 1:
        heights = {v: v + 1 for v in range(dim + 1)}
        for sign in (1, -1):
            tri = build_triangulation(dim, heights, [tuple(range(dim + 1))], [sign])
            templates.extend((tri, site) for site in enumerate_oriented_moves(tri, kind))
        return templates
    config = tuple(range(dim + 2))
    heights = {v: v + 1 for v in config}
    for apexes in itertools.combinations(config, k):
        old = [tuple(v for v in config if v != a) for a in reversed(apexes)]
        for sign in (1, -1):
            tri = build_triangulation(dim, heights, old, orient_coherently(old, sign))
            templates.extend((tri, site) for site in enumerate_oriented_moves(tri, kind))
    return templates


def move_patches(base: Optional[Triangulation], kind: str, dim: int) -> List[Tuple[Triangulation, MoveSite]]:
    """
    The balls on which a move acts: all oriented templates, or the sites of a base complex
    cut out as small triangulations.
    """
    if base is None:
        return oriented_move_templates(dim, kind)
    patches = []
    for site in enumerate_oriented_moves(base, kind):
        used = {v for s in site.simplices for v in s}
        signs = [base.sign_of(s) for s in site.simplices]
        patch = build_triangulation(base.dim, {v: base.heights[v] for v in used}, site.simplices, signs)
        patches.append((patch, site))
    return patches


def variant_name(signature: Tuple) -> str:
    """'2-3 ranks=13 sign=+' for a move signature."""
    kind, ranks, sign = signature
    return f"{kind} ranks={''.join(str(r) for r in ranks)} sign={'+' if sign > 0 else '-'}"


def glue_along_boundary(a: Triangulation, b: Triangulation, matching: Mapping[str, str]) -> Triangulation:
    """
    Glue b to a along matched boundary components.

    Each pair of components is identified vertex by vertex in height order. Interface
    vertices keep the heights of a; the remaining vertices of b get fresh ids and keep
    their own heights, and the signs of b are recomputed for the new order.

    Args:
        a: First piece
        b: Second piece
        matching: Boundary name of a -> boundary name of b

    Raises:
        BoundaryMismatch: components differ combinatorially or names are unknown
        OrientationClash: matched facets carry the same induced orientation
        DuplicateHeight: a vertex of b collides with a height of a
    """
    if a.dim != b.dim:
        raise BoundaryMismatch(f"cannot glue dimension {a.dim} to {b.dim}")
    vertex_map: Dict[int, int] = {}
    for name_a, name_b in matching.items():
        if name_a not in a.boundary_marks or name_b not in b.boundary_marks:
            raise BoundaryMismatch(f"unknown boundary components {name_a!r} / {name_b!r}")
        facets_a, facets_b = a.boundary_marks[name_a], b.boundary_marks[name_b]
        verts_a = a.sort({v for f in facets_a for v in f})
        verts_b = b.sort({v for f in facets_b for v in f})
        if len(verts_a) != len(verts_b) or len(facets_a) != len(facets_b):
            raise BoundaryMismatch(f"{name_a!r} and {name_b!r} have different sizes")
        local = dict(zip(verts_b, verts_a))
        if {tuple(local[v] for v in f) for f in facets_b} != set(facets_a):
            raise BoundaryMismatch(f"{name_a!r} and {name_b!r} are not combinatorially equal")
        for facet in facets_b:
            image = tuple(local[v] for v in facet)
            if a.induced_sign(image) == b.induced_sign(facet):
                raise OrientationClash(f"facets {image} of {name_a!r} and {facet} of {name_b!r} "
                                       "induce the same orientation")
        vertex_map.update(local)

    heights = dict(a.heights)
    next_id = max(a.heights, default=-1) + 1
    for v in b.vertices:
        if v not in vertex_map:
            vertex_map[v] = next_id
            heights[next_id] = b.heights[v]
            next_id += 1
    if len(set(heights.values())) != len(heights):
        raise DuplicateHeight("glued complex would repeat a height; shift one piece first")

    simplices = list(a.simplices)
    signs = list(a.signs)
    for simplex, sign in zip(b.simplices, b.signs):
        image = [vertex_map[v] for v in simplex]
        simplices.append(tuple(image))
        signs.append(sign * permutation_sign(image, heights.__getitem__))

    marks = {name: facets for name, facets in a.boundary_marks.items() if name not in matching}
    glued_b = set(matching.values())
    for name, facets in b.boundary_marks.items():
        if name in glued_b:
            continue
        if name in marks:
            raise BoundaryMismatch(f"both pieces keep a boundary named {name!r}")
        marks[name] = [tuple(vertex_map[v] for v in f) for f in facets]
    return build_triangulation(a.dim, heights, simplices, signs, marks)


def split_triangulation(tri: Triangulation, region: Iterable[Sequence[int]],
                        interface: str = "cut") -> Tuple[Triangulation, Triangulation]:
    """
    Cut tri into the region and its complement.

    The facets between the two pieces become a boundary component named interface on
    both sides; other boundary marks follow their facets.

    Raises:
        NonManifold: a piece is not a manifold
        MalformedTriangulation: region is empty, total, or not made of top simplices
    """
    inside = {tri.sort(s) for s in region}
    if not inside or any(s not in tri.index_of for s in inside) or len(inside) == len(tri.simplices):
        raise MalformedTriangulation("region must be a proper nonempty set of top simplices")
    if interface in tri.boundary_marks:
        raise MalformedTriangulation(f"boundary name {interface!r} already in use")

    def piece(members: Set[Simplex]) -> Triangulation:
        used = {v for s in members for v in s}
        facets_of = {s[:p] + s[p + 1:] for s in members for p in range(len(s))}
        marks = {}
        for name, facets in tri.boundary_marks.items():
            kept = [f for f in facets if f in facets_of]
            if kept:
                marks[name] = kept
        cut = [f for f in facets_of if len(tri.star.get(f, ())) == 2
               and any(tri.simplices[i] not in members for i in tri.star[f])]
        if cut:
            marks[interface] = cut
        return build_triangulation(tri.dim, {v: tri.heights[v] for v in used}, sorted(members, key=tri.height_key),
                                   [tri.sign_of(s) for s in sorted(members, key=tri.height_key)], marks)

    outside = set(tri.simplices) - inside
    return piece(inside), piece(outside)


def disjoint_union(a: Triangulation, b: Triangulation) -> Triangulation:
    """Place b beside a, above it in height, with fresh vertex ids."""
    if a.dim != b.dim:
        raise MalformedTriangulation("disjoint union needs equal dimensions")
    clash = set(a.boundary_marks) & set(b.boundary_marks)
    if clash:
        raise BoundaryMismatch(f"both pieces have boundaries named {sorted(clash)}")
    offset = max(a.heights.values(), default=0) - min(b.heights.values(), default=0) + 1
    first_id = max(a.heights, default=-1) + 1
    relabel = {v: first_id + i for i, v in enumerate(sorted(b.heights))}
    heights = dict(a.heights)
    heights.update({relabel[v]: h + offset for v, h in b.heights.items()})
    simplices = list(a.simplices) + [tuple(relabel[v] for v in s) for s in b.simplices]
    marks = dict(a.boundary_marks)
    marks.update({name: [tuple(relabel[v] for v in f) for f in facets] for name, facets in b.boundary_marks.items()})
    return build_triangulation(a.dim, heights, simplices, list(a.signs) + list(b.signs), marks)
