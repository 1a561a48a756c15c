"""
The two-dimensional state-sum theory of a Delta-separable symmetric Frobenius algebra.

Every triangle contributes the cyclic tensor C_abc = eps(mu(mu(e_a, e_b), e_c)) over the
edges it traverses, in the order of its orientation. Interior edges contract the two
triangle indices with the inverse pairing g^ab. On bordisms the indices of incoming
boundary edges stay free and the indices of outgoing boundary edges are raised with g^ab,
so composition of bordisms is matrix multiplication. Every value is multiplied by
euler_weight ** chi.

A boundary circle is read in a canonical order: start at its lowest vertex and step to the
lower of its two neighbours. The orientation a surface induces on a circle either follows
that order (direction +1) or runs against it (direction -1).
"""
import itertools
from collections import defaultdict
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Any, Dict, Hashable, List, Optional, Sequence, Tuple

import numpy as np

from core import log
from core.errors import InputError
from core.linalg import EchelonBasis, SparseMatrix, image_basis, numeric_rank
from core.math import Scalar, ScalarField
from core.report import ConstraintReport
from core.tensor import Factor, contract
from modules.orbifold2d.frob import FrobeniusData, InvalidDatum, check_frobenius_axioms, ensure_valid
from modules.topology import mesh
from modules.topology.mesh import MoveSite, Simplex, Triangulation

logger = log.create_logger(__name__)

MOVE_KINDS = ("2-2", "1-3", "3-1")


class NotClosed(InputError):
    pass


class BadBoundaryNames(InputError):
    pass


class BadCircle(InputError):
    pass


@dataclass(frozen=True)
class BoundaryCircle:
    """
    A boundary component read in canonical order.

    Args:
        name: Boundary mark
        vertices: Vertices in canonical order, starting at the lowest
        edges: Edge i joins vertices i and i + 1, each in height order
        orientations: Per edge, +1 if the induced orientation follows the canonical order
    """
    name: str
    vertices: Tuple[int, ...]
    edges: Tuple[Simplex, ...]
    orientations: Tuple[int, ...]

    @property
    def direction(self) -> int:
        return self.orientations[0]

    def __len__(self):
        return len(self.edges)


def boundary_circle(tri: Triangulation, name: str) -> BoundaryCircle:
    """
    Read a named boundary component of a surface as a circle.

    Raises:
        BadBoundaryNames: no such component
        BadCircle: the component is not a single consistently oriented cycle
    """
    if tri.dim != 2:
        raise BadCircle("boundary circles belong to surfaces")
    if name not in tri.boundary_marks:
        raise BadBoundaryNames(f"no boundary component named {name!r}; have {sorted(tri.boundary_marks)}")
    edges = tri.boundary_marks[name]
    neighbours = defaultdict(list)
    for u, v in edges:
        neighbours[u].append(v)
        neighbours[v].append(u)
    if any(len(n) != 2 for n in neighbours.values()):
        raise BadCircle(f"boundary {name!r} is not a cycle")
    start = min(neighbours, key=tri.heights.__getitem__)
    order = [start, min(neighbours[start], key=tri.heights.__getitem__)]
    while len(order) < len(neighbours):
        previous, current = order[-2], order[-1]
        step = [v for v in neighbours[current] if v != previous]
        order.append(step[0])
    if len(set(order)) != len(order) or len(order) != len(edges):
        raise BadCircle(f"boundary {name!r} has more than one component")
    cycle = order + [start]
    circle_edges, orientations = [], []
    for u, v in zip(cycle, cycle[1:]):
        edge = tri.sort((u, v))
        forward = 1 if tri.heights[u] < tri.heights[v] else -1
        circle_edges.append(edge)
        orientations.append(tri.induced_sign(edge) * forward)
    if len(set(orientations)) != 1:
        raise BadCircle(f"boundary {name!r} is not consistently oriented")
    return BoundaryCircle(name, tuple(order), tuple(circle_edges), tuple(orientations))


@dataclass(frozen=True)
class CellSurface:
    """
    An oriented surface glued from triangles.

    Triangles are cyclic triples of edge names in the order of their orientation. Edges
    named twice are glued, edges named once form the boundary and must be exactly the
    inputs and outputs. The same edge may occur twice in one triangle.
    """
    triangles: Tuple[Tuple[Hashable, Hashable, Hashable], ...]
    inputs: Tuple[Hashable, ...]
    outputs: Tuple[Hashable, ...]
    euler_characteristic: int

    def __post_init__(self):
        counts = defaultdict(int)
        for triangle in self.triangles:
            for edge in triangle:
                counts[edge] += 1
        if any(c > 2 for c in counts.values()):
            raise InputError("an edge of a cell surface lies on more than two triangle sides")
        boundary = {e for e, c in counts.items() if c == 1}
        free = list(self.inputs) + list(self.outputs)
        if len(set(free)) != len(free) or set(free) != boundary:
            raise BadBoundaryNames("inputs and outputs must be exactly the boundary edges")


def _triangle_edges(simplex: Simplex, sign: int) -> Tuple[Simplex, Simplex, Simplex]:
    v0, v1, v2 = simplex
    if sign > 0:
        return (v0, v1), (v1, v2), (v0, v2)
    return (v0, v2), (v1, v2), (v0, v1)


def surface_from_triangulation(tri: Triangulation, inputs: Sequence[Hashable] = (),
                               outputs: Sequence[Hashable] = ()) -> CellSurface:
    """Cell surface of a triangulated surface; inputs and outputs are edge lists."""
    triangles = tuple(_triangle_edges(s, sign) for s, sign in zip(tri.simplices, tri.signs))
    return CellSurface(triangles, tuple(inputs), tuple(outputs), tri.euler_characteristic())


def cylinder_surface(k: int, reverse: bool = False) -> CellSurface:
    """
    Canonical cylinder over a k-edge circle; k = 1 gives a single looped edge.

    In-edges ("a", i) are traversed along the circle order and out-edges ("b", i)
    against it; reverse flips both.
    """
    if k < 1:
        raise BadCircle("a circle needs at least one edge")
    triangles = []
    for i in range(k):
        a, b = ("a", i), ("b", i)
        v, v_next, d = ("v", i), ("v", (i + 1) % k), ("d", i)
        triangles.append((a, v_next, d))
        triangles.append((d, b, v))
    if reverse:
        triangles = [tuple(reversed(t)) for t in triangles]
    return CellSurface(tuple(triangles), tuple(("a", i) for i in range(k)), tuple(("b", i) for i in range(k)), 0)


def pants_surface() -> CellSurface:
    """Pair of pants with one-edge circles: inputs x, y and output z."""
    triangles = (("z", "s1", "t2"), ("t2", "x", "t3"), ("t3", "s1", "t4"), ("t4", "s2", "t5"), ("t5", "y", "s2"))
    return CellSurface(triangles, ("x", "y"), ("z",), -1)


def disk_surface() -> CellSurface:
    """Disk with a one-edge outgoing boundary."""
    return CellSurface((("z", "t", "t"),), (), ("z",), 1)


def _table(array: np.ndarray) -> Dict[Tuple[int, ...], Scalar]:
    return {index: array[index] for index in np.ndindex(*array.shape) if array[index] != 0}


def triangle_tensor(a: FrobeniusData) -> np.ndarray:
    """C[a, b, c] = eps(mu(mu(e_a, e_b), e_c))."""
    product = np.tensordot(a.mu, a.mu, axes=([2], [0]))
    return np.tensordot(product, a.eps, axes=([3], [0]))


def _network(surface: CellSurface, a: FrobeniusData) -> Tuple[List[Factor], List[Hashable], List[Hashable]]:
    cyclic = _table(triangle_tensor(a))
    raise_table = _table(a.inverse_pairing)
    input_slot = {edge: ("in", i) for i, edge in enumerate(surface.inputs)}
    output_slot = {edge: ("out", i) for i, edge in enumerate(surface.outputs)}

    occurrences = defaultdict(list)
    factors = []
    for t, triangle in enumerate(surface.triangles):
        names = []
        for slot, edge in enumerate(triangle):
            name = input_slot.get(edge, (t, slot))
            occurrences[edge].append(name)
            names.append(name)
        factors.append(Factor(names, cyclic))
    for edge, names in occurrences.items():
        if len(names) == 2:
            factors.append(Factor(names, raise_table))
        elif edge in output_slot:
            factors.append(Factor((names[0], output_slot[edge]), raise_table))
    keep_out = [("out", i) for i in range(len(surface.outputs))]
    keep_in = [("in", i) for i in range(len(surface.inputs))]
    return factors, keep_out, keep_in


def _flatten(values: Sequence[int], n: int) -> int:
    index = 0
    for v in values:
        index = index * n + v
    return index


def surface_operator(surface: CellSurface, a: FrobeniusData) -> SparseMatrix:
    """
    Linear map of a cell surface from its input edges to its output edges.

    Returns:
        Matrix with rows indexed by output labels and columns by input labels, multi-indices
        flattened with the first edge most significant
    """
    field = a.field
    n = a.dim
    factors, keep_out, keep_in = _network(surface, a)
    result = contract(factors, keep=keep_out + keep_in)
    weight = field.power(a.euler_weight, surface.euler_characteristic)
    k_out = len(keep_out)
    entries = {}
    for key, value in result.table.items():
        entries[_flatten(key[:k_out], n), _flatten(key[k_out:], n)] = value * weight
    return SparseMatrix((n ** len(keep_out), n ** len(keep_in)), entries, field)


def _bordism_names(tri: Triangulation, inputs, outputs) -> Tuple[List[str], List[str]]:
    names = set(tri.boundary_marks)
    if inputs is None and outputs is None:
        inputs = sorted(n for n in names if n.startswith("in"))
        outputs = sorted(n for n in names if not n.startswith("in"))
    inputs, outputs = list(inputs or ()), list(outputs or ())
    listed = inputs + outputs
    if len(set(listed)) != len(listed) or set(listed) != names:
        raise BadBoundaryNames(f"inputs {inputs} and outputs {outputs} must partition the boundary {sorted(names)}")
    return inputs, outputs


def evaluate_bordism_2d(m: Triangulation, a: FrobeniusData, inputs: Optional[Sequence[str]] = None,
                        outputs: Optional[Sequence[str]] = None) -> SparseMatrix:
    """
    Operator of a triangulated bordism between unions of circles.

    Args:
        m: Surface whose boundary components are all named circles
        a: The algebra
        inputs: Incoming circle names; by default those starting with "in"
        outputs: Outgoing circle names; by default the rest

    Returns:
        Matrix from the input circles' edge labels to the output circles' edge labels
    """
    ensure_valid(a)
    if m.dim != 2:
        raise NotClosed("bordisms here are surfaces")
    inputs, outputs = _bordism_names(m, inputs, outputs)
    in_edges = [e for name in inputs for e in boundary_circle(m, name).edges]
    out_edges = [e for name in outputs for e in boundary_circle(m, name).edges]
    logger.debug("evaluating bordism", inputs=inputs, outputs=outputs, triangles=len(m.simplices))
    return surface_operator(surface_from_triangulation(m, in_edges, out_edges), a)


def evaluate_closed_2d(m: Triangulation, a: FrobeniusData) -> Scalar:
    """
    State sum of a closed oriented surface.

    Raises:
        NotClosed: m has boundary or is not a surface
        InvalidDatum: the algebra fails an axiom
    """
    if m.dim != 2 or not m.is_closed:
        raise NotClosed("evaluate_closed_2d needs a closed surface")
    ensure_valid(a)
    matrix = surface_operator(surface_from_triangulation(m), a)
    return matrix.entries.get((0, 0), a.field.zero())


def cylinder_operator(k: int, a: FrobeniusData, reverse: bool = False) -> SparseMatrix:
    return surface_operator(cylinder_surface(k, reverse), a)


def circle_idempotent(circle: BoundaryCircle, a: FrobeniusData, role: str) -> SparseMatrix:
    """
    Cylinder idempotent that composes with a bordism at the given circle.

    Args:
        circle: The circle as read from the bordism
        a: The algebra
        role: "in" for a cylinder placed before the bordism, "out" for one placed after
    """
    if role == "in":
        reverse = circle.direction < 0
    elif role == "out":
        reverse = circle.direction > 0
    else:
        raise InputError(f"role must be 'in' or 'out', got {role!r}")
    return cylinder_operator(len(circle), a, reverse)


def _idempotents(m: Triangulation, names: Sequence[str], a: FrobeniusData, role: str) -> SparseMatrix:
    result = SparseMatrix.identity(1, a.field)
    for name in names:
        result = result.kron(circle_idempotent(boundary_circle(m, name), a, role))
    return result


def project_bordism(m: Triangulation, a: FrobeniusData, inputs: Optional[Sequence[str]] = None,
                    outputs: Optional[Sequence[str]] = None) -> SparseMatrix:
    """
    The bordism operator with a cylinder glued onto every boundary circle.

    Equals evaluate_bordism_2d for a valid algebra, since the operator already absorbs the
    idempotents of its circles.
    """
    ensure_valid(a)
    inputs, outputs = _bordism_names(m, inputs, outputs)
    matrix = evaluate_bordism_2d(m, a, inputs, outputs)
    return _idempotents(m, outputs, a, "out") @ matrix @ _idempotents(m, inputs, a, "in")


@dataclass
class StateSpace:
    """
    Image of the cylinder idempotent on a k-edge circle.

    Args:
        circle_size: k
        ambient_dim: n ** k
        projector: The idempotent P
        basis: Echelon basis of im(P)
        idempotency_residual: Largest entry of P @ P - P
    """
    circle_size: int
    ambient_dim: int
    projector: SparseMatrix
    basis: EchelonBasis
    idempotency_residual: Any

    @property
    def dim(self) -> int:
        return len(self.basis)


def _rank_of_idempotent(p: SparseMatrix) -> int:
    if p.field.exact:
        return int(p.trace())
    return numeric_rank(p)


def orbifold_state_space(circle_size: int, a: FrobeniusData) -> StateSpace:
    """
    State space of a circle with circle_size edges as the image of its cylinder idempotent.

    Raises:
        InvalidDatum: the algebra fails an axiom
    """
    ensure_valid(a)
    p = cylinder_operator(circle_size, a)
    residual = (p @ p).residual(p)
    rank = _rank_of_idempotent(p)
    basis = image_basis(p, rank)
    logger.debug("state space", circle_size=circle_size, rank=rank, residual=residual)
    return StateSpace(circle_size, a.dim ** circle_size, p, basis, residual)


@dataclass
class PointAlgebra:
    """
    The algebra of point insertions on the one-edge circle state space.

    Args:
        field: Scalar field of the coefficients
        basis: Basis vectors of the invariant subspace, as sparse vectors over the algebra basis
        structure: structure[i][j][k] = coefficient of y_k in y_i * y_j
        unit: Coordinates of the unit
    """
    field: ScalarField
    basis: List[Dict[int, Scalar]]
    structure: List[List[List[Scalar]]]
    unit: List[Scalar]

    @property
    def dim(self) -> int:
        return len(self.basis)

    def multiply(self, x: Sequence[Scalar], y: Sequence[Scalar]) -> List[Scalar]:
        zero = self.field.zero()
        result = [zero] * self.dim
        for i, j in itertools.product(range(self.dim), repeat=2):
            if x[i] == 0 or y[j] == 0:
                continue
            for k, c in enumerate(self.structure[i][j]):
                result[k] += x[i] * y[j] * c
        return result

    def check(self, tol: Optional[float] = None) -> ConstraintReport:
        """Commutativity, associativity and the unit laws as identities of structure constants."""
        field = self.field if tol is None or self.field.exact else ScalarField(self.field.mode, tol)
        report = ConstraintReport(field, title="point insertion algebra")
        basis = [[field.one() if k == i else field.zero() for k in range(self.dim)] for i in range(self.dim)]
        for i, j in itertools.product(range(self.dim), repeat=2):
            left, right = self.multiply(basis[i], basis[j]), self.multiply(basis[j], basis[i])
            for k in range(self.dim):
                report.observe("commutative", field.residual(left[k], right[k]), {"i": i, "j": j, "k": k})
            for l in range(self.dim):
                left = self.multiply(self.multiply(basis[i], basis[j]), basis[l])
                right = self.multiply(basis[i], self.multiply(basis[j], basis[l]))
                for k in range(self.dim):
                    report.observe("associative", field.residual(left[k], right[k]), {"i": i, "j": j, "l": l, "k": k})
        for i in range(self.dim):
            left, right = self.multiply(self.unit, basis[i]), self.multiply(basis[i], self.unit)
            for k in range(self.dim):
                report.observe("unit", field.residual(left[k], basis[i][k]), {"i": i, "k": k})
                report.observe("unit", field.residual(right[k], basis[i][k]), {"i": i, "k": k})
        return report


def point_insertion_algebra(a: FrobeniusData) -> PointAlgebra:
    """
    Invariant states of the one-edge circle with the product of the pair of pants and the
    unit of the disk.
    """
    space = orbifold_state_space(1, a)
    field = a.field
    pants = surface_operator(pants_surface(), a)
    disk = surface_operator(disk_surface(), a)
    n = a.dim
    vectors = space.basis.vectors

    def coordinates(vector: Dict[int, Scalar]) -> List[Scalar]:
        if not space.basis.contains(vector):
            raise InvalidDatum("a point insertion leaves the invariant subspace")
        return space.basis.coordinates(vector)

    structure = []
    for x in vectors:
        row = []
        for y in vectors:
            pair = {i * n + j: xi * yj for i, xi in x.items() for j, yj in y.items()}
            row.append(coordinates(pants.apply(pair)))
        structure.append(row)
    unit = coordinates(disk.column(0))
    logger.debug("point insertion algebra", dim=len(vectors))
    return PointAlgebra(field, [dict(v) for v in vectors], structure, unit)


def _boundary_tensor(patch: Triangulation, a: FrobeniusData, edges: Sequence[Simplex]) -> Dict[Tuple[int, ...], Scalar]:
    matrix = surface_operator(surface_from_triangulation(patch, edges, ()), a)
    n = a.dim
    result = {}
    for (_, column), value in matrix.entries.items():
        labels = []
        for _ in edges:
            labels.append(column % n)
            column //= n
        result[tuple(reversed(labels))] = value
    return result


def _compare_move(patch: Triangulation, site: MoveSite, a: FrobeniusData, field: ScalarField):
    after = mesh.apply_pachner_move(patch, site)
    edges = sorted(patch.boundary_facets, key=patch.height_key)
    before_tensor = _boundary_tensor(patch, a, edges)
    after_tensor = _boundary_tensor(after, a, edges)
    worst, witness = field.residual(field.zero(), field.zero()), None
    for key in set(before_tensor) | set(after_tensor):
        residual = field.residual(before_tensor.get(key, field.zero()), after_tensor.get(key, field.zero()))
        if residual > worst:
            worst = residual
            witness = {f"{u}-{v}": a.labels[x] for (u, v), x in zip(edges, key)}
    return mesh.variant_name(site.signature), worst, witness


def check_pachner_2d(a: FrobeniusData, base: Optional[Triangulation] = None, tol: Optional[float] = None,
                     jobs: int = 1) -> ConstraintReport:
    """
    Compare both sides of every oriented 2-2, 1-3 and 3-1 move with free boundary indices.

    Args:
        a: The algebra
        base: Surface whose move sites are checked; None checks every oriented template
        tol: Float tolerance overriding the algebra's field
        jobs: Worker threads

    Returns:
        One record per oriented variant, named by its signature

    Raises:
        InvalidDatum: the algebra is not associative or its pairing is not symmetric, so the
            triangle tensor is not cyclic
    """
    frobenius = check_frobenius_axioms(a)
    broken = [name for name in ("associativity", "symmetric") if not frobenius[name].passed]
    if broken:
        raise InvalidDatum(f"triangle tensor is not cyclic: {broken} fail", frobenius)
    field = a.field if tol is None or a.field.exact else ScalarField(a.field.mode, tol)
    report = ConstraintReport(field, title="pachner 2d")
    work = [(patch, site) for kind in MOVE_KINDS for patch, site in mesh.move_patches(base, kind, 2)]
    with ThreadPoolExecutor(max_workers=max(1, jobs)) as pool:
        results = list(pool.map(lambda item: _compare_move(item[0], item[1], a, field), work))
    for name, residual, witness in results:
        report.observe(name, residual, witness)
    report.notes["variants"] = len(report.records)
    if not report.passed:
        logger.warning("pachner invariance fails", failures=[r.name for r in report.failures()])
    return report


if __name__ == "__main__":
    from modules.orbifold2d.frob import cyclic_group_table, group_algebra
    from modules.topology.builtin import torus2

    algebra = group_algebra(cyclic_group_table(2))
    print("Z(T^2) =", evaluate_closed_2d(torus2(), algebra))
    print(check_pachner_2d(algebra).render_text())
