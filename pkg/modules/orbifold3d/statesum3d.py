"""
The three-dimensional state sum of fusion data on ordered triangulations.

Edges carry labels. Every tetrahedron contributes its F- or Fbar-weight according to its
orientation sign, every interior edge d_x, every boundary edge sqrt(d_x) and every interior
vertex phi ** -1. Closed manifolds sum out all labels; balls keep the boundary edge labels
free. Boundary triangles carry no index of their own because the fusion rules are
multiplicity free.
"""
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace
from typing import Dict, List, Optional, Sequence, Tuple

from core import log
from core.errors import InputError
from core.math import Scalar, ScalarField
from core.report import ConstraintReport
from core.tensor import Factor, contract
from modules.orbifold3d import fusioncat
from modules.orbifold3d.fusioncat import FusionData, InvalidFusionData
from modules.topology import mesh
from modules.topology.mesh import MoveSite, Simplex, Triangulation

logger = log.create_logger(__name__)

MOVE_KINDS = ("2-3", "1-4")


class NotClosed(InputError):
    pass


class NotABall(InputError):
    pass


@dataclass(frozen=True)
class BallTensor:
    """
    Args:
        edges: Boundary edges, in height order; position i of a key labels edges[i]
        table: Label assignment -> nonzero value
        field: Scalar field of the values
    """
    edges: Tuple[Simplex, ...]
    table: Dict[Tuple[int, ...], Scalar]
    field: ScalarField

    def value(self, labels: Sequence[int]) -> Scalar:
        return self.table.get(tuple(labels), self.field.zero())

    def residual(self, other: "BallTensor"):
        """Largest entrywise difference; other is read in this tensor's edge order."""
        if set(other.edges) != set(self.edges):
            raise NotABall("ball tensors have different boundary edges")
        other = other.reorder(self.edges)
        worst = self.field.residual(self.field.zero(), self.field.zero())
        for key in set(self.table) | set(other.table):
            worst = max(worst, self.field.residual(self.value(key), other.value(key)))
        return worst

    def reorder(self, edges: Sequence[Simplex]) -> "BallTensor":
        factor = Factor(self.edges, self.table).transpose(tuple(edges))
        return BallTensor(tuple(edges), factor.table, self.field)

    def __len__(self):
        return len(self.table)


def _tet_factors(tri: Triangulation, c: FusionData) -> List[Factor]:
    factors = []
    for simplex, sign in zip(tri.simplices, tri.signs):
        edges = [(simplex[i], simplex[j]) for i, j in fusioncat.TET_EDGES]
        factors.append(c.tet_factor(edges, sign))
    return factors


def _require_valid(c: FusionData, verify: bool):
    fusioncat.ensure_well_formed(c)
    if verify:
        report = fusioncat.check_special_orbifold_datum(c)
        if not report.passed:
            raise InvalidFusionData(f"not a special orbifold datum: {[r.name for r in report.failures()]}", report)


def tv_evaluate_closed(m: Triangulation, c: FusionData, jobs: int = 1, verify: bool = True) -> Scalar:
    """
    State sum of a closed oriented 3-manifold.

    The sum is split over the labels of the lowest edge and the partial sums are added in
    label order, so the value does not depend on jobs.

    Args:
        m: Closed triangulated 3-manifold
        c: Fusion data
        jobs: Worker threads for the partial sums
        verify: Check the ten constraints first

    Returns:
        sum over labelings of prod d_x * prod W * phi ** -V

    Raises:
        NotClosed: m is not a closed 3-manifold
        InvalidFusionData: c is malformed or, with verify, fails a constraint
    """
    if m.dim != 3 or not m.is_closed:
        raise NotClosed("the closed state sum needs a closed 3-manifold")
    _require_valid(c, verify)
    field = c.field
    factors = _tet_factors(m, c) + [c.edge_factor(e) for e in m.faces[1]]
    split = m.faces[1][0]

    def partial(label: int) -> Scalar:
        pin = Factor((split,), {(label,): field.one()})
        return contract(factors + [pin]).table.get((), field.zero())

    with ThreadPoolExecutor(max_workers=max(1, jobs)) as pool:
        parts = list(pool.map(partial, range(c.rank)))
    total = field.zero()
    for part in parts:
        total += part
    value = total * field.power(field.convert(c.phi), -len(m.heights))
    logger.debug("closed state sum", tetrahedra=len(m.simplices), edges=len(m.faces[1]), value=field.format(value))
    return value


def evaluate_ball_tensor(b: Triangulation, c: FusionData) -> BallTensor:
    """
    State sum of a triangulated 3-ball with its boundary edge labels free.

    Raises:
        NotABall: b is not a connected 3-manifold with 2-sphere boundary and trivial
            Z/2 first homology; vertex links are checked when b is built
    """
    if b.dim != 3 or mesh.surface_kind(b.boundary_facets) != "sphere":
        raise NotABall("ball tensors need a 3-ball with 2-sphere boundary")
    betti = mesh.z2_betti_numbers(b)
    if betti != (1, 0):
        raise NotABall(f"not a ball: Z/2 betti numbers {betti}, expected (1, 0)")
    fusioncat.ensure_well_formed(c)
    field = c.field
    boundary = b.boundary_faces
    edges = b.faces[1]
    free = tuple(e for e in edges if e in boundary)
    factors = _tet_factors(b, c)
    factors.extend(c.edge_factor(e, boundary=e in boundary) for e in edges)
    table = contract(factors, keep=free).table
    inner = sum(1 for v in b.faces[0] if v not in boundary)
    scale = field.power(field.convert(c.phi), -inner)
    return BallTensor(free, {key: value * scale for key, value in table.items()}, field)


def contract_ball_tensors(left: BallTensor, right: BallTensor, c: FusionData, free_edges: Sequence[Simplex],
                          interior_vertices: int = 0) -> BallTensor:
    """
    Glue two balls along a common boundary disk.

    Shared edges not in free_edges are summed; each side already carries sqrt(d_x) on them.
    Shared edges that stay on the boundary lose one sqrt(d_x).

    Args:
        left, right: Ball tensors whose edges are named by the same vertex ids
        c: Fusion data both tensors were evaluated with
        free_edges: Boundary edges of the glued ball, in the order of the result
        interior_vertices: Interface vertices that become interior

    Returns:
        The ball tensor of the glued ball
    """
    field = c.field
    free_edges = tuple(free_edges)
    shared = set(left.edges) & set(right.edges)
    outside = (set(left.edges) | set(right.edges)) - shared
    if not outside <= set(free_edges) or not set(free_edges) <= set(left.edges) | set(right.edges):
        raise NotABall("free edges must be the unshared edges plus the rim of the interface")
    rim = [e for e in free_edges if e in shared]
    inverse_root = {(x,): field.inverse(field.convert(r)) for x, r in enumerate(c.sqrt_d)}
    factors = [Factor(left.edges, left.table), Factor(right.edges, right.table)]
    factors.extend(Factor((e,), inverse_root) for e in rim)
    table = contract(factors, keep=free_edges).table
    scale = field.power(field.convert(c.phi), -interior_vertices)
    return BallTensor(free_edges, {key: value * scale for key, value in table.items()}, field)


def _compare_move(patch: Triangulation, site: MoveSite, c: FusionData):
    before = evaluate_ball_tensor(patch, c)
    after = evaluate_ball_tensor(mesh.apply_pachner_move(patch, site), c)
    after = after.reorder(before.edges)
    worst, witness = c.field.residual(c.field.zero(), c.field.zero()), None
    for key in set(before.table) | set(after.table):
        residual = c.field.residual(before.value(key), after.value(key))
        if residual > worst:
            worst = residual
            witness = {f"{u}-{v}": c.labels[x] for (u, v), x in zip(before.edges, key)}
    return mesh.variant_name(site.signature), worst, witness


def check_pachner_3d(c: FusionData, base: Optional[Triangulation] = None, tol: Optional[float] = None,
                     jobs: int = 1) -> ConstraintReport:
    """
    Compare both sides of every oriented 2-3 and 1-4 move, then the three bubble moves.

    Args:
        c: Fusion data; the ten constraints need not hold
        base: 3-manifold whose move sites are checked; None checks the 20 + 10 templates
        tol: Float tolerance overriding the data's field
        jobs: Worker threads

    Returns:
        One record per oriented variant, named by its signature, plus bubble_1..3

    Raises:
        InvalidFusionData: the data is not well formed
    """
    fusioncat.ensure_well_formed(c)
    field = c.field if tol is None or c.field.exact else ScalarField(c.field.mode, tol)
    checker = c if field == c.field else replace(c, field=field, Fbar=c.Fbar if c.fbar_given else None)
    work = [(patch, site) for kind in MOVE_KINDS for patch, site in mesh.move_patches(base, kind, 3)]
    with ThreadPoolExecutor(max_workers=max(1, jobs)) as pool:
        results = list(pool.map(lambda item: _compare_move(item[0], item[1], checker), work))
    report = ConstraintReport(field, title="pachner 3d")
    for name, residual, witness in results:
        report.observe(name, residual, witness)
    for name in fusioncat.BUBBLES:
        fusioncat.bubble(checker, name, report)
    report.notes["variants"] = len(report.records) - len(fusioncat.BUBBLES)
    if not report.passed:
        logger.warning("pachner invariance fails", failures=[r.name for r in report.failures()])
    return report


if __name__ == "__main__":
    from modules.topology.builtin import sphere3, torus3

    z2 = fusioncat.vec_zn(2)
    print("Z(S^3) =", z2.field.format(tv_evaluate_closed(sphere3(), z2)))
    print("Z(T^3) =", z2.field.format(tv_evaluate_closed(torus3(), z2)))
    print(check_pachner_3d(fusioncat.fibonacci()).render_text())
