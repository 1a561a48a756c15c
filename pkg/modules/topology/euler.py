"""
Euler characteristics of stratified triangulations and the Euler defect theory.

A stratum is a set of open cells (faces of the triangulation of any dimension). For a
j-dimensional stratum S, its cells off the boundary of the total space form the open
manifold S°, its cells on the boundary form the (j-1)-manifold dS, and

    chi(S)  = (-1)**j     * chi_c(S°)
    chi(dS) = (-1)**(j-1) * chi_c(dS)
    chi~(S) = 2 chi(S) - chi(dS)

where chi_c is the alternating count of open cells. The symmetric characteristic chi~ is
additive under gluing along closed interfaces.
"""
import itertools
from collections import defaultdict, deque
from dataclasses import dataclass
from typing import Any, Dict, FrozenSet, Iterable, Mapping, Sequence, Tuple, Union

from core import log
from core.errors import InputError
from core.math import EXACT, Scalar, ScalarField
from modules.topology import mesh
from modules.topology.mesh import Simplex, Triangulation

logger = log.create_logger(__name__)


class StratificationError(InputError):
    pass


class NonInvertibleWeight(InputError):
    pass


@dataclass(frozen=True)
class Stratum:
    """
    Args:
        dim: Dimension of the stratum
        label: Defect label carried by the stratum
        cells: Open cells of the stratum, each in height order
    """
    dim: int
    label: str
    cells: FrozenSet[Simplex]


@dataclass(frozen=True, eq=False)
class StratifiedComplex:
    underlying: Triangulation
    strata: Tuple[Stratum, ...]

    def to_json(self) -> Dict[str, Any]:
        data = self.underlying.to_json()
        data["strata"] = [
            {"dim": s.dim, "label": s.label,
             "simplices": [list(c) for c in sorted(s.cells, key=self.underlying.height_key)]}
            for s in self.strata
        ]
        return data


def _closure(cells: Iterable[Simplex]) -> set:
    closure = set()
    for cell in cells:
        for r in range(1, len(cell) + 1):
            closure.update(_subfaces(cell, r))
    return closure


def _subfaces(cell: Simplex, size: int):
    return itertools.combinations(cell, size)


def _connected(cells: FrozenSet[Simplex]) -> bool:
    if not cells:
        return False
    neighbours = defaultdict(set)
    for cell in cells:
        for r in range(1, len(cell)):
            for face in _subfaces(cell, r):
                if face in cells:
                    neighbours[cell].add(face)
                    neighbours[face].add(cell)
    start = next(iter(cells))
    seen = {start}
    queue = deque([start])
    while queue:
        for other in neighbours[queue.popleft()]:
            if other not in seen:
                seen.add(other)
                queue.append(other)
    return len(seen) == len(cells)


def stratify(tri: Triangulation, strata: Sequence[Tuple[int, str, Iterable[Sequence[int]]]]) -> StratifiedComplex:
    """
    Validate a user-declared stratification.

    Args:
        tri: The underlying triangulation
        strata: (dim, label, cells) triples; cells are vertex tuples of any size

    Returns:
        The validated StratifiedComplex

    Raises:
        StratificationError: strata do not partition the cells, are disconnected, have the
            wrong dimension or violate the frontier condition
    """
    owner: Dict[Simplex, int] = {}
    built = []
    for index, (dim, label, cells) in enumerate(strata):
        sorted_cells = set()
        for cell in cells:
            face = tri.sort(cell)
            if face not in tri.star:
                raise StratificationError(f"stratum {label!r} lists {tuple(cell)}, not a face")
            if face in owner:
                raise StratificationError(f"cell {face} lies in two strata")
            owner[face] = index
            sorted_cells.add(face)
        stratum = Stratum(int(dim), str(label), frozenset(sorted_cells))
        if not 0 <= stratum.dim <= tri.dim:
            raise StratificationError(f"stratum {label!r} has dimension {dim} outside 0..{tri.dim}")
        top = max((len(c) - 1 for c in stratum.cells), default=-1)
        if top != stratum.dim:
            raise StratificationError(f"stratum {label!r} declared dim {dim} but its cells reach dim {top}")
        if not _connected(stratum.cells):
            raise StratificationError(f"stratum {label!r} is not connected")
        built.append(stratum)

    missing = [f for f in tri.star if f not in owner]
    if missing:
        raise StratificationError(f"{len(missing)} cells belong to no stratum, e.g. {missing[0]}")

    for index, stratum in enumerate(built):
        closure = _closure(stratum.cells)
        touched = {owner[c] for c in closure} - {index}
        for other in touched:
            if built[other].dim >= stratum.dim:
                raise StratificationError(
                    f"stratum {built[other].label!r} meets the frontier of {stratum.label!r} but is not lower-dimensional")
            if not built[other].cells <= closure:
                raise StratificationError(
                    f"stratum {built[other].label!r} meets the closure of {stratum.label!r} without lying in it")
    return StratifiedComplex(tri, tuple(built))


def whole(tri: Triangulation, label: str = "bulk") -> StratifiedComplex:
    """The trivial stratification with a single top-dimensional stratum."""
    return StratifiedComplex(tri, (Stratum(tri.dim, label, frozenset(tri.star)),))


def puncture(tri: Triangulation, vertex: int, label: str = "point", bulk: str = "bulk") -> StratifiedComplex:
    """Mark an interior vertex as a 0-dimensional stratum."""
    point = (vertex,)
    if point not in tri.star or not tri.is_interior(point):
        raise StratificationError(f"vertex {vertex} is not an interior vertex")
    return stratify(tri, [(0, label, [point]), (tri.dim, bulk, [f for f in tri.star if f != point])])


def stratified_from_json(data: Mapping[str, Any]) -> StratifiedComplex:
    tri = mesh.from_json(data)
    raw = data.get("strata")
    if raw is None:
        return whole(tri)
    try:
        strata = [(s["dim"], s.get("label", f"s{i}"), s["simplices"]) for i, s in enumerate(raw)]
    except (KeyError, TypeError, AttributeError) as e:
        raise StratificationError(f"each stratum needs dim and simplices: {e}")
    return stratify(tri, strata)


def _compact_counts(complex_: StratifiedComplex, stratum: Stratum) -> Tuple[int, int]:
    boundary = complex_.underlying.boundary_faces
    interior = on_boundary = 0
    for cell in stratum.cells:
        sign = (-1) ** (len(cell) - 1)
        if cell in boundary:
            on_boundary += sign
        else:
            interior += sign
    return interior, on_boundary


def euler_characteristics(x: Union[StratifiedComplex, Triangulation]) -> Tuple[Tuple[int, ...], Tuple[int, ...]]:
    """
    Euler characteristic and symmetric Euler characteristic of every stratum.

    Args:
        x: A stratified complex, or a triangulation read as a single stratum

    Returns:
        (chi per stratum, chi~ per stratum), aligned with x.strata
    """
    if isinstance(x, Triangulation):
        x = whole(x)
    chis, symmetric = [], []
    for stratum in x.strata:
        interior, on_boundary = _compact_counts(x, stratum)
        j = stratum.dim
        if j == 0:
            # a boundary point counts once, an interior one twice
            chi, chi_boundary = interior + on_boundary, on_boundary
        else:
            chi = (-1) ** j * interior
            chi_boundary = (-1) ** (j - 1) * on_boundary
        chis.append(chi)
        symmetric.append(2 * chi - chi_boundary)
    return tuple(chis), tuple(symmetric)


def symmetric_euler(x: Union[StratifiedComplex, Triangulation]) -> int:
    """chi~ of the top stratum of a triangulation, or the sum over top-dimensional strata."""
    if isinstance(x, Triangulation):
        x = whole(x)
    _, symmetric = euler_characteristics(x)
    top = x.underlying.dim
    return sum(s for s, stratum in zip(symmetric, x.strata) if stratum.dim == top)


def point_removal_defect(n: int) -> int:
    """2 E_n with E_n = chi(S^(n-1)) - 1: the change of chi~ when an interior point is removed."""
    return 2 * (-1) ** (n - 1)


@dataclass(frozen=True)
class EulerWeights:
    """
    Args:
        psi: Stratum dimension j -> invertible weight; missing dimensions weigh 1
    """
    psi: Mapping[int, Scalar]

    def __post_init__(self):
        for j, value in self.psi.items():
            if value == 0:
                raise NonInvertibleWeight(f"psi_{j} is zero")

    def weight(self, j: int, field: ScalarField) -> Scalar:
        return field.convert(self.psi[j]) if j in self.psi else field.one()

    @classmethod
    def from_json(cls, data: Mapping[str, Any], field: ScalarField = EXACT) -> "EulerWeights":
        raw = data.get("psi") if isinstance(data, Mapping) else None
        if not isinstance(raw, Mapping):
            raise InputError("weights JSON needs a psi object mapping dimension to scalar")
        try:
            return cls({int(j): field.parse(v) for j, v in raw.items()})
        except ValueError:
            raise InputError(f"psi keys must be stratum dimensions, got {sorted(raw)}")


def z_euler_evaluate(m: Union[StratifiedComplex, Triangulation], weights: EulerWeights,
                     field: ScalarField = EXACT) -> Scalar:
    """
    Value of the Euler theory: the product over strata of dimension j >= 1 of psi_j ** chi~.

    Args:
        m: Stratified bordism; its in/out split does not enter the value
        weights: The weights psi_j
        field: Scalar field of the result

    Returns:
        The product of weights
    """
    if isinstance(m, Triangulation):
        m = whole(m)
    _, symmetric = euler_characteristics(m)
    value = field.one()
    for stratum, exponent in zip(m.strata, symmetric):
        if stratum.dim < 1 or exponent == 0:
            continue
        value *= field.power(weights.weight(stratum.dim, field), exponent)
    logger.debug("euler theory", strata=len(m.strata), exponents=list(symmetric))
    return value
