"""
Multiplicity-free spherical fusion data with Euler weights, and its ten defining constraints.

Labels are indexed by ints internally. For a tetrahedron with height-sorted vertices
0 < 1 < 2 < 3 the edge labels enter the F-symbol as

    a = x01, b = x12, c = x23, d = x03, e = x02, f = x13

so F^{abc}_{d; e, f} maps ((a b)_e c)_d to (a (b c)_f)_d, and every face p < q < r must be
admissible as N(x_pq, x_qr, x_pr). A positively oriented tetrahedron weighs
F / sqrt(d_e d_f), a negatively oriented one Fbar / sqrt(d_e d_f) with
Fbar^{abc}_{d; e, f} = ((F^{abc}_d)^-1)_{f, e}.
"""
import itertools
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field as dc_field, replace
from functools import cached_property
from typing import Any, Dict, FrozenSet, Hashable, List, Mapping, Optional, Sequence, Tuple

from core import log
from core.errors import CheckFailure, InputError
from core.linalg import SingularMatrix, invert
from core.math import EXACT, Scalar, ScalarField, float_field
from core.report import CheckReport, ConstraintReport
from core.tensor import Factor, contract

logger = log.create_logger(__name__)

Sextuple = Tuple[int, int, int, int, int, int]

SQRT_BRANCH = "positive root for positive reals, principal branch otherwise"

# (i, j) pairs of a tetrahedron's vertices in the order a, b, c, d, e, f
TET_EDGES = ((0, 1), (1, 2), (2, 3), (0, 3), (0, 2), (1, 3))
TET_FACES = ((0, 1, 2), (0, 2, 3), (1, 2, 3), (0, 1, 3))


class InvalidFusionData(CheckFailure):
    """Fusion data fails a well-formedness check or a defining constraint; carries the report."""
    pass


class UnknownCategory(InputError):
    pass


@dataclass(frozen=True, eq=False)
class FusionData:
    """
    Args:
        field: Scalar arithmetic
        labels: Label names; index 0 need not be the unit
        unit: Index of the unit label
        dual: dual[a] is the index of a*
        fusion: Admissible triples (a, b, c), i.e. c occurs in a (x) b
        F: Sextuple (a, b, c, d, e, f) -> F^{abc}_{d; e, f}
        d: Quantum dimension per label; psi_a ** 2 = d_a
        phi: The bubble weight
        Fbar: Inverse F-symbols; derived by block inversion when None
    """
    field: ScalarField
    labels: Tuple[str, ...]
    unit: int
    dual: Tuple[int, ...]
    fusion: FrozenSet[Tuple[int, int, int]]
    F: Mapping[Sextuple, Scalar]
    d: Tuple[Scalar, ...]
    phi: Scalar
    Fbar: Optional[Mapping[Sextuple, Scalar]] = None
    fbar_given: bool = dc_field(init=False, repr=False)

    def __post_init__(self):
        n = len(self.labels)
        if not 0 <= self.unit < n or len(self.dual) != n or len(self.d) != n:
            raise InputError("unit, dual and d must match the labels")
        if any(not all(0 <= x < n for x in t) for t in self.fusion):
            raise InputError("fusion rules mention unknown labels")
        object.__setattr__(self, "fbar_given", self.Fbar is not None)
        if self.Fbar is None:
            object.__setattr__(self, "Fbar", derive_fbar(self))

    @property
    def rank(self) -> int:
        return len(self.labels)

    def N(self, a: int, b: int, c: int) -> int:
        return 1 if (a, b, c) in self.fusion else 0

    def outcomes(self, a: int, b: int) -> List[int]:
        return [c for c in range(self.rank) if (a, b, c) in self.fusion]

    def blocks(self) -> Dict[Tuple[int, int, int, int], Tuple[List[int], List[int]]]:
        """(a, b, c, d) -> (admissible e, admissible f) for every nonempty F-block."""
        result = {}
        for a, b, c, d in itertools.product(range(self.rank), repeat=4):
            es = [e for e in range(self.rank) if self.N(a, b, e) and self.N(e, c, d)]
            fs = [f for f in range(self.rank) if self.N(b, c, f) and self.N(a, f, d)]
            if es or fs:
                result[a, b, c, d] = (es, fs)
        return result

    @cached_property
    def sqrt_d(self) -> Tuple[Scalar, ...]:
        return tuple(self.field.sqrt(x) for x in self.d)

    @cached_property
    def admissible_tets(self) -> Tuple[Sextuple, ...]:
        tets = []
        for (a, b, c, d), (es, fs) in sorted(self.blocks().items()):
            tets.extend((a, b, c, d, e, f) for e in es for f in fs)
        return tuple(tets)

    def _tet_table(self, symbols: Mapping[Sextuple, Scalar]) -> Dict[Sextuple, Scalar]:
        table = {}
        for key in self.admissible_tets:
            value = symbols.get(key, 0)
            if value != 0:
                e, f = key[4], key[5]
                table[key] = self.field.convert(value) / (self.sqrt_d[e] * self.sqrt_d[f])
        return table

    @cached_property
    def positive_tets(self) -> Dict[Sextuple, Scalar]:
        return self._tet_table(self.F)

    @cached_property
    def negative_tets(self) -> Dict[Sextuple, Scalar]:
        return self._tet_table(self.Fbar)

    def tet_factor(self, edge_variables: Sequence[Hashable], sign: int) -> Factor:
        """Weight of a tetrahedron; edge_variables in the order a, b, c, d, e, f."""
        return Factor(edge_variables, self.positive_tets if sign > 0 else self.negative_tets)

    def edge_factor(self, variable: Hashable, boundary: bool = False) -> Factor:
        """d_x on an interior edge, sqrt(d_x) on a boundary edge."""
        weights = self.sqrt_d if boundary else self.d
        return Factor((variable,), {(x,): self.field.convert(w) for x, w in enumerate(weights)})

    def face_factor(self, variables: Sequence[Hashable]) -> Factor:
        return Factor(variables, {t: self.field.one() for t in self.fusion})

    def gauge_transform(self, u: Mapping[Tuple[int, int, int], Scalar]) -> "FusionData":
        """
        Rescale the fusion spaces: F picks up u(a,b,e) u(e,c,d) / (u(b,c,f) u(a,f,d)).

        Args:
            u: Admissible triple -> invertible scalar; missing triples stay 1
        """
        scale = lambda t: self.field.convert(u.get(t, 1))
        for t in u:
            if scale(t) == 0:
                raise InputError(f"gauge factor for {t} is zero")
        F = {}
        for (a, b, c, d, e, f), value in self.F.items():
            F[a, b, c, d, e, f] = value * scale((a, b, e)) * scale((e, c, d)) / (scale((b, c, f)) * scale((a, f, d)))
        return replace(self, F=F, Fbar=None)

    def with_f(self, key: Sextuple, value) -> "FusionData":
        """Copy with one F-symbol replaced and Fbar re-derived."""
        F = dict(self.F)
        F[key] = self.field.convert(value)
        return replace(self, F=F, Fbar=None)

    def with_phi(self, phi) -> "FusionData":
        return replace(self, phi=self.field.convert(phi), Fbar=self.Fbar if self.fbar_given else None)

    def index(self, name: str) -> int:
        try:
            return self.labels.index(name)
        except ValueError:
            raise InputError(f"unknown label {name!r}")

    def to_json(self) -> Dict[str, Any]:
        name = lambda x: self.labels[x]
        return {
            "labels": list(self.labels),
            "unit": name(self.unit),
            "dual": {name(a): name(b) for a, b in enumerate(self.dual)},
            "N": [[name(x) for x in t] for t in sorted(self.fusion)],
            "F": [[name(x) for x in key] + [self.field.to_json(v)] for key, v in sorted(self.F.items())],
            "d": {name(a): self.field.to_json(v) for a, v in enumerate(self.d)},
            "phi": self.field.to_json(self.phi),
        }

    def __repr__(self):
        return f"FusionData(labels={list(self.labels)}, mode={self.field.mode})"


def derive_fbar(c: FusionData) -> Dict[Sextuple, Scalar]:
    """Invert every F-block; blocks that are not square or singular are left out."""
    fbar = {}
    zero = c.field.zero()
    for (a, b, cc, d), (es, fs) in c.blocks().items():
        if len(es) != len(fs) or not es:
            continue
        matrix = [[c.field.convert(c.F.get((a, b, cc, d, e, f), zero)) for f in fs] for e in es]
        try:
            inverse = invert(matrix, c.field)
        except SingularMatrix:
            continue
        for i, e in enumerate(es):
            for j, f in enumerate(fs):
                value = inverse[j][i]
                if value != 0:
                    fbar[a, b, cc, d, e, f] = c.field.convert(value)
    return fbar


def from_json(data: Mapping[str, Any], field: ScalarField = EXACT) -> FusionData:
    """
    Read fusion data from its JSON object.

    Args:
        data: labels, unit, dual, N (label triples), F ([a, b, c, d, e, f, value] rows), d, phi
        field: Scalar field the values are parsed into
    """
    try:
        labels = tuple(str(x) for x in data["labels"])
        index = {name: i for i, name in enumerate(labels)}
        look = lambda name: index[str(name)]
        unit = look(data["unit"])
        raw_dual = data["dual"]
        if isinstance(raw_dual, Mapping):
            dual = tuple(look(raw_dual[name]) for name in labels)
        else:
            dual = tuple(look(x) for x in raw_dual)
        fusion = frozenset(tuple(look(x) for x in t) for t in data["N"])
        F = {}
        for row in data["F"]:
            F[tuple(look(x) for x in row[:6])] = field.parse(row[6])
        raw_d = data["d"]
        if isinstance(raw_d, Mapping):
            d = tuple(field.parse(raw_d[name]) for name in labels)
        else:
            d = tuple(field.parse(x) for x in raw_d)
        phi = field.parse(data["phi"])
    except KeyError as e:
        raise InputError(f"category JSON is missing or misnames {e}")
    except (TypeError, IndexError, ValueError) as e:
        raise InputError(f"malformed category JSON: {e}")
    if any(len(t) != 3 for t in fusion):
        raise InputError("fusion rules must be label triples")
    return FusionData(field, labels, unit, dual, fusion, F, d, phi)


def validate_fusion_data(c: FusionData) -> CheckReport:
    """
    Well-formedness: unit and dual laws, associativity of the fusion rules, F defined exactly
    on admissible sextuples, F and Fbar mutually inverse, invertible weights.
    """
    field = c.field
    report = CheckReport(field, title="fusion data")
    zero, one = field.zero(), field.one()
    labels = range(c.rank)
    count = lambda ok: field.zero() if ok else field.one()
    name = lambda x: c.labels[x]

    for a, b in itertools.product(labels, repeat=2):
        expected = 1 if a == b else 0
        report.observe("unit", count(c.N(c.unit, a, b) == expected and c.N(a, c.unit, b) == expected),
                       {"a": name(a), "b": name(b)})
    for a in labels:
        report.observe("duals", count(c.dual[c.dual[a]] == a and c.N(a, c.dual[a], c.unit) == 1),
                       {"a": name(a)})
    for a, b, cc, d in itertools.product(labels, repeat=4):
        left = sum(c.N(a, b, e) * c.N(e, cc, d) for e in labels)
        right = sum(c.N(b, cc, f) * c.N(a, f, d) for f in labels)
        report.observe("fusion_associativity", field.residual(field.convert(left), field.convert(right)),
                       {"a": name(a), "b": name(b), "c": name(cc), "d": name(d)})

    admissible = set(c.admissible_tets)
    stray = [k for k in c.F if k not in admissible]
    missing = [k for k in admissible if k not in c.F]
    report.declare("f_support")
    if stray:
        report.fail("f_support", "F defined on inadmissible labels", {"labels": [name(x) for x in stray[0]]})
    if missing:
        report.fail("f_support", "F missing on admissible labels", {"labels": [name(x) for x in missing[0]]})

    report.declare("f_inverse")
    for (a, b, cc, d), (es, fs) in c.blocks().items():
        witness = {"a": name(a), "b": name(b), "c": name(cc), "d": name(d)}
        if len(es) != len(fs):
            report.fail("f_inverse", "F-block is not square", witness)
            continue
        for e, e2 in itertools.product(es, repeat=2):
            total = sum((field.convert(c.F.get((a, b, cc, d, e, f), zero)) *
                         field.convert(c.Fbar.get((a, b, cc, d, e2, f), zero)) for f in fs), zero)
            report.observe("f_inverse", field.residual(total, one if e == e2 else zero), dict(witness, e=name(e)))
        for f, f2 in itertools.product(fs, repeat=2):
            total = sum((field.convert(c.Fbar.get((a, b, cc, d, e, f), zero)) *
                         field.convert(c.F.get((a, b, cc, d, e, f2), zero)) for e in es), zero)
            report.observe("f_inverse", field.residual(total, one if f == f2 else zero), dict(witness, f=name(f)))

    report.declare("invertible_weights")
    for a in labels:
        if c.d[a] == 0:
            report.fail("invertible_weights", f"d_{name(a)} is zero", {"a": name(a)})
    if c.phi == 0:
        report.fail("invertible_weights", "phi is zero")
    if not report.passed:
        logger.warning("fusion data is malformed", failures=[r.name for r in report.failures()])
    return report


def ensure_well_formed(c: FusionData) -> CheckReport:
    report = validate_fusion_data(c)
    if not report.passed:
        raise InvalidFusionData(f"fusion data fails {[r.name for r in report.failures()]}", report)
    return report


def _edge_name(edge: Tuple[int, int]) -> str:
    return f"x{edge[0]}{edge[1]}"


def _compare_tables(report: CheckReport, name: str, c: FusionData, variables: Sequence[str],
                    left: Mapping[Tuple[int, ...], Scalar], right: Mapping[Tuple[int, ...], Scalar]):
    field = c.field
    zero = field.zero()
    report.declare(name)
    for key in sorted(set(left) | set(right)):
        residual = field.residual(left.get(key, zero), right.get(key, zero))
        report.observe(name, residual, {v: c.labels[x] for v, x in zip(variables, key)})


def _tet_variables(vertices: Sequence[int], rename: Mapping[Tuple[int, int], str] = None) -> List[str]:
    rename = rename or {}
    names = []
    for i, j in TET_EDGES:
        edge = (vertices[i], vertices[j])
        names.append(rename.get(edge, _edge_name(edge)))
    return names


def ball_table(c: FusionData, tets: Sequence[Tuple[Sequence[int], int]], interior_edges: Sequence[Tuple[int, int]],
               boundary: Sequence[str], interior_vertices: int = 0) -> Dict[Tuple[int, ...], Scalar]:
    """
    Contract a small ball given directly by its tetrahedra (vertices in height order, sign).

    Boundary edges carry no weight here; they cancel between the two sides of a constraint.
    """
    factors = [c.tet_factor(_tet_variables(v), sign) for v, sign in tets]
    factors.extend(c.edge_factor(_edge_name(e)) for e in interior_edges)
    table = contract(factors, keep=boundary).table
    scale = c.field.power(c.field.convert(c.phi), -interior_vertices)
    return {key: value * scale for key, value in table.items()}


def pentagon(c: FusionData, report: CheckReport):
    """The all-positive 2-3 move on vertices 0 < 1 < 2 < 3 < 4: two tetrahedra against three."""
    boundary = [_edge_name(e) for e in itertools.combinations(range(5), 2) if e != (1, 3)]
    two = [((0, 2, 3, 4), 1), ((0, 1, 2, 4), 1)]
    three = [((1, 2, 3, 4), 1), ((0, 1, 3, 4), 1), ((0, 1, 2, 3), 1)]
    left = ball_table(c, two, [], boundary)
    right = ball_table(c, three, [(1, 3)], boundary)
    _compare_tables(report, "pentagon", c, boundary, left, right)


def lens(c: FusionData, pair: Tuple[int, int], report: CheckReport):
    """
    A positive and a negative tetrahedron on the same vertices glued along the two faces
    containing the edge opposite to pair; the two copies of pair stay apart. Summing the
    interior edge must give delta / d times the admissibility of the two faces at pair.
    """
    i, j = pair
    k, l = (v for v in range(4) if v not in pair)
    first, second = "x", "y"
    upper = c.tet_factor(_tet_variables((0, 1, 2, 3), {pair: first}), 1)
    lower = c.tet_factor(_tet_variables((0, 1, 2, 3), {pair: second}), -1)
    inner = c.edge_factor(_edge_name((k, l)))
    outer = [_edge_name(tuple(sorted(e))) for e in ((i, k), (j, k), (i, l), (j, l))]
    keep = [first, second] + outer
    left = contract([upper, lower, inner], keep=keep).table

    field = c.field
    right = {}
    faces = [tuple(sorted((i, j, k))), tuple(sorted((i, j, l)))]
    for labels in itertools.product(range(c.rank), repeat=4):
        edge_label = dict(zip([tuple(sorted(e)) for e in ((i, k), (j, k), (i, l), (j, l))], labels))
        for x in range(c.rank):
            edge_label[pair] = x
            ok = all(c.N(edge_label[(p, q)], edge_label[(q, r)], edge_label[(p, r)]) for p, q, r in faces)
            if ok:
                right[(x, x) + labels] = field.inverse(field.convert(c.d[x]))
    _compare_tables(report, f"lens_{i}{j}", c, keep, left, right)


BUBBLES = {"bubble_1": 0, "bubble_2": 1, "bubble_3": 3}


def bubble(c: FusionData, name: str, report: CheckReport):
    """
    A pillow against a flat triangle. The positive and the negative tetrahedron on 0 < 1 < 2 < 3
    are glued along the three faces at the bubble vertex, which is interior; the edges at it
    are summed with d_x and the vertex contributes phi ** -1. The result must be the
    admissibility of the opposite triangle.
    """
    apex = BUBBLES[name]
    p, q, r = (v for v in range(4) if v != apex)
    boundary = [_edge_name((p, q)), _edge_name((q, r)), _edge_name((p, r))]
    inner = [(i, j) for i, j in TET_EDGES if apex in (i, j)]
    left = ball_table(c, [((0, 1, 2, 3), 1), ((0, 1, 2, 3), -1)], inner, boundary, interior_vertices=1)
    right = {t: c.field.one() for t in c.fusion}
    _compare_tables(report, name, c, boundary, left, right)


LENS_PAIRS = tuple(itertools.combinations(range(4), 2))


def check_special_orbifold_datum(c: FusionData, tol: Optional[float] = None, jobs: int = 1) -> ConstraintReport:
    """
    Evaluate the pentagon, the six lens constraints and the three bubble constraints.

    Args:
        c: Fusion data with Euler weights
        tol: Float tolerance overriding the data's field
        jobs: Worker threads

    Returns:
        One record per constraint with its worst residual and label witness

    Raises:
        InvalidFusionData: the data is not well formed
    """
    ensure_well_formed(c)
    field = c.field if tol is None or c.field.exact else ScalarField(c.field.mode, tol)
    checker = replace(c, field=field, Fbar=c.Fbar if c.fbar_given else None)

    tasks = [("pentagon", lambda r: pentagon(checker, r))]
    tasks += [(f"lens_{i}{j}", lambda r, p=(i, j): lens(checker, p, r)) for i, j in LENS_PAIRS]
    tasks += [(name, lambda r, n=name: bubble(checker, n, r)) for name in BUBBLES]

    def run(task):
        name, body = task
        partial = ConstraintReport(field, title=name)
        body(partial)
        return partial

    report = ConstraintReport(field, title="special orbifold datum")
    with ThreadPoolExecutor(max_workers=max(1, jobs)) as pool:
        for partial in pool.map(run, tasks):
            report.merge(partial)
    report.notes["sqrt_branch"] = SQRT_BRANCH
    if not report.passed:
        logger.warning("constraints fail", failures=[r.name for r in report.failures()])
    return report


def trivial_category(field: ScalarField = EXACT) -> FusionData:
    return FusionData(field, ("1",), 0, (0,), frozenset({(0, 0, 0)}), {(0,) * 6: field.one()},
                      (field.one(),), field.one())


def vec_zn(n: int, field: ScalarField = EXACT) -> FusionData:
    """Z/n-graded vector spaces: a (x) b = a + b, every admissible F = 1, phi = n."""
    if isinstance(n, bool) or not isinstance(n, int) or n < 1:
        raise InputError(f"vec_zn needs a positive order, got {n!r}")
    fusion = frozenset((a, b, (a + b) % n) for a in range(n) for b in range(n))
    F = {}
    for a, b, c in itertools.product(range(n), repeat=3):
        e, f, d = (a + b) % n, (b + c) % n, (a + b + c) % n
        F[a, b, c, d, e, f] = field.one()
    dual = tuple((-a) % n for a in range(n))
    return FusionData(field, tuple(str(a) for a in range(n)), 0, dual, fusion, F,
                      tuple(field.one() for _ in range(n)), field.convert(n))


def fibonacci(field: Optional[ScalarField] = None) -> FusionData:
    """
    Fibonacci data: tau (x) tau = 1 + tau, d_tau the golden ratio, phi = 1 + d_tau ** 2.

    The only nontrivial F-block is F^{tau tau tau}_tau = [[1/g, 1/sqrt(g)], [1/sqrt(g), -1/g]].
    """
    field = field or float_field()
    if field.exact:
        raise InputError("fibonacci data is irrational; use float mode")
    g = (1 + 5 ** 0.5) / 2
    one, tau = 0, 1
    fusion = frozenset({(0, 0, 0), (0, 1, 1), (1, 0, 1), (1, 1, 0), (1, 1, 1)})
    draft = FusionData(field, ("1", "tau"), one, (0, 1), fusion, {}, (1, g), 1 + g * g, Fbar={})
    block = {(one, one): 1 / g, (one, tau): g ** -0.5, (tau, one): g ** -0.5, (tau, tau): -1 / g}
    F = {}
    for key in draft.admissible_tets:
        a, b, c, d, e, f = key
        if (a, b, c, d) == (tau,) * 4:
            F[key] = field.convert(block[e, f])
        else:
            F[key] = field.one()
    return FusionData(field, ("1", "tau"), one, (0, 1), fusion, F,
                      (field.one(), field.convert(g)), field.convert(1 + g * g))


_CATEGORIES = {"trivial", "vec_zn", "fibonacci"}


def builtin_category(name: str, params: Any = None, field: Optional[ScalarField] = None) -> FusionData:
    """
    Built-in fusion data with canonical Euler weights (psi_a ** 2 = d_a, phi = sum_a d_a ** 2).

    Args:
        name: trivial, vec_zn or fibonacci; "vec_z3" is read as vec_zn with n = 3
        params: Order of the group for vec_zn (int or {"n": int})
        field: Scalar field; exact by default, float for fibonacci
    """
    if name.startswith("vec_z") and name[5:].isdigit():
        name, params = "vec_zn", int(name[5:])
    if name not in _CATEGORIES:
        raise UnknownCategory(f"unknown category {name!r}; known: {sorted(_CATEGORIES)}")
    if name == "trivial":
        return trivial_category(field or EXACT)
    if name == "vec_zn":
        if isinstance(params, Mapping):
            params = params.get("n")
        if params is None:
            raise InputError("vec_zn needs an order n")
        return vec_zn(params, field or EXACT)
    return fibonacci(field)


if __name__ == "__main__":
    for category in (vec_zn(2), fibonacci()):
        print(check_special_orbifold_datum(category).render_text())
