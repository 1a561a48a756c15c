"""
Finite-dimensional algebras given by structure tensors, and the axioms of a
Delta-separable symmetric Frobenius algebra.

Index conventions, for basis vectors e_0 .. e_{n-1}:

    mu[a, b, c]    coefficient of e_c in e_a * e_b
    eta[a]         coefficient of e_a in the unit
    eps[a]         counit on e_a
    delta[c, a, b] coefficient of e_a (x) e_b in Delta(e_c)

The derived comultiplication is Delta(x) = sum_ij g^ij (x e_i) (x) e_j with g the inverse
of the pairing g_ab = eps(e_a e_b).
"""
import itertools
from dataclasses import dataclass, field as dc_field, replace
from typing import Any, Dict, List, Mapping, Optional, Sequence, Tuple

import numpy as np

from core import log
from core.errors import CheckFailure, InputError
from core.linalg import SingularMatrix, invert
from core.math import EXACT, Scalar, ScalarField, field_for
from core.report import CheckReport

logger = log.create_logger(__name__)

AXIOMS = ("associativity", "unit", "coassociativity", "counit", "frobenius", "symmetric", "delta_separable")


class DimensionMismatch(InputError):
    pass


class DegeneratePairing(InputError):
    pass


class NotAGroup(InputError):
    pass


class BadCharacteristic(InputError):
    pass


class InvalidDatum(CheckFailure):
    """The algebra fails an axiom; the report is attached."""
    pass


def _zeros(shape, field: ScalarField) -> np.ndarray:
    if field.exact:
        return np.full(shape, field.zero(), dtype=object)
    return np.zeros(shape, dtype=complex)


def _identity(n: int, field: ScalarField) -> np.ndarray:
    result = _zeros((n, n), field)
    for i in range(n):
        result[i, i] = field.one()
    return result


def _as_array(data: Any, shape: Tuple[int, ...], field: ScalarField, name: str) -> np.ndarray:
    """Convert nested lists of scalar tokens into an array of the field."""
    result = _zeros(shape, field)

    def fill(node, prefix):
        depth = len(prefix)
        if depth == len(shape):
            result[prefix] = field.parse(node)
            return
        if not isinstance(node, (list, tuple)) or len(node) != shape[depth]:
            raise DimensionMismatch(f"{name} does not have shape {shape}")
        for i, child in enumerate(node):
            fill(child, prefix + (i,))

    fill(data, ())
    return result


def inverse_matrix(matrix: np.ndarray, field: ScalarField) -> np.ndarray:
    inverse = invert(matrix.tolist(), field)
    result = _zeros(matrix.shape, field)
    for i, row in enumerate(inverse):
        for j, value in enumerate(row):
            result[i, j] = field.convert(value)
    return result


@dataclass(frozen=True, eq=False)
class FrobeniusData:
    """
    An algebra with counit and comultiplication over a scalar field.

    Args:
        field: Scalar arithmetic of the tensors
        mu: Multiplication, shape (n, n, n)
        eta: Unit, shape (n,)
        eps: Counit, shape (n,)
        delta: Comultiplication, shape (n, n, n); derived from mu and eps when None
        labels: Basis names
        euler_weight: Weight raised to the Euler characteristic of evaluated surfaces
    """
    field: ScalarField
    mu: np.ndarray
    eta: np.ndarray
    eps: np.ndarray
    delta: Optional[np.ndarray] = None
    labels: Tuple[str, ...] = ()
    euler_weight: Scalar = 1
    inverse_pairing: np.ndarray = dc_field(init=False, repr=False)
    delta_given: bool = dc_field(init=False, repr=False)

    def __post_init__(self):
        n = len(self.eta)
        if self.mu.shape != (n, n, n) or self.eps.shape != (n,):
            raise DimensionMismatch(f"mu {self.mu.shape}, eta ({n},), eps {self.eps.shape} do not fit together")
        if self.delta is not None and self.delta.shape != (n, n, n):
            raise DimensionMismatch(f"delta has shape {self.delta.shape}, expected {(n, n, n)}")
        if not self.labels:
            object.__setattr__(self, "labels", tuple(f"e{i}" for i in range(n)))
        elif len(self.labels) != n:
            raise DimensionMismatch(f"{len(self.labels)} labels for dimension {n}")
        object.__setattr__(self, "euler_weight", self.field.convert(self.euler_weight))
        if self.euler_weight == 0:
            raise InputError("euler_weight must be invertible")
        g = self.pairing
        try:
            inverse = inverse_matrix(g, self.field)
        except SingularMatrix:
            raise DegeneratePairing("the pairing eps(e_a e_b) is degenerate")
        object.__setattr__(self, "inverse_pairing", inverse)
        object.__setattr__(self, "delta_given", self.delta is not None)
        if self.delta is None:
            object.__setattr__(self, "delta", self.derived_delta())

    @property
    def dim(self) -> int:
        return len(self.eta)

    @property
    def pairing(self) -> np.ndarray:
        return np.tensordot(self.mu, self.eps, axes=([2], [0]))

    def derived_delta(self) -> np.ndarray:
        # delta[c, a, b] = sum_i g^{ib} mu[c, i, a]
        return np.tensordot(self.mu, self.inverse_pairing, axes=([1], [0]))

    def multiply(self, x: np.ndarray, y: np.ndarray) -> np.ndarray:
        return np.tensordot(y, np.tensordot(x, self.mu, axes=([0], [0])), axes=([0], [0]))

    def is_commutative(self) -> bool:
        swapped = self.mu.transpose(1, 0, 2)
        return all(self.field.is_zero(a - b) for a, b in zip(self.mu.flat, swapped.flat))

    def opposite(self) -> "FrobeniusData":
        """The algebra with reversed multiplication and comultiplication."""
        return replace(self, mu=self.mu.transpose(1, 0, 2).copy(),
                       delta=self.delta.transpose(0, 2, 1).copy() if self.delta_given else None)

    def direct_sum(self, other: "FrobeniusData") -> "FrobeniusData":
        """Block sum; both summands must share the field and the euler weight."""
        if other.field != self.field or other.euler_weight != self.euler_weight:
            raise InputError("direct sum needs the same field and euler weight")
        n, m = self.dim, other.dim
        size = n + m
        mu = _zeros((size,) * 3, self.field)
        delta = _zeros((size,) * 3, self.field)
        mu[:n, :n, :n] = self.mu
        mu[n:, n:, n:] = other.mu
        delta[:n, :n, :n] = self.delta
        delta[n:, n:, n:] = other.delta
        eta = np.concatenate([self.eta, other.eta])
        eps = np.concatenate([self.eps, other.eps])
        labels = tuple(f"{l}" for l in self.labels) + tuple(f"{l}'" for l in other.labels)
        return FrobeniusData(self.field, mu, eta, eps, delta if self.delta_given or other.delta_given else None,
                             labels, self.euler_weight)

    def rescale_counit(self, factor) -> "FrobeniusData":
        """Multiply the counit by an invertible factor; Delta is re-derived, so mu Delta = factor^-1 id."""
        factor = self.field.convert(factor)
        if factor == 0:
            raise InputError("counit rescaling factor must be invertible")
        return FrobeniusData(self.field, self.mu, self.eta, self.eps * factor, None, self.labels, self.euler_weight)

    def to_json(self) -> Dict[str, Any]:
        encode = lambda array: np.vectorize(self.field.to_json, otypes=[object])(array).tolist()
        data = {
            "dim": self.dim,
            "labels": list(self.labels),
            "mu": encode(self.mu),
            "eta": encode(self.eta),
            "eps": encode(self.eps),
            "euler_weight": self.field.to_json(self.euler_weight),
        }
        if self.delta_given:
            data["delta"] = encode(self.delta)
        return data

    def __repr__(self):
        return f"FrobeniusData(dim={self.dim}, mode={self.field.mode})"


def from_json(data: Mapping[str, Any], field: ScalarField = EXACT) -> FrobeniusData:
    """
    Read an algebra from its JSON object.

    Args:
        data: Object with dim, mu, eta, eps and optional delta, labels, euler_weight
        field: Scalar field the tokens are parsed into

    Returns:
        The algebra, with Delta derived when absent
    """
    if not isinstance(data, Mapping) or "dim" not in data:
        raise InputError("algebra JSON needs dim, mu, eta and eps")
    n = data["dim"]
    if isinstance(n, bool) or not isinstance(n, int) or n < 1:
        raise DimensionMismatch(f"dim must be a positive int, got {n!r}")
    try:
        mu = _as_array(data["mu"], (n, n, n), field, "mu")
        eta = _as_array(data["eta"], (n,), field, "eta")
        eps = _as_array(data["eps"], (n,), field, "eps")
    except KeyError as e:
        raise InputError(f"algebra JSON is missing {e}")
    delta = _as_array(data["delta"], (n, n, n), field, "delta") if data.get("delta") is not None else None
    weight = field.parse(data["euler_weight"]) if "euler_weight" in data else field.one()
    return FrobeniusData(field, mu, eta, eps, delta, tuple(data.get("labels", ())), weight)


def _compare(report: CheckReport, name: str, lhs: np.ndarray, rhs: np.ndarray, axes: Sequence[str],
             labels: Sequence[str]):
    field = report.field
    for index in np.ndindex(*lhs.shape):
        residual = field.residual(lhs[index], rhs[index])
        report.observe(name, residual, {axis: labels[i] for axis, i in zip(axes, index)})


def check_frobenius_axioms(a: FrobeniusData, tol: Optional[float] = None) -> CheckReport:
    """
    Evaluate every axiom of a Delta-separable symmetric Frobenius algebra as a tensor identity.

    Args:
        a: The algebra
        tol: Float tolerance overriding the algebra's field; ignored in exact mode

    Returns:
        One record per axiom with its largest residual and the worst index assignment
    """
    field = a.field if tol is None or a.field.exact else ScalarField(a.field.mode, tol)
    report = CheckReport(field, title="frobenius")
    mu, eta, eps, delta, n = a.mu, a.eta, a.eps, a.delta, a.dim
    ident = _identity(n, field)
    labels = a.labels

    left = np.tensordot(mu, mu, axes=([2], [0]))
    right = np.tensordot(mu, mu, axes=([2], [1])).transpose(2, 0, 1, 3)
    _compare(report, "associativity", left, right, "abcd", labels)

    _compare(report, "unit", np.tensordot(eta, mu, axes=([0], [0])), ident, "bc", labels)
    _compare(report, "unit", np.tensordot(eta, mu, axes=([0], [1])), ident, "ac", labels)

    left = np.tensordot(delta, delta, axes=([1], [0])).transpose(0, 2, 3, 1)
    right = np.tensordot(delta, delta, axes=([2], [0]))
    _compare(report, "coassociativity", left, right, "cabd", labels)

    _compare(report, "counit", np.tensordot(eps, delta, axes=([0], [1])), ident, "cb", labels)
    _compare(report, "counit", np.tensordot(eps, delta, axes=([0], [2])), ident, "ca", labels)

    delta_mu = np.tensordot(mu, delta, axes=([2], [0]))
    # (mu (x) id)(id (x) Delta): sum_p mu[a, p, x] delta[b, p, y]
    left = np.tensordot(mu, delta, axes=([1], [1])).transpose(0, 2, 1, 3)
    # (id (x) mu)(Delta (x) id): sum_q delta[a, x, q] mu[q, b, y]
    right = np.tensordot(delta, mu, axes=([2], [0])).transpose(0, 2, 1, 3)
    _compare(report, "frobenius", delta_mu, left, "abxy", labels)
    _compare(report, "frobenius", delta_mu, right, "abxy", labels)

    g = a.pairing
    _compare(report, "symmetric", g, g.T, "ab", labels)

    mu_delta = np.tensordot(delta, mu, axes=([1, 2], [0, 1]))
    _compare(report, "delta_separable", mu_delta, ident, "ce", labels)

    if a.delta_given:
        _compare(report, "delta_matches_pairing", delta, a.derived_delta(), "cab", labels)

    if not report.passed:
        logger.warning("frobenius axioms fail", failures=[r.name for r in report.failures()])
    return report


def ensure_valid(a: FrobeniusData) -> CheckReport:
    """Raise InvalidDatum unless every axiom holds."""
    report = check_frobenius_axioms(a)
    if not report.passed:
        raise InvalidDatum(f"algebra fails {[r.name for r in report.failures()]}", report)
    return report


class GroupTable:
    """
    A finite group as a Cayley table on indices: table[g][h] is the index of g * h.
    """

    def __init__(self, table: Sequence[Sequence[int]], names: Optional[Sequence[str]] = None):
        self.table = [list(row) for row in table]
        self.order = len(self.table)
        if self.order == 0 or any(len(row) != self.order for row in self.table):
            raise NotAGroup("Cayley table must be square and nonempty")
        if any(not isinstance(x, int) or not 0 <= x < self.order for row in self.table for x in row):
            raise NotAGroup("Cayley table entries must be element indices")
        self.names = tuple(names) if names else tuple(f"g{i}" for i in range(self.order))
        self.identity = self._find_identity()
        self.inverses = [self._find_inverse(g) for g in range(self.order)]
        for g, h, k in itertools.product(range(self.order), repeat=3):
            if self.mult(self.mult(g, h), k) != self.mult(g, self.mult(h, k)):
                raise NotAGroup(f"not associative at ({self.names[g]}, {self.names[h]}, {self.names[k]})")

    def mult(self, g: int, h: int) -> int:
        return self.table[g][h]

    def _find_identity(self) -> int:
        for e in range(self.order):
            if all(self.mult(e, g) == g == self.mult(g, e) for g in range(self.order)):
                return e
        raise NotAGroup("no identity element")

    def _find_inverse(self, g: int) -> int:
        for h in range(self.order):
            if self.mult(g, h) == self.identity == self.mult(h, g):
                return h
        raise NotAGroup(f"{self.names[g]} has no inverse")

    def __len__(self):
        return self.order


def cyclic_group_table(n: int) -> List[List[int]]:
    return [[(i + j) % n for j in range(n)] for i in range(n)]


def symmetric_group_table(k: int) -> Tuple[List[List[int]], List[str]]:
    """Cayley table of S_k on permutations in lexicographic order; (p q)(i) = p(q(i))."""
    perms = list(itertools.permutations(range(k)))
    index = {p: i for i, p in enumerate(perms)}
    table = [[index[tuple(p[q[i]] for i in range(k))] for q in perms] for p in perms]
    return table, ["".join(str(x) for x in p) for p in perms]


def group_algebra(group_table, field_mode: Any = "exact", characteristic: int = 0,
                  names: Optional[Sequence[str]] = None) -> FrobeniusData:
    """
    The group algebra k[G] as a Delta-separable symmetric Frobenius algebra.

    The counit is eps(g) = |G| delta_{g,e}, which makes mu Delta = id; the euler weight
    1/|G| normalizes closed surfaces to |Hom(pi_1, G)| / |G|.

    Args:
        group_table: Cayley table, or a GroupTable
        field_mode: "exact", "float" or a ScalarField
        characteristic: Characteristic of the ground field; only 0 is computed with

    Returns:
        The algebra with basis the group elements
    """
    group = group_table if isinstance(group_table, GroupTable) else GroupTable(group_table, names)
    if characteristic:
        if isinstance(characteristic, bool) or not isinstance(characteristic, int) or characteristic < 0:
            raise InputError(f"bad characteristic {characteristic!r}")
        if group.order % characteristic == 0:
            raise BadCharacteristic(f"characteristic {characteristic} divides |G| = {group.order}")
        raise InputError(f"characteristic {characteristic} fields are not supported")
    field = field_mode if isinstance(field_mode, ScalarField) else field_for(field_mode)
    n = group.order
    mu = _zeros((n, n, n), field)
    for g, h in itertools.product(range(n), repeat=2):
        mu[g, h, group.mult(g, h)] = field.one()
    eta = _zeros((n,), field)
    eta[group.identity] = field.one()
    eps = _zeros((n,), field)
    eps[group.identity] = field.convert(n)
    weight = field.inverse(field.convert(n))
    logger.debug("group algebra", order=n, mode=field.mode)
    return FrobeniusData(field, mu, eta, eps, None, group.names, weight)


def ground_field(field: ScalarField = EXACT) -> FrobeniusData:
    """The one-dimensional algebra k."""
    one = np.array([field.one()], dtype=object if field.exact else complex)
    return FrobeniusData(field, one.reshape(1, 1, 1), one.copy(), one.copy(), None, ("1",))


def matrix_algebra(n: int, field: ScalarField = EXACT) -> FrobeniusData:
    """M_n(k) with eps = n * trace; basis e_ij at index i * n + j."""
    if n < 1:
        raise DimensionMismatch("matrix size must be positive")
    size = n * n
    mu = _zeros((size,) * 3, field)
    for i, j, l in itertools.product(range(n), repeat=3):
        mu[i * n + j, j * n + l, i * n + l] = field.one()
    eta = _zeros((size,), field)
    eps = _zeros((size,), field)
    for i in range(n):
        eta[i * n + i] = field.one()
        eps[i * n + i] = field.convert(n)
    labels = tuple(f"e{i}{j}" for i in range(n) for j in range(n))
    return FrobeniusData(field, mu, eta, eps, None, labels)


if __name__ == "__main__":
    table, names = symmetric_group_table(3)
    algebra = group_algebra(table, names=names)
    print(check_frobenius_axioms(algebra).render_text())
    print("commutative:", algebra.is_commutative())
