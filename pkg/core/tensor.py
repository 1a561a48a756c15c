"""
Sparse labelled tensors and their contraction by variable elimination.

A Factor maps assignments of its variables to nonzero scalars; assignments that are
absent are zero, so inadmissible labellings never enter a join. Contraction eliminates
summed variables one at a time in greedy min-degree order, ties broken by first
appearance, which fixes the floating point summation order.
"""
from collections import defaultdict
from typing import Dict, Hashable, Iterable, List, Sequence, Tuple

from core import log
from core.math import Scalar

logger = log.create_logger(__name__)

Assignment = Tuple[int, ...]


class Factor:
    """
    Sparse tensor over named variables.

    Args:
        variables: Variable names, one per key position
        table: Assignment tuple -> nonzero value
    """
    __slots__ = ("variables", "table")

    def __init__(self, variables: Sequence[Hashable], table: Dict[Assignment, Scalar]):
        self.variables = tuple(variables)
        if len(set(self.variables)) != len(self.variables):
            raise ValueError(f"repeated variable in factor {self.variables}")
        self.table = table

    def __len__(self):
        return len(self.table)

    def __repr__(self):
        return f"Factor({self.variables}, entries={len(self.table)})"

    def value(self, assignment: Dict[Hashable, int], default=0):
        return self.table.get(tuple(assignment[v] for v in self.variables), default)

    def transpose(self, variables: Sequence[Hashable]) -> "Factor":
        """Reorder positions to the given variable order."""
        variables = tuple(variables)
        if len(variables) != len(self.variables) or set(variables) != set(self.variables):
            raise ValueError(f"cannot transpose {self.variables} to {variables}")
        positions = [self.variables.index(v) for v in variables]
        return Factor(variables, {tuple(key[p] for p in positions): value for key, value in self.table.items()})


def scalar_factor(value: Scalar) -> Factor:
    return Factor((), {(): value})


def multiply(left: Factor, right: Factor) -> Factor:
    """Hash join of two factors on their shared variables."""
    shared = [v for v in left.variables if v in right.variables]
    extra = [v for v in right.variables if v not in left.variables]
    left_shared = [left.variables.index(v) for v in shared]
    right_shared = [right.variables.index(v) for v in shared]
    right_extra = [right.variables.index(v) for v in extra]

    index = defaultdict(list)
    for key, value in right.table.items():
        index[tuple(key[p] for p in right_shared)].append((tuple(key[p] for p in right_extra), value))

    table = {}
    for key, value in left.table.items():
        for tail, other in index.get(tuple(key[p] for p in left_shared), ()):
            table[key + tail] = value * other
    return Factor(left.variables + tuple(extra), table)


def sum_out(factor: Factor, variable: Hashable) -> Factor:
    """Sum a factor over all values of one variable."""
    position = factor.variables.index(variable)
    table = {}
    for key, value in factor.table.items():
        reduced = key[:position] + key[position + 1:]
        table[reduced] = table[reduced] + value if reduced in table else value
    table = {key: value for key, value in table.items() if value != 0}
    return Factor(factor.variables[:position] + factor.variables[position + 1:], table)


def _pick_variable(pool: List[Factor], candidates: List[Hashable]) -> Hashable:
    scopes = defaultdict(set)
    for factor in pool:
        for v in factor.variables:
            scopes[v].update(factor.variables)
    best, best_degree = None, None
    for v in candidates:
        degree = len(scopes[v]) - 1
        if best_degree is None or degree < best_degree:
            best, best_degree = v, degree
    return best


def contract(factors: Iterable[Factor], keep: Sequence[Hashable] = ()) -> Factor:
    """
    Contract a network of factors, summing every variable not listed in keep.

    Args:
        factors: The network
        keep: Free variables, in the order of the result's positions

    Returns:
        A factor over exactly the keep variables
    """
    pool = list(factors)
    keep = tuple(keep)
    keep_set = set(keep)
    seen = {}
    for factor in pool:
        for v in factor.variables:
            seen.setdefault(v, len(seen))
    missing = [v for v in keep if v not in seen]
    if missing:
        raise ValueError(f"free variables {missing} do not occur in the network")

    candidates = [v for v in seen if v not in keep_set]
    largest = 0
    while candidates:
        variable = _pick_variable(pool, candidates)
        candidates.remove(variable)
        touching = sorted((f for f in pool if variable in f.variables), key=len)
        pool = [f for f in pool if variable not in f.variables]
        merged = touching[0]
        for factor in touching[1:]:
            merged = multiply(merged, factor)
        largest = max(largest, len(merged))
        pool.append(sum_out(merged, variable))

    result = scalar_factor(1)
    for factor in sorted(pool, key=len):
        result = multiply(result, factor)
    logger.debug("contracted network", variables=len(seen), free=len(keep), largest_table=largest)
    return result.transpose(keep)


def contract_scalar(factors: Iterable[Factor], zero: Scalar) -> Scalar:
    """Contract a network with no free variables to a number."""
    return contract(factors).table.get((), zero)


"""
from core.tensor import Factor, contract

# matrix product A @ B as a network
a = Factor(("i", "j"), {(0, 0): 1, (0, 1): 2, (1, 1): 3})
b = Factor(("j", "k"), {(0, 0): 1, (1, 0): 1})
ab = contract([a, b], keep=("i", "k"))   # {(0, 0): 3, (1, 0): 3}
"""
