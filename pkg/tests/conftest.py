import itertools
import os
import random
from fractions import Fraction

import numpy as np
import pytest

from core.linalg import gf2_rank
from modules.orbifold2d import frob
from modules.orbifold3d import fusioncat

ROOT = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))


@pytest.fixture
def np_random():
    return np.random.default_rng(20240611)


@pytest.fixture
def rng():
    return random.Random(97)


@pytest.fixture
def repo_data():
    return lambda name: os.path.join(ROOT, "data", name)


@pytest.fixture
def test_data():
    return lambda name: os.path.join(ROOT, "tests", "data", name)


@pytest.fixture(scope="session")
def z2():
    return frob.group_algebra(frob.cyclic_group_table(2))


@pytest.fixture(scope="session")
def z3():
    return frob.group_algebra(frob.cyclic_group_table(3))


@pytest.fixture(scope="session")
def s3():
    table, names = frob.symmetric_group_table(3)
    return frob.group_algebra(table, names=names)


@pytest.fixture(scope="session")
def vec_z2():
    return fusioncat.vec_zn(2)


@pytest.fixture(scope="session")
def vec_z3():
    return fusioncat.vec_zn(3)


@pytest.fixture(scope="session")
def fibonacci():
    return fusioncat.fibonacci()


def count_surface_homs(table, genus: int) -> int:
    """|Hom(pi_1(genus g surface), G)| by enumerating all 2g-tuples."""
    n = len(table)
    identity = next(e for e in range(n) if all(table[e][g] == g for g in range(n)))
    inverse = [next(h for h in range(n) if table[g][h] == identity) for g in range(n)]
    count = 0
    for images in itertools.product(range(n), repeat=2 * genus):
        word = identity
        for a, b in zip(images[::2], images[1::2]):
            for g in (a, b, inverse[a], inverse[b]):
                word = table[word][g]
        count += word == identity
    return count


def conjugacy_classes(table) -> list:
    """Conjugacy classes of a Cayley table, each a frozenset of element indices."""
    n = len(table)
    identity = next(e for e in range(n) if all(table[e][g] == g for g in range(n)))
    inverse = [next(h for h in range(n) if table[g][h] == identity) for g in range(n)]
    classes = {frozenset(table[table[h][g]][inverse[h]] for h in range(n)) for g in range(n)}
    return sorted(classes, key=min)


def h1_z2_order(tri) -> int:
    """|H^1(M; Z/2)| from the simplicial coboundaries of a connected triangulation."""
    vertices = [v[0] for v in tri.faces[0]]
    edges = list(tri.faces[1])
    triangles = list(tri.faces[2])
    edge_bit = {e: 1 << i for i, e in enumerate(edges)}
    # coboundary of a vertex: the edges containing it
    d0 = [sum(edge_bit[e] for e in edges if v in e) for v in vertices]
    # d1 as rows over edges: a triangle row lists its three edges
    d1 = [sum(edge_bit[tri.sort(pair)] for pair in itertools.combinations(t, 2)) for t in triangles]
    cocycles = len(edges) - gf2_rank(d1)
    coboundaries = gf2_rank(d0)
    return 2 ** (cocycles - coboundaries)


def z2_oracle_3d(tri) -> Fraction:
    return Fraction(h1_z2_order(tri), 2)
