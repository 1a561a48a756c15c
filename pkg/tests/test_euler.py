import itertools
from fractions import Fraction

import pytest

from core import ioutil
from core.errors import InputError
from core.math import float_field
from modules.topology import builtin, euler, mesh
from modules.topology.euler import EulerWeights, StratificationError


def _cells(triangles):
    cells = set()
    for t in triangles:
        for r in (1, 2, 3):
            cells.update(_sub(t, r))
    return cells


def _sub(t, r):
    return [tuple(sorted(c)) for c in itertools.combinations(t, r)]


def _ball():
    tet = mesh.build_triangulation(3, {0: 1, 1: 2, 2: 3, 3: 4}, [(0, 1, 2, 3)])
    return mesh.apply_pachner_move(tet, mesh.enumerate_oriented_moves(tet, "1-4")[2])


def _grow_region(tri, rng):
    size = rng.randint(1, len(tri.simplices) - 1)
    region = {rng.choice(tri.simplices)}
    while len(region) < size:
        frontier = sorted({tri.simplices[i] for s in region for p in range(3)
                           for i in tri.star[s[:p] + s[p + 1:]]} - region, key=tri.height_key)
        region.add(rng.choice(frontier))
    return region


def test_punctured_disk_from_file(repo_data):
    complex_ = euler.stratified_from_json(ioutil.read_json(repo_data("punctured_disk.json")))
    assert [s.label for s in complex_.strata] == ["point", "bulk"]
    assert euler.euler_characteristics(complex_) == ((1, 0), (2, 0))
    assert euler.symmetric_euler(complex_) == 0
    weights = EulerWeights.from_json(ioutil.read_json(repo_data("weights.json")))
    assert weights.psi == {0: 5, 1: 1, 2: 3}
    assert euler.z_euler_evaluate(complex_, weights) == 1


def test_to_json_round_trip(repo_data):
    complex_ = euler.stratified_from_json(ioutil.read_json(repo_data("punctured_disk.json")))
    again = euler.stratified_from_json(complex_.to_json())
    assert [(s.dim, s.label, s.cells) for s in again.strata] == [(s.dim, s.label, s.cells) for s in complex_.strata]


def test_point_removal_in_a_disk():
    disk = builtin.cone_disk(4)
    assert euler.symmetric_euler(disk) == 2
    punctured = euler.puncture(disk, 4)
    assert euler.symmetric_euler(punctured) == 2 + euler.point_removal_defect(2) == 0


def test_point_removal_in_a_ball():
    ball = _ball()
    interior = next(v for v in ball.heights if ball.is_interior((v,)))
    assert euler.symmetric_euler(ball) == 0
    punctured = euler.puncture(ball, interior)
    assert euler.symmetric_euler(punctured) == euler.point_removal_defect(3) == 2


@pytest.mark.parametrize('n, defect', [(1, 2), (2, -2), (3, 2), (4, -2)])
def test_point_removal_defect(n, defect):
    assert euler.point_removal_defect(n) == defect


@pytest.mark.parametrize('make, expected', [
    (builtin.sphere2, 4), (builtin.torus2, 0), (lambda: builtin.surface_genus(2), -4), (builtin.pants, -2),
])
def test_symmetric_euler_of_surfaces(make, expected):
    assert euler.symmetric_euler(make()) == expected


def test_line_defect_across_a_disk():
    disk = builtin.cone_disk(4)
    line = [(0,), (2,), (4,), (0, 4), (2, 4)]
    side_a = _cells([(0, 1, 4), (1, 2, 4)]) - set(line)
    side_b = _cells([(2, 3, 4), (0, 3, 4)]) - set(line)
    complex_ = euler.stratify(disk, [(1, "wall", line), (2, "left", side_a), (2, "right", side_b)])
    assert euler.euler_characteristics(complex_) == ((1, 1, 1), (0, 1, 1))
    assert euler.symmetric_euler(complex_) == euler.symmetric_euler(disk)
    assert euler.z_euler_evaluate(complex_, EulerWeights({1: 5, 2: 3})) == 9


def test_cylinder_is_the_identity():
    assert euler.z_euler_evaluate(builtin.annulus(3), EulerWeights({2: 7})) == 1


def test_closed_surfaces():
    weights = EulerWeights({2: Fraction(1, 2)})
    assert euler.z_euler_evaluate(builtin.sphere2(), weights) == Fraction(1, 16)
    assert euler.z_euler_evaluate(builtin.torus2(), weights) == 1
    assert euler.z_euler_evaluate(builtin.surface_genus(2), weights) == 16


def test_additivity_under_random_splits(rng):
    surface = builtin.surface_genus(2)
    total = euler.symmetric_euler(surface)
    weights = EulerWeights({2: 3})
    value = euler.z_euler_evaluate(surface, weights)
    splits = 0
    for _ in range(100):
        region = _grow_region(surface, rng)
        try:
            inside, outside = mesh.split_triangulation(surface, region)
        except mesh.NonManifold:
            continue
        splits += 1
        assert euler.symmetric_euler(inside) + euler.symmetric_euler(outside) == total
        assert euler.z_euler_evaluate(inside, weights) * euler.z_euler_evaluate(outside, weights) == value
    assert splits >= 10


def test_float_field_weights():
    field = float_field()
    assert abs(euler.z_euler_evaluate(builtin.sphere2(), EulerWeights({2: 2.0}), field) - 16) < 1e-12


def _disk_cells():
    return _cells(builtin.cone_disk(4).simplices)


@pytest.mark.parametrize('strata, match', [
    ([(2, "bulk", [(0, 2)])], 'not a face'),
    ([(0, "point", [(4,)]), (2, "bulk", _disk_cells())], 'lies in two strata'),
    ([(1, "bulk", _disk_cells())], 'declared dim 1'),
    ([(3, "bulk", _disk_cells())], 'outside 0..2'),
    ([(2, "bulk", _disk_cells() - {(1,)})], 'belong to no stratum'),
    ([(1, "wall", [(0,), (2,), (4,), (0, 4), (2, 4)]),
      (2, "bulk", _disk_cells() - {(0,), (2,), (4,), (0, 4), (2, 4)})], 'not connected'),
    ([(2, "left", _cells([(0, 1, 4), (1, 2, 4)])),
      (2, "right", _disk_cells() - _cells([(0, 1, 4), (1, 2, 4)]))], 'not lower-dimensional'),
])
def test_stratify_rejects(strata, match):
    with pytest.raises(StratificationError, match=match):
        euler.stratify(builtin.cone_disk(4), strata)


def test_puncture_needs_an_interior_vertex():
    with pytest.raises(StratificationError, match='not an interior vertex'):
        euler.puncture(builtin.cone_disk(4), 0)


def test_weights_validation():
    with pytest.raises(euler.NonInvertibleWeight, match='psi_2 is zero'):
        EulerWeights({2: 0})
    with pytest.raises(InputError, match='needs a psi object'):
        EulerWeights.from_json({"psi": 3})
    with pytest.raises(InputError, match='stratum dimensions'):
        EulerWeights.from_json({"psi": {"top": 2}})


def test_boundary_point_counts_once():
    disk = builtin.cone_disk(4)
    rim = [f for f in disk.star if f != (0,)]
    complex_ = euler.stratify(disk, [(0, "point", [(0,)]), (2, "bulk", rim)])
    assert euler.euler_characteristics(complex_) == ((1, 1), (1, 1))
    assert sum(euler.euler_characteristics(complex_)[1]) == euler.symmetric_euler(disk)
