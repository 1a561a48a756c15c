from fractions import Fraction

import pytest

from conftest import conjugacy_classes, count_surface_homs
from core.errors import InputError
from core.math import float_field
from modules.orbifold2d import frob, tqft2d
from modules.orbifold2d.frob import InvalidDatum
from modules.topology import builtin, mesh


def _random_moves(tri, rng, count):
    for _ in range(count):
        kind = rng.choice(tqft2d.MOVE_KINDS)
        sites = mesh.enumerate_oriented_moves(tri, kind)
        if sites:
            tri = mesh.apply_pachner_move(tri, rng.choice(sites))
    return tri


def _non_associative():
    data = {
        "dim": 2,
        "mu": [[[0, 1], [0, 0]], [[0, 0], [1, 0]]],
        "eta": [1, 0],
        "eps": [1, 1],
    }
    return frob.from_json(data)


@pytest.mark.parametrize('order', [2, 3])
@pytest.mark.parametrize('g', [0, 1, 2])
def test_cyclic_groups_count_homomorphisms(order, g):
    table = frob.cyclic_group_table(order)
    value = tqft2d.evaluate_closed_2d(builtin.surface_genus(g), frob.group_algebra(table))
    assert value == Fraction(count_surface_homs(table, g), order)


@pytest.mark.parametrize('g', [1, 2])
def test_symmetric_group_counts_homomorphisms(s3, g):
    table, _ = frob.symmetric_group_table(3)
    assert tqft2d.evaluate_closed_2d(builtin.surface_genus(g), s3) == Fraction(count_surface_homs(table, g), 6)


@pytest.mark.parametrize('table', [frob.cyclic_group_table(4), frob.symmetric_group_table(3)[0]])
def test_torus_counts_conjugacy_classes(table):
    algebra = frob.group_algebra(table)
    assert tqft2d.evaluate_closed_2d(builtin.torus2(), algebra) == len(conjugacy_classes(table))


def test_float_mode_agrees():
    algebra = frob.group_algebra(frob.cyclic_group_table(3), float_field())
    value = tqft2d.evaluate_closed_2d(builtin.torus2(), algebra)
    assert abs(value - 3) < 1e-9


def test_direct_sum_adds(z2):
    both = z2.direct_sum(z2)
    assert tqft2d.evaluate_closed_2d(builtin.torus2(), both) == 4


def test_value_survives_random_moves(s3, rng):
    torus = builtin.torus2()
    expected = tqft2d.evaluate_closed_2d(torus, s3)
    moved = _random_moves(torus, rng, 12)
    assert moved.f_vector != torus.f_vector
    assert tqft2d.evaluate_closed_2d(moved, s3) == expected


def test_orientation_reversal(s3):
    torus = builtin.torus2()
    assert tqft2d.evaluate_closed_2d(torus.mirror(), s3) == tqft2d.evaluate_closed_2d(torus, s3)


def test_closed_evaluation_rejects(z2):
    with pytest.raises(tqft2d.NotClosed):
        tqft2d.evaluate_closed_2d(builtin.cone_disk(4), z2)
    with pytest.raises(tqft2d.NotClosed):
        tqft2d.evaluate_closed_2d(builtin.sphere3(), z2)
    with pytest.raises(InvalidDatum):
        tqft2d.evaluate_closed_2d(builtin.sphere2(), z2.rescale_counit(2))


@pytest.mark.parametrize('algebra_name', ["z2", "z3", "s3"])
def test_pachner_templates_hold(algebra_name, request):
    report = tqft2d.check_pachner_2d(request.getfixturevalue(algebra_name))
    assert report.passed, report.render_text()
    assert report.notes["variants"] == 28
    assert report.max_residual == 0


def test_pachner_for_a_matrix_algebra():
    assert tqft2d.check_pachner_2d(frob.matrix_algebra(2)).passed


def test_pachner_on_a_base_surface(z2):
    report = tqft2d.check_pachner_2d(z2, base=builtin.sphere2(), jobs=2)
    assert report.passed
    assert all(name.split()[0] in tqft2d.MOVE_KINDS for name in report.records)


def test_rescaled_counit_breaks_expanding_moves(z3):
    report = tqft2d.check_pachner_2d(z3.rescale_counit(Fraction(1, 3)))
    failed = {r.name.split()[0] for r in report.failures()}
    assert failed == {"1-3", "3-1"}
    assert all(report[name].passed for name in report.records if name.startswith("2-2"))
    assert report.failures()[0].witness


def test_non_cyclic_tensor_is_rejected():
    with pytest.raises(InvalidDatum, match='not cyclic'):
        tqft2d.check_pachner_2d(_non_associative())


def test_boundary_circle_reading():
    annulus = builtin.annulus(3)
    circle = tqft2d.boundary_circle(annulus, "in")
    assert circle.vertices == (0, 1, 2)
    assert circle.edges == ((0, 1), (1, 2), (0, 2))
    assert len(set(circle.orientations)) == 1
    assert len(circle) == 3
    assert tqft2d.boundary_circle(annulus, "out").direction == -circle.direction
    with pytest.raises(tqft2d.BadBoundaryNames, match='no boundary component'):
        tqft2d.boundary_circle(annulus, "side")


def test_bordism_is_invariant_under_interior_moves(z2, rng):
    annulus = builtin.annulus(4)
    operator = tqft2d.evaluate_bordism_2d(annulus, z2)
    assert operator.shape == (16, 16)
    moved = annulus
    for _ in range(6):
        site = rng.choice(mesh.enumerate_oriented_moves(moved, "1-3"))
        moved = mesh.apply_pachner_move(moved, site)
    assert tqft2d.evaluate_bordism_2d(moved, z2).residual(operator) == 0


def test_pants_bordism_shape(z2):
    operator = tqft2d.evaluate_bordism_2d(builtin.pants(), z2)
    assert operator.shape == (8, 64)
    swapped = tqft2d.evaluate_bordism_2d(builtin.pants(), z2, inputs=["out"], outputs=["in0", "in1"])
    assert swapped.shape == (64, 8)


def test_bordism_names_must_partition(z2):
    with pytest.raises(tqft2d.BadBoundaryNames, match='partition'):
        tqft2d.evaluate_bordism_2d(builtin.annulus(3), z2, inputs=["in"], outputs=[])
    with pytest.raises(tqft2d.BadBoundaryNames, match='partition'):
        tqft2d.evaluate_bordism_2d(builtin.annulus(3), z2, inputs=["in", "out"], outputs=["out"])


@pytest.mark.parametrize('algebra_name, k, dim', [
    ("z2", 1, 2), ("z2", 2, 2), ("z2", 3, 2), ("z2", 4, 2),
    ("z3", 1, 3), ("z3", 2, 3), ("z3", 3, 3),
    ("s3", 1, 3), ("s3", 2, 3), ("s3", 3, 3),
])
def test_state_space_dimension(algebra_name, k, dim, request):
    space = tqft2d.orbifold_state_space(k, request.getfixturevalue(algebra_name))
    assert space.dim == dim
    assert space.ambient_dim == request.getfixturevalue(algebra_name).dim ** k
    assert space.idempotency_residual == 0


@pytest.mark.parametrize('k', [1, 2, 3, 4])
def test_ground_field_state_space(k):
    assert tqft2d.orbifold_state_space(k, frob.ground_field()).dim == 1


def test_state_space_contains_class_sums(s3):
    space = tqft2d.orbifold_state_space(1, s3)
    index = {name: i for i, name in enumerate(s3.labels)}
    for cls in (["012"], ["021", "102", "210"], ["120", "201"]):
        assert space.basis.contains({index[name]: Fraction(1) for name in cls})
    assert not space.basis.contains({index["021"]: Fraction(1)})


@pytest.mark.parametrize('algebra_name, dim', [("z2", 2), ("z3", 3), ("s3", 3)])
def test_point_insertion_algebra(algebra_name, dim, request):
    algebra = tqft2d.point_insertion_algebra(request.getfixturevalue(algebra_name))
    assert algebra.dim == dim
    report = algebra.check()
    assert report.passed, report.render_text()
    assert set(report.records) == {"commutative", "associative", "unit"}


def test_cell_surfaces():
    with pytest.raises(tqft2d.BadBoundaryNames):
        tqft2d.CellSurface((("a", "b", "c"),), ("a",), ("b",), 1)
    with pytest.raises(tqft2d.BadCircle):
        tqft2d.cylinder_surface(0)
    assert tqft2d.cylinder_surface(2).inputs == (("a", 0), ("a", 1))


def test_cylinder_operators_are_idempotent(s3):
    for reverse in (False, True):
        p = tqft2d.cylinder_operator(1, s3, reverse)
        assert (p @ p).residual(p) == 0


GROUP_TABLES = [frob.cyclic_group_table(4), frob.cyclic_group_table(5), frob.symmetric_group_table(3)[0]]


@pytest.mark.parametrize('table', GROUP_TABLES)
@pytest.mark.parametrize('k', [1, 2])
def test_state_space_counts_conjugacy_classes(table, k):
    space = tqft2d.orbifold_state_space(k, frob.group_algebra(table))
    assert space.dim == len(conjugacy_classes(table))
    assert space.idempotency_residual == 0


def test_float_state_space_rank():
    algebra = frob.group_algebra(frob.symmetric_group_table(3)[0], float_field())
    assert tqft2d.orbifold_state_space(2, algebra).dim == 3


def _group_product(table, x, y):
    result = {}
    for g, xg in x.items():
        for h, yh in y.items():
            result[table[g][h]] = result.get(table[g][h], 0) + xg * yh
    return {k: v for k, v in result.items() if v != 0}


def _as_vector(algebra, coordinates):
    result = {}
    for c, vector in zip(coordinates, algebra.basis):
        for i, value in vector.items():
            result[i] = result.get(i, 0) + c * value
    return {k: v for k, v in result.items() if v != 0}


@pytest.mark.parametrize('table', GROUP_TABLES)
def test_point_insertions_multiply_like_the_center(table):
    algebra = tqft2d.point_insertion_algebra(frob.group_algebra(table))
    order = len(table)
    # the disk unit is e / |G|, so the pants product is |G| times the group product
    assert _as_vector(algebra, algebra.unit) == {0: Fraction(1, order)}
    for i, x in enumerate(algebra.basis):
        for j, y in enumerate(algebra.basis):
            product = _as_vector(algebra, algebra.structure[i][j])
            expected = {g: order * v for g, v in _group_product(table, x, y).items()}
            assert product == expected


def test_point_insertions_span_the_class_sums(s3):
    algebra = tqft2d.point_insertion_algebra(s3)
    table, _ = frob.symmetric_group_table(3)
    sums = [{g: Fraction(1) for g in cls} for cls in conjugacy_classes(table)]
    space = tqft2d.orbifold_state_space(1, s3)
    assert all(space.basis.contains(v) for v in sums)
    assert len(algebra.basis) == len(sums)


def _glue(lower, upper, lower_name="out", upper_name="in"):
    return mesh.glue_along_boundary(lower, upper.shifted(100), {lower_name: upper_name})


@pytest.mark.parametrize('algebra_name', ["z2", "s3"])
def test_gluing_composes_operators(algebra_name, request):
    algebra = request.getfixturevalue(algebra_name)
    first, second = builtin.annulus(3), builtin.annulus(3)
    glued = _glue(first, second)
    assert sorted(glued.boundary_marks) == ["in", "out"]
    product = tqft2d.evaluate_bordism_2d(second, algebra) @ tqft2d.evaluate_bordism_2d(first, algebra)
    assert tqft2d.evaluate_bordism_2d(glued, algebra).residual(product) == 0


def test_annulus_absorbs_cylinders_on_both_ends(s3):
    annulus = builtin.annulus(3)
    operator = tqft2d.evaluate_bordism_2d(annulus, s3)
    p_in = tqft2d.circle_idempotent(tqft2d.boundary_circle(annulus, "in"), s3, "in")
    p_out = tqft2d.circle_idempotent(tqft2d.boundary_circle(annulus, "out"), s3, "out")
    assert (operator @ p_in).residual(operator) == 0
    assert (p_out @ operator).residual(operator) == 0


@pytest.mark.parametrize('algebra_name', ["z3", "s3"])
def test_disk_vector_is_invariant(algebra_name, request):
    algebra = request.getfixturevalue(algebra_name)
    # mirrored so the rim is oriented like the outgoing end of an annulus
    disk = builtin.cone_disk(3).mirror()
    vector = tqft2d.evaluate_bordism_2d(disk, algebra)
    assert vector.shape == (algebra.dim ** 3, 1)
    glued = _glue(disk, builtin.annulus(3))
    assert tqft2d.evaluate_bordism_2d(glued, algebra).residual(vector) == 0
    p = tqft2d.circle_idempotent(tqft2d.boundary_circle(disk, "out"), algebra, "out")
    assert (p @ vector).residual(vector) == 0


def test_pants_absorbs_the_idempotents(z2):
    pants = builtin.pants()
    operator = tqft2d.evaluate_bordism_2d(pants, z2)
    p_out = tqft2d.circle_idempotent(tqft2d.boundary_circle(pants, "out"), z2, "out")
    assert (p_out @ operator).residual(operator) == 0
    assert tqft2d.project_bordism(pants, z2).residual(operator) == 0
    swapped = tqft2d.project_bordism(pants, z2, inputs=["out"], outputs=["in0", "in1"])
    assert swapped.residual(tqft2d.evaluate_bordism_2d(pants, z2, inputs=["out"], outputs=["in0", "in1"])) == 0


def test_circle_idempotent_roles(z2):
    circle = tqft2d.boundary_circle(builtin.annulus(3), "in")
    with pytest.raises(InputError, match='role'):
        tqft2d.circle_idempotent(circle, z2, "side")
