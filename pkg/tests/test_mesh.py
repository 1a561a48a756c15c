import pytest

from core import ioutil
from modules.topology import builtin, mesh
from modules.topology.mesh import build_triangulation


def _signatures(templates):
    return {(s.signature[0], tuple(s.signature[1]), s.signature[2]) for _, s in templates}


def _manifest(test_data):
    data = ioutil.read_json(test_data("move_templates.json"))
    return {(int(dim), kind): {(kind, tuple(ranks), sign) for ranks, sign in entries}
            for dim, kinds in data.items() for kind, entries in kinds.items()}


def test_heights_order_simplices():
    tri = build_triangulation(2, {0: "3", 1: "1/2", 2: 2}, [(0, 1, 2)])
    assert tri.simplices == ((1, 2, 0),)
    assert tri.vertices == (1, 2, 0)
    assert tri.signs == (1,)
    assert tri.boundary_marks.keys() == {"boundary0"}
    assert tri.euler_characteristic() == 1


@pytest.mark.parametrize('heights, simplices, error, match', [
    ({0: 1, 1: 1, 2: 2}, [(0, 1, 2)], mesh.DuplicateHeight, 'share height'),
    ({0: 1, 1: 2, 2: 3, 3: 4}, [(0, 1, 2)], mesh.DanglingVertex, 'lie in no top simplex'),
    ({0: 1, 1: 2, 2: 3}, [(0, 1)], mesh.MalformedTriangulation, 'is not a 2-simplex'),
    ({0: 1, 1: 2, 2: 3}, [(0, 1, 7)], mesh.MalformedTriangulation, 'is not a 2-simplex|unknown vertices'),
    ({v: v + 1 for v in range(5)}, [(0, 1, 2), (0, 1, 3), (0, 1, 4)], mesh.NonManifold, 'lies in 3'),
    ({v: v + 1 for v in range(5)}, [(i, (i + 1) % 5, (i + 2) % 5) for i in range(5)], mesh.NonOrientable,
     'orientation'),
])
def test_build_rejects(heights, simplices, error, match):
    with pytest.raises(error, match=match):
        build_triangulation(2, heights, simplices)


def test_bowtie_is_not_a_manifold():
    with pytest.raises(mesh.NonManifold, match='link of vertex 0'):
        build_triangulation(2, {v: v + 1 for v in range(5)}, [(0, 1, 2), (0, 3, 4)])


def test_incoherent_signs_are_rejected():
    with pytest.raises(mesh.NonOrientable, match='disagree'):
        build_triangulation(2, {v: v + 1 for v in range(4)}, [(0, 1, 2), (1, 2, 3)], [1, 1])


def test_boundary_marks_must_cover_boundary():
    disk = builtin.cone_disk(4)
    facets = list(disk.boundary_marks["out"])
    with pytest.raises(mesh.MalformedTriangulation, match='do not cover'):
        build_triangulation(2, disk.heights, disk.simplices, disk.signs, {"out": facets[:2]})
    with pytest.raises(mesh.MalformedTriangulation, match='not a boundary facet'):
        build_triangulation(2, disk.heights, disk.simplices, disk.signs, {"out": facets + [(0, 4)]})


def test_induced_orientations_are_coherent():
    sphere = builtin.sphere2()
    for facet in sphere.faces[1]:
        first, second = sphere.star[facet]
        signs = []
        for index in (first, second):
            simplex = sphere.simplices[index]
            position = next(i for i, v in enumerate(simplex) if v not in facet)
            signs.append(sphere.signs[index] * (-1) ** position)
        assert signs[0] == -signs[1]


def test_surface_kind():
    assert mesh.surface_kind(builtin.octahedron_triangles()) == "sphere"
    assert mesh.surface_kind(builtin.cone_disk(5).simplices) == "disk"
    assert mesh.surface_kind(builtin.torus_triangles()) is None
    assert mesh.surface_kind([]) is None


@pytest.mark.parametrize('dim, kind, count', [
    (2, "2-2", 12), (2, "1-3", 8), (2, "3-1", 8),
    (3, "2-3", 20), (3, "1-4", 10), (3, "3-2", 20), (3, "4-1", 10),
])
def test_template_census(dim, kind, count, test_data):
    templates = mesh.oriented_move_templates(dim, kind)
    assert len(templates) == count
    assert _signatures(templates) == _manifest(test_data)[dim, kind]


def test_four_classes_per_triangle_and_sign():
    sphere = builtin.sphere2()
    sites = mesh.enumerate_oriented_moves(sphere, "1-3")
    assert len(sites) == 4 * len(sphere.simplices)
    for simplex in sphere.simplices:
        ranks = sorted(s.signature[1] for s in sites if s.simplices == (simplex,))
        assert ranks == [(0,), (1,), (2,), (3,)]


@pytest.mark.parametrize('dim, kind', [(d, k) for d in (2, 3) for k in mesh.KINDS[d]])
def test_moves_preserve_boundary_orientation(dim, kind):
    for tri, site in mesh.oriented_move_templates(dim, kind):
        after = mesh.apply_pachner_move(tri, site)
        assert set(after.boundary_facets) == set(tri.boundary_facets)
        for facet in tri.boundary_facets:
            assert after.induced_sign(facet) == tri.induced_sign(facet)
        assert dict(after.boundary_marks) == dict(tri.boundary_marks)


def test_expand_and_collapse_round_trip():
    sphere = builtin.sphere2()
    site = mesh.enumerate_oriented_moves(sphere, "1-3")[5]
    grown = mesh.apply_pachner_move(sphere, site)
    assert grown.f_vector == (7, 15, 10)
    new_vertex = max(grown.heights)
    (back_site,) = [s for s in mesh.enumerate_oriented_moves(grown, "3-1")
                    if all(new_vertex in simplex for simplex in s.simplices)]
    back = mesh.apply_pachner_move(grown, back_site)
    assert mesh.is_isomorphic(back, sphere)


def test_three_dimensional_moves():
    sphere = builtin.sphere3()
    assert mesh.enumerate_oriented_moves(sphere, "2-3") == []
    grown = mesh.apply_pachner_move(sphere, mesh.enumerate_oriented_moves(sphere, "1-4")[0])
    assert grown.f_vector == (6, 14, 16, 8)
    site = mesh.enumerate_oriented_moves(grown, "2-3")[0]
    flipped = mesh.apply_pachner_move(grown, site)
    assert flipped.f_vector == (6, 15, 18, 9)
    assert flipped.is_closed
    assert flipped.euler_characteristic() == 0


def test_stale_sites_and_wrong_kinds():
    sphere = builtin.sphere2()
    site = mesh.enumerate_oriented_moves(sphere, "2-2")[0]
    flipped = mesh.apply_pachner_move(sphere, site)
    with pytest.raises(mesh.StaleSite):
        mesh.apply_pachner_move(flipped, site)
    with pytest.raises(mesh.KindDimensionMismatch, match='not a move in dimension 2'):
        mesh.enumerate_oriented_moves(sphere, "2-3")
    with pytest.raises(mesh.KindDimensionMismatch):
        mesh.oriented_move_templates(3, "2-2")


def test_move_patches_of_a_base_complex():
    sphere = builtin.sphere2()
    patches = mesh.move_patches(sphere, "2-2", 2)
    assert len(patches) == 12 == len(mesh.enumerate_oriented_moves(sphere, "2-2"))
    assert mesh.move_patches(builtin.torus2(), "2-2", 2) == []
    for patch, site in patches:
        assert len(patch.simplices) == 2
        assert mesh.surface_kind(patch.simplices) == "disk"
    assert mesh.variant_name(("2-3", (1, 3), -1)) == "2-3 ranks=13 sign=-"


def test_canonical_form_ignores_height_values():
    torus = builtin.torus2()
    assert mesh.is_isomorphic(torus, torus.shifted("5/2"))
    assert not mesh.is_isomorphic(torus, torus.mirror())
    assert mesh.is_isomorphic(torus.mirror().mirror(), torus)


def test_json_round_trip_keeps_the_complex():
    pants = builtin.pants()
    again = mesh.from_json(ioutil.loads_json(ioutil.dumps_json(pants.to_json())))
    assert mesh.is_isomorphic(again, pants)
    with pytest.raises(mesh.MalformedTriangulation, match='needs dim'):
        mesh.from_json({"dim": 2})


def test_split_and_glue_round_trip():
    sphere = builtin.sphere2()
    upper = [s for s in sphere.simplices if 4 in s]
    top, bottom = mesh.split_triangulation(sphere, upper)
    assert mesh.surface_kind(top.simplices) == "disk"
    assert set(top.boundary_marks) == {"cut"} == set(bottom.boundary_marks)
    glued = mesh.glue_along_boundary(top, bottom, {"cut": "cut"})
    assert glued.is_closed
    assert mesh.is_isomorphic(glued, sphere)


def test_glue_rejects_mismatched_boundaries():
    small, large = builtin.cone_disk(3), builtin.cone_disk(4)
    with pytest.raises(mesh.BoundaryMismatch, match='different sizes'):
        mesh.glue_along_boundary(small, large.shifted(10), {"out": "out"})
    with pytest.raises(mesh.BoundaryMismatch, match='unknown boundary'):
        mesh.glue_along_boundary(small, small.shifted(10), {"in": "out"})
    with pytest.raises(mesh.OrientationClash):
        mesh.glue_along_boundary(small, small.shifted(10), {"out": "out"})


def test_split_rejects_bad_regions():
    sphere = builtin.sphere2()
    with pytest.raises(mesh.MalformedTriangulation, match='proper nonempty'):
        mesh.split_triangulation(sphere, [])
    with pytest.raises(mesh.MalformedTriangulation, match='proper nonempty'):
        mesh.split_triangulation(sphere, sphere.simplices)


def test_disjoint_union():
    both = mesh.disjoint_union(builtin.sphere2(), builtin.torus2())
    assert both.f_vector == (13, 33, 22)
    assert both.euler_characteristic() == 2
    with pytest.raises(mesh.MalformedTriangulation):
        mesh.disjoint_union(builtin.sphere2(), builtin.sphere3())


@pytest.mark.parametrize('make, betti', [
    (builtin.sphere2, (1, 0)), (builtin.torus2, (1, 2)), (builtin.sphere3, (1, 0)),
    (builtin.rp3, (1, 1)), (builtin.torus3, (1, 3)),
])
def test_z2_betti_numbers(make, betti):
    assert mesh.z2_betti_numbers(make()) == betti
