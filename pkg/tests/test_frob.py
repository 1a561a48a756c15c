from fractions import Fraction

import numpy as np
import pytest

from core import ioutil
from core.errors import InputError
from core.math import EXACT, float_field
from modules.orbifold2d import frob


@pytest.mark.parametrize('make', [
    lambda: frob.ground_field(),
    lambda: frob.group_algebra(frob.cyclic_group_table(2)),
    lambda: frob.group_algebra(frob.cyclic_group_table(5)),
    lambda: frob.group_algebra(*frob.symmetric_group_table(3)[:1]),
    lambda: frob.matrix_algebra(2),
    lambda: frob.matrix_algebra(3),
    lambda: frob.group_algebra(frob.cyclic_group_table(4), "float"),
])
def test_axioms_hold(make):
    report = frob.check_frobenius_axioms(make())
    assert report.passed, report.render_text()
    assert {r.name for r in report.records.values()} >= set(frob.AXIOMS)


def test_group_algebra_shape(s3, z3):
    assert s3.dim == 6
    assert s3.labels[0] == "012"
    assert s3.euler_weight == Fraction(1, 6)
    assert not s3.is_commutative()
    assert z3.is_commutative()
    assert frob.check_frobenius_axioms(s3.opposite()).passed


def test_multiply_matches_group_law(s3):
    table, _ = frob.symmetric_group_table(3)
    basis = np.eye(6, dtype=int).astype(object)
    for g in range(6):
        for h in range(6):
            product = s3.multiply(basis[g], basis[h])
            assert list(product) == list(basis[table[g][h]])


def test_rescaled_counit_breaks_only_separability(z3):
    report = frob.check_frobenius_axioms(z3.rescale_counit(Fraction(1, 3)))
    assert [r.name for r in report.failures()] == ["delta_separable"]
    assert report["delta_separable"].residual == 2
    with pytest.raises(InputError, match='invertible'):
        z3.rescale_counit(0)


def test_ensure_valid_attaches_report(z3):
    broken = z3.rescale_counit(2)
    with pytest.raises(frob.InvalidDatum) as info:
        frob.ensure_valid(broken)
    assert not info.value.report.passed
    assert frob.ensure_valid(z3).passed


def test_direct_sum(z2):
    both = z2.direct_sum(z2)
    assert both.dim == 4
    assert both.labels == ("e", "g", "e'", "g'")
    assert frob.check_frobenius_axioms(both).passed
    with pytest.raises(InputError, match='same field and euler weight'):
        z2.direct_sum(frob.ground_field())


def test_read_algebra_file(repo_data, z2):
    algebra = frob.from_json(ioutil.read_json(repo_data("z2.json")))
    assert algebra.labels == ("e", "g")
    assert algebra.euler_weight == Fraction(1, 2)
    assert frob.check_frobenius_axioms(algebra).passed
    assert (algebra.delta == z2.delta).all()


def test_json_round_trip(s3):
    again = frob.from_json(ioutil.loads_json(ioutil.dumps_json(s3.to_json())))
    assert again.labels == s3.labels
    assert (again.mu == s3.mu).all()
    assert (again.delta == s3.delta).all()
    assert "delta" not in s3.to_json()


def test_float_mode_parses_complex_tokens():
    data = frob.ground_field().to_json()
    data["eps"] = [[1, 0]]
    algebra = frob.from_json(data, float_field())
    assert algebra.field.mode == "float"
    assert frob.check_frobenius_axioms(algebra).passed


def test_given_delta_must_match_pairing(repo_data):
    data = ioutil.read_json(repo_data("z2.json"))
    derived = frob.from_json(data).delta
    data["delta"] = (derived * 2).tolist()
    report = frob.check_frobenius_axioms(frob.from_json(data))
    assert "delta_matches_pairing" in [r.name for r in report.failures()]


def test_tolerance_override():
    algebra = frob.group_algebra(frob.cyclic_group_table(2), "float")
    noisy = algebra.rescale_counit(1 + 1e-7)
    assert not frob.check_frobenius_axioms(noisy).passed
    assert frob.check_frobenius_axioms(noisy, tol=1e-3).passed


@pytest.mark.parametrize('data, error, match', [
    ({"mu": []}, InputError, 'needs dim'),
    ({"dim": 0}, frob.DimensionMismatch, 'positive int'),
    ({"dim": 1, "mu": [[[1]]], "eta": [1]}, InputError, 'missing'),
    ({"dim": 2, "mu": [[1, 0]], "eta": [1, 0], "eps": [1, 0]}, frob.DimensionMismatch, 'mu does not have shape'),
    ({"dim": 1, "mu": [[[1]]], "eta": [1], "eps": [0]}, frob.DegeneratePairing, 'degenerate'),
    ({"dim": 1, "mu": [[[1]]], "eta": [1], "eps": [1], "labels": ["a", "b"]}, frob.DimensionMismatch, 'labels'),
    ({"dim": 1, "mu": [[[1]]], "eta": [1], "eps": [1], "euler_weight": 0}, InputError, 'euler_weight'),
])
def test_from_json_rejects(data, error, match):
    with pytest.raises(error, match=match):
        frob.from_json(data, EXACT)


@pytest.mark.parametrize('table, match', [
    ([], 'square and nonempty'),
    ([[0, 1], [1]], 'square and nonempty'),
    ([[0, 2], [1, 0]], 'element indices'),
    ([[0, 1], [1, 1]], 'has no inverse'),
    ([[1, 0], [0, 0]], 'no identity'),
])
def test_not_a_group(table, match):
    with pytest.raises(frob.NotAGroup, match=match):
        frob.GroupTable(table)


def test_characteristic():
    with pytest.raises(frob.BadCharacteristic, match='divides'):
        frob.group_algebra(frob.cyclic_group_table(3), characteristic=3)
    with pytest.raises(InputError, match='not supported'):
        frob.group_algebra(frob.cyclic_group_table(3), characteristic=5)


def test_matrix_algebra_is_not_commutative():
    algebra = frob.matrix_algebra(2)
    assert algebra.labels == ("e00", "e01", "e10", "e11")
    assert not algebra.is_commutative()
    with pytest.raises(frob.DimensionMismatch):
        frob.matrix_algebra(0)
